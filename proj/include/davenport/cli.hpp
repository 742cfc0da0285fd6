#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace davenport::cli {

// Flag values that replace the matching config fields.
struct Overrides {
  std::optional<double> R;
  std::optional<double> N;
  std::optional<std::string> grid;  // "256" or "256x256"
  std::optional<std::uint64_t> seed;
};

nlohmann::json apply_overrides(nlohmann::json config, const Overrides& o);

// Each command writes its artifacts into out_dir and a short summary to log.
void cmd_eval(const nlohmann::json& config, const std::string& out_dir, std::ostream& log);
void cmd_jumps(const nlohmann::json& config, const std::string& out_dir, std::ostream& log);
void cmd_exponent(const nlohmann::json& config, const std::string& out_dir, std::ostream& log);
void cmd_spectrum(const nlohmann::json& config, const std::string& out_dir, std::ostream& log);
void cmd_sobolev(const nlohmann::json& config, const std::string& out_dir, std::ostream& log);
// Fixed small scenarios for every command; the config may only set "seed".
void cmd_selftest(const nlohmann::json& config, const std::string& out_dir, std::ostream& log);

const std::vector<std::string>& command_names();

// Dispatches and maps errors to exit codes: 1 config, 2 resource, 3 numeric.
int run(const std::string& command, const nlohmann::json& config, const std::string& out_dir, std::ostream& log,
        std::ostream& err);

}  // namespace davenport::cli
