#include "davenport/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "davenport/errors.hpp"
#include "davenport/eval.hpp"
#include "davenport/family.hpp"
#include "davenport/json_io.hpp"
#include "davenport/regularity.hpp"
#include "davenport/sobolev.hpp"
#include "davenport/spectrum.hpp"
#include "davenport/transforms.hpp"

namespace davenport::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class T>
T field(const json& c, const char* key, T def) {
  if (!c.is_object() || !c.contains(key) || c[key].is_null()) return def;
  try {
    return c.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config field '") + key + "': " + e.what());
  }
}

CoefficientFamily family_of(const json& c) {
  if (!c.is_object() || !c.contains("family")) throw InvalidInput("config: missing 'family'");
  return CoefficientFamily::from_json(c["family"]);
}

double radius_field(const json& c, const char* key, double def) {
  const double v = field<double>(c, key, def);
  if (!(v >= 2.0) || !std::isfinite(v)) throw InvalidInput(std::string("config field '") + key + "' must be >= 2");
  return v;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

fs::path prepare(const std::string& out_dir) {
  const fs::path p(out_dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw ResourceLimit("cannot create output directory " + out_dir + ": " + ec.message());
  return p;
}

void write(const fs::path& p, const std::string& text) { write_text_file(p.string(), text); }

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<int> parse_counts(const std::string& s, int d) {
  std::vector<int> counts;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t next = std::min(s.find('x', pos), s.size());
    int v = 0;
    const auto res = std::from_chars(s.data() + pos, s.data() + next, v);
    if (res.ec != std::errc() || res.ptr != s.data() + next) throw InvalidInput("grid: cannot parse '" + s + "'");
    counts.push_back(v);
    pos = next + 1;
  }
  if (counts.size() == 1) counts.assign(static_cast<std::size_t>(d), counts[0]);
  if (static_cast<int>(counts.size()) != d) throw InvalidInput("grid: axis count differs from the family dimension");
  return counts;
}

// Accepts a full grid object, a count list, a single count or a string like "256x256";
// shorthand forms cover [0, 1)^d.
GridSpec grid_of(const json& c, int d, int default_count, bool closed_default) {
  GridSpec g;
  g.d = d;
  g.origin.assign(static_cast<std::size_t>(d), 0.0);
  g.extent.assign(static_cast<std::size_t>(d), 1.0);
  g.counts.assign(static_cast<std::size_t>(d), default_count);
  g.closed = closed_default;
  if (!c.contains("grid") || c["grid"].is_null()) return g;
  const json& j = c["grid"];
  try {
    if (j.is_object()) {
      GridSpec out = GridSpec::from_json(j);
      if (out.d != d) throw InvalidInput("grid: dimension differs from the family dimension");
      return out;
    }
    if (j.is_string()) {
      g.counts = parse_counts(j.get<std::string>(), d);
    } else if (j.is_number_integer()) {
      g.counts.assign(static_cast<std::size_t>(d), j.get<int>());
    } else if (j.is_array()) {
      g.counts = j.get<std::vector<int>>();
      if (static_cast<int>(g.counts.size()) != d) throw InvalidInput("grid: axis count differs from the family dimension");
    } else {
      throw InvalidInput("grid: unsupported form");
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("grid: ") + e.what());
  }
  return g;
}

json theta_json(const ThetaEstimate& t) {
  json flags = json::array();
  if (t.jump_canceling) flags.push_back("jump-canceling");
  if (t.indeterminate) flags.push_back("indeterminate");
  return {{"value", json_number(t.value)},
          {"indeterminate", t.indeterminate},
          {"jump_canceling", t.jump_canceling},
          {"shell", {t.inner, t.outer}},
          {"rows", t.rows.size()},
          {"flags", flags}};
}

json sparsity_json(const SparsityReport& s) {
  return {{"value", json_number(s.value)},
          {"sparse", s.sparse},
          {"empty_support", s.empty_support},
          {"growth_slope", json_number(s.growth_slope)}};
}

json gamma_json(const GammaEstimate& g) {
  return {{"value", json_number(g.value)}, {"empty", g.empty}, {"shell", {g.r0, g.r}}};
}

void write_map_csv(const fs::path& p, const LatticeMap& m, bool with_tail) {
  std::ostringstream os;
  for (int k = 1; k <= m.dimension(); ++k) os << (k > 1 ? "," : "") << 'q' << k;
  os << (with_tail ? ",A,tail,uncertain\n" : ",abar\n");
  for (const auto& [q, e] : m.entries()) {
    for (int k = 0; k < q.dim(); ++k) os << (k > 0 ? "," : "") << q[k];
    os << ',' << num(e.value);
    if (with_tail) os << ',' << num(e.tail) << ',' << (m.uncertain_zero(q) ? 1 : 0);
    os << '\n';
  }
  write(p, os.str());
}

std::uint64_t seed_of(const json& c) { return field<std::uint64_t>(c, "seed", 0); }

std::string fnv_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

json apply_overrides(json config, const Overrides& o) {
  if (config.is_null()) config = json::object();
  if (!config.is_object()) throw InvalidInput("config must be a JSON object");
  if (o.R) config["R"] = *o.R;
  if (o.N) config["N"] = *o.N;
  if (o.grid) config["grid"] = *o.grid;
  if (o.seed) config["seed"] = *o.seed;
  return config;
}

void cmd_eval(const json& c, const std::string& out_dir, std::ostream& log) {
  const CoefficientFamily a = family_of(c);
  const double N = radius_field(c, "N", 1024.0);
  const int d = a.dimension();
  const GridSpec g = grid_of(c, d, d == 1 ? 1024 : (d == 2 ? 256 : 32), false);
  const GridValues v = grid_eval(a, N, g);
  const fs::path dir = prepare(out_dir);

  std::ostringstream csv;
  write_grid_csv(csv, v);
  write(dir / "grid.csv", csv.str());

  json side = grid_sidecar(v, a);
  side["family_hash"] = family_hash(a);
  side["seed"] = seed_of(c);
  side["rows"] = v.values.size();
  // Oddness scan: x -> -x is a grid symmetry when the grid covers one period from 0.
  bool unit = true;
  for (int k = 0; k < d; ++k) {
    unit = unit && g.origin[static_cast<std::size_t>(k)] == 0.0 && g.extent[static_cast<std::size_t>(k)] == 1.0;
  }
  if (unit) {
    double worst = 0.0;
    for (std::size_t i = 0; i < g.total(); ++i) {
      const auto idx = g.index(i);
      std::size_t mirror = 0;
      for (int k = 0; k < d; ++k) {
        const int cnt = g.counts[static_cast<std::size_t>(k)];
        const int j = g.closed ? cnt - 1 - idx[static_cast<std::size_t>(k)] : (cnt - idx[static_cast<std::size_t>(k)]) % cnt;
        mirror = mirror * static_cast<std::size_t>(cnt) + static_cast<std::size_t>(j);
      }
      worst = std::max(worst, std::fabs(v.values[i] + v.values[mirror]));
    }
    side["odd_symmetry_max_residual"] = worst;
  } else {
    side["odd_symmetry_max_residual"] = nullptr;
  }
  write(dir / "grid.json", dump(side));
  log << "eval: " << v.values.size() << " rows, N=" << num(N) << ", tail_bound=" << num(v.tail_bound) << '\n';
}

void cmd_jumps(const json& c, const std::string& out_dir, std::ostream& log) {
  const CoefficientFamily a = family_of(c);
  const double Q = radius_field(c, "Q_radius", 64.0);
  const Int L = field<Int>(c, "L_max", 1024);
  if (L < 1) throw InvalidInput("config field 'L_max' must be >= 1");
  const LatticeMap A = jump_operator(a, Q, L);
  const LatticeMap M = maximal_operator(a, Q, L);
  const ThetaEstimate theta = theta_a_estimate(A, M, field<double>(c, "theta_inner", std::sqrt(Q)));

  double residual = 0.0;
  std::size_t checked = 0;
  for (const auto& n : a.support_in_ball(Q)) {
    if (!n.is_positive()) continue;
    residual = std::max(residual, std::fabs(invert_jump(A, n, L) - a.value_at(n)));
    ++checked;
  }
  std::size_t uncertain = 0;
  for (const auto& [q, e] : A.entries()) uncertain += A.uncertain_zero(q) ? 1 : 0;

  const fs::path dir = prepare(out_dir);
  write_map_csv(dir / "jumps.csv", A, true);
  write_map_csv(dir / "maximal.csv", M, false);
  json j{{"family", a.to_json()},
         {"family_hash", family_hash(a)},
         {"Q_radius", Q},
         {"L_max", L},
         {"seed", seed_of(c)},
         {"tail_bound", A.tail_bound()},
         {"maximal_tail_bound", M.tail_bound()},
         {"entries", A.size()},
         {"uncertain_entries", uncertain},
         {"theta", theta_json(theta)},
         {"roundtrip", {{"checked", checked}, {"max_residual", residual}}}};
  write(dir / "jumps.json", dump(j));
  log << "jumps: " << A.size() << " entries, theta=" << num(theta.value)
      << (theta.jump_canceling ? " (jump-canceling)" : "") << ", roundtrip residual=" << num(residual) << '\n';
}

namespace {

ExponentOptions exponent_options(const json& c) {
  ExponentOptions o;
  o.L_max = field<Int>(c, "L_max", 1024);
  if (o.L_max < 1) throw InvalidInput("config field 'L_max' must be >= 1");
  o.with_empirical = field<bool>(c, "empirical", false);
  const std::string detrend = field<std::string>(c, "detrend", "none");
  if (detrend == "linear") {
    o.detrend = Detrend::linear;
  } else if (detrend != "none") {
    throw InvalidInput("config field 'detrend' must be 'none' or 'linear'");
  }
  const auto radii = field<std::vector<int>>(c, "empirical_radii", {3, 12});
  if (radii.size() != 2 || radii[0] < 0 || radii[1] - radii[0] < 4) {
    throw InvalidInput("config field 'empirical_radii' must be [first, last] with last - first >= 4");
  }
  o.empirical_radii = dyadic_radii(radii[0], radii[1]);
  o.oscillation.seed = seed_of(c);
  o.oscillation.samples_per_ball = field<int>(c, "samples_per_ball", 64);
  return o;
}

}  // namespace

void cmd_exponent(const json& c, const std::string& out_dir, std::ostream& log) {
  const CoefficientFamily a = family_of(c);
  const double R = radius_field(c, "R", 0x1p20);
  const double R0 = field<double>(c, "R0", std::sqrt(R));
  const auto points = field<std::vector<std::vector<double>>>(c, "points", {});
  if (points.empty()) throw InvalidInput("config field 'points' must list at least one point");
  const ExponentAnalyzer an(a, R0, R, exponent_options(c));
  json records = json::array();
  for (const auto& x : points) {
    const ExponentEstimate e = an.estimate(x);
    records.push_back(e.to_json());
    log << "exponent at (";
    for (std::size_t k = 0; k < x.size(); ++k) log << (k ? "," : "") << num(x[k]);
    log << "): formula=" << num(e.formula_value) << " upper=" << num(e.upper_bound_value);
    if (e.empirical_value) log << " empirical=" << num(*e.empirical_value);
    log << '\n';
  }
  const json j{{"family", a.to_json()},
               {"family_hash", family_hash(a)},
               {"shells_used", {R0, R}},
               {"seed", seed_of(c)},
               {"jump_tail_bound", an.jumps().tail_bound()},
               {"formula_valid", an.formula_valid()},
               {"theta", theta_json(an.theta())},
               {"sparsity", sparsity_json(an.sparsity())},
               {"gamma", gamma_json(an.gamma())},
               {"records", records}};
  write(prepare(out_dir) / "exponents.json", dump(j));
}

void cmd_spectrum(const json& c, const std::string& out_dir, std::ostream& log) {
  const CoefficientFamily a = family_of(c);
  const int d = a.dimension();
  // Closed linspace grids keep interior nodes off the dyadic hyperplanes.
  const GridSpec g = grid_of(c, d, d == 1 ? 1024 : (d == 2 ? 64 : 16), true);
  SpectrumOptions o;
  o.r = radius_field(c, "R", 0x1p20);
  o.r0 = field<double>(c, "R0", 0.0);
  o.exponent = exponent_options(c);
  const json s = c.contains("spectrum") ? c["spectrum"] : json::object();
  const std::string method = field<std::string>(s, "method", "formula");
  if (method == "oscillation") {
    o.method = ExponentMethod::oscillation;
  } else if (method != "formula") {
    throw InvalidInput("spectrum.method must be 'formula' or 'oscillation'");
  }
  o.bin_width = field<double>(s, "bin_width", 0.0);
  o.eps_levels = field<std::vector<int>>(s, "eps_levels", {});
  o.snap_tolerance = field<double>(s, "snap_tolerance", o.snap_tolerance);
  o.snap_q_radius = field<double>(s, "snap_q_radius", 0.0);
  o.snap_budget = field<double>(s, "snap_budget", o.snap_budget);

  const EmpiricalSpectrum sp = empirical_spectrum(a, g, o);
  const fs::path dir = prepare(out_dir);
  std::ostringstream csv;
  sp.write_csv(csv);
  write(dir / "spectrum.csv", csv.str());

  std::ostringstream pred;
  pred << "h,predicted_dimension\n";
  const double gam = sp.gamma_estimate;
  const bool modeled = std::isfinite(gam) && gam > 0.0;
  if (modeled) {
    for (int i = 0; i <= 20; ++i) {
      const double h = gam * i / 20.0;
      pred << num(h) << ',' << num(theoretical_spectrum(gam, d, h).value) << '\n';
    }
  }
  write(dir / "spectrum_predicted.csv", pred.str());

  json j = sp.to_json(a);
  j["seed"] = seed_of(c);
  j["regime"] = !std::isfinite(gam) ? "out_of_scope" : (gam == 0.0 ? "slow_decay" : "modeled");
  write(dir / "spectrum.json", dump(j));
  log << "spectrum: " << sp.bins.size() << " bins over " << g.total() << " nodes, gamma_a~" << num(gam)
      << ", snapped=" << sp.snapped_count << ", infinite=" << sp.infinite_count
      << (sp.advisory ? " (advisory: formula preconditions failed)" : "") << '\n';
}

void cmd_sobolev(const json& c, const std::string& out_dir, std::ostream& log) {
  const json s = c.contains("sobolev") ? c["sobolev"] : json::object();
  const bool has_family = c.is_object() && c.contains("family");
  std::optional<CoefficientFamily> a;
  if (has_family) a = family_of(c);
  json j = json::object();
  double gamma = 0.0;
  if (s.contains("gamma")) {
    gamma = field<double>(s, "gamma", 0.0);
    j["gamma_source"] = "config";
  } else if (a) {
    const double R = radius_field(c, "R", 4096.0);
    const GammaEstimate g = gamma_a_estimate(*a, field<double>(c, "R0", std::sqrt(R)), R);
    if (g.empty) throw NumericError("sobolev: gamma_a estimate has an empty shell; set sobolev.gamma");
    gamma = g.value;
    j["gamma_source"] = "gamma_a_estimate";
    j["gamma_shell"] = {g.r0, g.r};
  } else {
    throw InvalidInput("sobolev: need 'sobolev.gamma' or a family");
  }
  const int d = field<int>(s, "d", a ? a->dimension() : 2);
  const SobolevLabel label = classify_sobolev(gamma, d);
  j["gamma"] = gamma;
  j["d"] = d;
  j["label"] = label.to_json();
  j["seed"] = seed_of(c);
  if (a && a->dimension() == d) {
    const double M = radius_field(s, "M", 64.0);
    j["family"] = a->to_json();
    j["family_hash"] = family_hash(*a);
    j["fourier_bound"] = fourier_bound_check(*a, gamma, M).to_json();
    if (s.contains("s")) {
      const double sv = field<double>(s, "s", 0.0);
      const double delta = field<double>(s, "delta", 0.0);
      const LatticeMap cm = fourier_map(*a, M, static_cast<Int>(std::ceil(M)));
      const DivergenceTest t = norm_divergence_test(cm, sv, delta, M);
      j["norm"] = {{"s", sv}, {"delta", delta}, {"M", M}, {"value", t.full_sum}, {"half_value", t.half_sum},
                   {"ratio", t.ratio}, {"threshold", t.threshold}, {"diverges", t.diverges}};
    }
  }
  write(prepare(out_dir) / "sobolev.json", dump(j));
  log << label.str() << '\n';
}

void cmd_selftest(const json& c, const std::string& out_dir, std::ostream& log) {
  const std::uint64_t seed = seed_of(c);
  const fs::path dir = prepare(out_dir);
  const json lacunary{{"kind", "power_lacunary"}, {"d", 2}, {"base", 2}, {"direction", {1, 0}}, {"gamma", 0.5}};
  const json finite{{"kind", "finite"},
                    {"d", 2},
                    {"entries", {{{1, 0}, 0.5}, {{2, 0}, -0.25}, {{1, 1}, 0.125}, {{2, 2}, 0.0625}, {{0, 3}, -0.1}}}};
  std::ostringstream sink;
  cmd_eval({{"family", lacunary}, {"N", 4096}, {"grid", "64x64"}, {"seed", seed}}, (dir / "eval").string(), sink);
  cmd_jumps({{"family", finite}, {"Q_radius", 16}, {"L_max", 16}, {"seed", seed}}, (dir / "jumps").string(), sink);
  cmd_exponent({{"family", lacunary},
                {"R", 4096},
                {"points", {{0.1, 0.2}, {0.381966011250105, 0.5}, {0.5, 0.25}}},
                {"empirical", true},
                {"empirical_radii", {3, 8}},
                {"seed", seed}},
               (dir / "exponent").string(), sink);
  cmd_spectrum({{"family", lacunary}, {"R", 4096}, {"grid", "32x32"}, {"seed", seed}}, (dir / "spectrum").string(),
               sink);
  cmd_sobolev({{"family", lacunary}, {"sobolev", {{"gamma", 0.5}, {"M", 32}}}, {"seed", seed}},
              (dir / "sobolev").string(), sink);

  json manifest = json::object();
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().filename() == "manifest.json") continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    manifest[fs::relative(entry.path(), dir).generic_string()] = fnv_hex(buf.str());
  }
  write(dir / "manifest.json", dump({{"seed", seed}, {"files", manifest}}));
  log << sink.str() << "selftest: " << manifest.size() << " artifacts\n";
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"eval", "jumps", "exponent", "spectrum", "sobolev", "selftest"};
  return names;
}

int run(const std::string& command, const json& config, const std::string& out_dir, std::ostream& log,
        std::ostream& err) {
  try {
    if (command == "eval") {
      cmd_eval(config, out_dir, log);
    } else if (command == "jumps") {
      cmd_jumps(config, out_dir, log);
    } else if (command == "exponent") {
      cmd_exponent(config, out_dir, log);
    } else if (command == "spectrum") {
      cmd_spectrum(config, out_dir, log);
    } else if (command == "sobolev") {
      cmd_sobolev(config, out_dir, log);
    } else if (command == "selftest") {
      cmd_selftest(config, out_dir, log);
    } else {
      throw InvalidInput("unknown command: " + command);
    }
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const ResourceLimit& e) {
    err << "resource error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "resource error: " << e.what() << '\n';
    return 2;
  } catch (const std::bad_alloc&) {
    err << "resource error: out of memory\n";
    return 2;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}

}  // namespace davenport::cli
