#include "davenport/lattice_map.hpp"

#include <cmath>

#include "davenport/errors.hpp"

namespace davenport {

LatticeMap::LatticeMap(int d, Parity parity, double truncation_radius)
    : d_(d), parity_(parity), radius_(truncation_radius) {
  if (d < 1) throw InvalidInput("LatticeMap: dimension must be >= 1");
  if (!(truncation_radius > 0.0)) throw InvalidInput("LatticeMap: radius must be positive");
}

namespace {

void check_key(const LatticeVector& q, int d) {
  if (q.dim() != d) throw InvalidInput("LatticeMap: key dimension mismatch");
  if (q.is_zero()) throw InvalidInput("LatticeMap: zero key");
}

}  // namespace

void LatticeMap::set(const LatticeVector& q, double value, double tail) {
  check_key(q, d_);
  if (q.orientation() < 0 && parity_ == Parity::odd) value = -value;
  entries_[q.positive_representative()] = Entry{value, tail};
}

void LatticeMap::add(const LatticeVector& q, double value) {
  check_key(q, d_);
  if (q.orientation() < 0 && parity_ == Parity::odd) value = -value;
  entries_[q.positive_representative()].value += value;
}

double LatticeMap::value(const LatticeVector& q) const {
  check_key(q, d_);
  const int o = q.orientation();
  const auto it = entries_.find(o < 0 ? -q : q);
  if (it == entries_.end()) return 0.0;
  return (o < 0 && parity_ == Parity::odd) ? -it->second.value : it->second.value;
}

std::optional<LatticeMap::Entry> LatticeMap::entry(const LatticeVector& q) const {
  check_key(q, d_);
  const auto it = entries_.find(q.positive_representative());
  if (it == entries_.end()) return std::nullopt;
  Entry e = it->second;
  if (q.orientation() < 0 && parity_ == Parity::odd) e.value = -e.value;
  return e;
}

bool LatticeMap::uncertain_zero(const LatticeVector& q) const {
  const auto e = entry(q);
  if (!e) return tail_ > 0.0;
  return std::fabs(e->value) <= e->tail;
}

nlohmann::json LatticeMap::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [q, e] : entries_) entries.push_back({q.coords(), e.value});
  return {{"d", d_},
          {"parity", parity_ == Parity::odd ? "odd" : "even"},
          {"R", radius_},
          {"tail", tail_},
          {"entries", entries}};
}

LatticeMap LatticeMap::from_json(const nlohmann::json& j) {
  try {
    const std::string p = j.at("parity").get<std::string>();
    if (p != "odd" && p != "even") throw InvalidInput("LatticeMap parity must be odd or even");
    LatticeMap m(j.at("d").get<int>(), p == "odd" ? Parity::odd : Parity::even,
                 j.at("R").get<double>());
    const double tail = j.value("tail", 0.0);
    if (!(tail >= 0.0)) throw InvalidInput("LatticeMap tail must be nonnegative");
    m.set_tail_bound(tail);
    for (const auto& e : j.at("entries")) {
      LatticeVector q(e.at(0).get<std::vector<Int>>());
      if (q.norm() > m.radius_) throw InvalidInput("LatticeMap key outside truncation radius");
      if (m.entries_.count(q.positive_representative())) {
        throw InvalidInput("LatticeMap has duplicate key " + q.to_string());
      }
      m.set(q, e.at(1).get<double>(), tail);
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed LatticeMap: ") + e.what());
  }
}

}  // namespace davenport
