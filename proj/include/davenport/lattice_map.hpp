#pragma once

#include <map>
#include <optional>

#include <nlohmann/json.hpp>

#include "davenport/arith.hpp"

namespace davenport {

enum class Parity { odd, even };

// Sparse map on Z^d_* stored on Z^d_+ representatives. Missing keys read as 0.
class LatticeMap {
 public:
  struct Entry {
    double value = 0.0;
    double tail = 0.0;  // truncation error bound for this entry
  };

  LatticeMap(int d, Parity parity, double truncation_radius);

  int dimension() const { return d_; }
  Parity parity() const { return parity_; }
  double truncation_radius() const { return radius_; }
  // Worst-case truncation error over every key in the ball, stored or not.
  double tail_bound() const { return tail_; }
  void set_tail_bound(double t) { tail_ = t; }

  // Key may be any nonzero vector; it is folded onto Z^d_+ using the parity.
  void set(const LatticeVector& q, double value, double tail = 0.0);
  void add(const LatticeVector& q, double value);
  double value(const LatticeVector& q) const;
  std::optional<Entry> entry(const LatticeVector& q) const;
  // |value| does not exceed its entry tail, so the sign and support are unknown.
  bool uncertain_zero(const LatticeVector& q) const;

  const std::map<LatticeVector, Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  nlohmann::json to_json() const;
  static LatticeMap from_json(const nlohmann::json& j);

 private:
  int d_;
  Parity parity_;
  double radius_;
  double tail_ = 0.0;
  std::map<LatticeVector, Entry> entries_;
};

}  // namespace davenport
