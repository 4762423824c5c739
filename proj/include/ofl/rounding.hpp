#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ofl/audit.hpp"
#include "ofl/instance.hpp"

namespace ofl {

struct Connection {
  std::int32_t client;
  std::int32_t facility;
  std::int64_t cost;
};

struct OpeningEvent {
  std::int32_t facility;
  std::int64_t event;  // index of the fractional event that triggered it
};

struct PhiSnapshot {
  double log_before = 0.0;
  double log_after = 0.0;
  bool opened = false;
};

// Deterministic online rounding of fractional opening increments into
// integral openings, plus the connection step (cheapest edge to an open
// facility).
//
// Elements are all pairs (client, scale distance); element (c,t) is covered
// once an opened facility lies within distance t of c. With ell elements,
// rho the maximum opening cost and b = 6 ln ell, the potential is
//   phi1 = sum over uncovered elements of ell^(4 * y(prefix)),
//   phi2 = ell * exp( sum_f cost(f)/(2 rho) * (yhat_f - b * y_f) ).
// On each fractional increment the engine opens the facility iff that choice
// yields the smaller potential; a non-increasing choice always exists. The
// potential starts at 2*ell, so its cap enforces both half-coverage
// (y(prefix) >= 1/2 forces an open facility in the prefix) and the opening
// cost bound (total opening cost <= b * fractional opening cost + 2 rho).
//
// phi2's exponent can reach ~|F|/2, so comparisons combine per-part logs by
// log-sum-exp instead of evaluating phi2 directly.
class RoundEngine {
 public:
  explicit RoundEngine(const ClusterIndex& ix, AuditContext* audit = nullptr);

  // Opens one free facility and mirrors its unit fractional opening; covered
  // elements leave phi1 and phi2 is unaffected (zero coefficient).
  void handle_zero_cost(std::int32_t facility);
  // Convenience: handle_zero_cost for every zero-cost facility, ascending.
  void open_all_zero_cost();

  // Consumes one fractional increment of a positive-cost facility.
  PhiSnapshot on_augment(std::int32_t facility, double delta);

  // Cheapest edge from the client to an open facility. Throws kInfeasible if
  // no adjacent facility is open.
  Connection connect(std::int32_t client);

  double log_phi() const;
  double phi1() const { return phi1_; }
  double phi2_exponent() const { return phi2_exponent_; }
  double phi2_log() const;  // requires a positive maximum opening cost
  std::int64_t ell() const { return ell_; }
  double b() const { return b_; }
  std::int64_t rho() const { return rho_; }

  bool is_open(std::int32_t facility) const { return yhat_[facility] != 0; }
  double shadow_y(std::int32_t facility) const { return shadow_y_[facility]; }
  double prefix_shadow(std::int32_t client, std::int32_t ti) const;
  std::int32_t prefix_open_count(std::int32_t client, std::int32_t ti) const;

  std::int64_t opening_cost() const { return opening_cost_; }
  std::int64_t connection_cost() const { return connection_cost_; }
  std::int64_t total_cost() const { return opening_cost_ + connection_cost_; }
  double weighted_shadow() const;  // sum_f cost(f) * shadow_y_f

  const std::vector<Connection>& connections() const { return connections_; }
  const std::vector<OpeningEvent>& openings() const { return openings_; }
  std::int64_t events() const { return events_; }
  std::int64_t phi_evaluations() const { return phi_evaluations_; }

  // Exhaustive scan: shadow mass >= 1/2 on a prefix implies an open facility
  // in that prefix. Returns false and fills `context` on the first violation.
  bool half_coverage_holds(std::string* context = nullptr) const;

  static constexpr double kPhiRelTol = 1e-9;

 private:
  double element_term(std::int64_t element) const;
  std::int64_t element_id(std::int32_t client, std::int32_t ti) const {
    return static_cast<std::int64_t>(client) * ix_.distance_count() + ti;
  }
  void apply_opening(std::int32_t facility);

  const ClusterIndex& ix_;
  AuditChannel phi_monotone_;
  AuditChannel phi_branch_;
  std::int64_t ell_;
  double log_ell_;
  double b_;
  std::int64_t rho_;
  std::vector<char> yhat_;
  std::vector<double> shadow_y_;
  std::vector<std::vector<std::int64_t>> elements_of_facility_;
  std::vector<double> element_y_;       // y(prefix) per element
  std::vector<std::int32_t> element_open_;  // open facilities in the prefix
  double phi1_;
  double phi2_exponent_ = 0.0;
  std::int64_t opening_cost_ = 0;
  std::int64_t connection_cost_ = 0;
  std::vector<Connection> connections_;
  std::vector<OpeningEvent> openings_;
  std::int64_t events_ = 0;
  std::int64_t phi_evaluations_ = 0;
};

// The scalar inequality behind the opening rule: for q in [0, 1/2] and
// p in (0, 1],  p + (1-p) e^q <= exp(-(3/2) q ln p).
bool exp_moment_inequality_holds(double q, double p, double slack = 1e-12);

}  // namespace ofl
