#include "ofl/rounding.hpp"

#include <algorithm>
#include <cmath>

#include "ofl/error.hpp"
#include "ofl/numeric.hpp"

namespace ofl {

RoundEngine::RoundEngine(const ClusterIndex& ix, AuditContext* audit)
    : ix_(ix),
      ell_(ix.element_count()),
      log_ell_(std::log(static_cast<double>(ix.element_count()))),
      b_(6.0 * std::log(static_cast<double>(ix.element_count()))),
      rho_(ix.max_facility_cost),
      yhat_(ix.facility_count(), 0),
      shadow_y_(ix.facility_count(), 0.0),
      elements_of_facility_(ix.facility_count()),
      element_y_(ell_, 0.0),
      element_open_(ell_, 0),
      phi1_(static_cast<double>(ell_)) {
  if (audit != nullptr) {
    phi_monotone_ = audit->channel("round.phi_monotone");
    phi_branch_ = audit->channel("round.phi_branch_exists");
    audit->channel("round.phi_initial_2ell")
        .check(phi1_ == static_cast<double>(ell_) && phi2_exponent_ == 0.0,
               [&] { return "potential does not start at 2*ell"; });
  }
  // A facility belongs to every element (c, t) with an edge (f, c) of cost
  // <= t; edge costs always lie on the distance scale.
  for (std::int32_t c = 0; c < ix_.client_count(); ++c) {
    for (const auto& [cost, f] : ix_.adjacency[c]) {
      for (std::int32_t ti = ix_.t_pos(cost); ti < ix_.distance_count(); ++ti) {
        elements_of_facility_[f].push_back(element_id(c, ti));
      }
    }
  }
  for (auto& elems : elements_of_facility_) std::sort(elems.begin(), elems.end());
}

double RoundEngine::element_term(std::int64_t element) const {
  return std::exp(4.0 * element_y_[element] * log_ell_);
}

double RoundEngine::log_phi() const {
  double log_phi1 =
      phi1_ > 0.0 ? std::log(phi1_) : -std::numeric_limits<double>::infinity();
  return log_sum_exp(log_phi1, log_ell_ + phi2_exponent_);
}

double RoundEngine::phi2_log() const {
  if (rho_ == 0) {
    throw Error(ErrorKind::kInvalid, "phi2 undefined: every facility is free");
  }
  return log_ell_ + phi2_exponent_;
}

void RoundEngine::apply_opening(std::int32_t facility) {
  yhat_[facility] = 1;
  opening_cost_ += ix_.facility_cost[facility];
  openings_.push_back({facility, events_});
  for (std::int64_t e : elements_of_facility_[facility]) {
    if (element_open_[e] == 0) phi1_ -= element_term(e);
    ++element_open_[e];
  }
  if (rho_ > 0) {
    phi2_exponent_ +=
        static_cast<double>(ix_.facility_cost[facility]) / (2.0 * static_cast<double>(rho_));
  }
}

void RoundEngine::handle_zero_cost(std::int32_t facility) {
  if (ix_.facility_cost[facility] != 0) {
    throw Error(ErrorKind::kInvalid, "handle_zero_cost on a priced facility");
  }
  const double before = log_phi();
  shadow_y_[facility] += 1.0;
  for (std::int64_t e : elements_of_facility_[facility]) {
    if (element_open_[e] == 0) phi1_ -= element_term(e);
    element_y_[e] += 1.0;
    if (element_open_[e] == 0) phi1_ += element_term(e);
  }
  if (yhat_[facility] == 0) apply_opening(facility);
  ++events_;
  const double after = log_phi();
  phi_monotone_.check(after <= before + kPhiRelTol, [&] {
    return "free opening raised the potential: " + format_double(before) + " -> " +
           format_double(after);
  });
}

void RoundEngine::open_all_zero_cost() {
  for (std::int32_t f = 0; f < ix_.facility_count(); ++f) {
    if (ix_.facility_cost[f] == 0) handle_zero_cost(f);
  }
}

PhiSnapshot RoundEngine::on_augment(std::int32_t facility, double delta) {
  if (delta <= 0.0) throw Error(ErrorKind::kInvalid, "augment with non-positive delta");
  const std::int64_t cost = ix_.facility_cost[facility];
  if (cost == 0) {
    throw Error(ErrorKind::kInternal, "fractional increment reported for a free facility");
  }

  PhiSnapshot snap;
  snap.log_before = log_phi();

  // The fractional increase applies under either choice.
  shadow_y_[facility] += delta;
  for (std::int64_t e : elements_of_facility_[facility]) {
    if (element_open_[e] == 0) phi1_ -= element_term(e);
    element_y_[e] += delta;
    if (element_open_[e] == 0) phi1_ += element_term(e);
  }
  const double coeff = static_cast<double>(cost) / (2.0 * static_cast<double>(rho_));
  phi2_exponent_ -= b_ * coeff * delta;

  if (yhat_[facility] == 0) {
    // Candidate potentials for keeping the facility closed vs opening it.
    const double keep_log =
        log_sum_exp(phi1_ > 0.0 ? std::log(phi1_) : -std::numeric_limits<double>::infinity(),
                    log_ell_ + phi2_exponent_);
    double phi1_open = phi1_;
    for (std::int64_t e : elements_of_facility_[facility]) {
      if (element_open_[e] == 0) phi1_open -= element_term(e);
    }
    phi1_open = std::max(phi1_open, 0.0);
    const double open_log = log_sum_exp(
        phi1_open > 0.0 ? std::log(phi1_open) : -std::numeric_limits<double>::infinity(),
        log_ell_ + phi2_exponent_ + coeff);
    phi_evaluations_ += 2;

    const bool branch_ok = std::min(keep_log, open_log) <= snap.log_before + kPhiRelTol;
    if (phi_branch_.active()) {
      phi_branch_.check(branch_ok, [&] {
        return "both rounding choices raise the potential at facility " +
               ix_.facility_ids[facility];
      });
    } else if (!branch_ok) {
      throw Error(ErrorKind::kInvariant,
                  "both rounding choices raise the potential at facility " +
                      ix_.facility_ids[facility]);
    }
    if (open_log < keep_log) {
      apply_opening(facility);
      snap.opened = true;
    }
  }

  ++events_;
  snap.log_after = log_phi();
  phi_monotone_.check(snap.log_after <= snap.log_before + kPhiRelTol, [&] {
    return "potential increased on an event at facility " + ix_.facility_ids[facility] + ": " +
           format_double(snap.log_before) + " -> " + format_double(snap.log_after);
  });
  return snap;
}

Connection RoundEngine::connect(std::int32_t client) {
  for (const auto& [cost, f] : ix_.adjacency[client]) {
    if (yhat_[f]) {
      Connection conn{client, f, cost};
      connections_.push_back(conn);
      connection_cost_ += cost;
      return conn;
    }
  }
  throw Error(ErrorKind::kInfeasible,
              "no open facility adjacent to client " + ix_.client_ids[client]);
}

double RoundEngine::prefix_shadow(std::int32_t client, std::int32_t ti) const {
  return element_y_[element_id(client, ti)];
}

std::int32_t RoundEngine::prefix_open_count(std::int32_t client, std::int32_t ti) const {
  return element_open_[element_id(client, ti)];
}

double RoundEngine::weighted_shadow() const {
  double total = 0.0;
  for (std::int32_t f = 0; f < ix_.facility_count(); ++f) {
    total += static_cast<double>(ix_.facility_cost[f]) * shadow_y_[f];
  }
  return total;
}

bool RoundEngine::half_coverage_holds(std::string* context) const {
  for (std::int32_t c = 0; c < ix_.client_count(); ++c) {
    for (std::int32_t ti = 0; ti < ix_.distance_count(); ++ti) {
      const std::int64_t e = element_id(c, ti);
      if (element_y_[e] >= 0.5 && element_open_[e] == 0) {
        if (context != nullptr) {
          *context = "prefix (" + ix_.client_ids[c] + ", " + std::to_string(ix_.distances[ti]) +
                     ") has mass " + format_double(element_y_[e]) + " but no open facility";
        }
        return false;
      }
    }
  }
  return true;
}

bool exp_moment_inequality_holds(double q, double p, double slack) {
  const double lhs = p + (1.0 - p) * std::exp(q);
  const double rhs = std::exp(-1.5 * q * std::log(p));
  return rhs - lhs >= -slack;
}

}  // namespace ofl
