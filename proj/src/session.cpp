#include "ofl/session.hpp"

#include <cmath>

#include "ofl/error.hpp"
#include "ofl/numeric.hpp"

namespace ofl {

Session::Session(const ClusterIndex& ix, PipelineMode mode, AuditContext* audit,
                 FracConfig frac_cfg)
    : ix_(ix), mode_(mode), audit_(audit), frac_(ix, frac_cfg) {
  if (audit_ != nullptr) {
    primal_growth_ = audit_->channel("frac.primal_growth_le_3");
    dual_growth_ = audit_->channel("frac.dual_growth_eq_1");
    saturation_ = audit_->channel("frac.saturation_prefix");
    monotone_ = audit_->channel("frac.monotone_updates");
    if (frac_.track_duals()) {
      dual_split_ = audit_->channel("frac.dual_split");
      alpha_bound_ = audit_->channel("frac.alpha_lt_2t");
      beta_sum_ = audit_->channel("frac.beta_sum_le_augments");
    }
    augment_bound_ = audit_->channel("frac.augment_count_bound");
    zero_cost_ = audit_->channel("frac.zero_cost_never_augmented");
    good_distance_ = audit_->channel("frac.good_distance");
    primal_dual_ = audit_->channel("frac.primal_le_3x_dual");
    if (mode_ == PipelineMode::kIntegral) {
      half_coverage_ = audit_->channel("round.half_coverage");
      opening_bound_ = audit_->channel("round.opening_cost_bound");
      connection_tau_ = audit_->channel("round.connection_le_tau");
      connection_total_ = audit_->channel("round.connection_total_2x");
      feasible_ = audit_->channel("int.feasible");
    }
  }
  if (mode_ == PipelineMode::kIntegral) {
    round_ = std::make_unique<RoundEngine>(ix_, audit_);
    round_->open_all_zero_cost();
  }
}

void Session::audit_update(const UpdateDelta& delta) {
  const std::int32_t c = delta.client;
  primal_growth_.check(delta.primal_delta <= 3.0 + 1e-9, [&] {
    return "primal grew by " + format_double(delta.primal_delta) + " serving " +
           ix_.client_ids[c];
  });
  // gamma moves in lockstep with the update count, one unit per operation.
  dual_growth_.check(frac_.gamma(c) == frac_.update_count(c), [&] {
    return "dual value " + std::to_string(frac_.gamma(c)) + " after " +
           std::to_string(frac_.update_count(c)) + " updates of " + ix_.client_ids[c];
  });

  if (saturation_.active()) {
    // x in [0,1] exactly; a saturated prefix, then at most one partial
    // distance, then zeros.
    bool ok = true;
    std::int32_t first_unsaturated = -1;
    for (std::int32_t ti = 0; ti < ix_.distance_count(); ++ti) {
      const Rational xv = frac_.x(c, ti);
      if (xv.negative() || Rational(1) < xv) ok = false;
      if (first_unsaturated < 0) {
        if (xv != Rational(1)) first_unsaturated = ti;
      } else if (!xv.is_zero()) {
        ok = false;  // mass beyond the first unsaturated distance
      }
    }
    if (first_unsaturated == 0) ok = false;  // distance zero must stay saturated
    saturation_.check(ok, [&] { return "saturation structure broken for " + ix_.client_ids[c]; });
  }

  if (monotone_.active()) {
    bool ok = true;
    for (const auto& ev : delta.augments) {
      if (ev.delta <= 0.0) ok = false;
    }
    monotone_.check(ok, [&] { return "non-positive opening increment"; });
  }

  if (dual_split_.active()) {
    bool split_ok = true;
    bool alpha_ok = true;
    for (std::int32_t ti = 0; ti < ix_.distance_count(); ++ti) {
      if (frac_.gamma(c) != frac_.alpha(c, ti) + frac_.beta(c, ti)) split_ok = false;
      const std::int64_t t = ix_.distances[ti];
      if (ti == 0) {
        if (frac_.alpha(c, ti) != 0) alpha_ok = false;
      } else if (frac_.alpha(c, ti) >= 2 * t) {
        alpha_ok = false;
      }
    }
    dual_split_.check(split_ok, [&] { return "gamma != alpha + beta for " + ix_.client_ids[c]; });
    alpha_bound_.check(alpha_ok, [&] { return "alpha bound broken for " + ix_.client_ids[c]; });
  }

  if (round_) {
    for (const auto& ev : delta.augments) round_->on_augment(ev.facility, ev.delta);
  }
}

ClientOutcome Session::serve(std::int32_t client) {
  ClientOutcome outcome;
  const std::size_t openings_before = round_ ? round_->openings().size() : 0;

  frac_.arrive(client);
  outcome.updates = frac_.serve_client(client, [this](const UpdateDelta& d) { audit_update(d); });
  outcome.tau = frac_.good_distance(client);

  if (good_distance_.active()) {
    const std::int32_t ti = ix_.t_pos(outcome.tau);
    const double mass = frac_.prefix_y(client, ti);
    const std::int64_t invested = frac_.connection_value(client);
    good_distance_.check(mass >= 0.5 - 1e-9 && 2 * invested >= outcome.tau, [&] {
      return "good distance " + std::to_string(outcome.tau) + " for " + ix_.client_ids[client] +
             ": prefix mass " + format_double(mass) + ", invested " + std::to_string(invested);
    });
  }

  if (round_) {
    Connection conn = round_->connect(client);
    outcome.connection = conn;
    for (std::size_t i = openings_before; i < round_->openings().size(); ++i) {
      outcome.opened_now.push_back(round_->openings()[i].facility);
    }
    connection_tau_.check(conn.cost <= outcome.tau, [&] {
      return "connection cost " + std::to_string(conn.cost) + " exceeds good distance " +
             std::to_string(outcome.tau);
    });
    if (half_coverage_.active()) {
      std::string context;
      const bool ok = round_->half_coverage_holds(&context);
      half_coverage_.check(ok, [&] { return context; });
    }
    if (opening_bound_.active()) {
      const double lhs = static_cast<double>(round_->opening_cost());
      const double rhs = round_->b() * round_->weighted_shadow() +
                         2.0 * static_cast<double>(round_->rho()) + 1e-6;
      opening_bound_.check(lhs <= rhs, [&] {
        return "opening cost " + format_double(lhs) + " exceeds " + format_double(rhs);
      });
    }
  }
  return outcome;
}

void Session::finish() {
  if (audit_ == nullptr) return;

  if (zero_cost_.active() || augment_bound_.active()) {
    const double nf = static_cast<double>(ix_.facility_count());
    for (std::int32_t f = 0; f < ix_.facility_count(); ++f) {
      const std::int64_t cost = ix_.facility_cost[f];
      if (cost == 0) {
        zero_cost_.check(frac_.augment_count(f) == 0,
                         [&] { return "free facility augmented: " + ix_.facility_ids[f]; });
        continue;
      }
      const double steps = std::ceil(std::log(nf) / std::log1p(1.0 / static_cast<double>(cost)));
      const std::int64_t bound = cost + static_cast<std::int64_t>(steps);
      augment_bound_.check(frac_.augment_count(f) <= bound, [&] {
        return ix_.facility_ids[f] + " augmented " + std::to_string(frac_.augment_count(f)) +
               " times, bound " + std::to_string(bound);
      });
    }
  }

  if (beta_sum_.active()) {
    // Per facility, the betas collected at its exact edge distances grow only
    // in updates that also augment the facility.
    std::vector<std::int64_t> beta_sum(ix_.facility_count(), 0);
    for (std::int32_t c : frac_.arrival_order()) {
      for (const auto& [cost, f] : ix_.adjacency[c]) {
        beta_sum[f] += frac_.beta(c, ix_.t_pos(cost));
      }
    }
    for (std::int32_t f = 0; f < ix_.facility_count(); ++f) {
      beta_sum_.check(beta_sum[f] <= frac_.augment_count(f), [&] {
        return ix_.facility_ids[f] + " collected beta " + std::to_string(beta_sum[f]) +
               " over " + std::to_string(frac_.augment_count(f)) + " augmentations";
      });
    }
  }

  primal_dual_.check(
      frac_.primal_value() <=
          3.0 * static_cast<double>(frac_.dual_value()) +
              1e-9 * std::max(1.0, frac_.primal_value()),
      [&] {
        return "primal " + format_double(frac_.primal_value()) + " vs dual " +
               std::to_string(frac_.dual_value());
      });

  if (round_) {
    connection_total_.check(round_->connection_cost() <= 2 * frac_.total_connection_value(), [&] {
      return "integral connections " + std::to_string(round_->connection_cost()) +
             " exceed twice the fractional " + std::to_string(frac_.total_connection_value());
    });
    if (feasible_.active()) {
      bool ok = true;
      for (const auto& conn : round_->connections()) {
        if (!round_->is_open(conn.facility)) ok = false;
      }
      feasible_.check(ok, [&] { return "a client is connected to a closed facility"; });
    }
  }
}

std::int64_t Session::int_total_cost() const {
  if (!round_) throw Error(ErrorKind::kInvalid, "no integral costs in fractional mode");
  return round_->total_cost();
}

}  // namespace ofl
