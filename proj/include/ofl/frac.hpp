#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ofl/instance.hpp"
#include "ofl/rational.hpp"

namespace ofl {

struct AugmentEvent {
  std::int32_t facility;
  double delta;  // increase of the fractional opening
};

// Everything one update operation changed, in execution order. Augment deltas
// double as the event trace consumed by the rounding engine.
struct UpdateDelta {
  std::int32_t client = -1;
  std::int64_t t_star = -1;  // distance whose connection variable grew; -1 if all saturated
  bool x_increased = false;
  std::vector<AugmentEvent> augments;
  double primal_delta = 0.0;
};

struct FracConfig {
  // Dual variables never influence decisions; they exist for the audits and
  // can be switched off for speed.
  bool track_duals = true;
};

// Online fractional solver. Opening variables y are doubles; connection
// variables x are exact rationals with power-of-two denominators, so
// saturation tests need no tolerance. A client is served once
//   sum_t min{ x_{c,t}, y(cluster at t) } >= 1.
//
// Serving a client repeats the update operation:
//   1. bump the client's dual value,
//   2. bump one dual counter per distance (beta if saturated, alpha if not),
//   3. raise x at the cheapest unsaturated distance by 1/t,
//   4. multiplicatively grow every opening reachable through a saturated
//      distance: y <- (1 + 1/cost) y + 1/(|F| cost),
//   5. refresh the saturated set.
class FracEngine {
 public:
  explicit FracEngine(const ClusterIndex& ix, FracConfig cfg = {});

  void arrive(std::int32_t client);
  bool arrived(std::int32_t client) const;
  double serving_value(std::int32_t client) const;
  bool serving_met(std::int32_t client) const;
  UpdateDelta update_operation(std::int32_t client);
  // Runs update operations until the client is served; on_update fires after
  // each one. Throws kNonTermination past the per-client update bound.
  std::int64_t serve_client(std::int32_t client,
                            const std::function<void(const UpdateDelta&)>& on_update = {});

  // A distance tau with y(prefix up to tau) >= 1/2 and total connection
  // investment >= tau/2. Requires the serving constraint to hold.
  std::int64_t good_distance(std::int32_t client) const;

  double primal_value() const;
  std::int64_t dual_value() const;
  std::int64_t connection_value(std::int32_t client) const;  // sum_t t * x, exact
  std::int64_t total_connection_value() const;

  double y(std::int32_t facility) const { return y_[facility]; }
  double cluster_y(std::int32_t client, std::int32_t ti) const;
  double prefix_y(std::int32_t client, std::int32_t ti) const;
  Rational x(std::int32_t client, std::int32_t ti) const;
  bool is_saturated(std::int32_t client, std::int32_t ti) const;
  std::int64_t gamma(std::int32_t client) const;
  std::int64_t alpha(std::int32_t client, std::int32_t ti) const;
  std::int64_t beta(std::int32_t client, std::int32_t ti) const;
  std::int64_t update_count(std::int32_t client) const;
  std::int64_t total_updates() const { return total_updates_; }
  std::int64_t augment_count(std::int32_t facility) const { return augment_count_[facility]; }
  std::int64_t total_augmentations() const { return total_augmentations_; }
  std::int64_t update_bound() const { return update_bound_; }
  const std::vector<std::int32_t>& arrival_order() const { return arrival_order_; }
  const ClusterIndex& index() const { return ix_; }
  bool track_duals() const { return cfg_.track_duals; }

  static constexpr double kServingSlack = 1e-12;

 private:
  struct ClientRow {
    bool arrived = false;
    std::vector<std::int64_t> x_num;  // x at index ti equals x_num[ti] / max(t, 1)
    std::vector<char> saturated;
    std::vector<std::int64_t> alpha;
    std::vector<std::int64_t> beta;
    std::int64_t gamma = 0;
    std::int64_t updates = 0;
    std::int64_t connection = 0;  // exact sum_t t * x
  };

  const ClientRow& row(std::int32_t client) const;
  void refresh_saturated(ClientRow& row) const;

  const ClusterIndex& ix_;
  FracConfig cfg_;
  std::vector<double> y_;
  std::vector<std::int64_t> augment_count_;
  std::vector<ClientRow> rows_;
  std::vector<std::int32_t> arrival_order_;
  std::int64_t total_updates_ = 0;
  std::int64_t total_augmentations_ = 0;
  std::int64_t update_bound_ = 0;
};

}  // namespace ofl
