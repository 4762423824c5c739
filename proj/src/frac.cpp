#include "ofl/frac.hpp"

#include <algorithm>

#include "ofl/error.hpp"

namespace ofl {

FracEngine::FracEngine(const ClusterIndex& ix, FracConfig cfg)
    : ix_(ix),
      cfg_(cfg),
      y_(ix.facility_count(), 0.0),
      augment_count_(ix.facility_count(), 0),
      rows_(ix.client_count()) {
  for (std::int32_t f = 0; f < ix_.facility_count(); ++f) {
    if (ix_.facility_cost[f] == 0) y_[f] = 1.0;
  }
  const __int128 bound = static_cast<__int128>(2) * ix_.max_edge_cost +
                         static_cast<__int128>(ix_.facility_count()) * ix_.max_facility_cost;
  update_bound_ = bound > INT64_MAX ? INT64_MAX : static_cast<std::int64_t>(bound);
}

bool FracEngine::arrived(std::int32_t client) const { return rows_[client].arrived; }

const FracEngine::ClientRow& FracEngine::row(std::int32_t client) const {
  const auto& r = rows_[client];
  if (!r.arrived) throw Error(ErrorKind::kInvalid, "client has not arrived");
  return r;
}

void FracEngine::arrive(std::int32_t client) {
  auto& r = rows_[client];
  if (r.arrived) throw Error(ErrorKind::kInvalid, "duplicate arrival: " + ix_.client_ids[client]);
  const auto nt = ix_.distance_count();
  r.arrived = true;
  r.x_num.assign(nt, 0);
  r.x_num[0] = 1;  // distance zero starts saturated
  r.saturated.assign(nt, 0);
  r.saturated[0] = 1;
  if (cfg_.track_duals) {
    r.alpha.assign(nt, 0);
    r.beta.assign(nt, 0);
  }
  arrival_order_.push_back(client);
}

double FracEngine::cluster_y(std::int32_t client, std::int32_t ti) const {
  double sum = 0.0;
  for (std::int32_t f : ix_.clusters[client][ti]) sum += y_[f];
  return sum;
}

double FracEngine::prefix_y(std::int32_t client, std::int32_t ti) const {
  double sum = 0.0;
  for (std::int32_t i = 0; i <= ti; ++i) sum += cluster_y(client, i);
  return sum;
}

Rational FracEngine::x(std::int32_t client, std::int32_t ti) const {
  const auto& r = row(client);
  std::int64_t den = ti == 0 ? 1 : ix_.distances[ti];
  return Rational(r.x_num[ti], den);
}

bool FracEngine::is_saturated(std::int32_t client, std::int32_t ti) const {
  return row(client).saturated[ti] != 0;
}

double FracEngine::serving_value(std::int32_t client) const {
  const auto& r = row(client);
  double total = 0.0;
  for (std::int32_t ti = 0; ti < ix_.distance_count(); ++ti) {
    if (r.x_num[ti] == 0) continue;
    double xv = ti == 0 ? static_cast<double>(r.x_num[0])
                        : static_cast<double>(r.x_num[ti]) / static_cast<double>(ix_.distances[ti]);
    total += std::min(xv, cluster_y(client, ti));
  }
  return total;
}

bool FracEngine::serving_met(std::int32_t client) const {
  return serving_value(client) >= 1.0 - kServingSlack;
}

void FracEngine::refresh_saturated(ClientRow& r) const {
  for (std::int32_t ti = 0; ti < ix_.distance_count(); ++ti) {
    std::int64_t den = ti == 0 ? 1 : ix_.distances[ti];
    r.saturated[ti] = r.x_num[ti] >= den ? 1 : 0;
  }
}

UpdateDelta FracEngine::update_operation(std::int32_t client) {
  auto& r = rows_[client];
  if (!r.arrived) throw Error(ErrorKind::kInvalid, "client has not arrived");
  if (serving_met(client)) {
    throw Error(ErrorKind::kInvalid, "update operation on an already served client");
  }

  UpdateDelta delta;
  delta.client = client;
  const auto nt = ix_.distance_count();

  ++r.gamma;
  if (cfg_.track_duals) {
    for (std::int32_t ti = 0; ti < nt; ++ti) {
      if (r.saturated[ti]) {
        ++r.beta[ti];
      } else {
        ++r.alpha[ti];
      }
    }
  }

  // Raise x at the smallest unsaturated distance by 1/t.
  for (std::int32_t ti = 0; ti < nt; ++ti) {
    if (!r.saturated[ti]) {
      ++r.x_num[ti];
      r.connection += 1;  // t * (1/t)
      delta.t_star = ix_.distances[ti];
      delta.x_increased = true;
      delta.primal_delta += 1.0;
      break;
    }
  }

  // Augment every opening reachable through a saturated distance.
  const std::int64_t nf = ix_.facility_count();
  for (std::int32_t ti = 0; ti < nt; ++ti) {
    if (!r.saturated[ti]) continue;
    for (std::int32_t f : ix_.clusters[client][ti]) {
      const std::int64_t cost = ix_.facility_cost[f];
      if (cost == 0) {
        throw Error(ErrorKind::kInternal,
                    "augmentation reached a zero-cost facility: " + ix_.facility_ids[f]);
      }
      const double before = y_[f];
      y_[f] = (1.0 + 1.0 / static_cast<double>(cost)) * before +
              1.0 / (static_cast<double>(nf) * static_cast<double>(cost));
      const double inc = y_[f] - before;
      delta.augments.push_back({f, inc});
      delta.primal_delta += static_cast<double>(cost) * inc;
      ++augment_count_[f];
      ++total_augmentations_;
    }
  }

  refresh_saturated(r);
  ++r.updates;
  ++total_updates_;
  return delta;
}

std::int64_t FracEngine::serve_client(std::int32_t client,
                                      const std::function<void(const UpdateDelta&)>& on_update) {
  std::int64_t performed = 0;
  while (!serving_met(client)) {
    if (rows_[client].updates >= update_bound_) {
      throw Error(ErrorKind::kNonTermination,
                  "serve loop exceeded its update bound for client " + ix_.client_ids[client] +
                      " (client disconnected or solver bug)");
    }
    UpdateDelta delta = update_operation(client);
    ++performed;
    if (on_update) on_update(delta);
  }
  return performed;
}

std::int64_t FracEngine::good_distance(std::int32_t client) const {
  const auto& r = row(client);
  if (!serving_met(client)) {
    throw Error(ErrorKind::kInvalid, "good distance queried before the client is served");
  }
  std::int32_t top = -1;
  for (std::int32_t ti = ix_.distance_count() - 1; ti >= 0; --ti) {
    if (r.x_num[ti] > 0) {
      top = ti;
      break;
    }
  }
  if (top < 0) throw Error(ErrorKind::kInternal, "served client with no connection mass");

  // Exact test on x, tolerant test on the floating opening mass.
  const std::int64_t den = top == 0 ? 1 : ix_.distances[top];
  const bool x_half = 2 * r.x_num[top] >= den;
  const bool y_half = cluster_y(client, top) >= 0.5 - 1e-9;
  if (x_half && y_half) return ix_.distances[top];
  if (top == 0) {
    throw Error(ErrorKind::kInternal, "no good distance exists for a served client");
  }
  return ix_.distances[top - 1];
}

double FracEngine::primal_value() const {
  double total = 0.0;
  for (std::int32_t f = 0; f < ix_.facility_count(); ++f) {
    total += static_cast<double>(ix_.facility_cost[f]) * y_[f];
  }
  for (std::int32_t c : arrival_order_) {
    total += static_cast<double>(rows_[c].connection);
  }
  return total;
}

std::int64_t FracEngine::dual_value() const {
  std::int64_t total = 0;
  for (std::int32_t c : arrival_order_) total += rows_[c].gamma;
  return total;
}

std::int64_t FracEngine::connection_value(std::int32_t client) const { return row(client).connection; }

std::int64_t FracEngine::total_connection_value() const {
  std::int64_t total = 0;
  for (std::int32_t c : arrival_order_) total += rows_[c].connection;
  return total;
}

std::int64_t FracEngine::gamma(std::int32_t client) const { return row(client).gamma; }

std::int64_t FracEngine::alpha(std::int32_t client, std::int32_t ti) const {
  if (!cfg_.track_duals) throw Error(ErrorKind::kInvalid, "dual tracking is disabled");
  return row(client).alpha[ti];
}

std::int64_t FracEngine::beta(std::int32_t client, std::int32_t ti) const {
  if (!cfg_.track_duals) throw Error(ErrorKind::kInvalid, "dual tracking is disabled");
  return row(client).beta[ti];
}

std::int64_t FracEngine::update_count(std::int32_t client) const { return row(client).updates; }

}  // namespace ofl
