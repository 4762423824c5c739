#include "ofl/doubling.hpp"

#include <cmath>
#include <memory>

#include "ofl/error.hpp"
#include "ofl/log.hpp"
#include "ofl/numeric.hpp"
#include "ofl/session.hpp"

namespace ofl {

namespace {

using I128 = __int128;

I128 pow2(int exponent) {
  if (exponent < 0 || exponent > 120) {
    throw Error(ErrorKind::kInternal, "phase exponent out of range");
  }
  return static_cast<I128>(1) << exponent;
}

std::int64_t as_int_cost(const Rational& cost) {
  if (!cost.is_integer()) {
    throw Error(ErrorKind::kInvalid, "normalized graph has a fractional cost");
  }
  return cost.num();
}

}  // namespace

double compute_R(std::int64_t nf, std::int64_t nc) {
  if (nf < 2 || nc < 2) {
    throw Error(ErrorKind::kInvalid, "R needs at least two facilities and two clients");
  }
  const double f = static_cast<double>(nf);
  const double c = static_cast<double>(nc);
  return std::log2(f) * (std::log2(c) + std::log2(std::log2(f * c)));
}

PrePurchase pre_purchase(const FacilityClientGraph& graph, int phase) {
  if (!graph.normalized) throw Error(ErrorKind::kInvalid, "pre-purchase needs a normalized graph");
  const I128 nf = static_cast<I128>(graph.facilities.size());
  const I128 nc = static_cast<I128>(graph.clients.size());
  const I128 threshold = pow2(phase);  // item qualifies iff cost * |F| * |C| < 2^phase
  PrePurchase pre;
  for (const auto& f : graph.facilities) {
    if (static_cast<I128>(as_int_cost(f.cost)) * nf * nc < threshold) {
      pre.facilities.push_back(f.id);
      pre.cost += as_int_cost(f.cost);
    }
  }
  for (const auto& e : graph.edges) {
    if (static_cast<I128>(as_int_cost(e.cost)) * nf * nc < threshold) {
      pre.edges.push_back({e.facility, e.client});
      pre.cost += as_int_cost(e.cost);
    }
  }
  return pre;
}

PhaseGraph build_phase_graph(const FacilityClientGraph& graph, int phase,
                             const PrePurchase& pre) {
  if (!graph.normalized) throw Error(ErrorKind::kInvalid, "phase graph needs a normalized graph");
  const I128 cap = pow2(phase);
  std::set<std::string> pre_fac(pre.facilities.begin(), pre.facilities.end());
  std::set<std::pair<std::string, std::string>> pre_edge(pre.edges.begin(), pre.edges.end());

  PhaseGraph out;
  out.graph.normalized = true;
  out.graph.clients = graph.clients;
  std::set<std::string> kept;
  for (const auto& f : graph.facilities) {
    if (static_cast<I128>(as_int_cost(f.cost)) > cap) continue;
    Facility copy = f;
    if (pre_fac.count(f.id)) copy.cost = Rational(0);
    kept.insert(f.id);
    out.graph.facilities.push_back(std::move(copy));
  }
  for (const auto& e : graph.edges) {
    if (static_cast<I128>(as_int_cost(e.cost)) > cap) continue;
    if (kept.count(e.facility) == 0) continue;
    GraphEdge copy = e;
    if (pre_edge.count({e.facility, e.client})) copy.cost = Rational(0);
    out.graph.edges.push_back(std::move(copy));
  }

  std::int64_t min_positive = 0;
  auto consider = [&](const Rational& c) {
    if (c.is_zero()) return;
    if (min_positive == 0 || c.num() < min_positive) min_positive = c.num();
  };
  for (const auto& f : out.graph.facilities) consider(f.cost);
  for (const auto& e : out.graph.edges) consider(e.cost);
  out.scale_divisor = min_positive == 0 ? 1 : min_positive;
  if (out.scale_divisor > 1) {
    for (auto& f : out.graph.facilities) {
      f.cost = Rational(f.cost.num() / out.scale_divisor);
    }
    for (auto& e : out.graph.edges) {
      e.cost = Rational(e.cost.num() / out.scale_divisor);
    }
  }
  return out;
}

namespace {

// One phase of the wrapper: the rescaled graph, a fresh pipeline over it, and
// the spend committed so far.
struct PhaseRuntime {
  PhaseGraph pg;
  ClusterIndex ix;
  std::unique_ptr<Session> session;
  double budget = 0.0;
  PhaseRecord record;
};

}  // namespace

DetResult run_det(const FacilityClientGraph& graph, const std::vector<std::string>& requests,
                  const DetConfig& config, AuditContext* audit) {
  if (!graph.normalized) throw Error(ErrorKind::kInvalid, "run_det needs a normalized graph");
  if (config.q <= 0.0) throw Error(ErrorKind::kInvalid, "budget multiplier must be positive");

  std::set<std::string> connected;
  for (const auto& e : graph.edges) connected.insert(e.client);
  for (const auto& client : requests) {
    if (connected.count(client) == 0) {
      throw Error(ErrorKind::kInfeasible, "requested client has no edges: " + client);
    }
  }

  DetResult result;
  result.R = compute_R(static_cast<std::int64_t>(graph.facilities.size()),
                       static_cast<std::int64_t>(graph.clients.size()));
  const double budget_factor = config.q * result.R + 2.0;

  double cost_sum = 0.0;
  for (const auto& f : graph.facilities) cost_sum += f.cost.to_double();
  for (const auto& e : graph.edges) cost_sum += e.cost.to_double();
  const int max_phase = static_cast<int>(std::floor(std::log2(std::max(1.0, cost_sum)))) + 2;

  AuditChannel phase_budget;
  AuditChannel phase_spend;
  AuditChannel feasible;
  if (audit != nullptr) {
    phase_budget = audit->channel("det.phase_budget");
    phase_spend = audit->channel("det.phase_spend_bound");
    feasible = audit->channel("det.feasible");
  }

  int j = -1;
  PhaseRuntime phase;
  std::vector<std::string> arrived;

  auto absorb_session_counters = [&] {
    if (!phase.session) return;
    result.total_updates += phase.session->frac().total_updates();
    result.total_augmentations += phase.session->frac().total_augmentations();
    if (phase.session->round() != nullptr) {
      result.phi_evaluations += phase.session->round()->phi_evaluations();
    }
  };

  auto close_phase = [&] {
    if (!phase.session) return;
    phase.session->finish();
    absorb_session_counters();
    phase_spend.check(leq_with_rel_tol(
                          static_cast<double>(phase.record.pre_purchase_cost +
                                              phase.record.committed_cost),
                          (config.q * result.R + 4.0) * std::ldexp(1.0, phase.record.phase), 1e-9),
                      [&] {
                        return "phase " + std::to_string(phase.record.phase) + " spent " +
                               std::to_string(phase.record.pre_purchase_cost +
                                              phase.record.committed_cost);
                      });
    result.phase_log.push_back(phase.record);
  };

  auto advance_phase = [&] {
    close_phase();
    ++j;
    if (j > max_phase) {
      throw Error(ErrorKind::kInternal,
                  "phase index exceeded log2 of the total cost; wrapper cannot settle");
    }
    PrePurchase pre = pre_purchase(graph, j);
    for (const auto& id : pre.facilities) result.purchased_facilities.insert(id);
    for (const auto& key : pre.edges) result.purchased_edges.insert(key);
    result.total_cost += pre.cost;

    phase.pg = build_phase_graph(graph, j, pre);
    phase.ix = clusters(phase.pg.graph, distance_scale(phase.pg.graph));
    phase.session = std::make_unique<Session>(phase.ix, PipelineMode::kIntegral, audit,
                                              FracConfig{config.track_duals});
    phase.budget =
        budget_factor * std::ldexp(1.0, j) / static_cast<double>(phase.pg.scale_divisor);
    phase.record = PhaseRecord{};
    phase.record.phase = j;
    phase.record.pre_purchase_cost = pre.cost;
    phase.record.budget = phase.budget;
    log_line(LogLevel::kInfo, "phase " + std::to_string(j) + ": pre-purchased " +
                                  std::to_string(pre.cost) + ", budget " +
                                  format_double(phase.budget));
  };

  // Serve one client inside the current phase; false advances the phase.
  auto serve_in_phase = [&](const std::string& client) -> bool {
    const auto cpos = phase.ix.client_pos(client);
    if (!cpos || phase.ix.adjacency[*cpos].empty()) {
      log_line(LogLevel::kTrace, client + " disconnected in phase " + std::to_string(j));
      phase.record.exhausted = true;
      return false;
    }
    ClientOutcome outcome = phase.session->serve(*cpos);
    const std::int64_t spend = phase.session->int_total_cost();
    if (!leq_with_rel_tol(static_cast<double>(spend), phase.budget, 1e-12)) {
      log_line(LogLevel::kTrace, client + " breached the budget of phase " + std::to_string(j));
      phase.record.exhausted = true;
      return false;
    }
    phase_budget.check(true);
    phase.record.inner_cost = spend;

    std::int64_t charge = 0;
    for (std::int32_t f : outcome.opened_now) {
      result.purchased_facilities.insert(phase.ix.facility_ids[f]);
      charge += phase.ix.facility_cost[f] * phase.pg.scale_divisor;
    }
    if (outcome.connection) {
      const auto& conn = *outcome.connection;
      result.purchased_edges.insert({phase.ix.facility_ids[conn.facility], client});
      charge += conn.cost * phase.pg.scale_divisor;
    }
    phase.record.committed_cost += charge;
    result.total_cost += charge;
    ++phase.record.clients_committed;
    return true;
  };

  auto replay_committed = [&]() -> bool {
    for (std::size_t i = 0; i + 1 < arrived.size(); ++i) {
      if (!serve_in_phase(arrived[i])) return false;
    }
    return true;
  };

  advance_phase();
  for (const auto& client : requests) {
    arrived.push_back(client);
    while (!serve_in_phase(client)) {
      do {
        advance_phase();
      } while (!replay_committed());
    }
  }
  close_phase();
  phase.session.reset();
  result.phases = j + 1;

  if (feasible.active()) {
    bool ok = true;
    std::string witness;
    for (const auto& client : arrived) {
      bool served = false;
      for (const auto& e : graph.edges) {
        if (e.client != client) continue;
        if (result.purchased_edges.count({e.facility, e.client}) == 0) continue;
        if (result.purchased_facilities.count(e.facility) == 0) continue;
        served = true;
        break;
      }
      if (!served) {
        ok = false;
        witness = client;
        break;
      }
    }
    feasible.check(ok, [&] { return "client left unserved: " + witness; });
  }
  return result;
}

}  // namespace ofl
