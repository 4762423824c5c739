#include "ofl/oracle.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <tuple>

#include "ofl/error.hpp"

namespace ofl {

namespace {

// Subset enumeration shared by the exact-rational and the integer fast path.
// Returns the winning mask and each active client's facility pick; cost ties
// prefer the lexicographically smallest open set of facility ids.
template <typename Cost>
std::pair<std::uint32_t, std::vector<int>> enumerate_subsets(
    const std::vector<Cost>& facility_cost, const std::vector<std::string>& facility_ids,
    const std::vector<std::vector<std::pair<Cost, int>>>& adjacency, Cost* best_cost_out) {
  const int nf = static_cast<int>(facility_cost.size());
  std::optional<Cost> best_cost;
  std::uint32_t best_mask = 0;
  std::vector<int> best_pick(adjacency.size(), -1);
  std::vector<int> pick(adjacency.size(), -1);

  const std::uint32_t masks = 1u << nf;
  for (std::uint32_t mask = 0; mask < masks; ++mask) {
    Cost cost{0};
    for (std::uint32_t bits = mask; bits != 0; bits &= bits - 1) {
      cost += facility_cost[static_cast<int>(__builtin_ctz(bits))];
    }
    if (best_cost && *best_cost < cost) continue;  // openings alone already lose
    bool feasible = true;
    for (std::size_t i = 0; i < adjacency.size() && feasible; ++i) {
      feasible = false;
      for (const auto& [ecost, f] : adjacency[i]) {
        if (mask & (1u << f)) {
          cost += ecost;
          pick[i] = f;
          feasible = true;
          break;
        }
      }
    }
    if (!feasible) continue;
    bool better = !best_cost || cost < *best_cost;
    if (!better && cost == *best_cost) {
      std::vector<std::string> a, b;
      for (int f = 0; f < nf; ++f) {
        if (mask & (1u << f)) a.push_back(facility_ids[f]);
        if (best_mask & (1u << f)) b.push_back(facility_ids[f]);
      }
      better = a < b;
    }
    if (better) {
      best_cost = cost;
      best_mask = mask;
      best_pick = pick;
    }
  }
  if (!best_cost) throw Error(ErrorKind::kInfeasible, "no feasible facility subset");
  *best_cost_out = *best_cost;
  return {best_mask, best_pick};
}

}  // namespace

OfflineSolution optimal_offline(const FacilityClientGraph& graph,
                                const std::vector<std::string>& active) {
  const int nf = static_cast<int>(graph.facilities.size());
  if (nf > kOracleMaxFacilities) {
    throw Error(ErrorKind::kSizeGuard,
                "offline search limited to " + std::to_string(kOracleMaxFacilities) +
                    " facilities, got " + std::to_string(nf));
  }

  std::map<std::string, int> fpos;
  std::vector<std::string> fids;
  bool all_integer = true;
  for (int f = 0; f < nf; ++f) {
    fpos[graph.facilities[f].id] = f;
    fids.push_back(graph.facilities[f].id);
    all_integer = all_integer && graph.facilities[f].cost.is_integer();
  }

  // Per active client: edges sorted by (cost, facility index).
  std::vector<std::vector<std::pair<Rational, int>>> adj(active.size());
  std::map<std::string, std::size_t> apos;
  for (std::size_t i = 0; i < active.size(); ++i) apos[active[i]] = i;
  for (const auto& e : graph.edges) {
    auto it = apos.find(e.client);
    if (it == apos.end()) continue;
    adj[it->second].push_back({e.cost, fpos.at(e.facility)});
    all_integer = all_integer && e.cost.is_integer();
  }
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (adj[i].empty()) {
      throw Error(ErrorKind::kInfeasible, "active client has no edges: " + active[i]);
    }
    std::sort(adj[i].begin(), adj[i].end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return a.second < b.second;
    });
  }

  std::uint32_t mask = 0;
  std::vector<int> pick;
  OfflineSolution solution;
  if (all_integer) {
    // Integer costs cover generated and normalized instances; plain int64
    // sums beat rational arithmetic by an order of magnitude here.
    std::vector<std::int64_t> fcost;
    for (const auto& f : graph.facilities) fcost.push_back(f.cost.num());
    std::vector<std::vector<std::pair<std::int64_t, int>>> iadj(adj.size());
    for (std::size_t i = 0; i < adj.size(); ++i) {
      for (const auto& [c, f] : adj[i]) iadj[i].push_back({c.num(), f});
    }
    std::int64_t best = 0;
    std::tie(mask, pick) = enumerate_subsets<std::int64_t>(fcost, fids, iadj, &best);
    solution.cost = Rational(best);
  } else {
    std::vector<Rational> fcost;
    for (const auto& f : graph.facilities) fcost.push_back(f.cost);
    Rational best;
    std::tie(mask, pick) = enumerate_subsets<Rational>(fcost, fids, adj, &best);
    solution.cost = best;
  }

  for (int f = 0; f < nf; ++f) {
    if (mask & (1u << f)) solution.open_facilities.push_back(fids[f]);
  }
  for (std::size_t i = 0; i < active.size(); ++i) {
    solution.connections.push_back({active[i], fids[pick[i]]});
  }
  std::sort(solution.connections.begin(), solution.connections.end());
  return solution;
}

bool check_feasible(const FacilityClientGraph& graph, const std::vector<std::string>& active,
                    const std::set<std::string>& facilities,
                    const std::set<std::pair<std::string, std::string>>& edges) {
  for (const auto& client : active) {
    bool served = false;
    for (const auto& e : graph.edges) {
      if (e.client != client) continue;
      if (edges.count({e.facility, e.client}) == 0) continue;
      if (facilities.count(e.facility) == 0) continue;
      served = true;
      break;
    }
    if (!served) return false;
  }
  return true;
}

WorstOrder worst_request_order(const FacilityClientGraph& normalized,
                               const std::vector<std::string>& active,
                               const DetConfig& config) {
  if (active.size() > kWorstOrderMaxActive) {
    throw Error(ErrorKind::kSizeGuard,
                "request-order search limited to " + std::to_string(kWorstOrderMaxActive) +
                    " active clients");
  }
  std::vector<std::string> order = active;
  std::sort(order.begin(), order.end());
  WorstOrder worst;
  do {
    DetResult result = run_det(normalized, order, config, nullptr);
    if (worst.order.empty() || result.total_cost > worst.det_cost) {
      worst.order = order;
      worst.det_cost = result.total_cost;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return worst;
}

}  // namespace ofl
