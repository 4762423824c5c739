#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ofl/doubling.hpp"
#include "ofl/instance.hpp"
#include "ofl/rational.hpp"

namespace ofl {

struct OfflineSolution {
  std::vector<std::string> open_facilities;                       // sorted
  std::vector<std::pair<std::string, std::string>> connections;  // (client, facility)
  Rational cost;
};

inline constexpr int kOracleMaxFacilities = 24;

// Exhaustive optimum: enumerate facility subsets, connect each active client
// to its cheapest open facility. Cost ties prefer the lexicographically
// smallest open set. Works on raw and normalized graphs alike.
OfflineSolution optimal_offline(const FacilityClientGraph& graph,
                                const std::vector<std::string>& active);

bool check_feasible(const FacilityClientGraph& graph, const std::vector<std::string>& active,
                    const std::set<std::string>& facilities,
                    const std::set<std::pair<std::string, std::string>>& edges);

struct WorstOrder {
  std::vector<std::string> order;
  std::int64_t det_cost = 0;
};

inline constexpr int kWorstOrderMaxActive = 8;

// Request order maximizing the doubling pipeline's cost on a normalized graph.
WorstOrder worst_request_order(const FacilityClientGraph& normalized,
                               const std::vector<std::string>& active,
                               const DetConfig& config = {});

}  // namespace ofl
