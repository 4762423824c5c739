#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ofl/audit.hpp"
#include "ofl/instance.hpp"

namespace ofl {

struct DetConfig {
  // Budget multiplier. Any positive value keeps the wrapper feasible; it only
  // scales the ratio constant and how early phases settle.
  double q = 64.0;
  bool track_duals = true;
};

// log2(nf) * (log2(nc) + log2(log2(nf*nc))); needs nf, nc >= 2.
double compute_R(std::int64_t nf, std::int64_t nc);

struct PrePurchase {
  std::vector<std::string> facilities;
  std::vector<std::pair<std::string, std::string>> edges;
  std::int64_t cost = 0;
};

// All facilities and edges cheaper than 2^phase / (|F| * |C|); their total
// cost is below 2 * 2^phase.
PrePurchase pre_purchase(const FacilityClientGraph& graph, int phase);

struct PhaseGraph {
  FacilityClientGraph graph;       // pruned, pre-purchases zeroed, rescaled
  std::int64_t scale_divisor = 1;  // positive costs were divided by this power of two
};

// Keeps items of individual cost <= 2^phase (and edges whose facility
// survived), zeroes pre-purchased items, then divides all costs by the
// smallest positive one so the result is normalized again.
PhaseGraph build_phase_graph(const FacilityClientGraph& graph, int phase,
                             const PrePurchase& pre);

struct PhaseRecord {
  int phase = 0;
  std::int64_t pre_purchase_cost = 0;
  std::int64_t committed_cost = 0;  // inner purchases replayed at original prices
  std::int64_t inner_cost = 0;      // inner pipeline spend on the scaled graph
  double budget = 0.0;              // scaled budget the inner pipeline must respect
  int clients_committed = 0;
  bool exhausted = false;  // advanced to the next phase on a budget breach
};

struct DetResult {
  std::int64_t total_cost = 0;
  int phases = 0;
  double R = 0.0;
  std::vector<PhaseRecord> phase_log;
  std::set<std::string> purchased_facilities;
  std::set<std::pair<std::string, std::string>> purchased_edges;
  std::int64_t total_updates = 0;
  std::int64_t total_augmentations = 0;
  std::int64_t phi_evaluations = 0;
};

// Doubling wrapper: phase j pre-purchases cheap items, prunes and rescales
// the graph, and replays the full request prefix through a fresh fractional +
// rounding pipeline under budget scale * (q*R + 2) * 2^j. A budget breach (or
// a client with no edges left in the phase graph) discards that client's
// purchases and advances the phase. Repeated purchases across phases are paid
// each time; the ledger records each item once.
DetResult run_det(const FacilityClientGraph& graph, const std::vector<std::string>& requests,
                  const DetConfig& config = {}, AuditContext* audit = nullptr);

}  // namespace ofl
