#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ofl/rational.hpp"

namespace ofl {

struct Facility {
  std::string id;
  Rational cost;
};

struct GraphEdge {
  std::string facility;
  std::string client;
  Rational cost;
};

// Bipartite facility-client instance. Facilities, clients and edges are kept
// sorted by id so that every downstream iteration order is reproducible.
// `normalized` is set once all positive costs are powers of two and >= 1.
struct FacilityClientGraph {
  std::vector<Facility> facilities;
  std::vector<std::string> clients;
  std::vector<GraphEdge> edges;
  bool normalized = false;
};

// Instance file payload: the graph plus the online order of active clients.
struct InstanceFile {
  FacilityClientGraph graph;
  std::vector<std::string> requests;
};

// Structural validation: sorted unique ids, known edge endpoints, at most one
// edge per (facility, client) pair, non-negative costs, and at least two
// facilities and two clients.
void validate(const FacilityClientGraph& graph);

struct PreprocessResult {
  FacilityClientGraph graph;
  Rational divisor;  // the minimum positive cost every positive cost was divided by
};

// Divides every positive cost (facilities and edges jointly) by the minimum
// positive cost and rounds the result up to the nearest power of two. Zero
// costs stay zero. Any solution cost changes by at most a factor of two
// relative to the divided instance.
PreprocessResult preprocess(const FacilityClientGraph& graph);

// 0 followed by all consecutive powers of two spanning the positive edge
// costs; just {0} when every edge cost is zero.
struct DistanceScale {
  std::vector<std::int64_t> distances;
};

DistanceScale distance_scale(const FacilityClientGraph& graph);

// Largest over smallest positive cost, facilities and edges jointly.
Rational aspect_ratio(const FacilityClientGraph& graph);

// Compiled per-client cluster structure over a normalized graph: for each
// client and each scale distance t, the facilities joined to the client by an
// edge of cost exactly t. Prefix sets (all facilities within distance t) are
// implicit as unions of clusters up to t.
struct ClusterIndex {
  std::vector<std::string> facility_ids;
  std::vector<std::int64_t> facility_cost;
  std::vector<std::string> client_ids;
  std::vector<std::int64_t> distances;
  // clusters[c][ti]: facilities at edge cost exactly distances[ti], ascending.
  std::vector<std::vector<std::vector<std::int32_t>>> clusters;
  // adjacency[c]: (edge cost, facility) sorted ascending, for nearest-open scans.
  std::vector<std::vector<std::pair<std::int64_t, std::int32_t>>> adjacency;
  std::int64_t max_edge_cost = 0;
  std::int64_t max_facility_cost = 0;

  std::int32_t facility_count() const { return static_cast<std::int32_t>(facility_ids.size()); }
  std::int32_t client_count() const { return static_cast<std::int32_t>(client_ids.size()); }
  std::int32_t distance_count() const { return static_cast<std::int32_t>(distances.size()); }
  std::int64_t element_count() const {
    return static_cast<std::int64_t>(client_ids.size()) * distance_count();
  }
  std::optional<std::int32_t> facility_pos(const std::string& id) const;
  std::optional<std::int32_t> client_pos(const std::string& id) const;
  std::int32_t t_pos(std::int64_t t) const;  // index of t in distances, throws if absent

 private:
  friend ClusterIndex clusters(const FacilityClientGraph&, const DistanceScale&);
  std::map<std::string, std::int32_t> facility_pos_;
  std::map<std::string, std::int32_t> client_pos_;
};

ClusterIndex clusters(const FacilityClientGraph& graph, const DistanceScale& scale);

// JSON instance format. Costs may be JSON numbers or "p/q" strings.
InstanceFile parse_instance(const std::string& json_text);
InstanceFile load_instance(const std::string& path);
std::string instance_to_json(const InstanceFile& instance);
void save_instance(const InstanceFile& instance, const std::string& path);

// FNV-1a over the canonical JSON form; stable identifier for reports.
std::string instance_digest(const InstanceFile& instance);

}  // namespace ofl
