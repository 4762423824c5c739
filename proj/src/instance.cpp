#include "ofl/instance.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "ofl/error.hpp"
#include "ofl/numeric.hpp"

namespace ofl {

namespace {

using nlohmann::json;

Rational cost_from_json(const json& value, const std::string& where) {
  Rational cost;
  if (value.is_string()) {
    cost = Rational::parse(value.get<std::string>());
  } else if (value.is_number_integer()) {
    cost = Rational(value.get<std::int64_t>());
  } else if (value.is_number()) {
    cost = Rational::from_double(value.get<double>());
  } else {
    throw Error(ErrorKind::kParse, "cost must be a number or \"p/q\" string in " + where);
  }
  if (cost.negative()) throw Error(ErrorKind::kParse, "negative cost in " + where);
  return cost;
}

json cost_to_json(const Rational& cost) {
  if (cost.is_integer()) return cost.num();
  return cost.str();
}

// Smallest power of two >= v, as a rational >= 1.
Rational ceil_pow2(const Rational& v) {
  Rational p(1);
  while (p < v) p = p * Rational(2);
  return p;
}

bool is_pow2_rational(const Rational& v) {
  return v.is_integer() && is_power_of_two(v.num());
}

}  // namespace

void validate(const FacilityClientGraph& graph) {
  if (graph.facilities.size() < 2) {
    throw Error(ErrorKind::kInvalid, "instance needs at least two facilities");
  }
  if (graph.clients.size() < 2) {
    throw Error(ErrorKind::kInvalid, "instance needs at least two clients");
  }
  std::set<std::string> fids;
  for (const auto& f : graph.facilities) {
    if (f.cost.negative()) throw Error(ErrorKind::kInvalid, "negative facility cost: " + f.id);
    if (!fids.insert(f.id).second) {
      throw Error(ErrorKind::kInvalid, "duplicate facility id: " + f.id);
    }
  }
  std::set<std::string> cids;
  for (const auto& c : graph.clients) {
    if (!cids.insert(c).second) throw Error(ErrorKind::kInvalid, "duplicate client id: " + c);
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : graph.edges) {
    if (e.cost.negative()) {
      throw Error(ErrorKind::kInvalid, "negative edge cost: " + e.facility + "-" + e.client);
    }
    if (fids.find(e.facility) == fids.end()) {
      throw Error(ErrorKind::kInvalid, "edge references unknown facility: " + e.facility);
    }
    if (cids.find(e.client) == cids.end()) {
      throw Error(ErrorKind::kInvalid, "edge references unknown client: " + e.client);
    }
    if (!seen.insert({e.facility, e.client}).second) {
      throw Error(ErrorKind::kInvalid, "duplicate edge: " + e.facility + "-" + e.client);
    }
  }
}

PreprocessResult preprocess(const FacilityClientGraph& graph) {
  if (graph.normalized) throw Error(ErrorKind::kInvalid, "graph is already normalized");
  validate(graph);

  std::optional<Rational> min_positive;
  auto consider = [&](const Rational& c) {
    if (c.is_zero()) return;
    if (!min_positive || c < *min_positive) min_positive = c;
  };
  for (const auto& f : graph.facilities) consider(f.cost);
  for (const auto& e : graph.edges) consider(e.cost);

  PreprocessResult result;
  result.graph = graph;
  result.divisor = min_positive.value_or(Rational(1));
  if (min_positive) {
    auto scale = [&](Rational c) {
      if (c.is_zero()) return c;
      return ceil_pow2(c / *min_positive);
    };
    for (auto& f : result.graph.facilities) f.cost = scale(f.cost);
    for (auto& e : result.graph.edges) e.cost = scale(e.cost);
  }
  result.graph.normalized = true;
  return result;
}

DistanceScale distance_scale(const FacilityClientGraph& graph) {
  if (!graph.normalized) throw Error(ErrorKind::kInvalid, "distance scale needs a normalized graph");
  std::optional<std::int64_t> lo, hi;
  for (const auto& e : graph.edges) {
    if (e.cost.is_zero()) continue;
    if (!is_pow2_rational(e.cost)) {
      throw Error(ErrorKind::kInvalid, "normalized graph has a non power-of-two edge cost");
    }
    std::int64_t v = e.cost.num();
    if (!lo || v < *lo) lo = v;
    if (!hi || v > *hi) hi = v;
  }
  DistanceScale scale;
  scale.distances.push_back(0);
  if (lo) {
    for (std::int64_t v = *lo;; v *= 2) {
      scale.distances.push_back(v);
      if (v >= *hi) break;
    }
  }
  return scale;
}

Rational aspect_ratio(const FacilityClientGraph& graph) {
  std::optional<Rational> lo, hi;
  auto consider = [&](const Rational& c) {
    if (c.is_zero()) return;
    if (!lo || c < *lo) lo = c;
    if (!hi || *hi < c) hi = c;
  };
  for (const auto& f : graph.facilities) consider(f.cost);
  for (const auto& e : graph.edges) consider(e.cost);
  if (!lo) throw Error(ErrorKind::kInvalid, "aspect ratio undefined: all costs are zero");
  return *hi / *lo;
}

std::optional<std::int32_t> ClusterIndex::facility_pos(const std::string& id) const {
  auto it = facility_pos_.find(id);
  if (it == facility_pos_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::int32_t> ClusterIndex::client_pos(const std::string& id) const {
  auto it = client_pos_.find(id);
  if (it == client_pos_.end()) return std::nullopt;
  return it->second;
}

std::int32_t ClusterIndex::t_pos(std::int64_t t) const {
  auto it = std::lower_bound(distances.begin(), distances.end(), t);
  if (it == distances.end() || *it != t) {
    throw Error(ErrorKind::kInternal, "distance not on the scale: " + std::to_string(t));
  }
  return static_cast<std::int32_t>(it - distances.begin());
}

ClusterIndex clusters(const FacilityClientGraph& graph, const DistanceScale& scale) {
  if (!graph.normalized) throw Error(ErrorKind::kInvalid, "clusters need a normalized graph");
  ClusterIndex ix;
  ix.distances = scale.distances;
  ix.facility_ids.reserve(graph.facilities.size());
  for (const auto& f : graph.facilities) {
    if (!f.cost.is_zero() && !is_pow2_rational(f.cost)) {
      throw Error(ErrorKind::kInvalid, "normalized graph has a non power-of-two facility cost");
    }
    ix.facility_pos_[f.id] = static_cast<std::int32_t>(ix.facility_ids.size());
    ix.facility_ids.push_back(f.id);
    ix.facility_cost.push_back(f.cost.num());
    ix.max_facility_cost = std::max(ix.max_facility_cost, f.cost.num());
  }
  for (const auto& c : graph.clients) {
    ix.client_pos_[c] = static_cast<std::int32_t>(ix.client_ids.size());
    ix.client_ids.push_back(c);
  }
  const auto nc = ix.client_count();
  const auto nt = ix.distance_count();
  ix.clusters.assign(nc, std::vector<std::vector<std::int32_t>>(nt));
  ix.adjacency.assign(nc, {});
  for (const auto& e : graph.edges) {
    auto f = ix.facility_pos(e.facility);
    auto c = ix.client_pos(e.client);
    if (!f || !c) throw Error(ErrorKind::kInvalid, "edge references unknown endpoint");
    std::int64_t cost = e.cost.num();
    ix.max_edge_cost = std::max(ix.max_edge_cost, cost);
    ix.clusters[*c][ix.t_pos(cost)].push_back(*f);
    ix.adjacency[*c].push_back({cost, *f});
  }
  for (auto& per_client : ix.clusters) {
    for (auto& cluster : per_client) std::sort(cluster.begin(), cluster.end());
  }
  for (auto& adj : ix.adjacency) std::sort(adj.begin(), adj.end());
  return ix;
}

namespace {

InstanceFile instance_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::kParse, "instance must be a JSON object");
  InstanceFile out;
  for (const auto& f : doc.value("facilities", json::array())) {
    Facility fac;
    fac.id = f.at("id").get<std::string>();
    fac.cost = cost_from_json(f.at("cost"), "facility " + fac.id);
    out.graph.facilities.push_back(std::move(fac));
  }
  for (const auto& c : doc.value("clients", json::array())) {
    out.graph.clients.push_back(c.get<std::string>());
  }
  for (const auto& e : doc.value("edges", json::array())) {
    GraphEdge edge;
    edge.facility = e.at("facility").get<std::string>();
    edge.client = e.at("client").get<std::string>();
    edge.cost = cost_from_json(e.at("cost"), "edge " + edge.facility + "-" + edge.client);
    out.graph.edges.push_back(std::move(edge));
  }
  std::sort(out.graph.facilities.begin(), out.graph.facilities.end(),
            [](const Facility& a, const Facility& b) { return a.id < b.id; });
  std::sort(out.graph.clients.begin(), out.graph.clients.end());
  std::sort(out.graph.edges.begin(), out.graph.edges.end(),
            [](const GraphEdge& a, const GraphEdge& b) {
              return std::tie(a.facility, a.client) < std::tie(b.facility, b.client);
            });
  validate(out.graph);

  std::set<std::string> known(out.graph.clients.begin(), out.graph.clients.end());
  std::set<std::string> seen;
  for (const auto& r : doc.value("requests", json::array())) {
    auto id = r.get<std::string>();
    if (known.find(id) == known.end()) {
      throw Error(ErrorKind::kParse, "request references unknown client: " + id);
    }
    if (!seen.insert(id).second) {
      throw Error(ErrorKind::kParse, "duplicate request: " + id);
    }
    out.requests.push_back(std::move(id));
  }
  return out;
}

}  // namespace

InstanceFile parse_instance(const std::string& json_text) {
  try {
    return instance_from_json(json::parse(json_text));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, std::string("invalid instance JSON: ") + e.what());
  }
}

InstanceFile load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kParse, "cannot open instance file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_instance(buffer.str());
}

std::string instance_to_json(const InstanceFile& instance) {
  json doc;
  doc["facilities"] = json::array();
  for (const auto& f : instance.graph.facilities) {
    doc["facilities"].push_back({{"id", f.id}, {"cost", cost_to_json(f.cost)}});
  }
  doc["clients"] = instance.graph.clients;
  doc["edges"] = json::array();
  for (const auto& e : instance.graph.edges) {
    doc["edges"].push_back(
        {{"facility", e.facility}, {"client", e.client}, {"cost", cost_to_json(e.cost)}});
  }
  doc["requests"] = instance.requests;
  return doc.dump(2) + "\n";
}

void save_instance(const InstanceFile& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kParse, "cannot write instance file: " + path);
  out << instance_to_json(instance);
}

std::string instance_digest(const InstanceFile& instance) {
  const std::string text = instance_to_json(instance);
  std::uint64_t hash = 1469598103934665603ull;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return std::string(buf);
}

}  // namespace ofl
