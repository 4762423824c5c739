#pragma once

#include <cstdint>
#include <string>

#include "ofl/instance.hpp"

namespace ofl {

// Seeded instance families:
//   uniform-random   random edges, uniform costs
//   layered-distance edge costs spread over many powers of two
//   star             one cheap far facility against expensive near ones
//   set-cover-like   unit edges, varying facility costs
struct GeneratorSpec {
  std::string family = "uniform-random";
  int facilities = 4;
  int clients = 4;
  int active = 2;
  std::int64_t cost_min = 1;
  std::int64_t cost_max = 64;
  std::uint64_t seed = 0;
};

// Deterministic for a fixed spec; every client ends up with at least one edge.
InstanceFile generate(const GeneratorSpec& spec);

}  // namespace ofl
