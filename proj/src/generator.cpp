#include "ofl/generator.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <tuple>

#include "ofl/error.hpp"
#include "ofl/numeric.hpp"

namespace ofl {

namespace {

// Raw engine draws keep instances identical across standard libraries;
// std::uniform_int_distribution is implementation-defined.
std::int64_t draw(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

std::string padded_id(char prefix, int value, int width) {
  std::string digits = std::to_string(value);
  return prefix + std::string(width > static_cast<int>(digits.size())
                                  ? width - static_cast<int>(digits.size())
                                  : 0,
                              '0') +
         digits;
}

std::vector<std::string> sample_requests(std::mt19937_64& rng,
                                         const std::vector<std::string>& clients, int count) {
  std::vector<std::string> pool = clients;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    std::size_t pick = i + static_cast<std::size_t>(rng() % (pool.size() - i));
    std::swap(pool[i], pool[pick]);
  }
  pool.resize(count);
  return pool;
}

void ensure_every_client_connected(std::mt19937_64& rng, InstanceFile& out,
                                   std::int64_t edge_cost_lo, std::int64_t edge_cost_hi) {
  std::set<std::string> covered;
  for (const auto& e : out.graph.edges) covered.insert(e.client);
  for (const auto& c : out.graph.clients) {
    if (covered.count(c)) continue;
    const auto f = static_cast<std::size_t>(rng() % out.graph.facilities.size());
    out.graph.edges.push_back(
        {out.graph.facilities[f].id, c, Rational(draw(rng, edge_cost_lo, edge_cost_hi))});
  }
}

}  // namespace

InstanceFile generate(const GeneratorSpec& spec) {
  if (spec.facilities < 2 || spec.clients < 2) {
    throw Error(ErrorKind::kInvalid, "generator needs at least two facilities and two clients");
  }
  if (spec.active < 0 || spec.active > spec.clients) {
    throw Error(ErrorKind::kInvalid, "active count out of range");
  }
  if (spec.cost_min < 0 || spec.cost_min > spec.cost_max) {
    throw Error(ErrorKind::kInvalid, "bad cost range");
  }

  // Fold the whole spec into the seed so distinct specs with the same seed
  // still produce unrelated instances.
  std::uint64_t mix = spec.seed * 1099511628211ull + 1469598103934665603ull;
  for (unsigned char ch : spec.family) mix = (mix ^ ch) * 1099511628211ull;
  mix ^= static_cast<std::uint64_t>(spec.facilities) << 40;
  mix ^= static_cast<std::uint64_t>(spec.clients) << 20;
  mix ^= static_cast<std::uint64_t>(spec.active);
  mix ^= static_cast<std::uint64_t>(spec.cost_min) << 32;
  mix ^= static_cast<std::uint64_t>(spec.cost_max) << 8;
  std::mt19937_64 rng(mix);

  const int fwidth = static_cast<int>(std::to_string(spec.facilities - 1).size());
  const int cwidth = static_cast<int>(std::to_string(spec.clients - 1).size());
  InstanceFile out;
  for (int c = 0; c < spec.clients; ++c) {
    out.graph.clients.push_back(padded_id('c', c, cwidth));
  }

  if (spec.family == "uniform-random") {
    for (int f = 0; f < spec.facilities; ++f) {
      out.graph.facilities.push_back(
          {padded_id('f', f, fwidth), Rational(draw(rng, spec.cost_min, spec.cost_max))});
    }
    for (int f = 0; f < spec.facilities; ++f) {
      for (int c = 0; c < spec.clients; ++c) {
        if (rng() % 2 == 0) continue;
        out.graph.edges.push_back({out.graph.facilities[f].id, out.graph.clients[c],
                                   Rational(draw(rng, spec.cost_min, spec.cost_max))});
      }
    }
    ensure_every_client_connected(rng, out, spec.cost_min, spec.cost_max);
  } else if (spec.family == "layered-distance") {
    // Costs on wide power-of-two layers stress the distance scale.
    const int max_exp = std::max(1, ceil_log2(std::max<std::int64_t>(2, spec.cost_max)));
    for (int f = 0; f < spec.facilities; ++f) {
      out.graph.facilities.push_back(
          {padded_id('f', f, fwidth),
           Rational(std::int64_t{1} << draw(rng, 0, std::max(1, max_exp / 2)))});
    }
    for (int f = 0; f < spec.facilities; ++f) {
      for (int c = 0; c < spec.clients; ++c) {
        if (rng() % 2 == 0) continue;
        out.graph.edges.push_back({out.graph.facilities[f].id, out.graph.clients[c],
                                   Rational(std::int64_t{1} << draw(rng, 0, max_exp))});
      }
    }
    ensure_every_client_connected(rng, out, 1, spec.cost_max);
  } else if (spec.family == "star") {
    // One cheap facility far from everyone; per-client expensive near options.
    out.graph.facilities.push_back({padded_id('f', 0, fwidth), Rational(spec.cost_min)});
    for (int f = 1; f < spec.facilities; ++f) {
      out.graph.facilities.push_back({padded_id('f', f, fwidth), Rational(spec.cost_max)});
    }
    for (int c = 0; c < spec.clients; ++c) {
      out.graph.edges.push_back(
          {out.graph.facilities[0].id, out.graph.clients[c], Rational(spec.cost_max)});
      if (spec.facilities > 1) {
        const int near = 1 + c % (spec.facilities - 1);
        out.graph.edges.push_back({out.graph.facilities[near].id, out.graph.clients[c],
                                   Rational(std::max<std::int64_t>(spec.cost_min, 1))});
      }
    }
  } else if (spec.family == "set-cover-like") {
    // Unit edges, varying opening costs: pressure lands on the rounding side.
    for (int f = 0; f < spec.facilities; ++f) {
      out.graph.facilities.push_back(
          {padded_id('f', f, fwidth), Rational(draw(rng, spec.cost_min, spec.cost_max))});
    }
    for (int f = 0; f < spec.facilities; ++f) {
      for (int c = 0; c < spec.clients; ++c) {
        if (rng() % 2 == 0) continue;
        out.graph.edges.push_back(
            {out.graph.facilities[f].id, out.graph.clients[c], Rational(1)});
      }
    }
    ensure_every_client_connected(rng, out, 1, 1);
  } else {
    throw Error(ErrorKind::kInvalid, "unknown generator family: " + spec.family);
  }

  std::sort(out.graph.edges.begin(), out.graph.edges.end(),
            [](const GraphEdge& a, const GraphEdge& b) {
              return std::tie(a.facility, a.client) < std::tie(b.facility, b.client);
            });
  validate(out.graph);
  out.requests = sample_requests(rng, out.graph.clients, spec.active);
  return out;
}

}  // namespace ofl
