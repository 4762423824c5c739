#include "ofl/oracle.hpp"

#include <random>

#include "doctest.h"
#include "ofl/error.hpp"
#include "ofl/generator.hpp"

using namespace ofl;

namespace {

FacilityClientGraph walkthrough() {
  FacilityClientGraph g;
  g.facilities = {{"f1", Rational(2)}, {"f2", Rational(2)}};
  g.clients = {"c", "zz"};
  g.edges = {{"f1", "c", Rational(1)}, {"f2", "c", Rational(2)}};
  g.normalized = true;
  return g;
}

}  // namespace

TEST_CASE("walkthrough optimum opens the near facility") {
  // Subsets by hand: {f1} costs 3, {f2} costs 4, {f1,f2} costs 5.
  OfflineSolution opt = optimal_offline(walkthrough(), {"c"});
  CHECK(opt.cost == Rational(3));
  CHECK(opt.open_facilities == std::vector<std::string>{"f1"});
  REQUIRE(opt.connections.size() == 1);
  CHECK(opt.connections[0] == std::pair<std::string, std::string>{"c", "f1"});
}

TEST_CASE("no active clients costs nothing") {
  OfflineSolution opt = optimal_offline(walkthrough(), {});
  CHECK(opt.cost == Rational(0));
  CHECK(opt.open_facilities.empty());
}

TEST_CASE("free facility at distance zero costs nothing") {
  FacilityClientGraph g;
  g.facilities = {{"f1", Rational(0)}, {"f2", Rational(8)}};
  g.clients = {"c1", "c2"};
  g.edges = {{"f1", "c1", Rational(0)}};
  OfflineSolution opt = optimal_offline(g, {"c1"});
  CHECK(opt.cost == Rational(0));
  CHECK(opt.open_facilities == std::vector<std::string>{"f1"});
}

TEST_CASE("rational costs are handled exactly") {
  FacilityClientGraph g;
  g.facilities = {{"f1", Rational(1, 3)}, {"f2", Rational(1, 2)}};
  g.clients = {"c1", "c2"};
  g.edges = {{"f1", "c1", Rational(1, 6)}, {"f2", "c1", Rational(0)}};
  OfflineSolution opt = optimal_offline(g, {"c1"});
  CHECK(opt.cost == Rational(1, 2));  // f1 route costs 1/3 + 1/6 = 1/2 as well; tie
  // Cost tie between {f1} and {f2}: the lexicographically smaller set wins.
  CHECK(opt.open_facilities == std::vector<std::string>{"f1"});
}

TEST_CASE("errors") {
  SUBCASE("client without edges") {
    CHECK_THROWS_AS(optimal_offline(walkthrough(), {"zz"}), Error);
  }
  SUBCASE("size guard") {
    FacilityClientGraph g;
    for (int f = 0; f < kOracleMaxFacilities + 1; ++f) {
      g.facilities.push_back({"f" + std::to_string(f), Rational(1)});
    }
    g.clients = {"c1", "c2"};
    CHECK_THROWS_AS(optimal_offline(g, {}), Error);
  }
}

TEST_CASE("optimum is a lower bound and grows with the active set") {
  std::mt19937_64 seeds(7);
  for (int trial = 0; trial < 20; ++trial) {
    GeneratorSpec spec;
    spec.family = trial % 2 == 0 ? "uniform-random" : "set-cover-like";
    spec.facilities = 4 + static_cast<int>(seeds() % 4);
    spec.clients = 4 + static_cast<int>(seeds() % 4);
    spec.active = 3;
    spec.seed = seeds();
    InstanceFile instance = generate(spec);

    std::vector<std::string> two(instance.requests.begin(), instance.requests.begin() + 2);
    OfflineSolution small = optimal_offline(instance.graph, two);
    OfflineSolution full = optimal_offline(instance.graph, instance.requests);
    CHECK(small.cost <= full.cost);

    // Any feasible single-facility-set solution bounds the optimum from above.
    for (const auto& f : instance.graph.facilities) {
      Rational cost = f.cost;
      bool feasible = true;
      for (const auto& client : instance.requests) {
        std::optional<Rational> best;
        for (const auto& e : instance.graph.edges) {
          if (e.facility == f.id && e.client == client) {
            if (!best || e.cost < *best) best = e.cost;
          }
        }
        if (!best) {
          feasible = false;
          break;
        }
        cost += *best;
      }
      if (feasible) CHECK(full.cost <= cost);
    }
  }
}

TEST_CASE("normalization changes the optimum by at most a factor of two") {
  // Every positive cost is divided by the smallest one and rounded up to a
  // power of two, so divisor * OPT(normalized) sits in [OPT(raw), 2*OPT(raw)].
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    GeneratorSpec spec;
    spec.family = seed % 2 == 0 ? "layered-distance" : "uniform-random";
    spec.facilities = 5;
    spec.clients = 6;
    spec.active = 4;
    spec.cost_min = 2;
    spec.cost_max = 48;
    spec.seed = seed;
    InstanceFile instance = generate(spec);
    PreprocessResult pre = preprocess(instance.graph);

    OfflineSolution raw = optimal_offline(instance.graph, instance.requests);
    OfflineSolution norm = optimal_offline(pre.graph, instance.requests);
    const Rational scaled_back = pre.divisor * norm.cost;
    CAPTURE(seed);
    CHECK(raw.cost <= scaled_back);
    CHECK(scaled_back <= Rational(2) * raw.cost);
  }
}

TEST_CASE("feasibility checker") {
  FacilityClientGraph g = walkthrough();
  std::set<std::string> fac{"f1"};
  std::set<std::pair<std::string, std::string>> edges{{"f1", "c"}};
  CHECK(check_feasible(g, {"c"}, fac, edges));
  CHECK_FALSE(check_feasible(g, {"c"}, {}, edges));
  CHECK_FALSE(check_feasible(g, {"c"}, fac, {}));
  // Edge to a facility that was never opened.
  CHECK_FALSE(check_feasible(g, {"c"}, {"f2"}, edges));
  CHECK(check_feasible(g, {}, {}, {}));
}

TEST_CASE("worst request order") {
  SUBCASE("single client is trivial") {
    FacilityClientGraph g = walkthrough();
    WorstOrder worst = worst_request_order(g, {"c"});
    CHECK(worst.order == std::vector<std::string>{"c"});
  }
  SUBCASE("enumeration matches a manual maximum") {
    GeneratorSpec spec;
    spec.family = "layered-distance";
    spec.facilities = 4;
    spec.clients = 4;
    spec.active = 3;
    spec.seed = 11;
    InstanceFile instance = generate(spec);
    PreprocessResult pre = preprocess(instance.graph);

    WorstOrder worst = worst_request_order(pre.graph, instance.requests);
    std::vector<std::string> order = instance.requests;
    std::sort(order.begin(), order.end());
    std::int64_t manual_max = 0;
    do {
      manual_max = std::max(manual_max, run_det(pre.graph, order).total_cost);
    } while (std::next_permutation(order.begin(), order.end()));
    CHECK(worst.det_cost == manual_max);
    CHECK(run_det(pre.graph, worst.order).total_cost == manual_max);
  }
  SUBCASE("size guard") {
    GeneratorSpec spec;
    spec.facilities = 3;
    spec.clients = 10;
    spec.active = 9;
    InstanceFile instance = generate(spec);
    PreprocessResult pre = preprocess(instance.graph);
    CHECK_THROWS_AS(worst_request_order(pre.graph, instance.requests), Error);
  }
}
