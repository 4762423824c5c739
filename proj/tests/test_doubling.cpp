#include "ofl/doubling.hpp"

#include <cmath>

#include "doctest.h"
#include "ofl/error.hpp"
#include "ofl/generator.hpp"
#include "ofl/numeric.hpp"
#include "ofl/oracle.hpp"

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

TEST_CASE("R formula") {
  CHECK(compute_R(2, 2) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(compute_R(4, 4) == doctest::Approx(8.0).epsilon(1e-12));
  CHECK(compute_R(16, 4) == doctest::Approx(4.0 * (2.0 + std::log2(std::log2(64.0)))));
  CHECK_THROWS_AS(compute_R(1, 4), Error);
  CHECK_THROWS_AS(compute_R(4, 1), Error);
}

TEST_CASE("pre-purchase threshold") {
  // Normalized costs are 0 or >= 1, so below 2^j/(|F||C|) only free items
  // qualify until the threshold clears one.
  FacilityClientGraph g;
  g.facilities = {{"f1", Rational(0)}, {"f2", Rational(1)}, {"f3", Rational(4)},
                  {"f4", Rational(16)}};
  g.clients = {"c1", "c2"};
  g.edges = {{"f1", "c1", Rational(0)}, {"f2", "c1", Rational(2)}};
  g.normalized = true;

  SUBCASE("threshold exactly one keeps only free items") {
    // 2^3 / (4*2) = 1: strict comparison excludes cost-1 items.
    PrePurchase pre = pre_purchase(g, 3);
    CHECK(pre.facilities == std::vector<std::string>{"f1"});
    REQUIRE(pre.edges.size() == 1);
    CHECK(pre.cost == 0);
  }
  SUBCASE("phase zero buys only free items") {
    PrePurchase pre = pre_purchase(g, 0);
    CHECK(pre.facilities == std::vector<std::string>{"f1"});
    CHECK(pre.cost == 0);
  }
  SUBCASE("large phase buys everything") {
    PrePurchase pre = pre_purchase(g, 12);  // threshold 512 > every cost
    CHECK(pre.facilities.size() == 4);
    CHECK(pre.edges.size() == 2);
    CHECK(pre.cost == 0 + 1 + 4 + 16 + 0 + 2);
    CHECK(static_cast<double>(pre.cost) <= 2.0 * std::ldexp(1.0, 12));
  }
}

TEST_CASE("phase graph construction") {
  FacilityClientGraph g;
  g.facilities = {{"f1", Rational(1)}, {"f2", Rational(2)}, {"f3", Rational(16)}};
  g.clients = {"c1", "c2"};
  g.edges = {{"f1", "c1", Rational(2)}, {"f3", "c1", Rational(1)}, {"f3", "c2", Rational(16)}};
  g.normalized = true;

  SUBCASE("keeps cheap items and drops edges to dropped facilities") {
    PhaseGraph pg = build_phase_graph(g, 1, PrePurchase{});
    CHECK(pg.scale_divisor == 1);
    REQUIRE(pg.graph.facilities.size() == 2);  // f3 is too expensive
    CHECK(pg.graph.facilities[0].id == "f1");
    CHECK(pg.graph.facilities[1].id == "f2");
    REQUIRE(pg.graph.edges.size() == 1);  // f3's edges go with it
    CHECK(pg.graph.edges[0].facility == "f1");
    CHECK(pg.graph.clients.size() == 2);
  }
  SUBCASE("rescales so the smallest positive cost is one") {
    FacilityClientGraph big;
    big.facilities = {{"f1", Rational(4)}, {"f2", Rational(8)}};
    big.clients = {"c1", "c2"};
    big.edges = {{"f1", "c1", Rational(16)}};
    big.normalized = true;
    PhaseGraph pg = build_phase_graph(big, 4, PrePurchase{});
    CHECK(pg.scale_divisor == 4);
    CHECK(pg.graph.facilities[0].cost == Rational(1));
    CHECK(pg.graph.facilities[1].cost == Rational(2));
    CHECK(pg.graph.edges[0].cost == Rational(4));
  }
  SUBCASE("pre-purchased items are free in the phase graph") {
    PrePurchase pre;
    pre.facilities = {"f1"};
    pre.edges = {{"f1", "c1"}};
    PhaseGraph pg = build_phase_graph(g, 1, pre);
    CHECK(pg.graph.facilities[0].cost == Rational(0));
    CHECK(pg.graph.edges[0].cost == Rational(0));
    CHECK(pg.scale_divisor == 2);  // the cheapest remaining positive cost
  }
  SUBCASE("all-zero graph scales by one") {
    FacilityClientGraph zero;
    zero.facilities = {{"f1", Rational(0)}, {"f2", Rational(0)}};
    zero.clients = {"c1", "c2"};
    zero.edges = {{"f1", "c1", Rational(0)}};
    zero.normalized = true;
    PhaseGraph pg = build_phase_graph(zero, 0, PrePurchase{});
    CHECK(pg.scale_divisor == 1);
  }
}

TEST_CASE("wrapper on the walkthrough instance") {
  AuditContext audit(true);
  DetResult det = run_det(walkthrough(), {"c"}, DetConfig{}, &audit);
  // Phase 0 keeps no facility (both cost 2 > 1), so "c" is disconnected and
  // the wrapper advances; phase 1 serves it for opening 2 plus connection 1.
  CHECK(det.total_cost == 3);
  CHECK(det.phases == 2);
  CHECK(det.purchased_facilities.count("f1") == 1);
  CHECK(det.purchased_edges.count({"f1", "c"}) == 1);
  CHECK(check_feasible(walkthrough(), {"c"}, det.purchased_facilities, det.purchased_edges));
  CHECK(audit.total_violations() == 0);

  // Latest settling phase: ceil(log2(OPT)) with OPT = 3.
  OfflineSolution opt = optimal_offline(walkthrough(), {"c"});
  CHECK(det.phases - 1 <= ceil_log2(opt.cost.num()));
}

TEST_CASE("budget too small in early phases") {
  // Single useful facility of cost 2 at distance 2: phase 0 cannot hold it,
  // phase 1 serves at unscaled cost 4.
  FacilityClientGraph g;
  g.facilities = {{"f1", Rational(2)}, {"f2", Rational(32)}};
  g.clients = {"c1", "c2"};
  g.edges = {{"f1", "c1", Rational(2)}};
  g.normalized = true;
  DetResult det = run_det(g, {"c1"});
  CHECK(det.phases == 2);
  CHECK(det.total_cost == 4);
  REQUIRE(det.phase_log.size() == 2);
  CHECK(det.phase_log[0].exhausted);
  CHECK_FALSE(det.phase_log[1].exhausted);
  CHECK(det.phase_log[1].committed_cost == 4);
}

TEST_CASE("replay pays earlier clients again in later phases") {
  // c1 is servable from phase 0 (unit costs); c2 needs cost-4 items that only
  // enter the phase graph at j=2. Advancing replays c1, whose purchases are
  // paid again in every phase that commits it, while the ledger keeps one
  // copy. Hand accounting: phase 0 commits c1 for 2; phase 1 replays c1 (2)
  // and fails c2; phase 2 replays c1 (2) and serves c2 for 8.
  FacilityClientGraph g;
  g.facilities = {{"f1", Rational(1)}, {"f2", Rational(4)}};
  g.clients = {"c1", "c2"};
  g.edges = {{"f1", "c1", Rational(1)}, {"f2", "c2", Rational(4)}};
  g.normalized = true;

  AuditContext audit(true);
  DetResult det = run_det(g, {"c1", "c2"}, DetConfig{}, &audit);
  CHECK(audit.total_violations() == 0);
  CHECK(det.phases == 3);
  CHECK(det.total_cost == 14);
  REQUIRE(det.phase_log.size() == 3);
  CHECK(det.phase_log[0].committed_cost == 2);
  CHECK(det.phase_log[0].clients_committed == 1);
  CHECK(det.phase_log[0].exhausted);  // c2 disconnected at j=0
  CHECK(det.phase_log[1].committed_cost == 2);
  CHECK(det.phase_log[1].exhausted);  // still disconnected at j=1
  CHECK(det.phase_log[2].committed_cost == 10);
  CHECK(det.phase_log[2].clients_committed == 2);
  CHECK_FALSE(det.phase_log[2].exhausted);
  CHECK(det.purchased_facilities == std::set<std::string>{"f1", "f2"});
  CHECK(det.purchased_edges.size() == 2);
  CHECK(check_feasible(g, {"c1", "c2"}, det.purchased_facilities, det.purchased_edges));
}

TEST_CASE("empty request sequence stops in phase zero") {
  DetResult det = run_det(walkthrough(), {});
  CHECK(det.phases == 1);
  CHECK(det.total_cost == 0);  // nothing below the phase-0 threshold has positive cost
  CHECK(det.total_cost <= 2);
}

TEST_CASE("free instances cost nothing") {
  FacilityClientGraph g;
  g.facilities = {{"f1", Rational(0)}, {"f2", Rational(0)}};
  g.clients = {"c1", "c2"};
  g.edges = {{"f1", "c1", Rational(0)}, {"f2", "c2", Rational(0)}};
  g.normalized = true;
  DetResult det = run_det(g, {"c1", "c2"});
  CHECK(det.total_cost == 0);
  CHECK(det.phases == 1);
  CHECK(check_feasible(g, {"c1", "c2"}, det.purchased_facilities, det.purchased_edges));
}

TEST_CASE("requested client without edges is rejected up front") {
  FacilityClientGraph g = walkthrough();
  CHECK_THROWS_AS(run_det(g, {"zz"}), Error);
}

TEST_CASE("phase spend stays within its envelope") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    GeneratorSpec spec;
    spec.family = seed % 2 == 0 ? "uniform-random" : "star";
    spec.facilities = 6;
    spec.clients = 8;
    spec.active = 5;
    spec.seed = seed;
    InstanceFile instance = generate(spec);
    PreprocessResult pre = preprocess(instance.graph);

    AuditContext audit(true);
    DetConfig config;
    DetResult det = run_det(pre.graph, instance.requests, config, &audit);
    CHECK(audit.total_violations() == 0);
    for (const auto& record : det.phase_log) {
      const double envelope =
          (config.q * det.R + 4.0) * std::ldexp(1.0, record.phase) + 1e-6;
      CHECK(static_cast<double>(record.pre_purchase_cost + record.committed_cost) <= envelope);
    }
    CHECK(check_feasible(pre.graph, instance.requests, det.purchased_facilities,
                         det.purchased_edges));
  }
}

TEST_CASE("wrapper needs a normalized graph and a positive multiplier") {
  FacilityClientGraph raw = walkthrough();
  raw.normalized = false;
  CHECK_THROWS_AS(run_det(raw, {}), Error);
  DetConfig bad;
  bad.q = 0.0;
  CHECK_THROWS_AS(run_det(walkthrough(), {}, bad), Error);
}
