#include "ofl/frac.hpp"

#include "doctest.h"
#include "ofl/error.hpp"
#include "ofl/instance.hpp"

using namespace ofl;

namespace {

// Two facilities of cost 2 at distances 1 and 2 from client "c"; the second
// client only pads the instance. Hand execution of the update loop:
//   u1: x_{c,1} 0->1, no augmentation
//   u2: x_{c,2} 0->1/2, y_f1 = 0.25
//   u3: x_{c,2} 1/2->1, y_f1 = 0.625
//   u4: y_f1 = 1.1875, y_f2 = 0.25, serving value 1.25
struct Walkthrough {
  FacilityClientGraph g;
  DistanceScale scale;
  ClusterIndex ix;
  std::int32_t c;
  std::int32_t f1, f2;

  Walkthrough() {
    g.facilities = {{"f1", Rational(2)}, {"f2", Rational(2)}};
    g.clients = {"c", "zz"};
    g.edges = {{"f1", "c", Rational(1)}, {"f2", "c", Rational(2)}};
    g.normalized = true;
    scale = distance_scale(g);
    ix = clusters(g, scale);
    c = *ix.client_pos("c");
    f1 = *ix.facility_pos("f1");
    f2 = *ix.facility_pos("f2");
  }
};

}  // namespace

TEST_CASE("initial openings follow the facility costs") {
  FacilityClientGraph g;
  g.facilities = {{"f1", Rational(0)}, {"f2", Rational(2)}};
  g.clients = {"c1", "c2"};
  g.normalized = true;
  ClusterIndex ix = clusters(g, distance_scale(g));
  FracEngine frac(ix);
  CHECK(frac.y(*ix.facility_pos("f1")) == 1.0);
  CHECK(frac.y(*ix.facility_pos("f2")) == 0.0);
}

TEST_CASE("arrival sets up the client row") {
  Walkthrough w;
  FracEngine frac(w.ix);
  frac.arrive(w.c);
  CHECK(frac.x(w.c, 0) == Rational(1));
  CHECK(frac.x(w.c, 1) == Rational(0));
  CHECK(frac.x(w.c, 2) == Rational(0));
  CHECK(frac.is_saturated(w.c, 0));
  CHECK(frac.gamma(w.c) == 0);
  CHECK(frac.alpha(w.c, 1) == 0);
  CHECK(frac.serving_value(w.c) == 0.0);  // no facility at distance zero
  CHECK_THROWS_AS(frac.arrive(w.c), Error);
}

TEST_CASE("walkthrough updates step by step") {
  Walkthrough w;
  FracEngine frac(w.ix);
  frac.arrive(w.c);

  UpdateDelta u1 = frac.update_operation(w.c);
  CHECK(u1.t_star == 1);
  CHECK(frac.x(w.c, 1) == Rational(1));
  CHECK(u1.augments.empty());
  CHECK(frac.is_saturated(w.c, 1));
  CHECK(u1.primal_delta == 1.0);

  UpdateDelta u2 = frac.update_operation(w.c);
  CHECK(u2.t_star == 2);
  CHECK(frac.x(w.c, 2) == Rational(1, 2));
  REQUIRE(u2.augments.size() == 1);
  CHECK(u2.augments[0].facility == w.f1);
  CHECK(frac.y(w.f1) == 0.25);
  CHECK(frac.serving_value(w.c) == 0.25);

  frac.update_operation(w.c);
  CHECK(frac.x(w.c, 2) == Rational(1));
  CHECK(frac.y(w.f1) == 0.625);

  UpdateDelta u4 = frac.update_operation(w.c);
  CHECK(u4.t_star == -1);  // everything saturated
  REQUIRE(u4.augments.size() == 2);
  CHECK(frac.y(w.f1) == 1.1875);
  CHECK(frac.y(w.f2) == 0.25);
  CHECK(frac.serving_value(w.c) == 1.25);
  CHECK(frac.serving_met(w.c));

  CHECK(frac.gamma(w.c) == 4);
  CHECK(frac.update_count(w.c) == 4);
  CHECK(frac.primal_value() == 5.875);
  CHECK(frac.dual_value() == 4);
  CHECK(frac.primal_value() <= 3.0 * static_cast<double>(frac.dual_value()));
  CHECK(frac.connection_value(w.c) == 3);  // 1*1 + 2*1

  // Dual bookkeeping after four updates.
  CHECK(frac.alpha(w.c, 0) == 0);
  CHECK(frac.beta(w.c, 0) == 4);
  CHECK(frac.alpha(w.c, 1) == 1);
  CHECK(frac.beta(w.c, 1) == 3);
  CHECK(frac.alpha(w.c, 2) == 3);
  CHECK(frac.beta(w.c, 2) == 1);
  for (std::int32_t ti = 0; ti < 3; ++ti) {
    CHECK(frac.gamma(w.c) == frac.alpha(w.c, ti) + frac.beta(w.c, ti));
    const std::int64_t t = w.ix.distances[ti];
    if (t > 0) CHECK(frac.alpha(w.c, ti) < 2 * t);
  }

  CHECK(frac.augment_count(w.f1) == 3);
  CHECK(frac.augment_count(w.f2) == 1);
  CHECK_THROWS_AS(frac.update_operation(w.c), Error);
}

TEST_CASE("serve_client runs the loop and reports the trace") {
  Walkthrough w;
  FracEngine frac(w.ix);
  frac.arrive(w.c);
  std::vector<AugmentEvent> trace;
  std::int64_t updates = frac.serve_client(w.c, [&](const UpdateDelta& d) {
    trace.insert(trace.end(), d.augments.begin(), d.augments.end());
  });
  CHECK(updates == 4);
  REQUIRE(trace.size() == 4);
  CHECK(trace[0].facility == w.f1);
  CHECK(trace[0].delta == 0.25);
  CHECK(trace[1].delta == 0.375);
  CHECK(trace[2].delta == doctest::Approx(0.5625).epsilon(1e-15));
  CHECK(trace[3].facility == w.f2);
  CHECK(trace[3].delta == 0.25);
}

TEST_CASE("zero updates when a free facility already serves the client") {
  FacilityClientGraph g;
  g.facilities = {{"f1", Rational(0)}, {"f2", Rational(4)}};
  g.clients = {"c1", "c2"};
  g.edges = {{"f1", "c1", Rational(0)}, {"f2", "c1", Rational(4)}};
  g.normalized = true;
  ClusterIndex ix = clusters(g, distance_scale(g));
  FracEngine frac(ix);
  const auto c = *ix.client_pos("c1");
  frac.arrive(c);
  CHECK(frac.serving_met(c));
  CHECK(frac.serve_client(c) == 0);
  CHECK(frac.good_distance(c) == 0);
}

TEST_CASE("single distance saturates then openings grow") {
  // One unit-cost facility at distance 1 plus an isolated one: x saturates in
  // the first update, two augmentations lift y to one.
  FacilityClientGraph g;
  g.facilities = {{"f1", Rational(1)}, {"f2", Rational(4)}};
  g.clients = {"c1", "c2"};
  g.edges = {{"f1", "c1", Rational(1)}};
  g.normalized = true;
  ClusterIndex ix = clusters(g, distance_scale(g));
  FracEngine frac(ix);
  const auto c = *ix.client_pos("c1");
  const auto f1 = *ix.facility_pos("f1");
  frac.arrive(c);

  frac.update_operation(c);
  CHECK(frac.x(c, 1) == Rational(1));
  frac.update_operation(c);
  CHECK(frac.y(f1) == 0.5);
  CHECK(frac.serving_value(c) == 0.5);  // min{x, y} at the single distance
  frac.update_operation(c);
  CHECK(frac.y(f1) == 1.5);
  CHECK(frac.serving_met(c));
  // Additive phase of cost(f) steps plus one doubling step.
  CHECK(frac.augment_count(f1) <= 1 + 1);
}

TEST_CASE("good distance selection") {
  SUBCASE("falls back below the top distance") {
    Walkthrough w;
    FracEngine frac(w.ix);
    frac.arrive(w.c);
    frac.serve_client(w.c);
    // min{x, y} at distance 2 is 0.25 < 1/2, so the distance below wins.
    CHECK(frac.good_distance(w.c) == 1);
    CHECK(frac.prefix_y(w.c, w.ix.t_pos(1)) == 1.1875);
    CHECK(2 * frac.connection_value(w.c) >= 1);
  }
  SUBCASE("keeps the top distance when it carries half") {
    FacilityClientGraph g;
    g.facilities = {{"f1", Rational(1)}, {"f2", Rational(4)}};
    g.clients = {"c1", "c2"};
    g.edges = {{"f1", "c1", Rational(1)}};
    g.normalized = true;
    ClusterIndex ix = clusters(g, distance_scale(g));
    FracEngine frac(ix);
    const auto c = *ix.client_pos("c1");
    frac.arrive(c);
    frac.serve_client(c);
    CHECK(frac.good_distance(c) == 1);  // min{1, 1.5} >= 1/2 at the top
  }
  SUBCASE("queried too early") {
    Walkthrough w;
    FracEngine frac(w.ix);
    frac.arrive(w.c);
    CHECK_THROWS_AS(frac.good_distance(w.c), Error);
  }
}

TEST_CASE("free edges put the augmentation work at distance zero") {
  // Two cost-4 facilities joined to c1 by free edges: the scale collapses to
  // {0}, and serving is pure opening growth. Hand run: per-facility opening
  // goes 0.125, 0.28125, 0.4765625, 0.720703125 across four updates.
  FacilityClientGraph g;
  g.facilities = {{"f1", Rational(4)}, {"f2", Rational(4)}};
  g.clients = {"c1", "c2"};
  g.edges = {{"f1", "c1", Rational(0)}, {"f2", "c1", Rational(0)}};
  g.normalized = true;
  ClusterIndex ix = clusters(g, distance_scale(g));
  REQUIRE(ix.distances == std::vector<std::int64_t>{0});
  FracEngine frac(ix);
  const auto c = *ix.client_pos("c1");
  frac.arrive(c);
  CHECK(frac.serve_client(c) == 4);
  CHECK(frac.y(*ix.facility_pos("f1")) == 0.720703125);
  CHECK(frac.y(*ix.facility_pos("f2")) == 0.720703125);
  CHECK(frac.good_distance(c) == 0);
  CHECK(frac.connection_value(c) == 0);
}

TEST_CASE("later clients reuse opening mass bought by earlier ones") {
  FacilityClientGraph g;
  g.facilities = {{"f1", Rational(2)}, {"f2", Rational(2)}};
  g.clients = {"c", "d"};
  g.edges = {{"f1", "c", Rational(1)}, {"f2", "c", Rational(2)}, {"f1", "d", Rational(1)}};
  g.normalized = true;
  ClusterIndex ix = clusters(g, distance_scale(g));
  FracEngine frac(ix);
  const auto c = *ix.client_pos("c");
  const auto d = *ix.client_pos("d");
  frac.arrive(c);
  frac.serve_client(c);
  const Rational xc1 = frac.x(c, 1);
  const Rational xc2 = frac.x(c, 2);

  frac.arrive(d);
  // One update saturates d's near distance; f1 already carries mass 1.1875.
  CHECK(frac.serve_client(d) == 1);
  CHECK(frac.connection_value(d) == 1);
  // Earlier rows are untouched and stay served under monotone openings.
  CHECK(frac.x(c, 1) == xc1);
  CHECK(frac.x(c, 2) == xc2);
  CHECK(frac.serving_met(c));
  CHECK(frac.dual_value() == 5);
}

TEST_CASE("empty run has zero objectives") {
  Walkthrough w;
  FracEngine frac(w.ix);
  CHECK(frac.primal_value() == 0.0);
  CHECK(frac.dual_value() == 0);
}

TEST_CASE("free facilities leave only connection cost in the primal") {
  // A free facility at distance 2 starts fully open, so serving just waits
  // for x at distance 2 to saturate in two half steps; the primal is pure
  // connection cost.
  FacilityClientGraph g;
  g.facilities = {{"f1", Rational(0)}, {"f2", Rational(0)}};
  g.clients = {"c1", "c2"};
  g.edges = {{"f1", "c1", Rational(2)}};
  g.normalized = true;
  ClusterIndex ix = clusters(g, distance_scale(g));
  REQUIRE(ix.distances == std::vector<std::int64_t>{0, 2});
  FracEngine frac(ix);
  const auto c = *ix.client_pos("c1");
  frac.arrive(c);
  CHECK(frac.serve_client(c) == 2);
  CHECK(frac.augment_count(*ix.facility_pos("f1")) == 0);
  CHECK(frac.primal_value() == 2.0);
  CHECK(frac.connection_value(c) == 2);
  CHECK(frac.good_distance(c) == 2);
}

TEST_CASE("disconnected client trips the termination guard") {
  FacilityClientGraph g;
  g.facilities = {{"f1", Rational(2)}, {"f2", Rational(2)}};
  g.clients = {"c1", "c2"};
  g.edges = {{"f1", "c1", Rational(1)}};
  g.normalized = true;
  ClusterIndex ix = clusters(g, distance_scale(g));
  FracEngine frac(ix);
  const auto lonely = *ix.client_pos("c2");
  frac.arrive(lonely);
  CHECK_THROWS_AS(frac.serve_client(lonely), Error);
}

TEST_CASE("per-update primal growth stays below three") {
  Walkthrough w;
  FracEngine frac(w.ix);
  frac.arrive(w.c);
  while (!frac.serving_met(w.c)) {
    UpdateDelta d = frac.update_operation(w.c);
    CHECK(d.primal_delta <= 3.0 + 1e-9);
  }
}

TEST_CASE("duals can be disabled") {
  Walkthrough w;
  FracEngine frac(w.ix, FracConfig{false});
  frac.arrive(w.c);
  frac.serve_client(w.c);
  CHECK(frac.gamma(w.c) == 4);  // objective still tracked
  CHECK_THROWS_AS(frac.alpha(w.c, 0), Error);
  CHECK(frac.dual_value() == 4);
}
