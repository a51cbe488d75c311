#include <doctest.h>

#include "fixtures.hpp"
#include "nlos/error.hpp"
#include "nlos/radiosity.hpp"
#include "oracle.hpp"

#include <random>
#include <sstream>

using namespace nlos;

namespace {

IlluminationPlan random_plan(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  IlluminationPlan plan;
  for (int i = 0; i < n; ++i) {
    if (u(rng) < 0.6) {
      plan.entries.push_back({i, u(rng) * 3.0});
    }
  }
  if (plan.entries.empty()) {
    plan.entries.push_back({0, 1.0});
  }
  plan.budget = plan.total();
  return plan;
}

std::vector<double> exitance_of(const IlluminationPlan& plan, int n) {
  std::vector<double> x(n, 0.0);
  for (const auto& e : plan.entries) {
    x[e.patch] += e.exitance;
  }
  return x;
}

void check_vectors(const std::vector<double>& got, const std::vector<double>& want, double rel) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    CAPTURE(i);
    CHECK(oracle::rel_close(got[i], want[i], rel, 1e-300));
  }
}

}  // namespace

TEST_CASE("single patch under a single voxel, by hand") {
  const Scene s = fixtures::load("minimal");
  const Transport t(s);
  const RadiosityReport r = evaluate(t, single_patch_plan(0, 2.0), 0);
  CHECK(r.first[0] == doctest::Approx(1.0));
  CHECK(r.second[0] == 0.0);
  CHECK(r.third_los[0] == 0.0);
  CHECK(r.proxy_radiosity == doctest::Approx(0.5 / kPi).epsilon(1e-12));
  CHECK(r.third_nlos[0] == doctest::Approx(1.0 / (kPi * kPi)).epsilon(1e-12));
  CHECK(r.los == doctest::Approx(1.0));
  CHECK(r.nlos == doctest::Approx(1.0 / (kPi * kPi)).epsilon(1e-12));
  CHECK(r.total == doctest::Approx(1.0 + 1.0 / (kPi * kPi)).epsilon(1e-12));
  CHECK(r.voxel == 0);
}

TEST_CASE("form factor conventions") {
  const Scene s = fixtures::load("minimal");
  const NlosProxy p = voxel_proxy(s.grid, 0, s.wall_centroid());
  CHECK(unoccluded_form_factor(p, s.patches[0]) == doctest::Approx(1.0 / kPi));
  CHECK(unoccluded_form_factor(s.patches[0], p) == doctest::Approx(4.0 / kPi));
  NlosProxy away = p;
  away.normal = Vec3::UnitZ();
  CHECK(unoccluded_form_factor(away, s.patches[0]) == 0.0);
  NlosProxy same = p;
  same.center = s.patches[0].center;
  CHECK_THROWS_AS((void)unoccluded_form_factor(same, s.patches[0]), std::invalid_argument);
}

TEST_CASE("bounce vectors match path enumeration on small scenes") {
  std::mt19937_64 rng(11);
  for (const std::string& name : fixtures::small_scenes()) {
    CAPTURE(name);
    const Scene s = fixtures::load(name);
    const Transport t(s);
    const oracle::World world(s);
    for (int trial = 0; trial < 5; ++trial) {
      const IlluminationPlan plan = random_plan(rng, s.patch_count());
      for (int v = 0; v < s.grid.size(); ++v) {
        const NlosProxy proxy = t.voxel_proxy(v);
        const RadiosityReport r = evaluate(t, plan, v);
        const auto o = world.paths(exitance_of(plan, s.patch_count()), oracle::element(proxy));
        check_vectors(r.first, o.first, 1e-9);
        check_vectors(r.second, o.second, 1e-9);
        check_vectors(r.third_los, o.third_los, 1e-9);
        check_vectors(r.third_nlos, o.third_nlos, 1e-9);
        CHECK(oracle::rel_close(r.proxy_radiosity, o.bn, 1e-9, 1e-300));
        CHECK(oracle::rel_close(r.los, o.los, 1e-9, 1e-300));
        CHECK(oracle::rel_close(r.nlos, o.nlos, 1e-9, 1e-300));
      }
    }
  }
}

TEST_CASE("non-planar scenes carry interreflection") {
  const Scene s = fixtures::load("corner8");
  const Transport t(s);
  const RadiosityReport r = evaluate(t, single_patch_plan(0, 1.0), 0);
  double second = 0;
  double third = 0;
  for (int i = 0; i < s.patch_count(); ++i) {
    second += r.second[i];
    third += r.third_los[i];
  }
  CHECK(second > 0.0);
  CHECK(third > 0.0);
  CHECK(r.nlos > 0.0);

  const Scene flat = fixtures::load("planar4");
  const RadiosityReport f = evaluate(Transport(flat), single_patch_plan(0, 1.0), 0);
  for (int i = 0; i < flat.patch_count(); ++i) {
    CHECK(f.second[i] == 0.0);
    CHECK(f.third_los[i] == 0.0);
  }
}

TEST_CASE("transport and scene-level bounce functions agree") {
  const Scene s = fixtures::load("alcove6");
  const Transport t(s);
  const std::vector<double> first = first_bounce(s, single_patch_plan(2, 1.5));
  CHECK(second_bounce(t, first) == second_bounce(s, first));
  const auto second = second_bounce(t, first);
  CHECK(third_bounce_los(t, second) == third_bounce_los(s, second));
  const NlosProxy p = t.voxel_proxy(1);
  const NlosBounce a = nlos_bounce(t.couple(p), s, first);
  const NlosBounce b = nlos_bounce(s, first, p);
  CHECK(a.proxy_radiosity == b.proxy_radiosity);
  CHECK(a.wall == b.wall);
}

TEST_CASE("emission enters the first bounce") {
  Scene s = fixtures::load("planar4");
  s.patches[3].emission = 0.25;
  const RadiosityReport r = evaluate(Transport(s), single_patch_plan(0, 1.0), std::nullopt);
  CHECK(r.first[3] == 0.25);
  CHECK(r.first[0] == doctest::Approx(0.8));
}

TEST_CASE("no object means no third-bounce NLOS light") {
  const Scene s = fixtures::load("corner8");
  const RadiosityReport r = evaluate(Transport(s), single_patch_plan(1, 1.0), std::nullopt);
  CHECK(r.nlos == 0.0);
  CHECK(r.proxy_radiosity == 0.0);
  CHECK_FALSE(r.voxel.has_value());
}

TEST_CASE("plan entry order does not change results") {
  const Scene s = fixtures::load("corner24");
  const Transport t(s);
  IlluminationPlan a;
  a.entries = {{3, 0.25}, {17, 0.5}, {9, 0.125}};
  IlluminationPlan b = a;
  std::reverse(b.entries.begin(), b.entries.end());
  const RadiosityReport ra = evaluate(t, a, 2);
  const RadiosityReport rb = evaluate(t, b, 2);
  CHECK(ra.total == rb.total);
  CHECK(ra.third_nlos == rb.third_nlos);
}

TEST_CASE("linearity in the plan") {
  const Scene s = fixtures::load("corner24");
  const Transport t(s);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const IlluminationPlan plan = random_plan(rng, s.patch_count());
    for (const double c : {0.001, 0.37, 3.0, 1750.0}) {
      const RadiosityReport r1 = evaluate(t, plan, trial % s.grid.size());
      const RadiosityReport rc = evaluate(t, plan.scaled(c), trial % s.grid.size());
      CHECK(oracle::rel_close(rc.los, c * r1.los, 1e-12));
      CHECK(oracle::rel_close(rc.nlos, c * r1.nlos, 1e-12));
      for (int i = 0; i < s.patch_count(); ++i) {
        CHECK(oracle::rel_close(rc.second[i], c * r1.second[i], 1e-12, 1e-300));
        CHECK(oracle::rel_close(rc.third_nlos[i], c * r1.third_nlos[i], 1e-12, 1e-300));
      }
    }
  }
}

TEST_CASE("form factor reciprocity") {
  int pairs = 0;
  for (std::uint64_t seed = 1; pairs < 1000; ++seed) {
    const Scene s = fixtures::random_corner(seed, 3, 3, 3, 2);
    for (int a = 0; a < s.patch_count() && pairs < 1000; ++a) {
      for (int b = a + 1; b < s.patch_count() && pairs < 1000; ++b) {
        const double fab = form_factor(s.patches[a], s.patches[b], s);
        const double fba = form_factor(s.patches[b], s.patches[a], s);
        CHECK((fab > 0) == (fba > 0));
        if (fab > 0) {
          CHECK(oracle::rel_close(fab * s.patches[b].area, fba * s.patches[a].area, 1e-12));
          ++pairs;
        }
      }
    }
  }
}

TEST_CASE("bad plans are rejected") {
  const Scene s = fixtures::load("planar4");
  CHECK_THROWS_AS((void)first_bounce(s, single_patch_plan(4, 1.0)), std::out_of_range);
  CHECK_THROWS_AS((void)first_bounce(s, single_patch_plan(-1, 1.0)), std::out_of_range);
  const Transport t(s);
  CHECK_THROWS((void)evaluate(t, single_patch_plan(0, 1.0), 8));
}

TEST_CASE("report CSV layout") {
  const Scene s = fixtures::load("planar4");
  const RadiosityReport r = evaluate(Transport(s), single_patch_plan(1, 1.0), 3);
  std::ostringstream out;
  write_report_csv(out, r);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# voxel=3 B_LOS=", 0) == 0);
  std::getline(in, line);
  CHECK(line == "id,B_first,B_second,B_third_los,B_third_nlos");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
  }
  CHECK(rows == 4);
}
