#include <doctest.h>

#include "fixtures.hpp"
#include "nlos/geometry.hpp"
#include "nlos/visibility.hpp"
#include "oracle.hpp"

#include <random>
#include <vector>

using namespace nlos;

namespace {

const Triangle kPlate{Vec3(-1, -1, 0.5), Vec3(1, -1, 0.5), Vec3(0, 1, 0.5)};

Vec3 random_point(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return Vec3(u(rng), u(rng), u(rng));
}

}  // namespace

TEST_CASE("ray triangle intersection") {
  const auto t = intersect(kPlate, Vec3(0, 0, 0), Vec3(0, 0, 1), 0.0, 10.0);
  REQUIRE(t.has_value());
  CHECK(*t == doctest::Approx(0.5));
  CHECK_FALSE(intersect(kPlate, Vec3(0, 0, 0), Vec3(0, 0, -1), 0.0, 10.0).has_value());
  CHECK_FALSE(intersect(kPlate, Vec3(0, 0, 0), Vec3(0, 0, 1), 0.0, 0.4).has_value());
  CHECK_FALSE(intersect(kPlate, Vec3(5, 0, 0), Vec3(0, 0, 1), 0.0, 10.0).has_value());
  CHECK_FALSE(intersect(kPlate, Vec3(0, 0, 0), Vec3(1, 0, 0), 0.0, 10.0).has_value());
}

TEST_CASE("ray construction validates its inputs") {
  CHECK_THROWS((void)Ray(Vec3::Zero(), Vec3(0, 0, 2), 0.0, 1.0));
  CHECK_THROWS((void)Ray(Vec3::Zero(), Vec3(0, 0, 1), 1.0, 1.0));
  CHECK_THROWS((void)Ray(Vec3::Zero(), Vec3(0, 0, 1), -0.1, 1.0));
  const std::vector<Triangle> occ{kPlate};
  CHECK(occluded(Ray(Vec3::Zero(), Vec3(0, 0, 1), 0.0, 1.0), occ));
  CHECK_FALSE(occluded(Ray(Vec3::Zero(), Vec3(0, 0, 1), 0.0, 0.25), occ));
}

TEST_CASE("hemisphere test") {
  CHECK(hemisphere_visible(Vec3::Zero(), Vec3(0, 0, 1), Vec3::UnitZ()) == 1);
  CHECK(hemisphere_visible(Vec3::Zero(), Vec3(0, 0, -1), Vec3::UnitZ()) == 0);
  CHECK(hemisphere_visible(Vec3::Zero(), Vec3(1, 0, 0), Vec3::UnitZ()) == 0);
  CHECK_THROWS((void)hemisphere_visible(Vec3::Zero(), Vec3::Zero(), Vec3::UnitZ()));
}

TEST_CASE("segment occlusion matches the signed-volume oracle and is symmetric") {
  std::mt19937_64 rng(7);
  std::vector<Triangle> occ;
  std::vector<oracle::Tri> otris;
  for (int k = 0; k < 6; ++k) {
    Triangle t{random_point(rng, -1, 1), random_point(rng, -1, 1), random_point(rng, -1, 1)};
    occ.push_back(t);
    otris.push_back({oracle::p3(t.a), oracle::p3(t.b), oracle::p3(t.c)});
  }
  int blocked = 0;
  for (int trial = 0; trial < 4000; ++trial) {
    const Vec3 a = random_point(rng, -1.5, 1.5);
    const Vec3 b = random_point(rng, -1.5, 1.5);
    bool expect = false;
    for (const auto& t : otris) {
      expect = expect || oracle::segment_hits(oracle::p3(a), oracle::p3(b), t);
    }
    CHECK(ray_occluded(a, b, occ) == expect);
    CHECK(ray_occluded(a, b, occ) == ray_occluded(b, a, occ));
    blocked += expect ? 1 : 0;
  }
  CHECK(blocked > 200);
  CHECK(blocked < 3800);
}

TEST_CASE("surfaces at the segment ends do not occlude") {
  const std::vector<Triangle> occ{kPlate};
  CHECK_FALSE(ray_occluded(Vec3(0, 0, 0.5), Vec3(0, 0, 1.5), occ));
  CHECK_FALSE(ray_occluded(Vec3(0, 0, -1), Vec3(0, 0, 0.5), occ));
  CHECK(ray_occluded(Vec3(0, 0, -1), Vec3(0, 0, 1), occ));
}

TEST_CASE("mutual visibility of scene elements") {
  const Scene s = fixtures::load("planar100");
  // Wall patches never see each other through the hemisphere test on a plane.
  CHECK(visibility(s.patches[0], s.patches[55], s) == 0);
  // The partition hides every voxel center from the camera.
  for (int v = 0; v < s.grid.size(); ++v) {
    CHECK(ray_occluded(s.grid.center(v), s.camera.position, s));
  }
  // But not from the wall.
  const NlosProxy p = voxel_proxy(s.grid, 0, s.wall_centroid());
  int seen = 0;
  for (const Patch& patch : s.patches) {
    seen += visibility(p, patch, s);
  }
  CHECK(seen > 50);
}
