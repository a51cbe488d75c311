#include <doctest.h>

#include "fixtures.hpp"
#include "nlos/error.hpp"
#include "nlos/optimizer.hpp"
#include "nlos/report.hpp"
#include "oracle.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

using namespace nlos;

namespace {

SampleRecord record(const std::string& id, const std::string& label, std::optional<Vec3> c) {
  SampleRecord r;
  r.id = id;
  r.label = label;
  r.centroid = c;
  return r;
}

DatasetManifest five() {
  DatasetManifest m;
  m.records = {record("s1", "sphere", Vec3(0, 0, 0)), record("s2", "man", Vec3(0.1, 0.1, 0.1)),
               record("s3", "no_object", std::nullopt), record("s4", "bunny", Vec3(-0.2, 0.3, 0.1)),
               record("s5", "sphere", Vec3(0.05, 0.05, 0.05))};
  return m;
}

PredictionRecord at(const std::string& id, Vec3 c) {
  PredictionRecord p;
  p.sample_id = id;
  p.centroid = c;
  return p;
}

PredictionRecord cls(const std::string& id, const std::string& label, double conf) {
  PredictionRecord p;
  p.sample_id = id;
  p.label = label;
  p.confidence = conf;
  return p;
}

std::vector<PredictionRecord> five_localization() {
  return {at("s1", Vec3(0.03, 0.04, 0)), at("s2", Vec3(0.1, 0.1, 0.12)), at("s3", Vec3(0, 0, 0)),
          at("s4", Vec3(-0.19, 0.3, 0.1)), at("s5", Vec3(0.05, 0.07, 0.05))};
}

}  // namespace

TEST_CASE("hand-computed localization metrics") {
  const Metrics m = score(five(), five_localization());
  CHECK(m.localized == 4);  // the no-object record has no true centroid
  // distances 5, 2, 1, 2 cm
  CHECK(m.mean_error_cm == doctest::Approx(10.0 / 4));
  CHECK(m.mean_squared_error_cm2 == doctest::Approx((25.0 + 4 + 1 + 4) / 4));
  CHECK(m.per_class.at("sphere").mean_error_cm == doctest::Approx(3.5));
  CHECK(m.per_class.at("sphere").count == 2);
  CHECK_FALSE(m.accuracy_pct.has_value());
}

TEST_CASE("hand-computed identification metrics") {
  const std::vector<PredictionRecord> p{cls("s1", "sphere", 0.9), cls("s2", "sphere", 0.8),
                                        cls("s3", "man", 0.3), cls("s4", "bunny", 0.4),
                                        cls("s5", "sphere", 0.5)};
  const Metrics m = score(five(), p);
  CHECK(m.classified == 5);
  REQUIRE(m.accuracy_pct.has_value());
  CHECK(*m.accuracy_pct == doctest::Approx(60.0));
  CHECK(m.per_class.at("no_object").correct == 1);
  CHECK(m.per_class.at("bunny").correct == 0);
  CHECK(m.per_class.at("sphere").accuracy_pct == doctest::Approx(100.0));
  CHECK(m.localized == 0);
}

TEST_CASE("perfect and offset predictions") {
  DatasetManifest m;
  std::vector<PredictionRecord> exact;
  std::vector<PredictionRecord> offset;
  std::vector<PredictionRecord> named;
  for (int i = 0; i < 20; ++i) {
    const Vec3 c(0.01 * i, -0.02 * i, 0.3);
    m.records.push_back(record(fmt::format("s{}", i), i % 2 ? "man" : "sphere", c));
    exact.push_back(at(fmt::format("s{}", i), c));
    offset.push_back(at(fmt::format("s{}", i), c + Vec3(0, 0, 0.01)));
    named.push_back(cls(fmt::format("s{}", i), i % 2 ? "man" : "sphere", 0.99));
  }
  CHECK(score(m, exact).mean_error_cm == 0.0);
  CHECK(score(m, offset).mean_error_cm == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(*score(m, named).accuracy_pct == 100.0);
  std::reverse(offset.begin(), offset.end());
  CHECK(score(m, offset).mean_error_cm == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("scoring is invariant to prediction order") {
  std::vector<PredictionRecord> p = five_localization();
  const Metrics a = score(five(), p);
  std::mt19937_64 rng(4);
  for (int k = 0; k < 5; ++k) {
    std::shuffle(p.begin(), p.end(), rng);
    const Metrics b = score(five(), p);
    CHECK(b.mean_error_cm == a.mean_error_cm);
    CHECK(b.mean_squared_error_cm2 == a.mean_squared_error_cm2);
  }
}

TEST_CASE("only the test split is scored") {
  DatasetManifest m = five();
  for (auto& r : m.records) {
    r.split = r.id == "s1" || r.id == "s2" ? "test" : "train";
  }
  const Metrics s = score(m, std::vector<PredictionRecord>{at("s1", Vec3(0, 0, 0)), at("s2", Vec3(0.1, 0.1, 0.1))});
  CHECK(s.localized == 2);
  CHECK(s.mean_error_cm == 0.0);
}

TEST_CASE("prediction id errors") {
  auto p = five_localization();
  p.pop_back();
  CHECK_THROWS_AS((void)score(five(), p), ValidationError);
  p = five_localization();
  p.push_back(at("s2", Vec3::Zero()));
  CHECK_THROWS_AS((void)score(five(), p), ValidationError);
  p = five_localization();
  p.push_back(at("s99", Vec3::Zero()));
  CHECK_THROWS_AS((void)score(five(), p), ValidationError);
}

TEST_CASE("prediction CSV formats") {
  std::istringstream loc("sample_id,x,y,z,confidence\ns1, 0.5,1,-2,0.75\n\ns2,0,0,0,1\n");
  const auto a = read_predictions(loc);
  REQUIRE(a.size() == 2);
  CHECK(a[0].sample_id == "s1");
  CHECK(*a[0].centroid == Vec3(0.5, 1, -2));
  CHECK(a[0].confidence == 0.75);
  std::istringstream id("sample_id,class,confidence\ns1,bunny,0.2\n");
  const auto b = read_predictions(id);
  REQUIRE(b.size() == 1);
  CHECK(*b[0].label == "bunny");

  std::ostringstream out;
  write_predictions(out, a);
  std::istringstream again(out.str());
  const auto c = read_predictions(again);
  CHECK(*c[0].centroid == *a[0].centroid);
  CHECK(c[1].confidence == 1.0);

  for (const char* bad : {"id,x,y\n", "", "sample_id,class,confidence\ns1,man\n",
                          "sample_id,x,y,z,confidence\ns1,0,0,zero,1\n",
                          "sample_id,class,confidence\ns1,man,1.5\n"}) {
    CAPTURE(bad);
    std::istringstream in(bad);
    CHECK_THROWS_AS((void)read_predictions(in), ParseError);
  }
}

TEST_CASE("metrics CSV") {
  std::ostringstream out;
  write_metrics_csv(out, score(five(), five_localization()));
  const std::string s = out.str();
  CHECK(s.rfind("metric,class,value\n", 0) == 0);
  CHECK(s.find("mse_cm,all,2.5\n") != std::string::npos);
  CHECK(s.find("mean_squared_error_cm2,all,8.5\n") != std::string::npos);
}

TEST_CASE("energy curve on the 100-patch wall") {
  const Transport t(fixtures::load("planar100"));
  std::vector<int> supports(100);
  std::iota(supports.begin(), supports.end(), 1);
  for (int v : {0, 21, 42, 63}) {
    const auto rows = energy_curve(t, v, supports, 1.0);
    REQUIRE(rows.size() == 100);
    for (const auto& r : rows) {
      CHECK(r.adaptive - r.floodlight >= -1e-12 * std::max(r.adaptive, r.floodlight));
    }
    CHECK(rows.back().adaptive == rows.back().floodlight);
    CHECK(rows.front().adaptive > rows.front().floodlight);
    for (std::size_t k = 1; k < rows.size(); ++k) {
      CHECK(rows[k].adaptive <= rows[k - 1].adaptive * (1 + 1e-12));
    }
  }
  const std::vector<int> bad{0};
  CHECK_THROWS_AS((void)energy_curve(t, 0, bad, 1.0), ValidationError);
}

TEST_CASE("energy curve matches the path oracle on an 8-patch scene") {
  const Scene s = fixtures::load("corner8");
  const Transport t(s);
  const oracle::World world(s);
  std::vector<int> supports(8);
  std::iota(supports.begin(), supports.end(), 1);
  const int voxel = 5;
  const auto rows = energy_curve(t, voxel, supports, 2.0);
  const auto proxy = oracle::element(t.voxel_proxy(voxel));
  // Oracle ranking: single-patch NLOS at unit exitance.
  std::vector<std::pair<double, int>> c;
  for (int i = 0; i < 8; ++i) {
    std::vector<double> x(8, 0.0);
    x[i] = 1.0;
    c.push_back({-world.paths(x, proxy).nlos, i});
  }
  std::sort(c.begin(), c.end());
  for (const auto& r : rows) {
    std::vector<double> top(8, 0.0);
    std::vector<double> flood(8, 0.0);
    for (int k = 0; k < r.support; ++k) {
      top[c[k].second] = 2.0 / r.support;
      flood[k] = 2.0 / r.support;
    }
    CHECK(oracle::rel_close(r.adaptive, world.paths(top, proxy).nlos, 1e-9));
    CHECK(oracle::rel_close(r.floodlight, world.paths(flood, proxy).nlos, 1e-9));
  }
  std::ostringstream out;
  write_energy_csv(out, rows);
  CHECK(out.str().rfind("support,adaptive_b_nlos,floodlight_b_nlos\n1,", 0) == 0);
}

TEST_CASE("error curves by object size and noise") {
  DatasetManifest m;
  std::vector<PredictionRecord> p;
  for (int i = 0; i < 6; ++i) {
    SampleRecord r = record(fmt::format("s{}", i), "sphere", Vec3(0, 0, 0));
    r.proxy = NlosProxy{Vec3::Zero(), Vec3::UnitZ(), i < 3 ? 0.002 : 0.004, 0.5};
    r.noise_level = i % 2 ? 0.05 : 0.0;
    m.records.push_back(r);
    p.push_back(at(r.id, Vec3(0.01 * (i + 1), 0, 0)));
  }
  const auto size = error_by_object_size(m, p);
  REQUIRE(size.size() == 2);
  CHECK(size[0].key == 0.002);
  CHECK(size[0].count == 3);
  CHECK(size[0].mean_error_cm == doctest::Approx(2.0));
  CHECK(size[1].mean_error_cm == doctest::Approx(5.0));
  CHECK(size[1].mean_squared_error_cm2 == doctest::Approx((16.0 + 25 + 36) / 3));
  const auto noise = error_by_noise(m, p);
  REQUIRE(noise.size() == 2);
  CHECK(noise[0].key == 0.0);
  CHECK(noise[0].mean_error_cm == doctest::Approx(3.0));  // 1, 3, 5
  CHECK(noise[1].mean_error_cm == doctest::Approx(4.0));  // 2, 4, 6
  std::ostringstream out;
  write_curve_csv(out, "noise_sigma", noise);
  CHECK(out.str().rfind("noise_sigma,count,mse_cm,mean_squared_error_cm2\n0,3,3,", 0) == 0);
}
