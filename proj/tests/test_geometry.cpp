#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "aobc/errors.hpp"
#include "aobc/geometry.hpp"
#include "aobc/rng.hpp"

using namespace aobc;

TEST_CASE("derived streams are reproducible and distinct") {
  auto a = derive_stream(5, {1, 2, label(StreamPurpose::channel)});
  auto b = derive_stream(5, {1, 2, label(StreamPurpose::channel)});
  auto c = derive_stream(5, {1, 3, label(StreamPurpose::channel)});
  auto d = derive_stream(6, {1, 2, label(StreamPurpose::channel)});
  auto e = derive_stream(5, {2, 1, label(StreamPurpose::channel)});
  const auto first = a();
  CHECK(first == b());
  CHECK(first != c());
  CHECK(first != d());
  CHECK(first != e());
}

TEST_CASE("node process count and radial law") {
  auto rng = derive_stream(1, {label(StreamPurpose::oracle)});
  const double lambda = 0.05, r = 10.0;
  const int reps = 4000;
  double count = 0.0, inner = 0.0;
  for (int k = 0; k < reps; ++k) {
    const auto pts = sample_node_process(lambda, r, rng);
    count += static_cast<double>(pts.size());
    for (const auto& p : pts) {
      CHECK(p.norm() < r);
      if (p.norm() < r / 2) inner += 1.0;
    }
  }
  const double mean = lambda * std::numbers::pi * r * r;
  // Poisson: variance equals the mean.
  CHECK(std::abs(count / reps - mean) < 4.0 * std::sqrt(mean / reps));
  // A quarter of the area lies inside r/2.
  const double frac = inner / count;
  CHECK(std::abs(frac - 0.25) < 4.0 * std::sqrt(0.25 * 0.75 / count));
}

TEST_CASE("empty processes") {
  auto rng = derive_stream(2, {label(StreamPurpose::oracle)});
  CHECK(sample_node_process(0.0, 5.0, rng).empty());
  CHECK(sample_interferer_process(0.0, 50.0, rng).empty());
  CHECK(sample_uniform_disk(0, 3.0, rng).empty());
  CHECK_THROWS_AS(sample_node_process(-1.0, 5.0, rng), InvalidParameter);
  CHECK_THROWS_AS(sample_node_process(0.1, 0.0, rng), InvalidParameter);
}

TEST_CASE("uniform disk draws stay inside") {
  auto rng = derive_stream(3, {label(StreamPurpose::oracle)});
  const auto pts = sample_uniform_disk(5000, 2.0, rng);
  REQUIRE(pts.size() == 5000);
  for (const auto& p : pts) {
    CHECK(p.norm() < 2.0);
    CHECK(p.norm2() > 0.0);
  }
}

TEST_CASE("truncation window") {
  const NetworkParams params;
  const double rw = truncation_window_radius(params, 0.005);
  CHECK(rw >= 2.0 * params.r);
  CHECK(truncation_tail_fraction(rw, params) == doctest::Approx(0.005).epsilon(1e-6));
  // tighter tolerance, wider window
  CHECK(truncation_window_radius(params, 1e-4) > rw);
  // the tail fraction decays with the window and is 1 at the disk edge
  CHECK(truncation_tail_fraction(params.r, params) == doctest::Approx(1.0));
  CHECK(truncation_tail_fraction(3 * params.r, params) >
        truncation_tail_fraction(6 * params.r, params));
  // the floor binds for very loose tolerances
  CHECK(truncation_window_radius(params, 0.95) == doctest::Approx(2.0 * params.r));

  NetworkParams flat = params;
  flat.beta = 2.0;
  CHECK_THROWS_AS(truncation_window_radius(flat, 0.01), DivergenceError);
  CHECK_THROWS_AS(truncation_window_radius(params, 0.0), InvalidParameter);
  CHECK_THROWS_AS(truncation_window_radius(params, 1.0), InvalidParameter);
}

TEST_CASE("ordered squared distances") {
  const std::vector<Point> pts{{3, 4}, {1, 0}, {0, 2}};
  const auto d = ordered_squared_distances(pts);
  CHECK(d == std::vector<double>{1.0, 4.0, 25.0});
}

TEST_CASE("realization validation") {
  Realization rz{{{1, 1}}, {{5, 5}}, 3.0, 10.0};
  CHECK_NOTHROW(rz.validate());
  rz.nodes.push_back({3, 0});
  CHECK_THROWS_AS(rz.validate(), InvalidParameter);
  rz.nodes.back() = {0, 0};
  CHECK_THROWS_AS(rz.validate(), InvalidParameter);
  rz.nodes.pop_back();
  rz.interferers.push_back({20, 0});
  CHECK_THROWS_AS(rz.validate(), InvalidParameter);
}

TEST_CASE("realization text round trip") {
  auto rng = derive_stream(4, {label(StreamPurpose::oracle)});
  Realization rz;
  rz.node_radius = 7.0;
  rz.window_radius = 40.0;
  rz.nodes = sample_uniform_disk(5, 7.0, rng);
  rz.interferers = sample_uniform_disk(30, 40.0, rng);
  std::stringstream text;
  write_realization(text, rz);
  const Realization back = read_realization(text);
  CHECK(back == rz);
}

TEST_CASE("realization parse errors carry the line") {
  std::istringstream bad("r=5 Rw=10\nN 1 1\nQ 2 2\n");
  try {
    read_realization(bad);
    FAIL("expected a parse error");
  } catch (const InvalidParameter& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::istringstream headless("N 1 1\n");
  CHECK_THROWS_AS(read_realization(headless), InvalidParameter);
}
