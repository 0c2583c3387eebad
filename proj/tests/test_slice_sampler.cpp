#include <doctest.h>

#include <cmath>
#include <limits>

#include "ta2s2/error.hpp"
#include "ta2s2/slice_sampler.hpp"
#include "ta2s2/tmcmc.hpp"

using namespace ta2s2;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector scalar(double x) { return Vector::Constant(1, x); }

LevelContext gaussian_context(std::size_t n_markers, double p_renew, Rng& rng) {
  std::normal_distribution<double> normal;
  std::vector<Vector> markers;
  std::vector<double> H;
  for (std::size_t i = 0; i < n_markers; ++i) {
    const double x = normal(rng);
    markers.push_back(scalar(x));
    H.push_back(0.5 * x * x);
  }
  return LevelContext(markers, H, 1.0, Matrix::Identity(1, 1), default_spread(1), p_renew, 100);
}

}  // namespace

TEST_CASE("slice level") {
  CHECK(slice_level_from_uniform(3.5, 2.0, 0.0) == 3.5);
  Rng rng(11);
  const double tau = 0.7;
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = draw_slice_level(1.0, tau, rng) - 1.0;
    CHECK_FALSE(e < 0.0);
    sum += e;
    sum2 += e * e;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::abs(mean - tau) < 3.0 * se);
}

TEST_CASE("slice membership is strict") {
  CHECK_FALSE(in_slice(kInf, 10.0));
  CHECK(in_slice(1.0, 1.0 + 1e-9));
  CHECK_FALSE(in_slice(2.0, 2.0));
}

TEST_CASE("marker index set") {
  const std::vector<double> H{1.0, 2.0, 3.0};
  CHECK(marker_index_set(H, 0.5).empty());
  CHECK(marker_index_set(H, 10.0) == std::vector<std::size_t>{0, 1, 2});
  CHECK(marker_index_set(H, 2.5) == std::vector<std::size_t>{0, 1});
  CHECK(marker_index_set(H, 2.0) == std::vector<std::size_t>{0});
}

TEST_CASE("crumb rules") {
  std::vector<Vector> markers{scalar(10.0), scalar(20.0), scalar(30.0)};
  const std::vector<double> H{0.0, 0.0, 0.0};
  Rng rng(5);

  const LevelContext always(markers, H, 1.0, Matrix::Identity(1, 1), 0.5, 1.0, 100);
  const std::vector<std::size_t> all{0, 1, 2};
  for (int i = 0; i < 200; ++i) {
    bool renewed = false;
    const Vector c = draw_crumb(always, scalar(0.0), all, rng, &renewed);
    CHECK(renewed);
    CHECK(std::abs(c(0)) < 5.0);
  }

  const LevelContext never(markers, H, 1.0, Matrix::Identity(1, 1), 0.5, 0.0, 100);
  const std::vector<std::size_t> only{1};
  for (int i = 0; i < 20; ++i) CHECK(draw_crumb(never, scalar(0.0), only, rng)(0) == 20.0);

  Matrix sigma(2, 2);
  sigma << 2.0, 0.6, 0.6, 0.5;
  std::vector<Vector> m2{Vector::Zero(2)};
  const double c0 = 1.3;
  const LevelContext empty_j(m2, {0.0}, 1.0, sigma, c0, 0.0, 100);
  const int n = 10000;
  Matrix acc = Matrix::Zero(2, 2);
  Vector mean = Vector::Zero(2);
  std::vector<Vector> draws;
  for (int i = 0; i < n; ++i) {
    draws.push_back(draw_crumb(empty_j, Vector::Zero(2), {}, rng));
    mean += draws.back();
  }
  mean /= n;
  for (const auto& d : draws) acc += (d - mean) * (d - mean).transpose();
  acc /= n - 1;
  const Matrix expected = c0 * c0 * sigma;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(acc(i, j) - expected(i, j)) <= 0.1 * std::abs(expected(i, j)));
}

TEST_CASE("candidate centre") {
  const std::vector<Vector> one{scalar(4.0)};
  CHECK(candidate_centre(scalar(1.0), one)(0) == 4.0);
  const std::vector<Vector> two{scalar(2.0), scalar(4.0)};
  CHECK(candidate_centre(scalar(0.0), two)(0) == doctest::Approx(1.5));
  std::vector<Vector> many(1000, scalar(100.0));
  CHECK(candidate_centre(scalar(0.0), many)(0) == doctest::Approx(0.1));
  CHECK_THROWS_AS(candidate_centre(scalar(0.0), std::vector<Vector>{}), DomainError);
}

TEST_CASE("flat target accepts the first candidate") {
  Rng rng(3);
  const LevelContext ctx({scalar(0.0)}, {0.0}, 1.0, Matrix::Identity(1, 1), 1.0, 0.1, 100);
  const Objective flat = [](const Vector&) { return 0.0; };
  SliceState s{scalar(0.0), 0.0, 0.0};
  for (int i = 0; i < 100; ++i) {
    StepStats st;
    s = advance_chain(ctx, s, flat, rng, &st);
    CHECK(st.crumbs == 1);
    CHECK_FALSE(st.stalled);
  }
}

TEST_CASE("standard Gaussian moments") {
  Rng rng(2024);
  const LevelContext ctx = gaussian_context(2000, RunConfig{}.p_renew, rng);
  const Objective H = [](const Vector& x) { return 0.5 * x.squaredNorm(); };
  SliceState s{scalar(0.0), 0.0, 0.0};
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    s = advance_chain(ctx, s, H, rng);
    CHECK(s.z > s.H_current);
    sum += s.current(0);
    sum2 += s.current(0) * s.current(0);
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(sum2 / n - mean * mean - 1.0) < 0.05);
}

TEST_CASE("states never leave the support") {
  Rng rng(8);
  const LevelContext ctx({scalar(6.5), scalar(-6.5), scalar(0.0)}, {0.0, 0.0, 0.0}, 1.0, Matrix::Identity(1, 1) * 16.0,
                         3.0, 0.5, 100);
  const Objective boxed = [](const Vector& x) { return std::abs(x(0)) <= 7.0 ? 0.0 : kInf; };
  SliceState s{scalar(6.9), 0.0, 0.0};
  for (int i = 0; i < 20000; ++i) {
    s = advance_chain(ctx, s, boxed, rng);
    CHECK(std::abs(s.current(0)) <= 7.0);
  }
}

TEST_CASE("stall returns the state unchanged") {
  Rng rng(4);
  const LevelContext ctx({scalar(0.0)}, {kInf}, 1.0, Matrix::Identity(1, 1), 1.0, 0.1, 5);
  const Objective nowhere = [](const Vector&) { return kInf; };
  const SliceState s{scalar(0.25), 0.0, 0.0};
  StepStats st;
  const auto out = advance_chain(ctx, s, nowhere, rng, &st);
  CHECK(st.stalled);
  CHECK(st.crumbs == 5);
  CHECK(out.current(0) == 0.25);
  CHECK(out.H_current == 0.0);
}

TEST_CASE("level context regularisation") {
  const LevelContext zero({scalar(1.0)}, {0.0}, 1.0, Matrix::Zero(1, 1), 1.0, 0.1, 10);
  CHECK(zero.sigma_factor()(0, 0) > 0.9);
  Matrix indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;
  const LevelContext bad({Vector::Zero(2)}, {0.0}, 1.0, indefinite, 1.0, 0.1, 10);
  CHECK(bad.diagonal_fallback());
  CHECK_THROWS_AS(LevelContext({}, {}, 1.0, Matrix::Identity(1, 1), 1.0, 0.1, 10), ConfigError);
  CHECK_THROWS_AS(LevelContext({scalar(0.0)}, {0.0}, 1.0, Matrix::Identity(1, 1), 1.0, 1.5, 10), ConfigError);
  CHECK(default_spread(4) == doctest::Approx(1.19));
}
