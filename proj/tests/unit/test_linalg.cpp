#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "lassoggm/linalg.hpp"
#include "lassoggm/random.hpp"
#include "lassoggm/simgen.hpp"

using namespace lassoggm;

namespace {

// Sign scan of det(C(x)) over a grid, returning the run that holds the current value.
PdInterval scan(const SymMatrix& c, Index i, Index j, double step = 1e-4) {
  Matrix m = c;
  auto det = [&](double x) {
    m(i, j) = m(j, i) = x;
    return Eigen::FullPivLU<Matrix>(m).determinant();
  };
  const long k0 = std::lround((c(i, j) + 1.0) / step);
  const long kmax = std::lround(2.0 / step);
  long lo = k0;
  while (lo > 0 && det(-1.0 + (lo - 1) * step) > 0.0) --lo;
  long hi = k0;
  while (hi < kmax && det(-1.0 + (hi + 1) * step) > 0.0) ++hi;
  return {-1.0 + lo * step, -1.0 + hi * step};
}

SymMatrix with_entry(SymMatrix c, Index i, Index j, double x) {
  c(i, j) = c(j, i) = x;
  return c;
}

}  // namespace

TEST_CASE("log_det_pd") {
  CHECK(log_det_pd(SymMatrix::Identity(3, 3)) == doctest::Approx(0.0));
  CHECK(log_det_pd(2.0 * SymMatrix::Identity(2, 2)) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-14));

  Rng rng(5);
  const SymMatrix a = random_pd_correlation(5, rng);
  const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(a).eigenvalues();
  CHECK(std::abs(log_det_pd(a) - ev.array().log().sum()) < 1e-10);

  SymMatrix bad(2, 2);
  bad << 1, 2, 2, 1;
  CHECK_THROWS_AS(log_det_pd(bad), NotPositiveDefinite);
}

TEST_CASE("log_det_pd is additive over block diagonals") {
  Rng rng(6);
  for (int t = 0; t < 20; ++t) {
    const SymMatrix a = random_pd_correlation(3, rng);
    const SymMatrix b = random_pd_correlation(4, rng);
    SymMatrix ab = SymMatrix::Zero(7, 7);
    ab.topLeftCorner(3, 3) = a;
    ab.bottomRightCorner(4, 4) = b;
    CHECK(std::abs(log_det_pd(a) + log_det_pd(b) - log_det_pd(ab)) < 1e-10);
  }
}

TEST_CASE("is_pd") {
  CHECK(is_pd(SymMatrix::Identity(4, 4), 0.0));
  SymMatrix ones = SymMatrix::Ones(2, 2);
  CHECK_FALSE(is_pd(ones, 1e-8));
  StructureSpec spec;
  spec.kind = Structure::banded;
  spec.p = 10;
  CHECK(is_pd(generate(spec), 1e-8));
}

TEST_CASE("det_quadratic reproduces the determinant") {
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const SymMatrix c = random_pd_correlation(5, rng);
    const DetQuadratic f = det_quadratic(c, 1, 3);
    for (double x : {-0.9, -0.3, 0.2, 0.77}) {
      CHECK(std::abs(f(x) - with_entry(c, 1, 3, x).determinant()) < 1e-12);
    }
  }
}

TEST_CASE("pd_interval, p = 2") {
  SymMatrix c = SymMatrix::Identity(2, 2);
  c(0, 1) = c(1, 0) = 0.3;
  const PdInterval iv = pd_interval(c, 0, 1, 0.3);
  CHECK(iv.lo == doctest::Approx(-1.0));
  CHECK(iv.hi == doctest::Approx(1.0));
}

TEST_CASE("pd_interval, p = 3 with C13 = C23 = 0.8") {
  SymMatrix c = SymMatrix::Identity(3, 3);
  c(0, 2) = c(2, 0) = 0.8;
  c(1, 2) = c(2, 1) = 0.8;
  c(0, 1) = c(1, 0) = 0.5;
  const PdInterval iv = pd_interval(c, 0, 1, c(0, 1));
  const PdInterval ref = scan(c, 0, 1);
  CHECK(std::abs(iv.lo - ref.lo) < 2e-4);
  CHECK(std::abs(iv.hi - ref.hi) < 2e-4);
  // Roots of 1 - 1.28 + 1.28x - x^2 are 0.64 -+ 0.36.
  CHECK(iv.lo == doctest::Approx(0.28));
  CHECK(iv.hi == doctest::Approx(1.0));
}

TEST_CASE("pd_interval matches the sign scan on random p = 5") {
  Rng rng(8);
  for (int t = 0; t < 25; ++t) {
    const SymMatrix c = random_pd_correlation(5, rng);
    const Index i = static_cast<Index>(rng.index(4));
    const Index j = i + 1;
    const PdInterval iv = pd_interval(c, i, j, c(i, j));
    const PdInterval ref = scan(c, i, j);
    CHECK(std::abs(iv.lo - ref.lo) < 2e-4);
    CHECK(std::abs(iv.hi - ref.hi) < 2e-4);
  }
}

TEST_CASE("pd_interval properties") {
  Rng rng(9);
  for (int t = 0; t < 40; ++t) {
    const Index p = 3 + static_cast<Index>(rng.index(4));
    const SymMatrix c = random_pd_correlation(p, rng);
    const Index i = 0;
    const Index j = p - 1;
    const DetQuadratic f = det_quadratic(c, i, j);
    const PdInterval iv = pd_interval(f, c(i, j));
    // The current value is interior.
    CHECK(iv.lo < c(i, j));
    CHECK(c(i, j) < iv.hi);
    CHECK(f(c(i, j)) > 0.0);
    const PdInterval in = shrink(iv, 1e-6);
    for (int g = 0; g <= 20; ++g) {
      const double x = in.lo + g * in.width() / 20.0;
      CHECK(is_pd(with_entry(c, i, j, x), 0.0));
    }
    if (iv.lo > -1.0 + 1e-3) CHECK_FALSE(is_pd(with_entry(c, i, j, iv.lo - 1e-3), 0.0));
    if (iv.hi < 1.0 - 1e-3) CHECK_FALSE(is_pd(with_entry(c, i, j, iv.hi + 1e-3), 0.0));
  }
}

TEST_CASE("pd_interval, upward quadratic and degenerate cases") {
  // f(x) = x^2 - 0.25 on [-1, 1]: two components; the current value picks one.
  const DetQuadratic up{1.0, 0.0, -0.25};
  PdInterval a = pd_interval(up, 0.8);
  CHECK(a.lo == doctest::Approx(0.5));
  CHECK(a.hi == doctest::Approx(1.0));
  a = pd_interval(up, -0.7);
  CHECK(a.lo == doctest::Approx(-1.0));
  CHECK(a.hi == doctest::Approx(-0.5));

  // Linear: f(x) = 0.5 + x, positive on (-0.5, 1].
  const PdInterval lin = pd_interval(DetQuadratic{0.0, 1.0, 0.5}, 0.1);
  CHECK(lin.lo == doctest::Approx(-0.5));
  CHECK(lin.hi == doctest::Approx(1.0));

  CHECK_THROWS_AS(pd_interval(DetQuadratic{-1.0, 0.0, -0.1}), NoValidInterval);
}

TEST_CASE("shrink") {
  const PdInterval s = shrink(PdInterval{-1.0, 1.0}, 1e-8);
  CHECK(s.lo == doctest::Approx(-1.0 + 1e-8));
  CHECK(s.hi == doctest::Approx(1.0 - 1e-8));
  const PdInterval tiny = shrink(PdInterval{0.1, 0.1 + 1e-9}, 1e-8);
  CHECK(tiny.lo == tiny.hi);
}

TEST_CASE("to_correlation and inverse_pd") {
  SymMatrix m(2, 2);
  m << 4, 1, 1, 9;
  const SymMatrix c = to_correlation(m);
  CHECK(c(0, 0) == doctest::Approx(1.0));
  CHECK(c(0, 1) == doctest::Approx(1.0 / 6.0));
  CHECK((inverse_pd(m) * m - Matrix::Identity(2, 2)).norm() < 1e-12);
}
