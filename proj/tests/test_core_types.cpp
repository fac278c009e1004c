#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "odlab/errors.hpp"
#include "odlab/fourier.hpp"
#include "odlab/torus.hpp"
#include "oracles.hpp"

using namespace odlab;
using oracle::kPi;

namespace {

FourierFunction cos1() { return FourierFunction(1, {{{1, 0, 0}, 1.0, 0.0}}); }

}  // namespace

TEST(Wrap, ReducesModOne) {
  EXPECT_DOUBLE_EQ(wrap(Vec{1.25})[0], 0.25);
  EXPECT_DOUBLE_EQ(wrap(Vec{-0.5})[0], 0.5);
  const auto q = wrap(Vec{0.0, 0.999});
  EXPECT_EQ(q[0], 0.0);
  EXPECT_EQ(q[1], 0.999);
}

TEST(Wrap, RejectsNonFinite) {
  EXPECT_THROW(wrap(Vec{std::nan("")}), ValidationError);
  EXPECT_THROW(wrap(Vec{0.1, std::numeric_limits<double>::infinity()}), ValidationError);
  EXPECT_THROW(wrap(Vec{}), ValidationError);
}

TEST(Wrap, StaysInUnitIntervalAndTracksShift) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int n = 0; n < 20000; ++n) {
    std::vector<double> x{u(rng), u(rng) * 1e-17, -1e-18};
    const auto r = wrap_with_shift(Vec::from(x));
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_GE(r.q[i], 0.0);
      EXPECT_LT(r.q[i], 1.0);
      EXPECT_EQ(r.shift[i], std::floor(r.shift[i]));
      EXPECT_NEAR(r.q[i] + r.shift[i], x[i], 1e-13 * std::max(1.0, std::abs(x[i])));
    }
  }
}

TEST(Vec, RejectsBadDimension) {
  EXPECT_THROW(Vec(0), ValidationError);
  EXPECT_THROW(Vec(4), ValidationError);
  EXPECT_NO_THROW(Vec(3));
}

TEST(Fourier, CosineAtZero) {
  const auto b = eval_derivatives(cos1(), wrap(Vec{0.0}), 3);
  EXPECT_DOUBLE_EQ(b.value, 1.0);
  EXPECT_NEAR(b.gradient[0], 0.0, 1e-15);
  EXPECT_NEAR(b.hessian[0][0], -4 * kPi * kPi, 1e-12);
  EXPECT_NEAR(b.third[0][0][0], 0.0, 1e-12);
}

TEST(Fourier, CosineAtQuarter) {
  const auto b = eval_derivatives(cos1(), wrap(Vec{0.25}), 3);
  EXPECT_NEAR(b.value, 0.0, 1e-15);
  EXPECT_NEAR(b.gradient[0], -2 * kPi, 1e-12);
  EXPECT_NEAR(b.hessian[0][0], 0.0, 1e-12);
  EXPECT_NEAR(b.third[0][0][0], 8 * kPi * kPi * kPi, 1e-10);
}

TEST(Fourier, CosineMatchesFiniteDifferencesAtTenth) {
  const auto f = cos1();
  const oracle::ScalarField g = [&](const std::vector<double>& x) { return f.value(oracle::at(x)); };
  const std::vector<double> x{0.1};
  const auto b = eval_derivatives(f, oracle::at(x), 1);
  EXPECT_LE(oracle::rel_err(b.gradient[0], oracle::fd_partial(g, x, 0, 1e-5), 0.0), 1e-6);
  EXPECT_NEAR(b.value, std::cos(0.2 * kPi), 1e-15);
}

TEST(Fourier, OrderLimitsTensors) {
  const auto b = eval_derivatives(cos1(), wrap(Vec{0.1}), 1);
  EXPECT_EQ(b.hessian[0][0], 0.0);
  EXPECT_EQ(b.third[0][0][0], 0.0);
  EXPECT_THROW(eval_derivatives(cos1(), wrap(Vec{0.1}), 4), ValidationError);
  EXPECT_THROW(eval_derivatives(cos1(), wrap(Vec{0.1, 0.2}), 0), ValidationError);
}

TEST(Fourier, MatchesDirectSumOfRawTerms) {
  std::mt19937_64 rng(2);
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto terms = oracle::random_terms(rng, d, 6, 3);
    const FourierFunction f(d, terms);
    for (int n = 0; n < 50; ++n) {
      const auto x = oracle::random_point(rng, d, -3.0, 3.0);
      EXPECT_NEAR(f.value(oracle::at(x)), oracle::eval_raw(terms, d, x), 1e-12);
    }
  }
}

TEST(Fourier, Periodic) {
  std::mt19937_64 rng(3);
  for (std::size_t d = 1; d <= 3; ++d) {
    for (int n = 0; n < 20; ++n) {
      const auto f = oracle::random_fourier(rng, d, 5, 4);
      auto x = oracle::random_point(rng, d);
      for (std::size_t i = 0; i < d; ++i) {
        auto y = x;
        y[i] += 1.0;
        EXPECT_LE(std::abs(f.value(oracle::at(x)) - f.value(oracle::at(y))), 1e-12);
      }
    }
  }
}

TEST(Fourier, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(4);
  for (std::size_t d = 1; d <= 3; ++d) {
    for (int n = 0; n < 10; ++n) {
      const auto f = oracle::random_fourier(rng, d, 4, 2);
      // Evaluate at unwrapped points so the oracle never relies on wrap().
      const auto terms = std::vector<FourierTerm>(f.terms().begin(), f.terms().end());
      const oracle::ScalarField g = [&](const std::vector<double>& y) { return oracle::eval_raw(terms, d, y); };
      const auto x = oracle::random_point(rng, d);
      const auto b = eval_derivatives(f, oracle::at(x), 3);

      double gscale = 1.0, hscale = 1.0, tscale = 1.0;
      for (std::size_t i = 0; i < d; ++i) {
        gscale = std::max(gscale, std::abs(b.gradient[i]));
        for (std::size_t j = 0; j < d; ++j) {
          hscale = std::max(hscale, std::abs(b.hessian[i][j]));
          for (std::size_t k = 0; k < d; ++k) tscale = std::max(tscale, std::abs(b.third[i][j][k]));
        }
      }
      for (std::size_t i = 0; i < d; ++i) {
        EXPECT_LE(std::abs(b.gradient[i] - oracle::fd_partial(g, x, i, 1e-5)) / gscale, 1e-5);
        for (std::size_t j = 0; j < d; ++j) {
          EXPECT_LE(std::abs(b.hessian[i][j] - oracle::fd_second(g, x, i, j, 1e-4)) / hscale, 1e-5);
          for (std::size_t k = 0; k < d; ++k) {
            // Nested central differences at h and h/2, Richardson-combined.
            const double coarse = oracle::fd_third(g, x, i, j, k, 1e-3);
            const double fine = oracle::fd_third(g, x, i, j, k, 5e-4);
            const double fd = (4.0 * fine - coarse) / 3.0;
            EXPECT_LE(std::abs(b.third[i][j][k] - fd) / tscale, 1e-5) << "d=" << d << " ijk=" << i << j << k;
          }
        }
      }
    }
  }
}

TEST(Fourier, TensorsAreSymmetric) {
  std::mt19937_64 rng(5);
  const auto f = oracle::random_fourier(rng, 3, 8, 3);
  const auto b = eval_derivatives(f, oracle::at(oracle::random_point(rng, 3)), 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_EQ(b.hessian[i][j], b.hessian[j][i]);
      for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(b.third[i][j][k], b.third[j][i][k]);
        EXPECT_EQ(b.third[i][j][k], b.third[k][j][i]);
        EXPECT_EQ(b.third[i][j][k], b.third[i][k][j]);
      }
    }
}

TEST(Fourier, Linear) {
  std::mt19937_64 rng(6);
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto f = oracle::random_fourier(rng, d);
    const auto g = oracle::random_fourier(rng, d);
    const double a = 0.7, c = -1.3;
    const auto h = f.scaled(a) + g.scaled(c);
    const auto q = oracle::at(oracle::random_point(rng, d));
    const auto bf = eval_derivatives(f, q, 3), bg = eval_derivatives(g, q, 3), bh = eval_derivatives(h, q, 3);
    EXPECT_NEAR(bh.value, a * bf.value + c * bg.value, 1e-12);
    for (std::size_t i = 0; i < d; ++i) {
      EXPECT_NEAR(bh.gradient[i], a * bf.gradient[i] + c * bg.gradient[i], 1e-12 * 40);
      for (std::size_t j = 0; j < d; ++j) {
        EXPECT_NEAR(bh.hessian[i][j], a * bf.hessian[i][j] + c * bg.hessian[i][j], 1e-12 * 400);
        for (std::size_t k = 0; k < d; ++k)
          EXPECT_NEAR(bh.third[i][j][k], a * bf.third[i][j][k] + c * bg.third[i][j][k], 1e-12 * 8000);
      }
    }
  }
}

TEST(Fourier, CanonicalFormMergesOppositeWaveVectors) {
  // cos is even, sin odd: 1*cos(-x) + 2*sin(-x) == cos(x) - 2 sin(x)
  const FourierFunction a(1, {{{-1, 0, 0}, 1.0, 2.0}});
  const FourierFunction b(1, {{{1, 0, 0}, 1.0, -2.0}});
  EXPECT_EQ(a, b);
  const FourierFunction merged(1, {{{1, 0, 0}, 1.0, 0.0}, {{-1, 0, 0}, 1.0, 0.0}});
  EXPECT_EQ(merged, FourierFunction(1, {{{1, 0, 0}, 2.0, 0.0}}));
  const FourierFunction cancel(1, {{{2, 0, 0}, 1.0, 0.0}, {{-2, 0, 0}, -1.0, 0.0}});
  EXPECT_TRUE(cancel.terms().empty());
}

TEST(Fourier, DilationScalesFrequencies) {
  std::mt19937_64 rng(7);
  const auto f = oracle::random_fourier(rng, 2);
  const auto g = f.dilated(3);
  for (int n = 0; n < 20; ++n) {
    const auto x = oracle::random_point(rng, 2);
    EXPECT_NEAR(g.value(oracle::at(x)), f.value(wrap(Vec{3 * x[0], 3 * x[1]})), 1e-12);
  }
  EXPECT_EQ(g.max_frequency(), 3 * f.max_frequency());
}

TEST(Fourier, TextRoundTrip) {
  std::mt19937_64 rng(8);
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto f = oracle::random_fourier(rng, d, 6, 4);
    EXPECT_EQ(FourierFunction::parse(f.to_text(), d), f);
    EXPECT_EQ(FourierFunction::parse(f.to_text(true), d), f);
  }
  const FourierFunction zero(2);
  EXPECT_EQ(FourierFunction::parse(zero.to_text(true), 2), zero);
}

TEST(Fourier, ParseAcceptsCommentsAndSeparators) {
  const auto f = FourierFunction::parse("# header\n1 1 0   # cos\n2 0 0.3; 0 0.5 0\n", 1);
  EXPECT_EQ(f, FourierFunction(1, {{{1, 0, 0}, 1.0, 0.0}, {{2, 0, 0}, 0.0, 0.3}, {{0, 0, 0}, 0.5, 0.0}}));
  EXPECT_DOUBLE_EQ(f.constant_term(), 0.5);
}

TEST(Fourier, ParseReportsEveryBadLine) {
  try {
    FourierFunction::parse("1 x 0\n1 2\n1 1 1 1\n", 1);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.violations().size(), 3u);
  }
}
