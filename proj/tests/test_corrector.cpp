#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "odlab/corrector.hpp"
#include "odlab/errors.hpp"
#include "oracles.hpp"

using namespace odlab;
using oracle::kPi;

namespace {

FourierFunction cos1() { return FourierFunction(1, {{{1, 0, 0}, 1.0, 0.0}}); }
const Potential kFlat1{FourierFunction(1)};

// f(q + s p) expanded to second order in s, from the raw terms:
// f + eps D_p f + eps^2/2 D_p^2 f.
double raw_perturbed(const std::vector<FourierTerm>& terms, std::size_t d, double eps,
                     const std::vector<double>& q, const std::vector<double>& p) {
  double out = 0.0;
  for (const auto& t : terms) {
    double th = 0.0, s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      th += 2 * kPi * t.k[i] * q[i];
      s += 2 * kPi * t.k[i] * p[i];
    }
    const double c = std::cos(th), sn = std::sin(th);
    out += t.cos_coef * c + t.sin_coef * sn;
    out += eps * s * (t.sin_coef * c - t.cos_coef * sn);
    out -= 0.5 * eps * eps * s * s * (t.cos_coef * c + t.sin_coef * sn);
  }
  return out;
}

struct Sample {
  std::vector<double> q, p;
  double eps, beta;
};

Sample random_sample(std::mt19937_64& rng, std::size_t d) {
  std::uniform_real_distribution<double> ue(0.01, 1.0), ub(0.5, 4.0);
  return {oracle::random_point(rng, d), oracle::random_point(rng, d, -5.0, 5.0), ue(rng), ub(rng)};
}

}  // namespace

TEST(Perturb, VanishesAtZeroMomentum) {
  const auto fe = perturb(TestFunction(cos1()), 0.3);
  for (double x : {0.0, 0.1, 0.77}) EXPECT_EQ(fe.value(wrap(Vec{x}), Vec{0.0}), std::cos(2 * kPi * x));
}

TEST(Perturb, HandValues) {
  const auto fe = perturb(TestFunction(cos1()), 0.1);
  // 1 + 0.1 * 0 + (0.01 / 2) * (-4 pi^2)
  EXPECT_NEAR(fe.value(wrap(Vec{0.0}), Vec{1.0}), 1 - 0.02 * kPi * kPi, 1e-13);
  EXPECT_NEAR(fe.value(wrap(Vec{0.25}), Vec{2.0}), -0.4 * kPi, 1e-13);
}

TEST(Perturb, MatchesRawSecondOrderExpansion) {
  std::mt19937_64 rng(21);
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto terms = oracle::random_terms(rng, d, 5, 3);
    const auto fe = perturb(TestFunction(FourierFunction(d, terms)), 0.37);
    for (int n = 0; n < 50; ++n) {
      const auto s = random_sample(rng, d);
      const double expected = raw_perturbed(terms, d, 0.37, s.q, s.p);
      EXPECT_NEAR(fe.value(oracle::at(s.q), oracle::vec(s.p)), expected, 1e-11 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST(Perturb, RejectsNonPositiveEps) {
  EXPECT_THROW(perturb(TestFunction(cos1()), 0.0), ValidationError);
  EXPECT_THROW(perturb(TestFunction(cos1()), -1.0), ValidationError);
}

TEST(LangevinGenerator, PositionOnlyFunction) {
  std::mt19937_64 rng(22);
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto f = oracle::random_fourier(rng, d);
    const Potential v(oracle::random_fourier(rng, d));
    const auto s = random_sample(rng, d);
    const auto q = oracle::at(s.q);
    const auto p = oracle::vec(s.p);
    const double got = apply_langevin_generator(PositionFunction(f), v, s.eps, s.beta, q, p);
    EXPECT_NEAR(got, dot(p, f.gradient(q)) / s.eps, 1e-12 * std::abs(got) + 1e-12);
  }
}

TEST(LangevinGenerator, HamiltonianDrift) {
  std::mt19937_64 rng(23);
  for (std::size_t d = 1; d <= 3; ++d) {
    const Potential v(oracle::random_fourier(rng, d));
    const auto s = random_sample(rng, d);
    const auto p = oracle::vec(s.p);
    const double got = apply_langevin_generator(HamiltonianFunction(v), v, s.eps, s.beta, oracle::at(s.q), p);
    const double expected = (-norm_sq(p) + d / s.beta) / (s.eps * s.eps);
    EXPECT_NEAR(got, expected, 1e-12 * std::abs(expected));
  }
}

TEST(LangevinGenerator, PerturbedFunctionMatchesFiniteDifferences) {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> ue(0.1, 1.0);
  for (std::size_t d = 1; d <= 3; ++d) {
    for (int n = 0; n < 30; ++n) {
      const auto terms = oracle::random_terms(rng, d, 3, 2);
      const auto vterms = oracle::random_terms(rng, d, 3, 2);
      const TestFunction f(FourierFunction(d, terms));
      const Potential v(FourierFunction(d, vterms));
      const double eps = ue(rng);
      const double beta = 1.7;
      const auto q = oracle::random_point(rng, d);
      const auto p = oracle::random_point(rng, d, -2.0, 2.0);
      const auto g = [&](const std::vector<double>& x, const std::vector<double>& y) {
        return raw_perturbed(terms, d, eps, x, y);
      };
      const oracle::ScalarField pot = [&](const std::vector<double>& x) { return oracle::eval_raw(vterms, d, x); };
      const double fd = oracle::fd_langevin_generator(g, pot, eps, beta, q, p, 1e-4);
      const double got = apply_langevin_generator(perturb(f, eps), v, eps, beta, oracle::at(q), oracle::vec(p));
      EXPECT_LE(oracle::rel_err(got, fd), 1e-5) << "d=" << d << " got " << got << " fd " << fd;
    }
  }
}

TEST(OverdampedGenerator, HandValues) {
  const TestFunction f(cos1());
  for (double x : {0.0, 0.1, 0.3}) {
    EXPECT_NEAR(apply_overdamped_generator(f, kFlat1, 1.0, wrap(Vec{x})), -4 * kPi * kPi * std::cos(2 * kPi * x),
                1e-11);
  }
  EXPECT_EQ(apply_overdamped_generator(TestFunction(FourierFunction::constant(1, 3.0)), Potential(cos1()), 1.0,
                                       wrap(Vec{0.4})),
            0.0);
  EXPECT_NEAR(apply_overdamped_generator(f, Potential(cos1()), 1.0, wrap(Vec{0.25})), -4 * kPi * kPi, 1e-11);
}

TEST(OverdampedGenerator, MatchesFiniteDifferences) {
  std::mt19937_64 rng(25);
  for (std::size_t d = 1; d <= 3; ++d) {
    for (int n = 0; n < 30; ++n) {
      const auto terms = oracle::random_terms(rng, d, 4, 2);
      const auto vterms = oracle::random_terms(rng, d, 4, 2);
      const oracle::ScalarField f = [&](const std::vector<double>& x) { return oracle::eval_raw(terms, d, x); };
      const oracle::ScalarField v = [&](const std::vector<double>& x) { return oracle::eval_raw(vterms, d, x); };
      const auto q = oracle::random_point(rng, d);
      const double fd = oracle::fd_overdamped_generator(f, v, 0.8, q, 1e-4);
      const double got = apply_overdamped_generator(TestFunction(FourierFunction(d, terms)),
                                                    Potential(FourierFunction(d, vterms)), 0.8, oracle::at(q));
      EXPECT_LE(oracle::rel_err(got, fd), 1e-5);
    }
  }
}

TEST(ResidualR1, Values) {
  const TestFunction f(cos1());
  EXPECT_EQ(residual_R1(f, 0.1, wrap(Vec{0.3}), Vec{0.0}), 0.0);
  EXPECT_NEAR(residual_R1(f, 0.1, wrap(Vec{0.0}), Vec{1.0}), 0.02 * kPi * kPi, 1e-13);
  EXPECT_NEAR(residual_R1(f, 0.1, wrap(Vec{0.25}), Vec{2.0}), 0.4 * kPi, 1e-13);
}

TEST(ResidualR1, DoublingEpsScalesBetweenTwoAndFour) {
  std::mt19937_64 rng(26);
  int checked = 0;
  for (int n = 0; n < 2000; ++n) {
    const auto f = oracle::random_fourier(rng, 2);
    const auto s = random_sample(rng, 2);
    const auto q = oracle::at(s.q);
    const auto p = oracle::vec(s.p);
    const auto b = f.derivatives(q, 2);
    const double lin = dot(p, b.gradient), quad = 0.5 * b.hessian_form(p, p);
    if (lin * quad <= 0.0) continue;  // the claim needs both terms of one sign
    const TestFunction tf(f);
    const double ratio = residual_R1(tf, 2 * s.eps, q, p) / residual_R1(tf, s.eps, q, p);
    EXPECT_GE(ratio, 2.0 - 1e-12);
    EXPECT_LE(ratio, 4.0 + 1e-12);
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(ResidualR2, HandValues) {
  const TestFunction f(cos1());
  EXPECT_NEAR(residual_R2(f, kFlat1, kFlat1, 0.3, 1.0, wrap(Vec{0.0}), Vec{1.0}), 0.0, 1e-10);
  for (double eps : {0.05, 0.1, 0.7})
    EXPECT_NEAR(residual_R2(f, kFlat1, kFlat1, eps, 1.0, wrap(Vec{0.25}), Vec{1.0}), 4 * kPi * kPi * kPi * eps,
                1e-10);
  const Potential v(cos1());
  EXPECT_NEAR(residual_R2(f, v, v, 0.1, 1.0, wrap(Vec{0.25}), Vec{1.0}), 0.4 * kPi * kPi * kPi, 1e-10);
}

TEST(ResidualR2, LinearInEpsWhenPotentialsCoincide) {
  std::mt19937_64 rng(27);
  for (std::size_t d = 1; d <= 3; ++d) {
    for (int n = 0; n < 50; ++n) {
      const TestFunction f(oracle::random_fourier(rng, d));
      const Potential v(oracle::random_fourier(rng, d));
      const auto s = random_sample(rng, d);
      const double r1 = residual_R2(f, v, v, s.eps, s.beta, oracle::at(s.q), oracle::vec(s.p));
      const double r2 = residual_R2(f, v, v, 2 * s.eps, s.beta, oracle::at(s.q), oracle::vec(s.p));
      if (r1 > 1e-8) EXPECT_NEAR(r2 / r1, 2.0, 1e-12);
    }
  }
}

TEST(GeneratorDifference, DirectMatchesClosedForm) {
  std::mt19937_64 rng(28);
  for (std::size_t d = 1; d <= 3; ++d) {
    for (int nf = 0; nf < 5; ++nf) {
      const TestFunction f(oracle::random_fourier(rng, d, 4, 3));
      const Potential v(oracle::random_fourier(rng, d, 4, 3));
      const Potential v_eps(v.function() + oracle::random_fourier(rng, d, 2, 4).scaled(0.2));
      for (int n = 0; n < 200; ++n) {
        const auto s = random_sample(rng, d);
        const auto r = generator_difference(f, v, v_eps, s.eps, s.beta, oracle::at(s.q), oracle::vec(s.p));
        EXPECT_LE(std::abs(r.direct - r.closed_form), 1e-9);
      }
    }
  }
}

TEST(GeneratorDifference, PotentialMismatchTerm) {
  // eps -> 0 leaves (grad V - grad V_eps) . grad f.
  const TestFunction f(cos1());
  const Potential v(cos1());
  const Potential v_eps(FourierFunction(1, {{{1, 0, 0}, 1.0, 0.0}, {{3, 0, 0}, 0.1, 0.0}}));
  const auto q = wrap(Vec{0.2});
  const double expected = dot(v.gradient(q) - v_eps.gradient(q), f.function().gradient(q));
  EXPECT_NEAR(closed_form_difference(f, v, v_eps, 1e-12, q, Vec{1.0}), expected, 1e-9);
}

TEST(Cancellations, OrderMinusOneVanishes) {
  std::mt19937_64 rng(29);
  for (std::size_t d = 1; d <= 3; ++d) {
    for (int n = 0; n < 200; ++n) {
      const TestFunction f(oracle::random_fourier(rng, d));
      const auto s = random_sample(rng, d);
      EXPECT_NEAR(order_minus_one_terms(f, s.beta, oracle::at(s.q), oracle::vec(s.p)), 0.0, 1e-12);
    }
  }
}

TEST(Cancellations, OrderZeroIsOverdampedGenerator) {
  std::mt19937_64 rng(30);
  for (std::size_t d = 1; d <= 3; ++d) {
    for (int n = 0; n < 200; ++n) {
      const TestFunction f(oracle::random_fourier(rng, d, 3, 2));
      const Potential v(oracle::random_fourier(rng, d, 3, 2));
      const auto s = random_sample(rng, d);
      const auto q = oracle::at(s.q);
      const auto p = oracle::vec(s.p);
      EXPECT_NEAR(order_zero_terms(f, v, s.beta, q, p), apply_overdamped_generator(f, v, s.beta, q), 1e-10);
    }
  }
}

TEST(Corrector, SecondOrderCorrectorIsBetaFree) {
  std::mt19937_64 rng(31);
  const TestFunction f(oracle::random_fourier(rng, 2));
  const auto fe = perturb(f, 0.2);
  const auto q = wrap(Vec{0.3, 0.6});
  const Vec p{1.2, -0.4};
  EXPECT_NEAR(fe.g2(q, p), 0.5 * f.function().derivatives(q, 2).hessian_form(p, p), 1e-14);
  EXPECT_NEAR(fe.g1(q, p), dot(p, f.function().gradient(q)), 1e-14);
}
