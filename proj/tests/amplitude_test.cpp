#include "dualprob/amplitude.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

using namespace dualprob;

namespace {

constexpr double kPi = std::numbers::pi;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Amplitude random_amplitude(std::mt19937_64& gen, double max_mag = 1.0) {
  std::uniform_real_distribution<double> mag(0.0, max_mag);
  std::uniform_real_distribution<double> ph(-kPi, kPi);
  return Amplitude::polar(mag(gen), ph(gen));
}

}  // namespace

TEST(Amplitude, RejectsNonFiniteComponents) {
  const double inf = std::numeric_limits<double>::infinity();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Amplitude(inf, 0.0), domain_error);
  EXPECT_THROW(Amplitude(0.0, nan), domain_error);
  EXPECT_THROW(Amplitude::polar(-1.0, 0.0), domain_error);
}

TEST(Amplitude, PhaseIsCanonical) {
  EXPECT_DOUBLE_EQ(Amplitude(-1.0, 0.0).phase(), kPi);
  EXPECT_DOUBLE_EQ(Amplitude(-1.0, -0.0).phase(), kPi);
  EXPECT_DOUBLE_EQ(Amplitude(0.0, -1.0).phase(), -kPi / 2);
  EXPECT_DOUBLE_EQ(Amplitude(0.0, 0.0).phase(), 0.0);
  EXPECT_DOUBLE_EQ(Amplitude(3.0, 4.0).magnitude(), 5.0);
}

TEST(Conjugate, Examples) {
  EXPECT_EQ(conjugate({0.6, 0.8}), Amplitude(0.6, -0.8));
  EXPECT_EQ(conjugate({1.0, 0.0}), Amplitude(1.0, 0.0));
  EXPECT_EQ(conjugate({0.0, 1.0}), Amplitude(0.0, -1.0));
}

TEST(Conjugate, IsAnExactInvolution) {
  std::mt19937_64 gen(11);
  for (int k = 0; k < 1000; ++k) {
    const auto a = random_amplitude(gen, 10.0);
    const auto back = conjugate(conjugate(a));
    EXPECT_EQ(back.re(), a.re());
    EXPECT_EQ(back.im(), a.im());
    EXPECT_EQ(conjugate(a).magnitude(), a.magnitude());
  }
}

TEST(DualityProbability, Examples) {
  EXPECT_NEAR(duality_probability({0.6, 0.8}).value(), 1.0, 1e-15);
  EXPECT_EQ(duality_probability({0.0, 0.0}).value(), 0.0);
  EXPECT_NEAR(duality_probability(Amplitude::polar(kInvSqrt2, kPi / 7)).value(), 0.5, 1e-15);
}

TEST(DualityProbability, BornPositivityAndPhaseInvariance) {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> rot(-kPi, kPi);
  for (int k = 0; k < 10000; ++k) {
    const auto a = random_amplitude(gen, 5.0);
    const double p = duality_probability(a).value();
    ASSERT_GE(p, 0.0);
    const long double ref = static_cast<long double>(a.re()) * a.re() +
                            static_cast<long double>(a.im()) * a.im();
    if (ref > 0) {
      ASSERT_LE(std::abs((p - ref) / ref), 1e-15L);
    }
    const auto rotated = a * Amplitude::polar(1.0, rot(gen));
    if (p > 0) {
      ASSERT_LE(std::abs(duality_probability(rotated).value() - p) / p, 1e-15);
    }
  }
}

TEST(DualityProbability, SubjectiveTimesObjectiveIsReal) {
  // A_s * A_o formed as a literal complex product leaves no imaginary part
  // beyond rounding; the library's re^2 + im^2 form leaves none at all.
  std::mt19937_64 gen(13);
  for (int k = 0; k < 1000; ++k) {
    const auto a = random_amplitude(gen);
    const auto prod = conjugate(a) * a;
    EXPECT_NEAR(prod.im(), 0.0, 1e-16);
    EXPECT_NEAR(prod.re(), duality_probability(a).value(), 1e-15);
  }
}

TEST(CombineExclusive, Examples) {
  const std::vector<Amplitude> ab{{1, 0}, {0, 1}};
  EXPECT_EQ(combine_exclusive(ab), Amplitude(1, 1));

  const Amplitude a{0.3, -0.7};
  const std::vector<Amplitude> with_zero{a, {0, 0}};
  EXPECT_EQ(combine_exclusive(with_zero), a);

  const std::vector<Amplitude> cancel{{kInvSqrt2, 0}, {-kInvSqrt2, 0}};
  EXPECT_EQ(combine_exclusive(cancel), Amplitude(0, 0));
  EXPECT_EQ(duality_probability(combine_exclusive(cancel)).value(), 0.0);
}

TEST(CombineExclusive, EmptyListIsUsageError) {
  EXPECT_THROW(combine_exclusive({}), usage_error);
  EXPECT_THROW(combine_independent({}), usage_error);
}

TEST(CombineExclusive, SumsInListOrder) {
  // (1e16 + 1) - 1e16 loses the 1 when summed left to right.
  const std::vector<Amplitude> v{{1e16, 0}, {1.0, 0}, {-1e16, 0}};
  EXPECT_EQ(combine_exclusive(v).re(), 0.0);
  const std::vector<Amplitude> w{{1e16, 0}, {-1e16, 0}, {1.0, 0}};
  EXPECT_EQ(combine_exclusive(w).re(), 1.0);
}

TEST(CombineIndependent, Examples) {
  const std::vector<Amplitude> halves{Amplitude::polar(kInvSqrt2, 0.4),
                                      Amplitude::polar(kInvSqrt2, -1.1)};
  const auto prod = combine_independent(halves);
  EXPECT_NEAR(prod.magnitude(), 0.5, 1e-15);
  EXPECT_NEAR(duality_probability(prod).value(), 0.25, 1e-15);

  const Amplitude a{0.2, 0.9};
  const std::vector<Amplitude> with_one{a, {1, 0}};
  EXPECT_EQ(combine_independent(with_one), a);

  const std::vector<Amplitude> polar{Amplitude::polar(0.5, kPi / 3), Amplitude::polar(0.5, kPi / 6)};
  const auto q = combine_independent(polar);
  EXPECT_NEAR(q.magnitude(), 0.25, 1e-15);
  EXPECT_NEAR(q.phase(), kPi / 2, 1e-15);
}

TEST(CombineIndependent, ProductRule) {
  std::mt19937_64 gen(14);
  std::uniform_int_distribution<int> len(1, 6);
  for (int k = 0; k < 2000; ++k) {
    std::vector<Amplitude> v(static_cast<std::size_t>(len(gen)));
    double expected = 1.0;
    for (auto& a : v) {
      a = random_amplitude(gen, 2.0);
      expected *= duality_probability(a).value();
    }
    const double got = duality_probability(combine_independent(v)).value();
    if (expected > 0) {
      ASSERT_LE(std::abs(got - expected) / expected, 1e-12);
    }
  }
}

TEST(InterferenceTerm, Examples) {
  const auto a = Amplitude::polar(kInvSqrt2, 0.3);
  EXPECT_NEAR(interference_term(a, Amplitude::polar(kInvSqrt2, 0.3 + kPi / 2)).value, 0.0, 1e-15);
  EXPECT_NEAR(interference_term(a, Amplitude::polar(kInvSqrt2, 0.3)).value, 1.0, 1e-15);
  EXPECT_NEAR(interference_term(a, Amplitude::polar(kInvSqrt2, 0.3 + kPi)).value, -1.0, 1e-15);
}

TEST(InterferenceTerm, MatchesCosineForm) {
  std::mt19937_64 gen(15);
  for (int k = 0; k < 1000; ++k) {
    const auto a1 = random_amplitude(gen);
    const auto a2 = random_amplitude(gen);
    const double cosine =
        2.0 * a1.magnitude() * a2.magnitude() * std::cos(a2.phase() - a1.phase());
    ASSERT_NEAR(interference_term(a1, a2).value, cosine, 1e-12);
    ASSERT_LE(std::abs(interference_term(a1, a2).value),
              2.0 * a1.magnitude() * a2.magnitude() * (1 + 1e-15));
  }
}

TEST(InterferenceTerm, ExpansionIdentity) {
  std::mt19937_64 gen(16);
  for (int k = 0; k < 5000; ++k) {
    const auto a1 = random_amplitude(gen);
    const auto a2 = random_amplitude(gen);
    const std::vector<Amplitude> both{a1, a2};
    const double lhs = duality_probability(combine_exclusive(both)).value();
    const double rhs = duality_probability(a1).value() + duality_probability(a2).value() +
                       interference_term(a1, a2).value;
    ASSERT_NEAR(lhs, rhs, 1e-12);
  }
}
