// Copyright 2026 The fixdetect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixdetect/error.hpp"
#include "fixdetect/rank_tests.hpp"
#include "oracles.hpp"

using namespace fixdetect;
using namespace fixdetect::cpd;

namespace {

// Small integer-valued samples so ties are common.
std::vector<double> draw(std::mt19937_64& rng, std::size_t n, int levels) {
  std::vector<double> out(n);
  for (auto& v : out) v = static_cast<double>(rng() % static_cast<std::uint64_t>(levels));
  return out;
}

Fraction as_fraction(const oracle::Ratio& r) { return Fraction{r.num, r.den}; }

}  // namespace

TEST(MannWhitneyTest, Examples) {
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  const auto out = mann_whitney_test(a, b);
  ASSERT_TRUE(out.exact_p.has_value());
  EXPECT_EQ(*out.exact_p, (Fraction{1, 10}));
  EXPECT_DOUBLE_EQ(out.p_value, 0.1);
  EXPECT_EQ(out.statistic, 0.0);

  const std::vector<double> same{5, 5, 5};
  EXPECT_EQ(mann_whitney_p(same, same), 1.0);

  const std::vector<double> empty, one{1};
  try {
    mann_whitney_p(empty, one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySample);
  }
}

TEST(KsTest, Examples) {
  const std::vector<double> a{0, 0, 0, 0}, b{1, 1, 1, 1};
  const auto out = ks_test(a, b);
  EXPECT_EQ(out.statistic, 1.0);
  ASSERT_TRUE(out.exact_p.has_value());
  EXPECT_EQ(*out.exact_p, (Fraction{1, 35}));

  const std::vector<double> c{0.3, 1.5, 2.5, 2.5, 7.0};
  const auto same = ks_test(c, c);
  EXPECT_EQ(same.statistic, 0.0);
  EXPECT_EQ(same.p_value, 1.0);

  const std::vector<double> empty, one{1};
  try {
    ks_p(one, empty);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptySample);
  }
}

TEST(RankTestsTest, NonFiniteInputRejected) {
  const std::vector<double> a{1, NAN}, b{2, 3};
  EXPECT_THROW(mann_whitney_p(a, b), Error);
  EXPECT_THROW(ks_p(a, b), Error);
}

TEST(RankTestsTest, MatchesPermutationEnumerationForSmallSamples) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 300; ++i) {
    const std::size_t total = 2 + rng() % 11;
    const std::size_t na = 1 + rng() % (total - 1);
    const int levels = 2 + static_cast<int>(rng() % 8);
    const auto a = draw(rng, na, levels), b = draw(rng, total - na, levels);

    const auto mw = mann_whitney_test(a, b);
    ASSERT_TRUE(mw.exact_p.has_value());
    EXPECT_EQ(*mw.exact_p, as_fraction(oracle::mann_whitney_exact(a, b)));

    const auto ks = ks_test(a, b);
    ASSERT_TRUE(ks.exact_p.has_value());
    EXPECT_EQ(*ks.exact_p, as_fraction(oracle::ks_exact(a, b)));
  }
}

TEST(RankTestsTest, MannWhitneyExactRegimeBeyondTwelve) {
  // na * nb <= 200 keeps the exact path; 7 + 9 = 16 points, 11440 labelings.
  std::mt19937_64 rng(8);
  for (int i = 0; i < 5; ++i) {
    const auto a = draw(rng, 7, 6), b = draw(rng, 9, 6);
    const auto mw = mann_whitney_test(a, b);
    ASSERT_TRUE(mw.exact_p.has_value());
    EXPECT_EQ(*mw.exact_p, as_fraction(oracle::mann_whitney_exact(a, b)));
  }
}

TEST(RankTestsTest, InvariantUnderStrictlyIncreasingTransform) {
  std::mt19937_64 rng(31);
  auto f = [](double x) { return std::exp(0.7 * x) - 3.0; };
  for (int i = 0; i < 200; ++i) {
    const std::size_t na = 1 + rng() % 40, nb = 1 + rng() % 40;
    const auto a = draw(rng, na, 12), b = draw(rng, nb, 12);
    std::vector<double> fa(a), fb(b);
    for (auto& v : fa) v = f(v);
    for (auto& v : fb) v = f(v);
    EXPECT_EQ(mann_whitney_p(fa, fb), mann_whitney_p(a, b));
    EXPECT_EQ(ks_p(fa, fb), ks_p(a, b));
  }
}

TEST(RankTestsTest, SymmetricInSampleOrder) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 200; ++i) {
    const std::size_t na = 1 + rng() % 30, nb = 1 + rng() % 30;
    const auto a = draw(rng, na, 5), b = draw(rng, nb, 5);
    EXPECT_EQ(mann_whitney_p(a, b), mann_whitney_p(b, a));
    EXPECT_EQ(ks_p(a, b), ks_p(b, a));
  }
}

TEST(RankTestsTest, PValuesStayInUnitInterval) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 300; ++i) {
    const std::size_t na = 1 + rng() % 200, nb = 1 + rng() % 200;
    const auto a = draw(rng, na, 1 + static_cast<int>(rng() % 50)), b = draw(rng, nb, 3);
    for (auto test : {TwoSampleTest::MannWhitneyU, TwoSampleTest::KolmogorovSmirnov}) {
      const auto out = two_sample_test(test, a, b);
      EXPECT_GE(out.p_value, 0.0);
      EXPECT_LE(out.p_value, 1.0);
      EXPECT_LE(out.log_p, 0.0);
      EXPECT_TRUE(std::isfinite(out.log_p));
    }
  }
}

TEST(RankTestsTest, LogPStaysFiniteForExtremeSeparation) {
  std::vector<double> a(5000), b(5000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = static_cast<double>(i);
    b[i] = 1e6 + static_cast<double>(i);
  }
  const auto mw = mann_whitney_test(a, b);
  EXPECT_TRUE(std::isfinite(mw.log_p));
  EXPECT_LT(mw.log_p, -1000.0);
  const auto ks = ks_test(a, b);
  EXPECT_TRUE(std::isfinite(ks.log_p));
  EXPECT_LT(ks.log_p, -1000.0);
}

TEST(SplitTesterTest, AgreesWithDirectTests) {
  std::mt19937_64 rng(12);
  for (int round = 0; round < 20; ++round) {
    const std::size_t n = 4 + rng() % 60;
    const auto values = draw(rng, n, 2 + static_cast<int>(rng() % 10));
    for (auto test : {TwoSampleTest::MannWhitneyU, TwoSampleTest::KolmogorovSmirnov}) {
      const SplitTester tester(values, test);
      for (std::size_t k = 1; k < n; ++k) {
        const std::span<const double> all(values);
        const auto direct = two_sample_test(test, all.first(k), all.subspan(k));
        const auto split = tester.at(k);
        EXPECT_EQ(split.statistic, direct.statistic);
        EXPECT_EQ(split.p_value, direct.p_value);
        EXPECT_EQ(split.log_p, direct.log_p);
        EXPECT_EQ(split.exact_p, direct.exact_p);
      }
    }
  }
}

TEST(AsymptoticTest, KolmogorovSurvivalReferenceValues) {
  EXPECT_NEAR(std::exp(detail::log_kolmogorov_survival(1.0)), 0.26999967, 1e-7);
  EXPECT_NEAR(std::exp(detail::log_kolmogorov_survival(1.36)), 0.04946, 1e-4);
  EXPECT_NEAR(std::exp(detail::log_kolmogorov_survival(0.5)), 0.96394524, 1e-7);
  EXPECT_EQ(detail::log_kolmogorov_survival(0.0), 0.0);
}

TEST(AsymptoticTest, LogErfcMatchesStdErfc) {
  for (double x = -3.0; x <= 20.0; x += 0.25) {
    EXPECT_NEAR(detail::log_erfc(x), std::log(std::erfc(x)), 1e-12 * std::max(1.0, std::fabs(std::log(std::erfc(x)))));
  }
  EXPECT_TRUE(std::isfinite(detail::log_erfc(100.0)));
  EXPECT_LT(detail::log_erfc(100.0), -9000.0);
}

TEST(TestNamesTest, RoundTrip) {
  for (auto test : {TwoSampleTest::MannWhitneyU, TwoSampleTest::KolmogorovSmirnov}) {
    EXPECT_EQ(parse_test(to_string(test)), test);
  }
  EXPECT_EQ(parse_test("ks"), TwoSampleTest::KolmogorovSmirnov);
  EXPECT_FALSE(parse_test("t_test").has_value());
}
