// Copyright 2026 The tabground Authors.
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

#include <cmath>
#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "tabground/stats.hpp"

using namespace tabground;

namespace {

std::vector<ScoredLabel> zip(const std::vector<double>& s, const std::vector<bool>& l) {
  std::vector<ScoredLabel> out;
  for (std::size_t i = 0; i < s.size(); ++i) out.push_back({s[i], l[i]});
  return out;
}

std::vector<std::string> labels_from_table(int a, int b, int c, int d, bool first) {
  // Rows: rater one says yes/no; columns: rater two says yes/no.
  std::vector<std::string> out;
  auto push = [&](int n, const char* one, const char* two) {
    for (int i = 0; i < n; ++i) out.push_back(first ? one : two);
  };
  push(a, "yes", "yes");
  push(b, "yes", "no");
  push(c, "no", "yes");
  push(d, "no", "no");
  return out;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("auroc examples") {
  CHECK(auroc(zip({0.9, 0.8, 0.3, 0.2}, {true, true, false, false})) == 1.0);
  CHECK(auroc(zip({0.5, 0.5, 0.5, 0.5}, {true, false, true, false})) == 0.5);
  CHECK(auroc(zip({0.9, 0.8, 0.3, 0.2}, {true, false, true, false})) == 0.75);
  CHECK_THROWS_AS(auroc(zip({0.1, 0.2}, {true, true})), SingleClass);
}

TEST_CASE("auroc matches pairwise counting with ties") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 300; ++i) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(2, 40)(rng);
    const auto s = oracle::tied_scores(rng, n, 5);
    std::vector<bool> l(n);
    for (std::size_t j = 0; j < n; ++j) l[j] = std::bernoulli_distribution(0.4)(rng);
    l[0] = true;
    l[1] = false;
    REQUIRE(auroc(zip(s, l)) == oracle::auroc_pairs(s, l));
  }
}

TEST_CASE("kappa") {
  const std::vector<std::string> a = {"x", "y", "x", "z"};
  CHECK(cohens_kappa(a, a) == 1.0);
  CHECK(agreement(a, a) == 1.0);
  const auto r1 = labels_from_table(20, 5, 10, 15, true);
  const auto r2 = labels_from_table(20, 5, 10, 15, false);
  CHECK(cohens_kappa(r1, r2) == doctest::Approx(oracle::kappa_2x2(20, 5, 10, 15)).epsilon(1e-12));
  CHECK(agreement(r1, r2) == doctest::Approx(0.7));
  CHECK_THROWS_AS(cohens_kappa(a, std::vector<std::string>{"x"}), LengthMismatch);
  // Chance agreement is 1 only when both raters use one shared label, which
  // is perfect agreement.
  const std::vector<std::string> constant = {"x", "x", "x"};
  CHECK(cohens_kappa(constant, constant) == 1.0);
  const std::vector<std::string> other = {"y", "y", "y"};
  CHECK(cohens_kappa(constant, other) == 0.0);
}

TEST_CASE("kappa of independent raters is near zero") {
  std::mt19937_64 rng(31);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::string> a;
  std::vector<std::string> b;
  for (int i = 0; i < 4000; ++i) {
    a.push_back(coin(rng) ? "yes" : "no");
    b.push_back(coin(rng) ? "yes" : "no");
  }
  // Standard error of kappa near zero is about 1 / sqrt(n) = 0.016.
  CHECK(std::abs(cohens_kappa(a, b)) < 0.05);
}

TEST_CASE("binomial volatility from the per-dataset accuracy table") {
  CHECK(std::abs(binomial_sd(0.9412, 200) - 0.0166) <= 0.0001);
  CHECK(std::abs(binomial_sd(0.5, 200) - 0.0354) <= 0.0001);
  CHECK(binomial_sd(0.0, 200) == 0.0);
  CHECK(binomial_sd(1.0, 200) == 0.0);
  // Six-dataset macro mean 90.61 +- 0.83.
  const std::vector<double> p = {0.9412, 0.9513, 0.9141, 0.8248, 0.9009, 0.9045};
  CHECK(std::abs(macro_standard_error(p, 200) - 0.0083) <= 0.00005);
}

TEST_CASE("wilcoxon small cases") {
  const std::vector<double> positive = {1, 2, 3, 4, 5};
  const auto r = wilcoxon_signed_rank(positive);
  CHECK(r.exact);
  CHECK(r.statistic == 15.0);
  CHECK(r.p_greater == doctest::Approx(1.0 / 32.0).epsilon(1e-12));
  const std::vector<double> symmetric = {-1, 1, -2, 2, -3, 3};
  CHECK(wilcoxon_signed_rank(symmetric).p_two_sided == doctest::Approx(1.0));
  CHECK_THROWS_AS(wilcoxon_signed_rank(std::vector<double>{0, 0}), AllZeroDiffs);
}

TEST_CASE("wilcoxon exact matches enumeration") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
    std::vector<double> d(n);
    for (auto& x : d) x = std::uniform_int_distribution<int>(-4, 5)(rng);
    if (std::all_of(d.begin(), d.end(), [](double x) { return x == 0; })) d[0] = 1;
    const auto got = wilcoxon_signed_rank(d, PValueMethod::exact);
    const auto want = oracle::wilcoxon_enumerate(d);
    REQUIRE(got.statistic == want.statistic);
    REQUIRE(got.p_greater == doctest::Approx(want.p_greater).epsilon(1e-12));
    REQUIRE(got.p_less == doctest::Approx(want.p_less).epsilon(1e-12));
    REQUIRE(got.p_two_sided == doctest::Approx(want.p_two_sided).epsilon(1e-12));
  }
}

TEST_CASE("wilcoxon normal approximation near the exact boundary") {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> noise(0.3, 1.0);
  std::vector<double> d(25);
  for (auto& x : d) x = noise(rng);
  const auto approx = wilcoxon_signed_rank(d);
  CHECK_FALSE(approx.exact);
  const auto exact = wilcoxon_signed_rank(d, PValueMethod::exact);
  CHECK(exact.exact);
  CHECK(std::abs(approx.p_two_sided - exact.p_two_sided) < 0.02);
}

TEST_CASE("mann-whitney") {
  const std::vector<double> lo = {1, 2, 3};
  const std::vector<double> hi = {4, 5, 6};
  const auto r = mann_whitney_u(lo, hi);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_less == doctest::Approx(1.0 / 20.0));
  const std::vector<double> x = {1, 2, 2, 3};
  CHECK(mann_whitney_u(x, x).statistic == 8.0);
  CHECK_THROWS_AS(mann_whitney_u(std::vector<double>{}, x), InvalidArgument);
}

TEST_CASE("mann-whitney exact matches enumeration") {
  std::mt19937_64 rng(47);
  for (int i = 0; i < 200; ++i) {
    const std::size_t nx = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    const std::size_t ny = std::uniform_int_distribution<std::size_t>(1, 12 - nx)(rng);
    const auto x = oracle::tied_scores(rng, nx, 4);
    const auto y = oracle::tied_scores(rng, ny, 4);
    const auto got = mann_whitney_u(x, y);
    const auto want = oracle::mann_whitney_enumerate(x, y);
    REQUIRE(got.exact);
    REQUIRE(got.statistic == want.statistic);
    REQUIRE(got.p_greater == doctest::Approx(want.p_greater).epsilon(1e-12));
    REQUIRE(got.p_less == doctest::Approx(want.p_less).epsilon(1e-12));
  }
}

TEST_CASE("perm sigma") {
  CHECK(perm_sigma(std::vector<double>{0.7, 0.7, 0.7, 0.7, 0.7}).value() == 0.0);
  CHECK_FALSE(perm_sigma(std::vector<double>{0.6, 0.7}).has_value());
  CHECK(perm_sigma(std::vector<double>{0.6, 0.7, 0.8}).value() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(perm_sigma(std::vector<double>{0.6, NAN, 0.8, 0.7}).value() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(perm_sigma(std::vector<double>{0.61, 0.7, 0.85, 0.5}).value() ==
        doctest::Approx(oracle::sample_sd({0.61, 0.7, 0.85, 0.5})).epsilon(1e-12));
}

TEST_CASE("median") {
  CHECK(median(std::vector<double>{3, 1, 2}).value() == 2.0);
  CHECK(median(std::vector<double>{4, 1, 2, 3}).value() == 2.5);
  CHECK_FALSE(median(std::vector<double>{}).has_value());
}

}  // TEST_SUITE
