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
#include <numeric>
#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "tabground/attention.hpp"
#include "tabground/calibration.hpp"
#include "tabground/masks.hpp"
#include "tabground/synthetic.hpp"

using namespace tabground;

namespace {

CellMask mask_from(std::initializer_list<std::initializer_list<int>> rows) {
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const auto n_cols = static_cast<Eigen::Index>(rows.begin()->size());
  CellMask m(n_rows, n_cols, MaskProvenance::oracle);
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (int v : row) m.set(r, c++, v != 0);
    ++r;
  }
  return m;
}

}  // namespace

TEST_SUITE("attention") {

TEST_CASE("token exactly on a cell") {
  const Serialized s = serialize(Table({"A", "B"}, {{"xx", "yy"}}));
  const TokenScore tokens[] = {{s.index.cell(0, 0), 0.4}};
  const CellAttention a = aggregate_cells(tokens, s.index);
  CHECK(a.scores(0, 0) == doctest::Approx(0.4));
  CHECK(a.total_mass() == doctest::Approx(0.4));
}

TEST_CASE("token straddling two cells splits evenly") {
  const Serialized s = serialize(Table({"A", "B"}, {{"xx", "yy"}}));
  // The last character of "xx", the delimiter, and the first of "yy".
  const CharSpan straddle{s.index.cell(0, 0).end - 1, s.index.cell(0, 1).begin + 1};
  const TokenScore tokens[] = {{straddle, 0.2}};
  const CellAggregation agg = aggregate_cells_detailed(tokens, s.index);
  CHECK(agg.attention.scores(0, 0) == doctest::Approx(0.1));
  CHECK(agg.attention.scores(0, 1) == doctest::Approx(0.1));
  CHECK(agg.discarded == doctest::Approx(0.0));
}

TEST_CASE("delimiter-only tokens are discarded and headers pool per column") {
  const Serialized s = serialize(Table({"A", "B"}, {{"x", "y"}}));
  const TokenScore tokens[] = {{CharSpan{0, 1}, 0.3}, {s.index.header(1), 0.5}};
  const CellAggregation agg = aggregate_cells_detailed(tokens, s.index);
  CHECK(agg.discarded == doctest::Approx(0.3));
  CHECK(agg.attention.header_scores(1) == doctest::Approx(0.5));
}

TEST_CASE("random token partitions conserve mass") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Table t = random_table(rng, {0, 6, 1, 5});
    const Serialized s = serialize(t);
    std::vector<TokenScore> tokens;
    std::uniform_int_distribution<std::size_t> width(1, 6);
    std::uniform_real_distribution<double> score(0.0, 1.0);
    double input = 0.0;
    for (std::size_t pos = 0; pos < s.text.size();) {
      const std::size_t end = std::min(s.text.size(), pos + width(rng));
      tokens.push_back({{pos, end}, score(rng)});
      input += tokens.back().score;
      pos = end;
    }
    const CellAggregation agg = aggregate_cells_detailed(tokens, s.index);
    REQUIRE(agg.attention.total_mass() + agg.discarded == doctest::Approx(input).epsilon(1e-12));
  }
}

TEST_CASE("out-of-range tokens") {
  const Serialized s = serialize(Table({"A"}, {{"x"}}));
  const TokenScore past[] = {{CharSpan{0, s.text.size() + 1}, 1.0}};
  CHECK_THROWS_AS(aggregate_cells(past, s.index), RangeOutOfBounds);
  const TokenScore backwards[] = {{CharSpan{3, 2}, 1.0}};
  CHECK_THROWS_AS(aggregate_cells(backwards, s.index), RangeOutOfBounds);
}

TEST_CASE("r_attn worked example") {
  CellAttention a = CellAttention::zeros(1, 3);
  a.scores << 0.2, 0.3, 0.5;
  const CellMask m = mask_from({{1, 0, 1}});
  // (0.2 + 0.5) / (0.2 + 0.3 + 0.5)
  CHECK(r_attn(a, m) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("uniform mask scores one and zero mass scores zero") {
  CellAttention a = CellAttention::zeros(2, 2);
  a.scores << 1, 2, 3, 4;
  a.header_scores << 0.5, 0.25;
  CHECK(r_attn(a, CellMask::uniform(2, 2)) == 1.0);
  const auto zero = r_attn_detailed(CellAttention::zeros(2, 2), CellMask::uniform(2, 2));
  CHECK(zero.score == 0.0);
  CHECK(zero.excluded);
}

TEST_CASE("header mass follows the column designation") {
  CellAttention a = CellAttention::zeros(1, 2);
  a.scores << 1, 1;
  a.header_scores << 2, 0;
  const CellMask m = mask_from({{1, 0}});
  CHECK(r_attn(a, m) == doctest::Approx(0.75));
  CHECK(r_attn(a, m, {1e-6, false}) == doctest::Approx(0.25));
}

TEST_CASE("attention on the wrong row variant scores low") {
  // Rows alternate "as reported" and "as adjusted"; the plan designates the
  // reported rows but the reasoner attends to the adjusted ones.
  const Table t({"measure", "2019", "2020"}, {{"revenue as reported", "10", "12"},
                                              {"revenue as adjusted", "11", "13"},
                                              {"income as reported", "3", "4"},
                                              {"income as adjusted", "3.5", "4.5"}});
  CellMask m(4, 3, MaskProvenance::parsed);
  for (Eigen::Index c = 0; c < 3; ++c) {
    m.set(0, c);
    m.set(2, c);
  }
  CellAttention a = CellAttention::zeros(4, 3);
  a.scores << 0.02, 0.01, 0.01, 0.30, 0.15, 0.15, 0.01, 0.005, 0.005, 0.20, 0.08, 0.07;
  CHECK(r_attn(a, m, {1e-6, false}) < 0.1);
}

TEST_CASE("shape mismatch") {
  CHECK_THROWS_AS(r_attn(CellAttention::zeros(2, 2), CellMask(2, 3)), ShapeMismatch);
}

TEST_CASE("attention payloads") {
  const Serialized s = serialize(Table({"A", "B"}, {{"x", "y"}}));
  const auto per_cell = attention_from_json(nlohmann::json::parse(R"({"per_cell": [[1, 2]], "per_header": [0.5, 0]})"), s.index);
  CHECK(per_cell.scores(0, 1) == 2.0);
  CHECK(per_cell.header_scores(0) == 0.5);
  nlohmann::json spans = {{"spans", {{{"start", s.index.cell(0, 1).begin}, {"end", s.index.cell(0, 1).end}, {"score", 0.7}}}}};
  CHECK(attention_from_json(spans, s.index).scores(0, 1) == doctest::Approx(0.7));
  CHECK_THROWS_AS(attention_from_json(nlohmann::json::parse(R"({"per_cell": [[1]]})"), s.index), ShapeMismatch);
  CHECK_THROWS_AS(attention_from_json(nlohmann::json::parse(R"({"per_cell": [[1, -2]]})"), s.index), InvalidArgument);
  const auto back = attention_from_json(attention_to_json(per_cell), s.index);
  CHECK(back.scores == per_cell.scores);
  CHECK(back.header_scores == per_cell.header_scores);
}

TEST_CASE("float attention through the same template") {
  BasicCellAttention<float> a = BasicCellAttention<float>::zeros(1, 3);
  a.scores << 0.2f, 0.3f, 0.5f;
  CHECK(r_attn(a, mask_from({{1, 0, 1}})) == doctest::Approx(0.7f).epsilon(1e-6));
}

}  // TEST_SUITE

TEST_SUITE("calibration") {

TEST_CASE("separable data") {
  std::vector<CalibrationSample> samples;
  for (int i = 0; i < 50; ++i) {
    samples.push_back({0.9, true, false});
    samples.push_back({0.1, false, false});
  }
  const CalibrationFit fit = fit_calibration_detailed(samples);
  CHECK(fit.params.slope > 0.0);
  CHECK(fit.train_bce < std::log(2.0));
  CHECK(fit.heldout_bce < std::log(2.0));
  CHECK(fit.n_heldout == 20);
  CHECK(fit.n_train == 80);
}

TEST_CASE("labels independent of scores recover the base rate") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> score(0.0, 1.0);
  std::bernoulli_distribution label(0.3);
  std::vector<CalibrationSample> samples;
  for (int i = 0; i < 2000; ++i) samples.push_back({score(rng), label(rng), false});
  const CalibrationParams p = fit_calibration(samples);
  CHECK(std::abs(p.slope) < 1.0);
  CHECK(p.calibrate(0.5) == doctest::Approx(0.3).epsilon(0.1 / 0.3));
}

TEST_CASE("degenerate labels") {
  std::vector<CalibrationSample> samples(10, {0.5, true, false});
  CHECK_THROWS_AS(fit_calibration(samples), DegenerateLabels);
  samples[0] = {0.1, false, true};  // excluded samples do not count
  CHECK_THROWS_AS(fit_calibration(samples), DegenerateLabels);
}

TEST_CASE("calibration is deterministic for a seed and persists as JSON") {
  std::mt19937_64 rng(2);
  std::vector<CalibrationSample> samples;
  for (int i = 0; i < 200; ++i) {
    const bool y = i % 2 == 0;
    samples.push_back({std::clamp((y ? 0.6 : 0.4) + std::normal_distribution<double>(0, 0.2)(rng), 0.0, 1.0), y, false});
  }
  const auto a = fit_calibration(samples, {.seed = 5});
  const auto b = fit_calibration(samples, {.seed = 5});
  CHECK(a == b);
  CHECK(calibration_from_json(calibration_to_json(a)) == a);
  CHECK(a.calibrate(0.8) > a.calibrate(0.2));
}

}  // TEST_SUITE

TEST_SUITE("masks") {

TEST_CASE("null masks preserve density") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 50; ++i) {
    const Table t = random_table(rng, {1, 8, 1, 6});
    const CellMask m = random_mask(rng, t);
    for (NullKind kind : {NullKind::shuffle_cell, NullKind::shuffle_within_row, NullKind::shuffle_within_col,
                          NullKind::permute_columns}) {
      for (const auto& draw : null_masks(m, {kind, 10, static_cast<std::uint64_t>(i)})) {
        REQUIRE(draw.count() == m.count());
        CHECK(draw.provenance() == MaskProvenance::null_shuffled);
        if (kind == NullKind::shuffle_within_row) {
          for (Eigen::Index r = 0; r < m.rows(); ++r) CHECK(draw.bits().row(r).cast<int>().sum() == m.bits().row(r).cast<int>().sum());
        }
        if (kind == NullKind::shuffle_within_col) {
          for (Eigen::Index c = 0; c < m.cols(); ++c) CHECK(draw.bits().col(c).cast<int>().sum() == m.bits().col(c).cast<int>().sum());
        }
      }
    }
  }
}

TEST_CASE("cell shuffle inclusion frequency matches the density") {
  CellMask m(4, 5, MaskProvenance::oracle);
  for (Eigen::Index i = 0; i < 6; ++i) m.set(i / 5, i % 5);
  constexpr int kDraws = 50;
  const auto draws = null_masks(m, {NullKind::shuffle_cell, kDraws, 99});
  const double p = 6.0 / 20.0;
  const double sigma = std::sqrt(p * (1 - p) / kDraws);
  for (Eigen::Index r = 0; r < 4; ++r) {
    for (Eigen::Index c = 0; c < 5; ++c) {
      double hits = 0;
      for (const auto& d : draws) hits += d.test(r, c) ? 1 : 0;
      CHECK(std::abs(hits / kDraws - p) <= 3 * sigma);
    }
  }
}

TEST_CASE("null mask guards and determinism") {
  CHECK_THROWS_AS(null_masks(CellMask(2, 2), {}), EmptyMask);
  CellMask m(2, 2);
  m.set(0, 0);
  CHECK_THROWS_AS(null_masks(m, {NullKind::shuffle_cell, 0, 0}), InvalidArgument);
  CHECK(null_masks(m, {NullKind::shuffle_cell, 5, 7}) == null_masks(m, {NullKind::shuffle_cell, 5, 7}));
}

TEST_CASE("noise mask") {
  CellMask m(100, 100, MaskProvenance::oracle);
  for (Eigen::Index r = 0; r < 100; r += 3) m.set(r, r % 100);
  CHECK(noise_mask(m, 0.0, 1).bits() == m.bits());
  const CellMask flipped = noise_mask(m, 1.0, 1);
  CHECK((flipped.bits().array() != m.bits().array()).all());
  const CellMask noisy = noise_mask(m, 0.2, 42);
  CHECK(noisy.provenance() == MaskProvenance::noised);
  const double flips = (noisy.bits().array() != m.bits().array()).cast<double>().sum();
  const double sigma = std::sqrt(10000 * 0.2 * 0.8);
  CHECK(std::abs(flips - 2000.0) <= 3 * sigma);
  CHECK_THROWS_AS(noise_mask(m, 1.5, 1), InvalidArgument);
}

TEST_CASE("attention on the ground-truth cells gives ratio near n_cells / k") {
  CellMask gt(5, 4, MaskProvenance::oracle);
  gt.set(1, 2);
  gt.set(3, 0);
  CellAttention a = CellAttention::zeros(5, 4);
  a.scores(1, 2) = 0.5;
  a.scores(3, 0) = 0.5;
  const FalsificationResult r = falsification_ratio(a, gt, {NullKind::shuffle_cell, 2000, 5});
  CHECK(r.gt_score == 1.0);
  const double n = 20.0;
  const double k = 2.0;
  // Overlap with a random k-subset is hypergeometric with mean k^2 / n.
  const double var = (k / n) * (1 - k / n) * (n - k) / ((n - 1) * k);
  CHECK(std::abs(r.mean_null_score - k / n) <= 4 * std::sqrt(var / 2000));
  CHECK(r.ratio == doctest::Approx(n / k).epsilon(0.25));
}

TEST_CASE("uniform attention gives ratio one") {
  CellMask gt(4, 4, MaskProvenance::oracle);
  gt.set(0, 0);
  gt.set(2, 3);
  gt.set(3, 1);
  CellAttention a = CellAttention::zeros(4, 4);
  a.scores.setOnes();
  const FalsificationResult r = falsification_ratio(a, gt, {});
  CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.null_scores.size() == 50);
}

}  // TEST_SUITE
