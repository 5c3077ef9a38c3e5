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

#include "tabground/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "tabground/error.hpp"

namespace tabground {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct Batch {
  Eigen::ArrayXd x;
  Eigen::ArrayXd y;
};

Batch make_batch(std::span<const CalibrationSample> all, const std::vector<std::size_t>& idx) {
  Batch b{Eigen::ArrayXd(static_cast<Eigen::Index>(idx.size())), Eigen::ArrayXd(static_cast<Eigen::Index>(idx.size()))};
  for (std::size_t i = 0; i < idx.size(); ++i) {
    b.x(static_cast<Eigen::Index>(i)) = all[idx[i]].score;
    b.y(static_cast<Eigen::Index>(i)) = all[idx[i]].correct ? 1.0 : 0.0;
  }
  return b;
}

double batch_bce(const CalibrationParams& p, const Batch& b) {
  if (b.x.size() == 0) return 0.0;
  const Eigen::ArrayXd z = p.slope * b.x + p.intercept;
  // -[y log s(z) + (1-y) log(1 - s(z))] = softplus(z) - y z
  return (z.unaryExpr(&softplus) - b.y * z).mean();
}

}  // namespace

double CalibrationParams::calibrate(double r_attn) const { return logistic(slope * r_attn + intercept); }

double binary_cross_entropy(const CalibrationParams& params, std::span<const CalibrationSample> samples) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].excluded) idx.push_back(i);
  }
  return batch_bce(params, make_batch(samples, idx));
}

CalibrationFit fit_calibration_detailed(std::span<const CalibrationSample> samples, const CalibrationOptions& options) {
  if (!(options.train_fraction > 0.0 && options.train_fraction <= 1.0)) {
    throw InvalidArgument("train_fraction must be in (0, 1]");
  }
  std::vector<std::size_t> by_label[2];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].excluded) continue;
    by_label[samples[i].correct ? 1 : 0].push_back(i);
  }
  if (by_label[0].empty() || by_label[1].empty()) {
    throw DegenerateLabels("calibration needs both correct and incorrect samples");
  }

  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> held_idx;
  for (auto& group : by_label) {
    std::shuffle(group.begin(), group.end(), rng);
    // The slack keeps 50 * (1 - 0.8) from flooring to 9.
    auto n_held = static_cast<std::size_t>(
        std::floor(static_cast<double>(group.size()) * (1.0 - options.train_fraction) + 1e-9));
    n_held = std::min(n_held, group.size() - 1);
    held_idx.insert(held_idx.end(), group.begin(), group.begin() + static_cast<std::ptrdiff_t>(n_held));
    train_idx.insert(train_idx.end(), group.begin() + static_cast<std::ptrdiff_t>(n_held), group.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(held_idx.begin(), held_idx.end());

  const Batch train = make_batch(samples, train_idx);
  const Batch held = make_batch(samples, held_idx);
  const Batch& monitor = held.x.size() > 0 ? held : train;

  CalibrationParams params;
  CalibrationFit best{params, batch_bce(params, train), batch_bce(params, monitor), 0, train_idx.size(),
                      held_idx.size()};
  int stale = 0;
  const auto n = static_cast<double>(train.x.size());
  for (int epoch = 1; epoch <= options.max_epochs; ++epoch) {
    const Eigen::ArrayXd z = params.slope * train.x + params.intercept;
    const Eigen::ArrayXd residual = z.unaryExpr(&logistic) - train.y;
    params.slope -= options.learning_rate * (residual * train.x).sum() / n;
    params.intercept -= options.learning_rate * residual.sum() / n;

    const double loss = batch_bce(params, monitor);
    if (loss < best.heldout_bce - options.min_improvement) {
      best = {params, batch_bce(params, train), loss, epoch, train_idx.size(), held_idx.size()};
      stale = 0;
    } else if (++stale >= options.patience) {
      break;
    }
  }
  return best;
}

CalibrationParams fit_calibration(std::span<const CalibrationSample> samples, const CalibrationOptions& options) {
  return fit_calibration_detailed(samples, options).params;
}

nlohmann::json calibration_to_json(const CalibrationParams& params) {
  return {{"slope", params.slope}, {"intercept", params.intercept}};
}

CalibrationParams calibration_from_json(const nlohmann::json& j) {
  try {
    return {j.at("slope").get<double>(), j.at("intercept").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("calibration params: ") + e.what());
  }
}

}  // namespace tabground
