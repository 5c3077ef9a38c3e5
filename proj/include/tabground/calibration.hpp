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

#pragma once

#include <cstdint>
#include <span>

#include <json.hpp>

namespace tabground {

/// sigma(slope * r + intercept).
struct CalibrationParams {
  double slope = 0.0;
  double intercept = 0.0;

  double calibrate(double r_attn) const;
  friend bool operator==(const CalibrationParams&, const CalibrationParams&) = default;
};

struct CalibrationSample {
  double score = 0.0;
  bool correct = false;
  bool excluded = false;  ///< zero-mass steps; skipped by the fit
};

struct CalibrationOptions {
  double train_fraction = 0.8;
  double learning_rate = 1.0;
  int patience = 10;
  int max_epochs = 20000;
  /// Held-out loss must drop by more than this to reset patience.
  double min_improvement = 1e-7;
  std::uint64_t seed = 0;
};

struct CalibrationFit {
  CalibrationParams params;
  double train_bce = 0.0;
  double heldout_bce = 0.0;
  int epochs = 0;
  std::size_t n_train = 0;
  std::size_t n_heldout = 0;
};

/// Mean binary cross-entropy of the calibrated scores.
double binary_cross_entropy(const CalibrationParams& params, std::span<const CalibrationSample> samples);

/// Full-batch gradient descent on BCE over (slope, intercept). The split is
/// stratified by label and seeded; when the held-out part would be empty the
/// training loss drives early stopping instead. Returns the parameters with
/// the best held-out loss. Throws DegenerateLabels unless both labels occur
/// among the non-excluded samples.
CalibrationFit fit_calibration_detailed(std::span<const CalibrationSample> samples,
                                        const CalibrationOptions& options = {});
CalibrationParams fit_calibration(std::span<const CalibrationSample> samples, const CalibrationOptions& options = {});

nlohmann::json calibration_to_json(const CalibrationParams& params);
CalibrationParams calibration_from_json(const nlohmann::json& j);

}  // namespace tabground
