// Copyright 2026 The CEIQ Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Linear epsilon-insensitive support vector regression on min/max scaled
// features, with a versioned text model format.

#ifndef CEIQ_SVR_HPP_
#define CEIQ_SVR_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "features.hpp"

namespace ceiq {

using FeatureArray = std::array<double, kFeatureCount>;

// Subjective score orientation of a database.
enum class Polarity { kMos, kDmos };

std::string_view polarity_name(Polarity p);

struct TrainingSample {
  FeatureVector features;
  double score = 0.0;
};

struct TrainingSet {
  std::vector<TrainingSample> samples;
  std::string source;
  Polarity polarity = Polarity::kMos;
};

// Per-feature min/max learned on a training set. A dimension with
// min == max is degenerate and always maps to 0.
struct FeatureScaling {
  FeatureArray min{};
  FeatureArray max{};

  // Maps [min, max] linearly onto [0, 1]; values outside extrapolate.
  FeatureArray apply(const FeatureVector& fv) const;
};

// Throws InvalidArgument on an empty set.
FeatureScaling scale_fit(std::span<const FeatureVector> features);
FeatureScaling scale_fit(const TrainingSet& set);

struct SvrParams {
  double c = 1.0;
  double epsilon = 0.1;
  std::uint64_t seed = 0;
  // One pass is n two-coordinate updates for n samples.
  int max_passes = 10000;
  // Stop once the duality gap is below tolerance * max(1, |primal|).
  double tolerance = 1e-6;

  void validate() const;
};

inline constexpr int kModelFormatVersion = 1;

struct SvrModel {
  FeatureArray weights{};
  double bias = 0.0;
  FeatureScaling scaling;
  double c = 1.0;
  double epsilon = 0.1;
  int format_version = kModelFormatVersion;
  // Free-form metadata written as '#' lines.
  std::vector<std::string> comments;

  // w . scale(fv) + bias. Throws InvalidArgument for non-finite features.
  double predict(const FeatureVector& fv) const;
};

struct TrainingTrace {
  // Best primal objective seen after each pass; nonincreasing.
  std::vector<double> primal_per_pass;
  double primal = 0.0;
  // Dual objective in maximization form, so primal - dual is the gap.
  double dual = 0.0;
  int passes = 0;
  long long updates = 0;
};

// 1/2 |w|^2 + C sum max(0, |y - (w.x + b)| - epsilon) over already scaled
// inputs.
double svr_primal_objective(const FeatureArray& w, double b,
                            std::span<const FeatureArray> x,
                            std::span<const double> y, double c,
                            double epsilon);

// Bias minimizing the epsilon-insensitive loss for fixed weights; the
// midpoint of the optimal interval.
double svr_optimal_bias(const FeatureArray& w, std::span<const FeatureArray> x,
                        std::span<const double> y, double epsilon);

// Trains on the scaled features. Throws InvalidArgument for fewer than two
// samples, non-finite data or bad hyperparameters, and ConvergenceFailure
// when the pass cap is reached.
SvrModel train(const TrainingSet& set, const SvrParams& params,
               TrainingTrace* trace = nullptr);

std::string serialize(const SvrModel& model);

// Throws ParseError with the offending line number.
SvrModel deserialize(std::string_view text);

void save_model(const std::string& path, const SvrModel& model);
SvrModel load_model(const std::string& path);

}  // namespace ceiq

#endif  // CEIQ_SVR_HPP_
