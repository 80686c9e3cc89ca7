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

// Correlation criteria used to score a quality metric against subjective
// ratings.

#ifndef CEIQ_STATS_HPP_
#define CEIQ_STATS_HPP_

#include <functional>
#include <span>
#include <vector>

namespace ceiq {

// All of these throw InvalidArgument on a length mismatch or too few
// samples, and DegenerateInput when the correlation is undefined (a
// constant argument).
double pearson(std::span<const double> x, std::span<const double> y);
double srocc(std::span<const double> x, std::span<const double> y);
// Kendall tau-b by exhaustive pair comparison.
double krocc(std::span<const double> x, std::span<const double> y);

// 1-based ranks; tied values share the mean of their rank span.
std::vector<double> average_ranks(std::span<const double> v);

enum class LogisticKind {
  // b1 * (1/2 - 1 / (1 + exp(b2 (x - b3)))) + b4 x + b5
  kFiveParameter,
  // (b1 - b2) / (1 + exp(-(x - b3) / |b4|)) + b2
  kFourParameter,
};

double logistic_eval(LogisticKind kind, std::span<const double> beta, double x);

struct LogisticFit {
  double plcc = 0.0;
  std::vector<double> params;
  double sse = 0.0;
};

// Least-squares logistic mapping from objective to subjective scores,
// followed by the Pearson correlation of the mapped scores. Needs n >= 5
// and a non-constant objective and subjective vector.
LogisticFit plcc_logistic(std::span<const double> objective,
                          std::span<const double> subjective,
                          LogisticKind kind = LogisticKind::kFiveParameter);

struct SimplexOptions {
  int max_iterations = 2000;
  // Stop when max f - min f over the simplex <= tolerance * max(1, |min f|).
  double tolerance = 1e-8;
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
};

// Derivative-free Nelder-Mead minimization. Never returns a point worse
// than the start.
SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                          std::vector<double> start,
                          const SimplexOptions& opts = {});

double median(std::vector<double> v);

}  // namespace ceiq

#endif  // CEIQ_STATS_HPP_
