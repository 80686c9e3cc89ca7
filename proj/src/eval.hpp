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

// Train/test protocol over reference-disjoint random splits, split-ratio
// sweeps and cross-database runs.

#ifndef CEIQ_EVAL_HPP_
#define CEIQ_EVAL_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "stats.hpp"
#include "svr.hpp"

namespace ceiq {

inline constexpr const char* kToolVersion = "1.0.0";

struct SplitProtocol {
  double train_fraction = 0.8;
  int repetitions = 1000;
  std::uint64_t base_seed = 0;

  void validate() const;
};

struct EvalOptions {
  SvrParams svr;
  LogisticKind logistic = LogisticKind::kFiveParameter;
  // Repetitions run concurrently; results do not depend on this.
  int threads = 1;
};

struct Split {
  std::vector<int> train;
  std::vector<int> test;
};

// Number of reference groups assigned to training: round(fraction * refs).
// Throws InvalidArgument unless both sides get at least one group.
int train_group_count(double fraction, int refs);

// Shuffles the distinct ref_ids (first-appearance order) with a seeded
// mt19937_64 Fisher-Yates and assigns the first train_group_count groups to
// training. Indices on each side are in manifest order.
Split split_by_reference(const DatasetManifest& manifest, double train_fraction,
                         std::uint64_t seed);

struct Scores {
  double srocc = 0.0;
  double plcc = 0.0;
  double krocc = 0.0;
  std::vector<double> logistic;
};

// All three criteria between predicted and subjective scores.
Scores score_predictions(std::span<const double> predicted,
                         std::span<const double> subjective, LogisticKind kind);

struct SplitRecord {
  int repetition = 0;
  std::uint64_t seed = 0;
  int n_train = 0;
  int n_test = 0;
  bool skipped = false;
  std::string skip_reason;
  Scores scores;
};

struct EvaluationReport {
  std::string dataset;
  Polarity polarity = Polarity::kMos;
  SplitProtocol protocol;
  SvrParams svr;
  LogisticKind logistic = LogisticKind::kFiveParameter;
  int reference_groups = 0;
  double median_srocc = 0.0;
  double median_plcc = 0.0;
  double median_krocc = 0.0;
  int skipped = 0;
  std::vector<SplitRecord> per_split;
};

// Repetition r uses seed base_seed + r for both the split and the SVR.
// Splits whose training or scoring is degenerate are recorded as skipped;
// throws DegenerateInput when every split is skipped.
EvaluationReport run_protocol(const Dataset& data, const SplitProtocol& protocol,
                              const EvalOptions& opts);

struct CrossDatabaseResult {
  std::string train_dataset;
  Polarity train_polarity = Polarity::kMos;
  std::string test_dataset;
  Polarity test_polarity = Polarity::kMos;
  int n_train = 0;
  int n_test = 0;
  Scores scores;
};

// Trains on every entry of `train`, evaluates on every entry of `test`.
CrossDatabaseResult cross_database(const Dataset& train, const Dataset& test,
                                   const EvalOptions& opts);

struct SweepPoint {
  double train_fraction = 0.0;
  EvaluationReport report;
};

std::vector<SweepPoint> split_ratio_sweep(const Dataset& data,
                                          std::span<const double> ratios,
                                          const SplitProtocol& protocol,
                                          const EvalOptions& opts);

std::string logistic_name(LogisticKind kind);

// Deterministic JSON: no timestamps, no thread counts.
std::string report_to_json(const EvaluationReport& report);
std::string per_split_csv(const EvaluationReport& report);
std::string cross_result_to_json(const CrossDatabaseResult& result,
                                 const EvalOptions& opts);
std::string sweep_to_csv(std::span<const SweepPoint> sweep);

}  // namespace ceiq

#endif  // CEIQ_EVAL_HPP_
