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

#include "eval.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <random>

#include "error.hpp"
#include "json.hpp"
#include "parallel.hpp"
#include "rng.hpp"

namespace ceiq {

void SplitProtocol::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("train fraction must lie in (0, 1)");
  }
  if (repetitions < 1) throw InvalidArgument("repetitions must be >= 1");
}

int train_group_count(double fraction, int refs) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidArgument("train fraction must lie in (0, 1)");
  }
  if (refs < 2) {
    throw InvalidArgument("a reference-disjoint split needs at least 2 "
                          "reference groups, got " + std::to_string(refs));
  }
  const long k = round_half_away(fraction * refs);
  if (k < 1 || k > refs - 1) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "train fraction %g of %d reference groups leaves one side "
                  "of the split empty",
                  fraction, refs);
    throw InvalidArgument(buf);
  }
  return static_cast<int>(k);
}

Split split_by_reference(const DatasetManifest& manifest, double train_fraction,
                         std::uint64_t seed) {
  std::vector<std::string> refs = manifest.reference_ids();
  const int k = train_group_count(train_fraction, static_cast<int>(refs.size()));
  std::mt19937_64 gen(seed);
  seeded_shuffle(refs, gen);

  std::map<std::string, bool> in_train;
  for (std::size_t g = 0; g < refs.size(); ++g) {
    in_train[refs[g]] = static_cast<int>(g) < k;
  }
  Split s;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    (in_train[manifest.entries[i].ref_id] ? s.train : s.test)
        .push_back(static_cast<int>(i));
  }
  return s;
}

Scores score_predictions(std::span<const double> predicted,
                         std::span<const double> subjective, LogisticKind kind) {
  Scores s;
  s.srocc = srocc(predicted, subjective);
  s.krocc = krocc(predicted, subjective);
  LogisticFit fit = plcc_logistic(predicted, subjective, kind);
  s.plcc = fit.plcc;
  s.logistic = std::move(fit.params);
  return s;
}

namespace {

std::vector<double> predict_all(const SvrModel& model, const Dataset& data,
                                std::span<const int> indices) {
  std::vector<double> out;
  out.reserve(indices.size());
  for (int i : indices) out.push_back(model.predict(data.features[i]));
  return out;
}

SplitRecord run_split(const Dataset& data, const SplitProtocol& protocol,
                      const EvalOptions& opts, int repetition) {
  SplitRecord rec;
  rec.repetition = repetition;
  rec.seed = protocol.base_seed + static_cast<std::uint64_t>(repetition);
  const Split split =
      split_by_reference(data.manifest, protocol.train_fraction, rec.seed);
  rec.n_train = static_cast<int>(split.train.size());
  rec.n_test = static_cast<int>(split.test.size());
  try {
    SvrParams svr = opts.svr;
    svr.seed = rec.seed;
    const SvrModel model = train(data.training_set(split.train), svr);
    const auto predicted = predict_all(model, data, split.test);
    std::vector<double> subjective;
    subjective.reserve(split.test.size());
    for (int i : split.test) subjective.push_back(data.manifest.entries[i].score);
    rec.scores = score_predictions(predicted, subjective, opts.logistic);
  } catch (const DegenerateInput& e) {
    rec.skipped = true;
    rec.skip_reason = e.what();
  } catch (const ConvergenceFailure& e) {
    rec.skipped = true;
    rec.skip_reason = e.what();
  } catch (const InvalidArgument& e) {
    // Too few training or test samples for this split.
    rec.skipped = true;
    rec.skip_reason = e.what();
  }
  return rec;
}

}  // namespace

EvaluationReport run_protocol(const Dataset& data, const SplitProtocol& protocol,
                              const EvalOptions& opts) {
  protocol.validate();
  opts.svr.validate();
  data.manifest.validate();
  if (data.features.size() != data.manifest.entries.size()) {
    throw InvalidArgument("dataset has " + std::to_string(data.features.size()) +
                          " feature vectors for " +
                          std::to_string(data.manifest.entries.size()) + " entries");
  }
  // Fails fast on an impossible split instead of skipping every repetition.
  train_group_count(protocol.train_fraction,
                    static_cast<int>(data.manifest.reference_ids().size()));

  EvaluationReport report;
  report.dataset = data.manifest.name;
  report.polarity = data.manifest.polarity;
  report.protocol = protocol;
  report.svr = opts.svr;
  report.logistic = opts.logistic;
  report.reference_groups = static_cast<int>(data.manifest.reference_ids().size());
  report.per_split.resize(protocol.repetitions);

  parallel_for(static_cast<std::size_t>(protocol.repetitions), opts.threads,
               [&](std::size_t r) {
                 report.per_split[r] =
                     run_split(data, protocol, opts, static_cast<int>(r));
               });

  std::vector<double> sr, pl, kr;
  for (const auto& rec : report.per_split) {
    if (rec.skipped) {
      ++report.skipped;
      continue;
    }
    sr.push_back(rec.scores.srocc);
    pl.push_back(rec.scores.plcc);
    kr.push_back(rec.scores.krocc);
  }
  if (sr.empty()) {
    throw DegenerateInput("all " + std::to_string(protocol.repetitions) +
                          " repetitions were skipped; first reason: " +
                          report.per_split.front().skip_reason);
  }
  report.median_srocc = median(sr);
  report.median_plcc = median(pl);
  report.median_krocc = median(kr);
  return report;
}

CrossDatabaseResult cross_database(const Dataset& train_data,
                                   const Dataset& test_data,
                                   const EvalOptions& opts) {
  train_data.manifest.validate();
  test_data.manifest.validate();
  CrossDatabaseResult r;
  r.train_dataset = train_data.manifest.name;
  r.train_polarity = train_data.manifest.polarity;
  r.test_dataset = test_data.manifest.name;
  r.test_polarity = test_data.manifest.polarity;
  r.n_train = static_cast<int>(train_data.features.size());
  r.n_test = static_cast<int>(test_data.features.size());

  const SvrModel model = train(train_data.training_set(), opts.svr);
  std::vector<double> predicted;
  predicted.reserve(test_data.features.size());
  for (const auto& fv : test_data.features) predicted.push_back(model.predict(fv));
  r.scores = score_predictions(predicted, test_data.scores(), opts.logistic);
  return r;
}

std::vector<SweepPoint> split_ratio_sweep(const Dataset& data,
                                          std::span<const double> ratios,
                                          const SplitProtocol& protocol,
                                          const EvalOptions& opts) {
  for (double r : ratios) {
    if (!(r > 0.0 && r < 1.0)) {
      throw InvalidArgument("sweep ratios must lie in (0, 1)");
    }
  }
  std::vector<SweepPoint> out;
  out.reserve(ratios.size());
  for (double r : ratios) {
    SplitProtocol p = protocol;
    p.train_fraction = r;
    out.push_back({r, run_protocol(data, p, opts)});
  }
  return out;
}

std::string logistic_name(LogisticKind kind) {
  return kind == LogisticKind::kFiveParameter ? "logistic5" : "logistic4";
}

namespace {

using nlohmann::ordered_json;

ordered_json scores_json(const Scores& s) {
  ordered_json j;
  j["srocc"] = s.srocc;
  j["plcc"] = s.plcc;
  j["krocc"] = s.krocc;
  j["logistic_params"] = s.logistic;
  return j;
}

ordered_json svr_json(const SvrParams& p) {
  ordered_json j;
  j["C"] = p.c;
  j["epsilon"] = p.epsilon;
  j["tolerance"] = p.tolerance;
  j["max_passes"] = p.max_passes;
  return j;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string report_to_json(const EvaluationReport& report) {
  ordered_json j;
  j["tool"] = "ceiq";
  j["version"] = kToolVersion;
  j["dataset"] = report.dataset;
  j["polarity"] = std::string(polarity_name(report.polarity));
  j["reference_groups"] = report.reference_groups;
  j["protocol"] = {
      {"train_fraction", report.protocol.train_fraction},
      {"repetitions", report.protocol.repetitions},
      {"base_seed", report.protocol.base_seed},
      {"prng", kPrngName},
  };
  j["svr"] = svr_json(report.svr);
  j["logistic"] = logistic_name(report.logistic);
  j["median_srocc"] = report.median_srocc;
  j["median_plcc"] = report.median_plcc;
  j["median_krocc"] = report.median_krocc;
  j["skipped"] = report.skipped;
  if (report.polarity == Polarity::kDmos) {
    j["note"] = "DMOS is lower-is-better: negative SROCC/KROCC indicate agreement";
  }
  ordered_json splits = ordered_json::array();
  for (const auto& rec : report.per_split) {
    ordered_json s;
    s["repetition"] = rec.repetition;
    s["seed"] = rec.seed;
    s["n_train"] = rec.n_train;
    s["n_test"] = rec.n_test;
    if (rec.skipped) {
      s["skipped"] = true;
      s["reason"] = rec.skip_reason;
    } else {
      s.update(scores_json(rec.scores));
    }
    splits.push_back(std::move(s));
  }
  j["per_split"] = std::move(splits);
  return j.dump(2) + "\n";
}

std::string per_split_csv(const EvaluationReport& report) {
  std::string out = "repetition,seed,n_train,n_test,srocc,plcc,krocc,status\n";
  for (const auto& rec : report.per_split) {
    out += std::to_string(rec.repetition) + "," + std::to_string(rec.seed) + "," +
           std::to_string(rec.n_train) + "," + std::to_string(rec.n_test) + ",";
    if (rec.skipped) {
      out += ",,,skipped\n";
    } else {
      out += fmt(rec.scores.srocc) + "," + fmt(rec.scores.plcc) + "," +
             fmt(rec.scores.krocc) + ",ok\n";
    }
  }
  return out;
}

std::string cross_result_to_json(const CrossDatabaseResult& result,
                                 const EvalOptions& opts) {
  ordered_json j;
  j["tool"] = "ceiq";
  j["version"] = kToolVersion;
  j["train"] = {{"dataset", result.train_dataset},
                {"polarity", std::string(polarity_name(result.train_polarity))},
                {"images", result.n_train}};
  j["test"] = {{"dataset", result.test_dataset},
               {"polarity", std::string(polarity_name(result.test_polarity))},
               {"images", result.n_test}};
  j["svr"] = svr_json(opts.svr);
  j["logistic"] = logistic_name(opts.logistic);
  j.update(scores_json(result.scores));
  if (result.train_polarity != result.test_polarity) {
    j["note"] =
        "train and test polarities differ: predictions follow the training "
        "polarity, so a strong negative SROCC indicates agreement";
  }
  return j.dump(2) + "\n";
}

std::string sweep_to_csv(std::span<const SweepPoint> sweep) {
  std::string out = "train_fraction,median_srocc,median_plcc,median_krocc,skipped\n";
  for (const auto& p : sweep) {
    char ratio[32];
    std::snprintf(ratio, sizeof ratio, "%g", p.train_fraction);
    out += std::string(ratio) + "," + fmt(p.report.median_srocc) + "," +
           fmt(p.report.median_plcc) + "," + fmt(p.report.median_krocc) + "," +
           std::to_string(p.report.skipped) + "\n";
  }
  return out;
}

}  // namespace ceiq
