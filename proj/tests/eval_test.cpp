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

#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "error.hpp"
#include "json.hpp"

using namespace ceiq;

namespace {

DatasetManifest groups_manifest(int refs, int per_ref) {
  DatasetManifest m;
  m.name = "groups";
  for (int r = 0; r < refs; ++r) {
    for (int i = 0; i < per_ref; ++i) {
      m.entries.push_back({"r" + std::to_string(r) + "_" + std::to_string(i) + ".png",
                           static_cast<double>(r * per_ref + i), "r" + std::to_string(r)});
    }
  }
  return m;
}

// Every feature is an increasing affine function of one latent value, and
// so is the score; any linear fit is monotone in the latent.
Dataset latent_dataset(int refs, int per_ref, std::uint64_t seed, double noise = 0.0) {
  Dataset ds;
  ds.manifest = groups_manifest(refs, per_ref);
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto& e : ds.manifest.entries) {
    const double t = u(gen);
    ds.features.push_back({0.2 + 0.7 * t, 3.0 + 2.0 * t, 4.0 + t, 5.0 + 1.5 * t, 6.0 + 0.5 * t});
    e.score = 10.0 + 80.0 * t + noise * g(gen);
  }
  return ds;
}

}  // namespace

TEST_CASE("train group count") {
  CHECK(train_group_count(0.8, 15) == 12);
  CHECK(train_group_count(0.5, 5) == 3);  // round(2.5)
  CHECK(train_group_count(0.1, 10) == 1);
  CHECK_THROWS_AS(train_group_count(0.1, 4), InvalidArgument);
  CHECK_THROWS_AS(train_group_count(0.9, 4), InvalidArgument);
  CHECK_THROWS_AS(train_group_count(0.5, 1), InvalidArgument);
  CHECK_THROWS_AS(train_group_count(1.0, 10), InvalidArgument);
}

TEST_CASE("reference-disjoint splits") {
  const DatasetManifest m = groups_manifest(15, 4);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Split s = split_by_reference(m, 0.8, seed);
    CHECK(s.train.size() == 48);
    CHECK(s.test.size() == 12);
    std::set<std::string> tr, te;
    for (int i : s.train) tr.insert(m.entries[i].ref_id);
    for (int i : s.test) te.insert(m.entries[i].ref_id);
    CHECK(tr.size() == 12);
    CHECK(te.size() == 3);
    for (const auto& r : te) CHECK(tr.count(r) == 0);
    CHECK(std::is_sorted(s.train.begin(), s.train.end()));
    CHECK(std::is_sorted(s.test.begin(), s.test.end()));

    const Split again = split_by_reference(m, 0.8, seed);
    CHECK(again.train == s.train);
    CHECK(again.test == s.test);
  }
  CHECK(split_by_reference(m, 0.8, 1).test != split_by_reference(m, 0.8, 2).test);
  CHECK_THROWS_AS(split_by_reference(groups_manifest(1, 5), 0.5, 0), InvalidArgument);
}

TEST_CASE("protocol validation") {
  SplitProtocol p;
  CHECK_NOTHROW(p.validate());
  p.repetitions = 0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = {};
  p.train_fraction = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);

  const Dataset ds = latent_dataset(4, 3, 1);
  SplitProtocol tiny;
  tiny.train_fraction = 0.05;
  tiny.repetitions = 3;
  CHECK_THROWS_AS(run_protocol(ds, tiny, {}), InvalidArgument);
  Dataset bad = ds;
  bad.features.pop_back();
  CHECK_THROWS_AS(run_protocol(bad, SplitProtocol{}, {}), InvalidArgument);
}

TEST_CASE("a monotone latent gives perfect rank agreement") {
  const Dataset ds = latent_dataset(15, 6, 3);
  SplitProtocol p;
  p.repetitions = 25;
  const EvaluationReport r = run_protocol(ds, p, {});
  CHECK(r.skipped == 0);
  CHECK(r.reference_groups == 15);
  CHECK(r.median_srocc == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.median_krocc == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.median_plcc > 0.999);
  REQUIRE(r.per_split.size() == 25);
  for (std::size_t i = 0; i < r.per_split.size(); ++i) {
    CHECK(r.per_split[i].repetition == static_cast<int>(i));
    CHECK(r.per_split[i].seed == i);
    CHECK(r.per_split[i].n_train == 72);
    CHECK(r.per_split[i].n_test == 18);
  }
}

TEST_CASE("a single repetition reports that split's scores") {
  const Dataset ds = latent_dataset(10, 5, 4, 8.0);
  SplitProtocol p;
  p.repetitions = 1;
  p.base_seed = 77;
  const EvaluationReport r = run_protocol(ds, p, {});
  REQUIRE(r.per_split.size() == 1);
  CHECK(r.per_split[0].seed == 77);
  CHECK(r.median_srocc == r.per_split[0].scores.srocc);
  CHECK(r.median_plcc == r.per_split[0].scores.plcc);
  CHECK(r.median_krocc == r.per_split[0].scores.krocc);

  // Recompute the split by hand.
  const Split s = split_by_reference(ds.manifest, 0.8, 77);
  SvrParams svr;
  svr.seed = 77;
  const SvrModel model = train(ds.training_set(s.train), svr);
  std::vector<double> pred, subj;
  for (int i : s.test) {
    pred.push_back(model.predict(ds.features[i]));
    subj.push_back(ds.manifest.entries[i].score);
  }
  CHECK(r.median_srocc == srocc(pred, subj));
}

TEST_CASE("results do not depend on the thread count") {
  const Dataset ds = latent_dataset(12, 5, 9, 15.0);
  SplitProtocol p;
  p.repetitions = 40;
  p.base_seed = 5;
  EvalOptions one, many;
  many.threads = 6;
  const EvaluationReport a = run_protocol(ds, p, one);
  const EvaluationReport b = run_protocol(ds, p, many);
  CHECK(report_to_json(a) == report_to_json(b));
  CHECK(per_split_csv(a) == per_split_csv(b));
  CHECK(report_to_json(a) == report_to_json(run_protocol(ds, p, one)));
}

TEST_CASE("report serialization") {
  Dataset ds = latent_dataset(6, 4, 11, 5.0);
  ds.manifest.polarity = Polarity::kDmos;
  for (auto& e : ds.manifest.entries) e.score = -e.score;
  SplitProtocol p;
  p.repetitions = 5;
  p.train_fraction = 0.5;
  const EvaluationReport r = run_protocol(ds, p, {});
  const auto j = nlohmann::json::parse(report_to_json(r));
  CHECK(j["dataset"] == "groups");
  CHECK(j["polarity"] == "DMOS");
  CHECK(j.contains("note"));
  CHECK(j["skipped"] == 0);
  CHECK(j["protocol"]["repetitions"] == 5);
  CHECK(j["per_split"].size() == 5);

  const std::string csv = per_split_csv(r);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
}

TEST_CASE("degenerate splits are skipped and counted") {
  // A test side of only r3 and r4 has constant subjective scores.
  Dataset ds = latent_dataset(5, 3, 12);
  for (auto& e : ds.manifest.entries) {
    if (e.ref_id == "r3" || e.ref_id == "r4") e.score = 50.0;
  }
  SplitProtocol p;
  p.repetitions = 60;
  p.train_fraction = 0.6;
  const EvaluationReport r = run_protocol(ds, p, {});
  CHECK(r.skipped > 0);
  CHECK(r.skipped < 60);
  int counted = 0;
  for (const auto& s : r.per_split) {
    if (s.skipped) {
      ++counted;
      CHECK_FALSE(s.skip_reason.empty());
    }
  }
  CHECK(counted == r.skipped);
  CHECK(nlohmann::json::parse(report_to_json(r))["skipped"] == r.skipped);

  for (auto& e : ds.manifest.entries) e.score = 50.0;
  CHECK_THROWS_AS(run_protocol(ds, p, {}), DegenerateInput);
}

TEST_CASE("cross-database evaluation") {
  const Dataset a = latent_dataset(8, 5, 21, 4.0);
  Dataset b = latent_dataset(6, 5, 22, 4.0);
  b.manifest.name = "other";
  const CrossDatabaseResult r = cross_database(a, b, {});
  CHECK(r.train_dataset == "groups");
  CHECK(r.test_dataset == "other");
  CHECK(r.n_train == 40);
  CHECK(r.n_test == 30);
  CHECK(r.scores.srocc > 0.9);
  const auto j = nlohmann::json::parse(cross_result_to_json(r, {}));
  CHECK(j["test"]["dataset"] == "other");
}

TEST_CASE("split ratio sweep") {
  const Dataset ds = latent_dataset(10, 4, 31, 10.0);
  SplitProtocol p;
  p.repetitions = 12;
  const std::vector<double> ratios = {0.3, 0.8};
  const auto sweep = split_ratio_sweep(ds, ratios, p, {});
  REQUIRE(sweep.size() == 2);
  p.train_fraction = 0.8;
  CHECK(report_to_json(sweep[1].report) == report_to_json(run_protocol(ds, p, {})));
  CHECK(sweep[0].train_fraction == 0.3);
  const std::string csv = sweep_to_csv(sweep);
  CHECK(csv.rfind("train_fraction,median_srocc", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  const std::vector<double> bad = {0.5, 1.0};
  CHECK_THROWS_AS(split_ratio_sweep(ds, bad, p, {}), InvalidArgument);
}
