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

#include "ceiq/ceiq.h"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "features.hpp"
#include "imageops.hpp"
#include "stats.hpp"
#include "svr.hpp"
#include "synth.hpp"

struct ceiq_model {
  ceiq::SvrModel model;
};

struct ceiq_dataset {
  ceiq::Dataset data;
  bool has_features = false;
};

struct ceiq_report {
  ceiq::EvaluationReport report;
};

namespace {

thread_local std::string g_last_error;

ceiq_status status_of(ceiq::ErrorKind kind) {
  switch (kind) {
    case ceiq::ErrorKind::kInvalidArgument: return CEIQ_ERR_INVALID_ARGUMENT;
    case ceiq::ErrorKind::kIo: return CEIQ_ERR_IO;
    case ceiq::ErrorKind::kParse: return CEIQ_ERR_PARSE;
    case ceiq::ErrorKind::kDegenerate: return CEIQ_ERR_DEGENERATE;
    case ceiq::ErrorKind::kConvergence: return CEIQ_ERR_CONVERGENCE;
  }
  return CEIQ_ERR_INTERNAL;
}

template <typename F>
ceiq_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return CEIQ_OK;
  } catch (const ceiq::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CEIQ_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CEIQ_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return CEIQ_ERR_INTERNAL;
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw ceiq::InvalidArgument(what);
}

char* dup_string(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

ceiq::FeatureOptions feature_options(const ceiq_extract_options* opts) {
  ceiq_extract_options o;
  ceiq_extract_options_init(&o);
  if (opts) o = *opts;
  ceiq::FeatureOptions f;
  f.bins = o.bins;
  f.ssim.auto_downsample = o.ssim_auto_downsample != 0;
  return f;
}

ceiq_features to_c(const ceiq::FeatureVector& fv) {
  return {fv.s_ge, fv.e_g, fv.e_e, fv.e_ge, fv.e_eg};
}

ceiq::FeatureVector from_c(const ceiq_features& f) {
  return {f.s_ge, f.e_g, f.e_e, f.e_ge, f.e_eg};
}

ceiq::SvrParams svr_params(const ceiq_svr_params* params) {
  ceiq_svr_params p;
  ceiq_svr_params_init(&p);
  if (params) p = *params;
  ceiq::SvrParams s;
  s.c = p.c;
  s.epsilon = p.epsilon;
  s.seed = p.seed;
  s.max_passes = p.max_passes;
  s.tolerance = p.tolerance;
  return s;
}

ceiq::LogisticKind logistic_kind(int params) {
  if (params == 5) return ceiq::LogisticKind::kFiveParameter;
  if (params == 4) return ceiq::LogisticKind::kFourParameter;
  throw ceiq::InvalidArgument("logistic_params must be 4 or 5, got " +
                              std::to_string(params));
}

void protocol_options(const ceiq_protocol* protocol,
                      const ceiq_svr_params* params, ceiq::SplitProtocol& p,
                      ceiq::EvalOptions& e) {
  ceiq_protocol c;
  ceiq_protocol_init(&c);
  if (protocol) c = *protocol;
  p.train_fraction = c.train_fraction;
  p.repetitions = c.repetitions;
  p.base_seed = c.base_seed;
  e.svr = svr_params(params);
  e.logistic = logistic_kind(c.logistic_params);
  e.threads = c.threads;
}

const ceiq::Dataset& featured(const ceiq_dataset* ds) {
  require(ds != nullptr, "dataset is null");
  if (!ds->has_features) {
    throw ceiq::InvalidArgument("dataset '" + ds->data.manifest.name +
                                "' has no features; compute them first");
  }
  return ds->data;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

extern "C" {

const char* ceiq_version(void) { return ceiq::kToolVersion; }

const char* ceiq_last_error(void) { return g_last_error.c_str(); }

const char* ceiq_status_name(ceiq_status status) {
  switch (status) {
    case CEIQ_OK: return "ok";
    case CEIQ_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CEIQ_ERR_IO: return "I/O error";
    case CEIQ_ERR_PARSE: return "parse error";
    case CEIQ_ERR_DEGENERATE: return "degenerate input";
    case CEIQ_ERR_CONVERGENCE: return "convergence failure";
    case CEIQ_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void ceiq_free(void* p) { std::free(p); }

void ceiq_extract_options_init(ceiq_extract_options* opts) {
  if (!opts) return;
  opts->bins = ceiq::kDefaultBins;
  opts->ssim_auto_downsample = 1;
}

ceiq_status ceiq_extract_file(const char* path, const ceiq_extract_options* opts,
                              ceiq_features* out) {
  return guarded([&] {
    require(path && out, "path and out must be non-null");
    *out = to_c(ceiq::extract_features(ceiq::load_image(path), feature_options(opts)));
  });
}

ceiq_status ceiq_extract_rgb(const uint8_t* rgb, int width, int height,
                             const ceiq_extract_options* opts, ceiq_features* out) {
  return guarded([&] {
    require(rgb && out, "pixels and out must be non-null");
    require(width > 0 && height > 0, "image dimensions must be positive");
    const std::size_t n = 3 * static_cast<std::size_t>(width) * height;
    ceiq::RgbImage img(width, height, std::vector<std::uint8_t>(rgb, rgb + n));
    *out = to_c(ceiq::extract_features(img, feature_options(opts)));
  });
}

ceiq_status ceiq_extract_gray(const uint8_t* gray, int width, int height,
                              const ceiq_extract_options* opts, ceiq_features* out) {
  return guarded([&] {
    require(gray && out, "pixels and out must be non-null");
    require(width > 0 && height > 0, "image dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(width) * height;
    ceiq::GrayImage img(width, height, std::vector<std::uint8_t>(gray, gray + n));
    *out = to_c(ceiq::extract_features(img, feature_options(opts)));
  });
}

ceiq_status ceiq_extract_batch(const char* const* paths, size_t n,
                               const ceiq_extract_options* opts, int threads,
                               const char* cache_path, ceiq_features* out, int* ok,
                               ceiq_diagnostic_fn on_failure, void* user,
                               size_t* n_ok) {
  return guarded([&] {
    require((paths && out && ok) || n == 0, "paths, out and ok must be non-null");
    std::vector<std::string> p;
    p.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      require(paths[i] != nullptr, "null path in batch");
      p.emplace_back(paths[i]);
    }
    std::optional<ceiq::FeatureCache> cache;
    if (cache_path && *cache_path) {
      cache.emplace(cache_path);
      cache->load();
    }
    const ceiq::BatchResult r = ceiq::extract_batch(
        p, feature_options(opts), threads, cache ? &*cache : nullptr);
    size_t good = 0;
    for (size_t i = 0; i < n; ++i) {
      ok[i] = r.features[i].has_value() ? 1 : 0;
      out[i] = r.features[i] ? to_c(*r.features[i]) : ceiq_features{};
      good += ok[i];
    }
    if (on_failure) {
      for (const auto& f : r.failures) {
        on_failure(user, f.index, f.path.c_str(), status_of(f.kind), f.message.c_str());
      }
    }
    if (cache && cache->dirty()) cache->save();
    if (n_ok) *n_ok = good;
  });
}

ceiq_status ceiq_bench_file(const char* path, const ceiq_extract_options* opts,
                            int repetitions, ceiq_stage_timings* out,
                            ceiq_features* features) {
  return guarded([&] {
    require(path && out, "path and out must be non-null");
    require(repetitions >= 1, "repetitions must be >= 1");
    const ceiq::FeatureOptions fo = feature_options(opts);
    std::vector<double> dec, col, eq, sim, ent, tot;
    ceiq::FeatureVector fv;
    for (int r = 0; r < repetitions; ++r) {
      const auto t0 = std::chrono::steady_clock::now();
      const ceiq::DecodedImage img = ceiq::load_image(path);
      dec.push_back(seconds_since(t0));
      ceiq::StageTimings t;
      fv = ceiq::extract_features_timed(img, fo, t);
      col.push_back(t.decolorize);
      eq.push_back(t.equalize);
      sim.push_back(t.similarity);
      ent.push_back(t.entropy);
      tot.push_back(t.total);
    }
    out->decode = ceiq::median(dec);
    out->decolorize = ceiq::median(col);
    out->equalize = ceiq::median(eq);
    out->similarity = ceiq::median(sim);
    out->entropy = ceiq::median(ent);
    out->features_total = ceiq::median(tot);
    if (features) *features = to_c(fv);
  });
}

void ceiq_svr_params_init(ceiq_svr_params* params) {
  if (!params) return;
  const ceiq::SvrParams d;
  params->c = d.c;
  params->epsilon = d.epsilon;
  params->seed = d.seed;
  params->max_passes = d.max_passes;
  params->tolerance = d.tolerance;
}

ceiq_status ceiq_model_train(const ceiq_features* features, const double* scores,
                             size_t n, const ceiq_svr_params* params,
                             ceiq_model** out) {
  return guarded([&] {
    require(out != nullptr, "out must be non-null");
    *out = nullptr;
    require((features && scores) || n == 0, "features and scores must be non-null");
    ceiq::TrainingSet set;
    set.samples.reserve(n);
    for (size_t i = 0; i < n; ++i) set.samples.push_back({from_c(features[i]), scores[i]});
    auto m = std::make_unique<ceiq_model>();
    m->model = ceiq::train(set, svr_params(params));
    *out = m.release();
  });
}

ceiq_status ceiq_model_predict(const ceiq_model* model, const ceiq_features* features,
                               double* out) {
  return guarded([&] {
    require(model && features && out, "arguments must be non-null");
    *out = model->model.predict(from_c(*features));
  });
}

ceiq_status ceiq_model_parameters(const ceiq_model* model, double* weights,
                                  double* bias) {
  return guarded([&] {
    require(model != nullptr, "model is null");
    if (weights) {
      for (int k = 0; k < ceiq::kFeatureCount; ++k) weights[k] = model->model.weights[k];
    }
    if (bias) *bias = model->model.bias;
  });
}

ceiq_status ceiq_model_add_comment(ceiq_model* model, const char* comment) {
  return guarded([&] {
    require(model && comment, "arguments must be non-null");
    const std::string c(comment);
    require(c.find_first_of("\r\n") == std::string::npos,
            "model comments must be a single line");
    model->model.comments.push_back(c);
  });
}

ceiq_status ceiq_model_serialize(const ceiq_model* model, char** out) {
  return guarded([&] {
    require(model && out, "arguments must be non-null");
    *out = dup_string(ceiq::serialize(model->model));
  });
}

ceiq_status ceiq_model_deserialize(const char* text, ceiq_model** out) {
  return guarded([&] {
    require(text && out, "arguments must be non-null");
    *out = nullptr;
    auto m = std::make_unique<ceiq_model>();
    m->model = ceiq::deserialize(text);
    *out = m.release();
  });
}

ceiq_status ceiq_model_save(const ceiq_model* model, const char* path) {
  return guarded([&] {
    require(model && path, "arguments must be non-null");
    ceiq::save_model(path, model->model);
  });
}

ceiq_status ceiq_model_load(const char* path, ceiq_model** out) {
  return guarded([&] {
    require(path && out, "arguments must be non-null");
    *out = nullptr;
    auto m = std::make_unique<ceiq_model>();
    m->model = ceiq::load_model(path);
    *out = m.release();
  });
}

void ceiq_model_free(ceiq_model* model) { delete model; }

ceiq_status ceiq_srocc(const double* x, const double* y, size_t n, double* out) {
  return guarded([&] {
    require(x && y && out, "arguments must be non-null");
    *out = ceiq::srocc({x, n}, {y, n});
  });
}

ceiq_status ceiq_krocc(const double* x, const double* y, size_t n, double* out) {
  return guarded([&] {
    require(x && y && out, "arguments must be non-null");
    *out = ceiq::krocc({x, n}, {y, n});
  });
}

ceiq_status ceiq_plcc_logistic(const double* objective, const double* subjective,
                               size_t n, int logistic_params, double* plcc,
                               double* params) {
  return guarded([&] {
    require(objective && subjective && plcc, "arguments must be non-null");
    const ceiq::LogisticFit fit = ceiq::plcc_logistic(
        {objective, n}, {subjective, n}, logistic_kind(logistic_params));
    *plcc = fit.plcc;
    if (params) std::copy(fit.params.begin(), fit.params.end(), params);
  });
}

ceiq_status ceiq_dataset_load(const char* manifest_path, ceiq_dataset** out) {
  return guarded([&] {
    require(manifest_path && out, "arguments must be non-null");
    *out = nullptr;
    auto ds = std::make_unique<ceiq_dataset>();
    ds->data.manifest = ceiq::load_manifest(manifest_path);
    *out = ds.release();
  });
}

size_t ceiq_dataset_size(const ceiq_dataset* ds) {
  return ds ? ds->data.manifest.entries.size() : 0;
}

const char* ceiq_dataset_name(const ceiq_dataset* ds) {
  return ds ? ds->data.manifest.name.c_str() : "";
}

ceiq_polarity ceiq_dataset_polarity(const ceiq_dataset* ds) {
  return ds && ds->data.manifest.polarity == ceiq::Polarity::kDmos
             ? CEIQ_POLARITY_DMOS
             : CEIQ_POLARITY_MOS;
}

ceiq_status ceiq_dataset_entry(const ceiq_dataset* ds, size_t index,
                               const char** image_path, double* score,
                               const char** ref_id) {
  return guarded([&] {
    require(ds != nullptr, "dataset is null");
    require(index < ds->data.manifest.entries.size(), "entry index out of range");
    const auto& e = ds->data.manifest.entries[index];
    if (image_path) *image_path = e.image_path.c_str();
    if (score) *score = e.score;
    if (ref_id) *ref_id = e.ref_id.c_str();
  });
}

ceiq_status ceiq_dataset_compute_features(ceiq_dataset* ds,
                                          const ceiq_extract_options* opts,
                                          int threads, const char* cache_path,
                                          size_t* cache_hits) {
  return guarded([&] {
    require(ds != nullptr, "dataset is null");
    std::optional<ceiq::FeatureCache> cache;
    if (cache_path && *cache_path) {
      cache.emplace(cache_path);
      cache->load();
    }
    std::size_t hits = 0;
    ceiq::Dataset built = ceiq::build_dataset(ds->data.manifest, feature_options(opts),
                                              threads, cache ? &*cache : nullptr, &hits);
    if (cache && cache->dirty()) cache->save();
    if (cache_hits) *cache_hits = hits;
    ds->data.features = std::move(built.features);
    ds->has_features = true;
  });
}

int ceiq_dataset_has_features(const ceiq_dataset* ds) {
  return ds && ds->has_features ? 1 : 0;
}

ceiq_status ceiq_dataset_features(const ceiq_dataset* ds, size_t index,
                                  ceiq_features* out) {
  return guarded([&] {
    const ceiq::Dataset& d = featured(ds);
    require(out != nullptr, "out must be non-null");
    require(index < d.features.size(), "entry index out of range");
    *out = to_c(d.features[index]);
  });
}

ceiq_status ceiq_dataset_train(const ceiq_dataset* ds, const ceiq_svr_params* params,
                               ceiq_model** out) {
  return guarded([&] {
    require(out != nullptr, "out must be non-null");
    *out = nullptr;
    const ceiq::Dataset& d = featured(ds);
    auto m = std::make_unique<ceiq_model>();
    m->model = ceiq::train(d.training_set(), svr_params(params));
    *out = m.release();
  });
}

ceiq_status ceiq_dataset_split(const ceiq_dataset* ds, double train_fraction,
                               uint64_t seed, int* in_train) {
  return guarded([&] {
    require(ds && in_train, "arguments must be non-null");
    const ceiq::Split s = ceiq::split_by_reference(ds->data.manifest, train_fraction, seed);
    for (int i : s.train) in_train[i] = 1;
    for (int i : s.test) in_train[i] = 0;
  });
}

void ceiq_dataset_free(ceiq_dataset* ds) { delete ds; }

void ceiq_protocol_init(ceiq_protocol* protocol) {
  if (!protocol) return;
  const ceiq::SplitProtocol d;
  protocol->train_fraction = d.train_fraction;
  protocol->repetitions = d.repetitions;
  protocol->base_seed = d.base_seed;
  protocol->logistic_params = 5;
  protocol->threads = 1;
}

ceiq_status ceiq_evaluate(const ceiq_dataset* ds, const ceiq_protocol* protocol,
                          const ceiq_svr_params* params, ceiq_report** out) {
  return guarded([&] {
    require(out != nullptr, "out must be non-null");
    *out = nullptr;
    const ceiq::Dataset& d = featured(ds);
    ceiq::SplitProtocol p;
    ceiq::EvalOptions e;
    protocol_options(protocol, params, p, e);
    auto r = std::make_unique<ceiq_report>();
    r->report = ceiq::run_protocol(d, p, e);
    *out = r.release();
  });
}

ceiq_status ceiq_report_medians(const ceiq_report* report, double* srocc,
                                double* plcc, double* krocc, int* skipped) {
  return guarded([&] {
    require(report != nullptr, "report is null");
    if (srocc) *srocc = report->report.median_srocc;
    if (plcc) *plcc = report->report.median_plcc;
    if (krocc) *krocc = report->report.median_krocc;
    if (skipped) *skipped = report->report.skipped;
  });
}

ceiq_status ceiq_report_json(const ceiq_report* report, char** out) {
  return guarded([&] {
    require(report && out, "arguments must be non-null");
    *out = dup_string(ceiq::report_to_json(report->report));
  });
}

ceiq_status ceiq_report_split_csv(const ceiq_report* report, char** out) {
  return guarded([&] {
    require(report && out, "arguments must be non-null");
    *out = dup_string(ceiq::per_split_csv(report->report));
  });
}

void ceiq_report_free(ceiq_report* report) { delete report; }

ceiq_status ceiq_split_ratio_sweep(const ceiq_dataset* ds, const double* ratios,
                                   size_t n, const ceiq_protocol* protocol,
                                   const ceiq_svr_params* params,
                                   double* median_srocc, char** csv) {
  return guarded([&] {
    require(ratios != nullptr || n == 0, "ratios must be non-null");
    const ceiq::Dataset& d = featured(ds);
    ceiq::SplitProtocol p;
    ceiq::EvalOptions e;
    protocol_options(protocol, params, p, e);
    const auto sweep = ceiq::split_ratio_sweep(d, {ratios, n}, p, e);
    if (median_srocc) {
      for (size_t i = 0; i < n; ++i) median_srocc[i] = sweep[i].report.median_srocc;
    }
    if (csv) *csv = dup_string(ceiq::sweep_to_csv(sweep));
  });
}

ceiq_status ceiq_cross_database(const ceiq_dataset* train, const ceiq_dataset* test,
                                const ceiq_protocol* protocol,
                                const ceiq_svr_params* params,
                                ceiq_cross_result* out, char** json) {
  return guarded([&] {
    const ceiq::Dataset& a = featured(train);
    const ceiq::Dataset& b = featured(test);
    ceiq::SplitProtocol p;
    ceiq::EvalOptions e;
    protocol_options(protocol, params, p, e);
    const ceiq::CrossDatabaseResult r = ceiq::cross_database(a, b, e);
    if (out) *out = {r.scores.srocc, r.scores.plcc, r.scores.krocc};
    if (json) *json = dup_string(ceiq::cross_result_to_json(r, e));
  });
}

void ceiq_synth_options_init(ceiq_synth_options* opts) {
  if (!opts) return;
  const ceiq::SynthOptions d;
  opts->references = d.references;
  opts->width = d.width;
  opts->height = d.height;
  opts->seed = d.seed;
  opts->reference_paths = nullptr;
  opts->n_reference_paths = 0;
}

ceiq_status ceiq_synthesize_corpus(const char* dir, const ceiq_synth_options* opts,
                                   char** manifest_path) {
  return guarded([&] {
    require(dir != nullptr, "dir must be non-null");
    ceiq_synth_options c;
    ceiq_synth_options_init(&c);
    if (opts) c = *opts;
    require(c.width > 0 && c.height > 0, "synthetic image size must be positive");
    ceiq::SynthOptions s;
    s.references = c.references;
    s.width = c.width;
    s.height = c.height;
    s.seed = c.seed;
    for (size_t i = 0; i < c.n_reference_paths; ++i) {
      require(c.reference_paths && c.reference_paths[i], "null reference path");
      s.reference_paths.emplace_back(c.reference_paths[i]);
    }
    ceiq::write_synthetic_corpus(dir, s);
    if (manifest_path) {
      *manifest_path = dup_string((std::filesystem::absolute(dir) / "manifest.csv").string());
    }
  });
}

}  // extern "C"
