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

// ceiq command-line tool. Everything goes through the C API in libceiq.
//
// Exit codes: 0 success, 1 usage or invalid argument, 2 I/O, 3 parse,
// 4 numeric (degenerate input or solver failure), 5 internal.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "ceiq/ceiq.h"

namespace {

enum ExitCode {
  kExitOk = 0,
  kExitUsage = 1,
  kExitIo = 2,
  kExitParse = 3,
  kExitNumeric = 4,
  kExitInternal = 5,
};

int exit_code(ceiq_status s) {
  switch (s) {
    case CEIQ_OK: return kExitOk;
    case CEIQ_ERR_INVALID_ARGUMENT: return kExitUsage;
    case CEIQ_ERR_IO: return kExitIo;
    case CEIQ_ERR_PARSE: return kExitParse;
    case CEIQ_ERR_DEGENERATE:
    case CEIQ_ERR_CONVERGENCE: return kExitNumeric;
    case CEIQ_ERR_INTERNAL: return kExitInternal;
  }
  return kExitInternal;
}

// Carries a library failure up to main.
struct Failure {
  ceiq_status status;
  std::string message;
};

void check(ceiq_status s) {
  if (s != CEIQ_OK) throw Failure{s, ceiq_last_error()};
}

struct ModelDeleter {
  void operator()(ceiq_model* m) const { ceiq_model_free(m); }
};
struct DatasetDeleter {
  void operator()(ceiq_dataset* d) const { ceiq_dataset_free(d); }
};
struct ReportDeleter {
  void operator()(ceiq_report* r) const { ceiq_report_free(r); }
};
struct StringDeleter {
  void operator()(char* s) const { ceiq_free(s); }
};
using ModelPtr = std::unique_ptr<ceiq_model, ModelDeleter>;
using DatasetPtr = std::unique_ptr<ceiq_dataset, DatasetDeleter>;
using ReportPtr = std::unique_ptr<ceiq_report, ReportDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

int default_threads() {
  if (const char* env = std::getenv("CEIQ_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<int>(v);
    std::cerr << "warning: ignoring CEIQ_THREADS='" << env << "'\n";
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Writes to `path`, or stdout when path is empty or "-".
void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Failure{CEIQ_ERR_IO, "cannot write '" + path + "'"};
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

struct FeatureFlags {
  int bins = 128;
  bool no_downsample = false;

  void add(CLI::App* app) {
    app->add_option("--bins", bins, "Histogram bins")
        ->check(CLI::Range(1, 256))
        ->capture_default_str();
    app->add_flag("--no-ssim-downsample", no_downsample,
                  "Compute SSIM at full resolution");
  }
  ceiq_extract_options options() const {
    ceiq_extract_options o;
    ceiq_extract_options_init(&o);
    o.bins = bins;
    o.ssim_auto_downsample = no_downsample ? 0 : 1;
    return o;
  }
};

struct SvrFlags {
  double c = 1.0;
  double epsilon = 0.1;
  std::uint64_t seed = 0;

  void add(CLI::App* app, bool with_seed) {
    app->add_option("--C", c, "SVR box constraint")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--epsilon", epsilon, "SVR insensitive-tube half width")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    if (with_seed) {
      app->add_option("--seed", seed, "Solver seed")->capture_default_str();
    }
  }
  ceiq_svr_params params() const {
    ceiq_svr_params p;
    ceiq_svr_params_init(&p);
    p.c = c;
    p.epsilon = epsilon;
    p.seed = seed;
    return p;
  }
};

struct CacheFlags {
  std::string path;
  bool disabled = false;

  void add(CLI::App* app) {
    app->add_option("--cache", path,
                    "Feature cache CSV (default: <manifest>.ceiq-cache.csv)");
    app->add_flag("--no-cache", disabled, "Do not read or write a feature cache");
  }
  std::string resolve(const std::string& manifest) const {
    if (disabled) return {};
    return path.empty() ? manifest + ".ceiq-cache.csv" : path;
  }
};

struct ProtocolFlags {
  double train_fraction = 0.8;
  int repetitions = 1000;
  std::uint64_t seed = 0;
  int logistic = 5;

  void add(CLI::App* app, bool with_fraction) {
    if (with_fraction) {
      app->add_option("--train-fraction", train_fraction,
                      "Fraction of reference groups used for training")
          ->check(CLI::Range(0.0, 1.0))
          ->capture_default_str();
    }
    app->add_option("--repetitions", repetitions, "Random splits")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--seed", seed, "Base seed; split r uses seed + r")
        ->capture_default_str();
    app->add_option("--logistic", logistic, "Logistic parameters for PLCC (4 or 5)")
        ->check(CLI::IsMember({4, 5}))
        ->capture_default_str();
  }
  ceiq_protocol protocol(int threads) const {
    ceiq_protocol p;
    ceiq_protocol_init(&p);
    p.train_fraction = train_fraction;
    p.repetitions = repetitions;
    p.base_seed = seed;
    p.logistic_params = logistic;
    p.threads = threads;
    return p;
  }
};

DatasetPtr load_dataset(const std::string& manifest, const FeatureFlags& features,
                        const CacheFlags& cache, int threads) {
  ceiq_dataset* raw = nullptr;
  check(ceiq_dataset_load(manifest.c_str(), &raw));
  DatasetPtr ds(raw);
  const ceiq_extract_options o = features.options();
  const std::string cache_path = cache.resolve(manifest);
  size_t hits = 0;
  check(ceiq_dataset_compute_features(ds.get(), &o, threads,
                                      cache_path.empty() ? nullptr : cache_path.c_str(),
                                      &hits));
  if (!cache_path.empty()) {
    std::cerr << ceiq_dataset_name(ds.get()) << ": " << hits << "/"
              << ceiq_dataset_size(ds.get()) << " feature vectors from cache\n";
  }
  return ds;
}

void print_failure(void*, size_t, const char* path, ceiq_status status,
                   const char* message) {
  std::cerr << "warning: skipping '" << path << "' (" << ceiq_status_name(status)
            << "): " << message << "\n";
}

struct ExtractCmd {
  std::vector<std::string> images;
  std::string manifest;
  std::string output;
  FeatureFlags features;
  CacheFlags cache;

  int run(int threads) {
    std::vector<std::string> paths = images;
    if (!manifest.empty()) {
      ceiq_dataset* raw = nullptr;
      check(ceiq_dataset_load(manifest.c_str(), &raw));
      DatasetPtr ds(raw);
      for (size_t i = 0; i < ceiq_dataset_size(ds.get()); ++i) {
        const char* p = nullptr;
        check(ceiq_dataset_entry(ds.get(), i, &p, nullptr, nullptr));
        paths.emplace_back(p);
      }
    }
    if (paths.empty()) throw Failure{CEIQ_ERR_INVALID_ARGUMENT, "no input images"};

    std::vector<const char*> cpaths;
    for (const auto& p : paths) cpaths.push_back(p.c_str());
    std::vector<ceiq_features> out(paths.size());
    std::vector<int> ok(paths.size());
    const ceiq_extract_options o = features.options();
    const std::string cache_path = cache.disabled ? std::string() : cache.path;
    size_t n_ok = 0;
    check(ceiq_extract_batch(cpaths.data(), cpaths.size(), &o, threads,
                             cache_path.empty() ? nullptr : cache_path.c_str(),
                             out.data(), ok.data(), print_failure, nullptr, &n_ok));
    if (n_ok == 0) {
      // Report the first failure's category through the exit code.
      ceiq_features probe;
      const ceiq_status s = ceiq_extract_file(cpaths[0], &o, &probe);
      throw Failure{s == CEIQ_OK ? CEIQ_ERR_INTERNAL : s,
                    "no image could be processed"};
    }
    std::string csv = "image_path,s_ge,e_g,e_e,e_ge,e_eg\n";
    for (size_t i = 0; i < paths.size(); ++i) {
      if (!ok[i]) continue;
      const ceiq_features& f = out[i];
      csv += paths[i];
      for (double v : {f.s_ge, f.e_g, f.e_e, f.e_ge, f.e_eg}) csv += "," + fmt("%.9g", v);
      csv += "\n";
    }
    write_output(output, csv);
    return kExitOk;
  }
};

struct TrainCmd {
  std::string manifest;
  std::string output;
  FeatureFlags features;
  SvrFlags svr;
  CacheFlags cache;

  int run(int threads) {
    DatasetPtr ds = load_dataset(manifest, features, cache, threads);
    const ceiq_svr_params p = svr.params();
    ceiq_model* raw = nullptr;
    check(ceiq_dataset_train(ds.get(), &p, &raw));
    ModelPtr model(raw);
    check(ceiq_model_add_comment(model.get(),
                                 ("trained on " + std::string(ceiq_dataset_name(ds.get())) +
                                  " (" + std::to_string(ceiq_dataset_size(ds.get())) +
                                  " images, bins=" + std::to_string(features.bins) + ")")
                                     .c_str()));
    check(ceiq_model_save(model.get(), output.c_str()));
    return kExitOk;
  }
};

struct PredictCmd {
  std::string model_path;
  std::vector<std::string> images;
  FeatureFlags features;

  int run(int) {
    ceiq_model* raw = nullptr;
    check(ceiq_model_load(model_path.c_str(), &raw));
    ModelPtr model(raw);
    const ceiq_extract_options o = features.options();
    for (const auto& path : images) {
      ceiq_features f;
      check(ceiq_extract_file(path.c_str(), &o, &f));
      double score = 0.0;
      check(ceiq_model_predict(model.get(), &f, &score));
      std::cout << path << '\t' << fmt("%.9g", score) << '\n';
    }
    return kExitOk;
  }
};

struct EvaluateCmd {
  std::string manifest;
  std::string output;
  std::string splits_csv;
  FeatureFlags features;
  SvrFlags svr;
  ProtocolFlags protocol;
  CacheFlags cache;

  int run(int threads) {
    DatasetPtr ds = load_dataset(manifest, features, cache, threads);
    const ceiq_svr_params p = svr.params();
    const ceiq_protocol proto = protocol.protocol(threads);
    ceiq_report* raw = nullptr;
    check(ceiq_evaluate(ds.get(), &proto, &p, &raw));
    ReportPtr report(raw);
    char* json = nullptr;
    check(ceiq_report_json(report.get(), &json));
    StringPtr json_owner(json);
    write_output(output, json);
    if (!splits_csv.empty()) {
      char* csv = nullptr;
      check(ceiq_report_split_csv(report.get(), &csv));
      StringPtr csv_owner(csv);
      write_output(splits_csv, csv);
    }
    double srocc = 0, plcc = 0, krocc = 0;
    int skipped = 0;
    check(ceiq_report_medians(report.get(), &srocc, &plcc, &krocc, &skipped));
    std::cerr << ceiq_dataset_name(ds.get()) << ": median SROCC " << fmt("%.4f", srocc)
              << ", PLCC " << fmt("%.4f", plcc) << ", KROCC " << fmt("%.4f", krocc)
              << " over " << protocol.repetitions - skipped << " splits";
    if (skipped) std::cerr << " (" << skipped << " skipped)";
    std::cerr << "\n";
    return kExitOk;
  }
};

struct CrossDbCmd {
  std::string train_manifest;
  std::string test_manifest;
  std::string output;
  FeatureFlags features;
  SvrFlags svr;
  int logistic = 5;
  bool no_cache = false;

  int run(int threads) {
    CacheFlags cache;
    cache.disabled = no_cache;
    DatasetPtr train = load_dataset(train_manifest, features, cache, threads);
    DatasetPtr test = load_dataset(test_manifest, features, cache, threads);
    const ceiq_svr_params p = svr.params();
    ceiq_protocol proto;
    ceiq_protocol_init(&proto);
    proto.logistic_params = logistic;
    ceiq_cross_result r;
    char* json = nullptr;
    check(ceiq_cross_database(train.get(), test.get(), &proto, &p, &r, &json));
    StringPtr owner(json);
    write_output(output, json);
    return kExitOk;
  }
};

struct SweepCmd {
  std::string manifest;
  std::string output;
  std::vector<double> ratios = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  FeatureFlags features;
  SvrFlags svr;
  ProtocolFlags protocol;
  CacheFlags cache;

  int run(int threads) {
    DatasetPtr ds = load_dataset(manifest, features, cache, threads);
    const ceiq_svr_params p = svr.params();
    const ceiq_protocol proto = protocol.protocol(threads);
    std::vector<double> med(ratios.size());
    char* csv = nullptr;
    check(ceiq_split_ratio_sweep(ds.get(), ratios.data(), ratios.size(), &proto, &p,
                                 med.data(), &csv));
    StringPtr owner(csv);
    write_output(output, csv);
    return kExitOk;
  }
};

struct BenchCmd {
  std::string image;
  int repetitions = 10;
  std::string csv_path;
  FeatureFlags features;

  int run(int) {
    const ceiq_extract_options o = features.options();
    ceiq_stage_timings t;
    check(ceiq_bench_file(image.c_str(), &o, repetitions, &t, nullptr));
    std::string csv = "stage,median_seconds\n";
    const std::pair<const char*, double> rows[] = {
        {"decode", t.decode},         {"decolorize", t.decolorize},
        {"equalize", t.equalize},     {"ssim", t.similarity},
        {"entropy", t.entropy},       {"features_total", t.features_total},
    };
    for (const auto& [name, v] : rows) csv += std::string(name) + "," + fmt("%.9g", v) + "\n";
    write_output(csv_path, csv);
    std::cerr << image << ": feature extraction " << fmt("%.4f", t.features_total)
              << " s median over " << repetitions << " run"
              << (repetitions == 1 ? "" : "s") << " (gray " << fmt("%.4f", t.decolorize)
              << ", equalize " << fmt("%.4f", t.equalize) << ", SSIM "
              << fmt("%.4f", t.similarity) << ", entropies " << fmt("%.4f", t.entropy)
              << "; decode " << fmt("%.4f", t.decode) << " s not included)\n";
    return kExitOk;
  }
};

struct ScatterCmd {
  std::string manifest;
  std::string synthesize;
  std::string feature = "s_ge";
  std::string output;
  FeatureFlags features;
  CacheFlags cache;

  int run(int threads) {
    std::string path = manifest;
    if (!synthesize.empty()) {
      char* m = nullptr;
      check(ceiq_synthesize_corpus(synthesize.c_str(), nullptr, &m));
      StringPtr owner(m);
      path = m;
      std::cerr << "wrote synthetic corpus manifest " << path << "\n";
    }
    if (path.empty()) {
      throw Failure{CEIQ_ERR_INVALID_ARGUMENT, "give a manifest or --synthesize DIR"};
    }
    DatasetPtr ds = load_dataset(path, features, cache, threads);
    const size_t n = ceiq_dataset_size(ds.get());
    std::vector<double> subj(n), feat(n);
    for (size_t i = 0; i < n; ++i) {
      check(ceiq_dataset_entry(ds.get(), i, nullptr, &subj[i], nullptr));
      ceiq_features f;
      check(ceiq_dataset_features(ds.get(), i, &f));
      feat[i] = feature == "s_ge"   ? f.s_ge
                : feature == "e_g"  ? f.e_g
                : feature == "e_e"  ? f.e_e
                : feature == "e_ge" ? f.e_ge
                                    : f.e_eg;
    }
    const bool dmos = ceiq_dataset_polarity(ds.get()) == CEIQ_POLARITY_DMOS;
    std::string csv = std::string(dmos ? "dmos" : "mos") + "," + feature + "\n";
    for (size_t i = 0; i < n; ++i) {
      csv += fmt("%.9g", subj[i]) + "," + fmt("%.9g", feat[i]) + "\n";
    }
    double rho = 0.0;
    check(ceiq_srocc(feat.data(), subj.data(), n, &rho));
    write_output(output, csv);
    std::cerr << ceiq_dataset_name(ds.get()) << ": SROCC(" << feature << ", "
              << (dmos ? "DMOS" : "MOS") << ") = " << fmt("%.4f", rho) << "\n";
    return kExitOk;
  }
};

struct SynthCmd {
  std::string dir;
  int references = 20;
  int size = 256;
  std::uint64_t seed = 1;
  std::vector<std::string> from;

  int run(int) {
    ceiq_synth_options o;
    ceiq_synth_options_init(&o);
    o.references = references;
    o.width = size;
    o.height = size;
    o.seed = seed;
    std::vector<const char*> refs;
    for (const auto& f : from) refs.push_back(f.c_str());
    o.reference_paths = refs.empty() ? nullptr : refs.data();
    o.n_reference_paths = refs.size();
    char* m = nullptr;
    check(ceiq_synthesize_corpus(dir.c_str(), &o, &m));
    StringPtr owner(m);
    std::cout << m << "\n";
    return kExitOk;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"No-reference quality assessment of contrast-distorted images"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("ceiq ") + ceiq_version());
  int threads = default_threads();
  app.add_option("-j,--threads", threads,
                 "Worker threads (default: $CEIQ_THREADS or all cores)")
      ->check(CLI::Range(1, 1024));

  ExtractCmd extract;
  auto* c_extract = app.add_subcommand("extract", "Write the feature table of images");
  c_extract->add_option("images", extract.images, "Image files");
  c_extract->add_option("-m,--manifest", extract.manifest, "Also read images from a manifest");
  c_extract->add_option("-o,--output", extract.output, "Output CSV (default stdout)");
  extract.features.add(c_extract);
  c_extract->add_option("--cache", extract.cache.path, "Feature cache CSV");

  TrainCmd train;
  auto* c_train = app.add_subcommand("train", "Train a model on a manifest");
  c_train->add_option("manifest", train.manifest, "Manifest CSV")->required();
  c_train->add_option("-o,--output", train.output, "Model file")->required();
  train.features.add(c_train);
  train.svr.add(c_train, true);
  train.cache.add(c_train);

  PredictCmd predict;
  auto* c_predict = app.add_subcommand("predict", "Score images with a trained model");
  c_predict->add_option("-M,--model", predict.model_path, "Model file")->required();
  c_predict->add_option("images", predict.images, "Image files")->required();
  predict.features.add(c_predict);

  EvaluateCmd evaluate;
  auto* c_eval = app.add_subcommand("evaluate", "Median criteria over random splits");
  c_eval->add_option("manifest", evaluate.manifest, "Manifest CSV")->required();
  c_eval->add_option("-o,--output", evaluate.output, "JSON report (default stdout)");
  c_eval->add_option("--splits-csv", evaluate.splits_csv, "Per-split CSV");
  evaluate.features.add(c_eval);
  evaluate.svr.add(c_eval, false);
  evaluate.protocol.add(c_eval, true);
  evaluate.cache.add(c_eval);

  CrossDbCmd crossdb;
  auto* c_cross = app.add_subcommand("crossdb", "Train on one manifest, test on another");
  c_cross->add_option("train", crossdb.train_manifest, "Training manifest")->required();
  c_cross->add_option("test", crossdb.test_manifest, "Test manifest")->required();
  c_cross->add_option("-o,--output", crossdb.output, "JSON report (default stdout)");
  crossdb.features.add(c_cross);
  crossdb.svr.add(c_cross, true);
  c_cross->add_option("--logistic", crossdb.logistic, "Logistic parameters (4 or 5)")
      ->check(CLI::IsMember({4, 5}));
  c_cross->add_flag("--no-cache", crossdb.no_cache, "Do not use feature caches");

  SweepCmd sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Median SROCC across train fractions");
  c_sweep->add_option("manifest", sweep.manifest, "Manifest CSV")->required();
  c_sweep->add_option("-o,--output", sweep.output, "CSV (default stdout)");
  c_sweep->add_option("--ratios", sweep.ratios, "Train fractions")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sweep.features.add(c_sweep);
  sweep.svr.add(c_sweep, false);
  sweep.protocol.add(c_sweep, false);
  sweep.cache.add(c_sweep);

  BenchCmd bench;
  auto* c_bench = app.add_subcommand("bench", "Time the feature stages on one image");
  c_bench->add_option("image", bench.image, "Image file")->required();
  c_bench->add_option("-r,--repetitions", bench.repetitions, "Timed runs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  c_bench->add_option("-o,--csv", bench.csv_path, "Timing CSV (default stdout)");
  bench.features.add(c_bench);

  ScatterCmd scatter;
  auto* c_scatter = app.add_subcommand("scatter", "Subjective score vs one feature");
  c_scatter->add_option("manifest", scatter.manifest, "Manifest CSV");
  c_scatter->add_option("--synthesize", scatter.synthesize,
                        "Generate the synthetic corpus into DIR and use it");
  c_scatter->add_option("-f,--feature", scatter.feature, "Feature column")
      ->check(CLI::IsMember({"s_ge", "e_g", "e_e", "e_ge", "e_eg"}))
      ->capture_default_str();
  c_scatter->add_option("-o,--output", scatter.output, "CSV (default stdout)");
  scatter.features.add(c_scatter);
  scatter.cache.add(c_scatter);

  SynthCmd synth;
  auto* c_synth = app.add_subcommand("synth", "Write the synthetic contrast-distortion corpus");
  c_synth->add_option("dir", synth.dir, "Output directory")->required();
  c_synth->add_option("--references", synth.references, "Procedural scenes")
      ->check(CLI::Range(1, 10000))
      ->capture_default_str();
  c_synth->add_option("--size", synth.size, "Scene width and height")
      ->check(CLI::Range(16, 8192))
      ->capture_default_str();
  c_synth->add_option("--seed", synth.seed, "Scene seed")->capture_default_str();
  c_synth->add_option("--from", synth.from, "Use these images as reference scenes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c_extract) return extract.run(threads);
    if (*c_train) return train.run(threads);
    if (*c_predict) return predict.run(threads);
    if (*c_eval) return evaluate.run(threads);
    if (*c_cross) return crossdb.run(threads);
    if (*c_sweep) return sweep.run(threads);
    if (*c_bench) return bench.run(threads);
    if (*c_scatter) return scatter.run(threads);
    if (*c_synth) return synth.run(threads);
  } catch (const Failure& f) {
    std::cerr << "ceiq: " << ceiq_status_name(f.status) << ": " << f.message << "\n";
    return exit_code(f.status);
  }
  return kExitUsage;
}
