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

// Release acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails, except those named with
// --known-failure N (still printed as FAIL).
//
// Optional subjective databases, as manifests:
//   CEIQ_CSIQ_MANIFEST, CEIQ_TID2013_MANIFEST, CEIQ_CID2013_MANIFEST,
//   CEIQ_CCID2014_MANIFEST
// CEIQ_ACCEPTANCE_DIR keeps the generated corpus in a fixed place.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dataset.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "features.hpp"
#include "imageops.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "ssim.hpp"
#include "stats.hpp"
#include "svr.hpp"
#include "synth.hpp"

namespace fs = std::filesystem;
using namespace ceiq;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

int run_cli(const std::string& args) {
  const std::string cmd = quote(CEIQ_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Accumulates failed sub-checks of one criterion.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) failed_.push_back(what);
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool ok() const { return failed_.empty(); }
  std::string detail() const {
    std::string out;
    for (const auto& f : failed_) out += (out.empty() ? "" : "; ") + ("failed " + f);
    for (const auto& n : notes_) out += (out.empty() ? "" : "; ") + n;
    return out;
  }

 private:
  std::vector<std::string> failed_;
  std::vector<std::string> notes_;
};

struct Outcome {
  int id;
  bool pass;
};

std::vector<Outcome> g_outcomes;

void report(int id, const std::string& title, const Checks& c, double secs) {
  std::printf("criterion %d [PRIMARY] %s: %s (%.1f s) | %s\n", id, c.ok() ? "PASS" : "FAIL",
              title.c_str(), secs, c.detail().c_str());
  std::fflush(stdout);
  g_outcomes.push_back({id, c.ok()});
}

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

RgbImage as_rgb(const DecodedImage& d) {
  return std::holds_alternative<RgbImage>(d) ? std::get<RgbImage>(d)
                                             : gray_as_rgb(std::get<GrayImage>(d));
}

GrayImage random_gray(int w, int h, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> d(0, 255);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h);
  for (auto& v : px) v = static_cast<std::uint8_t>(d(gen));
  return GrayImage(w, h, std::move(px));
}

std::string data_path(const std::string& rel) {
  return std::string(CEIQ_TEST_DATA_DIR) + "/" + rel;
}

// --- criterion 1 ----------------------------------------------------------

void formula_suite() {
  const auto t0 = Clock::now();
  Checks c;
  auto gray = [](std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    return static_cast<double>(to_gray(RgbImage(1, 1, {r, g, b})).at(0, 0));
  };
  auto exact = [](double r, double g, double b) {
    return std::clamp(std::floor(0.2989 * r + 0.5870 * g + 0.1140 * b + 0.5), 0.0, 255.0);
  };
  const int probes[][3] = {{255, 0, 0}, {0, 255, 0},   {0, 0, 255},     {255, 255, 255},
                           {0, 0, 0},   {12, 200, 77}, {128, 128, 128}, {90, 40, 250}};
  for (const auto& p : probes) {
    const auto r = static_cast<std::uint8_t>(p[0]), g = static_cast<std::uint8_t>(p[1]),
               b = static_cast<std::uint8_t>(p[2]);
    c.expect(near(gray(r, g, b), exact(p[0], p[1], p[2]), 1e-6),
             "gray(" + std::to_string(p[0]) + "," + std::to_string(p[1]) + "," +
                 std::to_string(p[2]) + ")");
  }
  c.expect(gray(255, 0, 0) == 76 && gray(0, 255, 0) == 150 && gray(0, 0, 255) == 29,
           "primary gray values 76/150/29");

  const double h13 = entropy(histogram_from_counts({1, 3}));
  c.expect(near(h13, -0.25 * std::log2(0.25) - 0.75 * std::log2(0.75), 1e-6) &&
               near(h13, 0.811278, 1e-6),
           "entropy{1/4,3/4}");
  c.expect(near(entropy(histogram_from_counts({1, 1, 1, 1})), 2.0, 1e-6), "entropy uniform-4");
  c.expect(near(entropy(histogram_from_counts({2, 1, 1})), 1.5, 1e-6), "entropy{1/2,1/4,1/4}");
  c.expect(near(cross_entropy(histogram_from_counts({1, 1}), histogram_from_counts({1, 3})),
                1.207519, 1e-6),
           "cross entropy {1/2,1/2} under {1/4,3/4}");
  c.expect(near(cross_entropy(histogram_from_counts({1, 3}), histogram_from_counts({1, 1})),
                1.0, 1e-6),
           "cross entropy under uniform-2");
  c.expect(near(cross_entropy(histogram_from_counts({1, 0}), histogram_from_counts({1, 1})),
                1.0, 1e-6),
           "cross entropy with a zero bin");

  const GrayImage a = random_gray(64, 64, 5);
  c.expect(near(ssim(a, a).mean_ssim, 1.0, 1e-6), "SSIM identity");
  const double bw = ssim(GrayImage(64, 64, 0), GrayImage(64, 64, 255)).mean_ssim;
  c.expect(near(bw, 1.0e-4, 1e-6), "SSIM black vs white");
  c.note("SSIM(black, white) = " + fmt("%.6e", bw));
  report(1, "formula unit suite", c, seconds_since(t0));
}

// --- criterion 2 ----------------------------------------------------------

void oracle_suite() {
  const auto t0 = Clock::now();
  Checks c;
  SsimParams full;
  full.auto_downsample = false;
  double worst_ssim = 0.0;
  for (std::uint64_t k = 0; k < 20; ++k) {
    const GrayImage a = random_gray(32, 32, 7000 + k);
    GrayImage b = random_gray(32, 32, 8000 + k);
    for (std::size_t i = 0; i < b.data().size(); ++i) {
      b.data()[i] = static_cast<std::uint8_t>((a.data()[i] * 3 + b.data()[i]) / 4);
    }
    worst_ssim = std::max(worst_ssim, std::fabs(ssim(a, b, full).mean_ssim -
                                                oracle::brute_force_ssim(a, b)));
  }
  c.expect(worst_ssim <= 1e-8, "SSIM vs brute force");

  std::mt19937_64 gen(99);
  double worst_srocc = 0.0;
  int kendall_mismatch = 0, trials = 0;
  for (int t = 0; t < 300; ++t) {
    const int n = 3 + t % 60;
    std::uniform_int_distribution<int> dx(0, 2 + t % 9), dy(0, 1 + t % 5);
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = dx(gen);
    for (auto& v : y) v = dy(gen);
    const bool cx = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
    const bool cy = std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
    if (cx || cy) continue;
    ++trials;
    worst_srocc = std::max(worst_srocc, std::fabs(srocc(x, y) - oracle::srocc(x, y)));
    if (krocc(x, y) != oracle::tau_b(x, y)) ++kendall_mismatch;
  }
  c.expect(worst_srocc <= 1e-12, "SROCC vs rank-then-Pearson");
  c.expect(kendall_mismatch == 0, "KROCC vs pair enumeration");

  double worst_svr = 0.0;
  std::size_t instances = 0, max_n = 0;
  try {
    for (const auto& inst : oracle::load_svr_instances(data_path("svr_oracle"))) {
      SvrParams p;
      p.c = inst.c;
      p.epsilon = inst.epsilon;
      const SvrModel m = train(inst.set, p);
      const double rel = std::fabs(oracle::model_objective(m, inst.set) - inst.objective) /
                         std::fabs(inst.objective);
      worst_svr = std::max(worst_svr, rel);
      max_n = std::max(max_n, inst.set.samples.size());
      ++instances;
    }
  } catch (const std::exception& e) {
    c.expect(false, std::string("SVR oracle data: ") + e.what());
  }
  c.expect(instances == 10 && max_n <= 200, "10 SVR instances with n <= 200");
  c.expect(worst_svr <= 1e-4, "SVR objective vs convex solver");
  c.note("max |SSIM diff| " + fmt("%.2e", worst_ssim) + ", max |SROCC diff| " +
         fmt("%.2e", worst_srocc) + " over " + std::to_string(trials) +
         " tied samples, KROCC mismatches " + std::to_string(kendall_mismatch) +
         ", max SVR rel. objective gap " + fmt("%.2e", worst_svr));
  report(2, "oracle equivalence", c, seconds_since(t0));
}

// --- criterion 3 ----------------------------------------------------------

double contrast_factor_of(const std::string& path) {
  const std::string name = fs::path(path).stem().string();
  const auto at = name.find("_contrast");
  if (at == std::string::npos) return -1.0;
  return std::stod(name.substr(at + 9));
}

void premise_property(const Dataset& corpus) {
  const auto t0 = Clock::now();
  Checks c;
  int increasing = 0;
  std::string listing;
  const char* natural[] = {"astronaut.png", "camera.png", "chelsea.png",
                           "coffee.png",    "coins.png",  "rocket.jpg"};
  for (const char* name : natural) {
    const RgbImage img = as_rgb(load_image(data_path(std::string("natural/") + name)));
    double prev = -2.0;
    bool ok = true;
    std::string values;
    for (double f : {0.2, 0.4, 0.6, 0.8, 1.0}) {
      const double s = extract_features(scale_contrast(img, f)).s_ge;
      ok = ok && s > prev;
      prev = s;
      values += (values.empty() ? "" : "/") + fmt("%.3f", s);
    }
    if (ok) ++increasing;
    listing += std::string(listing.empty() ? "" : ", ") + name + (ok ? " inc " : " non-inc ") +
               values;
  }
  c.expect(increasing >= 3, "at least 3 natural images strictly increasing");
  c.note(std::to_string(increasing) + "/6 natural images strictly increasing (" + listing + ")");

  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> per_ref;
  for (std::size_t i = 0; i < corpus.manifest.entries.size(); ++i) {
    const auto& e = corpus.manifest.entries[i];
    const double f = contrast_factor_of(e.image_path);
    if (f < 0) continue;
    per_ref[e.ref_id].first.push_back(f);
    per_ref[e.ref_id].second.push_back(corpus.features[i].s_ge);
  }
  double worst = 1.0;
  for (const auto& [ref, xy] : per_ref) worst = std::min(worst, srocc(xy.first, xy.second));
  c.expect(per_ref.size() >= 2 && worst == 1.0, "synthetic SROCC(S_ge, contrast factor) = 1");
  c.note("min per-reference SROCC(S_ge, factor) over " + std::to_string(per_ref.size()) +
         " synthetic references = " + fmt("%.4f", worst));
  report(3, "premise property", c, seconds_since(t0));
}

// --- criterion 4 ----------------------------------------------------------

struct EvalRun {
  double median_srocc = 0.0;
  double median_plcc = 0.0;
  double median_krocc = 0.0;
  int skipped = 0;
  bool ok = false;
};

EvalRun reproducibility(const std::string& manifest, const std::string& work, int threads) {
  const auto t0 = Clock::now();
  Checks c;
  EvalRun out;
  const std::string common = "evaluate " + quote(manifest) + " --repetitions 1000 --seed 7";
  auto json = [&](const std::string& tag) { return work + "/eval_" + tag + ".json"; };
  auto csv = [&](const std::string& tag) { return work + "/eval_" + tag + ".csv"; };
  auto run = [&](const std::string& tag, int j) {
    return run_cli("-j " + std::to_string(j) + " " + common + " -o " + quote(json(tag)) +
                   " --splits-csv " + quote(csv(tag)));
  };

  fs::remove(manifest + ".ceiq-cache.csv");
  const auto cold0 = Clock::now();
  c.expect(run("cold", threads) == 0, "cold evaluate run");
  const double cold = seconds_since(cold0);
  const auto warm0 = Clock::now();
  c.expect(run("warm", threads) == 0, "warm evaluate run");
  const double warm = seconds_since(warm0);
  const auto single0 = Clock::now();
  c.expect(run("single", 1) == 0, "single-thread evaluate run");
  const double single = seconds_since(single0);

  const std::string ref = slurp(json("cold"));
  c.expect(!ref.empty() && ref == slurp(json("warm")), "byte-identical JSON across runs");
  c.expect(ref == slurp(json("single")), "byte-identical JSON across thread counts");
  c.expect(slurp(csv("cold")) == slurp(csv("warm")) && slurp(csv("cold")) == slurp(csv("single")),
           "byte-identical per-split CSV");
  c.expect(warm < 60.0, "1000 repetitions with a warm cache under 60 s");
  try {
    const auto j = nlohmann::json::parse(ref);
    out.median_srocc = j["median_srocc"];
    out.median_plcc = j["median_plcc"];
    out.median_krocc = j["median_krocc"];
    out.skipped = j["skipped"];
    out.ok = true;
  } catch (const std::exception& e) {
    c.expect(false, std::string("report parse: ") + e.what());
  }
  c.note("200-image manifest, 1000 repetitions: cold cache " + fmt("%.1f", cold) +
         " s, warm cache " + fmt("%.1f", warm) + " s on " + std::to_string(threads) +
         " threads, " + fmt("%.1f", single) + " s on 1 thread");
  report(4, "protocol reproducibility", c, seconds_since(t0));
  return out;
}

// --- criterion 5 ----------------------------------------------------------

struct PublishedRow {
  const char* env;
  const char* name;
  double ceiq_srocc;
  double sge_srocc;
};

void published_numbers(const EvalRun& synthetic, bool criteria_1_to_4, int threads) {
  const auto t0 = Clock::now();
  Checks c;
  const PublishedRow rows[] = {{"CEIQ_CSIQ_MANIFEST", "CSIQ", 0.9475, 0.6154},
                           {"CEIQ_TID2013_MANIFEST", "TID2013", 0.8193, 0.6491},
                           {"CEIQ_CID2013_MANIFEST", "CID2013", 0.8934, 0.8431},
                           {"CEIQ_CCID2014_MANIFEST", "CCID2014", 0.8363, 0.8120}};
  int available = 0;
  for (const auto& row : rows) {
    const char* path = std::getenv(row.env);
    if (!path || !*path) continue;
    ++available;
    try {
      FeatureCache cache(std::string(path) + ".ceiq-cache.csv");
      cache.load();
      const Dataset ds = build_dataset(load_manifest(path), {}, threads, &cache);
      cache.save();
      SplitProtocol p;
      p.repetitions = 1000;
      EvalOptions o;
      o.threads = threads;
      const EvaluationReport r = run_protocol(ds, p, o);
      std::vector<double> sge;
      for (const auto& f : ds.features) sge.push_back(f.s_ge);
      // DMOS databases correlate negatively; compare magnitudes.
      const double free_srocc = std::fabs(srocc(sge, ds.scores()));
      const double model_srocc = std::fabs(r.median_srocc);
      c.expect(near(model_srocc, row.ceiq_srocc, 0.05),
               std::string(row.name) + " median SROCC within 0.05");
      c.expect(near(free_srocc, row.sge_srocc, 0.03),
               std::string(row.name) + " S_ge SROCC within 0.03");
      c.note(std::string(row.name) + ": median SROCC " + fmt("%.4f", model_srocc) +
             " (published " + fmt("%.4f", row.ceiq_srocc) + "), S_ge SROCC " +
             fmt("%.4f", free_srocc) + " (published " + fmt("%.4f", row.sge_srocc) + ")");
    } catch (const std::exception& e) {
      c.expect(false, std::string(row.name) + ": " + e.what());
    }
  }
  if (available == 0) {
    c.note("no subjective database manifests set; synthetic fallback");
    c.expect(criteria_1_to_4, "criteria 1-4");
    c.expect(synthetic.ok && synthetic.median_srocc >= 0.95,
             "synthetic protocol median SROCC >= 0.95");
    c.note("synthetic median SROCC " + fmt("%.4f", synthetic.median_srocc) + ", PLCC " +
           fmt("%.4f", synthetic.median_plcc) + ", KROCC " + fmt("%.4f", synthetic.median_krocc) +
           ", skipped " + std::to_string(synthetic.skipped));
  }
  report(5, "published-number reproduction", c, seconds_since(t0));
}

// --- criterion 6 ----------------------------------------------------------

void runtime(const std::string& work) {
  const auto t0 = Clock::now();
  Checks c;
  const std::string image = work + "/bench_768x512.png";
  save_png(image, synth_reference(768, 512, 42));
  const DecodedImage decoded = load_image(image);
  std::vector<double> totals;
  for (int r = 0; r < 21; ++r) {
    StageTimings t;
    extract_features_timed(decoded, {}, t);
    totals.push_back(t.total);
  }
  const double med = median(totals);
  c.expect(med < 0.2, "median extraction under 0.2 s");

  const std::string csv = work + "/bench.csv";
  c.expect(run_cli("bench -r 5 " + quote(image) + " -o " + quote(csv)) == 0, "bench command");
  const std::string table = slurp(csv);
  for (const char* stage : {"decode,", "decolorize,", "equalize,", "ssim,", "entropy,",
                            "features_total,"}) {
    c.expect(table.find(std::string("\n") + stage) != std::string::npos,
             std::string("bench row ") + stage);
  }
  c.note("median features " + fmt("%.4f", med) + " s per 768x512 RGB image over 21 runs");
  report(6, "runtime", c, seconds_since(t0));
}

// --- criterion 7 ----------------------------------------------------------

void sweep(const Dataset& corpus, int threads) {
  const auto t0 = Clock::now();
  Checks c;
  const std::vector<double> ratios = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  SplitProtocol p;
  p.repetitions = 1000;
  EvalOptions o;
  o.threads = threads;
  try {
    const auto points = split_ratio_sweep(corpus, ratios, p, o);
    double lo = 2.0, hi = -2.0;
    std::string listing;
    for (const auto& pt : points) {
      lo = std::min(lo, pt.report.median_srocc);
      hi = std::max(hi, pt.report.median_srocc);
      listing += (listing.empty() ? "" : " ") + fmt("%.1f:", pt.train_fraction) +
                 fmt("%.4f", pt.report.median_srocc);
    }
    c.expect(hi - lo <= 0.08, "median SROCC spread <= 0.08");
    c.note("spread " + fmt("%.4f", hi - lo) + " (" + listing + ")");
  } catch (const std::exception& e) {
    c.expect(false, e.what());
  }
  report(7, "split-ratio sweep", c, seconds_since(t0));
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--known-failure" && i + 1 < argc) {
      known.insert(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--known-failure N]...\n", argv[0]);
      return 2;
    }
  }
  const int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  fs::path work;
  bool cleanup = false;
  if (const char* keep = std::getenv("CEIQ_ACCEPTANCE_DIR"); keep && *keep) {
    work = keep;
  } else {
    work = fs::temp_directory_path() / ("ceiq-acceptance-" + std::to_string(std::random_device{}()));
    cleanup = true;
  }
  fs::create_directories(work);
  const std::string corpus_dir = (work / "corpus").string();
  const std::string manifest = corpus_dir + "/manifest.csv";

  formula_suite();
  oracle_suite();

  // Default synthetic corpus: 20 references x 10 distortions.
  if (run_cli("synth " + quote(corpus_dir)) != 0) {
    std::printf("could not generate the synthetic corpus\n");
    return 1;
  }
  const Dataset corpus = build_dataset(load_manifest(manifest), {}, threads);
  premise_property(corpus);
  const EvalRun eval = reproducibility(manifest, work.string(), threads);
  bool first_four = true;
  for (const auto& o : g_outcomes) first_four = first_four && o.pass;
  published_numbers(eval, first_four, threads);
  runtime(work.string());
  sweep(corpus, threads);

  int failing = 0, tolerated = 0;
  for (const auto& o : g_outcomes) {
    if (o.pass) continue;
    if (known.count(o.id)) {
      ++tolerated;
    } else {
      ++failing;
    }
  }
  std::printf("summary: %zu criteria, %d passed, %d failed",
              g_outcomes.size(), static_cast<int>(g_outcomes.size()) - failing - tolerated,
              failing + tolerated);
  if (tolerated) std::printf(" (%d listed as known failure)", tolerated);
  std::printf("\n");
  if (cleanup) {
    std::error_code ec;
    fs::remove_all(work, ec);
  }
  return failing == 0 ? 0 : 1;
}
