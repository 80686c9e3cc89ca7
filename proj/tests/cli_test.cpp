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

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) {
    if (c == '\'') {
      q += "'\\''";
    } else {
      q += c;
    }
  }
  return q + "'";
}

class Workspace {
 public:
  Workspace() {
    root_ = fs::temp_directory_path() / ("ceiq-cli-" + std::to_string(std::random_device{}()));
    fs::create_directories(root_);
  }
  ~Workspace() {
    std::error_code ec;
    fs::remove_all(root_, ec);
  }
  std::string file(const std::string& n) const { return (root_ / n).string(); }

  Result run(const std::string& args) const {
    const std::string err = file("stderr.txt");
    const std::string cmd = quote(CEIQ_CLI_PATH) + " " + args + " 2>" + quote(err);
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
  }

 private:
  fs::path root_;
};

std::string data(const std::string& rel) {
  return quote(std::string(CEIQ_TEST_DATA_DIR) + "/" + rel);
}

// One small corpus for the whole binary.
const Workspace& shared() {
  static Workspace* ws = [] {
    auto* w = new Workspace();
    const Result r = w->run("synth " + quote(w->file("corpus")) +
                            " --references 6 --size 64 --seed 2");
    REQUIRE(r.code == 0);
    return w;
  }();
  return *ws;
}

std::string corpus() { return quote(shared().file("corpus/manifest.csv")); }

}  // namespace

TEST_CASE("help and version") {
  const Workspace& ws = shared();
  CHECK(ws.run("--version").code == 0);
  const Result help = ws.run("--help");
  CHECK(help.code == 0);
  CHECK(help.out.find("evaluate") != std::string::npos);
  CHECK(ws.run("").code == 1);
  CHECK(ws.run("nonsense").code == 1);
  CHECK(ws.run("evaluate").code == 1);
}

TEST_CASE("extract") {
  const Workspace& ws = shared();
  const Result r = ws.run("extract " + data("natural/coins.png") + " " +
                          data("natural/chelsea.png"));
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string header, a, b, extra;
  std::getline(lines, header);
  std::getline(lines, a);
  std::getline(lines, b);
  CHECK(header == "image_path,s_ge,e_g,e_e,e_ge,e_eg");
  CHECK(a.find("coins.png,") != std::string::npos);
  CHECK(b.find("chelsea.png,") != std::string::npos);
  CHECK_FALSE(std::getline(lines, extra));

  SUBCASE("one bad image is a warning") {
    const Result w = ws.run("extract " + data("natural/coins.png") + " " +
                            quote(ws.file("missing.png")));
    CHECK(w.code == 0);
    CHECK(w.err.find("warning") != std::string::npos);
    CHECK(std::count(w.out.begin(), w.out.end(), '\n') == 2);
  }
  SUBCASE("all images failing is an error") {
    CHECK(ws.run("extract " + quote(ws.file("missing.png"))).code == 2);
    CHECK(ws.run("extract").code == 1);
  }
  SUBCASE("manifest input, cache and bins") {
    const Result m = ws.run("extract -m " + corpus() + " --cache " + quote(ws.file("c.csv")) +
                            " -o " + quote(ws.file("feat.csv")));
    CHECK(m.code == 0);
    const std::string table = slurp(ws.file("feat.csv"));
    CHECK(std::count(table.begin(), table.end(), '\n') == 61);
    CHECK(fs::exists(ws.file("c.csv")));
    const Result again = ws.run("extract -m " + corpus() + " --cache " +
                                quote(ws.file("c.csv")));
    CHECK(again.out == slurp(ws.file("feat.csv")));
    CHECK(ws.run("extract --bins 0 " + data("natural/coins.png")).code == 1);
  }
}

TEST_CASE("train and predict") {
  const Workspace& ws = shared();
  const Result t1 = ws.run("train " + corpus() + " -o " + quote(ws.file("m1.txt")));
  REQUIRE(t1.code == 0);
  const Result t2 = ws.run("-j 3 train " + corpus() + " --no-cache -o " +
                           quote(ws.file("m2.txt")));
  REQUIRE(t2.code == 0);
  const std::string model = slurp(ws.file("m1.txt"));
  CHECK(model == slurp(ws.file("m2.txt")));
  CHECK(model.rfind("CEIQ-MODEL v1\n", 0) == 0);
  CHECK(model.find("# trained on synthetic (60 images, bins=128)") != std::string::npos);

  const Result p = ws.run("predict -M " + quote(ws.file("m1.txt")) + " " +
                          data("natural/coins.png"));
  CHECK(p.code == 0);
  CHECK(p.out.find("coins.png\t") != std::string::npos);

  std::ofstream(ws.file("broken.txt")) << "CEIQ-MODEL v1\nbias = nope\n";
  CHECK(ws.run("predict -M " + quote(ws.file("broken.txt")) + " " + data("natural/coins.png"))
            .code == 3);
  CHECK(ws.run("predict -M " + quote(ws.file("none.txt")) + " " + data("natural/coins.png"))
            .code == 2);
  CHECK(ws.run("train " + corpus() + " -o " + quote(ws.file("m3.txt")) + " --C -1").code == 1);
}

TEST_CASE("evaluate is deterministic across thread counts") {
  const Workspace& ws = shared();
  const std::string base = "evaluate " + corpus() + " --repetitions 30 --seed 4";
  const Result a = ws.run("-j 1 " + base + " --splits-csv " + quote(ws.file("s1.csv")));
  const Result b = ws.run("-j 4 " + base + " --splits-csv " + quote(ws.file("s4.csv")));
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);
  CHECK(slurp(ws.file("s1.csv")) == slurp(ws.file("s4.csv")));
  CHECK(a.out.find("\"median_srocc\"") != std::string::npos);
  CHECK(a.err.find("median SROCC") != std::string::npos);

  CHECK(ws.run(base + " --train-fraction 0.05").code == 1);
  CHECK(ws.run(base + " --logistic 3").code == 1);

  std::ofstream(ws.file("bad.csv")) << "image_path,score,ref_id\na.png,?,r\n";
  const Result bad = ws.run("evaluate " + quote(ws.file("bad.csv")));
  CHECK(bad.code == 3);
  CHECK(bad.err.find("line 2") != std::string::npos);

  std::ofstream(ws.file("flat.csv")) << "image_path,score,ref_id\n";
  {
    std::ofstream flat(ws.file("flat.csv"), std::ios::app);
    for (const char* img : {"coins.png", "camera.png", "chelsea.png", "coffee.png"}) {
      flat << std::string(CEIQ_TEST_DATA_DIR) << "/natural/" << img << ",5," << img << "\n";
    }
  }
  CHECK(ws.run("evaluate --no-cache --repetitions 3 " + quote(ws.file("flat.csv"))).code == 4);
}

TEST_CASE("crossdb, sweep, scatter, bench") {
  const Workspace& ws = shared();
  const Result c = ws.run("crossdb " + corpus() + " " + corpus());
  CHECK(c.code == 0);
  CHECK(c.out.find("\"test\"") != std::string::npos);

  const Result s = ws.run("sweep " + corpus() + " --ratios 0.5 0.8 --repetitions 5");
  CHECK(s.code == 0);
  CHECK(s.out.rfind("train_fraction,median_srocc", 0) == 0);
  CHECK(s.out.find("\n0.5,") != std::string::npos);

  const Result sc = ws.run("scatter " + corpus() + " -f e_e");
  CHECK(sc.code == 0);
  CHECK(sc.out.rfind("mos,e_e\n", 0) == 0);
  CHECK(sc.err.find("SROCC(e_e, MOS)") != std::string::npos);

  const Result b = ws.run("bench -r 2 " + data("natural/coffee.png"));
  CHECK(b.code == 0);
  CHECK(b.out.rfind("stage,median_seconds\n", 0) == 0);
  CHECK(b.out.find("features_total,") != std::string::npos);
}
