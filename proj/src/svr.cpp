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

#include "svr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"

namespace ceiq {

std::string_view polarity_name(Polarity p) {
  return p == Polarity::kMos ? "MOS" : "DMOS";
}

FeatureArray FeatureScaling::apply(const FeatureVector& fv) const {
  const FeatureArray v = fv.as_array();
  FeatureArray out{};
  for (int j = 0; j < kFeatureCount; ++j) {
    const double range = max[j] - min[j];
    out[j] = range > 0.0 ? (v[j] - min[j]) / range : 0.0;
  }
  return out;
}

FeatureScaling scale_fit(std::span<const FeatureVector> features) {
  if (features.empty()) {
    throw InvalidArgument("cannot fit feature scaling on an empty set");
  }
  FeatureScaling s;
  s.min = s.max = features.front().as_array();
  for (const auto& fv : features) {
    const FeatureArray v = fv.as_array();
    for (int j = 0; j < kFeatureCount; ++j) {
      s.min[j] = std::min(s.min[j], v[j]);
      s.max[j] = std::max(s.max[j], v[j]);
    }
  }
  return s;
}

FeatureScaling scale_fit(const TrainingSet& set) {
  std::vector<FeatureVector> fvs;
  fvs.reserve(set.samples.size());
  for (const auto& s : set.samples) fvs.push_back(s.features);
  return scale_fit(fvs);
}

void SvrParams::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw InvalidArgument("SVR C must be positive and finite");
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw InvalidArgument("SVR epsilon must be nonnegative and finite");
  }
  if (max_passes < 1) throw InvalidArgument("SVR max_passes must be >= 1");
  if (!(tolerance > 0.0)) throw InvalidArgument("SVR tolerance must be > 0");
}

double SvrModel::predict(const FeatureVector& fv) const {
  if (!fv.finite()) {
    throw InvalidArgument("cannot predict from non-finite features");
  }
  const FeatureArray x = scaling.apply(fv);
  double s = bias;
  for (int j = 0; j < kFeatureCount; ++j) s += weights[j] * x[j];
  return s;
}

namespace {

double dot(const FeatureArray& a, const FeatureArray& b) {
  double s = 0.0;
  for (int j = 0; j < kFeatureCount; ++j) s += a[j] * b[j];
  return s;
}

}  // namespace

double svr_primal_objective(const FeatureArray& w, double b,
                            std::span<const FeatureArray> x,
                            std::span<const double> y, double c,
                            double epsilon) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    loss += std::max(0.0, std::fabs(y[i] - dot(w, x[i]) - b) - epsilon);
  }
  return 0.5 * dot(w, w) + c * loss;
}

double svr_optimal_bias(const FeatureArray& w, std::span<const FeatureArray> x,
                        std::span<const double> y, double epsilon) {
  // L(b) = sum max(0, |r_i - b| - eps) is convex piecewise linear with
  // breakpoints r_i -+ eps. Its minimizers are the b with
  // slope_left(b) <= 0 <= slope_right(b).
  const std::size_t n = x.size();
  std::vector<double> lo(n), hi(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - dot(w, x[i]);
    lo[i] = r - epsilon;
    hi[i] = r + epsilon;
  }
  std::sort(lo.begin(), lo.end());
  std::sort(hi.begin(), hi.end());

  auto count_less = [](const std::vector<double>& v, double b) {
    return static_cast<long>(std::lower_bound(v.begin(), v.end(), b) -
                             v.begin());
  };
  auto count_le = [](const std::vector<double>& v, double b) {
    return static_cast<long>(std::upper_bound(v.begin(), v.end(), b) -
                             v.begin());
  };
  const long total = static_cast<long>(n);
  auto optimal = [&](double b) {
    const long slope_right = count_le(hi, b) - (total - count_le(lo, b));
    const long slope_left = count_less(hi, b) - (total - count_less(lo, b));
    return slope_left <= 0 && slope_right >= 0;
  };

  double best_lo = std::numeric_limits<double>::infinity();
  double best_hi = -std::numeric_limits<double>::infinity();
  for (const auto* v : {&lo, &hi}) {
    for (double b : *v) {
      if (optimal(b)) {
        best_lo = std::min(best_lo, b);
        best_hi = std::max(best_hi, b);
      }
    }
  }
  return 0.5 * (best_lo + best_hi);
}

namespace {

// Two-coordinate (SMO) descent on the epsilon-SVR dual with 2n variables
// a_t in [0, C]: t < n carries alpha_i with label +1, t >= n carries
// alpha*_i with label -1, subject to sum_t label_t a_t = 0. For the linear
// kernel Q a = label * (w . x); the gradient is refreshed from w instead of a
// kernel matrix.
class DualSolver {
 public:
  DualSolver(std::span<const FeatureArray> x, std::span<const double> y,
             const SvrParams& params)
      : x_(x), y_(y), params_(params), n_(static_cast<int>(x.size())) {
    const int m = 2 * n_;
    alpha_.assign(m, 0.0);
    grad_.resize(m);
    diag_.resize(m);
    for (int t = 0; t < m; ++t) {
      grad_[t] = linear_term(t);
      diag_[t] = dot(x_[t % n_], x_[t % n_]);
    }
    // Candidate scan order; ties in working-set selection go to the first
    // index in this order.
    order_ = seeded_permutation(m, params.seed);
  }

  SvrModel solve(TrainingTrace* trace) {
    double best_primal = std::numeric_limits<double>::infinity();
    FeatureArray best_w{};
    double best_b = 0.0;
    std::vector<double> history;
    long long updates = 0;
    double dual = 0.0;
    int stalls = 0;

    for (int pass = 1; pass <= params_.max_passes; ++pass) {
      bool stalled = false;
      for (int k = 0; k < n_; ++k) {
        if (!step()) {
          stalled = true;
          break;
        }
        ++updates;
      }
      refresh_gradient();

      const double b = svr_optimal_bias(w_, x_, y_, params_.epsilon);
      const double primal =
          svr_primal_objective(w_, b, x_, y_, params_.c, params_.epsilon);
      if (primal < best_primal) {
        best_primal = primal;
        best_w = w_;
        best_b = b;
      }
      history.push_back(best_primal);
      dual = dual_objective();
      const double gap = best_primal - dual;
      const bool converged =
          gap <= params_.tolerance * std::max(1.0, std::fabs(best_primal));
      // A stall on a stale incremental gradient gets one retry after the
      // refresh above.
      if (stalled && !converged && ++stalls < 2) continue;
      if (converged || stalled) {
        if (trace) {
          trace->primal_per_pass = std::move(history);
          trace->primal = best_primal;
          trace->dual = dual;
          trace->passes = pass;
          trace->updates = updates;
        }
        if (!converged) {
          throw ConvergenceFailure(
              "SVR dual solver stalled with relative duality gap " +
                  std::to_string(gap / std::max(1.0, std::fabs(best_primal))),
              best_primal);
        }
        SvrModel model;
        model.weights = best_w;
        model.bias = best_b;
        model.c = params_.c;
        model.epsilon = params_.epsilon;
        return model;
      }
    }
    throw ConvergenceFailure("SVR did not converge within " +
                                 std::to_string(params_.max_passes) +
                                 " passes; best primal objective " +
                                 std::to_string(best_primal),
                             best_primal);
  }

 private:
  static constexpr double kTau = 1e-12;
  // Maximal KKT violation below which no pair can make progress.
  static constexpr double kStallViolation = 1e-13;

  int label(int t) const { return t < n_ ? 1 : -1; }
  double linear_term(int t) const {
    const double yi = y_[t % n_];
    return t < n_ ? params_.epsilon - yi : params_.epsilon + yi;
  }
  bool at_upper(int t) const { return alpha_[t] >= params_.c; }
  bool at_lower(int t) const { return alpha_[t] <= 0.0; }
  double kernel(int s, int t) const { return dot(x_[s % n_], x_[t % n_]); }

  // Maximization form: -(1/2 |w|^2 + p . a).
  double dual_objective() const {
    double lin = 0.0;
    for (int t = 0; t < 2 * n_; ++t) lin += linear_term(t) * alpha_[t];
    return -(0.5 * dot(w_, w_) + lin);
  }

  void refresh_gradient() {
    for (int t = 0; t < 2 * n_; ++t) {
      grad_[t] = label(t) * dot(w_, x_[t % n_]) + linear_term(t);
    }
  }

  // One update on a second-order maximal violating pair. Returns false when
  // the current point is optimal to machine precision.
  bool step() {
    double gmax = -std::numeric_limits<double>::infinity();
    int i = -1;
    for (int t : order_) {
      if (label(t) == 1) {
        if (!at_upper(t) && -grad_[t] > gmax) {
          gmax = -grad_[t];
          i = t;
        }
      } else if (!at_lower(t) && grad_[t] > gmax) {
        gmax = grad_[t];
        i = t;
      }
    }
    if (i < 0) return false;

    double gmax2 = -std::numeric_limits<double>::infinity();
    double best_gain = std::numeric_limits<double>::infinity();
    int j = -1;
    const int yi = label(i);
    for (int t : order_) {
      const double qit = yi * label(t) * kernel(i, t);
      if (label(t) == 1) {
        if (at_lower(t)) continue;
        gmax2 = std::max(gmax2, grad_[t]);
        const double diff = gmax + grad_[t];
        if (diff > 0.0) {
          const double quad = std::max(diag_[i] + diag_[t] - 2.0 * yi * qit, kTau);
          const double gain = -(diff * diff) / quad;
          if (gain < best_gain) {
            best_gain = gain;
            j = t;
          }
        }
      } else {
        if (at_upper(t)) continue;
        gmax2 = std::max(gmax2, -grad_[t]);
        const double diff = gmax - grad_[t];
        if (diff > 0.0) {
          const double quad = std::max(diag_[i] + diag_[t] + 2.0 * yi * qit, kTau);
          const double gain = -(diff * diff) / quad;
          if (gain < best_gain) {
            best_gain = gain;
            j = t;
          }
        }
      }
    }
    if (j < 0 || gmax + gmax2 < kStallViolation) return false;

    update_pair(i, j);
    return true;
  }

  void update_pair(int i, int j) {
    const double c = params_.c;
    const double old_i = alpha_[i];
    const double old_j = alpha_[j];
    const double qij = label(i) * label(j) * kernel(i, j);
    double& ai = alpha_[i];
    double& aj = alpha_[j];

    if (label(i) != label(j)) {
      const double quad = std::max(diag_[i] + diag_[j] + 2.0 * qij, kTau);
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > c) {
          ai = c;
          aj = c - diff;
        }
      } else if (aj > c) {
        aj = c;
        ai = c + diff;
      }
    } else {
      const double quad = std::max(diag_[i] + diag_[j] - 2.0 * qij, kTau);
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c) {
        if (ai > c) {
          ai = c;
          aj = sum - c;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > c) {
        if (aj > c) {
          aj = c;
          ai = sum - c;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }

    // w = sum_t label_t a_t x_t, so dw collects the two changes.
    FeatureArray dw{};
    const double di = label(i) * (ai - old_i);
    const double dj = label(j) * (aj - old_j);
    for (int k = 0; k < kFeatureCount; ++k) {
      dw[k] = di * x_[i % n_][k] + dj * x_[j % n_][k];
      w_[k] += dw[k];
    }
    for (int t = 0; t < 2 * n_; ++t) {
      grad_[t] += label(t) * dot(dw, x_[t % n_]);
    }
  }

  std::span<const FeatureArray> x_;
  std::span<const double> y_;
  SvrParams params_;
  int n_;
  std::vector<double> alpha_;
  std::vector<double> grad_;
  std::vector<double> diag_;
  std::vector<int> order_;
  FeatureArray w_{};
};

}  // namespace

SvrModel train(const TrainingSet& set, const SvrParams& params,
               TrainingTrace* trace) {
  params.validate();
  if (set.samples.size() < 2) {
    throw InvalidArgument("SVR training needs at least 2 samples, got " +
                          std::to_string(set.samples.size()));
  }
  for (std::size_t i = 0; i < set.samples.size(); ++i) {
    const auto& s = set.samples[i];
    if (!s.features.finite() || !std::isfinite(s.score)) {
      throw InvalidArgument("training sample " + std::to_string(i) +
                            " has non-finite features or score");
    }
  }

  const FeatureScaling scaling = scale_fit(set);
  std::vector<FeatureArray> x;
  std::vector<double> y;
  x.reserve(set.samples.size());
  y.reserve(set.samples.size());
  for (const auto& s : set.samples) {
    x.push_back(scaling.apply(s.features));
    y.push_back(s.score);
  }

  DualSolver solver(x, y, params);
  SvrModel model = solver.solve(trace);
  model.scaling = scaling;
  return model;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

constexpr std::string_view kMagic = "CEIQ-MODEL v";

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_array(const FeatureArray& a) {
  std::string s;
  for (int j = 0; j < kFeatureCount; ++j) {
    if (j) s += ' ';
    s += format_double(a[j]);
  }
  return s;
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(std::string_view s, int line) {
  std::vector<double> out;
  s = trim(s);
  while (!s.empty()) {
    const auto end = s.find_first_of(" \t");
    const std::string_view tok = s.substr(0, end);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
      throw ParseError("invalid number '" + std::string(tok) + "'", line);
    }
    out.push_back(v);
    s = end == std::string_view::npos ? std::string_view{} : trim(s.substr(end));
  }
  return out;
}

}  // namespace

std::string serialize(const SvrModel& model) {
  std::string out = std::string(kMagic) + std::to_string(model.format_version) + "\n";
  for (const auto& c : model.comments) out += "# " + c + "\n";
  out += "weights = " + format_array(model.weights) + "\n";
  out += "bias = " + format_double(model.bias) + "\n";
  out += "feature_min = " + format_array(model.scaling.min) + "\n";
  out += "feature_max = " + format_array(model.scaling.max) + "\n";
  out += "C = " + format_double(model.c) + "\n";
  out += "epsilon = " + format_double(model.epsilon) + "\n";
  return out;
}

SvrModel deserialize(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
  }
  if (lines.empty() || trim(lines[0]).substr(0, kMagic.size()) != kMagic) {
    throw ParseError("missing 'CEIQ-MODEL v1' header", 1);
  }
  SvrModel model;
  {
    const std::string_view ver = trim(lines[0]).substr(kMagic.size());
    int v = 0;
    const auto [ptr, ec] = std::from_chars(ver.data(), ver.data() + ver.size(), v);
    if (ec != std::errc() || ptr != ver.data() + ver.size()) {
      throw ParseError("malformed model header", 1);
    }
    if (v != kModelFormatVersion) {
      throw ParseError("unsupported model format version " + std::to_string(v), 1);
    }
    model.format_version = v;
  }

  std::map<std::string, std::pair<std::vector<double>, int>> fields;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const int lineno = static_cast<int>(i) + 1;
    const std::string_view line = trim(lines[i]);
    if (line.empty()) continue;
    if (line.front() == '#') {
      model.comments.emplace_back(trim(line.substr(1)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected 'key = value'", lineno);
    }
    std::string key(trim(line.substr(0, eq)));
    if (fields.count(key)) throw ParseError("duplicate key '" + key + "'", lineno);
    fields.emplace(key, std::make_pair(parse_numbers(line.substr(eq + 1), lineno), lineno));
  }

  const int end_line = static_cast<int>(lines.size()) + 1;
  auto take = [&](const std::string& key, std::size_t count) {
    auto it = fields.find(key);
    if (it == fields.end()) {
      throw ParseError("missing key '" + key + "' (truncated model?)", end_line);
    }
    auto [values, lineno] = it->second;
    if (values.size() != count) {
      throw ParseError("key '" + key + "' expects " + std::to_string(count) +
                           " values, got " + std::to_string(values.size()),
                       lineno);
    }
    fields.erase(it);
    return std::make_pair(values, lineno);
  };
  auto take_array = [&](const std::string& key) {
    FeatureArray a{};
    const auto values = take(key, kFeatureCount).first;
    std::copy(values.begin(), values.end(), a.begin());
    return a;
  };

  model.weights = take_array("weights");
  model.bias = take("bias", 1).first[0];
  model.scaling.min = take_array("feature_min");
  model.scaling.max = take_array("feature_max");
  const auto [c, c_line] = take("C", 1);
  const auto [eps, eps_line] = take("epsilon", 1);
  model.c = c[0];
  model.epsilon = eps[0];
  if (!(model.c > 0.0)) throw ParseError("C must be positive", c_line);
  if (!(model.epsilon >= 0.0)) throw ParseError("epsilon must be >= 0", eps_line);
  for (int j = 0; j < kFeatureCount; ++j) {
    if (model.scaling.min[j] > model.scaling.max[j]) {
      throw ParseError("feature_min exceeds feature_max in dimension " +
                           std::to_string(j),
                       0);
    }
  }
  if (!fields.empty()) {
    const auto& [key, val] = *fields.begin();
    throw ParseError("unknown key '" + key + "'", val.second);
  }
  return model;
}

void save_model(const std::string& path, const SvrModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file '" + path + "'");
  out << serialize(model);
  if (!out) throw IoError("failed writing model file '" + path + "'");
}

SvrModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return deserialize(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what(), 0);
  }
}

}  // namespace ceiq
