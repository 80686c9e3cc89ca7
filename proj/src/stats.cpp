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

#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "error.hpp"

namespace ceiq {

namespace {

void check_pair(std::span<const double> x, std::span<const double> y,
                std::size_t min_n) {
  if (x.size() != y.size()) {
    throw InvalidArgument("correlation inputs differ in length: " +
                          std::to_string(x.size()) + " vs " +
                          std::to_string(y.size()));
  }
  if (x.size() < min_n) {
    throw InvalidArgument("correlation needs at least " +
                          std::to_string(min_n) + " samples, got " +
                          std::to_string(x.size()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw InvalidArgument("correlation inputs must be finite");
    }
  }
}

double mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  const double m = mean(v);
  double s = 0.0;
  for (double a : v) s += (a - m) * (a - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, 2);
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DegenerateInput("correlation with a constant vector is undefined");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i + 1;
    while (j < idx.size() && v[idx[j]] == v[idx[i]]) ++j;
    // Positions i..j-1 hold ranks i+1..j.
    const double r = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) ranks[idx[k]] = r;
    i = j;
  }
  return ranks;
}

double srocc(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, 2);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

double krocc(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y, 2);
  const std::size_t n = x.size();
  long long concordant = 0, discordant = 0, tied_x = 0, tied_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0) ++tied_x;
      if (dy == 0.0) ++tied_y;
      if (dx == 0.0 || dy == 0.0) continue;
      if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const long long pairs = static_cast<long long>(n) * (n - 1) / 2;
  const double denom = std::sqrt(static_cast<double>(pairs - tied_x) *
                                 static_cast<double>(pairs - tied_y));
  if (denom == 0.0) {
    throw DegenerateInput("Kendall tau with a constant vector is undefined");
  }
  return static_cast<double>(concordant - discordant) / denom;
}

double logistic_eval(LogisticKind kind, std::span<const double> b, double x) {
  if (kind == LogisticKind::kFiveParameter) {
    return b[0] * (0.5 - 1.0 / (1.0 + std::exp(b[1] * (x - b[2])))) +
           b[3] * x + b[4];
  }
  return (b[0] - b[1]) / (1.0 + std::exp(-(x - b[2]) / std::fabs(b[3]))) + b[1];
}

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                          std::vector<double> start, const SimplexOptions& opts) {
  const std::size_t dim = start.size();
  auto eval = [&](const std::vector<double>& p) {
    const double v = f(p);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };

  std::vector<std::vector<double>> pts(dim + 1, start);
  for (std::size_t k = 0; k < dim; ++k) {
    double& c = pts[k + 1][k];
    c = c != 0.0 ? 1.05 * c : 0.00025;
  }
  std::vector<double> vals(dim + 1);
  for (std::size_t k = 0; k <= dim; ++k) vals[k] = eval(pts[k]);

  std::vector<std::size_t> order(dim + 1);
  int iter = 0;
  for (; iter < opts.max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[dim - 1];
    if (vals[worst] - vals[best] <=
        opts.tolerance * std::max(1.0, std::fabs(vals[best]))) {
      break;
    }

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t k = 0; k < dim; ++k) {
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += pts[order[k]][d];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto blend = [&](double t) {
      std::vector<double> p(dim);
      for (std::size_t d = 0; d < dim; ++d) {
        p[d] = centroid[d] + t * (pts[worst][d] - centroid[d]);
      }
      return p;
    };

    auto refl = blend(-1.0);
    const double fr = eval(refl);
    if (fr < vals[best]) {
      auto exp = blend(-2.0);
      const double fe = eval(exp);
      if (fe < fr) {
        pts[worst] = std::move(exp);
        vals[worst] = fe;
      } else {
        pts[worst] = std::move(refl);
        vals[worst] = fr;
      }
      continue;
    }
    if (fr < vals[second]) {
      pts[worst] = std::move(refl);
      vals[worst] = fr;
      continue;
    }
    const bool outside = fr < vals[worst];
    auto con = blend(outside ? -0.5 : 0.5);
    const double fc = eval(con);
    if (fc < (outside ? fr : vals[worst])) {
      pts[worst] = std::move(con);
      vals[worst] = fc;
      continue;
    }
    for (std::size_t k = 0; k <= dim; ++k) {
      if (k == best) continue;
      for (std::size_t d = 0; d < dim; ++d) {
        pts[k][d] = pts[best][d] + 0.5 * (pts[k][d] - pts[best][d]);
      }
      vals[k] = eval(pts[k]);
    }
  }

  const auto best = static_cast<std::size_t>(
      std::min_element(vals.begin(), vals.end()) - vals.begin());
  return {pts[best], vals[best], iter};
}

LogisticFit plcc_logistic(std::span<const double> objective,
                          std::span<const double> subjective,
                          LogisticKind kind) {
  check_pair(objective, subjective, 5);
  const double sx = stddev(objective);
  const double sy = stddev(subjective);
  if (sx == 0.0 || sy == 0.0) {
    throw DegenerateInput("logistic fit needs non-constant scores");
  }
  const double mx = mean(objective);
  const double my = mean(subjective);
  const auto [ymin, ymax] = std::minmax_element(subjective.begin(), subjective.end());
  const double range = *ymax - *ymin;

  auto sse = [&](std::span<const double> beta) {
    double s = 0.0;
    for (std::size_t i = 0; i < objective.size(); ++i) {
      const double r = logistic_eval(kind, beta, objective[i]) - subjective[i];
      s += r * r;
    }
    return s;
  };

  std::vector<std::vector<double>> starts;
  if (kind == LogisticKind::kFiveParameter) {
    // Least-squares line inside the family (b1 = 0).
    double sxy = 0.0;
    for (std::size_t i = 0; i < objective.size(); ++i) {
      sxy += (objective[i] - mx) * (subjective[i] - my);
    }
    const double slope = sxy / (sx * sx * static_cast<double>(objective.size()));
    starts = {
        {range, 1.0 / sx, mx, 0.0, my},
        {-range, 1.0 / sx, mx, 0.0, my},
        {0.0, 1.0 / sx, mx, slope, my - slope * mx},
    };
  } else {
    starts = {
        {*ymax, *ymin, mx, sx},
        {*ymin, *ymax, mx, sx},
        {*ymax, *ymin, mx, 10.0 * sx},
    };
  }

  LogisticFit fit;
  fit.sse = std::numeric_limits<double>::infinity();
  for (auto& s : starts) {
    auto r = nelder_mead(sse, s);
    if (r.value < fit.sse) {
      fit.sse = r.value;
      fit.params = std::move(r.x);
    }
  }
  std::vector<double> mapped(objective.size());
  for (std::size_t i = 0; i < objective.size(); ++i) {
    mapped[i] = logistic_eval(kind, fit.params, objective[i]);
  }
  fit.plcc = pearson(mapped, subjective);
  return fit;
}

double median(std::vector<double> v) {
  if (v.empty()) throw InvalidArgument("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace ceiq
