#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "screenml/matrix.hpp"

namespace screenml::testing {

/// Central differences of f at p with step h.
inline std::vector<double> numeric_gradient(const std::function<double(std::span<const double>)>& f,
                                            std::vector<double> p, double h = 1e-5) {
  std::vector<double> g(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double keep = p[i];
    p[i] = keep + h;
    const double up = f(p);
    p[i] = keep - h;
    const double down = f(p);
    p[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// max_i |a_i - n_i| / max(|a_i|, |n_i|, floor)
inline double max_relative_error(std::span<const double> analytic, std::span<const double> numeric,
                                 double floor = 1e-6) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric[i]), floor});
    worst = std::max(worst, std::abs(analytic[i] - numeric[i]) / scale);
  }
  return worst;
}

/// P(s+ > s-) + 0.5 P(s+ = s-) over all positive/negative pairs.
inline double pair_counting_auc(std::span<const int> y, std::span<const double> s) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!y[i]) continue;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (y[j]) continue;
      pairs += 1.0;
      if (s[i] > s[j]) {
        wins += 1.0;
      } else if (s[i] == s[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / pairs;
}

/// Smallest distance from p to any segment between two minority originals.
inline double segment_residual(std::span<const double> p, const Matrix& x, const Labels& y, int minority) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < x.rows(); ++a) {
    if (y[a] != minority) continue;
    for (std::size_t b = 0; b < x.rows(); ++b) {
      if (y[b] != minority) continue;
      double dd = 0.0;
      double dp = 0.0;
      for (std::size_t c = 0; c < x.cols(); ++c) {
        const double d = x(b, c) - x(a, c);
        dd += d * d;
        dp += d * (p[c] - x(a, c));
      }
      const double lambda = dd > 0.0 ? std::clamp(dp / dd, 0.0, 1.0) : 0.0;
      double r2 = 0.0;
      for (std::size_t c = 0; c < x.cols(); ++c) {
        const double q = x(a, c) + lambda * (x(b, c) - x(a, c));
        r2 += (p[c] - q) * (p[c] - q);
      }
      best = std::min(best, std::sqrt(r2));
    }
  }
  return best;
}

}  // namespace screenml::testing
