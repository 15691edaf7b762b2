#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the library's transform, matching or grouping code.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <vector>

namespace qrsdwt::testing {

// |X_k|^2 of the length-N DFT, summed directly.
inline double dft_power(std::span<const double> x, std::size_t k) {
  const double n = static_cast<double>(x.size());
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(k) * static_cast<double>(i) / n;
    re += x[i] * std::cos(phase);
    im -= x[i] * std::sin(phase);
  }
  return re * re + im * im;
}

// One-sided spectral energy of the bins whose frequency lies in [lo_hz, hi_hz].
inline double band_energy(std::span<const double> x, double fs, double lo_hz, double hi_hz) {
  const double df = fs / static_cast<double>(x.size());
  double e = 0.0;
  for (std::size_t k = 0; k <= x.size() / 2; ++k) {
    const double f = static_cast<double>(k) * df;
    if (f >= lo_hz && f <= hi_hz) e += dft_power(x, k);
  }
  return e;
}

inline double energy(std::span<const double> x) {
  return std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
}

inline std::vector<double> sine(std::size_t n, double fs, double hz, double amplitude = 1.0, double phase = 0.0) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = amplitude * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / fs + phase);
  return out;
}

inline std::vector<double> random_signal(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> dist(0.0, scale);
  std::vector<double> out(n);
  for (double& v : out) v = dist(rng);
  return out;
}

inline double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

// Maximum cardinality matching between detections and references where an
// edge exists when |d - r| <= tol (Kuhn's augmenting paths).
inline std::size_t max_bipartite_matching(std::span<const std::int64_t> det, std::span<const std::int64_t> ref,
                                          std::int64_t tol) {
  std::vector<int> owner(det.size(), -1);
  std::function<bool(std::size_t, std::vector<bool>&)> augment = [&](std::size_t r, std::vector<bool>& seen) {
    for (std::size_t d = 0; d < det.size(); ++d) {
      if (seen[d] || std::llabs(det[d] - ref[r]) > tol) continue;
      seen[d] = true;
      if (owner[d] < 0 || augment(static_cast<std::size_t>(owner[d]), seen)) {
        owner[d] = static_cast<int>(r);
        return true;
      }
    }
    return false;
  };
  std::size_t matched = 0;
  for (std::size_t r = 0; r < ref.size(); ++r) {
    std::vector<bool> seen(det.size(), false);
    if (augment(r, seen)) ++matched;
  }
  return matched;
}

// Single-linkage clustering over every pair closer than `gap`, by union-find.
// Returns (first, last) of each cluster in ascending order.
inline std::vector<std::pair<std::size_t, std::size_t>> brute_force_clusters(std::span<const std::size_t> idx,
                                                                             std::size_t gap) {
  std::vector<std::size_t> parent(idx.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  std::function<std::size_t(std::size_t)> find = [&](std::size_t a) {
    return parent[a] == a ? a : parent[a] = find(parent[a]);
  };
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      const std::size_t d = idx[a] > idx[b] ? idx[a] - idx[b] : idx[b] - idx[a];
      if (d < gap) parent[find(a)] = find(b);
    }
  std::vector<std::pair<std::size_t, std::size_t>> clusters;
  std::vector<std::ptrdiff_t> slot(idx.size(), -1);
  for (std::size_t a = 0; a < idx.size(); ++a) {
    const std::size_t root = find(a);
    if (slot[root] < 0) {
      slot[root] = static_cast<std::ptrdiff_t>(clusters.size());
      clusters.emplace_back(idx[a], idx[a]);
    }
    auto& c = clusters[static_cast<std::size_t>(slot[root])];
    c.first = std::min(c.first, idx[a]);
    c.second = std::max(c.second, idx[a]);
  }
  std::sort(clusters.begin(), clusters.end());
  return clusters;
}

}  // namespace qrsdwt::testing
