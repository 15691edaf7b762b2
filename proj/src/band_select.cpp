#include "qrsdwt/band_select.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qrsdwt/errors.hpp"

namespace qrsdwt {

namespace {

double energy(std::span<const double> v) {
  double e = 0.0;
  for (double s : v) e += s * s;
  return e;
}

}  // namespace

double cross_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw ShapeError("cross_correlation: lengths differ (" + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  if (x.empty()) throw ShapeError("cross_correlation: empty input");
  const double ex = energy(x);
  const double ey = energy(y);
  if (ex == 0.0 || ey == 0.0)
    throw UndefinedCorrelationError("cross_correlation: an input is all zeros");
  double dot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * y[i];
  // Rounding can push |C| a hair above 100 for parallel vectors.
  return std::clamp(100.0 * dot / std::sqrt(ex * ey), -100.0, 100.0);
}

BandSelection select_band(const Signal& x, int levels, const FilterBank& bank, Extension ext,
                          CorrelationReference reference) {
  const auto d = dwt(x.samples, levels, bank, ext);
  const std::vector<double> ref = reference == CorrelationReference::raw
                                      ? x.samples
                                      : reconstruct_band(d, BandSelector::all_details());
  if (energy(ref) == 0.0)
    throw UndefinedCorrelationError("select_band: reference signal is all zeros");

  BandSelection out;
  out.scores.reserve(static_cast<std::size_t>(levels));
  for (int j = 1; j <= levels; ++j) {
    const auto band = reconstruct_band(d, BandSelector::detail(j));
    const double score = energy(band) == 0.0 ? 0.0 : cross_correlation(ref, band);
    out.scores.push_back({j, score});
  }
  // Strict comparison keeps the first (lowest) level on ties.
  const auto best = std::max_element(out.scores.begin(), out.scores.end(),
                                     [](const BandScore& a, const BandScore& b) { return a.score < b.score; });
  out.best_level = best->level;
  return out;
}

}  // namespace qrsdwt
