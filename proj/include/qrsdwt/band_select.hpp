#pragma once

#include <span>
#include <vector>

#include "qrsdwt/signal.hpp"
#include "qrsdwt/wavelet.hpp"

namespace qrsdwt {

struct BandScore {
  int level = 0;
  double score = 0.0;  // percent, |score| <= 100
};

struct BandSelection {
  int best_level = 0;
  std::vector<BandScore> scores;  // d1..dJ
};

// What each single-band reconstruction is scored against.
enum class CorrelationReference { baseline_removed, raw };

// Zero-lag normalised correlation in percent:
//   C = 100 * sum(x*y) / sqrt(sum(x^2) * sum(y^2))
double cross_correlation(std::span<const double> x, std::span<const double> y);

// Scores every detail band d1..dJ, rebuilt alone at the input rate, against
// the reference and returns the argmax. Ties go to the lower level. A band
// that reconstructs to all zeros scores 0.
BandSelection select_band(const Signal& x, int levels, const FilterBank& bank = make_db4(),
                          Extension ext = Extension::periodic,
                          CorrelationReference reference = CorrelationReference::baseline_removed);

}  // namespace qrsdwt
