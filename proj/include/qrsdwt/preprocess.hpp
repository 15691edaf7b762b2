#pragma once

#include <string>

#include "qrsdwt/signal.hpp"
#include "qrsdwt/wavelet.hpp"

namespace qrsdwt {

// Content bandwidth assumed for MIT-BIH records when labelling bands.
inline constexpr double kDefaultFmax = 130.0;
inline constexpr int kBaselineLevels = 8;

// Ideal dyadic frequency range of one band: detail j spans
// [f_max / 2^j, f_max / 2^(j-1)], the level-J approximation [0, f_max / 2^J].
struct BandRange {
  BandSelector band;
  double lo = 0.0;
  double hi = 0.0;
};

BandRange band_frequencies(BandSelector band, double f_max);

// Frequency printed with at most three decimals, truncated rather than
// rounded, and without trailing zeros ("4.062", "65").
std::string format_band_edge(double hz);

// "d4" / "C8".
std::string band_label(BandSelector band, int levels);

// Drops the level-J approximation and rebuilds from the detail bands only.
// Acts as a high-pass with cutoff (fs/2) / 2^J.
Signal remove_baseline(const Signal& x, int levels = kBaselineLevels,
                       const FilterBank& bank = make_db4(),
                       Extension ext = Extension::periodic);

}  // namespace qrsdwt
