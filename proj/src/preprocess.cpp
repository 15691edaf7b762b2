#include "qrsdwt/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "qrsdwt/errors.hpp"

namespace qrsdwt {

BandRange band_frequencies(BandSelector band, double f_max) {
  if (!(f_max > 0.0)) throw DomainError("f_max must be positive");
  switch (band.kind) {
    case BandSelector::Kind::detail:
      if (band.level < 1) throw DomainError("detail level must be >= 1");
      return {band, std::ldexp(f_max, -band.level), std::ldexp(f_max, 1 - band.level)};
    case BandSelector::Kind::approx:
      if (band.level < 1) throw DomainError("approximation level must be >= 1");
      return {band, 0.0, std::ldexp(f_max, -band.level)};
    case BandSelector::Kind::all_details:
      break;
  }
  throw DomainError("band_frequencies needs a single band");
}

std::string format_band_edge(double hz) {
  // Small epsilon so values like 0.1 * 3 do not truncate one digit low.
  const double milli = std::floor(hz * 1000.0 + 1e-9);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", milli / 1000.0);
  std::string s = buf;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

std::string band_label(BandSelector band, int levels) {
  switch (band.kind) {
    case BandSelector::Kind::detail: return "d" + std::to_string(band.level);
    case BandSelector::Kind::approx: return "C" + std::to_string(band.level > 0 ? band.level : levels);
    case BandSelector::Kind::all_details: return "details";
  }
  return {};
}

Signal remove_baseline(const Signal& x, int levels, const FilterBank& bank, Extension ext) {
  if (x.size() < (std::size_t{1} << std::max(levels, 0)))
    throw LevelError("signal of " + std::to_string(x.size()) + " samples is too short for " +
                     std::to_string(levels) + " levels");
  const auto d = dwt(x.samples, levels, bank, ext);
  return Signal{reconstruct_band(d, BandSelector::all_details()), x.fs, x.label};
}

}  // namespace qrsdwt
