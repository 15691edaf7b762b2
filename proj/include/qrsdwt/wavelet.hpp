#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qrsdwt {

using Coefficients = std::vector<double>;

// Two-channel orthogonal filter bank.
//
// h0/h1 are the analysis low/high-pass filters, g0/g1 the synthesis pair as
// given by the QMF relations (1-based n = 1..L):
//
//   h1(n) = (-1)^n     h0(L+1-n)
//   g0(n) =            h0(L+1-n)
//   g1(n) = (-1)^(n-1) h0(L+1-n)
//
// Note that the last relation makes g1 == -h1. That only reconstructs
// perfectly for symmetric h0 (Haar). The synthesis high-pass actually used by
// idwt() is h1 time-reversed, see synthesis_highpass().
struct FilterBank {
  std::string name;
  Coefficients h0;
  Coefficients h1;
  Coefficients g0;
  Coefficients g1;

  std::size_t length() const { return h0.size(); }

  // Paraunitary companion of h1: the filter that, together with g0, inverts
  // the analysis stage exactly.
  Coefficients synthesis_highpass() const;
};

Coefficients qmf_highpass(std::span<const double> h0);
std::pair<Coefficients, Coefficients> synthesis_filters(std::span<const double> h0);

// Builds a bank from an orthonormal analysis low-pass; throws
// InvalidFilterError if h0 is empty, odd length or not orthonormal.
FilterBank make_filter_bank(std::string name, std::span<const double> h0);

// Daubechies wavelet with 8 taps and 4 vanishing moments. This is what
// PyWavelets and MATLAB call "db4"; it is NOT the 4-tap "D4" filter.
FilterBank make_db4();
FilterBank make_haar();
// "db4" or "haar".
FilterBank filter_bank_by_name(std::string_view name);

enum class Extension {
  periodic,     // circular wrap; lengths not divisible by 2^J are mirror-padded on the right
  symmetric,    // half-sample mirror padding wide enough to hide the wrap from the data
  antireflect,  // point reflection about the end samples, 2*x[0] - x[k]; keeps the slope continuous
};

std::string_view to_string(Extension ext);
Extension extension_from_string(std::string_view name);

// One approximation band plus J detail bands, finest first.
//
// The transform runs on an internal buffer of padded_length() samples, where
// sample pad_left() is input sample 0. Coefficient k at level j sits over
// buffer sample k * 2^j.
class Decomposition {
 public:
  Decomposition(Coefficients approx, std::vector<Coefficients> details,
                std::size_t original_length, std::size_t pad_left, FilterBank bank,
                Extension ext);

  const Coefficients& approx() const { return approx_; }
  const std::vector<Coefficients>& details() const { return details_; }
  // 1-based, d1 is the finest band.
  const Coefficients& detail(int level) const;
  int levels() const { return static_cast<int>(details_.size()); }
  std::size_t original_length() const { return original_length_; }
  std::size_t pad_left() const { return pad_left_; }
  std::size_t padded_length() const { return approx_.size() << details_.size(); }
  const FilterBank& bank() const { return bank_; }
  Extension extension() const { return ext_; }

 private:
  Coefficients approx_;
  std::vector<Coefficients> details_;
  std::size_t original_length_;
  std::size_t pad_left_;
  FilterBank bank_;
  Extension ext_;
};

struct BandSelector {
  enum class Kind { approx, detail, all_details };
  Kind kind = Kind::all_details;
  int level = 0;

  static BandSelector approximation() { return {Kind::approx, 0}; }
  static BandSelector detail(int j) { return {Kind::detail, j}; }
  static BandSelector all_details() { return {Kind::all_details, 0}; }
};

struct StepResult {
  Coefficients approx;
  Coefficients detail;
};

// Single analysis stage; equivalent to dwt(x, 1, ...).
StepResult dwt_step(std::span<const double> x, const FilterBank& bank,
                    Extension ext = Extension::periodic);

int max_level(std::size_t length);

Decomposition dwt(std::span<const double> x, int levels, const FilterBank& bank,
                  Extension ext = Extension::periodic);

// Returns original_length() samples.
std::vector<double> idwt(const Decomposition& d);

// idwt of a copy of d with every band outside `band` zeroed. Output is
// time-aligned with the input that produced d.
std::vector<double> reconstruct_band(const Decomposition& d, BandSelector band);

}  // namespace qrsdwt
