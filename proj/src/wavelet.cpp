#include "qrsdwt/wavelet.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <string>

#include "qrsdwt/errors.hpp"

namespace qrsdwt {

namespace {

// Analysis low-pass of the 8-tap Daubechies filter, in convolution order.
constexpr std::array<double, 8> kDb4 = {
    -0.010597401784997278, 0.032883011666982945, 0.030841381835986965,
    -0.18703481171888114,  -0.02798376941698385, 0.6308807679295904,
    0.7148465705525415,    0.23037781330885523,
};

constexpr double kOrthoTol = 1e-12;

void check_filter_shape(std::span<const double> h0) {
  if (h0.empty()) throw InvalidFilterError("filter is empty");
  if (h0.size() % 2 != 0)
    throw InvalidFilterError("filter length " + std::to_string(h0.size()) + " is odd");
}

void check_orthonormal(std::span<const double> h0) {
  double sum = 0.0;
  for (double c : h0) sum += c;
  if (std::abs(sum - std::sqrt(2.0)) > kOrthoTol)
    throw InvalidFilterError("low-pass taps do not sum to sqrt(2)");
  const std::size_t len = h0.size();
  for (std::size_t shift = 0; shift < len; shift += 2) {
    double dot = 0.0;
    for (std::size_t n = 0; n + shift < len; ++n) dot += h0[n] * h0[n + shift];
    const double expected = shift == 0 ? 1.0 : 0.0;
    if (std::abs(dot - expected) > kOrthoTol)
      throw InvalidFilterError("low-pass is not orthonormal under even shifts");
  }
}

std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  i %= m;
  return static_cast<std::size_t>(i < 0 ? i + m : i);
}

// Half-sample symmetric reflection: ... x1 x0 | x0 x1 ... x{n-1} | x{n-1} x{n-2} ...
std::size_t mirror(std::ptrdiff_t i, std::size_t n) {
  const std::size_t period = 2 * n;
  const std::size_t r = wrap(i, period);
  return r < n ? r : period - 1 - r;
}

// Point reflection about the first and last sample, continued as far as needed.
double antireflect(std::span<const double> x, std::ptrdiff_t i) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  double offset = 0.0;
  double sign = 1.0;
  while (true) {
    if (i < 0) {
      offset += sign * 2.0 * x.front();
      i = -i;
    } else if (i >= n) {
      offset += sign * 2.0 * x.back();
      i = 2 * (n - 1) - i;
    } else {
      return offset + sign * x[static_cast<std::size_t>(i)];
    }
    sign = -sign;
  }
}

// Filters are applied as y[k] = sum_n h[n] x[2k + phase - n]. With phase L/2
// the support of coefficient k straddles buffer sample 2k.
std::ptrdiff_t phase(const FilterBank& bank) {
  return static_cast<std::ptrdiff_t>(bank.length() / 2);
}

StepResult analyze_periodic(std::span<const double> x, const FilterBank& bank) {
  const std::size_t n = x.size();
  const std::size_t half = n / 2;
  const std::size_t len = bank.length();
  const std::ptrdiff_t ph = phase(bank);
  StepResult out{Coefficients(half, 0.0), Coefficients(half, 0.0)};
  for (std::size_t k = 0; k < half; ++k) {
    const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(2 * k) + ph;
    double a = 0.0;
    double d = 0.0;
    for (std::size_t t = 0; t < len; ++t) {
      const double v = x[wrap(base - static_cast<std::ptrdiff_t>(t), n)];
      a += bank.h0[t] * v;
      d += bank.h1[t] * v;
    }
    out.approx[k] = a;
    out.detail[k] = d;
  }
  return out;
}

// Upsample by two and convolve with g0 / synthesis_highpass(), undoing the
// phase introduced by analyze_periodic().
std::vector<double> synthesize_periodic(const Coefficients& approx, const Coefficients& detail,
                                        const FilterBank& bank, const Coefficients& g1) {
  const std::size_t half = approx.size();
  const std::size_t n = 2 * half;
  const std::size_t len = bank.length();
  const std::ptrdiff_t offset = phase(bank) - static_cast<std::ptrdiff_t>(len - 1);
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < half; ++k) {
    const double a = approx[k];
    const double d = detail[k];
    if (a == 0.0 && d == 0.0) continue;
    const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(2 * k) + offset;
    for (std::size_t t = 0; t < len; ++t)
      out[wrap(base + static_cast<std::ptrdiff_t>(t), n)] += a * bank.g0[t] + d * g1[t];
  }
  return out;
}

std::size_t round_up(std::size_t v, std::size_t multiple) {
  return (v + multiple - 1) / multiple * multiple;
}

}  // namespace

Coefficients FilterBank::synthesis_highpass() const {
  return Coefficients(h1.rbegin(), h1.rend());
}

Coefficients qmf_highpass(std::span<const double> h0) {
  check_filter_shape(h0);
  const std::size_t len = h0.size();
  Coefficients h1(len);
  // 0-based i = n - 1, so h0(L+1-n) is h0[len-1-i] and (-1)^n is -1 for even i.
  for (std::size_t i = 0; i < len; ++i)
    h1[i] = (i % 2 == 0 ? -1.0 : 1.0) * h0[len - 1 - i];
  return h1;
}

std::pair<Coefficients, Coefficients> synthesis_filters(std::span<const double> h0) {
  check_filter_shape(h0);
  const std::size_t len = h0.size();
  Coefficients g0(h0.rbegin(), h0.rend());
  Coefficients g1(len);
  for (std::size_t i = 0; i < len; ++i)
    g1[i] = (i % 2 == 0 ? 1.0 : -1.0) * h0[len - 1 - i];
  return {std::move(g0), std::move(g1)};
}

FilterBank make_filter_bank(std::string name, std::span<const double> h0) {
  check_filter_shape(h0);
  check_orthonormal(h0);
  FilterBank bank;
  bank.name = std::move(name);
  bank.h0.assign(h0.begin(), h0.end());
  bank.h1 = qmf_highpass(h0);
  auto [g0, g1] = synthesis_filters(h0);
  bank.g0 = std::move(g0);
  bank.g1 = std::move(g1);
  return bank;
}

FilterBank make_db4() { return make_filter_bank("db4", kDb4); }

FilterBank make_haar() {
  const double c = 1.0 / std::sqrt(2.0);
  const std::array<double, 2> h0 = {c, c};
  return make_filter_bank("haar", h0);
}

FilterBank filter_bank_by_name(std::string_view name) {
  if (name == "db4") return make_db4();
  if (name == "haar" || name == "db1") return make_haar();
  throw InvalidFilterError("unknown wavelet '" + std::string(name) + "'");
}

std::string_view to_string(Extension ext) {
  switch (ext) {
    case Extension::periodic: return "periodic";
    case Extension::symmetric: return "symmetric";
    case Extension::antireflect: return "antireflect";
  }
  return "?";
}

Extension extension_from_string(std::string_view name) {
  if (name == "periodic" || name == "periodization") return Extension::periodic;
  if (name == "symmetric") return Extension::symmetric;
  if (name == "antireflect") return Extension::antireflect;
  throw DomainError("unknown extension mode '" + std::string(name) + "'");
}

Decomposition::Decomposition(Coefficients approx, std::vector<Coefficients> details,
                             std::size_t original_length, std::size_t pad_left,
                             FilterBank bank, Extension ext)
    : approx_(std::move(approx)),
      details_(std::move(details)),
      original_length_(original_length),
      pad_left_(pad_left),
      bank_(std::move(bank)),
      ext_(ext) {
  if (details_.empty()) throw CorruptDecompositionError("decomposition has no detail bands");
  if (approx_.empty()) throw CorruptDecompositionError("approximation band is empty");
  const std::size_t padded = padded_length();
  for (std::size_t j = 0; j < details_.size(); ++j) {
    if (details_[j].size() != padded >> (j + 1))
      throw CorruptDecompositionError("detail band d" + std::to_string(j + 1) + " has " +
                                      std::to_string(details_[j].size()) + " coefficients, expected " +
                                      std::to_string(padded >> (j + 1)));
  }
  if (pad_left_ + original_length_ > padded)
    throw CorruptDecompositionError("original length does not fit the coefficient grid");
  if (bank_.length() == 0 || bank_.g0.size() != bank_.length() || bank_.h1.size() != bank_.length())
    throw CorruptDecompositionError("decomposition carries an invalid filter bank");
}

const Coefficients& Decomposition::detail(int level) const {
  if (level < 1 || level > levels())
    throw BandError("detail level " + std::to_string(level) + " outside 1.." +
                    std::to_string(levels()));
  return details_[static_cast<std::size_t>(level - 1)];
}

int max_level(std::size_t length) {
  if (length < 2) return 0;
  return std::bit_width(length) - 1;
}

StepResult dwt_step(std::span<const double> x, const FilterBank& bank, Extension ext) {
  if (x.size() < 2) throw SignalTooShortError("need at least 2 samples for a DWT step");
  const auto d = dwt(x, 1, bank, ext);
  return {d.approx(), d.details().front()};
}

Decomposition dwt(std::span<const double> x, int levels, const FilterBank& bank, Extension ext) {
  if (x.size() < 2) throw SignalTooShortError("need at least 2 samples for a DWT");
  if (levels < 1 || levels > max_level(x.size()))
    throw LevelError("level count " + std::to_string(levels) + " outside 1.." +
                     std::to_string(max_level(x.size())) + " for " + std::to_string(x.size()) +
                     " samples");
  if (bank.length() == 0) throw InvalidFilterError("filter bank is empty");

  const std::size_t n = x.size();
  const std::size_t block = std::size_t{1} << levels;
  std::size_t pad_left = 0;
  std::size_t padded = round_up(n, block);
  if (ext != Extension::periodic) {
    const std::size_t support = (bank.length() - 1) * (block - 1);
    pad_left = round_up(std::max<std::size_t>(support, 1), block);
    padded = round_up(pad_left + n + pad_left, block);
  }

  std::vector<double> buffer(padded);
  for (std::size_t i = 0; i < padded; ++i) {
    const std::ptrdiff_t at = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>(pad_left);
    buffer[i] = ext == Extension::antireflect ? antireflect(x, at) : x[mirror(at, n)];
  }

  std::vector<Coefficients> details;
  details.reserve(static_cast<std::size_t>(levels));
  Coefficients current = std::move(buffer);
  for (int j = 0; j < levels; ++j) {
    auto step = analyze_periodic(current, bank);
    details.push_back(std::move(step.detail));
    current = std::move(step.approx);
  }
  return Decomposition(std::move(current), std::move(details), n, pad_left, bank, ext);
}

std::vector<double> idwt(const Decomposition& d) {
  const FilterBank& bank = d.bank();
  const Coefficients g1 = bank.synthesis_highpass();
  Coefficients current = d.approx();
  for (int j = d.levels(); j >= 1; --j)
    current = synthesize_periodic(current, d.detail(j), bank, g1);
  const auto first = current.begin() + static_cast<std::ptrdiff_t>(d.pad_left());
  return std::vector<double>(first, first + static_cast<std::ptrdiff_t>(d.original_length()));
}

std::vector<double> reconstruct_band(const Decomposition& d, BandSelector band) {
  using Kind = BandSelector::Kind;
  if (band.kind == Kind::detail && (band.level < 1 || band.level > d.levels()))
    throw BandError("band d" + std::to_string(band.level) + " not present in a " +
                    std::to_string(d.levels()) + "-level decomposition");

  Coefficients approx(d.approx().size(), 0.0);
  if (band.kind == Kind::approx) approx = d.approx();

  std::vector<Coefficients> details;
  details.reserve(d.details().size());
  for (int j = 1; j <= d.levels(); ++j) {
    const bool keep = band.kind == Kind::all_details || (band.kind == Kind::detail && band.level == j);
    details.push_back(keep ? d.detail(j) : Coefficients(d.detail(j).size(), 0.0));
  }
  return idwt(Decomposition(std::move(approx), std::move(details), d.original_length(),
                            d.pad_left(), d.bank(), d.extension()));
}

}  // namespace qrsdwt
