#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "qrsdwt/errors.hpp"
#include "qrsdwt/preprocess.hpp"
#include "support/oracles.hpp"

namespace qrsdwt {
namespace {

using testing::energy;

struct Row {
  int level;
  const char* lo;
  const char* hi;
};

TEST(BandFrequencies, DetailTableAt130Hz) {
  const Row rows[] = {{1, "65", "130"},     {2, "32.5", "65"},   {3, "16.25", "32.5"},
                      {4, "8.125", "16.25"}, {5, "4.062", "8.125"}, {6, "2.031", "4.062"},
                      {7, "1.015", "2.031"}, {8, "0.507", "1.015"}};
  for (const Row& r : rows) {
    const BandRange b = band_frequencies(BandSelector::detail(r.level), kDefaultFmax);
    EXPECT_EQ(format_band_edge(b.lo), r.lo) << "d" << r.level;
    EXPECT_EQ(format_band_edge(b.hi), r.hi) << "d" << r.level;
    // Exact dyadic values, independent of formatting.
    EXPECT_DOUBLE_EQ(b.lo, 130.0 / std::ldexp(1.0, r.level));
    EXPECT_DOUBLE_EQ(b.hi, 130.0 / std::ldexp(1.0, r.level - 1));
  }
  const BandRange c8 = band_frequencies(BandSelector{BandSelector::Kind::approx, 8}, kDefaultFmax);
  EXPECT_EQ(c8.lo, 0.0);
  EXPECT_EQ(format_band_edge(c8.hi), "0.507");
}

TEST(BandFrequencies, Errors) {
  EXPECT_THROW(band_frequencies(BandSelector::detail(0), 130), DomainError);
  EXPECT_THROW(band_frequencies(BandSelector::detail(3), 0), DomainError);
  EXPECT_THROW(band_frequencies(BandSelector::detail(3), -5), DomainError);
  EXPECT_THROW(band_frequencies(BandSelector::all_details(), 130), DomainError);
}

TEST(FormatBandEdge, TruncatesAndTrims) {
  EXPECT_EQ(format_band_edge(4.0625), "4.062");
  EXPECT_EQ(format_band_edge(1.015625), "1.015");
  EXPECT_EQ(format_band_edge(65.0), "65");
  EXPECT_EQ(format_band_edge(32.5), "32.5");
  EXPECT_EQ(format_band_edge(0.0), "0");
}

TEST(BandLabel, Names) {
  EXPECT_EQ(band_label(BandSelector::detail(4), 8), "d4");
  EXPECT_EQ(band_label(BandSelector::approximation(), 8), "C8");
}

TEST(RemoveBaseline, ConstantBecomesZero) {
  const Signal x{std::vector<double>(4096, 3.0), 360.0, ""};
  for (double v : remove_baseline(x).samples) EXPECT_NEAR(v, 0.0, 1e-9);
}

TEST(RemoveBaseline, KeepsTenHertz) {
  const double fs = 360.0;
  const Signal x{testing::sine(8192, fs, 10.0), fs, ""};
  const auto y = remove_baseline(x).samples;
  EXPECT_GE(energy(y) / energy(x.samples), 0.99);
}

TEST(RemoveBaseline, AttenuatesSlowDrift) {
  const double fs = 360.0;
  const std::size_t n = 8192;
  auto s10 = testing::sine(n, fs, 10.0);
  auto drift = testing::sine(n, fs, 0.3, 2.0);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = s10[i] + drift[i];
  const auto y = remove_baseline(Signal{x, fs, ""}).samples;
  const double before = testing::band_energy(x, fs, 0.0, 0.5);
  const double after = testing::band_energy(y, fs, 0.0, 0.5);
  EXPECT_GE(10.0 * std::log10(before / after), 20.0);
  EXPECT_GE(testing::band_energy(y, fs, 9.5, 10.5) / testing::band_energy(x, fs, 9.5, 10.5), 0.99);
}

TEST(RemoveBaseline, Properties) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const auto noise = testing::random_signal(rng, 4096, 0.5);
    const auto drift = testing::sine(4096, 360.0, 0.2 + 0.1 * trial, 3.0);
    std::vector<double> v(4096);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = noise[i] + drift[i] + 1.5;
    const Signal x{v, 360.0, ""};
    const auto y = remove_baseline(x).samples;
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    const double sd = std::sqrt(energy(y) / static_cast<double>(y.size()));
    EXPECT_LT(std::abs(mean), 1e-6 * sd);
    EXPECT_LE(energy(y), energy(v));
    // Removing twice changes almost nothing.
    const auto y2 = remove_baseline(Signal{y, 360.0, ""}).samples;
    std::vector<double> diff(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) diff[i] = y2[i] - y[i];
    EXPECT_LT(energy(diff), 0.01 * energy(y));
    // filtered + approximation band rebuilds the input.
    const auto approx = reconstruct_band(dwt(v, kBaselineLevels, make_db4()), BandSelector::approximation());
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(y[i] + approx[i], v[i], 1e-9);
  }
}

TEST(RemoveBaseline, Linear) {
  std::mt19937_64 rng(43);
  const auto a = testing::random_signal(rng, 2048);
  const auto b = testing::random_signal(rng, 2048);
  std::vector<double> mix(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) mix[i] = 2.0 * a[i] - 3.0 * b[i];
  const auto ya = remove_baseline(Signal{a, 360, ""}).samples;
  const auto yb = remove_baseline(Signal{b, 360, ""}).samples;
  const auto ym = remove_baseline(Signal{mix, 360, ""}).samples;
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(ym[i], 2.0 * ya[i] - 3.0 * yb[i], 1e-9);
}

TEST(RemoveBaseline, TooShort) {
  const Signal x{std::vector<double>(200, 1.0), 360.0, ""};
  EXPECT_THROW(remove_baseline(x), LevelError);
}

}  // namespace
}  // namespace qrsdwt
