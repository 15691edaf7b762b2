#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qrsdwt/signal.hpp"
#include "qrsdwt/wavelet.hpp"

namespace qrsdwt {

enum class BandMode { fixed, automatic };

// How two R peaks closer than the refractory period are resolved.
enum class RefractoryPolicy {
  keep_larger,   // keep the larger |amplitude| of the pair
  keep_earlier,  // drop the later peak unconditionally
};

struct DetectorConfig {
  double threshold_ratio = 0.15;
  double min_qrs_gap_s = 0.100;
  double refractory_s = 0.200;
  double peak_search_pad_s = 0.050;
  int level = 4;
  int decomposition_levels = 8;
  BandMode band_mode = BandMode::fixed;
  RefractoryPolicy refractory_policy = RefractoryPolicy::keep_larger;
  std::string wavelet = "db4";
  Extension extension = Extension::antireflect;

  // Throws DomainError when an invariant is violated.
  void validate() const;
};

struct QrsEvent {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t r_peak = 0;
  double peak_amplitude = 0.0;
};

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;  // inclusive

  friend bool operator==(const Span&, const Span&) = default;
};

struct ThresholdResult {
  double threshold = 0.0;
  std::vector<std::size_t> indices;
  bool degenerate = false;  // yc was all zeros
};

struct DetectionResult {
  std::vector<QrsEvent> events;
  std::vector<Span> spans;         // supra-threshold groups before peak location
  std::vector<double> yc;          // detection band at the input rate
  std::vector<double> filtered;    // baseline-removed input
  double threshold = 0.0;
  double fs = 0.0;
  int band_level = 0;              // level yc was built from
  bool degenerate = false;
  DetectorConfig config;

  std::vector<std::size_t> r_peaks() const;
};

// th = ratio * max|yc|; indices with |yc[i]| >= th, ascending.
ThresholdResult threshold_indices(std::span<const double> yc, double ratio);

// Consecutive indices closer than round(min_gap_s * fs) belong to one span.
std::vector<Span> group_events(std::span<const std::size_t> indices, double fs, double min_gap_s);

std::vector<QrsEvent> locate_r_peaks(std::span<const Span> spans, std::span<const double> filtered,
                                     double fs, double pad_s, double refractory_s,
                                     RefractoryPolicy policy = RefractoryPolicy::keep_larger);

DetectionResult detect(const Signal& x, const DetectorConfig& config = {});

std::size_t seconds_to_samples(double seconds, double fs);

}  // namespace qrsdwt
