#include "qrsdwt/qrs_detector.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qrsdwt/band_select.hpp"
#include "qrsdwt/errors.hpp"
#include "qrsdwt/preprocess.hpp"

namespace qrsdwt {

namespace {
constexpr double kFlatTolerance = 1e-10;
}  // namespace

void DetectorConfig::validate() const {
  if (!(threshold_ratio > 0.0 && threshold_ratio < 1.0))
    throw DomainError("threshold_ratio must lie in (0, 1)");
  if (!(min_qrs_gap_s > 0.0)) throw DomainError("min_qrs_gap_s must be positive");
  if (!(refractory_s >= min_qrs_gap_s))
    throw DomainError("refractory_s must be >= min_qrs_gap_s");
  if (!(peak_search_pad_s >= 0.0)) throw DomainError("peak_search_pad_s must be >= 0");
  if (decomposition_levels < 1) throw DomainError("decomposition_levels must be >= 1");
  if (level < 1 || level > decomposition_levels)
    throw DomainError("level must lie in 1..decomposition_levels");
}

std::vector<std::size_t> DetectionResult::r_peaks() const {
  std::vector<std::size_t> out;
  out.reserve(events.size());
  for (const auto& e : events) out.push_back(e.r_peak);
  return out;
}

std::size_t seconds_to_samples(double seconds, double fs) {
  if (!(fs > 0.0)) throw DomainError("sampling rate must be positive");
  return static_cast<std::size_t>(std::llround(seconds * fs));
}

ThresholdResult threshold_indices(std::span<const double> yc, double ratio) {
  if (yc.empty()) throw DomainError("threshold_indices: empty input");
  if (!(ratio > 0.0 && ratio < 1.0)) throw DomainError("threshold ratio must lie in (0, 1)");
  double peak = 0.0;
  for (double v : yc) peak = std::max(peak, std::abs(v));

  ThresholdResult out;
  if (peak == 0.0) {
    out.degenerate = true;
    return out;
  }
  out.threshold = ratio * peak;
  for (std::size_t i = 0; i < yc.size(); ++i)
    if (std::abs(yc[i]) >= out.threshold) out.indices.push_back(i);
  return out;
}

std::vector<Span> group_events(std::span<const std::size_t> indices, double fs, double min_gap_s) {
  const std::size_t gap = seconds_to_samples(min_gap_s, fs);
  std::vector<Span> spans;
  for (std::size_t i : indices) {
    if (!spans.empty() && i - spans.back().end < gap)
      spans.back().end = i;
    else
      spans.push_back({i, i});
  }
  return spans;
}

std::vector<QrsEvent> locate_r_peaks(std::span<const Span> spans, std::span<const double> filtered,
                                     double fs, double pad_s, double refractory_s,
                                     RefractoryPolicy policy) {
  const std::size_t pad = seconds_to_samples(pad_s, fs);
  const std::size_t refractory = seconds_to_samples(refractory_s, fs);
  const std::size_t n = filtered.size();

  std::vector<QrsEvent> kept;
  kept.reserve(spans.size());
  for (const Span& s : spans) {
    if (s.start > s.end || s.end >= n)
      throw BoundsError("span [" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                        "] outside a signal of " + std::to_string(n) + " samples");
    const std::size_t lo = s.start >= pad ? s.start - pad : 0;
    const std::size_t hi = std::min(n - 1, s.end + pad);
    std::size_t peak = lo;
    for (std::size_t i = lo + 1; i <= hi; ++i)
      if (std::abs(filtered[i]) > std::abs(filtered[peak])) peak = i;
    QrsEvent ev{s.start, s.end, peak, filtered[peak]};

    if (!kept.empty() && ev.r_peak <= kept.back().r_peak) {
      // Padded windows of adjacent spans can land on the same extremum.
      continue;
    }
    if (!kept.empty() && ev.r_peak - kept.back().r_peak < refractory) {
      if (policy == RefractoryPolicy::keep_larger &&
          std::abs(ev.peak_amplitude) > std::abs(kept.back().peak_amplitude))
        kept.back() = ev;
      continue;
    }
    kept.push_back(ev);
  }
  return kept;
}

DetectionResult detect(const Signal& x, const DetectorConfig& config) {
  config.validate();
  if (!(x.fs > 0.0)) throw DomainError("sampling rate must be positive");
  const int levels = config.decomposition_levels;
  if (x.size() < (std::size_t{1} << levels))
    throw LevelError("signal of " + std::to_string(x.size()) + " samples is too short for " +
                     std::to_string(levels) + " levels");

  const FilterBank bank = filter_bank_by_name(config.wavelet);
  DetectionResult out;
  out.fs = x.fs;
  out.config = config;
  out.filtered = remove_baseline(x, levels, bank, config.extension).samples;

  const Signal filtered{out.filtered, x.fs, x.label};
  out.band_level = config.level;
  if (config.band_mode == BandMode::automatic) {
    bool flat = true;
    for (double v : out.filtered) flat = flat && v == 0.0;
    if (!flat)
      out.band_level =
          select_band(filtered, levels, bank, config.extension, CorrelationReference::raw).best_level;
  }

  const auto d = dwt(out.filtered, levels, bank, config.extension);
  out.yc = reconstruct_band(d, BandSelector::detail(out.band_level));

  // A flat input leaves only rounding residue in yc; treat that as all zeros
  // rather than thresholding noise.
  double input_peak = 0.0;
  double yc_peak = 0.0;
  for (double v : x.samples) input_peak = std::max(input_peak, std::abs(v));
  for (double v : out.yc) yc_peak = std::max(yc_peak, std::abs(v));
  if (yc_peak <= kFlatTolerance * input_peak) {
    out.degenerate = true;
    return out;
  }

  const auto th = threshold_indices(out.yc, config.threshold_ratio);
  out.threshold = th.threshold;
  out.degenerate = th.degenerate;
  if (th.degenerate) return out;

  out.spans = group_events(th.indices, x.fs, config.min_qrs_gap_s);
  out.events = locate_r_peaks(out.spans, out.filtered, x.fs, config.peak_search_pad_s,
                              config.refractory_s, config.refractory_policy);
  return out;
}

}  // namespace qrsdwt
