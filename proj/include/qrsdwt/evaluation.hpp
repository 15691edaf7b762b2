#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qrsdwt/qrs_detector.hpp"
#include "qrsdwt/signal.hpp"

namespace qrsdwt {

inline constexpr double kDefaultMatchTolerance = 0.150;

struct MatchResult {
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;  // (detected, reference)
  double tolerance_s = kDefaultMatchTolerance;
};

// Sweeps references in order, pairing each with the nearest still-unmatched
// detection within +-round(tolerance_s * fs) samples. Both lists must be
// ascending (OrderingError otherwise).
MatchResult match_beats(std::span<const std::int64_t> detected, std::span<const std::int64_t> reference,
                        double fs, double tolerance_s = kDefaultMatchTolerance);

// 100 * TP / (TP + FN).
double sensitivity(std::size_t tp, std::size_t fn);

// Half-up rounding to two decimals, as printed in reports.
std::string format_percent(double value);

struct EvalRow {
  std::string record;
  std::size_t tb = 0;
  std::size_t tp = 0;
  std::size_t fn = 0;
  std::size_t fp = 0;
  double se = 0.0;
  std::optional<std::string> error;  // set when the record could not be evaluated
};

struct EvalReport {
  std::vector<EvalRow> rows;
  double tolerance_s = kDefaultMatchTolerance;

  // Column sums over successful rows; Se from the summed counts.
  EvalRow aggregate() const;
  std::string to_csv() const;
  std::string to_table() const;
};

struct EvalOptions {
  DetectorConfig detector;
  double tolerance_s = kDefaultMatchTolerance;
  std::optional<int> channel;  // default: MLII, else 0
};

// `record` is the path without extension; <record>.hea, the .dat named by the
// header and <record>.atr must exist.
EvalRow evaluate_record(const std::filesystem::path& record, const EvalOptions& options = {});

// Rows in input order; a failing record becomes a row with `error` set.
EvalReport evaluate_records(std::span<const std::filesystem::path> records, const EvalOptions& options = {});

struct SynthOptions {
  double fs = 360.0;
  double heart_rate_bpm = 72.0;
  double duration_s = 60.0;
  double qrs_width_s = 0.08;
  double qrs_amplitude_mv = 1.0;
  double baseline_amplitude_mv = 0.0;
  double baseline_hz = 0.3;
  double jitter_s = 0.0;
  double noise_std_mv = 0.0;
  std::uint64_t seed = 1;
};

struct SynthEcg {
  Signal signal;
  std::vector<std::int64_t> beats;  // exact QRS centre indices
};

// Train of Ricker (negated second-derivative-of-Gaussian) QRS complexes, the
// first centred half a beat period in, plus optional sinusoidal baseline,
// uniform timing jitter and white noise. Deterministic for a given seed.
SynthEcg synth_ecg(const SynthOptions& options);

}  // namespace qrsdwt
