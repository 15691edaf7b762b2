#include "qrsdwt/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <numbers>
#include <random>
#include <sstream>

#include "qrsdwt/errors.hpp"
#include "qrsdwt/wfdb_io.hpp"

namespace qrsdwt {

MatchResult match_beats(std::span<const std::int64_t> detected, std::span<const std::int64_t> reference,
                        double fs, double tolerance_s) {
  if (!std::is_sorted(detected.begin(), detected.end()))
    throw OrderingError("match_beats: detected beats are not ascending");
  if (!std::is_sorted(reference.begin(), reference.end()))
    throw OrderingError("match_beats: reference beats are not ascending");
  if (!(tolerance_s >= 0.0)) throw DomainError("match tolerance must be >= 0");
  const auto tol = static_cast<std::int64_t>(seconds_to_samples(tolerance_s, fs));

  MatchResult out;
  out.tolerance_s = tolerance_s;
  std::vector<bool> used(detected.size(), false);
  for (const std::int64_t ref : reference) {
    auto it = std::lower_bound(detected.begin(), detected.end(), ref - tol);
    std::ptrdiff_t best = -1;
    std::int64_t best_dist = 0;
    for (; it != detected.end() && *it <= ref + tol; ++it) {
      const auto idx = it - detected.begin();
      if (used[static_cast<std::size_t>(idx)]) continue;
      const std::int64_t dist = std::abs(*it - ref);
      if (best < 0 || dist < best_dist) {
        best = idx;
        best_dist = dist;
      }
    }
    if (best < 0) {
      ++out.fn;
      continue;
    }
    used[static_cast<std::size_t>(best)] = true;
    out.pairs.emplace_back(detected[static_cast<std::size_t>(best)], ref);
  }
  out.tp = out.pairs.size();
  out.fp = detected.size() - out.tp;
  return out;
}

double sensitivity(std::size_t tp, std::size_t fn) {
  if (tp + fn == 0) throw UndefinedSensitivityError("sensitivity undefined with no reference beats");
  return 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fn);
}

std::string format_percent(double value) {
  // The epsilon absorbs binary representation error on exact .xx5 ties.
  const double rounded = std::floor(value * 100.0 + 0.5 + 1e-9) / 100.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", rounded);
  return buf;
}

EvalRow EvalReport::aggregate() const {
  EvalRow all;
  all.record = "All";
  for (const auto& r : rows) {
    if (r.error) continue;
    all.tb += r.tb;
    all.tp += r.tp;
    all.fn += r.fn;
    all.fp += r.fp;
  }
  all.se = all.tp + all.fn > 0 ? sensitivity(all.tp, all.fn) : 0.0;
  return all;
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "record,TB,TP,FN,FP,Se,error\n";
  auto emit = [&](const EvalRow& r) {
    out << r.record << ',';
    if (r.error) {
      out << ",,,,," << '"' << *r.error << '"' << '\n';
      return;
    }
    out << r.tb << ',' << r.tp << ',' << r.fn << ',' << r.fp << ',' << format_percent(r.se) << ",\n";
  };
  for (const auto& r : rows) emit(r);
  emit(aggregate());
  return out.str();
}

std::string EvalReport::to_table() const {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-8s %7s %7s %6s %6s %8s\n", "Record", "TB", "TP", "FN", "FP", "Se(%)");
  out << line;
  auto emit = [&](const EvalRow& r) {
    if (r.error) {
      std::snprintf(line, sizeof line, "%-8s  skipped: ", r.record.c_str());
      out << line << *r.error << '\n';
      return;
    }
    std::snprintf(line, sizeof line, "%-8s %7zu %7zu %6zu %6zu %8s\n", r.record.c_str(), r.tb, r.tp, r.fn,
                  r.fp, format_percent(r.se).c_str());
    out << line;
  };
  for (const auto& r : rows) emit(r);
  emit(aggregate());
  std::snprintf(line, sizeof line, "match tolerance: +-%.0f ms\n", tolerance_s * 1000.0);
  out << line;
  return out.str();
}

EvalRow evaluate_record(const std::filesystem::path& record, const EvalOptions& options) {
  auto with_ext = [&](const char* ext) {
    auto p = record;
    p += ext;
    return p;
  };
  const RecordHeader header = read_header(with_ext(".hea"));
  const int channel = options.channel.value_or(default_channel(header));
  if (channel < 0 || channel >= header.n_signals)
    throw ChannelError("channel " + std::to_string(channel) + " not in record " + header.record_name);
  const auto dat = record.parent_path() / header.signals[static_cast<std::size_t>(channel)].file_name;
  const Signal signal = read_signal_212(dat, header, channel);
  const auto annotations = read_annotations(with_ext(".atr"));
  const auto reference = beat_samples(annotations);

  const DetectionResult det = detect(signal, options.detector);
  std::vector<std::int64_t> detected;
  detected.reserve(det.events.size());
  for (const auto& e : det.events) detected.push_back(static_cast<std::int64_t>(e.r_peak));

  const MatchResult m = match_beats(detected, reference, signal.fs, options.tolerance_s);
  EvalRow row;
  row.record = header.record_name;
  row.tb = reference.size();
  row.tp = m.tp;
  row.fn = m.fn;
  row.fp = m.fp;
  row.se = sensitivity(m.tp, m.fn);
  return row;
}

EvalReport evaluate_records(std::span<const std::filesystem::path> records, const EvalOptions& options) {
  std::vector<std::future<EvalRow>> jobs;
  jobs.reserve(records.size());
  for (const auto& r : records)
    jobs.push_back(std::async(std::launch::async, [&options, r] { return evaluate_record(r, options); }));

  EvalReport report;
  report.tolerance_s = options.tolerance_s;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    try {
      report.rows.push_back(jobs[i].get());
    } catch (const std::exception& e) {
      EvalRow failed;
      failed.record = records[i].filename().string();
      failed.error = e.what();
      report.rows.push_back(std::move(failed));
    }
  }
  return report;
}

SynthEcg synth_ecg(const SynthOptions& o) {
  if (!(o.fs > 0.0) || !(o.heart_rate_bpm > 0.0) || !(o.duration_s > 0.0) || !(o.qrs_width_s > 0.0))
    throw DomainError("synth_ecg: fs, heart rate, duration and QRS width must be positive");
  const double period = 60.0 / o.heart_rate_bpm;
  if (!(o.qrs_width_s < period)) throw DomainError("synth_ecg: QRS width must be shorter than the beat period");
  if (o.jitter_s < 0.0 || o.jitter_s >= period / 2.0)
    throw DomainError("synth_ecg: jitter must lie in [0, period/2)");
  if (o.baseline_amplitude_mv < 0.0 || o.noise_std_mv < 0.0 || o.baseline_hz < 0.0)
    throw DomainError("synth_ecg: noise parameters must be non-negative");

  const auto n = static_cast<std::size_t>(std::llround(o.duration_s * o.fs));
  SynthEcg out;
  out.signal.fs = o.fs;
  out.signal.label = "synthetic";
  out.signal.samples.assign(n, 0.0);

  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> jitter(-o.jitter_s, o.jitter_s);

  const double sigma = o.qrs_width_s / 6.0 * o.fs;  // in samples
  const auto reach = static_cast<std::int64_t>(std::ceil(5.0 * sigma));
  for (std::int64_t k = 0;; ++k) {
    double t = (static_cast<double>(k) + 0.5) * period;
    if (o.jitter_s > 0.0) t += jitter(rng);
    const std::int64_t centre = std::llround(t * o.fs);
    if (centre >= static_cast<std::int64_t>(n)) break;
    if (centre < 0) continue;
    out.beats.push_back(centre);
    const std::int64_t lo = std::max<std::int64_t>(0, centre - reach);
    const std::int64_t hi = std::min<std::int64_t>(static_cast<std::int64_t>(n) - 1, centre + reach);
    for (std::int64_t i = lo; i <= hi; ++i) {
      const double u = static_cast<double>(i - centre) / sigma;
      out.signal.samples[static_cast<std::size_t>(i)] += o.qrs_amplitude_mv * (1.0 - u * u) * std::exp(-0.5 * u * u);
    }
  }

  if (o.baseline_amplitude_mv > 0.0) {
    const double w = 2.0 * std::numbers::pi * o.baseline_hz / o.fs;
    for (std::size_t i = 0; i < n; ++i) out.signal.samples[i] += o.baseline_amplitude_mv * std::sin(w * static_cast<double>(i));
  }
  if (o.noise_std_mv > 0.0) {
    std::normal_distribution<double> noise(0.0, o.noise_std_mv);
    for (double& v : out.signal.samples) v += noise(rng);
  }
  return out;
}

}  // namespace qrsdwt
