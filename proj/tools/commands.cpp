#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "qrsdwt/band_select.hpp"
#include "qrsdwt/errors.hpp"
#include "qrsdwt/evaluation.hpp"
#include "qrsdwt/preprocess.hpp"
#include "qrsdwt/qrs_detector.hpp"
#include "qrsdwt/wavelet.hpp"
#include "qrsdwt/wfdb_io.hpp"

namespace qrsdwt::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public Error {
  using Error::Error;
};

struct RunConfig {
  std::vector<std::string> inputs;
  double fs = 360.0;
  std::optional<int> channel;
  int levels = kBaselineLevels;
  std::string wavelet = "db4";
  std::string extension;
  std::string out_dir = ".";
  std::string format = "csv";
  std::string config_file;
  std::string data_dir;
  double f_max = kDefaultFmax;
  double tolerance_ms = kDefaultMatchTolerance * 1000.0;
  double threshold_ratio = 0.15;
  int level = 4;
  std::string band_mode = "fixed";
  bool strict_refractory = false;
  bool raw_reference = false;
  bool gnuplot = false;
  DetectorConfig detector;
};

// Writes through a temporary file in the same directory, then renames.
void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + tmp.string());
    f << content;
    if (!f) throw IoError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string time_series_csv(std::span<const double> samples, double fs) {
  std::string out = "time_s,value\n";
  out.reserve(samples.size() * 24);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out += format_double(static_cast<double>(i) / fs);
    out += ',';
    out += format_double(samples[i]);
    out += '\n';
  }
  return out;
}

std::string gnuplot_script(const std::vector<std::pair<std::string, std::string>>& series) {
  std::string s = "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'time (s)'\nplot ";
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (i) s += ", \\\n     ";
    s += "'" + series[i].first + "' using 1:2 with lines title '" + series[i].second + "'";
  }
  return s + "\n";
}

bool is_csv_path(const fs::path& p) {
  const auto ext = p.extension().string();
  return ext == ".csv" || ext == ".txt";
}

fs::path strip_record_ext(fs::path p) {
  const auto ext = p.extension().string();
  if (ext == ".hea" || ext == ".dat" || ext == ".atr") p.replace_extension();
  return p;
}

Signal load_input(const std::string& input, const RunConfig& cfg) {
  const fs::path p(input);
  if (is_csv_path(p)) {
    if (!fs::exists(p)) throw IoError("cannot open " + p.string());
    return read_csv(p, cfg.fs);
  }
  const fs::path base = strip_record_ext(p);
  fs::path hea = base;
  hea += ".hea";
  if (!fs::exists(hea)) throw IoError("cannot open " + hea.string());
  const RecordHeader header = read_header(hea);
  const int channel = cfg.channel.value_or(default_channel(header));
  if (channel < 0 || channel >= header.n_signals)
    throw ChannelError("channel " + std::to_string(channel) + " not in record " + header.record_name);
  return read_signal_212(base.parent_path() / header.signals[static_cast<std::size_t>(channel)].file_name,
                         header, channel);
}

Extension resolve_extension(const RunConfig& cfg, Extension fallback) {
  return cfg.extension.empty() ? fallback : extension_from_string(cfg.extension);
}

json config_to_json(const DetectorConfig& c) {
  return json{
      {"threshold_ratio", c.threshold_ratio},
      {"min_qrs_gap_s", c.min_qrs_gap_s},
      {"refractory_s", c.refractory_s},
      {"peak_search_pad_s", c.peak_search_pad_s},
      {"level", c.level},
      {"decomposition_levels", c.decomposition_levels},
      {"band_mode", c.band_mode == BandMode::fixed ? "fixed" : "auto"},
      {"refractory_policy", c.refractory_policy == RefractoryPolicy::keep_larger ? "keep_larger" : "keep_earlier"},
      {"wavelet", c.wavelet},
      {"extension", std::string(to_string(c.extension))},
  };
}

BandMode band_mode_from_string(const std::string& s) {
  if (s == "fixed") return BandMode::fixed;
  if (s == "auto") return BandMode::automatic;
  throw UsageError("band mode must be 'fixed' or 'auto'");
}

void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path, 0, e.what());
  }
  DetectorConfig& d = cfg.detector;
  d.threshold_ratio = j.value("threshold_ratio", d.threshold_ratio);
  d.min_qrs_gap_s = j.value("min_qrs_gap_s", d.min_qrs_gap_s);
  d.refractory_s = j.value("refractory_s", d.refractory_s);
  d.peak_search_pad_s = j.value("peak_search_pad_s", d.peak_search_pad_s);
  d.level = j.value("level", d.level);
  d.decomposition_levels = j.value("decomposition_levels", d.decomposition_levels);
  d.wavelet = j.value("wavelet", d.wavelet);
  if (j.contains("band_mode")) d.band_mode = band_mode_from_string(j["band_mode"].get<std::string>());
  if (j.contains("extension")) d.extension = extension_from_string(j["extension"].get<std::string>());
  if (j.contains("refractory_policy"))
    d.refractory_policy = j["refractory_policy"].get<std::string>() == "keep_earlier" ? RefractoryPolicy::keep_earlier
                                                                                      : RefractoryPolicy::keep_larger;
  cfg.tolerance_ms = j.value("tolerance_ms", cfg.tolerance_ms);
  cfg.fs = j.value("fs", cfg.fs);
}

// Flags > config file > defaults.
void resolve_detector(const CLI::App& sub, RunConfig& cfg) {
  if (!cfg.config_file.empty()) apply_config_file(cfg.config_file, cfg);
  DetectorConfig& d = cfg.detector;
  if (sub.count("--threshold-ratio")) d.threshold_ratio = cfg.threshold_ratio;
  if (sub.count("--levels")) d.decomposition_levels = cfg.levels;
  if (sub.count("--level")) d.level = cfg.level;
  if (sub.count("--wavelet")) d.wavelet = cfg.wavelet;
  if (sub.count("--band")) d.band_mode = band_mode_from_string(cfg.band_mode);
  if (sub.count("--strict-refractory") && cfg.strict_refractory) d.refractory_policy = RefractoryPolicy::keep_earlier;
  if (!cfg.extension.empty()) d.extension = extension_from_string(cfg.extension);
  try {
    d.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

int cmd_bands(const RunConfig& cfg, bool write_out, std::ostream& out) {
  if (cfg.levels < 1) throw UsageError("--levels must be >= 1");
  const double nyquist = cfg.fs / 2.0;
  std::ostringstream csv;
  csv << "band,lo_hz,hi_hz,lo_hz_nyquist,hi_hz_nyquist\n";
  json table = json::array();
  char line[160];
  std::snprintf(line, sizeof line, "%-5s %-22s %-22s\n", "band", "f_max-based (Hz)", "fs/2-based (Hz)");
  out << line;
  auto row = [&](BandSelector b) {
    const auto r = band_frequencies(b, cfg.f_max);
    const auto n = band_frequencies(b, nyquist);
    const std::string name = band_label(b, cfg.levels);
    const std::string nominal = format_band_edge(r.lo) + "-" + format_band_edge(r.hi);
    const std::string physical = format_band_edge(n.lo) + "-" + format_band_edge(n.hi);
    std::snprintf(line, sizeof line, "%-5s %-22s %-22s\n", name.c_str(), nominal.c_str(), physical.c_str());
    out << line;
    csv << name << ',' << format_band_edge(r.lo) << ',' << format_band_edge(r.hi) << ',' << format_band_edge(n.lo)
        << ',' << format_band_edge(n.hi) << '\n';
    table.push_back({{"band", name}, {"lo_hz", r.lo}, {"hi_hz", r.hi}, {"lo_hz_nyquist", n.lo}, {"hi_hz_nyquist", n.hi}});
  };
  for (int j = 1; j <= cfg.levels; ++j) row(BandSelector::detail(j));
  row(BandSelector{BandSelector::Kind::approx, cfg.levels});
  std::snprintf(line, sizeof line, "f_max = %s Hz, fs = %s Hz\n", format_double(cfg.f_max).c_str(),
                format_double(cfg.fs).c_str());
  out << line;

  if (write_out) {
    const fs::path dir(cfg.out_dir);
    if (cfg.format == "json")
      write_file(dir / "bands.json", json{{"f_max", cfg.f_max}, {"fs", cfg.fs}, {"bands", table}}.dump(2) + "\n");
    else
      write_file(dir / "bands.csv", csv.str());
  }
  return kOk;
}

int cmd_decompose(const RunConfig& cfg, std::ostream& out) {
  const Signal x = load_input(cfg.inputs.at(0), cfg);
  const FilterBank bank = filter_bank_by_name(cfg.wavelet);
  const auto d = dwt(x.samples, cfg.levels, bank, resolve_extension(cfg, Extension::periodic));
  const fs::path dir(cfg.out_dir);
  std::vector<std::pair<std::string, std::string>> series;
  for (int j = 1; j <= d.levels(); ++j) {
    const std::string name = "band_d" + std::to_string(j) + ".csv";
    write_file(dir / name, time_series_csv(reconstruct_band(d, BandSelector::detail(j)), x.fs));
    series.emplace_back(name, "d" + std::to_string(j));
  }
  const std::string approx_name = "band_C" + std::to_string(d.levels()) + ".csv";
  write_file(dir / approx_name, time_series_csv(reconstruct_band(d, BandSelector::approximation()), x.fs));
  series.emplace_back(approx_name, "C" + std::to_string(d.levels()));
  if (cfg.gnuplot) write_file(dir / "decompose.gp", gnuplot_script(series));

  RunConfig table_cfg = cfg;
  table_cfg.fs = x.fs;
  std::ostringstream sink;
  cmd_bands(table_cfg, true, sink);
  out << "wrote " << d.levels() + 1 << " band files and the band table to " << dir.string() << '\n';
  return kOk;
}

int cmd_filter(const RunConfig& cfg, std::ostream& out) {
  const Signal x = load_input(cfg.inputs.at(0), cfg);
  const Signal y = remove_baseline(x, cfg.levels, filter_bank_by_name(cfg.wavelet),
                                   resolve_extension(cfg, Extension::periodic));
  const fs::path dir(cfg.out_dir);
  write_file(dir / "filtered.csv", time_series_csv(y.samples, y.fs));
  if (cfg.gnuplot) {
    write_file(dir / "input.csv", time_series_csv(x.samples, x.fs));
    write_file(dir / "filter.gp", gnuplot_script({{"input.csv", "input"}, {"filtered.csv", "filtered"}}));
  }
  out << "wrote " << (dir / "filtered.csv").string() << " (" << y.size() << " samples)\n";
  return kOk;
}

int cmd_xcorr(const RunConfig& cfg, std::ostream& out) {
  const Signal x = load_input(cfg.inputs.at(0), cfg);
  const auto sel = select_band(x, cfg.levels, filter_bank_by_name(cfg.wavelet),
                               resolve_extension(cfg, Extension::periodic),
                               cfg.raw_reference ? CorrelationReference::raw : CorrelationReference::baseline_removed);
  std::string csv = "level,percent\n";
  json scores = json::array();
  for (const auto& s : sel.scores) {
    csv += std::to_string(s.level) + "," + format_percent(s.score) + "\n";
    scores.push_back({{"level", s.level}, {"percent", s.score}});
  }
  const fs::path dir(cfg.out_dir);
  if (cfg.format == "json")
    write_file(dir / "xcorr.json", json{{"best_level", sel.best_level},
                                        {"reference", cfg.raw_reference ? "raw" : "baseline_removed"},
                                        {"scores", scores}}
                                       .dump(2) + "\n");
  else
    write_file(dir / "xcorr.csv", csv);
  out << csv << "best level: d" << sel.best_level << '\n';
  return kOk;
}

int cmd_detect(const RunConfig& cfg, std::ostream& out) {
  const Signal x = load_input(cfg.inputs.at(0), cfg);
  const DetectionResult det = detect(x, cfg.detector);

  std::string csv = "sample_index,time_s,amplitude\n";
  for (const auto& e : det.events)
    csv += std::to_string(e.r_peak) + "," + format_double(static_cast<double>(e.r_peak) / det.fs) + "," +
           format_double(e.peak_amplitude) + "\n";

  json warnings = json::array();
  if (det.degenerate) warnings.push_back("degenerate threshold: detection band is all zeros");
  const json summary{
      {"input", cfg.inputs.at(0)},
      {"label", x.label},
      {"fs", det.fs},
      {"n_samples", x.size()},
      {"N_qrs", det.events.size()},
      {"n_spans", det.spans.size()},
      {"threshold", det.threshold},
      {"band_level", det.band_level},
      {"degenerate", det.degenerate},
      {"warnings", warnings},
      {"config", config_to_json(det.config)},
  };

  const fs::path dir(cfg.out_dir);
  write_file(dir / "events.csv", csv);
  write_file(dir / "summary.json", summary.dump(2) + "\n");
  if (cfg.gnuplot) {
    write_file(dir / "filtered.csv", time_series_csv(det.filtered, det.fs));
    write_file(dir / "yc.csv", time_series_csv(det.yc, det.fs));
    write_file(dir / "detect.gp", gnuplot_script({{"filtered.csv", "filtered ECG"}, {"yc.csv", "yc"}}));
  }
  out << "N_qrs = " << det.events.size() << ", threshold = " << format_double(det.threshold) << '\n';
  if (det.degenerate) out << "warning: degenerate threshold (flat detection band)\n";
  return kOk;
}

fs::path resolve_record(const std::string& name, const RunConfig& cfg) {
  const fs::path direct = strip_record_ext(fs::path(name));
  fs::path hea = direct;
  hea += ".hea";
  if (fs::exists(hea) || cfg.data_dir.empty()) return direct;
  return fs::path(cfg.data_dir) / direct;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.inputs.empty()) throw UsageError("eval needs at least one record");
  std::vector<fs::path> records;
  for (const auto& r : cfg.inputs) records.push_back(resolve_record(r, cfg));

  EvalOptions opts;
  opts.detector = cfg.detector;
  opts.tolerance_s = cfg.tolerance_ms / 1000.0;
  opts.channel = cfg.channel;
  const EvalReport report = evaluate_records(records, opts);

  std::size_t failures = 0;
  for (const auto& row : report.rows) {
    if (!row.error) continue;
    ++failures;
    err << "warning: record " << row.record << " skipped: " << *row.error << '\n';
  }

  const fs::path dir(cfg.out_dir);
  if (cfg.format == "json") {
    json rows = json::array();
    for (const auto& r : report.rows) {
      if (r.error)
        rows.push_back({{"record", r.record}, {"error", *r.error}});
      else
        rows.push_back({{"record", r.record}, {"TB", r.tb}, {"TP", r.tp}, {"FN", r.fn}, {"FP", r.fp}, {"Se", r.se}});
    }
    const auto all = report.aggregate();
    write_file(dir / "report.json",
               json{{"rows", rows},
                    {"aggregate", {{"TB", all.tb}, {"TP", all.tp}, {"FN", all.fn}, {"FP", all.fp}, {"Se", all.se}}},
                    {"tolerance_s", report.tolerance_s},
                    {"config", config_to_json(cfg.detector)}}
                       .dump(2) + "\n");
  } else {
    write_file(dir / "report.csv", report.to_csv());
  }
  const std::string table = report.to_table();
  write_file(dir / "report.txt", table);
  out << table;
  return failures == report.rows.size() ? kAllRecordsFailed : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  if (const char* env = std::getenv(kDataDirEnv)) cfg.data_dir = env;

  CLI::App app{"DWT-based QRS detection toolkit"};
  app.require_subcommand(1);
  app.footer(
      "Exit codes: 0 success, 2 usage, 3 I/O, 4 parse, 5 processing, 6 every eval record failed.\n"
      "Records for `eval` are looked up in $" + std::string(kDataDirEnv) + " unless given as paths.");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--fs", cfg.fs, "Sampling rate of CSV input (Hz)")->capture_default_str();
    sub->add_option("--channel", cfg.channel, "Signal index for WFDB records (default: MLII, else 0)");
    sub->add_option("--levels", cfg.levels, "Decomposition levels")->capture_default_str();
    sub->add_option("--wavelet", cfg.wavelet, "db4 or haar")->capture_default_str();
    sub->add_option("--extension", cfg.extension, "periodic, symmetric or antireflect boundary extension");
    sub->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    sub->add_flag("--gnuplot", cfg.gnuplot, "Also write a gnuplot script");
  };
  auto add_detector = [&](CLI::App* sub) {
    sub->add_option("--config", cfg.config_file, "JSON file with detector settings");
    sub->add_option("--threshold-ratio", cfg.threshold_ratio, "Fraction of max|yc| used as threshold");
    sub->add_option("--level", cfg.level, "Detail level used for yc");
    sub->add_option("--band", cfg.band_mode, "fixed or auto band selection");
    sub->add_flag("--strict-refractory", cfg.strict_refractory, "Drop the later of two close peaks");
  };

  auto* bands = app.add_subcommand("bands", "Print the dyadic band frequency table");
  add_common(bands);
  bands->add_option("--fmax", cfg.f_max, "Content bandwidth used for labels (Hz)")->capture_default_str();

  auto* decompose = app.add_subcommand("decompose", "Write every band reconstructed at the input rate");
  add_common(decompose);
  decompose->add_option("--fmax", cfg.f_max, "Content bandwidth used for labels (Hz)")->capture_default_str();
  decompose->add_option("input", cfg.inputs, "CSV file or WFDB record")->required()->expected(1);

  auto* filter = app.add_subcommand("filter", "Remove baseline wander");
  add_common(filter);
  filter->add_option("input", cfg.inputs, "CSV file or WFDB record")->required()->expected(1);

  auto* xcorr = app.add_subcommand("xcorr", "Score each detail band against the ECG");
  add_common(xcorr);
  xcorr->add_flag("--raw", cfg.raw_reference, "Correlate against the raw input instead of the baseline-removed one");
  xcorr->add_option("input", cfg.inputs, "CSV file or WFDB record")->required()->expected(1);

  auto* detect_cmd = app.add_subcommand("detect", "Detect R peaks");
  add_common(detect_cmd);
  add_detector(detect_cmd);
  detect_cmd->add_option("input", cfg.inputs, "CSV file or WFDB record")->required()->expected(1);

  auto* eval = app.add_subcommand("eval", "Score the detector against reference annotations");
  add_common(eval);
  add_detector(eval);
  eval->add_option("--tolerance-ms", cfg.tolerance_ms, "Beat matching window (ms)")->capture_default_str();
  eval->add_option("--data-dir", cfg.data_dir, "Directory holding downloaded records");
  eval->add_option("records", cfg.inputs, "Record names or paths");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*bands) return cmd_bands(cfg, bands->count("--out") > 0, out);
    if (*decompose) return cmd_decompose(cfg, out);
    if (*filter) return cmd_filter(cfg, out);
    if (*xcorr) return cmd_xcorr(cfg, out);
    if (*detect_cmd) {
      resolve_detector(*detect_cmd, cfg);
      return cmd_detect(cfg, out);
    }
    if (*eval) {
      resolve_detector(*eval, cfg);
      return cmd_eval(cfg, out, err);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  } catch (const TruncationError& e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  } catch (const CorruptFileError& e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  } catch (const UnsupportedFormatError& e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kProcessing;
  }
  return kUsage;
}

}  // namespace qrsdwt::cli
