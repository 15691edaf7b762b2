#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qrsdwt/signal.hpp"

namespace qrsdwt {

struct SignalSpec {
  std::string file_name;
  int format = 212;
  double gain = 200.0;       // adu per mV
  int baseline = 0;          // adu that maps to 0 mV
  int adc_resolution = 12;
  int adc_zero = 0;
  int initial_value = 0;
  int checksum = 0;
  int block_size = 0;
  std::string description;   // lead name, e.g. "MLII"

  friend bool operator==(const SignalSpec&, const SignalSpec&) = default;
};

struct RecordHeader {
  std::string record_name;
  int n_signals = 0;
  double fs = 250.0;
  std::size_t n_samples = 0;
  std::vector<SignalSpec> signals;

  friend bool operator==(const RecordHeader&, const RecordHeader&) = default;
};

struct Annotation {
  std::int64_t sample = 0;
  int type_code = 0;
  bool is_beat = false;
  int subtype = 0;
  int channel = 0;
  int num = 0;
  std::optional<std::string> aux;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

// Standard MIT annotation codes that mark a QRS complex.
bool is_beat_code(int type_code);
// Single-character mnemonic ("N", "V", "+", ...); "?" for unknown codes.
std::string_view annotation_mnemonic(int type_code);

// WFDB header grammar: `name[/segs] nsig [fs[/counter][(base)] [nsamp ...]]`
// followed by one line per signal. Comment lines start with '#'.
RecordHeader parse_header(std::string_view text, const std::string& source = "<header>");
RecordHeader read_header(const std::filesystem::path& path);
std::string serialize_header(const RecordHeader& header);

// Raw 12-bit samples of a format-212 stream in storage order
// (sample 0 of every signal, then sample 1, ...).
std::vector<int> decode_212(std::span<const std::uint8_t> bytes, std::size_t count);
// Inverse of decode_212; values are wrapped to 12 bits. Used for fixtures.
std::vector<std::uint8_t> encode_212(std::span<const int> samples);

// Index of the signal whose description is "MLII", else 0.
int default_channel(const RecordHeader& header);

double adu_to_mv(int adu, const SignalSpec& spec);
int mv_to_adu(double mv, const SignalSpec& spec);

// Reads one channel of a format-212 .dat file and converts it to mV. Invalid
// samples (adu -2048) repeat the previous valid value, or 0 mV at the start.
Signal read_signal_212(const std::filesystem::path& path, const RecordHeader& header, int channel);
// Same, without the mV conversion.
std::vector<int> read_raw_212(const std::filesystem::path& path, const RecordHeader& header,
                              int channel);

std::vector<Annotation> parse_annotations(std::span<const std::uint8_t> bytes,
                                          const std::string& source = "<annotations>");
std::vector<Annotation> read_annotations(const std::filesystem::path& path);
// Minimal MIT-format writer (type codes, SKIP for long gaps, AUX strings).
std::vector<std::uint8_t> encode_annotations(std::span<const Annotation> annotations);

std::vector<std::int64_t> beat_samples(std::span<const Annotation> annotations);

// One value per line; a single non-numeric first line is taken as a header.
Signal read_csv(const std::filesystem::path& path, double fs);
Signal parse_csv(std::string_view text, double fs, const std::string& source = "<csv>");
// Shortest round-trip decimal per sample, '\n' terminated.
std::string format_csv(std::span<const double> samples);

// Locale-independent shortest representation that parses back exactly.
std::string format_double(double v);

}  // namespace qrsdwt
