#include "qrsdwt/wfdb_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <system_error>

#include "qrsdwt/errors.hpp"

namespace qrsdwt {

namespace {

// MIT annotation pseudo-codes.
constexpr int kSkip = 59;
constexpr int kNum = 60;
constexpr int kSub = 61;
constexpr int kChn = 62;
constexpr int kAux = 63;

// Format 212 marks missing samples with the most negative 12-bit value.
constexpr int kInvalid212 = -2048;

constexpr std::array<std::string_view, 42> kMnemonics = {
    " ", "N", "L", "R", "a", "V", "F", "J", "A", "S", "E", "j", "/", "Q", "~", "",
    "|", "",  "s", "T", "*", "D", "\"", "=", "p", "B", "^", "t", "+", "u", "?", "!",
    "[", "]", "e", "n", "@", "x", "f", "(", ")", "r"};

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string slurp_text(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  return {bytes.begin(), bytes.end()};
}

std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

template <typename T>
T require_number(std::string_view s, const std::string& source, std::size_t line,
                 const char* field) {
  T v{};
  if (!parse_number(s, v))
    throw ParseError(source, line, std::string("bad ") + field + " '" + std::string(s) + "'");
  return v;
}

// "360", "360/1.0", "360(0)", "360/1(0)"
double parse_frequency(std::string_view token, const std::string& source, std::size_t line) {
  const std::size_t cut = token.find_first_of("/(");
  return require_number<double>(token.substr(0, cut), source, line, "sampling frequency");
}

// "200", "200(1024)", "200/mV", "200(1024)/mV"
void parse_gain(std::string_view token, SignalSpec& spec, bool& has_baseline,
                const std::string& source, std::size_t line) {
  const std::size_t slash = token.find('/');
  std::string_view head = token.substr(0, slash);
  const std::size_t paren = head.find('(');
  if (paren != std::string_view::npos) {
    const std::size_t close = head.find(')', paren);
    if (close == std::string_view::npos) throw ParseError(source, line, "unterminated baseline");
    spec.baseline = require_number<int>(head.substr(paren + 1, close - paren - 1), source, line, "baseline");
    has_baseline = true;
    head = head.substr(0, paren);
  }
  spec.gain = require_number<double>(head, source, line, "gain");
  if (spec.gain == 0.0) spec.gain = 200.0;
}

int sign_extend_12(int v) { return (v & 0x800) ? v - 0x1000 : v; }

std::size_t bytes_for_212(std::size_t count) { return count / 2 * 3 + (count % 2 ? 2 : 0); }

}  // namespace

bool is_beat_code(int type_code) {
  switch (type_code) {
    case 1:   // N  normal
    case 2:   // L  left bundle branch block
    case 3:   // R  right bundle branch block
    case 4:   // a  aberrated atrial premature
    case 5:   // V  premature ventricular contraction
    case 6:   // F  fusion of ventricular and normal
    case 7:   // J  nodal premature
    case 8:   // A  atrial premature
    case 9:   // S  supraventricular premature
    case 10:  // E  ventricular escape
    case 11:  // j  nodal escape
    case 12:  // /  paced
    case 13:  // Q  unclassifiable
    case 25:  // B  bundle branch block, unspecified
    case 30:  // ?  learning
    case 34:  // e  atrial escape
    case 35:  // n  supraventricular escape
    case 38:  // f  fusion of paced and normal
    case 41:  // r  R-on-T premature ventricular
      return true;
    default:
      return false;
  }
}

std::string_view annotation_mnemonic(int type_code) {
  if (type_code < 0 || type_code >= static_cast<int>(kMnemonics.size())) return "?";
  return kMnemonics[static_cast<std::size_t>(type_code)];
}

RecordHeader parse_header(std::string_view text, const std::string& source) {
  RecordHeader header;
  bool have_record_line = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto tok = split_ws(line);

    if (!have_record_line) {
      if (tok.size() < 2) throw ParseError(source, line_no, "record line needs a name and signal count");
      if (tok[0].find('/') != std::string::npos)
        throw UnsupportedFormatError(source + ": multi-segment records are not supported");
      header.record_name = tok[0];
      header.n_signals = require_number<int>(tok[1], source, line_no, "signal count");
      if (header.n_signals < 1) throw ParseError(source, line_no, "record has no signals");
      if (tok.size() > 2) header.fs = parse_frequency(tok[2], source, line_no);
      if (!(header.fs > 0.0)) throw ParseError(source, line_no, "sampling frequency must be positive");
      if (tok.size() > 3) header.n_samples = require_number<std::size_t>(tok[3], source, line_no, "sample count");
      have_record_line = true;
      continue;
    }

    if (static_cast<int>(header.signals.size()) == header.n_signals) continue;  // info strings
    if (tok.size() < 2) throw ParseError(source, line_no, "signal line needs a file name and format");

    SignalSpec spec;
    spec.file_name = tok[0];
    const std::string_view fmt = std::string_view(tok[1]).substr(0, tok[1].find_first_of("x:+"));
    spec.format = require_number<int>(fmt, source, line_no, "format");
    if (spec.format != 212)
      throw UnsupportedFormatError(source + ":" + std::to_string(line_no) + ": format " +
                                   std::to_string(spec.format) + " is not supported (only 212)");
    bool has_baseline = false;
    if (tok.size() > 2) parse_gain(tok[2], spec, has_baseline, source, line_no);
    if (tok.size() > 3) spec.adc_resolution = require_number<int>(tok[3], source, line_no, "ADC resolution");
    if (spec.adc_resolution == 0) spec.adc_resolution = 12;
    if (tok.size() > 4) spec.adc_zero = require_number<int>(tok[4], source, line_no, "ADC zero");
    if (!has_baseline) spec.baseline = spec.adc_zero;
    if (tok.size() > 5) spec.initial_value = require_number<int>(tok[5], source, line_no, "initial value");
    if (tok.size() > 6) spec.checksum = require_number<int>(tok[6], source, line_no, "checksum");
    if (tok.size() > 7) spec.block_size = require_number<int>(tok[7], source, line_no, "block size");
    for (std::size_t i = 8; i < tok.size(); ++i) {
      if (!spec.description.empty()) spec.description += ' ';
      spec.description += tok[i];
    }
    header.signals.push_back(std::move(spec));
  }

  if (!have_record_line) throw ParseError(source, line_no, "no record line");
  if (static_cast<int>(header.signals.size()) != header.n_signals)
    throw ParseError(source, line_no,
                     "expected " + std::to_string(header.n_signals) + " signal lines, found " +
                         std::to_string(header.signals.size()));
  return header;
}

RecordHeader read_header(const std::filesystem::path& path) {
  return parse_header(slurp_text(path), path.string());
}

std::string serialize_header(const RecordHeader& h) {
  std::ostringstream out;
  out << h.record_name << ' ' << h.n_signals << ' ' << format_double(h.fs) << ' ' << h.n_samples << '\n';
  for (const auto& s : h.signals) {
    out << s.file_name << ' ' << s.format << ' ' << format_double(s.gain);
    if (s.baseline != s.adc_zero) out << '(' << s.baseline << ')';
    out << ' ' << s.adc_resolution << ' ' << s.adc_zero << ' ' << s.initial_value << ' '
        << s.checksum << ' ' << s.block_size;
    if (!s.description.empty()) out << ' ' << s.description;
    out << '\n';
  }
  return out.str();
}

std::vector<int> decode_212(std::span<const std::uint8_t> bytes, std::size_t count) {
  const std::size_t needed = bytes_for_212(count);
  if (bytes.size() < needed)
    throw TruncationError("format 212 stream holds " + std::to_string(bytes.size()) + " bytes, need " +
                              std::to_string(needed),
                          bytes.size());
  std::vector<int> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t frame = i / 2 * 3;
    int v;
    if (i % 2 == 0)
      v = bytes[frame] | ((bytes[frame + 1] & 0x0F) << 8);
    else
      v = bytes[frame + 2] | ((bytes[frame + 1] & 0xF0) << 4);
    out[i] = sign_extend_12(v);
  }
  return out;
}

std::vector<std::uint8_t> encode_212(std::span<const int> samples) {
  std::vector<std::uint8_t> out(bytes_for_212(samples.size()), 0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const unsigned v = static_cast<unsigned>(samples[i]) & 0xFFFu;
    const std::size_t frame = i / 2 * 3;
    if (i % 2 == 0) {
      out[frame] = static_cast<std::uint8_t>(v & 0xFF);
      out[frame + 1] = static_cast<std::uint8_t>((out[frame + 1] & 0xF0) | (v >> 8));
    } else {
      out[frame + 1] = static_cast<std::uint8_t>((out[frame + 1] & 0x0F) | ((v >> 8) << 4));
      out[frame + 2] = static_cast<std::uint8_t>(v & 0xFF);
    }
  }
  return out;
}

int default_channel(const RecordHeader& header) {
  for (std::size_t i = 0; i < header.signals.size(); ++i)
    if (header.signals[i].description == "MLII") return static_cast<int>(i);
  return 0;
}

double adu_to_mv(int adu, const SignalSpec& spec) { return (adu - spec.baseline) / spec.gain; }

int mv_to_adu(double mv, const SignalSpec& spec) {
  return static_cast<int>(std::lround(mv * spec.gain)) + spec.baseline;
}

std::vector<int> read_raw_212(const std::filesystem::path& path, const RecordHeader& header,
                              int channel) {
  if (channel < 0 || channel >= header.n_signals)
    throw ChannelError("channel " + std::to_string(channel) + " outside 0.." +
                       std::to_string(header.n_signals - 1));
  for (const auto& s : header.signals) {
    if (s.format != 212) throw UnsupportedFormatError("format " + std::to_string(s.format) + " is not supported");
    if (s.file_name != header.signals.front().file_name)
      throw UnsupportedFormatError("signals spread over several files are not supported");
  }

  const auto bytes = slurp(path);
  const auto nsig = static_cast<std::size_t>(header.n_signals);
  std::size_t n_samples = header.n_samples;
  if (n_samples == 0) n_samples = bytes.size() * 2 / 3 / nsig;
  const auto interleaved = decode_212(bytes, n_samples * nsig);

  std::vector<int> out(n_samples);
  for (std::size_t t = 0; t < n_samples; ++t)
    out[t] = interleaved[t * nsig + static_cast<std::size_t>(channel)];
  return out;
}

Signal read_signal_212(const std::filesystem::path& path, const RecordHeader& header, int channel) {
  const auto raw = read_raw_212(path, header, channel);
  const SignalSpec& spec = header.signals[static_cast<std::size_t>(channel)];
  Signal sig;
  sig.fs = header.fs;
  sig.label = header.record_name + (spec.description.empty() ? "" : ":" + spec.description);
  sig.samples.reserve(raw.size());
  double held = 0.0;
  for (int v : raw) {
    if (v != kInvalid212) held = adu_to_mv(v, spec);
    sig.samples.push_back(held);
  }
  return sig;
}

std::vector<Annotation> parse_annotations(std::span<const std::uint8_t> bytes, const std::string& source) {
  std::vector<Annotation> out;
  std::int64_t time = 0;
  int chan = 0;
  int num = 0;
  std::size_t i = 0;

  auto word_at = [&](std::size_t at) { return static_cast<unsigned>(bytes[at] | (bytes[at + 1] << 8)); };

  while (i + 2 <= bytes.size()) {
    const std::size_t at = i;
    const unsigned word = word_at(i);
    i += 2;
    const int code = static_cast<int>(word >> 10);
    const int arg = static_cast<int>(word & 0x3FF);
    if (code == 0 && arg == 0) return out;

    switch (code) {
      case kSkip: {
        if (i + 4 > bytes.size()) throw TruncationError(source + ": SKIP without its 32-bit interval", at);
        const std::uint32_t hi = word_at(i);
        const std::uint32_t lo = word_at(i + 2);
        i += 4;
        time += static_cast<std::int32_t>((hi << 16) | lo);
        if (time < 0) throw CorruptFileError(source + ": annotation time became negative at byte " + std::to_string(at));
        break;
      }
      case kNum:
        num = arg;
        if (!out.empty()) out.back().num = arg;
        break;
      case kSub:
        if (!out.empty()) out.back().subtype = arg;
        break;
      case kChn:
        chan = arg;
        if (!out.empty()) out.back().channel = arg;
        break;
      case kAux: {
        const std::size_t len = static_cast<std::size_t>(arg);
        if (i + len > bytes.size())
          throw ParseError(source, at, "AUX payload of " + std::to_string(len) + " bytes is truncated");
        std::string text(bytes.begin() + static_cast<std::ptrdiff_t>(i),
                         bytes.begin() + static_cast<std::ptrdiff_t>(i + len));
        // Payload is padded to an even byte count; drop a trailing NUL.
        while (!text.empty() && text.back() == '\0') text.pop_back();
        i += len + (len % 2);
        if (!out.empty()) out.back().aux = std::move(text);
        break;
      }
      default: {
        time += arg;
        if (!out.empty() && time < out.back().sample)
          throw CorruptFileError(source + ": annotation times decrease at byte " + std::to_string(at));
        Annotation a;
        a.sample = time;
        a.type_code = code;
        a.is_beat = is_beat_code(code);
        a.channel = chan;
        a.num = num;
        out.push_back(std::move(a));
        break;
      }
    }
  }
  if (i != bytes.size()) throw TruncationError(source + ": odd trailing byte", i);
  return out;
}

std::vector<Annotation> read_annotations(const std::filesystem::path& path) {
  return parse_annotations(slurp(path), path.string());
}

std::vector<std::uint8_t> encode_annotations(std::span<const Annotation> annotations) {
  std::vector<std::uint8_t> out;
  auto put = [&](unsigned word) {
    out.push_back(static_cast<std::uint8_t>(word & 0xFF));
    out.push_back(static_cast<std::uint8_t>((word >> 8) & 0xFF));
  };
  std::int64_t time = 0;
  int chan = 0;
  int num = 0;
  for (const auto& a : annotations) {
    const std::int64_t delta = a.sample - time;
    if (delta < 0 || delta > 0x3FF) {
      const auto d = static_cast<std::uint32_t>(static_cast<std::int32_t>(delta));
      put(static_cast<unsigned>(kSkip) << 10);
      put(d >> 16);
      put(d & 0xFFFF);
      put(static_cast<unsigned>(a.type_code) << 10);
    } else {
      put((static_cast<unsigned>(a.type_code) << 10) | static_cast<unsigned>(delta));
    }
    time = a.sample;
    if (a.subtype != 0) put((static_cast<unsigned>(kSub) << 10) | (static_cast<unsigned>(a.subtype) & 0x3FF));
    if (a.channel != chan) {
      put((static_cast<unsigned>(kChn) << 10) | (static_cast<unsigned>(a.channel) & 0x3FF));
      chan = a.channel;
    }
    if (a.num != num) {
      put((static_cast<unsigned>(kNum) << 10) | (static_cast<unsigned>(a.num) & 0x3FF));
      num = a.num;
    }
    if (a.aux) {
      const std::string& s = *a.aux;
      put((static_cast<unsigned>(kAux) << 10) | static_cast<unsigned>(s.size() & 0x3FF));
      out.insert(out.end(), s.begin(), s.end());
      if (s.size() % 2) out.push_back(0);
    }
  }
  put(0);
  return out;
}

std::vector<std::int64_t> beat_samples(std::span<const Annotation> annotations) {
  std::vector<std::int64_t> out;
  for (const auto& a : annotations)
    if (a.is_beat) out.push_back(a.sample);
  return out;
}

Signal parse_csv(std::string_view text, double fs, const std::string& source) {
  if (!(fs > 0.0)) throw DomainError("sampling rate must be positive");
  Signal sig;
  sig.fs = fs;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool first_content = true;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = trim(text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.empty()) continue;

    // Multi-column rows (time_s,value) contribute their last column.
    const std::size_t comma = line.rfind(',');
    const std::string_view field = comma == std::string_view::npos ? line : trim(line.substr(comma + 1));
    double v = 0.0;
    const bool ok = parse_number(field, v);
    if (!ok && first_content) {
      first_content = false;
      continue;
    }
    first_content = false;
    if (!ok) throw ParseError(source, line_no, "not a number: '" + std::string(line) + "'");
    sig.samples.push_back(v);
  }
  if (sig.samples.empty()) throw DomainError(source + ": CSV holds no samples");
  return sig;
}

Signal read_csv(const std::filesystem::path& path, double fs) {
  auto sig = parse_csv(slurp_text(path), fs, path.string());
  sig.label = path.stem().string();
  return sig;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string format_csv(std::span<const double> samples) {
  std::string out;
  out.reserve(samples.size() * 12);
  for (double v : samples) {
    out += format_double(v);
    out += '\n';
  }
  return out;
}

}  // namespace qrsdwt
