#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qrsdwt {

// Base of everything the library throws on bad input or corrupt data.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// wavelet_core
class InvalidFilterError : public Error { using Error::Error; };
class SignalTooShortError : public Error { using Error::Error; };
class LevelError : public Error { using Error::Error; };
class BandError : public Error { using Error::Error; };
class CorruptDecompositionError : public Error { using Error::Error; };

// preprocess / band_select / evaluation
class DomainError : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };
class UndefinedCorrelationError : public Error { using Error::Error; };
class UndefinedSensitivityError : public Error { using Error::Error; };
class OrderingError : public Error { using Error::Error; };

// qrs_detector
class BoundsError : public Error { using Error::Error; };

// wfdb_io
class IoError : public Error { using Error::Error; };
class UnsupportedFormatError : public Error { using Error::Error; };
class ChannelError : public Error { using Error::Error; };
class CorruptFileError : public Error { using Error::Error; };

class ParseError : public Error {
 public:
  ParseError(const std::string& where, std::size_t line, const std::string& what)
      : Error(where + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, std::size_t offset)
      : Error(what + " (byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

}  // namespace qrsdwt
