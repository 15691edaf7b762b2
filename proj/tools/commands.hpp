#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qrsdwt::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kIo = 3,
  kParse = 4,
  kProcessing = 5,
  kAllRecordsFailed = 6,
};

// Environment variable naming the directory that holds downloaded records.
inline constexpr const char* kDataDirEnv = "QRSDWT_DATA_DIR";

// Entry point shared by the binary and the tests. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qrsdwt::cli
