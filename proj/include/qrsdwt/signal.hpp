#pragma once

#include <string>
#include <vector>

namespace qrsdwt {

// Uniformly sampled single-channel waveform. ECG samples are in mV.
struct Signal {
  std::vector<double> samples;
  double fs = 0.0;
  std::string label;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

}  // namespace qrsdwt
