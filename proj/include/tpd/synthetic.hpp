#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "tpd/data_matrix.hpp"

namespace tpd {

/// Planted-anomaly model for generated streams.
struct AnomalySpec {
  double rate = 0.0;              // fraction of rows inside anomaly runs, in [0, 0.5]
  std::size_t min_run = 60;
  std::size_t max_run = 120;
  double shift_sigma = 8.0;       // sensor shift, in column standard deviations
  double shifted_fraction = 0.3;  // share of continuous columns shifted per run (at least one)
  bool actuator_faults = true;    // each run also forces one actuator into an unseen state
  double glitch_rate = 0.0;       // isolated single-row sensor spikes, labelled normal
};

struct SyntheticData {
  DataMatrix data;  // labels attached
  std::vector<Label> truth;
  std::vector<std::pair<std::size_t, std::size_t>> runs;  // [begin, end) of each anomaly run
};

/// Generates an ICS-like table: continuous "sensor" columns first (named
/// s0, s1, ...), then discrete "actuator" columns (a0, a1, ...).
///
/// Each column's stationary distribution depends only on the table shape, so
/// a training stream and a test stream generated with different seeds come
/// from the same plant. The seed drives the samples and the anomaly layout.
/// Anomaly run lengths are drawn from [min_run, max_run]; leftover budget
/// shorter than min_run is not planted.
SyntheticData generate_synthetic(std::size_t rows, std::size_t discrete, std::size_t continuous,
                                 const AnomalySpec& anomalies, std::uint64_t seed);

}  // namespace tpd
