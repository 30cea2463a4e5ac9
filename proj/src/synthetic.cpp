#include "tpd/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "tpd/error.hpp"

namespace tpd {

namespace {

enum class Shape { Gaussian, RightSkewed, LeftSkewed };

struct SensorProfile {
  double mean;
  double sigma;
  Shape shape;
};

struct ActuatorProfile {
  std::vector<double> states;
  std::vector<double> weights;
};

constexpr std::uint64_t kPlantSeed = 0x5eed'1c5'da7a;

void validate(std::size_t rows, std::size_t discrete, std::size_t continuous,
              const AnomalySpec& a) {
  if (rows < 1 || discrete + continuous < 1) {
    fail(ErrorKind::InvalidConfig, "synthetic table needs at least one row and one column");
  }
  if (!(a.rate >= 0.0 && a.rate <= 0.5)) {
    fail(ErrorKind::InvalidConfig, fmt::format("anomaly rate {} outside [0, 0.5]", a.rate));
  }
  if (a.min_run < 1 || a.max_run < a.min_run) {
    fail(ErrorKind::InvalidConfig, "anomaly runs need 1 <= min_run <= max_run");
  }
  if (!(a.shift_sigma >= 0.0) || !(a.shifted_fraction >= 0.0 && a.shifted_fraction <= 1.0)) {
    fail(ErrorKind::InvalidConfig, "shift_sigma must be >= 0 and shifted_fraction in [0, 1]");
  }
  if (!(a.glitch_rate >= 0.0 && a.glitch_rate <= 0.5)) {
    fail(ErrorKind::InvalidConfig, "glitch rate outside [0, 0.5]");
  }
  if (a.rate > 0.0 && continuous == 0 && !a.actuator_faults) {
    fail(ErrorKind::InvalidConfig, "anomalies need sensors or actuator faults to plant");
  }
}

std::vector<std::pair<std::size_t, std::size_t>> layout_runs(std::size_t rows,
                                                             const AnomalySpec& a,
                                                             std::mt19937_64& rng) {
  const auto budget = static_cast<std::size_t>(std::llround(a.rate * static_cast<double>(rows)));
  std::vector<std::size_t> lengths;
  std::size_t remaining = budget;
  while (remaining >= a.min_run) {
    std::uniform_int_distribution<std::size_t> len(a.min_run, std::min(a.max_run, remaining));
    lengths.push_back(len(rng));
    remaining -= lengths.back();
  }
  if (lengths.empty()) return {};

  const std::size_t planted = budget - remaining;
  const std::size_t normal = rows - planted;
  const std::size_t k = lengths.size();
  if (normal + 1 < k) fail(ErrorKind::InvalidConfig, "too many anomaly runs for the stream");
  // Sorted offsets into the normal rows; +r keeps consecutive runs apart.
  std::uniform_int_distribution<std::size_t> pos(0, normal - (k - 1));
  std::vector<std::size_t> offsets(k);
  for (auto& o : offsets) o = pos(rng);
  std::sort(offsets.begin(), offsets.end());

  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t consumed = 0;
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t begin = offsets[r] + r + consumed;
    runs.emplace_back(begin, begin + lengths[r]);
    consumed += lengths[r];
  }
  return runs;
}

}  // namespace

SyntheticData generate_synthetic(std::size_t rows, std::size_t discrete, std::size_t continuous,
                                 const AnomalySpec& anomalies, std::uint64_t seed) {
  validate(rows, discrete, continuous, anomalies);

  std::mt19937_64 plant(kPlantSeed ^ (continuous * 1000003u + discrete));
  std::vector<SensorProfile> sensors(continuous);
  for (std::size_t j = 0; j < continuous; ++j) {
    std::uniform_real_distribution<double> mean(0.0, 100.0);
    std::uniform_real_distribution<double> sigma(0.5, 5.0);
    sensors[j] = {mean(plant), sigma(plant), static_cast<Shape>(j % 3)};
  }
  std::vector<ActuatorProfile> actuators(discrete);
  for (std::size_t k = 0; k < discrete; ++k) {
    std::uniform_real_distribution<double> p(0.2, 0.75);
    const double on = p(plant);
    if (k % 2 == 0) {
      actuators[k] = {{1.0, 2.0}, {1.0 - on, on}};  // pump: off / on
    } else {
      actuators[k] = {{0.0, 1.0, 2.0}, {0.05, 0.95 - on, on}};  // valve: moving / closed / open
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> columns(continuous + discrete, std::vector<double>(rows));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::gamma_distribution<double> gamma(4.0, 1.0);
  for (std::size_t j = 0; j < continuous; ++j) {
    const auto& s = sensors[j];
    for (auto& v : columns[j]) {
      double z = 0.0;
      switch (s.shape) {
        case Shape::Gaussian: z = gauss(rng); break;
        case Shape::RightSkewed: z = (gamma(rng) - 4.0) / 2.0; break;
        case Shape::LeftSkewed: z = (4.0 - gamma(rng)) / 2.0; break;
      }
      v = s.mean + s.sigma * z;
    }
  }
  for (std::size_t k = 0; k < discrete; ++k) {
    std::discrete_distribution<std::size_t> pick(actuators[k].weights.begin(),
                                                 actuators[k].weights.end());
    for (auto& v : columns[continuous + k]) v = actuators[k].states[pick(rng)];
  }

  SyntheticData out;
  out.truth.assign(rows, Label::Normal);
  out.runs = layout_runs(rows, anomalies, rng);

  const std::size_t shifted = continuous == 0 ? 0
      : std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(
                                     anomalies.shifted_fraction * static_cast<double>(continuous))));
  std::vector<std::size_t> sensor_ids(continuous);
  std::iota(sensor_ids.begin(), sensor_ids.end(), std::size_t{0});
  for (const auto& [begin, end] : out.runs) {
    std::shuffle(sensor_ids.begin(), sensor_ids.end(), rng);
    for (std::size_t s = 0; s < shifted; ++s) {
      const std::size_t j = sensor_ids[s];
      const double delta = anomalies.shift_sigma * sensors[j].sigma;
      for (std::size_t i = begin; i < end; ++i) columns[j][i] += delta;
    }
    if (anomalies.actuator_faults && discrete > 0) {
      std::uniform_int_distribution<std::size_t> pick(0, discrete - 1);
      const std::size_t k = pick(rng);
      const double unseen = actuators[k].states.back() + 1.0;
      for (std::size_t i = begin; i < end; ++i) columns[continuous + k][i] = unseen;
    }
    for (std::size_t i = begin; i < end; ++i) out.truth[i] = Label::Anomaly;
  }

  if (anomalies.glitch_rate > 0.0 && continuous > 0) {
    std::bernoulli_distribution glitch(anomalies.glitch_rate);
    std::uniform_int_distribution<std::size_t> pick(0, continuous - 1);
    std::bernoulli_distribution up(0.5);
    for (std::size_t i = 0; i < rows; ++i) {
      if (out.truth[i] == Label::Anomaly || !glitch(rng)) continue;
      const std::size_t j = pick(rng);
      const double delta = anomalies.shift_sigma * sensors[j].sigma;
      columns[j][i] += up(rng) ? delta : -delta;
    }
  }

  std::vector<std::string> names;
  for (std::size_t j = 0; j < continuous; ++j) names.push_back(fmt::format("s{}", j));
  for (std::size_t k = 0; k < discrete; ++k) names.push_back(fmt::format("a{}", k));
  out.data = DataMatrix::from_columns(std::move(columns), std::move(names));
  out.data.set_labels(out.truth);
  return out;
}

}  // namespace tpd
