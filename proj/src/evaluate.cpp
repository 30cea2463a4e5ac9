#include <fmt/format.h>

#include "tpd/error.hpp"
#include "tpd/pipeline.hpp"

namespace tpd {

Metrics evaluate(std::span<const Label> predicted, std::span<const Label> truth) {
  if (predicted.size() != truth.size()) {
    fail(ErrorKind::InvalidInput, fmt::format("{} predictions against {} truth labels",
                                              predicted.size(), truth.size()));
  }
  Metrics m;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] == Label::Anomaly;
    const bool t = truth[i] == Label::Anomaly;
    if (p && t) ++m.tp;
    else if (p) ++m.fp;
    else if (t) ++m.fn;
    else ++m.tn;
  }
  const auto ratio = [](std::size_t num, std::size_t den, bool& defined) {
    defined = den > 0;
    return defined ? static_cast<double>(num) / static_cast<double>(den) : 0.0;
  };
  m.precision = ratio(m.tp, m.tp + m.fp, m.precision_defined);
  m.recall = ratio(m.tp, m.tp + m.fn, m.recall_defined);
  m.f1_defined = m.precision + m.recall > 0.0;
  m.f1 = m.f1_defined ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
  return m;
}

}  // namespace tpd
