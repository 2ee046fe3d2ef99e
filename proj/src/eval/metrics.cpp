#include <stdexcept>

#include "strokeforest/eval.hpp"

namespace strokeforest {

AccuracyResult accuracy(std::span<const double> scores, std::span<const std::uint8_t> labels,
                        double threshold) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores/labels length mismatch");
  AccuracyResult r;
  r.confusion.threshold = threshold;
  auto& c = r.confusion;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool called = scores[i] >= threshold;
    if (labels[i]) {
      (called ? c.tp : c.fn) += 1;
    } else {
      (called ? c.fp : c.tn) += 1;
    }
  }
  r.accuracy = scores.empty() ? 0.0
                              : static_cast<double>(c.tp + c.tn) / static_cast<double>(scores.size());
  return r;
}

}  // namespace strokeforest
