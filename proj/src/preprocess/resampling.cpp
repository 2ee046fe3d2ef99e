#include <algorithm>
#include <stdexcept>
#include <string>

#include "strokeforest/preprocess.hpp"
#include "strokeforest/rng.hpp"

namespace strokeforest {

std::vector<std::size_t> undersample_indices(std::span<const std::uint8_t> labels,
                                             std::uint64_t seed) {
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) throw std::invalid_argument("undersample: a class is empty");
  Rng rng(seed);
  auto& major = pos.size() > neg.size() ? pos : neg;
  const auto& minor = pos.size() > neg.size() ? neg : pos;
  rng.shuffle(std::span(major));
  std::vector<std::size_t> out(minor.begin(), minor.end());
  out.insert(out.end(), major.begin(), major.begin() + static_cast<std::ptrdiff_t>(minor.size()));
  std::sort(out.begin(), out.end());
  rng.shuffle(std::span(out));
  return out;
}

Cohort undersample(const Cohort& cohort, Endpoint endpoint, std::uint64_t seed) {
  return cohort.subset(undersample_indices(endpoint_labels(cohort, endpoint), seed));
}

std::vector<std::size_t> FoldAssignment::test_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] == fold) rows.push_back(i);
  }
  return rows;
}

std::vector<std::size_t> FoldAssignment::train_rows(std::size_t fold) const {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    if (fold_of[i] != fold) rows.push_back(i);
  }
  return rows;
}

FoldAssignment stratified_kfold(std::span<const std::uint8_t> labels, std::size_t k,
                                std::uint64_t seed, bool stratify) {
  if (k < 2) throw std::invalid_argument("k-fold: k must be at least 2");
  Rng rng(seed);
  FoldAssignment out{k, std::vector<std::size_t>(labels.size())};
  std::vector<std::vector<std::size_t>> strata(stratify ? 2 : 1);
  for (std::size_t i = 0; i < labels.size(); ++i) strata[stratify ? labels[i] : 0].push_back(i);
  if (stratify) {
    for (const auto& s : strata) {
      if (s.size() < k) {
        throw std::invalid_argument("k-fold: class of size " + std::to_string(s.size()) +
                                    " is smaller than k = " + std::to_string(k));
      }
    }
  } else if (labels.size() < k) {
    throw std::invalid_argument("k-fold: fewer rows than folds");
  }
  std::size_t next = 0;
  // Positives first, then negatives, continuing the rotation.
  for (auto it = strata.rbegin(); it != strata.rend(); ++it) {
    rng.shuffle(std::span(*it));
    for (std::size_t row : *it) {
      out.fold_of[row] = next;
      next = (next + 1) % k;
    }
  }
  return out;
}

RepetitionDraw ResamplePlan::draw(std::size_t r, std::span<const std::uint8_t> labels,
                                  bool stratify) const {
  if (r >= repetition_seeds.size()) throw std::out_of_range("repetition index out of range");
  RepetitionDraw d;
  d.seed = repetition_seeds[r];
  d.sample = undersample_indices(labels, derive_seed(d.seed, 0));
  std::vector<std::uint8_t> y(d.sample.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = labels[d.sample[i]];
  d.folds = stratified_kfold(y, folds, derive_seed(d.seed, 1), stratify);
  return d;
}

ResamplePlan build_resample_plan(std::uint64_t master_seed, std::size_t repetitions,
                                 std::size_t folds) {
  if (repetitions == 0) throw std::invalid_argument("resample plan: repetitions must be >= 1");
  if (folds < 2) throw std::invalid_argument("resample plan: folds must be >= 2");
  ResamplePlan plan{master_seed, repetitions, folds, {}};
  plan.repetition_seeds.reserve(repetitions);
  for (std::size_t r = 0; r < repetitions; ++r) {
    plan.repetition_seeds.push_back(derive_seed(master_seed, r));
  }
  return plan;
}

}  // namespace strokeforest
