#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "strokeforest/dataset.hpp"

namespace testutil {

inline std::shared_ptr<const strokeforest::FeatureCodebook> numeric_codebook(
    const std::vector<std::string>& names) {
  std::vector<strokeforest::FeatureDef> defs;
  for (const auto& n : names) {
    strokeforest::FeatureDef d;
    d.name = n;
    d.kind = strokeforest::FeatureKind::Continuous;
    d.lower = -1e9;
    d.upper = 1e9;
    defs.push_back(d);
  }
  return std::make_shared<const strokeforest::FeatureCodebook>(std::move(defs));
}

/// Cohort from row-major values; mortality = (mrs == 6).
inline strokeforest::Cohort make_cohort(
    std::shared_ptr<const strokeforest::FeatureCodebook> cb,
    const std::vector<std::vector<std::optional<double>>>& rows, const std::vector<int>& mrs) {
  strokeforest::Cohort c;
  c.codebook = std::move(cb);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    strokeforest::PatientRecord r;
    r.values = rows[i];
    r.mrs_3m = mrs[i];
    c.records.push_back(r);
    c.labels.push_back(strokeforest::derive_outcome(mrs[i]));
  }
  return c;
}

}  // namespace testutil
