#include <algorithm>
#include <stdexcept>
#include <string>

#include "strokeforest/dataset.hpp"

namespace strokeforest {

OutcomeLabel derive_outcome(int mrs_3m) {
  if (mrs_3m < 0 || mrs_3m > 6) {
    throw std::invalid_argument("mRS out of [0,6]: " + std::to_string(mrs_3m));
  }
  return {mrs_3m > 2, mrs_3m >= 3 && mrs_3m <= 5, mrs_3m == 6};
}

ClinicalFlags derive_clinical_flags(int nihss0, int nihss24, int nihss48) {
  for (int v : {nihss0, nihss24, nihss48}) {
    if (v < 0 || v > 42) throw std::invalid_argument("NIHSS out of [0,42]: " + std::to_string(v));
  }
  return {std::max(nihss24, nihss48) - nihss0 >= 4, nihss24 <= 8};
}

double abc2_volume(double a, double b, double c) {
  if (a < 0.0 || b < 0.0 || c < 0.0) {
    throw std::invalid_argument("ABC/2 diameters must be nonnegative");
  }
  return a * b * c / 2.0;
}

ExclusionResult apply_exclusions(const Cohort& cohort) {
  ExclusionResult out{Cohort{cohort.codebook, {}, {}, cohort.provenance}, 0, 0};
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    const auto& rec = cohort.records[i];
    if (rec.died_first_24h) {
      ++out.died_first_24h;
    } else if (rec.lost_followup) {
      ++out.lost_followup;
    } else {
      out.cohort.records.push_back(rec);
      out.cohort.labels.push_back(cohort.labels[i]);
    }
  }
  return out;
}

Cohort filter_group(const Cohort& cohort, Group group) {
  if (group == Group::All) return cohort;
  const auto keep = group == Group::IS ? StrokeType::IS : StrokeType::ICH;
  const auto& cb = *cohort.codebook;
  Cohort out{cohort.codebook, {}, {}, cohort.provenance};
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    if (cohort.records[i].stroke_type != keep) continue;
    auto rec = cohort.records[i];
    for (std::size_t f = 0; f < cb.size(); ++f) {
      if (!cb[f].groups.contains(keep)) rec.values[f].reset();
    }
    out.records.push_back(std::move(rec));
    out.labels.push_back(cohort.labels[i]);
  }
  return out;
}

}  // namespace strokeforest
