#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "strokeforest/dataset.hpp"
#include "strokeforest/stats.hpp"

using namespace strokeforest;

namespace {

std::string header_line(const FeatureCodebook& cb) {
  std::string h;
  for (const auto& e : cb.entries()) h += e.name + ",";
  return h + "mrs_3m,stroke_type,died_first_24h,lost_followup\n";
}

std::string row_line(const FeatureCodebook& cb, const std::string& glu, int mrs) {
  std::string r;
  for (const auto& e : cb.entries()) {
    if (e.name == "GLU0") {
      r += glu;
    } else if (e.name == "NIHSS0") {
      r += "10";
    } else if (e.name == "T0") {
      r += "36.6";
    }
    r += ",";
  }
  return r + std::to_string(mrs) + ",IS,0,0\n";
}

const Cohort& default_cohort() {
  static const Cohort c = generate_synthetic_cohort(default_cohort_spec(), 42);
  return c;
}

}  // namespace

TEST(Codebook, StandardInvariants) {
  const auto cb = FeatureCodebook::standard();
  EXPECT_EQ(cb->size(), 65u);
  std::set<std::string> names;
  for (const auto& e : cb->entries()) names.insert(e.name);
  EXPECT_EQ(names.size(), cb->size());
  for (auto s : FeatureCodebook::kShortlist) EXPECT_TRUE(cb->index_of(s).has_value()) << s;
  const auto& volume = (*cb)[cb->require("HEMATOMA_VOL0")];
  EXPECT_FALSE(volume.groups.is);
  EXPECT_TRUE(volume.groups.ich);
  EXPECT_THROW(cb->require("NOPE"), std::invalid_argument);
}

TEST(Codebook, GroupRestrictedFeatures) {
  const auto cb = FeatureCodebook::standard();
  bool toast = false;
  for (const auto& e : cb->entries()) {
    if (e.block == "TOAST") {
      toast = true;
      EXPECT_TRUE(e.groups.is);
      EXPECT_FALSE(e.groups.ich);
    }
  }
  EXPECT_TRUE(toast);
  EXPECT_LT(cb->applicable(Group::ICH).size(), cb->size());
  EXPECT_EQ(cb->applicable(Group::All).size(), cb->size());
}

TEST(Csv, ThreeRows) {
  const auto cb = FeatureCodebook::standard();
  std::stringstream in;
  in << header_line(*cb) << row_line(*cb, "120", 1) << row_line(*cb, "", 6) << row_line(*cb, "99.5", 4);
  const auto c = read_cohort_csv(in, cb);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c.value(0, "GLU0"), 120.0);
  EXPECT_FALSE(c.value(1, "GLU0").has_value());
  EXPECT_TRUE(c.labels[1].mortality);
  EXPECT_TRUE(c.labels[2].morbidity);
}

TEST(Csv, HeaderOnly) {
  const auto cb = FeatureCodebook::standard();
  std::stringstream in(header_line(*cb));
  EXPECT_TRUE(read_cohort_csv(in, cb).empty());
}

TEST(Csv, BadCellNamesRowAndColumn) {
  const auto cb = FeatureCodebook::standard();
  std::stringstream in;
  in << header_line(*cb) << row_line(*cb, "abc", 1);
  try {
    read_cohort_csv(in, cb);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_EQ(e.column(), "GLU0");
  }
}

TEST(Csv, OutOfRangeValuesRejected) {
  const auto cb = FeatureCodebook::standard();
  std::stringstream in;
  in << header_line(*cb) << row_line(*cb, "100", 7);
  EXPECT_THROW(read_cohort_csv(in, cb), ParseError);
  std::stringstream unknown("FOO,mrs_3m,stroke_type,died_first_24h,lost_followup\n");
  EXPECT_THROW(read_cohort_csv(unknown, cb), ParseError);
}

TEST(Csv, RoundTrip) {
  const auto& c = default_cohort();
  std::stringstream buf;
  write_cohort_csv(buf, c);
  const auto back = read_cohort_csv(buf, c.codebook);
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    ASSERT_EQ(back.records[i].values, c.records[i].values) << "row " << i;
    ASSERT_EQ(back.records[i].mrs_3m, c.records[i].mrs_3m);
    ASSERT_EQ(back.records[i].stroke_type, c.records[i].stroke_type);
    ASSERT_EQ(back.records[i].died_first_24h, c.records[i].died_first_24h);
    ASSERT_EQ(back.records[i].lost_followup, c.records[i].lost_followup);
  }
}

TEST(Clinical, DeriveOutcome) {
  EXPECT_EQ(derive_outcome(6), (OutcomeLabel{true, false, true}));
  EXPECT_EQ(derive_outcome(2), (OutcomeLabel{false, false, false}));
  EXPECT_EQ(derive_outcome(4), (OutcomeLabel{true, true, false}));
  EXPECT_EQ(derive_outcome(3), (OutcomeLabel{true, true, false}));
  EXPECT_THROW(derive_outcome(7), std::invalid_argument);
  EXPECT_THROW(derive_outcome(-1), std::invalid_argument);
}

TEST(Clinical, Flags) {
  auto f = derive_clinical_flags(10, 11, 15);
  EXPECT_TRUE(f.early_deterioration);
  EXPECT_FALSE(f.effective_reperfusion);
  f = derive_clinical_flags(10, 8, 10);
  EXPECT_FALSE(f.early_deterioration);
  EXPECT_TRUE(f.effective_reperfusion);
  f = derive_clinical_flags(0, 0, 0);
  EXPECT_FALSE(f.early_deterioration);
  EXPECT_TRUE(f.effective_reperfusion);
  EXPECT_TRUE(derive_clinical_flags(10, 14, 12).early_deterioration);
}

TEST(Clinical, Abc2) {
  EXPECT_DOUBLE_EQ(abc2_volume(4, 3, 2), 12.0);
  EXPECT_DOUBLE_EQ(abc2_volume(0, 5, 5), 0.0);
  EXPECT_DOUBLE_EQ(abc2_volume(5, 4, 4), 40.0);
  EXPECT_THROW(abc2_volume(-1, 2, 2), std::invalid_argument);
}

TEST(Exclusions, RegistryCounts) {
  const auto spec = default_cohort_spec();
  const auto raw = generate_synthetic_cohort(spec, 7);
  EXPECT_EQ(raw.size(), 6334u);
  const auto r = apply_exclusions(raw);
  EXPECT_EQ(r.cohort.size(), 6022u);
  EXPECT_EQ(r.died_first_24h, 228u);
  EXPECT_EQ(r.lost_followup, 84u);
  const auto again = apply_exclusions(r.cohort);
  EXPECT_EQ(again.cohort.size(), r.cohort.size());
  EXPECT_EQ(again.died_first_24h + again.lost_followup, 0u);
}

TEST(Exclusions, AllFlagged) {
  auto c = default_cohort().subset(std::vector<std::size_t>{0, 1, 2, 3});
  for (auto& r : c.records) r.lost_followup = true;
  c.records[0].died_first_24h = true;
  const auto r = apply_exclusions(c);
  EXPECT_TRUE(r.cohort.empty());
  EXPECT_EQ(r.died_first_24h, 1u);
  EXPECT_EQ(r.died_first_24h + r.lost_followup, 4u);
}

TEST(FilterGroup, SplitsByStrokeType) {
  const auto c = apply_exclusions(default_cohort()).cohort;
  const auto all = filter_group(c, Group::All);
  EXPECT_EQ(all.size(), c.size());
  const auto is = filter_group(c, Group::IS);
  const auto ich = filter_group(c, Group::ICH);
  EXPECT_EQ(is.size() + ich.size(), c.size());
  EXPECT_NEAR(static_cast<double>(is.size()), 4922.0, 90.0);
  EXPECT_TRUE(filter_group(is, Group::ICH).empty());
  const auto vol = c.codebook->require("HEMATOMA_VOL0");
  for (const auto& r : is.records) EXPECT_FALSE(r.values[vol].has_value());
}

TEST(Generator, DeterministicPerSeed) {
  auto spec = default_cohort_spec();
  spec.n_total = 500;
  spec.n_early_death = 10;
  spec.n_lost_followup = 5;
  const auto a = generate_synthetic_cohort(spec, 3);
  const auto b = generate_synthetic_cohort(spec, 3);
  const auto c = generate_synthetic_cohort(spec, 4);
  std::stringstream sa, sb, sc;
  write_cohort_csv(sa, a);
  write_cohort_csv(sb, b);
  write_cohort_csv(sc, c);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_NE(sa.str(), sc.str());
  EXPECT_EQ(a.provenance.kind, Provenance::Kind::Synthetic);
  EXPECT_EQ(a.provenance.seed, 3u);
}

TEST(Generator, RecordsSatisfyValidation) {
  const auto& c = default_cohort();
  for (const auto& r : c.records) ASSERT_NO_THROW(validate_record(*c.codebook, r));
  for (std::size_t i = 0; i < c.size(); ++i) ASSERT_EQ(c.labels[i], derive_outcome(c.records[i].mrs_3m));
}

TEST(Generator, ClinicalConsistency) {
  const auto& c = default_cohort();
  const auto ed = c.codebook->require("ED");
  const auto n0 = c.codebook->require("NIHSS0");
  const auto n24 = c.codebook->require("NIHSS24");
  const auto n48 = c.codebook->require("NIHSS48");
  for (std::size_t i = 0; i < c.size(); ++i) {
    const auto& v = c.records[i].values;
    if (!v[ed] || !v[n0] || !v[n24] || !v[n48]) continue;
    const auto flags = derive_clinical_flags(static_cast<int>(*v[n0]), static_cast<int>(*v[n24]),
                                             static_cast<int>(*v[n48]));
    ASSERT_EQ(*v[ed] == 1.0, flags.early_deterioration) << "row " << i;
  }
}

TEST(Generator, MarginalsNearTargets) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto c = apply_exclusions(generate_synthetic_cohort(default_cohort_spec(), seed)).cohort;
    std::size_t is = 0, dead = 0, morb = 0;
    std::vector<double> age;
    const auto age_i = c.codebook->require("AGE");
    for (std::size_t i = 0; i < c.size(); ++i) {
      is += c.records[i].stroke_type == StrokeType::IS;
      dead += c.labels[i].mortality;
      morb += c.labels[i].morbidity;
      if (c.records[i].values[age_i]) age.push_back(*c.records[i].values[age_i]);
    }
    const double n = static_cast<double>(c.size());
    EXPECT_NEAR(is / n, 0.818, 0.015);
    EXPECT_NEAR(dead / n, 0.163, 0.015);
    EXPECT_NEAR(morb / n, 0.35, 0.015);
    EXPECT_NEAR(stats::mean(age), 72.1, 0.7);
  }
}

TEST(CohortSpec, JsonRoundTripAndValidation) {
  const auto spec = default_cohort_spec();
  const auto doc = to_json(spec);
  const auto back = cohort_spec_from_json(doc);
  EXPECT_EQ(to_json(back), doc);
  EXPECT_NO_THROW(validate(spec, *FeatureCodebook::standard()));
  auto bad = spec;
  bad.is_fraction = 1.5;
  EXPECT_THROW(validate(bad, *FeatureCodebook::standard()), std::invalid_argument);
}

TEST(TruncatedNormal, MatchesRequestedMoments) {
  const auto [mu, sigma] = fit_truncated_normal(37.0, 0.8, 30.0, 43.0);
  EXPECT_NEAR(mu, 37.0, 1e-3);
  EXPECT_NEAR(sigma, 0.8, 1e-3);
  const auto [mu2, sigma2] = fit_truncated_normal(5.0, 4.0, 0.0, 42.0);
  EXPECT_LT(mu2, 5.0);
  EXPECT_GT(sigma2, 4.0);
  EXPECT_THROW(fit_truncated_normal(5.0, 5.0, 0.0, 42.0), CalibrationError);
  EXPECT_THROW(fit_truncated_normal(1.0, 30.0, 0.0, 2.0), CalibrationError);
}
