#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "strokeforest/preprocess.hpp"
#include "strokeforest/rng.hpp"
#include "test_util.hpp"

using namespace strokeforest;
using testutil::make_cohort;
using testutil::numeric_codebook;

namespace {

std::vector<std::uint8_t> make_labels(std::size_t pos, std::size_t neg) {
  std::vector<std::uint8_t> y(pos, 1);
  y.resize(pos + neg, 0);
  return y;
}

const Cohort& generated() {
  static const Cohort c = [] {
    auto spec = default_cohort_spec();
    spec.n_total = 1500;
    spec.n_early_death = 0;
    spec.n_lost_followup = 0;
    return generate_synthetic_cohort(spec, 9);
  }();
  return c;
}

}  // namespace

TEST(Endpoint, RowsAndLabels) {
  const auto cb = numeric_codebook({"X"});
  const auto c = make_cohort(cb, {{1.0}, {2.0}, {3.0}, {4.0}}, {0, 4, 6, 2});
  EXPECT_EQ(endpoint_rows(c, Endpoint::Mortality, MorbidityPopulation::ExcludeDeaths).size(), 4u);
  EXPECT_EQ(endpoint_rows(c, Endpoint::Morbidity, MorbidityPopulation::ExcludeDeaths),
            (std::vector<std::size_t>{0, 1, 3}));
  EXPECT_EQ(endpoint_rows(c, Endpoint::Morbidity, MorbidityPopulation::IncludeDeathsAsNegative).size(), 4u);
  EXPECT_EQ(endpoint_labels(c, Endpoint::Mortality), (std::vector<std::uint8_t>{0, 0, 1, 0}));
  EXPECT_EQ(endpoint_labels(c, Endpoint::Morbidity), (std::vector<std::uint8_t>{0, 1, 0, 0}));
  EXPECT_EQ(parse_endpoint(to_string(Endpoint::Morbidity)), Endpoint::Morbidity);
}

TEST(ModelingFeatures, AllGroupUsesSharedFeatures) {
  const auto cb = FeatureCodebook::standard();
  const auto all = modeling_features(*cb, Group::All);
  for (auto f : all) {
    EXPECT_TRUE((*cb)[f].groups.is && (*cb)[f].groups.ich) << (*cb)[f].name;
  }
  for (auto s : FeatureCodebook::kShortlist) {
    EXPECT_NE(std::find(all.begin(), all.end(), cb->require(s)), all.end());
  }
  EXPECT_GT(modeling_features(*cb, Group::ICH).size(), all.size());
}

TEST(Selection, IdenticalFeatureRankedLast) {
  const auto cb = numeric_codebook({"FLAT", "SIGNAL"});
  std::vector<std::vector<std::optional<double>>> rows;
  std::vector<int> mrs;
  for (int i = 0; i < 20; ++i) {
    rows.push_back({static_cast<double>(i % 4), (i < 10 ? 0.0 : 3.0) + (i % 3)});
    mrs.push_back(i < 10 ? 1 : 6);
  }
  // FLAT has the same multiset in each class.
  for (int i = 0; i < 10; ++i) rows[10 + i][0] = rows[i][0];
  const auto c = make_cohort(cb, rows, mrs);
  auto report = score_features_ttest(c, Endpoint::Mortality);
  EXPECT_EQ(report.ranking, (std::vector<std::size_t>{1, 0}));
  EXPECT_EQ(report.scores[0].abs_t, 0.0);
}

TEST(Selection, TiesFollowCodebookOrder) {
  const auto cb = numeric_codebook({"A", "B", "C"});
  std::vector<std::vector<std::optional<double>>> rows;
  std::vector<int> mrs;
  for (int i = 0; i < 12; ++i) {
    const double v = (i < 6 ? 0.0 : 1.0) + 0.1 * (i % 3);
    rows.push_back({v, v, v});
    mrs.push_back(i < 6 ? 0 : 6);
  }
  auto report = score_features_ttest(make_cohort(cb, rows, mrs), Endpoint::Mortality);
  EXPECT_EQ(report.ranking, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(Selection, InjectedPredictorRankedFirst) {
  auto c = generated();
  const auto target = c.codebook->require("LDL");
  Rng rng(1);
  for (std::size_t i = 0; i < c.size(); ++i) {
    c.records[i].values[target] = (c.labels[i].mortality ? 500.0 : 0.0) + 10.0 * rng.normal();
  }
  auto report = score_features_ttest(c, Endpoint::Mortality);
  EXPECT_EQ(report.ranking.front(), target);
  EXPECT_EQ(select_top_k(report, 1), (std::vector<std::size_t>{target}));
}

TEST(Selection, ShortlistSurfacesOnGeneratedCohort) {
  const auto c = filter_group(generated(), Group::All);
  const auto labels = endpoint_labels(c, Endpoint::Mortality);
  const auto candidates = modeling_features(*c.codebook, Group::All);
  auto report = score_features_ttest(c, labels, candidates);
  const auto top = select_top_k(report, 7);
  std::size_t hits = 0;
  for (auto f : top) {
    const auto& name = (*c.codebook)[f].name;
    hits += std::find(FeatureCodebook::kShortlist.begin(), FeatureCodebook::kShortlist.end(), name) !=
            FeatureCodebook::kShortlist.end();
  }
  EXPECT_GE(hits, 5u);
}

TEST(Selection, TopKBounds) {
  const auto cb = numeric_codebook({"A", "B"});
  const auto c = make_cohort(cb, {{1.0, 2.0}, {2.0, 1.0}, {3.0, 5.0}, {5.0, 3.0}}, {0, 0, 6, 6});
  auto report = score_features_ttest(c, Endpoint::Mortality);
  EXPECT_EQ(select_top_k(report, 2).size(), 2u);
  EXPECT_EQ(select_top_k(report, 10).size(), 2u);
  EXPECT_THROW(select_top_k(report, 0), std::invalid_argument);
  auto loose = select_p_threshold(report, 1.0);
  EXPECT_EQ(loose.size(), 2u);
}

TEST(Undersample, Balances) {
  const auto y = make_labels(40, 100);
  const auto idx = undersample_indices(y, 5);
  ASSERT_EQ(idx.size(), 80u);
  std::size_t pos = 0;
  for (auto i : idx) pos += y[i];
  EXPECT_EQ(pos, 40u);
  EXPECT_EQ(std::set<std::size_t>(idx.begin(), idx.end()).size(), 80u);
  EXPECT_EQ(undersample_indices(y, 5), idx);
  EXPECT_NE(undersample_indices(y, 6), idx);
}

TEST(Undersample, BalancedInputKeepsEveryRow) {
  const auto y = make_labels(50, 50);
  auto idx = undersample_indices(y, 1);
  std::sort(idx.begin(), idx.end());
  for (std::size_t i = 0; i < 100; ++i) EXPECT_EQ(idx[i], i);
}

TEST(Undersample, RandomizedInvariants) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pos = 1 + rng.below(60);
    const auto neg = 1 + rng.below(200);
    std::vector<std::uint8_t> y = make_labels(pos, neg);
    rng.shuffle(std::span(y));
    const auto idx = undersample_indices(y, rng.next());
    std::size_t p = 0;
    for (auto i : idx) p += y[i];
    ASSERT_EQ(2 * p, idx.size());
    ASSERT_EQ(p, std::min(pos, neg));
  }
}

TEST(Undersample, CohortVersion) {
  const auto c = undersample(generated(), Endpoint::Mortality, 3);
  std::size_t pos = 0;
  for (const auto& l : c.labels) pos += l.mortality;
  EXPECT_EQ(2 * pos, c.size());
}

TEST(Kfold, DivisibleCase) {
  const auto y = make_labels(50, 50);
  const auto f = stratified_kfold(y, 10, 1);
  for (std::size_t k = 0; k < 10; ++k) {
    const auto test = f.test_rows(k);
    EXPECT_EQ(test.size(), 10u);
    std::size_t pos = 0;
    for (auto i : test) pos += y[i];
    EXPECT_EQ(pos, 5u);
    EXPECT_EQ(f.train_rows(k).size(), 90u);
  }
}

TEST(Kfold, TwentyThreeRows) {
  const auto y = make_labels(12, 11);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto f = stratified_kfold(y, 10, seed);
    for (std::size_t k = 0; k < 10; ++k) {
      const auto test = f.test_rows(k);
      std::size_t pos = 0;
      for (auto i : test) pos += y[i];
      EXPECT_TRUE(test.size() == 2 || test.size() == 3);
      EXPECT_TRUE(pos == 1 || pos == 2);
    }
  }
}

TEST(Kfold, TooFewPositives) {
  EXPECT_THROW(stratified_kfold(make_labels(9, 50), 10, 1), std::invalid_argument);
}

TEST(Kfold, RandomizedBalanceInvariants) {
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t k = 2 + rng.below(9);
    const auto pos = k + rng.below(80);
    const auto neg = k + rng.below(80);
    auto y = make_labels(pos, neg);
    rng.shuffle(std::span(y));
    const auto f = stratified_kfold(y, k, rng.next());
    std::vector<std::size_t> size(k, 0), npos(k, 0);
    for (std::size_t i = 0; i < y.size(); ++i) {
      ASSERT_LT(f.fold_of[i], k);
      ++size[f.fold_of[i]];
      npos[f.fold_of[i]] += y[i];
    }
    ASSERT_LE(*std::max_element(size.begin(), size.end()) - *std::min_element(size.begin(), size.end()), 1u);
    ASSERT_LE(*std::max_element(npos.begin(), npos.end()) - *std::min_element(npos.begin(), npos.end()), 1u);
  }
}

TEST(ResamplePlan, DistinctAndDeterministic) {
  const auto p = build_resample_plan(1, 100, 10);
  EXPECT_EQ(std::set<std::uint64_t>(p.repetition_seeds.begin(), p.repetition_seeds.end()).size(), 100u);
  EXPECT_EQ(build_resample_plan(1, 100, 10).repetition_seeds, p.repetition_seeds);
  const auto one = build_resample_plan(1, 1, 10);
  ASSERT_EQ(one.repetition_seeds.size(), 1u);
  const auto y = make_labels(30, 70);
  const auto d = one.draw(0, y);
  EXPECT_EQ(d.sample.size(), 60u);
  EXPECT_EQ(d.folds.fold_of.size(), 60u);
  EXPECT_EQ(one.draw(0, y).sample, d.sample);
}

TEST(Imputation, Basics) {
  const auto cb = numeric_codebook({"GLU0"});
  const auto train = make_cohort(cb, {{100.0}, {137.0}, {200.0}, {std::nullopt}}, {0, 0, 6, 6});
  const auto out = impute_missing(train, train);
  EXPECT_EQ(out.records[3].values[0], 137.0);
  const auto full = make_cohort(cb, {{1.0}, {2.0}}, {0, 6});
  EXPECT_EQ(impute_missing(full, full).records[1].values, full.records[1].values);
}

TEST(Imputation, BinaryUsesModeWithLowerValueOnTies) {
  std::vector<FeatureDef> defs(1);
  defs[0].name = "FLAG";
  defs[0].kind = FeatureKind::Binary;
  defs[0].upper = 1;
  const auto cb = std::make_shared<const FeatureCodebook>(defs);
  auto tie = make_cohort(cb, {{0.0}, {1.0}, {std::nullopt}}, {0, 6, 6});
  EXPECT_EQ(impute_missing(tie, tie).records[2].values[0], 0.0);
  auto ones = make_cohort(cb, {{1.0}, {1.0}, {0.0}, {std::nullopt}}, {0, 6, 6, 0});
  EXPECT_EQ(impute_missing(ones, ones).records[3].values[0], 1.0);
}

TEST(Leakage, TestFoldPerturbationLeavesTrainingSideUnchanged) {
  const auto c = filter_group(generated(), Group::All);
  const auto labels = endpoint_labels(c, Endpoint::Mortality);
  const auto candidates = modeling_features(*c.codebook, Group::All);
  const auto folds = stratified_kfold(labels, 10, 77);
  const auto train_rows = folds.train_rows(0);
  const auto test_rows = folds.test_rows(0);

  auto perturbed = c;
  Rng rng(5);
  for (auto r : test_rows) {
    for (auto f : candidates) {
      auto& v = perturbed.records[r].values[f];
      if (v) v = *v * 3.0 + 1000.0 * rng.uniform();
    }
    perturbed.labels[r].mortality = !perturbed.labels[r].mortality;
  }

  auto fit = [&](const Cohort& cohort) {
    const auto train = cohort.subset(train_rows);
    auto model = ImputationModel::fit(train, candidates);
    const auto imputed = model.apply(train);
    std::vector<std::uint8_t> y;
    for (auto r : train_rows) y.push_back(labels[r]);
    return std::make_pair(model.fills, score_features_ttest(imputed, y, candidates));
  };
  const auto [fills_a, report_a] = fit(c);
  const auto [fills_b, report_b] = fit(perturbed);
  EXPECT_EQ(fills_a, fills_b);
  ASSERT_EQ(report_a.scores.size(), report_b.scores.size());
  for (std::size_t i = 0; i < report_a.scores.size(); ++i) {
    EXPECT_EQ(report_a.scores[i].abs_t, report_b.scores[i].abs_t);
    EXPECT_EQ(report_a.scores[i].p_value, report_b.scores[i].p_value);
  }
  EXPECT_EQ(report_a.ranking, report_b.ranking);
}
