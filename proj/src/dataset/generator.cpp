#include <algorithm>
#include <cmath>
#include <numbers>

#include "strokeforest/dataset.hpp"
#include "strokeforest/rng.hpp"

namespace strokeforest {

namespace {

double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double Phi(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct TruncatedMoments {
  double mean;
  double sd;
};

TruncatedMoments truncated_moments(double mu, double sigma, double lower, double upper) {
  const double a = (lower - mu) / sigma;
  const double b = (upper - mu) / sigma;
  const double z = Phi(b) - Phi(a);
  const double pa = phi(a);
  const double pb = phi(b);
  const double r = (pa - pb) / z;
  const double var = sigma * sigma * (1.0 + (a * pa - b * pb) / z - r * r);
  return {mu + sigma * r, std::sqrt(std::max(var, 0.0))};
}

struct Sampler {
  Distribution family = Distribution::Normal;
  double mu = 0.0;
  double sigma = 1.0;
  double lower = 0.0;
  double upper = 0.0;
  int decimals = 0;

  double draw(Rng& rng) const {
    for (int attempt = 0; attempt < 100000; ++attempt) {
      double x = family == Distribution::Normal ? mu + sigma * rng.normal()
                                                : lower + std::exp(mu + sigma * rng.normal());
      if (x < lower || x > upper) continue;
      const double scale = std::pow(10.0, decimals);
      return std::clamp(std::round(x * scale) / scale, lower, upper);
    }
    throw CalibrationError("truncated sampler cannot reach its support");
  }
};

Sampler make_sampler(const ContinuousParams& p, const FeatureDef& def) {
  Sampler s{p.family, 0.0, 1.0, def.lower, def.upper, def.decimals};
  if (p.family == Distribution::Normal) {
    std::tie(s.mu, s.sigma) = fit_truncated_normal(p.mean, p.sd, def.lower, def.upper);
  } else {
    const double m = p.mean - def.lower;
    s.sigma = std::sqrt(std::log1p((p.sd * p.sd) / (m * m)));
    s.mu = std::log(m) - 0.5 * s.sigma * s.sigma;
  }
  return s;
}

std::size_t draw_categorical(Rng& rng, std::span<const double> probs) {
  double u = rng.uniform();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (u < probs[i]) return i;
    u -= probs[i];
  }
  return probs.size();  // remainder
}

int clamp_nihss(double x) { return static_cast<int>(std::clamp(std::round(x), 0.0, 42.0)); }

struct GroupModel {
  StrokeType type;
  const GroupSpec* spec;
  std::vector<std::optional<Sampler>> samplers;  // by codebook index
  std::vector<std::size_t> missing_eligible;
  double mortality_intercept = 0.0;
  double morbidity_intercept = 0.0;
};

GroupModel build_group_model(const GroupSpec& g, StrokeType type, const FeatureCodebook& cb) {
  GroupModel m{type, &g, std::vector<std::optional<Sampler>>(cb.size()), {}};
  for (const auto& [name, params] : g.continuous) {
    const auto idx = cb.require(name);
    m.samplers[idx] = make_sampler(params, cb[idx]);
  }
  for (std::size_t f = 0; f < cb.size(); ++f) {
    const auto& def = cb[f];
    if (!def.groups.contains(type) || def.kind != FeatureKind::Continuous) continue;
    if (std::find(FeatureCodebook::kShortlist.begin(), FeatureCodebook::kShortlist.end(),
                  def.name) != FeatureCodebook::kShortlist.end()) {
      continue;
    }
    m.missing_eligible.push_back(f);
  }
  return m;
}

struct Indices {
  std::size_t nihss0, nihss24, nihss48, ed;
};

PatientRecord sample_patient(Rng& rng, const GroupModel& m, const FeatureCodebook& cb,
                             const Indices& ix, double missing_fraction) {
  const auto& g = *m.spec;
  PatientRecord rec;
  rec.stroke_type = m.type;
  rec.values.assign(cb.size(), std::nullopt);

  for (const auto& [name, p] : g.binary_prevalence) {
    rec.values[cb.require(name)] = rng.bernoulli(p) ? 1.0 : 0.0;
  }
  for (const auto& cat : g.categories) {
    const auto pick = draw_categorical(rng, cat.probabilities);
    for (std::size_t i = 0; i < cat.members.size(); ++i) {
      rec.values[cb.require(cat.members[i])] = i == pick ? 1.0 : 0.0;
    }
  }
  for (const auto& [name, probs] : g.ordinal_probabilities) {
    rec.values[cb.require(name)] = static_cast<double>(
        std::min(draw_categorical(rng, probs), probs.size() - 1));
  }
  for (std::size_t f = 0; f < cb.size(); ++f) {
    if (m.samplers[f]) rec.values[f] = m.samplers[f]->draw(rng);
  }

  const auto& t = g.nihss;
  double base = 0.0;
  do {
    base = t.baseline_mean + t.baseline_sd * rng.normal();
  } while (base < -0.5 || base >= 42.5);
  const int n0 = clamp_nihss(base);
  int n24 = 0;
  int n48 = 0;
  if (rng.bernoulli(t.deterioration_prob)) {
    n24 = clamp_nihss(n0 + t.worsen24_mean + t.worsen24_sd * rng.normal());
    n48 = clamp_nihss(n24 + t.worsen48_mean + t.worsen48_sd * rng.normal());
  } else {
    const double r24 = std::exp(t.recovery24_log_mean + t.recovery24_log_sd * rng.normal());
    const double r48 = std::exp(t.recovery48_log_mean + t.recovery48_log_sd * rng.normal());
    n24 = clamp_nihss(n0 * std::min(r24, 1.25));
    n48 = clamp_nihss(n24 * std::min(r48, 1.25));
  }
  rec.values[ix.nihss0] = n0;
  rec.values[ix.nihss24] = n24;
  rec.values[ix.nihss48] = n48;
  rec.values[ix.ed] = derive_clinical_flags(n0, n24, n48).early_deterioration ? 1.0 : 0.0;

  for (auto f : m.missing_eligible) {
    if (rng.bernoulli(missing_fraction)) rec.values[f].reset();
  }
  return rec;
}

struct LinearPredictors {
  double mortality = 0.0;
  double morbidity = 0.0;
};

LinearPredictors linear_predictors(const PatientRecord& rec, const CohortSpec& spec,
                                   const FeatureCodebook& cb) {
  LinearPredictors lp;
  for (const auto& s : spec.signal) {
    const auto& v = rec.values[cb.require(s.feature)];
    if (!v) continue;
    const double z = (*v - s.center) / s.scale;
    lp.mortality += s.mortality_weight * z;
    lp.morbidity += s.morbidity_weight * z;
  }
  return lp;
}

/// Root of the increasing function f on [-40, 40] by bisection.
template <typename F>
double bisect(F f, const char* what) {
  double lo = -40.0;
  double hi = 40.0;
  if (f(lo) > 0.0 || f(hi) < 0.0) {
    throw CalibrationError(std::string("cannot calibrate ") + what +
                           " intercept: target prevalence unreachable");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void calibrate(GroupModel& m, std::span<const LinearPredictors> lps) {
  if (lps.empty()) return;
  const double n = static_cast<double>(lps.size());
  const auto& targets = m.spec->targets;
  m.mortality_intercept = bisect(
      [&](double a) {
        double s = 0.0;
        for (const auto& lp : lps) s += sigmoid(a + lp.mortality);
        return s / n - targets.mortality;
      },
      "mortality");
  m.morbidity_intercept = bisect(
      [&](double b) {
        double s = 0.0;
        for (const auto& lp : lps) {
          s += (1.0 - sigmoid(m.mortality_intercept + lp.mortality)) * sigmoid(b + lp.morbidity);
        }
        return s / n - targets.morbidity;
      },
      "morbidity");
}

int draw_mrs(Rng& rng, const GroupModel& m, const LinearPredictors& lp) {
  const double p_death = sigmoid(m.mortality_intercept + lp.mortality);
  const double p_morb = (1.0 - p_death) * sigmoid(m.morbidity_intercept + lp.morbidity);
  const double u = rng.uniform();
  const auto& g = *m.spec;
  if (u < p_death) return 6;
  if (u < p_death + p_morb) {
    return 3 + static_cast<int>(std::min<std::size_t>(
                   draw_categorical(rng, g.morbidity_mrs_probabilities), 2));
  }
  return static_cast<int>(std::min<std::size_t>(draw_categorical(rng, g.good_mrs_probabilities), 2));
}

}  // namespace

std::pair<double, double> fit_truncated_normal(double mean, double sd, double lower,
                                               double upper) {
  if (!(sd > 0.0) || !(mean > lower && mean < upper)) {
    throw CalibrationError("truncated normal target outside its support");
  }
  double mu = mean;
  double sigma = sd;
  for (int it = 0; it < 2000; ++it) {
    const auto m = truncated_moments(mu, sigma, lower, upper);
    if (!std::isfinite(m.mean) || !std::isfinite(m.sd) || m.sd <= 0.0) break;
    if (std::abs(m.mean - mean) < 1e-10 * sd && std::abs(m.sd - sd) < 1e-10 * sd) {
      return {mu, sigma};
    }
    mu += mean - m.mean;
    sigma *= sd / m.sd;
    if (sigma > 1e3 * sd) break;
  }
  throw CalibrationError("truncated normal moments unattainable within bounds");
}

Cohort generate_synthetic_cohort(const CohortSpec& spec, std::uint64_t seed,
                                 std::shared_ptr<const FeatureCodebook> codebook) {
  const auto& cb = *codebook;
  validate(spec, cb);
  const Indices ix{cb.require("NIHSS0"), cb.require("NIHSS24"), cb.require("NIHSS48"),
                   cb.require("ED")};
  GroupModel is_model = build_group_model(spec.is, StrokeType::IS, cb);
  GroupModel ich_model = build_group_model(spec.ich, StrokeType::ICH, cb);
  auto model_for = [&](StrokeType t) -> GroupModel& {
    return t == StrokeType::IS ? is_model : ich_model;
  };

  Rng rng(seed);
  const auto n_is = static_cast<std::size_t>(
      std::llround(static_cast<double>(spec.n_total) * spec.is_fraction));
  std::vector<StrokeType> types(spec.n_total, StrokeType::ICH);
  std::fill_n(types.begin(), std::min(n_is, spec.n_total), StrokeType::IS);
  rng.shuffle(std::span(types));

  std::vector<PatientRecord> records;
  records.reserve(spec.n_total + spec.n_early_death + spec.n_lost_followup);
  for (auto t : types) {
    records.push_back(sample_patient(rng, model_for(t), cb, ix, spec.missing_fraction));
  }

  std::vector<LinearPredictors> lps;
  lps.reserve(records.size());
  for (const auto& r : records) lps.push_back(linear_predictors(r, spec, cb));
  for (auto t : {StrokeType::IS, StrokeType::ICH}) {
    std::vector<LinearPredictors> group_lps;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].stroke_type == t) group_lps.push_back(lps[i]);
    }
    calibrate(model_for(t), group_lps);
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].mrs_3m = draw_mrs(rng, model_for(records[i].stroke_type), lps[i]);
  }

  auto draw_type = [&] { return rng.bernoulli(spec.is_fraction) ? StrokeType::IS : StrokeType::ICH; };
  for (std::size_t k = 0; k < spec.n_early_death; ++k) {
    auto rec = sample_patient(rng, model_for(draw_type()), cb, ix, spec.missing_fraction);
    rec.died_first_24h = true;
    rec.mrs_3m = 6;
    records.push_back(std::move(rec));
  }
  for (std::size_t k = 0; k < spec.n_lost_followup; ++k) {
    auto rec = sample_patient(rng, model_for(draw_type()), cb, ix, spec.missing_fraction);
    rec.lost_followup = true;
    rec.mrs_3m = draw_mrs(rng, model_for(rec.stroke_type), linear_predictors(rec, spec, cb));
    records.push_back(std::move(rec));
  }
  rng.shuffle(std::span(records));

  Cohort cohort{codebook, {}, {}, {Provenance::Kind::Synthetic, seed, "synthetic"}};
  cohort.labels.reserve(records.size());
  for (const auto& r : records) cohort.labels.push_back(derive_outcome(r.mrs_3m));
  cohort.records = std::move(records);
  return cohort;
}

}  // namespace strokeforest
