#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "strokeforest/eval.hpp"
#include "strokeforest/stats.hpp"

namespace strokeforest {

namespace {

void check_inputs(std::span<const double> scores, std::span<const std::uint8_t> labels,
                  std::size_t& n_pos, std::size_t& n_neg) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores/labels length mismatch");
  n_pos = static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(),
                                                 [](std::uint8_t y) { return y != 0; }));
  n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("ROC analysis needs both classes");
}

}  // namespace

RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  RocCurve curve;
  check_inputs(scores, labels, curve.n_pos, curve.n_neg);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });
  const double np = static_cast<double>(curve.n_pos);
  const double nn = static_cast<double>(curve.n_neg);
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) (labels[order[i]] ? tp : fp) += 1;
    curve.points.push_back({static_cast<double>(fp) / nn, static_cast<double>(tp) / np, s});
  }
  return curve;
}

double auc_trapezoid(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return area;
}

double auc_mann_whitney(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  check_inputs(scores, labels, n_pos, n_neg);
  const auto ranks = stats::midranks(scores);
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (labels[i]) rank_sum += ranks[i];
  }
  const double np = static_cast<double>(n_pos);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

AucResult auc_ci(std::span<const double> scores, std::span<const std::uint8_t> labels, double z) {
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  check_inputs(scores, labels, n_pos, n_neg);
  if (n_pos < 2 || n_neg < 2) throw std::invalid_argument("DeLong interval needs >= 2 per class");
  std::vector<double> pos;
  std::vector<double> neg;
  for (std::size_t i = 0; i < scores.size(); ++i) (labels[i] ? pos : neg).push_back(scores[i]);
  const auto r_all = stats::midranks(scores);
  const auto r_pos = stats::midranks(pos);
  const auto r_neg = stats::midranks(neg);
  const double m = static_cast<double>(n_pos);
  const double n = static_cast<double>(n_neg);
  // Structural components: v10[i] = P(pos_i > neg), v01[j] = P(pos > neg_j).
  std::vector<double> v10(n_pos);
  std::vector<double> v01(n_neg);
  std::size_t ip = 0;
  std::size_t in = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i]) {
      v10[ip] = (r_all[i] - r_pos[ip]) / n;
      ++ip;
    } else {
      v01[in] = 1.0 - (r_all[i] - r_neg[in]) / m;
      ++in;
    }
  }
  AucResult out;
  out.auc = stats::mean(v10);
  const double s10 = std::pow(stats::sample_sd(v10), 2);
  const double s01 = std::pow(stats::sample_sd(v01), 2);
  out.se = std::sqrt(s10 / m + s01 / n);
  out.ci_low = std::clamp(out.auc - z * out.se, 0.0, 1.0);
  out.ci_high = std::clamp(out.auc + z * out.se, 0.0, 1.0);
  return out;
}

AucResult single_variable_roc(const Cohort& cohort, std::string_view feature, Endpoint endpoint,
                              MorbidityPopulation population) {
  const std::size_t f = cohort.codebook->require(feature);
  const auto labels = endpoint_labels(cohort, endpoint);
  std::vector<double> scores;
  std::vector<std::uint8_t> y;
  for (std::size_t row : endpoint_rows(cohort, endpoint, population)) {
    const auto& v = cohort.records[row].values[f];
    if (!v) continue;
    scores.push_back(*v);
    y.push_back(labels[row]);
  }
  const auto n_pos = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  if (n_pos < 2 || y.size() - n_pos < 2) {
    throw std::invalid_argument("single-variable ROC: fewer than 2 values per class for " +
                                std::string(feature));
  }
  if (std::all_of(scores.begin(), scores.end(), [&](double s) { return s == scores.front(); })) {
    throw std::invalid_argument("single-variable ROC: " + std::string(feature) +
                                " is constant, no discrimination possible");
  }
  auto result = auc_ci(scores, y);
  if (result.auc < 0.5) {
    for (double& s : scores) s = -s;
    result = auc_ci(scores, y);
    result.flipped = true;
  }
  return result;
}

void write_roc_csv(std::ostream& out, const RocCurve& curve) {
  const auto put = [&](double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, res.ptr - buf);
  };
  out << "fpr,tpr,threshold\n";
  for (const auto& p : curve.points) {
    put(p.fpr);
    out << ',';
    put(p.tpr);
    out << ',';
    if (std::isinf(p.threshold)) {
      out << "inf";
    } else {
      put(p.threshold);
    }
    out << '\n';
  }
}

}  // namespace strokeforest
