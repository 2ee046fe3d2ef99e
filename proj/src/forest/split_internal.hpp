#pragma once

#include <cstdint>
#include <optional>

namespace strokeforest::detail {

/// Exact comparison of split quality. For children (nL, sL) and (nR, sR),
/// where s is the sum of squared class counts, weighted child gini times n
/// equals n - (sL / nL + sR / nR); the split maximizing
/// q = (sL * nR + sR * nL) / (nL * nR) is the best one.
struct SplitQuality {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  bool better_than(const SplitQuality& other) const {
    return static_cast<unsigned __int128>(num) * other.den >
           static_cast<unsigned __int128>(other.num) * den;
  }
};

inline SplitQuality quality(std::uint64_t ln, std::uint64_t lp, std::uint64_t rn,
                            std::uint64_t rp) {
  const std::uint64_t nl = ln + lp;
  const std::uint64_t nr = rn + rp;
  const std::uint64_t sl = ln * ln + lp * lp;
  const std::uint64_t sr = rn * rn + rp * rp;
  return {sl * nr + sr * nl, nl * nr};
}

inline SplitQuality parent_quality(std::uint64_t n_neg, std::uint64_t n_pos) {
  return {n_neg * n_neg + n_pos * n_pos, n_neg + n_pos};
}

/// Midpoint threshold that keeps `lo` on the left and `hi` on the right
/// under the `value <= threshold` rule.
inline double midpoint(double lo, double hi) {
  const double mid = lo + (hi - lo) / 2.0;
  return mid < hi ? mid : lo;
}

/// Scans class-count groups in ascending value order and keeps the best
/// admissible boundary. Candidates must be fed in ascending feature order
/// so that strict improvement implements the tie-break.
class SplitSweep {
 public:
  SplitSweep(std::uint64_t n_neg, std::uint64_t n_pos, std::uint64_t min_leaf)
      : n_neg_(n_neg), n_pos_(n_pos), min_leaf_(min_leaf),
        best_(parent_quality(n_neg, n_pos)) {}

  void begin_feature(std::size_t feature) {
    feature_ = feature;
    ln_ = lp_ = 0;
    has_prev_ = false;
  }

  /// Next distinct value with its class counts.
  void add(double value, std::uint64_t neg, std::uint64_t pos) {
    if (has_prev_) consider(value);
    ln_ += neg;
    lp_ += pos;
    prev_ = value;
    has_prev_ = true;
  }

  bool found() const { return found_; }
  std::size_t feature() const { return best_feature_; }
  double threshold() const { return best_threshold_; }
  std::uint64_t left_neg() const { return best_ln_; }
  std::uint64_t left_pos() const { return best_lp_; }

 private:
  void consider(double next_value) {
    const std::uint64_t nl = ln_ + lp_;
    const std::uint64_t nr = n_neg_ + n_pos_ - nl;
    if (nl < min_leaf_ || nr < min_leaf_) return;
    const auto q = quality(ln_, lp_, n_neg_ - ln_, n_pos_ - lp_);
    if (!q.better_than(best_)) return;
    best_ = q;
    found_ = true;
    best_feature_ = feature_;
    best_threshold_ = midpoint(prev_, next_value);
    best_ln_ = ln_;
    best_lp_ = lp_;
  }

  std::uint64_t n_neg_;
  std::uint64_t n_pos_;
  std::uint64_t min_leaf_;
  SplitQuality best_;
  bool found_ = false;
  std::size_t best_feature_ = 0;
  double best_threshold_ = 0.0;
  std::uint64_t best_ln_ = 0;
  std::uint64_t best_lp_ = 0;

  std::size_t feature_ = 0;
  std::uint64_t ln_ = 0;
  std::uint64_t lp_ = 0;
  double prev_ = 0.0;
  bool has_prev_ = false;
};

double weighted_decrease(std::uint64_t n_neg, std::uint64_t n_pos, std::uint64_t ln,
                         std::uint64_t lp);

}  // namespace strokeforest::detail
