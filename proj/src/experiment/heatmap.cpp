#include <algorithm>
#include <charconv>
#include <ostream>
#include <stdexcept>

#include "strokeforest/experiment.hpp"

namespace strokeforest {

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

HeatmapGrid heatmap_grid(const Forest& forest, const Cohort& cohort, std::string_view x_feature,
                         std::string_view y_feature, std::size_t resolution,
                         std::span<const std::uint8_t> labels) {
  if (resolution < 2) throw std::invalid_argument("heatmap: resolution must be >= 2");
  if (!labels.empty() && labels.size() != cohort.size()) {
    throw std::invalid_argument("heatmap: label count mismatch");
  }
  const auto& cb = *cohort.codebook;
  const std::size_t xf = forest.feature_index(x_feature);
  const std::size_t yf = forest.feature_index(y_feature);
  const std::size_t p = forest.feature_names.size();

  // Per forest feature: codebook column, observed range and fixed value.
  std::vector<std::size_t> column(p);
  std::vector<double> lo(p);
  std::vector<double> hi(p);
  std::vector<double> fixed(p);
  ImputationModel fills;
  fills.fills.assign(cb.size(), std::nullopt);
  for (std::size_t j = 0; j < p; ++j) {
    column[j] = cb.require(forest.feature_names[j]);
    const std::size_t f[] = {column[j]};
    const auto model = ImputationModel::fit(cohort, f);
    fixed[j] = *model.fills[column[j]];
    fills.fills[column[j]] = fixed[j];
    bool first = true;
    for (const auto& r : cohort.records) {
      if (!r.values[column[j]]) continue;
      const double v = *r.values[column[j]];
      lo[j] = first ? v : std::min(lo[j], v);
      hi[j] = first ? v : std::max(hi[j], v);
      first = false;
    }
  }

  HeatmapGrid grid;
  grid.x_feature = std::string(x_feature);
  grid.y_feature = std::string(y_feature);
  auto axis = [&](std::size_t j) {
    std::vector<double> v(resolution);
    for (std::size_t i = 0; i < resolution; ++i) {
      v[i] = lo[j] + (hi[j] - lo[j]) * static_cast<double>(i) / static_cast<double>(resolution - 1);
    }
    return v;
  };
  grid.x_values = axis(xf);
  grid.y_values = axis(yf);
  for (std::size_t j = 0; j < p; ++j) {
    if (j != xf && j != yf) grid.fixed.emplace_back(forest.feature_names[j], fixed[j]);
  }
  std::vector<double> x = fixed;
  grid.cells.resize(resolution * resolution);
  for (std::size_t iy = 0; iy < resolution; ++iy) {
    for (std::size_t ix = 0; ix < resolution; ++ix) {
      x[xf] = grid.x_values[ix];
      x[yf] = grid.y_values[iy];
      grid.cells[iy * resolution + ix] = predict_proba(forest, x);
    }
  }

  if (!labels.empty()) {
    const auto filled = fills.apply(cohort);
    for (std::size_t i = 0; i < filled.size(); ++i) {
      for (std::size_t j = 0; j < p; ++j) x[j] = *filled.records[i].values[column[j]];
      const double prob = predict_proba(forest, x);
      if ((prob >= 0.5) != (labels[i] != 0)) {
        grid.misclassified.push_back({i, x[xf], x[yf], labels[i], prob});
      }
    }
  }
  return grid;
}

void write_heatmap_csv(std::ostream& out, const HeatmapGrid& grid) {
  out << grid.x_feature << ',' << grid.y_feature << ",probability\n";
  for (std::size_t iy = 0; iy < grid.y_values.size(); ++iy) {
    for (std::size_t ix = 0; ix < grid.x_values.size(); ++ix) {
      put(out, grid.x_values[ix]);
      out << ',';
      put(out, grid.y_values[iy]);
      out << ',';
      put(out, grid.at(ix, iy));
      out << '\n';
    }
  }
}

void write_misclassified_csv(std::ostream& out, const HeatmapGrid& grid) {
  out << "row," << grid.x_feature << ',' << grid.y_feature << ",label,probability\n";
  for (const auto& m : grid.misclassified) {
    out << m.row << ',';
    put(out, m.x);
    out << ',';
    put(out, m.y);
    out << ',' << static_cast<int>(m.label) << ',';
    put(out, m.probability);
    out << '\n';
  }
}

}  // namespace strokeforest
