#include <optional>
#include <string>
#include <vector>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "strokeforest/experiment.hpp"

namespace py = pybind11;
using namespace strokeforest;

namespace {

using Matrix = py::array_t<double, py::array::c_style | py::array::forcecast>;
using Labels = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

Dataset to_dataset(const Matrix& x, const Labels& y, std::vector<std::string> names) {
  if (x.ndim() != 2) throw std::invalid_argument("X must be two-dimensional");
  const auto n = static_cast<std::size_t>(x.shape(0));
  const auto p = static_cast<std::size_t>(x.shape(1));
  if (names.empty()) {
    for (std::size_t f = 0; f < p; ++f) names.push_back("x" + std::to_string(f));
  }
  if (names.size() != p) throw std::invalid_argument("feature_names length does not match X");
  std::vector<std::uint8_t> labels(n, 0);
  if (y.size() > 0) {
    if (static_cast<std::size_t>(y.size()) != n) throw std::invalid_argument("y length does not match X");
    for (std::size_t i = 0; i < n; ++i) labels[i] = y.data()[i] ? 1 : 0;
  }
  auto r = x.unchecked<2>();
  std::vector<double> values(n * p);
  for (std::size_t f = 0; f < p; ++f) {
    for (std::size_t i = 0; i < n; ++i) values[f * n + i] = r(i, f);
  }
  return Dataset(std::move(names), n, std::move(values), std::move(labels));
}

std::vector<std::uint8_t> to_labels(const std::vector<int>& y) {
  return {y.begin(), y.end()};
}

py::dict ttest_dict(const stats::TTestResult& r) {
  py::dict d;
  d["t"] = r.t;
  d["df"] = r.df;
  d["p"] = r.p_two_sided;
  return d;
}

py::dict auc_dict(const AucResult& r) {
  py::dict d;
  d["auc"] = r.auc;
  d["se"] = r.se;
  d["ci_low"] = r.ci_low;
  d["ci_high"] = r.ci_high;
  d["flipped"] = r.flipped;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Random-forest stroke outcome models";

  py::class_<Cohort>(m, "Cohort")
      .def("__len__", &Cohort::size)
      .def_property_readonly("feature_names",
                             [](const Cohort& c) {
                               std::vector<std::string> names;
                               for (const auto& e : c.codebook->entries()) names.push_back(e.name);
                               return names;
                             })
      .def("column",
           [](const Cohort& c, const std::string& name) {
             const auto f = c.codebook->require(name);
             std::vector<std::optional<double>> out;
             for (const auto& r : c.records) out.push_back(r.values[f]);
             return out;
           })
      .def("labels",
           [](const Cohort& c, const std::string& endpoint) {
             const auto y = endpoint_labels(c, parse_endpoint(endpoint));
             return std::vector<int>(y.begin(), y.end());
           })
      .def_property_readonly("mrs",
                             [](const Cohort& c) {
                               std::vector<int> out;
                               for (const auto& r : c.records) out.push_back(r.mrs_3m);
                               return out;
                             })
      .def_property_readonly("stroke_types", [](const Cohort& c) {
        std::vector<std::string> out;
        for (const auto& r : c.records) out.emplace_back(to_string(r.stroke_type));
        return out;
      });

  m.def(
      "generate_cohort",
      [](std::optional<std::size_t> n, std::uint64_t seed) {
        auto spec = default_cohort_spec();
        if (n) {
          const double scale = static_cast<double>(*n) / static_cast<double>(spec.n_total);
          spec.n_early_death = static_cast<std::size_t>(std::llround(spec.n_early_death * scale));
          spec.n_lost_followup = static_cast<std::size_t>(std::llround(spec.n_lost_followup * scale));
          spec.n_total = *n;
        }
        return generate_synthetic_cohort(spec, seed);
      },
      py::arg("n") = py::none(), py::arg("seed") = 1,
      "Synthetic cohort from the default spec; n overrides the retained count.");
  m.def("load_cohort_csv", [](const std::string& path) {
    return load_cohort_csv(path, FeatureCodebook::standard());
  });
  m.def("apply_exclusions", [](const Cohort& c) {
    auto r = apply_exclusions(c);
    return py::make_tuple(std::move(r.cohort), r.died_first_24h, r.lost_followup);
  });
  m.def("filter_group", [](const Cohort& c, const std::string& group) {
    return filter_group(c, parse_group(group));
  });
  m.def("summarize_cohort", [](const Cohort& c) { return summarize_cohort(c).dump(); });

  m.def(
      "run_problem",
      [](const Cohort& c, const std::string& plan_json, std::size_t workers) {
        const auto plan = plan_from_json(nlohmann::json::parse(plan_json));
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run_problem(c, plan, workers);
        }
        nlohmann::json doc{{"result", to_json(r)}, {"aggregate", to_json(aggregate(r))}};
        return doc.dump();
      },
      py::arg("cohort"), py::arg("plan_json") = "{}", py::arg("workers") = 1);
  m.def("default_plan", [] { return to_json(ExperimentPlan{}).dump(); });

  py::class_<Forest>(m, "Forest")
      .def_property_readonly("n_trees", [](const Forest& f) { return f.trees.size(); })
      .def_property_readonly("feature_names", [](const Forest& f) { return f.feature_names; })
      .def("predict_proba",
           [](const Forest& f, const Matrix& x) {
             const auto data = to_dataset(x, Labels(), f.feature_names);
             return predict_proba(f, data);
           })
      .def("gini_importance", [](const Forest& f) { return gini_importance(f); })
      .def("permutation_importance",
           [](const Forest& f, const Matrix& x, const Labels& y, std::uint64_t seed) {
             return permutation_importance(f, to_dataset(x, y, f.feature_names), seed);
           },
           py::arg("X"), py::arg("y"), py::arg("seed") = 0)
      .def("to_json", [](const Forest& f) { return to_json(f).dump(); });
  m.def("forest_from_json", [](const std::string& text) {
    return forest_from_json(nlohmann::json::parse(text));
  });
  m.def(
      "train_forest",
      [](const Matrix& x, const Labels& y, std::vector<std::string> feature_names, std::size_t n_trees,
         std::size_t mtry, std::size_t min_leaf, std::optional<std::size_t> max_depth, std::uint64_t seed,
         std::size_t workers) {
        ForestConfig cfg;
        cfg.n_trees = n_trees;
        cfg.mtry = mtry;
        cfg.min_leaf = min_leaf;
        cfg.max_depth = max_depth;
        cfg.seed = seed;
        const auto data = to_dataset(x, y, std::move(feature_names));
        py::gil_scoped_release release;
        return train_forest(data, cfg, workers);
      },
      py::arg("X"), py::arg("y"), py::arg("feature_names") = std::vector<std::string>{},
      py::arg("n_trees") = 500, py::arg("mtry") = 0, py::arg("min_leaf") = 1,
      py::arg("max_depth") = py::none(), py::arg("seed") = 0, py::arg("workers") = 1);
  m.def("gini_impurity", &gini_impurity);

  m.def("auc", [](const std::vector<double>& s, const std::vector<int>& y) {
    return auc_mann_whitney(s, to_labels(y));
  });
  m.def("auc_ci", [](const std::vector<double>& s, const std::vector<int>& y) {
    return auc_dict(auc_ci(s, to_labels(y)));
  });
  m.def("roc_curve", [](const std::vector<double>& s, const std::vector<int>& y) {
    std::vector<std::tuple<double, double, double>> out;
    for (const auto& p : roc_curve(s, to_labels(y)).points) out.emplace_back(p.fpr, p.tpr, p.threshold);
    return out;
  });

  m.def("welch_t", [](const std::vector<double>& a, const std::vector<double>& b) {
    return ttest_dict(stats::welch_t(a, b));
  });
  m.def("paired_t", [](const std::vector<double>& a, const std::vector<double>& b) {
    return ttest_dict(stats::paired_t(a, b));
  });
  m.def("shapiro_wilk", [](const std::vector<double>& x) {
    const auto r = stats::shapiro_wilk(x);
    return py::make_tuple(r.statistic, r.p_value);
  });
  m.def("ks_normality", [](const std::vector<double>& x) {
    const auto r = stats::ks_normality(x);
    return py::make_tuple(r.statistic, r.p_value);
  });
  m.def("wilcoxon_signed_rank", [](const std::vector<double>& a, const std::vector<double>& b) {
    const auto r = stats::wilcoxon_signed_rank(a, b);
    py::dict d;
    d["w_plus"] = r.w_plus;
    d["n_effective"] = r.n_effective;
    d["p"] = r.p_two_sided;
    d["method"] = r.method == stats::WilcoxonMethod::Exact ? "exact" : "normal";
    return d;
  });
  m.def("compare_groups", [](const std::vector<std::pair<std::string, std::vector<double>>>& samples) {
    return to_json(compare_groups(samples)).dump();
  });
}
