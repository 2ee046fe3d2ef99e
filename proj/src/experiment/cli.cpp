#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "strokeforest/experiment.hpp"

namespace strokeforest {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct CliError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw CliError("invalid JSON in " + path + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

Cohort read_cohort(const std::string& path) {
  if (!fs::exists(path)) throw CliError("cohort file not found: " + path);
  return load_cohort_csv(path, FeatureCodebook::standard());
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string config;
};

fs::path out_path(const Globals& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / name;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::optional<std::size_t> n;
  bool print_default = false;
  std::string output = "cohort.csv";
};

int cmd_generate(const Globals& g, const GenerateArgs& a) {
  if (a.print_default) {
    std::cout << to_json(default_cohort_spec()).dump(2) << "\n";
    return 0;
  }
  CohortSpec spec = g.config.empty() ? default_cohort_spec() : cohort_spec_from_json(read_json(g.config));
  if (a.n) {
    // Flagged extras keep their proportion to the retained count.
    const double scale = static_cast<double>(*a.n) / static_cast<double>(spec.n_total);
    spec.n_early_death = static_cast<std::size_t>(std::llround(spec.n_early_death * scale));
    spec.n_lost_followup = static_cast<std::size_t>(std::llround(spec.n_lost_followup * scale));
    spec.n_total = *a.n;
  }
  validate(spec, *FeatureCodebook::standard());
  const auto cohort = generate_synthetic_cohort(spec, g.seed.value_or(1));
  std::ostringstream csv;
  write_cohort_csv(csv, cohort);
  write_text(out_path(g, a.output), csv.str());
  return 0;
}

// ---------------------------------------------------------------------------

struct RunArgs {
  std::string cohort;
  std::optional<std::size_t> reps;
  std::optional<std::size_t> folds;
  std::optional<std::size_t> trees;
  std::optional<std::size_t> k;
  std::optional<std::string> selection_scope;
  std::optional<std::string> tuning_scope;
  std::optional<std::string> morbidity_population;
  std::vector<std::string> groups;
  std::vector<std::string> endpoints;
  std::size_t workers = 1;
  bool no_models = false;
};

int cmd_run(const Globals& g, const RunArgs& a) {
  json config = g.config.empty() ? json::object() : read_json(g.config);
  if (!config.is_object()) throw CliError("plan config must be a JSON object");
  ExperimentPlan base = plan_from_json(config);
  if (g.seed) base.master_seed = *g.seed;
  if (a.reps) base.repetitions = *a.reps;
  if (a.folds) base.folds = *a.folds;
  if (a.k) base.k_features = *a.k;
  if (a.trees) {
    base.tuning = TuningScope::Fixed;
    base.fixed_trees = *a.trees;
  }
  if (a.tuning_scope) base.tuning = parse_tuning_scope(*a.tuning_scope);
  if (a.selection_scope) base.selection_scope = parse_selection_scope(*a.selection_scope);
  if (a.morbidity_population) base.morbidity_population = parse_morbidity_population(*a.morbidity_population);
  validate(base);

  std::vector<std::pair<Group, Endpoint>> problems;
  if (config.contains("problems")) {
    for (const auto& p : config.at("problems")) {
      problems.emplace_back(parse_group(p.at("group").get<std::string>()),
                            parse_endpoint(p.at("endpoint").get<std::string>()));
    }
  } else {
    for (Endpoint e : {Endpoint::Mortality, Endpoint::Morbidity}) {
      for (Group grp : {Group::All, Group::IS, Group::ICH}) problems.emplace_back(grp, e);
    }
  }
  auto wanted = [](const std::vector<std::string>& list, std::string_view name) {
    if (list.empty()) return true;
    for (const auto& s : list) {
      if (lower(s) == lower(name)) return true;
    }
    return false;
  };
  std::erase_if(problems, [&](const auto& p) {
    return !wanted(a.groups, to_string(p.first)) || !wanted(a.endpoints, to_string(p.second));
  });
  if (problems.empty()) throw CliError("no problems selected");

  const std::size_t workers = a.workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : a.workers;
  const auto raw = read_cohort(a.cohort);
  const auto ex = apply_exclusions(raw);
  const json cohort_info = {{"source", fs::path(a.cohort).filename().string()},
                            {"n_records", raw.size()},
                            {"excluded_died_first_24h", ex.died_first_24h},
                            {"excluded_lost_followup", ex.lost_followup},
                            {"n_retained", ex.cohort.size()}};

  std::vector<RunResult> results;
  std::ostringstream importance;
  importance << "group,endpoint,feature,gini_sum,permutation_sum,selected_count\n";
  importance.precision(17);
  for (const auto& [grp, endpoint] : problems) {
    ExperimentPlan plan = base;
    plan.group = grp;
    plan.endpoint = endpoint;
    auto result = run_problem(ex.cohort, plan, workers);
    const std::string tag = lower(to_string(grp)) + "_" + std::string(to_string(endpoint));

    std::ostringstream roc;
    write_roc_csv(roc, roc_curve(result.oof_scores, result.oof_labels));
    write_text(out_path(g, "roc_" + tag + ".csv"), roc.str());

    const auto agg = aggregate(result);
    for (const auto& name : agg.gini_ranking()) {
      importance << to_string(grp) << ',' << to_string(endpoint) << ',' << name << ','
                 << agg.gini_sums.at(name) << ',' << agg.permutation_sums.at(name) << ','
                 << agg.selection_counts.at(name) << '\n';
    }
    if (!a.no_models) {
      const std::size_t n_trees = result.tuning ? result.tuning->best_n_trees : result.folds.front().n_trees;
      write_json(out_path(g, "forest_" + tag + ".json"),
                 to_json(train_reference_model(ex.cohort, plan, n_trees, workers)));
    }
    std::cerr << to_string(grp) << '/' << to_string(endpoint) << ": mean AUC " << agg.mean_auc
              << " (sd " << agg.sd_auc << ") over " << agg.n_runs << " folds\n";
    results.push_back(std::move(result));
  }
  write_text(out_path(g, "importance.csv"), importance.str());
  write_json(out_path(g, "report.json"), make_report(results, cohort_info));
  return 0;
}

// ---------------------------------------------------------------------------

struct HeatmapArgs {
  std::string model;
  std::string cohort;
  std::string x = "NIHSS48";
  std::string y = "NIHSS24";
  std::size_t resolution = 50;
};

int cmd_heatmap(const Globals& g, const HeatmapArgs& a) {
  const auto model = reference_model_from_json(read_json(a.model));
  const auto ex = apply_exclusions(read_cohort(a.cohort));
  const auto pop = endpoint_cohort(filter_group(ex.cohort, model.group), model.endpoint,
                                   model.morbidity_population);
  if (pop.empty()) throw CliError("cohort has no records for the model's group and endpoint");
  const auto labels = endpoint_labels(pop, model.endpoint);
  const auto grid = heatmap_grid(model.forest, pop, a.x, a.y, a.resolution, labels);
  std::ostringstream cells;
  write_heatmap_csv(cells, grid);
  write_text(out_path(g, "heatmap.csv"), cells.str());
  std::ostringstream miss;
  write_misclassified_csv(miss, grid);
  write_text(out_path(g, "heatmap_misclassified.csv"), miss.str());
  return 0;
}

// ---------------------------------------------------------------------------

struct CompareArgs {
  std::vector<std::string> reports;
  std::string metric = "auc";
};

int cmd_compare(const Globals& g, const CompareArgs& a) {
  if (a.metric != "auc" && a.metric != "acc") throw CliError("metric must be auc or acc");
  std::vector<std::pair<std::string, std::vector<double>>> samples;
  for (const auto& path : a.reports) {
    const auto doc = read_json(path);
    if (doc.value("kind", "") != "report") throw CliError(path + " is not a run report");
    if (doc.value("schema_version", 0) != kReportSchemaVersion) {
      throw CliError(path + ": unsupported schema_version");
    }
    const std::string prefix = a.reports.size() > 1 ? fs::path(path).stem().string() + ":" : "";
    for (const auto& p : doc.at("problems")) {
      samples.emplace_back(prefix + p.at("group").get<std::string>() + "/" + p.at("endpoint").get<std::string>(),
                           p.at("aggregate").at(a.metric).get<std::vector<double>>());
    }
  }
  if (samples.size() < 2) throw CliError("compare needs at least 2 vectors across the given reports");
  auto doc = to_json(compare_groups(samples));
  doc["metric"] = a.metric;
  write_json(out_path(g, "compare.json"), doc);
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_summarize(const Globals& g, const std::string& cohort) {
  write_json(out_path(g, "summary.json"), summarize_cohort(read_cohort(cohort)));
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Random-forest stroke outcome experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();
  app.add_option("--config", g.config, "Cohort spec (generate) or plan (run) JSON");

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic cohort CSV");
  generate->add_option("--n", gen.n, "Retained patient count (overrides the spec)");
  generate->add_option("--output", gen.output, "File name under --out-dir")->capture_default_str();
  generate->add_flag("--print-default-spec", gen.print_default, "Print the default spec JSON and exit");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run the cross-validated experiment");
  run_cmd->add_option("--cohort", run.cohort, "Cohort CSV")->required();
  run_cmd->add_option("--reps", run.reps, "Repetitions");
  run_cmd->add_option("--folds", run.folds, "Folds per repetition");
  run_cmd->add_option("--trees", run.trees, "Fixed tree count (disables tuning)");
  run_cmd->add_option("--k", run.k, "Selected feature count");
  run_cmd->add_option("--selection-scope", run.selection_scope, "per-fold or global");
  run_cmd->add_option("--tuning-scope", run.tuning_scope, "per-problem, per-fold or fixed");
  run_cmd->add_option("--morbidity-population", run.morbidity_population,
                      "exclude-deaths or include-deaths-as-negative");
  run_cmd->add_option("--group", run.groups, "Restrict to groups (ALL, IS, ICH)");
  run_cmd->add_option("--endpoint", run.endpoints, "Restrict to endpoints (mortality, morbidity)");
  run_cmd->add_option("--workers", run.workers, "Worker threads (0 = all cores)")->capture_default_str();
  run_cmd->add_flag("--no-models", run.no_models, "Skip the reference model files");

  HeatmapArgs heat;
  auto* heatmap = app.add_subcommand("heatmap", "Prediction grid over two features");
  heatmap->add_option("--model", heat.model, "Model JSON written by run")->required();
  heatmap->add_option("--cohort", heat.cohort, "Cohort CSV")->required();
  heatmap->add_option("--x", heat.x, "X-axis feature")->capture_default_str();
  heatmap->add_option("--y", heat.y, "Y-axis feature")->capture_default_str();
  heatmap->add_option("--resolution", heat.resolution, "Points per axis")->capture_default_str();

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Compare AUC vectors across problems");
  compare->add_option("reports", cmp.reports, "Report JSON files")->required();
  compare->add_option("--metric", cmp.metric, "auc or acc")->capture_default_str();

  std::string summary_cohort;
  auto* summarize = app.add_subcommand("summarize", "Descriptive tables for a cohort");
  summarize->add_option("--cohort", summary_cohort, "Cohort CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code != 0) std::cerr << "\n" << app.help();
    return code;
  }
  try {
    if (*generate) return cmd_generate(g, gen);
    if (*run_cmd) return cmd_run(g, run);
    if (*heatmap) return cmd_heatmap(g, heat);
    if (*compare) return cmd_compare(g, cmp);
    if (*summarize) return cmd_summarize(g, summary_cohort);
  } catch (const ParseError& e) {
    std::cerr << "error: cohort file: " << e.what() << "\n";
    return 3;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace strokeforest
