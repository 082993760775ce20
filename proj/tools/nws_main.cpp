// Command-line surface for the Nadaraya-Watson sketch library: sketch
// construction and querying, the regression benchmark, the error study,
// and the sampling-vs-baseline training demo. Every run writes a manifest
// with the fully resolved configuration next to its outputs.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nws/config.hpp"
#include "nws/data.hpp"
#include "nws/experiments.hpp"
#include "nws/sketch.hpp"
#include "nws/trainer.hpp"

namespace {

constexpr const char* kVersion = "nws 1.0.0";

using nlohmann::json;

void write_manifest(const std::string& output_path, const json& config) {
  json manifest;
  manifest["version"] = kVersion;
  manifest["config"] = config;
  std::ofstream out(output_path + ".manifest.json");
  out << manifest.dump(2) << '\n';
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open output file " + path);
  }
  return out;
}

// Feature-only CSV (all columns numeric, no target).
std::vector<std::vector<double>> load_feature_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::runtime_error("unparseable cell at row " +
                                 std::to_string(line_no) + " of " + path);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<unsigned> parse_rows_list(const std::string& csv) {
  std::vector<unsigned> rows;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    rows.push_back(static_cast<unsigned>(std::stoul(item)));
  }
  if (rows.empty()) {
    throw std::runtime_error("empty -R list");
  }
  return rows;
}

struct SketchBuildArgs {
  std::string data_path;
  std::size_t target_column = 0;
  bool has_header = false;
  unsigned bits = 10;
  unsigned rows = 200;
  double y_bound = 10.0;
  std::uint64_t seed = 0;
  std::string output = "sketch.bin";
};

int cmd_sketch_build(const SketchBuildArgs& a) {
  const auto data = nws::load_csv(a.data_path, a.target_column, a.has_header);
  nws::LshFamilySpec spec;
  spec.bits = a.bits;
  spec.dim = static_cast<unsigned>(data.dim());
  spec.master_seed = a.seed;
  const auto sketch =
      nws::construct(data.features, data.targets, spec, a.rows, a.y_bound);
  std::ofstream out(a.output, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file " + a.output);
  }
  sketch.save(out);
  write_manifest(a.output, json{{"subcommand", "sketch-build"},
                                {"data", a.data_path},
                                {"target_column", a.target_column},
                                {"has_header", a.has_header},
                                {"bits", a.bits},
                                {"rows", a.rows},
                                {"y_bound", a.y_bound},
                                {"seed", a.seed},
                                {"points", data.size()}});
  std::cout << "built sketch: R=" << a.rows << " W=" << (1u << a.bits)
            << " points=" << data.size() << " -> " << a.output << '\n';
  return 0;
}

int cmd_sketch_query(const std::string& snapshot_path,
                     const std::string& queries_path,
                     const std::string& output) {
  std::ifstream in(snapshot_path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open snapshot " + snapshot_path);
  }
  const auto sketch = nws::NwSketch::load(in);
  const auto queries = load_feature_rows(queries_path);
  auto out = open_output(output);
  out.precision(17);
  out << "estimate\n";
  for (const auto& q : queries) {
    out << sketch.query(q) << '\n';
  }
  write_manifest(output, json{{"subcommand", "sketch-query"},
                              {"snapshot", snapshot_path},
                              {"queries", queries_path},
                              {"num_queries", queries.size()}});
  return 0;
}

struct RegressBenchArgs {
  std::string data_path;
  std::size_t target_column = 0;
  bool has_header = false;
  std::string rows_list = "10,20,50,100,200";
  unsigned bits = 8;
  double test_fraction = 0.1;
  std::uint64_t seed = 0;
  std::string output = "regress_bench.csv";
  // synthetic fallback when no file is given
  std::size_t synth_n = 2000;
  std::size_t synth_dim = 5;
  double synth_noise = 0.05;
};

int cmd_regress_bench(const RegressBenchArgs& a) {
  nws::TabularDataset data;
  if (!a.data_path.empty()) {
    data = nws::load_csv(a.data_path, a.target_column, a.has_header);
  } else {
    data = nws::synth_regression(nws::SynthKind::kSmoothAngular, a.synth_n,
                                 a.synth_dim, a.synth_noise, a.seed);
  }
  nws::RegressBenchConfig cfg;
  cfg.bits = a.bits;
  cfg.rows = parse_rows_list(a.rows_list);
  cfg.test_fraction = a.test_fraction;
  cfg.seed = a.seed;
  const auto result = nws::regress_bench(data, cfg);

  auto out = open_output(a.output);
  out.precision(17);
  out << "model,rows,mse\n";
  out << "ols,," << result.ols_mse << '\n';
  for (const auto& row : result.nws) {
    out << "nws," << row.rows << ',' << row.nws_mse << '\n';
  }
  std::cout << "ols mse: " << result.ols_mse << '\n';
  for (const auto& row : result.nws) {
    std::cout << "nws R=" << row.rows << " mse: " << row.nws_mse << '\n';
  }
  write_manifest(a.output, json{{"subcommand", "regress-bench"},
                                {"data", a.data_path},
                                {"target_column", a.target_column},
                                {"has_header", a.has_header},
                                {"rows", a.rows_list},
                                {"bits", a.bits},
                                {"test_fraction", a.test_fraction},
                                {"seed", a.seed},
                                {"synthetic", a.data_path.empty()}});
  return 0;
}

struct ErrorStudyArgs {
  unsigned bits = 6;
  std::string rows_list = "10,20,50,100,200,800";
  double delta = 0.01;
  std::size_t n_train = 300;
  std::size_t n_test = 100;
  unsigned seeds = 10;
  std::size_t dim = 5;
  std::uint64_t seed = 0;
  std::string output = "error_study.csv";
};

int cmd_error_study(const ErrorStudyArgs& a) {
  nws::ErrorStudyConfig cfg;
  cfg.bits = a.bits;
  cfg.rows = parse_rows_list(a.rows_list);
  cfg.delta = a.delta;
  cfg.n_train = a.n_train;
  cfg.n_test = a.n_test;
  cfg.num_seeds = a.seeds;
  cfg.dim = a.dim;
  cfg.base_seed = a.seed;
  const auto rows = nws::error_study(cfg);

  auto out = open_output(a.output);
  out.precision(17);
  out << "rows,p50_error,p99_error,bound\n";
  for (const auto& r : rows) {
    out << r.rows << ',' << r.p50 << ',' << r.p99 << ',' << r.bound << '\n';
    std::cout << "R=" << r.rows << " p99=" << r.p99 << " bound=" << r.bound
              << '\n';
  }
  write_manifest(a.output, json{{"subcommand", "error-study"},
                                {"bits", a.bits},
                                {"rows", a.rows_list},
                                {"delta", a.delta},
                                {"n_train", a.n_train},
                                {"n_test", a.n_test},
                                {"seeds", a.seeds},
                                {"dim", a.dim},
                                {"seed", a.seed}});
  return 0;
}

int cmd_train_demo(const std::string& config_path, const std::string& out_dir,
                   std::uint64_t seed_override, bool seed_given) {
  nws::TrainConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      throw std::runtime_error("cannot open config " + config_path);
    }
    cfg = nws::train_config_from_json(json::parse(in));
  }
  if (seed_given) {
    cfg.seed = seed_override;
    cfg.sampler.seed = seed_override + 1;
  }
  std::filesystem::create_directories(out_dir);

  const auto baseline = nws::run_baseline(cfg);
  const auto adaptive = nws::run_adaptive(cfg);
  const auto report = nws::compare_runs(baseline, adaptive);

  {
    auto out = open_output(out_dir + "/baseline.csv");
    nws::write_metrics_csv(baseline, out);
  }
  {
    auto out = open_output(out_dir + "/adaptive.csv");
    nws::write_metrics_csv(adaptive, out);
  }
  {
    auto out = open_output(out_dir + "/report.json");
    out << nws::to_json(report).dump(2) << '\n';
  }
  write_manifest(out_dir + "/run", nws::to_json(cfg));

  std::cout << "baseline final acc: " << report.baseline_final_accuracy
            << "\nadaptive final acc: " << report.adaptive_final_accuracy
            << '\n';
  if (report.reached) {
    std::cout << "reached baseline acc at iter " << report.reach_iter
              << " (examples speedup " << report.speedup_examples << "x)\n";
  } else {
    std::cout << "baseline accuracy not reached\n";
  }
  return 0;
}

int cmd_compare(const std::string& baseline_path, const std::string& adaptive_path,
                const std::string& output) {
  std::ifstream b(baseline_path), a(adaptive_path);
  if (!b) throw std::runtime_error("cannot open " + baseline_path);
  if (!a) throw std::runtime_error("cannot open " + adaptive_path);
  const auto baseline = nws::read_metrics_csv(b);
  const auto adaptive = nws::read_metrics_csv(a);
  const auto report = nws::compare_runs(baseline, adaptive);
  auto out = open_output(output);
  out << nws::to_json(report).dump(2) << '\n';
  write_manifest(output, json{{"subcommand", "compare"},
                              {"baseline", baseline_path},
                              {"adaptive", adaptive_path}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nadaraya-Watson sketch: kernel regression sketches and "
               "sketch-driven importance sampling"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  SketchBuildArgs build_args;
  auto* build = app.add_subcommand("sketch-build", "build a sketch from a CSV");
  build->add_option("--data", build_args.data_path, "training CSV")->required();
  build->add_option("--target-col", build_args.target_column, "target column");
  build->add_flag("--header", build_args.has_header, "CSV has a header row");
  build->add_option("--bits", build_args.bits, "SRP code length");
  build->add_option("-R,--rows", build_args.rows, "sketch rows");
  build->add_option("--y-bound", build_args.y_bound, "clip |y| to this bound");
  build->add_option("--seed", build_args.seed, "master seed");
  build->add_option("--output", build_args.output, "snapshot path");

  std::string snapshot_path, queries_path, query_output = "estimates.csv";
  auto* query = app.add_subcommand("sketch-query", "query a sketch snapshot");
  query->add_option("--snapshot", snapshot_path, "snapshot file")->required();
  query->add_option("--queries", queries_path, "CSV of query rows")->required();
  query->add_option("--output", query_output, "estimates CSV");

  RegressBenchArgs bench_args;
  auto* bench = app.add_subcommand(
      "regress-bench", "NWS vs ordinary least squares on a regression dataset");
  bench->add_option("--data", bench_args.data_path,
                    "CSV path (omit for the bundled synthetic task)");
  bench->add_option("--target-col", bench_args.target_column, "target column");
  bench->add_flag("--header", bench_args.has_header, "CSV has a header row");
  bench->add_option("-R,--rows", bench_args.rows_list, "comma-separated R list");
  bench->add_option("--bits", bench_args.bits, "SRP code length");
  bench->add_option("--test-fraction", bench_args.test_fraction, "test split");
  bench->add_option("--seed", bench_args.seed, "split/hash seed");
  bench->add_option("--output", bench_args.output, "results CSV");
  bench->add_option("--synth-n", bench_args.synth_n, "synthetic dataset size");
  bench->add_option("--synth-dim", bench_args.synth_dim, "synthetic dimension");

  ErrorStudyArgs study_args;
  auto* study = app.add_subcommand(
      "error-study", "sketch-vs-oracle error quantiles and theoretical bound");
  study->add_option("--bits", study_args.bits, "SRP code length");
  study->add_option("-R,--rows", study_args.rows_list, "comma-separated R list");
  study->add_option("--delta", study_args.delta, "failure probability");
  study->add_option("--n-train", study_args.n_train, "training points");
  study->add_option("--n-test", study_args.n_test, "test queries");
  study->add_option("--seeds", study_args.seeds, "independent sketch seeds");
  study->add_option("--dim", study_args.dim, "input dimension");
  study->add_option("--seed", study_args.seed, "base seed");
  study->add_option("--output", study_args.output, "results CSV");

  std::string demo_config, demo_out = "train_demo";
  std::uint64_t demo_seed = 0;
  auto* demo = app.add_subcommand(
      "train-demo", "baseline vs sketch-sampled training on one config");
  demo->add_option("--config", demo_config, "JSON run config");
  demo->add_option("--output", demo_out, "output directory");
  auto* seed_opt = demo->add_option("--seed", demo_seed, "override config seed");

  std::string cmp_baseline, cmp_adaptive, cmp_output = "report.json";
  auto* cmp = app.add_subcommand("compare", "compare two metric streams");
  cmp->add_option("--baseline", cmp_baseline, "baseline metrics CSV")->required();
  cmp->add_option("--adaptive", cmp_adaptive, "adaptive metrics CSV")->required();
  cmp->add_option("--output", cmp_output, "report JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (build->parsed()) return cmd_sketch_build(build_args);
    if (query->parsed()) {
      return cmd_sketch_query(snapshot_path, queries_path, query_output);
    }
    if (bench->parsed()) return cmd_regress_bench(bench_args);
    if (study->parsed()) return cmd_error_study(study_args);
    if (demo->parsed()) {
      return cmd_train_demo(demo_config, demo_out, demo_seed,
                            seed_opt->count() > 0);
    }
    if (cmp->parsed()) return cmd_compare(cmp_baseline, cmp_adaptive, cmp_output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
