// Command-line front end: `iwtl synth|weights|run`.
//
// Exit codes (stable contract): 0 success, 1 runtime failure,
// 2 usage/config error.

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "iwtl/bench.hpp"
#include "iwtl/density_ratio.hpp"
#include "iwtl/manifest.hpp"
#include "iwtl/pipeline.hpp"
#include "iwtl/synth.hpp"
#include "iwtl/task_relevance.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

std::string fmt(double v) { return json(v).dump(); }

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  iwtl::ShiftScenario scenario;
  std::string kind_name = "mean-shift";
  double positive_rate = -1.0;  // < 0: not given; otherwise sets both rates
  double positive_rate_source = -1.0;
  double positive_rate_target = -1.0;
  std::string out_dir;
};

int cmd_synth(SynthArgs args) {
  try {
    args.scenario.kind = iwtl::scenario_kind_from_name(args.kind_name);
    if (args.positive_rate >= 0.0) {
      args.scenario.positive_rate_source = args.positive_rate;
      args.scenario.positive_rate_target = args.positive_rate;
    }
    if (args.positive_rate_source >= 0.0)
      args.scenario.positive_rate_source = args.positive_rate_source;
    if (args.positive_rate_target >= 0.0)
      args.scenario.positive_rate_target = args.positive_rate_target;
    args.scenario.validate();
  } catch (const iwtl::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }

  try {
    const iwtl::SynthOutput data = iwtl::synth_shift(args.scenario);
    const fs::path dir(args.out_dir);
    fs::create_directories(dir);
    data.source.save_csv(dir / "source.csv");
    data.target_train.save_csv(dir / "target_train.csv");
    data.target_test.save_csv(dir / "target_test.csv");

    iwtl::RunManifest manifest;
    manifest.command = "synth";
    manifest.config_json = iwtl::scenario_to_json(args.scenario);
    manifest.seeds = {args.scenario.seed};
    for (const char* name : {"source.csv", "target_train.csv", "target_test.csv"})
      manifest.outputs.push_back({name, iwtl::digest_file(dir / name)});
    iwtl::write_text_file(dir / "manifest.json", iwtl::manifest_to_json(manifest));

    std::printf("wrote %s: source n=%lld, target_train n=%lld, target_test n=%lld (d=%lld)\n",
                args.out_dir.c_str(),
                static_cast<long long>(data.source.n()),
                static_cast<long long>(data.target_train.n()),
                static_cast<long long>(data.target_test.n()),
                static_cast<long long>(data.source.dim()));
    return kExitOk;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}

// ---------------------------------------------------------------------------
// weights

struct WeightsArgs {
  std::string source_path;
  std::string target_path;
  std::string method = "hybrid";
  std::string out_path = "weights.csv";
  std::string negative_policy = "clamp_zero";
  std::string combine_scale = "raw_sum";
  iwtl::PipelineConfig pipeline;
};

void print_weight_summary(const char* label, const Eigen::VectorXd& w,
                          double clip_max) {
  const auto n = static_cast<double>(w.size());
  const double clipped =
      n > 0 ? static_cast<double>((w.array() == clip_max).count()) / n : 0.0;
  const double clamped =
      n > 0 ? static_cast<double>((w.array() == 0.0).count()) / n : 0.0;
  std::printf("%s: n=%lld min=%s mean=%s max=%s fraction_clipped=%s fraction_clamped=%s\n",
              label, static_cast<long long>(w.size()), fmt(w.minCoeff()).c_str(),
              fmt(w.mean()).c_str(), fmt(w.maxCoeff()).c_str(),
              fmt(clipped).c_str(), fmt(clamped).c_str());
}

int cmd_weights(WeightsArgs args) {
  args.pipeline.hybrid.negative_policy = args.negative_policy == "allow"
                                             ? iwtl::NegativePolicy::Allow
                                             : iwtl::NegativePolicy::ClampZero;
  args.pipeline.hybrid.combine_scale = args.combine_scale == "standardized_sum"
                                           ? iwtl::CombineScale::StandardizedSum
                                           : iwtl::CombineScale::RawSum;
  try {
    const iwtl::Dataset source_raw = iwtl::Dataset::load_csv(args.source_path);
    const iwtl::Dataset target_raw = iwtl::Dataset::load_csv(args.target_path);
    if (source_raw.dim() != target_raw.dim())
      throw iwtl::Error("source and target dimension mismatch");

    // Same frame the pipeline uses: standardizer fit on the pooled rows.
    const iwtl::Standardizer std_fit =
        iwtl::Standardizer::fit({&source_raw, &target_raw});
    const iwtl::Dataset source = std_fit.apply(source_raw);
    const iwtl::Dataset target = std_fit.apply(target_raw);

    if (args.method == "discriminative") {
      const iwtl::LinearDiscriminator disc = iwtl::fit_domain_discriminator(
          source, target, args.pipeline.discriminator_l2,
          args.pipeline.discriminator_balance);
      const iwtl::WeightBatch batch = iwtl::domain_weights(disc, source.x);
      iwtl::write_weight_csv(args.out_path, batch.values);
      print_weight_summary("w_domain", batch.values,
                           args.pipeline.hybrid.clip_max);
    } else if (args.method == "gaussian") {
      const iwtl::GaussianDomainModel model = iwtl::fit_gaussian_model(
          source, target, args.pipeline.gaussian_ridge);
      const iwtl::WeightBatch batch = iwtl::gaussian_weights(model, source.x);
      iwtl::write_weight_csv(args.out_path, batch.values);
      print_weight_summary("w_gaussian", batch.values,
                           args.pipeline.hybrid.clip_max);
    } else {  // hybrid
      const iwtl::HybridWeightDetail detail =
          iwtl::build_hybrid_weights(source, target, args.pipeline);
      std::string csv = "w_domain,w_task,w_final\n";
      for (Eigen::Index i = 0; i < detail.final.values.size(); ++i) {
        csv += fmt(detail.domain[i]) + ',' + fmt(detail.task[i]) + ',' +
               fmt(detail.final.values[i]) + '\n';
      }
      print_weight_summary("w_final", detail.final.values,
                           args.pipeline.hybrid.clip_max);
      iwtl::write_text_file(args.out_path, csv);
    }

    iwtl::RunManifest manifest;
    manifest.command = "weights";
    manifest.config_json =
        json{{"method", args.method},
             {"negative_policy", args.negative_policy},
             {"combine_scale", args.combine_scale},
             {"clip_max", args.pipeline.hybrid.clip_max},
             {"discriminator_l2", args.pipeline.discriminator_l2},
             {"discriminator_balance", args.pipeline.discriminator_balance},
             {"gaussian_ridge", args.pipeline.gaussian_ridge}}
            .dump(2) +
        "\n";
    manifest.inputs.push_back({args.source_path, iwtl::digest_file(args.source_path)});
    manifest.inputs.push_back({args.target_path, iwtl::digest_file(args.target_path)});
    manifest.outputs.push_back({args.out_path, iwtl::digest_file(args.out_path)});
    const fs::path manifest_path =
        fs::path(args.out_path).replace_extension(".manifest.json");
    iwtl::write_text_file(manifest_path, iwtl::manifest_to_json(manifest));
    return kExitOk;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}

// ---------------------------------------------------------------------------
// run

struct RunArgs {
  std::string config_path;  // bench config or run manifest; empty = defaults
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int jobs = 0;  // 0: keep config value
  bool dry_run = false;
};

int cmd_run(const RunArgs& args) {
  iwtl::BenchConfig config;
  try {
    config = iwtl::BenchConfig::defaults();
    if (!args.config_path.empty()) {
      const std::string text = iwtl::load_text_file(args.config_path);
      json peek;
      try {
        peek = json::parse(text);
      } catch (const json::exception& e) {
        throw iwtl::Error(std::string("config: invalid JSON: ") + e.what());
      }
      if (peek.is_object() && peek.value("kind", "") == "run_manifest") {
        const iwtl::RunManifest manifest = iwtl::manifest_from_json(text);
        if (manifest.command != "run")
          throw iwtl::Error("config: manifest was produced by '" +
                            manifest.command + "', not 'run'");
        config = iwtl::bench_config_from_json(manifest.config_json);
      } else {
        config = iwtl::bench_config_from_json(text);
      }
    }
    if (args.seed_given) config.seeds = {args.seed};
    if (args.jobs > 0) config.jobs = args.jobs;
    config.validate();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }

  const std::string resolved = iwtl::bench_config_to_json(config);
  if (args.dry_run) {
    std::printf("%s", resolved.c_str());
    std::printf("plan: %zu seed(s) x %zu baseline(s)%s, %d job(s); no training performed\n",
                config.seeds.size(), config.baselines.size(),
                config.include_sweep ? " + alpha sweep" : "", config.jobs);
    return kExitOk;
  }

  try {
    const iwtl::EvalReport report = iwtl::run_benchmark(config);

    const fs::path dir(args.out_dir);
    fs::create_directories(dir);
    iwtl::write_text_file(dir / "report.json", iwtl::report_to_json(report));

    iwtl::RunManifest manifest;
    manifest.command = "run";
    manifest.config_json = resolved;
    manifest.seeds = config.seeds;
    if (!args.config_path.empty())
      manifest.inputs.push_back(
          {args.config_path, iwtl::digest_file(args.config_path)});
    manifest.outputs.push_back(
        {"report.json", iwtl::digest_file(dir / "report.json")});
    if (!report.mean_sweep.empty()) {
      iwtl::write_text_file(dir / "sweep.csv",
                            iwtl::sweep_to_csv(report.mean_sweep));
      manifest.outputs.push_back(
          {"sweep.csv", iwtl::digest_file(dir / "sweep.csv")});
    }
    iwtl::write_text_file(dir / "manifest.json",
                          iwtl::manifest_to_json(manifest));

    int failures = 0;
    for (const auto& agg : report.aggregates) {
      std::printf("%-12s n=%2d macro_f1=%s +/- %s\n",
                  iwtl::baseline_name(agg.kind), agg.n_seeds,
                  fmt(agg.macro_f1.mean).c_str(), fmt(agg.macro_f1.sd).c_str());
    }
    for (const auto& test : report.ordering)
      std::printf("hybrid vs %-12s wins=%d losses=%d ties=%d p=%s\n",
                  iwtl::baseline_name(test.versus), test.wins, test.losses,
                  test.ties, fmt(test.p_value).c_str());
    for (const auto& sr : report.seeds)
      for (const auto& row : sr.baselines)
        if (row.failed) ++failures;
    if (failures > 0) {
      std::fprintf(stderr,
                   "error: %d baseline run(s) failed; details in %s\n",
                   failures, (dir / "report.json").string().c_str());
      return kExitRuntime;
    }
    return kExitOk;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Instance-weighted transfer learning toolkit"};
  app.set_version_flag("--version", iwtl::kToolVersion);
  app.require_subcommand(1);

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand(
      "synth", "Generate a synthetic domain-shift dataset triple");
  synth->add_option("--kind", synth_args.kind_name, "Scenario kind")
      ->check(CLI::IsMember({"mean-shift", "covariance-shift",
                             "label-ratio-shift", "missing-subclass"}));
  synth->add_option("--d", synth_args.scenario.d, "Feature dimension")
      ->check(CLI::Range(Eigen::Index{1}, Eigen::Index{1000000}));
  synth->add_option("--n-source", synth_args.scenario.n_source,
                    "Source sample count")
      ->check(CLI::PositiveNumber);
  synth->add_option("--n-target-train", synth_args.scenario.n_target_train,
                    "Target training sample count")
      ->check(CLI::PositiveNumber);
  synth->add_option("--n-target-test", synth_args.scenario.n_target_test,
                    "Target test sample count")
      ->check(CLI::PositiveNumber);
  synth->add_option("--shift-magnitude", synth_args.scenario.shift_magnitude,
                    "Shift strength (meaning depends on kind)")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--positive-rate", synth_args.positive_rate,
                    "Positive-class rate for both domains, in (0, 1)")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--positive-rate-source", synth_args.positive_rate_source,
                    "Source positive-class rate, in (0, 1)")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--positive-rate-target", synth_args.positive_rate_target,
                    "Target positive-class rate, in (0, 1)")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--seed", synth_args.scenario.seed, "Root seed");
  synth->add_option("--out", synth_args.out_dir, "Output directory")
      ->required();

  WeightsArgs weights_args;
  CLI::App* weights = app.add_subcommand(
      "weights", "Compute source-sample importance weights");
  weights->add_option("--source", weights_args.source_path, "Source CSV")
      ->required();
  weights->add_option("--target", weights_args.target_path, "Target CSV")
      ->required();
  weights->add_option("--method", weights_args.method, "Weighting method")
      ->check(CLI::IsMember({"discriminative", "gaussian", "hybrid"}));
  weights->add_option("--out", weights_args.out_path, "Output CSV path");
  weights->add_option("--clip-max", weights_args.pipeline.hybrid.clip_max,
                      "Upper clip for final weights")
      ->check(CLI::Range(1.0, 1e12));
  weights->add_option("--negative-policy", weights_args.negative_policy,
                      "Treatment of negative combined weights")
      ->check(CLI::IsMember({"clamp_zero", "allow"}));
  weights->add_option("--combine-scale", weights_args.combine_scale,
                      "Scale handling when summing domain and task weights")
      ->check(CLI::IsMember({"raw_sum", "standardized_sum"}));
  weights->add_option("--discriminator-l2",
                      weights_args.pipeline.discriminator_l2,
                      "L2 strength of the domain discriminator")
      ->check(CLI::PositiveNumber);
  weights->add_flag("!--no-balance", weights_args.pipeline.discriminator_balance,
                    "Disable class balancing in the domain discriminator");
  weights->add_option("--gaussian-ridge", weights_args.pipeline.gaussian_ridge,
                      "Covariance ridge for the Gaussian method")
      ->check(CLI::NonNegativeNumber);
  weights->add_option("--boosting-rounds",
                      weights_args.pipeline.hp.boosting_rounds,
                      "Rounds of the union model behind task weights")
      ->check(CLI::PositiveNumber);
  weights->add_option("--learning-rate", weights_args.pipeline.hp.learning_rate,
                      "Learning rate of the union model")
      ->check(CLI::PositiveNumber);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand(
      "run", "Run the benchmark described by a config file");
  run->add_option("--config", run_args.config_path,
                  "Bench config JSON, or a run manifest to reproduce");
  run->add_option("--out", run_args.out_dir, "Output directory")->required();
  CLI::Option* seed_opt =
      run->add_option("--seed", run_args.seed, "Override: run this single seed");
  run->add_option("--jobs", run_args.jobs, "Override: worker thread count")
      ->check(CLI::PositiveNumber);
  run->add_flag("--dry-run", run_args.dry_run,
                "Validate and print the resolved plan without training");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message naming the offending flag
    return kExitUsage;
  }

  run_args.seed_given = seed_opt->count() > 0;
  if (synth->parsed()) return cmd_synth(synth_args);
  if (weights->parsed()) return cmd_weights(weights_args);
  if (run->parsed()) return cmd_run(run_args);
  return kExitUsage;
}
