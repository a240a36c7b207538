#include "iwtl/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>
#include <utility>

#include <nlohmann/json.hpp>

#include "iwtl/density_ratio.hpp"
#include "iwtl/learner.hpp"

namespace iwtl {
namespace {

using nlohmann::json;

// Shortest decimal form that parses back to the identical double; keeps CSV
// cells as stable under rerun comparison as the JSON output.
std::string double_repr(double v) { return json(v).dump(); }

void check_keys(const json& j, const char* context,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw Error(std::string("config: unknown key '") + item.key() + "' in " +
                  context);
  }
}

const char* learner_kind_name(LearnerKind k) {
  return k == LearnerKind::LogReg ? "logreg" : "boosted_stumps";
}

LearnerKind learner_kind_from_name(const std::string& name) {
  if (name == "logreg") return LearnerKind::LogReg;
  if (name == "boosted_stumps") return LearnerKind::BoostedStumps;
  throw Error("config: unknown learner: " + name);
}

json pipeline_to_json(const PipelineConfig& p) {
  return json{{"learner", learner_kind_name(p.hp.learner)},
              {"l2_reg", p.hp.l2_reg},
              {"grad_tolerance", p.hp.grad_tolerance},
              {"max_iterations", p.hp.max_iterations},
              {"boosting_rounds", p.hp.boosting_rounds},
              {"learning_rate", p.hp.learning_rate},
              {"min_child_hessian", p.hp.min_child_hessian},
              {"hybrid",
               {{"clip_max", p.hybrid.clip_max},
                {"negative_policy",
                 p.hybrid.negative_policy == NegativePolicy::ClampZero
                     ? "clamp_zero"
                     : "allow"},
                {"combine_scale",
                 p.hybrid.combine_scale == CombineScale::RawSum
                     ? "raw_sum"
                     : "standardized_sum"}}},
              {"discriminator_l2", p.discriminator_l2},
              {"discriminator_balance", p.discriminator_balance},
              {"gaussian_ridge", p.gaussian_ridge}};
}

PipelineConfig pipeline_from_json(const json& j) {
  check_keys(j, "pipeline",
             {"learner", "l2_reg", "grad_tolerance", "max_iterations",
              "boosting_rounds", "learning_rate", "min_child_hessian", "hybrid",
              "discriminator_l2", "discriminator_balance", "gaussian_ridge"});
  PipelineConfig p;
  if (j.contains("learner"))
    p.hp.learner = learner_kind_from_name(j.at("learner").get<std::string>());
  p.hp.l2_reg = j.value("l2_reg", p.hp.l2_reg);
  p.hp.grad_tolerance = j.value("grad_tolerance", p.hp.grad_tolerance);
  p.hp.max_iterations = j.value("max_iterations", p.hp.max_iterations);
  p.hp.boosting_rounds = j.value("boosting_rounds", p.hp.boosting_rounds);
  p.hp.learning_rate = j.value("learning_rate", p.hp.learning_rate);
  p.hp.min_child_hessian = j.value("min_child_hessian", p.hp.min_child_hessian);
  if (j.contains("hybrid")) {
    const json& h = j.at("hybrid");
    check_keys(h, "pipeline.hybrid",
               {"clip_max", "negative_policy", "combine_scale"});
    p.hybrid.clip_max = h.value("clip_max", p.hybrid.clip_max);
    if (h.contains("negative_policy")) {
      const auto name = h.at("negative_policy").get<std::string>();
      if (name == "clamp_zero")
        p.hybrid.negative_policy = NegativePolicy::ClampZero;
      else if (name == "allow")
        p.hybrid.negative_policy = NegativePolicy::Allow;
      else
        throw Error("config: unknown negative_policy: " + name);
    }
    if (h.contains("combine_scale")) {
      const auto name = h.at("combine_scale").get<std::string>();
      if (name == "raw_sum")
        p.hybrid.combine_scale = CombineScale::RawSum;
      else if (name == "standardized_sum")
        p.hybrid.combine_scale = CombineScale::StandardizedSum;
      else
        throw Error("config: unknown combine_scale: " + name);
    }
  }
  p.discriminator_l2 = j.value("discriminator_l2", p.discriminator_l2);
  p.discriminator_balance =
      j.value("discriminator_balance", p.discriminator_balance);
  p.gaussian_ridge = j.value("gaussian_ridge", p.gaussian_ridge);
  return p;
}

json metrics_to_json(const Metrics& m) {
  return json{{"precision", m.precision},
              {"recall", m.recall},
              {"macro_f1", m.macro_f1},
              {"accuracy", m.accuracy},
              {"confusion",
               {{"tp", m.confusion.tp},
                {"fp", m.confusion.fp},
                {"fn", m.confusion.fn},
                {"tn", m.confusion.tn}}}};
}

json config_to_json_object(const BenchConfig& c) {
  json baselines = json::array();
  for (BaselineKind k : c.baselines) baselines.push_back(baseline_name(k));
  return json{{"schema_version", 1},
              {"scenario", json::parse(scenario_to_json(c.scenario))},
              {"baselines", baselines},
              {"alpha_grid", c.alpha_grid},
              {"cv_folds", c.cv_folds},
              {"seeds", c.seeds},
              {"invert_source_labels", c.invert_source_labels},
              {"include_sweep", c.include_sweep},
              {"jobs", c.jobs},
              {"pipeline", pipeline_to_json(c.pipeline)}};
}

BenchConfig config_from_json_object(const json& j) {
  check_keys(j, "config",
             {"schema_version", "scenario", "baselines", "alpha_grid",
              "cv_folds", "seeds", "invert_source_labels", "include_sweep",
              "jobs", "pipeline"});
  if (j.value("schema_version", 1) != 1)
    throw Error("config: unsupported schema_version");
  BenchConfig c = BenchConfig::defaults();
  if (j.contains("scenario"))
    c.scenario = scenario_from_json(j.at("scenario").dump());
  if (j.contains("baselines")) {
    c.baselines.clear();
    for (const auto& name : j.at("baselines"))
      c.baselines.push_back(baseline_from_name(name.get<std::string>()));
  }
  if (j.contains("alpha_grid"))
    c.alpha_grid = j.at("alpha_grid").get<std::vector<double>>();
  c.cv_folds = j.value("cv_folds", c.cv_folds);
  if (j.contains("seeds"))
    c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  c.invert_source_labels = j.value("invert_source_labels", c.invert_source_labels);
  c.include_sweep = j.value("include_sweep", c.include_sweep);
  c.jobs = j.value("jobs", c.jobs);
  if (j.contains("pipeline")) c.pipeline = pipeline_from_json(j.at("pipeline"));
  c.validate();
  return c;
}

WeightSummary summarize_weights(const Eigen::VectorXd& w, double clip_max) {
  WeightSummary s;
  if (w.size() == 0) return s;
  s.min = w.minCoeff();
  s.mean = w.mean();
  s.max = w.maxCoeff();
  const auto n = static_cast<double>(w.size());
  s.fraction_clipped = static_cast<double>((w.array() == clip_max).count()) / n;
  s.fraction_clamped = static_cast<double>((w.array() == 0.0).count()) / n;
  return s;
}

SeedResult run_one_seed(const BenchConfig& config, std::uint64_t seed) {
  SeedResult result;
  result.seed = seed;
  result.baselines.resize(config.baselines.size());
  for (std::size_t bi = 0; bi < config.baselines.size(); ++bi)
    result.baselines[bi].kind = config.baselines[bi];

  ShiftScenario scenario = config.scenario;
  scenario.seed = seed;

  try {
    SynthOutput data = synth_shift(scenario);
    if (config.invert_source_labels)
      data.source.y = (1 - data.source.y.array()).matrix();

    const Standardizer std_fit =
        Standardizer::fit({&data.source, &data.target_train});
    const Dataset source = std_fit.apply(data.source);
    const Dataset train = std_fit.apply(data.target_train);
    const Dataset test = std_fit.apply(data.target_test);

    result.truth.assign(test.y.data(), test.y.data() + test.y.size());

    const double pool_alpha =
        static_cast<double>(train.n()) /
        static_cast<double>(train.n() + source.n());

    for (std::size_t bi = 0; bi < config.baselines.size(); ++bi) {
      BaselineResult& row = result.baselines[bi];
      try {
        WeightVector w;
        if (row.kind == BaselineKind::Hybrid) {
          const HybridWeightDetail detail =
              build_hybrid_weights(source, train, config.pipeline);
          w = detail.final;
          row.weights = summarize_weights(w.values, config.pipeline.hybrid.clip_max);
          row.weights.fraction_clamped = detail.fraction_clamped;
          row.weights.fraction_clipped = detail.fraction_clipped;
        } else {
          w = weights_for_baseline(row.kind, source, train, config.pipeline);
          row.weights = summarize_weights(w.values, config.pipeline.hybrid.clip_max);
        }

        switch (row.kind) {
          case BaselineKind::TargetOnly: row.alpha = 1.0; break;
          case BaselineKind::SourceOnly: row.alpha = 0.0; break;
          case BaselineKind::Union: row.alpha = pool_alpha; break;
          default: {
            const AlphaSelection sel =
                select_alpha(source, train, w, config.alpha_grid,
                             config.cv_folds, config.pipeline.hp, seed);
            row.alpha = sel.alpha;
            row.alpha_from_cv = true;
          }
        }

        const Model model =
            train_blend(train, source, w, row.alpha, config.pipeline.hp);
        row.metrics = evaluate(model, test);
        const Eigen::VectorXi pred = predict_labels(model, test.x);
        row.predictions.assign(pred.data(), pred.data() + pred.size());
      } catch (const std::exception& e) {
        row.failed = true;
        row.error = e.what();
      }
    }

    if (config.include_sweep) {
      try {
        result.sweep = alpha_sweep(source, train, test, config.alpha_grid,
                                   config.pipeline);
      } catch (const std::exception& e) {
        result.sweep.clear();
        for (BaselineResult& row : result.baselines)
          if (row.kind == BaselineKind::Hybrid && !row.failed) {
            row.failed = true;
            row.error = std::string("alpha sweep: ") + e.what();
          }
      }
    }
  } catch (const std::exception& e) {
    for (BaselineResult& row : result.baselines) {
      row.failed = true;
      row.error = e.what();
    }
  }
  return result;
}

MetricAggregate aggregate_metric(const std::vector<double>& values) {
  MetricAggregate a;
  if (values.empty()) return a;
  const auto n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / n;
  double sq = 0.0;
  for (double v : values) sq += (v - a.mean) * (v - a.mean);
  a.sd = std::sqrt(sq / n);
  return a;
}

}  // namespace

BenchConfig BenchConfig::defaults() {
  BenchConfig c;
  c.baselines = {BaselineKind::TargetOnly, BaselineKind::SourceOnly,
                 BaselineKind::Union,      BaselineKind::AllOnes,
                 BaselineKind::Gaussian,   BaselineKind::Hybrid};
  c.alpha_grid.resize(11);
  for (int i = 0; i <= 10; ++i) c.alpha_grid[static_cast<std::size_t>(i)] = i / 10.0;
  c.seeds.resize(20);
  for (int i = 0; i < 20; ++i) c.seeds[static_cast<std::size_t>(i)] = static_cast<std::uint64_t>(i + 1);
  return c;
}

void BenchConfig::validate() const {
  scenario.validate();
  if (baselines.empty()) throw Error("config: baselines must be nonempty");
  std::set<BaselineKind> unique_baselines(baselines.begin(), baselines.end());
  if (unique_baselines.size() != baselines.size())
    throw Error("config: duplicate baseline");
  if (alpha_grid.empty()) throw Error("config: alpha_grid must be nonempty");
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    if (!(alpha_grid[i] >= 0.0 && alpha_grid[i] <= 1.0))
      throw Error("config: alpha_grid values must lie in [0, 1]");
    if (i > 0 && !(alpha_grid[i] > alpha_grid[i - 1]))
      throw Error("config: alpha_grid must be strictly increasing");
  }
  if (cv_folds < 2) throw Error("config: cv_folds must be >= 2");
  if (seeds.empty()) throw Error("config: seeds must be nonempty");
  std::set<std::uint64_t> unique_seeds(seeds.begin(), seeds.end());
  if (unique_seeds.size() != seeds.size())
    throw Error("config: duplicate seed");
  if (jobs < 1) throw Error("config: jobs must be >= 1");
  if (pipeline.hybrid.clip_max < 1.0)
    throw Error("config: clip_max must be >= 1");
  if (pipeline.hp.boosting_rounds < 1)
    throw Error("config: boosting_rounds must be >= 1");
  if (!(pipeline.hp.learning_rate > 0.0))
    throw Error("config: learning_rate must be > 0");
  if (pipeline.hp.max_iterations < 1)
    throw Error("config: max_iterations must be >= 1");
  if (!(pipeline.hp.l2_reg >= 0.0)) throw Error("config: l2_reg must be >= 0");
  if (!(pipeline.hp.grad_tolerance > 0.0))
    throw Error("config: grad_tolerance must be > 0");
  if (!(pipeline.hp.min_child_hessian >= 0.0))
    throw Error("config: min_child_hessian must be >= 0");
  if (!(pipeline.discriminator_l2 > 0.0))
    throw Error("config: discriminator_l2 must be > 0");
  if (!(pipeline.gaussian_ridge >= 0.0))
    throw Error("config: gaussian_ridge must be >= 0");
}

std::string bench_config_to_json(const BenchConfig& config) {
  return config_to_json_object(config).dump(2) + "\n";
}

BenchConfig bench_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("config: invalid JSON: ") + e.what());
  }
  try {
    return config_from_json_object(j);
  } catch (const json::exception& e) {
    throw Error(std::string("config: ") + e.what());
  }
}

double sign_test_p(int wins, int losses) {
  const int n = wins + losses;
  if (n <= 0) return 1.0;
  // P(Bin(n, 1/2) >= wins) with running binomial coefficients.
  double coeff = 1.0;  // C(n, 0)
  double tail = 0.0;
  for (int i = 0; i <= n; ++i) {
    if (i >= wins) tail += coeff;
    coeff = coeff * static_cast<double>(n - i) / static_cast<double>(i + 1);
  }
  return std::min(1.0, tail * std::pow(0.5, n));
}

EvalReport run_benchmark(const BenchConfig& config) {
  config.validate();

  EvalReport report;
  report.config = config;
  report.seeds.resize(config.seeds.size());

  const auto n_seeds = report.seeds.size();
  const int jobs = static_cast<int>(
      std::min<std::size_t>(static_cast<std::size_t>(config.jobs), n_seeds));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n_seeds; ++i)
      report.seeds[i] = run_one_seed(config, config.seeds[i]);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&report, &config, &next, n_seeds] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n_seeds) return;
        report.seeds[i] = run_one_seed(config, config.seeds[i]);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  // Per-baseline aggregates over succeeding seeds, in config order.
  for (std::size_t bi = 0; bi < config.baselines.size(); ++bi) {
    BaselineAggregate agg;
    agg.kind = config.baselines[bi];
    std::vector<double> precision, recall, macro_f1, accuracy;
    for (const SeedResult& sr : report.seeds) {
      const BaselineResult& row = sr.baselines[bi];
      if (row.failed) continue;
      precision.push_back(row.metrics.precision);
      recall.push_back(row.metrics.recall);
      macro_f1.push_back(row.metrics.macro_f1);
      accuracy.push_back(row.metrics.accuracy);
    }
    agg.n_seeds = static_cast<int>(macro_f1.size());
    agg.precision = aggregate_metric(precision);
    agg.recall = aggregate_metric(recall);
    agg.macro_f1 = aggregate_metric(macro_f1);
    agg.accuracy = aggregate_metric(accuracy);
    report.aggregates.push_back(agg);
  }

  // Hybrid-versus-others paired sign tests on macro-F1.
  const auto hybrid_it = std::find(config.baselines.begin(),
                                   config.baselines.end(), BaselineKind::Hybrid);
  if (hybrid_it != config.baselines.end()) {
    const auto hi =
        static_cast<std::size_t>(hybrid_it - config.baselines.begin());
    for (std::size_t bi = 0; bi < config.baselines.size(); ++bi) {
      if (bi == hi) continue;
      OrderingTest test;
      test.versus = config.baselines[bi];
      for (const SeedResult& sr : report.seeds) {
        const BaselineResult& hyb = sr.baselines[hi];
        const BaselineResult& other = sr.baselines[bi];
        if (hyb.failed || other.failed) continue;
        if (hyb.metrics.macro_f1 > other.metrics.macro_f1)
          ++test.wins;
        else if (hyb.metrics.macro_f1 < other.metrics.macro_f1)
          ++test.losses;
        else
          ++test.ties;
      }
      test.p_value = sign_test_p(test.wins, test.losses);
      report.ordering.push_back(test);
    }
  }

  // Mean sweep curve over seeds that produced one.
  if (config.include_sweep) {
    std::vector<const std::vector<SweepPoint>*> curves;
    for (const SeedResult& sr : report.seeds)
      if (sr.sweep.size() == config.alpha_grid.size()) curves.push_back(&sr.sweep);
    if (!curves.empty()) {
      for (std::size_t gi = 0; gi < config.alpha_grid.size(); ++gi) {
        SweepPoint mean_point;
        mean_point.alpha = config.alpha_grid[gi];
        const auto n = static_cast<double>(curves.size());
        for (const auto* curve : curves) {
          mean_point.metrics.precision += (*curve)[gi].metrics.precision / n;
          mean_point.metrics.recall += (*curve)[gi].metrics.recall / n;
          mean_point.metrics.macro_f1 += (*curve)[gi].metrics.macro_f1 / n;
          mean_point.metrics.accuracy += (*curve)[gi].metrics.accuracy / n;
        }
        report.mean_sweep.push_back(mean_point);
      }
    }
  }

  return report;
}

std::string report_to_json(const EvalReport& report) {
  json seeds = json::array();
  for (const SeedResult& sr : report.seeds) {
    json baselines = json::array();
    for (const BaselineResult& row : sr.baselines) {
      json b{{"baseline", baseline_name(row.kind)}, {"failed", row.failed}};
      if (row.failed) {
        b["error"] = row.error;
      } else {
        b["alpha"] = row.alpha;
        b["alpha_from_cv"] = row.alpha_from_cv;
        b["metrics"] = metrics_to_json(row.metrics);
        b["weights"] = json{{"min", row.weights.min},
                            {"mean", row.weights.mean},
                            {"max", row.weights.max},
                            {"fraction_clipped", row.weights.fraction_clipped},
                            {"fraction_clamped", row.weights.fraction_clamped}};
        b["predictions"] = row.predictions;
      }
      baselines.push_back(std::move(b));
    }
    json sweep = json::array();
    for (const SweepPoint& p : sr.sweep)
      sweep.push_back(json{{"alpha", p.alpha}, {"metrics", metrics_to_json(p.metrics)}});
    seeds.push_back(json{{"seed", sr.seed},
                         {"truth", sr.truth},
                         {"baselines", std::move(baselines)},
                         {"sweep", std::move(sweep)}});
  }

  json aggregates = json::array();
  for (const BaselineAggregate& a : report.aggregates) {
    auto agg = [](const MetricAggregate& m) {
      return json{{"mean", m.mean}, {"sd", m.sd}};
    };
    aggregates.push_back(json{{"baseline", baseline_name(a.kind)},
                              {"n_seeds", a.n_seeds},
                              {"precision", agg(a.precision)},
                              {"recall", agg(a.recall)},
                              {"macro_f1", agg(a.macro_f1)},
                              {"accuracy", agg(a.accuracy)}});
  }

  json ordering = json::array();
  for (const OrderingTest& t : report.ordering)
    ordering.push_back(json{{"versus", baseline_name(t.versus)},
                            {"wins", t.wins},
                            {"losses", t.losses},
                            {"ties", t.ties},
                            {"p_value", t.p_value}});

  json mean_sweep = json::array();
  for (const SweepPoint& p : report.mean_sweep)
    mean_sweep.push_back(json{{"alpha", p.alpha},
                              {"precision", p.metrics.precision},
                              {"recall", p.metrics.recall},
                              {"macro_f1", p.metrics.macro_f1},
                              {"accuracy", p.metrics.accuracy}});

  const json doc{{"schema_version", 1},
                 {"kind", "eval_report"},
                 {"config", config_to_json_object(report.config)},
                 {"seeds", std::move(seeds)},
                 {"aggregates", std::move(aggregates)},
                 {"ordering", std::move(ordering)},
                 {"mean_sweep", std::move(mean_sweep)}};
  return doc.dump(2) + "\n";
}

std::string sweep_to_csv(const std::vector<SweepPoint>& curve) {
  std::string out = "alpha,precision,recall,macro_f1,accuracy\n";
  for (const SweepPoint& p : curve) {
    out += double_repr(p.alpha);
    out += ',';
    out += double_repr(p.metrics.precision);
    out += ',';
    out += double_repr(p.metrics.recall);
    out += ',';
    out += double_repr(p.metrics.macro_f1);
    out += ',';
    out += double_repr(p.metrics.accuracy);
    out += '\n';
  }
  return out;
}

}  // namespace iwtl
