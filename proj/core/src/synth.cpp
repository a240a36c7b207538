#include "iwtl/synth.hpp"

#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "iwtl/rng.hpp"

namespace iwtl {
namespace {

// Geometry of the class-conditional Gaussians shared by all scenario kinds.
//
// The positive class sits kClassSep away from the negative class along a
// random axis and is markedly tighter (kPositiveSigma < 1): a rare compact
// positive cluster against a broad negative background. Under MeanShift the
// translation applied to the target keeps a fixed positive projection
// kShiftAlignment onto the class axis while the remaining components are
// random. Seen from the target's frame the whole source is displaced the
// opposite way, so source positives sit closer to the target's decision
// boundary and a slice of the broad source negatives crosses it. That makes
// part of the source actively misleading rather than merely diluting, which
// is the regime where per-instance weights beat uniform pooling.
constexpr double kClassSep = 2.2;
constexpr double kShiftAlignment = 0.15;
constexpr double kPositiveSigma = 0.4;

Eigen::VectorXd random_direction(Rng& rng, Eigen::Index d) {
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = rng.next_normal();
  const double norm = v.norm();
  if (norm == 0.0) {
    v.setZero();
    v[0] = 1.0;
    return v;
  }
  return v / norm;
}

// Unit vector orthogonal to `axis` (from a fresh random draw). For d == 1 no
// orthogonal direction exists; the axis itself is returned.
Eigen::VectorXd orthogonal_direction(Rng& rng, const Eigen::VectorXd& axis) {
  if (axis.size() < 2) return axis;
  for (int attempt = 0; attempt < 16; ++attempt) {
    Eigen::VectorXd g = random_direction(rng, axis.size());
    g -= g.dot(axis) * axis;
    const double norm = g.norm();
    if (norm > 1e-8) return g / norm;
  }
  throw Error("synth_shift: failed to draw an orthogonal direction");
}

std::vector<int> draw_labels(Rng& rng, Eigen::Index n, double rate) {
  auto npos = static_cast<Eigen::Index>(std::llround(rate * static_cast<double>(n)));
  npos = std::max<Eigen::Index>(npos, 1);
  if (n >= 2) npos = std::min(npos, n - 1);
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < npos; ++i) labels[static_cast<std::size_t>(i)] = 1;
  rng.shuffle(labels);
  return labels;
}

struct PartSpec {
  double rate = 0.0;
  bool translate = false;        // MeanShift target parts
  double sigma_scale = 1.0;      // CovarianceShift target parts
  bool positives_both = false;   // MissingSubclass: draw from both clusters
};

struct Geometry {
  Eigen::VectorXd class_axis;       // negative mean -> positive mean
  Eigen::VectorXd translation;      // MeanShift displacement of target means
  Eigen::VectorXd subclass_offset;  // MissingSubclass half-separation vector
};

Dataset draw_part(Rng& rng, Eigen::Index n, Eigen::Index d, const PartSpec& spec,
                  const Geometry& geo, ScenarioKind kind) {
  const std::vector<int> labels = draw_labels(rng, n, spec.rate);

  Dataset out;
  out.x.resize(n, d);
  out.y.resize(n);
  const Eigen::VectorXd positive_mean = kClassSep * geo.class_axis;
  for (Eigen::Index i = 0; i < n; ++i) {
    const int label = labels[static_cast<std::size_t>(i)];
    out.y[i] = label;
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
    double sigma = 1.0;
    if (label == 1) {
      mu = positive_mean;
      sigma = kPositiveSigma;
      if (kind == ScenarioKind::MissingSubclass) {
        // Source positives come from one cluster only; target draws both.
        const double side =
            spec.positives_both && rng.next_below(2) == 1 ? 1.0 : -1.0;
        mu += side * geo.subclass_offset;
      }
    }
    sigma *= spec.sigma_scale;
    if (spec.translate) mu += geo.translation;
    for (Eigen::Index j = 0; j < d; ++j)
      out.x(i, j) = mu[j] + sigma * rng.next_normal();
  }
  out.validate();
  return out;
}

}  // namespace

const char* scenario_kind_name(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::MeanShift: return "mean-shift";
    case ScenarioKind::CovarianceShift: return "covariance-shift";
    case ScenarioKind::LabelRatioShift: return "label-ratio-shift";
    case ScenarioKind::MissingSubclass: return "missing-subclass";
  }
  throw Error("unknown scenario kind");
}

ScenarioKind scenario_kind_from_name(const std::string& name) {
  if (name == "mean-shift") return ScenarioKind::MeanShift;
  if (name == "covariance-shift") return ScenarioKind::CovarianceShift;
  if (name == "label-ratio-shift") return ScenarioKind::LabelRatioShift;
  if (name == "missing-subclass") return ScenarioKind::MissingSubclass;
  throw Error("unknown scenario kind: " + name);
}

void ShiftScenario::validate() const {
  if (d < 1) throw Error("scenario: d must be >= 1");
  if (n_source < 1 || n_target_train < 1 || n_target_test < 1)
    throw Error("scenario: all counts must be >= 1");
  if (!(positive_rate_source > 0.0 && positive_rate_source < 1.0))
    throw Error("scenario: positive_rate_source must lie in (0, 1)");
  if (!(positive_rate_target > 0.0 && positive_rate_target < 1.0))
    throw Error("scenario: positive_rate_target must lie in (0, 1)");
  if (!(shift_magnitude >= 0.0) || !std::isfinite(shift_magnitude))
    throw Error("scenario: shift_magnitude must be finite and >= 0");
}

SynthOutput synth_shift(const ShiftScenario& scenario) {
  scenario.validate();

  Rng dir_rng = Rng::derive(scenario.seed, "synth.direction");
  Geometry geo;
  geo.class_axis = random_direction(dir_rng, scenario.d);
  geo.translation = Eigen::VectorXd::Zero(scenario.d);
  geo.subclass_offset = Eigen::VectorXd::Zero(scenario.d);
  if (scenario.kind == ScenarioKind::MeanShift) {
    // Random unit vector with a fixed projection onto the class axis; the
    // orthogonal part carries the remaining randomness.
    const Eigen::VectorXd ortho = orthogonal_direction(dir_rng, geo.class_axis);
    const double residual =
        std::sqrt(std::max(0.0, 1.0 - kShiftAlignment * kShiftAlignment));
    Eigen::VectorXd u = kShiftAlignment * geo.class_axis + residual * ortho;
    if (scenario.d < 2) u = geo.class_axis;
    geo.translation = scenario.shift_magnitude * u;
  } else if (scenario.kind == ScenarioKind::MissingSubclass) {
    geo.subclass_offset = (scenario.shift_magnitude / 2.0) *
                          orthogonal_direction(dir_rng, geo.class_axis);
  }

  PartSpec source_spec;
  source_spec.rate = scenario.positive_rate_source;

  PartSpec target_spec;
  target_spec.rate = scenario.positive_rate_target;
  target_spec.translate = scenario.kind == ScenarioKind::MeanShift;
  target_spec.sigma_scale = scenario.kind == ScenarioKind::CovarianceShift
                                ? std::sqrt(scenario.shift_magnitude)
                                : 1.0;
  target_spec.positives_both = scenario.kind == ScenarioKind::MissingSubclass;

  SynthOutput out;
  Rng source_rng = Rng::derive(scenario.seed, "synth.source");
  out.source = draw_part(source_rng, scenario.n_source, scenario.d, source_spec,
                         geo, scenario.kind);
  Rng train_rng = Rng::derive(scenario.seed, "synth.target_train");
  out.target_train = draw_part(train_rng, scenario.n_target_train, scenario.d,
                               target_spec, geo, scenario.kind);
  Rng test_rng = Rng::derive(scenario.seed, "synth.target_test");
  out.target_test = draw_part(test_rng, scenario.n_target_test, scenario.d,
                              target_spec, geo, scenario.kind);
  return out;
}

std::string scenario_to_json(const ShiftScenario& s) {
  const nlohmann::json j{{"kind", scenario_kind_name(s.kind)},
                         {"d", s.d},
                         {"n_source", s.n_source},
                         {"n_target_train", s.n_target_train},
                         {"n_target_test", s.n_target_test},
                         {"shift_magnitude", s.shift_magnitude},
                         {"positive_rate_source", s.positive_rate_source},
                         {"positive_rate_target", s.positive_rate_target},
                         {"seed", s.seed}};
  return j.dump(2) + "\n";
}

ShiftScenario scenario_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("scenario: invalid JSON: ") + e.what());
  }
  try {
    static constexpr const char* kAllowed[] = {
        "kind",           "d",
        "n_source",       "n_target_train",
        "n_target_test",  "shift_magnitude",
        "positive_rate_source", "positive_rate_target",
        "seed"};
    for (const auto& item : j.items()) {
      bool known = false;
      for (const char* k : kAllowed)
        if (item.key() == k) known = true;
      if (!known) throw Error("scenario: unknown key '" + item.key() + "'");
    }
    ShiftScenario s;
    if (j.contains("kind"))
      s.kind = scenario_kind_from_name(j.at("kind").get<std::string>());
    s.d = j.value("d", s.d);
    s.n_source = j.value("n_source", s.n_source);
    s.n_target_train = j.value("n_target_train", s.n_target_train);
    s.n_target_test = j.value("n_target_test", s.n_target_test);
    s.shift_magnitude = j.value("shift_magnitude", s.shift_magnitude);
    s.positive_rate_source =
        j.value("positive_rate_source", s.positive_rate_source);
    s.positive_rate_target =
        j.value("positive_rate_target", s.positive_rate_target);
    s.seed = j.value("seed", s.seed);
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("scenario: ") + e.what());
  }
}

}  // namespace iwtl
