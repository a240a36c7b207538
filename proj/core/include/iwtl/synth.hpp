#pragma once

#include <cstdint>
#include <string>

#include "iwtl/dataset.hpp"

namespace iwtl {

// Families of synthetic domain shift between a large source sample and a
// small target sample. All four keep the same binary-classification task;
// they differ in how the target distribution departs from the source.
enum class ScenarioKind {
  MeanShift,        // target class means translated along a random direction
  CovarianceShift,  // target class covariances scaled by shift_magnitude
  LabelRatioShift,  // identical conditionals, different positive rates
  MissingSubclass,  // source positives cover one of two positive clusters
};

const char* scenario_kind_name(ScenarioKind kind);
ScenarioKind scenario_kind_from_name(const std::string& name);

struct ShiftScenario {
  ScenarioKind kind = ScenarioKind::MeanShift;
  Eigen::Index d = 10;
  Eigen::Index n_source = 5000;
  Eigen::Index n_target_train = 200;
  Eigen::Index n_target_test = 2000;
  double shift_magnitude = 1.5;
  double positive_rate_source = 0.05;
  double positive_rate_target = 0.05;
  std::uint64_t seed = 1;

  // Throws Error on nonpositive counts, rates outside (0, 1), d < 1, or a
  // negative shift magnitude.
  void validate() const;
};

struct SynthOutput {
  Dataset source;
  Dataset target_train;
  Dataset target_test;
};

// Draws the three datasets deterministically from scenario.seed. Same
// scenario, same seed: bit-identical output, independent of call order.
SynthOutput synth_shift(const ShiftScenario& scenario);

// JSON round-trip (used in configs and manifests). Parsing applies defaults
// for absent fields and rejects unknown keys.
std::string scenario_to_json(const ShiftScenario& scenario);
ShiftScenario scenario_from_json(const std::string& text);

}  // namespace iwtl
