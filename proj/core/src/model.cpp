#include <nlohmann/json.hpp>

#include "iwtl/learner.hpp"

namespace iwtl {

namespace {

using nlohmann::json;

constexpr int kModelSchemaVersion = 1;

const char* kind_name(LearnerKind k) {
  return k == LearnerKind::LogReg ? "logreg" : "boosted_stumps";
}

LearnerKind kind_from(const std::string& s) {
  if (s == "logreg") return LearnerKind::LogReg;
  if (s == "boosted_stumps") return LearnerKind::BoostedStumps;
  throw Error("unknown model kind: " + s);
}

json hp_to_json(const Hyperparams& hp) {
  return json{{"learner", kind_name(hp.learner)},
              {"l2_reg", hp.l2_reg},
              {"grad_tolerance", hp.grad_tolerance},
              {"max_iterations", hp.max_iterations},
              {"boosting_rounds", hp.boosting_rounds},
              {"learning_rate", hp.learning_rate},
              {"min_child_hessian", hp.min_child_hessian}};
}

Hyperparams hp_from_json(const json& j) {
  Hyperparams hp;
  hp.learner = kind_from(j.at("learner").get<std::string>());
  hp.l2_reg = j.at("l2_reg").get<double>();
  hp.grad_tolerance = j.at("grad_tolerance").get<double>();
  hp.max_iterations = j.at("max_iterations").get<int>();
  hp.boosting_rounds = j.at("boosting_rounds").get<int>();
  hp.learning_rate = j.at("learning_rate").get<double>();
  hp.min_child_hessian = j.at("min_child_hessian").get<double>();
  return hp;
}

}  // namespace

std::string model_to_json(const Model& model) {
  json j;
  j["schema_version"] = kModelSchemaVersion;
  j["kind"] = kind_name(model.kind);
  j["hyperparams"] = hp_to_json(model.hp);
  j["seed"] = model.seed;
  j["final_objective"] = model.final_objective;
  j["converged"] = model.converged;
  if (model.kind == LearnerKind::LogReg) {
    j["weights"] = std::vector<double>(model.w.data(),
                                       model.w.data() + model.w.size());
    j["intercept"] = model.intercept;
  } else {
    j["base_score"] = model.base_score;
    json stumps = json::array();
    for (const auto& s : model.stumps)
      stumps.push_back(
          json{{"feature", s.feature}, {"threshold", s.threshold},
               {"left", s.left}, {"right", s.right}});
    j["stumps"] = std::move(stumps);
  }
  return j.dump(2);
}

Model model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("malformed model JSON: ") + e.what());
  }
  try {
    if (j.at("schema_version").get<int>() != kModelSchemaVersion)
      throw Error("unsupported model schema version");
    Model m;
    m.kind = kind_from(j.at("kind").get<std::string>());
    m.hp = hp_from_json(j.at("hyperparams"));
    m.seed = j.at("seed").get<std::uint64_t>();
    m.final_objective = j.at("final_objective").get<double>();
    m.converged = j.at("converged").get<bool>();
    if (m.kind == LearnerKind::LogReg) {
      const auto w = j.at("weights").get<std::vector<double>>();
      m.w = Eigen::Map<const Eigen::VectorXd>(w.data(),
                                              static_cast<Eigen::Index>(w.size()));
      m.intercept = j.at("intercept").get<double>();
    } else {
      m.base_score = j.at("base_score").get<double>();
      for (const auto& s : j.at("stumps"))
        m.stumps.push_back(Stump{s.at("feature").get<int>(),
                                 s.at("threshold").get<double>(),
                                 s.at("left").get<double>(),
                                 s.at("right").get<double>()});
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(std::string("model JSON missing field: ") + e.what());
  }
}

}  // namespace iwtl
