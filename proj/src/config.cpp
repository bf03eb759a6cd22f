#include "offac/config.hpp"

#include "offac/mdp_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace offac {

using nlohmann::json;

const char* to_string(CriticKind kind) {
  switch (kind) {
    case CriticKind::td: return "td";
    case CriticKind::gtd: return "gtd";
    case CriticKind::emphatic: return "emphatic";
  }
  return "?";
}

namespace {

CriticKind critic_from_string(const std::string& s) {
  if (s == "td") return CriticKind::td;
  if (s == "gtd") return CriticKind::gtd;
  if (s == "emphatic") return CriticKind::emphatic;
  throw ConfigError("unknown critic '" + s + "' (expected td, gtd or emphatic)");
}

template <class T>
std::vector<T> scalar_or_list(const json& j) {
  if (j.is_array()) return j.get<std::vector<T>>();
  return {j.get<T>()};
}

template <class T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void ExperimentConfig::validate() const {
  const auto& e = environment.name;
  if (e != "random_walk_19" && e != "counterexample" && e != "random_mdp" && e != "file")
    throw ConfigError("unknown environment '" + e + "'");
  if (e == "file" && environment.path.empty()) throw ConfigError("environment 'file' needs a path");
  if (runs < 0) throw ConfigError("runs must be >= 0");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (record_every < 1) throw ConfigError("record_every must be >= 1");
  if (algorithm.lambdas.empty() || schedule.alpha0.empty() || algorithm.normalize.empty())
    throw ConfigError("lambda, alpha0 and normalize_trace lists must be non-empty");
  for (double l : algorithm.lambdas)
    if (!(l >= 0.0 && l <= 1.0)) throw ConfigError("lambda must lie in [0, 1]");
  for (double a : schedule.alpha0) StepSchedule{a, schedule.tau, schedule.kappa}.validate(true);
  if (algorithm.actor) {
    if (*algorithm.actor == ActorKind::onpolicy)
      throw ConfigError("the on-policy actor is only available through gradcheck");
    const ActorKind a = *algorithm.actor;
    if (a == ActorKind::gradient_ac && algorithm.critic != CriticKind::gtd)
      throw ConfigError("gradient_ac needs the gtd critic");
    if (a == ActorKind::emphatic_ac && algorithm.critic != CriticKind::emphatic)
      throw ConfigError("emphatic_ac needs the emphatic critic");
    if (a == ActorKind::offpac && algorithm.critic != CriticKind::gtd)
      throw ConfigError("offpac needs the gtd critic");
    for (double a0 : schedule.alpha0) {
      TwoTimescale ts{{a0, schedule.tau, schedule.kappa},
                      {schedule.beta0, schedule.beta_tau, schedule.beta_kappa},
                      schedule.actor_faster};
      ts.validate();
    }
  }
  for (const auto& m : metrics)
    if (m != "rms" && m != "J" && m != "pi")
      throw ConfigError("unknown metric '" + m + "' (expected rms, J or pi)");
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
  }
  ExperimentConfig c;
  try {
    maybe(j, "name", c.name);
    if (j.contains("environment")) {
      const json& e = j.at("environment");
      maybe(e, "name", c.environment.name);
      maybe(e, "gamma", c.environment.gamma);
      maybe(e, "behavior_p1", c.environment.behavior_p1);
      maybe(e, "seed", c.environment.seed);
      maybe(e, "states", c.environment.states);
      maybe(e, "actions", c.environment.actions);
      maybe(e, "features", c.environment.features);
      maybe(e, "path", c.environment.path);
    }
    if (j.contains("algorithm")) {
      const json& a = j.at("algorithm");
      if (a.contains("critic")) c.algorithm.critic = critic_from_string(a.at("critic").get<std::string>());
      if (a.contains("actor")) {
        const auto s = a.at("actor").get<std::string>();
        if (s != "none") c.algorithm.actor = actor_kind_from_string(s);
      }
      if (a.contains("lambda")) c.algorithm.lambdas = scalar_or_list<double>(a.at("lambda"));
      if (a.contains("normalize_trace")) c.algorithm.normalize = scalar_or_list<bool>(a.at("normalize_trace"));
    }
    if (j.contains("schedule")) {
      const json& s = j.at("schedule");
      if (s.contains("alpha0")) c.schedule.alpha0 = scalar_or_list<double>(s.at("alpha0"));
      maybe(s, "tau", c.schedule.tau);
      maybe(s, "kappa", c.schedule.kappa);
      maybe(s, "alpha_u_ratio", c.schedule.alpha_u_ratio);
      maybe(s, "beta0", c.schedule.beta0);
      maybe(s, "beta_tau", c.schedule.beta_tau);
      maybe(s, "beta_kappa", c.schedule.beta_kappa);
      maybe(s, "actor_faster", c.schedule.actor_faster);
    }
    if (j.contains("horizon")) {
      const json& h = j.at("horizon");
      maybe(h, "steps", c.steps);
      maybe(h, "episodes", c.episodes);
    }
    maybe(j, "runs", c.runs);
    maybe(j, "seed", c.seed);
    if (j.contains("metrics")) c.metrics = scalar_or_list<std::string>(j.at("metrics"));
    maybe(j, "record_every", c.record_every);
    maybe(j, "threads", c.threads);
    if (j.contains("output")) {
      maybe(j.at("output"), "dir", c.output_dir);
      maybe(j.at("output"), "plots", c.plots);
    }
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("bad config field: ") + ex.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& ex) {
    throw ConfigError(path + ": " + ex.what());
  }
}

Environment build_environment(const EnvironmentSpec& spec) {
  if (spec.name == "random_walk_19") return make_random_walk_19();
  if (spec.name == "counterexample") return make_counterexample(spec.gamma, spec.behavior_p1);
  if (spec.name == "random_mdp")
    return make_random_mdp(spec.seed, spec.states, spec.actions, spec.features, spec.gamma);
  if (spec.name == "file") {
    MdpDocument doc = load_mdp(spec.path);
    if (!doc.features) throw ConfigError("MDP file " + spec.path + " has no features section");
    const Index ns = doc.mdp.num_states();
    const Index na = doc.mdp.num_actions();
    // the target table becomes the initial softmax preferences (log-probabilities)
    Vec w(ns * na);
    const Mat target = doc.target ? *doc.target : doc.behavior.table();
    for (Index s = 0; s < ns; ++s)
      for (Index a = 0; a < na; ++a) w(s * na + a) = std::log(std::max(target(s, a), 1e-300));
    auto weights = behavior_weights(doc.mdp, doc.behavior);
    const double gamma = doc.mdp.discount();
    return Environment{spec.path,
                       std::move(doc.mdp),
                       LinearFeatureMap<double>(*doc.features),
                       std::move(doc.behavior),
                       ParametricPolicy<double>::tabular(ns, na),
                       std::move(w),
                       gamma,
                       false,
                       {},
                       0,
                       std::move(weights)};
  }
  throw ConfigError("unknown environment '" + spec.name + "'");
}

}  // namespace offac
