#ifndef OFFAC_CONFIG_HPP
#define OFFAC_CONFIG_HPP

// JSON experiment description; see README.md for the schema.

#include "offac/actors.hpp"
#include "offac/envs.hpp"
#include "offac/schedule.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace offac {

struct EnvironmentSpec {
  std::string name = "random_walk_19";  ///< random_walk_19 | counterexample | random_mdp | file
  double gamma = 0.99;
  double behavior_p1 = 1.0 / 3.0;
  std::uint64_t seed = 1;
  Index states = 5;
  Index actions = 3;
  Index features = 3;
  std::string path;
};

enum class CriticKind { td, gtd, emphatic };
const char* to_string(CriticKind kind);

struct AlgorithmSpec {
  CriticKind critic = CriticKind::td;
  std::optional<ActorKind> actor;  ///< empty: policy evaluation only
  std::vector<double> lambdas{0.0};
  std::vector<bool> normalize{false};
};

struct ScheduleSpec {
  std::vector<double> alpha0{0.01};
  double tau = 1e4;
  double kappa = 1.0;  ///< 0 = constant
  double alpha_u_ratio = 1.0;
  double beta0 = 0.0;
  double beta_tau = 1e4;
  double beta_kappa = 1.0;
  bool actor_faster = false;
};

struct ExperimentConfig {
  std::string name = "experiment";
  EnvironmentSpec environment;
  AlgorithmSpec algorithm;
  ScheduleSpec schedule;
  std::uint64_t steps = 0;     ///< continuing horizon
  std::uint64_t episodes = 0;  ///< episodic horizon (episodic environments only)
  int runs = 1;
  std::uint64_t seed = 1;
  std::vector<std::string> metrics{"rms"};
  std::uint64_t record_every = 1;  ///< steps, or episodes when episodic
  int threads = 1;
  std::string output_dir = "out";
  bool plots = true;

  void validate() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
Environment build_environment(const EnvironmentSpec& spec);

}  // namespace offac

#endif  // OFFAC_CONFIG_HPP
