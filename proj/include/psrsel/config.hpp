#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace psrsel {

// A full experiment definition, parsed from a flat key = value text file.
struct ExperimentConfig {
  std::string environment = "two-state-noisy";
  std::uint64_t env_seed = 1;
  // Any of entropy | bound | initial, run per trial on shared data and
  // initial bases so the strategies are directly comparable.
  std::vector<std::string> strategies = {"entropy"};
  int trials = 10;
  long long training_length = 100000;
  int probe_length = 5000;
  int rollouts = 100;
  std::vector<int> basis_sizes = {10};
  int rounds = 10;
  int iter_num = 10;
  int replace_n = 2;
  // Scalar threshold, or a by-basis-size schedule (wins when non-empty).
  double entropy_threshold = 0.02;
  std::map<int, double> entropy_threshold_by_size;
  int candidate_max_len = 2;
  int min_support = 10;
  int history_max_len = 3;
  int history_max_count = 40;
  int rank = 4;
  long long eval_length = 2000;
  double epsilon = -1.0;    // cluster threshold; negative = rollout default
  bool exact_entropy = false;
  bool exact_eval = true;   // exact vs rollout ground truth in evaluation
  int eval_rollouts = 1000; // rollouts per truth query when exact_eval=false
  double bound_margin = 1e-3;
  std::uint64_t master_seed = 42;
  int workers = 1;
  std::string output = "run";  // output directory (see cli for root override)
};

// Parses and validates; errors carry "file:line:" prefixes.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::string& filename);

// Canonical echo of a config, itself parseable, used in run manifests.
std::string render_config(const ExperimentConfig& cfg);

// Threshold in effect for one basis size (schedule lookup or the scalar).
double threshold_for_size(const ExperimentConfig& cfg, int basis_size);

}  // namespace psrsel
