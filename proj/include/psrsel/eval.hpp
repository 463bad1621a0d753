#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psrsel/config.hpp"
#include "psrsel/core.hpp"
#include "psrsel/env.hpp"
#include "psrsel/spectral.hpp"

namespace psrsel {

// Prediction-error metrics of one model along one held-out trajectory.
struct EvalReport {
  double one_step_error = 0.0;   // mean |p - p̂| at horizon 1
  double four_step_error = 0.0;  // mean |p - p̂| for the joint 4-step event
  int L = 0;                     // test trajectory length
  long long degenerate_updates = 0;
  long long clamp_events = 0;
  std::vector<double> per_step_one;   // one term per step
  std::vector<double> per_step_four;  // one term per step with full horizon
};

struct EvalOptions {
  bool exact_truth = true;  // belief propagation vs rollout ground truth
  int truth_rollouts = 1000;
  std::uint64_t seed = 0;   // only consumed by rollout truth
};

// Filters the model along test_seq; at each step compares the model's
// one-step probability (for the action/observation actually taken) and the
// joint four-step observation probability (given the four actions actually
// taken) against the ground truth.  Model outputs are clamped to [0,1] with
// clamp events counted; degenerate filter updates reset the state to the
// reference state and are counted.
EvalReport evaluate(const PsrModel& model, const Pomdp& truth,
                    const Sequence& test_seq, const EvalOptions& opts = {});

// The rendered outputs of one experiment run, before any file I/O.
struct ExperimentOutput {
  std::string results_csv;      // one row per (basis size, trial, round)
  std::string round_curve_csv;  // mean/stderr of one-step error by round
  std::string basis_size_curve_csv;  // final-round mean/stderr by basis size
  std::string manifest;         // config echo + version + seed notes
};

// Full protocol: per basis size and trial, generate training data, build
// histories and a random initial basis, run the configured selection
// strategy, re-learn and evaluate after every round.  Deterministic:
// identical configs yield byte-identical outputs.
ExperimentOutput run_experiment(const ExperimentConfig& cfg);

// Writes the four outputs into dir (created beforehand by the caller).
void write_experiment_output(const ExperimentOutput& out,
                             const std::string& dir);

}  // namespace psrsel
