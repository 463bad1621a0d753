#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "psrsel/core.hpp"
#include "psrsel/env.hpp"

namespace psrsel {

// Estimated conditional probabilities of each candidate test at one probe
// step (the history is the probe's first at_step pairs).
struct PredictionVector {
  Eigen::VectorXd values;
  int at_step = 0;
};

// Discrete MDP induced by clustering prediction vectors along the probe:
// states are clusters, actions are the ⟨ao⟩ pairs taken between consecutive
// steps, transition rows are count-normalized.
struct ClusteredMdp {
  int num_states = 0;
  std::vector<int> assignment;  // cluster id per probe step
  std::map<std::pair<int, int>, Eigen::MatrixXd> transitions;  // (a,o) -> S×S
  std::map<std::pair<int, int>, std::vector<int>> row_support;  // supported rows
};

// Rollout-frequency estimates of p(x | probe prefix) for every probe step
// and every test x.  Rollout streams are seeded per (step, test content),
// so a test's estimates do not depend on its position in X.
std::vector<PredictionVector> estimate_prediction_vectors(
    const Pomdp& model, const ProbeRun& probe, const std::vector<Sequence>& X,
    int num_rollouts, std::uint64_t seed);

// Noise-free variant used to isolate the entropy pipeline from Monte-Carlo
// error: entries come from belief propagation instead of rollouts.
std::vector<PredictionVector> exact_prediction_vectors(
    const Pomdp& model, const ProbeRun& probe, const std::vector<Sequence>& X);

// Greedy leader clustering in first-seen order: a vector joins the first
// cluster whose founding vector is within epsilon in max-norm, else founds
// a new cluster.  Returns the cluster id per vector.
std::vector<int> cluster_predictions(
    const std::vector<PredictionVector>& vectors, double epsilon);

// Tallies transitions between consecutive cluster assignments, labeled by
// the ⟨ao⟩ pair taken between them, and normalizes supported rows.
ClusteredMdp build_transition_mdp(const Sequence& probe,
                                  const std::vector<int>& assignment);

// Average row entropy of the induced MDP (natural log, 0·log 0 = 0):
// per ⟨ao⟩ action, the mean entropy of its supported rows, summed over
// actions.  Throws EmptyMdp when no action has a supported row.
double model_entropy(const ClusteredMdp& mdp);

struct EntropyLearnConfig {
  int probe_length = 5000;
  int num_rollouts = 100;
  // Cluster threshold; negative means use 3·sqrt(0.25/num_rollouts).
  double epsilon = -1.0;
  bool exact_mode = false;
  std::uint64_t seed = 0;
};

// The full pipeline: simulate a probe, estimate prediction vectors for the
// candidate set X (canonicalized to shortlex order), cluster, build the
// induced MDP, and return its entropy.  Deterministic given cfg.seed.
double entropy_learn(const Pomdp& model, const std::vector<Sequence>& X,
                     const EntropyLearnConfig& cfg);

}  // namespace psrsel
