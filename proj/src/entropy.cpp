#include "psrsel/entropy.hpp"

#include <algorithm>
#include <cmath>

#include "psrsel/errors.hpp"
#include "psrsel/rng.hpp"

namespace psrsel {

std::vector<PredictionVector> estimate_prediction_vectors(
    const Pomdp& model, const ProbeRun& probe, const std::vector<Sequence>& X,
    int num_rollouts, std::uint64_t seed) {
  if (X.empty())
    throw ConfigError("estimate_prediction_vectors: empty test set");
  if (probe.seq.empty())
    throw ConfigError("estimate_prediction_vectors: empty probe");
  const int steps = static_cast<int>(probe.seq.length());
  const SequenceCodec codec(model.num_actions(), model.num_obs());
  std::vector<std::uint64_t> test_keys;
  test_keys.reserve(X.size());
  for (const Sequence& x : X) test_keys.push_back(codec.encode(x));

  std::vector<PredictionVector> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    PredictionVector pv;
    pv.at_step = i;
    pv.values.resize(static_cast<Eigen::Index>(X.size()));
    for (std::size_t j = 0; j < X.size(); ++j)
      pv.values(static_cast<Eigen::Index>(j)) = rollout_prediction(
          model, probe.states[static_cast<std::size_t>(i)], X[j], num_rollouts,
          derive_seed(seed, static_cast<std::uint64_t>(i), test_keys[j]));
    out.push_back(std::move(pv));
  }
  return out;
}

std::vector<PredictionVector> exact_prediction_vectors(
    const Pomdp& model, const ProbeRun& probe,
    const std::vector<Sequence>& X) {
  if (X.empty()) throw ConfigError("exact_prediction_vectors: empty test set");
  if (probe.seq.empty())
    throw ConfigError("exact_prediction_vectors: empty probe");
  const int steps = static_cast<int>(probe.seq.length());
  std::vector<PredictionVector> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    PredictionVector pv;
    pv.at_step = i;
    pv.values.resize(static_cast<Eigen::Index>(X.size()));
    for (std::size_t j = 0; j < X.size(); ++j)
      pv.values(static_cast<Eigen::Index>(j)) = exact_prediction_from(
          model, probe.states[static_cast<std::size_t>(i)], X[j]);
    out.push_back(std::move(pv));
  }
  return out;
}

std::vector<int> cluster_predictions(
    const std::vector<PredictionVector>& vectors, double epsilon) {
  if (epsilon < 0.0)
    throw ConfigError("cluster_predictions: epsilon must be >= 0");
  std::vector<int> assignment;
  assignment.reserve(vectors.size());
  std::vector<Eigen::VectorXd> reps;  // founding vector of each cluster
  for (const PredictionVector& pv : vectors) {
    int found = -1;
    for (std::size_t c = 0; c < reps.size(); ++c) {
      if ((pv.values - reps[c]).lpNorm<Eigen::Infinity>() <= epsilon) {
        found = static_cast<int>(c);
        break;
      }
    }
    if (found < 0) {
      found = static_cast<int>(reps.size());
      reps.push_back(pv.values);
    }
    assignment.push_back(found);
  }
  return assignment;
}

ClusteredMdp build_transition_mdp(const Sequence& probe,
                                  const std::vector<int>& assignment) {
  if (assignment.size() != probe.length())
    throw DimensionMismatch(
        "build_transition_mdp: assignment length != probe length");
  if (assignment.empty())
    throw ConfigError("build_transition_mdp: empty probe");
  ClusteredMdp mdp;
  mdp.assignment = assignment;
  mdp.num_states = 1 + *std::max_element(assignment.begin(), assignment.end());

  // assignment[i] is the state at the history of the first i pairs, and
  // pairs[i] is the step taken from it, arriving at assignment[i+1].
  const int s = mdp.num_states;
  for (std::size_t i = 0; i + 1 < assignment.size(); ++i) {
    const ActionObs& p = probe.pairs[i];
    auto [it, inserted] = mdp.transitions.try_emplace(
        std::make_pair(p.action, p.obs), Eigen::MatrixXd::Zero(s, s));
    it->second(assignment[i], assignment[i + 1]) += 1.0;
  }
  for (auto& [ao, mat] : mdp.transitions) {
    std::vector<int>& support = mdp.row_support[ao];
    for (int i = 0; i < s; ++i) {
      const double row_sum = mat.row(i).sum();
      if (row_sum > 0.0) {
        mat.row(i) /= row_sum;
        support.push_back(i);
      }
    }
  }
  return mdp;
}

double model_entropy(const ClusteredMdp& mdp) {
  double total = 0.0;
  bool any_support = false;
  for (const auto& [ao, mat] : mdp.transitions) {
    const auto it = mdp.row_support.find(ao);
    if (it == mdp.row_support.end() || it->second.empty()) continue;
    any_support = true;
    double action_sum = 0.0;
    for (const int i : it->second) {
      for (Eigen::Index j = 0; j < mat.cols(); ++j) {
        const double p = mat(i, j);
        if (p > 0.0) action_sum -= p * std::log(p);
      }
    }
    total += action_sum / static_cast<double>(it->second.size());
  }
  if (!any_support)
    throw EmptyMdp("model_entropy: no action has a supported row");
  return total;
}

double entropy_learn(const Pomdp& model, const std::vector<Sequence>& X,
                     const EntropyLearnConfig& cfg) {
  if (X.empty()) throw ConfigError("entropy_learn: empty test set");
  if (cfg.probe_length < 2)
    throw ConfigError("entropy_learn: probe must have at least 2 steps");

  // Canonical shortlex order makes the entropy a function of the set's
  // content, independent of the caller's arrival order.
  std::vector<Sequence> tests = X;
  std::sort(tests.begin(), tests.end());
  if (std::adjacent_find(tests.begin(), tests.end()) != tests.end())
    throw ConfigError("entropy_learn: duplicate test in candidate set");

  const double epsilon =
      cfg.epsilon >= 0.0
          ? cfg.epsilon
          : 3.0 * std::sqrt(0.25 / static_cast<double>(cfg.num_rollouts));

  const ProbeRun probe =
      simulate_probe(model, cfg.probe_length, derive_seed(cfg.seed, 0x9a0be));
  const std::vector<PredictionVector> vectors =
      cfg.exact_mode
          ? exact_prediction_vectors(model, probe, tests)
          : estimate_prediction_vectors(model, probe, tests, cfg.num_rollouts,
                                        derive_seed(cfg.seed, 0x8011));
  const std::vector<int> assignment = cluster_predictions(vectors, epsilon);
  return model_entropy(build_transition_mdp(probe.seq, assignment));
}

}  // namespace psrsel
