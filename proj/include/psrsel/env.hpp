#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "psrsel/core.hpp"

namespace psrsel {

// Row-major so that matrix rows are contiguous and can be sampled directly.
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Distribution over latent states.
struct Belief {
  Eigen::VectorXd probs;
};

// Saved environment state at the end of a history: the posterior over latent
// states given everything observed so far.  Rollouts resume from it by
// sampling a latent state, so repeated rollouts estimate the same conditional
// the exact oracle computes.
using EnvState = Belief;

// Discrete POMDP.  Emissions condition on the arrived-at state and the
// action just taken: emission(a)(s', o) = Pr(o | s', a).
class Pomdp {
 public:
  Pomdp(std::vector<RowMatrix> transition, std::vector<RowMatrix> emission,
        Eigen::VectorXd initial_belief);

  int num_states() const { return num_states_; }
  int num_actions() const { return static_cast<int>(transition_.size()); }
  int num_obs() const { return num_obs_; }
  const RowMatrix& transition(int a) const { return transition_[a]; }
  const RowMatrix& emission(int a) const { return emission_[a]; }
  const Eigen::VectorXd& initial_belief() const { return initial_belief_; }

 private:
  std::vector<RowMatrix> transition_;
  std::vector<RowMatrix> emission_;
  Eigen::VectorXd initial_belief_;
  int num_states_;
  int num_obs_;
};

// A sampled trajectory together with the posterior belief after each prefix:
// states[i] is the belief given the first i pairs (states[0] is the initial
// belief), so states.size() == seq.length() + 1.
struct ProbeRun {
  Sequence seq;
  std::vector<Belief> states;
};

// One trajectory of `length` pairs under the uniform-random action policy.
Sequence simulate(const Pomdp& model, int length, std::uint64_t seed);

// Same sampling stream as simulate(), additionally recording the posterior
// belief at every prefix.
ProbeRun simulate_probe(const Pomdp& model, int length, std::uint64_t seed);

// Advances a belief through seq, renormalizing after each pair.  Throws
// UndefinedConditional if any step has zero observation probability.
Belief propagate(const Pomdp& model, Belief b, const Sequence& seq);

// Exact conditional probability of t's observations given t's actions are
// executed after history h, starting from the initial belief.  Only
// observation factors enter; action choices are conditioned on, not priced.
// Throws UndefinedConditional if h itself has probability zero.
double exact_prediction(const Pomdp& model, const Sequence& h,
                        const Sequence& t);

// Same conditional, but resuming from a saved environment state.
double exact_prediction_from(const Pomdp& model, const EnvState& state,
                             const Sequence& t);

// Monte-Carlo estimate of exact_prediction_from: fraction of num_rollouts
// resumptions (latent state sampled from the saved state, t's actions
// forced) whose observations all match t's observations.
double rollout_prediction(const Pomdp& model, const EnvState& state_at_h,
                          const Sequence& t, int num_rollouts,
                          std::uint64_t seed);

// Built-in environments:
//   "two-state-noisy"      2 states, 2 actions, 2 observations, hand-written
//                          tables (documented in README); seed ignored.
//   "ring-world"           5-state ring, 2 move actions with slip, 2-color
//                          noisy observations; seed ignored.
//   "mini-grid"            3x3 gridworld, 4 move actions, 16 observations
//                          (4 wall-adjacency bits with flip noise); seed
//                          ignored.
//   "random-pomdp-S-A-O"   S states, A actions, O observations with rows
//                          drawn from a symmetric Dirichlet; seeded.
// Initial beliefs are the stationary distribution of the uniform-policy
// state chain, so sliding-window estimates from long trajectories converge
// to the exact Hankel entries computed from the initial belief.
Pomdp make_builtin(const std::string& name, std::uint64_t seed);

}  // namespace psrsel
