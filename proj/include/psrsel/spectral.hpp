#pragma once

#include <Eigen/Dense>
#include <map>
#include <utility>

#include "psrsel/core.hpp"
#include "psrsel/hankel.hpp"

namespace psrsel {

// A learned predictive state representation.
struct PsrModel {
  int rank = 0;                // effective rank actually used
  int requested_rank = 0;      // rank asked for at learn time
  bool rank_deficient = false; // true when rank < requested_rank
  Eigen::VectorXd b_star;      // initial/reference state, length rank
  Eigen::VectorXd b_inf;       // normalization vector, length rank
  std::map<std::pair<int, int>, Eigen::MatrixXd> B_ao;  // rank×rank updates
  Eigen::MatrixXd U;           // |T|×rank left singular vectors
  Basis basis;                 // the basis the model was learned from
};

// Filtered state after some history.
struct PsrState {
  Eigen::VectorXd vector;
};

// Spectral parameter recovery from Hankel estimates: U from the top-k SVD
// of p_th, b_star from the empty-history column, b_inf and the B_ao from
// pseudo-inverse identities.  Requires the empty history in the basis.
// Singular values at or below sv_floor * sigma_max are dropped, reducing
// the effective rank (flagged on the model rather than thrown).
PsrModel learn(const HankelEstimates& est, int k, double sv_floor = 1e-12);

PsrState initial_state(const PsrModel& model);

// One filtering update: returns the next state and the one-step probability
// estimate b_inf·B_ao·b(h).  Throws DegenerateUpdate when that normalizer's
// magnitude falls below 1e-12.
std::pair<PsrState, double> filter_step(const PsrModel& model,
                                        const PsrState& state, int a, int o);

// Probability-like score of a full sequence from the reference state
// (empty sequence yields b_inf·b_star).
double sequence_probability(const PsrModel& model, const Sequence& seq);

// Conditional probability-like score of the future observations given the
// future actions, from the supplied state.
double multi_step_prediction(const PsrModel& model, const PsrState& state,
                             const Sequence& future);

}  // namespace psrsel
