#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "psrsel/core.hpp"
#include "psrsel/env.hpp"

namespace psrsel {

// The finite index sets of the estimated Hankel matrices: rows are tests,
// columns are histories.  Orders are fixed at construction and every matrix
// indexes against them.
struct Basis {
  std::vector<Sequence> tests;
  std::vector<Sequence> histories;
};

// Sorted-key multiset of window prefix counts, shared between repeated
// estimates over the same data (basis search re-estimates constantly).
// For every window start and every depth d <= max_depth it tallies the
// first d pairs (pair key) and the first d-1 pairs plus the d-th action
// (action key), using SequenceCodec keys.
class WindowCounts {
 public:
  WindowCounts(const TrajectoryDataset& data, int max_depth);

  long long count(std::uint64_t key) const;
  int max_depth() const { return max_depth_; }
  const SequenceCodec& codec() const { return codec_; }

 private:
  SequenceCodec codec_;
  int max_depth_;
  std::vector<std::pair<std::uint64_t, long long>> sorted_;  // key -> tally
};

// Estimates of p(h), p(ht), p(h·ao·t) over a basis, plus the raw tallies
// they came from.  Carries the basis so downstream learners can index the
// matrices without extra bookkeeping.
struct HankelEstimates {
  Basis basis;
  Eigen::VectorXd p_h;                                   // |H|
  Eigen::MatrixXd p_th;                                  // |T| x |H|
  std::map<std::pair<int, int>, Eigen::MatrixXd> p_t_ao_h;  // (a,o) -> |T| x |H|
  int num_actions = 0;
  int num_obs = 0;
  // Factor tallies behind each estimated value: for sequence s the estimate
  // is prod_i num[i]/den[i], where num[i] counts windows matching the first
  // i pairs and den[i] counts windows matching the first i-1 pairs plus the
  // i-th action.  Keyed by the codec key of s.
  std::map<std::uint64_t, std::pair<std::vector<long long>,
                                    std::vector<long long>>>
      factor_counts;
  // Test-side factors with zero denominator (estimate pinned to 0).
  long long zero_test_factors = 0;
};

// Empirical estimates from sliding windows of the training data.  Each
// probability is a prefix product of per-step conditionals
// (matches of actions+observations) / (matches of actions), so estimates
// condition on actions rather than pricing in the uniform policy.
// Throws InsufficientData when a basis history has a zero denominator.
HankelEstimates estimate(const TrajectoryDataset& data, const Basis& basis);
HankelEstimates estimate(const TrajectoryDataset& data, const Basis& basis,
                         const WindowCounts& counts);

// Noise-free entries computed from the model by belief propagation.  Throws
// UndefinedConditional if a basis history has probability zero.
HankelEstimates exact_hankel(const Pomdp& model, const Basis& basis);

// The empty history plus the most frequent observed windows of length
// 1..max_len, capped at max_count entries total.  Ties break in shortlex
// order.
std::vector<Sequence> build_histories(const TrajectoryDataset& data,
                                      int max_len, int max_count);

}  // namespace psrsel
