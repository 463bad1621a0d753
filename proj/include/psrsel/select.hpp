#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "psrsel/core.hpp"
#include "psrsel/entropy.hpp"
#include "psrsel/env.hpp"
#include "psrsel/hankel.hpp"

namespace psrsel {

struct SelectionConfig {
  int k = 10;                  // basis (test-set) size, invariant during search
  int n = 2;                   // replacement block size, 1 <= n < k
  int rounds = 10;             // outer rounds; at most one acceptance each
  int iter_num = 10;           // candidate draws per round
  double entropy_threshold = 0.02;  // required objective drop for acceptance
  int candidate_max_len = 2;   // max length of sampled candidate tests
  int min_support = 10;        // min action-sequence count for candidates
  std::uint64_t seed = 0;

  // Objective settings forwarded to entropy_learn.
  int probe_length = 5000;
  int num_rollouts = 100;
  double epsilon = -1.0;  // cluster threshold; negative = rollout default
  bool exact_mode = false;

  // Acceptance margin for the singular-value baseline.
  double bound_margin = 1e-3;
};

// One candidate evaluation inside the search.
struct SelectionRecord {
  int round = 0;      // 1-based
  int iteration = 0;  // 1-based within the round
  double objective = 0.0;
  bool accepted = false;
  std::uint64_t basis_hash = 0;
  // Codec keys of the sampled swap, snapshotted at sampling time: the n
  // incoming tests, the n outgoing incumbents, and the incumbent set they
  // were drawn against (all sorted).  Lets callers audit the discipline.
  std::vector<std::uint64_t> incoming_keys;
  std::vector<std::uint64_t> outgoing_keys;
  std::vector<std::uint64_t> incumbent_keys;
};

struct SelectionTrace {
  double initial_objective = 0.0;
  std::uint64_t initial_hash = 0;
  std::vector<SelectionRecord> records;
  // Incumbent snapshot at the end of each round (index 0 = after round 1).
  std::vector<std::vector<Sequence>> round_tests;
  std::vector<double> round_objective;
};

// Distinct tests of length <= max_len observed in the data whose action
// sequence occurs at least min_support times, in shortlex order.  This is
// the support of the candidate distribution p_T (sampling is uniform).
std::vector<Sequence> candidate_tests(const TrajectoryDataset& data,
                                      int max_len, int min_support);

// Order-stable content hash of a test set (for trace rows).
std::uint64_t test_set_hash(const std::vector<Sequence>& tests,
                            const SequenceCodec& codec);

// Entropy-guided local search: starting from init's tests, for each round
// up to iter_num draws of (n fresh candidates not in the incumbent set, n
// outgoing incumbents), accept the swap as soon as the entropy objective
// drops by strictly more than entropy_threshold, then move to the next
// round.  Histories ride along unchanged.
std::pair<Basis, SelectionTrace> entropy_search(const Pomdp& model,
                                                const TrajectoryDataset& data,
                                                const Basis& init,
                                                const SelectionConfig& cfg);

// Same loop with the baseline objective: the largest singular value across
// the learned update matrices of a model re-learned per candidate at rank
// k_model; acceptance needs a drop larger than bound_margin.  Candidates
// whose learning fails are rejected.
std::pair<Basis, SelectionTrace> bound_search(const Pomdp& model,
                                              const TrajectoryDataset& data,
                                              const Basis& init,
                                              const SelectionConfig& cfg,
                                              int k_model);

// k distinct tests sampled uniformly without replacement from the candidate
// pool, returned in shortlex order with empty histories (callers attach
// their own history set).
Basis random_basis(const TrajectoryDataset& data, int k, int max_len,
                   std::uint64_t seed, int min_support = 10);

}  // namespace psrsel
