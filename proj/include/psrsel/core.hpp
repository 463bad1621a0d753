#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace psrsel {

// One interaction step: the action taken and the observation received.
struct ActionObs {
  int action = 0;
  int obs = 0;

  friend bool operator==(const ActionObs&, const ActionObs&) = default;
  friend auto operator<=>(const ActionObs&, const ActionObs&) = default;
};

// A finite action-observation sequence.  The empty sequence is the empty
// history/test.  Ordering is shortlex (by length, then lexicographic), the
// canonical order used for basis enumeration and output listings.
struct Sequence {
  std::vector<ActionObs> pairs;

  Sequence() = default;
  explicit Sequence(std::vector<ActionObs> p) : pairs(std::move(p)) {}

  std::size_t length() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }

  friend bool operator==(const Sequence&, const Sequence&) = default;
  friend bool operator<(const Sequence& a, const Sequence& b) {
    if (a.pairs.size() != b.pairs.size())
      return a.pairs.size() < b.pairs.size();
    return a.pairs < b.pairs;
  }

  // "a0o1.a2o0" rendering; empty sequence renders as "e".
  std::string to_string() const;
};

Sequence concat(const Sequence& h, const Sequence& t);

// All non-empty sequences up to max_len in shortlex order.  Throws
// InsufficientCandidates if the pool would exceed max_results.
std::vector<Sequence> enumerate_tests(int max_len, int num_actions,
                                      int num_obs,
                                      std::size_t max_results = 1'000'000);

// Bit-exact integer key for a sequence, optionally followed by one dangling
// action (a history extended by the next action, before its observation).
// Keys order identically to shortlex order over equal-alphabet sequences.
class SequenceCodec {
 public:
  SequenceCodec(int num_actions, int num_obs);

  std::uint64_t empty_key() const { return 0; }
  std::uint64_t append_pair(std::uint64_t key, int action, int obs) const;
  std::uint64_t append_action(std::uint64_t key, int action) const;
  std::uint64_t encode(const Sequence& s) const;
  // Inverse of encode; rejects keys holding a dangling-action digit.
  Sequence decode(std::uint64_t key) const;
  // Longest sequence length that fits in a key, with room for one more pair.
  int max_pairs() const { return max_pairs_; }

 private:
  std::uint64_t pair_tokens_;   // num_actions * num_obs
  std::uint64_t base_;          // pair_tokens_ + num_actions + 1
  std::uint64_t num_obs_;
  int max_pairs_;
};

// Immutable batch of trajectories over a fixed (A, O) alphabet.
class TrajectoryDataset {
 public:
  TrajectoryDataset(std::vector<Sequence> trajectories, int num_actions,
                    int num_obs);

  const std::vector<Sequence>& trajectories() const { return trajectories_; }
  int num_actions() const { return num_actions_; }
  int num_obs() const { return num_obs_; }
  std::size_t size() const { return trajectories_.size(); }
  std::size_t total_steps() const { return total_steps_; }

 private:
  std::vector<Sequence> trajectories_;
  int num_actions_;
  int num_obs_;
  std::size_t total_steps_ = 0;
};

}  // namespace psrsel
