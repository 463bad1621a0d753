#include "psrsel/core.hpp"

#include <limits>
#include <stdexcept>

#include "psrsel/errors.hpp"

namespace psrsel {

std::string Sequence::to_string() const {
  if (pairs.empty()) return "e";
  std::string out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i > 0) out += '.';
    out += 'a';
    out += std::to_string(pairs[i].action);
    out += 'o';
    out += std::to_string(pairs[i].obs);
  }
  return out;
}

Sequence concat(const Sequence& h, const Sequence& t) {
  Sequence out;
  out.pairs.reserve(h.pairs.size() + t.pairs.size());
  out.pairs.insert(out.pairs.end(), h.pairs.begin(), h.pairs.end());
  out.pairs.insert(out.pairs.end(), t.pairs.begin(), t.pairs.end());
  return out;
}

std::vector<Sequence> enumerate_tests(int max_len, int num_actions,
                                      int num_obs, std::size_t max_results) {
  if (max_len < 0 || num_actions <= 0 || num_obs <= 0)
    throw ConfigError("enumerate_tests: invalid alphabet or length");
  // Pool size: sum_{l=1..max_len} (A*O)^l, checked against the cap before
  // any allocation so absurd requests fail fast.
  const double per_len = static_cast<double>(num_actions) * num_obs;
  double total = 0.0, cur = 1.0;
  for (int l = 1; l <= max_len; ++l) {
    cur *= per_len;
    total += cur;
    if (total > static_cast<double>(max_results))
      throw InsufficientCandidates(
          "enumerate_tests: pool of length-<=" + std::to_string(max_len) +
          " sequences exceeds cap of " + std::to_string(max_results));
  }

  std::vector<Sequence> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<Sequence> frontier;  // all sequences of the previous length
  frontier.emplace_back();         // empty sequence as the seed
  for (int l = 1; l <= max_len; ++l) {
    std::vector<Sequence> next;
    next.reserve(frontier.size() * static_cast<std::size_t>(per_len));
    for (const Sequence& s : frontier) {
      for (int a = 0; a < num_actions; ++a) {
        for (int o = 0; o < num_obs; ++o) {
          Sequence e = s;
          e.pairs.push_back({a, o});
          next.push_back(std::move(e));
        }
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

SequenceCodec::SequenceCodec(int num_actions, int num_obs) {
  if (num_actions <= 0 || num_obs <= 0)
    throw ConfigError("SequenceCodec: alphabet sizes must be positive");
  pair_tokens_ = static_cast<std::uint64_t>(num_actions) *
                 static_cast<std::uint64_t>(num_obs);
  base_ = pair_tokens_ + static_cast<std::uint64_t>(num_actions) + 1u;
  num_obs_ = static_cast<std::uint64_t>(num_obs);
  // Room for max_pairs_ pair digits plus one dangling-action digit.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max();
  int n = 0;
  std::uint64_t ceiling = limit / base_;  // keys < ceiling can take a digit
  std::uint64_t worst = 0;                // largest key with n pair digits
  while (true) {
    // Appending digit d maps key -> key*base_ + d with d <= base_ - 1.
    if (worst > (limit - (base_ - 1)) / base_) break;
    std::uint64_t grown = worst * base_ + (base_ - 1);
    // Require room for one further dangling-action digit.
    if (grown > (limit - (base_ - 1)) / base_) break;
    worst = grown;
    ++n;
    (void)ceiling;
  }
  max_pairs_ = n;
}

std::uint64_t SequenceCodec::append_pair(std::uint64_t key, int action,
                                         int obs) const {
  // Digits are offset by 1 so that key length is recoverable and numeric
  // order over keys coincides with shortlex order over sequences.
  const std::uint64_t d =
      static_cast<std::uint64_t>(action) * num_obs_ +
      static_cast<std::uint64_t>(obs) + 1u;
  return key * base_ + d;
}

std::uint64_t SequenceCodec::append_action(std::uint64_t key,
                                           int action) const {
  const std::uint64_t d = pair_tokens_ + static_cast<std::uint64_t>(action) + 1u;
  return key * base_ + d;
}

std::uint64_t SequenceCodec::encode(const Sequence& s) const {
  if (static_cast<int>(s.pairs.size()) > max_pairs_)
    throw DimensionMismatch("SequenceCodec: sequence too long to encode (" +
                            std::to_string(s.pairs.size()) + " pairs)");
  std::uint64_t key = 0;
  for (const ActionObs& p : s.pairs) key = append_pair(key, p.action, p.obs);
  return key;
}

Sequence SequenceCodec::decode(std::uint64_t key) const {
  std::vector<ActionObs> rev;
  while (key != 0) {
    const std::uint64_t d = key % base_;
    key /= base_;
    if (d == 0 || d > pair_tokens_)
      throw DimensionMismatch(
          "SequenceCodec: key is not a pure pair sequence");
    const std::uint64_t tok = d - 1;
    rev.push_back({static_cast<int>(tok / num_obs_),
                   static_cast<int>(tok % num_obs_)});
  }
  return Sequence(std::vector<ActionObs>(rev.rbegin(), rev.rend()));
}

TrajectoryDataset::TrajectoryDataset(std::vector<Sequence> trajectories,
                                     int num_actions, int num_obs)
    : trajectories_(std::move(trajectories)),
      num_actions_(num_actions),
      num_obs_(num_obs) {
  if (num_actions_ <= 0 || num_obs_ <= 0)
    throw ConfigError("TrajectoryDataset: alphabet sizes must be positive");
  for (const Sequence& t : trajectories_) {
    for (const ActionObs& p : t.pairs) {
      if (p.action < 0 || p.action >= num_actions_ || p.obs < 0 ||
          p.obs >= num_obs_)
        throw DimensionMismatch(
            "TrajectoryDataset: step (" + std::to_string(p.action) + "," +
            std::to_string(p.obs) + ") outside alphabet A=" +
            std::to_string(num_actions_) + " O=" + std::to_string(num_obs_));
    }
    total_steps_ += t.pairs.size();
  }
}

}  // namespace psrsel
