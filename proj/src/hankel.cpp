#include "psrsel/hankel.hpp"

#include <algorithm>
#include <unordered_map>

#include "psrsel/errors.hpp"

namespace psrsel {

namespace {

std::size_t max_sequence_length(const std::vector<Sequence>& seqs) {
  std::size_t m = 0;
  for (const Sequence& s : seqs) m = std::max(m, s.length());
  return m;
}

void validate_basis(const Basis& basis, const SequenceCodec& codec) {
  if (basis.tests.empty()) throw ConfigError("basis has no tests");
  if (basis.histories.empty()) throw ConfigError("basis has no histories");
  std::vector<std::uint64_t> keys;
  keys.reserve(basis.tests.size());
  for (const Sequence& t : basis.tests) {
    if (t.empty()) throw ConfigError("basis tests must be non-empty");
    keys.push_back(codec.encode(t));
  }
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
    throw ConfigError("duplicate test in basis");
  keys.clear();
  for (const Sequence& h : basis.histories) keys.push_back(codec.encode(h));
  std::sort(keys.begin(), keys.end());
  if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
    throw ConfigError("duplicate history in basis");
}

}  // namespace

WindowCounts::WindowCounts(const TrajectoryDataset& data, int max_depth)
    : codec_(data.num_actions(), data.num_obs()), max_depth_(max_depth) {
  if (max_depth < 1) throw ConfigError("WindowCounts: max_depth must be >= 1");
  if (max_depth > codec_.max_pairs())
    throw ConfigError("WindowCounts: max_depth " + std::to_string(max_depth) +
                      " exceeds key capacity of " +
                      std::to_string(codec_.max_pairs()));
  std::vector<std::uint64_t> raw;
  raw.reserve(2 * static_cast<std::size_t>(max_depth) * data.total_steps());
  for (const Sequence& traj : data.trajectories()) {
    const std::size_t len = traj.length();
    for (std::size_t start = 0; start < len; ++start) {
      std::uint64_t key = codec_.empty_key();
      const std::size_t stop =
          std::min(len, start + static_cast<std::size_t>(max_depth));
      for (std::size_t j = start; j < stop; ++j) {
        const ActionObs& p = traj.pairs[j];
        raw.push_back(codec_.append_action(key, p.action));
        key = codec_.append_pair(key, p.action, p.obs);
        raw.push_back(key);
      }
    }
  }
  std::sort(raw.begin(), raw.end());
  sorted_.reserve(1024);
  for (std::size_t i = 0; i < raw.size();) {
    std::size_t j = i;
    while (j < raw.size() && raw[j] == raw[i]) ++j;
    sorted_.emplace_back(raw[i], static_cast<long long>(j - i));
    i = j;
  }
}

long long WindowCounts::count(std::uint64_t key) const {
  const auto it = std::lower_bound(
      sorted_.begin(), sorted_.end(), key,
      [](const std::pair<std::uint64_t, long long>& e, std::uint64_t k) {
        return e.first < k;
      });
  if (it == sorted_.end() || it->first != key) return 0;
  return it->second;
}

namespace {

// Prefix-product estimate of one sequence from window tallies.  The first
// history_prefix_len factors belong to the history part: a zero denominator
// there is an error (the basis cannot be estimated at all); later factors
// belong to a test-side extension, where a zero denominator pins the
// estimate to 0 and bumps the warning tally.
double estimate_sequence(const Sequence& s, int history_prefix_len,
                         const WindowCounts& counts, HankelEstimates& out) {
  const SequenceCodec& codec = counts.codec();
  std::vector<long long> nums, dens;
  nums.reserve(s.length());
  dens.reserve(s.length());
  double prob = 1.0;
  std::uint64_t key = codec.empty_key();
  for (std::size_t i = 0; i < s.length(); ++i) {
    const ActionObs& p = s.pairs[i];
    const long long den = counts.count(codec.append_action(key, p.action));
    key = codec.append_pair(key, p.action, p.obs);
    const long long num = counts.count(key);
    nums.push_back(num);
    dens.push_back(den);
    if (den == 0) {
      if (static_cast<int>(i) < history_prefix_len)
        throw InsufficientData(
            "estimate: history prefix " + s.to_string() +
            " has no action-matching windows at step " + std::to_string(i));
      ++out.zero_test_factors;
      prob = 0.0;
      break;
    }
    prob *= static_cast<double>(num) / static_cast<double>(den);
    if (prob == 0.0) break;
  }
  out.factor_counts.emplace(codec.encode(s),
                            std::make_pair(std::move(nums), std::move(dens)));
  return prob;
}

}  // namespace

HankelEstimates estimate(const TrajectoryDataset& data, const Basis& basis,
                         const WindowCounts& counts) {
  const SequenceCodec& codec = counts.codec();
  validate_basis(basis, codec);
  const int needed_depth =
      static_cast<int>(max_sequence_length(basis.histories)) + 1 +
      static_cast<int>(max_sequence_length(basis.tests));
  if (needed_depth > counts.max_depth())
    throw ConfigError("estimate: window counts cover depth " +
                      std::to_string(counts.max_depth()) + " but basis needs " +
                      std::to_string(needed_depth));

  const int num_t = static_cast<int>(basis.tests.size());
  const int num_h = static_cast<int>(basis.histories.size());
  HankelEstimates out;
  out.basis = basis;
  out.num_actions = data.num_actions();
  out.num_obs = data.num_obs();
  out.p_h.resize(num_h);
  out.p_th.resize(num_t, num_h);
  for (int a = 0; a < out.num_actions; ++a)
    for (int o = 0; o < out.num_obs; ++o)
      out.p_t_ao_h.emplace(std::make_pair(a, o),
                           Eigen::MatrixXd(num_t, num_h));

  for (int j = 0; j < num_h; ++j) {
    const Sequence& h = basis.histories[j];
    out.p_h(j) = estimate_sequence(h, static_cast<int>(h.length()), counts, out);
    for (int i = 0; i < num_t; ++i) {
      const Sequence ht = concat(h, basis.tests[i]);
      out.p_th(i, j) =
          estimate_sequence(ht, static_cast<int>(h.length()), counts, out);
    }
    for (auto& [ao, mat] : out.p_t_ao_h) {
      Sequence mid = h;
      mid.pairs.push_back({ao.first, ao.second});
      for (int i = 0; i < num_t; ++i) {
        const Sequence q = concat(mid, basis.tests[i]);
        mat(i, j) =
            estimate_sequence(q, static_cast<int>(h.length()), counts, out);
      }
    }
  }
  return out;
}

HankelEstimates estimate(const TrajectoryDataset& data, const Basis& basis) {
  const int depth = static_cast<int>(max_sequence_length(basis.histories)) +
                    1 + static_cast<int>(max_sequence_length(basis.tests));
  return estimate(data, basis, WindowCounts(data, depth));
}

HankelEstimates exact_hankel(const Pomdp& model, const Basis& basis) {
  const SequenceCodec codec(model.num_actions(), model.num_obs());
  validate_basis(basis, codec);

  const int num_t = static_cast<int>(basis.tests.size());
  const int num_h = static_cast<int>(basis.histories.size());
  HankelEstimates out;
  out.basis = basis;
  out.num_actions = model.num_actions();
  out.num_obs = model.num_obs();
  out.p_h.resize(num_h);
  out.p_th.resize(num_t, num_h);
  for (int a = 0; a < out.num_actions; ++a)
    for (int o = 0; o < out.num_obs; ++o)
      out.p_t_ao_h.emplace(std::make_pair(a, o),
                           Eigen::MatrixXd(num_t, num_h));

  for (int j = 0; j < num_h; ++j) {
    const Sequence& h = basis.histories[j];
    const double p_h = exact_prediction(model, Sequence{}, h);
    if (p_h <= 0.0)
      throw UndefinedConditional("exact_hankel: history " + h.to_string() +
                                 " has probability zero");
    out.p_h(j) = p_h;
    const Belief at_h = propagate(model, Belief{model.initial_belief()}, h);
    for (int i = 0; i < num_t; ++i)
      out.p_th(i, j) = p_h * exact_prediction_from(model, at_h, basis.tests[i]);
    for (auto& [ao, mat] : out.p_t_ao_h) {
      const Sequence step({ActionObs{ao.first, ao.second}});
      const double z = exact_prediction_from(model, at_h, step);
      if (z <= 0.0) {
        mat.col(j).setZero();
        continue;
      }
      const Belief after = propagate(model, at_h, step);
      for (int i = 0; i < num_t; ++i)
        mat(i, j) =
            p_h * z * exact_prediction_from(model, after, basis.tests[i]);
    }
  }
  return out;
}

std::vector<Sequence> build_histories(const TrajectoryDataset& data,
                                      int max_len, int max_count) {
  if (max_len < 0) throw ConfigError("build_histories: max_len must be >= 0");
  if (max_count < 1)
    throw ConfigError("build_histories: max_count must be >= 1");
  std::vector<Sequence> out;
  out.emplace_back();  // the empty history always comes first
  if (max_len == 0 || max_count == 1) return out;

  const SequenceCodec codec(data.num_actions(), data.num_obs());
  if (max_len > codec.max_pairs())
    throw ConfigError("build_histories: max_len exceeds key capacity");
  std::unordered_map<std::uint64_t, long long> tally;
  for (const Sequence& traj : data.trajectories()) {
    const std::size_t len = traj.length();
    for (std::size_t start = 0; start < len; ++start) {
      std::uint64_t key = codec.empty_key();
      const std::size_t stop =
          std::min(len, start + static_cast<std::size_t>(max_len));
      for (std::size_t j = start; j < stop; ++j) {
        key = codec.append_pair(key, traj.pairs[j].action, traj.pairs[j].obs);
        ++tally[key];
      }
    }
  }
  std::vector<std::pair<std::uint64_t, long long>> ranked(tally.begin(),
                                                          tally.end());
  // Most frequent first; shortlex (== numeric key) order breaks ties.
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) {
              if (a.second != b.second) return a.second > b.second;
              return a.first < b.first;
            });
  const std::size_t take =
      std::min(ranked.size(), static_cast<std::size_t>(max_count) - 1);
  for (std::size_t i = 0; i < take; ++i)
    out.push_back(codec.decode(ranked[i].first));
  return out;
}

}  // namespace psrsel
