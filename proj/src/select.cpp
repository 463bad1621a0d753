#include "psrsel/select.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "psrsel/errors.hpp"
#include "psrsel/linalg.hpp"
#include "psrsel/rng.hpp"
#include "psrsel/spectral.hpp"

namespace psrsel {

std::vector<Sequence> candidate_tests(const TrajectoryDataset& data,
                                      int max_len, int min_support) {
  if (max_len < 1)
    throw ConfigError("candidate_tests: max_len must be >= 1");
  if (min_support < 1)
    throw ConfigError("candidate_tests: min_support must be >= 1");
  const SequenceCodec codec(data.num_actions(), data.num_obs());
  if (max_len > codec.max_pairs())
    throw ConfigError("candidate_tests: max_len exceeds key capacity");

  std::unordered_map<std::uint64_t, long long> pair_tally;
  std::unordered_map<std::uint64_t, long long> action_tally;
  for (const Sequence& traj : data.trajectories()) {
    const std::size_t len = traj.length();
    for (std::size_t start = 0; start < len; ++start) {
      std::uint64_t pair_key = codec.empty_key();
      std::uint64_t action_key = codec.empty_key();
      const std::size_t stop =
          std::min(len, start + static_cast<std::size_t>(max_len));
      for (std::size_t j = start; j < stop; ++j) {
        const ActionObs& p = traj.pairs[j];
        pair_key = codec.append_pair(pair_key, p.action, p.obs);
        action_key = codec.append_action(action_key, p.action);
        ++pair_tally[pair_key];
        ++action_tally[action_key];
      }
    }
  }

  std::vector<std::uint64_t> keep;
  for (const auto& [key, count] : pair_tally) {
    (void)count;
    const Sequence seq = codec.decode(key);
    std::uint64_t action_key = codec.empty_key();
    for (const ActionObs& p : seq.pairs)
      action_key = codec.append_action(action_key, p.action);
    if (action_tally[action_key] >= min_support) keep.push_back(key);
  }
  std::sort(keep.begin(), keep.end());  // numeric key order == shortlex
  std::vector<Sequence> out;
  out.reserve(keep.size());
  for (const std::uint64_t key : keep) out.push_back(codec.decode(key));
  return out;
}

std::uint64_t test_set_hash(const std::vector<Sequence>& tests,
                            const SequenceCodec& codec) {
  std::vector<std::uint64_t> keys;
  keys.reserve(tests.size());
  for (const Sequence& t : tests) keys.push_back(codec.encode(t));
  std::sort(keys.begin(), keys.end());
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const std::uint64_t k : keys) h = mix_seed(h ^ k);
  return h;
}

namespace {

void validate_config(const SelectionConfig& cfg) {
  if (cfg.k < 2) throw ConfigError("selection: k must be >= 2");
  if (cfg.n < 1 || cfg.n >= cfg.k)
    throw ConfigError("selection: need 1 <= n < k");
  if (cfg.rounds < 1) throw ConfigError("selection: rounds must be >= 1");
  if (cfg.iter_num < 1) throw ConfigError("selection: iter_num must be >= 1");
  if (cfg.entropy_threshold <= 0.0)
    throw ConfigError("selection: entropy threshold must be > 0");
  if (cfg.candidate_max_len < 1)
    throw ConfigError("selection: candidate_max_len must be >= 1");
}

std::vector<std::uint64_t> sorted_keys(const std::vector<Sequence>& tests,
                                       const SequenceCodec& codec) {
  std::vector<std::uint64_t> keys;
  keys.reserve(tests.size());
  for (const Sequence& t : tests) keys.push_back(codec.encode(t));
  std::sort(keys.begin(), keys.end());
  return keys;
}

// Draws `n` distinct elements from `from` by partial Fisher-Yates; the
// source order plus the RNG stream fully determine the outcome.
std::vector<Sequence> sample_without_replacement(std::vector<Sequence> from,
                                                 int n, Rng& rng) {
  const int size = static_cast<int>(from.size());
  for (int i = 0; i < n; ++i) {
    const int j = i + rng.uniform_int(size - i);
    std::swap(from[static_cast<std::size_t>(i)],
              from[static_cast<std::size_t>(j)]);
  }
  from.resize(static_cast<std::size_t>(n));
  return from;
}

// The shared Algorithm-1 skeleton.  `objective` maps a canonical test set to
// a score (lower is better); acceptance requires a drop strictly greater
// than `threshold`.  Objective failures reject the candidate when
// `reject_on_error` is set (the initial evaluation always propagates).
std::pair<Basis, SelectionTrace> local_search(
    const TrajectoryDataset& data, const Basis& init,
    const SelectionConfig& cfg, double threshold,
    const std::function<double(const std::vector<Sequence>&)>& objective,
    bool reject_on_error) {
  validate_config(cfg);
  if (static_cast<int>(init.tests.size()) != cfg.k)
    throw ConfigError("selection: initial basis must have exactly k tests");

  const SequenceCodec codec(data.num_actions(), data.num_obs());
  const std::vector<Sequence> pool =
      candidate_tests(data, cfg.candidate_max_len, cfg.min_support);

  std::vector<Sequence> incumbent = init.tests;
  std::sort(incumbent.begin(), incumbent.end());
  if (std::adjacent_find(incumbent.begin(), incumbent.end()) !=
      incumbent.end())
    throw ConfigError("selection: duplicate test in initial basis");

  std::map<std::vector<std::uint64_t>, double> memo;
  const auto scored = [&](const std::vector<Sequence>& tests) {
    const std::vector<std::uint64_t> keys = sorted_keys(tests, codec);
    const auto it = memo.find(keys);
    if (it != memo.end()) return it->second;
    const double value = objective(tests);
    memo.emplace(keys, value);
    return value;
  };

  SelectionTrace trace;
  double current = scored(incumbent);
  trace.initial_objective = current;
  trace.initial_hash = test_set_hash(incumbent, codec);

  Rng rng(derive_seed(cfg.seed, 0x5e1ec7ull));
  for (int round = 1; round <= cfg.rounds; ++round) {
    for (int iter = 1; iter <= cfg.iter_num; ++iter) {
      // Fresh incoming tests: drawn from the pool minus the incumbents.
      std::unordered_set<std::uint64_t> in_set;
      for (const Sequence& t : incumbent) in_set.insert(codec.encode(t));
      std::vector<Sequence> eligible;
      eligible.reserve(pool.size());
      for (const Sequence& t : pool)
        if (!in_set.count(codec.encode(t))) eligible.push_back(t);
      if (static_cast<int>(eligible.size()) < cfg.n)
        throw InsufficientCandidates(
            "selection: candidate pool too small (" +
            std::to_string(eligible.size()) + " outside the incumbent set, " +
            std::to_string(cfg.n) + " needed)");
      const std::vector<Sequence> incoming =
          sample_without_replacement(eligible, cfg.n, rng);

      // Outgoing block: uniform among incumbents.
      std::vector<Sequence> keep = incumbent;
      for (int i = 0; i < cfg.n; ++i) {
        const int j =
            i + rng.uniform_int(static_cast<int>(keep.size()) - i);
        std::swap(keep[static_cast<std::size_t>(i)],
                  keep[static_cast<std::size_t>(j)]);
      }
      const std::vector<Sequence> outgoing(keep.begin(),
                                           keep.begin() + cfg.n);
      keep.erase(keep.begin(), keep.begin() + cfg.n);

      std::vector<Sequence> candidate = keep;
      candidate.insert(candidate.end(), incoming.begin(), incoming.end());
      std::sort(candidate.begin(), candidate.end());

      double value = std::numeric_limits<double>::infinity();
      bool failed = false;
      if (reject_on_error) {
        try {
          value = scored(candidate);
        } catch (const PsrError&) {
          failed = true;
        }
      } else {
        value = scored(candidate);
      }

      const bool accept = !failed && (current - value > threshold);
      SelectionRecord rec;
      rec.round = round;
      rec.iteration = iter;
      rec.objective = value;
      rec.accepted = accept;
      rec.basis_hash = test_set_hash(candidate, codec);
      rec.incoming_keys = sorted_keys(incoming, codec);
      rec.outgoing_keys = sorted_keys(outgoing, codec);
      rec.incumbent_keys = sorted_keys(incumbent, codec);
      trace.records.push_back(std::move(rec));
      if (accept) {
        incumbent = std::move(candidate);
        current = value;
        break;
      }
    }
    trace.round_tests.push_back(incumbent);
    trace.round_objective.push_back(current);
  }

  return {Basis{incumbent, init.histories}, trace};
}

}  // namespace

std::pair<Basis, SelectionTrace> entropy_search(const Pomdp& model,
                                                const TrajectoryDataset& data,
                                                const Basis& init,
                                                const SelectionConfig& cfg) {
  EntropyLearnConfig el;
  el.probe_length = cfg.probe_length;
  el.num_rollouts = cfg.num_rollouts;
  el.epsilon = cfg.epsilon;
  el.exact_mode = cfg.exact_mode;
  el.seed = derive_seed(cfg.seed, 0xe17ull);
  return local_search(
      data, init, cfg, cfg.entropy_threshold,
      [&](const std::vector<Sequence>& tests) {
        return entropy_learn(model, tests, el);
      },
      /*reject_on_error=*/false);
}

std::pair<Basis, SelectionTrace> bound_search(const Pomdp&,
                                              const TrajectoryDataset& data,
                                              const Basis& init,
                                              const SelectionConfig& cfg,
                                              int k_model) {
  const int max_test_len = std::max<int>(
      cfg.candidate_max_len,
      static_cast<int>([&] {
        std::size_t m = 0;
        for (const Sequence& t : init.tests) m = std::max(m, t.length());
        return m;
      }()));
  std::size_t max_hist_len = 0;
  for (const Sequence& h : init.histories)
    max_hist_len = std::max(max_hist_len, h.length());
  const WindowCounts counts(
      data, static_cast<int>(max_hist_len) + 1 + max_test_len);

  return local_search(
      data, init, cfg, cfg.bound_margin,
      [&](const std::vector<Sequence>& tests) {
        const HankelEstimates est =
            estimate(data, Basis{tests, init.histories}, counts);
        const PsrModel psr = learn(est, k_model);
        double largest = 0.0;
        for (const auto& [ao, mat] : psr.B_ao) {
          (void)ao;
          const ThinSvd svd = thin_svd(mat);
          if (svd.s.size() > 0) largest = std::max(largest, svd.s(0));
        }
        return largest;
      },
      /*reject_on_error=*/true);
}

Basis random_basis(const TrajectoryDataset& data, int k, int max_len,
                   std::uint64_t seed, int min_support) {
  if (k < 1) throw ConfigError("random_basis: k must be >= 1");
  const std::vector<Sequence> pool =
      candidate_tests(data, max_len, min_support);
  if (static_cast<int>(pool.size()) < k)
    throw InsufficientCandidates(
        "random_basis: only " + std::to_string(pool.size()) +
        " candidate tests available, " + std::to_string(k) + " requested");
  Rng rng(derive_seed(seed, 0xba515ull));
  std::vector<Sequence> tests = sample_without_replacement(pool, k, rng);
  std::sort(tests.begin(), tests.end());
  return Basis{std::move(tests), {}};
}

}  // namespace psrsel
