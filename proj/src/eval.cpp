#include "psrsel/eval.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <future>
#include <limits>

#include "psrsel/errors.hpp"
#include "psrsel/hankel.hpp"
#include "psrsel/io.hpp"
#include "psrsel/rng.hpp"
#include "psrsel/select.hpp"
#include "psrsel/version.hpp"

namespace psrsel {

EvalReport evaluate(const PsrModel& model, const Pomdp& truth,
                    const Sequence& test_seq, const EvalOptions& opts) {
  const int len = static_cast<int>(test_seq.length());
  if (len < 5)
    throw ConfigError(
        "evaluate: test trajectory needs at least 5 steps (4-step horizon)");

  EvalReport rep;
  rep.L = len;
  rep.per_step_one.reserve(static_cast<std::size_t>(len));
  rep.per_step_four.reserve(static_cast<std::size_t>(len));

  const auto clamp01 = [&rep](double v) {
    if (v < 0.0) {
      ++rep.clamp_events;
      return 0.0;
    }
    if (v > 1.0) {
      ++rep.clamp_events;
      return 1.0;
    }
    return v;
  };
  const auto truth_prob = [&](const Belief& at, const Sequence& future,
                              int step, int horizon) {
    if (opts.exact_truth) return exact_prediction_from(truth, at, future);
    return rollout_prediction(
        truth, at, future, opts.truth_rollouts,
        derive_seed(opts.seed, static_cast<std::uint64_t>(step),
                    static_cast<std::uint64_t>(horizon)));
  };

  Belief tb{truth.initial_belief()};
  PsrState st = initial_state(model);
  for (int t = 0; t < len; ++t) {
    // Four-step term first: it must see the state before this step's update.
    if (t + 4 <= len) {
      Sequence future(std::vector<ActionObs>(
          test_seq.pairs.begin() + t, test_seq.pairs.begin() + t + 4));
      const double p_hat = clamp01(multi_step_prediction(model, st, future));
      const double p_true = truth_prob(tb, future, t, 4);
      rep.per_step_four.push_back(std::abs(p_true - p_hat));
    }

    const ActionObs& pair = test_seq.pairs[t];
    const Sequence one_step({pair});
    const double p_true1 = truth_prob(tb, one_step, t, 1);
    double p_hat1 = 0.0;
    try {
      auto [next, z] = filter_step(model, st, pair.action, pair.obs);
      p_hat1 = z;
      st = std::move(next);
    } catch (const DegenerateUpdate& degenerate) {
      p_hat1 = degenerate.normalizer;
      st = initial_state(model);
      ++rep.degenerate_updates;
    }
    rep.per_step_one.push_back(std::abs(p_true1 - clamp01(p_hat1)));

    tb = propagate(truth, std::move(tb), one_step);
  }

  double sum1 = 0.0;
  for (const double e : rep.per_step_one) sum1 += e;
  rep.one_step_error = sum1 / static_cast<double>(rep.per_step_one.size());
  double sum4 = 0.0;
  for (const double e : rep.per_step_four) sum4 += e;
  rep.four_step_error = sum4 / static_cast<double>(rep.per_step_four.size());
  return rep;
}

namespace {

struct ResultRow {
  int trial = 0;
  std::string strategy;
  int round = 0;
  int basis_size = 0;
  double objective = 0.0;
  double one_step_error = 0.0;
  double four_step_error = 0.0;
  long long degenerate_updates = 0;
  long long clamp_events = 0;
};

struct Aggregate {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
};

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate out;
  const double n = static_cast<double>(values.size());
  for (const double v : values) out.mean += v;
  out.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stderr_of_mean = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

std::vector<ResultRow> run_trial(const ExperimentConfig& cfg, const Pomdp& env,
                                 int basis_size, double threshold, int trial) {
  const std::uint64_t trial_seed =
      derive_seed(cfg.master_seed, static_cast<std::uint64_t>(basis_size),
                  static_cast<std::uint64_t>(trial));

  const TrajectoryDataset data(
      {simulate(env, static_cast<int>(cfg.training_length),
                derive_seed(trial_seed, 1))},
      env.num_actions(), env.num_obs());
  const std::vector<Sequence> histories =
      build_histories(data, cfg.history_max_len, cfg.history_max_count);
  Basis init = random_basis(data, basis_size, cfg.candidate_max_len,
                            derive_seed(trial_seed, 2), cfg.min_support);
  init.histories = histories;
  const Sequence test_seq = simulate(
      env, static_cast<int>(cfg.eval_length), derive_seed(trial_seed, 3));
  const WindowCounts counts(data,
                            cfg.history_max_len + 1 + cfg.candidate_max_len);

  EvalOptions eopts;
  eopts.exact_truth = cfg.exact_eval;
  eopts.truth_rollouts = cfg.eval_rollouts;
  eopts.seed = derive_seed(trial_seed, 5);

  SelectionConfig scfg;
  scfg.k = basis_size;
  scfg.n = cfg.replace_n;
  scfg.rounds = cfg.rounds;
  scfg.iter_num = cfg.iter_num;
  scfg.entropy_threshold = threshold;
  scfg.candidate_max_len = cfg.candidate_max_len;
  scfg.min_support = cfg.min_support;
  scfg.seed = derive_seed(trial_seed, 4);
  scfg.probe_length = cfg.probe_length;
  scfg.num_rollouts = cfg.rollouts;
  scfg.epsilon = cfg.epsilon;
  scfg.exact_mode = cfg.exact_entropy;
  scfg.bound_margin = cfg.bound_margin;

  std::vector<ResultRow> rows;
  const auto evaluate_tests = [&](const std::vector<Sequence>& tests) {
    const Basis basis{tests, histories};
    const PsrModel model = learn(estimate(data, basis, counts), cfg.rank);
    return evaluate(model, env, test_seq, eopts);
  };
  const EvalReport rep0 = evaluate_tests(init.tests);

  for (const std::string& strategy : cfg.strategies) {
    SelectionTrace trace;
    bool searched = false;
    if (strategy == "entropy") {
      trace = entropy_search(env, data, init, scfg).second;
      searched = true;
    } else if (strategy == "bound") {
      trace = bound_search(env, data, init, scfg, cfg.rank).second;
      searched = true;
    }

    rows.push_back({trial, strategy, 0, basis_size,
                    searched ? trace.initial_objective
                             : std::numeric_limits<double>::quiet_NaN(),
                    rep0.one_step_error, rep0.four_step_error,
                    rep0.degenerate_updates, rep0.clamp_events});
    if (!searched) continue;

    EvalReport last = rep0;
    for (int round = 1; round <= cfg.rounds; ++round) {
      const std::vector<Sequence>& tests =
          trace.round_tests[static_cast<std::size_t>(round - 1)];
      const bool same_as_before =
          round > 1
              ? tests == trace.round_tests[static_cast<std::size_t>(round - 2)]
              : tests == init.tests;
      if (!same_as_before) last = evaluate_tests(tests);
      rows.push_back({trial, strategy, round, basis_size,
                      trace.round_objective[static_cast<std::size_t>(round - 1)],
                      last.one_step_error, last.four_step_error,
                      last.degenerate_updates, last.clamp_events});
    }
  }
  return rows;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
  const Pomdp env = make_builtin(cfg.environment, cfg.env_seed);

  std::vector<ResultRow> rows;
  for (const int basis_size : cfg.basis_sizes) {
    const double threshold = threshold_for_size(cfg, basis_size);
    std::vector<std::vector<ResultRow>> per_trial(
        static_cast<std::size_t>(cfg.trials));
    if (cfg.workers <= 1) {
      for (int trial = 0; trial < cfg.trials; ++trial)
        per_trial[static_cast<std::size_t>(trial)] =
            run_trial(cfg, env, basis_size, threshold, trial);
    } else {
      // Trials are independent; results are joined in trial order, so the
      // output is identical for any worker count.
      int next = 0;
      while (next < cfg.trials) {
        const int batch = std::min(cfg.workers, cfg.trials - next);
        std::vector<std::future<std::vector<ResultRow>>> futures;
        futures.reserve(static_cast<std::size_t>(batch));
        for (int i = 0; i < batch; ++i) {
          const int trial = next + i;
          futures.push_back(std::async(std::launch::async, [&, trial] {
            return run_trial(cfg, env, basis_size, threshold, trial);
          }));
        }
        for (int i = 0; i < batch; ++i)
          per_trial[static_cast<std::size_t>(next + i)] = futures
              [static_cast<std::size_t>(i)]
                  .get();
        next += batch;
      }
    }
    for (const std::vector<ResultRow>& trial_rows : per_trial)
      rows.insert(rows.end(), trial_rows.begin(), trial_rows.end());
  }

  ExperimentOutput out;
  out.results_csv =
      "trial,strategy,round,basis_size,objective,one_step_error,"
      "four_step_error,degenerate_updates,clamp_events\n";
  for (const ResultRow& r : rows) {
    out.results_csv += std::to_string(r.trial) + "," + r.strategy + "," +
                       std::to_string(r.round) + "," +
                       std::to_string(r.basis_size) + "," +
                       format_double(r.objective) + "," +
                       format_double(r.one_step_error) + "," +
                       format_double(r.four_step_error) + "," +
                       std::to_string(r.degenerate_updates) + "," +
                       std::to_string(r.clamp_events) + "\n";
  }

  // Per-round mean curve of the one-step error, per strategy and basis size.
  out.round_curve_csv = "strategy,basis_size,round,mean,stderr\n";
  for (const std::string& strategy : cfg.strategies) {
    const int max_round = strategy == "initial" ? 0 : cfg.rounds;
    for (const int basis_size : cfg.basis_sizes) {
      for (int round = 0; round <= max_round; ++round) {
        std::vector<double> values;
        for (const ResultRow& r : rows)
          if (r.strategy == strategy && r.basis_size == basis_size &&
              r.round == round)
            values.push_back(r.one_step_error);
        if (values.empty()) continue;
        const Aggregate agg = aggregate(values);
        out.round_curve_csv += strategy + "," + std::to_string(basis_size) +
                               "," + std::to_string(round) + "," +
                               format_double(agg.mean) + "," +
                               format_double(agg.stderr_of_mean) + "\n";
      }
    }
  }

  // Final-round summary per strategy and basis size.
  out.basis_size_curve_csv = "strategy,basis_size,mean,stderr\n";
  for (const std::string& strategy : cfg.strategies) {
    const int max_round = strategy == "initial" ? 0 : cfg.rounds;
    for (const int basis_size : cfg.basis_sizes) {
      std::vector<double> values;
      for (const ResultRow& r : rows)
        if (r.strategy == strategy && r.basis_size == basis_size &&
            r.round == max_round)
          values.push_back(r.one_step_error);
      if (values.empty()) continue;
      const Aggregate agg = aggregate(values);
      out.basis_size_curve_csv += strategy + "," +
                                  std::to_string(basis_size) + "," +
                                  format_double(agg.mean) + "," +
                                  format_double(agg.stderr_of_mean) + "\n";
    }
  }

  out.manifest = "psrsel run manifest\n";
  out.manifest += "version " + std::string(kVersion) + "\n";
  out.manifest += "environment " + std::to_string(env.num_states()) +
                  " states, " + std::to_string(env.num_actions()) +
                  " actions, " + std::to_string(env.num_obs()) +
                  " observations\n";
  out.manifest += "\n# config echo (re-runnable as-is)\n";
  out.manifest += render_config(cfg);
  out.manifest += "\n# derived per-trial seeds\n";
  for (const int basis_size : cfg.basis_sizes)
    for (int trial = 0; trial < cfg.trials; ++trial)
      out.manifest +=
          "seed k=" + std::to_string(basis_size) + " trial=" +
          std::to_string(trial) + " " +
          std::to_string(derive_seed(cfg.master_seed,
                                     static_cast<std::uint64_t>(basis_size),
                                     static_cast<std::uint64_t>(trial))) +
          "\n";
  return out;
}

void write_experiment_output(const ExperimentOutput& out,
                             const std::string& dir) {
  const std::filesystem::path base(dir);
  write_text_file((base / "results.csv").string(), out.results_csv);
  write_text_file((base / "round_curve.csv").string(), out.round_curve_csv);
  write_text_file((base / "basis_size_curve.csv").string(),
                  out.basis_size_curve_csv);
  write_text_file((base / "manifest.txt").string(), out.manifest);
}

}  // namespace psrsel
