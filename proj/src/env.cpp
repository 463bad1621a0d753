#include "psrsel/env.hpp"

#include <cmath>
#include <span>

#include "psrsel/errors.hpp"
#include "psrsel/rng.hpp"

namespace psrsel {

namespace {

void check_stochastic_rows(const RowMatrix& m, const std::string& what) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) < 0.0)
        throw ConfigError(what + ": negative entry at row " +
                          std::to_string(i));
      sum += m(i, j);
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw ConfigError(what + ": row " + std::to_string(i) +
                        " sums to " + std::to_string(sum));
  }
}

std::span<const double> row_span(const RowMatrix& m, int i) {
  return {m.data() + static_cast<std::size_t>(i) * m.cols(),
          static_cast<std::size_t>(m.cols())};
}

}  // namespace

Pomdp::Pomdp(std::vector<RowMatrix> transition, std::vector<RowMatrix> emission,
             Eigen::VectorXd initial_belief)
    : transition_(std::move(transition)),
      emission_(std::move(emission)),
      initial_belief_(std::move(initial_belief)) {
  if (transition_.empty() || transition_.size() != emission_.size())
    throw ConfigError("Pomdp: need one transition and one emission matrix per action");
  num_states_ = static_cast<int>(transition_[0].rows());
  num_obs_ = static_cast<int>(emission_[0].cols());
  if (num_states_ <= 0 || num_obs_ <= 0)
    throw ConfigError("Pomdp: empty state or observation space");
  for (std::size_t a = 0; a < transition_.size(); ++a) {
    const std::string tag = "action " + std::to_string(a);
    if (transition_[a].rows() != num_states_ ||
        transition_[a].cols() != num_states_)
      throw DimensionMismatch("Pomdp transition " + tag + ": wrong shape");
    if (emission_[a].rows() != num_states_ || emission_[a].cols() != num_obs_)
      throw DimensionMismatch("Pomdp emission " + tag + ": wrong shape");
    check_stochastic_rows(transition_[a], "Pomdp transition " + tag);
    check_stochastic_rows(emission_[a], "Pomdp emission " + tag);
  }
  if (initial_belief_.size() != num_states_)
    throw DimensionMismatch("Pomdp: initial belief has wrong length");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < initial_belief_.size(); ++i) {
    if (initial_belief_(i) < 0.0)
      throw ConfigError("Pomdp: negative initial belief entry");
    sum += initial_belief_(i);
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ConfigError("Pomdp: initial belief sums to " + std::to_string(sum));
}

ProbeRun simulate_probe(const Pomdp& model, int length, std::uint64_t seed) {
  if (length < 1) throw ConfigError("simulate: length must be >= 1");
  Rng rng(seed);
  const int A = model.num_actions();
  const Eigen::VectorXd& b0 = model.initial_belief();

  ProbeRun run;
  run.seq.pairs.reserve(static_cast<std::size_t>(length));
  run.states.reserve(static_cast<std::size_t>(length) + 1);
  run.states.push_back(Belief{b0});

  int s = rng.categorical({b0.data(), static_cast<std::size_t>(b0.size())});
  Eigen::VectorXd belief = b0;
  for (int step = 0; step < length; ++step) {
    const int a = rng.uniform_int(A);
    const int s_next = rng.categorical(row_span(model.transition(a), s));
    const int o = rng.categorical(row_span(model.emission(a), s_next));
    run.seq.pairs.push_back({a, o});
    s = s_next;
    // Posterior update: b'(j) ∝ Pr(o | j, a) Σ_i b(i) T_a(i, j).
    Eigen::VectorXd next =
        (belief.transpose() * model.transition(a)).transpose().cwiseProduct(
            model.emission(a).col(o));
    const double z = next.sum();
    // z > 0 is guaranteed: the sampled (s_next, o) has positive probability.
    belief = next / z;
    run.states.push_back(Belief{belief});
  }
  return run;
}

Sequence simulate(const Pomdp& model, int length, std::uint64_t seed) {
  return simulate_probe(model, length, seed).seq;
}

namespace {

// One belief-propagation step; returns the observation probability
// Pr(o | belief, a) and overwrites the belief with the (unnormalized)
// posterior.
double step_unnormalized(const Pomdp& model, Eigen::VectorXd& belief, int a,
                         int o) {
  belief = (belief.transpose() * model.transition(a))
               .transpose()
               .cwiseProduct(model.emission(a).col(o));
  return belief.sum();
}

}  // namespace

Belief propagate(const Pomdp& model, Belief b, const Sequence& seq) {
  for (const ActionObs& p : seq.pairs) {
    const double z = step_unnormalized(model, b.probs, p.action, p.obs);
    if (z <= 0.0)
      throw UndefinedConditional("propagate: zero-probability step " +
                                 Sequence({p}).to_string());
    b.probs /= z;
  }
  return b;
}

double exact_prediction_from(const Pomdp& model, const EnvState& state,
                             const Sequence& t) {
  Eigen::VectorXd belief = state.probs;
  double prob = 1.0;
  for (const ActionObs& p : t.pairs) {
    const double z = step_unnormalized(model, belief, p.action, p.obs);
    prob *= z;
    if (z <= 0.0) return 0.0;
    belief /= z;
  }
  return prob;
}

double exact_prediction(const Pomdp& model, const Sequence& h,
                        const Sequence& t) {
  Belief at_h{model.initial_belief()};
  try {
    at_h = propagate(model, std::move(at_h), h);
  } catch (const UndefinedConditional&) {
    throw UndefinedConditional("exact_prediction: history " + h.to_string() +
                               " has probability zero");
  }
  return exact_prediction_from(model, at_h, t);
}

double rollout_prediction(const Pomdp& model, const EnvState& state_at_h,
                          const Sequence& t, int num_rollouts,
                          std::uint64_t seed) {
  if (num_rollouts < 1)
    throw ConfigError("rollout_prediction: need at least one rollout");
  Rng rng(seed);
  const std::span<const double> belief{
      state_at_h.probs.data(), static_cast<std::size_t>(state_at_h.probs.size())};
  int hits = 0;
  for (int r = 0; r < num_rollouts; ++r) {
    int s = rng.categorical(belief);
    bool match = true;
    for (const ActionObs& p : t.pairs) {
      s = rng.categorical(row_span(model.transition(p.action), s));
      const int o = rng.categorical(row_span(model.emission(p.action), s));
      if (o != p.obs) {
        match = false;
        break;
      }
    }
    if (match) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(num_rollouts);
}

namespace {

// Stationary distribution of the uniform-policy state chain, by power
// iteration.  Used as the initial belief of the built-in fixtures so that
// sliding-window estimates from one long trajectory are unbiased for the
// exact Hankel entries computed from the initial belief.
Eigen::VectorXd uniform_policy_stationary(const std::vector<RowMatrix>& trans) {
  const Eigen::Index n = trans[0].rows();
  RowMatrix mean = RowMatrix::Zero(n, n);
  for (const RowMatrix& t : trans) mean += t;
  mean /= static_cast<double>(trans.size());
  Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < 100000; ++it) {
    Eigen::VectorXd next = (pi.transpose() * mean).transpose();
    next /= next.sum();
    const double delta = (next - pi).cwiseAbs().sum();
    pi = next;
    if (delta < 1e-15) break;
  }
  return pi / pi.sum();
}

Pomdp make_two_state_noisy() {
  // Action 0 tends to keep the latent state, action 1 tends to flip it;
  // observations are noisy reads of the arrived-at state.  The tables are
  // symmetric under swapping the two states, so the uniform-policy
  // stationary distribution is exactly (1/2, 1/2).
  RowMatrix t0(2, 2), t1(2, 2), e0(2, 2), e1(2, 2);
  t0 << 0.90, 0.10,
        0.10, 0.90;
  t1 << 0.15, 0.85,
        0.85, 0.15;
  e0 << 0.85, 0.15,
        0.15, 0.85;
  e1 << 0.70, 0.30,
        0.30, 0.70;
  Eigen::VectorXd b0(2);
  b0 << 0.5, 0.5;
  return Pomdp({t0, t1}, {e0, e1}, b0);
}

Pomdp make_ring_world() {
  // Five states on a ring; action 0 steps clockwise and action 1
  // counter-clockwise, each with slip probability 0.1 (stay put).  The
  // observation is the state's color (two colors) read with 10% noise.
  const int n = 5;
  RowMatrix t0 = RowMatrix::Zero(n, n), t1 = RowMatrix::Zero(n, n);
  for (int s = 0; s < n; ++s) {
    t0(s, (s + 1) % n) = 0.9;
    t0(s, s) = 0.1;
    t1(s, (s + n - 1) % n) = 0.9;
    t1(s, s) = 0.1;
  }
  const int color[n] = {0, 1, 0, 1, 1};
  RowMatrix e(n, 2);
  for (int s = 0; s < n; ++s) {
    e(s, color[s]) = 0.9;
    e(s, 1 - color[s]) = 0.1;
  }
  std::vector<RowMatrix> trans{t0, t1};
  return Pomdp(trans, {e, e}, uniform_policy_stationary(trans));
}

Pomdp make_mini_grid() {
  // 3x3 gridworld, cells indexed row-major.  Two interior wall segments
  // (south of cell 1, east of cell 4) plus the outer boundary.  Actions
  // move N/E/S/W with probability 0.85 (blocked moves stay put) and slip
  // in place with probability 0.15.  The observation is the 4-bit wall
  // adjacency mask (N=1, E=2, S=4, W=8) of the arrived-at cell, each bit
  // flipped independently with probability 0.05.
  const int rows = 3, cols = 3, n = rows * cols;
  const int num_obs = 16;
  auto cell = [&](int r, int c) { return r * cols + c; };

  // wall[s][d]: is direction d (0=N,1=E,2=S,3=W) blocked from cell s?
  bool wall[9][4] = {};
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int s = cell(r, c);
      wall[s][0] = (r == 0);
      wall[s][1] = (c == cols - 1);
      wall[s][2] = (r == rows - 1);
      wall[s][3] = (c == 0);
    }
  }
  auto add_wall = [&](int s1, int d1, int s2, int d2) {
    wall[s1][d1] = true;
    wall[s2][d2] = true;
  };
  add_wall(cell(0, 1), 2, cell(1, 1), 0);  // south of cell 1
  add_wall(cell(1, 1), 1, cell(1, 2), 3);  // east of cell 4

  const int dr[4] = {-1, 0, 1, 0};
  const int dc[4] = {0, 1, 0, -1};
  std::vector<RowMatrix> trans(4, RowMatrix::Zero(n, n));
  for (int d = 0; d < 4; ++d) {
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const int s = cell(r, c);
        const int dest = wall[s][d] ? s : cell(r + dr[d], c + dc[d]);
        trans[d](s, dest) += 0.85;
        trans[d](s, s) += 0.15;
      }
    }
  }

  RowMatrix e(n, num_obs);
  const double flip = 0.05;
  for (int s = 0; s < n; ++s) {
    int mask = 0;
    for (int d = 0; d < 4; ++d)
      if (wall[s][d]) mask |= (1 << d);
    for (int o = 0; o < num_obs; ++o) {
      double p = 1.0;
      for (int d = 0; d < 4; ++d) {
        const bool same = ((o >> d) & 1) == ((mask >> d) & 1);
        p *= same ? (1.0 - flip) : flip;
      }
      e(s, o) = p;
    }
  }
  std::vector<RowMatrix> emis(4, e);
  return Pomdp(trans, emis, uniform_policy_stationary(trans));
}

Pomdp make_random_pomdp(int n, int num_actions, int num_obs,
                        std::uint64_t seed) {
  Rng rng(derive_seed(seed, 0xd1551e7u));
  auto dirichlet_row = [&](int dim, double* out) {
    double sum = 0.0;
    for (int i = 0; i < dim; ++i) {
      // Exponential(1) draws normalized to the simplex (symmetric
      // Dirichlet with unit concentration).
      out[i] = -std::log1p(-rng.uniform());
      sum += out[i];
    }
    for (int i = 0; i < dim; ++i) out[i] /= sum;
  };
  std::vector<RowMatrix> trans, emis;
  for (int a = 0; a < num_actions; ++a) {
    RowMatrix t(n, n);
    for (int s = 0; s < n; ++s) dirichlet_row(n, t.data() + s * n);
    trans.push_back(std::move(t));
  }
  for (int a = 0; a < num_actions; ++a) {
    RowMatrix e(n, num_obs);
    for (int s = 0; s < n; ++s) dirichlet_row(num_obs, e.data() + s * num_obs);
    emis.push_back(std::move(e));
  }
  Eigen::VectorXd b0 = uniform_policy_stationary(trans);
  return Pomdp(std::move(trans), std::move(emis), std::move(b0));
}

}  // namespace

Pomdp make_builtin(const std::string& name, std::uint64_t seed) {
  if (name == "two-state-noisy") return make_two_state_noisy();
  if (name == "ring-world") return make_ring_world();
  if (name == "mini-grid") return make_mini_grid();
  const std::string prefix = "random-pomdp-";
  if (name.rfind(prefix, 0) == 0) {
    const auto malformed = [&]() {
      return UnknownEnvironment("make_builtin: malformed name '" + name +
                                "' (want random-pomdp-S-A-O)");
    };
    int dims[3] = {0, 0, 0};
    std::size_t pos = prefix.size();
    for (int i = 0; i < 3; ++i) {
      const std::size_t next = name.find('-', pos);
      if ((i < 2) != (next != std::string::npos)) throw malformed();
      const std::string part = name.substr(pos, next - pos);
      if (part.empty() ||
          part.find_first_not_of("0123456789") != std::string::npos)
        throw malformed();
      try {
        dims[i] = std::stoi(part);
      } catch (const std::exception&) {
        throw malformed();
      }
      pos = next + 1;
    }
    if (dims[0] < 1 || dims[1] < 1 || dims[2] < 1)
      throw UnknownEnvironment("make_builtin: sizes must be positive in '" +
                               name + "'");
    return make_random_pomdp(dims[0], dims[1], dims[2], seed);
  }
  throw UnknownEnvironment("make_builtin: unknown environment '" + name + "'");
}

}  // namespace psrsel
