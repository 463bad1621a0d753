#include "psrsel/spectral.hpp"

#include <cmath>

#include "psrsel/errors.hpp"
#include "psrsel/linalg.hpp"

namespace psrsel {

PsrModel learn(const HankelEstimates& est, int k, double sv_floor) {
  const int num_t = static_cast<int>(est.p_th.rows());
  const int num_h = static_cast<int>(est.p_th.cols());
  if (k < 1) throw DimensionMismatch("learn: rank must be >= 1");
  if (k > std::min(num_t, num_h))
    throw DimensionMismatch("learn: rank " + std::to_string(k) +
                            " exceeds min(|T|, |H|) = " +
                            std::to_string(std::min(num_t, num_h)));
  if (est.p_h.size() != num_h)
    throw DimensionMismatch("learn: p_h length does not match histories");
  int eps_col = -1;
  for (std::size_t j = 0; j < est.basis.histories.size(); ++j)
    if (est.basis.histories[j].empty()) {
      eps_col = static_cast<int>(j);
      break;
    }
  if (eps_col < 0)
    throw ConfigError(
        "learn: basis must include the empty history (reference column)");

  PsrModel model;
  model.requested_rank = k;

  const ThinSvd svd = thin_svd(est.p_th);
  const double sigma_max = svd.s.size() > 0 ? svd.s(0) : 0.0;
  int effective = 0;
  for (int i = 0; i < k && i < svd.s.size(); ++i)
    if (svd.s(i) > sv_floor * sigma_max) ++effective;
  if (effective == 0)
    throw DimensionMismatch("learn: Hankel estimate is numerically zero");
  model.rank = effective;
  model.rank_deficient = effective < k;
  model.U = svd.u.leftCols(effective);

  const Eigen::MatrixXd c = model.U.transpose() * est.p_th;  // rank×|H|
  const Eigen::MatrixXd c_pinv = pseudo_inverse(c);

  model.b_star = model.U.transpose() * est.p_th.col(eps_col);
  model.b_inf = pseudo_inverse(c.transpose()) * est.p_h;
  for (const auto& [ao, mat] : est.p_t_ao_h)
    model.B_ao.emplace(ao, model.U.transpose() * mat * c_pinv);
  model.basis = est.basis;

  return model;
}

PsrState initial_state(const PsrModel& model) {
  return PsrState{model.b_star};
}

std::pair<PsrState, double> filter_step(const PsrModel& model,
                                        const PsrState& state, int a, int o) {
  const auto it = model.B_ao.find({a, o});
  if (it == model.B_ao.end())
    throw DimensionMismatch("filter_step: no update matrix for (a" +
                            std::to_string(a) + ",o" + std::to_string(o) +
                            ")");
  const Eigen::VectorXd next = it->second * state.vector;
  const double z = model.b_inf.dot(next);
  if (std::abs(z) < 1e-12) throw DegenerateUpdate(z);
  return {PsrState{next / z}, z};
}

double sequence_probability(const PsrModel& model, const Sequence& seq) {
  Eigen::VectorXd v = model.b_star;
  for (const ActionObs& p : seq.pairs) {
    const auto it = model.B_ao.find({p.action, p.obs});
    if (it == model.B_ao.end())
      throw DimensionMismatch("sequence_probability: no update matrix for " +
                              Sequence({p}).to_string());
    v = it->second * v;
  }
  return model.b_inf.dot(v);
}

double multi_step_prediction(const PsrModel& model, const PsrState& state,
                             const Sequence& future) {
  Eigen::VectorXd v = state.vector;
  for (const ActionObs& p : future.pairs) {
    const auto it = model.B_ao.find({p.action, p.obs});
    if (it == model.B_ao.end())
      throw DimensionMismatch("multi_step_prediction: no update matrix for " +
                              Sequence({p}).to_string());
    v = it->second * v;
  }
  return model.b_inf.dot(v);
}

}  // namespace psrsel
