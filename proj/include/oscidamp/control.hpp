#pragma once

#include <cstddef>
#include <vector>

#include "oscidamp/matkit.hpp"
#include "oscidamp/model.hpp"

namespace oscidamp {

struct NotStabilizable : NumericError {
  using NumericError::NumericError;
};

struct NoConvergence : NumericError {
  using NumericError::NumericError;
};

struct SingularA : NumericError {
  using NumericError::NumericError;
};

struct SingularClosedLoop : NumericError {
  using NumericError::NumericError;
};

struct SingularLoop : NumericError {
  using NumericError::NumericError;
};

struct LqrWeights {
  Mat q;  // 2N x 2N, symmetric PSD
  Mat r;  // N x N, symmetric PD
};

/// Default weights: 10 on every angle state, 1 on every speed state, R = 2·I.
inline LqrWeights default_lqr_weights(std::size_t n_areas) {
  std::vector<double> qd(2 * n_areas, 1.0);
  for (std::size_t i = 0; i < n_areas; ++i) qd[i] = 10.0;
  return {Mat::diagonal(qd), 2.0 * Mat::identity(n_areas)};
}

enum class ControlMode { FD, SF, SDF };

struct GainSet {
  Mat ks;  // N x 2N state-feedback gain
  Mat ns;  // N x N reference gain
  Mat kn;  // N x 2N derivative-feedback gain (SDF only)
  Mat nn;  // N x N derivative reference gain (SDF only)
  ControlMode mode = ControlMode::SF;
};

/// f is Hurwitz iff the Lyapunov solution for q = I exists and is PD.
inline bool is_hurwitz(const Mat& f) {
  try {
    return is_positive_definite(lyapunov_solve(f, Mat::identity(f.rows())));
  } catch (const SingularMatrix&) {
    return false;  // eigenvalue pair summing to zero: not Hurwitz
  }
}

/// Ks_FD = [0 | kd·L] with L the (unweighted) tie-graph Laplacian acting on
/// the speed states. For two areas this is the classic frequency-difference
/// damping law u1 = -kd(Δω1 - Δω2), u2 = -u1.
inline Mat fd_gain(std::size_t n_areas, const std::vector<TieCoeff>& ties, double kd) {
  if (kd <= 0.0) throw std::invalid_argument("fd_gain: kd must be > 0");
  Mat ks(n_areas, 2 * n_areas);
  for (const auto& t : ties) {
    ks(t.i, n_areas + t.i) += kd;
    ks(t.i, n_areas + t.j) -= kd;
    ks(t.j, n_areas + t.j) += kd;
    ks(t.j, n_areas + t.i) -= kd;
  }
  return ks;
}

inline Mat care_residual(const StateSpace& ss, const LqrWeights& w, const Mat& p) {
  const Mat bt = ss.b.transpose();
  return ss.a.transpose() * p + p * ss.a - p * ss.b * lu_solve(w.r, bt * p) + w.q;
}

/// LQR gain via Newton-Kleinman iteration: each step solves one Lyapunov
/// equation for the current closed loop. Seed K0 = 0 is valid when the open
/// loop is Hurwitz; otherwise the caller must supply a stabilizing gain.
inline Mat lqr_gain(const StateSpace& ss, const LqrWeights& w, const Mat* k0 = nullptr) {
  const std::size_t n = ss.a.rows();
  const std::size_t m = ss.b.cols();
  Mat k = k0 ? *k0 : Mat(m, n);
  if (!is_hurwitz(ss.a - ss.b * k))
    throw NotStabilizable("lqr_gain: seed gain does not stabilize the plant");
  const Mat bt = ss.b.transpose();
  for (int iter = 0; iter < 50; ++iter) {
    const Mat f = ss.a - ss.b * k;
    const Mat q_eff = w.q + k.transpose() * (w.r * k);
    const Mat p = lyapunov_solve(f, q_eff);
    const Mat k_next = lu_solve(w.r, bt * p);
    const double step = (k_next - k).norm_inf();
    k = k_next;
    if (step < 1e-10) return k;
  }
  throw NoConvergence("lqr_gain: Newton-Kleinman did not converge in 50 iterations");
}

struct AssumptionReport {
  bool a_nonsingular = false;
  bool closed_loop_nonsingular = false;  // det(A - B Ks) != 0
  bool b_full_rank = false;
};

inline AssumptionReport validate_assumptions(const StateSpace& ss, const Mat& ks) {
  AssumptionReport rep;
  rep.a_nonsingular = !rank_deficient(ss.a);
  rep.closed_loop_nonsingular = !rank_deficient(ss.a - ss.b * ks);
  rep.b_full_rank = !rank_deficient(ss.b.transpose() * ss.b);
  return rep;
}

/// Derivative-feedback gains equivalent to (ks, ns):
///   kn = ks·(a - b·ks)⁻¹,  nn = (I + kn·b)·ns.
inline GainSet sdf_from_sf(const StateSpace& ss, const Mat& ks, const Mat& ns) {
  const AssumptionReport rep = validate_assumptions(ss, ks);
  if (!rep.a_nonsingular) throw SingularA("sdf_from_sf: state matrix is singular");
  if (!rep.closed_loop_nonsingular)
    throw SingularClosedLoop("sdf_from_sf: A - B Ks is singular");
  GainSet g;
  g.ks = ks;
  g.ns = ns;
  g.kn = ks * inverse(ss.a - ss.b * ks);
  g.nn = (Mat::identity(ss.b.cols()) + g.kn * ss.b) * ns;
  g.mode = ControlMode::SDF;
  return g;
}

/// Resolves the algebraic loop u = -kn(a x + b u): the unique fixed point is
/// u = -K_eff x with K_eff = (I + kn·b)⁻¹·kn·a. K_eff recovers the ks that
/// produced kn.
inline Mat effective_sdf_gain(const StateSpace& ss, const Mat& kn) {
  const Mat loop = Mat::identity(ss.b.cols()) + kn * ss.b;
  if (rank_deficient(loop)) throw SingularLoop("effective_sdf_gain: I + kn*b singular");
  return lu_solve(loop, kn * ss.a);
}

}  // namespace oscidamp
