#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "oscidamp/matkit.hpp"

namespace oscidamp {

struct InconsistentRegularity : NumericError {
  using NumericError::NumericError;
};

struct AreaParams {
  double inertia_s = 0.0;   // M_i, must be > 0
  double damping_pu = 0.0;  // D_i, >= 0
};

struct TieCoeff {
  std::size_t i = 0;
  std::size_t j = 0;
  double torque_pu = 0.0;  // synchronizing torque coefficient, > 0
};

struct TieNetwork {
  std::size_t n_areas = 0;
  std::vector<TieCoeff> ties;
  std::vector<double> stiffness_eps;  // per-area ε_i >= 0
};

struct PowerSystem {
  std::vector<AreaParams> areas;
  TieNetwork network;
  double f_nom_hz = 60.0;
};

/// Assembled small-signal pair. State ordering is (Δδ_1..Δδ_N, Δω_1..Δω_N);
/// inputs are the per-area injected powers u_1..u_N.
struct StateSpace {
  Mat a;  // 2N x 2N
  Mat b;  // 2N x N
  std::size_t n_areas = 0;
};

inline bool tie_graph_connected(const TieNetwork& net) {
  if (net.n_areas <= 1) return true;
  std::vector<bool> seen(net.n_areas, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    for (const auto& t : net.ties) {
      std::size_t w = net.n_areas;  // sentinel
      if (t.i == v) w = t.j;
      else if (t.j == v) w = t.i;
      if (w < net.n_areas && !seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

/// Laplacian-structured synchronizing-torque matrix with self-stiffness:
/// off-diagonal (i,j) = -T_ij, diagonal (i,i) = (1 + ε_i)·Σ_j T_ij.
inline Mat build_torque_matrix(const TieNetwork& net) {
  Mat t(net.n_areas, net.n_areas);
  for (const auto& tc : net.ties) {
    t(tc.i, tc.j) -= tc.torque_pu;
    t(tc.j, tc.i) -= tc.torque_pu;
    t(tc.i, tc.i) += tc.torque_pu;
    t(tc.j, tc.j) += tc.torque_pu;
  }
  for (std::size_t i = 0; i < net.n_areas; ++i) {
    const double eps = i < net.stiffness_eps.size() ? net.stiffness_eps[i] : 0.0;
    t(i, i) *= 1.0 + eps;
  }
  return t;
}

/// a = [[0, I], [-M⁻¹T, -M⁻¹D]], b = [[0], [M⁻¹]].
inline StateSpace assemble_state_space(const PowerSystem& sys) {
  const std::size_t n = sys.network.n_areas;
  const Mat t = build_torque_matrix(sys.network);
  StateSpace ss{Mat(2 * n, 2 * n), Mat(2 * n, n), n};
  for (std::size_t i = 0; i < n; ++i) {
    const double inv_m = 1.0 / sys.areas[i].inertia_s;
    ss.a(i, n + i) = 1.0;
    for (std::size_t j = 0; j < n; ++j) ss.a(n + i, j) = -inv_m * t(i, j);
    ss.a(n + i, n + i) = -inv_m * sys.areas[i].damping_pu;
    ss.b(n + i, i) = inv_m;
  }
  return ss;
}

struct RegularityReport {
  bool a_singular = false;
  bool t_singular = false;
  // smallest uniform ε in [0.03, 0.10] that restores regularity, when singular
  std::optional<double> suggested_eps;
};

inline RegularityReport check_regularity(const StateSpace& ss, const TieNetwork& net) {
  RegularityReport rep;
  rep.a_singular = rank_deficient(ss.a);
  rep.t_singular = rank_deficient(build_torque_matrix(net));
  if (rep.a_singular != rep.t_singular)
    throw InconsistentRegularity("check_regularity: A and T disagree on singularity");
  if (rep.t_singular) {
    for (double eps = 0.03; eps <= 0.10 + 1e-12; eps += 0.01) {
      TieNetwork trial = net;
      trial.stiffness_eps.assign(net.n_areas, eps);
      if (!rank_deficient(build_torque_matrix(trial))) {
        rep.suggested_eps = eps;
        break;
      }
    }
  }
  return rep;
}

}  // namespace oscidamp
