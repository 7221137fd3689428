#pragma once

#include "hpdg/dg.hpp"
#include "hpdg/reconstruction.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace hpdg
{

/// Post-solve checks of the reconstructed flux and potential. Values are
/// absolute; the scales let callers form relative tolerances.
struct EquilibrationAudit
{
  /// max_T |(f + k^2 eps u - div sigma, 1)_T|
  double element_identity = 0.0;
  /// max_E |(sigma.n + g + iku - gamma k h/p X, 1)_E| over boundary edges,
  /// X = g - grad u . n + iku
  double boundary_identity = 0.0;
  /// max_E |[sigma.n]|_{L2(E)} over interior edges
  double normal_jump = 0.0;
  /// |f| + k^2 |eps u| + |div sigma| over the domain
  double volume_scale = 0.0;
  /// |g| + k |u| + |sigma.n| + gamma k |h/p X| over the boundary
  double boundary_scale = 0.0;
  /// |sigma| over the domain
  double flux_norm = 0.0;
};

EquilibrationAudit audit_equilibration(const Discretization& d, const Eigen::VectorXcd& u,
                                       const Reconstruction& rec);

struct PotentialAudit
{
  /// |(s, 1)_Omega|
  double mean = 0.0;
  /// |s|_Omega
  double norm = 0.0;
  /// |grad_h u - grad s|_Omega
  double broken_nonconformity = 0.0;
  /// |G(u) - grad s|_Omega
  double nonconformity = 0.0;
  /// max over patches of the optimality residual
  double optimality = 0.0;
};

PotentialAudit audit_potential(const Discretization& d, const Eigen::VectorXcd& u,
                               const DGGradient& grad, const Reconstruction& rec);

/// Broken field with f(t, x) on triangle t projected onto the element
/// degrees (exact when each restriction is a polynomial of that degree).
Eigen::VectorXcd project_field(const Discretization& d,
                               const std::function<complex(int, const Point&)>& f);

} // namespace hpdg
