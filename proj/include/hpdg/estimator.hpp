#pragma once

#include "hpdg/benchmarks.hpp"
#include "hpdg/dg.hpp"
#include "hpdg/exec.hpp"
#include "hpdg/reconstruction.hpp"

#include <vector>

namespace hpdg
{

/// C_tr^2 = (1/j + 1/j^2) h_T^2 / |T| with j the first root of J_1.
double trace_constant(const ElementGeometry& geometry);

struct ElementIndicator
{
  /// |G(u) + sigma|_T
  double flux = 0.0;
  /// h_T / j |f + k^2 eps u - div sigma|_T
  double volume = 0.0;
  /// C_tr sum_E h_E^{1/2} |boundary misfit|_E over boundary edges of T
  double boundary = 0.0;
  /// |G(u) - grad s|_T
  double nonconformity = 0.0;

  /// The element's contribution to eta^2.
  double squared() const
  {
    const double a = flux + volume + boundary;
    return a * a + nonconformity * nonconformity;
  }
};

struct EstimatorReport
{
  std::vector<ElementIndicator> elements;
  /// eta_T = sqrt(squared()), the marking indicator
  std::vector<double> indicators;
  double eta = 0.0;
  /// l2 sums of the individual terms over all elements
  double eta_flux = 0.0;
  double eta_vol = 0.0;
  double eta_bnd = 0.0;
  double eta_noncf = 0.0;
  double osc_f = 0.0;
  double osc_g = 0.0;
};

EstimatorReport estimate(const Discretization& d, const Eigen::VectorXcd& u,
                         const DGGradient& grad, const Reconstruction& rec,
                         Exec exec = Exec::parallel);

struct ResidualReport
{
  /// per element: volume term plus half of each adjacent interior edge
  /// term and the full boundary edge terms, all squared
  std::vector<double> indicators2;
  double eta = 0.0;
  double volume = 0.0;
  double gradient_jump = 0.0;
  double value_jump = 0.0;
  double boundary = 0.0;
};

/// Residual estimator with h_T^2/p_T^2 volume weight, beta h/p and
/// alpha p^2/h jump weights and h boundary weight.
ResidualReport estimate_residual(const Discretization& d, const Eigen::VectorXcd& u,
                                 Exec exec = Exec::parallel);

struct TrueError
{
  /// |grad u - G(u_hp)|
  double grad = 0.0;
  /// |grad_h (u - u_hp)|
  double broken_grad = 0.0;
  /// k^2 |u - u_hp|
  double l2 = 0.0;
  /// k |u - u_hp|_dOmega
  double boundary = 0.0;
};

TrueError true_error(const Discretization& d, const Eigen::VectorXcd& u,
                     const DGGradient& grad, const ExactSolution& exact,
                     int extra_degree = 0, Exec exec = Exec::parallel);

} // namespace hpdg
