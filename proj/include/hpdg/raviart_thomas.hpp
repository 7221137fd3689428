#pragma once

#include "hpdg/mesh.hpp"
#include "hpdg/polynomials.hpp"

#include <Eigen/Dense>

namespace hpdg
{

/// dim RT_p on a triangle
constexpr int rt_dim(int p)
{
  return (p + 1) * (p + 3);
}

/// Reference Raviart-Thomas element of degree p.
///
/// Degrees of freedom: for each local edge i (same convention as Mesh) the
/// moments of phi.n against sqrt(2j+1) P_j(2t-1), j = 0..p, with t the
/// edge parameter running from vertex i+1 to vertex i+2; then the interior
/// moments against [P_{p-1}]^2 (x components first). The basis is dual to
/// these functionals, so on edge i the normal trace of a field with edge
/// dofs c is sum_j c_j q_j(t) / |e|.
struct RTElement
{
  int p = 0;
  int dim = 0;
  /// basis_k = sum_m coefficients(m, k) * spanning_m
  Eigen::MatrixXd coefficients;
  /// 2-norm condition number of the dof matrix
  double condition = 0.0;

  /// Mass blocks int phi_k,a phi_l,b over the reference triangle
  Eigen::MatrixXd mass_xx, mass_xy, mass_yy;
  /// divergence(l, k) = int div phi_k q_l, q_l orthonormal Dubiner of degree p
  Eigen::MatrixXd divergence;
  /// Projection of each component onto orthonormal Dubiner of degree p+1:
  /// project_x(l, k) = int phi_k,x q_l
  Eigen::MatrixXd project_x, project_y;

  int edge_dof(int edge, int j) const { return edge * (p + 1) + j; }
  int num_edge_dofs() const { return 3 * (p + 1); }

  /// Basis values at a reference point: rows are basis functions, columns
  /// x and y components.
  void evaluate(const Point& xi, Eigen::MatrixXd& values, Eigen::VectorXd& div) const;
};

/// Cached reference element of degree p.
const RTElement& rt_element(int p);

/// Reference basis on triangle_rule(degree), one row per point.
struct RTTabulation
{
  Eigen::MatrixXd x, y, div;
};

/// Cached.
const RTTabulation& rt_tabulation(int p, int degree);

} // namespace hpdg
