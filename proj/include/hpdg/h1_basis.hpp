#pragma once

#include "hpdg/mesh.hpp"
#include "hpdg/polynomials.hpp"

#include <Eigen/Dense>

#include <array>

namespace hpdg
{

/// Hierarchical H1-conforming basis of degree P >= 1 on a triangle.
///
/// Local ordering: the three vertex functions lambda_i; then for each local
/// edge i (between vertices i+1 and i+2) the P-1 functions
/// lambda_a lambda_b P_n(lambda_b - lambda_a), n = 0..P-2, where a is the
/// endpoint with the smaller global index; then the interior bubbles
/// lambda_0 lambda_1 lambda_2 times orthonormal Dubiner functions of degree
/// P-3. Orienting edges by global index makes traces agree between
/// neighbours.
struct H1Basis
{
  int P = 1;

  int dim() const { return scalar_dim(P); }
  int edge_offset(int edge) const { return 3 + edge * (P - 1); }
  int bubble_offset() const { return 3 + 3 * (P - 1); }

  /// Values and reference gradients at xi.
  void evaluate(const std::array<int, 3>& global_vertices, const Point& xi,
                Eigen::VectorXd& values, Eigen::VectorXd& dxi,
                Eigen::VectorXd& deta) const;
};

} // namespace hpdg
