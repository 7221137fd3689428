#pragma once

#include "hpdg/mesh.hpp"
#include "hpdg/quadrature.hpp"

#include <Eigen/Dense>

#include <span>

namespace hpdg
{

/// dim P_p on a triangle
constexpr int scalar_dim(int p)
{
  return p < 0 ? 0 : (p + 1) * (p + 2) / 2;
}

/// Values (and optionally reference derivatives) of the L2(T^)-orthonormal
/// Dubiner basis of total degree <= p, ordered by total degree.
void dubiner(int p, const Point& xi, Eigen::Ref<Eigen::VectorXd> values,
             Eigen::VectorXd* dxi = nullptr, Eigen::VectorXd* deta = nullptr);

/// Index of the Dubiner function Q_i P_j with i + j = n, j = 0..n.
constexpr int dubiner_index(int n, int j)
{
  return n * (n + 1) / 2 + j;
}

/// Jacobi polynomials P_0..P_n^{(a,b)}(x) and derivatives.
void jacobi(int n, double a, double b, double x, Eigen::Ref<Eigen::VectorXd> values,
            Eigen::VectorXd* derivatives = nullptr);

/// sqrt(2j+1) P_j(2t-1), j = 0..n: orthonormal on [0,1].
void legendre01(int n, double t, Eigen::Ref<Eigen::VectorXd> values);

/// Basis values at points, one row per point.
struct Tabulation
{
  Eigen::MatrixXd values;
  Eigen::MatrixXd dxi;
  Eigen::MatrixXd deta;
};

Tabulation tabulate_dubiner(int p, std::span<const Point> points);

/// Dubiner tabulation on triangle_rule(degree). Cached.
const Tabulation& reference_tabulation(int p, int degree);

/// Dubiner tabulation on line_rule(degree) mapped to local edge `edge` of
/// the reference triangle, traversed from vertex edge+1 to vertex edge+2.
/// Cached.
const Tabulation& edge_tabulation(int p, int degree, int edge);

/// Reference coordinates of parameter t on local edge `edge`.
Point reference_edge_point(int edge, double t);

} // namespace hpdg
