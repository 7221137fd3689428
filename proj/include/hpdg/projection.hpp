#pragma once

#include "hpdg/mesh.hpp"
#include "hpdg/quadrature.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>

namespace hpdg
{

using complex = std::complex<double>;

/// L2(E) projection onto P_p(E) of f(t), t in [0,1] the edge parameter.
/// Returns coefficients in the basis sqrt(2j+1) P_j(2t-1). The projection
/// does not depend on |E|.
Eigen::VectorXcd project_edge(const std::function<complex(double)>& f, int p,
                              const LineRule& rule);

complex evaluate_edge(const Eigen::VectorXcd& coefficients, double t);

/// L2(T) projection onto P_p(T) of f(x) on mesh triangle t, in the physical
/// orthonormal basis q_l = q^_l / sqrt(det B).
Eigen::VectorXcd project_element(const Mesh& mesh, int t,
                                 const std::function<complex(const Point&)>& f,
                                 int p, const TriangleRule& rule);

/// Value at physical point x of triangle t of a field given in the physical
/// orthonormal Dubiner basis.
complex evaluate_element(const Mesh& mesh, int t, const Eigen::VectorXcd& coefficients,
                         const Point& x);

/// Reference coordinates of physical point x in triangle t.
Point to_reference(const Mesh& mesh, int t, const Point& x);

} // namespace hpdg
