#pragma once

#include "hpdg/mesh.hpp"

#include <vector>

namespace hpdg
{

/// Rule on an interval; points and weights are stored on the interval the
/// constructor documents.
struct LineRule
{
  std::vector<double> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return points.size(); }
};

/// Rule on the reference triangle (0,0), (1,0), (0,1); weights sum to 1/2.
struct TriangleRule
{
  std::vector<Point> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return points.size(); }
};

/// n-point Gauss-Jacobi rule on [-1,1] for the weight
/// (1-x)^alpha (1+x)^beta (Golub-Welsch).
LineRule gauss_jacobi(int n, double alpha, double beta);

/// Gauss-Legendre rule on [0,1] exact for polynomials of the given degree.
/// Cached; the reference stays valid for the lifetime of the program.
const LineRule& line_rule(int degree);

/// Collapsed Gauss rule on the reference triangle exact for polynomials of
/// the given degree. Cached.
const TriangleRule& triangle_rule(int degree);

/// Geometrically graded composite Gauss-Legendre rule on [0,1] refined
/// towards t = 0. Each of the levels+1 subintervals carries a rule of the
/// given degree.
LineRule graded_line_rule(int degree, double ratio = 0.5, int levels = 60);

/// Graded rule on the reference triangle refined towards reference vertex
/// `vertex` (Duffy collapse, graded in the radial direction).
TriangleRule graded_triangle_rule(int degree, int vertex, double ratio = 0.5,
                                  int levels = 40);

} // namespace hpdg
