#include "hpdg/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace hpdg
{

LineRule gauss_jacobi(int n, double alpha, double beta)
{
  if (n < 1)
    throw std::invalid_argument("gauss_jacobi: need at least one point");
  const double ab = alpha + beta;
  Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
  for (int i = 0; i < n; ++i)
  {
    const double t = 2.0 * i + ab;
    diag(i) = (i == 0) ? (beta - alpha) / (ab + 2.0)
                       : (beta * beta - alpha * alpha) / (t * (t + 2.0));
  }
  for (int i = 1; i < n; ++i)
  {
    const double t = 2.0 * i + ab;
    sub(i - 1) = std::sqrt(4.0 * i * (i + alpha) * (i + beta) * (i + ab)
                           / (t * t * (t + 1.0) * (t - 1.0)));
  }

  LineRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0)
                              + std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
  if (n == 1)
  {
    rule.points[0] = diag(0);
    rule.weights[0] = mu0;
  }
  else
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
    for (int i = 0; i < n; ++i)
    {
      rule.points[i] = eig.eigenvalues()(i);
      const double v = eig.eigenvectors()(0, i);
      rule.weights[i] = mu0 * v * v;
    }
  }
  rule.degree = 2 * n - 1;
  return rule;
}

namespace
{

LineRule make_line_rule(int degree)
{
  const int n = std::max(1, (degree + 2) / 2);
  LineRule gl = gauss_jacobi(n, 0.0, 0.0);
  LineRule r;
  r.degree = degree;
  r.points.resize(n);
  r.weights.resize(n);
  // symmetrize so that reversed edge traversals hit identical points
  for (int i = 0; i < n; ++i)
  {
    const int j = n - 1 - i;
    r.points[i] = 0.25 * (gl.points[i] - gl.points[j]) + 0.5;
    r.weights[i] = 0.25 * (gl.weights[i] + gl.weights[j]);
  }
  for (int i = 0; i < n / 2; ++i)
    r.points[n - 1 - i] = 1.0 - r.points[i];
  if (n % 2 == 1)
    r.points[n / 2] = 0.5;
  return r;
}

TriangleRule make_triangle_rule(int degree)
{
  const int n = std::max(1, (degree + 2) / 2);
  const LineRule a = gauss_jacobi(n, 0.0, 0.0);
  const LineRule b = gauss_jacobi(n, 1.0, 0.0);
  TriangleRule r;
  r.degree = degree;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
    {
      const double xi = 0.25 * (1.0 + a.points[i]) * (1.0 - b.points[j]);
      const double eta = 0.5 * (1.0 + b.points[j]);
      r.points.emplace_back(xi, eta);
      r.weights.push_back(a.weights[i] * b.weights[j] / 8.0);
    }
  return r;
}

template <class Rule, class Make>
const Rule& cached(std::map<int, Rule>& cache, std::mutex& m, int degree, Make make)
{
  if (degree < 0)
    throw std::invalid_argument("negative quadrature degree");
  std::lock_guard lock(m);
  auto it = cache.find(degree);
  if (it == cache.end())
    it = cache.emplace(degree, make(degree)).first;
  return it->second;
}

} // namespace

const LineRule& line_rule(int degree)
{
  static std::map<int, LineRule> cache;
  static std::mutex m;
  return cached(cache, m, degree, make_line_rule);
}

const TriangleRule& triangle_rule(int degree)
{
  static std::map<int, TriangleRule> cache;
  static std::mutex m;
  return cached(cache, m, degree, make_triangle_rule);
}

LineRule graded_line_rule(int degree, double ratio, int levels)
{
  const LineRule& base = line_rule(degree);
  LineRule r;
  r.degree = degree;
  auto add = [&](double lo, double hi) {
    for (std::size_t q = 0; q < base.size(); ++q)
    {
      r.points.push_back(lo + (hi - lo) * base.points[q]);
      r.weights.push_back((hi - lo) * base.weights[q]);
    }
  };
  add(0.0, std::pow(ratio, levels));
  for (int l = levels - 1; l >= 0; --l)
    add(std::pow(ratio, l + 1), std::pow(ratio, l));
  return r;
}

TriangleRule graded_triangle_rule(int degree, int vertex, double ratio, int levels)
{
  if (vertex < 0 || vertex > 2)
    throw std::invalid_argument("graded_triangle_rule: vertex must be 0, 1 or 2");
  // radial factor s carries the Duffy Jacobian, hence one extra degree
  const LineRule radial = graded_line_rule(degree + 1, ratio, levels);
  const LineRule& angular = line_rule(degree);
  const Point verts[3] = {Point(0, 0), Point(1, 0), Point(0, 1)};
  const Point& v = verts[vertex];
  const Point e1 = verts[(vertex + 1) % 3] - v;
  const Point e2 = verts[(vertex + 2) % 3] - v;
  TriangleRule r;
  r.degree = degree;
  for (std::size_t i = 0; i < radial.size(); ++i)
    for (std::size_t j = 0; j < angular.size(); ++j)
    {
      const double s = radial.points[i];
      const double t = angular.points[j];
      r.points.push_back(v + s * ((1.0 - t) * e1 + t * e2));
      r.weights.push_back(radial.weights[i] * angular.weights[j] * s);
    }
  return r;
}

} // namespace hpdg
