#include "hpdg/projection.hpp"

#include "hpdg/polynomials.hpp"

#include <cmath>

namespace hpdg
{

Eigen::VectorXcd project_edge(const std::function<complex(double)>& f, int p,
                              const LineRule& rule)
{
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(p + 1);
  Eigen::VectorXd q(p + 1);
  for (std::size_t k = 0; k < rule.size(); ++k)
  {
    legendre01(p, rule.points[k], q);
    c += (rule.weights[k] * f(rule.points[k])) * q.cast<complex>();
  }
  return c;
}

complex evaluate_edge(const Eigen::VectorXcd& c, double t)
{
  Eigen::VectorXd q(c.size());
  legendre01(static_cast<int>(c.size()) - 1, t, q);
  return q.cast<complex>().dot(c);
}

Point to_reference(const Mesh& mesh, int t, const Point& x)
{
  const auto& g = mesh.geometry(t);
  return g.inverse_transpose.transpose() * (x - mesh.node(mesh.triangle(t)[0]));
}

Eigen::VectorXcd project_element(const Mesh& mesh, int t,
                                 const std::function<complex(const Point&)>& f, int p,
                                 const TriangleRule& rule)
{
  const int n = scalar_dim(p);
  const double sqrt_j = std::sqrt(mesh.geometry(t).det);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n);
  Eigen::VectorXd q(n);
  for (std::size_t k = 0; k < rule.size(); ++k)
  {
    dubiner(p, rule.points[k], q);
    c += (rule.weights[k] * sqrt_j * f(mesh.map(t, rule.points[k]))) * q.cast<complex>();
  }
  return c;
}

complex evaluate_element(const Mesh& mesh, int t, const Eigen::VectorXcd& c,
                         const Point& x)
{
  const int n = static_cast<int>(c.size());
  int p = 0;
  while (scalar_dim(p) < n)
    ++p;
  Eigen::VectorXd q(scalar_dim(p));
  dubiner(p, to_reference(mesh, t, x), q);
  return q.head(n).cast<complex>().dot(c) / std::sqrt(mesh.geometry(t).det);
}

} // namespace hpdg
