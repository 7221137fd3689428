#include "hpdg/polynomials.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace hpdg
{

void jacobi(int n, double a, double b, double x, Eigen::Ref<Eigen::VectorXd> v,
            Eigen::VectorXd* d)
{
  v(0) = 1.0;
  if (d)
    (*d)(0) = 0.0;
  if (n == 0)
    return;
  v(1) = 0.5 * ((a + b + 2.0) * x + (a - b));
  if (d)
    (*d)(1) = 0.5 * (a + b + 2.0);
  for (int m = 1; m < n; ++m)
  {
    const double s = 2.0 * m + a + b;
    const double c0 = 2.0 * (m + 1) * (m + a + b + 1) * s;
    const double c1 = (s + 1.0) * (s + 2.0) * s;
    const double c2 = (s + 1.0) * (a * a - b * b);
    const double c3 = 2.0 * (m + a) * (m + b) * (s + 2.0);
    v(m + 1) = ((c1 * x + c2) * v(m) - c3 * v(m - 1)) / c0;
    if (d)
      (*d)(m + 1) = (c1 * v(m) + (c1 * x + c2) * (*d)(m) - c3 * (*d)(m - 1)) / c0;
  }
}

void legendre01(int n, double t, Eigen::Ref<Eigen::VectorXd> v)
{
  jacobi(n, 0.0, 0.0, 2.0 * t - 1.0, v);
  for (int j = 0; j <= n; ++j)
    v(j) *= std::sqrt(2.0 * j + 1.0);
}

void dubiner(int p, const Point& xi, Eigen::Ref<Eigen::VectorXd> values,
             Eigen::VectorXd* dxi, Eigen::VectorXd* deta)
{
  const bool grad = dxi && deta;
  const double s = 2.0 * xi.x() + xi.y() - 1.0;
  const double t = 1.0 - xi.y();
  const double x = 2.0 * xi.y() - 1.0;

  // homogeneous Legendre Q_i(s, t) = t^i P_i(s/t) and its partials
  Eigen::VectorXd q(p + 1), qs(p + 1), qt(p + 1);
  q(0) = 1.0, qs(0) = 0.0, qt(0) = 0.0;
  if (p >= 1)
    q(1) = s, qs(1) = 1.0, qt(1) = 0.0;
  for (int n = 1; n < p; ++n)
  {
    q(n + 1) = ((2 * n + 1) * s * q(n) - n * t * t * q(n - 1)) / (n + 1);
    qs(n + 1) = ((2 * n + 1) * (q(n) + s * qs(n)) - n * t * t * qs(n - 1)) / (n + 1);
    qt(n + 1) = ((2 * n + 1) * s * qt(n) - n * (2.0 * t * q(n - 1) + t * t * qt(n - 1)))
                / (n + 1);
  }

  if (grad)
  {
    dxi->resize(scalar_dim(p));
    deta->resize(scalar_dim(p));
  }
  Eigen::VectorXd r(p + 1), dr(p + 1);
  for (int i = 0; i <= p; ++i)
  {
    const int jmax = p - i;
    jacobi(jmax, 2.0 * i + 1.0, 0.0, x, r.head(jmax + 1), grad ? &dr : nullptr);
    for (int j = 0; j <= jmax; ++j)
    {
      const int idx = dubiner_index(i + j, j);
      const double c = std::sqrt(2.0 * (2 * i + 1) * (i + j + 1));
      values(idx) = c * q(i) * r(j);
      if (grad)
      {
        (*dxi)(idx) = c * 2.0 * qs(i) * r(j);
        (*deta)(idx) = c * ((qs(i) - qt(i)) * r(j) + q(i) * 2.0 * dr(j));
      }
    }
  }
}

Tabulation tabulate_dubiner(int p, std::span<const Point> points)
{
  const int n = scalar_dim(p);
  const int nq = static_cast<int>(points.size());
  Tabulation tab;
  tab.values.resize(nq, n);
  tab.dxi.resize(nq, n);
  tab.deta.resize(nq, n);
  Eigen::VectorXd v(n), dx(n), dy(n);
  for (int q = 0; q < nq; ++q)
  {
    dubiner(p, points[q], v, &dx, &dy);
    tab.values.row(q) = v.transpose();
    tab.dxi.row(q) = dx.transpose();
    tab.deta.row(q) = dy.transpose();
  }
  return tab;
}

Point reference_edge_point(int edge, double t)
{
  static const Point verts[3] = {Point(0, 0), Point(1, 0), Point(0, 1)};
  const Point& a = verts[(edge + 1) % 3];
  const Point& b = verts[(edge + 2) % 3];
  return a + t * (b - a);
}

const Tabulation& reference_tabulation(int p, int degree)
{
  static std::map<std::pair<int, int>, Tabulation> cache;
  static std::mutex m;
  std::lock_guard lock(m);
  auto it = cache.find({p, degree});
  if (it == cache.end())
  {
    const auto& rule = triangle_rule(degree);
    it = cache.emplace(std::pair{p, degree}, tabulate_dubiner(p, rule.points)).first;
  }
  return it->second;
}

const Tabulation& edge_tabulation(int p, int degree, int edge)
{
  static std::map<std::tuple<int, int, int>, Tabulation> cache;
  static std::mutex m;
  std::lock_guard lock(m);
  auto it = cache.find({p, degree, edge});
  if (it == cache.end())
  {
    const auto& rule = line_rule(degree);
    std::vector<Point> pts;
    for (double t : rule.points)
      pts.push_back(reference_edge_point(edge, t));
    it = cache.emplace(std::tuple{p, degree, edge}, tabulate_dubiner(p, pts)).first;
  }
  return it->second;
}

} // namespace hpdg
