#include "hpdg/raviart_thomas.hpp"

#include "hpdg/quadrature.hpp"

#include <Eigen/SVD>

#include <map>
#include <memory>
#include <mutex>

namespace hpdg
{

namespace
{

// Spanning set [P_p]^2 + x P_p^{=p}: values (nspan x 2) and divergence.
void spanning(int p, const Point& xi, Eigen::MatrixXd& values, Eigen::VectorXd& div)
{
  const int n = scalar_dim(p);
  const int ns = rt_dim(p);
  Eigen::VectorXd v(n), dx, dy;
  dubiner(p, xi, v, &dx, &dy);
  values.setZero(ns, 2);
  div.resize(ns);
  for (int m = 0; m < n; ++m)
  {
    values(m, 0) = v(m);
    div(m) = dx(m);
    values(n + m, 1) = v(m);
    div(n + m) = dy(m);
  }
  for (int r = 0; r <= p; ++r)
  {
    const int m = dubiner_index(p, r);
    const int row = 2 * n + r;
    values(row, 0) = xi.x() * v(m);
    values(row, 1) = xi.y() * v(m);
    div(row) = 2.0 * v(m) + xi.x() * dx(m) + xi.y() * dy(m);
  }
}

std::unique_ptr<RTElement> build(int p)
{
  auto el = std::make_unique<RTElement>();
  el->p = p;
  el->dim = rt_dim(p);
  const int dim = el->dim;

  // dof matrix: dofs(i, m) = functional i applied to spanning function m
  Eigen::MatrixXd dofs = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd vals;
  Eigen::VectorXd div;
  const LineRule& lr = line_rule(2 * p + 2);
  Eigen::VectorXd q(p + 1);
  for (int e = 0; e < 3; ++e)
  {
    const Point a = reference_edge_point(e, 0.0);
    const Point b = reference_edge_point(e, 1.0);
    const Point tangent = b - a;
    // |e| n for the outward normal n
    const Point scaled_normal(tangent.y(), -tangent.x());
    for (std::size_t k = 0; k < lr.size(); ++k)
    {
      spanning(p, reference_edge_point(e, lr.points[k]), vals, div);
      legendre01(p, lr.points[k], q);
      const Eigen::VectorXd flux = vals * scaled_normal;
      for (int j = 0; j <= p; ++j)
        dofs.row(e * (p + 1) + j) += lr.weights[k] * q(j) * flux.transpose();
    }
  }
  const TriangleRule& tr = triangle_rule(2 * p + 2);
  const int ni = scalar_dim(p - 1);
  Eigen::VectorXd qi(std::max(ni, 1));
  for (std::size_t k = 0; k < tr.size(); ++k)
  {
    spanning(p, tr.points[k], vals, div);
    if (ni == 0)
      break;
    dubiner(p - 1, tr.points[k], qi);
    for (int l = 0; l < ni; ++l)
    {
      dofs.row(3 * (p + 1) + l) += tr.weights[k] * qi(l) * vals.col(0).transpose();
      dofs.row(3 * (p + 1) + ni + l) += tr.weights[k] * qi(l) * vals.col(1).transpose();
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(dofs);
  const auto& sv = svd.singularValues();
  el->condition = sv(0) / sv(sv.size() - 1);
  el->coefficients = dofs.partialPivLu().inverse();

  // reference matrices
  const int np = scalar_dim(p);
  const int nq1 = scalar_dim(p + 1);
  el->mass_xx.setZero(dim, dim);
  el->mass_xy.setZero(dim, dim);
  el->mass_yy.setZero(dim, dim);
  el->divergence.setZero(np, dim);
  el->project_x.setZero(nq1, dim);
  el->project_y.setZero(nq1, dim);
  Eigen::VectorXd qp(np), qp1(nq1);
  Eigen::MatrixXd bv;
  Eigen::VectorXd bd;
  for (std::size_t k = 0; k < tr.size(); ++k)
  {
    const double w = tr.weights[k];
    el->evaluate(tr.points[k], bv, bd);
    dubiner(p, tr.points[k], qp);
    dubiner(p + 1, tr.points[k], qp1);
    el->mass_xx.noalias() += w * bv.col(0) * bv.col(0).transpose();
    el->mass_xy.noalias() += w * bv.col(0) * bv.col(1).transpose();
    el->mass_yy.noalias() += w * bv.col(1) * bv.col(1).transpose();
    el->divergence.noalias() += w * qp * bd.transpose();
    el->project_x.noalias() += w * qp1 * bv.col(0).transpose();
    el->project_y.noalias() += w * qp1 * bv.col(1).transpose();
  }
  return el;
}

} // namespace

void RTElement::evaluate(const Point& xi, Eigen::MatrixXd& values,
                         Eigen::VectorXd& div) const
{
  Eigen::MatrixXd sv;
  Eigen::VectorXd sd;
  spanning(p, xi, sv, sd);
  values.noalias() = coefficients.transpose() * sv;
  div.noalias() = coefficients.transpose() * sd;
}

const RTElement& rt_element(int p)
{
  static std::map<int, std::unique_ptr<RTElement>> cache;
  static std::mutex m;
  std::lock_guard lock(m);
  auto& slot = cache[p];
  if (!slot)
    slot = build(p);
  return *slot;
}

const RTTabulation& rt_tabulation(int p, int degree)
{
  static std::map<std::pair<int, int>, std::unique_ptr<RTTabulation>> cache;
  static std::mutex m;
  const RTElement& el = rt_element(p);
  std::lock_guard lock(m);
  auto& slot = cache[{p, degree}];
  if (!slot)
  {
    slot = std::make_unique<RTTabulation>();
    const TriangleRule& tr = triangle_rule(degree);
    const int nq = static_cast<int>(tr.size());
    slot->x.resize(nq, el.dim);
    slot->y.resize(nq, el.dim);
    slot->div.resize(nq, el.dim);
    Eigen::MatrixXd v;
    Eigen::VectorXd d;
    for (int k = 0; k < nq; ++k)
    {
      el.evaluate(tr.points[k], v, d);
      slot->x.row(k) = v.col(0).transpose();
      slot->y.row(k) = v.col(1).transpose();
      slot->div.row(k) = d.transpose();
    }
  }
  return *slot;
}

} // namespace hpdg
