#include "hpdg/audit.hpp"

#include "hpdg/polynomials.hpp"
#include "hpdg/projection.hpp"
#include "hpdg/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace hpdg
{

namespace
{

const complex I(0.0, 1.0);

complex normal_component(const Vector2c& v, const Point& n)
{
  return v(0) * n.x() + v(1) * n.y();
}

} // namespace

EquilibrationAudit audit_equilibration(const Discretization& d, const Eigen::VectorXcd& u,
                                       const Reconstruction& rec)
{
  const Mesh& mesh = d.mesh();
  const DGParams& prm = d.params();
  EquilibrationAudit a;
  double f2 = 0.0, u2 = 0.0, div2 = 0.0, s2 = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t)
  {
    const double J = mesh.geometry(t).det;
    const VectorPolynomial& sigma = rec.sigma[t];
    const double k2 = d.wavenumber(t) * d.wavenumber(t);

    // f only through its own rule; the polynomial part exactly
    complex moment = 0.0;
    const TriangleRule& fr = d.element_data_rule(t);
    for (std::size_t q = 0; q < fr.size(); ++q)
    {
      const complex fq = d.f(mesh.map(t, fr.points[q]));
      moment += fr.weights[q] * J * fq;
      f2 += fr.weights[q] * J * std::norm(fq);
    }
    const TriangleRule& r = triangle_rule(2 * std::max(d.degree(t), sigma.degree) + 2);
    for (std::size_t q = 0; q < r.size(); ++q)
    {
      const Point& xi = r.points[q];
      const double w = r.weights[q] * J;
      const complex uh = k2 * field_value(d, u, t, xi);
      const complex div = evaluate_divergence(mesh, t, sigma, xi);
      moment += w * (uh - div);
      u2 += w * std::norm(uh);
      div2 += w * std::norm(div);
      s2 += w * evaluate(mesh, t, sigma, xi).squaredNorm();
    }
    a.element_identity = std::max(a.element_identity, std::abs(moment));
  }
  a.volume_scale = std::sqrt(f2) + std::sqrt(u2) + std::sqrt(div2);
  a.flux_norm = std::sqrt(s2);

  double g2 = 0.0, ub2 = 0.0, sn2 = 0.0, x2 = 0.0;
  for (int e = 0; e < mesh.num_edges(); ++e)
  {
    const Edge& edge = mesh.edge(e);
    const double len = mesh.edge_length(e);
    if (edge.on_boundary())
    {
      const int t = edge.triangles[0];
      const int l = edge.local[0];
      const Point n = mesh.outward_normal(t, l);
      const double ke = d.wavenumber(t);
      const double hp = d.edge_h(e) / d.edge_p(e);
      const LineRule& br = d.boundary_data_rule(e);
      complex moment = 0.0;
      for (std::size_t q = 0; q < br.size(); ++q)
      {
        const Point xi = reference_edge_point(l, br.points[q]);
        const double w = br.weights[q] * len;
        const complex uh = field_value(d, u, t, xi);
        const complex dnu = normal_component(field_gradient(d, u, t, xi), n);
        const complex sn = normal_component(evaluate(mesh, t, rec.sigma[t], xi), n);
        const complex g = d.g(mesh.map(t, xi), n);
        const complex X = g - dnu + I * ke * uh;
        const complex stab = prm.gamma * ke * hp * X;
        moment += w * (sn + g + I * ke * uh - stab);
        g2 += w * std::norm(g);
        ub2 += w * std::norm(ke * uh);
        sn2 += w * std::norm(sn);
        x2 += w * std::norm(stab);
      }
      a.boundary_identity = std::max(a.boundary_identity, std::abs(moment));
      continue;
    }
    const int tp = edge.triangles[0];
    const int tm = edge.triangles[1];
    const Point n = mesh.outward_normal(tp, edge.local[0]);
    const Point A = mesh.node(edge.nodes[0]);
    const Point B = mesh.node(edge.nodes[1]);
    const LineRule& lr =
        line_rule(2 * std::max(rec.sigma[tp].degree, rec.sigma[tm].degree) + 2);
    double j2 = 0.0;
    for (std::size_t q = 0; q < lr.size(); ++q)
    {
      const Point x = A + lr.points[q] * (B - A);
      const Vector2c jump = evaluate(mesh, tp, rec.sigma[tp], to_reference(mesh, tp, x))
                            - evaluate(mesh, tm, rec.sigma[tm], to_reference(mesh, tm, x));
      j2 += lr.weights[q] * len * std::norm(normal_component(jump, n));
    }
    a.normal_jump = std::max(a.normal_jump, std::sqrt(j2));
  }
  a.boundary_scale = std::sqrt(g2) + std::sqrt(ub2) + std::sqrt(sn2) + std::sqrt(x2);
  return a;
}

PotentialAudit audit_potential(const Discretization& d, const Eigen::VectorXcd& u,
                               const DGGradient& grad, const Reconstruction& rec)
{
  const Mesh& mesh = d.mesh();
  PotentialAudit a;
  complex mean = 0.0;
  double s2 = 0.0, b2 = 0.0, n2 = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t)
  {
    const double J = mesh.geometry(t).det;
    const ScalarPolynomial& s = rec.potential[t];
    const TriangleRule& r = triangle_rule(2 * std::max(d.degree(t), s.degree) + 2);
    for (std::size_t q = 0; q < r.size(); ++q)
    {
      const Point& xi = r.points[q];
      const double w = r.weights[q] * J;
      const complex sv = evaluate(mesh, t, s, xi);
      const Vector2c gs = evaluate_gradient(mesh, t, s, xi);
      mean += w * sv;
      s2 += w * std::norm(sv);
      b2 += w * (field_gradient(d, u, t, xi) - gs).squaredNorm();
      n2 += w * (grad.evaluate(d, u, t, xi) - gs).squaredNorm();
    }
  }
  a.mean = std::abs(mean);
  a.norm = std::sqrt(s2);
  a.broken_nonconformity = std::sqrt(b2);
  a.nonconformity = std::sqrt(n2);
  for (const PatchPotential& p : rec.potentials)
    a.optimality = std::max(a.optimality, p.optimality_residual);
  return a;
}

Eigen::VectorXcd project_field(const Discretization& d,
                               const std::function<complex(int, const Point&)>& f)
{
  const Mesh& mesh = d.mesh();
  Eigen::VectorXcd c(d.num_dofs());
  for (int t = 0; t < mesh.num_triangles(); ++t)
  {
    const int p = d.degree(t);
    c.segment(d.offset(t), d.block_size(t)) = project_element(
        mesh, t, [&](const Point& x) { return f(t, x); }, p, triangle_rule(2 * p + 2));
  }
  return c;
}

} // namespace hpdg
