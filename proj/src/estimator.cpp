#include "hpdg/estimator.hpp"

#include "hpdg/polynomials.hpp"
#include "hpdg/special_functions.hpp"

#include <algorithm>
#include <cmath>

namespace hpdg
{

double trace_constant(const ElementGeometry& g)
{
  const double j = bessel_j1_first_root;
  return std::sqrt((1.0 / j + 1.0 / (j * j)) * g.diameter * g.diameter / g.area);
}

namespace
{

const complex I(0.0, 1.0);

std::vector<Point> edge_points(int local, const LineRule& rule)
{
  std::vector<Point> pts;
  pts.reserve(rule.size());
  for (double t : rule.points)
    pts.push_back(reference_edge_point(local, t));
  return pts;
}

Vector2c physical_gradient(const ElementGeometry& geo, const Tabulation& tab, int q,
                           const Eigen::VectorXcd& c)
{
  const Vector2c ref(tab.dxi.row(q).cast<complex>().dot(c),
                     tab.deta.row(q).cast<complex>().dot(c));
  return geo.inverse_transpose.cast<complex>() * ref / std::sqrt(geo.det);
}

complex physical_value(const ElementGeometry& geo, const Tabulation& tab, int q,
                       const Eigen::VectorXcd& c)
{
  return tab.values.row(q).cast<complex>().dot(c) / std::sqrt(geo.det);
}

LineRule boundary_rule(const Discretization& d, int e, int extra)
{
  if (extra == 0)
    return d.boundary_data_rule(e);
  const int deg = data_degree(d.degree(d.mesh().edge(e).triangles[0])) + extra;
  const int end = d.singular_endpoint(e);
  if (end < 0)
    return line_rule(deg);
  LineRule r = graded_line_rule(deg);
  if (end == 1)
    for (double& x : r.points)
      x = 1.0 - x;
  return r;
}

} // namespace

EstimatorReport estimate(const Discretization& d, const Eigen::VectorXcd& u,
                         const DGGradient& grad, const Reconstruction& rec, Exec exec)
{
  const Mesh& mesh = d.mesh();
  const DGParams& prm = d.params();
  const int nt = mesh.num_triangles();
  EstimatorReport rep;
  rep.elements.resize(nt);
  const bool par = exec == Exec::parallel;

#pragma omp parallel for schedule(dynamic, 8) if (par)
  for (int t = 0; t < nt; ++t)
  {
    const auto& geo = mesh.geometry(t);
    const int pt = d.degree(t);
    const VectorPolynomial& sigma = rec.sigma[t];
    const ScalarPolynomial& s = rec.potential[t];
    const auto cu = u.segment(d.offset(t), d.block_size(t)).eval();
    const double J = geo.det;
    const double k2 = prm.k * prm.k * d.epsilon(t);
    ElementIndicator ind;

    const int deg = std::max(data_degree(pt), 2 * std::max(sigma.degree, s.degree) + 2);
    const TriangleRule& rule = triangle_rule(deg);
    const Tabulation& ut = reference_tabulation(pt, deg);
    const Tabulation& st = reference_tabulation(sigma.degree, deg);
    const Tabulation& pt_tab = reference_tabulation(s.degree, deg);
    const Eigen::Matrix2d& C = geo.inverse_transpose;
    double flux2 = 0.0, vol2 = 0.0, noncf2 = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
      const double w = rule.weights[q] * J;
      const Point& xi = rule.points[q];
      const Vector2c g = physical_gradient(geo, ut, q, cu) - grad.correction[t];
      const Vector2c sg(physical_value(geo, st, q, sigma.x), physical_value(geo, st, q, sigma.y));
      const Vector2c dx(st.dxi.row(q).cast<complex>().dot(sigma.x),
                        st.deta.row(q).cast<complex>().dot(sigma.x));
      const Vector2c dy(st.dxi.row(q).cast<complex>().dot(sigma.y),
                        st.deta.row(q).cast<complex>().dot(sigma.y));
      const complex div = ((C(0, 0) * dx(0) + C(0, 1) * dx(1)) + (C(1, 0) * dy(0) + C(1, 1) * dy(1)))
                          / std::sqrt(J);
      const complex uh = physical_value(geo, ut, q, cu);
      const complex r = d.f(mesh.map(t, xi)) + k2 * uh - div;
      const Vector2c gs = physical_gradient(geo, pt_tab, q, s.c);
      flux2 += w * (g + sg).squaredNorm();
      vol2 += w * std::norm(r);
      noncf2 += w * (g - gs).squaredNorm();
    }
    ind.flux = std::sqrt(flux2);
    ind.volume = geo.diameter / bessel_j1_first_root * std::sqrt(vol2);
    ind.nonconformity = std::sqrt(noncf2);

    double bnd = 0.0;
    for (int l = 0; l < 3; ++l)
    {
      const int e = mesh.triangle_edges(t)[l];
      if (!mesh.edge(e).on_boundary())
        continue;
      const Point n = mesh.outward_normal(t, l);
      const double len = mesh.edge_length(e);
      const double ke = d.wavenumber(t);
      const double hp = d.edge_h(e) / d.edge_p(e);
      const LineRule& br = d.boundary_data_rule(e);
      const std::vector<Point> pts = edge_points(l, br);
      const Tabulation tu = tabulate_dubiner(pt, pts);
      const Tabulation ts = tabulate_dubiner(sigma.degree, pts);
      double m2 = 0.0;
      for (std::size_t q = 0; q < br.size(); ++q)
      {
        const complex uh = physical_value(geo, tu, q, cu);
        const Vector2c gu = physical_gradient(geo, tu, q, cu);
        const complex dnu = gu(0) * n.x() + gu(1) * n.y();
        const complex sn = physical_value(geo, ts, q, sigma.x) * n.x()
                           + physical_value(geo, ts, q, sigma.y) * n.y();
        const complex g = d.g(mesh.map(t, pts[q]), n);
        const complex X = g - dnu + I * ke * uh;
        const complex m = sn + g + I * ke * uh - prm.gamma * ke * hp * X;
        m2 += br.weights[q] * len * std::norm(m);
      }
      bnd += std::sqrt(len) * std::sqrt(m2);
    }
    ind.boundary = trace_constant(geo) * bnd;
    rep.elements[t] = ind;
  }

  rep.indicators.resize(nt);
  double total = 0.0, f2 = 0.0, v2 = 0.0, b2 = 0.0, n2 = 0.0;
  for (int t = 0; t < nt; ++t)
  {
    const ElementIndicator& e = rep.elements[t];
    const double sq = e.squared();
    rep.indicators[t] = std::sqrt(sq);
    total += sq;
    f2 += e.flux * e.flux;
    v2 += e.volume * e.volume;
    b2 += e.boundary * e.boundary;
    n2 += e.nonconformity * e.nonconformity;
  }
  rep.eta = std::sqrt(total);
  rep.eta_flux = std::sqrt(f2);
  rep.eta_vol = std::sqrt(v2);
  rep.eta_bnd = std::sqrt(b2);
  rep.eta_noncf = std::sqrt(n2);
  rep.osc_f = rec.osc_f;
  rep.osc_g = rec.osc_g;
  return rep;
}

ResidualReport estimate_residual(const Discretization& d, const Eigen::VectorXcd& u, Exec exec)
{
  const Mesh& mesh = d.mesh();
  const DGParams& prm = d.params();
  const int nt = mesh.num_triangles();
  const int ne = mesh.num_edges();
  const bool par = exec == Exec::parallel;
  std::vector<double> volume(nt, 0.0);

#pragma omp parallel for schedule(dynamic, 8) if (par)
  for (int t = 0; t < nt; ++t)
  {
    const auto& geo = mesh.geometry(t);
    const int pt = d.degree(t);
    const auto cu = u.segment(d.offset(t), d.block_size(t)).eval();
    const double J = geo.det;
    const Eigen::Matrix2d& C = geo.inverse_transpose;
    const int nb = scalar_dim(pt);

    // Laplacian in P_pt through (Lap u, q) = -(grad u, grad q) + (du/dn, q)_dT,
    // exact because Lap u has degree pt - 2
    Eigen::VectorXcd lap = Eigen::VectorXcd::Zero(nb);
    {
      const TriangleRule& rule = triangle_rule(2 * pt);
      const Tabulation& tab = reference_tabulation(pt, 2 * pt);
      for (std::size_t q = 0; q < rule.size(); ++q)
      {
        const Vector2c gu = physical_gradient(geo, tab, q, cu);
        const Eigen::VectorXd gx = (C(0, 0) * tab.dxi.row(q) + C(0, 1) * tab.deta.row(q)).transpose() / std::sqrt(J);
        const Eigen::VectorXd gy = (C(1, 0) * tab.dxi.row(q) + C(1, 1) * tab.deta.row(q)).transpose() / std::sqrt(J);
        lap -= rule.weights[q] * J * (gu(0) * gx.cast<complex>() + gu(1) * gy.cast<complex>());
      }
      const LineRule& lr = line_rule(2 * pt);
      for (int l = 0; l < 3; ++l)
      {
        const Tabulation& et = edge_tabulation(pt, 2 * pt, l);
        const Point n = mesh.outward_normal(t, l);
        const double len = mesh.edge_length(mesh.triangle_edges(t)[l]);
        for (std::size_t q = 0; q < lr.size(); ++q)
        {
          const Vector2c gu = physical_gradient(geo, et, q, cu);
          const complex dn = gu(0) * n.x() + gu(1) * n.y();
          lap += lr.weights[q] * len * dn * et.values.row(q).transpose().cast<complex>() / std::sqrt(J);
        }
      }
    }
    const TriangleRule& rule = d.element_data_rule(t);
    const Tabulation& tab = reference_tabulation(pt, rule.degree);
    const double k2 = prm.k * prm.k * d.epsilon(t);
    double r2 = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
      const complex r = physical_value(geo, tab, q, lap) + k2 * physical_value(geo, tab, q, cu)
                        + d.f(mesh.map(t, rule.points[q]));
      r2 += rule.weights[q] * J * std::norm(r);
    }
    volume[t] = geo.diameter * geo.diameter / (pt * pt) * r2;
  }

  std::vector<double> gjump(ne, 0.0), vjump(ne, 0.0), bnd(ne, 0.0);
#pragma omp parallel for schedule(dynamic, 16) if (par)
  for (int e = 0; e < ne; ++e)
  {
    const Edge& edge = mesh.edge(e);
    const double len = mesh.edge_length(e);
    const double h = d.edge_h(e);
    const int p = d.edge_p(e);
    if (edge.on_boundary())
    {
      const int t = edge.triangles[0];
      const int l = edge.local[0];
      const auto& geo = mesh.geometry(t);
      const auto cu = u.segment(d.offset(t), d.block_size(t)).eval();
      const Point n = mesh.outward_normal(t, l);
      const double ke = d.wavenumber(t);
      const LineRule& br = d.boundary_data_rule(e);
      const std::vector<Point> pts = edge_points(l, br);
      const Tabulation tab = tabulate_dubiner(d.degree(t), pts);
      double r2 = 0.0;
      for (std::size_t q = 0; q < br.size(); ++q)
      {
        const Vector2c gu = physical_gradient(geo, tab, q, cu);
        const complex r = d.g(mesh.map(t, pts[q]), n) - (gu(0) * n.x() + gu(1) * n.y())
                          + I * ke * physical_value(geo, tab, q, cu);
        r2 += br.weights[q] * len * std::norm(r);
      }
      bnd[e] = h * r2;
      continue;
    }
    const EdgeSide a = edge_side(mesh, e, 0), b = edge_side(mesh, e, 1);
    const int deg = 2 * p;
    const LineRule& lr = line_rule(deg);
    std::vector<Point> pa, pb;
    for (double t : lr.points)
    {
      pa.push_back(reference_edge_point(a.local, a.reversed ? 1.0 - t : t));
      pb.push_back(reference_edge_point(b.local, b.reversed ? 1.0 - t : t));
    }
    const Tabulation ta = tabulate_dubiner(d.degree(a.triangle), pa);
    const Tabulation tb = tabulate_dubiner(d.degree(b.triangle), pb);
    const auto& ga = mesh.geometry(a.triangle);
    const auto& gb = mesh.geometry(b.triangle);
    const auto ca = u.segment(d.offset(a.triangle), d.block_size(a.triangle)).eval();
    const auto cb = u.segment(d.offset(b.triangle), d.block_size(b.triangle)).eval();
    const Point n = mesh.outward_normal(a.triangle, a.local);
    double j0 = 0.0, j1 = 0.0;
    for (std::size_t q = 0; q < lr.size(); ++q)
    {
      const complex du = physical_value(ga, ta, q, ca) - physical_value(gb, tb, q, cb);
      const Vector2c dg = physical_gradient(ga, ta, q, ca) - physical_gradient(gb, tb, q, cb);
      const complex dn = dg(0) * n.x() + dg(1) * n.y();
      j0 += lr.weights[q] * len * std::norm(du);
      j1 += lr.weights[q] * len * std::norm(dn);
    }
    gjump[e] = prm.beta * h / p * j1;
    vjump[e] = prm.alpha * p * p / h * j0;
  }

  ResidualReport rep;
  rep.indicators2 = volume;
  double v = 0.0, g = 0.0, j = 0.0, b = 0.0;
  for (int t = 0; t < nt; ++t)
    v += volume[t];
  for (int e = 0; e < ne; ++e)
  {
    const Edge& edge = mesh.edge(e);
    g += gjump[e];
    j += vjump[e];
    b += bnd[e];
    if (edge.on_boundary())
      rep.indicators2[edge.triangles[0]] += bnd[e];
    else
      for (int t : edge.triangles)
        rep.indicators2[t] += 0.5 * (gjump[e] + vjump[e]);
  }
  rep.volume = std::sqrt(v);
  rep.gradient_jump = std::sqrt(g);
  rep.value_jump = std::sqrt(j);
  rep.boundary = std::sqrt(b);
  rep.eta = std::sqrt(v + g + j + b);
  return rep;
}

TrueError true_error(const Discretization& d, const Eigen::VectorXcd& u, const DGGradient& grad,
                     const ExactSolution& exact, int extra_degree, Exec exec)
{
  const Mesh& mesh = d.mesh();
  const int nt = mesh.num_triangles();
  const bool par = exec == Exec::parallel;
  std::vector<std::array<double, 4>> parts(nt, {0.0, 0.0, 0.0, 0.0});

#pragma omp parallel for schedule(dynamic, 8) if (par)
  for (int t = 0; t < nt; ++t)
  {
    const auto& geo = mesh.geometry(t);
    const int pt = d.degree(t);
    const auto cu = u.segment(d.offset(t), d.block_size(t)).eval();
    const int deg = data_degree(pt) + extra_degree;
    const int sv = d.singular_vertex(t);
    const TriangleRule rule = sv < 0 ? triangle_rule(deg) : graded_triangle_rule(deg, sv);
    const Tabulation tab = tabulate_dubiner(pt, rule.points);
    double eg = 0.0, eb = 0.0, el = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
      const double w = rule.weights[q] * geo.det;
      const Point x = mesh.map(t, rule.points[q]);
      const Vector2c gu = physical_gradient(geo, tab, q, cu);
      const Vector2c ge = exact.gradient(x);
      eg += w * (ge - (gu - grad.correction[t])).squaredNorm();
      eb += w * (ge - gu).squaredNorm();
      el += w * std::norm(exact.value(x) - physical_value(geo, tab, q, cu));
    }
    double ebnd = 0.0;
    for (int l = 0; l < 3; ++l)
    {
      const int e = mesh.triangle_edges(t)[l];
      if (!mesh.edge(e).on_boundary())
        continue;
      const LineRule br = boundary_rule(d, e, extra_degree);
      const std::vector<Point> pts = edge_points(l, br);
      const Tabulation et = tabulate_dubiner(pt, pts);
      const double len = mesh.edge_length(e);
      for (std::size_t q = 0; q < br.size(); ++q)
        ebnd += br.weights[q] * len
                * std::norm(exact.value(mesh.map(t, pts[q])) - physical_value(geo, et, q, cu));
    }
    parts[t] = {eg, eb, el, ebnd};
  }
  std::array<double, 4> sum{0.0, 0.0, 0.0, 0.0};
  for (const auto& p : parts)
    for (int i = 0; i < 4; ++i)
      sum[i] += p[i];
  const double k = d.params().k;
  TrueError err;
  err.grad = std::sqrt(sum[0]);
  err.broken_grad = std::sqrt(sum[1]);
  err.l2 = k * k * std::sqrt(sum[2]);
  err.boundary = k * std::sqrt(sum[3]);
  return err;
}

} // namespace hpdg
