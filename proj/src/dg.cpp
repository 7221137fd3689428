#include "hpdg/dg.hpp"

#include "hpdg/polynomials.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace hpdg
{

namespace
{

bool same_point(const Point& a, const Point& b)
{
  return (a - b).norm() <= 1e-12 * (1.0 + a.norm());
}

struct ReferenceStiffness
{
  Eigen::MatrixXd xx, xy, yy;
};

const ReferenceStiffness& reference_stiffness(int p)
{
  static std::map<int, ReferenceStiffness> cache;
  static std::mutex m;
  std::lock_guard lock(m);
  auto it = cache.find(p);
  if (it != cache.end())
    return it->second;
  const TriangleRule& rule = triangle_rule(2 * p);
  const Tabulation tab = tabulate_dubiner(p, rule.points);
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(),
                                                              rule.weights.size());
  ReferenceStiffness k;
  k.xx = tab.dxi.transpose() * w.asDiagonal() * tab.dxi;
  k.xy = tab.dxi.transpose() * w.asDiagonal() * tab.deta;
  k.yy = tab.deta.transpose() * w.asDiagonal() * tab.deta;
  return cache.emplace(p, std::move(k)).first->second;
}

// Physical trace values and normal derivatives (w.r.t. `normal`) on an edge
// side, at the points of line_rule(degree) in global edge order.
struct SideTrace
{
  Eigen::MatrixXd value;
  Eigen::MatrixXd dn;
};

SideTrace side_trace(const Discretization& d, const EdgeSide& s, int degree,
                     const Point& normal)
{
  const Mesh& mesh = d.mesh();
  const int p = d.degree(s.triangle);
  const Tabulation& tab = edge_tabulation(p, degree, s.local);
  const auto& g = mesh.geometry(s.triangle);
  const double inv_sqrt_j = 1.0 / std::sqrt(g.det);
  const Point cn = g.inverse_transpose.transpose() * normal;
  const int nq = static_cast<int>(tab.values.rows());
  SideTrace tr;
  tr.value.resize(nq, tab.values.cols());
  tr.dn.resize(nq, tab.values.cols());
  for (int q = 0; q < nq; ++q)
  {
    const int row = s.reversed ? nq - 1 - q : q;
    tr.value.row(q) = tab.values.row(row) * inv_sqrt_j;
    tr.dn.row(q) = (tab.dxi.row(row) * cn.x() + tab.deta.row(row) * cn.y()) * inv_sqrt_j;
  }
  return tr;
}

int interior_edge_degree(const Discretization& d, int e)
{
  return 2 * d.edge_p(e) + 1;
}

struct Block
{
  int row_offset = 0, col_offset = 0;
  Eigen::MatrixXcd values;
};

struct ItemContribution
{
  std::vector<Block> blocks;
  std::vector<std::pair<int, Eigen::VectorXcd>> loads;
};

ItemContribution element_contribution(const Discretization& d, int t)
{
  const Mesh& mesh = d.mesh();
  const int p = d.degree(t);
  const auto& geo = mesh.geometry(t);
  const ReferenceStiffness& ks = reference_stiffness(p);
  const Eigen::Matrix2d G = geo.inverse_transpose.transpose() * geo.inverse_transpose;
  const int n = d.block_size(t);
  const double k2 = d.params().k * d.params().k * d.epsilon(t);

  Eigen::MatrixXd K = G(0, 0) * ks.xx + G(0, 1) * (ks.xy + ks.xy.transpose())
                      + G(1, 1) * ks.yy;
  K.diagonal().array() -= k2;

  ItemContribution c;
  c.blocks.push_back({d.offset(t), d.offset(t), K.cast<complex>()});

  if (d.data().f)
  {
    const TriangleRule& rule = d.element_data_rule(t);
    const Tabulation& tab = reference_tabulation(p, rule.degree);
    const double sqrt_j = std::sqrt(geo.det);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
      const complex fq = d.f(mesh.map(t, rule.points[q]));
      b += (rule.weights[q] * sqrt_j * fq) * tab.values.row(q).transpose().cast<complex>();
    }
    c.loads.emplace_back(d.offset(t), std::move(b));
  }
  return c;
}

ItemContribution interior_edge_contribution(const Discretization& d, int e)
{
  const Mesh& mesh = d.mesh();
  const DGParams& prm = d.params();
  const EdgeSide sp = edge_side(mesh, e, 0);
  const EdgeSide sm = edge_side(mesh, e, 1);
  const Point n = mesh.outward_normal(sp.triangle, sp.local);
  const int degree = interior_edge_degree(d, e);
  const LineRule& rule = line_rule(degree);
  const double len = mesh.edge_length(e);
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(),
                                                              rule.weights.size())
                            * len;
  const SideTrace tr[2] = {side_trace(d, sp, degree, n), side_trace(d, sm, degree, n)};
  const int tri[2] = {sp.triangle, sm.triangle};
  const double sigma[2] = {1.0, -1.0};
  const double h = d.edge_h(e);
  const double pe = d.edge_p(e);
  const complex grad_pen(0.0, prm.beta * h / pe);
  const complex jump_pen(0.0, prm.alpha * pe * pe / h);

  ItemContribution c;
  for (int a = 0; a < 2; ++a)     // test side
    for (int b = 0; b < 2; ++b)   // trial side
    {
      const Eigen::MatrixXd wPb = w.asDiagonal() * tr[b].value;
      const Eigen::MatrixXd wDb = w.asDiagonal() * tr[b].dn;
      const Eigen::MatrixXd vv = tr[a].value.transpose() * wPb;
      const Eigen::MatrixXd dv = tr[a].dn.transpose() * wPb;
      const Eigen::MatrixXd vd = tr[a].value.transpose() * wDb;
      const Eigen::MatrixXd dd = tr[a].dn.transpose() * wDb;
      const double sab = sigma[a] * sigma[b];
      Eigen::MatrixXcd blk = (-0.5 * sigma[b] * dv - 0.5 * sigma[a] * vd).cast<complex>();
      blk -= (grad_pen * sab) * dd.cast<complex>();
      blk -= (jump_pen * sab) * vv.cast<complex>();
      c.blocks.push_back({d.offset(tri[a]), d.offset(tri[b]), std::move(blk)});
    }
  return c;
}

ItemContribution boundary_edge_contribution(const Discretization& d, int e)
{
  const Mesh& mesh = d.mesh();
  const DGParams& prm = d.params();
  const EdgeSide s = edge_side(mesh, e, 0);
  const int t = s.triangle;
  const Point n = mesh.outward_normal(t, s.local);
  const int p = d.degree(t);
  const double len = mesh.edge_length(e);
  const double delta = prm.gamma * d.edge_h(e) / d.edge_p(e);
  const double ke = d.wavenumber(t);

  // bilinear part, in local edge order
  const int degree = 2 * p + 1;
  const LineRule& rule = line_rule(degree);
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(),
                                                              rule.weights.size())
                            * len;
  EdgeSide local = s;
  local.reversed = false;
  const SideTrace tr = side_trace(d, local, degree, n);
  const Eigen::MatrixXd vv = tr.value.transpose() * w.asDiagonal() * tr.value;
  const Eigen::MatrixXd dv = tr.dn.transpose() * w.asDiagonal() * tr.value;
  const Eigen::MatrixXd dd = tr.dn.transpose() * w.asDiagonal() * tr.dn;
  Eigen::MatrixXcd blk = (-delta * ke * (dv + dv.transpose())).cast<complex>();
  blk -= complex(0.0, delta) * dd.cast<complex>();
  blk -= complex(0.0, ke * (1.0 - delta * ke)) * vv.cast<complex>();

  ItemContribution c;
  c.blocks.push_back({d.offset(t), d.offset(t), std::move(blk)});

  if (d.data().g)
  {
    const LineRule& drule = d.boundary_data_rule(e);
    std::vector<Point> pts;
    for (double tq : drule.points)
      pts.push_back(reference_edge_point(s.local, tq));
    const Tabulation tab = tabulate_dubiner(p, pts);
    const auto& geo = mesh.geometry(t);
    const double inv_sqrt_j = 1.0 / std::sqrt(geo.det);
    const Point cn = geo.inverse_transpose.transpose() * n;
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(d.block_size(t));
    for (std::size_t q = 0; q < drule.size(); ++q)
    {
      const complex gq = d.g(mesh.map(t, pts[q]), n);
      const double wq = drule.weights[q] * len;
      const Eigen::VectorXd val = tab.values.row(q).transpose() * inv_sqrt_j;
      const Eigen::VectorXd dn = (tab.dxi.row(q) * cn.x() + tab.deta.row(q) * cn.y())
                                     .transpose()
                                 * inv_sqrt_j;
      b += (wq * gq) * (complex(0.0, -delta) * dn.cast<complex>()
                        + (1.0 - delta * ke) * val.cast<complex>());
    }
    c.loads.emplace_back(d.offset(t), std::move(b));
  }
  return c;
}

} // namespace

Discretization::Discretization(const Mesh& mesh, std::vector<int> degrees,
                               DGParams params, const ProblemData& data)
    : mesh_(&mesh), data_(&data), params_(params), degrees_(std::move(degrees))
{
  const int nt = mesh.num_triangles();
  if (static_cast<int>(degrees_.size()) != nt)
    throw std::invalid_argument("degree map size does not match mesh");
  if (!(params_.alpha > 0.0 && params_.beta > 0.0 && params_.gamma > 0.0
        && params_.gamma < 1.0 / 3.0 && params_.k > 0.0))
    throw std::invalid_argument("DG parameters out of range");
  offsets_.resize(nt + 1, 0);
  epsilon_.resize(nt, 1.0);
  for (int t = 0; t < nt; ++t)
  {
    if (degrees_[t] < 1)
      throw std::invalid_argument("polynomial degrees must be >= 1");
    offsets_[t + 1] = offsets_[t] + scalar_dim(degrees_[t]);
    if (data.epsilon)
      epsilon_[t] = data.epsilon(mesh.centroid(t));
  }
  traces_ = compute_edge_traces(mesh, degrees_);

  boundary_rules_.resize(mesh.num_edges());
  for (int e : mesh.boundary_edges())
  {
    const int deg = data_degree(degrees_[mesh.edge(e).triangles[0]]);
    const int end = singular_endpoint(e);
    if (end < 0)
      boundary_rules_[e] = line_rule(deg);
    else
    {
      LineRule r = graded_line_rule(deg);
      if (end == 1)
        for (double& x : r.points)
          x = 1.0 - x;
      boundary_rules_[e] = std::move(r);
    }
  }
}

const TriangleRule& Discretization::element_data_rule(int t) const
{
  return triangle_rule(data_degree(degrees_[t]));
}

int Discretization::singular_endpoint(int e) const
{
  const Edge& edge = mesh_->edge(e);
  const int t = edge.triangles[0];
  const int l = edge.local[0];
  const auto& tri = mesh_->triangle(t);
  for (const Point& s : data_->singular_points)
  {
    if (same_point(mesh_->node(tri[(l + 1) % 3]), s))
      return 0;
    if (same_point(mesh_->node(tri[(l + 2) % 3]), s))
      return 1;
  }
  return -1;
}

int Discretization::singular_vertex(int t) const
{
  const auto& tri = mesh_->triangle(t);
  for (const Point& s : data_->singular_points)
    for (int i = 0; i < 3; ++i)
      if (same_point(mesh_->node(tri[i]), s))
        return i;
  return -1;
}

EdgeSide edge_side(const Mesh& mesh, int e, int side)
{
  const Edge& edge = mesh.edge(e);
  EdgeSide s;
  s.triangle = edge.triangles[side];
  s.local = edge.local[side];
  if (s.triangle >= 0)
    s.reversed = mesh.triangle(s.triangle)[(s.local + 1) % 3] != edge.nodes[0];
  return s;
}

complex field_value(const Discretization& d, const Eigen::VectorXcd& u, int t,
                    const Point& xi)
{
  const int n = d.block_size(t);
  Eigen::VectorXd v(n);
  dubiner(d.degree(t), xi, v);
  return v.cast<complex>().dot(u.segment(d.offset(t), n))
         / std::sqrt(d.mesh().geometry(t).det);
}

Vector2c field_gradient(const Discretization& d, const Eigen::VectorXcd& u, int t,
                        const Point& xi)
{
  const int n = d.block_size(t);
  Eigen::VectorXd v(n), dx, dy;
  dubiner(d.degree(t), xi, v, &dx, &dy);
  const auto& geo = d.mesh().geometry(t);
  const auto c = u.segment(d.offset(t), n);
  Vector2c ref(dx.cast<complex>().dot(c), dy.cast<complex>().dot(c));
  return geo.inverse_transpose.cast<complex>() * ref / std::sqrt(geo.det);
}

LinearSystem assemble(const Discretization& d, Exec exec)
{
  const Mesh& mesh = d.mesh();
  const int nt = mesh.num_triangles();
  const int ne = mesh.num_edges();
  std::vector<ItemContribution> items(nt + ne);
  const bool par = exec == Exec::parallel;

#pragma omp parallel for schedule(dynamic, 8) if (par)
  for (int i = 0; i < nt + ne; ++i)
  {
    if (i < nt)
      items[i] = element_contribution(d, i);
    else if (mesh.edge(i - nt).on_boundary())
      items[i] = boundary_edge_contribution(d, i - nt);
    else
      items[i] = interior_edge_contribution(d, i - nt);
  }

  LinearSystem sys;
  std::vector<Eigen::Triplet<complex>> triplets;
  std::size_t count = 0;
  for (const auto& it : items)
    for (const auto& b : it.blocks)
      count += b.values.size();
  triplets.reserve(count);
  sys.b = Eigen::VectorXcd::Zero(d.num_dofs());
  for (const auto& it : items)
  {
    for (const auto& b : it.blocks)
      for (int j = 0; j < b.values.cols(); ++j)
        for (int i = 0; i < b.values.rows(); ++i)
          triplets.emplace_back(b.row_offset + i, b.col_offset + j, b.values(i, j));
    for (const auto& [off, v] : it.loads)
      sys.b.segment(off, v.size()) += v;
  }
  sys.A.resize(d.num_dofs(), d.num_dofs());
  sys.A.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

DGSolution solve(const Discretization& d, Exec exec)
{
  const LinearSystem sys = assemble(d, exec);
  const SolveResult r = solve_sparse(sys.A, sys.b);
  return {r.x, r.relative_residual};
}

namespace
{

// int_E (u+ - u-) ds and int_E (d_n+ u+ - d_n+ u-) ds
std::pair<complex, complex> edge_jumps(const Discretization& d, const Eigen::VectorXcd& u,
                                       int e)
{
  const Mesh& mesh = d.mesh();
  if (mesh.edge(e).on_boundary())
    throw std::invalid_argument("lifting requested on a boundary edge");
  const EdgeSide sp = edge_side(mesh, e, 0);
  const EdgeSide sm = edge_side(mesh, e, 1);
  const Point n = mesh.outward_normal(sp.triangle, sp.local);
  const int degree = interior_edge_degree(d, e);
  const LineRule& rule = line_rule(degree);
  const SideTrace tp = side_trace(d, sp, degree, n);
  const SideTrace tm = side_trace(d, sm, degree, n);
  const auto up = u.segment(d.offset(sp.triangle), d.block_size(sp.triangle));
  const auto um = u.segment(d.offset(sm.triangle), d.block_size(sm.triangle));
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(),
                                                              rule.weights.size())
                            * mesh.edge_length(e);
  const Eigen::VectorXcd ju = tp.value.cast<complex>() * up - tm.value.cast<complex>() * um;
  const Eigen::VectorXcd jd = tp.dn.cast<complex>() * up - tm.dn.cast<complex>() * um;
  return {w.cast<complex>().dot(ju), w.cast<complex>().dot(jd)};
}

} // namespace

EdgeLifting lift_L0(const Discretization& d, const Eigen::VectorXcd& u, int e)
{
  const Mesh& mesh = d.mesh();
  const auto [ju, jd] = edge_jumps(d, u, e);
  (void)jd;
  const EdgeSide sp = edge_side(mesh, e, 0);
  const Point n = mesh.outward_normal(sp.triangle, sp.local);
  const Edge& edge = mesh.edge(e);
  EdgeLifting l;
  l.plus = ju * n.cast<complex>() / (2.0 * mesh.geometry(edge.triangles[0]).area);
  l.minus = ju * n.cast<complex>() / (2.0 * mesh.geometry(edge.triangles[1]).area);
  return l;
}

EdgeLifting lift_L1(const Discretization& d, const Eigen::VectorXcd& u, int e)
{
  const Mesh& mesh = d.mesh();
  const auto [ju, jd] = edge_jumps(d, u, e);
  (void)ju;
  const EdgeSide sp = edge_side(mesh, e, 0);
  const Point n = mesh.outward_normal(sp.triangle, sp.local);
  const Edge& edge = mesh.edge(e);
  const complex factor = complex(0.0, d.params().beta * d.edge_h(e) / d.edge_p(e)) * jd;
  EdgeLifting l;
  l.plus = factor * n.cast<complex>() / mesh.geometry(edge.triangles[0]).area;
  l.minus = -factor * n.cast<complex>() / mesh.geometry(edge.triangles[1]).area;
  return l;
}

DGGradient dg_gradient(const Discretization& d, const Eigen::VectorXcd& u, Exec exec)
{
  const Mesh& mesh = d.mesh();
  const int nt = mesh.num_triangles();
  const int ne = mesh.num_edges();
  std::vector<EdgeLifting> lift(ne);
  const bool par = exec == Exec::parallel;

#pragma omp parallel for schedule(dynamic, 16) if (par)
  for (int e = 0; e < ne; ++e)
  {
    if (mesh.edge(e).on_boundary())
      continue;
    const EdgeLifting l0 = lift_L0(d, u, e);
    const EdgeLifting l1 = lift_L1(d, u, e);
    lift[e].plus = l0.plus + l1.plus;
    lift[e].minus = l0.minus + l1.minus;
  }

  DGGradient g;
  g.correction.assign(nt, Vector2c::Zero());
  for (int t = 0; t < nt; ++t)
    for (int e : mesh.triangle_edges(t))
    {
      const Edge& edge = mesh.edge(e);
      if (edge.on_boundary())
        continue;
      g.correction[t] += (edge.triangles[0] == t) ? lift[e].plus : lift[e].minus;
    }
  return g;
}

Point barycentric_gradient(int i)
{
  switch (i)
  {
  case 0:
    return {-1.0, -1.0};
  case 1:
    return {1.0, 0.0};
  default:
    return {0.0, 1.0};
  }
}

double barycentric(int i, const Point& xi)
{
  switch (i)
  {
  case 0:
    return 1.0 - xi.x() - xi.y();
  case 1:
    return xi.x();
  default:
    return xi.y();
  }
}

OrthogonalityResidual hat_orthogonality_residual(const Discretization& d,
                                                 const Eigen::VectorXcd& u,
                                                 const DGGradient& grad, int node,
                                                 ImpedanceSign sign)
{
  const Mesh& mesh = d.mesh();
  const DGParams& prm = d.params();
  const double iku_sign = sign == ImpedanceSign::plus_iku ? 1.0 : -1.0;
  complex volume_grad = 0.0, volume_mass = 0.0, bnd_data = 0.0, bnd_gamma = 0.0,
          bnd_normal = 0.0;
  for (int t : mesh.node_triangles(node))
  {
    const auto& tri = mesh.triangle(t);
    const int iz = tri[0] == node ? 0 : (tri[1] == node ? 1 : 2);
    const auto& geo = mesh.geometry(t);
    const Point gpsi = geo.inverse_transpose * barycentric_gradient(iz);
    const double k2 = prm.k * prm.k * d.epsilon(t);

    const TriangleRule& rule = d.element_data_rule(t);
    const Tabulation& tab = reference_tabulation(d.degree(t), rule.degree);
    const auto c = u.segment(d.offset(t), d.block_size(t));
    const Eigen::VectorXcd uq = tab.values.cast<complex>() * c / std::sqrt(geo.det);
    const Eigen::VectorXcd dxi = tab.dxi.cast<complex>() * c / std::sqrt(geo.det);
    const Eigen::VectorXcd deta = tab.deta.cast<complex>() * c / std::sqrt(geo.det);
    // grad psi . C grad^ u, with C = B^{-T}
    const Point cg = geo.inverse_transpose.transpose() * gpsi;
    const complex gc = grad.correction[t](0) * gpsi.x() + grad.correction[t](1) * gpsi.y();
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
      const Point& xi = rule.points[q];
      const double w = rule.weights[q] * geo.det;
      volume_grad += w * (dxi(q) * cg.x() + deta(q) * cg.y() - gc);
      const complex src = d.f(mesh.map(t, xi)) + k2 * uq(q);
      volume_mass += w * src * barycentric(iz, xi);
    }

    for (int l = 0; l < 3; ++l)
    {
      const int e = mesh.triangle_edges(t)[l];
      if (!mesh.edge(e).on_boundary())
        continue;
      const Point n = mesh.outward_normal(t, l);
      const double len = mesh.edge_length(e);
      const double hp = d.edge_h(e) / d.edge_p(e);
      const double ke = d.wavenumber(t);
      const double dpsi_n = gpsi.dot(n);
      const LineRule& br = d.boundary_data_rule(e);
      for (std::size_t q = 0; q < br.size(); ++q)
      {
        const Point xi = reference_edge_point(l, br.points[q]);
        const Point x = mesh.map(t, xi);
        const double w = br.weights[q] * len;
        const complex gq = d.g(x, n);
        const complex uq = field_value(d, u, t, xi);
        const Vector2c gu = field_gradient(d, u, t, xi);
        const complex dnu = gu(0) * n.x() + gu(1) * n.y();
        const complex X = gq - dnu + complex(0.0, iku_sign * ke) * uq;
        const double psi = l == iz ? 0.0 : barycentric(iz, xi);
        bnd_data += w * (gq + complex(0.0, ke) * uq) * psi;
        bnd_gamma += w * prm.gamma * ke * hp * X * psi;
        bnd_normal += w * complex(0.0, prm.gamma * hp) * X * dpsi_n;
      }
    }
  }
  OrthogonalityResidual r;
  r.residual = volume_grad - volume_mass - bnd_data + bnd_gamma + bnd_normal;
  r.scale = std::abs(volume_grad) + std::abs(volume_mass) + std::abs(bnd_data)
            + std::abs(bnd_gamma) + std::abs(bnd_normal);
  return r;
}

} // namespace hpdg
