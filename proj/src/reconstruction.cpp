#include "hpdg/reconstruction.hpp"

#include "hpdg/h1_basis.hpp"
#include "hpdg/polynomials.hpp"
#include "hpdg/raviart_thomas.hpp"
#include "hpdg/special_functions.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#ifdef HPDG_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hpdg
{

namespace
{

int local_vertex(const Mesh& mesh, int t, int node)
{
  const auto& tri = mesh.triangle(t);
  for (int i = 0; i < 3; ++i)
    if (tri[i] == node)
      return i;
  throw std::logic_error("node not in triangle");
}

bool is_singular_node(const Discretization& d, int node)
{
  const Point& x = d.mesh().node(node);
  for (const Point& s : d.data().singular_points)
    if ((x - s).norm() <= 1e-12 * (1.0 + s.norm()))
      return true;
  return false;
}

Eigen::VectorXd weights_of(const std::vector<double>& w)
{
  return Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
}

double trace_constant_sq(const ElementGeometry& g)
{
  const double j = bessel_j1_first_root;
  return (1.0 / j + 1.0 / (j * j)) * g.diameter * g.diameter / g.area;
}

} // namespace

PatchFluxProblem build_patch_data(const Discretization& d, const Eigen::VectorXcd& u,
                                  const DGGradient& grad, int node,
                                  const ReconstructionOptions& opts)
{
  const Mesh& mesh = d.mesh();
  const DGParams& prm = d.params();
  PatchFluxProblem P;
  P.patch = mesh.patch(node);
  int pmax = 0;
  for (int t : P.patch.triangles)
    pmax = std::max(pmax, d.degree(t));
  P.degree = pmax + opts.flux_degree_increment
             + (is_singular_node(d, node) ? opts.singular_extra : 0);
  const int p = P.degree;
  const RTElement& rt = rt_element(p);
  const int np = scalar_dim(p);

  double scale_volume = 0.0, scale_grad = 0.0, scale_bnd = 0.0, scale_normal = 0.0;
  complex flux_f = 0.0, flux_g = 0.0;

  const int m = static_cast<int>(P.patch.triangles.size());
  P.volume_moments.resize(m);
  P.gradient_moments.resize(m);
  for (int s = 0; s < m; ++s)
  {
    const int t = P.patch.triangles[s];
    const int iz = local_vertex(mesh, t, node);
    const auto& geo = mesh.geometry(t);
    const double J = geo.det;
    const double sqrt_j = std::sqrt(J);
    const Eigen::Matrix2d& C = geo.inverse_transpose;
    const Point gpsi = C * barycentric_gradient(iz);
    const Point cg = C.transpose() * gpsi;
    const int pt = d.degree(t);
    const auto cu = u.segment(d.offset(t), d.block_size(t));
    const Vector2c& corr = grad.correction[t];
    const complex corr_dot = corr(0) * gpsi.x() + corr(1) * gpsi.y();
    const double k2 = prm.k * prm.k * d.epsilon(t);

    // (psi G, tau) with tau = B tau^ / J: the integrand is psi (B^T G) . tau^
    {
      const int deg = pt + p + 1;
      const TriangleRule& rule = triangle_rule(deg);
      const RTTabulation& rtab = rt_tabulation(p, deg);
      const Tabulation& utab = reference_tabulation(pt, deg);
      const Eigen::VectorXcd dx = utab.dxi.cast<complex>() * cu / sqrt_j;
      const Eigen::VectorXcd dy = utab.deta.cast<complex>() * cu / sqrt_j;
      const Vector2c btc = geo.jacobian.transpose().cast<complex>() * corr;
      Eigen::VectorXcd a(rule.size()), b(rule.size());
      for (std::size_t q = 0; q < rule.size(); ++q)
      {
        const double wpsi = rule.weights[q] * barycentric(iz, rule.points[q]);
        a(q) = wpsi * (dx(q) - btc(0));
        b(q) = wpsi * (dy(q) - btc(1));
      }
      P.gradient_moments[s] = rtab.x.transpose().cast<complex>() * a
                              + rtab.y.transpose().cast<complex>() * b;
    }

    // (f^z, q_l): polynomial part exactly, f with the element data rule
    Eigen::VectorXcd vm = Eigen::VectorXcd::Zero(np);
    {
      const int deg = pt + 1 + p;
      const TriangleRule& rule = triangle_rule(deg);
      const Tabulation& qtab = reference_tabulation(p, deg);
      const Tabulation& utab = reference_tabulation(pt, deg);
      const Eigen::VectorXcd uq = utab.values.cast<complex>() * cu / sqrt_j;
      const Eigen::VectorXcd gq = (utab.dxi * cg.x() + utab.deta * cg.y()).cast<complex>()
                                  * cu / sqrt_j;
      Eigen::VectorXcd wf(rule.size());
      complex mass = 0.0, gradient = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q)
      {
        const double psi = barycentric(iz, rule.points[q]);
        const complex a = k2 * uq(q) * psi;
        const complex b = gq(q) - corr_dot;
        wf(q) = rule.weights[q] * (a - b);
        mass += rule.weights[q] * J * a;
        gradient += rule.weights[q] * J * b;
      }
      vm += sqrt_j * qtab.values.transpose().cast<complex>() * wf;
      scale_volume += std::abs(mass);
      scale_grad += std::abs(gradient);
    }
    if (d.data().f)
    {
      const TriangleRule& rule = d.element_data_rule(t);
      const Tabulation& qtab = reference_tabulation(p, rule.degree);
      Eigen::VectorXcd wf(rule.size());
      complex src = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q)
      {
        const Point& xi = rule.points[q];
        wf(q) = rule.weights[q] * d.f(mesh.map(t, xi)) * barycentric(iz, xi);
        src += J * wf(q);
      }
      vm += sqrt_j * qtab.values.transpose().cast<complex>() * wf;
      scale_volume += std::abs(src);
    }
    P.volume_moments[s] = vm;
    flux_f += std::sqrt(geo.area) * vm(0);

    // volume oscillation: f^z - Pi f^z pointwise
    {
      const int deg = std::max(data_degree(pt), 2 * p + 2);
      const TriangleRule& rule = triangle_rule(deg);
      const Tabulation& qtab = reference_tabulation(p, deg);
      const Tabulation& utab = reference_tabulation(pt, deg);
      const Eigen::VectorXcd uq = utab.values.cast<complex>() * cu / sqrt_j;
      const Eigen::VectorXcd gq = (utab.dxi * cg.x() + utab.deta * cg.y()).cast<complex>()
                                  * cu / sqrt_j;
      const Eigen::VectorXcd proj = qtab.values.cast<complex>() * vm / sqrt_j;
      double r2 = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q)
      {
        const Point& xi = rule.points[q];
        const double psi = barycentric(iz, xi);
        const complex fz = (d.f(mesh.map(t, xi)) + k2 * uq(q)) * psi - (gq(q) - corr_dot);
        r2 += rule.weights[q] * J * std::norm(fz - proj(q));
      }
      const double hj = geo.diameter / bessel_j1_first_root;
      P.osc_f2 += hj * hj * r2;
    }

    // boundary data on domain-boundary edges of this triangle
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
      std::vector<Point> pts;
      for (double tq : br.points)
        pts.push_back(reference_edge_point(l, tq));
      const Tabulation tab = tabulate_dubiner(pt, pts);
      const Eigen::VectorXcd uq = tab.values.cast<complex>() * cu / sqrt_j;
      const Point cn = C.transpose() * n;
      const Eigen::VectorXcd dnu = (tab.dxi * cn.x() + tab.deta * cn.y()).cast<complex>()
                                   * cu / sqrt_j;
      Eigen::VectorXcd gz(br.size());
      complex bnd = 0.0, nrm = 0.0;
      for (std::size_t q = 0; q < br.size(); ++q)
      {
        const complex gq = d.g(mesh.map(t, pts[q]), n);
        const complex X = gq - dnu(q) + complex(0.0, ke) * uq(q);
        const double psi = l == iz ? 0.0 : barycentric(iz, pts[q]);
        const complex a = (gq + complex(0.0, ke) * uq(q) - prm.gamma * ke * hp * X) * psi;
        const complex b = complex(0.0, prm.gamma * hp) * X * dpsi_n;
        gz(q) = -a + b;
        bnd += br.weights[q] * len * a;
        nrm += br.weights[q] * len * b;
      }
      scale_bnd += std::abs(bnd);
      scale_normal += std::abs(nrm);

      PatchFluxProblem::BoundaryEdge be;
      be.edge = e;
      be.slot = s;
      be.local = l;
      be.moments = Eigen::VectorXcd::Zero(p + 1);
      Eigen::VectorXd qv(p + 1);
      for (std::size_t q = 0; q < br.size(); ++q)
      {
        legendre01(p, br.points[q], qv);
        be.moments += (br.weights[q] * len * gz(q)) * qv.cast<complex>();
      }
      flux_g += be.moments(0);

      double r2 = 0.0;
      for (std::size_t q = 0; q < br.size(); ++q)
      {
        legendre01(p, br.points[q], qv);
        const complex proj = qv.cast<complex>().dot(be.moments) / len;
        r2 += br.weights[q] * len * std::norm(gz(q) - proj);
      }
      P.osc_g2 += trace_constant_sq(geo) * len * r2;
      P.boundary.push_back(std::move(be));
    }
  }
  (void)rt;
  P.compatibility = flux_f - flux_g;
  P.compatibility_scale = scale_volume + scale_grad + scale_bnd + scale_normal;
  return P;
}

namespace
{

template <class Matrix>
Eigen::MatrixXd sparse_solve_real(const Eigen::SparseMatrix<double>& A, const Matrix& rhs)
{
#ifdef HPDG_HAVE_UMFPACK
  Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu;
#else
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
#endif
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("patch factorization failed");
  Eigen::MatrixXd x = lu.solve(rhs);
  // one step of iterative refinement
  const Eigen::MatrixXd r = rhs - A * x;
  x += lu.solve(r);
  return x;
}

} // namespace

namespace
{

/// Element contribution to the patch mixed system in local unknowns
/// (RT dofs, then pressure), with boundary-edge dofs already moved to the
/// right-hand side and shared-edge orientation signs applied.
struct SlotSystem
{
  Eigen::MatrixXd K;
  /// two columns: real and imaginary part
  Eigen::MatrixXd r;
  /// patch-wide index of each local unknown, -1 for prescribed ones
  std::vector<int> index;
  std::vector<double> sign;
  Eigen::VectorXcd fixed;
  double mean = 0.0;
};

struct PatchLayout
{
  int ned = 0, nint = 0, np = 0, nloc = 0;
  int shared_dofs = 0;
  int interior_base = 0;
  int pressure_base = 0;
  int total = 0;
  std::vector<SlotSystem> slots;
};

PatchLayout build_slot_systems(const Discretization& d, const PatchFluxProblem& P)
{
  const Mesh& mesh = d.mesh();
  const int p = P.degree;
  const RTElement& rt = rt_element(p);
  PatchLayout L;
  L.nloc = rt.dim;
  L.ned = p + 1;
  L.nint = L.nloc - 3 * L.ned;
  L.np = scalar_dim(p);
  const int m = static_cast<int>(P.patch.triangles.size());

  std::map<int, int> shared;
  for (int e : P.patch.edges)
    if (!mesh.edge(e).on_boundary())
    {
      shared[e] = L.shared_dofs;
      L.shared_dofs += L.ned;
    }
  L.interior_base = L.shared_dofs;
  L.pressure_base = L.interior_base + m * L.nint;
  L.total = L.pressure_base + m * L.np + 1;

  L.slots.resize(m);
  for (int s = 0; s < m; ++s)
  {
    const int t = P.patch.triangles[s];
    SlotSystem& S = L.slots[s];
    const int n = L.nloc + L.np;
    S.index.assign(n, -1);
    S.sign.assign(n, 1.0);
    S.fixed = Eigen::VectorXcd::Zero(L.nloc);
    for (int l = 0; l < 3; ++l)
    {
      const int e = mesh.triangle_edges(t)[l];
      auto it = shared.find(e);
      if (it == shared.end())
        continue;
      const bool reversed = mesh.triangle(t)[(l + 1) % 3] != mesh.edge(e).nodes[0];
      for (int j = 0; j < L.ned; ++j)
      {
        S.index[rt.edge_dof(l, j)] = it->second + j;
        S.sign[rt.edge_dof(l, j)] = (reversed && j % 2 == 0) ? -1.0 : 1.0;
      }
    }
    for (int k = 0; k < L.nint; ++k)
      S.index[3 * L.ned + k] = L.interior_base + s * L.nint + k;
    for (int l = 0; l < L.np; ++l)
      S.index[L.nloc + l] = L.pressure_base + s * L.np + l;
  }
  for (const auto& be : P.boundary)
    for (int j = 0; j < L.ned; ++j)
      L.slots[be.slot].fixed(rt.edge_dof(be.local, j)) = be.moments(j);

  for (int s = 0; s < m; ++s)
  {
    const int t = P.patch.triangles[s];
    SlotSystem& S = L.slots[s];
    const auto& geo = mesh.geometry(t);
    const double J = geo.det;
    const Eigen::Matrix2d G = geo.jacobian.transpose() * geo.jacobian;
    const Eigen::MatrixXd M =
        (G(0, 0) * rt.mass_xx + G(0, 1) * (rt.mass_xy + rt.mass_xy.transpose())
         + G(1, 1) * rt.mass_yy)
        / J;
    const Eigen::MatrixXd D = rt.divergence / std::sqrt(J);
    const int n = L.nloc + L.np;
    S.K = Eigen::MatrixXd::Zero(n, n);
    S.K.topLeftCorner(L.nloc, L.nloc) = M;
    S.K.topRightCorner(L.nloc, L.np) = -D.transpose();
    S.K.bottomLeftCorner(L.np, L.nloc) = -D;
    Eigen::VectorXcd r(n);
    r.head(L.nloc) = -P.gradient_moments[s] - M.cast<complex>() * S.fixed;
    r.tail(L.np) = -P.volume_moments[s] + D.cast<complex>() * S.fixed;
    const Eigen::Map<const Eigen::VectorXd> sg(S.sign.data(), n);
    S.K = sg.asDiagonal() * S.K * sg.asDiagonal();
    r = sg.cast<complex>().asDiagonal() * r;
    S.r.resize(n, 2);
    S.r.col(0) = r.real();
    S.r.col(1) = r.imag();
    S.mean = std::sqrt(geo.area);
  }
  return L;
}

PatchFlux unpack(const PatchFluxProblem& P, const PatchLayout& L,
                 const std::vector<Eigen::MatrixXd>& local, complex multiplier)
{
  const int m = static_cast<int>(L.slots.size());
  PatchFlux F;
  F.node = P.patch.node;
  F.degree = P.degree;
  F.triangles = P.patch.triangles;
  F.rt.resize(m);
  F.pressure.resize(m);
  for (int s = 0; s < m; ++s)
  {
    const SlotSystem& S = L.slots[s];
    Eigen::VectorXcd c = S.fixed;
    for (int k = 0; k < L.nloc; ++k)
      if (S.index[k] >= 0)
        c(k) = S.sign[k] * complex(local[s](k, 0), local[s](k, 1));
    F.rt[s] = std::move(c);
    F.pressure[s] = local[s].block(L.nloc, 0, L.np, 1).cast<complex>()
                    + complex(0.0, 1.0) * local[s].block(L.nloc, 1, L.np, 1).cast<complex>();
  }
  F.multiplier = multiplier;
  return F;
}

PatchFlux solve_monolithic(const PatchFluxProblem& P, const PatchLayout& L)
{
  const int m = static_cast<int>(L.slots.size());
  const int lagrange = L.total - 1;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(L.total, 2);
  for (int s = 0; s < m; ++s)
  {
    const SlotSystem& S = L.slots[s];
    const int n = static_cast<int>(S.index.size());
    for (int i = 0; i < n; ++i)
    {
      const int gi = S.index[i];
      if (gi < 0)
        continue;
      rhs.row(gi) += S.r.row(i);
      for (int j = 0; j < n; ++j)
        if (S.index[j] >= 0 && S.K(i, j) != 0.0)
          trip.emplace_back(gi, S.index[j], S.K(i, j));
    }
    const int p0 = S.index[L.nloc];
    trip.emplace_back(p0, lagrange, S.mean);
    trip.emplace_back(lagrange, p0, S.mean);
  }
  Eigen::SparseMatrix<double> A(L.total, L.total);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  const Eigen::MatrixXd x = sparse_solve_real(A, rhs);

  std::vector<Eigen::MatrixXd> local(m);
  for (int s = 0; s < m; ++s)
  {
    const SlotSystem& S = L.slots[s];
    local[s] = Eigen::MatrixXd::Zero(S.index.size(), 2);
    for (std::size_t i = 0; i < S.index.size(); ++i)
      if (S.index[i] >= 0)
        local[s].row(i) = x.row(S.index[i]);
  }
  return unpack(P, L, local, complex(x(lagrange, 0), x(lagrange, 1)));
}

/// [M -D^T; -D 0] with M the SPD interior RT mass block (first n rows)
/// and D of full row rank, solved through M and the pressure Schur
/// complement D M^-1 D^T, both by Cholesky. About four times cheaper than
/// pivoted LU of the whole block.
class InteriorSaddle
{
public:
  InteriorSaddle(const Eigen::MatrixXd& K, int n)
      : n_(n), m_(K.topLeftCorner(n, n)), d_(-K.bottomLeftCorner(K.rows() - n, n))
  {
    if (m_.info() != Eigen::Success)
      throw std::runtime_error("interior RT mass block is not positive definite");
    w_ = m_.matrixL().solve(d_.transpose());
    s_.compute(w_.transpose() * w_);
    if (s_.info() != Eigen::Success)
      throw std::runtime_error("divergence block is rank deficient");
  }

  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const
  {
    const Eigen::MatrixXd b1 = b.topRows(n_);
    const Eigen::MatrixXd b2 = b.bottomRows(b.rows() - n_);
    // z = -(D M^-1 D^T)^-1 (b2 + D M^-1 b1), y = M^-1 (b1 + D^T z)
    const Eigen::MatrixXd lb1 = m_.matrixL().solve(b1);
    const Eigen::MatrixXd z = -s_.solve(b2 + w_.transpose() * lb1);
    Eigen::MatrixXd x(b.rows(), b.cols());
    x.topRows(n_) = m_.matrixU().solve(lb1 + w_ * z);
    x.bottomRows(b.rows() - n_) = z;
    return x;
  }

private:
  int n_;
  Eigen::LLT<Eigen::MatrixXd> m_;
  Eigen::MatrixXd d_, w_;
  Eigen::LLT<Eigen::MatrixXd> s_;
};

/// Static condensation: interior RT dofs and the non-constant pressure
/// modes of each triangle are eliminated element by element (div maps the
/// interior RT space onto the mean-free part of P_p, so that block is
/// invertible); the remaining system couples shared-edge dofs, the
/// per-triangle pressure means and the multiplier.
PatchFlux solve_condensed(const PatchFluxProblem& P, const PatchLayout& L)
{
  const int m = static_cast<int>(L.slots.size());
  const int nb = L.shared_dofs + m + 1;
  const int lagrange = nb - 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nb, nb);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nb, 2);

  struct Elim
  {
    std::vector<int> inner, outer, outer_global;
    Eigen::MatrixXd XB, Xr;
  };
  std::vector<Elim> elim(m);
  for (int s = 0; s < m; ++s)
  {
    const SlotSystem& S = L.slots[s];
    Elim& E = elim[s];
    const int n = static_cast<int>(S.index.size());
    for (int i = 0; i < n; ++i)
    {
      const int g = S.index[i];
      if (g < 0)
        continue;
      if (g < L.shared_dofs)
      {
        E.outer.push_back(i);
        E.outer_global.push_back(g);
      }
      else if (i == L.nloc)
      {
        E.outer.push_back(i);
        E.outer_global.push_back(L.shared_dofs + s);
      }
      else
        E.inner.push_back(i);
    }
    const int ni = static_cast<int>(E.inner.size());
    const int no = static_cast<int>(E.outer.size());
    Eigen::MatrixXd KII(ni, ni), KIB(ni, no), KBI(no, ni), KBB(no, no);
    for (int a = 0; a < ni; ++a)
    {
      for (int b = 0; b < ni; ++b)
        KII(a, b) = S.K(E.inner[a], E.inner[b]);
      for (int b = 0; b < no; ++b)
        KIB(a, b) = S.K(E.inner[a], E.outer[b]);
    }
    for (int a = 0; a < no; ++a)
    {
      for (int b = 0; b < ni; ++b)
        KBI(a, b) = S.K(E.outer[a], E.inner[b]);
      for (int b = 0; b < no; ++b)
        KBB(a, b) = S.K(E.outer[a], E.outer[b]);
    }
    Eigen::MatrixXd rI(ni, 2), rB(no, 2);
    for (int a = 0; a < ni; ++a)
      rI.row(a) = S.r.row(E.inner[a]);
    for (int a = 0; a < no; ++a)
      rB.row(a) = S.r.row(E.outer[a]);

    const InteriorSaddle lu(KII, L.nint);
    E.XB = lu.solve(KIB);
    E.Xr = lu.solve(rI);
    const Eigen::MatrixXd Sch = KBB - KBI * E.XB;
    const Eigen::MatrixXd g = rB - KBI * E.Xr;
    for (int a = 0; a < no; ++a)
    {
      rhs.row(E.outer_global[a]) += g.row(a);
      for (int b = 0; b < no; ++b)
        A(E.outer_global[a], E.outer_global[b]) += Sch(a, b);
    }
    A(L.shared_dofs + s, lagrange) += S.mean;
    A(lagrange, L.shared_dofs + s) += S.mean;
  }

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::MatrixXd x = lu.solve(rhs);
  x += lu.solve(Eigen::MatrixXd(rhs - A * x));

  std::vector<Eigen::MatrixXd> local(m);
  for (int s = 0; s < m; ++s)
  {
    const SlotSystem& S = L.slots[s];
    const Elim& E = elim[s];
    const int no = static_cast<int>(E.outer.size());
    Eigen::MatrixXd xB(no, 2);
    for (int a = 0; a < no; ++a)
      xB.row(a) = x.row(E.outer_global[a]);
    const Eigen::MatrixXd xI = E.Xr - E.XB * xB;
    local[s] = Eigen::MatrixXd::Zero(S.index.size(), 2);
    for (int a = 0; a < no; ++a)
      local[s].row(E.outer[a]) = xB.row(a);
    for (std::size_t a = 0; a < E.inner.size(); ++a)
      local[s].row(E.inner[a]) = xI.row(a);
  }
  return unpack(P, L, local, complex(x(lagrange, 0), x(lagrange, 1)));
}

} // namespace

PatchFlux solve_patch_flux(const Discretization& d, const PatchFluxProblem& P,
                           PatchSolver solver)
{
  const PatchLayout L = build_slot_systems(d, P);
  return solver == PatchSolver::condensed ? solve_condensed(P, L) : solve_monolithic(P, L);
}

VectorPolynomial rt_to_polynomial(const Mesh& mesh, int t, int p, const Eigen::VectorXcd& c)
{
  const RTElement& rt = rt_element(p);
  const auto& geo = mesh.geometry(t);
  const Eigen::VectorXcd px = rt.project_x.cast<complex>() * c;
  const Eigen::VectorXcd py = rt.project_y.cast<complex>() * c;
  const double s = 1.0 / std::sqrt(geo.det);
  const Eigen::Matrix2d& B = geo.jacobian;
  VectorPolynomial v;
  v.degree = p + 1;
  v.x = (B(0, 0) * px + B(0, 1) * py) * s;
  v.y = (B(1, 0) * px + B(1, 1) * py) * s;
  return v;
}

PatchPotential solve_patch_potential(const Discretization& d, const Eigen::VectorXcd& u,
                                     int node)
{
  const Mesh& mesh = d.mesh();
  const Patch patch = mesh.patch(node);
  int pmax = 0;
  for (int t : patch.triangles)
    pmax = std::max(pmax, d.degree(t));
  const H1Basis basis{pmax + 1};
  const int P = basis.P;
  const int ndim = basis.dim();
  const int nb = scalar_dim(P - 3);
  const int m = static_cast<int>(patch.triangles.size());

  std::vector<int> constrained_edges;
  for (int e : patch.opposite_edges)
    if (!patch.boundary_node || !mesh.edge(e).on_boundary())
      constrained_edges.push_back(e);
  if (constrained_edges.empty())
    throw std::runtime_error("patch of node " + std::to_string(node)
                             + " has no constrained boundary");
  std::sort(constrained_edges.begin(), constrained_edges.end());
  std::vector<int> constrained_nodes;
  for (int e : constrained_edges)
    for (int v : mesh.edge(e).nodes)
      constrained_nodes.push_back(v);
  std::sort(constrained_nodes.begin(), constrained_nodes.end());

  auto is_in = [](const std::vector<int>& v, int x) {
    return std::binary_search(v.begin(), v.end(), x);
  };

  std::map<int, int> vertex_index, edge_index;
  int n = 0;
  for (int t : patch.triangles)
    for (int v : mesh.triangle(t))
      if (!is_in(constrained_nodes, v) && !vertex_index.count(v))
        vertex_index[v] = -1;
  for (auto& [v, idx] : vertex_index)
    idx = n++;
  if (P >= 2)
  {
    for (int t : patch.triangles)
      for (int e : mesh.triangle_edges(t))
        if (!is_in(constrained_edges, e) && !edge_index.count(e))
          edge_index[e] = -1;
    for (auto& [e, idx] : edge_index)
    {
      idx = n;
      n += P - 1;
    }
  }
  const int bubble_base = n;
  n += m * nb;

  const TriangleRule& rule = triangle_rule(2 * P);
  const int nq = static_cast<int>(rule.size());
  const Eigen::VectorXd w = weights_of(rule.weights);
  std::vector<std::vector<int>> maps(m);
  std::vector<Eigen::MatrixXd> values(m);
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::MatrixXcd F = Eigen::MatrixXcd::Zero(n, 1);

  for (int s = 0; s < m; ++s)
  {
    const int t = patch.triangles[s];
    const auto& tri = mesh.triangle(t);
    const auto& geo = mesh.geometry(t);
    const double J = geo.det;
    const Eigen::Matrix2d& C = geo.inverse_transpose;
    auto& map = maps[s];
    map.assign(ndim, -1);
    for (int i = 0; i < 3; ++i)
    {
      auto it = vertex_index.find(tri[i]);
      if (it != vertex_index.end())
        map[i] = it->second;
    }
    for (int l = 0; l < 3 && P >= 2; ++l)
    {
      auto it = edge_index.find(mesh.triangle_edges(t)[l]);
      if (it != edge_index.end())
        for (int k = 0; k < P - 1; ++k)
          map[basis.edge_offset(l) + k] = it->second + k;
    }
    for (int k = 0; k < nb; ++k)
      map[basis.bubble_offset() + k] = bubble_base + s * nb + k;

    Eigen::MatrixXd V(nq, ndim), GX(nq, ndim), GY(nq, ndim);
    Eigen::VectorXd v, dx, dy;
    for (int q = 0; q < nq; ++q)
    {
      basis.evaluate(tri, rule.points[q], v, dx, dy);
      V.row(q) = v.transpose();
      GX.row(q) = (C(0, 0) * dx + C(0, 1) * dy).transpose();
      GY.row(q) = (C(1, 0) * dx + C(1, 1) * dy).transpose();
    }
    const Eigen::MatrixXd K = J * (GX.transpose() * w.asDiagonal() * GX
                                   + GY.transpose() * w.asDiagonal() * GY);

    // grad(psi u) = psi grad u + u grad psi
    const int iz = local_vertex(mesh, t, node);
    const Point gpsi = C * barycentric_gradient(iz);
    const Tabulation& ut = reference_tabulation(d.degree(t), rule.degree);
    const auto cu = u.segment(d.offset(t), d.block_size(t));
    const double isj = 1.0 / std::sqrt(J);
    const Eigen::VectorXcd uq = ut.values.cast<complex>() * cu * isj;
    const Eigen::VectorXcd ux = ut.dxi.cast<complex>() * cu * isj;
    const Eigen::VectorXcd uy = ut.deta.cast<complex>() * cu * isj;
    Eigen::VectorXcd wx(nq), wy(nq);
    for (int q = 0; q < nq; ++q)
    {
      const double psi = barycentric(iz, rule.points[q]);
      const complex gx = C(0, 0) * ux(q) + C(0, 1) * uy(q);
      const complex gy = C(1, 0) * ux(q) + C(1, 1) * uy(q);
      wx(q) = J * w(q) * (psi * gx + uq(q) * gpsi.x());
      wy(q) = J * w(q) * (psi * gy + uq(q) * gpsi.y());
    }
    const Eigen::VectorXcd Floc = GX.transpose().cast<complex>() * wx
                                  + GY.transpose().cast<complex>() * wy;
    for (int i = 0; i < ndim; ++i)
    {
      if (map[i] < 0)
        continue;
      F(map[i], 0) += Floc(i);
      for (int j = 0; j < ndim; ++j)
        if (map[j] >= 0)
          trip.emplace_back(map[i], map[j], K(i, j));
    }
    values[s] = std::move(V);
  }

  Eigen::SparseMatrix<double> K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(K);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("potential factorization failed at node " + std::to_string(node));
  Eigen::MatrixXd rhs(n, 2);
  rhs.col(0) = F.col(0).real();
  rhs.col(1) = F.col(0).imag();
  Eigen::MatrixXd x = ldlt.solve(rhs);
  x += ldlt.solve(Eigen::MatrixXd(rhs - K * x));
  const Eigen::VectorXcd sol = x.col(0).cast<complex>() + complex(0.0, 1.0) * x.col(1).cast<complex>();

  PatchPotential pot;
  pot.node = node;
  pot.degree = P;
  pot.triangles = patch.triangles;
  const double fmax = F.cwiseAbs().maxCoeff();
  const Eigen::VectorXcd res = K.cast<complex>() * sol - F.col(0);
  pot.optimality_residual = fmax > 0.0 ? res.cwiseAbs().maxCoeff() / fmax : 0.0;

  const Tabulation& dtab = reference_tabulation(P, rule.degree);
  for (int s = 0; s < m; ++s)
  {
    const int t = patch.triangles[s];
    Eigen::VectorXcd local = Eigen::VectorXcd::Zero(ndim);
    for (int i = 0; i < ndim; ++i)
      if (maps[s][i] >= 0)
        local(i) = sol(maps[s][i]);
    const Eigen::VectorXcd sq = values[s].cast<complex>() * local;
    const double sqrt_j = std::sqrt(mesh.geometry(t).det);
    ScalarPolynomial piece;
    piece.degree = P;
    piece.c = sqrt_j * dtab.values.transpose().cast<complex>() * (w.cast<complex>().cwiseProduct(sq));
    pot.pieces.push_back(std::move(piece));
  }
  return pot;
}

namespace
{

void add_into(Eigen::VectorXcd& target, const Eigen::VectorXcd& v)
{
  target.head(v.size()) += v;
}

} // namespace

std::vector<VectorPolynomial> assemble_global_flux(const Mesh& mesh,
                                                   const std::vector<PatchFlux>& fluxes,
                                                   const std::vector<int>& order)
{
  const int nt = mesh.num_triangles();
  std::vector<VectorPolynomial> sigma(nt);
  for (const auto& f : fluxes)
    for (int t : f.triangles)
      sigma[t].degree = std::max(sigma[t].degree, f.degree + 1);
  for (auto& s : sigma)
  {
    s.x = Eigen::VectorXcd::Zero(scalar_dim(s.degree));
    s.y = Eigen::VectorXcd::Zero(scalar_dim(s.degree));
  }
  std::vector<int> idx = order;
  if (idx.empty())
  {
    idx.resize(fluxes.size());
    std::iota(idx.begin(), idx.end(), 0);
  }
  for (int i : idx)
  {
    const PatchFlux& f = fluxes[i];
    for (std::size_t s = 0; s < f.triangles.size(); ++s)
    {
      const int t = f.triangles[s];
      const VectorPolynomial v = rt_to_polynomial(mesh, t, f.degree, f.rt[s]);
      add_into(sigma[t].x, v.x);
      add_into(sigma[t].y, v.y);
    }
  }
  return sigma;
}

std::vector<ScalarPolynomial>
assemble_global_potential(const Mesh& mesh, const std::vector<PatchPotential>& potentials)
{
  const int nt = mesh.num_triangles();
  std::vector<ScalarPolynomial> s(nt);
  for (const auto& p : potentials)
    for (int t : p.triangles)
      s[t].degree = std::max(s[t].degree, p.degree);
  for (auto& x : s)
    x.c = Eigen::VectorXcd::Zero(scalar_dim(x.degree));
  for (const auto& p : potentials)
    for (std::size_t i = 0; i < p.triangles.size(); ++i)
      add_into(s[p.triangles[i]].c, p.pieces[i].c);

  complex integral = 0.0;
  for (int t = 0; t < nt; ++t)
    integral += std::sqrt(mesh.geometry(t).area) * s[t].c(0);
  const complex mean = integral / mesh.area();
  for (int t = 0; t < nt; ++t)
    s[t].c(0) -= mean * std::sqrt(mesh.geometry(t).area);
  return s;
}

Reconstruction reconstruct(const Discretization& d, const Eigen::VectorXcd& u,
                           const DGGradient& grad, const ReconstructionOptions& opts,
                           Exec exec)
{
  const Mesh& mesh = d.mesh();
  const int nn = mesh.num_nodes();
  Reconstruction R;
  R.fluxes.resize(nn);
  R.potentials.resize(nn);
  R.compatibility.resize(nn);
  R.compatibility_scale.resize(nn);
  R.osc_f2.resize(nn);
  R.osc_g2.resize(nn);
  const bool par = exec == Exec::parallel;

#pragma omp parallel for schedule(dynamic, 1) if (par)
  for (int z = 0; z < nn; ++z)
  {
    const PatchFluxProblem P = build_patch_data(d, u, grad, z, opts);
    R.compatibility[z] = P.compatibility;
    R.compatibility_scale[z] = P.compatibility_scale;
    R.osc_f2[z] = P.osc_f2;
    R.osc_g2[z] = P.osc_g2;
    R.fluxes[z] = solve_patch_flux(d, P);
    R.potentials[z] = solve_patch_potential(d, u, z);
  }

  R.sigma = assemble_global_flux(mesh, R.fluxes);
  R.potential = assemble_global_potential(mesh, R.potentials);
  double of = 0.0, og = 0.0;
  for (int z = 0; z < nn; ++z)
  {
    of += R.osc_f2[z];
    og += R.osc_g2[z];
  }
  R.osc_f = std::sqrt(of);
  R.osc_g = std::sqrt(og);
  return R;
}

complex evaluate(const Mesh& mesh, int t, const ScalarPolynomial& s, const Point& xi)
{
  Eigen::VectorXd v(scalar_dim(s.degree));
  dubiner(s.degree, xi, v);
  return v.cast<complex>().dot(s.c) / std::sqrt(mesh.geometry(t).det);
}

Vector2c evaluate_gradient(const Mesh& mesh, int t, const ScalarPolynomial& s,
                           const Point& xi)
{
  Eigen::VectorXd v(scalar_dim(s.degree)), dx, dy;
  dubiner(s.degree, xi, v, &dx, &dy);
  const auto& geo = mesh.geometry(t);
  const Vector2c ref(dx.cast<complex>().dot(s.c), dy.cast<complex>().dot(s.c));
  return geo.inverse_transpose.cast<complex>() * ref / std::sqrt(geo.det);
}

Vector2c evaluate(const Mesh& mesh, int t, const VectorPolynomial& v, const Point& xi)
{
  Eigen::VectorXd q(scalar_dim(v.degree));
  dubiner(v.degree, xi, q);
  const double s = 1.0 / std::sqrt(mesh.geometry(t).det);
  return Vector2c(q.cast<complex>().dot(v.x) * s, q.cast<complex>().dot(v.y) * s);
}

complex evaluate_divergence(const Mesh& mesh, int t, const VectorPolynomial& v,
                            const Point& xi)
{
  Eigen::VectorXd q(scalar_dim(v.degree)), dx, dy;
  dubiner(v.degree, xi, q, &dx, &dy);
  const auto& geo = mesh.geometry(t);
  const Eigen::Matrix2d& C = geo.inverse_transpose;
  // d/dx of the x component plus d/dy of the y component
  const complex ax = C(0, 0) * dx.cast<complex>().dot(v.x) + C(0, 1) * dy.cast<complex>().dot(v.x);
  const complex by = C(1, 0) * dx.cast<complex>().dot(v.y) + C(1, 1) * dy.cast<complex>().dot(v.y);
  return (ax + by) / std::sqrt(geo.det);
}

} // namespace hpdg
