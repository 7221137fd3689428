#include "hpdg/audit.hpp"
#include "hpdg/benchmarks.hpp"
#include "hpdg/dg.hpp"
#include "hpdg/polynomials.hpp"
#include "hpdg/projection.hpp"
#include "hpdg/reconstruction.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

using namespace hpdg;

namespace
{

struct Solved
{
  BenchmarkCase bc;
  Mesh mesh;
  std::vector<int> degrees;
  DGParams prm;
  std::unique_ptr<Discretization> d;
  DGSolution sol;
  DGGradient grad;
};

// benchmark on its initial mesh, optionally with a few elements refined
// in h and p so that patches see mixed degrees and sizes
std::unique_ptr<Solved> solved(BenchmarkId id, double k, bool perturb = false)
{
  auto s = std::make_unique<Solved>();
  s->bc = make_benchmark(id, k);
  InitialDiscretization init = initial_discretization(s->bc, s->bc.c_res);
  s->mesh = std::move(init.mesh);
  s->degrees = std::move(init.degrees);
  if (perturb)
  {
    const std::vector<int> marked{0, 5, 9};
    const RefinementResult r = refine(s->mesh, marked, RefinementStrategy::nvb);
    s->degrees = transfer_degrees(r, s->degrees);
    s->mesh = r.mesh;
    for (int t = 0; t < s->mesh.num_triangles(); t += 4)
      s->degrees[t] += 1;
  }
  s->prm.k = k;
  s->d = std::make_unique<Discretization>(s->mesh, s->degrees, s->prm, s->bc.data);
  s->sol = solve(*s->d);
  s->grad = dg_gradient(*s->d, s->sol.u);
  return s;
}

double relative_compatibility(const PatchFluxProblem& P)
{
  return std::abs(P.compatibility) / P.compatibility_scale;
}

// max over patch triangles of |(div zeta - f^z, q_l)_T|, l over P_{p_z}
double divergence_residual(const Mesh& mesh, const PatchFluxProblem& P, const PatchFlux& F)
{
  double worst = 0.0;
  for (std::size_t s = 0; s < F.triangles.size(); ++s)
  {
    const int t = F.triangles[s];
    const VectorPolynomial v = rt_to_polynomial(mesh, t, F.degree, F.rt[s]);
    const TriangleRule& r = triangle_rule(2 * F.degree + 2);
    const int n = scalar_dim(F.degree);
    Eigen::VectorXcd m = Eigen::VectorXcd::Zero(n);
    Eigen::VectorXd q(n);
    const double J = mesh.geometry(t).det;
    for (std::size_t k = 0; k < r.size(); ++k)
    {
      dubiner(F.degree, r.points[k], q);
      m += r.weights[k] * std::sqrt(J) * evaluate_divergence(mesh, t, v, r.points[k])
           * q.cast<complex>();
    }
    worst = std::max(worst, (m - P.volume_moments[s]).cwiseAbs().maxCoeff());
  }
  return worst;
}

// max over domain-boundary edges of |int zeta.n q_j ds - prescribed moment|
double trace_residual(const Mesh& mesh, const PatchFluxProblem& P, const PatchFlux& F)
{
  double worst = 0.0;
  for (const auto& be : P.boundary)
  {
    const int t = F.triangles[be.slot];
    const VectorPolynomial v = rt_to_polynomial(mesh, t, F.degree, F.rt[be.slot]);
    const Point n = mesh.outward_normal(t, be.local);
    const double len = mesh.edge_length(be.edge);
    const LineRule& lr = line_rule(2 * F.degree + 2);
    Eigen::VectorXcd m = Eigen::VectorXcd::Zero(F.degree + 1);
    Eigen::VectorXd q(F.degree + 1);
    for (std::size_t k = 0; k < lr.size(); ++k)
    {
      legendre01(F.degree, lr.points[k], q);
      const Vector2c s = evaluate(mesh, t, v, reference_edge_point(be.local, lr.points[k]));
      m += lr.weights[k] * len * (s(0) * n.x() + s(1) * n.y()) * q.cast<complex>();
    }
    worst = std::max(worst, (m - be.moments).cwiseAbs().maxCoeff());
  }
  return worst;
}

} // namespace

TEST_CASE("zero problem")
{
  const Mesh m = build_structured_mesh(Rectangle{}, 0.25);
  const ProblemData data;
  DGParams prm;
  prm.k = 4.0;
  const Discretization d(m, std::vector<int>(m.num_triangles(), 2), prm, data);
  const Eigen::VectorXcd u = Eigen::VectorXcd::Zero(d.num_dofs());
  const DGGradient g = dg_gradient(d, u);
  for (int z : {0, 12, 24})
  {
    const PatchFluxProblem P = build_patch_data(d, u, g, z);
    for (const auto& v : P.volume_moments)
      CHECK(v.norm() == 0.0);
    for (const auto& be : P.boundary)
      CHECK(be.moments.norm() == 0.0);
    const PatchFlux F = solve_patch_flux(d, P);
    for (const auto& c : F.rt)
      CHECK(c.norm() == 0.0);
    for (const auto& c : F.pressure)
      CHECK(c.norm() == 0.0);
    const PatchPotential S = solve_patch_potential(d, u, z);
    for (const auto& piece : S.pieces)
      CHECK(piece.c.norm() == 0.0);
  }
  const Reconstruction r = reconstruct(d, u, g);
  for (const auto& s : r.sigma)
    CHECK(s.x.norm() + s.y.norm() == 0.0);
  for (const auto& s : r.potential)
    CHECK(s.c.norm() == 0.0);
  CHECK(r.osc_f == 0.0);
  CHECK(r.osc_g == 0.0);
}

TEST_CASE("patch problems on the benchmarks")
{
  for (BenchmarkId id : all_benchmarks())
  {
    const double k = id == BenchmarkId::square_hankel ? 20.0 : 10.0;
    const auto s = solved(id, k, true);
    const Discretization& d = *s->d;
    INFO(to_string(id));
    double compat = 0.0, div = 0.0, trace = 0.0, diff = 0.0;
    for (int z = 0; z < s->mesh.num_nodes(); ++z)
    {
      const PatchFluxProblem P = build_patch_data(d, s->sol.u, s->grad, z);
      compat = std::max(compat, relative_compatibility(P));
      // an interior node only sees the domain boundary through opposite
      // edges, where psi_z vanishes but grad psi_z . n does not
      if (!P.patch.boundary_node)
        for (const auto& be : P.boundary)
          CHECK(std::find(P.patch.opposite_edges.begin(), P.patch.opposite_edges.end(), be.edge)
                != P.patch.opposite_edges.end());
      const PatchFlux F = solve_patch_flux(d, P);
      double scale = 0.0;
      for (const auto& v : P.volume_moments)
        scale = std::max(scale, v.cwiseAbs().maxCoeff());
      for (const auto& be : P.boundary)
        scale = std::max(scale, be.moments.cwiseAbs().maxCoeff());
      div = std::max(div, divergence_residual(s->mesh, P, F) / scale);
      if (!P.boundary.empty())
        trace = std::max(trace, trace_residual(s->mesh, P, F) / scale);

      if (z % 7 == 0)
      {
        const PatchFlux M = solve_patch_flux(d, P, PatchSolver::monolithic);
        double d_max = 0.0, norm = 0.0;
        for (std::size_t i = 0; i < F.rt.size(); ++i)
        {
          d_max = std::max(d_max, (F.rt[i] - M.rt[i]).cwiseAbs().maxCoeff());
          norm = std::max(norm, M.rt[i].cwiseAbs().maxCoeff());
        }
        if (norm > 0.0)
          diff = std::max(diff, d_max / norm);
      }
    }
    CHECK(compat <= 1e-9);
    CHECK(div <= 1e-9);
    CHECK(trace <= 1e-10);
    CHECK(diff <= 1e-9);
  }
}

TEST_CASE("global flux is equilibrated and H(div) conforming")
{
  for (BenchmarkId id : all_benchmarks())
  {
    const double k = id == BenchmarkId::square_hankel ? 20.0 : 10.0;
    const auto s = solved(id, k, true);
    const Reconstruction r = reconstruct(*s->d, s->sol.u, s->grad);
    const EquilibrationAudit a = audit_equilibration(*s->d, s->sol.u, r);
    INFO(to_string(id));
    CHECK(a.element_identity <= 1e-9 * a.volume_scale);
    CHECK(a.boundary_identity <= 1e-9 * a.boundary_scale);
    CHECK(a.normal_jump <= 1e-9 * a.flux_norm);
  }
}

TEST_CASE("flux assembly does not depend on the patch order")
{
  const auto s = solved(BenchmarkId::lshape_bessel, 10.0, true);
  const Reconstruction r = reconstruct(*s->d, s->sol.u, s->grad);
  std::vector<int> order(s->mesh.num_nodes());
  for (int z = 0; z < s->mesh.num_nodes(); ++z)
    order[z] = z;
  std::mt19937 rng(9);
  std::shuffle(order.begin(), order.end(), rng);
  const std::vector<VectorPolynomial> other = assemble_global_flux(s->mesh, r.fluxes, order);
  double diff = 0.0, norm = 0.0;
  for (int t = 0; t < s->mesh.num_triangles(); ++t)
  {
    diff = std::max(diff, (other[t].x - r.sigma[t].x).cwiseAbs().maxCoeff());
    diff = std::max(diff, (other[t].y - r.sigma[t].y).cwiseAbs().maxCoeff());
    norm = std::max(norm, r.sigma[t].x.cwiseAbs().maxCoeff());
  }
  CHECK(diff <= 1e-12 * norm);
}

TEST_CASE("serial and parallel reconstructions agree")
{
  const auto s = solved(BenchmarkId::reflect_refract, 10.0, true);
  const Reconstruction a = reconstruct(*s->d, s->sol.u, s->grad, {}, Exec::serial);
  const Reconstruction b = reconstruct(*s->d, s->sol.u, s->grad, {}, Exec::parallel);
  for (int t = 0; t < s->mesh.num_triangles(); ++t)
  {
    CHECK(a.sigma[t].x == b.sigma[t].x);
    CHECK(a.sigma[t].y == b.sigma[t].y);
    CHECK(a.potential[t].c == b.potential[t].c);
  }
  CHECK(a.osc_g == b.osc_g);
}

TEST_CASE("singular corner patch gets the elevated degree")
{
  const auto s = solved(BenchmarkId::lshape_bessel, 10.0);
  int corner = -1;
  for (int z = 0; z < s->mesh.num_nodes(); ++z)
    if (s->mesh.node(z).norm() == 0.0)
      corner = z;
  REQUIRE(corner >= 0);
  const PatchFluxProblem P = build_patch_data(*s->d, s->sol.u, s->grad, corner);
  CHECK(P.degree == s->degrees[0] + 1 + 3);
  const PatchFluxProblem Q = build_patch_data(*s->d, s->sol.u, s->grad, corner + 1);
  CHECK(Q.degree == s->degrees[0] + 1);
}

TEST_CASE("oscillations")
{
  SUBCASE("square benchmark has no volume oscillation")
  {
    const auto s = solved(BenchmarkId::square_hankel, 20.0);
    const Reconstruction r = reconstruct(*s->d, s->sol.u, s->grad);
    CHECK(r.osc_f <= 1e-10 * r.osc_g);
  }
  SUBCASE("polynomial source")
  {
    const Mesh m = build_structured_mesh(Rectangle{}, 0.25);
    ProblemData data;
    data.f = [](const Point& x) { return complex(x.x() * x.x(), x.y()); };
    data.g = [](const Point& x, const Point&) { return complex(std::cos(5 * x.x()), 0.0); };
    DGParams prm;
    prm.k = 6.0;
    const Discretization d(m, std::vector<int>(m.num_triangles(), 2), prm, data);
    const DGSolution sol = solve(d);
    const DGGradient g = dg_gradient(d, sol.u);
    const Reconstruction r = reconstruct(d, sol.u, g);
    double fz = 0.0;
    for (int z = 0; z < m.num_nodes(); ++z)
      for (const auto& v : build_patch_data(d, sol.u, g, z).volume_moments)
        fz = std::max(fz, v.norm());
    CHECK(r.osc_f <= 1e-10 * fz);
    CHECK(r.osc_g > 0.0);
  }
}

TEST_CASE("potential reconstruction")
{
  const Mesh m = refine(build_structured_mesh(Rectangle{}, 0.25), std::vector<int>{3, 10},
                        RefinementStrategy::nvb)
                     .mesh;
  const ProblemData data;
  DGParams prm;
  prm.k = 3.0;
  const auto smooth = [](const Point& x) {
    return complex(std::sin(2 * x.x() + 1) * std::exp(x.y()), x.x() * x.y());
  };
  // continuous P1 interpolant
  const auto p1 = [&](int t, const Point& x) {
    const Point xi = to_reference(m, t, x);
    complex s = 0.0;
    for (int i = 0; i < 3; ++i)
      s += smooth(m.node(m.triangle(t)[i])) * barycentric(i, xi);
    return s;
  };

  SUBCASE("continuous fields are reproduced")
  {
    std::vector<int> deg(m.num_triangles());
    for (int t = 0; t < m.num_triangles(); ++t)
      deg[t] = 1 + t % 3;
    const Discretization d(m, deg, prm, data);
    const Eigen::VectorXcd u = project_field(d, p1);
    const DGGradient g = dg_gradient(d, u);
    const Reconstruction r = reconstruct(d, u, g);
    const PotentialAudit a = audit_potential(d, u, g, r);
    CHECK(a.broken_nonconformity <= 1e-9);
    CHECK(a.mean <= 1e-10 * a.norm);
    CHECK(a.optimality <= 1e-10);

    // s^z = psi_z u at an interior node
    int z = 0;
    while (m.node_on_boundary(z))
      ++z;
    const PatchPotential S = solve_patch_potential(d, u, z);
    CHECK(S.optimality_residual <= 1e-10);
    for (std::size_t i = 0; i < S.triangles.size(); ++i)
    {
      const int t = S.triangles[i];
      const auto& tri = m.triangle(t);
      const int iz = tri[0] == z ? 0 : (tri[1] == z ? 1 : 2);
      for (const Point& xi : {Point(0.2, 0.2), Point(0.6, 0.1), Point(0.1, 0.5)})
        CHECK(std::abs(evaluate(m, t, S.pieces[i], xi)
                       - barycentric(iz, xi) * field_value(d, u, t, xi))
              <= 1e-11);
    }
  }
  SUBCASE("global polynomial")
  {
    const Discretization d(m, std::vector<int>(m.num_triangles(), 3), prm, data);
    const Eigen::VectorXcd u = project_field(d, [](int, const Point& x) {
      return complex(x.x() * x.x() * x.y() - 0.5 * x.y() * x.y() * x.y(), x.x() - x.y());
    });
    const DGGradient g = dg_gradient(d, u);
    const Reconstruction r = reconstruct(d, u, g);
    const PotentialAudit a = audit_potential(d, u, g, r);
    CHECK(a.nonconformity <= 1e-9);
    CHECK(a.broken_nonconformity <= 1e-9);
    CHECK(a.mean <= 1e-10 * a.norm);
  }
  SUBCASE("random discontinuous fields satisfy the optimality condition")
  {
    std::vector<int> deg(m.num_triangles());
    for (int t = 0; t < m.num_triangles(); ++t)
      deg[t] = 1 + t % 4;
    const Discretization d(m, deg, prm, data);
    std::mt19937 rng(21);
    std::normal_distribution<double> nd;
    Eigen::VectorXcd u(d.num_dofs());
    for (auto& v : u)
      v = complex(nd(rng), nd(rng));
    double worst = 0.0;
    for (int z = 0; z < m.num_nodes(); ++z)
      worst = std::max(worst, solve_patch_potential(d, u, z).optimality_residual);
    CHECK(worst <= 1e-10);
    const DGGradient g = dg_gradient(d, u);
    const Reconstruction r = reconstruct(d, u, g);
    const PotentialAudit a = audit_potential(d, u, g, r);
    CHECK(a.mean <= 1e-10 * a.norm);
    // continuity of s across interior edges
    double jump = 0.0;
    for (int e = 0; e < m.num_edges(); ++e)
    {
      const Edge& edge = m.edge(e);
      if (edge.on_boundary())
        continue;
      const Point A = m.node(edge.nodes[0]), B = m.node(edge.nodes[1]);
      for (double t : {0.0, 0.3, 0.8, 1.0})
      {
        const Point x = A + t * (B - A);
        const int a0 = edge.triangles[0], a1 = edge.triangles[1];
        jump = std::max(jump, std::abs(evaluate(m, a0, r.potential[a0], to_reference(m, a0, x))
                                       - evaluate(m, a1, r.potential[a1], to_reference(m, a1, x))));
      }
    }
    CHECK(jump <= 1e-10 * a.norm);
  }
}
