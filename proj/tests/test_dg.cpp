#include "hpdg/audit.hpp"
#include "hpdg/benchmarks.hpp"
#include "hpdg/dg.hpp"
#include "hpdg/projection.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hpdg;

namespace
{

const complex I(0.0, 1.0);

Eigen::VectorXcd random_field(int n, unsigned seed)
{
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXcd v(n);
  for (auto& x : v)
    x = complex(nd(rng), nd(rng));
  return v;
}

Eigen::MatrixXcd dense(const SparseComplex& A)
{
  return Eigen::MatrixXcd(A);
}

// two triangles sharing the edge (1,0)-(0,1)
Mesh two_triangles()
{
  return Mesh({Point(0, 0), Point(1, 0), Point(0, 1), Point(1.1, 0.9)}, {{0, 1, 2}, {1, 3, 2}});
}

int interior_edge(const Mesh& m)
{
  for (int e = 0; e < m.num_edges(); ++e)
    if (!m.edge(e).on_boundary())
      return e;
  return -1;
}

} // namespace

TEST_CASE("zero data gives the zero solution")
{
  const Mesh m = build_structured_mesh(Rectangle{}, 0.25);
  const ProblemData data;
  DGParams prm;
  prm.k = 7.0;
  const Discretization d(m, std::vector<int>(m.num_triangles(), 3), prm, data);
  const LinearSystem sys = assemble(d);
  CHECK(sys.b.norm() == 0.0);
  const DGSolution sol = solve(d);
  CHECK(sol.u.norm() == 0.0);
  const DGGradient g = dg_gradient(d, sol.u);
  for (int z = 0; z < m.num_nodes(); ++z)
    CHECK(std::abs(hat_orthogonality_residual(d, sol.u, g, z).residual) == 0.0);
}

TEST_CASE("parameter and degree validation")
{
  const Mesh m = build_structured_mesh(Rectangle{}, 0.5);
  const ProblemData data;
  DGParams prm;
  prm.gamma = 0.4;
  CHECK_THROWS_AS(Discretization(m, std::vector<int>(m.num_triangles(), 2), prm, data),
                  std::invalid_argument);
  CHECK_THROWS_AS(Discretization(m, std::vector<int>(m.num_triangles(), 0), DGParams{}, data),
                  std::invalid_argument);
  CHECK_THROWS_AS(Mesh({Point(0, 0), Point(1, 0), Point(2, 0)}, {{0, 1, 2}}),
                  std::invalid_argument);
}

TEST_CASE("non-stabilized part of the form is symmetric")
{
  const Mesh m = two_triangles();
  const BenchmarkCase bc = make_benchmark(BenchmarkId::square_hankel, 5.0);
  const std::vector<int> deg{2, 3};
  auto matrix = [&](double alpha, double beta) {
    DGParams prm;
    prm.k = 5.0;
    prm.alpha = alpha;
    prm.beta = beta;
    const Discretization d(m, deg, prm, bc.data);
    return dense(assemble(d, Exec::serial).A);
  };
  // the stabilization sums are linear in alpha and beta
  const Eigen::MatrixXcd a11 = matrix(1.0, 1.0);
  const Eigen::MatrixXcd a_alpha = matrix(2.0, 1.0) - a11;
  const Eigen::MatrixXcd a_beta = matrix(1.0, 2.0) - a11;
  const Eigen::MatrixXcd a0 = a11 - a_alpha - a_beta;
  CHECK((a0 - a0.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  // not Hermitian: the boundary mass term is imaginary
  CHECK((a0 - a0.adjoint()).cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("affine fields are reproduced")
{
  const double k = 3.0;
  const Vector2c c(complex(1.0, 0.5), complex(-2.0, 0.25));
  const complex c0(0.3, -0.7);
  auto u = [&](const Point& x) { return c0 + c(0) * x.x() + c(1) * x.y(); };
  ProblemData data;
  data.f = [&](const Point& x) { return -k * k * u(x); };
  data.g = [&](const Point& x, const Point& n) {
    return c(0) * n.x() + c(1) * n.y() - I * k * u(x);
  };
  const Mesh m = refine(build_structured_mesh(LShape{}, 0.5), std::vector<int>{0, 3, 7},
                        RefinementStrategy::nvb)
                     .mesh;
  std::vector<int> deg(m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t)
    deg[t] = 1 + t % 3;
  DGParams prm;
  prm.k = k;
  const Discretization d(m, deg, prm, data);
  const Eigen::VectorXcd ui = project_field(d, [&](int, const Point& x) { return u(x); });
  const LinearSystem sys = assemble(d);
  CHECK((sys.A * ui - sys.b).norm() <= 1e-10 * sys.b.norm());

  const DGGradient g = dg_gradient(d, ui);
  for (int t = 0; t < m.num_triangles(); ++t)
    CHECK((g.evaluate(d, ui, t, Point(0.2, 0.3)) - c).norm() <= 1e-10);
}

TEST_CASE("solver residual and Galerkin consistency")
{
  const BenchmarkCase bc = make_benchmark(BenchmarkId::square_hankel, 20.0);
  const Mesh m = build_structured_mesh(bc.domain, 1.0 / 8);
  DGParams prm;
  prm.k = 20.0;
  const Discretization d(m, std::vector<int>(m.num_triangles(), 2), prm, bc.data);
  const DGSolution sol = solve(d);
  CHECK(sol.relative_residual <= 1e-10);
  const LinearSystem sys = assemble(d);
  const Eigen::VectorXcd r = sys.A * sol.u - sys.b;
  CHECK(r.norm() <= 1e-10 * sys.b.norm());
  for (unsigned s = 0; s < 10; ++s)
  {
    const Eigen::VectorXcd v = random_field(d.num_dofs(), s);
    CHECK(std::abs(v.dot(r)) <= 1e-9 * v.norm() * sys.b.norm());
  }
}

TEST_CASE("serial and parallel paths agree")
{
  const BenchmarkCase bc = make_benchmark(BenchmarkId::reflect_refract, 10.0);
  const Mesh m = build_structured_mesh(bc.domain, 0.25);
  std::vector<int> deg(m.num_triangles());
  for (int t = 0; t < m.num_triangles(); ++t)
    deg[t] = 2 + t % 3;
  DGParams prm;
  prm.k = 10.0;
  const Discretization d(m, deg, prm, bc.data);
  const LinearSystem a = assemble(d, Exec::serial);
  const LinearSystem b = assemble(d, Exec::parallel);
  CHECK((dense(a.A) - dense(b.A)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.b - b.b).cwiseAbs().maxCoeff() == 0.0);
  const DGSolution s = solve(d, Exec::serial);
  const DGSolution p = solve(d, Exec::parallel);
  CHECK((s.u - p.u).norm() == 0.0);
  const DGGradient gs = dg_gradient(d, s.u, Exec::serial);
  const DGGradient gp = dg_gradient(d, s.u, Exec::parallel);
  for (int t = 0; t < m.num_triangles(); ++t)
    CHECK(gs.correction[t] == gp.correction[t]);
}

TEST_CASE("liftings")
{
  const Mesh m = two_triangles();
  const ProblemData data;
  DGParams prm;
  prm.k = 2.0;
  prm.beta = 1.7;
  const std::vector<int> deg{2, 3};
  const Discretization d(m, deg, prm, data);
  const int e = interior_edge(m);
  REQUIRE(e >= 0);
  const Edge& edge = m.edge(e);
  const int tp = edge.triangles[0], tm = edge.triangles[1];
  const Point np = m.outward_normal(tp, edge.local[0]);
  const double len = m.edge_length(e);
  const double ap = m.geometry(tp).area, am = m.geometry(tm).area;

  SUBCASE("continuous and C1 fields have no lifting")
  {
    const auto quad = [](int, const Point& x) {
      return complex(x.x() * x.x() - 2 * x.y(), x.x() * x.y());
    };
    const Eigen::VectorXcd u = project_field(d, quad);
    const EdgeLifting l0 = lift_L0(d, u, e);
    const EdgeLifting l1 = lift_L1(d, u, e);
    CHECK(l0.plus.norm() + l0.minus.norm() <= 1e-12);
    CHECK(l1.plus.norm() + l1.minus.norm() <= 1e-12);
  }
  SUBCASE("constant jump")
  {
    const complex c(0.8, -0.3);
    const Eigen::VectorXcd u =
        project_field(d, [&](int t, const Point&) { return t == tp ? c : complex(0.0); });
    const EdgeLifting l0 = lift_L0(d, u, e);
    CHECK((l0.plus - len * c * np.cast<complex>() / (2 * ap)).norm() <= 1e-12);
    CHECK((l0.minus - len * c * np.cast<complex>() / (2 * am)).norm() <= 1e-12);
  }
  SUBCASE("moment equations for random fields")
  {
    const Eigen::VectorXcd u = random_field(d.num_dofs(), 11);
    // int_E [u] n+ ds and int_E [d_n u] ds by direct evaluation
    const Point A = m.node(edge.nodes[0]), B = m.node(edge.nodes[1]);
    const LineRule& r = line_rule(12);
    complex ju = 0.0, jd = 0.0;
    for (std::size_t q = 0; q < r.size(); ++q)
    {
      const Point x = A + r.points[q] * (B - A);
      const Point xp = to_reference(m, tp, x), xm = to_reference(m, tm, x);
      ju += r.weights[q] * len * (field_value(d, u, tp, xp) - field_value(d, u, tm, xm));
      jd += r.weights[q] * len
            * np.cast<complex>().dot(field_gradient(d, u, tp, xp) - field_gradient(d, u, tm, xm));
    }
    const EdgeLifting l0 = lift_L0(d, u, e);
    const EdgeLifting l1 = lift_L1(d, u, e);
    // tests: constant unit vectors on one side at a time
    for (int side = 0; side < 2; ++side)
      for (int comp = 0; comp < 2; ++comp)
      {
        const double area = side == 0 ? ap : am;
        const Vector2c& v0 = side == 0 ? l0.plus : l0.minus;
        const Vector2c& v1 = side == 0 ? l1.plus : l1.minus;
        // int_E [u] . {tau}: tau = e_comp on one side
        const complex rhs0 = 0.5 * ju * np(comp);
        // i beta h/p int_E [d_n u] [tau]: [tau] = +-tau.n+
        const double sgn = side == 0 ? 1.0 : -1.0;
        const complex rhs1 = I * (prm.beta * d.edge_h(e) / d.edge_p(e)) * jd * sgn * np(comp);
        CHECK(std::abs(area * v0(comp) - rhs0) <= 1e-12 * (1.0 + std::abs(rhs0)));
        CHECK(std::abs(area * v1(comp) - rhs1) <= 1e-12 * (1.0 + std::abs(rhs1)));
      }

    // the DG gradient collects the same liftings
    const DGGradient g = dg_gradient(d, u);
    CHECK((g.correction[tp] - l0.plus - l1.plus).norm() <= 1e-12 * (1 + g.correction[tp].norm()));
    CHECK((g.correction[tm] - l0.minus - l1.minus).norm()
          <= 1e-12 * (1 + g.correction[tm].norm()));
  }
  SUBCASE("boundary edges are rejected")
  {
    const Eigen::VectorXcd u = random_field(d.num_dofs(), 2);
    CHECK_THROWS_AS(lift_L0(d, u, m.boundary_edges()[0]), std::invalid_argument);
    CHECK_THROWS_AS(lift_L1(d, u, m.boundary_edges()[0]), std::invalid_argument);
  }
}

TEST_CASE("continuous piecewise quadratics only carry the L1 lifting")
{
  const Mesh m = build_structured_mesh(Rectangle{}, 0.25);
  const ProblemData data;
  DGParams prm;
  prm.k = 1.0;
  const Discretization d(m, std::vector<int>(m.num_triangles(), 2), prm, data);
  // quadratic interpolant through vertex and midpoint values of a smooth function
  const auto smooth = [](const Point& x) { return complex(std::sin(3 * x.x()) * std::exp(x.y())); };
  const Eigen::VectorXcd u = project_field(d, [&](int t, const Point& x) {
    const Point xi = to_reference(m, t, x);
    const double l[3] = {barycentric(0, xi), barycentric(1, xi), barycentric(2, xi)};
    const auto& v = m.triangle(t);
    complex s = 0.0;
    for (int i = 0; i < 3; ++i)
    {
      s += smooth(m.node(v[i])) * (l[i] * (2 * l[i] - 1));
      const int a = (i + 1) % 3, b = (i + 2) % 3;
      s += smooth(0.5 * (m.node(v[a]) + m.node(v[b]))) * (4.0 * l[a] * l[b]);
    }
    return s;
  });
  double l1 = 0.0;
  for (int e = 0; e < m.num_edges(); ++e)
  {
    if (m.edge(e).on_boundary())
      continue;
    const EdgeLifting a = lift_L0(d, u, e);
    CHECK(a.plus.norm() + a.minus.norm() <= 1e-12);
    const EdgeLifting b = lift_L1(d, u, e);
    l1 = std::max(l1, b.plus.norm());
  }
  CHECK(l1 > 1e-4);
}

TEST_CASE("hat functions form a partition of unity")
{
  Point s = Point::Zero();
  for (int i = 0; i < 3; ++i)
    s += barycentric_gradient(i);
  CHECK(s.norm() == 0.0);
  for (const Point& xi : {Point(0.1, 0.2), Point(0.5, 0.5), Point(0.0, 0.7)})
    CHECK(barycentric(0, xi) + barycentric(1, xi) + barycentric(2, xi)
          == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("hat-function orthogonality")
{
  for (BenchmarkId id : {BenchmarkId::square_hankel, BenchmarkId::lshape_bessel,
                         BenchmarkId::reflect_refract})
  {
    const double k = id == BenchmarkId::square_hankel ? 20.0 : 10.0;
    const BenchmarkCase bc = make_benchmark(id, k);
    const InitialDiscretization init = initial_discretization(bc, bc.c_res);
    DGParams prm;
    prm.k = k;
    const Discretization d(init.mesh, init.degrees, prm, bc.data);
    const DGSolution sol = solve(d);
    const DGGradient g = dg_gradient(d, sol.u);
    double worst = 0.0, alt = 0.0;
    for (int z = 0; z < init.mesh.num_nodes(); ++z)
    {
      const OrthogonalityResidual r = hat_orthogonality_residual(d, sol.u, g, z);
      worst = std::max(worst, std::abs(r.residual) / r.scale);
      const OrthogonalityResidual a =
          hat_orthogonality_residual(d, sol.u, g, z, ImpedanceSign::minus_iku);
      alt = std::max(alt, std::abs(a.residual) / a.scale);
    }
    INFO(to_string(id));
    CHECK(worst <= 1e-9);
    CHECK(alt >= 1e6 * worst);

    // a perturbed field is not a solution
    Eigen::VectorXcd v = sol.u + 0.5 * random_field(d.num_dofs(), 4) * (sol.u.norm() / std::sqrt(d.num_dofs()));
    const DGGradient gv = dg_gradient(d, v);
    double pert = 0.0;
    for (int z = 0; z < init.mesh.num_nodes(); ++z)
    {
      const OrthogonalityResidual r = hat_orthogonality_residual(d, v, gv, z);
      pert = std::max(pert, std::abs(r.residual) / r.scale);
    }
    CHECK(pert > 1e-3);
  }
}
