#include "hpdg/benchmarks.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

using namespace hpdg;

namespace
{

const double pi = 3.14159265358979323846;
const complex I(0.0, 1.0);

// fourth-order central differences, independent of the coded gradient
Vector2c fd_gradient(const ExactSolution& ex, const Point& x, double h)
{
  Vector2c g;
  for (int d = 0; d < 2; ++d)
  {
    Point e(0, 0);
    e(d) = h;
    g(d) = (-ex.value(x + 2 * e) + 8.0 * ex.value(x + e) - 8.0 * ex.value(x - e)
            + ex.value(x - 2 * e))
           / (12.0 * h);
  }
  return g;
}

complex fd_laplacian(const ExactSolution& ex, const Point& x, double h)
{
  complex lap = 0.0;
  for (int d = 0; d < 2; ++d)
  {
    Point e(0, 0);
    e(d) = h;
    lap += (-ex.value(x + 2 * e) + 16.0 * ex.value(x + e) - 30.0 * ex.value(x)
            + 16.0 * ex.value(x - e) - ex.value(x - 2 * e))
           / (12.0 * h * h);
  }
  return lap;
}

struct BoundarySample
{
  Point x, n;
};

std::vector<BoundarySample> boundary_samples(const Mesh& m, int count, std::mt19937& rng)
{
  std::vector<int> edges;
  for (int e = 0; e < m.num_edges(); ++e)
    if (m.edge(e).on_boundary())
      edges.push_back(e);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  std::vector<BoundarySample> out;
  for (int i = 0; i < count; ++i)
  {
    const Edge& e = m.edge(edges[rng() % edges.size()]);
    const Point a = m.node(e.nodes[0]), b = m.node(e.nodes[1]);
    out.push_back({a + u(rng) * (b - a), m.outward_normal(e.triangles[0], e.local[0])});
  }
  return out;
}

} // namespace

TEST_CASE("impedance data matches the exact solutions")
{
  const double k = 5.0;
  std::mt19937 rng(3);
  for (BenchmarkId id :
       {BenchmarkId::square_hankel, BenchmarkId::lshape_bessel, BenchmarkId::reflect_refract})
  {
    CAPTURE(to_string(id));
    const BenchmarkCase bc = make_benchmark(id, k);
    REQUIRE(bc.exact);
    const Mesh m = build_structured_mesh(bc.domain, 0.25);
    for (const BoundarySample& s : boundary_samples(m, 100, rng))
    {
      // stay off the interface where the one-sided formulas switch
      if (id == BenchmarkId::reflect_refract && std::abs(s.x.y()) < 0.01)
        continue;
      // and keep the stencil out of the missing quadrant
      if (id == BenchmarkId::lshape_bessel && s.x.x() > -0.01 && s.x.y() < 0.01)
        continue;
      const double eps = bc.data.epsilon ? bc.data.epsilon(s.x) : 1.0;
      const Vector2c grad = fd_gradient(*bc.exact, s.x, 1e-3);
      const complex expected =
          grad(0) * s.n.x() + grad(1) * s.n.y() - I * k * std::sqrt(eps) * bc.exact->value(s.x);
      const complex g = bc.data.g(s.x, s.n);
      CHECK(std::abs(g - expected) <= 1e-8 * (1.0 + std::abs(g)));
      const Vector2c coded = bc.exact->gradient(s.x);
      CHECK((coded - grad).norm() <= 1e-8 * (1.0 + coded.norm()));
    }
  }
}

TEST_CASE("exact solutions satisfy the Helmholtz equation")
{
  const double k = 5.0;
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(-0.95, 0.95);
  for (BenchmarkId id :
       {BenchmarkId::square_hankel, BenchmarkId::lshape_bessel, BenchmarkId::reflect_refract})
  {
    CAPTURE(to_string(id));
    const BenchmarkCase bc = make_benchmark(id, k);
    for (int i = 0; i < 100; ++i)
    {
      Point x(u(rng), u(rng));
      if (id == BenchmarkId::square_hankel)
        x = 0.5 * (x + Point(1, 1));
      if (id == BenchmarkId::lshape_bessel && (x.norm() < 0.1 || (x.x() > -0.03 && x.y() < 0.03)))
        continue;
      if (id == BenchmarkId::reflect_refract && std::abs(x.y()) < 0.05)
        continue;
      const double eps = bc.data.epsilon ? bc.data.epsilon(x) : 1.0;
      const complex lap = fd_laplacian(*bc.exact, x, 1e-2);
      const complex v = bc.exact->value(x);
      CHECK(std::abs(lap + k * k * eps * v) <= 1e-6 * k * k * eps * (1.0 + std::abs(v)));
    }
  }
}

TEST_CASE("L-shape solution vanishes on the re-entrant edges")
{
  const BenchmarkCase bc = make_benchmark(BenchmarkId::lshape_bessel, 20.0);
  for (double s : {0.1, 0.37, 0.8})
  {
    CHECK(std::abs(bc.exact->value(Point(s, 0.0))) <= 1e-12);
    CHECK(std::abs(bc.exact->value(Point(0.0, -s))) <= 1e-12);
    // rounding just below the positive axis
    CHECK(std::abs(bc.exact->value(Point(s, -1e-17))) <= 1e-12);
  }
}

TEST_CASE("reflection and refraction")
{
  const double k = 10.0;
  // critical angle from cos(theta*) = n2 / n1
  const double critical = std::acos(0.5);
  CHECK(critical * 180.0 / pi == doctest::Approx(60.0));

  const ReflectionSolution tir = reflection_solution(29.0 * pi / 180.0, 2.0, 1.0, k);
  CHECK(std::abs(tir.R) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(tir.K3.real() == 0.0);
  CHECK(tir.K3.imag() > 0.0);

  const ReflectionSolution part = reflection_solution(69.0 * pi / 180.0, 2.0, 1.0, k);
  CHECK(part.R.imag() == 0.0);
  CHECK(std::abs(part.R) < 1.0);
  CHECK(part.K3.imag() == 0.0);

  // u and du/dy continuous across y = 0
  for (const ReflectionSolution* r : {&tir, &part})
    for (double x : {-0.7, 0.0, 0.45})
    {
      const Point above(x, 0.0), below(x, -1e-300);
      CHECK(std::abs(r->exact.value(above) - r->exact.value(below)) <= 1e-12);
      const Vector2c ga = r->exact.gradient(above), gb = r->exact.gradient(below);
      CHECK(std::abs(ga(1) - gb(1)) <= 1e-12 * k);
    }

  const BenchmarkCase bc = make_benchmark(BenchmarkId::reflect_refract, k);
  const InitialDiscretization init = initial_discretization(bc, bc.c_res);
  // no triangle straddles the interface
  for (int t = 0; t < init.mesh.num_triangles(); ++t)
  {
    const std::array<int, 3>& tri = init.mesh.triangle(t);
    double lo = 1.0, hi = -1.0;
    for (int v : tri)
    {
      lo = std::min(lo, init.mesh.node(v).y());
      hi = std::max(hi, init.mesh.node(v).y());
    }
    CHECK((lo >= 0.0 || hi <= 0.0));
  }

  CaseParameters bad;
  bad.theta_deg = 90.0;
  CHECK_THROWS_AS(make_benchmark(BenchmarkId::reflect_refract, k, bad), std::invalid_argument);
}

TEST_CASE("Gaussian beam")
{
  const double k = 20.0;
  const double w0 = 8.0 * pi / k;
  const GaussianBeam beam(k, 40.0 * pi / 180.0, w0, Point(2.0, 2.0));
  CHECK(beam.wavelength() == doctest::Approx(2.0 * pi / k));
  CHECK(beam.rayleigh_range() == doctest::Approx(pi * w0 * w0 / beam.wavelength()));
  CHECK(beam.radius(0.0) == doctest::Approx(w0).epsilon(1e-14));
  CHECK(beam.radius(beam.rayleigh_range()) == doctest::Approx(std::sqrt(2.0) * w0));
  CHECK(std::isinf(beam.curvature_radius(0.0)));
  CHECK(beam.gouy_phase(0.0) == 0.0);
  CHECK(beam.gouy_phase(beam.rayleigh_range()) == doctest::Approx(pi / 4.0));
  // far field: spherical front centred on the waist
  const double z = 100.0 * pi * w0 * w0 / beam.wavelength();
  CHECK(std::abs(beam.curvature_radius(z) - z) <= 0.01 * z);

  // on the axis |v| follows w0 / w(z)
  const Point dir(std::cos(40.0 * pi / 180.0), std::sin(40.0 * pi / 180.0));
  for (double s : {0.0, 0.5, 1.5})
    CHECK(std::abs(beam.value(Point(2.0, 2.0) + s * dir))
          == doctest::Approx(w0 / beam.radius(s)).epsilon(1e-12));

  const BenchmarkCase bc = make_benchmark(BenchmarkId::gauss_beam, k);
  CHECK(!bc.data.f);
  CHECK(!bc.exact);
  const Point x(4.0, 1.3), n(1.0, 0.0);
  CHECK(bc.data.g(x, n) == beam.impedance_data(x, n));
  const Vector2c g = beam.gradient(x);
  CHECK(std::abs(beam.impedance_data(x, n) - (g(0) - I * k * beam.value(x))) <= 1e-14);
}

TEST_CASE("initial discretization")
{
  CHECK(initial_degree(20.0) == 3);
  CHECK(initial_degree(50.0) == 4);
  CHECK(initial_degree(1.0) == 1);
  CHECK(initial_degree(std::exp(2.0)) == 2);
  CHECK(initial_mesh_size(20.0, 3, 2.0) == doctest::Approx(0.3));
  CHECK_THROWS_AS(initial_degree(0.0), std::invalid_argument);
  CHECK_THROWS_AS(initial_mesh_size(20.0, 0, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(make_benchmark(BenchmarkId::square_hankel, -1.0), std::invalid_argument);

  for (BenchmarkId id : all_benchmarks())
  {
    CAPTURE(to_string(id));
    CHECK(parse_benchmark(to_string(id)) == id);
    const BenchmarkCase bc = make_benchmark(id, 20.0);
    const InitialDiscretization init = initial_discretization(bc, bc.c_res);
    const double h = initial_mesh_size(20.0, 3, bc.c_res);
    for (int t = 0; t < init.mesh.num_triangles(); ++t)
    {
      CHECK(init.mesh.geometry(t).diameter <= h * (1.0 + 1e-12));
      CHECK(init.degrees[t] == 3);
    }
    const InitialDiscretization under = initial_discretization(bc, bc.c_res, true);
    for (int t = 0; t < under.mesh.num_triangles(); ++t)
    {
      CHECK(under.degrees[t] == 1);
      CHECK(under.mesh.geometry(t).diameter == doctest::Approx(0.25 * std::sqrt(2.0)));
    }
  }
  CHECK(!parse_benchmark("nope"));
}
