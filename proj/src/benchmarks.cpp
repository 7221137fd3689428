#include "hpdg/benchmarks.hpp"

#include "hpdg/special_functions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace hpdg
{

namespace
{

constexpr double pi = std::numbers::pi;
const complex I(0.0, 1.0);

ExactSolution hankel_solution(double k)
{
  const Point c(-0.25, 0.0);
  ExactSolution s;
  s.value = [k, c](const Point& x) { return hankel1(0, k * (x - c).norm()); };
  s.gradient = [k, c](const Point& x) {
    const Point d = x - c;
    const double r = d.norm();
    const complex dr = -k * hankel1(1, k * r);
    return Vector2c(dr * d.x() / r, dr * d.y() / r);
  };
  return s;
}

/// angle in [0, 3 pi / 2], the opening of the L-shape. Boundary points
/// that rounding pushes into the removed quadrant (x > 0, y < 0) are
/// folded back onto the nearer boundary ray; without this a quadrature
/// point at y = -1e-17 on the ray phi = 0 would be evaluated at phi = 2 pi.
double polar_angle(const Point& x)
{
  double phi = std::atan2(x.y(), x.x());
  if (phi < 0.0)
    phi += 2.0 * pi;
  if (phi > 1.5 * pi)
    phi = phi > 1.75 * pi ? 0.0 : 1.5 * pi;
  return phi;
}

ExactSolution bessel_solution(double k)
{
  constexpr double nu = 2.0 / 3.0;
  ExactSolution s;
  s.value = [k](const Point& x) {
    const double r = x.norm();
    return complex(bessel_j(nu, k * r) * std::sin(nu * polar_angle(x)));
  };
  s.gradient = [k](const Point& x) {
    const double r = x.norm();
    if (r == 0.0)
      return Vector2c(Vector2c::Zero());
    const double phi = polar_angle(x);
    const double kr = k * r;
    const double j = bessel_j(nu, kr);
    const double dj = bessel_j(nu - 1.0, kr) - nu / kr * j;
    const double ur = k * dj * std::sin(nu * phi);
    const double uphi = j * nu * std::cos(nu * phi) / r;
    const double c = x.x() / r, sn = x.y() / r;
    return Vector2c(complex(ur * c - uphi * sn), complex(ur * sn + uphi * c));
  };
  return s;
}

std::function<complex(const Point&, const Point&)>
impedance_from(const ExactSolution& s, double k, std::function<double(const Point&)> eps)
{
  return [s, k, eps](const Point& x, const Point& n) {
    const Vector2c g = s.gradient(x);
    const double ke = eps ? k * std::sqrt(eps(x)) : k;
    return g(0) * n.x() + g(1) * n.y() - I * ke * s.value(x);
  };
}

} // namespace

std::string to_string(BenchmarkId id)
{
  switch (id)
  {
  case BenchmarkId::square_hankel:
    return "square_hankel";
  case BenchmarkId::lshape_bessel:
    return "lshape_bessel";
  case BenchmarkId::reflect_refract:
    return "reflect_refract";
  case BenchmarkId::gauss_beam:
    return "gauss_beam";
  }
  return "unknown";
}

std::optional<BenchmarkId> parse_benchmark(std::string_view name)
{
  for (BenchmarkId id : all_benchmarks())
    if (to_string(id) == name)
      return id;
  return std::nullopt;
}

const std::vector<BenchmarkId>& all_benchmarks()
{
  static const std::vector<BenchmarkId> ids{BenchmarkId::square_hankel,
                                            BenchmarkId::lshape_bessel,
                                            BenchmarkId::reflect_refract,
                                            BenchmarkId::gauss_beam};
  return ids;
}

ReflectionSolution reflection_solution(double theta, double n1, double n2, double k)
{
  ReflectionSolution r;
  r.K1 = k * n1 * std::cos(theta);
  r.K2 = k * n1 * std::sin(theta);
  const double disc = n2 * n2 - n1 * n1 * std::cos(theta) * std::cos(theta);
  r.K3 = disc >= 0.0 ? complex(k * std::sqrt(disc)) : complex(0.0, k * std::sqrt(-disc));
  r.R = -(r.K3 - r.K2) / (r.K3 + r.K2);

  const double K1 = r.K1, K2 = r.K2;
  const complex K3 = r.K3, R = r.R;
  r.exact.value = [=](const Point& x) {
    if (x.y() >= 0.0)
      return (1.0 + R) * std::exp(I * (K1 * x.x() + K3 * x.y()));
    return std::exp(I * (K1 * x.x() + K2 * x.y())) + R * std::exp(I * (K1 * x.x() - K2 * x.y()));
  };
  r.exact.gradient = [=](const Point& x) {
    if (x.y() >= 0.0)
    {
      const complex u = (1.0 + R) * std::exp(I * (K1 * x.x() + K3 * x.y()));
      return Vector2c(I * K1 * u, I * K3 * u);
    }
    const complex a = std::exp(I * (K1 * x.x() + K2 * x.y()));
    const complex b = R * std::exp(I * (K1 * x.x() - K2 * x.y()));
    return Vector2c(I * K1 * (a + b), I * K2 * (a - b));
  };
  return r;
}

GaussianBeam::GaussianBeam(double k, double angle, double w0, Point origin)
    : k_(k), w0_(w0), lambda_(2.0 * pi / k), origin_(std::move(origin)),
      direction_(std::cos(angle), std::sin(angle))
{
  if (!(k > 0.0 && w0 > 0.0))
    throw std::invalid_argument("Gaussian beam needs k > 0 and w0 > 0");
  zr_ = pi * w0 * w0 / lambda_;
}

double GaussianBeam::radius(double z) const
{
  return w0_ * std::sqrt(1.0 + (z / zr_) * (z / zr_));
}

double GaussianBeam::curvature_radius(double z) const
{
  if (z == 0.0)
    return std::numeric_limits<double>::infinity();
  return z + zr_ * zr_ / z;
}

double GaussianBeam::gouy_phase(double z) const
{
  return std::atan(z / zr_);
}

complex GaussianBeam::value(const Point& x) const
{
  const Point s = x - origin_;
  const double z = s.dot(direction_);
  const double r2 = std::max(0.0, s.squaredNorm() - z * z);
  const double w = radius(z);
  // 1/R written so that it stays finite at the waist
  const double inv_r = z / (z * z + zr_ * zr_);
  return (w0_ / w)
         * std::exp(-r2 / (w * w) - I * k_ * z - I * (pi / lambda_) * r2 * inv_r
                    + I * gouy_phase(z));
}

Vector2c GaussianBeam::gradient(const Point& x) const
{
  const Point s = x - origin_;
  const double z = s.dot(direction_);
  const double r2 = std::max(0.0, s.squaredNorm() - z * z);
  const double w = radius(z);
  const double q = z * z + zr_ * zr_;
  const double inv_r = z / q;
  const double dinv_r = (zr_ * zr_ - z * z) / (q * q);
  const double dw = w0_ * w0_ * z / (zr_ * zr_ * w);
  const double dgouy = zr_ / q;
  const complex v = value(x);
  // derivative of log v with respect to z and to r^2
  const complex dz = -dw / w + 2.0 * r2 * dw / (w * w * w) - I * k_
                     - I * (pi / lambda_) * r2 * dinv_r + I * dgouy;
  const complex dr2 = -1.0 / (w * w) - I * (pi / lambda_) * inv_r;
  const Point gr2 = 2.0 * (s - z * direction_);
  return Vector2c(v * (dz * direction_.x() + dr2 * gr2.x()),
                  v * (dz * direction_.y() + dr2 * gr2.y()));
}

complex GaussianBeam::impedance_data(const Point& x, const Point& n) const
{
  const Vector2c g = gradient(x);
  return g(0) * n.x() + g(1) * n.y() - I * k_ * value(x);
}

BenchmarkCase make_benchmark(BenchmarkId id, double k, const CaseParameters& params)
{
  if (!(k > 0.0))
    throw std::invalid_argument("wavenumber must be positive");
  BenchmarkCase bc;
  bc.id = id;
  bc.k = k;
  switch (id)
  {
  case BenchmarkId::square_hankel:
  {
    bc.domain = Rectangle{0.0, 0.0, 1.0, 1.0};
    bc.c_res = 2.0;
    bc.exact = hankel_solution(k);
    bc.data.g = impedance_from(*bc.exact, k, {});
    break;
  }
  case BenchmarkId::lshape_bessel:
  {
    bc.domain = LShape{};
    bc.c_res = 2.0;
    bc.exact = bessel_solution(k);
    bc.data.g = impedance_from(*bc.exact, k, {});
    bc.data.singular_points = {Point(0.0, 0.0)};
    break;
  }
  case BenchmarkId::reflect_refract:
  {
    const double theta = params.theta_deg * pi / 180.0;
    if (!(theta >= 0.0 && theta < pi / 2.0))
      throw std::invalid_argument("reflection angle must lie in [0, 90) degrees");
    bc.domain = Rectangle{-1.0, -1.0, 1.0, 1.0};
    bc.c_res = 0.5;
    bc.exact = reflection_solution(theta, params.n1, params.n2, k).exact;
    const double e1 = params.n1 * params.n1, e2 = params.n2 * params.n2;
    bc.data.epsilon = [e1, e2](const Point& x) { return x.y() < 0.0 ? e1 : e2; };
    bc.data.g = impedance_from(*bc.exact, k, bc.data.epsilon);
    break;
  }
  case BenchmarkId::gauss_beam:
  {
    bc.domain = Rectangle{0.0, 0.0, 4.0, 4.0};
    bc.c_res = 2.0;
    const double w0 = params.beam_w0 > 0.0 ? params.beam_w0 : 8.0 * pi / k;
    const GaussianBeam beam(k, params.beam_angle_deg * pi / 180.0, w0, params.beam_origin);
    bc.data.g = [beam](const Point& x, const Point& n) { return beam.impedance_data(x, n); };
    break;
  }
  }
  return bc;
}

int initial_degree(double k)
{
  if (!(k > 0.0))
    throw std::invalid_argument("wavenumber must be positive");
  return std::max(1, static_cast<int>(std::ceil(std::log(k) - 1e-12)));
}

double initial_mesh_size(double k, int p, double c_res)
{
  if (!(k > 0.0 && c_res > 0.0 && p >= 1))
    throw std::invalid_argument("initial mesh size needs k > 0, c_res > 0, p >= 1");
  return c_res * p / k;
}

InitialDiscretization initial_discretization(const BenchmarkCase& bc, double c_res,
                                             bool underresolved)
{
  InitialDiscretization init;
  int p = 1;
  if (underresolved)
    init.mesh = build_structured_mesh(bc.domain, 0.25);
  else
  {
    p = initial_degree(bc.k);
    const double h = initial_mesh_size(bc.k, p, c_res);
    // cells of side h / sqrt(2) give triangles of diameter <= h
    init.mesh = build_structured_mesh(bc.domain, h / std::sqrt(2.0));
  }
  init.degrees.assign(init.mesh.num_triangles(), p);
  return init;
}

} // namespace hpdg
