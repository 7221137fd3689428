#pragma once

#include "hpdg/dg.hpp"
#include "hpdg/mesh.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hpdg
{

enum class BenchmarkId
{
  square_hankel,
  lshape_bessel,
  reflect_refract,
  gauss_beam
};

std::string to_string(BenchmarkId id);
std::optional<BenchmarkId> parse_benchmark(std::string_view name);
const std::vector<BenchmarkId>& all_benchmarks();

struct ExactSolution
{
  std::function<complex(const Point&)> value;
  std::function<Vector2c(const Point&)> gradient;
};

/// Case parameters that only some benchmarks use.
struct CaseParameters
{
  /// reflect_refract: angle of incidence in degrees, refractive indices
  double theta_deg = 29.0;
  double n1 = 2.0;
  double n2 = 1.0;
  /// gauss_beam: propagation direction in degrees, waist radius (0 means
  /// 8 pi / k) and a point on the beam axis where the waist sits
  double beam_angle_deg = 40.0;
  double beam_w0 = 0.0;
  Point beam_origin = Point(2.0, 2.0);
};

struct BenchmarkCase
{
  BenchmarkId id = BenchmarkId::square_hankel;
  DomainShape domain;
  double k = 1.0;
  /// default resolution constant for the initial mesh
  double c_res = 2.0;
  ProblemData data;
  std::optional<ExactSolution> exact;
};

BenchmarkCase make_benchmark(BenchmarkId id, double k, const CaseParameters& params = {});

/// Plane-wave solution of the two-layer problem with eps = n1^2 below
/// x2 = 0 and n2^2 above.
struct ReflectionSolution
{
  double K1 = 0.0;
  double K2 = 0.0;
  /// purely imaginary (with positive imaginary part) beyond total
  /// internal reflection
  complex K3;
  complex R;
  ExactSolution exact;
};

ReflectionSolution reflection_solution(double theta, double n1, double n2, double k);

/// Fundamental paraxial Gaussian beam mode.
class GaussianBeam
{
public:
  GaussianBeam(double k, double angle, double w0, Point origin);

  double wavelength() const { return lambda_; }
  double rayleigh_range() const { return zr_; }
  /// beam radius w(z)
  double radius(double z) const;
  /// radius of curvature R(z); infinite at z = 0
  double curvature_radius(double z) const;
  /// Gouy phase phi_0(z)
  double gouy_phase(double z) const;

  complex value(const Point& x) const;
  Vector2c gradient(const Point& x) const;
  /// g = grad v . n - i k v
  complex impedance_data(const Point& x, const Point& n) const;

private:
  double k_, w0_, lambda_, zr_;
  Point origin_, direction_;
};

/// p = ceil(ln k), at least 1.
int initial_degree(double k);
/// largest admissible h with k h / p <= c_res
double initial_mesh_size(double k, int p, double c_res);

struct InitialDiscretization
{
  Mesh mesh;
  std::vector<int> degrees;
};

/// Structured mesh with element diameter h_T <= c_res p / k and uniform
/// p = ceil(ln k). With underresolved = true the start is p = 1 on cells
/// of side 1/4 instead.
InitialDiscretization initial_discretization(const BenchmarkCase& bc, double c_res,
                                             bool underresolved = false);

} // namespace hpdg
