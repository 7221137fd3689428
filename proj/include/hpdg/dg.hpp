#pragma once

#include "hpdg/exec.hpp"
#include "hpdg/linear_solver.hpp"
#include "hpdg/mesh.hpp"
#include "hpdg/quadrature.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

namespace hpdg
{

using complex = std::complex<double>;
using Vector2c = Eigen::Matrix<complex, 2, 1>;

struct DGParams
{
  double alpha = 10.0;
  double beta = 1.0;
  double gamma = 0.25;
  double k = 1.0;
};

/// Data of -div grad u - k^2 eps u = f, grad u . n - i k sqrt(eps) u = g.
struct ProblemData
{
  /// Volume source; empty means f = 0.
  std::function<complex(const Point&)> f;
  /// Impedance datum g(x, n) with n the outward normal; empty means g = 0.
  std::function<complex(const Point&, const Point&)> g;
  /// Relative permittivity eps (piecewise constant, resolved by the mesh,
  /// evaluated at element centroids); empty means eps = 1.
  std::function<double(const Point&)> epsilon;
  /// Points where the data is singular; boundary integrals on edges
  /// touching them use graded quadrature.
  std::vector<Point> singular_points;
};

/// Mesh, degree map and problem data for one discrete problem. Holds
/// references to mesh and data, which must outlive it.
class Discretization
{
public:
  Discretization(const Mesh& mesh, std::vector<int> degrees, DGParams params,
                 const ProblemData& data);

  const Mesh& mesh() const { return *mesh_; }
  const ProblemData& data() const { return *data_; }
  const DGParams& params() const { return params_; }

  int degree(int t) const { return degrees_[t]; }
  const std::vector<int>& degrees() const { return degrees_; }
  int offset(int t) const { return offsets_[t]; }
  int block_size(int t) const { return offsets_[t + 1] - offsets_[t]; }
  int num_dofs() const { return offsets_.back(); }

  double epsilon(int t) const { return epsilon_[t]; }
  /// k sqrt(eps_T)
  double wavenumber(int t) const { return params_.k * std::sqrt(epsilon_[t]); }

  /// Interface mesh size and degree functions
  double edge_h(int e) const { return traces_.h[e]; }
  int edge_p(int e) const { return traces_.p[e]; }

  /// Rule for integrals of f over triangle t.
  const TriangleRule& element_data_rule(int t) const;

  /// Rule for integrals of g over boundary edge e, in the parameter of the
  /// adjacent triangle's local edge (0 at vertex local+1). Graded towards
  /// an endpoint that is a singular point.
  const LineRule& boundary_data_rule(int e) const { return boundary_rules_[e]; }

  /// Index (0 or 1 in local edge parameter) of the singular endpoint of
  /// edge e, or -1.
  int singular_endpoint(int e) const;
  /// Local vertex of t that is a singular point, or -1.
  int singular_vertex(int t) const;

  complex f(const Point& x) const { return data_->f ? data_->f(x) : complex(0.0); }
  complex g(const Point& x, const Point& n) const
  {
    return data_->g ? data_->g(x, n) : complex(0.0);
  }

private:
  const Mesh* mesh_;
  const ProblemData* data_;
  DGParams params_;
  std::vector<int> degrees_;
  std::vector<int> offsets_;
  std::vector<double> epsilon_;
  EdgeTraces traces_;
  std::vector<LineRule> boundary_rules_;
};

/// Quadrature degree for integrals involving data
constexpr int data_degree(int p)
{
  return 2 * p + 12;
}

/// Values and physical gradients of a broken field in the per-element
/// physical orthonormal basis q^_l(xi) / sqrt(det B).
complex field_value(const Discretization& d, const Eigen::VectorXcd& u, int t,
                    const Point& xi);
Vector2c field_gradient(const Discretization& d, const Eigen::VectorXcd& u, int t,
                        const Point& xi);

/// Edge traversal for an edge seen from one of its triangles.
struct EdgeSide
{
  int triangle = -1;
  int local = -1;
  /// true when the local edge direction opposes the global one (from
  /// nodes[0] to nodes[1])
  bool reversed = false;
};

EdgeSide edge_side(const Mesh& mesh, int e, int side);

struct LinearSystem
{
  SparseComplex A;
  Eigen::VectorXcd b;
};

/// Assemble A_ij = a_hp(phi_j, phi_i), b_i = F_hp(phi_i).
LinearSystem assemble(const Discretization& d, Exec exec = Exec::parallel);

struct DGSolution
{
  Eigen::VectorXcd u;
  double relative_residual = 0.0;
};

DGSolution solve(const Discretization& d, Exec exec = Exec::parallel);

/// Piecewise-constant lifting on the two triangles of an interior edge.
struct EdgeLifting
{
  Vector2c plus = Vector2c::Zero();
  Vector2c minus = Vector2c::Zero();
};

/// L0 lifting of the jump of u across interior edge e. Throws on boundary
/// edges.
EdgeLifting lift_L0(const Discretization& d, const Eigen::VectorXcd& u, int e);

/// L1 lifting of the normal-derivative jump of u across interior edge e.
EdgeLifting lift_L1(const Discretization& d, const Eigen::VectorXcd& u, int e);

/// DG gradient grad_h u - sum_E (L0_E + L1_E), stored as the broken
/// gradient plus a constant correction per element.
struct DGGradient
{
  std::vector<Vector2c> correction;

  Vector2c evaluate(const Discretization& d, const Eigen::VectorXcd& u, int t,
                    const Point& xi) const
  {
    return field_gradient(d, u, t, xi) - correction[t];
  }
};

DGGradient dg_gradient(const Discretization& d, const Eigen::VectorXcd& u,
                       Exec exec = Exec::parallel);

/// Sign of the i k u term inside the boundary residual
/// X = g - grad u . n +/- i k u.
enum class ImpedanceSign
{
  plus_iku,
  minus_iku
};

struct OrthogonalityResidual
{
  complex residual;
  /// sum of magnitudes of the individual terms
  double scale = 0.0;
};

/// (G(u), grad psi_z) - (f + k^2 eps u, psi_z) - (g + iku, psi_z)_dOmega
/// + (gamma k h/p X, psi_z)_dOmega + i gamma (h/p X, grad psi_z . n)_dOmega
/// with X = g - grad u . n + i k u.
OrthogonalityResidual hat_orthogonality_residual(const Discretization& d,
                                                 const Eigen::VectorXcd& u,
                                                 const DGGradient& grad, int node,
                                                 ImpedanceSign sign =
                                                     ImpedanceSign::plus_iku);

/// Reference gradient of the barycentric coordinate of local vertex i.
Point barycentric_gradient(int i);
double barycentric(int i, const Point& xi);

} // namespace hpdg
