#pragma once

#include "hpdg/dg.hpp"
#include "hpdg/exec.hpp"

#include <Eigen/Dense>

#include <vector>

namespace hpdg
{

struct ReconstructionOptions
{
  /// p_z = max_{T in T(z)} p_T + flux_degree_increment
  int flux_degree_increment = 1;
  /// extra flux degree at nodes that are singular points of the data
  int singular_extra = 3;
};

/// Polynomial on one element in the physical orthonormal Dubiner basis.
struct ScalarPolynomial
{
  int degree = 0;
  Eigen::VectorXcd c;
};

/// Vector polynomial on one element, components in the physical orthonormal
/// Dubiner basis.
struct VectorPolynomial
{
  int degree = 0;
  Eigen::VectorXcd x, y;
};

/// Data of the local mixed problem on the patch of a node.
struct PatchFluxProblem
{
  Patch patch;
  /// p_z
  int degree = 0;
  /// Per patch triangle: (f^z, q_l)_T for the physical orthonormal basis
  /// of P_{p_z}(T).
  std::vector<Eigen::VectorXcd> volume_moments;
  /// Per patch triangle: (psi_z G(u), tau_k)_T for the Piola-mapped RT
  /// basis of that triangle.
  std::vector<Eigen::VectorXcd> gradient_moments;

  struct BoundaryEdge
  {
    int edge = -1;
    /// index into patch.triangles
    int slot = -1;
    int local = -1;
    /// int_E g^z q_j(t) ds in the local edge parameter: the fixed RT edge
    /// dofs, so that the prescribed normal trace is the L2(E) projection
    /// of g^z onto P_{p_z}(E)
    Eigen::VectorXcd moments;
  };
  /// Patch boundary edges on the domain boundary (edges through the node
  /// and opposite edges alike)
  std::vector<BoundaryEdge> boundary;

  /// (f^z, 1) - (g^z, 1)_{dOmega}
  complex compatibility = 0.0;
  double compatibility_scale = 0.0;

  /// Squared nodal oscillations
  double osc_f2 = 0.0;
  double osc_g2 = 0.0;
};

PatchFluxProblem build_patch_data(const Discretization& d, const Eigen::VectorXcd& u,
                                  const DGGradient& grad, int node,
                                  const ReconstructionOptions& opts = {});

/// Solution of the local mixed problem.
struct PatchFlux
{
  int node = -1;
  int degree = 0;
  std::vector<int> triangles;
  /// Local RT coefficients per patch triangle
  std::vector<Eigen::VectorXcd> rt;
  /// Pressure coefficients per patch triangle (physical orthonormal basis)
  std::vector<Eigen::VectorXcd> pressure;
  complex multiplier = 0.0;
};

enum class PatchSolver
{
  /// element-wise static condensation onto edge dofs and pressure means
  condensed,
  /// the full saddle-point system through a sparse LU
  monolithic
};

PatchFlux solve_patch_flux(const Discretization& d, const PatchFluxProblem& problem,
                           PatchSolver solver = PatchSolver::condensed);

/// Piola-mapped RT field of degree p on triangle t as a vector polynomial
/// of degree p+1.
VectorPolynomial rt_to_polynomial(const Mesh& mesh, int t, int p,
                                  const Eigen::VectorXcd& rt);

/// Local potential s^z: minimizer of |grad_h(psi_z u) - grad v| over the
/// continuous degree-P space on the patch with the zero-trace constraints.
struct PatchPotential
{
  int node = -1;
  int degree = 0;
  std::vector<int> triangles;
  std::vector<ScalarPolynomial> pieces;
  /// max_i |(grad_h(psi u) - grad s, grad phi_i)| / max_i |(grad_h(psi u), grad phi_i)|
  double optimality_residual = 0.0;
};

PatchPotential solve_patch_potential(const Discretization& d, const Eigen::VectorXcd& u,
                                     int node);

/// sigma_hp = sum_z zeta^z, summed in the given node order (all nodes when
/// order is empty).
std::vector<VectorPolynomial> assemble_global_flux(const Mesh& mesh,
                                                   const std::vector<PatchFlux>& fluxes,
                                                   const std::vector<int>& order = {});

/// s_hp = sum_z s^z minus its mean.
std::vector<ScalarPolynomial>
assemble_global_potential(const Mesh& mesh, const std::vector<PatchPotential>& potentials);

struct Reconstruction
{
  std::vector<PatchFlux> fluxes;
  std::vector<PatchPotential> potentials;
  std::vector<VectorPolynomial> sigma;
  std::vector<ScalarPolynomial> potential;
  /// per node
  std::vector<complex> compatibility;
  std::vector<double> compatibility_scale;
  std::vector<double> osc_f2, osc_g2;
  double osc_f = 0.0;
  double osc_g = 0.0;
};

Reconstruction reconstruct(const Discretization& d, const Eigen::VectorXcd& u,
                           const DGGradient& grad, const ReconstructionOptions& opts = {},
                           Exec exec = Exec::parallel);

/// Evaluation helpers at reference point xi of triangle t.
complex evaluate(const Mesh& mesh, int t, const ScalarPolynomial& s, const Point& xi);
Vector2c evaluate_gradient(const Mesh& mesh, int t, const ScalarPolynomial& s,
                           const Point& xi);
Vector2c evaluate(const Mesh& mesh, int t, const VectorPolynomial& v, const Point& xi);
complex evaluate_divergence(const Mesh& mesh, int t, const VectorPolynomial& v,
                            const Point& xi);

} // namespace hpdg
