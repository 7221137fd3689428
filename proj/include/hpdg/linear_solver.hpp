#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>

namespace hpdg
{

using SparseComplex = Eigen::SparseMatrix<std::complex<double>>;

struct SolveResult
{
  Eigen::VectorXcd x;
  double relative_residual = 0.0;
  int refinement_steps = 0;
};

/// Direct sparse LU solve with up to three steps of iterative refinement.
/// Throws std::runtime_error on factorization breakdown.
SolveResult solve_sparse(const SparseComplex& A, const Eigen::VectorXcd& b);

/// Name of the backend in use ("umfpack" or "eigen-sparselu").
const char* sparse_backend();

} // namespace hpdg
