#pragma once

#include "hpdg/adaptivity.hpp"
#include "hpdg/config.hpp"
#include "hpdg/dg.hpp"
#include "hpdg/estimator.hpp"
#include "hpdg/exec.hpp"
#include "hpdg/reconstruction.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace hpdg
{

/// One CSV row.
struct LevelRecord
{
  int level = 0;
  int n_elements = 0;
  long n_dof = 0;
  double eta_total = 0.0;
  double eta_flux = 0.0;
  double eta_vol = 0.0;
  double eta_bnd = 0.0;
  double eta_noncf = 0.0;
  double osc_f = 0.0;
  double osc_g = 0.0;
  std::optional<double> err_grad;
  std::optional<double> err_l2;
  std::optional<double> err_bnd;
  std::optional<double> eff_index;
  std::optional<double> eta_residual;
  double wall_time_s = 0.0;

  /// not in the CSV: |grad_h(u - u_hp)| and the residual estimator's index
  /// against it
  std::optional<double> err_broken_grad;
  std::optional<double> eff_residual;
  int max_degree = 0;
};

/// Refinement decisions of one level, kept for replay checks.
struct LevelDecision
{
  std::vector<int> marked;
  std::vector<int> h_refine;
  std::vector<int> p_refine;
};

struct RunRecord
{
  std::vector<LevelRecord> levels;
  std::vector<LevelDecision> decisions;
  Mesh final_mesh;
  std::vector<int> final_degrees;
};

/// Everything computed on one level, handed to an observer before the
/// mesh is refined.
struct LevelContext
{
  const BenchmarkCase& benchmark;
  const Discretization& discretization;
  const DGSolution& solution;
  const DGGradient& gradient;
  const Reconstruction& reconstruction;
  const EstimatorReport& report;
  const LevelRecord& record;
};

using LevelObserver = std::function<void(const LevelContext&)>;

const char* csv_header();
void write_csv_row(std::ostream& out, const LevelRecord& row, bool timing);

/// solve, reconstruct, estimate, mark and refine until max_levels or until
/// the next level would exceed max_dofs. Rows go to csv (if given) as soon
/// as each level finishes. Failures are rethrown with the level number.
RunRecord adapt_loop(const RunConfig& config, std::ostream* csv = nullptr,
                     const LevelObserver& observer = {}, Exec exec = Exec::parallel);

/// adapt_loop writing config.output and the final mesh snapshot.
RunRecord run(const RunConfig& config, const LevelObserver& observer = {},
              Exec exec = Exec::parallel);

std::string snapshot_path(const RunConfig& config);

} // namespace hpdg
