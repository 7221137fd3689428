#include "hpdg/driver.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hpdg
{

const char* csv_header()
{
  return "level,n_elements,n_dof,eta_total,eta_flux,eta_vol,eta_bnd,eta_noncf,osc_f,osc_g,"
         "err_grad,err_l2,err_bnd,eff_index,eta_residual,wall_time_s";
}

namespace
{

void put(std::ostream& out, double v)
{
  out << ',' << v;
}

void put(std::ostream& out, const std::optional<double>& v)
{
  out << ',';
  if (v)
    out << *v;
}

} // namespace

void write_csv_row(std::ostream& out, const LevelRecord& r, bool timing)
{
  std::ostringstream s;
  s << std::setprecision(12);
  s << r.level << ',' << r.n_elements << ',' << r.n_dof;
  put(s, r.eta_total);
  put(s, r.eta_flux);
  put(s, r.eta_vol);
  put(s, r.eta_bnd);
  put(s, r.eta_noncf);
  put(s, r.osc_f);
  put(s, r.osc_g);
  put(s, r.err_grad);
  put(s, r.err_l2);
  put(s, r.err_bnd);
  put(s, r.eff_index);
  put(s, r.eta_residual);
  put(s, timing ? r.wall_time_s : 0.0);
  out << s.str() << '\n';
}

std::string snapshot_path(const RunConfig& config)
{
  return config.snapshot.empty() ? config.output + ".mesh" : config.snapshot;
}

RunRecord adapt_loop(const RunConfig& config, std::ostream* csv, const LevelObserver& observer,
                     Exec exec)
{
  validate(config);
  const BenchmarkCase bc = make_benchmark(config.benchmark, config.k, config.case_params);
  InitialDiscretization init =
      initial_discretization(bc, config.c_res.value_or(bc.c_res), config.underresolved);
  if (config.cell_size)
    init.mesh = build_structured_mesh(bc.domain, *config.cell_size);
  if (config.degree || config.cell_size)
    init.degrees.assign(init.mesh.num_triangles(),
                        config.degree.value_or(init.degrees.empty() ? 1 : init.degrees[0]));
  Mesh mesh = std::move(init.mesh);
  AdaptState state = AdaptState::initial(std::move(init.degrees), config.hp);
  DGParams prm = config.dg;
  prm.k = config.k;

  if (csv)
    *csv << csv_header() << '\n' << std::flush;

  RunRecord rec;
  for (int level = 0;; ++level)
  {
    const auto start = std::chrono::steady_clock::now();
    const Discretization d(mesh, state.degrees, prm, bc.data);
    if (level > 0 && d.num_dofs() > config.max_dofs)
      break;
    LevelRecord row;
    try
    {
      const DGSolution sol = solve(d, exec);
      const DGGradient grad = dg_gradient(d, sol.u, exec);
      const Reconstruction recon = reconstruct(d, sol.u, grad, config.reconstruction, exec);
      const EstimatorReport report = estimate(d, sol.u, grad, recon, exec);

      row.level = level;
      row.n_elements = mesh.num_triangles();
      row.n_dof = d.num_dofs();
      row.eta_total = report.eta;
      row.eta_flux = report.eta_flux;
      row.eta_vol = report.eta_vol;
      row.eta_bnd = report.eta_bnd;
      row.eta_noncf = report.eta_noncf;
      row.osc_f = report.osc_f;
      row.osc_g = report.osc_g;
      row.max_degree = *std::max_element(state.degrees.begin(), state.degrees.end());
      if (config.true_error && bc.exact)
      {
        const TrueError err = true_error(d, sol.u, grad, *bc.exact, 0, exec);
        row.err_grad = err.grad;
        row.err_l2 = err.l2;
        row.err_bnd = err.boundary;
        row.err_broken_grad = err.broken_grad;
        if (err.grad > 0.0)
          row.eff_index = report.eta / err.grad;
      }
      if (config.residual_estimator)
      {
        const ResidualReport res = estimate_residual(d, sol.u, exec);
        row.eta_residual = res.eta;
        if (row.err_broken_grad && *row.err_broken_grad > 0.0)
          row.eff_residual = res.eta / *row.err_broken_grad;
      }
      row.wall_time_s =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      rec.levels.push_back(row);
      if (csv)
      {
        write_csv_row(*csv, row, config.timing);
        csv->flush();
      }
      if (observer)
        observer(LevelContext{bc, d, sol, grad, recon, report, rec.levels.back()});
      rec.final_mesh = mesh;
      rec.final_degrees = state.degrees;

      if (level >= config.max_levels)
        break;

      LevelDecision decision;
      const int nt = mesh.num_triangles();
      switch (config.mode)
      {
      case RefinementMode::uniform_h:
      {
        decision.marked.resize(nt);
        std::iota(decision.marked.begin(), decision.marked.end(), 0);
        decision.h_refine = decision.marked;
        // every triangle split into four similar ones halves h
        const RefinementResult ref = refine(mesh, decision.h_refine, RefinementStrategy::rgb);
        AdaptState next = AdaptState::initial(transfer_degrees(ref, state.degrees), config.hp);
        next.level = state.level + 1;
        state = std::move(next);
        mesh = ref.mesh;
        break;
      }
      case RefinementMode::uniform_p:
      {
        decision.marked.resize(nt);
        std::iota(decision.marked.begin(), decision.marked.end(), 0);
        decision.p_refine = decision.marked;
        for (int& p : state.degrees)
          ++p;
        ++state.level;
        break;
      }
      case RefinementMode::adaptive_h:
      {
        decision.marked = mark(report.indicators, config.marking);
        decision.h_refine = decision.marked;
        if (!decision.marked.empty())
        {
          const RefinementResult ref = refine(mesh, decision.h_refine, config.refinement);
          AdaptState next = AdaptState::initial(transfer_degrees(ref, state.degrees), config.hp);
          next.level = state.level + 1;
          state = std::move(next);
          mesh = ref.mesh;
        }
        break;
      }
      case RefinementMode::adaptive_hp:
      {
        decision.marked = mark(report.indicators, config.marking);
        const HpDecision hp = hp_decide(decision.marked, report.indicators, state);
        decision.h_refine = hp.h_refine;
        decision.p_refine = hp.p_refine;
        if (hp.h_refine.empty())
          state = advance_state(state, hp);
        else
        {
          const RefinementResult ref = refine(mesh, hp.h_refine, config.refinement);
          state = advance_state(state, hp, ref);
          mesh = ref.mesh;
        }
        break;
      }
      }
      const bool converged = decision.marked.empty();
      rec.decisions.push_back(std::move(decision));
      if (converged)
        break;
    }
    catch (const std::exception& e)
    {
      throw std::runtime_error("level " + std::to_string(level) + ": " + e.what());
    }
  }
  return rec;
}

RunRecord run(const RunConfig& config, const LevelObserver& observer, Exec exec)
{
  std::ofstream csv(config.output);
  if (!csv)
    throw std::runtime_error("cannot write '" + config.output + "'");
  RunRecord rec = adapt_loop(config, &csv, observer, exec);
  std::ofstream snap(snapshot_path(config));
  if (!snap)
    throw std::runtime_error("cannot write '" + snapshot_path(config) + "'");
  write_mesh(snap, rec.final_mesh, rec.final_degrees);
  return rec;
}

} // namespace hpdg
