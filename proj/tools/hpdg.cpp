// Command-line front end: run a benchmark configuration, list the
// benchmarks, or validate a configuration without solving.

#include "hpdg/benchmarks.hpp"
#include "hpdg/config.hpp"
#include "hpdg/driver.hpp"
#include "hpdg/linear_solver.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cstdlib>
#include <iomanip>
#include <iostream>

namespace
{

void apply_thread_count()
{
  const char* env = std::getenv("HPDG_NUM_THREADS");
  if (!env)
    return;
  const int n = std::atoi(env);
  if (n < 1)
    throw std::runtime_error("HPDG_NUM_THREADS must be a positive integer");
  omp_set_num_threads(n);
}

struct Overrides
{
  std::string mode;
  std::string k;
  std::string budget;
  std::string out;
};

hpdg::RunConfig load_with_overrides(const std::string& path, const Overrides& o)
{
  hpdg::RunConfig config = hpdg::load_config(path);
  if (!o.mode.empty())
    hpdg::set_config_value(config, "mode", o.mode);
  if (!o.k.empty())
    hpdg::set_config_value(config, "k", o.k);
  if (!o.budget.empty())
    hpdg::set_config_value(config, "max_dofs", o.budget);
  if (!o.out.empty())
    hpdg::set_config_value(config, "output", o.out);
  hpdg::validate(config);
  return config;
}

void print_summary(const hpdg::RunConfig& c)
{
  std::cout << "benchmark   " << hpdg::to_string(c.benchmark) << "\n"
            << "k           " << c.k << "\n"
            << "mode        " << hpdg::to_string(c.mode) << "\n"
            << "max_levels  " << c.max_levels << "\n"
            << "max_dofs    " << c.max_dofs << "\n"
            << "output      " << c.output << "\n"
            << "snapshot    " << hpdg::snapshot_path(c) << "\n";
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"hp-adaptive DG Helmholtz solver with equilibrated a posteriori estimates"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;
  bool serial = false;

  auto* run = app.add_subcommand("run", "run a configuration and write CSV plus mesh snapshot");
  run->add_option("config", config_path, "configuration file")->required();
  run->add_option("--mode", overrides.mode, "uniform_h, uniform_p, adaptive_h or adaptive_hp");
  run->add_option("--k", overrides.k, "wavenumber");
  run->add_option("--budget-dof", overrides.budget, "maximum number of degrees of freedom");
  run->add_option("--out", overrides.out, "CSV output path");
  run->add_flag("--serial", serial, "use the serial reference kernels");

  auto* check = app.add_subcommand("check", "validate a configuration without solving");
  check->add_option("config", config_path, "configuration file")->required();
  check->add_option("--mode", overrides.mode, "override mode");
  check->add_option("--k", overrides.k, "override wavenumber");
  check->add_option("--budget-dof", overrides.budget, "override DOF budget");
  check->add_option("--out", overrides.out, "override CSV output path");

  auto* list = app.add_subcommand("list-benchmarks", "print the benchmark identifiers");

  CLI11_PARSE(app, argc, argv);

  try
  {
    apply_thread_count();
    if (list->parsed())
    {
      for (auto id : hpdg::all_benchmarks())
        std::cout << hpdg::to_string(id) << "\n";
      return 0;
    }
    const hpdg::RunConfig config = load_with_overrides(config_path, overrides);
    if (check->parsed())
    {
      print_summary(config);
      std::cout << "ok\n";
      return 0;
    }
    print_summary(config);
    std::cout << "threads     " << (serial ? 1 : omp_get_max_threads()) << "\n"
              << "solver      " << hpdg::sparse_backend() << "\n";
    const auto exec = serial ? hpdg::Exec::serial : hpdg::Exec::parallel;
    const hpdg::RunRecord rec = hpdg::run(
        config,
        [](const hpdg::LevelContext& ctx) {
          const auto& r = ctx.record;
          std::cout << "level " << std::setw(3) << r.level << "  dof " << std::setw(8) << r.n_dof
                    << "  eta " << std::scientific << std::setprecision(4) << r.eta_total;
          if (r.err_grad)
            std::cout << "  err " << *r.err_grad << "  eff " << std::fixed
                      << std::setprecision(3) << *r.eff_index;
          std::cout << std::defaultfloat << "\n";
        },
        exec);
    std::cout << rec.levels.size() << " levels written to " << config.output << "\n";
  }
  catch (const hpdg::ConfigError& e)
  {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
