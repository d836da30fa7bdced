#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "../boundary.hpp"
#include "../friction.hpp"
#include "../ibvp.hpp"
#include "../model.hpp"
#include "../periodic_solver.hpp"
#include "../stability.hpp"

namespace pipeflow::io {

struct GridConfig
{
  Index nt = 256;
  Index nx = 256;
  double cfl = 0.9;
};

struct SolverConfig
{
  double tol_fp = 1e-10;
  int max_iter = 100;
  int threads = 1;
};

struct StabilitySection
{
  int windows = 8;          // stability.K
  double amplitude = -1;    // < 0: eps / 2
  BoundaryMode<double> mode;
};

struct OutputConfig
{
  std::string dir = "out";
  double snapshot_every = 0; // 0: only the end points
};

struct IbvpSection
{
  double duration = 0; // 0: one period
};

struct ConvergenceSection
{
  Index base = 64;
  int levels = 3;
};

struct SimulationConfig
{
  GasParams<double> gas;
  FrictionSpec<double> friction = FrictionSpec<double>::constant(0.5);
  BoundaryData<double> boundary;
  double boundary_c1_claimed = -1; // < 0: not checked
  GridConfig grid;
  SolverConfig solver;
  StabilitySection stability;
  OutputConfig output;
  IbvpSection ibvp;
  ConvergenceSection convergence;

  double perturbation_amplitude() const
  {
    return stability.amplitude < 0 ? boundary.eps / 2 : stability.amplitude;
  }

  PeriodicOptions<double> periodic_options() const { return {solver.tol_fp, solver.max_iter, solver.threads}; }
  GridSize grid_size() const { return {grid.nt, grid.nx}; }
  StabilityConfig<double> stability_config() const;
};

/// All problems found while parsing, one message per entry.
struct ConfigError : std::runtime_error
{
  std::vector<std::string> problems;
  explicit ConfigError(std::vector<std::string> list);
};

/// Parses the line-oriented `section.key = value` format. Every key is
/// optional; see README for the default table. Throws ConfigError listing
/// every unknown key, malformed value and range violation.
SimulationConfig parse_config(std::string_view text);
SimulationConfig load_config(std::string const &path);

/// Reference configuration: the defaults of parse_config("").
SimulationConfig default_config();

} // namespace pipeflow::io
