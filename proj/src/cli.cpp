#include "pipeflow/io/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "pipeflow/io/config.hpp"
#include "pipeflow/io/csv.hpp"
#include "pipeflow/verification.hpp"

namespace pipeflow::io {

namespace {

struct Options
{
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::string grid;
  bool quiet = false;
};

struct UsageError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

void report_error(std::ostream &err, std::string_view code, std::string const &message)
{
  err << "ERROR " << code << ": " << message << '\n';
}

std::pair<Index, Index> parse_grid(std::string const &text)
{
  auto const x = text.find_first_of("xX");
  long nt = 0, nx = 0;
  auto const ok = [](std::string_view s, long &v) {
    auto const [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && p == s.data() + s.size() && !s.empty();
  };
  if (x == std::string::npos || !ok(std::string_view(text).substr(0, x), nt) ||
      !ok(std::string_view(text).substr(x + 1), nx)) {
    throw UsageError("--grid expects NTxNX, got '" + text + "'");
  }
  if (nt < 16 || nx < 16) { throw UsageError("--grid needs NT, NX >= 16"); }
  return {nt, nx};
}

SimulationConfig resolve_config(Options const &o)
{
  auto cfg = o.config_path.empty() ? default_config() : load_config(o.config_path);
  if (!o.out_dir.empty()) { cfg.output.dir = o.out_dir; }
  if (!o.grid.empty()) {
    auto const [nt, nx] = parse_grid(o.grid);
    cfg.grid.nt = nt;
    cfg.grid.nx = nx;
    cfg.convergence.base = nt;
  }
  return cfg;
}

std::string out_path(SimulationConfig const &cfg, std::string const &name)
{
  std::filesystem::create_directories(cfg.output.dir);
  return (std::filesystem::path(cfg.output.dir) / name).string();
}

std::string to_text(auto const &writer)
{
  std::ostringstream os;
  writer(os);
  return os.str();
}

PeriodicSolution<double> solve(SimulationConfig const &cfg)
{
  return solve_periodic(cfg.boundary, cfg.friction, cfg.gas, cfg.grid_size(), cfg.periodic_options());
}

int run_periodic(SimulationConfig const &cfg, bool quiet, std::ostream &out)
{
  try {
    auto const sol = solve(cfg);
    write_field_csv(out_path(cfg, "periodic.csv"), sol.field, cfg.gas);
    write_file(out_path(cfg, "solver_report.csv"), to_text([&](auto &os) { write_solver_report_csv(os, sol.report); }));
    write_file(out_path(cfg, "solver_summary.txt"), solver_summary(sol.report));
    if (!quiet) { out << solver_summary(sol.report); }
    return exit_ok;
  } catch (NonConvergenceError<double> const &e) {
    write_file(out_path(cfg, "solver_report.csv"), to_text([&](auto &os) { write_solver_report_csv(os, e.report); }));
    write_file(out_path(cfg, "solver_summary.txt"), solver_summary(e.report));
    if (!quiet) { out << solver_summary(e.report); }
    throw;
  }
}

int run_ibvp_command(SimulationConfig const &cfg, bool quiet, std::ostream &out)
{
  auto const sol = solve(cfg);
  auto const [a, b] = profile_at(sol.field, 0.0);
  double const amp = cfg.perturbation_amplitude();
  auto const [p1, p2] = make_compatible_perturbation(a, b, amp, cfg.gas);
  double const T = cfg.ibvp.duration > 0 ? cfg.ibvp.duration : cfg.gas.period;
  IbvpOptions<double> opt;
  opt.cfl = cfg.grid.cfl;
  auto const times = snapshot_cadence(T, cfg.output.snapshot_every);
  Trajectory<double> traj;
  try {
    traj = run_ibvp(p1, p2, cfg.boundary, cfg.stability.mode, cfg.friction, cfg.gas, T, times, opt);
  } catch (IbvpRegimeError<double> const &e) {
    write_trajectory_csv(out_path(cfg, "trajectory_partial.csv"), e.partial, cfg.gas);
    throw;
  }
  write_trajectory_csv(out_path(cfg, "trajectory.csv"), traj, cfg.gas);
  if (!quiet) {
    out << "steps: " << traj.steps << '\n';
    out << "snapshots: " << traj.snapshots.size() << '\n';
    out << "amplitude: " << format_number(amp) << '\n';
    out << "max_c0: " << format_number(traj.max_c0) << '\n';
  }
  return exit_ok;
}

int run_stability_command(SimulationConfig const &cfg, bool quiet, std::ostream &out)
{
  auto const sc = cfg.stability_config();
  auto const sol = solve(cfg);
  auto const rep = run_stability_experiment(sc, sol);
  write_file(out_path(cfg, "stability_report.csv"), to_text([&](auto &os) { write_stability_report_csv(os, rep); }));
  write_file(out_path(cfg, "stability_summary.txt"), stability_summary(rep));
  if (!quiet) { out << stability_summary(rep); }
  if (rep.regime_failure) { throw RegimeError(rep.note); }
  if (!rep.pass) { throw RegimeError("stability run shows no geometric decay (" + rep.note + ")"); }
  return exit_ok;
}

int run_convergence(SimulationConfig const &cfg, bool quiet, std::ostream &out)
{
  std::vector<Index> ns;
  for (int i = 0; i < cfg.convergence.levels; ++i) { ns.push_back(cfg.convergence.base << i); }
  std::vector<double> closure, oracle;
  std::vector<SolverReport<double>> reports;
  for (Index n : ns) {
    auto c = cfg;
    c.grid.nt = n;
    c.grid.nx = n;
    auto const sol = solve(c);
    closure.push_back(closure_residual(sol.field, c.boundary, c.friction, c.gas, c.grid.cfl));
    oracle.push_back(
      oracle_discrepancy(sol.field, c.boundary, c.friction, c.gas, n, 6 * sol.report.T0, c.grid.cfl).linf());
    reports.push_back(sol.report);
  }
  auto const oc = observed_orders(closure);
  auto const oo = observed_orders(oracle);
  std::ostringstream os;
  os << "n,iterations,c0_norm,T0,closure_residual,closure_order,oracle_linf,oracle_order\n";
  for (std::size_t i = 0; i < ns.size(); ++i) {
    os << ns[i] << ',' << reports[i].iterations << ',' << format_number(reports[i].c0_norm) << ','
       << format_number(reports[i].T0) << ',' << format_number(closure[i]) << ','
       << (i > 0 ? format_number(oc[i - 1]) : std::string("nan")) << ',' << format_number(oracle[i]) << ','
       << (i > 0 ? format_number(oo[i - 1]) : std::string("nan")) << '\n';
  }
  write_file(out_path(cfg, "convergence.csv"), os.str());
  if (!quiet) { out << os.str(); }
  return exit_ok;
}

int run_validate(SimulationConfig const &cfg, bool quiet, std::ostream &out, std::ostream &err)
{
  bool ok = true;
  std::ostringstream os;
  auto const fv = validate_beta(cfg.friction, cfg.gas, Index(256));
  os << "beta: c1_norm " << format_number(fv.c1_norm) << " <= c0 " << format_number(fv.c0_claimed)
     << ", periodicity residual " << format_number(fv.periodicity_residual) << (fv.pass() ? " ok" : " FAIL") << '\n';
  if (!fv.pass()) {
    ok = false;
    report_error(err, "validation", "friction coefficient fails its C1 bound or periodicity");
  }

  auto const bv = validate_boundary(cfg.boundary, cfg.gas.period);
  double const claim = cfg.boundary_c1_claimed < 0 ? std::numeric_limits<double>::infinity() : cfg.boundary_c1_claimed;
  os << "boundary: c0_norm " << format_number(bv.c0_norm) << ", c1_norm " << format_number(bv.c1_norm)
     << ", periodicity residual " << format_number(bv.periodicity_residual) << (bv.pass(claim) ? " ok" : " FAIL")
     << '\n';
  if (!bv.pass(claim)) {
    ok = false;
    report_error(err, "validation", "boundary data fail their C1 bound or periodicity");
  }

  // compatibility of the perturbed start built from a coarse periodic solve
  auto c = cfg;
  c.grid.nt = 64;
  c.grid.nx = 64;
  auto const sol = solve(c);
  auto const [a, b] = profile_at(sol.field, 0.0);
  auto const [p1, p2] = make_compatible_perturbation(a, b, cfg.perturbation_amplitude(), cfg.gas);
  auto const cr = check_compatibility(p1, p2, cfg.boundary, cfg.friction, cfg.gas, cfg.stability.mode);
  os << "compatibility: order0 " << format_number(std::max(cr.order0_left, cr.order0_right));
  if (cr.order1_checked) {
    os << ", order1 " << format_number(std::max(cr.order1_left, cr.order1_right)) << " (tol "
       << format_number(cr.order1_tol) << ")";
  }
  os << (cr.pass() ? " ok" : " FAIL") << '\n';
  if (!cr.pass()) {
    ok = false;
    report_error(err, "validation", "initial data incompatible with the boundary data");
  }
  if (!quiet) { out << os.str(); }
  return ok ? exit_ok : exit_usage;
}

int run(Options const &o, std::ostream &out, std::ostream &err)
{
  auto const cfg = resolve_config(o);
  if (o.command == "periodic") { return run_periodic(cfg, o.quiet, out); }
  if (o.command == "ibvp") { return run_ibvp_command(cfg, o.quiet, out); }
  if (o.command == "stability") { return run_stability_command(cfg, o.quiet, out); }
  if (o.command == "convergence") { return run_convergence(cfg, o.quiet, out); }
  return run_validate(cfg, o.quiet, out, err);
}

} // namespace

int cli_dispatch(std::vector<std::string> const &args, std::ostream &out, std::ostream &err)
{
  CLI::App app{"Time-periodic subsonic pipe flow with friction: solver and experiments", "pipeflow"};
  Options o;
  app.require_subcommand(1, 1);
  struct Sub
  {
    char const *name;
    char const *help;
  };
  for (auto const &s : {Sub{"periodic", "solve for the time-periodic solution"},
                        Sub{"ibvp", "run the upwind IBVP from a perturbed periodic profile"},
                        Sub{"stability", "windowed decay experiment"},
                        Sub{"convergence", "refinement-order table over a grid ladder"},
                        Sub{"validate", "check friction, boundary data and compatibility only"}}) {
    auto *sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", o.config_path, "config file (section.key = value)");
    sub->add_option("--out", o.out_dir, "output directory");
    sub->add_option("--grid", o.grid, "grid override NTxNX");
    sub->add_flag("--quiet", o.quiet, "suppress the summary on stdout");
    sub->callback([&o, name = std::string(s.name)] { o.command = name; });
  }

  if (!args.empty() && !args.front().starts_with('-') && !app.get_subcommand_no_throw(args.front())) {
    report_error(err, "usage", "unknown subcommand '" + args.front() + "'");
    err << app.help();
    return exit_usage;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (CLI::CallForHelp const &) {
    out << app.help();
    return exit_ok;
  } catch (CLI::ParseError const &e) {
    report_error(err, "usage", e.what());
    err << app.help();
    return exit_usage;
  }

  try {
    return run(o, out, err);
  } catch (UsageError const &e) {
    report_error(err, "usage", e.what());
  } catch (ConfigError const &e) {
    for (auto const &p : e.problems) { report_error(err, "config", p); }
  } catch (NonConvergenceError<double> const &e) {
    report_error(err, "nonconvergence", e.what());
    return exit_regime;
  } catch (RegimeError const &e) {
    report_error(err, "regime", e.what());
    return exit_regime;
  } catch (SonicError const &e) {
    report_error(err, "regime", e.what());
    return exit_regime;
  } catch (NumericError const &e) {
    report_error(err, "numeric", e.what());
    return exit_regime;
  } catch (IoError const &e) {
    report_error(err, "io", e.what());
  } catch (std::filesystem::filesystem_error const &e) {
    report_error(err, "io", e.what());
  } catch (std::exception const &e) {
    report_error(err, "precondition", e.what());
  }
  return exit_usage;
}

int cli_dispatch(int argc, char const *const *argv, std::ostream &out, std::ostream &err)
{
  return cli_dispatch(std::vector<std::string>(argv + (argc > 0 ? 1 : 0), argv + argc), out, err);
}

} // namespace pipeflow::io
