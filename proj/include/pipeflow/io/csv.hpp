#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "../field.hpp"
#include "../ibvp.hpp"
#include "../periodic_solver.hpp"
#include "../stability.hpp"

namespace pipeflow::io {

/// 17 significant digits (%.17g): reads back bit-exactly.
std::string format_number(double v);

struct IoError : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

inline constexpr char const *field_header = "t,x,phi1,phi2,rho,u,lambda1,lambda2";

/// Rows of one time level (x ascending). Throws SonicError if a node is not
/// strictly subsonic, so no emitted row can carry lambda1 >= 0 or lambda2 <= 0.
void write_profile_rows(std::ostream &os, double t, ArrayX<double> const &phi1, ArrayX<double> const &phi2,
                        GasParams<double> const &gas);

void write_field_csv(std::ostream &os, PeriodicField<double> const &f, GasParams<double> const &gas);
void write_field_csv(std::string const &path, PeriodicField<double> const &f, GasParams<double> const &gas);

void write_trajectory_csv(std::ostream &os, Trajectory<double> const &traj, GasParams<double> const &gas);
void write_trajectory_csv(std::string const &path, Trajectory<double> const &traj, GasParams<double> const &gas);

struct FieldTable
{
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

FieldTable read_csv(std::istream &is);
FieldTable read_csv(std::string const &path);

/// Rebuilds a periodic field from a table written by write_field_csv.
PeriodicField<double> field_from_table(FieldTable const &table, double period, double length);

void write_solver_report_csv(std::ostream &os, SolverReport<double> const &rep);
void write_stability_report_csv(std::ostream &os, StabilityReport<double> const &rep);
std::string solver_summary(SolverReport<double> const &rep);
std::string stability_summary(StabilityReport<double> const &rep);

/// Opens `path` for writing or throws IoError naming it.
void write_file(std::string const &path, std::string const &content);

} // namespace pipeflow::io
