#include "pipeflow/io/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace pipeflow::io {

std::string format_number(double v)
{
  char buf[40];
  auto const [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc{}) { throw IoError("number formatting failed"); }
  return std::string(buf, end);
}

void write_file(std::string const &path, std::string const &content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) { throw IoError("cannot open '" + path + "' for writing"); }
  out << content;
  if (!out) { throw IoError("write to '" + path + "' failed"); }
}

void write_profile_rows(std::ostream &os, double t, ArrayX<double> const &phi1, ArrayX<double> const &phi2,
                        GasParams<double> const &gas)
{
  Index const nx = phi1.size();
  double const L = gas.length;
  std::string const ts = format_number(t);
  for (Index k = 0; k < nx; ++k) {
    double const x = k == nx - 1 ? L : double(k) * L / double(nx - 1);
    auto const r = to_state(Perturbation<double>{phi1(k), phi2(k)}, gas);
    auto const s = from_riemann(r, gas);
    double const l1 = lambda1(r.m, r.n, gas);
    double const l2 = lambda2(r.m, r.n, gas);
    if (!(l1 < 0 && l2 > 0)) {
      throw SonicError("refusing to write a non-subsonic node at t = " + ts + ", x = " + format_number(x));
    }
    os << ts << ',' << format_number(x) << ',' << format_number(phi1(k)) << ',' << format_number(phi2(k)) << ','
       << format_number(s.rho) << ',' << format_number(s.u) << ',' << format_number(l1) << ',' << format_number(l2)
       << '\n';
  }
}

void write_field_csv(std::ostream &os, PeriodicField<double> const &f, GasParams<double> const &gas)
{
  os << field_header << '\n';
  for (Index j = 0; j < f.nt; ++j) {
    write_profile_rows(os, f.t_at(j), f.phi1.row(j).transpose(), f.phi2.row(j).transpose(), gas);
  }
}

void write_field_csv(std::string const &path, PeriodicField<double> const &f, GasParams<double> const &gas)
{
  std::ostringstream os;
  write_field_csv(os, f, gas);
  write_file(path, os.str());
}

void write_trajectory_csv(std::ostream &os, Trajectory<double> const &traj, GasParams<double> const &gas)
{
  os << field_header << '\n';
  for (auto const &s : traj.snapshots) { write_profile_rows(os, s.t, s.phi1, s.phi2, gas); }
}

void write_trajectory_csv(std::string const &path, Trajectory<double> const &traj, GasParams<double> const &gas)
{
  std::ostringstream os;
  write_trajectory_csv(os, traj, gas);
  write_file(path, os.str());
}

namespace {

std::vector<std::string> split_commas(std::string const &line)
{
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) { out.push_back(cell); }
  if (!line.empty() && line.back() == ',') { out.emplace_back(); }
  return out;
}

} // namespace

FieldTable read_csv(std::istream &is)
{
  FieldTable table;
  std::string line;
  if (!std::getline(is, line)) { throw IoError("empty CSV: header row missing"); }
  if (!line.empty() && line.back() == '\r') { line.pop_back(); }
  table.header = split_commas(line);
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') { line.pop_back(); }
    if (line.empty()) { continue; }
    auto const cells = split_commas(line);
    if (cells.size() != table.header.size()) {
      throw IoError("CSV line " + std::to_string(line_no) + ": expected " + std::to_string(table.header.size()) +
                    " columns, got " + std::to_string(cells.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      auto const &c = cells[i];
      auto const [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), row[i]);
      if (ec != std::errc{} || ptr != c.data() + c.size()) {
        throw IoError("CSV line " + std::to_string(line_no) + ": bad number '" + c + "'");
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

FieldTable read_csv(std::string const &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) { throw IoError("cannot open '" + path + "' for reading"); }
  try {
    return read_csv(in);
  } catch (IoError const &e) {
    throw IoError(path + ": " + e.what());
  }
}

PeriodicField<double> field_from_table(FieldTable const &table, double period, double length)
{
  if (table.header.size() < 4 || table.header[0] != "t" || table.header[1] != "x" || table.header[2] != "phi1" ||
      table.header[3] != "phi2") {
    throw IoError("table does not start with t,x,phi1,phi2");
  }
  if (table.rows.empty()) { throw IoError("table has no rows"); }
  Index nx = 0;
  while (std::size_t(nx) < table.rows.size() && table.rows[std::size_t(nx)][0] == table.rows[0][0]) { ++nx; }
  if (table.rows.size() % std::size_t(nx) != 0) { throw IoError("rows do not form a full t x x grid"); }
  Index const nt = Index(table.rows.size()) / nx;
  PeriodicField<double> f(nt, nx, period, length);
  for (Index j = 0; j < nt; ++j) {
    for (Index k = 0; k < nx; ++k) {
      auto const &row = table.rows[std::size_t(j * nx + k)];
      f.phi1(j, k) = row[2];
      f.phi2(j, k) = row[3];
    }
  }
  return f;
}

namespace {

std::string opt_number(std::optional<double> v) { return v ? format_number(*v) : std::string("nan"); }

} // namespace

void write_solver_report_csv(std::ostream &os, SolverReport<double> const &rep)
{
  os << "iteration,sup_diff,kappa_hat\n";
  for (std::size_t i = 0; i < rep.sup_diffs.size(); ++i) {
    os << i + 1 << ',' << format_number(rep.sup_diffs[i]) << ',';
    os << (i >= 1 ? format_number(rep.kappa_hats[i - 1]) : std::string("nan")) << '\n';
  }
}

std::string solver_summary(SolverReport<double> const &rep)
{
  std::ostringstream os;
  os << "converged: " << (rep.converged ? "yes" : "no") << '\n';
  os << "iterations: " << rep.iterations << '\n';
  os << "tol_fp: " << format_number(rep.tol_fp) << '\n';
  os << "final_sup_diff: " << (rep.sup_diffs.empty() ? std::string("nan") : format_number(rep.sup_diffs.back()))
     << '\n';
  os << "last_kappa_hat: " << (rep.kappa_hats.empty() ? std::string("nan") : format_number(rep.kappa_hats.back()))
     << '\n';
  os << "c0_norm: " << format_number(rep.c0_norm) << '\n';
  os << "c1_norm_fd: " << format_number(rep.c1_norm_fd) << '\n';
  os << "nu_max: " << format_number(rep.nu_max) << '\n';
  os << "T0: " << format_number(rep.T0) << '\n';
  if (!rep.failure.empty()) { os << "failure: " << rep.failure << '\n'; }
  return os.str();
}

void write_stability_report_csv(std::ostream &os, StabilityReport<double> const &rep)
{
  os << "k,t,distance,raw_distance,ratio\n";
  for (std::size_t k = 0; k < rep.distances.size(); ++k) {
    os << k << ',' << format_number(double(k) * rep.T0) << ',' << format_number(rep.distances[k]) << ',';
    os << (k < rep.raw_distances.size() ? format_number(rep.raw_distances[k]) : std::string("nan")) << ',';
    os << (k >= 1 && k - 1 < rep.ratios.size() ? format_number(rep.ratios[k - 1]) : std::string("nan")) << '\n';
  }
}

std::string stability_summary(StabilityReport<double> const &rep)
{
  std::ostringstream os;
  os << "pass: " << (rep.pass ? "yes" : "no") << (rep.trivial ? " (trivial)" : "") << '\n';
  if (rep.regime_failure) { os << "regime_failure: yes\n"; }
  os << "T0: " << format_number(rep.T0) << '\n';
  os << "dt: " << format_number(rep.dt) << '\n';
  os << "xi_hat: " << opt_number(rep.xi_hat) << '\n';
  os << "fit_points: " << rep.fit_points << '\n';
  os << "monotone_fraction: " << format_number(rep.monotone_fraction) << '\n';
  os << "noise_floor: " << format_number(rep.noise_floor) << '\n';
  os << "closure_residual: " << format_number(rep.closure_residual) << '\n';
  os << "raw_floor: " << format_number(rep.raw_floor) << '\n';
  if (!rep.note.empty()) { os << "note: " << rep.note << '\n'; }
  return os.str();
}

} // namespace pipeflow::io
