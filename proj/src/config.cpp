#include "pipeflow/io/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

namespace pipeflow::io {

namespace {

std::string join(std::vector<std::string> const &list)
{
  std::string out;
  for (auto const &p : list) {
    if (!out.empty()) { out += "; "; }
    out += p;
  }
  return out;
}

std::string_view trim(std::string_view s)
{
  auto const b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) { return {}; }
  auto const e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(std::string_view s, double &out)
{
  s = trim(s);
  if (!s.empty() && s.front() == '+') { s.remove_prefix(1); }
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

bool parse_int(std::string_view s, long &out)
{
  s = trim(s);
  auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

std::vector<std::string_view> split(std::string_view s, std::string_view seps)
{
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    auto const next = s.find_first_of(seps, pos);
    auto const piece = trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (!piece.empty()) { out.push_back(piece); }
    if (next == std::string_view::npos) { break; }
    pos = next + 1;
  }
  return out;
}

// Upper bound on the C1 norm of a friction series over [0, P) x [0, L].
double series_c1_bound(std::vector<FrictionTerm<double>> const &terms, double L, double P)
{
  double value = 0, dt = 0, dx = 0;
  for (auto const &t : terms) {
    double const amp = std::abs(t.cos_coef) + (t.harmonic == 0 ? 0.0 : std::abs(t.sin_coef));
    double const xk = std::pow(L, t.power);
    value += amp * xk;
    dt += amp * xk * 2 * std::numbers::pi * t.harmonic / P;
    dx += t.power == 0 ? 0.0 : amp * t.power * std::pow(L, t.power - 1);
  }
  return std::max({value, dt, dx});
}

struct Parser
{
  SimulationConfig cfg = default_config();
  std::vector<std::string> problems;

  std::string friction_kind = "constant";
  bool friction_c0_given = false;
  double friction_value = 0.5;
  std::vector<FrictionTerm<double>> friction_terms;
  double eps = 0.01;
  TrigSeries<double> shape1{0, {}, {1.0}};
  TrigSeries<double> shape2{0, {1.0}, {}};
  std::string mode = "dirichlet";

  void real(std::string const &key, std::string_view v, double &dst)
  {
    if (!parse_double(v, dst)) { problems.push_back(key + ": expected a number, got '" + std::string(v) + "'"); }
  }

  template <typename I> void integer(std::string const &key, std::string_view v, I &dst)
  {
    long x = 0;
    if (!parse_int(v, x)) {
      problems.push_back(key + ": expected an integer, got '" + std::string(v) + "'");
      return;
    }
    dst = I(x);
  }

  void reals(std::string const &key, std::string_view v, std::vector<double> &dst)
  {
    dst.clear();
    for (auto piece : split(v, ", \t")) {
      double x = 0;
      if (!parse_double(piece, x)) {
        problems.push_back(key + ": expected a list of numbers, got '" + std::string(v) + "'");
        return;
      }
      dst.push_back(x);
    }
  }

  void terms(std::string const &key, std::string_view v)
  {
    friction_terms.clear();
    for (auto group : split(v, ";")) {
      auto const f = split(group, ", \t");
      long j = 0, k = 0;
      double a = 0, b = 0;
      if (f.size() != 4 || !parse_int(f[0], j) || !parse_int(f[1], k) || !parse_double(f[2], a) ||
          !parse_double(f[3], b)) {
        problems.push_back(key + ": each term is 'harmonic power cos_coef sin_coef', got '" + std::string(group) + "'");
        continue;
      }
      if (j < 0 || k < 0 || k > 2) {
        problems.push_back(key + ": harmonic must be >= 0 and power in {0, 1, 2}");
        continue;
      }
      friction_terms.push_back({int(j), int(k), a, b});
    }
  }

  using Setter = std::function<void(std::string const &, std::string_view)>;

  std::map<std::string, Setter> setters()
  {
    auto &c = cfg;
    return {
      {"gas.gamma", [&](auto const &k, auto v) { real(k, v, c.gas.gamma); }},
      {"gas.alpha", [&](auto const &k, auto v) { real(k, v, c.gas.alpha); }},
      {"gas.rho_bar", [&](auto const &k, auto v) { real(k, v, c.gas.rho_bar); }},
      {"gas.L", [&](auto const &k, auto v) { real(k, v, c.gas.length); }},
      {"gas.P", [&](auto const &k, auto v) { real(k, v, c.gas.period); }},
      {"friction.kind", [&](auto const &, auto v) { friction_kind = std::string(v); }},
      {"friction.value", [&](auto const &k, auto v) { real(k, v, friction_value); }},
      {"friction.c0",
       [&](auto const &k, auto v) {
         friction_c0_given = true;
         real(k, v, c.friction.c0_claimed);
       }},
      {"friction.terms", [&](auto const &k, auto v) { terms(k, v); }},
      {"boundary.eps", [&](auto const &k, auto v) { real(k, v, eps); }},
      {"boundary.phi1_mean", [&](auto const &k, auto v) { real(k, v, shape1.mean); }},
      {"boundary.phi1_cos", [&](auto const &k, auto v) { reals(k, v, shape1.cos_coef); }},
      {"boundary.phi1_sin", [&](auto const &k, auto v) { reals(k, v, shape1.sin_coef); }},
      {"boundary.phi2_mean", [&](auto const &k, auto v) { real(k, v, shape2.mean); }},
      {"boundary.phi2_cos", [&](auto const &k, auto v) { reals(k, v, shape2.cos_coef); }},
      {"boundary.phi2_sin", [&](auto const &k, auto v) { reals(k, v, shape2.sin_coef); }},
      {"boundary.c1_claimed", [&](auto const &k, auto v) { real(k, v, c.boundary_c1_claimed); }},
      {"grid.nt", [&](auto const &k, auto v) { integer(k, v, c.grid.nt); }},
      {"grid.nx", [&](auto const &k, auto v) { integer(k, v, c.grid.nx); }},
      {"grid.cfl", [&](auto const &k, auto v) { real(k, v, c.grid.cfl); }},
      {"solver.tol_fp", [&](auto const &k, auto v) { real(k, v, c.solver.tol_fp); }},
      {"solver.max_iter", [&](auto const &k, auto v) { integer(k, v, c.solver.max_iter); }},
      {"solver.threads", [&](auto const &k, auto v) { integer(k, v, c.solver.threads); }},
      {"stability.K", [&](auto const &k, auto v) { integer(k, v, c.stability.windows); }},
      {"stability.amplitude", [&](auto const &k, auto v) { real(k, v, c.stability.amplitude); }},
      {"stability.mode", [&](auto const &, auto v) { mode = std::string(v); }},
      {"stability.K1", [&](auto const &k, auto v) { real(k, v, c.stability.mode.K1); }},
      {"stability.K2", [&](auto const &k, auto v) { real(k, v, c.stability.mode.K2); }},
      {"output.dir", [&](auto const &, auto v) { c.output.dir = std::string(v); }},
      {"output.snapshot_every", [&](auto const &k, auto v) { real(k, v, c.output.snapshot_every); }},
      {"ibvp.duration", [&](auto const &k, auto v) { real(k, v, c.ibvp.duration); }},
      {"convergence.base", [&](auto const &k, auto v) { integer(k, v, c.convergence.base); }},
      {"convergence.levels", [&](auto const &k, auto v) { integer(k, v, c.convergence.levels); }},
    };
  }

  void parse(std::string_view text)
  {
    auto const table = setters();
    std::size_t line_no = 0;
    for (auto raw : split(text, "\n")) {
      ++line_no;
      auto line = raw;
      if (auto const hash = line.find('#'); hash != std::string_view::npos) { line = trim(line.substr(0, hash)); }
      if (line.empty()) { continue; }
      auto const eq = line.find('=');
      if (eq == std::string_view::npos) {
        problems.push_back("line '" + std::string(line) + "': expected 'section.key = value'");
        continue;
      }
      std::string const key(trim(line.substr(0, eq)));
      auto const value = trim(line.substr(eq + 1));
      auto const it = table.find(key);
      if (it == table.end()) {
        problems.push_back("unknown key '" + key + "'");
        continue;
      }
      it->second(key, value);
    }
    finish();
  }

  void finish()
  {
    auto &c = cfg;
    if (!(c.gas.gamma > 1)) { problems.push_back("gamma must exceed 1"); }
    if (!(c.gas.alpha > 0)) { problems.push_back("alpha must be positive"); }
    if (!(c.gas.rho_bar > 0)) { problems.push_back("rho_bar must be positive"); }
    if (!(c.gas.length > 0)) { problems.push_back("L must be positive"); }
    if (!(c.gas.period > 0)) { problems.push_back("P must be positive"); }

    if (friction_kind == "constant") {
      double const claim = c.friction.c0_claimed;
      c.friction = FrictionSpec<double>::constant(friction_value);
      if (friction_c0_given) { c.friction.c0_claimed = claim; }
      if (!friction_terms.empty()) { problems.push_back("friction.terms requires friction.kind = trig_series"); }
    } else if (friction_kind == "trig_series") {
      double const claim = c.friction.c0_claimed;
      if (friction_terms.empty()) { problems.push_back("friction.kind = trig_series needs friction.terms"); }
      c.friction = FrictionSpec<double>::series(friction_terms,
                                                friction_c0_given ? claim
                                                                  : series_c1_bound(friction_terms, c.gas.length,
                                                                                    c.gas.period));
    } else {
      problems.push_back("friction.kind must be 'constant' or 'trig_series', got '" + friction_kind + "'");
    }

    if (!std::isfinite(eps) || eps < 0) { problems.push_back("boundary.eps must be a finite non-negative number"); }
    c.boundary = BoundaryData<double>::from_shape(shape1, shape2, eps);

    if (c.grid.nt < 16) { problems.push_back("grid.nt must be at least 16"); }
    if (c.grid.nx < 16) { problems.push_back("grid.nx must be at least 16"); }
    if (!(c.grid.cfl > 0 && c.grid.cfl <= 0.95)) { problems.push_back("grid.cfl must satisfy 0 < cfl <= 0.95"); }
    if (!(c.solver.tol_fp > 0)) { problems.push_back("solver.tol_fp must be positive"); }
    if (c.solver.max_iter < 1) { problems.push_back("solver.max_iter must be at least 1"); }
    if (c.solver.threads < 1) { problems.push_back("solver.threads must be at least 1"); }
    if (c.stability.windows < 1) { problems.push_back("stability.K must be at least 1"); }
    if (!std::isfinite(c.stability.amplitude)) { problems.push_back("stability.amplitude must be finite"); }

    if (mode == "dirichlet") {
      c.stability.mode.kind = BoundaryKind::dirichlet;
    } else if (mode == "reflective") {
      c.stability.mode.kind = BoundaryKind::reflective;
    } else {
      problems.push_back("stability.mode must be 'dirichlet' or 'reflective', got '" + mode + "'");
    }
    if (!(std::abs(c.stability.mode.K1) < 1)) {
      problems.push_back("stability.K1 out of range: |K1| < 1 required, got " + std::to_string(c.stability.mode.K1));
    }
    if (!(std::abs(c.stability.mode.K2) < 1)) {
      problems.push_back("stability.K2 out of range: |K2| < 1 required, got " + std::to_string(c.stability.mode.K2));
    }
    if (c.output.snapshot_every < 0) { problems.push_back("output.snapshot_every must be non-negative"); }
    if (c.ibvp.duration < 0) { problems.push_back("ibvp.duration must be non-negative"); }
    if (c.convergence.base < 16) { problems.push_back("convergence.base must be at least 16"); }
    if (c.convergence.levels < 2) { problems.push_back("convergence.levels must be at least 2"); }
  }
};

} // namespace

ConfigError::ConfigError(std::vector<std::string> list)
  : std::runtime_error(join(list)), problems(std::move(list))
{
}

StabilityConfig<double> SimulationConfig::stability_config() const
{
  StabilityConfig<double> s;
  s.gas = gas;
  s.friction = friction;
  s.boundary = boundary;
  s.grid = grid_size();
  s.solver = periodic_options();
  s.amplitude = perturbation_amplitude();
  s.windows = stability.windows;
  s.mode = stability.mode;
  s.cfl = grid.cfl;
  return s;
}

SimulationConfig default_config()
{
  SimulationConfig c;
  c.boundary = BoundaryData<double>::from_shape(TrigSeries<double>{0, {}, {1.0}}, TrigSeries<double>{0, {1.0}, {}}, 0.01);
  return c;
}

SimulationConfig parse_config(std::string_view text)
{
  Parser p;
  p.parse(text);
  if (!p.problems.empty()) { throw ConfigError(std::move(p.problems)); }
  return p.cfg;
}

SimulationConfig load_config(std::string const &path)
{
  std::ifstream in(path);
  if (!in) { throw ConfigError({"cannot open config file '" + path + "'"}); }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

} // namespace pipeflow::io
