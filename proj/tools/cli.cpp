#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "bhc/families.hpp"
#include "bhc/report.hpp"
#include "bhc/residuals.hpp"
#include "bhc/solver.hpp"

namespace bhc::cli {

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GridOptions {
  std::size_t points = 200;
  double radius = 5.0;
  double exclusion = 0.05;
  std::uint64_t seed = 0;

  GridSpec spec() const { return {points, radius, exclusion, seed}; }
};

void add_grid_options(CLI::App* app, GridOptions& g) {
  app->add_option("--points", g.points, "Verification grid size")->capture_default_str();
  app->add_option("--radius", g.radius, "Grid ball radius")->capture_default_str();
  app->add_option("--exclusion", g.exclusion, "Distance kept from singular points")->capture_default_str();
  app->add_option("--seed", g.seed, "Quasi-random sequence offset")->capture_default_str();
}

struct OutputOptions {
  std::string path;
  std::string format = "json";
};

void add_output_options(CLI::App* app, OutputOptions& o) {
  app->add_option("--output,-o", o.path, "Output file (default: standard output)");
  app->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
}

/// Writes to the named file, or to `fallback` when the path is empty.
template <class F>
void emit(const std::string& path, std::ostream& fallback, F&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open output file '" + path + "'");
  write(f);
}

Vec4 parse_vec4(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (used != item.size()) throw UsageError("bad coordinate '" + item + "'");
    v.push_back(x);
  }
  if (v.size() != 4) throw UsageError("expected four comma-separated coordinates, got '" + s + "'");
  return {v[0], v[1], v[2], v[3]};
}

MobiusTransform parse_transform(const std::string& s) {
  if (s == "identity") return MobiusTransform::identity();
  if (s == "inversion") return MobiusTransform::inversion();
  try {
    return MobiusTransform::parse(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

MetricPairing parse_pairing_or_throw(const std::string& s) {
  const auto p = parse_pairing(s);
  if (!p) throw UsageError("unknown pairing '" + s + "' (flat-flat, flat-sphere, sphere-flat, sphere-sphere)");
  return *p;
}

/// Every option given on the effective command line; the last occurrence wins.
std::map<std::string, std::string> effective_options(const CLI::App* app) {
  std::map<std::string, std::string> kv;
  for (const CLI::Option* o : app->get_options()) {
    if (o->count() == 0 || o->results().empty()) continue;
    const std::string name = o->get_single_name();
    if (name == "help" || name == "print-config" || name == "config") continue;
    kv[name] = o->results().back();
  }
  return kv;
}

std::string effective_config(const CLI::App* app) {
  std::string out;
  for (const auto& [k, v] : effective_options(app)) out += k + "=" + v + "\n";
  return out;
}

Json config_json(const CLI::App* app) {
  Json j = Json::object();
  for (const auto& [k, v] : effective_options(app)) j[k] = v;
  return j;
}

// --- verify -------------------------------------------------------------------

struct VerifyOptions {
  std::string family;
  std::string equation = "eq4d";
  double alpha = -1.0;
  double delta = 1.0;
  std::string center = "0,0,0,0";
  std::string transform = "identity";
  std::string pairing = "flat-sphere";
  std::string domain;
  double a = 0.0, A = 0.0, R_h = 0.0;
  CLI::Option *a_opt = nullptr, *A_opt = nullptr, *Rh_opt = nullptr;
  bool perturb = false;
  double tol = kResidualTol;
  GridOptions grid;
  OutputOptions out;
  std::string csv;
};

struct ResolvedFamily {
  ScalarField4 field;
  double a = 0.0;
  std::optional<double> A;
  std::optional<double> R_h;
  bool spherical = false;
};

ResolvedFamily resolve_family(const VerifyOptions& o) {
  if (o.family == "bubble") {
    if (!(o.delta > 0.0)) throw UsageError("--delta must be positive");
    return {bubble_field<4>(o.delta, parse_vec4(o.center)), 0.0, -2.0, 12.0, false};
  }
  if (o.family == "mobius") {
    const auto T = parse_transform(o.transform);
    const auto P = parse_pairing_or_throw(o.pairing);
    if (!(T.alpha > 0.0)) throw UsageError("mobius family needs alpha > 0");
    ResolvedFamily r{mobius_conformal_factor(T, P), 0.0, std::nullopt, std::nullopt, P.domain == MetricKind::spherical};
    if (r.spherical) r.a = 3.0;
    if (P == MetricPairing::flat_flat()) r.A = 0.0;
    if (P == MetricPairing::flat_sphere()) r.A = -2.0;
    return r;
  }
  const auto name = parse_classical(o.family);
  if (!name)
    throw UsageError("unknown family '" + o.family +
                     "' (inverse_radius, poincare_ball, sphere_identity, power_alpha, harmonic_inversion, bubble, "
                     "mobius)");
  auto ex = classical_example(*name, o.alpha);
  return {ex.field, ex.a, ex.A, ex.R_h, ex.domain.kind() == ConformalMetric::Kind::spherical};
}

int cmd_verify(const VerifyOptions& o, const CLI::App* app, std::ostream& out) {
  const auto eq = parse_equation(o.equation);
  if (!eq || *eq == Equation::isoparametric)
    throw UsageError("unknown equation '" + o.equation + "' (bfo, sf, eq4d, curvature_law)");
  ResolvedFamily fam = resolve_family(o);
  if (!o.domain.empty()) {
    if (o.domain != "flat" && o.domain != "sphere") throw UsageError("--domain must be flat or sphere");
    fam.spherical = o.domain == "sphere";
    if (!o.a_opt->count()) fam.a = fam.spherical ? 3.0 : 0.0;
  }
  SweepParams p;
  p.a = o.a_opt->count() ? o.a : fam.a;
  if (o.A_opt->count())
    p.A = o.A;
  else if (fam.A)
    p.A = *fam.A;
  else if (*eq == Equation::eq4d || *eq == Equation::curvature_law)
    throw UsageError("family '" + o.family + "' declares no constant A; pass --A");
  if (o.Rh_opt->count()) p.R_h = o.R_h;
  p.domain = fam.spherical ? ConformalMetric::spherical() : ConformalMetric::flat();
  ScalarField4 field = o.perturb ? product(fam.field, perturbation_multiplier()) : fam.field;

  const GridSpec grid = o.grid.spec();
  std::vector<Point4> pts;
  try {
    pts = verification_grid(field, grid);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  ResidualReport r;
  try {
    r = residual_sweep(*eq, field, p, pts, grid);
  } catch (const UnsupportedError& e) {
    throw UsageError(e.what());
  }

  Json j;
  j["command"] = "verify";
  j["family"] = o.family;
  j["field"] = field.name();
  j["perturbed"] = o.perturb;
  j.update(to_json(r, o.tol));
  j["config"] = config_json(app);
  if (!o.csv.empty()) emit(o.csv, out, [&](std::ostream& s) { write_per_point_csv(s, r); });
  emit(o.out.path, out, [&](std::ostream& s) {
    if (o.out.format == "csv")
      write_per_point_csv(s, r);
    else
      s << dump_pretty(j);
  });
  return r.sup < o.tol && r.n_points() > 0 ? kExitOk : kExitResidual;
}

// --- mobius-audit -------------------------------------------------------------

struct AuditCliOptions {
  std::string transform = "identity";
  std::string pairing;
  bool all_pairings = false;
  std::size_t random = 0;
  bool isometries = false;
  GridOptions grid;
  OutputOptions out;
};

constexpr double kNormalFormTol = 1e-10;

double normal_form_error(const MobiusTransform& T, std::mt19937_64& rng) {
  const NormalForm nf = mobius_normal_form(T);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double err = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Point4 x{u(rng), u(rng), u(rng), u(rng)};
    if (T.eps == 2 && norm(x - T.t_in) < 1e-6) continue;
    err = std::fmax(err, std::fabs(nf(x) - flat_sphere_factor_expanded(T, x)));
  }
  return err;
}

int cmd_audit(const AuditCliOptions& o, const CLI::App* app, std::ostream& out) {
  std::vector<MetricPairing> pairings;
  if (o.all_pairings) {
    pairings.assign(std::begin(kAllPairings), std::end(kAllPairings));
  } else {
    if (o.pairing.empty()) throw UsageError("pass --pairing or --all-pairings");
    pairings.push_back(parse_pairing_or_throw(o.pairing));
  }
  AuditOptions ao;
  ao.points = o.grid.points;
  ao.seed = o.grid.seed;
  ao.flat_radius = o.grid.radius;
  ao.exclusion = o.grid.exclusion;
  std::mt19937_64 rng(o.grid.seed);
  std::mt19937_64 check_rng(o.grid.seed + 1);

  Json rows = Json::array(), cells = Json::array();
  bool ok = true;
  const auto audit_one = [&](const MobiusTransform& T, MetricPairing P) {
    const Verdict v = classify_mobius(T, P, ao);
    Json row;
    row["pairing"] = to_string(P);
    row["eps"] = T.eps;
    row["transform"] = T.to_literal();
    row.update(to_json(v));
    bool row_ok = v.corroborated();
    if (P == MetricPairing::flat_sphere()) {
      const double e = normal_form_error(T, check_rng);
      row["normal_form_error"] = e;
      row_ok = row_ok && e < kNormalFormTol;
    }
    row["ok"] = row_ok;
    ok = ok && row_ok;
    rows.push_back(row);
    return v.classification;
  };

  if (o.random == 0) {
    const auto T = parse_transform(o.transform);
    for (const auto& P : pairings) audit_one(T, P);
  } else {
    for (const auto& P : pairings) {
      for (int eps : {0, 2}) {
        std::map<std::string, std::size_t> tally;
        for (std::size_t i = 0; i < o.random; ++i) {
          const auto T = o.isometries ? random_sphere_isometry(rng, eps) : random_mobius(rng, eps);
          tally[std::string(to_string(audit_one(T, P)))]++;
        }
        Json c;
        c["pairing"] = to_string(P);
        c["eps"] = eps;
        c["count"] = o.random;
        c["uniform"] = tally.size() == 1;
        c["verdict"] = tally.size() == 1 ? tally.begin()->first : std::string("mixed");
        ok = ok && tally.size() == 1;
        cells.push_back(c);
      }
    }
  }

  Json j;
  j["command"] = "mobius-audit";
  j["grid"] = grid_json(o.grid.spec());
  j["ok"] = ok;
  if (!cells.empty()) j["cells"] = cells;
  j["rows"] = rows;
  j["config"] = config_json(app);
  emit(o.out.path, out, [&](std::ostream& s) {
    if (o.out.format == "json") {
      s << dump_pretty(j);
      return;
    }
    s << "pairing,eps,verdict,numerical,bfo_sup,tension_max,factor_range,delta,e\n";
    for (const auto& r : rows) {
      const auto& e = r["evidence"];
      s << r["pairing"].get<std::string>() << ',' << r["eps"].dump() << ',' << r["verdict"].get<std::string>() << ','
        << r["numerical"].get<std::string>() << ',' << e["bfo_sup"].dump() << ',' << e["tension_max"].dump() << ','
        << e["factor_range"].dump() << ',';
      if (r.contains("normal_form")) {
        s << r["normal_form"]["delta"].dump() << ",\"";
        const auto& ev = r["normal_form"]["e"];
        for (std::size_t i = 0; i < 4; ++i) s << (i ? "," : "") << ev[i].dump();
        s << '"';
      } else {
        s << ',';
      }
      s << '\n';
    }
  });
  return ok ? kExitOk : kExitResidual;
}

// --- solve / sweep ---------------------------------------------------------------

struct SolveOptions {
  double v0 = 2.0, rmax = 10.0;
  std::size_t radial_N = 1000;
  double k = 3.0;
  std::string init = "constant";
  int ell = 2;
  double eta = 0.1;
  std::size_t s4_N = kS4DefaultN;
  double s4_tol = kS4DefaultTol;
  double torus_a = 0.0, torus_A = 0.0, mean = 1.0, ripple = 0.3;
  std::size_t torus_N = kTorusDefaultN;
  double torus_tol = 1e-10;
  OutputOptions out;
};

void write_profile(const OutputOptions& o, std::ostream& out, const Json& full, const RadialProfile& p) {
  if (o.path.empty()) return;
  emit(o.path, out, [&](std::ostream& s) {
    if (o.format == "csv")
      write_profile_csv(s, p);
    else
      s << dump_pretty(full);
  });
}

int cmd_solve_radial(const SolveOptions& o, std::ostream& out) {
  RadialSolution s;
  try {
    s = solve_radial_r4(o.v0, o.rmax, o.radial_N);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  Json line;
  line["command"] = "solve";
  line["kind"] = "radial";
  line["v0"] = o.v0;
  line["r_max"] = o.rmax;
  line["N"] = o.radial_N;
  line["residual"] = s.profile.residual_sup;
  line["residual_sci"] = sci(s.profile.residual_sup);
  line["delta"] = s.delta;
  line["bubble_error"] = s.bubble_error;
  line["bubble_error_sci"] = sci(s.bubble_error);
  line["far_field_defect"] = s.far_field_defect;
  out << dump_line(line) << '\n';
  write_profile(o.out, out, to_json(s), s.profile);
  return kExitOk;
}

int cmd_solve_s4(const SolveOptions& o, std::ostream& out) {
  if (!(o.k > 0.0)) throw UsageError("--k must be positive");
  std::function<double(double)> init;
  if (o.init == "constant")
    init = [k = o.k](double) { return std::sqrt(k); };
  else
    init = [k = o.k, ell = o.ell, eta = o.eta](double t) { return std::sqrt(k) + eta * zonal_mode(ell, t); };
  const BranchPoint b = solve_s4(o.k, init, o.s4_N, o.s4_tol);
  Json line = Json{{"command", "solve"}, {"kind", "s4"}, {"init", o.init}};
  line.update(summary_json(b));
  out << dump_line(line) << '\n';
  write_profile(o.out, out, to_json(b.profile), b.profile);
  return kExitOk;
}

int cmd_solve_torus(const SolveOptions& o, std::ostream& out) {
  if (!(o.mean - std::fabs(o.ripple) > 0.0)) throw UsageError("initial profile mean +- ripple must stay positive");
  TorusResult t;
  try {
    t = solve_torus(o.torus_a, o.torus_A, [&](double th) { return o.mean + o.ripple * std::sin(th); }, o.torus_N,
                    o.torus_tol);
  } catch (const UnsupportedError& e) {
    throw UsageError(e.what());
  }
  Json line;
  line["command"] = "solve";
  line["kind"] = "torus";
  line["A"] = o.torus_A;
  line["converged"] = t.converged;
  line["status"] = t.status;
  line["residual"] = t.profile.residual_sup;
  line["residual_sci"] = sci(t.profile.residual_sup);
  line["multiplier"] = t.multiplier;
  line["obstruction"] = t.obstruction;
  double min_cube = std::numeric_limits<double>::infinity();
  for (const auto& h : t.history) min_cube = std::fmin(min_cube, std::fabs(h.cube_integral));
  line["min_abs_cube_integral"] = min_cube;
  line["iterations"] = t.profile.iterations;
  out << dump_line(line) << '\n';
  write_profile(o.out, out, to_json(t), t.profile);
  return t.converged ? kExitOk : kExitSolver;
}

struct SweepOptions {
  int ell = 2;
  double k_from = 5.05, k_to = 6.0;
  std::size_t steps = 20;
  std::size_t N = kS4DefaultN;
  double tol = kS4DefaultTol;
  std::string output;
};

int cmd_sweep(const SweepOptions& o, std::ostream& out, std::ostream& err) {
  if (o.ell < 1) throw UsageError("--ell must be >= 1");
  if (o.steps < 1) throw UsageError("--steps must be >= 1");
  ContinuationOptions co;
  co.N = o.N;
  co.tol = o.tol;
  BranchRun run;
  try {
    run = continue_branch(o.ell, o.k_from, o.k_to, o.steps, co);
  } catch (const BranchError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  emit(o.output, out, [&](std::ostream& s) {
    for (const auto& p : run.points) s << dump_line(summary_json(p)) << '\n';
  });
  Json summary;
  summary["command"] = "sweep";
  summary["ell"] = o.ell;
  summary["k_from"] = o.k_from;
  summary["k_to"] = o.k_to;
  summary["steps"] = o.steps;
  summary["points"] = run.points.size();
  summary["status"] = to_string(run.status);
  summary["message"] = run.message;
  summary["seed_eta"] = run.seed_eta;
  if (!run.points.empty()) {
    summary["k_explored"] = Json::array({run.points.front().k, run.points.back().k});
  }
  (o.output.empty() ? err : out) << dump_line(summary) << '\n';
  const bool ok = run.status == BranchStatus::completed || run.status == BranchStatus::reached_target;
  return ok ? kExitOk : kExitSolver;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// Pulls --config out of the arguments and splices its entries in right after
// the subcommand names, so explicit flags (which come later) win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (!path) return args;
  std::vector<std::string> injected;
  try {
    injected = config_arguments(read_file(*path));
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::size_t pos = 0;
  if (!args.empty() && args[0].rfind("-", 0) != 0) {
    pos = 1;
    if ((args[0] == "solve" || args[0] == "sweep") && args.size() > 1 && args[1].rfind("-", 0) != 0) pos = 2;
  }
  args.insert(args.begin() + static_cast<std::ptrdiff_t>(pos), injected.begin(), injected.end());
  return args;
}

}  // namespace

std::vector<std::string> config_arguments(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  const auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "config") throw std::invalid_argument("config files cannot include other config files");
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

std::string canonical_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  for (const auto& arg : config_arguments(text)) {
    const auto start = arg.find_first_not_of('-');
    const auto eq = arg.find('=');
    kv[arg.substr(start, eq - start)] = arg.substr(eq + 1);
  }
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Biharmonic conformal maps: residual verification, Moebius audit and reduced-equation solvers", "bhc"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  bool print_config = false;

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "Residual sweep of a closed-form conformal factor");
  verify->add_option("--family", vo.family, "Field family")->required();
  verify->add_option("--equation", vo.equation, "bfo | sf | eq4d | curvature_law")->capture_default_str();
  verify->add_option("--alpha", vo.alpha, "Exponent for power_alpha")->capture_default_str();
  verify->add_option("--delta", vo.delta, "Bubble scale")->capture_default_str();
  verify->add_option("--center", vo.center, "Bubble center x1,x2,x3,x4")->capture_default_str();
  verify->add_option("--transform", vo.transform, "Moebius literal, 'identity' or 'inversion'")->capture_default_str();
  verify->add_option("--pairing", vo.pairing, "Metric pairing of the mobius family")->capture_default_str();
  verify->add_option("--domain", vo.domain, "flat | sphere (default: the family's)");
  vo.a_opt = verify->add_option("--a", vo.a, "Einstein constant of the domain");
  vo.A_opt = verify->add_option("--A", vo.A, "Constant A of the reduced equation");
  vo.Rh_opt = verify->add_option("--Rh", vo.R_h, "Codomain scalar curvature for curvature_law");
  verify->add_flag("--perturb", vo.perturb, "Multiply by 1 + 0.1 x1^2/(1+|x|^2)");
  verify->add_option("--tol", vo.tol, "Pass threshold on the sup norm")->capture_default_str();
  verify->add_option("--csv", vo.csv, "Also write per-point residuals to this CSV file");
  add_grid_options(verify, vo.grid);
  add_output_options(verify, vo.out);

  AuditCliOptions ao;
  auto* audit = app.add_subcommand("mobius-audit", "Classify Moebius transformations for each metric pairing");
  audit->add_option("--transform", ao.transform, "Moebius literal, 'identity' or 'inversion'")->capture_default_str();
  audit->add_option("--pairing", ao.pairing, "flat-flat | flat-sphere | sphere-flat | sphere-sphere");
  audit->add_flag("--all-pairings", ao.all_pairings, "Audit all four pairings");
  audit->add_option("--random", ao.random, "Random transforms per (pairing, eps) cell");
  audit->add_flag("--isometries", ao.isometries, "Draw random sphere isometries instead of generic transforms");
  add_grid_options(audit, ao.grid);
  add_output_options(audit, ao.out);

  SolveOptions so;
  auto* solve = app.add_subcommand("solve", "Solve the reduced equation in one symmetry class");
  solve->require_subcommand(1);
  auto* radial = solve->add_subcommand("radial", "Radial bubble on R^4");
  radial->add_option("--v0", so.v0, "Center value")->capture_default_str();
  radial->add_option("--rmax", so.rmax, "Outer radius")->capture_default_str();
  radial->add_option("-N,--intervals", so.radial_N, "Grid intervals")->capture_default_str();
  add_output_options(radial, so.out);
  auto* s4 = solve->add_subcommand("s4", "Axisymmetric -Delta u + k u = u^3 on S^4");
  s4->add_option("--k", so.k, "Potential k")->required();
  s4->add_option("--init", so.init, "constant | mode")->check(CLI::IsMember({"constant", "mode"}))->capture_default_str();
  s4->add_option("--ell", so.ell, "Zonal mode of the mode initializer")->capture_default_str();
  s4->add_option("--eta", so.eta, "Amplitude of the mode initializer")->capture_default_str();
  s4->add_option("-N,--intervals", so.s4_N, "Grid intervals")->capture_default_str();
  s4->add_option("--tol", so.s4_tol, "Newton tolerance (sup norm)")->capture_default_str();
  add_output_options(s4, so.out);
  auto* torus = solve->add_subcommand("torus", "Periodic l'' = A l^3 on a flat torus");
  torus->add_option("--A", so.torus_A, "Constant A")->capture_default_str();
  torus->add_option("--a", so.torus_a, "Einstein constant (must be 0)")->capture_default_str();
  torus->add_option("--mean", so.mean, "Initial mean")->capture_default_str();
  torus->add_option("--ripple", so.ripple, "Initial sin(theta) amplitude")->capture_default_str();
  torus->add_option("-N,--intervals", so.torus_N, "Grid nodes")->capture_default_str();
  torus->add_option("--tol", so.torus_tol, "Newton tolerance (sup norm)")->capture_default_str();
  add_output_options(torus, so.out);

  SweepOptions wo;
  auto* sweep = app.add_subcommand("sweep", "Parameter sweeps");
  sweep->require_subcommand(1);
  auto* branch = sweep->add_subcommand("s4-branch", "Continue the branch bifurcating at k_l");
  branch->add_option("--ell", wo.ell, "Mode number")->capture_default_str();
  branch->add_option("--k-from", wo.k_from, "Start of the continuation")->capture_default_str();
  branch->add_option("--k-to", wo.k_to, "Target k")->capture_default_str();
  branch->add_option("--steps", wo.steps, "Number of branch points")->capture_default_str();
  branch->add_option("-N,--intervals", wo.N, "Grid intervals")->capture_default_str();
  branch->add_option("--tol", wo.tol, "Newton tolerance (sup norm)")->capture_default_str();
  branch->add_option("--output,-o", wo.output, "JSON-lines file (default: standard output)");

  for (auto* leaf : {verify, audit, radial, s4, torus, branch})
    leaf->add_flag("--print-config", print_config, "Print the effective key=value config and exit");

  try {
    args = expand_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    // A subcommand's help request surfaces here too.
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "bhc: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "bhc: " << e.what() << '\n';
    return kExitUsage;
  }

  const CLI::App* leaf = &app;
  while (!leaf->get_subcommands().empty()) leaf = leaf->get_subcommands().front();
  if (print_config) {
    out << effective_config(leaf);
    return kExitOk;
  }

  try {
    if (leaf == verify) return cmd_verify(vo, leaf, out);
    if (leaf == audit) return cmd_audit(ao, leaf, out);
    if (leaf == radial) return cmd_solve_radial(so, out);
    if (leaf == s4) return cmd_solve_s4(so, out);
    if (leaf == torus) return cmd_solve_torus(so, out);
    if (leaf == branch) return cmd_sweep(wo, out, err);
  } catch (const UsageError& e) {
    err << "bhc: " << e.what() << '\n';
    return kExitUsage;
  } catch (const SolverError& e) {
    Json diag;
    diag["error"] = e.what();
    diag["iterations"] = e.iterations();
    diag["residual"] = e.residual();
    if (!e.last_iterate().empty()) {
      const auto& v = e.last_iterate();
      diag["last_min"] = *std::min_element(v.begin(), v.end());
      diag["last_max"] = *std::max_element(v.begin(), v.end());
    }
    err << "bhc: solver failure " << dump_line(diag) << '\n';
    return kExitSolver;
  } catch (const std::invalid_argument& e) {
    err << "bhc: " << e.what() << '\n';
    return kExitUsage;
  }
  err << "bhc: no command\n";
  return kExitUsage;
}

}  // namespace bhc::cli
