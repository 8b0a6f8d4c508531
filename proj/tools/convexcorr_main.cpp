// Batch front door: define instances in a JSON config, run solves, curves,
// coercivity analyses and verification suites, emit machine-readable reports.
//
// Exit codes: 0 ok, 2 config error, 3 convergence failure, 4 property failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "convexcorr/convexcorr.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace convexcorr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitProperty = 4;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Vector to_vector(const json& arr) {
  if (!arr.is_array()) throw ConfigError("expected a numeric array");
  Vector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  return v;
}

Matrix to_matrix(const json& rows) {
  if (!rows.is_array() || rows.empty() || !rows[0].is_array())
    throw ConfigError("expected a matrix as nested arrays (row-major)");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw ConfigError("ragged matrix rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j].get<double>();
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json basis_to_json(const Subspace& s) {
  json arr = json::array();
  for (Eigen::Index j = 0; j < s.dim(); ++j) arr.push_back(vector_to_json(s.basis().col(j)));
  return arr;
}

/// Subspace from either a coordinate index list or an explicit basis
/// ("<key>": [0,2]  or  "<key>_basis": [[...], ...] as columns).
Subspace parse_subspace(const json& instance, const std::string& key, Eigen::Index ambient) {
  std::string basis_key = key + "_basis";
  if (instance.contains(basis_key)) {
    const json& cols = instance.at(basis_key);
    if (!cols.is_array()) throw ConfigError(basis_key + " must be an array of columns");
    if (cols.empty()) return Subspace::trivial(ambient);
    Matrix b(ambient, static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
      Vector col = to_vector(cols[j]);
      if (col.size() != ambient) throw ConfigError(basis_key + ": column has wrong length");
      b.col(static_cast<Eigen::Index>(j)) = col;
    }
    return Subspace::span_of(b);
  }
  if (!instance.contains(key)) return Subspace::trivial(ambient);
  std::vector<int> idx;
  for (const auto& e : instance.at(key)) idx.push_back(e.get<int>());
  if (idx.empty()) return Subspace::trivial(ambient);
  return Subspace::coordinate_span(ambient, idx);
}

BuiltinFn parse_builtin(const json& spec) {
  std::string name = spec.at("name").get<std::string>();
  std::vector<double> params;
  if (spec.contains("params"))
    for (const auto& p : spec.at("params")) params.push_back(p.get<double>());
  return make_builtin(name, params);
}

ProblemInstance parse_instance(const json& cfg) {
  if (!cfg.contains("instance")) throw ConfigError("config needs an 'instance' section");
  const json& inst = cfg.at("instance");
  Matrix l = to_matrix(inst.at("L"));
  const Eigen::Index ambient = l.cols();
  Subspace x1 = parse_subspace(inst, "X1", ambient);
  Subspace x2 = parse_subspace(inst, "X2", ambient);
  Subspace x3 = parse_subspace(inst, "X3", ambient);
  if (x1.is_trivial() && !inst.contains("X1") && !inst.contains("X1_basis"))
    x1 = Subspace::full(ambient);
  BuiltinFn phi = parse_builtin(inst.at("phi"));
  Vector minimizer;
  if (inst.contains("phi_minimizer"))
    minimizer = to_vector(inst.at("phi_minimizer"));
  else if (phi.minimizer)
    minimizer = *phi.minimizer;
  else
    throw ConfigError("instance phi has no canonical minimizer; give 'phi_minimizer'");
  NormPair np = NormPair::from_name(inst.at("norm").get<std::string>());
  StructuredPhi sp(x1, x2, x3, phi.fn, minimizer);
  return ProblemInstance(sp, LinearMap(std::move(l)), np);
}

SolverOptions parse_options(const json& cfg, unsigned seed_override, bool seed_given,
                            double tol_override) {
  SolverOptions opts;
  if (cfg.contains("tolerances")) {
    const json& t = cfg.at("tolerances");
    if (t.contains("cert_tol")) opts.cert_tol = t.at("cert_tol").get<double>();
    if (t.contains("nullspace_tol")) opts.nullspace_tol = t.at("nullspace_tol").get<double>();
    if (opts.cert_tol <= 0.0 || opts.nullspace_tol <= 0.0)
      throw ConfigError("tolerances must be positive");
  }
  if (cfg.contains("max_iter")) opts.max_iter = cfg.at("max_iter").get<int>();
  if (cfg.contains("seed")) opts.seed = cfg.at("seed").get<unsigned>();
  if (seed_given) opts.seed = seed_override;
  if (tol_override > 0.0) opts.cert_tol = tol_override;
  return opts;
}

json residuals_to_json(const Residuals& r) {
  return json{{"primal_feas", r.primal_feas},
              {"dual_membership_phi", r.dual_membership_phi},
              {"dual_membership_psi", r.dual_membership_psi},
              {"max", r.max_residual()}};
}

json report_envelope(const std::string& config_hash, const SolverOptions& opts) {
  return json{{"version", kVersion},
              {"config_hash", config_hash},
              {"tolerances",
               {{"cert_tol", opts.cert_tol},
                {"nullspace_tol", opts.nullspace_tol},
                {"feas_tol", kFeasTol},
                {"rank_tol", kRankTol}}},
              {"seed", opts.seed}};
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("failed to write " + path.string());
}

// ---------------------------------------------------------------- solve ----

int cmd_solve(const json& cfg, const fs::path& outdir, const SolverOptions& opts,
              const std::string& config_hash) {
  ProblemInstance pi = parse_instance(cfg);
  if (!cfg.contains("solve")) throw ConfigError("config needs a 'solve' section");
  const json& sv = cfg.at("solve");
  std::vector<double> taus, lambdas;
  if (sv.contains("tau"))
    for (const auto& t : sv.at("tau")) taus.push_back(t.get<double>());
  if (sv.contains("lambda"))
    for (const auto& l : sv.at("lambda")) lambdas.push_back(l.get<double>());
  if (taus.empty() && lambdas.empty())
    throw ConfigError("solve section needs 'tau' and/or 'lambda' lists");

  Thresholds th = compute_thresholds(pi, opts);
  bool all_converged = true;
  json records = json::array();

  auto oracle_interval = [&](double lambda) -> json {
    if (pi.ambient_dim() != 1) return nullptr;
    Caps caps;
    caps.proper = false;
    ProblemInstance local = pi;
    ConvexFn obj(
        1, [local, lambda](const Vector& x) { return local.penalized_objective(x, lambda); },
        caps, pi.phi().canonical_minimizer());
    Vector lo(1), hi(1);
    double center = pi.phi().canonical_minimizer()(0);
    lo(0) = std::min(0.0, center) - 4.0;
    hi(0) = std::max(0.0, center) + 4.0;
    const double grid = 1e-3;
    ArgminSet s = brute_force_argmin(obj, lo, hi, grid, 1e-9);
    bool non_unique = s.rep != ArgminSet::Rep::Singleton && (s.hi - s.lo) > 3.0 * grid;
    json j{{"non_unique_argmin", non_unique}, {"grid_step", grid}};
    if (s.rep == ArgminSet::Rep::Interval1d) {
      j["interval"] = {s.lo, s.hi};
    } else {
      j["representative"] = vector_to_json(s.representative());
    }
    return j;
  };

  for (double tau : taus) {
    SolveReport rc = solve_constrained(pi, tau, opts);
    SolveReport rd = solve_dual_penalized(pi, tau, opts);
    all_converged = all_converged && rc.converged && rd.converged;
    RegimeLabel label = classify_regime(pi, th, RegimeLabel::Param::Tau, tau);
    records.push_back(json{{"kind", "constrained"},
                           {"tau", tau},
                           {"minimizer", vector_to_json(rc.minimizer)},
                           {"objective", rc.objective},
                           {"lx_norm", rc.lx_norm},
                           {"lambda_of_dual", rd.dual_norm},
                           {"residuals", residuals_to_json(rc.residuals)},
                           {"iterations", rc.iterations},
                           {"converged", rc.converged && rd.converged},
                           {"regime", label.zone_name()},
                           {"containment", label.containment}});
  }
  for (double lambda : lambdas) {
    SolveReport rp = solve_penalized(pi, lambda, opts);
    all_converged = all_converged && rp.converged;
    RegimeLabel label = classify_regime(pi, th, RegimeLabel::Param::Lambda, lambda);
    json rec{{"kind", "penalized"},
             {"lambda", lambda},
             {"minimizer", vector_to_json(rp.minimizer)},
             {"objective", rp.objective},
             {"lx_norm", rp.lx_norm},
             {"dual_norm", rp.dual_norm},
             {"residuals", residuals_to_json(rp.residuals)},
             {"iterations", rp.iterations},
             {"converged", rp.converged},
             {"regime", label.zone_name()},
             {"containment", label.containment}};
    json oracle = oracle_interval(lambda);
    if (!oracle.is_null()) rec["argmin_oracle"] = oracle;
    records.push_back(std::move(rec));
  }

  json doc = report_envelope(config_hash, opts);
  doc["thresholds"] = {{"c", th.c}, {"d", th.d_finite() ? json(th.d) : json("inf")}};
  doc["records"] = std::move(records);
  write_text(outdir / "solve_report.json", doc.dump(2) + "\n");
  return all_converged ? kExitOk : kExitConvergence;
}

// ---------------------------------------------------------------- curve ----

int cmd_curve(const json& cfg, const fs::path& outdir, const SolverOptions& opts, int workers,
              const std::string& config_hash) {
  ProblemInstance pi = parse_instance(cfg);
  if (!cfg.contains("curve")) throw ConfigError("config needs a 'curve' section");
  const json& cv = cfg.at("curve");
  std::vector<double> taus;
  if (cv.contains("tau")) {
    for (const auto& t : cv.at("tau")) taus.push_back(t.get<double>());
  } else {
    double lo = cv.at("tau_min").get<double>();
    double hi = cv.at("tau_max").get<double>();
    int count = cv.at("count").get<int>();
    if (count < 3) throw ConfigError("curve needs at least 3 samples");
    for (int i = 0; i < count; ++i)
      taus.push_back(lo + (hi - lo) * i / static_cast<double>(count - 1));
  }
  if (taus.size() < 3) throw ConfigError("curve needs at least 3 samples");

  Thresholds th = compute_thresholds(pi, opts);
  CorrespondenceCurve curve = sample_curve(pi, taus, opts, workers, th);

  std::ostringstream csv;
  csv << "tau,lambda,primal_obj,dual_obj,max_residual\n";
  bool all_converged = true;
  for (const CurveSample& s : curve.samples) {
    all_converged = all_converged && s.converged;
    csv << format_double(s.tau) << ',' << format_double(s.lambda) << ','
        << format_double(s.primal_obj) << ',' << format_double(s.dual_obj) << ','
        << format_double(s.max_residual) << '\n';
  }
  write_text(outdir / "curve.csv", csv.str());

  json doc = report_envelope(config_hash, opts);
  doc["c"] = th.c;
  doc["d"] = th.d_finite() ? json(th.d) : json("inf");
  doc["monotone_decreasing"] = curve.lambdas_strictly_decreasing();
  doc["endpoints"] = {{"g_limit_at_zero", curve.extrapolated_d()},
                      {"g_near_c", curve.g_near_c()}};
  doc["samples"] = curve.samples.size();
  write_text(outdir / "curve_summary.json", doc.dump(2) + "\n");
  return all_converged ? kExitOk : kExitConvergence;
}

// ----------------------------------------------------------- coercivity ----

ConvexFn parse_part(const json& spec) { return parse_builtin(spec).fn; }

/// Lift a k-dim builtin to the ambient space through a coordinate selection.
ConvexFn lift_to_coords(const ConvexFn& f, Eigen::Index ambient, const std::vector<int>& coords) {
  if (static_cast<Eigen::Index>(coords.size()) != f.dim())
    throw ConfigError("whole: 'coords' length must match the function dimension");
  ConvexFn fc = f;
  std::vector<int> cs = coords;
  Caps caps = f.caps();
  Vector probe = Vector::Zero(ambient);
  for (std::size_t i = 0; i < cs.size(); ++i) probe(cs[i]) = f.probe_point()(static_cast<Eigen::Index>(i));
  return ConvexFn(
      ambient,
      [fc, cs](const Vector& x) {
        Vector sub(static_cast<Eigen::Index>(cs.size()));
        for (std::size_t i = 0; i < cs.size(); ++i) sub(static_cast<Eigen::Index>(i)) = x(cs[i]);
        return fc(sub);
      },
      caps, probe);
}

DecomposedFn parse_decomposed(const json& spec, Eigen::Index ambient) {
  Subspace s1 = parse_subspace(spec, "S1", ambient);
  Subspace s2 = parse_subspace(spec, "S2", ambient);
  ConvexFn part1 = parse_part(spec.at("part1"));
  ConvexFn part2 = parse_part(spec.at("part2"));
  const json& whole_spec = spec.at("whole");
  std::vector<int> coords;
  for (const auto& c : whole_spec.at("coords")) coords.push_back(c.get<int>());
  ConvexFn whole = lift_to_coords(parse_part(whole_spec), ambient, coords);
  return DecomposedFn(std::move(part1), std::move(s1), std::move(part2), std::move(s2),
                      std::move(whole));
}

int cmd_coercivity(const json& cfg, const fs::path& outdir, const SolverOptions& opts,
                   const std::string& config_hash) {
  if (!cfg.contains("coercivity")) throw ConfigError("config needs a 'coercivity' section");
  const json& cc = cfg.at("coercivity");
  std::string mode = cc.at("mode").get<std::string>();
  json doc = report_envelope(config_hash, opts);

  if (mode == "composite") {
    LinearMap h(to_matrix(cc.at("H")));
    LinearMap k(to_matrix(cc.at("K")));
    ConvexFn phi = parse_part(cc.at("phi"));
    ConvexFn psi = parse_part(cc.at("psi"));
    bool verdict = composite_coercive(h, k, phi, psi);
    doc["mode"] = "composite";
    doc["coercive"] = verdict;
    doc["stacked_normcoercive"] = verdict;
    write_text(outdir / "coercivity.json", doc.dump(2) + "\n");
    return kExitOk;
  }
  if (mode != "sum") throw ConfigError("coercivity mode must be 'sum' or 'composite'");

  Eigen::Index ambient = cc.at("dim").get<Eigen::Index>();
  DecomposedFn f = parse_decomposed(cc.at("F"), ambient);
  DecomposedFn g = parse_decomposed(cc.at("G"), ambient);
  CoercivityVerdict v = sum_coercivity(f, g);

  doc["mode"] = "sum";
  doc["status"] = v.certified() ? "certified_on" : "refused";
  doc["reason"] = v.reason;
  doc["flags"] = {{"orth1", v.orth1}, {"orth2", v.orth2}};
  if (v.family_base) {
    doc["family_base_basis"] = basis_to_json(*v.family_base);
    doc["family"] = "any complement of S2_F ∩ S2_G";
  }
  if (v.complement_representative)
    doc["complement_representative_basis"] = basis_to_json(*v.complement_representative);
  if (v.certified_on) doc["certified_basis"] = basis_to_json(*v.certified_on);

  // probe the sum F+G on shells, restricted to the emitted complement
  std::vector<double> radii{1.0, 2.0, 4.0, 8.0};
  int samples = 48;
  if (cc.contains("probe")) {
    radii.clear();
    for (const auto& r : cc.at("probe").at("radii")) radii.push_back(r.get<double>());
    if (cc.at("probe").contains("samples")) samples = cc.at("probe").at("samples").get<int>();
  }
  ConvexFn fw = f.whole();
  ConvexFn gw = g.whole();
  Caps sum_caps;
  sum_caps.proper = false;
  ConvexFn fg(
      ambient, [fw, gw](const Vector& x) {
        double a = fw(x), b = gw(x);
        return (a == kInf || b == kInf) ? kInf : a + b;
      },
      sum_caps, Vector::Zero(ambient));
  ProbeResult full_probe = coercivity_probe(fg, radii, samples, opts.seed);
  json probe_json{{"radii", radii},
                  {"shell_minima", full_probe.shell_minima},
                  {"verdict", full_probe.supported() ? "supported" : "witness"}};
  if (full_probe.witness_direction)
    probe_json["witness_direction"] = vector_to_json(*full_probe.witness_direction);
  doc["probe_full_space"] = probe_json;

  if (v.complement_representative && !v.complement_representative->is_trivial()) {
    ProbeResult restr =
        coercivity_probe(fg, radii, samples, opts.seed, v.complement_representative);
    doc["probe_complement"] = {{"shell_minima", restr.shell_minima},
                               {"verdict", restr.supported() ? "supported" : "witness"}};
  }
  write_text(outdir / "coercivity.json", doc.dump(2) + "\n");
  return kExitOk;
}

// --------------------------------------------------------------- verify ----

int cmd_verify(const json& cfg, const fs::path& outdir, const SolverOptions& opts,
               const std::string& config_hash) {
  ProblemInstance pi = parse_instance(cfg);
  if (!cfg.contains("verify")) throw ConfigError("config needs a 'verify' section");
  const json& vf = cfg.at("verify");
  if (pi.ambient_dim() > 2) throw ConfigError("verify runs on 1-d or 2-d instances only");

  json properties = json::array();
  bool all_ok = true;
  auto record = [&](const std::string& name, bool ok, json detail = {}) {
    all_ok = all_ok && ok;
    json p{{"property", name}, {"pass", ok}};
    if (!detail.is_null() && !detail.empty()) p["detail"] = std::move(detail);
    properties.push_back(std::move(p));
  };

  Thresholds th = compute_thresholds(pi, opts);

  // solution-set equality at configured (tau, lambda) pairs, brute-forced
  Vector lo = to_vector(vf.at("box").at("lo"));
  Vector hi = to_vector(vf.at("box").at("hi"));
  double step = vf.at("box").at("step").get<double>();
  if (vf.contains("pairs")) {
    for (const auto& pr : vf.at("pairs")) {
      double tau = pr[0].get<double>(), lambda = pr[1].get<double>();
      SolEqualityReport rep = verify_sol_equality(pi, tau, lambda, lo, hi, step);
      record("sol_equality(tau=" + format_double(tau) + ",lambda=" + format_double(lambda) + ")",
             rep.equal, json{{"hausdorff", rep.hausdorff}});
    }
  } else if (vf.contains("taus")) {
    for (const auto& t : vf.at("taus")) {
      double tau = t.get<double>();
      double lambda = g_of_tau(pi, tau, opts);
      SolEqualityReport rep = verify_sol_equality(pi, tau, lambda, lo, hi, step);
      record("sol_equality(tau=" + format_double(tau) + ")", rep.equal,
             json{{"lambda", lambda}, {"hausdorff", rep.hausdorff}});
    }
  }
  if (vf.contains("offgraph_pairs")) {
    for (const auto& pr : vf.at("offgraph_pairs")) {
      double tau = pr[0].get<double>(), lambda = pr[1].get<double>();
      SolEqualityReport rep = verify_sol_equality(pi, tau, lambda, lo, hi, step);
      record("sol_disjoint(tau=" + format_double(tau) + ",lambda=" + format_double(lambda) + ")",
             rep.disjoint, json{{"min_distance", rep.min_distance}});
    }
  }

  // round trips and monotone decrease across interior samples
  int nsamples = vf.contains("roundtrip_samples") ? vf.at("roundtrip_samples").get<int>() : 10;
  bool round_ok = true, monotone_ok = true;
  double prev_lambda = kInf;
  for (int i = 1; i <= nsamples; ++i) {
    double tau = th.c * i / (nsamples + 1.0);
    double lambda = g_of_tau(pi, tau, opts);
    if (lambda >= prev_lambda + 1e-5) monotone_ok = false;
    prev_lambda = lambda;
    double back = f_of_lambda(pi, lambda, opts);
    if (std::abs(back - tau) > 1e-4) round_ok = false;
  }
  record("round_trips", round_ok);
  record("monotone_decreasing", monotone_ok);

  // localization disjointness for interior taus via the brute-force set
  {
    bool ok = true;
    Caps caps;
    caps.proper = false;
    for (int i = 1; i <= 3; ++i) {
      double tau = th.c * i / 4.0;
      double lambda = g_of_tau(pi, tau, opts);
      ProblemInstance local = pi;
      ConvexFn obj(
          pi.ambient_dim(),
          [local, lambda](const Vector& x) { return local.penalized_objective(x, lambda); }, caps,
          pi.phi().canonical_minimizer());
      ArgminSet s = brute_force_argmin(obj, lo, hi, step, 1e-9);
      for (const Vector& pt : s.points) {
        if (pi.norm().primal(pi.L().apply(pt)) <= step) ok = false;
        Vector x1 = pi.phi().X1().coords(pt);
        if ((x1 - pi.phi().phi_minimizer_coords()).norm() <= step) ok = false;
      }
    }
    record("localization_disjoint", ok);
  }

  // border behavior of the dual at tau = 0, when requested
  if (vf.contains("tau_zero_dual") && vf.at("tau_zero_dual").get<bool>()) {
    try {
      SolveReport r = solve_dual_penalized(pi, 0.0, opts);
      record("tau_zero_dual", true, json{{"behavior", "argmin"}, {"dual_norm", r.dual_norm}});
    } catch (const DualUnbounded&) {
      record("tau_zero_dual", true, json{{"behavior", "DualUnbounded"}});
    }
  }

  json doc = report_envelope(config_hash, opts);
  doc["c"] = th.c;
  doc["d"] = th.d_finite() ? json(th.d) : json("inf");
  doc["properties"] = std::move(properties);
  doc["all_pass"] = all_ok;
  write_text(outdir / "verify.json", doc.dump(2) + "\n");
  return all_ok ? kExitOk : kExitProperty;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"convex constrained/penalized correspondence toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  unsigned seed = 0;
  bool seed_given = false;
  int workers = 0;
  double tol_override = 0.0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "path to the JSON config")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
      seed_given = true;
    });
    sub->add_option("--workers", workers, "worker pool size (curve)");
    sub->add_option("--tol", tol_override, "certificate tolerance override");
  };

  CLI::App* solve = app.add_subcommand("solve", "solve the four problems at given parameters");
  CLI::App* curve = app.add_subcommand("curve", "sample the (tau, g(tau)) correspondence curve");
  CLI::App* coer = app.add_subcommand("coercivity", "coercivity verdicts and probes");
  CLI::App* verify = app.add_subcommand("verify", "run the property suite on an instance");
  for (CLI::App* sub : {solve, curve, coer, verify}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  try {
    std::string raw = read_file(config_path);
    json cfg;
    try {
      cfg = json::parse(raw);
    } catch (const json::exception& e) {
      std::fprintf(stderr, "config parse error: %s\n", e.what());
      return kExitConfig;
    }
    char hash_buf[32];
    std::snprintf(hash_buf, sizeof(hash_buf), "%016" PRIx64, fnv1a64(raw));
    std::string config_hash = hash_buf;
    SolverOptions opts = parse_options(cfg, seed, seed_given, tol_override);
    fs::path outdir(out_dir);

    if (solve->parsed()) return cmd_solve(cfg, outdir, opts, config_hash);
    if (curve->parsed()) return cmd_curve(cfg, outdir, opts, workers, config_hash);
    if (coer->parsed()) return cmd_coercivity(cfg, outdir, opts, config_hash);
    if (verify->parsed()) return cmd_verify(cfg, outdir, opts, config_hash);
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const UnknownName& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const InvariantViolation& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const CapabilityMissing& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const DimensionMismatch& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const NotConverged& e) {
    std::fprintf(stderr, "convergence failure: %s\n", e.what());
    return kExitConvergence;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
