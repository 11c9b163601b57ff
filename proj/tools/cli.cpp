#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "cmfrac/analysis.hpp"
#include "cmfrac/bounds.hpp"
#include "cmfrac/error.hpp"
#include "cmfrac/fode.hpp"
#include "cmfrac/format.hpp"
#include "cmfrac/fpde.hpp"
#include "cmfrac/kernels.hpp"
#include "cmfrac/mesh.hpp"

namespace cmfrac::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Reads an object key by key and rejects whatever was not read.
class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <class T>
  T req(const std::string& key) {
    if (!has(key)) throw ConfigError(where_ + ": missing key '" + key + "'");
    return get<T>(key);
  }

  template <class T>
  T opt(const std::string& key, T fallback) {
    return has(key) ? get<T>(key) : fallback;
  }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  void done() const {
    for (const auto& [k, v] : j_.items())
      if (!used_.count(k)) throw ConfigError(where_ + ": unknown key '" + k + "'");
  }

  const std::string& where() const { return where_; }

 private:
  template <class T>
  T get(const std::string& key) {
    used_.insert(key);
    const json& v = j_.at(key);
    const std::string ctx = where_ + "." + key;
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError(ctx + ": expected a number");
      return v.get<double>();
    } else if constexpr (std::is_same_v<T, std::size_t>) {
      if (!v.is_number_unsigned()) throw ConfigError(ctx + ": expected a nonnegative integer");
      return v.get<std::size_t>();
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(ctx + ": expected true or false");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(ctx + ": expected a string");
      return v.get<std::string>();
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
      if (!v.is_array()) throw ConfigError(ctx + ": expected an array of numbers");
      std::vector<double> out;
      for (const json& e : v) {
        if (!e.is_number()) throw ConfigError(ctx + ": expected an array of numbers");
        out.push_back(e.get<double>());
      }
      return out;
    } else if constexpr (std::is_same_v<T, std::vector<std::size_t>>) {
      if (!v.is_array()) throw ConfigError(ctx + ": expected an array of integers");
      std::vector<std::size_t> out;
      for (const json& e : v) {
        if (!e.is_number_unsigned()) throw ConfigError(ctx + ": expected an array of integers");
        out.push_back(e.get<std::size_t>());
      }
      return out;
    }
  }

  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

// Library argument checks during config parsing count as config errors.
template <class F>
auto config_stage(F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
}

Scheme parse_scheme(const std::string& s) {
  if (s == "gl") return Scheme::GrunwaldLetnikov;
  if (s == "l1") return Scheme::L1Uniform;
  throw ConfigError("scheme must be \"gl\" or \"l1\", got \"" + s + "\"");
}

std::size_t steps_for(double horizon, double h) {
  if (!(h > 0.0) || !(horizon > 0.0)) throw ConfigError("mesh: h and horizon must be positive");
  return static_cast<std::size_t>(std::llround(horizon / h));
}

struct MeshSpec {
  std::string type = "uniform";
  double h = 0.0;
  double h_factor = 0.0;
  std::size_t N = 0;
  double T = 0.0;
  double r = 1.0;
  double rho_max = 0.0;
  std::vector<double> points;
  bool ensure_window = true;
};

MeshSpec parse_mesh(const json& j, bool allow_factor) {
  Reader r(j, "mesh");
  MeshSpec m;
  m.type = r.opt<std::string>("type", "uniform");
  if (m.type == "uniform") {
    if (allow_factor && r.has("h_factor")) {
      m.h_factor = r.req<double>("h_factor");
      if (!(m.h_factor > 0.0 && m.h_factor <= 1.0))
        throw ConfigError("mesh.h_factor must lie in (0, 1]");
      m.N = r.req<std::size_t>("N");
    } else {
      m.h = r.req<double>("h");
      m.N = r.has("horizon") ? steps_for(r.req<double>("horizon"), m.h) : r.req<std::size_t>("N");
    }
  } else if (m.type == "graded") {
    m.T = r.req<double>("T");
    m.N = r.req<std::size_t>("N");
    m.r = r.req<double>("r");
  } else if (m.type == "perturbed") {
    m.h = r.req<double>("h");
    m.N = r.req<std::size_t>("N");
    m.rho_max = r.req<double>("rho_max");
  } else if (m.type == "points") {
    m.points = r.req<std::vector<double>>("points");
  } else {
    throw ConfigError("mesh.type must be uniform, graded, perturbed or points");
  }
  if (allow_factor) m.ensure_window = r.opt<bool>("ensure_window", true);
  r.done();
  return m;
}

TimeMesh build_mesh(const MeshSpec& m, std::uint64_t seed) {
  if (m.type == "uniform") return make_uniform(m.h, m.N);
  if (m.type == "graded") return make_graded(m.T, m.N, m.r);
  if (m.type == "perturbed") return make_perturbed(m.h, m.N, m.rho_max, seed);
  return TimeMesh(m.points);
}

FodeProblem parse_problem(Reader& r) {
  FodeProblem p;
  p.alpha = r.req<double>("alpha");
  p.lambda = r.req<double>("lambda");
  p.gamma = r.req<double>("gamma");
  p.y0 = r.req<double>("y0");
  config_stage([&] {
    p.validate();
    return 0;
  });
  return p;
}

struct ObserveSpec {
  std::vector<double> times;
  std::vector<std::size_t> offsets;
  std::size_t value_lag = 0;
};

ObserveSpec parse_observe(const json* j, std::vector<double> times,
                          std::vector<std::size_t> offsets) {
  ObserveSpec o{std::move(times), std::move(offsets), 0};
  if (!j) return o;
  Reader r(*j, "observe");
  o.times = r.opt("times", o.times);
  o.offsets = r.opt("offsets", o.offsets);
  o.value_lag = r.opt<std::size_t>("value_lag", 0);
  r.done();
  for (std::size_t k : o.offsets)
    if (k == 0) throw ConfigError("observe.offsets must be positive");
  return o;
}

json decay_json(const DecayReport& d) {
  return json{{"times", d.times},    {"observed", d.observed}, {"rate", d.rate},
              {"offsets", d.offsets}, {"averaged", d.averaged}, {"value_lag", d.value_lag}};
}

DecayReport observe(std::span<const double> t, std::span<const double> v,
                    const ObserveSpec& o, double rate) {
  std::vector<double> times;
  for (double x : o.times)
    if (x <= t.back() * (1 + 1e-12)) times.push_back(x);
  return decay_report(t, v, times, o.offsets, rate, o.value_lag);
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

template <class F>
void write_csv(const fs::path& p, F&& body) {
  std::ostringstream os;
  body(os);
  write_file(p, os.str());
}

json mesh_json(const TimeMesh& m) {
  return json{{"num_steps", m.num_steps()},
              {"final_time", m.final_time()},
              {"ratio_bound", m.ratio_bound()},
              {"uniform", m.is_uniform()}};
}

json problem_json(const FodeProblem& p) {
  return json{{"alpha", p.alpha}, {"lambda", p.lambda}, {"gamma", p.gamma}, {"y0", p.y0}};
}

// ---- weights ----------------------------------------------------------------

json run_weights(Reader& r, const fs::path& out) {
  const Scheme scheme = parse_scheme(r.req<std::string>("scheme"));
  const double alpha = r.req<double>("alpha");
  const std::size_t N = r.req<std::size_t>("N");
  r.done();
  const WeightSequence w = config_stage([&] {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (N < 1) throw ConfigError("N must be at least 1");
    return make_weights(scheme, alpha, N);
  });
  write_csv(out / "weights.csv", [&](std::ostream& os) { write_weights_csv(os, w); });
  json rep{{"scheme", scheme_name(scheme)}, {"alpha", alpha}, {"N", N}};
  const std::size_t ncm = std::min<std::size_t>(N, 200);
  const CmReport cm = check_cm(convolution_inverse(w.omega, ncm), 6, ncm);
  rep["cm_check"] = {{"J", 6}, {"N", ncm}, {"pass", cm.pass}, {"min_value", cm.min_value}};
  if (N >= 16) {
    const DecayConstants dc = estimate_decay_constants(w);
    rep["decay_constants"] = {{"c3", dc.c3}, {"c4", dc.c4}};
  }
  return rep;
}

// ---- ode ----------------------------------------------------------------------

json run_ode(Reader& r, const fs::path& out, std::uint64_t seed) {
  const FodeProblem pr = parse_problem(r);
  const Scheme scheme = parse_scheme(r.opt<std::string>("scheme", "gl"));
  const MeshSpec ms = parse_mesh(r.raw("mesh"), false);
  const ObserveSpec ob = parse_observe(r.has("observe") ? &r.raw("observe") : nullptr,
                                       {10, 20, 30, 40, 50}, {10});
  r.done();
  const TimeMesh mesh = config_stage([&] { return build_mesh(ms, seed); });
  if (scheme == Scheme::GrunwaldLetnikov && !mesh.is_uniform())
    throw ConfigError("the gl scheme needs a uniform mesh");

  const Trajectory tr = solve(pr, scheme, mesh);
  write_csv(out / "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, tr); });
  const DecayReport d = observe(tr.mesh().points(), tr.y, ob, pr.alpha / pr.gamma);
  write_csv(out / "decay.csv", [&](std::ostream& os) { write_decay_csv(os, d); });
  return json{{"problem", problem_json(pr)}, {"scheme", scheme_name(scheme)},
              {"mesh", mesh_json(mesh)},     {"decay", decay_json(d)},
              {"final_value", tr.y.back()},  {"warnings", tr.warnings}};
}

// ---- envelope -----------------------------------------------------------------

json run_envelope(Reader& r, const fs::path& out, std::uint64_t seed) {
  const FodeProblem pr = parse_problem(r);
  const Scheme scheme = parse_scheme(r.opt<std::string>("scheme", "gl"));
  const MeshSpec ms = parse_mesh(r.raw("mesh"), true);
  r.done();

  BoundEnvelope env;
  if (ms.h_factor > 0.0) {
    const WeightSequence w = make_weights(scheme, pr.alpha, ms.N);
    const double h0 = config_stage([&] {
      return uniform_envelope_params(pr, w, 1.0).h0;
    });
    env = build_uniform_envelope(pr, w, ms.h_factor * h0, ms.N);
  } else {
    TimeMesh mesh = config_stage([&] { return build_mesh(ms, seed); });
    if (mesh.is_uniform()) {
      const std::size_t N = mesh.num_steps();
      env = build_uniform_envelope(pr, make_weights(scheme, pr.alpha, N), mesh.tau(1), N);
    } else {
      if (scheme != Scheme::L1Uniform)
        throw ConfigError("a nonuniform envelope needs the l1 scheme");
      if (ms.ensure_window) {
        const Window win = hat_window(pr);
        if (win.hi < mesh.final_time()) mesh = ensure_point_in(mesh, win.lo, win.hi);
      }
      env = build_nonuniform_envelope(pr, mesh);
    }
  }
  const Trajectory tr = solve(pr, env.op);
  const EnvelopeReport rep = verify_envelope(env, tr);
  write_csv(out / "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, tr); });
  write_csv(out / "envelope.csv", [&](std::ostream& os) { write_envelope_csv(os, env, tr); });

  auto idx = [](std::size_t i) { return i == kNoIndex ? json(nullptr) : json(i); };
  json params;
  if (const auto* u = std::get_if<UniformEnvelopeParams>(&env.params)) {
    params = {{"type", "uniform"}, {"c3", u->c3}, {"c4", u->c4}, {"h0", u->h0},
              {"h", env.op->h()},  {"mu", u->mu}, {"n0", u->n0}, {"t_n0", u->t_n0},
              {"c7", u->c7},       {"c7_lower", u->c7_lower},   {"c8", u->c8},
              {"n1", u->n1},       {"t_n1", u->t_n1},           {"c9", u->c9}};
  } else {
    const auto& n = std::get<NonuniformEnvelopeParams>(env.params);
    params = {{"type", "nonuniform"},
              {"mu", n.mu},
              {"window", {n.window_lo, n.window_hi}},
              {"hat_index", n.hat_index},
              {"t_hat", n.t_hat},
              {"c1p", n.c1p},
              {"K", n.K},
              {"c2p", n.c2p},
              {"t_switch_threshold", n.t_switch_threshold},
              {"switch_index", idx(n.switch_index)},
              {"c3p", n.switch_index == kNoIndex ? json(nullptr) : json(n.c3p)}};
  }
  return json{{"problem", problem_json(pr)},
              {"scheme", scheme_name(scheme)},
              {"mesh", mesh_json(env.op->mesh())},
              {"params", params},
              {"envelope",
               {{"pass", rep.pass()},
                {"ordering_ok", rep.ordering_ok},
                {"sub_residual_ok", rep.sub_residual_ok},
                {"super_residual_ok", rep.super_residual_ok},
                {"first_ordering_failure", idx(rep.first_ordering_failure)},
                {"first_sub_failure", idx(rep.first_sub_failure)},
                {"first_super_failure", idx(rep.first_super_failure)},
                {"max_sub_residual", rep.max_sub_residual},
                {"min_super_residual", rep.min_super_residual},
                {"c5", rep.c5},
                {"c6", rep.c6},
                {"c6_over_c5", rep.c6 / rep.c5}}}};
}

// ---- pde ----------------------------------------------------------------------

json run_pde(Reader& r, const fs::path& out, const RunOptions& opts) {
  const std::string model = r.req<std::string>("model");
  Nonlinearity nl = Nonlinearity::mean_curvature();
  if (model == "p-laplace") {
    const double p = r.req<double>("p");
    const double eps = r.opt<double>("eps", 1e-8);
    nl = config_stage([&] { return Nonlinearity::p_laplace(p, eps); });
  } else if (model != "mean-curvature") {
    throw ConfigError("model must be \"p-laplace\" or \"mean-curvature\"");
  }
  const double alpha = r.req<double>("alpha");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  const Scheme scheme = parse_scheme(r.opt<std::string>("scheme", "gl"));
  const std::size_t m = r.opt<std::size_t>("m", 33);
  const bool full = opts.full_resolution || r.opt<bool>("full_resolution", false);
  double h = r.opt<double>("h", 1.0 / 50);
  if (full) h = 1.0 / 150;
  const double horizon = r.opt<double>("horizon", 20.0);
  const double s = r.opt<double>("s", 2.0);
  if (!(s > 1.0)) throw ConfigError("s must exceed 1");
  double amplitude = 1.0;
  if (r.has("initial")) {
    Reader ir(r.raw("initial"), "initial");
    if (ir.opt<std::string>("type", "sine") != "sine")
      throw ConfigError("initial.type must be \"sine\"");
    amplitude = ir.opt<double>("amplitude", 1.0);
    ir.done();
  }
  if (!(amplitude >= 0.0)) throw ConfigError("initial.amplitude must be nonnegative");
  const ObserveSpec ob = parse_observe(r.has("observe") ? &r.raw("observe") : nullptr,
                                       {10, 15, 20}, {2, 4, 6, 8, 10});
  const bool check_energy = r.opt<bool>("check_energy", true);
  const std::vector<double> snaps = r.opt<std::vector<double>>("snapshots", {});
  r.done();

  const std::size_t N = steps_for(horizon, h);
  const SpaceGrid grid = config_stage([&] { return SpaceGrid(m); });
  auto op = std::make_shared<DiscreteCaputo>(
      DiscreteCaputo::uniform(make_weights(scheme, alpha, N), h, N));
  FpdeOptions fo;
  fo.s = s;
  fo.snapshot_times = snaps;
  fo.check_energy = check_energy;
  fo.threads = opts.threads;
  const PdeTrajectory tr = solve_fpde(grid, nl, op, sine_field(grid, amplitude), fo);

  write_csv(out / "pde.csv", [&](std::ostream& os) { write_pde_csv(os, tr); });
  const DecayReport d = observe(tr.times, tr.norms, ob, alpha / nl.gamma());
  write_csv(out / "decay.csv", [&](std::ostream& os) { write_decay_csv(os, d); });
  json snap_files = json::array();
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
    const std::string name = "snapshot_" + std::to_string(i) + ".csv";
    write_csv(out / name, [&](std::ostream& os) {
      write_field_csv(os, grid, tr.snapshots[i].second);
    });
    snap_files.push_back({{"t", tr.snapshots[i].first}, {"file", name}});
  }

  bool monotone = true;
  double bound = 0.0, min_u = 0.0;
  std::size_t max_iter = 0;
  for (std::size_t n = 0; n < tr.norms.size(); ++n) {
    if (n > 0 && tr.norms[n] > tr.norms[n - 1] * (1 + 1e-9)) monotone = false;
    bound = std::max(bound, tr.norms[n] * (1 + std::pow(tr.times[n], alpha / nl.gamma())));
    min_u = std::min(min_u, tr.min_values[n]);
    max_iter = std::max(max_iter, tr.picard_iterations[n]);
  }
  const StructuralDiagnostic sd = structural_diagnostic(grid, tr.final_field, nl, s);
  return json{{"model", nl.name()},
              {"p", model == "p-laplace" ? json(nl.p()) : json(nullptr)},
              {"alpha", alpha},
              {"gamma", nl.gamma()},
              {"scheme", scheme_name(scheme)},
              {"m", m},
              {"h", h},
              {"num_steps", N},
              {"s", s},
              {"amplitude", amplitude},
              {"decay", decay_json(d)},
              {"norm_monotone", monotone},
              {"decay_bound", bound},
              {"min_value", min_u},
              {"max_picard_iterations", max_iter},
              {"energy_failures", tr.energy_failures},
              {"structural", {{"lhs", sd.lhs}, {"rhs", sd.rhs},
                              {"ratio", sd.conclusive ? json(sd.ratio) : json(nullptr)},
                              {"conclusive", sd.conclusive}}},
              {"snapshots", snap_files}};
}

// ---- report -------------------------------------------------------------------

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ? c : '_';
  return out.empty() ? "run" : out;
}

json read_report(const fs::path& dir) {
  std::ifstream f(dir / "report.json");
  if (!f) throw std::runtime_error("missing artifacts: " + (dir / "report.json").string());
  json j = json::parse(f, nullptr, false);
  if (j.is_discarded() || !j.contains("decay"))
    throw std::runtime_error("report without decay data: " + (dir / "report.json").string());
  if (j.value("status", "") != "ok")
    throw std::runtime_error("run did not complete: " + dir.string());
  return j;
}

json run_report(Reader& r, const fs::path& out, const RunOptions& opts) {
  std::vector<fs::path> dirs;
  if (r.has("runs")) {
    const json& runs = r.raw("runs");
    if (!runs.is_array()) throw ConfigError("runs: expected an array of directories");
    for (const json& d : runs) {
      if (!d.is_string()) throw ConfigError("runs: expected an array of directories");
      fs::path p(d.get<std::string>());
      dirs.push_back(p.is_absolute() ? p : opts.out_dir / p);
    }
  }
  std::vector<std::pair<std::string, json>> sweep;
  if (r.has("sweep")) {
    const json& sw = r.raw("sweep");
    if (!sw.is_array()) throw ConfigError("sweep: expected an array of run configs");
    for (const json& c : sw) {
      if (!c.is_object() || !c.contains("kind") || !c["kind"].is_string())
        throw ConfigError("sweep entries need a \"kind\"");
      const std::string k = c["kind"].get<std::string>();
      if (k != "ode" && k != "pde") throw ConfigError("sweep entries must be ode or pde runs");
      sweep.emplace_back(k, c);
    }
  }
  r.done();

  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const json& c = sweep[i].second;
    const std::string label = c.value("label", std::to_string(i));
    RunOptions sub = opts;
    sub.out_dir = out / ("run_" + std::to_string(i) + "_" + sanitize(label));
    json rep = run_experiment(sweep[i].first, c, sub);
    dirs.push_back(sub.out_dir);
  }

  std::vector<json> reports;
  for (const fs::path& d : dirs) reports.push_back(read_report(d));
  std::vector<double> times;
  if (!reports.empty()) times = reports[0]["decay"]["times"].get<std::vector<double>>();
  for (const json& j : reports)
    if (j["decay"]["times"].get<std::vector<double>>() != times)
      throw std::runtime_error("runs do not share observation times");

  std::ostringstream os;
  os << "t";
  json columns = json::array();
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const std::string label = reports[i].value("label", dirs[i].filename().string());
    os << ',' << label;
    columns.push_back(label);
  }
  os << '\n';
  if (!reports.empty()) {
    for (std::size_t row = 0; row < times.size(); ++row) {
      os << format_double(times[row]);
      for (const json& j : reports) os << ',' << format_double(j["decay"]["observed"][row].get<double>());
      os << '\n';
    }
    os << "theory";
    for (const json& j : reports) os << ',' << format_double(j["decay"]["rate"].get<double>());
    os << '\n';
  }
  write_file(out / "table.csv", os.str());
  return json{{"columns", columns}, {"times", times}};
}

}  // namespace

json load_config(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path.string());
  json j = json::parse(f, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config " + path.string() + " is not valid JSON");
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  return j;
}

json run_experiment(const std::string& kind, const json& config, const RunOptions& opts) {
  Reader r(config, "config");
  if (r.has("kind") && r.req<std::string>("kind") != kind &&
      !(kind == "envelope" && config["kind"] == "ode-envelope"))
    throw ConfigError("config kind \"" + config["kind"].get<std::string>() +
                      "\" does not match command \"" + kind + "\"");
  const std::string label = r.opt<std::string>("label", "");
  const auto seed = static_cast<std::uint64_t>(r.opt<std::size_t>("seed", 0));
  fs::path out = opts.out_dir;
  if (r.has("output")) out /= r.req<std::string>("output");
  fs::create_directories(out);

  json rep{{"kind", kind}};
  if (!label.empty()) rep["label"] = label;
  rep["seed"] = seed;
  json body;
  if (kind == "weights") body = run_weights(r, out);
  else if (kind == "ode") body = run_ode(r, out, seed);
  else if (kind == "envelope") body = run_envelope(r, out, seed);
  else if (kind == "pde") body = run_pde(r, out, opts);
  else if (kind == "report") body = run_report(r, out, opts);
  else throw ConfigError("unknown command " + kind);
  rep.update(body);
  rep["status"] = "ok";
  write_file(out / "report.json", rep.dump(2) + "\n");
  return rep;
}

namespace {

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const PreconditionViolation*>(&e)) return "precondition-violation";
  if (dynamic_cast<const ConvergenceFailure*>(&e)) return "convergence-failure";
  if (dynamic_cast<const InternalError*>(&e)) return "internal-error";
  if (dynamic_cast<const SingularInput*>(&e)) return "singular-input";
  if (dynamic_cast<const DomainError*>(&e)) return "domain-error";
  if (dynamic_cast<const OutOfRange*>(&e)) return "out-of-range";
  if (dynamic_cast<const InvalidArgument*>(&e)) return "invalid-argument";
  return "runtime-error";
}

}  // namespace

int run_command(const std::string& kind, const fs::path& config_path, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  json config;
  fs::path out = opts.out_dir;
  try {
    config = load_config(config_path);
    if (config.contains("output") && config["output"].is_string())
      out /= config["output"].get<std::string>();
    run_experiment(kind, config, opts);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    json rep{{"kind", kind}, {"status", "error"},
             {"error", {{"type", error_type(e)}, {"message", e.what()}}}};
    if (const auto* pv = dynamic_cast<const PreconditionViolation*>(&e);
        pv && pv->window_hi > pv->window_lo)
      rep["error"]["window"] = {pv->window_lo, pv->window_hi};
    if (const auto* cf = dynamic_cast<const ConvergenceFailure*>(&e)) {
      rep["error"]["residual_history"] = cf->residual_history;
      rep["error"]["step_index"] = cf->step_index;
    }
    std::error_code ec;
    fs::create_directories(out, ec);
    std::ofstream(out / "report.json") << rep.dump(2) << '\n';
    return kModelFailure;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ofstream(out / "timing.json") << json{{"runtime_seconds", secs}}.dump(2) << '\n';
  return kSuccess;
}

}  // namespace cmfrac::cli
