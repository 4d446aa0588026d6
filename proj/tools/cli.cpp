#include "cli.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "hylo/config.hpp"
#include "hylo/grid_ops.hpp"
#include "hylo/io.hpp"

#ifndef HYLO_VERSION
#define HYLO_VERSION "0.0.0"
#endif

namespace hylo::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct GateFailure : Error {
  using Error::Error;
};

class Run {
 public:
  Run(std::string command, std::ostream& err, bool quiet)
      : manifest_(HYLO_VERSION, command), err_(err), quiet_(quiet) {}

  RunConfig cfg;
  std::string out = "out";

  void log(const std::string& msg) const {
    if (!quiet_) err_ << "hylosolve: " << msg << '\n';
  }
  void stage(std::string s) {
    stage_ = std::move(s);
    log(stage_);
  }
  const std::string& current_stage() const { return stage_; }

  fs::path path(const std::string& rel) const { return fs::path(out) / rel; }

  void emit_json(const std::string& rel, const json& doc) {
    write_json(path(rel).string(), doc);
    record(rel);
  }
  void emit_field(const std::string& rel, const FieldState& s) {
    write_field(path(rel).string(), s);
    record(rel);
  }
  void emit_trace(const std::string& rel, const EvolutionTrace& tr) {
    write_trace_csv(path(rel).string(), tr);
    record(rel);
  }
  void emit_text(const std::string& rel, const std::string& text) {
    write_text(path(rel).string(), text);
    record(rel);
  }
  void record(const std::string& rel) {
    std::lock_guard<std::mutex> lock(mu_);
    manifest_.add_output(out, rel);
  }

  RunManifest& manifest() { return manifest_; }
  std::ostream& err() const { return err_; }

 private:
  RunManifest manifest_;
  std::ostream& err_;
  bool quiet_;
  std::string stage_ = "setup";
  std::mutex mu_;
};

json certificate_summary(const HypothesisCertificate& cert) {
  json verdicts = json::object();
  for (const auto& e : cert.entries) verdicts[e.id] = std::string(to_string(e.verdict));
  return {{"gate_pass", cert.gate_pass()}, {"verdicts", std::move(verdicts)}};
}

struct ParamChoice {
  PenaltyParams params;
  json info;
};

ParamChoice resolve_params(const ModelSpec& spec, const RunConfig& cfg) {
  ParamChoice out;
  if (cfg.a && cfg.s_exp) {
    out.params.a = *cfg.a;
    out.params.s_exp = *cfg.s_exp;
    out.info = {{"source", "config"}};
  } else {
    try {
      const CoercivityChoice c = choose_coercivity_params(spec, cfg.seed);
      out.params = c.params;
      out.info = {{"source", c.sampled ? "sampled" : "nash"}, {"b_p", c.b_p}, {"a_young", c.a_young}};
    } catch (const InvalidArgument& e) {
      const double s = cfg.s_exp.value_or(spec.tag == ModelTag::NLS ? spec.w.p / 2.0 : 2.0);
      out.params = sampled_coercivity_params(spec, s);
      out.info = {{"source", "sampled"}, {"reason", e.what()}};
    }
    if (cfg.a) out.params.a = *cfg.a;
    if (cfg.s_exp && !cfg.a) {
      out.params = sampled_coercivity_params(spec, *cfg.s_exp);
      out.info["source"] = "sampled";
    }
  }
  if (cfg.delta_list) out.params.delta = cfg.delta_list->front();
  out.info["a"] = out.params.a;
  out.info["s"] = out.params.s_exp;
  return out;
}

std::vector<double> resolve_deltas(Run& run, const ModelSpec& spec, const PenaltyParams& params) {
  if (run.cfg.delta_list) return *run.cfg.delta_list;
  run.stage("delta list from the probe bound");
  const double l0 = lambda0_estimate(spec).value;
  const double db = delta_bar(spec, params, l0);
  if (!(db > 0.0) || !std::isfinite(db)) throw NumericalFailure("no admissible penalty weight (delta_bar <= 0)");
  return default_delta_list(db);
}

HypothesisCertificate run_audit(Run& run, const ModelSpec& spec, const PenaltyParams& params) {
  run.stage("hypothesis audit");
  AuditOptions ao;
  ao.budget = run.cfg.audit_budget;
  ao.seed = run.cfg.seed;
  HypothesisCertificate cert = audit(spec, params, ao);
  run.emit_json("certificate.json", to_json(cert));
  run.manifest().set_certificate_summary(certificate_summary(cert));
  return cert;
}

void require_gate(const HypothesisCertificate& cert) {
  if (cert.gate_pass()) return;
  std::string failed;
  for (const auto& e : cert.entries) {
    if (e.verdict != Verdict::pass && (e.id.rfind("EC-", 0) == 0 || e.id == "hh")) {
      failed += (failed.empty() ? "" : ", ") + e.id;
    }
  }
  throw GateFailure("hypothesis gate failed: " + failed);
}

ContinuationResult run_continuation(Run& run, const ModelSpec& spec, const PenaltyParams& params,
                                    const std::vector<double>& deltas) {
  run.stage("delta continuation over " + std::to_string(deltas.size()) + " weights");
  ContinuationResult res = delta_continuation(spec, params, deltas, run.cfg.minimize);
  run.emit_json("continuation.json", to_json(spec, res));
  for (std::size_t k = 0; k < res.members.size(); ++k) {
    run.emit_field("member_" + std::to_string(k) + ".field", res.members[k].refined.state);
  }
  return res;
}

int cmd_check(Run& run) {
  const ModelSpec& spec = run.cfg.model;
  run.stage("coercivity parameters");
  const ParamChoice pc = resolve_params(spec, run.cfg);
  const HypothesisCertificate cert = run_audit(run, spec, pc.params);
  run.log(std::string("gate ") + (cert.gate_pass() ? "passes" : "fails"));
  return kOk;
}

int cmd_lambda0(Run& run) {
  const ModelSpec& spec = run.cfg.model;
  run.stage("lambda0 estimate");
  const Lambda0Estimate est = lambda0_estimate(spec);
  run.stage("hylomorphy check");
  const HylomorphyReport rep = hylomorphy_check(spec, {}, est.value);
  run.emit_json("lambda0.json", {{"estimate", to_json(est)}, {"hylomorphy", to_json(rep)}});
  run.log("lambda0 = " + format_double(est.value));
  return kOk;
}

int cmd_minimize(Run& run) {
  const ModelSpec& spec = run.cfg.model;
  run.stage("coercivity parameters");
  const ParamChoice pc = resolve_params(spec, run.cfg);
  require_gate(run_audit(run, spec, pc.params));
  const auto deltas = resolve_deltas(run, spec, pc.params);
  run_continuation(run, spec, pc.params, deltas);
  return kOk;
}

FieldState initial_state(Run& run, const ModelSpec& spec) {
  const InitialCondition& ic = run.cfg.initial;
  if (ic.kind == "file") return read_field(ic.path, spec.grid, spec.tag);
  return profile_state(spec, gaussian_profile(spec.grid, ic.amplitude, ic.width, probe_carrier(spec)), ic.omega);
}

int cmd_evolve(Run& run) {
  const ModelSpec& spec = run.cfg.model;
  run.stage("initial state");
  const FieldState u0 = initial_state(run, spec);
  run.stage("time evolution");
  const EvolutionTrace tr = evolve(spec, u0, run.cfg.evolve);
  run.emit_trace("trace.csv", tr);
  if (tr.final_state) run.emit_field("final.field", *tr.final_state);
  const ConservationSummary cs = conservation_report(tr);
  run.emit_json("evolve.json", {{"steps", tr.steps},
                                {"dt", tr.dt},
                                {"energy_drift", cs.energy_drift},
                                {"charge_drift", cs.charge_drift},
                                {"blow_up", tr.blow_up},
                                {"blow_up_reason", tr.blow_up_reason}});
  if (tr.blow_up) throw NumericalFailure("blow-up: " + tr.blow_up_reason);
  return kOk;
}

StabilityReport stability_stage(Run& run, const ModelSpec& spec, const MinimizeResult& ref) {
  run.stage("perturbation experiments");
  std::vector<Perturbation> perts = run.cfg.perturbations;
  if (perts.empty()) {
    Perturbation p;
    p.epsilon = 1e-2;
    p.seed = run.cfg.seed;
    perts.push_back(p);
  }
  const StabilityReport rep = run_stability(spec, ref, perts, run.cfg.stability);
  run.emit_json("stability.json", to_json(rep));
  for (std::size_t i = 0; i < rep.rows.size(); ++i) run.emit_trace("trace_" + std::to_string(i) + ".csv", rep.rows[i].trace);
  if (!run.cfg.vscan_radii.empty()) {
    run.stage("V separation scan");
    run.emit_json("vscan.json", to_json(v_separation_scan(spec, ref, run.cfg.vscan_radii, 64, run.cfg.seed)));
  }
  for (const auto& r : rep.rows) {
    if (r.trace.blow_up) throw NumericalFailure("blow-up in a perturbed run: " + r.trace.blow_up_reason);
  }
  return rep;
}

int cmd_stability(Run& run) {
  const ModelSpec& spec = run.cfg.model;
  run.stage("coercivity parameters");
  const ParamChoice pc = resolve_params(spec, run.cfg);
  require_gate(run_audit(run, spec, pc.params));
  const auto deltas = resolve_deltas(run, spec, pc.params);
  const ContinuationResult res = run_continuation(run, spec, pc.params, {deltas.front()});
  stability_stage(run, spec, res.members.front().refined);
  return kOk;
}

// Cartesian product of the listed W parameters.
std::vector<std::vector<std::pair<std::string, double>>> w_grid(const SweepConfig& sw) {
  std::vector<std::vector<std::pair<std::string, double>>> out{{}};
  for (const auto& [name, values] : sw.w) {
    std::vector<std::vector<std::pair<std::string, double>>> next;
    for (const auto& partial : out) {
      for (double v : values) {
        auto row = partial;
        row.emplace_back(name, v);
        next.push_back(std::move(row));
      }
    }
    out = std::move(next);
  }
  return out;
}

int cmd_sweep(Run& run) {
  const auto wg = w_grid(run.cfg.sweep);
  std::vector<std::optional<double>> deltas;
  for (double d : run.cfg.sweep.delta) deltas.push_back(d);
  if (deltas.empty()) deltas.push_back(std::nullopt);

  struct Job {
    std::vector<std::pair<std::string, double>> w;
    std::optional<double> delta;
  };
  std::vector<Job> jobs;
  for (const auto& w : wg) {
    for (const auto& d : deltas) jobs.push_back({w, d});
  }
  run.stage("sweep over " + std::to_string(jobs.size()) + " runs");
  std::vector<json> rows(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      char name[32];
      std::snprintf(name, sizeof name, "run_%04zu", i);
      json row = {{"run", name}, {"w", json::object()}};
      for (const auto& [k, v] : job.w) row["w"][k] = v;
      try {
        WSpec w = run.cfg.model.w;
        for (const auto& [k, v] : job.w) w = with_w_param(w, k, v);
        const ModelSpec spec(run.cfg.model.tag, run.cfg.model.grid, w);
        fs::create_directories(run.path(name));
        const ParamChoice pc = resolve_params(spec, run.cfg);
        AuditOptions ao;
        ao.budget = run.cfg.audit_budget;
        ao.seed = run.cfg.seed;
        const HypothesisCertificate cert = audit(spec, pc.params, ao);
        write_json(run.path(std::string(name) + "/certificate.json").string(), to_json(cert));
        run.record(std::string(name) + "/certificate.json");
        row["gate_pass"] = cert.gate_pass();
        if (!cert.gate_pass()) {
          row["status"] = "gate_failed";
        } else {
          double delta = 0.0;
          if (job.delta) {
            delta = *job.delta;
          } else if (run.cfg.delta_list) {
            delta = run.cfg.delta_list->front();
          } else {
            delta = default_delta_list(delta_bar(spec, pc.params, lambda0_estimate(spec).value)).front();
          }
          row["delta"] = delta;
          const ContinuationResult res = delta_continuation(spec, pc.params, {delta}, run.cfg.minimize);
          const MinimizeResult& m = res.members.front().refined;
          write_json(run.path(std::string(name) + "/result.json").string(), to_json(spec, m));
          run.record(std::string(name) + "/result.json");
          write_field(run.path(std::string(name) + "/profile.field").string(), m.state);
          run.record(std::string(name) + "/profile.field");
          row["status"] = "ok";
          row["energy"] = m.e_delta;
          row["charge"] = m.c_delta;
          row["kkt_residual"] = m.kkt_residual;
        }
      } catch (const Error& e) {
        row["status"] = "numerical_failure";
        row["error"] = e.what();
      }
      rows[i] = std::move(row);
    }
  };
  const int nworkers = std::clamp<int>(run.cfg.sweep.jobs, 1, static_cast<int>(std::max<std::size_t>(jobs.size(), 1)));
  std::vector<std::thread> pool;
  for (int w = 1; w < nworkers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  bool failure = false;
  for (const auto& r : rows) failure = failure || r["status"] == "numerical_failure";
  run.emit_json("sweep.json", {{"runs", rows}});
  if (failure) throw NumericalFailure("at least one sweep run failed");
  return kOk;
}

int cmd_demo(Run& run) {
  const ModelSpec& spec = run.cfg.model;
  run.stage("lambda0 estimate");
  const Lambda0Estimate est = lambda0_estimate(spec);
  const HylomorphyReport hyl = hylomorphy_check(spec, {}, est.value);
  run.emit_json("lambda0.json", {{"estimate", to_json(est)}, {"hylomorphy", to_json(hyl)}});
  run.stage("coercivity parameters");
  const ParamChoice pc = resolve_params(spec, run.cfg);
  require_gate(run_audit(run, spec, pc.params));
  const auto deltas = resolve_deltas(run, spec, pc.params);
  const ContinuationResult res = run_continuation(run, spec, pc.params, deltas);
  const MinimizeResult& mid = res.members[res.members.size() / 2].refined;

  run.stage("profile against the closed-form soliton");
  const Grid& g = spec.grid;
  const bool cubic = spec.tag == ModelTag::NLS && g.dim() == 1 && spec.w.family == WFamily::SinglePower &&
                     spec.w.p == 4.0 && spec.w.b > 0.0;
  const double mu = spec.w.m_sq - 2.0 * mid.lambda_mult;
  json summary = {{"delta", res.members[res.members.size() / 2].delta}, {"minimizer", to_json(spec, mid)},
                  {"lambda0", est.value}, {"hylomorphy", hyl.verdict}};
  FieldState shown = mid.state;
  std::optional<FieldState> oracle;
  if (cubic && mu > 0.0) {
    ComplexField o(g.size());
    for (int i = 0; i < g.n(0); ++i) {
      o[i] = std::sqrt(2.0 * mu / spec.w.b) / std::cosh(std::sqrt(mu) * g.coordinate(0, i));
    }
    oracle = FieldState(spec.tag, g, std::move(o));
    shown = apply_alignment(mid.state, align_orbit(*oracle, mid.state));
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      num += std::norm(shown.data()[i] - oracle->data()[i]);
      den += std::norm(oracle->data()[i]);
    }
    summary["mu"] = mu;
    summary["profile_rel_l2_error"] = std::sqrt(num / den);
  }
  std::string csv = "x,re,im,abs,oracle\n";
  for (int i = 0; i < g.n(0) && g.dim() == 1; ++i) {
    const cplx v = shown.data()[i];
    csv += format_double(g.coordinate(0, i)) + ',' + format_double(v.real()) + ',' + format_double(v.imag()) + ',' +
           format_double(std::abs(v)) + ',' + (oracle ? format_double(oracle->data()[i].real()) : "") + '\n';
  }
  run.emit_text("soliton_profile.csv", csv);

  const StabilityReport rep = stability_stage(run, spec, mid);
  json rows = json::array();
  for (const auto& r : rep.rows) rows.push_back({{"verdict", r.verdict}, {"max_v", r.max_v}, {"v0", r.v0}});
  summary["stability"] = std::move(rows);
  run.emit_json("demo.json", summary);
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& err) {
  CLI::App app{"hylosolve: hylomorphic solitons for NLS, NWE and NBE on periodic grids"};
  app.set_version_flag("--version", HYLO_VERSION);
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides the config)");
  app.add_option("--seed", seed, "64-bit seed (overrides the config)");
  app.add_flag("--quiet", quiet, "no progress messages");

  using Handler = int (*)(Run&);
  const std::vector<std::tuple<const char*, const char*, Handler>> commands = {
      {"check", "audit the hypotheses and write certificate.json", cmd_check},
      {"lambda0", "estimate lambda0 and run the hylomorphy check", cmd_lambda0},
      {"minimize", "audit gate, then delta continuation of minimizers", cmd_minimize},
      {"evolve", "evolve an initial state and write its trace", cmd_evolve},
      {"stability", "perturb a computed minimizer and track V and orbit distance", cmd_stability},
      {"sweep", "cartesian product over W parameters and delta", cmd_sweep},
      {"demo", "the default Schrodinger pipeline end to end", cmd_demo},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kConfigInvalid;
  }

  std::size_t which = 0;
  while (which < subs.size() && !subs[which]->parsed()) ++which;
  const auto& [name, help, handler] = commands[which];
  Run r(name, err, quiet);
  r.out = out_dir.empty() ? "out" : out_dir;

  int code = kOk;
  std::string message;
  try {
    r.stage("configuration");
    if (config_path.empty()) {
      if (std::string(name) != "demo") throw ConfigError("--config is required for '" + std::string(name) + "'");
      r.cfg = config_from_json(default_nls_config());
    } else {
      r.cfg = load_config(config_path);
    }
    if (seed) {
      r.cfg.seed = *seed;
      r.cfg.minimize.seed = *seed;
    }
    if (out_dir.empty()) r.out = r.cfg.output;
    r.manifest().set_config(r.cfg.source);
    fs::create_directories(r.out);
    code = handler(r);
  } catch (const ConfigError& e) {
    message = e.what();
    err << "hylosolve: invalid configuration: " << message << '\n';
    code = kConfigInvalid;
  } catch (const FormatError& e) {
    message = e.what();
    err << "hylosolve: " << message << '\n';
    code = kConfigInvalid;
  } catch (const GateFailure& e) {
    message = e.what();
    err << "hylosolve: " << message << '\n';
    code = kGateFailed;
  } catch (const std::exception& e) {
    message = e.what();
    err << "hylosolve: numerical failure during " << r.current_stage() << ": " << message << '\n';
    code = kNumericalFailure;
  }
  if (code != kOk) r.manifest().fail(r.current_stage(), message, code);
  r.manifest().finish(code);
  try {
    r.manifest().write(r.out);
  } catch (const std::exception& e) {
    err << "hylosolve: cannot write manifest: " << e.what() << '\n';
  }
  return code;
}

}  // namespace hylo::cli
