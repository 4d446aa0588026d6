#include "hylo/config.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hylo/errors.hpp"
#include "hylo/json_schema.hpp"
#include "hylo/rng.hpp"
#include "hylo/run_config_schema.hpp"

namespace hylo {

using nlohmann::json;

const json& run_config_schema() {
  static const json schema = json::parse(detail::kRunConfigSchema);
  return schema;
}

namespace {

template <class T>
T value_or(const json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : it->get<T>();
}

std::vector<double> as_vector(const json& v) {
  return v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
}

ModelSpec parse_model(const json& m) {
  const ModelTag tag = model_tag_from_string(m.at("tag").get<std::string>());
  const std::vector<double> n_raw = as_vector(m.at("n"));
  const std::vector<double> L_raw = as_vector(m.at("L"));
  const int dim = value_or<int>(m, "dim", static_cast<int>(std::max(n_raw.size(), L_raw.size())));
  auto broadcast = [&](const std::vector<double>& v, const char* name) {
    if (v.size() == 1) return std::vector<double>(dim, v[0]);
    if (static_cast<int>(v.size()) != dim) {
      throw ConfigError(std::string("model.") + name + " has " + std::to_string(v.size()) + " entries for dim " +
                        std::to_string(dim));
    }
    return v;
  };
  std::vector<int> n;
  for (double x : broadcast(n_raw, "n")) n.push_back(static_cast<int>(x));
  const std::vector<double> L = broadcast(L_raw, "L");

  const json& wj = m.at("w");
  WSpec w;
  w.family = w_family_from_string(wj.at("family").get<std::string>());
  w.m_sq = value_or(wj, "m_sq", w.m_sq);
  w.b = value_or(wj, "b", w.b);
  w.p = value_or(wj, "p", w.p);
  w.c = value_or(wj, "c", w.c);
  w.q = value_or(wj, "q", w.q);
  w.m_bar = value_or(wj, "m_bar", w.m_bar);
  w.alpha = value_or(wj, "alpha", w.alpha);
  return ModelSpec(tag, Grid(n, L), w);
}

}  // namespace

RunConfig config_from_json(const json& doc) {
  const auto issues = validate_schema(run_config_schema(), doc);
  if (!issues.empty()) {
    std::string msg = "configuration does not match the schema:";
    for (const auto& i : issues) msg += "\n  " + (i.pointer.empty() ? std::string("(document)") : i.pointer) + ": " + i.message;
    throw ConfigError(msg);
  }
  RunConfig cfg;
  cfg.source = doc;
  try {
    cfg.model = parse_model(doc.at("model"));
    cfg.seed = value_or<std::uint64_t>(doc, "seed", 1);
    cfg.output = value_or<std::string>(doc, "output", "out");

    const json pen = value_or<json>(doc, "penalty", json::object());
    if (auto it = pen.find("delta"); it != pen.end() && it->is_array()) {
      cfg.delta_list = it->get<std::vector<double>>();
      for (std::size_t i = 1; i < cfg.delta_list->size(); ++i) {
        if (!((*cfg.delta_list)[i] < (*cfg.delta_list)[i - 1])) {
          throw ConfigError("penalty.delta must be strictly decreasing");
        }
      }
    }
    if (auto it = pen.find("a"); it != pen.end() && it->is_number()) cfg.a = it->get<double>();
    if (auto it = pen.find("s"); it != pen.end() && it->is_number()) cfg.s_exp = it->get<double>();

    const json mo = value_or<json>(doc, "minimize", json::object());
    cfg.minimize.max_iters = value_or(mo, "max_iters", cfg.minimize.max_iters);
    cfg.minimize.grad_tol = value_or(mo, "grad_tol", cfg.minimize.grad_tol);
    cfg.minimize.armijo_c1 = value_or(mo, "armijo_c1", cfg.minimize.armijo_c1);
    cfg.minimize.backtrack = value_or(mo, "backtrack", cfg.minimize.backtrack);
    cfg.minimize.initial_step = value_or(mo, "initial_step", cfg.minimize.initial_step);
    cfg.minimize.max_backtracks = value_or(mo, "max_backtracks", cfg.minimize.max_backtracks);
    cfg.minimize.seed = cfg.seed;
    cfg.minimize.validate();

    const json ev = value_or<json>(doc, "evolve", json::object());
    cfg.evolve.T = value_or(ev, "T", cfg.evolve.T);
    cfg.evolve.dt = value_or(ev, "dt", cfg.evolve.dt);
    cfg.evolve.record_every = value_or(ev, "record_every", cfg.evolve.record_every);
    const json ini = value_or<json>(ev, "initial", json::object());
    cfg.initial.kind = value_or<std::string>(ini, "kind", cfg.initial.kind);
    cfg.initial.amplitude = value_or(ini, "amplitude", cfg.initial.amplitude);
    cfg.initial.width = value_or(ini, "width", cfg.initial.width);
    cfg.initial.omega = value_or(ini, "omega", cfg.initial.omega);
    cfg.initial.path = value_or<std::string>(ini, "path", "");
    if (cfg.initial.kind == "file" && cfg.initial.path.empty()) {
      throw ConfigError("evolve.initial.path is required for kind \"file\"");
    }

    const json st = value_or<json>(doc, "stability", json::object());
    cfg.stability.T = value_or(st, "T", cfg.stability.T);
    cfg.stability.dt = value_or(st, "dt", cfg.stability.dt);
    cfg.stability.record_every = value_or(st, "record_every", cfg.stability.record_every);
    cfg.stability.kappa = value_or(st, "kappa", cfg.stability.kappa);
    cfg.stability.abs_tol = value_or(st, "abs_tol", cfg.stability.abs_tol);
    cfg.stability.jobs = value_or(st, "jobs", cfg.stability.jobs);
    cfg.vscan_radii = value_or<std::vector<double>>(st, "vscan_radii", {});
    const json perts = value_or<json>(st, "perturbations", json::array());
    for (std::size_t i = 0; i < perts.size(); ++i) {
      const json& pj = perts[i];
      Perturbation p;
      p.kind = perturbation_kind_from_string(pj.at("kind").get<std::string>());
      p.epsilon = value_or(pj, "epsilon", 0.0);
      p.band_limit = value_or(pj, "band_limit", p.band_limit);
      p.seed = value_or<std::uint64_t>(pj, "seed", cfg.seed + i);
      p.shift = value_or<std::vector<long>>(pj, "shift", {});
      p.theta = value_or(pj, "theta", 0.0);
      if (!p.shift.empty() && static_cast<int>(p.shift.size()) != cfg.model.dim()) {
        throw ConfigError("stability.perturbations[" + std::to_string(i) + "].shift needs one entry per axis");
      }
      cfg.perturbations.push_back(std::move(p));
    }

    const json au = value_or<json>(doc, "audit", json::object());
    cfg.audit_budget = value_or(au, "budget", cfg.audit_budget);

    const json sw = value_or<json>(doc, "sweep", json::object());
    if (auto it = sw.find("w"); it != sw.end()) {
      for (const auto& [k, v] : it->items()) cfg.sweep.w[k] = v.get<std::vector<double>>();
    }
    cfg.sweep.delta = value_or<std::vector<double>>(sw, "delta", {});
    cfg.sweep.jobs = value_or(sw, "jobs", 1);
  } catch (const ConfigError&) {
    throw;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("configuration: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("configuration: ") + e.what());
  }
  return cfg;
}

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  return config_from_json(doc);
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read configuration '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

json default_nls_config() {
  return {{"model",
           {{"tag", "NLS"},
            {"dim", 1},
            {"n", 512},
            {"L", 40.0},
            {"w", {{"family", "SinglePower"}, {"m_sq", 1.0}, {"b", 1.0}, {"p", 4.0}}}}},
          {"penalty", {{"delta", "auto"}, {"a", "auto"}, {"s", "auto"}}},
          {"evolve", {{"T", 10.0}, {"dt", 1e-3}, {"record_every", 100}}},
          {"stability",
           {{"T", 50.0},
            {"dt", 1e-3},
            {"record_every", 100},
            {"perturbations", json::array({{{"kind", "additive_noise"}, {"epsilon", 1e-2}}})}}},
          {"seed", 1}};
}

WSpec with_w_param(WSpec w, const std::string& name, double value) {
  if (name == "m_sq") w.m_sq = value;
  else if (name == "b") w.b = value;
  else if (name == "p") w.p = value;
  else if (name == "c") w.c = value;
  else if (name == "q") w.q = value;
  else if (name == "m_bar") w.m_bar = value;
  else if (name == "alpha") w.alpha = value;
  else throw ConfigError("unknown W parameter '" + name + "'");
  return w;
}

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string file_checksum(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot read '" + path + "' for checksumming");
  std::ostringstream ss;
  ss << is.rdbuf();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(ss.str())));
  return buf;
}

RunManifest::RunManifest(std::string tool_version, std::string command)
    : version_(std::move(tool_version)), command_(std::move(command)), started_(utc_timestamp()) {}

void RunManifest::add_output(const std::string& out_dir, const std::string& relative_path) {
  const std::filesystem::path full = std::filesystem::path(out_dir) / relative_path;
  outputs_.push_back({relative_path, file_checksum(full.string()), std::filesystem::file_size(full)});
}

void RunManifest::fail(std::string stage, std::string message, int exit_code) {
  status_ = "failed";
  failure_stage_ = std::move(stage);
  failure_message_ = std::move(message);
  exit_code_ = exit_code;
  finished_ = utc_timestamp();
}

void RunManifest::finish(int exit_code) {
  if (status_ != "failed") status_ = "ok";
  exit_code_ = exit_code;
  finished_ = utc_timestamp();
}

json RunManifest::to_json() const {
  json outs = json::array();
  for (const auto& o : outputs_) outs.push_back({{"path", o.path}, {"fnv1a64", o.fnv1a64}, {"bytes", o.bytes}});
  json j = {{"tool", "hylosolve"},
            {"version", version_},
            {"command", command_},
            {"started", started_},
            {"finished", finished_},
            {"status", status_},
            {"exit_code", exit_code_},
            {"config", config_},
            {"outputs", std::move(outs)}};
  if (!certificate_.is_null()) j["certificate"] = certificate_;
  if (status_ == "failed") j["failure"] = {{"stage", failure_stage_}, {"message", failure_message_}};
  return j;
}

void RunManifest::write(const std::string& out_dir) const {
  std::filesystem::create_directories(out_dir);
  std::ofstream os(std::filesystem::path(out_dir) / "manifest.json", std::ios::binary);
  if (!os) throw FormatError("cannot write manifest in '" + out_dir + "'");
  os << to_json().dump(2) << '\n';
}

}  // namespace hylo
