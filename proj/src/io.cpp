#include "hylo/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hylo/errors.hpp"

namespace hylo {

using nlohmann::json;

std::string format_double(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::scientific, 16);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view token) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  if (first != last && *first == '+') ++first;
  const auto r = std::from_chars(first, last, v);
  if (r.ec != std::errc() || r.ptr != last || first == last) {
    throw FormatError("not a decimal number: '" + std::string(token) + "'");
  }
  return v;
}

namespace {

long parse_long(std::string_view token) {
  long v = 0;
  const auto r = std::from_chars(token.data(), token.data() + token.size(), v);
  if (r.ec != std::errc() || r.ptr != token.data() + token.size() || token.empty()) {
    throw FormatError("not an integer: '" + std::string(token) + "'");
  }
  return v;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot open '" + path + "' for writing");
  return os;
}

}  // namespace

void write_field(std::ostream& os, const FieldState& state) {
  const Grid& g = state.grid();
  json header = {{"model_tag", std::string(to_string(state.model()))},
                 {"dim", g.dim()},
                 {"n", g.shape()},
                 {"L", g.lengths()},
                 {"components", component_names(state.model())}};
  os << header.dump() << '\n';
  const bool cplx_cols = is_complex_model(state.model());
  std::string line;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.unravel(i);
    line.clear();
    for (int a = 0; a < g.dim(); ++a) {
      if (a) line += ',';
      line += std::to_string(idx[a]);
    }
    for (std::size_t c = 0; c < state.num_components(); ++c) {
      const cplx v = state.component(c)[i];
      line += ',';
      line += format_double(v.real());
      if (cplx_cols) {
        line += ',';
        line += format_double(v.imag());
      }
    }
    os << line << '\n';
  }
  if (!os) throw FormatError("write failed");
}

void write_field(const std::string& path, const FieldState& state) {
  auto os = open_out(path);
  write_field(os, state);
}

FieldState read_field(std::istream& is, const std::optional<Grid>& expected_grid,
                      std::optional<ModelTag> expected_model) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("field file is empty");
  json h;
  try {
    h = json::parse(line);
  } catch (const json::exception& e) {
    throw FormatError(std::string("field header is not JSON: ") + e.what());
  }
  ModelTag tag;
  std::vector<int> n;
  std::vector<double> L;
  try {
    tag = model_tag_from_string(h.at("model_tag").get<std::string>());
    const int dim = h.at("dim").get<int>();
    n = h.at("n").get<std::vector<int>>();
    L = h.at("L").get<std::vector<double>>();
    if (static_cast<int>(n.size()) != dim || static_cast<int>(L.size()) != dim) {
      throw FormatError("field header: n and L must have dim entries");
    }
    if (h.at("components").get<std::vector<std::string>>() != component_names(tag)) {
      throw FormatError("field header: component names do not match the model");
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("field header: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("field header: ") + e.what());
  }
  Grid grid = [&] {
    try {
      return Grid(n, L);
    } catch (const InvalidArgument& e) {
      throw FormatError(std::string("field header: ") + e.what());
    }
  }();
  if (expected_model && *expected_model != tag) {
    throw FormatError("field file holds a " + std::string(to_string(tag)) + " state, expected " +
                      std::string(to_string(*expected_model)));
  }
  if (expected_grid && !(*expected_grid == grid)) throw FormatError("field file grid does not match the run grid");

  const std::size_t nc = component_count(tag);
  const std::size_t per = is_complex_model(tag) ? 2 : 1;
  const std::size_t cols = grid.dim() + nc * per;
  ComplexField data(nc * grid.size());
  std::size_t row = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (row >= grid.size()) throw FormatError("field file has more rows than grid points");
    const auto tok = split_commas(line);
    if (tok.size() != cols) throw FormatError("field row " + std::to_string(row) + " has the wrong column count");
    const auto idx = grid.unravel(row);
    for (int a = 0; a < grid.dim(); ++a) {
      if (parse_long(tok[a]) != idx[a]) throw FormatError("field row " + std::to_string(row) + " is out of order");
    }
    for (std::size_t c = 0; c < nc; ++c) {
      const double re = parse_double(tok[grid.dim() + c * per]);
      const double im = per == 2 ? parse_double(tok[grid.dim() + c * per + 1]) : 0.0;
      data[c * grid.size() + row] = {re, im};
    }
    ++row;
  }
  if (row != grid.size()) {
    throw FormatError("field file has " + std::to_string(row) + " rows, expected " + std::to_string(grid.size()));
  }
  try {
    return FieldState(tag, grid, std::move(data));
  } catch (const NumericalFailure& e) {
    throw FormatError(std::string("field file: ") + e.what());
  }
}

FieldState read_field(const std::string& path, const std::optional<Grid>& expected_grid,
                      std::optional<ModelTag> expected_model) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open '" + path + "'");
  return read_field(is, expected_grid, expected_model);
}

void write_trace_csv(std::ostream& os, const EvolutionTrace& tr) {
  os << kTraceHeader << '\n';
  auto cell = [](double x) { return std::isfinite(x) ? format_double(x) : std::string(); };
  for (std::size_t i = 0; i < tr.size(); ++i) {
    os << format_double(tr.t[i]) << ',' << format_double(tr.energy[i]) << ',' << format_double(tr.charge[i]) << ','
       << (i < tr.v.size() ? cell(tr.v[i]) : "") << ',' << cell(tr.sharp[i]) << ',' << format_double(tr.xnorm[i])
       << ',' << (i < tr.orbit_dist.size() ? cell(tr.orbit_dist[i]) : "") << '\n';
  }
  if (!os) throw FormatError("trace write failed");
}

void write_trace_csv(const std::string& path, const EvolutionTrace& trace) {
  auto os = open_out(path);
  write_trace_csv(os, trace);
}

json to_json(const WSpec& w) {
  json j = {{"family", std::string(to_string(w.family))}, {"m_sq", w.m_sq}};
  switch (w.family) {
    case WFamily::SinglePower:
      j["b"] = w.b;
      j["p"] = w.p;
      break;
    case WFamily::DoublePower:
      j["b"] = w.b;
      j["p"] = w.p;
      j["c"] = w.c;
      j["q"] = w.q;
      break;
    case WFamily::Saturating:
      j["m_bar"] = w.m_bar;
      j["alpha"] = w.alpha;
      break;
  }
  return j;
}

json to_json(const PenaltyParams& p) { return {{"delta", p.delta}, {"a", p.a}, {"s", p.s_exp}}; }

json to_json(const HypothesisCertificate& cert) {
  json entries = json::array();
  for (const auto& e : cert.entries) {
    json j = {{"id", e.id},
              {"verdict", std::string(to_string(e.verdict))},
              {"evidence", std::string(to_string(e.evidence))},
              {"samples", e.samples},
              {"parameters", e.parameters}};
    if (!e.counterexample.empty()) j["counterexample"] = e.counterexample;
    if (!e.note.empty()) j["note"] = e.note;
    entries.push_back(std::move(j));
  }
  bool gate = false;
  try {
    gate = cert.gate_pass();
  } catch (const InvalidArgument&) {
  }
  return {{"model", std::string(to_string(cert.model))},
          {"params", to_json(cert.params)},
          {"budget", cert.budget},
          {"seed", cert.seed},
          {"gate_pass", gate},
          {"entries", std::move(entries)}};
}

json to_json(const Lambda0Estimate& est) {
  auto fam = [](const Lambda0Family& f) { return json{{"eps", f.eps}, {"ratios", f.ratios}, {"limit", f.limit}}; };
  return {{"value", est.value},
          {"vanishing", fam(est.vanishing)},
          {"spreading", fam(est.spreading)},
          {"sigma_ref", est.sigma_ref},
          {"carrier", est.carrier},
          {"note", "estimated from probe families, not proved"}};
}

json to_json(const HylomorphyReport& r) {
  return {{"lambda0", r.lambda0},     {"best_ratio", r.best_ratio}, {"amplitude", r.amplitude},
          {"width", r.width},         {"omega", r.omega},           {"carrier", r.carrier},
          {"margin", r.margin},       {"verdict", r.verdict},       {"evaluations", r.evaluations}};
}

json to_json(const ModelSpec& spec, const MinimizeResult& r, bool with_log) {
  json j = {{"energy", r.e_delta},         {"charge", r.c_delta},         {"j_value", r.j_value},
            {"lambda", r.lambda_mult},     {"kkt_residual", r.kkt_residual}, {"grad_norm", r.grad_norm},
            {"iterations", r.iters},       {"converged", r.converged},    {"stop_reason", r.stop_reason}};
  if (spec.tag == ModelTag::NLS) j["mu"] = spec.w.m_sq - 2.0 * r.lambda_mult;
  if (with_log) {
    json log = json::array();
    for (const auto& d : r.log) log.push_back({d.iteration, d.value, d.step, d.grad_norm});
    j["log_columns"] = {"iteration", "value", "step", "grad_norm"};
    j["log"] = std::move(log);
  }
  return j;
}

json to_json(const ModelSpec& spec, const ContinuationResult& res) {
  json members = json::array();
  for (const auto& m : res.members) {
    members.push_back({{"delta", m.delta}, {"penalized", to_json(spec, m.penalized)}, {"refined", to_json(spec, m.refined)}});
  }
  return {{"members", std::move(members)}, {"orbit_distances", res.distances}};
}

json to_json(const StabilityReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) {
    json p = {{"kind", std::string(to_string(r.perturbation.kind))},
              {"epsilon", r.perturbation.epsilon},
              {"band_limit", r.perturbation.band_limit},
              {"seed", r.perturbation.seed},
              {"shift", r.perturbation.shift},
              {"theta", r.perturbation.theta}};
    rows.push_back({{"perturbation", std::move(p)},
                    {"perturbation_norm", r.perturbation_norm},
                    {"v0", r.v0},
                    {"max_v", r.max_v},
                    {"initial_distance", r.initial_distance},
                    {"max_orbit_distance", r.max_orbit_distance},
                    {"blow_up", r.trace.blow_up},
                    {"stable", r.stable},
                    {"verdict", r.verdict}});
  }
  const auto& o = rep.options;
  return {{"e_ref", rep.e_ref},
          {"c_ref", rep.c_ref},
          {"options",
           {{"T", o.T}, {"dt", o.dt}, {"record_every", o.record_every}, {"kappa", o.kappa}, {"abs_tol", o.abs_tol}}},
          {"rows", std::move(rows)},
          {"note", "empirical only: sampled perturbation shells, not a proof of orbital stability"}};
}

json to_json(const std::vector<VScanRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) out.push_back({{"radius", r.radius}, {"min_v", r.min_v}, {"samples", r.samples}});
  return out;
}

void write_json(const std::string& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

void write_text(const std::string& path, const std::string& text) {
  auto os = open_out(path);
  os << text;
  if (!os) throw FormatError("write failed for '" + path + "'");
}

}  // namespace hylo
