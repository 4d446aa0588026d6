#pragma once

// Field files, trace CSV and JSON reports.
//
// Field file: one JSON header line
//   {"model_tag":"NLS","dim":1,"n":[512],"L":[40.0],"components":["psi"]}
// followed by one CSV row per grid point: the index tuple, then re,im for
// each complex component (a single column for the real NBE fields). Values
// carry 17 significant digits so a write/read round trip is exact.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hylo/checkers.hpp"
#include "hylo/stability.hpp"

namespace hylo {

// Scientific notation with 17 significant digits ("1.0000000000000000e+00").
std::string format_double(double x);
// Strict decimal parse of a whole token; throws FormatError.
double parse_double(std::string_view token);

void write_field(std::ostream& os, const FieldState& state);
void write_field(const std::string& path, const FieldState& state);
// Throws FormatError on malformed input, on a header that disagrees with
// `expected_grid` / `expected_model` when given, and on missing or extra rows.
FieldState read_field(std::istream& is, const std::optional<Grid>& expected_grid = std::nullopt,
                      std::optional<ModelTag> expected_model = std::nullopt);
FieldState read_field(const std::string& path, const std::optional<Grid>& expected_grid = std::nullopt,
                      std::optional<ModelTag> expected_model = std::nullopt);

// Header t,E,C,V,sharp,xnorm,orbit_dist; V and orbit_dist are empty without
// a reference, sharp is empty where undefined.
inline constexpr const char* kTraceHeader = "t,E,C,V,sharp,xnorm,orbit_dist";
void write_trace_csv(std::ostream& os, const EvolutionTrace& trace);
void write_trace_csv(const std::string& path, const EvolutionTrace& trace);

nlohmann::json to_json(const WSpec& w);
nlohmann::json to_json(const PenaltyParams& p);
nlohmann::json to_json(const HypothesisCertificate& cert);
nlohmann::json to_json(const Lambda0Estimate& est);
nlohmann::json to_json(const HylomorphyReport& rep);
// Summary without the state; `with_log` adds the descent log.
nlohmann::json to_json(const ModelSpec& spec, const MinimizeResult& res, bool with_log = false);
nlohmann::json to_json(const ModelSpec& spec, const ContinuationResult& res);
nlohmann::json to_json(const StabilityReport& rep);
nlohmann::json to_json(const std::vector<VScanRow>& rows);

void write_json(const std::string& path, const nlohmann::json& doc);
void write_text(const std::string& path, const std::string& text);

}  // namespace hylo
