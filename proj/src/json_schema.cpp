#include "hylo/json_schema.hpp"

#include "hylo/errors.hpp"

namespace hylo {

namespace {

using nlohmann::json;

bool has_type(const json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "number") return v.is_number();
  if (t == "integer") {
    if (v.is_number_integer()) return true;
    if (v.is_number_float()) {
      const double d = v.get<double>();
      return d == static_cast<double>(static_cast<long long>(d));
    }
    return false;
  }
  throw InvalidArgument("schema uses unknown type '" + t + "'");
}

std::string dump_short(const json& v) {
  std::string s = v.dump();
  return s.size() > 40 ? s.substr(0, 37) + "..." : s;
}

void check(const json& schema, const json& v, const std::string& ptr, std::vector<SchemaIssue>& out) {
  if (!schema.is_object()) throw InvalidArgument("schema node at " + ptr + " is not an object");
  auto fail = [&](std::string msg) { out.push_back({ptr, std::move(msg)}); };

  if (auto it = schema.find("type"); it != schema.end()) {
    bool ok = false;
    if (it->is_array()) {
      for (const auto& t : *it) ok = ok || has_type(v, t.get<std::string>());
    } else {
      ok = has_type(v, it->get<std::string>());
    }
    if (!ok) {
      fail("expected type " + it->dump() + ", got " + dump_short(v));
      return;
    }
  }
  if (auto it = schema.find("const"); it != schema.end() && *it != v) {
    fail("expected " + it->dump());
  }
  if (auto it = schema.find("enum"); it != schema.end()) {
    bool found = false;
    for (const auto& e : *it) found = found || e == v;
    if (!found) fail(dump_short(v) + " is not one of " + it->dump());
  }
  if (auto it = schema.find("anyOf"); it != schema.end()) {
    bool any = false;
    for (const auto& alt : *it) {
      std::vector<SchemaIssue> scratch;
      check(alt, v, ptr, scratch);
      if (scratch.empty()) {
        any = true;
        break;
      }
    }
    if (!any) fail(dump_short(v) + " matches none of the allowed forms");
  }
  if (v.is_number()) {
    const double x = v.get<double>();
    if (auto it = schema.find("minimum"); it != schema.end() && x < it->get<double>()) {
      fail("value " + dump_short(v) + " is below the minimum " + it->dump());
    }
    if (auto it = schema.find("maximum"); it != schema.end() && x > it->get<double>()) {
      fail("value " + dump_short(v) + " is above the maximum " + it->dump());
    }
    if (auto it = schema.find("exclusiveMinimum"); it != schema.end() && !(x > it->get<double>())) {
      fail("value " + dump_short(v) + " must exceed " + it->dump());
    }
    if (auto it = schema.find("exclusiveMaximum"); it != schema.end() && !(x < it->get<double>())) {
      fail("value " + dump_short(v) + " must stay below " + it->dump());
    }
  }
  if (v.is_array()) {
    if (auto it = schema.find("minItems"); it != schema.end() && v.size() < it->get<std::size_t>()) {
      fail("needs at least " + it->dump() + " items");
    }
    if (auto it = schema.find("maxItems"); it != schema.end() && v.size() > it->get<std::size_t>()) {
      fail("allows at most " + it->dump() + " items");
    }
    if (auto it = schema.find("items"); it != schema.end()) {
      for (std::size_t i = 0; i < v.size(); ++i) check(*it, v[i], ptr + "/" + std::to_string(i), out);
    }
  }
  if (v.is_object()) {
    const json* props = nullptr;
    if (auto it = schema.find("properties"); it != schema.end()) props = &*it;
    if (auto it = schema.find("required"); it != schema.end()) {
      for (const auto& r : *it) {
        if (!v.contains(r.get<std::string>())) fail("missing required member \"" + r.get<std::string>() + "\"");
      }
    }
    const auto extra = schema.find("additionalProperties");
    const bool closed = extra != schema.end() && extra->is_boolean() && !extra->get<bool>();
    for (const auto& [key, val] : v.items()) {
      if (props && props->contains(key)) {
        check((*props)[key], val, ptr + "/" + key, out);
      } else if (closed) {
        out.push_back({ptr + "/" + key, "unknown member \"" + key + "\""});
      }
    }
  }
}

}  // namespace

std::vector<SchemaIssue> validate_schema(const nlohmann::json& schema, const nlohmann::json& instance) {
  std::vector<SchemaIssue> out;
  check(schema, instance, "", out);
  return out;
}

}  // namespace hylo
