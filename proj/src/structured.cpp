#include "smot/structured.hpp"

#include <algorithm>
#include <cctype>

namespace smot {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool type_matches(const nlohmann::json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  return false;
}

std::optional<std::string> check(const nlohmann::json& v, const nlohmann::json& schema,
                                 const std::string& path) {
  if (schema.is_boolean()) {
    if (!schema.get<bool>()) return path + ": not allowed";
    return std::nullopt;
  }
  if (!schema.is_object()) return std::nullopt;

  if (auto it = schema.find("type"); it != schema.end()) {
    bool ok = false;
    if (it->is_string()) {
      ok = type_matches(v, it->get<std::string>());
    } else if (it->is_array()) {
      ok = std::any_of(it->begin(), it->end(),
                       [&](const nlohmann::json& t) { return type_matches(v, t.get<std::string>()); });
    }
    if (!ok) return path + ": expected type " + it->dump();
  }
  if (auto it = schema.find("enum"); it != schema.end()) {
    if (std::find(it->begin(), it->end(), v) == it->end()) return path + ": value not in enum";
  }
  if (v.is_object()) {
    const auto props = schema.value("properties", nlohmann::json::object());
    if (auto req = schema.find("required"); req != schema.end()) {
      for (const auto& name : *req) {
        if (!v.contains(name.get<std::string>())) {
          return path + ": missing required key '" + name.get<std::string>() + "'";
        }
      }
    }
    for (const auto& [key, child] : v.items()) {
      const std::string child_path = path + "/" + key;
      if (props.contains(key)) {
        if (auto err = check(child, props.at(key), child_path)) return err;
      } else if (auto extra = schema.find("additionalProperties"); extra != schema.end()) {
        if (extra->is_boolean() && !extra->get<bool>()) return child_path + ": unexpected key";
        if (auto err = check(child, *extra, child_path)) return err;
      }
    }
  }
  if (v.is_array()) {
    if (schema.contains("minItems") && v.size() < schema["minItems"].get<std::size_t>()) {
      return path + ": too few items";
    }
    if (schema.contains("maxItems") && v.size() > schema["maxItems"].get<std::size_t>()) {
      return path + ": too many items";
    }
    if (auto items = schema.find("items"); items != schema.end()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (auto err = check(v[i], *items, path + "/" + std::to_string(i))) return err;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::string strip_code_fences(std::string_view text) {
  std::string_view s = trim(text);
  if (s.starts_with("```")) {
    const auto eol = s.find('\n');
    if (eol == std::string_view::npos) return std::string(s);
    s.remove_prefix(eol + 1);
    if (const auto close = s.rfind("```"); close != std::string_view::npos) s = s.substr(0, close);
    s = trim(s);
  }
  return std::string(s);
}

std::optional<std::string> validate_against_schema(const nlohmann::json& value,
                                                   const nlohmann::json& schema) {
  return check(value, schema, "");
}

}  // namespace smot
