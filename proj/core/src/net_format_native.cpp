#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "jointprof/net_format.hpp"

namespace jointprof {

namespace {

using nlohmann::ordered_json;

// Line/column of a byte offset, 1-based.
std::pair<int, int> locate(const std::string& text, std::size_t offset) {
  int line = 1;
  int column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

// Best-effort position of a quoted name for semantic diagnostics.
std::pair<int, int> locate_token(const std::string& text, const std::string& token) {
  const auto pos = text.find('"' + token + '"');
  if (pos == std::string::npos) return {1, 1};
  return locate(text, pos);
}

[[noreturn]] void semantic_error(const std::string& text, const std::string& anchor,
                                 const std::string& message) {
  const auto [line, column] = locate_token(text, anchor);
  throw ParseError(ParseDiagnostic{Severity::kError, line, column, message});
}

}  // namespace

Network parse_native(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, column] = locate(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError(ParseDiagnostic{Severity::kError, line, column, e.what()});
  }

  if (!doc.is_object() || !doc.contains("variables") || !doc["variables"].is_array()) {
    throw ParseError(ParseDiagnostic{
        Severity::kError, 1, 1, "expected an object with a 'variables' array"});
  }
  const std::string name = doc.value("name", std::string{});

  std::vector<Variable> vars;
  std::vector<std::string> declared;
  for (const auto& jv : doc["variables"]) {
    Variable v;
    if (!jv.is_object() || !jv.contains("name") || !jv["name"].is_string()) {
      throw ParseError(ParseDiagnostic{Severity::kError, 1, 1,
                                       "every variable needs a string 'name'"});
    }
    v.name = jv["name"].get<std::string>();
    const auto here = [&](const std::string& msg) { semantic_error(text, v.name, msg); };

    if (!jv.contains("outcomes") || !jv["outcomes"].is_array() ||
        jv["outcomes"].size() < 2) {
      here("variable '" + v.name + "' needs an 'outcomes' array of at least 2 labels");
    }
    for (const auto& o : jv["outcomes"]) {
      if (!o.is_string()) here("outcome labels of '" + v.name + "' must be strings");
      v.outcomes.push_back(o.get<std::string>());
    }

    if (jv.contains("parents")) {
      for (const auto& p : jv["parents"]) {
        if (!p.is_string()) here("parents of '" + v.name + "' must be variable names");
        const std::string pname = p.get<std::string>();
        const auto it = std::find(declared.begin(), declared.end(), pname);
        if (it == declared.end()) {
          here("variable '" + v.name + "' lists parent '" + pname +
               "', which is not declared before it (the file must be in "
               "topological order)");
        }
        v.parents.push_back(static_cast<std::uint32_t>(it - declared.begin()));
      }
    }

    if (!jv.contains("cpt") || !jv["cpt"].is_array()) {
      here("variable '" + v.name + "' needs a 'cpt' array of columns");
    }
    std::uint64_t configs = 1;
    for (const std::uint32_t p : v.parents) configs *= vars[p].outcomes.size();
    if (jv["cpt"].size() != configs) {
      here("variable '" + v.name + "' has " + std::to_string(jv["cpt"].size()) +
           " CPT columns, expected " + std::to_string(configs) +
           " (one per parent configuration)");
    }
    for (std::size_t c = 0; c < jv["cpt"].size(); ++c) {
      const auto& col = jv["cpt"][c];
      if (!col.is_array() || col.size() != v.outcomes.size()) {
        here("variable '" + v.name + "', column " + std::to_string(c) + ": expected " +
             std::to_string(v.outcomes.size()) + " probabilities");
      }
      for (const auto& q : col) {
        if (!q.is_number()) {
          here("variable '" + v.name + "', column " + std::to_string(c) +
               ": probabilities must be numbers");
        }
        v.cpt.push_back(q.get<double>());
      }
    }
    if (jv.contains("properties")) {
      for (const auto& s : jv["properties"]) v.properties.push_back(s.get<std::string>());
    }
    declared.push_back(v.name);
    vars.push_back(std::move(v));
  }

  try {
    return Network::build(name, std::move(vars));
  } catch (const ValidationError& e) {
    // Surface the offending variable's position when the message names one.
    std::string anchor;
    const std::string what = e.what();
    const auto q1 = what.find('\'');
    const auto q2 = what.find('\'', q1 + 1);
    if (q1 != std::string::npos && q2 != std::string::npos) {
      anchor = what.substr(q1 + 1, q2 - q1 - 1);
    }
    const auto [line, column] = locate_token(text, anchor);
    throw ParseError(ParseDiagnostic{Severity::kError, line, column, what});
  }
}

std::string write_native(const Network& net) {
  ordered_json doc;
  doc["format"] = "jointprof-net";
  doc["version"] = 1;
  doc["name"] = net.name();
  doc["variables"] = ordered_json::array();
  for (const Variable& v : net.variables()) {
    ordered_json jv;
    jv["name"] = v.name;
    jv["outcomes"] = v.outcomes;
    ordered_json parents = ordered_json::array();
    for (const std::uint32_t p : v.parents) parents.push_back(net.variable(p).name);
    jv["parents"] = std::move(parents);
    ordered_json cpt = ordered_json::array();
    const std::uint32_t k = v.outcome_count();
    for (std::uint64_t c = 0; c < v.config_count(); ++c) {
      ordered_json column = ordered_json::array();
      for (std::uint32_t o = 0; o < k; ++o) column.push_back(v.cpt[c * k + o]);
      cpt.push_back(std::move(column));
    }
    jv["cpt"] = std::move(cpt);
    if (!v.properties.empty()) jv["properties"] = v.properties;
    doc["variables"].push_back(std::move(jv));
  }
  return doc.dump(2) + "\n";
}

Network load_network(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError(
        ParseDiagnostic{Severity::kError, 1, 1, "cannot open '" + path + "'"});
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".bif") == 0) {
    return parse_bif(text);
  }
  return parse_native(text);
}

}  // namespace jointprof
