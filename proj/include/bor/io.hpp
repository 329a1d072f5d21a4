#pragma once

// MDP documents and machine-readable output.
//
// An MDP document is JSON:
//
//   {
//     "states": ["s1", "s2"],
//     "target": "t",
//     "sink": "fail",
//     "actions": [
//       {"name": "alpha", "state": "s1", "dist": {"s2": "1/2", "t": "1/3"}}
//     ]
//   }
//
// Probabilities are rational strings. A distribution summing to less than one
// sends the remainder to the sink; serialization always writes it out.

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "bor/bellman.hpp"
#include "bor/error.hpp"
#include "bor/exact_arith.hpp"
#include "bor/mdp.hpp"
#include "bor/solver.hpp"

namespace bor {

using Json = nlohmann::ordered_json;

namespace detail {

inline const Json& require_field(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw Error(Errc::ParseError, path + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(Errc::ParseError, path + ": missing field '" + key + "'");
  return *it;
}

inline std::string require_string(const Json& v, const std::string& path) {
  if (!v.is_string()) throw Error(Errc::ParseError, path + ": expected a string");
  return v.get<std::string>();
}

inline Rational require_rational(const Json& v, const std::string& path) {
  if (v.is_number_integer()) return Rational(Integer(v.dump(), 10));
  if (!v.is_string())
    throw Error(Errc::ParseError, path + ": expected a rational string such as \"7/12\"");
  try {
    return parse_rational(v.get<std::string>());
  } catch (const Error& e) {
    throw Error(Errc::ParseError, path + ": " + e.what());
  }
}

inline std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace detail

/// Parses an MDP document, materializes implicit sink mass and validates.
inline Mdp parse_mdp(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const Json::parse_error& e) {
    throw Error(Errc::ParseError, detail::line_column(text, e.byte) + ": malformed JSON");
  }
  Mdp m;
  const Json& states = detail::require_field(doc, "states", "");
  if (!states.is_array()) throw Error(Errc::ParseError, "/states: expected an array");
  if (states.empty()) throw Error(Errc::ParseError, "/states: no decision states");
  for (std::size_t i = 0; i < states.size(); ++i)
    m.decision_states.push_back(
        detail::require_string(states[i], "/states/" + std::to_string(i)));
  m.target = detail::require_string(detail::require_field(doc, "target", ""), "/target");
  m.sink = detail::require_string(detail::require_field(doc, "sink", ""), "/sink");

  const Json& actions = detail::require_field(doc, "actions", "");
  if (!actions.is_array()) throw Error(Errc::ParseError, "/actions: expected an array");
  for (std::size_t k = 0; k < actions.size(); ++k) {
    const std::string path = "/actions/" + std::to_string(k);
    const Json& a = actions[k];
    Action act;
    act.id = detail::require_string(detail::require_field(a, "name", path), path + "/name");
    act.owner = detail::require_string(detail::require_field(a, "state", path), path + "/state");
    const Json& dist = detail::require_field(a, "dist", path);
    if (!dist.is_object()) throw Error(Errc::ParseError, path + "/dist: expected an object");
    Rational sum = 0;
    for (const auto& [succ, p] : dist.items()) {
      Rational q = detail::require_rational(p, path + "/dist/" + succ);
      if (q == 0) continue;
      sum += q;
      act.dist[succ] += q;
    }
    if (sum < 1) act.dist[m.sink] += 1 - sum;
    m.actions.push_back(std::move(act));
  }

  const auto violations = validate_mdp(m);
  if (!violations.empty()) {
    std::string msg;
    for (const auto& v : violations) msg += (msg.empty() ? "" : "; ") + v;
    throw Error(Errc::ValidationError, msg);
  }
  return m;
}

inline Mdp load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ParseError, "cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_mdp(buffer.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

inline Json mdp_to_json(const Mdp& m) {
  Json doc;
  doc["states"] = m.decision_states;
  doc["target"] = m.target;
  doc["sink"] = m.sink;
  doc["actions"] = Json::array();
  for (const auto& a : m.actions) {
    Json dist = Json::object();
    for (const auto& [succ, p] : a.dist) dist[succ] = to_string(p);
    doc["actions"].push_back({{"name", a.id}, {"state", a.owner}, {"dist", dist}});
  }
  return doc;
}

inline std::string serialize_mdp(const Mdp& m) { return mdp_to_json(m).dump(2) + "\n"; }

/// Parses "1,1/3,2/3" into a vector.
inline RatVector parse_vector_csv(std::string_view csv) {
  RatVector out;
  std::size_t begin = 0;
  while (true) {
    std::size_t end = csv.find(',', begin);
    std::string_view item = csv.substr(begin, end == std::string_view::npos ? csv.npos : end - begin);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    out.push_back(parse_rational(item));
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return out;
}

/// "(13/18, 2/3, 1/4)"
inline std::string format_vector(const RatVector& v) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += to_string(v[i]);
  }
  return out + ")";
}

inline Json vector_to_json(const RatVector& v) {
  Json out = Json::array();
  for (const auto& q : v) out.push_back(to_string(q));
  return out;
}

inline Json verdict_to_json(const Verdict& v) {
  Json out;
  out["verdict"] = std::string(verdict_name(v));
  if (const auto* r = std::get_if<Reachable>(&v)) {
    out["n"] = r->n;
    out["trace"] = Json::array();
    for (const auto& x : r->trace) out["trace"].push_back(vector_to_json(x));
  } else if (const auto* u = std::get_if<Unreachable>(&v)) {
    out["certificate"] = std::string(certificate_name(u->certificate));
    out["horizon"] = u->horizon;
  } else {
    const auto& d = std::get<Undecided>(v);
    out["reason"] = d.reason;
    out["horizon"] = d.horizon;
  }
  return out;
}

inline std::string verdict_to_text(const Verdict& v) {
  std::string out(verdict_name(v));
  if (const auto* r = std::get_if<Reachable>(&v)) {
    out += " n=" + std::to_string(r->n) + "\n";
    for (std::size_t k = 0; k < r->trace.size(); ++k)
      out += "  " + std::to_string(k) + ": " + format_vector(r->trace[k]) + "\n";
  } else if (const auto* u = std::get_if<Unreachable>(&v)) {
    out += " certificate=" + std::string(certificate_name(u->certificate)) +
           " horizon=" + std::to_string(u->horizon) + "\n";
  } else {
    const auto& d = std::get<Undecided>(v);
    out += " reason=" + d.reason + " horizon=" + std::to_string(d.horizon) + "\n";
  }
  return out;
}

}  // namespace bor
