#pragma once

// Command-line surface. run_cli is kept in a header so tests can drive it
// in-process; tools/bor.cpp only forwards argv.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bor/bellman.hpp"
#include "bor/error.hpp"
#include "bor/exact_arith.hpp"
#include "bor/io.hpp"
#include "bor/mdp.hpp"
#include "bor/solver.hpp"

namespace bor {

namespace exit_code {
inline constexpr int positive = 0;
inline constexpr int negative = 1;
inline constexpr int undecided = 2;
inline constexpr int usage = 64;
inline constexpr int data = 65;
}  // namespace exit_code

namespace detail {

struct CliOptions {
  std::string mdp_path;
  std::string objective = "max";
  std::string format = "json";
  std::string start;
  std::string target;
  std::size_t steps = 0;
  std::size_t bound = 0;
  bool remove = false;
};

inline Objective parse_objective(const std::string& s) {
  return s == "min" ? Objective::Min : Objective::Max;
}

inline Json argopt_to_json(const Mdp& m, const std::vector<std::vector<std::string>>& argopt) {
  if (argopt.empty()) return nullptr;
  Json out = Json::object();
  for (std::size_t i = 0; i < argopt.size(); ++i) out[m.decision_states[i]] = argopt[i];
  return out;
}

inline std::string argopt_to_text(const Mdp& m,
                                  const std::vector<std::vector<std::string>>& argopt) {
  std::string out;
  for (std::size_t i = 0; i < argopt.size(); ++i) {
    out += (i ? " " : "") + m.decision_states[i] + ":{";
    for (std::size_t k = 0; k < argopt[i].size(); ++k) out += (k ? "," : "") + argopt[i][k];
    out += "}";
  }
  return out;
}

inline int verdict_exit(const Verdict& v) {
  if (std::holds_alternative<Reachable>(v)) return exit_code::positive;
  if (std::holds_alternative<Unreachable>(v)) return exit_code::negative;
  return exit_code::undecided;
}

// EC-free operator, or a data error pointing at `mec --remove`.
inline BellmanOperator load_operator(const CliOptions& o) {
  Mdp m = load_mdp(o.mdp_path);
  const auto mecs = maximal_end_components(m);
  if (!mecs.empty())
    throw Error(Errc::InvalidMdp, o.mdp_path + " has " + std::to_string(mecs.size()) +
                                      " end component(s); reduce it with 'mec --remove'");
  return BellmanOperator(std::move(m), parse_objective(o.objective));
}

inline int cmd_check(const CliOptions& o, std::ostream& out) {
  const BellmanOperator op = load_operator(o);
  const Verdict v = decide_bor(op, parse_vector_csv(o.start), parse_vector_csv(o.target));
  if (o.format == "json")
    out << verdict_to_json(v).dump() << "\n";
  else
    out << verdict_to_text(v);
  return verdict_exit(v);
}

inline int cmd_fixedpoint(const CliOptions& o, std::ostream& out) {
  const BellmanOperator op = load_operator(o);
  const RatVector mu = fixed_point(op);
  if (o.format == "json")
    out << Json{{"objective", objective_name(op.objective())}, {"mu", vector_to_json(mu)}}.dump()
        << "\n";
  else
    out << "mu = " << format_vector(mu) << "\n";
  return exit_code::positive;
}

inline int cmd_classify(const CliOptions& o, std::ostream& out) {
  const BellmanOperator op = load_operator(o);
  const RatVector mu = fixed_point(op);
  const auto classes = classify_actions(op, mu);
  const Rational delta = tight_radius(op, mu);
  if (o.format == "json") {
    Json actions = Json::object();
    for (const auto& a : op.mdp().actions)
      actions[a.id] = classes.at(a.id) == ActionClass::Tight ? "tight" : "leaking";
    out << Json{{"mu", vector_to_json(mu)}, {"actions", actions}, {"delta", to_string(delta)}}
               .dump()
        << "\n";
  } else {
    out << "mu = " << format_vector(mu) << "\n";
    for (const auto& a : op.mdp().actions)
      out << a.owner << " " << a.id << " "
          << (classes.at(a.id) == ActionClass::Tight ? "tight" : "leaking") << "\n";
    out << "delta = " << to_string(delta) << "\n";
  }
  return exit_code::positive;
}

inline int cmd_trace(const CliOptions& o, std::ostream& out) {
  const BellmanOperator op = load_operator(o);
  const auto steps = trace(op, parse_vector_csv(o.start), o.steps);
  if (o.format == "json") {
    Json arr = Json::array();
    for (std::size_t k = 0; k < steps.size(); ++k)
      arr.push_back({{"n", k},
                     {"value", vector_to_json(steps[k].value)},
                     {"argopt", argopt_to_json(op.mdp(), steps[k].argopt)}});
    out << Json{{"trace", arr}}.dump() << "\n";
  } else {
    for (std::size_t k = 0; k < steps.size(); ++k) {
      out << k << ": " << format_vector(steps[k].value);
      if (!steps[k].argopt.empty()) out << "  " << argopt_to_text(op.mdp(), steps[k].argopt);
      out << "\n";
    }
  }
  return exit_code::positive;
}

inline int cmd_mortality(const CliOptions& o, std::ostream& out) {
  const BellmanOperator op = load_operator(o);
  const MortalityVerdict v = decide_mortality(op);
  if (o.format == "json") {
    out << Json{{"mortal", v.mortal},
                {"from_bottom", verdict_to_json(v.from_bottom)},
                {"from_top", verdict_to_json(v.from_top)}}
               .dump()
        << "\n";
  } else {
    out << (v.mortal ? "mortal" : "not mortal") << "\n"
        << "from 0: " << verdict_to_text(v.from_bottom) << "from 1: " << verdict_to_text(v.from_top);
  }
  return v.mortal ? exit_code::positive : exit_code::negative;
}

inline int cmd_mec(const CliOptions& o, std::ostream& out) {
  const Mdp m = load_mdp(o.mdp_path);
  if (o.remove) {
    const Mdp reduced = remove_end_components(m, parse_objective(o.objective));
    out << serialize_mdp(reduced);
    return exit_code::positive;
  }
  const auto mecs = maximal_end_components(m);
  if (o.format == "json") {
    Json arr = Json::array();
    for (const auto& ec : mecs)
      arr.push_back({{"states", Json(std::vector<std::string>(ec.states.begin(), ec.states.end()))},
                     {"actions",
                      Json(std::vector<std::string>(ec.actions.begin(), ec.actions.end()))}});
    out << Json{{"end_components", arr}}.dump() << "\n";
  } else {
    if (mecs.empty()) out << "no end components\n";
    for (const auto& ec : mecs) {
      out << "states {";
      std::size_t k = 0;
      for (const auto& s : ec.states) out << (k++ ? ", " : "") << s;
      out << "} actions {";
      k = 0;
      for (const auto& a : ec.actions) out << (k++ ? ", " : "") << a;
      out << "}\n";
    }
  }
  return exit_code::positive;
}

inline int cmd_oracle(const CliOptions& o, std::ostream& out) {
  const BellmanOperator op = load_operator(o);
  const auto n =
      brute_force_reach(op, parse_vector_csv(o.start), parse_vector_csv(o.target), o.bound);
  if (o.format == "json") {
    Json j{{"reached", n.has_value()}, {"bound", o.bound}};
    if (n) j["n"] = *n;
    out << j.dump() << "\n";
  } else if (n) {
    out << "reached n=" << *n << "\n";
  } else {
    out << "not reached within " << o.bound << " steps\n";
  }
  return n ? exit_code::positive : exit_code::negative;
}

}  // namespace detail

/// Runs one command; args excludes the program name.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bellman operator reachability on MDPs with exact rationals", "bor"};
  app.require_subcommand(1);
  detail::CliOptions o;
  std::function<int(const detail::CliOptions&, std::ostream&)> handler;

  auto add = [&](const std::string& name, const std::string& help, auto fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--mdp", o.mdp_path, "MDP document")->required();
    sub->add_option("--format", o.format, "output format")
        ->check(CLI::IsMember({"json", "text"}));
    sub->callback([&handler, fn] { handler = fn; });
    return sub;
  };
  auto objective = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--objective", o.objective, "max or min")
                    ->check(CLI::IsMember({"max", "min"}));
    if (required) opt->required();
  };

  auto* check = add("check", "decide whether the start vector reaches the target", detail::cmd_check);
  objective(check, true);
  check->add_option("--start", o.start, "start vector, e.g. 1,1/3,2/3")->required();
  check->add_option("--target", o.target, "target vector")->required();

  objective(add("fixedpoint", "print the fixed point", detail::cmd_fixedpoint), true);
  objective(add("classify", "classify actions as tight or leaking", detail::cmd_classify), true);

  auto* tr = add("trace", "print iterates with the optimal actions", detail::cmd_trace);
  objective(tr, true);
  tr->add_option("--start", o.start, "start vector")->required();
  tr->add_option("--steps", o.steps, "number of steps")->required();

  objective(add("mortality", "decide whether every start vector reaches the fixed point",
                detail::cmd_mortality),
            true);

  auto* mec = add("mec", "list maximal end components or remove them", detail::cmd_mec);
  objective(mec, false);
  mec->add_flag("--remove", o.remove, "print the reduced MDP");

  auto* oracle = add("oracle", "iterate up to a bound and look for the target", detail::cmd_oracle);
  objective(oracle, true);
  oracle->add_option("--start", o.start, "start vector")->required();
  oracle->add_option("--target", o.target, "target vector")->required();
  oracle->add_option("--bound", o.bound, "maximal number of steps")->required();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_code::positive : exit_code::usage;
  }
  if (o.remove && mec->count("--objective") == 0) {
    err << "mec --remove requires --objective\n";
    return exit_code::usage;
  }

  try {
    return handler(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::data;
  }
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run_cli(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace bor
