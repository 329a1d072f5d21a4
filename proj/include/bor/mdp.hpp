#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bor/error.hpp"
#include "bor/exact_arith.hpp"

namespace bor {

enum class Objective { Max, Min };

constexpr std::string_view objective_name(Objective obj) noexcept {
  return obj == Objective::Max ? "max" : "min";
}

/// One probabilistic choice of a decision state. The distribution is explicit
/// over decision states, target and sink and sums to exactly one.
struct Action {
  std::string id;
  std::string owner;
  std::map<std::string, Rational> dist;

  bool operator==(const Action&) const = default;
};

/// An MDP with a designated target t and sink s-. Decision states are the
/// states other than t and s-; their count is the dimension d. Actions are
/// kept in a flat list; the actions of a state are ordered by appearance.
struct Mdp {
  std::vector<std::string> decision_states;
  std::string target;
  std::string sink;
  std::vector<Action> actions;

  std::size_t dimension() const { return decision_states.size(); }

  std::optional<std::size_t> index_of(std::string_view state) const {
    for (std::size_t i = 0; i < decision_states.size(); ++i)
      if (decision_states[i] == state) return i;
    return std::nullopt;
  }

  std::vector<const Action*> actions_of(std::string_view state) const {
    std::vector<const Action*> out;
    for (const auto& a : actions)
      if (a.owner == state) out.push_back(&a);
    return out;
  }

  bool operator==(const Mdp&) const = default;
};

struct EndComponent {
  std::set<std::string> states;
  std::set<std::string> actions;

  bool operator==(const EndComponent&) const = default;
};

/// Reports every violated structural invariant; an empty result means valid.
inline std::vector<std::string> validate_mdp(const Mdp& m) {
  std::vector<std::string> violations;
  std::set<std::string> states;
  if (m.decision_states.empty()) violations.push_back("no decision states");
  for (const auto& s : m.decision_states)
    if (!states.insert(s).second)
      violations.push_back("duplicate decision state '" + s + "'");
  if (m.target == m.sink)
    violations.push_back("target and sink coincide ('" + m.target + "')");
  if (states.count(m.target))
    violations.push_back("target '" + m.target + "' listed as a decision state");
  if (states.count(m.sink))
    violations.push_back("sink '" + m.sink + "' listed as a decision state");

  std::set<std::string> ids;
  std::set<std::string> owners;
  for (const auto& a : m.actions) {
    if (!ids.insert(a.id).second)
      violations.push_back("duplicate action id '" + a.id + "'");
    if (a.owner == m.target || a.owner == m.sink)
      violations.push_back("action '" + a.id + "' attached to absorbing state '" +
                           a.owner + "'");
    else if (!states.count(a.owner))
      violations.push_back("action '" + a.id + "' owned by unknown state '" +
                           a.owner + "'");
    owners.insert(a.owner);
    Rational sum = 0;
    for (const auto& [succ, p] : a.dist) {
      if (!states.count(succ) && succ != m.target && succ != m.sink)
        violations.push_back("action '" + a.id + "' references unknown state '" +
                             succ + "'");
      if (p <= 0 || p > 1)
        violations.push_back("action '" + a.id + "' probability " + to_string(p) +
                             " to '" + succ + "' outside (0,1]");
      sum += p;
    }
    if (sum != 1)
      violations.push_back("action '" + a.id + "' distribution sums to " +
                           to_string(sum));
  }
  for (const auto& s : m.decision_states)
    if (!owners.count(s)) violations.push_back("decision state '" + s + "' has no actions");
  return violations;
}

inline void require_valid(const Mdp& m) {
  const auto violations = validate_mdp(m);
  if (violations.empty()) return;
  std::string msg;
  for (const auto& v : violations) msg += (msg.empty() ? "" : "; ") + v;
  throw Error(Errc::InvalidMdp, msg);
}

namespace detail {

// Strongly connected components of a graph on vertices [0, n); returns a
// component id per vertex.
inline std::vector<std::size_t> scc_ids(
    const std::vector<std::vector<std::size_t>>& adj) {
  const std::size_t n = adj.size();
  constexpr std::size_t unvisited = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t counter = 0, components = 0;

  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w : adj[v]) {
      if (index[w] == unvisited) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = components;
      } while (w != v);
      ++components;
    }
  };
  for (std::size_t v = 0; v < n; ++v)
    if (index[v] == unvisited) visit(v);
  return comp;
}

}  // namespace detail

/// Maximal end components by iterated SCC pruning: drop actions whose support
/// leaves the SCC of their owner, drop states left without actions, and
/// repeat until nothing changes.
inline std::vector<EndComponent> maximal_end_components(const Mdp& m) {
  require_valid(m);
  const std::size_t d = m.dimension();
  std::vector<bool> alive_state(d, true);
  std::vector<std::vector<std::size_t>> alive_actions(d);
  std::vector<std::size_t> owner_of(m.actions.size());
  for (std::size_t k = 0; k < m.actions.size(); ++k) {
    owner_of[k] = *m.index_of(m.actions[k].owner);
    alive_actions[owner_of[k]].push_back(k);
  }

  auto successors = [&](std::size_t k) {
    std::vector<std::optional<std::size_t>> out;
    for (const auto& [succ, p] : m.actions[k].dist) out.push_back(m.index_of(succ));
    return out;
  };

  std::vector<std::size_t> comp(d, 0);
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::vector<std::size_t>> adj(d);
    for (std::size_t i = 0; i < d; ++i) {
      if (!alive_state[i]) continue;
      for (std::size_t k : alive_actions[i])
        for (const auto& j : successors(k))
          if (j && alive_state[*j]) adj[i].push_back(*j);
    }
    comp = detail::scc_ids(adj);
    for (std::size_t i = 0; i < d; ++i) {
      if (!alive_state[i]) continue;
      auto& acts = alive_actions[i];
      const auto old_size = acts.size();
      std::erase_if(acts, [&](std::size_t k) {
        for (const auto& j : successors(k))
          if (!j || !alive_state[*j] || comp[*j] != comp[i]) return true;
        return false;
      });
      if (acts.size() != old_size) changed = true;
      if (acts.empty()) {
        alive_state[i] = false;
        changed = true;
      }
    }
  }

  std::map<std::size_t, EndComponent> by_comp;
  for (std::size_t i = 0; i < d; ++i) {
    if (!alive_state[i]) continue;
    auto& ec = by_comp[comp[i]];
    ec.states.insert(m.decision_states[i]);
    for (std::size_t k : alive_actions[i]) ec.actions.insert(m.actions[k].id);
  }
  std::vector<EndComponent> out;
  for (auto& [c, ec] : by_comp) out.push_back(std::move(ec));
  std::sort(out.begin(), out.end(), [](const EndComponent& a, const EndComponent& b) {
    return *a.states.begin() < *b.states.begin();
  });
  return out;
}

/// Rewrites m into an MDP without end components and with the same optimal
/// reachability probabilities on the surviving states.
///
/// Min: every MEC collapses into the sink. Max: bottom MECs (no action of a
/// member leaves the MEC) collapse into the sink; each other MEC becomes one
/// fresh state carrying the leaving actions of its members, with their
/// in-MEC mass re-aimed at the fresh state. When every state collapses the
/// result has no decision states, which validate_mdp reports.
inline Mdp remove_end_components(const Mdp& m, Objective obj) {
  const auto mecs = maximal_end_components(m);
  if (mecs.empty()) return m;

  std::set<std::string> used(m.decision_states.begin(), m.decision_states.end());
  used.insert(m.target);
  used.insert(m.sink);

  std::unordered_map<std::string, std::string> rename;  // member -> image
  std::vector<std::pair<std::string, const EndComponent*>> contracted;
  for (const auto& mec : mecs) {
    bool leaves = false;
    for (const auto& s : mec.states)
      for (const Action* a : m.actions_of(s))
        for (const auto& [succ, p] : a->dist)
          if (!mec.states.count(succ)) leaves = true;
    std::string image = m.sink;
    if (obj == Objective::Max && leaves) {
      image = "mec";
      for (const auto& s : mec.states) image += "_" + s;
      while (used.count(image)) image += "'";
      used.insert(image);
      contracted.emplace_back(image, &mec);
    }
    for (const auto& s : mec.states) rename[s] = image;
  }

  auto image_of = [&](const std::string& s) -> const std::string& {
    auto it = rename.find(s);
    return it == rename.end() ? s : it->second;
  };
  auto redirect = [&](const Action& a, const std::string& owner) {
    Action out{a.id, owner, {}};
    for (const auto& [succ, p] : a.dist) out.dist[image_of(succ)] += p;
    return out;
  };

  Mdp r;
  r.target = m.target;
  r.sink = m.sink;
  for (const auto& s : m.decision_states) {
    auto it = rename.find(s);
    if (it == rename.end()) {
      r.decision_states.push_back(s);
    } else if (it->second != m.sink &&
               std::find(r.decision_states.begin(), r.decision_states.end(),
                         it->second) == r.decision_states.end()) {
      r.decision_states.push_back(it->second);
    }
  }
  for (const auto& s : r.decision_states) {
    auto contracted_it =
        std::find_if(contracted.begin(), contracted.end(),
                     [&](const auto& c) { return c.first == s; });
    if (contracted_it == contracted.end()) {
      for (const Action* a : m.actions_of(s)) r.actions.push_back(redirect(*a, s));
      continue;
    }
    const EndComponent& mec = *contracted_it->second;
    for (const auto& member : mec.states)
      for (const Action* a : m.actions_of(member)) {
        const bool leaving = std::any_of(a->dist.begin(), a->dist.end(), [&](const auto& e) {
          return !mec.states.count(e.first);
        });
        if (leaving) r.actions.push_back(redirect(*a, s));
      }
  }
  return r;
}

}  // namespace bor
