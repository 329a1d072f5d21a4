#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bor/error.hpp"
#include "bor/exact_arith.hpp"
#include "bor/mdp.hpp"

namespace bor {

/// An action of an end-component-free MDP in dense form over the decision
/// states: L(x) = row . x + to_target.
struct CompiledAction {
  std::string id;
  std::size_t owner = 0;
  RatVector row;
  Rational to_target;
  std::vector<std::size_t> successors;  // indices with a non-zero row entry
};

/// The Bellman operator Phi_max or Phi_min of an MDP without end components,
/// a piecewise affine map on [0,1]^d.
class BellmanOperator {
 public:
  BellmanOperator(Mdp mdp, Objective objective)
      : mdp_(std::move(mdp)), objective_(objective) {
    require_valid(mdp_);
    const auto mecs = maximal_end_components(mdp_);
    if (!mecs.empty()) {
      std::string names;
      for (const auto& s : mecs.front().states) names += (names.empty() ? "" : ",") + s;
      throw Error(Errc::InvalidMdp, "MDP has " + std::to_string(mecs.size()) +
                                        " end component(s), first over {" + names + "}");
    }
    const std::size_t d = mdp_.dimension();
    by_state_.resize(d);
    for (const auto& a : mdp_.actions) {
      CompiledAction c;
      c.id = a.id;
      c.owner = *mdp_.index_of(a.owner);
      c.row.assign(d, Rational(0));
      c.to_target = 0;
      for (const auto& [succ, p] : a.dist) {
        if (succ == mdp_.target) {
          c.to_target = p;
        } else if (auto j = mdp_.index_of(succ)) {
          c.row[*j] = p;
        }
      }
      for (std::size_t j = 0; j < d; ++j)
        if (c.row[j] != 0) c.successors.push_back(j);
      const std::size_t owner = c.owner;
      index_[c.id] = {owner, by_state_[owner].size()};
      by_state_[owner].push_back(std::move(c));
    }
  }

  const Mdp& mdp() const { return mdp_; }
  Objective objective() const { return objective_; }
  std::size_t dimension() const { return by_state_.size(); }

  /// Compiled actions of state i, in declaration order.
  const std::vector<CompiledAction>& actions(std::size_t state) const {
    return by_state_.at(state);
  }

  const CompiledAction& action(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end())
      throw Error(Errc::UnknownAction, "no action '" + std::string(id) + "'");
    return by_state_[it->second.first][it->second.second];
  }

  /// True when `candidate` is strictly better than `incumbent` for the
  /// objective.
  bool improves(const Rational& candidate, const Rational& incumbent) const {
    return objective_ == Objective::Max ? candidate > incumbent : candidate < incumbent;
  }

 private:
  Mdp mdp_;
  Objective objective_;
  std::vector<std::vector<CompiledAction>> by_state_;
  std::unordered_map<std::string, std::pair<std::size_t, std::size_t>> index_;
};

inline Rational eval_compiled(const CompiledAction& a, const RatVector& x) {
  Rational v = a.to_target;
  for (std::size_t j : a.successors) v += a.row[j] * x[j];
  return v;
}

inline Rational eval_action(const BellmanOperator& op, std::string_view action_id,
                            const RatVector& x) {
  const auto& a = op.action(action_id);
  if (x.size() != op.dimension())
    throw Error(Errc::DimensionMismatch, "eval_action: vector length differs");
  return eval_compiled(a, x);
}

struct ApplyResult {
  RatVector value;
  std::vector<std::vector<std::string>> argopt;  // per state, in declaration order
};

inline ApplyResult apply(const BellmanOperator& op, const RatVector& x) {
  const std::size_t d = op.dimension();
  if (x.size() != d) throw Error(Errc::DimensionMismatch, "apply: vector length differs");
  if (!in_unit_box(x)) throw Error(Errc::OutOfUnitBox, "apply: input outside [0,1]^d");
  ApplyResult r;
  r.value.resize(d);
  r.argopt.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    bool first = true;
    for (const auto& a : op.actions(i)) {
      Rational v = eval_compiled(a, x);
      if (first || op.improves(v, r.value[i])) {
        r.value[i] = std::move(v);
        r.argopt[i].assign(1, a.id);
        first = false;
      } else if (v == r.value[i]) {
        r.argopt[i].push_back(a.id);
      }
    }
  }
  return r;
}

/// Exact value of the policy choosing actions[i][choice[i]] in state i.
inline RatVector evaluate_policy(const BellmanOperator& op,
                                 const std::vector<std::size_t>& choice) {
  const std::size_t d = op.dimension();
  RatMatrix a = identity(d);
  RatVector b(d);
  for (std::size_t i = 0; i < d; ++i) {
    const auto& act = op.actions(i)[choice[i]];
    for (std::size_t j : act.successors) a[i][j] -= act.row[j];
    b[i] = act.to_target;
  }
  return solve_linear(a, b);
}

/// The unique fixed point by policy iteration with exact policy evaluation.
/// Without end components every policy's system I - M is nonsingular.
inline RatVector fixed_point(const BellmanOperator& op) {
  const std::size_t d = op.dimension();
  std::vector<std::size_t> choice(d, 0);
  // Each round strictly improves the policy value, so no policy repeats.
  std::size_t policies = 1;
  constexpr std::size_t policy_bound = std::size_t{1} << 40;
  for (std::size_t i = 0; i < d && policies < policy_bound; ++i)
    policies *= op.actions(i).size();
  RatVector x;
  for (std::size_t round = 0; round <= policies; ++round) {
    x = evaluate_policy(op, choice);
    bool improved = false;
    for (std::size_t i = 0; i < d; ++i) {
      const auto& acts = op.actions(i);
      Rational best = eval_compiled(acts[choice[i]], x);
      std::size_t best_k = choice[i];
      for (std::size_t k = 0; k < acts.size(); ++k) {
        Rational v = eval_compiled(acts[k], x);
        if (op.improves(v, best)) {
          best = std::move(v);
          best_k = k;
        }
      }
      if (best_k != choice[i]) {
        choice[i] = best_k;
        improved = true;
      }
    }
    if (!improved) {
      if (bor::apply(op, x).value != x)
        throw Error(Errc::NonConvergence, "policy iteration ended off the fixed point");
      return x;
    }
  }
  throw Error(Errc::NonConvergence, "policy iteration revisited a policy");
}

enum class ActionClass { Tight, Leaking };

inline void require_fixed_point(const BellmanOperator& op, const RatVector& mu) {
  if (mu.size() != op.dimension())
    throw Error(Errc::DimensionMismatch, "fixed point has wrong length");
  if (!in_unit_box(mu) || bor::apply(op, mu).value != mu)
    throw Error(Errc::NotAFixedPoint, "vector is not the fixed point of the operator");
}

inline std::map<std::string, ActionClass> classify_actions(const BellmanOperator& op,
                                                           const RatVector& mu) {
  require_fixed_point(op, mu);
  std::map<std::string, ActionClass> out;
  for (std::size_t i = 0; i < op.dimension(); ++i)
    for (const auto& a : op.actions(i))
      out[a.id] = eval_compiled(a, mu) == mu[i] ? ActionClass::Tight : ActionClass::Leaking;
  return out;
}

/// delta = 1/(2D), D the least common denominator of the fixed-point entries
/// and the values L(mu) of leaking actions. Within the open ball of radius
/// delta around mu the operator attains its optimum with tight actions only.
inline Rational tight_radius(const BellmanOperator& op, const RatVector& mu) {
  require_fixed_point(op, mu);
  std::vector<Rational> values(mu.begin(), mu.end());
  for (std::size_t i = 0; i < op.dimension(); ++i)
    for (const auto& a : op.actions(i)) {
      Rational v = eval_compiled(a, mu);
      if (v != mu[i]) values.push_back(std::move(v));
    }
  const Integer lcd = lcm_of_denominators(values);
  return make_rational(1, 2 * lcd);
}

/// A vector of rationals held as integer numerators over one shared positive
/// denominator. Iterating the operator in this form needs no gcd per entry,
/// which keeps long exact iterations cheap.
class ScaledVector {
 public:
  static ScaledVector constant(std::size_t d, long value) {
    ScaledVector v;
    v.num_.assign(d, Integer(value));
    v.den_ = 1;
    return v;
  }

  static ScaledVector from(const RatVector& x) {
    ScaledVector v;
    v.den_ = x.empty() ? Integer(1) : lcm_of_denominators(x);
    for (const auto& q : x) v.num_.push_back(q.get_num() * (v.den_ / q.get_den()));
    return v;
  }

  std::size_t size() const { return num_.size(); }
  const std::vector<Integer>& numerators() const { return num_; }
  const Integer& denominator() const { return den_; }

  RatVector value() const {
    RatVector out;
    out.reserve(num_.size());
    for (const auto& n : num_) out.push_back(make_rational(n, den_));
    return out;
  }

  /// Exact equality of the represented rational vectors.
  bool same_value(const ScaledVector& o) const {
    if (size() != o.size()) return false;
    if (den_ == o.den_) return num_ == o.num_;
    for (std::size_t i = 0; i < num_.size(); ++i)
      if (num_[i] * o.den_ != o.num_[i] * den_) return false;
    return true;
  }

  /// Sign of (this - o) in entry i.
  int compare_entry(std::size_t i, const ScaledVector& o) const {
    if (den_ == o.den_) return cmp(num_[i], o.num_[i]);
    return cmp(Integer(num_[i] * o.den_), Integer(o.num_[i] * den_));
  }

  /// Componentwise comparability with o.
  bool comparable_with(const ScaledVector& o) const {
    bool below = false, above = false;
    for (std::size_t i = 0; i < num_.size(); ++i) {
      const int c = compare_entry(i, o);
      below = below || c < 0;
      above = above || c > 0;
    }
    return !(below && above);
  }

  /// Divides numerators and denominator by their common gcd.
  void normalize() {
    Integer g = den_;
    for (const auto& n : num_) {
      if (g == 1) return;
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
    }
    if (g == 1) return;
    for (auto& n : num_) mpz_divexact(n.get_mpz_t(), n.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(den_.get_mpz_t(), den_.get_mpz_t(), g.get_mpz_t());
  }

 private:
  friend class ScaledStepper;
  std::vector<Integer> num_;
  Integer den_ = 1;
};

/// ||a - b||_inf < eps, decided by cross multiplication.
inline bool linf_distance_below(const ScaledVector& a, const ScaledVector& b,
                                const Rational& eps) {
  const Integer& da = a.denominator();
  const Integer& db = b.denominator();
  const Integer bound = eps.get_num() * da * db;
  Integer diff;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = a.numerators()[i] * db - b.numerators()[i] * da;
    if (abs(diff) * eps.get_den() >= bound) return false;
  }
  return true;
}

/// Applies the operator to ScaledVectors. All probabilities are scaled by the
/// least common denominator L of the MDP, so one step maps numerators to
/// integer combinations and multiplies the shared denominator by L.
class ScaledStepper {
 public:
  explicit ScaledStepper(const BellmanOperator& op) : objective_(op.objective()) {
    std::vector<Rational> probabilities{Rational(1)};
    for (std::size_t i = 0; i < op.dimension(); ++i)
      for (const auto& a : op.actions(i)) {
        probabilities.push_back(a.to_target);
        for (std::size_t j : a.successors) probabilities.push_back(a.row[j]);
      }
    scale_ = lcm_of_denominators(probabilities);
    states_.resize(op.dimension());
    for (std::size_t i = 0; i < op.dimension(); ++i)
      for (const auto& a : op.actions(i)) {
        Row r;
        r.to_target = a.to_target.get_num() * (scale_ / a.to_target.get_den());
        for (std::size_t j : a.successors)
          r.terms.emplace_back(j, a.row[j].get_num() * (scale_ / a.row[j].get_den()));
        states_[i].push_back(std::move(r));
      }
  }

  const Integer& scale() const { return scale_; }

  void step(ScaledVector& v) const {
    std::vector<Integer> next(states_.size());
    Integer candidate;
    for (std::size_t i = 0; i < states_.size(); ++i) {
      bool first = true;
      for (const auto& r : states_[i]) {
        mpz_mul(candidate.get_mpz_t(), r.to_target.get_mpz_t(), v.den_.get_mpz_t());
        for (const auto& [j, c] : r.terms)
          mpz_addmul(candidate.get_mpz_t(), c.get_mpz_t(), v.num_[j].get_mpz_t());
        if (first || (objective_ == Objective::Max ? candidate > next[i]
                                                   : candidate < next[i])) {
          mpz_swap(next[i].get_mpz_t(), candidate.get_mpz_t());
          first = false;
        }
      }
    }
    v.num_ = std::move(next);
    v.den_ *= scale_;
  }

 private:
  struct Row {
    Integer to_target;
    std::vector<std::pair<std::size_t, Integer>> terms;
  };
  Objective objective_;
  Integer scale_;
  std::vector<std::vector<Row>> states_;
};

struct ConvergenceCertificate {
  std::size_t steps = 0;  // N
  Rational gap;           // ||Phi^N(1) - Phi^N(0)||_inf, strictly below eps
};

inline constexpr std::size_t default_iteration_cap = 1'000'000;

/// Interval iteration from the lattice ends 0 and 1. Returns the least N with
/// ||Phi^N(1) - Phi^N(0)||_inf < eps. By monotonicity Phi^N(0) <= Phi^n(s) <=
/// Phi^N(1) and Phi^N(0) <= mu <= Phi^N(1) for all n >= N and s in [0,1]^d.
inline ConvergenceCertificate convergence_steps(const BellmanOperator& op,
                                                const Rational& eps,
                                                std::size_t cap = default_iteration_cap) {
  if (eps <= 0) throw Error(Errc::InvalidInput, "convergence_steps: eps must be positive");
  const ScaledStepper stepper(op);
  const std::size_t d = op.dimension();
  ScaledVector lo = ScaledVector::constant(d, 0);
  ScaledVector hi = ScaledVector::constant(d, 1);
  for (std::size_t n = 0;; ++n) {
    if (linf_distance_below(hi, lo, eps)) return {n, linf_distance(hi.value(), lo.value())};
    if (n == cap)
      throw Error(Errc::IterationCapExceeded,
                  "interval iteration did not close below " + to_string(eps) + " within " +
                      std::to_string(cap) + " steps");
    stepper.step(lo);
    stepper.step(hi);
  }
}

}  // namespace bor
