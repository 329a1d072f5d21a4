#pragma once

// Sign abstraction of probability vectors relative to the fixed point mu.
//
// In the comparable regimes the sign of Phi(x) - mu depends only on the sign
// of x - mu, so reachability of mu becomes reachability of the zero sign
// vector in a finite system with at most 2^d states.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bor/bellman.hpp"
#include "bor/error.hpp"
#include "bor/exact_arith.hpp"

namespace bor {

class SignVector {
 public:
  SignVector() = default;
  explicit SignVector(std::vector<std::int8_t> signs) : signs_(std::move(signs)) {
    for (auto s : signs_)
      if (s < -1 || s > 1) throw Error(Errc::InvalidInput, "sign outside {-1,0,1}");
  }

  static SignVector zero(std::size_t d) { return SignVector(std::vector<std::int8_t>(d, 0)); }

  std::size_t size() const { return signs_.size(); }
  int operator[](std::size_t i) const { return signs_[i]; }
  const std::vector<std::int8_t>& signs() const { return signs_; }

  bool is_zero() const {
    for (auto s : signs_)
      if (s != 0) return false;
    return true;
  }

  auto operator<=>(const SignVector&) const = default;

 private:
  std::vector<std::int8_t> signs_;
};

inline std::string to_string(const SignVector& e) {
  std::string out = "(";
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(e[i]);
  }
  return out + ")";
}

/// Below/Above refers to the position of the iterates relative to mu. The
/// AboveMax and BelowMin rules are only sound inside the tight radius.
enum class Regime { BelowMax, AboveMin, AboveMax, BelowMin };

constexpr std::string_view regime_name(Regime r) noexcept {
  switch (r) {
    case Regime::BelowMax: return "below-max";
    case Regime::AboveMin: return "above-min";
    case Regime::AboveMax: return "above-max";
    case Regime::BelowMin: return "below-min";
  }
  return "unknown";
}

/// Regime of x relative to mu, or nullopt when x and mu are incomparable.
/// x == mu counts as below.
inline std::optional<Regime> regime_for(Objective obj, const RatVector& x,
                                        const RatVector& mu) {
  if (leq(x, mu)) return obj == Objective::Max ? Regime::BelowMax : Regime::BelowMin;
  if (leq(mu, x)) return obj == Objective::Max ? Regime::AboveMax : Regime::AboveMin;
  return std::nullopt;
}

inline bool needs_tight_radius(Regime r) {
  return r == Regime::AboveMax || r == Regime::BelowMin;
}

struct TightAction {
  std::string id;
  std::vector<std::size_t> successors;
};

/// Per state, the tight actions with their decision-state successors.
using TightStructure = std::vector<std::vector<TightAction>>;

inline TightStructure tight_structure(const BellmanOperator& op, const RatVector& mu) {
  const auto classes = classify_actions(op, mu);
  TightStructure ts(op.dimension());
  for (std::size_t i = 0; i < op.dimension(); ++i)
    for (const auto& a : op.actions(i))
      if (classes.at(a.id) == ActionClass::Tight) ts[i].push_back({a.id, a.successors});
  return ts;
}

inline SignVector sign_of(const RatVector& x, const RatVector& mu) {
  require_same_length(x, mu, "sign_of");
  std::vector<std::int8_t> s(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) s[i] = static_cast<std::int8_t>(sgn(x[i] - mu[i]));
  return SignVector(std::move(s));
}

inline void require_in_regime(const SignVector& e, Regime regime) {
  const bool below = regime == Regime::BelowMax || regime == Regime::BelowMin;
  for (std::size_t i = 0; i < e.size(); ++i)
    if ((below && e[i] > 0) || (!below && e[i] < 0))
      throw Error(Errc::RegimeViolation, "sign vector " + to_string(e) +
                                             " outside the range of regime " +
                                             std::string(regime_name(regime)));
}

/// One abstract step. Outer aggregate over tight actions, inner over the
/// action's successors:
///   BelowMax: max-min   AboveMin: min-max   AboveMax: max-max   BelowMin: min-min
/// An action without decision-state successors contributes 0.
inline SignVector abstract_step(const SignVector& e, Regime regime, const TightStructure& ts) {
  if (ts.size() != e.size())
    throw Error(Errc::DimensionMismatch, "abstract_step: tight structure size differs");
  require_in_regime(e, regime);
  const bool outer_max = regime == Regime::BelowMax || regime == Regime::AboveMax;
  const bool inner_max = regime == Regime::AboveMin || regime == Regime::AboveMax;
  std::vector<std::int8_t> next(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (ts[i].empty())
      throw Error(Errc::PreconditionViolated,
                  "state " + std::to_string(i) + " has no tight action");
    int outer = outer_max ? -2 : 2;
    for (const auto& a : ts[i]) {
      int inner = 0;
      if (!a.successors.empty()) {
        inner = inner_max ? -2 : 2;
        for (std::size_t j : a.successors)
          inner = inner_max ? std::max(inner, e[j]) : std::min(inner, e[j]);
      }
      outer = outer_max ? std::max(outer, inner) : std::min(outer, inner);
    }
    next[i] = static_cast<std::int8_t>(outer);
  }
  return SignVector(std::move(next));
}

struct AbstractReach {
  bool reached = false;
  std::optional<std::size_t> steps;  // least n with the n-th iterate zero
  std::size_t explored = 0;          // distinct sign vectors visited
};

/// Iterates abstract_step until the zero vector appears or a sign vector
/// repeats. Each regime has at most 2^d sign vectors, which bounds the run.
inline AbstractReach abstract_reach_zero(const SignVector& e0, Regime regime,
                                         const TightStructure& ts) {
  require_in_regime(e0, regime);
  std::set<SignVector> seen;
  SignVector e = e0;
  for (std::size_t n = 0;; ++n) {
    if (e.is_zero()) return {true, n, seen.size() + 1};
    if (!seen.insert(e).second) return {false, std::nullopt, seen.size()};
    e = abstract_step(e, regime, ts);
  }
}

}  // namespace bor
