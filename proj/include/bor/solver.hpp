#pragma once

// Decision procedure for Bellman operator reachability: does Phi^n(s) = t hold
// for some n?
//
//  * t != mu: interval iteration bounds the horizon. Once the 0/1 iterates
//    are closer than ||t - mu||, no later iterate can be t.
//  * t == mu, s comparable with mu: sign abstraction, after first riding the
//    iteration into the tight radius for the AboveMax/BelowMin regimes.
//  * t == mu, s incomparable: iterate until comparable or inside the tight
//    radius, then a unique tight matrix is settled by its kernel chain and the
//    planar case by two more iterates. Otherwise the answer is Undecided.

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bor/bellman.hpp"
#include "bor/error.hpp"
#include "bor/exact_arith.hpp"
#include "bor/planar.hpp"
#include "bor/sign_abstraction.hpp"

namespace bor {

struct TraceStep {
  RatVector value;
  std::vector<std::vector<std::string>> argopt;  // actions that produced value; empty at step 0
};

struct Reachable {
  std::size_t n = 0;
  std::vector<RatVector> trace;  // s, Phi(s), ..., Phi^n(s) = t
};

struct Unreachable {
  Certificate certificate = Certificate::TargetNotFixedPointBound;
  std::size_t horizon = 0;  // concrete plus abstract steps the argument covered
};

inline constexpr std::string_view undecided_reason =
    "d>2-incomparable-multiple-tight-actions";

struct Undecided {
  std::string reason;
  std::size_t horizon = 0;
};

using Verdict = std::variant<Reachable, Unreachable, Undecided>;

inline std::string_view verdict_name(const Verdict& v) {
  if (std::holds_alternative<Reachable>(v)) return "reachable";
  if (std::holds_alternative<Unreachable>(v)) return "unreachable";
  return "undecided";
}

/// [s, Phi(s), ..., Phi^n(s)] with the attaining actions of every step.
inline std::vector<TraceStep> trace(const BellmanOperator& op, const RatVector& s,
                                    std::size_t n) {
  if (s.size() != op.dimension() || !in_unit_box(s))
    throw Error(Errc::InvalidInput, "trace: start vector must lie in [0,1]^d");
  std::vector<TraceStep> out;
  out.push_back(TraceStep{s, {}});
  for (std::size_t k = 0; k < n; ++k) {
    auto r = bor::apply(op, out.back().value);
    out.push_back(TraceStep{std::move(r.value), std::move(r.argopt)});
  }
  return out;
}

/// Least n <= max_n with Phi^n(s) = t by plain exact iteration. Stops early
/// only when the iteration reaches a fixed point.
inline std::optional<std::size_t> brute_force_reach(const BellmanOperator& op,
                                                    const RatVector& s, const RatVector& t,
                                                    std::size_t max_n) {
  const std::size_t d = op.dimension();
  if (s.size() != d || t.size() != d || !in_unit_box(s) || !in_unit_box(t))
    throw Error(Errc::InvalidInput, "brute_force_reach: vectors must lie in [0,1]^d");
  const ScaledStepper stepper(op);
  const ScaledVector target = ScaledVector::from(t);
  ScaledVector x = ScaledVector::from(s);
  ScaledVector previous = x;
  for (std::size_t n = 0; n <= max_n; ++n) {
    if (x.same_value(target)) return n;
    if (n > 0 && x.same_value(previous)) return std::nullopt;
    if (n == max_n) break;
    previous = x;
    stepper.step(x);
    if (n % 16 == 15) x.normalize();
  }
  return std::nullopt;
}

namespace detail {

inline Reachable reachable_with_trace(const BellmanOperator& op, const RatVector& s,
                                      const RatVector& t, std::size_t n) {
  Reachable r{n, {}};
  r.trace.reserve(n + 1);
  r.trace.push_back(s);
  for (std::size_t k = 0; k < n; ++k) r.trace.push_back(bor::apply(op, r.trace.back()).value);
  if (r.trace.back() != t)
    throw Error(Errc::NonConvergence, "reachability witness failed exact replay");
  return r;
}

/// Shared context of one decision: operator, start vector and fixed point
/// data computed once.
class Decider {
 public:
  Decider(const BellmanOperator& op, const RatVector& s, RatVector mu)
      : op_(op), s_(s), mu_(std::move(mu)), stepper_(op) {}

  Verdict target_not_fixed_point(const RatVector& t) const {
    const Rational eps = linf_distance(t, mu_);
    const std::size_t d = op_.dimension();
    ScaledVector lo = ScaledVector::constant(d, 0);
    ScaledVector hi = ScaledVector::constant(d, 1);
    ScaledVector x = ScaledVector::from(s_);
    const ScaledVector target = ScaledVector::from(t);
    for (std::size_t n = 0;; ++n) {
      if (x.same_value(target)) return reachable_with_trace(op_, s_, t, n);
      if (linf_distance_below(hi, lo, eps))
        return Unreachable{Certificate::TargetNotFixedPointBound, n};
      if (n == default_iteration_cap)
        throw Error(Errc::IterationCapExceeded, "interval iteration did not close");
      stepper_.step(lo);
      stepper_.step(hi);
      stepper_.step(x);
      if (n % 16 == 15) x.normalize();
    }
  }

  Verdict towards_fixed_point() const {
    if (s_ == mu_) return Reachable{0, {s_}};
    if (comparable(s_, mu_)) return comparable_from(s_, 0);
    return incomparable_from(s_);
  }

 private:
  const Rational& radius() const {
    if (!radius_) radius_ = tight_radius(op_, mu_);
    return *radius_;
  }

  std::size_t tight_horizon() const {
    if (!tight_horizon_) tight_horizon_ = convergence_steps(op_, radius()).steps;
    return *tight_horizon_;
  }

  const TightStructure& tight() const {
    if (!tight_) tight_ = tight_structure(op_, mu_);
    return *tight_;
  }

  Verdict from_abstraction(const RatVector& x, Regime regime, std::size_t offset) const {
    const auto r = abstract_reach_zero(sign_of(x, mu_), regime, tight());
    if (r.reached) return reachable_with_trace(op_, s_, mu_, offset + *r.steps);
    return Unreachable{Certificate::AbstractionCycle, offset + r.explored};
  }

  // x = Phi^offset(s) is comparable with mu.
  Verdict comparable_from(const RatVector& x, std::size_t offset) const {
    const Regime regime = *regime_for(op_.objective(), x, mu_);
    if (!needs_tight_radius(regime)) return from_abstraction(x, regime, offset);
    const std::size_t horizon = tight_horizon();
    const ScaledVector mu = ScaledVector::from(mu_);
    ScaledVector y = ScaledVector::from(x);
    for (std::size_t n = 0; n < horizon; ++n) {
      if (y.same_value(mu)) return reachable_with_trace(op_, s_, mu_, offset + n);
      stepper_.step(y);
      if (n % 16 == 15) y.normalize();
    }
    return from_abstraction(y.value(), regime, offset + horizon);
  }

  Verdict incomparable_from(const RatVector& start) const {
    const std::size_t horizon = tight_horizon();
    const ScaledVector mu = ScaledVector::from(mu_);
    ScaledVector y = ScaledVector::from(start);
    for (std::size_t n = 0; n <= horizon; ++n) {
      if (y.same_value(mu)) return reachable_with_trace(op_, s_, mu_, n);
      if (y.comparable_with(mu)) return comparable_from(y.value(), n);
      if (n < horizon) {
        stepper_.step(y);
        if (n % 16 == 15) y.normalize();
      }
    }
    // x = Phi^horizon(s) is incomparable with mu and within the tight radius.
    const RatVector x = y.value();
    const ProductFamily fam = build_product_family(op_, mu_);
    if (fam.is_singleton()) {
      const RatMatrix m = fam.matrix(std::vector<std::size_t>(op_.dimension(), 0));
      if (auto k = kernel_chain_zero(m, shift(x, mu_)))
        return reachable_with_trace(op_, s_, mu_, horizon + *k);
      return Unreachable{Certificate::KernelChain, horizon + op_.dimension()};
    }
    if (op_.dimension() == 2) {
      const auto outcome = decide_planar_incomparable(op_, x, mu_);
      if (const auto* hit = std::get_if<planar::Hit>(&outcome))
        return reachable_with_trace(op_, s_, mu_, horizon + hit->steps);
      if (const auto* next = std::get_if<planar::Continue>(&outcome))
        return comparable_from(next->iterate, horizon + next->offset);
      return Unreachable{Certificate::PlanarLemma, horizon + 2};
    }
    return Undecided{std::string(undecided_reason), horizon};
  }

  const BellmanOperator& op_;
  const RatVector& s_;
  RatVector mu_;
  ScaledStepper stepper_;
  mutable std::optional<Rational> radius_;
  mutable std::optional<std::size_t> tight_horizon_;
  mutable std::optional<TightStructure> tight_;
};

}  // namespace detail

inline void require_unit_vector(const BellmanOperator& op, const RatVector& v,
                                std::string_view name) {
  if (v.size() != op.dimension())
    throw Error(Errc::InvalidInput, std::string(name) + " has length " +
                                        std::to_string(v.size()) + ", expected " +
                                        std::to_string(op.dimension()));
  if (!in_unit_box(v))
    throw Error(Errc::InvalidInput, std::string(name) + " lies outside [0,1]^d");
}

/// Decides whether Phi^n(s) = t for some n; mu may be passed in when it is
/// already known.
inline Verdict decide_bor(const BellmanOperator& op, const RatVector& s, const RatVector& t,
                          std::optional<RatVector> mu = std::nullopt) {
  require_unit_vector(op, s, "start vector");
  require_unit_vector(op, t, "target vector");
  if (s == t) return Reachable{0, {s}};
  if (!mu) mu = fixed_point(op);
  const detail::Decider decider(op, s, *mu);
  if (t != *mu) return decider.target_not_fixed_point(t);
  return decider.towards_fixed_point();
}

struct MortalityVerdict {
  bool mortal = false;
  Verdict from_bottom;  // start 0
  Verdict from_top;     // start 1
};

/// Every start vector reaches mu iff both lattice ends do, by monotonicity.
inline MortalityVerdict decide_mortality(const BellmanOperator& op) {
  const RatVector mu = fixed_point(op);
  const std::size_t d = op.dimension();
  MortalityVerdict r;
  r.from_bottom = decide_bor(op, filled(d, 0), mu, mu);
  r.from_top = decide_bor(op, filled(d, 1), mu, mu);
  if (std::holds_alternative<Undecided>(r.from_bottom) ||
      std::holds_alternative<Undecided>(r.from_top))
    throw Error(Errc::NonConvergence, "mortality sub-instance reported Undecided");
  r.mortal = std::holds_alternative<Reachable>(r.from_bottom) &&
             std::holds_alternative<Reachable>(r.from_top);
  return r;
}

}  // namespace bor
