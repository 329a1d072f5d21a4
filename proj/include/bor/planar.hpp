#pragma once

// Product families of substochastic matrices and the planar (d = 2) decision
// for start vectors incomparable with the fixed point.
//
// Near mu only tight actions are optimal, so the shifted vector x - mu evolves
// by the piecewise linear map eps -> opt over M in the family of M eps. In the
// plane, two steps of that map either produce a vector comparable with 0 or
// the shifted vector never reaches 0.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bor/bellman.hpp"
#include "bor/error.hpp"
#include "bor/exact_arith.hpp"
#include "bor/sign_abstraction.hpp"

namespace bor {

struct FamilyRow {
  std::string action;
  RatVector row;  // non-negative, sums to at most 1
};

/// Row choices per state; the family is every matrix whose i-th row is taken
/// from per_state_rows[i].
struct ProductFamily {
  std::vector<std::vector<FamilyRow>> per_state_rows;

  std::size_t dimension() const { return per_state_rows.size(); }

  /// Number of matrices in the family.
  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& rows : per_state_rows) n *= rows.size();
    return n;
  }

  /// True when every state has exactly one row, i.e. the family is a single
  /// matrix.
  bool is_singleton() const {
    return std::all_of(per_state_rows.begin(), per_state_rows.end(),
                       [](const auto& rows) { return rows.size() == 1; });
  }

  /// The matrix choosing row choice[i] in state i.
  RatMatrix matrix(const std::vector<std::size_t>& choice) const {
    RatMatrix m;
    for (std::size_t i = 0; i < per_state_rows.size(); ++i)
      m.push_back(per_state_rows[i].at(choice.at(i)).row);
    return m;
  }
};

inline ProductFamily build_product_family(const BellmanOperator& op, const RatVector& mu) {
  const auto classes = classify_actions(op, mu);
  ProductFamily fam;
  fam.per_state_rows.resize(op.dimension());
  for (std::size_t i = 0; i < op.dimension(); ++i)
    for (const auto& a : op.actions(i))
      if (classes.at(a.id) == ActionClass::Tight)
        fam.per_state_rows[i].push_back({a.id, a.row});
  return fam;
}

/// Componentwise optimum of row . eps over each state's rows. Because the
/// rows of different states are chosen independently, this is also the
/// lattice max (min) of M eps over the whole family.
inline RatVector pfr_map(const ProductFamily& fam, const RatVector& eps, Objective obj) {
  if (eps.size() != fam.dimension())
    throw Error(Errc::DimensionMismatch, "pfr_map: vector length differs");
  RatVector out(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const auto& rows = fam.per_state_rows[i];
    if (rows.empty()) throw Error(Errc::PreconditionViolated, "pfr_map: state without rows");
    for (std::size_t k = 0; k < rows.size(); ++k) {
      Rational v = dot(rows[k].row, eps);
      if (k == 0 || (obj == Objective::Max ? v > out[i] : v < out[i])) out[i] = std::move(v);
    }
  }
  return out;
}

inline RatVector shift(const RatVector& x, const RatVector& mu) {
  require_same_length(x, mu, "shift");
  return x - mu;
}

inline RatVector unshift(const RatVector& eps, const RatVector& mu) {
  require_same_length(eps, mu, "unshift");
  return eps + mu;
}

enum class AngleOrder { Less, Equal, Greater };

/// Orders the zero lines {a . x = 0} and {b . x = 0} by their counterclockwise
/// angle to the positive x-axis, which lies in [pi/2, pi] for non-negative
/// rows. The cross product sign decides it exactly: positive means the line of
/// a has the smaller angle.
inline AngleOrder line_angle_cmp(const RatVector& a, const RatVector& b) {
  if (a.size() != 2 || b.size() != 2)
    throw Error(Errc::DimensionMismatch, "line_angle_cmp: rows must have length 2");
  if (is_zero(a) || is_zero(b)) throw Error(Errc::ZeroRow, "line_angle_cmp: zero row");
  const int s = sgn(Rational(a[0] * b[1] - a[1] * b[0]));
  return s > 0 ? AngleOrder::Less : s < 0 ? AngleOrder::Greater : AngleOrder::Equal;
}

/// Same order for kernel directions in the closed second quadrant: the
/// direction (-a2, a1) spans the zero line of the row (a1, a2).
inline AngleOrder direction_angle_cmp(const RatVector& u, const RatVector& v) {
  return line_angle_cmp({u[1], -u[0]}, {v[1], -v[0]});
}

struct KernelLine {
  RatVector direction;  // primitive, closed second quadrant
  bool lo = false;      // largest angle among kernel lines
  bool hi = false;      // smallest angle among kernel lines
};

struct KernelLines {
  std::vector<KernelLine> lines;  // sorted by increasing angle
  bool full_plane = false;        // some family matrix is the zero matrix
};

/// Kernel lines of the singular matrices of a planar family.
inline KernelLines kernel_lines(const ProductFamily& fam) {
  if (fam.dimension() != 2)
    throw Error(Errc::DimensionMismatch, "kernel_lines: family must be planar");
  KernelLines out;
  for (const auto& r1 : fam.per_state_rows[0])
    for (const auto& r2 : fam.per_state_rows[1]) {
      if (r1.row.size() != 2 || r2.row.size() != 2)
        throw Error(Errc::DimensionMismatch, "kernel_lines: rows must have length 2");
      const auto k = kernel_2x2({r1.row, r2.row});
      if (k.kind == KernelDescriptor::Kind::FullPlane) {
        out.full_plane = true;
      } else if (k.kind == KernelDescriptor::Kind::Line) {
        const bool known = std::any_of(out.lines.begin(), out.lines.end(),
                                       [&](const KernelLine& l) { return l.direction == k.direction; });
        if (!known) out.lines.push_back({k.direction});
      }
    }
  std::sort(out.lines.begin(), out.lines.end(), [](const KernelLine& a, const KernelLine& b) {
    return direction_angle_cmp(a.direction, b.direction) == AngleOrder::Less;
  });
  if (!out.lines.empty()) {
    out.lines.front().hi = true;
    out.lines.back().lo = true;
  }
  return out;
}

enum class Certificate {
  TargetNotFixedPointBound,
  AbstractionCycle,
  PlanarLemma,
  KernelChain,
};

constexpr std::string_view certificate_name(Certificate c) noexcept {
  switch (c) {
    case Certificate::TargetNotFixedPointBound: return "target-not-fixed-point-bound";
    case Certificate::AbstractionCycle: return "abstraction-cycle";
    case Certificate::PlanarLemma: return "planar-lemma";
    case Certificate::KernelChain: return "kernel-chain";
  }
  return "unknown";
}

namespace planar {

struct Hit {
  std::size_t steps;  // 1 or 2
};

/// The second iterate is comparable with mu; the comparable procedure takes
/// over from it.
struct Continue {
  RatVector iterate;
  std::size_t offset;  // always 2
};

struct Never {
  Certificate certificate = Certificate::PlanarLemma;
};

using Outcome = std::variant<Hit, Continue, Never>;

}  // namespace planar

/// Decides reachability of mu from an incomparable x inside the tight radius
/// of a planar operator, from its first two iterates.
inline planar::Outcome decide_planar_incomparable(const BellmanOperator& op,
                                                  const RatVector& x,
                                                  const RatVector& mu) {
  if (op.dimension() != 2)
    throw Error(Errc::PreconditionViolated, "planar decision needs dimension 2");
  require_same_length(x, mu, "decide_planar_incomparable");
  if (comparable(x, mu))
    throw Error(Errc::PreconditionViolated, "start vector is comparable with the fixed point");
  if (linf_distance(x, mu) >= tight_radius(op, mu))
    throw Error(Errc::PreconditionViolated, "start vector outside the tight radius");
  const RatVector x1 = bor::apply(op, x).value;
  if (x1 == mu) return planar::Hit{1};
  RatVector x2 = bor::apply(op, x1).value;
  if (x2 == mu) return planar::Hit{2};
  if (comparable(x2, mu)) return planar::Continue{std::move(x2), 2};
  return planar::Never{};
}

}  // namespace bor
