#pragma once

// Exact rational scalars, vectors and matrices.
//
// Rational is GMP's mpq_class. Every arithmetic operation of mpq_class
// returns a canonical fraction (positive denominator, reduced), so the only
// place where canonicalization has to be requested explicitly is
// construction from a raw numerator/denominator pair, see make_rational().

#include <gmpxx.h>

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bor/error.hpp"

namespace bor {

using Integer = mpz_class;
using Rational = mpq_class;
using RatVector = std::vector<Rational>;
using RatMatrix = std::vector<RatVector>;

inline Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw Error(Errc::InvalidInput, "zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline bool is_canonical(const Rational& q) {
  if (q.get_den() <= 0) return false;
  Integer g;
  mpz_gcd(g.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return g == 1;
}

/// Parses the rational-string grammar: optional sign, decimal integer,
/// optionally followed by "/" and a decimal integer ("7/12", "-1", "0").
inline Rational parse_rational(std::string_view text) {
  auto fail = [&](const char* why) -> Rational {
    throw Error(Errc::ParseError,
                "bad rational '" + std::string(text) + "': " + why);
  };
  std::size_t pos = 0;
  std::string num;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
    if (text[pos] == '-') num.push_back('-');
    ++pos;
  }
  const std::size_t digits_begin = pos;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
    num.push_back(text[pos++]);
  if (pos == digits_begin) return fail("expected digits");
  std::string den = "1";
  if (pos < text.size()) {
    if (text[pos] != '/') return fail("unexpected character");
    ++pos;
    const std::size_t den_begin = pos;
    den.clear();
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
      den.push_back(text[pos++]);
    if (pos == den_begin) return fail("expected denominator digits");
    if (pos != text.size()) return fail("trailing characters");
  }
  const Integer d(den, 10);
  if (d == 0) return fail("zero denominator");
  return make_rational(Integer(num, 10), d);
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline RatVector filled(std::size_t d, const Rational& value) {
  return RatVector(d, value);
}

inline RatMatrix zero_matrix(std::size_t rows, std::size_t cols) {
  return RatMatrix(rows, RatVector(cols, Rational(0)));
}

inline RatMatrix identity(std::size_t d) {
  RatMatrix m = zero_matrix(d, d);
  for (std::size_t i = 0; i < d; ++i) m[i][i] = 1;
  return m;
}

inline void require_same_length(const RatVector& a, const RatVector& b,
                                std::string_view what) {
  if (a.size() != b.size())
    throw Error(Errc::DimensionMismatch,
                std::string(what) + ": lengths " + std::to_string(a.size()) +
                    " and " + std::to_string(b.size()));
}

inline void require_square(const RatMatrix& m, std::string_view what) {
  for (const auto& row : m)
    if (row.size() != m.size())
      throw Error(Errc::DimensionMismatch,
                  std::string(what) + ": matrix is not square");
}

inline Rational dot(const RatVector& a, const RatVector& b) {
  require_same_length(a, b, "dot");
  Rational acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0) acc += a[i] * b[i];
  return acc;
}

inline RatVector operator+(const RatVector& a, const RatVector& b) {
  require_same_length(a, b, "vector sum");
  RatVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline RatVector operator-(const RatVector& a, const RatVector& b) {
  require_same_length(a, b, "vector difference");
  RatVector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline RatVector operator*(const Rational& s, const RatVector& v) {
  RatVector r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = s * v[i];
  return r;
}

inline RatVector mat_vec(const RatMatrix& m, const RatVector& v) {
  RatVector r(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) r[i] = dot(m[i], v);
  return r;
}

inline RatMatrix mat_mul(const RatMatrix& a, const RatMatrix& b) {
  const std::size_t inner = b.size();
  const std::size_t cols = inner == 0 ? 0 : b.front().size();
  RatMatrix r = zero_matrix(a.size(), cols);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != inner)
      throw Error(Errc::DimensionMismatch, "mat_mul: inner dimensions differ");
    for (std::size_t k = 0; k < inner; ++k) {
      if (a[i][k] == 0) continue;
      for (std::size_t j = 0; j < cols; ++j) r[i][j] += a[i][k] * b[k][j];
    }
  }
  return r;
}

inline Rational linf_norm(const RatVector& v) {
  Rational m = 0;
  for (const auto& x : v) m = std::max(m, Rational(abs(x)));
  return m;
}

inline Rational linf_distance(const RatVector& a, const RatVector& b) {
  return linf_norm(a - b);
}

inline bool is_zero(const RatVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
}

/// Componentwise a <= b.
inline bool leq(const RatVector& a, const RatVector& b) {
  require_same_length(a, b, "leq");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

inline bool comparable(const RatVector& a, const RatVector& b) {
  return leq(a, b) || leq(b, a);
}

inline bool in_unit_box(const RatVector& v) {
  return std::all_of(v.begin(), v.end(),
                     [](const Rational& x) { return x >= 0 && x <= 1; });
}

namespace detail {

// Row-reduces m in place to reduced row echelon form; returns pivot columns.
inline std::vector<std::size_t> row_reduce(RatMatrix& m) {
  std::vector<std::size_t> pivots;
  const std::size_t rows = m.size();
  const std::size_t cols = rows == 0 ? 0 : m.front().size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    const Rational inv = 1 / m[r][c];
    for (auto& x : m[r]) x *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      const Rational factor = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= factor * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace detail

inline std::size_t rank(RatMatrix m) { return detail::row_reduce(m).size(); }

/// Unique solution of A x = b by Gauss-Jordan elimination over Q.
inline RatVector solve_linear(const RatMatrix& a, const RatVector& b) {
  require_square(a, "solve_linear");
  if (a.size() != b.size())
    throw Error(Errc::DimensionMismatch, "solve_linear: rhs length differs");
  const std::size_t d = a.size();
  RatMatrix aug(d);
  for (std::size_t i = 0; i < d; ++i) {
    aug[i] = a[i];
    aug[i].push_back(b[i]);
  }
  const auto pivots = detail::row_reduce(aug);
  if (pivots.size() < d || (d > 0 && pivots.back() >= d))
    throw Error(Errc::SingularMatrix, "solve_linear: matrix is singular");
  RatVector x(d);
  for (std::size_t i = 0; i < d; ++i) x[i] = aug[i][d];
  return x;
}

/// Least common multiple of the denominators of a non-empty list.
inline Integer lcm_of_denominators(std::span<const Rational> values) {
  if (values.empty())
    throw Error(Errc::EmptyInput, "lcm_of_denominators: empty list");
  Integer acc = 1;
  for (const auto& q : values) {
    Integer next;
    mpz_lcm(next.get_mpz_t(), acc.get_mpz_t(), q.get_den_mpz_t());
    acc = std::move(next);
  }
  return acc;
}

/// Least n with M^n eps = 0. ker M^n stabilizes after at most d strict
/// inclusions, so if no n <= d works then none does.
inline std::optional<std::size_t> kernel_chain_zero(const RatMatrix& m,
                                                    const RatVector& eps) {
  require_square(m, "kernel_chain_zero");
  if (m.size() != eps.size())
    throw Error(Errc::DimensionMismatch, "kernel_chain_zero: vector length differs");
  RatVector v = eps;
  for (std::size_t n = 0; n <= m.size(); ++n) {
    if (is_zero(v)) return n;
    v = mat_vec(m, v);
  }
  return std::nullopt;
}

/// Scales a non-zero rational vector to the primitive integer vector on the
/// same ray (integer entries with gcd 1).
inline RatVector primitive_direction(const RatVector& v) {
  Integer den = 1;
  for (const auto& q : v) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
  std::vector<Integer> ints;
  Integer g = 0;
  for (const auto& q : v) {
    Integer k = q.get_num() * (den / q.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), k.get_mpz_t());
    ints.push_back(std::move(k));
  }
  if (g == 0) throw Error(Errc::ZeroRow, "primitive_direction: zero vector");
  RatVector r;
  for (auto& k : ints) r.emplace_back(Integer(k / g));
  return r;
}

struct KernelDescriptor {
  enum class Kind { Trivial, Line, FullPlane };
  Kind kind = Kind::Trivial;
  RatVector direction;  // primitive, in the closed second quadrant; Line only

  bool operator==(const KernelDescriptor&) const = default;
};

/// Kernel of a 2x2 matrix. Line directions are normalized to the closed
/// second quadrant, i.e. sign pattern (-,+), (0,+) or (-,0).
inline KernelDescriptor kernel_2x2(const RatMatrix& m) {
  if (m.size() != 2 || m[0].size() != 2 || m[1].size() != 2)
    throw Error(Errc::DimensionMismatch, "kernel_2x2: expected a 2x2 matrix");
  const Rational det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  if (det != 0) return {KernelDescriptor::Kind::Trivial, {}};
  const bool first_zero = m[0][0] == 0 && m[0][1] == 0;
  const bool second_zero = m[1][0] == 0 && m[1][1] == 0;
  if (first_zero && second_zero) return {KernelDescriptor::Kind::FullPlane, {}};
  const RatVector& r = first_zero ? m[1] : m[0];
  RatVector dir = primitive_direction({-r[1], r[0]});
  if (dir[0] > 0 || (dir[0] == 0 && dir[1] < 0)) dir = Rational(-1) * dir;
  return {KernelDescriptor::Kind::Line, std::move(dir)};
}

}  // namespace bor
