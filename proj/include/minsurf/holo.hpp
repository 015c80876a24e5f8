#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "minsurf/error.hpp"

namespace minsurf {

using cplx = std::complex<double>;

enum class DomainKind { Plane, UnitDisk };

struct Domain {
  DomainKind kind = DomainKind::Plane;

  static constexpr Domain plane() { return {DomainKind::Plane}; }
  static constexpr Domain disk() { return {DomainKind::UnitDisk}; }

  bool contains(cplx z) const noexcept;
  bool is_disk() const noexcept { return kind == DomainKind::UnitDisk; }

  friend bool operator==(Domain, Domain) = default;
};

// The smaller of the two domains; a function built from a disk-only operand
// is only defined on the disk.
Domain intersect(Domain a, Domain b) noexcept;

/// Immutable expression tree of a holomorphic function.
///
/// Leaves are polynomials stored in a scaled monomial basis,
/// p(z) = sum_k c_k (z / scale)^k, so that high-degree fits stay well
/// conditioned on |z| <= scale. Interior nodes are sum, product, quotient and
/// exponential. Quotients only accept denominators that are zero-free by
/// construction (exponentials, constants, polynomials whose roots all lie
/// outside the closed unit disk when the domain is the disk, and products or
/// quotients of those), so evaluation never divides by zero.
///
/// Nodes are shared; copying a HoloFun is cheap and thread safe.
class HoloFun {
 public:
  enum class Kind { Poly, Sum, Prod, Quot, Exp };
  struct Node;

  HoloFun();  // the zero polynomial on the plane

  static HoloFun constant(cplx c, Domain d = Domain::plane());
  static HoloFun identity(Domain d = Domain::plane());
  static HoloFun poly(std::vector<cplx> coeffs, Domain d = Domain::plane(), double scale = 1.0);
  static HoloFun sum(std::vector<HoloFun> terms);
  static HoloFun product(std::vector<HoloFun> factors);
  static HoloFun quotient(const HoloFun& num, const HoloFun& den);
  static HoloFun exp(const HoloFun& arg);

  Kind kind() const noexcept;
  Domain domain() const noexcept;

  /// Evaluates at z; throws PointOutsideDomain when z is not in the domain.
  cplx operator()(cplx z) const;
  /// Evaluation without the domain check (used by inner loops that already
  /// validated their sample sets).
  cplx eval_unchecked(cplx z) const noexcept;

  HoloFun derivative() const;

  /// True when the tree guarantees the function never vanishes on its domain.
  bool zero_free() const noexcept;
  /// Structural zero test after constant folding.
  bool is_zero() const noexcept;
  /// Returns the constant value when the tree is a degree-0 polynomial.
  bool is_constant(cplx* value = nullptr) const noexcept;

  HoloFun with_domain(Domain d) const;

  // Accessors for serialization and inspection.
  const std::vector<cplx>& coefficients() const;  // Poly only
  double scale() const;                           // Poly only
  std::span<const HoloFun> children() const noexcept;

  /// Structural identity: same node object.
  bool same_node(const HoloFun& other) const noexcept { return node_ == other.node_; }
  /// Deep structural equality (identical trees and coefficients bitwise).
  bool structurally_equal(const HoloFun& other) const noexcept;

  friend HoloFun operator+(const HoloFun& a, const HoloFun& b);
  friend HoloFun operator-(const HoloFun& a, const HoloFun& b);
  friend HoloFun operator*(const HoloFun& a, const HoloFun& b);
  friend HoloFun operator/(const HoloFun& a, const HoloFun& b);
  friend HoloFun operator*(cplx c, const HoloFun& f);

 private:
  explicit HoloFun(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Roots of a polynomial in z (not in the scaled variable); degree >= 1.
std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs, double scale);

/// Adaptive Gauss-Kronrod integral of f(z) dz along the segment [a, b].
/// Throws SegmentExitsDomain or ToleranceNotReached.
cplx integrate_segment(const HoloFun& f, cplx a, cplx b, double tol = 1e-10);

/// Integral along a polyline; the tolerance is split evenly over segments.
cplx integrate_path(const HoloFun& f, std::span<const cplx> vertices, double tol = 1e-10);

}  // namespace minsurf
