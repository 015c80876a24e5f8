#include "minsurf/holo.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>

#include "minsurf/quadrature.hpp"

namespace minsurf {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::PointOutsideDomain: return "point-outside-domain";
    case ErrorCode::SegmentExitsDomain: return "segment-exits-domain";
    case ErrorCode::ToleranceNotReached: return "tolerance-not-reached";
    case ErrorCode::GaussMapZero: return "gauss-map-zero";
    case ErrorCode::DegenerateMetric: return "degenerate-metric";
    case ErrorCode::IdenticallyZero: return "identically-zero";
    case ErrorCode::NotZeroFree: return "not-zero-free";
    case ErrorCode::ConstraintViolated: return "constraint-violated";
    case ErrorCode::ZeroDetected: return "zero-detected";
    case ErrorCode::IllConditioned: return "ill-conditioned";
    case ErrorCode::DegreeExhausted: return "degree-exhausted";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::DisconnectedGrid: return "disconnected-grid";
    case ErrorCode::NonPositiveFactor: return "non-positive-factor";
    case ErrorCode::StepFailed: return "step-failed";
    case ErrorCode::ConfigInvalid: return "config-invalid";
  }
  return "unknown";
}

bool Domain::contains(cplx z) const noexcept {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return kind == DomainKind::Plane || std::abs(z) < 1.0;
}

Domain intersect(Domain a, Domain b) noexcept {
  return (a.is_disk() || b.is_disk()) ? Domain::disk() : Domain::plane();
}

struct HoloFun::Node {
  Kind kind;
  Domain domain;
  std::vector<cplx> coeffs;  // Poly
  double scale = 1.0;        // Poly
  std::vector<HoloFun> kids;
  // Poly only: -1 unknown, 0 no, 1 yes. Root finding is deferred until a
  // quotient actually asks, since exponents of degree 500 are common.
  mutable std::atomic<int> zero_free_cache{-1};

  Node() = default;
  Node(const Node& o)
      : kind(o.kind), domain(o.domain), coeffs(o.coeffs), scale(o.scale), kids(o.kids) {}
};

namespace {

using NodePtr = std::shared_ptr<const HoloFun::Node>;

bool poly_zero_free(const std::vector<cplx>& c, double scale, Domain d) {
  std::size_t deg = c.size();
  while (deg > 0 && c[deg - 1] == cplx{}) --deg;
  if (deg == 0) return false;  // zero polynomial
  if (deg == 1) return true;   // nonzero constant
  if (!d.is_disk()) return false;
  std::vector<cplx> trimmed(c.begin(), c.begin() + static_cast<long>(deg));
  for (cplx root : polynomial_roots(trimmed, scale)) {
    if (std::abs(root) <= 1.0) return false;
  }
  return true;
}

std::vector<cplx> trim(std::vector<cplx> c) {
  while (!c.empty() && c.back() == cplx{}) c.pop_back();
  return c;
}

}  // namespace

HoloFun::HoloFun() : HoloFun(poly({}, Domain::plane(), 1.0)) {}

HoloFun HoloFun::constant(cplx c, Domain d) { return poly({c}, d, 1.0); }

HoloFun HoloFun::identity(Domain d) { return poly({0.0, 1.0}, d, 1.0); }

HoloFun HoloFun::poly(std::vector<cplx> coeffs, Domain d, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(ErrorCode::Precondition, "polynomial scale must be positive");
  }
  auto node = std::make_shared<Node>();
  node->kind = Kind::Poly;
  node->domain = d;
  node->coeffs = trim(std::move(coeffs));
  // A constant does not depend on the scale; normalize so equal constants
  // compare equal structurally.
  if (node->coeffs.size() <= 1) scale = 1.0;
  node->scale = scale;
  return HoloFun(std::move(node));
}

HoloFun HoloFun::sum(std::vector<HoloFun> terms) {
  std::vector<HoloFun> kept;
  cplx constant_part = 0.0;
  Domain d = Domain::plane();
  for (auto& t : terms) {
    d = intersect(d, t.domain());
    cplx c;
    if (t.is_constant(&c)) {
      constant_part += c;
    } else if (t.kind() == Kind::Sum) {
      for (const auto& k : t.children()) kept.push_back(k);
    } else {
      kept.push_back(std::move(t));
    }
  }
  if (constant_part != cplx{} || kept.empty()) kept.push_back(constant(constant_part, d));
  if (kept.size() == 1) return kept.front().with_domain(intersect(d, kept.front().domain()));
  auto node = std::make_shared<Node>();
  node->kind = Kind::Sum;
  node->domain = d;
  node->kids = std::move(kept);
  return HoloFun(std::move(node));
}

HoloFun HoloFun::product(std::vector<HoloFun> factors) {
  std::vector<HoloFun> kept;
  cplx constant_part = 1.0;
  Domain d = Domain::plane();
  for (auto& f : factors) {
    d = intersect(d, f.domain());
    cplx c;
    if (f.is_constant(&c)) {
      constant_part *= c;
    } else if (f.kind() == Kind::Prod) {
      for (const auto& k : f.children()) kept.push_back(k);
    } else {
      kept.push_back(std::move(f));
    }
  }
  if (constant_part == cplx{}) return constant(0.0, d);
  if (kept.empty()) return constant(constant_part, d);
  if (constant_part != cplx{1.0, 0.0}) {
    // Fold the constant into a polynomial factor when there is one.
    auto it = std::find_if(kept.begin(), kept.end(),
                           [](const HoloFun& f) { return f.kind() == Kind::Poly; });
    if (it != kept.end()) {
      std::vector<cplx> c = it->coefficients();
      for (auto& x : c) x *= constant_part;
      *it = poly(std::move(c), it->domain(), it->scale());
    } else {
      kept.insert(kept.begin(), constant(constant_part, d));
    }
  }
  if (kept.size() == 1) return kept.front().with_domain(intersect(d, kept.front().domain()));
  auto node = std::make_shared<Node>();
  node->kind = Kind::Prod;
  node->domain = d;
  node->kids = std::move(kept);
  return HoloFun(std::move(node));
}

HoloFun HoloFun::quotient(const HoloFun& num, const HoloFun& den) {
  if (!den.zero_free()) {
    throw Error(ErrorCode::NotZeroFree, "quotient denominator is not zero-free by construction");
  }
  const Domain d = intersect(num.domain(), den.domain());
  cplx c;
  if (num.is_zero()) return constant(0.0, d);
  if (den.is_constant(&c)) return (1.0 / c) * num.with_domain(d);
  auto node = std::make_shared<Node>();
  node->kind = Kind::Quot;
  node->domain = d;
  node->kids = {num, den};
  return HoloFun(std::move(node));
}

HoloFun HoloFun::exp(const HoloFun& arg) {
  // exp of a constant stays an Exp node so the zero-free structure is
  // visible to callers (h = exp(p) with p = 0 when beta = 1).
  auto node = std::make_shared<Node>();
  node->kind = Kind::Exp;
  node->domain = arg.domain();
  node->kids = {arg};
  return HoloFun(std::move(node));
}

HoloFun::Kind HoloFun::kind() const noexcept { return node_->kind; }
Domain HoloFun::domain() const noexcept { return node_->domain; }
bool HoloFun::zero_free() const noexcept {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Poly: {
      int cached = n.zero_free_cache.load();
      if (cached < 0) {
        bool ok = false;
        try {
          ok = poly_zero_free(n.coeffs, n.scale, n.domain);
        } catch (...) {
          ok = false;
        }
        cached = ok ? 1 : 0;
        n.zero_free_cache.store(cached);
      }
      return cached == 1;
    }
    case Kind::Sum: return false;
    case Kind::Prod:
      return std::all_of(n.kids.begin(), n.kids.end(),
                         [](const HoloFun& f) { return f.zero_free(); });
    case Kind::Quot: return n.kids[0].zero_free();
    case Kind::Exp: return true;
  }
  return false;
}

bool HoloFun::is_zero() const noexcept {
  return node_->kind == Kind::Poly && node_->coeffs.empty();
}

bool HoloFun::is_constant(cplx* value) const noexcept {
  if (node_->kind != Kind::Poly || node_->coeffs.size() > 1) return false;
  if (value) *value = node_->coeffs.empty() ? cplx{} : node_->coeffs.front();
  return true;
}

HoloFun HoloFun::with_domain(Domain d) const {
  if (d == node_->domain) return *this;
  auto node = std::make_shared<Node>(*node_);
  node->domain = d;
  return HoloFun(std::move(node));
}

const std::vector<cplx>& HoloFun::coefficients() const {
  if (node_->kind != Kind::Poly) throw Error(ErrorCode::Precondition, "not a polynomial node");
  return node_->coeffs;
}

double HoloFun::scale() const {
  if (node_->kind != Kind::Poly) throw Error(ErrorCode::Precondition, "not a polynomial node");
  return node_->scale;
}

std::span<const HoloFun> HoloFun::children() const noexcept { return node_->kids; }

bool HoloFun::structurally_equal(const HoloFun& other) const noexcept {
  if (node_ == other.node_) return true;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.kind != b.kind || a.domain != b.domain || a.kids.size() != b.kids.size()) return false;
  if (a.kind == Kind::Poly) return a.coeffs == b.coeffs && a.scale == b.scale;
  for (std::size_t i = 0; i < a.kids.size(); ++i) {
    if (!a.kids[i].structurally_equal(b.kids[i])) return false;
  }
  return true;
}

cplx HoloFun::eval_unchecked(cplx z) const noexcept {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Poly: {
      const cplx w = z / n.scale;
      cplx acc = 0.0;
      for (auto it = n.coeffs.rbegin(); it != n.coeffs.rend(); ++it) acc = acc * w + *it;
      return acc;
    }
    case Kind::Sum: {
      cplx acc = 0.0;
      for (const auto& k : n.kids) acc += k.eval_unchecked(z);
      return acc;
    }
    case Kind::Prod: {
      cplx acc = 1.0;
      for (const auto& k : n.kids) acc *= k.eval_unchecked(z);
      return acc;
    }
    case Kind::Quot:
      return n.kids[0].eval_unchecked(z) / n.kids[1].eval_unchecked(z);
    case Kind::Exp:
      return std::exp(n.kids[0].eval_unchecked(z));
  }
  return 0.0;
}

cplx HoloFun::operator()(cplx z) const {
  if (!domain().contains(z)) {
    std::ostringstream os;
    os << "z = " << z << " is not in the " << (domain().is_disk() ? "unit disk" : "plane");
    throw Error(ErrorCode::PointOutsideDomain, os.str());
  }
  return eval_unchecked(z);
}

HoloFun HoloFun::derivative() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Poly: {
      std::vector<cplx> d;
      for (std::size_t k = 1; k < n.coeffs.size(); ++k) {
        d.push_back(n.coeffs[k] * (static_cast<double>(k) / n.scale));
      }
      return poly(std::move(d), n.domain, n.scale);
    }
    case Kind::Sum: {
      std::vector<HoloFun> terms;
      for (const auto& k : n.kids) terms.push_back(k.derivative());
      return sum(std::move(terms)).with_domain(n.domain);
    }
    case Kind::Prod: {
      std::vector<HoloFun> terms;
      for (std::size_t i = 0; i < n.kids.size(); ++i) {
        HoloFun di = n.kids[i].derivative();
        if (di.is_zero()) continue;
        std::vector<HoloFun> factors;
        for (std::size_t j = 0; j < n.kids.size(); ++j) factors.push_back(i == j ? di : n.kids[j]);
        terms.push_back(product(std::move(factors)));
      }
      return sum(std::move(terms)).with_domain(n.domain);
    }
    case Kind::Quot: {
      const HoloFun& f = n.kids[0];
      const HoloFun& g = n.kids[1];
      HoloFun top = f.derivative() * g - f * g.derivative();
      return quotient(top, product({g, g})).with_domain(n.domain);
    }
    case Kind::Exp:
      return (n.kids[0].derivative() * *this).with_domain(n.domain);
  }
  return HoloFun();
}

HoloFun operator+(const HoloFun& a, const HoloFun& b) { return HoloFun::sum({a, b}); }
HoloFun operator-(const HoloFun& a, const HoloFun& b) {
  return HoloFun::sum({a, -1.0 * b});
}
HoloFun operator*(const HoloFun& a, const HoloFun& b) { return HoloFun::product({a, b}); }
HoloFun operator/(const HoloFun& a, const HoloFun& b) { return HoloFun::quotient(a, b); }
HoloFun operator*(cplx c, const HoloFun& f) {
  return HoloFun::product({HoloFun::constant(c, f.domain()), f});
}

std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs, double scale) {
  const int deg = static_cast<int>(coeffs.size()) - 1;
  if (deg < 1) return {};
  // Companion matrix of the monic polynomial in w = z / scale.
  Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(deg, deg);
  const cplx lead = coeffs.back();
  for (int i = 0; i < deg; ++i) companion(0, i) = -coeffs[deg - 1 - i] / lead;
  for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
  std::vector<cplx> roots;
  for (int i = 0; i < deg; ++i) roots.push_back(solver.eigenvalues()(i) * scale);
  return roots;
}

cplx integrate_segment(const HoloFun& f, cplx a, cplx b, double tol) {
  const Domain d = f.domain();
  if (!d.contains(a) || !d.contains(b)) {
    throw Error(ErrorCode::SegmentExitsDomain, "segment endpoint outside the domain");
  }
  if (a == b) return 0.0;
  const cplx dz = b - a;
  quad::Options opt;
  opt.abs_tol = tol;
  return quad::integrate_unit<cplx>(
      [&](double t) { return f.eval_unchecked(a + t * dz) * dz; },
      [](cplx v) { return std::abs(v); }, cplx{}, opt);
}

cplx integrate_path(const HoloFun& f, std::span<const cplx> vertices, double tol) {
  cplx total = 0.0;
  if (vertices.size() < 2) return total;
  const double per = tol / static_cast<double>(vertices.size() - 1);
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    total += integrate_segment(f, vertices[i - 1], vertices[i], per);
  }
  return total;
}

}  // namespace minsurf
