#include "minsurf/geodesy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include "minsurf/parallel.hpp"

namespace minsurf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void append_uniform(std::vector<double>& out, double a, double b, std::size_t intervals) {
  for (std::size_t k = 1; k <= intervals; ++k) out.push_back(a + (b - a) * double(k) / double(intervals));
}

std::size_t intervals_for(double width, double h) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(width / h - 1e-9)));
}

double checked(double lambda, cplx z) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::NonPositiveFactor, "metric factor " + std::to_string(lambda) + " at |z| = " +
                                                  std::to_string(std::abs(z)));
  }
  return lambda;
}

}  // namespace

MetricGrid MetricGrid::build(MetricFactor factor, double R, const Labyrinth* lab, int base_resolution,
                             std::vector<double> required_radii, int level) {
  if (!(R > 0.0) || base_resolution < 4 || level < 0) {
    throw Error(ErrorCode::Precondition, "grid needs R > 0, base_resolution >= 4, level >= 0");
  }
  MetricGrid g;
  g.factor_ = std::move(factor);
  g.R_ = R;
  g.level_ = level;
  g.base_ = base_resolution;
  if (lab) g.lab_ = *lab;
  g.required_ = required_radii;

  const double refine = std::ldexp(1.0, level);
  const double h_out = R / (base_resolution * refine);
  std::vector<double> radii;
  if (lab && lab->radii().back() < R) {
    const double n3 = double(lab->N()) * lab->N() * lab->N();
    const double a = lab->radii().back(), b = std::min(lab->R_prime(), R);
    append_uniform(radii, 0.0, a, intervals_for(a, h_out));
    // Multiples of 1/(8N^3) from s_{2N^2}: every band and gap edge is a ring.
    const double h_in = std::min(1.0 / (8.0 * n3 * refine), h_out);
    const std::size_t k_align = static_cast<std::size_t>(std::lround(1.0 / (8.0 * n3 * refine) / h_in));
    const std::size_t n_in =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::lround((b - a) * 8.0 * n3 * refine))) * k_align;
    append_uniform(radii, a, b, n_in);
    if (R > b) append_uniform(radii, b, R, intervals_for(R - b, h_out));
  } else {
    append_uniform(radii, 0.0, R, intervals_for(R, h_out));
  }
  for (double rho : required_radii) {
    if (rho > 0.0 && rho <= R) radii.push_back(rho);
  }
  std::sort(radii.begin(), radii.end());
  std::vector<double> unique;
  for (double rho : radii) {
    if (unique.empty() || rho - unique.back() > 1e-12 * R) unique.push_back(rho);
  }
  g.radii_ = std::move(unique);

  int M = base_resolution;
  if (lab) {
    const double n2 = double(lab->N()) * lab->N();
    M = std::max(M, static_cast<int>(std::ceil(kTwoPi * 2.0 * n2)));
  }
  M = (M + 3) / 4 * 4;
  g.M_ = M << level;

  const std::size_t rings = g.radii_.size(), Mz = static_cast<std::size_t>(g.M_);
  const double dth = kTwoPi / g.M_;
  auto pos = [&](std::size_t i, std::size_t j) { return std::polar(g.radii_[i], dth * double(j % Mz)); };
  auto weight = [&](cplx a, cplx b) {
    const cplx mid = 0.5 * (a + b);
    return checked(g.factor_(mid), mid) * std::abs(b - a);
  };

  g.lambda_.assign(1 + rings * Mz, 0.0);
  g.w_origin_.assign(Mz, 0.0);
  g.w_ring_.assign(rings * Mz, 0.0);
  g.w_spoke_.assign(rings * Mz, 0.0);
  g.w_up_.assign(rings * Mz, 0.0);
  g.w_down_.assign(rings * Mz, 0.0);
  g.lambda_[0] = checked(g.factor_(0.0), 0.0);
  for (std::size_t j = 0; j < Mz; ++j) g.w_origin_[j] = weight(0.0, pos(0, j));
  parallel_for(rings, [&](std::size_t i) {
    for (std::size_t j = 0; j < Mz; ++j) {
      const std::size_t k = i * Mz + j;
      const cplx z = pos(i, j);
      g.lambda_[1 + k] = checked(g.factor_(z), z);
      g.w_ring_[k] = weight(z, pos(i, j + 1));
      if (i + 1 < rings) {
        g.w_spoke_[k] = weight(z, pos(i + 1, j));
        g.w_up_[k] = weight(z, pos(i + 1, j + 1));
        g.w_down_[k] = weight(z, pos(i + 1, j + Mz - 1));
      }
    }
  });
  return g;
}

MetricGrid MetricGrid::refined() const {
  return build(factor_, R_, lab_ ? &*lab_ : nullptr, base_, required_, level_ + 1);
}

MetricGrid MetricGrid::scaled(double k) const {
  MetricGrid g = *this;
  MetricFactor inner = factor_;
  g.factor_ = [inner, k](cplx z) { return k * inner(z); };
  for (auto* v : {&g.lambda_, &g.w_origin_, &g.w_ring_, &g.w_spoke_, &g.w_up_, &g.w_down_}) {
    for (double& w : *v) w *= k;
  }
  return g;
}

cplx MetricGrid::node_position(std::size_t id) const {
  if (id == 0) return 0.0;
  const std::size_t k = id - 1, M = static_cast<std::size_t>(M_);
  return std::polar(radii_[k / M], kTwoPi * double(k % M) / M_);
}

std::size_t MetricGrid::ring_near(double rho) const {
  const auto it = std::lower_bound(radii_.begin(), radii_.end(), rho);
  if (it == radii_.end()) return radii_.size() - 1;
  const std::size_t i = static_cast<std::size_t>(it - radii_.begin());
  if (i > 0 && rho - radii_[i - 1] < *it - rho) return i - 1;
  return i;
}

GeodesicEstimate grid_distance(const MetricGrid& grid, double rho, Source from) {
  if (!(rho > 0.0) || rho > grid.R() * (1.0 + 1e-12)) {
    throw Error(ErrorCode::Precondition, "target radius must lie in (0, R]");
  }
  const std::size_t n = grid.node_count(), M = static_cast<std::size_t>(grid.angles());
  const std::size_t target = grid.ring_near(rho);
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<double> dist(n, INFINITY);
  std::vector<std::size_t> pred(n, kNone);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  if (from.rho <= 0.0) {
    dist[0] = 0.0;
    heap.emplace(0.0, 0);
  } else {
    const std::size_t s = grid.ring_near(from.rho);
    for (std::size_t j = 0; j < M; ++j) {
      dist[1 + s * M + j] = 0.0;
      heap.emplace(0.0, 1 + s * M + j);
    }
  }
  std::size_t hit = kNone;
  while (!heap.empty()) {
    const auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    if (u > 0 && (u - 1) / M == target) {
      hit = u;
      break;
    }
    grid.for_each_edge(u, [&](std::size_t v, double w) {
      const double nd = d + w;
      if (nd < dist[v]) {
        dist[v] = nd;
        pred[v] = u;
        heap.emplace(nd, v);
      }
    });
  }
  if (hit == kNone) throw Error(ErrorCode::DisconnectedGrid, "target circle unreachable");
  GeodesicEstimate e;
  e.distance = dist[hit];
  e.resolution_level = grid.level();
  e.nodes = n;
  for (std::size_t v = hit; v != kNone; v = pred[v]) e.path.push_back(grid.node_position(v));
  std::reverse(e.path.begin(), e.path.end());
  return e;
}

namespace {

std::pair<GeodesicEstimate, MetricGrid> converge(const MetricGrid& grid, double rho, Source from,
                                                 const DistanceOptions& opt) {
  MetricGrid current = grid;
  GeodesicEstimate e = grid_distance(current, rho, from);
  e.coarse_distance = e.distance;
  e.refinement_delta = 1.0;
  for (int k = 0; k < opt.max_levels; ++k) {
    MetricGrid next = current.refined();
    GeodesicEstimate f = grid_distance(next, rho, from);
    f.coarse_distance = e.distance;
    f.refinement_delta = std::abs(f.distance - e.distance) / f.distance;
    e = std::move(f);
    current = std::move(next);
    if (e.refinement_delta < opt.delta_tol) break;
  }
  return {std::move(e), std::move(current)};
}

}  // namespace

GeodesicEstimate distance(const MetricGrid& grid, double rho, Source from, const DistanceOptions& opt) {
  return converge(grid, rho, from, opt).first;
}

bool certifies(const GeodesicEstimate& e, double s, double margin, double delta_tol) {
  return e.distance * (1.0 - margin) > s && e.refinement_delta < delta_tol;
}

ClaimScanReport claim_scan(double c, const std::vector<int>& N_list, double r_prime, double R_prime,
                           int base_resolution, const DistanceOptions& opt) {
  if (!(c > 0.0)) throw Error(ErrorCode::Precondition, "c must be positive");
  ClaimScanReport rep;
  rep.c = c;
  rep.r_prime = r_prime;
  rep.R_prime = R_prime;
  std::vector<Labyrinth> labs;
  for (int N : N_list) labs.push_back(Labyrinth::build(N, r_prime, R_prime));  // validates every N first
  for (const Labyrinth& lab : labs) {
    const double n4 = std::pow(double(lab.N()), 4);
    MetricFactor f = [lab, c, n4](cplx z) { return lab.contains(z) ? c * n4 : c; };
    const MetricGrid grid = MetricGrid::build(f, R_prime, &lab, base_resolution, {r_prime});
    auto [e, finest] = converge(grid, R_prime, Source::circle(r_prime), opt);
    const GeodesicEstimate e2 = grid_distance(finest.scaled(2.0), R_prime, Source::circle(r_prime));
    ClaimScanEntry entry;
    entry.N = lab.N();
    entry.distance = e.distance;
    entry.distance_doubled_c = e2.distance;
    entry.refinement_delta = e.refinement_delta;
    rep.max_homogeneity_error = std::max(rep.max_homogeneity_error, std::abs(e2.distance / (2.0 * e.distance) - 1.0));
    rep.entries.push_back(entry);
  }
  double num = 0.0, den = 0.0;
  for (const auto& e : rep.entries) {
    num += e.distance * c * e.N;
    den += (c * e.N) * (c * e.N);
  }
  rep.rho_hat = den > 0.0 ? num / den : 0.0;
  for (auto& e : rep.entries) {
    e.fit = rep.rho_hat * c * e.N;
    e.residual = (e.distance - e.fit) / e.fit;
    rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(e.residual));
  }
  return rep;
}

json estimate_to_json(const GeodesicEstimate& e, bool with_path) {
  json j{{"distance", e.distance},
         {"resolution", e.resolution_level},
         {"refinement_delta", e.refinement_delta},
         {"coarse_distance", e.coarse_distance},
         {"nodes", e.nodes}};
  if (with_path) {
    json p = json::array();
    for (cplx z : e.path) p.push_back(complex_to_json(z));
    j["path"] = std::move(p);
  }
  return j;
}

json claim_scan_to_json(const ClaimScanReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) {
    entries.push_back({{"N", e.N},
                       {"distance", e.distance},
                       {"distance_doubled_c", e.distance_doubled_c},
                       {"refinement_delta", e.refinement_delta},
                       {"fit", e.fit},
                       {"residual", e.residual}});
  }
  return {{"c", r.c},
          {"r_prime", r.r_prime},
          {"R_prime", r.R_prime},
          {"rho_hat", r.rho_hat},
          {"max_abs_residual", r.max_abs_residual},
          {"max_homogeneity_error", r.max_homogeneity_error},
          {"entries", std::move(entries)}};
}

}  // namespace minsurf
