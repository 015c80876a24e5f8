#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "minsurf/holo.hpp"
#include "minsurf/holo_json.hpp"
#include "minsurf/labyrinth.hpp"

namespace minsurf {

using MetricFactor = std::function<double(cplx)>;

/// Polar graph over the closed disk |z| <= R carrying a conformal factor.
///
/// Nodes are the origin plus rings x uniform angles. Every node links to its
/// ring neighbours, its spoke neighbours and the two diagonals; the edge
/// weight is lambda(midpoint) * |dz|. Inside the labyrinth annulus the radial
/// spacing is 1/(8N^3) (band and gap edges fall on rings) and the angular
/// spacing is at most 1/(2N^2). Each refinement level halves both spacings.
class MetricGrid {
 public:
  static MetricGrid build(MetricFactor factor, double R, const Labyrinth* lab, int base_resolution,
                          std::vector<double> required_radii = {}, int level = 0);

  MetricGrid refined() const;

  double R() const noexcept { return R_; }
  int level() const noexcept { return level_; }
  int base_resolution() const noexcept { return base_; }
  const std::vector<double>& radii() const noexcept { return radii_; }
  int angles() const noexcept { return M_; }
  std::size_t node_count() const noexcept { return 1 + radii_.size() * static_cast<std::size_t>(M_); }
  const std::vector<double>& node_lambda() const noexcept { return lambda_; }
  cplx node_position(std::size_t id) const;
  /// Ring index closest to rho.
  std::size_t ring_near(double rho) const;
  const std::optional<Labyrinth>& labyrinth() const noexcept { return lab_; }

  /// 0 = origin, 1 + i * M + j = ring i, angle j.
  template <typename Visit>
  void for_each_edge(std::size_t id, Visit&& visit) const;

  /// Same grid with every weight multiplied by k (exact homogeneity).
  MetricGrid scaled(double k) const;

 private:
  MetricFactor factor_;
  double R_ = 1.0;
  int level_ = 0, base_ = 0, M_ = 0;
  std::optional<Labyrinth> lab_;
  std::vector<double> required_;
  std::vector<double> radii_;
  std::vector<double> lambda_;
  std::vector<double> w_origin_;                      // origin -> (0, j)
  std::vector<double> w_ring_, w_spoke_, w_up_, w_down_;  // from (i, j)
};

struct GeodesicEstimate {
  double distance = 0.0;
  std::vector<cplx> path;  // witness polyline from the source to the target circle
  int resolution_level = 0;
  double refinement_delta = 1.0;  // relative change under the last doubling
  double coarse_distance = 0.0;
  std::size_t nodes = 0;
};

/// Source of a distance query: the origin, or the whole circle |z| = rho.
struct Source {
  double rho = 0.0;
  static Source origin() { return {0.0}; }
  static Source circle(double rho) { return {rho}; }
};

/// Plain Dijkstra on one grid, minimised over the ring nearest to rho.
GeodesicEstimate grid_distance(const MetricGrid& grid, double rho, Source from = Source::origin());

struct DistanceOptions {
  int max_levels = 3;  // refinements beyond the given grid
  double delta_tol = 0.02;
};

/// Distance to the circle |z| = rho, refining until two consecutive levels
/// agree within delta_tol; the estimate is taken on the finest grid.
GeodesicEstimate distance(const MetricGrid& grid, double rho, Source from = Source::origin(),
                          const DistanceOptions& opt = {});

/// dist > s is certified only when 0.95 * distance > s and the estimate is
/// converged (refinement_delta below 2%).
bool certifies(const GeodesicEstimate& e, double s, double margin = 0.05, double delta_tol = 0.02);

struct ClaimScanEntry {
  int N = 0;
  double distance = 0.0;
  double distance_doubled_c = 0.0;
  double refinement_delta = 0.0;
  double fit = 0.0;       // rho_hat * c * N
  double residual = 0.0;  // (distance - fit) / fit
};
struct ClaimScanReport {
  double c = 1.0, r_prime = 0.0, R_prime = 0.0;
  double rho_hat = 0.0;
  double max_abs_residual = 0.0;
  double max_homogeneity_error = 0.0;  // |d(2c) / (2 d(c)) - 1|
  std::vector<ClaimScanEntry> entries;
};

/// Two-level metric (c off the labyrinth, c N^4 on it); distance from the
/// circle r' to the circle R' for each N and a least-squares fit d = rho c N.
ClaimScanReport claim_scan(double c, const std::vector<int>& N_list, double r_prime, double R_prime,
                           int base_resolution = 64, const DistanceOptions& opt = {});

json estimate_to_json(const GeodesicEstimate& e, bool with_path);
json claim_scan_to_json(const ClaimScanReport& r);

// ---------------------------------------------------------------------------

template <typename Visit>
void MetricGrid::for_each_edge(std::size_t id, Visit&& visit) const {
  const std::size_t M = static_cast<std::size_t>(M_), rings = radii_.size();
  if (id == 0) {
    for (std::size_t j = 0; j < M; ++j) visit(1 + j, w_origin_[j]);
    return;
  }
  const std::size_t k = id - 1, i = k / M, j = k % M;
  const std::size_t jn = (j + 1) % M, jp = (j + M - 1) % M;
  auto node = [&](std::size_t ii, std::size_t jj) { return 1 + ii * M + jj; };
  visit(node(i, jn), w_ring_[k]);
  visit(node(i, jp), w_ring_[i * M + jp]);
  if (i + 1 < rings) {
    visit(node(i + 1, j), w_spoke_[k]);
    visit(node(i + 1, jn), w_up_[k]);
    visit(node(i + 1, jp), w_down_[k]);
  }
  if (i == 0) {
    visit(0, w_origin_[j]);
  } else {
    const std::size_t b = (i - 1) * M;
    visit(node(i - 1, j), w_spoke_[b + j]);
    visit(node(i - 1, jp), w_up_[b + jp]);    // (i-1, jp) -> (i, j) is an "up" edge
    visit(node(i - 1, jn), w_down_[b + jn]);  // (i-1, jn) -> (i, j) is a "down" edge
  }
}

}  // namespace minsurf
