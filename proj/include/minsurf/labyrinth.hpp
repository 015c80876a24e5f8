#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minsurf/holo.hpp"
#include "minsurf/holo_json.hpp"

namespace minsurf {

/// The compact set K = K_1 u ... u K_{2N^2} inside the annulus r' < |z| < R'.
///
/// With s_n = R' - n / N^3, piece K_n is the radial band
/// s_n + 1/(4N^3) <= |z| <= s_{n-1} - 1/(4N^3) minus the gate where
/// arg((-1)^n z) (taken in [0, 2pi)) is below 1/N^2 or above 2pi - 1/N^2.
/// The gate of K_n is therefore centred at angle pi for odd n and at 0 for
/// even n. Boundaries are closed.
class Labyrinth {
 public:
  static Labyrinth build(int N, double r_prime, double R_prime, Domain domain = Domain::plane());

  int N() const noexcept { return N_; }
  double r_prime() const noexcept { return r_prime_; }
  double R_prime() const noexcept { return R_prime_; }
  int pieces() const noexcept { return 2 * N_ * N_; }
  /// s_0 .. s_{2N^2}.
  const std::vector<double>& radii() const noexcept { return s_; }

  struct Band {
    double inner, outer;
  };
  Band band(int n) const;                     // n in [1, 2N^2]
  double gate_center(int n) const noexcept;   // pi for odd n, 0 for even n
  double gate_half_width() const noexcept { return 1.0 / (double(N_) * N_); }
  double gap_width() const noexcept { return 1.0 / (2.0 * N_ * N_ * N_); }

  bool contains(cplx z) const noexcept;
  /// Index of the piece containing z, if any.
  std::optional<int> piece_of(cplx z) const noexcept;
  /// True when z lies in the radial band of piece n (gate ignored).
  bool in_band(int n, double rho) const noexcept;

  /// Closed boundary polyline of piece n, counter-clockwise along the outer arc
  /// and back along the inner arc; `per_arc` points per arc.
  std::vector<cplx> boundary_loop(int n, int per_arc) const;

 private:
  int N_ = 0;
  double r_prime_ = 0.0, R_prime_ = 0.0;
  std::vector<double> s_;
};

/// arg(z) in [0, 2pi).
double arg_0_2pi(cplx z) noexcept;

/// 0.9 times the minimum of |phi3| over a samples x samples polar grid of the
/// closed annulus r' <= |z| <= R'. Throws ZeroDetected when the minimum is
/// below 1e-12 or when the argument principle on the two boundary circles
/// counts a zero inside.
double min_phi3_modulus(const HoloFun& phi3, double r_prime, double R_prime, int samples);

/// Number of zeros of f inside the circle |z| = rho (argument principle; f
/// must not vanish on the circle).
int winding_number(const HoloFun& f, double rho, int min_samples = 256);

json labyrinth_to_json(const Labyrinth& lab, int per_arc = 0);
std::string labyrinth_svg(const Labyrinth& lab, int per_arc = 256);

}  // namespace minsurf
