#include "minsurf/labyrinth.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace minsurf {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

double arg_0_2pi(cplx z) noexcept {
  double a = std::arg(z);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

Labyrinth Labyrinth::build(int N, double r_prime, double R_prime, Domain domain) {
  if (N < 1) throw Error(ErrorCode::ConstraintViolated, "N must be a positive integer");
  if (!(r_prime > 0.0) || !(r_prime < R_prime)) {
    throw Error(ErrorCode::ConstraintViolated, "need 0 < r' < R', got r' = " + num(r_prime) + ", R' = " + num(R_prime));
  }
  if (domain.is_disk() && !(R_prime < 1.0)) {
    throw Error(ErrorCode::ConstraintViolated, "R' = " + num(R_prime) + " must be below 1 on the disk");
  }
  if (!(2.0 / N < R_prime - r_prime)) {
    throw Error(ErrorCode::ConstraintViolated, "2/N = " + num(2.0 / N) + " >= R' - r' = " + num(R_prime - r_prime));
  }
  Labyrinth lab;
  lab.N_ = N;
  lab.r_prime_ = r_prime;
  lab.R_prime_ = R_prime;
  const double n3 = double(N) * N * N;
  for (int n = 0; n <= 2 * N * N; ++n) lab.s_.push_back(R_prime - n / n3);
  return lab;
}

Labyrinth::Band Labyrinth::band(int n) const {
  if (n < 1 || n > pieces()) throw Error(ErrorCode::Precondition, "piece index out of range");
  const double q = 1.0 / (4.0 * N_ * N_ * N_);
  return {s_[n] + q, s_[n - 1] - q};
}

double Labyrinth::gate_center(int n) const noexcept { return (n % 2 != 0) ? std::numbers::pi : 0.0; }

bool Labyrinth::in_band(int n, double rho) const noexcept {
  const Band b = band(n);
  return rho >= b.inner && rho <= b.outer;
}

std::optional<int> Labyrinth::piece_of(cplx z) const noexcept {
  const double rho = std::abs(z);
  const double n3 = double(N_) * N_ * N_;
  // Candidate piece from the radius, then the neighbours to absorb rounding.
  const int guess = static_cast<int>(std::ceil((R_prime_ - rho) * n3));
  for (int n = guess - 1; n <= guess + 1; ++n) {
    if (n < 1 || n > pieces() || !in_band(n, rho)) continue;
    const cplx w = (n % 2 != 0) ? -z : z;
    const double a = arg_0_2pi(w);
    const double h = gate_half_width();
    if (a >= h && a <= kTwoPi - h) return n;
    return std::nullopt;
  }
  return std::nullopt;
}

bool Labyrinth::contains(cplx z) const noexcept { return piece_of(z).has_value(); }

std::vector<cplx> Labyrinth::boundary_loop(int n, int per_arc) const {
  const Band b = band(n);
  const double c = gate_center(n), h = gate_half_width();
  const double a0 = c + h, a1 = c + kTwoPi - h;
  std::vector<cplx> loop;
  loop.reserve(2 * per_arc + 1);
  for (int k = 0; k < per_arc; ++k) loop.push_back(std::polar(b.outer, a0 + (a1 - a0) * k / (per_arc - 1.0)));
  for (int k = per_arc - 1; k >= 0; --k) loop.push_back(std::polar(b.inner, a0 + (a1 - a0) * k / (per_arc - 1.0)));
  loop.push_back(loop.front());
  return loop;
}

int winding_number(const HoloFun& f, double rho, int min_samples) {
  for (int m = std::max(16, min_samples); m <= (1 << 20); m *= 2) {
    double total = 0.0;
    bool fine = true;
    cplx prev = f(std::polar(rho, 0.0));
    if (prev == 0.0) throw Error(ErrorCode::ZeroDetected, "zero on the circle |z| = " + num(rho));
    for (int k = 1; k <= m; ++k) {
      const cplx cur = f(std::polar(rho, kTwoPi * k / m));
      if (cur == 0.0) throw Error(ErrorCode::ZeroDetected, "zero on the circle |z| = " + num(rho));
      const double step = std::arg(cur / prev);
      if (std::abs(step) > 0.5) {
        fine = false;
        break;
      }
      total += step;
      prev = cur;
    }
    if (fine) return static_cast<int>(std::lround(total / kTwoPi));
  }
  throw Error(ErrorCode::ToleranceNotReached, "phase of f on |z| = " + num(rho) + " not resolved");
}

double min_phi3_modulus(const HoloFun& phi3, double r_prime, double R_prime, int samples) {
  if (samples < 2 || !(0.0 <= r_prime) || !(r_prime < R_prime)) {
    throw Error(ErrorCode::Precondition, "need samples >= 2 and 0 <= r' < R'");
  }
  double lo = INFINITY;
  for (int i = 0; i < samples; ++i) {
    const double rho = r_prime + (R_prime - r_prime) * i / (samples - 1.0);
    for (int j = 0; j < samples; ++j) {
      lo = std::min(lo, std::abs(phi3(std::polar(rho, kTwoPi * j / samples))));
    }
  }
  if (!(lo >= 1e-12)) {
    throw Error(ErrorCode::ZeroDetected, "min |phi3| = " + num(lo) + " on the annulus [" + num(r_prime) + ", " +
                                             num(R_prime) + "]");
  }
  // A zero between grid nodes still changes the winding number across the annulus.
  const int inside = winding_number(phi3, R_prime, 4 * samples) -
                     (r_prime > 0.0 ? winding_number(phi3, r_prime, 4 * samples) : 0);
  if (inside != 0) {
    throw Error(ErrorCode::ZeroDetected, std::to_string(inside) + " zero(s) of phi3 inside the annulus [" +
                                             num(r_prime) + ", " + num(R_prime) + "]");
  }
  return 0.9 * lo;
}

json labyrinth_to_json(const Labyrinth& lab, int per_arc) {
  json j;
  j["N"] = lab.N();
  j["r_prime"] = lab.r_prime();
  j["R_prime"] = lab.R_prime();
  j["radii"] = lab.radii();
  j["gate_half_width"] = lab.gate_half_width();
  j["gap_width"] = lab.gap_width();
  json pieces = json::array();
  for (int n = 1; n <= lab.pieces(); ++n) {
    const auto b = lab.band(n);
    json p{{"n", n}, {"inner", b.inner}, {"outer", b.outer}, {"gate_center", lab.gate_center(n)}};
    if (per_arc > 1) {
      json loop = json::array();
      for (cplx z : lab.boundary_loop(n, per_arc)) loop.push_back(complex_to_json(z));
      p["boundary"] = std::move(loop);
    }
    pieces.push_back(std::move(p));
  }
  j["pieces"] = std::move(pieces);
  return j;
}

std::string labyrinth_svg(const Labyrinth& lab, int per_arc) {
  const double R = lab.R_prime() * 1.05;
  const double px = 800.0, unit = px / (2.0 * R);
  std::ostringstream os;
  os.precision(6);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px << "\" height=\"" << px << "\" viewBox=\"0 0 "
     << px << ' ' << px << "\">\n";
  auto X = [&](cplx z) { return (z.real() + R) * unit; };
  auto Y = [&](cplx z) { return (R - z.imag()) * unit; };
  for (double rho : {lab.r_prime(), lab.R_prime()}) {
    os << "<circle cx=\"" << px / 2 << "\" cy=\"" << px / 2 << "\" r=\"" << rho * unit
       << "\" fill=\"none\" stroke=\"#888\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (int n = 1; n <= lab.pieces(); ++n) {
    os << "<polygon fill=\"#1f4e79\" stroke=\"none\" points=\"";
    for (cplx z : lab.boundary_loop(n, per_arc)) os << X(z) << ',' << Y(z) << ' ';
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace minsurf
