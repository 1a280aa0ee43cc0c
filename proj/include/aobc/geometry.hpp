#pragma once

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "aobc/params.hpp"
#include "aobc/rng.hpp"

namespace aobc {

struct Point {
  double x = 0.0;
  double y = 0.0;

  double norm2() const { return x * x + y * y; }
  double norm() const { return std::hypot(x, y); }

  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  bool operator==(const Point&) const = default;
};

/// One sampled placement. The base station sits at the origin; nodes live in
/// the open disk of radius node_radius, interferers in the disk of radius
/// window_radius (a truncation of the plane).
struct Realization {
  std::vector<Point> nodes;
  std::vector<Point> interferers;
  double node_radius = 0.0;
  double window_radius = 0.0;

  /// Checks the placement invariants; throws InvalidParameter.
  void validate() const;

  bool operator==(const Realization&) const = default;
};

/// Homogeneous PPP of intensity `lambda` on the disk of radius `r`
/// (Poisson count, then uniform polar placement with radius r*sqrt(U)).
std::vector<Point> sample_node_process(double lambda, double r, RandomStream& rng);

/// Same process on the truncation window.
std::vector<Point> sample_interferer_process(double lambda, double window_radius,
                                             RandomStream& rng);

/// `count` i.i.d. uniform points in the open disk, none at the origin.
std::vector<Point> sample_uniform_disk(std::size_t count, double radius,
                                       RandomStream& rng);

/// Smallest window radius R_w >= 2r such that interferers beyond R_w can
/// contribute at most `rel_tol` of the full-plane interference exponent seen
/// at the node-disk edge. The tail is evaluated for the worst edge point,
/// i.e. over all transmitters farther than R_w - r from it. Monotone
/// nonincreasing in rel_tol; lambda and p cancel out of the ratio.
double truncation_window_radius(const NetworkParams& params, double rel_tol);

/// Fraction of the full-plane interference exponent at the disk edge that
/// comes from transmitters farther than `window_radius - r` from the edge
/// point. This is the quantity truncation_window_radius inverts.
double truncation_tail_fraction(double window_radius, const NetworkParams& params);

/// |point|^2 for every point, ascending.
std::vector<double> ordered_squared_distances(std::span<const Point> points);

/// Plain-text realization format:
///   r=<val> Rw=<val>
///   N <x> <y>     (node)
///   I <x> <y>     (interferer)
void write_realization(std::ostream& out, const Realization& realization);
Realization read_realization(std::istream& in);

}  // namespace aobc
