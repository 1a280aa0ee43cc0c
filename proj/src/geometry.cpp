#include "aobc/geometry.hpp"

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

#include "aobc/errors.hpp"

namespace aobc {
namespace {

void require_finite_nonnegative(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    throw InvalidParameter(std::string(name) + " must be finite and >= 0");
  }
}

void require_finite_positive(double value, const char* name) {
  if (!std::isfinite(value) || value <= 0.0) {
    throw InvalidParameter(std::string(name) + " must be finite and > 0");
  }
}

Point uniform_in_disk(double radius, RandomStream& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (;;) {
    const double rho = radius * std::sqrt(unit(rng));
    const double phi = 2.0 * std::numbers::pi * unit(rng);
    Point pt{rho * std::cos(phi), rho * std::sin(phi)};
    // l(0) is singular; a point exactly at the origin is redrawn.
    if (pt.x != 0.0 || pt.y != 0.0) return pt;
  }
}

std::vector<Point> sample_disk_ppp(double lambda, double radius, RandomStream& rng) {
  const double mean = lambda * std::numbers::pi * radius * radius;
  if (mean == 0.0) return {};
  const auto count = std::poisson_distribution<std::int64_t>(mean)(rng);
  return sample_uniform_disk(static_cast<std::size_t>(count), radius, rng);
}

// Integral of u / (1 + u^beta) over [u0, inf), via v = 1/u.
double edge_kernel_tail(double u0, double beta) {
  if (u0 <= 0.0) {
    return (std::numbers::pi / beta) / std::sin(2.0 * std::numbers::pi / beta);
  }
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto f = [beta](double v) { return std::pow(v, beta - 3.0) / (1.0 + std::pow(v, beta)); };
  return integrator.integrate(f, 0.0, 1.0 / u0);
}

}  // namespace

void Realization::validate() const {
  require_finite_positive(node_radius, "node_radius");
  require_finite_positive(window_radius, "window_radius");
  if (window_radius < node_radius) {
    throw InvalidParameter("window_radius must be >= node_radius");
  }
  for (const Point& pt : nodes) {
    if (!std::isfinite(pt.x) || !std::isfinite(pt.y)) throw InvalidParameter("non-finite node");
    if (pt.norm2() == 0.0) throw InvalidParameter("node at the origin");
    if (pt.norm() >= node_radius) throw InvalidParameter("node outside the node disk");
  }
  for (const Point& pt : interferers) {
    if (!std::isfinite(pt.x) || !std::isfinite(pt.y)) {
      throw InvalidParameter("non-finite interferer");
    }
    if (pt.norm2() == 0.0) throw InvalidParameter("interferer at the origin");
    if (pt.norm() > window_radius) throw InvalidParameter("interferer outside the window");
  }
}

std::vector<Point> sample_node_process(double lambda, double r, RandomStream& rng) {
  require_finite_nonnegative(lambda, "lambda");
  require_finite_positive(r, "r");
  return sample_disk_ppp(lambda, r, rng);
}

std::vector<Point> sample_interferer_process(double lambda, double window_radius,
                                             RandomStream& rng) {
  require_finite_nonnegative(lambda, "lambda");
  require_finite_positive(window_radius, "window_radius");
  return sample_disk_ppp(lambda, window_radius, rng);
}

std::vector<Point> sample_uniform_disk(std::size_t count, double radius,
                                       RandomStream& rng) {
  require_finite_positive(radius, "radius");
  std::vector<Point> points;
  points.reserve(count);
  while (points.size() < count) {
    Point pt = uniform_in_disk(radius, rng);
    // r*sqrt(U) with U < 1 stays inside, but rounding can land on the rim.
    if (pt.norm() < radius) points.push_back(pt);
  }
  return points;
}

double truncation_tail_fraction(double window_radius, const NetworkParams& params) {
  if (!(params.beta > 2.0)) {
    throw DivergenceError("path loss exponent must exceed 2 for finite interference");
  }
  const double scale = params.r * std::pow(params.theta, 1.0 / params.beta);
  const double u0 = std::max(0.0, (window_radius - params.r) / scale);
  return edge_kernel_tail(u0, params.beta) / edge_kernel_tail(0.0, params.beta);
}

double truncation_window_radius(const NetworkParams& params, double rel_tol) {
  if (!(params.beta > 2.0)) {
    throw DivergenceError("path loss exponent must exceed 2 for finite interference");
  }
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw InvalidParameter("rel_tol must lie in (0, 1)");
  }
  require_finite_nonnegative(params.lambda, "lambda");
  require_finite_positive(params.r, "r");
  require_finite_positive(params.theta, "theta");

  auto excess = [&](double radius) {
    return truncation_tail_fraction(radius, params) - rel_tol;
  };
  const double floor = 2.0 * params.r;
  if (excess(floor) <= 0.0) return floor;

  double lo = floor;
  double hi = 2.0 * floor;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
  }
  std::uintmax_t iterations = 200;
  auto [a, b] = boost::math::tools::toms748_solve(
      excess, lo, hi, boost::math::tools::eps_tolerance<double>(48), iterations);
  // Return the side that satisfies the tolerance.
  return excess(a) <= 0.0 ? a : b;
}

std::vector<double> ordered_squared_distances(std::span<const Point> points) {
  std::vector<double> out;
  out.reserve(points.size());
  for (const Point& pt : points) out.push_back(pt.norm2());
  std::sort(out.begin(), out.end());
  return out;
}

void write_realization(std::ostream& out, const Realization& realization) {
  std::ostringstream text;
  text << std::setprecision(17);
  text << "r=" << realization.node_radius << " Rw=" << realization.window_radius << '\n';
  for (const Point& pt : realization.nodes) text << "N " << pt.x << ' ' << pt.y << '\n';
  for (const Point& pt : realization.interferers) {
    text << "I " << pt.x << ' ' << pt.y << '\n';
  }
  out << text.str();
}

Realization read_realization(std::istream& in) {
  Realization realization;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  auto fail = [&](const std::string& what) {
    throw InvalidParameter("realization line " + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    fields.imbue(std::locale::classic());
    if (!have_header) {
      std::string r_field;
      std::string rw_field;
      if (!(fields >> r_field >> rw_field) || r_field.rfind("r=", 0) != 0 ||
          rw_field.rfind("Rw=", 0) != 0) {
        fail("expected header 'r=<val> Rw=<val>'");
      }
      try {
        realization.node_radius = std::stod(r_field.substr(2));
        realization.window_radius = std::stod(rw_field.substr(3));
      } catch (const std::exception&) {
        fail("malformed radius");
      }
      have_header = true;
      continue;
    }
    std::string kind;
    Point pt;
    if (!(fields >> kind >> pt.x >> pt.y)) fail("expected 'N|I <x> <y>'");
    std::string trailing;
    if (fields >> trailing) fail("unexpected trailing text");
    if (kind == "N") {
      realization.nodes.push_back(pt);
    } else if (kind == "I") {
      realization.interferers.push_back(pt);
    } else {
      fail("point kind must be N or I");
    }
  }
  if (!have_header) throw InvalidParameter("realization: missing header");
  realization.validate();
  return realization;
}

}  // namespace aobc
