#pragma once

namespace aobc {

/// Physical-layer constants shared by every formula and simulation.
/// Defaults are the reference operating point (lambda = 0.01 /m^2, theta = 5,
/// p = 0.2, beta = 4, r = 10 m).
struct NetworkParams {
  double lambda = 0.01;  // node and interferer intensity, per m^2
  double theta = 5.0;    // SIR threshold, > 1
  double p = 0.2;        // medium access probability
  double beta = 4.0;     // path loss exponent, > 2
  double r = 10.0;       // node disk radius, m

  /// delta = 2 / beta
  double delta() const { return 2.0 / beta; }

  /// Throws InvalidParameter / DivergenceError naming the offending field.
  void validate() const;

  bool operator==(const NetworkParams&) const = default;
};

enum class Mode { broadcast, collection };

const char* to_string(Mode mode);

}  // namespace aobc
