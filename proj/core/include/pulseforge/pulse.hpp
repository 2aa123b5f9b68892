#pragma once

#include "pulseforge/numkit.hpp"

#include <iosfwd>
#include <utility>
#include <vector>

namespace pulseforge {

/// Piecewise-constant control on a uniform grid. amps is
/// (quadratures x n_pixels), in GHz (epsilon / 2pi).
struct Pulse {
  double total_time = 0.0;  ///< ns
  RealMatrix amps;

  Pulse() = default;
  Pulse(double total_time_ns, RealMatrix amplitudes);
  Pulse(double total_time_ns, int quadratures, int n_pixels);

  int n_pixels() const { return static_cast<int>(amps.cols()); }
  int quadratures() const { return static_cast<int>(amps.rows()); }
  double tau() const { return total_time / n_pixels(); }

  /// Row-major flattening (quadrature-major), the optimizer's parameter vector.
  RealVector flatten() const;
  static Pulse unflatten(double total_time_ns, int quadratures, const RealVector& theta);
};

/// Pixel count for pixels of nominal width dt covering total_time
/// (rounded, at least one pixel).
int pixels_for(double total_time, double dt);

/// Gaussian turn-on, flat top at `peak`, mirrored Gaussian turn-off.
Pulse flat_top_gaussian(int n_pixels, double total_time, double peak, int ramp_pixels);

/// Same pulse with extra zero quadratures appended (or trailing ones dropped,
/// which must be identically zero).
Pulse with_quadratures(const Pulse& p, int quadratures);

struct FilterSpec {
  double sigma = 15.0;  ///< ns, Gaussian standard deviation
  int oversample = 5;  ///< fine pixels per coarse pixel
};

/// Transfer matrix (n_pixels * oversample) x n_pixels for a Gaussian filter.
RealMatrix transfer_matrix(int n_pixels, double total_time, const FilterSpec& f);

Pulse apply_filter(const Pulse& p, const FilterSpec& f);

struct ClampReport {
  bool ok = true;
  std::vector<std::pair<int, int>> violations;  ///< (quadrature, pixel)
};

/// Closed interval: |amp| == bound passes.
ClampReport clamp_check(const Pulse& p, double bound);

/// Header: t_start_ns,duration_ns,amp_x_GHz,amp_y_GHz
void write_pulse_csv(std::ostream& out, const Pulse& p);
void write_pulse_csv(const std::string& path, const Pulse& p);

/// Parses the CSV written above into a pulse with the requested number of
/// quadratures. Throws ConfigError on malformed input, a non-uniform grid, or
/// a nonzero y column when one quadrature is requested.
Pulse read_pulse_csv(std::istream& in, int quadratures);
Pulse read_pulse_csv(const std::string& path, int quadratures);

}  // namespace pulseforge
