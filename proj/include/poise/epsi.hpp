#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace poise {

/// 1D EPSI readout. Each gradient pair occupies
/// [positive lobe: ppg][gap][negative lobe: ppg][gap], after `group_delay`
/// leading points.
struct EpsiFid {
  std::vector<std::complex<double>> samples;
  std::size_t points_per_gradient = 0;
  std::size_t n_gradient_pairs = 0;
  std::size_t group_delay = 0;
  std::size_t gap_points = 0;

  std::size_t pair_length() const noexcept { return 2 * (points_per_gradient + gap_points); }
  std::size_t required_length() const noexcept {
    return group_delay + n_gradient_pairs * pair_length();
  }
};

/// Magnitude (k, t2) matrix, row-major: one row per gradient pair.
struct KtMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// Circular left shift by the group delay; the result has group_delay 0.
EpsiFid remove_group_delay(const EpsiFid& fid);

/// Keeps the positive-gradient lobe of every pair, takes the magnitude and
/// applies a sine bell across the lobe. Throws TruncatedFidError when the
/// FID is too short and ConfigError if the group delay is still present.
KtMatrix reshape_and_filter(const EpsiFid& fid);

/// Least-squares slope of argmax(row)/cols against row index, over rows whose
/// maximum reaches threshold_frac of the global maximum.
double drift_slope(const KtMatrix& m, double threshold_frac = 0.1);

/// |drift_slope| of the processed FID.
double epsi_gradient_drift(const EpsiFid& fid);

/// Text fixture: header "ppg ngp gd gap", then one "re im" per line.
void write_epsi(std::ostream& os, const EpsiFid& fid);
EpsiFid read_epsi(std::istream& is);

}  // namespace poise
