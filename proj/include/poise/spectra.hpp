#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace poise {

/// Frequency-domain 1D spectrum. Index 0 sits at the high-frequency (high
/// ppm) edge; the transmitter offset is the centre of the window.
class Spectrum1D {
 public:
  Spectrum1D() = default;
  /// Throws ConfigError on mismatched lengths or non-positive axis values.
  Spectrum1D(std::vector<double> real, std::vector<double> imag, double spectral_width_hz,
             double transmitter_offset_hz, double spectrometer_freq_mhz);

  /// All-zero spectrum with the given axis.
  static Spectrum1D zeros(std::size_t n, double spectral_width_hz, double transmitter_offset_hz,
                          double spectrometer_freq_mhz);

  const std::vector<double>& real() const noexcept { return real_; }
  const std::vector<double>& imag() const noexcept { return imag_; }
  std::vector<double>& real() noexcept { return real_; }
  std::vector<double>& imag() noexcept { return imag_; }

  std::size_t size() const noexcept { return real_.size(); }
  double spectral_width() const noexcept { return sw_; }
  double transmitter_offset() const noexcept { return o1_; }
  double spectrometer_freq() const noexcept { return sfo_; }

  /// Absolute frequency of point i in Hz (same frame as the transmitter offset).
  double hz(std::size_t i) const noexcept;
  double ppm(std::size_t i) const noexcept { return hz(i) / sfo_; }

  /// Sub-spectrum of points [begin, end) with the axis adjusted so every kept
  /// point keeps its frequency.
  Spectrum1D slice(std::size_t begin, std::size_t end) const;

 private:
  std::vector<double> real_;
  std::vector<double> imag_;
  double sw_ = 1.0;
  double o1_ = 0.0;
  double sfo_ = 1.0;
};

/// Chemical-shift window with inclusive bounds; default-constructed is the
/// whole spectrum.
struct Region {
  std::optional<double> lo_ppm;
  std::optional<double> hi_ppm;

  static Region whole() { return {}; }
  /// Throws ConfigError unless lo < hi.
  static Region ppm(double lo, double hi);
  /// Parses "lo,hi" or "whole".
  static Region parse(const std::string& text);

  bool is_whole() const noexcept { return !lo_ppm; }
  std::string to_string() const;

  friend bool operator==(const Region&, const Region&) = default;
};

struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// Contiguous index range whose ppm values lie in the region. Throws
/// EmptyRegionError when no point qualifies.
IndexRange select_region(const Spectrum1D& s, const Region& r);

double sum_real(const Spectrum1D& s, const Region& r);
double sum_abs_real(const Spectrum1D& s, const Region& r);
double sum_sq_real(const Spectrum1D& s, const Region& r);
double sum_magnitude(const Spectrum1D& s, const Region& r);

/// Text fixture: header "sw_hz offset_hz sfo_mhz npoints" then one
/// "real imag" pair per line.
void write_spectrum(std::ostream& os, const Spectrum1D& s);
Spectrum1D read_spectrum(std::istream& is);
void save_spectrum(const std::string& path, const Spectrum1D& s);
Spectrum1D load_spectrum(const std::string& path);

}  // namespace poise
