#include "poise/spectra.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "numfmt.hpp"
#include "poise/errors.hpp"

namespace poise {

Spectrum1D::Spectrum1D(std::vector<double> real, std::vector<double> imag,
                       double spectral_width_hz, double transmitter_offset_hz,
                       double spectrometer_freq_mhz)
    : real_(std::move(real)),
      imag_(std::move(imag)),
      sw_(spectral_width_hz),
      o1_(transmitter_offset_hz),
      sfo_(spectrometer_freq_mhz) {
  if (real_.size() != imag_.size())
    throw ConfigError("spectrum real and imaginary parts differ in length");
  if (real_.empty()) throw ConfigError("spectrum has no points");
  if (!(sw_ > 0.0)) throw ConfigError("spectral width must be positive");
  if (!(sfo_ > 0.0)) throw ConfigError("spectrometer frequency must be positive");
}

Spectrum1D Spectrum1D::zeros(std::size_t n, double sw, double o1, double sfo) {
  return Spectrum1D(std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), sw, o1, sfo);
}

double Spectrum1D::hz(std::size_t i) const noexcept {
  return o1_ + 0.5 * sw_ - static_cast<double>(i) * sw_ / static_cast<double>(size());
}

Spectrum1D Spectrum1D::slice(std::size_t begin, std::size_t end) const {
  if (!(begin < end && end <= size())) throw EmptyRegionError("empty or out-of-range slice");
  const double step = sw_ / static_cast<double>(size());
  const double sw = step * static_cast<double>(end - begin);
  const double first = hz(begin);
  std::vector<double> re(real_.begin() + static_cast<std::ptrdiff_t>(begin),
                         real_.begin() + static_cast<std::ptrdiff_t>(end));
  std::vector<double> im(imag_.begin() + static_cast<std::ptrdiff_t>(begin),
                         imag_.begin() + static_cast<std::ptrdiff_t>(end));
  return Spectrum1D(std::move(re), std::move(im), sw, first - 0.5 * sw, sfo_);
}

Region Region::ppm(double lo, double hi) {
  if (!(lo < hi)) throw ConfigError("region lower bound must be below upper bound");
  return Region{lo, hi};
}

Region Region::parse(const std::string& text) {
  const std::string_view t = detail::trim(text);
  if (t.empty() || t == "whole") return whole();
  const auto comma = t.find(',');
  if (comma == std::string_view::npos) throw ConfigError("region must be 'lo,hi' in ppm");
  const auto lo = detail::parse_double(t.substr(0, comma));
  const auto hi = detail::parse_double(t.substr(comma + 1));
  if (!lo || !hi) throw ConfigError("region bounds must be numbers: '" + text + "'");
  return ppm(*lo, *hi);
}

std::string Region::to_string() const {
  if (is_whole()) return "whole";
  return detail::format_double(*lo_ppm) + "," + detail::format_double(*hi_ppm);
}

IndexRange select_region(const Spectrum1D& s, const Region& r) {
  if (r.is_whole()) return {0, s.size()};
  // ppm decreases with index, so the qualifying points are contiguous.
  std::size_t begin = s.size();
  std::size_t end = s.size();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double p = s.ppm(i);
    const bool inside = p >= *r.lo_ppm && p <= *r.hi_ppm;
    if (inside && begin == s.size()) begin = i;
    if (!inside && begin != s.size()) {
      end = i;
      break;
    }
  }
  if (begin == s.size())
    throw EmptyRegionError("region " + r.to_string() + " ppm does not overlap the spectrum (" +
                           detail::format_double(s.ppm(s.size() - 1)) + " to " +
                           detail::format_double(s.ppm(0)) + " ppm)");
  return {begin, end};
}

namespace {

template <class F>
double reduce(const Spectrum1D& s, const Region& r, F&& term) {
  const IndexRange idx = select_region(s, r);
  double acc = 0.0;
  for (std::size_t i = idx.begin; i < idx.end; ++i) acc += term(s.real()[i], s.imag()[i]);
  return acc;
}

}  // namespace

double sum_real(const Spectrum1D& s, const Region& r) {
  return reduce(s, r, [](double re, double) { return re; });
}

double sum_abs_real(const Spectrum1D& s, const Region& r) {
  return reduce(s, r, [](double re, double) { return std::abs(re); });
}

double sum_sq_real(const Spectrum1D& s, const Region& r) {
  return reduce(s, r, [](double re, double) { return re * re; });
}

double sum_magnitude(const Spectrum1D& s, const Region& r) {
  return reduce(s, r, [](double re, double im) { return std::hypot(re, im); });
}

void write_spectrum(std::ostream& os, const Spectrum1D& s) {
  os << detail::format_double(s.spectral_width()) << ' '
     << detail::format_double(s.transmitter_offset()) << ' '
     << detail::format_double(s.spectrometer_freq()) << ' ' << s.size() << '\n';
  for (std::size_t i = 0; i < s.size(); ++i)
    os << detail::format_double(s.real()[i]) << ' ' << detail::format_double(s.imag()[i]) << '\n';
}

Spectrum1D read_spectrum(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("spectrum fixture is empty");
  std::istringstream header(line);
  double sw = 0, o1 = 0, sfo = 0;
  std::size_t n = 0;
  if (!(header >> sw >> o1 >> sfo >> n))
    throw IoError("spectrum header must be 'sw_hz offset_hz sfo_mhz npoints'");
  std::vector<double> re, im;
  re.reserve(n);
  im.reserve(n);
  while (re.size() < n && std::getline(is, line)) {
    if (detail::trim(line).empty()) continue;
    std::istringstream row(line);
    double a = 0, b = 0;
    if (!(row >> a >> b))
      throw IoError("bad spectrum point on data line " + std::to_string(re.size() + 1));
    re.push_back(a);
    im.push_back(b);
  }
  if (re.size() != n)
    throw IoError("spectrum fixture declares " + std::to_string(n) + " points but has " +
                  std::to_string(re.size()));
  return Spectrum1D(std::move(re), std::move(im), sw, o1, sfo);
}

void save_spectrum(const std::string& path, const Spectrum1D& s) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  write_spectrum(os, s);
}

Spectrum1D load_spectrum(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read " + path);
  return read_spectrum(is);
}

}  // namespace poise
