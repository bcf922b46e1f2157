#include "poise/epsi.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "numfmt.hpp"
#include "poise/errors.hpp"

namespace poise {

EpsiFid remove_group_delay(const EpsiFid& fid) {
  EpsiFid out = fid;
  out.group_delay = 0;
  if (fid.samples.empty() || fid.group_delay == 0) return out;
  const auto shift = static_cast<std::ptrdiff_t>(fid.group_delay % fid.samples.size());
  std::rotate(out.samples.begin(), out.samples.begin() + shift, out.samples.end());
  return out;
}

KtMatrix reshape_and_filter(const EpsiFid& fid) {
  if (fid.group_delay != 0) throw ConfigError("remove the group delay before reshaping");
  const std::size_t ppg = fid.points_per_gradient;
  if (ppg == 0 || fid.n_gradient_pairs == 0)
    throw ConfigError("EPSI geometry needs positive points per gradient and pair count");
  if (fid.samples.size() < fid.required_length())
    throw TruncatedFidError("FID has " + std::to_string(fid.samples.size()) + " points, geometry needs " +
                            std::to_string(fid.required_length()));

  std::vector<double> window(ppg);
  for (std::size_t k = 0; k < ppg; ++k)
    window[k] = std::sin(std::numbers::pi * (static_cast<double>(k) + 0.5) / static_cast<double>(ppg));

  KtMatrix m{fid.n_gradient_pairs, ppg, std::vector<double>(fid.n_gradient_pairs * ppg)};
  for (std::size_t r = 0; r < m.rows; ++r) {
    const std::size_t start = r * fid.pair_length();
    for (std::size_t k = 0; k < ppg; ++k)
      m.values[r * ppg + k] = std::abs(fid.samples[start + k]) * window[k];
  }
  return m;
}

double drift_slope(const KtMatrix& m, double threshold_frac) {
  if (!(threshold_frac > 0.0 && threshold_frac < 1.0))
    throw ConfigError("threshold fraction must lie in (0, 1)");
  if (m.cols == 0 || m.values.size() != m.rows * m.cols) throw ConfigError("malformed k-t matrix");

  std::vector<double> row_max(m.rows);
  std::vector<std::size_t> row_arg(m.rows);
  for (std::size_t r = 0; r < m.rows; ++r) {
    const auto first = m.values.begin() + static_cast<std::ptrdiff_t>(r * m.cols);
    const auto it = std::max_element(first, first + static_cast<std::ptrdiff_t>(m.cols));
    row_max[r] = *it;
    row_arg[r] = static_cast<std::size_t>(it - first);
  }
  const double global = m.rows ? *std::max_element(row_max.begin(), row_max.end()) : 0.0;

  std::vector<double> t, k;
  for (std::size_t r = 0; r < m.rows; ++r) {
    if (global > 0.0 && row_max[r] >= threshold_frac * global) {
      t.push_back(static_cast<double>(r));
      k.push_back(static_cast<double>(row_arg[r]) / static_cast<double>(m.cols));
    }
  }
  if (t.size() < 2)
    throw InsufficientSignalError("only " + std::to_string(t.size()) +
                                  " rows above the intensity threshold; need 2");

  const double n = static_cast<double>(t.size());
  double tm = 0, km = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    tm += t[i];
    km += k[i];
  }
  tm /= n;
  km /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sxy += (t[i] - tm) * (k[i] - km);
    sxx += (t[i] - tm) * (t[i] - tm);
  }
  return sxy / sxx;
}

double epsi_gradient_drift(const EpsiFid& fid) {
  return std::abs(drift_slope(reshape_and_filter(remove_group_delay(fid))));
}

void write_epsi(std::ostream& os, const EpsiFid& fid) {
  os << fid.points_per_gradient << ' ' << fid.n_gradient_pairs << ' ' << fid.group_delay << ' '
     << fid.gap_points << '\n';
  for (const auto& z : fid.samples)
    os << detail::format_double(z.real()) << ' ' << detail::format_double(z.imag()) << '\n';
}

EpsiFid read_epsi(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("EPSI fixture is empty");
  EpsiFid fid;
  std::istringstream header(line);
  if (!(header >> fid.points_per_gradient >> fid.n_gradient_pairs >> fid.group_delay >> fid.gap_points))
    throw IoError("EPSI header must be 'ppg ngp gd gap'");
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    std::istringstream row(line);
    double re = 0, im = 0;
    if (!(row >> re >> im)) throw IoError("bad EPSI sample on line " + std::to_string(lineno));
    fid.samples.emplace_back(re, im);
  }
  return fid;
}

}  // namespace poise
