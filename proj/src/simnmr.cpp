#include "poise/simnmr.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "numfmt.hpp"
#include "poise/errors.hpp"
#include "poise/routines.hpp"

namespace poise {

namespace {

constexpr double kPi = std::numbers::pi;

double deg2rad(double d) { return d * kPi / 180.0; }

std::vector<double> parse_list(const std::string& key, std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const auto v = detail::parse_double(text.substr(start, comma - start));
    if (!v) throw ConfigError("bad number in list for '" + key + "'");
    out.push_back(*v);
    start = comma + 1;
  }
  return out;
}

}  // namespace

void SimConfig::validate() const {
  auto positive = [](const char* key, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string(key) + " must be positive");
  };
  positive("p360_true", p360_true);
  if (t1_values.empty()) throw ConfigError("t1_values must list at least one T1");
  if (t1_values.size() > std::size(sim::kPeakPpm))
    throw ConfigError("t1_values lists more T1 values than simulated peaks");
  for (double t : t1_values) positive("t1_values", t);
  positive("tau_r", tau_r);
  positive("noe_sigma", noe_sigma);
  positive("noe_r1", noe_r1);
  positive("alpha_true", alpha_true);
  positive("water_offset_hz", water_offset_hz);
  positive("water_saturation_rate", water_saturation_rate);
  // D = 0 is allowed: it models a sample that does not diffuse.
  if (!(diffusion_d >= 0.0) || !std::isfinite(diffusion_d))
    throw ConfigError("diffusion_d must be non-negative");
  positive("gamma", gamma);
  positive("delta", delta);
  positive("g_max_tesla_per_m", g_max_tesla_per_m);
  positive("inept_j_hz", inept_j_hz);
  positive("inept_r2", inept_r2);
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw ConfigError("noise_sigma must be non-negative");
}

SimConfig parse_sim_config(const std::string& text) {
  SimConfig c;
  std::map<std::string, double*> reals = {
      {"p360_true", &c.p360_true},
      {"tau_r", &c.tau_r},
      {"noe_sigma", &c.noe_sigma},
      {"noe_r1", &c.noe_r1},
      {"alpha_true", &c.alpha_true},
      {"water_offset_hz", &c.water_offset_hz},
      {"water_saturation_rate", &c.water_saturation_rate},
      {"diffusion_d", &c.diffusion_d},
      {"gamma", &c.gamma},
      {"delta", &c.delta},
      {"g_max_tesla_per_m", &c.g_max_tesla_per_m},
      {"inept_j_hz", &c.inept_j_hz},
      {"inept_r2", &c.inept_r2},
      {"noise_sigma", &c.noise_sigma},
  };
  std::istringstream is(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("sim config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key(detail::trim(line.substr(0, eq)));
    const std::string_view value = detail::trim(line.substr(eq + 1));
    if (key == "t1_values") {
      c.t1_values = parse_list(key, value);
    } else if (key == "rng_seed") {
      std::uint64_t seed = 0;
      auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
      if (ec != std::errc{} || p != value.data() + value.size())
        throw ConfigError("rng_seed must be a non-negative integer");
      c.rng_seed = seed;
    } else if (auto it = reals.find(key); it != reals.end()) {
      const auto v = detail::parse_double(value);
      if (!v) throw ConfigError("sim config line " + std::to_string(lineno) + ": '" + key +
                                "' needs a number");
      *it->second = *v;
    } else {
      throw ConfigError("sim config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

SimConfig load_sim_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read sim config " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_sim_config(ss.str());
}

std::string write_sim_config(const SimConfig& c) {
  using detail::format_double;
  std::ostringstream os;
  os << "p360_true = " << format_double(c.p360_true) << '\n';
  os << "t1_values = ";
  for (std::size_t i = 0; i < c.t1_values.size(); ++i)
    os << (i ? "," : "") << format_double(c.t1_values[i]);
  os << '\n';
  os << "tau_r = " << format_double(c.tau_r) << '\n'
     << "noe_sigma = " << format_double(c.noe_sigma) << '\n'
     << "noe_r1 = " << format_double(c.noe_r1) << '\n'
     << "alpha_true = " << format_double(c.alpha_true) << '\n'
     << "water_offset_hz = " << format_double(c.water_offset_hz) << '\n'
     << "water_saturation_rate = " << format_double(c.water_saturation_rate) << '\n'
     << "diffusion_d = " << format_double(c.diffusion_d) << '\n'
     << "gamma = " << format_double(c.gamma) << '\n'
     << "delta = " << format_double(c.delta) << '\n'
     << "g_max_tesla_per_m = " << format_double(c.g_max_tesla_per_m) << '\n'
     << "inept_j_hz = " << format_double(c.inept_j_hz) << '\n'
     << "inept_r2 = " << format_double(c.inept_r2) << '\n'
     << "noise_sigma = " << format_double(c.noise_sigma) << '\n'
     << "rng_seed = " << c.rng_seed << '\n';
  return os.str();
}

namespace sim {

namespace {

// EPSI readout geometry.
constexpr std::size_t kEpsiPpg = 256;
constexpr std::size_t kEpsiPairs = 64;
constexpr std::size_t kEpsiGroupDelay = 68;
constexpr std::size_t kEpsiGap = 8;
constexpr double kEpsiCentre = 128.0;
constexpr double kEpsiEchoWidth = 2.0;
constexpr double kEpsiDriftPerPair = 150.0;  // k points per pair per unit of alpha error
constexpr double kEpsiDecayPairs = 25.0;

// Presaturation surrogate.
constexpr double kWaterHeight = 1.0e4;
constexpr double kPresatWidthHz = 2.0;
constexpr double kPresatDetuneDepth = 0.9;
constexpr double kPresatRipple = 0.3;
constexpr double kPresatRipplePeriodHz = 3.0;

// PSYCHE surrogate.
constexpr double kPsychePhasePerRad2 = 1.333;
constexpr double kPsycheFloor = 0.05;  // noise norm relative to the target norm
constexpr std::uint64_t kPsycheFloorSeed = 0x5053594348450001ULL;
constexpr double kPsycheGpzBest = 1.5;
constexpr double kPsycheChirpBandBest = 12000.0;
constexpr double kPsycheChirpLengthBest = 30000.0;

constexpr double kNoeExcitedHeight = 10.0;

Spectrum1D blank(double o1_hz = default_transmitter_offset_hz()) {
  return Spectrum1D::zeros(kPoints, kWidthPpm * kSpectrometerMHz, o1_hz, kSpectrometerMHz);
}

std::size_t peak_count(const SimConfig& cfg) { return cfg.t1_values.size(); }

double psyche_expected_similarity(double beta_rad) {
  const double eff = std::sin(beta_rad);
  if (eff <= 0.0) return 0.0;
  const double phi = kPsychePhasePerRad2 * beta_rad * beta_rad;
  return std::cos(phi) / std::sqrt(1.0 + kPsycheFloor * kPsycheFloor / (eff * eff));
}

}  // namespace

double default_transmitter_offset_hz() { return kCentrePpm * kSpectrometerMHz; }

void add_lorentzian(Spectrum1D& s, double ppm, std::complex<double> amp, double hwhm_hz) {
  const double centre = ppm * s.spectrometer_freq();
  const double g2 = hwhm_hz * hwhm_hz;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double d = s.hz(i) - centre;
    const double den = g2 + d * d;
    const std::complex<double> shape(g2 / den, -hwhm_hz * d / den);
    const std::complex<double> z = amp * shape;
    s.real()[i] += z.real();
    s.imag()[i] += z.imag();
  }
}

void add_noise(Spectrum1D& s, double sigma, Rng& rng) {
  if (sigma <= 0.0) return;
  std::normal_distribution<double> n(0.0, sigma);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s.real()[i] += n(rng);
    s.imag()[i] += n(rng);
  }
}

double pulse_amplitude(const SimConfig& cfg, double p1_us) {
  return std::sin(2.0 * kPi * p1_us / cfg.p360_true);
}

double ernst_amplitude(double flip_deg, double tau_r, double t1) {
  const double e = std::exp(-tau_r / t1);
  const double th = deg2rad(flip_deg);
  return std::sin(th) * (1.0 - e) / (1.0 - e * std::cos(th));
}

double ernst_angle_deg(double tau_r, double t1) {
  return std::acos(std::exp(-tau_r / t1)) * 180.0 / kPi;
}

double invrec_amplitude(double tau, double t1) { return 1.0 - 2.0 * std::exp(-tau / t1); }

double noe_buildup(const SimConfig& cfg, double tau_m) {
  return (1.0 - std::exp(-cfg.noe_sigma * tau_m)) * std::exp(-cfg.noe_r1 * tau_m);
}

double noe_optimum(const SimConfig& cfg) {
  return std::log(1.0 + cfg.noe_sigma / cfg.noe_r1) / cfg.noe_sigma;
}

namespace {

// b in S = exp(-b g^2) with g in percent.
double dosy_b(const SimConfig& cfg, double big_delta) {
  const double g_per_percent = cfg.g_max_tesla_per_m / 100.0;
  return cfg.diffusion_d * cfg.gamma * cfg.gamma * cfg.delta * cfg.delta * g_per_percent *
         g_per_percent * (big_delta - cfg.delta / 3.0);
}

}  // namespace

double dosy_attenuation(const SimConfig& cfg, double g_percent, double big_delta) {
  return std::exp(-dosy_b(cfg, big_delta) * g_percent * g_percent);
}

double dosy_gradient_for_ratio(const SimConfig& cfg, double ratio, double big_delta) {
  const double b = dosy_b(cfg, big_delta);
  if (!(b > 0.0)) return std::numeric_limits<double>::infinity();
  return std::sqrt(kDosyReferencePercent * kDosyReferencePercent + std::log(1.0 / ratio) / b);
}

double inept_transfer(const SimConfig& cfg, double cnst3_hz) {
  // INEPT delays of 1/(4 cnst3): transfer sin(pi J / (2 c)), relaxation over
  // 2 tau.
  const double u = 1.0 / (2.0 * cnst3_hz);
  return std::sin(kPi * cfg.inept_j_hz * u) * std::exp(-cfg.inept_r2 * u);
}

double inept_optimum(const SimConfig& cfg) {
  const double pj = kPi * cfg.inept_j_hz;
  return pj / (2.0 * std::atan(pj / cfg.inept_r2));
}

double presat_residual(const SimConfig& cfg, double o1_hz, double power_hz, double d8, double d1) {
  const double detune = o1_hz - cfg.water_offset_hz;
  const double l = 1.0 / (1.0 + (detune / kPresatWidthHz) * (detune / kPresatWidthHz));
  const double ripple = std::sin(kPi * detune / kPresatRipplePeriodHz);
  return kWaterHeight * (1.0 - kPresatDetuneDepth * l) *
         std::exp(-cfg.water_saturation_rate * power_hz * power_hz * (d1 + d8) * l) *
         (1.0 + kPresatRipple * ripple * ripple);
}

Spectrum1D pulse_acquire(const SimConfig& cfg, double p1_us, Rng& rng) {
  Spectrum1D s = blank();
  const double a = pulse_amplitude(cfg, p1_us);
  for (double ppm : kPeakPpm) add_lorentzian(s, ppm, a);
  add_noise(s, cfg.noise_sigma, rng);
  return s;
}

Spectrum1D ernst(const SimConfig& cfg, double flip_deg, Rng& rng) {
  Spectrum1D s = blank();
  for (std::size_t i = 0; i < peak_count(cfg); ++i)
    add_lorentzian(s, kPeakPpm[i], ernst_amplitude(flip_deg, cfg.tau_r, cfg.t1_values[i]));
  add_noise(s, cfg.noise_sigma, rng);
  return s;
}

Spectrum1D invrec(const SimConfig& cfg, double tau, Rng& rng) {
  Spectrum1D s = blank();
  for (std::size_t i = 0; i < peak_count(cfg); ++i)
    add_lorentzian(s, kPeakPpm[i], invrec_amplitude(tau, cfg.t1_values[i]));
  add_noise(s, cfg.noise_sigma, rng);
  return s;
}

Spectrum1D noe1d(const SimConfig& cfg, double tau_m, Rng& rng) {
  Spectrum1D s = blank();
  add_lorentzian(s, kNoeExcitedPpm, kNoeExcitedHeight);
  const double a = noe_buildup(cfg, tau_m);
  for (double ppm : kPeakPpm)
    if (ppm != kNoeExcitedPpm) add_lorentzian(s, ppm, a);
  add_noise(s, cfg.noise_sigma, rng);
  return s;
}

EpsiFid epsi_fid(const SimConfig& cfg, double alpha, Rng& rng) {
  EpsiFid fid;
  fid.points_per_gradient = kEpsiPpg;
  fid.n_gradient_pairs = kEpsiPairs;
  fid.group_delay = kEpsiGroupDelay;
  fid.gap_points = kEpsiGap;
  std::vector<std::complex<double>> x(fid.required_length(), 0.0);
  const double last = static_cast<double>(kEpsiPpg - 1);
  for (std::size_t n = 0; n < kEpsiPairs; ++n) {
    const double nn = static_cast<double>(n);
    const double height = std::exp(-nn / kEpsiDecayPairs);
    const std::complex<double> phase = std::polar(1.0, 0.3 * nn);
    const double centre =
        std::clamp(kEpsiCentre + kEpsiDriftPerPair * (alpha - cfg.alpha_true) * nn, 0.0, last);
    const std::size_t start = n * fid.pair_length();
    for (std::size_t k = 0; k < kEpsiPpg; ++k) {
      const double dk = static_cast<double>(k) - centre;
      const double echo = height * std::exp(-0.5 * dk * dk / (kEpsiEchoWidth * kEpsiEchoWidth));
      x[start + k] += echo * phase;
      // The negative lobe traces the echo backwards.
      x[start + kEpsiPpg + kEpsiGap + (kEpsiPpg - 1 - k)] += echo * std::conj(phase);
    }
  }
  if (cfg.noise_sigma > 0.0) {
    std::normal_distribution<double> nd(0.0, cfg.noise_sigma);
    for (auto& z : x) z += std::complex<double>(nd(rng), nd(rng));
  }
  // The receiver starts group_delay points late relative to the echo train.
  std::rotate(x.rbegin(), x.rbegin() + static_cast<std::ptrdiff_t>(kEpsiGroupDelay), x.rend());
  fid.samples = std::move(x);
  return fid;
}

Spectrum1D presat(const SimConfig& cfg, double o1_hz, double power_hz, double d8, double d1,
                  Rng& rng) {
  Spectrum1D s = blank(o1_hz);
  add_lorentzian(s, cfg.water_offset_hz / kSpectrometerMHz,
                 presat_residual(cfg, o1_hz, power_hz, d8, d1));
  for (double ppm : kPeakPpm) add_lorentzian(s, ppm, 1.0);
  add_noise(s, cfg.noise_sigma, rng);
  return s;
}

Spectrum1D dosy(const SimConfig& cfg, double g_percent, double big_delta, Rng& rng) {
  Spectrum1D s = blank();
  const double a = dosy_attenuation(cfg, g_percent, big_delta);
  for (double ppm : kPeakPpm) add_lorentzian(s, ppm, a);
  add_noise(s, cfg.noise_sigma, rng);
  return s;
}

Spectrum1D asap_projection(const SimConfig& cfg, double cnst3_hz, Rng& rng) {
  Spectrum1D s = blank();
  const double a = inept_transfer(cfg, cnst3_hz) / inept_transfer(cfg, inept_optimum(cfg));
  for (double ppm : kPeakPpm) add_lorentzian(s, ppm, a);
  std::fill(s.imag().begin(), s.imag().end(), 0.0);
  if (cfg.noise_sigma > 0.0) {
    std::normal_distribution<double> nd(0.0, cfg.noise_sigma);
    for (double& v : s.real()) v += nd(rng);
  }
  return s;
}

SpectrumPair specdiff_pair(const SimConfig& cfg, const PsycheSettings& p, Rng& rng) {
  Spectrum1D target = blank();
  for (double ppm : kPeakPpm) add_lorentzian(target, ppm, 1.0);

  const double beta = deg2rad(p.flip_deg);
  const double ug = (p.gpz10 - kPsycheGpzBest) / 4.8;
  const double ub = (p.cnst21 - kPsycheChirpBandBest) / 19000.0;
  const double up = (p.p40 - kPsycheChirpLengthBest) / 70000.0;
  const double mild = ug * ug + ub * ub + up * up;
  const double eff = std::sin(beta) * (1.0 - 0.2 * mild);
  const double phi = kPsychePhasePerRad2 * beta * beta + 0.3 * mild;

  Spectrum1D test = blank();
  for (double ppm : kPeakPpm) add_lorentzian(test, ppm, std::polar(eff, phi));

  // Fixed noise floor with norm kPsycheFloor * |target|, identical on every call.
  Rng floor_rng(kPsycheFloorSeed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> floor(test.size());
  double fn = 0.0, tn = 0.0;
  for (std::size_t i = 0; i < floor.size(); ++i) {
    floor[i] = nd(floor_rng);
    fn += floor[i] * floor[i];
    tn += target.real()[i] * target.real()[i];
  }
  const double k = kPsycheFloor * std::sqrt(tn / fn);
  for (std::size_t i = 0; i < floor.size(); ++i) test.real()[i] += k * floor[i];

  add_noise(test, cfg.noise_sigma, rng);
  return {std::move(test), std::move(target)};
}

double psyche_optimum_deg() {
  double best = 0.0, best_h = -1.0;
  for (int i = 1; i <= 90000; ++i) {
    const double deg = i * 1e-3;
    const double h = psyche_expected_similarity(deg2rad(deg));
    if (h > best_h) {
      best_h = h;
      best = deg;
    }
  }
  return best;
}

}  // namespace sim

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::pulse: return "pulse";
    case Experiment::ernst: return "ernst";
    case Experiment::noe1d: return "noe1d";
    case Experiment::invrec: return "invrec";
    case Experiment::asaphsqc: return "asaphsqc";
    case Experiment::epsi: return "epsi";
    case Experiment::psyche: return "psyche";
    case Experiment::presat: return "presat";
    case Experiment::dosy: return "dosy";
  }
  return "unknown";
}

const std::vector<std::string>& backend_names() {
  static const std::vector<std::string> names = {"poise_1d", "poise_1d_noapk", "poise_2d",
                                                 "poise_psyche"};
  return names;
}

SimBackend::SimBackend(Experiment e, SimConfig cfg) : experiment_(e), cfg_(std::move(cfg)) {
  cfg_.validate();
  switch (e) {
    case Experiment::pulse: defaults_ = {{"p1", 48.0}}; break;
    case Experiment::ernst: defaults_ = {{"cnst20", 30.0}}; break;
    case Experiment::noe1d: defaults_ = {{"d8", 0.5}}; break;
    case Experiment::invrec: defaults_ = {{"d27", 0.6}}; break;
    case Experiment::asaphsqc: defaults_ = {{"cnst3", 150.0}}; break;
    case Experiment::epsi: defaults_ = {{"cnst16", 1.0}}; break;
    case Experiment::psyche:
      defaults_ = {{"cnst20", 25.0}, {"gpz10", 2.0}, {"cnst21", 10000.0}, {"p40", 30000.0}};
      break;
    case Experiment::presat:
      defaults_ = {{"o1", sim::default_transmitter_offset_hz()},
                   {"cnst20", 50.0},
                   {"d8", 0.1},
                   {"d1", 2.0}};
      break;
    case Experiment::dosy:
      defaults_ = {{"gpz1", 50.0}, {"d20", 0.1}, {"gpz_ref", sim::kDosyReferencePercent}};
      break;
  }
}

SimBackend SimBackend::for_routine(const Routine& r, SimConfig cfg) {
  const auto& known = backend_names();
  if (!r.au.empty() && std::find(known.begin(), known.end(), r.au) == known.end()) {
    std::string list;
    for (const auto& n : known) list += (list.empty() ? "" : ", ") + n;
    throw UnknownBackendError("unknown acquisition programme '" + r.au + "' (available: " + list +
                              ")");
  }
  static const std::pair<const char*, Experiment> prefixes[] = {
      {"p1cal", Experiment::pulse},       {"ernst", Experiment::ernst},
      {"1dnoe", Experiment::noe1d},       {"noe", Experiment::noe1d},
      {"invrec", Experiment::invrec},     {"asaphsqc", Experiment::asaphsqc},
      {"epsi", Experiment::epsi},         {"psyche", Experiment::psyche},
      {"solvsupp", Experiment::presat},   {"dosy", Experiment::dosy},
  };
  for (const auto& [prefix, e] : prefixes)
    if (r.name.rfind(prefix, 0) == 0) return SimBackend(e, std::move(cfg));
  throw UnknownBackendError("no simulated experiment for routine '" + r.name + "'");
}

Acquisition SimBackend::acquire(const ParameterMap& params, Rng& rng) const {
  ParameterMap p = defaults_;
  for (const auto& [k, v] : params) {
    if (!p.count(k))
      throw ConfigError("simulated " + to_string(experiment_) + " experiment has no parameter '" +
                        k + "'");
    p[k] = v;
  }

  Acquisition a;
  switch (experiment_) {
    case Experiment::pulse: a.spectrum = sim::pulse_acquire(cfg_, p["p1"], rng); break;
    case Experiment::ernst: a.spectrum = sim::ernst(cfg_, p["cnst20"], rng); break;
    case Experiment::noe1d:
      a.spectrum = sim::noe1d(cfg_, p["d8"], rng);
      a.aux["excitation_offset_hz"] = sim::kNoeExcitedPpm * sim::kSpectrometerMHz;
      break;
    case Experiment::invrec: a.spectrum = sim::invrec(cfg_, p["d27"], rng); break;
    case Experiment::asaphsqc: a.spectrum = sim::asap_projection(cfg_, p["cnst3"], rng); break;
    case Experiment::epsi: a.fid = sim::epsi_fid(cfg_, p["cnst16"], rng); break;
    case Experiment::psyche: {
      auto pair = sim::specdiff_pair(cfg_, {p["cnst20"], p["gpz10"], p["cnst21"], p["p40"]}, rng);
      a.spectrum = std::move(pair.test);
      a.target = std::move(pair.target);
      break;
    }
    case Experiment::presat:
      a.spectrum = sim::presat(cfg_, p["o1"], p["cnst20"], p["d8"], p["d1"], rng);
      break;
    case Experiment::dosy:
      a.spectrum = sim::dosy(cfg_, p["gpz1"], p["d20"], rng);
      a.reference = sim::dosy(cfg_, p["gpz_ref"], p["d20"], rng);
      a.aux["delta_s"] = p["d20"];
      a.acquisitions = 2;
      break;
  }
  return a;
}

}  // namespace poise
