#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "poise/epsi.hpp"
#include "poise/spectra.hpp"

namespace poise {

struct Routine;

/// Ground truth for every simulated experiment. Text form is "key = value"
/// lines with '#' comments; t1_values is a comma-separated list.
struct SimConfig {
  double p360_true = 48.4;  // us
  std::vector<double> t1_values = {1.750, 0.977, 1.279, 1.615, 1.415, 0.949};  // s
  double tau_r = 1.20;                                                          // s
  double noe_sigma = 1.5;                                                       // 1/s
  double noe_r1 = 0.0079127;                                                    // 1/s
  double alpha_true = 1.0004;
  double water_offset_hz = 1880.41;
  double water_saturation_rate = 1.0e-3;  // per (Hz^2 s)
  double diffusion_d = 1.8404e-10;        // m^2/s
  double gamma = 2.6752e8;                // rad/(s T)
  double delta = 0.002;                   // s
  double g_max_tesla_per_m = 0.66;
  double inept_j_hz = 200.0;
  double inept_r2 = 128.73;  // 1/s
  double noise_sigma = 0.01;
  std::uint64_t rng_seed = 0;

  /// Throws ConfigError on non-physical values.
  void validate() const;
};

SimConfig parse_sim_config(const std::string& text);
SimConfig load_sim_config(const std::string& path);
std::string write_sim_config(const SimConfig& cfg);

using Rng = std::mt19937_64;

namespace sim {

/// Shared 1D axis: 16384 points, 14 ppm wide, centred at 4.7 ppm on 400.13 MHz.
inline constexpr double kSpectrometerMHz = 400.13;
inline constexpr std::size_t kPoints = 16384;
inline constexpr double kWidthPpm = 14.0;
inline constexpr double kCentrePpm = 4.7;
inline constexpr double kLineHwhmHz = 3.0;
/// First peaks carry t1_values[0..]; the sample is modelled on ferulic acid.
inline constexpr double kPeakPpm[] = {7.49, 7.27, 7.08, 6.79, 6.36, 3.49};
inline constexpr double kNoeExcitedPpm = 6.36;
inline constexpr double kWaterRegionLoPpm = 4.65;
inline constexpr double kWaterRegionHiPpm = 4.75;
inline constexpr double kDosyReferencePercent = 10.0;

double default_transmitter_offset_hz();

/// Adds complex amplitude `amp` times a unit-height Lorentzian at `ppm`.
void add_lorentzian(Spectrum1D& s, double ppm, std::complex<double> amp,
                    double hwhm_hz = kLineHwhmHz);
void add_noise(Spectrum1D& s, double sigma, Rng& rng);

/// Peak amplitude sin(2 pi p1 / p360).
double pulse_amplitude(const SimConfig& cfg, double p1_us);
double ernst_amplitude(double flip_deg, double tau_r, double t1);
double ernst_angle_deg(double tau_r, double t1);
double invrec_amplitude(double tau, double t1);
double noe_buildup(const SimConfig& cfg, double tau_m);
double noe_optimum(const SimConfig& cfg);
/// Signal ratio relative to zero gradient.
double dosy_attenuation(const SimConfig& cfg, double g_percent, double big_delta);
/// Gradient amplitude (percent) at which S/R with R at the 10% reference
/// reaches `ratio`.
double dosy_gradient_for_ratio(const SimConfig& cfg, double ratio, double big_delta);
double inept_transfer(const SimConfig& cfg, double cnst3_hz);
double inept_optimum(const SimConfig& cfg);
double presat_residual(const SimConfig& cfg, double o1_hz, double power_hz, double d8, double d1);

Spectrum1D pulse_acquire(const SimConfig& cfg, double p1_us, Rng& rng);
Spectrum1D ernst(const SimConfig& cfg, double flip_deg, Rng& rng);
Spectrum1D invrec(const SimConfig& cfg, double tau, Rng& rng);
Spectrum1D noe1d(const SimConfig& cfg, double tau_m, Rng& rng);
EpsiFid epsi_fid(const SimConfig& cfg, double alpha, Rng& rng);
Spectrum1D presat(const SimConfig& cfg, double o1_hz, double power_hz, double d8, double d1,
                  Rng& rng);
Spectrum1D dosy(const SimConfig& cfg, double g_percent, double big_delta, Rng& rng);
Spectrum1D asap_projection(const SimConfig& cfg, double cnst3_hz, Rng& rng);

struct PsycheSettings {
  double flip_deg = 25.0;
  double gpz10 = 2.0;
  double cnst21 = 10000.0;
  double p40 = 30000.0;
};
struct SpectrumPair {
  Spectrum1D test;
  Spectrum1D target;
};
/// Test spectrum = target scaled by sin(flip), phase-distorted by a term
/// growing with flip^2, over a fixed noise floor; the chirp gradient and
/// pulse settings only add mild penalties away from their sweet spot.
SpectrumPair specdiff_pair(const SimConfig& cfg, const PsycheSettings& p, Rng& rng);
/// Flip angle (degrees) minimising the expected specdiff with the other
/// settings at their sweet spot.
double psyche_optimum_deg();

}  // namespace sim

/// Named parameter values handed to a backend for one acquisition.
using ParameterMap = std::map<std::string, double>;

struct Acquisition {
  std::optional<Spectrum1D> spectrum;
  std::optional<EpsiFid> fid;
  std::optional<Spectrum1D> reference;
  std::optional<Spectrum1D> target;
  std::map<std::string, double> aux;
  /// Number of spectra the acquisition cost (2 when a reference is taken).
  std::size_t acquisitions = 1;
};

enum class Experiment { pulse, ernst, noe1d, invrec, asaphsqc, epsi, psyche, presat, dosy };

std::string to_string(Experiment e);

/// Simulated spectrometer. Stateless: every call depends only on the
/// parameters, the configuration and the rng passed in.
class SimBackend {
 public:
  SimBackend(Experiment e, SimConfig cfg);

  /// Backend for a routine: "au" must be empty or a registered acquisition
  /// programme; the experiment is chosen by routine-name prefix. Throws
  /// UnknownBackendError otherwise.
  static SimBackend for_routine(const Routine& r, SimConfig cfg);

  Experiment experiment() const noexcept { return experiment_; }
  const SimConfig& config() const noexcept { return cfg_; }
  std::string name() const { return "sim:" + to_string(experiment_); }

  /// Parameters this experiment reads and their values when not supplied.
  const ParameterMap& defaults() const noexcept { return defaults_; }

  /// Unknown parameter names raise ConfigError.
  Acquisition acquire(const ParameterMap& params, Rng& rng) const;

 private:
  Experiment experiment_;
  SimConfig cfg_;
  ParameterMap defaults_;
};

/// Registered acquisition programme names ("au" field values).
const std::vector<std::string>& backend_names();

}  // namespace poise
