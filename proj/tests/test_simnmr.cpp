#include <doctest.h>

#include <cmath>
#include <limits>

#include "poise/costs.hpp"
#include "poise/errors.hpp"
#include "poise/routines.hpp"
#include "poise/simnmr.hpp"

using namespace poise;

namespace {

SimConfig quiet() {
  SimConfig c;
  c.noise_sigma = 0.0;
  return c;
}

double peak_height(const Spectrum1D& s) {
  double m = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) m = std::max(m, std::hypot(s.real()[i], s.imag()[i]));
  return m;
}

template <class F>
double argmax(double lo, double hi, double step, F f) {
  double best = lo, fb = -std::numeric_limits<double>::infinity();
  for (double x = lo; x <= hi + 1e-12; x += step)
    if (const double v = f(x); v > fb) {
      fb = v;
      best = x;
    }
  return best;
}

}  // namespace

TEST_CASE("config text round trip and checks") {
  SimConfig c;
  c.p360_true = 47.123456789;
  c.t1_values = {0.5, 2.25};
  c.rng_seed = 99;
  c.diffusion_d = 0.0;
  const SimConfig back = parse_sim_config(write_sim_config(c));
  CHECK(back.p360_true == c.p360_true);
  CHECK(back.t1_values == c.t1_values);
  CHECK(back.rng_seed == 99);
  CHECK(back.diffusion_d == 0.0);
  CHECK(write_sim_config(back) == write_sim_config(c));

  const SimConfig p = parse_sim_config("# comment\np360_true = 50\n\nnoise_sigma=0 # trailing\n");
  CHECK(p.p360_true == 50.0);
  CHECK(p.noise_sigma == 0.0);
  CHECK_THROWS_AS(parse_sim_config("p360 = 50\n"), ConfigError);
  CHECK_THROWS_AS(parse_sim_config("p360_true = fifty\n"), ConfigError);
  CHECK_THROWS_AS(parse_sim_config("p360_true = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_sim_config("noise_sigma = -0.1\n"), ConfigError);
  CHECK_THROWS_AS(load_sim_config("/nonexistent/sim.cfg"), IoError);
}

TEST_CASE("pulse-acquire model") {
  const SimConfig cfg = quiet();
  Rng rng(0);
  CHECK(peak_height(sim::pulse_acquire(cfg, cfg.p360_true, rng)) <= 1e-12);
  CHECK(sim::pulse_amplitude(cfg, cfg.p360_true / 4.0) == doctest::Approx(1.0));
  const double arg = argmax(40.0, 56.0, 0.05, [&](double p) {
    return -costs::minabsint({sim::pulse_acquire(cfg, p, rng)});
  });
  CHECK(std::abs(arg - cfg.p360_true) <= 0.05 + 1e-9);
}

TEST_CASE("Ernst and inversion-recovery tables") {
  const double t1[] = {1.750, 0.977, 1.279, 1.615, 1.415, 0.949};
  const double theta[] = {59.8, 73.0, 67.0, 61.6, 64.6, 73.6};
  const double null[] = {1.213, 0.677, 0.887, 1.119, 0.981, 0.658};
  for (int i = 0; i < 6; ++i) {
    CHECK(std::abs(sim::ernst_angle_deg(1.20, t1[i]) - theta[i]) <= 0.1);
    CHECK(std::abs(t1[i] * std::log(2.0) - null[i]) <= 0.001);
  }
}

TEST_CASE("Ernst model maximum") {
  for (double t1 : {1.750, 0.949}) {
    const double arg = argmax(1.0, 179.0, 0.01, [&](double th) { return sim::ernst_amplitude(th, 1.20, t1); });
    CHECK(std::abs(arg - sim::ernst_angle_deg(1.20, t1)) <= 0.1);
  }
  CHECK(std::abs(argmax(1.0, 179.0, 0.01, [](double th) { return sim::ernst_amplitude(th, 100.0, 0.1); }) -
                 90.0) <= 0.1);
  CHECK(sim::ernst_angle_deg(1.20, 1.750) == doctest::Approx(59.8).epsilon(0.002));
}

TEST_CASE("inversion-recovery model") {
  CHECK(std::abs(sim::invrec_amplitude(1.750 * std::log(2.0), 1.750)) <= 1e-15);
  CHECK(sim::invrec_amplitude(1e3, 1.750) == doctest::Approx(1.0));
  CHECK(sim::invrec_amplitude(0.0, 1.750) == -1.0);
}

TEST_CASE("NOE buildup") {
  const SimConfig cfg = quiet();
  CHECK(sim::noe_buildup(cfg, 0.0) == 0.0);
  CHECK(sim::noe_buildup(cfg, 1e4) < 1e-3);
  CHECK(std::abs(sim::noe_optimum(cfg) - 3.5) <= 0.01);
  const double arg = argmax(0.0, 10.0, 0.001, [&](double t) { return sim::noe_buildup(cfg, t); });
  CHECK(std::abs(arg - sim::noe_optimum(cfg)) <= 0.002);
}

TEST_CASE("EPSI drift is largest at the routine bound") {
  const SimConfig cfg = quiet();
  Rng rng(0);
  const Routine r = load_routine(POISE_TEST_ROUTINES_DIR, "epsi");
  double worst = 0.0, at = 0.0;
  for (double a = r.lb[0]; a <= r.ub[0] + 1e-12; a += 0.0005) {
    const double f = epsi_gradient_drift(sim::epsi_fid(cfg, a, rng));
    if (f > worst) {
      worst = f;
      at = a;
    }
  }
  CHECK((std::abs(at - r.lb[0]) < 1e-9 || std::abs(at - r.ub[0]) < 1e-3));
  CHECK(epsi_gradient_drift(sim::epsi_fid(cfg, r.lb[0], rng)) == doctest::Approx(worst));
}

TEST_CASE("presaturation model") {
  const SimConfig cfg = quiet();
  const double off = cfg.water_offset_hz;
  const double none = sim::presat_residual(cfg, off, 0.0, 0.1, 2.0);
  CHECK(sim::presat_residual(cfg, off, 0.0, 3.0, 9.0) == none);
  CHECK(sim::presat_residual(cfg, off, 200.0, 0.5, 4.0) < 0.01 * none);
  CHECK(sim::presat_residual(cfg, off + 500.0, 0.0, 0.1, 2.0) > none);

  // With the residual water line taken out, the spectrum no longer depends on
  // the presaturation settings.
  Rng rng(0);
  auto a = sim::presat(cfg, off, 10.0, 0.1, 2.0, rng);
  auto b = sim::presat(cfg, off, 80.0, 0.3, 5.0, rng);
  sim::add_lorentzian(a, off / sim::kSpectrometerMHz, -sim::presat_residual(cfg, off, 10.0, 0.1, 2.0));
  sim::add_lorentzian(b, off / sim::kSpectrometerMHz, -sim::presat_residual(cfg, off, 80.0, 0.3, 5.0));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a.real()[i] - b.real()[i]) <= 1e-9);
}

TEST_CASE("diffusion attenuation") {
  const SimConfig cfg = quiet();
  CHECK(sim::dosy_attenuation(cfg, 0.0, 0.1) == 1.0);
  double prev = 2.0;
  for (double g = 0.0; g <= 100.0; g += 1.0) {
    const double r = sim::dosy_attenuation(cfg, g, 0.1);
    CHECK(r < prev);
    prev = r;
  }
  const double gstar = sim::dosy_gradient_for_ratio(cfg, 0.25, 0.1);
  const SimBackend b(Experiment::dosy, cfg);
  Rng rng(0);
  const auto acq = b.acquire({{"gpz1", gstar}, {"d20", 0.1}}, rng);
  CostContext c{acq.spectrum, {}, Region::whole(), {}, acq.reference, acq.aux};
  CHECK(costs::dosy(c) <= 1e-9);
  CHECK(acq.acquisitions == 2);
  CHECK(acq.aux.at("delta_s") == 0.1);

  SimConfig still = cfg;
  still.diffusion_d = 0.0;
  CHECK(sim::dosy_attenuation(still, 80.0, 0.5) == 1.0);
  CHECK(std::isinf(sim::dosy_gradient_for_ratio(still, 0.25, 0.5)));
}

TEST_CASE("INEPT surrogate") {
  const SimConfig cfg = quiet();
  CHECK(std::abs(sim::inept_transfer(cfg, 1.0)) < 1e-20);
  CHECK(std::abs(sim::inept_optimum(cfg) - 230.0) <= 10.0);
  const double arg = argmax(20.0, 600.0, 0.1, [&](double c) { return sim::inept_transfer(cfg, c); });
  CHECK(std::abs(arg - sim::inept_optimum(cfg)) <= 0.1);

  SimConfig noisy = cfg;
  noisy.noise_sigma = 0.05;
  Rng r1(7), r2(7);
  const auto p1 = sim::asap_projection(noisy, 200.0, r1);
  const auto p2 = sim::asap_projection(noisy, 200.0, r2);
  CHECK(p1.real() == p2.real());
  for (double v : p1.imag()) CHECK(v == 0.0);
}

TEST_CASE("PSYCHE surrogate") {
  const SimConfig cfg = quiet();
  Rng rng(0);
  const sim::PsycheSettings best;
  auto cost_at = [&](double deg) {
    sim::PsycheSettings p = best;
    p.flip_deg = deg;
    auto pair = sim::specdiff_pair(cfg, p, rng);
    return costs::specdiff({pair.test, {}, Region::whole(), pair.target});
  };
  const double opt = sim::psyche_optimum_deg();
  CHECK(std::abs(opt - 17.0) <= 2.0);
  const double arg = argmax(1.0, 60.0, 0.1, [&](double d) { return -cost_at(d); });
  CHECK(std::abs(arg - opt) <= 0.5);
  CHECK(cost_at(1.0) > cost_at(opt));
  CHECK(cost_at(60.0) > cost_at(opt));

  sim::PsycheSettings off = best;
  off.flip_deg = opt;
  off.gpz10 = 6.0;
  auto pair = sim::specdiff_pair(cfg, off, rng);
  CHECK(costs::specdiff({pair.test, {}, Region::whole(), pair.target}) > cost_at(opt));
}

TEST_CASE("noise is seeded and reproducible") {
  SimConfig cfg;
  cfg.noise_sigma = 0.05;
  Rng a(3), b(3), c(4);
  const auto s1 = sim::pulse_acquire(cfg, 45.0, a);
  const auto s2 = sim::pulse_acquire(cfg, 45.0, b);
  const auto s3 = sim::pulse_acquire(cfg, 45.0, c);
  CHECK(s1.real() == s2.real());
  CHECK(s1.imag() == s2.imag());
  CHECK(s1.real() != s3.real());
  const auto e1 = sim::epsi_fid(cfg, 1.0, a), e2 = sim::epsi_fid(cfg, 1.0, b);
  CHECK(e1.samples == e2.samples);
}

TEST_CASE("backend dispatch") {
  const SimConfig cfg = quiet();
  auto r = load_routine(POISE_TEST_ROUTINES_DIR, "p1cal");
  CHECK(SimBackend::for_routine(r, cfg).experiment() == Experiment::pulse);
  r.au = "";
  CHECK(SimBackend::for_routine(r, cfg).experiment() == Experiment::pulse);
  r.au = "/usr/bin/rm";
  CHECK_THROWS_AS(SimBackend::for_routine(r, cfg), UnknownBackendError);
  r.au = "poise_1d";
  r.name = "mystery";
  CHECK_THROWS_AS(SimBackend::for_routine(r, cfg), UnknownBackendError);

  const std::pair<const char*, Experiment> expect[] = {
      {"ernst", Experiment::ernst},     {"1dnoe", Experiment::noe1d},
      {"invrec", Experiment::invrec},   {"asaphsqc", Experiment::asaphsqc},
      {"epsi", Experiment::epsi},       {"psyche3", Experiment::psyche},
      {"solvsupp4", Experiment::presat}, {"dosy_2p", Experiment::dosy}};
  for (const auto& [name, e] : expect) {
    const Routine rr = load_routine(POISE_TEST_ROUTINES_DIR, name);
    const SimBackend b = SimBackend::for_routine(rr, cfg);
    CHECK(b.experiment() == e);
    for (const auto& p : rr.pars) CHECK(b.defaults().count(p) == 1);
  }

  const SimBackend pulse(Experiment::pulse, cfg);
  Rng rng(0);
  CHECK_THROWS_AS(pulse.acquire({{"p2", 1.0}}, rng), ConfigError);
  const auto acq = pulse.acquire({}, rng);
  CHECK(acq.spectrum);
  CHECK(acq.acquisitions == 1);
  CHECK(pulse.name() == "sim:pulse");

  SimConfig bad = cfg;
  bad.p360_true = 0.0;
  CHECK_THROWS_AS(SimBackend(Experiment::pulse, bad), ConfigError);
}
