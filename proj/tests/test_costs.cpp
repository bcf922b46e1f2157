#include <doctest.h>

#include <cmath>
#include <limits>

#include "poise/costs.hpp"
#include "poise/errors.hpp"
#include "poise/simnmr.hpp"
#include "support/generators.hpp"

using namespace poise;

namespace {

Spectrum1D from(std::vector<double> re, std::vector<double> im = {}) {
  if (im.empty()) im.assign(re.size(), 0.0);
  return Spectrum1D(std::move(re), std::move(im), 1000.0, 0.0, 100.0);
}

CostContext with_spectrum(Spectrum1D s) {
  CostContext c;
  c.spectrum = std::move(s);
  return c;
}

Spectrum1D random_spectrum(testing::Gen& g, std::size_t n, double scale = 1.0) {
  std::vector<double> re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) {
    re[i] = scale * g.uniform(-1, 1);
    im[i] = scale * g.uniform(-1, 1);
  }
  return from(std::move(re), std::move(im));
}

Spectrum1D scaled(const Spectrum1D& s, double a) {
  auto re = s.real(), im = s.imag();
  for (auto& v : re) v *= a;
  for (auto& v : im) v *= a;
  return Spectrum1D(re, im, s.spectral_width(), s.transmitter_offset(), s.spectrometer_freq());
}

SimConfig quiet(std::vector<double> t1 = {1.750}) {
  SimConfig c;
  c.noise_sigma = 0.0;
  c.t1_values = std::move(t1);
  return c;
}

template <class Cost, class Make>
double sweep_argmin(double lo, double hi, double step, Make make, Cost cost) {
  double best = lo, fbest = std::numeric_limits<double>::infinity();
  for (double x = lo; x <= hi + 1e-12; x += step) {
    const double f = cost(with_spectrum(make(x)));
    if (f < fbest) {
      fbest = f;
      best = x;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("intensity costs on small spectra") {
  const auto zero = with_spectrum(Spectrum1D::zeros(10, 1000.0, 0.0, 100.0));
  for (auto f : {costs::minabsint, costs::maxrealint, costs::zerorealint, costs::zerorealint_squared,
                 costs::asaphsqc})
    CHECK(f(zero) == 0.0);

  CHECK(costs::minabsint(with_spectrum(from({3.0}, {4.0}))) == 5.0);
  CHECK(costs::maxrealint(with_spectrum(from(std::vector<double>(10, 2.0)))) == -20.0);
  CHECK(costs::zerorealint(with_spectrum(from({-2.0, 2.0}))) == 4.0);
  CHECK(costs::zerorealint_squared(with_spectrum(from({-2.0, 2.0}))) == 8.0);
  CHECK(costs::asaphsqc(with_spectrum(from({1.0, 2.0, 3.0}))) == -6.0);

  CHECK_THROWS_AS(costs::minabsint(CostContext{}), MissingContextError);
}

TEST_CASE("noe_1d removes 25 Hz either side of the excited peak") {
  // sw 1000 Hz over 100 points: 10 Hz spacing, point i at 500 - 10 i Hz.
  auto s = Spectrum1D::zeros(100, 1000.0, 0.0, 100.0);
  CostContext c = with_spectrum(s);
  c.aux["excitation_offset_hz"] = 0.0;
  CHECK(costs::noe_1d(c) == 0.0);

  for (int i = 48; i <= 52; ++i) c.spectrum->real()[i] = 7.0;
  CHECK(costs::noe_1d(c) == 0.0);

  c.spectrum->real()[10] = 3.0;
  c.spectrum->imag()[10] = 4.0;
  CHECK(costs::noe_1d(c) == -5.0);

  c.aux.clear();
  CHECK_THROWS_AS(costs::noe_1d(c), MissingContextError);
  c.aux["excitation_offset_hz"] = 5000.0;
  CHECK_THROWS_AS(costs::noe_1d(c), MissingContextError);
}

TEST_CASE("specdiff") {
  testing::Gen g(1);
  const auto t = random_spectrum(g, 32);
  CostContext c = with_spectrum(t);
  c.target = t;
  CHECK(costs::specdiff(c) == doctest::Approx(0.0).epsilon(1e-15));
  c.spectrum = scaled(t, -1.0);
  CHECK(costs::specdiff(c) == doctest::Approx(2.0));
  c.spectrum = scaled(t, 3.5);
  CHECK(costs::specdiff(c) == doctest::Approx(0.0).scale(1.0));
  c.spectrum = Spectrum1D::zeros(32, 1000.0, 0.0, 100.0);
  CHECK_THROWS_AS(costs::specdiff(c), DegenerateNormalizationError);
  c.target.reset();
  CHECK_THROWS_AS(costs::specdiff(c), MissingContextError);
}

TEST_CASE("DOSY attenuation costs") {
  const auto r = from({1.0, 2.0, 1.0});
  CostContext c = with_spectrum(from({0.25, 0.5, 0.25}));
  c.reference = r;
  CHECK(costs::dosy_f_att(c) == 0.0);
  CHECK(costs::dosy(c) == 0.0);
  CHECK(costs::dosy_aux(c) == 0.0);
  c.aux["delta_s"] = 0.1;
  CHECK(costs::dosy_2p(c) == doctest::Approx(0.1));

  c.spectrum = r;
  CHECK(costs::dosy_f_att(c) == 0.75);
  CHECK(costs::dosy(c) == 0.75);
  c.aux["dosy_target_ratio"] = 0.5;
  CHECK(costs::dosy_f_att(c) == 0.5);

  c.reference = from({1.0, -1.0});
  c.spectrum = from({1.0, 1.0});
  CHECK_THROWS_AS(costs::dosy(c), DegenerateReferenceError);
  c.reference.reset();
  CHECK_THROWS_AS(costs::dosy(c), MissingContextError);
  CostContext no_delta = with_spectrum(r);
  no_delta.reference = r;
  CHECK_THROWS_AS(costs::dosy_2p(no_delta), MissingContextError);
}

TEST_CASE("registry") {
  auto reg = CostRegistry::with_builtins();
  for (const char* n : {"minabsint", "maxrealint", "zerorealint", "zerorealint_squared", "noe_1d",
                        "specdiff", "asaphsqc", "epsi_gradient_drift", "dosy_aux", "dosy", "dosy_2p"})
    CHECK(reg.contains(n));
  CHECK(reg.names().size() == 11);
  CHECK(reg.lookup("minabsint")(with_spectrum(from({3.0}, {4.0}))) == 5.0);

  try {
    reg.lookup("nosuchcost");
    FAIL("expected unknown-cost");
  } catch (const UnknownCostError& e) {
    CHECK(std::string(e.what()).find("minabsint") != std::string::npos);
    CHECK(e.kind() == "unknown-cost");
  }

  reg.add("mycf", [](const CostContext&) { return 42.0; });
  CHECK(reg.lookup("mycf")(CostContext{}) == 42.0);
  CHECK_THROWS_AS(reg.add("mycf", [](const CostContext&) { return 0.0; }), DuplicateCostError);
  CHECK_THROWS_AS(reg.add("minabsint", [](const CostContext&) { return 0.0; }), DuplicateCostError);
}

TEST_CASE("simulated pulse calibration: minabsint argmin at p360") {
  SimConfig cfg = quiet();
  Rng rng(0);
  const double arg = sweep_argmin(40.0, 56.0, 0.05, [&](double p) { return sim::pulse_acquire(cfg, p, rng); },
                                  costs::minabsint);
  CHECK(std::abs(arg - cfg.p360_true) <= 0.05 + 1e-9);
}

TEST_CASE("simulated Ernst spectra: maxrealint argmin at the Ernst angle") {
  for (double t1 : {0.949, 1.279, 1.750}) {
    SimConfig cfg = quiet({t1});
    Rng rng(0);
    const double arg = sweep_argmin(1.0, 90.0, 0.1, [&](double th) { return sim::ernst(cfg, th, rng); },
                                    costs::maxrealint);
    CHECK(std::abs(arg - sim::ernst_angle_deg(cfg.tau_r, t1)) <= 1.0);
  }
}

TEST_CASE("simulated inversion recovery: zerorealint argmin at T1 ln 2") {
  for (double t1 : {0.949, 1.279, 1.750}) {
    SimConfig cfg = quiet({t1});
    Rng rng(0);
    const double arg = sweep_argmin(0.1, 3.0, 0.001, [&](double tau) { return sim::invrec(cfg, tau, rng); },
                                    costs::zerorealint);
    CHECK(std::abs(arg - t1 * std::log(2.0)) <= 0.01);
  }
}

TEST_CASE("simulated NOE buildup: noe_1d argmin at the model optimum") {
  SimConfig cfg = quiet();
  Rng rng(0);
  const auto backend = SimBackend(Experiment::noe1d, cfg);
  double best = 0, fbest = std::numeric_limits<double>::infinity();
  for (double tm = 0.2; tm <= 6.0; tm += 0.01) {
    const auto acq = backend.acquire({{"d8", tm}}, rng);
    CostContext c = with_spectrum(*acq.spectrum);
    c.aux = acq.aux;
    const double f = costs::noe_1d(c);
    if (f < fbest) {
      fbest = f;
      best = tm;
    }
  }
  CHECK(std::abs(best - sim::noe_optimum(cfg)) <= 0.1);
}

TEST_CASE("simulated INEPT projections: asaphsqc falls to a minimum near the optimum") {
  SimConfig cfg = quiet();
  Rng rng(0);
  std::vector<double> f;
  std::vector<double> x;
  for (double c3 = 120.0; c3 <= 280.0; c3 += 1.0) {
    x.push_back(c3);
    f.push_back(costs::asaphsqc(with_spectrum(sim::asap_projection(cfg, c3, rng))));
  }
  const auto k = static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
  CHECK(std::abs(x[k] - sim::inept_optimum(cfg)) <= 10.0);
  for (std::size_t j = 1; j <= k; ++j) CHECK(f[j] <= f[j - 1]);
}

TEST_CASE("property: non-negative costs and specdiff bounds") {
  testing::Gen g(2);
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = g.index(1, 64);
    const auto s = random_spectrum(g, n, std::pow(10.0, g.uniform(-3, 3)));
    const auto t = random_spectrum(g, n, std::pow(10.0, g.uniform(-3, 3)));
    CostContext c = with_spectrum(s);
    c.target = t;
    c.reference = t;
    CHECK(costs::minabsint(c) >= 0.0);
    CHECK(costs::zerorealint(c) >= 0.0);
    CHECK(costs::zerorealint_squared(c) >= 0.0);
    const double d = costs::specdiff(c);
    CHECK(d >= 0.0);
    CHECK(d <= 2.0 + 1e-12);
    if (std::abs(sum_real(t, Region::whole())) > 1e-9) {
      CHECK(costs::dosy(c) >= 0.0);
    }
  }
}

TEST_CASE("property: specdiff scale invariance and identity") {
  testing::Gen g(3);
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = g.index(2, 64);
    const auto s = random_spectrum(g, n), t = random_spectrum(g, n);
    CostContext c = with_spectrum(s);
    c.target = t;
    const double base = costs::specdiff(c);
    c.spectrum = scaled(s, std::pow(10.0, g.uniform(-4, 4)));
    c.target = scaled(t, std::pow(10.0, g.uniform(-4, 4)));
    CHECK(std::abs(costs::specdiff(c) - base) <= 1e-12 * std::max(1.0, base));
    c.spectrum = s;
    c.target = s;
    CHECK(std::abs(costs::specdiff(c)) <= 1e-12);
  }
}

TEST_CASE("property: dosy_f_att ignores a common rescaling") {
  testing::Gen g(4);
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = g.index(1, 32);
    auto r = random_spectrum(g, n);
    for (auto& v : r.real()) v = std::abs(v) + 0.1;
    const auto s = random_spectrum(g, n);
    CostContext c = with_spectrum(s);
    c.reference = r;
    const double base = costs::dosy_f_att(c);
    const double a = std::pow(10.0, g.uniform(-6, 6));
    c.spectrum = scaled(s, a);
    c.reference = scaled(r, a);
    CHECK(costs::dosy_f_att(c) == doctest::Approx(base).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("property: intensity inside the excised band never changes noe_1d") {
  testing::Gen g(5);
  for (int k = 0; k < 300; ++k) {
    auto s = random_spectrum(g, 200);
    CostContext c = with_spectrum(s);
    const double centre = g.uniform(-300.0, 300.0);
    c.aux["excitation_offset_hz"] = centre;
    const double base = costs::noe_1d(c);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (std::abs(s.hz(i) - centre) < costs::kNoeExcisionHalfWidthHz) {
        c.spectrum->real()[i] += g.wide();
        c.spectrum->imag()[i] += g.wide();
      }
    }
    CHECK(costs::noe_1d(c) == base);
  }
}

TEST_CASE("property: restricting the spectrum equals restricting the cost") {
  testing::Gen g(6);
  const CostFunction reducible[] = {costs::minabsint, costs::maxrealint, costs::zerorealint,
                                    costs::zerorealint_squared, costs::asaphsqc};
  for (int k = 0; k < 300; ++k) {
    const auto s = random_spectrum(g, g.index(4, 100));
    const double a = g.uniform(s.ppm(s.size() - 1), s.ppm(0));
    const double b = g.uniform(s.ppm(s.size() - 1), s.ppm(0));
    const Region r = Region::ppm(std::min(a, b), std::max(a, b) + 1e-6);
    IndexRange idx;
    try {
      idx = select_region(s, r);
    } catch (const EmptyRegionError&) {
      continue;
    }
    CostContext full = with_spectrum(s);
    full.region = r;
    const CostContext cut = with_spectrum(s.slice(idx.begin, idx.end));
    for (const auto& f : reducible) CHECK(f(full) == f(cut));
  }
}
