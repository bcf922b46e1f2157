#include "poise/costs.hpp"

#include <cmath>

#include "poise/errors.hpp"

namespace poise {

namespace costs {

namespace {

const Spectrum1D& spectrum(const CostContext& ctx) {
  if (!ctx.spectrum) throw MissingContextError("cost function needs a spectrum");
  return *ctx.spectrum;
}

double aux(const CostContext& ctx, const std::string& key) {
  auto it = ctx.aux.find(key);
  if (it == ctx.aux.end()) throw MissingContextError("cost function needs aux value '" + key + "'");
  return it->second;
}

}  // namespace

double minabsint(const CostContext& ctx) { return sum_magnitude(spectrum(ctx), ctx.region); }

double maxrealint(const CostContext& ctx) { return -sum_real(spectrum(ctx), ctx.region); }

double zerorealint(const CostContext& ctx) { return sum_abs_real(spectrum(ctx), ctx.region); }

double zerorealint_squared(const CostContext& ctx) {
  return sum_sq_real(spectrum(ctx), ctx.region);
}

double noe_1d(const CostContext& ctx) {
  const Spectrum1D& s = spectrum(ctx);
  const double centre = aux(ctx, "excitation_offset_hz");
  const double top = s.transmitter_offset() + 0.5 * s.spectral_width();
  const double bottom = s.transmitter_offset() - 0.5 * s.spectral_width();
  if (!(centre >= bottom && centre <= top))
    throw MissingContextError("excitation offset lies outside the spectral window");
  const IndexRange idx = select_region(s, ctx.region);
  double total = 0.0;
  for (std::size_t i = idx.begin; i < idx.end; ++i) {
    if (std::abs(s.hz(i) - centre) <= kNoeExcisionHalfWidthHz) continue;
    total += std::hypot(s.real()[i], s.imag()[i]);
  }
  return -total;
}

double specdiff(const CostContext& ctx) {
  const Spectrum1D& s = spectrum(ctx);
  if (!ctx.target) throw MissingContextError("specdiff needs a target spectrum");
  const IndexRange is = select_region(s, ctx.region);
  const IndexRange it = select_region(*ctx.target, ctx.region);
  if (is.size() != it.size())
    throw MissingContextError("spectrum and target cover different numbers of points in the region");
  double ns = 0, nt = 0;
  for (std::size_t j = 0; j < is.size(); ++j) {
    ns += s.real()[is.begin + j] * s.real()[is.begin + j];
    nt += ctx.target->real()[it.begin + j] * ctx.target->real()[it.begin + j];
  }
  if (!(ns > 0.0) || !(nt > 0.0))
    throw DegenerateNormalizationError("specdiff cannot normalise an all-zero spectrum");
  ns = std::sqrt(ns);
  nt = std::sqrt(nt);
  double d = 0;
  for (std::size_t j = 0; j < is.size(); ++j) {
    const double e = s.real()[is.begin + j] / ns - ctx.target->real()[it.begin + j] / nt;
    d += e * e;
  }
  return std::sqrt(d);
}

double asaphsqc(const CostContext& ctx) { return -sum_real(spectrum(ctx), ctx.region); }

double epsi_gradient_drift(const CostContext& ctx) {
  if (!ctx.fid) throw MissingContextError("epsi_gradient_drift needs an EPSI FID");
  return poise::epsi_gradient_drift(*ctx.fid);
}

double dosy_f_att(const CostContext& ctx) {
  const Spectrum1D& s = spectrum(ctx);
  if (!ctx.reference) throw MissingContextError("DOSY costs need a reference spectrum");
  const double r = sum_real(*ctx.reference, ctx.region);
  if (r == 0.0 || !std::isfinite(r))
    throw DegenerateReferenceError("reference spectrum integrates to zero");
  auto target = ctx.aux.find("dosy_target_ratio");
  const double ratio = target == ctx.aux.end() ? kDosyTargetRatio : target->second;
  return sum_real(s, ctx.region) / r - ratio;
}

double dosy_aux(const CostContext& ctx) { return dosy_f_att(ctx); }

double dosy(const CostContext& ctx) { return std::abs(dosy_f_att(ctx)); }

double dosy_2p(const CostContext& ctx) { return std::abs(dosy_f_att(ctx)) + aux(ctx, "delta_s"); }

}  // namespace costs

CostRegistry CostRegistry::with_builtins() {
  CostRegistry r;
  r.table_ = {
      {"minabsint", costs::minabsint},
      {"maxrealint", costs::maxrealint},
      {"zerorealint", costs::zerorealint},
      {"zerorealint_squared", costs::zerorealint_squared},
      {"noe_1d", costs::noe_1d},
      {"specdiff", costs::specdiff},
      {"asaphsqc", costs::asaphsqc},
      {"epsi_gradient_drift", costs::epsi_gradient_drift},
      {"dosy_aux", costs::dosy_aux},
      {"dosy", costs::dosy},
      {"dosy_2p", costs::dosy_2p},
  };
  return r;
}

void CostRegistry::add(const std::string& name, CostFunction fn) {
  if (name.empty()) throw ConfigError("cost function name is empty");
  if (!fn) throw ConfigError("cost function '" + name + "' is empty");
  if (!table_.emplace(name, std::move(fn)).second)
    throw DuplicateCostError("cost function '" + name + "' is already registered");
}

const CostFunction& CostRegistry::lookup(const std::string& name) const {
  auto it = table_.find(name);
  if (it == table_.end()) {
    std::string known;
    for (const auto& [k, _] : table_) known += (known.empty() ? "" : ", ") + k;
    throw UnknownCostError("unknown cost function '" + name + "' (available: " + known + ")");
  }
  return it->second;
}

std::vector<std::string> CostRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [k, _] : table_) out.push_back(k);
  return out;
}

}  // namespace poise
