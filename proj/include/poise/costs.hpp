#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "poise/epsi.hpp"
#include "poise/spectra.hpp"

namespace poise {

/// Everything a cost function may look at for one evaluation. The asaphsqc
/// projection is carried as a Spectrum1D with a zero imaginary part.
struct CostContext {
  std::optional<Spectrum1D> spectrum;
  std::optional<EpsiFid> fid;
  Region region;
  std::optional<Spectrum1D> target;
  std::optional<Spectrum1D> reference;
  std::map<std::string, double> aux;
};

using CostFunction = std::function<double(const CostContext&)>;

namespace costs {

/// Half-width of the band removed around the excited peak by noe_1d.
inline constexpr double kNoeExcisionHalfWidthHz = 25.0;
inline constexpr double kDosyTargetRatio = 0.25;

double minabsint(const CostContext& ctx);
double maxrealint(const CostContext& ctx);
double zerorealint(const CostContext& ctx);
double zerorealint_squared(const CostContext& ctx);
/// Needs aux "excitation_offset_hz": absolute frequency of the excited peak,
/// in the same frame as the transmitter offset.
double noe_1d(const CostContext& ctx);
double specdiff(const CostContext& ctx);
double asaphsqc(const CostContext& ctx);
double epsi_gradient_drift(const CostContext& ctx);
/// sum(S) / sum(R) - 0.25 over the region; aux "dosy_target_ratio" replaces
/// the 0.25 when present.
double dosy_f_att(const CostContext& ctx);
double dosy_aux(const CostContext& ctx);
double dosy(const CostContext& ctx);
/// |f_att| + aux "delta_s".
double dosy_2p(const CostContext& ctx);

}  // namespace costs

/// Name to cost function map. Built-in names cannot be replaced.
class CostRegistry {
 public:
  static CostRegistry with_builtins();

  /// Throws DuplicateCostError if the name is already registered.
  void add(const std::string& name, CostFunction fn);
  /// Throws UnknownCostError listing the registered names.
  const CostFunction& lookup(const std::string& name) const;
  bool contains(const std::string& name) const { return table_.count(name) != 0; }
  std::vector<std::string> names() const;

 private:
  std::map<std::string, CostFunction> table_;
};

}  // namespace poise
