#pragma once

#include "hpdg/mesh.hpp"

#include <span>
#include <vector>

namespace hpdg
{

enum class MarkingStrategy
{
  maximum,
  fixed_fraction
};

struct MarkingConfig
{
  MarkingStrategy strategy = MarkingStrategy::maximum;
  /// maximum: mark eta_T >= theta max eta; fixed_fraction: mark the
  /// ceil(theta N) largest
  double theta = 0.75;
};

/// Marked elements in ascending order. Empty when all indicators vanish.
/// Throws std::invalid_argument for theta outside (0, 1] or negative or
/// non-finite indicators.
std::vector<int> mark(std::span<const double> indicators, const MarkingConfig& config);

struct HpConstants
{
  double gamma_h = 4.0;
  double gamma_p = 0.4;
  double gamma_n = 1.0;
};

/// Per-element state of the hp decision.
struct AdaptState
{
  /// squared predicted indicators; +inf before the first estimate
  std::vector<double> predicted2;
  std::vector<int> degrees;
  int level = 0;
  HpConstants constants;

  static AdaptState initial(std::vector<int> degrees, HpConstants constants = {});
};

struct HpDecision
{
  /// ascending element indices
  std::vector<int> h_refine;
  std::vector<int> p_refine;
  /// per old element: the squared prediction its children (h-refined) or
  /// itself carries to the next level
  std::vector<double> predicted2;
  /// per old element: degree on the next level
  std::vector<int> degrees;
};

/// One step of the hp decision. `indicators` holds eta_{T,l} (not squared).
HpDecision hp_decide(std::span<const int> marked, std::span<const double> indicators,
                     const AdaptState& state);

/// Move the state to the refined mesh. Children of h-refined elements get
/// the decision's prediction each; children of elements bisected only by
/// the closure share the parent's prediction equally.
AdaptState advance_state(const AdaptState& state, const HpDecision& decision,
                         const RefinementResult& refinement);

/// State after p-refinement only (no mesh change).
AdaptState advance_state(const AdaptState& state, const HpDecision& decision);

} // namespace hpdg
