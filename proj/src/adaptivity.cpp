#include "hpdg/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hpdg
{

std::vector<int> mark(std::span<const double> eta, const MarkingConfig& config)
{
  if (!(config.theta > 0.0 && config.theta <= 1.0))
    throw std::invalid_argument("marking parameter must lie in (0, 1]");
  double top = 0.0;
  for (double v : eta)
  {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("indicators must be finite and non-negative");
    top = std::max(top, v);
  }
  std::vector<int> marked;
  if (top == 0.0)
    return marked;
  const int n = static_cast<int>(eta.size());
  if (config.strategy == MarkingStrategy::maximum)
  {
    for (int t = 0; t < n; ++t)
      if (eta[t] >= config.theta * top)
        marked.push_back(t);
    return marked;
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return eta[a] > eta[b]; });
  const int count = std::min(n, static_cast<int>(std::ceil(config.theta * n - 1e-12)));
  marked.assign(order.begin(), order.begin() + count);
  std::sort(marked.begin(), marked.end());
  return marked;
}

AdaptState AdaptState::initial(std::vector<int> degrees, HpConstants constants)
{
  AdaptState s;
  s.predicted2.assign(degrees.size(), std::numeric_limits<double>::infinity());
  s.degrees = std::move(degrees);
  s.constants = constants;
  return s;
}

HpDecision hp_decide(std::span<const int> marked, std::span<const double> eta,
                     const AdaptState& state)
{
  const int n = static_cast<int>(state.degrees.size());
  if (static_cast<int>(eta.size()) != n || static_cast<int>(state.predicted2.size()) != n)
    throw std::invalid_argument("indicator count does not match the state");
  const HpConstants& c = state.constants;
  HpDecision d;
  d.degrees = state.degrees;
  d.predicted2.resize(n);
  std::vector<char> is_marked(n, 0);
  for (int t : marked)
    is_marked.at(t) = 1;
  for (int t = 0; t < n; ++t)
  {
    const double e2 = eta[t] * eta[t];
    if (!is_marked[t])
    {
      d.predicted2[t] = c.gamma_n * state.predicted2[t];
      continue;
    }
    if (e2 > state.predicted2[t])
    {
      d.h_refine.push_back(t);
      d.predicted2[t] = 0.5 * c.gamma_h * std::pow(0.5, state.degrees[t]) * e2;
    }
    else
    {
      d.p_refine.push_back(t);
      d.degrees[t] += 1;
      d.predicted2[t] = c.gamma_p * e2;
    }
  }
  return d;
}

AdaptState advance_state(const AdaptState& state, const HpDecision& decision,
                         const RefinementResult& refinement)
{
  AdaptState next;
  next.constants = state.constants;
  next.level = state.level + 1;
  const int nt = refinement.mesh.num_triangles();
  next.predicted2.resize(nt);
  next.degrees.resize(nt);
  std::vector<char> h(state.degrees.size(), 0);
  for (int t : decision.h_refine)
    h[t] = 1;
  for (int c = 0; c < nt; ++c)
  {
    const int parent = refinement.parent[c];
    const double pred = decision.predicted2[parent];
    const auto nchildren = static_cast<double>(refinement.children[parent].size());
    next.degrees[c] = decision.degrees[parent];
    next.predicted2[c] = h[parent] ? pred : pred / nchildren;
  }
  return next;
}

AdaptState advance_state(const AdaptState& state, const HpDecision& decision)
{
  if (!decision.h_refine.empty())
    throw std::invalid_argument("decision contains h-refinement; pass the refinement");
  AdaptState next;
  next.constants = state.constants;
  next.level = state.level + 1;
  next.predicted2 = decision.predicted2;
  next.degrees = decision.degrees;
  return next;
}

} // namespace hpdg
