#include "adaexp/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "adaexp/normal.hpp"

namespace adaexp {

SelectionRule SelectionRule::thompson(double l_n) {
  SelectionRule r;
  r.kind = SelectionKind::Thompson;
  r.clip = l_n;
  return r;
}
SelectionRule SelectionRule::eps_greedy(double l_n) {
  SelectionRule r;
  r.kind = SelectionKind::EpsGreedy;
  r.clip = l_n;
  return r;
}
SelectionRule SelectionRule::enrich_effect(double beta, double l_n) {
  SelectionRule r;
  r.kind = SelectionKind::EnrichEffect;
  r.beta = beta;
  r.clip = l_n;
  return r;
}
SelectionRule SelectionRule::enrich_pvalue(double alpha_sel, double sigma_hat, double l_n) {
  SelectionRule r;
  r.kind = SelectionKind::EnrichPValue;
  r.alpha_sel = alpha_sel;
  r.sigma_hat = sigma_hat;
  r.clip = l_n;
  return r;
}
SelectionRule SelectionRule::enrich_pvalue_estimated(double alpha_sel, double l_n) {
  SelectionRule r = enrich_pvalue(alpha_sel, 1.0, l_n);
  r.sigma_from_pilot = true;
  return r;
}

double SelectionRule::raw(int arm, double x) const {
  if (std::isinf(x) && x < 0) return at_minus_infinity(arm);
  double e0;  // probability of arm 0
  switch (kind) {
    case SelectionKind::Thompson:
      e0 = normal_cdf(x);
      break;
    case SelectionKind::EpsGreedy:
      e0 = (x >= 0.0) ? 1.0 : 0.0;
      break;
    case SelectionKind::EnrichEffect:
      e0 = (x >= beta) ? 1.0 : 0.0;
      break;
    case SelectionKind::EnrichPValue: {
      const double pl = normal_cdf(x / sigma_hat);
      if (pl < alpha_sel)
        e0 = 1.0;
      else if (pl > 1.0 - alpha_sel)
        e0 = 0.0;
      else
        e0 = 0.5;
      break;
    }
    default:
      e0 = 0.5;
  }
  return arm == 0 ? e0 : 1.0 - e0;
}

double SelectionRule::clipped(int arm, double x) const {
  return std::min(1.0 - clip, std::max(clip, raw(arm, x)));
}

double SelectionRule::at_minus_infinity(int arm) const {
  double e0;
  switch (kind) {
    case SelectionKind::Thompson:
    case SelectionKind::EpsGreedy:
    case SelectionKind::EnrichEffect:
      e0 = 0.0;  // Phi(-inf) = 0; -inf below any step threshold
      break;
    case SelectionKind::EnrichPValue:
      e0 = 1.0;  // p_l = Phi(-inf) = 0 < alpha
      break;
    default:
      e0 = 0.0;
  }
  return arm == 0 ? e0 : 1.0 - e0;
}

void SelectionRule::validate() const {
  if (clip < 0.0 || clip >= 0.5)
    throw std::invalid_argument("clip rate l_N must lie in [0, 1/2)");
  if (kind == SelectionKind::EnrichPValue) {
    if (alpha_sel <= 0.0 || alpha_sel >= 0.5)
      throw std::invalid_argument("selection level alpha_sel must lie in (0, 1/2)");
    if (!sigma_from_pilot && sigma_hat <= 0.0)
      throw std::invalid_argument("sigma_hat must be positive");
  }
}

std::string SelectionRule::name() const {
  switch (kind) {
    case SelectionKind::Thompson: return "thompson";
    case SelectionKind::EpsGreedy: return "eps_greedy";
    case SelectionKind::EnrichEffect: return "enrich_effect";
    case SelectionKind::EnrichPValue: return "enrich_pvalue";
  }
  return "?";
}

}  // namespace adaexp
