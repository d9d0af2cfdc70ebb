#pragma once

#include <string>

namespace adaexp {

enum class SelectionKind { Thompson, EpsGreedy, EnrichEffect, EnrichPValue };

// Sampling function e_bar(s, x) of the interim difference x = S(0) - S(1),
// plus the clipping rate l_N. Immutable value type; safe to share.
//
// x = -infinity is a distinguished input (strong-signal limit); every rule
// branches on it explicitly and returns a {0,1} value before clipping.
struct SelectionRule {
  SelectionKind kind = SelectionKind::Thompson;
  double clip = 0.0;       // l_N in [0, 1/2)
  double beta = 0.0;       // effect-size threshold (EnrichEffect)
  double alpha_sel = 0.05; // selection level (EnrichPValue)
  double sigma_hat = 1.0;  // interim scale (EnrichPValue)
  bool sigma_from_pilot = false;  // estimate sigma_hat from pilot data

  static SelectionRule thompson(double l_n);
  static SelectionRule eps_greedy(double l_n);
  static SelectionRule enrich_effect(double beta, double l_n);
  static SelectionRule enrich_pvalue(double alpha_sel, double sigma_hat, double l_n);
  static SelectionRule enrich_pvalue_estimated(double alpha_sel, double l_n);

  // Raw sampling function; arm-complementary: raw(0,x) + raw(1,x) = 1.
  double raw(int arm, double x) const;

  // min{1 - l_N, max{l_N, raw(arm, x)}}
  double clipped(int arm, double x) const;

  double at_minus_infinity(int arm) const;

  // Throws std::invalid_argument on out-of-range parameters.
  void validate() const;

  // True for the step-function designs (finite value set).
  bool is_step() const { return kind != SelectionKind::Thompson; }

  std::string name() const;
};

}  // namespace adaexp
