#pragma once

#include <string>

#include "adaexp/rng.hpp"

namespace adaexp {

enum class OutcomeFamily { Bernoulli, Gaussian, Poisson, StudentShift };

// A pair of potential-outcome laws with exact first/second/fourth moments and
// a reproducible sampler. Arm 0 and arm 1 parameters per family:
//   Bernoulli(p0, p1), Gaussian(mu0, var0, mu1, var1), Poisson(l0, l1),
//   StudentShift(theta, df0, df1): arm 0 = theta + t(df0), arm 1 = t(df1).
class OutcomeModel {
 public:
  static OutcomeModel bernoulli(double p0, double p1);
  static OutcomeModel gaussian(double mu0, double var0, double mu1, double var1);
  static OutcomeModel poisson(double l0, double l1);
  static OutcomeModel student_shift(double theta, double df0, double df1);

  OutcomeFamily family() const { return family_; }

  double mean(int arm) const;
  double second_moment(int arm) const;
  double fourth_moment(int arm) const;
  double variance(int arm) const { return second_moment(arm) - mean(arm) * mean(arm); }

  // sqrt(N) * (mean(0) - mean(1))
  double signal(long n) const;

  // Throws std::invalid_argument on a moment-condition violation
  // (non-positive variance, infinite fourth moment).
  void validate() const;

  double sample(int arm, RngStream& rng) const;

  std::string describe() const;

 private:
  OutcomeModel(OutcomeFamily f, double a0, double b0, double a1, double b1)
      : family_(f), p_{{a0, b0}, {a1, b1}} {}

  OutcomeFamily family_;
  // per-arm parameter pair; meaning depends on family (see factories)
  double p_[2][2];
};

}  // namespace adaexp
