#include "adaexp/outcomes.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace adaexp {

OutcomeModel OutcomeModel::bernoulli(double p0, double p1) {
  return OutcomeModel(OutcomeFamily::Bernoulli, p0, 0, p1, 0);
}
OutcomeModel OutcomeModel::gaussian(double mu0, double var0, double mu1, double var1) {
  return OutcomeModel(OutcomeFamily::Gaussian, mu0, var0, mu1, var1);
}
OutcomeModel OutcomeModel::poisson(double l0, double l1) {
  return OutcomeModel(OutcomeFamily::Poisson, l0, 0, l1, 0);
}
OutcomeModel OutcomeModel::student_shift(double theta, double df0, double df1) {
  return OutcomeModel(OutcomeFamily::StudentShift, theta, df0, 0.0, df1);
}

double OutcomeModel::mean(int arm) const {
  switch (family_) {
    case OutcomeFamily::Bernoulli:
    case OutcomeFamily::Poisson:
      return p_[arm][0];
    case OutcomeFamily::Gaussian:
    case OutcomeFamily::StudentShift:
      return p_[arm][0];
  }
  return 0;
}

double OutcomeModel::second_moment(int arm) const {
  const double m = p_[arm][0];
  switch (family_) {
    case OutcomeFamily::Bernoulli:
      return m;  // Y^2 = Y
    case OutcomeFamily::Gaussian:
      return m * m + p_[arm][1];
    case OutcomeFamily::Poisson:
      return m + m * m;
    case OutcomeFamily::StudentShift: {
      const double df = p_[arm][1];
      return m * m + df / (df - 2.0);
    }
  }
  return 0;
}

double OutcomeModel::fourth_moment(int arm) const {
  const double m = p_[arm][0];
  switch (family_) {
    case OutcomeFamily::Bernoulli:
      return m;
    case OutcomeFamily::Gaussian: {
      const double v = p_[arm][1];
      return m * m * m * m + 6.0 * m * m * v + 3.0 * v * v;
    }
    case OutcomeFamily::Poisson: {
      // raw fourth moment of Poisson(l): l + 7l^2 + 6l^3 + l^4
      const double l = m;
      return l + 7 * l * l + 6 * l * l * l + l * l * l * l;
    }
    case OutcomeFamily::StudentShift: {
      const double df = p_[arm][1];
      const double v = df / (df - 2.0);
      // central fourth moment of t(df) = 3 df^2 / ((df-2)(df-4)),
      // i.e. kurtosis 3(df-2)/(df-4) times v^2; odd central moments vanish
      const double m4c = 3.0 * df * df / ((df - 2.0) * (df - 4.0));
      return m * m * m * m + 6.0 * m * m * v + m4c;
    }
  }
  return 0;
}

double OutcomeModel::signal(long n) const {
  return std::sqrt(static_cast<double>(n)) * (mean(0) - mean(1));
}

void OutcomeModel::validate() const {
  for (int s = 0; s < 2; ++s) {
    switch (family_) {
      case OutcomeFamily::Bernoulli:
        if (p_[s][0] <= 0.0 || p_[s][0] >= 1.0)
          throw std::invalid_argument("bernoulli p must be in (0,1) for positive variance");
        break;
      case OutcomeFamily::Gaussian:
        if (p_[s][1] <= 0.0)
          throw std::invalid_argument("gaussian variance must be positive");
        break;
      case OutcomeFamily::Poisson:
        if (p_[s][0] <= 0.0)
          throw std::invalid_argument("poisson rate must be positive");
        break;
      case OutcomeFamily::StudentShift:
        if (p_[s][1] <= 4.0)
          throw std::invalid_argument("student df must exceed 4 for a finite fourth moment");
        break;
    }
    if (variance(s) <= 0.0) throw std::invalid_argument("outcome variance must be positive");
  }
}

namespace {

long sample_poisson(double lambda, RngStream& rng) {
  const double limit = std::exp(-lambda);
  long k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= rng.uniform();
  } while (p > limit);
  return k - 1;
}

// Marsaglia-Tsang; alpha > 1 always holds here (alpha = df/2 > 2).
double sample_gamma(double alpha, RngStream& rng) {
  const double d = alpha - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = rng.normal();
    double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    double v = t * t * t;
    double u = rng.uniform();
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

}  // namespace

double OutcomeModel::sample(int arm, RngStream& rng) const {
  switch (family_) {
    case OutcomeFamily::Bernoulli:
      return rng.bernoulli(p_[arm][0]) ? 1.0 : 0.0;
    case OutcomeFamily::Gaussian:
      return p_[arm][0] + std::sqrt(p_[arm][1]) * rng.normal();
    case OutcomeFamily::Poisson:
      return static_cast<double>(sample_poisson(p_[arm][0], rng));
    case OutcomeFamily::StudentShift: {
      const double df = p_[arm][1];
      const double chi2 = 2.0 * sample_gamma(df / 2.0, rng);
      return p_[arm][0] + rng.normal() / std::sqrt(chi2 / df);
    }
  }
  return 0;
}

std::string OutcomeModel::describe() const {
  std::ostringstream os;
  switch (family_) {
    case OutcomeFamily::Bernoulli:
      os << "bernoulli(" << p_[0][0] << "," << p_[1][0] << ")";
      break;
    case OutcomeFamily::Gaussian:
      os << "gaussian(" << p_[0][0] << "," << p_[0][1] << ";" << p_[1][0] << "," << p_[1][1] << ")";
      break;
    case OutcomeFamily::Poisson:
      os << "poisson(" << p_[0][0] << "," << p_[1][0] << ")";
      break;
    case OutcomeFamily::StudentShift:
      os << "student_shift(" << p_[0][0] << ";df=" << p_[0][1] << "," << p_[1][1] << ")";
      break;
  }
  return os.str();
}

}  // namespace adaexp
