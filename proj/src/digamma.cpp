#include "crossmi/digamma.hpp"

#include <cmath>

#include "crossmi/error.hpp"

namespace crossmi {

double digamma(double v) {
  if (!(v > 0.0)) {
    throw Error(errc::invalid_input, "digamma: argument must be positive");
  }
  // Shift the argument above 10 with psi(v) = psi(v+1) - 1/v, then use the
  // asymptotic expansion psi(x) ~ ln x - 1/(2x) - sum B_2n / (2n x^2n).
  double acc = 0.0;
  double x = v;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // B2/2, B4/4, ... B14/14 over x^2, x^4, ..., x^14
  double series = inv2 * (1.0 / 12.0
                - inv2 * (1.0 / 120.0
                - inv2 * (1.0 / 252.0
                - inv2 * (1.0 / 240.0
                - inv2 * (1.0 / 132.0
                - inv2 * (691.0 / 32760.0
                - inv2 * (1.0 / 12.0)))))));
  return acc + std::log(x) - 0.5 * inv - series;
}

}  // namespace crossmi
