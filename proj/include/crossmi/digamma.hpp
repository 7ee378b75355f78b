#pragma once

namespace crossmi {

// Digamma function psi(v) for v > 0. Absolute error below 1e-10 on
// [1e-3, 1e6]. Throws Error(invalid_input) for v <= 0.
double digamma(double v);

}  // namespace crossmi
