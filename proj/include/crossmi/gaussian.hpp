#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "crossmi/dataset.hpp"
#include "crossmi/estimators.hpp"

namespace crossmi {

// Fitted linear-regression / bivariate-normal reference model. The
// posterior q(y|x) = N(beta*x + gamma, sigma_y_given_x^2) is compared to
// the prior q(y) = N(mu_y, sigma_y^2) to evaluate pointwise information.
struct GaussianModel {
  double beta = 0.0;             // regression slope
  double gamma = 0.0;            // intercept
  double mu_x = 0.0, mu_y = 0.0;
  double sigma_x = 0.0, sigma_y = 0.0;
  double rho = 0.0;              // correlation, |rho| < 1
  double sigma_y_given_x = 0.0;  // sqrt(sigma_y^2 (1 - rho^2))
  std::size_t n_fit = 0;
};

// Sample-moment fit (N-1 denominators). Requires N >= 3 and strictly
// positive variance in both variables; rejects |rho| >= 1 - 1e-12.
GaussianModel gaussian_fit(const PairedSeries& reference);

// Pointwise information of one sample under the model:
//   -1/2 ln(sigma^2_{Y|X}/sigma^2_Y)
//   + 1/2 [ (y-mu_Y)^2/sigma^2_Y - (y-mu_{Y|x})^2/sigma^2_{Y|X} ].
double gaussian_local_mi(const GaussianModel& model, double x, double y);

// Pointwise values over a test set, with the constant term, the mean
// residual correction, and the raw sum of squared posterior residuals
// reported separately.
LocalInfoSeries gaussian_cross_mi(const GaussianModel& model, const PairedSeries& test);

struct HeatmapGrid {
  std::vector<double> xs, ys;      // grid coordinates (evenly spaced, inclusive)
  std::vector<double> values;      // row-major, rows indexed by y
  double at(std::size_t yi, std::size_t xi) const { return values[yi * xs.size() + xi]; }
};

// Pointwise information over a regular grid (resolution x resolution).
HeatmapGrid gaussian_heatmap(const GaussianModel& model, double x_min, double x_max,
                             double y_min, double y_max, std::size_t resolution);

// --- Trivariate extension (exact chain-rule decompositions) ------------------

// Mean vector and covariance matrix over (x, z, y); y is the target.
struct TrivariateGaussianModel {
  std::array<double, 3> mean{};     // x, z, y
  std::array<double, 9> cov{};      // row-major 3x3 in (x, z, y) order
  std::size_t n_fit = 0;
};

TrivariateGaussianModel trivariate_gaussian_fit(const TripleSeries& reference);

// log q(y|x) / q(y)
double trivariate_local_mi_xy(const TrivariateGaussianModel& m, double x, double y);
// log q(y|x,z) / q(y)
double trivariate_local_mi_joint(const TrivariateGaussianModel& m, double x, double z,
                                 double y);
// log q(y|x,z) / q(y|x)
double trivariate_local_cmi(const TrivariateGaussianModel& m, double x, double z,
                            double y);

LocalInfoSeries gaussian_cross_mi_joint(const TrivariateGaussianModel& m,
                                        const TripleSeries& test);
LocalInfoSeries gaussian_cross_cmi(const TrivariateGaussianModel& m,
                                   const TripleSeries& test);

}  // namespace crossmi
