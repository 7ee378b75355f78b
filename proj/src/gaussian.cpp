#include "crossmi/gaussian.hpp"

#include <cmath>

#include "crossmi/error.hpp"

namespace crossmi {

namespace {

double sample_mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double e : v) s += e;
  return s / static_cast<double>(v.size());
}

// sum of centered cross products (caller divides by N-1)
double centered_sum(const std::vector<double>& a, double ma,
                    const std::vector<double>& b, double mb) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - ma) * (b[i] - mb);
  return s;
}

constexpr double kDegenerateRho = 1.0 - 1e-12;

}  // namespace

GaussianModel gaussian_fit(const PairedSeries& reference) {
  const std::size_t n = reference.size();
  if (n < 3) {
    throw Error(errc::invalid_input, "gaussian_fit requires at least 3 samples");
  }
  const auto& x = reference.x();
  const auto& y = reference.y();
  const double mx = sample_mean(x);
  const double my = sample_mean(y);
  const double denom = static_cast<double>(n - 1);
  const double var_x = centered_sum(x, mx, x, mx) / denom;
  const double var_y = centered_sum(y, my, y, my) / denom;
  const double cov = centered_sum(x, mx, y, my) / denom;
  if (!(var_x > 0.0)) {
    throw Error(errc::degenerate_data, "gaussian_fit: zero variance in x");
  }
  if (!(var_y > 0.0)) {
    throw Error(errc::degenerate_data, "gaussian_fit: zero variance in y");
  }
  GaussianModel m;
  m.n_fit = n;
  m.mu_x = mx;
  m.mu_y = my;
  m.sigma_x = std::sqrt(var_x);
  m.sigma_y = std::sqrt(var_y);
  m.rho = cov / (m.sigma_x * m.sigma_y);
  if (std::fabs(m.rho) >= kDegenerateRho) {
    throw Error(errc::degenerate_data,
                "gaussian_fit: degenerate fit, |rho| ~ 1 (add noise to the data)");
  }
  m.beta = cov / var_x;
  m.gamma = my - m.beta * mx;
  m.sigma_y_given_x = m.sigma_y * std::sqrt(1.0 - m.rho * m.rho);
  return m;
}

double gaussian_local_mi(const GaussianModel& model, double x, double y) {
  const double var_y = model.sigma_y * model.sigma_y;
  const double var_cond = model.sigma_y_given_x * model.sigma_y_given_x;
  const double mu_cond = model.beta * x + model.gamma;
  const double prior = (y - model.mu_y) * (y - model.mu_y) / var_y;
  const double posterior = (y - mu_cond) * (y - mu_cond) / var_cond;
  return -0.5 * std::log(var_cond / var_y) + 0.5 * (prior - posterior);
}

LocalInfoSeries gaussian_cross_mi(const GaussianModel& model, const PairedSeries& test) {
  const std::size_t n = test.size();
  const double var_y = model.sigma_y * model.sigma_y;
  const double var_cond = model.sigma_y_given_x * model.sigma_y_given_x;
  const double first_term = -0.5 * std::log(var_cond / var_y);

  LocalInfoSeries out;
  out.locals.resize(n);
  double sum = 0.0, corr_sum = 0.0, ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = test.x()[i];
    const double y = test.y()[i];
    const double mu_cond = model.beta * x + model.gamma;
    const double resid = y - mu_cond;
    const double correction =
        0.5 * ((y - model.mu_y) * (y - model.mu_y) / var_y - resid * resid / var_cond);
    out.locals[i] = first_term + correction;
    sum += out.locals[i];
    corr_sum += correction;
    ssr += resid * resid;
  }
  out.mean = sum / static_cast<double>(n);
  out.backend = Backend::Gaussian;
  out.k = 0;
  out.n_test = n;
  out.n_reference = model.n_fit;
  out.gaussian = GaussianDecomposition{first_term, corr_sum / static_cast<double>(n), ssr};
  return out;
}

HeatmapGrid gaussian_heatmap(const GaussianModel& model, double x_min, double x_max,
                             double y_min, double y_max, std::size_t resolution) {
  if (resolution < 2) {
    throw Error(errc::invalid_input, "heatmap resolution must be >= 2");
  }
  if (!(x_min < x_max) || !(y_min < y_max)) {
    throw Error(errc::invalid_input, "heatmap range is empty or inverted");
  }
  HeatmapGrid grid;
  grid.xs.resize(resolution);
  grid.ys.resize(resolution);
  const double dx = (x_max - x_min) / static_cast<double>(resolution - 1);
  const double dy = (y_max - y_min) / static_cast<double>(resolution - 1);
  for (std::size_t i = 0; i < resolution; ++i) {
    grid.xs[i] = (i + 1 == resolution) ? x_max : x_min + dx * static_cast<double>(i);
    grid.ys[i] = (i + 1 == resolution) ? y_max : y_min + dy * static_cast<double>(i);
  }
  grid.values.resize(resolution * resolution);
  for (std::size_t yi = 0; yi < resolution; ++yi) {
    for (std::size_t xi = 0; xi < resolution; ++xi) {
      grid.values[yi * resolution + xi] = gaussian_local_mi(model, grid.xs[xi], grid.ys[yi]);
    }
  }
  return grid;
}

// --- trivariate --------------------------------------------------------------

TrivariateGaussianModel trivariate_gaussian_fit(const TripleSeries& reference) {
  const std::size_t n = reference.size();
  if (n < 4) {
    throw Error(errc::invalid_input, "trivariate fit requires at least 4 samples");
  }
  const std::vector<double>* cols[3] = {&reference.x(), &reference.z(), &reference.y()};
  TrivariateGaussianModel m;
  m.n_fit = n;
  for (int i = 0; i < 3; ++i) m.mean[i] = sample_mean(*cols[i]);
  const double denom = static_cast<double>(n - 1);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      m.cov[static_cast<std::size_t>(i * 3 + j)] =
          centered_sum(*cols[i], m.mean[i], *cols[j], m.mean[j]) / denom;
    }
  }
  for (int i = 0; i < 3; ++i) {
    if (!(m.cov[static_cast<std::size_t>(i * 3 + i)] > 0.0)) {
      throw Error(errc::degenerate_data, "trivariate fit: zero variance");
    }
  }
  return m;
}

namespace {

// indices into (x, z, y) order
constexpr int kX = 0, kZ = 1, kY = 2;

struct Conditional {
  double mean;
  double var;
};

double cov_at(const TrivariateGaussianModel& m, int i, int j) {
  return m.cov[static_cast<std::size_t>(i * 3 + j)];
}

// q(y | x)
Conditional cond_y_given_x(const TrivariateGaussianModel& m, double x) {
  const double w = cov_at(m, kY, kX) / cov_at(m, kX, kX);
  Conditional c;
  c.mean = m.mean[kY] + w * (x - m.mean[kX]);
  c.var = cov_at(m, kY, kY) - w * cov_at(m, kY, kX);
  if (!(c.var > 0.0)) {
    throw Error(errc::degenerate_data, "degenerate conditional variance");
  }
  return c;
}

// q(y | x, z) via 2x2 solve
Conditional cond_y_given_xz(const TrivariateGaussianModel& m, double x, double z) {
  const double a = cov_at(m, kX, kX), b = cov_at(m, kX, kZ), d = cov_at(m, kZ, kZ);
  const double cyx = cov_at(m, kY, kX), cyz = cov_at(m, kY, kZ);
  const double det = a * d - b * b;
  if (!(det > 0.0)) {
    throw Error(errc::degenerate_data, "degenerate predictor covariance");
  }
  const double wx = (d * cyx - b * cyz) / det;
  const double wz = (a * cyz - b * cyx) / det;
  Conditional c;
  c.mean = m.mean[kY] + wx * (x - m.mean[kX]) + wz * (z - m.mean[kZ]);
  c.var = cov_at(m, kY, kY) - (wx * cyx + wz * cyz);
  if (!(c.var > 0.0)) {
    throw Error(errc::degenerate_data, "degenerate conditional variance");
  }
  return c;
}

// log N(y; c) - log N(y; prior) with both densities Gaussian
double log_density_ratio(double y, const Conditional& num, double prior_mean,
                         double prior_var) {
  const double rn = (y - num.mean) * (y - num.mean) / num.var;
  const double rp = (y - prior_mean) * (y - prior_mean) / prior_var;
  return -0.5 * std::log(num.var / prior_var) + 0.5 * (rp - rn);
}

LocalInfoSeries collect(const TrivariateGaussianModel& m, const TripleSeries& test,
                        double (*local)(const TrivariateGaussianModel&, double, double,
                                        double)) {
  LocalInfoSeries out;
  out.locals.resize(test.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    out.locals[i] = local(m, test.x()[i], test.z()[i], test.y()[i]);
    sum += out.locals[i];
  }
  out.mean = sum / static_cast<double>(test.size());
  out.backend = Backend::Gaussian;
  out.k = 0;
  out.n_test = test.size();
  out.n_reference = m.n_fit;
  return out;
}

}  // namespace

double trivariate_local_mi_xy(const TrivariateGaussianModel& m, double x, double y) {
  return log_density_ratio(y, cond_y_given_x(m, x), m.mean[kY], cov_at(m, kY, kY));
}

double trivariate_local_mi_joint(const TrivariateGaussianModel& m, double x, double z,
                                 double y) {
  return log_density_ratio(y, cond_y_given_xz(m, x, z), m.mean[kY], cov_at(m, kY, kY));
}

double trivariate_local_cmi(const TrivariateGaussianModel& m, double x, double z,
                            double y) {
  const Conditional prior = cond_y_given_x(m, x);
  return log_density_ratio(y, cond_y_given_xz(m, x, z), prior.mean, prior.var);
}

LocalInfoSeries gaussian_cross_mi_joint(const TrivariateGaussianModel& m,
                                        const TripleSeries& test) {
  return collect(m, test, [](const TrivariateGaussianModel& mm, double x, double z,
                             double y) { return trivariate_local_mi_joint(mm, x, z, y); });
}

LocalInfoSeries gaussian_cross_cmi(const TrivariateGaussianModel& m,
                                   const TripleSeries& test) {
  return collect(m, test, [](const TrivariateGaussianModel& mm, double x, double z,
                             double y) { return trivariate_local_cmi(mm, x, z, y); });
}

}  // namespace crossmi
