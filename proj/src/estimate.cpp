#include "crossmi/estimate.hpp"

#include "crossmi/gaussian.hpp"

namespace crossmi {

LocalInfoSeries estimate_self_mi(const PairedSeries& data, const EstimatorConfig& cfg) {
  if (cfg.backend == Backend::Ksg) return ksg_mi(data, cfg);
  return gaussian_cross_mi(gaussian_fit(data), data);
}

LocalInfoSeries estimate_cross_mi(const PairedSeries& test, const PairedSeries& reference,
                                  const EstimatorConfig& cfg, bool exclude_self) {
  if (cfg.backend == Backend::Ksg) {
    return cross_ksg_mi(test, reference, cfg, exclude_self);
  }
  return gaussian_cross_mi(gaussian_fit(reference), test);
}

}  // namespace crossmi
