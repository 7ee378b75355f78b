#pragma once

// Backend dispatch shared by the significance tests and the CLI.

#include "crossmi/dataset.hpp"
#include "crossmi/estimators.hpp"

namespace crossmi {

// MI of a sample set against its own distribution (KSG), or the Gaussian
// self-fit evaluated over the fitting samples.
LocalInfoSeries estimate_self_mi(const PairedSeries& data, const EstimatorConfig& cfg);

// Cross MI of test samples against a reference distribution.
LocalInfoSeries estimate_cross_mi(const PairedSeries& test, const PairedSeries& reference,
                                  const EstimatorConfig& cfg, bool exclude_self = false);

}  // namespace crossmi
