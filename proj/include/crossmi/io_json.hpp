#pragma once

// Shared JSON output schema: every document is
//   { "kind": <string>, "config": {...}, "result": {...} }
// with numeric values serialized at full double precision (round-trip
// exact). Information-valued fields carry a _nats suffix; the bits flag
// converts them at serialization only and renames the suffix.

#include <string>
#include <vector>

#include <json.hpp>

#include "crossmi/estimators.hpp"
#include "crossmi/gaussian.hpp"
#include "crossmi/significance.hpp"
#include "crossmi/simgen.hpp"

namespace crossmi {

std::string backend_name(Backend b);
Backend backend_from_name(const std::string& name);
std::string test_kind_name(TestKind k);
TestKind test_kind_from_name(const std::string& name);
std::string shuffle_target_name(ShuffleTarget t);
ShuffleTarget shuffle_target_from_name(const std::string& name);

nlohmann::json estimator_config_json(const EstimatorConfig& cfg);

nlohmann::json local_info_document(const LocalInfoSeries& series, nlohmann::json config,
                                   bool bits = false);
nlohmann::json permutation_document(const PermutationTestResult& result,
                                    nlohmann::json config, bool bits = false);
nlohmann::json support_document(const SupportReport& report, nlohmann::json config);
nlohmann::json scaling_document(const std::vector<ScalingRow>& rows,
                                nlohmann::json config, bool bits = false);

// Round-trip readers (nats documents).
LocalInfoSeries local_info_from_document(const nlohmann::json& doc);
PermutationTestResult permutation_from_document(const nlohmann::json& doc);

void write_json_file(const std::string& path, const nlohmann::json& doc);
nlohmann::json read_json_file(const std::string& path);

// CSV emitters for plot-ready data.
void write_heatmap_csv(const std::string& path, const HeatmapGrid& grid);
void write_scaling_csv(const std::string& path, const std::vector<ScalingRow>& rows);
void write_locals_csv(const std::string& path, const LocalInfoSeries& series);

// Generator specs (CLI --config override and the versioned figure file).
nlohmann::json marginal_json(const MarginalSpec& spec);
MarginalSpec marginal_from_json(const nlohmann::json& j);
nlohmann::json condition_json(const ConditionSpec& spec);
ConditionSpec condition_from_json(const nlohmann::json& j);
nlohmann::json figure_pair_json(const FigurePair& fp);
FigurePair figure_pair_from_json(const nlohmann::json& j);

// The full pinned-figure configuration (fig1..fig6); configs/figures.json
// holds exactly this document.
nlohmann::json figure_configs_json();

}  // namespace crossmi
