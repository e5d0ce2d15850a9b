#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "pctate/estimators.hpp"
#include "pctate/inference.hpp"
#include "pctate/montecarlo.hpp"
#include "pctate/stagdid.hpp"

namespace pctate {

// All report values are scaled by 100 at serialization (percentage points);
// the JSON carries "scaled_by_100": true and z-scores stay unscaled.

nlohmann::json estimate_report_json(const PointEstimates& points, const InferenceReport& inference,
                                    bool homogeneous, double alpha, double rho_0);
std::string estimate_report_text(const PointEstimates& points, const InferenceReport& inference,
                                 bool homogeneous, double alpha);

nlohmann::json did_report_json(const std::vector<AttRow>& rows, double alpha);
std::string did_report_text(const std::vector<AttRow>& rows, double alpha);

nlohmann::json sim_table_json(const SimTable& table, const SimConfig& config);
std::string sim_table_csv(const SimTable& table);

}  // namespace pctate
