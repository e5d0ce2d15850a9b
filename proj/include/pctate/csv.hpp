#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pctate/errors.hpp"
#include "pctate/ols.hpp"
#include "pctate/stagdid.hpp"

namespace pctate {

/// RFC-4180 CSV with a required header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const;  // throws SchemaError
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(std::istream& in, const std::string& origin);

struct EstimateMapping {
    std::string outcome;
    std::string subgroup;
    std::vector<std::string> covariates;
    std::string cluster;  // optional; empty = no clustering
    std::string control_label = "control";
};

/// Typed cross-sectional records: strictly positive outcomes (offending row
/// numbers reported), numeric covariates, subgroup label per row.
struct CrossSectionData {
    std::vector<double> outcome;
    std::vector<std::string> subgroup;
    Eigen::MatrixXd covariates;
    std::vector<std::string> covariate_names;
    std::vector<long> cluster_ids;  // empty when no cluster column mapped
};

CrossSectionData load_cross_section(const CsvTable& table, const EstimateMapping& mapping);

struct PanelMapping {
    std::string unit;
    std::string time;
    std::string cohort;  // blank cell = never treated
    std::string outcome;
    std::vector<std::string> covariates;
};

PanelData load_panel(const CsvTable& table, const PanelMapping& mapping);

}  // namespace pctate
