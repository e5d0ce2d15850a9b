#pragma once

#include <Eigen/Dense>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "pctate/errors.hpp"
#include "pctate/estimators.hpp"
#include "pctate/inference.hpp"
#include "pctate/ols.hpp"
#include "pctate/shares.hpp"

namespace pctate {

/// Cohort sentinel for never-treated units.
inline constexpr long kNeverTreated = std::numeric_limits<long>::max();

/// Staggered-adoption panel in long format. Outcomes must be positive; the
/// log transform happens inside build_panel_design.
struct PanelData {
    std::vector<long> unit_id;
    std::vector<long> time;
    std::vector<long> cohort;  // kNeverTreated for never-treated units
    std::vector<double> outcome;
    Eigen::MatrixXd covariates;  // n x k, may have zero columns
    std::vector<std::string> covariate_names;

    long n_rows() const { return static_cast<long>(unit_id.size()); }
};

struct CellKey {
    long cohort = 0;
    long event_time = 0;

    bool operator<(const CellKey& other) const {
        return cohort != other.cohort ? cohort < other.cohort : event_time < other.event_time;
    }
    bool operator==(const CellKey& other) const {
        return cohort == other.cohort && event_time == other.event_time;
    }
};

struct EventWindow {
    long r_min = -6;
    long r_max = 3;
};

enum class AggregationKind { EventTime, Cohort, Calendar, Overall };

struct AggregationSet {
    AggregationKind kind = AggregationKind::Overall;
    long key = 0;  // r* for EventTime, c* for Cohort, t for Calendar; unused for Overall
    std::vector<CellKey> members;
    std::string label;
};

/// Output of build_panel_design: the unit-demeaned design (time dummies,
/// covariates, then one dummy per (cohort, event-time) cell) plus the row
/// bookkeeping the later stages need.
struct PanelDesign {
    DesignMatrix design;             // no intercept; unit FE absorbed by demeaning
    Eigen::VectorXd outcome;         // demeaned ln(y)
    std::vector<CellKey> cells;      // maps treatment columns to (c, r)
    std::vector<long> cluster_ids;   // unit id per kept row
    std::vector<long> row_cohort;    // cohort per kept row
    std::vector<long> row_time;      // time per kept row
    long n_units = 0;
    long n_times = 0;
    std::vector<long> dropped_cohorts;  // cohorts without post-treatment cells in window
};

PanelDesign build_panel_design(const PanelData& panel, const EventWindow& window);

/// Fits the cell-dummy model on the demeaned design with CR1 clustering by
/// unit. residual_df subtracts the absorbed unit effects:
/// N_obs - N_units - (T-1) - #covariates - #cells.
EffectEstimates fit_stagdid(const PanelDesign& panel_design);

/// Cell counts within the aggregation set, as shares over the set.
ShareEstimates aggregation_weights(const PanelDesign& panel_design, const AggregationSet& set);

/// Standard aggregation targets present in the fitted cells: overall, one
/// set per cohort, per event time, and per calendar time (post-treatment
/// cells only, except event-time sets with negative r*).
std::vector<AggregationSet> standard_aggregation_sets(const std::vector<CellKey>& cells);

struct AttRow {
    AggregationSet set;
    PointEstimates points;
    InferenceReport inference;
    bool homogeneous = false;  // single-cell set
};

std::vector<AttRow> att_report(const EffectEstimates& effects, const PanelDesign& panel_design,
                               const std::vector<AggregationSet>& sets, double alpha);

}  // namespace pctate
