#include "pctate/stagdid.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>

namespace pctate {

namespace {

std::string cell_label(const CellKey& cell) {
    std::ostringstream out;
    out << "c=" << cell.cohort << ",r=" << cell.event_time;
    return out.str();
}

}  // namespace

PanelDesign build_panel_design(const PanelData& panel, const EventWindow& window) {
    const long n = panel.n_rows();
    if (n == 0) throw EmptyInput("build_panel_design: empty panel");
    if (window.r_min > 0 || window.r_max < 0)
        throw InputError("build_panel_design: event window must include 0");

    {
        std::vector<long> bad_rows;
        for (long i = 0; i < n; ++i)
            if (!(panel.outcome[i] > 0.0)) bad_rows.push_back(i);
        if (!bad_rows.empty()) {
            std::ostringstream msg;
            msg << "build_panel_design: nonpositive outcome at rows";
            for (long r : bad_rows) msg << " " << r;
            throw NonPositiveOutcome(msg.str());
        }
    }

    std::set<std::pair<long, long>> seen;
    std::unordered_map<long, long> unit_cohort;
    for (long i = 0; i < n; ++i) {
        if (!seen.emplace(panel.unit_id[i], panel.time[i]).second)
            throw InputError("build_panel_design: duplicate (unit, time) pair at row " + std::to_string(i));
        auto [it, inserted] = unit_cohort.emplace(panel.unit_id[i], panel.cohort[i]);
        if (!inserted && it->second != panel.cohort[i])
            throw InputError("build_panel_design: inconsistent cohort for unit " + std::to_string(panel.unit_id[i]));
    }

    bool has_never = false;
    bool has_treated = false;
    for (const auto& [unit, cohort] : unit_cohort) {
        if (cohort == kNeverTreated)
            has_never = true;
        else
            has_treated = true;
    }
    if (!has_treated) throw EmptyTreatment("build_panel_design: no treated units");
    if (!has_never) throw NoControlGroup("build_panel_design: no never-treated units");

    // Row selection: never-treated rows always kept; treated rows kept when
    // the event time is inside the window or is the base period r = -1.
    auto keep_row = [&](long i) {
        if (panel.cohort[i] == kNeverTreated) return true;
        const long r = panel.time[i] - panel.cohort[i];
        return (r >= window.r_min && r <= window.r_max) || r == -1;
    };

    // Cohorts whose kept rows have no post-treatment observation cannot
    // identify a treatment effect; drop their units entirely.
    std::set<long> cohorts_with_post;
    for (long i = 0; i < n; ++i) {
        if (panel.cohort[i] == kNeverTreated || !keep_row(i)) continue;
        const long r = panel.time[i] - panel.cohort[i];
        if (r >= 0) cohorts_with_post.insert(panel.cohort[i]);
    }
    std::set<long> dropped;
    for (long i = 0; i < n; ++i) {
        const long c = panel.cohort[i];
        if (c != kNeverTreated && !cohorts_with_post.count(c)) dropped.insert(c);
    }

    std::vector<long> rows;
    for (long i = 0; i < n; ++i)
        if (keep_row(i) && !dropped.count(panel.cohort[i])) rows.push_back(i);
    if (rows.empty()) throw EmptyInput("build_panel_design: no rows left after trimming");

    std::set<long> times;
    std::set<CellKey> cell_set;
    for (long i : rows) {
        times.insert(panel.time[i]);
        const long c = panel.cohort[i];
        if (c == kNeverTreated) continue;
        const long r = panel.time[i] - c;
        if (r != -1) cell_set.insert({c, r});
    }
    if (cell_set.empty()) throw EmptyTreatment("build_panel_design: no estimable treatment cells");

    PanelDesign out;
    out.cells.assign(cell_set.begin(), cell_set.end());
    out.dropped_cohorts.assign(dropped.begin(), dropped.end());
    out.n_times = static_cast<long>(times.size());

    std::vector<long> time_list(times.begin(), times.end());
    std::map<long, int> time_col;  // dummies for all but the first period
    for (size_t t = 1; t < time_list.size(); ++t)
        time_col[time_list[t]] = static_cast<int>(t) - 1;
    std::map<CellKey, int> cell_col;
    for (size_t j = 0; j < out.cells.size(); ++j) cell_col[out.cells[j]] = static_cast<int>(j);

    const int n_time_dummies = static_cast<int>(time_list.size()) - 1;
    const int n_cov = static_cast<int>(panel.covariates.cols());
    const int n_cells = static_cast<int>(out.cells.size());
    const int K = n_time_dummies + n_cov + n_cells;
    const long nk = static_cast<long>(rows.size());

    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(nk, K);
    Eigen::VectorXd y(nk);
    out.cluster_ids.resize(nk);
    out.row_cohort.resize(nk);
    out.row_time.resize(nk);

    for (long idx = 0; idx < nk; ++idx) {
        const long i = rows[idx];
        y[idx] = std::log(panel.outcome[i]);
        out.cluster_ids[idx] = panel.unit_id[i];
        out.row_cohort[idx] = panel.cohort[i];
        out.row_time[idx] = panel.time[i];
        auto tc = time_col.find(panel.time[i]);
        if (tc != time_col.end()) X(idx, tc->second) = 1.0;
        for (int j = 0; j < n_cov; ++j) X(idx, n_time_dummies + j) = panel.covariates(i, j);
        const long c = panel.cohort[i];
        if (c != kNeverTreated) {
            const long r = panel.time[i] - c;
            if (r != -1) X(idx, n_time_dummies + n_cov + cell_col[{c, r}]) = 1.0;
        }
    }

    // Absorb unit fixed effects: subtract within-unit means from every
    // column and from the outcome (exact for one-way FE).
    std::unordered_map<long, std::vector<long>> unit_rows;
    for (long idx = 0; idx < nk; ++idx) unit_rows[out.cluster_ids[idx]].push_back(idx);
    out.n_units = static_cast<long>(unit_rows.size());
    for (const auto& [unit, idxs] : unit_rows) {
        Eigen::RowVectorXd xmean = Eigen::RowVectorXd::Zero(K);
        double ymean = 0.0;
        for (long idx : idxs) {
            xmean += X.row(idx);
            ymean += y[idx];
        }
        xmean /= static_cast<double>(idxs.size());
        ymean /= static_cast<double>(idxs.size());
        for (long idx : idxs) {
            X.row(idx) -= xmean;
            y[idx] -= ymean;
        }
    }

    out.design.values = std::move(X);
    for (size_t t = 1; t < time_list.size(); ++t)
        out.design.column_labels.push_back("t=" + std::to_string(time_list[t]));
    for (int j = 0; j < n_cov; ++j)
        out.design.column_labels.push_back(j < static_cast<int>(panel.covariate_names.size())
                                               ? panel.covariate_names[j]
                                               : "x" + std::to_string(j));
    for (int j = 0; j < n_cells; ++j) {
        out.design.column_labels.push_back(cell_label(out.cells[j]));
        out.design.treatment_columns.push_back(n_time_dummies + n_cov + j);
    }
    out.outcome = std::move(y);
    return out;
}

EffectEstimates fit_stagdid(const PanelDesign& panel_design) {
    const OlsFit fit = fit_ols(panel_design.design, panel_design.outcome);
    const CovMatrix cov = cluster_vcov(fit, panel_design.design, panel_design.cluster_ids);

    const int n_cells = panel_design.design.num_groups();
    const int offset = panel_design.design.treatment_columns.front();

    EffectEstimates effects;
    effects.tau_hat = fit.coefficients.segment(offset, n_cells);
    effects.cov_tau = cov.values.block(offset, offset, n_cells, n_cells);
    effects.clustered_cov = true;
    const long df = static_cast<long>(panel_design.outcome.size()) - panel_design.n_units -
                    (panel_design.n_times - 1) -
                    (panel_design.design.k() - (panel_design.n_times - 1) - n_cells) - n_cells;
    if (df < 1) throw SingularDesign("fit_stagdid: no residual degrees of freedom after absorption");
    effects.residual_df = static_cast<int>(df);
    return effects;
}

ShareEstimates aggregation_weights(const PanelDesign& panel_design, const AggregationSet& set) {
    if (set.members.empty()) throw EmptyAggregation("aggregation_weights: empty set");
    std::set<CellKey> estimated(panel_design.cells.begin(), panel_design.cells.end());
    std::map<CellKey, long> counts;
    for (const auto& cell : set.members) {
        if (!estimated.count(cell))
            throw EmptyAggregation("aggregation_weights: cell " + cell_label(cell) + " not estimated");
        counts[cell] = 0;
    }
    const long n = static_cast<long>(panel_design.row_cohort.size());
    for (long i = 0; i < n; ++i) {
        const long c = panel_design.row_cohort[i];
        if (c == kNeverTreated) continue;
        auto it = counts.find({c, panel_design.row_time[i] - c});
        if (it != counts.end()) ++it->second;
    }
    std::vector<long> ordered;
    for (const auto& cell : set.members) ordered.push_back(counts[cell]);
    return estimate_shares(ordered);
}

std::vector<AggregationSet> standard_aggregation_sets(const std::vector<CellKey>& cells) {
    std::vector<AggregationSet> sets;

    AggregationSet overall;
    overall.kind = AggregationKind::Overall;
    overall.label = "overall";
    for (const auto& cell : cells)
        if (cell.event_time >= 0) overall.members.push_back(cell);
    if (!overall.members.empty()) sets.push_back(overall);

    std::set<long> cohorts, event_times, calendars;
    for (const auto& cell : cells) {
        event_times.insert(cell.event_time);
        if (cell.event_time >= 0) {
            cohorts.insert(cell.cohort);
            calendars.insert(cell.cohort + cell.event_time);
        }
    }
    for (long c : cohorts) {
        AggregationSet set;
        set.kind = AggregationKind::Cohort;
        set.key = c;
        set.label = "cohort " + std::to_string(c);
        for (const auto& cell : cells)
            if (cell.cohort == c && cell.event_time >= 0) set.members.push_back(cell);
        sets.push_back(set);
    }
    for (long r : event_times) {
        AggregationSet set;
        set.kind = AggregationKind::EventTime;
        set.key = r;
        set.label = "event time " + std::to_string(r);
        for (const auto& cell : cells)
            if (cell.event_time == r) set.members.push_back(cell);
        sets.push_back(set);
    }
    for (long t : calendars) {
        AggregationSet set;
        set.kind = AggregationKind::Calendar;
        set.key = t;
        set.label = "calendar " + std::to_string(t);
        for (const auto& cell : cells)
            if (cell.event_time >= 0 && cell.cohort + cell.event_time == t) set.members.push_back(cell);
        sets.push_back(set);
    }
    return sets;
}

std::vector<AttRow> att_report(const EffectEstimates& effects, const PanelDesign& panel_design,
                               const std::vector<AggregationSet>& sets, double alpha) {
    std::map<CellKey, int> cell_index;
    for (size_t j = 0; j < panel_design.cells.size(); ++j)
        cell_index[panel_design.cells[j]] = static_cast<int>(j);

    std::vector<AttRow> rows;
    for (const auto& set : sets) {
        const int G = static_cast<int>(set.members.size());
        EffectEstimates sub;
        sub.tau_hat.resize(G);
        sub.cov_tau.resize(G, G);
        for (int i = 0; i < G; ++i) {
            const int gi = cell_index.at(set.members[i]);
            sub.tau_hat[i] = effects.tau_hat[gi];
            for (int j = 0; j < G; ++j)
                sub.cov_tau(i, j) = effects.cov_tau(gi, cell_index.at(set.members[j]));
        }
        sub.residual_df = effects.residual_df;
        sub.clustered_cov = effects.clustered_cov;

        AttRow row;
        row.set = set;
        row.homogeneous = (G == 1);
        const ShareEstimates shares = aggregation_weights(panel_design, set);
        row.points = point_estimates(shares, sub);
        row.inference = infer({shares, sub, alpha, 0.0});
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace pctate
