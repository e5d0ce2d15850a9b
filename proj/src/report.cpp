#include "pctate/report.hpp"

#include <cstdio>
#include <sstream>

namespace pctate {

namespace {

using nlohmann::json;

std::string fmt(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

json interval_json(const Interval& iv, double scale) {
    return json::array({iv.lo * scale, iv.hi * scale});
}

std::string interval_text(const Interval& iv, double scale) {
    return "[" + fmt(iv.lo * scale) + ", " + fmt(iv.hi * scale) + "]";
}

}  // namespace

nlohmann::json estimate_report_json(const PointEstimates& points, const InferenceReport& inference,
                                    bool homogeneous, double alpha, double rho_0) {
    const double s = 100.0;
    json out;
    out["scaled_by_100"] = true;
    out["alpha"] = alpha;
    out["rho_null"] = rho_0 * s;
    out["homogeneous"] = homogeneous;
    out["tau_bar"] = points.tau_bar * s;
    out["rho_a"] = points.rho_a * s;
    out["rho_b"] = points.rho_b * s;
    out["rho_c"] = points.rho_c * s;
    out["rho_d"] = points.rho_d * s;
    out["rho_d_approximate"] = points.rho_d_approximate;
    out["se_tau_bar"] = inference.se_tau_bar * s;
    out["z_tau"] = inference.z_tau;
    out["z_a"] = inference.z_a;
    out["z_mu"] = inference.z_mu;
    out["ci_tau"] = interval_json(inference.ci_tau, s);
    out["ci_a"] = interval_json(inference.ci_a, s);
    out["ci_rho"] = interval_json(inference.ci_rho, s);
    if (inference.se_clamped) out["se_clamped"] = true;
    if (inference.sigma_mu_clamped) out["sigma_mu_clamped"] = true;
    return out;
}

std::string estimate_report_text(const PointEstimates& points, const InferenceReport& inference,
                                 bool homogeneous, double alpha) {
    const double s = 100.0;
    std::ostringstream out;
    const int level = static_cast<int>(100.0 * (1.0 - alpha) + 0.5);
    out << "Average treatment effect (percentage points)\n";
    out << "  tau_bar (log points x100): " << fmt(points.tau_bar * s) << "\n";
    if (homogeneous) {
        out << "  rho (exp transform):       " << fmt(points.rho_b * s)
            << "   (single group: rho_a = rho_b)\n";
    } else {
        out << "  rho_a (exp of average):    " << fmt(points.rho_a * s) << "\n";
        out << "  rho_b (average of exp):    " << fmt(points.rho_b * s) << "\n";
    }
    out << "  rho_c (smearing adj.):     " << fmt(points.rho_c * s) << "\n";
    out << "  rho_d (exact adj.):        " << fmt(points.rho_d * s)
        << (points.rho_d_approximate ? "   (approximate under clustering)" : "") << "\n";
    out << "Inference (alpha = " << fmt(alpha) << ")\n";
    out << "  se(tau_bar) x100:          " << fmt(inference.se_tau_bar * s) << "\n";
    out << "  z_tau:                     " << fmt(inference.z_tau) << "\n";
    out << "  z_a:                       " << fmt(inference.z_a) << "\n";
    out << "  z_mu:                      " << fmt(inference.z_mu) << "\n";
    out << "  " << level << "% CI tau_bar x100:       " << interval_text(inference.ci_tau, s)
        << "\n";
    if (!homogeneous)
        out << "  " << level << "% CI rho_a x100:         " << interval_text(inference.ci_a, s)
            << "\n";
    out << "  " << level << "% CI rho_bar x100:       " << interval_text(inference.ci_rho, s)
        << "\n";
    if (inference.se_clamped)
        out << "  note: delta-method variance clamped at zero\n";
    if (inference.sigma_mu_clamped)
        out << "  note: lognormal variance clamped at zero\n";
    return out.str();
}

namespace {

json att_row_json(const AttRow& row) {
    json j;
    j["label"] = row.set.label;
    j["cells"] = json::array();
    for (const auto& cell : row.set.members)
        j["cells"].push_back(json::array({cell.cohort, cell.event_time}));
    j["estimate"] = estimate_report_json(row.points, row.inference, row.homogeneous, 0.05, 0.0);
    return j;
}

const char* panel_title(AggregationKind kind) {
    switch (kind) {
        case AggregationKind::Overall: return "Overall average effect";
        case AggregationKind::Cohort: return "By cohort";
        case AggregationKind::EventTime: return "By event time";
        case AggregationKind::Calendar: return "By calendar time";
    }
    return "";
}

}  // namespace

nlohmann::json did_report_json(const std::vector<AttRow>& rows, double alpha) {
    json out;
    out["scaled_by_100"] = true;
    out["alpha"] = alpha;
    out["rows"] = json::array();
    for (const auto& row : rows) {
        json j = att_row_json(row);
        j["estimate"]["alpha"] = alpha;
        out["rows"].push_back(std::move(j));
    }
    return out;
}

std::string did_report_text(const std::vector<AttRow>& rows, double alpha) {
    const double s = 100.0;
    std::ostringstream out;
    const int level = static_cast<int>(100.0 * (1.0 - alpha) + 0.5);
    out << "Treatment effects in percentage points, " << level << "% confidence intervals\n";
    const AggregationKind panels[] = {AggregationKind::Overall, AggregationKind::Cohort,
                                      AggregationKind::EventTime, AggregationKind::Calendar};
    for (AggregationKind kind : panels) {
        bool header_done = false;
        for (const auto& row : rows) {
            if (row.set.kind != kind) continue;
            if (!header_done) {
                out << "\n" << panel_title(kind) << "\n";
                header_done = true;
            }
            out << "  " << row.set.label << ": rho = " << fmt(row.points.rho_b * s)
                << "  CI " << interval_text(row.inference.ci_rho, s)
                << "  z_mu = " << fmt(row.inference.z_mu) << "\n";
        }
    }
    return out.str();
}

nlohmann::json sim_table_json(const SimTable& table, const SimConfig& config) {
    json out;
    out["scaled_by_100"] = true;
    out["true"] = {{"tau_bar", table.tau_bar_true * 100.0},
                   {"rho_a", table.rho_a_true * 100.0},
                   {"rho_bar", table.rho_bar_true * 100.0}};
    out["config"] = {{"reps", config.reps},
                     {"p_s", config.p_s},
                     {"alpha", config.alpha},
                     {"base_seed", config.base_seed},
                     {"errors", config.error_kind == ErrorKind::Normal ? "normal" : "skew_normal"},
                     {"rho_true",
                      json::array({config.rho_true[0] * 100.0, config.rho_true[1] * 100.0,
                                   config.rho_true[2] * 100.0, config.rho_true[3] * 100.0})}};
    out["rows"] = json::array();
    const char* names[] = {"tau_bar", "rho_a", "rho_b", "rho_c", "rho_d"};
    for (const auto& row : table.rows) {
        json j;
        j["n"] = row.n;
        j["reps"] = row.reps;
        for (int k = 0; k < 5; ++k) {
            j["mean"][names[k]] = row.mean[k] * 100.0;
            j["sd"][names[k]] = row.sd[k] * 100.0;
        }
        j["reject_rate_z_tau"] = row.reject_rate_z_tau;
        j["reject_rate_z_mu"] = row.reject_rate_z_mu;
        j["redraws"] = row.redraws;
        out["rows"].push_back(std::move(j));
    }
    return out;
}

std::string sim_table_csv(const SimTable& table) {
    std::ostringstream out;
    out << "n,reps,mean_tau_bar,mean_rho_a,mean_rho_b,mean_rho_c,mean_rho_d,"
           "sd_tau_bar,sd_rho_a,sd_rho_b,sd_rho_c,sd_rho_d,"
           "reject_z_tau,reject_z_mu,redraws\n";
    out << "true,," << fmt(table.tau_bar_true * 100.0) << "," << fmt(table.rho_a_true * 100.0)
        << "," << fmt(table.rho_bar_true * 100.0) << "," << fmt(table.rho_bar_true * 100.0) << ","
        << fmt(table.rho_bar_true * 100.0) << ",,,,,,,,\n";
    for (const auto& row : table.rows) {
        out << row.n << "," << row.reps;
        for (int k = 0; k < 5; ++k) out << "," << fmt(row.mean[k] * 100.0);
        for (int k = 0; k < 5; ++k) out << "," << fmt(row.sd[k] * 100.0);
        out << "," << fmt(row.reject_rate_z_tau) << "," << fmt(row.reject_rate_z_mu) << ","
            << row.redraws << "\n";
    }
    return out.str();
}

}  // namespace pctate
