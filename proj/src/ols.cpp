#include "pctate/ols.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace pctate {

DesignMatrix build_design(const Eigen::MatrixXd& covariates,
                          const std::vector<std::string>& covariate_names,
                          const std::vector<std::string>& subgroup_labels,
                          const std::string& control_label,
                          bool intercept,
                          const std::vector<std::string>& declared_groups) {
    const auto n = static_cast<Eigen::Index>(subgroup_labels.size());
    if (n == 0) throw EmptyInput("build_design: no rows");
    if (covariates.rows() != 0 && covariates.rows() != n)
        throw DimensionError("build_design: covariate rows do not match subgroup labels");
    if (static_cast<Eigen::Index>(covariate_names.size()) != covariates.cols())
        throw DimensionError("build_design: covariate name count does not match columns");

    std::set<std::string> distinct;
    for (const auto& label : subgroup_labels)
        if (label != control_label) distinct.insert(label);

    std::vector<std::string> groups;
    if (!declared_groups.empty()) {
        for (const auto& g : declared_groups)
            if (!distinct.count(g)) throw MissingGroup("build_design: no rows for group '" + g + "'");
        groups = declared_groups;
    } else {
        if (distinct.empty()) throw MissingGroup("build_design: all rows are control, no treatment groups");
        groups.assign(distinct.begin(), distinct.end());
    }

    std::map<std::string, int> group_index;
    for (int g = 0; g < static_cast<int>(groups.size()); ++g) group_index[groups[g]] = g;

    const int kx = static_cast<int>(covariates.cols()) + (intercept ? 1 : 0);
    const int G = static_cast<int>(groups.size());

    DesignMatrix design;
    design.values = Eigen::MatrixXd::Zero(n, kx + G);
    int col = 0;
    if (intercept) {
        design.values.col(col).setOnes();
        design.column_labels.push_back("(intercept)");
        ++col;
    }
    for (Eigen::Index j = 0; j < covariates.cols(); ++j) {
        design.values.col(col) = covariates.col(j);
        design.column_labels.push_back(covariate_names[j]);
        ++col;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& label = subgroup_labels[i];
        if (label == control_label) continue;
        auto it = group_index.find(label);
        if (it == group_index.end())
            throw MissingGroup("build_design: undeclared group label '" + label + "'");
        design.values(i, kx + it->second) = 1.0;
    }
    for (int g = 0; g < G; ++g) {
        design.column_labels.push_back(groups[g]);
        design.treatment_columns.push_back(kx + g);
    }
    return design;
}

OlsFit fit_ols(const DesignMatrix& design, const Eigen::VectorXd& outcome) {
    const auto& X = design.values;
    const auto N = X.rows();
    const auto K = X.cols();
    if (outcome.size() != N) throw DimensionError("fit_ols: outcome length does not match design");
    if (N < K) throw SingularDesign("fit_ols: fewer rows than columns");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    const auto rank = qr.rank();
    if (rank < K) {
        // Pivot order puts the dependent columns last.
        std::ostringstream msg;
        msg << "fit_ols: rank-deficient design, redundant columns:";
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index j = rank; j < K; ++j)
            msg << " " << design.column_labels[perm[j]];
        throw SingularDesign(msg.str());
    }

    OlsFit fit;
    fit.coefficients = qr.solve(outcome);
    fit.residuals = outcome - X * fit.coefficients;
    // Exact interpolation (N == K) is allowed; only variance estimates that
    // divide by the residual df must reject it downstream.
    fit.residual_df = static_cast<int>(N - rank);
    fit.sigma2_hat =
        fit.residual_df > 0 ? fit.residuals.squaredNorm() / fit.residual_df : 0.0;

    // X P = Q R  =>  (X'X)^-1 = P R^-1 R^-T P'
    Eigen::MatrixXd rinv = qr.matrixR()
                               .topLeftCorner(K, K)
                               .triangularView<Eigen::Upper>()
                               .solve(Eigen::MatrixXd::Identity(K, K));
    const auto& P = qr.colsPermutation();
    fit.xtx_inverse = P * (rinv * rinv.transpose()) * P.transpose();
    return fit;
}

CovMatrix hc0_vcov(const OlsFit& fit, const DesignMatrix& design) {
    const auto& X = design.values;
    const Eigen::VectorXd e2 = fit.residuals.array().square();
    Eigen::MatrixXd meat = X.transpose() * e2.asDiagonal() * X;
    CovMatrix cov;
    cov.kind = CovKind::HC0;
    cov.values = fit.xtx_inverse * meat * fit.xtx_inverse;
    cov.values = 0.5 * (cov.values + cov.values.transpose().eval());
    return cov;
}

CovMatrix cluster_vcov(const OlsFit& fit, const DesignMatrix& design,
                       const std::vector<long>& cluster_ids) {
    const auto& X = design.values;
    const auto N = X.rows();
    const auto K = X.cols();
    if (static_cast<Eigen::Index>(cluster_ids.size()) != N)
        throw DimensionError("cluster_vcov: cluster id length does not match design");

    std::map<long, Eigen::VectorXd> scores;  // X_c' e_c per cluster
    for (Eigen::Index i = 0; i < N; ++i) {
        auto [it, inserted] = scores.try_emplace(cluster_ids[i], Eigen::VectorXd::Zero(K));
        it->second += X.row(i).transpose() * fit.residuals[i];
    }
    const auto C = static_cast<double>(scores.size());
    if (scores.size() < 2) throw DegenerateClusters("cluster_vcov: fewer than 2 clusters");

    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(K, K);
    for (const auto& [id, s] : scores) meat += s * s.transpose();

    const double c = (C / (C - 1.0)) * ((static_cast<double>(N) - 1.0) / (static_cast<double>(N) - static_cast<double>(K)));
    CovMatrix cov;
    cov.kind = CovKind::CR1;
    cov.values = c * fit.xtx_inverse * meat * fit.xtx_inverse;
    cov.values = 0.5 * (cov.values + cov.values.transpose().eval());
    return cov;
}

CovMatrix classical_vcov(const OlsFit& fit) {
    if (fit.residual_df < 1)
        throw NumericalError("classical_vcov: no residual degrees of freedom");
    CovMatrix cov;
    cov.kind = CovKind::Classical;
    cov.values = fit.sigma2_hat * fit.xtx_inverse;
    return cov;
}

}  // namespace pctate
