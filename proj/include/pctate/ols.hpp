#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "pctate/errors.hpp"

namespace pctate {

/// Design matrix [X, D] where the columns listed in treatment_columns are the
/// G mutually exclusive subgroup dummies.
struct DesignMatrix {
    Eigen::MatrixXd values;
    std::vector<std::string> column_labels;
    std::vector<int> treatment_columns;

    int n() const { return static_cast<int>(values.rows()); }
    int k() const { return static_cast<int>(values.cols()); }
    int num_groups() const { return static_cast<int>(treatment_columns.size()); }
};

struct OlsFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd residuals;
    Eigen::MatrixXd xtx_inverse;
    int residual_df = 0;        // m = N - rank
    double sigma2_hat = 0.0;    // e'e / m
};

enum class CovKind { HC0, CR1, Classical };

struct CovMatrix {
    Eigen::MatrixXd values;
    CovKind kind = CovKind::HC0;
};

/// Builds [X, D] from a numeric covariate block and a subgroup label per row.
/// Rows labelled `control_label` get all-zero dummies. Group columns are one
/// per distinct non-control label, in sorted order. If `declared_groups` is
/// non-empty, every declared group must be present in the data.
DesignMatrix build_design(const Eigen::MatrixXd& covariates,
                          const std::vector<std::string>& covariate_names,
                          const std::vector<std::string>& subgroup_labels,
                          const std::string& control_label = "control",
                          bool intercept = true,
                          const std::vector<std::string>& declared_groups = {});

/// Least squares via column-pivoted QR. Throws SingularDesign naming the
/// redundant columns when the design is rank deficient.
OlsFit fit_ols(const DesignMatrix& design, const Eigen::VectorXd& outcome);

/// HC0 sandwich: (X'X)^-1 (sum_i x_i x_i' e_i^2) (X'X)^-1. This is the
/// finite-sample covariance of the coefficient vector itself.
CovMatrix hc0_vcov(const OlsFit& fit, const DesignMatrix& design);

/// CR1 cluster-robust sandwich with small-sample factor
/// c = [C/(C-1)] * [(N-1)/(N-K)].
CovMatrix cluster_vcov(const OlsFit& fit, const DesignMatrix& design,
                       const std::vector<long>& cluster_ids);

/// Classical covariance sigma2_hat * (X'X)^-1 (iid errors).
CovMatrix classical_vcov(const OlsFit& fit);

}  // namespace pctate
