#pragma once

#include <Eigen/Dense>

#include "pctate/errors.hpp"
#include "pctate/shares.hpp"

namespace pctate {

/// Subgroup effects in log points with the covariance of tau_hat and the
/// residual degrees of freedom behind its variance estimates.
struct EffectEstimates {
    Eigen::VectorXd tau_hat;
    Eigen::MatrixXd cov_tau;
    int residual_df = 0;
    bool clustered_cov = false;  // covariance came from cluster_vcov

    int num_groups() const { return static_cast<int>(tau_hat.size()); }
};

/// The five point estimators, as unitless proportions (x100 = percentage
/// points; that scaling is applied only at serialization).
struct PointEstimates {
    double tau_bar = 0.0;
    double rho_a = 0.0;
    double rho_b = 0.0;
    double rho_c = 0.0;
    double rho_d = 0.0;
    // rho_d's unbiasedness argument presumes iid normal errors; a clustered
    // covariance is outside that case, so the value is annotated approximate.
    bool rho_d_approximate = false;
};

double ate_log(const ShareEstimates& shares, const EffectEstimates& effects);
double rho_a(double tau_bar);
double rho_b(const ShareEstimates& shares, const EffectEstimates& effects);
double rho_c(const ShareEstimates& shares, const EffectEstimates& effects);
double rho_d(const ShareEstimates& shares, const EffectEstimates& effects);

/// Confluent hypergeometric limit function 0F1(a; b) = sum b^n / ((a)_n n!),
/// evaluated by term recurrence. Requires a > 0.
double hyp0f1(double a, double b);

PointEstimates point_estimates(const ShareEstimates& shares, const EffectEstimates& effects);

}  // namespace pctate
