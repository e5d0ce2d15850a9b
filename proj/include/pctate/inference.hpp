#pragma once

#include <Eigen/Dense>
#include <utility>

#include "pctate/errors.hpp"
#include "pctate/estimators.hpp"
#include "pctate/shares.hpp"

namespace pctate {

struct InferenceInput {
    ShareEstimates shares;
    EffectEstimates effects;
    double alpha = 0.05;
    double rho_0 = 0.0;  // null value for rho; must be > -1
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct InferenceReport {
    double se_tau_bar = 0.0;
    double mu_hat = 0.0;
    double sigma_mu2_hat = 0.0;
    double z_tau = 0.0;
    double z_a = 0.0;
    double z_mu = 0.0;
    Interval ci_tau;
    Interval ci_a;
    Interval ci_rho;
    bool se_clamped = false;        // delta-method radicand went negative
    bool sigma_mu_clamped = false;  // quadratic-form ratio dipped below 1
};

/// Standard normal quantile (Acklam rational approximation plus one Halley
/// refinement; absolute error well below 1e-9).
double normal_quantile(double p);

/// Delta-method SE of w'tau under block-diagonal covariance:
/// sqrt(w' Cov_tau w + tau' Cov_w tau). A negative radicand is clamped to 0
/// and flagged via the optional out-parameter.
double se_tau_bar(const ShareEstimates& shares, const EffectEstimates& effects,
                  bool* clamped = nullptr);

/// eta_g = ln(w_g) + tau_g - var_w_g / (2 w_g^2) - var_tau_g / 2.
Eigen::VectorXd eta_hat(const ShareEstimates& shares, const EffectEstimates& effects);

/// Log-sum-exp of eta with max-shift stabilization.
double mu_hat(const Eigen::VectorXd& eta);

/// Fenton-Wilkinson variance: builds Sigma_eta = diag(w)^-1 Cov_w diag(w)^-1
/// + Cov_tau, applies the element-wise exponential, and returns the log of
/// the quadratic-form ratio with exp(eta) as the weight vector. A ratio
/// below 1 (possible numerically with negative off-diagonals) is clamped to
/// 0 and flagged.
double sigma_mu2_hat(const ShareEstimates& shares, const EffectEstimates& effects,
                     const Eigen::VectorXd& eta, bool* clamped = nullptr);

double z_mu(double mu, double sigma_mu2, double rho_0);

Interval ci_rho(double mu, double sigma_mu2, double alpha);

/// Runs the full battery: z_tau, z_a, z_mu and the three confidence
/// intervals.
InferenceReport infer(const InferenceInput& input);

}  // namespace pctate
