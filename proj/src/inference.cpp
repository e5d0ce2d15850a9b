#include "pctate/inference.hpp"

#include <cmath>

namespace pctate {

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / 1.4142135623730950488016887242097); }

double normal_pdf(double x) { return 0.3989422804014326779399460599344 * std::exp(-0.5 * x * x); }

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("normal_quantile: p must be in (0,1)");

    // Acklam's rational approximation.
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                               1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                               6.680131188771972e+01,  -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                               -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                               3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // One Halley step against the exact CDF.
    const double e = normal_cdf(x) - p;
    const double u = e / normal_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double se_tau_bar(const ShareEstimates& shares, const EffectEstimates& effects, bool* clamped) {
    if (shares.num_groups() != effects.num_groups())
        throw DimensionError("se_tau_bar: dimension mismatch");
    double radicand = shares.w_hat.dot(effects.cov_tau * shares.w_hat) +
                      effects.tau_hat.dot(shares.cov_w * effects.tau_hat);
    if (clamped) *clamped = false;
    if (radicand < 0.0) {
        radicand = 0.0;
        if (clamped) *clamped = true;
    }
    return std::sqrt(radicand);
}

Eigen::VectorXd eta_hat(const ShareEstimates& shares, const EffectEstimates& effects) {
    const int G = shares.num_groups();
    if (G != effects.num_groups()) throw DimensionError("eta_hat: dimension mismatch");
    Eigen::VectorXd eta(G);
    for (int g = 0; g < G; ++g) {
        const double w = shares.w_hat[g];
        if (!(w > 0.0)) throw InvalidShare("eta_hat: nonpositive share at index " + std::to_string(g));
        eta[g] = std::log(w) + effects.tau_hat[g] - 0.5 * shares.cov_w(g, g) / (w * w) -
                 0.5 * effects.cov_tau(g, g);
    }
    return eta;
}

double mu_hat(const Eigen::VectorXd& eta) {
    const double shift = eta.maxCoeff();
    return shift + std::log((eta.array() - shift).exp().sum());
}

double sigma_mu2_hat(const ShareEstimates& shares, const EffectEstimates& effects,
                     const Eigen::VectorXd& eta, bool* clamped) {
    const int G = shares.num_groups();
    Eigen::VectorXd winv = shares.w_hat.cwiseInverse();
    Eigen::MatrixXd sigma_eta =
        winv.asDiagonal() * shares.cov_w * winv.asDiagonal() + effects.cov_tau;

    // Weight vector exp(eta), shift-stabilized; the shift cancels in the ratio.
    const double shift = eta.maxCoeff();
    Eigen::VectorXd a = (eta.array() - shift).exp();

    // Element-wise exponential of the covariance matrix (multivariate
    // log-normal second moment), not a matrix exponential.
    const double numerator = a.dot(sigma_eta.array().exp().matrix() * a);
    const double s = a.sum();
    const double ratio = numerator / (s * s);
    if (clamped) *clamped = false;
    if (ratio <= 1.0) {
        if (ratio < 1.0 - 1e-15 && clamped) *clamped = true;
        return 0.0;
    }
    return std::log(ratio);
}

double z_mu(double mu, double sigma_mu2, double rho_0) {
    if (!(rho_0 > -1.0)) throw InputError("z_mu: rho_0 must be > -1");
    if (!(sigma_mu2 > 0.0)) throw DegenerateInference("z_mu: zero variance");
    const double mu_0 = std::log1p(rho_0);
    return (mu + 0.5 * sigma_mu2 - mu_0) / std::sqrt(sigma_mu2);
}

Interval ci_rho(double mu, double sigma_mu2, double alpha) {
    if (sigma_mu2 < 0.0) throw DegenerateInference("ci_rho: negative variance");
    const double z = normal_quantile(alpha / 2.0);  // negative
    const double sigma = std::sqrt(sigma_mu2);
    const double center = mu + 0.5 * sigma_mu2;
    return {std::expm1(center + z * sigma), std::expm1(center - z * sigma)};
}

InferenceReport infer(const InferenceInput& input) {
    if (!(input.alpha > 0.0 && input.alpha < 1.0)) throw InputError("infer: alpha must be in (0,1)");
    if (!(input.rho_0 > -1.0)) throw InputError("infer: rho_0 must be > -1");

    InferenceReport report;
    report.se_tau_bar = se_tau_bar(input.shares, input.effects, &report.se_clamped);
    if (!(report.se_tau_bar > 0.0)) throw DegenerateInference("infer: zero SE for tau_bar");

    const double tau_bar = ate_log(input.shares, input.effects);
    const double z = normal_quantile(input.alpha / 2.0);  // negative
    report.z_tau = (tau_bar - input.rho_0) / report.se_tau_bar;
    report.ci_tau = {tau_bar + report.se_tau_bar * z, tau_bar - report.se_tau_bar * z};
    report.z_a = (tau_bar - std::log1p(input.rho_0)) / report.se_tau_bar;
    report.ci_a = {std::expm1(report.ci_tau.lo), std::expm1(report.ci_tau.hi)};

    const Eigen::VectorXd eta = eta_hat(input.shares, input.effects);
    report.mu_hat = mu_hat(eta);
    report.sigma_mu2_hat =
        sigma_mu2_hat(input.shares, input.effects, eta, &report.sigma_mu_clamped);
    report.z_mu = z_mu(report.mu_hat, report.sigma_mu2_hat, input.rho_0);
    report.ci_rho = ci_rho(report.mu_hat, report.sigma_mu2_hat, input.alpha);
    return report;
}

}  // namespace pctate
