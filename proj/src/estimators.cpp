#include "pctate/estimators.hpp"

#include <cmath>

namespace pctate {

namespace {

void check_dims(const ShareEstimates& shares, const EffectEstimates& effects) {
    if (shares.num_groups() != effects.num_groups())
        throw DimensionError("share and effect vectors have different lengths");
}

}  // namespace

double ate_log(const ShareEstimates& shares, const EffectEstimates& effects) {
    check_dims(shares, effects);
    return shares.w_hat.dot(effects.tau_hat);
}

double rho_a(double tau_bar) { return std::expm1(tau_bar); }

double rho_b(const ShareEstimates& shares, const EffectEstimates& effects) {
    check_dims(shares, effects);
    return (shares.w_hat.array() * effects.tau_hat.array().exp()).sum() - 1.0;
}

double rho_c(const ShareEstimates& shares, const EffectEstimates& effects) {
    check_dims(shares, effects);
    double acc = 0.0;
    for (int g = 0; g < effects.num_groups(); ++g) {
        const double var = effects.cov_tau(g, g);
        if (var < 0.0) throw InvalidCovariance("rho_c: negative variance for group " + std::to_string(g));
        acc += shares.w_hat[g] * std::exp(effects.tau_hat[g] - 0.5 * var);
    }
    return acc - 1.0;
}

double hyp0f1(double a, double b) {
    if (!(a > 0.0)) throw InputError("hyp0f1: requires a > 0");
    // Term recurrence t_{n+1} = t_n * b / ((a+n)(n+1)); compensated summation
    // guards the partial sums. Converges in a few dozen terms for |b|/a <= 1.
    double sum = 1.0;
    double comp = 0.0;
    double term = 1.0;
    int quiet = 0;
    for (long n = 0; n < 1000000; ++n) {
        term *= b / ((a + static_cast<double>(n)) * (static_cast<double>(n) + 1.0));
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if (std::fabs(term) <= 1e-15 * std::fabs(sum)) {
            if (++quiet >= 3) return sum;
        } else {
            quiet = 0;
        }
    }
    throw ConvergenceError("hyp0f1: series did not converge within 1e6 terms");
}

double rho_d(const ShareEstimates& shares, const EffectEstimates& effects) {
    check_dims(shares, effects);
    const double m = static_cast<double>(effects.residual_df);
    if (effects.residual_df < 1) throw InvalidCovariance("rho_d: residual_df must be >= 1");
    double acc = 0.0;
    for (int g = 0; g < effects.num_groups(); ++g) {
        const double var = effects.cov_tau(g, g);
        if (var < 0.0) throw InvalidCovariance("rho_d: negative variance for group " + std::to_string(g));
        acc += shares.w_hat[g] * std::exp(effects.tau_hat[g]) * hyp0f1(m / 2.0, -(m / 2.0) * var / 2.0);
    }
    return acc - 1.0;
}

PointEstimates point_estimates(const ShareEstimates& shares, const EffectEstimates& effects) {
    PointEstimates points;
    points.tau_bar = ate_log(shares, effects);
    points.rho_a = rho_a(points.tau_bar);
    points.rho_b = rho_b(shares, effects);
    points.rho_c = rho_c(shares, effects);
    points.rho_d = rho_d(shares, effects);
    points.rho_d_approximate = effects.clustered_cov;
    return points;
}

}  // namespace pctate
