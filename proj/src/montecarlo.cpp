#include "pctate/montecarlo.hpp"

#include <cmath>

#include "pctate/estimators.hpp"
#include "pctate/inference.hpp"
#include "pctate/ols.hpp"
#include "pctate/rng.hpp"
#include "pctate/shares.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pctate {

void SimConfig::validate() const {
    if (n < 20) throw InputError("SimConfig: N must be >= 20");
    if (reps < 1) throw InputError("SimConfig: reps must be >= 1");
    if (!(p_s > 0.0 && p_s < 1.0)) throw InputError("SimConfig: p_s must be in (0,1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("SimConfig: alpha must be in (0,1)");
    for (int g = 0; g < 4; ++g)
        if (!(w_true[g] > 0.0)) throw InputError("SimConfig: w_true must be positive");
    if (std::fabs(w_true.sum() - 1.0) > 1e-9) throw InputError("SimConfig: w_true must sum to 1");
    for (int g = 0; g < 4; ++g)
        if (!(rho_true[g] > -1.0)) throw InputError("SimConfig: rho_true must be > -1");
}

SimSample dgp_sample(const SimConfig& config, std::uint64_t rep_index, std::uint64_t attempt) {
    Rng rng = Rng::for_replication(config.base_seed, rep_index, attempt);
    const long n = config.n;
    Eigen::Vector4d tau;
    for (int g = 0; g < 4; ++g) tau[g] = std::log1p(config.rho_true[g]);

    SimSample sample;
    sample.covariate.resize(n);
    sample.log_outcome.resize(n);
    sample.group.resize(n);

    for (long i = 0; i < n; ++i) {
        // Categorical assignment: control w.p. 1 - p_s, subgroup g w.p. p_s w_g.
        const double u = rng.uniform();
        int group = 0;
        if (u >= 1.0 - config.p_s) {
            double edge = 1.0 - config.p_s;
            for (int g = 0; g < 4; ++g) {
                edge += config.p_s * config.w_true[g];
                if (u < edge || g == 3) {
                    group = g + 1;
                    break;
                }
            }
        }
        sample.group[i] = group;
        ++sample.counts[group];

        const double x = rng.normal();
        const double eps = config.error_kind == ErrorKind::Normal ? rng.normal() : rng.skew_normal();
        sample.covariate[i] = x;
        sample.log_outcome[i] = 1.0 + x + (group > 0 ? tau[group - 1] : 0.0) + eps;
    }
    return sample;
}

namespace {

RepResult estimate_once(const SimConfig& config, const SimSample& sample) {
    const long n = config.n;
    DesignMatrix design;
    design.values = Eigen::MatrixXd::Zero(n, 6);
    design.values.col(0).setOnes();
    design.values.col(1) = sample.covariate;
    for (long i = 0; i < n; ++i)
        if (sample.group[i] > 0) design.values(i, 1 + sample.group[i]) = 1.0;
    design.column_labels = {"(intercept)", "x", "g1", "g2", "g3", "g4"};
    design.treatment_columns = {2, 3, 4, 5};

    const OlsFit fit = fit_ols(design, sample.log_outcome);
    const CovMatrix cov = hc0_vcov(fit, design);

    EffectEstimates effects;
    effects.tau_hat = fit.coefficients.segment(2, 4);
    effects.cov_tau = cov.values.block(2, 2, 4, 4);
    effects.residual_df = fit.residual_df;

    const ShareEstimates shares = estimate_shares(
        {sample.counts[1], sample.counts[2], sample.counts[3], sample.counts[4]});

    RepResult rep;
    rep.tau_bar = ate_log(shares, effects);
    rep.rho_a = rho_a(rep.tau_bar);
    rep.rho_b = rho_b(shares, effects);
    rep.rho_c = rho_c(shares, effects);
    rep.rho_d = rho_d(shares, effects);

    const double crit = -normal_quantile(config.alpha / 2.0);
    const double se = se_tau_bar(shares, effects);
    rep.reject_z_tau = std::fabs(rep.tau_bar / se) > crit;

    const Eigen::VectorXd eta = eta_hat(shares, effects);
    const double mu = mu_hat(eta);
    const double sigma2 = sigma_mu2_hat(shares, effects, eta);
    rep.reject_z_mu = std::fabs(z_mu(mu, sigma2, 0.0)) > crit;
    return rep;
}

}  // namespace

RepResult simulate_replication(const SimConfig& config, std::uint64_t rep_index) {
    long redraws = 0;
    for (std::uint64_t attempt = 0;; ++attempt) {
        const SimSample sample = dgp_sample(config, rep_index, attempt);
        bool degenerate = false;
        for (long count : sample.counts)
            if (count == 0) degenerate = true;
        if (!degenerate) {
            try {
                RepResult rep = estimate_once(config, sample);
                rep.redraws = redraws;
                return rep;
            } catch (const SingularDesign&) {
                degenerate = true;  // collinear draw, treat like an empty group
            }
        }
        ++redraws;
        if (redraws > 1000)
            throw NumericalError("simulate_replication: persistent degenerate draws");
    }
}

namespace {

SimRow reduce_cell(const SimConfig& config, const std::vector<RepResult>& reps) {
    SimRow row;
    row.n = config.n;
    row.reps = config.reps;

    // Ordered reduction in replication index order: the result does not
    // depend on how replications were scheduled.
    std::array<double, 5> sum{};
    long rej_tau = 0, rej_mu = 0;
    for (const auto& rep : reps) {
        const std::array<double, 5> v{rep.tau_bar, rep.rho_a, rep.rho_b, rep.rho_c, rep.rho_d};
        for (int j = 0; j < 5; ++j) sum[j] += v[j];
        rej_tau += rep.reject_z_tau ? 1 : 0;
        rej_mu += rep.reject_z_mu ? 1 : 0;
        row.redraws += rep.redraws;
    }
    const double r = static_cast<double>(config.reps);
    for (int j = 0; j < 5; ++j) row.mean[j] = sum[j] / r;

    std::array<double, 5> ss{};
    for (const auto& rep : reps) {
        const std::array<double, 5> v{rep.tau_bar, rep.rho_a, rep.rho_b, rep.rho_c, rep.rho_d};
        for (int j = 0; j < 5; ++j) {
            const double d = v[j] - row.mean[j];
            ss[j] += d * d;
        }
    }
    for (int j = 0; j < 5; ++j)
        row.sd[j] = config.reps > 1 ? std::sqrt(ss[j] / (r - 1.0)) : 0.0;
    row.reject_rate_z_tau = 100.0 * static_cast<double>(rej_tau) / r;
    row.reject_rate_z_mu = 100.0 * static_cast<double>(rej_mu) / r;
    return row;
}

}  // namespace

SimRow run_cell(const SimConfig& config) {
    config.validate();
    std::vector<RepResult> reps(config.reps);
#pragma omp parallel for schedule(dynamic, 16)
    for (long rep = 0; rep < config.reps; ++rep)
        reps[rep] = simulate_replication(config, static_cast<std::uint64_t>(rep));
    return reduce_cell(config, reps);
}

SimRow run_cell_serial(const SimConfig& config) {
    config.validate();
    std::vector<RepResult> reps(config.reps);
    for (long rep = 0; rep < config.reps; ++rep)
        reps[rep] = simulate_replication(config, static_cast<std::uint64_t>(rep));
    return reduce_cell(config, reps);
}

void true_values(const SimConfig& config, double& tau_bar, double& rho_a_val, double& rho_bar) {
    tau_bar = 0.0;
    rho_bar = 0.0;
    for (int g = 0; g < 4; ++g) {
        tau_bar += config.w_true[g] * std::log1p(config.rho_true[g]);
        rho_bar += config.w_true[g] * config.rho_true[g];
    }
    rho_a_val = std::expm1(tau_bar);
}

SimTable run_experiment(const SimConfig& config, const std::vector<long>& n_grid, bool parallel) {
    SimTable table;
    true_values(config, table.tau_bar_true, table.rho_a_true, table.rho_bar_true);
    for (long n : n_grid) {
        SimConfig cell = config;
        cell.n = n;
        table.rows.push_back(parallel ? run_cell(cell) : run_cell_serial(cell));
    }
    return table;
}

}  // namespace pctate
