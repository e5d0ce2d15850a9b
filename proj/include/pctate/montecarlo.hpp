#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "pctate/errors.hpp"

namespace pctate {

enum class ErrorKind { Normal, SkewNormal };

struct SimConfig {
    long n = 1000;
    long reps = 1000;
    Eigen::Vector4d rho_true{-0.08, -0.04, 0.04, 0.08};
    double p_s = 0.2;
    Eigen::Vector4d w_true{0.25, 0.25, 0.25, 0.25};
    ErrorKind error_kind = ErrorKind::Normal;
    std::uint64_t base_seed = 20240501;
    double alpha = 0.05;

    void validate() const;
};

/// One synthetic draw of the semi-log design: a single covariate, a group
/// index per observation (0 = control, 1..4 = subgroup), and the log
/// outcome ln(y) = 1 + x + tau_g + eps.
struct SimSample {
    Eigen::VectorXd covariate;
    Eigen::VectorXd log_outcome;
    std::vector<int> group;
    std::array<long, 5> counts{};  // [0] control, [1..4] subgroups
};

SimSample dgp_sample(const SimConfig& config, std::uint64_t rep_index, std::uint64_t attempt = 0);

/// Per-replication estimator and test results (proportions, not x100).
struct RepResult {
    double tau_bar = 0.0;
    double rho_a = 0.0;
    double rho_b = 0.0;
    double rho_c = 0.0;
    double rho_d = 0.0;
    bool reject_z_tau = false;
    bool reject_z_mu = false;
    long redraws = 0;  // degenerate samples redrawn before this result
};

RepResult simulate_replication(const SimConfig& config, std::uint64_t rep_index);

/// Results for one (config.n, config.reps) cell: means and SDs of the five
/// estimators (proportions) and rejection rates in percent.
struct SimRow {
    long n = 0;
    long reps = 0;
    std::array<double, 5> mean{};  // tau_bar, rho_a, rho_b, rho_c, rho_d
    std::array<double, 5> sd{};
    double reject_rate_z_tau = 0.0;  // percent
    double reject_rate_z_mu = 0.0;   // percent
    long redraws = 0;
};

struct SimTable {
    double tau_bar_true = 0.0;
    double rho_a_true = 0.0;
    double rho_bar_true = 0.0;
    std::vector<SimRow> rows;
};

/// Analytic true values for a rho vector: tau_bar = sum w ln(1+rho),
/// rho_a = exp(tau_bar)-1, rho_bar = sum w rho.
void true_values(const SimConfig& config, double& tau_bar, double& rho_a_val, double& rho_bar);

/// Replications run in parallel (OpenMP) with per-replication seeding and an
/// ordered reduction, so the output is identical for any thread count.
SimRow run_cell(const SimConfig& config);

/// Serial reference implementation of run_cell, kept for testing and
/// benchmarking; must produce bit-identical results.
SimRow run_cell_serial(const SimConfig& config);

/// Runs run_cell over a grid of sample sizes with a shared config.
SimTable run_experiment(const SimConfig& config, const std::vector<long>& n_grid,
                        bool parallel = true);

}  // namespace pctate
