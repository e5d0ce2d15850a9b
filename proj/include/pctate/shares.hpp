#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pctate/errors.hpp"

namespace pctate {

/// Subgroup shares with their covariance. cov_w is the covariance of w_hat
/// itself (not the sqrt(N)-scaled asymptotic matrix).
struct ShareEstimates {
    Eigen::VectorXd w_hat;
    Eigen::MatrixXd cov_w;
    long n_treated = 0;                 // 0 when shares are externally fixed
    std::vector<long> group_counts;
    bool renormalized = false;          // fixed_shares had to rescale the input

    int num_groups() const { return static_cast<int>(w_hat.size()); }
};

/// w_hat_g = N_g / N_S with cov_w = (1/N_S) (diag(w) - w w').
ShareEstimates estimate_shares(const std::vector<long>& group_counts);

/// Externally-known weights treated as constants (zero covariance). Entries
/// must be positive; a sum off 1 by more than 1e-9 is renormalized with the
/// renormalized flag set.
ShareEstimates fixed_shares(const Eigen::VectorXd& w);

}  // namespace pctate
