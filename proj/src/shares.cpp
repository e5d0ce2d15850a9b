#include "pctate/shares.hpp"

#include <cmath>

namespace pctate {

ShareEstimates estimate_shares(const std::vector<long>& group_counts) {
    const int G = static_cast<int>(group_counts.size());
    if (G == 0) throw EmptyInput("estimate_shares: no groups");

    long n_treated = 0;
    for (int g = 0; g < G; ++g) {
        if (group_counts[g] <= 0)
            throw MissingGroup("estimate_shares: group " + std::to_string(g) + " has zero count");
        n_treated += group_counts[g];
    }

    ShareEstimates shares;
    shares.group_counts = group_counts;
    shares.n_treated = n_treated;
    shares.w_hat.resize(G);
    for (int g = 0; g < G; ++g)
        shares.w_hat[g] = static_cast<double>(group_counts[g]) / static_cast<double>(n_treated);

    const Eigen::MatrixXd outer = shares.w_hat * shares.w_hat.transpose();
    shares.cov_w = (Eigen::MatrixXd(shares.w_hat.asDiagonal()) - outer) / static_cast<double>(n_treated);
    return shares;
}

ShareEstimates fixed_shares(const Eigen::VectorXd& w) {
    const int G = static_cast<int>(w.size());
    if (G == 0) throw EmptyInput("fixed_shares: no groups");
    for (int g = 0; g < G; ++g)
        if (!(w[g] > 0.0)) throw InvalidShare("fixed_shares: nonpositive share at index " + std::to_string(g));

    ShareEstimates shares;
    shares.n_treated = 0;
    const double total = w.sum();
    shares.renormalized = std::fabs(total - 1.0) > 1e-9;
    shares.w_hat = w / total;
    shares.cov_w = Eigen::MatrixXd::Zero(G, G);
    return shares;
}

}  // namespace pctate
