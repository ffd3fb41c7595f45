// nnls.hpp
// Lawson-Hanson active-set solver for min ||A x - b|| subject to x >= 0.

#pragma once

#include <Eigen/Dense>

#include <limits>
#include <vector>

namespace oscunruh {

struct NnlsResult {
    Eigen::VectorXd x;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

inline NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iterations = 0,
                       double tol = 0.0) {
    const Eigen::Index n = a.cols();
    if (max_iterations <= 0) max_iterations = static_cast<int>(3 * n + 30);
    if (tol <= 0.0)
        tol = 10.0 * std::numeric_limits<double>::epsilon() * a.cwiseAbs().maxCoeff() *
              static_cast<double>(std::max(a.rows(), a.cols()));

    NnlsResult out;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(n, false);

    auto solve_passive = [&](Eigen::VectorXd& z) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index j = 0; j < n; ++j)
            if (passive[j]) idx.push_back(j);
        Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) ap.col(k) = a.col(idx[k]);
        const Eigen::VectorXd zp = ap.colPivHouseholderQr().solve(b);
        z.setZero(n);
        for (std::size_t k = 0; k < idx.size(); ++k) z(idx[k]) = zp(k);
    };

    Eigen::VectorXd w = a.transpose() * (b - a * x);
    int iter = 0;
    while (iter < max_iterations) {
        Eigen::Index best = -1;
        double best_w = tol;
        for (Eigen::Index j = 0; j < n; ++j)
            if (!passive[j] && w(j) > best_w) {
                best_w = w(j);
                best = j;
            }
        if (best < 0) {
            out.converged = true;
            break;
        }
        passive[best] = true;

        Eigen::VectorXd z;
        while (true) {
            ++iter;
            solve_passive(z);
            bool feasible = true;
            for (Eigen::Index j = 0; j < n; ++j)
                if (passive[j] && z(j) <= 0.0) feasible = false;
            if (feasible) break;
            // Step back towards x until the first passive variable hits zero.
            double alpha = 1.0;
            for (Eigen::Index j = 0; j < n; ++j)
                if (passive[j] && z(j) <= 0.0) alpha = std::min(alpha, x(j) / (x(j) - z(j)));
            x += alpha * (z - x);
            for (Eigen::Index j = 0; j < n; ++j)
                if (passive[j] && x(j) <= tol) {
                    passive[j] = false;
                    x(j) = 0.0;
                }
            if (iter >= max_iterations) break;
        }
        x = z;
        for (Eigen::Index j = 0; j < n; ++j)
            if (!passive[j]) x(j) = 0.0;
        w = a.transpose() * (b - a * x);
    }
    out.x = x;
    out.residual_norm = (a * x - b).norm();
    out.iterations = iter;
    return out;
}

}  // namespace oscunruh
