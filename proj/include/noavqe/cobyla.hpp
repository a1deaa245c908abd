#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "noavqe/core.hpp"

namespace noavqe {

struct MinimizeOptions {
    int max_evaluations = 1000;
    double rho_begin = 1.0;
    double rho_end = 1e-6;
};

struct MinimizeResult {
    std::vector<double> x;
    double f = std::numeric_limits<double>::infinity();
    std::vector<double> trace; // objective value of every evaluation, in order
    int evaluations = 0;
    bool converged = false; // trust radius reached rho_end before the evaluation cap
};

inline constexpr const char *kOptimizerName = "cobyla-unconstrained (linear-interpolation trust region)";

/// Derivative-free minimization in the COBYLA family (unconstrained case).
///
/// Keeps a simplex of n+1 interpolation points, fits the linear model through
/// them and steps to the model minimizer on the trust-region sphere of radius
/// rho. Poor steps trigger either a geometry-restoring step (when some vertex is
/// far from the best point or the simplex is nearly degenerate) or a halving of
/// rho. Stops when rho would drop below rho_end or the evaluation cap is hit.
inline MinimizeResult minimize(const std::function<double(const std::vector<double> &)> &f, std::vector<double> x0,
                               const MinimizeOptions &opt = {}) {
    const int n = static_cast<int>(x0.size());
    MinimizeResult res;
    constexpr double kFarFactor = 1.1;   // vertex further than this * rho is "far"
    constexpr double kFlatFactor = 0.25; // vertex closer than this * rho to its opposite face is "flat"
    constexpr double kPoorRatio = 0.1;

    auto eval = [&](const Eigen::VectorXd &x) {
        std::vector<double> xs(x.data(), x.data() + x.size());
        const double v = f(xs);
        if (!std::isfinite(v)) {
            throw NonFiniteError("minimize: objective returned a non-finite value at evaluation " +
                                 std::to_string(res.evaluations + 1));
        }
        ++res.evaluations;
        res.trace.push_back(v);
        if (v < res.f) {
            res.f = v;
            res.x = xs;
        }
        return v;
    };

    if (opt.max_evaluations < 1) throw ConfigError("minimize: max_evaluations must be positive");
    Eigen::VectorXd base = Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
    eval(base);
    if (n == 0) {
        res.converged = true;
        return res;
    }

    double rho = opt.rho_begin;
    std::vector<Eigen::VectorXd> pts{base};
    std::vector<double> vals{res.trace.back()};
    for (int j = 0; j < n && res.evaluations < opt.max_evaluations; ++j) {
        Eigen::VectorXd x = base;
        x(j) += rho;
        pts.push_back(x);
        vals.push_back(eval(x));
    }
    if (static_cast<int>(pts.size()) < n + 1) return res;

    while (res.evaluations < opt.max_evaluations) {
        // Best vertex first (ties keep the earlier vertex).
        int best = 0;
        for (int j = 1; j <= n; ++j)
            if (vals[j] < vals[best]) best = j;
        std::swap(pts[0], pts[best]);
        std::swap(vals[0], vals[best]);

        Eigen::MatrixXd dmat(n, n);
        Eigen::VectorXd df(n);
        for (int j = 0; j < n; ++j) {
            dmat.col(j) = pts[j + 1] - pts[0];
            df(j) = vals[j + 1] - vals[0];
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(dmat);
        const bool singular = lu.rank() < n;
        Eigen::MatrixXd inv = singular ? Eigen::MatrixXd::Zero(n, n) : Eigen::MatrixXd(lu.inverse());
        const Eigen::VectorXd g = inv.transpose() * df;

        // Geometry diagnostics.
        int far_j = -1, flat_j = -1;
        double far_d = kFarFactor * rho, flat_s = kFlatFactor * rho;
        for (int j = 0; j < n; ++j) {
            const double dist = dmat.col(j).norm();
            if (dist > far_d) {
                far_d = dist;
                far_j = j;
            }
            const double rn = inv.row(j).norm();
            const double sigma = (singular || rn == 0.0) ? 0.0 : 1.0 / rn;
            if (sigma < flat_s) {
                flat_s = sigma;
                flat_j = j;
            }
        }
        if (singular && flat_j < 0) flat_j = 0;
        const bool geometry_ok = far_j < 0 && flat_j < 0;

        auto geometry_step = [&]() {
            const int j = far_j >= 0 ? far_j : flat_j;
            Eigen::VectorXd dir;
            if (singular) {
                // Any direction orthogonal to the other edges restores full rank.
                Eigen::MatrixXd others(n, n - 1);
                for (int k = 0, c = 0; k < n; ++k)
                    if (k != j) others.col(c++) = dmat.col(k);
                Eigen::FullPivLU<Eigen::MatrixXd> ker(others.transpose());
                Eigen::MatrixXd ns = ker.kernel();
                dir = ns.col(0);
            } else {
                dir = inv.row(j).transpose();
            }
            if (dir.norm() == 0.0) dir = Eigen::VectorXd::Unit(n, j);
            dir *= rho / dir.norm();
            if (g.dot(dir) > 0.0) dir = -dir;
            const Eigen::VectorXd x = pts[0] + dir;
            pts[j + 1] = x;
            vals[j + 1] = eval(x);
        };

        const double gnorm = g.norm();
        bool poor = true;
        if (!singular && gnorm > 0.0) {
            const Eigen::VectorXd d = -rho / gnorm * g;
            const double predicted = rho * gnorm;
            const Eigen::VectorXd xt = pts[0] + d;
            const double ft = eval(xt);
            poor = (vals[0] - ft) / predicted <= kPoorRatio;
            // Replace the vertex whose swap keeps the simplex volume largest,
            // favouring vertices far from the trial point.
            const Eigen::VectorXd w = inv * d;
            int drop = 0;
            double score = -1.0;
            for (int j = 0; j < n; ++j) {
                const double dist = (pts[j + 1] - xt).norm() / rho;
                const double s = std::abs(w(j)) * std::max(1.0, dist * dist);
                if (s > score) {
                    score = s;
                    drop = j;
                }
            }
            if (ft < vals[0] || std::abs(w(drop)) > 1e-3) {
                pts[drop + 1] = xt;
                vals[drop + 1] = ft;
            }
            if (!poor || res.evaluations >= opt.max_evaluations) continue;
        }
        if (!geometry_ok) {
            geometry_step();
            continue;
        }
        if (rho <= opt.rho_end) {
            res.converged = true;
            break;
        }
        rho *= 0.5;
        if (rho <= 1.5 * opt.rho_end) rho = opt.rho_end;
    }
    return res;
}

} // namespace noavqe
