#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace mlf {

/// Tensor Gauss-Legendre rule on the unit reference cell [0,1]^dim.
/// A rule with n points per axis integrates per-direction degree <= 2n-1
/// exactly.
struct QuadRule {
    int dim = 0;
    int points_per_axis = 0;
    std::vector<std::array<double, 3>> points;  // unused trailing coords are 0
    std::vector<double> weights;

    int size() const { return static_cast<int>(weights.size()); }
};

namespace detail {

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline void legendre_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            if (n == 1) { p1 = t; }
            for (int k = 2; k <= n; ++k) {
                double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            double dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        double p0 = 1.0, p1 = t;
        for (int k = 2; k <= n; ++k) {
            double pk = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        double dp = n * (t * p1 - p0) / (t * t - 1.0);
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    // ascending node order
    for (int i = 0; i < n / 2; ++i) {
        std::swap(x[i], x[n - 1 - i]);
        std::swap(w[i], w[n - 1 - i]);
    }
}

}  // namespace detail

/// Build a tensor Gauss-Legendre rule on [0,1]^dim with `points_per_axis`
/// nodes per direction.
inline QuadRule gauss_rule(int dim, int points_per_axis) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("gauss_rule: dim must be 1, 2 or 3");
    if (points_per_axis < 1) throw std::invalid_argument("gauss_rule: need at least one point per axis");

    std::vector<double> x1, w1;
    detail::legendre_nodes(points_per_axis, x1, w1);
    // map [-1,1] -> [0,1]
    for (int i = 0; i < points_per_axis; ++i) {
        x1[i] = 0.5 * (x1[i] + 1.0);
        w1[i] = 0.5 * w1[i];
    }

    QuadRule rule;
    rule.dim = dim;
    rule.points_per_axis = points_per_axis;
    const int n = points_per_axis;
    if (dim == 1) {
        for (int i = 0; i < n; ++i) {
            rule.points.push_back({x1[i], 0.0, 0.0});
            rule.weights.push_back(w1[i]);
        }
    } else if (dim == 2) {
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                rule.points.push_back({x1[i], x1[j], 0.0});
                rule.weights.push_back(w1[i] * w1[j]);
            }
    } else {
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i) {
                    rule.points.push_back({x1[i], x1[j], x1[k]});
                    rule.weights.push_back(w1[i] * w1[j] * w1[k]);
                }
    }
    return rule;
}

/// Anisotropic tensor Gauss rule on [0,1]^3 with per-axis point counts.
/// Point ordering is k-outer / i-fastest, so the in-plane point index of
/// point q is q % (nx*ny).
inline QuadRule gauss_rule_aniso(int nx, int ny, int nz) {
    QuadRule rx = gauss_rule(1, nx), ry = gauss_rule(1, ny), rz = gauss_rule(1, nz);
    QuadRule rule;
    rule.dim = 3;
    rule.points_per_axis = nx;  // nominal
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                rule.points.push_back({rx.points[i][0], ry.points[j][0], rz.points[k][0]});
                rule.weights.push_back(rx.weights[i] * ry.weights[j] * rz.weights[k]);
            }
    return rule;
}

}  // namespace mlf
