#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

#include "mlf/assembly.hpp"
#include "mlf/saddle.hpp"

namespace mlf {

namespace detail {

/// Smallest generalized eigenvalue of (S, M) by inverse power iteration:
/// v <- S^{-1} M q, with S applied through `solve_s`. The start vector is a
/// fixed-seed pseudo-random vector (structured starts such as the constant
/// can be exact eigenvectors of other eigenvalues and trap the iteration);
/// stops when the eigenvalue increment drops below tol.
inline double smallest_generalized_eig(const std::function<Vec(const Vec&)>& solve_s,
                                       const std::function<Vec(const Vec&)>& apply_m, int n,
                                       double tol = 1e-8, int max_iter = 500) {
    if (n == 0) return 0.0;
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vec q(n);
    for (int i = 0; i < n; ++i) q[i] = dist(rng);
    q.normalize();
    const int min_iter = 5;
    double lambda = 0.0, lambda_old = -1.0;
    for (int it = 0; it < max_iter; ++it) {
        const Vec mq = apply_m(q);
        const Vec v = solve_s(mq);
        const double qmq = q.dot(mq);
        const double qmv = v.dot(mq);
        if (!(std::abs(qmv) > 0)) throw SolverError("inverse iteration breakdown: M-orthogonal iterate");
        lambda = qmq / qmv;
        const double nv = v.norm();
        if (!(nv > 0)) throw SolverError("inverse iteration breakdown: zero iterate");
        q = v / nv;
        if (it >= min_iter &&
            std::abs(lambda - lambda_old) <= tol * std::max(1.0, std::abs(lambda)))
            break;
        lambda_old = lambda;
    }
    return lambda;
}

}  // namespace detail

enum class InfSupMode { FluidBlock, FullSigma };

/// Discrete inf-sup constant of b(.,.) against the Gram norm: beta_h =
/// sqrt(lambda_min) of B G^{-1} B^T q = beta^2 M_pi q. FluidBlock mode
/// restricts G to the velocity block (the witness construction zeroes all
/// other components); FullSigma uses the whole Gram matrix and can only give
/// a value at least as large.
inline double estimate_infsup(const SpMat& G, const SpMat& B, const SpMat& M_pi, InfSupMode mode,
                              const DofLayout* layout = nullptr, double tol = 1e-8,
                              int max_iter = 500) {
    SpMat Gs, Bs;
    if (mode == InfSupMode::FluidBlock) {
        if (!layout) throw std::invalid_argument("estimate_infsup: FluidBlock mode needs a layout");
        const int b0 = layout->block_begin(Field::U);
        const int bs = layout->block_size[static_cast<int>(Field::U)];
        Gs = SpMat(G.block(b0, b0, bs, bs));
        Bs = SpMat(B.middleCols(b0, bs));
    } else {
        Gs = G;
        Bs = B;
    }
    Gs.makeCompressed();
    Bs.makeCompressed();

    {   // reject an indefinite Gram block up front
        Eigen::SimplicialLDLT<SpMat> chol(Gs);
        if (chol.info() != Eigen::Success || (chol.vectorD().array() <= 0).any())
            throw std::invalid_argument("estimate_infsup: Gram matrix is not positive definite");
    }

    // Factor the auxiliary KKT [G B^T; B 0] once; each application of
    // (B G^{-1} B^T)^{-1} is one back-substitution. A singular factorization
    // means B has a nontrivial cokernel, i.e. the pairing admits spurious
    // pressure modes and the inf-sup constant is exactly zero.
    SaddleSolver kkt(Gs, Bs);
    if (!kkt.used_direct()) return 0.0;
    const int npi = static_cast<int>(Bs.rows());
    const auto solve_s = [&](const Vec& r) {
        // G x + B^T y = 0, B x = -r  =>  y = (B G^{-1} B^T)^{-1} r
        SaddleSolution sol = kkt.solve(Vec::Zero(Gs.rows()), Vec(-r));
        return Vec(sol.pi);
    };
    const auto apply_m = [&](const Vec& q) { return Vec(M_pi * q); };
    try {
        const double lambda =
            detail::smallest_generalized_eig(solve_s, apply_m, npi, tol, max_iter);
        return std::sqrt(std::max(lambda, 0.0));
    } catch (const SolverError&) {
        return 0.0;  // numerically singular Schur complement
    }
}

/// Smallest generalized eigenvalue of (sym(A), G) by inverse iteration; the
/// discrete ellipticity constant of the reduced operator.
inline double probe_coercivity(const SpMat& A, const SpMat& G, double tol = 1e-8,
                               int max_iter = 500) {
    SpMat S = SpMat(0.5 * (A + SpMat(A.transpose())));
    S.makeCompressed();
    Eigen::SimplicialLDLT<SpMat> chol_g(G);
    if (chol_g.info() != Eigen::Success || (chol_g.vectorD().array() <= 0).any())
        throw std::invalid_argument("probe_coercivity: Gram matrix is not positive definite");
    Eigen::SimplicialLDLT<SpMat> chol_s(S);
    if (chol_s.info() != Eigen::Success)
        throw SolverError("probe_coercivity: factorization of sym(A) failed");
    const auto solve_s = [&](const Vec& r) { return Vec(chol_s.solve(r)); };
    const auto apply_m = [&](const Vec& q) { return Vec(G * q); };
    return detail::smallest_generalized_eig(solve_s, apply_m, static_cast<int>(A.rows()), tol,
                                            max_iter);
}

/// Smallest eigenvalue of a symmetric matrix (against the identity), used by
/// definiteness probes in tests.
inline double probe_smallest_eig(const SpMat& S, double tol = 1e-10, int max_iter = 500) {
    Eigen::SimplicialLDLT<SpMat> chol(S);
    if (chol.info() != Eigen::Success)
        throw SolverError("probe_smallest_eig: factorization failed");
    const auto solve_s = [&](const Vec& r) { return Vec(chol.solve(r)); };
    const auto apply_m = [](const Vec& q) { return q; };
    return detail::smallest_generalized_eig(solve_s, apply_m, static_cast<int>(S.rows()), tol,
                                            max_iter);
}

/// Equal-order (trilinear velocity / trilinear pressure) fluid pairing on the
/// same mesh and boundary conditions. A negative control: its inf-sup
/// constant degenerates under refinement where the quadratic/linear pairing
/// stays bounded.
struct EqualOrderFluid {
    SpMat G_u;   // mu_f (grad u, grad delta) over the Q1 velocity DOFs
    SpMat B;     // -(chi, div delta)
    SpMat M_pi;  // pressure mass
    int n_u = 0;
    int n_pi = 0;
};

inline EqualOrderFluid build_equal_order_fluid(const MultilayerMesh& m,
                                               const MaterialParams& params) {
    const int n = m.n_plane;
    const int nzf = m.nz_f;
    const auto node = [&](int i, int j, int k) { return m.fluid.node_index(i, j, k); };

    // velocity numbering: periodic wrap, zero on the fluid bottom
    std::vector<int> res_u(static_cast<size_t>(m.fluid.nnodes()) * 3, -2);
    int next = 0;
    for (int k = 0; k <= nzf; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                for (int c = 0; c < 3; ++c) {
                    if (k == 0) { res_u[3 * node(i, j, k) + c] = -1; continue; }
                    res_u[3 * node(i, j, k) + c] = next++;
                }
    for (int k = 0; k <= nzf; ++k)
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i) {
                if (i < n && j < n) continue;
                for (int c = 0; c < 3; ++c)
                    res_u[3 * node(i, j, k) + c] = res_u[3 * node(i % n, j % n, k) + c];
            }

    std::vector<int> res_p(static_cast<size_t>(m.fluid.nnodes()), -2);
    int next_p = 0;
    for (int k = 0; k <= nzf; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) res_p[node(i, j, k)] = next_p++;
    for (int k = 0; k <= nzf; ++k)
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i) {
                if (i < n && j < n) continue;
                res_p[node(i, j, k)] = res_p[node(i % n, j % n, k)];
            }

    const QuadRule rule = gauss_rule(3, kRuleBulk);
    const BasisTable t = map_to_physical(tabulate(Family::Q1_3D, rule), m.fluid.cell);
    const Eigen::MatrixXd kg = params.mu_f * detail::kernel_vec_gradgrad(t);
    const Eigen::MatrixXd bc = detail::kernel_div_constraint(t, t);
    const Eigen::MatrixXd mp = detail::kernel_mass(t);

    std::vector<Triplet> t_g, t_b, t_m;
    for (int ck = 0; ck < nzf; ++ck)
        for (int cj = 0; cj < n; ++cj)
            for (int ci = 0; ci < n; ++ci) {
                std::array<int, 24> ud{};
                std::array<int, 8> pd{};
                int mcount = 0;
                for (int k = 0; k < 2; ++k)
                    for (int j = 0; j < 2; ++j)
                        for (int i = 0; i < 2; ++i) {
                            const int nd = node(ci + i, cj + j, ck + k);
                            pd[mcount / 3] = res_p[nd];
                            for (int c = 0; c < 3; ++c) ud[mcount++] = res_u[3 * nd + c];
                        }
                detail::scatter(t_g, ud, ud, kg);
                detail::scatter_rect(t_b, pd, ud, bc);
                detail::scatter(t_m, pd, pd, mp);
            }

    EqualOrderFluid eq;
    eq.n_u = next;
    eq.n_pi = next_p;
    eq.G_u = detail::from_triplets(next, next, t_g);
    eq.B = detail::from_triplets(next_p, next, t_b);
    eq.M_pi = detail::from_triplets(next_p, next_p, t_m);
    return eq;
}

/// Inf-sup estimate for the equal-order control (no layout involved). The
/// pairing carries exact spurious pressure modes on these lattices, so the
/// singular-Schur path returning zero is the expected outcome.
inline double estimate_infsup_equal_order(const EqualOrderFluid& eq, double tol = 1e-8,
                                          int max_iter = 500) {
    SaddleSolver kkt(eq.G_u, eq.B);
    if (!kkt.used_direct()) return 0.0;
    const auto solve_s = [&](const Vec& r) {
        SaddleSolution sol = kkt.solve(Vec::Zero(eq.n_u), Vec(-r));
        return Vec(sol.pi);
    };
    const auto apply_m = [&](const Vec& q) { return Vec(eq.M_pi * q); };
    try {
        const double lambda =
            detail::smallest_generalized_eig(solve_s, apply_m, eq.n_pi, tol, max_iter);
        return std::sqrt(std::max(lambda, 0.0));
    } catch (const SolverError&) {
        return 0.0;
    }
}

}  // namespace mlf
