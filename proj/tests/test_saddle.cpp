#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "mlf/probes.hpp"
#include "mlf/saddle.hpp"

using namespace mlf;

namespace {

SpMat dense_to_sparse(const Eigen::MatrixXd& d) {
    std::vector<Triplet> trips;
    for (int i = 0; i < d.rows(); ++i)
        for (int j = 0; j < d.cols(); ++j)
            if (d(i, j) != 0.0) trips.emplace_back(i, j, d(i, j));
    SpMat m(d.rows(), d.cols());
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

}  // namespace

TEST_CASE("hand-solvable KKT system") {
    // A = I (2x2), B = [1 0], f = (1, 0), g = 0  ->  phi = (0, 0), pi = 1
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd B(1, 2);
    B << 1, 0;
    Vec f(2);
    f << 1, 0;
    Vec g = Vec::Zero(1);
    SaddleSolution sol = SaddleSolver(dense_to_sparse(A), dense_to_sparse(B)).solve(f, g);
    CHECK(sol.phi[0] == Catch::Approx(0.0).margin(1e-14));
    CHECK(sol.phi[1] == Catch::Approx(0.0).margin(1e-14));
    CHECK(sol.pi[0] == Catch::Approx(1.0).margin(1e-14));
    CHECK(sol.residual_mom < 1e-12);
    CHECK(sol.residual_con < 1e-12);
}

TEST_CASE("empty constraint block reduces to a plain solve") {
    Eigen::MatrixXd A(1, 1);
    A << 2;
    SpMat B(0, 1);
    Vec f(1);
    f << 4;
    SaddleSolution sol = SaddleSolver(dense_to_sparse(A), B).solve(f, Vec::Zero(0));
    CHECK(sol.phi[0] == Catch::Approx(2.0).margin(1e-14));
}

TEST_CASE("random SPD-plus-skew system: recomputed residuals within tolerance") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> dist(0.0, 1.0);
    const int n = 30, m = 7;
    Eigen::MatrixXd R(n, n), S(n, n), Bm(m, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            R(i, j) = dist(rng);
            S(i, j) = dist(rng);
        }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) Bm(i, j) = dist(rng);
    Eigen::MatrixXd A = R * R.transpose() + Eigen::MatrixXd::Identity(n, n) +
                        0.5 * (S - S.transpose());
    Vec f(n), g(m);
    for (int i = 0; i < n; ++i) f[i] = dist(rng);
    for (int i = 0; i < m; ++i) g[i] = dist(rng);

    const SpMat As = dense_to_sparse(A), Bs = dense_to_sparse(Bm);
    SaddleSolution sol = SaddleSolver(As, Bs).solve(f, g);
    // oracle: recompute residuals from scratch with dense algebra
    const double rm = (A * sol.phi + Bm.transpose() * sol.pi - f).norm();
    const double rc = (Bm * sol.phi - g).norm();
    CHECK(rm <= 1e-10 * f.norm() + 1e-10);
    CHECK(rc <= 1e-10 * f.norm() + 1e-10);
    CHECK(sol.residual_mom == Catch::Approx(rm).margin(1e-14));
    CHECK(sol.residual_con == Catch::Approx(rc).margin(1e-14));
}

TEST_CASE("solve is a left inverse on its range") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> dist(0.0, 1.0);
    const int n = 25, m = 6;
    Eigen::MatrixXd R(n, n), Bm(m, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) R(i, j) = dist(rng);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) Bm(i, j) = dist(rng);
    Eigen::MatrixXd A = R * R.transpose() + Eigen::MatrixXd::Identity(n, n);
    Vec phi_star(n), pi_star(m);
    for (int i = 0; i < n; ++i) phi_star[i] = dist(rng);
    for (int i = 0; i < m; ++i) pi_star[i] = dist(rng);

    const Vec f = A * phi_star + Bm.transpose() * pi_star;
    const Vec g = Bm * phi_star;
    SaddleSolution sol = SaddleSolver(dense_to_sparse(A), dense_to_sparse(Bm)).solve(f, g);
    CHECK((sol.phi - phi_star).norm() <= 1e-9 * phi_star.norm());
    CHECK((sol.pi - pi_star).norm() <= 1e-9 * pi_star.norm());
}

TEST_CASE("inf-sup identity toy: G = I2, B = [1 0], M = [1] gives beta = 1") {
    Eigen::MatrixXd G = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd B(1, 2);
    B << 1, 0;
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(1, 1);
    const double beta = estimate_infsup(dense_to_sparse(G), dense_to_sparse(B),
                                        dense_to_sparse(M), InfSupMode::FullSigma);
    CHECK(beta == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("coercivity probe closed forms") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> dist(0.0, 1.0);
    const int n = 20;
    Eigen::MatrixXd R(n, n), S(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            R(i, j) = dist(rng);
            S(i, j) = dist(rng);
        }
    const Eigen::MatrixXd G = R * R.transpose() + Eigen::MatrixXd::Identity(n, n);
    const SpMat Gs = dense_to_sparse(G);

    // A = 2G -> 2
    CHECK(probe_coercivity(dense_to_sparse(Eigen::MatrixXd(2.0 * G)), Gs) ==
          Catch::Approx(2.0).margin(1e-7));
    // A = G + skew -> 1 (the skew part drops out of the Rayleigh quotient)
    const Eigen::MatrixXd A = G + 0.5 * (S - S.transpose());
    CHECK(probe_coercivity(dense_to_sparse(A), Gs) == Catch::Approx(1.0).margin(1e-7));
}

TEST_CASE("indefinite Gram is rejected") {
    Eigen::MatrixXd G(2, 2);
    G << 1, 0, 0, -1;
    Eigen::MatrixXd B(1, 2);
    B << 1, 0;
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(1, 1);
    CHECK_THROWS_AS(estimate_infsup(dense_to_sparse(G), dense_to_sparse(B), dense_to_sparse(M),
                                    InfSupMode::FullSigma),
                    std::invalid_argument);
    CHECK_THROWS_AS(probe_coercivity(dense_to_sparse(G), dense_to_sparse(G)),
                    std::invalid_argument);
}

TEST_CASE("Taylor-Hood inf-sup estimate matches a dense reference") {
    using namespace mlf;
    MaterialParams p;
    const MultilayerMesh mesh = build_mesh(2, 1, 2, 1, 0.2);
    const DofLayout L = build_dof_layout(mesh);
    const Forms forms(mesh, L, p);
    const int b0 = L.block_begin(Field::U);
    const int bs = L.block_size[4];
    SpMat Gs = SpMat(forms.gram().block(b0, b0, bs, bs));
    SpMat Bs = SpMat(forms.constraint().middleCols(b0, bs));
    Eigen::SimplicialLDLT<SpMat> chol(Gs);
    Eigen::MatrixXd Bt = Eigen::MatrixXd(SpMat(Bs.transpose()));
    Eigen::MatrixXd S = Eigen::MatrixXd(Bs) * chol.solve(Bt);
    Eigen::MatrixXd M = Eigen::MatrixXd(forms.mass_pi());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(S, M);
    const double beta_ref = std::sqrt(es.eigenvalues()[0]);
    const double beta = estimate_infsup(forms.gram(), forms.constraint(), forms.mass_pi(),
                                        InfSupMode::FluidBlock, &L);
    CHECK(beta == Catch::Approx(beta_ref).epsilon(1e-6));
    // the full-Sigma estimate searches a larger space and can only grow
    const double beta_full = estimate_infsup(forms.gram(), forms.constraint(), forms.mass_pi(),
                                             InfSupMode::FullSigma, &L);
    CHECK(beta_full >= beta - 1e-9);
}

TEST_CASE("equal-order pairing is singular: the control reports beta = 0") {
    using namespace mlf;
    MaterialParams p;
    for (int n : {2, 4}) {
        const MultilayerMesh mesh = build_mesh(n, 1, n, 1, 0.2);
        const double beta = estimate_infsup_equal_order(build_equal_order_fluid(mesh, p));
        CHECK(beta == 0.0);
    }
    // Taylor-Hood on the same meshes stays well away from zero
    const MultilayerMesh mesh = build_mesh(2, 1, 2, 1, 0.2);
    const DofLayout L = build_dof_layout(mesh);
    const Forms forms(mesh, L, p);
    CHECK(estimate_infsup(forms.gram(), forms.constraint(), forms.mass_pi(),
                          InfSupMode::FluidBlock, &L) > 0.5);
}

TEST_CASE("recorded baselines: Taylor-Hood inf-sup and coercivity at n_plane = 2") {
    using namespace mlf;
    MaterialParams p;
    const MultilayerMesh mesh = build_mesh(2, 1, 2, 1, 0.2);
    const DofLayout L = build_dof_layout(mesh);
    const Forms forms(mesh, L, p);
    const double beta = estimate_infsup(forms.gram(), forms.constraint(), forms.mass_pi(),
                                        InfSupMode::FluidBlock, &L);
    CHECK(beta > 0.0);
    CHECK(beta == Catch::Approx(0.672122).epsilon(1e-3));

    const MultilayerMesh mesh2 = build_mesh(2, 1, 1, 1, 0.2);
    const DofLayout L2 = build_dof_layout(mesh2);
    const Forms forms2(mesh2, L2, p);
    const double lam = probe_coercivity(forms2.resolvent_system(1.0).A, forms2.gram());
    CHECK(lam > 0.0);
    CHECK(lam == Catch::Approx(0.793444).epsilon(1e-3));
}
