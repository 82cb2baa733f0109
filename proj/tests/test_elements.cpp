#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "mlf/elements.hpp"

using namespace mlf;

namespace {

// Independent dense evaluation of a trilinear interpolant from nodal values.
double trilinear_eval(const double nodal[8], double x, double y, double z) {
    double v = 0;
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < 2; ++i) {
                const double s = (i ? x : 1 - x) * (j ? y : 1 - y) * (k ? z : 1 - z);
                v += nodal[i + 2 * j + 4 * k] * s;
            }
    return v;
}

}  // namespace

TEST_CASE("partition of unity for value-interpolatory families") {
    const QuadRule r3 = gauss_rule(3, 3);
    for (Family f : {Family::Q1_3D, Family::Q2_3D}) {
        const BasisTable t = tabulate(f, r3);
        for (int q = 0; q < t.nq; ++q) {
            double s = 0;
            for (int i = 0; i < t.ndof; ++i) s += t.val(q, i);
            CHECK(std::abs(s - 1.0) < 1e-14);
        }
    }
}

TEST_CASE("trilinear values at the cell center are all 1/8") {
    double val[8], grad[24];
    eval_basis_point(Family::Q1_3D, {0.5, 0.5, 0.5}, val, grad);
    for (int i = 0; i < 8; ++i) CHECK(val[i] == Catch::Approx(0.125).epsilon(1e-15));
}

TEST_CASE("plate family reproduces x^2 y^2 and its second derivatives") {
    // Interpolate w = x^2 y^2 on the unit cell via Hermite DOFs
    // [w, wx, wy, wxy] at each corner.
    const auto w = [](double x, double y) { return x * x * y * y; };
    const auto wx = [](double x, double y) { return 2 * x * y * y; };
    const auto wy = [](double x, double y) { return 2 * x * x * y; };
    const auto wxy = [](double x, double y) { return 4 * x * y; };
    double coef[16];
    int idx = 0;
    for (int b = 0; b < 2; ++b)
        for (int a = 0; a < 2; ++a) {
            coef[4 * (a + 2 * b) + 0] = w(a, b);
            coef[4 * (a + 2 * b) + 1] = wx(a, b);
            coef[4 * (a + 2 * b) + 2] = wy(a, b);
            coef[4 * (a + 2 * b) + 3] = wxy(a, b);
            ++idx;
        }
    (void)idx;

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const double x = dist(rng), y = dist(rng);
        double val[16], grad[32], sec[48];
        eval_basis_point(Family::BFS_2D, {x, y, 0}, val, grad, sec);
        double v = 0, vxx = 0, vyy = 0, vxy = 0;
        for (int i = 0; i < 16; ++i) {
            v += coef[i] * val[i];
            vxx += coef[i] * sec[3 * i + 0];
            vyy += coef[i] * sec[3 * i + 1];
            vxy += coef[i] * sec[3 * i + 2];
        }
        CHECK(std::abs(v - w(x, y)) < 1e-13);
        CHECK(std::abs(vxx - 2 * y * y) < 1e-12);
        CHECK(std::abs(vyy - 2 * x * x) < 1e-12);
        CHECK(std::abs(vxy - 4 * x * y) < 1e-12);
    }
    // center check against the closed form (2y^2, 2x^2, 4xy) at (1/2, 1/2)
    double val[16], grad[32], sec[48];
    eval_basis_point(Family::BFS_2D, {0.5, 0.5, 0}, val, grad, sec);
    double vxx = 0, vyy = 0, vxy = 0;
    for (int i = 0; i < 16; ++i) {
        vxx += coef[i] * sec[3 * i + 0];
        vyy += coef[i] * sec[3 * i + 1];
        vxy += coef[i] * sec[3 * i + 2];
    }
    CHECK(vxx == Catch::Approx(0.5).margin(1e-13));
    CHECK(vyy == Catch::Approx(0.5).margin(1e-13));
    CHECK(vxy == Catch::Approx(1.0).margin(1e-13));
}

TEST_CASE("prism values are constant in s for s-independent coefficients") {
    // nodal values independent of the top/bottom layer; compare against the
    // dense trilinear oracle at the quadrature points of several s-slices
    double nodal[8] = {0.3, -1.2, 0.7, 2.0, 0.3, -1.2, 0.7, 2.0};
    const QuadRule r = gauss_rule_aniso(3, 3, 4);
    const BasisTable t = tabulate(Family::Q1_3D, r);
    for (int q = 0; q < t.nq; ++q) {
        double v = 0;
        for (int i = 0; i < 8; ++i) v += nodal[i] * t.val(q, i);
        const auto& p = r.points[q];
        CHECK(std::abs(v - trilinear_eval(nodal, p[0], p[1], 0.0)) < 1e-14);
    }
}

TEST_CASE("physical mapping scales gradients and weights") {
    const QuadRule r = gauss_rule(3, 2);
    const BasisTable ref = tabulate(Family::Q1_3D, r);
    const BasisTable t = map_to_physical(ref, {0.5, 0.5, 0.5});
    for (int q = 0; q < t.nq; ++q) {
        CHECK(t.weights[q] == Catch::Approx(ref.weights[q] / 8.0).epsilon(1e-15));
        for (int i = 0; i < 8; ++i)
            for (int d = 0; d < 3; ++d)
                CHECK(t.der(q, i, d) == Catch::Approx(2.0 * ref.der(q, i, d)).margin(1e-15));
    }

    // identity scaling on the unit cell
    const BasisTable tu = map_to_physical(ref, {1, 1, 1});
    for (int q = 0; q < tu.nq; ++q)
        CHECK(tu.weights[q] == Catch::Approx(ref.weights[q]).epsilon(1e-15));

    CHECK_THROWS_AS(map_to_physical(ref, {0.0, 1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("integral of d/dx of the coordinate equals the cell volume") {
    // interpolant of f = x on a stretched cell: integral of df/dx = volume/hx * hx
    const std::array<double, 3> ext{0.25, 0.5, 2.0};
    const QuadRule r = gauss_rule(3, 2);
    const BasisTable t = map_to_physical(tabulate(Family::Q1_3D, r), ext);
    double nodal[8];
    for (int k = 0; k < 2; ++k)
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < 2; ++i) nodal[i + 2 * j + 4 * k] = i * ext[0];
    double integral = 0;
    for (int q = 0; q < t.nq; ++q) {
        double dfdx = 0;
        for (int i = 0; i < 8; ++i) dfdx += nodal[i] * t.der(q, i, 0);
        integral += t.weights[q] * dfdx;
    }
    CHECK(integral == Catch::Approx(ext[0] * ext[1] * ext[2]).epsilon(1e-14));
}

TEST_CASE("stiffness rows of the trilinear Laplacian sum to zero") {
    const QuadRule r = gauss_rule(3, 2);
    const BasisTable t = map_to_physical(tabulate(Family::Q1_3D, r), {0.37, 1.1, 0.9});
    double K[8][8] = {};
    for (int q = 0; q < t.nq; ++q)
        for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b)
                for (int d = 0; d < 3; ++d)
                    K[a][b] += t.weights[q] * t.der(q, a, d) * t.der(q, b, d);
    for (int a = 0; a < 8; ++a) {
        double row = 0;
        for (int b = 0; b < 8; ++b) row += K[a][b];
        CHECK(std::abs(row) < 1e-14);
    }
}

TEST_CASE("Hermite nodal extraction of a cubic reproduces values and derivatives") {
    // w = (x^3 - 2x^2 + x)(y^3 + y): bicubic; Hermite interpolation on the
    // physical cell [0, 0.5]^2 must reproduce it exactly.
    const auto f = [](double x, double y) { return (x * x * x - 2 * x * x + x) * (y * y * y + y); };
    const auto fx = [](double x, double y) { return (3 * x * x - 4 * x + 1) * (y * y * y + y); };
    const auto fy = [](double x, double y) { return (x * x * x - 2 * x * x + x) * (3 * y * y + 1); };
    const auto fxy = [](double x, double y) { return (3 * x * x - 4 * x + 1) * (3 * y * y + 1); };

    const double h = 0.5;
    double coef[16];
    for (int b = 0; b < 2; ++b)
        for (int a = 0; a < 2; ++a) {
            coef[4 * (a + 2 * b) + 0] = f(a * h, b * h);
            coef[4 * (a + 2 * b) + 1] = fx(a * h, b * h);
            coef[4 * (a + 2 * b) + 2] = fy(a * h, b * h);
            coef[4 * (a + 2 * b) + 3] = fxy(a * h, b * h);
        }
    const QuadRule r = gauss_rule(2, 4);
    const BasisTable t = map_to_physical(tabulate(Family::BFS_2D, r), {h, h, 1.0});
    for (int q = 0; q < t.nq; ++q) {
        const double x = r.points[q][0] * h, y = r.points[q][1] * h;
        double v = 0, gx = 0, gy = 0;
        for (int i = 0; i < 16; ++i) {
            v += coef[i] * t.val(q, i);
            gx += coef[i] * t.der(q, i, 0);
            gy += coef[i] * t.der(q, i, 1);
        }
        CHECK(std::abs(v - f(x, y)) < 1e-13);
        CHECK(std::abs(gx - fx(x, y)) < 1e-12);
        CHECK(std::abs(gy - fy(x, y)) < 1e-12);
    }
}

TEST_CASE("family and rule dimensions must agree") {
    CHECK_THROWS_AS(tabulate(Family::Q1_3D, gauss_rule(2, 2)), std::invalid_argument);
    CHECK_THROWS_AS(tabulate(Family::BFS_2D, gauss_rule(3, 2)), std::invalid_argument);
    CHECK_THROWS_AS(tabulate_face(Family::BFS_2D, gauss_rule(2, 2), 0.0), std::invalid_argument);
}
