#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "mlf/initial_conditions.hpp"
#include "mlf/vonkarman.hpp"

using namespace mlf;

namespace {

struct Setup {
    MultilayerMesh mesh;
    DofLayout layout;
    MaterialParams params;
    Forms forms;
    explicit Setup(int n, int nzb = 1, int nzf = 1, int nsp = 1, double h = 0.2)
        : mesh(build_mesh(n, nzb, nzf, nsp, h)), layout(build_dof_layout(mesh)), params(),
          forms(mesh, layout, params) {}
};

// Interpolate a smooth function into the plate block (free DOFs only).
Vec plate_interpolant(const DofLayout& L, double (*f)(double, double),
                      double (*fx)(double, double), double (*fy)(double, double),
                      double (*fxy)(double, double)) {
    const int w0 = L.block_begin(Field::W);
    const int nw = L.block_size[static_cast<int>(Field::W)];
    Vec out = Vec::Zero(nw);
    for (int g = 0; g < nw; ++g) {
        const auto& info = L.free_info[w0 + g];
        const double x = info.coord[0], y = info.coord[1];
        switch (static_cast<PlateDof>(info.comp)) {
            case PlateDof::Value: out[g] = f(x, y); break;
            case PlateDof::Dx: out[g] = fx(x, y); break;
            case PlateDof::Dy: out[g] = fy(x, y); break;
            case PlateDof::Dxy: out[g] = fxy(x, y); break;
        }
    }
    return out;
}

Vec random_plate(const DofLayout& L, std::uint64_t seed, double amp = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-amp, amp);
    Vec out(L.block_size[static_cast<int>(Field::W)]);
    for (int i = 0; i < out.size(); ++i) out[i] = dist(rng);
    return out;
}

double fq_x2(double x, double) { return x * x; }
double fq_x2_dx(double x, double) { return 2 * x; }
double fq_zero(double, double) { return 0; }
double fq_y2(double, double y) { return y * y; }
double fq_y2_dy(double, double y) { return 2 * y; }
double fq_xy(double x, double y) { return x * y; }
double fq_xy_dx(double, double y) { return y; }
double fq_xy_dy(double x, double) { return x; }
double fq_one(double, double) { return 1; }

}  // namespace

TEST_CASE("bracket of x^2 and y^2 is 4 on fully interior cells") {
    Setup s(4);
    VkContext vk(s.forms);
    const Vec u = plate_interpolant(s.layout, fq_x2, fq_x2_dx, fq_zero, fq_zero);
    const Vec w = plate_interpolant(s.layout, fq_y2, fq_zero, fq_y2_dy, fq_zero);
    const auto br = vk.bracket(u, w);
    // cell (1,1) has all four corners interior, so the interpolants restrict
    // to the exact polynomials there
    const int cell = s.mesh.plate.cell_index(1, 1);
    const int nq = gauss_rule(2, kRulePlate).size();
    for (int q = 0; q < nq; ++q)
        CHECK(br[static_cast<size_t>(cell) * nq + q] == Catch::Approx(4.0).margin(1e-11));
}

TEST_CASE("bracket of xy with itself is -2 on interior cells") {
    Setup s(4);
    VkContext vk(s.forms);
    const Vec w = plate_interpolant(s.layout, fq_xy, fq_xy_dx, fq_xy_dy, fq_one);
    const auto br = vk.bracket(w, w);
    const int cell = s.mesh.plate.cell_index(2, 2);
    const int nq = gauss_rule(2, kRulePlate).size();
    for (int q = 0; q < nq; ++q)
        CHECK(br[static_cast<size_t>(cell) * nq + q] == Catch::Approx(-2.0).margin(1e-11));
}

TEST_CASE("bracket symmetry and bilinearity") {
    Setup s(3);
    VkContext vk(s.forms);
    const Vec u1 = random_plate(s.layout, 1);
    const Vec u2 = random_plate(s.layout, 2);
    const Vec w = random_plate(s.layout, 3);

    const auto buw = vk.bracket(u1, w);
    const auto bwu = vk.bracket(w, u1);
    double mx = 0;
    for (size_t i = 0; i < buw.size(); ++i) mx = std::max(mx, std::abs(buw[i] - bwu[i]));
    CHECK(mx == 0.0);  // identical arithmetic on both orders

    const double alpha = 1.7;
    const auto lhs = vk.bracket(Vec(alpha * u1 + u2), w);
    const auto b1 = vk.bracket(u1, w);
    const auto b2 = vk.bracket(u2, w);
    double scale = 0, err = 0;
    for (size_t i = 0; i < lhs.size(); ++i) {
        scale = std::max(scale, std::abs(lhs[i]));
        err = std::max(err, std::abs(lhs[i] - (alpha * b1[i] + b2[i])));
    }
    CHECK(err <= 1e-13 * std::max(scale, 1.0));
}

TEST_CASE("Airy solve: zero input, nonnegative energy, clamped DOFs") {
    Setup s(3);
    VkContext vk(s.forms);
    const Vec z = Vec::Zero(vk.n_plate_dofs());
    const AirySolution a0 = vk.solve_airy(z);
    CHECK(a0.v.norm() == 0.0);

    for (int rep = 0; rep < 5; ++rep) {
        const Vec w = random_plate(s.layout, 40 + rep);
        const AirySolution a = vk.solve_airy(w);
        CHECK(a.residual <= 1e-9 * std::max(1.0, a.v.norm()));
        // Pi0 = 1/4 int |Lap v|^2 >= 0
        VkConfig cfg;
        CHECK(vk.potential(w, cfg) >= 0.0);
    }
}

TEST_CASE("clamped biharmonic MMS converges at second order in H2") {
    // v* = sin^2(pi x) sin^2(pi y);  g = Lap^2 v* in closed form
    const auto lap_v = [](double x, double y) {
        return 2 * M_PI * M_PI *
               (std::cos(2 * M_PI * x) * std::sin(M_PI * y) * std::sin(M_PI * y) +
                std::sin(M_PI * x) * std::sin(M_PI * x) * std::cos(2 * M_PI * y));
    };
    const auto g = [](double x, double y) {
        const double c2x = std::cos(2 * M_PI * x), c2y = std::cos(2 * M_PI * y);
        const double s2x = std::sin(M_PI * x) * std::sin(M_PI * x);
        const double s2y = std::sin(M_PI * y) * std::sin(M_PI * y);
        return 8 * std::pow(M_PI, 4) * (c2x * c2y - c2x * s2y - s2x * c2y);
    };
    // sanity-check the closed form against central differences of lap_v
    {
        const double h = 1e-5, x = 0.3123, y = 0.6217;
        const double fd = (lap_v(x + h, y) + lap_v(x - h, y) + lap_v(x, y + h) +
                           lap_v(x, y - h) - 4 * lap_v(x, y)) / (h * h);
        REQUIRE(std::abs(fd - g(x, y)) < 1e-3 * std::max(1.0, std::abs(g(x, y))));
    }

    std::vector<double> errs;
    for (int n : {4, 8, 16}) {
        Setup s(n);
        VkContext vk(s.forms);
        SourceFunctions src;
        src.plate = [&](double x, double y, double) { return g(x, y); };
        const Vec rhs_sigma = s.forms.source_load(src, 0.0);
        const int w0 = s.layout.block_begin(Field::W);
        const Vec rhs = rhs_sigma.segment(w0, vk.n_plate_dofs());
        const Vec vh = vk.solve_biharmonic(rhs);

        // H2-seminorm error via the second-derivative tables
        const QuadRule r = gauss_rule(2, 6);
        const BasisTable t = map_to_physical(tabulate(Family::BFS_2D, r),
                                             {1.0 / n, 1.0 / n, 1.0});
        double err2 = 0;
        for (int cj = 0; cj < n; ++cj)
            for (int ci = 0; ci < n; ++ci) {
                const auto wd = s.layout.w_cell_dofs(ci, cj);
                for (int q = 0; q < t.nq; ++q) {
                    double lap_h = 0;
                    for (int a = 0; a < 16; ++a) {
                        const int gdof = wd[a];
                        if (gdof < 0) continue;
                        lap_h += vh[gdof - w0] * (t.der2(q, a, 0) + t.der2(q, a, 1));
                    }
                    const double x = (ci + r.points[q][0]) / n, y = (cj + r.points[q][1]) / n;
                    const double d = lap_h - lap_v(x, y);
                    err2 += t.weights[q] * d * d;
                }
            }
        errs.push_back(std::sqrt(err2));
    }
    const double order1 = std::log2(errs[0] / errs[1]);
    const double order2 = std::log2(errs[1] / errs[2]);
    CHECK(order1 > 1.8);
    CHECK(order2 > 1.8);
}

TEST_CASE("restoring force: zero plate, cubic homogeneity, scaling slope") {
    Setup s(4);
    VkContext vk(s.forms);
    VkConfig cfg;

    // w = 0 gives a zero load even with F0 nonzero
    cfg.F0 = random_plate(s.layout, 60);
    CHECK(vk.force_local(Vec::Zero(vk.n_plate_dofs()), cfg).norm() == 0.0);
    cfg.F0 = Vec();

    const Vec w = random_plate(s.layout, 61);
    const Vec f1 = vk.force_local(w, cfg);
    const Vec f2 = vk.force_local(Vec(0.5 * w), cfg);
    CHECK((f2 - 0.125 * f1).norm() <= 1e-10 * f1.norm());

    // log-log slope of ||f(eps w)|| over eps in {1e-1, 1e-2, 1e-3}
    std::vector<double> eps = {1e-1, 1e-2, 1e-3}, norms;
    for (double e : eps) norms.push_back(vk.force_local(Vec(e * w), cfg).norm());
    const double slope = std::log10(norms[0] / norms[2]) / 2.0;
    CHECK(slope == Catch::Approx(3.0).margin(0.05));
}

TEST_CASE("bracket integration by parts on clamped fields") {
    Setup s(4);
    VkContext vk(s.forms);
    const Vec w = random_plate(s.layout, 70);
    const AirySolution a = vk.solve_airy(w);

    // int [w, v] w  ==  int [w, w] v
    const auto bwv = vk.bracket(w, a.v);
    const auto bww = vk.bracket(w, w);
    const int nq = gauss_rule(2, kRulePlate).size();
    double lhs = 0, rhs = 0;
    for (int c = 0; c < s.mesh.plate.ncells(); ++c)
        for (int q = 0; q < nq; ++q) {
            const double wq = vk.quad_weight(c, q);
            lhs += wq * bwv[static_cast<size_t>(c) * nq + q] * vk.value_at(w, c, q);
            rhs += wq * bww[static_cast<size_t>(c) * nq + q] * vk.value_at(a.v, c, q);
        }
    CHECK(lhs == Catch::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("central differences of the potential match the force at second order") {
    Setup s(4);
    VkContext vk(s.forms);
    const Vec w = random_plate(s.layout, 80, 0.8);
    const Vec z = random_plate(s.layout, 81, 0.8);

    for (bool with_f0 : {false, true}) {
        VkConfig cfg;
        if (with_f0) cfg.F0 = random_plate(s.layout, 82, 0.5);
        const double dir = -vk.force_local(w, cfg).dot(z);

        std::vector<double> eps = {1e-2, 5e-3, 2.5e-3}, errs;
        for (double e : eps) {
            const double cd =
                (vk.potential(Vec(w + e * z), cfg) - vk.potential(Vec(w - e * z), cfg)) /
                (2.0 * e);
            errs.push_back(std::abs(cd - dir));
        }
        const double slope = std::log(errs[0] / errs[2]) / std::log(eps[0] / eps[2]);
        CHECK(slope == Catch::Approx(2.0).margin(0.1));
    }
}

TEST_CASE("nonlinear step: zero state is a one-iteration fixed point") {
    Setup s(2);
    VkConfig cfg;
    NonlinearStepper stepper(s.forms, 0.01, cfg);
    const auto [s1, rep] = stepper.step(StateVector::zero(s.layout));
    CHECK(s1.vel.norm() == 0.0);
    CHECK(rep.E == 0.0);
    CHECK(rep.Pi == 0.0);
}

TEST_CASE("nonlinear run: E + Pi nonincreasing for small data") {
    Setup s(2, 1, 1, 1, 0.2);
    VkConfig cfg;
    NonlinearStepper stepper(s.forms, 1e-3, cfg);
    IcSpec spec;
    spec.catalog = "random";
    spec.seed = 17;
    spec.amplitude = 0.05;
    StateVector st = build_initial_state(s.forms, spec);

    double prev = s.forms.energy(st.disp, st.vel) +
                  stepper.vk().potential(stepper.vk().w_block(st), cfg);
    const double e0 = prev;
    double sup = prev;
    // full unit horizon: no blowup, per-step drift within tolerance
    for (int k = 0; k < 1000; ++k) {
        auto [s1, rep] = stepper.step(st);
        const double total = rep.E + rep.Pi;
        if (k < 100) CHECK(total <= prev + 1e-6);
        sup = std::max(sup, total);
        prev = total;
        st = std::move(s1);
    }
    CHECK(sup <= e0 + 1e-3);
}

TEST_CASE("single-cell plate degenerates gracefully") {
    Setup s(1);
    VkContext vk(s.forms);
    CHECK(vk.n_plate_dofs() == 0);
    VkConfig cfg;
    CHECK(vk.potential(Vec::Zero(0), cfg) == 0.0);
    NonlinearStepper stepper(s.forms, 0.01, cfg);
    const auto [s1, rep] = stepper.step(StateVector::zero(s.layout));
    CHECK(rep.E == 0.0);
}

TEST_CASE("Picard loop reports non-convergence with iterate history") {
    Setup s(2);
    VkConfig cfg;
    cfg.picard_max_iter = 1;  // a dynamic state cannot settle in one sweep
    NonlinearStepper stepper(s.forms, 0.05, cfg);
    IcSpec spec;
    spec.catalog = "random";
    spec.seed = 4;
    spec.amplitude = 0.5;
    const StateVector st = build_initial_state(s.forms, spec);
    try {
        stepper.step(st);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(e.residual_history.size() == 1);
    }
}
