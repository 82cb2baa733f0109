#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "mlf/evolution.hpp"
#include "mlf/initial_conditions.hpp"

using namespace mlf;

namespace {

struct Setup {
    MultilayerMesh mesh;
    DofLayout layout;
    MaterialParams params;
    Forms forms;
    explicit Setup(int n, int nzb = 2, int nzf = 2, int nsp = 1, double h = 0.2,
                   MaterialParams p = {})
        : mesh(build_mesh(n, nzb, nzf, nsp, h)), layout(build_dof_layout(mesh)), params(p),
          forms(mesh, layout, params) {}
};

StateVector random_state(const Forms& forms, std::uint64_t seed, double amp = 0.5) {
    IcSpec spec;
    spec.catalog = "random";
    spec.seed = seed;
    spec.amplitude = amp;
    return build_initial_state(forms, spec);
}

std::pair<Vec, Vec> make_random_data(const DofLayout& L, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vec fd = Vec::Zero(L.n_sigma), fv = Vec::Zero(L.n_sigma);
    for (int g = L.block_begin(Field::Eta); g < L.block_end(Field::Eta); ++g) fd[g] = dist(rng);
    for (int g = L.block_begin(Field::W); g < L.block_end(Field::W); ++g) fd[g] = dist(rng);
    for (int g = 0; g < L.n_sigma; ++g) fv[g] = dist(rng);
    return {fd, fv};
}

}  // namespace

TEST_CASE("resolvent of zero data is zero") {
    Setup s(2);
    const Vec z = Vec::Zero(s.layout.n_sigma);
    const StateVector y = resolvent_solve(s.forms, z, z);
    CHECK(y.disp.norm() == 0.0);
    CHECK(y.vel.norm() == 0.0);
    CHECK(y.pi.norm() == 0.0);
}

TEST_CASE("contraction: resolvent norm never exceeds the data norm") {
    Setup s(2, 2, 2, 2, 0.2);
    for (int rep = 0; rep < 10; ++rep) {
        const auto [fd, fv] = make_random_data(s.layout, 300 + rep);
        const StateVector y = resolvent_solve(s.forms, fd, fv);
        const double ny = std::sqrt(x_norm_sq(s.forms, y));
        const double nf = std::sqrt(s.forms.energy(fd, fv));
        CHECK(ny <= nf + 1e-8);
        CHECK((s.forms.constraint() * y.vel).norm() <= 1e-10);
    }
}

TEST_CASE("one dt = 1 velocity step from zero state reproduces the resolvent") {
    Setup s(2, 2, 2, 2, 0.2);
    const auto [fd, fv] = make_random_data(s.layout, 42);
    const StateVector y_res = resolvent_solve(s.forms, fd, fv);

    Stepper stepper(s.forms, 1.0);
    stepper.set_forcing_vectors(fd, fv);
    const StateVector z0 = StateVector::zero(s.layout);
    const auto [y_step, rep] = stepper.step(z0);

    const double scale = y_res.vel.norm();
    CHECK((y_step.vel - y_res.vel).norm() <= 1e-9 * scale);
    CHECK((y_step.pi - y_res.pi).norm() <= 1e-8 * std::max(y_res.pi.norm(), 1.0));
    // displacement reconstruction: eta = zeta + f1, w = v + f4
    const Vec expected_disp = mask_disp_blocks(s.layout, Vec(y_step.vel + fd));
    CHECK((y_step.disp - expected_disp).norm() <= 1e-12 * std::max(1.0, expected_disp.norm()));
    CHECK((y_step.disp - y_res.disp).norm() <= 1e-9 * std::max(1.0, y_res.disp.norm()));
}

TEST_CASE("zero state with zero forcing stays zero") {
    Setup s(2);
    Stepper stepper(s.forms, 0.01);
    const auto [s1, rep] = stepper.step(StateVector::zero(s.layout));
    CHECK(s1.disp.norm() == 0.0);
    CHECK(s1.vel.norm() == 0.0);
    CHECK(rep.E == 0.0);
    CHECK(rep.D_diss == 0.0);
    CHECK(rep.J == 0.0);
    CHECK(rep.identity_residual == 0.0);
}

TEST_CASE("single step strictly decreases the energy of a random state") {
    Setup s(2, 2, 2, 2, 0.2);
    const StateVector s0 = random_state(s.forms, 7);
    Stepper stepper(s.forms, 0.01);
    const auto [s1, rep] = stepper.step(s0);
    const double e0 = s.forms.energy(s0.disp, s0.vel);
    CHECK(rep.E < e0);
    CHECK(rep.J >= 0.0);
    CHECK(rep.D_diss >= 0.0);
}

TEST_CASE("exact discrete energy identity over 100 steps") {
    Setup s(2, 2, 2, 1, 0.2);
    StateVector st = random_state(s.forms, 21);
    Stepper stepper(s.forms, 0.02);
    double e_prev = s.forms.energy(st.disp, st.vel);
    for (int k = 0; k < 100; ++k) {
        auto [s1, rep] = stepper.step(st);
        CHECK(rep.relative_residual(e_prev) <= 1e-8);
        CHECK(rep.constraint_norm <= 1e-10);
        e_prev = rep.E;
        st = std::move(s1);
    }
}

TEST_CASE("energy identity holds with random constant forcing") {
    Setup s(2, 1, 1, 1, 0.2);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vec gd = Vec::Zero(s.layout.n_sigma), gv(s.layout.n_sigma);
    for (int g = s.layout.block_begin(Field::Eta); g < s.layout.block_end(Field::Eta); ++g)
        gd[g] = dist(rng);
    for (int g = s.layout.block_begin(Field::W); g < s.layout.block_end(Field::W); ++g)
        gd[g] = dist(rng);
    for (int i = 0; i < s.layout.n_sigma; ++i) gv[i] = dist(rng);

    StateVector st = random_state(s.forms, 33);
    Stepper stepper(s.forms, 0.05);
    stepper.set_forcing_vectors(gd, gv);
    double e_prev = s.forms.energy(st.disp, st.vel);
    for (int k = 0; k < 50; ++k) {
        auto [s1, rep] = stepper.step(st);
        CHECK(rep.relative_residual(e_prev) <= 1e-8);
        e_prev = rep.E;
        st = std::move(s1);
    }
}

TEST_CASE("simulate: zero data give an all-zero trajectory") {
    Setup s(1);
    Stepper stepper(s.forms, 0.1);
    const Trajectory tr = simulate(stepper, StateVector::zero(s.layout), 10);
    REQUIRE(tr.completed);
    REQUIRE(tr.states.size() == 11);
    for (const auto& st : tr.states) {
        CHECK(st.disp.norm() == 0.0);
        CHECK(st.vel.norm() == 0.0);
    }
}

TEST_CASE("simulate: monotone decay without forcing") {
    Setup s(2, 2, 2, 1, 0.2);
    Stepper stepper(s.forms, 0.01);
    const Trajectory tr = simulate(stepper, random_state(s.forms, 55), 200);
    REQUIRE(tr.completed);
    for (size_t k = 0; k + 1 < tr.states.size(); ++k) {
        const double e0 = s.forms.energy(tr.states[k].disp, tr.states[k].vel);
        const double e1 = s.forms.energy(tr.states[k + 1].disp, tr.states[k + 1].vel);
        CHECK(e1 - e0 <= 1e-10);
    }
    const AuditSummary audit = energy_audit(s.forms, tr.states, stepper.dt());
    CHECK(audit.pass());
    CHECK(audit.monotone);
}

TEST_CASE("numerical dissipation halves with the step size") {
    Setup s(2, 2, 2, 1, 0.2);
    IcSpec spec;
    spec.catalog = "fourier";
    spec.amplitude = 0.5;
    StateVector s0 = build_initial_state(s.forms, spec);
    // damp the stiff initial transient so the trajectory is smooth in time
    {
        Stepper burn(s.forms, 0.05);
        s0 = simulate(burn, s0, 20).states.back();
    }

    const auto total_j = [&](double dt, int steps) {
        Stepper stepper(s.forms, dt);
        const Trajectory tr = simulate(stepper, s0, steps);
        double j = 0;
        for (const auto& r : tr.reports) j += r.J;
        return j;
    };
    const double j1 = total_j(0.01, 25);
    const double j2 = total_j(0.005, 50);
    CHECK(j2 / j1 == Catch::Approx(0.5).margin(0.12));
}

TEST_CASE("audit flags a corrupted trajectory") {
    Setup s(2, 1, 1, 1, 0.2);
    Stepper stepper(s.forms, 0.02);
    Trajectory tr = simulate(stepper, random_state(s.forms, 77), 20);
    REQUIRE(tr.completed);
    CHECK(energy_audit(s.forms, tr.states, stepper.dt()).pass());

    // perturb the final state: exactly the last step is flagged
    tr.states.back().vel[0] += 0.1;
    const AuditSummary bad = energy_audit(s.forms, tr.states, stepper.dt());
    REQUIRE(bad.flagged_steps.size() == 1);
    CHECK(bad.flagged_steps[0] == 19);
}

TEST_CASE("constraint and slaving persist along a trajectory") {
    Setup s(2, 2, 2, 2, 0.2);
    Stepper stepper(s.forms, 0.01);
    const Trajectory tr = simulate(stepper, random_state(s.forms, 99), 20);
    REQUIRE(tr.completed);
    const DofLayout& L = s.layout;
    for (const auto& st : tr.states) {
        CHECK((s.forms.constraint() * st.vel).norm() <= 1e-10);
        // resolve interface DOFs through both fields and compare bit-exactly
        for (int j = 0; j <= s.mesh.n_plane; ++j)
            for (int i = 0; i <= s.mesh.n_plane; ++i) {
                const double eta3 =
                    raw_dof_value(L, st.disp, Field::Eta, L.eta_raw(i, j, 0, 2));
                const double wval = raw_dof_value(
                    L, st.disp, Field::W,
                    L.w_raw(i % s.mesh.n_plane, j % s.mesh.n_plane, PlateDof::Value));
                CHECK(eta3 == wval);
                const double pb =
                    raw_dof_value(L, st.vel, Field::Pb, L.pb_raw(i, j, 0));
                const double pp = raw_dof_value(
                    L, st.vel, Field::Pp,
                    L.pp_raw(i % s.mesh.n_plane, j % s.mesh.n_plane, s.mesh.ns_p));
                CHECK(pb == pp);
            }
    }
}

TEST_CASE("initial conditions are divergence-free after projection") {
    Setup s(2, 1, 2, 1, 0.2);
    for (const char* cat : {"random", "fourier"}) {
        IcSpec spec;
        spec.catalog = cat;
        spec.seed = 3;
        const StateVector st = build_initial_state(s.forms, spec);
        CHECK((s.forms.constraint() * st.vel).norm() <= 1e-10);
    }
    IcSpec bad;
    bad.catalog = "nope";
    CHECK_THROWS_AS(build_initial_state(s.forms, bad), std::invalid_argument);
}
