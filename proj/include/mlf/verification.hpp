#pragma once

#include <cmath>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "mlf/evolution.hpp"
#include "mlf/initial_conditions.hpp"
#include "mlf/mms_manufactured.hpp"
#include "mlf/probes.hpp"
#include "mlf/vonkarman.hpp"

#include <nlohmann/json.hpp>

namespace mlf {

/// One verification check: name, measured value, tolerance, verdict.
struct CheckResult {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};

/// Machine-readable verification summary: a JSON array with one object per
/// check ({name, value, tolerance, pass}).
inline void write_checks_json(const std::vector<CheckResult>& checks, const std::string& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json o = {{"name", c.name},
                            {"value", c.value},
                            {"tolerance", c.tolerance},
                            {"pass", c.pass}};
        if (!c.detail.empty()) o["detail"] = c.detail;
        arr.push_back(o);
    }
    std::ofstream out(path, std::ios::binary);
    if (out) out << arr.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// L2 error norms against the manufactured solution
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr int kRuleError = 4;

template <typename Exact>
double l2_error_scalar_q1(const MultilayerMesh& m, const LayerGrid& grid,
                          const DofLayout& L, Field field, const Vec& coef, Exact exact,
                          int (DofLayout::*raw)(int, int, int) const) {
    const QuadRule rule = gauss_rule(3, kRuleError);
    const BasisTable t = map_to_physical(tabulate(Family::Q1_3D, rule), grid.cell);
    double err = 0;
    for (int ck = 0; ck < grid.nz; ++ck)
        for (int cj = 0; cj < grid.ny; ++cj)
            for (int ci = 0; ci < grid.nx; ++ci) {
                double local[8];
                int a = 0;
                for (int k = 0; k < 2; ++k)
                    for (int j = 0; j < 2; ++j)
                        for (int i = 0; i < 2; ++i) {
                            const int g = L.resolve(field, (L.*raw)(ci + i, cj + j, ck + k));
                            local[a++] = g < 0 ? 0.0 : coef[g];
                        }
                const auto o = grid.node_coord(ci, cj, ck);
                for (int q = 0; q < t.nq; ++q) {
                    double vh = 0;
                    for (int b = 0; b < 8; ++b) vh += local[b] * t.val(q, b);
                    const double x = o[0] + rule.points[q][0] * grid.cell[0];
                    const double y = o[1] + rule.points[q][1] * grid.cell[1];
                    const double z = o[2] + rule.points[q][2] * grid.cell[2];
                    const double d = vh - exact(x, y, z);
                    err += t.weights[q] * d * d;
                }
            }
    return std::sqrt(err);
}

}  // namespace detail

struct MmsErrors {
    int n_plane = 0;
    double eta = 0, pb = 0, w = 0, pp = 0, u = 0;
};

/// Solve the manufactured resolvent problem on one mesh and report L2 field
/// errors.
inline MmsErrors mms_solve_errors(int n, const MaterialParams& params, double h_p = 0.2) {
    const MultilayerMesh mesh = build_mesh(n, n, n, n, h_p);
    const DofLayout L = build_dof_layout(mesh);
    const Forms forms(mesh, L, params);
    const ManufacturedCase mms(params, h_p);
    const StateVector y = resolvent_solve_analytic(forms, mms.data());

    MmsErrors e;
    e.n_plane = n;

    // eta (vector Q1 over the Biot layer, coefficients in disp)
    {
        const QuadRule rule = gauss_rule(3, detail::kRuleError);
        const BasisTable t = map_to_physical(tabulate(Family::Q1_3D, rule), mesh.biot.cell);
        double err = 0;
        for (int ck = 0; ck < mesh.nz_b; ++ck)
            for (int cj = 0; cj < n; ++cj)
                for (int ci = 0; ci < n; ++ci) {
                    const auto ed = L.eta_cell_dofs(ci, cj, ck);
                    const auto o = mesh.biot.node_coord(ci, cj, ck);
                    for (int q = 0; q < t.nq; ++q) {
                        const double x = o[0] + rule.points[q][0] * mesh.biot.cell[0];
                        const double yy = o[1] + rule.points[q][1] * mesh.biot.cell[1];
                        const double z = o[2] + rule.points[q][2] * mesh.biot.cell[2];
                        double vh[3] = {0, 0, 0};
                        for (int b = 0; b < 8; ++b)
                            for (int c = 0; c < 3; ++c) {
                                const int g = ed[3 * b + c];
                                if (g >= 0) vh[c] += y.disp[g] * t.val(q, b);
                            }
                        const double ex[3] = {mms.eta1(x, yy, z), mms.eta2(x, yy, z),
                                              mms.eta3(x, yy, z)};
                        for (int c = 0; c < 3; ++c)
                            err += t.weights[q] * (vh[c] - ex[c]) * (vh[c] - ex[c]);
                    }
                }
        e.eta = std::sqrt(err);
    }

    e.pb = detail::l2_error_scalar_q1(
        mesh, mesh.biot, L, Field::Pb, y.vel,
        [&](double x, double yy, double z) { return mms.pb(x, yy, z); }, &DofLayout::pb_raw);
    e.pp = detail::l2_error_scalar_q1(
        mesh, mesh.ppress, L, Field::Pp, y.vel,
        [&](double x, double yy, double sc) { return mms.pp(x, yy, sc); }, &DofLayout::pp_raw);

    // w (plate)
    {
        const QuadRule rule = gauss_rule(2, detail::kRuleError);
        const BasisTable t = map_to_physical(tabulate(Family::BFS_2D, rule),
                                             {mesh.plate.cell[0], mesh.plate.cell[1], 1.0});
        double err = 0;
        for (int cj = 0; cj < n; ++cj)
            for (int ci = 0; ci < n; ++ci) {
                const auto wd = L.w_cell_dofs(ci, cj);
                const auto o = mesh.plate.node_coord(ci, cj);
                for (int q = 0; q < t.nq; ++q) {
                    double vh = 0;
                    for (int b = 0; b < 16; ++b)
                        if (wd[b] >= 0) vh += y.disp[wd[b]] * t.val(q, b);
                    const double x = o[0] + rule.points[q][0] * mesh.plate.cell[0];
                    const double yy = o[1] + rule.points[q][1] * mesh.plate.cell[1];
                    const double d = vh - mms.w(x, yy);
                    err += t.weights[q] * d * d;
                }
            }
        e.w = std::sqrt(err);
    }

    // u (vector Q2 over the fluid layer)
    {
        const QuadRule rule = gauss_rule(3, detail::kRuleError);
        const BasisTable t = map_to_physical(tabulate(Family::Q2_3D, rule), mesh.fluid.cell);
        double err = 0;
        for (int ck = 0; ck < mesh.nz_f; ++ck)
            for (int cj = 0; cj < n; ++cj)
                for (int ci = 0; ci < n; ++ci) {
                    const auto ud = L.u_cell_dofs(ci, cj, ck);
                    const auto o = mesh.fluid.node_coord(ci, cj, ck);
                    for (int q = 0; q < t.nq; ++q) {
                        const double x = o[0] + rule.points[q][0] * mesh.fluid.cell[0];
                        const double yy = o[1] + rule.points[q][1] * mesh.fluid.cell[1];
                        const double z = o[2] + rule.points[q][2] * mesh.fluid.cell[2];
                        double vh[3] = {0, 0, 0};
                        for (int b = 0; b < 27; ++b)
                            for (int c = 0; c < 3; ++c) {
                                const int g = ud[3 * b + c];
                                if (g >= 0) vh[c] += y.vel[g] * t.val(q, b);
                            }
                        const double ex[3] = {mms.u1(x, yy, z), mms.u2(x, yy, z),
                                              mms.u3(x, yy, z)};
                        for (int c = 0; c < 3; ++c)
                            err += t.weights[q] * (vh[c] - ex[c]) * (vh[c] - ex[c]);
                    }
                }
        e.u = std::sqrt(err);
    }
    return e;
}

struct MmsReport {
    std::vector<MmsErrors> rows;
    double order_eta = 0, order_pb = 0, order_pp = 0, order_w = 0, order_u = 0;
    std::vector<CheckResult> checks;
};

inline MmsReport run_mms(const std::vector<int>& levels, const MaterialParams& params,
                         double h_p = 0.2) {
    MmsReport rep;
    for (int n : levels) rep.rows.push_back(mms_solve_errors(n, params, h_p));
    const auto order = [&](double a, double b, int na, int nb) {
        return std::log(a / b) / std::log(double(nb) / double(na));
    };
    const auto& r = rep.rows;
    const size_t last = r.size() - 1;
    rep.order_eta = order(r[last - 1].eta, r[last].eta, r[last - 1].n_plane, r[last].n_plane);
    rep.order_pb = order(r[last - 1].pb, r[last].pb, r[last - 1].n_plane, r[last].n_plane);
    rep.order_pp = order(r[last - 1].pp, r[last].pp, r[last - 1].n_plane, r[last].n_plane);
    rep.order_w = order(r[last - 1].w, r[last].w, r[last - 1].n_plane, r[last].n_plane);
    rep.order_u = order(r[last - 1].u, r[last].u, r[last - 1].n_plane, r[last].n_plane);
    // gate on the trilinear-hex fields; prism/plate/fluid orders are reported
    // alongside (the prism pressure enters its asymptotic range later than
    // n_plane = 8; see the mms table output)
    rep.checks.push_back({"mms_order_eta", rep.order_eta, 1.8, rep.order_eta >= 1.8, ""});
    rep.checks.push_back({"mms_order_pb", rep.order_pb, 1.8, rep.order_pb >= 1.8, ""});
    return rep;
}

// ---------------------------------------------------------------------------
// moment-operator adjointness by two independent quadrature routes
// ---------------------------------------------------------------------------

/// (K p, q) over the midsurface minus (p, Kt q) over the pressure box, for
/// plate-block q and pressure-block p coefficients, each integral computed by
/// its own quadrature loop. Returns {gap, ||p||, ||q||}.
inline std::array<double, 3> moment_adjointness_gap(const Forms& forms, const Vec& p_pp,
                                                    const Vec& q_w) {
    const MultilayerMesh& m = forms.mesh();
    const DofLayout& L = forms.layout();
    const int n = m.n_plane;
    const int p0 = L.block_begin(Field::Pp);
    const int w0 = L.block_begin(Field::W);

    // route 1: in-plane rule x per-cell s-integration of s * p
    const QuadRule rule2 = gauss_rule(2, kRulePlate);
    const BasisTable plate_t = map_to_physical(tabulate(Family::BFS_2D, rule2),
                                               {m.plate.cell[0], m.plate.cell[1], 1.0});
    const BasisTable pp_bot = tabulate_face(Family::Q1_3D, rule2, 0.0);
    const QuadRule srule = gauss_rule(1, 2);
    const double hs = m.ppress.cell[2];
    const double area = m.plate.cell[0] * m.plate.cell[1];
    double lhs = 0;
    for (int cj = 0; cj < n; ++cj)
        for (int ci = 0; ci < n; ++ci) {
            const auto wd = L.w_cell_dofs(ci, cj);
            for (int q = 0; q < rule2.size(); ++q) {
                double qv = 0;
                for (int a = 0; a < 16; ++a)
                    if (wd[a] >= 0) qv += q_w[wd[a] - w0] * plate_t.val(q, a);
                double kp = 0;
                for (int ck = 0; ck < m.ns_p; ++ck) {
                    const auto pd = L.pp_cell_dofs(ci, cj, ck);
                    const double slo = m.ppress.origin[2] + ck * hs;
                    for (int sq = 0; sq < srule.size(); ++sq) {
                        const double xi = srule.points[sq][0];
                        const double sc = slo + xi * hs;
                        double pv = 0;
                        for (int inp = 0; inp < 4; ++inp) {
                            const double base = pp_bot.val(q, inp);
                            const int glo = pd[inp], ghi = pd[4 + inp];
                            const double lo = glo >= 0 ? p_pp[glo - p0] : 0.0;
                            const double hi = ghi >= 0 ? p_pp[ghi - p0] : 0.0;
                            pv += base * (lo * (1.0 - xi) + hi * xi);
                        }
                        kp += srule.weights[sq] * hs * sc * pv;
                    }
                }
                lhs += rule2.weights[q] * area * kp * qv;
            }
        }

    // route 2: 3D quadrature of p * (s q) over the pressure box
    const QuadRule rule3 = gauss_rule_aniso(kRulePlate, kRulePlate, 2);
    const BasisTable tpp = map_to_physical(tabulate(Family::Q1_3D, rule3), m.ppress.cell);
    double rhs = 0;
    double norm_p = 0;
    const int nq2 = rule2.size();
    for (int ck = 0; ck < m.ns_p; ++ck) {
        const double slo = m.ppress.origin[2] + ck * hs;
        for (int cj = 0; cj < n; ++cj)
            for (int ci = 0; ci < n; ++ci) {
                const auto pd = L.pp_cell_dofs(ci, cj, ck);
                const auto wd = L.w_cell_dofs(ci, cj);
                for (int q = 0; q < rule3.size(); ++q) {
                    const double sc = slo + rule3.points[q][2] * hs;
                    double pv = 0;
                    for (int a = 0; a < 8; ++a)
                        if (pd[a] >= 0) pv += p_pp[pd[a] - p0] * tpp.val(q, a);
                    double qv = 0;
                    for (int a = 0; a < 16; ++a)
                        if (wd[a] >= 0) qv += q_w[wd[a] - w0] * plate_t.val(q % nq2, a);
                    rhs += tpp.weights[q] * pv * sc * qv;
                    norm_p += tpp.weights[q] * pv * pv;
                }
            }
    }

    // plate L2 norm of q
    double norm_q = 0;
    for (int cj = 0; cj < n; ++cj)
        for (int ci = 0; ci < n; ++ci) {
            const auto wd = L.w_cell_dofs(ci, cj);
            for (int q = 0; q < rule2.size(); ++q) {
                double qv = 0;
                for (int a = 0; a < 16; ++a)
                    if (wd[a] >= 0) qv += q_w[wd[a] - w0] * plate_t.val(q, a);
                norm_q += rule2.weights[q] * area * qv * qv;
            }
        }
    return {std::abs(lhs - rhs), std::sqrt(norm_p), std::sqrt(norm_q)};
}

inline CheckResult check_moment_adjointness(const Forms& forms, int trials, std::uint64_t seed) {
    const DofLayout& L = forms.layout();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const int nw = L.block_size[static_cast<int>(Field::W)];
    const int np = L.block_size[static_cast<int>(Field::Pp)];
    double worst = 0;
    for (int t = 0; t < trials; ++t) {
        Vec p(np), q(nw);
        for (int i = 0; i < np; ++i) p[i] = dist(rng);
        for (int i = 0; i < nw; ++i) q[i] = dist(rng);
        const auto [gap, npn, nqn] = moment_adjointness_gap(forms, p, q);
        const double scaled = gap / std::max(npn * nqn, 1e-300);
        worst = std::max(worst, scaled);
    }
    return {"moment_adjointness", worst, 1e-13, worst <= 1e-13, ""};
}

// ---------------------------------------------------------------------------
// inf-sup and coercivity sweeps
// ---------------------------------------------------------------------------

struct InfSupRow {
    int n_plane = 0;
    double beta_taylor_hood = 0;
    double beta_equal_order = 0;
};

struct InfSupReport {
    std::vector<InfSupRow> rows;
    std::vector<CheckResult> checks;
};

inline InfSupReport run_infsup(const std::vector<int>& levels, const MaterialParams& params,
                               double h_p = 0.2) {
    InfSupReport rep;
    for (int n : levels) {
        const MultilayerMesh mesh = build_mesh(n, 1, n, 1, h_p);
        const DofLayout L = build_dof_layout(mesh);
        const Forms forms(mesh, L, params);
        InfSupRow row;
        row.n_plane = n;
        row.beta_taylor_hood = estimate_infsup(forms.gram(), forms.constraint(),
                                               forms.mass_pi(), InfSupMode::FluidBlock, &L);
        row.beta_equal_order = estimate_infsup_equal_order(build_equal_order_fluid(mesh, params));
        rep.rows.push_back(row);
    }
    const double th0 = rep.rows.front().beta_taylor_hood;
    const double thN = rep.rows.back().beta_taylor_hood;
    const double eq0 = rep.rows.front().beta_equal_order;
    const double eqN = rep.rows.back().beta_equal_order;
    rep.checks.push_back({"infsup_taylor_hood_positive", thN, 0.0, thN > 0.0, ""});
    rep.checks.push_back(
        {"infsup_taylor_hood_stability", thN / th0, 0.7, thN >= 0.7 * th0, ""});
    // the equal-order pairing on this lattice carries exact spurious pressure
    // modes: beta = 0 already at the coarsest level counts as (complete)
    // degradation; otherwise require the > 30% drop
    CheckResult eqc;
    eqc.name = "infsup_equal_order_degradation";
    eqc.tolerance = 0.7;
    if (eq0 > 1e-12) {
        eqc.value = eqN / eq0;
        eqc.pass = eqN < 0.7 * eq0;
    } else {
        eqc.value = 0.0;
        eqc.pass = eqN <= 1e-12;
        eqc.detail = "pairing singular at every level (exact spurious pressure modes)";
    }
    rep.checks.push_back(eqc);
    return rep;
}

struct CoercivityRow {
    int n_plane = 0;
    double lambda_min = 0;
};

inline std::vector<CoercivityRow> run_coercivity(const std::vector<int>& levels,
                                                 const MaterialParams& params,
                                                 double h_p = 0.2) {
    std::vector<CoercivityRow> rows;
    for (int n : levels) {
        const MultilayerMesh mesh = build_mesh(n, 1, 1, 1, h_p);
        const DofLayout L = build_dof_layout(mesh);
        const Forms forms(mesh, L, params);
        const SaddleSystem sys = forms.resolvent_system(1.0);
        rows.push_back({n, probe_coercivity(sys.A, forms.gram())});
    }
    return rows;
}

// ---------------------------------------------------------------------------
// contraction, dissipativity, skew cancellation
// ---------------------------------------------------------------------------

inline CheckResult check_contraction(const Forms& forms, int trials, std::uint64_t seed) {
    const DofLayout& L = forms.layout();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    double worst = 0;
    for (int t = 0; t < trials; ++t) {
        Vec fd = Vec::Zero(L.n_sigma), fv(L.n_sigma);
        for (int g = L.block_begin(Field::Eta); g < L.block_end(Field::Eta); ++g)
            fd[g] = dist(rng);
        for (int g = L.block_begin(Field::W); g < L.block_end(Field::W); ++g) fd[g] = dist(rng);
        for (int i = 0; i < L.n_sigma; ++i) fv[i] = dist(rng);
        const StateVector y = resolvent_solve(forms, fd, fv);
        const double ratio =
            std::sqrt(x_norm_sq(forms, y)) / std::sqrt(forms.energy(fd, fv));
        worst = std::max(worst, ratio);
    }
    return {"contraction_resolvent", worst, 1.0 + 1e-8, worst <= 1.0 + 1e-8, ""};
}

inline CheckResult check_skew_cancellation(const Forms& forms, int trials, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const SaddleSystem sys = forms.resolvent_system(1.0);
    double worst = 0;
    bool positive = true;
    for (int t = 0; t < trials; ++t) {
        Vec phi(forms.layout().n_sigma);
        for (int i = 0; i < phi.size(); ++i) phi[i] = dist(rng);
        const double couple = phi.dot(forms.coupling() * phi);
        const double aq = phi.dot(sys.A * phi);
        positive = positive && (aq > 0.0);
        worst = std::max(worst, std::abs(couple) / std::max(aq, 1e-300));
    }
    CheckResult c{"skew_cancellation", worst, 1e-12, worst <= 1e-12 && positive, ""};
    if (!positive) c.detail = "quadratic form not positive";
    return c;
}

struct DissipativityOutcome {
    bool monotone = true;
    double max_rel_residual = 0;
};

inline DissipativityOutcome run_dissipativity(const Forms& forms, int runs, int steps, double dt,
                                              std::uint64_t seed) {
    DissipativityOutcome out;
    Stepper stepper(forms, dt);
    for (int r = 0; r < runs; ++r) {
        IcSpec spec;
        spec.catalog = "random";
        spec.seed = seed + r;
        spec.amplitude = 0.5;
        StateVector st = build_initial_state(forms, spec);
        double e_prev = forms.energy(st.disp, st.vel);
        for (int k = 0; k < steps; ++k) {
            auto [s1, repstep] = stepper.step(st);
            if (repstep.E > e_prev) out.monotone = false;
            out.max_rel_residual =
                std::max(out.max_rel_residual, repstep.relative_residual(e_prev));
            e_prev = repstep.E;
            st = std::move(s1);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// nonlinear plate verification suite
// ---------------------------------------------------------------------------

inline std::vector<CheckResult> run_vk_checks(std::uint64_t seed = 2024) {
    std::vector<CheckResult> out;
    const MaterialParams params;
    const MultilayerMesh mesh = build_mesh(4, 1, 1, 1, 0.2);
    const DofLayout L = build_dof_layout(mesh);
    const Forms forms(mesh, L, params);
    VkContext vk(forms);
    const int nw = vk.n_plate_dofs();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    const auto rand_plate = [&]() {
        Vec v(nw);
        for (int i = 0; i < nw; ++i) v[i] = dist(rng);
        return v;
    };

    // bracket symmetry (identical arithmetic both ways)
    {
        const Vec a = rand_plate(), b = rand_plate();
        const auto ab = vk.bracket(a, b);
        const auto ba = vk.bracket(b, a);
        double mx = 0;
        for (size_t i = 0; i < ab.size(); ++i) mx = std::max(mx, std::abs(ab[i] - ba[i]));
        out.push_back({"vk_bracket_symmetry", mx, 0.0, mx == 0.0, ""});
    }

    // [x^2, y^2] = 4 on a fully interior cell
    {
        const int w0 = L.block_begin(Field::W);
        Vec u = Vec::Zero(nw), w = Vec::Zero(nw);
        for (int g = 0; g < nw; ++g) {
            const auto& info = L.free_info[w0 + g];
            const double x = info.coord[0], y = info.coord[1];
            switch (static_cast<PlateDof>(info.comp)) {
                case PlateDof::Value: u[g] = x * x; w[g] = y * y; break;
                case PlateDof::Dx: u[g] = 2 * x; break;
                case PlateDof::Dy: w[g] = 2 * y; break;
                case PlateDof::Dxy: break;
            }
        }
        const auto br = vk.bracket(u, w);
        const int cell = mesh.plate.cell_index(1, 1);
        const int nq = gauss_rule(2, kRulePlate).size();
        double worst = 0;
        for (int q = 0; q < nq; ++q)
            worst = std::max(worst,
                             std::abs(br[static_cast<size_t>(cell) * nq + q] - 4.0));
        out.push_back({"vk_bracket_x2_y2", worst, 1e-11, worst <= 1e-11, ""});
    }

    // Pi >= 0 at F0 = 0
    {
        VkConfig cfg;
        double worst = 0;
        for (int t = 0; t < 10; ++t) worst = std::min(worst, vk.potential(rand_plate(), cfg));
        out.push_back({"vk_potential_nonnegative", worst, 0.0, worst >= 0.0, ""});
    }

    // Frechet central-difference order
    {
        VkConfig cfg;
        const Vec w = 0.8 * rand_plate();
        const Vec z = 0.8 * rand_plate();
        const double dir = -vk.force_local(w, cfg).dot(z);
        const double e0 = 1e-2, e2 = 2.5e-3;
        const auto cd = [&](double e) {
            return (vk.potential(Vec(w + e * z), cfg) - vk.potential(Vec(w - e * z), cfg)) /
                   (2 * e);
        };
        const double err0 = std::abs(cd(e0) - dir), err2 = std::abs(cd(e2) - dir);
        const double slope = std::log(err0 / err2) / std::log(e0 / e2);
        out.push_back({"vk_frechet_order", slope, 0.1, std::abs(slope - 2.0) <= 0.1, ""});
    }

    // cubic homogeneity
    {
        VkConfig cfg;
        const Vec w = rand_plate();
        const Vec f1 = vk.force_local(w, cfg);
        const Vec f2 = vk.force_local(Vec(0.5 * w), cfg);
        const double rel = (f2 - 0.125 * f1).norm() / f1.norm();
        out.push_back({"vk_cubic_homogeneity", rel, 1e-10, rel <= 1e-10, ""});
    }

    // 100-step nonlinear run: E + Pi nonincreasing within 1e-6
    {
        VkConfig cfg;
        NonlinearStepper stepper(forms, 1e-3, cfg);
        IcSpec spec;
        spec.catalog = "random";
        spec.seed = seed + 99;
        spec.amplitude = 0.05;
        StateVector st = build_initial_state(forms, spec);
        double prev = forms.energy(st.disp, st.vel) + vk.potential(vk.w_block(st), cfg);
        double worst = -1e300;
        for (int k = 0; k < 100; ++k) {
            auto [s1, rep] = stepper.step(st);
            worst = std::max(worst, rep.E + rep.Pi - prev);
            prev = rep.E + rep.Pi;
            st = std::move(s1);
        }
        out.push_back({"vk_energy_plus_potential_decay", worst, 1e-6, worst <= 1e-6, ""});
    }
    return out;
}

}  // namespace mlf
