#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <vector>

#include "mlf/dof_layout.hpp"
#include "mlf/elements.hpp"
#include "mlf/materials.hpp"
#include "mlf/mesh.hpp"
#include "mlf/quadrature.hpp"
#include "mlf/state.hpp"

namespace mlf {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// Quadrature point counts per axis. The plate and interface rules are exact
// through degree 7, which covers bicubic x bicubic pairings and keeps the
// moment-operator adjointness and the coupling antisymmetry exact identities
// of the assembled matrices.
inline constexpr int kRuleBulk = 2;
inline constexpr int kRuleFluid = 3;
inline constexpr int kRulePlate = 4;
inline constexpr int kRuleLoad = 4;

/// Block saddle system over the free Sigma DOFs plus the fluid pressure
/// multiplier: [A B^T; B 0] [phi; pi] = [f; g].
struct SaddleSystem {
    enum class Mode { Resolvent, VelocityStep };
    Mode mode = Mode::Resolvent;
    double lambda_or_dt = 1.0;
    SpMat A;  // n_sigma x n_sigma
    SpMat B;  // n_pi x n_sigma (only U-block columns are nonzero)
    Vec f;
    Vec g;
};

/// Analytic data for the lambda = 1 resolvent functional. div_f1 and lap_f4
/// are supplied in closed form by the caller.
struct ResolventData {
    std::function<double(double, double, double)> f1[3], f2[3], f7[3];
    std::function<double(double, double, double)> div_f1, f3;
    std::function<double(double, double)> f4, lap_f4, f5;
    std::function<double(double, double)> f4_dx, f4_dy, f4_dxy;  // Hermite data for f4
    std::function<double(double, double, double)> f6;            // (x1, x2, s)
};

/// Time-dependent physical sources. Each slot may be empty.
struct SourceFunctions {
    std::function<double(double, double, double, double)> F_b[3];  // (x, t)
    std::function<double(double, double, double, double)> S;
    std::function<double(double, double, double, double)> F_f[3];
    std::function<double(double, double, double)> plate;           // (x1, x2, t)
    std::function<double(double, double, double, double)> pp;      // (x1, x2, s, t)

    bool empty() const {
        return !F_b[0] && !F_b[1] && !F_b[2] && !S && !F_f[0] && !F_f[1] && !F_f[2] &&
               !plate && !pp;
    }
};

namespace detail {

inline SpMat from_triplets(int rows, int cols, std::vector<Triplet>& trips) {
    SpMat m(rows, cols);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
}

template <typename Dofs>
inline void scatter(std::vector<Triplet>& trips, const Dofs& rows, const Dofs& cols,
                    const Eigen::MatrixXd& elem) {
    for (int a = 0; a < static_cast<int>(rows.size()); ++a) {
        if (rows[a] < 0) continue;
        for (int b = 0; b < static_cast<int>(cols.size()); ++b) {
            if (cols[b] < 0) continue;
            const double v = elem(a, b);
            if (v != 0.0) trips.emplace_back(rows[a], cols[b], v);
        }
    }
}

template <typename RowDofs, typename ColDofs>
inline void scatter_rect(std::vector<Triplet>& trips, const RowDofs& rows, const ColDofs& cols,
                         const Eigen::MatrixXd& elem) {
    for (int a = 0; a < static_cast<int>(rows.size()); ++a) {
        if (rows[a] < 0) continue;
        for (int b = 0; b < static_cast<int>(cols.size()); ++b) {
            if (cols[b] < 0) continue;
            const double v = elem(a, b);
            if (v != 0.0) trips.emplace_back(rows[a], cols[b], v);
        }
    }
}

template <typename Dofs>
inline void scatter_vec(Vec& out, const Dofs& rows, const Eigen::VectorXd& elem) {
    for (int a = 0; a < static_cast<int>(rows.size()); ++a)
        if (rows[a] >= 0) out[rows[a]] += elem[a];
}

// ---- element kernels on physical tables ----

inline Eigen::MatrixXd kernel_mass(const BasisTable& t) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(t.ndof, t.ndof);
    for (int q = 0; q < t.nq; ++q)
        for (int a = 0; a < t.ndof; ++a)
            for (int b = 0; b < t.ndof; ++b)
                m(a, b) += t.weights[q] * t.val(q, a) * t.val(q, b);
    return m;
}

inline Eigen::MatrixXd kernel_stiff(const BasisTable& t) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(t.ndof, t.ndof);
    for (int q = 0; q < t.nq; ++q)
        for (int a = 0; a < t.ndof; ++a)
            for (int b = 0; b < t.ndof; ++b) {
                double s = 0;
                for (int d = 0; d < t.dim; ++d) s += t.der(q, a, d) * t.der(q, b, d);
                m(a, b) += t.weights[q] * s;
            }
    return m;
}

inline Eigen::MatrixXd kernel_stiff_dir(const BasisTable& t, int dir) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(t.ndof, t.ndof);
    for (int q = 0; q < t.nq; ++q)
        for (int a = 0; a < t.ndof; ++a)
            for (int b = 0; b < t.ndof; ++b)
                m(a, b) += t.weights[q] * t.der(q, a, dir) * t.der(q, b, dir);
    return m;
}

// Vector-valued kernels; DOF index = 3*node + component.
inline Eigen::MatrixXd kernel_vec_mass(const BasisTable& t) {
    const int n = t.ndof;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    const Eigen::MatrixXd s = kernel_mass(t);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < 3; ++c) m(3 * a + c, 3 * b + c) = s(a, b);
    return m;
}

// 2 (D(phi_a e_p), D(phi_b e_q)) = delta_pq grad.grad + d_q phi_a d_p phi_b
inline Eigen::MatrixXd kernel_vec_symgrad(const BasisTable& t) {
    const int n = t.ndof;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    for (int q = 0; q < t.nq; ++q) {
        const double w = t.weights[q];
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                double gg = 0;
                for (int d = 0; d < 3; ++d) gg += t.der(q, a, d) * t.der(q, b, d);
                for (int p = 0; p < 3; ++p)
                    for (int c = 0; c < 3; ++c)
                        m(3 * a + p, 3 * b + c) +=
                            w * ((p == c ? gg : 0.0) + t.der(q, a, c) * t.der(q, b, p));
            }
    }
    return m;
}

inline Eigen::MatrixXd kernel_vec_divdiv(const BasisTable& t) {
    const int n = t.ndof;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    for (int q = 0; q < t.nq; ++q)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int p = 0; p < 3; ++p)
                    for (int c = 0; c < 3; ++c)
                        m(3 * a + p, 3 * b + c) += t.weights[q] * t.der(q, a, p) * t.der(q, b, c);
    return m;
}

inline Eigen::MatrixXd kernel_vec_gradgrad(const BasisTable& t) {
    const int n = t.ndof;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    const Eigen::MatrixXd s = kernel_stiff(t);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < 3; ++c) m(3 * a + c, 3 * b + c) = s(a, b);
    return m;
}

// (sigma^E(phi_b e_q) : grad(phi_a e_p)), the full-gradient route to the
// elastic form. Kept as a second code path so the symmetrized-gradient
// identity can be checked entrywise against kernel_vec_symgrad/divdiv.
inline Eigen::MatrixXd kernel_vec_elastic_fullgrad(const BasisTable& t, double mu, double lam) {
    const int n = t.ndof;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    for (int q = 0; q < t.nq; ++q) {
        const double w = t.weights[q];
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int p = 0; p < 3; ++p)
                    for (int j = 0; j < 3; ++j) {
                        // sigma(phi_b e_q)_{pj} * d_j phi_a, summed over j
                        for (int c = 0; c < 3; ++c) {
                            const double sig = mu * (t.der(q, b, p) * (j == c ? 1.0 : 0.0) +
                                                     t.der(q, b, j) * (p == c ? 1.0 : 0.0)) +
                                               lam * t.der(q, b, c) * (p == j ? 1.0 : 0.0);
                            m(3 * a + p, 3 * b + c) += w * sig * t.der(q, a, j);
                        }
                    }
    }
    return m;
}

// Plate biharmonic (Lap, Lap) from the second-derivative table.
inline Eigen::MatrixXd kernel_bih(const BasisTable& t) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(t.ndof, t.ndof);
    for (int q = 0; q < t.nq; ++q)
        for (int a = 0; a < t.ndof; ++a) {
            const double la = t.der2(q, a, 0) + t.der2(q, a, 1);
            for (int b = 0; b < t.ndof; ++b)
                m(a, b) += t.weights[q] * la * (t.der2(q, b, 0) + t.der2(q, b, 1));
        }
    return m;
}

// -(chi_a, div(phi_b e_c))
inline Eigen::MatrixXd kernel_div_constraint(const BasisTable& tp, const BasisTable& tv) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(tp.ndof, 3 * tv.ndof);
    for (int q = 0; q < tp.nq; ++q)
        for (int a = 0; a < tp.ndof; ++a)
            for (int b = 0; b < tv.ndof; ++b)
                for (int c = 0; c < 3; ++c)
                    m(a, 3 * b + c) -= tp.weights[q] * tp.val(q, a) * tv.der(q, b, c);
    return m;
}

// (div(phi_b e_c), q_a)
inline Eigen::MatrixXd kernel_div_pair(const BasisTable& ts, const BasisTable& tv) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(ts.ndof, 3 * tv.ndof);
    for (int q = 0; q < ts.nq; ++q)
        for (int a = 0; a < ts.ndof; ++a)
            for (int b = 0; b < tv.ndof; ++b)
                for (int c = 0; c < 3; ++c)
                    m(a, 3 * b + c) += ts.weights[q] * ts.val(q, a) * tv.der(q, b, c);
    return m;
}

}  // namespace detail

/// Assembled forms for one mesh/parameter pair. Coupling blocks are exactly
/// antisymmetric by construction, so every system built here inherits the
/// energy-dissipation algebra of the continuous problem.
class Forms {
  public:
    Forms(const MultilayerMesh& mesh, const DofLayout& layout, const MaterialParams& params)
        : mesh_(&mesh), layout_(&layout), params_(params) {
        params_.validate();
        assemble_primitives();
        combine();
    }

    const DofLayout& layout() const { return *layout_; }
    const MultilayerMesh& mesh() const { return *mesh_; }
    const MaterialParams& params() const { return params_; }

    // Scaled primitives (physical coefficients baked in).
    const SpMat& mass_eta() const { return mass_eta_; }       // rho_b (eta, k)
    const SpMat& elastic() const { return elastic_; }         // a_E
    const SpMat& mass_pb() const { return mass_pb_; }         // c_b (p_b, q_b)
    const SpMat& stiff_pb() const { return stiff_pb_; }       // k_b (grad, grad)
    const SpMat& stiff_pb_unit() const { return stiff_pb_unit_; }
    const SpMat& mass_w() const { return mass_w_; }           // rho_p (w, xi)
    const SpMat& mass_w_unit() const { return mass_w_unit_; }
    const SpMat& bih_w() const { return bih_w_; }             // D (Lap w, Lap xi)
    const SpMat& bih_w_unit() const { return bih_w_unit_; }
    const SpMat& mass_pp() const { return mass_pp_; }         // c_p (p_p, q_p)
    const SpMat& mass_pp_unit() const { return mass_pp_unit_; }
    const SpMat& sstiff_pp() const { return sstiff_pp_; }     // k_p (d_s, d_s)
    const SpMat& sstiff_pp_unit() const { return sstiff_pp_unit_; }
    const SpMat& mass_u() const { return mass_u_; }           // rho_f (u, delta)
    const SpMat& visc_u() const { return visc_u_; }           // 2 mu_f (Du, Ddelta)
    const SpMat& grad_u() const { return grad_u_; }           // mu_f (grad u, grad delta)
    const SpMat& bjs() const { return bjs_; }                 // beta <u.tau, delta.tau>
    const SpMat& div_b() const { return div_b_; }             // alpha_b (div eta, q_b)
    const SpMat& moment_w() const { return moment_w_; }       // alpha_p (K p_p, Lap xi)
    const SpMat& moment_pp() const { return moment_pp_; }     // alpha_p (Kt Lap w, q_p)
    const SpMat& trace_w() const { return trace_w_; }         // <w, q_p(., -h/2)>
    const SpMat& trace_u() const { return trace_u_; }         // <u.e3, q_p(., -h/2)>
    const SpMat& constraint() const { return B_; }            // -(chi, div delta)
    const SpMat& mass_pi() const { return mass_pi_; }

    // Combined operators.
    const SpMat& energy_vel() const { return energy_vel_; }
    const SpMat& energy_disp() const { return energy_disp_; }
    const SpMat& dissipation_matrix() const { return dissipation_; }
    const SpMat& coupling() const { return coupling_; }
    const SpMat& gram() const { return gram_; }

    /// lambda = 1 resolvent operator. Other lambda values are rejected; the
    /// scaled family is exercised through velocity_system instead.
    SaddleSystem resolvent_system(double lambda = 1.0) const {
        if (!(lambda > 0.0)) throw std::invalid_argument("resolvent_system: lambda must be > 0");
        if (lambda != 1.0)
            throw std::invalid_argument(
                "resolvent_system: only lambda = 1 is supported; use velocity_system for scaled "
                "steps");
        SaddleSystem s;
        s.mode = SaddleSystem::Mode::Resolvent;
        s.lambda_or_dt = 1.0;
        s.A = energy_vel_ + energy_disp_ + dissipation_ + coupling_;
        s.B = B_;
        s.f = Vec::Zero(layout_->n_sigma);
        s.g = Vec::Zero(layout_->n_pi);
        return s;
    }

    /// Implicit-Euler velocity-form operator: masses scaled by 1/dt, elastic
    /// and plate stiffness by dt, dissipative and coupling terms by 1.
    SaddleSystem velocity_system(double dt) const {
        if (!(dt > 0.0)) throw std::invalid_argument("velocity_system: dt must be > 0");
        SaddleSystem s;
        s.mode = SaddleSystem::Mode::VelocityStep;
        s.lambda_or_dt = dt;
        s.A = (1.0 / dt) * energy_vel_ + dt * energy_disp_ + dissipation_ + coupling_;
        s.B = B_;
        s.f = Vec::Zero(layout_->n_sigma);
        s.g = Vec::Zero(layout_->n_pi);
        return s;
    }

    /// Velocity-form right-hand side from the previous state and state-shaped
    /// forcing [g_disp | g_vel] (slots of d/dt y = A y + G):
    ///   f = (1/dt) E_v vel^n - E_d disp^n - dt E_d g_disp + E_v g_vel.
    Vec velocity_load(double dt, const Vec& disp_prev, const Vec& vel_prev,
                      const Vec* g_disp = nullptr, const Vec* g_vel = nullptr) const {
        const int n = layout_->n_sigma;
        if (disp_prev.size() != n || vel_prev.size() != n ||
            (g_disp && g_disp->size() != n) || (g_vel && g_vel->size() != n))
            throw std::invalid_argument("velocity_load: state dimension mismatch");
        Vec f = (1.0 / dt) * (energy_vel_ * vel_prev) - energy_disp_ * disp_prev;
        if (g_disp) f.noalias() -= dt * (energy_disp_ * (*g_disp));
        if (g_vel) f.noalias() += energy_vel_ * (*g_vel);
        return f;
    }

    /// Resolvent functional for state-shaped data (free Sigma vectors
    /// F_disp = [f1|.|f4|.|.], F_vel = [f2|f3|f5|f6|f7]).
    Vec resolvent_load(const Vec& F_disp, const Vec& F_vel) const {
        if (F_disp.size() != layout_->n_sigma || F_vel.size() != layout_->n_sigma)
            throw std::invalid_argument("resolvent_load: data dimension mismatch");
        Vec f = energy_vel_ * (F_vel + F_disp);  // rho_b(f1+f2,k), c_b(f3,q_b),
                                                 // rho_p(f4+f5,xi), c_p(f6,q_p), rho_f(f7,delta)
        f.noalias() += div_b_ * F_disp;          // alpha_b (div f1, q_b)
        f.noalias() -= moment_pp_ * F_disp;      // -alpha_p (Kt Lap f4, q_p)
        f.noalias() += trace_w_ * F_disp;        // <f4, q_p(., -h/2)>
        return f;
    }

    Vec resolvent_load_analytic(const ResolventData& d) const;
    Vec source_load(const SourceFunctions& src, double t) const;

    // Per-block energy contributions of a state (disp, vel).
    struct EnergyBreakdown {
        double eta = 0, zeta = 0, pb = 0, w = 0, v = 0, pp = 0, u = 0;
        double total() const { return eta + zeta + pb + w + v + pp + u; }
    };
    EnergyBreakdown energy_breakdown(const Vec& disp, const Vec& vel) const {
        EnergyBreakdown e;
        e.eta = disp.dot(elastic_ * disp);
        e.w = disp.dot(bih_w_ * disp) + params_.gamma * disp.dot(mass_w_unit_ * disp);
        e.zeta = vel.dot(mass_eta_ * vel);
        e.pb = vel.dot(mass_pb_ * vel);
        e.v = vel.dot(mass_w_ * vel);
        e.pp = vel.dot(mass_pp_ * vel);
        e.u = vel.dot(mass_u_ * vel);
        return e;
    }
    double energy(const Vec& disp, const Vec& vel) const {
        return disp.dot(energy_disp_ * disp) + vel.dot(energy_vel_ * vel);
    }
    double dissipation_value(const Vec& vel) const { return vel.dot(dissipation_ * vel); }

  private:
    const MultilayerMesh* mesh_;
    const DofLayout* layout_;
    MaterialParams params_;

    SpMat mass_eta_, elastic_;
    SpMat mass_pb_, stiff_pb_, stiff_pb_unit_;
    SpMat mass_w_, mass_w_unit_, bih_w_, bih_w_unit_;
    SpMat mass_pp_, mass_pp_unit_, sstiff_pp_, sstiff_pp_unit_;
    SpMat mass_u_, visc_u_, grad_u_, bjs_;
    SpMat div_b_, moment_w_, moment_pp_, trace_w_, trace_u_;
    SpMat B_, mass_pi_;
    SpMat energy_vel_, energy_disp_, dissipation_, coupling_, gram_;

    void assemble_primitives();
    void combine() {
        energy_vel_ = mass_eta_ + mass_pb_ + mass_w_ + mass_pp_ + mass_u_;
        energy_disp_ = elastic_ + bih_w_ + params_.gamma * mass_w_unit_;
        dissipation_ = stiff_pb_ + sstiff_pp_ + visc_u_ + bjs_;
        const SpMat div_t = SpMat(div_b_.transpose());
        const SpMat tw_t = SpMat(trace_w_.transpose());
        const SpMat tu_t = SpMat(trace_u_.transpose());
        coupling_ = div_b_ - div_t + moment_w_ - moment_pp_ + trace_w_ - tw_t + tu_t - trace_u_;
        gram_ = elastic_ + stiff_pb_unit_ + bih_w_ + mass_pp_unit_ + sstiff_pp_unit_ + grad_u_;
    }
};

inline void Forms::assemble_primitives() {
    const MultilayerMesh& m = *mesh_;
    const DofLayout& L = *layout_;
    const int n = m.n_plane;
    const int N = L.n_sigma;
    const MaterialParams& pr = params_;

    // ---- Biot layer ----
    {
        const QuadRule rule = gauss_rule(3, kRuleBulk);
        const BasisTable t = map_to_physical(tabulate(Family::Q1_3D, rule), m.biot.cell);
        const Eigen::MatrixXd me = pr.rho_b * detail::kernel_vec_mass(t);
        const Eigen::MatrixXd ae =
            pr.mu_b * detail::kernel_vec_symgrad(t) + pr.lambda_b * detail::kernel_vec_divdiv(t);
        const Eigen::MatrixXd ms = detail::kernel_mass(t);
        const Eigen::MatrixXd ks = detail::kernel_stiff(t);
        const Eigen::MatrixXd db = detail::kernel_div_pair(t, t);

        std::vector<Triplet> t_me, t_ae, t_ms, t_ks, t_db;
        for (int ck = 0; ck < m.nz_b; ++ck)
            for (int cj = 0; cj < n; ++cj)
                for (int ci = 0; ci < n; ++ci) {
                    const auto ed = L.eta_cell_dofs(ci, cj, ck);
                    const auto pd = L.pb_cell_dofs(ci, cj, ck);
                    detail::scatter(t_me, ed, ed, me);
                    detail::scatter(t_ae, ed, ed, ae);
                    detail::scatter(t_ms, pd, pd, ms);
                    detail::scatter(t_ks, pd, pd, ks);
                    detail::scatter_rect(t_db, pd, ed, db);
                }
        mass_eta_ = detail::from_triplets(N, N, t_me);
        elastic_ = detail::from_triplets(N, N, t_ae);
        stiff_pb_unit_ = detail::from_triplets(N, N, t_ks);
        stiff_pb_ = pr.k_b * stiff_pb_unit_;
        mass_pb_ = pr.c_b * detail::from_triplets(N, N, t_ms);
        div_b_ = pr.alpha_b * detail::from_triplets(N, N, t_db);
    }

    // ---- plate layer ----
    {
        const QuadRule rule = gauss_rule(2, kRulePlate);
        const BasisTable t = map_to_physical(tabulate(Family::BFS_2D, rule),
                                             {m.plate.cell[0], m.plate.cell[1], 1.0});
        const Eigen::MatrixXd mw = detail::kernel_mass(t);
        const Eigen::MatrixXd kb = detail::kernel_bih(t);
        std::vector<Triplet> t_mw, t_kb;
        for (int cj = 0; cj < n; ++cj)
            for (int ci = 0; ci < n; ++ci) {
                const auto wd = L.w_cell_dofs(ci, cj);
                detail::scatter(t_mw, wd, wd, mw);
                detail::scatter(t_kb, wd, wd, kb);
            }
        mass_w_unit_ = detail::from_triplets(N, N, t_mw);
        mass_w_ = pr.rho_p * mass_w_unit_;
        bih_w_unit_ = detail::from_triplets(N, N, t_kb);
        bih_w_ = pr.d_plate * bih_w_unit_;
    }

    // ---- plate-pressure layer ----
    {
        const QuadRule rule = gauss_rule(3, kRuleBulk);
        const BasisTable t = map_to_physical(tabulate(Family::Q1_3D, rule), m.ppress.cell);
        const Eigen::MatrixXd ms = detail::kernel_mass(t);
        const Eigen::MatrixXd ks = detail::kernel_stiff_dir(t, 2);
        std::vector<Triplet> t_ms, t_ks;
        for (int ck = 0; ck < m.ns_p; ++ck)
            for (int cj = 0; cj < n; ++cj)
                for (int ci = 0; ci < n; ++ci) {
                    const auto pd = L.pp_cell_dofs(ci, cj, ck);
                    detail::scatter(t_ms, pd, pd, ms);
                    detail::scatter(t_ks, pd, pd, ks);
                }
        mass_pp_unit_ = detail::from_triplets(N, N, t_ms);
        mass_pp_ = pr.c_p * mass_pp_unit_;
        sstiff_pp_unit_ = detail::from_triplets(N, N, t_ks);
        sstiff_pp_ = pr.k_p * sstiff_pp_unit_;
    }

    // ---- fluid layer ----
    {
        const QuadRule rule = gauss_rule(3, kRuleFluid);
        const BasisTable tv = map_to_physical(tabulate(Family::Q2_3D, rule), m.fluid.cell);
        const BasisTable tp = map_to_physical(tabulate(Family::Q1_3D, rule), m.fluid.cell);
        const Eigen::MatrixXd mu = pr.rho_f * detail::kernel_vec_mass(tv);
        const Eigen::MatrixXd kv = pr.mu_f * detail::kernel_vec_symgrad(tv);
        const Eigen::MatrixXd kg = pr.mu_f * detail::kernel_vec_gradgrad(tv);
        const Eigen::MatrixXd bc = detail::kernel_div_constraint(tp, tv);
        const Eigen::MatrixXd mp = detail::kernel_mass(tp);

        std::vector<Triplet> t_mu, t_kv, t_kg, t_bc, t_mp;
        for (int ck = 0; ck < m.nz_f; ++ck)
            for (int cj = 0; cj < n; ++cj)
                for (int ci = 0; ci < n; ++ci) {
                    const auto ud = L.u_cell_dofs(ci, cj, ck);
                    const auto qd = L.pi_cell_dofs(ci, cj, ck);
                    detail::scatter(t_mu, ud, ud, mu);
                    detail::scatter(t_kv, ud, ud, kv);
                    detail::scatter(t_kg, ud, ud, kg);
                    detail::scatter_rect(t_bc, qd, ud, bc);
                    detail::scatter(t_mp, qd, qd, mp);
                }
        mass_u_ = detail::from_triplets(N, N, t_mu);
        visc_u_ = detail::from_triplets(N, N, t_kv);
        grad_u_ = detail::from_triplets(N, N, t_kg);
        B_ = detail::from_triplets(L.n_pi, N, t_bc);
        mass_pi_ = detail::from_triplets(L.n_pi, L.n_pi, t_mp);
    }

    // ---- interface couplings ----
    {
        const QuadRule rule2 = gauss_rule(2, kRulePlate);
        const double area = m.plate.cell[0] * m.plate.cell[1];
        const int nq2 = rule2.size();

        const BasisTable plate_t = map_to_physical(tabulate(Family::BFS_2D, rule2),
                                                   {m.plate.cell[0], m.plate.cell[1], 1.0});
        const BasisTable u_top = tabulate_face(Family::Q2_3D, rule2, 1.0);
        const BasisTable pp_bot = tabulate_face(Family::Q1_3D, rule2, 0.0);

        // Patch-independent element matrices (uniform lattice).
        Eigen::MatrixXd bjs = Eigen::MatrixXd::Zero(81, 81);
        Eigen::MatrixXd tw = Eigen::MatrixXd::Zero(8, 16);
        Eigen::MatrixXd tu = Eigen::MatrixXd::Zero(8, 81);
        for (int q = 0; q < nq2; ++q) {
            const double w = rule2.weights[q] * area;
            for (int a = 0; a < 27; ++a) {
                const double va = u_top.val(q, a);
                if (va == 0.0) continue;
                for (int b = 0; b < 27; ++b) {
                    const double v = w * va * u_top.val(q, b);
                    if (v != 0.0) {
                        bjs(3 * a + 0, 3 * b + 0) += v;
                        bjs(3 * a + 1, 3 * b + 1) += v;
                    }
                }
            }
            for (int a = 0; a < 8; ++a) {
                const double pa = pp_bot.val(q, a);
                if (pa == 0.0) continue;
                for (int b = 0; b < 16; ++b) tw(a, b) += w * pa * plate_t.val(q, b);
                for (int b = 0; b < 27; ++b) tu(a, 3 * b + 2) += w * pa * u_top.val(q, b);
            }
        }

        // (K(p_p), Lap xi) per s-cell: in-plane rule times the first s-moment
        // of the linear s-basis, int s N_end(s) ds over the cell (2-pt Gauss).
        const QuadRule srule = gauss_rule(1, 2);
        const double hs = m.ppress.cell[2];
        std::vector<Eigen::MatrixXd> ck_elem(m.ns_p);
        for (int ck = 0; ck < m.ns_p; ++ck) {
            const double s0 = m.ppress.origin[2] + ck * hs;
            double mom[2] = {0.0, 0.0};
            for (int q = 0; q < srule.size(); ++q) {
                const double xi = srule.points[q][0];
                const double s = s0 + xi * hs;
                const double w = srule.weights[q] * hs;
                mom[0] += w * s * (1.0 - xi);
                mom[1] += w * s * xi;
            }
            Eigen::MatrixXd ckm = Eigen::MatrixXd::Zero(16, 8);
            for (int q = 0; q < nq2; ++q) {
                const double w = rule2.weights[q] * area;
                for (int a = 0; a < 16; ++a) {
                    const double lap = plate_t.der2(q, a, 0) + plate_t.der2(q, a, 1);
                    for (int inp = 0; inp < 4; ++inp) {
                        const double nv = pp_bot.val(q, inp);
                        for (int end = 0; end < 2; ++end)
                            ckm(a, 4 * end + inp) += w * lap * nv * mom[end];
                    }
                }
            }
            ck_elem[ck] = ckm;
        }

        std::vector<Triplet> t_bjs, t_tw, t_tu, t_ck;
        for (const auto& patch : m.interface_cells) {
            const auto wd = L.w_cell_dofs(patch.ci, patch.cj);
            const auto ud = L.u_cell_dofs(patch.ci, patch.cj, m.nz_f - 1);
            const auto pd_bot = L.pp_cell_dofs(patch.ci, patch.cj, 0);
            detail::scatter(t_bjs, ud, ud, bjs);
            detail::scatter_rect(t_tw, pd_bot, wd, tw);
            detail::scatter_rect(t_tu, pd_bot, ud, tu);
            for (int ck = 0; ck < m.ns_p; ++ck) {
                const auto pd = L.pp_cell_dofs(patch.ci, patch.cj, ck);
                detail::scatter_rect(t_ck, wd, pd, ck_elem[ck]);
            }
        }
        bjs_ = pr.beta_bjs * detail::from_triplets(N, N, t_bjs);
        trace_w_ = detail::from_triplets(N, N, t_tw);
        trace_u_ = detail::from_triplets(N, N, t_tu);
        moment_w_ = pr.alpha_p * detail::from_triplets(N, N, t_ck);
    }

    // ---- Ktilde pairing, assembled independently over the 3D prism ----
    {
        const QuadRule rule = gauss_rule_aniso(kRulePlate, kRulePlate, 2);
        const BasisTable tpp = map_to_physical(tabulate(Family::Q1_3D, rule), m.ppress.cell);
        const QuadRule rule2 = gauss_rule(2, kRulePlate);
        const BasisTable plate_t = map_to_physical(tabulate(Family::BFS_2D, rule2),
                                                   {m.plate.cell[0], m.plate.cell[1], 1.0});
        const int nq_inplane = rule2.size();

        std::vector<Triplet> t_ck2;
        for (int ck = 0; ck < m.ns_p; ++ck) {
            const double s0 = m.ppress.origin[2] + ck * m.ppress.cell[2];
            Eigen::MatrixXd ck2 = Eigen::MatrixXd::Zero(8, 16);
            for (int q = 0; q < rule.size(); ++q) {
                const int q2 = q % nq_inplane;
                const double s = s0 + rule.points[q][2] * m.ppress.cell[2];
                const double w = tpp.weights[q];
                for (int a = 0; a < 8; ++a) {
                    const double pa = tpp.val(q, a);
                    if (pa == 0.0) continue;
                    for (int b = 0; b < 16; ++b)
                        ck2(a, b) += w * s * pa *
                                     (plate_t.der2(q2, b, 0) + plate_t.der2(q2, b, 1));
                }
            }
            for (int cj = 0; cj < n; ++cj)
                for (int ci = 0; ci < n; ++ci) {
                    const auto pd = L.pp_cell_dofs(ci, cj, ck);
                    const auto wd = L.w_cell_dofs(ci, cj);
                    detail::scatter_rect(t_ck2, pd, wd, ck2);
                }
        }
        moment_pp_ = pr.alpha_p * detail::from_triplets(N, N, t_ck2);
    }
}

inline Vec Forms::resolvent_load_analytic(const ResolventData& d) const {
    const MultilayerMesh& m = *mesh_;
    const DofLayout& L = *layout_;
    const int n = m.n_plane;
    const MaterialParams& pr = params_;
    Vec f = Vec::Zero(L.n_sigma);

    const auto ev3 = [](const std::function<double(double, double, double)>& fn, double x,
                        double y, double z) { return fn ? fn(x, y, z) : 0.0; };
    const auto ev2 = [](const std::function<double(double, double)>& fn, double x, double y) {
        return fn ? fn(x, y) : 0.0;
    };

    // Biot: rho_b (f1+f2, k) + (c_b f3 + alpha_b div f1, q_b)
    {
        const QuadRule rule = gauss_rule(3, kRuleLoad);
        const BasisTable t = map_to_physical(tabulate(Family::Q1_3D, rule), m.biot.cell);
        for (int ck = 0; ck < m.nz_b; ++ck)
            for (int cj = 0; cj < n; ++cj)
                for (int ci = 0; ci < n; ++ci) {
                    const auto o = m.biot.node_coord(ci, cj, ck);
                    Eigen::VectorXd le = Eigen::VectorXd::Zero(24);
                    Eigen::VectorXd lq = Eigen::VectorXd::Zero(8);
                    for (int q = 0; q < t.nq; ++q) {
                        const double x = o[0] + rule.points[q][0] * m.biot.cell[0];
                        const double y = o[1] + rule.points[q][1] * m.biot.cell[1];
                        const double z = o[2] + rule.points[q][2] * m.biot.cell[2];
                        const double w = t.weights[q];
                        double fv[3];
                        for (int c = 0; c < 3; ++c)
                            fv[c] = pr.rho_b * (ev3(d.f1[c], x, y, z) + ev3(d.f2[c], x, y, z));
                        const double fq = pr.c_b * ev3(d.f3, x, y, z) +
                                          pr.alpha_b * ev3(d.div_f1, x, y, z);
                        for (int a = 0; a < 8; ++a) {
                            const double va = t.val(q, a);
                            for (int c = 0; c < 3; ++c) le[3 * a + c] += w * va * fv[c];
                            lq[a] += w * va * fq;
                        }
                    }
                    detail::scatter_vec(f, L.eta_cell_dofs(ci, cj, ck), le);
                    detail::scatter_vec(f, L.pb_cell_dofs(ci, cj, ck), lq);
                }
    }

    // Plate: rho_p (f4+f5, xi)
    {
        const QuadRule rule = gauss_rule(2, kRuleLoad);
        const BasisTable t = map_to_physical(tabulate(Family::BFS_2D, rule),
                                             {m.plate.cell[0], m.plate.cell[1], 1.0});
        for (int cj = 0; cj < n; ++cj)
            for (int ci = 0; ci < n; ++ci) {
                const auto o = m.plate.node_coord(ci, cj);
                Eigen::VectorXd le = Eigen::VectorXd::Zero(16);
                for (int q = 0; q < t.nq; ++q) {
                    const double x = o[0] + rule.points[q][0] * m.plate.cell[0];
                    const double y = o[1] + rule.points[q][1] * m.plate.cell[1];
                    const double fv = pr.rho_p * (ev2(d.f4, x, y) + ev2(d.f5, x, y));
                    for (int a = 0; a < 16; ++a) le[a] += t.weights[q] * t.val(q, a) * fv;
                }
                detail::scatter_vec(f, L.w_cell_dofs(ci, cj), le);
            }
    }

    // Plate pressure: (c_p f6 - alpha_p s lap f4, q_p) plus the lower-trace
    // term <f4, q_p(., -h/2)>.
    {
        const QuadRule rule = gauss_rule_aniso(kRuleLoad, kRuleLoad, kRuleLoad);
        const BasisTable t = map_to_physical(tabulate(Family::Q1_3D, rule), m.ppress.cell);
        for (int ck = 0; ck < m.ns_p; ++ck)
            for (int cj = 0; cj < n; ++cj)
                for (int ci = 0; ci < n; ++ci) {
                    const auto o = m.ppress.node_coord(ci, cj, ck);
                    Eigen::VectorXd lq = Eigen::VectorXd::Zero(8);
                    for (int q = 0; q < t.nq; ++q) {
                        const double x = o[0] + rule.points[q][0] * m.ppress.cell[0];
                        const double y = o[1] + rule.points[q][1] * m.ppress.cell[1];
                        const double s = o[2] + rule.points[q][2] * m.ppress.cell[2];
                        const double fv =
                            pr.c_p * ev3(d.f6, x, y, s) - pr.alpha_p * s * ev2(d.lap_f4, x, y);
                        for (int a = 0; a < 8; ++a) lq[a] += t.weights[q] * t.val(q, a) * fv;
                    }
                    detail::scatter_vec(f, L.pp_cell_dofs(ci, cj, ck), lq);
                }

        const QuadRule rule2 = gauss_rule(2, kRulePlate);
        const BasisTable pp_bot = tabulate_face(Family::Q1_3D, rule2, 0.0);
        const double area = m.plate.cell[0] * m.plate.cell[1];
        for (const auto& patch : m.interface_cells) {
            Eigen::VectorXd lq = Eigen::VectorXd::Zero(8);
            for (int q = 0; q < rule2.size(); ++q) {
                const double x = (patch.ci + rule2.points[q][0]) * m.plate.cell[0];
                const double y = (patch.cj + rule2.points[q][1]) * m.plate.cell[1];
                const double fv = ev2(d.f4, x, y);
                for (int a = 0; a < 8; ++a)
                    lq[a] += rule2.weights[q] * area * pp_bot.val(q, a) * fv;
            }
            detail::scatter_vec(f, L.pp_cell_dofs(patch.ci, patch.cj, 0), lq);
        }
    }

    // Fluid: rho_f (f7, delta)
    {
        const QuadRule rule = gauss_rule(3, kRuleLoad);
        const BasisTable t = map_to_physical(tabulate(Family::Q2_3D, rule), m.fluid.cell);
        for (int ck = 0; ck < m.nz_f; ++ck)
            for (int cj = 0; cj < n; ++cj)
                for (int ci = 0; ci < n; ++ci) {
                    const auto o = m.fluid.node_coord(ci, cj, ck);
                    Eigen::VectorXd le = Eigen::VectorXd::Zero(81);
                    for (int q = 0; q < t.nq; ++q) {
                        const double x = o[0] + rule.points[q][0] * m.fluid.cell[0];
                        const double y = o[1] + rule.points[q][1] * m.fluid.cell[1];
                        const double z = o[2] + rule.points[q][2] * m.fluid.cell[2];
                        double fv[3];
                        for (int c = 0; c < 3; ++c) fv[c] = pr.rho_f * ev3(d.f7[c], x, y, z);
                        for (int a = 0; a < 27; ++a) {
                            const double va = t.val(q, a);
                            for (int c = 0; c < 3; ++c)
                                le[3 * a + c] += t.weights[q] * va * fv[c];
                        }
                    }
                    detail::scatter_vec(f, L.u_cell_dofs(ci, cj, ck), le);
                }
    }
    return f;
}

inline Vec Forms::source_load(const SourceFunctions& src, double tm) const {
    const MultilayerMesh& m = *mesh_;
    const DofLayout& L = *layout_;
    const int n = m.n_plane;
    Vec f = Vec::Zero(L.n_sigma);
    if (src.empty()) return f;

    if (src.F_b[0] || src.F_b[1] || src.F_b[2] || src.S) {
        const QuadRule rule = gauss_rule(3, kRuleLoad);
        const BasisTable t = map_to_physical(tabulate(Family::Q1_3D, rule), m.biot.cell);
        for (int ck = 0; ck < m.nz_b; ++ck)
            for (int cj = 0; cj < n; ++cj)
                for (int ci = 0; ci < n; ++ci) {
                    const auto o = m.biot.node_coord(ci, cj, ck);
                    Eigen::VectorXd le = Eigen::VectorXd::Zero(24);
                    Eigen::VectorXd lq = Eigen::VectorXd::Zero(8);
                    for (int q = 0; q < t.nq; ++q) {
                        const double x = o[0] + rule.points[q][0] * m.biot.cell[0];
                        const double y = o[1] + rule.points[q][1] * m.biot.cell[1];
                        const double z = o[2] + rule.points[q][2] * m.biot.cell[2];
                        const double w = t.weights[q];
                        for (int a = 0; a < 8; ++a) {
                            const double va = t.val(q, a);
                            for (int c = 0; c < 3; ++c)
                                if (src.F_b[c]) le[3 * a + c] += w * va * src.F_b[c](x, y, z, tm);
                            if (src.S) lq[a] += w * va * src.S(x, y, z, tm);
                        }
                    }
                    detail::scatter_vec(f, L.eta_cell_dofs(ci, cj, ck), le);
                    detail::scatter_vec(f, L.pb_cell_dofs(ci, cj, ck), lq);
                }
    }

    if (src.plate) {
        const QuadRule rule = gauss_rule(2, kRuleLoad);
        const BasisTable t = map_to_physical(tabulate(Family::BFS_2D, rule),
                                             {m.plate.cell[0], m.plate.cell[1], 1.0});
        for (int cj = 0; cj < n; ++cj)
            for (int ci = 0; ci < n; ++ci) {
                const auto o = m.plate.node_coord(ci, cj);
                Eigen::VectorXd le = Eigen::VectorXd::Zero(16);
                for (int q = 0; q < t.nq; ++q) {
                    const double x = o[0] + rule.points[q][0] * m.plate.cell[0];
                    const double y = o[1] + rule.points[q][1] * m.plate.cell[1];
                    const double fv = src.plate(x, y, tm);
                    for (int a = 0; a < 16; ++a) le[a] += t.weights[q] * t.val(q, a) * fv;
                }
                detail::scatter_vec(f, L.w_cell_dofs(ci, cj), le);
            }
    }

    if (src.pp) {
        const QuadRule rule = gauss_rule_aniso(kRuleLoad, kRuleLoad, kRuleLoad);
        const BasisTable t = map_to_physical(tabulate(Family::Q1_3D, rule), m.ppress.cell);
        for (int ck = 0; ck < m.ns_p; ++ck)
            for (int cj = 0; cj < n; ++cj)
                for (int ci = 0; ci < n; ++ci) {
                    const auto o = m.ppress.node_coord(ci, cj, ck);
                    Eigen::VectorXd lq = Eigen::VectorXd::Zero(8);
                    for (int q = 0; q < t.nq; ++q) {
                        const double x = o[0] + rule.points[q][0] * m.ppress.cell[0];
                        const double y = o[1] + rule.points[q][1] * m.ppress.cell[1];
                        const double s = o[2] + rule.points[q][2] * m.ppress.cell[2];
                        const double fv = src.pp(x, y, s, tm);
                        for (int a = 0; a < 8; ++a) lq[a] += t.weights[q] * t.val(q, a) * fv;
                    }
                    detail::scatter_vec(f, L.pp_cell_dofs(ci, cj, ck), lq);
                }
    }

    if (src.F_f[0] || src.F_f[1] || src.F_f[2]) {
        const QuadRule rule = gauss_rule(3, kRuleLoad);
        const BasisTable t = map_to_physical(tabulate(Family::Q2_3D, rule), m.fluid.cell);
        for (int ck = 0; ck < m.nz_f; ++ck)
            for (int cj = 0; cj < n; ++cj)
                for (int ci = 0; ci < n; ++ci) {
                    const auto o = m.fluid.node_coord(ci, cj, ck);
                    Eigen::VectorXd le = Eigen::VectorXd::Zero(81);
                    for (int q = 0; q < t.nq; ++q) {
                        const double x = o[0] + rule.points[q][0] * m.fluid.cell[0];
                        const double y = o[1] + rule.points[q][1] * m.fluid.cell[1];
                        const double z = o[2] + rule.points[q][2] * m.fluid.cell[2];
                        for (int a = 0; a < 27; ++a) {
                            const double va = t.val(q, a);
                            for (int c = 0; c < 3; ++c)
                                if (src.F_f[c])
                                    le[3 * a + c] += t.weights[q] * va * src.F_f[c](x, y, z, tm);
                        }
                    }
                    detail::scatter_vec(f, L.u_cell_dofs(ci, cj, ck), le);
                }
    }
    return f;
}

}  // namespace mlf
