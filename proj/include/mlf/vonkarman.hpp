#pragma once

#include <Eigen/SparseCholesky>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "mlf/assembly.hpp"
#include "mlf/evolution.hpp"

namespace mlf {

/// Clamped Airy solve result. Coefficients live in the plate block (clamped
/// DOFs are structurally zero); the residual is recomputed from the system.
struct AirySolution {
    Vec v;  // plate-block-local coefficients
    double residual = 0.0;
};

struct VkConfig {
    Vec F0;                    // plate-block-local coefficients; empty = zero
    double picard_tol = 1e-10;
    int picard_max_iter = 50;
};

/// Nonlinear plate machinery: bracket evaluation, the clamped biharmonic
/// factorization (built once per mesh), the restoring force, and its
/// potential.
class VkContext {
  public:
    explicit VkContext(const Forms& forms) : forms_(&forms) {
        const DofLayout& L = forms.layout();
        const MultilayerMesh& m = forms.mesh();
        w0_ = L.block_begin(Field::W);
        nw_ = L.block_size[static_cast<int>(Field::W)];

        rule_ = gauss_rule(2, kRulePlate);
        table_ = map_to_physical(tabulate(Family::BFS_2D, rule_),
                                 {m.plate.cell[0], m.plate.cell[1], 1.0});
        ncells_ = m.plate.ncells();
        nq_ = rule_.size();
        area_ = m.plate.cell[0] * m.plate.cell[1];

        // plate-block restriction of the unit biharmonic form
        if (nw_ > 0) {
            SpMat K = SpMat(forms.bih_w_unit().block(w0_, w0_, nw_, nw_));
            K.makeCompressed();
            K_air_ = K;
            chol_.compute(K_air_);
            if (chol_.info() != Eigen::Success)
                throw SolverError("VkContext: clamped biharmonic factorization failed");
        }
        // local cell dof gather (plate-block indices, -1 for clamped)
        cell_dofs_.resize(ncells_);
        const int n = m.n_plane;
        for (int cj = 0; cj < n; ++cj)
            for (int ci = 0; ci < n; ++ci) {
                const auto wd = L.w_cell_dofs(ci, cj);
                auto& loc = cell_dofs_[m.plate.cell_index(ci, cj)];
                for (int a = 0; a < 16; ++a) loc[a] = wd[a] < 0 ? -1 : wd[a] - w0_;
            }
    }

    int n_plate_dofs() const { return nw_; }
    int n_quad() const { return ncells_ * nq_; }
    double quad_weight(int cell, int q) const { return rule_.weights[q] * area_; }

    /// Second derivatives (xx, yy, xy) of a plate-block field at one
    /// quadrature point.
    std::array<double, 3> second_derivs(const Vec& coef, int cell, int q) const {
        std::array<double, 3> d{0, 0, 0};
        const auto& loc = cell_dofs_[cell];
        for (int a = 0; a < 16; ++a) {
            if (loc[a] < 0) continue;
            const double c = coef[loc[a]];
            d[0] += c * table_.der2(q, a, 0);
            d[1] += c * table_.der2(q, a, 1);
            d[2] += c * table_.der2(q, a, 2);
        }
        return d;
    }

    double value_at(const Vec& coef, int cell, int q) const {
        double v = 0;
        const auto& loc = cell_dofs_[cell];
        for (int a = 0; a < 16; ++a)
            if (loc[a] >= 0) v += coef[loc[a]] * table_.val(q, a);
        return v;
    }

    /// Pointwise bracket [u, w] = u_xx w_yy + u_yy w_xx - 2 u_xy w_xy at the
    /// plate quadrature points, flattened cell-major.
    std::vector<double> bracket(const Vec& u, const Vec& w) const {
        std::vector<double> out(static_cast<size_t>(ncells_) * nq_);
        for (int c = 0; c < ncells_; ++c)
            for (int q = 0; q < nq_; ++q) {
                const auto du = second_derivs(u, c, q);
                const auto dw = second_derivs(w, c, q);
                out[static_cast<size_t>(c) * nq_ + q] =
                    du[0] * dw[1] + du[1] * dw[0] - 2.0 * du[2] * dw[2];
            }
        return out;
    }

    /// Dual vector l_i = int f(x) xi_i(x) over the plate for a flattened
    /// quadrature-point field f.
    Vec plate_load_from_quad(const std::vector<double>& fq) const {
        Vec l = Vec::Zero(nw_);
        for (int c = 0; c < ncells_; ++c) {
            const auto& loc = cell_dofs_[c];
            for (int q = 0; q < nq_; ++q) {
                const double wf = rule_.weights[q] * area_ * fq[static_cast<size_t>(c) * nq_ + q];
                if (wf == 0.0) continue;
                for (int a = 0; a < 16; ++a)
                    if (loc[a] >= 0) l[loc[a]] += wf * table_.val(q, a);
            }
        }
        return l;
    }

    /// Clamped biharmonic solve (Lap v, Lap xi) = rhs for a dual vector rhs.
    Vec solve_biharmonic(const Vec& rhs) const {
        if (nw_ == 0) return Vec::Zero(0);
        return chol_.solve(rhs);
    }

    /// Airy stress function of w: (Lap v, Lap xi) = -([w, w], xi).
    AirySolution solve_airy(const Vec& w) const {
        AirySolution out;
        if (nw_ == 0) {
            out.v = Vec::Zero(0);
            return out;
        }
        const Vec rhs = -plate_load_from_quad(bracket(w, w));
        out.v = chol_.solve(rhs);
        out.residual = (K_air_ * out.v - rhs).norm();
        return out;
    }

    /// Restoring force load l_i = ([w, v(w) + F0], xi_i), plate-block-local.
    Vec force_local(const Vec& w, const VkConfig& cfg) const {
        if (nw_ == 0) return Vec::Zero(0);
        Vec vtot = solve_airy(w).v;
        if (cfg.F0.size() == nw_) vtot += cfg.F0;
        return plate_load_from_quad(bracket(w, vtot));
    }

    /// Same force embedded in a Sigma-sized dual vector.
    Vec force_sigma(const Vec& w, const VkConfig& cfg) const {
        Vec out = Vec::Zero(forms_->layout().n_sigma);
        if (nw_ > 0) out.segment(w0_, nw_) = force_local(w, cfg);
        return out;
    }

    /// Potential Pi(w) = 1/4 int |Lap v(w)|^2 - 1/2 int w [w, F0].
    double potential(const Vec& w, const VkConfig& cfg) const {
        if (nw_ == 0) return 0.0;
        const Vec v = solve_airy(w).v;
        double pi = 0.25 * v.dot(K_air_ * v);
        if (cfg.F0.size() == nw_) {
            const auto br = bracket(w, cfg.F0);
            double s = 0;
            for (int c = 0; c < ncells_; ++c)
                for (int q = 0; q < nq_; ++q)
                    s += rule_.weights[q] * area_ * value_at(w, c, q) *
                         br[static_cast<size_t>(c) * nq_ + q];
            pi -= 0.5 * s;
        }
        return pi;
    }

    Vec w_block(const StateVector& s) const {
        return nw_ > 0 ? Vec(s.disp.segment(w0_, nw_)) : Vec::Zero(0);
    }

  private:
    const Forms* forms_;
    int w0_ = 0, nw_ = 0;
    QuadRule rule_;
    BasisTable table_;
    int ncells_ = 0, nq_ = 0;
    double area_ = 0;
    SpMat K_air_;
    Eigen::SimplicialLDLT<SpMat> chol_;
    std::vector<std::array<int, 16>> cell_dofs_;
};

/// Semi-implicit nonlinear step: Picard iteration on the plate force around
/// the linear velocity-form solve. Reports carry the potential so E + Pi can
/// be audited.
class NonlinearStepper {
  public:
    NonlinearStepper(const Forms& forms, double dt, VkConfig cfg)
        : stepper_(forms, dt), vk_(forms), cfg_(std::move(cfg)) {
        if (!(cfg_.picard_tol > 0)) throw std::invalid_argument("picard_tol must be > 0");
    }

    Stepper& linear() { return stepper_; }
    const VkContext& vk() const { return vk_; }
    const VkConfig& config() const { return cfg_; }

    std::pair<StateVector, EnergyReport> step(const StateVector& s) const {
        Vec w_iter = vk_.w_block(s);
        std::vector<double> history;
        for (int k = 0; k < cfg_.picard_max_iter; ++k) {
            const Vec load = vk_.force_sigma(w_iter, cfg_);
            auto [cand, rep] = stepper_.step(s, &load);
            const Vec w_new = vk_.w_block(cand);
            const double incr = (w_new - w_iter).norm();
            history.push_back(incr);
            if (incr < cfg_.picard_tol) {
                rep.Pi = vk_.potential(w_new, cfg_);
                return {std::move(cand), rep};
            }
            w_iter = w_new;
        }
        throw SolverError("NonlinearStepper: Picard iteration did not converge (reduce dt)",
                          history);
    }

  private:
    Stepper stepper_;
    VkContext vk_;
    VkConfig cfg_;
};

}  // namespace mlf
