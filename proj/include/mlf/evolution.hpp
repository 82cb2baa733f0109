#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include "mlf/assembly.hpp"
#include "mlf/saddle.hpp"
#include "mlf/state.hpp"

namespace mlf {

/// Per-step energy accounting. The identity
///   E^{n+1} - E^n + J^{n+1} + 2 dt D^{n+1} = 2 dt W^{n+1}
/// holds exactly for the velocity-form step (up to linear-solver residual):
/// J is the energy norm of the state increment and W the forcing work.
struct EnergyReport {
    double t = 0.0;
    Forms::EnergyBreakdown blocks;
    double E = 0.0;
    double Pi = 0.0;       // nonlinear plate potential (zero for linear runs)
    double D_diss = 0.0;
    double J = 0.0;
    double forcing_work = 0.0;
    double identity_residual = 0.0;
    double constraint_norm = 0.0;  // ||B u|| at the emitted state

    double relative_residual(double e_prev) const {
        return std::abs(identity_residual) / std::max(std::max(e_prev, E), 1.0);
    }
};

inline Vec mask_disp_blocks(const DofLayout& L, const Vec& x) {
    Vec out = Vec::Zero(L.n_sigma);
    const int e0 = L.block_begin(Field::Eta), es = L.block_size[0];
    const int w0 = L.block_begin(Field::W), ws = L.block_size[2];
    out.segment(e0, es) = x.segment(e0, es);
    out.segment(w0, ws) = x.segment(w0, ws);
    return out;
}

/// X-norm squared of a state (the energy quadratic form).
inline double x_norm_sq(const Forms& forms, const StateVector& s) {
    return forms.energy(s.disp, s.vel);
}

/// Solve the lambda = 1 resolvent problem for state-shaped data
/// (F_disp = [f1|.|f4|.|.], F_vel = [f2|f3|f5|f6|f7]). The returned state
/// carries eta, w in disp, the recovered velocities zeta = eta - f1 and
/// v = w - f4 in vel, and the pressure multiplier.
inline StateVector resolvent_solve(const Forms& forms, const Vec& F_disp, const Vec& F_vel) {
    const SaddleSystem sys = forms.resolvent_system(1.0);
    const Vec f = forms.resolvent_load(F_disp, F_vel);
    const SaddleSolution sol = SaddleSolver(sys.A, sys.B).solve(f, sys.g);

    StateVector y;
    y.disp = mask_disp_blocks(forms.layout(), sol.phi);
    y.vel = sol.phi - mask_disp_blocks(forms.layout(), F_disp);
    y.pi = sol.pi;
    y.t = 0.0;
    return y;
}

/// Same solve with the data functional assembled from analytic closures.
inline StateVector resolvent_solve_analytic(const Forms& forms, const ResolventData& data,
                                            Vec* F_disp_out = nullptr) {
    const SaddleSystem sys = forms.resolvent_system(1.0);
    const Vec f = forms.resolvent_load_analytic(data);
    const SaddleSolution sol = SaddleSolver(sys.A, sys.B).solve(f, sys.g);

    // velocities need the interpolated f1, f4 to complete the substitution
    FieldFunctions ff;
    for (int c = 0; c < 3; ++c) ff.eta[c] = data.f1[c];
    ff.w = data.f4;
    ff.wx = data.f4_dx;
    ff.wy = data.f4_dy;
    ff.wxy = data.f4_dxy;
    const Vec f14 = interpolate_free(forms.layout(), ff);

    StateVector y;
    y.disp = mask_disp_blocks(forms.layout(), sol.phi);
    y.vel = sol.phi - mask_disp_blocks(forms.layout(), f14);
    y.pi = sol.pi;
    if (F_disp_out) *F_disp_out = f14;
    return y;
}

/// Fixed-step implicit Euler driver in velocity form. The operator is
/// factorized once; each step is one back-substitution. Optional forcing
/// enters either as state-shaped vectors (slots of dy/dt = A y + G) or as
/// analytic sources re-assembled per step.
class Stepper {
  public:
    Stepper(const Forms& forms, double dt)
        : forms_(&forms), dt_(dt), sys_(forms.velocity_system(dt)),
          solver_(std::make_unique<SaddleSolver>(sys_.A, sys_.B)) {}

    void set_forcing_vectors(const Vec& g_disp, const Vec& g_vel) {
        g_disp_ = g_disp;
        g_vel_ = g_vel;
        has_vec_forcing_ = true;
    }
    void set_sources(const SourceFunctions& src) { sources_ = src; }

    double dt() const { return dt_; }
    const SaddleSystem& system() const { return sys_; }

    /// Advance one step. `extra_load` (if given) is added to the right-hand
    /// side and its work is counted in the report (used by the nonlinear
    /// plate force).
    std::pair<StateVector, EnergyReport> step(const StateVector& s,
                                              const Vec* extra_load = nullptr) const {
        const Forms& fo = *forms_;
        const DofLayout& L = fo.layout();

        Vec f = fo.velocity_load(dt_, s.disp, s.vel, has_vec_forcing_ ? &g_disp_ : nullptr,
                                 has_vec_forcing_ ? &g_vel_ : nullptr);
        Vec ext_dual = Vec::Zero(L.n_sigma);  // external load whose work is W's m-part
        if (has_vec_forcing_) ext_dual += fo.energy_vel() * g_vel_;
        if (sources_ && !sources_->empty()) {
            const Vec sl = fo.source_load(*sources_, s.t + dt_);
            f += sl;
            ext_dual += sl;
        }
        if (extra_load) {
            f += *extra_load;
            ext_dual += *extra_load;
        }

        const SaddleSolution sol = solver_->solve(f, sys_.g);
        const Vec& x = sol.phi;

        StateVector out;
        Vec incr = x;
        if (has_vec_forcing_) incr += g_disp_;
        out.disp = s.disp + dt_ * mask_disp_blocks(L, incr);
        out.vel = x;
        out.pi = sol.pi;
        out.t = s.t + dt_;

        EnergyReport rep;
        rep.t = out.t;
        rep.blocks = fo.energy_breakdown(out.disp, out.vel);
        rep.E = rep.blocks.total();
        rep.D_diss = fo.dissipation_value(out.vel);
        const Vec dvel = out.vel - s.vel;
        const Vec ddisp = out.disp - s.disp;
        rep.J = dvel.dot(fo.energy_vel() * dvel) + ddisp.dot(fo.energy_disp() * ddisp);
        rep.forcing_work = ext_dual.dot(out.vel);
        if (has_vec_forcing_) rep.forcing_work += out.disp.dot(fo.energy_disp() * g_disp_);
        const double e_prev = fo.energy(s.disp, s.vel);
        rep.identity_residual =
            rep.E - e_prev + rep.J + 2.0 * dt_ * rep.D_diss - 2.0 * dt_ * rep.forcing_work;
        rep.constraint_norm = (sys_.B * out.vel).norm();
        return {out, rep};
    }

  private:
    const Forms* forms_;
    double dt_;
    SaddleSystem sys_;
    std::unique_ptr<SaddleSolver> solver_;
    Vec g_disp_, g_vel_;
    bool has_vec_forcing_ = false;
    std::optional<SourceFunctions> sources_;
};

struct Trajectory {
    std::vector<StateVector> states;   // includes the initial state
    std::vector<EnergyReport> reports; // one per executed step
    bool completed = true;
    std::string error;
};

/// Run `steps` implicit-Euler steps from `initial`. On a solver failure the
/// partial trajectory is returned with `completed = false`.
inline Trajectory simulate(const Stepper& stepper, const StateVector& initial, int steps) {
    if (steps < 1) throw std::invalid_argument("simulate: steps must be >= 1");
    Trajectory tr;
    tr.states.push_back(initial);
    for (int k = 0; k < steps; ++k) {
        try {
            auto [s, rep] = stepper.step(tr.states.back());
            tr.states.push_back(std::move(s));
            tr.reports.push_back(rep);
        } catch (const SolverError& e) {
            tr.completed = false;
            tr.error = e.what();
            break;
        }
    }
    return tr;
}

struct AuditSummary {
    double max_rel_residual = 0.0;
    double mean_rel_residual = 0.0;
    bool monotone = true;             // E nonincreasing (zero-forcing audits)
    std::vector<int> flagged_steps;   // steps whose identity exceeds tolerance
    bool pass(double tol = 1e-8) const { return flagged_steps.empty() || max_rel_residual <= tol; }
};

/// Recompute the discrete energy identity from the states alone (forcing
/// work per step may be supplied). Flags any step whose residual exceeds the
/// tolerance relative to max(E_prev, 1).
inline AuditSummary energy_audit(const Forms& forms, const std::vector<StateVector>& states,
                                 double dt, double tol = 1e-8,
                                 const std::vector<double>* work = nullptr) {
    if (states.size() < 2) throw std::invalid_argument("energy_audit: need at least two states");
    AuditSummary a;
    double sum = 0.0;
    for (size_t k = 0; k + 1 < states.size(); ++k) {
        const StateVector& s0 = states[k];
        const StateVector& s1 = states[k + 1];
        const double e0 = forms.energy(s0.disp, s0.vel);
        const double e1 = forms.energy(s1.disp, s1.vel);
        const Vec dvel = s1.vel - s0.vel;
        const Vec ddisp = s1.disp - s0.disp;
        const double J = dvel.dot(forms.energy_vel() * dvel) + ddisp.dot(forms.energy_disp() * ddisp);
        const double D = forms.dissipation_value(s1.vel);
        const double W = work ? (*work)[k] : 0.0;
        const double res = e1 - e0 + J + 2.0 * dt * D - 2.0 * dt * W;
        const double rel = std::abs(res) / std::max(std::max(e0, e1), 1.0);
        sum += rel;
        a.max_rel_residual = std::max(a.max_rel_residual, rel);
        if (rel > tol) a.flagged_steps.push_back(static_cast<int>(k));
        if (!work && e1 > e0 + tol * std::max(e0, 1.0)) a.monotone = false;
    }
    a.mean_rel_residual = sum / static_cast<double>(states.size() - 1);
    return a;
}

}  // namespace mlf
