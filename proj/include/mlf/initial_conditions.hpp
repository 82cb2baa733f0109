#pragma once

#include <cmath>
#include <random>
#include <string>

#include "mlf/assembly.hpp"
#include "mlf/saddle.hpp"
#include "mlf/state.hpp"

namespace mlf {

/// Named initial-condition catalog. "zero", "random" (seeded nodal
/// coefficients), or "fourier" (per-field trigonometric modes with
/// wavenumbers kx, ky). Per-field amplitudes default to `amplitude`.
struct IcSpec {
    std::string catalog = "zero";
    std::uint64_t seed = 0;
    double amplitude = 0.1;
    int kx = 1;
    int ky = 1;
    double amp_eta = -1, amp_zeta = -1, amp_pb = -1, amp_w = -1, amp_v = -1, amp_pp = -1,
           amp_u = -1;

    double amp(double field_amp) const { return field_amp >= 0 ? field_amp : amplitude; }
};

/// Project the fluid velocity block onto the discretely divergence-free set
/// in the Gram inner product (one constrained solve).
inline void project_div_free(const Forms& forms, StateVector& s) {
    const DofLayout& L = forms.layout();
    const int u0 = L.block_begin(Field::U);
    const int us = L.block_size[static_cast<int>(Field::U)];
    if (us == 0 || L.n_pi == 0) return;

    SpMat Gu = SpMat(forms.grad_u().block(u0, u0, us, us));
    SpMat Bu = SpMat(forms.constraint().middleCols(u0, us));
    Gu.makeCompressed();
    Bu.makeCompressed();
    SaddleSolver solver(Gu, Bu);
    const Vec u_raw = s.vel.segment(u0, us);
    const SaddleSolution sol = solver.solve(Vec(Gu * u_raw), Vec::Zero(L.n_pi));
    s.vel.segment(u0, us) = sol.phi;
}

inline StateVector build_initial_state(const Forms& forms, const IcSpec& spec) {
    const DofLayout& L = forms.layout();
    StateVector s = StateVector::zero(L);

    if (spec.catalog == "zero") {
        return s;
    }

    if (spec.catalog == "random") {
        std::mt19937_64 rng(spec.seed);
        std::uniform_real_distribution<double> dist(-1.0, 1.0);
        // deterministic fill order: disp blocks (Eta, W), then all vel blocks
        for (int g = L.block_begin(Field::Eta); g < L.block_end(Field::Eta); ++g)
            s.disp[g] = spec.amp(spec.amp_eta) * dist(rng);
        for (int g = L.block_begin(Field::W); g < L.block_end(Field::W); ++g)
            s.disp[g] = spec.amp(spec.amp_w) * dist(rng);
        for (int g = 0; g < L.n_sigma; ++g) {
            const Field f = L.free_info[g].field;
            double a = spec.amplitude;
            switch (f) {
                case Field::Eta: a = spec.amp(spec.amp_zeta); break;
                case Field::Pb: a = spec.amp(spec.amp_pb); break;
                case Field::W: a = spec.amp(spec.amp_v); break;
                case Field::Pp: a = spec.amp(spec.amp_pp); break;
                case Field::U: a = spec.amp(spec.amp_u); break;
            }
            s.vel[g] = a * dist(rng);
        }
        project_div_free(forms, s);
        return s;
    }

    if (spec.catalog == "fourier") {
        const double kx = 2.0 * M_PI * spec.kx;
        const double ky = 2.0 * M_PI * spec.ky;
        const double pkx = M_PI * spec.kx;
        const double pky = M_PI * spec.ky;

        FieldFunctions disp_f;
        const double ae = spec.amp(spec.amp_eta);
        disp_f.eta[2] = [=](double x, double y, double z) {
            return ae * std::sin(kx * x) * std::sin(ky * y) * std::sin(M_PI * z);
        };
        const double aw = spec.amp(spec.amp_w);
        disp_f.w = [=](double x, double y) {
            const double sx = std::sin(pkx * x), sy = std::sin(pky * y);
            return aw * sx * sx * sy * sy;
        };
        disp_f.wx = [=](double x, double y) {
            const double sy = std::sin(pky * y);
            return aw * pkx * std::sin(2.0 * pkx * x) * sy * sy;
        };
        disp_f.wy = [=](double x, double y) {
            const double sx = std::sin(pkx * x);
            return aw * pky * sx * sx * std::sin(2.0 * pky * y);
        };
        disp_f.wxy = [=](double x, double y) {
            return aw * pkx * pky * std::sin(2.0 * pkx * x) * std::sin(2.0 * pky * y);
        };
        s.disp = interpolate_free(L, disp_f);

        FieldFunctions vel_f;
        const double az = spec.amp(spec.amp_zeta);
        vel_f.eta[0] = [=](double x, double y, double z) {
            (void)x;
            return az * std::sin(ky * y) * std::sin(M_PI * z);
        };
        const double apb = spec.amp(spec.amp_pb);
        vel_f.pb = [=](double x, double y, double z) {
            return apb * std::cos(kx * x) * std::cos(ky * y) * std::sin(M_PI * z);
        };
        const double av = spec.amp(spec.amp_v);
        vel_f.w = [=](double x, double y) {
            const double sx = std::sin(pkx * x), sy = std::sin(pky * y);
            return av * sx * sx * sy * sy;
        };
        vel_f.wx = [=](double x, double y) {
            const double sy = std::sin(pky * y);
            return av * pkx * std::sin(2.0 * pkx * x) * sy * sy;
        };
        vel_f.wy = [=](double x, double y) {
            const double sx = std::sin(pkx * x);
            return av * pky * sx * sx * std::sin(2.0 * pky * y);
        };
        vel_f.wxy = [=](double x, double y) {
            return av * pkx * pky * std::sin(2.0 * pkx * x) * std::sin(2.0 * pky * y);
        };
        const double app = spec.amp(spec.amp_pp);
        const double h = forms.mesh().h_p;
        vel_f.pp = [=](double x, double y, double sc) {
            return app * std::cos(kx * x) * std::cos(ky * y) * (2.0 * sc / h);
        };
        const double au = spec.amp(spec.amp_u);
        vel_f.u[0] = [=](double x, double y, double z) {
            (void)x;
            return au * std::sin(ky * y) * std::sin(M_PI * (z + 1.0));
        };
        s.vel = interpolate_free(L, vel_f);

        // p_b interface trace is stored in the Pp block; make the trace rows
        // consistent by construction (interpolation already wrote pp there).
        project_div_free(forms, s);
        return s;
    }

    throw std::invalid_argument("ic.catalog: unknown catalog '" + spec.catalog +
                                "' (expected zero, random or fourier)");
}

}  // namespace mlf
