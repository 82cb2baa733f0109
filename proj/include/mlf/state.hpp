#pragma once

#include <Eigen/Dense>
#include <functional>

#include "mlf/dof_layout.hpp"

namespace mlf {

using Vec = Eigen::VectorXd;

/// Discrete system state. `disp` holds the displacement fields (eta in the
/// Eta block, w in the W block; other blocks unused), `vel` holds
/// [zeta, p_b, v, p_p, u], and `pi` the fluid pressure multiplier from the
/// last solve. Only free coefficients are stored, so the interface slaving
/// (eta = w e3, p_b = p_p on the upper trace) is shared storage and cannot
/// drift.
struct StateVector {
    Vec disp;
    Vec vel;
    Vec pi;
    double t = 0.0;

    static StateVector zero(const DofLayout& L) {
        StateVector s;
        s.disp = Vec::Zero(L.n_sigma);
        s.vel = Vec::Zero(L.n_sigma);
        s.pi = Vec::Zero(L.n_pi);
        s.t = 0.0;
        return s;
    }
};

/// Scalar field closures used to interpolate data into the free DOFs.
/// For the plate block the four Hermite components are sampled from `w`,
/// `wx`, `wy`, `wxy`.
struct FieldFunctions {
    std::function<double(double, double, double)> eta[3];
    std::function<double(double, double, double)> pb;
    std::function<double(double, double)> w, wx, wy, wxy;
    std::function<double(double, double, double)> pp;  // (x1, x2, s)
    std::function<double(double, double, double)> u[3];
};

/// Interpolate closures into a free Sigma vector. Missing closures leave
/// their block at zero. Interface DOFs are sampled from the master field
/// (plate for vertical displacement, plate pressure for the Biot trace).
inline Vec interpolate_free(const DofLayout& L, const FieldFunctions& f) {
    Vec x = Vec::Zero(L.n_sigma);
    for (int g = 0; g < L.n_sigma; ++g) {
        const auto& info = L.free_info[g];
        const auto& c = info.coord;
        switch (info.field) {
            case Field::Eta:
                if (f.eta[info.comp]) x[g] = f.eta[info.comp](c[0], c[1], c[2]);
                break;
            case Field::Pb:
                if (f.pb) x[g] = f.pb(c[0], c[1], c[2]);
                break;
            case Field::W:
                switch (static_cast<PlateDof>(info.comp)) {
                    case PlateDof::Value: if (f.w) x[g] = f.w(c[0], c[1]); break;
                    case PlateDof::Dx: if (f.wx) x[g] = f.wx(c[0], c[1]); break;
                    case PlateDof::Dy: if (f.wy) x[g] = f.wy(c[0], c[1]); break;
                    case PlateDof::Dxy: if (f.wxy) x[g] = f.wxy(c[0], c[1]); break;
                }
                break;
            case Field::Pp:
                if (f.pp) x[g] = f.pp(c[0], c[1], c[2]);
                break;
            case Field::U:
                if (f.u[info.comp]) x[g] = f.u[info.comp](c[0], c[1], c[2]);
                break;
        }
    }
    return x;
}

/// Nodal values of a block field at the raw lattice nodes (slaved and zero
/// DOFs resolved), for export and trace checks.
inline double raw_dof_value(const DofLayout& L, const Vec& sigma, Field f, int raw) {
    const int g = L.resolve(f, raw);
    return g < 0 ? 0.0 : sigma[g];
}

}  // namespace mlf
