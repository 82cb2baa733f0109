#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mlf/quadrature.hpp"

namespace mlf {

/// Reference element families used by the four layers.
///
/// Q1_3D      trilinear hexahedron, 8 nodes (Biot displacement/pressure,
///            plate-pressure prism over (x1,x2,s), Stokes pressure)
/// Q2_3D      triquadratic hexahedron, 27 nodes (Stokes velocity)
/// BFS_2D     Bogner-Fox-Schmit bicubic Hermite rectangle, 4 nodes x
///            [value, d/dx, d/dy, d2/dxdy] (plate displacement)
/// Q1_2D      bilinear quadrilateral, 4 nodes (surface helpers)
enum class Family : std::uint8_t { Q1_3D, Q2_3D, BFS_2D, Q1_2D };

inline int family_dim(Family f) {
    return (f == Family::BFS_2D || f == Family::Q1_2D) ? 2 : 3;
}

inline int family_ndof(Family f) {
    switch (f) {
        case Family::Q1_3D: return 8;
        case Family::Q2_3D: return 27;
        case Family::BFS_2D: return 16;
        case Family::Q1_2D: return 4;
    }
    return 0;
}

namespace detail {

inline void q1_shape(double x, double* n, double* d) {
    n[0] = 1.0 - x;
    n[1] = x;
    d[0] = -1.0;
    d[1] = 1.0;
}

inline void q2_shape(double x, double* n, double* d) {
    n[0] = (1.0 - x) * (1.0 - 2.0 * x);
    n[1] = 4.0 * x * (1.0 - x);
    n[2] = x * (2.0 * x - 1.0);
    d[0] = 4.0 * x - 3.0;
    d[1] = 4.0 - 8.0 * x;
    d[2] = 4.0 * x - 1.0;
}

// Cubic Hermite basis on [0,1]: h[end][type] with type 0 = value DOF,
// type 1 = first-derivative DOF; d1/d2 are first/second derivatives.
inline void hermite_shape(double x, double h[2][2], double d1[2][2], double d2[2][2]) {
    const double x2 = x * x, x3 = x2 * x;
    h[0][0] = 1.0 - 3.0 * x2 + 2.0 * x3;
    h[0][1] = x - 2.0 * x2 + x3;
    h[1][0] = 3.0 * x2 - 2.0 * x3;
    h[1][1] = -x2 + x3;
    d1[0][0] = -6.0 * x + 6.0 * x2;
    d1[0][1] = 1.0 - 4.0 * x + 3.0 * x2;
    d1[1][0] = 6.0 * x - 6.0 * x2;
    d1[1][1] = -2.0 * x + 3.0 * x2;
    d2[0][0] = -6.0 + 12.0 * x;
    d2[0][1] = -4.0 + 6.0 * x;
    d2[1][0] = 6.0 - 12.0 * x;
    d2[1][1] = -2.0 + 6.0 * x;
}

}  // namespace detail

/// Reference basis values at one point. `second` is filled for BFS_2D only
/// (xx, yy, xy ordering).
inline void eval_basis_point(Family f, const std::array<double, 3>& xi,
                             double* value, double* grad, double* second = nullptr) {
    switch (f) {
        case Family::Q1_3D: {
            double nx[2], dx[2], ny[2], dy[2], nz[2], dz[2];
            detail::q1_shape(xi[0], nx, dx);
            detail::q1_shape(xi[1], ny, dy);
            detail::q1_shape(xi[2], nz, dz);
            for (int k = 0; k < 2; ++k)
                for (int j = 0; j < 2; ++j)
                    for (int i = 0; i < 2; ++i) {
                        const int a = i + 2 * j + 4 * k;
                        value[a] = nx[i] * ny[j] * nz[k];
                        grad[3 * a + 0] = dx[i] * ny[j] * nz[k];
                        grad[3 * a + 1] = nx[i] * dy[j] * nz[k];
                        grad[3 * a + 2] = nx[i] * ny[j] * dz[k];
                    }
            break;
        }
        case Family::Q2_3D: {
            double nx[3], dx[3], ny[3], dy[3], nz[3], dz[3];
            detail::q2_shape(xi[0], nx, dx);
            detail::q2_shape(xi[1], ny, dy);
            detail::q2_shape(xi[2], nz, dz);
            for (int k = 0; k < 3; ++k)
                for (int j = 0; j < 3; ++j)
                    for (int i = 0; i < 3; ++i) {
                        const int a = i + 3 * j + 9 * k;
                        value[a] = nx[i] * ny[j] * nz[k];
                        grad[3 * a + 0] = dx[i] * ny[j] * nz[k];
                        grad[3 * a + 1] = nx[i] * dy[j] * nz[k];
                        grad[3 * a + 2] = nx[i] * ny[j] * dz[k];
                    }
            break;
        }
        case Family::Q1_2D: {
            double nx[2], dx[2], ny[2], dy[2];
            detail::q1_shape(xi[0], nx, dx);
            detail::q1_shape(xi[1], ny, dy);
            for (int j = 0; j < 2; ++j)
                for (int i = 0; i < 2; ++i) {
                    const int a = i + 2 * j;
                    value[a] = nx[i] * ny[j];
                    grad[2 * a + 0] = dx[i] * ny[j];
                    grad[2 * a + 1] = nx[i] * dy[j];
                }
            break;
        }
        case Family::BFS_2D: {
            double hx[2][2], dx1[2][2], dx2[2][2];
            double hy[2][2], dy1[2][2], dy2[2][2];
            detail::hermite_shape(xi[0], hx, dx1, dx2);
            detail::hermite_shape(xi[1], hy, dy1, dy2);
            // per node (a,b): dof order [value, d/dx, d/dy, d2/dxdy]
            for (int b = 0; b < 2; ++b)
                for (int a = 0; a < 2; ++a)
                    for (int t = 0; t < 4; ++t) {
                        const int tx = (t == 1 || t == 3) ? 1 : 0;
                        const int ty = (t == 2 || t == 3) ? 1 : 0;
                        const int idx = 4 * (a + 2 * b) + t;
                        value[idx] = hx[a][tx] * hy[b][ty];
                        grad[2 * idx + 0] = dx1[a][tx] * hy[b][ty];
                        grad[2 * idx + 1] = hx[a][tx] * dy1[b][ty];
                        if (second) {
                            second[3 * idx + 0] = dx2[a][tx] * hy[b][ty];
                            second[3 * idx + 1] = hx[a][tx] * dy2[b][ty];
                            second[3 * idx + 2] = dx1[a][tx] * dy1[b][ty];
                        }
                    }
            break;
        }
    }
}

/// Basis values tabulated at the points of a quadrature rule. Tables start
/// out on the reference cell; map_to_physical() rescales them (and the
/// weights) for an axis-aligned box cell.
struct BasisTable {
    Family family{};
    int dim = 0;
    int ndof = 0;
    int nq = 0;
    bool physical = false;
    std::array<double, 3> extents{1.0, 1.0, 1.0};

    std::vector<double> value;   // nq * ndof
    std::vector<double> grad;    // nq * ndof * dim
    std::vector<double> second;  // nq * ndof * 3 (BFS only; xx, yy, xy)
    std::vector<double> weights; // nq (reference weights until mapped)

    double val(int q, int i) const { return value[q * ndof + i]; }
    double der(int q, int i, int d) const { return grad[(q * ndof + i) * dim + d]; }
    double der2(int q, int i, int c) const { return second[(q * ndof + i) * 3 + c]; }
};

/// Tabulate a family at the points of `rule` (reference cell).
inline BasisTable tabulate(Family f, const QuadRule& rule) {
    if (rule.dim != family_dim(f))
        throw std::invalid_argument("tabulate: rule dimension does not match family");
    BasisTable t;
    t.family = f;
    t.dim = family_dim(f);
    t.ndof = family_ndof(f);
    t.nq = rule.size();
    t.value.resize(static_cast<size_t>(t.nq) * t.ndof);
    t.grad.resize(static_cast<size_t>(t.nq) * t.ndof * t.dim);
    const bool want2 = (f == Family::BFS_2D);
    if (want2) t.second.resize(static_cast<size_t>(t.nq) * t.ndof * 3);
    t.weights = rule.weights;
    for (int q = 0; q < t.nq; ++q)
        eval_basis_point(f, rule.points[q], &t.value[q * t.ndof],
                         &t.grad[static_cast<size_t>(q) * t.ndof * t.dim],
                         want2 ? &t.second[static_cast<size_t>(q) * t.ndof * 3] : nullptr);
    return t;
}

/// Tabulate the trace of a 3D family on the face xi3 = face3 (0 or 1) at the
/// points of a 2D rule. Values only; used for interface integrals.
inline BasisTable tabulate_face(Family f, const QuadRule& rule2d, double face3) {
    if (family_dim(f) != 3 || rule2d.dim != 2)
        throw std::invalid_argument("tabulate_face: needs a 3D family and a 2D rule");
    BasisTable t;
    t.family = f;
    t.dim = 3;
    t.ndof = family_ndof(f);
    t.nq = rule2d.size();
    t.value.resize(static_cast<size_t>(t.nq) * t.ndof);
    t.grad.resize(static_cast<size_t>(t.nq) * t.ndof * 3);
    t.weights = rule2d.weights;
    for (int q = 0; q < t.nq; ++q) {
        std::array<double, 3> xi{rule2d.points[q][0], rule2d.points[q][1], face3};
        eval_basis_point(f, xi, &t.value[q * t.ndof],
                         &t.grad[static_cast<size_t>(q) * t.ndof * 3]);
    }
    return t;
}

/// Rescale a reference table for an axis-aligned box with the given extents.
/// Gradients pick up 1/h per direction, weights pick up the cell volume (or
/// area), and Hermite derivative DOFs are rescaled so that the physical DOFs
/// are (value, d/dx, d/dy, d2/dxdy).
inline BasisTable map_to_physical(const BasisTable& ref, const std::array<double, 3>& extents) {
    for (int d = 0; d < ref.dim; ++d)
        if (!(extents[d] > 0.0))
            throw std::invalid_argument("map_to_physical: degenerate cell extent");

    BasisTable t = ref;
    t.physical = true;
    t.extents = extents;

    double vol = 1.0;
    for (int d = 0; d < ref.dim; ++d) vol *= extents[d];
    for (auto& w : t.weights) w *= vol;

    if (ref.family == Family::BFS_2D) {
        const double hx = extents[0], hy = extents[1];
        for (int q = 0; q < t.nq; ++q)
            for (int i = 0; i < t.ndof; ++i) {
                const int type = i % 4;
                const double s = (type == 1 ? hx : type == 2 ? hy : type == 3 ? hx * hy : 1.0);
                t.value[q * t.ndof + i] *= s;
                t.grad[(q * t.ndof + i) * 2 + 0] *= s / hx;
                t.grad[(q * t.ndof + i) * 2 + 1] *= s / hy;
                t.second[(q * t.ndof + i) * 3 + 0] *= s / (hx * hx);
                t.second[(q * t.ndof + i) * 3 + 1] *= s / (hy * hy);
                t.second[(q * t.ndof + i) * 3 + 2] *= s / (hx * hy);
            }
    } else {
        for (int q = 0; q < t.nq; ++q)
            for (int i = 0; i < t.ndof; ++i)
                for (int d = 0; d < t.dim; ++d)
                    t.grad[(q * t.ndof + i) * t.dim + d] /= extents[d];
    }
    return t;
}

}  // namespace mlf
