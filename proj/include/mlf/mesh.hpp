#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "mlf/quadrature.hpp"

namespace mlf {

/// One structured axis-aligned grid layer.
struct LayerGrid {
    int nx = 0, ny = 0, nz = 0;             // cells per direction (nz = 0 for the plate)
    std::array<double, 3> origin{0, 0, 0};
    std::array<double, 3> cell{1, 1, 1};    // cell extents

    int ncells() const { return nz == 0 ? nx * ny : nx * ny * nz; }
    int nnodes() const { return nz == 0 ? (nx + 1) * (ny + 1) : (nx + 1) * (ny + 1) * (nz + 1); }

    int node_index(int i, int j, int k = 0) const {
        return i + (nx + 1) * (j + (ny + 1) * k);
    }
    int cell_index(int ci, int cj, int ck = 0) const {
        return ci + nx * (cj + ny * ck);
    }
    std::array<double, 3> node_coord(int i, int j, int k = 0) const {
        return {origin[0] + i * cell[0], origin[1] + j * cell[1], origin[2] + k * cell[2]};
    }
    double volume() const {
        double v = cell[0] * cell[1] * (nz == 0 ? 1.0 : cell[2]);
        return v * ncells();
    }
};

/// Correspondence between one plate cell and the adjacent bulk faces: the
/// top face of an upper fluid cell, the bottom face of a lower Biot cell,
/// and the bottom/top cells of the plate-pressure column above it.
struct InterfacePatch {
    int plate_cell = -1;
    int fluid_cell = -1;      // top-layer fluid cell; its xi3 = 1 face lies on the interface
    int biot_cell = -1;       // bottom-layer Biot cell; its xi3 = 0 face lies on the interface
    int pp_cell_bottom = -1;  // s = -h/2 face of this cell lies on the lower pressure face
    int pp_cell_top = -1;     // s = +h/2 face of this cell lies on the upper pressure face
    int ci = 0, cj = 0;       // in-plane cell coordinates
};

/// Four structured grids over the unit-square footprint: the Biot column
/// (0,1)^2 x (0,1), the fluid column (0,1)^2 x (-1,0), the plate midsurface
/// at x3 = 0, and the plate-pressure box (0,1)^2 x (-h/2, h/2) in (x1,x2,s).
/// All layers share one in-plane lattice so that interface nodes coincide.
struct MultilayerMesh {
    int n_plane = 0;
    int nz_b = 0;
    int nz_f = 0;
    int ns_p = 0;
    double h_p = 0.0;

    LayerGrid biot;
    LayerGrid fluid;
    LayerGrid plate;
    LayerGrid ppress;

    std::vector<InterfacePatch> interface_cells;

    // Explicit incidence for IO and inspection (Q1 geometry).
    std::vector<std::array<double, 3>> biot_coords, fluid_coords, plate_coords, pp_coords;
    std::vector<std::array<int, 8>> biot_cells, fluid_cells, pp_cells;
    std::vector<std::array<int, 4>> plate_cells;
};

namespace detail {

inline void fill_hex_incidence(const LayerGrid& g,
                               std::vector<std::array<double, 3>>& coords,
                               std::vector<std::array<int, 8>>& cells) {
    coords.resize(g.nnodes());
    for (int k = 0; k <= g.nz; ++k)
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i)
                coords[g.node_index(i, j, k)] = g.node_coord(i, j, k);
    cells.resize(g.ncells());
    for (int ck = 0; ck < g.nz; ++ck)
        for (int cj = 0; cj < g.ny; ++cj)
            for (int ci = 0; ci < g.nx; ++ci) {
                std::array<int, 8> c{};
                int m = 0;
                for (int k = 0; k < 2; ++k)
                    for (int j = 0; j < 2; ++j)
                        for (int i = 0; i < 2; ++i)
                            c[m++] = g.node_index(ci + i, cj + j, ck + k);
                cells[g.cell_index(ci, cj, ck)] = c;
            }
}

}  // namespace detail

/// Build the four-layer mesh. Counts must be >= 1 and the plate thickness
/// positive.
inline MultilayerMesh build_mesh(int n_plane, int nz_b, int nz_f, int ns_p, double h_p) {
    if (n_plane < 1 || nz_b < 1 || nz_f < 1 || ns_p < 1)
        throw std::invalid_argument("build_mesh: cell counts must be >= 1");
    if (!(h_p > 0.0))
        throw std::invalid_argument("build_mesh: plate thickness h_p must be > 0");

    MultilayerMesh m;
    m.n_plane = n_plane;
    m.nz_b = nz_b;
    m.nz_f = nz_f;
    m.ns_p = ns_p;
    m.h_p = h_p;

    const double hxy = 1.0 / n_plane;
    m.biot = LayerGrid{n_plane, n_plane, nz_b, {0, 0, 0}, {hxy, hxy, 1.0 / nz_b}};
    m.fluid = LayerGrid{n_plane, n_plane, nz_f, {0, 0, -1.0}, {hxy, hxy, 1.0 / nz_f}};
    m.plate = LayerGrid{n_plane, n_plane, 0, {0, 0, 0}, {hxy, hxy, 1.0}};
    m.ppress = LayerGrid{n_plane, n_plane, ns_p, {0, 0, -0.5 * h_p}, {hxy, hxy, h_p / ns_p}};

    detail::fill_hex_incidence(m.biot, m.biot_coords, m.biot_cells);
    detail::fill_hex_incidence(m.fluid, m.fluid_coords, m.fluid_cells);
    detail::fill_hex_incidence(m.ppress, m.pp_coords, m.pp_cells);

    m.plate_coords.resize(m.plate.nnodes());
    for (int j = 0; j <= n_plane; ++j)
        for (int i = 0; i <= n_plane; ++i)
            m.plate_coords[m.plate.node_index(i, j)] = m.plate.node_coord(i, j);
    m.plate_cells.resize(m.plate.ncells());
    for (int cj = 0; cj < n_plane; ++cj)
        for (int ci = 0; ci < n_plane; ++ci)
            m.plate_cells[m.plate.cell_index(ci, cj)] = {
                m.plate.node_index(ci, cj), m.plate.node_index(ci + 1, cj),
                m.plate.node_index(ci, cj + 1), m.plate.node_index(ci + 1, cj + 1)};

    m.interface_cells.reserve(static_cast<size_t>(n_plane) * n_plane);
    for (int cj = 0; cj < n_plane; ++cj)
        for (int ci = 0; ci < n_plane; ++ci) {
            InterfacePatch p;
            p.ci = ci;
            p.cj = cj;
            p.plate_cell = m.plate.cell_index(ci, cj);
            p.fluid_cell = m.fluid.cell_index(ci, cj, nz_f - 1);
            p.biot_cell = m.biot.cell_index(ci, cj, 0);
            p.pp_cell_bottom = m.ppress.cell_index(ci, cj, 0);
            p.pp_cell_top = m.ppress.cell_index(ci, cj, ns_p - 1);
            m.interface_cells.push_back(p);
        }
    return m;
}

/// Physical in-plane quadrature for one interface patch: points on the patch
/// footprint and weights summing to the patch area.
struct PatchQuadrature {
    std::vector<std::array<double, 2>> points;
    std::vector<double> weights;
};

inline PatchQuadrature patch_quadrature(const MultilayerMesh& m, const InterfacePatch& p,
                                        const QuadRule& rule2d) {
    PatchQuadrature pq;
    const double h = 1.0 / m.n_plane;
    const double area = h * h;
    pq.points.reserve(rule2d.size());
    pq.weights.reserve(rule2d.size());
    for (int q = 0; q < rule2d.size(); ++q) {
        pq.points.push_back({(p.ci + rule2d.points[q][0]) * h, (p.cj + rule2d.points[q][1]) * h});
        pq.weights.push_back(rule2d.weights[q] * area);
    }
    return pq;
}

}  // namespace mlf
