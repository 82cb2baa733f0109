#pragma once

#include <array>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlf/evolution.hpp"
#include "mlf/state.hpp"

namespace mlf {

class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline constexpr const char* kEnergyCsvHeader =
    "t,E,E_eta,E_zeta,E_pb,E_w,E_v,E_pp,E_u,D_diss,J,identity_residual";

/// One CSV row per executed step, 17 significant digits.
inline void write_energy_csv(const std::vector<EnergyReport>& reports, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << kEnergyCsvHeader << "\n";
    for (const auto& r : reports) {
        out << detail::fmt17(r.t) << ',' << detail::fmt17(r.E) << ','
            << detail::fmt17(r.blocks.eta) << ',' << detail::fmt17(r.blocks.zeta) << ','
            << detail::fmt17(r.blocks.pb) << ',' << detail::fmt17(r.blocks.w) << ','
            << detail::fmt17(r.blocks.v) << ',' << detail::fmt17(r.blocks.pp) << ','
            << detail::fmt17(r.blocks.u) << ',' << detail::fmt17(r.D_diss) << ','
            << detail::fmt17(r.J) << ',' << detail::fmt17(r.identity_residual) << "\n";
    }
    if (!out) throw IoError("write failure on '" + path + "'");
}

struct EnergyCsv {
    std::vector<std::string> columns;
    std::vector<std::array<double, 12>> rows;
};

inline EnergyCsv read_energy_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    EnergyCsv csv;
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty energy CSV '" + path + "'");
    if (line != kEnergyCsvHeader) throw IoError("unexpected energy CSV header in '" + path + "'");
    {
        std::stringstream hs(line);
        std::string col;
        while (std::getline(hs, col, ',')) csv.columns.push_back(col);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ls(line);
        std::string cell;
        std::array<double, 12> row{};
        int i = 0;
        while (std::getline(ls, cell, ',')) {
            if (i >= 12) throw IoError("too many columns in '" + path + "'");
            row[i++] = std::stod(cell);
        }
        if (i != 12) throw IoError("short row in '" + path + "'");
        csv.rows.push_back(row);
    }
    return csv;
}

// ---------------------------------------------------------------------------
// legacy ASCII VTK export, one file per layer
// ---------------------------------------------------------------------------

namespace detail {

// lexicographic (i fastest) hex corners -> VTK_HEXAHEDRON ordering
inline constexpr int kHexPerm[8] = {0, 1, 3, 2, 4, 5, 7, 6};

inline void write_vtk_header(std::ofstream& out, const std::string& title, size_t npoints) {
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << npoints << " double\n";
}

inline void write_hex_cells(std::ofstream& out, const std::vector<std::array<int, 8>>& cells) {
    out << "CELLS " << cells.size() << ' ' << 9 * cells.size() << "\n";
    for (const auto& c : cells) {
        out << 8;
        for (int m = 0; m < 8; ++m) out << ' ' << c[kHexPerm[m]];
        out << "\n";
    }
    out << "CELL_TYPES " << cells.size() << "\n";
    for (size_t i = 0; i < cells.size(); ++i) out << 12 << "\n";
}

inline void write_scalars(std::ofstream& out, const std::string& name,
                          const std::vector<double>& v) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (double x : v) out << fmt17(x) << "\n";
}

inline void write_vectors(std::ofstream& out, const std::string& name,
                          const std::vector<std::array<double, 3>>& v) {
    out << "VECTORS " << name << " double\n";
    for (const auto& x : v) out << fmt17(x[0]) << ' ' << fmt17(x[1]) << ' ' << fmt17(x[2]) << "\n";
}

}  // namespace detail

/// Write one legacy ASCII VTK file per layer: <base>_biot.vtk (eta, p_b),
/// <base>_fluid.vtk (u, pi), <base>_plate.vtk (w, v), <base>_ppress.vtk (p_p
/// over (x1, x2, s)). Exported duplicate periodic boundary points carry the
/// shared DOF values.
inline void write_vtk_snapshot(const StateVector& st, const DofLayout& L,
                               const std::string& base) {
    const MultilayerMesh& m = L.mesh;

    {   // Biot layer
        std::ofstream out(base + "_biot.vtk", std::ios::binary);
        if (!out) throw IoError("cannot open '" + base + "_biot.vtk'");
        detail::write_vtk_header(out, "biot layer", m.biot_coords.size());
        for (const auto& c : m.biot_coords)
            out << detail::fmt17(c[0]) << ' ' << detail::fmt17(c[1]) << ' '
                << detail::fmt17(c[2]) << "\n";
        detail::write_hex_cells(out, m.biot_cells);
        out << "POINT_DATA " << m.biot_coords.size() << "\n";
        std::vector<std::array<double, 3>> eta(m.biot_coords.size());
        std::vector<double> pb(m.biot_coords.size());
        for (int k = 0; k <= m.nz_b; ++k)
            for (int j = 0; j <= m.n_plane; ++j)
                for (int i = 0; i <= m.n_plane; ++i) {
                    const int nd = m.biot.node_index(i, j, k);
                    for (int c = 0; c < 3; ++c)
                        eta[nd][c] = raw_dof_value(L, st.disp, Field::Eta, L.eta_raw(i, j, k, c));
                    pb[nd] = raw_dof_value(L, st.vel, Field::Pb, L.pb_raw(i, j, k));
                }
        detail::write_vectors(out, "eta", eta);
        detail::write_scalars(out, "p_b", pb);
    }

    {   // fluid layer (velocity sampled at the Q1 corners of the Q2 lattice)
        std::ofstream out(base + "_fluid.vtk", std::ios::binary);
        if (!out) throw IoError("cannot open '" + base + "_fluid.vtk'");
        detail::write_vtk_header(out, "fluid layer", m.fluid_coords.size());
        for (const auto& c : m.fluid_coords)
            out << detail::fmt17(c[0]) << ' ' << detail::fmt17(c[1]) << ' '
                << detail::fmt17(c[2]) << "\n";
        detail::write_hex_cells(out, m.fluid_cells);
        out << "POINT_DATA " << m.fluid_coords.size() << "\n";
        std::vector<std::array<double, 3>> u(m.fluid_coords.size());
        std::vector<double> pi(m.fluid_coords.size());
        for (int k = 0; k <= m.nz_f; ++k)
            for (int j = 0; j <= m.n_plane; ++j)
                for (int i = 0; i <= m.n_plane; ++i) {
                    const int nd = m.fluid.node_index(i, j, k);
                    for (int c = 0; c < 3; ++c)
                        u[nd][c] =
                            raw_dof_value(L, st.vel, Field::U, L.u_raw(2 * i, 2 * j, 2 * k, c));
                    const int gp = L.res_pi[L.pi_raw(i, j, k)];
                    pi[nd] = gp < 0 ? 0.0 : st.pi[gp];
                }
        detail::write_vectors(out, "u", u);
        detail::write_scalars(out, "pi", pi);
    }

    {   // plate midsurface
        std::ofstream out(base + "_plate.vtk", std::ios::binary);
        if (!out) throw IoError("cannot open '" + base + "_plate.vtk'");
        detail::write_vtk_header(out, "plate midsurface", m.plate_coords.size());
        for (const auto& c : m.plate_coords)
            out << detail::fmt17(c[0]) << ' ' << detail::fmt17(c[1]) << ' '
                << detail::fmt17(c[2]) << "\n";
        out << "CELLS " << m.plate_cells.size() << ' ' << 5 * m.plate_cells.size() << "\n";
        for (const auto& c : m.plate_cells)
            out << 4 << ' ' << c[0] << ' ' << c[1] << ' ' << c[3] << ' ' << c[2] << "\n";
        out << "CELL_TYPES " << m.plate_cells.size() << "\n";
        for (size_t i = 0; i < m.plate_cells.size(); ++i) out << 9 << "\n";
        out << "POINT_DATA " << m.plate_coords.size() << "\n";
        std::vector<double> w(m.plate_coords.size()), v(m.plate_coords.size());
        for (int j = 0; j <= m.n_plane; ++j)
            for (int i = 0; i <= m.n_plane; ++i) {
                const int nd = m.plate.node_index(i, j);
                w[nd] = raw_dof_value(L, st.disp, Field::W, L.w_raw(i, j, PlateDof::Value));
                v[nd] = raw_dof_value(L, st.vel, Field::W, L.w_raw(i, j, PlateDof::Value));
            }
        detail::write_scalars(out, "w", w);
        detail::write_scalars(out, "v", v);
    }

    {   // plate pressure over (x1, x2, s); s straddles zero so the box renders
        // between the bulk layers
        std::ofstream out(base + "_ppress.vtk", std::ios::binary);
        if (!out) throw IoError("cannot open '" + base + "_ppress.vtk'");
        detail::write_vtk_header(out, "plate pressure", m.pp_coords.size());
        for (const auto& c : m.pp_coords)
            out << detail::fmt17(c[0]) << ' ' << detail::fmt17(c[1]) << ' '
                << detail::fmt17(c[2]) << "\n";
        detail::write_hex_cells(out, m.pp_cells);
        out << "POINT_DATA " << m.pp_coords.size() << "\n";
        std::vector<double> pp(m.pp_coords.size());
        for (int k = 0; k <= m.ns_p; ++k)
            for (int j = 0; j <= m.n_plane; ++j)
                for (int i = 0; i <= m.n_plane; ++i)
                    pp[m.ppress.node_index(i, j, k)] =
                        raw_dof_value(L, st.vel, Field::Pp, L.pp_raw(i, j, k));
        detail::write_scalars(out, "p_p", pp);
    }
}

/// Minimal reader for the writer's own legacy VTK layout: points plus named
/// point-data arrays (used by round-trip tests).
struct VtkFile {
    std::vector<std::array<double, 3>> points;
    size_t n_cells = 0;
    int cell_type = 0;
    std::map<std::string, std::vector<double>> scalars;
    std::map<std::string, std::vector<std::array<double, 3>>> vectors;
};

inline VtkFile read_vtk(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    VtkFile f;
    std::string tok;
    size_t npoints = 0;
    while (in >> tok) {
        if (tok == "POINTS") {
            std::string type;
            in >> npoints >> type;
            f.points.resize(npoints);
            for (size_t i = 0; i < npoints; ++i)
                in >> f.points[i][0] >> f.points[i][1] >> f.points[i][2];
        } else if (tok == "CELLS") {
            size_t ncells, total;
            in >> ncells >> total;
            f.n_cells = ncells;
            for (size_t i = 0; i < total; ++i) {
                long dummy;
                in >> dummy;
            }
        } else if (tok == "CELL_TYPES") {
            size_t ncells;
            in >> ncells;
            for (size_t i = 0; i < ncells; ++i) in >> f.cell_type;
        } else if (tok == "SCALARS") {
            std::string name, type;
            int comps;
            in >> name >> type >> comps;
            std::string lut, lutname;
            in >> lut >> lutname;
            auto& v = f.scalars[name];
            v.resize(npoints);
            for (size_t i = 0; i < npoints; ++i) in >> v[i];
        } else if (tok == "VECTORS") {
            std::string name, type;
            in >> name >> type;
            auto& v = f.vectors[name];
            v.resize(npoints);
            for (size_t i = 0; i < npoints; ++i) in >> v[i][0] >> v[i][1] >> v[i][2];
        }
    }
    if (f.points.empty()) throw IoError("no POINTS section in '" + path + "'");
    return f;
}

}  // namespace mlf
