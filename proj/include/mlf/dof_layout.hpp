#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mlf/mesh.hpp"

namespace mlf {

/// The five coefficient blocks of the reduced unknown. In resolvent form the
/// blocks hold [eta, p_b, w, p_p, u]; in velocity form [zeta, p_b, v, p_p, u].
enum class Field : std::uint8_t { Eta = 0, Pb = 1, W = 2, Pp = 3, U = 4 };
inline constexpr int kNumFields = 5;

/// Hermite DOF types carried by each plate node.
enum class PlateDof : std::uint8_t { Value = 0, Dx = 1, Dy = 2, Dxy = 3 };

/// Constrained global numbering.
///
/// Every raw nodal DOF resolves to either a free global index or to zero:
///   - lateral periodicity identifies i = n with i = 0 (and j alike) on the
///     bulk layers, with Q2 indices wrapping mod 2n;
///   - eta and p_b vanish on the Biot top, u vanishes on the fluid bottom,
///     the plate blocks are clamped on the midsurface boundary;
///   - on the interface lattice the in-plane eta components vanish, vertical
///     eta values share the plate value DOF, and p_b values share the upper
///     plate-pressure trace DOF.
/// Resolution is one hop by construction: masters are themselves free or
/// zero, never slaved again.
struct DofLayout {
    MultilayerMesh mesh;

    std::array<int, kNumFields> block_offset{};
    std::array<int, kNumFields> block_size{};
    int n_sigma = 0;  // total free DOFs across the five blocks
    int n_pi = 0;     // fluid pressure multiplier DOFs (separate numbering)

    // raw -> free Sigma index, or -1 for a zero DOF
    std::array<std::vector<int>, kNumFields> res;
    std::vector<int> res_pi;

    // Description of each free DOF: owning field, node coordinate, component
    // (vector component for Eta/U, PlateDof for W, 0 otherwise).
    struct FreeDof {
        Field field;
        std::array<double, 3> coord;
        int comp;
    };
    std::vector<FreeDof> free_info;

    int raw_count(Field f) const { return static_cast<int>(res[static_cast<int>(f)].size()); }
    int resolve(Field f, int raw) const { return res[static_cast<int>(f)][raw]; }

    int block_begin(Field f) const { return block_offset[static_cast<int>(f)]; }
    int block_end(Field f) const {
        return block_offset[static_cast<int>(f)] + block_size[static_cast<int>(f)];
    }

    // ---- structured raw indexing -------------------------------------

    int eta_raw(int i, int j, int k, int c) const {
        return 3 * mesh.biot.node_index(i, j, k) + c;
    }
    int pb_raw(int i, int j, int k) const { return mesh.biot.node_index(i, j, k); }
    int w_raw(int i, int j, PlateDof t) const {
        return 4 * mesh.plate.node_index(i, j) + static_cast<int>(t);
    }
    int pp_raw(int i, int j, int k) const { return mesh.ppress.node_index(i, j, k); }
    int u_node(int i, int j, int k) const {
        const int nq = 2 * mesh.n_plane + 1;
        return i + nq * (j + nq * k);
    }
    int u_raw(int i, int j, int k, int c) const { return 3 * u_node(i, j, k) + c; }
    int pi_raw(int i, int j, int k) const { return mesh.fluid.node_index(i, j, k); }

    // ---- per-cell gather (Sigma indices; -1 marks a zero DOF) ---------

    std::array<int, 24> eta_cell_dofs(int ci, int cj, int ck) const {
        std::array<int, 24> out{};
        int m = 0;
        for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 2; ++j)
                for (int i = 0; i < 2; ++i)
                    for (int c = 0; c < 3; ++c)
                        out[m++] = resolve(Field::Eta, eta_raw(ci + i, cj + j, ck + k, c));
        return out;
    }
    std::array<int, 8> pb_cell_dofs(int ci, int cj, int ck) const {
        std::array<int, 8> out{};
        int m = 0;
        for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 2; ++j)
                for (int i = 0; i < 2; ++i)
                    out[m++] = resolve(Field::Pb, pb_raw(ci + i, cj + j, ck + k));
        return out;
    }
    std::array<int, 16> w_cell_dofs(int ci, int cj) const {
        std::array<int, 16> out{};
        int m = 0;
        for (int j = 0; j < 2; ++j)
            for (int i = 0; i < 2; ++i)
                for (int t = 0; t < 4; ++t)
                    out[m++] = resolve(Field::W, w_raw(ci + i, cj + j, static_cast<PlateDof>(t)));
        return out;
    }
    std::array<int, 8> pp_cell_dofs(int ci, int cj, int ck) const {
        std::array<int, 8> out{};
        int m = 0;
        for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 2; ++j)
                for (int i = 0; i < 2; ++i)
                    out[m++] = resolve(Field::Pp, pp_raw(ci + i, cj + j, ck + k));
        return out;
    }
    std::array<int, 81> u_cell_dofs(int ci, int cj, int ck) const {
        std::array<int, 81> out{};
        int m = 0;
        for (int k = 0; k < 3; ++k)
            for (int j = 0; j < 3; ++j)
                for (int i = 0; i < 3; ++i)
                    for (int c = 0; c < 3; ++c)
                        out[m++] = resolve(Field::U,
                                           u_raw(2 * ci + i, 2 * cj + j, 2 * ck + k, c));
        return out;
    }
    std::array<int, 8> pi_cell_dofs(int ci, int cj, int ck) const {
        std::array<int, 8> out{};
        int m = 0;
        for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 2; ++j)
                for (int i = 0; i < 2; ++i)
                    out[m++] = res_pi[pi_raw(ci + i, cj + j, ck + k)];
        return out;
    }
};

/// Build the constrained numbering for a mesh.
inline DofLayout build_dof_layout(const MultilayerMesh& mesh) {
    DofLayout L;
    L.mesh = mesh;
    const int n = mesh.n_plane;
    const int nq = 2 * n;  // Q2 in-plane period

    const auto wrap = [](int i, int period) { return i % period; };

    // Pass 1: free-index assignment per block, in block order.
    int next = 0;

    // Eta block: canonical in-plane nodes, zero on the Biot top, interface
    // nodes handled in pass 2 (in-plane zero, vertical slaved).
    L.res[0].assign(static_cast<size_t>(mesh.biot.nnodes()) * 3, -2);
    L.block_offset[0] = next;
    for (int k = 0; k <= mesh.nz_b; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                for (int c = 0; c < 3; ++c) {
                    if (k == mesh.nz_b || k == 0) continue;
                    L.res[0][L.eta_raw(i, j, k, c)] = next;
                    L.free_info.push_back({Field::Eta, mesh.biot.node_coord(i, j, k), c});
                    ++next;
                }
    L.block_size[0] = next - L.block_offset[0];

    // Pb block: canonical nodes, zero on the Biot top, interface slaved.
    L.res[1].assign(static_cast<size_t>(mesh.biot.nnodes()), -2);
    L.block_offset[1] = next;
    for (int k = 0; k <= mesh.nz_b; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                if (k == mesh.nz_b || k == 0) continue;
                L.res[1][L.pb_raw(i, j, k)] = next;
                L.free_info.push_back({Field::Pb, mesh.biot.node_coord(i, j, k), 0});
                ++next;
            }
    L.block_size[1] = next - L.block_offset[1];

    // W block: clamped boundary nodes carry no free DOFs.
    L.res[2].assign(static_cast<size_t>(mesh.plate.nnodes()) * 4, -1);
    L.block_offset[2] = next;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            const bool boundary = (i == 0 || i == n || j == 0 || j == n);
            for (int t = 0; t < 4; ++t) {
                if (boundary) continue;
                L.res[2][L.w_raw(i, j, static_cast<PlateDof>(t))] = next;
                L.free_info.push_back({Field::W, mesh.plate.node_coord(i, j), t});
                ++next;
            }
        }
    L.block_size[2] = next - L.block_offset[2];

    // Pp block: canonical nodes all free (no essential condition).
    L.res[3].assign(static_cast<size_t>(mesh.ppress.nnodes()), -2);
    L.block_offset[3] = next;
    for (int k = 0; k <= mesh.ns_p; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                L.res[3][L.pp_raw(i, j, k)] = next;
                L.free_info.push_back({Field::Pp, mesh.ppress.node_coord(i, j, k), 0});
                ++next;
            }
    L.block_size[3] = next - L.block_offset[3];

    // U block: canonical Q2 nodes, zero on the fluid bottom.
    const int unodes = (2 * n + 1) * (2 * n + 1) * (2 * mesh.nz_f + 1);
    L.res[4].assign(static_cast<size_t>(unodes) * 3, -2);
    L.block_offset[4] = next;
    const double hu = 0.5 / n;
    const double hz = 0.5 / mesh.nz_f;
    for (int k = 0; k <= 2 * mesh.nz_f; ++k)
        for (int j = 0; j < nq; ++j)
            for (int i = 0; i < nq; ++i)
                for (int c = 0; c < 3; ++c) {
                    if (k == 0) continue;
                    L.res[4][L.u_raw(i, j, k, c)] = next;
                    L.free_info.push_back(
                        {Field::U, {i * hu, j * hu, -1.0 + k * hz}, c});
                    ++next;
                }
    L.block_size[4] = next - L.block_offset[4];
    L.n_sigma = next;

    // Pass 2: interface slaving and periodic aliasing.

    // Eta: interface row.
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            L.res[0][L.eta_raw(i, j, 0, 0)] = -1;
            L.res[0][L.eta_raw(i, j, 0, 1)] = -1;
            L.res[0][L.eta_raw(i, j, 0, 2)] =
                L.res[2][L.w_raw(i, j, PlateDof::Value)];
        }
    // Eta: Biot top row is zero.
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            for (int c = 0; c < 3; ++c)
                L.res[0][L.eta_raw(i, j, mesh.nz_b, c)] = -1;
    // Eta: periodic aliases.
    for (int k = 0; k <= mesh.nz_b; ++k)
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i) {
                if (i < n && j < n) continue;
                for (int c = 0; c < 3; ++c)
                    L.res[0][L.eta_raw(i, j, k, c)] =
                        L.res[0][L.eta_raw(wrap(i, n), wrap(j, n), k, c)];
            }

    // Pb: interface row slaved to the upper plate-pressure trace.
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            L.res[1][L.pb_raw(i, j, 0)] = L.res[3][L.pp_raw(i, j, mesh.ns_p)];
            L.res[1][L.pb_raw(i, j, mesh.nz_b)] = -1;
        }
    for (int k = 0; k <= mesh.nz_b; ++k)
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i) {
                if (i < n && j < n) continue;
                L.res[1][L.pb_raw(i, j, k)] = L.res[1][L.pb_raw(wrap(i, n), wrap(j, n), k)];
            }

    // Pp: periodic aliases.
    for (int k = 0; k <= mesh.ns_p; ++k)
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i) {
                if (i < n && j < n) continue;
                L.res[3][L.pp_raw(i, j, k)] = L.res[3][L.pp_raw(wrap(i, n), wrap(j, n), k)];
            }

    // U: bottom row zero, then periodic aliases.
    for (int j = 0; j < nq; ++j)
        for (int i = 0; i < nq; ++i)
            for (int c = 0; c < 3; ++c)
                L.res[4][L.u_raw(i, j, 0, c)] = -1;
    for (int k = 0; k <= 2 * mesh.nz_f; ++k)
        for (int j = 0; j <= nq; ++j)
            for (int i = 0; i <= nq; ++i) {
                if (i < nq && j < nq) continue;
                for (int c = 0; c < 3; ++c)
                    L.res[4][L.u_raw(i, j, k, c)] =
                        L.res[4][L.u_raw(wrap(i, nq), wrap(j, nq), k, c)];
            }

    // Pi: canonical nodes free, aliases wrap.
    L.res_pi.assign(static_cast<size_t>(mesh.fluid.nnodes()), -2);
    int next_pi = 0;
    for (int k = 0; k <= mesh.nz_f; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) L.res_pi[L.pi_raw(i, j, k)] = next_pi++;
    for (int k = 0; k <= mesh.nz_f; ++k)
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i) {
                if (i < n && j < n) continue;
                L.res_pi[L.pi_raw(i, j, k)] = L.res_pi[L.pi_raw(wrap(i, n), wrap(j, n), k)];
            }
    L.n_pi = next_pi;

    return L;
}

}  // namespace mlf
