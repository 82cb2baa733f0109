#include <catch2/catch_amalgamated.hpp>

#include "mlf/dof_layout.hpp"

using namespace mlf;

TEST_CASE("1x1x1 mesh: all plate DOFs clamped") {
    const MultilayerMesh m = build_mesh(1, 1, 1, 1, 0.2);
    const DofLayout L = build_dof_layout(m);
    // 4 plate nodes x 4 Hermite DOFs raw, all on the boundary
    CHECK(L.raw_count(Field::W) == 16);
    CHECK(L.block_size[static_cast<int>(Field::W)] == 0);
    for (int raw = 0; raw < 16; ++raw) CHECK(L.resolve(Field::W, raw) == -1);
}

TEST_CASE("2-cell plate: one interior node, 4 free Hermite DOFs") {
    const MultilayerMesh m = build_mesh(2, 1, 1, 1, 0.2);
    const DofLayout L = build_dof_layout(m);
    CHECK(L.block_size[static_cast<int>(Field::W)] == 4);
    for (int t = 0; t < 4; ++t)
        CHECK(L.resolve(Field::W, L.w_raw(1, 1, static_cast<PlateDof>(t))) >= 0);
}

TEST_CASE("interface slaving: eta3 follows the plate value DOF, in-plane is zero") {
    const MultilayerMesh m = build_mesh(4, 2, 2, 1, 0.2);
    const DofLayout L = build_dof_layout(m);
    for (int j = 0; j <= 4; ++j)
        for (int i = 0; i <= 4; ++i) {
            const int g0 = L.resolve(Field::Eta, L.eta_raw(i, j, 0, 0));
            const int g1 = L.resolve(Field::Eta, L.eta_raw(i, j, 0, 1));
            const int g2 = L.resolve(Field::Eta, L.eta_raw(i, j, 0, 2));
            CHECK(g0 == -1);
            CHECK(g1 == -1);
            const int iw = i % 4, jw = j % 4;
            const int wmaster = L.resolve(Field::W, L.w_raw(iw, jw, PlateDof::Value));
            CHECK(g2 == wmaster);
            // boundary plate columns resolve to zero
            if (iw == 0 || jw == 0) CHECK(g2 == -1);
        }
}

TEST_CASE("p_b interface trace shares the upper plate-pressure DOF") {
    const MultilayerMesh m = build_mesh(3, 2, 2, 2, 0.4);
    const DofLayout L = build_dof_layout(m);
    for (int j = 0; j <= 3; ++j)
        for (int i = 0; i <= 3; ++i) {
            const int gb = L.resolve(Field::Pb, L.pb_raw(i, j, 0));
            const int gp = L.resolve(Field::Pp, L.pp_raw(i % 3, j % 3, m.ns_p));
            CHECK(gb == gp);
            CHECK(gb >= 0);
        }
}

TEST_CASE("essential zeros: Biot top and fluid bottom") {
    const MultilayerMesh m = build_mesh(2, 2, 3, 1, 0.2);
    const DofLayout L = build_dof_layout(m);
    for (int j = 0; j <= 2; ++j)
        for (int i = 0; i <= 2; ++i) {
            for (int c = 0; c < 3; ++c)
                CHECK(L.resolve(Field::Eta, L.eta_raw(i, j, m.nz_b, c)) == -1);
            CHECK(L.resolve(Field::Pb, L.pb_raw(i, j, m.nz_b)) == -1);
        }
    for (int j = 0; j <= 4; ++j)
        for (int i = 0; i <= 4; ++i)
            for (int c = 0; c < 3; ++c)
                CHECK(L.resolve(Field::U, L.u_raw(i, j, 0, c)) == -1);
}

TEST_CASE("periodic identification is one global DOF per orbit") {
    const MultilayerMesh m = build_mesh(4, 2, 2, 1, 0.2);
    const DofLayout L = build_dof_layout(m);
    // opposite faces resolve identically on every layer and field
    for (int k = 1; k < m.nz_b; ++k)
        for (int j = 0; j <= 4; ++j)
            for (int c = 0; c < 3; ++c)
                CHECK(L.resolve(Field::Eta, L.eta_raw(0, j, k, c)) ==
                      L.resolve(Field::Eta, L.eta_raw(4, j, k, c)));
    for (int k = 0; k <= m.ns_p; ++k)
        for (int i = 0; i <= 4; ++i)
            CHECK(L.resolve(Field::Pp, L.pp_raw(i, 0, k)) ==
                  L.resolve(Field::Pp, L.pp_raw(i, 4, k)));
    for (int k = 1; k <= 2 * m.nz_f; ++k)
        for (int j = 0; j <= 8; ++j)
            for (int c = 0; c < 3; ++c)
                CHECK(L.resolve(Field::U, L.u_raw(0, j, k, c)) ==
                      L.resolve(Field::U, L.u_raw(8, j, k, c)));
    for (int k = 0; k <= m.nz_f; ++k)
        CHECK(L.res_pi[L.pi_raw(0, 0, k)] == L.res_pi[L.pi_raw(4, 4, k)]);
}

TEST_CASE("resolution is one hop: every index is free or zero") {
    const MultilayerMesh m = build_mesh(3, 2, 2, 2, 0.3);
    const DofLayout L = build_dof_layout(m);
    for (int f = 0; f < kNumFields; ++f)
        for (int raw = 0; raw < L.raw_count(static_cast<Field>(f)); ++raw) {
            const int g = L.resolve(static_cast<Field>(f), raw);
            CHECK(g >= -1);
            CHECK(g < L.n_sigma);
        }
    for (int raw = 0; raw < static_cast<int>(L.res_pi.size()); ++raw) {
        CHECK(L.res_pi[raw] >= 0);
        CHECK(L.res_pi[raw] < L.n_pi);
    }
}

TEST_CASE("block sizes match the element families") {
    const MultilayerMesh m = build_mesh(2, 2, 2, 1, 0.2);
    const DofLayout L = build_dof_layout(m);
    // eta: canonical nodes 2*2 per slab, interior slabs only (k = 1), x3
    CHECK(L.block_size[static_cast<int>(Field::Eta)] == 2 * 2 * 1 * 3);
    // p_b: same interior slab, scalar
    CHECK(L.block_size[static_cast<int>(Field::Pb)] == 4);
    // w: one interior node x 4
    CHECK(L.block_size[static_cast<int>(Field::W)] == 4);
    // p_p: 2*2 canonical columns x (ns_p + 1) slabs
    CHECK(L.block_size[static_cast<int>(Field::Pp)] == 4 * 2);
    // u: Q2 canonical 4*4 in-plane x (2 nz_f + 1 - 1 bottom) slabs x 3
    CHECK(L.block_size[static_cast<int>(Field::U)] == 16 * 4 * 3);
    CHECK(L.n_pi == 4 * 3);
    CHECK(L.n_sigma == static_cast<int>(L.free_info.size()));
}
