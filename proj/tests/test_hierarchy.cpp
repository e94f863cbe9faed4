#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "thbch/hierarchical_mesh.hpp"
#include "thbch/hierarchical_space.hpp"

using namespace thbch;

namespace {

// Base 4x4, three levels: a 2x2 block refined at level 0 and the central
// 2x2 block of its children refined again.
HierarchicalMesh three_level_fixture(int degree = 2) {
    TensorSpace base = TensorSpace::uniform(degree, 4, 4);
    HierarchicalMesh mesh(base, 3);
    const TensorSpace& l0 = mesh.level(0);
    mesh.refine_cells(0, {l0.cell_index(1, 1), l0.cell_index(2, 1), l0.cell_index(1, 2),
                          l0.cell_index(2, 2)});
    const TensorSpace& l1 = mesh.level(1);
    mesh.refine_cells(1, {l1.cell_index(3, 3), l1.cell_index(4, 3), l1.cell_index(3, 4),
                          l1.cell_index(4, 4)});
    mesh.validate();
    return mesh;
}

// Truncated representation of one active function at the finest level,
// computed directly from the two-scale matrices (independent of the per-cell
// extraction path).
Eigen::VectorXd finest_representation(const HierarchicalSpace& space, int func_id) {
    const auto& mesh = space.mesh();
    const auto& f = space.active_functions()[func_id];
    Eigen::VectorXd rep = Eigen::VectorXd::Zero(mesh.level(f.level).dimension());
    rep(f.tensor_index) = 1.0;
    for (int l = f.level + 1; l < mesh.num_levels(); ++l) {
        rep = mesh.shared_levels()->two_scale[l - 1].apply(rep);
        if (space.truncated())
            for (int k = 0; k < rep.size(); ++k)
                if (space.truncated_at_level(l, k)) rep(k) = 0.0;
    }
    return rep;
}

}  // namespace

TEST_CASE("single-level space equals the tensor-product space") {
    TensorSpace base = TensorSpace::uniform(2, 4, 4);
    HierarchicalMesh mesh(base, 1);
    HierarchicalSpace space(mesh);
    CHECK(space.num_active_functions() == base.dimension());
    for (const auto& cb : space.cell_bases()) {
        REQUIRE(cb.funcs.size() == 9);
        // identity extraction: each row is a unit vector
        for (int r = 0; r < cb.coeffs.rows(); ++r) {
            CHECK(cb.coeffs.row(r).sum() == 1.0);
            CHECK(cb.coeffs.row(r).maxCoeff() == 1.0);
        }
    }
}

TEST_CASE("refining one interior cell activates no level-1 functions") {
    TensorSpace base = TensorSpace::uniform(2, 4, 4);
    HierarchicalMesh mesh(base, 2);
    mesh.refine_cells(0, {mesh.level(0).cell_index(1, 1)});
    mesh.validate();
    HierarchicalSpace space(mesh);

    // support-inclusion oracle over all level-1 functions
    const TensorSpace& l1 = mesh.level(1);
    int expected_level1 = 0;
    for (int j = 0; j < l1.num_functions(1); ++j) {
        auto [sy0, sy1] = l1.support_range(1, j);
        for (int i = 0; i < l1.num_functions(0); ++i) {
            auto [sx0, sx1] = l1.support_range(0, i);
            bool inside = true;
            for (int cy = sy0; cy <= sy1 && inside; ++cy)
                for (int cx = sx0; cx <= sx1; ++cx)
                    if (mesh.state(1, l1.cell_index(cx, cy)) == CellState::Inactive) {
                        inside = false;
                        break;
                    }
            if (inside) ++expected_level1;
        }
    }
    CHECK(expected_level1 == 0);
    int level1_active = 0;
    for (const auto& f : space.active_functions())
        if (f.level == 1) ++level1_active;
    CHECK(level1_active == 0);
    CHECK(space.num_active_functions() == 36);
}

TEST_CASE("THB partition of unity on a three-level mesh") {
    HierarchicalSpace space(three_level_fixture());
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(space.num_active_functions());
    testing::Rng rng(3);
    for (int k = 0; k < 500; ++k) {
        double x = rng.uniform(0.0, 1.0), y = rng.uniform(0.0, 1.0);
        FieldSample s = space.eval(ones, x, y, 2);
        CHECK(std::abs(s.value - 1.0) < 1e-12);
        CHECK(std::abs(s.grad[0]) < 1e-10);
        CHECK(std::abs(s.grad[1]) < 1e-10);
        CHECK(std::abs(s.laplacian) < 1e-8);
    }
}

TEST_CASE("area tiling holds after refinements") {
    HierarchicalMesh mesh = three_level_fixture();
    CHECK(std::abs(mesh.tiling_defect()) < 1e-12);
}

TEST_CASE("field evaluation matches brute-force summation over all functions") {
    HierarchicalMesh mesh = three_level_fixture();
    for (bool truncated : {true, false}) {
        HierarchicalSpace space(mesh, truncated);
        testing::Rng rng(17);
        Eigen::VectorXd coeffs(space.num_active_functions());
        for (int i = 0; i < coeffs.size(); ++i) coeffs(i) = rng.uniform(-1.0, 1.0);

        const TensorSpace& finest = mesh.level(mesh.num_levels() - 1);
        Eigen::VectorXd fine_rep = Eigen::VectorXd::Zero(finest.dimension());
        for (int f = 0; f < space.num_active_functions(); ++f)
            fine_rep += coeffs(f) * finest_representation(space, f);

        for (int k = 0; k < 100; ++k) {
            double x = rng.uniform(0.0, 1.0), y = rng.uniform(0.0, 1.0);
            double direct = space.eval(coeffs, x, y, 0).value;
            double brute = finest.eval_all(x, y).dot(fine_rep);
            CHECK(std::abs(direct - brute) < 1e-12);
        }
    }
}

TEST_CASE("level representation agrees with the per-cell extraction") {
    HierarchicalSpace space(three_level_fixture());
    testing::Rng rng(23);
    Eigen::VectorXd coeffs(space.num_active_functions());
    for (int i = 0; i < coeffs.size(); ++i) coeffs(i) = rng.uniform(-1.0, 1.0);
    auto rep = space.level_representation(coeffs);
    const auto& mesh = space.mesh();
    for (const auto& cb : space.cell_bases()) {
        const TensorSpace& ls = mesh.level(cb.cell.level);
        auto e = ls.element(cb.cell.ix, cb.cell.iy);
        double s = 0.5 * (e.parametric.lo[0] + e.parametric.hi[0]);
        double t = 0.5 * (e.parametric.lo[1] + e.parametric.hi[1]);
        double via_rep = ls.eval_all(s, t).dot(rep[cb.cell.level]);
        double via_eval = space.eval(coeffs, e.physical.lo[0] * 0.5 + e.physical.hi[0] * 0.5,
                                     e.physical.lo[1] * 0.5 + e.physical.hi[1] * 0.5, 0)
                              .value;
        CHECK(via_rep == doctest::Approx(via_eval).epsilon(1e-12));
    }
}

TEST_CASE("never-refined set") {
    TensorSpace base = TensorSpace::uniform(2, 4, 4);
    HierarchicalMesh uniform(base, 2);
    CHECK(uniform.never_refined_set(0).size() == 16);

    HierarchicalMesh mesh(base, 2);
    int q = mesh.level(0).cell_index(2, 1);
    mesh.refine_cells(0, {q});
    auto a0 = mesh.never_refined_set(0);
    CHECK(a0.size() == 15);
    for (const auto& c : a0) CHECK(!(c.level == 0 && c.ix == 2 && c.iy == 1));

    // brute-force filter oracle on the three-level fixture
    HierarchicalMesh fixture = three_level_fixture();
    for (int l = 0; l < 3; ++l) {
        std::set<std::tuple<int, int, int>> expected;
        for (int k = 0; k <= l; ++k) {
            const TensorSpace& ks = fixture.level(k);
            for (int flat = 0; flat < ks.num_elements(); ++flat) {
                if (fixture.state(k, flat) == CellState::Active) {
                    auto [ix, iy] = ks.cell_pair(flat);
                    expected.insert({k, ix, iy});
                }
            }
        }
        auto got = fixture.never_refined_set(l);
        CHECK(got.size() == expected.size());
        for (const auto& c : got) CHECK(expected.count({c.level, c.ix, c.iy}) == 1);
    }
}

TEST_CASE("cell incidence: uniform mesh and brute-force oracle") {
    TensorSpace base = TensorSpace::uniform(2, 4, 4);
    HierarchicalMesh mesh(base, 1);
    HierarchicalSpace space(mesh);
    for (const auto& cb : space.cell_bases()) {
        CHECK(cb.funcs.size() == 9);
        for (const auto& f : space.active_functions()) CHECK(f.level == 0);
    }

    // constant-one: incident THB values at cell centers sum to one
    HierarchicalSpace thb(three_level_fixture());
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(thb.num_active_functions());
    for (const auto& cb : thb.cell_bases()) {
        auto e = thb.mesh().level(cb.cell.level).element(cb.cell.ix, cb.cell.iy);
        double x = 0.5 * (e.physical.lo[0] + e.physical.hi[0]);
        double y = 0.5 * (e.physical.lo[1] + e.physical.hi[1]);
        CHECK(thb.eval(ones, x, y, 0).value == doctest::Approx(1.0).epsilon(1e-12));
    }

    // non-truncated incidence equals support overlap on a 2-level mesh
    HierarchicalMesh two(base, 2);
    two.refine_cells(0, {two.level(0).cell_index(1, 1), two.level(0).cell_index(2, 1),
                         two.level(0).cell_index(1, 2), two.level(0).cell_index(2, 2)});
    HierarchicalSpace hb(two, /*truncated=*/false);
    for (const auto& cb : hb.cell_bases()) {
        std::set<int> got(cb.funcs.begin(), cb.funcs.end());
        std::set<int> expected;
        for (int fid = 0; fid < hb.num_active_functions(); ++fid) {
            const auto& f = hb.active_functions()[fid];
            const TensorSpace& fs = two.level(f.level);
            int i = f.tensor_index % fs.num_functions(0);
            int j = f.tensor_index / fs.num_functions(0);
            auto [sx0, sx1] = fs.support_range(0, i);
            auto [sy0, sy1] = fs.support_range(1, j);
            // finer functions vanish on the interior of coarser active cells
            int shift = cb.cell.level - f.level;
            if (shift < 0) continue;
            int cx = cb.cell.ix >> shift, cy = cb.cell.iy >> shift;
            if (cx >= sx0 && cx <= sx1 && cy >= sy0 && cy <= sy1) expected.insert(fid);
        }
        CHECK(got == expected);
    }
}

TEST_CASE("mesh dump is stable and parses back") {
    TensorSpace base = TensorSpace::uniform(2, 4, 4);
    HierarchicalMesh mesh(base, 2);
    mesh.refine_cells(0, {mesh.level(0).cell_index(1, 2)});
    std::string dump = mesh.dump();
    CHECK(dump ==
          "0 0 0\n0 0 1\n0 0 2\n0 0 3\n0 1 0\n0 1 1\n0 1 3\n0 2 0\n0 2 1\n0 2 2\n0 2 3\n"
          "0 3 0\n0 3 1\n0 3 2\n0 3 3\n1 2 4\n1 2 5\n1 3 4\n1 3 5\n");
    HierarchicalMesh back = HierarchicalMesh::parse_dump(dump, base, 2);
    CHECK(back == mesh);
    CHECK(back.dump() == dump);
}

TEST_CASE("evaluation outside the domain fails") {
    HierarchicalSpace space(three_level_fixture());
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(space.num_active_functions());
    CHECK_THROWS_AS(space.eval(ones, 1.5, 0.5, 0), std::domain_error);
}
