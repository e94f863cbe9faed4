#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "thbch/knot_vector.hpp"
#include "thbch/quadrature.hpp"
#include "thbch/tensor_space.hpp"

using namespace thbch;

TEST_CASE("find_span endpoints and interior") {
    KnotVector kv = KnotVector::uniform(2, 4);
    CHECK(kv.num_functions() == 6);
    CHECK(kv.find_span(0.0) == 2);  // first element span
    CHECK(kv.find_span(1.0) == 5);  // last element span
    CHECK(kv.find_span(0.3) == 3);  // [0.25, 0.5)

    testing::Rng rng(1);
    for (int k = 0; k < 200; ++k) {
        double x = rng.uniform(0.0, 1.0);
        CHECK(kv.find_span(x) == testing::scan_span(kv.knots(), kv.degree(), x));
    }
    CHECK_THROWS_AS(kv.find_span(-0.01), std::domain_error);
    CHECK_THROWS_AS(kv.find_span(1.01), std::domain_error);
}

TEST_CASE("basis partition of unity and derivative sums") {
    for (int p : {2, 3}) {
        KnotVector kv = KnotVector::uniform(p, 7);
        testing::Rng rng(7 + p);
        for (int k = 0; k < 1000; ++k) {
            double x = rng.uniform(0.0, 1.0);
            Eigen::MatrixXd d = kv.eval_basis(x, 2);
            CHECK(std::abs(d.col(0).sum() - 1.0) < 1e-13);
            CHECK(std::abs(d.col(1).sum()) < 1e-11);
            CHECK(std::abs(d.col(2).sum()) < 1e-9);
        }
    }
}

TEST_CASE("basis derivatives match finite differences") {
    for (int p : {2, 3}) {
        KnotVector kv = KnotVector::uniform(p, 5);
        QuadratureRule quad(p + 1);
        auto value_of = [&](int span, int local, double x) {
            // evaluate one basis function by global index span-p+local
            int s = kv.find_span(x);
            Eigen::MatrixXd d = kv.eval_basis_at_span(s, x, 0);
            int idx = (span - p + local) - (s - p);
            if (idx < 0 || idx > p) return 0.0;
            return d(idx, 0);
        };
        const auto& bp = kv.breakpoints();
        for (int el = 0; el < kv.num_elements(); ++el) {
            for (double q : quad.points) {
                double x = bp[el] + (bp[el + 1] - bp[el]) * q;
                int span = kv.find_span(x);
                Eigen::MatrixXd d = kv.eval_basis_at_span(span, x, 2);
                for (int a = 0; a <= p; ++a) {
                    auto f = [&](double t) { return value_of(span, a, t); };
                    double fd1 = testing::central_difference(f, x, 1e-6);
                    double fd2 = testing::second_difference(f, x, 1e-5);
                    CHECK(d(a, 1) == doctest::Approx(fd1).epsilon(1e-5));
                    CHECK(d(a, 2) == doctest::Approx(fd2).epsilon(1e-4).scale(1.0));
                }
            }
        }
    }
}

TEST_CASE("dyadic refinement counts and idempotent structure") {
    TensorSpace coarse = TensorSpace::uniform(2, 4, 4);
    CHECK(coarse.dimension() == 36);
    TensorSpace fine = coarse.dyadic_refine();
    CHECK(fine.num_elements(0) == 8);
    CHECK(fine.num_elements(1) == 8);
    CHECK(fine.num_functions(0) == 10);
    CHECK(fine.num_functions(1) == 10);
    // n = #knots - p - 1 oracle
    CHECK(fine.num_functions(0) ==
          static_cast<int>(fine.kv(0).knots().size()) - fine.degree() - 1);

    // refining twice inserts the same knot multiset as two single steps
    TensorSpace finer = fine.dyadic_refine();
    TensorSpace direct = coarse.dyadic_refine().dyadic_refine();
    CHECK(finer.kv(0) == direct.kv(0));
    CHECK(finer.kv(1) == direct.kv(1));
}

TEST_CASE("two-scale operator: mask, constants, pointwise nestedness") {
    TensorSpace coarse = TensorSpace::uniform(2, 4, 4);
    TensorSpace fine = coarse.dyadic_refine();
    TwoScaleOperator ts(coarse, fine);

    SUBCASE("interior univariate mask is [1/4, 3/4, 3/4, 1/4]") {
        const auto& T = ts.univariate(0);
        Eigen::VectorXd col = Eigen::VectorXd(T.col(2));
        std::vector<double> nz;
        for (int i = 0; i < col.size(); ++i)
            if (col(i) != 0.0) nz.push_back(col(i));
        REQUIRE(nz.size() == 4);
        CHECK(nz[0] == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(nz[1] == doctest::Approx(0.75).epsilon(1e-15));
        CHECK(nz[2] == doctest::Approx(0.75).epsilon(1e-15));
        CHECK(nz[3] == doctest::Approx(0.25).epsilon(1e-15));
    }

    SUBCASE("coefficients nonnegative, constants preserved") {
        const auto& M = ts.matrix();
        for (int k = 0; k < M.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(M, k); it; ++it)
                CHECK(it.value() >= 0.0);
        Eigen::VectorXd ones = Eigen::VectorXd::Ones(coarse.dimension());
        Eigen::VectorXd fine_c = ts.apply(ones);
        CHECK((fine_c.array() - 1.0).abs().maxCoeff() < 1e-14);
    }

    SUBCASE("random coarse field evaluates identically on both levels") {
        testing::Rng rng(11);
        Eigen::VectorXd c(coarse.dimension());
        for (int i = 0; i < c.size(); ++i) c(i) = rng.uniform(-2.0, 2.0);
        Eigen::VectorXd f = ts.apply(c);
        for (int k = 0; k < 100; ++k) {
            double s = rng.uniform(0.0, 1.0), t = rng.uniform(0.0, 1.0);
            double vc = coarse.eval_all(s, t).dot(c);
            double vf = fine.eval_all(s, t).dot(f);
            CHECK(std::abs(vc - vf) < 1e-12);
        }
    }

    SUBCASE("nestedness per coarse function at random points") {
        testing::Rng rng(12);
        const auto& M = ts.matrix();
        for (int k = 0; k < 200; ++k) {
            double s = rng.uniform(0.0, 1.0), t = rng.uniform(0.0, 1.0);
            Eigen::VectorXd vc = coarse.eval_all(s, t);
            Eigen::VectorXd vf = fine.eval_all(s, t);
            Eigen::VectorXd rec = Eigen::VectorXd(M.transpose() * vf);
            CHECK((vc - rec).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("element enumeration and affine boxes") {
    TensorSpace space = TensorSpace::uniform(2, 4, 4);
    auto els = space.elements();
    CHECK(els.size() == 16);
    CHECK(els[0].parametric.lo[0] == 0.0);
    CHECK(els[0].parametric.hi[0] == 0.25);
    CHECK(els[0].parametric.hi[1] == 0.25);
    // identity map: physical equals parametric
    for (const auto& e : els) {
        CHECK(e.physical.lo[0] == e.parametric.lo[0]);
        CHECK(e.physical.hi[1] == e.parametric.hi[1]);
    }

    GeometryMap g{1.0, 2.0, 3.0, 0.5};
    TensorSpace mapped = TensorSpace::uniform(2, 4, 4, g);
    auto e = mapped.element(0, 0);
    CHECK(e.physical.lo[0] == doctest::Approx(1.0));
    CHECK(e.physical.hi[0] == doctest::Approx(1.75));
    CHECK(e.physical.hi[1] == doctest::Approx(2.125));
    CHECK(mapped.cell_extent(0, 0) == doctest::Approx(0.75));
    CHECK(mapped.cell_extent(1, 0) == doctest::Approx(0.125));
}

TEST_CASE("gauss rules integrate polynomials exactly") {
    for (int n = 1; n <= 6; ++n) {
        QuadratureRule quad(n);
        for (int deg = 0; deg <= 2 * n - 1; ++deg) {
            double integral = 0.0;
            for (int q = 0; q < n; ++q)
                integral += quad.weights[q] * std::pow(quad.points[q], deg);
            CHECK(integral == doctest::Approx(1.0 / (deg + 1)).epsilon(1e-13));
        }
    }
}
