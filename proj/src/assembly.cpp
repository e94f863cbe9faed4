#include "thbch/assembly.hpp"

#include <cmath>
#include <stdexcept>

namespace thbch {

double MaterialParams::binodal() const { return std::sqrt(nu / sigma); }

DoubleWell double_well(double u, const MaterialParams& p) {
    double q = u * u - p.nu / p.sigma;
    return {0.25 * p.sigma * q * q, p.sigma * u * u * u - p.nu * u, 3.0 * p.sigma * u * u - p.nu,
            6.0 * p.sigma * u};
}

namespace {

// Values/derivatives of the p+1 univariate functions of one element at the
// mapped rule points.
struct EdgeEval {
    Eigen::MatrixXd val, d1, d2;  // nq x (p+1)
};

EdgeEval univariate_table(const KnotVector& kv, int element, const QuadratureRule& rule,
                          int nders) {
    const auto& bp = kv.breakpoints();
    const int p = kv.degree();
    const int nq = rule.order();
    EdgeEval out;
    out.val.resize(nq, p + 1);
    if (nders >= 1) out.d1.resize(nq, p + 1);
    if (nders >= 2) out.d2.resize(nq, p + 1);
    for (int q = 0; q < nq; ++q) {
        double x = bp[element] + (bp[element + 1] - bp[element]) * rule.points[q];
        Eigen::MatrixXd d = kv.eval_basis(x, nders);
        out.val.row(q) = d.col(0).transpose();
        if (nders >= 1) out.d1.row(q) = d.col(1).transpose();
        if (nders >= 2) out.d2.row(q) = d.col(2).transpose();
    }
    return out;
}

}  // namespace

AssemblyContext::AssemblyContext(std::shared_ptr<const HierarchicalSpace> space,
                                 int points_per_direction)
    : space_(std::move(space)), rule_(points_per_direction) {
    const HierarchicalSpace& sp = *space_;
    const HierarchicalMesh& mesh = sp.mesh();
    const GeometryMap& g = mesh.geometry();
    const int p = sp.degree();
    const int nloc1 = p + 1;
    const int nq1 = rule_.order();

    const auto& bases = sp.cell_bases();
    cells_.reserve(bases.size());
    for (int ci = 0; ci < static_cast<int>(bases.size()); ++ci) {
        const CellBasis& cb = bases[ci];
        const TensorSpace& ls = mesh.level(cb.cell.level);
        Element el = ls.element(cb.cell.ix, cb.cell.iy);
        const double hx = el.parametric.hi[0] - el.parametric.lo[0];
        const double hy = el.parametric.hi[1] - el.parametric.lo[1];

        EdgeEval ex = univariate_table(ls.kv(0), cb.cell.ix, rule_, 2);
        EdgeEval ey = univariate_table(ls.kv(1), cb.cell.iy, rule_, 2);

        const int nq = nq1 * nq1;
        const int nloc = nloc1 * nloc1;
        Eigen::MatrixXd lv(nq, nloc), lx(nq, nloc), ly(nq, nloc), ll(nq, nloc);
        CellQuadrature cq;
        cq.cell_index = ci;
        cq.weights.resize(nq);
        cq.points.resize(nq);
        for (int qy = 0; qy < nq1; ++qy) {
            for (int qx = 0; qx < nq1; ++qx) {
                int q = qy * nq1 + qx;
                cq.weights(q) = rule_.weights[qx] * rule_.weights[qy] * hx * g.Lx * hy * g.Ly;
                auto pt = g.to_physical(el.parametric.lo[0] + hx * rule_.points[qx],
                                        el.parametric.lo[1] + hy * rule_.points[qy]);
                cq.points[q] = pt;
                for (int b = 0; b < nloc1; ++b) {
                    for (int a = 0; a < nloc1; ++a) {
                        int k = b * nloc1 + a;
                        lv(q, k) = ex.val(qx, a) * ey.val(qy, b);
                        lx(q, k) = ex.d1(qx, a) * ey.val(qy, b) / g.Lx;
                        ly(q, k) = ex.val(qx, a) * ey.d1(qy, b) / g.Ly;
                        ll(q, k) = ex.d2(qx, a) * ey.val(qy, b) / (g.Lx * g.Lx) +
                                   ex.val(qx, a) * ey.d2(qy, b) / (g.Ly * g.Ly);
                    }
                }
            }
        }
        Eigen::MatrixXd C = cb.coeffs.transpose();  // nloc x nfuncs
        cq.N = lv * C;
        cq.dNdx = lx * C;
        cq.dNdy = ly * C;
        cq.lap = ll * C;
        cells_.push_back(std::move(cq));
    }

    // boundary edges of active cells
    for (int ci = 0; ci < static_cast<int>(bases.size()); ++ci) {
        const CellBasis& cb = bases[ci];
        const TensorSpace& ls = mesh.level(cb.cell.level);
        Element el = ls.element(cb.cell.ix, cb.cell.iy);
        struct EdgeDef {
            bool on;
            int normal_dir;   // 0: x, 1: y
            double sign;      // outward normal sign
            double fixed;     // parametric coordinate on the edge
        };
        const EdgeDef edges[4] = {
            {cb.cell.ix == 0, 0, -1.0, el.parametric.lo[0]},
            {cb.cell.ix == ls.num_elements(0) - 1, 0, +1.0, el.parametric.hi[0]},
            {cb.cell.iy == 0, 1, -1.0, el.parametric.lo[1]},
            {cb.cell.iy == ls.num_elements(1) - 1, 1, +1.0, el.parametric.hi[1]},
        };
        for (const EdgeDef& ed : edges) {
            if (!ed.on) continue;
            const int tdir = 1 - ed.normal_dir;
            const KnotVector& kvn = ls.kv(ed.normal_dir);
            const KnotVector& kvt = ls.kv(tdir);
            const int cell_t = tdir == 0 ? cb.cell.ix : cb.cell.iy;
            const double scale_n = ed.normal_dir == 0 ? g.Lx : g.Ly;
            const double scale_t = tdir == 0 ? g.Lx : g.Ly;
            const auto& bpt = kvt.breakpoints();
            const double ht = bpt[cell_t + 1] - bpt[cell_t];

            Eigen::MatrixXd dn = kvn.eval_basis(ed.fixed, 2);
            EdgeEval et = univariate_table(kvt, cell_t, rule_, 2);

            BoundaryQuadrature bq;
            bq.cell_index = ci;
            bq.h = ht * scale_t;
            bq.weights.resize(nq1);
            const int nloc = nloc1 * nloc1;
            Eigen::MatrixXd ldn(nq1, nloc), ll(nq1, nloc);
            for (int q = 0; q < nq1; ++q) {
                bq.weights(q) = rule_.weights[q] * ht * scale_t;
                for (int b = 0; b < nloc1; ++b) {
                    for (int a = 0; a < nloc1; ++a) {
                        // local index: a is the x-univariate slot, b the y slot
                        int k = b * nloc1 + a;
                        int ln = ed.normal_dir == 0 ? a : b;  // slot along the normal
                        int lt = ed.normal_dir == 0 ? b : a;
                        ldn(q, k) = ed.sign * dn(ln, 1) / scale_n * et.val(q, lt);
                        ll(q, k) = dn(ln, 2) / (scale_n * scale_n) * et.val(q, lt) +
                                   dn(ln, 0) * et.d2(q, lt) / (scale_t * scale_t);
                    }
                }
            }
            Eigen::MatrixXd C = cb.coeffs.transpose();
            bq.dNdn = ldn * C;
            bq.lap = ll * C;
            boundary_.push_back(std::move(bq));
        }
    }
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void scatter(Triplets& out, const std::vector<int>& funcs, const Eigen::MatrixXd& block) {
    const int n = static_cast<int>(funcs.size());
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (block(i, j) != 0.0) out.emplace_back(funcs[i], funcs[j], block(i, j));
}

Eigen::SparseMatrix<double> build(int n, const Triplets& trips) {
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

}  // namespace

Eigen::SparseMatrix<double> assemble_mass(const AssemblyContext& ctx) {
    const auto& bases = ctx.space().cell_bases();
    Triplets trips;
    for (const CellQuadrature& cq : ctx.cells()) {
        Eigen::MatrixXd block = cq.N.transpose() * cq.weights.asDiagonal() * cq.N;
        scatter(trips, bases[cq.cell_index].funcs, block);
    }
    return build(ctx.space().num_active_functions(), trips);
}

Eigen::SparseMatrix<double> assemble_grad_gram(const AssemblyContext& ctx) {
    const auto& bases = ctx.space().cell_bases();
    Triplets trips;
    for (const CellQuadrature& cq : ctx.cells()) {
        Eigen::MatrixXd block = cq.dNdx.transpose() * cq.weights.asDiagonal() * cq.dNdx +
                                cq.dNdy.transpose() * cq.weights.asDiagonal() * cq.dNdy;
        scatter(trips, bases[cq.cell_index].funcs, block);
    }
    return build(ctx.space().num_active_functions(), trips);
}

SystemOperators assemble_operators(const AssemblyContext& ctx, const MaterialParams& params) {
    const auto& bases = ctx.space().cell_bases();
    const int n = ctx.space().num_active_functions();
    Triplets tm, tk, tb, tn;
    for (const CellQuadrature& cq : ctx.cells()) {
        const auto& funcs = bases[cq.cell_index].funcs;
        Eigen::MatrixXd mass = cq.N.transpose() * cq.weights.asDiagonal() * cq.N;
        Eigen::MatrixXd stiff =
            params.lambda * (cq.lap.transpose() * cq.weights.asDiagonal() * cq.lap);
        scatter(tm, funcs, mass);
        scatter(tk, funcs, stiff);
    }
    for (const BoundaryQuadrature& bq : ctx.boundary()) {
        const auto& funcs = bases[bq.cell_index].funcs;
        Eigen::MatrixXd cons =
            params.lambda * (bq.dNdn.transpose() * bq.weights.asDiagonal() * bq.lap);
        Eigen::MatrixXd pen = (bq.h * params.eps_nitsche) *
                              (bq.dNdn.transpose() * bq.weights.asDiagonal() * bq.dNdn);
        scatter(tb, funcs, cons);
        scatter(tn, funcs, pen);
    }
    SystemOperators ops;
    ops.mass = build(n, tm);
    ops.stiffness = build(n, tk);
    ops.boundary_consistency = build(n, tb);
    ops.nitsche = build(n, tn);
    ops.quadrature_order = ctx.quadrature_order();
    return ops;
}

Eigen::SparseMatrix<double> SystemOperators::linear_stiffness() const {
    Eigen::SparseMatrix<double> kb_t = boundary_consistency.transpose();
    return stiffness - boundary_consistency - kb_t + nitsche;
}

NonlinearTerms assemble_nonlinear(const AssemblyContext& ctx, const MaterialParams& params,
                                  const Eigen::VectorXd& u, bool with_tangent) {
    const auto& bases = ctx.space().cell_bases();
    const int n = ctx.space().num_active_functions();
    if (u.size() != n) throw std::invalid_argument("assemble_nonlinear: size mismatch");

    NonlinearTerms out;
    out.force = Eigen::VectorXd::Zero(n);
    Triplets trips;
    for (const CellQuadrature& cq : ctx.cells()) {
        const auto& funcs = bases[cq.cell_index].funcs;
        const int nf = static_cast<int>(funcs.size());
        Eigen::VectorXd c(nf);
        for (int k = 0; k < nf; ++k) c(k) = u(funcs[k]);

        Eigen::VectorXd uq = cq.N * c;
        Eigen::VectorXd ux = cq.dNdx * c;
        Eigen::VectorXd uy = cq.dNdy * c;

        Eigen::VectorXd w2(uq.size()), w3(uq.size());
        for (int q = 0; q < uq.size(); ++q) {
            DoubleWell dw = double_well(uq(q), params);
            w2(q) = cq.weights(q) * dw.d2F;
            w3(q) = cq.weights(q) * dw.d3F;
        }

        Eigen::VectorXd local =
            cq.dNdx.transpose() * (w2.cwiseProduct(ux)) + cq.dNdy.transpose() * (w2.cwiseProduct(uy));
        for (int k = 0; k < nf; ++k) out.force(funcs[k]) += local(k);

        if (with_tangent) {
            Eigen::MatrixXd block = cq.dNdx.transpose() * w2.asDiagonal() * cq.dNdx +
                                    cq.dNdy.transpose() * w2.asDiagonal() * cq.dNdy;
            // outer-product term: (grad N_i . grad u) F''' N_j
            Eigen::MatrixXd gN = cq.dNdx.array().colwise() * ux.array();
            gN += (cq.dNdy.array().colwise() * uy.array()).matrix();
            block += gN.transpose() * w3.asDiagonal() * cq.N;
            scatter(trips, funcs, block);
        }
    }
    if (with_tangent) out.tangent = build(n, trips);
    return out;
}

Eigen::VectorXd residual(const SystemOperators& ops, const AssemblyContext& ctx,
                         const MaterialParams& params, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& udot) {
    NonlinearTerms nl = assemble_nonlinear(ctx, params, u, /*with_tangent=*/false);
    return ops.mass * udot + nl.force + ops.linear_stiffness() * u;
}

double free_energy(const AssemblyContext& ctx, const MaterialParams& params,
                   const Eigen::VectorXd& u) {
    const auto& bases = ctx.space().cell_bases();
    double total = 0.0;
    for (const CellQuadrature& cq : ctx.cells()) {
        const auto& funcs = bases[cq.cell_index].funcs;
        Eigen::VectorXd c(funcs.size());
        for (size_t k = 0; k < funcs.size(); ++k) c(k) = u(funcs[k]);
        Eigen::VectorXd uq = cq.N * c, ux = cq.dNdx * c, uy = cq.dNdy * c;
        for (int q = 0; q < uq.size(); ++q) {
            DoubleWell dw = double_well(uq(q), params);
            total += cq.weights(q) *
                     (dw.F + 0.5 * params.lambda * (ux(q) * ux(q) + uy(q) * uy(q)));
        }
    }
    return total;
}

double total_mass(const AssemblyContext& ctx, const Eigen::VectorXd& u) {
    const auto& bases = ctx.space().cell_bases();
    double total = 0.0;
    for (const CellQuadrature& cq : ctx.cells()) {
        const auto& funcs = bases[cq.cell_index].funcs;
        Eigen::VectorXd c(funcs.size());
        for (size_t k = 0; k < funcs.size(); ++k) c(k) = u(funcs[k]);
        total += cq.weights.dot(cq.N * c);
    }
    return total;
}

}  // namespace thbch
