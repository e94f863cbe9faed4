#include "thbch/hierarchical_space.hpp"

#include <algorithm>
#include <stdexcept>

namespace thbch {

namespace {

// Univariate index of the first of the p+1 functions that are nonzero on
// element `ix`.
int first_func(const KnotVector& kv, int ix) {
    const auto& b = kv.breakpoints();
    double mid = 0.5 * (b[ix] + b[ix + 1]);
    return kv.find_span(mid) - kv.degree();
}

}  // namespace

HierarchicalSpace::HierarchicalSpace(HierarchicalMesh mesh, bool truncated)
    : mesh_(std::move(mesh)), truncated_(truncated) {
    build();
}

void HierarchicalSpace::build() {
    const int nlev = mesh_.num_levels();
    const int p = degree();

    global_of_.assign(nlev, {});
    trunc_flags_.assign(nlev, {});
    functions_.clear();

    // Active functions: supp inside the level subdomain but not inside the
    // next one. With the cell states this reads: all support cells are
    // non-inactive and at least one is active.
    for (int l = 0; l < nlev; ++l) {
        const TensorSpace& space = mesh_.level(l);
        const int nfx = space.num_functions(0), nfy = space.num_functions(1);
        global_of_[l].assign(nfx * nfy, -1);
        trunc_flags_[l].assign(nfx * nfy, 0);
        for (int j = 0; j < nfy; ++j) {
            auto [sy0, sy1] = space.support_range(1, j);
            for (int i = 0; i < nfx; ++i) {
                auto [sx0, sx1] = space.support_range(0, i);
                bool in_domain = true, touches_active = false;
                for (int cy = sy0; cy <= sy1 && in_domain; ++cy) {
                    for (int cx = sx0; cx <= sx1; ++cx) {
                        CellState st = mesh_.state(l, space.cell_index(cx, cy));
                        if (st == CellState::Inactive) {
                            in_domain = false;
                            break;
                        }
                        if (st == CellState::Active) touches_active = true;
                    }
                }
                int f = space.function_index(i, j);
                if (in_domain) trunc_flags_[l][f] = 1;
                if (in_domain && touches_active) {
                    global_of_[l][f] = static_cast<int>(functions_.size());
                    functions_.push_back({l, f});
                }
            }
        }
    }

    // Per-cell basis tables, built by descending from level 0. A cell of
    // level k inherits the subdivided (and, for THB, truncated) rows of its
    // parent and adds unit rows for the active level-k functions.
    cell_bases_.clear();
    cell_basis_of_.assign(nlev, {});
    for (int l = 0; l < nlev; ++l)
        cell_basis_of_[l].assign(mesh_.level(l).num_elements(), -1);

    struct Rows {
        std::vector<int> funcs;
        Eigen::MatrixXd coeffs;  // funcs x (p+1)^2
    };

    const int nloc1 = p + 1;
    const int nloc = nloc1 * nloc1;

    auto make_cell_basis = [&](int l, int ix, int iy, const Rows& rows) {
        const TensorSpace& space = mesh_.level(l);
        CellBasis cb;
        cb.cell = {l, ix, iy};
        cb.first_func_x = first_func(space.kv(0), ix);
        cb.first_func_y = first_func(space.kv(1), iy);
        // inherited rows (skip exact-zero ones), then own-level unit rows
        std::vector<int> keep;
        for (int r = 0; r < static_cast<int>(rows.funcs.size()); ++r)
            if (!rows.coeffs.row(r).isZero(0.0)) keep.push_back(r);
        int nown = 0;
        std::vector<int> own_local, own_global;
        for (int ly = 0; ly < nloc1; ++ly) {
            for (int lx = 0; lx < nloc1; ++lx) {
                int f = space.function_index(cb.first_func_x + lx, cb.first_func_y + ly);
                int g = global_of_[l][f];
                if (g >= 0) {
                    own_local.push_back(ly * nloc1 + lx);
                    own_global.push_back(g);
                    ++nown;
                }
            }
        }
        cb.funcs.reserve(keep.size() + nown);
        cb.coeffs.resize(static_cast<int>(keep.size()) + nown, nloc);
        int r = 0;
        for (int k : keep) {
            cb.funcs.push_back(rows.funcs[k]);
            cb.coeffs.row(r++) = rows.coeffs.row(k);
        }
        for (int k = 0; k < nown; ++k) {
            cb.funcs.push_back(own_global[k]);
            cb.coeffs.row(r).setZero();
            cb.coeffs(r, own_local[k]) = 1.0;
            ++r;
        }
        return cb;
    };

    // Subdivide parent rows onto one child cell.
    auto descend = [&](int lp, int pix, int piy, const Rows& parent, int cix, int ciy) {
        const int lc = lp + 1;
        const TensorSpace& cspace = mesh_.level(lc);
        const Eigen::MatrixXd& TX = mesh_.shared_levels()->univariate_x[lp];
        const Eigen::MatrixXd& TY = mesh_.shared_levels()->univariate_y[lp];
        int px0 = first_func(mesh_.level(lp).kv(0), pix);
        int py0 = first_func(mesh_.level(lp).kv(1), piy);
        int cx0 = first_func(cspace.kv(0), cix);
        int cy0 = first_func(cspace.kv(1), ciy);
        Eigen::MatrixXd BX = TX.block(cx0, px0, nloc1, nloc1);
        Eigen::MatrixXd BY = TY.block(cy0, py0, nloc1, nloc1);

        Rows child;
        child.funcs = parent.funcs;
        child.coeffs.resize(parent.coeffs.rows(), nloc);
        for (int rr = 0; rr < parent.coeffs.rows(); ++rr) {
            Eigen::VectorXd rp = parent.coeffs.row(rr);
            Eigen::Map<const Eigen::MatrixXd> Rp(rp.data(), nloc1, nloc1);
            Eigen::MatrixXd Rc = BX * Rp * BY.transpose();
            if (truncated_) {
                for (int ly = 0; ly < nloc1; ++ly)
                    for (int lx = 0; lx < nloc1; ++lx)
                        if (trunc_flags_[lc][cspace.function_index(cx0 + lx, cy0 + ly)])
                            Rc(lx, ly) = 0.0;
            }
            Eigen::VectorXd rc(nloc);
            Eigen::Map<Eigen::MatrixXd>(rc.data(), nloc1, nloc1) = Rc;
            child.coeffs.row(rr) = rc;
        }
        return child;
    };

    auto dfs = [&](auto&& self, int l, int ix, int iy, const Rows& rows) -> void {
        CellState st = mesh_.state(l, mesh_.level(l).cell_index(ix, iy));
        if (st == CellState::Inactive) return;
        CellBasis cb = make_cell_basis(l, ix, iy, rows);
        if (st == CellState::Active) {
            cell_bases_.push_back(std::move(cb));
            return;
        }
        // deactivated: the cell basis (with own-level actives included) is
        // the representation to subdivide further
        Rows next{std::move(cb.funcs), std::move(cb.coeffs)};
        for (int cy = 0; cy <= 1; ++cy)
            for (int cx = 0; cx <= 1; ++cx)
                self(self, l + 1, 2 * ix + cx, 2 * iy + cy,
                     descend(l, ix, iy, next, 2 * ix + cx, 2 * iy + cy));
    };

    const TensorSpace& base = mesh_.level(0);
    Rows empty{{}, Eigen::MatrixXd(0, nloc)};
    for (int iy = 0; iy < base.num_elements(1); ++iy)
        for (int ix = 0; ix < base.num_elements(0); ++ix) dfs(dfs, 0, ix, iy, empty);

    std::sort(cell_bases_.begin(), cell_bases_.end(),
              [](const CellBasis& a, const CellBasis& b) { return a.cell < b.cell; });
    for (int idx = 0; idx < static_cast<int>(cell_bases_.size()); ++idx) {
        const CellRef& c = cell_bases_[idx].cell;
        cell_basis_of_[c.level][mesh_.level(c.level).cell_index(c.ix, c.iy)] = idx;
    }
}

int HierarchicalSpace::global_index(int level, int tensor_index) const {
    return global_of_[level][tensor_index];
}

const CellBasis& HierarchicalSpace::cell_basis(const CellRef& c) const {
    int idx = cell_basis_of_[c.level][mesh_.level(c.level).cell_index(c.ix, c.iy)];
    if (idx < 0) throw std::invalid_argument("cell_basis: cell is not active");
    return cell_bases_[idx];
}

FieldSample HierarchicalSpace::eval(const Eigen::VectorXd& coeffs, double x, double y,
                                    int nders) const {
    if (coeffs.size() != num_active_functions())
        throw std::invalid_argument("eval: coefficient vector size mismatch");
    const GeometryMap& g = mesh_.geometry();
    auto [s, t] = g.to_parametric(x, y);
    if (s < 0.0 || s > 1.0 || t < 0.0 || t > 1.0)
        throw std::domain_error("eval: point outside the domain");
    CellRef cell = mesh_.locate(s, t);
    const CellBasis& cb = cell_basis(cell);
    const TensorSpace& space = mesh_.level(cell.level);
    const int p = degree();

    Eigen::MatrixXd dx = space.kv(0).eval_basis(s, nders);
    Eigen::MatrixXd dy = space.kv(1).eval_basis(t, nders);

    const int nloc1 = p + 1;
    Eigen::VectorXd local(nloc1 * nloc1), local_dx, local_dy, local_dxx, local_dyy;
    if (nders >= 1) {
        local_dx.resize(nloc1 * nloc1);
        local_dy.resize(nloc1 * nloc1);
    }
    if (nders >= 2) {
        local_dxx.resize(nloc1 * nloc1);
        local_dyy.resize(nloc1 * nloc1);
    }
    for (int ly = 0; ly < nloc1; ++ly) {
        for (int lx = 0; lx < nloc1; ++lx) {
            int k = ly * nloc1 + lx;
            local(k) = dx(lx, 0) * dy(ly, 0);
            if (nders >= 1) {
                local_dx(k) = dx(lx, 1) * dy(ly, 0) / g.Lx;
                local_dy(k) = dx(lx, 0) * dy(ly, 1) / g.Ly;
            }
            if (nders >= 2) {
                local_dxx(k) = dx(lx, 2) * dy(ly, 0) / (g.Lx * g.Lx);
                local_dyy(k) = dx(lx, 0) * dy(ly, 2) / (g.Ly * g.Ly);
            }
        }
    }

    Eigen::VectorXd c(cb.funcs.size());
    for (int r = 0; r < static_cast<int>(cb.funcs.size()); ++r) c(r) = coeffs(cb.funcs[r]);
    Eigen::VectorXd w = cb.coeffs.transpose() * c;  // local tensor coefficients

    FieldSample out;
    out.value = w.dot(local);
    if (nders >= 1) {
        out.grad[0] = w.dot(local_dx);
        out.grad[1] = w.dot(local_dy);
    }
    if (nders >= 2) out.laplacian = w.dot(local_dxx) + w.dot(local_dyy);
    return out;
}

std::vector<Eigen::VectorXd> HierarchicalSpace::level_representation(
    const Eigen::VectorXd& coeffs) const {
    const int nlev = mesh_.num_levels();
    std::vector<Eigen::VectorXd> rep(nlev);
    for (int l = 0; l < nlev; ++l) {
        const TensorSpace& space = mesh_.level(l);
        Eigen::VectorXd a = Eigen::VectorXd::Zero(space.dimension());
        if (l > 0) {
            a = mesh_.shared_levels()->two_scale[l - 1].apply(rep[l - 1]);
            if (truncated_) {
                for (int f = 0; f < space.dimension(); ++f)
                    if (trunc_flags_[l][f]) a(f) = 0.0;
            }
        }
        for (int f = 0; f < space.dimension(); ++f) {
            int g = global_of_[l][f];
            if (g >= 0) a(f) += coeffs(g);
        }
        rep[l] = std::move(a);
    }
    return rep;
}

}  // namespace thbch
