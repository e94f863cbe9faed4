#include "thbch/adaptivity.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace thbch {

bool MarkSet::empty() const {
    for (const auto& l : levels)
        if (!l.empty()) return false;
    return true;
}

int MarkSet::count() const {
    int n = 0;
    for (const auto& l : levels) n += static_cast<int>(l.size());
    return n;
}

void MarkSet::add(int level, int flat) {
    auto& v = levels.at(level);
    auto it = std::lower_bound(v.begin(), v.end(), flat);
    if (it == v.end() || *it != flat) v.insert(it, flat);
}

std::string MarkSet::dump(const HierarchicalMesh& mesh) const {
    std::ostringstream os;
    for (int l = 0; l < static_cast<int>(levels.size()); ++l) {
        std::vector<std::pair<int, int>> cells;
        for (int flat : levels[l]) cells.push_back(mesh.level(l).cell_pair(flat));
        std::sort(cells.begin(), cells.end());
        for (auto [ix, iy] : cells) os << l << " " << ix << " " << iy << "\n";
    }
    return os.str();
}

IndicatorField indicator_field(const AssemblyContext& ctx, const MaterialParams& params,
                               const Eigen::VectorXd& u) {
    const auto& bases = ctx.space().cell_bases();
    IndicatorField out;
    out.kind = IndicatorKind::Field;
    const double binodal = params.binodal();
    for (const CellQuadrature& cq : ctx.cells()) {
        const CellBasis& cb = bases[cq.cell_index];
        Eigen::VectorXd c(cb.funcs.size());
        for (size_t k = 0; k < cb.funcs.size(); ++k) c(k) = u(cb.funcs[k]);
        double integral = cq.weights.dot(cq.N * c);
        double area = cq.weights.sum();
        out.cells.push_back(cb.cell);
        out.values.push_back(1.0 - std::abs(integral / (area * binodal)));
    }
    return out;
}

IndicatorField indicator_gradient(const AssemblyContext& ctx, const Eigen::VectorXd& u) {
    const auto& bases = ctx.space().cell_bases();
    IndicatorField out;
    out.kind = IndicatorKind::Gradient;
    for (const CellQuadrature& cq : ctx.cells()) {
        const CellBasis& cb = bases[cq.cell_index];
        Eigen::VectorXd c(cb.funcs.size());
        for (size_t k = 0; k < cb.funcs.size(); ++k) c(k) = u(cb.funcs[k]);
        Eigen::VectorXd ux = cq.dNdx * c, uy = cq.dNdy * c;
        double integral = 0.0;
        for (int q = 0; q < ux.size(); ++q)
            integral += cq.weights(q) * std::hypot(ux(q), uy(q));
        out.cells.push_back(cb.cell);
        out.values.push_back(integral / cq.weights.sum());
    }
    return out;
}

Marks mark(const IndicatorField& indicator, double threshold, const HierarchicalMesh& mesh) {
    if (threshold <= 0.0) throw std::invalid_argument("mark: threshold must be positive");
    if (indicator.kind == IndicatorKind::Field && threshold >= 1.0)
        throw std::invalid_argument("mark: field indicator threshold must be < 1");
    const int nlev = mesh.num_levels();
    Marks out{MarkSet(nlev), MarkSet(nlev)};
    for (size_t k = 0; k < indicator.cells.size(); ++k) {
        const CellRef& c = indicator.cells[k];
        int flat = mesh.level(c.level).cell_index(c.ix, c.iy);
        if (indicator.values[k] > threshold) {
            // cells already at the finest level cannot be refined further
            if (c.level < nlev - 1) out.refine.add(c.level, flat);
        } else if (c.level >= 1) {
            out.coarsen.add(c.level, flat);
        }
    }
    return out;
}

bool support_extension(const HierarchicalMesh& mesh, const CellRef& q, int k, int box[4]) {
    const TensorSpace& ks = mesh.level(k);
    // index range of Q expressed in level-k cells
    int range[2][2];
    for (int d = 0; d < 2; ++d) {
        int idx = d == 0 ? q.ix : q.iy;
        if (k >= q.level) {
            range[d][0] = idx << (k - q.level);
            range[d][1] = ((idx + 1) << (k - q.level)) - 1;
        } else {
            range[d][0] = range[d][1] = idx >> (q.level - k);
        }
    }
    for (int d = 0; d < 2; ++d) {
        const int nf = ks.num_functions(d);
        int lo = -1, hi = -1;
        // functions whose support overlaps [range0, range1]
        for (int i = 0; i < nf; ++i) {
            auto [s0, s1] = ks.support_range(d, i);
            if (s0 <= range[d][1] && s1 >= range[d][0]) {
                if (lo < 0) lo = s0;
                lo = std::min(lo, s0);
                hi = std::max(hi, s1);
            }
        }
        if (lo < 0) return false;
        box[2 * d] = lo;
        box[2 * d + 1] = hi;
    }
    return true;
}

namespace {

std::vector<CellRef> active_cells_in_box(const HierarchicalMesh& mesh, int level, int k,
                                         const int box[4]) {
    // map a level-k cell box to level `level` and collect active cells
    int lo[2], hi[2];
    for (int d = 0; d < 2; ++d) {
        if (level >= k) {
            lo[d] = box[2 * d] << (level - k);
            hi[d] = ((box[2 * d + 1] + 1) << (level - k)) - 1;
        } else {
            lo[d] = box[2 * d] >> (k - level);
            hi[d] = box[2 * d + 1] >> (k - level);
        }
    }
    const TensorSpace& ls = mesh.level(level);
    lo[0] = std::max(lo[0], 0);
    lo[1] = std::max(lo[1], 0);
    hi[0] = std::min(hi[0], ls.num_elements(0) - 1);
    hi[1] = std::min(hi[1], ls.num_elements(1) - 1);
    std::vector<CellRef> out;
    for (int iy = lo[1]; iy <= hi[1]; ++iy)
        for (int ix = lo[0]; ix <= hi[0]; ++ix)
            if (mesh.state(level, ls.cell_index(ix, iy)) == CellState::Active)
                out.push_back({level, ix, iy});
    return out;
}

}  // namespace

std::vector<CellRef> refine_neighborhood(const HierarchicalMesh& mesh, const CellRef& q,
                                         int mu) {
    if (mu < 2) throw std::invalid_argument("refine_neighborhood: mu must be >= 2");
    const int target = q.level - mu + 1;
    if (target < 0) return {};
    int box[4];
    if (!support_extension(mesh, q, target + 1, box)) return {};
    return active_cells_in_box(mesh, target, target + 1, box);
}

std::vector<CellRef> coarsen_neighborhood(const HierarchicalMesh& mesh, const CellRef& q,
                                          int mu) {
    if (mu < 2) throw std::invalid_argument("coarsen_neighborhood: mu must be >= 2");
    const int target = q.level + mu;
    if (target >= mesh.num_levels()) return {};
    int box[4];
    if (!support_extension(mesh, q, target - 1, box)) return {};
    return active_cells_in_box(mesh, target, target - 1, box);
}

HierarchicalMesh refine(const HierarchicalMesh& mesh, const MarkSet& marked, int mu) {
    const int nlev = mesh.num_levels();
    if (static_cast<int>(marked.levels.size()) > nlev)
        throw std::invalid_argument("refine: mark set has more levels than the mesh");

    HierarchicalMesh out = mesh;
    std::vector<std::set<int>> M(nlev);
    for (int l = 0; l < static_cast<int>(marked.levels.size()); ++l) {
        for (int flat : marked.levels[l]) {
            if (out.state(l, flat) != CellState::Active)
                throw std::invalid_argument("refine: marked cell is not active");
            M[l].insert(flat);
        }
    }

    for (int l = nlev - 1; l >= 0; --l) {
        if (M[l].empty()) continue;
        if (l + 1 >= nlev)
            throw std::invalid_argument("refine: cannot refine the finest level");
        const TensorSpace& ls = out.level(l);
        const int target = l - mu + 1;
        if (target >= 0) {
            for (int flat : M[l]) {
                auto [ix, iy] = ls.cell_pair(flat);
                for (const CellRef& c : refine_neighborhood(out, {l, ix, iy}, mu))
                    M[target].insert(out.level(target).cell_index(c.ix, c.iy));
            }
        }
        out.refine_cells(l, std::vector<int>(M[l].begin(), M[l].end()));
    }
    return out;
}

HierarchicalMesh coarsen(const HierarchicalMesh& mesh, const MarkSet& marked, int mu) {
    const int nlev = mesh.num_levels();
    if (static_cast<int>(marked.levels.size()) > nlev)
        throw std::invalid_argument("coarsen: mark set has more levels than the mesh");
    if (!marked.levels.empty() && !marked.levels[0].empty())
        throw std::invalid_argument("coarsen: level-0 cells cannot be coarsened");

    HierarchicalMesh out = mesh;
    for (int l = std::min<int>(nlev, marked.levels.size()) - 1; l >= 1; --l) {
        const auto& ml = marked.levels[l];
        if (ml.empty()) continue;
        std::set<int> mset;
        for (int flat : ml) {
            if (out.state(l, flat) != CellState::Active)
                throw std::invalid_argument("coarsen: marked cell is not active");
            mset.insert(flat);
        }
        const TensorSpace& ls = out.level(l);
        const TensorSpace& ps = out.level(l - 1);
        std::set<int> parents;
        for (int flat : mset) {
            auto [ix, iy] = ls.cell_pair(flat);
            parents.insert(ps.cell_index(ix / 2, iy / 2));
        }
        std::vector<int> reactivate;
        for (int pflat : parents) {
            auto [px, py] = ps.cell_pair(pflat);
            bool all_marked = true;
            for (int c : out.children(l - 1, px, py))
                if (!mset.count(c)) {
                    all_marked = false;
                    break;
                }
            if (!all_marked) continue;
            if (!coarsen_neighborhood(out, {l - 1, px, py}, mu).empty()) continue;
            reactivate.push_back(pflat);
        }
        if (!reactivate.empty()) out.activate_parents(l, reactivate);
    }
    return out;
}

AdmissibilityReport check_admissible(const HierarchicalSpace& space, int mu) {
    AdmissibilityReport report;
    const auto& funcs = space.active_functions();
    for (const CellBasis& cb : space.cell_bases()) {
        int lmin = space.mesh().num_levels(), lmax = -1;
        for (int fid : cb.funcs) {
            lmin = std::min(lmin, funcs[fid].level);
            lmax = std::max(lmax, funcs[fid].level);
        }
        if (lmax >= 0 && lmax - lmin > mu - 1) {
            report.admissible = false;
            report.offending.push_back(cb.cell);
        }
    }
    return report;
}

}  // namespace thbch
