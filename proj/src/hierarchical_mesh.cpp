#include "thbch/hierarchical_mesh.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace thbch {

HierarchicalMesh::HierarchicalMesh(const TensorSpace& base, int num_levels, int initial_level) {
    if (num_levels < 1) throw std::invalid_argument("HierarchicalMesh: need >= 1 level");
    if (initial_level < 0 || initial_level >= num_levels)
        throw std::invalid_argument("HierarchicalMesh: initial level out of range");

    auto levels = std::make_shared<Levels>();
    levels->spaces.push_back(base);
    for (int l = 1; l < num_levels; ++l)
        levels->spaces.push_back(levels->spaces.back().dyadic_refine());
    for (int l = 0; l + 1 < num_levels; ++l) {
        levels->two_scale.emplace_back(levels->spaces[l], levels->spaces[l + 1]);
        levels->univariate_x.emplace_back(levels->two_scale[l].univariate(0));
        levels->univariate_y.emplace_back(levels->two_scale[l].univariate(1));
    }
    levels_ = std::move(levels);

    states_.resize(num_levels);
    for (int l = 0; l < num_levels; ++l) {
        CellState s = l < initial_level    ? CellState::Deactivated
                      : l == initial_level ? CellState::Active
                                           : CellState::Inactive;
        states_[l].assign(level(l).num_elements(), s);
    }
}

std::vector<int> HierarchicalMesh::active_cells(int l) const {
    std::vector<int> out;
    for (int c = 0; c < static_cast<int>(states_[l].size()); ++c)
        if (states_[l][c] == CellState::Active) out.push_back(c);
    return out;
}

std::vector<int> HierarchicalMesh::deactivated_cells(int l) const {
    std::vector<int> out;
    for (int c = 0; c < static_cast<int>(states_[l].size()); ++c)
        if (states_[l][c] == CellState::Deactivated) out.push_back(c);
    return out;
}

int HierarchicalMesh::num_active_cells() const {
    int n = 0;
    for (int l = 0; l < num_levels(); ++l)
        n += static_cast<int>(active_cells(l).size());
    return n;
}

std::vector<CellRef> HierarchicalMesh::never_refined_set(int l) const {
    std::vector<CellRef> out;
    for (int k = 0; k <= l; ++k) {
        const auto& space = level(k);
        for (int flat : active_cells(k)) {
            auto [ix, iy] = space.cell_pair(flat);
            out.push_back({k, ix, iy});
        }
    }
    return out;
}

std::array<int, 4> HierarchicalMesh::children(int l, int ix, int iy) const {
    const auto& fine = level(l + 1);
    return {fine.cell_index(2 * ix, 2 * iy), fine.cell_index(2 * ix + 1, 2 * iy),
            fine.cell_index(2 * ix, 2 * iy + 1), fine.cell_index(2 * ix + 1, 2 * iy + 1)};
}

void HierarchicalMesh::refine_cells(int l, const std::vector<int>& flats) {
    if (l + 1 >= num_levels())
        throw std::invalid_argument("refine_cells: cannot refine the finest level");
    for (int flat : flats) {
        if (states_[l][flat] != CellState::Active)
            throw std::invalid_argument("refine_cells: cell is not active");
        auto [ix, iy] = level(l).cell_pair(flat);
        states_[l][flat] = CellState::Deactivated;
        for (int c : children(l, ix, iy)) states_[l + 1][c] = CellState::Active;
    }
}

void HierarchicalMesh::activate_parents(int l, const std::vector<int>& parent_flats) {
    if (l < 1) throw std::invalid_argument("activate_parents: level must be >= 1");
    for (int flat : parent_flats) {
        if (states_[l - 1][flat] != CellState::Deactivated)
            throw std::invalid_argument("activate_parents: parent is not deactivated");
        auto [ix, iy] = level(l - 1).cell_pair(flat);
        for (int c : children(l - 1, ix, iy)) {
            if (states_[l][c] != CellState::Active)
                throw std::invalid_argument("activate_parents: child is not active");
            states_[l][c] = CellState::Inactive;
        }
        states_[l - 1][flat] = CellState::Active;
    }
}

double HierarchicalMesh::tiling_defect() const {
    double sum = 0.0;
    for (int l = 0; l < num_levels(); ++l) {
        const auto& space = level(l);
        for (int flat : active_cells(l)) {
            auto [ix, iy] = space.cell_pair(flat);
            sum += space.element(ix, iy).physical.area();
        }
    }
    return sum - geometry().area();
}

void HierarchicalMesh::validate() const {
    for (int l = 0; l < num_levels(); ++l) {
        const auto& space = level(l);
        for (int flat = 0; flat < space.num_elements(); ++flat) {
            if (states_[l][flat] != CellState::Deactivated) continue;
            if (l + 1 >= num_levels())
                throw std::runtime_error("mesh invariant: deactivated cell at finest level");
            auto [ix, iy] = space.cell_pair(flat);
            for (int c : children(l, ix, iy))
                if (states_[l + 1][c] == CellState::Inactive)
                    throw std::runtime_error("mesh invariant: deactivated cell with inactive child");
        }
    }
    if (std::abs(tiling_defect()) > 1e-12 * geometry().area())
        throw std::runtime_error("mesh invariant: active cells do not tile the domain");
}

CellRef HierarchicalMesh::locate(double s, double t) const {
    if (s < 0.0 || s > 1.0 || t < 0.0 || t > 1.0)
        throw std::domain_error("locate: point outside the domain");
    for (int l = 0;; ++l) {
        const auto& space = level(l);
        const auto& bx = space.kv(0).breakpoints();
        const auto& by = space.kv(1).breakpoints();
        auto cell_of = [](const std::vector<double>& b, double v) {
            int i = static_cast<int>(std::upper_bound(b.begin(), b.end(), v) - b.begin()) - 1;
            return std::min(i, static_cast<int>(b.size()) - 2);
        };
        int ix = cell_of(bx, s), iy = cell_of(by, t);
        CellState st = states_[l][space.cell_index(ix, iy)];
        if (st == CellState::Active) return {l, ix, iy};
        if (st == CellState::Inactive)
            throw std::runtime_error("locate: inactive cell reached (invalid mesh)");
        // deactivated: descend
    }
}

std::string HierarchicalMesh::dump() const {
    std::ostringstream os;
    for (int l = 0; l < num_levels(); ++l) {
        const auto& space = level(l);
        std::vector<std::pair<int, int>> cells;
        for (int flat : active_cells(l)) cells.push_back(space.cell_pair(flat));
        std::sort(cells.begin(), cells.end());
        for (auto [ix, iy] : cells) os << l << " " << ix << " " << iy << "\n";
    }
    return os.str();
}

HierarchicalMesh HierarchicalMesh::parse_dump(const std::string& text, const TensorSpace& base,
                                              int num_levels) {
    HierarchicalMesh mesh(base, num_levels);
    for (auto& lev : mesh.states_)
        std::fill(lev.begin(), lev.end(), CellState::Inactive);

    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        int l, ix, iy;
        if (!(ls >> l >> ix >> iy))
            throw std::invalid_argument("parse_dump: malformed line: " + line);
        if (l < 0 || l >= num_levels)
            throw std::invalid_argument("parse_dump: level out of range");
        const auto& space = mesh.level(l);
        if (ix < 0 || ix >= space.num_elements(0) || iy < 0 || iy >= space.num_elements(1))
            throw std::invalid_argument("parse_dump: cell index out of range");
        mesh.states_[l][space.cell_index(ix, iy)] = CellState::Active;
    }
    // mark ancestors of active cells as deactivated
    for (int l = num_levels - 1; l >= 1; --l) {
        const auto& space = mesh.level(l);
        for (int flat = 0; flat < space.num_elements(); ++flat) {
            if (mesh.states_[l][flat] == CellState::Inactive) continue;
            auto [ix, iy] = space.cell_pair(flat);
            int pflat = mesh.level(l - 1).cell_index(ix / 2, iy / 2);
            if (mesh.states_[l - 1][pflat] == CellState::Active)
                throw std::invalid_argument("parse_dump: overlapping active cells");
            mesh.states_[l - 1][pflat] = CellState::Deactivated;
        }
    }
    mesh.validate();
    return mesh;
}

}  // namespace thbch
