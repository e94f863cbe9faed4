#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "thbch/tensor_space.hpp"

namespace thbch {

enum class CellState : std::uint8_t {
    Inactive,     ///< region owned by a coarser active cell
    Active,       ///< part of the hierarchical mesh
    Deactivated,  ///< replaced by its four children
};

/// Reference to one cell of the level hierarchy.
struct CellRef {
    int level;
    int ix, iy;

    friend bool operator==(const CellRef&, const CellRef&) = default;
    friend auto operator<=>(const CellRef&, const CellRef&) = default;
};

/// Hierarchical mesh over a fixed number of dyadically nested tensor-product
/// levels. The active cells of all levels tile the domain with no overlap;
/// deactivating a cell always activates its four children and vice versa, so
/// the nested-domain property holds by construction.
///
/// Meshes are value types: refinement and coarsening build modified copies,
/// the (immutable) level spaces are shared.
class HierarchicalMesh {
public:
    /// Shared per-level data: tensor spaces and two-scale operators.
    struct Levels {
        std::vector<TensorSpace> spaces;
        std::vector<TwoScaleOperator> two_scale;      // [l]: level l -> l+1
        std::vector<Eigen::MatrixXd> univariate_x;    // dense copies for local slicing
        std::vector<Eigen::MatrixXd> univariate_y;
    };

    /// Mesh with `num_levels` levels over `base`; all cells of
    /// `initial_level` active.
    HierarchicalMesh(const TensorSpace& base, int num_levels, int initial_level = 0);

    int num_levels() const { return static_cast<int>(states_.size()); }
    const TensorSpace& level(int l) const { return levels_->spaces.at(l); }
    const std::shared_ptr<const Levels>& shared_levels() const { return levels_; }
    const GeometryMap& geometry() const { return level(0).geometry(); }

    CellState state(int l, int flat) const { return states_[l][flat]; }
    CellState state(const CellRef& c) const {
        return states_[c.level][level(c.level).cell_index(c.ix, c.iy)];
    }

    /// Flat indices of the active cells of level l, ascending.
    std::vector<int> active_cells(int l) const;
    std::vector<int> deactivated_cells(int l) const;
    int num_active_cells() const;

    /// Cells of level <= l that have never been refined (the set A_l):
    /// active cells of all levels k <= l.
    std::vector<CellRef> never_refined_set(int l) const;

    /// Replace each listed active cell of level l by its four children.
    /// Throws std::invalid_argument if a cell is not active or l is the
    /// finest level.
    void refine_cells(int l, const std::vector<int>& flats);

    /// Reactivate the listed level-(l-1) parent cells, removing their
    /// children (which must all be active at level l).
    void activate_parents(int l, const std::vector<int>& parent_flats);

    /// Children of cell (ix,iy) at level l, as flat indices at level l+1.
    std::array<int, 4> children(int l, int ix, int iy) const;
    CellRef parent(const CellRef& c) const { return {c.level - 1, c.ix / 2, c.iy / 2}; }

    /// Sum of active cell areas minus the domain area (0 within roundoff for
    /// a valid mesh).
    double tiling_defect() const;

    /// Checks the nested-domain invariant (every deactivated cell fully
    /// covered by finer non-inactive cells) and the tiling.
    void validate() const;

    /// Active cell containing the parametric point (s,t).
    CellRef locate(double s, double t) const;

    /// Text dump, one line per active cell: "level ix iy", ordered by
    /// (level, ix, iy).
    std::string dump() const;
    static HierarchicalMesh parse_dump(const std::string& text, const TensorSpace& base,
                                       int num_levels);

    bool operator==(const HierarchicalMesh& other) const { return states_ == other.states_; }

private:
    std::shared_ptr<const Levels> levels_;
    std::vector<std::vector<CellState>> states_;  // [level][flat cell]
};

}  // namespace thbch
