#pragma once

#include <vector>

#include "thbch/assembly.hpp"
#include "thbch/hierarchical_mesh.hpp"
#include "thbch/hierarchical_space.hpp"

namespace thbch {

/// Per-level sets of marked cells (flat indices, kept sorted and unique).
struct MarkSet {
    std::vector<std::vector<int>> levels;

    explicit MarkSet(int num_levels = 0) : levels(num_levels) {}
    bool empty() const;
    int count() const;
    void add(int level, int flat);
    std::string dump(const HierarchicalMesh& mesh) const;
};

enum class IndicatorKind { Field, Gradient };

/// One value per active cell, aligned with space.cell_bases().
struct IndicatorField {
    IndicatorKind kind;
    std::vector<CellRef> cells;
    std::vector<double> values;
};

/// Field indicator: E_e = 1 - |avg_e(u)| / binodal. Zero in pure phases, one
/// in the fully mixed state.
IndicatorField indicator_field(const AssemblyContext& ctx, const MaterialParams& params,
                               const Eigen::VectorXd& u);

/// Gradient indicator: E_e = int_e |grad u| / |e|.
IndicatorField indicator_gradient(const AssemblyContext& ctx, const Eigen::VectorXd& u);

struct Marks {
    MarkSet refine;
    MarkSet coarsen;
};

/// Cells above the threshold (below the finest level) are marked for
/// refinement; cells at or below it, of level >= 1, for coarsening.
Marks mark(const IndicatorField& indicator, double threshold, const HierarchicalMesh& mesh);

/// Support extension of cell Q at level k: the union (a cell-index box at
/// level k) of the supports of the level-k tensor B-splines whose support
/// has positive overlap with Q. Returns false if no such function exists.
bool support_extension(const HierarchicalMesh& mesh, const CellRef& q, int k, int box[4]);

/// Refinement neighborhood N_r(Q, mu): active cells of level
/// Q.level - mu + 1 overlapping the support extension at level
/// Q.level - mu + 2. Empty when that level is negative.
std::vector<CellRef> refine_neighborhood(const HierarchicalMesh& mesh, const CellRef& q, int mu);

/// Coarsening neighborhood N_c(Q, mu) of a candidate parent Q: active cells
/// of level Q.level + mu overlapping the support extension at level
/// Q.level + mu - 1. Empty when that level does not exist.
std::vector<CellRef> coarsen_neighborhood(const HierarchicalMesh& mesh, const CellRef& q, int mu);

/// Admissible refinement: replaces marked cells by their children, marking
/// the refinement neighborhoods of coarser levels along the way. Preserves
/// class-mu admissibility of the input mesh.
HierarchicalMesh refine(const HierarchicalMesh& mesh, const MarkSet& marked, int mu);

/// Conservative admissible coarsening: a parent is reactivated only if all
/// four children are marked and its coarsening neighborhood is empty.
HierarchicalMesh coarsen(const HierarchicalMesh& mesh, const MarkSet& marked, int mu);

struct AdmissibilityReport {
    bool admissible = true;
    std::vector<CellRef> offending;
};

/// Checks that on every active cell the incident active functions span at
/// most mu consecutive levels.
AdmissibilityReport check_admissible(const HierarchicalSpace& space, int mu);

}  // namespace thbch
