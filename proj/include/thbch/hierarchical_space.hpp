#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "thbch/hierarchical_mesh.hpp"

namespace thbch {

/// One active (possibly truncated) hierarchical basis function.
struct ActiveFunction {
    int level;
    int tensor_index;  ///< flat index in the level's tensor space
};

/// Basis representation on one active cell: the incident hierarchical
/// functions and their coefficients with respect to the (p+1)^2 tensor-product
/// B-splines of the cell's own level that do not vanish there.
struct CellBasis {
    CellRef cell;
    int first_func_x;  ///< univariate index of the first local function (x)
    int first_func_y;
    std::vector<int> funcs;  ///< global indices of incident active functions
    Eigen::MatrixXd coeffs;  ///< funcs.size() x (p+1)^2, local index x-fastest
};

/// Values and derivatives of a field at one point.
struct FieldSample {
    double value = 0.0;
    double grad[2] = {0.0, 0.0};
    double laplacian = 0.0;
};

/// Hierarchical (HB) or truncated hierarchical (THB) spline space on a
/// hierarchical mesh. Active functions are selected by the usual support
/// conditions; in truncated mode the fine-level components of coarse
/// functions supported inside finer subdomains are removed level by level.
class HierarchicalSpace {
public:
    explicit HierarchicalSpace(HierarchicalMesh mesh, bool truncated = true);

    const HierarchicalMesh& mesh() const { return mesh_; }
    bool truncated() const { return truncated_; }
    int degree() const { return mesh_.level(0).degree(); }

    int num_active_functions() const { return static_cast<int>(functions_.size()); }
    const std::vector<ActiveFunction>& active_functions() const { return functions_; }

    /// Global index of an active function, or -1.
    int global_index(int level, int tensor_index) const;

    /// Per-active-cell basis table, one entry per active cell, ordered by
    /// (level, ix, iy).
    const std::vector<CellBasis>& cell_bases() const { return cell_bases_; }
    const CellBasis& cell_basis(const CellRef& c) const;

    /// True if the level-l tensor function's support lies inside the level-l
    /// subdomain (such components are removed by truncation at level l).
    bool truncated_at_level(int l, int tensor_index) const {
        return l > 0 && trunc_flags_[l][tensor_index] != 0;
    }

    /// Evaluate the field with the given coefficients at a physical point;
    /// nders in {0,1,2} (0: value, 1: +gradient, 2: +Laplacian).
    FieldSample eval(const Eigen::VectorXd& coeffs, double x, double y, int nders = 2) const;

    /// Per-level tensor-product coefficient vectors a^l such that on every
    /// active cell of level l the field equals the level-l B-spline
    /// combination with coefficients a^l. Exact (used for transfer).
    std::vector<Eigen::VectorXd> level_representation(const Eigen::VectorXd& coeffs) const;

private:
    void build();

    HierarchicalMesh mesh_;
    bool truncated_;
    std::vector<ActiveFunction> functions_;
    std::vector<std::vector<int>> global_of_;  // [level][tensor_index] -> id or -1
    std::vector<std::vector<char>> trunc_flags_;
    std::vector<CellBasis> cell_bases_;
    std::vector<std::vector<int>> cell_basis_of_;  // [level][flat cell] -> index or -1
};

/// Coefficient vector bound to its space.
struct Field {
    std::shared_ptr<const HierarchicalSpace> space;
    Eigen::VectorXd coeffs;
};

}  // namespace thbch
