#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "thbch/knot_vector.hpp"

namespace thbch {

/// Axis-aligned affine map from the parametric square [0,1]^2 to the
/// physical rectangle [x0,x0+Lx] x [y0,y0+Ly].
struct GeometryMap {
    double x0 = 0.0, y0 = 0.0;
    double Lx = 1.0, Ly = 1.0;

    std::array<double, 2> to_physical(double s, double t) const {
        return {x0 + Lx * s, y0 + Ly * t};
    }
    std::array<double, 2> to_parametric(double x, double y) const {
        return {(x - x0) / Lx, (y - y0) / Ly};
    }
    double area() const { return Lx * Ly; }
};

/// Axis-aligned box, used for parametric and physical element extents.
struct Box {
    double lo[2];
    double hi[2];
    double area() const { return (hi[0] - lo[0]) * (hi[1] - lo[1]); }
};

/// Descriptor of one tensor-product element.
struct Element {
    int level;
    int ix, iy;
    Box parametric;
    Box physical;
};

/// Tensor-product B-spline space on [0,1]^2 with an affine geometry map.
/// Level ell of a dyadic hierarchy; level ell+1 is obtained by inserting the
/// midpoint of every knot span in both directions.
class TensorSpace {
public:
    TensorSpace(KnotVector kv_x, KnotVector kv_y, int level, GeometryMap geometry);

    static TensorSpace uniform(int degree, int nel_x, int nel_y, GeometryMap geometry = {},
                               int level = 0);

    const KnotVector& kv(int dir) const { return dir == 0 ? kv_x_ : kv_y_; }
    int degree() const { return kv_x_.degree(); }
    int level() const { return level_; }
    const GeometryMap& geometry() const { return geometry_; }

    int num_functions(int dir) const { return kv(dir).num_functions(); }
    int dimension() const { return kv_x_.num_functions() * kv_y_.num_functions(); }
    int num_elements(int dir) const { return kv(dir).num_elements(); }
    int num_elements() const { return kv_x_.num_elements() * kv_y_.num_elements(); }

    /// Flat indices: functions and cells are numbered x-fastest.
    int function_index(int i, int j) const { return j * num_functions(0) + i; }
    int cell_index(int ix, int iy) const { return iy * num_elements(0) + ix; }
    std::pair<int, int> cell_pair(int flat) const {
        return {flat % num_elements(0), flat / num_elements(0)};
    }

    /// Lexicographic element enumeration (x index fastest).
    std::vector<Element> elements() const;
    Element element(int ix, int iy) const;

    /// Cell support range of a univariate function index in direction dir.
    std::pair<int, int> support_range(int dir, int i) const { return kv(dir).support_elements(i); }

    TensorSpace dyadic_refine() const;

    /// Physical size of a cell edge along direction dir.
    double cell_extent(int dir, int idx) const;

    /// Evaluate all dimension() basis functions at a parametric point
    /// (brute-force; intended for tests and small probes).
    Eigen::VectorXd eval_all(double s, double t) const;

private:
    KnotVector kv_x_;
    KnotVector kv_y_;
    int level_;
    GeometryMap geometry_;
};

/// Two-scale (subdivision) relation between a coarse tensor space and its
/// dyadic refinement: column j of `matrix` holds the fine-basis coefficients
/// of coarse function j.
class TwoScaleOperator {
public:
    TwoScaleOperator(const TensorSpace& coarse, const TensorSpace& fine);

    const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
    const Eigen::SparseMatrix<double>& univariate(int dir) const {
        return dir == 0 ? tx_ : ty_;
    }

    /// Fine coefficients representing the same field as `coarse_coeffs`.
    Eigen::VectorXd apply(const Eigen::VectorXd& coarse_coeffs) const {
        return matrix_ * coarse_coeffs;
    }

private:
    Eigen::SparseMatrix<double> tx_, ty_;
    Eigen::SparseMatrix<double> matrix_;
};

}  // namespace thbch
