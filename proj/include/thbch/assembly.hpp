#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "thbch/hierarchical_space.hpp"
#include "thbch/quadrature.hpp"

namespace thbch {

/// Physical parameters of the Cahn-Hilliard model.
struct MaterialParams {
    double lambda = 1e-3;       ///< interface energy coefficient
    double sigma = 1.0;         ///< double-well quartic coefficient
    double nu = 1.0;            ///< double-well quadratic coefficient
    double eps_nitsche = 10.0;  ///< Nitsche penalty constant

    /// Equilibrium pure-phase value sqrt(nu/sigma).
    double binodal() const;
};

/// Double-well energy F and its first three derivatives at u.
struct DoubleWell {
    double F;
    double dF;
    double d2F;
    double d3F;
};

DoubleWell double_well(double u, const MaterialParams& params);

/// Cached per-cell quadrature data: physical weights, points, and the values
/// and derivatives of the incident hierarchical functions.
struct CellQuadrature {
    int cell_index;  ///< index into space.cell_bases()
    Eigen::VectorXd weights;
    std::vector<std::array<double, 2>> points;
    Eigen::MatrixXd N;     ///< nq x nfuncs values
    Eigen::MatrixXd dNdx;  ///< nq x nfuncs physical x-derivatives
    Eigen::MatrixXd dNdy;
    Eigen::MatrixXd lap;  ///< nq x nfuncs physical Laplacians
};

/// One boundary edge of an active cell with a 1D rule on it.
struct BoundaryQuadrature {
    int cell_index;
    double h;  ///< physical length of the edge
    Eigen::VectorXd weights;
    Eigen::MatrixXd dNdn;  ///< nq x nfuncs outward normal derivatives
    Eigen::MatrixXd lap;
};

/// Precomputed quadrature tables for one space; reused across assemblies
/// while the mesh is unchanged.
class AssemblyContext {
public:
    AssemblyContext(std::shared_ptr<const HierarchicalSpace> space, int points_per_direction);

    const HierarchicalSpace& space() const { return *space_; }
    const std::shared_ptr<const HierarchicalSpace>& space_ptr() const { return space_; }
    int quadrature_order() const { return rule_.order(); }
    const std::vector<CellQuadrature>& cells() const { return cells_; }
    const std::vector<BoundaryQuadrature>& boundary() const { return boundary_; }

private:
    std::shared_ptr<const HierarchicalSpace> space_;
    QuadratureRule rule_;
    std::vector<CellQuadrature> cells_;
    std::vector<BoundaryQuadrature> boundary_;
};

/// Assembled linear operators of the semi-discrete system, cached per mesh.
struct SystemOperators {
    Eigen::SparseMatrix<double> mass;                  ///< M
    Eigen::SparseMatrix<double> stiffness;             ///< K_Delta
    Eigen::SparseMatrix<double> boundary_consistency;  ///< K_boundary
    Eigen::SparseMatrix<double> nitsche;               ///< M_N
    int quadrature_order = 0;

    /// K_Delta - K_b - K_b^T + M_N, the linear part of dR/du.
    Eigen::SparseMatrix<double> linear_stiffness() const;
};

/// F_bar and its linearization K_F at a given state.
struct NonlinearTerms {
    Eigen::VectorXd force;              ///< F_bar(u)
    Eigen::SparseMatrix<double> tangent;  ///< K_F(u)
};

Eigen::SparseMatrix<double> assemble_mass(const AssemblyContext& ctx);

/// Gradient Gram matrix (grad N_i, grad N_j); used by diagnostics and tests.
Eigen::SparseMatrix<double> assemble_grad_gram(const AssemblyContext& ctx);

SystemOperators assemble_operators(const AssemblyContext& ctx, const MaterialParams& params);

NonlinearTerms assemble_nonlinear(const AssemblyContext& ctx, const MaterialParams& params,
                                  const Eigen::VectorXd& u, bool with_tangent = true);

/// R = M udot + F_bar(u) + (K_Delta - K_b - K_b^T + M_N) u
Eigen::VectorXd residual(const SystemOperators& ops, const AssemblyContext& ctx,
                         const MaterialParams& params, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& udot);

/// Ginzburg-Landau free energy of the discrete field.
double free_energy(const AssemblyContext& ctx, const MaterialParams& params,
                   const Eigen::VectorXd& u);

/// Integral of the field over the domain.
double total_mass(const AssemblyContext& ctx, const Eigen::VectorXd& u);

}  // namespace thbch
