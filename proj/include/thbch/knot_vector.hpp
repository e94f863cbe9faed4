#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace thbch {

/// Open knot vector on [0,1] for B-splines of a fixed degree.
///
/// The first and last knot are repeated degree+1 times; interior knots are
/// stored as dyadic rationals so that repeated midpoint refinement stays
/// exactly representable and knot equality can be tested with ==.
class KnotVector {
public:
    KnotVector(int degree, std::vector<double> knots);

    /// Open uniform knot vector with `num_elements` equal spans on [0,1],
    /// interior multiplicity 1.
    static KnotVector uniform(int degree, int num_elements);

    int degree() const { return degree_; }
    const std::vector<double>& knots() const { return knots_; }

    /// Number of basis functions, n = #knots - degree - 1.
    int num_functions() const { return static_cast<int>(knots_.size()) - degree_ - 1; }

    /// Distinct knot values (breakpoints), ascending.
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    int num_elements() const { return static_cast<int>(breakpoints_.size()) - 1; }

    /// Knot span index i with knots[i] <= x < knots[i+1]; x == 1 maps to the
    /// last nontrivial span. Throws std::domain_error for x outside [0,1].
    int find_span(double x) const;

    /// Values and derivatives of the degree+1 basis functions that do not
    /// vanish on the span of x. Row k holds the k-th derivatives, k <= nders.
    /// The nonzero functions at span s are those with indices s-degree .. s.
    Eigen::MatrixXd eval_basis(double x, int nders) const;
    Eigen::MatrixXd eval_basis_at_span(int span, double x, int nders) const;

    /// First and last element index of the support of basis function i
    /// (elements are indexed by breakpoint interval).
    std::pair<int, int> support_elements(int i) const;

    /// Knot vector with the midpoint of every nonempty span inserted once.
    KnotVector dyadic_refine() const;

    /// Knot insertion matrix T (fine x coarse): a coarse function j equals
    /// sum_i T(i,j) * fine_i. Requires `fine` to contain this knot vector's
    /// knots as a sub-multiset; throws std::invalid_argument otherwise.
    Eigen::SparseMatrix<double> refinement_matrix(const KnotVector& fine) const;

    bool operator==(const KnotVector& other) const {
        return degree_ == other.degree_ && knots_ == other.knots_;
    }

private:
    int degree_;
    std::vector<double> knots_;
    std::vector<double> breakpoints_;
};

}  // namespace thbch
