#include "thbch/knot_vector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Sparse>

namespace thbch {

KnotVector::KnotVector(int degree, std::vector<double> knots)
    : degree_(degree), knots_(std::move(knots)) {
    if (degree_ < 1)
        throw std::invalid_argument("KnotVector: degree must be >= 1");
    if (!std::is_sorted(knots_.begin(), knots_.end()))
        throw std::invalid_argument("KnotVector: knots must be nondecreasing");
    const int m = static_cast<int>(knots_.size());
    if (m < 2 * (degree_ + 1))
        throw std::invalid_argument("KnotVector: too few knots");
    for (int k = 0; k <= degree_; ++k) {
        if (knots_[k] != 0.0 || knots_[m - 1 - k] != 1.0)
            throw std::invalid_argument("KnotVector: expected open knots on [0,1]");
    }
    breakpoints_.push_back(knots_.front());
    for (double t : knots_)
        if (t != breakpoints_.back()) breakpoints_.push_back(t);
}

KnotVector KnotVector::uniform(int degree, int num_elements) {
    if (num_elements < 1)
        throw std::invalid_argument("KnotVector: need at least one element");
    std::vector<double> knots;
    knots.reserve(num_elements + 1 + 2 * degree);
    for (int k = 0; k <= degree; ++k) knots.push_back(0.0);
    for (int i = 1; i < num_elements; ++i)
        knots.push_back(static_cast<double>(i) / num_elements);
    for (int k = 0; k <= degree; ++k) knots.push_back(1.0);
    return KnotVector(degree, std::move(knots));
}

int KnotVector::find_span(double x) const {
    if (x < 0.0 || x > 1.0)
        throw std::domain_error("KnotVector: point outside [0,1]");
    const int n = num_functions();
    if (x >= 1.0) return n - 1;  // last nontrivial span
    // binary search on knots[degree .. n]
    int lo = degree_, hi = n;
    while (lo + 1 < hi) {
        int mid = (lo + hi) / 2;
        if (x < knots_[mid])
            hi = mid;
        else
            lo = mid;
    }
    return lo;
}

Eigen::MatrixXd KnotVector::eval_basis(double x, int nders) const {
    return eval_basis_at_span(find_span(x), x, nders);
}

// Cox-de Boor recurrence with derivatives (inverted-triangle scheme).
Eigen::MatrixXd KnotVector::eval_basis_at_span(int span, double x, int nders) const {
    const int p = degree_;
    if (nders < 0 || nders > 2)
        throw std::invalid_argument("KnotVector: nders must be in {0,1,2}");

    Eigen::MatrixXd ndu(p + 1, p + 1);
    std::vector<double> left(p + 1), right(p + 1);
    ndu(0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = x - knots_[span + 1 - j];
        right[j] = knots_[span + j] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu(j, r) = right[r + 1] + left[j - r];
            double temp = ndu(r, j - 1) / ndu(j, r);
            ndu(r, j) = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu(j, j) = saved;
    }

    Eigen::MatrixXd ders = Eigen::MatrixXd::Zero(nders + 1, p + 1);
    for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);

    std::vector<std::vector<double>> a(2, std::vector<double>(p + 1));
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a[0][0] = 1.0;
        for (int k = 1; k <= nders; ++k) {
            double d = 0.0;
            int rk = r - k, pk = p - k;
            if (r >= k) {
                a[s2][0] = a[s1][0] / ndu(pk + 1, rk);
                d = a[s2][0] * ndu(rk, pk);
            }
            int j1 = (rk >= -1) ? 1 : -rk;
            int j2 = (r - 1 <= pk) ? k - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu(pk + 1, rk + j);
                d += a[s2][j] * ndu(rk + j, pk);
            }
            if (r <= pk) {
                a[s2][k] = -a[s1][k - 1] / ndu(pk + 1, r);
                d += a[s2][k] * ndu(r, pk);
            }
            ders(k, r) = d;
            std::swap(s1, s2);
        }
    }

    double factor = p;
    for (int k = 1; k <= nders; ++k) {
        for (int j = 0; j <= p; ++j) ders(k, j) *= factor;
        factor *= (p - k);
    }
    return ders.transpose();  // (p+1) x (nders+1)
}

std::pair<int, int> KnotVector::support_elements(int i) const {
    const int nel = num_elements();
    // Support of function i is [knots[i], knots[i+p+1]]; scan breakpoints for
    // the first and last element with positive overlap.
    const double t0 = knots_[i], t1 = knots_[i + degree_ + 1];
    int lo = 0;
    while (lo + 1 < nel && breakpoints_[lo + 1] <= t0) ++lo;
    int hi = nel - 1;
    while (hi > 0 && breakpoints_[hi] >= t1) --hi;
    return {lo, hi};
}

KnotVector KnotVector::dyadic_refine() const {
    std::vector<double> out;
    out.reserve(knots_.size() + breakpoints_.size());
    for (size_t k = 0; k + 1 < knots_.size(); ++k) {
        out.push_back(knots_[k]);
        if (knots_[k] != knots_[k + 1])
            out.push_back(0.5 * (knots_[k] + knots_[k + 1]));
    }
    out.push_back(knots_.back());
    return KnotVector(degree_, std::move(out));
}

Eigen::SparseMatrix<double> KnotVector::refinement_matrix(const KnotVector& fine) const {
    if (fine.degree_ != degree_)
        throw std::invalid_argument("refinement_matrix: degree mismatch");
    // knots of *this must be a sub-multiset of fine's
    std::vector<double> extra;
    {
        size_t i = 0;
        for (double t : fine.knots_) {
            if (i < knots_.size() && knots_[i] == t)
                ++i;
            else
                extra.push_back(t);
        }
        if (i != knots_.size())
            throw std::invalid_argument("refinement_matrix: knot vectors not nested");
    }

    // Iterated single knot insertion (Boehm): T starts as identity over the
    // coarse basis and grows one row per inserted knot.
    const int n0 = num_functions();
    Eigen::MatrixXd T = Eigen::MatrixXd::Identity(n0, n0);
    std::vector<double> cur = knots_;
    for (double u : extra) {
        const int p = degree_;
        const int n = static_cast<int>(cur.size()) - p - 1;
        // span k with cur[k] <= u < cur[k+1] (u < 1 always for inserted knots)
        int k = p;
        while (k + 1 < n + 1 && !(cur[k] <= u && u < cur[k + 1])) ++k;
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n);
        for (int i = 0; i <= n; ++i) {
            double alpha;
            if (i <= k - p)
                alpha = 1.0;
            else if (i >= k + 1)
                alpha = 0.0;
            else
                alpha = (u - cur[i]) / (cur[i + p] - cur[i]);
            if (alpha != 0.0) A(i, i) = alpha;
            if (alpha != 1.0 && i > 0) A(i, i - 1) = 1.0 - alpha;
        }
        T = (A * T).eval();
        cur.insert(std::upper_bound(cur.begin(), cur.end(), u), u);
    }
    if (cur != fine.knots_)
        throw std::invalid_argument("refinement_matrix: knot vectors not nested");

    Eigen::SparseMatrix<double> S(fine.num_functions(), n0);
    std::vector<Eigen::Triplet<double>> trips;
    for (int j = 0; j < n0; ++j)
        for (int i = 0; i < T.rows(); ++i)
            if (T(i, j) != 0.0) trips.emplace_back(i, j, T(i, j));
    S.setFromTriplets(trips.begin(), trips.end());
    return S;
}

}  // namespace thbch
