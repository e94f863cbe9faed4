#include "thbch/tensor_space.hpp"

#include <stdexcept>

namespace thbch {

TensorSpace::TensorSpace(KnotVector kv_x, KnotVector kv_y, int level, GeometryMap geometry)
    : kv_x_(std::move(kv_x)), kv_y_(std::move(kv_y)), level_(level), geometry_(geometry) {
    if (kv_x_.degree() != kv_y_.degree())
        throw std::invalid_argument("TensorSpace: mixed degrees not supported");
    if (level_ < 0) throw std::invalid_argument("TensorSpace: negative level");
}

TensorSpace TensorSpace::uniform(int degree, int nel_x, int nel_y, GeometryMap geometry,
                                 int level) {
    return TensorSpace(KnotVector::uniform(degree, nel_x), KnotVector::uniform(degree, nel_y),
                       level, geometry);
}

Element TensorSpace::element(int ix, int iy) const {
    const auto& bx = kv_x_.breakpoints();
    const auto& by = kv_y_.breakpoints();
    Element e;
    e.level = level_;
    e.ix = ix;
    e.iy = iy;
    e.parametric = Box{{bx[ix], by[iy]}, {bx[ix + 1], by[iy + 1]}};
    auto lo = geometry_.to_physical(e.parametric.lo[0], e.parametric.lo[1]);
    auto hi = geometry_.to_physical(e.parametric.hi[0], e.parametric.hi[1]);
    e.physical = Box{{lo[0], lo[1]}, {hi[0], hi[1]}};
    return e;
}

std::vector<Element> TensorSpace::elements() const {
    std::vector<Element> out;
    out.reserve(num_elements());
    for (int iy = 0; iy < num_elements(1); ++iy)
        for (int ix = 0; ix < num_elements(0); ++ix) out.push_back(element(ix, iy));
    return out;
}

TensorSpace TensorSpace::dyadic_refine() const {
    return TensorSpace(kv_x_.dyadic_refine(), kv_y_.dyadic_refine(), level_ + 1, geometry_);
}

double TensorSpace::cell_extent(int dir, int idx) const {
    const auto& b = kv(dir).breakpoints();
    double scale = dir == 0 ? geometry_.Lx : geometry_.Ly;
    return scale * (b[idx + 1] - b[idx]);
}

Eigen::VectorXd TensorSpace::eval_all(double s, double t) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dimension());
    const int p = degree();
    int span_x = kv_x_.find_span(s);
    int span_y = kv_y_.find_span(t);
    Eigen::MatrixXd vx = kv_x_.eval_basis_at_span(span_x, s, 0);
    Eigen::MatrixXd vy = kv_y_.eval_basis_at_span(span_y, t, 0);
    for (int b = 0; b <= p; ++b)
        for (int a = 0; a <= p; ++a)
            out(function_index(span_x - p + a, span_y - p + b)) = vx(a, 0) * vy(b, 0);
    return out;
}

TwoScaleOperator::TwoScaleOperator(const TensorSpace& coarse, const TensorSpace& fine) {
    if (fine.level() != coarse.level() + 1)
        throw std::invalid_argument("TwoScaleOperator: spaces are not consecutive levels");
    tx_ = coarse.kv(0).refinement_matrix(fine.kv(0));
    ty_ = coarse.kv(1).refinement_matrix(fine.kv(1));

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(tx_.nonZeros()) * ty_.nonZeros() / std::max(1, coarse.num_functions(0)));
    for (int jy = 0; jy < ty_.outerSize(); ++jy) {
        for (Eigen::SparseMatrix<double>::InnerIterator ity(ty_, jy); ity; ++ity) {
            for (int jx = 0; jx < tx_.outerSize(); ++jx) {
                for (Eigen::SparseMatrix<double>::InnerIterator itx(tx_, jx); itx; ++itx) {
                    int coarse_idx = coarse.function_index(jx, jy);
                    int fine_idx = fine.function_index(static_cast<int>(itx.row()),
                                                       static_cast<int>(ity.row()));
                    trips.emplace_back(fine_idx, coarse_idx, itx.value() * ity.value());
                }
            }
        }
    }
    matrix_.resize(fine.dimension(), coarse.dimension());
    matrix_.setFromTriplets(trips.begin(), trips.end());
}

}  // namespace thbch
