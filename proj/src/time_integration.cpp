#include "thbch/time_integration.hpp"

#include <stdexcept>

#include <Eigen/SparseLU>

namespace thbch {

AlphaParams alpha_params(double rho_inf) {
    if (rho_inf < 0.0 || rho_inf > 1.0)
        throw std::invalid_argument("alpha_params: rho_inf must be in [0,1]");
    AlphaParams ap;
    ap.rho_inf = rho_inf;
    ap.alpha_m = (3.0 - rho_inf) / (2.0 * (1.0 + rho_inf));
    ap.alpha_f = 1.0 / (1.0 + rho_inf);
    ap.gamma = 0.5 + ap.alpha_m - ap.alpha_f;
    return ap;
}

State predict(const State& state, double gamma) {
    if (gamma <= 0.0) throw std::invalid_argument("predict: gamma must be positive");
    return {state.u, ((gamma - 1.0) / gamma) * state.udot};
}

std::pair<State, StepReport> step(const State& state, double dt, const AlphaParams& ap,
                                  const NewtonSettings& settings, const SystemOperators& ops,
                                  const AssemblyContext& ctx, const MaterialParams& params) {
    StepReport report;
    State next = predict(state, ap.gamma);
    const Eigen::SparseMatrix<double> klin = ops.linear_stiffness();

    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    for (int it = 0;; ++it) {
        Eigen::VectorXd u_alpha = state.u + ap.alpha_f * (next.u - state.u);
        Eigen::VectorXd udot_alpha = state.udot + ap.alpha_m * (next.udot - state.udot);

        NonlinearTerms nl = assemble_nonlinear(ctx, params, u_alpha, /*with_tangent=*/true);
        Eigen::VectorXd R = ops.mass * udot_alpha + nl.force + klin * u_alpha;

        report.residual_norm = R.norm();
        if (it == 0) report.prediction_norm = report.residual_norm;
        report.iterations = it;
        if (report.residual_norm <= settings.abs_tol ||
            report.residual_norm <= settings.rel_tol * report.prediction_norm) {
            report.converged = true;
            return {std::move(next), report};
        }
        if (it >= settings.max_iter)
            throw StepFailure("generalized-alpha step: Newton did not converge", report);

        Eigen::SparseMatrix<double> A =
            ap.alpha_m * ops.mass + (ap.alpha_f * ap.gamma * dt) * (klin + nl.tangent);
        solver.compute(A);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("generalized-alpha step: singular tangent matrix");
        Eigen::VectorXd b = solver.solve(-R);
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("generalized-alpha step: linear solve failed");
        ++report.linear_solves;

        next.udot += b;
        next.u += (ap.gamma * dt) * b;
    }
}

}  // namespace thbch
