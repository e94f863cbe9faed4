#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "thbch/assembly.hpp"

namespace thbch {

/// Generalized-alpha parameters derived from the spectral radius rho_inf.
struct AlphaParams {
    double rho_inf;
    double alpha_m;
    double alpha_f;
    double gamma;
};

/// alpha_m = (3 - rho)/(2 (1 + rho)), alpha_f = 1/(1 + rho),
/// gamma = 1/2 + alpha_m - alpha_f.
AlphaParams alpha_params(double rho_inf);

struct NewtonSettings {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;  ///< relative to the residual norm at the prediction
    int max_iter = 20;
};

struct StepReport {
    int iterations = 0;
    double residual_norm = 0.0;
    double prediction_norm = 0.0;
    bool converged = false;
    int linear_solves = 0;
};

/// Solution state: coefficients and velocities bound to one space.
struct State {
    Eigen::VectorXd u;
    Eigen::VectorXd udot;
};

/// Generalized-alpha predictions: u unchanged, udot scaled by (gamma-1)/gamma.
State predict(const State& state, double gamma);

class StepFailure : public std::runtime_error {
public:
    StepFailure(const std::string& what, StepReport report)
        : std::runtime_error(what), report(report) {}
    StepReport report;
};

/// One generalized-alpha step with Newton-Raphson corrections of the
/// velocity. Throws StepFailure when Newton does not converge within
/// max_iter, and std::runtime_error if the tangent factorization fails.
std::pair<State, StepReport> step(const State& state, double dt, const AlphaParams& ap,
                                  const NewtonSettings& settings, const SystemOperators& ops,
                                  const AssemblyContext& ctx, const MaterialParams& params);

}  // namespace thbch
