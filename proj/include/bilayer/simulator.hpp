#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bilayer/potential.hpp"
#include "bilayer/profile.hpp"

namespace bilayer {

struct SimParams {
    double sigma = 0.2;
    double mu = 1.0;
    PotentialParams potential;
    double L = 2.0;
    int N = 801;  // grid nodes on [-L, 0]
    double dt_init = 1e-6;
    double dt_min = 1e-14;
    double dt_max = 1e-1;
    double newton_tol = 1e-10;  // sup-norm of dt * residual (height units)
    int newton_max_iter = 12;
    double t_end = 1.0;
    long max_steps = 0;  // 0 = unlimited
    int output_every = 100;

    void validate() const;
    double dx() const { return L / (N - 1); }
};

struct SimState {
    double t = 0.0;
    std::vector<double> h1;
    std::vector<double> h;
};

struct CLPosition {
    int layer = 0;  // 0: h1 crosses 2 eps, 1: h crosses 2 eps
    double x = 0.0;
};

struct Diagnostics {
    double t = 0.0;
    double dt = 0.0;
    double energy = 0.0;
    double mass1 = 0.0;
    double mass = 0.0;
    double min_h1 = 0.0;
    double min_h = 0.0;
    int newton_iters = 0;
    double symmetry_metric = 0.0;
    std::vector<CLPosition> cls;
};

struct StepRejected : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Eigen::Matrix2d mobility(double mu, double h1, double h);

/// p1 (h1 row, reported as lambda2) and p2 (h row, reported as lambda1).
std::pair<std::vector<double>, std::vector<double>> pressures(const SimState& s, const SimParams& prm);

/// Backward Euler residual (u - u_old)/dt - div(Q grad p), interleaved (h1_i, h_i).
std::vector<double> residual(const SimState& next, const SimState& prev, double dt, const SimParams& prm);

/// Analytic Jacobian of residual() w.r.t. the interleaved unknowns, dense (tests).
Eigen::MatrixXd residual_jacobian(const SimState& next, const SimState& prev, double dt, const SimParams& prm);

struct StepResult {
    SimState state;
    int newton_iters = 0;
};

/// One implicit step; throws StepRejected on Newton failure or loss of positivity.
StepResult step(const SimState& s, double dt, const SimParams& prm);

double energy(const SimState& s, const SimParams& prm);
std::pair<double, double> masses(const SimState& s, const SimParams& prm);
double symmetry_metric(const SimState& s, const SimParams& prm);
std::vector<CLPosition> detect_cls(const SimState& s, const SimParams& prm);
Diagnostics diagnose(const SimState& s, const SimParams& prm, double dt = 0.0, int newton_iters = 0);

/// Sup-norm of the stationary equations away from 10 eps CL neighbourhoods.
double stationary_residual(const Profile& prof, double lambda1, double lambda2, const SimParams& prm);

SimState state_from_profile(const Profile& p, const SimParams& prm);
Profile profile_from_state(const SimState& s, const SimParams& prm);

struct RunCallbacks {
    std::function<void(const Diagnostics&)> on_diagnostics;
    std::function<void(const SimState&, const Diagnostics&)> on_snapshot;
    int snapshot_every = 0;  // accepted steps; 0 = only at the end
};

struct RunResult {
    SimState final_state;
    std::vector<Diagnostics> trajectory;
    long accepted = 0;
    long rejected = 0;
    bool aborted = false;
    std::string abort_reason;
    double max_energy_increase = 0.0;  // relative, over accepted steps
};

RunResult run(const SimParams& prm, const Profile& initial, const RunCallbacks& cb = {});

enum class RunClass { Stationary, Translating, Coarsening };
const char* to_string(RunClass c);
/// Stationary if the sup drift stays within 5 eps; translating if the CL set is
/// kept and moves rigidly; coarsening otherwise.
RunClass classify_run(const SimState& initial, const SimState& final_state, const SimParams& prm);

}  // namespace bilayer
