#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace dfn {

// Implicit DAE F(t, y, y') = 0 in fully assembled form. Row i is assumed to
// be the equation "belonging to" variable i, so the differential mask
// classifies rows as well as variables (index-1 structure).
struct DAESystem {
    int dimension = 0;
    std::function<void(double t, std::span<const double> y, std::span<const double> yp,
                       std::span<double> F)>
        residual;
    std::vector<std::uint8_t> differential_mask; // 1 = differential, 0 = algebraic

    // Structural nonzeros of dF/dy + alpha dF/dy' as (row, col); empty means
    // dense finite differencing.
    std::vector<std::pair<int, int>> sparsity;
};

enum class InitMethod { SINGLE_STEP, NEWTON_ALGEBRAIC };

InitMethod init_method_from_string(const std::string& s);
const char* to_string(InitMethod m);

struct SolverConfig {
    double rel_tol = 1e-6;
    double abs_tol = 1e-8;
    double h_init = 1e-3; // [s]
    double h_max = 1e9;   // [s]
    int max_newton_iters = 12;
    int max_order = 2; // 1 or 2

    InitMethod init_method = InitMethod::SINGLE_STEP;
    double h_ss = 1e-6; // single-step initialization step [s]

    double newton_ftol = 1e-9;      // scaled-residual convergence target
    double precondition_tol = 1e-6; // allowed residual of the supplied (y0, yp0)
    double event_time_tol = 1e-6;   // event-crossing refinement [s]

    void validate() const; // throws ConfigError
};

enum class Termination { REACHED_TFINAL, EVENT_CUTOFF, FAILED };

const char* to_string(Termination t);

struct SolveStats {
    long steps = 0;
    long rejected_error = 0;
    long rejected_newton = 0;
    long newton_iters = 0;
    long residual_evals = 0;
    long jacobian_builds = 0;
    int first_step_rejections = 0; // rejections before the first accepted step
};

// Accepted integration points plus derivatives; twice differentiable dense
// output by cubic Hermite interpolation between points.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::vector<std::vector<double>> derivs;
    Termination termination = Termination::FAILED;
    std::string failure; // diagnostic when termination == FAILED
    SolveStats stats;

    std::vector<double> sample(double t) const;
    void sample_into(double t, std::span<double> y_out) const;
};

using EventFn = std::function<bool(double, std::span<const double>)>;

// Variable-step BDF(1,2) integration of an index-1 DAE from consistent
// (y0, yp0). The optional event predicate is checked on every accepted step;
// a false->true transition terminates the run at the crossing time, refined
// by bisection on the dense output.
Trajectory solve(const DAESystem& system, std::pair<double, double> t_span,
                 std::span<const double> y0, std::span<const double> yp0,
                 const SolverConfig& config, const EventFn& event = {});

// Consistent initialization by one damped backward-Euler step of size h_ss
// from (y0_diff, alg_guess), holding the input at its t0 value: the algebraic
// entries relax onto the constraint manifold while the differential entries
// are pinned back to y0_diff afterwards; y' is recovered from the converged
// step relation and the differential equations at the returned point.
std::pair<std::vector<double>, std::vector<double>> init_single_step(
    const DAESystem& system, std::span<const double> y0_diff, std::span<const double> alg_guess,
    double h_ss = 1e-6, double t0 = 0.0);

// Consistent initialization by a direct Newton solve of the algebraic
// subsystem at fixed differential values, then recovery of y' on the
// differential entries.
std::pair<std::vector<double>, std::vector<double>> init_newton_algebraic(
    const DAESystem& system, std::span<const double> y0_diff, std::span<const double> alg_guess,
    double t0 = 0.0);

} // namespace dfn
