#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fieldsim::ode {

/// rhs(t, y, dydt): fill dydt with f(t, y). Must not retain the spans.
using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct IntegratorConfig {
    double rtol = 1e-8;
    double atol = 1e-10;
    double dt_initial = 1e-12;
    double dt_max = 1e300;
    int renormalize_every = 0; // 0 = off
};

struct StepResult {
    bool accepted = false;
    double error_norm = 0.0;
    double dt_next = 0.0;
    double t_new = 0.0;
};

struct IntegrateOptions {
    double t0 = 0.0;
    double t_end = 0.0;
    int observe_every_steps = 1;
    /// Called at t0, then after every observe_every_steps accepted steps,
    /// and at the final state (once per distinct step count).
    std::function<void(double t, std::span<const double> y, long accepted_steps)> observer;
    /// Checked after each accepted step; true stops the run (relax mode).
    std::function<bool(double t, std::span<const double> y)> stop_predicate;
    /// Applied after every renormalize_every accepted steps when > 0.
    std::function<void(std::span<double> y)> renormalize;
};

struct IntegrateResult {
    double t = 0.0;
    long steps_accepted = 0;
    long steps_rejected = 0;
    long rhs_evals = 0;
    bool stopped_by_predicate = false;
};

/// Embedded Dormand-Prince 5(4) pair with CVODE-style mixed error weights:
/// error_norm = RMS of err_i / (atol + rtol*max(|y_i|, |y_new_i|)), a step
/// is accepted iff error_norm <= 1, and
/// dt_next = dt * clamp(0.9 * error_norm^(-1/5), 0.2, 5.0), capped at dt_max.
class Rk45 {
public:
    Rk45(Rhs rhs, std::size_t n);

    /// One attempted step. Advances y only when accepted.
    StepResult step(double t, double dt, std::span<double> y, const IntegratorConfig& cfg);

    /// One unconditional 5th-order step (no error control); for order studies.
    void step_fixed(double t, double dt, std::span<double> y);

    long rhs_evals() const { return rhs_evals_; }

private:
    bool eval(double t, std::span<const double> y, std::vector<double>& k);

    Rhs rhs_;
    std::size_t n_;
    std::vector<double> k_[7];
    std::vector<double> ytmp_, ynew_;
    long rhs_evals_ = 0;
};

IntegrateResult integrate(Rhs rhs, std::span<double> y, const IntegratorConfig& cfg,
                          const IntegrateOptions& opts);

} // namespace fieldsim::ode
