#include "fieldsim/rk45.hpp"

#include "fieldsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fieldsim::ode {

namespace {

// Dormand-Prince 5(4) tableau. b is the a7 row (FSAL layout); e = b - b*.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;

constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kDtUnderflow = 1e-22;

} // namespace

Rk45::Rk45(Rhs rhs, std::size_t n) : rhs_(std::move(rhs)), n_(n) {
    for (auto& k : k_) k.resize(n);
    ytmp_.resize(n);
    ynew_.resize(n);
}

bool Rk45::eval(double t, std::span<const double> y, std::vector<double>& k) {
    rhs_(t, y, k);
    ++rhs_evals_;
    for (double v : k)
        if (!std::isfinite(v)) return false;
    return true;
}

StepResult Rk45::step(double t, double dt, std::span<double> y, const IntegratorConfig& cfg) {
    if (dt < kDtUnderflow)
        throw StepSizeUnderflow("step size " + std::to_string(dt) + " s below " +
                                std::to_string(kDtUnderflow) + " s at t=" + std::to_string(t));

    // A non-finite rhs at the accepted state is a hard error; on a trial stage it
    // only means dt was too large, so the step is rejected and retried smaller.
    if (!eval(t, y, k_[0]))
        throw NonFiniteRhs("rhs produced a non-finite value at t=" + std::to_string(t));

    auto rejected = [&] {
        StepResult r;
        r.error_norm = std::numeric_limits<double>::infinity();
        r.accepted = false;
        r.dt_next = std::min(dt * 0.2, cfg.dt_max);
        r.t_new = t + dt;
        return r;
    };

    for (std::size_t i = 0; i < n_; ++i) ytmp_[i] = y[i] + dt * a21 * k_[0][i];
    if (!eval(t + c2 * dt, ytmp_, k_[1])) return rejected();
    for (std::size_t i = 0; i < n_; ++i)
        ytmp_[i] = y[i] + dt * (a31 * k_[0][i] + a32 * k_[1][i]);
    if (!eval(t + c3 * dt, ytmp_, k_[2])) return rejected();
    for (std::size_t i = 0; i < n_; ++i)
        ytmp_[i] = y[i] + dt * (a41 * k_[0][i] + a42 * k_[1][i] + a43 * k_[2][i]);
    if (!eval(t + c4 * dt, ytmp_, k_[3])) return rejected();
    for (std::size_t i = 0; i < n_; ++i)
        ytmp_[i] = y[i] + dt * (a51 * k_[0][i] + a52 * k_[1][i] + a53 * k_[2][i] +
                                a54 * k_[3][i]);
    if (!eval(t + c5 * dt, ytmp_, k_[4])) return rejected();
    for (std::size_t i = 0; i < n_; ++i)
        ytmp_[i] = y[i] + dt * (a61 * k_[0][i] + a62 * k_[1][i] + a63 * k_[2][i] +
                                a64 * k_[3][i] + a65 * k_[4][i]);
    if (!eval(t + dt, ytmp_, k_[5])) return rejected();
    for (std::size_t i = 0; i < n_; ++i)
        ynew_[i] = y[i] + dt * (b1 * k_[0][i] + b3 * k_[2][i] + b4 * k_[3][i] +
                                b5 * k_[4][i] + b6 * k_[5][i]);
    if (!eval(t + dt, ynew_, k_[6])) return rejected();

    double sumsq = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        double err = dt * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] + e5 * k_[4][i] +
                           e6 * k_[5][i] + e7 * k_[6][i]);
        double w = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(ynew_[i]));
        double r = err / w;
        sumsq += r * r;
    }
    if (!std::isfinite(sumsq)) return rejected();

    StepResult res;
    res.error_norm = n_ ? std::sqrt(sumsq / static_cast<double>(n_)) : 0.0;
    res.accepted = res.error_norm <= 1.0;
    double factor =
        res.error_norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(res.error_norm, -0.2), 0.2, 5.0);
    res.dt_next = std::min(dt * factor, cfg.dt_max);
    res.t_new = t + dt;
    if (res.accepted) std::copy(ynew_.begin(), ynew_.end(), y.begin());
    return res;
}

void Rk45::step_fixed(double t, double dt, std::span<double> y) {
    IntegratorConfig loose;
    loose.rtol = 1.0;
    loose.atol = 1e300; // weights so large every step is accepted
    loose.dt_max = 1e300;
    StepResult res = step(t, dt, y, loose);
    if (!res.accepted)
        throw NonFiniteRhs("rhs produced a non-finite value during a fixed step at t=" +
                           std::to_string(t));
}

IntegrateResult integrate(Rhs rhs, std::span<double> y, const IntegratorConfig& cfg,
                          const IntegrateOptions& opts) {
    if (cfg.rtol < 1e-14) throw Error("rtol below 1e-14");
    if (cfg.atol <= 0.0 || cfg.rtol <= 0.0) throw Error("tolerances must be positive");
    if (cfg.dt_initial > cfg.dt_max) throw Error("dt_initial exceeds dt_max");

    Rk45 rk(std::move(rhs), y.size());
    IntegrateResult res;
    res.t = opts.t0;

    long last_observed = -1;
    auto observe = [&] {
        if (opts.observer && res.steps_accepted != last_observed) {
            opts.observer(res.t, y, res.steps_accepted);
            last_observed = res.steps_accepted;
        }
    };
    observe();

    if (opts.stop_predicate && opts.stop_predicate(res.t, y)) {
        res.stopped_by_predicate = true;
        res.rhs_evals = rk.rhs_evals();
        return res;
    }

    double dt = std::min(cfg.dt_initial, cfg.dt_max);
    const int stride = std::max(1, opts.observe_every_steps);

    while (res.t < opts.t_end) {
        double remaining = opts.t_end - res.t;
        // a roundoff-sized sliver is "arrived", not a step to attempt
        if (remaining <= kDtUnderflow || remaining <= 4e-16 * opts.t_end) {
            res.t = opts.t_end;
            break;
        }
        double dt_try = std::min(dt, remaining);
        StepResult sr = rk.step(res.t, dt_try, y, cfg);
        if (!sr.accepted) {
            ++res.steps_rejected;
            dt = sr.dt_next;
            continue;
        }
        // dt_try <= remaining, so any overshoot of t_end is pure roundoff
        res.t = std::min(sr.t_new, opts.t_end);
        ++res.steps_accepted;
        dt = sr.dt_next;

        if (cfg.renormalize_every > 0 && opts.renormalize &&
            res.steps_accepted % cfg.renormalize_every == 0)
            opts.renormalize(y);

        if (res.steps_accepted % stride == 0) observe();

        if (opts.stop_predicate && opts.stop_predicate(res.t, y)) {
            res.stopped_by_predicate = true;
            break;
        }
    }

    observe();
    res.rhs_evals = rk.rhs_evals();
    return res;
}

} // namespace fieldsim::ode
