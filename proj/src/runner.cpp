#include "fieldsim/runner.hpp"

#include "fieldsim/dsl.hpp"
#include "fieldsim/expr.hpp"
#include "fieldsim/kernel.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>

namespace fieldsim::run {

namespace {

void set_initial_m(const SimConfig& cfg, Field& m) {
    switch (cfg.init_kind) {
    case SimConfig::InitKind::Uniform: {
        const auto& d = cfg.init_direction;
        double n = std::sqrt(d[0] * d[0] + d[1] * d[1] + d[2] * d[2]);
        std::array<double, 3> u{d[0] / n, d[1] / n, d[2] / n};
        m.fill(std::span<const double>(u.data(), 3));
        return;
    }
    case SimConfig::InitKind::Vortex: {
        // singularity-free vortex pattern: in-plane circulation around the
        // domain center with a core of radius rc pointing along +z
        const Mesh& mesh = cfg.mesh;
        const double cx = 0.5 * mesh.nx * mesh.dx;
        const double cy = 0.5 * mesh.ny * mesh.dy;
        const double rc = 0.1 * std::min(mesh.nx * mesh.dx, mesh.ny * mesh.dy);
        m.set_from_function([&](double x, double y, double) {
            double vx = -(y - cy), vy = x - cx, vz = rc;
            double n = std::sqrt(vx * vx + vy * vy + vz * vz);
            return std::vector<double>{vx / n, vy / n, vz / n};
        });
        return;
    }
    case SimConfig::InitKind::Expressions: {
        expr::Expr ex = expr::Expr::parse(cfg.init_exprs[0]);
        expr::Expr ey = expr::Expr::parse(cfg.init_exprs[1]);
        expr::Expr ez = expr::Expr::parse(cfg.init_exprs[2]);
        m.set_from_function([&](double x, double y, double z) {
            double vx = ex.eval(x, y, z), vy = ey.eval(x, y, z), vz = ez.eval(x, y, z);
            if (!std::isfinite(vx) || !std::isfinite(vy) || !std::isfinite(vz))
                throw NonFiniteValue("initial_m expression is non-finite at (" +
                                     format_double(x) + ", " + format_double(y) + ", " +
                                     format_double(z) + ")");
            double n = std::sqrt(vx * vx + vy * vy + vz * vz);
            if (n == 0.0)
                throw Error("initial_m is zero at (" + format_double(x) + ", " +
                            format_double(y) + ", " + format_double(z) + ")");
            return std::vector<double>{vx / n, vy / n, vz / n};
        });
        return;
    }
    }
}

std::string g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void register_extra_equations(llg::LlgSystem& sys, const std::vector<std::string>& sources) {
    int n = 0;
    for (const std::string& src : sources) {
        dsl::Equation eq = dsl::parse(src);
        kernel::KernelIR ir = kernel::expand(eq);
        FieldSet& fs = sys.fields();
        if (!fs.contains(ir.output)) {
            // a first pass that ignores the (absent) output derives its unit
            kernel::BoundKernel probe = kernel::bind(ir, sys.constants(), fs);
            fs.add(ir.output, ir.out_components == 3 ? 1 : 0, probe.out_unit);
        }
        kernel::BoundKernel bk = kernel::bind(ir, sys.constants(), fs);
        std::vector<std::string> inputs = bk.fields;
        sys.graph().add_rule("eq" + std::to_string(++n), std::move(inputs), ir.output,
                             [bk](FieldSet& f) { kernel::run_compiled(bk, f, bk.output); });
    }
}

void dump_kernels(const llg::LlgSystem& sys, const std::vector<std::string>& extra,
                  std::ostream& os) {
    const char* const builtins[] = {llg::kExchangeScaleEquation, llg::kAnisotropyEquation,
                                    llg::kFieldSumEquation, llg::kDmdtEquation};
    for (const char* src : builtins) os << kernel::dump(kernel::expand(dsl::parse(src)));
    for (const std::string& src : extra) os << kernel::dump(kernel::expand(dsl::parse(src)));
    (void)sys;
}

} // namespace

RunSummary run_simulation(const SimConfig& cfg, const RunOptions& opts) {
    namespace fs = std::filesystem;
    std::ostream& out = opts.out ? *opts.out : std::cout;

    llg::LlgSystem sys(cfg.mesh, cfg.material, cfg.coeff_override);
    if (opts.trace_deps)
        sys.graph().set_trace([&out](const std::string& line) { out << line << '\n'; });
    if (opts.dump_kernel) dump_kernels(sys, cfg.equations, out);
    register_extra_equations(sys, cfg.equations);

    sys.fields().at("Hext").fill(std::span<const double>(cfg.h_applied.data(), 3));
    set_initial_m(cfg, sys.m());

    fs::path dir(opts.output_dir.empty() ? "." : opts.output_dir);
    fs::create_directories(dir);
    fs::path csv_path = dir / cfg.observables_path;
    std::ofstream csv(csv_path);
    if (!csv) throw Error("cannot open '" + csv_path.string() + "' for writing");

    const llg::LlgCoefficients& co = sys.coefficients();
    csv << "# observables written by fieldsim\n";
    csv << "# schema = 1\n";
    csv << "# mode = " << (cfg.mode == SimConfig::Mode::Dynamics ? "dynamics" : "relax")
        << "\n";
    csv << "# Ms = " << cfg.material.Ms.str() << "\n";
    csv << "# A = " << cfg.material.A_ex.str() << "\n";
    csv << "# K = " << cfg.material.K_u.str() << "\n";
    csv << "# alpha = " << format_double(cfg.material.alpha) << "\n";
    csv << "# gamma = " << cfg.material.gamma.str() << "\n";
    csv << "# c1 = " << format_double(co.c1) << " m A^-1 s^-1\n";
    csv << "# c2 = " << format_double(co.c2) << " m A^-1 s^-1\n";
    csv << "# rtol = " << format_double(cfg.integrator.rtol)
        << ", atol = " << format_double(cfg.integrator.atol) << "\n";
    csv << "# dt_initial = " << format_double(cfg.integrator.dt_initial)
        << " s, dt_max = " << format_double(cfg.integrator.dt_max) << " s\n";
    csv << "# renormalize_every = " << cfg.integrator.renormalize_every << "\n";
    csv << "# observe_every_steps = " << cfg.observe_every_steps << "\n";
    csv << "t,mx,my,mz,max_torque,steps\n";

    RunSummary sum;
    long last_row_steps = -1, last_snap_steps = -1;

    auto write_row = [&](double t, std::span<const double> y, long steps) {
        sys.sync_m(y);
        std::vector<double> avg = sys.m().average();
        double torque = sys.max_torque_now();
        csv << g17(t) << ',' << g17(avg[0]) << ',' << g17(avg[1]) << ',' << g17(avg[2])
            << ',' << g17(torque) << ',' << steps << '\n';
        last_row_steps = steps;
        ++sum.rows_written;
    };
    auto write_snapshot = [&](std::span<const double> y, long steps) {
        sys.sync_m(y);
        char name[64];
        std::snprintf(name, sizeof name, "%s%08ld.snap", cfg.snapshot_prefix.c_str(), steps);
        sys.m().save((dir / name).string());
        last_snap_steps = steps;
    };

    ode::IntegrateOptions iopts;
    iopts.t0 = 0.0;
    iopts.t_end = cfg.mode == SimConfig::Mode::Dynamics ? cfg.t_end : cfg.max_time;
    int stride = cfg.observe_every_steps;
    if (cfg.snapshot_every_steps > 0) stride = std::gcd(stride, cfg.snapshot_every_steps);
    iopts.observe_every_steps = stride;
    iopts.observer = [&](double t, std::span<const double> y, long steps) {
        if (steps % cfg.observe_every_steps == 0) write_row(t, y, steps);
        if (cfg.snapshot_every_steps > 0 && steps % cfg.snapshot_every_steps == 0)
            write_snapshot(y, steps);
    };
    if (cfg.mode == SimConfig::Mode::Relax)
        iopts.stop_predicate = [&](double, std::span<const double> y) {
            sys.sync_m(y);
            return sys.max_torque_now() <= cfg.stop_torque;
        };
    if (cfg.integrator.renormalize_every > 0) iopts.renormalize = llg::LlgSystem::renormalize;

    std::span<double> y = sys.m().data();
    std::vector<double> ybuf(y.begin(), y.end()); // integrator-owned state
    ode::IntegrateResult ir = ode::integrate(
        [&sys](double, std::span<const double> yv, std::span<double> dydt) {
            sys.rhs(yv, dydt);
        },
        ybuf, cfg.integrator, iopts);

    if (ir.steps_accepted != last_row_steps) write_row(ir.t, ybuf, ir.steps_accepted);
    if (cfg.snapshot_every_steps > 0 && ir.steps_accepted != last_snap_steps)
        write_snapshot(ybuf, ir.steps_accepted);

    sum.t_final = ir.t;
    sum.steps_accepted = ir.steps_accepted;
    sum.steps_rejected = ir.steps_rejected;
    sum.stopped_by_torque = ir.stopped_by_predicate;
    sum.observables_path = csv_path.string();
    return sum;
}

} // namespace fieldsim::run
