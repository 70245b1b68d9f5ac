#include "fieldsim/config.hpp"
#include "fieldsim/dsl.hpp"
#include "fieldsim/kernel.hpp"
#include "fieldsim/llg.hpp"
#include "fieldsim/runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace {

constexpr const char* kVersion = "fieldsim 1.0.0";

int cmd_run(const std::string& config_path, const std::string& output_dir, bool trace_deps,
            bool dump_kernel) {
    fieldsim::run::SimConfig cfg = fieldsim::run::load_config(config_path);
    fieldsim::run::RunOptions opts;
    opts.output_dir = output_dir;
    opts.trace_deps = trace_deps;
    opts.dump_kernel = dump_kernel;
    fieldsim::run::RunSummary sum = fieldsim::run::run_simulation(cfg, opts);
    std::cout << "wrote " << sum.observables_path << " (" << sum.rows_written << " rows, "
              << sum.steps_accepted << " steps, t_final " << sum.t_final << " s)\n";
    return 0;
}

int cmd_expand(const std::string& dsl_path) {
    std::ifstream in(dsl_path);
    if (!in) throw fieldsim::ParseError("cannot open '" + dsl_path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    for (const auto& eq : fieldsim::dsl::parse_program(ss.str()))
        std::cout << fieldsim::kernel::dump(fieldsim::kernel::expand(eq));
    return 0;
}

int cmd_bench(const std::string& config_path) {
    using namespace fieldsim;
    run::SimConfig cfg = run::load_config(config_path);
    llg::LlgCoefficients co = cfg.coeff_override
                                  ? *cfg.coeff_override
                                  : llg::LlgCoefficients::defaults_for(cfg.material);

    // fixed 10^5-site workload with seeded contents; the config supplies
    // only the physical coefficients
    Mesh mesh(100, 100, 10, 1e-9, 1e-9, 1e-9);
    FieldSet fields(mesh);
    Field& m = fields.add("m", 1);
    Field& h = fields.add("H", 1, Dimension{{-1, 0, 0, 1, 0, 0, 0}});
    fields.add("dmdt", 1, Dimension{{0, 0, -1, 0, 0, 0, 0}});

    std::mt19937 rng(42);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (std::size_t s = 0; s < mesh.site_count(); ++s) {
        double v[3] = {uni(rng), uni(rng), uni(rng)};
        double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        for (int c = 0; c < 3; ++c) m.at(s, c) = n > 0 ? v[c] / n : 1.0;
        for (int c = 0; c < 3; ++c) h.at(s, c) = 1e5 * uni(rng);
    }

    kernel::ConstMap consts;
    consts.emplace("c1", Quantity(co.c1, Dimension{{1, 0, -1, -1, 0, 0, 0}}));
    consts.emplace("c2", Quantity(co.c2, Dimension{{1, 0, -1, -1, 0, 0, 0}}));

    kernel::BenchResult r = kernel::benchmark_backends(dsl::parse(llg::kDmdtEquation), consts,
                                                       fields, "dmdt", 5);
    std::cout << "sites:          " << mesh.site_count() << "\n";
    std::cout << "interpreted:    " << r.interpreted_ns_per_site << " ns/site\n";
    std::cout << "compiled:       " << r.compiled_ns_per_site << " ns/site\n";
    std::cout << "speedup:        " << r.speedup << "x\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"field simulation engine"};
    app.require_subcommand(1);

    std::string config_path, dsl_path, output_dir = ".";
    bool trace_deps = false, dump_kernel = false;

    CLI::App* run = app.add_subcommand("run", "run a simulation from a config file");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--output-dir", output_dir, "directory for outputs");
    run->add_flag("--trace-deps", trace_deps, "print one line per executed rule");
    run->add_flag("--dump-kernel", dump_kernel, "print expanded kernel IR before running");

    CLI::App* expand = app.add_subcommand("expand", "print the kernel IR for a DSL file");
    expand->add_option("file", dsl_path, "file of index-notation assignments")->required();

    CLI::App* bench =
        app.add_subcommand("bench", "time interpreted vs compiled backends on the dmdt kernel");
    bench->add_option("config", config_path, "config file supplying material constants")
        ->required();

    CLI::App* version = app.add_subcommand("version", "print version and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // help goes to stdout, exit 0
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, output_dir, trace_deps, dump_kernel);
        if (expand->parsed()) return cmd_expand(dsl_path);
        if (bench->parsed()) return cmd_bench(config_path);
        if (version->parsed()) {
            std::cout << kVersion << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
