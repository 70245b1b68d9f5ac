#pragma once

#include "fieldsim/llg.hpp"
#include "fieldsim/mesh.hpp"
#include "fieldsim/rk45.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace fieldsim::run {

/// Parsed and validated simulation file. Sectioned `key = value` text;
/// every physical value is a quoted, unit-annotated quantity checked
/// against the dimension the key requires. `schema = 1` is mandatory.
struct SimConfig {
    Mesh mesh;

    llg::MaterialParams material;
    std::optional<llg::LlgCoefficients> coeff_override;

    std::array<double, 3> h_applied{0.0, 0.0, 0.0}; // A/m

    enum class InitKind { Uniform, Vortex, Expressions };
    InitKind init_kind = InitKind::Uniform;
    std::array<double, 3> init_direction{1.0, 0.0, 0.0};
    std::array<std::string, 3> init_exprs;

    enum class Mode { Dynamics, Relax };
    Mode mode = Mode::Dynamics;
    double t_end = 0.0;       // s, dynamics
    double stop_torque = 0.0; // 1/s, relax
    double max_time = 100e-9; // s, relax safety cap
    ode::IntegratorConfig integrator;

    std::string observables_path = "observables.csv";
    int observe_every_steps = 1;
    int snapshot_every_steps = 0; // 0 = off; final snapshot when > 0
    std::string snapshot_prefix = "m_";

    std::vector<std::string> equations; // extra DSL assignments, file order
};

SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::string& path);

} // namespace fieldsim::run
