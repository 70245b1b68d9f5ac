#pragma once

#include "fieldsim/depgraph.hpp"
#include "fieldsim/kernel.hpp"
#include "fieldsim/mesh.hpp"
#include "fieldsim/units.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>

namespace fieldsim::llg {

struct MaterialParams {
    Quantity Ms{0.0, Dimension{{-1, 0, 0, 1, 0, 0, 0}}};      // A/m
    Quantity A_ex{0.0, Dimension{{1, 1, -2, 0, 0, 0, 0}}};    // J/m
    Quantity K_u{0.0, Dimension{{-1, 1, -2, 0, 0, 0, 0}}};    // J/m^3
    std::array<double, 3> easy_axis{0.0, 0.0, 1.0};
    double alpha = 0.0;
    Quantity gamma{2.211e5, Dimension{{1, 0, -1, -1, 0, 0, 0}}}; // m/(A s)

    /// Ms > 0, A_ex >= 0, |easy_axis| = 1 within 1e-12 when K_u != 0,
    /// alpha >= 0, and every quantity in its expected unit.
    void validate() const;
};

/// dmdt = c1 m x H + c2 m x (m x H); both coefficients in m/(A s) so that
/// dmdt comes out in 1/s for H in A/m. Defaults follow the Landau-Lifshitz
/// convention c1 = -g', c2 = -alpha g' with g' = gamma/(1+alpha^2).
struct LlgCoefficients {
    double c1 = 0.0;
    double c2 = 0.0;

    static LlgCoefficients defaults_for(const MaterialParams& p);
};

/// Index-notation sources of the built-in kernels.
extern const char* const kDmdtEquation;
extern const char* const kExchangeScaleEquation;
extern const char* const kAnisotropyEquation;
extern const char* const kFieldSumEquation;

/// The micromagnetic system: a FieldSet holding m, e, Hext, Hexch, Hani,
/// H, dmdt (plus a lapm scratch) and a DepGraph with one rule per derived
/// field, so that requesting dmdt recomputes exactly the stale pieces.
class LlgSystem {
public:
    LlgSystem(const Mesh& mesh, const MaterialParams& params,
              std::optional<LlgCoefficients> coeff_override = std::nullopt);

    // the graph holds a pointer into this object
    LlgSystem(const LlgSystem&) = delete;
    LlgSystem& operator=(const LlgSystem&) = delete;

    FieldSet& fields() { return fields_; }
    dep::DepGraph& graph() { return graph_; }
    Field& m() { return fields_.at("m"); }
    const LlgCoefficients& coefficients() const { return coeffs_; }
    const MaterialParams& params() const { return params_; }
    const kernel::ConstMap& constants() const { return consts_; }

    /// Copy y into m and announce the mutation.
    void sync_m(std::span<const double> y);

    /// ODE right-hand side over the flat m layout: y -> dmdt.
    void rhs(std::span<const double> y, std::span<double> dydt);

    /// max over sites of |dmdt| for the current m (recomputes if stale).
    double max_torque_now();

    /// Zeeman + anisotropy + exchange energy of the current m, joules.
    double energy_now();

    /// Project every site's m onto the unit sphere.
    static void renormalize(std::span<double> y);

private:
    MaterialParams params_;
    LlgCoefficients coeffs_;
    kernel::ConstMap consts_;
    FieldSet fields_;
    dep::DepGraph graph_;
};

/// H_eff = H_applied + (2 A_ex/(mu0 Ms)) lap(m) + (2 K_u/(mu0 Ms)) (m.e) e.
Field build_effective_field(const MaterialParams& params, const Field& m,
                            const Field& H_applied);

/// dmdt field for the given m and applied field, via the expanded kernel.
Field llg_rhs(const MaterialParams& params, const Field& m, const Field& H_applied,
              std::optional<LlgCoefficients> coeff_override = std::nullopt);

/// max over sites of |dmdt|, 1/s.
double max_torque(const Field& dmdt);

} // namespace fieldsim::llg
