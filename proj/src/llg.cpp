#include "fieldsim/llg.hpp"

#include "fieldsim/dsl.hpp"
#include "fieldsim/stencil.hpp"

#include <algorithm>
#include <cmath>

namespace fieldsim::llg {

const char* const kDmdtEquation =
    "dmdt(i) <- c1 * eps(i, j, k) * m(j) * H(k)"
    " + c2 * eps(i, j, k) * m(j) * eps(k, p, q) * m(p) * H(q)";
const char* const kExchangeScaleEquation = "Hexch(i) <- cexch * lapm(i)";
const char* const kAnisotropyEquation = "Hani(i) <- ka * e(i) * e(j) * m(j)";
const char* const kFieldSumEquation = "H(i) <- Hext(i) + Hexch(i) + Hani(i)";

namespace {

const Dimension kDimHField{{-1, 0, 0, 1, 0, 0, 0}};        // A/m
const Dimension kDimExchange{{1, 1, -2, 0, 0, 0, 0}};      // J/m
const Dimension kDimAnisotropy{{-1, 1, -2, 0, 0, 0, 0}};   // J/m^3
const Dimension kDimGamma{{1, 0, -1, -1, 0, 0, 0}};        // m/(A s)
const Dimension kDimInvLen2{{-2, 0, 0, 0, 0, 0, 0}};       // 1/m^2
const Dimension kDimTorque{{0, 0, -1, 0, 0, 0, 0}};        // 1/s

void require_dim(const Quantity& q, const Dimension& want, const char* name) {
    if (!(q.dim() == want))
        throw UnitMismatch(std::string(name) + " must be [" + want.str() + "], got [" +
                           q.dim().str() + "]");
}

} // namespace

void MaterialParams::validate() const {
    require_dim(Ms, kDimHField, "Ms");
    require_dim(A_ex, kDimExchange, "A_ex");
    require_dim(K_u, kDimAnisotropy, "K_u");
    require_dim(gamma, kDimGamma, "gamma");
    if (Ms.value() <= 0.0) throw Error("Ms must be positive");
    if (A_ex.value() < 0.0) throw Error("A_ex must be non-negative");
    if (alpha < 0.0) throw Error("alpha must be non-negative");
    if (gamma.value() <= 0.0) throw Error("gamma must be positive");
    if (K_u.value() != 0.0) {
        double n2 = easy_axis[0] * easy_axis[0] + easy_axis[1] * easy_axis[1] +
                    easy_axis[2] * easy_axis[2];
        if (std::abs(std::sqrt(n2) - 1.0) > 1e-12)
            throw Error("easy_axis must be a unit vector when K_u is nonzero");
    }
}

LlgCoefficients LlgCoefficients::defaults_for(const MaterialParams& p) {
    double gp = p.gamma.value() / (1.0 + p.alpha * p.alpha);
    return {-gp, -p.alpha * gp};
}

namespace {

// exchange coefficient 2 A_ex/(mu0 Ms), unit m*A; anisotropy coefficient
// 2 K_u/(mu0 Ms), unit A/m
Quantity exchange_coefficient(const MaterialParams& p) {
    return Quantity(2.0, Dimension{}) * p.A_ex / (si::mu0() * p.Ms);
}

Quantity anisotropy_coefficient(const MaterialParams& p) {
    return Quantity(2.0, Dimension{}) * p.K_u / (si::mu0() * p.Ms);
}

} // namespace

LlgSystem::LlgSystem(const Mesh& mesh, const MaterialParams& params,
                     std::optional<LlgCoefficients> coeff_override)
    : params_(params), fields_(mesh), graph_(fields_) {
    params_.validate();
    coeffs_ = coeff_override ? *coeff_override : LlgCoefficients::defaults_for(params_);

    fields_.add("m", 1);
    Field& e = fields_.add("e", 1);
    fields_.add("Hext", 1, kDimHField);
    fields_.add("lapm", 1, kDimInvLen2);
    fields_.add("Hexch", 1, kDimHField);
    fields_.add("Hani", 1, kDimHField);
    fields_.add("H", 1, kDimHField);
    fields_.add("dmdt", 1, kDimTorque);

    const std::array<double, 3>& ax = params_.easy_axis;
    e.fill(std::span<const double>(ax.data(), 3));

    consts_.emplace("cexch", exchange_coefficient(params_));
    consts_.emplace("ka", anisotropy_coefficient(params_));
    consts_.emplace("c1", Quantity(coeffs_.c1, kDimGamma));
    consts_.emplace("c2", Quantity(coeffs_.c2, kDimGamma));

    auto bound = [&](const char* src) {
        return kernel::bind(kernel::expand(dsl::parse(src)), consts_, fields_);
    };

    kernel::BoundKernel scale = bound(kExchangeScaleEquation);
    stencil::LaplacianOp lap(fields_.mesh());
    graph_.add_rule("exchange", {"m"}, "Hexch", [lap, scale](FieldSet& fs) {
        stencil::laplacian_apply(lap, fs.at("m"), fs.at("lapm"));
        kernel::run_compiled(scale, fs, "Hexch");
    });

    kernel::BoundKernel ani = bound(kAnisotropyEquation);
    graph_.add_rule("anisotropy", {"m", "e"}, "Hani",
                    [ani](FieldSet& fs) { kernel::run_compiled(ani, fs, "Hani"); });

    kernel::BoundKernel sum = bound(kFieldSumEquation);
    graph_.add_rule("heff", {"Hext", "Hexch", "Hani"}, "H",
                    [sum](FieldSet& fs) { kernel::run_compiled(sum, fs, "H"); });

    kernel::BoundKernel dmdt = bound(kDmdtEquation);
    graph_.add_rule("dmdt", {"m", "H"}, "dmdt",
                    [dmdt](FieldSet& fs) { kernel::run_compiled(dmdt, fs, "dmdt"); });
}

void LlgSystem::sync_m(std::span<const double> y) {
    Field& m = fields_.at("m");
    std::copy(y.begin(), y.end(), m.data().begin());
    graph_.write("m");
}

void LlgSystem::rhs(std::span<const double> y, std::span<double> dydt) {
    sync_m(y);
    graph_.request("dmdt");
    auto d = fields_.at("dmdt").data();
    std::copy(d.begin(), d.end(), dydt.begin());
}

double LlgSystem::max_torque_now() {
    graph_.request("dmdt");
    return fields_.at("dmdt").max_norm();
}

double LlgSystem::energy_now() {
    graph_.request("H");
    const Field& m = fields_.at("m");
    const Field& hext = fields_.at("Hext");
    const Field& hexch = fields_.at("Hexch");
    const Field& hani = fields_.at("Hani");
    const std::size_t n = fields_.mesh().site_count();

    // E = -mu0 Ms sum_sites [m.Hext + (m.Hexch + m.Hani)/2] dV; the half
    // weights the self-consistent (m-linear) parts of the field.
    double acc = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
        double zee = 0.0, self = 0.0;
        for (int c = 0; c < 3; ++c) {
            zee += m.at(s, c) * hext.at(s, c);
            self += m.at(s, c) * (hexch.at(s, c) + hani.at(s, c));
        }
        acc += zee + 0.5 * self;
    }
    return -si::mu0().value() * params_.Ms.value() * acc * fields_.mesh().cell_volume();
}

void LlgSystem::renormalize(std::span<double> y) {
    for (std::size_t i = 0; i + 2 < y.size(); i += 3) {
        double n = std::sqrt(y[i] * y[i] + y[i + 1] * y[i + 1] + y[i + 2] * y[i + 2]);
        if (n > 0.0) {
            y[i] /= n;
            y[i + 1] /= n;
            y[i + 2] /= n;
        }
    }
}

Field build_effective_field(const MaterialParams& params, const Field& m,
                            const Field& H_applied) {
    params.validate();
    if (!(m.mesh() == H_applied.mesh()))
        throw MeshMismatch("m and H_applied live on different meshes");
    if (!m.unit().dimensionless())
        throw UnitMismatch("m must be dimensionless, got [" + m.unit().str() + "]");
    if (!(H_applied.unit() == kDimHField))
        throw UnitMismatch("H_applied must be [A m^-1], got [" + H_applied.unit().str() + "]");

    LlgSystem sys(m.mesh(), params);
    sys.fields().at("m").assign(m.data());
    sys.fields().at("Hext").assign(H_applied.data());
    sys.graph().write("m");
    sys.graph().write("Hext");
    sys.graph().request("H");

    Field out("Heff", 1, m.mesh(), kDimHField);
    out.assign(sys.fields().at("H").data());
    return out;
}

Field llg_rhs(const MaterialParams& params, const Field& m, const Field& H_applied,
              std::optional<LlgCoefficients> coeff_override) {
    if (!(m.mesh() == H_applied.mesh()))
        throw MeshMismatch("m and H_applied live on different meshes");
    LlgSystem sys(m.mesh(), params, coeff_override);
    sys.fields().at("m").assign(m.data());
    sys.fields().at("Hext").assign(H_applied.data());
    sys.graph().write("m");
    sys.graph().write("Hext");
    sys.graph().request("dmdt");

    Field out("dmdt", 1, m.mesh(), Dimension{{0, 0, -1, 0, 0, 0, 0}});
    out.assign(sys.fields().at("dmdt").data());
    return out;
}

double max_torque(const Field& dmdt) { return dmdt.max_norm(); }

} // namespace fieldsim::llg
