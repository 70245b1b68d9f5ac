#include "fieldsim/config.hpp"

#include "fieldsim/errors.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>

namespace fieldsim::run {

namespace {

struct Entry {
    std::string section, key, value;
    bool quoted = false;
    int line = 0;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

std::vector<Entry> tokenize(const std::string& text) {
    std::vector<Entry> entries;
    std::string section;
    int line_no = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = trim(line);
        if (s.empty() || s.front() == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ParseError("line " + std::to_string(line_no) + ": expected ']'");
            section = std::string(trim(s.substr(1, s.size() - 2)));
            if (section.empty())
                throw ParseError("line " + std::to_string(line_no) + ": empty section name");
            continue;
        }
        std::size_t eq = s.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("line " + std::to_string(line_no) + ": expected 'key = value'");
        Entry e;
        e.section = section;
        e.key = std::string(trim(s.substr(0, eq)));
        e.line = line_no;
        std::string_view v = trim(s.substr(eq + 1));
        if (e.key.empty())
            throw ParseError("line " + std::to_string(line_no) + ": empty key");
        if (v.empty())
            throw ParseError("line " + std::to_string(line_no) + ": empty value for '" +
                             e.key + "'");
        if (v.front() == '"') {
            if (v.size() < 2 || v.back() != '"')
                throw ParseError("line " + std::to_string(line_no) + ": unterminated quote");
            e.quoted = true;
            v = v.substr(1, v.size() - 2);
        }
        e.value = std::string(v);
        entries.push_back(std::move(e));
    }
    return entries;
}

[[noreturn]] void bad(const Entry& e, const std::string& what) {
    throw ParseError("line " + std::to_string(e.line) + ": key '" + e.key + "': " + what);
}

double parse_real(const Entry& e) {
    std::string_view v = e.value;
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) bad(e, "expected a real number");
    return out;
}

long parse_int(const Entry& e) {
    std::string_view v = e.value;
    long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) bad(e, "expected an integer");
    return out;
}

std::array<double, 3> parse_vec3(const Entry& e) {
    std::istringstream in(e.value);
    std::array<double, 3> out{};
    std::string tok;
    for (int i = 0; i < 3; ++i) {
        if (!(in >> tok)) bad(e, "expected 3 numbers");
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size()) bad(e, "expected 3 numbers");
        out[i] = v;
    }
    if (in >> tok) bad(e, "expected exactly 3 numbers");
    return out;
}

// Quoted "value unit" entry validated against the dimension the key requires.
Quantity parse_quantity(const Entry& e, const Dimension& want) {
    if (!e.quoted) bad(e, "unit-annotated values must be quoted");
    Quantity q = [&] {
        try {
            return Quantity::parse(e.value);
        } catch (const Error& err) {
            bad(e, err.what());
        }
    }();
    if (!(q.dim() == want))
        throw UnitMismatch("line " + std::to_string(e.line) + ": key '" + e.key +
                           "' expects [" + want.str() + "], got [" + q.dim().str() + "]");
    return q;
}

const Dimension kDimLength{{1, 0, 0, 0, 0, 0, 0}};
const Dimension kDimTime{{0, 0, 1, 0, 0, 0, 0}};
const Dimension kDimInvTime{{0, 0, -1, 0, 0, 0, 0}};
const Dimension kDimHField{{-1, 0, 0, 1, 0, 0, 0}};
const Dimension kDimExchange{{1, 1, -2, 0, 0, 0, 0}};
const Dimension kDimAnisotropy{{-1, 1, -2, 0, 0, 0, 0}};
const Dimension kDimGamma{{1, 0, -1, -1, 0, 0, 0}};

} // namespace

SimConfig parse_config(const std::string& text) {
    std::vector<Entry> entries = tokenize(text);

    std::set<std::pair<std::string, std::string>> seen;
    for (const Entry& e : entries)
        if (!seen.insert({e.section, e.key}).second)
            throw ParseError("line " + std::to_string(e.line) + ": duplicate key '" + e.key +
                             "' in section [" + e.section + "]");

    SimConfig cfg;
    bool have_schema = false;
    int mesh_n[3] = {0, 0, 0};
    double mesh_d[3] = {0, 0, 0};
    std::set<std::string> mesh_keys;
    bool have_ms = false, have_mode = false, have_t_end = false, have_stop = false;
    bool have_c1 = false, have_c2 = false;
    double c1 = 0, c2 = 0;
    bool have_preset = false;
    std::set<std::string> expr_keys;

    for (const Entry& e : entries) {
        const std::string& s = e.section;
        const std::string& k = e.key;
        if (s.empty()) {
            if (k == "schema") {
                if (parse_int(e) != 1) bad(e, "only schema 1 is supported");
                have_schema = true;
            } else {
                throw UnknownKey("line " + std::to_string(e.line) + ": unknown key '" + k +
                                 "' outside any section");
            }
        } else if (s == "mesh") {
            if (k == "nx" || k == "ny" || k == "nz") {
                long n = parse_int(e);
                if (n < 1) bad(e, "must be >= 1");
                mesh_n[k[1] - 'x'] = static_cast<int>(n);
                mesh_keys.insert(k);
            } else if (k == "dx" || k == "dy" || k == "dz") {
                double v = parse_quantity(e, kDimLength).value();
                if (v <= 0.0) bad(e, "must be positive");
                mesh_d[k[1] - 'x'] = v;
                mesh_keys.insert(k);
            } else {
                throw UnknownKey("line " + std::to_string(e.line) + ": unknown key '" + k +
                                 "' in [mesh]");
            }
        } else if (s == "material") {
            if (k == "Ms") {
                cfg.material.Ms = parse_quantity(e, kDimHField);
                have_ms = true;
            } else if (k == "A") {
                cfg.material.A_ex = parse_quantity(e, kDimExchange);
            } else if (k == "K") {
                cfg.material.K_u = parse_quantity(e, kDimAnisotropy);
            } else if (k == "easy_axis") {
                cfg.material.easy_axis = parse_vec3(e);
            } else if (k == "alpha") {
                cfg.material.alpha = parse_real(e);
            } else if (k == "gamma") {
                cfg.material.gamma = parse_quantity(e, kDimGamma);
            } else if (k == "c1") {
                c1 = parse_quantity(e, kDimGamma).value();
                have_c1 = true;
            } else if (k == "c2") {
                c2 = parse_quantity(e, kDimGamma).value();
                have_c2 = true;
            } else {
                throw UnknownKey("line " + std::to_string(e.line) + ": unknown key '" + k +
                                 "' in [material]");
            }
        } else if (s == "applied_field") {
            if (k == "Hx") cfg.h_applied[0] = parse_quantity(e, kDimHField).value();
            else if (k == "Hy") cfg.h_applied[1] = parse_quantity(e, kDimHField).value();
            else if (k == "Hz") cfg.h_applied[2] = parse_quantity(e, kDimHField).value();
            else
                throw UnknownKey("line " + std::to_string(e.line) + ": unknown key '" + k +
                                 "' in [applied_field]");
        } else if (s == "initial_m") {
            if (k == "preset") {
                if (e.value == "uniform") cfg.init_kind = SimConfig::InitKind::Uniform;
                else if (e.value == "vortex-free-expression")
                    cfg.init_kind = SimConfig::InitKind::Vortex;
                else bad(e, "unknown preset '" + e.value + "'");
                have_preset = true;
            } else if (k == "direction") {
                cfg.init_direction = parse_vec3(e);
            } else if (k == "mx" || k == "my" || k == "mz") {
                if (!e.quoted) bad(e, "expressions must be quoted");
                cfg.init_exprs[k[1] - 'x'] = e.value;
                expr_keys.insert(k);
            } else {
                throw UnknownKey("line " + std::to_string(e.line) + ": unknown key '" + k +
                                 "' in [initial_m]");
            }
        } else if (s == "run") {
            if (k == "mode") {
                if (e.value == "dynamics") cfg.mode = SimConfig::Mode::Dynamics;
                else if (e.value == "relax") cfg.mode = SimConfig::Mode::Relax;
                else bad(e, "mode must be dynamics or relax");
                have_mode = true;
            } else if (k == "t_end") {
                cfg.t_end = parse_quantity(e, kDimTime).value();
                if (cfg.t_end < 0.0) bad(e, "must be >= 0");
                have_t_end = true;
            } else if (k == "stop_torque") {
                cfg.stop_torque = parse_quantity(e, kDimInvTime).value();
                if (cfg.stop_torque <= 0.0) bad(e, "must be positive");
                have_stop = true;
            } else if (k == "max_time") {
                cfg.max_time = parse_quantity(e, kDimTime).value();
                if (cfg.max_time <= 0.0) bad(e, "must be positive");
            } else if (k == "rtol") {
                cfg.integrator.rtol = parse_real(e);
                if (cfg.integrator.rtol < 1e-14) bad(e, "rtol must be >= 1e-14");
            } else if (k == "atol") {
                cfg.integrator.atol = parse_real(e);
                if (cfg.integrator.atol <= 0.0) bad(e, "must be positive");
            } else if (k == "dt_initial") {
                cfg.integrator.dt_initial = parse_quantity(e, kDimTime).value();
                if (cfg.integrator.dt_initial <= 0.0) bad(e, "must be positive");
            } else if (k == "dt_max") {
                cfg.integrator.dt_max = parse_quantity(e, kDimTime).value();
                if (cfg.integrator.dt_max <= 0.0) bad(e, "must be positive");
            } else if (k == "renormalize_every") {
                long n = parse_int(e);
                if (n < 0) bad(e, "must be >= 0");
                cfg.integrator.renormalize_every = static_cast<int>(n);
            } else {
                throw UnknownKey("line " + std::to_string(e.line) + ": unknown key '" + k +
                                 "' in [run]");
            }
        } else if (s == "output") {
            if (k == "observables") {
                cfg.observables_path = e.value;
            } else if (k == "observe_every_steps") {
                long n = parse_int(e);
                if (n < 1) bad(e, "must be >= 1");
                cfg.observe_every_steps = static_cast<int>(n);
            } else if (k == "snapshot_every_steps") {
                long n = parse_int(e);
                if (n < 0) bad(e, "must be >= 0");
                cfg.snapshot_every_steps = static_cast<int>(n);
            } else if (k == "snapshot_prefix") {
                cfg.snapshot_prefix = e.value;
            } else {
                throw UnknownKey("line " + std::to_string(e.line) + ": unknown key '" + k +
                                 "' in [output]");
            }
        } else if (s == "equations") {
            if (!e.quoted) bad(e, "equations must be quoted");
            cfg.equations.push_back(e.value);
        } else {
            throw UnknownKey("line " + std::to_string(e.line) + ": unknown section [" + s +
                             "]");
        }
    }

    if (!have_schema) throw ParseError("missing mandatory top-level 'schema = 1'");
    if (mesh_keys.size() != 6)
        throw ParseError("[mesh] must define nx, ny, nz, dx, dy, dz");
    cfg.mesh = Mesh(mesh_n[0], mesh_n[1], mesh_n[2], mesh_d[0], mesh_d[1], mesh_d[2]);
    if (!have_ms) throw ParseError("[material] must define Ms");
    if (have_c1 != have_c2)
        throw ParseError("[material] c1 and c2 must be overridden together");
    if (have_c1) cfg.coeff_override = llg::LlgCoefficients{c1, c2};
    if (!have_mode) throw ParseError("[run] must define mode");
    if (cfg.mode == SimConfig::Mode::Dynamics && !have_t_end)
        throw ParseError("[run] dynamics mode requires t_end");
    if (cfg.mode == SimConfig::Mode::Relax && !have_stop)
        throw ParseError("[run] relax mode requires stop_torque");
    if (cfg.integrator.dt_initial > cfg.integrator.dt_max)
        throw ParseError("[run] dt_initial exceeds dt_max");

    if (!expr_keys.empty()) {
        if (have_preset)
            throw ParseError("[initial_m] preset and component expressions are exclusive");
        if (expr_keys.size() != 3)
            throw ParseError("[initial_m] needs all of mx, my, mz");
        cfg.init_kind = SimConfig::InitKind::Expressions;
    }
    if (cfg.init_kind == SimConfig::InitKind::Uniform) {
        const auto& d = cfg.init_direction;
        if (d[0] == 0.0 && d[1] == 0.0 && d[2] == 0.0)
            throw ParseError("[initial_m] direction must be nonzero");
    }

    cfg.material.validate();
    return cfg;
}

SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace fieldsim::run
