#include "fieldsim/kernel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace fieldsim::kernel {

int eps_value(int i, int j, int k) {
    // (i-j)(j-k)(k-i)/2 maps even permutations of (0,1,2) to +1, odd to -1
    return (j - i) * (k - j) * (k - i) / 2;
}

namespace {

// Assignment of index letters to values 0..2 during expansion/interpretation.
struct IndexEnv {
    std::vector<std::string> names;
    std::vector<int> values;

    int value_of(const std::string& idx) const {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == idx) return values[i];
        throw Error("internal: unassigned index '" + idx + "'");
    }
};

bool monomial_key_less(const Monomial& a, const Monomial& b) {
    if (a.operands != b.operands) return a.operands < b.operands;
    return a.consts < b.consts;
}

bool monomial_key_equal(const Monomial& a, const Monomial& b) {
    return a.operands == b.operands && a.consts == b.consts;
}

} // namespace

KernelIR expand(const dsl::Equation& eq) {
    auto classified = dsl::classify_indices(eq);

    const std::size_t n_free = eq.target.indices.size();
    if (n_free > 1)
        throw ShapeMismatch("target '" + eq.target.name + "' has " + std::to_string(n_free) +
                            " free indices; fields are rank 0 or 1");

    KernelIR ir;
    ir.output = eq.target.name;
    ir.out_components = n_free == 0 ? 1 : 3;
    ir.comps.resize(ir.out_components);

    for (int c = 0; c < ir.out_components; ++c) {
        std::vector<Monomial> monos;

        for (std::size_t t = 0; t < eq.terms.size(); ++t) {
            const dsl::Term& term = eq.terms[t];
            const auto& ti = classified[t];

            IndexEnv env;
            for (const auto& f : ti.free) {
                env.names.push_back(f);
                env.values.push_back(c);
            }
            const std::size_t bound_at = env.names.size();
            for (const auto& b : ti.bound) {
                env.names.push_back(b);
                env.values.push_back(0);
            }

            const std::size_t n_bound = ti.bound.size();
            std::size_t n_tuples = 1;
            for (std::size_t i = 0; i < n_bound; ++i) n_tuples *= 3;

            for (std::size_t tuple = 0; tuple < n_tuples; ++tuple) {
                std::size_t rest = tuple;
                for (std::size_t i = 0; i < n_bound; ++i) {
                    env.values[bound_at + i] = static_cast<int>(rest % 3);
                    rest /= 3;
                }

                Monomial m;
                m.coeff = term.sign;
                bool zero = false;
                for (const dsl::Factor& f : term.factors) {
                    if (const auto* num = std::get_if<dsl::NumLit>(&f)) {
                        m.coeff *= num->value;
                    } else if (const auto* cr = std::get_if<dsl::ConstRef>(&f)) {
                        m.consts.push_back(cr->name);
                    } else if (const auto* fr = std::get_if<dsl::FieldRef>(&f)) {
                        if (fr->indices.size() != 1)
                            throw ShapeMismatch("field reference '" + fr->name + "' has " +
                                                std::to_string(fr->indices.size()) +
                                                " indices; fields are rank 0 or 1");
                        m.operands.push_back({fr->name, env.value_of(fr->indices[0])});
                    } else {
                        const auto& e = std::get<dsl::Eps>(f);
                        int v = eps_value(env.value_of(e.indices[0]), env.value_of(e.indices[1]),
                                          env.value_of(e.indices[2]));
                        if (v == 0) {
                            zero = true;
                            break;
                        }
                        m.coeff *= v;
                    }
                }
                if (zero || m.coeff == 0.0) continue;
                std::sort(m.consts.begin(), m.consts.end());
                std::sort(m.operands.begin(), m.operands.end());
                monos.push_back(std::move(m));
            }
        }

        // merge like terms, dropping exact cancellations
        std::sort(monos.begin(), monos.end(), monomial_key_less);
        std::vector<Monomial> merged;
        for (auto& m : monos) {
            if (!merged.empty() && monomial_key_equal(merged.back(), m))
                merged.back().coeff += m.coeff;
            else
                merged.push_back(std::move(m));
        }
        std::erase_if(merged, [](const Monomial& m) { return m.coeff == 0.0; });
        ir.comps[c] = std::move(merged);
    }
    return ir;
}

std::string dump(const KernelIR& ir) {
    std::string out;
    for (int c = 0; c < ir.out_components; ++c) {
        for (const Monomial& m : ir.comps[c]) {
            out += ir.output + "[" + std::to_string(c) + "]";
            out += " += " + format_double(m.coeff);
            for (const auto& cn : m.consts) out += " * " + cn;
            for (const auto& op : m.operands)
                out += " * " + op.field + "[" + std::to_string(op.comp) + "]";
            out += '\n';
        }
    }
    return out;
}

namespace {

// Shared name resolution: a ConstRef is a constant if present in the map,
// otherwise a rank-0 field. Constants win on a name collision.
enum class NameKind { Constant, ScalarField };

NameKind resolve_const_name(const std::string& name, const ConstMap& constants,
                            const FieldSet& fields) {
    if (constants.contains(name)) return NameKind::Constant;
    if (fields.contains(name) && fields.at(name).rank() == 0) return NameKind::ScalarField;
    throw UnknownConstant("'" + name + "' is neither a constant nor a scalar field");
}

const Field& operand_field(const FieldSet& fields, const std::string& name, int comp) {
    if (!fields.contains(name)) throw UnknownField("no field named '" + name + "'");
    const Field& f = fields.at(name);
    if (comp >= f.components())
        throw ComponentOutOfRange("field '" + name + "' has " +
                                  std::to_string(f.components()) + " component(s), index " +
                                  std::to_string(comp) + " requested");
    return f;
}

void check_output_field(const FieldSet& fields, const std::string& output, int components,
                        const Dimension& unit) {
    const Field& out = fields.at(output);
    if (out.components() != components)
        throw ComponentOutOfRange("output field '" + output + "' has " +
                                  std::to_string(out.components()) + " component(s), kernel produces " +
                                  std::to_string(components));
    if (!(out.unit() == unit))
        throw UnitMismatch("output field '" + output + "' has unit [" + out.unit().str() +
                           "], kernel produces [" + unit.str() + "]");
}

} // namespace

BoundKernel bind(const KernelIR& ir, const ConstMap& constants, const FieldSet& fields) {
    BoundKernel bk;
    bk.output = ir.output;
    bk.out_components = ir.out_components;
    bk.comps.resize(ir.out_components);

    auto field_slot = [&](const std::string& name) {
        for (std::size_t i = 0; i < bk.fields.size(); ++i)
            if (bk.fields[i] == name) return static_cast<int>(i);
        bk.fields.push_back(name);
        return static_cast<int>(bk.fields.size() - 1);
    };

    bool unit_set = false;
    for (int c = 0; c < ir.out_components; ++c) {
        for (const Monomial& m : ir.comps[c]) {
            BoundKernel::BoundMonomial bm;
            bm.coeff = m.coeff;
            Dimension dim;
            for (const auto& name : m.consts) {
                if (resolve_const_name(name, constants, fields) == NameKind::Constant) {
                    const Quantity& q = constants.at(name);
                    bm.coeff *= q.value();
                    dim = dim + q.dim();
                } else {
                    dim = dim + fields.at(name).unit();
                    bm.slots.push_back({field_slot(name), 0});
                }
            }
            for (const auto& op : m.operands) {
                const Field& f = operand_field(fields, op.field, op.comp);
                dim = dim + f.unit();
                bm.slots.push_back({field_slot(op.field), op.comp});
            }
            if (!unit_set) {
                bk.out_unit = dim;
                unit_set = true;
            } else if (!(dim == bk.out_unit)) {
                throw UnitMismatch("monomials of '" + ir.output + "' disagree: [" +
                                   bk.out_unit.str() + "] vs [" + dim.str() + "]");
            }
            bk.comps[c].push_back(std::move(bm));
        }
    }
    if (fields.contains(ir.output))
        check_output_field(fields, ir.output, bk.out_components, bk.out_unit);
    return bk;
}

void run_compiled(const BoundKernel& bk, FieldSet& fields, const std::string& output) {
    Field& out = fields.at(output);
    if (out.components() != bk.out_components)
        throw ComponentOutOfRange("output field '" + output + "' has " +
                                  std::to_string(out.components()) +
                                  " component(s), kernel produces " +
                                  std::to_string(bk.out_components));

    // resolve operand base pointers once per call
    struct SlotPtr {
        const double* p;
        std::size_t stride;
    };
    std::vector<const Field*> field_ptrs;
    field_ptrs.reserve(bk.fields.size());
    for (const auto& name : bk.fields) field_ptrs.push_back(&fields.at(name));

    struct FlatMono {
        double coeff;
        std::size_t first, count;
    };
    std::vector<SlotPtr> slots;
    std::vector<FlatMono> monos;
    std::vector<std::size_t> comp_begin(bk.out_components + 1);
    for (int c = 0; c < bk.out_components; ++c) {
        comp_begin[c] = monos.size();
        for (const auto& bm : bk.comps[c]) {
            monos.push_back({bm.coeff, slots.size(), bm.slots.size()});
            for (const auto& s : bm.slots) {
                const Field& f = *field_ptrs[s.field_ix];
                slots.push_back({f.data().data() + s.comp,
                                 static_cast<std::size_t>(f.components())});
            }
        }
    }
    comp_begin[bk.out_components] = monos.size();

    const std::size_t n = out.mesh().site_count();
    const std::size_t ostride = out.components();
    double* op = out.data().data();
    for (std::size_t site = 0; site < n; ++site) {
        for (int c = 0; c < bk.out_components; ++c) {
            double acc = 0.0;
            for (std::size_t mi = comp_begin[c]; mi < comp_begin[c + 1]; ++mi) {
                const FlatMono& m = monos[mi];
                double v = m.coeff;
                for (std::size_t si = m.first; si < m.first + m.count; ++si)
                    v *= slots[si].p[site * slots[si].stride];
                acc += v;
            }
            op[site * ostride + c] = acc;
        }
    }
}

void run_interpreted(const dsl::Equation& eq, const ConstMap& constants, FieldSet& fields,
                     const std::string& output) {
    auto classified = dsl::classify_indices(eq);
    const std::size_t n_free = eq.target.indices.size();
    if (n_free > 1)
        throw ShapeMismatch("target '" + eq.target.name + "' has " + std::to_string(n_free) +
                            " free indices; fields are rank 0 or 1");
    const int out_components = n_free == 0 ? 1 : 3;

    // resolve names and check units per term (dimensions are independent
    // of the index assignment, so one symbolic pass suffices)
    struct FactorEval {
        enum Kind { Literal, Constant, Scalar, Vector, Epsilon } kind;
        double value = 0;          // Literal/Constant
        const Field* field = nullptr; // Scalar/Vector
        int index_pos = -1;        // Vector: position in env; Epsilon: first of 3
        int eps_pos[3] = {-1, -1, -1};
    };
    struct TermEval {
        int sign;
        std::vector<FactorEval> factors;
        std::vector<std::string> env_names; // free first, then bound
        std::size_t n_bound;
    };

    Dimension out_unit;
    bool unit_set = false;
    std::vector<TermEval> terms;
    for (std::size_t t = 0; t < eq.terms.size(); ++t) {
        const dsl::Term& term = eq.terms[t];
        const auto& ti = classified[t];
        TermEval te;
        te.sign = term.sign;
        te.env_names = ti.free;
        te.env_names.insert(te.env_names.end(), ti.bound.begin(), ti.bound.end());
        te.n_bound = ti.bound.size();

        auto index_pos = [&](const std::string& idx) {
            for (std::size_t i = 0; i < te.env_names.size(); ++i)
                if (te.env_names[i] == idx) return static_cast<int>(i);
            throw Error("internal: unknown index '" + idx + "'");
        };

        Dimension dim;
        for (const dsl::Factor& f : term.factors) {
            FactorEval fe;
            if (const auto* num = std::get_if<dsl::NumLit>(&f)) {
                fe.kind = FactorEval::Literal;
                fe.value = num->value;
            } else if (const auto* cr = std::get_if<dsl::ConstRef>(&f)) {
                if (resolve_const_name(cr->name, constants, fields) == NameKind::Constant) {
                    const Quantity& q = constants.at(cr->name);
                    fe.kind = FactorEval::Constant;
                    fe.value = q.value();
                    dim = dim + q.dim();
                } else {
                    fe.kind = FactorEval::Scalar;
                    fe.field = &fields.at(cr->name);
                    dim = dim + fe.field->unit();
                }
            } else if (const auto* fr = std::get_if<dsl::FieldRef>(&f)) {
                if (fr->indices.size() != 1)
                    throw ShapeMismatch("field reference '" + fr->name + "' has " +
                                        std::to_string(fr->indices.size()) +
                                        " indices; fields are rank 0 or 1");
                fe.kind = FactorEval::Vector;
                if (!fields.contains(fr->name))
                    throw UnknownField("no field named '" + fr->name + "'");
                fe.field = &fields.at(fr->name);
                if (fe.field->components() != 3)
                    throw ComponentOutOfRange("field '" + fr->name + "' has " +
                                              std::to_string(fe.field->components()) +
                                              " component(s), indexed reference needs 3");
                fe.index_pos = index_pos(fr->indices[0]);
                dim = dim + fe.field->unit();
            } else {
                const auto& e = std::get<dsl::Eps>(f);
                fe.kind = FactorEval::Epsilon;
                for (int i = 0; i < 3; ++i) fe.eps_pos[i] = index_pos(e.indices[i]);
            }
            te.factors.push_back(fe);
        }
        if (!unit_set) {
            out_unit = dim;
            unit_set = true;
        } else if (!(dim == out_unit)) {
            throw UnitMismatch("terms of '" + eq.target.name + "' disagree: [" +
                               out_unit.str() + "] vs [" + dim.str() + "]");
        }
        terms.push_back(std::move(te));
    }
    check_output_field(fields, output, out_components, out_unit);

    Field& out = fields.at(output);
    const std::size_t n = out.mesh().site_count();
    std::vector<int> env;
    for (std::size_t site = 0; site < n; ++site) {
        for (int c = 0; c < out_components; ++c) {
            double acc = 0.0;
            for (const TermEval& te : terms) {
                env.assign(te.env_names.size(), 0);
                const std::size_t free_count = te.env_names.size() - te.n_bound;
                for (std::size_t i = 0; i < free_count; ++i) env[i] = c;

                std::size_t n_tuples = 1;
                for (std::size_t i = 0; i < te.n_bound; ++i) n_tuples *= 3;

                double term_sum = 0.0;
                for (std::size_t tuple = 0; tuple < n_tuples; ++tuple) {
                    std::size_t rest = tuple;
                    for (std::size_t i = 0; i < te.n_bound; ++i) {
                        env[free_count + i] = static_cast<int>(rest % 3);
                        rest /= 3;
                    }
                    double prod = 1.0;
                    for (const FactorEval& fe : te.factors) {
                        switch (fe.kind) {
                        case FactorEval::Literal:
                        case FactorEval::Constant: prod *= fe.value; break;
                        case FactorEval::Scalar: prod *= fe.field->at(site, 0); break;
                        case FactorEval::Vector:
                            prod *= fe.field->at(site, env[fe.index_pos]);
                            break;
                        case FactorEval::Epsilon:
                            prod *= eps_value(env[fe.eps_pos[0]], env[fe.eps_pos[1]],
                                              env[fe.eps_pos[2]]);
                            break;
                        }
                    }
                    term_sum += prod;
                }
                acc += te.sign * term_sum;
            }
            out.at(site, c) = acc;
        }
    }
}

BenchResult benchmark_backends(const dsl::Equation& eq, const ConstMap& constants,
                               FieldSet& fields, const std::string& output, int repetitions) {
    if (repetitions < 1) repetitions = 1;
    const std::size_t n = fields.mesh().site_count();

    BoundKernel bk = (bind)(expand(eq), constants, fields);

    using clock = std::chrono::steady_clock;
    auto time_ns = [&](auto&& body) {
        auto t0 = clock::now();
        body();
        auto t1 = clock::now();
        return std::chrono::duration<double, std::nano>(t1 - t0).count();
    };
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };

    std::vector<double> interp, comp;
    for (int r = 0; r < repetitions; ++r) {
        interp.push_back(time_ns([&] { run_interpreted(eq, constants, fields, output); }));
        comp.push_back(time_ns([&] { run_compiled(bk, fields, output); }));
    }

    BenchResult res;
    res.interpreted_ns_per_site = median(interp) / static_cast<double>(n);
    res.compiled_ns_per_site = median(comp) / static_cast<double>(n);
    res.speedup = res.interpreted_ns_per_site / res.compiled_ns_per_site;
    return res;
}

} // namespace fieldsim::kernel
