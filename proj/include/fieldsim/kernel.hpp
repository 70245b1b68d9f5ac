#pragma once

#include <map>
#include <string>
#include <vector>

#include "fieldsim/dsl.hpp"
#include "fieldsim/mesh.hpp"
#include "fieldsim/units.hpp"

namespace fieldsim::kernel {

/// 3-D Levi-Civita symbol: +1 for even permutations of (0,1,2), -1 for
/// odd, 0 if any index repeats. Indices must be in 0..2.
int eps_value(int i, int j, int k);

/// One product in the flattened sum: a numeric coefficient (eps signs and
/// folded literals), symbolic constant names, and per-site field operands.
/// comp is 0..2 for rank-1 operands. Zero-coefficient monomials do not
/// survive expansion.
struct Monomial {
    double coeff = 1.0;
    std::vector<std::string> consts;   // sorted (multiset)
    struct Operand {
        std::string field;
        int comp;
        bool operator==(const Operand&) const = default;
        auto operator<=>(const Operand&) const = default;
    };
    std::vector<Operand> operands;     // sorted; product order is immaterial
};

/// Expanded equation: per output component, the canonically sorted list
/// of like-term-merged monomials. Scalar outputs have one component.
struct KernelIR {
    std::string output;
    int out_components = 1; // 1 or 3
    std::vector<std::vector<Monomial>> comps;
};

/// Symbolically expand bound indices over {0,1,2}: eps factors fold to
/// their signs, zero monomials drop, literals fold into the coefficient,
/// like terms merge (cancelling to exactly 0.0 removes the monomial).
KernelIR expand(const dsl::Equation& eq);

/// Debug dump, one line per monomial in canonical order.
std::string dump(const KernelIR& ir);

using ConstMap = std::map<std::string, Quantity>;

/// Kernel with constants resolved to numbers and operands resolved to
/// storage slots. A constant name not present in the map resolves to a
/// rank-0 field of that name, becoming a per-site scalar operand.
struct BoundKernel {
    struct Slot {
        int field_ix; // into `fields`
        int comp;     // 0..2, or 0 for scalars
    };
    struct BoundMonomial {
        double coeff;
        std::vector<Slot> slots;
    };
    std::string output;
    int out_components = 1;
    Dimension out_unit;
    std::vector<std::string> fields; // distinct operand field names
    std::vector<std::vector<BoundMonomial>> comps;
};

/// Resolve names and check units: every monomial of a component must
/// carry the same dimension, which must match the output field's unit.
BoundKernel bind(const KernelIR& ir, const ConstMap& constants, const FieldSet& fields);

/// Reference backend: evaluates the AST per site with nested loops over
/// all bound-index assignments, eps evaluated on the fly: no folding, no
/// merging. The slow side of the backend benchmark, and the oracle.
void run_interpreted(const dsl::Equation& eq, const ConstMap& constants, FieldSet& fields,
                     const std::string& output);

/// Fast backend: one flat pass over sites executing the bound monomial
/// list. Summation order is the canonical monomial order, left to right.
void run_compiled(const BoundKernel& bk, FieldSet& fields, const std::string& output);

struct BenchResult {
    double interpreted_ns_per_site = 0;
    double compiled_ns_per_site = 0;
    double speedup = 0;
};

/// Median-of-repetitions timing of both backends on the given equation.
/// Field contents are the caller's; run after seeding them deterministically.
BenchResult benchmark_backends(const dsl::Equation& eq, const ConstMap& constants,
                               FieldSet& fields, const std::string& output, int repetitions);

} // namespace fieldsim::kernel
