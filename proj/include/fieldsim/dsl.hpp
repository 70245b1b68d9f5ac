#pragma once

#include <array>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fieldsim/errors.hpp"

namespace fieldsim::dsl {

// Index-notation equation language:
//
//   assign ::= name ["(" idxlist ")"] "<-" sum
//   sum    ::= term (("+"|"-") term)*
//   term   ::= factor ("*" factor)*
//   factor ::= number | name | name "(" idxlist ")" | "eps" "(" idx "," idx "," idx ")"
//
// Indices are single-letter identifiers; whitespace and newlines are
// insignificant. A bare name is a constant reference (resolved when the
// kernel is instantiated), eps is the 3-D Levi-Civita symbol.

struct NumLit {
    double value;
    bool operator==(const NumLit&) const = default;
};

struct ConstRef {
    std::string name;
    bool operator==(const ConstRef&) const = default;
};

struct FieldRef {
    std::string name;
    std::vector<std::string> indices;
    bool operator==(const FieldRef&) const = default;
};

struct Eps {
    std::array<std::string, 3> indices;
    bool operator==(const Eps&) const = default;
};

using Factor = std::variant<NumLit, ConstRef, FieldRef, Eps>;

struct Term {
    int sign = +1; // from the "+"/"-" joining the sum
    std::vector<Factor> factors;
    bool operator==(const Term&) const = default;
};

struct Equation {
    FieldRef target; // empty index list = scalar target
    std::vector<Term> terms;
    bool operator==(const Equation&) const = default;
};

/// Free/bound split for one term: free indices are the target's; bound
/// are the term's remaining indices in first-appearance order.
struct TermIndices {
    std::vector<std::string> free;
    std::vector<std::string> bound;
};

Equation parse(std::string_view source);

/// Parse a sequence of assignments (e.g. a file with several equations).
std::vector<Equation> parse_program(std::string_view source);

/// Canonical rendering; parse(to_string(parse(s))) == parse(s).
std::string to_string(const Equation& eq);

/// Per-term classification. Throws UnusedFreeIndex if a target index
/// appears in no factor of some term (there is no broadcast).
std::vector<TermIndices> classify_indices(const Equation& eq);

} // namespace fieldsim::dsl
