#pragma once

#include <array>
#include <string>
#include <string_view>

#include "fieldsim/errors.hpp"

namespace fieldsim {

/// SI dimension as integer exponents over the seven base units,
/// in the fixed order (m, kg, s, A, K, mol, cd).
struct Dimension {
    std::array<int, 7> exp{};

    static constexpr int n_base = 7;

    /// Parse a unit expression: product/quotient of base-unit names with
    /// optional integer powers, e.g. "J/m", "m^2*kg/s^3", "s^-1".
    /// Whitespace between terms also multiplies, so canonical output
    /// ("A m^-1") re-parses. Empty string is dimensionless. Accepted
    /// derived aliases: J, N, T, Hz (expanded to base exponents).
    static Dimension parse(std::string_view unit_expr);

    bool dimensionless() const;

    Dimension operator+(const Dimension& o) const; // product of units
    Dimension operator-(const Dimension& o) const; // quotient of units
    Dimension operator*(int n) const;              // integer power

    bool operator==(const Dimension&) const = default;

    /// Canonical rendering: base order, positive powers before negative,
    /// "^n" suffix for |n| != 1. Dimensionless renders as "".
    std::string str() const;
};

/// A 64-bit real in SI base units paired with its dimension.
/// Values are always finite; construction rejects NaN and infinities.
class Quantity {
public:
    Quantity() : value_(0.0) {}
    Quantity(double value, Dimension dim);
    Quantity(double value, std::string_view unit_expr);

    /// Parse "<number> <unit-expr>" (unit part optional), e.g. "8e5 A/m".
    static Quantity parse(std::string_view text);

    double value() const { return value_; }
    const Dimension& dim() const { return dim_; }
    bool dimensionless() const { return dim_.dimensionless(); }

    Quantity operator*(const Quantity& o) const;
    Quantity operator/(const Quantity& o) const;
    Quantity operator+(const Quantity& o) const;
    Quantity operator-(const Quantity& o) const;
    Quantity pow(int n) const;

    /// Canonical rendering "<value> <unit-product>", shortest round-trip
    /// digits; dimensionless quantities render as the bare value.
    std::string str() const;

private:
    double value_;
    Dimension dim_;
};

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

namespace si {

// Vacuum permeability, kg m / (A^2 s^2).
Quantity mu0();

} // namespace si

} // namespace fieldsim
