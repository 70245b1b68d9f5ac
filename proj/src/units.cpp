#include "fieldsim/units.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numbers>

namespace fieldsim {

namespace {

const char* const base_names[Dimension::n_base] = {"m", "kg", "s", "A", "K", "mol", "cd"};

// Derived aliases accepted on input, expanded to base exponents.
// J = kg m^2/s^2, N = kg m/s^2, T = kg/(A s^2), Hz = 1/s.
struct Alias {
    const char* name;
    std::array<int, 7> exp;
};
const Alias aliases[] = {
    {"J", {2, 1, -2, 0, 0, 0, 0}},
    {"N", {1, 1, -2, 0, 0, 0, 0}},
    {"T", {0, 1, -2, -1, 0, 0, 0}},
    {"Hz", {0, 0, -1, 0, 0, 0, 0}},
};

bool is_name_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

struct UnitLexer {
    std::string_view s;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= s.size();
    }
    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }
};

Dimension lookup_unit_name(std::string_view name) {
    Dimension d;
    for (int i = 0; i < Dimension::n_base; ++i) {
        if (name == base_names[i]) {
            d.exp[i] = 1;
            return d;
        }
    }
    for (const auto& a : aliases) {
        if (name == a.name) {
            d.exp = a.exp;
            return d;
        }
    }
    throw UnknownUnit("unknown unit name '" + std::string(name) + "'");
}

// term ::= name ("^" int)?
Dimension parse_term(UnitLexer& lx) {
    lx.skip_ws();
    std::size_t start = lx.pos;
    while (lx.pos < lx.s.size() && is_name_char(lx.s[lx.pos])) ++lx.pos;
    if (lx.pos == start)
        throw ParseError("expected unit name at position " + std::to_string(start) +
                         " in '" + std::string(lx.s) + "'");
    Dimension d = lookup_unit_name(lx.s.substr(start, lx.pos - start));
    if (lx.peek() == '^') {
        ++lx.pos;
        lx.skip_ws();
        std::size_t num_start = lx.pos;
        if (lx.pos < lx.s.size() && (lx.s[lx.pos] == '-' || lx.s[lx.pos] == '+')) ++lx.pos;
        while (lx.pos < lx.s.size() && lx.s[lx.pos] >= '0' && lx.s[lx.pos] <= '9') ++lx.pos;
        int n = 0;
        auto [p, ec] = std::from_chars(lx.s.data() + num_start, lx.s.data() + lx.pos, n);
        if (ec != std::errc() || p != lx.s.data() + lx.pos || lx.pos == num_start)
            throw ParseError("expected integer power after '^' in '" + std::string(lx.s) + "'");
        d = d * n;
    }
    return d;
}

} // namespace

Dimension Dimension::parse(std::string_view unit_expr) {
    UnitLexer lx{unit_expr};
    if (lx.done()) return Dimension{};
    Dimension d = parse_term(lx);
    while (!lx.done()) {
        char c = lx.peek();
        if (c == '*') {
            ++lx.pos;
            d = d + parse_term(lx);
        } else if (c == '/') {
            ++lx.pos;
            d = d - parse_term(lx);
        } else if (is_name_char(c)) {
            // juxtaposition multiplies, so canonical output re-parses
            d = d + parse_term(lx);
        } else {
            throw ParseError("unexpected character '" + std::string(1, c) + "' in unit '" +
                             std::string(unit_expr) + "'");
        }
    }
    return d;
}

bool Dimension::dimensionless() const {
    for (int e : exp)
        if (e != 0) return false;
    return true;
}

Dimension Dimension::operator+(const Dimension& o) const {
    Dimension r;
    for (int i = 0; i < n_base; ++i) r.exp[i] = exp[i] + o.exp[i];
    return r;
}

Dimension Dimension::operator-(const Dimension& o) const {
    Dimension r;
    for (int i = 0; i < n_base; ++i) r.exp[i] = exp[i] - o.exp[i];
    return r;
}

Dimension Dimension::operator*(int n) const {
    Dimension r;
    for (int i = 0; i < n_base; ++i) r.exp[i] = exp[i] * n;
    return r;
}

std::string Dimension::str() const {
    std::string out;
    auto emit = [&](int i) {
        if (!out.empty()) out += ' ';
        out += base_names[i];
        if (exp[i] != 1) {
            out += '^';
            out += std::to_string(exp[i]);
        }
    };
    for (int i = 0; i < n_base; ++i)
        if (exp[i] > 0) emit(i);
    for (int i = 0; i < n_base; ++i)
        if (exp[i] < 0) emit(i);
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

Quantity::Quantity(double value, Dimension dim) : value_(value), dim_(dim) {
    if (!std::isfinite(value))
        throw NonFiniteValue("quantity value must be finite, got " + std::to_string(value));
}

Quantity::Quantity(double value, std::string_view unit_expr)
    : Quantity(value, Dimension::parse(unit_expr)) {}

Quantity Quantity::parse(std::string_view text) {
    std::size_t pos = 0;
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
    double v = 0;
    auto [p, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), v);
    if (ec != std::errc() || p == text.data() + pos)
        throw ParseError("expected a number in quantity '" + std::string(text) + "'");
    return Quantity(v, text.substr(static_cast<std::size_t>(p - text.data())));
}

Quantity Quantity::operator*(const Quantity& o) const {
    return Quantity(value_ * o.value_, dim_ + o.dim_);
}

Quantity Quantity::operator/(const Quantity& o) const {
    if (o.value_ == 0.0) throw DivisionByZero("division by zero quantity");
    return Quantity(value_ / o.value_, dim_ - o.dim_);
}

Quantity Quantity::operator+(const Quantity& o) const {
    if (!(dim_ == o.dim_))
        throw DimensionMismatch("cannot add [" + dim_.str() + "] and [" + o.dim_.str() + "]");
    return Quantity(value_ + o.value_, dim_);
}

Quantity Quantity::operator-(const Quantity& o) const {
    if (!(dim_ == o.dim_))
        throw DimensionMismatch("cannot subtract [" + o.dim_.str() + "] from [" + dim_.str() + "]");
    return Quantity(value_ - o.value_, dim_);
}

Quantity Quantity::pow(int n) const {
    return Quantity(std::pow(value_, n), dim_ * n);
}

std::string Quantity::str() const {
    std::string out = format_double(value_);
    std::string u = dim_.str();
    if (!u.empty()) {
        out += ' ';
        out += u;
    }
    return out;
}

namespace si {

Quantity mu0() {
    return Quantity(4.0 * std::numbers::pi * 1e-7, Dimension{{1, 1, -2, -2, 0, 0, 0}});
}

} // namespace si

} // namespace fieldsim
