#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace fieldsim::expr {

/// Arithmetic over the site coordinates x, y, z (meters). Supports
/// + - * / ^ (right-assoc power), unary minus, parentheses, the constant
/// pi, and sin cos tan tanh exp log sqrt abs sign. Used for inline
/// initial-magnetization components in config files.
class Expr {
public:
    static Expr parse(std::string_view source);

    double eval(double x, double y, double z) const;

    struct Node;

private:
    std::shared_ptr<const Node> root_;
};

} // namespace fieldsim::expr
