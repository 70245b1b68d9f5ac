#include "fieldsim/expr.hpp"

#include "fieldsim/errors.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace fieldsim::expr {

struct Expr::Node {
    enum Kind { Number, Var, Unary, Binary, Call } kind;
    double number = 0.0;
    int var = 0; // 0=x 1=y 2=z
    char op = 0; // Unary: '-'; Binary: + - * / ^
    double (*fn)(double) = nullptr;
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

double sign_fn(double v) { return v > 0.0 ? 1.0 : v < 0.0 ? -1.0 : 0.0; }

double (*lookup_fn(std::string_view name))(double) {
    if (name == "sin") return [](double v) { return std::sin(v); };
    if (name == "cos") return [](double v) { return std::cos(v); };
    if (name == "tan") return [](double v) { return std::tan(v); };
    if (name == "tanh") return [](double v) { return std::tanh(v); };
    if (name == "exp") return [](double v) { return std::exp(v); };
    if (name == "log") return [](double v) { return std::log(v); };
    if (name == "sqrt") return [](double v) { return std::sqrt(v); };
    if (name == "abs") return [](double v) { return std::abs(v); };
    if (name == "sign") return sign_fn;
    return nullptr;
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr run() {
        NodePtr e = sum();
        skip_ws();
        if (pos_ != src_.size())
            throw SyntaxError("unexpected '" + std::string(1, src_[pos_]) + "' at column " +
                              std::to_string(pos_ + 1));
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    NodePtr sum() {
        NodePtr e = product();
        for (;;) {
            if (eat('+')) e = binary('+', e, product());
            else if (eat('-')) e = binary('-', e, product());
            else return e;
        }
    }
    NodePtr product() {
        NodePtr e = unary();
        for (;;) {
            if (eat('*')) e = binary('*', e, unary());
            else if (eat('/')) e = binary('/', e, unary());
            else return e;
        }
    }
    NodePtr unary() {
        if (eat('-')) {
            auto n = std::make_shared<Expr::Node>();
            n->kind = Expr::Node::Unary;
            n->op = '-';
            n->a = unary();
            return n;
        }
        return power();
    }
    NodePtr power() {
        NodePtr base = primary();
        if (eat('^')) return binary('^', base, unary()); // right-assoc, -2^2 style ok
        return base;
    }
    NodePtr primary() {
        skip_ws();
        if (pos_ >= src_.size()) throw SyntaxError("unexpected end of expression");
        char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = sum();
            if (!eat(')'))
                throw SyntaxError("expected ')' at column " + std::to_string(pos_ + 1));
            return e;
        }
        if ((c >= '0' && c <= '9') || c == '.') return number();
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') return name();
        throw SyntaxError("unexpected '" + std::string(1, c) + "' at column " +
                          std::to_string(pos_ + 1));
    }
    NodePtr number() {
        double v = 0.0;
        const char* begin = src_.data() + pos_;
        const char* end = src_.data() + src_.size();
        auto [ptr, ec] = std::from_chars(begin, end, v);
        if (ec != std::errc())
            throw SyntaxError("bad number at column " + std::to_string(pos_ + 1));
        pos_ += static_cast<std::size_t>(ptr - begin);
        auto n = std::make_shared<Expr::Node>();
        n->kind = Expr::Node::Number;
        n->number = v;
        return n;
    }
    NodePtr name() {
        std::size_t start = pos_;
        while (pos_ < src_.size() &&
               ((src_[pos_] >= 'a' && src_[pos_] <= 'z') ||
                (src_[pos_] >= 'A' && src_[pos_] <= 'Z') ||
                (src_[pos_] >= '0' && src_[pos_] <= '9') || src_[pos_] == '_'))
            ++pos_;
        std::string_view id = src_.substr(start, pos_ - start);
        auto n = std::make_shared<Expr::Node>();
        if (id == "x" || id == "y" || id == "z") {
            n->kind = Expr::Node::Var;
            n->var = id == "x" ? 0 : id == "y" ? 1 : 2;
            return n;
        }
        if (id == "pi") {
            n->kind = Expr::Node::Number;
            n->number = std::numbers::pi;
            return n;
        }
        if (auto* fn = lookup_fn(id)) {
            if (!eat('('))
                throw SyntaxError("expected '(' after '" + std::string(id) + "'");
            n->kind = Expr::Node::Call;
            n->fn = fn;
            n->a = sum();
            if (!eat(')'))
                throw SyntaxError("expected ')' at column " + std::to_string(pos_ + 1));
            return n;
        }
        throw SyntaxError("unknown name '" + std::string(id) + "' at column " +
                          std::to_string(start + 1));
    }
    NodePtr binary(char op, NodePtr a, NodePtr b) {
        auto n = std::make_shared<Expr::Node>();
        n->kind = Expr::Node::Binary;
        n->op = op;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

double eval_node(const Expr::Node& n, double x, double y, double z) {
    switch (n.kind) {
    case Expr::Node::Number: return n.number;
    case Expr::Node::Var: return n.var == 0 ? x : n.var == 1 ? y : z;
    case Expr::Node::Unary: return -eval_node(*n.a, x, y, z);
    case Expr::Node::Call: return n.fn(eval_node(*n.a, x, y, z));
    case Expr::Node::Binary: {
        double a = eval_node(*n.a, x, y, z);
        double b = eval_node(*n.b, x, y, z);
        switch (n.op) {
        case '+': return a + b;
        case '-': return a - b;
        case '*': return a * b;
        case '/': return a / b;
        case '^': return std::pow(a, b);
        }
    }
    }
    return 0.0;
}

} // namespace

Expr Expr::parse(std::string_view source) {
    Expr e;
    e.root_ = Parser(source).run();
    return e;
}

double Expr::eval(double x, double y, double z) const { return eval_node(*root_, x, y, z); }

} // namespace fieldsim::expr
