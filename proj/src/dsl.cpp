#include "fieldsim/dsl.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>

#include "fieldsim/units.hpp"

namespace fieldsim::dsl {

namespace {

enum class Tok { Name, Number, LParen, RParen, Comma, Star, Plus, Minus, Arrow, Caret, End };

struct Token {
    Tok kind;
    std::string text;
    double number = 0;
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            bump();
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= src_.size()) {
            tok_.kind = Tok::End;
            tok_.text.clear();
            return;
        }
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                bump();
            tok_.kind = Tok::Name;
            tok_.text = std::string(src_.substr(start, pos_ - start));
            return;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos_ + 1 < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
            double v = 0;
            auto [p, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), v);
            if (ec != std::errc()) fail("malformed number literal");
            std::size_t len = static_cast<std::size_t>(p - (src_.data() + pos_));
            tok_.kind = Tok::Number;
            tok_.text = std::string(src_.substr(pos_, len));
            tok_.number = v;
            for (std::size_t i = 0; i < len; ++i) bump();
            return;
        }
        if (c == '<' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
            bump();
            bump();
            tok_.kind = Tok::Arrow;
            tok_.text = "<-";
            return;
        }
        switch (c) {
        case '(': tok_.kind = Tok::LParen; break;
        case ')': tok_.kind = Tok::RParen; break;
        case ',': tok_.kind = Tok::Comma; break;
        case '*': tok_.kind = Tok::Star; break;
        case '+': tok_.kind = Tok::Plus; break;
        case '-': tok_.kind = Tok::Minus; break;
        default: fail(std::string("unexpected character '") + c + "'");
        }
        tok_.text = std::string(1, c);
        bump();
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw SyntaxError(msg + " at line " + std::to_string(line_) + ", column " +
                          std::to_string(col_));
    }

    void bump() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    Token tok_;
};

[[noreturn]] void fail_at(const Token& t, const std::string& msg) {
    throw SyntaxError(msg + " at line " + std::to_string(t.line) + ", column " +
                      std::to_string(t.col));
}

class Parser {
public:
    explicit Parser(std::string_view src) : lx_(src) {}

    Equation parse_assign() {
        Equation eq;
        eq.target = parse_target();
        if (lx_.peek().kind != Tok::Arrow) fail_at(lx_.peek(), "expected '<-'");
        lx_.take();
        eq.terms.push_back(parse_term(+1));
        while (lx_.peek().kind == Tok::Plus || lx_.peek().kind == Tok::Minus) {
            int sign = lx_.take().kind == Tok::Plus ? +1 : -1;
            eq.terms.push_back(parse_term(sign));
        }
        return eq;
    }

    bool at_end() const { return lx_.peek().kind == Tok::End; }

private:
    FieldRef parse_target() {
        if (lx_.peek().kind != Tok::Name) fail_at(lx_.peek(), "expected target name");
        Token name = lx_.take();
        FieldRef ref{name.text, {}};
        if (lx_.peek().kind == Tok::LParen) ref.indices = parse_idxlist();
        for (std::size_t i = 0; i < ref.indices.size(); ++i)
            for (std::size_t j = i + 1; j < ref.indices.size(); ++j)
                if (ref.indices[i] == ref.indices[j])
                    fail_at(name, "target index '" + ref.indices[i] + "' repeated");
        return ref;
    }

    std::vector<std::string> parse_idxlist() {
        lx_.take(); // '('
        std::vector<std::string> idx;
        for (;;) {
            Token t = lx_.take();
            if (t.kind != Tok::Name || t.text.size() != 1)
                fail_at(t, "expected single-letter index");
            idx.push_back(t.text);
            Token sep = lx_.take();
            if (sep.kind == Tok::RParen) break;
            if (sep.kind != Tok::Comma) fail_at(sep, "expected ',' or ')' in index list");
        }
        return idx;
    }

    Term parse_term(int sign) {
        Term term;
        term.sign = sign;
        term.factors.push_back(parse_factor());
        while (lx_.peek().kind == Tok::Star) {
            lx_.take();
            term.factors.push_back(parse_factor());
        }
        return term;
    }

    Factor parse_factor() {
        const Token& t = lx_.peek();
        if (t.kind == Tok::Number) return NumLit{lx_.take().number};
        if (t.kind != Tok::Name) fail_at(t, "expected a factor");
        Token name = lx_.take();
        if (lx_.peek().kind != Tok::LParen) return ConstRef{name.text};
        std::vector<std::string> idx = parse_idxlist();
        if (name.text == "eps") {
            if (idx.size() != 3)
                throw ArityError("eps takes exactly 3 indices, got " +
                                 std::to_string(idx.size()) + " at line " +
                                 std::to_string(name.line) + ", column " +
                                 std::to_string(name.col));
            return Eps{{idx[0], idx[1], idx[2]}};
        }
        return FieldRef{name.text, std::move(idx)};
    }

    Lexer lx_;
};

void collect_indices(const Factor& f, std::vector<std::string>& out) {
    if (const auto* fr = std::get_if<FieldRef>(&f)) {
        for (const auto& i : fr->indices) out.push_back(i);
    } else if (const auto* e = std::get_if<Eps>(&f)) {
        for (const auto& i : e->indices) out.push_back(i);
    }
}

} // namespace

Equation parse(std::string_view source) {
    Parser p(source);
    Equation eq = p.parse_assign();
    if (!p.at_end()) throw SyntaxError("trailing input after equation");
    return eq;
}

std::vector<Equation> parse_program(std::string_view source) {
    Parser p(source);
    std::vector<Equation> eqs;
    while (!p.at_end()) eqs.push_back(p.parse_assign());
    if (eqs.empty()) throw SyntaxError("empty program");
    return eqs;
}

std::string to_string(const Equation& eq) {
    std::string out = eq.target.name;
    auto idxlist = [](const std::vector<std::string>& idx) {
        std::string s = "(";
        for (std::size_t i = 0; i < idx.size(); ++i) {
            if (i) s += ", ";
            s += idx[i];
        }
        return s + ")";
    };
    if (!eq.target.indices.empty()) out += idxlist(eq.target.indices);
    out += " <- ";
    for (std::size_t t = 0; t < eq.terms.size(); ++t) {
        const Term& term = eq.terms[t];
        if (t) out += term.sign > 0 ? " + " : " - ";
        for (std::size_t i = 0; i < term.factors.size(); ++i) {
            if (i) out += " * ";
            const Factor& f = term.factors[i];
            if (const auto* n = std::get_if<NumLit>(&f)) {
                out += format_double(n->value);
            } else if (const auto* c = std::get_if<ConstRef>(&f)) {
                out += c->name;
            } else if (const auto* fr = std::get_if<FieldRef>(&f)) {
                out += fr->name + idxlist(fr->indices);
            } else {
                const auto& e = std::get<Eps>(f);
                out += "eps" + idxlist({e.indices[0], e.indices[1], e.indices[2]});
            }
        }
    }
    return out;
}

std::vector<TermIndices> classify_indices(const Equation& eq) {
    std::vector<TermIndices> result;
    result.reserve(eq.terms.size());
    for (std::size_t t = 0; t < eq.terms.size(); ++t) {
        const Term& term = eq.terms[t];
        std::vector<std::string> seen;
        for (const Factor& f : term.factors) collect_indices(f, seen);

        TermIndices ti;
        ti.free = eq.target.indices;
        for (const auto& fi : ti.free)
            if (std::find(seen.begin(), seen.end(), fi) == seen.end())
                throw UnusedFreeIndex("target index '" + fi + "' unused in term " +
                                      std::to_string(t + 1));
        for (const auto& idx : seen) {
            if (std::find(ti.free.begin(), ti.free.end(), idx) != ti.free.end()) continue;
            if (std::find(ti.bound.begin(), ti.bound.end(), idx) != ti.bound.end()) continue;
            ti.bound.push_back(idx);
        }
        result.push_back(std::move(ti));
    }
    return result;
}

} // namespace fieldsim::dsl
