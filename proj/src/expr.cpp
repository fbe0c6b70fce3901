#include "solitonlab/expr.hpp"

#include <cctype>
#include <cmath>
#include <map>

#include "solitonlab/errors.hpp"

namespace solitonlab {

namespace {

enum class Op { Num, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Tan, Exp, Log, Sqrt };

} // namespace

struct Expr::Node {
    Op op;
    double value = 0.0; // Num
    int slot = -1;      // Var
    std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

struct Token {
    enum Kind { Number, Ident, Sym, End } kind;
    std::string text;
    double num = 0.0;
    std::size_t pos = 0;
};

class Lexer {
public:
    Lexer(const std::string& s) : s_(s) { advance(); }
    const Token& cur() const { return cur_; }

    void advance() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
        cur_.pos = i_;
        if (i_ >= s_.size()) {
            cur_ = {Token::End, "", 0.0, i_};
            return;
        }
        char c = s_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t end = 0;
            double v = 0.0;
            try {
                v = std::stod(s_.substr(i_), &end);
            } catch (const std::exception&) {
                fail(std::string(1, c));
            }
            cur_ = {Token::Number, s_.substr(i_, end), v, i_};
            i_ += end;
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i_;
            while (j < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_'))
                ++j;
            cur_ = {Token::Ident, s_.substr(i_, j - i_), 0.0, i_};
            i_ = j;
            return;
        }
        if (std::string("+-*/^()").find(c) != std::string::npos) {
            cur_ = {Token::Sym, std::string(1, c), 0.0, i_};
            ++i_;
            return;
        }
        fail(std::string(1, c));
    }

    [[noreturn]] void fail(const std::string& tok) const {
        throw ConfigError("expression parse error: unexpected token '" + tok +
                          "' at position " + std::to_string(i_) + " in '" + s_ + "'");
    }

private:
    std::string s_;
    std::size_t i_ = 0;
    Token cur_;
};

class Parser {
public:
    Parser(const std::string& text, const Expr::VarMap& vars)
        : lex_(text), text_(text), slots_(vars) {}

    NodePtr parse() {
        NodePtr e = sum();
        if (lex_.cur().kind != Token::End)
            throw ConfigError("expression parse error: unexpected token '" + lex_.cur().text +
                              "' at position " + std::to_string(lex_.cur().pos) + " in '" +
                              text_ + "'");
        return e;
    }

private:
    NodePtr sum() {
        NodePtr e = term();
        while (is_sym("+") || is_sym("-")) {
            bool plus = is_sym("+");
            lex_.advance();
            e = make(plus ? Op::Add : Op::Sub, e, term());
        }
        return e;
    }

    NodePtr term() {
        NodePtr e = power();
        while (is_sym("*") || is_sym("/")) {
            bool mul = is_sym("*");
            lex_.advance();
            e = make(mul ? Op::Mul : Op::Div, e, power());
        }
        return e;
    }

    NodePtr power() { // right associative
        NodePtr base = unary();
        if (is_sym("^")) {
            lex_.advance();
            return make(Op::Pow, base, power());
        }
        return base;
    }

    NodePtr unary() {
        if (is_sym("-")) {
            lex_.advance();
            return make(Op::Neg, unary());
        }
        if (is_sym("+")) {
            lex_.advance();
            return unary();
        }
        return primary();
    }

    NodePtr primary() {
        const Token& t = lex_.cur();
        if (t.kind == Token::Number) {
            auto n = make(Op::Num);
            const_cast<Expr::Node&>(*n).value = t.num;
            lex_.advance();
            return n;
        }
        if (t.kind == Token::Ident) {
            static const std::map<std::string, Op> fns = {
                {"sin", Op::Sin}, {"cos", Op::Cos},   {"tan", Op::Tan},
                {"exp", Op::Exp}, {"log", Op::Log},   {"sqrt", Op::Sqrt}};
            std::string name = t.text;
            lex_.advance();
            auto fit = fns.find(name);
            if (fit != fns.end()) {
                expect("(");
                NodePtr arg = sum();
                expect(")");
                return make(fit->second, arg);
            }
            auto sit = slots_.find(name);
            if (sit == slots_.end())
                throw ConfigError("expression parse error: unknown identifier '" + name +
                                  "' in '" + text_ + "'");
            auto n = make(Op::Var);
            const_cast<Expr::Node&>(*n).slot = sit->second;
            return n;
        }
        if (is_sym("(")) {
            lex_.advance();
            NodePtr e = sum();
            expect(")");
            return e;
        }
        throw ConfigError("expression parse error: unexpected token '" +
                          (t.kind == Token::End ? std::string("<end>") : t.text) +
                          "' at position " + std::to_string(t.pos) + " in '" + text_ + "'");
    }

    bool is_sym(const char* s) const {
        return lex_.cur().kind == Token::Sym && lex_.cur().text == s;
    }

    void expect(const char* s) {
        if (!is_sym(s))
            throw ConfigError("expression parse error: expected '" + std::string(s) +
                              "' but found '" +
                              (lex_.cur().kind == Token::End ? std::string("<end>")
                                                             : lex_.cur().text) +
                              "' in '" + text_ + "'");
        lex_.advance();
    }

    Lexer lex_;
    std::string text_;
    Expr::VarMap slots_;
};

double eval_node(const Expr::Node& n, const Vec& p) {
    switch (n.op) {
        case Op::Num: return n.value;
        case Op::Var:
            if (n.slot >= p.size())
                throw DimensionError("expression variable slot " + std::to_string(n.slot) +
                                     " exceeds point dimension " + std::to_string(p.size()));
            return p[n.slot];
        case Op::Add: return eval_node(*n.a, p) + eval_node(*n.b, p);
        case Op::Sub: return eval_node(*n.a, p) - eval_node(*n.b, p);
        case Op::Mul: return eval_node(*n.a, p) * eval_node(*n.b, p);
        case Op::Div: return eval_node(*n.a, p) / eval_node(*n.b, p);
        case Op::Pow: return std::pow(eval_node(*n.a, p), eval_node(*n.b, p));
        case Op::Neg: return -eval_node(*n.a, p);
        case Op::Sin: return std::sin(eval_node(*n.a, p));
        case Op::Cos: return std::cos(eval_node(*n.a, p));
        case Op::Tan: return std::tan(eval_node(*n.a, p));
        case Op::Exp: return std::exp(eval_node(*n.a, p));
        case Op::Log: return std::log(eval_node(*n.a, p));
        case Op::Sqrt: return std::sqrt(eval_node(*n.a, p));
    }
    return 0.0;
}

} // namespace

Expr Expr::parse(const std::string& text, const VarMap& vars) {
    Expr e;
    e.text_ = text;
    Parser p(text, vars);
    e.root_ = p.parse();
    return e;
}

double Expr::eval(const Vec& point) const {
    if (!root_) throw ConfigError("evaluating an empty expression");
    return eval_node(*root_, point);
}

Expr::VarMap Expr::chart_vars(int dim) {
    VarMap v;
    for (int i = 0; i < dim; ++i) v["x" + std::to_string(i + 1)] = i;
    const char* aliases[] = {"x", "y", "z", "w"};
    for (int i = 0; i < dim && i < 4; ++i) v[aliases[i]] = i;
    return v;
}

Expr::VarMap Expr::patch_vars(int n) {
    VarMap v;
    for (int i = 0; i < n; ++i) v["t" + std::to_string(i + 1)] = i;
    return v;
}

} // namespace solitonlab
