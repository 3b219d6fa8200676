#include "locmat/parser.hpp"

#include <cctype>

namespace locmat {

namespace {

struct Cursor {
    const std::string& text;
    size_t pos = 0;
    int line = 1, col = 1;

    explicit Cursor(const std::string& t) : text(t) {}

    bool eof() const { return pos >= text.size(); }
    char peek() const { return eof() ? '\0' : text[pos]; }

    char advance() {
        char c = text[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }

    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) advance();
    }

    [[noreturn]] void error(const std::string& what) const {
        fail(Errc::SyntaxError,
             what + " at line " + std::to_string(line) + ", column " + std::to_string(col));
    }
};

class Parser {
public:
    explicit Parser(const std::string& text) : cur_(text) {}

    ExprAst parse() {
        ExprAst e = expr();
        cur_.skip_ws();
        if (!cur_.eof()) cur_.error("unexpected trailing input");
        return e;
    }

private:
    Cursor cur_;

    ExprAst expr() {
        ExprAst lhs = term();
        while (true) {
            cur_.skip_ws();
            char c = cur_.peek();
            if (c != '+' && c != '-') return lhs;
            int line = cur_.line, col = cur_.col;
            cur_.advance();
            ExprAst rhs = term();
            ExprAst node;
            node.kind = c == '+' ? ExprAst::Kind::Add : ExprAst::Kind::Sub;
            node.line = line;
            node.col = col;
            node.children = {std::move(lhs), std::move(rhs)};
            lhs = std::move(node);
        }
    }

    ExprAst term() {
        ExprAst lhs = factor();
        while (true) {
            cur_.skip_ws();
            if (cur_.peek() != '*') return lhs;
            int line = cur_.line, col = cur_.col;
            cur_.advance();
            ExprAst rhs = factor();
            ExprAst node;
            node.kind = ExprAst::Kind::Mul;
            node.line = line;
            node.col = col;
            node.children = {std::move(lhs), std::move(rhs)};
            lhs = std::move(node);
        }
    }

    ExprAst factor() {
        cur_.skip_ws();
        if (cur_.eof()) cur_.error("expected a factor");
        char c = cur_.peek();
        if (c == '(') {
            cur_.advance();
            ExprAst inner = expr();
            cur_.skip_ws();
            expect(')');
            return inner;
        }
        if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) return scalar();
        if (c == 'i') return unit();
        if (c == 'e') return matrix_unit();
        cur_.error("expected a scalar, 'id', 'e[...](...)' or '('");
    }

    ExprAst scalar() {
        ExprAst node;
        node.kind = ExprAst::Kind::Scalar;
        node.line = cur_.line;
        node.col = cur_.col;
        std::string num;
        if (cur_.peek() == '-') {
            num += cur_.advance();
            cur_.skip_ws();
        }
        num += nat();
        node.num = std::move(num);
        cur_.skip_ws();
        if (cur_.peek() == '/') {
            cur_.advance();
            cur_.skip_ws();
            node.den = nat();
        }
        return node;
    }

    ExprAst unit() {
        ExprAst node;
        node.kind = ExprAst::Kind::Unit;
        node.line = cur_.line;
        node.col = cur_.col;
        expect('i');
        expect('d');
        return node;
    }

    ExprAst matrix_unit() {
        ExprAst node;
        node.kind = ExprAst::Kind::MatrixUnit;
        node.line = cur_.line;
        node.col = cur_.col;
        expect('e');
        expect('[');
        cur_.skip_ws();
        node.site = nat_int();
        cur_.skip_ws();
        expect(']');
        expect('(');
        cur_.skip_ws();
        node.p = nat_int();
        cur_.skip_ws();
        expect(',');
        cur_.skip_ws();
        node.q = nat_int();
        cur_.skip_ws();
        expect(')');
        return node;
    }

    std::string nat() {
        if (!std::isdigit(static_cast<unsigned char>(cur_.peek()))) cur_.error("expected a number");
        std::string digits;
        while (std::isdigit(static_cast<unsigned char>(cur_.peek()))) digits += cur_.advance();
        return digits;
    }

    int nat_int() {
        std::string digits = nat();
        if (digits.size() > 9) cur_.error("index literal too large");
        return std::stoi(digits);
    }

    void expect(char c) {
        if (cur_.peek() != c) cur_.error(std::string("expected '") + c + "'");
        cur_.advance();
    }
};

} // namespace

ExprAst parse_element(const std::string& text) { return Parser(text).parse(); }

Element eval_ast(const ExprAst& ast, const SessionConfig& config) {
    switch (ast.kind) {
    case ExprAst::Kind::Scalar: {
        std::string lit = ast.num;
        if (!ast.den.empty()) lit += "/" + ast.den;
        Scalar c = Scalar::from_string(config.field, lit);
        return Element::one(config.field, config.shape).scale(c);
    }
    case ExprAst::Kind::Unit:
        return Element::one(config.field, config.shape);
    case ExprAst::Kind::MatrixUnit: {
        const int n = config.shape.size(ast.site);
        if (ast.p < 1 || ast.p > n || ast.q < 1 || ast.q > n)
            fail(Errc::IndexOutOfRange, "matrix-unit label (" + std::to_string(ast.p) + "," + std::to_string(ast.q) +
                                            ") out of range for site " + std::to_string(ast.site) + " of size " +
                                            std::to_string(n));
        return Element::matrix_unit(config.field, config.shape, ast.site, ast.p, ast.q);
    }
    case ExprAst::Kind::Add:
        return eval_ast(ast.children[0], config).add(eval_ast(ast.children[1], config));
    case ExprAst::Kind::Sub:
        return eval_ast(ast.children[0], config).sub(eval_ast(ast.children[1], config));
    case ExprAst::Kind::Mul:
        return eval_ast(ast.children[0], config).mul(eval_ast(ast.children[1], config));
    }
    fail(Errc::SyntaxError, "malformed expression tree");
}

Element parse_eval(const std::string& text, const SessionConfig& config) {
    return eval_ast(parse_element(text), config);
}

} // namespace locmat
