#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "locmat/element.hpp"

namespace locmat {

/// Per-invocation configuration: ground field, site shape and the seed for
/// the solver's deterministic random stage.
struct SessionConfig {
    FieldSpec field = FieldSpec::rationals();
    SiteShape shape = SiteShape(2);
    std::uint64_t seed = 0;
};

/// Expression tree for the element grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor ('*' factor)*
///   factor := scalar | 'id' | 'e[' nat '](' nat ',' nat ')' | '(' expr ')'
///   scalar := ['-'] nat ['/' nat]
struct ExprAst {
    enum class Kind { Scalar, Unit, MatrixUnit, Add, Sub, Mul };
    Kind kind = Kind::Unit;
    std::string num, den;   // scalar literal pieces ("-" folded into num)
    int site = 0, p = 0, q = 0;
    std::vector<ExprAst> children;
    int line = 1, col = 1;
};

/// Parses the grammar above; SyntaxError carries line/column.
ExprAst parse_element(const std::string& text);

/// Evaluates under the session shape; IndexOutOfRange when a matrix-unit
/// label exceeds the site size.
Element eval_ast(const ExprAst& ast, const SessionConfig& config);

Element parse_eval(const std::string& text, const SessionConfig& config);

} // namespace locmat
