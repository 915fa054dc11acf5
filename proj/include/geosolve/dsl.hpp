#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace geosolve::dsl {

// AST of the restricted solution language:
//
//   program   := "def solution():" NEWLINE body
//   body      := (INDENT statement NEWLINE)+
//   statement := IDENT "=" expr | "return" expr
//   expr      := term (("+"|"-") term)*
//   term      := factor (("*"|"/") factor)*
//   factor    := NUMBER | IDENT | IDENT "(" arglist? ")" | "(" expr ")"
//              | "-" factor | "[" arglist "]"
//   arglist   := expr ("," expr)*
//
// Body lines are indented with four spaces (a tab counts the same). Comments
// run from '#' to end of line. Anything outside this grammar is a parse
// failure; there are no loops, conditionals, imports, or string literals.

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

enum class BinaryOp { Add, Sub, Mul, Div };

struct NumberLit {
    double value;
};
struct VarRef {
    std::string name;
};
struct Negate {
    ExprPtr operand;
};
struct Binary {
    BinaryOp op;
    ExprPtr lhs;
    ExprPtr rhs;
};
struct Call {
    std::string callee;
    std::vector<ExprPtr> args;
};
struct ListLit {
    std::vector<ExprPtr> elements;
};

struct Expr {
    std::variant<NumberLit, VarRef, Negate, Binary, Call, ListLit> node;
    int line = 0;
    int column = 0;
};

struct Statement {
    enum class Kind { Assign, Return };
    Kind kind;
    std::string target;  // Assign only
    ExprPtr expr;
    int line = 0;
};

struct SolutionProgram {
    std::vector<Statement> body;  // ends with exactly one Return
    std::string source;
};

// Parses `source` into an AST. Throws ParseError (SyntaxError class) with
// line/column on any input outside the grammar: bad header, unknown token,
// unbalanced parentheses, missing return, statements after return. Never
// crashes on arbitrary bytes; nesting depth is bounded.
SolutionProgram parse(std::string_view source);

// Every Call node's name in evaluation order (arguments before the call
// itself), duplicates preserved.
std::vector<std::string> list_calls(const SolutionProgram& program);

// Canonical source text; reparsing it yields a structurally identical AST.
std::string to_source(const SolutionProgram& program);

bool structurally_equal(const SolutionProgram& a, const SolutionProgram& b);

}  // namespace geosolve::dsl
