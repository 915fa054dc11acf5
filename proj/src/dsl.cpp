#include "geosolve/dsl.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

#include "geosolve/errors.hpp"
#include "geosolve/math_context.hpp"

namespace geosolve::dsl {
namespace {

constexpr int kMaxNestingDepth = 200;

enum class TokKind { Number, Ident, Return, Plus, Minus, Star, Slash, Assign, LParen, RParen, LBracket, RBracket, Comma, End };

struct Token {
    TokKind kind;
    std::string text;
    double number = 0.0;
    int line;
    int column;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

// Tokenizes one statement line (text after the indent). '#' starts a comment.
std::vector<Token> lex_line(std::string_view text, int line, int col_offset) {
    std::vector<Token> toks;
    std::size_t i = 0;
    auto col = [&](std::size_t at) { return static_cast<int>(at) + col_offset; };
    while (i < text.size()) {
        char c = text[i];
        if (c == ' ' || c == '\t') {
            ++i;
            continue;
        }
        if (c == '#') break;
        if (digit(c) || (c == '.' && i + 1 < text.size() && digit(text[i + 1]))) {
            std::size_t start = i;
            while (i < text.size() && digit(text[i])) ++i;
            if (i < text.size() && text[i] == '.') {
                ++i;
                while (i < text.size() && digit(text[i])) ++i;
            }
            std::string num(text.substr(start, i - start));
            toks.push_back({TokKind::Number, num, std::strtod(num.c_str(), nullptr), line, col(start)});
            continue;
        }
        if (ident_start(c)) {
            std::size_t start = i;
            while (i < text.size() && ident_char(text[i])) ++i;
            std::string word(text.substr(start, i - start));
            if (word == "return")
                toks.push_back({TokKind::Return, word, 0.0, line, col(start)});
            else if (word == "def")
                throw ParseError(line, col(start), "nested definitions are not allowed");
            else
                toks.push_back({TokKind::Ident, word, 0.0, line, col(start)});
            continue;
        }
        TokKind kind;
        switch (c) {
            case '+': kind = TokKind::Plus; break;
            case '-': kind = TokKind::Minus; break;
            case '*': kind = TokKind::Star; break;
            case '/': kind = TokKind::Slash; break;
            case '=': kind = TokKind::Assign; break;
            case '(': kind = TokKind::LParen; break;
            case ')': kind = TokKind::RParen; break;
            case '[': kind = TokKind::LBracket; break;
            case ']': kind = TokKind::RBracket; break;
            case ',': kind = TokKind::Comma; break;
            default:
                throw ParseError(line, col(i), std::string("unknown token '") + c + "'");
        }
        toks.push_back({kind, std::string(1, c), 0.0, line, col(i)});
        ++i;
    }
    toks.push_back({TokKind::End, "", 0.0, line, col(text.size())});
    return toks;
}

class StatementParser {
  public:
    explicit StatementParser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    Statement parse_statement() {
        Statement stmt;
        if (peek().kind == TokKind::Return) {
            Token tok = next();
            stmt.kind = Statement::Kind::Return;
            stmt.line = tok.line;
            stmt.expr = parse_expr(0);
        } else if (peek().kind == TokKind::Ident) {
            Token name = next();
            if (peek().kind != TokKind::Assign)
                throw ParseError(peek().line, peek().column, "expected '=' after identifier");
            next();
            stmt.kind = Statement::Kind::Assign;
            stmt.target = name.text;
            stmt.line = name.line;
            stmt.expr = parse_expr(0);
        } else {
            throw ParseError(peek().line, peek().column,
                             "expected an assignment or a return statement");
        }
        if (peek().kind != TokKind::End)
            throw ParseError(peek().line, peek().column, "unexpected trailing tokens");
        return stmt;
    }

  private:
    const Token& peek() const { return toks_[pos_]; }
    Token next() { return toks_[pos_++]; }

    ExprPtr parse_expr(int depth) {
        check_depth(depth);
        ExprPtr lhs = parse_term(depth + 1);
        while (peek().kind == TokKind::Plus || peek().kind == TokKind::Minus) {
            Token op = next();
            ExprPtr rhs = parse_term(depth + 1);
            lhs = make_binary(op, std::move(lhs), std::move(rhs),
                              op.kind == TokKind::Plus ? BinaryOp::Add : BinaryOp::Sub);
        }
        return lhs;
    }

    ExprPtr parse_term(int depth) {
        check_depth(depth);
        ExprPtr lhs = parse_factor(depth + 1);
        while (peek().kind == TokKind::Star || peek().kind == TokKind::Slash) {
            Token op = next();
            ExprPtr rhs = parse_factor(depth + 1);
            lhs = make_binary(op, std::move(lhs), std::move(rhs),
                              op.kind == TokKind::Star ? BinaryOp::Mul : BinaryOp::Div);
        }
        return lhs;
    }

    ExprPtr parse_factor(int depth) {
        check_depth(depth);
        const Token& tok = peek();
        switch (tok.kind) {
            case TokKind::Number: {
                Token t = next();
                return make_expr(NumberLit{t.number}, t);
            }
            case TokKind::Minus: {
                Token t = next();
                Negate neg{parse_factor(depth + 1)};
                return make_expr(std::move(neg), t);
            }
            case TokKind::LParen: {
                next();
                ExprPtr inner = parse_expr(depth + 1);
                expect(TokKind::RParen, "expected ')'");
                return inner;
            }
            case TokKind::LBracket: {
                Token t = next();
                ListLit list;
                if (peek().kind == TokKind::RBracket)
                    throw ParseError(peek().line, peek().column, "empty list literal");
                list.elements.push_back(parse_expr(depth + 1));
                while (peek().kind == TokKind::Comma) {
                    next();
                    list.elements.push_back(parse_expr(depth + 1));
                }
                expect(TokKind::RBracket, "expected ']'");
                return make_expr(std::move(list), t);
            }
            case TokKind::Ident: {
                Token t = next();
                if (peek().kind == TokKind::LParen) {
                    next();
                    Call call;
                    call.callee = t.text;
                    if (peek().kind != TokKind::RParen) {
                        call.args.push_back(parse_expr(depth + 1));
                        while (peek().kind == TokKind::Comma) {
                            next();
                            call.args.push_back(parse_expr(depth + 1));
                        }
                    }
                    expect(TokKind::RParen, "expected ')' to close the call");
                    return make_expr(std::move(call), t);
                }
                return make_expr(VarRef{t.text}, t);
            }
            default:
                throw ParseError(tok.line, tok.column, "expected an expression");
        }
    }

    void expect(TokKind kind, const char* msg) {
        if (peek().kind != kind) throw ParseError(peek().line, peek().column, msg);
        next();
    }

    void check_depth(int depth) const {
        if (depth > kMaxNestingDepth)
            throw ParseError(peek().line, peek().column, "expression nesting too deep");
    }

    template <typename Node>
    static ExprPtr make_expr(Node&& node, const Token& tok) {
        auto e = std::make_unique<Expr>();
        e->node = std::forward<Node>(node);
        e->line = tok.line;
        e->column = tok.column;
        return e;
    }

    static ExprPtr make_binary(const Token& op, ExprPtr lhs, ExprPtr rhs, BinaryOp kind) {
        auto e = std::make_unique<Expr>();
        e->node = Binary{kind, std::move(lhs), std::move(rhs)};
        e->line = op.line;
        e->column = op.column;
        return e;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

struct Line {
    std::string_view text;
    int number;
};

std::vector<Line> split_lines(std::string_view source) {
    std::vector<Line> lines;
    int number = 1;
    std::size_t start = 0;
    while (start <= source.size()) {
        std::size_t end = source.find('\n', start);
        std::string_view text = (end == std::string_view::npos)
                                    ? source.substr(start)
                                    : source.substr(start, end - start);
        if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
        lines.push_back({text, number});
        if (end == std::string_view::npos) break;
        start = end + 1;
        ++number;
    }
    return lines;
}

bool blank_or_comment(std::string_view text) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (c == ' ' || c == '\t') continue;
        return c == '#';
    }
    return true;
}

std::string_view trim_right(std::string_view s) {
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

}  // namespace

SolutionProgram parse(std::string_view source) {
    auto lines = split_lines(source);
    std::size_t idx = 0;
    while (idx < lines.size() && blank_or_comment(lines[idx].text)) ++idx;
    if (idx == lines.size())
        throw ParseError(1, 1, "empty program; expected 'def solution():'");

    {
        std::string_view header = lines[idx].text;
        auto hash = header.find('#');
        if (hash != std::string_view::npos) header = header.substr(0, hash);
        header = trim_right(header);
        if (header != "def solution():")
            throw ParseError(lines[idx].number, 1,
                             "bad header; expected exactly 'def solution():'");
    }
    ++idx;

    SolutionProgram program;
    program.source = std::string(source);
    bool returned = false;
    for (; idx < lines.size(); ++idx) {
        const Line& line = lines[idx];
        if (blank_or_comment(line.text)) continue;
        std::string_view text = line.text;
        int indent_width;
        if (text.substr(0, 4) == "    ")
            indent_width = 4;
        else if (text[0] == '\t')
            indent_width = 1;  // a tab counts as the four-space indent
        else
            throw ParseError(line.number, 1, "body lines must be indented with four spaces");
        std::string_view stmt_text = text.substr(indent_width);
        if (!stmt_text.empty() && (stmt_text[0] == ' ' || stmt_text[0] == '\t'))
            throw ParseError(line.number, indent_width + 1,
                             "unexpected extra indentation; no nested blocks exist");
        if (returned)
            throw ParseError(line.number, indent_width + 1, "statement after return");
        StatementParser parser(lex_line(stmt_text, line.number, indent_width + 1));
        Statement stmt = parser.parse_statement();
        if (stmt.kind == Statement::Kind::Return) returned = true;
        program.body.push_back(std::move(stmt));
    }
    if (!returned) {
        int last = lines.empty() ? 1 : lines.back().number;
        throw ParseError(last, 1, "missing return statement");
    }
    return program;
}

namespace {

void collect_calls(const Expr& expr, std::vector<std::string>& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Negate>) {
                collect_calls(*node.operand, out);
            } else if constexpr (std::is_same_v<T, Binary>) {
                collect_calls(*node.lhs, out);
                collect_calls(*node.rhs, out);
            } else if constexpr (std::is_same_v<T, Call>) {
                for (const auto& arg : node.args) collect_calls(*arg, out);
                out.push_back(node.callee);
            } else if constexpr (std::is_same_v<T, ListLit>) {
                for (const auto& el : node.elements) collect_calls(*el, out);
            }
        },
        expr.node);
}

int precedence(const Expr& expr) {
    return std::visit(
        [](const auto& node) -> int {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Binary>)
                return (node.op == BinaryOp::Add || node.op == BinaryOp::Sub) ? 1 : 2;
            else if constexpr (std::is_same_v<T, Negate>)
                return 3;
            else
                return 4;
        },
        expr.node);
}

void print_expr(const Expr& expr, std::string& out);

void print_child(const Expr& child, int parent_prec, bool is_right, std::string& out) {
    int child_prec = precedence(child);
    bool parens = is_right ? child_prec <= parent_prec : child_prec < parent_prec;
    if (parens) out += '(';
    print_expr(child, out);
    if (parens) out += ')';
}

void print_expr(const Expr& expr, std::string& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, NumberLit>) {
                out += render_shortest(node.value);
            } else if constexpr (std::is_same_v<T, VarRef>) {
                out += node.name;
            } else if constexpr (std::is_same_v<T, Negate>) {
                out += '-';
                print_child(*node.operand, 2, true, out);
            } else if constexpr (std::is_same_v<T, Binary>) {
                int prec = (node.op == BinaryOp::Add || node.op == BinaryOp::Sub) ? 1 : 2;
                print_child(*node.lhs, prec, false, out);
                switch (node.op) {
                    case BinaryOp::Add: out += " + "; break;
                    case BinaryOp::Sub: out += " - "; break;
                    case BinaryOp::Mul: out += " * "; break;
                    case BinaryOp::Div: out += " / "; break;
                }
                print_child(*node.rhs, prec, true, out);
            } else if constexpr (std::is_same_v<T, Call>) {
                out += node.callee;
                out += '(';
                for (std::size_t i = 0; i < node.args.size(); ++i) {
                    if (i) out += ", ";
                    print_expr(*node.args[i], out);
                }
                out += ')';
            } else if constexpr (std::is_same_v<T, ListLit>) {
                out += '[';
                for (std::size_t i = 0; i < node.elements.size(); ++i) {
                    if (i) out += ", ";
                    print_expr(*node.elements[i], out);
                }
                out += ']';
            }
        },
        expr.node);
}

bool expr_equal(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(
        [&](const auto& na) -> bool {
            using T = std::decay_t<decltype(na)>;
            const auto& nb = std::get<T>(b.node);
            if constexpr (std::is_same_v<T, NumberLit>) {
                return na.value == nb.value;
            } else if constexpr (std::is_same_v<T, VarRef>) {
                return na.name == nb.name;
            } else if constexpr (std::is_same_v<T, Negate>) {
                return expr_equal(*na.operand, *nb.operand);
            } else if constexpr (std::is_same_v<T, Binary>) {
                return na.op == nb.op && expr_equal(*na.lhs, *nb.lhs) &&
                       expr_equal(*na.rhs, *nb.rhs);
            } else if constexpr (std::is_same_v<T, Call>) {
                if (na.callee != nb.callee || na.args.size() != nb.args.size()) return false;
                for (std::size_t i = 0; i < na.args.size(); ++i)
                    if (!expr_equal(*na.args[i], *nb.args[i])) return false;
                return true;
            } else if constexpr (std::is_same_v<T, ListLit>) {
                if (na.elements.size() != nb.elements.size()) return false;
                for (std::size_t i = 0; i < na.elements.size(); ++i)
                    if (!expr_equal(*na.elements[i], *nb.elements[i])) return false;
                return true;
            }
        },
        a.node);
}

}  // namespace

std::vector<std::string> list_calls(const SolutionProgram& program) {
    std::vector<std::string> calls;
    for (const auto& stmt : program.body) collect_calls(*stmt.expr, calls);
    return calls;
}

std::string to_source(const SolutionProgram& program) {
    std::string out = "def solution():\n";
    for (const auto& stmt : program.body) {
        out += "    ";
        if (stmt.kind == Statement::Kind::Assign) {
            out += stmt.target;
            out += " = ";
        } else {
            out += "return ";
        }
        print_expr(*stmt.expr, out);
        out += '\n';
    }
    return out;
}

bool structurally_equal(const SolutionProgram& a, const SolutionProgram& b) {
    if (a.body.size() != b.body.size()) return false;
    for (std::size_t i = 0; i < a.body.size(); ++i) {
        const auto& sa = a.body[i];
        const auto& sb = b.body[i];
        if (sa.kind != sb.kind || sa.target != sb.target) return false;
        if (!expr_equal(*sa.expr, *sb.expr)) return false;
    }
    return true;
}

}  // namespace geosolve::dsl
