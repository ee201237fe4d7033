#include "expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace yamabe {

enum class Op { Const, Coord, Add, Sub, Mul, Div, Neg, Exp, Sin, Cos };

struct Expression::Node {
    Op op;
    double value = 0;  // Const
    int axis = 0;      // Coord
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

NodePtr make(Op op, NodePtr l = nullptr, NodePtr r = nullptr) {
    auto n = std::make_shared<Expression::Node>();
    n->op = op;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

NodePtr make_const(double v) {
    auto n = std::make_shared<Expression::Node>();
    n->op = Op::Const;
    n->value = v;
    return n;
}

NodePtr make_coord(int axis) {
    auto n = std::make_shared<Expression::Node>();
    n->op = Op::Coord;
    n->axis = axis;
    return n;
}

struct Parser {
    const std::string& s;
    size_t pos = 0;
    int max_axis = -1;

    [[noreturn]] void fail(const std::string& msg) const {
        throw InvalidInput("expression error at column " + std::to_string(pos + 1) + ": " + msg +
                           " in \"" + s + "\"");
    }

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            skip_ws();
            if (eat('+'))
                lhs = make(Op::Add, lhs, parse_term());
            else if (eat('-'))
                lhs = make(Op::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            skip_ws();
            if (eat('*'))
                lhs = make(Op::Mul, lhs, parse_unary());
            else if (eat('/'))
                lhs = make(Op::Div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    NodePtr parse_unary() {
        skip_ws();
        if (eat('-')) return make(Op::Neg, parse_unary());
        if (eat('+')) return parse_unary();
        return parse_atom();
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos >= s.size()) fail("unexpected end of expression");
        char c = s[pos];
        if (c == '(') {
            ++pos;
            NodePtr e = parse_expr();
            if (!eat(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        const char* begin = s.c_str() + pos;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos += static_cast<size_t>(end - begin);
        return make_const(v);
    }

    NodePtr parse_ident() {
        size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        std::string id = s.substr(start, pos - start);

        if (id == "exp" || id == "sin" || id == "cos") {
            if (!eat('(')) fail("expected '(' after function " + id);
            NodePtr arg = parse_expr();
            if (!eat(')')) fail("expected ')'");
            Op op = id == "exp" ? Op::Exp : id == "sin" ? Op::Sin : Op::Cos;
            return make(op, arg);
        }
        if (id == "pi") return make_const(kPi);

        int axis = -1;
        if (id == "x")
            axis = 0;
        else if (id == "y")
            axis = 1;
        else if (id == "z")
            axis = 2;
        else if (id.size() == 2 && id[0] == 'x' && id[1] >= '1' && id[1] <= '8')
            axis = id[1] - '1';
        if (axis < 0) {
            pos = start;
            fail("unknown identifier '" + id + "'");
        }
        if (axis > max_axis) max_axis = axis;
        return make_coord(axis);
    }
};

double eval_node(const Expression::Node& n, const Vec& p) {
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::Coord: return n.axis < p.n ? p[n.axis] : 0.0;
        case Op::Add: return eval_node(*n.lhs, p) + eval_node(*n.rhs, p);
        case Op::Sub: return eval_node(*n.lhs, p) - eval_node(*n.rhs, p);
        case Op::Mul: return eval_node(*n.lhs, p) * eval_node(*n.rhs, p);
        case Op::Div: return eval_node(*n.lhs, p) / eval_node(*n.rhs, p);
        case Op::Neg: return -eval_node(*n.lhs, p);
        case Op::Exp: return std::exp(eval_node(*n.lhs, p));
        case Op::Sin: return std::sin(eval_node(*n.lhs, p));
        case Op::Cos: return std::cos(eval_node(*n.lhs, p));
    }
    return 0;
}

}  // namespace

Expression Expression::parse(const std::string& text) {
    Parser p{text};
    NodePtr root = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing characters");
    Expression e;
    e.root_ = std::move(root);
    e.text_ = text;
    e.max_axis_ = p.max_axis;
    return e;
}

double Expression::eval(const Vec& p) const {
    if (!root_) throw InvalidInput("expression: eval on empty expression");
    return eval_node(*root_, p);
}

}  // namespace yamabe
