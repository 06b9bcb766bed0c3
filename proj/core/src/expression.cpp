#include "lifsel/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace lifsel {

struct Expression::Node {
    enum class Kind { Constant, Variable, Negate, Binary, Call };
    Kind kind = Kind::Constant;
    double value = 0.0;
    std::size_t variable = 0;
    std::string op;
    std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make_constant(double v)
{
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Constant;
    n->value = v;
    return n;
}

NodePtr make_op(Node::Kind kind, std::string op, std::vector<NodePtr> args)
{
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->op = std::move(op);
    n->args = std::move(args);
    return n;
}

struct FunctionInfo {
    std::string_view name;
    std::size_t arity;
};

constexpr FunctionInfo kFunctions[] = {
    {"abs", 1}, {"sin", 1}, {"cos", 1}, {"tan", 1}, {"exp", 1}, {"log", 1},
    {"sqrt", 1}, {"floor", 1}, {"ceil", 1}, {"sign", 1}, {"min", 2}, {"max", 2},
    {"pow", 2},
};

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse_all()
    {
        auto root = comparison();
        skip_space();
        if (pos_ != text_.size())
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return root;
    }

    std::size_t arity() const { return arity_; }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw std::invalid_argument("expression \"" + std::string(text_) + "\": " + what +
                                    " at position " + std::to_string(pos_));
    }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(std::string_view token)
    {
        skip_space();
        if (text_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    NodePtr comparison()
    {
        auto lhs = additive();
        for (std::string_view op : {"<=", ">=", "==", "!=", "<", ">"}) {
            if (accept(op))
                return make_op(Node::Kind::Binary, std::string(op), {lhs, additive()});
        }
        return lhs;
    }

    NodePtr additive()
    {
        auto lhs = term();
        for (;;) {
            if (accept("+"))
                lhs = make_op(Node::Kind::Binary, "+", {lhs, term()});
            else if (accept("-"))
                lhs = make_op(Node::Kind::Binary, "-", {lhs, term()});
            else
                return lhs;
        }
    }

    NodePtr term()
    {
        auto lhs = unary();
        for (;;) {
            if (accept("*"))
                lhs = make_op(Node::Kind::Binary, "*", {lhs, unary()});
            else if (accept("/"))
                lhs = make_op(Node::Kind::Binary, "/", {lhs, unary()});
            else
                return lhs;
        }
    }

    NodePtr unary()
    {
        if (accept("-"))
            return make_op(Node::Kind::Negate, "-", {unary()});
        if (accept("+"))
            return unary();
        return power();
    }

    NodePtr power()
    {
        auto base = primary();
        if (accept("^"))
            return make_op(Node::Kind::Binary, "^", {base, unary()});
        return base;
    }

    NodePtr primary()
    {
        skip_space();
        if (pos_ >= text_.size())
            fail("unexpected end of input");
        char c = text_[pos_];
        if (accept("(")) {
            auto inner = comparison();
            if (!accept(")"))
                fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return number();
        if (std::isalpha(static_cast<unsigned char>(c)))
            return identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr number()
    {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
            ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
                ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    ++pos_;
            } else {
                pos_ = save;
            }
        }
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (ec != std::errc() || ptr != text_.data() + pos_) {
            pos_ = start;
            fail("malformed number");
        }
        return make_constant(v);
    }

    NodePtr identifier()
    {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
            ++pos_;
        std::string_view name = text_.substr(start, pos_ - start);

        if (name == "pi")
            return make_constant(std::numbers::pi);
        if (name == "e")
            return make_constant(std::numbers::e);
        if (name == "x" || (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '9')) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Variable;
            n->variable = name.size() == 1 ? 0 : static_cast<std::size_t>(name[1] - '1');
            arity_ = std::max(arity_, n->variable + 1);
            return n;
        }
        for (const auto& f : kFunctions) {
            if (f.name != name)
                continue;
            if (!accept("("))
                fail("expected '(' after " + std::string(name));
            std::vector<NodePtr> args;
            args.push_back(comparison());
            while (accept(","))
                args.push_back(comparison());
            if (!accept(")"))
                fail("expected ')'");
            if (args.size() != f.arity)
                fail(std::string(name) + " takes " + std::to_string(f.arity) + " argument(s)");
            return make_op(Node::Kind::Call, std::string(name), std::move(args));
        }
        pos_ = start;
        fail("unknown identifier '" + std::string(name) + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t arity_ = 0;
};

double eval_node(const Node& n, std::span<const double> vars)
{
    switch (n.kind) {
    case Node::Kind::Constant:
        return n.value;
    case Node::Kind::Variable:
        if (n.variable >= vars.size())
            throw std::out_of_range("expression reads x" + std::to_string(n.variable + 1) +
                                    " but the point has " + std::to_string(vars.size()) +
                                    " coordinate(s)");
        return vars[n.variable];
    case Node::Kind::Negate:
        return -eval_node(*n.args[0], vars);
    case Node::Kind::Binary: {
        double a = eval_node(*n.args[0], vars);
        double b = eval_node(*n.args[1], vars);
        const std::string& op = n.op;
        if (op == "+") return a + b;
        if (op == "-") return a - b;
        if (op == "*") return a * b;
        if (op == "/") return a / b;
        if (op == "^") return std::pow(a, b);
        if (op == "<") return a < b ? 1.0 : 0.0;
        if (op == "<=") return a <= b ? 1.0 : 0.0;
        if (op == ">") return a > b ? 1.0 : 0.0;
        if (op == ">=") return a >= b ? 1.0 : 0.0;
        if (op == "==") return a == b ? 1.0 : 0.0;
        return a != b ? 1.0 : 0.0;
    }
    case Node::Kind::Call: {
        double a = eval_node(*n.args[0], vars);
        const std::string& f = n.op;
        if (f == "abs") return std::abs(a);
        if (f == "sin") return std::sin(a);
        if (f == "cos") return std::cos(a);
        if (f == "tan") return std::tan(a);
        if (f == "exp") return std::exp(a);
        if (f == "log") return std::log(a);
        if (f == "sqrt") return std::sqrt(a);
        if (f == "floor") return std::floor(a);
        if (f == "ceil") return std::ceil(a);
        if (f == "sign") return static_cast<double>((a > 0) - (a < 0));
        double b = eval_node(*n.args[1], vars);
        if (f == "min") return std::min(a, b);
        if (f == "max") return std::max(a, b);
        return std::pow(a, b);
    }
    }
    return 0.0;
}

} // namespace

Expression::Expression(std::shared_ptr<const Node> root, std::size_t arity, std::string source)
    : root_(std::move(root)), arity_(arity), source_(std::move(source))
{}

Expression Expression::parse(std::string_view text)
{
    Parser parser(text);
    auto root = parser.parse_all();
    return Expression(std::move(root), parser.arity(), std::string(text));
}

double Expression::evaluate(std::span<const double> vars) const
{
    return eval_node(*root_, vars);
}

double Expression::evaluate(double x) const
{
    return eval_node(*root_, std::span<const double>(&x, 1));
}

double evaluate_constant(std::string_view text)
{
    auto expr = Expression::parse(text);
    if (expr.arity() != 0)
        throw std::invalid_argument("\"" + std::string(text) + "\" is not a constant");
    double v = expr.evaluate(std::span<const double>{});
    if (!std::isfinite(v))
        throw std::invalid_argument("\"" + std::string(text) + "\" is not finite");
    return v;
}

} // namespace lifsel
