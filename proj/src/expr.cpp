#include "kfield/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace kfield {

Chart::Chart(int dim) : n(dim) {
    if (dim < 1) throw DimensionError("chart: dimension must be positive");
    for (int i = 1; i <= dim; ++i) names.push_back("q" + std::to_string(i));
}

Chart::Chart(int dim, std::vector<std::string> coord_names) : n(dim), names(std::move(coord_names)) {
    if (dim < 1) throw DimensionError("chart: dimension must be positive");
    if (static_cast<int>(names.size()) != dim) throw DimensionError("chart: name count differs from dimension");
    for (int i = 0; i < dim; ++i)
        for (int j = i + 1; j < dim; ++j)
            if (names[i] == names[j]) throw DimensionError("chart: duplicate coordinate name " + names[i]);
}

int Chart::index_of(const std::string& name) const {
    for (int i = 0; i < n; ++i)
        if (names[i] == name) return i;
    return -1;
}

namespace detail {

double call_fn(const std::string& name, double x) {
    if (name == "sin") return std::sin(x);
    if (name == "cos") return std::cos(x);
    if (name == "tan") {
        if (std::cos(x) == 0.0) throw DomainError("tan: pole");
        return std::tan(x);
    }
    if (name == "exp") return std::exp(x);
    if (name == "log") {
        if (x <= 0.0) throw DomainError("log: non-positive argument");
        return std::log(x);
    }
    if (name == "sqrt") {
        if (x < 0.0) throw DomainError("sqrt: negative argument");
        return std::sqrt(x);
    }
    if (name == "sinh") return std::sinh(x);
    if (name == "cosh") return std::cosh(x);
    if (name == "reciprocal") {
        if (x == 0.0) throw DomainError("reciprocal: zero argument");
        return 1.0 / x;
    }
    throw DomainError("unknown function '" + name + "'");
}

bool known_fn(const std::string& name) {
    static const char* fns[] = {"sin", "cos", "tan", "exp", "log", "sqrt", "sinh", "cosh", "reciprocal"};
    for (const char* f : fns)
        if (name == f) return true;
    return false;
}

}  // namespace detail

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr make_node(ExprNode nd) { return std::make_shared<const ExprNode>(std::move(nd)); }

NodePtr binary(ExprKind kind, NodePtr a, NodePtr b) {
    ExprNode nd;
    nd.kind = kind;
    nd.a = std::move(a);
    nd.b = std::move(b);
    return make_node(std::move(nd));
}

class Parser {
public:
    Parser(const std::string& text, const Chart& chart, int velocity_slots)
        : s_(text), chart_(chart), vel_slots_(velocity_slots) {}

    NodePtr run() {
        skip_ws();
        if (eof()) throw ParseError("empty expression", 0);
        NodePtr e = parse_sum();
        skip_ws();
        if (!eof()) throw ParseError("unexpected trailing input", pos_);
        return e;
    }

private:
    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return eof() ? '\0' : s_[pos_]; }
    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip_ws();
        if (!eof() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c, const char* what) {
        if (!accept(c)) throw ParseError(std::string("expected ") + what, pos_);
    }

    NodePtr parse_sum() {
        NodePtr e = parse_product();
        for (;;) {
            if (accept('+'))
                e = binary(ExprKind::Add, e, parse_product());
            else if (accept('-'))
                e = binary(ExprKind::Sub, e, parse_product());
            else
                return e;
        }
    }

    NodePtr parse_product() {
        NodePtr e = parse_unary();
        for (;;) {
            if (accept('*'))
                e = binary(ExprKind::Mul, e, parse_unary());
            else if (accept('/'))
                e = binary(ExprKind::Div, e, parse_unary());
            else
                return e;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) {
            ExprNode nd;
            nd.kind = ExprKind::Neg;
            nd.a = parse_unary();
            return make_node(std::move(nd));
        }
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        skip_ws();
        if (accept('^')) {
            skip_ws();
            size_t at = pos_;
            bool neg = accept('-');
            skip_ws();
            if (eof() || !std::isdigit(static_cast<unsigned char>(peek())))
                throw ParseError("exponent must be an integer literal", pos_);
            size_t start = pos_;
            while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
            if (!eof() && peek() == '.') throw ParseError("exponent must be an integer literal", at);
            int e = std::stoi(s_.substr(start, pos_ - start));
            ExprNode nd;
            nd.kind = ExprKind::Pow;
            nd.exponent = neg ? -e : e;
            nd.a = std::move(base);
            return make_node(std::move(nd));
        }
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (eof()) throw ParseError("expected operand", pos_);
        char c = peek();
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_sum();
            expect(')', "')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        throw ParseError("expected operand", pos_);
    }

    NodePtr parse_number() {
        size_t start = pos_;
        while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.')) ++pos_;
        if (!eof() && (peek() == 'e' || peek() == 'E')) {
            ++pos_;
            if (!eof() && (peek() == '+' || peek() == '-')) ++pos_;
            while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        }
        ExprNode nd;
        nd.kind = ExprKind::Literal;
        try {
            nd.literal = std::stod(s_.substr(start, pos_ - start));
        } catch (const std::exception&) {
            throw ParseError("malformed number", start);
        }
        return make_node(std::move(nd));
    }

    int parse_int_arg() {
        skip_ws();
        size_t start = pos_;
        while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (pos_ == start) throw ParseError("expected integer index", pos_);
        return std::stoi(s_.substr(start, pos_ - start));
    }

    NodePtr parse_identifier() {
        size_t start = pos_;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
        std::string name = s_.substr(start, pos_ - start);
        if (name == "qd") {
            if (vel_slots_ <= 0) throw ParseError("velocity variables are not allowed here", start);
            expect('(', "'(' after qd");
            int i = parse_int_arg();
            expect(',', "','");
            int a = parse_int_arg();
            expect(')', "')'");
            if (i < 1 || i > chart_.n) throw ParseError("velocity coordinate index out of range", start);
            if (a < 1 || a > vel_slots_) throw ParseError("velocity parameter index out of range", start);
            ExprNode nd;
            nd.kind = ExprKind::Vel;
            nd.vel_i = i - 1;
            nd.vel_alpha = a - 1;
            return make_node(std::move(nd));
        }
        skip_ws();
        if (!eof() && peek() == '(') {
            if (!detail::known_fn(name)) throw ParseError("unknown function '" + name + "'", start);
            ++pos_;
            NodePtr arg = parse_sum();
            expect(')', "')'");
            ExprNode nd;
            nd.kind = ExprKind::Call;
            nd.fn = name;
            nd.a = std::move(arg);
            return make_node(std::move(nd));
        }
        int idx = chart_.index_of(name);
        if (idx < 0) throw ParseError("unknown identifier '" + name + "'", start);
        ExprNode nd;
        nd.kind = ExprKind::Coord;
        nd.coord = idx;
        return make_node(std::move(nd));
    }

    const std::string& s_;
    const Chart& chart_;
    int vel_slots_;
    size_t pos_ = 0;
};

void print_node(const ExprNode& nd, std::ostringstream& os) {
    switch (nd.kind) {
        case ExprKind::Literal: {
            os << nd.literal;
            break;
        }
        case ExprKind::Coord:
            os << "q" << (nd.coord + 1);
            break;
        case ExprKind::Vel:
            os << "qd(" << (nd.vel_i + 1) << "," << (nd.vel_alpha + 1) << ")";
            break;
        case ExprKind::Neg:
            os << "-(";
            print_node(*nd.a, os);
            os << ")";
            break;
        case ExprKind::Add:
        case ExprKind::Sub:
        case ExprKind::Mul:
        case ExprKind::Div: {
            char op = nd.kind == ExprKind::Add ? '+' : nd.kind == ExprKind::Sub ? '-' : nd.kind == ExprKind::Mul ? '*' : '/';
            os << "(";
            print_node(*nd.a, os);
            os << op;
            print_node(*nd.b, os);
            os << ")";
            break;
        }
        case ExprKind::Pow:
            os << "(";
            print_node(*nd.a, os);
            os << ")^";
            if (nd.exponent < 0) os << "(" << nd.exponent << ")";
            else os << nd.exponent;
            break;
        case ExprKind::Call:
            os << nd.fn << "(";
            print_node(*nd.a, os);
            os << ")";
            break;
    }
}

}  // namespace

Expr Expr::parse(const std::string& text, const Chart& chart, int velocity_slots) {
    Parser p(text, chart, velocity_slots);
    return Expr(p.run());
}

Expr Expr::literal(double v) {
    ExprNode nd;
    nd.kind = ExprKind::Literal;
    nd.literal = v;
    return Expr(make_node(std::move(nd)));
}

Expr Expr::coordinate(int i) {
    ExprNode nd;
    nd.kind = ExprKind::Coord;
    nd.coord = i;
    return Expr(make_node(std::move(nd)));
}

std::string Expr::str() const {
    std::ostringstream os;
    os.precision(17);
    if (root_) print_node(*root_, os);
    return os.str();
}

bool Expr::uses_velocities() const {
    if (!root_) return false;
    std::vector<const ExprNode*> stack{root_.get()};
    while (!stack.empty()) {
        const ExprNode* nd = stack.back();
        stack.pop_back();
        if (nd->kind == ExprKind::Vel) return true;
        if (nd->a) stack.push_back(nd->a.get());
        if (nd->b) stack.push_back(nd->b.get());
    }
    return false;
}

bool tree_equal(const Expr& a, const Expr& b) {
    std::function<bool(const ExprNode*, const ExprNode*)> eq = [&](const ExprNode* x, const ExprNode* y) {
        if (!x || !y) return x == y;
        if (x->kind != y->kind) return false;
        if (x->kind == ExprKind::Literal && x->literal != y->literal) return false;
        if (x->coord != y->coord || x->vel_i != y->vel_i || x->vel_alpha != y->vel_alpha) return false;
        if (x->exponent != y->exponent || x->fn != y->fn) return false;
        return eq(x->a.get(), y->a.get()) && eq(x->b.get(), y->b.get());
    };
    return eq(a.root(), b.root());
}

double eval_real(const Expr& e, const Eigen::VectorXd& q) {
    EvalEnv<double> env;
    env.coords.assign(q.data(), q.data() + q.size());
    return e.eval(env);
}

double eval_real(const Expr& e, const Eigen::VectorXd& q, const Eigen::MatrixXd& qdot) {
    EvalEnv<double> env;
    env.coords.assign(q.data(), q.data() + q.size());
    env.vels.resize(q.size());
    for (int i = 0; i < q.size(); ++i)
        for (int a = 0; a < qdot.cols(); ++a) env.vels[i].push_back(qdot(i, a));
    return e.eval(env);
}

}  // namespace kfield
