#pragma once

#include <memory>
#include <string>
#include <vector>

#include "kfield/jets.hpp"

namespace kfield {

/// Coordinate chart: dimension plus coordinate names (default q1..qn).
struct Chart {
    Chart() = default;
    explicit Chart(int dim);
    Chart(int dim, std::vector<std::string> coord_names);

    int n = 0;
    std::vector<std::string> names;

    int index_of(const std::string& name) const;  // -1 when absent
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, size_t offset_)
        : std::runtime_error(msg + " (offset " + std::to_string(offset_) + ")"), offset(offset_) {}
    size_t offset;
};

enum class ExprKind { Literal, Coord, Vel, Neg, Add, Sub, Mul, Div, Pow, Call };

struct ExprNode {
    ExprKind kind;
    double literal = 0.0;
    int coord = -1;           // Coord: coordinate index
    int vel_i = -1;           // Vel: coordinate index
    int vel_alpha = -1;       // Vel: parameter slot
    int exponent = 0;         // Pow: integer exponent
    std::string fn;           // Call: function name
    std::shared_ptr<const ExprNode> a, b;
};

/// Evaluation environment generic over the scalar system: plain doubles or
/// jets, uniformly one kind per evaluation.
template <class S>
struct EvalEnv {
    std::vector<S> coords;             // size n
    std::vector<std::vector<S>> vels;  // n x k, may be empty
};

namespace detail {

inline double make_scalar(const std::vector<double>& coords, double c) {
    (void)coords;
    return c;
}
inline Jet make_scalar(const std::vector<Jet>& coords, double c) {
    return Jet::constant(coords.at(0).generators(), coords.at(0).order(), c);
}
double call_fn(const std::string& name, double x);

}  // namespace detail

/// Parsed expression tree over a chart. Immutable; evaluation is pure.
class Expr {
public:
    Expr() = default;
    explicit Expr(std::shared_ptr<const ExprNode> root) : root_(std::move(root)) {}

    /// Parse with standard precedence (^ above unary minus above mul/div
    /// above add/sub), left associative except ^ (right). Velocity
    /// references qd(i,a) are accepted only when velocity_slots > 0.
    static Expr parse(const std::string& text, const Chart& chart, int velocity_slots = 0);

    static Expr literal(double v);
    static Expr coordinate(int i);

    bool valid() const { return root_ != nullptr; }
    const ExprNode* root() const { return root_.get(); }
    std::string str() const;
    bool uses_velocities() const;

    template <class S>
    S eval(const EvalEnv<S>& env) const {
        if (!root_) throw DomainError("eval of empty expression");
        return eval_node(*root_, env);
    }

private:
    template <class S>
    static S eval_node(const ExprNode& nd, const EvalEnv<S>& env) {
        switch (nd.kind) {
            case ExprKind::Literal:
                return detail::make_scalar(env.coords, nd.literal);
            case ExprKind::Coord:
                return env.coords.at(nd.coord);
            case ExprKind::Vel:
                if (env.vels.empty()) throw DomainError("velocity variable in a position-only evaluation");
                return env.vels.at(nd.vel_i).at(nd.vel_alpha);
            case ExprKind::Neg:
                return -eval_node(*nd.a, env);
            case ExprKind::Add:
                return eval_node(*nd.a, env) + eval_node(*nd.b, env);
            case ExprKind::Sub:
                return eval_node(*nd.a, env) - eval_node(*nd.b, env);
            case ExprKind::Mul:
                return eval_node(*nd.a, env) * eval_node(*nd.b, env);
            case ExprKind::Div:
                return eval_node(*nd.a, env) / eval_node(*nd.b, env);
            case ExprKind::Pow:
                return pow_int(eval_node(*nd.a, env), nd.exponent);
            case ExprKind::Call: {
                S arg = eval_node(*nd.a, env);
                if constexpr (std::is_same_v<S, double>)
                    return detail::call_fn(nd.fn, arg);
                else
                    return lift_function(nd.fn, arg);
            }
        }
        throw DomainError("eval: corrupt expression node");
    }

    std::shared_ptr<const ExprNode> root_;
};

bool tree_equal(const Expr& a, const Expr& b);

double eval_real(const Expr& e, const Eigen::VectorXd& q);
double eval_real(const Expr& e, const Eigen::VectorXd& q, const Eigen::MatrixXd& qdot);

}  // namespace kfield
