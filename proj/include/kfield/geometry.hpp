#pragma once

#include "kfield/expr.hpp"
#include "kfield/state.hpp"

namespace kfield {

/// Pseudo-Riemannian metric on a single chart, entries held as expression
/// trees so that all derivatives come from jet evaluation.
class MetricField {
public:
    MetricField() = default;
    MetricField(Chart chart, std::vector<Expr> entries);  // row-major n*n

    static MetricField flat(int n);
    static MetricField minkowski(int n);
    static MetricField sphere2();      // chart (theta, phi), g = diag(1, sin(theta)^2)
    static MetricField hyperbolic2();  // half plane, g = diag(1/y^2, 1/y^2)
    static MetricField product(const MetricField& a, const MetricField& b);
    static MetricField from_catalog(const std::string& name, int dim = 0);

    const Chart& chart() const { return chart_; }
    int n() const { return chart_.n; }
    const Expr& entry(int i, int j) const { return entries_[i * chart_.n + j]; }
    bool is_flat_euclidean() const;

    template <class S>
    std::vector<S> eval_entries(const std::vector<S>& q) const {
        EvalEnv<S> env;
        env.coords = q;
        std::vector<S> out;
        out.reserve(entries_.size());
        for (const Expr& e : entries_) out.push_back(e.eval(env));
        return out;
    }

    Eigen::MatrixXd eval(const Eigen::VectorXd& q) const;
    /// Metric and inverse; throws DegenerateMetricError when |det| falls
    /// below 1e-12 relative to the largest entry magnitude.
    std::pair<Eigen::MatrixXd, Eigen::MatrixXd> eval_with_inverse(const Eigen::VectorXd& q) const;
    Eigen::MatrixXd inverse(const Eigen::VectorXd& q) const;

    /// First partials d(i, j, h) = dg_ij/dq^h from order-1 jet evaluation.
    Tens3 first_partials(const Eigen::VectorXd& q) const;
    /// Second partials out(i, j)(h, m) = d^2 g_ij / dq^h dq^m alongside
    /// values and first partials, from one order-2 jet evaluation.
    void taylor_data(const Eigen::VectorXd& q, Eigen::MatrixXd& value, Tens3& dg,
                     std::vector<Eigen::MatrixXd>& d2g) const;

private:
    Chart chart_;
    std::vector<Expr> entries_;
};

/// Levi-Civita coefficients gamma(l, i, j), symmetric in (i, j).
Tens3 christoffel(const MetricField& g, const Eigen::VectorXd& q);

/// Christoffel symbols together with their coordinate derivative
/// dgamma[h](l, i, j) = d gamma^l_ij / dq^h.
void christoffel_with_derivative(const MetricField& g, const Eigen::VectorXd& q, Tens3& gamma,
                                 std::vector<Tens3>& dgamma);

/// One half g(v, v) for a single velocity (k = 1).
double kinetic_energy(const MetricField& g, const KVelocity& v);

/// One half of the sum over parameter slots of g(X_a, X_a).
double k_kinetic_energy(const MetricField& g, const KVelocity& X);

}  // namespace kfield
