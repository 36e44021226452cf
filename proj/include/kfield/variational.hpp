#pragma once

#include "kfield/solve.hpp"

namespace kfield {

/// Vector field v on the base manifold together with its canonical
/// prolongation to Q_k^1: at X, components v^i(q) and
/// vdot^i_a = qdot^j_a d_j v^i.
class ProlongedVector {
public:
    ProlongedVector() = default;
    ProlongedVector(Chart chart, std::vector<Expr> components);

    static ProlongedVector translation(int n, int axis);
    static ProlongedVector rotation2d();  // (-q2, q1)

    int n() const { return chart_.n; }
    const Expr& component(int i) const { return components_[i]; }

    Eigen::VectorXd eval(const Eigen::VectorXd& q) const;
    /// (v, vdot) at X, with vdot from jet evaluation of the components.
    void prolong(const KVelocity& X, Eigen::VectorXd& v, Eigen::MatrixXd& vdot) const;

private:
    Chart chart_;
    std::vector<Expr> components_;
};

double hamiltonian(const MetricField& g, const Expr& U, const KVelocity& X);
double lagrangian(const MetricField& g, const Expr& U, const KVelocity& X);

struct DdwResidual {
    double max_q = 0.0;  // max |d_a q^i - dH/dp_i^a|
    double max_p = 0.0;  // max |sum_a d_a p_i^a + dH/dq^i|
    long interior_nodes = 0;
    long boundary_nodes = 0;
    double max_abs() const { return std::max(max_q, max_p); }
};

/// Residuals of the canonical equations on a sheet, with momenta from the
/// metric isomorphism applied to the finite-difference prolongation and
/// H = 1/2 g^{ij} p_i^a p_j^a + U in covelocity coordinates.
DdwResidual ddw_residual(const MetricField& g, const Expr& U, const Sheet& sheet);

struct NewtonVsDdw {
    double newton_max = 0.0;
    DdwResidual ddw;
};

/// Pairs the full second-order residual with the traced canonical
/// residual on the same sheet. Requires tr F = -dU (checked numerically)
/// or F = 0.
NewtonVsDdw newton_vs_ddw_report(const MetricField& g, const ForceField& F, const Expr& U, const Sheet& sheet);

/// Numerical check that sum_a F_{i a a} = -d_i U at sampled states.
double conservativity_defect(const MetricField& g, const ForceField& F, const Expr& U, unsigned seed = 1);

/// Both sides of the Hamilton-Noether identity at X:
/// lhs = D_a <theta^a, delta_v>, rhs = <dT + tr F, delta_v>.
std::pair<double, double> hamilton_noether_check(const MetricField& g, const ForceField& F, const SOPDE& D,
                                                 const ProlongedVector& v, const KVelocity& X);

/// max |delta_v L| over the sample states.
double symmetry_defect(const MetricField& g, const Expr& U, const ProlongedVector& v,
                       const std::vector<KVelocity>& samples);

struct NoetherReport {
    double max_divergence = 0.0;
    long interior_nodes = 0;
};

/// Central-difference divergence of the current J^a = p_i^a v^i over the
/// interior of the sheet.
NoetherReport noether_divergence(const MetricField& g, const ProlongedVector& v, const Sheet& sheet);

/// Trapezoid quadrature of the pulled-back first variation of L for the
/// variation field w(t) = bump(t) v(q(t)); bump must vanish on the grid
/// boundary.
double hamilton_principle_defect(const MetricField& g, const Expr& U, const Sheet& sheet,
                                 const ProlongedVector& v,
                                 const std::function<double(const Eigen::VectorXd&)>& bump);

/// Product bump (t - lo)(hi - t) per axis, normalized to peak 1.
std::function<double(const Eigen::VectorXd&)> polynomial_bump(const Grid& grid);

}  // namespace kfield
