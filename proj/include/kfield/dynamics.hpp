#pragma once

#include <functional>
#include <optional>

#include "kfield/bundles.hpp"

namespace kfield {

/// Force coefficients F_{i a b}(q, qdot), symmetric in (a, b), held as
/// expression trees (horizontal by construction: no dqdot components).
class ForceField {
public:
    ForceField() = default;
    ForceField(int n, int k, std::vector<Expr> entries);  // index (i*k + a)*k + b

    static ForceField zero(int n, int k);
    static ForceField constant(const Tens3& values);

    int n() const { return n_; }
    int k() const { return k_; }
    bool is_zero() const { return zero_; }
    const Expr& entry(int i, int a, int b) const { return entries_[(i * k_ + a) * k_ + b]; }

    Tens3 eval(const Eigen::VectorXd& q, const Eigen::MatrixXd& qdot) const;
    /// Directional derivative of every coefficient along (dq, dqdot).
    Tens3 directional(const Eigen::VectorXd& q, const Eigen::MatrixXd& qdot, const Eigen::VectorXd& dq,
                      const Eigen::MatrixXd& dqdot) const;

private:
    int n_ = 0, k_ = 0;
    bool zero_ = true;
    std::vector<Expr> entries_;
};

/// A second order partial differential equation: the coefficient rule
/// A^i_{a b}(q, qdot), symmetric in (a, b); the q-components of the
/// associated fields D_a are structurally qdot_a.
class SOPDE {
public:
    enum class Tag { Geodesic, Newton, Custom };

    Tag tag() const { return tag_; }
    const std::optional<ForceField>& force() const { return force_; }

    Tens3 coefficients(const KVelocity& X) const { return coeff_(X.q, X.qdot); }

    static SOPDE custom(std::function<Tens3(const Eigen::VectorXd&, const Eigen::MatrixXd&)> rule);

    friend SOPDE geodesic_sopde(const MetricField& g);
    friend SOPDE newton_sopde(const MetricField& g, const ForceField& F);

private:
    Tag tag_ = Tag::Custom;
    std::function<Tens3(const Eigen::VectorXd&, const Eigen::MatrixXd&)> coeff_;
    std::optional<MetricField> metric_;
    std::optional<ForceField> force_;

    friend double compatibility_defect(const SOPDE& D, const KVelocity& X);
};

/// An End(R^k)-valued 1-form on Q_k^1 at a point: dq components a(al, be, i)
/// and dqdot components b(al, be, i, ga), for the slot e_be (x) e^al.
struct EndValuedOneForm {
    EndValuedOneForm() = default;
    EndValuedOneForm(int n, int k)
        : n_(n), k_(k), a_(static_cast<size_t>(k) * k * n, 0.0), b_(static_cast<size_t>(k) * k * n * k, 0.0) {}

    int n() const { return n_; }
    int k() const { return k_; }
    double a(int al, int be, int i) const { return a_[(al * k_ + be) * n_ + i]; }
    double& a(int al, int be, int i) { return a_[(al * k_ + be) * n_ + i]; }
    double b(int al, int be, int i, int ga) const { return b_[((al * k_ + be) * n_ + i) * k_ + ga]; }
    double& b(int al, int be, int i, int ga) { return b_[((al * k_ + be) * n_ + i) * k_ + ga]; }

    bool horizontal(double tol = 0.0) const {
        for (double x : b_)
            if (std::abs(x) > tol) return false;
        return true;
    }
    double max_abs() const;

    EndValuedOneForm& operator+=(const EndValuedOneForm& o);
    EndValuedOneForm& operator-=(const EndValuedOneForm& o);

    /// Trace over the End indices: one-form with dq components tq(i) and
    /// dqdot components tqd(i, ga).
    void trace(Eigen::VectorXd& tq, Eigen::MatrixXd& tqd) const;

private:
    int n_ = 0, k_ = 0;
    std::vector<double> a_, b_;
};

/// Geodesic k-field of a metric: A^i_{a b} = -gamma^i_{jm} qdot^j_a qdot^m_b.
SOPDE geodesic_sopde(const MetricField& g);

/// Independent oracle for the geodesic k-field: second central differences
/// of t -> exp_q(t^a X_a) at 0, computed through the geodesic integrator.
Tens3 geodesic_oracle(const MetricField& g, const KVelocity& X, double h, double integrator_step = 1e-3);

/// The contraction of the geodesic field with the polysymplectic form,
/// with reversed sign, evaluated from its definition.
EndValuedOneForm calT(const MetricField& g, const KVelocity& X);

/// The same form from its closed coordinate expression; kept as an
/// independent witness for cross-checking against calT.
EndValuedOneForm calT_closed_form(const MetricField& g, const KVelocity& X);

/// A^i_{a b} = -gamma^i_{jm} qdot^j_a qdot^m_b + g^{ij} F_{j a b}.
SOPDE newton_sopde(const MetricField& g, const ForceField& F);

/// Inverse direction of the correspondence: the force a given SOPDE
/// exerts at X, F_{i a b} = g_ij (A^j_ab - A_geo^j_ab).
Tens3 force_from_sopde(const MetricField& g, const SOPDE& D, const KVelocity& X);

/// Residual of the defining identity: contraction of D with the
/// polysymplectic form, plus calT, minus F (componentwise).
EndValuedOneForm newton_identity_check(const MetricField& g, const SOPDE& D, const ForceField& F,
                                       const KVelocity& X);

/// Contraction of a SOPDE with the polysymplectic form as an
/// End(R^k)-valued one-form at X.
EndValuedOneForm sopde_dtheta_contraction(const MetricField& g, const SOPDE& D, const KVelocity& X);

/// Necessary condition for solvability of the overdetermined system:
/// max |D_a A^i_{b c} - D_b A^i_{a c}|, the fields D_a acting as
/// directional derivatives with q-direction qdot_a and qdot-direction A_a.
double compatibility_defect(const SOPDE& D, const KVelocity& X);

}  // namespace kfield
