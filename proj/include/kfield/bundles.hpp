#pragma once

#include "kfield/geometry.hpp"

namespace kfield {

/// Tangent vector to the covelocity bundle at a base covelocity: base
/// displacement dq plus momentum displacement dp(i, a).
struct BundleTangent {
    BundleTangent() = default;
    BundleTangent(int n, int k) : dq(Eigen::VectorXd::Zero(n)), dp(Eigen::MatrixXd::Zero(n, k)) {}
    BundleTangent(Eigen::VectorXd dq_, Eigen::MatrixXd dp_) : dq(std::move(dq_)), dp(std::move(dp_)) {}

    Eigen::VectorXd dq;
    Eigen::MatrixXd dp;
};

/// p_i^a = g_ij qdot^j_a (the alpha index raised by the euclidean metric).
Covelocity metric_iso(const MetricField& g, const KVelocity& X);
KVelocity inverse_iso(const MetricField& g, const Covelocity& sigma);

/// Tangent given in velocity coordinates (dq, dqdot), converted through
/// the differential of the isomorphism:
/// dp_i^b = d_h(g_ij) qdot^j_b dq^h + g_ij dqdot^j_b.
BundleTangent tangent_from_velocity(const MetricField& g, const KVelocity& base, const Eigen::VectorXd& dq,
                                    const Eigen::MatrixXd& dqdot);

/// The End(R^k)-valued coupling: entry (a, b) is sum_i p_i^a qdot^i_b.
Eigen::MatrixXd interior_coupling(const KVelocity& X, const Covelocity& sigma);

/// Trace of the interior coupling: sum_{i,a} p_i^a qdot^i_a.
double pairing(const Covelocity& sigma, const KVelocity& X);

/// Liouville form componentwise: theta^a(D) = sum_i p_i^a dq^i.
Eigen::VectorXd liouville_eval(const Covelocity& sigma, const BundleTangent& D);

/// Polysymplectic form componentwise:
/// dtheta^a(D1, D2) = sum_i (d1p_i^a d2q^i - d2p_i^a d1q^i).
Eigen::VectorXd polysymplectic_eval(const Covelocity& sigma, const BundleTangent& D1, const BundleTangent& D2);

}  // namespace kfield
