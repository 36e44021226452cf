#include "kfield/bundles.hpp"

namespace kfield {

namespace {

void check_base(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const char* what) {
    if (a.size() != b.size() || a != b) throw DimensionError(std::string(what) + ": base point mismatch");
}

}  // namespace

Covelocity metric_iso(const MetricField& g, const KVelocity& X) {
    auto [gm, ginv] = g.eval_with_inverse(X.q);
    (void)ginv;
    return Covelocity(X.q, gm * X.qdot);
}

KVelocity inverse_iso(const MetricField& g, const Covelocity& sigma) {
    Eigen::MatrixXd ginv = g.inverse(sigma.q);
    return KVelocity(sigma.q, ginv * sigma.p);
}

BundleTangent tangent_from_velocity(const MetricField& g, const KVelocity& base, const Eigen::VectorXd& dq,
                                    const Eigen::MatrixXd& dqdot) {
    const int n = base.n();
    const int k = base.k();
    Eigen::MatrixXd gm = g.eval(base.q);
    Tens3 dg = g.first_partials(base.q);
    Eigen::MatrixXd dp = gm * dqdot;
    for (int i = 0; i < n; ++i)
        for (int b = 0; b < k; ++b) {
            double s = 0.0;
            for (int h = 0; h < n; ++h)
                for (int j = 0; j < n; ++j) s += dg(i, j, h) * base.qdot(j, b) * dq(h);
            dp(i, b) += s;
        }
    return BundleTangent(dq, dp);
}

Eigen::MatrixXd interior_coupling(const KVelocity& X, const Covelocity& sigma) {
    check_base(X.q, sigma.q, "interior_coupling");
    // (a, b) entry: p_i^a qdot^i_b
    return sigma.p.transpose() * X.qdot;
}

double pairing(const Covelocity& sigma, const KVelocity& X) {
    check_base(X.q, sigma.q, "pairing");
    return (sigma.p.transpose() * X.qdot).trace();
}

Eigen::VectorXd liouville_eval(const Covelocity& sigma, const BundleTangent& D) {
    return sigma.p.transpose() * D.dq;
}

Eigen::VectorXd polysymplectic_eval(const Covelocity& sigma, const BundleTangent& D1, const BundleTangent& D2) {
    (void)sigma;
    return D1.dp.transpose() * D2.dq - D2.dp.transpose() * D1.dq;
}

}  // namespace kfield
