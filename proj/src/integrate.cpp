#include "kfield/integrate.hpp"

#include <cmath>

namespace kfield {

namespace {

struct Deriv {
    Eigen::VectorXd dq;
    Eigen::VectorXd dv;
};

Deriv geodesic_rhs(const MetricField& g, const Eigen::VectorXd& q, const Eigen::VectorXd& v) {
    const int n = static_cast<int>(q.size());
    Tens3 gamma = christoffel(g, q);
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
    for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += gamma(l, i, j) * v(i) * v(j);
        acc(l) = -s;
    }
    return {v, acc};
}

void rk4_step(const MetricField& g, Eigen::VectorXd& q, Eigen::VectorXd& v, double h) {
    Deriv k1 = geodesic_rhs(g, q, v);
    Deriv k2 = geodesic_rhs(g, q + 0.5 * h * k1.dq, v + 0.5 * h * k1.dv);
    Deriv k3 = geodesic_rhs(g, q + 0.5 * h * k2.dq, v + 0.5 * h * k2.dv);
    Deriv k4 = geodesic_rhs(g, q + h * k3.dq, v + h * k3.dv);
    q += (h / 6.0) * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
    v += (h / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
}

}  // namespace

GeodesicState geodesic_state(const MetricField& g, const Eigen::VectorXd& q0, const Eigen::VectorXd& v0,
                             double s, double step) {
    Eigen::VectorXd q = q0, v = v0;
    if (s == 0.0) return {q, v};
    const int nsteps = std::max(1, static_cast<int>(std::ceil(std::abs(s) / step)));
    const double h = s / nsteps;
    for (int i = 0; i < nsteps; ++i) rk4_step(g, q, v, h);
    return {q, v};
}

GeodesicPath integrate_geodesic(const MetricField& g, const Eigen::VectorXd& q0, const Eigen::VectorXd& v0,
                                double s_end, double step) {
    GeodesicPath path;
    const int nsteps = std::max(1, static_cast<int>(std::ceil(std::abs(s_end) / step)));
    const double h = s_end / nsteps;
    path.step = h;
    Eigen::VectorXd q = q0, v = v0;
    path.q.push_back(q);
    path.qdot.push_back(v);
    for (int i = 0; i < nsteps; ++i) {
        rk4_step(g, q, v, h);
        path.q.push_back(q);
        path.qdot.push_back(v);
    }
    return path;
}

Eigen::VectorXd exp_map(const MetricField& g, const Eigen::VectorXd& q, const Eigen::VectorXd& v, int steps) {
    if (v.norm() == 0.0) return q;
    if (g.is_flat_euclidean()) return q + v;  // exact, avoids pointless integration
    return geodesic_state(g, q, v, 1.0, 1.0 / steps).q;
}

}  // namespace kfield
