#pragma once

#include "kfield/geometry.hpp"

namespace kfield {

/// Sampled geodesic: states (q, qdot) at uniform parameter steps.
struct GeodesicPath {
    std::vector<Eigen::VectorXd> q;
    std::vector<Eigen::VectorXd> qdot;
    double step = 0.0;
};

/// One state of the geodesic flow.
struct GeodesicState {
    Eigen::VectorXd q;
    Eigen::VectorXd qdot;
};

/// Integrate qddot = -Gamma(q)(qdot, qdot) from (q0, v0) over [0, s] with a
/// fixed-step classical 4th order method; `step` is the nominal step size
/// (the actual step divides s evenly).
GeodesicState geodesic_state(const MetricField& g, const Eigen::VectorXd& q0, const Eigen::VectorXd& v0,
                             double s, double step = 1e-3);

GeodesicPath integrate_geodesic(const MetricField& g, const Eigen::VectorXd& q0, const Eigen::VectorXd& v0,
                                double s_end, double step = 1e-3);

/// exp_q(v): endpoint at parameter 1 of the geodesic with initial data
/// (q, v), using `steps` substeps.
Eigen::VectorXd exp_map(const MetricField& g, const Eigen::VectorXd& q, const Eigen::VectorXd& v,
                        int steps = 1000);

}  // namespace kfield
