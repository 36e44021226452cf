#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

namespace kfield {

struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateMetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense n x k x k array of reals, last two slots typically an End(R^k)
/// index pair.
class Tens3 {
public:
    Tens3() : n_(0), k_(0) {}
    Tens3(int n, int k) : n_(n), k_(k), v_(static_cast<size_t>(n) * k * k, 0.0) {}

    int n() const { return n_; }
    int k() const { return k_; }
    double operator()(int i, int a, int b) const { return v_[(static_cast<size_t>(i) * k_ + a) * k_ + b]; }
    double& operator()(int i, int a, int b) { return v_[(static_cast<size_t>(i) * k_ + a) * k_ + b]; }

    double max_abs() const {
        double m = 0.0;
        for (double x : v_) m = std::max(m, std::abs(x));
        return m;
    }
    bool symmetric_in_last(double tol = 0.0) const {
        for (int i = 0; i < n_; ++i)
            for (int a = 0; a < k_; ++a)
                for (int b = a + 1; b < k_; ++b)
                    if (std::abs((*this)(i, a, b) - (*this)(i, b, a)) > tol) return false;
        return true;
    }

private:
    int n_, k_;
    std::vector<double> v_;
};

/// Point of Q_k^1: base point plus the n x k matrix qdot(i, a).
struct KVelocity {
    KVelocity() = default;
    KVelocity(int n, int k) : q(Eigen::VectorXd::Zero(n)), qdot(Eigen::MatrixXd::Zero(n, k)) {}
    KVelocity(Eigen::VectorXd q_, Eigen::MatrixXd qdot_) : q(std::move(q_)), qdot(std::move(qdot_)) {}

    int n() const { return static_cast<int>(q.size()); }
    int k() const { return static_cast<int>(qdot.cols()); }

    Eigen::VectorXd q;
    Eigen::MatrixXd qdot;
};

/// Point of Q_k^2: adds the symmetric second coefficients qddot(i, a, b).
struct K2Velocity {
    K2Velocity() = default;
    K2Velocity(int n, int k) : q(Eigen::VectorXd::Zero(n)), qdot(Eigen::MatrixXd::Zero(n, k)), qddot(n, k) {}

    int n() const { return static_cast<int>(q.size()); }
    int k() const { return static_cast<int>(qdot.cols()); }
    KVelocity project() const { return KVelocity(q, qdot); }

    Eigen::VectorXd q;
    Eigen::MatrixXd qdot;
    Tens3 qddot;
};

/// Point of (Q_k^1)^*: base point plus momenta p(i, a) of p_i^a dq^i (x) e_a.
struct Covelocity {
    Covelocity() = default;
    Covelocity(int n, int k) : q(Eigen::VectorXd::Zero(n)), p(Eigen::MatrixXd::Zero(n, k)) {}
    Covelocity(Eigen::VectorXd q_, Eigen::MatrixXd p_) : q(std::move(q_)), p(std::move(p_)) {}

    int n() const { return static_cast<int>(q.size()); }
    int k() const { return static_cast<int>(p.cols()); }

    Eigen::VectorXd q;
    Eigen::MatrixXd p;
};

}  // namespace kfield
