#pragma once

#include <string>
#include <vector>

#include "kfield/state.hpp"

namespace kfield {

/// Element of the truncated polynomial ring R[e1..ek]/(e1..ek)^{order+1},
/// order 1 or 2. Coefficients are stored densely: constant term, then the k
/// linear terms, then (for order 2) the k(k+1)/2 monomials e^a e^b with
/// a <= b.
///
/// Coefficients are Taylor coefficients of the represented function germ:
/// the stored coefficient of (e^a)^2 is one half of the second derivative,
/// while the mixed coefficient of e^a e^b (a < b) is the mixed derivative
/// itself. deriv2() applies the factorial rescaling.
class Jet {
public:
    static constexpr int kMaxGenerators = 8;

    Jet(int k, int order);
    static Jet constant(int k, int order, double c);
    static Jet variable(int k, int order, double c, int slot);

    int generators() const { return k_; }
    int order() const { return order_; }
    int size() const { return static_cast<int>(coeff_.size()); }

    double value() const { return coeff_[0]; }
    double d1(int a) const { return coeff_[1 + a]; }
    double& d1(int a) { return coeff_[1 + a]; }
    /// Stored coefficient of the monomial e^a e^b (normalized to a <= b).
    double d2(int a, int b) const { return coeff_[idx2(a, b)]; }
    double& d2(int a, int b) { return coeff_[idx2(a, b)]; }

    /// First derivative with respect to generator a.
    double deriv1(int a) const { return d1(a); }
    /// Second derivative d^2/de^a de^b (factorial rescaling of d2).
    double deriv2(int a, int b) const { return a == b ? 2.0 * d2(a, a) : d2(a, b); }

    double raw(int i) const { return coeff_[i]; }
    double& raw(int i) { return coeff_[i]; }

    Jet operator-() const;
    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(double s);

    friend Jet operator+(const Jet& a, const Jet& b);
    friend Jet operator-(const Jet& a, const Jet& b);
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);
    friend Jet operator+(const Jet& a, double b);
    friend Jet operator+(double a, const Jet& b);
    friend Jet operator-(const Jet& a, double b);
    friend Jet operator-(double a, const Jet& b);
    friend Jet operator*(const Jet& a, double b);
    friend Jet operator*(double a, const Jet& b);
    friend Jet operator/(const Jet& a, double b);
    friend Jet operator/(double a, const Jet& b);

    bool same_shape(const Jet& o) const { return k_ == o.k_ && order_ == o.order_; }

private:
    int idx2(int a, int b) const;
    void check_shape(const Jet& o) const;

    int k_;
    int order_;
    std::vector<double> coeff_;
};

/// Taylor lift of a univariate smooth function through a jet argument:
/// f(a) = f(a0) + f'(a0) abar + f''(a0)/2 abar^2, truncated at the order.
Jet lift_function(const std::string& name, const Jet& a);

Jet reciprocal(const Jet& a);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet tan(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
Jet sinh(const Jet& a);
Jet cosh(const Jet& a);
Jet pow(const Jet& a, int e);

inline double reciprocal(double x) { return 1.0 / x; }
double pow_int(double a, int e);
Jet pow_int(const Jet& a, int e);

/// Element of R_k^1 (x) R_k^1: coefficients over pairs of degree <= 1
/// monomials, a (1+k) x (1+k) array. Carrier of the mu-embedding.
class TensorJet {
public:
    explicit TensorJet(int k);
    static TensorJet constant(int k, double c);
    static TensorJet variable(int k, double c, int slot);

    int generators() const { return k_; }
    /// Coefficient of e^a (x) e^b where index 0 stands for the unit.
    double at(int a, int b) const { return coeff_[a * (k_ + 1) + b]; }
    double& at(int a, int b) { return coeff_[a * (k_ + 1) + b]; }

    TensorJet& operator+=(const TensorJet& o);
    friend TensorJet operator+(const TensorJet& a, const TensorJet& b);
    friend TensorJet operator-(const TensorJet& a, const TensorJet& b);
    friend TensorJet operator*(const TensorJet& a, const TensorJet& b);
    friend TensorJet operator*(const TensorJet& a, double s);
    friend TensorJet operator*(double s, const TensorJet& a);

    bool operator==(const TensorJet& o) const { return k_ == o.k_ && coeff_ == o.coeff_; }

private:
    int k_;
    std::vector<double> coeff_;
};

/// The algebra morphism R_k^2 -> R_k^1 (x) R_k^1 extending
/// e^a -> e^a (x) 1 + 1 (x) e^a multiplicatively over monomials.
TensorJet mu_embed(const Jet& s);

using JetMap = std::vector<Jet> (*)(const std::vector<Jet>&);

/// First prolongation of a parameterized map at t: evaluate on t^a + e^a
/// (order 1) and read off value and first-order coefficients.
template <class Fn>
KVelocity prolong1(Fn&& gamma, const std::vector<double>& t) {
    const int k = static_cast<int>(t.size());
    std::vector<Jet> args;
    args.reserve(t.size());
    for (int a = 0; a < k; ++a) args.push_back(Jet::variable(k, 1, t[a], a));
    std::vector<Jet> out = gamma(args);
    const int n = static_cast<int>(out.size());
    KVelocity v(n, k);
    for (int i = 0; i < n; ++i) {
        v.q(i) = out[i].value();
        for (int a = 0; a < k; ++a) v.qdot(i, a) = out[i].deriv1(a);
    }
    return v;
}

/// Second prolongation: order-2 evaluation; qddot(i,a,b) is the second
/// partial derivative, symmetric in (a, b).
template <class Fn>
K2Velocity prolong2(Fn&& gamma, const std::vector<double>& t) {
    const int k = static_cast<int>(t.size());
    std::vector<Jet> args;
    args.reserve(t.size());
    for (int a = 0; a < k; ++a) args.push_back(Jet::variable(k, 2, t[a], a));
    std::vector<Jet> out = gamma(args);
    const int n = static_cast<int>(out.size());
    K2Velocity v(n, k);
    for (int i = 0; i < n; ++i) {
        v.q(i) = out[i].value();
        for (int a = 0; a < k; ++a) {
            v.qdot(i, a) = out[i].deriv1(a);
            for (int b = 0; b < k; ++b) v.qddot(i, a, b) = out[i].deriv2(a, b);
        }
    }
    return v;
}

}  // namespace kfield
