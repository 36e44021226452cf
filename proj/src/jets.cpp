#include "kfield/jets.hpp"

#include <cmath>
#include <stdexcept>

namespace kfield {

namespace {

int coeff_count(int k, int order) {
    int c = 1 + k;
    if (order == 2) c += k * (k + 1) / 2;
    return c;
}

}  // namespace

Jet::Jet(int k, int order) : k_(k), order_(order) {
    if (k < 1 || k > kMaxGenerators) throw DimensionError("jet: generator count out of range");
    if (order != 1 && order != 2) throw DimensionError("jet: only orders 1 and 2 supported");
    coeff_.assign(coeff_count(k, order), 0.0);
}

Jet Jet::constant(int k, int order, double c) {
    Jet j(k, order);
    j.coeff_[0] = c;
    return j;
}

Jet Jet::variable(int k, int order, double c, int slot) {
    if (slot < 0 || slot >= k) throw DimensionError("jet: generator slot out of range");
    Jet j(k, order);
    j.coeff_[0] = c;
    j.coeff_[1 + slot] = 1.0;
    return j;
}

int Jet::idx2(int a, int b) const {
    if (a > b) std::swap(a, b);
    // pairs (a, b), a <= b, enumerated row by row
    return 1 + k_ + a * k_ - a * (a - 1) / 2 + (b - a);
}

void Jet::check_shape(const Jet& o) const {
    if (!same_shape(o)) throw DimensionError("jet: mismatched generator count or order");
}

Jet Jet::operator-() const {
    Jet r = *this;
    for (double& c : r.coeff_) c = -c;
    return r;
}

Jet& Jet::operator+=(const Jet& o) {
    check_shape(o);
    for (size_t i = 0; i < coeff_.size(); ++i) coeff_[i] += o.coeff_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    check_shape(o);
    for (size_t i = 0; i < coeff_.size(); ++i) coeff_[i] -= o.coeff_[i];
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (double& c : coeff_) c *= s;
    return *this;
}

Jet operator+(const Jet& a, const Jet& b) {
    Jet r = a;
    r += b;
    return r;
}

Jet operator-(const Jet& a, const Jet& b) {
    Jet r = a;
    r -= b;
    return r;
}

Jet operator*(const Jet& a, const Jet& b) {
    a.check_shape(b);
    const int k = a.k_;
    Jet r(k, a.order_);
    const double a0 = a.coeff_[0];
    const double b0 = b.coeff_[0];
    r.coeff_[0] = a0 * b0;
    for (int i = 0; i < k; ++i) r.d1(i) = a0 * b.d1(i) + a.d1(i) * b0;
    if (a.order_ == 2) {
        for (int i = 0; i < k; ++i)
            for (int j = i; j < k; ++j) {
                double c = a0 * b.d2(i, j) + a.d2(i, j) * b0;
                if (i == j)
                    c += a.d1(i) * b.d1(i);
                else
                    c += a.d1(i) * b.d1(j) + a.d1(j) * b.d1(i);
                r.d2(i, j) = c;
            }
    }
    return r;
}

Jet operator/(const Jet& a, const Jet& b) {
    // route through the reciprocal lift but keep the constant term the exact
    // quotient, so real and jet evaluations agree bit-for-bit
    Jet r = a * reciprocal(b);
    r.coeff_[0] = a.coeff_[0] / b.coeff_[0];
    return r;
}

Jet operator+(const Jet& a, double b) {
    Jet r = a;
    r.coeff_[0] += b;
    return r;
}
Jet operator+(double a, const Jet& b) { return b + a; }
Jet operator-(const Jet& a, double b) { return a + (-b); }
Jet operator-(double a, const Jet& b) { return (-b) + a; }
Jet operator*(const Jet& a, double b) {
    Jet r = a;
    r *= b;
    return r;
}
Jet operator*(double a, const Jet& b) { return b * a; }
Jet operator/(const Jet& a, double b) {
    Jet r = a;
    for (double& c : r.coeff_) c /= b;
    return r;
}
Jet operator/(double a, const Jet& b) { return reciprocal(b) * a; }

namespace {

// f(a0) + f'(a0) abar + f''(a0)/2 abar^2, with abar the nilpotent part.
Jet taylor_lift(const Jet& a, double f0, double f1, double f2) {
    Jet abar = a;
    abar.raw(0) = 0.0;
    Jet r = abar * f1;
    r.raw(0) = f0;
    if (a.order() == 2) {
        Jet sq = abar * abar;
        r += sq * (0.5 * f2);
    }
    return r;
}

}  // namespace

Jet reciprocal(const Jet& a) {
    const double x = a.value();
    if (x == 0.0) throw DomainError("reciprocal: zero constant term");
    return taylor_lift(a, 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x));
}

Jet sin(const Jet& a) {
    const double x = a.value();
    return taylor_lift(a, std::sin(x), std::cos(x), -std::sin(x));
}

Jet cos(const Jet& a) {
    const double x = a.value();
    return taylor_lift(a, std::cos(x), -std::sin(x), -std::cos(x));
}

Jet tan(const Jet& a) {
    const double x = a.value();
    const double c = std::cos(x);
    if (c == 0.0) throw DomainError("tan: pole at constant term");
    const double t = std::tan(x);
    const double s2 = 1.0 / (c * c);
    return taylor_lift(a, t, s2, 2.0 * s2 * t);
}

Jet exp(const Jet& a) {
    const double e = std::exp(a.value());
    return taylor_lift(a, e, e, e);
}

Jet log(const Jet& a) {
    const double x = a.value();
    if (x <= 0.0) throw DomainError("log: non-positive constant term");
    return taylor_lift(a, std::log(x), 1.0 / x, -1.0 / (x * x));
}

Jet sqrt(const Jet& a) {
    const double x = a.value();
    if (x <= 0.0) throw DomainError("sqrt: non-positive constant term");
    const double s = std::sqrt(x);
    return taylor_lift(a, s, 0.5 / s, -0.25 / (s * x));
}

Jet sinh(const Jet& a) {
    const double x = a.value();
    return taylor_lift(a, std::sinh(x), std::cosh(x), std::sinh(x));
}

Jet cosh(const Jet& a) {
    const double x = a.value();
    return taylor_lift(a, std::cosh(x), std::sinh(x), std::cosh(x));
}

double pow_int(double a, int e) {
    if (e < 0) return 1.0 / pow_int(a, -e);
    double r = 1.0;
    for (int i = 0; i < e; ++i) r *= a;
    return r;
}

Jet pow_int(const Jet& a, int e) {
    if (e < 0) return reciprocal(pow_int(a, -e));
    Jet r = Jet::constant(a.generators(), a.order(), 1.0);
    for (int i = 0; i < e; ++i) r = r * a;
    return r;
}

Jet pow(const Jet& a, int e) { return pow_int(a, e); }

Jet lift_function(const std::string& name, const Jet& a) {
    if (name == "sin") return sin(a);
    if (name == "cos") return cos(a);
    if (name == "tan") return tan(a);
    if (name == "exp") return exp(a);
    if (name == "log") return log(a);
    if (name == "sqrt") return sqrt(a);
    if (name == "sinh") return sinh(a);
    if (name == "cosh") return cosh(a);
    if (name == "reciprocal") return reciprocal(a);
    throw DomainError("lift_function: unknown function '" + name + "'");
}

TensorJet::TensorJet(int k) : k_(k), coeff_(static_cast<size_t>(k + 1) * (k + 1), 0.0) {
    if (k < 1 || k > Jet::kMaxGenerators) throw DimensionError("tensor jet: generator count out of range");
}

TensorJet TensorJet::constant(int k, double c) {
    TensorJet t(k);
    t.at(0, 0) = c;
    return t;
}

TensorJet TensorJet::variable(int k, double c, int slot) {
    // image of a base coordinate under the iterated construction:
    // c + e^slot (x) 1 + 1 (x) e^slot
    TensorJet t(k);
    t.at(0, 0) = c;
    t.at(1 + slot, 0) = 1.0;
    t.at(0, 1 + slot) = 1.0;
    return t;
}

TensorJet& TensorJet::operator+=(const TensorJet& o) {
    if (k_ != o.k_) throw DimensionError("tensor jet: mismatched generator count");
    for (size_t i = 0; i < coeff_.size(); ++i) coeff_[i] += o.coeff_[i];
    return *this;
}

TensorJet operator+(const TensorJet& a, const TensorJet& b) {
    TensorJet r = a;
    r += b;
    return r;
}

TensorJet operator-(const TensorJet& a, const TensorJet& b) { return a + b * (-1.0); }

TensorJet operator*(const TensorJet& a, const TensorJet& b) {
    if (a.k_ != b.k_) throw DimensionError("tensor jet: mismatched generator count");
    const int m = a.k_ + 1;
    TensorJet r(a.k_);
    // factorwise product, each factor truncated at degree 1: a nonzero
    // product of monomials needs at least one unit in each slot pair
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            const double c = a.at(i, j);
            if (c == 0.0) continue;
            for (int u = 0; u < m; ++u) {
                if (i != 0 && u != 0) continue;
                const int fi = i + u;  // one of them is zero
                for (int v = 0; v < m; ++v) {
                    if (j != 0 && v != 0) continue;
                    r.at(fi, j + v) += c * b.at(u, v);
                }
            }
        }
    return r;
}

TensorJet operator*(const TensorJet& a, double s) {
    TensorJet r = a;
    for (int i = 0; i <= a.k_; ++i)
        for (int j = 0; j <= a.k_; ++j) r.at(i, j) *= s;
    return r;
}

TensorJet operator*(double s, const TensorJet& a) { return a * s; }

TensorJet mu_embed(const Jet& s) {
    if (s.order() != 2) throw DimensionError("mu_embed: order-2 jet required");
    const int k = s.generators();
    TensorJet r(k);
    r.at(0, 0) = s.value();
    for (int a = 0; a < k; ++a) {
        const double c = s.d1(a);
        r.at(1 + a, 0) += c;
        r.at(0, 1 + a) += c;
    }
    // mu(e^a e^b) = e^a (x) e^b + e^b (x) e^a; mu((e^a)^2) = 2 e^a (x) e^a
    for (int a = 0; a < k; ++a)
        for (int b = a; b < k; ++b) {
            const double c = s.d2(a, b);
            r.at(1 + a, 1 + b) += c;
            r.at(1 + b, 1 + a) += c;
        }
    return r;
}

}  // namespace kfield
