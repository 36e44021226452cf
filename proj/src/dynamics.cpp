#include "kfield/dynamics.hpp"

#include <cmath>
#include <random>

#include "kfield/integrate.hpp"

namespace kfield {

ForceField::ForceField(int n, int k, std::vector<Expr> entries)
    : n_(n), k_(k), zero_(false), entries_(std::move(entries)) {
    if (static_cast<int>(entries_.size()) != n * k * k)
        throw DimensionError("force: entry count differs from n*k*k");
    // symmetry in (a, b): structural when the trees match, otherwise checked
    // numerically at sampled states; asymmetric input is rejected outright
    std::mt19937_64 rng(20240901u);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < k; ++a)
            for (int b = a + 1; b < k; ++b) {
                if (tree_equal(entry(i, a, b), entry(i, b, a))) continue;
                for (int trial = 0; trial < 8; ++trial) {
                    Eigen::VectorXd q(n);
                    Eigen::MatrixXd qdot(n, k);
                    for (int h = 0; h < n; ++h) q(h) = dist(rng);
                    for (int h = 0; h < n; ++h)
                        for (int c = 0; c < k; ++c) qdot(h, c) = dist(rng);
                    double u = eval_real(entry(i, a, b), q, qdot);
                    double v = eval_real(entry(i, b, a), q, qdot);
                    if (std::abs(u - v) > 1e-10 * std::max(1.0, std::max(std::abs(u), std::abs(v))))
                        throw DomainError("force not symmetric in (alpha, beta)");
                }
            }
}

ForceField ForceField::zero(int n, int k) {
    ForceField f;
    f.n_ = n;
    f.k_ = k;
    f.zero_ = true;
    return f;
}

ForceField ForceField::constant(const Tens3& values) {
    std::vector<Expr> entries;
    for (int i = 0; i < values.n(); ++i)
        for (int a = 0; a < values.k(); ++a)
            for (int b = 0; b < values.k(); ++b) entries.push_back(Expr::literal(values(i, a, b)));
    return ForceField(values.n(), values.k(), std::move(entries));
}

Tens3 ForceField::eval(const Eigen::VectorXd& q, const Eigen::MatrixXd& qdot) const {
    Tens3 out(n_, k_);
    if (zero_) return out;
    EvalEnv<double> env;
    env.coords.assign(q.data(), q.data() + n_);
    env.vels.resize(n_);
    for (int i = 0; i < n_; ++i)
        for (int a = 0; a < k_; ++a) env.vels[i].push_back(qdot(i, a));
    for (int i = 0; i < n_; ++i)
        for (int a = 0; a < k_; ++a)
            for (int b = 0; b < k_; ++b) out(i, a, b) = entry(i, a, b).eval(env);
    return out;
}

Tens3 ForceField::directional(const Eigen::VectorXd& q, const Eigen::MatrixXd& qdot, const Eigen::VectorXd& dq,
                              const Eigen::MatrixXd& dqdot) const {
    Tens3 out(n_, k_);
    if (zero_) return out;
    EvalEnv<Jet> env;
    for (int i = 0; i < n_; ++i) {
        Jet c = Jet::constant(1, 1, q(i));
        c.d1(0) = dq(i);
        env.coords.push_back(c);
    }
    env.vels.resize(n_);
    for (int i = 0; i < n_; ++i)
        for (int a = 0; a < k_; ++a) {
            Jet c = Jet::constant(1, 1, qdot(i, a));
            c.d1(0) = dqdot(i, a);
            env.vels[i].push_back(c);
        }
    for (int i = 0; i < n_; ++i)
        for (int a = 0; a < k_; ++a)
            for (int b = 0; b < k_; ++b) out(i, a, b) = entry(i, a, b).eval(env).deriv1(0);
    return out;
}

double EndValuedOneForm::max_abs() const {
    double m = 0.0;
    for (double x : a_) m = std::max(m, std::abs(x));
    for (double x : b_) m = std::max(m, std::abs(x));
    return m;
}

EndValuedOneForm& EndValuedOneForm::operator+=(const EndValuedOneForm& o) {
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    for (size_t i = 0; i < b_.size(); ++i) b_[i] += o.b_[i];
    return *this;
}

EndValuedOneForm& EndValuedOneForm::operator-=(const EndValuedOneForm& o) {
    for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    for (size_t i = 0; i < b_.size(); ++i) b_[i] -= o.b_[i];
    return *this;
}

void EndValuedOneForm::trace(Eigen::VectorXd& tq, Eigen::MatrixXd& tqd) const {
    tq = Eigen::VectorXd::Zero(n_);
    tqd = Eigen::MatrixXd::Zero(n_, k_);
    for (int al = 0; al < k_; ++al) {
        for (int i = 0; i < n_; ++i) {
            tq(i) += a(al, al, i);
            for (int ga = 0; ga < k_; ++ga) tqd(i, ga) += b(al, al, i, ga);
        }
    }
}

namespace {

Tens3 geodesic_coefficients(const MetricField& g, const Eigen::VectorXd& q, const Eigen::MatrixXd& qdot) {
    const int n = static_cast<int>(q.size());
    const int k = static_cast<int>(qdot.cols());
    Tens3 gamma = christoffel(g, q);
    Tens3 A(n, k);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) {
                double s = 0.0;
                for (int j = 0; j < n; ++j)
                    for (int m = 0; m < n; ++m) s += gamma(i, j, m) * qdot(j, a) * qdot(m, b);
                A(i, a, b) = -s;
            }
    return A;
}

}  // namespace

SOPDE SOPDE::custom(std::function<Tens3(const Eigen::VectorXd&, const Eigen::MatrixXd&)> rule) {
    SOPDE d;
    d.tag_ = Tag::Custom;
    d.coeff_ = std::move(rule);
    return d;
}

SOPDE geodesic_sopde(const MetricField& g) {
    SOPDE d;
    d.tag_ = SOPDE::Tag::Geodesic;
    d.metric_ = g;
    d.coeff_ = [g](const Eigen::VectorXd& q, const Eigen::MatrixXd& qdot) {
        return geodesic_coefficients(g, q, qdot);
    };
    return d;
}

SOPDE newton_sopde(const MetricField& g, const ForceField& F) {
    if (F.n() != g.n()) throw DimensionError("newton_sopde: force dimension mismatch");
    SOPDE d;
    d.tag_ = SOPDE::Tag::Newton;
    d.metric_ = g;
    d.force_ = F;
    d.coeff_ = [g, F](const Eigen::VectorXd& q, const Eigen::MatrixXd& qdot) {
        Tens3 A = geodesic_coefficients(g, q, qdot);
        if (!F.is_zero()) {
            Eigen::MatrixXd ginv = g.inverse(q);
            Tens3 Fv = F.eval(q, qdot);
            for (int i = 0; i < A.n(); ++i)
                for (int a = 0; a < A.k(); ++a)
                    for (int b = 0; b < A.k(); ++b) {
                        double s = 0.0;
                        for (int j = 0; j < A.n(); ++j) s += ginv(i, j) * Fv(j, a, b);
                        A(i, a, b) += s;
                    }
        }
        return A;
    };
    return d;
}

Tens3 geodesic_oracle(const MetricField& g, const KVelocity& X, double h, double integrator_step) {
    const int n = X.n();
    const int k = X.k();
    auto at = [&](double ta, int a, double tb, int b) {
        Eigen::VectorXd v = ta * X.qdot.col(a) + tb * X.qdot.col(b);
        if (v.norm() == 0.0) return X.q;
        return geodesic_state(g, X.q, v, 1.0, integrator_step).q;
    };
    Tens3 out(n, k);
    for (int a = 0; a < k; ++a) {
        Eigen::VectorXd diag = (at(h, a, 0.0, a) - 2.0 * X.q + at(-h, a, 0.0, a)) / (h * h);
        for (int i = 0; i < n; ++i) out(i, a, a) = diag(i);
        for (int b = a + 1; b < k; ++b) {
            Eigen::VectorXd mixed =
                (at(h, a, h, b) - at(h, a, -h, b) - at(-h, a, h, b) + at(-h, a, -h, b)) / (4.0 * h * h);
            for (int i = 0; i < n; ++i) {
                out(i, a, b) = mixed(i);
                out(i, b, a) = mixed(i);
            }
        }
    }
    return out;
}

namespace {

/// Components of the one-form (iota_{D_al} dtheta^be) at X, for the
/// tangent D_al with dq = qdot_al and dqdot^j_be = A^j_{al be}.
EndValuedOneForm dtheta_contraction(const MetricField& g, const Tens3& A, const KVelocity& X) {
    const int n = X.n();
    const int k = X.k();
    Covelocity sigma = metric_iso(g, X);
    EndValuedOneForm out(n, k);
    std::vector<BundleTangent> dirs;
    dirs.reserve(k);
    for (int al = 0; al < k; ++al) {
        Eigen::MatrixXd dqdot(n, k);
        for (int j = 0; j < n; ++j)
            for (int be = 0; be < k; ++be) dqdot(j, be) = A(j, al, be);
        dirs.push_back(tangent_from_velocity(g, X, X.qdot.col(al), dqdot));
    }
    for (int i = 0; i < n; ++i) {
        BundleTangent basis =
            tangent_from_velocity(g, X, Eigen::VectorXd::Unit(n, i), Eigen::MatrixXd::Zero(n, k));
        for (int al = 0; al < k; ++al) {
            Eigen::VectorXd comp = polysymplectic_eval(sigma, dirs[al], basis);
            for (int be = 0; be < k; ++be) out.a(al, be, i) = comp(be);
        }
    }
    for (int i = 0; i < n; ++i)
        for (int ga = 0; ga < k; ++ga) {
            Eigen::MatrixXd dqdot = Eigen::MatrixXd::Zero(n, k);
            dqdot(i, ga) = 1.0;
            BundleTangent basis = tangent_from_velocity(g, X, Eigen::VectorXd::Zero(n), dqdot);
            for (int al = 0; al < k; ++al) {
                Eigen::VectorXd comp = polysymplectic_eval(sigma, dirs[al], basis);
                for (int be = 0; be < k; ++be) out.b(al, be, i, ga) = comp(be);
            }
        }
    return out;
}

}  // namespace

EndValuedOneForm calT(const MetricField& g, const KVelocity& X) {
    Tens3 A = geodesic_coefficients(g, X.q, X.qdot);
    EndValuedOneForm c = dtheta_contraction(g, A, X);
    EndValuedOneForm out(X.n(), X.k());
    out -= c;
    return out;
}

EndValuedOneForm calT_closed_form(const MetricField& g, const KVelocity& X) {
    const int n = X.n();
    const int k = X.k();
    Eigen::MatrixXd gm = g.eval(X.q);
    Tens3 dg = g.first_partials(X.q);
    EndValuedOneForm out(n, k);
    for (int al = 0; al < k; ++al)
        for (int be = 0; be < k; ++be) {
            // d(1/2 g_jh qdot^j_al qdot^h_be), dq part
            for (int i = 0; i < n; ++i) {
                double s = 0.0;
                for (int j = 0; j < n; ++j)
                    for (int h = 0; h < n; ++h) s += dg(j, h, i) * X.qdot(j, al) * X.qdot(h, be);
                out.a(al, be, i) = 0.5 * s;
            }
            // + 1/2 (d_h g_ij - d_j g_ih) qdot^j_al qdot^h_be dq^i
            for (int i = 0; i < n; ++i) {
                double s = 0.0;
                for (int j = 0; j < n; ++j)
                    for (int h = 0; h < n; ++h)
                        s += (dg(i, j, h) - dg(i, h, j)) * X.qdot(j, al) * X.qdot(h, be);
                out.a(al, be, i) += 0.5 * s;
            }
            // dqdot parts: of the exact term and of
            // 1/2 g_jh (qdot^j_al dqdot^h_be - qdot^j_be dqdot^h_al)
            for (int m = 0; m < n; ++m) {
                double gqal = 0.0, gqbe = 0.0;
                for (int j = 0; j < n; ++j) {
                    gqal += gm(j, m) * X.qdot(j, al);
                    gqbe += gm(j, m) * X.qdot(j, be);
                }
                out.b(al, be, m, al) += 0.5 * gqbe;   // exact term, delta_{ga al}
                out.b(al, be, m, be) += 0.5 * gqal;   // exact term, delta_{ga be}
                out.b(al, be, m, be) += 0.5 * gqal;   // antisymmetric term
                out.b(al, be, m, al) -= 0.5 * gqbe;   // antisymmetric term
            }
        }
    return out;
}

Tens3 force_from_sopde(const MetricField& g, const SOPDE& D, const KVelocity& X) {
    const int n = X.n();
    const int k = X.k();
    Tens3 A = D.coefficients(X);
    if (!A.symmetric_in_last(1e-9 * std::max(1.0, A.max_abs())))
        throw DomainError("force_from_sopde: coefficients not symmetric");
    Tens3 Ageo = geodesic_coefficients(g, X.q, X.qdot);
    Eigen::MatrixXd gm = g.eval(X.q);
    Tens3 F(n, k);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) {
                double s = 0.0;
                for (int j = 0; j < n; ++j) s += gm(i, j) * (A(j, a, b) - Ageo(j, a, b));
                F(i, a, b) = s;
            }
    return F;
}

EndValuedOneForm sopde_dtheta_contraction(const MetricField& g, const SOPDE& D, const KVelocity& X) {
    return dtheta_contraction(g, D.coefficients(X), X);
}

EndValuedOneForm newton_identity_check(const MetricField& g, const SOPDE& D, const ForceField& F,
                                       const KVelocity& X) {
    EndValuedOneForm res = sopde_dtheta_contraction(g, D, X);
    res += calT(g, X);
    if (!F.is_zero()) {
        Tens3 Fv = F.eval(X.q, X.qdot);
        for (int al = 0; al < X.k(); ++al)
            for (int be = 0; be < X.k(); ++be)
                for (int i = 0; i < X.n(); ++i) res.a(al, be, i) -= Fv(i, al, be);
    }
    return res;
}

double compatibility_defect(const SOPDE& D, const KVelocity& X) {
    const int n = X.n();
    const int k = X.k();
    Tens3 A = D.coefficients(X);

    // D_al applied to every coefficient A^i_{bc}
    auto directional_all = [&](int al) -> Tens3 {
        Eigen::VectorXd dq = X.qdot.col(al);
        Eigen::MatrixXd dqdot(n, k);
        for (int j = 0; j < n; ++j)
            for (int be = 0; be < k; ++be) dqdot(j, be) = A(j, al, be);

        if (D.metric_) {
            const MetricField& g = *D.metric_;
            Tens3 gamma;
            std::vector<Tens3> dgamma;
            christoffel_with_derivative(g, X.q, gamma, dgamma);
            Tens3 out(n, k);
            for (int i = 0; i < n; ++i)
                for (int b = 0; b < k; ++b)
                    for (int c = 0; c < k; ++c) {
                        double s = 0.0;
                        for (int h = 0; h < n; ++h) {
                            double t = 0.0;
                            for (int j = 0; j < n; ++j)
                                for (int m = 0; m < n; ++m)
                                    t += dgamma[h](i, j, m) * X.qdot(j, b) * X.qdot(m, c);
                            s -= t * dq(h);
                        }
                        for (int j = 0; j < n; ++j)
                            for (int m = 0; m < n; ++m)
                                s -= gamma(i, j, m) * (dqdot(j, b) * X.qdot(m, c) + X.qdot(j, b) * dqdot(m, c));
                        out(i, b, c) = s;
                    }
            if (D.force_ && !D.force_->is_zero()) {
                const ForceField& F = *D.force_;
                auto [gm, ginv] = g.eval_with_inverse(X.q);
                Tens3 dg = g.first_partials(X.q);
                // d_h ginv = -ginv dg_h ginv contracted with dq
                Eigen::MatrixXd dg_dir = Eigen::MatrixXd::Zero(n, n);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j)
                        for (int h = 0; h < n; ++h) dg_dir(i, j) += dg(i, j, h) * dq(h);
                Eigen::MatrixXd dginv_dir = -ginv * dg_dir * ginv;
                Tens3 Fv = F.eval(X.q, X.qdot);
                Tens3 dF = F.directional(X.q, X.qdot, dq, dqdot);
                for (int i = 0; i < n; ++i)
                    for (int b = 0; b < k; ++b)
                        for (int c = 0; c < k; ++c) {
                            double s = 0.0;
                            for (int j = 0; j < n; ++j)
                                s += dginv_dir(i, j) * Fv(j, b, c) + ginv(i, j) * dF(j, b, c);
                            out(i, b, c) += s;
                        }
            }
            return out;
        }

        // custom rule: central differences along the flow direction
        const double s = 1e-6;
        Tens3 plus = D.coeff_(X.q + s * dq, X.qdot + s * dqdot);
        Tens3 minus = D.coeff_(X.q - s * dq, X.qdot - s * dqdot);
        Tens3 out(n, k);
        for (int i = 0; i < n; ++i)
            for (int b = 0; b < k; ++b)
                for (int c = 0; c < k; ++c) out(i, b, c) = (plus(i, b, c) - minus(i, b, c)) / (2.0 * s);
        return out;
    };

    std::vector<Tens3> DA;
    DA.reserve(k);
    for (int al = 0; al < k; ++al) DA.push_back(directional_all(al));

    double defect = 0.0;
    for (int al = 0; al < k; ++al)
        for (int be = al + 1; be < k; ++be)
            for (int i = 0; i < n; ++i)
                for (int ga = 0; ga < k; ++ga)
                    defect = std::max(defect, std::abs(DA[al](i, be, ga) - DA[be](i, al, ga)));
    return defect;
}

}  // namespace kfield
