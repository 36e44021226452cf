#include "kfield/variational.hpp"

#include <cmath>
#include <random>

namespace kfield {

namespace {

double potential_value(const Expr& U, const Eigen::VectorXd& q) {
    if (!U.valid()) return 0.0;
    return eval_real(U, q);
}

Eigen::VectorXd potential_gradient(const Expr& U, const Eigen::VectorXd& q) {
    const int n = static_cast<int>(q.size());
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);
    if (!U.valid()) return grad;
    EvalEnv<Jet> env;
    for (int i = 0; i < n; ++i) env.coords.push_back(Jet::variable(n, 1, q(i), i));
    Jet val = U.eval(env);
    for (int i = 0; i < n; ++i) grad(i) = val.deriv1(i);
    return grad;
}

/// Directional derivative of T (and of U) along the Q_k^1 tangent
/// (dq, dqdot), through a single-generator jet evaluation.
double directional_lagrangian(const MetricField& g, const Expr& U, const KVelocity& X,
                              const Eigen::VectorXd& dq, const Eigen::MatrixXd& dqdot, double potential_sign) {
    const int n = X.n();
    const int k = X.k();
    EvalEnv<Jet> env;
    for (int i = 0; i < n; ++i) {
        Jet c = Jet::constant(1, 1, X.q(i));
        c.d1(0) = dq(i);
        env.coords.push_back(c);
    }
    std::vector<Jet> gj;
    gj.reserve(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) gj.push_back(g.entry(i, j).eval(env));
    Jet t = Jet::constant(1, 1, 0.0);
    for (int a = 0; a < k; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                Jet qi = Jet::constant(1, 1, X.qdot(i, a));
                qi.d1(0) = dqdot(i, a);
                Jet qj = Jet::constant(1, 1, X.qdot(j, a));
                qj.d1(0) = dqdot(j, a);
                t += 0.5 * gj[i * n + j] * qi * qj;
            }
    if (U.valid() && potential_sign != 0.0) t += potential_sign * U.eval(env);
    return t.deriv1(0);
}

}  // namespace

ProlongedVector::ProlongedVector(Chart chart, std::vector<Expr> components)
    : chart_(std::move(chart)), components_(std::move(components)) {
    if (static_cast<int>(components_.size()) != chart_.n)
        throw DimensionError("vector field: component count differs from chart dimension");
    for (const Expr& e : components_)
        if (e.uses_velocities()) throw DomainError("vector field components must not reference velocities");
}

ProlongedVector ProlongedVector::translation(int n, int axis) {
    Chart c(n);
    std::vector<Expr> comps;
    for (int i = 0; i < n; ++i) comps.push_back(Expr::literal(i == axis ? 1.0 : 0.0));
    return ProlongedVector(std::move(c), std::move(comps));
}

ProlongedVector ProlongedVector::rotation2d() {
    Chart c(2);
    std::vector<Expr> comps{Expr::parse("-q2", c), Expr::parse("q1", c)};
    return ProlongedVector(std::move(c), std::move(comps));
}

Eigen::VectorXd ProlongedVector::eval(const Eigen::VectorXd& q) const {
    Eigen::VectorXd v(n());
    for (int i = 0; i < n(); ++i) v(i) = eval_real(components_[i], q);
    return v;
}

void ProlongedVector::prolong(const KVelocity& X, Eigen::VectorXd& v, Eigen::MatrixXd& vdot) const {
    const int nn = n();
    const int k = X.k();
    EvalEnv<Jet> env;
    for (int i = 0; i < nn; ++i) env.coords.push_back(Jet::variable(nn, 1, X.q(i), i));
    v.resize(nn);
    vdot = Eigen::MatrixXd::Zero(nn, k);
    for (int i = 0; i < nn; ++i) {
        Jet val = components_[i].eval(env);
        v(i) = val.value();
        for (int a = 0; a < k; ++a)
            for (int j = 0; j < nn; ++j) vdot(i, a) += X.qdot(j, a) * val.deriv1(j);
    }
}

double hamiltonian(const MetricField& g, const Expr& U, const KVelocity& X) {
    return k_kinetic_energy(g, X) + potential_value(U, X.q);
}

double lagrangian(const MetricField& g, const Expr& U, const KVelocity& X) {
    return k_kinetic_energy(g, X) - potential_value(U, X.q);
}

DdwResidual ddw_residual(const MetricField& g, const Expr& U, const Sheet& sheet) {
    const int n = sheet.n();
    const int k = sheet.k();
    DdwResidual rep;
    const Grid& grid = sheet.grid;
    const long count = grid.node_count();

    // momentum field at every margin-1 node
    std::vector<Eigen::MatrixXd> pfield(count);
    std::vector<char> have(count, 0);
    for (long node = 0; node < count; ++node) {
        std::vector<int> idx = grid.unflatten(node);
        if (!grid.interior(idx, 1)) continue;
        KVelocity X = sheet_prolong(sheet, idx);
        pfield[node] = g.eval(X.q) * X.qdot;
        have[node] = 1;
    }

    for (long node = 0; node < count; ++node) {
        std::vector<int> idx = grid.unflatten(node);
        if (!grid.interior(idx, 2)) {
            ++rep.boundary_nodes;
            continue;
        }
        ++rep.interior_nodes;
        KVelocity X = sheet_prolong(sheet, idx);
        auto [gm, ginv] = g.eval_with_inverse(X.q);
        const Eigen::MatrixXd& p = pfield[node];

        // first canonical equation: d_a q^i = dH/dp_i^a = g^{ij} p_j^a
        Eigen::MatrixXd rq = X.qdot - ginv * p;
        rep.max_q = std::max(rep.max_q, rq.cwiseAbs().maxCoeff());

        // second canonical equation: sum_a d_a p_i^a + dH/dq^i
        Tens3 dg = g.first_partials(X.q);
        Eigen::VectorXd dHdq = potential_gradient(U, X.q);
        for (int i = 0; i < n; ++i) {
            // d_i ginv = -ginv (d_i g) ginv
            Eigen::MatrixXd dgi(n, n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) dgi(r, c) = dg(r, c, i);
            Eigen::MatrixXd dginv = -ginv * dgi * ginv;
            double s = 0.0;
            for (int a = 0; a < k; ++a) s += 0.5 * p.col(a).dot(dginv * p.col(a));
            dHdq(i) += s;
        }
        for (int i = 0; i < n; ++i) {
            double div = 0.0;
            for (int a = 0; a < k; ++a) {
                std::vector<int> plus = idx, minus = idx;
                ++plus[a];
                --minus[a];
                const long np = grid.index(plus), nm = grid.index(minus);
                if (!have[np] || !have[nm]) throw DomainError("ddw_residual: stencil underflow");
                div += (pfield[np](i, a) - pfield[nm](i, a)) / (2.0 * grid.h(a));
            }
            rep.max_p = std::max(rep.max_p, std::abs(div + dHdq(i)));
        }
    }
    return rep;
}

double conservativity_defect(const MetricField& g, const ForceField& F, const Expr& U, unsigned seed) {
    const int n = g.n();
    const int k = F.k();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> qdist(0.6, 1.4), vdist(-1.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 32; ++trial) {
        Eigen::VectorXd q(n);
        Eigen::MatrixXd qdot(n, k);
        for (int i = 0; i < n; ++i) q(i) = qdist(rng);
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < k; ++a) qdot(i, a) = vdist(rng);
        Tens3 Fv = F.eval(q, qdot);
        Eigen::VectorXd grad = potential_gradient(U, q);
        for (int i = 0; i < n; ++i) {
            double tr = 0.0;
            for (int a = 0; a < k; ++a) tr += Fv(i, a, a);
            worst = std::max(worst, std::abs(tr + grad(i)));
        }
    }
    return worst;
}

NewtonVsDdw newton_vs_ddw_report(const MetricField& g, const ForceField& F, const Expr& U, const Sheet& sheet) {
    if (!F.is_zero()) {
        double defect = conservativity_defect(g, F, U);
        if (defect > 1e-10)
            throw DomainError("newton_vs_ddw_report: force trace is not the differential of the potential");
    }
    NewtonVsDdw out;
    out.newton_max = newton_residual(g, F, sheet).max_abs;
    out.ddw = ddw_residual(g, U, sheet);
    return out;
}

std::pair<double, double> hamilton_noether_check(const MetricField& g, const ForceField& F, const SOPDE& D,
                                                 const ProlongedVector& v, const KVelocity& X) {
    const int n = X.n();
    const int k = X.k();
    Tens3 A = D.coefficients(X);

    // lhs: sum_a D_a of phi = sum_a theta^a(delta_v) = g_ij qdot^j_a v^i
    double lhs = 0.0;
    for (int al = 0; al < k; ++al) {
        EvalEnv<Jet> env;
        for (int i = 0; i < n; ++i) {
            Jet c = Jet::constant(1, 1, X.q(i));
            c.d1(0) = X.qdot(i, al);
            env.coords.push_back(c);
        }
        Jet phi = Jet::constant(1, 1, 0.0);
        for (int i = 0; i < n; ++i) {
            Jet vi = v.component(i).eval(env);
            for (int j = 0; j < n; ++j) {
                Jet qj = Jet::constant(1, 1, X.qdot(j, al));
                qj.d1(0) = A(j, al, al);
                phi += g.entry(i, j).eval(env) * qj * vi;
            }
        }
        lhs += phi.deriv1(0);
    }

    // rhs: <dT, delta_v> + sum_a F_{i a a} v^i
    Eigen::VectorXd vq;
    Eigen::MatrixXd vdot;
    v.prolong(X, vq, vdot);
    double rhs = directional_lagrangian(g, Expr(), X, vq, vdot, 0.0);
    if (!F.is_zero()) {
        Tens3 Fv = F.eval(X.q, X.qdot);
        for (int i = 0; i < n; ++i)
            for (int a = 0; a < k; ++a) rhs += Fv(i, a, a) * vq(i);
    }
    return {lhs, rhs};
}

double symmetry_defect(const MetricField& g, const Expr& U, const ProlongedVector& v,
                       const std::vector<KVelocity>& samples) {
    double worst = 0.0;
    for (const KVelocity& X : samples) {
        Eigen::VectorXd vq;
        Eigen::MatrixXd vdot;
        v.prolong(X, vq, vdot);
        worst = std::max(worst, std::abs(directional_lagrangian(g, U, X, vq, vdot, -1.0)));
    }
    return worst;
}

NoetherReport noether_divergence(const MetricField& g, const ProlongedVector& v, const Sheet& sheet) {
    const Grid& grid = sheet.grid;
    const int k = sheet.k();
    const long count = grid.node_count();
    NoetherReport rep;

    std::vector<Eigen::VectorXd> current(count);
    std::vector<char> have(count, 0);
    for (long node = 0; node < count; ++node) {
        std::vector<int> idx = grid.unflatten(node);
        if (!grid.interior(idx, 1)) continue;
        KVelocity X = sheet_prolong(sheet, idx);
        Eigen::MatrixXd p = g.eval(X.q) * X.qdot;
        current[node] = p.transpose() * v.eval(X.q);  // J^a = p_i^a v^i
        have[node] = 1;
    }

    for (long node = 0; node < count; ++node) {
        std::vector<int> idx = grid.unflatten(node);
        if (!grid.interior(idx, 2)) continue;
        ++rep.interior_nodes;
        double div = 0.0;
        for (int a = 0; a < k; ++a) {
            std::vector<int> plus = idx, minus = idx;
            ++plus[a];
            --minus[a];
            div += (current[grid.index(plus)](a) - current[grid.index(minus)](a)) / (2.0 * grid.h(a));
        }
        rep.max_divergence = std::max(rep.max_divergence, std::abs(div));
    }
    return rep;
}

std::function<double(const Eigen::VectorXd&)> polynomial_bump(const Grid& grid) {
    std::vector<double> lo = grid.lo, hi = grid.hi;
    return [lo, hi](const Eigen::VectorXd& t) {
        double b = 1.0;
        for (size_t a = 0; a < lo.size(); ++a) {
            double half = 0.5 * (hi[a] - lo[a]);
            b *= (t(a) - lo[a]) * (hi[a] - t(a)) / (half * half);
        }
        return b;
    };
}

double hamilton_principle_defect(const MetricField& g, const Expr& U, const Sheet& sheet,
                                 const ProlongedVector& v,
                                 const std::function<double(const Eigen::VectorXd&)>& bump) {
    const Grid& grid = sheet.grid;
    const int n = sheet.n();
    const int k = sheet.k();
    const long count = grid.node_count();

    // variation field w(t) = bump(t) v(q(t)) on every node
    std::vector<Eigen::VectorXd> w(count);
    for (long node = 0; node < count; ++node) {
        std::vector<int> idx = grid.unflatten(node);
        const Eigen::VectorXd t = grid.point(idx);
        const double b = bump(t);
        if (!grid.interior(idx, 1) && std::abs(b) > 1e-12)
            throw DomainError("hamilton_principle_defect: bump does not vanish on the boundary");
        w[node] = b * v.eval(sheet.value(node));
    }

    // first derivative along an axis, one-sided second order at the rim
    auto axis_derivative = [&](const std::vector<Eigen::VectorXd>& field, const std::vector<int>& idx,
                               int a) -> Eigen::VectorXd {
        const double h = grid.h(a);
        std::vector<int> i0 = idx, i1 = idx, i2 = idx;
        if (idx[a] == 0) {
            ++i1[a];
            i2[a] += 2;
            return (-3.0 * field[grid.index(i0)] + 4.0 * field[grid.index(i1)] - field[grid.index(i2)]) /
                   (2.0 * h);
        }
        if (idx[a] == grid.counts[a] - 1) {
            --i1[a];
            i2[a] -= 2;
            return (3.0 * field[grid.index(i0)] - 4.0 * field[grid.index(i1)] + field[grid.index(i2)]) /
                   (2.0 * h);
        }
        ++i1[a];
        --i2[a];
        return (field[grid.index(i1)] - field[grid.index(i2)]) / (2.0 * h);
    };

    std::vector<Eigen::VectorXd> qfield(count);
    for (long node = 0; node < count; ++node) qfield[node] = sheet.value(node);

    // Since w vanishes on the boundary, the first variation equals the
    // integral of (dL/dq^i - d_a(dL/dqdot^i_a)) w^i; quadrature of this
    // integrated-by-parts form avoids the telescoping error of
    // differentiating w on the grid.
    std::vector<Eigen::VectorXd> dLdq(count);
    std::vector<Eigen::MatrixXd> mom(count);  // dL/dqdot^i_a = g_ij qdot^j_a
    for (long node = 0; node < count; ++node) {
        std::vector<int> idx = grid.unflatten(node);
        KVelocity X(n, k);
        X.q = qfield[node];
        for (int a = 0; a < k; ++a) X.qdot.col(a) = axis_derivative(qfield, idx, a);
        mom[node] = g.eval(X.q) * X.qdot;

        EvalEnv<Jet> env;
        for (int i = 0; i < n; ++i) env.coords.push_back(Jet::variable(n, 1, X.q(i), i));
        Jet L = Jet::constant(n, 1, 0.0);
        std::vector<Jet> gj = g.eval_entries(env.coords);
        for (int a = 0; a < k; ++a)
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) L += 0.5 * gj[r * n + c] * X.qdot(r, a) * X.qdot(c, a);
        if (U.valid()) L -= U.eval(env);
        dLdq[node] = Eigen::VectorXd(n);
        for (int i = 0; i < n; ++i) dLdq[node](i) = L.deriv1(i);
    }

    double integral = 0.0;
    double cellvol = 1.0;
    for (int a = 0; a < k; ++a) cellvol *= grid.h(a);

    for (long node = 0; node < count; ++node) {
        std::vector<int> idx = grid.unflatten(node);
        Eigen::VectorXd el = dLdq[node];
        for (int a = 0; a < k; ++a) {
            // derivative of the momentum column a along axis a
            const double h = grid.h(a);
            std::vector<int> i0 = idx, i1 = idx, i2 = idx;
            Eigen::VectorXd d(n);
            if (idx[a] == 0) {
                ++i1[a];
                i2[a] += 2;
                d = (-3.0 * mom[grid.index(i0)].col(a) + 4.0 * mom[grid.index(i1)].col(a) -
                     mom[grid.index(i2)].col(a)) /
                    (2.0 * h);
            } else if (idx[a] == grid.counts[a] - 1) {
                --i1[a];
                i2[a] -= 2;
                d = (3.0 * mom[grid.index(i0)].col(a) - 4.0 * mom[grid.index(i1)].col(a) +
                     mom[grid.index(i2)].col(a)) /
                    (2.0 * h);
            } else {
                ++i1[a];
                --i2[a];
                d = (mom[grid.index(i1)].col(a) - mom[grid.index(i2)].col(a)) / (2.0 * h);
            }
            el -= d;
        }
        double weight = cellvol;
        for (int a = 0; a < k; ++a)
            if (idx[a] == 0 || idx[a] == grid.counts[a] - 1) weight *= 0.5;
        integral += weight * el.dot(w[node]);
    }
    return integral;
}

}  // namespace kfield
