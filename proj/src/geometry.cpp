#include "kfield/geometry.hpp"

#include <cmath>

namespace kfield {

MetricField::MetricField(Chart chart, std::vector<Expr> entries)
    : chart_(std::move(chart)), entries_(std::move(entries)) {
    const int n = chart_.n;
    if (static_cast<int>(entries_.size()) != n * n) throw DimensionError("metric: entry count differs from n*n");
    for (const Expr& e : entries_)
        if (e.uses_velocities()) throw DomainError("metric entries must not reference velocities");
}

MetricField MetricField::flat(int n) {
    Chart c(n);
    std::vector<Expr> g;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g.push_back(Expr::literal(i == j ? 1.0 : 0.0));
    return MetricField(std::move(c), std::move(g));
}

MetricField MetricField::minkowski(int n) {
    Chart c(n);
    std::vector<Expr> g;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g.push_back(Expr::literal(i == j ? (i == 0 ? -1.0 : 1.0) : 0.0));
    return MetricField(std::move(c), std::move(g));
}

MetricField MetricField::sphere2() {
    Chart c(2);
    std::vector<Expr> g{Expr::literal(1.0), Expr::literal(0.0), Expr::literal(0.0),
                        Expr::parse("sin(q1)^2", c)};
    return MetricField(std::move(c), std::move(g));
}

MetricField MetricField::hyperbolic2() {
    Chart c(2);
    Expr e = Expr::parse("1/q2^2", c);
    std::vector<Expr> g{e, Expr::literal(0.0), Expr::literal(0.0), e};
    return MetricField(std::move(c), std::move(g));
}

namespace {

// shift every coordinate reference of a tree by `offset` slots
std::shared_ptr<const ExprNode> shift_coords(const ExprNode* nd, int offset) {
    if (!nd) return nullptr;
    ExprNode out = *nd;
    if (out.kind == ExprKind::Coord) out.coord += offset;
    out.a = shift_coords(nd->a.get(), offset);
    out.b = shift_coords(nd->b.get(), offset);
    return std::make_shared<const ExprNode>(std::move(out));
}

}  // namespace

MetricField MetricField::product(const MetricField& a, const MetricField& b) {
    const int n = a.n() + b.n();
    Chart c(n);
    std::vector<Expr> g(static_cast<size_t>(n) * n, Expr::literal(0.0));
    for (int i = 0; i < a.n(); ++i)
        for (int j = 0; j < a.n(); ++j) g[i * n + j] = a.entry(i, j);
    for (int i = 0; i < b.n(); ++i)
        for (int j = 0; j < b.n(); ++j)
            g[(a.n() + i) * n + (a.n() + j)] = Expr(shift_coords(b.entry(i, j).root(), a.n()));
    return MetricField(std::move(c), std::move(g));
}

MetricField MetricField::from_catalog(const std::string& name, int dim) {
    if (name == "flat") return flat(dim > 0 ? dim : 2);
    if (name == "minkowski") return minkowski(dim > 0 ? dim : 2);
    if (name == "sphere2") return sphere2();
    if (name == "hyperbolic2") return hyperbolic2();
    throw DomainError("unknown catalog metric '" + name + "'");
}

bool MetricField::is_flat_euclidean() const {
    for (int i = 0; i < n(); ++i)
        for (int j = 0; j < n(); ++j) {
            const ExprNode* nd = entry(i, j).root();
            if (!nd || nd->kind != ExprKind::Literal) return false;
            if (nd->literal != (i == j ? 1.0 : 0.0)) return false;
        }
    return true;
}

Eigen::MatrixXd MetricField::eval(const Eigen::VectorXd& q) const {
    const int n = chart_.n;
    if (q.size() != n) throw DimensionError("metric eval: point dimension mismatch");
    std::vector<double> coords(q.data(), q.data() + n);
    std::vector<double> vals = eval_entries(coords);
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = vals[i * n + j];
    return g;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> MetricField::eval_with_inverse(const Eigen::VectorXd& q) const {
    Eigen::MatrixXd g = eval(q);
    const double scale = g.cwiseAbs().maxCoeff();
    const double det = g.determinant();
    if (scale == 0.0 || std::abs(det) < 1e-12 * std::pow(scale, g.rows()))
        throw DegenerateMetricError("metric degenerate at evaluation point");
    return {g, g.inverse()};
}

Eigen::MatrixXd MetricField::inverse(const Eigen::VectorXd& q) const { return eval_with_inverse(q).second; }

Tens3 MetricField::first_partials(const Eigen::VectorXd& q) const {
    const int n = chart_.n;
    std::vector<Jet> coords;
    for (int h = 0; h < n; ++h) coords.push_back(Jet::variable(n, 1, q(h), h));
    std::vector<Jet> vals = eval_entries(coords);
    Tens3 d(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int h = 0; h < n; ++h) d(i, j, h) = vals[i * n + j].deriv1(h);
    return d;
}

void MetricField::taylor_data(const Eigen::VectorXd& q, Eigen::MatrixXd& value, Tens3& dg,
                              std::vector<Eigen::MatrixXd>& d2g) const {
    const int n = chart_.n;
    std::vector<Jet> coords;
    for (int h = 0; h < n; ++h) coords.push_back(Jet::variable(n, 2, q(h), h));
    std::vector<Jet> vals = eval_entries(coords);
    value.resize(n, n);
    dg = Tens3(n, n);
    d2g.assign(static_cast<size_t>(n) * n, Eigen::MatrixXd(n, n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Jet& v = vals[i * n + j];
            value(i, j) = v.value();
            for (int h = 0; h < n; ++h) {
                dg(i, j, h) = v.deriv1(h);
                for (int m = 0; m < n; ++m) d2g[i * n + j](h, m) = v.deriv2(h, m);
            }
        }
}

Tens3 christoffel(const MetricField& g, const Eigen::VectorXd& q) {
    const int n = g.n();
    auto [gm, ginv] = g.eval_with_inverse(q);
    Tens3 dg = g.first_partials(q);
    Tens3 gamma(n, n);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double s = 0.0;
                for (int m = 0; m < n; ++m) s += ginv(l, m) * (dg(j, m, i) + dg(i, m, j) - dg(i, j, m));
                gamma(l, i, j) = 0.5 * s;
                gamma(l, j, i) = gamma(l, i, j);
            }
    return gamma;
}

void christoffel_with_derivative(const MetricField& g, const Eigen::VectorXd& q, Tens3& gamma,
                                 std::vector<Tens3>& dgamma) {
    const int n = g.n();
    Eigen::MatrixXd gm;
    Tens3 dg;
    std::vector<Eigen::MatrixXd> d2g;
    g.taylor_data(q, gm, dg, d2g);
    const double scale = gm.cwiseAbs().maxCoeff();
    if (scale == 0.0 || std::abs(gm.determinant()) < 1e-12 * std::pow(scale, n))
        throw DegenerateMetricError("metric degenerate at evaluation point");
    Eigen::MatrixXd ginv = gm.inverse();
    // dginv_h = -ginv dg_h ginv
    std::vector<Eigen::MatrixXd> dg_h(n, Eigen::MatrixXd(n, n)), dginv(n);
    for (int h = 0; h < n; ++h) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) dg_h[h](i, j) = dg(i, j, h);
        dginv[h] = -ginv * dg_h[h] * ginv;
    }
    gamma = Tens3(n, n);
    dgamma.assign(n, Tens3(n, n));
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double s = 0.0;
                for (int m = 0; m < n; ++m) s += ginv(l, m) * (dg(j, m, i) + dg(i, m, j) - dg(i, j, m));
                gamma(l, i, j) = 0.5 * s;
                gamma(l, j, i) = gamma(l, i, j);
                for (int h = 0; h < n; ++h) {
                    double t = 0.0;
                    for (int m = 0; m < n; ++m) {
                        t += dginv[h](l, m) * (dg(j, m, i) + dg(i, m, j) - dg(i, j, m));
                        t += ginv(l, m) *
                             (d2g[j * n + m](i, h) + d2g[i * n + m](j, h) - d2g[i * n + j](m, h));
                    }
                    dgamma[h](l, i, j) = 0.5 * t;
                    dgamma[h](l, j, i) = dgamma[h](l, i, j);
                }
            }
}

double kinetic_energy(const MetricField& g, const KVelocity& v) {
    if (v.k() != 1) throw DimensionError("kinetic_energy: k = 1 required");
    Eigen::MatrixXd gm = g.eval(v.q);
    Eigen::VectorXd u = v.qdot.col(0);
    return 0.5 * u.dot(gm * u);
}

double k_kinetic_energy(const MetricField& g, const KVelocity& X) {
    Eigen::MatrixXd gm = g.eval(X.q);
    double t = 0.0;
    for (int a = 0; a < X.k(); ++a) {
        Eigen::VectorXd u = X.qdot.col(a);
        t += 0.5 * u.dot(gm * u);
    }
    return t;
}

}  // namespace kfield
