#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kfield/geometry.hpp"
#include "kfield/integrate.hpp"

using namespace kfield;

namespace {

// Independent Levi-Civita oracle: central differences of the metric.
Tens3 christoffel_fd(const MetricField& g, const Eigen::VectorXd& q, double h = 1e-5) {
    const int n = g.n();
    Tens3 dg(n, n);  // dg(h, i, j) = d g_ij / dq^h -- reuse Tens3 with first slot h
    std::vector<Eigen::MatrixXd> parts(n);
    for (int m = 0; m < n; ++m) {
        Eigen::VectorXd qp = q, qm = q;
        qp(m) += h;
        qm(m) -= h;
        parts[m] = (g.eval(qp) - g.eval(qm)) / (2.0 * h);
    }
    Eigen::MatrixXd ginv = g.inverse(q);
    Tens3 gamma(n, n);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int m = 0; m < n; ++m)
                    s += 0.5 * ginv(l, m) * (parts[i](j, m) + parts[j](i, m) - parts[m](i, j));
                gamma(l, i, j) = s;
            }
    return gamma;
}

Eigen::VectorXd random_point(const std::string& name, int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(0.6, 1.4);
    Eigen::VectorXd q(n);
    for (int i = 0; i < n; ++i) q(i) = dist(rng);
    return q;
}

}  // namespace

TEST_CASE("catalog metric values") {
    MetricField flat = MetricField::flat(2);
    CHECK((flat.eval(Eigen::Vector2d(0.3, -2.0)) - Eigen::Matrix2d::Identity()).norm() == 0.0);

    MetricField sph = MetricField::sphere2();
    Eigen::Matrix2d gs = sph.eval(Eigen::Vector2d(std::acos(-1.0) / 2.0, 0.1));
    CHECK(gs(0, 0) == 1.0);
    CHECK(gs(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(gs(0, 1) == 0.0);

    MetricField hyp = MetricField::hyperbolic2();
    auto [gh, gh_inv] = hyp.eval_with_inverse(Eigen::Vector2d(0.0, 2.0));
    CHECK(gh(0, 0) == 0.25);
    CHECK(gh(1, 1) == 0.25);
    CHECK(gh_inv(0, 0) == doctest::Approx(4.0).epsilon(1e-14));

    MetricField mink = MetricField::minkowski(2);
    Eigen::Matrix2d gm = mink.eval(Eigen::Vector2d(0.0, 0.0));
    CHECK(gm(0, 0) == -1.0);
    CHECK(gm(1, 1) == 1.0);
}

TEST_CASE("inverse satisfies g ginv = I") {
    std::mt19937_64 rng(31);
    for (const char* name : {"flat", "minkowski", "sphere2", "hyperbolic2"}) {
        MetricField g = MetricField::from_catalog(name, 3);
        for (int trial = 0; trial < 20; ++trial) {
            Eigen::VectorXd q = random_point(name, g.n(), rng);
            auto [gm, ginv] = g.eval_with_inverse(q);
            CHECK((gm * ginv - Eigen::MatrixXd::Identity(g.n(), g.n())).norm() < 1e-10);
        }
    }
}

TEST_CASE("degenerate metric is rejected") {
    Chart chart(1);
    MetricField bad(chart, {Expr::parse("q1", chart)});
    Eigen::VectorXd q(1);
    q << 0.0;
    CHECK_THROWS_AS(bad.eval_with_inverse(q), DegenerateMetricError);
    CHECK_THROWS_AS(christoffel(bad, q), DegenerateMetricError);
}

TEST_CASE("metric expressions reject velocity references") {
    Chart chart(1);
    CHECK_THROWS_AS(MetricField(chart, {Expr::parse("qd(1,1)", chart, 1)}), DomainError);
}

TEST_CASE("christoffel closed forms") {
    MetricField sph = MetricField::sphere2();
    const double th = 1.1;
    Tens3 gs = christoffel(sph, Eigen::Vector2d(th, 0.4));
    CHECK(gs(0, 1, 1) == doctest::Approx(-std::sin(th) * std::cos(th)).epsilon(1e-12));
    CHECK(gs(1, 0, 1) == doctest::Approx(std::cos(th) / std::sin(th)).epsilon(1e-12));
    CHECK(gs(0, 0, 0) == doctest::Approx(0.0));
    CHECK(gs(1, 1, 1) == doctest::Approx(0.0));

    MetricField hyp = MetricField::hyperbolic2();
    const double y = 1.7;
    Tens3 gh = christoffel(hyp, Eigen::Vector2d(0.3, y));
    CHECK(gh(0, 0, 1) == doctest::Approx(-1.0 / y).epsilon(1e-12));
    CHECK(gh(1, 0, 0) == doctest::Approx(1.0 / y).epsilon(1e-12));
    CHECK(gh(1, 1, 1) == doctest::Approx(-1.0 / y).epsilon(1e-12));

    Tens3 gf = christoffel(MetricField::flat(3), Eigen::Vector3d(1.0, 2.0, 3.0));
    CHECK(gf.max_abs() == 0.0);
}

TEST_CASE("christoffel matches the finite-difference oracle on the catalog") {
    std::mt19937_64 rng(37);
    std::vector<MetricField> metrics;
    metrics.push_back(MetricField::flat(3));
    metrics.push_back(MetricField::minkowski(3));
    metrics.push_back(MetricField::sphere2());
    metrics.push_back(MetricField::hyperbolic2());
    metrics.push_back(MetricField::product(MetricField::sphere2(), MetricField::hyperbolic2()));
    for (const MetricField& g : metrics) {
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::VectorXd q = random_point("", g.n(), rng);
            Tens3 exact = christoffel(g, q);
            Tens3 fd = christoffel_fd(g, q);
            CHECK(exact.symmetric_in_last(0.0));
            for (int l = 0; l < g.n(); ++l)
                for (int i = 0; i < g.n(); ++i)
                    for (int j = 0; j < g.n(); ++j)
                        worst = std::max(worst, std::abs(exact(l, i, j) - fd(l, i, j)));
        }
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("christoffel derivative matches finite differences of christoffel") {
    MetricField g = MetricField::product(MetricField::sphere2(), MetricField::hyperbolic2());
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::VectorXd q = random_point("", g.n(), rng);
        Tens3 gamma;
        std::vector<Tens3> dgamma;
        christoffel_with_derivative(g, q, gamma, dgamma);
        Tens3 direct = christoffel(g, q);
        for (int l = 0; l < g.n(); ++l)
            for (int i = 0; i < g.n(); ++i)
                for (int j = 0; j < g.n(); ++j)
                    CHECK(gamma(l, i, j) == doctest::Approx(direct(l, i, j)).epsilon(1e-12));
        const double h = 1e-5;
        for (int m = 0; m < g.n(); ++m) {
            Eigen::VectorXd qp = q, qm = q;
            qp(m) += h;
            qm(m) -= h;
            Tens3 gp = christoffel(g, qp), gm2 = christoffel(g, qm);
            for (int l = 0; l < g.n(); ++l)
                for (int i = 0; i < g.n(); ++i)
                    for (int j = 0; j < g.n(); ++j) {
                        double fd = (gp(l, i, j) - gm2(l, i, j)) / (2.0 * h);
                        CHECK(std::abs(dgamma[m](l, i, j) - fd) < 1e-5);
                    }
        }
    }
}

TEST_CASE("kinetic energies") {
    MetricField flat = MetricField::flat(2);
    KVelocity v(2, 1);
    v.qdot << 3.0, 4.0;
    CHECK(kinetic_energy(flat, v) == 12.5);

    KVelocity z(2, 1);
    CHECK(kinetic_energy(flat, z) == 0.0);

    MetricField mink = MetricField::minkowski(2);
    KVelocity null_v(2, 1);
    null_v.qdot << 1.0, 1.0;
    CHECK(kinetic_energy(mink, null_v) == 0.0);

    KVelocity id(2, 2);
    id.qdot = Eigen::Matrix2d::Identity();
    CHECK(k_kinetic_energy(flat, id) == 1.0);

    // slot permutation invariance
    KVelocity X(2, 3);
    X.qdot << 1.0, -2.0, 0.5, 0.3, 0.7, -1.1;
    KVelocity Y = X;
    Y.qdot.col(0).swap(Y.qdot.col(2));
    CHECK(k_kinetic_energy(flat, X) == doctest::Approx(k_kinetic_energy(flat, Y)).epsilon(1e-15));

    // k = 1 agreement
    CHECK(k_kinetic_energy(flat, v) == kinetic_energy(flat, v));
    CHECK_THROWS_AS(kinetic_energy(flat, id), DimensionError);
}

TEST_CASE("metric compatibility along integrated geodesics") {
    // the squared speed of a geodesic is constant; its numerical derivative
    // along a short integrated arc stays below 1e-5
    std::mt19937_64 rng(43);
    for (const char* name : {"sphere2", "hyperbolic2"}) {
        MetricField g = MetricField::from_catalog(name);
        for (int trial = 0; trial < 10; ++trial) {
            Eigen::VectorXd q = random_point(name, 2, rng);
            Eigen::VectorXd v = Eigen::VectorXd::Random(2);
            GeodesicPath path = integrate_geodesic(g, q, v, 0.2, 1e-3);
            auto energy = [&](size_t s) {
                return 0.5 * path.qdot[s].dot(g.eval(path.q[s]) * path.qdot[s]);
            };
            for (size_t s = 1; s + 1 < path.q.size(); s += 20) {
                double deriv = (energy(s + 1) - energy(s - 1)) / (2.0 * path.step);
                CHECK(std::abs(deriv) < 1e-5);
            }
        }
    }
}
