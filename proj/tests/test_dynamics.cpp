#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kfield/dynamics.hpp"

using namespace kfield;

namespace {

std::vector<MetricField> catalog() {
    std::vector<MetricField> out;
    out.push_back(MetricField::flat(2));
    out.push_back(MetricField::minkowski(2));
    out.push_back(MetricField::sphere2());
    out.push_back(MetricField::hyperbolic2());
    out.push_back(MetricField::product(MetricField::sphere2(), MetricField::hyperbolic2()));
    return out;
}

KVelocity random_state(int n, int k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> qdist(0.6, 1.4), vdist(-1.0, 1.0);
    KVelocity X(n, k);
    for (int i = 0; i < n; ++i) X.q(i) = qdist(rng);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < k; ++a) X.qdot(i, a) = vdist(rng);
    return X;
}

Tens3 random_symmetric_force(int n, int k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Tens3 F(n, k);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < k; ++a)
            for (int b = a; b < k; ++b) {
                F(i, a, b) = dist(rng);
                F(i, b, a) = F(i, a, b);
            }
    return F;
}

}  // namespace

TEST_CASE("geodesic coefficients on flat space vanish") {
    SOPDE D = geodesic_sopde(MetricField::flat(3));
    std::mt19937_64 rng(67);
    KVelocity X = random_state(3, 2, rng);
    CHECK(D.coefficients(X).max_abs() == 0.0);
    CHECK(geodesic_oracle(MetricField::flat(3), X, 1e-3).max_abs() < 1e-10);
}

TEST_CASE("geodesic formula matches the exponential-map oracle") {
    std::mt19937_64 rng(71);
    for (const char* name : {"sphere2", "hyperbolic2"}) {
        MetricField g = MetricField::from_catalog(name);
        SOPDE D = geodesic_sopde(g);
        for (int trial = 0; trial < 20; ++trial) {
            KVelocity X = random_state(2, 2, rng);
            Tens3 formula = D.coefficients(X);
            Tens3 oracle = geodesic_oracle(g, X, 1e-3, 1e-3);
            for (int i = 0; i < 2; ++i)
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        CHECK(std::abs(formula(i, a, b) - oracle(i, a, b)) < 1e-5);
        }
    }
}

TEST_CASE("defining identity of the coupling form") {
    std::mt19937_64 rng(73);
    for (const MetricField& g : catalog()) {
        SOPDE geo = geodesic_sopde(g);
        for (int k : {1, 2, 3})
            for (int trial = 0; trial < 20; ++trial) {
                KVelocity X = random_state(g.n(), k, rng);
                EndValuedOneForm r = newton_identity_check(g, geo, ForceField::zero(g.n(), k), X);
                CHECK(r.max_abs() < 1e-9);
            }
    }
}

TEST_CASE("closed coordinate expression agrees with the definition") {
    std::mt19937_64 rng(79);
    for (const MetricField& g : catalog())
        for (int k : {1, 2, 3})
            for (int trial = 0; trial < 20; ++trial) {
                KVelocity X = random_state(g.n(), k, rng);
                EndValuedOneForm a = calT(g, X);
                EndValuedOneForm b = calT_closed_form(g, X);
                a -= b;
                CHECK(a.max_abs() < 1e-9);
            }
}

TEST_CASE("coupling form vanishes at zero velocity") {
    MetricField g = MetricField::sphere2();
    KVelocity X(2, 2);
    X.q << 1.0, 0.5;
    CHECK(calT(g, X).max_abs() == 0.0);
}

TEST_CASE("trace of the coupling form is the differential of the kinetic energy") {
    std::mt19937_64 rng(83);
    for (const MetricField& g : catalog())
        for (int k : {1, 2, 3})
            for (int trial = 0; trial < 20; ++trial) {
                KVelocity X = random_state(g.n(), k, rng);
                Eigen::VectorXd tq;
                Eigen::MatrixXd tqd;
                calT(g, X).trace(tq, tqd);

                EvalEnv<Jet> env;
                for (int i = 0; i < g.n(); ++i) env.coords.push_back(Jet::variable(g.n(), 1, X.q(i), i));
                std::vector<Jet> gj = g.eval_entries(env.coords);
                Jet T = Jet::constant(g.n(), 1, 0.0);
                for (int a = 0; a < k; ++a)
                    for (int r = 0; r < g.n(); ++r)
                        for (int c = 0; c < g.n(); ++c)
                            T += 0.5 * gj[r * g.n() + c] * X.qdot(r, a) * X.qdot(c, a);
                for (int i = 0; i < g.n(); ++i) CHECK(std::abs(tq(i) - T.deriv1(i)) < 1e-10);

                Eigen::MatrixXd gm = g.eval(X.q);
                Eigen::MatrixXd dTdv = gm * X.qdot;
                CHECK((tqd - dTdv).norm() < 1e-10);
            }
}

TEST_CASE("newton correspondence roundtrips") {
    std::mt19937_64 rng(89);
    for (const MetricField& g : catalog())
        for (int k : {1, 2, 3})
            for (int trial = 0; trial < 10; ++trial) {
                KVelocity X = random_state(g.n(), k, rng);
                Tens3 Fv = random_symmetric_force(g.n(), k, rng);
                ForceField F = ForceField::constant(Fv);
                SOPDE D = newton_sopde(g, F);

                // identity holds for the forced field
                CHECK(newton_identity_check(g, D, F, X).max_abs() < 1e-9);

                // F -> SOPDE -> F
                Tens3 rec = force_from_sopde(g, D, X);
                for (int i = 0; i < g.n(); ++i)
                    for (int a = 0; a < k; ++a)
                        for (int b = 0; b < k; ++b)
                            CHECK(std::abs(rec(i, a, b) - Fv(i, a, b)) < 1e-12);

                // SOPDE -> F -> SOPDE
                SOPDE D2 = newton_sopde(g, ForceField::constant(rec));
                Tens3 A1 = D.coefficients(X), A2 = D2.coefficients(X);
                for (int i = 0; i < g.n(); ++i)
                    for (int a = 0; a < k; ++a)
                        for (int b = 0; b < k; ++b)
                            CHECK(std::abs(A1(i, a, b) - A2(i, a, b)) < 1e-12);
            }
}

TEST_CASE("newton coefficients on flat space add the force directly") {
    MetricField g = MetricField::flat(2);
    Tens3 Fv(2, 2);
    Fv(0, 0, 0) = 3.5;
    SOPDE D = newton_sopde(g, ForceField::constant(Fv));
    std::mt19937_64 rng(97);
    KVelocity X = random_state(2, 2, rng);
    Tens3 A = D.coefficients(X);
    CHECK(A(0, 0, 0) == 3.5);
    CHECK(A(0, 0, 1) == 0.0);
    CHECK(A(1, 1, 1) == 0.0);
}

TEST_CASE("custom diagonal coefficients yield the expected force on flat space") {
    MetricField g = MetricField::flat(2);
    Eigen::Vector2d w(0.7, -1.2);
    SOPDE D = SOPDE::custom([w](const Eigen::VectorXd&, const Eigen::MatrixXd& qd) {
        Tens3 A(2, static_cast<int>(qd.cols()));
        for (int i = 0; i < 2; ++i)
            for (int a = 0; a < qd.cols(); ++a) A(i, a, a) = w(i);
        return A;
    });
    std::mt19937_64 rng(101);
    KVelocity X = random_state(2, 2, rng);
    Tens3 F = force_from_sopde(g, D, X);
    for (int i = 0; i < 2; ++i)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) CHECK(F(i, a, b) == (a == b ? w(i) : 0.0));
}

TEST_CASE("perturbing one coefficient shifts the identity residual linearly") {
    MetricField g = MetricField::flat(2);
    SOPDE base = geodesic_sopde(g);
    SOPDE bumped = SOPDE::custom([](const Eigen::VectorXd&, const Eigen::MatrixXd& qd) {
        Tens3 A(2, static_cast<int>(qd.cols()));
        A(0, 0, 0) = 1.0;
        return A;
    });
    std::mt19937_64 rng(103);
    KVelocity X = random_state(2, 2, rng);
    ForceField none = ForceField::zero(2, 2);
    EndValuedOneForm r0 = newton_identity_check(g, base, none, X);
    EndValuedOneForm r1 = newton_identity_check(g, bumped, none, X);
    r1 -= r0;
    // the dq-component in slot (al=0, be=0) for coordinate 0 moves by g_11 * 1
    CHECK(std::abs(r1.a(0, 0, 0) - 1.0) < 1e-12);
}

TEST_CASE("asymmetric force entries are rejected with a diagnostic") {
    Chart chart(1);
    std::vector<Expr> entries;
    entries.push_back(Expr::parse("0", chart, 2));     // F_{1,1,1}
    entries.push_back(Expr::parse("q1", chart, 2));    // F_{1,1,2}
    entries.push_back(Expr::parse("q1^2", chart, 2));  // F_{1,2,1}
    entries.push_back(Expr::parse("0", chart, 2));     // F_{1,2,2}
    CHECK_THROWS_WITH_AS(ForceField(1, 2, std::move(entries)), "force not symmetric in (alpha, beta)",
                         DomainError);
}

TEST_CASE("velocity-dependent forces are supported") {
    Chart chart(2);
    std::vector<Expr> entries;
    for (int i = 0; i < 2; ++i)
        for (int a = 0; a < 1; ++a)
            for (int b = 0; b < 1; ++b) entries.push_back(Expr::parse("qd(1,1)*q2", chart, 1));
    ForceField F(2, 1, std::move(entries));
    MetricField g = MetricField::flat(2);
    SOPDE D = newton_sopde(g, F);
    std::mt19937_64 rng(107);
    KVelocity X = random_state(2, 1, rng);
    CHECK(newton_identity_check(g, D, F, X).max_abs() < 1e-9);
    Tens3 rec = force_from_sopde(g, D, X);
    CHECK(rec(0, 0, 0) == doctest::Approx(X.qdot(0, 0) * X.q(1)).epsilon(1e-12));
}

TEST_CASE("compatibility defect") {
    MetricField flat = MetricField::flat(2);
    std::mt19937_64 rng(109);
    KVelocity X = random_state(2, 2, rng);
    CHECK(compatibility_defect(geodesic_sopde(flat), X) == 0.0);

    Tens3 Fv = random_symmetric_force(2, 2, rng);
    CHECK(compatibility_defect(newton_sopde(flat, ForceField::constant(Fv)), X) < 1e-12);

    // generic rank-2 data on the sphere obstructs integrability
    MetricField sph = MetricField::sphere2();
    KVelocity Y(2, 2);
    Y.q << 1.0, 0.5;
    Y.qdot << 1.0, 0.0, 0.0, 1.0;
    CHECK(compatibility_defect(geodesic_sopde(sph), Y) > 1e-3);
}

TEST_CASE("difference of two sopdes is purely vertical") {
    // structural: coefficients differ, the q-components are both qdot
    MetricField g = MetricField::sphere2();
    std::mt19937_64 rng(113);
    KVelocity X = random_state(2, 2, rng);
    Tens3 Fv = random_symmetric_force(2, 2, rng);
    Tens3 A1 = geodesic_sopde(g).coefficients(X);
    Tens3 A2 = newton_sopde(g, ForceField::constant(Fv)).coefficients(X);
    Eigen::MatrixXd ginv = g.inverse(X.q);
    for (int i = 0; i < 2; ++i)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double v = 0.0;
                for (int j = 0; j < 2; ++j) v += ginv(i, j) * Fv(j, a, b);
                CHECK(std::abs((A2(i, a, b) - A1(i, a, b)) - v) < 1e-13);
            }
}
