// Acceptance suite: ten pinned criteria, one summary line each.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <random>

#include "kfield/variational.hpp"

using namespace kfield;

namespace {

void report(int idx, const char* what, double value, double tolerance, bool pass) {
    std::printf("criterion %2d %-52s value=%.3e tol=%.1e %s\n", idx, what, value, tolerance,
                pass ? "PASS" : "FAIL");
}

void criterion(int idx, const char* what, double value, double tolerance) {
    bool pass = value <= tolerance;
    report(idx, what, value, tolerance, pass);
    CHECK(pass);
}

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

Grid square_grid(double half, int nodes, int k = 2) {
    return Grid(std::vector<double>(k, -half), std::vector<double>(k, half), std::vector<int>(k, nodes));
}

Jet random_dyadic(std::mt19937_64& rng, int k, int order) {
    std::uniform_int_distribution<int> num(-64, 64);
    Jet j(k, order);
    for (int i = 0; i < j.size(); ++i) j.raw(i) = num(rng) / 64.0;
    return j;
}

}  // namespace

TEST_CASE("1: flat worked example") {
    MetricField flat = MetricField::flat(2);
    Grid grid = square_grid(0.5, 21);
    ForceField none = ForceField::zero(2, 2);

    Eigen::VectorXd a(2);
    a << 0.1, -0.2;
    Eigen::MatrixXd b(2, 2);
    b << 1.0, 2.0, 0.5, -0.25;
    Sheet affine = flat_newton_sheet(Tens3(2, 2), a, b, grid);
    double newton_aff = newton_residual(flat, none, affine).max_abs;
    double ddw_aff = ddw_residual(flat, Expr(), affine).max_abs();
    criterion(1, "affine sheet newton residual", newton_aff, 1e-10);
    criterion(1, "affine sheet traced residual", ddw_aff, 1e-8);

    Sheet harmonic = sample_sheet(grid, 2, [](const Eigen::VectorXd& t) {
        Eigen::VectorXd q(2);
        q << t(0) * t(0) - t(1) * t(1), 0.0;
        return q;
    });
    double ddw_h = ddw_residual(flat, Expr(), harmonic).max_abs();
    double newton_h = newton_residual(flat, none, harmonic).max_abs;
    criterion(1, "harmonic sheet traced residual", ddw_h, 1e-8);
    criterion(1, "harmonic sheet newton residual vs 2", std::abs(newton_h - 2.0), 1e-8);
}

TEST_CASE("2 and 3: defining identity and closed form across the catalog") {
    std::mt19937_64 rng(211);
    double worst_identity = 0.0, worst_closed = 0.0;
    for (const MetricField& g : catalog()) {
        SOPDE geo = geodesic_sopde(g);
        for (int k : {1, 2, 3}) {
            ForceField none = ForceField::zero(g.n(), k);
            for (int trial = 0; trial < 34; ++trial) {
                KVelocity X = random_state(g.n(), k, rng);
                worst_identity = std::max(worst_identity, newton_identity_check(g, geo, none, X).max_abs());
                EndValuedOneForm d = calT(g, X);
                d -= calT_closed_form(g, X);
                worst_closed = std::max(worst_closed, d.max_abs());
            }
        }
    }
    criterion(2, "defining identity residual (catalog, k in 1..3)", worst_identity, 1e-9);
    criterion(3, "closed form vs definition", worst_closed, 1e-9);
}

TEST_CASE("4: correspondence roundtrips") {
    std::mt19937_64 rng(223);
    double worst_f = 0.0, worst_a = 0.0;
    for (const MetricField& g : catalog())
        for (int k : {1, 2, 3})
            for (int trial = 0; trial < 10; ++trial) {
                KVelocity X = random_state(g.n(), k, rng);
                Tens3 Fv = random_symmetric_force(g.n(), k, rng);
                SOPDE D = newton_sopde(g, ForceField::constant(Fv));
                Tens3 rec = force_from_sopde(g, D, X);
                SOPDE D2 = newton_sopde(g, ForceField::constant(rec));
                Tens3 A1 = D.coefficients(X), A2 = D2.coefficients(X);
                for (int i = 0; i < g.n(); ++i)
                    for (int a = 0; a < k; ++a)
                        for (int b = 0; b < k; ++b) {
                            worst_f = std::max(worst_f, std::abs(rec(i, a, b) - Fv(i, a, b)));
                            worst_a = std::max(worst_a, std::abs(A1(i, a, b) - A2(i, a, b)));
                        }
            }
    criterion(4, "force -> sopde -> force roundtrip", worst_f, 1e-12);
    criterion(4, "sopde -> force -> sopde roundtrip", worst_a, 1e-12);
}

TEST_CASE("5: geodesic formula vs exponential-map oracle") {
    std::mt19937_64 rng(227);
    double worst = 0.0;
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
                        worst = std::max(worst, std::abs(formula(i, a, b) - oracle(i, a, b)));
        }
    }
    criterion(5, "formula vs second-difference oracle", worst, 1e-5);
}

TEST_CASE("6: trace law and classical reduction") {
    std::mt19937_64 rng(229);
    double worst = 0.0, worst_k1 = 0.0;
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
                double w = 0.0;
                for (int i = 0; i < g.n(); ++i) w = std::max(w, std::abs(tq(i) - T.deriv1(i)));
                w = std::max(w, (tqd - g.eval(X.q) * X.qdot).cwiseAbs().maxCoeff());
                worst = std::max(worst, w);
                if (k == 1) worst_k1 = std::max(worst_k1, w);
            }
    criterion(6, "trace of the coupling form vs dT", worst, 1e-10);
    criterion(6, "classical k=1 reduction", worst_k1, 1e-10);
}

TEST_CASE("7: flow-derivative identity for the momentum pairing") {
    std::mt19937_64 rng(233);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Chart chart(2);
    std::vector<ProlongedVector> fields;
    fields.push_back(ProlongedVector::translation(2, 0));
    fields.push_back(ProlongedVector::rotation2d());
    fields.push_back(ProlongedVector(chart, {Expr::parse("q1*q2", chart), Expr::parse("q2^2 - q1", chart)}));
    double worst = 0.0;
    for (const MetricField& g : catalog()) {
        if (g.n() != 2) continue;
        for (const ProlongedVector& v : fields)
            for (int k : {1, 2, 3})
                for (int trial = 0; trial < 10; ++trial) {
                    KVelocity X = random_state(2, k, rng);
                    ForceField F = ForceField::constant(random_symmetric_force(2, k, rng));
                    SOPDE D = newton_sopde(g, F);
                    auto [lhs, rhs] = hamilton_noether_check(g, F, D, v, X);
                    worst = std::max(worst, std::abs(lhs - rhs));
                }
    }
    criterion(7, "pairing-derivative identity", worst, 1e-9);
}

TEST_CASE("8: noether current conservation") {
    MetricField flat = MetricField::flat(2);
    Grid grid = square_grid(0.5, 11);
    Eigen::VectorXd a(2);
    a << 0.3, -0.1;
    Eigen::MatrixXd b(2, 2);
    b << 1.0, 0.5, -0.25, 2.0;
    Sheet affine = flat_newton_sheet(Tens3(2, 2), a, b, grid);
    double flat_div = noether_divergence(flat, ProlongedVector::rotation2d(), affine).max_divergence;
    criterion(8, "rotation current on affine sheets", flat_div, 1e-8);

    MetricField sph = MetricField::sphere2();
    Chart chart(2);
    ProlongedVector dphi(chart, {Expr::parse("0", chart), Expr::parse("1", chart)});
    KVelocity X(2, 2);
    X.q << 1.0, 0.5;
    Eigen::Vector2d w(0.5, 0.7);
    X.qdot.col(0) = w;
    X.qdot.col(1) = 0.6 * w;
    Sheet geo = rank1_sheet(sph, X, square_grid(0.1, 21));  // h = 1e-2
    double sph_div = noether_divergence(sph, dphi, geo).max_divergence;
    criterion(8, "killing current on rank-1 geodesic sheets", sph_div, 1e-5);
}

TEST_CASE("9: tensor embedding is an exact ring morphism") {
    std::mt19937_64 rng(239);
    bool morphism = true;
    for (int trial = 0; trial < 1000; ++trial) {
        int k = 1 + static_cast<int>(rng() % 4);
        Jet a = random_dyadic(rng, k, 2);
        Jet b = random_dyadic(rng, k, 2);
        if (!(mu_embed(a * b) == mu_embed(a) * mu_embed(b))) morphism = false;
        if (!(mu_embed(a + b) == mu_embed(a) + mu_embed(b))) morphism = false;
    }
    report(9, "ring morphism on 1000 randomized pairs", morphism ? 0.0 : 1.0, 0.0, morphism);
    CHECK(morphism);

    bool coords = true;
    std::uniform_int_distribution<int> num(-8, 8);
    for (int trial = 0; trial < 100; ++trial) {
        double c1 = num(rng) / 8.0, c2 = num(rng) / 8.0, c3 = num(rng) / 8.0;
        double c4 = num(rng) / 8.0, c5 = num(rng) / 8.0;
        auto poly = [&](const auto& t) {
            using S = std::decay_t<decltype(t[0])>;
            return std::vector<S>{t[0] * t[1] * c3 + t[0] * t[0] * c4 + t[1] * t[1] * c5 +
                                  t[0] * c1 + t[1] * c2};
        };
        std::vector<double> t0{num(rng) / 8.0, num(rng) / 8.0};
        K2Velocity v2 = prolong2(poly, t0);
        std::vector<TensorJet> args;
        for (int a = 0; a < 2; ++a) args.push_back(TensorJet::variable(2, t0[a], a));
        std::vector<TensorJet> out = poly(args);
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                if (out[0].at(a + 1, b + 1) != v2.qddot(0, a, b)) coords = false;
    }
    report(9, "second coordinates vs tensor composition", coords ? 0.0 : 1.0, 0.0, coords);
    CHECK(coords);
}

TEST_CASE("10: order of accuracy of rank-1 residuals") {
    MetricField sph = MetricField::sphere2();
    KVelocity X(2, 2);
    X.q << 1.0, 0.5;
    Eigen::Vector2d w(0.5, 0.7);
    X.qdot.col(0) = w;
    X.qdot.col(1) = 0.6 * w;
    ForceField none = ForceField::zero(2, 2);
    double rc = newton_residual(sph, none, rank1_sheet(sph, X, square_grid(0.1, 11))).max_abs;
    double rf = newton_residual(sph, none, rank1_sheet(sph, X, square_grid(0.1, 21))).max_abs;
    double factor = rc / rf;
    bool pass = factor >= 3.5 && factor <= 4.5;
    report(10, "residual reduction factor on halved h", factor, 4.5, pass);
    CHECK(pass);
}
