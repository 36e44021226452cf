#include "kfield/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace kfield {

namespace {

using nlohmann::json;

double tol(const Scenario& sc, const std::string& name, double fallback) {
    auto it = sc.tolerances.find(name);
    return it == sc.tolerances.end() ? fallback : it->second;
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

MetricField load_metric(const json& j, int n) {
    if (j.contains("catalog")) {
        const std::string name = j.at("catalog").get<std::string>();
        if (name == "product") {
            const auto& factors = j.at("factors");
            if (!factors.is_array() || factors.size() < 2) throw ScenarioError("product metric needs factors");
            MetricField m = load_metric(factors[0], 0);
            for (size_t i = 1; i < factors.size(); ++i) m = MetricField::product(m, load_metric(factors[i], 0));
            return m;
        }
        int dim = j.value("dim", n);
        return MetricField::from_catalog(name, dim);
    }
    if (j.contains("custom")) {
        const auto& rows = j.at("custom");
        const int dim = static_cast<int>(rows.size());
        Chart chart(dim);
        std::vector<Expr> entries;
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != dim) throw ScenarioError("custom metric is not square");
            for (const auto& cell : row) entries.push_back(Expr::parse(cell.get<std::string>(), chart));
        }
        return MetricField(chart, std::move(entries));
    }
    throw ScenarioError("metric needs 'catalog' or 'custom'");
}

}  // namespace

Scenario Scenario::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ScenarioError("cannot open scenario file " + path);
    json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw ScenarioError(std::string("scenario parse error: ") + e.what());
    }
    try {
        Scenario sc;
        const int n = j.at("chart").at("n").get<int>();
        sc.metric = load_metric(j.at("metric"), n);
        if (sc.metric.n() != n) throw ScenarioError("metric dimension differs from chart dimension");
        sc.chart = sc.metric.chart();

        const auto& grid = j.at("grid");
        const int k = grid.at("k").get<int>();
        std::vector<double> lo, hi;
        for (const auto& ext : grid.at("extent")) {
            lo.push_back(ext.at(0).get<double>());
            hi.push_back(ext.at(1).get<double>());
        }
        std::vector<int> counts = grid.at("resolution").get<std::vector<int>>();
        if (static_cast<int>(lo.size()) != k || static_cast<int>(counts.size()) != k)
            throw ScenarioError("grid extent/resolution arity differs from k");
        sc.grid = Grid(lo, hi, counts);

        if (j.contains("force")) {
            const auto& fj = j.at("force");
            if (static_cast<int>(fj.size()) != n) throw ScenarioError("force needs n blocks");
            std::vector<Expr> entries;
            for (const auto& block : fj) {
                if (static_cast<int>(block.size()) != k) throw ScenarioError("force block is not k x k");
                for (const auto& row : block) {
                    if (static_cast<int>(row.size()) != k) throw ScenarioError("force block is not k x k");
                    for (const auto& cell : row)
                        entries.push_back(Expr::parse(cell.get<std::string>(), sc.chart, k));
                }
            }
            sc.force = ForceField(n, k, std::move(entries));
        } else {
            sc.force = ForceField::zero(n, k);
        }

        if (j.contains("potential")) sc.potential = Expr::parse(j.at("potential").get<std::string>(), sc.chart);

        if (j.contains("vector")) {
            std::vector<Expr> comps;
            for (const auto& cell : j.at("vector")) comps.push_back(Expr::parse(cell.get<std::string>(), sc.chart));
            sc.vect = ProlongedVector(sc.chart, std::move(comps));
        }

        const auto& init = j.at("initial");
        sc.initial = KVelocity(n, k);
        auto q = init.at("q").get<std::vector<double>>();
        if (static_cast<int>(q.size()) != n) throw ScenarioError("initial q dimension mismatch");
        for (int i = 0; i < n; ++i) sc.initial.q(i) = q[i];
        const auto& qd = init.at("qdot");
        if (static_cast<int>(qd.size()) != n) throw ScenarioError("initial qdot shape mismatch");
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(qd[i].size()) != k) throw ScenarioError("initial qdot shape mismatch");
            for (int a = 0; a < k; ++a) sc.initial.qdot(i, a) = qd[i][a].get<double>();
        }

        sc.task = j.at("task").get<std::string>();
        static const char* tasks[] = {"christoffel", "geodesic", "newton", "ddw", "noether", "verify"};
        bool known = false;
        for (const char* t : tasks)
            if (sc.task == t) known = true;
        if (!known) throw ScenarioError("unknown task '" + sc.task + "'");

        if (j.contains("tolerances"))
            for (auto it = j.at("tolerances").begin(); it != j.at("tolerances").end(); ++it)
                sc.tolerances[it.key()] = it.value().get<double>();
        return sc;
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("scenario validation error: ") + e.what());
    }
}

bool Report::ok() const {
    for (const Check& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string Report::body() const {
    std::ostringstream os;
    os << "task: " << task << "\n";
    os << "seed: " << seed << "\n";
    for (const Check& c : checks)
        os << "check " << c.name << ": value=" << fmt(c.value) << " tol=" << fmt(c.tolerance) << " "
           << (c.pass ? "PASS" : "FAIL") << "\n";
    for (const std::string& a : artifacts) os << "artifact: " << a << "\n";
    os << "status: " << (ok() ? "PASS" : "FAIL") << "\n";
    return os.str();
}

namespace {

void add_check(Report& rep, const std::string& name, double value, double tolerance) {
    rep.checks.push_back({name, value, tolerance, std::abs(value) <= tolerance});
}

/// value expected to match a target, not to be small
void add_match(Report& rep, const std::string& name, double value, double target, double tolerance) {
    rep.checks.push_back({name + " (target " + fmt(target) + ")", value, tolerance,
                          std::abs(value - target) <= tolerance});
}

KVelocity random_state(const Scenario& sc, std::mt19937_64& rng, int k) {
    std::uniform_real_distribution<double> dq(-0.2, 0.2), dv(-1.0, 1.0);
    KVelocity X(sc.chart.n, k);
    for (int i = 0; i < sc.chart.n; ++i) X.q(i) = sc.initial.q(i) + dq(rng);
    for (int i = 0; i < sc.chart.n; ++i)
        for (int a = 0; a < k; ++a) X.qdot(i, a) = dv(rng);
    return X;
}

bool rank1_data(const KVelocity& X) {
    if (X.k() == 1) return true;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(X.qdot);
    return svd.singularValues().size() < 2 ||
           svd.singularValues()(1) < 1e-10 * std::max(1.0, svd.singularValues()(0));
}

bool state_free(const ExprNode* nd) {
    if (!nd) return false;
    if (nd->kind == ExprKind::Coord || nd->kind == ExprKind::Vel) return false;
    if (nd->a && !state_free(nd->a.get())) return false;
    if (nd->b && !state_free(nd->b.get())) return false;
    return true;
}

bool constant_force(const ForceField& F, Tens3& out) {
    out = Tens3(F.n(), F.k());
    if (F.is_zero()) return true;
    const Eigen::VectorXd q = Eigen::VectorXd::Zero(F.n());
    const Eigen::MatrixXd qd = Eigen::MatrixXd::Zero(F.n(), F.k());
    for (int i = 0; i < F.n(); ++i)
        for (int a = 0; a < F.k(); ++a)
            for (int b = 0; b < F.k(); ++b) {
                if (!state_free(F.entry(i, a, b).root())) return false;
                out(i, a, b) = eval_real(F.entry(i, a, b), q, qd);
            }
    return true;
}

/// Build the scenario's solution sheet: closed form on flat space with
/// constant force, otherwise the rank-1 geodesic construction.
Sheet solution_sheet(const Scenario& sc) {
    Tens3 Fc(0, 0);
    if (sc.metric.is_flat_euclidean() && constant_force(sc.force, Fc))
        return flat_newton_sheet(Fc, sc.initial.q, sc.initial.qdot, sc.grid);
    if (!sc.force.is_zero()) throw ScenarioError("no sheet construction for a curved metric with force");
    if (!rank1_data(sc.initial)) throw ScenarioError("initial velocity data must be rank 1 on a curved metric");
    return rank1_sheet(sc.metric, sc.initial, sc.grid);
}

void emit_sheet(Report& rep, const Sheet& sheet, const std::string& out_dir, const std::string& name,
                bool overwrite) {
    std::string path = out_dir + "/" + name;
    write_sheet_csv(sheet, path, overwrite);
    rep.artifacts.push_back(path);
}

void run_verify(const Scenario& sc, Report& rep, std::mt19937_64& rng) {
    const int k = sc.grid.k();
    const MetricField& g = sc.metric;
    const int n = g.n();

    double identity_worst = 0.0, closed_worst = 0.0, trace_worst = 0.0, newton_worst = 0.0;
    double roundtrip_worst = 0.0, noether_worst = 0.0, reduction_worst = 0.0;
    std::uniform_real_distribution<double> fdist(-1.0, 1.0);

    SOPDE geo = geodesic_sopde(g);
    for (int trial = 0; trial < 100; ++trial) {
        KVelocity X = random_state(sc, rng, k);

        identity_worst =
            std::max(identity_worst, newton_identity_check(g, geo, ForceField::zero(n, k), X).max_abs());

        EndValuedOneForm a = calT(g, X);
        EndValuedOneForm b = calT_closed_form(g, X);
        a -= b;
        closed_worst = std::max(closed_worst, a.max_abs());

        // trace of calT against the differential of the kinetic energy
        EndValuedOneForm t = calT(g, X);
        Eigen::VectorXd tq;
        Eigen::MatrixXd tqd;
        t.trace(tq, tqd);
        {
            EvalEnv<Jet> env;
            for (int i = 0; i < n; ++i) env.coords.push_back(Jet::variable(n, 1, X.q(i), i));
            Eigen::MatrixXd gm = g.eval(X.q);
            for (int i = 0; i < n; ++i) {
                Jet dT = Jet::constant(n, 1, 0.0);
                for (int a2 = 0; a2 < k; ++a2)
                    for (int r = 0; r < n; ++r)
                        for (int c = 0; c < n; ++c)
                            dT += 0.5 * g.entry(r, c).eval(env) * X.qdot(r, a2) * X.qdot(c, a2);
                trace_worst = std::max(trace_worst, std::abs(tq(i) - dT.deriv1(i)));
            }
            for (int i = 0; i < n; ++i)
                for (int ga = 0; ga < k; ++ga) {
                    double dTdv = 0.0;
                    for (int j = 0; j < n; ++j) dTdv += gm(i, j) * X.qdot(j, ga);
                    trace_worst = std::max(trace_worst, std::abs(tqd(i, ga) - dTdv));
                }
        }

        // random symmetric constant force: identity and roundtrip
        Tens3 Fv(n, k);
        for (int i = 0; i < n; ++i)
            for (int a2 = 0; a2 < k; ++a2)
                for (int b2 = a2; b2 < k; ++b2) {
                    Fv(i, a2, b2) = fdist(rng);
                    Fv(i, b2, a2) = Fv(i, a2, b2);
                }
        ForceField F = sc.force.is_zero() ? ForceField::constant(Fv) : sc.force;
        SOPDE newton = newton_sopde(g, F);
        newton_worst = std::max(newton_worst, newton_identity_check(g, newton, F, X).max_abs());

        Tens3 Frec = force_from_sopde(g, newton, X);
        Tens3 Fexp = F.eval(X.q, X.qdot);
        for (int i = 0; i < n; ++i)
            for (int a2 = 0; a2 < k; ++a2)
                for (int b2 = 0; b2 < k; ++b2)
                    roundtrip_worst = std::max(roundtrip_worst, std::abs(Frec(i, a2, b2) - Fexp(i, a2, b2)));

        if (sc.vect) {
            auto [lhs, rhs] = hamilton_noether_check(g, F, newton, *sc.vect, X);
            noether_worst = std::max(noether_worst, std::abs(lhs - rhs));
        }

        // k = 1 reduction: calT equals the differential of the kinetic energy
        {
            KVelocity X1(n, 1);
            X1.q = X.q;
            X1.qdot = X.qdot.col(0);
            EndValuedOneForm t1 = calT(g, X1);
            Eigen::VectorXd tq1;
            Eigen::MatrixXd tqd1;
            t1.trace(tq1, tqd1);
            EvalEnv<Jet> env;
            for (int i = 0; i < n; ++i) env.coords.push_back(Jet::variable(n, 1, X.q(i), i));
            Eigen::MatrixXd gm = g.eval(X.q);
            for (int i = 0; i < n; ++i) {
                Jet dT = Jet::constant(n, 1, 0.0);
                for (int r = 0; r < n; ++r)
                    for (int c = 0; c < n; ++c)
                        dT += 0.5 * g.entry(r, c).eval(env) * X1.qdot(r, 0) * X1.qdot(c, 0);
                reduction_worst = std::max(reduction_worst, std::abs(tq1(i) - dT.deriv1(i)));
                double dTdv = 0.0;
                for (int j = 0; j < n; ++j) dTdv += gm(i, j) * X1.qdot(j, 0);
                reduction_worst = std::max(reduction_worst, std::abs(tqd1(i, 0) - dTdv));
            }
        }
    }

    add_check(rep, "geodesic identity residual", identity_worst, tol(sc, "identity", 1e-9));
    add_check(rep, "closed form vs definition", closed_worst, tol(sc, "closed_form", 1e-9));
    add_check(rep, "newton identity residual", newton_worst, tol(sc, "identity", 1e-9));
    add_check(rep, "trace law", trace_worst, tol(sc, "trace", 1e-10));
    add_check(rep, "force roundtrip", roundtrip_worst, tol(sc, "roundtrip", 1e-12));
    add_check(rep, "classical reduction", reduction_worst, tol(sc, "trace", 1e-10));
    if (sc.vect) add_check(rep, "hamilton-noether identity", noether_worst, tol(sc, "noether", 1e-9));
}

}  // namespace

Report run_scenario(const Scenario& sc, const std::string& out_dir, bool overwrite, unsigned seed) {
    Report rep;
    rep.task = sc.task;
    rep.seed = seed;
    std::mt19937_64 rng(seed);
    std::filesystem::create_directories(out_dir);

    const MetricField& g = sc.metric;
    const int n = g.n();
    const int k = sc.grid.k();

    if (sc.task == "christoffel") {
        Tens3 gamma = christoffel(g, sc.initial.q);
        double asym = 0.0;
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    asym = std::max(asym, std::abs(gamma(l, i, j) - gamma(l, j, i)));
        add_check(rep, "christoffel lower-index symmetry", asym, 0.0);
        std::ostringstream os;
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (gamma(l, i, j) != 0.0)
                        os << "gamma[" << (l + 1) << "][" << (i + 1) << "][" << (j + 1)
                           << "] = " << fmt(gamma(l, i, j)) << "\n";
        std::ofstream(out_dir + "/christoffel.txt") << os.str();
        rep.artifacts.push_back(out_dir + "/christoffel.txt");
    } else if (sc.task == "geodesic") {
        Sheet sheet = solution_sheet(sc);
        emit_sheet(rep, sheet, out_dir, "geodesic_sheet.csv", overwrite);
        add_check(rep, "geodesic sheet residual", newton_residual(g, ForceField::zero(n, k), sheet).max_abs,
                  tol(sc, "geodesic_residual", 1e-5));
        // energy conservation along the underlying geodesic
        if (sc.initial.qdot.col(0).norm() > 0.0) {
            GeodesicPath path = integrate_geodesic(g, sc.initial.q, sc.initial.qdot.col(0), 1.0, 1e-3);
            double e0 = 0.0, worst = 0.0;
            for (size_t s = 0; s < path.q.size(); ++s) {
                Eigen::VectorXd v = path.qdot[s];
                double e = 0.5 * v.dot(g.eval(path.q[s]) * v);
                if (s == 0)
                    e0 = e;
                else
                    worst = std::max(worst, std::abs(e - e0));
            }
            add_check(rep, "geodesic energy drift", worst, tol(sc, "energy", 1e-8));
        }
    } else if (sc.task == "newton") {
        SOPDE newton = newton_sopde(g, sc.force);
        double rt = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            KVelocity X = random_state(sc, rng, k);
            Tens3 Frec = force_from_sopde(g, newton, X);
            Tens3 Fexp = sc.force.eval(X.q, X.qdot);
            for (int i = 0; i < n; ++i)
                for (int a = 0; a < k; ++a)
                    for (int b = 0; b < k; ++b) rt = std::max(rt, std::abs(Frec(i, a, b) - Fexp(i, a, b)));
        }
        add_check(rep, "force roundtrip", rt, tol(sc, "roundtrip", 1e-12));
        add_check(rep, "newton identity residual",
                  newton_identity_check(g, newton, sc.force, sc.initial).max_abs(), tol(sc, "identity", 1e-9));
        Tens3 Fc(0, 0);
        if (g.is_flat_euclidean() && constant_force(sc.force, Fc)) {
            Sheet sheet = flat_newton_sheet(Fc, sc.initial.q, sc.initial.qdot, sc.grid);
            emit_sheet(rep, sheet, out_dir, "newton_sheet.csv", overwrite);
            add_check(rep, "newton sheet residual", newton_residual(g, sc.force, sheet).max_abs,
                      tol(sc, "sheet_residual", 1e-10));
        }
    } else if (sc.task == "ddw") {
        Sheet sheet = solution_sheet(sc);
        emit_sheet(rep, sheet, out_dir, "solution_sheet.csv", overwrite);
        NewtonVsDdw cmp = newton_vs_ddw_report(g, sc.force, sc.potential, sheet);
        add_check(rep, "solution newton residual", cmp.newton_max, tol(sc, "sheet_residual", 1e-8));
        add_check(rep, "solution ddw residual", cmp.ddw.max_abs(), tol(sc, "ddw_residual", 1e-8));
        if (g.is_flat_euclidean() && sc.force.is_zero() && k == 2) {
            // witness sheet: canonical-equation solution that fails the full law
            Sheet harmonic = sample_sheet(sc.grid, n, [&](const Eigen::VectorXd& t) {
                Eigen::VectorXd q = sc.initial.q;
                q(0) += t(0) * t(0) - t(1) * t(1);
                return q;
            });
            emit_sheet(rep, harmonic, out_dir, "harmonic_sheet.csv", overwrite);
            NewtonVsDdw wit = newton_vs_ddw_report(g, sc.force, sc.potential, harmonic);
            add_check(rep, "harmonic ddw residual", wit.ddw.max_abs(), tol(sc, "ddw_residual", 1e-8));
            add_match(rep, "harmonic newton residual", wit.newton_max, 2.0, tol(sc, "witness", 1e-8));
        }
    } else if (sc.task == "noether") {
        if (!sc.vect) throw ScenarioError("noether task needs a vector field");
        std::vector<KVelocity> samples;
        for (int trial = 0; trial < 50; ++trial) samples.push_back(random_state(sc, rng, k));
        add_check(rep, "lagrangian symmetry defect", symmetry_defect(g, sc.potential, *sc.vect, samples),
                  tol(sc, "symmetry", 1e-10));
        Sheet sheet = solution_sheet(sc);
        emit_sheet(rep, sheet, out_dir, "solution_sheet.csv", overwrite);
        add_check(rep, "noether current divergence", noether_divergence(g, *sc.vect, sheet).max_divergence,
                  tol(sc, "divergence", 1e-5));
    } else if (sc.task == "verify") {
        run_verify(sc, rep, rng);
    }

    std::ofstream(out_dir + "/report.txt") << rep.body();
    return rep;
}

}  // namespace kfield
