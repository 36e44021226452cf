#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kfield/scenario.hpp"

namespace py = pybind11;
using namespace kfield;

namespace {

py::array_t<double> tens3_to_array(const Tens3& t) {
    py::array_t<double> out(std::vector<py::ssize_t>{t.n(), t.k(), t.k()});
    auto r = out.mutable_unchecked<3>();
    for (int i = 0; i < t.n(); ++i)
        for (int a = 0; a < t.k(); ++a)
            for (int b = 0; b < t.k(); ++b) r(i, a, b) = t(i, a, b);
    return out;
}

Tens3 array_to_tens3(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 3 || arr.shape(1) != arr.shape(2))
        throw DimensionError("expected an (n, k, k) array");
    Tens3 t(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)));
    auto r = arr.unchecked<3>();
    for (int i = 0; i < t.n(); ++i)
        for (int a = 0; a < t.k(); ++a)
            for (int b = 0; b < t.k(); ++b) t(i, a, b) = r(i, a, b);
    return t;
}

KVelocity make_state(const Eigen::VectorXd& q, const Eigen::MatrixXd& qdot) {
    if (q.size() != qdot.rows()) throw DimensionError("q and qdot disagree on the dimension");
    return KVelocity(q, qdot);
}

Grid make_grid(const std::vector<double>& lo, const std::vector<double>& hi, const std::vector<int>& counts) {
    return Grid(lo, hi, counts);
}

py::array_t<double> sheet_values(const Sheet& s) {
    py::array_t<double> out(std::vector<py::ssize_t>{s.grid.node_count(), s.n()});
    auto r = out.mutable_unchecked<2>();
    for (long node = 0; node < s.grid.node_count(); ++node)
        for (int i = 0; i < s.n(); ++i) r(node, i) = s.at(node, i);
    return out;
}

Sheet make_sheet(const Grid& grid, const py::array_t<double, py::array::c_style | py::array::forcecast>& values) {
    if (values.ndim() != 2 || values.shape(0) != grid.node_count())
        throw DimensionError("values must be (node_count, n)");
    Sheet s(grid, static_cast<int>(values.shape(1)));
    auto r = values.unchecked<2>();
    for (long node = 0; node < grid.node_count(); ++node)
        for (int i = 0; i < s.n(); ++i) s.at(node, i) = r(node, i);
    return s;
}

ForceField make_force(const MetricField& g, int k, const std::vector<std::string>& entries) {
    const int n = g.n();
    if (static_cast<int>(entries.size()) != n * k * k) throw DimensionError("expected n*k*k force entries");
    std::vector<Expr> parsed;
    parsed.reserve(entries.size());
    for (const std::string& e : entries) parsed.push_back(Expr::parse(e, g.chart(), k));
    return ForceField(n, k, std::move(parsed));
}

}  // namespace

PYBIND11_MODULE(_pykfield, m) {
    m.doc() = "geodesic k-fields, the force/SOPDE correspondence and its traced reduction";

    py::register_exception<DimensionError>(m, "DimensionError");
    py::register_exception<DomainError>(m, "DomainError");
    py::register_exception<DegenerateMetricError>(m, "DegenerateMetricError");
    py::register_exception<ParseError>(m, "ExprParseError");
    py::register_exception<ScenarioError>(m, "ScenarioError");

    py::class_<MetricField>(m, "Metric")
        .def_static("from_catalog", &MetricField::from_catalog, py::arg("name"), py::arg("dim") = 0)
        .def_static("custom",
                    [](int n, const std::vector<std::string>& entries) {
                        if (static_cast<int>(entries.size()) != n * n)
                            throw DimensionError("expected n*n metric entries");
                        Chart chart(n);
                        std::vector<Expr> parsed;
                        for (const std::string& e : entries) parsed.push_back(Expr::parse(e, chart));
                        return MetricField(chart, std::move(parsed));
                    })
        .def_property_readonly("n", &MetricField::n)
        .def("eval", &MetricField::eval, py::arg("q"))
        .def("inverse", &MetricField::inverse, py::arg("q"))
        .def("christoffel",
             [](const MetricField& g, const Eigen::VectorXd& q) { return tens3_to_array(christoffel(g, q)); },
             py::arg("q"));

    py::class_<ForceField>(m, "Force")
        .def_static("zero", &ForceField::zero, py::arg("n"), py::arg("k"))
        .def_static("constant",
                    [](const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
                        return ForceField::constant(array_to_tens3(arr));
                    })
        .def_static("from_expressions", &make_force, py::arg("metric"), py::arg("k"), py::arg("entries"))
        .def_property_readonly("n", &ForceField::n)
        .def_property_readonly("k", &ForceField::k)
        .def("eval", [](const ForceField& F, const Eigen::VectorXd& q, const Eigen::MatrixXd& qdot) {
            return tens3_to_array(F.eval(q, qdot));
        });

    py::class_<Grid>(m, "Grid")
        .def(py::init(&make_grid), py::arg("lo"), py::arg("hi"), py::arg("counts"))
        .def_property_readonly("k", &Grid::k)
        .def_property_readonly("node_count", &Grid::node_count)
        .def("h", &Grid::h, py::arg("axis"));

    py::class_<Sheet>(m, "Sheet")
        .def(py::init(&make_sheet), py::arg("grid"), py::arg("values"))
        .def_property_readonly("grid", [](const Sheet& s) { return s.grid; })
        .def_property_readonly("n", &Sheet::n)
        .def_property_readonly("values", &sheet_values)
        .def("write_csv", &write_sheet_csv, py::arg("path"), py::arg("overwrite") = false)
        .def_static("read_csv", &read_sheet_csv, py::arg("path"));

    m.def("exp_map", &exp_map, py::arg("metric"), py::arg("q"), py::arg("v"), py::arg("steps") = 1000);

    m.def("geodesic_coefficients",
          [](const MetricField& g, const Eigen::VectorXd& q, const Eigen::MatrixXd& qdot) {
              return tens3_to_array(geodesic_sopde(g).coefficients(make_state(q, qdot)));
          },
          py::arg("metric"), py::arg("q"), py::arg("qdot"));

    m.def("newton_coefficients",
          [](const MetricField& g, const ForceField& F, const Eigen::VectorXd& q,
             const Eigen::MatrixXd& qdot) {
              return tens3_to_array(newton_sopde(g, F).coefficients(make_state(q, qdot)));
          },
          py::arg("metric"), py::arg("force"), py::arg("q"), py::arg("qdot"));

    m.def("recover_force",
          [](const MetricField& g, const py::array_t<double, py::array::c_style | py::array::forcecast>& A,
             const Eigen::VectorXd& q, const Eigen::MatrixXd& qdot) {
              Tens3 coeffs = array_to_tens3(A);
              SOPDE D = SOPDE::custom([coeffs](const Eigen::VectorXd&, const Eigen::MatrixXd&) { return coeffs; });
              return tens3_to_array(force_from_sopde(g, D, make_state(q, qdot)));
          },
          py::arg("metric"), py::arg("coefficients"), py::arg("q"), py::arg("qdot"));

    m.def("identity_residual",
          [](const MetricField& g, const ForceField& F, const Eigen::VectorXd& q,
             const Eigen::MatrixXd& qdot) {
              SOPDE D = newton_sopde(g, F);
              return newton_identity_check(g, D, F, make_state(q, qdot)).max_abs();
          },
          py::arg("metric"), py::arg("force"), py::arg("q"), py::arg("qdot"));

    m.def("rank1_sheet",
          [](const MetricField& g, const Eigen::VectorXd& q, const Eigen::MatrixXd& qdot, const Grid& grid) {
              return rank1_sheet(g, make_state(q, qdot), grid);
          },
          py::arg("metric"), py::arg("q"), py::arg("qdot"), py::arg("grid"));

    m.def("flat_newton_sheet",
          [](const py::array_t<double, py::array::c_style | py::array::forcecast>& F,
             const Eigen::VectorXd& a, const Eigen::MatrixXd& b, const Grid& grid) {
              return flat_newton_sheet(array_to_tens3(F), a, b, grid);
          },
          py::arg("force"), py::arg("a"), py::arg("b"), py::arg("grid"));

    m.def("newton_residual",
          [](const MetricField& g, const ForceField& F, const Sheet& sheet) {
              return newton_residual(g, F, sheet).max_abs;
          },
          py::arg("metric"), py::arg("force"), py::arg("sheet"));

    m.def("ddw_residual",
          [](const MetricField& g, const std::string& potential, const Sheet& sheet) {
              Expr U = potential.empty() ? Expr() : Expr::parse(potential, g.chart());
              DdwResidual r = ddw_residual(g, U, sheet);
              return py::make_tuple(r.max_q, r.max_p);
          },
          py::arg("metric"), py::arg("potential"), py::arg("sheet"));

    m.def("run_scenario",
          [](const std::string& path, const std::string& out_dir, bool overwrite, unsigned seed) {
              Scenario sc = Scenario::load(path);
              Report rep = run_scenario(sc, out_dir, overwrite, seed);
              py::dict d;
              d["task"] = rep.task;
              d["ok"] = rep.ok();
              d["body"] = rep.body();
              py::list checks;
              for (const Check& c : rep.checks) {
                  py::dict e;
                  e["name"] = c.name;
                  e["value"] = c.value;
                  e["tolerance"] = c.tolerance;
                  e["pass"] = c.pass;
                  checks.append(e);
              }
              d["checks"] = checks;
              d["artifacts"] = rep.artifacts;
              return d;
          },
          py::arg("path"), py::arg("out_dir"), py::arg("overwrite") = false, py::arg("seed") = 1);
}
