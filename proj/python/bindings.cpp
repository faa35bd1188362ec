#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "specflow/experiments.hpp"
#include "specflow/gridflow.hpp"
#include "specflow/serialize.hpp"
#include "specflow/specialflow.hpp"

namespace py = pybind11;
using namespace specflow;

namespace {

QVec qvec(const std::vector<double>& xs) {
    QVec v(static_cast<int>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) v[static_cast<int>(i)] = Coord::from_double(xs[i]);
    return v;
}

Vec vec(const std::vector<double>& xs) {
    Vec v(static_cast<int>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) v[static_cast<int>(i)] = xs[i];
    return v;
}

template <class V>
std::vector<double> list(const V& v) {
    std::vector<double> out;
    for (int i = 0; i < v.dim(); ++i) {
        if constexpr (std::is_same_v<V, QVec>)
            out.push_back(v[i].to_double());
        else
            out.push_back(static_cast<double>(v[i]));
    }
    return out;
}

ShiftSpec shift_spec(const std::string& region, double K, const std::vector<double>& v, std::optional<double> L) {
    ShiftSpec s{region_from_json(nlohmann::json::parse(region)), Coord::from_double(K), qvec(v), std::nullopt};
    if (L) s.L = Coord::from_double(*L);
    s.validate();
    return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ConstructionError>(m, "ConstructionError", PyExc_RuntimeError);

    m.def("command_names", &command_names);

    m.def(
        "run_command",
        [](const std::string& command, const std::string& config, const std::string& format) {
            ExperimentConfig cfg = parse_config(config);
            ExperimentResult res;
            {
                py::gil_scoped_release release;
                res = run_command(command, cfg, format);
            }
            std::vector<std::string> names;
            py::dict artifacts;
            for (const auto& a : res.artifacts) {
                names.push_back(a.name);
                artifacts[py::str(a.name)] = py::str(a.content);
            }
            std::string report = dump_report(report_json(res.report, to_json(cfg), names));
            return py::make_tuple(report, artifacts);
        },
        py::arg("command"), py::arg("config") = "", py::arg("format") = "json");

    m.def(
        "choose_constants",
        [](double alpha) {
            GridParams g = choose_constants(alpha);
            return py::make_tuple(g.R.to_double(), g.K.to_double());
        },
        py::arg("alpha"));

    m.def(
        "snap_vector", [](const std::vector<double>& s) { return list(snap_vector(qvec(s))); }, py::arg("s"));

    m.def(
        "shift_f",
        [](const std::string& region, double K, const std::vector<double>& v, const std::vector<double>& x,
           std::optional<double> L) { return list(eval_f(shift_spec(region, K, v, L), vec(x))); },
        py::arg("region"), py::arg("K"), py::arg("v"), py::arg("x"), py::arg("L") = py::none());

    m.def(
        "shift_h",
        [](const std::string& region, double K, const std::vector<double>& v, const std::vector<double>& x,
           std::optional<double> L) { return list(eval_h(shift_spec(region, K, v, L), vec(x))); },
        py::arg("region"), py::arg("K"), py::arg("v"), py::arg("x"), py::arg("L") = py::none());

    m.def(
        "suspend1d",
        [](std::function<double(std::int64_t)> f, double floor, std::int64_t radius, std::int64_t z, double t,
           double r) {
            SuspensionSystem1D<double> sys{[f](const OrbitPoint& p) { return f(p.index[0]); }, floor, radius};
            SuspPoint<double> q = suspend1d(sys, SuspPoint<double>{OrbitPoint{0, IVec{z}}, t}, r);
            return py::make_tuple(q.z.index[0], q.t);
        },
        py::arg("ceiling"), py::arg("floor"), py::arg("radius"), py::arg("z"), py::arg("t"), py::arg("r"));
}
