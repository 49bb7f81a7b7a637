// Python module hclab._core. Reports cross the boundary as JSON text and are
// decoded by the package wrapper, so the schema matches the CLI's --out files.

#include <string>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hclab/battery.hpp"
#include "hclab/errors.hpp"
#include "hclab/literals.hpp"
#include "hclab/serialize.hpp"

namespace py = pybind11;
using namespace hclab;

namespace {

// "e1:0.1" or (center, radius)
Ball to_ball(const py::object& o) {
    if (py::isinstance<py::str>(o)) return parse_ball(o.cast<std::string>());
    const auto pair = o.cast<py::tuple>();
    if (pair.size() != 2) throw InvalidArgument("a ball is a literal string or a (center, radius) pair");
    const py::object c = pair[0];
    CVector center = py::isinstance<py::str>(c) ? parse_vector(c.cast<std::string>()) : c.cast<CVector>();
    return Ball(std::move(center), pair[1].cast<double>());
}

HSMatrix to_hs(const py::object& o, std::size_t d) {
    CMatrix m = py::isinstance<py::str>(o) ? parse_matrix(o.cast<std::string>(), d) : o.cast<CMatrix>();
    if (static_cast<std::size_t>(m.rows()) < d) {
        CMatrix padded = CMatrix::Zero(d, std::max<Eigen::Index>(m.cols(), 1));
        padded.topLeftCorner(m.rows(), m.cols()) = m;
        m = std::move(padded);
    }
    return HSMatrix(std::move(m));
}

BatteryConfig to_config(const py::object& o) {
    if (o.is_none()) return {};
    return battery_config_from_json(json::parse(o.cast<std::string>()));
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Truncated operators, ball-intersection oracles and the hypercyclicity battery";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<GuardBandError>(m, "GuardBandError", base.ptr());

    m.def("zoo", [] {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& e : zoo_entries()) out.emplace_back(e.id, e.description);
        return out;
    });

    m.def("materialize", [](const std::string& op, std::size_t d) { return make_operator(op).materialize(d); },
          py::arg("op"), py::arg("d"));

    m.def(
        "required_dim",
        [](const std::string& op, std::size_t support, std::size_t n) {
            return make_operator(op).required_dim(support, n);
        },
        py::arg("op"), py::arg("support"), py::arg("n"));

    m.def(
        "check_certificate",
        [](const std::string& op, std::size_t K, double tol, std::size_t generators, const std::string& seq,
           std::size_t d) {
            auto cert = default_certificate(generators);
            cert.seq = SequenceRule::parse(seq);
            ConvergenceRule rule;
            rule.tol = tol;
            return to_json(check_certificate(make_operator(op), cert, K, rule, d)).dump();
        },
        py::arg("op"), py::arg("K") = 10, py::arg("tol") = 1e-8, py::arg("generators") = 3,
        py::arg("seq") = "k", py::arg("d") = 0);

    m.def(
        "intersects",
        [](const std::string& op, std::size_t n, const py::object& u, const py::object& v, std::size_t d) {
            return to_json(intersects(make_operator(op), n, to_ball(u), to_ball(v), d)).dump();
        },
        py::arg("op"), py::arg("n"), py::arg("U"), py::arg("V"), py::arg("d") = 0);

    m.def(
        "first_hit",
        [](const std::string& op, const py::object& u, const py::object& v, std::size_t n_max, std::size_t d) {
            return to_json(first_hit(make_operator(op), to_ball(u), to_ball(v), n_max, d)).dump();
        },
        py::arg("op"), py::arg("U"), py::arg("V"), py::arg("n_max") = 64, py::arg("d") = 0);

    m.def(
        "criterion_condition",
        [](const std::string& op, const py::object& u, const py::object& v, const py::object& w,
           std::size_t n_max, std::size_t d) {
            return to_json(criterion_condition(make_operator(op), to_ball(u), to_ball(v), to_ball(w), n_max, d))
                .dump();
        },
        py::arg("op"), py::arg("U"), py::arg("V"), py::arg("W"), py::arg("n_max") = 64, py::arg("d") = 0);

    m.def(
        "construct_witness",
        [](const std::string& op, const py::object& a, const py::object& b, double eps, std::size_t d,
           const std::string& mode) {
            WitnessOptions opts;
            if (mode == "constructive") opts.mode = WitnessOptions::Mode::Constructive;
            else if (mode == "oracle") opts.mode = WitnessOptions::Mode::Oracle;
            else if (mode != "auto") throw InvalidArgument("mode must be auto, constructive or oracle");
            return to_json(construct_witness(make_operator(op), to_hs(a, d), to_hs(b, d), eps, d, opts)).dump();
        },
        py::arg("op"), py::arg("A"), py::arg("B"), py::arg("eps") = 0.5, py::arg("d") = 64,
        py::arg("mode") = "auto");

    m.def(
        "run_battery",
        [](const std::string& op, const py::object& config) {
            const auto t = make_operator(op);
            const auto cfg = to_config(config);
            BatteryReport r;
            {
                py::gil_scoped_release release;
                r = run_battery(t, cfg, op);
            }
            return to_json(r).dump();
        },
        py::arg("op"), py::arg("config") = py::none());

    m.def(
        "prop212_battery",
        [](const std::string& op, const std::string& seq, const py::object& config) {
            const auto t = make_operator(op);
            const auto rule = SequenceRule::parse(seq);
            const auto cfg = to_config(config);
            Prop212Report r;
            {
                py::gil_scoped_release release;
                r = prop212_battery(t, rule, cfg);
            }
            return to_json(r).dump();
        },
        py::arg("op"), py::arg("seq") = "k", py::arg("config") = py::none());

    m.def("default_config", [] { return to_json(BatteryConfig{}).dump(); });
}
