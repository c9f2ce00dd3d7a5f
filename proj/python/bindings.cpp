#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "critprog/error.hpp"
#include "critprog/experiment.hpp"
#include "critprog/forecast.hpp"
#include "critprog/matrix.hpp"
#include "critprog/recognizer.hpp"
#include "critprog/report.hpp"
#include "critprog/synthgen.hpp"

namespace py = pybind11;
using namespace critprog;

namespace {

FactorSelection selection_or_all(const TemporalMatrix& m,
                                 const std::optional<std::vector<std::string>>& factors) {
    return factors ? FactorSelection(*factors) : FactorSelection::all(m);
}

BacktestConfig make_config(double quorum, const std::string& mode, std::size_t min_train_years,
                           std::size_t min_train_critical, double widen_eps) {
    BacktestConfig cfg;
    cfg.rule = QuorumRule(quorum);
    cfg.mode = parse_eval_mode(mode);
    cfg.min_train_years = min_train_years;
    cfg.min_train_critical = min_train_critical;
    cfg.widen_eps = widen_eps;
    return cfg;
}

py::object optional_p(const std::optional<double>& p) {
    return p ? py::cast(*p) : py::none();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Critical-year recognition from per-factor value intervals";
    m.attr("__version__") = std::string(kToolVersion);

    // ValueError subclass carrying the library error code as `.code`.
    static PyObject* error_type =
        PyErr_NewException("critprog._core.CritprogError", PyExc_ValueError, nullptr);
    m.attr("CritprogError") = py::handle(error_type);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::handle(error_type)(e.what());
            exc.attr("code") = std::string(to_string(e.code()));
            PyErr_SetObject(error_type, exc.ptr());
        }
    });

    py::class_<TemporalMatrix>(m, "TemporalMatrix")
        .def(py::init<std::vector<int>, std::vector<double>, std::vector<std::string>,
                      std::vector<std::vector<double>>>(),
             py::arg("years"), py::arg("incidence"), py::arg("factor_names"), py::arg("columns"))
        .def_property_readonly("years", [](const TemporalMatrix& t) {
            return std::vector<int>(t.years().begin(), t.years().end());
        })
        .def_property_readonly("incidence", [](const TemporalMatrix& t) {
            return std::vector<double>(t.incidence().begin(), t.incidence().end());
        })
        .def_property_readonly("factor_names", &TemporalMatrix::factor_names)
        .def_property_readonly("n_years", &TemporalMatrix::n_years)
        .def_property_readonly("n_factors", &TemporalMatrix::n_factors)
        .def("column", [](const TemporalMatrix& t, const std::string& name) {
            auto c = t.column(std::string_view(name));
            return std::vector<double>(c.begin(), c.end());
        })
        .def("__eq__", [](const TemporalMatrix& a, const TemporalMatrix& b) { return a == b; });

    py::class_<CriticalLabels>(m, "CriticalLabels")
        .def_property_readonly("flags", &CriticalLabels::flags)
        .def_property_readonly("n_critical", &CriticalLabels::n_critical)
        .def_property_readonly("threshold",
                               [](const CriticalLabels& l) { return l.threshold().value; });

    py::class_<FactorInterval>(m, "FactorInterval")
        .def_readonly("factor", &FactorInterval::factor)
        .def_readonly("lo", &FactorInterval::lo)
        .def_readonly("hi", &FactorInterval::hi)
        .def_readonly("widen_eps", &FactorInterval::widen_eps)
        .def("contains", &FactorInterval::contains);

    py::class_<IntervalProfile>(m, "IntervalProfile")
        .def_readonly("intervals", &IntervalProfile::intervals)
        .def_readonly("n_critical_train", &IntervalProfile::n_critical_train);

    py::class_<RecognitionResult>(m, "RecognitionResult")
        .def_readonly("flagged_years", &RecognitionResult::flagged_years)
        .def_readonly("x", &RecognitionResult::x)
        .def_readonly("y", &RecognitionResult::y)
        .def_property_readonly("p", [](const RecognitionResult& r) { return optional_p(r.p); })
        .def_property_readonly("membership", [](const RecognitionResult& r) {
            std::vector<std::pair<int, std::size_t>> out;
            for (const auto& e : r.membership) out.emplace_back(e.year, e.count);
            return out;
        })
        .def("__eq__", [](const RecognitionResult& a, const RecognitionResult& b) { return a == b; });

    py::class_<Verdict>(m, "Verdict")
        .def_readonly("year", &Verdict::year)
        .def_property_readonly("prediction",
                               [](const Verdict& v) { return std::string(to_string(v.prediction)); })
        .def_readonly("membership", &Verdict::membership)
        .def_readonly("truth", &Verdict::truth);

    py::class_<BacktestResult>(m, "BacktestResult")
        .def_readonly("verdicts", &BacktestResult::verdicts)
        .def_readonly("x", &BacktestResult::x)
        .def_readonly("y", &BacktestResult::y)
        .def_property_readonly("p", [](const BacktestResult& r) { return optional_p(r.p); })
        .def_readonly("n_no_forecast", &BacktestResult::n_no_forecast)
        .def("flagged_years", &BacktestResult::flagged_years);

    m.def("parse_matrix", [](const std::string& text) { return parse_matrix(text); }, py::arg("text"));
    m.def("serialize_matrix", &serialize_matrix, py::arg("matrix"));
    m.def(
        "label_critical",
        [](const TemporalMatrix& t, double threshold) {
            return label_critical(t, CriticalThreshold::expert(threshold));
        },
        py::arg("matrix"), py::arg("threshold"));
    m.def(
        "select_threshold",
        [](const TemporalMatrix& t, std::size_t min_critical) {
            return select_threshold(t, min_critical).value;
        },
        py::arg("matrix"), py::arg("min_critical") = 2);
    m.def(
        "apply_lag",
        [](const TemporalMatrix& t, const std::string& factor, int lag) {
            return apply_lag(t, factor, lag);
        },
        py::arg("matrix"), py::arg("factor"), py::arg("lag"));
    m.def(
        "select_factors",
        [](const TemporalMatrix& t, std::vector<std::string> names) {
            return select_factors(t, FactorSelection(std::move(names)));
        },
        py::arg("matrix"), py::arg("factors"));

    m.def("precision",
          [](std::size_t x, std::size_t y) { return optional_p(precision(x, y)); },
          py::arg("x"), py::arg("y"));
    m.def(
        "required_hits",
        [](double q, std::size_t n_factors) { return QuorumRule(q).required(n_factors); },
        py::arg("quorum"), py::arg("n_factors"));
    m.def(
        "build_profile",
        [](const TemporalMatrix& t, const CriticalLabels& l,
           const std::optional<std::vector<std::string>>& factors, double widen_eps) {
            return build_profile(t, l, selection_or_all(t, factors), widen_eps);
        },
        py::arg("matrix"), py::arg("labels"), py::arg("factors") = py::none(),
        py::arg("widen_eps") = 0.0);
    m.def(
        "classify_year",
        [](const FactorValues& values, const IntervalProfile& p, double q) {
            return classify_year(values, p, QuorumRule(q));
        },
        py::arg("values"), py::arg("profile"), py::arg("quorum"));
    m.def(
        "evaluate_insample",
        [](const TemporalMatrix& t, const CriticalLabels& l, const IntervalProfile& p, double q) {
            return evaluate_insample(t, l, p, QuorumRule(q));
        },
        py::arg("matrix"), py::arg("labels"), py::arg("profile"), py::arg("quorum"));
    m.def(
        "oracle_evaluate",
        [](const TemporalMatrix& t, const CriticalLabels& l,
           const std::optional<std::vector<std::string>>& factors, double q) {
            return oracle_evaluate(t, l, selection_or_all(t, factors), QuorumRule(q));
        },
        py::arg("matrix"), py::arg("labels"), py::arg("factors") = py::none(), py::arg("quorum") = 1.0);
    m.def(
        "rolling_backtest",
        [](const TemporalMatrix& t, const CriticalLabels& l,
           const std::optional<std::vector<std::string>>& factors, double quorum,
           const std::string& mode, std::size_t min_train_years, std::size_t min_train_critical,
           double widen_eps) {
            auto cfg = make_config(quorum, mode, min_train_years, min_train_critical, widen_eps);
            cfg.threshold = l.threshold();
            return rolling_backtest(t, l, selection_or_all(t, factors), cfg);
        },
        py::arg("matrix"), py::arg("labels"), py::arg("factors") = py::none(),
        py::arg("quorum") = 0.75, py::arg("mode") = "rolling", py::arg("min_train_years") = 5,
        py::arg("min_train_critical") = 2, py::arg("widen_eps") = 0.0);

    m.def(
        "sweep",
        [](const TemporalMatrix& t, const CriticalLabels& l, const std::string& axis_name,
           py::object grid, const std::optional<std::vector<std::string>>& factors, double quorum,
           const std::string& mode, std::size_t min_train_years, std::size_t min_train_critical) {
            const auto axis = parse_sweep_axis(axis_name);
            auto cfg = make_config(quorum, mode, min_train_years, min_train_critical, 0.0);
            cfg.threshold = l.threshold();
            SweepSpec spec{axis, {}, SweepBase{cfg, selection_or_all(t, factors)}};
            switch (axis) {
                case SweepAxis::factor_subset:
                    if (grid.is_none() || (py::isinstance<py::str>(grid) && grid.cast<std::string>() == "all")) {
                        spec.grid = SubsetGrid{AllSubsets{}};
                    } else {
                        std::vector<FactorSelection> subsets;
                        for (auto& s : grid.cast<std::vector<std::vector<std::string>>>())
                            subsets.emplace_back(std::move(s));
                        spec.grid = SubsetGrid{std::move(subsets)};
                    }
                    break;
                case SweepAxis::quorum:
                case SweepAxis::threshold: spec.grid = grid.cast<std::vector<double>>(); break;
                case SweepAxis::lag:
                case SweepAxis::row_length: spec.grid = grid.cast<std::vector<int>>(); break;
            }
            const auto report = run_sweep(t, l, spec);
            py::list rows;
            for (const auto& r : report.rows) {
                py::dict d;
                d["configuration"] = r.configuration;
                d["status"] = r.status == RowStatus::ok ? "ok" : "skipped";
                d["skip_reason"] = r.skip_reason;
                d["x"] = r.x;
                d["y"] = r.y;
                d["p"] = optional_p(r.p);
                d["n_no_forecast"] = r.n_no_forecast;
                d["flagged_years"] = r.flagged_years;
                rows.append(d);
            }
            return rows;
        },
        py::arg("matrix"), py::arg("labels"), py::arg("axis"), py::arg("grid") = py::none(),
        py::arg("factors") = py::none(), py::arg("quorum") = 0.75, py::arg("mode") = "rolling",
        py::arg("min_train_years") = 5, py::arg("min_train_critical") = 2);

    m.def(
        "generate",
        [](std::size_t n_years, std::size_t n_factors, std::size_t n_decoy_factors,
           double noise_prob, double critical_fraction, int lag_shift,
           std::optional<int> regime_change_year, std::uint64_t seed) {
            PlantSpec spec;
            spec.n_years = n_years;
            spec.n_factors = n_factors;
            spec.n_decoy_factors = n_decoy_factors;
            spec.noise_prob = noise_prob;
            spec.critical_fraction = critical_fraction;
            spec.lag_shift = lag_shift;
            spec.regime_change_year = regime_change_year;
            spec.seed = seed;
            auto data = generate(spec);
            py::dict truth;
            truth["years"] = data.truth.years;
            truth["is_critical"] = data.truth.is_critical;
            truth["threshold"] = data.truth.threshold;
            truth["lag"] = data.truth.lag;
            std::vector<std::pair<double, double>> ivs;
            for (const auto& iv : data.truth.intervals) ivs.emplace_back(iv.lo, iv.hi);
            truth["intervals"] = ivs;
            return py::make_tuple(std::move(data.matrix), truth);
        },
        py::arg("n_years") = 30, py::arg("n_factors") = 8, py::arg("n_decoy_factors") = 0,
        py::arg("noise_prob") = 0.0, py::arg("critical_fraction") = 0.3, py::arg("lag_shift") = 0,
        py::arg("regime_change_year") = py::none(), py::arg("seed") = 1);
}
