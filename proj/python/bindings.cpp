// Python bindings for the core library. Grid functions cross the boundary as
// (ny, nx) numpy arrays plus the rectangle they live on.
#include <memory>
#include <optional>

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pwexp/cli.hpp"
#include "pwexp/config.hpp"
#include "pwexp/correlation.hpp"
#include "pwexp/errors.hpp"
#include "pwexp/examples_gallery.hpp"
#include "pwexp/hypothesis.hpp"
#include "pwexp/norms.hpp"
#include "pwexp/transfer_operator.hpp"

namespace py = pybind11;
using namespace pwexp;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// An induced system together with the built-in example it came from, if any.
struct System {
    std::shared_ptr<const InducedSystem> sys;
    std::optional<ExampleParams> example;
};

System make_system(const MapSource& src, bool unchecked) {
    auto map = std::make_shared<const PiecewiseMap>(build_spec(src, unchecked));
    System out{std::make_shared<const InducedSystem>(induce(map)), std::nullopt};
    if (src.is_example) out.example = src.example;
    return out;
}

ExampleParams linear_params(long a, long b, double L) { return {ExampleId::Linear, a, b, L}; }

Array to_array(const GridFunction& g) {
    Array out({g.ny, g.nx});
    std::copy(g.values.begin(), g.values.end(), out.mutable_data());
    return out;
}

GridFunction from_array(const Array& values, const Rect& rect) {
    if (values.ndim() != 2) throw py::value_error("expected a 2-d array of shape (ny, nx)");
    GridFunction g(rect, static_cast<int>(values.shape(1)), static_cast<int>(values.shape(0)));
    std::copy(values.data(), values.data() + values.size(), g.values.begin());
    return g;
}

GridFunction1D from_array_1d(const Array& values, double a, double b) {
    if (values.ndim() != 1) throw py::value_error("expected a 1-d array");
    GridFunction1D g;
    g.a = a;
    g.b = b;
    g.values.assign(values.data(), values.data() + values.size());
    return g;
}

std::vector<Point> to_points(const Array& pts) {
    if (pts.ndim() != 2 || pts.shape(1) != 2) throw py::value_error("expected points of shape (n, 2)");
    std::vector<Point> out(static_cast<std::size_t>(pts.shape(0)));
    auto r = pts.unchecked<2>();
    for (py::ssize_t k = 0; k < pts.shape(0); ++k) out[k] = {r(k, 0), r(k, 1)};
    return out;
}

Array to_array(const std::vector<double>& v) {
    Array out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::tuple rect_tuple(const Rect& r) { return py::make_tuple(r.x0, r.x1, r.y0, r.y1); }

const ExampleParams& require_example(const System& s) {
    if (!s.example) throw py::value_error("closed-form operator exists only for the built-in examples");
    return *s.example;
}

py::dict spectrum_dict(const SpectralReport& rep) {
    py::dict d;
    d["density"] = to_array(rep.invariant_density);
    d["eigenvalues"] = rep.leading_eigs;
    d["gap"] = rep.gap_estimate;
    d["peripheral_count"] = rep.peripheral_count;
    d["iterations"] = rep.iterations;
    d["residual"] = rep.residual;
    d["cesaro"] = rep.cesaro;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Piecewise expanding recurrences: hypotheses, invariant densities and correlation decay";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<OutOfDomain>(m, "OutOfDomain", base);
    py::register_exception<InvalidBounds>(m, "InvalidBounds", base);
    py::register_exception<EmptyRegion>(m, "EmptyRegion", base);
    py::register_exception<DegenerateGrid>(m, "DegenerateGrid", base);
    py::register_exception<NoConvergence>(m, "NoConvergence", base);
    py::register_exception<BranchInversionFailure>(m, "BranchInversionFailure", base);
    py::register_exception<InsufficientSignal>(m, "InsufficientSignal", base);
    py::register_exception<NotDecaying>(m, "NotDecaying", base);
    py::register_exception<NotAdmissible>(m, "NotAdmissible", base);
    py::register_exception<ConfigError>(m, "ConfigError", base);

    m.def("compute_s", &compute_s, py::arg("A"), py::arg("M"));
    m.def("compute_eta", &compute_eta, py::arg("s"), py::arg("alpha"), py::arg("Y"));
    m.def("linear_S", &linear_S);
    m.def(
        "linear_admissibility",
        [](long a, long b) {
            const auto r = linear_admissibility(a, b);
            py::dict d;
            d["S"] = r.S;
            d["bound"] = r.bound;
            d["admissible"] = r.admissible;
            d["borderline"] = r.borderline;
            return d;
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "index_range",
        [](long a, long b) {
            const auto r = index_range(a, b);
            return py::make_tuple(r.first, r.last);
        },
        py::arg("a"), py::arg("b"), "First and last n whose line meets the closed square");
    m.def(
        "piece_indices",
        [](long a, long b) {
            const auto r = piece_indices(a, b);
            return py::make_tuple(r.first, r.last);
        },
        py::arg("a"), py::arg("b"), "First and last n whose strip meets the open square");

    py::class_<System>(m, "System", "A piecewise map and its conjugated system on Omega")
        .def_property_readonly("gamma", [](const System& s) { return s.sys->gamma(); })
        .def_property_readonly("L", [](const System& s) { return s.sys->L(); })
        .def_property_readonly("omega", [](const System& s) { return rect_tuple(s.sys->omega()); })
        .def_property_readonly("pieces", [](const System& s) { return s.sys->map().size(); })
        .def_property_readonly("A", [](const System& s) { return s.sys->map().min_declared_A(); })
        .def_property_readonly("M", [](const System& s) { return s.sys->map().max_declared_M(); })
        .def(
            "step",
            [](const System& s, double x, double y) -> std::optional<py::tuple> {
                const auto p = s.sys->step({x, y});
                if (!p) return std::nullopt;
                return py::make_tuple(p->x, p->y);
            },
            py::arg("x"), py::arg("y"), "T(x, y), or None on the boundary set")
        .def(
            "phi",
            [](const System& s, double u, double v) { return evaluate_phi(s.sys->map(), {u, v}); },
            py::arg("u"), py::arg("v"))
        .def(
            "iterate",
            [](const System& s, double x0, double x1, long n) {
                const ProcessResult r = iterate_process(*s.sys, x0, x1, n);
                return py::make_tuple(to_array(r.values), r.halted_at);
            },
            py::arg("x0"), py::arg("x1"), py::arg("n"),
            "X_0 .. X_n of the recurrence and the index of the first undefined term (or None)");

    m.def(
        "nonlinear_example", [] { return make_system(example_source(ExampleParams{}), false); },
        "The quadratic example on [-1, 1]^2");
    m.def(
        "linear_example",
        [](long a, long b, double L, bool unchecked) { return make_system(example_source(linear_params(a, b, L)), unchecked); },
        py::arg("a") = 1, py::arg("b") = 101, py::arg("L") = 1.0, py::arg("unchecked") = false,
        "phi_n(u, v) = a v + b u - 2 n L; raises NotAdmissible unless unchecked");
    m.def(
        "load_map", [](const std::string& path) { return make_system(load_map_config(path), false); },
        py::arg("path"), "Map from a JSON config file");

    m.def(
        "check_hypotheses",
        [](const System& s, long samples, std::uint64_t seed) {
            CheckOptions opt;
            opt.samples = samples;
            opt.partition_samples = 10 * samples;
            opt.seed = seed;
            const HypothesisReport rep = [&] {
                py::gil_scoped_release release;
                return full_report(s.sys->map_ptr(), opt);
            }();
            return py::module_::import("json").attr("loads")(rep.to_json());
        },
        py::arg("system"), py::arg("samples") = 10000, py::arg("seed") = cli::kDefaultSeed,
        "Run every hypothesis check; returns the report as a dict");

    py::enum_<CellSampling>(m, "CellSampling")
        .value("Lattice", CellSampling::Lattice)
        .value("Stratified", CellSampling::Stratified)
        .value("Iid", CellSampling::Iid);

    py::class_<UlamOperator>(m, "UlamOperator")
        .def_readonly("nx", &UlamOperator::nx)
        .def_readonly("ny", &UlamOperator::ny)
        .def_readonly("halt_fraction", &UlamOperator::halt_fraction)
        .def_property_readonly("domain", [](const UlamOperator& op) { return rect_tuple(op.domain); })
        .def(
            "triplets",
            [](const UlamOperator& op) {
                const auto nnz = static_cast<py::ssize_t>(op.matrix.nonZeros());
                py::array_t<long> rows(nnz), cols(nnz);
                Array vals(nnz);
                py::ssize_t k = 0;
                for (int c = 0; c < op.matrix.outerSize(); ++c) {
                    for (SparseMatrix::InnerIterator it(op.matrix, c); it; ++it, ++k) {
                        rows.mutable_data()[k] = it.row();
                        cols.mutable_data()[k] = it.col();
                        vals.mutable_data()[k] = it.value();
                    }
                }
                return py::make_tuple(rows, cols, vals);
            },
            "(rows, cols, values) of the column-stochastic matrix; cell index j * nx + i")
        .def(
            "apply",
            [](const UlamOperator& op, const Array& h) { return to_array(apply(op, from_array(h, op.domain))); },
            py::arg("density"));

    m.def(
        "build_ulam",
        [](const System& s, int nx, int ny, int samples_per_cell, std::uint64_t seed, CellSampling sampling) {
            py::gil_scoped_release release;
            return build_ulam(*s.sys, nx, ny, samples_per_cell, seed, sampling);
        },
        py::arg("system"), py::arg("nx") = 64, py::arg("ny") = 64, py::arg("samples_per_cell") = 200,
        py::arg("seed") = cli::kDefaultSeed, py::arg("sampling") = CellSampling::Lattice);

    m.def(
        "invariant_density",
        [](const UlamOperator& op, double tol, int max_iters) {
            py::gil_scoped_release release;
            auto rep = peripheral_spectrum(op, 6, tol, max_iters);
            py::gil_scoped_acquire acquire;
            return spectrum_dict(rep);
        },
        py::arg("op"), py::arg("tol") = 1e-10, py::arg("max_iters") = 20000,
        "Fixed point of the operator with leading eigenvalues and spectral gap");

    m.def(
        "marginals",
        [](const System& s, const Array& h) {
            const Marginals mg = marginal_density(from_array(h, s.sys->omega()), *s.sys);
            return py::make_tuple(to_array(mg.by_column.values), to_array(mg.by_row.values),
                                  l1_distance(mg.by_column, mg.by_row));
        },
        py::arg("system"), py::arg("density"), "Both marginal densities of X_n and their L1 distance");

    m.def(
        "pf_apply_exact",
        [](const System& s, const std::function<double(double, double)>& h, const Array& points) {
            const auto pts = to_points(points);
            return to_array(pf_apply_exact(require_example(s), [&h](Point p) { return h(p.x, p.y); }, pts));
        },
        py::arg("system"), py::arg("h"), py::arg("points"),
        "Closed-form transfer operator of h(x, y) at points of shape (n, 2)");

    py::class_<NormParams>(m, "NormParams")
        .def(py::init([](double alpha, double eps0, double eps1, int eps_samples) {
                 return NormParams{alpha, eps0, eps1, eps_samples};
             }),
             py::arg("alpha") = 1.0, py::arg("eps0") = 0.05, py::arg("eps1") = 1.0, py::arg("eps_samples") = 16)
        .def_readwrite("alpha", &NormParams::alpha)
        .def_readwrite("eps0", &NormParams::eps0)
        .def_readwrite("eps1", &NormParams::eps1)
        .def_readwrite("eps_samples", &NormParams::eps_samples);

    m.def(
        "norm_alpha",
        [](const System& s, const Array& g, const NormParams& p) {
            const OmegaNorm n = norm_alpha_L(from_array(g, s.sys->omega()), p, s.sys->L(), s.sys->gamma());
            py::dict d;
            d["osc"] = n.N;
            d["boundary"] = n.boundary_term;
            d["l1"] = n.l1;
            d["total"] = n.total;
            return d;
        },
        py::arg("system"), py::arg("g"), py::arg("params") = NormParams{},
        "Oscillation norm of a grid function on Omega");
    m.def(
        "tr_norm",
        [](const System& s, const Array& H, const NormParams& p) {
            const double L = s.sys->L();
            const TrNorm n = tr_norm(from_array_1d(H, -L, L), p, L, s.sys->gamma());
            py::dict d;
            d["osc"] = n.osc_term;
            d["boundary"] = n.boundary_term;
            d["l1"] = n.l1_term;
            d["total"] = n.total;
            return d;
        },
        py::arg("system"), py::arg("H"), py::arg("params") = NormParams{},
        "Norm of the lift of a cell-constant function on [-L, L]");

    m.def(
        "covariance",
        [](const System& s, const UlamOperator& op, const Array& h, const std::vector<long>& lags, long trajectories,
           std::uint64_t seed) {
            const GridFunction hs = from_array(h, s.sys->omega());
            const ObservablePair pair = default_observables(s.sys->L(), op.nx);
            std::vector<double> floor;
            std::vector<double> cov_op;
            McCovariance mc;
            {
                py::gil_scoped_release release;
                cov_op = covariance_op(op, hs, pair, lags, &floor);
                if (trajectories > 0) mc = covariance_mc(*s.sys, hs, pair, lags, trajectories, seed);
            }
            py::dict d;
            d["lags"] = lags;
            d["operator"] = to_array(cov_op);
            d["rounding_bound"] = to_array(floor);
            if (trajectories > 0) {
                d["monte_carlo"] = to_array(mc.cov);
                d["stderr"] = to_array(mc.stderr_);
                d["halted"] = mc.halted;
            }
            return d;
        },
        py::arg("system"), py::arg("op"), py::arg("density"), py::arg("lags"), py::arg("trajectories") = 0,
        py::arg("seed") = cli::kDefaultSeed, "Covariance of x/L at the given lags, by the operator and optionally by Monte Carlo");

    m.def(
        "fit_decay",
        [](const std::vector<long>& lags, const std::vector<double>& values) {
            const DecayFit f = fit_decay(lags, values);
            py::dict d;
            d["C"] = f.C;
            d["rho"] = f.rho;
            d["window"] = f.window;
            d["max_excess"] = f.max_excess;
            return d;
        },
        py::arg("lags"), py::arg("values"), "Least-squares fit |c_n| ~ C rho^n");
}
