#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "idma/analytic.hpp"
#include "idma/error.hpp"
#include "idma/simulate.hpp"
#include "idma/verify.hpp"

namespace py = pybind11;
using namespace idma;

namespace {

using Array = py::array_t<double>;

Array to_array(const std::vector<double>& v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

Array to_matrix(const std::vector<double>& v, std::size_t rows, std::size_t cols) {
    Array out({static_cast<py::ssize_t>(rows), static_cast<py::ssize_t>(cols)});
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::vector<Point> points(const std::vector<std::vector<double>>& ls, std::size_t d) {
    if (ls.empty()) return {Point(d, 0.0)};
    return ls;
}

AnalyticOptions options(double tol) {
    AnalyticOptions o;
    o.quad.abs_tol = tol;
    return o;
}

LimitVariant parse_variant(const std::string& name) {
    if (name == "claimed") return LimitVariant::Claimed;
    if (name == "boundary_augmented") return LimitVariant::BoundaryAugmented;
    throw ConfigError("variant must be 'claimed' or 'boundary_augmented'");
}

py::dict quad_dict(const QuadResult<Complex>& r) {
    py::dict d;
    d["value"] = r.value;
    d["error_estimate"] = r.error_estimate;
    d["evaluations"] = r.evaluations;
    return d;
}

} // namespace

PYBIND11_MODULE(_idma, m) {
    m.doc() = "Infinitely divisible moving averages: analytic characteristic functions and shot-noise simulation";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<NonConvergence>(m, "NonConvergence", base.ptr());
    py::register_exception<DivergentMoment>(m, "DivergentMoment", base.ptr());
    py::register_exception<NotAvailable>(m, "NotAvailable", base.ptr());
    py::register_exception<EmptyTruncation>(m, "EmptyTruncation", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

    py::class_<LevyMeasure>(m, "LevyMeasure")
        .def_static("dickman", &LevyMeasure::dickman)
        .def_static("truncated_stable", &LevyMeasure::truncated_stable, py::arg("beta"), py::arg("C"))
        .def_static("two_point", &LevyMeasure::two_point, py::arg("lam"))
        .def_static("inner_truncated_stable", &LevyMeasure::inner_truncated_stable, py::arg("alpha"), py::arg("c"),
                    py::arg("delta"))
        .def_property_readonly("name", &LevyMeasure::name)
        .def_property_readonly("support_bound", &LevyMeasure::support_bound)
        .def_property_readonly("is_symmetric", &LevyMeasure::is_symmetric)
        .def("__repr__", [](const LevyMeasure& nu) { return "LevyMeasure(" + nu.name() + ")"; });

    m.def("abs_moment", &abs_moment);
    m.def("second_moment", &second_moment);
    m.def("tail_mass", &tail_mass, py::arg("measure"), py::arg("eps"));
    m.def("small_jump_variance", &small_jump_variance, py::arg("measure"), py::arg("eps"));
    m.def("compensator_integral", &compensator_integral);
    m.def(
        "sample_jump_sizes",
        [](const LevyMeasure& nu, double eps, std::size_t n, std::uint64_t seed) {
            RandomStream rng(seed);
            return to_array(sample_jump_sizes(nu, eps, n, rng));
        },
        py::arg("measure"), py::arg("eps"), py::arg("n"), py::arg("seed") = 0);

    py::class_<Kernel1D>(m, "Kernel1D")
        .def_static("signed_ou", &Kernel1D::signed_ou)
        .def_static("gauss_deriv", &Kernel1D::gauss_deriv)
        .def_static("persistent_control", &Kernel1D::persistent_control)
        .def_static("user_table", &Kernel1D::user_table, py::arg("xs"), py::arg("gs"))
        .def_static("user_table_from_csv", &Kernel1D::user_table_from_csv, py::arg("path"))
        .def_property_readonly("name", &Kernel1D::name)
        .def_property_readonly("has_antiderivative", &Kernel1D::has_antiderivative)
        .def("f", py::vectorize(&Kernel1D::f))
        .def("g", py::vectorize(&Kernel1D::g))
        .def("decay_radius", &Kernel1D::decay_radius, py::arg("tol"))
        .def("shifted", &Kernel1D::shifted, py::arg("shift"))
        .def("__repr__", [](const Kernel1D& k) { return "Kernel1D(" + k.name() + ")"; });

    py::class_<ProductKernel>(m, "ProductKernel")
        .def(py::init<Kernel1D>())
        .def(py::init<std::vector<Kernel1D>>())
        .def_property_readonly("dimension", &ProductKernel::dimension)
        .def_property_readonly("has_antiderivative", &ProductKernel::has_antiderivative);
    py::implicitly_convertible<Kernel1D, ProductKernel>();

    m.def("window_increment", &window_increment, py::arg("kernel"), py::arg("a"), py::arg("b"));
    m.def(
        "norms",
        [](const Kernel1D& k) {
            const auto n = norms(k);
            py::dict d;
            d["l1_f"] = n.l1_f;
            d["l2sq_f"] = n.l2sq_f;
            d["l1_g"] = n.l1_g ? py::cast(*n.l1_g) : py::none();
            d["l2sq_g"] = n.l2sq_g ? py::cast(*n.l2sq_g) : py::none();
            return d;
        },
        py::arg("kernel"));

    m.def(
        "log_cf_stationary",
        [](const ProductKernel& k, const LevyMeasure& nu, double z, double tol) {
            return quad_dict(log_cf_stationary(k, nu, z, options(tol)));
        },
        py::arg("kernel"), py::arg("measure"), py::arg("z"), py::arg("tol") = 1e-9);
    m.def(
        "j_t",
        [](const ProductKernel& k, const std::vector<std::vector<double>>& ls, const std::vector<double>& zs, double T,
           const std::vector<double>& s) {
            return j_t(k, FddSpec{k.dimension(), points(ls, k.dimension()), zs, T}, s);
        },
        py::arg("kernel"), py::arg("ls"), py::arg("zs"), py::arg("T"), py::arg("s"));
    m.def(
        "log_cf_window",
        [](const ProductKernel& k, const LevyMeasure& nu, const std::vector<std::vector<double>>& ls,
           const std::vector<double>& zs, double T, double tol) {
            return quad_dict(log_cf_window(k, nu, FddSpec{k.dimension(), points(ls, k.dimension()), zs, T}, options(tol)));
        },
        py::arg("kernel"), py::arg("measure"), py::arg("ls"), py::arg("zs"), py::arg("T"), py::arg("tol") = 1e-9);
    m.def(
        "log_cf_limit",
        [](const ProductKernel& k, const LevyMeasure& nu, const std::vector<std::vector<double>>& ls,
           const std::vector<double>& zs, const std::string& variant, double tol) {
            return quad_dict(log_cf_limit(k, nu, FddSpec{k.dimension(), points(ls, k.dimension()), zs, 0.0},
                                          parse_variant(variant), options(tol)));
        },
        py::arg("kernel"), py::arg("measure"), py::arg("ls"), py::arg("zs"), py::arg("variant") = "claimed",
        py::arg("tol") = 1e-9);
    m.def(
        "covariance",
        [](const ProductKernel& k, const LevyMeasure& nu, const std::vector<double>& t) {
            return covariance(k, nu, t);
        },
        py::arg("kernel"), py::arg("measure"), py::arg("t"));
    m.def(
        "covariance_integral",
        [](const ProductKernel& k, const LevyMeasure& nu) {
            const auto ci = covariance_integral(k, nu);
            return py::make_tuple(ci.exact, ci.quadrature);
        },
        py::arg("kernel"), py::arg("measure"));
    m.def(
        "variance_window",
        [](const ProductKernel& k, const LevyMeasure& nu, double T) { return variance_window(k, nu, T); },
        py::arg("kernel"), py::arg("measure"), py::arg("T"));
    m.def(
        "check_conditions",
        [](const ProductKernel& k, const LevyMeasure& nu, std::size_t budget) {
            const auto r = check_conditions(k, nu, budget);
            py::dict d;
            d["values"] = std::vector<double>(r.values.begin(), r.values.end());
            d["pass"] = std::vector<bool>(r.pass.begin(), r.pass.end());
            d["error_estimates"] = std::vector<double>(r.error_estimates.begin(), r.error_estimates.end());
            return d;
        },
        py::arg("kernel"), py::arg("measure"), py::arg("budget") = 1'000'000);

    m.def(
        "monte_carlo",
        [](const ProductKernel& k, const LevyMeasure& nu, double T, const std::vector<std::vector<double>>& ls,
           std::size_t replicates, std::uint64_t seed, double epsilon, std::optional<double> window_pad,
           unsigned threads) {
            SimConfig cfg{k, nu, T, points(ls, k.dimension()), epsilon, window_pad, replicates, seed};
            ReplicateMatrix r;
            {
                py::gil_scoped_release release;
                r = monte_carlo(cfg, threads);
            }
            py::dict d;
            d["S"] = to_matrix(r.window_integrals, r.replicates, r.points);
            d["Y"] = to_matrix(r.limit_values, r.replicates, r.points);
            return d;
        },
        py::arg("kernel"), py::arg("measure"), py::arg("T"), py::arg("ls") = std::vector<std::vector<double>>{},
        py::arg("replicates") = 1000, py::arg("seed") = 0, py::arg("epsilon") = 1e-3,
        py::arg("window_pad") = py::none(), py::arg("threads") = 1);
    m.def(
        "empirical_cf",
        [](const std::vector<double>& samples, const std::vector<double>& zs) {
            const auto cf = empirical_cf(samples, zs);
            py::array_t<Complex> values(static_cast<py::ssize_t>(cf.values.size()), cf.values.data());
            return py::make_tuple(values, cf.band);
        },
        py::arg("samples"), py::arg("zs"));
    m.def(
        "ks_two_sample",
        [](const std::vector<double>& a, const std::vector<double>& b) {
            const auto r = ks_two_sample(a, b);
            py::dict d;
            d["statistic"] = r.statistic;
            d["critical_1pct"] = r.critical_1pct;
            d["reject"] = r.reject;
            return d;
        },
        py::arg("a"), py::arg("b"));

    m.def("default_z_grid", [] { return to_array(default_z_grid()); });
    m.def(
        "cf_convergence",
        [](const ProductKernel& k, const LevyMeasure& nu, const std::vector<double>& T_grid,
           std::optional<std::vector<double>> z_grid, const std::vector<std::vector<double>>& ls,
           std::optional<std::vector<double>> zs, double threshold, unsigned threads) {
            const auto grid = z_grid ? *z_grid : default_z_grid();
            const auto pts = points(ls, k.dimension());
            const FddSpec spec{k.dimension(), pts, zs ? *zs : std::vector<double>(pts.size(), 1.0), 0.0};
            ConvergenceOptions opts;
            opts.threshold = threshold;
            opts.threads = threads;
            ConvergenceReport r;
            {
                py::gil_scoped_release release;
                r = cf_convergence(k, nu, spec, T_grid, grid, opts);
            }
            std::vector<double> dc;
            std::vector<double> db;
            for (const auto& e : r.entries) {
                dc.push_back(e.dist_claimed);
                db.push_back(e.dist_boundary);
            }
            py::dict d;
            d["T"] = to_array(T_grid);
            d["dist_claimed"] = to_array(dc);
            d["dist_boundary"] = to_array(db);
            d["winner"] = to_string(r.winner);
            return d;
        },
        py::arg("kernel"), py::arg("measure"), py::arg("T_grid"), py::arg("z_grid") = py::none(),
        py::arg("ls") = std::vector<std::vector<double>>{}, py::arg("zs") = py::none(), py::arg("threshold") = 1e-3,
        py::arg("threads") = 1);
    m.def(
        "hyperuniformity",
        [](const ProductKernel& k, const LevyMeasure& nu, const std::vector<double>& T_grid, std::size_t replicates,
           std::uint64_t seed, unsigned threads) {
            HyperOptions opts;
            opts.seed = seed;
            opts.threads = threads;
            HyperReport r;
            {
                py::gil_scoped_release release;
                r = hyperuniformity(k, nu, T_grid, replicates, opts);
            }
            py::dict d;
            d["T"] = to_array(r.T_grid);
            d["var_analytic"] = to_array(r.var_analytic);
            d["var_empirical"] = to_array(r.var_empirical);
            d["control_var_analytic"] = to_array(r.control_var_analytic);
            d["control_var_empirical"] = to_array(r.control_var_empirical);
            d["control_slope"] = r.control_slope;
            d["classification"] = to_string(r.classification);
            return d;
        },
        py::arg("kernel"), py::arg("measure"), py::arg("T_grid"), py::arg("replicates") = 0, py::arg("seed") = 0,
        py::arg("threads") = 1);
}
