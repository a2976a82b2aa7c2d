#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "clamg/config.hpp"
#include "clamg/driver.hpp"
#include "clamg/hierarchy.hpp"
#include "clamg/krylov.hpp"
#include "clamg/problems.hpp"
#include "clamg/report.hpp"

namespace py = pybind11;
using namespace clamg;

namespace {

using IndexArray = py::array_t<index_t, py::array::c_style | py::array::forcecast>;
using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

template <typename T>
py::array_t<T> to_array(std::span<const T> v) {
    py::array_t<T> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

py::tuple csr_tuple(const SparseMatrix& A) {
    return py::make_tuple(to_array(A.row_offsets()), to_array(A.col_indices()), to_array(A.values()),
                          py::make_tuple(A.nrows(), A.ncols()));
}

SparseMatrix csr_from_arrays(const IndexArray& indptr, const IndexArray& indices, const RealArray& data, index_t n) {
    return SparseMatrix(n, n, std::vector<index_t>(indptr.data(), indptr.data() + indptr.size()),
                        std::vector<index_t>(indices.data(), indices.data() + indices.size()),
                        std::vector<double>(data.data(), data.data() + data.size()));
}

std::string as_value(const py::handle& v) {
    if (py::isinstance<py::bool_>(v))
        return v.cast<bool>() ? "on" : "off";
    return py::str(v).cast<std::string>();
}

RunConfig config_from(const py::kwargs& options) {
    RunConfig cfg;
    for (auto item : options) {
        std::string key = item.first.cast<std::string>();
        std::replace(key.begin(), key.end(), '_', '-');
        apply_key(cfg, key, as_value(item.second));
    }
    return cfg;
}

py::dict report_dict(const SolveReport& r) {
    py::dict d;
    d["problem"] = r.problem;
    d["n"] = r.n;
    d["nnz"] = r.nnz;
    d["method"] = r.method;
    d["iterations"] = r.iterations;
    d["converged"] = r.converged;
    d["rel_residual"] = r.rel_residual;
    d["grid_complexity"] = r.grid_complexity;
    d["operator_complexity"] = r.operator_complexity;
    d["setup_time"] = r.setup_time;
    d["solve_time"] = r.solve_time;
    py::list levels;
    for (const auto& l : r.levels)
        levels.append(py::dict(py::arg("n") = l.n, py::arg("nnz") = l.nnz, py::arg("ratio") = l.ratio));
    d["levels"] = levels;
    d["history"] = r.history;
    return d;
}

class PyHierarchy {
public:
    PyHierarchy(const IndexArray& indptr, const IndexArray& indices, const RealArray& data, index_t n,
                const py::kwargs& options)
        : cfg_(config_from(options)), H_(AmgHierarchy::setup(csr_from_arrays(indptr, indices, data, n), cfg_.amg)) {}

    std::size_t n_levels() const { return H_.n_levels(); }
    double grid_complexity() const { return H_.grid_complexity(); }
    double operator_complexity() const { return H_.operator_complexity(); }

    std::vector<index_t> level_sizes() const {
        std::vector<index_t> s;
        for (std::size_t k = 0; k < H_.n_levels(); ++k)
            s.push_back(H_.level(k).A.nrows());
        return s;
    }

    py::array_t<double> vcycle(const RealArray& b) const {
        check(b);
        py::array_t<double> x(b.size());
        H_.vcycle({b.data(), static_cast<std::size_t>(b.size())}, {x.mutable_data(), static_cast<std::size_t>(b.size())});
        return x;
    }

    py::tuple solve(const RealArray& b, double rtol, int max_iters) const {
        check(b);
        KrylovConfig k;
        k.method = H_.requires_nonsymmetric_solver() ? KrylovMethod::BiCGstab : KrylovMethod::Pcg;
        k.rtol = rtol;
        k.max_iters = max_iters;
        k.record_history = true;
        const std::span<const double> rhs(b.data(), static_cast<std::size_t>(b.size()));
        const std::vector<double> x0(rhs.size(), 0.0);
        const auto& A = H_.level(0).A;
        KrylovResult r;
        {
            py::gil_scoped_release release;
            r = krylov_solve(matrix_operator(A), [this](auto y, auto x) { H_.vcycle(y, x); }, rhs, x0, k);
        }
        py::dict info;
        info["iterations"] = r.iterations;
        info["converged"] = r.converged;
        info["rel_residual"] = r.rel_residual;
        info["method"] = to_string(k.method);
        info["history"] = r.history;
        return py::make_tuple(to_array<double>(r.x), info);
    }

    std::string summary() const {
        std::ostringstream s;
        H_.print_summary(s);
        return s.str();
    }

private:
    void check(const RealArray& b) const {
        if (b.ndim() != 1 || b.size() != H_.size())
            throw DimensionError("vector of length " + std::to_string(H_.size()) + " expected");
    }

    RunConfig cfg_;
    AmgHierarchy H_;
};

} // namespace

PYBIND11_MODULE(_core, m) {
    py::register_exception<Error>(m, "ClamgError", PyExc_RuntimeError);
    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<NotSpdError>(m, "NotSpdError", PyExc_ArithmeticError);

    m.def(
        "generate",
        [](const std::string& spec) {
            const auto g = generate(parse_generator(spec));
            py::object coords = py::none();
            if (g.coords.nrows() > 0) {
                py::array_t<double> c({static_cast<py::ssize_t>(g.coords.nrows()), static_cast<py::ssize_t>(g.coords.ncols())});
                std::copy(g.coords.data().begin(), g.coords.data().end(), c.mutable_data());
                coords = c;
            }
            return py::make_tuple(csr_tuple(g.A), coords);
        },
        py::arg("spec"), "Build a model problem; returns ((indptr, indices, data, shape), coords or None).");

    m.def(
        "run",
        [](const py::kwargs& options) {
            const RunConfig cfg = config_from(options);
            RunResult r;
            {
                py::gil_scoped_release release;
                r = clamg::run(cfg);
            }
            return py::make_tuple(report_dict(r.report), to_array<double>(r.solution));
        },
        "Load or generate a problem, set up the hierarchy and solve. Keyword names follow the recipe keys.");

    py::class_<PyHierarchy>(m, "Hierarchy")
        .def(py::init<const IndexArray&, const IndexArray&, const RealArray&, index_t, const py::kwargs&>(),
             py::arg("indptr"), py::arg("indices"), py::arg("data"), py::arg("n"))
        .def_property_readonly("n_levels", &PyHierarchy::n_levels)
        .def_property_readonly("level_sizes", &PyHierarchy::level_sizes)
        .def_property_readonly("grid_complexity", &PyHierarchy::grid_complexity)
        .def_property_readonly("operator_complexity", &PyHierarchy::operator_complexity)
        .def("vcycle", &PyHierarchy::vcycle, py::arg("b"))
        .def("solve", &PyHierarchy::solve, py::arg("b"), py::arg("rtol") = 1e-8, py::arg("max_iters") = 5000)
        .def("summary", &PyHierarchy::summary);

    m.attr("REPORT_SCHEMA_VERSION") = kReportSchemaVersion;
}
