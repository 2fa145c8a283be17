#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mhspectral/io.hpp"
#include "mhspectral/metrics.hpp"

namespace py = pybind11;
using namespace mhs;

namespace {

// Reports cross the boundary as JSON text; the Python side decodes them.
std::string run(const std::string& command, const std::string& instance, bool dual,
                std::optional<std::uint64_t> seed, std::optional<std::string> report) {
  const Instance inst = parse_instance_text(instance);
  CommandOptions opts;
  opts.dual = dual;
  opts.seed = seed;
  if (report) opts.prior_report = parse_json_text(*report);
  CommandResult res;
  {
    py::gil_scoped_release release;
    res = run_command(command, inst, opts);
  }
  json out = res.report;
  out["exit_code"] = res.exit_code;
  return out.dump();
}

}  // namespace

PYBIND11_MODULE(_mhspectral, m) {
  m.doc() = "Perron-Frobenius eigenpairs of multi-homogeneous order-preserving maps";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());

  m.def("run", &run, py::arg("command"), py::arg("instance"), py::arg("dual") = false,
        py::arg("seed") = py::none(), py::arg("report") = py::none());
  m.def("canonical", [](const std::string& text) {
    return serialize_instance(parse_instance_text(text));
  });

  m.def("spectral_radius", &spectral_radius, py::arg("A"));
  m.def("perron_weights", [](const Matrix& A) { return perron_weights(A).values(); },
        py::arg("A"));
  m.def("lipschitz_bound",
        [](const Matrix& A, const std::vector<double>& b) {
          return lipschitz_bound(A, WeightVector(b));
        },
        py::arg("A"), py::arg("b"));
  m.def("is_irreducible", [](const Matrix& A) { return is_irreducible(A); }, py::arg("A"));
  m.def("is_primitive", [](const Matrix& A) { return is_primitive(A); }, py::arg("A"));

  using Blocks = std::vector<std::vector<double>>;
  m.def("hilbert_metric",
        [](const Blocks& x, const Blocks& y, const std::vector<double>& b) {
          return hilbert_metric(ProductVector::from_blocks(x), ProductVector::from_blocks(y),
                                WeightVector(b));
        },
        py::arg("x"), py::arg("y"), py::arg("b"));
  m.def("thompson_metric",
        [](const Blocks& x, const Blocks& y, const std::vector<double>& b) {
          return thompson_metric(ProductVector::from_blocks(x), ProductVector::from_blocks(y),
                                 WeightVector(b));
        },
        py::arg("x"), py::arg("y"), py::arg("b"));
}
