// Copyright 2026 The cmrf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cmrf/acceptance.hpp"
#include "cmrf/exact.hpp"
#include "cmrf/gadgets.hpp"
#include "cmrf/harness.hpp"
#include "cmrf/io.hpp"
#include "cmrf/ising.hpp"
#include "cmrf/metrics.hpp"

namespace py = pybind11;

namespace {

py::array_t<double> to_array(const cmrf::DistributionTable& t) {
  return py::array_t<double>(static_cast<py::ssize_t>(t.states()), t.probs().data());
}

cmrf::DistributionTable from_array(py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 1) throw py::value_error("expected a 1-d probability vector");
  const std::size_t states = static_cast<std::size_t>(a.size());
  std::size_t m = 0;
  while ((std::size_t{1} << m) < states) ++m;
  if ((std::size_t{1} << m) != states) throw py::value_error("length must be a power of two");
  return cmrf::DistributionTable(m, std::vector<double>(a.data(), a.data() + states));
}

py::dict report_dict(const cmrf::RunReport& r) {
  py::list checks;
  for (const auto& c : r.checks)
    checks.append(py::dict(py::arg("name") = c.name, py::arg("value") = c.value, py::arg("op") = c.op,
                           py::arg("bound") = c.bound, py::arg("passed") = c.pass));
  py::dict metrics, diagnostics;
  for (const auto& [k, v] : r.metrics) metrics[py::str(k)] = v;
  for (const auto& [k, v] : r.diagnostics) diagnostics[py::str(k)] = v;
  return py::dict(py::arg("name") = r.name, py::arg("kind") = r.kind, py::arg("seed") = r.seed,
                  py::arg("passed") = r.passed(), py::arg("checks") = checks, py::arg("metrics") = metrics,
                  py::arg("diagnostics") = diagnostics, py::arg("config") = r.config.dump(),
                  py::arg("text") = cmrf::render_report(r, false));
}

}  // namespace

PYBIND11_MODULE(_cmrf, m) {
  m.doc() = "Censored Markov random fields: exact oracles, gadgets, metrics and the experiment harness";

  py::register_exception<cmrf::ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<cmrf::IsingModel>(m, "IsingModel")
      .def(py::init([](std::size_t n, std::vector<double> biases, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
             std::vector<cmrf::Edge> list;
             for (const auto& [i, j, w] : edges) list.push_back({i, j, w});
             return cmrf::IsingModel::from_edges(n, std::move(biases), list);
           }),
           py::arg("n"), py::arg("biases"), py::arg("edges"))
      .def_static("zero", &cmrf::IsingModel::zero, py::arg("n"))
      .def_property_readonly("size", &cmrf::IsingModel::size)
      .def("weight", &cmrf::IsingModel::weight)
      .def("bias", &cmrf::IsingModel::bias)
      .def("edges",
           [](const cmrf::IsingModel& model) {
             std::vector<std::tuple<std::size_t, std::size_t, double>> out;
             for (const auto& e : model.edges()) out.emplace_back(e.i, e.j, e.weight);
             return out;
           })
      .def("log_partition", [](const cmrf::IsingModel& model) { return cmrf::log_partition(model); })
      .def("distribution", [](const cmrf::IsingModel& model) { return to_array(cmrf::full_distribution(model)); });

  py::class_<cmrf::Cmrf>(m, "Cmrf")
      .def(py::init<cmrf::IsingModel, std::vector<std::size_t>>(), py::arg("model"), py::arg("visible"))
      .def_property_readonly("model", &cmrf::Cmrf::model)
      .def_property_readonly("visible",
                             [](const cmrf::Cmrf& c) { return std::vector<std::size_t>(c.visible().begin(), c.visible().end()); })
      .def("visible_marginal", [](const cmrf::Cmrf& c) { return to_array(cmrf::visible_marginal(c)); })
      .def("to_text",
           [](const cmrf::Cmrf& c) {
             std::ostringstream out;
             cmrf::write_cmrf(out, c);
             return out.str();
           })
      .def_static("from_text", [](const std::string& text) {
        std::istringstream in(text);
        return cmrf::read_cmrf(in, "<string>");
      });

  m.def("delta_b", &cmrf::delta_b, py::arg("b"));
  m.def("parity_gadget", [](double b, std::size_t k) { return cmrf::build_chained_parity(b, k).cmrf(); },
        py::arg("b"), py::arg("k") = 1);
  m.def("parity_gadget_law", [](double b, std::size_t k) { return to_array(cmrf::parity_gadget_law(b, k)); },
        py::arg("b"), py::arg("k") = 1);
  m.def("nand_gadget", &cmrf::build_nand_gadget, py::arg("delta"));

  m.def("tv_distance", [](py::array_t<double> p, py::array_t<double> q) {
    return cmrf::tv_distance(from_array(p), from_array(q));
  });
  m.def("emd", [](py::array_t<double> p, py::array_t<double> q) {
    return cmrf::emd_exact(from_array(p), from_array(q));
  });

  m.def("run_experiment",
        [](const std::string& config_json) {
          nlohmann::json j;
          try {
            j = nlohmann::json::parse(config_json);
          } catch (const nlohmann::json::parse_error& e) {
            throw cmrf::ConfigError(e.what());
          }
          cmrf::RunReport r;
          {
            py::gil_scoped_release release;
            r = cmrf::run_experiment(cmrf::parse_config(j));
          }
          return report_dict(r);
        },
        py::arg("config_json"), "Run an experiment from its JSON config and return the report as a dict.");
  m.def("run_criterion",
        [](int id, std::uint64_t seed) {
          cmrf::AcceptanceOptions opts;
          opts.seed = seed;
          cmrf::RunReport r;
          {
            py::gil_scoped_release release;
            r = cmrf::run_criterion(id, opts);
          }
          py::dict d = report_dict(r);
          d["summary"] = cmrf::criterion_summary(id, r);
          return d;
        },
        py::arg("id"), py::arg("seed") = 20260101);
  m.attr("acceptance_criteria") = cmrf::kAcceptanceCriteria;
}
