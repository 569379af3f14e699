/* Python bindings: a thin shell over the same driver layer the CLI uses,
 * so checks and the reduction pipeline behave identically from both
 * frontends. Reports come back as plain dicts mirroring the CLI JSON.
 */

#include <memory>
#include <optional>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nhmech/driver.hpp"
#include "nhmech/hamjac.hpp"
#include "nhmech/reduction.hpp"
#include "nhmech/systems.hpp"

namespace py = pybind11;
using namespace nhmech;

namespace {

py::object json_to_py(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null:
      return py::none();
    case Json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case Json::value_t::number_integer:
      return py::int_(j.get<long long>());
    case Json::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case Json::value_t::number_float:
      return py::float_(j.get<double>());
    case Json::value_t::string:
      return py::str(j.get<std::string>());
    case Json::value_t::array: {
      py::list out;
      for (const auto& item : j) out.append(json_to_py(item));
      return out;
    }
    case Json::value_t::object: {
      py::dict out;
      for (const auto& [key, value] : j.items())
        out[py::str(key)] = json_to_py(value);
      return out;
    }
    default:
      return py::none();
  }
}

using BundlePtr = std::shared_ptr<SystemBundle>;

BundlePtr make_system(const std::string& name, const Params& params) {
  return std::make_shared<SystemBundle>(get_system(name, params));
}

py::dict simulate(const BundlePtr& b, double dt, long steps,
                  std::optional<Eigen::VectorXd> q0,
                  std::optional<Eigen::VectorXd> v0, bool stabilize,
                  double tol) {
  const LagrangianSystem& sys = require_dynamics(*b);
  State s0 = bundle_state(*b, q0, v0);
  const Eigen::VectorXd res0 = constraint_residual(b->cs, s0);
  const double r0 = res0.size() ? res0.lpNorm<Eigen::Infinity>() : 0.0;
  if (r0 > tol)
    throw ConfigError("initial state is off the constraint manifold: |psi| = " +
                      format_double(r0) + " > tol " + format_double(tol));

  Trajectory traj = integrate(sys, b->cs, s0, dt, steps, stabilize);
  const long m = static_cast<long>(traj.times.size());
  const int n = sys.n, k = b->cs.k;

  Eigen::VectorXd t(m), energy(m), psi(m);
  Eigen::MatrixXd q(m, n), v(m, n), lam(m, k);
  for (long i = 0; i < m; ++i) {
    t[i] = traj.times[static_cast<size_t>(i)];
    energy[i] = traj.energies[static_cast<size_t>(i)];
    psi[i] = traj.psi_max[static_cast<size_t>(i)];
    q.row(i) = traj.states[static_cast<size_t>(i)].q;
    v.row(i) = traj.states[static_cast<size_t>(i)].v;
    if (k > 0) lam.row(i) = traj.multipliers[static_cast<size_t>(i)];
  }

  py::dict out;
  out["t"] = t;
  out["q"] = q;
  out["v"] = v;
  out["lam"] = lam;
  out["energy"] = energy;
  out["psi_max"] = psi;
  out["energy_drift"] =
      std::abs(traj.energies.back() - traj.energies.front());
  return out;
}

py::dict check(const BundlePtr& b, const std::string& name,
               const std::string& candidate, const Params& cand_params,
               double tol, int grid, unsigned seed,
               std::optional<Eigen::VectorXd> q0,
               std::optional<Eigen::VectorXd> v0, int depth, bool weak,
               const std::string& sign, double mu1, double mu2,
               std::optional<Eigen::VectorXd> mu_claim,
               std::optional<Eigen::VectorXd> xi, double dt, long steps) {
  CheckOptions o;
  o.check = name;
  o.candidate = candidate;
  o.cand_params = cand_params;
  o.tol = tol;
  o.grid_count = grid;
  o.seed = seed;
  o.q0 = q0;
  o.v0 = v0;
  o.depth = depth;
  o.weak = weak;
  o.sign = sign;
  o.mu1 = mu1;
  o.mu2 = mu2;
  o.mu_claim = mu_claim;
  o.xi = xi;
  o.dt = dt;
  o.steps = steps;

  Json root;
  root["check"] = name;
  root["system"] = b->name;
  root["params"] = params_to_json(b->params);
  CheckReport rep = run_named_check(*b, o, &root);
  root["report"] = rep.to_json();
  root["pass"] = rep.pass;
  return json_to_py(root);
}

py::dict reduce(const BundlePtr& b, const std::string& candidate,
                const Params& cand_params, double tol, int grid,
                unsigned seed) {
  ReduceOptions o;
  o.candidate = candidate;
  o.cand_params = cand_params;
  o.tol = tol;
  o.grid_count = grid;
  o.seed = seed;
  return json_to_py(run_reduce_pipeline(*b, o));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "nonholonomic mechanics toolkit";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError",
                                         PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError",
                                         PyExc_ValueError);

  py::class_<SystemBundle, BundlePtr>(m, "System")
      .def_readonly("name", &SystemBundle::name)
      .def_property_readonly("params",
                             [](const SystemBundle& b) {
                               py::dict d;
                               for (const auto& [k, v] : b.params)
                                 d[py::str(k)] = v;
                               return d;
                             })
      .def_property_readonly(
          "n", [](const SystemBundle& b) { return b.state0.q.size(); })
      .def_property_readonly("k",
                             [](const SystemBundle& b) { return b.cs.k; })
      .def_property_readonly(
          "q0", [](const SystemBundle& b) { return b.state0.q; })
      .def_property_readonly(
          "v0", [](const SystemBundle& b) { return b.state0.v; })
      .def_readonly("box_lo", &SystemBundle::box_lo)
      .def_readonly("box_hi", &SystemBundle::box_hi)
      .def_readonly("qbar_lo", &SystemBundle::qbar_lo)
      .def_readonly("qbar_hi", &SystemBundle::qbar_hi)
      .def_property_readonly("has_dynamics",
                             [](const SystemBundle& b) {
                               return static_cast<bool>(b.sys);
                             })
      .def_property_readonly("has_action",
                             [](const SystemBundle& b) {
                               return static_cast<bool>(b.action);
                             })
      .def_property_readonly("candidates",
                             [](const SystemBundle& b) {
                               std::vector<std::string> names;
                               for (const auto& [k, v] : b.candidates)
                                 names.push_back(k);
                               return names;
                             })
      .def("__repr__", [](const SystemBundle& b) {
        return "<nhmech.System '" + b.name + "'>";
      });

  m.def("systems", &registered_systems,
        "Names of the built-in system bundles.");
  m.def("check_names", [] { return check_names(); },
        "Names accepted by check().");
  m.def("get_system", &make_system, py::arg("name"),
        py::arg("params") = Params{},
        "Load a built-in system bundle with optional parameter overrides.");

  m.def("simulate", &simulate, py::arg("system"), py::arg("dt") = 1e-3,
        py::arg("steps") = 1000, py::arg("q0") = std::nullopt,
        py::arg("v0") = std::nullopt, py::arg("stabilize") = true,
        py::arg("tol") = 1e-8,
        "Integrate the constrained dynamics; returns arrays keyed t, q, v, "
        "lam, energy, psi_max.");

  m.def("check", &check, py::arg("system"), py::arg("name"),
        py::arg("candidate") = std::string(), py::arg("cand_params") = Params{},
        py::arg("tol") = 1e-8, py::arg("grid") = 100, py::arg("seed") = 0,
        py::arg("q0") = std::nullopt, py::arg("v0") = std::nullopt,
        py::arg("depth") = 4, py::arg("weak") = false,
        py::arg("sign") = std::string("minus"), py::arg("mu1") = 1.0,
        py::arg("mu2") = 0.5, py::arg("mu_claim") = std::nullopt,
        py::arg("xi") = std::nullopt, py::arg("dt") = 1e-3,
        py::arg("steps") = 1000,
        "Run one named verification; returns the same report dict the CLI "
        "prints as JSON.");

  m.def("reduce", &reduce, py::arg("system"), py::arg("candidate"),
        py::arg("cand_params") = Params{}, py::arg("tol") = 1e-8,
        py::arg("grid") = 100, py::arg("seed") = 0,
        "Quotient pipeline: reduce, test the reduced equation, reconstruct, "
        "and compare with the full dynamics.");
}
