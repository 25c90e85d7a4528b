// Python surface for the covert symbiotic-radio toolkit: special functions,
// the DEP analytics, threshold solving, and the phase-shift optimizers.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "covertsr/detection.hpp"
#include "covertsr/experiment.hpp"
#include "covertsr/optimizer.hpp"

namespace py = pybind11;
using namespace covertsr;

namespace {

channel::SystemConfig make_config(py::kwargs kwargs) {
  channel::SystemConfig cfg;
  for (auto item : kwargs) {
    const std::string key = py::cast<std::string>(item.first);
    if (key == "m") cfg.irs_elements = py::cast<int>(item.second);
    else if (key == "rician_b") cfg.rician_factor = py::cast<double>(item.second);
    else if (key == "sigma2_dbm")
      cfg.noise_power_w = channel::dbm_to_watt(py::cast<double>(item.second));
    else if (key == "p_max_dbm")
      cfg.p_max_w = channel::dbm_to_watt(py::cast<double>(item.second));
    else if (key == "p_max_w") cfg.p_max_w = py::cast<double>(item.second);
    else if (key == "eta") cfg.symbol_ratio = py::cast<int>(item.second);
    else if (key == "eps_sic") cfg.eps_sic = py::cast<double>(item.second);
    else if (key == "eps_c") cfg.eps_c = py::cast<double>(item.second);
    else if (key == "q") cfg.quadrature_order = py::cast<int>(item.second);
    else if (key == "pos_s") {
      auto v = py::cast<std::pair<double, double>>(item.second);
      cfg.pos_source = {v.first, v.second};
    } else if (key == "pos_bd") {
      auto v = py::cast<std::pair<double, double>>(item.second);
      cfg.pos_backscatter = {v.first, v.second};
    } else if (key == "pos_r") {
      auto v = py::cast<std::pair<double, double>>(item.second);
      cfg.pos_receiver = {v.first, v.second};
    } else if (key == "pos_w") {
      auto v = py::cast<std::pair<double, double>>(item.second);
      cfg.pos_warden = {v.first, v.second};
    } else if (key == "pos_irs") {
      auto v = py::cast<std::pair<double, double>>(item.second);
      cfg.pos_irs = {v.first, v.second};
    } else {
      throw py::value_error("unknown config key: " + key);
    }
  }
  cfg.validate();
  return cfg;
}

py::dict dep_to_dict(const detection::DepReport& rep) {
  py::dict d;
  d["p_fa"] = rep.p_fa;
  d["p_md"] = rep.p_md;
  d["xi"] = rep.xi;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "covert symbiotic-radio analysis toolkit";

  m.def("bessel_k0", &numerics::bessel_k0, py::arg("x"));
  m.def("bessel_k1", &numerics::bessel_k1, py::arg("x"));
  m.def(
      "chebyshev_nodes",
      [](int order) { return numerics::chebyshev_nodes(order).nodes; },
      py::arg("order"));
  m.def("dbm_to_watt", &channel::dbm_to_watt);
  m.def("watt_to_dbm", &channel::watt_to_dbm);
  m.def(
      "path_loss_db",
      [](double d) { return channel::path_loss_db(d, channel::PathLossModel{}); },
      py::arg("distance_m"));

  py::class_<channel::SystemConfig>(m, "SystemConfig")
      .def(py::init(&make_config))
      .def_readwrite("m", &channel::SystemConfig::irs_elements)
      .def_readwrite("rician_b", &channel::SystemConfig::rician_factor)
      .def_readwrite("noise_power_w", &channel::SystemConfig::noise_power_w)
      .def_readwrite("p_max_w", &channel::SystemConfig::p_max_w)
      .def_readwrite("eta", &channel::SystemConfig::symbol_ratio)
      .def_readwrite("eps_sic", &channel::SystemConfig::eps_sic)
      .def_readwrite("eps_c", &channel::SystemConfig::eps_c)
      .def_readwrite("q", &channel::SystemConfig::quadrature_order);

  m.def(
      "optimal_threshold",
      [](const channel::SystemConfig& cfg, double p, double alpha) {
        auto d = detection::DetectionParams::from_config(cfg, 0.0, p, alpha);
        return detection::optimal_threshold_theorem1(p, alpha, d.lambda, d.l1,
                                                     d.l2, d.sigma2);
      },
      py::arg("config"), py::arg("p_w"), py::arg("alpha"));

  m.def(
      "dep_closed_form",
      [](const channel::SystemConfig& cfg, double tau, double p, double alpha) {
        const auto d = detection::DetectionParams::from_config(cfg, tau, p, alpha);
        return dep_to_dict(detection::avg_dep_closed_form(d, cfg.quadrature_order));
      },
      py::arg("config"), py::arg("tau_w"), py::arg("p_w"), py::arg("alpha"));

  m.def(
      "dep_monte_carlo",
      [](const channel::SystemConfig& cfg, double tau, double p, double alpha,
         long trials, std::uint64_t seed) {
        return dep_to_dict(detection::avg_dep_monte_carlo(
            cfg, p, alpha, tau, trials, numerics::RngStream(seed, 0)));
      },
      py::arg("config"), py::arg("tau_w"), py::arg("p_w"), py::arg("alpha"),
      py::arg("trials"), py::arg("seed"));

  m.def(
      "optimize_phases",
      [](const channel::SystemConfig& cfg, const std::string& mode,
         std::uint64_t seed) {
        if (mode != "psr" && mode != "csr") {
          throw py::value_error("mode must be psr or csr");
        }
        numerics::RngStream ch_rng(seed, 0);
        const auto ch = channel::sample_channels(cfg, ch_rng);
        numerics::RngStream init(seed, 1);
        const auto res = mode == "psr" ? optimizer::optimize_psr(ch, cfg, init)
                                       : optimizer::optimize_csr(ch, cfg, init);
        py::dict out;
        out["feasible"] = res.feasible;
        out["converged"] = res.converged;
        out["iterations"] = res.iterations;
        out["alpha"] = res.alpha;
        out["p_w"] = res.p;
        out["tau_w"] = res.tau;
        out["xi"] = res.dep.xi;
        out["gamma"] = res.gamma_final;
        out["regime"] =
            res.regime == strategy::SnrRegime::high ? "high" : "low";
        std::vector<double> theta(res.phase.theta.data(),
                                  res.phase.theta.data() + res.phase.size());
        out["theta"] = theta;
        out["message"] = res.message;
        return out;
      },
      py::arg("config"), py::arg("mode"), py::arg("seed"));
}
