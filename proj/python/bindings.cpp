#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stathedge/config.hpp"
#include "stathedge/errors.hpp"
#include "stathedge/experiments.hpp"
#include "stathedge/hedge_optimizer.hpp"
#include "stathedge/parallel.hpp"

namespace py = pybind11;
using namespace stathedge;

namespace {

py::array_t<double> arr(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::dict to_dict(const experiments::Report& r) {
  py::list checks;
  for (const auto& c : r.checks) checks.append(py::make_tuple(c.name, c.ok, c.detail));
  py::dict d;
  d["files"] = r.files;
  d["checks"] = checks;
  d["warnings"] = r.warnings;
  d["ok"] = r.ok();
  return d;
}

py::dict discrete_dict(const hedge::DiscretePortfolio& p) {
  std::vector<std::string> labels;
  for (const auto& i : p.instruments) labels.push_back(i.label());
  py::dict d;
  d["instruments"] = labels;
  d["pi"] = p.pi;
  d["lambda"] = p.lambda;
  d["branch"] = hedge::to_string(p.branch);
  d["cost"] = p.cost;
  d["objective"] = p.objective;
  d["stationarity_residual"] = p.stationarity_residual;
  return d;
}

py::dict continuous_dict(const hedge::ContinuousPortfolio& p) {
  py::dict d;
  d["K"] = arr(p.K);
  d["pi"] = arr(p.pi);
  d["q"] = p.q;
  d["p"] = p.p;
  d["lambda"] = p.lambda;
  d["branch"] = hedge::to_string(p.branch);
  d["cost"] = p.cost;
  d["objective"] = p.objective;
  return d;
}

experiments::Context context(const config::ExperimentConfig& c, std::optional<std::string> out,
                             std::optional<std::uint64_t> seed) {
  experiments::Context ctx;
  ctx.out_dir = out.value_or(c.output_dir);
  ctx.seed = seed.value_or(c.seed);
  ctx.workers = default_workers();
  return ctx;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Variance-optimal static hedging with bonds, forwards and vanilla options";

  static py::exception<Error> base(m, "StathedgeError", PyExc_RuntimeError);
  static py::exception<Error> cfg_err(m, "ConfigError", base.ptr());
  static py::exception<Error> redundant(m, "RedundantInstrumentError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Config) py::set_error(cfg_err, e.what());
      else if (e.kind() == ErrorKind::RedundantInstrument) py::set_error(redundant, e.what());
      else py::set_error(base, (std::string(to_string(e.kind())) + ": " + e.what()).c_str());
    }
  });

  py::class_<config::ExperimentConfig>(m, "Config")
      .def_readwrite("maturity", &config::ExperimentConfig::maturity)
      .def_readwrite("seed", &config::ExperimentConfig::seed)
      .def_readwrite("cost_cap", &config::ExperimentConfig::cost_cap)
      .def_readwrite("cost_fraction", &config::ExperimentConfig::cost_fraction)
      .def_readwrite("output_dir", &config::ExperimentConfig::output_dir)
      .def_property_readonly("continuous", &config::ExperimentConfig::continuous);

  m.def("load_config", &config::parse_file, py::arg("path"), "Parse a TOML experiment config file.");
  m.def("parse_config", &config::parse_string, py::arg("text"), py::arg("origin") = "<string>",
        "Parse TOML experiment config text.");
  m.def("fig_config", [](int which, double param) {
    switch (which) {
      case 1: return experiments::fig1_config(param);
      case 2: return experiments::fig2_config(param);
      case 3: return experiments::fig3_config(param);
      case 4: return experiments::fig4_config();
      default: fail(ErrorKind::Config, "figure: expected 1, 2, 3 or 4");
    }
  }, py::arg("which"), py::arg("param") = 0.0, "Built-in figure configuration (rho for 1-2, leverage for 3).");

  m.def("set_workers", &set_default_workers, py::arg("workers"));

  m.def("solve_discrete", [](const config::ExperimentConfig& c) {
    py::gil_scoped_release g;
    auto run = experiments::run_discrete(c);
    py::gil_scoped_acquire a;
    return discrete_dict(run.portfolio);
  }, py::arg("config"), "Optimal portfolio over discrete strikes.");
  m.def("solve_continuous", [](const config::ExperimentConfig& c) {
    py::gil_scoped_release g;
    auto run = experiments::run_continuous(c);
    py::gil_scoped_acquire a;
    return continuous_dict(run.portfolio);
  }, py::arg("config"), "Optimal strike density over a band.");
  m.def("profile", [](const config::ExperimentConfig& c) {
    const auto s = experiments::profile_grid(c);
    std::vector<double> phi;
    {
      py::gil_scoped_release g;
      phi = c.continuous() ? hedge::portfolio_profile(experiments::run_continuous(c).portfolio, s)
                           : hedge::portfolio_profile(experiments::run_discrete(c).portfolio, c.instruments.s0, s);
    }
    return py::make_tuple(arr(s), arr(phi));
  }, py::arg("config"), "Terminal payoff (S_T, Phi) of the optimal portfolio.");

  using Cmd = experiments::Report (*)(const config::ExperimentConfig&, const experiments::Context&);
  auto command = [&m](const char* name, Cmd fn, const char* doc) {
    m.def(name, [fn](const config::ExperimentConfig& c, std::optional<std::string> out, std::optional<std::uint64_t> seed) {
      const auto ctx = context(c, out, seed);
      experiments::Report r;
      {
        py::gil_scoped_release g;
        r = fn(c, ctx);
      }
      return to_dict(r);
    }, py::arg("config"), py::arg("out") = py::none(), py::arg("seed") = py::none(), doc);
  };
  command("hedge_discrete", &experiments::hedge_discrete, "Write discrete portfolio, profile and moment CSVs.");
  command("hedge_continuous", &experiments::hedge_continuous, "Write continuous portfolio, profile and moment CSVs.");
  command("validate", &experiments::validate, "Monte Carlo and cross-engine checks.");
  m.def("figure", [](int which, std::string out) {
    experiments::Context ctx;
    ctx.out_dir = std::move(out);
    ctx.workers = default_workers();
    experiments::Report r;
    {
      py::gil_scoped_release g;
      r = experiments::figure(which, ctx);
    }
    return to_dict(r);
  }, py::arg("which"), py::arg("out") = "out", "Write the data behind figure 1-4.");
}
