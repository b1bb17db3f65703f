#include <optional>
#include <string>
#include <vector>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "auvtrack/channel.hpp"
#include "auvtrack/config.hpp"
#include "auvtrack/estimator.hpp"
#include "auvtrack/graph.hpp"
#include "auvtrack/sim.hpp"

namespace py = pybind11;
using namespace auvtrack;

namespace {

std::vector<std::string> validate_file(const std::string& path) {
  try {
    return load_scenario(path).validate();
  } catch (const ConfigError& e) {
    return e.errors();
  } catch (const std::exception& e) {
    return {e.what()};
  }
}

py::tuple run_file(const std::string& path, std::optional<std::uint64_t> seed) {
  ScenarioConfig cfg = load_and_validate(path);
  if (seed) cfg.seed = *seed;
  RunLog log;
  {
    py::gil_scoped_release release;
    log = run_scenario(cfg);
  }
  return py::make_tuple(log.summary().dump(), log.to_csv());
}

py::list sweep_file(const std::string& path, const std::vector<int>& horizons, int seeds) {
  const ScenarioConfig cfg = load_and_validate(path);
  std::vector<SweepRow> rows;
  {
    py::gil_scoped_release release;
    rows = horizon_sweep(cfg, horizons, seeds);
  }
  py::list out;
  for (const auto& r : rows) {
    py::dict d;
    d["horizon"] = r.horizon;
    d["mean_error"] = r.mean_error;
    d["per_seed"] = r.per_seed;
    out.append(d);
  }
  return out;
}

py::object estimate_bearings(const std::vector<std::tuple<double, double, double, double, int>>& rows,
                             double t_now, double sigma) {
  std::vector<Measurement> ms;
  for (const auto& [t, b, x, y, src] : rows) {
    Measurement m;
    m.t = t;
    m.bearing = b;
    m.p_obs = Vec2(x, y);
    m.source = static_cast<AgentId>(src);
    ms.push_back(m);
  }
  const EstimateOutcome out = estimate(ms, t_now, sigma);
  if (!out.estimate) return py::none();
  py::dict d;
  d["xi"] = Eigen::VectorXd(out.estimate->xi);
  d["P"] = Eigen::MatrixXd(out.estimate->P);
  d["status"] = std::string(to_string(out.status));
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cooperative bearing-only target tracking core";
  m.def("thorp_absorption", &thorp_absorption, py::arg("f_khz"));
  m.def("transmission_loss", &transmission_loss, py::arg("d_m"), py::arg("f_khz"));
  m.def("slot_byte_budget", &slot_byte_budget, py::arg("bitrate"), py::arg("slot_duration"));
  m.def("fiedler", [](const Eigen::MatrixXd& L) { return fiedler(L); }, py::arg("laplacian"));
  m.def("estimate", &estimate_bearings, py::arg("measurements"), py::arg("t_now"),
        py::arg("sigma"));
  m.def("validate", &validate_file, py::arg("path"));
  m.def("run", &run_file, py::arg("path"), py::arg("seed") = py::none());
  m.def("sweep", &sweep_file, py::arg("path"), py::arg("horizons"), py::arg("seeds"));
}
