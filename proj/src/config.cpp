#include "auvtrack/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "auvtrack/angles.hpp"
#include "auvtrack/packet.hpp"

namespace auvtrack {

namespace {

using nlohmann::json;

std::string join(const std::vector<std::string>& errors) {
  std::ostringstream os;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (i) os << "; ";
    os << errors[i];
  }
  return os.str();
}

// Reads optional fields, recording type errors under their dotted path
// instead of stopping at the first one.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  template <typename T>
  void get(const json& obj, const char* key, const std::string& path, T& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    try {
      out = obj.at(key).get<T>();
    } catch (const json::exception&) {
      errors_.push_back(path + "." + key + ": wrong type");
    }
  }

  void get_vec2(const json& obj, const char* key, const std::string& path, Vec2& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      errors_.push_back(path + "." + key + ": expected [x, y]");
      return;
    }
    out = Vec2(v[0].get<double>(), v[1].get<double>());
  }

  void modem(const json& obj, const std::string& path, ModemConfig& m) {
    get(obj, "source_level", path, m.source_level);
    get(obj, "noise_level", path, m.noise_level);
    get(obj, "directivity_index", path, m.directivity_index);
    get(obj, "frequency_khz", path, m.frequency_khz);
    get(obj, "detection_threshold", path, m.detection_threshold);
    get(obj, "bitrate", path, m.bitrate);
    get(obj, "rho_max", path, m.rho_max);
  }

  std::vector<std::string>& errors() { return errors_; }

 private:
  std::vector<std::string>& errors_;
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error("invalid scenario config: " + join(errors)),
      errors_(std::move(errors)) {}

ScenarioConfig scenario_from_json(const json& j) {
  std::vector<std::string> errors;
  Reader rd(errors);
  ScenarioConfig cfg;
  if (!j.is_object()) throw ConfigError({"config root must be an object"});

  rd.get(j, "name", "", cfg.name);
  rd.get(j, "seed", "", cfg.seed);
  rd.get(j, "duration", "", cfg.duration);
  rd.get(j, "pdr", "", cfg.pdr);
  rd.get(j, "neighbor_timeout_rounds", "", cfg.neighbor_timeout_rounds);
  rd.get(j, "hold_surge", "", cfg.hold_surge);
  rd.get(j, "settle_time", "", cfg.settle_time);

  ModemConfig modem;
  if (j.contains("modem")) rd.modem(j["modem"], "modem", modem);

  const json defaults = j.value("agent_defaults", json::object());
  AgentState base;
  rd.get(defaults, "u_max", "agent_defaults", base.u_max);
  rd.get(defaults, "r_max", "agent_defaults", base.r_max);
  rd.get(defaults, "heading", "agent_defaults", base.theta);

  if (j.contains("placement")) {
    PlacementConfig pl;
    const json& p = j["placement"];
    rd.get_vec2(p, "origin", "placement", pl.origin);
    rd.get(p, "size", "placement", pl.size);
    rd.get(p, "random_agent_heading", "placement", pl.random_agent_heading);
    rd.get(p, "random_target_heading", "placement", pl.random_target_heading);
    cfg.placement = pl;
  }

  if (j.contains("agents")) {
    const json& arr = j["agents"];
    if (!arr.is_array()) {
      errors.emplace_back("agents: expected an array");
    } else {
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = "agents[" + std::to_string(i) + "]";
        AgentConfig a{base, modem};
        rd.get_vec2(arr[i], "position", path, a.initial.p);
        rd.get(arr[i], "heading", path, a.initial.theta);
        rd.get(arr[i], "u_max", path, a.initial.u_max);
        rd.get(arr[i], "r_max", path, a.initial.r_max);
        if (arr[i].contains("modem")) rd.modem(arr[i]["modem"], path + ".modem", a.modem);
        a.initial.theta = wrap_angle(a.initial.theta);
        cfg.agents.push_back(a);
      }
    }
  } else if (j.contains("agent_count")) {
    int n = 0;
    rd.get(j, "agent_count", "", n);
    for (int i = 0; i < n; ++i) cfg.agents.push_back({base, modem});
  }

  if (j.contains("target")) {
    const json& t = j["target"];
    std::string kind = "fixed";
    rd.get(t, "kind", "target", kind);
    try {
      cfg.target.kind = parse_trajectory_kind(kind);
    } catch (const std::invalid_argument& e) {
      errors.emplace_back(std::string("target.kind: ") + e.what());
    }
    rd.get_vec2(t, "p0", "target", cfg.target.p0);
    rd.get_vec2(t, "v0", "target", cfg.target.v0);
    rd.get(t, "v_n", "target", cfg.target.v_n);
    rd.get(t, "omega", "target", cfg.target.omega);
    rd.get(t, "heading0", "target", cfg.target.heading0);
  }

  const json tdma = j.value("tdma", json::object());
  rd.get(tdma, "slot_duration", "tdma", cfg.tdma.slot_duration);
  if (tdma.contains("slot_order")) {
    std::vector<int> order;
    rd.get(tdma, "slot_order", "tdma", order);
    for (int id : order) {
      if (id < 0 || id > kMaxSenderId) {
        errors.push_back("tdma.slot_order: id " + std::to_string(id) + " out of range");
      } else {
        cfg.tdma.slot_order.push_back(static_cast<AgentId>(id));
      }
    }
  } else {
    for (std::size_t i = 0; i < cfg.agents.size(); ++i) {
      cfg.tdma.slot_order.push_back(static_cast<AgentId>(i));
    }
  }

  const json sensing = j.value("sensing", json::object());
  rd.get(sensing, "period", "sensing", cfg.sensing.period);
  double sigma_deg = 0.0;
  rd.get(sensing, "sigma_deg", "sensing", sigma_deg);
  cfg.sensing.sigma = deg2rad(sigma_deg);
  rd.get(sensing, "window", "sensing", cfg.sensing.window);
  rd.get(sensing, "capacity", "sensing", cfg.sensing.capacity);

  const json pl = j.value("planner", json::object());
  PlannerParams& pp = cfg.planner;
  rd.get(pl, "horizon", "planner", pp.horizon);
  rd.get(pl, "action_count", "planner", pp.action_count);
  rd.get(pl, "max_heading_change", "planner", pp.max_heading_change);
  rd.get(pl, "granularity_step", "planner", pp.granularity_step);
  rd.get(pl, "min_heading_change", "planner", pp.min_heading_change);
  rd.get(pl, "granularity_window", "planner", pp.granularity_window);
  rd.get(pl, "alpha", "planner", pp.alpha);
  rd.get(pl, "gamma", "planner", pp.gamma);
  rd.get(pl, "desired_range", "planner", pp.desired_range);
  rd.get(pl, "max_range", "planner", pp.max_range);
  rd.get(pl, "safety_distance", "planner", pp.safety_distance);
  rd.get(pl, "center_weight", "planner", pp.center_weight);
  rd.get(pl, "epsilon", "planner", pp.epsilon);
  rd.get(pl, "enabled", "planner", cfg.planner_enabled);
  rd.get(pl, "adaptive_granularity", "planner", cfg.adaptive_granularity);
  std::string mode = "weighted";
  rd.get(pl, "mode", "planner", mode);
  try {
    pp.mode = parse_planner_mode(mode);
  } catch (const std::invalid_argument& e) {
    errors.emplace_back(std::string("planner.mode: ") + e.what());
  }
  pp.step_duration = cfg.tdma.round_duration();

  if (j.contains("failures")) {
    const json& arr = j["failures"];
    if (!arr.is_array()) {
      errors.emplace_back("failures: expected an array");
    } else {
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string path = "failures[" + std::to_string(i) + "]";
        int id = -1;
        FailureEvent f;
        rd.get(arr[i], "agent", path, id);
        rd.get(arr[i], "time", path, f.time);
        if (id < 0 || id > kMaxSenderId) {
          errors.push_back(path + ".agent: unknown agent id " + std::to_string(id));
        } else {
          f.agent = static_cast<AgentId>(id);
        }
        cfg.failures.push_back(f);
      }
    }
  }

  if (!errors.empty()) throw ConfigError(errors);
  return cfg;
}

std::vector<std::string> ScenarioConfig::validate() const {
  std::vector<std::string> errors = planner.validate();
  // Holds for the configured set only; the adapter later shrinks the range.
  if (planner.max_heading_change - planner.granularity_step <
      planner.min_heading_change - 1e-12) {
    errors.emplace_back(
        "planner.max_heading_change - planner.granularity_step must be >= "
        "planner.min_heading_change");
  }
  const std::size_t n = agents.size();
  if (n == 0) errors.emplace_back("agents: at least one agent is required");
  if (n > static_cast<std::size_t>(kMaxSenderId) + 1) {
    errors.emplace_back("agents: at most 16 agents fit the packet header");
  }
  if (!(duration > 0.0)) errors.emplace_back("duration must be > 0");
  if (pdr < 0.0 || pdr > 1.0) errors.emplace_back("pdr must be in [0, 1]");
  if (!(tdma.slot_duration > 0.0)) errors.emplace_back("tdma.slot_duration must be > 0");
  if (!(sensing.period > 0.0)) errors.emplace_back("sensing.period must be > 0");
  if (sensing.sigma < 0.0) errors.emplace_back("sensing.sigma_deg must be >= 0");
  if (!(sensing.window > 0.0)) errors.emplace_back("sensing.window must be > 0");
  if (sensing.capacity == 0) errors.emplace_back("sensing.capacity must be > 0");
  if (neighbor_timeout_rounds < 1) errors.emplace_back("neighbor_timeout_rounds must be >= 1");

  auto is_multiple = [](double a, double b) {
    if (!(b > 0.0)) return false;
    const double q = a / b;
    return std::abs(q - std::round(q)) < 1e-9 * std::max(1.0, q);
  };
  if (tdma.slot_duration > 0.0 && !is_multiple(duration, tdma.slot_duration)) {
    errors.emplace_back("duration must be a multiple of tdma.slot_duration");
  }
  if (sensing.period > 0.0 && !is_multiple(tdma.slot_duration, sensing.period)) {
    errors.emplace_back("tdma.slot_duration must be a multiple of sensing.period");
  }

  std::vector<AgentId> sorted = tdma.slot_order;
  std::sort(sorted.begin(), sorted.end());
  std::vector<AgentId> expected(n);
  std::iota(expected.begin(), expected.end(), AgentId{0});
  if (sorted != expected) {
    errors.emplace_back("tdma.slot_order must be a permutation of the agent ids");
  }

  const double round = tdma.round_duration();
  for (std::size_t i = 0; i < n; ++i) {
    const std::string path = "agents[" + std::to_string(i) + "]";
    const auto& a = agents[i];
    const auto& m = a.modem;
    if (!(a.initial.u_max > 0.0)) errors.push_back(path + ".u_max must be > 0");
    if (!(a.initial.r_max > 0.0)) errors.push_back(path + ".r_max must be > 0");
    if (!(m.frequency_khz > 0.0)) errors.push_back(path + ".modem.frequency_khz must be > 0");
    if (!(m.bitrate > 0.0)) errors.push_back(path + ".modem.bitrate must be > 0");
    if (!(m.detection_threshold > 0.0 && m.ideal_snr() > m.detection_threshold)) {
      errors.push_back(path + ".modem: need rho_max > detection_threshold > 0");
    }
    if (planner.max_heading_change > a.initial.r_max * round * (1.0 + 1e-9)) {
      errors.push_back("planner.max_heading_change exceeds r_max * round duration for " + path);
    }
    const std::size_t budget = slot_byte_budget(m.bitrate, tdma.slot_duration);
    if (planner.horizon >= 1 &&
        intent_block_bytes(static_cast<std::size_t>(planner.horizon)) > budget) {
      errors.push_back(path + ".modem: intent block of " +
                       std::to_string(intent_block_bytes(planner.horizon)) +
                       " bytes exceeds the slot budget of " + std::to_string(budget));
    }
    if (!placement) {
      for (std::size_t k = i + 1; k < n; ++k) {
        if ((a.initial.p - agents[k].initial.p).norm() < planner.safety_distance) {
          errors.push_back("agents[" + std::to_string(i) + "] and agents[" +
                           std::to_string(k) + "] start closer than safety_distance");
        }
      }
    }
  }
  if (placement) {
    if (!(placement->size > 0.0)) errors.emplace_back("placement.size must be > 0");
    // Loose packing check: n disks of radius d_S/2 must fit the box.
    const double side = placement->size + planner.safety_distance;
    if (n * planner.safety_distance * planner.safety_distance > 0.5 * side * side) {
      errors.emplace_back("placement.size too small for agent count and safety_distance");
    }
  }
  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (failures[i].agent >= n) {
      errors.push_back("failures[" + std::to_string(i) + "].agent: unknown agent id " +
                       std::to_string(failures[i].agent));
    }
    if (failures[i].time < 0.0) {
      errors.push_back("failures[" + std::to_string(i) + "].time must be >= 0");
    }
  }
  if (target.kind == TrajectoryKind::Sinusoid && !(target.v_n >= 0.0)) {
    errors.emplace_back("target.v_n must be >= 0");
  }
  return errors;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file: " + path});
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("parse error: ") + e.what()});
  }
  return scenario_from_json(j);
}

ScenarioConfig load_and_validate(const std::string& path) {
  ScenarioConfig cfg = load_scenario(path);
  if (auto errors = cfg.validate(); !errors.empty()) throw ConfigError(errors);
  return cfg;
}

}  // namespace auvtrack
