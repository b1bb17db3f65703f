#include "auvtrack/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "auvtrack/angles.hpp"
#include "auvtrack/channel.hpp"
#include "auvtrack/graph.hpp"
#include "auvtrack/packet.hpp"
#include "auvtrack/planner.hpp"

namespace auvtrack {

namespace {

enum class Stream : std::uint32_t { Sensing = 1, Loss = 2, Placement = 3 };

// Independent per-purpose generator derived from the master seed.
std::mt19937_64 make_stream(std::uint64_t seed, Stream purpose, std::uint32_t a = 0,
                            std::uint32_t b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xFFFFFFFFu),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(purpose), a, b};
  return std::mt19937_64(seq);
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

struct AgentRuntime {
  AgentState truth;
  ModemConfig modem;
  bool alive = true;
  Control action;
  MeasurementBuffer buffer;
  std::vector<Measurement> pending;  // own bearings not yet broadcast
  std::map<AgentId, NeighborInfo> neighbors;
  std::optional<TargetEstimate> estimate;
  GranularityAdapter adapter;
  double planned_cost = 0.0;
  std::size_t evaluations = 0;

  AgentRuntime(const AgentConfig& cfg, const ScenarioConfig& sc)
      : truth(cfg.initial),
        modem(cfg.modem),
        buffer(sc.sensing.window, sc.sensing.capacity),
        adapter(sc.planner) {}
};

struct InFlight {
  std::vector<std::uint8_t> frame;
  std::vector<AgentId> receivers;
  double sent_at = 0.0;
};

std::optional<TargetEstimate> estimate_at(const std::optional<TargetEstimate>& est,
                                          double t) {
  if (!est) return std::nullopt;
  if (t <= est->t_ref) return est;
  return propagate(*est, t);
}

}  // namespace

double tracking_error(const TargetEstimate& est, const TargetState& truth) {
  return (est.position() - truth.p).norm();
}

ScenarioConfig resolve_placement(const ScenarioConfig& cfg) {
  if (!cfg.placement) return cfg;
  ScenarioConfig out = cfg;
  const PlacementConfig& pl = *cfg.placement;
  auto rng = make_stream(cfg.seed, Stream::Placement);
  std::uniform_real_distribution<double> coord(0.0, pl.size);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  const double d_s = cfg.planner.safety_distance;
  for (std::size_t i = 0; i < out.agents.size(); ++i) {
    Vec2 p;
    bool ok = false;
    for (int attempt = 0; attempt < 100000 && !ok; ++attempt) {
      p = pl.origin + Vec2(coord(rng), coord(rng));
      ok = std::all_of(out.agents.begin(), out.agents.begin() + i,
                       [&](const AgentConfig& a) { return (a.initial.p - p).norm() >= d_s; });
    }
    if (!ok) throw ConfigError({"placement: cannot satisfy safety_distance in the box"});
    out.agents[i].initial.p = p;
    if (pl.random_agent_heading) out.agents[i].initial.theta = wrap_angle(angle(rng));
  }
  if (pl.random_target_heading) out.target.heading0 = angle(rng);
  out.placement.reset();
  return out;
}

RunLog run_scenario(const ScenarioConfig& input) {
  if (auto errors = input.validate(); !errors.empty()) throw ConfigError(errors);
  const ScenarioConfig cfg = resolve_placement(input);

  const std::size_t n = cfg.agents.size();
  const double slot = cfg.tdma.slot_duration;
  const double round_dt = cfg.round_duration();
  const long total_slots = std::lround(cfg.duration / slot);
  const long ticks_per_slot = std::lround(slot / cfg.sensing.period);
  const double tick_dt = slot / static_cast<double>(ticks_per_slot);
  const std::size_t horizon = static_cast<std::size_t>(cfg.planner.horizon);

  std::vector<AgentRuntime> agents;
  agents.reserve(n);
  for (const auto& a : cfg.agents) agents.emplace_back(a, cfg);

  std::vector<std::mt19937_64> sensing_rng;
  std::vector<std::vector<std::mt19937_64>> loss_rng(n);
  for (std::size_t i = 0; i < n; ++i) {
    sensing_rng.push_back(make_stream(cfg.seed, Stream::Sensing, static_cast<std::uint32_t>(i)));
    for (std::size_t j = 0; j < n; ++j) {
      loss_rng[i].push_back(make_stream(cfg.seed, Stream::Loss, static_cast<std::uint32_t>(i),
                                        static_cast<std::uint32_t>(j)));
    }
  }

  std::vector<FailureEvent> failures = cfg.failures;
  std::stable_sort(failures.begin(), failures.end(),
                   [](const auto& a, const auto& b) { return a.time < b.time; });
  std::size_t next_failure = 0;

  RunLog log;
  log.scenario = cfg.name;
  log.seed = cfg.seed;
  log.agent_count = n;
  log.round_duration = round_dt;
  log.settle_start = cfg.settle_start();

  std::vector<InFlight> in_flight;
  std::size_t round_sent = 0, round_delivered = 0, round_evals = 0;

  for (long k = 0; k < total_slots; ++k) {
    const double t = static_cast<double>(k) * slot;
    const long round = k / static_cast<long>(n);

    // Packets of the previous slot arrive now.
    for (const InFlight& pkt : in_flight) {
      for (AgentId r : pkt.receivers) {
        AgentRuntime& rx = agents[r];
        if (!rx.alive) continue;
        AcousticPacket msg = decode_packet(pkt.frame, n);
        NeighborInfo info;
        info.pose = cfg.agents[msg.sender].initial;
        info.pose.p = msg.p;
        info.pose.theta = wrap_angle(msg.theta);
        info.pose_time = pkt.sent_at;
        info.intent.headings = msg.headings;
        info.received_round = round;
        // Surge is not on the wire: every agent uses the same range-keeping
        // rule, so the receiver re-derives it from its own estimate.
        if (auto est = estimate_at(rx.estimate, pkt.sent_at)) {
          info.intent.surge =
              surge_heuristic((est->position() - msg.p).norm(), est->velocity().norm(),
                              cfg.planner.desired_range, info.pose.u_max);
        }
        rx.neighbors[msg.sender] = info;
        for (const Measurement& m : msg.measurements) rx.buffer.add(m);
      }
    }
    in_flight.clear();

    while (next_failure < failures.size() && failures[next_failure].time <= t) {
      AgentRuntime& dead = agents[failures[next_failure].agent];
      dead.alive = false;
      dead.action = {};
      ++next_failure;
    }

    // Slot owner: estimate, plan, broadcast.
    const AgentId owner = slot_owner(t, cfg.tdma);
    AgentRuntime& me = agents[owner];
    if (me.alive) {
      me.buffer.prune(t);
      const EstimateOutcome fit = estimate(me.buffer.entries(), t,
                                           std::max(cfg.sensing.sigma, 1e-6));
      if (fit.status == EstimateStatus::Ok) {
        me.estimate = fit.estimate;
      } else {
        me.estimate = estimate_at(me.estimate, t);
      }

      for (auto it = me.neighbors.begin(); it != me.neighbors.end();) {
        it->second.age = static_cast<int>(round - it->second.received_round);
        if (it->second.age > cfg.neighbor_timeout_rounds) {
          it = me.neighbors.erase(it);
        } else {
          ++it;
        }
      }

      IntentPolicy policy;
      if (cfg.planner_enabled) {
        Belief belief;
        belief.id = owner;
        belief.time = t;
        belief.own = me.truth;
        belief.neighbors = me.neighbors;
        belief.target = me.estimate;
        belief.modem = me.modem;
        PlannerParams params = cfg.planner;
        params.max_heading_change = me.adapter.max_heading_change();
        const PlanResult res = plan(belief, params);
        policy = res.policy;
        me.planned_cost = res.cost;
        me.evaluations = res.leaf_evaluations;
        round_evals += res.leaf_evaluations;
        if (cfg.adaptive_granularity && res.has_target) {
          me.adapter.update(policy.headings.front());
        }
      } else {
        policy.headings.assign(horizon, 0.0);
        policy.surge = std::min(cfg.hold_surge, me.truth.u_max);
      }
      policy.issued_at = round;
      me.action = {policy.surge, policy.headings.front() / round_dt};

      AcousticPacket pkt;
      pkt.sender = owner;
      pkt.p = me.truth.p;
      pkt.theta = me.truth.theta;
      pkt.headings = policy.headings;
      const std::size_t budget = slot_byte_budget(me.modem.bitrate, slot);
      const std::size_t cap = measurement_capacity(horizon, budget);
      // Newest first; anything older is superseded.
      const std::size_t take = std::min(cap, me.pending.size());
      pkt.measurements.assign(me.pending.end() - static_cast<long>(take), me.pending.end());
      std::reverse(pkt.measurements.begin(), pkt.measurements.end());
      me.pending.clear();

      InFlight flight;
      flight.frame = encode_packet(pkt, budget);
      flight.sent_at = t;
      TransmissionRecord tx;
      tx.slot = k;
      tx.t = t;
      tx.sender = owner;
      tx.bytes = flight.frame.size();
      tx.measurements = pkt.measurements.size();
      for (std::size_t r = 0; r < n; ++r) {
        if (r == owner) continue;
        // Roll every link so each loss stream advances independently of
        // which receivers are alive.
        const bool ok =
            transmit(me.truth.p, agents[r].truth.p, me.modem, cfg.pdr, loss_rng[owner][r]);
        if (!agents[r].alive) continue;
        tx.attempted.push_back(static_cast<AgentId>(r));
        ++round_sent;
        if (ok) {
          tx.delivered.push_back(static_cast<AgentId>(r));
          flight.receivers.push_back(static_cast<AgentId>(r));
          ++round_delivered;
        }
      }
      log.transmissions.push_back(std::move(tx));
      in_flight.push_back(std::move(flight));
    }

    // Fly the slot, sampling bearings every T_m.
    for (long tick = 0; tick < ticks_per_slot; ++tick) {
      const double tt = t + static_cast<double>(tick) * tick_dt;
      const TargetState target = target_truth(cfg.target, tt);
      for (std::size_t i = 0; i < n; ++i) {
        AgentRuntime& a = agents[i];
        if (!a.alive) continue;
        if ((target.p - a.truth.p).norm() > 0.0) {
          Measurement m;
          m.t = tt;
          m.bearing = measure_bearing(target.p, a.truth.p, cfg.sensing.sigma, sensing_rng[i]);
          m.p_obs = a.truth.p;
          m.source = static_cast<AgentId>(i);
          a.buffer.add(m);
          a.pending.push_back(m);
        }
      }
      for (auto& a : agents) {
        if (a.alive) a.truth = step_agent(a.truth, a.action, tick_dt);
      }
    }

    if ((k + 1) % static_cast<long>(n) != 0) continue;

    // Round record.
    RoundRecord rec;
    rec.round = round;
    rec.t = static_cast<double>(k + 1) * slot;
    rec.target = target_truth(cfg.target, rec.t);
    rec.sent = round_sent;
    rec.delivered = round_delivered;
    rec.evaluations = round_evals;
    round_sent = round_delivered = round_evals = 0;

    std::vector<Vec2> live_pos;
    std::vector<double> live_bearings;
    for (const auto& a : agents) {
      if (!a.alive) continue;
      live_pos.push_back(a.truth.p);
      if ((rec.target.p - a.truth.p).norm() > 0.0) {
        live_bearings.push_back(true_bearing(rec.target.p, a.truth.p));
      }
    }
    if (!live_pos.empty()) {
      rec.fiedler = fiedler(laplacian(graph_from_positions(live_pos, cfg.agents[0].modem)));
    }
    rec.team_geometry = live_bearings.empty() ? kSentinelCost : geometry_cost(live_bearings);
    double spread = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < live_pos.size(); ++i) {
      for (std::size_t j = i + 1; j < live_pos.size(); ++j) {
        spread += (live_pos[i] - live_pos[j]).norm();
        ++pairs;
      }
    }
    rec.mean_spread = pairs ? spread / static_cast<double>(pairs) : 0.0;

    for (std::size_t i = 0; i < n; ++i) {
      const AgentRuntime& a = agents[i];
      AgentRecord ar;
      ar.id = static_cast<AgentId>(i);
      ar.alive = a.alive;
      ar.pose = a.truth;
      ar.surge = a.action.surge;
      ar.planned_cost = a.planned_cost;
      ar.evaluations = a.evaluations;
      ar.max_heading_change = a.adapter.max_heading_change();
      ar.tracking_error = std::numeric_limits<double>::quiet_NaN();
      if (auto est = estimate_at(a.estimate, rec.t)) {
        ar.has_estimate = true;
        ar.xi = est->xi;
        ar.trace_p = est->P.trace();
        ar.tracking_error = tracking_error(*est, rec.target);
      }
      // Terms on the truth, over the neighbors this agent currently knows.
      std::vector<Vec2> local{a.truth.p};
      std::vector<double> bearings;
      if ((rec.target.p - a.truth.p).norm() > 0.0) {
        bearings.push_back(true_bearing(rec.target.p, a.truth.p));
      }
      for (const auto& [id, info] : a.neighbors) {
        if (!agents[id].alive) continue;
        local.push_back(agents[id].truth.p);
        if ((rec.target.p - agents[id].truth.p).norm() > 0.0) {
          bearings.push_back(true_bearing(rec.target.p, agents[id].truth.p));
        }
      }
      ar.neighbor_count = local.size() - 1;
      ar.geometry = bearings.empty() ? kSentinelCost : geometry_cost(bearings);
      ar.distance = distance_cost((rec.target.p - a.truth.p).norm(), cfg.planner.desired_range);
      ar.connectivity = connectivity_cost(graph_from_positions(local, a.modem), 0);
      rec.agents.push_back(ar);
    }
    log.rounds.push_back(std::move(rec));
  }
  return log;
}

std::string RunLog::to_csv() const {
  std::ostringstream os;
  os << "round,t,target_x,target_y,target_vx,target_vy,agent,alive,x,y,theta,surge,"
        "has_estimate,est_x,est_y,est_vx,est_vy,trace_p,tracking_error,neighbors,"
        "j_geometry,j_distance,j_connectivity,planned_cost,evaluations,"
        "max_heading_change,fiedler,team_geometry,mean_spread,sent,delivered,"
        "round_evaluations\n";
  for (const auto& r : rounds) {
    for (const auto& a : r.agents) {
      os << r.round << ',' << fmt(r.t) << ',' << fmt(r.target.p.x()) << ','
         << fmt(r.target.p.y()) << ',' << fmt(r.target.v.x()) << ',' << fmt(r.target.v.y())
         << ',' << int(a.id) << ',' << int(a.alive) << ',' << fmt(a.pose.p.x()) << ','
         << fmt(a.pose.p.y()) << ',' << fmt(a.pose.theta) << ',' << fmt(a.surge) << ','
         << int(a.has_estimate) << ',' << fmt(a.xi(0)) << ',' << fmt(a.xi(1)) << ','
         << fmt(a.xi(2)) << ',' << fmt(a.xi(3)) << ',' << fmt(a.trace_p) << ','
         << fmt(a.tracking_error) << ',' << a.neighbor_count << ',' << fmt(a.geometry)
         << ',' << fmt(a.distance) << ',' << fmt(a.connectivity) << ','
         << fmt(a.planned_cost) << ',' << a.evaluations << ',' << fmt(a.max_heading_change)
         << ',' << fmt(r.fiedler) << ',' << fmt(r.team_geometry) << ','
         << fmt(r.mean_spread) << ',' << r.sent << ',' << r.delivered << ','
         << r.evaluations << '\n';
    }
  }
  return os.str();
}

double RunLog::mean_tracking_error(double t_from) const {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : rounds) {
    if (r.t < t_from) continue;
    for (const auto& a : r.agents) {
      if (a.alive && a.has_estimate) {
        sum += a.tracking_error;
        ++count;
      }
    }
  }
  return count ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
}

nlohmann::json RunLog::summary() const {
  nlohmann::json j;
  j["scenario"] = scenario;
  j["seed"] = seed;
  j["agents"] = agent_count;
  j["rounds"] = rounds.size();
  j["round_duration"] = round_duration;
  j["settle_start"] = settle_start;
  std::size_t sent = 0, delivered = 0, max_evals = 0;
  for (const auto& r : rounds) {
    sent += r.sent;
    delivered += r.delivered;
    max_evals = std::max(max_evals, r.evaluations);
  }
  j["packets_sent"] = sent;
  j["packets_delivered"] = delivered;
  j["transmissions"] = transmissions.size();
  j["max_round_evaluations"] = max_evals;
  const double err = mean_tracking_error(settle_start);
  j["mean_tracking_error"] = std::isnan(err) ? nlohmann::json(nullptr) : nlohmann::json(err);
  if (!rounds.empty()) {
    const auto& last = rounds.back();
    j["final_time"] = last.t;
    j["final_team_geometry"] = last.team_geometry;
    j["final_fiedler"] = last.fiedler;
    j["final_mean_spread"] = last.mean_spread;
    nlohmann::json per_agent = nlohmann::json::array();
    for (const auto& a : last.agents) {
      per_agent.push_back({{"id", a.id},
                           {"alive", a.alive},
                           {"tracking_error", std::isnan(a.tracking_error)
                                                  ? nlohmann::json(nullptr)
                                                  : nlohmann::json(a.tracking_error)},
                           {"j_geometry", a.geometry},
                           {"j_distance", a.distance},
                           {"j_connectivity", a.connectivity}});
    }
    j["final_agents"] = per_agent;
  }
  return j;
}

std::vector<SweepRow> horizon_sweep(const ScenarioConfig& cfg, const std::vector<int>& horizons,
                                    int n_seeds) {
  if (n_seeds < 2) throw std::invalid_argument("horizon_sweep: need at least two seeds");
  std::vector<SweepRow> rows;
  for (int h : horizons) {
    SweepRow row;
    row.horizon = h;
    double sum = 0.0;
    for (int s = 0; s < n_seeds; ++s) {
      ScenarioConfig run = cfg;
      run.planner.horizon = h;
      run.seed = cfg.seed + static_cast<std::uint64_t>(s);
      const RunLog log = run_scenario(run);
      const double err = log.mean_tracking_error(log.settle_start);
      row.per_seed.push_back(err);
      sum += err;
    }
    row.mean_error = sum / n_seeds;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_run(const RunLog& log, const std::string& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream csv(std::filesystem::path(dir) / "rounds.csv");
  csv << log.to_csv();
  std::ofstream js(std::filesystem::path(dir) / "summary.json");
  js << log.summary().dump(2) << '\n';
}

}  // namespace auvtrack
