#include "subcdm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

namespace subcdm {

namespace {

Robot make_robot(std::size_t index, RobotId id, Pose pose, std::uint64_t seed,
                 const SimConfig& cfg) {
  const std::uint64_t stream = index;
  Robot r{.index = index,
          .id = id,
          .pose = pose,
          .motion = {},
          .role = {},
          .fault = {},
          .opinion = Opinion::Black,
          .decision = std::nullopt,
          .hop = {},
          .election = start_election(id),
          .eval = std::nullopt,
          .confidence = initial_confidence(cfg.confidence),
          .relay = RelayBuffer(cfg.relay),
          .motion_rng = RngStream(seed, stream, Purpose::Motion),
          .sensing_rng = RngStream(seed, stream, Purpose::Sensing),
          .dmvd_rng = RngStream(seed, stream, Purpose::Dmvd),
          .role_rng = RngStream(seed, stream, Purpose::Role),
          .membership_rng = RngStream(seed, stream, Purpose::Membership),
          .fault_rng = RngStream(seed, stream, Purpose::Fault)};
  r.motion = sample_straight(cfg.motion, r.motion_rng);
  return r;
}

EvalState fresh_eval(const SimConfig& cfg) {
  EvalState eval;
  eval.s = cfg.fixed_s > 0 ? cfg.fixed_s : 1;
  return eval;
}

}  // namespace

Simulation::Simulation(SimConfig cfg, std::uint64_t seed)
    : cfg_((cfg.validate(), std::move(cfg))),
      seed_(seed),
      grid_([&] {
        RngStream rng(seed, 0, Purpose::Environment);
        return generate_environment(cfg_.arena_side, cfg_.tile_size, cfg_.black_fraction, rng);
      }()),
      heatmap_(cfg_.arena_side, cfg_.heatmap_cell),
      detector_(cfg_.convergence_threshold, cfg_.convergence_hold, cfg_.dt()) {
  const std::size_t n = cfg_.n_robots;
  trace_.dt = cfg_.dt();

  RngStream placement(seed, 0, Purpose::Placement);
  const std::vector<Pose> poses = place_robots(n, cfg_.arena_side, cfg_.motion, placement);

  std::vector<RobotId> ids(n);
  std::iota(ids.begin(), ids.end(), RobotId{0});
  RngStream identity(seed, 0, Purpose::Identity);
  std::shuffle(ids.begin(), ids.end(), identity.engine());

  // Exact 50:50 split of initial opinions (the odd robot out is White).
  std::vector<Opinion> opinions(n, Opinion::White);
  std::fill_n(opinions.begin(), n / 2, Opinion::Black);
  RngStream initial(seed, 0, Purpose::InitialOpinion);
  std::shuffle(opinions.begin(), opinions.end(), initial.engine());

  robots_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    robots_.push_back(make_robot(i, ids[i], poses[i], seed, cfg_));
    robots_.back().opinion = opinions[i];
    delivery_rngs_.emplace_back(seed, i, Purpose::Delivery);
  }

  if (cfg_.fixed_s > 0 && cfg_.strategy == Strategy::Distributed) {
    for (Robot& r : robots_) {
      r.confidence.s = cfg_.fixed_s;
      r.confidence.p = selection_probability(cfg_.fixed_s, cfg_.confidence.p_per_s);
    }
  }

  if (cfg_.strategy == Strategy::LeaderBased && !cfg_.leader_election) {
    designated_leader_ = *std::min_element(ids.begin(), ids.end());
    for (Robot& r : robots_) {
      if (r.id == designated_leader_) {
        r.eval = fresh_eval(cfg_);
        r.hop = leader_hop_state(r.id, r.eval->s);
        r.election = ElectionState{r.id, 0.0, 0.0, true};
      } else {
        r.hop = follower_hop_state(designated_leader_);
        r.election = ElectionState{designated_leader_, 0.0, 0.0, false};
      }
    }
  }

  positions_.resize(n);
  outboxes_.resize(n);
  inboxes_.resize(n);
  faulty_scratch_.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) positions_[i] = robots_[i].pose.position;
  adjacency_ = NeighborIndex(positions_, cfg_.arena_side, cfg_.comms.d_comm).all();
}

void Simulation::attach_robot_trace(std::ostream& os) {
  robot_trace_ = &os;
  os << "tick,time,robot,id,x,y,heading,role,faulty,opinion,phase,hop,s,alpha,s_i,p_i\n";
}

bool Simulation::step() {
  if (finished_) return false;
  ++tick_;
  schedule_faults();
  exchange_messages();
  for (Robot& r : robots_) {
    outboxes_[r.index].clear();
    if (!r.fault.faulty) update_robot(r);
  }
  move_robots();
  record();
  if (robot_trace_) write_robot_rows();

  if (stop_tick_ && tick_ >= *stop_tick_) finished_ = true;
  if (tick_ >= cfg_.max_ticks()) finished_ = true;
  return !finished_;
}

void Simulation::run() {
  while (step()) {
  }
}

void Simulation::schedule_faults() {
  for (Robot& r : robots_) {
    const bool was_faulty = r.fault.faulty;
    fault_scheduler(r.fault, r.role.expired(), cfg_.faults, cfg_.dt(), r.fault_rng);
    if (was_faulty && !r.fault.faulty && cfg_.strategy == Strategy::LeaderBased &&
        cfg_.leader_election) {
      // A recovering robot forgets its pre-fault election view and must earn
      // leadership again.
      r.election = start_election(r.id);
      r.eval.reset();
      r.hop = follower_hop_state(r.id);
    }
    faulty_scratch_[r.index] = r.fault.faulty;
  }
}

void Simulation::exchange_messages() {
  delivered_last_ = deliver(outboxes_, adjacency_, cfg_.comms, faulty_scratch_, tick_,
                            delivery_rngs_, inboxes_);
}

void Simulation::update_robot(Robot& r) {
  const std::vector<Message>& inbox = inboxes_[r.index];
  heard_.clear();
  reports_.clear();
  hop_beacons_.clear();
  election_beacons_.clear();
  for (const Message& m : inbox) {
    if (const auto* op = std::get_if<OpinionBroadcast>(&m.payload)) {
      if (op->origin == r.id) continue;
      heard_.push_back(op->opinion);
      if (op->origin == m.sender) reports_.push_back({op->origin, op->opinion});
    } else if (const auto* hb = std::get_if<HopBeacon>(&m.payload)) {
      hop_beacons_.push_back(*hb);
    } else if (const auto* eb = std::get_if<ElectionBeacon>(&m.payload)) {
      election_beacons_.push_back(*eb);
    }
  }

  if (cfg_.strategy == Strategy::LeaderBased) {
    if (cfg_.leader_election) update_election(r);
    if (r.is_leader()) {
      r.hop = leader_hop_state(r.id, r.eval->s);
    } else {
      update_hop(r.hop, hop_beacons_, cfg_.dt(), cfg_.hop);
    }
  }

  if (cfg_.strategy == Strategy::Distributed && r.role.role == Role::DecisionMaking) {
    for (Opinion heard : heard_) {
      r.confidence.alpha =
          update_confidence(r.confidence.alpha, r.opinion, heard, cfg_.confidence.gamma);
      if (cfg_.fixed_s == 0) escalate(r.confidence, cfg_.confidence);
    }
  }

  update_role(r);
  update_decision(r);

  if (r.is_leader() && cfg_.fixed_s == 0) {
    leader_evaluate(*r.eval, reports_, cfg_.dt(), cfg_.eval);
    r.hop.s = r.eval->s;
  }

  build_outbox(r);
}

void Simulation::update_election(Robot& r) {
  const RobotId before = r.election.candidate;
  const bool was_leader = r.election.leader;
  subcdm::update_election(r.election, r.id, election_beacons_, cfg_.dt(), cfg_.election);

  if (r.election.leader && !was_leader) {
    r.eval = fresh_eval(cfg_);
    r.hop = leader_hop_state(r.id, r.eval->s);
  } else if (!r.election.leader && was_leader) {
    r.eval.reset();
    r.hop = follower_hop_state(r.election.candidate);
  } else if (r.election.candidate != before) {
    r.hop = follower_hop_state(r.election.candidate);
  }
}

void Simulation::update_role(Robot& r) {
  const Role before = r.role.role;
  const auto decide = [&]() -> Membership {
    switch (cfg_.strategy) {
      case Strategy::FullSwarmDMVD:
        return Membership::Member;
      case Strategy::LeaderBased:
        return membership(r.hop);
      case Strategy::Distributed:
        return membership_draw(r.confidence.p, r.membership_rng);
    }
    return Membership::NonMember;
  };
  const Role non_member = cfg_.strategy == Strategy::Distributed ? Role::Relay : Role::Idle;
  maybe_reassign(r.role, decide, non_member, cfg_.mean_role_time, cfg_.dt(), r.role_rng);

  if (r.role.role == before && (r.decision || r.role.role != Role::DecisionMaking)) return;
  r.relay.clear();
  if (r.role.role == Role::DecisionMaking) {
    r.decision = begin_exploration(r.opinion, cfg_.dmvd.sigma, r.dmvd_rng);
  } else {
    r.decision.reset();
  }
}

void Simulation::update_decision(Robot& r) {
  if (!r.decision) return;
  DecisionState& d = *r.decision;
  if (d.exploring()) {
    const Color sample = sense_ground(grid_, r.pose.position, cfg_.noise_p, r.sensing_rng);
    explore_tick(d, sample, cfg_.dt());
    if (d.phase_done()) {
      const double quality = quality_estimate(d.time_matched, d.duration, cfg_.dmvd.rho_min);
      begin_dissemination(d, quality, cfg_.dmvd, r.dmvd_rng);
    }
    return;
  }
  disseminate_tick(d, heard_, cfg_.dt());
  outboxes_[r.index].push_back(Message{r.id, tick_, OpinionBroadcast{d.opinion, r.id}});
  if (d.phase_done()) {
    r.opinion = adopt_opinion(d.observed, d.opinion, r.dmvd_rng);
    d = begin_exploration(r.opinion, cfg_.dmvd.sigma, r.dmvd_rng);
  }
}

void Simulation::build_outbox(Robot& r) {
  std::vector<Message>& out = outboxes_[r.index];
  if (cfg_.strategy == Strategy::LeaderBased) {
    if (r.hop.hop) {
      out.push_back(Message{r.id, tick_,
                            HopBeacon{r.hop.leader, *r.hop.hop, r.hop.s, r.hop.last_contact}});
    }
    if (cfg_.leader_election) out.push_back(Message{r.id, tick_, election_beacon(r.election)});
  } else if (cfg_.strategy == Strategy::Distributed && r.role.role == Role::Relay) {
    relay_tick(r.relay, inboxes_[r.index], out, r.id, tick_, cfg_.dt());
  }
}

void Simulation::move_robots() {
  const double dt = cfg_.dt();
  const double reach = std::max(cfg_.motion.proximity_radius,
                                cfg_.motion.body_diameter + cfg_.motion.avoid_margin);
  const bool reuse_adjacency = cfg_.comms.d_comm >= reach;
  std::vector<Pose> proposed;
  proposed.reserve(robots_.size());
  std::vector<Vec2> obstacles;
  std::vector<std::size_t> nearby;
  std::optional<NeighborIndex> proximity;
  if (!reuse_adjacency) proximity.emplace(positions_, cfg_.arena_side, reach);

  for (Robot& r : robots_) {
    if (r.fault.faulty) {
      proposed.push_back(r.pose);
      continue;
    }
    obstacles.clear();
    if (reuse_adjacency) {
      for (std::size_t j : adjacency_[r.index]) {
        if (distance_sq(positions_[r.index], positions_[j]) <= reach * reach) {
          obstacles.push_back(positions_[j]);
        }
      }
    } else {
      proximity->query(r.index, nearby);
      for (std::size_t j : nearby) obstacles.push_back(positions_[j]);
    }
    auto [pose, phase] =
        step_motion(r.pose, r.motion, dt, obstacles, cfg_.arena_side, cfg_.motion, r.motion_rng);
    r.motion = phase;
    proposed.push_back(pose);
  }

  resolve_overlaps(positions_, proposed, cfg_.motion.body_diameter);
  for (Robot& r : robots_) {
    r.pose = proposed[r.index];
    positions_[r.index] = r.pose.position;
  }
  adjacency_ = NeighborIndex(positions_, cfg_.arena_side, cfg_.comms.d_comm).all();
}

const Robot* Simulation::tracked_leader() const {
  const Robot* best = nullptr;
  for (const Robot& r : robots_) {
    if (r.is_leader() && (!best || r.id < best->id)) best = &r;
  }
  return best;
}

void Simulation::record() {
  TickRecord rec;
  rec.tick = tick_;
  rec.messages_delivered = delivered_last_;
  double s_sum = 0.0;
  for (const Robot& r : robots_) {
    rec.messages_sent += outboxes_[r.index].size();
    auto& all = rec.all_opinions;
    (r.opinion == Opinion::Black ? all.black : all.white) += 1;
    if (r.fault.faulty) ++rec.faulty;
    if (r.active_decision_maker()) {
      ++rec.decision_makers;
      (r.opinion == Opinion::Black ? rec.dm_opinions.black : rec.dm_opinions.white) += 1;
      heatmap_.accumulate(r.pose.position, cfg_.dt());
    }
    s_sum += r.confidence.s;
  }
  rec.mean_s = s_sum / static_cast<double>(robots_.size());

  const Robot* leader = tracked_leader();
  if (leader) {
    const EvalState& e = *leader->eval;
    rec.leader = leader->id;
    rec.s = e.s;
    rec.collected = e.collected.size();
    rec.majority_ratio = e.majority_ratio;
    rec.hold_timer = e.hold_timer;
    rec.decisions = e.decisions.size();
    if (last_leader_ != leader->id) {
      if (last_leader_) ++leader_changes_;
      last_leader_ = leader->id;
    }
  }
  trace_.ticks.push_back(rec);

  if (convergence_.converged) return;
  switch (cfg_.strategy) {
    case Strategy::FullSwarmDMVD:
      detector_.observe(tick_, rec.all_opinions);
      convergence_ = detector_.result();
      break;
    case Strategy::Distributed:
      detector_.observe(tick_, rec.dm_opinions);
      convergence_ = detector_.result();
      break;
    case Strategy::LeaderBased:
      for (const Robot& r : robots_) {
        if (r.eval && r.eval->final()) {
          convergence_ = {true, r.eval->final_opinion, time()};
          break;
        }
      }
      break;
  }
  if (convergence_.converged && cfg_.stop_on_convergence) {
    stop_tick_ = std::lround((convergence_.time + cfg_.convergence_margin) * cfg_.tick_rate);
  }
}

void Simulation::write_robot_rows() {
  std::ostream& os = *robot_trace_;
  const double t = time();
  for (const Robot& r : robots_) {
    const char* phase = !r.decision ? "-" : (r.decision->exploring() ? "explore" : "disseminate");
    const std::string hop = r.hop.hop ? fmt::format("{}", *r.hop.hop) : std::string("-");
    fmt::print(os, "{},{:.1f},{},{},{:.4f},{:.4f},{:.4f},{},{},{},{},{},{},{:.6f},{},{:.2f}\n", tick_,
               t, r.index, r.id, r.pose.position.x, r.pose.position.y, r.pose.heading,
               role_name(r.role.role), r.fault.faulty ? 1 : 0, color_char(r.opinion), phase, hop,
               r.hop.s, r.confidence.alpha, r.confidence.s, r.confidence.p);
  }
}

RunSummary Simulation::summarize() const {
  RunSummary s;
  s.seed = seed_;
  s.duration = time();
  s.converged = convergence_.converged;
  s.messages_delivered = 0;
  for (const TickRecord& rec : trace_.ticks) s.messages_delivered += rec.messages_delivered;
  if (s.converged) {
    s.decision = convergence_.decision;
    s.convergence_time = convergence_.time;
    const auto truth = grid_.dominant();
    s.outcome = truth && s.decision == truth ? Outcome::Correct : Outcome::Incorrect;
  }
  const double end = s.converged ? s.convergence_time : s.duration;
  const std::vector<int> dm = trace_.dm_series();
  // Record index k holds tick k + 1.
  s.steady_subset_size =
      dm.empty() ? 0.0 : steady_subset_size(dm, cfg_.dt(), std::max(0.0, end - cfg_.dt()), cfg_.steady_window);
  s.morans_i = morans_index(heatmap_.field(), Contiguity::Queen);
  s.leader_changes = leader_changes_;
  if (!trace_.ticks.empty()) {
    const TickRecord& last = trace_.ticks.back();
    s.mean_s = last.mean_s;
    s.final_s = cfg_.strategy == Strategy::LeaderBased ? last.s
                                                        : static_cast<int>(std::lround(last.mean_s));
  }
  return s;
}

std::pair<RunTrace, RunSummary> run_one(const SimConfig& cfg, std::uint64_t seed,
                                        std::ostream* robot_trace) {
  Simulation sim(cfg, seed);
  if (robot_trace) sim.attach_robot_trace(*robot_trace);
  sim.run();
  RunSummary summary = sim.summarize();
  return {sim.trace(), std::move(summary)};
}

void write_tick_csv(std::ostream& os, const RunTrace& trace) {
  os << "tick,time,decision_makers,dm_black,dm_white,black,white,faulty,messages_sent,"
        "messages_delivered,leader,s,collected,majority_ratio,hold_timer,decisions,mean_s\n";
  for (const TickRecord& r : trace.ticks) {
    fmt::print(os, "{},{:.1f},{},{},{},{},{},{},{},{},{},{},{},{:.4f},{:.1f},{},{:.3f}\n", r.tick,
               static_cast<double>(r.tick) * trace.dt, r.decision_makers, r.dm_opinions.black,
               r.dm_opinions.white, r.all_opinions.black, r.all_opinions.white, r.faulty,
               r.messages_sent, r.messages_delivered, r.leader, r.s, r.collected, r.majority_ratio,
               r.hold_timer, r.decisions, r.mean_s);
  }
}

}  // namespace subcdm
