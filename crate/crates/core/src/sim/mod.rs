//! Seeded discrete-event model of the traffic-sign-recognition vehicle.
//!
//! The simulator emits one [`TickSet`] per millisecond over the fixed
//! alphabet [`AV_CLOCKS`]. Four periodic sources drive it:
//!
//! * the camera frame (every 50 ms) runs the processing pipeline camera,
//!   sign recognition, controller, vehicle dynamics;
//! * the sign trigger (every 200 ms) draws a sign and, after recognition,
//!   makes the controller turn, brake or change speed;
//! * obstacle detection (every 40 ms) may put the vehicle into emergency;
//! * the speed update (every 30 ms) redraws the speed jitter.
//!
//! Every pipeline clock ticks exactly once per frame and in frame order, so
//! the k-th tick of any stage belongs to the k-th frame. Each stage output is
//! the later of its sampled completion and one step after the previous
//! frame's output; that keeps the order without leaving any latency window.
//!
//! Each stochastic source draws from its own ChaCha8 stream of the seed, so
//! injecting a fault never perturbs the fault-free draws.

mod fault;
mod params;

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::clock::{Alphabet, TickSet, Trace};

pub use fault::{FaultError, FaultSpec, FaultTarget};
pub use params::{AVParams, Interval, ParamError};

/// Emitted clocks, in column order.
pub const AV_CLOCKS: [&str; 40] = [
    "ms",
    "cmrTrig",
    "cmrOut",
    "signTrig",
    "imIn",
    "signOut",
    "obsDetect",
    "spUpdate",
    "ctrlIn",
    "ctrlOut",
    "signIn",
    "speed",
    "signType",
    "direct",
    "gear",
    "torque",
    "reqTorq",
    "reqDirec",
    "reqGear",
    "reqBrake",
    "vdIn",
    "vdOut",
    "spOut",
    "tqOut",
    "obstc",
    "veRun",
    "veAcc",
    "veBrake",
    "tLeft",
    "tRight",
    "turnLeft",
    "rightOn",
    "emgcy",
    "startTurnLeft",
    "startTurnRight",
    "startBrake",
    "Stop",
    "DetectLeftSign",
    "DetectRightSign",
    "DetectStopSign",
];

pub fn av_alphabet() -> Alphabet {
    Alphabet::from_names(AV_CLOCKS).expect("clock names are valid and distinct")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Clk {
    Ms,
    CmrTrig,
    CmrOut,
    SignTrig,
    ImIn,
    SignOut,
    ObsDetect,
    SpUpdate,
    CtrlIn,
    CtrlOut,
    SignIn,
    Speed,
    SignType,
    Direct,
    Gear,
    Torque,
    ReqTorq,
    ReqDirec,
    ReqGear,
    ReqBrake,
    VdIn,
    VdOut,
    SpOut,
    TqOut,
    Obstc,
    VeRun,
    VeAcc,
    VeBrake,
    TLeft,
    TRight,
    TurnLeft,
    RightOn,
    Emgcy,
    StartTurnLeft,
    StartTurnRight,
    StartBrake,
    Stop,
    DetectLeftSign,
    DetectRightSign,
    DetectStopSign,
}

const CLOCK_COUNT: usize = AV_CLOCKS.len();

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sign {
    Left,
    Right,
    Stop,
    Accelerate,
    Decelerate,
    None,
}

const SIGNS: [Sign; 6] = [
    Sign::Left,
    Sign::Right,
    Sign::Stop,
    Sign::Accelerate,
    Sign::Decelerate,
    Sign::None,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Normal,
    Emergency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Substate {
    TurnLeft,
    TurnRight,
    Stop,
    Dec,
    Acc,
}

#[derive(Debug, Clone, Copy)]
enum Ev {
    Tick(Clk),
    CameraFrame,
    SignTrigger,
    ObstacleCycle,
    SpeedUpdate,
    Obstacle,
    SignRecognized(Sign),
    Decision(Sign),
    StartBrake,
    ExitEmergency(u64),
}

#[derive(Debug)]
struct Scheduled {
    step: u64,
    seq: u64,
    ev: Ev,
}

impl PartialEq for Scheduled {
    fn eq(&self, other: &Self) -> bool {
        (self.step, self.seq) == (other.step, other.seq)
    }
}

impl Eq for Scheduled {}

impl PartialOrd for Scheduled {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Scheduled {
    fn cmp(&self, other: &Self) -> Ordering {
        (other.step, other.seq).cmp(&(self.step, self.seq))
    }
}

/// Controller mode change waiting for its one-per-step output slot.
#[derive(Debug, Clone, Copy)]
struct ModeEvent {
    clock: Clk,
    /// Emergency episode a recovery event belongs to.
    recovery_of: Option<u64>,
}

#[derive(Debug, Clone, Copy)]
#[repr(u64)]
enum Stream {
    Camera = 1,
    SignRec,
    Controller,
    Requests,
    VehicleDyn,
    Inputs,
    SignDraw,
    Detect,
    Decision,
    Action,
    Speed,
    Obstacle,
    Emergency,
    Fault,
}

struct Rngs {
    camera: ChaCha8Rng,
    sign_rec: ChaCha8Rng,
    controller: ChaCha8Rng,
    requests: ChaCha8Rng,
    vehicle_dyn: ChaCha8Rng,
    inputs: ChaCha8Rng,
    sign_draw: ChaCha8Rng,
    detect: ChaCha8Rng,
    decision: ChaCha8Rng,
    action: ChaCha8Rng,
    speed: ChaCha8Rng,
    obstacle: ChaCha8Rng,
    emergency: ChaCha8Rng,
    fault: ChaCha8Rng,
}

impl Rngs {
    fn new(seed: u64) -> Self {
        let stream = |s: Stream| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s as u64);
            rng
        };
        Rngs {
            camera: stream(Stream::Camera),
            sign_rec: stream(Stream::SignRec),
            controller: stream(Stream::Controller),
            requests: stream(Stream::Requests),
            vehicle_dyn: stream(Stream::VehicleDyn),
            inputs: stream(Stream::Inputs),
            sign_draw: stream(Stream::SignDraw),
            detect: stream(Stream::Detect),
            decision: stream(Stream::Decision),
            action: stream(Stream::Action),
            speed: stream(Stream::Speed),
            obstacle: stream(Stream::Obstacle),
            emergency: stream(Stream::Emergency),
            fault: stream(Stream::Fault),
        }
    }
}

fn draw(rng: &mut ChaCha8Rng, i: Interval) -> u64 {
    rng.random_range(i.lo..=i.hi)
}

/// Intersection of `stage` with `[lo, hi]`; the stage lower bound if empty.
fn draw_within(rng: &mut ChaCha8Rng, stage: Interval, lo: i64, hi: i64) -> u64 {
    let lo = lo.max(stage.lo as i64);
    let hi = hi.min(stage.hi as i64);
    if lo > hi {
        stage.lo
    } else {
        rng.random_range(lo..=hi) as u64
    }
}

const FAULT_JITTER: Interval = Interval::new(1, 10);
const FAULT_OVERRUN: Interval = Interval::new(1, 20);
const FAULT_EARLY_EXIT: Interval = Interval::new(100, 499);

/// Streaming simulator; yields the ticks of each step.
pub struct Simulator {
    params: AVParams,
    fault: Option<FaultSpec>,
    rngs: Rngs,
    sign_weights: WeightedIndex<f64>,
    agenda: BinaryHeap<Scheduled>,
    seq: u64,
    step: u64,
    last_tick: [Option<u64>; CLOCK_COUNT],
    bus: VecDeque<ModeEvent>,
    mode: Mode,
    substate: Substate,
    episode: u64,
    target_speed: u64,
    jitter: u64,
}

impl Simulator {
    pub fn new(params: AVParams, fault: Option<FaultSpec>) -> Result<Self, ParamError> {
        params.validate()?;
        if let Some(f) = fault {
            if !(0.0..=1.0).contains(&f.rate) {
                return Err(ParamError::Probability("fault rate"));
            }
        }
        let sign_weights = WeightedIndex::new(params.sign_type_prob)
            .map_err(|_| ParamError::Probability("sign_type_prob"))?;
        let mut sim = Simulator {
            rngs: Rngs::new(params.seed),
            sign_weights,
            agenda: BinaryHeap::new(),
            seq: 0,
            step: 0,
            last_tick: [None; CLOCK_COUNT],
            bus: VecDeque::new(),
            mode: Mode::Normal,
            substate: Substate::Acc,
            episode: 0,
            target_speed: (params.speed_range.lo + params.speed_range.hi) / 2,
            jitter: params.speed_jitter.lo,
            params,
            fault,
        };
        for ev in [
            Ev::CameraFrame,
            Ev::SignTrigger,
            Ev::ObstacleCycle,
            Ev::SpeedUpdate,
        ] {
            sim.schedule(0, ev);
        }
        Ok(sim)
    }

    pub fn alphabet(&self) -> Alphabet {
        av_alphabet()
    }

    pub fn params(&self) -> &AVParams {
        &self.params
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    fn schedule(&mut self, step: u64, ev: Ev) {
        debug_assert!(step >= self.step, "event scheduled in the past");
        self.agenda.push(Scheduled {
            step,
            seq: self.seq,
            ev,
        });
        self.seq += 1;
    }

    fn tick_at(&mut self, step: u64, clk: Clk) {
        self.schedule(step, Ev::Tick(clk));
    }

    /// Reserves the next in-order slot of `clk` at or after `step`.
    fn fifo(&mut self, clk: Clk, step: u64) -> u64 {
        let slot = match self.last_tick[clk as usize] {
            Some(last) => step.max(last + 1),
            None => step,
        };
        self.last_tick[clk as usize] = Some(slot);
        slot
    }

    fn fault_hits(&mut self, target: FaultTarget) -> bool {
        match self.fault {
            Some(f) if f.target == target => self.rngs.fault.random_bool(f.rate),
            _ => false,
        }
    }

    fn periodic_start(&mut self, nominal: u64, req: u8) -> u64 {
        if self.fault_hits(FaultTarget::Periodic(req)) {
            nominal + draw(&mut self.rngs.fault, FAULT_JITTER)
        } else {
            nominal
        }
    }

    fn overrun(&mut self, req: u8, stage: Interval) -> Option<u64> {
        self.fault_hits(FaultTarget::Exec(req))
            .then(|| stage.hi + draw(&mut self.rngs.fault, FAULT_OVERRUN))
    }

    fn camera_frame(&mut self, now: u64) {
        let p = self.params.clone();
        self.schedule(now + p.camera_period, Ev::CameraFrame);

        let trig = self.periodic_start(now, 1);
        self.tick_at(trig, Clk::CmrTrig);

        let cam = self
            .overrun(6, p.exec_camera)
            .unwrap_or_else(|| draw(&mut self.rngs.camera, p.exec_camera));
        let cam_out = self.fifo(Clk::CmrOut, trig + cam);
        self.tick_at(cam_out, Clk::CmrOut);
        self.tick_at(cam_out, Clk::ImIn);

        let elapsed = (cam_out - trig) as i64;
        let rec = self.overrun(5, p.exec_sign_rec).unwrap_or_else(|| {
            draw_within(
                &mut self.rngs.sign_rec,
                p.exec_sign_rec,
                p.e2e_cmr_sr.lo as i64 + 1 - elapsed,
                p.e2e_cmr_sr.hi as i64 - 1 - elapsed,
            )
        });
        let sign = self.fifo(Clk::SignOut, cam_out + rec);
        for clk in [Clk::SignOut, Clk::SignIn, Clk::SignType, Clk::CtrlIn] {
            self.tick_at(sign, clk);
        }
        for clk in [Clk::Speed, Clk::Direct, Clk::Gear, Clk::Torque] {
            let lead = self.rngs.inputs.random_range(0..p.input_sync);
            let at = self.fifo(clk, sign.saturating_sub(lead).max(now));
            self.tick_at(at, clk);
        }

        let ctrl = self
            .overrun(7, p.exec_controller)
            .unwrap_or_else(|| draw(&mut self.rngs.controller, p.exec_controller));
        let ctrl_out = self.fifo(Clk::CtrlOut, sign + ctrl);
        self.tick_at(ctrl_out, Clk::CtrlOut);
        let mut vd_in = ctrl_out;
        for clk in [Clk::ReqTorq, Clk::ReqDirec, Clk::ReqGear, Clk::ReqBrake] {
            let lag = self.rngs.requests.random_range(0..p.output_sync);
            let at = self.fifo(clk, ctrl_out + lag);
            self.tick_at(at, clk);
            vd_in = vd_in.max(at);
        }
        let vd_in = self.fifo(Clk::VdIn, vd_in);
        self.tick_at(vd_in, Clk::VdIn);

        let since_sign = (vd_in - sign) as i64;
        let since_trig = (vd_in - trig) as i64;
        let vd = self.overrun(8, p.exec_vehicle_dyn).unwrap_or_else(|| {
            draw_within(
                &mut self.rngs.vehicle_dyn,
                p.exec_vehicle_dyn,
                (p.e2e_ctrl_vd.lo as i64 + 1 - since_sign)
                    .max(p.e2e_cmr_vd.lo as i64 + 1 - since_trig),
                (p.e2e_ctrl_vd.hi as i64 - 1 - since_sign)
                    .min(p.e2e_cmr_vd.hi as i64 - 1 - since_trig),
            )
        });
        let vd_out = self.fifo(Clk::VdOut, vd_in + vd);
        for clk in [Clk::VdOut, Clk::SpOut, Clk::TqOut] {
            self.tick_at(vd_out, clk);
        }
    }

    fn sign_trigger(&mut self, now: u64) {
        self.schedule(now + self.params.sign_rec_period, Ev::SignTrigger);
        let trig = self.periodic_start(now, 2);
        self.tick_at(trig, Clk::SignTrig);
        let sign = SIGNS[self.sign_weights.sample(&mut self.rngs.sign_draw)];
        let detect = trig + draw(&mut self.rngs.detect, self.params.sign_detect);
        self.schedule(detect, Ev::SignRecognized(sign));
    }

    fn sign_recognized(&mut self, now: u64, sign: Sign, ticks: &mut TickSet) {
        let p = &self.params;
        let (turn, brake) = (p.turn_reaction, p.brake_reaction);
        match sign {
            Sign::Left | Sign::Right => {
                let (detect, start) = if sign == Sign::Left {
                    (Clk::DetectLeftSign, Clk::StartTurnLeft)
                } else {
                    (Clk::DetectRightSign, Clk::StartTurnRight)
                };
                ticks.insert(detect as usize);
                let at = now + draw(&mut self.rngs.action, turn);
                let at = self.fifo(start, at);
                self.tick_at(at, start);
            }
            Sign::Stop => {
                ticks.insert(Clk::DetectStopSign as usize);
                let at = now + draw(&mut self.rngs.action, brake);
                let at = self.fifo(Clk::StartBrake, at);
                self.schedule(at, Ev::StartBrake);
            }
            Sign::Accelerate | Sign::Decelerate | Sign::None => {}
        }
        let at = now + draw(&mut self.rngs.decision, self.params.decision);
        self.schedule(at, Ev::Decision(sign));
    }

    fn decision(&mut self, sign: Sign) {
        let range = self.params.speed_range;
        let (substate, event) = match sign {
            Sign::Left => (Substate::TurnLeft, Some(Clk::TurnLeft)),
            Sign::Right => (Substate::TurnRight, Some(Clk::RightOn)),
            Sign::Stop => (Substate::Stop, Some(Clk::VeBrake)),
            Sign::Accelerate => {
                self.target_speed = (self.target_speed + 2).min(range.hi);
                (Substate::Acc, None)
            }
            Sign::Decelerate => {
                self.target_speed = self.target_speed.saturating_sub(2).max(range.lo);
                (Substate::Dec, None)
            }
            Sign::None => return,
        };
        self.substate = substate;
        if let (Mode::Normal, Some(clock)) = (self.mode, event) {
            self.bus.push_back(ModeEvent {
                clock,
                recovery_of: None,
            });
        }
    }

    fn start_brake(&mut self, now: u64, ticks: &mut TickSet) {
        ticks.insert(Clk::StartBrake as usize);
        let speed = self.target_speed + self.jitter;
        let stop_ms = (speed * 1000).div_ceil(self.params.brake_decel);
        let at = self.fifo(Clk::Stop, now + stop_ms);
        self.tick_at(at, Clk::Stop);
    }

    fn obstacle_cycle(&mut self, now: u64) {
        self.schedule(now + self.params.obstacle_period, Ev::ObstacleCycle);
        let at = self.periodic_start(now, 3);
        self.tick_at(at, Clk::ObsDetect);
        if self.rngs.obstacle.random_bool(self.params.obstacle_prob) {
            self.schedule(at, Ev::Obstacle);
        }
    }

    fn obstacle(&mut self, now: u64, ticks: &mut TickSet) {
        ticks.insert(Clk::Obstc as usize);
        if self.mode == Mode::Normal {
            self.mode = Mode::Emergency;
            self.bus.push_back(ModeEvent {
                clock: Clk::Emgcy,
                recovery_of: None,
            });
        }
        self.episode += 1;
        let exit = if self.fault_hits(FaultTarget::Sporadic) {
            now + draw(&mut self.rngs.fault, FAULT_EARLY_EXIT)
        } else {
            now + self.params.sporadic_dwell
                + draw(&mut self.rngs.emergency, self.params.emergency_exit)
        };
        self.schedule(exit, Ev::ExitEmergency(self.episode));
    }

    fn exit_emergency(&mut self, episode: u64) {
        if episode != self.episode || self.mode != Mode::Emergency {
            return;
        }
        self.mode = Mode::Normal;
        let resume = match self.substate {
            Substate::TurnLeft => Some(Clk::TLeft),
            Substate::TurnRight => Some(Clk::TRight),
            Substate::Acc => Some(Clk::VeAcc),
            Substate::Stop | Substate::Dec => None,
        };
        for clock in std::iter::once(Clk::VeRun).chain(resume) {
            self.bus.push_back(ModeEvent {
                clock,
                recovery_of: Some(episode),
            });
        }
    }

    fn speed_update(&mut self, now: u64) {
        self.schedule(now + self.params.speed_period, Ev::SpeedUpdate);
        let at = self.periodic_start(now, 4);
        self.tick_at(at, Clk::SpUpdate);
        self.jitter = draw(&mut self.rngs.speed, self.params.speed_jitter);
    }

    fn drain_bus(&mut self, ticks: &mut TickSet) {
        while let Some(ev) = self.bus.pop_front() {
            if ev.recovery_of.is_some_and(|ep| ep != self.episode) {
                continue;
            }
            ticks.insert(ev.clock as usize);
            if ev.clock == Clk::TurnLeft && self.fault_hits(FaultTarget::Exclusion) {
                ticks.insert(Clk::RightOn as usize);
            }
            break;
        }
    }

    /// Advances one step and returns its ticks.
    fn advance(&mut self) -> TickSet {
        let now = self.step;
        let mut ticks = TickSet::with_capacity(CLOCK_COUNT);
        ticks.insert(Clk::Ms as usize);
        while self.agenda.peek().is_some_and(|s| s.step == now) {
            let Scheduled { ev, .. } = self.agenda.pop().expect("peeked");
            match ev {
                Ev::Tick(clk) => ticks.insert(clk as usize),
                Ev::CameraFrame => self.camera_frame(now),
                Ev::SignTrigger => self.sign_trigger(now),
                Ev::ObstacleCycle => self.obstacle_cycle(now),
                Ev::SpeedUpdate => self.speed_update(now),
                Ev::Obstacle => self.obstacle(now, &mut ticks),
                Ev::SignRecognized(sign) => self.sign_recognized(now, sign, &mut ticks),
                Ev::Decision(sign) => self.decision(sign),
                Ev::StartBrake => self.start_brake(now, &mut ticks),
                Ev::ExitEmergency(ep) => self.exit_emergency(ep),
            }
        }
        self.drain_bus(&mut ticks);
        self.step += 1;
        ticks
    }
}

impl Iterator for Simulator {
    type Item = TickSet;

    fn next(&mut self) -> Option<TickSet> {
        (self.step < self.params.steps).then(|| self.advance())
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.params.steps - self.step) as usize;
        (left, Some(left))
    }
}

pub fn simulate(params: AVParams) -> Result<Trace, ParamError> {
    collect(Simulator::new(params, None)?)
}

pub fn simulate_faulty(params: AVParams, fault: FaultSpec) -> Result<Trace, ParamError> {
    collect(Simulator::new(params, Some(fault))?)
}

fn collect(sim: Simulator) -> Result<Trace, ParamError> {
    let mut trace = Trace::with_alphabet(sim.alphabet());
    for ticks in sim {
        trace
            .push_step(&ticks)
            .expect("simulator emits only alphabet clocks");
    }
    Ok(trace)
}
