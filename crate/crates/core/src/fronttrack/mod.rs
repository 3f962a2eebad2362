//! Event-driven front tracking on the strip `t ≥ 0, x ∈ [a, b]`.
//!
//! Fronts are kept in a doubly linked list ordered by position. Each front
//! schedules at most one collision (with its right neighbour) and one
//! boundary crossing in an ordered event queue; entries are invalidated and
//! recomputed only for the fronts touched by an event.
//!
//! Ties within [`TIME_TIE`] are broken by position, then by kind (fronts
//! before control switches), then by id, which makes runs bit-reproducible.

mod control;
mod trajectory;

use std::collections::BTreeSet;

use ordered_float::OrderedFloat;

pub use control::{BoundaryMode, ControlPair, ControlSchedule, Side};
pub use trajectory::{trace_at, EventKind, EventRecord, Front, FrontRecord, Trajectory};

use crate::error::{Error, Result};
use crate::models::{Model, ShockRule};
use crate::profile::Profile;
use crate::riemann::{
    front_speed, solve_boundary_riemann_left, solve_boundary_riemann_right, solve_riemann, WaveFan,
    WaveKind, STRENGTH_FLOOR,
};
use crate::state::{State, Vector};

/// Events closer than this in time are simultaneous.
pub const TIME_TIE: f64 = 1e-12;
/// Fronts closer than this at a collision take part in it.
pub const POSITION_TIE: f64 = 1e-12;
pub const DEFAULT_FRONT_CAP: usize = 1_000_000;

/// Direction in which the engine evolves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Forward,
    /// Reversed time for Temple systems: speeds are negated, fronts keep
    /// their forward kind and amplitude, and same-family rarefaction
    /// collisions are rejected.
    Backward,
}

#[derive(Clone, Debug)]
pub struct EngineOptions {
    pub nu: f64,
    pub front_cap: usize,
    pub direction: Direction,
    /// Record `∫u dx` after every event (conservative models only).
    pub track_integral: bool,
    /// Abort after this many events.
    pub max_events: usize,
}

impl EngineOptions {
    pub fn new(nu: f64) -> Self {
        EngineOptions { nu, front_cap: DEFAULT_FRONT_CAP, direction: Direction::Forward, track_integral: false, max_events: usize::MAX }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Tag {
    Pair,
    HitLeft,
    HitRight,
    Control(Side),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct QueueKey {
    time: OrderedFloat<f64>,
    pos: OrderedFloat<f64>,
    prio: u8,
    id: u64,
    tag: Tag,
}

#[derive(Clone, Debug)]
struct Slot {
    record: FrontRecord,
    prev: Option<u64>,
    next: Option<u64>,
    pair_key: Option<QueueKey>,
    hit_key: Option<QueueKey>,
}

/// A deterministic front tracking engine.
pub struct Engine {
    model: Model,
    a: f64,
    b: f64,
    opts: EngineOptions,
    now: f64,
    slots: Vec<Slot>,
    head: Option<u64>,
    tail: Option<u64>,
    live: usize,
    queue: BTreeSet<QueueKey>,
    controls: ControlPair,
    control_next: [usize; 2],
    mode: [BoundaryMode; 2],
    trace: [State; 2],
    events: Vec<EventRecord>,
    trace_left: Vec<(f64, State)>,
    trace_right: Vec<(f64, State)>,
    integrals: Vec<(f64, Vector)>,
    t_start: f64,
}

fn side_index(side: Side) -> usize {
    match side {
        Side::Left => 0,
        Side::Right => 1,
    }
}

impl Engine {
    /// Forward engine on `[a, b]` from the profile `initial` at `t = 0`:
    /// one Riemann fan per interior breakpoint; boundary controls act from
    /// their first switch on.
    pub fn new(model: Model, initial: &Profile, controls: ControlPair, opts: EngineOptions) -> Result<Self> {
        Self::new_at(model, initial, controls, opts, 0.0)
    }

    /// Forward engine started at time `t_start`.
    pub fn new_at(model: Model, initial: &Profile, controls: ControlPair, opts: EngineOptions, t_start: f64) -> Result<Self> {
        if opts.direction != Direction::Forward {
            return Err(Error::Invalid("use Engine::backward for reversed time".into()));
        }
        let mut engine = Self::empty(model, initial, controls, opts, t_start)?;
        let breaks = initial.breaks().to_vec();
        let states = initial.states().to_vec();
        let mut fans: Vec<(f64, WaveFan)> = Vec::new();
        for k in 1..states.len() {
            let fan = solve_riemann(engine.model.as_ref(), &states[k - 1], &states[k], engine.opts.nu)?;
            fans.push((breaks[k], fan));
        }
        for (x, fan) in fans {
            for wave in fan.waves {
                engine.push_back(wave.family, wave.kind, x, wave.speed, wave.left, wave.right, 0);
            }
        }
        engine.finish_init()?;
        Ok(engine)
    }

    /// Reversed-time engine for Temple systems. Every jump of `target`
    /// becomes one front per changed family, without splitting; the clock
    /// runs from `0` (the target time) forward in reversed time, and both
    /// boundaries absorb.
    pub fn backward(model: Model, target: &Profile, nu: f64) -> Result<Self> {
        if model.shock_rule() != ShockRule::Straight {
            return Err(Error::Invalid("backward tracking requires a Temple-class model".into()));
        }
        let mut opts = EngineOptions::new(nu);
        opts.direction = Direction::Backward;
        let mut engine = Self::empty(model, target, ControlPair::absorbing(), opts, 0.0)?;
        let breaks = target.breaks().to_vec();
        let states = target.states().to_vec();
        for k in 1..states.len() {
            let x = breaks[k];
            let fronts = engine.reversed_chain(&states[k - 1], &states[k])?;
            for (family, kind, speed, l, r) in fronts {
                engine.push_back(family, kind, x, speed, l, r, 0);
            }
        }
        engine.finish_init()?;
        Ok(engine)
    }

    fn empty(model: Model, initial: &Profile, controls: ControlPair, opts: EngineOptions, t_start: f64) -> Result<Self> {
        if !(opts.nu > 0.0) {
            return Err(Error::Invalid("ν must be positive".into()));
        }
        controls.alpha.validate()?;
        controls.beta.validate()?;
        for s in initial.states() {
            model.check_box(&s.w)?;
        }
        let first = initial.states()[0];
        let last = *initial.states().last().unwrap();
        let mut control_next = [0, 0];
        for side in [Side::Left, Side::Right] {
            let sched = controls.side(side);
            control_next[side_index(side)] = sched.switches.partition_point(|(t, _)| *t < t_start);
        }
        let mode = [controls.alpha.mode_at(t_start - f64::EPSILON), controls.beta.mode_at(t_start - f64::EPSILON)];
        let mode = if t_start > 0.0 { mode } else { [BoundaryMode::Absorbing, BoundaryMode::Absorbing] };
        Ok(Engine {
            model,
            a: initial.a(),
            b: initial.b(),
            opts,
            now: t_start,
            slots: Vec::new(),
            head: None,
            tail: None,
            live: 0,
            queue: BTreeSet::new(),
            controls,
            control_next,
            mode,
            trace: [first, last],
            events: Vec::new(),
            trace_left: vec![(t_start, first)],
            trace_right: vec![(t_start, last)],
            integrals: Vec::new(),
            t_start,
        })
    }

    fn finish_init(&mut self) -> Result<()> {
        self.check_cap()?;
        let ids: Vec<u64> = self.iter_ids().collect();
        for &id in &ids {
            self.schedule_pair(id);
            self.schedule_hit(id);
        }
        for side in [Side::Left, Side::Right] {
            self.schedule_control(side);
        }
        if self.opts.track_integral {
            self.integrals.push((self.now, self.integral()));
        }
        Ok(())
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn time(&self) -> f64 {
        self.now
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn nu(&self) -> f64 {
        self.opts.nu
    }

    pub fn live_fronts(&self) -> usize {
        self.live
    }

    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    pub fn events(&self) -> &[EventRecord] {
        &self.events
    }

    pub fn trace(&self, side: Side) -> State {
        self.trace[side_index(side)]
    }

    pub fn mode(&self, side: Side) -> BoundaryMode {
        self.mode[side_index(side)]
    }

    /// Live fronts in left-to-right order.
    pub fn fronts(&self) -> Vec<Front> {
        self.iter_ids().map(|id| self.slots[id as usize].record.front).collect()
    }

    pub fn front_record(&self, id: u64) -> &FrontRecord {
        &self.slots[id as usize].record
    }

    fn iter_ids(&self) -> impl Iterator<Item = u64> + '_ {
        let mut cur = self.head;
        std::iter::from_fn(move || {
            let id = cur?;
            cur = self.slots[id as usize].next;
            Some(id)
        })
    }

    /// Current profile.
    pub fn profile(&self) -> Result<Profile> {
        let fronts = self.fronts();
        if fronts.is_empty() {
            return Profile::constant(self.a, self.b, self.trace[0]);
        }
        let mut breaks = vec![self.a];
        let mut states = vec![fronts[0].left];
        for f in &fronts {
            breaks.push(f.position(self.now).clamp(self.a, self.b));
            states.push(f.right);
        }
        breaks.push(self.b);
        // Rounding can leave neighbours a few ulps out of order.
        for k in 1..breaks.len() {
            if breaks[k] < breaks[k - 1] {
                breaks[k] = breaks[k - 1];
            }
        }
        Profile::from_pieces(&breaks, &states)
    }

    fn integral(&self) -> Vector {
        let mut acc = 0.0 * self.trace[0].u;
        let mut x_prev = self.a;
        let mut state = self.trace[0];
        for id in self.iter_ids() {
            let f = &self.slots[id as usize].record.front;
            let x = f.position(self.now).clamp(self.a, self.b);
            acc = acc + (x - x_prev) * f.left.u;
            x_prev = x;
            state = f.right;
        }
        acc + (self.b - x_prev) * state.u
    }

    fn check_cap(&self) -> Result<()> {
        if self.live > self.opts.front_cap {
            Err(Error::FrontCap(self.opts.front_cap))
        } else {
            Ok(())
        }
    }

    // ---- linked list -------------------------------------------------

    fn new_slot(&mut self, family: usize, kind: WaveKind, x: f64, speed: f64, left: State, right: State, birth: u64) -> u64 {
        let id = self.slots.len() as u64;
        let front = Front { id, family, kind, x0: x, t0: self.now, speed, left, right, birth };
        self.slots.push(Slot {
            record: FrontRecord { front, t_end: None, death: None },
            prev: None,
            next: None,
            pair_key: None,
            hit_key: None,
        });
        self.live += 1;
        id
    }

    #[allow(clippy::too_many_arguments)]
    fn push_back(&mut self, family: usize, kind: WaveKind, x: f64, speed: f64, left: State, right: State, birth: u64) -> u64 {
        let id = self.new_slot(family, kind, x, speed, left, right, birth);
        self.slots[id as usize].prev = self.tail;
        match self.tail {
            Some(t) => self.slots[t as usize].next = Some(id),
            None => self.head = Some(id),
        }
        self.tail = Some(id);
        id
    }

    /// Inserts fronts (in order) between `prev` and `next`.
    fn splice(&mut self, prev: Option<u64>, next: Option<u64>, ids: &[u64]) {
        let mut last = prev;
        for &id in ids {
            self.slots[id as usize].prev = last;
            match last {
                Some(p) => self.slots[p as usize].next = Some(id),
                None => self.head = Some(id),
            }
            last = Some(id);
        }
        match last {
            Some(l) => self.slots[l as usize].next = next,
            None => self.head = next,
        }
        match next {
            Some(n) => self.slots[n as usize].prev = last,
            None => self.tail = last,
        }
    }

    fn kill(&mut self, id: u64, event: u64) {
        self.unschedule(id);
        let slot = &mut self.slots[id as usize];
        slot.record.t_end = Some(self.now);
        slot.record.death = Some(event);
        slot.prev = None;
        slot.next = None;
        self.live -= 1;
    }

    // ---- scheduling --------------------------------------------------

    fn unschedule(&mut self, id: u64) {
        let slot = &mut self.slots[id as usize];
        if let Some(k) = slot.pair_key.take() {
            self.queue.remove(&k);
        }
        if let Some(k) = slot.hit_key.take() {
            self.queue.remove(&k);
        }
    }

    fn schedule_pair(&mut self, id: u64) {
        if let Some(k) = self.slots[id as usize].pair_key.take() {
            self.queue.remove(&k);
        }
        let Some(next) = self.slots[id as usize].next else { return };
        let l = self.slots[id as usize].record.front;
        let r = self.slots[next as usize].record.front;
        if !(l.speed > r.speed) {
            return;
        }
        let xl = l.position(self.now);
        let xr = r.position(self.now);
        let dt = ((xr - xl).max(0.0)) / (l.speed - r.speed);
        let time = self.now + dt;
        if !time.is_finite() {
            return;
        }
        let key = QueueKey {
            time: OrderedFloat(time),
            pos: OrderedFloat(l.position(time)),
            prio: 0,
            id,
            tag: Tag::Pair,
        };
        self.queue.insert(key);
        self.slots[id as usize].pair_key = Some(key);
    }

    fn schedule_hit(&mut self, id: u64) {
        if let Some(k) = self.slots[id as usize].hit_key.take() {
            self.queue.remove(&k);
        }
        let slot = &self.slots[id as usize];
        let f = slot.record.front;
        let (boundary, tag) = if slot.prev.is_none() && f.speed < 0.0 {
            (self.a, Tag::HitLeft)
        } else if slot.next.is_none() && f.speed > 0.0 {
            (self.b, Tag::HitRight)
        } else {
            return;
        };
        let time = (f.t0 + (boundary - f.x0) / f.speed).max(self.now);
        let key = QueueKey { time: OrderedFloat(time), pos: OrderedFloat(boundary), prio: 0, id, tag };
        self.queue.insert(key);
        self.slots[id as usize].hit_key = Some(key);
    }

    fn schedule_control(&mut self, side: Side) {
        let k = self.control_next[side_index(side)];
        if let Some((t, _)) = self.controls.side(side).switches.get(k) {
            let pos = match side {
                Side::Left => self.a,
                Side::Right => self.b,
            };
            self.queue.insert(QueueKey {
                time: OrderedFloat(t.max(self.now)),
                pos: OrderedFloat(pos),
                prio: 1,
                id: u64::MAX - side_index(side) as u64,
                tag: Tag::Control(side),
            });
        }
    }

    /// Re-derives queue entries for a front and its left neighbour.
    fn refresh_around(&mut self, id: Option<u64>) {
        let Some(id) = id else { return };
        self.schedule_pair(id);
        self.schedule_hit(id);
        if let Some(p) = self.slots[id as usize].prev {
            self.schedule_pair(p);
            self.schedule_hit(p);
        }
    }

    /// Earliest event with the tie rule applied.
    fn peek_event(&self) -> Option<QueueKey> {
        let first = *self.queue.iter().next()?;
        let limit = first.time.0 + TIME_TIE;
        self.queue
            .iter()
            .take_while(|k| k.time.0 <= limit)
            .min_by(|p, q| (p.pos, p.prio, p.id, p.tag).cmp(&(q.pos, q.prio, q.id, q.tag)))
            .copied()
    }

    // ---- main loop ---------------------------------------------------

    /// Time of the next pending event, if any.
    pub fn next_event_time(&self) -> Option<f64> {
        self.peek_event().map(|k| k.time.0)
    }

    /// Processes every event up to and including time `t_end`, then sets the
    /// clock to `t_end`.
    pub fn run_until(&mut self, t_end: f64) -> Result<()> {
        while let Some(key) = self.peek_event() {
            if key.time.0 > t_end {
                break;
            }
            self.resolve(key)?;
        }
        self.now = self.now.max(t_end);
        Ok(())
    }

    /// Processes at most `count` further events; returns how many ran.
    pub fn run_events(&mut self, count: usize) -> Result<usize> {
        for done in 0..count {
            match self.peek_event() {
                Some(key) => self.resolve(key)?,
                None => return Ok(done),
            }
        }
        Ok(count)
    }

    /// Samples the profile at each (sorted) time while advancing.
    pub fn run_sampled(&mut self, times: &[f64]) -> Result<Vec<Profile>> {
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            self.run_until(t)?;
            out.push(self.profile()?);
        }
        Ok(out)
    }

    fn resolve(&mut self, key: QueueKey) -> Result<()> {
        if self.events.len() >= self.opts.max_events {
            return Err(Error::NoConvergence(format!("event budget of {} exhausted", self.opts.max_events)));
        }
        self.queue.remove(&key);
        self.now = self.now.max(key.time.0);
        match key.tag {
            Tag::Pair => {
                self.slots[key.id as usize].pair_key = None;
                self.resolve_collision(key)?
            }
            Tag::HitLeft => {
                self.slots[key.id as usize].hit_key = None;
                self.resolve_hit(key.id, Side::Left)?
            }
            Tag::HitRight => {
                self.slots[key.id as usize].hit_key = None;
                self.resolve_hit(key.id, Side::Right)?
            }
            Tag::Control(side) => {
                let idx = side_index(side);
                let (_, mode) = self.controls.side(side).switches[self.control_next[idx]];
                self.control_next[idx] += 1;
                self.schedule_control(side);
                self.apply_control(side, mode)?;
            }
        }
        if self.opts.track_integral {
            self.integrals.push((self.now, self.integral()));
        }
        Ok(())
    }

    fn next_event_id(&self) -> u64 {
        self.events.len() as u64 + 1
    }

    fn resolve_collision(&mut self, key: QueueKey) -> Result<()> {
        let Some(right_id) = self.slots[key.id as usize].next else { return Ok(()) };
        let x = key.pos.0.clamp(self.a, self.b);
        let mut first = key.id;
        let mut last = right_id;
        while let Some(p) = self.slots[first as usize].prev {
            if (self.slots[p as usize].record.front.position(self.now) - x).abs() <= POSITION_TIE {
                first = p;
            } else {
                break;
            }
        }
        while let Some(n) = self.slots[last as usize].next {
            if (self.slots[n as usize].record.front.position(self.now) - x).abs() <= POSITION_TIE {
                last = n;
            } else {
                break;
            }
        }
        let mut group = vec![first];
        let mut cur = first;
        while cur != last {
            cur = self.slots[cur as usize].next.unwrap();
            group.push(cur);
        }
        let left_state = self.slots[first as usize].record.front.left;
        let right_state = self.slots[last as usize].record.front.right;
        let before = self.slots[first as usize].prev;
        let after = self.slots[last as usize].next;

        let outgoing: Vec<(usize, WaveKind, f64, State, State)> = match self.opts.direction {
            Direction::Forward => solve_riemann(self.model.as_ref(), &left_state, &right_state, self.opts.nu)?
                .waves
                .into_iter()
                .map(|w| (w.family, w.kind, w.speed, w.left, w.right))
                .collect(),
            Direction::Backward => {
                for family in 1..=self.model.dim() {
                    let rarefactions = group
                        .iter()
                        .filter(|&&id| {
                            let f = &self.slots[id as usize].record.front;
                            f.family == family && f.kind == WaveKind::Rarefaction
                        })
                        .count();
                    if rarefactions >= 2 {
                        return Err(Error::RarefactionCrossing { family, time: self.now });
                    }
                }
                self.reversed_chain(&left_state, &right_state)?
            }
        };

        let event = self.next_event_id();
        for &id in &group {
            self.kill(id, event);
        }
        let new_ids: Vec<u64> = outgoing
            .into_iter()
            .map(|(family, kind, speed, l, r)| self.new_slot(family, kind, x, speed, l, r, event))
            .collect();
        self.splice(before, after, &new_ids);
        self.check_cap()?;
        for &id in &new_ids {
            self.schedule_pair(id);
            self.schedule_hit(id);
        }
        if let Some(p) = before {
            self.schedule_pair(p);
            self.schedule_hit(p);
        }
        if let Some(n) = after {
            self.schedule_hit(n);
        }
        self.events.push(EventRecord {
            id: event,
            time: self.now,
            position: x,
            kind: EventKind::Collision,
            fronts_in: group,
            fronts_out: new_ids,
            left: left_state,
            right: right_state,
        });
        Ok(())
    }

    /// Fronts of a reversed-time jump `left → right`, one per changed family,
    /// ordered by decreasing family (increasing reversed speed).
    fn reversed_chain(&self, left: &State, right: &State) -> Result<Vec<(usize, WaveKind, f64, State, State)>> {
        let model = self.model.as_ref();
        let mut out = Vec::new();
        let mut cur = *left;
        for family in (1..=model.dim()).rev() {
            let i = family - 1;
            let delta = right.w[i] - cur.w[i];
            if delta.abs() <= STRENGTH_FLOOR && delta != 0.0 {
                cur = model.state_w(cur.w.with(i, right.w[i]));
                continue;
            }
            if delta == 0.0 {
                continue;
            }
            let next = model.state_w(cur.w.with(i, right.w[i]));
            let kind = if delta < 0.0 { WaveKind::Shock } else { WaveKind::Rarefaction };
            let speed = -front_speed(model, family, kind, &cur.w, &next.w)?;
            out.push((family, kind, speed, cur, next));
            cur = next;
        }
        if let Some(last) = out.last_mut() {
            last.4 = *right;
        }
        Ok(out)
    }

    fn resolve_hit(&mut self, id: u64, side: Side) -> Result<()> {
        let event = self.next_event_id();
        let front = self.slots[id as usize].record.front;
        let (before, after) = (self.slots[id as usize].prev, self.slots[id as usize].next);
        self.kill(id, event);
        self.splice(before, after, &[]);
        let new_trace = match side {
            Side::Left => front.right,
            Side::Right => front.left,
        };
        self.set_trace(side, new_trace);
        let neighbour = match side {
            Side::Left => after,
            Side::Right => before,
        };
        if let Some(n) = neighbour {
            self.schedule_hit(n);
        }
        let mode = self.mode[side_index(side)];
        let out = match mode {
            BoundaryMode::Absorbing => Vec::new(),
            BoundaryMode::Hold(value) => self.inject_fan(side, value, event)?,
        };
        let kind = match side {
            Side::Left => EventKind::BoundaryHitLeft,
            Side::Right => EventKind::BoundaryHitRight,
        };
        let control = match mode {
            BoundaryMode::Hold(v) => v,
            BoundaryMode::Absorbing => new_trace,
        };
        self.events.push(EventRecord {
            id: event,
            time: self.now,
            position: self.boundary(side),
            kind,
            fronts_in: vec![id],
            fronts_out: out,
            left: control,
            right: new_trace,
        });
        Ok(())
    }

    fn boundary(&self, side: Side) -> f64 {
        match side {
            Side::Left => self.a,
            Side::Right => self.b,
        }
    }

    fn set_trace(&mut self, side: Side, state: State) {
        self.trace[side_index(side)] = state;
        match side {
            Side::Left => self.trace_left.push((self.now, state)),
            Side::Right => self.trace_right.push((self.now, state)),
        }
    }

    /// Injects the entering part of the boundary fan for control `value`.
    fn inject_fan(&mut self, side: Side, value: State, event: u64) -> Result<Vec<u64>> {
        let trace = self.trace[side_index(side)];
        let model = self.model.clone();
        let fan = match side {
            Side::Left => solve_boundary_riemann_left(model.as_ref(), &value, &trace, self.opts.nu)?,
            Side::Right => solve_boundary_riemann_right(model.as_ref(), &value, &trace, self.opts.nu)?,
        };
        if fan.is_empty() {
            return Ok(Vec::new());
        }
        let x = self.boundary(side);
        let ids: Vec<u64> = fan
            .waves
            .iter()
            .map(|w| self.new_slot(w.family, w.kind, x, w.speed, w.left, w.right, event))
            .collect();
        match side {
            Side::Left => {
                let old_head = self.head;
                self.splice(None, old_head, &ids);
                self.set_trace(side, fan.waves[0].left);
                for &id in &ids {
                    self.schedule_pair(id);
                    self.schedule_hit(id);
                }
                if let Some(h) = old_head {
                    self.schedule_hit(h);
                }
            }
            Side::Right => {
                let old_tail = self.tail;
                self.splice(old_tail, None, &ids);
                self.set_trace(side, fan.waves.last().unwrap().right);
                self.refresh_around(old_tail);
                for &id in &ids {
                    self.schedule_pair(id);
                    self.schedule_hit(id);
                }
            }
        }
        self.check_cap()?;
        Ok(ids)
    }

    fn apply_control(&mut self, side: Side, mode: BoundaryMode) -> Result<()> {
        self.mode[side_index(side)] = mode;
        let event = self.next_event_id();
        let trace = self.trace[side_index(side)];
        let (out, control) = match mode {
            BoundaryMode::Absorbing => (Vec::new(), trace),
            BoundaryMode::Hold(value) => (self.inject_fan(side, value, event)?, value),
        };
        self.events.push(EventRecord {
            id: event,
            time: self.now,
            position: self.boundary(side),
            kind: EventKind::ControlChange(side),
            fronts_in: Vec::new(),
            fronts_out: out,
            left: control,
            right: trace,
        });
        Ok(())
    }

    /// One-shot injection at the current time: the boundary fan for control
    /// `value` enters, after which the side keeps its current mode.
    pub fn inject(&mut self, side: Side, value: State) -> Result<usize> {
        let event = self.next_event_id();
        let trace = self.trace[side_index(side)];
        let out = self.inject_fan(side, value, event)?;
        let n = out.len();
        self.events.push(EventRecord {
            id: event,
            time: self.now,
            position: self.boundary(side),
            kind: EventKind::ControlChange(side),
            fronts_in: Vec::new(),
            fronts_out: out,
            left: value,
            right: trace,
        });
        if self.opts.track_integral {
            self.integrals.push((self.now, self.integral()));
        }
        Ok(n)
    }

    /// Switches a side to a new mode at the current time.
    pub fn set_mode(&mut self, side: Side, mode: BoundaryMode) -> Result<()> {
        self.apply_control(side, mode)
    }

    /// Snapshot of everything recorded so far.
    pub fn trajectory(&self) -> Trajectory {
        Trajectory {
            a: self.a,
            b: self.b,
            t_start: self.t_start,
            t_final: self.now,
            events: self.events.clone(),
            fronts: self.slots.iter().map(|s| s.record).collect(),
            trace_left: self.trace_left.clone(),
            trace_right: self.trace_right.clone(),
            integrals: self.integrals.clone(),
        }
    }

    pub fn into_trajectory(self) -> Trajectory {
        Trajectory {
            a: self.a,
            b: self.b,
            t_start: self.t_start,
            t_final: self.now,
            events: self.events,
            fronts: self.slots.into_iter().map(|s| s.record).collect(),
            trace_left: self.trace_left,
            trace_right: self.trace_right,
            integrals: self.integrals,
        }
    }
}

/// Convenience wrapper: build a forward engine and run it to `t_end`.
pub fn simulate(model: Model, initial: &Profile, controls: ControlPair, opts: EngineOptions, t_end: f64) -> Result<Trajectory> {
    let mut engine = Engine::new(model, initial, controls, opts)?;
    engine.run_until(t_end)?;
    Ok(engine.into_trajectory())
}
