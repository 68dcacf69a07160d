//! Deterministic 2D bounce-to-target environment.
//!
//! A ball is launched toward a floor-mounted cup; dynamics depend on two
//! latent factors (Coulomb friction and coefficient of restitution) and an
//! optional linear drag term that represents unmodelled "real-world"
//! physics. Integration is fixed-step semi-implicit Euler at 240 Hz with
//! exact time-of-impact resolution inside each step, so rollouts are pure
//! functions of their arguments: identical inputs give bit-identical
//! trajectories.

mod task;

pub use task::{generate_tasks, load_tasks_csv, save_tasks_csv, write_trajectory_csv, TaskGenConfig, TaskSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Gravitational acceleration, m/s².
pub const GRAVITY: f64 = 9.81;
/// Ball radius, m.
pub const BALL_RADIUS: f64 = 0.1;
/// Fixed integrator step, s.
pub const DT: f64 = 1.0 / 240.0;
/// Default rollout horizon in steps (10 s).
pub const DEFAULT_HORIZON: u32 = 2400;
/// Speed below which a ball in floor contact counts toward rest detection, m/s.
pub const REST_SPEED: f64 = 0.05;
/// Consecutive slow in-contact steps before a ball is declared at rest.
pub const REST_STEPS: u32 = 10;
/// Action angle bounds, radians.
pub const ANGLE_RANGE: (f64, f64) = (10.0 * std::f64::consts::PI / 180.0, 80.0 * std::f64::consts::PI / 180.0);
/// Action launch-speed bounds, m/s.
pub const SPEED_RANGE: (f64, f64) = (1.0, 15.0);

const CONTACT_SLOP: f64 = 1e-9;
const MAX_CONTACT_EVENTS: usize = 8;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("non-finite ball state")]
    NonFiniteState,
    #[error("latent vector has {got} dimensions, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("latent component {index} = {value} outside [{lo}, {hi}]")]
    OutOfBounds { index: usize, value: f64, lo: f64, hi: f64 },
}

/// 2D vector in meters / meters-per-second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl std::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

/// Latent dynamics parameters; index 0 is friction, index 1 restitution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentVector(pub Vec<f64>);

impl LatentVector {
    pub fn new(values: Vec<f64>) -> Self {
        LatentVector(values)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn friction(&self) -> f64 {
        self.0[0]
    }

    pub fn restitution(&self) -> f64 {
        self.0[1]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Per-dimension search ranges for the latent factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatentBounds(pub Vec<(f64, f64)>);

impl LatentBounds {
    /// friction in [0, 3], restitution in [0, 1].
    pub fn bounce_defaults() -> Self {
        LatentBounds(vec![(0.0, 3.0), (0.0, 1.0)])
    }

    pub fn new(ranges: Vec<(f64, f64)>) -> Self {
        for &(lo, hi) in &ranges {
            assert!(lo < hi, "degenerate latent bound [{lo}, {hi}]");
        }
        LatentBounds(ranges)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn range(&self, d: usize) -> (f64, f64) {
        self.0[d]
    }

    pub fn width(&self, d: usize) -> f64 {
        self.0[d].1 - self.0[d].0
    }

    pub fn contains(&self, x: &LatentVector) -> bool {
        x.dim() == self.dim()
            && x.as_slice()
                .iter()
                .zip(&self.0)
                .all(|(v, &(lo, hi))| *v >= lo && *v <= hi)
    }

    pub fn check(&self, x: &LatentVector) -> Result<(), SimError> {
        if x.dim() != self.dim() {
            return Err(SimError::DimensionMismatch { got: x.dim(), expected: self.dim() });
        }
        for (i, (&v, &(lo, hi))) in x.as_slice().iter().zip(&self.0).enumerate() {
            if !(lo..=hi).contains(&v) {
                return Err(SimError::OutOfBounds { index: i, value: v, lo, hi });
            }
        }
        Ok(())
    }

    pub fn clamp(&self, x: &LatentVector) -> LatentVector {
        LatentVector(
            x.as_slice()
                .iter()
                .zip(&self.0)
                .map(|(v, &(lo, hi))| v.clamp(lo, hi))
                .collect(),
        )
    }

    pub fn midpoint(&self) -> LatentVector {
        LatentVector(self.0.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect())
    }
}

/// Whether a setting plays the simulator or the emulated real world.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Simulated,
    Real,
}

/// One concrete environment: latent factors plus drag.
///
/// Simulated settings are drag-free; the emulated real world adds a linear
/// drag `-damping * v` that no latent vector can reproduce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentSetting {
    pub latent: LatentVector,
    pub damping: f64,
    pub role: Role,
}

impl EnvironmentSetting {
    pub fn simulated(latent: LatentVector) -> Self {
        EnvironmentSetting { latent, damping: 0.0, role: Role::Simulated }
    }

    pub fn real(latent: LatentVector, damping: f64) -> Self {
        assert!(damping > 0.0, "real settings must have positive damping");
        EnvironmentSetting { latent, damping, role: Role::Real }
    }
}

/// One bounce task: a floor-mounted cup the ball must end up inside.
///
/// The cup is two vertical wall segments rising from the floor. When
/// `require_bounce` is set, the ball only scores if it touched the floor
/// outside the cup before ending up inside (a bank shot).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: u32,
    pub cup_left_x: f64,
    pub cup_right_x: f64,
    pub cup_floor_y: f64,
    pub cup_wall_height: f64,
    pub launch_origin: Vec2,
    #[serde(default)]
    pub require_bounce: bool,
}

impl Task {
    /// Ball-center height of floor contact.
    fn floor_contact_y(&self) -> f64 {
        self.cup_floor_y + BALL_RADIUS
    }

    fn wall_top(&self) -> f64 {
        self.cup_floor_y + self.cup_wall_height
    }

    fn walls(&self) -> [f64; 2] {
        [self.cup_left_x, self.cup_right_x]
    }

    /// Cup interior test: center strictly between the walls and below the rim.
    pub fn in_cup(&self, p: Vec2) -> bool {
        p.x > self.cup_left_x && p.x < self.cup_right_x && p.y <= self.wall_top()
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.cup_left_x >= self.cup_right_x {
            return Err(format!("task {}: cup_left_x >= cup_right_x", self.id));
        }
        if self.cup_wall_height <= 0.0 {
            return Err(format!("task {}: non-positive wall height", self.id));
        }
        if self.in_cup(self.launch_origin) {
            return Err(format!("task {}: launch origin inside the cup", self.id));
        }
        Ok(())
    }
}

/// Launch parameters: elevation angle (rad) and speed (m/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub angle: f64,
    pub speed: f64,
}

impl Action {
    pub fn new(angle: f64, speed: f64) -> Self {
        debug_assert!((ANGLE_RANGE.0..=ANGLE_RANGE.1).contains(&angle));
        debug_assert!((SPEED_RANGE.0..=SPEED_RANGE.1).contains(&speed));
        Action { angle, speed }
    }

    pub fn launch_velocity(&self) -> Vec2 {
        Vec2::new(self.speed * self.angle.cos(), self.speed * self.angle.sin())
    }
}

/// Instantaneous ball state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallState {
    pub position: Vec2,
    pub velocity: Vec2,
    pub at_rest: bool,
}

impl BallState {
    pub fn launched(task: &Task, action: &Action) -> Self {
        BallState { position: task.launch_origin, velocity: action.launch_velocity(), at_rest: false }
    }

    pub fn is_finite(&self) -> bool {
        self.position.is_finite() && self.velocity.is_finite()
    }
}

/// A completed rollout: sampled states, terminal reward, steps taken.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<BallState>,
    pub reward: f64,
    pub steps: u32,
}

#[derive(Debug, Default, Clone, Copy)]
struct StepEvents {
    /// x of the last floor contact this step, if any.
    floor_contact_x: Option<f64>,
}

/// Resolve a contact impulse against a surface with unit normal `normal`.
///
/// Newton restitution on the normal component (`v_n' = -e_r * v_n`) and a
/// Coulomb friction impulse capped at the tangential speed:
/// `|J_t| = min(|v_t|, mu_f * (1 + e_r) * |v_n|)`, sign-preserving.
/// Separating contacts are a no-op. The caller is responsible for placing
/// the ball on the surface; any residual penetration is projected out by
/// the stepper.
pub fn resolve_contact(state: &BallState, normal: Vec2, latent: &LatentVector) -> BallState {
    let v = state.velocity;
    let vn = v.dot(normal);
    if vn >= 0.0 {
        return *state;
    }
    let e_r = latent.restitution();
    let mu_f = latent.friction();
    let vt = v - normal * vn;
    let vt_mag = vt.norm();
    let jt = vt_mag.min(mu_f * (1.0 + e_r) * vn.abs());
    let new_vt = if vt_mag > 0.0 { vt * ((vt_mag - jt) / vt_mag) } else { vt };
    BallState {
        position: state.position,
        velocity: new_vt + normal * (-e_r * vn),
        at_rest: state.at_rest,
    }
}

/// Earliest contact along `p + tau * v`, `tau` in `[0, remaining]`.
/// Returns `(tau, surface normal, is_floor)`.
fn earliest_contact(p: Vec2, v: Vec2, remaining: f64, task: &Task) -> Option<(f64, Vec2, bool)> {
    let mut best: Option<(f64, Vec2, bool)> = None;
    let consider = |tau: f64, n: Vec2, floor: bool, best: &mut Option<(f64, Vec2, bool)>| {
        if tau >= 0.0 && tau <= remaining && best.map_or(true, |(bt, _, _)| tau < bt) {
            *best = Some((tau, n, floor));
        }
    };

    let fy = task.floor_contact_y();
    if v.y < 0.0 {
        let tau = if p.y <= fy + CONTACT_SLOP { 0.0 } else { (p.y - fy) / -v.y };
        consider(tau, Vec2::new(0.0, 1.0), true, &mut best);
    }

    for wx in task.walls() {
        let y0 = task.cup_floor_y;
        let y1 = task.wall_top();

        // already overlapping the segment and approaching
        let cy = p.y.clamp(y0, y1);
        let closest = Vec2::new(wx, cy);
        let d = p - closest;
        let dist = d.norm();
        if dist < BALL_RADIUS - CONTACT_SLOP && d.dot(v) < 0.0 {
            let n = if dist > 1e-12 { d * (1.0 / dist) } else { Vec2::new(0.0, 1.0) };
            consider(0.0, n, false, &mut best);
            continue;
        }

        // side faces: contact planes x = wx +/- r
        if v.x != 0.0 {
            for side in [-1.0, 1.0] {
                if v.x * side < 0.0 {
                    let plane_x = wx + side * BALL_RADIUS;
                    if (p.x - plane_x) * side >= -CONTACT_SLOP {
                        let tau = (plane_x - p.x) / v.x;
                        if tau >= 0.0 && tau <= remaining {
                            let y_hit = p.y + tau * v.y;
                            if y_hit >= y0 && y_hit <= y1 {
                                consider(tau, Vec2::new(side, 0.0), false, &mut best);
                            }
                        }
                    }
                }
            }
        }

        // endpoints (wall corners)
        for corner in [Vec2::new(wx, y0), Vec2::new(wx, y1)] {
            let rel = p - corner;
            let a = v.dot(v);
            let b = 2.0 * rel.dot(v);
            let c = rel.dot(rel) - BALL_RADIUS * BALL_RADIUS;
            if c < 0.0 || b >= 0.0 || a == 0.0 {
                continue;
            }
            let disc = b * b - 4.0 * a * c;
            if disc < 0.0 {
                continue;
            }
            let tau = (-b - disc.sqrt()) / (2.0 * a);
            if tau >= 0.0 && tau <= remaining {
                let at_contact = p + v * tau - corner;
                let dist = at_contact.norm();
                if dist > 1e-12 {
                    consider(tau, at_contact * (1.0 / dist), false, &mut best);
                }
            }
        }
    }
    best
}

fn project_out(p: &mut Vec2, task: &Task) {
    let fy = task.floor_contact_y();
    if p.y < fy {
        p.y = fy;
    }
    for wx in task.walls() {
        let cy = p.y.clamp(task.cup_floor_y, task.wall_top());
        let closest = Vec2::new(wx, cy);
        let d = *p - closest;
        let dist = d.norm();
        if dist < BALL_RADIUS && dist > 1e-12 {
            *p = closest + d * (BALL_RADIUS / dist);
        }
    }
}

fn step_internal(state: &BallState, task: &Task, setting: &EnvironmentSetting, dt: f64) -> (BallState, StepEvents) {
    let mut events = StepEvents::default();
    if state.at_rest {
        return (*state, events);
    }

    let damping = setting.damping;
    let accel = Vec2::new(0.0, -GRAVITY) - state.velocity * damping;
    let mut v = state.velocity + accel * dt;
    let mut p = state.position;
    let mut remaining = dt;

    for _ in 0..MAX_CONTACT_EVENTS {
        match earliest_contact(p, v, remaining, task) {
            None => {
                p = p + v * remaining;
                remaining = 0.0;
            }
            Some((tau, n, is_floor)) => {
                p = p + v * tau;
                remaining -= tau;
                if is_floor {
                    p.y = task.floor_contact_y();
                    events.floor_contact_x = Some(p.x);
                }
                // Impacts land part-way through a step; reflecting the
                // stored (half-step) velocity alone makes apex heights walk
                // by O(|v| dt) per bounce. Shifting the normal speed by the
                // elapsed-phase term keeps the sampled parabola's apex
                // invariant under an elastic bounce.
                let s = (dt - remaining) / dt;
                let an = accel.dot(n);
                let mut vn = v.dot(n);
                let vt = v - n * vn;
                if vn < -2.0 * an.abs() * dt {
                    vn += an * dt * (2.0 * s - 1.0);
                }
                let incoming = BallState { position: p, velocity: vt + n * vn, at_rest: false };
                v = resolve_contact(&incoming, n, &setting.latent).velocity;
            }
        }
        if remaining <= 0.0 {
            break;
        }
    }
    if remaining > 0.0 {
        p = p + v * remaining;
    }
    project_out(&mut p, task);
    (BallState { position: p, velocity: v, at_rest: false }, events)
}

/// Advance the ball by one fixed step of semi-implicit Euler.
///
/// Velocity first picks up gravity and drag, then the position advances at
/// the new velocity with exact time-of-impact resolution against the floor
/// and cup walls. A ball already at rest is returned unchanged.
pub fn step(state: &BallState, task: &Task, setting: &EnvironmentSetting, dt: f64) -> Result<BallState, SimError> {
    debug_assert!(dt > 0.0);
    if !state.is_finite() {
        return Err(SimError::NonFiniteState);
    }
    Ok(step_internal(state, task, setting, dt).0)
}

fn in_floor_contact(state: &BallState, task: &Task) -> bool {
    state.position.y <= task.floor_contact_y() + 1e-4
}

fn simulate(task: &Task, action: &Action, setting: &EnvironmentSetting, horizon: u32, record: bool) -> Trajectory {
    let mut state = BallState::launched(task, action);
    let mut states = Vec::new();
    if record {
        states.reserve(horizon as usize + 1);
        states.push(state);
    }

    let mut rest_counter = 0u32;
    let mut bounced = false;
    let mut steps = 0u32;

    for k in 1..=horizon {
        let (next, events) = step_internal(&state, task, setting, DT);
        state = next;
        steps = k;

        if let Some(x) = events.floor_contact_x {
            if !(x > task.cup_left_x && x < task.cup_right_x) {
                bounced = true;
            }
        }

        if state.velocity.norm() < REST_SPEED && in_floor_contact(&state, task) {
            rest_counter += 1;
        } else {
            rest_counter = 0;
        }
        if rest_counter >= REST_STEPS {
            state.at_rest = true;
        }
        if record {
            states.push(state);
        }
        if state.at_rest {
            break;
        }
    }

    let success = task.in_cup(state.position) && (!task.require_bounce || bounced);
    Trajectory { states, reward: if success { 1.0 } else { 0.0 }, steps }
}

/// Roll out an action on a task and record every state.
///
/// Reward is 1 iff the ball comes to rest inside the cup interior or is
/// inside it when the horizon ends; the rollout stops early once the ball
/// rests anywhere.
pub fn rollout(task: &Task, action: &Action, setting: &EnvironmentSetting, horizon: u32) -> Trajectory {
    debug_assert!(horizon > 0);
    simulate(task, action, setting, horizon, true)
}

/// Reward-only rollout; skips state recording.
pub fn rollout_reward(task: &Task, action: &Action, setting: &EnvironmentSetting, horizon: u32) -> f64 {
    simulate(task, action, setting, horizon, false).reward
}

#[cfg(test)]
mod tests {
    use super::*;

    fn far_cup_task() -> Task {
        Task {
            id: 0,
            cup_left_x: 100.0,
            cup_right_x: 100.6,
            cup_floor_y: 0.0,
            cup_wall_height: 0.4,
            launch_origin: Vec2::new(0.0, 1.0),
            require_bounce: false,
        }
    }

    fn mid_latent() -> LatentVector {
        LatentVector::new(vec![1.5, 0.5])
    }

    #[test]
    fn rest_state_is_fixed_point() {
        let task = far_cup_task();
        let setting = EnvironmentSetting::simulated(mid_latent());
        let state = BallState {
            position: Vec2::new(1.0, BALL_RADIUS),
            velocity: Vec2::new(0.0, 0.0),
            at_rest: true,
        };
        let next = step(&state, &task, &setting, DT).unwrap();
        assert_eq!(state, next);
    }

    #[test]
    fn non_finite_state_rejected() {
        let task = far_cup_task();
        let setting = EnvironmentSetting::simulated(mid_latent());
        let state = BallState {
            position: Vec2::new(f64::NAN, 1.0),
            velocity: Vec2::new(0.0, 0.0),
            at_rest: false,
        };
        assert!(matches!(step(&state, &task, &setting, DT), Err(SimError::NonFiniteState)));
    }

    #[test]
    fn drag_update_matches_euler_rule() {
        let task = far_cup_task();
        let setting = EnvironmentSetting::real(mid_latent(), 0.8);
        let state = BallState {
            position: Vec2::new(0.0, 5.0),
            velocity: Vec2::new(1.0, 0.0),
            at_rest: false,
        };
        let next = step(&state, &task, &setting, DT).unwrap();
        assert_eq!(next.velocity.x, 1.0 - 0.8 * 1.0 * DT);
    }

    /// Landing distance of a drag-free launch agrees with v^2 sin(2a)/g to
    /// within one step's horizontal displacement.
    #[test]
    fn projectile_range_matches_closed_form() {
        let mut task = far_cup_task();
        task.launch_origin = Vec2::new(0.0, BALL_RADIUS); // launch and land at equal height
        let setting = EnvironmentSetting::simulated(LatentVector::new(vec![0.0, 0.0]));
        for (angle_deg, speed) in [(30.0_f64, 8.0), (45.0, 6.0), (60.0, 10.0), (72.0, 14.0)] {
            let angle = angle_deg.to_radians();
            let action = Action::new(angle, speed);
            let traj = rollout(&task, &action, &setting, 4000);
            let landing = traj
                .states
                .iter()
                .skip(2)
                .find(|s| s.position.y <= BALL_RADIUS + 1e-9)
                .expect("ball never landed");
            let analytic = speed * speed * (2.0 * angle).sin() / GRAVITY;
            let one_step = speed * angle.cos() * DT;
            assert!(
                (landing.position.x - analytic).abs() <= one_step * (1.0 + 1e-9) + 1e-9,
                "range {} vs analytic {} (budget {})",
                landing.position.x,
                analytic,
                one_step
            );
        }
    }

    #[test]
    fn restitution_zero_kills_normal_velocity() {
        let state = BallState {
            position: Vec2::new(0.0, BALL_RADIUS),
            velocity: Vec2::new(0.0, -2.0),
            at_rest: false,
        };
        let out = resolve_contact(&state, Vec2::new(0.0, 1.0), &LatentVector::new(vec![1.0, 0.0]));
        assert_eq!(out.velocity.y, 0.0);
    }

    #[test]
    fn elastic_frictionless_contact_reflects() {
        let state = BallState {
            position: Vec2::new(0.0, BALL_RADIUS),
            velocity: Vec2::new(0.7, -2.0),
            at_rest: false,
        };
        let out = resolve_contact(&state, Vec2::new(0.0, 1.0), &LatentVector::new(vec![0.0, 1.0]));
        assert_eq!(out.velocity.y, 2.0);
        assert_eq!(out.velocity.x, 0.7);
    }

    /// Hand-evaluated impulse: vy=-2, vx=1, e_r=0.5, mu_f=3. The friction
    /// cap |v_t| binds: J_t = min(1, 3 * 1.5 * 2) = 1.
    #[test]
    fn friction_impulse_cap_binds() {
        let state = BallState {
            position: Vec2::new(0.0, BALL_RADIUS),
            velocity: Vec2::new(1.0, -2.0),
            at_rest: false,
        };
        let out = resolve_contact(&state, Vec2::new(0.0, 1.0), &LatentVector::new(vec![3.0, 0.5]));
        assert!((out.velocity.y - 1.0).abs() < 1e-15);
        assert!(out.velocity.x.abs() < 1e-15);
    }

    #[test]
    fn separating_contact_is_noop() {
        let state = BallState {
            position: Vec2::new(0.0, BALL_RADIUS),
            velocity: Vec2::new(1.0, 2.0),
            at_rest: false,
        };
        let out = resolve_contact(&state, Vec2::new(0.0, 1.0), &mid_latent());
        assert_eq!(out, state);
    }

    /// Elastic, frictionless, undamped: bounce apex heights stay within 1%
    /// of the first apex over ten bounces.
    #[test]
    fn elastic_bounce_apex_drift_below_one_percent() {
        let mut task = far_cup_task();
        task.launch_origin = Vec2::new(0.0, 1.0 + BALL_RADIUS);
        let setting = EnvironmentSetting::simulated(LatentVector::new(vec![0.0, 1.0]));
        // drop from rest: use a tiny horizontal speed of 0 via direct state loop
        let mut state = BallState {
            position: task.launch_origin,
            velocity: Vec2::new(0.0, 0.0),
            at_rest: false,
        };
        let mut apexes = Vec::new();
        let mut current_apex = state.position.y;
        let mut prev_vy = 0.0;
        for _ in 0..6000 {
            state = step(&state, &task, &setting, DT).unwrap();
            if state.position.y > current_apex {
                current_apex = state.position.y;
            }
            // apex bookkeeping: a bounce shows up as vy flipping to positive
            if prev_vy < 0.0 && state.velocity.y > 0.0 {
                apexes.push(current_apex);
                current_apex = state.position.y;
                if apexes.len() > 10 {
                    break;
                }
            }
            prev_vy = state.velocity.y;
        }
        assert!(apexes.len() >= 10, "only {} bounces observed", apexes.len());
        let first = apexes[0];
        for (i, &a) in apexes.iter().take(10).enumerate() {
            let drift = (a - first).abs() / (first - BALL_RADIUS);
            assert!(drift < 0.01, "apex {} drifted {:.4} ({} vs {})", i, drift, a, first);
        }
    }

    /// With drag, discrete mechanical energy never increases in free flight.
    #[test]
    fn damped_flight_dissipates_energy() {
        let task = far_cup_task();
        let setting = EnvironmentSetting::real(mid_latent(), 0.8);
        let mut state = BallState {
            position: Vec2::new(0.0, 30.0),
            velocity: Vec2::new(6.0, 9.0),
            at_rest: false,
        };
        let energy = |s: &BallState| 0.5 * s.velocity.dot(s.velocity) + GRAVITY * s.position.y;
        let mut prev = energy(&state);
        for _ in 0..600 {
            state = step(&state, &task, &setting, DT).unwrap();
            if state.position.y <= BALL_RADIUS + 1e-3 {
                break; // contact ends the free-flight check
            }
            let e = energy(&state);
            assert!(e <= prev + 1e-12, "energy rose from {prev} to {e}");
            prev = e;
        }
    }

    #[test]
    fn aiming_away_from_cup_scores_zero() {
        let task = Task {
            id: 1,
            cup_left_x: 7.0,
            cup_right_x: 7.6,
            cup_floor_y: 0.0,
            cup_wall_height: 0.4,
            launch_origin: Vec2::new(0.0, 1.0),
            require_bounce: false,
        };
        let setting = EnvironmentSetting::simulated(mid_latent());
        let action = Action::new(ANGLE_RANGE.1, 1.0);
        let traj = rollout(&task, &action, &setting, DEFAULT_HORIZON);
        assert_eq!(traj.reward, 0.0);
    }

    #[test]
    fn rollout_is_deterministic() {
        let task = Task {
            id: 2,
            cup_left_x: 4.0,
            cup_right_x: 4.6,
            cup_floor_y: 0.0,
            cup_wall_height: 0.4,
            launch_origin: Vec2::new(0.0, 1.0),
            require_bounce: false,
        };
        let setting = EnvironmentSetting::real(mid_latent(), 0.8);
        let action = Action::new(0.6, 7.0);
        let a = rollout(&task, &action, &setting, DEFAULT_HORIZON);
        let b = rollout(&task, &action, &setting, DEFAULT_HORIZON);
        assert_eq!(a, b);
        assert_eq!(a.states.len() as u32, a.steps + 1);
    }

    /// Wall impacts respect the restitution bound |v_n'| <= e_r |v_n|.
    #[test]
    fn restitution_bound_on_wall_hit() {
        let task = Task {
            id: 3,
            cup_left_x: 2.0,
            cup_right_x: 2.6,
            cup_floor_y: 0.0,
            cup_wall_height: 0.4,
            launch_origin: Vec2::new(0.0, 0.2),
            require_bounce: false,
        };
        let latent = LatentVector::new(vec![0.5, 0.6]);
        let state = BallState {
            position: Vec2::new(1.0, 0.2),
            velocity: Vec2::new(5.0, 0.0),
            at_rest: false,
        };
        // directly exercise resolve_contact against the wall normal
        let out = resolve_contact(&state, Vec2::new(-1.0, 0.0), &latent);
        assert!(out.velocity.x.abs() <= 0.6 * 5.0 + 1e-12);
        // and integrated: the ball must come back off the wall slower
        let setting = EnvironmentSetting::simulated(latent);
        let mut s = state;
        for _ in 0..240 {
            s = step(&s, &task, &setting, DT).unwrap();
            if s.velocity.x < 0.0 {
                break;
            }
        }
        assert!(s.velocity.x < 0.0, "ball never rebounded");
        assert!(s.velocity.x.abs() <= 0.6 * 5.0 + 1e-9);
    }

    #[test]
    fn ball_comes_to_rest_inside_cup() {
        let task = Task {
            id: 4,
            cup_left_x: 3.0,
            cup_right_x: 3.6,
            cup_floor_y: 0.0,
            cup_wall_height: 0.4,
            launch_origin: Vec2::new(0.0, 1.0),
            require_bounce: false,
        };
        let setting = EnvironmentSetting::simulated(LatentVector::new(vec![1.0, 0.3]));
        // 45 degrees, range ~ v^2/g: v = sqrt(g * 3.3) ~ 5.7
        let action = Action::new(45f64.to_radians(), 5.7);
        let traj = rollout(&task, &action, &setting, DEFAULT_HORIZON);
        let last = traj.states.last().unwrap();
        assert!(
            last.at_rest || traj.steps == DEFAULT_HORIZON,
            "rollout ended without rest or horizon"
        );
        if traj.reward == 1.0 {
            assert!(task.in_cup(last.position));
        }
    }
}
