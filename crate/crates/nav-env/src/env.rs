use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::geometry::{ray_rect_exit, swept_disc_circle, swept_disc_rect, wrap_angle};
use crate::world::{Obstacle, World};
use crate::EnvError;

/// The three discrete robot actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NavAction {
    Forward,
    Left,
    Right,
}

impl NavAction {
    pub const ALL: [NavAction; 3] = [NavAction::Forward, NavAction::Left, NavAction::Right];

    /// Stable index used for policy outputs: forward 0, left 1, right 2.
    pub fn index(self) -> usize {
        match self {
            NavAction::Forward => 0,
            NavAction::Left => 1,
            NavAction::Right => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

/// Simulator parameters. Lengths are meters, angles radians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    /// Forward translation per step.
    pub step_len: f64,
    /// In-place rotation per turn action.
    pub turn_angle: f64,
    pub max_steps: u32,
    pub goal_radius: f64,
    pub robot_radius: f64,
    /// Lidar clamp distance.
    pub max_range: f64,
    /// Minimum start-to-goal distance enforced at reset.
    pub min_start_goal_dist: f64,
    /// Scale on the per-step distance delta in the shaped reward.
    pub reward_scale: f64,
    /// Constant per-step penalty in the shaped reward.
    pub step_penalty: f64,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            step_len: 0.15,
            turn_angle: std::f64::consts::FRAC_PI_6,
            max_steps: 500,
            goal_radius: 0.2,
            robot_radius: 0.1,
            max_range: 3.5,
            min_start_goal_dist: 1.0,
            reward_scale: 3.0,
            step_penalty: 0.001,
        }
    }
}

/// Robot pose plus the episode's target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub x: f64,
    pub y: f64,
    /// Heading in `(-pi, pi]`, counter-clockwise from +x.
    pub heading: f64,
    pub target_x: f64,
    pub target_y: f64,
    pub steps_taken: u32,
}

impl RobotState {
    pub fn distance_to_target(&self) -> f64 {
        (self.target_x - self.x).hypot(self.target_y - self.y)
    }
}

/// The nine-dimensional agent input: seven lidar ranges, the relative
/// bearing to the target, and the distance to the target.
///
/// Lidar index `i` looks at `heading + (i - 3) * 30deg`, so index 3 is
/// straight ahead, index 0 is 90deg to the right, and index 6 is 90deg to
/// the left. The bearing is the relative bearing of the target, positive
/// clockwise: 0 means dead ahead, positive means the target lies to the
/// right.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub lidar: [f64; 7],
    pub bearing: f64,
    pub distance: f64,
}

impl Observation {
    /// Canonical flat layout `[lidar0..lidar6, bearing, distance]` in raw
    /// units (meters, radians). Index 3 is the front ray; index 7 the
    /// bearing. This is the payload scenario guards see.
    pub fn payload(&self) -> [f64; 9] {
        let mut out = [0.0; 9];
        out[..7].copy_from_slice(&self.lidar);
        out[7] = self.bearing;
        out[8] = self.distance;
        out
    }

    /// Same layout scaled for the policy network: lidar by max range,
    /// bearing by pi, distance by the arena diagonal.
    pub fn normalized(&self, norm: &NormConstants) -> [f64; 9] {
        let mut out = [0.0; 9];
        for (o, l) in out.iter_mut().zip(self.lidar) {
            *o = l / norm.max_range;
        }
        out[7] = self.bearing / std::f64::consts::PI;
        out[8] = self.distance / norm.diag;
        out
    }
}

/// Normalization constants shared between training and verification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormConstants {
    pub max_range: f64,
    pub diag: f64,
}

/// How an episode ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    ReachedTarget,
    Collision,
    Timeout,
}

/// Result of one simulator step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub obs: Observation,
    pub reward: f64,
    pub terminal: Option<Outcome>,
}

/// Fraction of outcomes that reached the target.
pub fn success_rate(window: &[Outcome]) -> Result<f64, EnvError> {
    if window.is_empty() {
        return Err(EnvError::EmptyWindow);
    }
    let hits = window
        .iter()
        .filter(|o| **o == Outcome::ReachedTarget)
        .count();
    Ok(hits as f64 / window.len() as f64)
}

/// Casts the seven lidar rays from a pose, clamped to `max_range`.
pub fn raycast_lidar(world: &World, x: f64, y: f64, heading: f64, max_range: f64) -> [f64; 7] {
    let mut out = [max_range; 7];
    for (i, slot) in out.iter_mut().enumerate() {
        let angle = heading + (i as f64 - 3.0) * std::f64::consts::FRAC_PI_6;
        let (dx, dy) = (angle.cos(), angle.sin());
        let mut dist = ray_rect_exit(x, y, dx, dy, &world.bounds).unwrap_or(max_range);
        for ob in &world.obstacles {
            let hit = match *ob {
                Obstacle::Rect {
                    xmin,
                    ymin,
                    xmax,
                    ymax,
                } => crate::geometry::ray_rect_entry(
                    x,
                    y,
                    dx,
                    dy,
                    &crate::geometry::Rect::new(xmin, ymin, xmax, ymax),
                ),
                Obstacle::Circle {
                    x: cx,
                    y: cy,
                    radius,
                } => crate::geometry::ray_circle_entry(x, y, dx, dy, cx, cy, radius),
            };
            if let Some(t) = hit {
                dist = dist.min(t);
            }
        }
        *slot = dist.min(max_range).max(f64::MIN_POSITIVE);
    }
    out
}

/// The simulator: a validated world plus the current episode state.
#[derive(Debug, Clone)]
pub struct Env {
    world: World,
    cfg: EnvConfig,
    state: RobotState,
    outcome: Option<Outcome>,
    started: bool,
}

impl Env {
    pub fn new(world: World, cfg: EnvConfig) -> Result<Self, EnvError> {
        world.validate(cfg.robot_radius)?;
        Ok(Self {
            world,
            cfg,
            state: RobotState {
                x: 0.0,
                y: 0.0,
                heading: 0.0,
                target_x: 0.0,
                target_y: 0.0,
                steps_taken: 0,
            },
            outcome: None,
            started: false,
        })
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    pub fn state(&self) -> &RobotState {
        &self.state
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.outcome
    }

    pub fn norm_constants(&self) -> NormConstants {
        NormConstants {
            max_range: self.cfg.max_range,
            diag: self.world.diagonal(),
        }
    }

    /// Starts a fresh episode: robot and target are placed uniformly at
    /// random in free space (clearance at least the robot radius) at least
    /// `min_start_goal_dist` apart. Deterministic given `seed`.
    pub fn reset(&mut self, seed: u64) -> Result<(RobotState, Observation), EnvError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (rx, ry) = self.sample_free_point(&mut rng)?;
        let heading = wrap_angle(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        let mut placed = None;
        for _ in 0..1000 {
            let (tx, ty) = self.sample_free_point(&mut rng)?;
            if (tx - rx).hypot(ty - ry) >= self.cfg.min_start_goal_dist {
                placed = Some((tx, ty));
                break;
            }
        }
        let (tx, ty) = placed.ok_or(EnvError::PlacementFailed)?;
        self.state = RobotState {
            x: rx,
            y: ry,
            heading,
            target_x: tx,
            target_y: ty,
            steps_taken: 0,
        };
        self.outcome = None;
        self.started = true;
        Ok((self.state, self.observe()))
    }

    /// Starts an episode from an explicit state (fixtures and replay).
    pub fn reset_to(&mut self, state: RobotState) -> Result<Observation, EnvError> {
        for (x, y, what) in [
            (state.x, state.y, "robot"),
            (state.target_x, state.target_y, "target"),
        ] {
            if self.world.clearance(x, y) < self.cfg.robot_radius {
                return Err(EnvError::InvalidWorld(format!(
                    "{what} position ({x:.3}, {y:.3}) is not in free space"
                )));
            }
        }
        self.state = state;
        self.outcome = None;
        self.started = true;
        Ok(self.observe())
    }

    fn sample_free_point(&self, rng: &mut ChaCha8Rng) -> Result<(f64, f64), EnvError> {
        let r = self.cfg.robot_radius;
        let b = &self.world.bounds;
        for _ in 0..1000 {
            let x = rng.gen_range(b.xmin + r..b.xmax - r);
            let y = rng.gen_range(b.ymin + r..b.ymax - r);
            if self.world.clearance(x, y) >= r {
                return Ok((x, y));
            }
        }
        Err(EnvError::PlacementFailed)
    }

    pub fn observe(&self) -> Observation {
        let s = &self.state;
        let lidar = raycast_lidar(&self.world, s.x, s.y, s.heading, self.cfg.max_range);
        let angle_to_target = (s.target_y - s.y).atan2(s.target_x - s.x);
        Observation {
            lidar,
            bearing: wrap_angle(s.heading - angle_to_target),
            distance: s.distance_to_target(),
        }
    }

    /// Earliest contact distance of the robot disc moved from its pose along
    /// `(dx, dy)` for up to `len`, against obstacles and walls.
    fn sweep_collision(&self, dx: f64, dy: f64, len: f64) -> Option<f64> {
        let s = &self.state;
        let r = self.cfg.robot_radius;
        let mut best: Option<f64> = None;
        let mut consider = |t: Option<f64>| {
            if let Some(t) = t {
                if best.is_none_or(|b| t < b) {
                    best = Some(t);
                }
            }
        };
        for ob in &self.world.obstacles {
            match *ob {
                Obstacle::Rect { .. } => consider(swept_disc_rect(
                    s.x,
                    s.y,
                    dx,
                    dy,
                    len,
                    r,
                    &ob.as_rect().expect("rect obstacle"),
                )),
                Obstacle::Circle {
                    x: cx,
                    y: cy,
                    radius,
                } => consider(swept_disc_circle(s.x, s.y, dx, dy, len, r, cx, cy, radius)),
            }
        }
        // Walls: the disc center must stay within the deflated bounds.
        let inner = self.world.bounds.deflate(r);
        if let Some(t) = ray_rect_exit(s.x, s.y, dx, dy, &inner) {
            if t <= len {
                consider(Some(t));
            }
        }
        best
    }

    /// Executes one action. Turns rotate in place by the configured angle;
    /// forward translates with a swept-disc collision check. Non-terminal
    /// steps earn `(dist_prev - dist) * reward_scale - step_penalty`;
    /// reaching the target earns exactly +1, colliding exactly -1.
    pub fn step(&mut self, action: NavAction) -> Result<StepResult, EnvError> {
        if !self.started || self.outcome.is_some() {
            return Err(EnvError::EpisodeFinished);
        }
        let prev_dist = self.state.distance_to_target();
        self.state.steps_taken += 1;
        let mut collided = false;
        match action {
            NavAction::Left => {
                self.state.heading = wrap_angle(self.state.heading + self.cfg.turn_angle);
            }
            NavAction::Right => {
                self.state.heading = wrap_angle(self.state.heading - self.cfg.turn_angle);
            }
            NavAction::Forward => {
                let (dx, dy) = (self.state.heading.cos(), self.state.heading.sin());
                match self.sweep_collision(dx, dy, self.cfg.step_len) {
                    Some(t) => {
                        // Stop just short of contact so the pose stays in
                        // free space for the terminal observation.
                        let t = (t - 1e-9).max(0.0);
                        self.state.x += dx * t;
                        self.state.y += dy * t;
                        collided = true;
                    }
                    None => {
                        self.state.x += dx * self.cfg.step_len;
                        self.state.y += dy * self.cfg.step_len;
                    }
                }
            }
        }
        let dist = self.state.distance_to_target();
        let (reward, outcome) = if collided {
            (-1.0, Some(Outcome::Collision))
        } else if dist <= self.cfg.goal_radius {
            (1.0, Some(Outcome::ReachedTarget))
        } else {
            let shaped = (prev_dist - dist) * self.cfg.reward_scale - self.cfg.step_penalty;
            if self.state.steps_taken >= self.cfg.max_steps {
                (shaped, Some(Outcome::Timeout))
            } else {
                (shaped, None)
            }
        };
        self.outcome = outcome;
        Ok(StepResult {
            obs: self.observe(),
            reward,
            terminal: outcome,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(world: World) -> Env {
        Env::new(world, EnvConfig::default()).unwrap()
    }

    fn centered_state(heading: f64) -> RobotState {
        RobotState {
            x: 3.0,
            y: 3.0,
            heading,
            target_x: 5.0,
            target_y: 3.0,
            steps_taken: 0,
        }
    }

    #[test]
    fn reset_is_deterministic_in_the_seed() {
        let mut a = env(World::four_block());
        let mut b = env(World::four_block());
        let (sa, oa) = a.reset(42).unwrap();
        let (sb, ob) = b.reset(42).unwrap();
        assert_eq!(sa, sb);
        assert_eq!(oa, ob);
        let (sc, _) = a.reset(43).unwrap();
        assert_ne!(sa, sc);
    }

    #[test]
    fn resets_respect_clearance_and_min_distance() {
        let mut e = env(World::four_block());
        let r = e.config().robot_radius;
        for seed in 0..1000 {
            let (s, _) = e.reset(seed).unwrap();
            assert!(e.world().clearance(s.x, s.y) >= r, "seed {seed}");
            assert!(e.world().clearance(s.target_x, s.target_y) >= r);
            assert!(s.distance_to_target() >= e.config().min_start_goal_dist);
        }
    }

    #[test]
    fn empty_world_resets_keep_min_start_goal_distance() {
        let mut e = env(World::empty());
        for seed in 0..1000 {
            let (s, _) = e.reset(seed).unwrap();
            assert!(s.distance_to_target() >= e.config().min_start_goal_dist);
        }
    }

    #[test]
    fn lidar_clamps_to_max_range_in_open_space() {
        // 10 m x 10 m empty arena, robot in the middle: every wall is at
        // least 5 m away, beyond the 3.5 m range.
        let world = World {
            bounds: crate::geometry::Rect::new(0.0, 0.0, 10.0, 10.0),
            obstacles: vec![],
            rng_seed: 0,
        };
        let lidar = raycast_lidar(&world, 5.0, 5.0, 0.3, 3.5);
        assert_eq!(lidar, [3.5; 7]);
    }

    #[test]
    fn front_ray_measures_perpendicular_wall_distance() {
        let world = World::empty();
        // Facing the east wall (x = 6) from x = 5: exactly 1 m ahead.
        let lidar = raycast_lidar(&world, 5.0, 3.0, 0.0, 3.5);
        assert!((lidar[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oblique_heading_matches_analytic_wall_intersections() {
        let world = World::empty();
        let (x, y, heading) = (1.0, 3.0, std::f64::consts::FRAC_PI_4);
        let lidar = raycast_lidar(&world, x, y, heading, 3.5);
        for (i, got) in lidar.iter().enumerate() {
            let a = heading + (i as f64 - 3.0) * std::f64::consts::FRAC_PI_6;
            let (dx, dy) = (a.cos(), a.sin());
            let mut t = f64::INFINITY;
            if dx > 1e-12 {
                t = t.min((6.0 - x) / dx);
            } else if dx < -1e-12 {
                t = t.min((0.0 - x) / dx);
            }
            if dy > 1e-12 {
                t = t.min((6.0 - y) / dy);
            } else if dy < -1e-12 {
                t = t.min((0.0 - y) / dy);
            }
            assert!((got - t.min(3.5)).abs() < 1e-9, "ray {i}");
        }
    }

    #[test]
    fn lidar_against_obstacle_matches_marching_oracle() {
        let world = World::four_block();
        let (x, y, heading) = (3.0, 3.0, 2.2);
        let lidar = raycast_lidar(&world, x, y, heading, 3.5);
        for (i, got) in lidar.iter().enumerate() {
            let a = heading + (i as f64 - 3.0) * std::f64::consts::FRAC_PI_6;
            let (dx, dy) = (a.cos(), a.sin());
            let mut t = 0.0;
            let step = 1e-4;
            while t < 3.5 {
                let (px, py) = (x + dx * t, y + dy * t);
                let hit = !world.bounds.contains(px, py)
                    || world.obstacles.iter().any(|o| o.distance_to_point(px, py) == 0.0);
                if hit {
                    break;
                }
                t += step;
            }
            assert!((got - t.min(3.5)).abs() < 2e-4, "ray {i}: {got} vs {t}");
        }
    }

    #[test]
    fn forward_toward_target_earns_shaped_reward() {
        let cfg = EnvConfig {
            step_len: 0.1,
            ..EnvConfig::default()
        };
        let mut e = Env::new(World::empty(), cfg).unwrap();
        e.reset_to(centered_state(0.0)).unwrap();
        let res = e.step(NavAction::Forward).unwrap();
        // Distance shrinks by exactly the step length: 0.1 * 3 - 0.001.
        assert!((res.reward - 0.299).abs() < 1e-9);
        assert_eq!(res.terminal, None);
    }

    #[test]
    fn turning_in_place_costs_the_step_penalty() {
        let mut e = env(World::empty());
        e.reset_to(centered_state(0.0)).unwrap();
        let res = e.step(NavAction::Left).unwrap();
        assert!((res.reward + 0.001).abs() < 1e-12);
        assert!((e.state().heading - std::f64::consts::FRAC_PI_6).abs() < 1e-12);
    }

    #[test]
    fn driving_into_the_wall_terminates_with_minus_one() {
        let mut e = env(World::empty());
        let mut s = centered_state(0.0);
        s.x = 5.85; // wall at 6.0, robot radius 0.1: contact after 0.05 m
        s.target_x = 3.0;
        e.reset_to(s).unwrap();
        let res = e.step(NavAction::Forward).unwrap();
        assert_eq!(res.reward, -1.0);
        assert_eq!(res.terminal, Some(Outcome::Collision));
        assert!(e.step(NavAction::Forward).is_err());
    }

    #[test]
    fn reaching_the_goal_earns_plus_one() {
        let mut e = env(World::empty());
        let mut s = centered_state(0.0);
        s.target_x = s.x + 0.3;
        e.reset_to(s).unwrap();
        let res = e.step(NavAction::Forward).unwrap();
        assert_eq!(res.reward, 1.0);
        assert_eq!(res.terminal, Some(Outcome::ReachedTarget));
    }

    #[test]
    fn timeout_is_reported_at_the_step_cap() {
        let cfg = EnvConfig {
            max_steps: 3,
            ..EnvConfig::default()
        };
        let mut e = Env::new(World::empty(), cfg).unwrap();
        e.reset_to(centered_state(std::f64::consts::FRAC_PI_2)).unwrap();
        for _ in 0..2 {
            assert_eq!(e.step(NavAction::Left).unwrap().terminal, None);
        }
        assert_eq!(
            e.step(NavAction::Left).unwrap().terminal,
            Some(Outcome::Timeout)
        );
    }

    #[test]
    fn twelve_left_turns_close_the_circle() {
        let mut e = env(World::empty());
        e.reset_to(centered_state(0.7)).unwrap();
        for _ in 0..12 {
            e.step(NavAction::Left).unwrap();
        }
        assert!((e.state().heading - 0.7).abs() < 1e-9);
    }

    #[test]
    fn success_rate_counts_only_reached() {
        use Outcome::*;
        assert_eq!(success_rate(&[ReachedTarget, Collision]).unwrap(), 0.5);
        assert_eq!(success_rate(&[ReachedTarget; 100]).unwrap(), 1.0);
        assert_eq!(
            success_rate(&[Timeout, ReachedTarget, ReachedTarget, Collision]).unwrap(),
            0.5
        );
        assert!(success_rate(&[]).is_err());
    }

    #[test]
    fn bearing_is_clockwise_positive() {
        let mut e = env(World::empty());
        // Robot facing east, target due north: target is to the left, so
        // relative bearing is -90 degrees.
        let mut s = centered_state(0.0);
        s.target_x = 3.0;
        s.target_y = 5.0;
        let obs = e.reset_to(s).unwrap();
        assert!((obs.bearing + std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        // One left turn brings the bearing 30 degrees toward zero... from
        // -90 to -60.
        let obs = e.step(NavAction::Left).unwrap().obs;
        assert!((obs.bearing + std::f64::consts::FRAC_PI_3).abs() < 1e-12);
    }

    #[test]
    fn payload_layout_has_front_ray_at_3_and_bearing_at_7() {
        let mut e = env(World::empty());
        let obs = e.reset_to(centered_state(0.0)).unwrap();
        let p = obs.payload();
        assert_eq!(p[3], obs.lidar[3]);
        assert_eq!(p[7], obs.bearing);
        assert_eq!(p[8], obs.distance);
        let n = obs.normalized(&e.norm_constants());
        assert!((n[3] - obs.lidar[3] / 3.5).abs() < 1e-15);
        assert!((n[8] - obs.distance / e.world().diagonal()).abs() < 1e-15);
    }
}
