//! The navigation behavioral rules, written as SBP scenarios.
//!
//! Three rules discourage wasteful maneuvers:
//!
//! 1. *avoid-back-and-forth*: after a turn, the opposite turn is blocked
//!    until the robot moves forward.
//! 2. *avoid-k-consecutive-turns*: the same turn delivered `k` times in a
//!    row blocks further turns in that direction (with 30-degree turns and
//!    `k = 7`, this forbids rotating past 180 degrees).
//! 3. *avoid-turning-when-clear*: when the target is straight ahead and the
//!    path to it is clear, both turns are blocked.
//!
//! Each agent action maps to a dedicated external event; the event payload
//! carries the observation so rule 3 can evaluate its data-dependent guard.
//! The appendix-style generator loops behind these rules are expressed here
//! as explicit transition functions over integer registers; the declared
//! blocked sets after every delivery are identical to the generator form.

use nav_env::{NavAction, Observation};
use sbp_core::{Event, EventName, SBProgram, Scenario, SyncDeclaration};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Event names for the three actions.
pub const EV_FORWARD: &str = "SBP_MoveForward";
pub const EV_LEFT: &str = "SBP_TurnLeft";
pub const EV_RIGHT: &str = "SBP_TurnRight";

/// Scenario ids for the three rules.
pub const RULE_BACK_AND_FORTH: &str = "avoid-back-and-forth";
pub const RULE_K_TURNS: &str = "avoid-k-consecutive-turns";
pub const RULE_TURNING_WHEN_CLEAR: &str = "avoid-turning-when-clear";

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("invalid clear-path guard: {0}")]
    InvalidGuard(String),
}

/// Maps an action to its external event name.
pub fn action_event_name(action: NavAction) -> EventName {
    EventName::new(match action {
        NavAction::Forward => EV_FORWARD,
        NavAction::Left => EV_LEFT,
        NavAction::Right => EV_RIGHT,
    })
}

/// Inverse of [`action_event_name`].
pub fn action_from_event_name(name: &EventName) -> Option<NavAction> {
    match name.as_str() {
        EV_FORWARD => Some(NavAction::Forward),
        EV_LEFT => Some(NavAction::Left),
        EV_RIGHT => Some(NavAction::Right),
        _ => None,
    }
}

/// Builds the external event for an executed action. The payload is the
/// observation produced by that action, in the canonical flat layout, so
/// guards judge the world as the next decision will see it.
pub fn action_to_event(action: NavAction, obs: &Observation) -> Event {
    Event::with_payload(action_event_name(action), obs.payload().to_vec())
}

fn all_action_events() -> [EventName; 3] {
    [
        EventName::new(EV_FORWARD),
        EventName::new(EV_LEFT),
        EventName::new(EV_RIGHT),
    ]
}

/// Constants for the clear-path guard of rule 3, in meters/radians (the
/// payload is unnormalized).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClearPathGuardConfig {
    /// Required clearance on the front ray (payload index 3).
    pub minimal_fwd_clearance: f64,
    /// Required clearance on the two adjacent rays (payload indices 2, 4).
    pub minimal_clearance: f64,
    /// Bearing considered "straight ahead" (0: bearing is target-relative).
    pub fwd_dir: f64,
    /// Half-width of the bearing window around `fwd_dir`.
    pub fwd_dir_tolerance: f64,
}

impl Default for ClearPathGuardConfig {
    fn default() -> Self {
        Self {
            // Twice / once the default forward step length; tolerance is
            // half the 30-degree turn granularity.
            minimal_fwd_clearance: 0.30,
            minimal_clearance: 0.15,
            fwd_dir: 0.0,
            fwd_dir_tolerance: std::f64::consts::PI / 12.0,
        }
    }
}

impl ClearPathGuardConfig {
    pub fn validate(&self) -> Result<(), RuleError> {
        if !(self.minimal_fwd_clearance > 0.0 && self.minimal_clearance > 0.0) {
            return Err(RuleError::InvalidGuard("clearances must be positive".into()));
        }
        if !(self.fwd_dir_tolerance > 0.0 && self.fwd_dir_tolerance < std::f64::consts::PI) {
            return Err(RuleError::InvalidGuard(
                "tolerance must lie in (0, pi)".into(),
            ));
        }
        Ok(())
    }

    /// The guard itself: target roughly ahead and the three frontal rays
    /// clear. `payload` uses the canonical observation layout.
    pub fn holds(&self, payload: &[f64]) -> Result<bool, String> {
        if payload.len() != 9 {
            return Err(format!(
                "expected a 9-element observation payload, got {}",
                payload.len()
            ));
        }
        let bearing = payload[7];
        Ok(payload[3] > self.minimal_fwd_clearance
            && payload[2] > self.minimal_clearance
            && payload[4] > self.minimal_clearance
            && (self.fwd_dir - bearing).abs() < self.fwd_dir_tolerance)
    }
}

/// Rule 1: a left turn blocks the opposite turn until a forward move clears
/// the blocking (and symmetrically for right turns).
pub fn make_avoid_back_and_forth() -> Scenario {
    const NEUTRAL: i64 = 0;
    const AFTER_LEFT: i64 = 1;
    const AFTER_RIGHT: i64 = 2;
    Scenario::from_fn(RULE_BACK_AND_FORTH, |state, event| {
        let prev = state.first().copied().unwrap_or(NEUTRAL);
        let mode = match event.name().as_str() {
            EV_LEFT => AFTER_LEFT,
            EV_RIGHT => AFTER_RIGHT,
            EV_FORWARD => NEUTRAL,
            _ => prev, // init and foreign events leave the mode unchanged
        };
        let blocked = match mode {
            AFTER_LEFT => vec![EventName::new(EV_RIGHT)],
            AFTER_RIGHT => vec![EventName::new(EV_LEFT)],
            _ => Vec::new(),
        };
        Ok((
            vec![mode],
            SyncDeclaration::wait_block(all_action_events(), blocked),
        ))
    })
}

/// Rule 2: `k` consecutive identical turns block that turn; a forward move
/// or a direction change resets the streak.
pub fn make_avoid_k_consecutive_turns(k: u32) -> Result<Scenario, RuleError> {
    if k == 0 {
        return Err(RuleError::ZeroK);
    }
    let k = i64::from(k);
    Ok(Scenario::from_fn(RULE_K_TURNS, move |state, event| {
        let (prev_dir, prev_count) = match state.as_slice() {
            [d, c, ..] => (*d, *c),
            _ => (0, 0),
        };
        // Direction register: 0 none, 1 left, 2 right.
        let dir = match event.name().as_str() {
            EV_LEFT => 1,
            EV_RIGHT => 2,
            _ => 0,
        };
        let count = if dir == 0 {
            0
        } else if dir == prev_dir {
            prev_count + 1
        } else {
            1
        };
        let blocked = if dir != 0 && count >= k {
            vec![EventName::new(if dir == 1 { EV_LEFT } else { EV_RIGHT })]
        } else {
            Vec::new()
        };
        Ok((
            vec![dir, count],
            SyncDeclaration::wait_block(all_action_events(), blocked),
        ))
    }))
}

/// Rule 3: when the latest payload shows the target straight ahead behind a
/// clear path, both turns are blocked. The guard is stateless: only the most
/// recent payload matters.
pub fn make_avoid_turning_when_clear(cfg: ClearPathGuardConfig) -> Result<Scenario, RuleError> {
    cfg.validate()?;
    Ok(Scenario::from_fn(RULE_TURNING_WHEN_CLEAR, move |_state, event| {
        let blocked = if event.is_init() {
            Vec::new()
        } else {
            let payload = event
                .payload()
                .ok_or_else(|| "event carries no observation payload".to_string())?;
            if cfg.holds(payload)? {
                vec![EventName::new(EV_LEFT), EventName::new(EV_RIGHT)]
            } else {
                Vec::new()
            }
        };
        Ok((
            Vec::new(),
            SyncDeclaration::wait_block(all_action_events(), blocked),
        ))
    }))
}

/// Which rules are active, as named in configs and metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    BackAndForth,
    KTurns,
    TurningWhenClear,
}

impl RuleKind {
    pub const ALL: [RuleKind; 3] = [
        RuleKind::BackAndForth,
        RuleKind::KTurns,
        RuleKind::TurningWhenClear,
    ];

    pub fn id(self) -> &'static str {
        match self {
            RuleKind::BackAndForth => RULE_BACK_AND_FORTH,
            RuleKind::KTurns => RULE_K_TURNS,
            RuleKind::TurningWhenClear => RULE_TURNING_WHEN_CLEAR,
        }
    }
}

/// Parameters needed to instantiate the rule set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleParams {
    pub k: u32,
    pub guard: ClearPathGuardConfig,
}

impl Default for RuleParams {
    fn default() -> Self {
        Self {
            k: 7,
            guard: ClearPathGuardConfig::default(),
        }
    }
}

/// Builds a runnable program containing the selected rules, with the three
/// action events declared external.
pub fn build_program(
    rules: &[RuleKind],
    params: &RuleParams,
    advance_on_block: bool,
) -> Result<SBProgram, RuleError> {
    let mut program = SBProgram::new(all_action_events()).advance_on_block(advance_on_block);
    for rule in rules {
        let scenario = match rule {
            RuleKind::BackAndForth => make_avoid_back_and_forth(),
            RuleKind::KTurns => make_avoid_k_consecutive_turns(params.k)?,
            RuleKind::TurningWhenClear => make_avoid_turning_when_clear(params.guard)?,
        };
        program
            .register_scenario(scenario)
            .expect("rule ids are distinct");
    }
    program.start().expect("rules request no internal events");
    Ok(program)
}
