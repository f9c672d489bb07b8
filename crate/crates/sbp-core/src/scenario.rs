use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::event::{Event, EventName};
use crate::SbpError;

/// Identifier of a scenario within a program.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScenarioId(String);

impl ScenarioId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ScenarioId {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

impl From<String> for ScenarioId {
    fn from(s: String) -> Self {
        Self::new(s)
    }
}

/// Local state of a scenario between synchronization points: a handful of
/// integer registers. All configuration (thresholds, guard constants) is
/// captured by the step function itself, so registers only need to track
/// progress through the transition system.
pub type ScenarioState = Vec<i64>;

/// What a scenario declares at a synchronization point.
///
/// `requested` preserves declaration order because the event selection
/// tie-break depends on it; `blocked` and `waited_for` are plain sets.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SyncDeclaration {
    requested: Vec<EventName>,
    blocked: BTreeSet<EventName>,
    waited_for: BTreeSet<EventName>,
}

impl SyncDeclaration {
    /// Builds a declaration, de-duplicating requests while keeping their
    /// order. A declaration that requests and blocks the same event is
    /// rejected.
    pub fn new(
        requested: impl IntoIterator<Item = EventName>,
        blocked: impl IntoIterator<Item = EventName>,
        waited_for: impl IntoIterator<Item = EventName>,
    ) -> Result<Self, SbpError> {
        let blocked: BTreeSet<EventName> = blocked.into_iter().collect();
        let mut seen = BTreeSet::new();
        let mut ordered = Vec::new();
        for name in requested {
            if blocked.contains(&name) {
                return Err(SbpError::ConflictingDeclaration(name));
            }
            if seen.insert(name.clone()) {
                ordered.push(name);
            }
        }
        Ok(Self {
            requested: ordered,
            blocked,
            waited_for: waited_for.into_iter().collect(),
        })
    }

    /// Declaration that waits for the given events and blocks the given
    /// events, requesting nothing. This is the common shape for monitoring
    /// rules and cannot conflict.
    pub fn wait_block(
        waited_for: impl IntoIterator<Item = EventName>,
        blocked: impl IntoIterator<Item = EventName>,
    ) -> Self {
        Self {
            requested: Vec::new(),
            blocked: blocked.into_iter().collect(),
            waited_for: waited_for.into_iter().collect(),
        }
    }

    pub fn requested(&self) -> &[EventName] {
        &self.requested
    }

    pub fn blocked(&self) -> &BTreeSet<EventName> {
        &self.blocked
    }

    pub fn waited_for(&self) -> &BTreeSet<EventName> {
        &self.waited_for
    }

    pub fn blocks(&self, name: &EventName) -> bool {
        self.blocked.contains(name)
    }

    /// True when the scenario should be woken by this event.
    pub fn listens_to(&self, name: &EventName) -> bool {
        self.waited_for.contains(name) || self.requested.iter().any(|r| r == name)
    }
}

/// Outcome of one scenario transition.
pub type StepResult = Result<(ScenarioState, SyncDeclaration), String>;

type StepFn = dyn Fn(&ScenarioState, &Event) -> StepResult + Send + Sync;

/// An immutable scenario description: an id plus a deterministic transition
/// function `(state, event) -> (state', declaration)`.
///
/// The initial synchronization point is obtained by stepping from the empty
/// state with [`Event::init`]. Execution state lives in the owning
/// [`crate::SBProgram`], so one `Scenario` value can back many program
/// instances.
#[derive(Clone)]
pub struct Scenario {
    id: ScenarioId,
    step: Arc<StepFn>,
}

impl Scenario {
    pub fn from_fn<F>(id: impl Into<ScenarioId>, step: F) -> Self
    where
        F: Fn(&ScenarioState, &Event) -> StepResult + Send + Sync + 'static,
    {
        Self {
            id: id.into(),
            step: Arc::new(step),
        }
    }

    pub fn id(&self) -> &ScenarioId {
        &self.id
    }

    pub(crate) fn step(
        &self,
        state: &ScenarioState,
        event: &Event,
    ) -> Result<(ScenarioState, SyncDeclaration), SbpError> {
        (self.step)(state, event).map_err(|message| SbpError::ScenarioStep {
            scenario: self.id.clone(),
            event: event.name().clone(),
            message,
        })
    }
}

impl fmt::Debug for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scenario").field("id", &self.id).finish()
    }
}
