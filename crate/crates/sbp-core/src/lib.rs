//! A small scenario-based programming (SBP) runtime.
//!
//! A program is a set of *scenarios*. Each scenario is a transition system
//! over synchronization points: at every point it declares the events it
//! *requests*, *blocks*, and passively *waits for*, then suspends. An event
//! selection mechanism triggers an event that is requested by at least one
//! scenario and blocked by none; scenarios that requested or waited for the
//! triggered event advance to their next synchronization point.
//!
//! *External* events can only be injected from outside the program (here:
//! the agent's chosen action). Delivering one kicks off a *super-step*: the
//! cascade of internal events fired until no requested event is unblocked.
//! The [`StepOutcome`] of a delivery records which scenarios had blocked the
//! delivered event at the moment it arrived, which is the per-rule violation
//! signal consumed by the training loop.

mod event;
mod program;
mod scenario;

pub use event::{Event, EventName};
pub use program::{BlockedMap, SBProgram, StepOutcome};
pub use scenario::{Scenario, ScenarioId, ScenarioState, SyncDeclaration};

use thiserror::Error;

/// Errors surfaced by the SBP runtime.
#[derive(Debug, Error)]
pub enum SbpError {
    /// A scenario with the same id is already registered.
    #[error("scenario `{0}` is already registered")]
    DuplicateScenario(ScenarioId),
    /// The delivered event name is not declared external.
    #[error("event `{0}` is not a registered external event")]
    UnknownExternalEvent(EventName),
    /// `deliver_external` was called while an internal event was still
    /// pending selection.
    #[error("program is not at a steady state (internal event `{0}` is pending)")]
    NotSteady(EventName),
    /// The super-step did not quiesce within the iteration cap.
    #[error("super-step exceeded {cap} internal events; requesting scenarios: {scenarios:?}")]
    SuperStepDiverged {
        /// Iteration cap that was hit.
        cap: usize,
        /// Ids of the scenarios whose requests were still firing.
        scenarios: Vec<ScenarioId>,
    },
    /// A scenario rejected an event or its payload.
    #[error("scenario `{scenario}` failed on event `{event}`: {message}")]
    ScenarioStep {
        /// Id of the failing scenario.
        scenario: ScenarioId,
        /// Name of the event being delivered.
        event: EventName,
        /// Scenario-provided description of the failure.
        message: String,
    },
    /// A declaration requested and blocked the same event.
    #[error("declaration requests and blocks `{0}`")]
    ConflictingDeclaration(EventName),
}
