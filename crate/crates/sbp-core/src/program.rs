use std::collections::{BTreeMap, BTreeSet};

use crate::event::{Event, EventName};
use crate::scenario::{Scenario, ScenarioId, ScenarioState, SyncDeclaration};
use crate::SbpError;

/// Default cap on internal events fired during one super-step.
pub const DEFAULT_SUPERSTEP_CAP: usize = 1000;

/// Blocking verdict for the current synchronization points: event name to
/// the set of scenarios blocking it. Unblocked events are absent.
pub type BlockedMap = BTreeMap<EventName, BTreeSet<ScenarioId>>;

/// What happened when an external event was delivered.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    /// Scenarios whose declaration blocked the delivered event, captured
    /// before the event advanced anything.
    pub violated_rules: BTreeSet<ScenarioId>,
    /// Internal events fired during the super-step, in firing order.
    pub triggered_internal: Vec<Event>,
}

struct Slot {
    scenario: Scenario,
    state: ScenarioState,
    decl: SyncDeclaration,
}

/// An executable scenario-based program: registered scenarios, their current
/// synchronization points, and the set of externally triggerable events.
pub struct SBProgram {
    slots: Vec<Slot>,
    external: BTreeSet<EventName>,
    advance_on_block: bool,
    superstep_cap: usize,
}

impl SBProgram {
    /// Creates an empty program whose external events are `external`.
    pub fn new(external: impl IntoIterator<Item = EventName>) -> Self {
        Self {
            slots: Vec::new(),
            external: external.into_iter().collect(),
            advance_on_block: true,
            superstep_cap: DEFAULT_SUPERSTEP_CAP,
        }
    }

    /// Whether a blocked external event still advances scenario state
    /// (default true: the environment executed the action, so scenarios
    /// track what actually happened and the violation is only recorded).
    pub fn advance_on_block(mut self, advance: bool) -> Self {
        self.advance_on_block = advance;
        self
    }

    pub fn superstep_cap(mut self, cap: usize) -> Self {
        self.superstep_cap = cap;
        self
    }

    /// Registers a scenario and places it at its initial synchronization
    /// point by stepping it with the distinguished init event.
    pub fn register_scenario(&mut self, scenario: Scenario) -> Result<(), SbpError> {
        if self.slots.iter().any(|s| s.scenario.id() == scenario.id()) {
            return Err(SbpError::DuplicateScenario(scenario.id().clone()));
        }
        let (state, decl) = scenario.step(&ScenarioState::new(), &Event::init())?;
        self.slots.push(Slot {
            scenario,
            state,
            decl,
        });
        Ok(())
    }

    pub fn scenario_ids(&self) -> Vec<ScenarioId> {
        self.slots.iter().map(|s| s.scenario.id().clone()).collect()
    }

    pub fn is_external(&self, name: &EventName) -> bool {
        self.external.contains(name)
    }

    /// Selects the next internal event: the first requested event (scanning
    /// scenarios in registration order and requests in declaration order)
    /// that is blocked by no scenario and is not external.
    pub fn select_internal_event(&self) -> Option<Event> {
        for slot in &self.slots {
            for name in slot.decl.requested() {
                if self.external.contains(name) {
                    continue;
                }
                if !self.is_blocked(name) {
                    return Some(Event::new(name.clone()));
                }
            }
        }
        None
    }

    fn is_blocked(&self, name: &EventName) -> bool {
        self.slots.iter().any(|slot| slot.decl.blocks(name))
    }

    fn blockers_of(&self, name: &EventName) -> BTreeSet<ScenarioId> {
        self.slots
            .iter()
            .filter(|slot| slot.decl.blocks(name))
            .map(|slot| slot.scenario.id().clone())
            .collect()
    }

    /// Current blocking verdict across all synchronization points.
    pub fn blocked_events(&self) -> BlockedMap {
        let mut map = BlockedMap::new();
        for slot in &self.slots {
            for name in slot.decl.blocked() {
                map.entry(name.clone())
                    .or_default()
                    .insert(slot.scenario.id().clone());
            }
        }
        map
    }

    /// Runs internal events until quiescence. A freshly registered set of
    /// scenarios may request internal events before any external input;
    /// call this once after registration to reach the first steady state.
    pub fn start(&mut self) -> Result<Vec<Event>, SbpError> {
        self.run_superstep()
    }

    /// Delivers an external event and runs the ensuing super-step.
    ///
    /// The returned outcome lists the scenarios that blocked the event at
    /// the moment of delivery. With `advance_on_block` unset, a blocked
    /// event is recorded but not delivered.
    pub fn deliver_external(&mut self, event: &Event) -> Result<StepOutcome, SbpError> {
        if !self.external.contains(event.name()) {
            return Err(SbpError::UnknownExternalEvent(event.name().clone()));
        }
        if let Some(pending) = self.select_internal_event() {
            return Err(SbpError::NotSteady(pending.name().clone()));
        }
        let violated_rules = self.blockers_of(event.name());
        if !violated_rules.is_empty() && !self.advance_on_block {
            return Ok(StepOutcome {
                violated_rules,
                triggered_internal: Vec::new(),
            });
        }
        self.wake(event)?;
        let triggered_internal = self.run_superstep()?;
        Ok(StepOutcome {
            violated_rules,
            triggered_internal,
        })
    }

    /// Advances every scenario that requested or waited for the event.
    fn wake(&mut self, event: &Event) -> Result<(), SbpError> {
        for slot in &mut self.slots {
            if slot.decl.listens_to(event.name()) {
                let (state, decl) = slot.scenario.step(&slot.state, event)?;
                slot.state = state;
                slot.decl = decl;
            }
        }
        Ok(())
    }

    fn run_superstep(&mut self) -> Result<Vec<Event>, SbpError> {
        let mut fired = Vec::new();
        while let Some(event) = self.select_internal_event() {
            if fired.len() >= self.superstep_cap {
                let scenarios = self
                    .slots
                    .iter()
                    .filter(|slot| !slot.decl.requested().is_empty())
                    .map(|slot| slot.scenario.id().clone())
                    .collect();
                return Err(SbpError::SuperStepDiverged {
                    cap: self.superstep_cap,
                    scenarios,
                });
            }
            self.wake(&event)?;
            fired.push(event);
        }
        Ok(fired)
    }
}
