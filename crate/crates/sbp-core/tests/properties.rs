//! Randomized checks of the event-selection and super-step semantics.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbp_core::{Event, EventName, SBProgram, Scenario, SyncDeclaration};

const ALPHABET: [&str; 6] = ["a", "b", "c", "d", "e", "f"];
const EXTERNALS: [&str; 2] = ["x0", "x1"];

fn random_subset(rng: &mut ChaCha8Rng, names: &[&str], p: f64) -> Vec<EventName> {
    names
        .iter()
        .filter(|_| rng.gen_bool(p))
        .map(|n| EventName::new(*n))
        .collect()
}

fn random_declaration(rng: &mut ChaCha8Rng) -> SyncDeclaration {
    let blocked: BTreeSet<EventName> = random_subset(rng, &ALPHABET, 0.25).into_iter().collect();
    let requested: Vec<EventName> = random_subset(rng, &ALPHABET, 0.25)
        .into_iter()
        .chain(random_subset(rng, &EXTERNALS, 0.2))
        .filter(|n| !blocked.contains(n))
        .collect();
    let waited: Vec<EventName> = random_subset(rng, &ALPHABET, 0.3)
        .into_iter()
        .chain(random_subset(rng, &EXTERNALS, 0.7))
        .collect();
    SyncDeclaration::new(requested, blocked, waited).expect("disjoint by construction")
}

/// A table-driven scenario over a small number of local states. Every event
/// (internal or external) advances the state counter; the declaration is a
/// pure function of the state, drawn once from `rng`. Returns the scenario
/// together with its declaration table so tests can act as an oracle.
fn random_scenario(rng: &mut ChaCha8Rng, id: usize) -> (Scenario, Vec<SyncDeclaration>) {
    let n_states = rng.gen_range(1..4usize);
    let decls: Vec<SyncDeclaration> = (0..n_states).map(|_| random_declaration(rng)).collect();
    let table = decls.clone();
    let scenario = Scenario::from_fn(format!("s{id}"), move |state, event| {
        let step = state.first().copied().unwrap_or(0) + i64::from(!event.is_init());
        let decl = table[(step as usize) % table.len()].clone();
        Ok((vec![step], decl))
    });
    (scenario, decls)
}

/// Builds a random program and returns the initial declaration per scenario.
fn random_program(rng: &mut ChaCha8Rng) -> (SBProgram, Vec<SyncDeclaration>) {
    let mut program = SBProgram::new(EXTERNALS.map(EventName::new)).superstep_cap(200);
    let mut initial = Vec::new();
    let n = rng.gen_range(1..6usize);
    for id in 0..n {
        let (scenario, decls) = random_scenario(rng, id);
        program.register_scenario(scenario).expect("fresh ids");
        initial.push(decls[0].clone());
    }
    (program, initial)
}

/// Brute-force oracle: the first event, scanning scenarios in registration
/// order and requests in declaration order, that is internal and blocked by
/// no declaration.
fn expected_selection(decls: &[SyncDeclaration]) -> Option<EventName> {
    let blocked: BTreeSet<&EventName> = decls.iter().flat_map(|d| d.blocked().iter()).collect();
    for decl in decls {
        for name in decl.requested() {
            if EXTERNALS.contains(&name.as_str()) {
                continue;
            }
            if !blocked.contains(name) {
                return Some(name.clone());
            }
        }
    }
    None
}

#[test]
fn selection_matches_brute_force_and_never_fires_blocked_events() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5e1ec7);
    for _ in 0..10_000 {
        let (program, decls) = random_program(&mut rng);
        let selected = program.select_internal_event().map(|e| e.name().clone());
        assert_eq!(selected, expected_selection(&decls));
        if let Some(name) = &selected {
            assert!(!program.blocked_events().contains_key(name));
            assert!(!program.is_external(name));
        }
    }
}

#[test]
fn superstep_outcomes_are_deterministic_under_replay() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xdecaf);
    for case in 0..300 {
        let mut build_rng = ChaCha8Rng::seed_from_u64(case);
        let (mut a, _) = random_program(&mut build_rng);
        let mut build_rng = ChaCha8Rng::seed_from_u64(case);
        let (mut b, _) = random_program(&mut build_rng);

        if a.start().is_err() {
            continue; // diverging program; divergence itself is deterministic
        }
        b.start().unwrap();

        for _ in 0..20 {
            let name = EXTERNALS[rng.gen_range(0..EXTERNALS.len())];
            let event = Event::with_payload(name, vec![rng.gen(), rng.gen()]);
            let ra = a.deliver_external(&event);
            let rb = b.deliver_external(&event);
            match (ra, rb) {
                (Ok(oa), Ok(ob)) => assert_eq!(oa, ob),
                (Err(ea), Err(eb)) => assert_eq!(ea.to_string(), eb.to_string()),
                (ra, rb) => panic!("replay diverged: {ra:?} vs {rb:?}"),
            }
        }
    }
}

#[test]
fn violated_rules_reflect_pre_delivery_blockers_only() {
    // A scenario that blocks `x0` only at its initial state: the first
    // delivery is a violation, the second is not (state advanced past the
    // blocking point), even though both deliveries advance it.
    let scenario = Scenario::from_fn("gatekeeper", |state, event| {
        let step = state.first().copied().unwrap_or(0) + i64::from(!event.is_init());
        let blocked = if step == 0 {
            vec![EventName::new("x0")]
        } else {
            Vec::new()
        };
        Ok((
            vec![step],
            SyncDeclaration::wait_block([EventName::new("x0")], blocked),
        ))
    });
    let mut program = SBProgram::new([EventName::new("x0")]);
    program.register_scenario(scenario).unwrap();
    let first = program.deliver_external(&Event::new("x0")).unwrap();
    assert_eq!(first.violated_rules.len(), 1);
    let second = program.deliver_external(&Event::new("x0")).unwrap();
    assert!(second.violated_rules.is_empty());
}
