use std::fmt;

/// Name of an event. Names are the identity of events; two events with the
/// same name are the same event regardless of payload.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventName(String);

impl EventName {
    pub fn new(name: impl Into<String>) -> Self {
        Self(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EventName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EventName {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

impl From<String> for EventName {
    fn from(s: String) -> Self {
        Self::new(s)
    }
}

/// A named occurrence, optionally carrying a vector of observations so that
/// scenarios can express data-dependent guards.
///
/// Equality and ordering consider the name only; the payload is deliberately
/// excluded so that blocking-by-name works no matter what data an event
/// carries.
#[derive(Debug, Clone)]
pub struct Event {
    name: EventName,
    payload: Option<Vec<f64>>,
}

impl Event {
    /// Distinguished name used to obtain a scenario's initial declaration.
    pub const INIT_NAME: &'static str = "@init";

    pub fn new(name: impl Into<EventName>) -> Self {
        Self {
            name: name.into(),
            payload: None,
        }
    }

    pub fn with_payload(name: impl Into<EventName>, payload: Vec<f64>) -> Self {
        Self {
            name: name.into(),
            payload: Some(payload),
        }
    }

    /// The distinguished init event delivered to every scenario when it is
    /// registered.
    pub fn init() -> Self {
        Self::new(Self::INIT_NAME)
    }

    pub fn name(&self) -> &EventName {
        &self.name
    }

    pub fn payload(&self) -> Option<&[f64]> {
        self.payload.as_deref()
    }

    pub fn is_init(&self) -> bool {
        self.name.as_str() == Self::INIT_NAME
    }
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl Eq for Event {}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name.as_str())
    }
}
