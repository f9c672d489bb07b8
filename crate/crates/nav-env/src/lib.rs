//! 2D mapless-navigation simulator.
//!
//! A disc robot moves through an axis-aligned arena using three discrete
//! actions (forward, turn left, turn right), senses seven lidar rays across
//! its frontal 180 degrees, and is rewarded for closing the distance to a
//! random target: `(dist_prev - dist) * reward_scale - step_penalty` per
//! step, +1 on reaching the target, -1 on collision.

mod env;
mod geometry;
mod world;

pub use env::{
    raycast_lidar, success_rate, Env, EnvConfig, NavAction, NormConstants, Observation, Outcome,
    RobotState, StepResult,
};
pub use geometry::{wrap_angle, Rect};
pub use world::{Obstacle, World};

use thiserror::Error;

/// Simulator errors.
#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid world: {0}")]
    InvalidWorld(String),
    #[error("world file error: {0}")]
    WorldFormat(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("could not place robot and target after bounded retries")]
    PlacementFailed,
    #[error("step called on a finished or unstarted episode")]
    EpisodeFinished,
    #[error("success rate of an empty window is undefined")]
    EmptyWindow,
}
