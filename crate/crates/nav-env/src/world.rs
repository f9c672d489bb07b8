use serde::{Deserialize, Serialize};

use crate::geometry::Rect;
use crate::EnvError;

/// An obstacle in the arena.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Obstacle {
    Rect {
        xmin: f64,
        ymin: f64,
        xmax: f64,
        ymax: f64,
    },
    Circle {
        x: f64,
        y: f64,
        radius: f64,
    },
}

impl Obstacle {
    pub fn rect(r: Rect) -> Self {
        Obstacle::Rect {
            xmin: r.xmin,
            ymin: r.ymin,
            xmax: r.xmax,
            ymax: r.ymax,
        }
    }

    pub(crate) fn as_rect(&self) -> Option<Rect> {
        match *self {
            Obstacle::Rect {
                xmin,
                ymin,
                xmax,
                ymax,
            } => Some(Rect::new(xmin, ymin, xmax, ymax)),
            Obstacle::Circle { .. } => None,
        }
    }

    /// Euclidean distance from a point to the obstacle boundary-or-interior
    /// (0 inside).
    pub fn distance_to_point(&self, px: f64, py: f64) -> f64 {
        match *self {
            Obstacle::Rect {
                xmin,
                ymin,
                xmax,
                ymax,
            } => Rect::new(xmin, ymin, xmax, ymax).distance_to_point(px, py),
            Obstacle::Circle { x, y, radius } => ((px - x).hypot(py - y) - radius).max(0.0),
        }
    }
}

/// Arena description: bounds, obstacles, and a default seed carried along so
/// a world file pins its own reproducibility anchor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct World {
    pub bounds: Rect,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    #[serde(default)]
    pub rng_seed: u64,
}

impl World {
    /// Obstacle-free 6 m x 6 m arena.
    pub fn empty() -> Self {
        Self {
            bounds: Rect::new(0.0, 0.0, 6.0, 6.0),
            obstacles: Vec::new(),
            rng_seed: 0,
        }
    }

    /// 6 m x 6 m arena with four 1 m square blocks in a 2 x 2 pattern.
    pub fn four_block() -> Self {
        let block = |cx: f64, cy: f64| Obstacle::Rect {
            xmin: cx - 0.5,
            ymin: cy - 0.5,
            xmax: cx + 0.5,
            ymax: cy + 0.5,
        };
        Self {
            bounds: Rect::new(0.0, 0.0, 6.0, 6.0),
            obstacles: vec![
                block(1.75, 1.75),
                block(4.25, 1.75),
                block(1.75, 4.25),
                block(4.25, 4.25),
            ],
            rng_seed: 0,
        }
    }

    /// 6 m x 6 m arena with two staggered walls forming an S-shaped passage.
    pub fn corridor() -> Self {
        Self {
            bounds: Rect::new(0.0, 0.0, 6.0, 6.0),
            obstacles: vec![
                Obstacle::Rect {
                    xmin: 0.0,
                    ymin: 2.0,
                    xmax: 4.5,
                    ymax: 2.3,
                },
                Obstacle::Rect {
                    xmin: 1.5,
                    ymin: 3.7,
                    xmax: 6.0,
                    ymax: 4.0,
                },
            ],
            rng_seed: 0,
        }
    }

    /// Looks up one of the built-in arenas by name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "empty" => Some(Self::empty()),
            "four_block" => Some(Self::four_block()),
            "corridor" => Some(Self::corridor()),
            _ => None,
        }
    }

    /// Names accepted by [`World::builtin`].
    pub const BUILTIN_NAMES: [&'static str; 3] = ["empty", "four_block", "corridor"];

    /// Parses a world description from TOML text.
    pub fn from_toml_str(text: &str) -> Result<Self, EnvError> {
        toml::from_str(text).map_err(|e| EnvError::WorldFormat(e.to_string()))
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, EnvError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| EnvError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("world serializes")
    }

    /// Minimum clearance from a point to any obstacle or wall.
    pub fn clearance(&self, x: f64, y: f64) -> f64 {
        let mut c = (x - self.bounds.xmin)
            .min(self.bounds.xmax - x)
            .min(y - self.bounds.ymin)
            .min(self.bounds.ymax - y);
        for ob in &self.obstacles {
            c = c.min(ob.distance_to_point(x, y));
        }
        c
    }

    pub fn diagonal(&self) -> f64 {
        self.bounds.width().hypot(self.bounds.height())
    }

    /// Validates geometry: bounds well-formed, obstacles inside bounds, and
    /// the space reachable by a disc of radius `clearance_radius` connected
    /// (checked by flood fill on a grid at half-radius resolution).
    pub fn validate(&self, clearance_radius: f64) -> Result<(), EnvError> {
        if !self.bounds.is_valid() {
            return Err(EnvError::InvalidWorld("bounds are empty".into()));
        }
        for (i, ob) in self.obstacles.iter().enumerate() {
            let inside = match *ob {
                Obstacle::Rect {
                    xmin,
                    ymin,
                    xmax,
                    ymax,
                } => {
                    let r = Rect::new(xmin, ymin, xmax, ymax);
                    r.is_valid() && self.bounds.contains_rect(&r)
                }
                Obstacle::Circle { x, y, radius } => {
                    radius > 0.0
                        && self
                            .bounds
                            .contains_rect(&Rect::new(x - radius, y - radius, x + radius, y + radius))
                }
            };
            if !inside {
                return Err(EnvError::InvalidWorld(format!(
                    "obstacle {i} is degenerate or extends outside the bounds"
                )));
            }
        }
        self.check_connectivity(clearance_radius)
    }

    fn check_connectivity(&self, clearance_radius: f64) -> Result<(), EnvError> {
        let res = (clearance_radius / 2.0).max(1e-3);
        let nx = (self.bounds.width() / res).ceil() as usize;
        let ny = (self.bounds.height() / res).ceil() as usize;
        let center = |i: usize, j: usize| {
            (
                self.bounds.xmin + (i as f64 + 0.5) * res,
                self.bounds.ymin + (j as f64 + 0.5) * res,
            )
        };
        let mut free = vec![false; nx * ny];
        let mut first = None;
        for j in 0..ny {
            for i in 0..nx {
                let (x, y) = center(i, j);
                if self.clearance(x, y) >= clearance_radius {
                    free[j * nx + i] = true;
                    first.get_or_insert((i, j));
                }
            }
        }
        let Some(start) = first else {
            return Err(EnvError::InvalidWorld(
                "no free space at the required clearance".into(),
            ));
        };
        let mut seen = vec![false; nx * ny];
        let mut queue = std::collections::VecDeque::from([start]);
        seen[start.1 * nx + start.0] = true;
        let mut reached = 0usize;
        while let Some((i, j)) = queue.pop_front() {
            reached += 1;
            let neighbors = [
                (i.wrapping_sub(1), j),
                (i + 1, j),
                (i, j.wrapping_sub(1)),
                (i, j + 1),
            ];
            for (ni, nj) in neighbors {
                if ni < nx && nj < ny && free[nj * nx + ni] && !seen[nj * nx + ni] {
                    seen[nj * nx + ni] = true;
                    queue.push_back((ni, nj));
                }
            }
        }
        let total = free.iter().filter(|f| **f).count();
        if reached != total {
            return Err(EnvError::InvalidWorld(format!(
                "free space is disconnected ({reached} of {total} cells reachable)"
            )));
        }
        Ok(())
    }
}
