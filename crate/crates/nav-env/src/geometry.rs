//! Ray and swept-disc intersection primitives against axis-aligned
//! rectangles and circles. All rays use unit direction vectors; results are
//! distances along the ray.

/// Axis-aligned rectangle, `min <= max` on both axes.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl Rect {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Self {
        Self {
            xmin,
            ymin,
            xmax,
            ymax,
        }
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn is_valid(&self) -> bool {
        self.xmin < self.xmax && self.ymin < self.ymax
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.xmin && x <= self.xmax && y >= self.ymin && y <= self.ymax
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.xmin >= self.xmin
            && other.xmax <= self.xmax
            && other.ymin >= self.ymin
            && other.ymax <= self.ymax
    }

    /// Rectangle grown by `r` on every side.
    pub fn inflate(&self, r: f64) -> Rect {
        Rect::new(self.xmin - r, self.ymin - r, self.xmax + r, self.ymax + r)
    }

    /// Rectangle shrunk by `r` on every side.
    pub fn deflate(&self, r: f64) -> Rect {
        self.inflate(-r)
    }

    /// Euclidean distance from a point to this rectangle (0 inside).
    pub fn distance_to_point(&self, x: f64, y: f64) -> f64 {
        let dx = (self.xmin - x).max(0.0).max(x - self.xmax);
        let dy = (self.ymin - y).max(0.0).max(y - self.ymax);
        dx.hypot(dy)
    }
}

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = a.rem_euclid(two_pi);
    if r > std::f64::consts::PI {
        r - two_pi
    } else {
        r
    }
}

/// Distance along the ray `(px, py) + t (dx, dy)` at which it first enters
/// the rectangle, if any. A ray starting inside enters at `t = 0`.
pub fn ray_rect_entry(px: f64, py: f64, dx: f64, dy: f64, rect: &Rect) -> Option<f64> {
    let mut t_near = f64::NEG_INFINITY;
    let mut t_far = f64::INFINITY;
    for (p, d, lo, hi) in [
        (px, dx, rect.xmin, rect.xmax),
        (py, dy, rect.ymin, rect.ymax),
    ] {
        if d.abs() < 1e-15 {
            if p < lo || p > hi {
                return None;
            }
        } else {
            let (t1, t2) = ((lo - p) / d, (hi - p) / d);
            let (t1, t2) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            t_near = t_near.max(t1);
            t_far = t_far.min(t2);
        }
    }
    if t_near > t_far || t_far < 0.0 {
        None
    } else {
        Some(t_near.max(0.0))
    }
}

/// Distance along the ray at which it exits the rectangle, assuming the ray
/// starts inside. Returns `None` for degenerate directions.
pub fn ray_rect_exit(px: f64, py: f64, dx: f64, dy: f64, rect: &Rect) -> Option<f64> {
    let mut t_exit = f64::INFINITY;
    for (p, d, lo, hi) in [
        (px, dx, rect.xmin, rect.xmax),
        (py, dy, rect.ymin, rect.ymax),
    ] {
        if d.abs() < 1e-15 {
            continue;
        }
        let t = if d > 0.0 { (hi - p) / d } else { (lo - p) / d };
        t_exit = t_exit.min(t);
    }
    t_exit.is_finite().then_some(t_exit.max(0.0))
}

/// Distance along the ray at which it first touches the circle, if any.
pub fn ray_circle_entry(px: f64, py: f64, dx: f64, dy: f64, cx: f64, cy: f64, r: f64) -> Option<f64> {
    let ox = px - cx;
    let oy = py - cy;
    // |o + t d|^2 = r^2 with |d| = 1.
    let b = ox * dx + oy * dy;
    let c = ox * ox + oy * oy - r * r;
    if c <= 0.0 {
        return Some(0.0); // already inside
    }
    let disc = b * b - c;
    if disc < 0.0 {
        return None;
    }
    let t = -b - disc.sqrt();
    (t >= 0.0).then_some(t)
}

/// Earliest `t in [0, len]` at which a disc of radius `r`, swept from
/// `(px, py)` along the unit direction `(dx, dy)`, touches the rectangle.
///
/// The swept region test uses the exact Minkowski sum of the rectangle and
/// the disc: two fattened rectangles plus four corner circles.
pub fn swept_disc_rect(
    px: f64,
    py: f64,
    dx: f64,
    dy: f64,
    len: f64,
    r: f64,
    rect: &Rect,
) -> Option<f64> {
    let mut best: Option<f64> = None;
    let mut consider = |t: Option<f64>| {
        if let Some(t) = t {
            if t <= len && best.is_none_or(|b| t < b) {
                best = Some(t);
            }
        }
    };
    consider(ray_rect_entry(
        px,
        py,
        dx,
        dy,
        &Rect::new(rect.xmin - r, rect.ymin, rect.xmax + r, rect.ymax),
    ));
    consider(ray_rect_entry(
        px,
        py,
        dx,
        dy,
        &Rect::new(rect.xmin, rect.ymin - r, rect.xmax, rect.ymax + r),
    ));
    for (cx, cy) in [
        (rect.xmin, rect.ymin),
        (rect.xmin, rect.ymax),
        (rect.xmax, rect.ymin),
        (rect.xmax, rect.ymax),
    ] {
        consider(ray_circle_entry(px, py, dx, dy, cx, cy, r));
    }
    best
}

/// Earliest `t in [0, len]` at which a disc of radius `r` swept from
/// `(px, py)` touches the circle obstacle.
pub fn swept_disc_circle(
    px: f64,
    py: f64,
    dx: f64,
    dy: f64,
    len: f64,
    r: f64,
    cx: f64,
    cy: f64,
    cr: f64,
) -> Option<f64> {
    ray_circle_entry(px, py, dx, dy, cx, cy, cr + r).filter(|t| *t <= len)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_angle_stays_in_half_open_interval() {
        use std::f64::consts::PI;
        assert!((wrap_angle(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(-PI) - PI).abs() < 1e-12);
        assert!((wrap_angle(PI / 2.0) - PI / 2.0).abs() < 1e-12);
        for k in -10..10 {
            let a = 0.7 + f64::from(k) * 2.0 * PI;
            assert!((wrap_angle(a) - 0.7).abs() < 1e-9);
        }
    }

    #[test]
    fn ray_hits_rect_head_on() {
        let rect = Rect::new(2.0, -1.0, 3.0, 1.0);
        let t = ray_rect_entry(0.0, 0.0, 1.0, 0.0, &rect).unwrap();
        assert!((t - 2.0).abs() < 1e-12);
        assert!(ray_rect_entry(0.0, 5.0, 1.0, 0.0, &rect).is_none());
        assert!(ray_rect_entry(0.0, 0.0, -1.0, 0.0, &rect).is_none());
    }

    #[test]
    fn ray_exits_bounding_rect() {
        let rect = Rect::new(0.0, 0.0, 10.0, 10.0);
        let t = ray_rect_exit(5.0, 5.0, 1.0, 0.0, &rect).unwrap();
        assert!((t - 5.0).abs() < 1e-12);
        let d = std::f64::consts::FRAC_1_SQRT_2;
        let t = ray_rect_exit(5.0, 5.0, d, d, &rect).unwrap();
        assert!((t - 5.0 * std::f64::consts::SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn ray_hits_circle() {
        let t = ray_circle_entry(0.0, 0.0, 1.0, 0.0, 5.0, 0.0, 1.0).unwrap();
        assert!((t - 4.0).abs() < 1e-12);
        assert!(ray_circle_entry(0.0, 0.0, 1.0, 0.0, 5.0, 3.0, 1.0).is_none());
    }

    #[test]
    fn swept_disc_touches_rect_at_standoff_distance() {
        let rect = Rect::new(2.0, -1.0, 3.0, 1.0);
        let t = swept_disc_rect(0.0, 0.0, 1.0, 0.0, 10.0, 0.25, &rect).unwrap();
        assert!((t - 1.75).abs() < 1e-12);
        // Clipping the corner: path along y = 1.2 misses the fattened faces
        // but grazes the corner circle at (3, 1).
        let t = swept_disc_rect(0.0, 1.2, 1.0, 0.0, 10.0, 0.25, &rect).unwrap();
        let expected = 2.0 - (0.25f64.powi(2) - 0.2f64.powi(2)).sqrt();
        assert!((t - expected).abs() < 1e-9);
        // Far enough above, no contact.
        assert!(swept_disc_rect(0.0, 1.3, 1.0, 0.0, 10.0, 0.25, &rect).is_none());
    }

    #[test]
    fn swept_contact_time_is_independent_of_step_length() {
        let rect = Rect::new(2.0, -1.0, 3.0, 1.0);
        let short = swept_disc_rect(0.0, 0.3, 1.0, 0.0, 1.7, 0.25, &rect);
        assert!(short.is_none());
        let t2 = swept_disc_rect(0.0, 0.3, 1.0, 0.0, 2.0, 0.25, &rect).unwrap();
        let t3 = swept_disc_rect(0.0, 0.3, 1.0, 0.0, 5.0, 0.25, &rect).unwrap();
        assert_eq!(t2, t3);
    }
}
