//! Builders for common post arrangements.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Post;

/// Radius, height and gap shared by every post of a generated layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PostTemplate {
    pub radius: f64,
    pub height: f64,
    pub gap: f64,
}

impl PostTemplate {
    pub fn at(&self, id: u32, x: f64, y: f64) -> Post {
        Post::new(id, x, y, self.radius, self.height, self.gap)
    }
}

impl Default for PostTemplate {
    /// 1 mm radius, 5 mm height, 10 μm gap.
    fn default() -> Self {
        Self { radius: 1e-3, height: 5e-3, gap: 10e-6 }
    }
}

/// Regular polygon with the given side length, ids in counter-clockwise order.
pub fn regular_polygon(n: usize, side: f64, t: PostTemplate) -> Vec<Post> {
    if n == 1 {
        return vec![t.at(0, 0.0, 0.0)];
    }
    let r = side / (2.0 * (PI / n as f64).sin());
    (0..n)
        .map(|i| {
            let a = 2.0 * PI * i as f64 / n as f64;
            t.at(i as u32, r * a.cos(), r * a.sin())
        })
        .collect()
}

/// Straight line along x.
pub fn line(n: usize, spacing: f64, t: PostTemplate) -> Vec<Post> {
    (0..n).map(|i| t.at(i as u32, i as f64 * spacing, 0.0)).collect()
}

/// Rectangle with sides `short` (along y) and `long` (along x), listed
/// cyclically starting along the short side.
pub fn rectangle(short: f64, long: f64, t: PostTemplate) -> Vec<Post> {
    vec![t.at(0, 0.0, 0.0), t.at(1, 0.0, short), t.at(2, long, short), t.at(3, long, 0.0)]
}

/// `cells` copies of `cell` repeated along x every `period`, ids renumbered
/// cell by cell.
pub fn repeat_x(cell: &[Post], cells: usize, period: f64) -> Vec<Post> {
    let mut out = Vec::with_capacity(cell.len() * cells);
    for c in 0..cells {
        for p in cell {
            let mut q = p.clone();
            q.id = out.len() as u32;
            q.x += c as f64 * period;
            out.push(q);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_side_length() {
        let p = regular_polygon(5, 4e-3, PostTemplate::default());
        for i in 0..5 {
            assert!((p[i].distance(&p[(i + 1) % 5]) - 4e-3).abs() < 1e-15);
        }
    }

    #[test]
    fn repeated_cells_get_fresh_ids() {
        let cell = rectangle(1.0, 2.0, PostTemplate::default());
        let chain = repeat_x(&cell, 3, 5.0);
        assert_eq!(chain.len(), 12);
        assert_eq!(chain[11].id, 11);
        assert_eq!(chain[6].x, 7.0);
    }
}
