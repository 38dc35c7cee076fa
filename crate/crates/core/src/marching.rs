//! Marching squares for plane curves `{g = 0}` inside a square box.

use std::collections::{HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

pub const MIN_GRID: usize = 16;
const EDGE_BISECTIONS: u32 = 60;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarchError {
    #[error("grid resolution {0} is below {MIN_GRID}")]
    GridTooCoarse(usize),
    #[error("box half-width must be positive, got {0}")]
    BadBox(f64),
    #[error("a grid node lies exactly on the curve even after offsetting the grid")]
    GridDegenerate,
    #[error("a component touches the boundary of the box of half-width {0}")]
    BoxTooSmall(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

impl Polyline {
    pub fn length(&self) -> f64 {
        let mut l: f64 = self.points.windows(2).map(|p| dist(p[0], p[1])).sum();
        if self.closed && self.points.len() > 1 {
            l += dist(self.points[self.points.len() - 1], self.points[0]);
        }
        l
    }

    /// `k` points spaced evenly by arc length.
    pub fn spread(&self, k: usize) -> Vec<[f64; 2]> {
        let n = self.points.len();
        if n == 0 || k == 0 {
            return Vec::new();
        }
        let total = self.length();
        if total == 0.0 {
            return vec![self.points[0]; 1];
        }
        let step = if self.closed {
            total / k as f64
        } else {
            total / (k.max(2) - 1) as f64
        };
        let segments: Vec<([f64; 2], [f64; 2])> = self
            .points
            .windows(2)
            .map(|p| (p[0], p[1]))
            .chain(self.closed.then(|| (self.points[n - 1], self.points[0])))
            .collect();
        let mut out = Vec::with_capacity(k);
        let mut target = 0.0;
        let mut walked = 0.0;
        for (a, b) in segments {
            let len = dist(a, b);
            while out.len() < k && target <= walked + len {
                let s = if len == 0.0 { 0.0 } else { (target - walked) / len };
                out.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
                target += step;
            }
            walked += len;
        }
        if out.len() < k && !self.closed {
            out.push(self.points[n - 1]);
        }
        out
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Zero set of `g` on an `m` x `m` grid over `[-b, b]^2`, one polyline per connected
/// component, ordered by their first grid edge.
pub fn march(g: impl Fn(f64, f64) -> f64, b: f64, m: usize) -> Result<Vec<Polyline>, MarchError> {
    if m < MIN_GRID {
        return Err(MarchError::GridTooCoarse(m));
    }
    if !(b > 0.0 && b.is_finite()) {
        return Err(MarchError::BadBox(b));
    }
    let h = 2.0 * b / m as f64;
    for offset in [0.0, h / 3.0] {
        let grid = Grid::sample(&g, b, m, offset);
        if grid.values.iter().all(|&v| v != 0.0) {
            return grid.trace(&g);
        }
    }
    Err(MarchError::GridDegenerate)
}

struct Grid {
    m: usize,
    b: f64,
    origin: f64,
    h: f64,
    values: Vec<f64>,
}

/// A grid edge: `(i, j, vertical)` joins node `(i, j)` to `(i+1, j)` or `(i, j+1)`.
type EdgeId = (usize, usize, bool);

impl Grid {
    fn sample(g: &impl Fn(f64, f64) -> f64, b: f64, m: usize, offset: f64) -> Grid {
        let h = 2.0 * b / m as f64;
        let origin = -b + offset;
        let mut values = Vec::with_capacity((m + 1) * (m + 1));
        for j in 0..=m {
            for i in 0..=m {
                values.push(g(origin + i as f64 * h, origin + j as f64 * h));
            }
        }
        Grid {
            m,
            b,
            origin,
            h,
            values,
        }
    }

    fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * (self.m + 1) + i]
    }

    fn node(&self, i: usize, j: usize) -> [f64; 2] {
        [self.origin + i as f64 * self.h, self.origin + j as f64 * self.h]
    }

    fn crosses(&self, (i, j, vertical): EdgeId) -> bool {
        let (i2, j2) = if vertical { (i, j + 1) } else { (i + 1, j) };
        (self.value(i, j) > 0.0) != (self.value(i2, j2) > 0.0)
    }

    fn on_boundary(&self, (i, j, vertical): EdgeId) -> bool {
        if vertical {
            i == 0 || i == self.m
        } else {
            j == 0 || j == self.m
        }
    }

    /// Crossing point on an edge, refined by bisection.
    fn crossing(&self, g: &impl Fn(f64, f64) -> f64, (i, j, vertical): EdgeId) -> [f64; 2] {
        let (i2, j2) = if vertical { (i, j + 1) } else { (i + 1, j) };
        let (mut a, mut b) = (self.node(i, j), self.node(i2, j2));
        let positive_at_a = self.value(i, j) > 0.0;
        for _ in 0..EDGE_BISECTIONS {
            let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
            let v = g(mid[0], mid[1]);
            if v == 0.0 {
                return mid;
            }
            if (v > 0.0) == positive_at_a {
                a = mid;
            } else {
                b = mid;
            }
        }
        [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0]
    }

    fn trace(&self, g: &impl Fn(f64, f64) -> f64) -> Result<Vec<Polyline>, MarchError> {
        let m = self.m;
        let mut links: HashMap<EdgeId, Vec<EdgeId>> = HashMap::new();
        let mut link = |a: EdgeId, b: EdgeId| {
            links.entry(a).or_default().push(b);
            links.entry(b).or_default().push(a);
        };
        for j in 0..m {
            for i in 0..m {
                let bottom = (i, j, false);
                let right = (i + 1, j, true);
                let top = (i, j + 1, false);
                let left = (i, j, true);
                let hits: Vec<EdgeId> = [bottom, right, top, left]
                    .into_iter()
                    .filter(|&e| self.crosses(e))
                    .collect();
                match hits.len() {
                    0 => {}
                    2 => link(hits[0], hits[1]),
                    4 => {
                        let center = g(self.origin + (i as f64 + 0.5) * self.h, self.origin + (j as f64 + 0.5) * self.h);
                        if (center > 0.0) == (self.value(i, j) > 0.0) {
                            link(bottom, right);
                            link(top, left);
                        } else {
                            link(bottom, left);
                            link(top, right);
                        }
                    }
                    _ => unreachable!("a cell has an even number of sign changes"),
                }
            }
        }

        let mut starts: Vec<EdgeId> = links.keys().copied().collect();
        // Open chains are walked from an end; cycles from their smallest edge.
        starts.sort_by_key(|e| (links[e].len() != 1, (e.1, e.0, e.2)));
        let mut seen: HashSet<EdgeId> = HashSet::new();
        let mut components = Vec::new();
        for start in starts {
            if seen.contains(&start) {
                continue;
            }
            let mut chain = vec![start];
            seen.insert(start);
            let mut current = start;
            loop {
                let next = links[&current]
                    .iter()
                    .copied()
                    .find(|n| !seen.contains(n));
                match next {
                    Some(n) => {
                        seen.insert(n);
                        chain.push(n);
                        current = n;
                    }
                    None => break,
                }
            }
            let is_cycle = links[&start].len() == 2 && links[&current].contains(&start) && chain.len() > 2;
            if chain.iter().any(|&e| self.on_boundary(e)) {
                return Err(MarchError::BoxTooSmall(self.b));
            }
            let points: Vec<[f64; 2]> = chain.iter().map(|&e| self.crossing(g, e)).collect();
            let diagonal = self.h * std::f64::consts::SQRT_2;
            let closed = is_cycle || (points.len() > 2 && dist(points[0], points[points.len() - 1]) <= diagonal);
            components.push(Polyline { points, closed });
        }
        Ok(components)
    }
}
