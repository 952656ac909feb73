//! Computational domains and collocation point generation.
//!
//! A [`Domain`] is an interval, an axis-aligned rectangle optionally minus
//! disjoint circular holes, or a disk. Interior points come from a
//! cell-centered tensor grid over the bounding box filtered by membership;
//! boundary points are uniform in the parameter of each boundary segment.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RfmError};

/// A point in one or two dimensions. In 1D the second coordinate is zero.
pub type Point = [f64; 2];

/// Membership tolerance for boundary classification.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hole {
    pub center: Point,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Outline {
    Box,
    Disk { center: Point, radius: f64 },
}

/// Side of the bounding box. In 1D only `Left` and `Right` exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

/// Tag of a boundary segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Segment {
    Edge(Side),
    Hole(usize),
    Circle,
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Segment::Edge(side) => write!(f, "{} edge", format!("{side:?}").to_lowercase()),
            Segment::Hole(i) => write!(f, "hole {i}"),
            Segment::Circle => write!(f, "circle"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    Interior,
    Boundary,
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub point: Point,
    /// Unit normal pointing out of the domain.
    pub normal: Point,
    pub segment: Segment,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfacePoint {
    pub point: Point,
    /// Unit normal of the shared edge, pointing from `patches.0` to `patches.1`.
    pub normal: Point,
    pub patches: (usize, usize),
}

/// Interior, boundary and patch-interface collocation points.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CollocationSet {
    pub interior: Vec<Point>,
    pub boundary: Vec<BoundaryPoint>,
    pub interface: Vec<InterfacePoint>,
}

/// Per-segment boundary point counts. Box edges and the disk circle use
/// `per_edge`, holes use `per_hole`; 1D endpoints ignore both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryCounts {
    pub per_edge: usize,
    pub per_hole: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    dim: usize,
    lower: Point,
    upper: Point,
    outline: Outline,
    holes: Vec<Hole>,
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(RfmError::InvalidDomain(format!("interval [{a}, {b}]")));
        }
        Ok(Self {
            dim: 1,
            lower: [a, 0.0],
            upper: [b, 0.0],
            outline: Outline::Box,
            holes: Vec::new(),
        })
    }

    pub fn rectangle(lower: Point, upper: Point) -> Result<Self> {
        if !(0..2).all(|i| lower[i].is_finite() && upper[i].is_finite() && lower[i] < upper[i]) {
            return Err(RfmError::InvalidDomain(format!("rectangle {lower:?} x {upper:?}")));
        }
        Ok(Self {
            dim: 2,
            lower,
            upper,
            outline: Outline::Box,
            holes: Vec::new(),
        })
    }

    pub fn disk(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(RfmError::InvalidDomain(format!("disk radius {radius}")));
        }
        Ok(Self {
            dim: 2,
            lower: [center[0] - radius, center[1] - radius],
            upper: [center[0] + radius, center[1] + radius],
            outline: Outline::Disk { center, radius },
            holes: Vec::new(),
        })
    }

    /// Removes circular holes from a rectangle. Holes must lie strictly
    /// inside the box and must not overlap each other.
    pub fn with_holes(mut self, holes: Vec<Hole>) -> Result<Self> {
        if holes.is_empty() {
            return Ok(self);
        }
        if self.dim != 2 || self.outline != Outline::Box {
            return Err(RfmError::InvalidDomain("holes require a 2D rectangle".into()));
        }
        for (i, h) in holes.iter().enumerate() {
            if !(h.radius > 0.0 && h.radius.is_finite()) {
                return Err(RfmError::InvalidDomain(format!("hole {i} has radius {}", h.radius)));
            }
            for ax in 0..2 {
                if h.center[ax] - h.radius <= self.lower[ax] || h.center[ax] + h.radius >= self.upper[ax] {
                    return Err(RfmError::InvalidDomain(format!("hole {i} is not strictly inside the box")));
                }
            }
            for (j, g) in holes.iter().enumerate().take(i) {
                if distance(h.center, g.center) < h.radius + g.radius {
                    return Err(RfmError::InvalidDomain(format!("holes {j} and {i} overlap")));
                }
            }
        }
        self.holes = holes;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self) -> Point {
        self.lower
    }

    pub fn upper(&self) -> Point {
        self.upper
    }

    pub fn holes(&self) -> &[Hole] {
        &self.holes
    }

    pub fn is_disk(&self) -> bool {
        matches!(self.outline, Outline::Disk { .. })
    }

    /// Midpoint of the bounding box.
    pub fn midpoint(&self) -> Point {
        [
            0.5 * (self.lower[0] + self.upper[0]),
            0.5 * (self.lower[1] + self.upper[1]),
        ]
    }

    /// Half extents of the bounding box (zero in unused dimensions).
    pub fn half_extent(&self) -> Point {
        [
            0.5 * (self.upper[0] - self.lower[0]),
            0.5 * (self.upper[1] - self.lower[1]),
        ]
    }

    /// All boundary segment tags in canonical order.
    pub fn segments(&self) -> Vec<Segment> {
        let mut out = match (self.dim, self.outline) {
            (1, _) => vec![Segment::Edge(Side::Left), Segment::Edge(Side::Right)],
            (_, Outline::Disk { .. }) => vec![Segment::Circle],
            _ => vec![
                Segment::Edge(Side::Left),
                Segment::Edge(Side::Right),
                Segment::Edge(Side::Bottom),
                Segment::Edge(Side::Top),
            ],
        };
        out.extend((0..self.holes.len()).map(Segment::Hole));
        out
    }

    pub fn contains(&self, x: &Point) -> Membership {
        let tol = BOUNDARY_TOL;
        let outer = match self.outline {
            Outline::Disk { center, radius } => {
                let d = distance(*x, center);
                if d < radius - tol {
                    Membership::Interior
                } else if d <= radius + tol {
                    Membership::Boundary
                } else {
                    Membership::Exterior
                }
            }
            Outline::Box => {
                let mut state = Membership::Interior;
                for ax in 0..self.dim {
                    let (lo, hi) = (self.lower[ax], self.upper[ax]);
                    if x[ax] < lo - tol || x[ax] > hi + tol {
                        return Membership::Exterior;
                    }
                    if x[ax] <= lo + tol || x[ax] >= hi - tol {
                        state = Membership::Boundary;
                    }
                }
                state
            }
        };
        if outer == Membership::Exterior {
            return outer;
        }
        let mut state = outer;
        for h in &self.holes {
            let d = distance(*x, h.center);
            if d < h.radius - tol {
                return Membership::Exterior;
            }
            if d <= h.radius + tol {
                state = Membership::Boundary;
            }
        }
        state
    }

    /// Cell-centered tensor grid over the bounding box, lexicographic with
    /// the first axis outermost. No membership filtering.
    pub fn grid(&self, counts: &[usize]) -> Result<Vec<Point>> {
        if counts.len() != self.dim {
            return Err(RfmError::DimensionMismatch(format!(
                "grid counts {counts:?} for a {}D domain",
                self.dim
            )));
        }
        if counts.contains(&0) {
            return Err(RfmError::DegenerateSampling(format!("grid counts {counts:?}")));
        }
        let axis = |ax: usize| -> Vec<f64> { cell_centers(self.lower[ax], self.upper[ax], counts[ax]) };
        if self.dim == 1 {
            return Ok(axis(0).into_iter().map(|x| [x, 0.0]).collect());
        }
        let (xs, ys) = (axis(0), axis(1));
        let mut out = Vec::with_capacity(xs.len() * ys.len());
        for &x in &xs {
            for &y in &ys {
                out.push([x, y]);
            }
        }
        Ok(out)
    }

    /// Grid points of [`Domain::grid`] that lie strictly inside the domain.
    pub fn sample_interior(&self, counts: &[usize]) -> Result<Vec<Point>> {
        let pts: Vec<Point> = self
            .grid(counts)?
            .into_iter()
            .filter(|p| self.contains(p) == Membership::Interior)
            .collect();
        if pts.is_empty() {
            return Err(RfmError::DegenerateSampling(
                "no grid point falls inside the domain".into(),
            ));
        }
        Ok(pts)
    }

    pub fn sample_boundary(&self, counts: BoundaryCounts) -> Vec<BoundaryPoint> {
        let mut out = Vec::new();
        if self.dim == 1 {
            out.push(BoundaryPoint {
                point: [self.lower[0], 0.0],
                normal: [-1.0, 0.0],
                segment: Segment::Edge(Side::Left),
            });
            out.push(BoundaryPoint {
                point: [self.upper[0], 0.0],
                normal: [1.0, 0.0],
                segment: Segment::Edge(Side::Right),
            });
            return out;
        }
        match self.outline {
            Outline::Disk { center, radius } => {
                for theta in uniform_angles(counts.per_edge) {
                    let (s, c) = theta.sin_cos();
                    out.push(BoundaryPoint {
                        point: [center[0] + radius * c, center[1] + radius * s],
                        normal: [c, s],
                        segment: Segment::Circle,
                    });
                }
            }
            Outline::Box => {
                let [x0, y0] = self.lower;
                let [x1, y1] = self.upper;
                let ys = cell_centers(y0, y1, counts.per_edge);
                let xs = cell_centers(x0, x1, counts.per_edge);
                let edges: [(Side, Point); 4] = [
                    (Side::Left, [-1.0, 0.0]),
                    (Side::Right, [1.0, 0.0]),
                    (Side::Bottom, [0.0, -1.0]),
                    (Side::Top, [0.0, 1.0]),
                ];
                for (side, normal) in edges {
                    let pts: Vec<Point> = match side {
                        Side::Left => ys.iter().map(|&y| [x0, y]).collect(),
                        Side::Right => ys.iter().map(|&y| [x1, y]).collect(),
                        Side::Bottom => xs.iter().map(|&x| [x, y0]).collect(),
                        Side::Top => xs.iter().map(|&x| [x, y1]).collect(),
                    };
                    out.extend(pts.into_iter().map(|point| BoundaryPoint {
                        point,
                        normal,
                        segment: Segment::Edge(side),
                    }));
                }
            }
        }
        for (i, h) in self.holes.iter().enumerate() {
            for theta in uniform_angles(counts.per_hole) {
                let (s, c) = theta.sin_cos();
                let point = [h.center[0] + h.radius * c, h.center[1] + h.radius * s];
                // a hole boundary point swallowed by a neighbouring hole is not on ∂Ω
                if self.holes.iter().enumerate().any(|(j, g)| j != i && distance(point, g.center) < g.radius) {
                    continue;
                }
                out.push(BoundaryPoint {
                    point,
                    normal: [-c, -s],
                    segment: Segment::Hole(i),
                });
            }
        }
        out
    }
}

/// Non-overlapping tensor tiling of a bounding box into patch cells.
/// Patch `n` at cell `(i, j)` has index `n = i * counts[1] + j` in 2D.
#[derive(Debug, Clone, PartialEq)]
pub struct Tiling {
    pub dim: usize,
    pub lower: Point,
    pub upper: Point,
    pub counts: [usize; 2],
}

impl Tiling {
    pub fn new(domain: &Domain, counts: &[usize]) -> Result<Self> {
        if counts.len() != domain.dim() || counts.contains(&0) {
            return Err(RfmError::InvalidBasis(format!(
                "patch counts {counts:?} for a {}D domain",
                domain.dim()
            )));
        }
        let mut c = [1, 1];
        c[..counts.len()].copy_from_slice(counts);
        Ok(Self {
            dim: domain.dim(),
            lower: domain.lower(),
            upper: domain.upper(),
            counts: c,
        })
    }

    pub fn len(&self) -> usize {
        self.counts[0] * self.counts[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_width(&self, ax: usize) -> f64 {
        (self.upper[ax] - self.lower[ax]) / self.counts[ax] as f64
    }

    pub fn cell_of(&self, n: usize) -> [usize; 2] {
        [n / self.counts[1], n % self.counts[1]]
    }

    pub fn index(&self, cell: [usize; 2]) -> usize {
        cell[0] * self.counts[1] + cell[1]
    }

    pub fn center(&self, n: usize) -> Point {
        let cell = self.cell_of(n);
        let mut c = [0.0; 2];
        for ax in 0..self.dim {
            c[ax] = self.lower[ax] + (cell[ax] as f64 + 0.5) * self.cell_width(ax);
        }
        c
    }

    pub fn radius(&self) -> Point {
        let mut r = [1.0; 2];
        for (ax, ri) in r.iter_mut().enumerate().take(self.dim) {
            *ri = 0.5 * self.cell_width(ax);
        }
        r
    }

    /// The cell owning `x`: half-open cells `[lo, hi)` with the last cell
    /// closed, clamped so points on the outer boundary are always owned.
    pub fn owner(&self, x: &Point) -> usize {
        let mut cell = [0usize; 2];
        for ax in 0..self.dim {
            let t = ((x[ax] - self.lower[ax]) / self.cell_width(ax)).floor();
            cell[ax] = t.clamp(0.0, (self.counts[ax] - 1) as f64) as usize;
        }
        self.index(cell)
    }

    /// Interface points on shared patch edges, restricted to the domain
    /// interior. In 1D each interior patch boundary yields one point; in 2D
    /// each shared edge carries `per_edge` cell-centered points.
    pub fn sample_interface(&self, domain: &Domain, per_edge: usize) -> Vec<InterfacePoint> {
        let mut out = Vec::new();
        if self.dim == 1 {
            for i in 1..self.counts[0] {
                let x = self.lower[0] + i as f64 * self.cell_width(0);
                out.push(InterfacePoint {
                    point: [x, 0.0],
                    normal: [1.0, 0.0],
                    patches: (i - 1, i),
                });
            }
            return out;
        }
        let [nx, ny] = self.counts;
        let (wx, wy) = (self.cell_width(0), self.cell_width(1));
        // vertical edges x = const between cells (i-1, j) and (i, j)
        for i in 1..nx {
            let x = self.lower[0] + i as f64 * wx;
            for j in 0..ny {
                let y0 = self.lower[1] + j as f64 * wy;
                for y in cell_centers(y0, y0 + wy, per_edge) {
                    out.push(InterfacePoint {
                        point: [x, y],
                        normal: [1.0, 0.0],
                        patches: (self.index([i - 1, j]), self.index([i, j])),
                    });
                }
            }
        }
        // horizontal edges y = const between cells (i, j-1) and (i, j)
        for j in 1..ny {
            let y = self.lower[1] + j as f64 * wy;
            for i in 0..nx {
                let x0 = self.lower[0] + i as f64 * wx;
                for x in cell_centers(x0, x0 + wx, per_edge) {
                    out.push(InterfacePoint {
                        point: [x, y],
                        normal: [0.0, 1.0],
                        patches: (self.index([i, j - 1]), self.index([i, j])),
                    });
                }
            }
        }
        out.retain(|p| domain.contains(&p.point) == Membership::Interior);
        out
    }
}

/// Point `i` of `n` at `a + (i + 1/2) h`.
pub fn cell_centers(a: f64, b: f64, n: usize) -> Vec<f64> {
    let h = (b - a) / n as f64;
    (0..n).map(|i| a + (i as f64 + 0.5) * h).collect()
}

fn uniform_angles(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| 2.0 * PI * i as f64 / n as f64)
}

pub(crate) fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}
