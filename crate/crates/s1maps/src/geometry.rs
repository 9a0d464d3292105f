//! Planar domains, the boundary-collapsed semi-metric d_Ω, and uniform grids.
//!
//! The semi-metric d_Ω(a,b) = min(|a−b|, d(a,∂Ω) + d(b,∂Ω)) treats the whole
//! boundary as a single point: two deep interior points are joined either by
//! the straight chord or by routing through the boundary. It is symmetric,
//! satisfies the triangle inequality, and vanishes exactly when a = b or both
//! arguments are the boundary token.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Positions that are far enough from the boundary to count as interior for
/// precondition checks (relative to the domain scale, which is O(1) here).
const GEOM_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point { x, y }
    }
}

/// An interior point or the collapsed-boundary token of d_Ω.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Location {
    Point(Point),
    Boundary,
}

impl Location {
    pub fn point(x: f64, y: f64) -> Self {
        Location::Point(Point::new(x, y))
    }
}

/// Planar region supporting membership and boundary-distance queries.
///
/// The dumbbell is three unit discs centered at (−3,0), (0,0), (3,0) joined
/// by the open strip x ∈ (−3,3), |y| < ε; corners are left unsmoothed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", content = "params", rename_all = "snake_case")]
pub enum Domain {
    Disc { center: Point, radius: f64 },
    Rectangle { x0: f64, x1: f64, y0: f64, y1: f64 },
    Polygon { vertices: Vec<Point> },
    Dumbbell { neck: f64 },
}

impl Domain {
    pub fn unit_disc() -> Self {
        Domain::Disc {
            center: Point::new(0.0, 0.0),
            radius: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Domain::Disc { radius, .. } => {
                if *radius > 0.0 {
                    Ok(())
                } else {
                    Err(Error::Parameter("disc radius must be positive".into()))
                }
            }
            Domain::Rectangle { x0, x1, y0, y1 } => {
                if x1 > x0 && y1 > y0 {
                    Ok(())
                } else {
                    Err(Error::Parameter("rectangle must have positive extent".into()))
                }
            }
            Domain::Polygon { vertices } => {
                if vertices.len() < 3 {
                    return Err(Error::Parameter("polygon needs at least 3 vertices".into()));
                }
                if signed_area(vertices) <= 0.0 {
                    return Err(Error::Parameter(
                        "polygon must be counterclockwise and non-degenerate".into(),
                    ));
                }
                Ok(())
            }
            Domain::Dumbbell { neck } => {
                if *neck > 0.0 && *neck < 0.25 {
                    Ok(())
                } else {
                    Err(Error::Parameter("dumbbell neck width must lie in (0, 1/4)".into()))
                }
            }
        }
    }

    /// Axis-aligned bounding box (x0, x1, y0, y1).
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match self {
            Domain::Disc { center, radius } => (
                center.x - radius,
                center.x + radius,
                center.y - radius,
                center.y + radius,
            ),
            Domain::Rectangle { x0, x1, y0, y1 } => (*x0, *x1, *y0, *y1),
            Domain::Polygon { vertices } => {
                let mut bb = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
                for v in vertices {
                    bb.0 = bb.0.min(v.x);
                    bb.1 = bb.1.max(v.x);
                    bb.2 = bb.2.min(v.y);
                    bb.3 = bb.3.max(v.y);
                }
                bb
            }
            Domain::Dumbbell { .. } => (-4.0, 4.0, -1.0, 1.0),
        }
    }

    /// True iff `p` lies in the open region.
    pub fn contains(&self, p: Point) -> bool {
        match self {
            Domain::Disc { center, radius } => p.dist(*center) < *radius,
            Domain::Rectangle { x0, x1, y0, y1 } => {
                p.x > *x0 && p.x < *x1 && p.y > *y0 && p.y < *y1
            }
            Domain::Polygon { vertices } => polygon_contains(vertices, p),
            Domain::Dumbbell { neck } => {
                let eps = *neck;
                Point::new(p.x + 3.0, p.y).dist(Point::new(0.0, 0.0)) < 1.0
                    || p.dist(Point::new(0.0, 0.0)) < 1.0
                    || Point::new(p.x - 3.0, p.y).dist(Point::new(0.0, 0.0)) < 1.0
                    || (p.x > -3.0 && p.x < 3.0 && p.y.abs() < eps)
            }
        }
    }

    /// Euclidean distance from `p` to ∂Ω; zero iff `p` is on the boundary.
    ///
    /// Errors when `p` lies outside the closure of the region.
    pub fn boundary_distance(&self, p: Point) -> Result<f64> {
        let d = self.boundary_set_distance(p);
        if !self.contains(p) && d > GEOM_EPS {
            return Err(Error::OutsideDomain(p.x, p.y));
        }
        Ok(if self.contains(p) { d } else { 0.0 })
    }

    /// Distance from `p` to the boundary *set*, valid on either side.
    fn boundary_set_distance(&self, p: Point) -> f64 {
        match self {
            Domain::Disc { center, radius } => (radius - p.dist(*center)).abs(),
            Domain::Rectangle { x0, x1, y0, y1 } => {
                if self.contains(p) {
                    (p.x - x0).min(x1 - p.x).min(p.y - y0).min(y1 - p.y)
                } else {
                    // distance to the rectangle boundary from outside
                    let cx = p.x.clamp(*x0, *x1);
                    let cy = p.y.clamp(*y0, *y1);
                    p.dist(Point::new(cx, cy))
                }
            }
            Domain::Polygon { vertices } => {
                let n = vertices.len();
                let mut d = f64::MAX;
                for i in 0..n {
                    d = d.min(segment_distance(p, vertices[i], vertices[(i + 1) % n]));
                }
                d
            }
            Domain::Dumbbell { neck } => {
                let mut d = f64::MAX;
                for piece in dumbbell_boundary(*neck) {
                    d = d.min(piece.distance(p));
                }
                d
            }
        }
    }

    /// The semi-metric d_Ω(a, b) with ∂Ω collapsed to a single point.
    ///
    /// Each argument must be an interior point or `Location::Boundary`. For
    /// non-convex shapes the chord term |a−b| is used verbatim even when the
    /// chord exits the region (see the crate README for when this matters).
    pub fn semi_metric(&self, a: Location, b: Location) -> Result<f64> {
        match (a, b) {
            (Location::Boundary, Location::Boundary) => Ok(0.0),
            (Location::Point(p), Location::Boundary) | (Location::Boundary, Location::Point(p)) => {
                self.boundary_distance(p)
            }
            (Location::Point(p), Location::Point(q)) => {
                let chord = p.dist(q);
                let via_boundary = self.boundary_distance(p)? + self.boundary_distance(q)?;
                Ok(chord.min(via_boundary))
            }
        }
    }

    /// Area of the region (exact for disc/rectangle/polygon, closed form for
    /// the unsmoothed dumbbell).
    pub fn area(&self) -> f64 {
        match self {
            Domain::Disc { radius, .. } => std::f64::consts::PI * radius * radius,
            Domain::Rectangle { x0, x1, y0, y1 } => (x1 - x0) * (y1 - y0),
            Domain::Polygon { vertices } => signed_area(vertices),
            Domain::Dumbbell { neck } => {
                // three discs + strip minus the six lens-shaped overlaps;
                // each disc-strip overlap is a symmetric circular segmentish
                // region: area of {|y|<ε} ∩ unit disc = 2ε·w + 2·asin stuff.
                let eps = *neck;
                let w = (1.0 - eps * eps).sqrt();
                let band = 2.0 * (eps * w + (eps).asin()) ; // area of unit disc ∩ {|y|<ε}
                // strip covers x∈(−3,3): full band of middle disc, half band
                // of each outer disc lies inside the strip's x-range.
                let strip = 6.0 * 2.0 * eps;
                3.0 * std::f64::consts::PI + strip - band - 2.0 * (band / 2.0)
            }
        }
    }
}

fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        s += a.x * b.y - b.x * a.y;
    }
    0.5 * s
}

/// Strict interior test by crossing number; points on an edge are exterior.
fn polygon_contains(vertices: &[Point], p: Point) -> bool {
    let n = vertices.len();
    for i in 0..n {
        if segment_distance(p, vertices[i], vertices[(i + 1) % n]) < GEOM_EPS {
            return false;
        }
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (vi, vj) = (vertices[i], vertices[j]);
        if (vi.y > p.y) != (vj.y > p.y) {
            let x_cross = vj.x + (p.y - vj.y) / (vi.y - vj.y) * (vi.x - vj.x);
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0);
    p.dist(Point::new(a.x + t * dx, a.y + t * dy))
}

/// A circular arc (center, radius 1, angle range) or a segment of the
/// dumbbell boundary.
enum BoundaryPiece {
    Arc { center: Point, a0: f64, a1: f64 },
    Segment { a: Point, b: Point },
}

impl BoundaryPiece {
    fn distance(&self, p: Point) -> f64 {
        match self {
            BoundaryPiece::Segment { a, b } => segment_distance(p, *a, *b),
            BoundaryPiece::Arc { center, a0, a1 } => {
                let v = Point::new(p.x - center.x, p.y - center.y);
                let r = v.x.hypot(v.y);
                let mut phi = v.y.atan2(v.x);
                // normalize into [a0, a0 + 2π)
                while phi < *a0 {
                    phi += 2.0 * std::f64::consts::PI;
                }
                if phi <= *a1 {
                    (r - 1.0).abs()
                } else {
                    let e0 = Point::new(center.x + a0.cos(), center.y + a0.sin());
                    let e1 = Point::new(center.x + a1.cos(), center.y + a1.sin());
                    p.dist(e0).min(p.dist(e1))
                }
            }
        }
    }
}

/// Boundary decomposition of the unsmoothed dumbbell: kept arcs of the three
/// unit circles plus the four exposed wall segments of the strip.
fn dumbbell_boundary(eps: f64) -> Vec<BoundaryPiece> {
    let s = eps.asin(); // half-angle of an arc hidden by the strip
    let w = (1.0 - eps * eps).sqrt();
    let pi = std::f64::consts::PI;
    let c_minus = Point::new(-3.0, 0.0);
    let c_mid = Point::new(0.0, 0.0);
    let c_plus = Point::new(3.0, 0.0);
    vec![
        // left disc: strip removes the small arc around angle 0
        BoundaryPiece::Arc { center: c_minus, a0: s, a1: 2.0 * pi - s },
        // right disc: strip removes the small arc around angle π
        BoundaryPiece::Arc { center: c_plus, a0: pi + s, a1: 3.0 * pi - s },
        // middle disc: arcs around 0 and π both removed
        BoundaryPiece::Arc { center: c_mid, a0: s, a1: pi - s },
        BoundaryPiece::Arc { center: c_mid, a0: pi + s, a1: 2.0 * pi - s },
        // strip walls between the discs
        BoundaryPiece::Segment { a: Point::new(-3.0 + w, eps), b: Point::new(-w, eps) },
        BoundaryPiece::Segment { a: Point::new(w, eps), b: Point::new(3.0 - w, eps) },
        BoundaryPiece::Segment { a: Point::new(-3.0 + w, -eps), b: Point::new(-w, -eps) },
        BoundaryPiece::Segment { a: Point::new(w, -eps), b: Point::new(3.0 - w, -eps) },
    ]
}

/// Uniform node lattice over a domain's bounding box.
///
/// Nodes sit at `origin + (i·h, j·h)`; a node is interior iff its point lies
/// in the open region (nodes exactly on the boundary are exterior).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub h: f64,
    pub origin: Point,
    pub nx: usize,
    pub ny: usize,
    mask: Vec<bool>,
}

impl Grid {
    /// Lattice anchored at the bounding-box corner.
    pub fn build(domain: &Domain, h: f64) -> Result<Grid> {
        Self::build_offset(domain, h, (0.0, 0.0))
    }

    /// Lattice shifted by `offset` from the bounding-box corner. The solvers
    /// and experiments use a half-spacing offset so that singular points at
    /// round coordinates land in cell centers instead of on nodes.
    pub fn build_offset(domain: &Domain, h: f64, offset: (f64, f64)) -> Result<Grid> {
        if h <= 0.0 {
            return Err(Error::Parameter("grid spacing must be positive".into()));
        }
        domain.validate()?;
        let (x0, x1, y0, y1) = domain.bounding_box();
        let origin = Point::new(x0 + offset.0, y0 + offset.1);
        let nx = ((x1 - origin.x) / h).floor() as usize + 1;
        let ny = ((y1 - origin.y) / h).floor() as usize + 1;
        let mut mask = vec![false; nx * ny];
        let mut any = false;
        for j in 0..ny {
            for i in 0..nx {
                let inside = domain.contains(Point::new(
                    origin.x + i as f64 * h,
                    origin.y + j as f64 * h,
                ));
                mask[j * nx + i] = inside;
                any |= inside;
            }
        }
        if !any {
            return Err(Error::Resolution(h));
        }
        Ok(Grid { h, origin, nx, ny, mask })
    }

    /// The default grid for field experiments: offset by half a spacing in x
    /// and a golden-ratio fraction in y, so singular points at round
    /// coordinates stay clear of nodes and no plaquette edge subtends an
    /// exact half-turn (where the principal branch is ambiguous).
    pub fn build_centered(domain: &Domain, h: f64) -> Result<Grid> {
        Self::build_offset(domain, h, (0.5 * h, 0.618_033_988_749_895 * h))
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        i < self.nx && j < self.ny && self.mask[self.idx(i, j)]
    }

    #[inline]
    pub fn node_point(&self, i: usize, j: usize) -> Point {
        Point::new(
            self.origin.x + i as f64 * self.h,
            self.origin.y + j as f64 * self.h,
        )
    }

    pub fn interior_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Discrete area h²·(number of interior nodes).
    pub fn interior_area(&self) -> f64 {
        self.h * self.h * self.interior_count() as f64
    }

    /// Row-major iteration over interior node indices.
    pub fn interior_nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let nx = self.nx;
        (0..self.nx * self.ny)
            .filter(move |k| self.mask[*k])
            .map(move |k| (k % nx, k / nx))
    }

    pub fn same_layout(&self, other: &Grid) -> bool {
        self.h == other.h && self.origin == other.origin && self.nx == other.nx && self.ny == other.ny
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn disc_membership() {
        let d = Domain::unit_disc();
        assert!(d.contains(Point::new(0.0, 0.0)));
        assert!(!d.contains(Point::new(1.0, 0.0))); // boundary excluded
        assert!(!d.contains(Point::new(1.2, 0.0)));
    }

    #[test]
    fn dumbbell_membership() {
        let d = Domain::Dumbbell { neck: 0.1 };
        assert!(d.contains(Point::new(0.0, 0.05))); // central disc
        assert!(d.contains(Point::new(1.5, 0.05))); // strip
        assert!(!d.contains(Point::new(1.5, 0.2))); // above the strip
        assert!(d.contains(Point::new(3.0, 0.5))); // right disc
        assert!(!d.contains(Point::new(4.1, 0.0)));
    }

    #[test]
    fn boundary_distances() {
        let d = Domain::unit_disc();
        assert!((d.boundary_distance(Point::new(0.0, 0.0)).unwrap() - 1.0).abs() < 1e-15);
        assert!((d.boundary_distance(Point::new(0.9, 0.0)).unwrap() - 0.1).abs() < 1e-12);
        let r = Domain::Rectangle { x0: 0.0, x1: 2.0, y0: 0.0, y1: 1.0 };
        assert!((r.boundary_distance(Point::new(0.5, 0.5)).unwrap() - 0.5).abs() < 1e-15);
        assert!(d.boundary_distance(Point::new(2.0, 0.0)).is_err());
    }

    #[test]
    fn dumbbell_boundary_distance_center() {
        // From the origin the nearest boundary is the central circle (the
        // strip walls start tangentially at distance exactly 1).
        let d = Domain::Dumbbell { neck: 0.1 };
        assert!((d.boundary_distance(Point::new(0.0, 0.0)).unwrap() - 1.0).abs() < 1e-12);
        // Inside the neck, the nearest boundary is the strip wall.
        let v = d.boundary_distance(Point::new(1.5, 0.0)).unwrap();
        assert!((v - 0.1).abs() < 1e-12, "neck distance {v}");
    }

    #[test]
    fn semi_metric_examples() {
        let d = Domain::unit_disc();
        let m = |a: (f64, f64), b: (f64, f64)| {
            d.semi_metric(Location::point(a.0, a.1), Location::point(b.0, b.1))
                .unwrap()
        };
        assert!((m((0.3, 0.0), (-0.3, 0.0)) - 0.6).abs() < 1e-15); // chord wins
        assert!((m((0.9, 0.0), (-0.9, 0.0)) - 0.2).abs() < 1e-12); // boundary route
        let to_bdry = d
            .semi_metric(Location::point(0.0, 0.0), Location::Boundary)
            .unwrap();
        assert!((to_bdry - 1.0).abs() < 1e-15);
    }

    #[test]
    fn semi_metric_scaling() {
        let d1 = Domain::unit_disc();
        let lambda = 3.7;
        let d2 = Domain::Disc { center: Point::new(0.0, 0.0), radius: lambda };
        let pairs = [((0.3, 0.1), (-0.5, 0.2)), ((0.9, 0.0), (-0.9, 0.0)), ((0.0, 0.0), (0.2, 0.7))];
        for (a, b) in pairs {
            let v1 = d1
                .semi_metric(Location::point(a.0, a.1), Location::point(b.0, b.1))
                .unwrap();
            let v2 = d2
                .semi_metric(
                    Location::point(lambda * a.0, lambda * a.1),
                    Location::point(lambda * b.0, lambda * b.1),
                )
                .unwrap();
            assert!((v2 - lambda * v1).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_counts() {
        // Lattice at spacing 1/2 anchored at (−1,−1): interior nodes of the
        // open unit disc are the 9 points with x² + y² < 1.
        let g = Grid::build(&Domain::unit_disc(), 0.5).unwrap();
        assert_eq!(g.interior_count(), 9);

        let r = Domain::Rectangle { x0: 0.0, x1: 1.0, y0: 0.0, y1: 1.0 };
        let g = Grid::build(&r, 0.25).unwrap();
        assert_eq!(g.interior_count(), 9); // 3×3 open interior

        assert!(matches!(
            Grid::build(&Domain::unit_disc(), 2.0),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn polygon_contains_and_distance() {
        let square = Domain::Polygon {
            vertices: vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.0, 1.0),
            ],
        };
        assert!(square.contains(Point::new(0.5, 0.5)));
        assert!(!square.contains(Point::new(0.5, 0.0)));
        assert!((square.boundary_distance(Point::new(0.5, 0.25)).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn dumbbell_area_close_to_monte_carlo() {
        let d = Domain::Dumbbell { neck: 0.1 };
        let (x0, x1, y0, y1) = d.bounding_box();
        let (mut hits, n) = (0u64, 400_000u64);
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rnd = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..n {
            let p = Point::new(x0 + (x1 - x0) * rnd(), y0 + (y1 - y0) * rnd());
            if d.contains(p) {
                hits += 1;
            }
        }
        let mc = hits as f64 / n as f64 * (x1 - x0) * (y1 - y0);
        assert!((d.area() - mc).abs() < 0.1, "area {} vs mc {}", d.area(), mc);

        assert!((Domain::unit_disc().area() - PI).abs() < 1e-15);
    }

    #[test]
    fn dumbbell_neck_range_checked() {
        assert!(Domain::Dumbbell { neck: 0.3 }.validate().is_err());
        assert!(Domain::Dumbbell { neck: 0.0 }.validate().is_err());
        assert!(Domain::Dumbbell { neck: 0.1 }.validate().is_ok());
    }
}
