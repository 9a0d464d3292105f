//! Minimal connections: boundary-augmented signed multisets, minimum-cost
//! matching under d_Ω, and the Kantorovich dual certificate.
//!
//! For a configuration (a⃗, d⃗) of singular points with integer degrees, the
//! connection length L(a⃗, d⃗) is the cheapest pairing of positive to
//! negative copies (the boundary absorbs the surplus D = −Σdⱼ), and the
//! singular energy is Σ = 2πL. Strong duality provides a certificate: a
//! 1-Lipschitz potential ζ for d_Ω with Σⱼ(ζ(Pⱼ) − ζ(Nⱼ)) equal to the
//! matching cost.

use serde::{Deserialize, Serialize};

use crate::geometry::{Domain, Location, Point};
use crate::{Error, Result};

/// Finite list of singular points with nonzero integer degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConfigJson", into = "ConfigJson")]
pub struct Configuration {
    pub entries: Vec<(Point, i32)>,
}

#[derive(Serialize, Deserialize)]
struct ConfigJson {
    points: Vec<[f64; 2]>,
    degrees: Vec<i32>,
}

impl From<Configuration> for ConfigJson {
    fn from(c: Configuration) -> Self {
        ConfigJson {
            points: c.entries.iter().map(|(p, _)| [p.x, p.y]).collect(),
            degrees: c.entries.iter().map(|(_, d)| *d).collect(),
        }
    }
}

impl TryFrom<ConfigJson> for Configuration {
    type Error = Error;
    fn try_from(j: ConfigJson) -> Result<Self> {
        if j.points.len() != j.degrees.len() {
            return Err(Error::Config("points and degrees differ in length".into()));
        }
        let entries = j
            .points
            .iter()
            .zip(&j.degrees)
            .map(|(p, d)| (Point::new(p[0], p[1]), *d))
            .collect();
        let c = Configuration { entries };
        c.validate_basic()?;
        Ok(c)
    }
}

impl Configuration {
    pub fn new(entries: Vec<(Point, i32)>) -> Result<Self> {
        let c = Configuration { entries };
        c.validate_basic()?;
        Ok(c)
    }

    pub fn empty() -> Self {
        Configuration { entries: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Degrees nonzero, points pairwise distinct.
    pub fn validate_basic(&self) -> Result<()> {
        for (p, d) in &self.entries {
            if *d == 0 {
                return Err(Error::Config(format!("degree 0 at ({}, {})", p.x, p.y)));
            }
            if !p.x.is_finite() || !p.y.is_finite() {
                return Err(Error::Config("non-finite singular point".into()));
            }
        }
        for i in 0..self.entries.len() {
            for j in i + 1..self.entries.len() {
                if self.entries[i].0 == self.entries[j].0 {
                    return Err(Error::Config("coincident singular points".into()));
                }
            }
        }
        Ok(())
    }

    /// Full invariant: also checks every point is interior to `domain`.
    pub fn validate(&self, domain: &Domain) -> Result<()> {
        self.validate_basic()?;
        for (p, _) in &self.entries {
            if !domain.contains(*p) {
                return Err(Error::OutsideDomain(p.x, p.y));
            }
        }
        Ok(())
    }

    /// −Σ dⱼ, the multiplicity the boundary carries.
    pub fn boundary_deficit(&self) -> i32 {
        -self.entries.iter().map(|(_, d)| d).sum::<i32>()
    }

    /// Total degree Σ dⱼ.
    pub fn total_degree(&self) -> i32 {
        self.entries.iter().map(|(_, d)| d).sum()
    }

    /// Merge with another configuration, adding degrees at shared points and
    /// dropping cancellations. `conjugate` negates the other's degrees.
    pub fn merged(&self, other: &Configuration, conjugate_other: bool) -> Configuration {
        let mut entries: Vec<(Point, i32)> = self.entries.clone();
        for (p, d) in &other.entries {
            let d = if conjugate_other { -d } else { *d };
            if let Some(e) = entries.iter_mut().find(|(q, _)| q == p) {
                e.1 += d;
            } else {
                entries.push((*p, d));
            }
        }
        entries.retain(|(_, d)| *d != 0);
        Configuration { entries }
    }
}

/// Balanced collection of m positive and m negative locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedMultiset {
    pub positives: Vec<Location>,
    pub negatives: Vec<Location>,
}

impl SignedMultiset {
    pub fn size(&self) -> usize {
        self.positives.len()
    }
}

/// Expand a configuration by multiplicity: aⱼ appears |dⱼ| times on the side
/// of sign(dⱼ), the boundary token |D| times on the side of sign(D).
pub fn boundary_augment(config: &Configuration) -> SignedMultiset {
    let mut positives = Vec::new();
    let mut negatives = Vec::new();
    for (p, d) in &config.entries {
        let side = if *d > 0 { &mut positives } else { &mut negatives };
        for _ in 0..d.unsigned_abs() {
            side.push(Location::Point(*p));
        }
    }
    let deficit = config.boundary_deficit();
    let side = if deficit > 0 { &mut positives } else { &mut negatives };
    for _ in 0..deficit.unsigned_abs() {
        side.push(Location::Boundary);
    }
    debug_assert_eq!(positives.len(), negatives.len());
    SignedMultiset { positives, negatives }
}

/// A pairing σ realizing Σⱼ d_Ω(Pⱼ, N_σ(j)) together with its cost.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Matching {
    /// pairing[j] is the index into `negatives` matched with positive j.
    pub pairing: Vec<usize>,
    pub cost: f64,
}

/// Kantorovich potential: one value per distinct carried location.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualPotential {
    pub locations: Vec<Location>,
    pub values: Vec<f64>,
    /// Σⱼ (ζ(Pⱼ) − ζ(Nⱼ)); equals the primal cost by strong duality.
    pub value: f64,
}

impl DualPotential {
    /// Check |ζ(x) − ζ(y)| ≤ d_Ω(x, y) on every carried pair.
    pub fn is_feasible(&self, domain: &Domain, tol: f64) -> Result<bool> {
        for i in 0..self.locations.len() {
            for j in i + 1..self.locations.len() {
                let d = domain.semi_metric(self.locations[i], self.locations[j])?;
                if (self.values[i] - self.values[j]).abs() > d + tol {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn cost_matrix(ms: &SignedMultiset, domain: &Domain) -> Result<Vec<Vec<f64>>> {
    let m = ms.size();
    let mut c = vec![vec![0.0; m]; m];
    for (i, p) in ms.positives.iter().enumerate() {
        for (j, n) in ms.negatives.iter().enumerate() {
            c[i][j] = domain.semi_metric(*p, *n)?;
        }
    }
    Ok(c)
}

/// Exact minimum-cost matching by the Hungarian algorithm, with ties broken
/// toward the lexicographically smallest pairing.
pub fn min_cost_matching(ms: &SignedMultiset, domain: &Domain) -> Result<Matching> {
    let m = ms.size();
    if m == 0 {
        return Ok(Matching { pairing: vec![], cost: 0.0 });
    }
    let cost = cost_matrix(ms, domain)?;
    let (opt, _) = hungarian(&cost);
    let scale = cost
        .iter()
        .flatten()
        .fold(1.0f64, |a, &b| a.max(b.abs()));
    let tol = 1e-9 * scale;

    // Lexicographic refinement: fix columns row by row, keeping optimality.
    let big = 1e15;
    let mut fixed: Vec<Option<usize>> = vec![None; m];
    let mut work = cost.clone();
    for row in 0..m {
        let mut chosen = None;
        for col in 0..m {
            if fixed.iter().any(|f| *f == Some(col)) {
                continue;
            }
            let saved: Vec<f64> = work[row].clone();
            for c2 in 0..m {
                if c2 != col {
                    work[row][c2] = big;
                }
            }
            let (total, _) = hungarian(&work);
            if total <= opt + tol {
                chosen = Some(col);
                break;
            }
            work[row] = saved;
        }
        let col = chosen.expect("some column preserves optimality");
        fixed[row] = Some(col);
        for c2 in 0..m {
            if c2 != col {
                work[row][c2] = big;
            }
        }
    }
    let pairing: Vec<usize> = fixed.into_iter().map(|f| f.unwrap()).collect();
    let total: f64 = pairing.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
    debug_assert!((total - opt).abs() <= tol * m as f64);
    Ok(Matching { pairing, cost: total })
}

/// Exhaustive minimum over all m! pairings; the test oracle. m ≤ 8.
pub fn matching_bruteforce(ms: &SignedMultiset, domain: &Domain) -> Result<Matching> {
    let m = ms.size();
    if m > 8 {
        return Err(Error::Size(format!("brute force limited to m ≤ 8, got {m}")));
    }
    if m == 0 {
        return Ok(Matching { pairing: vec![], cost: 0.0 });
    }
    let cost = cost_matrix(ms, domain)?;
    let mut perm: Vec<usize> = (0..m).collect();
    let mut best = Matching {
        pairing: perm.clone(),
        cost: (0..m).map(|i| cost[i][i]).sum(),
    };
    // lexicographic enumeration keeps the tie-break deterministic
    while next_permutation(&mut perm) {
        let c: f64 = perm.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
        if c < best.cost - 1e-15 {
            best = Matching { pairing: perm.clone(), cost: c };
        }
    }
    Ok(best)
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Square-matrix Hungarian algorithm (shortest augmenting paths with row and
/// column potentials). Returns (total cost, assignment row → column).
fn hungarian(cost: &[Vec<f64>]) -> (f64, Vec<usize>) {
    let n = cost.len();
    let inf = f64::INFINITY;
    // 1-indexed potentials; p[j] = row matched to column j
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            assignment[p[j] - 1] = j - 1;
        }
    }
    let total = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| cost[i][j])
        .sum();
    (total, assignment)
}

/// Σ(u) = 2π L(a⃗, d⃗) for the class with the given singularities.
pub fn sigma_exact(config: &Configuration, domain: &Domain) -> Result<f64> {
    config.validate(domain)?;
    if config.is_empty() {
        return Ok(0.0);
    }
    let ms = boundary_augment(config);
    let m = min_cost_matching(&ms, domain)?;
    Ok(2.0 * std::f64::consts::PI * m.cost)
}

/// Solve the dual linear program
///   max Σⱼ (ζ(Pⱼ) − ζ(Nⱼ))  s.t.  |ζ(x) − ζ(y)| ≤ d_Ω(x, y)
/// over the carried locations, by successive shortest paths on the
/// transshipment network (the potentials play the role of the Hungarian
/// row/column duals). The returned value equals the primal cost.
pub fn kantorovich_dual(ms: &SignedMultiset, domain: &Domain) -> Result<DualPotential> {
    let m = ms.size();
    if m == 0 {
        return Err(Error::Precondition("dual needs at least one pair".into()));
    }
    // distinct locations with net supply (positive copies − negative copies)
    let mut locations: Vec<Location> = Vec::new();
    let mut supply: Vec<i64> = Vec::new();
    let add = |loc: Location, s: i64, locations: &mut Vec<Location>, supply: &mut Vec<i64>| {
        if let Some(k) = locations.iter().position(|l| *l == loc) {
            supply[k] += s;
        } else {
            locations.push(loc);
            supply.push(s);
        }
    };
    for l in &ms.positives {
        add(*l, 1, &mut locations, &mut supply);
    }
    for l in &ms.negatives {
        add(*l, -1, &mut locations, &mut supply);
    }
    // a location on both sides would need ζ(x) − ζ(x) > 0
    for p in &ms.positives {
        if ms.negatives.contains(p) {
            return Err(Error::Precondition(
                "a location appears on both sides of the multiset".into(),
            ));
        }
    }

    let n = locations.len();
    let mut dist = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..n {
            dist[i][j] = domain.semi_metric(locations[i], locations[j])?;
        }
    }

    // successive shortest paths; flow[i][j] counts units shipped i → j
    let mut b = supply;
    let mut flow = vec![vec![0i64; n]; n];
    while let Some(src) = b.iter().position(|&x| x > 0) {
        // Bellman–Ford from src over the residual network; pred records the
        // arc kind (false = forward shipment, true = cancel reverse flow)
        let mut d = vec![f64::INFINITY; n];
        let mut pred: Vec<Option<(usize, bool)>> = vec![None; n];
        d[src] = 0.0;
        for _ in 0..n {
            let mut improved = false;
            for s in 0..n {
                if !d[s].is_finite() {
                    continue;
                }
                for t in 0..n {
                    if t == s {
                        continue;
                    }
                    let fwd = d[s] + dist[s][t];
                    if fwd < d[t] - 1e-15 {
                        d[t] = fwd;
                        pred[t] = Some((s, false));
                        improved = true;
                    }
                    if flow[t][s] > 0 {
                        let back = d[s] - dist[t][s];
                        if back < d[t] - 1e-15 {
                            d[t] = back;
                            pred[t] = Some((s, true));
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                break;
            }
        }
        let sink = (0..n)
            .filter(|&t| b[t] < 0 && d[t].is_finite())
            .min_by(|&a, &t| d[a].partial_cmp(&d[t]).unwrap())
            .ok_or_else(|| Error::Numeric("transshipment sink unreachable".into()))?;
        // augment one unit along the path (supplies are small integers)
        let mut t = sink;
        while let Some((s, cancel)) = pred[t] {
            if cancel {
                flow[t][s] -= 1;
            } else {
                flow[s][t] += 1;
            }
            t = s;
        }
        b[src] -= 1;
        b[sink] += 1;
    }

    // final potentials: shortest distances from a virtual zero-cost source
    let mut pot = vec![0.0f64; n];
    for _ in 0..n {
        let mut improved = false;
        for s in 0..n {
            for t in 0..n {
                if t == s {
                    continue;
                }
                let mut c = pot[s] + dist[s][t];
                if flow[t][s] > 0 {
                    c = c.min(pot[s] - dist[t][s]);
                }
                if c < pot[t] - 1e-15 {
                    pot[t] = c;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
    }
    let mut zeta: Vec<f64> = pot.iter().map(|p| -p).collect();
    // pin the gauge: boundary value 0 when carried, else minimum 0
    let shift = locations
        .iter()
        .position(|l| matches!(l, Location::Boundary))
        .map(|k| zeta[k])
        .unwrap_or_else(|| zeta.iter().cloned().fold(f64::INFINITY, f64::min));
    for z in &mut zeta {
        *z -= shift;
    }

    let value: f64 = ms
        .positives
        .iter()
        .map(|l| zeta[locations.iter().position(|x| x == l).unwrap()])
        .sum::<f64>()
        - ms.negatives
            .iter()
            .map(|l| zeta[locations.iter().position(|x| x == l).unwrap()])
            .sum::<f64>();

    let dual = DualPotential { locations, values: zeta, value };
    if !dual.is_feasible(domain, 1e-9)? {
        return Err(Error::Numeric("dual potential violates a Lipschitz constraint".into()));
    }
    Ok(dual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn disc() -> Domain {
        Domain::unit_disc()
    }

    fn config(entries: &[((f64, f64), i32)]) -> Configuration {
        Configuration::new(
            entries
                .iter()
                .map(|((x, y), d)| (Point::new(*x, *y), *d))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn augment_examples() {
        let ms = boundary_augment(&config(&[((0.0, 0.0), 1)]));
        assert_eq!(ms.positives, vec![Location::point(0.0, 0.0)]);
        assert_eq!(ms.negatives, vec![Location::Boundary]);

        let ms = boundary_augment(&config(&[((0.1, 0.0), 1), ((-0.2, 0.0), -1)]));
        assert_eq!(ms.size(), 1);
        assert!(ms.negatives.contains(&Location::point(-0.2, 0.0)));

        let ms = boundary_augment(&config(&[((0.0, 0.0), 2)]));
        assert_eq!(ms.positives.len(), 2);
        assert_eq!(ms.negatives, vec![Location::Boundary, Location::Boundary]);
    }

    #[test]
    fn matching_examples() {
        let d = disc();
        let m = min_cost_matching(&boundary_augment(&config(&[((0.0, 0.0), 1)])), &d).unwrap();
        assert!((m.cost - 1.0).abs() < 1e-12);

        let ms = SignedMultiset {
            positives: vec![Location::point(0.0, 0.0)],
            negatives: vec![Location::point(0.5, 0.0)],
        };
        let m = min_cost_matching(&ms, &d).unwrap();
        assert!((m.cost - 0.5).abs() < 1e-12);

        let ms = SignedMultiset {
            positives: vec![Location::point(0.9, 0.0)],
            negatives: vec![Location::point(-0.9, 0.0)],
        };
        let m = min_cost_matching(&ms, &d).unwrap();
        assert!((m.cost - 0.2).abs() < 1e-12, "boundary route beats the chord");
    }

    #[test]
    fn sigma_exact_examples() {
        let d = disc();
        assert!((sigma_exact(&config(&[((0.0, 0.0), 1)]), &d).unwrap() - 2.0 * PI).abs() < 1e-12);
        let dip = config(&[((0.0, 0.0), 1), ((0.5, 0.0), -1)]);
        assert!((sigma_exact(&dip, &d).unwrap() - PI).abs() < 1e-12);
        assert_eq!(sigma_exact(&Configuration::empty(), &d).unwrap(), 0.0);
    }

    #[test]
    fn bruteforce_limits() {
        let d = disc();
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for k in 0..9 {
            pos.push(Location::point(0.05 * k as f64, 0.1));
            neg.push(Location::point(0.05 * k as f64, -0.1));
        }
        let ms = SignedMultiset { positives: pos, negatives: neg };
        assert!(matches!(matching_bruteforce(&ms, &d), Err(Error::Size(_))));
        let empty = SignedMultiset { positives: vec![], negatives: vec![] };
        assert_eq!(matching_bruteforce(&empty, &d).unwrap().cost, 0.0);
    }

    #[test]
    fn hungarian_matches_bruteforce_random() {
        let d = disc();
        let mut state = 0x2545f4914f6cdd1du64;
        let mut rnd = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for trial in 0..60 {
            let m = 1 + (trial % 7);
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            for _ in 0..m {
                pos.push(if rnd() < 0.15 {
                    Location::Boundary
                } else {
                    let r = 0.95 * rnd().sqrt();
                    let t = 2.0 * PI * rnd();
                    Location::point(r * t.cos(), r * t.sin())
                });
                neg.push(if rnd() < 0.15 {
                    Location::Boundary
                } else {
                    let r = 0.95 * rnd().sqrt();
                    let t = 2.0 * PI * rnd();
                    Location::point(r * t.cos(), r * t.sin())
                });
            }
            let ms = SignedMultiset { positives: pos, negatives: neg };
            let fast = min_cost_matching(&ms, &d).unwrap();
            let slow = matching_bruteforce(&ms, &d).unwrap();
            assert!(
                (fast.cost - slow.cost).abs() < 1e-9,
                "trial {trial}: hungarian {} vs brute {}",
                fast.cost,
                slow.cost
            );
        }
    }

    #[test]
    fn dual_matches_primal() {
        let d = disc();
        let ms = boundary_augment(&config(&[((0.0, 0.0), 1)]));
        let dual = kantorovich_dual(&ms, &d).unwrap();
        assert!((dual.value - 1.0).abs() < 1e-9);
        assert!(dual.is_feasible(&d, 1e-12).unwrap());

        let ms = SignedMultiset {
            positives: vec![Location::point(0.9, 0.0)],
            negatives: vec![Location::point(-0.9, 0.0)],
        };
        let dual = kantorovich_dual(&ms, &d).unwrap();
        assert!((dual.value - 0.2).abs() < 1e-9);
    }

    #[test]
    fn dual_rejects_shared_location() {
        let d = disc();
        let ms = SignedMultiset {
            positives: vec![Location::point(0.1, 0.1)],
            negatives: vec![Location::point(0.1, 0.1)],
        };
        assert!(matches!(kantorovich_dual(&ms, &d), Err(Error::Precondition(_))));
        let empty = SignedMultiset { positives: vec![], negatives: vec![] };
        assert!(kantorovich_dual(&empty, &d).is_err());
    }

    #[test]
    fn canceling_pair_changes_cost_by_at_most_their_distance() {
        let d = disc();
        let base = config(&[((0.2, 0.1), 1), ((-0.4, -0.3), -1), ((0.5, 0.5), 1)]);
        let l0 = min_cost_matching(&boundary_augment(&base), &d).unwrap().cost;
        let p = Point::new(-0.1, 0.6);
        let q = Point::new(0.3, -0.55);
        let mut entries = base.entries.clone();
        entries.push((p, 1));
        entries.push((q, -1));
        let augmented = Configuration::new(entries).unwrap();
        let l1 = min_cost_matching(&boundary_augment(&augmented), &d)
            .unwrap()
            .cost;
        let dpq = d
            .semi_metric(Location::Point(p), Location::Point(q))
            .unwrap();
        assert!(l1 <= l0 + dpq + 1e-9);
        assert!(l0 <= l1 + dpq + 1e-9);
    }

    #[test]
    fn homogeneity_under_scaling() {
        let lambda = 2.5;
        let d1 = disc();
        let d2 = Domain::Disc { center: Point::new(0.0, 0.0), radius: lambda };
        let c1 = config(&[((0.3, 0.2), 1), ((-0.5, 0.1), -2), ((0.0, -0.6), 1)]);
        let c2 = Configuration::new(
            c1.entries
                .iter()
                .map(|(p, d)| (Point::new(lambda * p.x, lambda * p.y), *d))
                .collect(),
        )
        .unwrap();
        let l1 = min_cost_matching(&boundary_augment(&c1), &d1).unwrap().cost;
        let l2 = min_cost_matching(&boundary_augment(&c2), &d2).unwrap().cost;
        assert!((l2 - lambda * l1).abs() < 1e-9);
    }

    #[test]
    fn lexicographic_tie_break() {
        // two positives and two negatives arranged so both pairings cost the
        // same; the identity pairing is lexicographically smallest
        let d = Domain::Rectangle { x0: -2.0, x1: 2.0, y0: -2.0, y1: 2.0 };
        let ms = SignedMultiset {
            positives: vec![Location::point(-0.5, 0.5), Location::point(0.5, 0.5)],
            negatives: vec![Location::point(-0.5, -0.5), Location::point(0.5, -0.5)],
        };
        let m = min_cost_matching(&ms, &d).unwrap();
        assert_eq!(m.pairing, vec![0, 1]);
    }

    #[test]
    fn config_json_round_trip() {
        let c = config(&[((0.25, -0.5), 2), ((0.0, 0.0), -1)]);
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"points\"") && s.contains("\"degrees\""));
        let back: Configuration = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        let bad = r#"{"points": [[0,0]], "degrees": [0]}"#;
        assert!(serde_json::from_str::<Configuration>(bad).is_err());
    }
}
