//! Σ estimators, distance-bound certificates, and the theorem-verification
//! experiments.
//!
//! Σ(u) is computed three ways: exactly as 2πL(a⃗,d⃗) via matching, by the
//! Kantorovich dual certificate, and variationally as
//! inf_φ ∫|u∧∇u − ∇φ| on the grid. The experiments build witness families
//! for the distance bounds and record how close the two sides come.

mod experiments;
mod solver;

pub use experiments::{
    dipole_sequence, dist_bounds, growth_experiment, standard_dipole_schedule,
    strict_inequality_probe, tn_distance_experiment, DipoleMember, DipoleSequence, DumbbellReport,
    GrowthReport, TnReport, TnRow,
};

use serde::{Deserialize, Serialize};

use crate::circlemaps::{projection_map, TAU};
use crate::fields::{
    canonical_field, compose_circle, diff_energy, energy_lp, energy_lp_lenient,
    extract_singularities, same_singularities, S1Field,
};
use crate::geometry::{Domain, Grid};
use crate::matching::{boundary_augment, kantorovich_dual, sigma_exact, Configuration};
use crate::{Error, Result};

use solver::{solve_p, solve_tv, vorticity_cells, CellGrid};

/// Knobs for the variational solvers and the ζ-quadratures.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolverSettings {
    /// iteration cap for the primal–dual scheme
    pub max_iters: usize,
    /// stop when the primal–dual gap falls below this factor times the
    /// discrete area
    pub gap_tol_factor: f64,
    /// number of uniform ζ samples for projection quadratures
    pub quadrature: usize,
    /// conjugate-gradient iteration cap per reweighted least-squares step
    pub cg_iters: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            max_iters: 50_000,
            gap_tol_factor: 1e-4,
            quadrature: 256,
            cg_iters: 500,
        }
    }
}

/// Outcome of one variational minimization.
#[derive(Debug, Clone, Serialize)]
pub struct VariationalReport {
    pub value: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Σ by all three methods.
#[derive(Debug, Clone, Serialize)]
pub struct SigmaEstimate {
    /// 2πL from the Hungarian matching (method: exact)
    pub exact: f64,
    /// 2π × the Kantorovich dual value (method: dual)
    pub dual: f64,
    /// discrete inf_φ ∫|u∧∇u − ∇φ| (method: variational)
    pub variational: f64,
    pub h: f64,
    pub iterations: usize,
    pub gap: f64,
    pub converged: bool,
}

impl SigmaEstimate {
    /// Pairwise consistency: duality to 1e−9, variational within `rel_tol`
    /// of exact (absolute slack 2% of 2π for near-zero Σ).
    pub fn check_consistency(&self, rel_tol: f64) -> Result<()> {
        if (self.exact - self.dual).abs() > 1e-9 * self.exact.max(1.0) {
            return Err(Error::Assertion(format!(
                "duality mismatch: exact {} vs dual {}",
                self.exact, self.dual
            )));
        }
        let slack = if self.exact >= 0.4 * std::f64::consts::PI {
            rel_tol * self.exact
        } else {
            0.02 * TAU
        };
        if (self.exact - self.variational).abs() > slack {
            return Err(Error::Assertion(format!(
                "variational mismatch: exact {} vs variational {} (slack {slack})",
                self.exact, self.variational
            )));
        }
        Ok(())
    }
}

/// Discrete Σ(u) = inf_φ Σ_cells h²‖g − ∇_h φ‖ with g = u∧∇u.
pub fn sigma_variational(u: &S1Field, settings: &SolverSettings) -> Result<VariationalReport> {
    let (report, _) = sigma_variational_solution_warm(u, settings, None)?;
    Ok(report)
}

fn sigma_variational_solution(
    u: &S1Field,
    settings: &SolverSettings,
) -> Result<(VariationalReport, Vec<f64>)> {
    sigma_variational_solution_warm(u, settings, None)
}

fn sigma_variational_solution_warm(
    u: &S1Field,
    settings: &SolverSettings,
    warm: Option<&[f64]>,
) -> Result<(VariationalReport, Vec<f64>)> {
    let cg = CellGrid::build(&u.grid);
    if cg.cells.is_empty() {
        return Err(Error::Resolution(u.grid.h));
    }
    let g = vorticity_cells(u, &cg);
    let gap_tol = settings.gap_tol_factor * cg.area();
    let sol = solve_tv(&cg, &g, settings.max_iters, gap_tol, warm)?;
    Ok((
        VariationalReport {
            value: sol.value,
            gap: sol.gap,
            iterations: sol.iterations,
            converged: sol.converged,
        },
        sol.phi,
    ))
}

/// A single-valued phase whose branch cuts follow the minimal connection:
/// each matched interior pair contributes a segment cut, each
/// boundary-matched singularity a ray cut toward its nearest boundary
/// point. Its gradient agrees with u∧∇u away from the cuts, so the
/// variational solver starts essentially at the optimum it certifies.
fn branch_cut_phase(config: &Configuration, domain: &Domain, grid: &Grid) -> Result<Vec<f64>> {
    use crate::geometry::{Location, Point};
    let ms = boundary_augment(config);
    let matching = crate::matching::min_cost_matching(&ms, domain)?;
    // strands: (anchor, cut direction angle, orientation)
    let mut strands: Vec<(Point, f64, f64)> = Vec::new();
    let mut boundary_ray = |p: Point, sign: f64, strands: &mut Vec<(Point, f64, f64)>| {
        // −∇d(·, ∂Ω) points toward the nearest boundary point
        let delta = 1e-6;
        let bd = |q: Point| domain.boundary_distance(q).unwrap_or(0.0);
        let gx = (bd(Point::new(p.x + delta, p.y)) - bd(Point::new(p.x - delta, p.y))) / (2.0 * delta);
        let gy = (bd(Point::new(p.x, p.y + delta)) - bd(Point::new(p.x, p.y - delta))) / (2.0 * delta);
        strands.push((p, (-gy).atan2(-gx), sign));
    };
    for (i, &j) in matching.pairing.iter().enumerate() {
        match (ms.positives[i], ms.negatives[j]) {
            (Location::Point(p), Location::Point(n)) => {
                let chord = p.dist(n);
                let via = domain.boundary_distance(p)? + domain.boundary_distance(n)?;
                if chord <= via {
                    let omega = (n.y - p.y).atan2(n.x - p.x);
                    strands.push((p, omega, 1.0));
                    strands.push((n, omega, -1.0));
                } else {
                    boundary_ray(p, 1.0, &mut strands);
                    boundary_ray(n, -1.0, &mut strands);
                }
            }
            (Location::Point(p), Location::Boundary) => boundary_ray(p, 1.0, &mut strands),
            (Location::Boundary, Location::Point(n)) => boundary_ray(n, -1.0, &mut strands),
            (Location::Boundary, Location::Boundary) => {}
        }
    }
    let mut phi = vec![0.0f64; grid.nx * grid.ny];
    for (i, j) in grid.interior_nodes() {
        let x = grid.node_point(i, j);
        let mut total = 0.0;
        for (p, omega, sign) in &strands {
            // angle branch with the 2π jump along the ray from p in
            // direction ω
            let raw = (x.y - p.y).atan2(x.x - p.x);
            total += sign * (omega + std::f64::consts::PI
                + crate::circlemaps::wrap_angle(raw - omega - std::f64::consts::PI));
        }
        phi[grid.idx(i, j)] = total;
    }
    Ok(phi)
}

/// Σ by all three methods for one configuration, with consistency flags left
/// to the caller via [`SigmaEstimate::check_consistency`].
pub fn sigma_of_config(
    config: &Configuration,
    domain: &Domain,
    grid: &Grid,
    settings: &SolverSettings,
) -> Result<SigmaEstimate> {
    let exact = sigma_exact(config, domain)?;
    let dual = if config.is_empty() {
        0.0
    } else {
        TAU * kantorovich_dual(&boundary_augment(config), domain)?.value
    };
    let (var, _) = if config.is_empty() {
        (
            VariationalReport { value: 0.0, gap: 0.0, iterations: 0, converged: true },
            Vec::new(),
        )
    } else {
        let u = canonical_field(config, domain, grid)?;
        let warm = branch_cut_phase(config, domain, grid)?;
        sigma_variational_solution_warm(&u, settings, Some(&warm))?
    };
    Ok(SigmaEstimate {
        exact,
        dual,
        variational: var.value,
        h: grid.h,
        iterations: var.iterations,
        gap: var.gap,
        converged: var.converged,
    })
}

/// The field u_{a⃗,d⃗}·e^{−iφ*} with φ* the variational minimizer: its
/// energy is within the solver gap of Σ and its extracted singularities
/// match the input configuration.
pub fn near_minimizer(
    config: &Configuration,
    domain: &Domain,
    grid: &Grid,
    settings: &SolverSettings,
) -> Result<(S1Field, VariationalReport)> {
    if config.is_empty() {
        let f = crate::fields::constant_field(0.0, grid);
        return Ok((
            f,
            VariationalReport { value: 0.0, gap: 0.0, iterations: 0, converged: true },
        ));
    }
    let u = canonical_field(config, domain, grid)?;
    let warm = branch_cut_phase(config, domain, grid)?;
    let (report, mut phi) = sigma_variational_solution_warm(&u, settings, Some(&warm))?;
    // the converged minimizer concentrates its 2π phase walls on one or two
    // cells, which the wrapped differences of u·e^{−iφ} cannot represent;
    // a few averaging passes spread the walls without moving their cost
    smooth_phase(grid, &mut phi, 3);
    let mut out = u;
    for (k, a) in out.angles.iter_mut().enumerate() {
        *a -= phi[k];
    }
    out.provenance = "near_minimizer".into();
    let extracted = extract_singularities(&out);
    if !same_singularities(&extracted, config, 2.0 * grid.h) {
        return Err(Error::Numeric(
            "near-minimizer lost or moved singularities; refine the grid".into(),
        ));
    }
    Ok((out, report))
}

/// Masked neighbor averaging of a nodal phase.
fn smooth_phase(grid: &Grid, phi: &mut [f64], passes: usize) {
    for _ in 0..passes {
        let src = phi.to_vec();
        for (i, j) in grid.interior_nodes() {
            let k = grid.idx(i, j);
            let mut sum = src[k];
            let mut count = 1.0;
            let mut take = |ii: usize, jj: usize| {
                if grid.is_interior(ii, jj) {
                    sum += src[grid.idx(ii, jj)];
                    count += 1.0;
                }
            };
            take(i + 1, j);
            take(i, j + 1);
            if i > 0 {
                take(i - 1, j);
            }
            if j > 0 {
                take(i, j - 1);
            }
            phi[k] = sum / count;
        }
    }
}

/// Minimized p-energy over the class of a configuration, 1 < p < 2.
#[derive(Debug, Clone, Serialize)]
pub struct PInfimumReport {
    pub p: f64,
    /// (∫|∇w*|^p)^{1/p} for the computed minimizer w*
    pub norm: f64,
    /// ∫|∇w*|^p
    pub p_energy: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimize the smoothed functional Σ h²(‖g − ∇φ‖² + μ²)^{p/2} with a
/// μ ↓ schedule; the returned energy is evaluated on the resulting in-class
/// field so near-core cells use the closed-form model.
pub fn p_infimum_variational(
    config: &Configuration,
    domain: &Domain,
    grid: &Grid,
    p: f64,
    settings: &SolverSettings,
) -> Result<PInfimumReport> {
    if !(1.0 < p && p < 2.0) {
        return Err(Error::Parameter(format!("p must lie in (1, 2), got {p}")));
    }
    if config.is_empty() {
        return Ok(PInfimumReport { p, norm: 0.0, p_energy: 0.0, iterations: 0, converged: true });
    }
    let u = canonical_field(config, domain, grid)?;
    let cg = CellGrid::build(&u.grid);
    let g = vorticity_cells(&u, &cg);
    let sol = solve_p(&cg, &g, p, settings.cg_iters)?;
    let mut w = u;
    for (k, a) in w.angles.iter_mut().enumerate() {
        *a -= sol.phi[k];
    }
    w.provenance = "p_minimizer".into();
    let energy = energy_lp_lenient(&w, p)?.value;
    Ok(PInfimumReport {
        p,
        norm: energy.powf(1.0 / p),
        p_energy: energy,
        iterations: sol.iterations,
        converged: sol.converged,
    })
}

/// Best fold witness: minimizes ∫|∇(u − P_ζ∘u)| over a uniform ζ grid.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectionWitness {
    pub zeta_angle: f64,
    pub value: f64,
}

pub fn projection_distance(u: &S1Field, quadrature: usize) -> Result<ProjectionWitness> {
    if quadrature == 0 {
        return Err(Error::Parameter("quadrature size must be positive".into()));
    }
    let mut best = ProjectionWitness { zeta_angle: 0.0, value: f64::MAX };
    for q in 0..quadrature {
        let zeta = TAU * q as f64 / quadrature as f64;
        let pu = compose_circle(&projection_map(zeta), u);
        let v = diff_energy(u, &pu, 1.0)?.value;
        if v < best.value {
            best = ProjectionWitness { zeta_angle: zeta, value: v };
        }
    }
    Ok(best)
}

/// Both sides of the fold-average identity ∫_ζ ∫|∇(u − P_ζ∘u)| dζ = 4∫|∇u|.
#[derive(Debug, Clone, Serialize)]
pub struct AveragingReport {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_error: f64,
    pub quadrature: usize,
}

pub fn averaging_identity_check(u: &S1Field, quadrature: usize) -> Result<AveragingReport> {
    if quadrature < 16 {
        return Err(Error::Parameter("averaging quadrature needs Q ≥ 16".into()));
    }
    let mut lhs = 0.0;
    for q in 0..quadrature {
        let zeta = TAU * q as f64 / quadrature as f64;
        let pu = compose_circle(&projection_map(zeta), u);
        lhs += diff_energy(u, &pu, 1.0)?.value;
    }
    lhs *= TAU / quadrature as f64;
    let rhs = 4.0 * energy_lp(u, 1.0)?.value;
    let rel_error = if rhs > 0.0 { (lhs - rhs).abs() / rhs } else { lhs.abs() };
    Ok(AveragingReport { lhs, rhs, rel_error, quadrature })
}

/// Probe for the equality case ∫|∇u| = Σ(u): reports both values, their
/// ratio, and the best fold witness.
#[derive(Debug, Clone, Serialize)]
pub struct EqualityProbe {
    pub gradient_energy: f64,
    pub sigma: f64,
    pub sigma_method: String,
    /// None when Σ ≈ 0 (the ratio is not applicable)
    pub ratio: Option<f64>,
    pub projection: ProjectionWitness,
}

pub fn equality_case_probe(
    u: &S1Field,
    domain: &Domain,
    settings: &SolverSettings,
) -> Result<EqualityProbe> {
    let energy = energy_lp_lenient(u, 1.0)?.value;
    let (sigma, method) = sigma_of_field(u, domain, settings)?;
    let ratio = if sigma > 1e-6 { Some(energy / sigma) } else { None };
    let projection = projection_distance(u, settings.quadrature)?;
    Ok(EqualityProbe {
        gradient_energy: energy,
        sigma,
        sigma_method: method,
        ratio,
        projection,
    })
}

/// The optimal-lifting value E(u) = ∫|∇u| + Σ(u).
#[derive(Debug, Clone, Serialize)]
pub struct LiftingReport {
    pub gradient_energy: f64,
    pub sigma: f64,
    pub sigma_method: String,
    pub total: f64,
}

pub fn optimal_lifting_energy(
    u: &S1Field,
    domain: &Domain,
    settings: &SolverSettings,
) -> Result<LiftingReport> {
    let energy = energy_lp_lenient(u, 1.0)?.value;
    let (sigma, method) = sigma_of_field(u, domain, settings)?;
    Ok(LiftingReport { gradient_energy: energy, sigma, sigma_method: method, total: energy + sigma })
}

/// Σ of a field: exact via matching when the field declares a
/// configuration, variational otherwise.
fn sigma_of_field(u: &S1Field, domain: &Domain, settings: &SolverSettings) -> Result<(f64, String)> {
    if !u.singularities.is_empty() {
        let config = Configuration { entries: u.singularities.clone() };
        Ok((sigma_exact(&config, domain)?, "exact".into()))
    } else if u.model_exact {
        // smooth in-class field
        Ok((0.0, "exact".into()))
    } else {
        Ok((sigma_variational(u, settings)?.value, "variational".into()))
    }
}

/// Lower/upper bracket for a class distance.
#[derive(Debug, Clone, Serialize)]
pub struct DistanceBounds {
    pub p: f64,
    pub lower: f64,
    pub upper: f64,
    pub lower_method: String,
    pub witness: String,
}

impl DistanceBounds {
    pub fn check_order(&self, tol: f64) -> Result<()> {
        if self.lower > self.upper + tol {
            return Err(Error::Assertion(format!(
                "lower bound {} exceeds upper bound {}",
                self.lower, self.upper
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::plane_wave;
    use crate::geometry::Point;
    use std::f64::consts::PI;

    fn settings_fast() -> SolverSettings {
        SolverSettings { max_iters: 20_000, ..Default::default() }
    }

    #[test]
    fn smooth_field_has_tiny_sigma() {
        let d = Domain::unit_disc();
        let g = Grid::build_centered(&d, 1.0 / 64.0).unwrap();
        let u = plane_wave(4, &g);
        let r = sigma_variational(&u, &settings_fast()).unwrap();
        assert!(r.value <= 0.02 * TAU, "smooth field Σ estimate {}", r.value);
    }

    #[test]
    fn single_vortex_sigma_close_to_2pi() {
        let d = Domain::unit_disc();
        let g = Grid::build_centered(&d, 1.0 / 64.0).unwrap();
        let c = Configuration::new(vec![(Point::new(0.0, 0.0), 1)]).unwrap();
        let est = sigma_of_config(&c, &d, &g, &settings_fast()).unwrap();
        assert!((est.exact - 2.0 * PI).abs() < 1e-12);
        assert!((est.dual - 2.0 * PI).abs() < 1e-9);
        assert!(
            (est.variational - 2.0 * PI).abs() < 0.05 * 2.0 * PI,
            "variational {} (gap {}, iters {})",
            est.variational,
            est.gap,
            est.iterations
        );
        est.check_consistency(0.05).unwrap();
    }

    #[test]
    fn near_minimizer_keeps_singularities() {
        let d = Domain::unit_disc();
        let g = Grid::build_centered(&d, 1.0 / 64.0).unwrap();
        let c = Configuration::new(vec![
            (Point::new(0.0, 0.0), 1),
            (Point::new(0.5, 0.0), -1),
        ])
        .unwrap();
        let (w, rep) = near_minimizer(&c, &d, &g, &settings_fast()).unwrap();
        let e = energy_lp_lenient(&w, 1.0).unwrap().value;
        // energy within the solver gap + discretization of Σ = π
        assert!(e <= PI * 1.10 + rep.gap, "near-minimizer energy {e} (Σ = π)");
        assert!(same_singularities(&extract_singularities(&w), &c, 2.0 * g.h));
    }

    #[test]
    fn empty_config_short_circuits() {
        let d = Domain::unit_disc();
        let g = Grid::build_centered(&d, 0.125).unwrap();
        let est = sigma_of_config(&Configuration::empty(), &d, &g, &settings_fast()).unwrap();
        assert_eq!(est.exact, 0.0);
        assert_eq!(est.dual, 0.0);
        assert_eq!(est.variational, 0.0);
        let (f, _) = near_minimizer(&Configuration::empty(), &d, &g, &settings_fast()).unwrap();
        assert!(f.singularities.is_empty());
    }

    #[test]
    fn projection_distance_constant_field_is_zero() {
        let d = Domain::unit_disc();
        let g = Grid::build_centered(&d, 0.125).unwrap();
        let u = crate::fields::constant_field(0.3, &g);
        let w = projection_distance(&u, 32).unwrap();
        assert!(w.value.abs() < 1e-12);
        let probe = equality_case_probe(&u, &d, &settings_fast()).unwrap();
        assert!(probe.ratio.is_none());
    }

    #[test]
    fn p_infimum_rejects_bad_exponent() {
        let d = Domain::unit_disc();
        let g = Grid::build_centered(&d, 0.125).unwrap();
        let c = Configuration::new(vec![(Point::new(0.0, 0.0), 1)]).unwrap();
        assert!(p_infimum_variational(&c, &d, &g, 1.0, &settings_fast()).is_err());
        assert!(p_infimum_variational(&c, &d, &g, 2.0, &settings_fast()).is_err());
    }
}
