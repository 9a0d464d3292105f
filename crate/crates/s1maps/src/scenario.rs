//! Declarative scenario runner: one JSON document per run, reproducible
//! outputs, CSV tables for anything tabular.
//!
//! Exit-code contract (used by the `s1maps` binary): 0 success, 2 assertion
//! failure (a theorem check violated at the configured tolerances), 3 input
//! error. Timestamps never enter `results.json`; they live in `meta.json` so
//! deterministic reruns are byte-identical.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::fields::{canonical_field, constant_field};
use crate::geometry::{Domain, Grid};
use crate::matching::{
    boundary_augment, kantorovich_dual, matching_bruteforce, min_cost_matching, Configuration,
};
use crate::sigma::{
    self, averaging_identity_check, dipole_sequence, dist_bounds, equality_case_probe,
    growth_experiment, near_minimizer, optimal_lifting_energy, sigma_of_config,
    strict_inequality_probe, tn_distance_experiment, SolverSettings,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Sigma,
    Matching,
    Dual,
    Averaging,
    Dipole,
    TnDistance,
    DistBounds,
    Growth,
    Dumbbell,
    Lifting,
    EqualityProbe,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Sigma => "sigma",
            Experiment::Matching => "matching",
            Experiment::Dual => "dual",
            Experiment::Averaging => "averaging",
            Experiment::Dipole => "dipole",
            Experiment::TnDistance => "tn-distance",
            Experiment::DistBounds => "dist-bounds",
            Experiment::Growth => "growth",
            Experiment::Dumbbell => "dumbbell",
            Experiment::Lifting => "lifting",
            Experiment::EqualityProbe => "equality-probe",
        }
    }
}

/// One experiment run: domain, configuration(s), grid spacings and solver
/// settings. Unused fields may be omitted in the JSON document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub experiment: Experiment,
    pub domain: Domain,
    #[serde(default)]
    pub config: Option<Configuration>,
    /// second configuration for pair experiments (tn-distance, dist-bounds)
    #[serde(default)]
    pub config_v: Option<Configuration>,
    /// grid spacings; the first entry is used unless sweeping over h
    pub grids: Vec<f64>,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub n_list: Option<Vec<u32>>,
    #[serde(default)]
    pub quadrature: Option<usize>,
    #[serde(default)]
    pub solver: Option<SolverSettings>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub deterministic: bool,
    #[serde(default)]
    pub seed: u64,
}

impl Scenario {
    pub fn from_file(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)?;
        let sc: Scenario = serde_json::from_str(&text)?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        if self.grids.is_empty() {
            return Err(Error::Parameter("grid list must be nonempty".into()));
        }
        if self.grids.iter().any(|h| *h <= 0.0) {
            return Err(Error::Parameter("grid spacings must be positive".into()));
        }
        Ok(())
    }

    fn settings(&self) -> SolverSettings {
        self.solver.clone().unwrap_or_default()
    }

    fn config_or_err(&self) -> Result<&Configuration> {
        self.config
            .as_ref()
            .ok_or_else(|| Error::Parameter("experiment needs a configuration".into()))
    }
}

/// Artifacts of one run: a JSON document plus named CSV tables.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub json: serde_json::Value,
    pub tables: Vec<(String, String)>,
}

fn envelope(sc: &Scenario, h: f64, results: serde_json::Value) -> serde_json::Value {
    serde_json::json!({
        "experiment": sc.experiment.name(),
        "domain": sc.domain,
        "h": h,
        "deterministic": sc.deterministic,
        "seed": sc.seed,
        "results": results,
    })
}

/// Execute a scenario. Theorem-check violations surface as
/// [`Error::Assertion`]; everything else that goes wrong is an input or
/// numeric error.
pub fn run(sc: &Scenario) -> Result<RunOutput> {
    sc.validate()?;
    let settings = sc.settings();
    let h = sc.grids[0];
    let domain = &sc.domain;
    let grid = || Grid::build_centered(domain, h);
    let quadrature = sc.quadrature.unwrap_or(settings.quadrature);
    let mut tables = Vec::new();
    let results = match sc.experiment {
        Experiment::Sigma => {
            let cfg = sc.config_or_err()?;
            let est = sigma_of_config(cfg, domain, &grid()?, &settings)?;
            est.check_consistency(0.05)?;
            serde_json::json!({
                "sigma": [
                    {"method": "exact", "value": est.exact},
                    {"method": "dual", "value": est.dual},
                    {"method": "variational", "value": est.variational,
                     "gap": est.gap, "iterations": est.iterations,
                     "converged": est.converged},
                ],
            })
        }
        Experiment::Matching => {
            let cfg = sc.config_or_err()?;
            let ms = boundary_augment(cfg);
            let m = min_cost_matching(&ms, domain)?;
            let oracle = if ms.size() <= 7 {
                Some(matching_bruteforce(&ms, domain)?.cost)
            } else {
                None
            };
            if let Some(o) = oracle {
                if (o - m.cost).abs() > 1e-9 {
                    return Err(Error::Assertion(format!(
                        "hungarian {} disagrees with brute force {}",
                        m.cost, o
                    )));
                }
            }
            serde_json::json!({
                "method": "exact",
                "cost": m.cost,
                "sigma": 2.0 * std::f64::consts::PI * m.cost,
                "pairing": m.pairing,
                "multiset": ms,
                "bruteforce_cost": oracle,
            })
        }
        Experiment::Dual => {
            let cfg = sc.config_or_err()?;
            let ms = boundary_augment(cfg);
            let primal = min_cost_matching(&ms, domain)?;
            let dual = kantorovich_dual(&ms, domain)?;
            if (primal.cost - dual.value).abs() > 1e-9 {
                return Err(Error::Assertion(format!(
                    "duality gap: primal {} vs dual {}",
                    primal.cost, dual.value
                )));
            }
            serde_json::json!({
                "primal": {"method": "exact", "cost": primal.cost},
                "dual": {"method": "dual", "value": dual.value,
                          "locations": dual.locations, "potential": dual.values},
            })
        }
        Experiment::Averaging => {
            let cfg = sc.config_or_err()?;
            let u = canonical_field(cfg, domain, &grid()?)?;
            let rep = averaging_identity_check(&u, quadrature)?;
            serde_json::json!({
                "lhs": {"method": "witness", "value": rep.lhs},
                "rhs": {"method": "exact-quadrature", "value": rep.rhs},
                "rel_error": rep.rel_error,
                "quadrature": rep.quadrature,
            })
        }
        Experiment::Dipole => {
            let cfg = sc.config_or_err()?;
            let g = grid()?;
            let (m, rep) = near_minimizer(cfg, domain, &g, &settings)?;
            let seq = dipole_sequence(&m, &sigma::standard_dipole_schedule())?;
            let area = g.interior_area();
            for member in &seq.members {
                if member.support > 1.5 * member.eps * area {
                    return Err(Error::Assertion(format!(
                        "dipole support {} exceeds 1.5·ε·|Ω| at ε = {}",
                        member.support, member.eps
                    )));
                }
            }
            let mut csv = String::from("eps,theta,energy,support,tube_nodes,resolved\n");
            for m in &seq.members {
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    m.eps, m.theta, m.energy, m.support, m.tube_nodes, m.resolved
                ));
            }
            tables.push(("dipole".to_string(), csv));
            serde_json::json!({
                "near_minimizer": {"method": "variational", "value": rep.value,
                                    "gap": rep.gap},
                "members": seq.members,
                "base_energy": seq.base_energy,
            })
        }
        Experiment::TnDistance => {
            let u0 = sc.config_or_err()?;
            let v0 = sc
                .config_v
                .clone()
                .unwrap_or_else(Configuration::empty);
            let ns = sc.n_list.clone().unwrap_or_else(|| vec![9, 25, 49]);
            let rep = tn_distance_experiment(u0, &v0, &ns, domain, &grid()?, &settings)?;
            let mut csv = String::from("n,eps,diff,ratio,lower_check_ok\n");
            for r in &rep.rows {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.n, r.eps, r.diff, r.ratio, r.lower_check_ok
                ));
            }
            tables.push(("tn_distance".to_string(), csv));
            if let Some(bad) = rep.rows.iter().find(|r| !r.lower_check_ok) {
                return Err(Error::Assertion(format!(
                    "universal lower bound violated at n = {}: diff {} < (2/π)Σ·0.9",
                    bad.n, bad.diff
                )));
            }
            serde_json::json!({
                "sigma": {"method": "exact", "value": rep.sigma},
                "rows": rep.rows,
            })
        }
        Experiment::DistBounds => {
            let u0 = sc.config_or_err()?;
            let v0 = sc.config_v.clone().unwrap_or_else(Configuration::empty);
            let p = sc.p.unwrap_or(1.0);
            let b = dist_bounds(u0, &v0, p, domain, &grid()?, &settings)?;
            serde_json::json!({
                "p": b.p,
                "lower": {"method": b.lower_method, "value": b.lower},
                "upper": {"method": "witness", "value": b.upper, "witness": b.witness},
            })
        }
        Experiment::Growth => {
            let v0 = sc.config_or_err()?;
            let p = sc.p.unwrap_or(1.5);
            let ns = sc.n_list.clone().unwrap_or_else(|| vec![4, 8, 16, 32]);
            let rep = growth_experiment(v0, p, &ns, domain, h)?;
            if p == 1.0 {
                for r in &rep.rows {
                    if r.value > rep.sigma_v0 * 1.05 {
                        return Err(Error::Assertion(format!(
                            "p = 1 witness energy {} exceeds Σ(v₀)·1.05 at n = {}",
                            r.value, r.n
                        )));
                    }
                }
            }
            let mut csv = String::from("n,value,best_width\n");
            for r in &rep.rows {
                csv.push_str(&format!("{},{},{}\n", r.n, r.value, r.best_width));
            }
            tables.push(("growth".to_string(), csv));
            serde_json::json!({
                "p": rep.p,
                "sigma_v0": {"method": "exact", "value": rep.sigma_v0},
                "rows": rep.rows,
                "fitted_slope": {"method": "witness", "value": rep.fitted_slope},
            })
        }
        Experiment::Dumbbell => {
            let neck = match domain {
                Domain::Dumbbell { neck } => *neck,
                _ => {
                    return Err(Error::Parameter(
                        "dumbbell experiment needs a dumbbell domain".into(),
                    ))
                }
            };
            let p = sc.p.unwrap_or(1.5);
            let rep = strict_inequality_probe(neck, p, h, &settings)?;
            serde_json::json!({
                "neck": rep.neck,
                "p": rep.p,
                "lower": {"method": "variational", "value": rep.lower},
                "witness_upper": {"method": "witness", "value": rep.witness_upper,
                                   "witness": rep.witness},
                "annulus_bound": {"method": "exact", "value": rep.annulus_bound},
                "note": rep.note,
            })
        }
        Experiment::Lifting => {
            let cfg = sc.config_or_err()?;
            let g = grid()?;
            let u = if cfg.is_empty() {
                constant_field(0.0, &g)
            } else {
                canonical_field(cfg, domain, &g)?
            };
            let rep = optimal_lifting_energy(&u, domain, &settings)?;
            serde_json::json!({
                "gradient_energy": {"method": "fd", "value": rep.gradient_energy},
                "sigma": {"method": rep.sigma_method, "value": rep.sigma},
                "total": {"method": "derived", "value": rep.total},
            })
        }
        Experiment::EqualityProbe => {
            let cfg = sc.config_or_err()?;
            let g = grid()?;
            let u = if cfg.is_empty() {
                constant_field(0.0, &g)
            } else {
                canonical_field(cfg, domain, &g)?
            };
            let rep = equality_case_probe(&u, domain, &settings)?;
            serde_json::json!({
                "gradient_energy": {"method": "fd", "value": rep.gradient_energy},
                "sigma": {"method": rep.sigma_method, "value": rep.sigma},
                "ratio": rep.ratio,
                "projection": {"method": "witness", "zeta_angle": rep.projection.zeta_angle,
                                "value": rep.projection.value},
            })
        }
    };
    Ok(RunOutput { json: envelope(sc, h, results), tables })
}

/// Sweep one parameter across a list of values; emits one CSV row per run
/// with the experiment's headline value and, for spacing sweeps with an
/// exact reference, a fitted convergence rate.
pub fn sweep(sc: &Scenario, param: &str, values: &[f64]) -> Result<RunOutput> {
    if values.is_empty() {
        return Err(Error::Parameter("sweep needs a nonempty value list".into()));
    }
    let threads: usize = std::env::var("S1MAPS_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1);
    let scenarios: Vec<Scenario> = values
        .iter()
        .map(|v| apply_param(sc, param, *v))
        .collect::<Result<_>>()?;
    let outputs: Vec<RunOutput> = if threads > 1 {
        let mut slots: Vec<Option<Result<RunOutput>>> = (0..scenarios.len()).map(|_| None).collect();
        std::thread::scope(|scope| {
            for (slot, scn) in slots.iter_mut().zip(&scenarios) {
                scope.spawn(move || {
                    *slot = Some(run(scn));
                });
            }
        });
        slots
            .into_iter()
            .map(|s| s.expect("sweep worker finished"))
            .collect::<Result<_>>()?
    } else {
        scenarios.iter().map(run).collect::<Result<_>>()?
    };

    let mut rows = Vec::new();
    for (v, out) in values.iter().zip(&outputs) {
        rows.push((*v, headline_value(sc.experiment, &out.json)));
    }
    let rate = fitted_rate(sc, param, &rows);
    let mut csv = format!("{param},headline,fitted_rate\n");
    for (k, (v, y)) in rows.iter().enumerate() {
        let r = if k == rows.len() - 1 {
            rate.map(|r| r.to_string()).unwrap_or_default()
        } else {
            String::new()
        };
        csv.push_str(&format!("{},{},{}\n", v, y.map(|x| x.to_string()).unwrap_or_default(), r));
    }
    let json = serde_json::json!({
        "experiment": sc.experiment.name(),
        "sweep": param,
        "values": values,
        "runs": outputs.iter().map(|o| o.json.clone()).collect::<Vec<_>>(),
        "fitted_rate": rate,
    });
    Ok(RunOutput { json, tables: vec![("sweep".to_string(), csv)] })
}

fn apply_param(sc: &Scenario, param: &str, value: f64) -> Result<Scenario> {
    let mut out = sc.clone();
    match param {
        "h" => out.grids = vec![value],
        "p" => out.p = Some(value),
        "n" => out.n_list = Some(vec![value as u32]),
        "quadrature" => out.quadrature = Some(value as usize),
        other => {
            return Err(Error::Parameter(format!(
                "unknown sweep parameter '{other}' (expected h, p, n or quadrature)"
            )))
        }
    }
    Ok(out)
}

/// The one scalar a sweep tracks for each experiment.
fn headline_value(exp: Experiment, json: &serde_json::Value) -> Option<f64> {
    let r = &json["results"];
    let get = |v: &serde_json::Value| v.as_f64();
    match exp {
        Experiment::Sigma => get(&r["sigma"][2]["value"]),
        Experiment::Matching => get(&r["cost"]),
        Experiment::Dual => get(&r["dual"]["value"]),
        Experiment::Averaging => get(&r["rel_error"]),
        Experiment::Dipole => r["members"]
            .as_array()
            .and_then(|m| m.last())
            .and_then(|m| m["energy"].as_f64()),
        Experiment::TnDistance => r["rows"]
            .as_array()
            .and_then(|rows| rows.last())
            .and_then(|row| row["ratio"].as_f64()),
        Experiment::DistBounds => get(&r["upper"]["value"]),
        Experiment::Growth => get(&r["fitted_slope"]["value"]),
        Experiment::Dumbbell => get(&r["witness_upper"]["value"]),
        Experiment::Lifting => get(&r["total"]["value"]),
        Experiment::EqualityProbe => get(&r["ratio"]),
    }
}

/// ln-ln convergence rate of |headline − exact| against h, when the
/// experiment carries an exact reference.
fn fitted_rate(sc: &Scenario, param: &str, rows: &[(f64, Option<f64>)]) -> Option<f64> {
    if param != "h" || rows.len() < 2 {
        return None;
    }
    let reference = match sc.experiment {
        Experiment::Sigma => {
            let cfg = sc.config.as_ref()?;
            crate::matching::sigma_exact(cfg, &sc.domain).ok()?
        }
        Experiment::Averaging => 0.0, // rel_error target
        _ => return None,
    };
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|(h, y)| {
            let err = (y.as_ref()? - reference).abs();
            (err > 0.0).then(|| (h.ln(), err.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Write the run artifacts: `results.json`, CSV tables, and `meta.json`
/// (which is the only file carrying a timestamp). Files are written to a
/// temporary name and renamed into place.
pub fn write_outputs(out_dir: &Path, output: &RunOutput) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let atomically = |path: &Path, bytes: &[u8]| -> Result<()> {
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, bytes)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    };
    let results = out_dir.join("results.json");
    atomically(&results, &serde_json::to_vec_pretty(&output.json)?)?;
    written.push(results);
    for (name, csv) in &output.tables {
        let path = out_dir.join(format!("{name}.csv"));
        atomically(&path, csv.as_bytes())?;
        written.push(path.clone());
    }
    let meta = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "timestamp_unix": std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    });
    let meta_path = out_dir.join("meta.json");
    atomically(&meta_path, &serde_json::to_vec_pretty(&meta)?)?;
    written.push(meta_path);
    Ok(written)
}

/// Map an error to the CLI exit code: 2 for theorem-check violations,
/// 3 for anything the caller fed in or the environment refused.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Assertion(_) => 2,
        _ => 3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;

    fn sigma_scenario() -> Scenario {
        Scenario {
            experiment: Experiment::Sigma,
            domain: Domain::unit_disc(),
            config: Some(
                Configuration::new(vec![(Point::new(0.0, 0.0), 1)]).unwrap(),
            ),
            config_v: None,
            grids: vec![1.0 / 48.0],
            p: None,
            n_list: None,
            quadrature: None,
            solver: Some(SolverSettings { max_iters: 15_000, ..Default::default() }),
            out: None,
            deterministic: true,
            seed: 7,
        }
    }

    #[test]
    fn sigma_run_reports_2pi() {
        let out = run(&sigma_scenario()).unwrap();
        let exact = out.json["results"]["sigma"][0]["value"].as_f64().unwrap();
        assert!((exact - 2.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn deterministic_reruns_are_byte_identical() {
        let sc = sigma_scenario();
        let a = serde_json::to_vec(&run(&sc).unwrap().json).unwrap();
        let b = serde_json::to_vec(&run(&sc).unwrap().json).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scenario_json_round_trip() {
        let sc = sigma_scenario();
        let s = serde_json::to_string(&sc).unwrap();
        let back: Scenario = serde_json::from_str(&s).unwrap();
        assert_eq!(back.experiment, Experiment::Sigma);
        assert_eq!(back.grids, sc.grids);
    }

    #[test]
    fn malformed_scenario_is_input_error() {
        let bad = serde_json::from_str::<Scenario>("{\"experiment\": \"sigma\"}");
        assert!(bad.is_err());
        let err = Error::Json(bad.unwrap_err());
        assert_eq!(exit_code_for(&err), 3);
    }

    #[test]
    fn empty_sweep_rejected() {
        let sc = sigma_scenario();
        let err = sweep(&sc, "h", &[]).unwrap_err();
        assert_eq!(exit_code_for(&err), 3);
        let err = sweep(&sc, "nonsense", &[0.1]).unwrap_err();
        assert_eq!(exit_code_for(&err), 3);
    }

    #[test]
    fn tn_same_class_is_input_error() {
        let mut sc = sigma_scenario();
        sc.experiment = Experiment::TnDistance;
        sc.config_v = sc.config.clone();
        sc.n_list = Some(vec![9]);
        let err = run(&sc).unwrap_err();
        assert_eq!(exit_code_for(&err), 3);
    }

    #[test]
    fn write_outputs_creates_files() {
        let dir = std::env::temp_dir().join(format!("s1maps-test-{}", std::process::id()));
        let out = run(&sigma_scenario()).unwrap();
        let files = write_outputs(&dir, &out).unwrap();
        assert!(files.iter().any(|f| f.ends_with("results.json")));
        assert!(files.iter().any(|f| f.ends_with("meta.json")));
        std::fs::remove_dir_all(&dir).ok();
    }
}
