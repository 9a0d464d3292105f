// scratch calibration runs for the acceptance tolerances (deleted before release)
use s1maps::fields::*;
use s1maps::geometry::*;
use s1maps::matching::Configuration;
use s1maps::sigma::*;
use std::f64::consts::PI;
use std::time::Instant;

fn cfg(entries: &[((f64, f64), i32)]) -> Configuration {
    Configuration::new(entries.iter().map(|((x, y), d)| (Point::new(*x, *y), *d)).collect()).unwrap()
}

fn main() {
    let d = Domain::unit_disc();
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("all");

    if which == "all" || which == "energy" {
        println!("== criterion 3: closed-form energies ==");
        let single = cfg(&[((0.0, 0.0), 1)]);
        for p in [1.0, 1.25, 1.5] {
            let exact = 2.0 * PI / (2.0 - p);
            let mut errs = Vec::new();
            for h in [1.0 / 128.0, 1.0 / 256.0, 1.0 / 512.0] {
                let g = Grid::build_centered(&d, h).unwrap();
                let u = canonical_field(&single, &d, &g).unwrap();
                let t = Instant::now();
                let e = energy_lp(&u, p).unwrap();
                errs.push((e.value - exact).abs());
                println!(
                    "p={p} h=1/{:.0} value={:.6} exact={:.6} rel={:.5} ({:?})",
                    1.0 / h,
                    e.value,
                    exact,
                    (e.value - exact).abs() / exact,
                    t.elapsed()
                );
            }
            println!("  ratios: {:.3}, {:.3}", errs[0] / errs[1], errs[1] / errs[2]);
        }
    }

    if which == "all" || which == "sigma" {
        println!("== criterion 4: variational sigma at h=1/128 ==");
        let configs: Vec<(&str, Configuration)> = vec![
            ("single", cfg(&[((0.0, 0.0), 1)])),
            ("dipole-0.5", cfg(&[((0.0, 0.0), 1), ((0.5, 0.0), -1)])),
            ("boundary-pair", cfg(&[((0.9, 0.0), 1), ((-0.9, 0.0), -1)])),
            ("degree-2", cfg(&[((0.0, 0.0), 2)])),
            (
                "three-point",
                cfg(&[((0.3, 0.2), 1), ((-0.4, 0.1), 1), ((0.1, -0.4), -1)]),
            ),
        ];
        let g = Grid::build_centered(&d, 1.0 / 128.0).unwrap();
        let settings = SolverSettings::default();
        for (name, c) in &configs {
            let t = Instant::now();
            let est = sigma_of_config(c, &d, &g, &settings).unwrap();
            println!(
                "{name:>14}: exact={:.6} dual={:.6} var={:.6} rel={:.4} iters={} gap={:.2e} ({:?})",
                est.exact,
                est.dual,
                est.variational,
                (est.variational - est.exact).abs() / est.exact,
                est.iterations,
                est.gap,
                t.elapsed()
            );
        }
        // smooth field
        let u = plane_wave(4, &g);
        let t = Instant::now();
        let r = sigma_variational(&u, &settings).unwrap();
        println!(
            "  smooth plane_wave(4): var={:.6} (≤ {:.4}?) iters={} ({:?})",
            r.value,
            0.02 * 2.0 * PI,
            r.iterations,
            t.elapsed()
        );
    }

    if which == "all" || which == "avg" {
        println!("== criterion 6: averaging identity Q=256 h=1/128 ==");
        let g = Grid::build_centered(&d, 1.0 / 128.0).unwrap();
        for (name, c) in [
            ("single", cfg(&[((0.0, 0.0), 1)])),
            ("two-sing", cfg(&[((0.3, 0.0), 1), ((-0.3, 0.2), -1)])),
        ] {
            let u = canonical_field(&c, &d, &g).unwrap();
            let t = Instant::now();
            let rep = averaging_identity_check(&u, 256).unwrap();
            println!(
                "{name:>9}: lhs={:.5} rhs={:.5} rel={:.5} ({:?})",
                rep.lhs, rep.rhs, rep.rel_error, t.elapsed()
            );
        }
    }

    if which == "all" || which == "proj" {
        println!("== criterion 5b: projection sandwich on near-minimizers ==");
        let g = Grid::build_centered(&d, 1.0 / 128.0).unwrap();
        let settings = SolverSettings::default();
        for (name, c) in [
            ("single", cfg(&[((0.0, 0.0), 1)])),
            ("dipole-0.5", cfg(&[((0.0, 0.0), 1), ((0.5, 0.0), -1)])),
        ] {
            let sigma = s1maps::matching::sigma_exact(&c, &d).unwrap();
            let t = Instant::now();
            let (w, _) = near_minimizer(&c, &d, &g, &settings).unwrap();
            let pd = projection_distance(&w, 256).unwrap();
            println!(
                "{name:>10}: Σ={:.4} proj={:.4} band=[{:.4},{:.4}] ({:?})",
                sigma,
                pd.value,
                2.0 / PI * sigma * 0.95,
                sigma * 1.05,
                t.elapsed()
            );
        }
    }

    if which == "all" || which == "tn" {
        println!("== criterion 8: tn ratios h=1/128 ==");
        let g = Grid::build_centered(&d, 1.0 / 128.0).unwrap();
        let settings = SolverSettings::default();
        let u0 = cfg(&[((0.0, 0.0), 1)]);
        let t = Instant::now();
        let rep =
            tn_distance_experiment(&u0, &Configuration::empty(), &[9, 25, 49], &d, &g, &settings)
                .unwrap();
        for r in &rep.rows {
            println!("n={:>2} eps={:.5} diff={:.4} ratio={:.4}", r.n, r.eps, r.diff, r.ratio);
        }
        println!("  ({:?})", t.elapsed());
    }

    if which == "all" || which == "growth" {
        println!("== criterion 10: growth ==");
        let v0 = cfg(&[((0.0, 0.0), 1)]);
        for h in [1.0 / 256.0, 1.0 / 512.0] {
            for p in [1.5, 1.0] {
                let t = Instant::now();
                let rep = growth_experiment(&v0, p, &[4, 8, 16, 32], &d, h).unwrap();
                print!("p={p} h=1/{:.0}: ", 1.0 / h);
                for r in &rep.rows {
                    print!("({}, {:.4}, w={:.3}) ", r.n, r.value, r.best_width);
                }
                println!("slope={:.4} Σ={:.4} ({:?})", rep.fitted_slope, rep.sigma_v0, t.elapsed());
            }
        }
    }

    if which == "all" || which == "dist" {
        println!("== dist bounds 4|a| case ==");
        let settings = SolverSettings::default();
        let u0 = cfg(&[((0.0, 0.0), 1)]);
        let v0 = cfg(&[((0.5, 0.0), 1)]);
        for h in [1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0] {
            let g = Grid::build_centered(&d, h).unwrap();
            let t = Instant::now();
            let b = dist_bounds(&u0, &v0, 1.0, &d, &g, &settings).unwrap();
            println!(
                "h=1/{:.0}: lower={:.4} upper={:.4} ratio={:.4} [{}] ({:?})",
                1.0 / h,
                b.lower,
                b.upper,
                b.upper / b.lower,
                b.witness,
                t.elapsed()
            );
        }
    }

    if which == "all" || which == "pinf" {
        println!("== p-infimum at p=1.5 ==");
        let settings = SolverSettings::default();
        let single = cfg(&[((0.0, 0.0), 1)]);
        for h in [1.0 / 64.0, 1.0 / 128.0] {
            let g = Grid::build_centered(&d, h).unwrap();
            let t = Instant::now();
            let rep = p_infimum_variational(&single, &d, &g, 1.5, &settings).unwrap();
            let exact = (2.0 * PI / 0.5f64).powf(1.0 / 1.5);
            println!(
                "h=1/{:.0}: norm={:.5} exact={:.5} rel={:.4} iters={} ({:?})",
                1.0 / h,
                rep.norm,
                exact,
                (rep.norm - exact).abs() / exact,
                rep.iterations,
                t.elapsed()
            );
        }
    }

    if which == "all" || which == "dual" {
        println!("== criterion 2 timing: 200 random duals ==");
        use s1maps::matching::*;
        let rect = Domain::Rectangle { x0: -1.0, x1: 1.5, y0: -0.5, y1: 1.0 };
        let mut state = 0xdeadbeefcafef00du64;
        let mut rnd = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let t = Instant::now();
        let mut worst: f64 = 0.0;
        for trial in 0..200 {
            let domain = if trial % 2 == 0 { d.clone() } else { rect.clone() };
            let m = 1 + trial % 6;
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            for _ in 0..m {
                for side in [&mut pos, &mut neg] {
                    side.push(if rnd() < 0.2 {
                        Location::Boundary
                    } else {
                        loop {
                            let (x0b, x1b, y0b, y1b) = domain.bounding_box();
                            let p = Point::new(
                                x0b + (x1b - x0b) * rnd(),
                                y0b + (y1b - y0b) * rnd(),
                            );
                            if domain.contains(p) && domain.boundary_distance(p).unwrap() > 0.02 {
                                break Location::Point(p);
                            }
                        }
                    });
                }
            }
            let ms = SignedMultiset { positives: pos, negatives: neg };
            let primal = min_cost_matching(&ms, &domain).unwrap();
            let dual = kantorovich_dual(&ms, &domain).unwrap();
            worst = worst.max((primal.cost - dual.value).abs());
        }
        println!("200 duals: worst |primal−dual| = {:.2e} ({:?})", worst, t.elapsed());
    }
}
