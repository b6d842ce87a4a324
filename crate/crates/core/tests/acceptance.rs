//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;

use grazing_core::dmaps::{distance, pdm_analytic, pdm_numeric, zdm_analytic, zdm_numeric, GrazingContext, MapOptions};
use grazing_core::fit::{fit_power_law, log_space};
use grazing_core::flow::{first_crossing, Direction, Functional, IntegratorOptions};
use grazing_core::grazing::pi3_point;
use grazing_core::lie::{lie_derivatives, lie_fd_check, lie_value};
use grazing_core::perturb::{brute_root_oracle, perturbed_roots};
use grazing_core::sysdsl::HybridSystem;
use grazing_core::systems::builtin;
use rand::{Rng, SeedableRng};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn system(name: &str) -> HybridSystem {
    builtin(name).unwrap().system
}

const ORDER4: [&str; 2] = ["monomial4", "paper-hamiltonian"];

fn sweep_grid() -> Vec<f64> {
    log_space(1e-8, 1e-4, 9)
}

fn x1_of(sys: &HybridSystem, eps: f64) -> Vec<f64> {
    pi3_point(sys, &[0.0, 0.0], eps, None).unwrap().state
}

fn grazing_constants() -> Outcome {
    let mut worst = 0.0_f64;
    let mut l4_err = 0.0_f64;
    for xi in [0.05, 0.1, 0.5] {
        let sys = system("paper-hamiltonian").with_param("xi", xi).unwrap();
        let t = lie_derivatives(&sys, &[0.0, 0.0], 4).unwrap();
        worst = worst.max(t.values[1..4].iter().fold(0.0, |m, v| m.max(v.abs())));
        l4_err = l4_err.max((t.values[4] - 6.0).abs());
    }
    outcome(worst <= 1e-10 && l4_err <= 1e-8, format!("max |L^1..3 H| = {worst:.1e}, max |L^4 H - 6| = {l4_err:.1e}"))
}

fn pi3_slope() -> Outcome {
    let xi = 0.1;
    let sys = system("paper-hamiltonian").with_param("xi", xi).unwrap();
    let (e1, e2) = (1e-6, 1e-5);
    let a = x1_of(&sys, e1)[0];
    let b = x1_of(&sys, e2)[0];
    let slope = (b - a) / (e2 - e1);
    let want = -32.0 * xi * xi * xi / 3.0;
    let rel = ((slope - want) / want).abs();
    outcome(rel <= 0.01, format!("measured slope {slope:.6e}, expected {want:.6e} (relative error {rel:.2})"))
}

fn impact_time_law() -> Outcome {
    let eps = 1e-4;
    let opts = IntegratorOptions::default();
    let hit = first_crossing(&system("monomial4"), &[0.0, -eps], Functional::Boundary, Direction::Backward, 1.0, &opts).unwrap();
    let exact = -(2.0 * eps / 3.0_f64).powf(0.25);
    let err = (hit.time - exact).abs();
    let mut pass = err <= 1e-9;
    let mut detail = format!("monomial4 delta = {:.10} (error {err:.1e})", hit.time);
    for name in ORDER4 {
        let sys = system(name);
        let grid = sweep_grid();
        let deltas: Vec<f64> = grid
            .iter()
            .map(|&e| first_crossing(&sys, &x1_of(&sys, e), Functional::Boundary, Direction::Backward, 1.0, &opts).unwrap().time)
            .collect();
        let fit = fit_power_law("delta", &grid, &deltas, None).unwrap();
        pass &= (fit.slope - 0.25).abs() <= 0.02;
        detail += &format!("; {name} slope {:.4}", fit.slope);
    }
    outcome(pass, detail)
}

fn zdm_leading_order() -> Outcome {
    let opts = MapOptions::default();
    let mut pass = true;
    let mut detail = String::new();
    for name in ORDER4 {
        let sys = system(name);
        let grid = sweep_grid();
        let dist: Vec<f64> = grid
            .iter()
            .map(|&e| {
                let x1 = x1_of(&sys, e);
                distance(zdm_numeric(&sys, &x1, e, &opts).unwrap().x4.as_ref().unwrap(), &x1)
            })
            .collect();
        let fit = fit_power_law("zdm", &grid, &dist, None).unwrap();
        pass &= (fit.slope - 0.75).abs() <= 0.03;
        detail += &format!("{name} slope {:.4}; ", fit.slope);
    }
    let ctx = GrazingContext::new(system("monomial4"), &[0.0, 0.0]).unwrap();
    let x4 = zdm_analytic(&ctx, &[0.0, -1e-4], 1e-4).unwrap().x4.unwrap();
    pass &= (x4[0] + 4.4267e-3).abs() <= 1e-7;
    detail += &format!("monomial4 analytic x4_1 = {:.6e}", x4[0]);
    outcome(pass, detail)
}

fn remainder_slopes() -> Outcome {
    let opts = MapOptions::default();
    let mut pass = true;
    let mut detail = String::new();
    for name in ORDER4 {
        let sys = system(name);
        let ctx = GrazingContext::new(sys.clone(), &[0.0, 0.0]).unwrap();
        let grid = sweep_grid();
        let (mut gz, mut gp) = (Vec::new(), Vec::new());
        for &e in &grid {
            let x1 = x1_of(&sys, e);
            let num = pdm_numeric(&sys, &x1, e, &opts).unwrap();
            let ana = pdm_analytic(&ctx, &x1, e).unwrap();
            gz.push(distance(num.x4.as_ref().unwrap(), ana.x4.as_ref().unwrap()));
            gp.push(distance(num.x5.as_ref().unwrap(), ana.x5.as_ref().unwrap()));
        }
        let fz = fit_power_law("gap_zdm", &grid, &gz, None).unwrap();
        let fp = fit_power_law("gap_pdm", &grid, &gp, None).unwrap();
        pass &= fz.slope >= 0.95 && fp.slope >= 0.95;
        detail += &format!("{name} zdm {:.4} pdm {:.4}; ", fz.slope, fp.slope);
    }
    outcome(pass, detail.trim_end_matches("; ").into())
}

fn pdm_projection() -> Outcome {
    let opts = MapOptions::default();
    let mut worst = 0.0_f64;
    for name in ORDER4 {
        let sys = system(name);
        for e in sweep_grid() {
            let r = pdm_numeric(&sys, &x1_of(&sys, e), e, &opts).unwrap();
            worst = worst.max(lie_value(&sys, r.x5.as_ref().unwrap(), 3).unwrap().abs());
        }
    }
    let eps = 1e-4;
    let sys = system("monomial4");
    let ctx = GrazingContext::new(sys.clone(), &[0.0, 0.0]).unwrap();
    let x1 = [0.0, -eps];
    let analytic = pdm_analytic(&ctx, &x1, eps).unwrap().x5.unwrap();
    let numeric = pdm_numeric(&sys, &x1, eps, &opts).unwrap().x5.unwrap();
    let gap = distance(&numeric, &x1);
    let bound = 1e-2 * eps.powf(0.75);
    outcome(
        worst <= 1e-10 && analytic == x1 && gap <= bound,
        format!(
            "max |L^3 H(x5)| = {worst:.1e}; analytic fixes x1: {}; |pdm_numeric - x1| = {gap:.3e} vs bound {bound:.1e}",
            analytic == x1
        ),
    )
}

fn identity_gates() -> Outcome {
    let opts = MapOptions::default();
    let bound = 10.0 * opts.tolerance_scale();
    let mut worst = 0.0_f64;
    let mut fixed = true;
    for name in ORDER4 {
        let base = system(name);
        let sys = base.with_zero_reset();
        for e in sweep_grid() {
            let x1 = x1_of(&sys, e);
            let r = pdm_numeric(&sys, &x1, e, &opts).unwrap();
            worst = worst.max(distance(r.x4.as_ref().unwrap(), &x1));
            worst = worst.max(distance(r.x5.as_ref().unwrap(), &x1));
        }
        let star = [0.0, 0.0];
        let r = pdm_numeric(&base, &star, 0.0, &opts).unwrap();
        let ctx = GrazingContext::new(base, &star).unwrap();
        let a = pdm_analytic(&ctx, &star, 0.0).unwrap();
        fixed &= r.x4.unwrap() == star && r.x5.unwrap() == star && a.x4.unwrap() == star && a.x5.unwrap() == star;
    }
    outcome(worst <= bound && fixed, format!("W = 0 max deviation {worst:.1e} (bound {bound:.0e}); eps = 0 fixes x*: {fixed}"))
}

fn lie_scaling_on_pi3() -> Outcome {
    let sys = system("paper-hamiltonian");
    let grid = sweep_grid();
    let mut pass = true;
    let mut detail = String::new();
    for i in [1, 2] {
        let vals: Vec<f64> = grid.iter().map(|&e| lie_value(&sys, &x1_of(&sys, e), i).unwrap()).collect();
        let fit = fit_power_law("lie", &grid, &vals, None).unwrap();
        pass &= fit.slope >= 0.95;
        detail += &format!("L^{i} H slope {:.4}; ", fit.slope);
    }
    outcome(pass, detail.trim_end_matches("; ").into())
}

fn appendix_roots() -> Outcome {
    let grid = log_space(1e-6, 1e-2, 9);
    let errs: Vec<f64> = grid
        .iter()
        .map(|&e| {
            let fam = perturbed_roots(|d| d, |j| [0.0, 4.0][j], 1.0, 1, e).unwrap();
            let brute = brute_root_oracle(|d| e * d + d.powi(4) - 1.0, (0.5, 1.5)).unwrap();
            (fam.roots[0].re - brute).abs()
        })
        .collect();
    let fit = fit_power_law("root", &grid, &errs, None).unwrap();
    let pair = perturbed_roots(|_| -1.0, |j| [0.0, 0.0, 2.0][j], 0.0, 2, 1e-4).unwrap();
    let exact = pair.real_roots() == vec![1e-4_f64.sqrt(), -1e-4_f64.sqrt()];
    outcome(fit.slope >= 1.9 && exact, format!("m=1 slope {:.4}; m=2 pair exact: {exact}", fit.slope))
}

fn lie_cross_validation() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(20);
    let mut worst = 0.0_f64;
    for name in ["paper-hamiltonian", "monomial4", "parabola2"] {
        let sys = system(name);
        for _ in 0..100 {
            let x = [rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)];
            let jet = lie_derivatives(&sys, &x, 4).unwrap();
            let fd = lie_fd_check(&sys, &x, 4, None).unwrap();
            for k in 0..=4 {
                let rel = (jet.values[k] - fd.values[k]).abs() / jet.values[k].abs().max(1.0);
                worst = worst.max(rel);
            }
        }
    }
    outcome(worst <= 1e-5, format!("max relative disagreement {worst:.1e} over 300 points"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("grazing-point constants", grazing_constants),
        ("Pi3 slope", pi3_slope),
        ("impact-time law", impact_time_law),
        ("ZDM leading order", zdm_leading_order),
        ("analytic-vs-numeric remainder", remainder_slopes),
        ("PDM projection", pdm_projection),
        ("identity gates", identity_gates),
        ("Lie scaling on Pi3", lie_scaling_on_pi3),
        ("perturbed roots", appendix_roots),
        ("Lie engine cross-validation", lie_cross_validation),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name}: {} [{:.1}s]", i + 1, o.detail, start.elapsed().as_secs_f64());
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
