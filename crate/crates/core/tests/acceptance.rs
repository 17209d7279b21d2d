//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fail.
//!
//! Run alone with `cargo test -p butterfly-core --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use butterfly_core::analysis::{
    asymptote_touch_point, eta, eta_prime, eta_prime_grid, gap_sweep, param_grid, McBudget, SweepConfig,
    CLOSED_FORM_TOL,
};
use butterfly_core::depol_rates::rate_parallel_depol;
use butterfly_core::dmc::{capacity, Dmc};
use butterfly_core::erasure_rates::{
    asymptotic_rates, rate_parallel, rate_parallel_assisted, rate_series, rate_single, rate_single_assisted,
};
use butterfly_core::erasure_sim::{exact_rate, simulate, Strategy};
use butterfly_core::verify::adjudicate_exponent_mode;
use butterfly_core::{binary_entropy, build_grid, closed_form_bound, multipath_bound, ChannelKind, ChannelModel};

type Outcome = (bool, String);
type McCase = (&'static str, usize, usize, Strategy, fn(f64) -> f64);

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "crossing points", limit: secs(1), run: crossing_points },
        Criterion { id: 2, name: "identity block gap", limit: secs(1), run: identity_block },
        Criterion { id: 3, name: "depolarizing dominance", limit: secs(30), run: depolarizing_dominance },
        Criterion { id: 4, name: "asymptotic erasure gap", limit: secs(1), run: asymptotic_gap },
        Criterion { id: 5, name: "max-flow vs closed form", limit: secs(10), run: maxflow_vs_closed_form },
        Criterion { id: 6, name: "exact enumeration oracle", limit: secs(5), run: enumeration_oracle },
        Criterion { id: 7, name: "monte carlo agreement", limit: secs(120), run: monte_carlo_agreement },
        Criterion { id: 8, name: "solver calibration", limit: secs(1), run: solver_calibration },
        Criterion { id: 9, name: "grid trends", limit: secs(15 * 60), run: grid_trends },
        Criterion { id: 10, name: "grid formula adjudication", limit: secs(5 * 60), run: grid_adjudication },
        Criterion { id: 11, name: "depolarizing asymptote touch point", limit: secs(60), run: touch_point },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let (ok, detail) = (c.run)();
        let took = start.elapsed();
        let in_time = took <= c.limit;
        let pass = ok && in_time;
        if !pass {
            failures += 1;
        }
        let timing = if in_time { String::new() } else { format!(" [over time limit {:?}]", c.limit) };
        println!(
            "{} criterion {:>2} {}: {detail} ({:.2}s){timing}",
            if pass { "PASS" } else { "FAIL" },
            c.id,
            c.name,
            took.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn crossing_points() -> Outcome {
    let e = eta(CLOSED_FORM_TOL).unwrap().value;
    let ep = eta_prime(CLOSED_FORM_TOL).unwrap().value;
    let analytic = 1.0 - 2f64.powf(-0.25);
    let ok = (0.1585..=0.1595).contains(&e) && (0.2435..=0.2445).contains(&ep) && (e - analytic).abs() <= 1e-4;
    (ok, format!("eta = {e:.5} (analytic {analytic:.5}), eta' = {ep:.5}"))
}

fn identity_block() -> Outcome {
    let net = build_grid(1, 1, ChannelModel::Identity).unwrap();
    let flow = multipath_bound(&net).per_receiver;
    let closed = closed_form_bound(1, 1, ChannelModel::Identity).unwrap();
    let r_c = rate_parallel_depol(1, 0.0, false).unwrap();
    let ok = closed == 1.5 && (flow - closed).abs() <= 1e-9 && (r_c - 2.0).abs() <= 1e-6;
    (ok, format!("R_Q closed {closed}, max-flow {flow}, R_C {r_c:.9}"))
}

fn depolarizing_dominance() -> Outcome {
    let grid = param_grid(0.0, 1.0, 0.01).unwrap();
    let table = gap_sweep(&SweepConfig::new(ChannelKind::Depolarizing, 1, 1), &grid).unwrap();
    let nonpositive: Vec<String> = table
        .rows
        .iter()
        .filter(|r| r.gap.unwrap() <= 0.0)
        .map(|r| format!("p={:.2} gap={:.3e}", r.param, r.gap.unwrap()))
        .collect();
    let (argmax, max) = table.max_gap().unwrap();
    let ok = table.rows.len() == 101 && nonpositive.is_empty() && (max - 0.5).abs() <= 0.01 && argmax == 0.0;
    let mut detail = format!("{} points, max gap {max:.6} at p={argmax}", table.rows.len());
    if !nonpositive.is_empty() {
        detail.push_str(&format!("; gap not > 0 at {}", nonpositive.join(", ")));
    }
    (ok, detail)
}

fn asymptotic_gap() -> Outcome {
    let lim = asymptotic_rates(0.0).unwrap();
    let gap = rate_parallel_assisted(100, 0.0).unwrap() - closed_form_bound(100, 1, ChannelModel::Identity).unwrap();
    let ok = (lim.quantum_bound, lim.classical, lim.classical_assisted) == (2.0, 3.0, 3.0) && (gap - 1.0).abs() <= 0.02;
    (
        ok,
        format!(
            "limits ({}, {}, {}), gap at nx=100 {gap:.5}",
            lim.quantum_bound, lim.classical, lim.classical_assisted
        ),
    )
}

fn maxflow_vs_closed_form() -> Outcome {
    let channels = [
        ChannelModel::Identity,
        ChannelModel::Depolarizing(0.1),
        ChannelModel::Depolarizing(0.4),
        ChannelModel::Erasure(0.1),
        ChannelModel::Erasure(0.5),
    ];
    let mut worst: f64 = 0.0;
    for nx in 1..=5 {
        for ny in 1..=5 {
            for ch in channels {
                let flow = multipath_bound(&build_grid(nx, ny, ch).unwrap()).per_receiver;
                let expected = (2 * nx + 1) as f64 / (nx + 1) as f64 * ch.ree();
                worst = worst.max((flow - expected).abs());
            }
        }
    }
    (worst <= 1e-9, format!("max deviation {worst:.2e} over 125 cases"))
}

fn enumeration_oracle() -> Outcome {
    let block = build_grid(1, 1, ChannelModel::Erasure(0.0)).unwrap();
    let ladder = build_grid(1, 2, ChannelModel::Erasure(0.0)).unwrap();
    let mut worst: f64 = 0.0;
    for e in [0.05, 0.2, 0.5] {
        worst = worst.max((exact_rate(&block, Strategy::FloodCoding, e).unwrap() - rate_single(e).unwrap()).abs());
        worst =
            worst.max((exact_rate(&block, Strategy::InterNodeCC, e).unwrap() - rate_single_assisted(e).unwrap()).abs());
        worst = worst.max((exact_rate(&ladder, Strategy::BackupNoCC, e).unwrap() - rate_series(2, e).unwrap()).abs());
    }
    let sizes = (block.edges().len(), ladder.edges().len());
    (worst <= 1e-12, format!("max deviation {worst:.2e} (2^{} and 2^{} configurations)", sizes.0, sizes.1))
}

fn monte_carlo_agreement() -> Outcome {
    let grid = |nx, ny| build_grid(nx, ny, ChannelModel::Erasure(0.0)).unwrap();
    let cases: [McCase; 6] = [
        ("flood 1x1", 1, 1, Strategy::FloodCoding, |e| rate_single(e).unwrap()),
        ("flood 3x1", 3, 1, Strategy::FloodCoding, |e| rate_parallel(3, e).unwrap()),
        ("cc 1x1", 1, 1, Strategy::InterNodeCC, |e| rate_single_assisted(e).unwrap()),
        ("cc 3x1", 3, 1, Strategy::InterNodeCC, |e| rate_parallel_assisted(3, e).unwrap()),
        ("backup 1x2", 1, 2, Strategy::BackupNoCC, |e| rate_series(2, e).unwrap()),
        ("backup 1x3", 1, 3, Strategy::BackupNoCC, |e| rate_series(3, e).unwrap()),
    ];
    let mut worst = (0.0f64, "");
    let mut bad = Vec::new();
    for (name, nx, ny, strategy, formula) in cases {
        let net = grid(nx, ny);
        for e in [0.05, 0.2, 0.5] {
            let est = simulate(&net, strategy, e, 1_000_000, 20_240_601).unwrap();
            let z = (est.mean - formula(e)).abs() / est.stderr;
            if z > worst.0 {
                worst = (z, name);
            }
            if z >= 4.0 || z.is_nan() {
                bad.push(format!("{name} eps={e} z={z:.2}"));
            }
        }
    }
    let mut detail = format!("18 cases at 1e6 trials, max |z| {:.2} ({})", worst.0, worst.1);
    if !bad.is_empty() {
        detail.push_str(&format!("; outside 4 stderr: {}", bad.join(", ")));
    }
    (bad.is_empty(), detail)
}

fn solver_calibration() -> Outcome {
    let mut worst: f64 = 0.0;
    for q in [0.01, 0.11, 0.3, 0.5] {
        let c = capacity(&Dmc::bsc(q).unwrap()).unwrap().capacity;
        worst = worst.max((c - (1.0 - binary_entropy(q).unwrap())).abs());
    }
    for e in [0.1, 0.3, 0.7] {
        let c = capacity(&Dmc::bec(e).unwrap()).unwrap().capacity;
        worst = worst.max((c - (1.0 - e)).abs());
    }
    (worst <= 1e-6, format!("max deviation {worst:.2e} over 4 BSCs and 3 BECs"))
}

fn grid_trends() -> Outcome {
    let dims: Vec<usize> = (1..=6).collect();
    let g = match eta_prime_grid(&dims, &dims, McBudget::default()) {
        Ok(g) => g,
        Err(e) => return (false, format!("error: {e}")),
    };
    let violations = g.trend_violations();
    let first_column: Vec<f64> = dims.iter().map(|&ny| g.get(1, ny).unwrap().crossing.value).collect();
    let column_decreasing = first_column.windows(2).all(|w| w[1] < w[0]);
    let (best_shape, best_rel) = dims
        .iter()
        .flat_map(|&ny| dims.iter().map(move |&nx| (nx, ny)))
        .map(|(nx, ny)| ((nx, ny), g.relative_increase(nx, ny).unwrap()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let all_positive = g.cells.iter().all(|c| c.crossing.value > 0.0);
    let ok = violations.is_empty() && column_decreasing && best_rel > 0.6 && all_positive;
    let column: Vec<String> = first_column.iter().map(|v| format!("{v:.4}")).collect();
    let mut detail = format!(
        "eta'(1, ny) = [{}], largest increase {:.1}% at {}x{}, min eta' {:.4}",
        column.join(", "),
        100.0 * best_rel,
        best_shape.0,
        best_shape.1,
        g.cells.iter().map(|c| c.crossing.value).fold(f64::INFINITY, f64::min)
    );
    if !violations.is_empty() {
        detail.push_str(&format!("; trend violations: {}", violations.join(", ")));
    }
    (ok, detail)
}

fn grid_adjudication() -> Outcome {
    match adjudicate_exponent_mode(&[(2, 2), (3, 2)], &[0.1, 0.3], 1_000_000, 20_240_601) {
        Ok(a) => (a.selected.is_some(), format!("{}; selected {:?}", a.summary(), a.selected)),
        Err(e) => (false, format!("error: {e}")),
    }
}

fn touch_point() -> Outcome {
    // the classical limit and the bound both vanish for p >= 2/3; search the
    // range where the bound is nonzero
    let t = asymptote_touch_point(&param_grid(0.0, 0.66, 0.01).unwrap()).unwrap();
    ((0.1..=0.3).contains(&t.p), format!("closest at p = {:.2}, |C_inner - 2 REE| = {:.3e}", t.p, t.residual))
}
