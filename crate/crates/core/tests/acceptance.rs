//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits non-zero if any criterion fails.

mod common;

use common::*;
use randstate::brachistochrone::{optimal_gate_time, sweep_phi};
use randstate::entanglement::{enumerate_bipartitions, reduced_density_matrix, ProfileEvaluator};
use randstate::haar_baseline::{level_baseline, monte_carlo_baseline, sample_haar_state};
use randstate::output::{write_run, Format};
use randstate::protocol::{
    convergence_report, run_ensemble, step, with_workers, DEFAULT_FIT_HI, DEFAULT_FIT_LO,
};
use randstate::qstate::sample_haar_u2;
use randstate::{
    Convergence, GeometryKind, Level, MeasureKind, ProtocolConfig64, RngStream, StateVector64, TwoQubitGate64,
};
use std::f64::consts::{FRAC_PI_4, PI};
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = fn() -> Outcome;

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn xx_config(n: usize) -> ProtocolConfig64 {
    ProtocolConfig64::new(n, TwoQubitGate64::canonical([FRAC_PI_4, 0.0, 0.0]).gate)
}

fn haar_baselines() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut stream = RngStream::new(2024, 0);
    for (n, m) in [(2, 1), (4, 1), (4, 2), (6, 1), (6, 2), (6, 3)] {
        for measure in MeasureKind::ALL {
            let est = monte_carlo_baseline::<f64>(n, m, measure, 10_000, &mut stream).unwrap();
            let exact: f64 = level_baseline(n, m, measure).unwrap();
            worst = worst.max((est.mean - exact).abs() / est.std_error);
        }
    }
    outcome(worst < 3.0, format!("largest deviation {worst:.2} standard errors (limit 3)"))
}

fn rate_equality() -> Outcome {
    let mut c = xx_config(6);
    c.measures = MeasureKind::ALL.to_vec();
    let traj = run_ensemble(&c).unwrap();
    let report = convergence_report(&traj, c.threshold, c.confirm_window, DEFAULT_FIT_HI, DEFAULT_FIT_LO);
    let rates = |measure| -> Vec<Option<f64>> {
        (1..=3)
            .map(|m| report.get(measure, Level::Subset(m)).unwrap().decay_rate.rate())
            .collect()
    };
    let lin = rates(MeasureKind::Linear);
    let vn = rates(MeasureKind::VonNeumann);
    let lin_ok = lin.iter().all(Option::is_some) && {
        let r: Vec<f64> = lin.iter().flatten().copied().collect();
        let (lo, hi) = r.iter().fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)));
        (hi - lo) / lo <= 0.10
    };
    let vn_ok = matches!((vn[0], vn[2]), (Some(a), Some(b)) if a >= b);
    outcome(lin_ok && vn_ok, format!("linear rates {lin:.4?}, von Neumann rates {vn:.4?}"))
}

fn phi_sweep() -> Outcome {
    let grid: Vec<f64> = (1..=11).map(|k| k as f64 * PI / 12.0).collect();
    let base = xx_config(4);
    let table = sweep_phi(&base, &grid, 1.0).unwrap();
    let gates: Vec<Option<usize>> = table.rows.iter().map(|r| r.n_gates.gates()).collect();

    let min = gates.iter().flatten().min().copied();
    let at_half_pi = gates[5];
    let a = min.is_some() && at_half_pi == min;

    let b = match (table.argmin_time, table.argmin_gates) {
        (Some(t), Some(g)) => t < g && (FRAC_PI_4 - 1e-12..=5.0 * PI / 12.0 + 1e-12).contains(&t),
        _ => false,
    };

    let mut worst_sym: f64 = 0.0;
    for k in 0..grid.len() {
        if let (Some(x), Some(y)) = (gates[k], gates[grid.len() - 1 - k]) {
            worst_sym = worst_sym.max((x as f64 - y as f64).abs() / x.max(y) as f64);
        }
    }
    let c = worst_sym <= 0.15;

    let label = |p: Option<f64>| p.map_or("none".to_string(), |p| format!("{:.0}π/12", p * 12.0 / PI));
    outcome(
        a && b && c,
        format!(
            "n_gates {gates:?}; (a) min at π/2: {a} (min {min:?}, π/2 {at_half_pi:?}); \
             (b) argmin t_phys {} < argmin n_gates {} within [π/4, 5π/12]: {b}; \
             (c) worst φ/π−φ mismatch {:.0}% (limit 15%): {c}",
            label(table.argmin_time),
            label(table.argmin_gates),
            100.0 * worst_sym
        ),
    )
}

fn identity_diverges() -> Outcome {
    let mut c = ProtocolConfig64::new(4, TwoQubitGate64::entangler(0.0).unwrap());
    c.max_gates = 500;
    let traj = run_ensemble(&c).unwrap();
    let s = traj.series(MeasureKind::Linear, Level::Global).unwrap();
    let report = convergence_report(&traj, c.threshold, c.confirm_window, DEFAULT_FIT_HI, DEFAULT_FIT_LO);
    let n = report.get(MeasureKind::Linear, Level::Global).unwrap().n_gates;
    let min_delta = s.delta.iter().copied().fold(f64::MAX, f64::min);
    outcome(
        n == Convergence::NotConverged && min_delta > 0.9 && s.delta.len() == 501,
        format!("{n:?}, smallest ΔE {min_delta}"),
    )
}

fn gate_time_formula() -> Outcome {
    let t = |phi: f64, omega: f64| optimal_gate_time(phi, omega).unwrap();
    let zero = t(0.0, 1.0) == 0.0;
    let half = (t(PI / 2.0, 1.0) - PI * (3.0f64 / 8.0).sqrt()).abs() < 1e-12;
    let full = (t(PI, 1.0) - PI / 2f64.sqrt()).abs() < 1e-12;
    let grid: Vec<f64> = (0..1000).map(|k| t(k as f64 * PI / 999.0, 1.0)).collect();
    let monotone = grid.windows(2).all(|w| w[1] > w[0]);
    let rescale = (0..1000).all(|k| {
        let phi = k as f64 * PI / 999.0;
        [0.5, 2.0, 4.0, 0.25].iter().all(|&w| t(phi, w) == t(phi, 1.0) / w)
    });
    outcome(
        zero && half && full && monotone && rescale,
        format!("t(0)=0 {zero}, t(π/2) {half}, t(π) {full}, monotone {monotone}, ω-scaling exact {rescale}"),
    )
}

fn oracle_equivalence() -> Outcome {
    let mut stream = RngStream::new(6, 0);
    let mut worst_state: f64 = 0.0;
    for n in 2..=4 {
        for qi in 0..n {
            for qj in (0..n).filter(|&q| q != qi) {
                for _ in 0..100 {
                    let lambda = [0, 1, 2].map(|_| (stream.below(1 << 20) as f64 / (1 << 20) as f64 - 0.5) * PI);
                    let local = |s: &mut RngStream| {
                        randstate::qstate::TwoQubitGate::kron(&sample_haar_u2(s), &sample_haar_u2(s))
                    };
                    let (a, b) = (local(&mut stream), local(&mut stream));
                    let k = TwoQubitGate64::canonical(lambda).gate;
                    let psi = sample_haar_state::<f64>(n, &mut stream).unwrap();
                    let mut s = psi.clone();
                    let mut v = psi.amplitudes().to_vec();
                    for g in [&b, &k, &a] {
                        s.apply_two(g, qi, qj).unwrap();
                        v = matvec(&embed_two(g.matrix(), qi, qj, n), &v);
                    }
                    worst_state = worst_state.max(vec_diff(s.amplitudes(), &v));
                }
            }
        }
    }
    let mut worst_gate: f64 = 0.0;
    for i in 0..5 {
        for j in 0..5 {
            for k in 0..5 {
                let lambda = [i, j, k].map(|x| x as f64 * FRAC_PI_4 / 4.0);
                let got: Dense = TwoQubitGate64::canonical(lambda).gate.matrix().iter().map(|r| r.to_vec()).collect();
                worst_gate = worst_gate.max(max_diff(&got, &canonical_oracle(lambda)));
            }
        }
    }
    outcome(
        worst_state < 1e-12 && worst_gate < 1e-10,
        format!("apply_two error {worst_state:.1e} (limit 1e-12), canonical gate error {worst_gate:.1e} (limit 1e-10)"),
    )
}

fn geometry_ordering() -> Outcome {
    let count = |g| {
        let mut c = xx_config(6);
        c.geometry = g;
        let traj = run_ensemble(&c).unwrap();
        let report = convergence_report(&traj, c.threshold, c.confirm_window, DEFAULT_FIT_HI, DEFAULT_FIT_LO);
        report.get(MeasureKind::Linear, Level::Global).unwrap().n_gates
    };
    let nonlocal = count(GeometryKind::NonLocal);
    let open = count(GeometryKind::LocalOpen);
    let pass = match (open, nonlocal) {
        (Convergence::NotConverged, Convergence::Converged(_)) => true,
        (Convergence::Converged(a), Convergence::Converged(b)) => a >= b,
        _ => false,
    };
    outcome(pass, format!("local-open {open:?}, nonlocal {nonlocal:?}"))
}

fn determinism() -> Outcome {
    let mut c = xx_config(5);
    c.realizations = 300;
    c.max_gates = 60;
    c.measures = MeasureKind::ALL.to_vec();
    let csv = |workers: usize| -> Vec<u8> {
        with_workers(workers, || {
            let traj = run_ensemble(&c).unwrap();
            let report = convergence_report(&traj, c.threshold, c.confirm_window, DEFAULT_FIT_HI, DEFAULT_FIT_LO);
            let mut buf = Vec::new();
            write_run(&mut buf, &traj, &report, Format::Csv).unwrap();
            buf
        })
        .unwrap()
    };
    let reference = csv(1);
    let runs = [csv(2), csv(8), csv(8), csv(1)];
    let same = runs.iter().all(|r| *r == reference);
    outcome(same, format!("{} bytes, identical across 1/2/8 workers and repeat runs: {same}", reference.len()))
}

fn property_suite() -> Outcome {
    let c = xx_config(6);
    let mut stream = RngStream::new(9, 0);
    let mut s = StateVector64::zero_state(6).unwrap();
    for _ in 0..10_000 {
        step(&mut s, &c, &mut stream).unwrap();
    }
    let drift = (s.norm_sqr() - 1.0).abs();

    let mut bounds = true;
    let mut spectrum: f64 = 0.0;
    let mut mw: f64 = 0.0;
    for k in 0..1000 {
        let n = 2 + k % 5;
        let psi = sample_haar_state::<f64>(n, &mut stream).unwrap();
        let eval = ProfileEvaluator::new(n).unwrap();
        for p in eval.profiles(&psi, &MeasureKind::ALL).unwrap() {
            bounds &= p.per_level.iter().chain([&p.global]).all(|&e| (0.0..=1.0).contains(&e));
        }
        let e1 = eval.level(&psi, 1, MeasureKind::Linear).unwrap();
        mw = mw.max((e1 - meyer_wallach(psi.amplitudes(), n)).abs());
        if k < 50 {
            for m in 1..=n / 2 {
                for part in enumerate_bipartitions(n, m).unwrap() {
                    let a = reduced_density_matrix(&psi, &part).unwrap().eigenvalues();
                    let b = reduced_density_matrix(&psi, &part.complement(n).unwrap()).unwrap().eigenvalues();
                    for (x, y) in a.iter().rev().zip(b.iter().rev()) {
                        spectrum = spectrum.max((x - y).abs());
                    }
                    for z in &b[..b.len() - a.len()] {
                        spectrum = spectrum.max(z.abs());
                    }
                }
            }
        }
    }
    outcome(
        drift < 1e-8 && bounds && spectrum < 1e-10 && mw < 1e-12,
        format!(
            "norm drift {drift:.1e} over 1e4 gates, bounds hold {bounds}, \
             complement spectrum error {spectrum:.1e}, Meyer-Wallach error {mw:.1e}"
        ),
    )
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("1 Haar baseline vs Monte Carlo", haar_baselines),
        ("2 decay-rate equality (N=6)", rate_equality),
        ("3 φ sweep structure (N=4)", phi_sweep),
        ("4 divergence at φ=0", identity_diverges),
        ("5 gate-time formula", gate_time_formula),
        ("6 oracle equivalence", oracle_equivalence),
        ("7 geometry ordering (N=6)", geometry_ordering),
        ("8 determinism across workers", determinism),
        ("9 property suite", property_suite),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let t0 = Instant::now();
        let o = check();
        if !o.pass {
            failures += 1;
        }
        println!(
            "{} criterion {name}: {} [{:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t0.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
