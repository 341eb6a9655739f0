//! Acceptance criteria 1-13. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; the process exits nonzero if
//! any criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::Path;
use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{gauss_kronrod, rel};
use srmot::atomic::{saturation_intensity, saturation_parameter, DecayRate, SrConstants, MW_PER_CM2, SI, TAU};
use srmot::config::{parse_scenario, Scenario};
use srmot::hybrid::{
    balance_bound, balance_ratio, build_reduced_liouvillian, greenred_steady_state, hybrid_evolve,
    hybrid_steady_state, HybridOptions, RateModel, Routing, SubsystemPopulations,
};
use srmot::lindblad::build_lindblad_liouvillian;
use srmot::liouvillian::{build_liouvillian, evolve, steady_state, BlochState, Component, DriveParams, SystemParams};
use srmot::mot::{optimal_detuning, optimal_detuning_slope_hz, trap_depth, MotBeam};
use srmot::scenarios::{run_balance_sweep, run_fluorescence_map};

/// Wall time of criterion 9, the reference for the runtime bound of 13.
static GAIN_SECONDS: OnceLock<f64> = OnceLock::new();

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn scenario(text: &str) -> Scenario {
    Scenario::resolve(parse_scenario(text).expect("scenario parses"), Path::new(".")).expect("scenario resolves")
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}

/// Textbook two-level excited fraction.
fn two_level(s: f64, delta: f64, gamma: f64) -> f64 {
    let d = 2.0 * delta / gamma;
    0.5 * s / (1.0 + s + d * d)
}

fn criterion_1() -> Outcome {
    let mut c = SrConstants::bundled();
    c.gamma_23 = DecayRate::ZERO;
    c.gamma_25 = DecayRate::ZERO;
    let g = c.gamma_12.value();
    let mut p = SystemParams::baseline(c.clone());
    p.gamma_blue = 1.0;
    let mut worst: f64 = 0.0;
    for s in logspace(0.1, 30.0, 10) {
        for d in linspace(-4.0 * g, 0.0, 10) {
            p.blue = DriveParams::from_saturation(s, d, c.gamma_12).unwrap();
            let n = steady_state(&build_liouvillian(&p).unwrap()).unwrap();
            let frac = n.pop(Component::N22) / n.n_blue();
            worst = worst.max(rel(frac, two_level(s, d, g)));
        }
    }
    outcome(worst <= 1e-6, format!("max relative deviation {worst:.2e} (tol 1e-6) on 10x10 grid"))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let mut c = SrConstants::bundled();
        for g in [
            &mut c.gamma_12,
            &mut c.gamma_34,
            &mut c.gamma_56,
            &mut c.gamma_36,
            &mut c.gamma_15,
            &mut c.gamma_23,
            &mut c.gamma_25,
            &mut c.gamma_45,
        ] {
            *g = DecayRate::new(g.value() * rng.gen_range(0.5..2.0)).unwrap();
        }
        let drive = |rng: &mut ChaCha8Rng, gamma: DecayRate| {
            DriveParams::from_saturation(rng.gen_range(0.0..50.0), rng.gen_range(-5.0..5.0) * gamma.value(), gamma).unwrap()
        };
        let p = SystemParams {
            blue: drive(&mut rng, c.gamma_12),
            green: drive(&mut rng, c.gamma_34),
            red: drive(&mut rng, c.gamma_56),
            gamma_blue: rng.gen_range(0.0..1e4),
            gamma_grrd: rng.gen_range(0.0..1e4),
            r_load: rng.gen_range(0.0..1e9),
            constants: c,
        };
        let a = build_liouvillian(&p).unwrap().matrix;
        let b = build_lindblad_liouvillian(&p).unwrap().matrix;
        let scale = p.constants.gamma_12.value();
        let d = (&a - &b).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale;
        worst = worst.max(d);
    }
    outcome(worst <= 1e-12, format!("max |printed - lindblad|/Gamma12 = {worst:.2e} over 100 draws (tol 1e-12)"))
}

fn criterion_3() -> Outcome {
    let base = SystemParams::baseline(SrConstants::bundled());
    let g56 = base.constants.gamma_56;
    let mut worst: f64 = 0.0;
    let mut at = (0.0, 0.0, "");
    for s56 in linspace(5.0, 31.0, 5) {
        for d in linspace(-1.0, 1.0, 5) {
            let mut p = base.clone();
            p.red = DriveParams::from_saturation(s56, d * g56.value(), g56).unwrap();
            let full = steady_state(&build_liouvillian(&p).unwrap()).unwrap();
            let hyb = hybrid_steady_state(&p, HybridOptions::default()).unwrap().state;
            for (name, a, b) in [
                ("N_blue", hyb.n_blue(), full.n_blue()),
                ("N_grrd", hyb.n_grrd(), full.n_grrd()),
                ("N22", hyb.pop(Component::N22), full.pop(Component::N22)),
                ("N44", hyb.pop(Component::N44), full.pop(Component::N44)),
            ] {
                let r = rel(a, b);
                if r > worst {
                    worst = r;
                    at = (s56, d, name);
                }
            }
        }
    }
    outcome(
        worst <= 0.01,
        format!("max hybrid/full deviation {:.3}% ({} at s56={}, d56={}G56) (tol 1%)", 100.0 * worst, at.2, at.0, at.1),
    )
}

/// First time the sampled series crosses `level`, interpolated in log t.
fn crossing(times: &[f64], ys: &[f64], level: f64) -> Option<f64> {
    for i in 1..times.len() {
        if (ys[i - 1] - level) * (ys[i] - level) <= 0.0 && ys[i] != ys[i - 1] {
            let f = (level - ys[i - 1]) / (ys[i] - ys[i - 1]);
            return Some((times[i - 1].ln() + f * (times[i].ln() - times[i - 1].ln())).exp());
        }
    }
    None
}

/// Time after which the series stays within `tol` of `target`.
fn settle_time(times: &[f64], ys: &[f64], target: f64, tol: f64) -> f64 {
    let mut last_out = 0.0;
    for (t, y) in times.iter().zip(ys) {
        if (y - target).abs() > tol * target.abs() {
            last_out = *t;
        }
    }
    last_out
}

fn criterion_4() -> Outcome {
    let p = SystemParams::baseline(SrConstants::bundled());
    let l = build_liouvillian(&p).unwrap();
    let g12 = p.constants.gamma_12;
    let blue_eq = two_level(p.blue.saturation(g12), p.blue.delta, g12.value());

    // full model from N11(0) = 1e6 in the ground state
    let times = logspace(1e-9, 10.0, 2001);
    let ev = evolve(&l, &BlochState::ground(1e6), &times).unwrap();
    let k100 = times.iter().position(|t| *t >= 100e-9 * (1.0 - 1e-12)).unwrap();
    let at100 = evolve(&l, &BlochState::ground(1e6), &[100e-9]).unwrap().states[0];
    let dev_a = rel(at100.pop(Component::N22) / at100.n_blue(), blue_eq);
    // no later sample may leave the 5% band either
    let dev_a_after = ev.states[k100..]
        .iter()
        .map(|s| rel(s.pop(Component::N22) / s.n_blue(), blue_eq))
        .fold(0.0, f64::max);
    let pass_a = dev_a <= 0.05 && dev_a_after <= 0.05;

    let ss = steady_state(&l).unwrap();
    let grrd: Vec<f64> = ev.states.iter().map(|s| s.n_grrd()).collect();
    let total: Vec<f64> = ev.states.iter().map(|s| s.total()).collect();
    // N_grrd overshoots its final value when starting from 1e6 atoms, so the
    // rise is measured against its maximum
    let peak = grrd.iter().copied().fold(0.0, f64::max);
    let t_half = crossing(&times, &grrd, 0.5 * peak).unwrap_or(f64::NAN);
    let t_half_final = crossing(&times, &grrd, 0.5 * ss.n_grrd()).unwrap_or(f64::NAN);
    let pass_b = (1e-4..=1e-2).contains(&t_half);
    let t_settle = settle_time(&times, &total, ss.total(), 0.05);
    let pass_c = t_settle > 0.1;

    let hyb = hybrid_evolve(&p, HybridOptions::default(), SubsystemPopulations { n_blue: 1e6, n_grrd: 0.0 }, &times).unwrap();
    let htot: Vec<f64> = hyb.populations.iter().map(|n| n.total()).collect();
    let h_settle = settle_time(&times, &htot, *htot.last().unwrap(), 0.05);

    outcome(
        pass_a && pass_b && pass_c,
        format!(
            "(a) rho22 at 100 ns off by {:.2}% [{}]; (b) N_grrd half-rise {:.3} ms (half of final at {:.3} ms) [{}]; \
             (c) total settles within 5% at {:.2} ms, need > 100 ms [{}] (hybrid: {:.2} ms)",
            100.0 * dev_a,
            if pass_a { "ok" } else { "FAIL" },
            1e3 * t_half,
            1e3 * t_half_final,
            if pass_b { "ok" } else { "FAIL" },
            1e3 * t_settle,
            if pass_c { "ok" } else { "FAIL" },
            1e3 * h_settle,
        ),
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let c = SrConstants::bundled();
    let mut violations = 0;
    let mut tightest: f64 = 0.0;
    for _ in 0..1000 {
        let mut p = SystemParams::baseline(c.clone());
        p.blue = DriveParams::from_saturation(rng.gen_range(0.0..100.0), rng.gen_range(-5.0..5.0) * c.gamma_12.value(), c.gamma_12).unwrap();
        p.green = DriveParams::from_saturation(rng.gen_range(0.01..50.0), rng.gen_range(-5.0..5.0) * c.gamma_34.value(), c.gamma_34).unwrap();
        p.red = DriveParams::from_saturation(rng.gen_range(0.0..50.0), rng.gen_range(-5.0..5.0) * c.gamma_56.value(), c.gamma_56).unwrap();
        let gamma_grrd = 10f64.powf(rng.gen_range(-1.0..4.0));
        let rho22 = two_level(p.blue.saturation(c.gamma_12), p.blue.delta, c.gamma_12.value());
        let gr = greenred_steady_state(&build_reduced_liouvillian(&p).unwrap()).unwrap();
        let rho55 = gr.rho55();
        let ratio = balance_ratio(rho22, rho55, &c, gamma_grrd).unwrap();
        let bound = balance_bound(&c, gamma_grrd, rho55).unwrap();
        // same ratio from the rate-equation steady state with R25 dropped
        let mut rates = srmot::hybrid::pump_rates(rho22, rho55, &c);
        rates.r_25 = 0.0;
        let n = RateModel::new(rates, rng.gen_range(0.1..1e3), gamma_grrd, 1e8).with_routing(Routing::AsPrinted).steady_state().unwrap();
        let rate_ratio = n.n_grrd / n.n_blue;
        for r in [ratio, rate_ratio] {
            if r > bound * (1.0 + 1e-12) {
                violations += 1;
            }
            tightest = tightest.max(r / bound);
        }
    }
    outcome(violations == 0, format!("{violations} violations in 1000 draws; max ratio/bound = {tightest:.4}"))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let c = SrConstants::bundled();
    let times = logspace(1e-9, 1.0, 91);
    let (mut worst_n, mut worst_h): (f64, f64) = (0.0, 0.0);
    for _ in 0..50 {
        let mut p = SystemParams::baseline(c.clone());
        p.blue = DriveParams::from_saturation(rng.gen_range(0.0..30.0), rng.gen_range(-4.0..4.0) * c.gamma_12.value(), c.gamma_12).unwrap();
        p.green = DriveParams::from_saturation(rng.gen_range(0.0..30.0), rng.gen_range(-4.0..4.0) * c.gamma_34.value(), c.gamma_34).unwrap();
        p.red = DriveParams::from_saturation(rng.gen_range(0.0..30.0), rng.gen_range(-4.0..4.0) * c.gamma_56.value(), c.gamma_56).unwrap();
        p.gamma_blue = 0.0;
        p.gamma_grrd = 0.0;
        p.r_load = 0.0;
        let mut n0 = BlochState::zeros();
        for comp in Component::POPULATIONS {
            n0.set(comp, rng.gen_range(0.0..1e6).into());
        }
        let total0 = n0.total();
        let ev = evolve(&build_liouvillian(&p).unwrap(), &n0, &times).unwrap();
        for s in &ev.states {
            worst_n = worst_n.max(rel(s.total(), total0));
            worst_h = worst_h.max(s.structure_defect());
        }
    }
    outcome(
        worst_n <= 1e-12 && worst_h <= 1e-9,
        format!("max population drift {worst_n:.2e} (tol 1e-12), max structure defect {worst_h:.2e} (tol 1e-9), 50 draws x 91 times"),
    )
}

/// Force of both beams at rest, written out from the Lorentzian pair.
fn oracle_force(z: f64, beam: &MotBeam, b_grad: f64) -> f64 {
    if z.abs() > beam.w {
        return 0.0;
    }
    let x = SI.mu_b * b_grad * 100.0 * z;
    let l = |det: f64| 1.0 / (1.0 + beam.s + 4.0 * (det / beam.gamma).powi(2));
    SI.hbar * beam.k * beam.gamma * beam.s / 2.0 * (l(beam.delta - x) - l(beam.delta + x))
}

fn criterion_7() -> Outcome {
    let c = SrConstants::bundled();
    let beams = [
        ("blue", MotBeam::new(c.gamma_12, c.lambda_12, 2.0, -2.0 * c.gamma_12.value(), 6.0e-3).unwrap()),
        ("green", MotBeam::new(c.gamma_34, c.lambda_34, 6.6, -2.0 * c.gamma_34.value(), 2.3e-3).unwrap()),
    ];
    let mut worst: f64 = 0.0;
    let mut printed_worst: f64 = 0.0;
    for (_, beam) in &beams {
        for dg in linspace(-4.0, -0.25, 10) {
            let b = beam.with_delta(dg * beam.gamma);
            for bg in logspace(1.0, 600.0, 10) {
                let closed = trap_depth(&b, bg).unwrap();
                let (quad, _) = gauss_kronrod(&|z| oracle_force(z, &b, bg), -b.w, 0.0, 1e-13, 0.0);
                worst = worst.max(rel(closed, quad));
                // as printed: opposite sign and sqrt(1+s^2) in the arctan scale
                let a = SI.mu_b * bg * 100.0;
                let g = b.gamma / 2.0 * (1.0 + b.s * b.s).sqrt();
                let sum: f64 = [(-1.0, -1.0), (0.0, 1.0), (0.0, 1.0), (1.0, -1.0)]
                    .iter()
                    .map(|(xi, sign)| sign * ((b.delta + xi * b.w * a) / g).atan())
                    .sum();
                let printed = SI.hbar * b.k / 4.0 * b.gamma.powi(2) * b.s / (a * (1.0 + b.s).sqrt()) * sum;
                printed_worst = printed_worst.max(rel(-printed, quad));
            }
        }
    }
    outcome(
        worst <= 1e-6,
        format!(
            "max |closed - quadrature| relative {worst:.2e} (tol 1e-6) on 2 x 10x10 grid; \
             printed depth formula taken literally deviates up to {:.1}%",
            100.0 * printed_worst
        ),
    )
}

fn criterion_8() -> Outcome {
    let c = SrConstants::bundled();
    let beam = MotBeam::new(c.gamma_34, c.lambda_34, 4.0, -c.gamma_34.value(), 2.2e-3).unwrap();
    let slope = optimal_detuning_slope_hz(&beam);
    // finite-difference slope of the curve far out
    let fd = (optimal_detuning(&beam, 2e4).unwrap() - optimal_detuning(&beam, 1e4).unwrap()) / 1e4 / TAU;
    let dev = rel(slope, -180e3);
    outcome(
        dev <= 0.10 && rel(fd, slope) < 1e-3,
        format!("asymptotic slope {:.1} kHz per G/cm (curve: {:.1}), {:.1}% from -180 (tol 10%)", slope / 1e3, fd / 1e3, 100.0 * dev),
    )
}

fn gain_map(cfg: &str) -> String {
    format!(
        r#"{{"blue": {{"s": 8.0, "waist_m": 2.9e-3, "detuning_gamma": -2.0}},
            "green": {{"s": 4.0, "waist_m": 2.2e-3}},
            "red": {{"s": 0.0}},
            "gamma_blue_per_s": 1.0,
            "green_config": "{cfg}",
            "model": "hybrid",
            "sweep": [{{"variable": "delta34_gamma", "start": -6.0, "stop": 2.0, "count": 51}},
                      {{"variable": "b_grad_g_per_cm", "start": 0.0, "stop": 300.0, "count": 51}}]}}"#
    )
}

fn criterion_9() -> Outcome {
    let peak = |cfg: &str| {
        let t = run_fluorescence_map(&scenario(&gain_map(cfg))).unwrap();
        assert!(t.failures.is_empty(), "{cfg}: {:?}", t.failures.first());
        t.column("N22[atoms]").unwrap().into_iter().fold(0.0, f64::max)
    };
    let gain = peak("gmot") / peak("grp");
    outcome((5.0..=20.0).contains(&gain), format!("peak N22 gMOT/gRP = {gain:.2} (target 10 within x2), 51x51 grid"))
}

fn criterion_10() -> Outcome {
    let mono = |v: &[f64], up: bool| {
        v.windows(2).all(|w| if up { w[1] >= w[0] * (1.0 - 1e-12) } else { w[1] <= w[0] * (1.0 + 1e-12) })
    };
    let sweep = run_balance_sweep(&scenario(
        r#"{"red": {"detuning_gamma": 0.0},
            "sweep": [{"variable": "s56", "start": 0.0, "stop": 31.0, "count": 32, "scale": "linear"}]}"#,
    ))
    .unwrap();
    let mut notes = Vec::new();
    let mut pass = sweep.failures.is_empty();
    for m in ["full", "hybrid"] {
        let g = sweep.column(&format!("{m}_N_grrd[atoms]")).unwrap();
        let b = sweep.column(&format!("{m}_N_blue[atoms]")).unwrap();
        let ok = mono(&g, true) && mono(&b, false);
        pass &= ok;
        notes.push(format!("{m} s56 monotone {}", if ok { "ok" } else { "FAIL" }));
    }
    let scan = run_balance_sweep(&scenario(
        r#"{"red": {"s": 25.0},
            "sweep": [{"variable": "delta56_gamma", "start": -3.0, "stop": 3.0, "count": 41}]}"#,
    ))
    .unwrap();
    pass &= scan.failures.is_empty();
    for m in ["full", "hybrid"] {
        let g = scan.column(&format!("{m}_N_grrd[atoms]")).unwrap();
        let b = scan.column(&format!("{m}_N_blue[atoms]")).unwrap();
        let n = g.len();
        let odd = (0..n).map(|i| rel(g[i], g[n - 1 - i]).max(rel(b[i], b[n - 1 - i]))).fold(0.0, f64::max);
        let mid = n / 2;
        let ext = g.iter().all(|v| *v <= g[mid]) && b.iter().all(|v| *v >= b[mid]);
        let ok = odd <= 1e-8 && ext;
        pass &= ok;
        notes.push(format!("{m} d56 parity {odd:.1e}, extremum at 0 {}", if ext { "ok" } else { "FAIL" }));
    }
    outcome(pass, notes.join("; "))
}

fn criterion_11() -> Outcome {
    let c = SrConstants::bundled();
    let rows = [
        ("461", c.gamma_12, c.lambda_12, 2.9e-3, 40e-3, 8.0),
        ("496", c.gamma_34, c.lambda_34, 2.2e-3, 2.8e-3, 4.0),
        ("496", c.gamma_34, c.lambda_34, 2.2e-3, 8.5e-3, 12.3),
        ("461", c.gamma_12, c.lambda_12, 6.0e-3, 44e-3, 2.0),
        ("496", c.gamma_34, c.lambda_34, 2.3e-3, 5e-3, 6.6),
        ("688", c.gamma_56, c.lambda_56, 1.8e-3, 2.6e-3, 31.0),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (nm, g, l, w, pw, printed) in rows {
        let s = saturation_parameter(pw, w, g, l).unwrap();
        let ok = rel(s, printed) <= 0.05;
        pass &= ok;
        parts.push(format!("{nm}nm s={s:.2}/{printed}{}", if ok { "" } else { "(FAIL)" }));
    }
    for (nm, g, l, printed) in [
        ("461", c.gamma_12, c.lambda_12, 38.0),
        ("496", c.gamma_34, c.lambda_34, 9.1),
        ("689", c.gamma_15, c.lambda_15, 2.8e-3),
    ] {
        let isat = saturation_intensity(g, l).unwrap() / MW_PER_CM2;
        let ok = rel(isat, printed) <= 0.15;
        pass &= ok;
        parts.push(format!("Isat{nm}={isat:.4}/{printed} mW/cm2{}", if ok { "" } else { "(FAIL)" }));
    }
    outcome(pass, parts.join(", "))
}

fn criterion_12() -> Outcome {
    let c = SrConstants::bundled();
    let chains = c.combined_chains().unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    // (key, pinned Hz, half unit of the last printed digit)
    for (key, hz, half) in [("gamma_25", 159.0, 0.5), ("gamma_23", 90.0, 0.5), ("gamma_45", 26.3e3, 50.0), ("gamma_15", 7.4e3, 50.0)] {
        let stored = c.rate_by_key(key).unwrap();
        let exact = stored == DecayRate::from_hz(hz).unwrap();
        let chain = chains[key].hz();
        let ok = exact && (chain - hz).abs() <= half;
        pass &= ok;
        parts.push(format!("{key}: stored {} Hz{}, chain {chain:.2} Hz", stored.hz(), if ok { "" } else { " (FAIL)" }));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_13() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("map.json");
    std::fs::write(&cfg, gain_map("gmot")).unwrap();
    let mut outs = Vec::new();
    let mut slowest = 0f64;
    for jobs in ["1", "8"] {
        for fmt in ["csv", "json"] {
            let out = dir.path().join(format!("map_{jobs}.{fmt}"));
            let start = Instant::now();
            let status = Command::new(env!("CARGO_BIN_EXE_srmot-under-test"))
                .args(["map", "--jobs", jobs, "--format", fmt, "--config"])
                .arg(&cfg)
                .arg("--out")
                .arg(&out)
                .status()
                .unwrap();
            assert!(status.success(), "map --jobs {jobs} exited with {status}");
            slowest = slowest.max(start.elapsed().as_secs_f64());
            outs.push(std::fs::read(&out).unwrap());
        }
    }
    let same = outs[0] == outs[2] && outs[1] == outs[3];
    let budget = 2.0 * GAIN_SECONDS.get().copied().unwrap_or(f64::INFINITY);
    outcome(
        same && slowest < budget,
        format!(
            "--jobs 1 vs --jobs 8: csv {} bytes, json {} bytes, identical={same}; slowest run {slowest:.2} s, budget {budget:.2} s",
            outs[0].len(),
            outs[1].len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("two-level oracle", criterion_1),
        ("liouvillian oracle", criterion_2),
        ("hybrid-full equivalence", criterion_3),
        ("timescale separation", criterion_4),
        ("balance bound", criterion_5),
        ("conservation and hermiticity", criterion_6),
        ("potential vs quadrature", criterion_7),
        ("optimal-detuning slope", criterion_8),
        ("gain factor", criterion_9),
        ("balancing direction", criterion_10),
        ("saturation arithmetic", criterion_11),
        ("decay-rate regression", criterion_12),
        ("determinism", criterion_13),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        if i + 1 == 9 {
            let _ = GAIN_SECONDS.set(start.elapsed().as_secs_f64());
        }
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {tag} {name} ({:.2} s): {}", i + 1, start.elapsed().as_secs_f64(), o.detail);
        if !o.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 13 criteria pass");
    } else {
        println!("acceptance: {} of 13 criteria fail: {failed:?}", failed.len());
        std::process::exit(1);
    }
}
