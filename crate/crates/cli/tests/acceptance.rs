//! Acceptance criteria 1-12. Each test prints one `PASS criterion N: ...` or
//! `FAIL criterion N: ...` line and then asserts. Run with
//! `cargo test -p kerrsplit-cli --test acceptance -- --nocapture`.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, OnceLock};

use kerrsplit::analysis::{find_peaks, power_spectrum, spectral_peaks};
use kerrsplit::analytic::{
    chi, delay_difference, dispersion_set, first_order_coherence, kerr_coefficient, DispersionSet,
};
use kerrsplit::bloch::{integrate_bloch, DensityMatrix};
use kerrsplit::mbsolver::simulate_full;
use kerrsplit::ssfm::{propagate_model, propagate_with, SplitScheme, SsfmOptions};
use kerrsplit::{make_pulse, transmission, Complex64, Envelope, PhysParams, PulseSpec, SimGrid};
use kerrsplit_cli::output::KeyValues;
use kerrsplit_cli::presets;
use kerrsplit_cli::scenario::{run_scenario, ComparisonStatus, Outcome};

fn report(n: u32, pass: bool, detail: String) {
    let line = format!("{} criterion {n}: {detail}", if pass { "PASS" } else { "FAIL" });
    println!("{line}");
    assert!(pass, "{line}");
}

fn root() -> &'static Path {
    static DIR: OnceLock<tempfile::TempDir> = OnceLock::new();
    DIR.get_or_init(|| tempfile::tempdir().unwrap()).path()
}

/// Every preset is run once per process; the files stay on disk for the
/// determinism check.
fn preset(name: &'static str) -> &'static Outcome {
    static CACHE: OnceLock<Mutex<HashMap<&'static str, &'static OnceLock<Outcome>>>> = OnceLock::new();
    let cell = *CACHE
        .get_or_init(Default::default)
        .lock()
        .unwrap()
        .entry(name)
        .or_insert_with(|| Box::leak(Box::new(OnceLock::new())));
    cell.get_or_init(|| {
        let cfg = presets::load(name, &[]).unwrap();
        run_scenario(&cfg, &root().join("first").join(name)).unwrap()
    })
}

fn full_summary(name: &'static str) -> &'static KeyValues {
    &preset(name).full.as_ref().unwrap().1
}

#[test]
fn criterion_01_weak_pulse_transmission() {
    let mut pass = true;
    let mut detail = Vec::new();
    for name in ["fig2-casei", "fig2-caseii", "fig2-caseiii", "fig2-caseiv"] {
        let (rec, _) = preset(name).full.as_ref().unwrap();
        let t = transmission(rec).unwrap();
        let dk = rec.params.delta_kerr;
        let ok = if dk == 4.0 { (t - 0.75).abs() <= 0.10 } else { t < 0.10 };
        pass &= ok;
        detail.push(format!("{name} (delta={}, delta_kerr={dk}) T={t:.3}", rec.params.delta_p));
    }
    report(1, pass, format!("{}; want 0.75+-0.10 at delta_kerr=4, <0.10 at 0", detail.join(", ")));
}

#[test]
fn criterion_02_pulse_splitting() {
    let kv = full_summary("fig4");
    let count: usize = kv.get("peak_count").unwrap().parse().unwrap();
    let separated = kv.get("fully_separated") == Some("true");
    let depth = kv.get("separation_depth").unwrap();
    let depth_ok = depth.parse::<f64>().is_ok_and(|d| (80.0..=120.0).contains(&d));
    report(
        2,
        count == 2 && separated && depth_ok,
        format!("fig4 exit peaks={count} (want 2), fully separated={separated}, separation depth={depth} (want 100+-20)"),
    );
}

#[test]
fn criterion_03_spectral_signature() {
    let (rec, _) = preset("fig4").full.as_ref().unwrap();
    let peaks = spectral_peaks(&power_spectrum(rec.exit().unwrap()).unwrap()).positions();
    let near = |target: f64| peaks.iter().any(|w| (w - target).abs() <= 0.02);
    let pass = peaks.len() == 2 && near(-0.05) && near(0.05);
    report(3, pass, format!("fig4 exit spectral peaks at {peaks:?} (want two, at -0.05+-0.02 and +0.05+-0.02)"));
}

#[test]
fn criterion_04_delay_estimate() {
    let (rec, kv) = preset("fig4").full.as_ref().unwrap();
    let delay: f64 = kv.get("subpulse_delay").unwrap().parse().unwrap();
    let w = spectral_peaks(&power_spectrum(rec.exit().unwrap()).unwrap()).positions();
    let (w_minus, w_plus) = (w[0], *w.last().unwrap());
    let estimate = delay_difference(&rec.params, w_minus, w_plus, 130.0).unwrap();
    let delay_ok = (delay - 90.0).abs() <= 0.3 * 90.0;
    let estimate_ok = (estimate - delay).abs() <= 0.3 * delay;
    report(
        4,
        delay_ok && estimate_ok,
        format!(
            "fig4 subpulse delay={delay} (want 90+-30%), 130*Re[beta1({w_minus})-beta1({w_plus})]={estimate:.2} (want within 30% of delay)"
        ),
    );
}

/// Peak positions and heights with the default detector, plus any smaller
/// local maxima it drops, for the red-criterion diagnostics.
fn peak_diagnostics(name: &'static str) -> (usize, String) {
    let (rec, kv) = preset(name).full.as_ref().unwrap();
    let exit = rec.exit().unwrap();
    let taus: Vec<f64> = exit.grid.taus().collect();
    let intensity = exit.intensity();
    let max = intensity.iter().copied().fold(0.0, f64::max);
    let faint = find_peaks(&intensity, &taus, 0.0, 0.0);
    let faint: Vec<String> = faint
        .peaks
        .iter()
        .filter(|p| p.height > 1e-3 * max)
        .map(|p| format!("{:.1}@{:.3}", p.position, p.height / max))
        .collect();
    let count = kv.get("peak_count").unwrap().parse().unwrap();
    (
        count,
        format!(
            "peaks at {} with heights {}; all local maxima above 0.1% (tau@relative height): {}",
            kv.get("peak_positions").unwrap(),
            kv.get("peak_heights").unwrap(),
            faint.join(" ")
        ),
    )
}

#[test]
fn criterion_05_three_peak_regime() {
    let (count, detail) = peak_diagnostics("fig5");
    report(5, count == 3, format!("fig5 exit peak count={count} (want 3); {detail}"));
}

#[test]
fn criterion_06_model_agreement() {
    let a = preset("fig7a");
    let (ca, sa, _) = a.comparison.as_ref().unwrap();
    let agree = ca.peak_counts_match() && ca.max_peak_offset <= 10.0;
    let b = preset("fig7b");
    let (cb, sb, _) = b.comparison.as_ref().unwrap();
    let warnings = &b.model.as_ref().unwrap().0.warnings;
    let flagged = *sb == ComparisonStatus::ExpectedDivergence;
    report(
        6,
        agree && *sa == ComparisonStatus::Agree && flagged,
        format!(
            "fig7a full peaks {:?} vs model {:?}, max offset {:.2} (want <= 10), status {}; fig7b status {} (want expected-divergence), l2 {:.3}, {} model warnings",
            ca.peaks_a,
            ca.peaks_b,
            ca.max_peak_offset,
            sa.name(),
            sb.name(),
            cb.l2_distance,
            warnings.len()
        ),
    );
}

#[test]
fn criterion_07_detuning_shift() {
    let (n5, _) = peak_diagnostics("fig5");
    let (n8, detail) = peak_diagnostics("fig5-delta8");
    report(7, n5 == 3 && n8 == 2, format!("fig5 peak count {n5} -> fig5-delta8 peak count {n8} (want 3 -> 2); delta=8: {detail}"));
}

#[test]
fn criterion_08_density_matrix_suite() {
    let grid = SimGrid::new(2048, 0.05, 1, 1.0, 1).unwrap();
    let mut drift = 0.0f64;
    let mut min_pop = f64::INFINITY;
    let mut hermitian = true;
    for &(d, dk) in &[(4.0, 4.0), (0.0, 4.0), (0.0, 0.0), (4.0, 0.0), (1.0, 3.0), (8.0, 8.0)] {
        let p = PhysParams::raman(1.0, d, dk);
        let env = Envelope::from_fn(grid, |t| Complex64::from_polar(0.5f64.sqrt() * (t / 30.0).min(1.0), 0.01 * t));
        let traj = integrate_bloch(&DensityMatrix::ground(), &env, &p).unwrap();
        drift = drift.max(traj.max_trace_drift);
        for r in &traj.states {
            let m = r.to_matrix();
            for i in 0..4 {
                min_pop = min_pop.min(m[i][i].re);
                for j in 0..4 {
                    hermitian &= m[i][j] == m[j][i].conj();
                }
            }
        }
    }
    // Order: a linear probe is interpolated exactly, leaving the RK4 error.
    let p = PhysParams::raman(1.0, 4.0, 4.0);
    let end = |h: f64| {
        let n = (20.0 / h).round() as usize + 1;
        let g = SimGrid::new(n.next_power_of_two(), h, 1, 1.0, 1).unwrap();
        let env = Envelope::from_fn(g, |t| Complex64::new(0.2 + 0.05 * t, 0.1 - 0.02 * t));
        integrate_bloch(&DensityMatrix::ground(), &env, &p).unwrap().states[n - 1]
    };
    let (r1, r2, r3) = (end(0.1), end(0.05), end(0.025));
    let ratio = r1.max_abs_diff(&r2) / r2.max_abs_diff(&r3);
    let pass = drift < 1e-8 && hermitian && min_pop > -1e-6 && (12.0..=20.0).contains(&ratio);
    report(
        8,
        pass,
        format!("trace drift {drift:.2e} over 2047 steps (want < 1e-8), hermitian={hermitian}, min population {min_pop:.2e} (want > -1e-6), RK4 halving ratio {ratio:.2} (want 16+-4)"),
    );
}

#[test]
fn criterion_09_analytic_suite() {
    let h = 1e-3;
    let f = |p: &PhysParams, w: f64| chi(w, p).unwrap();
    let mut worst = [0.0f64; 3];
    let mut beta0_zero = true;
    for i in 0..10 {
        for j in 0..10 {
            let p = PhysParams::raman(0.5 + 1.5 * j as f64 / 9.0, 8.0 * i as f64 / 9.0, 4.0);
            let set = dispersion_set(&p).unwrap();
            beta0_zero &= set.beta[0] == Complex64::new(0.0, 0.0);
            let d1 = (f(&p, -2.0 * h) - 8.0 * f(&p, -h) + 8.0 * f(&p, h) - f(&p, 2.0 * h)) / (12.0 * h);
            let d2 = (-f(&p, -2.0 * h) + 16.0 * f(&p, -h) - 30.0 * f(&p, 0.0) + 16.0 * f(&p, h) - f(&p, 2.0 * h))
                / (12.0 * h * h);
            let d3h = |h: f64| (-f(&p, -2.0 * h) + 2.0 * f(&p, -h) - 2.0 * f(&p, h) + f(&p, 2.0 * h)) / (2.0 * h * h * h);
            let d3 = (4.0 * d3h(0.5 * h) - d3h(h)) / 3.0;
            let c2 = p.omega_c.norm_sqr();
            let a = Complex64::new(p.delta_p, 0.5);
            let floor3 = 1e-3 * 6.0 * (c2 + a.norm_sqr()) / (c2 * c2 * c2);
            worst[0] = worst[0].max((d1 - set.beta[1]).norm() / set.beta[1].norm());
            worst[1] = worst[1].max((d2 - set.beta[2]).norm() / set.beta[2].norm());
            worst[2] = worst[2].max((d3 - set.beta[3]).norm() / set.beta[3].norm().max(floor3));
        }
    }
    let r = kerr_coefficient(&PhysParams::raman(1.0, 4.0, 0.0));
    let imaginary = r.re == 0.0 && r.im > 0.0;
    let pass = worst.iter().all(|&e| e < 1e-5) && imaginary && beta0_zero;
    report(
        9,
        pass,
        format!("beta1..3 vs finite differences max relative error {:.1e} {:.1e} {:.1e} (want < 1e-5), R_p(delta_kerr=0)={r} (want purely imaginary), beta0=0: {beta0_zero}", worst[0], worst[1], worst[2]),
    );
}

fn rel_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

#[test]
fn criterion_10_ssfm_suite() {
    let set = |beta: [f64; 4], r: f64| DispersionSet {
        beta: beta.map(|b| Complex64::new(b, 0.0)),
        r_p: Complex64::new(r, 0.0),
        params: PhysParams::raman(1.0, 0.0, 4.0),
    };
    // SPM with dispersion off.
    let grid = SimGrid::new(1024, 0.5, 2000, 0.1, 500).unwrap();
    let pulse = make_pulse(&PulseSpec::gaussian(0.4, 30.0).unwrap(), &grid).unwrap();
    let rec = propagate_with(&pulse, &set([0.0; 4], -0.49), &SsfmOptions::default()).unwrap();
    let mut spm = 0.0f64;
    for snap in &rec.snapshots {
        for (out, inp) in snap.values.iter().zip(&pulse.values) {
            let want = inp * Complex64::from_polar(1.0, -0.49 * snap.zeta * inp.norm_sqr());
            spm = spm.max((out - want).norm());
        }
    }
    // Lossless symbols.
    let grid = SimGrid::new(1024, 0.5, 200, 0.1, 1).unwrap();
    let pulse = make_pulse(&PulseSpec::gaussian(0.4, 20.0).unwrap(), &grid).unwrap();
    let opts = SsfmOptions {
        passive_clamp: false,
        ..SsfmOptions::default()
    };
    let rec = propagate_with(&pulse, &set([0.0, 1.0, 8.0, 40.0], -0.49), &opts).unwrap();
    let energy = rec
        .snapshots
        .windows(2)
        .map(|w| ((w[1].energy() - w[0].energy()) / w[0].energy()).abs())
        .fold(0.0, f64::max);
    // Strang order on the model problem of fig7a.
    let p = PhysParams::raman(1.0, 1.0, 3.0);
    let spec = PulseSpec::gaussian(0.025, 50.0).unwrap();
    let exit = |h: f64| {
        let n = (200.0 / h).round() as usize;
        let g = SimGrid::new(4096, 0.25, n, h, n).unwrap();
        let o = SsfmOptions {
            split_scheme: SplitScheme::Strang,
            ..SsfmOptions::default()
        };
        propagate_model(&make_pulse(&spec, &g).unwrap(), &p, &o).unwrap().exit().unwrap().values.clone()
    };
    let reference = exit(0.5 / 8.0);
    let e: Vec<f64> = [2.0, 1.0, 0.5].iter().map(|&h| rel_l2(&exit(h), &reference)).collect();
    let ratios = [e[0] / e[1], e[1] / e[2]];
    let pass = spm < 1e-8 && energy < 1e-10 && ratios.iter().all(|r| (3.0..=5.0).contains(r));
    report(
        10,
        pass,
        format!("SPM phase error {spm:.1e} (want < 1e-8), lossless energy change {energy:.1e}/step (want < 1e-10), Strang halving ratios {:.2} {:.2} (want 4+-1)", ratios[0], ratios[1]),
    );
}

#[test]
fn criterion_11_cross_solver_oracle() {
    let grid = SimGrid::new(8192, 0.1, 1, 1.0, 1).unwrap();
    let mut worst = 0.0f64;
    for &(d, dk) in &[(4.0, 4.0), (0.0, 4.0), (1.0, 3.0)] {
        let p = PhysParams::raman(1.0, d, dk);
        let env = make_pulse(&PulseSpec::gaussian(0.01, 30.0).unwrap(), &grid).unwrap();
        let bloch = integrate_bloch(&DensityMatrix::ground(), &env, &p).unwrap().element(1, 3);
        let linear = first_order_coherence(&env, &p).unwrap();
        let err: f64 = bloch.iter().zip(&linear).map(|(a, b)| (a - b).norm_sqr()).sum();
        let scale: f64 = bloch.iter().map(|a| a.norm_sqr()).sum();
        worst = worst.max((err / scale).sqrt());
    }
    let grid = SimGrid::new(2048, 0.25, 200, 0.1, 5).unwrap();
    let mut gain = f64::NEG_INFINITY;
    for &(amp2, d, dk) in &[(0.5, 4.0, 4.0), (0.15, 4.0, 4.0), (0.015, 0.0, 0.0), (0.5, 8.0, 8.0)] {
        let spec = PulseSpec::gaussian(f64::sqrt(amp2), 30.0).unwrap();
        let rec = simulate_full(&spec, &PhysParams::raman(1.0, d, dk), &grid).unwrap();
        for w in rec.snapshots.windows(2) {
            gain = gain.max((w[1].energy() - w[0].energy()) / w[0].energy());
        }
    }
    report(
        11,
        worst < 0.02 && gain <= 1e-12,
        format!("first-order coherence vs Bloch relative RMS {worst:.2e} (want < 2%), largest relative energy change between snapshots {gain:.2e} (want <= 0)"),
    );
}

fn files(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.push(path.strip_prefix(dir).unwrap().to_path_buf());
            }
        }
    }
    out.sort();
    out
}

#[test]
fn criterion_12_determinism() {
    let mut mismatches = Vec::new();
    let mut compared = 0;
    for p in presets::PRESETS {
        let first = &preset(p.name).dir;
        let second = root().join("second").join(p.name);
        run_scenario(&presets::load(p.name, &[]).unwrap(), &second).unwrap();
        let (fa, fb) = (files(first), files(&second));
        if fa != fb {
            mismatches.push(format!("{}: file lists differ", p.name));
            continue;
        }
        for f in &fa {
            compared += 1;
            if fs::read(first.join(f)).unwrap() != fs::read(second.join(f)).unwrap() {
                mismatches.push(format!("{}/{}", p.name, f.display()));
            }
        }
    }
    report(
        12,
        mismatches.is_empty() && compared > 0,
        format!("{} presets rerun, {compared} files compared, differing: {mismatches:?}", presets::PRESETS.len()),
    );
}

/// Halving the depth step on the fig4 scenario moves the exit intensity by
/// less than 1% (L2, normalized).
#[test]
fn depth_step_convergence() {
    let (coarse, _) = preset("fig4").full.as_ref().unwrap();
    let cfg = presets::load("fig4", &["grid.d_zeta=0.05".into(), "grid.n_zeta=4000".into(), "grid.record_stride=4000".into()]).unwrap();
    let (fine, _) = kerrsplit_cli::scenario::solve(&cfg).unwrap();
    let a = coarse.exit().unwrap().intensity();
    let b = fine.unwrap().exit().unwrap().intensity();
    let num: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    let d = (num / den).sqrt();
    let line = format!("{} convergence: fig4 exit intensity change on halving d_zeta {d:.2e} (want < 1%)", if d < 0.01 { "PASS" } else { "FAIL" });
    println!("{line}");
    assert!(d < 0.01, "{line}");
}
