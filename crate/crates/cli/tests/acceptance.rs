//! One line per acceptance criterion; exits nonzero if any fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use inls_core::spectral::free_propagate;
use inls_core::{ComplexField, GridSpec};
use num_complex::Complex64;
use serde_json::Value;
use tempfile::TempDir;

struct Run {
    code: i32,
    report: Value,
    elapsed: Duration,
}

impl Run {
    fn m(&self, name: &str) -> f64 {
        self.report["measurements"][name].as_f64().unwrap_or(f64::NAN)
    }

    fn v(&self, name: &str) -> bool {
        self.report["verdict"][name].as_bool().unwrap_or(false)
    }
}

fn inls(args: &[&str], out: &Path) -> Run {
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_inls"))
        .args(args)
        .arg("--out")
        .arg(out)
        .status()
        .expect("inls runs");
    let elapsed = start.elapsed();
    let report = std::fs::read_to_string(out.join("report.json"))
        .ok()
        .and_then(|t| serde_json::from_str(&t).ok())
        .unwrap_or(Value::Null);
    Run {
        code: status.code().unwrap_or(-1),
        report,
        elapsed,
    }
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn reduction_audit(tmp: &Path) -> Outcome {
    let mut details = Vec::new();
    let mut pass = true;
    let mut total = Duration::ZERO;
    let modes: [(&str, &[&str]); 2] = [
        ("l2", &["--mode", "l2", "--seed", "7"]),
        ("hs", &["--mode", "hs", "--d", "3", "--alpha", "3/2", "--beta", "1/3", "--s", "1/10", "--seed", "7"]),
    ];
    for (name, flags) in modes {
        let mut args = vec!["admissible", "--n", "10000", "--random-params", "10000"];
        args.extend_from_slice(flags);
        let r = inls(&args, &tmp.join(format!("c1-{name}")));
        total += r.elapsed;
        let failures = r.m("random_failures") + r.m("dual_failures") + r.m("empty_intervals");
        pass &= r.code == 0 && r.v("random_audit") && failures == 0.0 && r.m("random_samples") == 10000.0;
        details.push(format!("{name}: {} failures", failures));
    }
    pass &= total < Duration::from_secs(60);
    details.push(format!("{:.1} s", total.as_secs_f64()));
    outcome(pass, details.join(", "))
}

fn gaussian_error(d: usize, n: usize, l: f64, t: f64) -> f64 {
    let g = GridSpec::new(d, n, l).unwrap();
    let u0 = ComplexField::gaussian(g.clone(), 1.0, 1.0);
    let z = Complex64::new(1.0, 2.0 * t);
    let amp = z.inv().powf(d as f64 / 2.0);
    let exact = ComplexField::from_fn(g, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        amp * (-r2 / (2.0 * z)).exp()
    })
    .unwrap();
    free_propagate(&u0, t).l2_distance(&exact).unwrap() / exact.l2_norm()
}

fn unitarity() -> Outcome {
    let g = GridSpec::new(3, 32, 8.0).unwrap();
    let u0 = ComplexField::from_fn(g, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        Complex64::new(1.0 + x[0], x[1]) * (-r2 / 3.0).exp()
    })
    .unwrap();
    let m0 = u0.mass();
    let mass_err = [0.1, 1.0, 10.0]
        .iter()
        .map(|&t| ((free_propagate(&u0, t).mass() - m0) / m0).abs())
        .fold(0.0, f64::max);
    let e1 = gaussian_error(1, 512, 32.0, 1.0);
    let e3 = gaussian_error(3, 64, 16.0, 0.5);
    outcome(
        mass_err < 1e-12 && e1 < 1e-8 && e3 < 1e-6,
        format!("mass {mass_err:.1e}, gaussian d=1 {e1:.1e}, d=3 {e3:.1e}"),
    )
}

fn main() -> ExitCode {
    let tmp = TempDir::new().unwrap();
    let t = tmp.path();
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();

    results.push((1, "reduction audit", reduction_audit(t)));
    results.push((2, "unitarity and closed form", unitarity()));

    let solve = inls(&["solve"], &t.join("solve"));
    results.push((
        3,
        "mass conservation",
        outcome(
            solve.code == 0
                && solve.m("splitstep_mass_drift") < 1e-12
                && solve.m("picard_mass_drift") < 1e-6
                && solve.elapsed < Duration::from_secs(120),
            format!(
                "split-step {:.1e}, picard {:.1e}, {:.1} s",
                solve.m("splitstep_mass_drift"),
                solve.m("picard_mass_drift"),
                solve.elapsed.as_secs_f64()
            ),
        ),
    ));

    let verify = inls(&["verify"], &t.join("verify"));
    results.push((
        4,
        "scaling slope",
        outcome(
            verify.m("scaling_relative_error") < 0.01,
            format!(
                "slope {:.5} vs {:.5} ({:.2}%)",
                verify.m("scaling_slope"),
                verify.m("scaling_predicted"),
                100.0 * verify.m("scaling_relative_error")
            ),
        ),
    ));
    results.push((
        5,
        "nonlinear estimates",
        outcome(
            verify.m("l2_estimate_holds") == 100.0
                && verify.m("hs_first_holds") == 100.0
                && verify.m("hs_second_spread") < 10.0,
            format!(
                "l2 {}/100, first {}/100, second max/median {:.2}",
                verify.m("l2_estimate_holds"),
                verify.m("hs_first_holds"),
                verify.m("hs_second_spread")
            ),
        ),
    ));

    results.push((
        6,
        "cross-method agreement",
        outcome(
            solve.m("cross_method_distance") < 1e-4
                && solve.m("picard_max_increment_ratio") <= 0.6,
            format!(
                "distance {:.1e}, max increment ratio {:.3}",
                solve.m("cross_method_distance"),
                solve.m("picard_max_increment_ratio")
            ),
        ),
    ));

    let life = inls(&["lifespan"], &t.join("lifespan"));
    results.push((
        7,
        "life-span slope",
        outcome(
            life.code == 0
                && life.m("relative_error") < 0.15
                && life.elapsed < Duration::from_secs(600),
            format!(
                "slope {:.4} vs {:.4} ({:.1}%), {:.0} s",
                life.m("slope"),
                life.m("predicted"),
                100.0 * life.m("relative_error"),
                life.elapsed.as_secs_f64()
            ),
        ),
    ));

    let scatter = inls(&["scatter"], &t.join("scatter"));
    results.push((
        8,
        "scattering proxy",
        outcome(
            scatter.v("decreasing") && scatter.m("final_increment") < 1e-3,
            format!(
                "{} increases, final increment {:.1e}",
                scatter.m("increases"),
                scatter.m("final_increment")
            ),
        ),
    ));

    let strich = inls(&["strichartz"], &t.join("strichartz"));
    let variations: Vec<String> = (0..3)
        .map(|k| format!("{:.2}%", 100.0 * strich.m(&format!("triple{k}.variation"))))
        .collect();
    results.push((
        9,
        "Strichartz refinement",
        outcome(
            (0..3).all(|k| strich.v(&format!("triple{k}_stable"))) && strich.v("probe_increasing"),
            format!(
                "variation {}, probe {:.4} -> {:.4} -> {:.4}",
                variations.join(" "),
                strich.m("probe.max.n32"),
                strich.m("probe.max.n48"),
                strich.m("probe.max.n64")
            ),
        ),
    ));

    let runs: [&[&str]; 4] = [
        &["admissible", "--n", "200", "--seed", "3"],
        &["solve", "--dump", "--seed", "3"],
        &["scatter"],
        &["strichartz", "--n", "4", "--points", "16,24", "--seed", "3"],
    ];
    let mut same = true;
    for (i, args) in runs.iter().enumerate() {
        let a = t.join(format!("det{i}a"));
        let b = t.join(format!("det{i}b"));
        inls(args, &a);
        inls(args, &b);
        let (fa, fb) = (dir_bytes(&a), dir_bytes(&b));
        same &= !fa.is_empty() && fa == fb;
    }
    results.push((10, "determinism", outcome(same, format!("{} commands twice", runs.len()))));

    let mut failed = 0;
    for (k, name, o) in &results {
        println!("criterion {k:>2} {:<26} {}  {}", name, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
