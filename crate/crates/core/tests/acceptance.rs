//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use specdet::dets::{eps_limit_comparison, proposition_ene_f_scenario, Branch, DetInput, EpsLimit};
use specdet::matmodel::{ginibre, haar_unitary, hermitian_gaussian, MatrixOperator};
use specdet::spaces::{Function, Psi, SpectralProfile, SymmetricSpace};
use specdet::stepfn::GridFn;
use specdet::traces::{eval_functional, eval_on_operator, TraceFunctional};
use specdet::verify::{run_suite, CheckKind, SuiteConfig, SuiteStatus};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SEED: u64 = 42;

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(start: Instant, budget: Duration) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < budget, || format!("took {took:?}, budget {budget:?}"))
}

fn suites(checks: &[CheckKind]) -> Outcome {
    let cfg = SuiteConfig { checks: checks.to_vec(), n: 64, trials: 100, seed: SEED, ..SuiteConfig::default() };
    let out = run_suite(&cfg).map_err(|e| e.to_string())?;
    let mut detail = Vec::new();
    for r in &out.reports {
        ensure(r.errors.is_empty(), || format!("{}: {}", r.check_name, r.errors.join("; ")))?;
        ensure(r.violations == 0, || {
            format!("{}: {} violations, worst margin {:?}", r.check_name, r.violations, r.worst_margin)
        })?;
        detail.push(format!("{} worst margin {:.3e}", r.check_name, r.worst_margin.unwrap_or(f64::NAN)));
    }
    ensure(out.status == SuiteStatus::Pass, || format!("status {:?}", out.status))?;
    Ok(detail.join(", "))
}

fn fk_multiplicativity() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in [2, 8, 32, 64] {
        let mut r = rng(n as u64);
        for trial in 0..100 {
            let a = ginibre(n, 1.0, &mut r).map_err(|e| e.to_string())?;
            let b = ginibre(n, 1.0, &mut r).map_err(|e| e.to_string())?;
            let ab = a.product(&b).map_err(|e| e.to_string())?;
            let (da, db, dab) = (a.fk_det(), b.fk_det(), ab.fk_det());
            ensure(da > 0.0 && db > 0.0, || format!("n={n} trial {trial}: draw is singular"))?;
            let rel = (dab - da * db).abs() / (da * db);
            worst = worst.max(rel);
            ensure(rel <= 1e-9, || format!("n={n} trial {trial}: relative error {rel:.3e}"))?;
        }
    }
    within_budget(start, Duration::from_secs(5))?;
    Ok(format!("worst relative error {worst:.3e}"))
}

fn rank_deficient(n: usize, rank: usize, r: &mut ChaCha8Rng) -> Result<MatrixOperator, String> {
    let g = ginibre(n, 1.0, r).map_err(|e| e.to_string())?;
    let diag: Vec<f64> = (0..n).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    let p = MatrixOperator::from_real_diagonal(&diag).map_err(|e| e.to_string())?;
    g.product(&p).map_err(|e| e.to_string())
}

fn eps_limit_fk() -> Outcome {
    let mut worst = 0.0f64;
    for n in [2, 8, 32, 64] {
        let mut r = rng(100 + n as u64);
        for trial in 0..100 {
            let a = ginibre(n, 1.0, &mut r).map_err(|e| e.to_string())?;
            let d = a.fk_det();
            let de = a.fk_det_eps(0.5f64.powi(30)).map_err(|e| e.to_string())?;
            let rel = (de - d).abs() / d;
            worst = worst.max(rel);
            ensure(rel <= 1e-6, || format!("invertible n={n} trial {trial}: relative gap {rel:.3e}"))?;
        }
    }
    let mut singular = vec![MatrixOperator::zeros(8)];
    for n in [4, 8, 32, 64] {
        let mut r = rng(200 + n as u64);
        for _ in 0..25 {
            let rank = r.random_range(1..=n / 4);
            singular.push(rank_deficient(n, rank, &mut r)?);
        }
    }
    let mut worst_end = 0.0f64;
    for (i, a) in singular.iter().enumerate() {
        ensure(a.fk_det() == 0.0, || format!("singular #{i}: fk_det = {}", a.fk_det()))?;
        let seq: Vec<f64> =
            (1..=40).map(|k| a.fk_det_eps(0.5f64.powi(k))).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        ensure(seq.windows(2).all(|w| w[1] <= w[0]), || format!("singular #{i}: not monotone"))?;
        let end = seq[seq.len() - 1];
        worst_end = worst_end.max(end);
        ensure(end < 1e-6, || format!("singular #{i} (rank {}): {end:.3e} at 2^-40", a.numerical_rank()))?;
    }
    Ok(format!("invertible worst {worst:.3e}; {} singular, largest at 2^-40 {worst_end:.3e}", singular.len()))
}

fn main_product() -> Outcome {
    let start = Instant::now();
    let d = suites(&[CheckKind::MainProduct])?;
    within_budget(start, Duration::from_secs(30))?;
    Ok(d)
}

fn example_constants() -> Outcome {
    let phi = TraceFunctional::singular(Psi::Log);
    let marc = SymmetricSpace::Marcinkiewicz(Psi::Log);
    let x = DetInput::Profile(SpectralProfile::exp_neg_psi_prime_flip());
    let c = eps_limit_comparison(&x, &phi, marc).map_err(|e| e.to_string())?;
    let e1 = (-1f64).exp();
    let rel = (c.det.value - e1).abs() / e1;
    ensure(c.det.branch == Branch::LogTrace, || format!("branch {}", c.det.branch))?;
    ensure(rel <= 1e-9, || format!("det {} vs e^-1, relative {rel:.3e}", c.det.value))?;
    let EpsLimit::Converged(lim) = c.eps_limit else { return Err("ε-limit not detected".into()) };
    ensure((lim - 1.0).abs() <= 1e-6, || format!("ε-limit {lim}"))?;

    let p = DetInput::Profile(SpectralProfile::projection(0.5).map_err(|e| e.to_string())?);
    let cp = eps_limit_comparison(&p, &phi, marc).map_err(|e| e.to_string())?;
    ensure(cp.det.value == 0.0 && cp.det.branch == Branch::Kernel, || format!("projection det {:?}", cp.det))?;
    let EpsLimit::Converged(plim) = cp.eps_limit else { return Err("projection ε-limit not detected".into()) };
    ensure((plim - 1.0).abs() <= 1e-6, || format!("projection ε-limit {plim}"))?;
    Ok(format!("det e^-1 relative {rel:.1e}, ε-limit {lim}; projection det 0, ε-limit {plim}"))
}

fn scenario() -> Outcome {
    let t = SpectralProfile::power(0.75).map_err(|e| e.to_string())?;
    let tau = TraceFunctional::integral(1.0).map_err(|e| e.to_string())?;
    let v = proposition_ene_f_scenario(SymmetricSpace::Lp(2.0), SymmetricSpace::Lp(1.0), &t, &tau, &tau)
        .map_err(|e| e.to_string())?;
    let e4 = (-4f64).exp();
    let rel = (v.det_psi.value - e4).abs() / e4;
    ensure(rel <= 1e-9, || format!("det_psi {} vs e^-4", v.det_psi.value))?;
    ensure(v.det_phi.value == 0.0, || format!("det_phi {}", v.det_phi.value))?;
    Ok(format!("det_psi relative {rel:.1e}, det_phi = 0 (branch {})", v.det_phi.branch))
}

fn conjugate(a: &MatrixOperator, u: &DMatrix<Complex64>) -> Result<MatrixOperator, String> {
    let m = u * a.entries() * u.adjoint();
    // restore exact self-adjointness lost to rounding
    let h = (&m + m.adjoint()).map(|z| z * 0.5);
    MatrixOperator::new(h).map_err(|e| e.to_string())
}

fn trace_layer() -> Outcome {
    let tau = TraceFunctional::integral(1.0).map_err(|e| e.to_string())?;
    let mut r = rng(300);
    let (mut worst_tau, mut worst_conj) = (0.0f64, 0.0f64);
    for trial in 0..100 {
        let n = [2, 8, 32, 64][trial % 4];
        let a = hermitian_gaussian(n, 1.0, &mut r).map_err(|e| e.to_string())?;
        let v = eval_on_operator(&tau, &a).map_err(|e| e.to_string())?;
        let gap = (v - a.tau().re).abs();
        worst_tau = worst_tau.max(gap);
        ensure(gap <= 1e-12, || format!("trial {trial}: Integral(1) - τ = {gap:.3e}"))?;
        let u = haar_unitary(n, &mut r);
        let w = eval_on_operator(&tau, &conjugate(&a, &u)?).map_err(|e| e.to_string())?;
        let conj = (w - v).abs();
        worst_conj = worst_conj.max(conj);
        ensure(conj <= 1e-10, || format!("trial {trial}: conjugation moved the trace by {conj:.3e}"))?;
    }
    let singular = TraceFunctional::singular(Psi::Log);
    for i in 0..20 {
        let n = r.random_range(1..=128);
        let g = GridFn::new((0..n).map(|_| r.random_range(0.0..10.0)).collect()).map_err(|e| e.to_string())?;
        let v = eval_functional(&singular, Function::Grid(&g), false).map_err(|e| e.to_string())?;
        ensure(v == 0.0, || format!("bounded function #{i}: singular trace {v}"))?;
    }
    let pp = SpectralProfile::psi_prime();
    let v = eval_functional(&singular, Function::Profile(&pp), false).map_err(|e| e.to_string())?;
    ensure((v - 1.0).abs() <= 1e-6, || format!("singular trace of ψ' = {v}"))?;
    Ok(format!("τ gap {worst_tau:.1e}, conjugation gap {worst_conj:.1e}, singular(ψ') = {v}"))
}

fn determinism() -> Outcome {
    let exe = env!("CARGO_BIN_EXE_specdet");
    let dir = std::env::temp_dir().join(format!("specdet-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut payloads = Vec::new();
    let mut times = Vec::new();
    for run in 0..2 {
        let path = dir.join(format!("run{run}.csv"));
        let start = Instant::now();
        let status = Command::new(exe)
            .args(["verify", "--suite", "all", "--n", "64", "--trials", "100", "--seed", "42", "--out"])
            .arg(&path)
            .stderr(std::process::Stdio::null())
            .status()
            .map_err(|e| e.to_string())?;
        let took = start.elapsed();
        ensure(status.success(), || format!("run {run} exited with {status}"))?;
        ensure(took < Duration::from_secs(120), || format!("run {run} took {took:?}"))?;
        times.push(took);
        payloads.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    let _ = std::fs::remove_dir_all(&dir);
    ensure(payloads[0] == payloads[1], || "CSV payloads differ".into())?;
    ensure(payloads[0].len() > 100, || "CSV payload is empty".into())?;
    Ok(format!("{} identical bytes, runs {:?} / {:?}", payloads[0].len(), times[0], times[1]))
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("determinant multiplicativity", fk_multiplicativity),
        ("ε-limit agreement for the normalized trace", eps_limit_fk),
        ("product integral lemma (8t constant)", main_product),
        ("pointwise product bounds", || suites(&[CheckKind::PointwiseProduct])),
        ("majorization double inequality", || suites(&[CheckKind::Majorization])),
        ("positive sum bound", || suites(&[CheckKind::SumPos])),
        ("positive/negative part defect vanishing", || suites(&[CheckKind::TpmVanishing])),
        ("commutator criterion bound", || suites(&[CheckKind::Commutator])),
        ("standard and log-closure inequalities", || suites(&[CheckKind::StandardInequalities, CheckKind::LogClosure])),
        ("invertible and projection example constants", example_constants),
        ("strictly larger space scenario", scenario),
        ("trace layer", trace_layer),
        ("determinism of the full suite", determinism),
    ];
    // a filter argument other than harness flags selects criteria by number
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let k = i + 1;
        if !only.is_empty() && !only.contains(&k) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {k:>2} {name}: {detail} [{took:.2?}]"),
            Err(why) => {
                failed += 1;
                println!("FAIL {k:>2} {name}: {why} [{took:.2?}]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
