//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs as a plain binary (no libtest harness).
//!
//! `QFB_SEED` shifts the seeds of the random circuits.

use std::f64::consts::FRAC_1_SQRT_2;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qfb_core::generators::{grover, qft, random_circuit};
use qfb_core::oracle::{bit_reverse, dense_product, dft};
use qfb_core::{
    build_pairwise, build_repeated, build_sequential, BuildOptions, Circuit, DenseMatrix, Edge,
    Error, Gate, GateKind, Package, RepeatedCircuit,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORACLE_TOL: f64 = 1e-9;
const RANDOM_CIRCUITS: u64 = 200;

struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(format!("engine error: {e}"))
    }
}

type Outcome = Result<String, Failure>;

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), Failure> {
    if cond {
        Ok(())
    } else {
        Err(Failure(msg()))
    }
}

fn opts() -> BuildOptions {
    BuildOptions::default()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ac1() -> Outcome {
    let circuit = qft(3, false)?;
    let mut p = Package::default();
    let (seq, s) = build_sequential(&mut p, &circuit, &opts())?;
    let trace = s.intermediate_nodes();
    require(trace == [4, 7, 7, 7, 7], || {
        format!("sequential intermediates {trace:?}")
    })?;
    let (pw, t) = build_pairwise(&mut p, &circuit, &opts())?;
    let levels: Vec<Vec<usize>> = (1..=3).map(|l| t.nodes_at_level(l)).collect();
    require(levels == [vec![4, 5, 4], vec![7], vec![7]], || {
        format!("pairwise levels {levels:?}")
    })?;
    require(s.final_nodes == 7 && t.final_nodes == 7, || {
        format!("final nodes {} / {}", s.final_nodes, t.final_nodes)
    })?;
    require(seq == pw, || "strategies disagree".into())?;
    Ok(format!(
        "sequential {trace:?}, pairwise {levels:?}, final 7"
    ))
}

fn ac2() -> Outcome {
    let mut p = Package::default();
    let one = c(1.0, 0.0);
    let h = FRAC_1_SQRT_2;
    let w = c(h, h);
    let h_on_q0 = DenseMatrix::from_fn(3, |r, col| {
        if r / 2 != col / 2 {
            c(0.0, 0.0)
        } else if r % 2 == 1 && col % 2 == 1 {
            c(-h, 0.0)
        } else {
            c(h, 0.0)
        }
    });
    let diag = |d: [Complex64; 8]| {
        DenseMatrix::from_fn(3, |r, col| if r == col { d[r] } else { c(0.0, 0.0) })
    };
    let cases = [
        (Gate::single(GateKind::H, 0), 3, h_on_q0),
        (
            Gate::new(GateKind::S, 0, [1])?,
            4,
            diag([one, one, one, c(0.0, 1.0), one, one, one, c(0.0, 1.0)]),
        ),
        (
            Gate::new(GateKind::T, 0, [2])?,
            5,
            diag([one, one, one, one, one, w, one, w]),
        ),
    ];
    let mut counts = Vec::new();
    let mut worst = 0.0f64;
    for (gate, nodes, expected) in cases {
        let e = p.gate_dd(&gate, 3)?;
        let got = p.node_count(e);
        require(got == nodes, || {
            format!("{gate}: {got} nodes, expected {nodes}")
        })?;
        let diff = p.to_matrix(e, 3)?.max_abs_diff(&expected);
        require(diff <= 1e-12, || {
            format!("{gate}: matrix differs by {diff:e}")
        })?;
        counts.push(got);
        worst = worst.max(diff);
    }
    Ok(format!("node counts {counts:?}, max entry error {worst:e}"))
}

fn repeated_mults(r: &RepeatedCircuit) -> Result<usize, Failure> {
    let mut p = Package::default();
    let (_, s) = build_repeated(&mut p, r, &opts())?;
    Ok(s.multiplications)
}

fn ac3() -> Outcome {
    let g4 = grover(4, "0000")?;
    let m = repeated_mults(&g4)?;
    require(m == 3, || format!("Grover d=4 used {m} multiplications"))?;
    let base = grover(2, "10")?;
    for k in 0..=10u32 {
        let r = base.clone().with_repetitions(1 << k)?;
        let m = repeated_mults(&r)?;
        require(m == k as usize + 1, || {
            format!("N=2^{k}: {m} multiplications")
        })?;
    }
    for n in 1..=300usize {
        let r = base.clone().with_repetitions(n)?;
        let m = repeated_mults(&r)?;
        let bound = 2 * n.ilog2() as usize + 1;
        require(m <= bound, || format!("N={n}: {m} > {bound}"))?;
    }
    Ok("Grover d=4: 3; N=2^k: k+1 for k<=10; N<=300 within 2*floor(log2 N)+1".into())
}

enum Workload {
    Plain {
        circuit: Circuit,
        qft_n: Option<usize>,
    },
    Repeated(RepeatedCircuit),
}

struct Case {
    name: String,
    workload: Workload,
}

fn cases() -> Result<Vec<Case>, Failure> {
    let mut out = Vec::new();
    for n in 2..=8 {
        out.push(Case {
            name: format!("qft:{n}"),
            workload: Workload::Plain {
                circuit: qft(n, false)?,
                qft_n: Some(n),
            },
        });
    }
    for d in 1..=6 {
        let zeros = "0".repeat(d);
        let alternating: String = (0..d).map(|i| if i % 2 == 0 { '1' } else { '0' }).collect();
        for marked in [zeros, alternating] {
            out.push(Case {
                name: format!("grover:{d}:{marked}"),
                workload: Workload::Repeated(grover(d, &marked)?),
            });
        }
    }
    let shift: u64 = std::env::var("QFB_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    for i in 0..RANDOM_CIRCUITS {
        let seed = shift.wrapping_mul(1_000_003).wrapping_add(i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=40);
        out.push(Case {
            name: format!("random seed {seed} (n={n}, m={m})"),
            workload: Workload::Plain {
                circuit: random_circuit(n, m, &mut rng)?,
                qft_n: None,
            },
        });
    }
    Ok(out)
}

/// Results of building one case with every strategy.
struct Checked {
    equivalence: Result<(), String>,
    liveness: Result<(), String>,
    unitarity: Option<Result<(), String>>,
}

fn check_case(case: &Case) -> Result<Checked, Failure> {
    let mut p = Package::default();
    let (circuit, qft_n) = match &case.workload {
        Workload::Plain { circuit, qft_n } => (circuit.clone(), *qft_n),
        Workload::Repeated(r) => (r.unroll(), None),
    };
    let n = circuit.n();
    let m = circuit.len();
    let mut roots: Vec<(&str, Edge)> = Vec::new();
    let (seq, _) = build_sequential(&mut p, &circuit, &opts())?;
    roots.push(("sequential", seq));
    let (pw, pw_stats) = build_pairwise(&mut p, &circuit, &opts())?;
    roots.push(("pairwise", pw));
    if let Workload::Repeated(r) = &case.workload {
        let (rep, _) = build_repeated(&mut p, r, &opts())?;
        roots.push(("repeated", rep));
    }

    let equivalence = (|| {
        for &(name, e) in &roots[1..] {
            if e != roots[0].1 {
                return Err(format!(
                    "{}: {name} root differs from sequential",
                    case.name
                ));
            }
        }
        let u = p.to_matrix(seq, n).map_err(|e| e.to_string())?;
        let dense = dense_product(&circuit).map_err(|e| e.to_string())?;
        let diff = u.max_abs_diff(&dense);
        if diff.is_nan() || diff > ORACLE_TOL {
            return Err(format!(
                "{}: differs from dense product by {diff:e}",
                case.name
            ));
        }
        if let Some(q) = qft_n {
            let f = dft(q);
            let expected = DenseMatrix::from_fn(q, |r, col| f.get(r, bit_reverse(col, q)));
            let diff = u.max_abs_diff(&expected);
            if diff.is_nan() || diff > ORACLE_TOL {
                return Err(format!(
                    "{}: differs from the bit-reversed DFT by {diff:e}",
                    case.name
                ));
            }
        }
        Ok(())
    })();

    let bound = (m as f64).log2().ceil() as usize + 1;
    let liveness = if pw_stats.max_live <= bound {
        Ok(())
    } else {
        Err(format!(
            "{}: {} live intermediates > {bound}",
            case.name, pw_stats.max_live
        ))
    };

    let unitarity = (n <= 6).then(|| {
        let u = p.to_matrix(seq, n).map_err(|e| e.to_string())?;
        let err = u.unitarity_error();
        if err <= ORACLE_TOL {
            Ok(())
        } else {
            Err(format!("{}: |U U^dagger - I| = {err:e}", case.name))
        }
    });

    Ok(Checked {
        equivalence,
        liveness,
        unitarity,
    })
}

/// Runs the shared circuit set once and splits the findings into the
/// equivalence, liveness and unitarity criteria.
fn ac4_ac7_ac8() -> (Outcome, Outcome, Outcome) {
    let cases = match cases() {
        Ok(c) => c,
        Err(Failure(e)) => {
            let f = || Err(Failure(format!("could not generate circuits: {e}")));
            return (f(), f(), f());
        }
    };
    let total = cases.len();
    let (mut eq_fail, mut live_fail, mut unit_fail) = (Vec::new(), Vec::new(), Vec::new());
    let mut unit_checked = 0;
    for case in &cases {
        match check_case(case) {
            Ok(r) => {
                if let Err(e) = r.equivalence {
                    eq_fail.push(e);
                }
                if let Err(e) = r.liveness {
                    live_fail.push(e);
                }
                if let Some(u) = r.unitarity {
                    unit_checked += 1;
                    if let Err(e) = u {
                        unit_fail.push(e);
                    }
                }
            }
            Err(Failure(e)) => eq_fail.push(format!("{}: {e}", case.name)),
        }
    }
    let summarize = |fails: Vec<String>, checked: usize, what: &str| -> Outcome {
        if fails.is_empty() {
            Ok(format!("{checked} circuits, {what}"))
        } else {
            Err(Failure(format!(
                "{} of {checked} failed; first: {}",
                fails.len(),
                fails[0]
            )))
        }
    };
    (
        summarize(
            eq_fail,
            total,
            "identical root edges, dense and DFT oracles within 1e-9",
        ),
        summarize(
            live_fail,
            total,
            "pairwise live intermediates within ceil(log2 m)+1",
        ),
        summarize(unit_fail, unit_checked, "U U^dagger = I within 1e-9"),
    )
}

fn time_build(c: &Circuit, pairwise: bool) -> Result<(Duration, usize, usize), Failure> {
    let mut p = Package::default();
    let (_, s) = if pairwise {
        build_pairwise(&mut p, c, &opts())?
    } else {
        build_sequential(&mut p, c, &opts())?
    };
    Ok((s.wall_time, s.final_nodes, s.peak_nodes))
}

fn ac5() -> Outcome {
    let mut log_sum = 0.0;
    let mut parts = Vec::new();
    for n in 14..=18 {
        let circuit = qft(n, false)?;
        let (ts, fs, _) = time_build(&circuit, false)?;
        let (tp, fp, _) = time_build(&circuit, true)?;
        require(fs == fp, || {
            format!("n={n}: final nodes differ ({fs} vs {fp})")
        })?;
        let ratio = ts.as_secs_f64() / tp.as_secs_f64();
        log_sum += ratio.ln();
        parts.push(format!(
            "n={n} {:.3}s/{:.3}s",
            ts.as_secs_f64(),
            tp.as_secs_f64()
        ));
    }
    let geo = (log_sum / 5.0).exp();
    require(geo > 1.0, || {
        format!(
            "geometric-mean speedup {geo:.2}x is not above 1 ({})",
            parts.join(", ")
        )
    })?;
    Ok(format!(
        "geometric-mean sequential/pairwise {geo:.2}x (reference average 3.0x); {}",
        parts.join(", ")
    ))
}

/// Peak-size comparison reported alongside AC-5; not a pass/fail criterion.
fn peak_finding() -> String {
    let mut worse = Vec::new();
    for n in 3..=10 {
        let Ok(circuit) = qft(n, false) else { continue };
        match (time_build(&circuit, false), time_build(&circuit, true)) {
            (Ok((_, _, ps)), Ok((_, _, pp))) if pp > ps => {
                worse.push(format!("n={n}: {pp} > {ps}"))
            }
            _ => {}
        }
    }
    if worse.is_empty() {
        "pairwise peak node count <= sequential for QFT n=3..10".into()
    } else {
        format!(
            "pairwise peak exceeds sequential for QFT {}",
            worse.join(", ")
        )
    }
}

fn ac6() -> Outcome {
    let limit = Duration::from_secs(60);
    let mut parts = Vec::new();
    for d in 14..=18 {
        let g = grover(d, &"0".repeat(d))?;
        let rep_time = {
            let mut p = Package::default();
            let (_, s) = build_repeated(&mut p, &g, &opts())?;
            s.wall_time
        };
        require(rep_time <= Duration::from_secs(10), || {
            format!("d={d}: repeated took {:.2}s", rep_time.as_secs_f64())
        })?;
        let unrolled = g.unroll();
        let start = Instant::now();
        let seq = {
            let mut p = Package::default();
            build_sequential(&mut p, &unrolled, &BuildOptions::with_timeout(limit))
                .map(|(_, s)| s.wall_time)
        };
        let part = match seq {
            Err(Error::Timeout) => format!(
                "d={d} repeated {:.2}s, sequential >{}s",
                rep_time.as_secs_f64(),
                limit.as_secs()
            ),
            Ok(t) => {
                let ratio = t.as_secs_f64() / rep_time.as_secs_f64();
                require(ratio >= 10.0, || {
                    format!("d={d}: sequential only {ratio:.1}x slower than repeated")
                })?;
                format!(
                    "d={d} repeated {:.2}s, sequential {:.2}s",
                    rep_time.as_secs_f64(),
                    t.as_secs_f64()
                )
            }
            Err(e) => {
                return Err(Failure(format!(
                    "d={d}: sequential failed after {:.1}s: {e}",
                    start.elapsed().as_secs_f64()
                )))
            }
        };
        parts.push(part);
    }
    Ok(parts.join("; "))
}

fn report(label: &str, outcome: std::thread::Result<Outcome>) -> bool {
    match outcome {
        Ok(Ok(detail)) => {
            println!("{label} PASS: {detail}");
            true
        }
        Ok(Err(Failure(why))) => {
            println!("{label} FAIL: {why}");
            false
        }
        Err(_) => {
            println!("{label} FAIL: panicked");
            false
        }
    }
}

fn run<T>(f: impl FnOnce() -> T) -> std::thread::Result<T> {
    panic::catch_unwind(AssertUnwindSafe(f))
}

fn main() -> ExitCode {
    let mut passed = 0;
    let mut total = 0;
    let mut tally = |ok: bool| {
        total += 1;
        if ok {
            passed += 1;
        }
    };
    tally(report("AC-1", run(ac1)));
    tally(report("AC-2", run(ac2)));
    tally(report("AC-3", run(ac3)));
    let (a4, a7, a8) = match run(ac4_ac7_ac8) {
        Ok((a, b, c)) => (Ok(a), Ok(b), Ok(c)),
        Err(_) => {
            let panicked = || {
                Ok(Err(Failure(
                    "panicked while checking the shared circuit set".into(),
                )))
            };
            (panicked(), panicked(), panicked())
        }
    };
    tally(report("AC-4", a4));
    tally(report("AC-5", run(ac5)));
    if let Ok(note) = run(peak_finding) {
        println!("     note: {note}");
    }
    tally(report("AC-6", run(ac6)));
    tally(report("AC-7", a7));
    tally(report("AC-8", a8));
    println!("acceptance: {passed}/{total} criteria passed");
    if passed == total {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
