//! Acceptance suite. Runs every criterion at its stated tolerance and prints
//! one PASS/FAIL line each; exits nonzero if any criterion fails.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use framescale::exact::{exact_oracle, RationalFrame};
use framescale::feasibility::{
    decide_all, hull_lp_decide, separator_search, sign_quick_reject, weight_recovery,
    DecideOptions, Mode,
};
use framescale::fmap::{f_image, f_vector, outer_dims, q_matrix};
use framescale::report::{FrameData, ReportDocument};
use framescale::subsets::{caratheodory_reduce, is_m_scalable, SearchOptions};
use framescale::topology::{
    generic_dimension_probe, nonscalable_witness, random_frame, random_orthogonal,
    random_unit_vector,
};
use framescale::{Frame, ScalingWeights, TOL_TIGHT};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn farkas_exclusivity() -> Outcome {
    let start = Instant::now();
    let opts = DecideOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut scalable, mut separated) = (0, 0);
    for case in 0..1000u64 {
        let n = rng.random_range(2..=4);
        let m = rng.random_range(n..=10);
        let f = random_frame(n, m, 10_000 + case).map_err(|e| e.to_string())?;
        let all: Vec<usize> = (0..m).collect();
        let v = decide_all(&f, &opts).map_err(|e| format!("case {case}: {e}"))?;
        v.verify(&f, TOL_TIGHT)
            .map_err(|e| format!("case {case}: certificate fails: {e}"))?;
        let fi = f_image(&f).map_err(|e| e.to_string())?;
        if let Some(w) = v.weights() {
            scalable += 1;
            check(w.residual <= 1e-9 * w.tight_constant, || {
                format!("case {case}: residual {:e}", w.residual)
            })?;
            let (t, _) = separator_search(&fi, &all).map_err(|e| e.to_string())?;
            check(t < 1e-10, || {
                format!("case {case}: double certificate, t* = {t:e}")
            })?;
        } else {
            separated += 1;
            let s = v.separator().ok_or("no certificate")?;
            check(s.margin >= 1e-10, || {
                format!("case {case}: margin {:e}", s.margin)
            })?;
            check(
                weight_recovery(&fi, &f, &all, false, &opts).is_err(),
                || format!("case {case}: double certificate, weights also verify"),
            )?;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs <= 60.0, || format!("runtime {secs:.1}s > 60s"))?;
    Ok(format!(
        "1000 frames, {scalable} weighted, {separated} separated, {secs:.1}s"
    ))
}

fn dyadic_frame(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Option<Frame> {
    let vectors: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            (0..n)
                .map(|_| (rng.sample::<f64, _>(StandardNormal) * 1024.0).round() / 1024.0)
                .collect()
        })
        .collect();
    Frame::new(n, &vectors).ok()
}

fn decider_agreement() -> Outcome {
    let float = DecideOptions {
        exact_fallback: false,
        ..DecideOptions::default()
    };
    let exact = DecideOptions {
        mode: Mode::Exact,
        ..DecideOptions::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut cases, mut flagged, mut scalable) = (0, 0, 0);
    while cases < 500 {
        let n = rng.random_range(2..=3);
        let m = rng.random_range(n..=6);
        let Some(f) = dyadic_frame(n, m, &mut rng) else {
            continue;
        };
        cases += 1;
        let all: Vec<usize> = (0..m).collect();
        let oracle = exact_oracle(&RationalFrame::from_frame(&f), &all)
            .map_err(|e| format!("case {cases}: {e}"))?;
        let hull = hull_lp_decide(&f, &all).map_err(|e| e.to_string())?;
        let v = decide_all(&f, &float).map_err(|e| format!("case {cases}: {e}"))?;
        scalable += usize::from(oracle.scalable);
        if v.boundary_flag {
            flagged += 1;
            let ve = decide_all(&f, &exact).map_err(|e| e.to_string())?;
            check(ve.scalable == oracle.scalable, || {
                format!("case {cases}: exact mode disagrees with the oracle")
            })?;
            continue;
        }
        check(
            v.scalable == oracle.scalable && hull == oracle.scalable,
            || {
                format!(
                    "case {cases}: float {} oracle {} hull {hull}",
                    v.scalable, oracle.scalable
                )
            },
        )?;
    }
    check(flagged * 100 <= cases, || {
        format!("{flagged} boundary cases out of {cases}")
    })?;
    Ok(format!(
        "{cases} frames, {scalable} scalable, {flagged} in the boundary band"
    ))
}

fn onb_plus_vector(n: usize, rng: &mut ChaCha8Rng) -> Frame {
    let mut vectors: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    loop {
        let phi = random_unit_vector(n, rng);
        if phi.iter().filter(|x| x.abs() > 1e-3).count() >= 2 {
            vectors.push(phi.iter().copied().collect());
            return Frame::new(n, &vectors).expect("contains a basis");
        }
    }
}

fn n_plus_one_vectors() -> Outcome {
    let opts = SearchOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 2..=5 {
        for case in 0..100 {
            let f = onb_plus_vector(n, &mut rng);
            let at_n = is_m_scalable(&f, n, true, &opts).map_err(|e| e.to_string())?;
            let at_n1 = is_m_scalable(&f, n + 1, true, &opts).map_err(|e| e.to_string())?;
            check(
                at_n.is_scalable() == Some(true) && at_n1.is_scalable() == Some(false),
                || {
                    format!(
                        "N={n} case {case}: m=N {:?}, m=N+1 {:?}",
                        at_n.is_scalable(),
                        at_n1.is_scalable()
                    )
                },
            )?;
        }
    }
    Ok("400 frames, strictly N-scalable and never strictly (N+1)-scalable".into())
}

fn rotated_onb_union(n: usize, copies: usize, rng: &mut ChaCha8Rng) -> Frame {
    let blocks: Vec<DMatrix<f64>> = (0..copies).map(|_| random_orthogonal(n, rng)).collect();
    let m = DMatrix::from_fn(n, n * copies, |i, j| blocks[j / n][(i, j % n)]);
    Frame::from_matrix(m).expect("orthonormal bases span")
}

fn caratheodory_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut max_support = 0;
    for case in 0..200 {
        let n = if case % 2 == 0 { 2 } else { 3 };
        let copies = rng.random_range(2..=12 / n);
        let f = rotated_onb_union(n, copies, &mut rng);
        let w = ScalingWeights::new(&f, &vec![1.0; f.len()], 1e-8).map_err(|e| e.to_string())?;
        let r = caratheodory_reduce(&f, &w, 1e-8).map_err(|e| format!("case {case}: {e}"))?;
        let m_phi = outer_dims(&f).linear_dim;
        let check_w = ScalingWeights::new(&f, &r.u, 1e-8).map_err(|e| e.to_string())?;
        check(r.support.len() <= m_phi && m_phi <= n * (n + 1) / 2, || {
            format!("case {case}: support {} > m_phi {m_phi}", r.support.len())
        })?;
        check(check_w.residual <= 1e-8 * check_w.tight_constant, || {
            format!("case {case}: residual {:e}", check_w.residual)
        })?;
        max_support = max_support.max(r.support.len());
    }
    Ok(format!("200 frames, largest reduced support {max_support}"))
}

fn nowhere_density() -> Outcome {
    let s = 1.0 / 3f64.sqrt();
    let base = Frame::new(
        3,
        &[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![s, s, s],
        ],
    )
    .map_err(|e| e.to_string())?;
    let opts = DecideOptions::default();
    let mut smallest = f64::INFINITY;
    for eps in [1e-1, 1e-2, 1e-3] {
        for seed in 0..10 {
            let w = nonscalable_witness(&base, eps, seed, &opts)
                .map_err(|e| format!("eps {eps:e} seed {seed}: {e}"))?;
            let v = decide_all(&w.perturbed, &opts).map_err(|e| e.to_string())?;
            let margin = v.separator().map_or(0.0, |s| s.margin);
            check(w.distance <= eps && !v.scalable && margin > 0.0, || {
                format!(
                    "eps {eps:e} seed {seed}: distance {:e}, scalable {}, margin {margin:e}",
                    w.distance, v.scalable
                )
            })?;
            smallest = smallest.min(margin);
        }
    }
    Ok(format!("30/30 witnesses, smallest margin {smallest:e}"))
}

fn generic_dimension() -> Outcome {
    let mut grids = 0;
    for n in 2..=4 {
        for m in n..=12 {
            let p = generic_dimension_probe(n, m, 100, 6 + (n * 100 + m) as u64)
                .map_err(|e| e.to_string())?;
            check(p.fraction == 1.0, || {
                format!(
                    "N={n} M={m}: fraction {}, seeds {:?}",
                    p.fraction, p.failures
                )
            })?;
            grids += 1;
        }
    }
    Ok(format!("{grids} (N,M) cells, 100 trials each"))
}

fn fmap_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..10_000 {
        let n = rng.random_range(2..=6);
        let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let fx = f_vector(&x).map_err(|e| e.to_string())?;
        let a: Vec<f64> = (0..fx.len()).map(|_| rng.sample(StandardNormal)).collect();
        let lambda: f64 = rng.sample(StandardNormal);
        let q = q_matrix(n, &a).map_err(|e| e.to_string())?;
        let pairing: f64 = fx.iter().zip(&a).map(|(p, q)| p * q).sum();
        let scale: f64 = fx.iter().zip(&a).map(|(p, q)| (p * q).abs()).sum();
        check((pairing - q.eval(&x)).abs() <= 1e-12 * scale, || {
            format!("case {case}: pairing {pairing} vs {}", q.eval(&x))
        })?;
        check(q.trace() == 0.0, || {
            format!("case {case}: trace {:e}", q.trace())
        })?;
        let xl: Vec<f64> = x.iter().map(|v| lambda * v).collect();
        let fxl = f_vector(&xl).map_err(|e| e.to_string())?;
        let l2 = lambda * lambda;
        let diff: f64 = fxl
            .iter()
            .zip(&fx)
            .map(|(u, v)| (u - l2 * v).powi(2))
            .sum::<f64>()
            .sqrt();
        let norm: f64 = fx.iter().map(|v| (l2 * v).powi(2)).sum::<f64>().sqrt();
        check(diff <= 1e-12 * norm, || {
            format!("case {case}: homogeneity error {diff:e} against {norm:e}")
        })?;
        check(fx.iter().any(|&v| v != 0.0), || {
            format!("case {case}: F(x) = 0")
        })?;
    }
    Ok("10000 samples".into())
}

fn quadrant_frame(rng: &mut ChaCha8Rng) -> Frame {
    let n = rng.random_range(2..=4);
    let m = rng.random_range(n..=8);
    let i = rng.random_range(0..n - 1);
    let j = rng.random_range(i + 1..n);
    let negative = rng.random_bool(0.5);
    loop {
        let vectors: Vec<Vec<f64>> = (0..m)
            .map(|_| {
                let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                v[i] = v[i].abs() + 0.05;
                v[j] = v[j].abs() + 0.05;
                if negative {
                    v[j] = -v[j];
                }
                v
            })
            .collect();
        if let Ok(f) = Frame::new(n, &vectors) {
            return f;
        }
    }
}

fn sign_test_soundness() -> Outcome {
    let opts = DecideOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..200 {
        let f = quadrant_frame(&mut rng);
        let witness = sign_quick_reject(&f).map_err(|e| e.to_string())?;
        check(witness.is_some(), || {
            format!("case {case}: sign test did not fire")
        })?;
        let v = decide_all(&f, &opts).map_err(|e| e.to_string())?;
        check(!v.scalable && v.separator().is_some(), || {
            format!("case {case}: decide reports scalable")
        })?;
        v.verify(&f, TOL_TIGHT)
            .map_err(|e| format!("case {case}: {e}"))?;
    }
    Ok("200 frames rejected by the sign test, all separated".into())
}

fn run_cli(args: &[&str]) -> Result<String, String> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = framescale::cli::run(
        std::iter::once("framescale").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    if code != 0 {
        return Err(format!(
            "{args:?} exited {code}: {}",
            String::from_utf8_lossy(&err)
        ));
    }
    String::from_utf8(out).map_err(|e| e.to_string())
}

fn end_to_end_cli() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("mercedes.json");
    let root3 = "0.86602540378443864676372317075293618347140262690519";
    std::fs::write(
        &path,
        format!(r#"{{"n": 2, "vectors": [[0, 1], ["-{root3}", "-1/2"], ["{root3}", "-1/2"]]}}"#),
    )
    .map_err(|e| e.to_string())?;
    let p = path.to_str().ok_or("path")?;

    let first = run_cli(&["analyze", p])?;
    let doc = ReportDocument::from_json(&first, TOL_TIGHT).map_err(|e| e.to_string())?;
    check(doc.summary.scalable && doc.summary.strict, || {
        "Mercedes-Benz frame not strictly scalable".into()
    })?;
    let w = doc.verdict.weights().ok_or("no weights")?;
    let spread = w.u.iter().fold(0.0f64, |a, &x| a.max(x)) - w.min_weight();
    check(spread <= 1e-9, || format!("weights differ by {spread:e}"))?;

    let scaled = run_cli(&["scale", "--parseval", p])?;
    let data: FrameData = serde_json::from_str(&scaled).map_err(|e| e.to_string())?;
    let t = data.to_frame().map_err(|e| e.to_string())?.tightness(1e-9);
    check(t.tight && t.residual <= 1e-9, || {
        format!("scaled residual {:e}", t.residual)
    })?;

    let second = run_cli(&["analyze", p])?;
    check(first == second, || "reports differ between runs".into())?;
    Ok(format!(
        "weights spread {spread:e}, Parseval residual {:e}, byte-identical reports",
        t.residual
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("Farkas exclusivity", farkas_exclusivity),
        ("decider agreement", decider_agreement),
        ("N+1 vectors", n_plus_one_vectors),
        ("Caratheodory bound", caratheodory_bound),
        ("nowhere-density witness", nowhere_density),
        ("generic dimension", generic_dimension),
        ("F-map identities", fmap_identities),
        ("sign test soundness", sign_test_soundness),
        ("end-to-end CLI", end_to_end_cli),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}; {secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
