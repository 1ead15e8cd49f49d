//! End-to-end acceptance checks, one PASS/FAIL line per criterion.

#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use std::path::Path;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use segmap_core::automaton::{run, AutomatonParams, DeviationTables};
use segmap_core::graph::SegGraph;
use segmap_core::grid::{compute_stats, generate_d1, generate_d2, LabeledGrid};
use segmap_core::metrics::{extract_adjacency, mean_deviations, validate_topology};
use segmap_core::pipeline::{embed, Embedded};
use segmap_core::raster::CellState;
use segmap_core::render::{height, normal_at, shading_coefficients, ShadingProfile};

const SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

struct Outcome {
    ok: bool,
    detail: String,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn pct(v: f64) -> String {
    format!("{:.4}%", 100.0 * v)
}

fn d1(dims: &[usize], k: usize, seed: u64) -> Embedded {
    embed(&generate_d1(dims, k, seed).unwrap()).unwrap()
}

fn params(seed: u64) -> AutomatonParams {
    AutomatonParams {
        rng_seed: seed,
        ..AutomatonParams::default()
    }
}

fn topology() -> Outcome {
    let mut cases: Vec<(String, Embedded, u64)> = vec![("D2".into(), embed(&generate_d2()).unwrap(), 0)];
    for k in [5, 10, 15, 20] {
        for seed in 0..5 {
            cases.push((format!("2D k={k} seed={seed}"), d1(&[50, 50], k, 100 + seed), seed));
        }
    }
    for (k, n) in [(5, 4), (10, 3), (15, 3)] {
        for seed in 0..n {
            cases.push((format!("3D k={k} seed={seed}"), d1(&[20, 20, 20], k, 200 + seed), seed));
        }
    }
    let t = Instant::now();
    let mut bad = Vec::new();
    for (name, e, seed) in &cases {
        if !validate_topology(&e.initial, &e.graph).ok() {
            bad.push(format!("{name} initial"));
        }
        let r = run(&e.initial, &e.stats, &params(*seed));
        let check = validate_topology(&r.state, &e.graph);
        if !check.ok() {
            bad.push(format!("{name} final: {check}"));
        }
    }
    let elapsed = t.elapsed();
    Outcome {
        ok: bad.is_empty() && elapsed < Duration::from_secs(30 * 60),
        detail: format!(
            "{} instances, {} violations{}, {:.1}s",
            cases.len(),
            bad.len(),
            if bad.is_empty() { String::new() } else { format!(" ({})", bad.join("; ")) },
            elapsed.as_secs_f64()
        ),
    }
}

fn quality(e: &Embedded, seeds: &[u64]) -> (f64, f64, f64, f64) {
    let (mut da, mut dl, mut cr, mut secs) = (vec![], vec![], vec![], vec![]);
    for &s in seeds {
        let t = Instant::now();
        let r = run(&e.initial, &e.stats, &params(s));
        secs.push(t.elapsed().as_secs_f64());
        let (a, l) = mean_deviations(&r.state, &e.stats);
        da.push(a);
        dl.push(l);
        cr.push(r.state.num_crossings() as f64);
    }
    (median(da), median(dl), median(cr), secs.into_iter().fold(0.0, f64::max))
}

fn d1_2d_quality() -> Outcome {
    // generator and automaton share the seed, as on the command line
    let (mut da, mut dl, mut cr) = (vec![], vec![], vec![]);
    for s in SEEDS {
        let e = d1(&[50, 50], 20, s);
        let (a, l, c, _) = quality(&e, &[s]);
        da.push(a);
        dl.push(l);
        cr.push(c);
    }
    let (a, l, c) = (median(da), median(dl), median(cr));
    Outcome {
        ok: a <= 0.001 && l <= 0.03 && c == 0.0,
        detail: format!("median dA {} (<= 0.1%), dL {} (<= 3%), crossings {c} (= 0)", pct(a), pct(l)),
    }
}

fn d2_quality() -> Outcome {
    let e = embed(&generate_d2()).unwrap();
    let (a, l, c, worst) = quality(&e, &SEEDS);
    Outcome {
        ok: c <= 8.0 && a <= 0.01 && l <= 0.10 && worst < 300.0,
        detail: format!(
            "median crossings {c} (<= 8), dA {} (<= 1%), dL {} (<= 10%), slowest run {worst:.2}s (< 300s)",
            pct(a),
            pct(l)
        ),
    }
}

fn security_ablation() -> Outcome {
    let total = |sec: u32| {
        median(
            SEEDS
                .iter()
                .map(|&s| {
                    let e = d1(&[20, 20, 20], 10, s);
                    let p = AutomatonParams {
                        security_threshold: sec,
                        ..params(s)
                    };
                    let r = run(&e.initial, &e.stats, &p);
                    DeviationTables::compute(&r.state, &e.stats).total_boundary_2d as f64
                })
                .collect(),
        )
    };
    let (hi, lo) = (total(12), total(10));
    Outcome {
        ok: hi >= lo,
        detail: format!("median total 2D boundary: security 12 -> {hi}, security 10 -> {lo}"),
    }
}

fn boundary_ablation() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for k in [5, 10, 15] {
        let (mut on_a, mut on_l, mut off_a, mut off_l) = (vec![], vec![], vec![], vec![]);
        for s in SEEDS {
            let e = d1(&[20, 20, 20], k, s);
            let on = run(&e.initial, &e.stats, &params(s));
            let off = run(
                &e.initial,
                &e.stats,
                &AutomatonParams {
                    optimize_boundaries: false,
                    damping: 100.0,
                    ..params(s)
                },
            );
            let (a, l) = mean_deviations(&on.state, &e.stats);
            on_a.push(a);
            on_l.push(l);
            let (a, l) = mean_deviations(&off.state, &e.stats);
            off_a.push(a);
            off_l.push(l);
        }
        let (ona, onl, offa, offl) = (median(on_a), median(on_l), median(off_a), median(off_l));
        let good = offl >= onl && offa <= ona;
        ok &= good;
        parts.push(format!(
            "k={k}: dL off {} vs on {}, dA off {} vs on {}{}",
            pct(offl),
            pct(onl),
            pct(offa),
            pct(ona),
            if good { "" } else { " [violated]" }
        ));
    }
    Outcome {
        ok,
        detail: parts.join("; "),
    }
}

fn convergence() -> Outcome {
    let (mut early, mut late) = (vec![], vec![]);
    for s in SEEDS {
        let e = d1(&[20, 20, 20], 8, s);
        for iters in [200, 2000] {
            let r = run(
                &e.initial,
                &e.stats,
                &AutomatonParams {
                    max_iterations: iters,
                    ..params(s)
                },
            );
            let da = mean_deviations(&r.state, &e.stats).0;
            if iters == 200 {
                early.push(da)
            } else {
                late.push(da)
            }
        }
    }
    let (a200, a2000) = (median(early), median(late));
    // fixed iteration counts: disable early stopping, best of three timings
    let e = d1(&[20, 20, 20], 8, 1);
    let time = |iters: usize| {
        let p = AutomatonParams {
            max_iterations: iters,
            stop_patience: usize::MAX,
            ..params(1)
        };
        (0..3)
            .map(|_| {
                let t = Instant::now();
                let r = run(&e.initial, &e.stats, &p);
                assert_eq!(r.iterations_used, iters);
                t.elapsed().as_secs_f64()
            })
            .fold(f64::INFINITY, f64::min)
    };
    let (t500, t2000) = (time(500), time(2000));
    let ratio = t2000 / t500;
    Outcome {
        ok: a2000 <= a200 && ratio <= 4.0 * 1.2,
        detail: format!(
            "median dA {} at 200 -> {} at 2000; time 500 it {t500:.3}s, 2000 it {t2000:.3}s, ratio {ratio:.2} (<= 4.8)",
            pct(a200),
            pct(a2000)
        ),
    }
}

fn xorshift(x: &mut u64) -> u64 {
    *x ^= *x << 13;
    *x ^= *x >> 7;
    *x ^= *x << 17;
    *x
}

fn oracles() -> Outcome {
    let mut x = 0x9e37_79b9_7f4a_7c15u64;
    let mut bad = 0;
    for _ in 0..100 {
        let k = 1 + (xorshift(&mut x) % 8) as usize;
        // mostly segments, some background, a few (possibly broken) crossings
        let cells: Vec<i32> = (0..32 * 32)
            .map(|_| match xorshift(&mut x) % 20 {
                0 => -2,
                1..=3 => -1,
                _ => (xorshift(&mut x) % k as u64) as i32,
            })
            .collect();
        let g = SegGraph::from_parts(k, vec![1; k], vec![]);
        let cs = CellState::new(32, 32, cells, Arc::new(g)).unwrap();
        let got = extract_adjacency(&cs);
        if (got.vertices, got.edges) != oracle::adjacency(&cs) {
            bad += 1;
        }
    }
    let mut bad_stats = 0;
    for _ in 0..20 {
        let dims: Vec<usize> = (0..3).map(|_| 1 + (xorshift(&mut x) % 16) as usize).collect();
        let k = 1 + xorshift(&mut x) % 12;
        let n: usize = dims.iter().product();
        let labels = (0..n).map(|_| (xorshift(&mut x) % k) as u32).collect();
        let (grid, _) = LabeledGrid::new(dims, labels).unwrap().normalized();
        let stats = compute_stats(&grid);
        let (sizes, faces) = oracle::face_counts(&grid);
        if stats.sizes != sizes || stats.boundaries != faces {
            bad_stats += 1;
        }
    }
    Outcome {
        ok: bad == 0 && bad_stats == 0,
        detail: format!("adjacency mismatches {bad}/100, face-count mismatches {bad_stats}/20"),
    }
}

fn segmap(args: &[&str], out: &Path) -> bool {
    Command::new(env!("CARGO_BIN_EXE_segmap"))
        .args(args)
        .arg("-o")
        .arg(out)
        .output()
        .map(|o| o.status.success())
        .unwrap_or(false)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let runs: [(&str, &[&str]); 2] = [
        ("d1", &["all", "--gen", "d1", "--dims", "50", "50", "--segments", "20", "--seed", "42"]),
        ("d2", &["all", "--gen", "d2", "--iterations", "5000", "--damping", "7", "--security", "11"]),
    ];
    let mut bad = Vec::new();
    for (name, args) in runs {
        let mut outs = Vec::new();
        for (i, threads) in ["1", "8", "8"].iter().enumerate() {
            let out = dir.path().join(format!("{name}_{i}"));
            let mut a = vec!["--threads", threads];
            a.extend_from_slice(args);
            if !segmap(&a, &out) {
                bad.push(format!("{name} run {i} failed"));
            }
            outs.push(out);
        }
        for f in ["state.castate", "report.json", "embedding.png"] {
            let read = |d: &Path| std::fs::read(d.join(f)).unwrap_or_default();
            let first = read(&outs[0]);
            if first.is_empty() || outs[1..].iter().any(|o| read(o) != first) {
                bad.push(format!("{name} {f} differs"));
            }
        }
    }
    Outcome {
        ok: bad.is_empty(),
        detail: if bad.is_empty() {
            "state.castate, report.json and embedding.png identical for threads 1/8/8 (D1 seed 42, D2)".into()
        } else {
            bad.join("; ")
        },
    }
}

fn rendering() -> Outcome {
    let mut worst = 0.0f64;
    let mut plateau = true;
    let mut valley = true;
    for r in [4usize, 8, 12] {
        let p = ShadingProfile::new(r, 1);
        for (x1, len) in [(0.0, 40.0), (13.0, 7.0), (-5.5, 100.0)] {
            let x2 = x1 + len;
            let w = p.w.min(len / 2.0);
            let (a, b) = shading_coefficients(x1, x2, x1 + w, &p, false);
            worst = worst
                .max(height(x1, x2, x1, &p, false).abs())
                .max((height(x1, x2, x1 + w, &p, false) - p.h).abs())
                .max((2.0 * (a * (x1 + w) + b)).abs());
            valley &= (height(x1, x2, x1 + len / 2.0, &p, true) + p.h).abs() < 1e-9;
        }
        let g = SegGraph::from_parts(1, vec![1], vec![]);
        let cs = CellState::new(6, 6, vec![0; 36], Arc::new(g)).unwrap();
        plateau &= normal_at(3 * r, 3 * r, &cs, &p) == [0.0, 0.0, 1.0];
    }
    Outcome {
        ok: plateau && valley && worst <= 1e-9,
        detail: format!("plateau (0,0,1) exact: {plateau}; ramp constraint error {worst:.1e} (<= 1e-9); valley at -h: {valley}"),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("topology exactness", topology),
        ("D1-2D 20-segment quality", d1_2d_quality),
        ("D2 quality", d2_quality),
        ("security-factor ablation", security_ablation),
        ("boundary-optimization ablation", boundary_ablation),
        ("convergence", convergence),
        ("oracle equivalence", oracles),
        ("determinism", determinism),
        ("rendering numerics", rendering),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.ok {
            failed += 1;
        }
        println!("criterion {} {name}: {} - {}", i + 1, if o.ok { "PASS" } else { "FAIL" }, o.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
