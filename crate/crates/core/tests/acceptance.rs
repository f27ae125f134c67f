//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! `cargo test -p gidl --test acceptance --release`
//!
//! - `GIDL_ACCEPTANCE_FULL=1` adds the slow j=2 synthetic variant.
//! - `GIDL_MNIST_DIR=<dir>` runs the smoke fit on real digits instead of
//!   generated strokes.
//! - `GIDL_ACCEPTANCE_STRICT=1` exits non-zero when any line is FAIL.

use std::f64::consts::TAU;
use std::path::Path;
use std::time::Instant;

use gidl::experiments::{
    fit_images, idx, load_digits, run_synthetic_with, run_tightness, SyntheticOptions,
};
use gidl::group::{
    enumerate_irreps, fourier_transform, irrep_matrix, tabulate, BlockDiagOperator,
    FourierCoefficients, GroupElement, GroupId, IrrepIndex, QuadratureGrid,
};
use gidl::learner::{code_exact, Dictionary};
use gidl::lifting::{
    lift_ambient_dimension, lift_image_to_so3_coeffs, real_symmetry_deviation, RasterImage,
};
use gidl::linalg::{frob_norm, C64, CMat};
use gidl::orbitope::{
    minkowski_so2, so3_operator_norm_relaxed, vandermonde_decompose, HermitianToeplitz,
    TrigMomentVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), gidl::Error>;

fn flag(name: &str) -> bool {
    std::env::var(name).is_ok_and(|v| !v.is_empty() && v != "0")
}

fn circ_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

fn representations() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut hom, mut uni) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let g1 = GroupElement::haar(GroupId::So3, &mut rng);
        let g2 = GroupElement::haar(GroupId::So3, &mut rng);
        let g12 = g1.compose(&g2)?;
        for j in 0..=5 {
            let xi = IrrepIndex::new(GroupId::So3, j)?;
            let (a, b) = (irrep_matrix(&xi, &g1)?, irrep_matrix(&xi, &g2)?);
            hom = hom.max(frob_norm(&(&a * &b - irrep_matrix(&xi, &g12)?)));
            let id = CMat::identity(a.nrows(), a.nrows());
            uni = uni.max(frob_norm(&(&a * a.adjoint() - id)));
        }
    }
    Ok((
        hom < 1e-9 && uni < 1e-10,
        format!("homomorphism {hom:.1e}, unitarity {uni:.1e}"),
    ))
}

fn plancherel() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut rt, mut pl) = (0.0f64, 0.0f64);
    for n in 1..=4 {
        let table = enumerate_irreps(GroupId::So3, n);
        let f = FourierCoefficients::random(&table, &mut rng);
        let grid = QuadratureGrid::for_bandwidth(GroupId::So3, n);
        let s = tabulate(&grid, |g| f.synthesize(g).unwrap());
        let back = fourier_transform(&s, &table)?;
        rt = rt.max(back.sub(&f)?.plancherel_norm() / f.plancherel_norm());
        let dense = tabulate(&QuadratureGrid::for_bandwidth(GroupId::So3, 2 * n + 2), |g| {
            f.synthesize(g).unwrap()
        });
        pl = pl.max((dense.l2_norm_sq() - f.plancherel_norm_sq()).abs());
    }
    Ok((
        rt < 1e-8 && pl < 1e-6,
        format!("round trip {rt:.1e}, plancherel vs quadrature {pl:.1e}"),
    ))
}

fn table_one() -> Outcome {
    // (n, r, lowest acceptable, highest acceptable)
    let cells = [
        (1, 1, 25, 25),
        (1, 2, 21, 25),
        (1, 9, 0, 3),
        (2, 1, 25, 25),
        (2, 4, 20, 25),
        (2, 10, 13, 25),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (n, r, lo, hi) in cells {
        let rep = run_tightness(n, r, 25, 0)?;
        let s = rep.successes();
        let good = (lo..=hi).contains(&s) && rep.solver_failures() == 0;
        ok &= good;
        parts.push(format!(
            "n={n} r={r} {s}/25{}",
            if good { "" } else { " (out of band)" }
        ));
    }
    Ok((ok, parts.join(", ")))
}

fn synthetic() -> Result<((bool, String), (bool, String)), gidl::Error> {
    let opts = SyntheticOptions::new(1, 50, 0.1, 15, 0);
    let rep = run_synthetic_with(&opts)?;
    let d = rep.invariant_distances();
    let (first, last) = (d[0], *d.last().unwrap());
    let refined = run_synthetic_with(&SyntheticOptions {
        invariant_only: true,
        ..opts.clone().refined()
    })?
    .final_invariant()
    .unwrap_or(f64::NAN);
    let mut ok = (0.5..=1.1).contains(&first) && last <= 5e-2 && refined <= 5e-3;
    let mut msg = format!(
        "j=1 first {first:.3}, final {last:.2e}, refined final {refined:.2e}"
    );
    if flag("GIDL_ACCEPTANCE_FULL") {
        let j2 = run_synthetic_with(&SyntheticOptions {
            invariant_only: true,
            ..SyntheticOptions::new(2, 50, 0.1, 15, 0)
        })?
        .final_invariant()
        .unwrap_or(f64::NAN);
        ok &= j2 <= 1e-1;
        msg.push_str(&format!(", j=2 final {j2:.2e}"));
    } else {
        msg.push_str(", j=2 not run (GIDL_ACCEPTANCE_FULL)");
    }
    let base = *rep.baseline_q1.last().unwrap();
    let gap = (
        base >= 0.05 && base > last,
        format!("baseline q=1 final {base:.3} vs invariant {last:.2e}"),
    );
    Ok(((ok, msg), gap))
}

fn so2_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut norm_err, mut angle_err) = (0.0f64, 0.0f64);
    let mut cases = 0;
    for n in 2..=8usize {
        for _ in 0..4 {
            let k = rng.random_range(1..=n.div_ceil(2));
            let sep = TAU / n as f64;
            let thetas: Vec<f64> = loop {
                let t: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * TAU).collect();
                let min_sep = (0..k)
                    .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
                    .map(|(a, b)| circ_dist(t[a], t[b]))
                    .fold(f64::INFINITY, f64::min);
                if min_sep > sep {
                    break t;
                }
            };
            let c: Vec<f64> = (0..k)
                .map(|_| {
                    let m = rng.random_range(0.2..1.0);
                    if rng.random_bool(0.5) { m } else { -m }
                })
                .collect();
            let mut x = TrigMomentVector::atom(n, thetas[0]).scaled(c[0]);
            for i in 1..k {
                x = x.add(&TrigMomentVector::atom(n, thetas[i]).scaled(c[i]))?;
            }
            let l1: f64 = c.iter().map(|v| v.abs()).sum();
            norm_err = norm_err.max((minkowski_so2(&x)? - l1).abs());

            let w: Vec<(f64, f64)> = thetas.iter().zip(&c).map(|(&t, &v)| (t, v.abs())).collect();
            let dec = vandermonde_decompose(&HermitianToeplitz::from_atoms(n, &w))?;
            for &t in &thetas {
                let best = dec
                    .iter()
                    .map(|&(s, _)| circ_dist(s, t))
                    .fold(f64::INFINITY, f64::min);
                angle_err = angle_err.max(best);
            }
            cases += 1;
        }
    }
    Ok((
        norm_err < 1e-3 && angle_err < 1e-6,
        format!("{cases} combinations, norm error {norm_err:.1e}, angle error {angle_err:.1e}"),
    ))
}

fn soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..200 {
        // one in four at N=2 keeps the run within a few minutes
        let n = if i % 4 == 0 { 2 } else { 1 };
        let table = enumerate_irreps(GroupId::So3, n);
        let k = rng.random_range(1..=4);
        let mut w: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
        let s: f64 = w.iter().sum();
        w.iter_mut().for_each(|v| *v /= s);
        let mut l = BlockDiagOperator::zeros(&table);
        for &wi in &w {
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let g = GroupElement::haar(GroupId::So3, &mut rng);
            l.axpy(C64::new(sign * wi, 0.0), &BlockDiagOperator::from_element(&table, &g)?)?;
        }
        worst = worst.max(so3_operator_norm_relaxed(&l)? - 1.0);
    }
    Ok((
        worst <= 1e-4,
        format!("200 combinations, max(relaxed - sum|c|) = {worst:.1e}"),
    ))
}

fn monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let full = enumerate_irreps(GroupId::So2, 6);
    let data: Vec<_> = (0..8).map(|_| FourierCoefficients::random(&full, &mut rng)).collect();
    let dict = Dictionary::random(&full, 2, &mut rng)?;
    let mut values = Vec::new();
    for n in 1..=6 {
        let t = enumerate_irreps(GroupId::So2, n);
        let d = Dictionary::unnormalized(
            dict.atoms().iter().map(|a| a.retabled(&t)).collect::<Result<_, _>>()?,
        )?;
        let mut total = 0.0;
        for y in &data {
            total += code_exact(&y.retabled(&t)?, &d, 0.1)?.objective();
        }
        values.push(total);
    }
    let worst = values
        .windows(2)
        .map(|w| w[0] - w[1])
        .fold(f64::NEG_INFINITY, f64::max);
    let shown: Vec<String> = values.iter().map(|v| format!("{v:.4}")).collect();
    Ok((
        worst <= 1e-6,
        format!("objective over N=1..6: {}", shown.join(" ")),
    ))
}

fn stroke(n: usize, slope: f64, offset: f64) -> RasterImage {
    RasterImage::from_fn(n, n, |c, r| {
        let (x, y) = (c as f64 / (n - 1) as f64, r as f64 / (n - 1) as f64);
        let d = (x - 0.5 - offset - slope * (y - 0.5)).abs();
        if (0.15..=0.85).contains(&y) {
            (-d * d / 0.004).exp()
        } else {
            0.0
        }
    })
}

fn mnist_suite() -> Outcome {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let bytes = std::fs::read(fixtures.join("golden-images-idx3-ubyte"))?;
    let imgs = idx::parse_idx_images(&bytes)?;
    let mut exact = imgs.len() == 3 && idx::encode_idx_images(&imgs)? == bytes;
    for (k, img) in imgs.iter().enumerate() {
        for r in 0..28 {
            for c in 0..28 {
                exact &= img.get(c, r) == ((7 * r + 13 * c + 31 * k) % 256) as f64 / 255.0;
            }
        }
    }
    let labels = idx::parse_idx_labels(&std::fs::read(fixtures.join("golden-labels-idx1-ubyte"))?)?;
    exact &= labels == [3, 1, 4];

    let (source, images) = match std::env::var_os("GIDL_MNIST_DIR") {
        Some(d) => ("MNIST digit 1", load_digits(Path::new(&d), 1, 20)?.1),
        None => (
            "generated strokes",
            (0..20)
                .map(|i| stroke(28, 0.4 * (i as f64 / 19.0 - 0.5), 0.05 * ((i % 5) as f64 - 2.0)))
                .collect(),
        ),
    };
    let lifted = lift_image_to_so3_coeffs(&images[0], 10)?;
    let sym = real_symmetry_deviation(&lifted)?;
    let dim = lift_ambient_dimension(10);
    let (_, trace, monotone, rendered) = fit_images(&images, 6, 3, 0)?;
    let nonzero = rendered.data().iter().any(|&v| v > 0.0) && trace.len() == 3;
    Ok((
        exact && sym < 1e-9 && dim == 891 && monotone && nonzero,
        format!(
            "idx golden {}, symmetry {sym:.1e}, dimension {dim}, descent monotone {monotone}, smoke fit on {source} {}",
            if exact { "exact" } else { "MISMATCH" },
            if nonzero { "rendered" } else { "blank" }
        ),
    ))
}

fn main() {
    // libtest flags such as --nocapture are accepted and ignored
    let mut failed = 0;
    let mut line = |k: usize, name: &str, t: Instant, r: Outcome| {
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok((true, m)) => println!("criterion {k}: PASS {name}: {m} [{secs:.1}s]"),
            Ok((false, m)) => {
                failed += 1;
                println!("criterion {k}: FAIL {name}: {m} [{secs:.1}s]")
            }
            Err(e) => {
                failed += 1;
                println!("criterion {k}: FAIL {name}: error {e} [{secs:.1}s]")
            }
        }
    };
    let t = Instant::now();
    line(1, "representations", t, representations());
    let t = Instant::now();
    line(2, "plancherel", t, plancherel());
    let t = Instant::now();
    line(3, "relaxation tightness", t, table_one());
    let t = Instant::now();
    match synthetic() {
        Ok((a, b)) => {
            line(4, "synthetic recovery", t, Ok(a));
            line(5, "baseline gap", t, Ok(b));
        }
        Err(e) => {
            let msg = e.to_string();
            line(4, "synthetic recovery", t, Err(e));
            line(5, "baseline gap", t, Err(gidl::Error::InvalidArgument(msg)));
        }
    }
    let t = Instant::now();
    line(6, "SO(2) exactness", t, so2_exactness());
    let t = Instant::now();
    line(7, "outer approximation", t, soundness());
    let t = Instant::now();
    line(8, "truncation monotonicity", t, monotonicity());
    let t = Instant::now();
    line(9, "digit pipeline", t, mnist_suite());
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed > 0 && flag("GIDL_ACCEPTANCE_STRICT") {
        std::process::exit(1);
    }
}
