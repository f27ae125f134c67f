use std::path::Path;
use std::process::Command;

use gidl::group::io::write_many;
use gidl::group::{enumerate_irreps, FourierCoefficients, GroupId};
use gidl::lifting::RasterImage;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gidl(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_gidl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(out: &std::process::Output) {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn tightness_csv_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let out = gidl(&[
            "tightness", "--n", "1", "--r", "2", "--trials", "3", "--seed", "4",
            "--out-dir", d.path().to_str().unwrap(),
        ]);
        ok(&out);
        assert!(String::from_utf8_lossy(&out.stdout).contains("n=1 r=2"));
    }
    let read = |d: &Path| std::fs::read(d.join("tightness_n1_r2.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    assert_eq!(String::from_utf8(read(a.path())).unwrap().lines().count(), 4);
}

#[test]
fn fit_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        format!(
            "# small synthetic run\nexperiment = synthetic\nseed = 2\nout_dir = {}\nj = 1\nn_data = 4\niters = 2\nbaseline = false\n",
            dir.path().join("out").display()
        ),
    )
    .unwrap();
    ok(&gidl(&["fit", "--config", cfg.to_str().unwrap()]));
    let csv = std::fs::read_to_string(dir.path().join("out/synthetic_j1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("iteration,invariant"));

    std::fs::write(&cfg, "experiment = synthetic\nbogus = 1\n").unwrap();
    let out = gidl(&["fit", "--config", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn render_writes_png_and_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let t = enumerate_irreps(GroupId::So3, 2);
    let f = FourierCoefficients::random(&t, &mut ChaCha8Rng::seed_from_u64(1));
    let dict = dir.path().join("d.gidl");
    write_many(&mut std::fs::File::create(&dict).unwrap(), &[f]).unwrap();
    for name in ["a.png", "a.pgm"] {
        let out = dir.path().join(name);
        ok(&gidl(&[
            "render", "--dict", dict.to_str().unwrap(), "--out", out.to_str().unwrap(),
            "--resolution", "16",
        ]));
        assert!(std::fs::metadata(&out).unwrap().len() > 16 * 16);
    }
    let img = RasterImage::load_pgm(&dir.path().join("a.pgm")).unwrap();
    assert_eq!((img.width(), img.height()), (16, 16));
    assert!(!gidl(&["render", "--dict", dict.to_str().unwrap(), "--out", "x.pgm", "--index", "3"])
        .status
        .success());
}

#[test]
fn mnist_reports_missing_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = gidl(&["mnist", "--digit", "1", "--data-dir", dir.path().to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not found"));
}
