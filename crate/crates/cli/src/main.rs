//! `gidl` command-line driver.
//!
//! Environment: `GIDL_SOLVER_GAP` overrides the accepted duality gap,
//! `GIDL_SOLVER_VERBOSE` turns on solver logs and `GIDL_DUMP_SDPA=<dir>`
//! writes every conic problem to `<dir>` in an SDPA-like text format.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gidl::experiments::{
    run_mnist, run_synthetic_with, run_tightness, ExperimentConfig, SyntheticOptions,
};
use gidl::group::io::{read_many, write_csv, write_many};
use gidl::learner::write_trace_csv;
use gidl::lifting::{render_atom_with, RenderChart, RenderOptions};
use gidl::{Error, Result};

#[derive(Parser)]
#[command(name = "gidl", version, about = "Group-invariant dictionary learning experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Relaxed tensor norm on random combinations of r atoms.
    Tightness {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 25)]
        trials: usize,
        /// 100 trials, overriding --trials.
        #[arg(long)]
        full: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Recovery of one SO(3) atom from rotated copies, with L1 baselines.
    Synthetic {
        #[arg(long, default_value_t = 1)]
        j: usize,
        #[arg(long, default_value_t = 50)]
        n_data: usize,
        #[arg(long, default_value_t = 0.1)]
        lambda: f64,
        #[arg(long, default_value_t = 15)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Finer distance search.
        #[arg(long)]
        refine: bool,
        #[arg(long)]
        no_baseline: bool,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// One atom learned from digit images.
    Mnist {
        #[arg(long)]
        digit: u8,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 6)]
        bandwidth: usize,
        #[arg(long, default_value_t = 3)]
        iters: usize,
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Renders an SO(3) atom of a dictionary file to PGM or PNG.
    Render {
        #[arg(long)]
        dict: PathBuf,
        /// `.png` writes PNG, anything else PGM.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        index: usize,
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long, default_value = "stereographic")]
        chart: RenderChart,
    },
    /// Runs the experiment described by a key-value file.
    Fit {
        #[arg(long)]
        config: PathBuf,
    },
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    eprintln!("writing {}", path.display());
    Ok(BufWriter::new(File::create(path)?))
}

fn tightness(n: usize, r: usize, trials: usize, seed: u64, out: &Path) -> Result<()> {
    let rep = run_tightness(n, r, trials, seed)?;
    let mut w = create(out, &format!("tightness_n{n}_r{r}.csv"))?;
    rep.write_csv(&mut w)?;
    w.flush()?;
    println!(
        "n={n} r={r} successes {}/{} solver_failures {} max {:.6}",
        rep.successes(),
        rep.trials,
        rep.solver_failures(),
        rep.max_value()
    );
    Ok(())
}

fn synthetic(opts: &SyntheticOptions, out: &Path) -> Result<()> {
    let rep = run_synthetic_with(opts)?;
    let mut w = create(out, &format!("synthetic_j{}.csv", opts.j))?;
    rep.write_csv(&mut w)?;
    w.flush()?;
    let d = rep.invariant_distances();
    println!(
        "j={} first {:.4e} final {:.4e} baseline_q1 final {}",
        opts.j,
        d.first().copied().unwrap_or(f64::NAN),
        d.last().copied().unwrap_or(f64::NAN),
        rep.baseline_q1
            .last()
            .map(|v| format!("{v:.4e}"))
            .unwrap_or_else(|| "-".into())
    );
    Ok(())
}

fn mnist(
    digit: u8,
    count: usize,
    bandwidth: usize,
    iters: usize,
    seed: u64,
    data_dir: &Path,
    out: &Path,
) -> Result<()> {
    let res = run_mnist(digit, count, bandwidth, iters, seed, data_dir)?;
    let stem = format!("mnist_digit{digit}");
    let mut w = create(out, &format!("{stem}.gidl"))?;
    write_many(&mut w, res.dictionary.atoms())?;
    w.flush()?;
    let mut w = create(out, &format!("{stem}_atom.csv"))?;
    write_csv(&mut w, &res.dictionary.atoms()[0])?;
    w.flush()?;
    let mut w = create(out, &format!("{stem}_trace.csv"))?;
    write_trace_csv(&mut w, &res.trace)?;
    w.flush()?;
    for ext in ["pgm", "png"] {
        let path = out.join(format!("{stem}.{ext}"));
        eprintln!("writing {}", path.display());
        res.rendered.save(&path)?;
    }
    println!(
        "digit {digit}: {} images, final objective {:.6e}, coordinate descent monotone: {}",
        res.indices.len(),
        res.trace.last().map(|r| r.objective).unwrap_or(f64::NAN),
        res.monotone
    );
    Ok(())
}

fn render(dict: &Path, out: &Path, index: usize, resolution: usize, chart: RenderChart) -> Result<()> {
    let atoms = read_many(&mut std::io::BufReader::new(File::open(dict)?))?;
    let phi = atoms.get(index).ok_or_else(|| {
        Error::InvalidArgument(format!("atom {index} of {} in {}", atoms.len(), dict.display()))
    })?;
    let img = render_atom_with(phi, resolution, RenderOptions { chart, frames: 0 })?;
    img.save(out)
}

fn run_config(path: &Path) -> Result<()> {
    let c = ExperimentConfig::load(path)?;
    let out = c.out_dir.clone();
    match c.experiment.as_str() {
        "tightness" => {
            c.check_keys(&["n", "r", "trials"])?;
            tightness(c.get("n", 1)?, c.get("r", 1)?, c.get("trials", 25)?, c.seed, &out)
        }
        "synthetic" => {
            c.check_keys(&["j", "n_data", "lambda", "iters", "refine", "baseline"])?;
            let mut o = SyntheticOptions::new(
                c.get("j", 1)?,
                c.get("n_data", 50)?,
                c.get("lambda", 0.1)?,
                c.get("iters", 15)?,
                c.seed,
            );
            if c.get("refine", false)? {
                o = o.refined();
            }
            o.invariant_only = !c.get("baseline", true)?;
            synthetic(&o, &out)
        }
        "mnist" => {
            c.check_keys(&["digit", "count", "bandwidth", "iters", "data_dir"])?;
            let dir = c
                .get_str("data_dir")
                .ok_or_else(|| Error::Format("mnist needs `data_dir`".into()))?;
            mnist(
                c.get("digit", 1)?,
                c.get("count", 20)?,
                c.get("bandwidth", 6)?,
                c.get("iters", 3)?,
                c.seed,
                Path::new(dir),
                &out,
            )
        }
        other => Err(Error::Format(format!("unknown experiment `{other}`"))),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Tightness {
            n,
            r,
            trials,
            full,
            seed,
            out_dir,
        } => tightness(n, r, if full { 100 } else { trials }, seed, &out_dir),
        Cmd::Synthetic {
            j,
            n_data,
            lambda,
            iters,
            seed,
            refine,
            no_baseline,
            out_dir,
        } => {
            let mut o = SyntheticOptions::new(j, n_data, lambda, iters, seed);
            if refine {
                o = o.refined();
            }
            o.invariant_only = no_baseline;
            synthetic(&o, &out_dir)
        }
        Cmd::Mnist {
            digit,
            count,
            bandwidth,
            iters,
            data_dir,
            seed,
            out_dir,
        } => mnist(digit, count, bandwidth, iters, seed, &data_dir, &out_dir),
        Cmd::Render {
            dict,
            out,
            index,
            resolution,
            chart,
        } => render(&dict, &out, index, resolution, chart),
        Cmd::Fit { config } => run_config(&config),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
