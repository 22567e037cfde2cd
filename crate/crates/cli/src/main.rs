mod svg;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use denjoy_twist::verify::{run_suite, Suite};
use denjoy_twist::{BuildConfig, BuildDocument, Construction, Error, FamilyKind, GapDynamics, Side};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use svg::{Chart, Series};

#[derive(Parser)]
#[command(name = "denjoy-twist", version, about = "Build and verify a C1 twist map with a Denjoy invariant curve")]
struct Cli {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (or directory for `plot`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides `rng_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    quiet: bool,
    /// Overrides one configuration key, e.g. `-D N=5000`.
    #[arg(short = 'D', value_name = "KEY=VALUE", global = true)]
    define: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the construction and write its JSON document.
    Build,
    /// Run verification suites; exit 0 iff all pass.
    Verify {
        /// Build document to verify; built from the configuration when absent.
        #[arg(long)]
        build: Option<PathBuf>,
        /// Comma-separated suite names, or `all` / `acceptance`.
        #[arg(long, default_value = "all")]
        suites: String,
    },
    /// Write the curve CSV.
    Sample {
        #[arg(long)]
        build: Option<PathBuf>,
        /// Number of equispaced points.
        #[arg(short, long, default_value_t = 4096)]
        n: usize,
    },
    /// Write the orbit CSV.
    Orbit {
        #[arg(long)]
        build: Option<PathBuf>,
    },
    /// Write three SVG plots into the output directory.
    Plot {
        #[arg(long)]
        build: Option<PathBuf>,
    },
}

/// Failure that maps to a specific exit code.
#[derive(Debug)]
struct Exit(u8);

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if let Some(Exit(code)) = e.downcast_ref::<Exit>() {
                return ExitCode::from(*code);
            }
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

impl std::fmt::Display for Exit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "exit {}", self.0)
    }
}

impl std::error::Error for Exit {}

fn describe(e: &Error) -> String {
    match e {
        Error::Config(list) => format!("configuration rejected:\n  {}", list.join("\n  ")),
        other => other.to_string(),
    }
}

fn load_config(cli: &Cli) -> Result<BuildConfig> {
    let text = match &cli.config {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        None => String::new(),
    };
    let mut cfg = BuildConfig::parse(&text).map_err(|e| anyhow!(describe(&e)))?;
    let mut errs = Vec::new();
    for d in &cli.define {
        match d.split_once('=') {
            Some((k, v)) => {
                if let Err(e) = cfg.set(k.trim(), v.trim()) {
                    errs.push(e);
                }
            }
            None => errs.push(format!("-D {d}: expected KEY=VALUE")),
        }
    }
    if let Some(seed) = cli.seed {
        cfg.rng_seed = seed;
    }
    if !errs.is_empty() {
        bail!("configuration rejected:\n  {}", errs.join("\n  "));
    }
    cfg.validate().map_err(|e| anyhow!(describe(&e)))?;
    Ok(cfg)
}

fn construct(cli: &Cli, build: Option<&Path>) -> Result<Construction> {
    let c = match build {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let mut doc = BuildDocument::from_json(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
            if let Some(seed) = cli.seed {
                doc.manifest.config.rng_seed = seed;
            }
            Construction::from_document(&doc).map_err(|e| anyhow!("{}: {}", path.display(), describe(&e)))?
        }
        None => {
            let cfg = load_config(cli)?;
            Construction::build(&cfg).map_err(|e| anyhow!("build failed: {}", describe(&e)))?
        }
    };
    if c.config().family == FamilyKind::PaperLog {
        eprintln!(
            "WARNING: the paper_log length family converges very slowly; {:e} of the circle is unstored tail (tail_bound)",
            c.table().tail_bound()
        );
    }
    Ok(c)
}

fn write_out(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn out_path(cli: &Cli, default: &str) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| PathBuf::from(default))
}

fn parse_suites(spec: &str) -> Result<Vec<Suite>> {
    let mut out = Vec::new();
    for name in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match name {
            "all" => out.extend(Suite::ALL),
            "acceptance" => out.extend(Suite::ACCEPTANCE),
            _ => match Suite::parse(name) {
                Some(s) => out.push(s),
                None => {
                    let known: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
                    eprintln!("error: unknown suite {name:?}");
                    eprintln!(
                        "usage: --suites all | acceptance | NAME[,NAME...] with NAME one of:\n  {}",
                        known.join("\n  ")
                    );
                    return Err(Exit(2).into());
                }
            },
        }
    }
    let mut seen = Vec::new();
    out.retain(|s| {
        let fresh = !seen.contains(s);
        seen.push(*s);
        fresh
    });
    Ok(out)
}

fn run(cli: &Cli) -> Result<u8> {
    let say = |msg: String| {
        if !cli.quiet {
            eprintln!("{msg}");
        }
    };
    match &cli.command {
        Command::Build => {
            let c = construct(cli, None)?;
            let path = out_path(cli, "build.json");
            write_out(&path, &c.document().to_json())?;
            say(format!(
                "wrote {} (N = {}, K_orbit = {}, tail_bound = {:e})",
                path.display(),
                c.table().radius(),
                c.orbit().radius(),
                c.table().tail_bound()
            ));
            Ok(0)
        }
        Command::Verify { build, suites } => {
            let suites = parse_suites(suites)?;
            let c = construct(cli, build.as_deref())?;
            let report = run_suite(&c, &suites);
            let path = out_path(cli, "report.json");
            write_out(&path, &report.to_json())?;
            for r in &report.results {
                say(format!("{:<24} {:?}  {}", r.name, r.status, r.details));
            }
            say(format!("overall {:?}; report in {}", report.status, path.display()));
            Ok(if report.passed() { 0 } else { 1 })
        }
        Command::Sample { build, n } => {
            let c = construct(cli, build.as_deref())?;
            let mut csv = String::from("theta,psi,phi,h,hprime_left,hprime_right\n");
            for r in c.twist().sample_curve(*n) {
                let _ = writeln!(csv, "{},{},{},{},{},{}", r.theta, r.psi, r.phi, r.h, r.hprime_left, r.hprime_right);
            }
            let path = out_path(cli, "curve.csv");
            write_out(&path, &csv)?;
            say(format!("wrote {}", path.display()));
            Ok(0)
        }
        Command::Orbit { build } => {
            let c = construct(cli, build.as_deref())?;
            let (t, orbit, slopes) = (c.table(), c.orbit(), c.slopes());
            let mut csv = String::from("k,x_k,alpha_k,m_k,beta_L,beta_R\n");
            for e in orbit.entries() {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{}",
                    e.k,
                    t.point(e.k, e.u).value(),
                    e.alpha,
                    e.m,
                    slopes.beta(e.k, Side::Left),
                    slopes.beta(e.k, Side::Right)
                );
            }
            let path = out_path(cli, "orbit.csv");
            write_out(&path, &csv)?;
            say(format!("wrote {}", path.display()));
            Ok(0)
        }
        Command::Plot { build } => {
            let c = construct(cli, build.as_deref())?;
            let dir = out_path(cli, "plots");
            fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
            for (name, chart) in charts(&c) {
                let path = dir.join(name);
                write_out(&path, &chart.render())?;
                say(format!("wrote {}", path.display()));
            }
            Ok(0)
        }
    }
}

fn charts(c: &Construction) -> Vec<(&'static str, Chart)> {
    let tw = c.twist();
    let rows = tw.sample_curve(2000);
    let psi: Vec<(f64, f64)> = rows.iter().map(|r| (r.theta, r.psi)).collect();
    let phi: Vec<(f64, f64)> = rows.iter().map(|r| (r.theta, r.phi)).collect();
    let orbit = c.orbit();
    let marks = orbit.entries().iter().map(|e| (c.table().point(e.k, e.u).value(), tw.psi_local(e.k, e.u))).collect();

    // one-sided derivative profiles across x_0, from the local gap maps
    let h = c.h();
    let u0 = orbit.u(0);
    let width = 2.0 * h.ramp_width(0, Side::Left).unwrap_or(1e-4).max(h.ramp_width(0, Side::Right).unwrap_or(1e-4));
    let profile = |side: Side| {
        let sign = if side == Side::Left { -1.0 } else { 1.0 };
        let steps = 200;
        let mut psi_d = Vec::with_capacity(steps + 1);
        let mut phi_d = Vec::with_capacity(steps + 1);
        for i in 0..=steps {
            let d = sign * width * i as f64 / steps as f64;
            let u = u0 + d;
            let hp = h.local_slope(0, u, side);
            let back = h.local_slope(-1, h.local_inverse(-1, u), side);
            psi_d.push((d, hp - 1.0));
            phi_d.push((d, hp + 1.0 / back - 2.0));
        }
        (psi_d, phi_d)
    };
    let (psi_l, phi_l) = profile(Side::Left);
    let (psi_r, phi_r) = profile(Side::Right);

    vec![
        (
            "psi.svg",
            Chart {
                title: "invariant curve psi = h - Id".into(),
                x_label: "theta".into(),
                y_label: "psi".into(),
                series: vec![Series { label: "psi".into(), pieces: vec![psi] }],
                markers: marks,
            },
        ),
        (
            "phi.svg",
            Chart {
                title: "kick phi = h + h^-1 - 2 Id".into(),
                x_label: "theta".into(),
                y_label: "phi".into(),
                series: vec![Series { label: "phi".into(), pieces: vec![phi] }],
                markers: Vec::new(),
            },
        ),
        (
            "derivatives.svg",
            Chart {
                title: "one-sided derivatives near x_0".into(),
                x_label: "theta - x_0".into(),
                y_label: "derivative".into(),
                series: vec![
                    Series { label: "psi'".into(), pieces: vec![psi_l, psi_r] },
                    Series { label: "phi'".into(), pieces: vec![phi_l, phi_r] },
                ],
                markers: Vec::new(),
            },
        ),
    ]
}
