//! `twoslit`: figure data, sweeps and verification for the two-particle
//! double-slit model.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use twoslit_core::entanglement::{linspace, overlap_theta, schmidt_sweep, SweepAxis};
use twoslit_core::joint::{default_domain, normalize_on};
use twoslit_core::patterns::{default_pattern_grid, fixed_detector_sweep, pattern};
use twoslit_core::{
    load_config, paper_defaults, verify, ArrangementConfig, Error, GridSpec, JointState, StateKind,
};

use output::{csv_text, tag, GridRecord, OutputSet};

#[derive(Parser, Debug)]
#[command(
    name = "twoslit",
    version,
    about = "Two-particle coincidence patterns behind a double slit"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// `key = value` parameter file; the figure parameter set when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Points per axis of the normalization grid (odd).
    #[arg(long, global = true)]
    grid_n: Option<usize>,
    /// Half width of the normalization grid, μm.
    #[arg(long, global = true)]
    grid_l: Option<f64>,
    /// Pattern grid half width, μm.
    #[arg(long, global = true)]
    x_max: Option<f64>,
    /// Pattern grid points (odd).
    #[arg(long, global = true)]
    x_n: Option<usize>,
    /// Overrides the superposition coefficient `a` (real, `b = √(1 − a²)`).
    #[arg(long, global = true)]
    a: Option<f64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coincidence pattern `x,P` at a fixed second detector, one CSV per state kind.
    Pattern {
        #[arg(long, value_delimiter = ',', default_value = "superposition")]
        states: Vec<String>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        y: f64,
    },
    /// Closed-form Schmidt number along `a` or `θ`.
    Schmidt {
        #[arg(long, value_enum, default_value_t = Axis::A)]
        axis: Axis,
        /// Fixed θ for `--axis a`.
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        theta_list: Option<Vec<f64>>,
        /// Fixed `a` values for `--axis theta`; the config `a` when omitted.
        #[arg(long, value_delimiter = ',')]
        a_list: Option<Vec<f64>>,
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Central-peak height of the superposition pattern against the fixed detector position.
    SweepDetector {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        ys: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.0)]
        y_min: f64,
        #[arg(long, default_value_t = 3.0)]
        y_max: f64,
        #[arg(long, default_value_t = 31)]
        y_n: usize,
        /// Also write the full pattern at every sampled `y`.
        #[arg(long)]
        emit_patterns: bool,
    },
    /// Data bundle for figure 2, 3, 4 or 5.
    Figure { id: u8 },
    /// Runs the acceptance checks on the figure parameter set.
    Verify {
        #[arg(long)]
        only: Option<String>,
    },
    /// Prints the effective configuration.
    PrintConfig,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Axis {
    A,
    Theta,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("io: {e}"))
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

struct Run {
    cfg: ArrangementConfig,
    domain: GridSpec,
    xgrid: GridSpec,
    out_dir: PathBuf,
    argv: Vec<String>,
}

impl Run {
    fn new(g: &Global) -> Outcome<Self> {
        let mut cfg = match &g.config {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Failure::Usage(format!("config {}: {e}", p.display())))?;
                load_config(&text)?
            }
            None => paper_defaults(),
        };
        if let Some(a) = g.a {
            cfg = cfg.with_real_a(a)?;
        }
        let d = default_domain();
        let domain = GridSpec::symmetric(g.grid_l.unwrap_or(d.hi), g.grid_n.unwrap_or(d.n))?;
        let p = default_pattern_grid();
        let xgrid = GridSpec::symmetric(g.x_max.unwrap_or(p.hi), g.x_n.unwrap_or(p.n))?;
        Ok(Self {
            cfg,
            domain,
            xgrid,
            out_dir: g.out_dir.clone(),
            argv: std::env::args().skip(1).collect(),
        })
    }

    fn state(&self, cfg: &ArrangementConfig) -> Outcome<JointState> {
        Ok(normalize_on(cfg, &self.domain)?)
    }

    fn outputs(&self) -> Outcome<OutputSet> {
        Ok(OutputSet::new(&self.out_dir)?)
    }

    fn finish(&self, set: OutputSet, pattern_grid: Option<&GridSpec>) -> Outcome {
        let mut grids = vec![GridRecord::new("normalization", &self.domain)];
        if let Some(g) = pattern_grid {
            grids.push(GridRecord::new("pattern", g));
        }
        set.finish(self.argv.clone(), self.cfg.to_config_string(), grids)?;
        Ok(())
    }
}

fn pattern_csv(state: &JointState, kind: StateKind, y: f64, grid: &GridSpec) -> String {
    let p = pattern(&state.with_kind(kind), y, grid);
    csv_text(&["x", "P"], &[&p.xs, &p.values])
}

fn parse_kinds(names: &[String]) -> Outcome<Vec<StateKind>> {
    names
        .iter()
        .map(|n| {
            StateKind::parse(n.trim()).ok_or_else(|| {
                let known: Vec<&str> = StateKind::ALL.iter().map(|k| k.name()).collect();
                Failure::Usage(format!(
                    "unknown state kind {n:?} (expected one of {})",
                    known.join(", ")
                ))
            })
        })
        .collect()
}

/// One CSV with `axis_value` and one `S` column per fixed value.
fn schmidt_csv(axis: SweepAxis, fixed: &[f64], points: usize) -> Outcome<String> {
    if points < 2 {
        return Err(Failure::Usage("--points must be at least 2".into()));
    }
    let xs = linspace(0.0, 1.0, points);
    let mut cols: Vec<Vec<f64>> = vec![xs.clone()];
    for &f in fixed {
        cols.push(
            schmidt_sweep(axis, f, &xs)?
                .into_iter()
                .map(|(_, s)| s)
                .collect(),
        );
    }
    let fixed_name = match axis {
        SweepAxis::A => "theta",
        SweepAxis::Theta => "a",
    };
    let mut header = vec!["axis_value".to_string()];
    if fixed.len() == 1 {
        header.push("S".into());
    } else {
        header.extend(fixed.iter().map(|f| format!("S[{fixed_name}={f}]")));
    }
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    let c: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    Ok(csv_text(&h, &c))
}

fn cmd_pattern(run: &Run, states: &[String], y: f64) -> Outcome {
    let kinds = parse_kinds(states)?;
    let st = run.state(&run.cfg)?;
    let mut set = run.outputs()?;
    for k in kinds {
        set.write(
            &format!("pattern_{}_y{}.csv", k.name(), tag(y)),
            &pattern_csv(&st, k, y, &run.xgrid),
        )?;
    }
    run.finish(set, Some(&run.xgrid))
}

fn cmd_schmidt(
    run: &Run,
    axis: Axis,
    theta: Option<f64>,
    theta_list: Option<Vec<f64>>,
    a_list: Option<Vec<f64>>,
    points: usize,
) -> Outcome {
    let (sweep_axis, fixed, name) = match axis {
        Axis::A => {
            let fixed = match (theta, theta_list) {
                (Some(_), Some(_)) => {
                    return Err(Failure::Usage(
                        "use --theta or --theta-list, not both".into(),
                    ))
                }
                (Some(t), None) => vec![t],
                (None, Some(l)) => l,
                (None, None) => vec![overlap_theta(run.cfg.psi.width, run.cfg.varphi.width)],
            };
            (SweepAxis::A, fixed, "schmidt_vs_a.csv")
        }
        Axis::Theta => {
            let fixed = a_list.unwrap_or_else(|| vec![run.cfg.coeffs.a.re]);
            (SweepAxis::Theta, fixed, "schmidt_vs_theta.csv")
        }
    };
    let mut set = run.outputs()?;
    set.write(name, &schmidt_csv(sweep_axis, &fixed, points)?)?;
    run.finish(set, None)
}

fn cmd_sweep(run: &Run, ys: Vec<f64>, emit_patterns: bool) -> Outcome {
    let st = run.state(&run.cfg)?;
    let sweep = fixed_detector_sweep(&st, &ys, &run.xgrid)?;
    let mut set = run.outputs()?;
    let col = |f: fn(&twoslit_core::patterns::SweepPoint) -> f64| {
        sweep.iter().map(f).collect::<Vec<f64>>()
    };
    let (y, h, x) = (
        col(|s| s.y),
        col(|s| s.central_height),
        col(|s| s.central_x),
    );
    set.write(
        "sweep.csv",
        &csv_text(&["y", "central_height", "central_x"], &[&y, &h, &x]),
    )?;
    if emit_patterns {
        for s in &sweep {
            let p = &s.pattern;
            set.write(
                &format!("pattern_y{}.csv", tag(s.y)),
                &csv_text(&["x", "P"], &[&p.xs, &p.values]),
            )?;
        }
    }
    run.finish(set, Some(&run.xgrid))
}

fn cmd_figure(run: &Run, id: u8) -> Outcome {
    let mut set = run.outputs()?;
    let mut grid = run.xgrid;
    match id {
        2 => {
            let st = run.state(&run.cfg)?;
            for k in StateKind::ALL {
                set.write(
                    &format!("fig2_{}.csv", k.name()),
                    &pattern_csv(&st, k, 0.0, &grid),
                )?;
            }
        }
        3 => {
            set.write(
                "fig3_schmidt_vs_a.csv",
                &schmidt_csv(SweepAxis::A, &[0.0, 0.3, 0.6], 101)?,
            )?;
            set.write(
                "fig3_schmidt_vs_theta.csv",
                &schmidt_csv(SweepAxis::Theta, &[0.7, 0.5, 0.4], 101)?,
            )?;
        }
        4 => {
            // central fringe only
            grid = GridSpec::symmetric(0.8, 321)?;
            let st = run.state(&run.cfg)?;
            let a = run.cfg.coeffs.a.re;
            set.write(
                &format!("fig4_superposition_a{}.csv", tag(a)),
                &pattern_csv(&st, StateKind::Superposition, 0.0, &grid),
            )?;
            set.write(
                "fig4_product.csv",
                &pattern_csv(&st, StateKind::ProductA, 0.0, &grid),
            )?;
            let st7 = run.state(&run.cfg.with_real_a(0.7)?)?;
            set.write(
                "fig4_superposition_a0.7.csv",
                &pattern_csv(&st7, StateKind::Superposition, 0.0, &grid),
            )?;
            let theta = overlap_theta(run.cfg.psi.width, run.cfg.varphi.width);
            set.write(
                "fig4_schmidt_vs_a.csv",
                &schmidt_csv(SweepAxis::A, &[theta], 101)?,
            )?;
        }
        5 => {
            let st = run.state(&run.cfg)?;
            for y in [0.0, 0.7, 1.7] {
                set.write(
                    &format!("fig5_y{}.csv", tag(y)),
                    &pattern_csv(&st, StateKind::Superposition, y, &grid),
                )?;
            }
        }
        other => {
            return Err(Failure::Usage(format!(
                "unknown figure {other} (expected 2, 3, 4 or 5)"
            )))
        }
    }
    run.finish(set, (id != 3).then_some(&grid))
}

fn cmd_verify(only: Option<&str>) -> Outcome {
    let checks = verify::run(only).ok_or_else(|| {
        Failure::Usage(format!(
            "unknown check {:?} (expected one of {})",
            only.unwrap_or_default(),
            verify::CHECK_IDS.join(", ")
        ))
    })??;
    for c in &checks {
        println!("{c}");
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!(
        "{} of {} checks passed",
        checks.len() - failed,
        checks.len()
    );
    if failed > 0 {
        return Err(Failure::Verification);
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Outcome {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(format!("threads: {e}")))?;
    }
    if let Command::Verify { only } = &cli.command {
        return cmd_verify(only.as_deref());
    }
    let run = Run::new(&cli.global)?;
    match cli.command {
        Command::Pattern { states, y } => cmd_pattern(&run, &states, y),
        Command::Schmidt {
            axis,
            theta,
            theta_list,
            a_list,
            points,
        } => cmd_schmidt(&run, axis, theta, theta_list, a_list, points),
        Command::SweepDetector {
            ys,
            y_min,
            y_max,
            y_n,
            emit_patterns,
        } => cmd_sweep(
            &run,
            ys.unwrap_or_else(|| linspace(y_min, y_max, y_n)),
            emit_patterns,
        ),
        Command::Figure { id } => cmd_figure(&run, id),
        Command::PrintConfig => {
            print!("{}", run.cfg.to_config_string());
            Ok(())
        }
        Command::Verify { .. } => unreachable!(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("twoslit: {msg}");
            ExitCode::from(2)
        }
    }
}
