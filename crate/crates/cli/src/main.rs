use anyhow::Context;
use braidlab_cli::commands::run;
use braidlab_cli::config::{describe, parse_pairs, Command};
use braidlab_cli::regress::regress;
use braidlab_cli::RunConfig;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "braidlab", version, about = "Tunnelling constants, interaction matrices and eigenvalue braids")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Band-function constants of the de Gennes or magnetic-step model.
    #[command(allow_negative_numbers = true)]
    Constants {
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        tol: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Tunnelling actions of a radial well at separation L.
    #[command(allow_negative_numbers = true)]
    Actions {
        #[arg(long)]
        well: Option<String>,
        #[command(flatten)]
        well_args: WellArgs,
        #[arg(long)]
        tol: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Spectral reduction on the ring testbed over a sweep of the hopping phase.
    #[command(allow_negative_numbers = true)]
    ReduceDemo {
        #[arg(long)]
        sites: Option<String>,
        #[arg(long)]
        wells: Option<String>,
        #[arg(long)]
        barrier: Option<String>,
        /// lo:hi:steps
        #[arg(long)]
        phase_sweep: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Magnetic wells in the plane.
    Wells {
        #[command(subcommand)]
        command: WellsCmd,
    },
    /// Strip operators along a boundary or magnetic edge.
    Strip {
        #[command(subcommand)]
        command: StripCmd,
    },
    /// Crossing positions of a phase law `alpha0 + slope*g`.
    #[command(allow_negative_numbers = true)]
    Predict {
        #[arg(long)]
        slope: Option<String>,
        #[arg(long)]
        alpha0: Option<String>,
        /// lo:hi
        #[arg(long)]
        h: Option<String>,
        /// inverse-h or inverse-sqrt-h
        #[arg(long)]
        law: Option<String>,
        #[arg(long)]
        n: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the golden fixtures and compare against the stored CSV files.
    Regress {
        #[arg(long, default_value = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures"))]
        fixtures: PathBuf,
        /// Rewrite the golden files from the current output.
        #[arg(long)]
        update: bool,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// List the configuration keys of a command.
    Keys {
        /// Command name, e.g. "wells sweep".
        name: Vec<String>,
    },
}

#[derive(Subcommand)]
enum WellsCmd {
    /// Hopping coefficient of two wells.
    #[command(allow_negative_numbers = true)]
    Hopping {
        #[command(flatten)]
        well_args: WellArgs,
        #[arg(long)]
        h: Option<String>,
        #[arg(long)]
        tol: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Lowest eigenvalues of the n-well operator over a range of h.
    #[command(allow_negative_numbers = true)]
    Sweep {
        #[arg(long)]
        n: Option<String>,
        #[command(flatten)]
        well_args: WellArgs,
        #[arg(long = "N")]
        nodes: Option<String>,
        #[arg(long = "R")]
        half_width: Option<String>,
        #[arg(long)]
        lattice: Option<String>,
        /// lo:hi:steps
        #[arg(long)]
        h: Option<String>,
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        tol: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum StripCmd {
    /// Lowest eigenvalues of the strip operator over a range of h.
    #[command(allow_negative_numbers = true)]
    Sweep {
        /// neumann or step
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long = "L")]
        l: Option<String>,
        #[arg(long)]
        eps_curv: Option<String>,
        #[arg(long)]
        n: Option<String>,
        /// lo:hi:steps
        #[arg(long)]
        h: Option<String>,
        #[arg(long)]
        m: Option<String>,
        #[arg(long)]
        sigma_nodes: Option<String>,
        #[arg(long)]
        tau_nodes: Option<String>,
        /// yes or no
        #[arg(long)]
        crossings: Option<String>,
        #[arg(long)]
        tol: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct WellArgs {
    #[arg(long = "V0")]
    v0: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long = "L")]
    l: Option<String>,
    #[arg(long)]
    b: Option<String>,
}

impl WellArgs {
    fn pairs(self) -> Vec<(&'static str, Option<String>)> {
        vec![("V0", self.v0), ("a", self.a), ("L", self.l), ("b", self.b)]
    }
}

#[derive(Args)]
struct Common {
    /// Configuration file of `key = value` lines; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, conflicts_with_all = ["csv", "text"])]
    json: bool,
    #[arg(long, conflicts_with = "text")]
    csv: bool,
    #[arg(long)]
    text: bool,
    #[arg(long)]
    seed: Option<String>,
    /// Worker threads for sweeps; BRAIDLAB_THREADS takes precedence.
    #[arg(long)]
    threads: Option<usize>,
    /// Extra `key=value` parameter, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

struct Invocation {
    command: Command,
    flags: Vec<(&'static str, Option<String>)>,
    common: Common,
}

fn invocation(cmd: Cmd) -> Result<Invocation, Cmd> {
    let inv = |command, flags, common| Ok(Invocation { command, flags, common });
    match cmd {
        Cmd::Constants { theta, tol, common } => inv(Command::Constants, vec![("theta", theta), ("tol", tol)], common),
        Cmd::Actions { well, well_args, tol, common } => {
            let mut f = vec![("well", well), ("tol", tol)];
            f.extend(well_args.pairs());
            inv(Command::Actions, f, common)
        }
        Cmd::ReduceDemo { sites, wells, barrier, phase_sweep, common } => inv(
            Command::ReduceDemo,
            vec![("sites", sites), ("wells", wells), ("barrier", barrier), ("phase_sweep", phase_sweep)],
            common,
        ),
        Cmd::Wells { command: WellsCmd::Hopping { well_args, h, tol, common } } => {
            let mut f = vec![("h", h), ("tol", tol)];
            f.extend(well_args.pairs());
            inv(Command::WellsHopping, f, common)
        }
        Cmd::Wells { command: WellsCmd::Sweep { n, well_args, nodes, half_width, lattice, h, m, tol, common } } => {
            let mut f = vec![("n", n), ("N", nodes), ("R", half_width), ("lattice", lattice), ("h", h), ("m", m), ("tol", tol)];
            f.extend(well_args.pairs());
            inv(Command::WellsSweep, f, common)
        }
        Cmd::Strip {
            command: StripCmd::Sweep { kind, theta, l, eps_curv, n, h, m, sigma_nodes, tau_nodes, crossings, tol, common },
        } => inv(
            Command::StripSweep,
            vec![
                ("kind", kind),
                ("theta", theta),
                ("L", l),
                ("eps_curv", eps_curv),
                ("n", n),
                ("h", h),
                ("m", m),
                ("sigma_nodes", sigma_nodes),
                ("tau_nodes", tau_nodes),
                ("crossings", crossings),
                ("tol", tol),
            ],
            common,
        ),
        Cmd::Predict { slope, alpha0, h, law, n, common } => inv(
            Command::Predict,
            vec![("slope", slope), ("alpha0", alpha0), ("h", h), ("law", law), ("n", n)],
            common,
        ),
        other => Err(other),
    }
}

/// Worker count: BRAIDLAB_THREADS, then the flag, then rayon's default.
fn init_threads(flag: Option<usize>) -> anyhow::Result<()> {
    let env = std::env::var("BRAIDLAB_THREADS").ok();
    let n = match env {
        Some(v) => Some(v.trim().parse::<usize>().with_context(|| format!("BRAIDLAB_THREADS = `{v}` is not a count"))?),
        None => flag,
    };
    if let Some(n) = n.filter(|n| *n > 0) {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn build_config(inv: Invocation) -> anyhow::Result<RunConfig> {
    let c = inv.common;
    let mut pairs = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_pairs(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => Vec::new(),
    };
    let mut set = |k: &str, v: String| {
        pairs.retain(|(key, _)| key != k);
        pairs.push((k.to_string(), v));
    };
    for (k, v) in inv.flags {
        if let Some(v) = v {
            set(k, v);
        }
    }
    for kv in c.set {
        let (k, v) = kv.split_once('=').with_context(|| format!("--set expects KEY=VALUE, got `{kv}`"))?;
        set(k.trim(), v.trim().to_string());
    }
    if let Some(seed) = c.seed {
        set("seed", seed);
    }
    if let Some(out) = c.out {
        set("out", out.display().to_string());
    }
    let format = [(c.json, "json"), (c.csv, "csv"), (c.text, "text")].into_iter().find(|f| f.0).map(|f| f.1);
    if let Some(f) = format {
        set("format", f.to_string());
    }
    Ok(RunConfig::from_pairs(Some(inv.command), &pairs)?)
}

fn execute(cli: Cli) -> anyhow::Result<ExitCode> {
    let inv = match invocation(cli.command) {
        Ok(inv) => inv,
        Err(Cmd::Regress { fixtures, update, threads }) => {
            init_threads(threads)?;
            let results = regress(&fixtures, update)?;
            let failed = results.iter().filter(|r| r.failure.is_some()).count();
            for r in &results {
                match &r.failure {
                    None => println!("{} {}", if update { "updated" } else { "ok" }, r.name),
                    Some(f) => println!("FAIL {}: {f}", r.name),
                }
            }
            println!("{} fixtures, {failed} failed", results.len());
            return Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
        Err(Cmd::Keys { name }) => {
            let joined = name.join(" ");
            let cmd = Command::from_name(&joined).with_context(|| format!("unknown command `{joined}`"))?;
            print!("{}", describe(cmd));
            return Ok(ExitCode::SUCCESS);
        }
        Err(_) => unreachable!("all other commands carry a configuration"),
    };
    init_threads(inv.common.threads)?;
    let cfg = build_config(inv)?;
    let text = run(&cfg)?.render(&cfg)?;
    match &cfg.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
