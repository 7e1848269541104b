//! Command-line front end. [`run`] does all the work and returns the exit
//! code with the captured output, so tests can drive it without a process.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use partobs::assumptions;
use partobs::construct::{augment, reverse};
use partobs::io::{self, dot};
use partobs::oracle;
use partobs::verify::{self, Method, Property, PropertyQuery};
use partobs::{Automaton, Error, Estimator, Verdict};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "partobs",
    version,
    about = "State estimation and verification for partially-observed automata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check liveness and the absence of unobservable cycles.
    CheckAssumptions {
        model: PathBuf,
        #[arg(long)]
        unsafe_skip_a2: bool,
    },
    /// Print a state estimate as sorted state ids.
    Estimate {
        kind: EstimateArg,
        model: PathBuf,
        /// Whitespace-separated observable events.
        #[arg(long, allow_hyphen_values = true)]
        obs: String,
        /// Length of α for delayed estimation; the rest of the trace is β.
        #[arg(long)]
        split_at: Option<usize>,
        /// Construction used for initial-state estimates.
        #[arg(long, value_enum, default_value_t = InitialMethod::Aug)]
        method: InitialMethod,
    },
    /// Build a derived structure and print it or write it as DOT.
    Build {
        what: BuildArg,
        model: PathBuf,
        /// DOT output file, `-` for standard output.
        #[arg(long)]
        dot: Option<String>,
    },
    /// Verify a property; prints HOLDS or VIOLATED with a witness.
    Verify {
        property: String,
        model: PathBuf,
        #[arg(long, default_value = "auto")]
        method: String,
        #[command(flatten)]
        params: Params,
        /// Verify even when the model has unobservable cycles.
        #[arg(long)]
        unsafe_skip_a2: bool,
    },
    /// Bounded brute-force search for counterexamples.
    Oracle {
        #[command(subcommand)]
        command: OracleCommand,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    Falsify {
        property: String,
        model: PathBuf,
        /// Maximum observation length searched.
        #[arg(long)]
        bound: usize,
        #[command(flatten)]
        params: Params,
    },
}

#[derive(Args, Debug)]
struct Params {
    #[arg(long, default_value_t = 0)]
    k1: usize,
    #[arg(long, default_value_t = 0)]
    k2: usize,
    /// State pairs to distinguish, e.g. "1 0, 1 3". Replaces the model's.
    #[arg(long)]
    spec: Option<String>,
    /// Secret states, e.g. "2 3". Replaces the model's.
    #[arg(long)]
    secret: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EstimateArg {
    Current,
    Initial,
    Delayed,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InitialMethod {
    Aug,
    Rev,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BuildArg {
    Observer,
    Reverse,
    Augment,
    TwinPlant,
}

/// Exit code and captured output of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    out: String,
    err: String,
    color: bool,
}

impl Report {
    fn verdict(&mut self, title: &str, v: &Verdict, g: &Automaton) -> i32 {
        let label = v.label();
        let painted = match (self.color, v.holds()) {
            (false, _) => label.to_string(),
            (true, true) => format!("\x1b[32m{label}\x1b[0m"),
            (true, false) => format!("\x1b[31m{label}\x1b[0m"),
        };
        let _ = writeln!(self.out, "{title}: {painted}");
        match v {
            Verdict::Holds => EXIT_HOLDS,
            Verdict::Violated(w) => {
                self.out.push_str(&w.render(g));
                EXIT_VIOLATED
            }
        }
    }
}

/// Runs with coloring taken from `DES_COLOR` (off unless set to `1`).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let color = std::env::var("DES_COLOR").is_ok_and(|v| v == "1");
    run_with(args, color)
}

pub fn run_with<I, T>(args: I, color: bool) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let code = if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_HOLDS
            };
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), text)
            } else {
                (text, String::new())
            };
            return Outcome {
                code,
                stdout,
                stderr,
            };
        }
    };
    let mut report = Report {
        out: String::new(),
        err: String::new(),
        color,
    };
    let code = match execute(cli.command, &mut report) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(report.err, "error: {e}");
            if e.is_precondition() {
                EXIT_PRECONDITION
            } else {
                EXIT_INPUT
            }
        }
    };
    Outcome {
        code,
        stdout: report.out,
        stderr: report.err,
    }
}

fn load(path: &PathBuf, report: &mut Report) -> partobs::Result<Automaton> {
    let (g, warnings) = io::load_model(path)?;
    for w in warnings {
        let _ = writeln!(report.err, "warning: {w}");
    }
    Ok(g)
}

fn state_list(g: &Automaton, text: &str) -> partobs::Result<Vec<partobs::StateId>> {
    text.split_whitespace()
        .map(|n| {
            g.state_id(n)
                .ok_or_else(|| Error::UnknownState(n.to_string()))
        })
        .collect()
}

fn apply_params(g: Automaton, p: &Params, report: &mut Report) -> partobs::Result<Automaton> {
    let mut g = g;
    if let Some(secret) = &p.secret {
        let set = state_list(&g, secret)?.into_iter().collect();
        g = g.with_secret(set)?;
    }
    if let Some(spec) = &p.spec {
        let mut pairs = Vec::new();
        for chunk in spec.split(',').filter(|c| !c.trim().is_empty()) {
            match state_list(&g, chunk)?.as_slice() {
                &[a, b] => pairs.push((a, b)),
                _ => {
                    return Err(Error::Invalid(format!(
                        "`--spec` pair `{}` must name exactly two states",
                        chunk.trim()
                    )))
                }
            }
        }
        let (h, warning) = g.with_spec_pairs(pairs)?;
        if let Some(w) = warning {
            let _ = writeln!(report.err, "warning: {w}");
        }
        g = h;
    }
    Ok(g)
}

fn property(name: &str, p: &Params) -> partobs::Result<Property> {
    Ok(match name.parse()? {
        Property::DetectabilityDelayed { .. } => {
            Property::DetectabilityDelayed { k1: p.k1, k2: p.k2 }
        }
        other => other,
    })
}

fn execute(cmd: Command, report: &mut Report) -> partobs::Result<i32> {
    match cmd {
        Command::CheckAssumptions {
            model,
            unsafe_skip_a2,
        } => {
            let g = load(&model, report)?;
            let _ = writeln!(report.out, "model: {g}");
            let mut code = EXIT_HOLDS;
            let mut checks = vec![("liveness", assumptions::check_liveness(&g))];
            if !unsafe_skip_a2 {
                checks.push((
                    "no unobservable cycle",
                    assumptions::check_no_unobservable_cycle(&g),
                ));
            }
            for (name, v) in checks {
                if report.verdict(name, &v, &g) != EXIT_HOLDS {
                    code = EXIT_PRECONDITION;
                }
            }
            Ok(code)
        }
        Command::Estimate {
            kind,
            model,
            obs,
            split_at,
            method,
        } => {
            let g = load(&model, report)?;
            let trace = g.alphabet().parse_trace(&obs)?;
            let est = Estimator::new(g)?;
            let states = match kind {
                EstimateArg::Current => est.current(&trace)?.states,
                EstimateArg::Initial => match method {
                    InitialMethod::Aug => est.initial_aug(&trace)?.states,
                    InitialMethod::Rev => est.initial_rev(&trace)?.states,
                },
                EstimateArg::Delayed => {
                    let k = split_at.ok_or_else(|| {
                        Error::Invalid("delayed estimation needs `--split-at`".into())
                    })?;
                    let (alpha, beta) = trace.split_at(k).ok_or_else(|| {
                        Error::Invalid(format!(
                            "`--split-at {k}` exceeds the trace length {}",
                            trace.len()
                        ))
                    })?;
                    est.delayed(&alpha, &beta)?.states
                }
            };
            let _ = writeln!(report.out, "{}", est.model().format_ids(&states));
            Ok(EXIT_HOLDS)
        }
        Command::Build {
            what,
            model,
            dot: target,
        } => {
            let g = load(&model, report)?;
            let est = Estimator::new(g)?;
            let g = est.model();
            let (listing, graph) = match what {
                BuildArg::Observer => {
                    let obs = est.observer();
                    let mut s = String::new();
                    for (i, q) in obs.states().iter().enumerate() {
                        let _ = writeln!(s, "q{i} {}", g.format_set(q));
                    }
                    for i in 0..obs.len() {
                        for (e, j) in obs.edges(i) {
                            let _ = writeln!(s, "q{i} {} q{j}", g.alphabet().name(e));
                        }
                    }
                    (s, dot::observer(obs, g))
                }
                BuildArg::Reverse => {
                    let r = reverse(g);
                    (io::text::serialize(&r), dot::automaton(&r))
                }
                BuildArg::Augment => {
                    let a = augment(g).automaton;
                    (listing(&a), dot::automaton(&a))
                }
                BuildArg::TwinPlant => {
                    let tp = est.twin();
                    let mut s = String::new();
                    for i in 0..tp.len() {
                        let (a, b) = tp.pair(i);
                        for &(ev, j) in tp.successors(i) {
                            let (c, d) = tp.pair(j);
                            let _ = writeln!(
                                s,
                                "({},{}) {} ({},{})",
                                g.name(a),
                                g.name(b),
                                ev.render(g),
                                g.name(c),
                                g.name(d)
                            );
                        }
                    }
                    (s, dot::twin_plant(tp, g))
                }
            };
            match target.as_deref() {
                None => report.out.push_str(&listing),
                Some("-") => report.out.push_str(&graph),
                Some(path) => std::fs::write(path, graph).map_err(|source| Error::Io {
                    path: path.to_string(),
                    source,
                })?,
            }
            Ok(EXIT_HOLDS)
        }
        Command::Verify {
            property: name,
            model,
            method,
            params,
            unsafe_skip_a2,
        } => {
            let p = property(&name, &params)?;
            let query = PropertyQuery::new(p, method.parse::<Method>()?)?;
            let g = apply_params(load(&model, report)?, &params, report)?;
            let est = if unsafe_skip_a2 {
                Estimator::unchecked(g).waive_a2()
            } else {
                Estimator::new(g)?
            };
            let v = verify::verify(&est, &query)?;
            Ok(report.verdict(&p.to_string(), &v, est.model()))
        }
        Command::Oracle {
            command:
                OracleCommand::Falsify {
                    property: name,
                    model,
                    bound,
                    params,
                },
        } => {
            let p = property(&name, &params)?;
            let query = PropertyQuery::new(p, Method::Observer)?;
            let g = apply_params(load(&model, report)?, &params, report)?;
            assumptions::require(&g, false)?;
            match oracle::falsify(&g, &query, bound)? {
                Some(w) => Ok(report.verdict(&p.to_string(), &Verdict::Violated(w), &g)),
                None => {
                    let _ = writeln!(
                        report.out,
                        "{p}: no counterexample with observations of length ≤ {bound}"
                    );
                    Ok(EXIT_HOLDS)
                }
            }
        }
    }
}

/// Plain listing of a derived automaton whose state names need not be
/// valid tokens.
fn listing(g: &Automaton) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "initial: {}", g.format_ids(g.initial()));
    for (x, e, y) in g.transitions() {
        let _ = writeln!(s, "{} {} {}", g.name(x), g.alphabet().name(e), g.name(y));
    }
    s
}
