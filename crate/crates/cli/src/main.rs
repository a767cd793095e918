//! `chorder`: exact comparison of channels from JSON files.
//!
//! Exit codes: 0 success, 1 reproduction mismatch, 2 invalid input,
//! 3 enumeration limit exceeded.

mod files;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use channel_order::fixtures::{all_fixtures, paper_fixture, Fixture};
use channel_order::orders::{blackwell_check, cs_check, shannon_check, Certificate, OrderKind, PolicySpace};
use channel_order::repro::run_repro;
use channel_order::utility_classes::{compare_reduced, exact_class_score, ClassSearch, ReducedComparison, UtilityClassTag};
use channel_order::{
    blackwell_value, cs_value, format_rational, shannon_value, Channel, Error, InputDistribution, Limits,
    UtilityMatrix, Verdict,
};
use clap::{Parser, Subcommand, ValueEnum};

use files::{export_fixture, load_channel, load_distribution, load_utility, LoadedChannel};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Library(Error),
    Mismatch(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Library(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Library(Error::EnumerationLimit { .. }) => 3,
            CliError::Input(_) | CliError::Library(_) => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Input(m) | CliError::Mismatch(m) => m.clone(),
            CliError::Library(e) => e.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(name = "chorder", version, about = "Exact Blackwell, Shannon and convexified Shannon comparison of channels")]
struct Cli {
    /// Largest enumeration allowed for any vertex or strategy search.
    #[arg(long, global = true)]
    max_enum: Option<u128>,
    /// Accept input distributions that do not sum to one.
    #[arg(long, global = true)]
    allow_unnormalized_dist: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximal expected utility of a channel.
    Value {
        channel: Option<PathBuf>,
        utility: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "blackwell")]
        space: Space,
        /// "uniform" or a distribution file; defaults to the channel's input_dist.
        #[arg(long)]
        dist: Option<String>,
        /// Use the first channel and utility of a built-in fixture instead of files.
        #[arg(long, conflicts_with_all = ["channel", "utility"])]
        fixture: Option<String>,
    },
    /// Decide whether B is a garbling of A in the given order.
    Order {
        #[arg(long, value_enum, default_value = "shannon")]
        kind: Kind,
        a: Option<PathBuf>,
        b: Option<PathBuf>,
        #[arg(long)]
        dist: Option<String>,
        #[arg(long, conflicts_with_all = ["a", "b"])]
        fixture: Option<String>,
    },
    /// Reduced usefulness of A over B with respect to a utility class.
    Compare {
        #[arg(long, value_enum)]
        class: Class,
        a: Option<PathBuf>,
        b: Option<PathBuf>,
        #[arg(long)]
        dist: Option<String>,
        #[arg(long, conflicts_with_all = ["a", "b"])]
        fixture: Option<String>,
        /// Also compare B over A.
        #[arg(long)]
        both: bool,
    },
    /// Recompute every built-in fixture and compare with the pinned values.
    Repro,
    /// Write a fixture's channels and utility as JSON files.
    ExportFixture { id: String, dir: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    Blackwell,
    Shannon,
    Cshannon,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Blackwell,
    Shannon,
    Cshannon,
}

impl From<Kind> for OrderKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Blackwell => OrderKind::Blackwell,
            Kind::Shannon => OrderKind::Shannon,
            Kind::Cshannon => OrderKind::ConvexShannon,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Class {
    Indifferent,
    Exact,
    Oblivious,
    Doubly,
}

impl From<Class> for UtilityClassTag {
    fn from(c: Class) -> Self {
        match c {
            Class::Indifferent => UtilityClassTag::Indifferent,
            Class::Exact => UtilityClassTag::Exact,
            Class::Oblivious => UtilityClassTag::Oblivious,
            Class::Doubly => UtilityClassTag::DoublyStochasticMultiple,
        }
    }
}

struct Context {
    limits: Limits,
    allow_unnormalized: bool,
}

impl Context {
    fn distribution(
        &self,
        flag: Option<&str>,
        channels: &[&LoadedChannel],
        n: usize,
    ) -> Result<InputDistribution, CliError> {
        let weights = match flag {
            Some("uniform") => return Ok(InputDistribution::uniform(n)),
            Some(path) => Some(load_distribution(Path::new(path))?),
            None => {
                let mut given = channels.iter().filter_map(|c| c.dist.as_ref());
                let first = given.next().cloned();
                if given.any(|d| Some(d) != first.as_ref()) {
                    return Err(CliError::Input(
                        "channels declare different input distributions; pass --dist".into(),
                    ));
                }
                first
            }
        };
        let Some(weights) = weights else {
            return Ok(InputDistribution::uniform(n));
        };
        let d = if self.allow_unnormalized {
            InputDistribution::unnormalized(weights)?
        } else {
            InputDistribution::new(weights)?
        };
        Ok(d)
    }
}

fn limits_for(max_enum: Option<u128>) -> Limits {
    let mut limits = Limits::default();
    if let Some(n) = max_enum {
        limits.max_vertex_pairs = n;
        limits.max_alphabet = (1..=limits.max_alphabet)
            .take_while(|&k| (k as u128).saturating_pow(k as u32) <= n)
            .last()
            .unwrap_or(0);
    }
    limits
}

fn fixture_pair(id: &str) -> Result<(LoadedChannel, LoadedChannel, Fixture), CliError> {
    let f = paper_fixture(id)?;
    let dist = Some(f.pi.weights().to_vec());
    Ok((
        LoadedChannel { channel: f.c.clone(), dist: dist.clone() },
        LoadedChannel { channel: f.cbar.clone(), dist },
        f,
    ))
}

fn required<'a>(path: &'a Option<PathBuf>, what: &str) -> Result<&'a Path, CliError> {
    path.as_deref()
        .ok_or_else(|| CliError::Input(format!("missing {what} file (or pass --fixture)")))
}

fn cmd_value(
    ctx: &Context,
    channel: &Option<PathBuf>,
    utility: &Option<PathBuf>,
    fixture: &Option<String>,
    space: Space,
    dist: Option<&str>,
) -> Result<String, CliError> {
    let (loaded, u): (LoadedChannel, UtilityMatrix) = match fixture {
        Some(id) => {
            let (a, _, f) = fixture_pair(id)?;
            (a, f.utility)
        }
        None => (load_channel(required(channel, "channel")?)?, load_utility(required(utility, "utility")?)?),
    };
    let c = &loaded.channel;
    let pi = ctx.distribution(dist, &[&loaded], c.inputs())?;
    let mut out = String::new();
    match space {
        Space::Blackwell => {
            let opt = blackwell_value(c, &u, &pi)?;
            writeln!(out, "value: {}", format_rational(&opt.value)).unwrap();
            write!(out, "strategy A:\n{}", opt.strategy).unwrap();
        }
        Space::Shannon | Space::Cshannon => {
            let opt = if matches!(space, Space::Shannon) {
                shannon_value(c, &u, &pi, &ctx.limits)?
            } else {
                cs_value(c, &u, &pi, &ctx.limits)?
            };
            writeln!(out, "value: {}", format_rational(&opt.value)).unwrap();
            write!(out, "strategy A:\n{}", opt.strategy).unwrap();
            write!(out, "pre-garbling R:\n{}", opt.pre).unwrap();
        }
    }
    Ok(out)
}

fn render_witness(out: &mut String, w: &channel_order::Witness) {
    let space = match w.space {
        PolicySpace::Blackwell => "blackwell",
        PolicySpace::ConvexShannon => "cshannon",
    };
    write!(out, "witness utility ({space} values):\n{}", w.utility.matrix()).unwrap();
    writeln!(out, "value(A) = {}", format_rational(&w.original_value)).unwrap();
    writeln!(out, "value(B) = {}", format_rational(&w.garbled_value)).unwrap();
}

fn render_verdict(verdict: &Verdict) -> String {
    let mut out = format!("{}\n", verdict.label());
    match verdict {
        Verdict::Yes(Certificate::Garbling { post, pre }) => {
            write!(out, "M:\n{post}N:\n{pre}").unwrap();
        }
        Verdict::Yes(Certificate::Mixture(terms)) => {
            writeln!(out, "mixture of {} terms:", terms.len()).unwrap();
            for (i, t) in terms.iter().enumerate() {
                write!(out, "term {}: weight {}", i + 1, format_rational(&t.weight)).unwrap();
                if let Some((l, r)) = t.vertex {
                    write!(out, " (L #{l}, R #{r})").unwrap();
                }
                write!(out, "\nM:\n{}N:\n{}", t.post, t.pre).unwrap();
            }
        }
        Verdict::No(Some(w)) => render_witness(&mut out, w),
        Verdict::No(None) => out.push_str("decided by the complete 2x2 procedure; no separating utility attached\n"),
        Verdict::Unknown => out.push_str("no certificate found in either direction of the search\n"),
    }
    out
}

fn load_pair(
    a: &Option<PathBuf>,
    b: &Option<PathBuf>,
    fixture: &Option<String>,
) -> Result<(LoadedChannel, LoadedChannel), CliError> {
    match fixture {
        Some(id) => {
            let (x, y, _) = fixture_pair(id)?;
            Ok((x, y))
        }
        None => Ok((load_channel(required(a, "first channel")?)?, load_channel(required(b, "second channel")?)?)),
    }
}

fn cmd_order(
    ctx: &Context,
    kind: Kind,
    a: &LoadedChannel,
    b: &LoadedChannel,
    dist: Option<&str>,
) -> Result<String, CliError> {
    let (c, cbar) = (&a.channel, &b.channel);
    let pi = ctx.distribution(dist, &[a, b], c.inputs())?;
    let verdict = match OrderKind::from(kind) {
        OrderKind::Blackwell => blackwell_check(c, cbar, &pi)?,
        OrderKind::Shannon => shannon_check(c, cbar, &pi, &ctx.limits)?,
        OrderKind::ConvexShannon => cs_check(c, cbar, &pi, &ctx.limits)?,
    };
    if !verdict.verify(c, cbar, &pi, &ctx.limits)? {
        return Err(CliError::Library(Error::CertificateCheck(format!(
            "{} certificate failed re-verification",
            verdict.label()
        ))));
    }
    Ok(render_verdict(&verdict))
}

fn render_comparison(out: &mut String, header: &str, r: &ReducedComparison) {
    writeln!(out, "{header}: {}", r.label()).unwrap();
    if let ReducedComparison::DominatedStrictlyAt { witness, original_value, garbled_value } = r {
        write!(out, "witness utility:\n{}", witness.matrix()).unwrap();
        writeln!(out, "value(A) = {}", format_rational(original_value)).unwrap();
        writeln!(out, "value(B) = {}", format_rational(garbled_value)).unwrap();
    }
}

fn cmd_compare(
    ctx: &Context,
    class: Class,
    a: &LoadedChannel,
    b: &LoadedChannel,
    dist: Option<&str>,
    both: bool,
) -> Result<String, CliError> {
    let (c, cbar) = (&a.channel, &b.channel);
    let pi = ctx.distribution(dist, &[a, b], c.inputs())?;
    let tag = UtilityClassTag::from(class);
    let search = ClassSearch { limits: ctx.limits, ..ClassSearch::default() };
    let mut out = String::new();
    if matches!(class, Class::Exact) && c.rows() == c.cols() {
        let score = |x: &Channel| format_rational(&exact_class_score(x));
        writeln!(out, "scores: A {} B {}", score(c), score(cbar)).unwrap();
    }
    render_comparison(&mut out, "A over B", &compare_reduced(c, cbar, tag, &pi, &search)?);
    if both {
        render_comparison(&mut out, "B over A", &compare_reduced(cbar, c, tag, &pi, &search)?);
    }
    Ok(out)
}

fn cmd_repro(limits: &Limits) -> Result<String, CliError> {
    let report = run_repro(&all_fixtures(), limits);
    let table = report.table();
    if report.passed() {
        return Ok(table);
    }
    let failed: Vec<&str> = report.failures().map(|r| r.id.as_str()).collect();
    Err(CliError::Mismatch(format!("{table}mismatches: {}", failed.join(", "))))
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let ctx = Context {
        limits: limits_for(cli.max_enum),
        allow_unnormalized: cli.allow_unnormalized_dist,
    };
    match &cli.command {
        Command::Value { channel, utility, space, dist, fixture } => {
            cmd_value(&ctx, channel, utility, fixture, *space, dist.as_deref())
        }
        Command::Order { kind, a, b, dist, fixture } => {
            let (x, y) = load_pair(a, b, fixture)?;
            cmd_order(&ctx, *kind, &x, &y, dist.as_deref())
        }
        Command::Compare { class, a, b, dist, fixture, both } => {
            let (x, y) = load_pair(a, b, fixture)?;
            cmd_compare(&ctx, *class, &x, &y, dist.as_deref(), *both)
        }
        Command::Repro => cmd_repro(&ctx.limits),
        Command::ExportFixture { id, dir } => {
            let written = export_fixture(&paper_fixture(id)?, dir)?;
            Ok(written.join("\n") + "\n")
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn max_enum_sets_both_limits() {
        let l = limits_for(Some(256));
        assert_eq!(l.max_vertex_pairs, 256);
        assert_eq!(l.max_alphabet, 4);
        assert_eq!(limits_for(Some(0)).max_alphabet, 0);
        assert_eq!(limits_for(None), Limits::default());
    }

    #[test]
    fn rationals_in_output_are_reduced() {
        let one_half: channel_order::Rational = channel_order::rat(14, 28);
        assert_eq!(format_rational(&one_half), "1/2");
    }
}
