use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use boundaryk::ktheory::{
    k_report_with, verify_projection_identities, CertificateRecord, IdentityReport, KReport,
    KReportOptions, MembershipEngine, Verdict,
};
use boundaryk::orbits::{coe_compare, orbit_count_invariant, CoeVerdict};
use boundaryk::selftest::{run_selftest, SelftestReport};
use boundaryk::words::DEFAULT_MAX_DEPTH;
use boundaryk::{Error, GroupSpec, Letter, RelationSpec};

use crate::cache::DirectoryStore;
use crate::expr::parse_expression;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;

/// Environment variable overriding the depth cap.
pub const MAX_DEPTH_ENV: &str = "BOUNDARYK_MAX_DEPTH";

#[derive(Parser, Debug)]
#[command(name = "boundaryk", version, about = "Exact computations on the boundary of a free group")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Directory for cached membership certificates (re-verified on load).
    #[arg(long, value_name = "DIR", global = true)]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certificates and kernel ranks for the K-groups of the quotient by R_F.
    Kgroups {
        #[arg(long = "d")]
        d: usize,
        /// Generator subset F, e.g. `a,b`.
        #[arg(long)]
        relation: String,
        #[arg(long)]
        depth: usize,
        /// Coefficient bound for the combinations of q[s] when F = S.
        #[arg(long, default_value_t = 2)]
        bound: i64,
        /// Include wall-clock timings (makes the output run-dependent).
        #[arg(long)]
        timings: bool,
    },
    /// Recurrences for q[s^k], 2 <= k <= kmax.
    Identities {
        #[arg(long = "d")]
        d: usize,
        #[arg(long)]
        kmax: usize,
    },
    /// Decide whether an invariant function lies in the image of tau.
    Membership {
        #[arg(long = "d")]
        d: usize,
        #[arg(long)]
        relation: String,
        /// Expression such as `q[a] - q[b]` or `2*a.q[b] + 1`.
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        #[arg(long, default_value_t = 8)]
        max_depth: usize,
    },
    /// Count orbits of the points g·t^∞ (t ∈ F ∪ F⁻¹) up to the relation.
    OrbitInvariant {
        #[arg(long = "d")]
        d: usize,
        #[arg(long)]
        relation: String,
        /// Largest prefix length |g| sampled.
        #[arg(long, default_value_t = 2)]
        bound: usize,
    },
    /// Compare the systems for two generator subsets.
    Coe {
        #[arg(long = "d")]
        d: usize,
        #[arg(long)]
        f1: String,
        #[arg(long)]
        f2: String,
    },
    /// Run the built-in invariant checks.
    Selftest,
}

#[derive(Serialize)]
struct MembershipOutput {
    d: usize,
    relation: String,
    max_depth: usize,
    target: String,
    verified: bool,
    certificate: CertificateRecord,
}

#[derive(Serialize)]
struct OrbitOutput {
    d: usize,
    relation: String,
    bound: usize,
    orbits: usize,
    expected: usize,
    sampled_points: usize,
    alarm: bool,
}

#[derive(Serialize)]
struct CoeOutput {
    d: usize,
    f1: String,
    f2: String,
    verdict: &'static str,
    orbit_counts: [usize; 2],
    /// Image of each generator under the permutation witness.
    permutation: Option<Vec<String>>,
    witness_source: Option<&'static str>,
}

#[derive(Serialize)]
struct IdentitiesOutput<'a> {
    #[serde(flatten)]
    report: &'a IdentityReport,
    all_hold: bool,
}

#[derive(Serialize)]
struct SelftestOutput<'a> {
    passed: bool,
    #[serde(flatten)]
    report: &'a SelftestReport,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let _ = write!(err, "{e}");
            return EXIT_ERROR;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn depth_cap() -> Result<usize, CliError> {
    match std::env::var(MAX_DEPTH_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{MAX_DEPTH_ENV} must be a nonnegative integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_MAX_DEPTH),
    }
}

fn group(d: usize) -> Result<GroupSpec, CliError> {
    Ok(GroupSpec::new(d)?.with_max_depth(depth_cap()?))
}

fn engine(cli: &Cli, spec: GroupSpec) -> Result<MembershipEngine, CliError> {
    let engine = MembershipEngine::new(spec);
    Ok(match &cli.cache {
        Some(dir) => engine.with_store(Box::new(DirectoryStore::open(dir)?)),
        None => engine,
    })
}

fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Kgroups { d, relation, depth, bound, timings } => {
            let spec = group(*d)?;
            let rel = RelationSpec::parse(&spec, relation)?;
            let options = KReportOptions { combination_bound: *bound, timings: *timings, ..Default::default() };
            let report = k_report_with(&mut engine(cli, spec)?, &rel, *depth, &options)?;
            match cli.format {
                Format::Json => emit_json(out, &report)?,
                Format::Text => write_kreport_text(out, &report)?,
            }
            Ok(if !report.consistent() {
                EXIT_ERROR
            } else if report.unknown_count() > 0 {
                EXIT_UNKNOWN
            } else {
                EXIT_OK
            })
        }
        Command::Identities { d, kmax } => {
            let report = verify_projection_identities(&group(*d)?, *kmax)?;
            let all_hold = report.all_hold();
            match cli.format {
                Format::Json => emit_json(out, &IdentitiesOutput { report: &report, all_hold })?,
                Format::Text => {
                    for c in &report.checks {
                        writeln!(
                            out,
                            "{:<40} exact: {:<3} pointwise: {}",
                            c.statement,
                            yes_no(c.holds),
                            yes_no(c.pointwise)
                        )?;
                    }
                    writeln!(out, "all identities hold: {}", yes_no(all_hold))?;
                }
            }
            Ok(if all_hold { EXIT_OK } else { EXIT_ERROR })
        }
        Command::Membership { d, relation, target, max_depth } => {
            let spec = group(*d)?;
            let rel = RelationSpec::parse(&spec, relation)?;
            let expr = parse_expression(&spec, target)?.normalized();
            let h = expr.evaluate(&spec)?;
            let mut engine = engine(cli, spec)?;
            let cert = engine.im_tau_membership(&rel, &h, *max_depth)?.with_label(expr.to_string());
            let verified = engine.verify(&cert)?;
            let output = MembershipOutput {
                d: *d,
                relation: rel.to_string(),
                max_depth: *max_depth,
                target: expr.to_string(),
                verified,
                certificate: cert.to_record(),
            };
            match cli.format {
                Format::Json => emit_json(out, &output)?,
                Format::Text => {
                    writeln!(out, "target: {} (relation F = {{{}}}, d = {d})", output.target, output.relation)?;
                    writeln!(out, "verdict: {}", cert.verdict.as_str())?;
                    writeln!(out, "reason: {}", cert.reason)?;
                    if let Some(p) = cert.preimage() {
                        for (s, f) in p.components().iter().enumerate() {
                            writeln!(out, "  preimage component {}: {f}", Letter::generator(s).to_char())?;
                        }
                    }
                    writeln!(out, "certificate re-verified: {}", yes_no(verified))?;
                }
            }
            Ok(match (verified, cert.verdict) {
                (false, _) => EXIT_ERROR,
                (true, Verdict::Unknown) => EXIT_UNKNOWN,
                (true, _) => EXIT_OK,
            })
        }
        Command::OrbitInvariant { d, relation, bound } => {
            let spec = group(*d)?;
            let rel = RelationSpec::parse(&spec, relation)?;
            let count = orbit_count_invariant(&rel, *bound)?;
            let output = OrbitOutput {
                d: *d,
                relation: rel.to_string(),
                bound: *bound,
                orbits: count.orbits,
                expected: count.expected,
                sampled_points: count.sampled_points,
                alarm: count.falsification_alarm(),
            };
            match cli.format {
                Format::Json => emit_json(out, &output)?,
                Format::Text => {
                    writeln!(
                        out,
                        "F = {{{}}}: {} orbits among {} sampled points (|g| <= {bound}); #F = {}",
                        output.relation, output.orbits, output.sampled_points, output.expected
                    )?;
                    if output.alarm {
                        writeln!(out, "ALARM: the orbit count differs from #F")?;
                    }
                }
            }
            Ok(if output.alarm { EXIT_ERROR } else { EXIT_OK })
        }
        Command::Coe { d, f1, f2 } => {
            let spec = group(*d)?;
            let (a, b) = (RelationSpec::parse(&spec, f1)?, RelationSpec::parse(&spec, f2)?);
            let output = match coe_compare(&a, &b)? {
                CoeVerdict::Equivalent { permutation } => CoeOutput {
                    d: *d,
                    f1: a.to_string(),
                    f2: b.to_string(),
                    verdict: "equivalent",
                    orbit_counts: [a.generators().len(), b.generators().len()],
                    permutation: Some(
                        permutation.iter().map(|&i| Letter::generator(i).to_char().to_string()).collect(),
                    ),
                    witness_source: Some("generator permutation supplied by boundaryk"),
                },
                CoeVerdict::Distinguished { left, right } => CoeOutput {
                    d: *d,
                    f1: a.to_string(),
                    f2: b.to_string(),
                    verdict: "distinguished",
                    orbit_counts: [left, right],
                    permutation: None,
                    witness_source: None,
                },
            };
            match cli.format {
                Format::Json => emit_json(out, &output)?,
                Format::Text => {
                    let [l, r] = output.orbit_counts;
                    writeln!(out, "F1 = {{{}}}, F2 = {{{}}}, d = {d}", output.f1, output.f2)?;
                    writeln!(out, "orbit-count invariants: {l} vs {r}")?;
                    match &output.permutation {
                        Some(p) => {
                            let images: Vec<String> = p
                                .iter()
                                .enumerate()
                                .map(|(i, x)| format!("{}->{x}", Letter::generator(i).to_char()))
                                .collect();
                            writeln!(out, "equivalent; witness permutation {}", images.join(" "))?;
                        }
                        None => writeln!(out, "distinguished")?,
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Selftest => {
            let report = run_selftest();
            let passed = report.passed();
            match cli.format {
                Format::Json => emit_json(out, &SelftestOutput { passed, report: &report })?,
                Format::Text => {
                    for c in &report.checks {
                        writeln!(out, "[{}] {}: {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail)?;
                    }
                    writeln!(out, "{}", if passed { "all checks passed" } else { "some checks failed" })?;
                }
            }
            Ok(if passed { EXIT_OK } else { EXIT_ERROR })
        }
    }
}

fn write_kreport_text(out: &mut dyn Write, r: &KReport) -> Result<(), CliError> {
    writeln!(out, "d = {}, F = {{{}}}, depth {}", r.d, r.relation, r.depth)?;
    writeln!(out, "unit decomposition {}: {}", r.unit_decomposition.statement, yes_no(r.unit_decomposition.holds))?;
    writeln!(out, "K0: {}", r.k0.statement)?;
    let s = &r.k0.summary;
    writeln!(
        out,
        "  {} certificates: {} in image, {} not in image, {} unknown; re-verified: {}",
        r.k0.certificates.len(),
        s.in_image,
        s.not_in_image,
        s.unknown,
        yes_no(s.verified)
    )?;
    for c in &r.k0.certificates {
        writeln!(
            out,
            "  {:<28} {:<13} {}",
            c.label.as_deref().unwrap_or("?"),
            c.verdict.as_str(),
            c.reason
        )?;
    }
    writeln!(out, "K1: {}", r.k1.statement)?;
    for k in &r.k1.kernel_ranks {
        writeln!(out, "  n = {}: rank {}, constants: {}", k.depth, k.rank, yes_no(k.constants))?;
    }
    if let Some(t) = &r.timings {
        writeln!(out, "timings: K0 {} ms, K1 {} ms, total {} ms", t.k0_ms, t.k1_ms, t.total_ms)?;
    }
    let verdict = match (r.consistent(), r.unknown_count()) {
        (false, _) => "INCONSISTENT".to_string(),
        (true, 0) => "consistent".to_string(),
        (true, n) => format!("consistent, with {n} undecided certificates"),
    };
    writeln!(out, "verdict: {verdict}")?;
    Ok(())
}
