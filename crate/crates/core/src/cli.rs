//! Command-line front end.
//!
//! One subcommand per library question plus a `verify` battery.  Exit status
//! is part of the interface: 0 for success or an affirmative answer, 1 for a
//! negative answer or a failed verification, 2 for invalid input (with the
//! violated precondition named on stderr).

use std::fmt::Write as _;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;

use crate::config::RunConfig;
use crate::farey::{enumerate_interval, fusion_intervals, Slope};
use crate::orbit::{limit_set_gaps, orbit_equivalent, orbit_normalize, union_component, GapLayer};
use crate::riley::{self, Representation, SeriesTerm};
use crate::words::{u_hat, u_word, Word};
use crate::{decide, smallcancel, sseq, Error, Result};

#[derive(Copy, Clone, PartialEq, Eq, Debug, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
    Svg,
}

#[derive(Parser, Debug)]
#[command(
    name = "twobridge",
    version,
    about = "Decision procedures and numeric verifiers for simple loops on two-bridge spheres",
    after_help = "Exit status: 0 success / affirmative, 1 negative answer or failed check, 2 invalid input."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Option<Cmd>,

    /// Print the resolved configuration and exit
    #[arg(long, global = true)]
    show_config: bool,

    /// key=value configuration file, applied before flag overrides
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<std::path::PathBuf>,

    /// Denominator bound for series walks and enumerations
    #[arg(long, global = true, value_name = "N")]
    max_den: Option<u64>,

    /// Depth bound for orbit and limit-set searches
    #[arg(long, global = true, value_name = "D")]
    depth: Option<u32>,

    /// Subtree weight below which series walks stop descending
    #[arg(long, global = true, value_name = "EPS")]
    prune_eps: Option<f64>,

    /// Representation parameter override as "RE,IM"
    #[arg(long, global = true, value_name = "RE,IM", allow_hyphen_values = true)]
    omega: Option<String>,

    /// Output format (svg: limitset only; csv: sequence and series output)
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Allow questions about r > 1/2 to be decided through the mirror 1-r
    #[arg(long, global = true)]
    mirror_reduce: bool,

    /// Stream individual series terms as CSV on stdout (summary on stderr)
    #[arg(long, global = true)]
    dump_terms: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print the relator word of a slope
    Word {
        r: Slope,
        /// Print the alternating core instead of the full relator
        #[arg(long)]
        hat: bool,
    },
    /// Run-length sequences of the relator and their structural checks
    Sseq { r: Slope },
    /// Piece audit for a slope, or piece test for one word
    Pieces { r: Slope, word: Option<String> },
    /// Normalize a slope by the reflection group of r
    Reduce { r: Slope, s: Slope },
    /// Is the loop of slope s null-homotopic in the link group of r?
    Null { r: Slope, s: Slope },
    /// Are the loops of slopes s and t freely homotopic in the link group of r?
    Homotopic { r: Slope, s: Slope, t: Slope },
    /// Does the loop of slope s induce the standard epimorphism witness?
    Epi { r: Slope, s: Slope },
    /// Is the loop of slope s peripheral?
    Peripheral { r: Slope, s: Slope },
    /// Is the loop of slope s primitive, or a proper power of a primitive?
    Primitive { r: Slope, s: Slope },
    /// Gap layers of the reflection-orbit limit set inside [0,1]
    Limitset { r: Slope },
    /// Boundary weight identity for the geometric representation of r
    Mcshane { r: Slope },
    /// Cusp modulus from the weight series over the lower interval
    Modulus { r: Slope },
    /// Classical once-punctured-torus identity for a trace triple
    Classical {
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(allow_hyphen_values = true)]
        y: String,
        #[arg(allow_hyphen_values = true)]
        z: String,
    },
    /// Bounded- and unbounded-trace evidence for the two ends
    Evidence { r: Slope },
    /// Run the property-suite battery; nonzero exit on any failure
    Verify,
}

pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind::{DisplayHelp, DisplayVersion};
            let code = match err.kind() {
                DisplayHelp | DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.load_file(path)?;
    }
    if let Some(v) = cli.max_den {
        cfg.max_den = v;
    }
    if let Some(v) = cli.depth {
        cfg.depth = v;
    }
    if let Some(v) = cli.prune_eps {
        cfg.prune_eps = v;
    }
    if let Some(v) = &cli.omega {
        cfg.set("omega", v)?;
    }

    if cli.show_config {
        print!("{cfg}");
        return Ok(0);
    }
    let Some(cmd) = cli.cmd else {
        let _ = Cli::command().print_help();
        return Ok(2);
    };

    let fmt = cli.format;
    let mirror = cli.mirror_reduce;
    let dump = cli.dump_terms;
    match cmd {
        Cmd::Word { r, hat } => cmd_word(fmt, &r, hat),
        Cmd::Sseq { r } => cmd_sseq(fmt, &r),
        Cmd::Pieces { r, word } => cmd_pieces(fmt, &r, word.as_deref()),
        Cmd::Reduce { r, s } => cmd_reduce(fmt, &r, &s),
        Cmd::Null { r, s } => cmd_null(fmt, &r, &s),
        Cmd::Homotopic { r, s, t } => cmd_homotopic(fmt, &r, &s, &t, mirror),
        Cmd::Epi { r, s } => cmd_epi(fmt, &r, &s),
        Cmd::Peripheral { r, s } => cmd_peripheral(fmt, &r, &s, mirror),
        Cmd::Primitive { r, s } => cmd_primitive(fmt, &r, &s, mirror),
        Cmd::Limitset { r } => cmd_limitset(&cfg, fmt, &r),
        Cmd::Mcshane { r } => cmd_mcshane(&cfg, fmt, dump, &r),
        Cmd::Modulus { r } => cmd_modulus(&cfg, fmt, dump, &r),
        Cmd::Classical { x, y, z } => cmd_classical(&cfg, fmt, dump, &x, &y, &z),
        Cmd::Evidence { r } => cmd_evidence(&cfg, fmt, &r),
        Cmd::Verify => cmd_verify(&cfg, fmt),
    }
}

// ---------------------------------------------------------------------------
// Shared output helpers
// ---------------------------------------------------------------------------

fn require_format(fmt: Format, allowed: &[Format], sub: &str) -> Result<()> {
    if allowed.contains(&fmt) {
        return Ok(());
    }
    let names: Vec<&str> = allowed
        .iter()
        .map(|f| match f {
            Format::Text => "text",
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
        })
        .collect();
    Err(Error::Config(format!("`{sub}` supports only --format {}", names.join("|"))))
}

fn emit_json(value: &serde_json::Value) {
    println!("{value}");
}

// Reports are plain data structs; serializing them cannot fail.
fn to_value<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report serialization")
}

fn clause_text(clause: &Option<String>) -> &str {
    clause.as_deref().unwrap_or("general")
}

fn runs_text(runs: &[u64]) -> String {
    let body: Vec<String> = runs.iter().map(|n| n.to_string()).collect();
    format!("({})", body.join(", "))
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn parse_complex(txt: &str) -> Result<Complex64> {
    let t = txt.trim();
    let (re, im) = match t.split_once(',') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "0"),
    };
    let re: f64 = re
        .parse()
        .map_err(|_| Error::Config(format!("expected a real number or RE,IM pair, got `{txt}`")))?;
    let im: f64 = im
        .parse()
        .map_err(|_| Error::Config(format!("expected a real number or RE,IM pair, got `{txt}`")))?;
    Ok(Complex64::new(re, im))
}

fn representation_for(cfg: &RunConfig, r: &Slope) -> Result<Representation> {
    match cfg.omega_complex() {
        Some(omega) => riley::representation_with_omega(r, omega),
        None => riley::geometric_representation(r),
    }
}

fn print_terms_csv(terms: &[SeriesTerm]) {
    println!("slope,re,im,kind");
    for (s, v, kind) in terms {
        println!("{s},{},{},{kind}", v.re, v.im);
    }
}

// ---------------------------------------------------------------------------
// Word and sequence commands
// ---------------------------------------------------------------------------

fn cmd_word(fmt: Format, r: &Slope, hat: bool) -> Result<i32> {
    require_format(fmt, &[Format::Text, Format::Json], "word")?;
    let w = if hat { u_hat(r)? } else { u_word(r)? };
    match fmt {
        Format::Text => println!("{w}"),
        Format::Json => emit_json(&json!({
            "r": r,
            "hat": hat,
            "word": w.to_string(),
            "length": w.len(),
        })),
        _ => unreachable!(),
    }
    Ok(0)
}

fn cmd_sseq(fmt: Format, r: &Slope) -> Result<i32> {
    require_format(fmt, &[Format::Text, Format::Json, Format::Csv], "sseq")?;
    let report = sseq::check_prop_sequence(r)?;
    let ok = report.ok();
    match fmt {
        Format::Text => {
            let d = &report.data;
            println!("r = {} (m = {})", d.r, d.m);
            println!(
                "S1 = {}  symmetric: {}  occurrences: {}",
                runs_text(d.s1.runs()),
                yes_no(report.s1_symmetric),
                report.s1_count
            );
            let s2_count = match report.s2_count {
                Some(n) => n.to_string(),
                None => "-".into(),
            };
            println!(
                "S2 = {}  symmetric: {}  occurrences: {}",
                runs_text(d.s2.runs()),
                yes_no(report.s2_symmetric),
                s2_count
            );
            println!("CS = {}", runs_text(d.cs.runs()));
            println!(
                "decomposition: {}  counts: {}  entries: {}  border: {}",
                yes_no(report.decomposition_ok),
                yes_no(report.counts_ok),
                yes_no(report.entries_ok),
                yes_no(report.border_ok)
            );
            println!("ok: {}", yes_no(ok));
        }
        Format::Json => emit_json(&to_value(&report)),
        Format::Csv => {
            println!("part,runs");
            let join = |runs: &[u64]| {
                runs.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(" ")
            };
            println!("s1,{}", join(report.data.s1.runs()));
            println!("s2,{}", join(report.data.s2.runs()));
            println!("cs,{}", join(report.data.cs.runs()));
        }
        _ => unreachable!(),
    }
    Ok(if ok { 0 } else { 1 })
}

fn cmd_pieces(fmt: Format, r: &Slope, word: Option<&str>) -> Result<i32> {
    require_format(fmt, &[Format::Text, Format::Json], "pieces")?;
    if let Some(txt) = word {
        let v: Word = txt.parse()?;
        let piece = smallcancel::is_piece_sseq(r, &v)?;
        let min_pieces = smallcancel::min_piece_count(r, &v)?;
        match fmt {
            Format::Text => {
                println!("word: {v}");
                println!("piece: {}  minimum pieces to cover: {min_pieces}", yes_no(piece));
            }
            Format::Json => emit_json(&json!({
                "r": r,
                "word": v.to_string(),
                "piece": piece,
                "min_pieces": min_pieces,
            })),
            _ => unreachable!(),
        }
        return Ok(if piece { 0 } else { 1 });
    }
    let audit = smallcancel::piece_audit(r)?;
    let ok = audit.ok();
    match fmt {
        Format::Text => {
            println!("r = {}", audit.r);
            println!("proper subwords: {}  pieces: {}", audit.subwords, audit.pieces);
            println!(
                "table mismatches: {}  sequence-rule mismatches: {}  obstruction mismatches: {}",
                audit.table_mismatches, audit.sseq_mismatches, audit.obstruction_mismatches
            );
            if let Some((wi, start, len)) = audit.first_mismatch {
                println!("first mismatch: word {wi}, start {start}, length {len}");
            }
            println!(
                "C(4): {} (min pieces {})  T(4): {}",
                yes_no(audit.c4.ok),
                audit.c4.min_pieces,
                yes_no(audit.t4.ok)
            );
            println!("ok: {}", yes_no(ok));
        }
        Format::Json => emit_json(&to_value(&audit)),
        _ => unreachable!(),
    }
    Ok(if ok { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// Decision commands
// ---------------------------------------------------------------------------

fn cmd_reduce(fmt: Format, r: &Slope, s: &Slope) -> Result<i32> {
    require_format(fmt, &[Format::Text, Format::Json], "reduce")?;
    let (nf, trace) = orbit_normalize(r, s)?;
    let fus = fusion_intervals(r)?;
    let component = match union_component(&fus, &nf) {
        1 => "interval-1",
        2 => "interval-2",
        _ if nf.is_infinite() => "infinity",
        _ => "slope",
    };
    match fmt {
        Format::Text => {
            println!("{s} -> {nf}  [{component}]");
            if !trace.is_empty() {
                let steps: Vec<String> = trace.iter().map(|e| e.to_string()).collect();
                println!("via: {}", steps.join(", "));
            }
        }
        Format::Json => {
            let steps: Vec<String> = trace.iter().map(|e| e.to_string()).collect();
            emit_json(&json!({
                "r": r,
                "s": s,
                "normalized": nf,
                "component": component,
                "reflections": steps,
            }));
        }
        _ => unreachable!(),
    }
    Ok(0)
}

fn cmd_null(fmt: Format, r: &Slope, s: &Slope) -> Result<i32> {
    require_format(fmt, &[Format::Text, Format::Json], "null")?;
    let v = decide::is_null_homotopic(r, s)?;
    match fmt {
        Format::Text => {
            println!(
                "null-homotopic: {}  (normalizes to {})",
                yes_no(v.null_homotopic),
                v.normalized
            );
        }
        Format::Json => emit_json(&to_value(&v)),
        _ => unreachable!(),
    }
    Ok(if v.null_homotopic { 0 } else { 1 })
}

fn cmd_epi(fmt: Format, r: &Slope, s: &Slope) -> Result<i32> {
    require_format(fmt, &[Format::Text, Format::Json], "epi")?;
    let v = decide::has_epimorphism(r, s)?;
    match fmt {
        Format::Text => match &v.witness {
            Some(w) => println!("epimorphism: yes  ({w})"),
            None => println!("epimorphism: no"),
        },
        Format::Json => emit_json(&to_value(&v)),
        _ => unreachable!(),
    }
    Ok(if v.epimorphism { 0 } else { 1 })
}

fn cmd_homotopic(fmt: Format, r: &Slope, s: &Slope, t: &Slope, mirror: bool) -> Result<i32> {
    require_format(fmt, &[Format::Text, Format::Json], "homotopic")?;
    let v = decide::are_homotopic(r, s, t, mirror)?;
    let yes = v.outcome != decide::HomotopyOutcome::NotHomotopic;
    match fmt {
        Format::Text => {
            let outcome = match v.outcome {
                decide::HomotopyOutcome::NullHomotopic => "yes (both null-homotopic)",
                decide::HomotopyOutcome::Homotopic => "yes",
                decide::HomotopyOutcome::NotHomotopic => "no",
            };
            println!("homotopic: {outcome}  [{}]", clause_text(&v.clause));
            println!("normal forms: {} and {}", v.s_normalized, v.t_normalized);
            if v.mirror_derived {
                println!("decided through the mirror of r");
            }
        }
        Format::Json => emit_json(&to_value(&v)),
        _ => unreachable!(),
    }
    Ok(if yes { 0 } else { 1 })
}

fn cmd_peripheral(fmt: Format, r: &Slope, s: &Slope, mirror: bool) -> Result<i32> {
    require_format(fmt, &[Format::Text, Format::Json], "peripheral")?;
    let v = decide::peripheral_status(r, s, mirror)?;
    match fmt {
        Format::Text => {
            println!("peripheral: {}  [{}]", yes_no(v.peripheral), clause_text(&v.clause));
            println!("normal form: {}", v.normalized);
            if v.mirror_derived {
                println!("decided through the mirror of r");
            }
        }
        Format::Json => emit_json(&to_value(&v)),
        _ => unreachable!(),
    }
    Ok(if v.peripheral { 0 } else { 1 })
}

fn cmd_primitive(fmt: Format, r: &Slope, s: &Slope, mirror: bool) -> Result<i32> {
    require_format(fmt, &[Format::Text, Format::Json], "primitive")?;
    let v = decide::primitivity(r, s, mirror)?;
    let primitive = v.primitivity == decide::Primitivity::Primitive;
    match fmt {
        Format::Text => {
            match v.primitivity {
                decide::Primitivity::Primitive => println!("primitive: yes  [{}]", clause_text(&v.clause)),
                decide::Primitivity::PowerOfPrimitive(k) => {
                    let power = match k {
                        2 => "square".to_string(),
                        3 => "cube".to_string(),
                        k => format!("{k}-th power"),
                    };
                    println!("primitive: no, {power} of a primitive  [{}]", clause_text(&v.clause))
                }
            }
            println!("normal form: {}", v.normalized);
            if v.mirror_derived {
                println!("decided through the mirror of r");
            }
        }
        Format::Json => emit_json(&to_value(&v)),
        _ => unreachable!(),
    }
    Ok(if primitive { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// Limit set
// ---------------------------------------------------------------------------

fn cmd_limitset(cfg: &RunConfig, fmt: Format, r: &Slope) -> Result<i32> {
    let layers = limit_set_gaps(r, cfg.depth)?;
    match fmt {
        Format::Text => {
            for layer in &layers {
                println!(
                    "depth {}: {} gaps, total length {:.9}",
                    layer.depth,
                    layer.gaps.len(),
                    layer.total_length().to_f64()
                );
            }
        }
        Format::Json => {
            for layer in &layers {
                let gaps: Vec<serde_json::Value> = layer
                    .gaps
                    .iter()
                    .map(|g| json!({ "lo": g.lo, "hi": g.hi }))
                    .collect();
                emit_json(&json!({
                    "depth": layer.depth,
                    "gap_count": layer.gaps.len(),
                    "total_length": layer.total_length().to_f64(),
                    "gaps": gaps,
                }));
            }
        }
        Format::Csv => {
            println!("depth,lo,hi,length");
            for layer in &layers {
                for g in &layer.gaps {
                    println!("{},{},{},{}", layer.depth, g.lo, g.hi, g.hi.to_f64() - g.lo.to_f64());
                }
            }
        }
        Format::Svg => print!("{}", limitset_svg(r, &layers)),
    }
    Ok(0)
}

fn limitset_svg(r: &Slope, layers: &[GapLayer]) -> String {
    const BAR_X: f64 = 70.0;
    const BAR_W: f64 = 1000.0;
    const ROW_H: f64 = 34.0;
    const BAR_H: f64 = 22.0;
    const MARGIN: f64 = 16.0;
    let width = BAR_X + BAR_W + MARGIN;
    let height = MARGIN * 2.0 + layers.len() as f64 * ROW_H;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    let _ = writeln!(s, "  <title>limit-set gaps for {r}</title>");
    for (i, layer) in layers.iter().enumerate() {
        let y = MARGIN + i as f64 * ROW_H;
        let _ = writeln!(
            s,
            "  <text x=\"8\" y=\"{:.1}\" font-family=\"monospace\" font-size=\"12\">d={}</text>",
            y + BAR_H * 0.7,
            layer.depth
        );
        let _ = writeln!(
            s,
            "  <rect x=\"{BAR_X:.1}\" y=\"{y:.1}\" width=\"{BAR_W:.1}\" height=\"{BAR_H:.1}\" fill=\"#39418c\"/>"
        );
        for gap in &layer.gaps {
            let lo = gap.lo.to_f64();
            let hi = gap.hi.to_f64();
            let x = BAR_X + BAR_W * lo;
            let w = (BAR_W * (hi - lo)).max(0.25);
            let _ = writeln!(
                s,
                "  <rect x=\"{x:.2}\" y=\"{y:.1}\" width=\"{w:.2}\" height=\"{BAR_H:.1}\" fill=\"#ffffff\"/>"
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

// ---------------------------------------------------------------------------
// Series commands
// ---------------------------------------------------------------------------

const SERIES_FORMATS: &[Format] = &[Format::Text, Format::Json, Format::Csv];

fn cmd_mcshane(cfg: &RunConfig, fmt: Format, dump: bool, r: &Slope) -> Result<i32> {
    require_format(fmt, SERIES_FORMATS, "mcshane")?;
    let rep = representation_for(cfg, r)?;
    let want_terms = dump || fmt == Format::Csv;
    let (report, terms) = riley::mcshane_with_terms(&rep, cfg.prune_eps, cfg.max_den, want_terms)?;
    let summary = format!(
        "r = {}  omega = {}\npartial sum = {}  (target {})\n|error| = {:.4e}  terms = {}  max_den = {}  tail <= {:.4e}",
        r,
        rep.omega(),
        report.partial_sum,
        report.target,
        report.error(),
        report.term_count,
        report.max_den,
        report.tail_estimate
    );
    if want_terms {
        print_terms_csv(&terms);
        eprintln!("{summary}");
        return Ok(0);
    }
    match fmt {
        Format::Text => println!("{summary}"),
        Format::Json => emit_json(&json!({
            "r": r,
            "omega": rep.omega(),
            "identity": report,
        })),
        _ => unreachable!(),
    }
    Ok(0)
}

fn cmd_modulus(cfg: &RunConfig, fmt: Format, dump: bool, r: &Slope) -> Result<i32> {
    require_format(fmt, SERIES_FORMATS, "modulus")?;
    let rep = representation_for(cfg, r)?;
    let want_terms = dump || fmt == Format::Csv;
    let (report, terms) =
        riley::cusp_modulus_with_terms(&rep, cfg.prune_eps, cfg.max_den, want_terms)?;
    let summary = format!(
        "r = {} ({})  omega = {}\nlambda = {}\nRe mod 2 = {:.6}  terms = {}  max_den = {}  tail <= {:.4e}",
        r,
        report.parity,
        rep.omega(),
        report.lambda,
        report.re_mod2,
        report.term_count,
        report.max_den,
        report.tail_estimate
    );
    if want_terms {
        print_terms_csv(&terms);
        eprintln!("{summary}");
        return Ok(0);
    }
    match fmt {
        Format::Text => println!("{summary}"),
        Format::Json => emit_json(&json!({
            "omega": rep.omega(),
            "modulus": report,
        })),
        _ => unreachable!(),
    }
    Ok(0)
}

fn cmd_classical(
    cfg: &RunConfig,
    fmt: Format,
    dump: bool,
    x: &str,
    y: &str,
    z: &str,
) -> Result<i32> {
    require_format(fmt, SERIES_FORMATS, "classical")?;
    let (x, y, z) = (parse_complex(x)?, parse_complex(y)?, parse_complex(z)?);
    let want_terms = dump || fmt == Format::Csv;
    let (report, terms) =
        riley::classical_with_terms(x, y, z, cfg.prune_eps, cfg.max_den, want_terms)?;
    let ok = report.error() <= cfg.identity_tol;
    let summary = format!(
        "traces ({x}, {y}, {z})\npartial sum = {}  (target {})\n|error| = {:.4e}  terms = {}  max_den = {}  tail <= {:.4e}\nwithin tolerance {:.1e}: {}",
        report.partial_sum,
        report.target,
        report.error(),
        report.term_count,
        report.max_den,
        report.tail_estimate,
        cfg.identity_tol,
        yes_no(ok)
    );
    if want_terms {
        print_terms_csv(&terms);
        eprintln!("{summary}");
        return Ok(if ok { 0 } else { 1 });
    }
    match fmt {
        Format::Text => println!("{summary}"),
        Format::Json => emit_json(&json!({
            "x": x,
            "y": y,
            "z": z,
            "identity": report,
            "within_tolerance": ok,
        })),
        _ => unreachable!(),
    }
    Ok(if ok { 0 } else { 1 })
}

fn cmd_evidence(cfg: &RunConfig, fmt: Format, r: &Slope) -> Result<i32> {
    require_format(fmt, &[Format::Text, Format::Json], "evidence")?;
    let rep = representation_for(cfg, r)?;
    let report = riley::end_invariant_evidence(&rep, cfg.depth, cfg.trace_bound)?;
    let ok = report.bounded_ok && report.unbounded_ok;
    match fmt {
        Format::Text => {
            println!("r = {}  omega = {}", report.r, report.omega);
            println!(
                "orbit samples: {}  max ||trace|-2| = {:.3e}  bounded end: {}",
                report.orbit_samples.len(),
                report.max_orbit_deviation,
                yes_no(report.bounded_ok)
            );
            let required = report.fans.iter().filter(|f| f.required).count();
            for fan in &report.fans {
                let status = match fan.exceeded_at {
                    Some(i) => format!("exceeds {} at term {i}", report.trace_bound),
                    None => format!("max |trace| {:.3e}", fan.max_abs_trace),
                };
                println!(
                    "fan -> {} [{} {}{}]: {status}",
                    fan.target,
                    fan.kind,
                    fan.side,
                    if fan.required { "" } else { ", informative" }
                );
            }
            println!(
                "required fans: {required}  unbounded end: {}",
                yes_no(report.unbounded_ok)
            );
            println!("consistent: {}", yes_no(ok));
        }
        Format::Json => emit_json(&to_value(&report)),
        _ => unreachable!(),
    }
    Ok(if ok { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// Verify battery
// ---------------------------------------------------------------------------

struct Battery {
    failures: u32,
}

impl Battery {
    fn check(&mut self, name: &str, ok: bool, detail: &str) {
        let verdict = if ok { "ok" } else { "FAIL" };
        if detail.is_empty() {
            println!("{name}: {verdict}");
        } else {
            println!("{name}: {verdict} ({detail})");
        }
        if !ok {
            self.failures += 1;
        }
    }
}

fn coprime_slopes(max_den: u64) -> Vec<Slope> {
    let mut out = Vec::new();
    for p in 2..=max_den {
        for q in 1..p {
            if num_integer::gcd(q, p) == 1 {
                out.push(Slope::new_int(q as i64, p as i64).expect("coprime pair"));
            }
        }
    }
    out
}

fn verify_words(b: &mut Battery) -> Result<()> {
    let goldens = [
        ("2/5", "a b a b' a' b a b a' b'"),
        ("1/2", "a b a' b'"),
        ("1/3", "a b a b' a' b'"),
        ("1/4", "a b a b a' b' a' b'"),
        ("3/8", "a b a b' a' b' a b a' b' a' b a b a' b'"),
    ];
    let mut bad = 0;
    for (rs, expect) in goldens {
        let r: Slope = rs.parse()?;
        if u_word(&r)?.to_string() != expect {
            bad += 1;
        }
    }
    for r in coprime_slopes(12) {
        let (_, p) = r.qp_u64()?;
        let u = u_word(&r)?;
        if u.len() as u64 != 2 * p {
            bad += 1;
        }
        let letters = u.letters();
        let freely_reduced = crate::words::free_reduce(&u).len() == u.len();
        let cyclically_reduced = letters[0] != letters[u.len() - 1].inverse();
        if !freely_reduced || !cyclically_reduced {
            bad += 1;
        }
    }
    b.check("relator-words", bad == 0, &format!("{bad} mismatches"));
    Ok(())
}

fn verify_sequences(b: &mut Battery, max_den: u64) -> Result<()> {
    let bound = max_den.clamp(2, 300);
    let mut bad = 0;
    let mut n = 0u64;
    for r in coprime_slopes(bound) {
        n += 1;
        if !sseq::check_prop_sequence(&r)?.ok() {
            bad += 1;
        }
    }
    b.check("run-sequences", bad == 0, &format!("{n} slopes, {bad} failures"));
    Ok(())
}

fn verify_connections(b: &mut Battery, max_den: u64) -> Result<()> {
    let bound = max_den.clamp(2, 40);
    let mut bad = 0;
    let mut n = 0u64;
    for r in coprime_slopes(bound) {
        let (q, p) = r.qp_u64()?;
        if 2 * q > p {
            continue;
        }
        let fus = fusion_intervals(&r)?;
        let mut slopes = enumerate_interval(&fus.i1, bound)?;
        slopes.extend(enumerate_interval(&fus.i2, bound)?);
        slopes.sort();
        slopes.dedup();
        for s in slopes {
            n += 1;
            if !sseq::check_prop_connection(&r, &s)?.consistent {
                bad += 1;
            }
        }
    }
    b.check("interval-connections", bad == 0, &format!("{n} pairs, {bad} failures"));
    Ok(())
}

fn verify_pieces(b: &mut Battery, max_den: u64) -> Result<()> {
    let bound = max_den.clamp(2, 16);
    let mut bad = 0;
    let mut n = 0u64;
    for r in coprime_slopes(bound) {
        n += 1;
        if !smallcancel::piece_audit(&r)?.ok() {
            bad += 1;
        }
    }
    b.check("piece-audits", bad == 0, &format!("{n} slopes, {bad} failures"));
    Ok(())
}

fn verify_small_cancellation(b: &mut Battery, max_den: u64) -> Result<()> {
    let bound = max_den.clamp(2, 24);
    let mut bad = 0;
    let mut n = 0u64;
    for r in coprime_slopes(bound) {
        n += 1;
        if !smallcancel::verify_c4(&r)?.ok || !smallcancel::verify_t4(&r)?.ok {
            bad += 1;
        }
    }
    b.check("c4-t4", bad == 0, &format!("{n} slopes, {bad} failures"));
    Ok(())
}

fn verify_orbit(b: &mut Battery, max_den: u64) -> Result<()> {
    let r_bound = max_den.clamp(2, 12);
    let s_bound = max_den.clamp(2, 16);
    let mut bad = 0;
    let mut n = 0u64;
    for r in coprime_slopes(r_bound) {
        let (q, p) = r.qp_u64()?;
        if q == 1 || q + 1 == p {
            continue;
        }
        let fus = fusion_intervals(&r)?;
        let mut samples = vec![Slope::infinity(), Slope::zero(), Slope::one(), r.clone()];
        samples.extend(coprime_slopes(s_bound));
        for s in samples {
            n += 1;
            let (nf, _) = orbit_normalize(&r, &s)?;
            let member = nf.is_infinite() || nf == r || fus.in_union(&nf);
            let (nf2, _) = orbit_normalize(&r, &nf)?;
            if !member || nf2 != nf || !orbit_equivalent(&r, &s, &nf)? {
                bad += 1;
            }
        }
    }
    b.check("orbit-normalize", bad == 0, &format!("{n} pairs, {bad} failures"));
    Ok(())
}

fn verify_classical(b: &mut Battery, cfg: &RunConfig) -> Result<()> {
    let three = Complex64::new(3.0, 0.0);
    let md = cfg.max_den.clamp(16, 200);
    let report = riley::classical_mcshane_check(three, three, three, cfg.prune_eps, md)?;
    b.check(
        "classical-333",
        report.error() <= cfg.identity_tol,
        &format!("|error| = {:.3e} at max_den {md}", report.error()),
    );

    let (a, bm) = riley::modular_torus_matrices();
    let pairs = riley::torus_trace_pairs(three, three, three, 20);
    let mut worst = 0.0f64;
    for ((num, den), t) in &pairs {
        let s = Slope::new_int(*num, *den)?;
        let tm = riley::torus_trace_from_matrices(&s, &a, &bm)?;
        worst = worst.max((t - tm).norm());
    }
    b.check(
        "classical-recursion",
        worst <= 1e-9,
        &format!("{} slopes, max deviation {worst:.3e}", pairs.len()),
    );
    Ok(())
}

fn verify_boundary_series(b: &mut Battery, cfg: &RunConfig) -> Result<()> {
    let r: Slope = "3/8".parse()?;
    let rep = riley::geometric_representation(&r)?;
    let ladder = riley::mcshane_doubling(&rep, cfg.prune_eps, 16, 3)?;
    let mut diffs: Vec<f64> = ladder
        .windows(2)
        .map(|w| (w[0].partial_sum - w[1].partial_sum).norm())
        .collect();
    diffs.retain(|d| *d > 0.0);
    let monotone = diffs.windows(2).all(|w| w[1] < w[0]);
    let last = ladder.last().expect("nonempty ladder");
    let ok = monotone && last.error() <= cfg.identity_tol;
    b.check(
        "boundary-identity",
        ok,
        &format!("final |error| = {:.3e} at max_den {}", last.error(), last.max_den),
    );

    let modulus = riley::cusp_modulus(&rep, cfg.prune_eps, 128)?;
    let expect = Complex64::new(0.0, 2.0);
    let dev = (modulus.lambda - expect).norm();
    b.check(
        "cusp-modulus",
        dev <= 1e-6 && modulus.parity == "even",
        &format!("|lambda - 2i| = {dev:.3e}"),
    );
    Ok(())
}

fn cmd_verify(cfg: &RunConfig, fmt: Format) -> Result<i32> {
    require_format(fmt, &[Format::Text], "verify")?;
    let mut b = Battery { failures: 0 };
    verify_words(&mut b)?;
    verify_sequences(&mut b, cfg.max_den)?;
    verify_connections(&mut b, cfg.max_den)?;
    verify_pieces(&mut b, cfg.max_den)?;
    verify_small_cancellation(&mut b, cfg.max_den)?;
    verify_orbit(&mut b, cfg.max_den)?;
    verify_classical(&mut b, cfg)?;
    verify_boundary_series(&mut b, cfg)?;
    if b.failures == 0 {
        println!("all suites passed");
        Ok(0)
    } else {
        println!("{} suite(s) failed", b.failures);
        Ok(1)
    }
}
