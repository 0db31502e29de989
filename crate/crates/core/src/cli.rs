//! Command-line front end.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::bound::compute_constants_with;
use crate::config::Settings;
use crate::error::{Error, Result};
use crate::io::{read_mtx, write_mtx};
use crate::perturb::{bek_bound, matching_distance, MatchingMode};
use crate::poly::{coeffs_from_roots_with, find_roots_with, ComplexValue, MonicRealPoly};
use crate::realize::{certify, search_min_feasible_with, verify, Verdict, K_VERIFY};
use crate::report::{self, int, num, obj};
use crate::spectrum::{check_hypotheses_with, validate_with, SpectrumList};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;

/// Dense matrices up to this size are embedded in the realize report.
const INLINE_MATRIX_MAX: usize = 16;

#[derive(Parser, Debug)]
#[command(name = "niep", version, about = "Nonnegative realization of spectra padded with zeros")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Comma-separated list, e.g. "1.1, 0.95+0.31i, 0.95-0.31i".
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub spectrum: Option<String>,
    /// File with one entry per line; `#` starts a comment.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Starting mantissa width: 53, or 64..=1024.
    #[arg(long, global = true, env = "BH_PRECISION_BITS", default_value_t = 53)]
    pub precision_bits: u32,
    /// Conjugate-pairing tolerance (default 1e-9)
    #[arg(long, global = true)]
    pub tau_conj: Option<f64>,
    /// Power-sum sign band (default 1e-12)
    #[arg(long, global = true)]
    pub tau_sign: Option<f64>,
    /// Feasibility sign band (default 1e-12)
    #[arg(long, global = true)]
    pub tau_feas: Option<f64>,
    /// Root residual tolerance (default 1e-12)
    #[arg(long, global = true)]
    pub tau_root: Option<f64>,
    /// Add wall-clock time to the report (makes output run-dependent).
    #[arg(long, global = true)]
    pub timing: bool,
    /// Progress notes on stderr; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Perron dominance, power-sum positivity and the JLL diagnostic.
    Check,
    /// Constants of the explicit dimension bound.
    Bound,
    /// Feasibility at one dimension, with verification and export.
    Realize {
        #[arg(long)]
        dim: usize,
        /// Matrix Market output path.
        #[arg(long)]
        export: Option<PathBuf>,
        /// Include x_k and the rescaled sequence in the report.
        #[arg(long)]
        sequences: bool,
    },
    /// Scan dimensions n..=max for the first feasible one.
    Search {
        #[arg(long)]
        max: usize,
    },
    /// Check an exported matrix against the spectrum.
    Verify {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = K_VERIFY)]
        k_verify: usize,
    },
    /// Root perturbation bounds for two coefficient lists p_1..p_n.
    Bek {
        /// Coefficients of f, comma-separated
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        /// Coefficients of g, same degree as f
        #[arg(long, allow_hyphen_values = true)]
        g: String,
    },
    /// First feasible dimension across a one-parameter family.
    Sweep {
        #[arg(long, value_enum)]
        family: Family,
        /// First parameter value
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        /// Last parameter value
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        /// Number of evenly spaced members, endpoints included
        #[arg(long, default_value_t = 11)]
        steps: usize,
        /// Largest dimension scanned per member.
        #[arg(long, default_value_t = 256)]
        max: usize,
        /// Angle of the conjugate pair in the disk family.
        #[arg(long, default_value_t = std::f64::consts::PI / 10.0)]
        theta: f64,
        /// Modulus of the repeated negative entry in the real2 family.
        #[arg(long, default_value_t = 0.6)]
        partner: f64,
        /// CSV instead of JSON.
        #[arg(long)]
        csv: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// (ρ, e^{iθ}, e^{-iθ}), parameter ρ.
    Disk,
    /// (1, t, -u, -u), parameter t.
    Real2,
}

impl Family {
    pub fn member(self, param: f64, theta: f64, partner: f64) -> Vec<ComplexValue> {
        match self {
            Family::Disk => vec![
                ComplexValue::new(param, 0.0),
                ComplexValue::from_polar(1.0, theta),
                ComplexValue::from_polar(1.0, -theta),
            ],
            Family::Real2 => vec![
                ComplexValue::new(1.0, 0.0),
                ComplexValue::new(param, 0.0),
                ComplexValue::new(-partner, 0.0),
                ComplexValue::new(-partner, 0.0),
            ],
        }
    }
}

/// Settings, scan limits, output paths and verbosity for one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub settings: Settings,
    pub n_max_scan: Option<usize>,
    pub export: Option<PathBuf>,
    pub timing: bool,
    pub verbosity: u8,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<RunConfig> {
        let mut s = Settings::default().with_bits(cli.common.precision_bits);
        let c = &cli.common;
        if let Some(v) = c.tau_conj {
            s.tau_conj = v;
        }
        if let Some(v) = c.tau_sign {
            s.tau_sign = v;
        }
        if let Some(v) = c.tau_feas {
            s.tau_feas = v;
        }
        if let Some(v) = c.tau_root {
            s.tau_root = v;
        }
        s.validate()?;
        let (n_max_scan, export) = match &cli.command {
            Command::Search { max } => (Some(*max), None),
            Command::Sweep { max, .. } => (Some(*max), None),
            Command::Realize { export, .. } => (None, export.clone()),
            _ => (None, None),
        };
        Ok(RunConfig {
            settings: s,
            n_max_scan,
            export,
            timing: c.timing,
            verbosity: c.verbose,
        })
    }
}

/// What a run prints and how it exits.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn parse_error(pos: usize, msg: impl Into<String>) -> Error {
    Error::ParseError {
        pos,
        msg: msg.into(),
    }
}

struct Scanner<'a> {
    text: &'a [u8],
    pos: usize,
    offset: usize,
}

impl<'a> Scanner<'a> {
    fn peek(&self) -> Option<u8> {
        self.text.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    /// 1-based column in the original text.
    fn col(&self) -> usize {
        self.offset + self.pos + 1
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        self.pos - start
    }

    /// An unsigned decimal or scientific literal.
    fn unsigned(&mut self) -> Result<Option<f64>> {
        let start = self.pos;
        let mut mantissa = self.digits();
        if self.peek() == Some(b'.') {
            self.pos += 1;
            mantissa += self.digits();
        }
        if mantissa == 0 {
            self.pos = start;
            return Ok(None);
        }
        if matches!(self.peek(), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.digits() == 0 {
                self.pos = mark;
                return Err(parse_error(self.col(), "malformed exponent"));
            }
        }
        let s = std::str::from_utf8(&self.text[start..self.pos]).expect("ascii");
        s.parse::<f64>()
            .map(Some)
            .map_err(|_| parse_error(self.offset + start + 1, format!("bad number '{s}'")))
    }

    fn sign(&mut self) -> f64 {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1.0
            }
            Some(b'+') => {
                self.pos += 1;
                1.0
            }
            _ => 1.0,
        }
    }

    /// `a`, `bi`, `i`, `a+bi`, `a-bi`, `a+i`.
    fn item(&mut self) -> Result<ComplexValue> {
        self.skip_ws();
        let col = self.col();
        let s = self.sign();
        self.skip_ws();
        let first = self.unsigned()?;
        if self.peek() == Some(b'i') {
            self.pos += 1;
            return Ok(ComplexValue::new(0.0, s * first.unwrap_or(1.0)));
        }
        let re = s * first.ok_or_else(|| parse_error(col, "expected a number"))?;
        self.skip_ws();
        if matches!(self.peek(), Some(b'+' | b'-')) {
            let s2 = self.sign();
            self.skip_ws();
            let im = self.unsigned()?.unwrap_or(1.0);
            if self.peek() != Some(b'i') {
                return Err(parse_error(self.col(), "expected 'i' after the imaginary part"));
            }
            self.pos += 1;
            return Ok(ComplexValue::new(re, s2 * im));
        }
        Ok(ComplexValue::new(re, 0.0))
    }

    fn list(&mut self) -> Result<Vec<ComplexValue>> {
        let mut out = Vec::new();
        loop {
            out.push(self.item()?);
            self.skip_ws();
            match self.peek() {
                None => return Ok(out),
                Some(b',') => self.pos += 1,
                Some(c) => {
                    return Err(parse_error(
                        self.col(),
                        format!("unexpected '{}'", c as char),
                    ))
                }
            }
        }
    }
}

/// Parses a comma-separated list of entries. Error positions are 1-based
/// columns.
pub fn parse_entries(text: &str) -> Result<Vec<ComplexValue>> {
    parse_entries_at(text, 0)
}

fn parse_entries_at(text: &str, offset: usize) -> Result<Vec<ComplexValue>> {
    if let Some(p) = text.find(|c: char| !c.is_ascii()) {
        return Err(parse_error(offset + p + 1, "non-ASCII character"));
    }
    if text.trim().is_empty() {
        return Err(parse_error(offset + 1, "empty list"));
    }
    Scanner {
        text: text.as_bytes(),
        pos: 0,
        offset,
    }
    .list()
}

/// Parses and validates a spectrum.
pub fn parse_spectrum(text: &str) -> Result<SpectrumList> {
    crate::spectrum::validate(&parse_entries(text)?)
}

/// One entry per line, blank lines and `#` comments ignored. Error positions
/// are byte offsets into the file, 1-based.
pub fn parse_spectrum_file(text: &str) -> Result<Vec<ComplexValue>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let body = line.split('#').next().unwrap_or("");
        if !body.trim().is_empty() {
            out.extend(parse_entries_at(body.trim_end_matches(['\n', '\r']), offset)?);
        }
        offset += line.len();
    }
    if out.is_empty() {
        return Err(parse_error(1, "no entries in file"));
    }
    Ok(out)
}

/// Parses a coefficient list `p_1, ..., p_n`.
pub fn parse_coeffs(text: &str) -> Result<MonicRealPoly> {
    let entries = parse_entries(text)?;
    let mut c = Vec::with_capacity(entries.len());
    for (i, z) in entries.iter().enumerate() {
        if z.im != 0.0 {
            return Err(Error::InvalidArgument(format!(
                "coefficient {} must be real",
                i + 1
            )));
        }
        c.push(z.re);
    }
    MonicRealPoly::new(c)
}

fn load_spectrum(common: &Common, settings: &Settings) -> Result<SpectrumList> {
    let entries = match (&common.spectrum, &common.input) {
        (Some(s), None) => parse_entries(s)?,
        (None, Some(p)) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::InvalidArgument(format!("{}: {e}", p.display())))?;
            parse_spectrum_file(&text)?
        }
        (Some(_), Some(_)) => {
            return Err(Error::InvalidArgument(
                "give either --spectrum or --input, not both".into(),
            ))
        }
        (None, None) => {
            return Err(Error::InvalidArgument(
                "a spectrum is required (--spectrum or --input)".into(),
            ))
        }
    };
    validate_with(&entries, settings)
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::ConjugateClosureViolation { .. } => "conjugate_closure_violation",
        Error::OverflowAtIndex(_) => "overflow",
        Error::NoConvergence { .. } => "no_convergence",
        Error::NoPerronElement => "no_perron_element",
        Error::StrictDominanceRequired => "strict_dominance_required",
        Error::HypothesesNotSatisfied => "hypotheses_not_satisfied",
        Error::NeedsTwoEntries(_) => "needs_two_entries",
        Error::DimensionTooSmall { .. } => "dimension_too_small",
        Error::NegativeEntry { .. } => "negative_entry",
        Error::VerificationFailed { .. } => "verification_failed",
        Error::DegreeMismatch(..) => "degree_mismatch",
        Error::LengthMismatch(..) => "length_mismatch",
        Error::TooLargeForExhaustive(_) => "too_large_for_exhaustive",
        Error::ParseError { .. } => "parse_error",
        Error::InvalidArgument(_) => "invalid_argument",
    }
}

fn error_value(e: &Error) -> Value {
    obj([
        ("kind", Value::String(error_kind(e).into())),
        ("message", Value::String(e.to_string())),
    ])
}

fn input_error(e: &Error) -> Outcome {
    Outcome {
        code: EXIT_INPUT,
        stdout: report::render(&obj([("error", error_value(e))])),
        stderr: format!("error: {e}\n"),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    run_cli(&cli)
}

pub fn run_cli(cli: &Cli) -> Outcome {
    let config = match RunConfig::from_cli(cli) {
        Ok(c) => c,
        Err(e) => return input_error(&e),
    };
    let start = Instant::now();
    let mut notes = String::new();
    let result = dispatch(cli, &config, &mut notes);
    match result {
        Ok((code, mut value)) => {
            if config.timing {
                if let Some(m) = value.as_object_mut() {
                    m.insert(
                        "timing_ms".into(),
                        num(start.elapsed().as_secs_f64() * 1e3),
                    );
                }
            }
            let stdout = match value {
                Value::String(s) => s,
                v => report::render(&v),
            };
            Outcome {
                code,
                stdout,
                stderr: notes,
            }
        }
        Err(e) => {
            let mut out = input_error(&e);
            out.stderr = notes + &out.stderr;
            out
        }
    }
}

fn note(config: &RunConfig, notes: &mut String, msg: impl AsRef<str>) {
    if config.verbosity > 0 {
        notes.push_str(msg.as_ref());
        notes.push('\n');
    }
}

fn hypothesis_code(h: &crate::spectrum::HypothesisReport) -> i32 {
    if h.passed() {
        EXIT_OK
    } else if h.indeterminate && h.perron_ok && h.s1_ok && h.first_failure.is_none() {
        EXIT_INDETERMINATE
    } else {
        EXIT_FAILED
    }
}

fn dispatch(cli: &Cli, config: &RunConfig, notes: &mut String) -> Result<(i32, Value)> {
    let settings = &config.settings;
    match &cli.command {
        Command::Bek { f, g } => {
            let f = parse_coeffs(f)?;
            let g = parse_coeffs(g)?;
            let b = bek_bound(&f, &g)?;
            let rf = find_roots_with(&f, settings.tau_root)?;
            let rg = find_roots_with(&g, settings.tau_root)?;
            let bottleneck = matching_distance(&rf, &rg, MatchingMode::Bottleneck)?;
            let exhaustive = if rf.len() <= 8 {
                num(matching_distance(&rf, &rg, MatchingMode::Exhaustive)?)
            } else {
                Value::Null
            };
            Ok((
                EXIT_OK,
                obj([
                    ("command", Value::String("bek".into())),
                    ("bounds", report::perturb(&b)),
                    (
                        "matching_distance",
                        obj([("bottleneck", num(bottleneck)), ("exhaustive", exhaustive)]),
                    ),
                    (
                        "roots_f",
                        Value::Array(rf.iter().map(|z| report::complex(*z)).collect()),
                    ),
                    (
                        "roots_g",
                        Value::Array(rg.iter().map(|z| report::complex(*z)).collect()),
                    ),
                ]),
            ))
        }
        Command::Sweep {
            family,
            from,
            to,
            steps,
            max,
            theta,
            partner,
            csv,
        } => sweep(*family, *from, *to, *steps, *max, *theta, *partner, *csv, config, notes),
        _ => {
            let sigma = load_spectrum(&cli.common, settings)?;
            note(config, notes, format!("spectrum of length {}", sigma.len()));
            with_spectrum(cli, config, &sigma, notes)
        }
    }
}

fn with_spectrum(
    cli: &Cli,
    config: &RunConfig,
    sigma: &SpectrumList,
    notes: &mut String,
) -> Result<(i32, Value)> {
    let settings = &config.settings;
    let hyp = check_hypotheses_with(sigma, settings);
    let base = |name: &str| -> Vec<(&'static str, Value)> {
        vec![
            ("command", Value::String(name.into())),
            ("spectrum", report::spectrum(sigma)),
            ("hypotheses", report::hypotheses(&hyp)),
        ]
    };
    let finish = |pairs: Vec<(&'static str, Value)>| {
        let mut m = serde_json::Map::new();
        for (k, v) in pairs {
            m.insert(k.into(), v);
        }
        Value::Object(m)
    };

    match &cli.command {
        Command::Check => Ok((hypothesis_code(&hyp), finish(base("check")))),
        Command::Bound => {
            let mut pairs = base("bound");
            if sigma.len() == 1 {
                let ok = sigma.perron() > 0.0;
                pairs.push(("constants", Value::Null));
                pairs.push(("N_bound", if ok { int(1) } else { Value::Null }));
                let code = if ok { EXIT_OK } else { EXIT_FAILED };
                return Ok((code, finish(pairs)));
            }
            let f = coeffs_from_roots_with(sigma.entries(), settings.tau_conj)?;
            match compute_constants_with(sigma, &f, settings) {
                Ok(c) => {
                    pairs.push(("constants", report::constants(&c)));
                    Ok((EXIT_OK, finish(pairs)))
                }
                Err(e @ (Error::HypothesesNotSatisfied | Error::StrictDominanceRequired)) => {
                    pairs.push(("constants", Value::Null));
                    pairs.push(("error", error_value(&e)));
                    let code = match hypothesis_code(&hyp) {
                        EXIT_OK => EXIT_FAILED,
                        c => c,
                    };
                    Ok((code, finish(pairs)))
                }
                Err(e) => Err(e),
            }
        }
        Command::Realize { dim, sequences, .. } => {
            let mut pairs = base("realize");
            note(config, notes, format!("checking dimension {dim}"));
            let (rep, cert) = match certify(sigma, *dim, settings) {
                Ok(v) => v,
                Err(e @ Error::VerificationFailed { .. }) => {
                    pairs.push(("error", error_value(&e)));
                    return Ok((EXIT_FAILED, finish(pairs)));
                }
                Err(e) => return Err(e),
            };
            pairs.push(("feasibility", report::feasibility(&rep, *sequences)));
            let code = match rep.verdict() {
                Verdict::Feasible => EXIT_OK,
                Verdict::Infeasible => EXIT_FAILED,
                Verdict::Indeterminate => EXIT_INDETERMINATE,
            };
            if let Some((x, cert)) = cert {
                pairs.push(("verification", report::verification(&cert.verification)));
                if x.dim() <= INLINE_MATRIX_MAX {
                    let rows = (1..=x.dim())
                        .map(|i| Value::Array((1..=x.dim()).map(|j| num(x.get(i, j))).collect()))
                        .collect();
                    pairs.push(("matrix", Value::Array(rows)));
                }
                if let Some(path) = &config.export {
                    let file = File::create(path)
                        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
                    write_mtx(&x, BufWriter::new(file))
                        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
                    note(config, notes, format!("wrote {}", path.display()));
                    pairs.push(("export", Value::String(path.display().to_string())));
                }
            }
            Ok((code, finish(pairs)))
        }
        Command::Search { max } => {
            let mut pairs = base("search");
            note(config, notes, format!("scanning {}..={max}", sigma.len()));
            let s = search_min_feasible_with(sigma, *max, settings)?;
            let code = if s.first_feasible.is_some() {
                EXIT_OK
            } else if s.profile.iter().any(|(_, v)| *v == Verdict::Indeterminate) {
                EXIT_INDETERMINATE
            } else {
                EXIT_FAILED
            };
            pairs.push(("search", report::search(&s)));
            Ok((code, finish(pairs)))
        }
        Command::Verify { matrix, k_verify } => {
            let mut pairs = base("verify");
            let file = File::open(matrix)
                .map_err(|e| Error::InvalidArgument(format!("{}: {e}", matrix.display())))?;
            let x = read_mtx(BufReader::new(file))?;
            let nonnegative = x.x().iter().all(|v| *v >= 0.0);
            pairs.push(("matrix_dim", int(x.dim() as u64)));
            pairs.push(("nonnegative", Value::Bool(nonnegative)));
            match verify(sigma, &x, *k_verify) {
                Ok(v) => {
                    pairs.push(("verification", report::verification(&v)));
                    let code = if nonnegative { EXIT_OK } else { EXIT_FAILED };
                    Ok((code, finish(pairs)))
                }
                Err(e @ Error::VerificationFailed { .. }) => {
                    pairs.push(("error", error_value(&e)));
                    Ok((EXIT_FAILED, finish(pairs)))
                }
                Err(e) => Err(e),
            }
        }
        Command::Bek { .. } | Command::Sweep { .. } => unreachable!("handled without a spectrum"),
    }
}

pub const SWEEP_HEADER: &str = "param,first_feasible_N,log10_paper_bound,min_margin";

#[allow(clippy::too_many_arguments)]
fn sweep(
    family: Family,
    from: f64,
    to: f64,
    steps: usize,
    max: usize,
    theta: f64,
    partner: f64,
    csv: bool,
    config: &RunConfig,
    notes: &mut String,
) -> Result<(i32, Value)> {
    if steps == 0 || !from.is_finite() || !to.is_finite() {
        return Err(Error::InvalidArgument(
            "sweep needs finite --from/--to and --steps >= 1".into(),
        ));
    }
    let settings = &config.settings;
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let param = if steps == 1 {
            from
        } else {
            from + (to - from) * i as f64 / (steps - 1) as f64
        };
        note(config, notes, format!("member {param}"));
        let mut first = None;
        let mut log10 = None;
        let mut margin = None;
        if let Ok(sigma) = validate_with(&family.member(param, theta, partner), settings) {
            if check_hypotheses_with(&sigma, settings).passed() {
                let f = coeffs_from_roots_with(sigma.entries(), settings.tau_conj)?;
                log10 = compute_constants_with(&sigma, &f, settings)
                    .ok()
                    .map(|c| c.log10_n_bound);
                let s = search_min_feasible_with(&sigma, max, settings)?;
                if let Some(n) = s.first_feasible {
                    first = Some(n);
                    margin = Some(
                        crate::realize::check_feasible_with(&sigma, n, settings)?.min_margin,
                    );
                }
            }
        }
        rows.push((param, first, log10, margin));
    }

    if csv {
        let cell = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:.16e}"));
        let mut out = String::from(SWEEP_HEADER);
        out.push('\n');
        for (p, n, l, m) in &rows {
            out.push_str(&format!(
                "{:.16e},{},{},{}\n",
                p,
                n.map_or(String::new(), |n| n.to_string()),
                cell(*l),
                cell(*m)
            ));
        }
        return Ok((EXIT_OK, Value::String(out)));
    }
    let opt = |v: Option<f64>| v.map_or(Value::Null, num);
    Ok((
        EXIT_OK,
        obj([
            ("command", Value::String("sweep".into())),
            (
                "family",
                Value::String(
                    match family {
                        Family::Disk => "disk",
                        Family::Real2 => "real2",
                    }
                    .into(),
                ),
            ),
            (
                "rows",
                Value::Array(
                    rows.iter()
                        .map(|(p, n, l, m)| {
                            obj([
                                ("param", num(*p)),
                                ("first_feasible_N", report::opt_int(*n)),
                                ("log10_paper_bound", opt(*l)),
                                ("min_margin", opt(*m)),
                            ])
                        })
                        .collect(),
                ),
            ),
        ]),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(re, im)
    }

    #[test]
    fn parse_examples() {
        let s = parse_spectrum("2, -1").unwrap();
        assert_eq!(s.entries(), &[c(2.0, 0.0), c(-1.0, 0.0)]);

        let s = parse_spectrum("1.1, 0.9510565+0.3090170i, 0.9510565-0.3090170i").unwrap();
        let t = std::f64::consts::PI / 10.0;
        assert_eq!(s.perron(), 1.1);
        assert!((s.entries()[1] - ComplexValue::from_polar(1.0, t)).norm() < 1e-7);
        assert_eq!(s.entries()[2], s.entries()[1].conj());

        assert!(matches!(
            parse_spectrum("1.1, 1i"),
            Err(Error::ConjugateClosureViolation { .. })
        ));
    }

    #[test]
    fn parse_grammar() {
        let v = parse_entries(" 1e-3 ,-2.5E+1, 3i, -i, 4 - 2i, .5+i ").unwrap();
        assert_eq!(
            v,
            vec![
                c(1e-3, 0.0),
                c(-25.0, 0.0),
                c(0.0, 3.0),
                c(0.0, -1.0),
                c(4.0, -2.0),
                c(0.5, 1.0)
            ]
        );
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert_eq!(
            parse_entries("1, x").unwrap_err(),
            Error::ParseError {
                pos: 4,
                msg: "expected a number".into()
            }
        );
        assert!(matches!(
            parse_entries("1, 2 3"),
            Err(Error::ParseError { pos: 6, .. })
        ));
        assert!(matches!(
            parse_entries("1e"),
            Err(Error::ParseError { pos: 2, .. })
        ));
        assert!(matches!(
            parse_entries("1+2"),
            Err(Error::ParseError { pos: 4, .. })
        ));
        assert!(matches!(parse_entries(""), Err(Error::ParseError { .. })));
        assert!(matches!(parse_entries("1,"), Err(Error::ParseError { pos: 3, .. })));
    }

    #[test]
    fn file_grammar() {
        let v = parse_spectrum_file("# disk\n1.1\n0.5+0.5i # pair\n\n0.5-0.5i\n").unwrap();
        assert_eq!(v, vec![c(1.1, 0.0), c(0.5, 0.5), c(0.5, -0.5)]);
        assert!(matches!(
            parse_spectrum_file("1\n2 x\n"),
            Err(Error::ParseError { pos: 5, .. })
        ));
    }

    #[test]
    fn coefficient_lists() {
        assert_eq!(parse_coeffs("0, -1").unwrap().coeffs(), &[0.0, -1.0]);
        assert!(parse_coeffs("1i").is_err());
    }

    fn exit(args: &[&str]) -> Outcome {
        let mut v = vec!["niep"];
        v.extend_from_slice(args);
        run(v)
    }

    #[test]
    fn realize_two_by_two() {
        let o = exit(&["realize", "--spectrum", "2,-1", "--dim", "2"]);
        assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        let m: Vec<Vec<f64>> = v["matrix"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| {
                r.as_array()
                    .unwrap()
                    .iter()
                    .map(|x| x.as_f64().unwrap())
                    .collect()
            })
            .collect();
        assert_eq!(m, vec![vec![0.5, 1.0], vec![2.25, 0.5]]);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit(&["check", "--spectrum", "2,-1"]).code, EXIT_OK);
        assert_eq!(
            exit(&["check", "--spectrum", "1.05, 0.9510565+0.3090170i, 0.9510565-0.3090170i"]).code,
            EXIT_FAILED
        );
        assert_eq!(exit(&["check", "--spectrum", "1.1, 1i"]).code, EXIT_INPUT);
        assert_eq!(exit(&["check", "--spectrum", "1, x"]).code, EXIT_INPUT);
        assert_eq!(exit(&["check"]).code, EXIT_INPUT);
        assert_eq!(exit(&["frobnicate"]).code, EXIT_INPUT);
        assert_eq!(
            exit(&["check", "--spectrum", "2,-1", "--precision-bits", "60"]).code,
            EXIT_INPUT
        );
        assert_eq!(exit(&["realize", "--spectrum", "2,-1", "--dim", "1"]).code, EXIT_INPUT);
        assert_eq!(exit(&["--help"]).code, EXIT_OK);
    }

    #[test]
    fn bound_subcommand() {
        let o = exit(&["bound", "--spectrum", "1, -0.01"]);
        assert_eq!(o.code, EXIT_OK);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["constants"]["N_bound"].as_u64(), Some(44578));

        let o = exit(&["bound", "--spectrum", "1.1, 0.9510565+0.3090170i, 0.9510565-0.3090170i"]);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["constants"]["saturated"], Value::Bool(true));
        assert!(v["constants"]["N_bound"].is_null());

        let o = exit(&["bound", "--spectrum", "1, -1"]);
        assert_eq!(o.code, EXIT_FAILED);
        let o = exit(&["bound", "--spectrum", "4"]);
        assert_eq!(o.code, EXIT_OK);
    }

    #[test]
    fn bek_subcommand() {
        let o = exit(&["bek", "--f", "0, -1", "--g", "0, 0"]);
        assert_eq!(o.code, EXIT_OK);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert!((v["bounds"]["bound_ostrowski"].as_f64().unwrap() - 3.0).abs() < 1e-15);
        assert_eq!(v["matching_distance"]["bottleneck"].as_f64(), Some(1.0));
    }

    #[test]
    fn sweep_csv() {
        let o = exit(&[
            "sweep", "--family", "disk", "--from", "1.05", "--to", "1.5", "--steps", "2", "--max",
            "40", "--csv",
        ]);
        assert_eq!(o.code, EXIT_OK);
        let lines: Vec<&str> = o.stdout.lines().collect();
        assert_eq!(lines[0], SWEEP_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[1].ends_with(",,,"));
        let cells: Vec<&str> = lines[2].split(',').collect();
        assert!(!cells[1].is_empty() && !cells[2].is_empty());
    }

    #[test]
    fn env_precision() {
        let cli = Cli::try_parse_from(["niep", "check", "--spectrum", "2", "--precision-bits", "256"])
            .unwrap();
        assert_eq!(RunConfig::from_cli(&cli).unwrap().settings.start_bits, 256);
    }
}
