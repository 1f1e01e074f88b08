mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::Serialize;

use betathermo::digits::{
    beta_from_digits, expand_one, validate_admissible, AdmissibilityWarning, CertifiedReal, DigitSeq, Periodicity,
    ZeroRunSchedule,
};
use betathermo::gibbs::{
    classify, cylinder_estimate, k_envelope, make_witnesses, mme_oracle, weak_gibbs_defect, ClassifyOptions,
    CylinderEstimate, DefectOptions, DefectSource, Envelope, GibbsReport, Windowing, WitnessFamily,
};
use betathermo::language::{PrefixAutomaton, SuffixInfo, Walk, Word, ZbarProfile};
use betathermo::presets::Preset;
use betathermo::thermo::{pressure, PressureEstimate, PressureMode, Potential};
use output::{f, to_json, Table};

#[derive(Parser)]
#[command(name = "betathermo", version, about = "Beta-shift languages, pressure and weak-Gibbs diagnostics")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
struct Source {
    /// Digit-sequence file (`alphabet=<b>` line, digits, optional `period=<p>,<q>`).
    #[arg(long)]
    digits: Option<PathBuf>,
    /// Built-in β: golden, tribonacci, three-halves, doubling-zeros.
    #[arg(long, value_parser = parse_preset)]
    preset: Option<Preset>,
    /// β as an expression, e.g. `3/2` or `(1+sqrt 5)/2`.
    #[arg(long)]
    beta: Option<String>,
}

#[derive(Args, Clone)]
struct Input {
    #[command(flatten)]
    source: Source,
    /// Number of digits to compute or keep.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    depth: u64,
}

#[derive(Args, Clone)]
struct Thermo {
    #[command(flatten)]
    input: Input,
    /// Potential file (JSON); the zero potential when omitted.
    #[arg(long)]
    potential: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Digits of the quasi-greedy expansion of 1.
    Expand(Input),
    /// Check the shift condition on a digit sequence.
    Validate(Input),
    /// Words of the β-shift language.
    Lang {
        #[command(subcommand)]
        command: LangCommand,
    },
    /// Pressure estimates P_n = ln Ξ^n / (2n+1).
    Pressure {
        #[command(flatten)]
        thermo: Thermo,
        /// Largest n of the curve.
        #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u64).range(1..))]
        nmax: u64,
        /// full, loop or both.
        #[arg(long, default_value = "both", value_parser = parse_mode)]
        mode: PressureMode,
    },
    /// Cylinder probabilities, defects, envelopes and the classifier.
    Gibbs {
        #[command(subcommand)]
        command: GibbsCommand,
    },
}

#[derive(Subcommand)]
enum LangCommand {
    /// |L_n| for every length up to n.
    Count {
        #[command(flatten)]
        input: Input,
        /// Largest word length.
        #[arg(long, default_value_t = 12)]
        n: usize,
    },
    /// All words of length n in lexicographic order.
    Enum {
        #[command(flatten)]
        input: Input,
        /// Word length.
        #[arg(long)]
        n: usize,
    },
    /// Membership of a word.
    Member {
        #[command(flatten)]
        input: Input,
        /// Letters of the word, e.g. `1001`.
        #[arg(long)]
        word: String,
    },
    /// s(w), z(w), the hat word and the end state.
    Suffix {
        #[command(flatten)]
        input: Input,
        /// Letters of the word, e.g. `1001`.
        #[arg(long)]
        word: String,
    },
    /// The profile n ↦ z̄(n)/n.
    Zbar {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
}

#[derive(Args, Clone)]
struct Volume {
    /// Configurations live on [-n, n].
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// interior or literal.
    #[arg(long, default_value = "interior", value_parser = parse_windowing)]
    windowing: Windowing,
}

#[derive(Subcommand)]
enum GibbsCommand {
    /// ν̂_n of one cylinder, or of every cylinder of length m.
    Estimate {
        #[command(flatten)]
        thermo: Thermo,
        #[command(flatten)]
        volume: Volume,
        /// A single cylinder word.
        #[arg(long, conflicts_with = "m")]
        word: Option<String>,
        /// Estimate every cylinder of this length.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
    },
    /// Weak-Gibbs defects D_1, …, D_m.
    Defect {
        #[command(flatten)]
        thermo: Thermo,
        #[command(flatten)]
        volume: Volume,
        /// Cylinder length.
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        /// Volume of the pressure estimate behind ψ = φ − p̂.
        #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u64).range(1..))]
        nmax: u64,
        /// Use the exact measure of maximal entropy (periodic digits, constant φ).
        #[arg(long)]
        oracle: bool,
    },
    /// K⁻·G ≤ ν̂ ≤ K⁺·G for every cylinder of length ≤ m.
    Envelope {
        #[command(flatten)]
        thermo: Thermo,
        #[command(flatten)]
        volume: Volume,
        /// Cylinder length.
        #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        /// Volume of the pressure estimate.
        #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u64).range(1..))]
        nmax: u64,
        /// ε in the exponential slack of the constants.
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
    },
    /// WeakGibbs, NotWeakGibbs-evidence or Inconclusive, with the evidence.
    Classify {
        #[command(flatten)]
        thermo: Thermo,
        #[command(flatten)]
        volume: Volume,
        /// Largest cylinder length.
        #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        /// Volume of the pressure estimate.
        #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u64).range(1..))]
        nmax: u64,
        /// Length of the z̄ profile.
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        zbar: u64,
    },
    /// Witness words w = c_1⋯c_m at the records of z̄.
    Witness {
        #[command(flatten)]
        input: Input,
        /// Largest witness length.
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
    },
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse().map_err(|e: betathermo::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<PressureMode, String> {
    s.parse().map_err(|e: betathermo::Error| e.to_string())
}

fn parse_windowing(s: &str) -> Result<Windowing, String> {
    s.parse().map_err(|e: betathermo::Error| e.to_string())
}

enum Failure {
    Usage(String),
    Domain(betathermo::Error),
}

impl From<betathermo::Error> for Failure {
    fn from(e: betathermo::Error) -> Self {
        Failure::Domain(e)
    }
}

type Run<T> = Result<T, Failure>;

/// A report in all three renderings.
struct Report {
    json: String,
    table: Table,
    text: String,
}

impl Report {
    fn new<T: Serialize>(value: &T, table: Table, text: String) -> Self {
        Report {
            json: to_json(value),
            table,
            text,
        }
    }

    fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.json.clone(),
            Format::Csv => self.table.to_csv(),
            Format::Text => {
                let mut t = self.text.clone();
                if !t.ends_with('\n') {
                    t.push('\n');
                }
                t
            }
        }
    }
}

struct Loaded {
    digits: DigitSeq,
    beta: Option<f64>,
    label: String,
}

/// Like `load_raw`, but user-supplied digits must also pass the shift condition.
fn load(input: &Input, need: usize) -> Run<Loaded> {
    let l = load_raw(input, need)?;
    if input.source.digits.is_some() {
        if let Some(v) = validate_admissible(&l.digits)?.violation {
            return Err(betathermo::Error::MalformedDigits(format!(
                "not admissible: the shift by {} exceeds the sequence at position {}",
                v.shift, v.position
            ))
            .into());
        }
    }
    Ok(l)
}

fn load_raw(input: &Input, need: usize) -> Run<Loaded> {
    let depth = (input.depth as usize).max(need);
    let src = &input.source;
    if let Some(path) = &src.digits {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        let mut digits = DigitSeq::parse_file(&text)?;
        if digits.is_extendable() && digits.depth() < depth {
            digits = digits.extended(depth)?;
        }
        let beta = beta_from_digits(&digits, 1e-12).ok().map(|b| b.midpoint_f64());
        return Ok(Loaded {
            digits,
            beta,
            label: path.display().to_string(),
        });
    }
    if let Some(p) = src.preset {
        return Ok(Loaded {
            digits: p.digits(depth)?,
            beta: Some(p.beta()?.midpoint_f64()),
            label: p.name().to_string(),
        });
    }
    let expr = src.beta.as_deref().ok_or_else(|| Failure::Usage("no digit source".into()))?;
    let beta = CertifiedReal::parse(expr)?;
    Ok(Loaded {
        digits: expand_one(&beta, depth)?,
        beta: Some(beta.midpoint_f64()),
        label: expr.to_string(),
    })
}

fn load_potential(thermo: &Thermo, digits: &DigitSeq) -> Run<Potential> {
    let phi = match &thermo.potential {
        None => Potential::zero(digits.alphabet()),
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
            Potential::from_json(&text)?
        }
    };
    betathermo::gibbs::check_alphabets(digits, &phi)?;
    Ok(phi)
}

fn parse_word(s: &str) -> Run<Word> {
    Ok(Word::parse(s)?)
}

fn vol(n: u64) -> usize {
    2 * n as usize + 1
}

#[derive(Serialize)]
struct ExpandReport {
    input: String,
    beta: Option<f64>,
    alphabet: u32,
    depth: usize,
    digits: Vec<u32>,
    periodicity: Option<Periodicity>,
    schedule: Option<ZeroRunSchedule>,
}

fn expand(input: &Input) -> Run<Report> {
    let l = load(input, 0)?;
    let depth = input.depth as usize;
    let digits: Vec<u32> = l.digits.digits().iter().take(depth).copied().collect();
    let mut table = Table::new(vec!["index", "digit"]);
    for (i, d) in digits.iter().enumerate() {
        table.push(vec![(i + 1).to_string(), d.to_string()]);
    }
    let sep = if l.digits.alphabet() > 10 { "," } else { "" };
    let text = digits.iter().map(u32::to_string).collect::<Vec<_>>().join(sep);
    let report = ExpandReport {
        input: l.label,
        beta: l.beta,
        alphabet: l.digits.alphabet(),
        depth: digits.len(),
        digits,
        periodicity: l.digits.periodicity(),
        schedule: l.digits.schedule(),
    };
    Ok(Report::new(&report, table, text))
}

#[derive(Serialize)]
struct ValidateReport {
    input: String,
    admissible: bool,
    checked_depth: usize,
    violation: Option<betathermo::digits::Violation>,
    warnings: Vec<AdmissibilityWarning>,
}

fn validate(input: &Input) -> Run<Report> {
    let l = load_raw(input, 0)?;
    let r = validate_admissible(&l.digits)?;
    let mut table = Table::new(vec!["admissible", "checked_depth", "shift", "position"]);
    table.push(vec![
        r.is_ok().to_string(),
        r.checked_depth.to_string(),
        r.violation.map(|v| v.shift.to_string()).unwrap_or_default(),
        r.violation.map(|v| v.position.to_string()).unwrap_or_default(),
    ]);
    let text = match r.violation {
        None => format!("admissible (checked {} digits)", r.checked_depth),
        Some(v) => format!("not admissible: shift {} exceeds at position {}", v.shift, v.position),
    };
    let report = ValidateReport {
        input: l.label,
        admissible: r.is_ok(),
        checked_depth: r.checked_depth,
        violation: r.violation,
        warnings: r.warnings,
    };
    Ok(Report::new(&report, table, text))
}

#[derive(Serialize)]
struct CountRow {
    n: usize,
    count: serde_json::Value,
    log_count_per_n: f64,
}

#[derive(Serialize)]
struct MemberReport {
    word: Word,
    in_language: bool,
    /// 1-based start of the first suffix that overtakes the prefix of c.
    rejected_at: Option<usize>,
    s: Option<Word>,
    z: Option<usize>,
    hat: Option<Word>,
    q: Option<usize>,
}

fn lang(cmd: &LangCommand) -> Run<Report> {
    match cmd {
        LangCommand::Count { input, n } => {
            let l = load(input, *n)?;
            let aut = PrefixAutomaton::build(&l.digits)?;
            let mut rows = Vec::with_capacity(*n);
            let mut table = Table::new(vec!["n", "count", "log_count_per_n"]);
            let mut text = String::new();
            for k in 1..=*n {
                let c = aut.count_words(k)?;
                let log = ln_biguint(&c) / k as f64;
                let count = match u64::try_from(&c) {
                    Ok(v) => serde_json::Value::from(v),
                    Err(_) => serde_json::Value::from(c.to_string()),
                };
                table.push(vec![k.to_string(), c.to_string(), f(log)]);
                text.push_str(&format!("{k}\t{c}\t{}\n", f(log)));
                rows.push(CountRow {
                    n: k,
                    count,
                    log_count_per_n: log,
                });
            }
            Ok(Report::new(&rows, table, text))
        }
        LangCommand::Enum { input, n } => {
            let l = load(input, *n)?;
            let aut = PrefixAutomaton::build(&l.digits)?;
            let words: Vec<Word> = aut.enumerate_words(*n)?.collect();
            let mut table = Table::new(vec!["word"]);
            let mut text = String::new();
            for w in &words {
                table.push(vec![w.to_string()]);
                text.push_str(&format!("{w}\n"));
            }
            Ok(Report::new(&words, table, text))
        }
        LangCommand::Member { input, word } => {
            let w = parse_word(word)?;
            let l = load(input, w.len())?;
            let aut = PrefixAutomaton::build(&l.digits)?;
            let report = match aut.walk(&w)? {
                Walk::Accepted { .. } => {
                    let info = aut.suffix_info(&w)?;
                    MemberReport {
                        word: w.clone(),
                        in_language: true,
                        rejected_at: None,
                        s: Some(info.s),
                        z: Some(info.z),
                        hat: Some(info.hat),
                        q: Some(info.q),
                    }
                }
                Walk::Rejected { position } => MemberReport {
                    word: w.clone(),
                    in_language: false,
                    rejected_at: Some(position),
                    s: None,
                    z: None,
                    hat: None,
                    q: None,
                },
            };
            let mut table = Table::new(vec!["word", "in_language", "rejected_at"]);
            table.push(vec![
                w.to_string(),
                report.in_language.to_string(),
                report.rejected_at.map(|p| p.to_string()).unwrap_or_default(),
            ]);
            let text = match report.rejected_at {
                None => format!("{w}: in language"),
                Some(p) => format!("{w}: not in language (suffix at position {p} too large)"),
            };
            Ok(Report::new(&report, table, text))
        }
        LangCommand::Suffix { input, word } => {
            let w = parse_word(word)?;
            let l = load(input, w.len())?;
            let aut = PrefixAutomaton::build(&l.digits)?;
            let info: SuffixInfo = aut.suffix_info(&w)?;
            let mut table = Table::new(vec!["word", "s", "v", "z", "hat", "q"]);
            table.push(vec![
                info.word.to_string(),
                info.s.to_string(),
                info.v.to_string(),
                info.z.to_string(),
                info.hat.to_string(),
                info.q.to_string(),
            ]);
            let text = format!(
                "word {}\ns {}\nv {}\nz {}\nhat {}\nq {}",
                info.word, info.s, info.v, info.z, info.hat, info.q
            );
            Ok(Report::new(&info, table, text))
        }
        LangCommand::Zbar { input, n } => {
            let n = *n as usize;
            let l = load(input, n)?;
            let profile: ZbarProfile = betathermo::language::zbar_profile(&l.digits, n)?;
            let mut table = Table::new(vec!["n", "zbar", "ratio"]);
            for p in &profile.points {
                table.push(vec![p.n.to_string(), p.zbar.to_string(), f(p.ratio)]);
            }
            let mut text = format!("verdict {:?}\ncheckpoints", profile.verdict);
            for p in &profile.checkpoints {
                text.push_str(&format!(" ({},{})", p.n, p.zbar));
            }
            Ok(Report::new(&profile, table, text))
        }
    }
}

/// `ln c` without overflowing f64 for huge counts.
fn ln_biguint(c: &BigUint) -> f64 {
    let bits = c.bits();
    if bits <= 1000 {
        return c.to_f64().map_or(f64::NAN, f64::ln);
    }
    let shift = bits - 64;
    let top: BigUint = c >> shift;
    top.to_f64().map_or(f64::NAN, f64::ln) + shift as f64 * std::f64::consts::LN_2
}

#[derive(Serialize)]
struct PressureReport {
    input: String,
    beta: Option<f64>,
    log_beta: Option<f64>,
    potential: String,
    #[serde(flatten)]
    estimate: PressureEstimate,
}

fn pressure_cmd(thermo: &Thermo, nmax: u64, mode: PressureMode) -> Run<Report> {
    let l = load(&thermo.input, vol(nmax))?;
    let phi = load_potential(thermo, &l.digits)?;
    let aut = PrefixAutomaton::build(&l.digits)?;
    let est = pressure(&aut, &phi, nmax as usize, mode)?;
    let modes: Vec<PressureMode> = est.curves.iter().map(|c| c.mode).collect();
    let mut header = vec!["n"];
    for m in &modes {
        header.push(match m {
            PressureMode::Full => "full",
            _ => "loop",
        });
    }
    let mut table = Table::new(header);
    for (i, p) in est.curves[0].values.iter().enumerate() {
        let mut row = vec![p.n.to_string()];
        for c in &est.curves {
            row.push(c.values.get(i).map(|v| f(v.value)).unwrap_or_default());
        }
        table.push(row);
    }
    let text = format!("p = {} ± {}", f(est.extrapolated), f(est.uncertainty));
    let report = PressureReport {
        input: l.label,
        beta: l.beta,
        log_beta: l.beta.map(f64::ln),
        potential: phi.name().to_string(),
        estimate: est,
    };
    Ok(Report::new(&report, table, text))
}

#[derive(Serialize)]
struct EstimateRow {
    word: Word,
    value: f64,
    oracle: Option<f64>,
}

#[derive(Serialize)]
struct DefectSummary {
    m: usize,
    defect: f64,
    argmax: Word,
    correction: f64,
    lower: f64,
    upper: f64,
    anomalies: Vec<Word>,
}

#[derive(Serialize)]
struct DefectCurve {
    input: String,
    beta: Option<f64>,
    mode: DefectSource,
    m: usize,
    n: usize,
    p_hat: f64,
    p_uncertainty: f64,
    defects: Vec<DefectSummary>,
}

#[derive(Serialize)]
struct EnvelopeReport {
    input: String,
    beta: Option<f64>,
    epsilon: f64,
    m: usize,
    n: usize,
    p_hat: f64,
    violations: usize,
    /// Smallest m from which every cylinder up to the maximum is contained.
    holds_from: Option<usize>,
    envelopes: Vec<Envelope>,
}

#[derive(Serialize)]
struct ClassifyReport {
    input: String,
    beta: Option<f64>,
    mode: DefectSource,
    m: usize,
    #[serde(flatten)]
    report: GibbsReport,
}

#[derive(Serialize)]
struct WitnessReport {
    input: String,
    #[serde(flatten)]
    family: WitnessFamily,
}

fn pressure_for(aut: &PrefixAutomaton, phi: &Potential, nmax: u64) -> Run<(f64, f64)> {
    let est = pressure(aut, phi, nmax as usize, PressureMode::Both)?;
    Ok((est.extrapolated, est.uncertainty))
}

fn gibbs(cmd: &GibbsCommand) -> Run<Report> {
    match cmd {
        GibbsCommand::Estimate { thermo, volume, word, m } => {
            let l = load(&thermo.input, vol(volume.n))?;
            let phi = load_potential(thermo, &l.digits)?;
            let aut = PrefixAutomaton::build(&l.digits)?;
            let n = volume.n as usize;
            let zero_phi = phi.table().iter().all(|&v| v == 0.0);
            let oracle = |w: &Word| -> Option<f64> {
                if zero_phi && l.digits.periodicity().is_some() {
                    mme_oracle(&l.digits, w).ok()
                } else {
                    None
                }
            };
            if let Some(word) = word {
                let w = parse_word(word)?;
                aut.require_member(&w)?;
                let est: CylinderEstimate = cylinder_estimate(&aut, &phi, &w, n, volume.windowing)?;
                let mut table = Table::new(vec!["j", "ratio"]);
                for r in &est.ratios {
                    table.push(vec![r.j.to_string(), f(r.ratio)]);
                }
                let text = format!("{} {}", est.word, f(est.value));
                return Ok(Report::new(&est, table, text));
            }
            let mut rows = Vec::new();
            let mut table = Table::new(vec!["word", "value", "oracle"]);
            let mut text = String::new();
            for w in aut.enumerate_words(*m as usize)? {
                let value = cylinder_estimate(&aut, &phi, &w, n, volume.windowing)?.value;
                let o = oracle(&w);
                table.push(vec![w.to_string(), f(value), o.map(f).unwrap_or_default()]);
                text.push_str(&format!("{w}\t{}\n", f(value)));
                rows.push(EstimateRow { word: w, value, oracle: o });
            }
            Ok(Report::new(&rows, table, text))
        }
        GibbsCommand::Defect {
            thermo,
            volume,
            m,
            nmax,
            oracle,
        } => {
            let m = *m as usize;
            let l = load(&thermo.input, vol(volume.n.max(*nmax)).max(m))?;
            let phi = load_potential(thermo, &l.digits)?;
            let aut = PrefixAutomaton::build(&l.digits)?;
            let (p_hat, p_uncertainty, source) = if *oracle {
                (0.0, 0.0, DefectSource::ExactOracle)
            } else {
                let (p, u) = pressure_for(&aut, &phi, *nmax)?;
                (p, u, DefectSource::Estimator)
            };
            let opts = DefectOptions {
                source,
                windowing: volume.windowing,
                p_hat,
                p_uncertainty,
            };
            let mut defects = Vec::with_capacity(m);
            let mut table = Table::new(vec!["m", "defect", "lower", "upper"]);
            let mut text = String::new();
            let mut used = (p_hat, p_uncertainty);
            for k in 1..=m {
                let r = weak_gibbs_defect(&aut, &phi, k, volume.n as usize, &opts)?;
                used = (r.p_hat, r.p_uncertainty);
                table.push(vec![k.to_string(), f(r.defect), f(r.lower), f(r.upper)]);
                text.push_str(&format!("D_{k} = {}\n", f(r.defect)));
                defects.push(DefectSummary {
                    m: k,
                    defect: r.defect,
                    argmax: r.argmax,
                    correction: r.correction,
                    lower: r.lower,
                    upper: r.upper,
                    anomalies: r.anomalies,
                });
            }
            let report = DefectCurve {
                input: l.label,
                beta: l.beta,
                mode: source,
                m,
                n: volume.n as usize,
                p_hat: used.0,
                p_uncertainty: used.1,
                defects,
            };
            Ok(Report::new(&report, table, text))
        }
        GibbsCommand::Envelope {
            thermo,
            volume,
            m,
            nmax,
            eps,
        } => {
            if !(*eps >= 0.0) {
                return Err(Failure::Usage(format!("--eps must be non-negative, got {eps}")));
            }
            let m = *m as usize;
            let n = volume.n as usize;
            let l = load(&thermo.input, vol(volume.n.max(*nmax)))?;
            let phi = load_potential(thermo, &l.digits)?;
            let aut = PrefixAutomaton::build(&l.digits)?;
            let (p_hat, _) = pressure_for(&aut, &phi, *nmax)?;
            let mut envelopes = Vec::new();
            for k in 1..=m {
                for u in aut.enumerate_words(k)? {
                    let nu = cylinder_estimate(&aut, &phi, &u, n, volume.windowing)?.value;
                    envelopes.push(k_envelope(&aut, &phi, &u, *eps, p_hat, nu)?);
                }
            }
            let violations = envelopes.iter().filter(|e| !e.contained).count();
            let last_bad = envelopes.iter().filter(|e| !e.contained).map(|e| e.m).max();
            let holds_from = match last_bad {
                None => Some(1),
                Some(b) if b < m => Some(b + 1),
                Some(_) => None,
            };
            let mut table = Table::new(vec!["word", "m", "lower", "nu", "upper", "contained"]);
            for e in &envelopes {
                table.push(vec![
                    e.word.to_string(),
                    e.m.to_string(),
                    f(e.lower),
                    f(e.nu),
                    f(e.upper),
                    e.contained.to_string(),
                ]);
            }
            let text = format!("{violations} violations among {} cylinders", envelopes.len());
            let report = EnvelopeReport {
                input: l.label,
                beta: l.beta,
                epsilon: *eps,
                m,
                n,
                p_hat,
                violations,
                holds_from,
                envelopes,
            };
            Ok(Report::new(&report, table, text))
        }
        GibbsCommand::Classify {
            thermo,
            volume,
            m,
            nmax,
            zbar,
        } => {
            let l = load(&thermo.input, 0)?;
            let phi = load_potential(thermo, &l.digits)?;
            let opts = ClassifyOptions {
                m_max: *m as usize,
                n: volume.n as usize,
                n_pressure: *nmax as usize,
                zbar_len: *zbar as usize,
                windowing: volume.windowing,
            };
            let report = classify(&l.digits, &phi, &opts)?;
            let mut table = Table::new(vec!["m", "defect", "lower", "upper"]);
            for d in &report.defects {
                table.push(vec![d.m.to_string(), f(d.defect), f(d.lower), f(d.upper)]);
            }
            let text = format!("{}\n{}", report.verdict, report.reason);
            let out = ClassifyReport {
                input: l.label,
                beta: l.beta,
                mode: report.source,
                m: opts.m_max,
                report,
            };
            Ok(Report::new(&out, table, text))
        }
        GibbsCommand::Witness { input, m } => {
            let l = load(input, 0)?;
            let family = make_witnesses(&l.digits, *m as usize)?;
            let mut table = Table::new(vec!["m", "z", "ratio", "word"]);
            let mut text = String::new();
            for w in &family.witnesses {
                table.push(vec![w.m.to_string(), w.z.to_string(), f(w.ratio), w.word.to_string()]);
                text.push_str(&format!("m={} z={} ratio={}\n", w.m, w.z, f(w.ratio)));
            }
            let report = WitnessReport {
                input: l.label,
                family,
            };
            Ok(Report::new(&report, table, text))
        }
    }
}

fn run(cli: &Cli) -> Run<Report> {
    match &cli.command {
        Command::Expand(input) => expand(input),
        Command::Validate(input) => validate(input),
        Command::Lang { command } => lang(command),
        Command::Pressure { thermo, nmax, mode } => pressure_cmd(thermo, *nmax, *mode),
        Command::Gibbs { command } => gibbs(command),
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.render(cli.format));
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(e)) => {
            eprint!(
                "{}",
                to_json(&ErrorReport {
                    error: e.kind(),
                    message: e.to_string(),
                })
            );
            ExitCode::from(2)
        }
    }
}
