//! Command-line front end: argument parsing, schedule specs and output.

pub mod output;
pub mod spec;

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use survivor_core::dimension::{auto_mode, estimate_dims_with};
use survivor_core::{
    build_pq_schedule, classify_range, count_series, dominant_root, jsr_report, lambda_pq,
    parse_word, predict_dims, regularity_ratios, Error, HoleSchedule, Mode, Params, PatternClass,
    RootKind, Series, Word, DEFAULT_BUDGET,
};

use output::{float, Output};
pub use spec::{parse_schedule_spec, SpecError};

/// Version of the JSON payload layout; matches `schemas/v<N>/`.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "survivor",
    version,
    about = "Survivor sets of the b-adic shift with moving holes"
)]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dominant roots λ, η, γ with conjugate moduli and Pisot flags.
    Roots(RootsArgs),
    /// Survivor count |Σ_k| for a schedule.
    Count(CountArgs),
    /// PO / TD / neither class of positions 1..=n.
    Classify(ClassifyArgs),
    /// Dimension estimates from the growth of survivor counts.
    Dim(DimArgs),
    /// Bands of |Σ_k| / β^k.
    Regularity(RegularityArgs),
    /// Joint spectral radius bounds and the periodic finiteness check.
    Jsr(JsrArgs),
    /// Run lengths p_n, q_n and boundaries ℓ_n for limits (s, t).
    BuildPq(BuildPqArgs),
}

#[derive(Args, Debug)]
struct Base {
    /// Alphabet size.
    #[arg(long)]
    b: usize,
    /// Hole length.
    #[arg(long)]
    m: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Args, Debug)]
struct FormatArgs {
    /// Output format.
    #[arg(long, value_enum, conflicts_with_all = ["json", "csv"])]
    format: Option<Format>,
    /// Same as --format json.
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Same as --format csv.
    #[arg(long)]
    csv: bool,
}

impl FormatArgs {
    fn resolve(&self, default: Format) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            self.format.unwrap_or(default)
        }
    }
}

#[derive(Args, Debug)]
struct RootsArgs {
    #[command(flatten)]
    base: Base,
    /// Also report λ_{p,q} = ρ(A^p B^q), given as `p,q`.
    #[arg(long, value_parser = parse_pair)]
    pq: Option<(u64, u64)>,
    #[command(flatten)]
    fmt: FormatArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EngineMode {
    Auto,
    Exact,
    Log,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[command(flatten)]
    base: Base,
    /// Hole schedule, e.g. `po:seed=0`, `lpq:p=1,q=2,seed=rng:7`
    #[arg(long)]
    schedule: String,
    /// Word length.
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "exact")]
    mode: EngineMode,
    /// Emit every k from 0 to --k.
    #[arg(long)]
    series: bool,
    #[command(flatten)]
    fmt: FormatArgs,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[command(flatten)]
    base: Base,
    /// Hole schedule, e.g. `po:seed=0`, `lpq:p=1,q=2,seed=rng:7`
    #[arg(long)]
    schedule: String,
    /// Last position to classify.
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    fmt: FormatArgs,
}

#[derive(Args, Debug)]
struct DimArgs {
    #[command(flatten)]
    base: Base,
    /// Hole schedule, e.g. `po:seed=0`, `lpq:p=1,q=2,seed=rng:7`
    #[arg(long)]
    schedule: String,
    /// Largest word length
    #[arg(long)]
    k_max: usize,
    /// Trailing fraction of 1..=k_max used for the estimates.
    #[arg(long, default_value_t = 0.5)]
    window: f64,
    /// Add the predicted dimensions when the schedule has a known pattern.
    #[arg(long)]
    predict: bool,
    #[arg(long, value_enum, default_value = "auto")]
    mode: EngineMode,
    #[command(flatten)]
    fmt: FormatArgs,
}

#[derive(Args, Debug)]
struct RegularityArgs {
    #[command(flatten)]
    base: Base,
    /// Hole schedule, e.g. `po:seed=0`, `lpq:p=1,q=2,seed=rng:7`
    #[arg(long)]
    schedule: String,
    /// Largest word length
    #[arg(long)]
    k_max: usize,
    /// Rate β; defaults to λ, η or √(λη) by pattern.
    #[arg(long)]
    beta: Option<f64>,
    #[command(flatten)]
    fmt: FormatArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum JsrMode {
    /// Exhaustive when within budget, PO shortcut otherwise.
    Auto,
    Exhaustive,
    Po,
}

#[derive(Args, Debug)]
struct JsrArgs {
    #[command(flatten)]
    base: Base,
    /// Product length n.
    #[arg(long)]
    depth: usize,
    #[arg(long, value_enum, default_value = "auto")]
    mode: JsrMode,
    /// Comma-separated words of a periodic PO block for the lower bound.
    #[arg(long, value_delimiter = ',')]
    block: Option<Vec<String>>,
    /// Maximum number of products visited by the exhaustive search.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    #[command(flatten)]
    fmt: FormatArgs,
}

#[derive(Args, Debug)]
struct BuildPqArgs {
    /// Lower limit of the TD proportion, as `a/b` or a decimal
    #[arg(long, value_parser = parse_rational_arg)]
    s: survivor_core::Rational,
    /// Upper limit of the TD proportion; `s <= t`
    #[arg(long, value_parser = parse_rational_arg)]
    t: survivor_core::Rational,
    /// First run length `p_1` (ignored when `s = t`)
    #[arg(long, default_value_t = 1)]
    p1: u64,
    /// Number of cycles to list.
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Unconstrained positions added after each cycle (m for gapped families).
    #[arg(long, default_value_t = 0)]
    gap: u64,
    #[command(flatten)]
    fmt: FormatArgs,
}

fn parse_pair(text: &str) -> Result<(u64, u64), String> {
    let (a, b) = text.split_once(',').ok_or("expected p,q")?;
    let a = a.parse().map_err(|_| format!("bad p '{a}'"))?;
    let b = b.parse().map_err(|_| format!("bad q '{b}'"))?;
    Ok((a, b))
}

fn parse_rational_arg(text: &str) -> Result<survivor_core::Rational, String> {
    spec::parse_rational(text)
        .ok_or_else(|| format!("'{text}' is not an integer, a/b or a decimal"))
}

/// Why a run stopped; decides the exit code.
#[derive(Debug)]
enum Failure {
    /// Bad arguments or schedule text: exit 1.
    Usage(String),
    /// The computation itself failed: exit 2.
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn params(base: &Base) -> Run<Params> {
    Params::new(base.b, base.m).map_err(|e| Failure::Usage(e.to_string()))
}

fn schedule(text: &str, p: &Params) -> Run<HoleSchedule> {
    parse_schedule_spec(text, p).map_err(|e| Failure::Usage(e.to_string()))
}

fn header(command: &str, p: Option<&Params>) -> serde_json::Map<String, Value> {
    let mut map = serde_json::Map::new();
    map.insert("schema_version".into(), json!(SCHEMA_VERSION));
    map.insert("command".into(), json!(command));
    if let Some(p) = p {
        map.insert("b".into(), json!(p.b()));
        map.insert("m".into(), json!(p.m()));
    }
    map
}

fn extend(mut map: serde_json::Map<String, Value>, rest: Value) -> Value {
    if let Value::Object(obj) = rest {
        map.extend(obj);
    }
    Value::Object(map)
}

fn no_csv(what: &str) -> Failure {
    Failure::Usage(format!(
        "{what} has no CSV form; use --format json or human"
    ))
}

fn roots(a: &RootsArgs) -> Run<Output> {
    let p = params(&a.base)?;
    let lam = dominant_root(&RootKind::Lambda, &p)?;
    let eta = dominant_root(&RootKind::Eta, &p)?;
    let gamma = if p.m() >= 3 {
        Some(dominant_root(&RootKind::Gamma, &p)?)
    } else {
        None
    };
    let mut named = vec![("lambda", &lam), ("eta", &eta)];
    if let Some(g) = &gamma {
        named.push(("gamma", g));
    }
    let pq = a.pq.map(|(pp, q)| lambda_pq(pp, q, &p)).transpose()?;
    match a.fmt.resolve(Format::Json) {
        Format::Json => {
            let pick = |f: &dyn Fn(&survivor_core::RootResult) -> Value| {
                Value::Object(named.iter().map(|(n, r)| (n.to_string(), f(r))).collect())
            };
            let mut body = json!({
                "lambda": lam.value,
                "eta": eta.value,
                "gamma": gamma.as_ref().map(|g| g.value),
                "pisot": named.iter().all(|(_, r)| r.pisot),
                "pisot_flags": pick(&|r| json!(r.pisot)),
                "conjugate_moduli": pick(&|r| json!(r.conjugate_moduli)),
                "brackets": pick(&|r| json!([r.bracket.0, r.bracket.1])),
                "residuals": pick(&|r| json!(r.residual)),
            });
            if let Some(l) = &pq {
                body["lambda_pq"] = json!({
                    "p": l.p,
                    "q": l.q,
                    "value": l.root.value,
                    "normalized": l.normalized,
                    "primitive_power": l.primitive_power,
                    "matrix": l.matrix,
                });
            }
            Ok(Output::Json(extend(header("roots", Some(&p)), body)))
        }
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = named
                .iter()
                .map(|(n, r)| {
                    vec![
                        n.to_string(),
                        float(r.value),
                        float(r.residual),
                        r.pisot.to_string(),
                    ]
                })
                .collect();
            if let Some(l) = &pq {
                rows.push(vec![
                    format!("lambda_{},{}", l.p, l.q),
                    float(l.root.value),
                    float(l.root.residual),
                    l.root.pisot.to_string(),
                ]);
            }
            Ok(Output::Csv(
                vec!["root", "value", "residual", "pisot"],
                rows,
            ))
        }
        Format::Human => {
            let mut text = String::new();
            for (n, r) in &named {
                text.push_str(&format!(
                    "{n:<7} {}  pisot={}  max conjugate modulus {}\n",
                    float(r.value),
                    r.pisot,
                    r.conjugate_moduli.first().map_or("-".into(), |x| float(*x))
                ));
            }
            if let Some(l) = &pq {
                text.push_str(&format!(
                    "lambda_{},{} {}  normalized {}\n",
                    l.p,
                    l.q,
                    float(l.root.value),
                    float(l.normalized)
                ));
            }
            Ok(Output::Human(text))
        }
    }
}

fn engine_mode(mode: EngineMode, p: &Params, k: usize) -> Mode {
    match mode {
        EngineMode::Auto => auto_mode(p, k),
        EngineMode::Exact => Mode::Exact,
        EngineMode::Log => Mode::Log,
    }
}

fn count(a: &CountArgs) -> Run<Output> {
    let p = params(&a.base)?;
    let s = schedule(&a.schedule, &p)?;
    let mode = engine_mode(a.mode, &p, a.k);
    let series = count_series(&s, a.k, mode);
    let ks: Vec<usize> = if a.series {
        (0..=a.k).collect()
    } else {
        vec![a.k]
    };
    let format = a.fmt.resolve(Format::Human);
    let mut map = header("count", Some(&p));
    map.insert("schedule".into(), json!(s.to_string()));
    map.insert("k".into(), json!(a.k));
    match &series {
        Series::Exact(counts) => {
            map.insert("mode".into(), json!("exact"));
            match format {
                Format::Json if a.series => {
                    let all: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
                    map.insert("series".into(), json!(all));
                }
                Format::Json => {
                    map.insert("count".into(), json!(counts[a.k].to_string()));
                }
                Format::Csv => {
                    let rows = ks
                        .iter()
                        .map(|&k| vec![k.to_string(), counts[k].to_string()])
                        .collect();
                    return Ok(Output::Csv(vec!["k", "count"], rows));
                }
                Format::Human => {
                    let lines: Vec<String> = if a.series {
                        ks.iter().map(|&k| format!("{k} {}", counts[k])).collect()
                    } else {
                        vec![counts[a.k].to_string()]
                    };
                    return Ok(Output::Human(lines.join("\n") + "\n"));
                }
            }
        }
        Series::Log(log) => {
            map.insert("mode".into(), json!("log"));
            map.insert("extinction".into(), json!(log.extinction()));
            let ln = |k: usize| log.ln(k);
            match format {
                Format::Json if a.series => {
                    let values: Vec<Value> = ks.iter().map(|&k| finite(ln(k))).collect();
                    let drift: Vec<Value> = ks.iter().map(|&k| json!(log.drift_at(k))).collect();
                    map.insert("log_series".into(), json!(values));
                    map.insert("drift_series".into(), json!(drift));
                }
                Format::Json => {
                    map.insert("log_count".into(), finite(ln(a.k)));
                    map.insert("drift_bound".into(), json!(log.drift_at(a.k)));
                }
                Format::Csv => {
                    let rows = ks
                        .iter()
                        .map(|&k| vec![k.to_string(), float(ln(k)), float(log.drift_at(k))])
                        .collect();
                    return Ok(Output::Csv(vec!["k", "log_count", "drift_bound"], rows));
                }
                Format::Human => {
                    let lines: Vec<String> = ks
                        .iter()
                        .map(|&k| {
                            let v = float(ln(k));
                            let d = float(log.drift_at(k));
                            if a.series {
                                format!("{k} ln={v} ±{d}")
                            } else {
                                format!("ln={v} ±{d}")
                            }
                        })
                        .collect();
                    return Ok(Output::Human(lines.join("\n") + "\n"));
                }
            }
        }
    }
    Ok(Output::Json(Value::Object(map)))
}

/// `null` for the `-inf` of an extinct count.
fn finite(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn classify(a: &ClassifyArgs) -> Run<Output> {
    let p = params(&a.base)?;
    let s = schedule(&a.schedule, &p)?;
    let classes = classify_range(&s, a.n)?;
    let tally = |c: PatternClass| classes.iter().filter(|&&x| x == c).count();
    match a.fmt.resolve(Format::Json) {
        Format::Json => {
            let names: Vec<&str> = classes.iter().map(|c| c.short()).collect();
            let body = json!({
                "schedule": s.to_string(),
                "n": a.n,
                "classes": names,
                "counts": {
                    "po": tally(PatternClass::ProgressivelyOverlapping),
                    "td": tally(PatternClass::TotallyDistinct),
                    "neither": tally(PatternClass::Neither),
                },
            });
            Ok(Output::Json(extend(header("classify", Some(&p)), body)))
        }
        Format::Csv => {
            let rows = classes
                .iter()
                .enumerate()
                .map(|(i, c)| vec![(i + 1).to_string(), c.short().to_string()])
                .collect();
            Ok(Output::Csv(vec!["k", "class"], rows))
        }
        Format::Human => {
            let mut text: String = classes
                .iter()
                .enumerate()
                .map(|(i, c)| format!("{} {}\n", i + 1, c.short()))
                .collect();
            text.push_str(&format!(
                "PO {}  TD {}  neither {}\n",
                tally(PatternClass::ProgressivelyOverlapping),
                tally(PatternClass::TotallyDistinct),
                tally(PatternClass::Neither)
            ));
            Ok(Output::Human(text))
        }
    }
}

fn dim(a: &DimArgs) -> Run<Output> {
    let p = params(&a.base)?;
    let s = schedule(&a.schedule, &p)?;
    let mode = engine_mode(a.mode, &p, a.k_max);
    let r = estimate_dims_with(&s, a.k_max, a.window, mode)?;
    if let Some(k) = r.extinction {
        return Err(Error::Extinction(k).into());
    }
    let prediction = if a.predict {
        match predict_dims(&s) {
            Ok(d) => Some(d),
            Err(Error::NoPrediction(_)) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    match a.fmt.resolve(Format::Json) {
        Format::Json => {
            let mut body = json!({
                "schedule": s.to_string(),
                "k_max": r.k_max,
                "window": r.window,
                "window_start": r.window_start,
                "mode": if r.exact { "exact" } else { "log" },
                "liminf_est": r.liminf_est,
                "limsup_est": r.limsup_est,
                "uncertainty": r.uncertainty,
                "extinction": r.extinction,
                "structured": structured(&s),
            });
            if a.predict {
                body["prediction"] = serde_json::to_value(&prediction).expect("serializable");
            }
            Ok(Output::Json(extend(header("dim", Some(&p)), body)))
        }
        Format::Csv => {
            let rows = (1..=r.k_max)
                .map(|k| vec![k.to_string(), float(r.r(k)), float(r.drift[k - 1])])
                .collect();
            Ok(Output::Csv(vec!["k", "r_k", "drift"], rows))
        }
        Format::Human => {
            let mut text = format!(
                "liminf estimate {}\nlimsup estimate {}\nuncertainty     {}\n",
                float(r.liminf_est.unwrap_or(f64::NAN)),
                float(r.limsup_est.unwrap_or(f64::NAN)),
                float(r.uncertainty.unwrap_or(f64::NAN)),
            );
            if let Some(d) = &prediction {
                text.push_str(&format!(
                    "predicted hausdorff {}\npredicted packing   {}\n",
                    float(d.hausdorff),
                    float(d.packing)
                ));
            }
            Ok(Output::Human(text))
        }
    }
}

/// Whether the schedule follows a pattern with a known growth rate; for the
/// rest only the universal η..λ band applies to the estimates.
fn structured(s: &HoleSchedule) -> bool {
    predict_dims(s).is_ok()
}

fn regularity(a: &RegularityArgs) -> Run<Output> {
    let p = params(&a.base)?;
    let s = schedule(&a.schedule, &p)?;
    let r = regularity_ratios(&s, a.beta, a.k_max)?;
    match a.fmt.resolve(Format::Json) {
        Format::Json => {
            let body = json!({
                "schedule": s.to_string(),
                "beta": r.beta,
                "source": r.source,
                "k_max": r.k_max,
                "min": r.min,
                "max": r.max,
                "argmin": r.argmin,
                "argmax": r.argmax,
                "spread": r.spread,
                "trend_slope": r.trend_slope,
                "unbounded_trend": r.unbounded_trend,
            });
            Ok(Output::Json(extend(header("regularity", Some(&p)), body)))
        }
        Format::Csv => {
            let rows = (1..=r.k_max)
                .map(|k| vec![k.to_string(), float(r.log_ratios[k - 1])])
                .collect();
            Ok(Output::Csv(vec!["k", "log_ratio"], rows))
        }
        Format::Human => Ok(Output::Human(format!(
            "beta {}\nratio band [{}, {}] (k = {} and {})\nspread {}\ntrend {}{}\n",
            float(r.beta),
            float(r.min),
            float(r.max),
            r.argmin,
            r.argmax,
            float(r.spread),
            float(r.trend_slope),
            if r.unbounded_trend {
                " (unbounded)"
            } else {
                ""
            }
        ))),
    }
}

fn jsr(a: &JsrArgs) -> Run<Output> {
    let p = params(&a.base)?;
    let block: Option<Vec<Word>> = a
        .block
        .as_ref()
        .map(|ws| {
            ws.iter()
                .map(|w| parse_word(w, &p).map_err(|e| Failure::Usage(e.to_string())))
                .collect::<Run<Vec<_>>>()
        })
        .transpose()?;
    if a.depth == 0 {
        return Err(Failure::Usage("--depth must be at least 1".into()));
    }
    let exhaustive = match a.mode {
        JsrMode::Exhaustive => true,
        JsrMode::Po => false,
        JsrMode::Auto => (p.words() as u128)
            .checked_pow(a.depth.min(u32::MAX as usize) as u32)
            .is_some_and(|n| n <= a.budget),
    };
    let r = jsr_report(&p, a.depth, exhaustive, a.budget, block.as_deref())?;
    match a.fmt.resolve(Format::Json) {
        Format::Json => {
            let body = serde_json::to_value(&r).expect("serializable");
            Ok(Output::Json(extend(header("jsr", Some(&p)), body)))
        }
        Format::Csv => Err(no_csv("jsr")),
        Format::Human => {
            let mut text = format!(
                "lambda          {}\nupper (PO)      {}  (norm {})\n",
                float(r.lambda_ref),
                float(r.upper_po),
                r.upper_po_count
            );
            if let Some(e) = &r.upper_exhaustive {
                text.push_str(&format!(
                    "upper (search)  {}  (norm {}, {} maximizers)\n",
                    float(e.value),
                    e.max_norm,
                    e.maximizer_count
                ));
            }
            if let Some(f) = &r.lower_periodic {
                text.push_str(&format!(
                    "lower (block)   {}  error {}  {}\n",
                    float(f.rate),
                    float(f.error),
                    if f.pass { "pass" } else { "fail" }
                ));
            }
            Ok(Output::Human(text))
        }
    }
}

fn build_pq(a: &BuildPqArgs) -> Run<Output> {
    let pq = build_pq_schedule(a.s, a.t, a.p1).map_err(|e| Failure::Usage(e.to_string()))?;
    let rows: Vec<(usize, u64, u64, u64)> = (1..=a.n)
        .map(|n| {
            let (p, q) = pq.term(n);
            (n, p, q, pq.ell(n, a.gap))
        })
        .collect();
    match a.fmt.resolve(Format::Json) {
        Format::Json => {
            let terms: Vec<Value> = rows
                .iter()
                .map(|&(n, p, q, ell)| json!({ "n": n, "p": p, "q": q, "ell": ell }))
                .collect();
            let body = json!({
                "s": a.s.to_string(),
                "t": a.t.to_string(),
                "p1": a.p1,
                "gap": a.gap,
                "rule": pq.to_string(),
                "terms": terms,
            });
            Ok(Output::Json(extend(header("build-pq", None), body)))
        }
        Format::Csv => Ok(Output::Csv(
            vec!["n", "p", "q", "ell"],
            rows.iter()
                .map(|&(n, p, q, ell)| {
                    vec![n.to_string(), p.to_string(), q.to_string(), ell.to_string()]
                })
                .collect(),
        )),
        Format::Human => Ok(Output::Human(
            rows.iter()
                .map(|&(n, p, q, ell)| format!("n={n} p={p} q={q} ell={ell}\n"))
                .collect(),
        )),
    }
}

fn dispatch(cmd: &Command) -> Run<Output> {
    match cmd {
        Command::Roots(a) => roots(a),
        Command::Count(a) => count(a),
        Command::Classify(a) => classify(a),
        Command::Dim(a) => dim(a),
        Command::Regularity(a) => regularity(a),
        Command::Jsr(a) => jsr(a),
        Command::BuildPq(a) => build_pq(a),
    }
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start thread pool: {e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(&cli.command)) {
        Ok(output) => match output.write(out) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                2
            }
        },
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Compute(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}
