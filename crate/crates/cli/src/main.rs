//! `agss`: curve inspection, scheme demos, subset-sum counting, bounds and
//! seeded experiment sweeps.
//!
//! Exit codes: 0 success, 2 bad input or config, 3 singular curve,
//! 4 set not qualified, 5 oracle disagreement, 6 budget exceeded.

use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use agss_core::config::{preset, ConfigFile, OutputFormat, PRESETS};
use agss_core::curve::{Curve, Point};
use agss_core::group::{li_wan_bound_check, AbelianGroup, GroupElement, PointSet};
use agss_core::lab::{self, bound_theorem3, bound_theorem4, degree_for, hasse_checks};
use agss_core::scheme::{format_subset, parse_subset, Privacy, Scheme, ShareVector};
use agss_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "agss", version, about = "Algebraic-geometric secret sharing toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Point count, Weil window and group structure of a curve.
    CurveInfo {
        #[arg(long)]
        curve: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Share, reconstruct or test a player set on a scheme.
    Scheme(SchemeArgs),
    /// Exact subset-sum count N(t, B, P) next to its deviation bound.
    Count {
        /// Invariant factors, e.g. `ab:2,4`.
        #[arg(long)]
        group: String,
        /// `full`, `full-minus=<e>,<e>` or an explicit list `<e>,<e>,...`;
        /// elements are written `a:b`.
        #[arg(long, default_value = "full")]
        set: String,
        #[arg(long)]
        t: usize,
        /// Target element B; defaults to the identity.
        #[arg(long)]
        target: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Proportion bounds, either from a curve or from raw parameters.
    Bound(BoundArgs),
    /// Run a sweep from a config file or preset and write CSV or JSON.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Action {
    Share,
    Reconstruct,
    Qualify,
}

#[derive(Args)]
struct SchemeArgs {
    #[arg(value_enum)]
    action: Action,
    #[arg(long)]
    curve: String,
    #[arg(long)]
    m: Option<usize>,
    /// Used when `--m` is absent: m = round(delta * n).
    #[arg(long)]
    delta: Option<f64>,
    /// Secret position as `x,y`; defaults to the smallest affine point.
    #[arg(long)]
    p0: Option<String>,
    #[arg(long)]
    secret: Option<i64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// 1-based player indices, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    subset: Option<String>,
    /// Share values for the subset in order, or a full `secret,s1,...,sn`
    /// line as printed by `share`.
    #[arg(long)]
    shares: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    curve: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long = "t-offset")]
    t_offset: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long = "group-order")]
    group_order: Option<u64>,
    #[arg(long)]
    phi: Option<f64>,
    #[arg(long)]
    q: Option<u64>,
    #[arg(long)]
    genus: Option<usize>,
    /// Points of the curve that are not players.
    #[arg(long)]
    c: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct ExperimentArgs {
    #[arg(long, conflicts_with = "preset")]
    config: Option<String>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    curve: Option<String>,
    /// Comma-separated field sizes.
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    /// Comma-separated values of m - t.
    #[arg(long = "t-offset")]
    t_offset: Option<String>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    oracle: Option<String>,
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Extra `key=value` overrides, applied after the named flags.
    #[arg(long = "set")]
    overrides: Vec<String>,
}

enum Failure {
    Core(Error),
    Usage(String),
    Disagreement(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::SingularCurve) => 3,
            Failure::Core(Error::NotQualified) => 4,
            Failure::Core(Error::BudgetExceeded(_) | Error::InstanceTooLarge(_)) => 6,
            Failure::Disagreement(_) => 5,
            Failure::Io(_) => 2,
            Failure::Core(_) | Failure::Usage(_) => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Usage(s) | Failure::Disagreement(s) => s.clone(),
            Failure::Io(e) => format!("i/o error: {e}"),
        }
    }
}

type CliResult = Result<(), Failure>;

fn emit(format: Format, text: String, value: Value) -> CliResult {
    let mut out = io::stdout().lock();
    match format {
        Format::Text => writeln!(out, "{text}")?,
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&value).unwrap())?,
    }
    Ok(())
}

fn group_label(d1: u64, d2: u64) -> String {
    if d1 == 1 {
        format!("Z_{d2}")
    } else {
        format!("Z_{d1} x Z_{d2}")
    }
}

fn curve_info(spec: &str, format: Format) -> CliResult {
    let curve = Curve::parse(spec)?;
    let table = if curve.is_elliptic() {
        Some(curve.group_structure()?)
    } else {
        None
    };
    let hasse = hasse_checks(&curve, table.as_ref());
    let verdict = if hasse.passed() { "OK" } else { "FAILED" };
    let mut text = format!(
        "curve: {}\np: {}\ngenus: {}\npoints: {}\nhasse: {verdict} (window [{:.3}, {:.3}])",
        curve.spec(),
        curve.field().characteristic(),
        curve.genus(),
        hasse.points,
        hasse.window.0,
        hasse.window.1
    );
    let mut value = json!({
        "curve": curve.spec().to_string(),
        "p": curve.field().characteristic(),
        "genus": curve.genus(),
        "points": hasse.points,
        "hasse": hasse,
    });
    if let Some(t) = &table {
        text.push_str(&format!(
            "\ngroup: {} (invariant factors {}, {})",
            group_label(t.d1, t.d2),
            t.d1,
            t.d2
        ));
        value["invariant_factors"] = json!([t.d1, t.d2]);
    }
    emit(format, text, value)
}

fn parse_point(curve: &Curve, s: &str) -> Result<Point, Failure> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| Failure::Usage(format!("--p0 expects x,y, got {s:?}")))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<i64>()
            .map_err(|_| Failure::Usage(format!("bad coordinate {v:?}")))
    };
    Ok(curve.affine_point(parse(x)?, parse(y)?)?)
}

fn build_scheme(curve: Curve, m: Option<usize>, delta: Option<f64>, p0: Option<&str>) -> Result<Scheme, Failure> {
    let mut affine = curve.affine_points();
    let p0 = match p0 {
        Some(s) => parse_point(&curve, s)?,
        None => *affine
            .first()
            .ok_or_else(|| Failure::Usage("curve has no affine points".into()))?,
    };
    affine.retain(|p| *p != p0);
    let m = match (m, delta) {
        (Some(m), _) => m,
        (None, Some(d)) => degree_for(affine.len(), d),
        (None, None) => return Err(Failure::Usage("give --m or --delta".into())),
    };
    Ok(Scheme::build(curve, p0, affine, m)?)
}

fn scheme_cmd(args: SchemeArgs) -> CliResult {
    let curve = Curve::parse(&args.curve)?;
    let scheme = build_scheme(curve, args.m, args.delta, args.p0.as_deref())?;
    let field = scheme.field();
    let n = scheme.n();
    let subset = match &args.subset {
        Some(s) => parse_subset(s, n)?,
        None => (0..n).collect(),
    };
    match args.action {
        Action::Share => {
            let secret = args
                .secret
                .ok_or_else(|| Failure::Usage("share needs --secret".into()))?;
            let sv = scheme.share(field.element(secret), args.seed)?;
            let value = json!({
                "secret": sv.secret.value(),
                "shares": sv.shares.iter().map(|s| s.value()).collect::<Vec<_>>(),
            });
            emit(args.format, sv.to_csv(), value)
        }
        Action::Reconstruct => {
            let line = args
                .shares
                .as_deref()
                .ok_or_else(|| Failure::Usage("reconstruct needs --shares".into()))?;
            let values = ShareVector::from_csv(field, &format!("0,{line}"))?.shares;
            let shares = if values.len() == n + 1 {
                subset.iter().map(|&i| values[i + 1]).collect()
            } else if values.len() == subset.len() {
                values
            } else {
                return Err(Failure::Usage(format!(
                    "{} share values for a subset of {} players",
                    values.len(),
                    subset.len()
                )));
            };
            let secret = scheme.reconstruct(&subset, &shares)?;
            emit(
                args.format,
                secret.value().to_string(),
                json!({ "subset": format_subset(&subset), "secret": secret.value() }),
            )
        }
        Action::Qualify => qualify(&scheme, &subset, args.format),
    }
}

fn qualify(scheme: &Scheme, subset: &[usize], format: Format) -> CliResult {
    let kernel = scheme.is_qualified_kernel(subset)?.is_qualified();
    let dual = scheme.is_qualified_dual(subset)?.is_qualified();
    let clx = if scheme.curve().is_elliptic() {
        Some(scheme.is_qualified_clx(subset)?.is_qualified())
    } else {
        None
    };
    let privacy = scheme.privacy_check(subset)?;
    let verdict = |q: bool| if q { "qualified" } else { "unqualified" };
    let t = scheme.n() - subset.len();
    let mut text = format!(
        "subset: {}\n|A|: {t}\nkernel: {}\ndual: {}",
        format_subset(subset),
        verdict(kernel),
        verdict(dual)
    );
    if let Some(c) = clx {
        text.push_str(&format!("\nclx: {}", verdict(c)));
    }
    text.push_str(&format!(
        "\nprivacy: {}",
        match privacy {
            Privacy::ZeroInformation => "zero-information",
            Privacy::DeterminesSecret => "determines-secret",
        }
    ));
    let agree = dual == kernel
        && clx.map_or(true, |c| c == kernel)
        && (privacy == Privacy::DeterminesSecret) == kernel;
    emit(
        format,
        text,
        json!({
            "subset": format_subset(subset),
            "t": t,
            "kernel": kernel,
            "dual": dual,
            "clx": clx,
            "privacy": privacy,
            "agree": agree,
        }),
    )?;
    if agree {
        Ok(())
    } else {
        Err(Failure::Disagreement("oracles disagree".into()))
    }
}

fn parse_element(group: &AbelianGroup, s: &str) -> Result<GroupElement, Failure> {
    let parts = s
        .trim()
        .split(':')
        .map(|v| {
            v.trim()
                .parse::<u64>()
                .map_err(|_| Failure::Usage(format!("bad group element {s:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(group.element(parts)?)
}

fn parse_elements(group: &AbelianGroup, s: &str) -> Result<Vec<GroupElement>, Failure> {
    s.split(',')
        .filter(|v| !v.trim().is_empty())
        .map(|v| parse_element(group, v))
        .collect()
}

fn count_cmd(group: &str, set: &str, t: usize, target: Option<&str>, format: Format) -> CliResult {
    let group: AbelianGroup = group.parse()?;
    let set = match set.trim() {
        "full" => PointSet::full(&group),
        s => match s.strip_prefix("full-minus=") {
            Some(rest) => PointSet::full_minus(&group, &parse_elements(&group, rest)?)?,
            None => PointSet::new(&group, parse_elements(&group, s)?)?,
        },
    };
    let target = match target {
        Some(s) => parse_element(&group, s)?,
        None => group.identity(),
    };
    let report = li_wan_bound_check(&group, &set, t, &target)?;
    let text = format!(
        "N({t}, {}, P) = {}\nmain term: {:.6}\ndeviation: {:.6}\nbound: {:.6}\nholds: {}",
        report.target, report.count, report.main_term, report.deviation, report.bound, report.holds
    );
    emit(format, text, serde_json::to_value(&report).unwrap())
}

fn bound_cmd(a: BoundArgs) -> CliResult {
    let need = |v: Option<usize>, name: &str| {
        v.ok_or_else(|| Failure::Usage(format!("bound needs --{name}")))
    };
    let (report, kind) = if let Some(spec) = &a.curve {
        let curve = Curve::parse(spec)?;
        let scheme = build_scheme(curve, a.m, a.delta.or(Some(0.5)), None)?;
        let t = scheme
            .m()
            .checked_sub(a.t_offset.unwrap_or(0))
            .ok_or_else(|| Failure::Usage("--t-offset exceeds m".into()))?;
        let n = scheme.n();
        if scheme.curve().is_elliptic() {
            let table = scheme.group_table()?;
            let group = table.group();
            let players = scheme
                .players()
                .iter()
                .map(|p| table.element(p).expect("player on curve"))
                .collect();
            let phi = agss_core::group::amplitude(&group, &PointSet::new(&group, players)?)?;
            (bound_theorem3(n, t, table.order(), phi), "subset-sum")
        } else {
            let q = scheme.field().characteristic();
            let c = (scheme.curve().point_count() - n) as u64;
            (bound_theorem4(q, scheme.genus(), n, t, scheme.m(), c)?, "gray-zone")
        }
    } else if let Some(q) = a.q {
        let g = need(a.genus, "genus")?;
        let n = need(a.n, "n")?;
        let m = need(a.m, "m")?;
        let t = need(a.t, "t")?;
        (bound_theorem4(q, g, n, t, m, a.c.unwrap_or(2))?, "gray-zone")
    } else {
        let n = need(a.n, "n")?;
        let t = need(a.t, "t")?;
        let order = a
            .group_order
            .ok_or_else(|| Failure::Usage("bound needs --group-order".into()))?;
        (bound_theorem3(n, t, order, a.phi.unwrap_or(0.0)), "subset-sum")
    };
    let mut text = format!(
        "kind: {kind}\nphi: {:.6}\nM: {:.6}\ndelta': {:.6}\nmain term: {:.6e}\nerror term: {:.6e}\ntotal: {:.6e}",
        report.phi, report.m_value, report.delta_prime, report.main_term, report.error_term, report.total
    );
    if let Some((lo, hi)) = report.h_window {
        text.push_str(&format!("\nh window: [{lo:.6e}, {hi:.6e}]"));
    }
    if let Some(w) = report.w_bound {
        text.push_str(&format!("\nW bound: {w:.6e}"));
    }
    if let Some(s) = report.star_term {
        text.push_str(&format!("\nstar term: {s:.6e}"));
    }
    let mut value = serde_json::to_value(&report).unwrap();
    value["kind"] = json!(kind);
    emit(a.format, text, value)
}

fn experiment_cmd(a: ExperimentArgs) -> CliResult {
    let seed = a
        .seed
        .ok_or_else(|| Failure::Usage("experiment needs --seed".into()))?;
    let text = match (&a.config, &a.preset) {
        (Some(path), _) => fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {path}: {e}")))?,
        (None, Some(name)) => preset(name)
            .ok_or_else(|| {
                let names: Vec<&str> = PRESETS.iter().map(|(n, _)| *n).collect();
                Failure::Usage(format!("unknown preset {name:?}; known: {}", names.join(", ")))
            })?
            .to_string(),
        (None, None) => return Err(Failure::Usage("give --config or --preset".into())),
    };
    let mut config = ConfigFile::parse(&text)?;
    let mut overrides: Vec<(String, String)> = Vec::new();
    let mut push = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            overrides.push((k.to_string(), v));
        }
    };
    push("curve", a.curve);
    push("q", a.q);
    push("delta", a.delta.map(|d| d.to_string()));
    push("offsets", a.t_offset);
    push("samples", a.samples.map(|s| s.to_string()));
    push("mode", a.mode);
    push("oracle", a.oracle);
    push("path", a.out);
    push("format", a.format);
    for kv in &a.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--set expects key=value, got {kv:?}")))?;
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    for (k, v) in overrides {
        config
            .set(&k, &v)
            .map_err(|e| Failure::Usage(format!("--{k}: {e}")))?;
    }
    config.experiment.validate()?;
    let rows = lab::sweep(&config.experiment, seed, a.workers)?;
    let body = match config.output.format {
        OutputFormat::Csv => lab::to_csv_string(seed, &rows)?,
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&rows).unwrap();
            s.push('\n');
            s
        }
    };
    match &config.output.path {
        Some(path) => fs::write(path, body)?,
        None => io::stdout().lock().write_all(body.as_bytes())?,
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::CurveInfo { curve, format } => curve_info(&curve, format),
        Command::Scheme(args) => scheme_cmd(args),
        Command::Count {
            group,
            set,
            t,
            target,
            format,
        } => count_cmd(&group, &set, t, target.as_deref(), format),
        Command::Bound(args) => bound_cmd(args),
        Command::Experiment(args) => experiment_cmd(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("agss: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
