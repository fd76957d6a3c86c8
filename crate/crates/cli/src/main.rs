use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ramify_core::batch::analyze_batch;
use ramify_core::group::{AbelianGroup, FilteredGroup, Numbering, Subgroup};
use ramify_core::herbrand::{lower_to_upper, quotient_lower, quotient_upper, upper_to_lower, HerbrandJson, Segment};
use ramify_core::norm_filtration::{tower_norm_index, ExtStep};
use ramify_core::parse::parse_element;
use ramify_core::rational::parse_q;
use ramify_core::{AnalysisConfig, Caps, ExtensionReport, HerbrandFn, Mode, Pair, PrimeField, RamIndex2};

#[derive(Parser)]
#[command(name = "ramify", version, about = "Ramification invariants of two-dimensional local fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reduce an Artin-Schreier representative and report its breaks.
    Analyze(AnalyzeArgs),
    /// Herbrand function of a filtered cyclic group.
    Herbrand(HerbrandArgs),
    /// Norm-index fold through a tower of degree-p steps.
    Tower(TowerArgs),
    /// Check the quotient formula for a filtered abelian group.
    Group(GroupArgs),
}

#[derive(Args)]
struct RunConfig {
    /// Residue characteristic.
    #[arg(short = 'p', default_value_t = 2)]
    p: u64,
    /// Residue field degree over F_p.
    #[arg(short = 'f', default_value_t = 1)]
    f: u32,
    /// Cap on t-exponents, a positive rational.
    #[arg(long = "prec-t", default_value = "40")]
    prec_t: String,
    /// Cap on pi-exponents, a positive rational.
    #[arg(long = "prec-pi", default_value = "40")]
    prec_pi: String,
    #[arg(long = "adjunction-cap", default_value_t = 16)]
    adjunction_cap: u32,
    /// Emit JSON instead of a table.
    #[arg(long)]
    json: bool,
}

impl RunConfig {
    fn field(&self) -> Result<Arc<PrimeField>> {
        Ok(Arc::new(PrimeField::new(self.p, self.f)?))
    }

    fn analysis(&self) -> Result<AnalysisConfig> {
        let cap = |s: &str, name: &str| -> Result<_> {
            let v = parse_q(s).with_context(|| format!("bad {name}"))?;
            if v <= ramify_core::Q::from_integer(0) {
                bail!("{name} must be positive");
            }
            Ok(v)
        };
        if self.adjunction_cap == 0 {
            bail!("adjunction cap must be positive");
        }
        Ok(AnalysisConfig {
            caps: Caps { t: cap(&self.prec_t, "--prec-t")?, pi: cap(&self.prec_pi, "--prec-pi")? },
            adjunction_cap: self.adjunction_cap,
            ..AnalysisConfig::default()
        })
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    run: RunConfig,
    /// Expression such as "pi^-2 * t + 3*pi^-1".
    #[arg(required_unless_present = "batch")]
    expr: Option<String>,
    /// One expression per line; blank lines and lines starting with '#' are skipped.
    #[arg(long, conflicts_with = "expr")]
    batch: Option<PathBuf>,
    /// Write output to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    A,
    A2,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::A => Mode::A,
            ModeArg::A2 => Mode::A2,
        }
    }
}

#[derive(Args)]
struct HerbrandArgs {
    /// Jumps "INDEX,order=N", separated by ';' or repeated. `order` is |G_t| up to INDEX.
    #[arg(long = "jump", required = true)]
    jumps: Vec<String>,
    /// Read the jumps as upper numbering.
    #[arg(long)]
    upper: bool,
    #[arg(long, value_enum, default_value = "a")]
    mode: ModeArg,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct TowerArgs {
    /// Steps separated by ';', top extension first, e.g. "fierce:p=2,h=(0,1);unramified:p=2".
    #[arg(long)]
    steps: String,
    /// Pair index such as "(0,1)".
    #[arg(long)]
    alpha: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GroupArgs {
    #[arg(short = 'p', default_value_t = 2)]
    p: u64,
    /// Cyclic factors, comma separated: "p^2", "p^2,p", "9".
    #[arg(long)]
    cyclic: String,
    /// Lower jumps "INDEX=SUBGROUP" separated by ';'. Subgroups: G, 0, pG, p^kG, nG.
    #[arg(long)]
    jumps: String,
    /// Subgroup H to quotient by.
    #[arg(long)]
    quotient: String,
    #[arg(long, value_enum, default_value = "a")]
    mode: ModeArg,
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Herbrand(a) => cmd_herbrand(a),
        Command::Tower(a) => cmd_tower(a),
        Command::Group(a) => cmd_group(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn render_report(expr: &str, r: &ExtensionReport) -> String {
    let mut s = format!("a         = {expr}\n");
    s += &format!("kind      = {}\n", r.kind);
    s += &format!("break_A   = {}\n", r.break_a);
    s += &format!("break_A2  = {}\n", r.break_a2);
    s += &format!("adjoined  = pi^(1/p^{})\n", r.adjoined_root_exponent);
    s += &format!("certified = {}\n", r.certified);
    for line in &r.trace {
        s += &format!("  | {line}\n");
    }
    s
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<u8> {
    let field = args.run.field()?;
    let cfg = args.run.analysis()?;
    let exprs: Vec<String> = match (&args.expr, &args.batch) {
        (Some(e), _) => vec![e.clone()],
        (None, Some(path)) => fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect(),
        (None, None) => bail!("no expression given"),
    };
    let elements = exprs
        .iter()
        .map(|e| parse_element(e, field.clone()).with_context(|| format!("parsing {e:?}")))
        .collect::<Result<Vec<_>>>()?;
    let reports = analyze_batch(&elements, &cfg);

    let mut text = String::new();
    let mut code = 0;
    for (expr, report) in exprs.iter().zip(reports) {
        let report = report.with_context(|| format!("analyzing {expr:?}"))?;
        if !report.certified {
            code = 2;
        }
        if args.run.json {
            text += &serde_json::to_string(&report)?;
            text.push('\n');
        } else {
            if !text.is_empty() {
                text.push('\n');
            }
            text += &render_report(expr, &report);
        }
    }
    emit(args.out.as_ref(), &text)?;
    Ok(code)
}

fn parse_index(s: &str) -> Result<RamIndex2> {
    s.trim().parse().map_err(|e| anyhow!("bad index {s:?}: {e}"))
}

fn prime_power_base(n: u64) -> Option<u64> {
    (2..=n).find(|d| n.is_multiple_of(*d)).filter(|&d| {
        let mut m = n;
        while m.is_multiple_of(d) {
            m /= d;
        }
        m == 1
    })
}

fn render_segments(label: &str, segs: &[Segment]) -> String {
    let mut s = format!("  {label}\n");
    for seg in segs {
        let to = seg.to.as_deref().unwrap_or("inf");
        s += &format!("    ({}, {}]  slope {}\n", seg.from, to, seg.slope);
    }
    s
}

fn render_herbrand(name: &str, j: &HerbrandJson) -> String {
    format!("{name}:\n{}{}", render_segments("c-branch", &j.c_branch), render_segments("i-branch", &j.i_branch))
}

fn cmd_herbrand(args: HerbrandArgs) -> Result<u8> {
    let mode: Mode = args.mode.into();
    let mut jumps: Vec<(RamIndex2, u64)> = Vec::new();
    for part in args.jumps.iter().flat_map(|j| j.split(';')).filter(|s| !s.trim().is_empty()) {
        let (idx, order) = part
            .split_once(",order=")
            .ok_or_else(|| anyhow!("jump {part:?} must look like INDEX,order=N"))?;
        jumps.push((parse_index(idx)?, order.trim().parse().with_context(|| format!("order in {part:?}"))?));
    }
    jumps.sort_by_key(|j| j.0);
    let n = jumps.iter().map(|j| j.1).max().unwrap_or(1);
    let p = prime_power_base(n).ok_or_else(|| anyhow!("group order {n} is not a prime power"))?;
    let group = Arc::new(AbelianGroup::new(vec![u32::try_from(n)?])?);
    let mut chain = Vec::new();
    for (idx, order) in jumps {
        if order == 0 || n % order != 0 {
            bail!("order {order} does not divide {n}");
        }
        chain.push((idx, group.multiple(u32::try_from(n / order)?)));
    }
    let numbering = if args.upper { Numbering::Upper } else { Numbering::Lower };
    let mut fg = FilteredGroup::on_group(&group, chain, numbering)?;
    if args.upper {
        fg = upper_to_lower(&fg)?;
    }
    let phi = HerbrandFn::build_phi_auto_in(&fg, mode)?;
    let psi = phi.invert();

    if args.json {
        let j = serde_json::json!({ "phi": phi.to_json(), "psi": psi.to_json() });
        println!("{}", serde_json::to_string_pretty(&j)?);
        return Ok(0);
    }
    let mut out = format!("G = Z/{n} (p = {p}), lower jumps:");
    for (idx, h) in fg.jumps() {
        out += &format!(" {idx}:{}", h.order());
    }
    out.push('\n');
    out += &render_herbrand("Phi", &phi.to_json());
    out += &render_herbrand("Psi", &psi.to_json());
    out += "samples:\n";
    let mut samples: Vec<RamIndex2> = ["-1", "0", "c:1", "c:2", "i:1/2", "i:1", "i:2", "i:5"]
        .iter()
        .map(|s| s.parse().expect("literal index"))
        .collect();
    samples.extend(fg.jumps().iter().map(|(i, _)| *i));
    if mode == Mode::A2 {
        samples.push("(1,1)".parse().expect("literal index"));
    }
    samples.sort();
    samples.dedup();
    for x in samples {
        out += &format!("  Phi({x}) = {}    Psi({x}) = {}\n", phi.eval(&x)?, psi.eval(&x)?);
    }
    print!("{out}");
    Ok(0)
}

fn cmd_tower(args: TowerArgs) -> Result<u8> {
    let steps = args
        .steps
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<ExtStep>().map_err(|e| anyhow!("bad step {s:?}: {e}")))
        .collect::<Result<Vec<_>>>()?;
    let alpha: Pair = args.alpha.trim().parse().map_err(|e| anyhow!("bad alpha {:?}: {e}", args.alpha))?;
    let res = tower_norm_index(alpha, &steps)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&res.to_json(alpha, &steps))?);
        return Ok(0);
    }
    let mut out = format!("alpha = {alpha}\n");
    for (step, r) in steps.iter().zip(res.path.iter().skip(1)) {
        out += &format!("  {step:<28} -> {}  (index exponent so far {})\n", r.target, r.cofactor_exponent);
    }
    let p = steps.first().map(|s| s.p).unwrap_or(1);
    out += &format!("target = {}, index {p}^{}\n", res.result.target, res.result.cofactor_exponent);
    out += &render_herbrand("Phi_2", &res.phi.to_json());
    out += "Phi_2 cross-check: PASS\n";
    print!("{out}");
    Ok(0)
}

fn parse_factor(s: &str, p: u64) -> Result<u32> {
    let s = s.trim();
    let v = match s.strip_prefix("p") {
        Some("") => p,
        Some(rest) => {
            let k: u32 = rest.strip_prefix('^').ok_or_else(|| anyhow!("bad factor {s:?}"))?.parse()?;
            p.checked_pow(k).ok_or_else(|| anyhow!("factor {s:?} too large"))?
        }
        None => s.parse().with_context(|| format!("bad factor {s:?}"))?,
    };
    Ok(u32::try_from(v)?)
}

fn parse_subgroup(s: &str, p: u64, group: &Arc<AbelianGroup>) -> Result<Subgroup> {
    let s = s.trim();
    match s {
        "G" => Ok(group.whole()),
        "0" | "1" | "e" => Ok(group.trivial()),
        _ => {
            let m = s.strip_suffix('G').ok_or_else(|| anyhow!("bad subgroup {s:?}"))?;
            Ok(group.multiple(parse_factor(m, p)?))
        }
    }
}

fn cmd_group(args: GroupArgs) -> Result<u8> {
    let mode: Mode = args.mode.into();
    let factors = args.cyclic.split(',').map(|f| parse_factor(f, args.p)).collect::<Result<Vec<_>>>()?;
    let group = Arc::new(AbelianGroup::new(factors)?);
    let mut chain = Vec::new();
    for part in args.jumps.split(';').filter(|s| !s.trim().is_empty()) {
        let (idx, sub) = part.split_once('=').ok_or_else(|| anyhow!("jump {part:?} must look like INDEX=SUBGROUP"))?;
        chain.push((parse_index(idx)?, parse_subgroup(sub, args.p, &group)?));
    }
    let fg = FilteredGroup::on_group(&group, chain, Numbering::Lower)?;
    let h = parse_subgroup(&args.quotient, args.p, &group)?;

    let sub = fg.subgroup_filtration(&h)?;
    let sub_ok = fg.jumps().iter().chain(sub.jumps()).all(|(x, _)| sub.at(x) == fg.at(x).intersect(&h));
    let via_lower = lower_to_upper(&quotient_lower(&fg, &h)?)?;
    let via_upper = quotient_upper(&fg, &h)?;
    let quot_ok = via_lower == via_upper;
    let phi = HerbrandFn::build_phi_auto_in(&fg, mode)?;
    let verdict = if sub_ok && quot_ok { "PASS" } else { "FAIL" };

    if args.json {
        let j = serde_json::json!({
            "group": fg.to_json(),
            "phi": phi.to_json(),
            "quotient_upper": via_upper.to_json(),
            "subgroup_check": sub_ok,
            "quotient_check": quot_ok,
        });
        println!("{}", serde_json::to_string_pretty(&j)?);
    } else {
        let mut out = format!("G = {group}, H = {} (|H| = {})\n", args.quotient.trim(), h.order());
        out += &format!("lower filtration: {}\n", describe(&fg));
        out += &render_herbrand("Phi_G", &phi.to_json());
        out += &format!("H_alpha = H ∩ G_alpha: {}\n", if sub_ok { "PASS" } else { "FAIL" });
        out += &format!("(G/H)_alpha upper-numbered: {}\n", describe(&via_lower));
        out += &format!("G^alpha H/H:                {}\n", describe(&via_upper));
        out += &format!("(G/H)^alpha = G^alpha H/H: {verdict}\n");
        print!("{out}");
    }
    Ok(if verdict == "PASS" { 0 } else { 1 })
}

fn describe(fg: &FilteredGroup) -> String {
    if fg.jumps().is_empty() {
        return "trivial".into();
    }
    fg.jumps().iter().map(|(i, h)| format!("{i} -> order {}", fg.relative_order(h))).collect::<Vec<_>>().join(", ")
}
