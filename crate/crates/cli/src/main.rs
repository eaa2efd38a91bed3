//! `towerdyn`: build tower systems, run the condition checkers and reproduce the
//! mixing/non-Kitai pipeline, emitting JSON or CSV reports.
//!
//! Exit codes: 0 when a verdict was computed (including failures with
//! certificate), 2 on configuration errors, 3 on guard violations.

mod input;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use towerdyn::conditions::{
    check_hsc, check_ksc, check_msc, classify_with, grc_witness, kitai_generator_check, Property, Schedule, Verdict,
};
use towerdyn::lp::{apply_op, frechet, inverse_orbit_floor, lp_norm_p, SimpleFunction};
use towerdyn::rational::{self, Rational};
use towerdyn::shift::{
    bdp_exceptional_positions, classify_bilateral, classify_unilateral, equicontinuity_probe, product_criterion, ExampleNorm,
    NormSeq, NormSource, ShiftKind,
};
use towerdyn::tower::block_start;
use towerdyn::{sample, LeveledSet, TowerSystem};

use input::{CliError, CliResult};
use output::{csv_concat, csv_rows, Format, Rendered, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "towerdyn", version, about = "Exact dynamics of dissipative tower systems and their composition operators")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// `bdp`, `geometric:<ratio>`, `identity`, or a path to a system descriptor JSON file.
    #[arg(long, global = true, default_value = "bdp")]
    system: String,
    #[arg(long, global = true, default_value_t = 100, allow_hyphen_values = true)]
    horizon: i64,
    /// `block`, `dyadic`, `inverse-log` or `constant:<a/b>`.
    #[arg(long, global = true, default_value = "block")]
    schedule: String,
    #[arg(long, global = true, default_value = "1/4", allow_hyphen_values = true)]
    epsilon: String,
    /// Dyadic resolution `r` (grid `2^-r`) for generated sets and refinements.
    #[arg(long, global = true, default_value_t = 8)]
    resolution: u32,
    #[arg(long, global = true, default_value = "1", allow_hyphen_values = true)]
    p: String,
    /// Output format; scalar commands print a bare value when omitted, others JSON.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Inspect a tower system.
    #[command(subcommand)]
    System(SystemCmd),
    /// Run one condition checker.
    Check(CheckArgs),
    /// Run every checker on the wandering set and derive property labels.
    Classify,
    /// Weighted backward shifts induced by the system.
    #[command(subcommand)]
    Shift(ShiftCmd),
    /// Composition-operator orbits of `δχ_B`.
    Orbit(OrbitArgs),
    /// Fréchet distance `inf_ξ μ(|φ−ψ| ≥ ξ) + ξ`.
    Metric(MetricArgs),
    /// Fixed reproduction pipelines.
    Reproduce(ReproduceArgs),
}

#[derive(Subcommand, Debug)]
enum SystemCmd {
    /// Descriptor, level measures `μ(f^n W)` for `|n| ≤ H`, distortion.
    Info,
    /// Measure of a leveled set.
    Measure {
        /// `{"<level>":"<set>"}` JSON, `@file`, or `W`.
        #[arg(long)]
        set: String,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    Msc,
    Hsc,
    Ksc,
    Grc,
    Kitai,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(value_enum)]
    kind: CheckKind,
    /// Level `m` holding `A`.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    level: i64,
    /// Fiber of `A` at level `m`: `lo:hi,...`, `full`, or `random` (seeded, at `--resolution`).
    #[arg(long, default_value = "full")]
    fiber: String,
}

#[derive(Subcommand, Debug)]
enum ShiftCmd {
    /// Weights `w_k^p` for `|k| ≤ H`.
    Weights(WeightArgs),
    /// Coordinate-norm criteria.
    Classify(ShiftClassifyArgs),
    /// Product criterion on the weights.
    Products(WeightArgs),
    /// Norms of `x_n e_n` with `x_n = n·H_n` under an example norm.
    Probe {
        #[arg(long, default_value = "abel")]
        norm: String,
        #[arg(long, default_value_t = 1000)]
        n: u64,
    },
}

#[derive(Args, Debug)]
struct WeightArgs {
    /// `system`, `constant:<w^p>` or `periodic:<a>,<b>,...`.
    #[arg(long, default_value = "system")]
    weights: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Bilateral,
    Unilateral,
}

#[derive(Args, Debug)]
struct ShiftClassifyArgs {
    #[arg(long, value_enum, default_value = "bilateral")]
    kind: Kind,
    /// Index radius `J` for the bilateral criterion.
    #[arg(long, default_value_t = 0)]
    j: i64,
    /// Norm source: `system`, `geometric:<ρ>` or `constant:<c>` (values are `‖e_n‖^p`).
    #[arg(long, default_value = "system")]
    norms: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Direction {
    Forward,
    Inverse,
}

#[derive(Args, Debug)]
struct OrbitArgs {
    #[arg(value_enum)]
    direction: Direction,
    /// `{"<level>":"<set>"}` JSON, `@file`, or `W`.
    #[arg(long, default_value = "W")]
    set: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    delta: String,
}

#[derive(Args, Debug)]
struct MetricArgs {
    /// `chiW`, `zero`, a JSON term list or `@file`.
    #[arg(long)]
    phi: String,
    #[arg(long, default_value = "zero")]
    psi: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Pipeline {
    /// Mixing but not Kitai: bdp through MSC, KSC and classification.
    #[value(name = "thm38")]
    Counterexample,
    /// Induced weights, partial products, `D` and the not-mixing certificate.
    #[value(name = "prop61")]
    WeightedShift,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    #[arg(value_enum)]
    pipeline: Pipeline,
}

/// Parsed global options.
struct Ctx {
    sys: TowerSystem,
    horizon: i64,
    schedule: Schedule,
    eps: Rational,
    resolution: u32,
    max_r: u32,
    p: Rational,
    seed: u64,
}

impl Ctx {
    fn from_global(g: &Global) -> CliResult<Self> {
        let max_r = input::max_resolution()?;
        input::check_resolution("--resolution", g.resolution as u64, max_r)?;
        input::check_horizon(g.horizon)?;
        let schedule: Schedule = g.schedule.parse().map_err(|e: towerdyn::Error| CliError::config("--schedule", e.to_string()))?;
        let eps = input::rational_arg("--epsilon", &g.epsilon)?;
        if eps <= Rational::default() {
            return Err(CliError::config("--epsilon", format!("{eps} must be > 0")));
        }
        let p = input::rational_arg("--p", &g.p)?;
        if p < rational::int(1) {
            return Err(CliError::config("--p", format!("{p} must be >= 1")));
        }
        Ok(Ctx {
            sys: input::parse_system(&g.system)?,
            horizon: g.horizon,
            schedule,
            eps,
            resolution: g.resolution,
            max_r,
            p,
            seed: g.seed,
        })
    }

    fn config(&self, command: &str) -> RunConfig {
        RunConfig {
            command: command.to_string(),
            system: serde_json::to_value(self.sys.descriptor()).expect("descriptor serializes"),
            horizon: self.horizon,
            schedule: self.schedule.to_string(),
            epsilon: rational::to_num_den(&self.eps),
            resolution: self.resolution,
            p: rational::to_num_den(&self.p),
            seed: self.seed,
        }
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::HoldsToHorizon => "holds",
        Verdict::FailsWithCertificate => "fails",
        Verdict::Inconclusive => "inconclusive",
    }
}

fn command_name(c: &Command) -> String {
    match c {
        Command::System(SystemCmd::Info) => "system info".into(),
        Command::System(SystemCmd::Measure { .. }) => "system measure".into(),
        Command::Check(a) => format!("check {}", a.kind.to_possible_value().expect("named").get_name()),
        Command::Classify => "classify".into(),
        Command::Shift(ShiftCmd::Weights(_)) => "shift weights".into(),
        Command::Shift(ShiftCmd::Classify(_)) => "shift classify".into(),
        Command::Shift(ShiftCmd::Products(_)) => "shift products".into(),
        Command::Shift(ShiftCmd::Probe { .. }) => "shift probe".into(),
        Command::Orbit(a) => format!("orbit {}", a.direction.to_possible_value().expect("named").get_name()),
        Command::Metric(_) => "metric".into(),
        Command::Reproduce(a) => format!("reproduce {}", a.pipeline.to_possible_value().expect("named").get_name()),
    }
}

fn system_info(ctx: &Ctx) -> CliResult<Rendered> {
    let h = ctx.horizon;
    let sys = &ctx.sys;
    let w = sys.wandering_position();
    let levels: Vec<i64> = (-h..=h).collect();
    let measures: Vec<Rational> = levels.iter().map(|&n| sys.level_measure(w + n)).collect();
    let k = h.min(200);
    let distortion = sys.distortion_constant(-k..=k, ctx.resolution)?;
    #[derive(Serialize)]
    struct Info {
        descriptor: towerdyn::tower::SystemDescriptor,
        bdp: bool,
        shift_invariant: bool,
        wandering_position: i64,
        /// `μ(f^n W)` for `n = -H..=H`
        #[serde(with = "rational::vec_num_den")]
        level_measures: Vec<Rational>,
        distortion_range: i64,
        #[serde(with = "rational::as_num_den")]
        distortion: Rational,
        #[serde(skip_serializing_if = "Option::is_none")]
        block_starts: Option<Vec<i64>>,
    }
    let block_starts = sys.is_bdp().then(|| (1..=8).filter_map(block_start).take_while(|&p| p <= h.max(1)).collect());
    let info = Info {
        descriptor: sys.descriptor(),
        bdp: sys.is_bdp(),
        shift_invariant: sys.is_shift_invariant(),
        wandering_position: w,
        level_measures: measures.clone(),
        distortion_range: k,
        distortion,
        block_starts,
    };
    let csv = csv_rows(levels.iter().zip(&measures).map(|(&n, v)| (n, v, "mu_level")));
    Ok(Rendered::new(&info, csv))
}

fn system_measure(ctx: &Ctx, set: &str) -> CliResult<Rendered> {
    let s = input::parse_leveled("--set", set, ctx.max_r)?;
    let m = ctx.sys.measure(&s);
    let report = json!({ "set": serde_json::to_value(&s).expect("set serializes"), "measure": rational::to_num_den(&m) });
    Ok(Rendered::scalar(&report, csv_rows([(0, &m, "measure")]), input::plain(&m)))
}

fn check(ctx: &Ctx, a: &CheckArgs) -> CliResult<Rendered> {
    let (sys, h, sched) = (&ctx.sys, ctx.horizon, &ctx.schedule);
    if a.kind == CheckKind::Kitai {
        let r = kitai_generator_check(sys, h, sched)?;
        return Ok(Rendered::new(&r, r.to_csv()));
    }
    let fiber = if a.fiber.trim() == "random" {
        let cells = 1u64 << ctx.resolution;
        sample::dyadic_set_with_holes(&mut ctx.rng(), ctx.resolution, cells / 4)
    } else {
        input::parse_fiber("--fiber", &a.fiber, ctx.max_r)?
    };
    let set = LeveledSet::single(a.level, fiber);
    let r = match a.kind {
        CheckKind::Msc => check_msc(sys, a.level, &set, h, sched)?,
        CheckKind::Hsc => check_hsc(sys, a.level, &set, h, sched)?,
        CheckKind::Ksc => check_ksc(sys, a.level, &set, &ctx.eps, h, sched)?,
        CheckKind::Grc => grc_witness(sys, a.level, &set, &ctx.eps, h, sched)?,
        CheckKind::Kitai => unreachable!("handled above"),
    };
    Ok(Rendered::new(&r, r.to_csv()))
}

fn classify(ctx: &Ctx) -> CliResult<Rendered> {
    let r = classify_with(&ctx.sys, ctx.horizon, &ctx.schedule, &ctx.eps)?;
    let tags: Vec<(String, String)> =
        r.conditions.iter().map(|c| (format!("{}_achieved", c.condition), format!("{}_target", c.condition))).collect();
    let csv = csv_rows(
        r.conditions
            .iter()
            .zip(&tags)
            .flat_map(|(c, (ta, tt))| [(r.horizon, &c.achieved, ta.as_str()), (r.horizon, &c.target, tt.as_str())]),
    );
    Ok(Rendered::new(&r, csv))
}

fn shift_kind(k: Kind) -> ShiftKind {
    match k {
        Kind::Bilateral => ShiftKind::Bilateral,
        Kind::Unilateral => ShiftKind::Unilateral,
    }
}

fn shift_weights(ctx: &Ctx, a: &WeightArgs) -> CliResult<Rendered> {
    let ws = input::parse_weights(&a.weights, &ctx.sys, ShiftKind::Bilateral, &ctx.p)?;
    let h = ctx.horizon;
    Ok(Rendered::new(&ws.window(-h..=h), ws.to_csv(-h..=h)))
}

fn products_csv(r: &towerdyn::shift::ProductReport) -> String {
    csv_rows(
        r.forward
            .iter()
            .enumerate()
            .map(|(i, v)| (i as i64 + 1, v, "prod_fwd"))
            .chain(r.backward.iter().enumerate().map(|(i, v)| (i as i64 + 1, v, "prod_back"))),
    )
}

fn shift_products(ctx: &Ctx, a: &WeightArgs) -> CliResult<Rendered> {
    let ws = input::parse_weights(&a.weights, &ctx.sys, ShiftKind::Bilateral, &ctx.p)?;
    let r = product_criterion(&ws, ctx.horizon, &ctx.schedule)?;
    Ok(Rendered::new(&r, products_csv(&r)))
}

fn shift_classify(ctx: &Ctx, a: &ShiftClassifyArgs) -> CliResult<Rendered> {
    let kind = shift_kind(a.kind);
    let src = a.norms.trim();
    let source = if src == "system" {
        NormSource::System(ctx.sys.clone())
    } else if let Some(r) = src.strip_prefix("geometric:") {
        NormSource::Geometric(input::rational_arg("--norms", r)?)
    } else if let Some(c) = src.strip_prefix("constant:") {
        NormSource::Constant(input::rational_arg("--norms", c)?)
    } else {
        return Err(CliError::config("--norms", format!("unknown norm source {src:?}")));
    };
    let ns = NormSeq::new(kind, ctx.p.clone(), source).map_err(|e| CliError::config("--norms", e.to_string()))?;
    let v = match kind {
        ShiftKind::Bilateral => classify_bilateral(&ns, a.j, ctx.horizon, &ctx.schedule)?,
        ShiftKind::Unilateral => classify_unilateral(&ns, ctx.horizon, &ctx.schedule)?,
    };
    let csv = csv_rows(v.values.iter().enumerate().map(|(i, x)| (i as i64 + 1, x, "compared")));
    Ok(Rendered::new(&v, csv))
}

fn shift_probe(norm: &str, n: u64) -> CliResult<Rendered> {
    let which: ExampleNorm = norm.parse().map_err(|e: towerdyn::Error| CliError::config("--norm", e.to_string()))?;
    if n > input::HORIZON_CAP as u64 {
        return Err(CliError::guard("--n", format!("{n} exceeds the cap {}", input::HORIZON_CAP)));
    }
    let r = equicontinuity_probe(which, n)?;
    let csv = csv_rows(r.rows.iter().flat_map(|row| [(row.n as i64, &row.norm, "norm"), (row.n as i64, &row.ratio, "H_n")]));
    Ok(Rendered::new(&r, csv))
}

fn orbit(ctx: &Ctx, a: &OrbitArgs) -> CliResult<Rendered> {
    let b = input::parse_leveled("--set", &a.set, ctx.max_r)?;
    let delta = input::rational_arg("--delta", &a.delta)?;
    let p = input::integer_p(&ctx.p)?;
    let h = ctx.horizon;
    match a.direction {
        Direction::Forward => {
            let phi = SimpleFunction::indicator(&b, delta.clone());
            let values = (0..=h).map(|n| lp_norm_p(&ctx.sys, &apply_op(&phi, n), p)).collect::<Result<Vec<_>, _>>()?;
            #[derive(Serialize)]
            struct ForwardOrbit {
                horizon: i64,
                p: u32,
                #[serde(with = "rational::as_num_den")]
                delta: Rational,
                /// `‖T_f^n(δχ_B)‖_p^p = δ^p μ(f^{-n}B)`, `n = 0..=H`
                #[serde(with = "rational::vec_num_den")]
                values: Vec<Rational>,
            }
            let csv = csv_rows(values.iter().enumerate().map(|(n, v)| (n as i64, v, "lp_norm_p")));
            Ok(Rendered::new(&ForwardOrbit { horizon: h, p, delta, values }, csv))
        }
        Direction::Inverse => {
            let r = inverse_orbit_floor(&ctx.sys, &b, &delta, p, h)?;
            let witnessed: Vec<(i64, Rational)> =
                r.witnessed.iter().map(|(k, v)| (*k, rational::parse(v).expect("own output"))).collect();
            let csv = csv_rows(
                r.values
                    .iter()
                    .enumerate()
                    .map(|(n, v)| (-(n as i64), v, "lp_norm_p"))
                    .chain(witnessed.iter().map(|(k, v)| (-*k, v, "witnessed"))),
            );
            Ok(Rendered::new(&r, csv))
        }
    }
}

fn metric(ctx: &Ctx, a: &MetricArgs) -> CliResult<Rendered> {
    let phi = input::parse_simple("--phi", &a.phi, ctx.max_r)?;
    let psi = input::parse_simple("--psi", &a.psi, ctx.max_r)?;
    let d = frechet(&ctx.sys, &phi, &psi);
    Ok(Rendered::scalar(&d, csv_rows([(0, &d.value, "frechet")]), input::plain(&d.value)))
}

fn reproduce_counterexample(ctx: &Ctx) -> CliResult<Rendered> {
    if !ctx.sys.is_bdp() {
        return Err(CliError::config("--system", "reproduce thm38 runs on the bdp system"));
    }
    let (sys, h, sched) = (&ctx.sys, ctx.horizon, &ctx.schedule);
    let w = LeveledSet::wandering();
    let msc = check_msc(sys, 0, &w, h, sched)?;
    let ksc = check_ksc(sys, 0, &w, &ctx.eps, h, sched)?;
    let classification = classify_with(sys, h, sched, &ctx.eps)?;
    let generator = kitai_generator_check(sys, h, sched)?;
    let d: Vec<i64> = generator.exceptional.iter().copied().take(7).collect();
    let report = json!({
        "system": sys.name(),
        "horizon": h,
        "mixing": verdict_word(msc.verdict),
        "kitai": verdict_word(ksc.verdict),
        "d_prefix": d,
        "exceptional": generator.exceptional,
        "labels": {
            "mixing": classification.label(Property::Mixing).verdict,
            "kitai": classification.label(Property::Kitai).verdict,
        },
        "msc": msc,
        "ksc": ksc,
        "classification": classification,
        "generator": generator,
    });
    let csv = csv_concat(&[generator.to_csv(), msc.to_csv()]);
    Ok(Rendered { report, csv, plain: None })
}

fn reproduce_weighted_shift(ctx: &Ctx) -> CliResult<Rendered> {
    if !ctx.sys.is_bdp() {
        return Err(CliError::config("--system", "reproduce prop61 runs on the bdp system"));
    }
    let h = ctx.horizon;
    let ws = input::parse_weights("system", &ctx.sys, ShiftKind::Bilateral, &ctx.p)?;
    let products = product_criterion(&ws, h, &ctx.schedule)?;
    let d = bdp_exceptional_positions(h);
    let not_mixing = products.mixing == Verdict::FailsWithCertificate;
    let report = json!({
        "system": ctx.sys.name(),
        "horizon": h,
        "weights": ws.window(-h..=h),
        "exceptional": d,
        "products_at_most_one": products.at_most_one,
        "mixing": verdict_word(products.mixing),
        "hypercyclic": verdict_word(products.hypercyclic),
        "not_mixing_certificate": not_mixing.then(|| products.mixing_basis.clone()),
        "products": products,
    });
    let csv = csv_concat(&[ws.to_csv(-h..=h), products_csv(&products)]);
    Ok(Rendered { report, csv, plain: None })
}

fn run(cli: &Cli) -> CliResult<String> {
    let ctx = Ctx::from_global(&cli.global)?;
    let rendered = match &cli.command {
        Command::System(SystemCmd::Info) => system_info(&ctx)?,
        Command::System(SystemCmd::Measure { set }) => system_measure(&ctx, set)?,
        Command::Check(a) => check(&ctx, a)?,
        Command::Classify => classify(&ctx)?,
        Command::Shift(ShiftCmd::Weights(a)) => shift_weights(&ctx, a)?,
        Command::Shift(ShiftCmd::Products(a)) => shift_products(&ctx, a)?,
        Command::Shift(ShiftCmd::Classify(a)) => shift_classify(&ctx, a)?,
        Command::Shift(ShiftCmd::Probe { norm, n }) => shift_probe(norm, *n)?,
        Command::Orbit(a) => orbit(&ctx, a)?,
        Command::Metric(a) => metric(&ctx, a)?,
        Command::Reproduce(a) => match a.pipeline {
            Pipeline::Counterexample => reproduce_counterexample(&ctx)?,
            Pipeline::WeightedShift => reproduce_weighted_shift(&ctx)?,
        },
    };
    Ok(rendered.emit(&ctx.config(&command_name(&cli.command)), cli.global.format))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("towerdyn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

