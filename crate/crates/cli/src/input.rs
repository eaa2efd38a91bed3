//! Argument parsing into library values, plus the resolution and horizon guards.

use std::fmt;
use std::path::Path;

use towerdyn::lp::SimpleFunction;
use towerdyn::rational::{self, Rational};
use towerdyn::shift::{ShiftKind, WeightSeq};
use towerdyn::{DyadicSet, LeveledSet, TowerSystem};

/// Default cap on the dyadic resolution `r` of any input or generated set.
pub const DEFAULT_MAX_R: u32 = 20;
/// Largest horizon accepted.
pub const HORIZON_CAP: i64 = 200_000;
pub const MAX_R_ENV: &str = "TOWERDYN_MAX_R";

#[derive(Debug)]
pub enum CliError {
    /// Malformed or inconsistent configuration; exit code 2.
    Config { field: String, message: String },
    /// Resolution or horizon cap exceeded; exit code 3.
    Guard { field: String, message: String },
}

impl CliError {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        CliError::Config { field: field.to_string(), message: message.into() }
    }

    pub fn guard(field: &str, message: impl Into<String>) -> Self {
        CliError::Guard { field: field.to_string(), message: message.into() }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Guard { .. } => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { field, message } => write!(f, "config error in {field}: {message}"),
            CliError::Guard { field, message } => write!(f, "guard violation in {field}: {message}"),
        }
    }
}

impl From<towerdyn::Error> for CliError {
    fn from(e: towerdyn::Error) -> Self {
        use towerdyn::Error as E;
        let field = match &e {
            E::OutOfRange { name, .. } => format!("--{name}"),
            E::ParseSet(_) | E::NotDyadic(_) | E::EmptyInterval { .. } | E::NotInLevel(_) => "--set".into(),
            E::Descriptor(_) | E::RequiresBdp(_) | E::StepFunction(_) => "--system".into(),
            E::Exponent(_) => "--p".into(),
            E::ParseRational(_) => "rational argument".into(),
            E::Address(_) | E::PositionOverflow => "level address".into(),
        };
        CliError::Config { field, message: e.to_string() }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// `r` cap from `TOWERDYN_MAX_R`, else [`DEFAULT_MAX_R`].
pub fn max_resolution() -> CliResult<u32> {
    match std::env::var(MAX_R_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::config(MAX_R_ENV, format!("{v:?} is not a non-negative integer"))),
        Err(_) => Ok(DEFAULT_MAX_R),
    }
}

pub fn check_resolution(field: &str, r: u64, cap: u32) -> CliResult<()> {
    if r > cap as u64 {
        return Err(CliError::guard(field, format!("resolution 2^-{r} finer than the cap 2^-{cap} (raise with {MAX_R_ENV})")));
    }
    Ok(())
}

pub fn check_horizon(h: i64) -> CliResult<()> {
    if h < 1 {
        return Err(CliError::config("--horizon", format!("{h} must be >= 1")));
    }
    if h > HORIZON_CAP {
        return Err(CliError::guard("--horizon", format!("{h} exceeds the cap {HORIZON_CAP}")));
    }
    Ok(())
}

pub fn rational_arg(field: &str, s: &str) -> CliResult<Rational> {
    rational::parse(s).map_err(|e| CliError::config(field, e.to_string()))
}

/// `bdp`, `geometric:<ratio>`, `identity`, or a path to a descriptor JSON file.
pub fn parse_system(s: &str) -> CliResult<TowerSystem> {
    let field = "--system";
    match s.trim() {
        "bdp" => Ok(TowerSystem::bdp()),
        "identity" | "identity-like" => Ok(TowerSystem::identity_like()),
        t => {
            if let Some(r) = t.strip_prefix("geometric:") {
                return TowerSystem::geometric(rational_arg(field, r)?).map_err(|e| CliError::config(field, e.to_string()));
            }
            let path = Path::new(t);
            if !path.is_file() {
                return Err(CliError::config(field, format!("{t:?} is neither a built-in system nor a readable file")));
            }
            let text = std::fs::read_to_string(path).map_err(|e| CliError::config(field, format!("{t}: {e}")))?;
            TowerSystem::from_json(&text).map_err(|e| CliError::config(field, e.to_string()))
        }
    }
}

/// Inline JSON or `@path`.
fn json_text(field: &str, s: &str) -> CliResult<String> {
    match s.strip_prefix('@') {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::config(field, format!("{p}: {e}"))),
        None => Ok(s.to_string()),
    }
}

/// Leveled set `{"<level>":"<set>"}`; `W` is the wandering set.
pub fn parse_leveled(field: &str, s: &str, cap: u32) -> CliResult<LeveledSet> {
    let set = if s.trim() == "W" {
        LeveledSet::wandering()
    } else {
        LeveledSet::from_json(&json_text(field, s)?).map_err(|e| CliError::config(field, e.to_string()))?
    };
    for (_, fiber) in set.iter() {
        check_resolution(field, fiber.resolution(), cap)?;
    }
    Ok(set)
}

/// Fiber set `lo:hi,...`, or `full` for `[0,1)`.
pub fn parse_fiber(field: &str, s: &str, cap: u32) -> CliResult<DyadicSet> {
    let set = if s.trim() == "full" { DyadicSet::unit() } else { s.parse().map_err(|e: towerdyn::Error| CliError::config(field, e.to_string()))? };
    check_resolution(field, set.resolution(), cap)?;
    Ok(set)
}

/// `chiW`, `zero`, or a JSON term list `[{"level":..,"set":..,"coeff":..}]`.
pub fn parse_simple(field: &str, s: &str, cap: u32) -> CliResult<SimpleFunction> {
    let f = match s.trim() {
        "chiW" => SimpleFunction::indicator(&LeveledSet::wandering(), rational::int(1)),
        "zero" => SimpleFunction::zero(),
        _ => SimpleFunction::from_json(&json_text(field, s)?).map_err(|e| CliError::config(field, e.to_string()))?,
    };
    for t in f.terms() {
        check_resolution(field, t.set.resolution(), cap)?;
    }
    Ok(f)
}

/// `system`, `constant:<w^p>` or `periodic:<a>,<b>,...`.
pub fn parse_weights(s: &str, sys: &TowerSystem, kind: ShiftKind, p: &Rational) -> CliResult<WeightSeq> {
    let field = "--weights";
    let t = s.trim();
    let ws = if t == "system" {
        if kind != ShiftKind::Bilateral {
            return Err(CliError::config("--kind", "system-induced weights are bilateral"));
        }
        WeightSeq::from_system(sys, p.clone())
    } else if let Some(c) = t.strip_prefix("constant:") {
        WeightSeq::constant(kind, p.clone(), rational_arg(field, c)?)
    } else if let Some(list) = t.strip_prefix("periodic:") {
        let pattern = list.split(',').map(|x| rational_arg(field, x)).collect::<CliResult<Vec<_>>>()?;
        WeightSeq::periodic(kind, p.clone(), pattern)
    } else {
        return Err(CliError::config(field, format!("unknown weight source {t:?}")));
    };
    ws.map_err(|e| CliError::config(field, e.to_string()))
}

/// Integer exponent for exact `L^p` norms.
pub fn integer_p(p: &Rational) -> CliResult<u32> {
    if !p.is_integer() || *p < rational::int(1) {
        return Err(CliError::config("--p", format!("{p} must be an integer >= 1 for exact L^p norms")));
    }
    p.to_integer().try_into().map_err(|_| CliError::config("--p", format!("{p} too large")))
}

/// Scalar rendering: integers bare, otherwise `num/den`.
pub fn plain(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        rational::to_num_den(x)
    }
}
