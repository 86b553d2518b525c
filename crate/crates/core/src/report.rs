//! Bound curves, the summary table and their CSV/JSON/gnuplot rendering.
//!
//! Rows are produced N-major with methods in the order requested, so equal
//! requests render to identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::dephasing::{self, AsymptoticFamily, NoiseOrder};
use crate::error::{domain, Result};
use crate::lossbounds::{self, BoundMethod, BoundSample, LossConfig};
use crate::states::{StateFamily, TruncationPolicy};

pub const LOSS_CSV_HEADER: &str = "family,N,eta,method,F_upper,delta_phi_lower";
pub const DEPHASING_CSV_HEADER: &str =
    "family,N,strength_spread,N_E,method,F_upper,delta_phi_lower,validity_radius";

/// Points of the default grid, log-spaced over `[1, 20]`.
pub const DEFAULT_GRID_POINTS: usize = 40;

/// Output format of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    /// CSV data plus a log-log gnuplot script that plots it.
    Gnuplot,
}

impl OutputFormat {
    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "csv" => Some(Self::Csv),
            "json" => Some(Self::Json),
            "gnuplot" => Some(Self::Gnuplot),
            _ => None,
        }
    }
}

pub fn parse_family(tag: &str) -> Result<StateFamily> {
    match tag {
        "coherent" => Ok(StateFamily::Coherent),
        "squeezed_vacuum" | "sv" => Ok(StateFamily::SqueezedVacuum),
        "fock" => Ok(StateFamily::Fock),
        _ => Err(domain(format!(
            "unknown family {tag:?} (expected coherent, squeezed_vacuum or fock)"
        ))),
    }
}

/// Grid of mean photon numbers.
///
/// Fock grids keep only the integers in range, since Fock states need an
/// integer photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
}

impl Grid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(domain("the N grid is empty"));
        }
        if let Some(bad) = points.iter().find(|n| !(n.is_finite() && **n >= 0.0)) {
            return Err(domain(format!("grid point {bad} is not a valid mean photon number")));
        }
        Ok(Self { points })
    }

    /// `steps` log-spaced points from `n_min` to `n_max` inclusive.
    pub fn log_spaced(n_min: f64, n_max: f64, steps: usize) -> Result<Self> {
        if !(n_min > 0.0 && n_max >= n_min && n_max.is_finite()) {
            return Err(domain(format!("need 0 < n_min ≤ n_max, got [{n_min}, {n_max}]")));
        }
        if steps == 0 {
            return Err(domain("the N grid needs at least one step"));
        }
        if steps == 1 || n_max == n_min {
            return Self::new(vec![n_min]);
        }
        let (a, b) = (n_min.ln(), n_max.ln());
        let mut points: Vec<f64> = (0..steps)
            .map(|i| (a + (b - a) * i as f64 / (steps - 1) as f64).exp())
            .collect();
        points[0] = n_min;
        points[steps - 1] = n_max;
        Self::new(points)
    }

    /// Integers in `[n_min, n_max]`.
    pub fn integers(n_min: f64, n_max: f64) -> Result<Self> {
        if !(n_min >= 0.0 && n_max >= n_min && n_max.is_finite()) {
            return Err(domain(format!("need 0 ≤ n_min ≤ n_max, got [{n_min}, {n_max}]")));
        }
        let lo = n_min.ceil() as u64;
        let hi = n_max.floor() as u64;
        Self::new((lo..=hi).map(|n| n as f64).collect())
    }

    /// Log-spaced grid, or the integer grid for Fock states.
    pub fn for_family(family: StateFamily, n_min: f64, n_max: f64, steps: usize) -> Result<Self> {
        match family {
            StateFamily::Fock => Self::integers(n_min, n_max),
            _ => Self::log_spaced(n_min, n_max, steps),
        }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }
}

/// A requested loss method; `Analytic` resolves per family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LossMethodSpec {
    /// `analytic_sv` for squeezed vacuum, `analytic_general` otherwise.
    Analytic,
    Exact(BoundMethod),
}

impl LossMethodSpec {
    pub fn parse(tag: &str) -> Result<Self> {
        if tag == "analytic" {
            return Ok(Self::Analytic);
        }
        BoundMethod::from_tag(tag).map(Self::Exact).ok_or_else(|| {
            let known: Vec<&str> = BoundMethod::ALL.iter().map(|m| m.tag()).collect();
            domain(format!(
                "unknown loss method {tag:?} (expected analytic or one of {})",
                known.join(", ")
            ))
        })
    }

    pub fn resolve(self, family: StateFamily) -> BoundMethod {
        match self {
            Self::Analytic if family == StateFamily::SqueezedVacuum => BoundMethod::AnalyticSv,
            Self::Analytic => BoundMethod::AnalyticGeneral,
            Self::Exact(m) => m,
        }
    }

    /// The six curves of the loss figure, top to bottom.
    pub fn defaults() -> Vec<Self> {
        vec![
            Self::Analytic,
            Self::Exact(BoundMethod::Asymptotic),
            Self::Exact(BoundMethod::Averaged),
            Self::Exact(BoundMethod::WeakValue),
            Self::Exact(BoundMethod::BeforeLoss),
            Self::Exact(BoundMethod::Lossless),
        ]
    }
}

/// Parses a comma-separated method list.
pub fn parse_methods<T>(list: &str, parse: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    let methods = list
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(parse)
        .collect::<Result<Vec<_>>>()?;
    if methods.is_empty() {
        return Err(domain("no methods requested"));
    }
    Ok(methods)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossCurveRequest {
    pub family: StateFamily,
    pub eta: f64,
    pub grid: Grid,
    pub methods: Vec<LossMethodSpec>,
    /// Loss-count cutoff for `averaged` and `weak_value`; `None` is the full support.
    pub k_max: Option<usize>,
    pub repetitions: u32,
    pub policy: TruncationPolicy,
}

impl LossCurveRequest {
    pub fn new(family: StateFamily, eta: f64, grid: Grid) -> Self {
        Self {
            family,
            eta,
            grid,
            methods: LossMethodSpec::defaults(),
            k_max: None,
            repetitions: 1,
            policy: TruncationPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossRow {
    pub family: StateFamily,
    pub sample: BoundSample,
}

impl LossRow {
    pub fn n_mean(&self) -> f64 {
        self.sample.params["N"]
    }

    pub fn eta(&self) -> f64 {
        self.sample.params["eta"]
    }
}

fn loss_sample(req: &LossCurveRequest, n: f64, method: BoundMethod) -> Result<BoundSample> {
    let family = req.family;
    let eta = req.eta;
    let mut cfg = LossConfig::new(eta)?;
    if let Some(k) = req.k_max {
        cfg = cfg.with_k_max(k);
    }
    let state = || family.state(n, req.policy);
    let f = match method {
        BoundMethod::Lossless => lossbounds::bound_lossless(&family.moments(n)?),
        BoundMethod::BeforeLoss => lossbounds::bound_before_loss(&family.moments(n)?, eta)?,
        BoundMethod::VariationalMin => lossbounds::minimize_variational_qfi(&state()?, &cfg)?.f_min,
        BoundMethod::AnalyticGeneral => lossbounds::fmin_analytic_general(&family.moments(n)?, eta)?,
        BoundMethod::AnalyticSv => {
            if family != StateFamily::SqueezedVacuum {
                return Err(domain("analytic_sv only applies to squeezed vacuum"));
            }
            lossbounds::fmin_analytic_sv(n, eta)?
        }
        BoundMethod::Asymptotic => lossbounds::fmin_asymptotic(n, eta)?,
        BoundMethod::Averaged => lossbounds::bound_averaged(&state()?, &cfg),
        BoundMethod::WeakValue => lossbounds::bound_weak_value(&state()?, &cfg),
        BoundMethod::LinearReference => {
            let d = lossbounds::linear_loss_reference(n, eta)?;
            1.0 / (d * d)
        }
    };
    let params = BTreeMap::from([("N".to_string(), n), ("eta".to_string(), eta)]);
    Ok(BoundSample::from_fisher(method, params, f, req.repetitions))
}

/// Evaluates every (N, method) pair of the request.
pub fn loss_curve(req: &LossCurveRequest) -> Result<Vec<LossRow>> {
    if req.methods.is_empty() {
        return Err(domain("no methods requested"));
    }
    LossConfig::new(req.eta)?;
    let methods: Vec<BoundMethod> = req.methods.iter().map(|m| m.resolve(req.family)).collect();
    let per_n: Vec<Result<Vec<LossRow>>> = req
        .grid
        .points()
        .par_iter()
        .map(|&n| {
            methods
                .iter()
                .map(|&m| {
                    loss_sample(req, n, m).map(|sample| LossRow {
                        family: req.family,
                        sample,
                    })
                })
                .collect()
        })
        .collect();
    let mut rows = Vec::new();
    for chunk in per_n {
        rows.extend(chunk?);
    }
    Ok(rows)
}

/// Curves of the dephasing module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DephasingMethod {
    /// Full bound of the configured order.
    ExactBound,
    /// Large-`N` term: `βΔ/(√6 N)`, `βΔ/(√2 N)` or `√2 γΔ`.
    Asymptotic,
    /// `1/(2(Δn̂²))`, the bound without diffusion.
    Noiseless,
    /// Large-`N`, large-`N_E` closed form.
    EnvLimit,
}

impl DephasingMethod {
    pub const ALL: [Self; 4] = [Self::ExactBound, Self::Asymptotic, Self::Noiseless, Self::EnvLimit];

    pub fn tag(self) -> &'static str {
        match self {
            Self::ExactBound => "exact_bound",
            Self::Asymptotic => "asymptotic",
            Self::Noiseless => "noiseless",
            Self::EnvLimit => "env_limit",
        }
    }

    pub fn parse(tag: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|m| m.tag() == tag).ok_or_else(|| {
            domain(format!(
                "unknown dephasing method {tag:?} (expected exact_bound, asymptotic, noiseless or env_limit)"
            ))
        })
    }

    pub fn defaults() -> Vec<Self> {
        vec![Self::ExactBound, Self::Asymptotic, Self::Noiseless]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DephasingCurveRequest {
    pub family: StateFamily,
    pub order: NoiseOrder,
    /// `βΔ` or `γΔ` for an unsqueezed environment.
    pub strength_spread: f64,
    pub n_env: f64,
    pub grid: Grid,
    pub methods: Vec<DephasingMethod>,
    pub repetitions: u32,
}

impl DephasingCurveRequest {
    pub fn new(family: StateFamily, order: NoiseOrder, strength_spread: f64, grid: Grid) -> Self {
        Self {
            family,
            order,
            strength_spread,
            n_env: 0.0,
            grid,
            methods: DephasingMethod::defaults(),
            repetitions: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DephasingRow {
    pub family: StateFamily,
    pub n_mean: f64,
    pub strength_spread: f64,
    pub n_env: f64,
    pub method: DephasingMethod,
    pub f_upper: f64,
    pub delta_phi_lower: f64,
    /// Infinite for second-order diffusion, whose bound carries no small-phase condition.
    pub validity_radius: f64,
}

fn dephasing_row(req: &DephasingCurveRequest, n: f64, method: DephasingMethod) -> Result<DephasingRow> {
    let family = req.family;
    let env = dephasing::bound_with_environment(n, req.n_env, req.strength_spread, family, req.order);
    let single_shot = match method {
        DephasingMethod::ExactBound => env?.delta_phi,
        DephasingMethod::Asymptotic => env?.asymptotic,
        DephasingMethod::EnvLimit => env?.env_limit,
        DephasingMethod::Noiseless => {
            let v = family.moments(n)?.var_n2;
            lossbounds::delta_phi_from_f(4.0 * v, 1)
        }
    };
    let f = if single_shot == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (single_shot * single_shot)
    };
    let spread = req.strength_spread * dephasing::env_squeezing_delta(req.n_env)?;
    let validity_radius = match req.order {
        NoiseOrder::Linear => dephasing::validity_radius(&family.moments(n)?, spread),
        NoiseOrder::SecondOrder => f64::INFINITY,
    };
    Ok(DephasingRow {
        family,
        n_mean: n,
        strength_spread: req.strength_spread,
        n_env: req.n_env,
        method,
        f_upper: f,
        delta_phi_lower: lossbounds::delta_phi_from_f(f, req.repetitions),
        validity_radius,
    })
}

/// Evaluates every (N, method) pair of the request.
pub fn dephasing_curve(req: &DephasingCurveRequest) -> Result<Vec<DephasingRow>> {
    if req.methods.is_empty() {
        return Err(domain("no methods requested"));
    }
    dephasing::DephasingConfig::new(req.order, req.strength_spread)?.with_environment(req.n_env)?;
    if req.order == NoiseOrder::Linear {
        AsymptoticFamily::of(req.family)?;
    }
    let per_n: Vec<Result<Vec<DephasingRow>>> = req
        .grid
        .points()
        .par_iter()
        .map(|&n| req.methods.iter().map(|&m| dephasing_row(req, n, m)).collect())
        .collect();
    let mut rows = Vec::new();
    for chunk in per_n {
        rows.extend(chunk?);
    }
    Ok(rows)
}

/// Shortest decimal that parses back to the same `f64`; `inf` for infinity.
pub fn format_float(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:?}")
    }
}

fn json_float(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

pub fn loss_csv(rows: &[LossRow]) -> String {
    let mut out = String::from(LOSS_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let s = &r.sample;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.family.name(),
            format_float(r.n_mean()),
            format_float(r.eta()),
            s.method.tag(),
            format_float(s.f_upper),
            format_float(s.delta_phi_lower)
        );
    }
    out
}

pub fn loss_json(rows: &[LossRow]) -> String {
    let values: Vec<Value> = rows
        .iter()
        .map(|r| {
            let s = &r.sample;
            json!({
                "family": r.family.name(),
                "N": r.n_mean(),
                "eta": r.eta(),
                "method": s.method.tag(),
                "F_upper": json_float(s.f_upper),
                "delta_phi_lower": json_float(s.delta_phi_lower),
                "diverged": s.diverged(),
            })
        })
        .collect();
    serde_json::to_string_pretty(&values).expect("rows serialize") + "\n"
}

pub fn dephasing_csv(rows: &[DephasingRow]) -> String {
    let mut out = String::from(DEPHASING_CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.family.name(),
            format_float(r.n_mean),
            format_float(r.strength_spread),
            format_float(r.n_env),
            r.method.tag(),
            format_float(r.f_upper),
            format_float(r.delta_phi_lower),
            format_float(r.validity_radius)
        );
    }
    out
}

pub fn dephasing_json(rows: &[DephasingRow]) -> String {
    let values: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "family": r.family.name(),
                "N": r.n_mean,
                "strength_spread": r.strength_spread,
                "N_E": r.n_env,
                "method": r.method.tag(),
                "F_upper": json_float(r.f_upper),
                "delta_phi_lower": json_float(r.delta_phi_lower),
                "validity_radius": json_float(r.validity_radius),
                "diverged": r.delta_phi_lower.is_infinite(),
            })
        })
        .collect();
    serde_json::to_string_pretty(&values).expect("rows serialize") + "\n"
}

/// Log-log gnuplot script plotting `delta_phi_lower` against `N`, one curve
/// per method, from `csv_name` (resolved relative to the script).
pub fn gnuplot_script(csv_name: &str, title: &str, method_column: usize, delta_column: usize, methods: &[&str]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "set datafile separator ','");
    let _ = writeln!(out, "set logscale xy");
    let _ = writeln!(out, "set xlabel 'N'");
    let _ = writeln!(out, "set ylabel 'delta phi'");
    let _ = writeln!(out, "set title '{title}'");
    let _ = writeln!(out, "set key outside right");
    let _ = writeln!(out, "data = '{csv_name}'");
    let curves: Vec<String> = methods
        .iter()
        .map(|m| {
            format!(
                "data every ::1 using 2:(strcol({method_column}) eq '{m}' ? ${delta_column} : 1/0) with linespoints title '{m}'"
            )
        })
        .collect();
    let _ = writeln!(out, "plot {}", curves.join(", \\\n     "));
    out
}

fn distinct<'a>(tags: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut seen: Vec<&str> = Vec::new();
    for t in tags {
        if !seen.contains(&t) {
            seen.push(t);
        }
    }
    seen
}

pub fn loss_gnuplot(rows: &[LossRow], csv_name: &str) -> String {
    let title = rows
        .first()
        .map(|r| format!("{} loss, eta = {}", r.family.name(), format_float(r.eta())))
        .unwrap_or_default();
    gnuplot_script(csv_name, &title, 4, 6, &distinct(rows.iter().map(|r| r.sample.method.tag())))
}

pub fn dephasing_gnuplot(rows: &[DephasingRow], csv_name: &str) -> String {
    let title = rows
        .first()
        .map(|r| format!("{} dephasing, spread = {}", r.family.name(), format_float(r.strength_spread)))
        .unwrap_or_default();
    gnuplot_script(csv_name, &title, 5, 7, &distinct(rows.iter().map(|r| r.method.tag())))
}

/// Parameters of the summary table. `Δ` follows from `n_env`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryParams {
    pub eta: f64,
    pub beta: f64,
    pub gamma: f64,
    pub n_mean: f64,
    pub n_env: f64,
}

/// One cell of the summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryCell {
    pub noise: &'static str,
    pub scheme: &'static str,
    /// `None` for the cell with no bound (second-order noise, linear scheme).
    pub value: Option<f64>,
    /// Large-`N_E` form, present when `N_E > 0`.
    pub env_value: Option<f64>,
    pub note: Option<&'static str>,
}

/// The six cells of the noise × scheme summary, evaluated at `p`.
pub fn summary_cells(p: &SummaryParams) -> Result<Vec<SummaryCell>> {
    let delta = dephasing::env_squeezing_delta(p.n_env)?;
    if !(p.n_mean > 0.0) {
        return Err(domain(format!("mean photon number must be positive, got {}", p.n_mean)));
    }
    for (name, v) in [("beta", p.beta), ("gamma", p.gamma)] {
        if !(v >= 0.0 && v.is_finite()) {
            return Err(domain(format!("{name} must be finite and nonnegative, got {v}")));
        }
    }
    let (n, ne) = (p.n_mean, p.n_env);
    let env = |v: f64| if ne > 0.0 { Some(v) } else { None };
    let sqrt2 = 2f64.sqrt();
    Ok(vec![
        SummaryCell {
            noise: "photon loss",
            scheme: "linear",
            value: Some(lossbounds::linear_loss_reference(n, p.eta)?),
            env_value: None,
            note: None,
        },
        SummaryCell {
            noise: "photon loss",
            scheme: "second-order",
            value: Some(lossbounds::delta_phi_from_f(lossbounds::fmin_asymptotic(n, p.eta)?, 1)),
            env_value: None,
            note: None,
        },
        SummaryCell {
            noise: "linear phase diffusion",
            scheme: "linear",
            value: Some(sqrt2 * p.beta * delta),
            env_value: env(p.beta / (sqrt2 * ne.sqrt())),
            note: None,
        },
        SummaryCell {
            noise: "linear phase diffusion",
            scheme: "second-order",
            value: Some(dephasing::asymptotic_dephasing(n, p.beta * delta, AsymptoticFamily::Coherent)?),
            env_value: env(p.beta / (2.0 * sqrt2 * n * ne.sqrt())),
            note: Some("coherent states only"),
        },
        SummaryCell {
            noise: "second-order phase diffusion",
            scheme: "linear",
            value: None,
            env_value: None,
            note: None,
        },
        SummaryCell {
            noise: "second-order phase diffusion",
            scheme: "second-order",
            value: Some(sqrt2 * p.gamma * delta),
            env_value: env(p.gamma / (sqrt2 * ne.sqrt())),
            note: None,
        },
    ])
}

/// Plain-text rendering of [`summary_cells`].
pub fn summary_table(p: &SummaryParams) -> Result<String> {
    let cells = summary_cells(p)?;
    let delta = dephasing::env_squeezing_delta(p.n_env)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "eta = {}, beta = {}, gamma = {}, N = {}, N_E = {} (Delta = {})",
        format_float(p.eta),
        format_float(p.beta),
        format_float(p.gamma),
        format_float(p.n_mean),
        format_float(p.n_env),
        format_float(delta)
    );
    let _ = writeln!(out, "{:<30} {:<13} {:>14} {:>14}  note", "noise", "scheme", "delta_phi", "large N_E");
    for c in cells {
        let value = c.value.map_or_else(|| "--".to_string(), |v| format!("{v:.6e}"));
        let env = c.env_value.map_or_else(|| "--".to_string(), |v| format!("{v:.6e}"));
        let _ = writeln!(
            out,
            "{:<30} {:<13} {:>14} {:>14}  {}",
            c.noise,
            c.scheme,
            value,
            env,
            c.note.unwrap_or("")
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv_request(eta: f64) -> LossCurveRequest {
        LossCurveRequest::new(StateFamily::SqueezedVacuum, eta, Grid::log_spaced(1.0, 20.0, 5).unwrap())
    }

    #[test]
    fn default_grid_shape() {
        let g = Grid::log_spaced(1.0, 20.0, DEFAULT_GRID_POINTS).unwrap();
        assert_eq!(g.points().len(), 40);
        assert_eq!(g.points()[0], 1.0);
        assert_eq!(g.points()[39], 20.0);
        assert!(g.points().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(Grid::integers(0.5, 3.2).unwrap().points(), &[1.0, 2.0, 3.0]);
        assert!(Grid::integers(0.2, 0.8).is_err());
        assert!(Grid::log_spaced(0.0, 1.0, 3).is_err());
    }

    #[test]
    fn loss_rows_are_n_major_in_request_order() {
        let rows = loss_curve(&sv_request(0.9)).unwrap();
        assert_eq!(rows.len(), 30);
        let tags: Vec<&str> = rows[..6].iter().map(|r| r.sample.method.tag()).collect();
        assert_eq!(tags, ["analytic_sv", "asymptotic", "averaged", "weak_value", "before_loss", "lossless"]);
        assert!(rows.chunks(6).all(|c| c.iter().all(|r| r.n_mean() == c[0].n_mean())));
    }

    #[test]
    fn lossless_channel_collapses_methods() {
        for family in [StateFamily::Coherent, StateFamily::SqueezedVacuum] {
            let mut req = sv_request(1.0);
            req.family = family;
            req.methods = parse_methods(
                "analytic,averaged,weak_value,before_loss,lossless,variational_min",
                LossMethodSpec::parse,
            )
            .unwrap();
            for r in loss_curve(&req).unwrap() {
                let v = family.moments(r.n_mean()).unwrap().var_n2;
                let target = 1.0 / (2.0 * v.sqrt());
                assert!((r.sample.delta_phi_lower / target - 1.0).abs() < 1e-9, "{:?}", r);
            }
        }
    }

    #[test]
    fn fock_variational_min_diverges() {
        let mut req = LossCurveRequest::new(StateFamily::Fock, 0.5, Grid::new(vec![1.0]).unwrap());
        req.methods = vec![LossMethodSpec::Exact(BoundMethod::VariationalMin)];
        let rows = loss_curve(&req).unwrap();
        assert!(rows[0].sample.diverged());
        assert_eq!(loss_csv(&rows), format!("{LOSS_CSV_HEADER}\nfock,1.0,0.5,variational_min,0.0,inf\n"));
        let json: Value = serde_json::from_str(&loss_json(&rows)).unwrap();
        assert_eq!(json[0]["delta_phi_lower"], Value::Null);
        assert_eq!(json[0]["diverged"], Value::Bool(true));
    }

    #[test]
    fn bad_requests_are_domain_errors() {
        assert!(loss_curve(&sv_request(1.5)).is_err());
        let mut req = sv_request(0.5);
        req.family = StateFamily::Coherent;
        req.methods = vec![LossMethodSpec::Exact(BoundMethod::AnalyticSv)];
        assert!(loss_curve(&req).is_err());
        assert!(LossMethodSpec::parse("nope").is_err());
        assert!(parse_methods(" , ", LossMethodSpec::parse).is_err());
    }

    #[test]
    fn float_formatting_round_trips() {
        for x in [0.1, 1.0, 1e-300, 7.560153527108574e-4, 123456789.125, 1.0 / 3.0] {
            assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(format_float(f64::INFINITY), "inf");
    }

    #[test]
    fn dephasing_rows() {
        let grid = Grid::new(vec![1.0, 100.0]).unwrap();
        let req = DephasingCurveRequest::new(StateFamily::Coherent, NoiseOrder::Linear, 1.0, grid.clone());
        let rows = dephasing_curve(&req).unwrap();
        assert_eq!(rows.len(), 6);
        assert!((rows[0].delta_phi_lower - 0.522_232_967_867_093_5).abs() < 1e-12);
        let gap = rows[3].delta_phi_lower / rows[4].delta_phi_lower - 1.0;
        assert!(gap.abs() < 0.02);

        let quiet = DephasingCurveRequest::new(StateFamily::SqueezedVacuum, NoiseOrder::Linear, 0.0, grid.clone());
        for pair in dephasing_curve(&quiet).unwrap().chunks(3) {
            assert_eq!(pair[0].delta_phi_lower, pair[2].delta_phi_lower);
        }

        let second = DephasingCurveRequest::new(StateFamily::Coherent, NoiseOrder::SecondOrder, 1.0, grid);
        let rows = dephasing_curve(&second).unwrap();
        assert!((rows[3].delta_phi_lower / 2f64.sqrt() - 1.0).abs() < 0.01);
        assert!(rows.iter().all(|r| r.validity_radius.is_infinite()));
        let csv = dephasing_csv(&rows);
        assert!(csv.starts_with(&format!("{DEPHASING_CSV_HEADER}\n")));
        assert!(csv.lines().skip(1).all(|l| l.ends_with(",inf")));
    }

    #[test]
    fn gnuplot_references_only_its_csv() {
        let rows = loss_curve(&sv_request(0.9)).unwrap();
        let script = loss_gnuplot(&rows, "fig.csv");
        assert!(script.contains("set logscale xy"));
        assert!(script.contains("data = 'fig.csv'"));
        assert_eq!(script.matches('\'').count() % 2, 0);
        assert_eq!(script.matches(".csv").count(), 1);
    }

    #[test]
    fn summary_values() {
        let p = SummaryParams {
            eta: 0.5,
            beta: 1.0,
            gamma: 1.0,
            n_mean: 4.0,
            n_env: 0.0,
        };
        let cells = summary_cells(&p).unwrap();
        assert_eq!(cells.len(), 6);
        assert!((cells[0].value.unwrap() - 0.25).abs() < 1e-15);
        assert!((cells[2].value.unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(cells[4].value.is_none());
        assert_eq!(cells[3].note, Some("coherent states only"));

        let p = SummaryParams { eta: 0.9, n_mean: 10.0, ..p };
        let cells = summary_cells(&p).unwrap();
        assert!((cells[1].value.unwrap() - 7.560_153_527_108_574e-4).abs() < 1e-15);
        assert!((cells[3].value.unwrap() - 0.070_710_678_118_654_75).abs() < 1e-15);
        let text = summary_table(&p).unwrap();
        assert!(text.contains("coherent states only"));
        assert_eq!(text.lines().count(), 8);

        let squeezed = summary_cells(&SummaryParams { n_env: 0.5625, ..p }).unwrap();
        assert!((squeezed[5].value.unwrap() - 2f64.sqrt() * 0.5).abs() < 1e-15);
        assert!(squeezed[5].env_value.is_some());
    }
}
