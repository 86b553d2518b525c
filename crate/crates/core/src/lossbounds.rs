//! Photon-loss bounds on the quantum Fisher information of `e^{−iφn̂²}`.
//!
//! Loss is a beam splitter of transmissivity `η`. Losing `k` of `n` photons
//! happens with binomial weight `c_nk(η)`, and the variational Kraus family
//!
//! ```text
//! E_k(φ) = √((1−η)^k / k!) η^{n̂/2} â^k exp[−iφ(n̂² − 2λ₁kn̂ + λ₂k²)]
//! ```
//!
//! interpolates between loss after (`λ₁ = 0`) and before (`λ₁ = 1`) the
//! Kerr medium. `λ₂` only rephases each branch, so it changes the
//! purification and not the channel. The purification QFI is the variance
//! of `g = n² − 2λ₁kn + λ₂k²` over the joint distribution `ρ_nn c_nk`, which
//! is a convex quadratic in `(λ₁, λ₂)` and is minimised here exactly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::states::{MomentSet, ProbeState};

/// Loss strength and the optional truncation of the loss count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    /// Transmissivity: 1 is lossless, 0 is complete absorption.
    pub eta: f64,
    /// Highest loss count kept in the averaged and weak-value sums; `None`
    /// sums over the full binomial support.
    pub k_max: Option<usize>,
}

impl LossConfig {
    /// Truncation used for the published weak-value curve.
    pub const PUBLISHED_K_MAX: usize = 30;

    pub fn new(eta: f64) -> Result<Self> {
        check_eta(eta)?;
        Ok(Self { eta, k_max: None })
    }

    pub fn with_k_max(mut self, k_max: usize) -> Self {
        self.k_max = Some(k_max);
        self
    }

    fn last_k(&self, dim: usize) -> usize {
        let full = dim.saturating_sub(1);
        self.k_max.map_or(full, |k| k.min(full))
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(domain(format!("transmissivity must lie in [0, 1], got {eta}")))
    }
}

/// Point `(λ₁, λ₂)` of the variational Kraus family.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VariationalPoint {
    pub lambda1: f64,
    pub lambda2: f64,
}

impl VariationalPoint {
    pub const LOSS_AFTER: Self = Self {
        lambda1: 0.0,
        lambda2: 0.0,
    };
    pub const LOSS_BEFORE: Self = Self {
        lambda1: 1.0,
        lambda2: 1.0,
    };

    pub fn new(lambda1: f64, lambda2: f64) -> Self {
        Self { lambda1, lambda2 }
    }
}

/// Which bound produced a [`BoundSample`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    Lossless,
    BeforeLoss,
    VariationalMin,
    AnalyticGeneral,
    AnalyticSv,
    Asymptotic,
    Averaged,
    WeakValue,
    LinearReference,
}

impl BoundMethod {
    pub const ALL: [BoundMethod; 9] = [
        BoundMethod::Lossless,
        BoundMethod::BeforeLoss,
        BoundMethod::VariationalMin,
        BoundMethod::AnalyticGeneral,
        BoundMethod::AnalyticSv,
        BoundMethod::Asymptotic,
        BoundMethod::Averaged,
        BoundMethod::WeakValue,
        BoundMethod::LinearReference,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            BoundMethod::Lossless => "lossless",
            BoundMethod::BeforeLoss => "before_loss",
            BoundMethod::VariationalMin => "variational_min",
            BoundMethod::AnalyticGeneral => "analytic_general",
            BoundMethod::AnalyticSv => "analytic_sv",
            BoundMethod::Asymptotic => "asymptotic",
            BoundMethod::Averaged => "averaged",
            BoundMethod::WeakValue => "weak_value",
            BoundMethod::LinearReference => "linear_reference",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.tag() == tag)
    }
}

/// One evaluated bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundSample {
    pub method: BoundMethod,
    pub params: BTreeMap<String, f64>,
    /// Upper bound on the quantum Fisher information (rad⁻²).
    pub f_upper: f64,
    /// Lower bound on the phase error (rad).
    pub delta_phi_lower: f64,
}

impl BoundSample {
    pub fn from_fisher(
        method: BoundMethod,
        params: BTreeMap<String, f64>,
        f_upper: f64,
        repetitions: u32,
    ) -> Self {
        Self {
            method,
            params,
            f_upper,
            delta_phi_lower: delta_phi_from_f(f_upper, repetitions),
        }
    }

    /// True when the phase-error bound is the infinity sentinel.
    pub fn diverged(&self) -> bool {
        self.delta_phi_lower.is_infinite()
    }
}

/// Quantum Cramér–Rao bound `1/√(mF)`; infinite when `F = 0`.
pub fn delta_phi_from_f(f: f64, repetitions: u32) -> f64 {
    let mf = f * f64::from(repetitions.max(1));
    if mf <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / mf.sqrt()
    }
}

/// Binomial weights `c_nk(η)` for `k = 0..=n`, built in log space so that
/// large `n` neither overflows the factorials nor underflows `η^n` early.
pub(crate) fn binomial_row(n: usize, eta: f64) -> Vec<f64> {
    let mut row = vec![0.0; n + 1];
    if eta >= 1.0 {
        row[0] = 1.0;
        return row;
    }
    if eta <= 0.0 {
        row[n] = 1.0;
        return row;
    }
    let ln_eta = eta.ln();
    let ln_ratio = (1.0 - eta).ln() - ln_eta;
    let mut ln_c = n as f64 * ln_eta;
    row[0] = ln_c.exp();
    for k in 0..n {
        ln_c += ((n - k) as f64).ln() - ((k + 1) as f64).ln() + ln_ratio;
        row[k + 1] = ln_c.exp();
    }
    row
}

/// Probability `c_nk(η) = (1−η)^k/k! · η^{n−k} · n!/(n−k)!` that `k` of `n`
/// photons are lost; zero for `k > n`.
pub fn kraus_weight(n: usize, k: usize, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    if k > n {
        return Ok(0.0);
    }
    Ok(binomial_row(n, eta)[k])
}

/// Probability `p_k` of losing `k` photons, for `k = 0..=k_max` (or the full
/// support when `k_max` is unset).
pub fn loss_probabilities(state: &ProbeState, cfg: &LossConfig) -> Vec<f64> {
    let last = cfg.last_k(state.dim());
    let mut p = vec![0.0; last + 1];
    for (n, pop) in state.populations().into_iter().enumerate() {
        if pop == 0.0 {
            continue;
        }
        let row = binomial_row(n, cfg.eta);
        for (k, c) in row.iter().take(last + 1).enumerate() {
            p[k] += pop * c;
        }
    }
    p
}

/// Purification QFI `4[⟨H₁⟩ − ⟨H₂⟩²]` of the variational loss family.
pub fn variational_qfi(state: &ProbeState, cfg: &LossConfig, pt: VariationalPoint) -> f64 {
    let (mut h1, mut h2) = (0.0, 0.0);
    for (n, pop) in state.populations().into_iter().enumerate() {
        if pop == 0.0 {
            continue;
        }
        let nf = n as f64;
        let mut inner1 = 0.0;
        let mut inner2 = 0.0;
        for (k, c) in binomial_row(n, cfg.eta).into_iter().enumerate() {
            let kf = k as f64;
            let g = nf * nf - 2.0 * pt.lambda1 * kf * nf + pt.lambda2 * kf * kf;
            inner1 += c * g * g;
            inner2 += c * g;
        }
        h1 += pop * inner1;
        h2 += pop * inner2;
    }
    4.0 * (h1 - h2 * h2)
}

/// Second-order statistics of `A = n²`, `C = 2kn`, `B = k²` under the
/// (unnormalised) weights `ρ_nn c_nk`, with `V_XY = E[XY] − E[X]E[Y]`.
///
/// In these terms `F(λ₁, λ₂)/4 = V_AA + λ₁²V_CC + λ₂²V_BB − 2λ₁V_AC + 2λ₂V_AB − 2λ₁λ₂V_CB`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossQuadratic {
    pub v_aa: f64,
    pub v_cc: f64,
    pub v_bb: f64,
    pub v_ac: f64,
    pub v_ab: f64,
    pub v_cb: f64,
}

impl LossQuadratic {
    pub fn from_state(state: &ProbeState, eta: f64) -> Self {
        let mut e = [0.0f64; 3];
        let mut ee = [[0.0f64; 3]; 3];
        for (n, pop) in state.populations().into_iter().enumerate() {
            if pop == 0.0 {
                continue;
            }
            let nf = n as f64;
            for (k, c) in binomial_row(n, eta).into_iter().enumerate() {
                let w = pop * c;
                if w == 0.0 {
                    continue;
                }
                let kf = k as f64;
                let x = [nf * nf, 2.0 * kf * nf, kf * kf];
                for i in 0..3 {
                    e[i] += w * x[i];
                    for j in i..3 {
                        ee[i][j] += w * x[i] * x[j];
                    }
                }
            }
        }
        let v = |i: usize, j: usize| ee[i][j] - e[i] * e[j];
        Self {
            v_aa: v(0, 0),
            v_cc: v(1, 1),
            v_bb: v(2, 2),
            v_ac: v(0, 1),
            v_ab: v(0, 2),
            v_cb: v(1, 2),
        }
    }

    pub fn eval(&self, pt: VariationalPoint) -> f64 {
        let (l1, l2) = (pt.lambda1, pt.lambda2);
        4.0 * (self.v_aa + l1 * l1 * self.v_cc + l2 * l2 * self.v_bb - 2.0 * l1 * self.v_ac
            + 2.0 * l2 * self.v_ab
            - 2.0 * l1 * l2 * self.v_cb)
    }

    /// Optimal `λ₂` for fixed `λ₁`; zero when `λ₂` has no effect.
    pub fn best_lambda2(&self, lambda1: f64) -> f64 {
        if self.v_bb > self.scale() * 1e-15 {
            (lambda1 * self.v_cb - self.v_ab) / self.v_bb
        } else {
            0.0
        }
    }

    /// `g(λ₁) = min_λ₂ F/4 = a λ₁² − 2 b λ₁ + c`, returned as `(a, b)`.
    fn profile(&self) -> (f64, f64) {
        if self.v_bb > self.scale() * 1e-15 {
            (
                self.v_cc - self.v_cb * self.v_cb / self.v_bb,
                self.v_ac - self.v_ab * self.v_cb / self.v_bb,
            )
        } else {
            (self.v_cc, self.v_ac)
        }
    }

    fn scale(&self) -> f64 {
        self.v_aa.abs().max(self.v_cc.abs()).max(self.v_bb.abs()).max(1e-300)
    }
}

/// Result of minimising the variational loss QFI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariationalMinimum {
    pub f_min: f64,
    pub point: VariationalPoint,
    /// Stationary `λ₁` before clamping to `[0, 1]`; infinite when the
    /// profile is flat or linear in `λ₁`.
    pub unconstrained_lambda1: f64,
}

/// Minimises [`variational_qfi`] over `0 ≤ λ₁ ≤ 1` and unconstrained `λ₂`.
///
/// `λ₂` is eliminated in closed form, leaving a convex quadratic in `λ₁`
/// whose stationary point is clamped to `[0, 1]`.
pub fn minimize_variational_qfi(state: &ProbeState, cfg: &LossConfig) -> Result<VariationalMinimum> {
    check_eta(cfg.eta)?;
    if cfg.eta == 0.0 {
        return Ok(VariationalMinimum {
            f_min: 0.0,
            point: VariationalPoint::new(1.0, 0.0),
            unconstrained_lambda1: f64::NAN,
        });
    }
    let quad = LossQuadratic::from_state(state, cfg.eta);
    if cfg.eta == 1.0 {
        return Ok(VariationalMinimum {
            f_min: 4.0 * quad.v_aa,
            point: VariationalPoint::new(1.0, 0.0),
            unconstrained_lambda1: f64::NAN,
        });
    }
    let (a, b) = quad.profile();
    let (lambda1, unconstrained) = if a > quad.scale() * 1e-13 {
        let star = b / a;
        (star.clamp(0.0, 1.0), star)
    } else {
        // Linear profile: the minimum sits on the endpoint favoured by the slope.
        let end = if b >= 0.0 { 1.0 } else { 0.0 };
        (end, f64::copysign(f64::INFINITY, b))
    };
    let point = VariationalPoint::new(lambda1, quad.best_lambda2(lambda1));
    Ok(VariationalMinimum {
        f_min: quad.eval(point).max(0.0),
        point,
        unconstrained_lambda1: unconstrained,
    })
}

/// Cross-check for [`minimize_variational_qfi`]: scans `λ₁` on a uniform grid
/// over `[0, 1]`, minimising `λ₂` exactly at each node.
pub fn minimize_variational_qfi_grid(
    state: &ProbeState,
    cfg: &LossConfig,
    nodes: usize,
) -> Result<VariationalMinimum> {
    check_eta(cfg.eta)?;
    let quad = LossQuadratic::from_state(state, cfg.eta);
    let nodes = nodes.max(2);
    let mut best = VariationalMinimum {
        f_min: f64::INFINITY,
        point: VariationalPoint::default(),
        unconstrained_lambda1: f64::NAN,
    };
    for i in 0..nodes {
        let l1 = i as f64 / (nodes - 1) as f64;
        let pt = VariationalPoint::new(l1, quad.best_lambda2(l1));
        let f = quad.eval(pt);
        if f < best.f_min {
            best.f_min = f;
            best.point = pt;
        }
    }
    best.f_min = best.f_min.max(0.0);
    Ok(best)
}

fn guarded_ratio(formula: &'static str, num: f64, den: f64, den_scale: f64) -> Result<f64> {
    if den.abs() <= 1e-14 * den_scale.max(1.0) {
        return Err(Error::Singular {
            formula,
            denominator: den,
        });
    }
    Ok(num / den)
}

/// Closed-form `min_λ₂ F(λ₁ = 1, λ₂)` for arbitrary photon-number moments.
///
/// Transcribed term by term; equivalence with the numerical minimum is
/// covered by the tests and by `verify`.
pub fn fmin_analytic_general(mom: &MomentSet, eta: f64) -> Result<f64> {
    general_minimum(mom, eta, 7.0)
}

/// [`fmin_analytic_general`] with the `7 η(η−1)(2η−1)² ⟨n̂²⟩³` coefficient
/// replaced by 8; a fixture for checking that `verify` catches a bad
/// transcription.
#[doc(hidden)]
pub fn fmin_analytic_general_mutant(mom: &MomentSet, eta: f64) -> Result<f64> {
    general_minimum(mom, eta, 8.0)
}

fn general_minimum(mom: &MomentSet, eta: f64, cubic_coefficient: f64) -> Result<f64> {
    check_eta(eta)?;
    if eta == 0.0 {
        return Ok(0.0);
    }
    if eta == 1.0 {
        return Ok(bound_lossless(mom));
    }
    let e = eta;
    let (n1, n2, n3, n4) = (mom.m1, mom.m2, mom.m3, mom.m4);
    let ee = e * (e - 1.0);
    let s = (2.0 * e - 1.0).powi(2);

    let t1 = (ee * s * n1 * n1 + (6.0 * ee + 1.0) * s * n1
        - ee * (7.0 * s * n2 - 4.0 * ee * n3))
        * n4;
    let t2 = ee * ((12.0 * ee + 1.0) * n3 - 4.0 * ee * (n1 + 6.0) * n1 - 4.0 * n1) * n3;
    let t3 = -2.0 * ee * (2.0 * (ee + 1.0) + (8.0 * ee + 1.0) * n1) * n3 * n2;
    let t4 = -(4.0 * ee * (ee * (n3 - 4.0) - 1.0) + (2.0 * ee + 1.0) * s * n1) * n2 * n2;
    let t5 = cubic_coefficient * ee * s * n2 * n2 * n2;
    let num = 4.0 * e * (t1 + t2 + t3 + t4 + t5);

    let d1 = (1.0 - e).powi(3) * mom.var_n2;
    let d2 = -ee * (11.0 * e + 2.0 * (e - 1.0) * n1 - 4.0) * n2;
    let d3 = e * (n1 + (e - 1.0) * (6.0 * (e - 1.0) * n3 + e * (n1 + 6.0) * n1));
    let den = d1 + d2 + d3;
    guarded_ratio(
        "fmin_analytic_general",
        num,
        den,
        d1.abs() + d2.abs() + d3.abs(),
    )
}

/// [`fmin_analytic_general`] specialised to squeezed vacuum with mean photon
/// number `n_mean`, as a rational function of `N` and `η`.
pub fn fmin_analytic_sv(n_mean: f64, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    if !(n_mean.is_finite() && n_mean >= 0.0) {
        return Err(domain(format!("mean photon number must be nonnegative, got {n_mean}")));
    }
    let (n, e) = (n_mean, eta);
    let ee = e * (e - 1.0);
    let braces = n * (ee * (16.0 * ee + 69.0) - 10.0)
        - 3.0 * n.powi(2) * (3.0 * ee * (18.0 * ee - 31.0) + 7.0)
        - 6.0 * n.powi(3) * (73.0 * e * (e * (2.0 * e * (e - 2.0) + 1.0) + 1.0) + 2.0)
        - 6.0 * n.powi(4) * ee * (236.0 * ee - 37.0)
        - 720.0 * n.powi(5) * ee * ee
        + 6.0 * ee
        - 1.0;
    let num = 32.0 * n * e * braces;
    let bracket = 24.0 * n * n * (e - 1.0).powi(2)
        + 21.0 * n * (e - 2.0) * (e - 1.0)
        + e * (2.0 * e - 17.0)
        + 20.0;
    let lead = 4.0 * n * (e - 1.0) * bracket;
    let den = lead + 7.0 * e - 8.0;
    guarded_ratio("fmin_analytic_sv", num, den, lead.abs() + 8.0)
}

/// Large-`N` form of the minimum, `240 η³ N³ / (1 − η)`; infinite at `η = 1`.
pub fn fmin_asymptotic(n_mean: f64, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    if eta == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(240.0 * eta.powi(3) * n_mean.powi(3) / (1.0 - eta))
}

/// Purification bound for loss placed before the Kerr medium (`λ₁ = λ₂ = 1`).
pub fn bound_before_loss(mom: &MomentSet, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    let e = eta;
    let (n1, n2, n3) = (mom.m1, mom.m2, mom.m3);
    Ok(4.0
        * (e.powi(4) * mom.var_n2 - 6.0 * e.powi(3) * (e - 1.0) * n3
            + e * e * (11.0 * e * e - 18.0 * e + 7.0) * n2
            - e * (6.0 * e.powi(3) - 12.0 * e * e + 7.0 * e - 1.0) * n1
            + 2.0 * e.powi(3) * (e - 1.0) * n2 * n1
            - e * e * (e - 1.0).powi(2) * n1 * n1))
}

/// Lossless purification bound `4(Δn̂²)²`, which also covers loss after the medium.
pub fn bound_lossless(mom: &MomentSet) -> f64 {
    4.0 * mom.var_n2
}

/// Convexity bound `Σ_k p_k F_Q[|ψ_k⟩]` over the post-loss branches
/// `|ψ_k⟩ = E_k|ψ⟩/√p_k`. Branches with `p_k < 1e-15` are skipped.
pub fn bound_averaged(state: &ProbeState, cfg: &LossConfig) -> f64 {
    let rows = weighted_rows(state, cfg);
    let last = cfg.last_k(state.dim());
    let mut p = vec![0.0; last + 1];
    let mut s2 = vec![0.0; last + 1];
    for (n, row) in &rows {
        for (k, &w) in row.iter().enumerate() {
            let m = (n - k) as f64;
            p[k] += w;
            s2[k] += w * m * m;
        }
    }
    let mut f = 0.0;
    let mut spread = vec![0.0; last + 1];
    for (n, row) in &rows {
        for (k, &w) in row.iter().enumerate() {
            if p[k] < 1e-15 {
                continue;
            }
            let m = (n - k) as f64;
            let d = m * m - s2[k] / p[k];
            spread[k] += w * d * d;
        }
    }
    for (k, s) in spread.into_iter().enumerate() {
        if p[k] >= 1e-15 {
            f += 4.0 * s;
        }
    }
    f
}

/// Weak-value bound for loss after the medium.
///
/// With `w_k = Σ_n c_nk|ψ_n|² n² / p_k` the weak value of `n̂²` on outcome
/// `Π_k = E_k†E_k`, this returns `4 Σ_k Tr[Π_k (n̂² − w_k)² ρ]`, i.e. the
/// part of the `n̂²` variance that the loss record does not resolve.
pub fn bound_weak_value(state: &ProbeState, cfg: &LossConfig) -> f64 {
    let rows = weighted_rows(state, cfg);
    let last = cfg.last_k(state.dim());
    let mut p = vec![0.0; last + 1];
    let mut t = vec![0.0; last + 1];
    for (n, row) in &rows {
        let n2 = (*n as f64).powi(2);
        for (k, &w) in row.iter().enumerate() {
            p[k] += w;
            t[k] += w * n2;
        }
    }
    let mut f = 0.0;
    for (n, row) in &rows {
        let n2 = (*n as f64).powi(2);
        for (k, &w) in row.iter().enumerate() {
            if p[k] < 1e-15 {
                continue;
            }
            let d = n2 - t[k] / p[k];
            f += 4.0 * w * d * d;
        }
    }
    f
}

/// Rows `|ψ_n|² c_nk` for `k ≤ min(n, k_max)`, skipping empty levels.
fn weighted_rows(state: &ProbeState, cfg: &LossConfig) -> Vec<(usize, Vec<f64>)> {
    let last = cfg.last_k(state.dim());
    state
        .populations()
        .into_iter()
        .enumerate()
        .filter(|&(_, pop)| pop > 0.0)
        .map(|(n, pop)| {
            let mut row = binomial_row(n, cfg.eta);
            row.truncate(last.min(n) + 1);
            row.iter_mut().for_each(|c| *c *= pop);
            (n, row)
        })
        .collect()
}

/// Asymptotic lossy bound for linear (`n̂`-generated) estimation,
/// `Δφ ≥ √((1−η)/η) / (2√N)`.
pub fn linear_loss_reference(n_mean: f64, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    if !(n_mean > 0.0) {
        return Err(domain(format!("mean photon number must be positive, got {n_mean}")));
    }
    if eta == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(((1.0 - eta) / eta).sqrt() / (2.0 * n_mean.sqrt()))
}
