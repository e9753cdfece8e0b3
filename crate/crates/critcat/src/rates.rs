//! Logical error-rate extraction: exact and perturbative phase-flip rates,
//! optimal-detuning search, critical-point detection, and
//! exponential-suppression fitting.

use std::collections::HashMap;
use std::sync::Mutex;

use ndarray::prelude::*;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::liouv::{build_sector_block, Sector};
use crate::model::{alpha_steady, EffectiveParams, ModelError, ThetaParam};
use crate::spectral::{block_eigenvalues, eigensolve_block, trace_inner, SpectralError};
use crate::sweep;

#[derive(Debug, Error)]
pub enum RatesError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("phase-flip rate is defined only with the strong symmetry intact (kappa = {0})")]
    SymmetryBroken(f64),
    #[error("no detuning jump inside the scan window [{lo}, {hi}]")]
    NoTransition { lo: f64, hi: f64 },
    #[error("no exponential window: longest admissible run has {found} points, need {needed}")]
    NoExponentialWindow { found: usize, needed: usize },
    #[error("scan needs at least {needed} points, got {got}")]
    ScanTooSmall { needed: usize, got: usize },
    #[error("scan grid must be strictly increasing")]
    GridNotIncreasing,
}

/// Exact phase-flip rate γ_φ = Λ'_{+−}: off-diagonal gap of the Liouvillian
/// with dephasing included. Requires κ = 0.
pub fn gamma_phi_exact(p: &EffectiveParams) -> Result<f64, RatesError> {
    if p.kappa1 != 0.0 {
        return Err(RatesError::SymmetryBroken(p.kappa1));
    }
    let block = build_sector_block(p, Sector::PM).map_err(SpectralError::from)?;
    let vals = block_eigenvalues(&block)?;
    Ok((-vals[0].re).max(0.0))
}

/// First-order phase-flip rate, both as the perturbative trace formula over
/// the bare (κ_φ = 0) eigenoperators and as the sinh closed form valid at
/// Δ = U = 0.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PerturbativeGamma {
    /// −κ_φ Re Tr{(J₀^{+−})† D[â†â] ρ₀^{+−}} with bare-Liouvillian eigenoperators.
    pub trace_formula: f64,
    /// κ_φ |α|²/sinh(2|α|²).
    pub sinh_form: f64,
}

pub fn gamma_phi_perturbative(p: &EffectiveParams) -> Result<PerturbativeGamma, RatesError> {
    if p.kappa1 != 0.0 {
        return Err(RatesError::SymmetryBroken(p.kappa1));
    }
    let alpha = alpha_steady(p)?;
    let nbar = alpha.norm_sqr();
    let sinh_form = if nbar == 0.0 {
        0.0
    } else {
        p.kappaphi * nbar / (2.0 * nbar).sinh()
    };

    let bare = EffectiveParams {
        kappaphi: 0.0,
        ..*p
    };
    let block = build_sector_block(&bare, Sector::PM).map_err(SpectralError::from)?;
    let res = eigensolve_block(&block, bare.cutoff, Sector::PM)?;
    let rho = &res.right_ops[0];
    let j = &res.left_ops[0];
    // D[n]ρ = nρn − ½{n², ρ} with n = diag(0..d)
    let d = bare.cutoff;
    let dn_rho = Array2::from_shape_fn((d, d), |(m, n)| {
        let (mf, nf) = (m as f64, n as f64);
        rho[(m, n)] * (mf * nf - 0.5 * (mf * mf + nf * nf))
    });
    let shift = trace_inner(j, &dn_rho);
    Ok(PerturbativeGamma {
        trace_formula: -p.kappaphi * shift.re,
        sinh_form,
    })
}

/// Shared configuration for γ_φ(Δ) landscapes at fixed (W, θ, G, κ_φ), with an
/// eigensolve cache keyed by (Δ, cutoff). Sweep cost dominates runtime, so the
/// golden-section refinement reuses coarse-grid evaluations for free.
pub struct GammaPhiContext {
    pub theta: ThetaParam,
    pub g_abs: f64,
    pub kappaphi: f64,
    pub cutoff_override: Option<usize>,
    cache: Mutex<HashMap<(u64, usize), f64>>,
}

impl GammaPhiContext {
    pub fn new(theta: ThetaParam, g_abs: f64, kappaphi: f64) -> Self {
        Self {
            theta,
            g_abs,
            kappaphi,
            cutoff_override: None,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn with_cutoff(mut self, n: usize) -> Self {
        self.cutoff_override = Some(n);
        self
    }

    pub fn params_at(&self, delta: f64) -> EffectiveParams {
        let p = self
            .theta
            .params(Complex64::new(self.g_abs, 0.0), delta, 0.0, self.kappaphi);
        match self.cutoff_override {
            Some(n) => p.with_cutoff(n),
            None => p,
        }
    }

    pub fn gamma_phi(&self, delta: f64) -> Result<f64, RatesError> {
        let p = self.params_at(delta);
        let key = (delta.to_bits(), p.cutoff);
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return Ok(*v);
        }
        let v = gamma_phi_exact(&p)?;
        self.cache.lock().unwrap().insert(key, v);
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DetuningSearch {
    /// Coarse grid points over [0, 2G]; at least 81.
    pub coarse_points: usize,
    /// Relative Δ resolution of the golden-section refinement.
    pub resolution: f64,
}

impl Default for DetuningSearch {
    fn default() -> Self {
        Self {
            coarse_points: 81,
            resolution: 1e-3,
        }
    }
}

/// Detuning minimizing γ_φ over [0, 2G]: coarse grid then golden-section
/// refinement. A landscape flat to 1e-12 (relative) returns 0.
pub fn optimal_detuning(ctx: &GammaPhiContext, opts: &DetuningSearch) -> Result<f64, RatesError> {
    let coarse = opts.coarse_points.max(81);
    let window = 2.0 * ctx.g_abs;
    let grid = sweep::linspace(0.0, window, coarse);
    let values = sweep::map_points(&grid, |d| ctx.gamma_phi(*d));
    let mut vals = Vec::with_capacity(values.len());
    for v in values {
        vals.push(v?);
    }
    let (mut best_i, mut best) = (0usize, f64::INFINITY);
    let mut worst = f64::NEG_INFINITY;
    for (i, v) in vals.iter().enumerate() {
        if *v < best {
            best = *v;
            best_i = i;
        }
        worst = worst.max(*v);
    }
    if worst - best < 1e-12 * worst.max(f64::MIN_POSITIVE) {
        return Ok(0.0);
    }

    // golden-section refinement inside the bracketing neighbours
    let mut a = if best_i == 0 { grid[0] } else { grid[best_i - 1] };
    let mut b = if best_i + 1 == grid.len() {
        grid[best_i]
    } else {
        grid[best_i + 1]
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = ctx.gamma_phi(c)?;
    let mut fd = ctx.gamma_phi(d)?;
    let target = opts.resolution * ctx.g_abs.max(f64::MIN_POSITIVE);
    while (b - a).abs() > target {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = ctx.gamma_phi(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = ctx.gamma_phi(d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Bisection of a boolean indicator on [lo, hi] down to `resolution`, given
/// indicator(lo) = false and indicator(hi) = true after an initial bracketing
/// scan. Returns the jump abscissa.
fn bisect_jump<F>(f: F, lo: f64, hi: f64, resolution: f64) -> Result<f64, RatesError>
where
    F: Fn(f64) -> Result<bool, RatesError>,
{
    // bracket with a short scan in case the endpoints do not straddle the jump
    let probes = sweep::linspace(lo, hi, 6);
    let mut flags = Vec::with_capacity(probes.len());
    for p in &probes {
        flags.push(f(*p)?);
    }
    let mut bracket = None;
    for i in 0..flags.len() - 1 {
        if !flags[i] && flags[i + 1] {
            bracket = Some((probes[i], probes[i + 1]));
            break;
        }
    }
    let (mut a, mut b) = bracket.ok_or(RatesError::NoTransition { lo, hi })?;
    while b - a > resolution {
        let mid = 0.5 * (a + b);
        if f(mid)? {
            b = mid;
        } else {
            a = mid;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CriticalPoint {
    pub g_c: f64,
    /// Δ_min just below and above the jump (at ∓2 resolutions).
    pub delta_min_below: f64,
    pub delta_min_above: f64,
}

/// Critical drive G_c located by bisection on the indicator
/// Δ_min(G) > 0.05·G, to a G resolution of 1e-3·W.
pub fn find_gc(
    theta: &ThetaParam,
    kappaphi: f64,
    g_window: (f64, f64),
    search: &DetuningSearch,
) -> Result<CriticalPoint, RatesError> {
    let dmin = |g: f64| -> Result<f64, RatesError> {
        let ctx = GammaPhiContext::new(*theta, g, kappaphi);
        optimal_detuning(&ctx, search)
    };
    let indicator = |g: f64| -> Result<bool, RatesError> { Ok(dmin(g)? > 0.05 * g) };
    let resolution = 1e-3 * theta.w;
    let g_c = bisect_jump(indicator, g_window.0, g_window.1, resolution)?;
    let margin = (0.02 * theta.w).max(2.0 * resolution);
    Ok(CriticalPoint {
        g_c,
        delta_min_below: dmin(g_c - margin)?,
        delta_min_above: dmin(g_c + margin)?,
    })
}

/// One point of a rate scan.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RatePoint {
    /// Scan coordinate (Δ or G depending on the axis).
    pub axis_value: f64,
    pub delta: f64,
    pub gamma_phi: f64,
    pub cutoff: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanAxis {
    Delta,
    Drive,
}

/// Rate scan over a strictly increasing grid; γ_φ ≥ 0 by construction.
#[derive(Debug, Clone, Serialize)]
pub struct RateScan {
    pub axis: ScanAxis,
    pub points: Vec<RatePoint>,
}

impl RateScan {
    fn check_grid(values: &[f64]) -> Result<(), RatesError> {
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(RatesError::GridNotIncreasing);
        }
        Ok(())
    }
}

/// γ_φ(G) along the optimal detuning Δ_min(G).
pub fn scan_drive_at_optimal(
    theta: &ThetaParam,
    kappaphi: f64,
    g_values: &[f64],
    search: &DetuningSearch,
) -> Result<RateScan, RatesError> {
    RateScan::check_grid(g_values)?;
    let mut points = Vec::with_capacity(g_values.len());
    for &g in g_values {
        let ctx = GammaPhiContext::new(*theta, g, kappaphi);
        let dmin = optimal_detuning(&ctx, search)?;
        let gamma = ctx.gamma_phi(dmin)?;
        points.push(RatePoint {
            axis_value: g,
            delta: dmin,
            gamma_phi: gamma,
            cutoff: ctx.params_at(dmin).cutoff,
        });
    }
    Ok(RateScan {
        axis: ScanAxis::Drive,
        points,
    })
}

/// γ_φ(G) at a fixed detuning.
pub fn scan_drive_fixed_delta(
    theta: &ThetaParam,
    kappaphi: f64,
    delta: f64,
    g_values: &[f64],
) -> Result<RateScan, RatesError> {
    RateScan::check_grid(g_values)?;
    let results = sweep::map_points(g_values, |&g| {
        let ctx = GammaPhiContext::new(*theta, g, kappaphi);
        let gamma = ctx.gamma_phi(delta)?;
        Ok::<RatePoint, RatesError>(RatePoint {
            axis_value: g,
            delta,
            gamma_phi: gamma,
            cutoff: ctx.params_at(delta).cutoff,
        })
    });
    let mut points = Vec::with_capacity(results.len());
    for r in results {
        points.push(r?);
    }
    Ok(RateScan {
        axis: ScanAxis::Drive,
        points,
    })
}

/// Exponential-suppression fit γ_φ(G) = γ₀ exp(−ζG) on the auto-selected
/// window.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ZetaFit {
    pub gamma0: f64,
    pub zeta: f64,
    pub r_squared: f64,
    /// Index range [start, end] (inclusive) of the fitted points.
    pub window: (usize, usize),
}

/// Least-squares line on (G, ln γ_φ) over the longest contiguous run of at
/// least six points whose local slopes have coefficient of variation below
/// 10%.
pub fn extract_zeta(points: &[(f64, f64)]) -> Result<ZetaFit, RatesError> {
    const MIN_POINTS: usize = 6;
    if points.len() < MIN_POINTS {
        return Err(RatesError::ScanTooSmall {
            needed: MIN_POINTS,
            got: points.len(),
        });
    }
    let gs: Vec<f64> = points.iter().map(|p| p.0).collect();
    RateScan::check_grid(&gs)?;
    let logs: Vec<Option<f64>> = points
        .iter()
        .map(|p| if p.1 > 0.0 { Some(p.1.ln()) } else { None })
        .collect();
    let slope_at = |i: usize| -> Option<f64> {
        match (logs[i], logs[i + 1]) {
            (Some(a), Some(b)) => Some((b - a) / (gs[i + 1] - gs[i])),
            _ => None,
        }
    };

    // longest contiguous run of slopes with CV < 0.1
    let n_slopes = points.len() - 1;
    let mut best: Option<(usize, usize)> = None;
    let mut longest_any = 0usize;
    for start in 0..n_slopes {
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        let mut count = 0usize;
        for end in start..n_slopes {
            let Some(s) = slope_at(end) else { break };
            sum += s;
            sumsq += s * s;
            count += 1;
            let mean = sum / count as f64;
            let var = (sumsq / count as f64 - mean * mean).max(0.0);
            if count >= 2 && var.sqrt() > 0.1 * mean.abs() {
                break;
            }
            longest_any = longest_any.max(count + 1);
            if count + 1 >= MIN_POINTS {
                let better = match best {
                    None => true,
                    Some((s0, e0)) => (end - start) > (e0 - s0),
                };
                if better {
                    best = Some((start, end + 1));
                }
            }
        }
    }
    let (w0, w1) = best.ok_or(RatesError::NoExponentialWindow {
        found: longest_any,
        needed: MIN_POINTS,
    })?;

    // least squares on ln gamma over the window
    let xs = &gs[w0..=w1];
    let ys: Vec<f64> = (w0..=w1).map(|i| logs[i].unwrap()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok(ZetaFit {
        gamma0: intercept.exp(),
        zeta: -slope,
        r_squared,
        window: (w0, w1),
    })
}
