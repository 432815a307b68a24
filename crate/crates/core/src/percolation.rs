//! Bond-percolation analytics on configuration-model networks.
//!
//! With degree PGF `G_p` and excess-degree PGF `G_q`, an edge is occupied with
//! probability `T`. The stub fixed point `u_T = G_q(1 + (u_T − 1)T)` gives the
//! giant occupied fraction `S_T = 1 − G_p(1 + (u_T − 1)T)`; the threshold is
//! `T_c = G_p'(1) / G_p''(1)`.

use std::cell::Cell;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{bisect, Real};
use crate::pgf::{coefficients_from_samples, contour_points, PowerSeries};

/// Per-edge transmission rate `beta` and per-vertex recovery rate `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpidemicParams<F> {
    pub beta: F,
    pub gamma: F,
}

impl<F: Real> EpidemicParams<F> {
    pub fn new(beta: F, gamma: F) -> Result<Self> {
        let p = Self { beta, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta >= F::zero()) {
            return Err(Error::param(format!("beta must be finite and >= 0, got {}", self.beta)));
        }
        if !(self.gamma.is_finite() && self.gamma > F::zero()) {
            return Err(Error::param(format!("gamma must be finite and > 0, got {}", self.gamma)));
        }
        Ok(())
    }

    /// `β / (β + γ)`: constant rates with exponential recovery.
    pub fn constant_rates_t(&self) -> F {
        self.beta / (self.beta + self.gamma)
    }
}

/// Density tabulated on an increasing grid, linearly interpolated between
/// grid points and zero outside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDensity<F>", bound(deserialize = "F: Real"))]
pub struct TabulatedDensity<F> {
    x: Vec<F>,
    f: Vec<F>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDensity<F> {
    x: Vec<F>,
    f: Vec<F>,
}

impl<F: Real> TryFrom<RawDensity<F>> for TabulatedDensity<F> {
    type Error = Error;

    fn try_from(raw: RawDensity<F>) -> Result<Self> {
        Self::new(raw.x, raw.f)
    }
}

impl<F: Real> TabulatedDensity<F> {
    pub fn new(x: Vec<F>, f: Vec<F>) -> Result<Self> {
        if x.len() < 2 || x.len() != f.len() {
            return Err(Error::param("density needs matching grids with at least 2 points"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("density grid must be strictly increasing"));
        }
        if x[0] < F::zero() {
            return Err(Error::param("density grid must lie in [0, ∞)"));
        }
        if f.iter().any(|v| !(v.is_finite() && *v >= F::zero())) {
            return Err(Error::param("density values must be finite and nonnegative"));
        }
        let d = Self { x, f };
        let mass = d.mass();
        if (mass - F::one()).abs() > F::lit(1e-8) {
            return Err(Error::param(format!("density integrates to {mass}, not 1")));
        }
        Ok(d)
    }

    /// Samples `pdf` on `points` equally spaced values in `[lo, hi]`.
    pub fn from_fn(lo: F, hi: F, points: usize, pdf: impl Fn(F) -> F) -> Result<Self> {
        let step = (hi - lo) / F::from_usize_lossy(points - 1);
        let x: Vec<F> = (0..points).map(|i| lo + step * F::from_usize_lossy(i)).collect();
        let f = x.iter().map(|&v| pdf(v)).collect();
        Self::new(x, f)
    }

    /// Trapezoid integral, exact for the interpolant.
    pub fn mass(&self) -> F {
        let half = F::lit(0.5);
        self.x
            .windows(2)
            .zip(self.f.windows(2))
            .map(|(x, f)| (x[1] - x[0]) * (f[0] + f[1]) * half)
            .sum()
    }

    pub fn support(&self) -> (F, F) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    pub fn eval(&self, v: F) -> F {
        let (lo, hi) = self.support();
        if v < lo || v > hi {
            return F::zero();
        }
        let i = self.x.partition_point(|&g| g <= v).clamp(1, self.x.len() - 1);
        let (x0, x1) = (self.x[i - 1], self.x[i]);
        let w = (v - x0) / (x1 - x0);
        self.f[i - 1] * (F::one() - w) + self.f[i] * w
    }

    /// Up to `max` panel boundaries taken from the grid.
    fn panels(&self, max: usize) -> Vec<F> {
        let cells = self.x.len() - 1;
        let count = cells.min(max);
        (0..=count).map(|j| self.x[j * cells / count]).collect()
    }
}

/// Assumption set determining the edge transmissibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case", bound(deserialize = "F: Real"))]
pub enum TransmissibilityModel<F> {
    /// Constant β, exponential recovery at rate γ: `T = β/(β+γ)`.
    ConstantRates,
    /// Constant β, fixed infectious period 1/γ: `T = 1 − e^{−β/γ}`.
    FixedDuration,
    /// i.i.d. rates `β_ij ~ f_β` and durations `τ_i ~ f_τ`:
    /// `T = 1 − ∫∫ f_β(b) f_τ(t) e^{−bt} db dt`.
    IidGeneral {
        rate: TabulatedDensity<F>,
        duration: TabulatedDensity<F>,
    },
    /// i.i.d. rates `β_ij ~ f_β` and recovery rates `γ_i ~ f_γ` with
    /// `τ_i = 1/γ_i`: `T = 1 − ∫∫ f_β(b) f_γ(r) e^{−b/r} db dr`.
    IidRateReciprocal {
        rate: TabulatedDensity<F>,
        recovery_rate: TabulatedDensity<F>,
    },
}

/// Kernel evaluations allowed in the two-dimensional quadrature.
pub const QUADRATURE_BUDGET: usize = 1 << 20;

/// Edge transmissibility under `model`. The closed-form variants use
/// `params`; the i.i.d. variants are fully described by their densities.
pub fn transmissibility<F: Real>(model: &TransmissibilityModel<F>, params: &EpidemicParams<F>) -> Result<F> {
    params.validate()?;
    match model {
        TransmissibilityModel::ConstantRates => Ok(params.constant_rates_t()),
        TransmissibilityModel::FixedDuration => Ok(-(-params.beta / params.gamma).exp_m1()),
        TransmissibilityModel::IidGeneral { rate, duration } => {
            iid_transmissibility(rate, duration, |b, t| (-b * t).exp())
        }
        TransmissibilityModel::IidRateReciprocal { rate, recovery_rate } => {
            if recovery_rate.support().0 <= F::zero() && recovery_rate.eval(F::zero()) > F::zero() {
                return Err(Error::param("recovery-rate density must vanish at 0"));
            }
            iid_transmissibility(rate, recovery_rate, |b, r| {
                if r > F::zero() {
                    (-b / r).exp()
                } else {
                    F::zero()
                }
            })
        }
    }
}

fn iid_transmissibility<F: Real>(
    rate: &TabulatedDensity<F>,
    outer: &TabulatedDensity<F>,
    kernel: impl Fn(F, F) -> F,
) -> Result<F> {
    let tol = F::lit(1e-10);
    let budget = Cell::new(QUADRATURE_BUDGET);
    let inner_panels = rate.panels(64);
    let outer_panels = outer.panels(256);
    let failure = Cell::new(false);
    let survive = integrate_panels(&outer_panels, tol, &budget, |t| {
        let w = outer.eval(t);
        if w == F::zero() || failure.get() {
            return F::zero();
        }
        match integrate_panels(&inner_panels, tol, &budget, |b| rate.eval(b) * kernel(b, t)) {
            Ok(v) => w * v,
            Err(_) => {
                failure.set(true);
                F::zero()
            }
        }
    })?;
    if failure.get() {
        return Err(budget_error());
    }
    Ok((F::one() - survive).max(F::zero()))
}

fn budget_error() -> Error {
    Error::NoConvergence {
        iterations: QUADRATURE_BUDGET,
        change: f64::NAN,
    }
}

fn integrate_panels<F: Real>(
    panels: &[F],
    tol: F,
    budget: &Cell<usize>,
    f: impl Fn(F) -> F,
) -> Result<F> {
    let tol_panel = tol / F::from_usize_lossy(panels.len().max(1));
    let mut total = F::zero();
    for w in panels.windows(2) {
        total += adaptive_simpson(&f, w[0], w[1], tol_panel, budget)?;
    }
    Ok(total)
}

fn adaptive_simpson<F: Real>(f: &impl Fn(F) -> F, a: F, b: F, tol: F, budget: &Cell<usize>) -> Result<F> {
    let half = F::lit(0.5);
    let m = (a + b) * half;
    spend(budget, 3)?;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / F::lit(6.0) * (fa + F::lit(4.0) * fm + fb);
    simpson_step(f, [a, b], [fa, fm, fb], whole, tol, 48, budget)
}

fn simpson_step<F: Real>(
    f: &impl Fn(F) -> F,
    [a, b]: [F; 2],
    [fa, fm, fb]: [F; 3],
    whole: F,
    tol: F,
    depth: usize,
    budget: &Cell<usize>,
) -> Result<F> {
    let half = F::lit(0.5);
    let m = (a + b) * half;
    let (lm, rm) = ((a + m) * half, (m + b) * half);
    spend(budget, 2)?;
    let (flm, frm) = (f(lm), f(rm));
    let six = F::lit(6.0);
    let four = F::lit(4.0);
    let left = (m - a) / six * (fa + four * flm + fm);
    let right = (b - m) / six * (fm + four * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= F::lit(15.0) * tol {
        return Ok(left + right + delta / F::lit(15.0));
    }
    let l = simpson_step(f, [a, m], [fa, flm, fm], left, tol * half, depth - 1, budget)?;
    let r = simpson_step(f, [m, b], [fm, frm, fb], right, tol * half, depth - 1, budget)?;
    Ok(l + r)
}

fn spend(budget: &Cell<usize>, n: usize) -> Result<()> {
    let left = budget.get();
    if left < n {
        return Err(budget_error());
    }
    budget.set(left - n);
    Ok(())
}

/// Smallest fixed point in `[0, 1]` with a flag for degenerate excess
/// distributions (no mass at excess degree ≥ 2), where uniqueness is not
/// guaranteed and 1 is returned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint<F> {
    pub value: F,
    pub degenerate: bool,
}

/// Smallest solution of `u = G_q(u)` in `[0, 1]`.
pub fn solve_u<F: Real>(g_q: &PowerSeries<F>, tol: F) -> FixedPoint<F> {
    solve_u_t(g_q, F::one(), tol).expect("T = 1 is in range")
}

/// Smallest solution of `u = G_q(1 + (u − 1)T)` in `[0, 1]`; 1 when no root
/// lies below 1.
///
/// With `x = 1 − T(1 − u)` the residual factors as
/// `G_q(x) − u = (1 − u)(1 − T·D(x))`, `D(x) = (1 − G_q(x))/(1 − x)`. The trivial
/// root is divided out and the second factor, decreasing in `u`, is bisected.
/// This stays accurate just above threshold, where the unfactored residual
/// sinks below rounding near `u = 1`.
pub fn solve_u_t<F: Real>(g_q: &PowerSeries<F>, t: F, tol: F) -> Result<FixedPoint<F>> {
    check_t(t)?;
    let degenerate = g_q.coeffs().iter().skip(2).all(|&c| c == F::zero());
    if degenerate {
        return Ok(FixedPoint {
            value: F::one(),
            degenerate,
        });
    }
    let d = g_q.secant_to_one();
    let k = |u: F| F::one() - t * d.evaluate(F::one() - t * (F::one() - u));
    let value = if k(F::one()) >= F::zero() {
        // T·G_q'(1) ≤ 1: subcritical or exactly critical
        F::one()
    } else if k(F::zero()) <= F::zero() {
        F::zero()
    } else {
        bisect(F::zero(), F::one(), tol, k)
    };
    Ok(FixedPoint { value, degenerate })
}

fn check_t<F: Real>(t: F) -> Result<()> {
    if !(t >= F::zero() && t <= F::one()) {
        return Err(Error::param(format!("transmissibility {t} outside [0, 1]")));
    }
    Ok(())
}

/// Critical transmissibility `T_c = G_p'(1) / G_p''(1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalTransmissibility<F> {
    /// Infinite when `G_p''(1) = 0` (no vertex of degree ≥ 2).
    pub value: F,
}

impl<F: Real> CriticalTransmissibility<F> {
    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    /// An epidemic is possible for some `T ≤ 1`.
    pub fn is_reachable(&self) -> bool {
        self.value < F::one()
    }

    pub fn finite(&self) -> Option<F> {
        self.is_finite().then_some(self.value)
    }
}

pub fn critical_t<F: Real>(g_p: &PowerSeries<F>) -> CriticalTransmissibility<F> {
    let first = g_p.derivative_at(1, F::one());
    let second = g_p.derivative_at(2, F::one());
    let value = if second > F::zero() {
        first / second
    } else {
        F::infinity()
    };
    CriticalTransmissibility { value }
}

/// `S_T = 1 − G_p(1 + (u_T − 1)T)`.
pub fn giant_fraction_t<F: Real>(g_p: &PowerSeries<F>, t: F, u_t: F) -> F {
    let s = F::one() - g_p.evaluate(F::one() + (u_t - F::one()) * t);
    s.max(F::zero()).min(F::one())
}

/// `S = 1 − G_p(u)`.
pub fn giant_fraction<F: Real>(g_p: &PowerSeries<F>, u: F) -> F {
    giant_fraction_t(g_p, F::one(), u)
}

/// Mean occupied-component size reached from a random vertex below the
/// threshold: `1 + T G_p'(1) / (1 − T G_q'(1))`.
pub fn mean_small_component<F: Real>(g_p: &PowerSeries<F>, t: F) -> Result<F> {
    check_t(t)?;
    let first = g_p.derivative_at(1, F::one());
    if first <= F::zero() {
        return Err(Error::ZeroMeanDegree);
    }
    let excess_mean = g_p.derivative_at(2, F::one()) / first;
    let denom = F::one() - t * excess_mean;
    if denom <= F::zero() {
        return Err(Error::Supercritical {
            t: t.to_f64_lossy(),
            t_c: critical_t(g_p).value.to_f64_lossy(),
        });
    }
    Ok(F::one() + t * first / denom)
}

/// Iterations allowed per contour point when solving for `H_q`.
pub const COMPONENT_ITERATIONS: usize = 10_000;

/// Unconditional probabilities `P_s(T)` that a random vertex lies in a small
/// occupied component of size `s`, for `s = 0..=s_max` (entry 0 is zero).
///
/// `H_q(x) = (x/u_T) G_q(u_T H_q(x); T)` is solved pointwise on a sampling
/// circle by fixed-point iteration, `(1 − S_T) H_p(x) = x G_p(u_T H_q(x); T)`
/// is formed there, and the coefficients are recovered by discrete Cauchy
/// inversion. The circle radius is 0.95, raised towards 1 for large `s_max`
/// so that the `r^{-s}` error amplification stays below 1e7.
pub fn small_component_distribution<F: Real>(
    g_p: &PowerSeries<F>,
    t: F,
    s_max: usize,
    tol: F,
) -> Result<Vec<F>> {
    check_t(t)?;
    if s_max < 1 {
        return Err(Error::param("s_max must be at least 1"));
    }
    let g_q = g_p.excess()?;
    let u = solve_u_t(&g_q, t, tol)?.value;
    let count = s_max + 1;
    if u == F::zero() {
        // every vertex joins the giant occupied component
        return Ok(vec![F::zero(); count]);
    }
    let radius = F::lit(0.95).max(F::lit(1e-7).powf(F::one() / F::from_usize_lossy(s_max)));
    let n = (4 * count).next_power_of_two();
    let one = Complex::new(F::one(), F::zero());
    let perc = |y: Complex<F>| one + (y - one) * t;
    let mut values = Vec::with_capacity(n);
    for z in contour_points(n, radius) {
        let mut h = z;
        let mut converged = false;
        let mut change = F::infinity();
        for _ in 0..COMPONENT_ITERATIONS {
            let next = z * g_q.evaluate_complex(perc(h * u)) / u;
            change = (next - h).norm();
            h = next;
            if change <= tol {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence {
                iterations: COMPONENT_ITERATIONS,
                change: change.to_f64_lossy(),
            });
        }
        values.push(z * g_p.evaluate_complex(perc(h * u)));
    }
    let mut p = coefficients_from_samples(&values, radius, count);
    p[0] = F::zero();
    Ok(p)
}

/// Analytic summary at a given transmissibility.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PercolationReport<F> {
    #[serde(rename = "T")]
    pub t: F,
    /// `None` when the threshold is infinite.
    #[serde(rename = "T_c")]
    pub t_c: Option<F>,
    #[serde(rename = "u_T")]
    pub u_t: F,
    #[serde(rename = "S_T")]
    pub s_t: F,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mean_small: Option<F>,
    pub epidemic: bool,
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub degenerate: bool,
}

impl<F: Real> PercolationReport<F> {
    pub fn analyze(g_p: &PowerSeries<F>, t: F, tol: F) -> Result<Self> {
        let g_q = g_p.excess()?;
        let fp = solve_u_t(&g_q, t, tol)?;
        let t_c = critical_t(g_p);
        let s_t = if fp.value >= F::one() {
            F::zero()
        } else {
            giant_fraction_t(g_p, t, fp.value)
        };
        let epidemic = t > t_c.value;
        let mean_small = if epidemic {
            None
        } else {
            mean_small_component(g_p, t).ok()
        };
        Ok(Self {
            t,
            t_c: t_c.finite(),
            u_t: fp.value,
            s_t,
            mean_small,
            epidemic,
            degenerate: fp.degenerate,
        })
    }
}
