//! Truncated power series used as probability generating functions.
//!
//! A [`PowerSeries`] stores the coefficients `c_0..=c_Δ` of `Σ c_k x^k`. When
//! the coefficients form a probability mass function the series is the PGF of
//! that distribution; derivatives at `x = 1` give factorial moments, and the
//! excess-degree and percolated series are formed by the operations below.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;

/// Default tolerance for treating a series as normalized.
pub const PMF_TOL: f64 = 1e-12;

/// Output degree cap for [`PowerSeries::compose`].
pub const COMPOSE_CAP: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PowerSeries<F> {
    coeffs: Vec<F>,
}

/// Result of [`PowerSeries::compose`]; `truncated_at` is set when the full
/// product degree exceeded the cap and higher terms were dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Composition<F> {
    pub series: PowerSeries<F>,
    pub truncated_at: Option<usize>,
}

impl<F: Real> PowerSeries<F> {
    /// Builds a series from its coefficients. Trailing zeros are kept so the
    /// maximum degree reflects the caller's truncation.
    pub fn new(coeffs: Vec<F>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::param("power series needs at least one coefficient"));
        }
        if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::param(format!("coefficient {k} is not finite")));
        }
        Ok(Self { coeffs })
    }

    pub fn constant(c: F) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn zero() -> Self {
        Self::constant(F::zero())
    }

    /// `c·x^k`.
    pub fn monomial(k: usize, c: F) -> Self {
        let mut coeffs = vec![F::zero(); k + 1];
        coeffs[k] = c;
        Self { coeffs }
    }

    /// The identity series `x`.
    pub fn identity() -> Self {
        Self::monomial(1, F::one())
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<F> {
        self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond the stored degree.
    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).copied().unwrap_or_else(F::zero)
    }

    /// Truncation degree Δ.
    pub fn max_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn cast<G: Real>(&self) -> PowerSeries<G> {
        PowerSeries {
            coeffs: self.coeffs.iter().map(|c| G::lit(c.to_f64_lossy())).collect(),
        }
    }

    /// Horner evaluation.
    pub fn evaluate(&self, x: F) -> F {
        self.coeffs.iter().rev().fold(F::zero(), |acc, &c| acc * x + c)
    }

    pub fn evaluate_complex(&self, z: Complex<F>) -> Complex<F> {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex::new(F::zero(), F::zero()), |acc, &c| acc * z + c)
    }

    /// Sum of coefficients, i.e. the value at `x = 1`.
    pub fn total(&self) -> F {
        self.coeffs.iter().copied().sum()
    }

    /// Σ k·c_k.
    pub fn mean(&self) -> F {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| F::from_usize_lossy(k) * c)
            .sum()
    }

    /// Nonnegative coefficients summing to one within `tol`.
    pub fn is_pmf(&self, tol: F) -> bool {
        self.coeffs.iter().all(|&c| c >= F::zero() && c <= F::one() + tol)
            && (self.total() - F::one()).abs() <= tol
    }

    pub(crate) fn ensure_pmf(&self) -> Result<()> {
        let tol = F::lit(1e-9).max(F::epsilon() * F::lit(64.0));
        if let Some(k) = self.coeffs.iter().position(|&c| c < F::zero()) {
            return Err(Error::NotPmf(format!("coefficient {k} is negative")));
        }
        let total = self.total();
        if (total - F::one()).abs() > tol {
            return Err(Error::NotPmf(format!("coefficients sum to {total}")));
        }
        Ok(())
    }

    /// Formal derivative of the given order. Orders above Δ give the zero
    /// series.
    pub fn derivative(&self, order: usize) -> Self {
        if order > self.max_degree() {
            return Self::zero();
        }
        let coeffs = (0..=self.max_degree() - order)
            .map(|j| {
                // (j+1)(j+2)...(j+order)
                let falling = (j + 1..=j + order)
                    .fold(F::one(), |acc, m| acc * F::from_usize_lossy(m));
                self.coeffs[j + order] * falling
            })
            .collect();
        Self { coeffs }
    }

    /// `order`-th derivative evaluated at `x`, without materializing it.
    pub fn derivative_at(&self, order: usize, x: F) -> F {
        self.derivative(order).evaluate(x)
    }

    /// Series of `(G(1) − G(x)) / (1 − x)`, whose coefficients are the tail
    /// sums `d_j = Σ_{k>j} a_k`. For nonnegative coefficients every term is
    /// nonnegative, so it stays accurate as `x → 1` where the numerator alone
    /// cancels. Evaluates to `G'(1)` at 1.
    pub fn secant_to_one(&self) -> Self {
        if self.max_degree() == 0 {
            return Self::zero();
        }
        let mut coeffs = vec![F::zero(); self.max_degree()];
        let mut tail = F::zero();
        for j in (0..self.max_degree()).rev() {
            tail += self.coeffs[j + 1];
            coeffs[j] = tail;
        }
        Self { coeffs }
    }

    /// Excess-degree PGF `G_q(x) = G_p'(x) / G_p'(1)`, i.e.
    /// `q_k = (k+1) p_{k+1} / ⟨K⟩`.
    pub fn excess(&self) -> Result<Self> {
        self.ensure_pmf()?;
        let mean = self.mean();
        if mean <= F::zero() {
            return Err(Error::ZeroMeanDegree);
        }
        if self.max_degree() == 0 {
            return Err(Error::ZeroMeanDegree);
        }
        let coeffs = (0..self.max_degree())
            .map(|k| F::from_usize_lossy(k + 1) * self.coeffs[k + 1] / mean)
            .collect();
        Ok(Self { coeffs })
    }

    /// Series of `x ↦ s(1 + (x − 1)T)`: the binomially thinned distribution in
    /// which every unit of degree survives independently with probability `T`.
    pub fn percolate(&self, t: F) -> Result<Self> {
        if !(t >= F::zero() && t <= F::one()) {
            return Err(Error::param(format!("transmissibility {t} outside [0, 1]")));
        }
        let keep = t;
        let drop = F::one() - t;
        // Horner in the polynomial ring: acc = acc·(drop + keep·x) + c_k
        let mut acc: Vec<F> = vec![F::zero(); self.coeffs.len()];
        let mut len = 0usize;
        for &c in self.coeffs.iter().rev() {
            let mut next = vec![F::zero(); len + 1];
            for (m, &a) in acc[..len].iter().enumerate() {
                next[m] += a * drop;
                next[m + 1] += a * keep;
            }
            next[0] += c;
            len = next.len();
            acc[..len].copy_from_slice(&next);
        }
        Ok(Self { coeffs: acc })
    }

    /// Composition `outer(inner(x))` up to degree `min(Δ_out·Δ_in, COMPOSE_CAP)`.
    pub fn compose(&self, inner: &Self) -> Composition<F> {
        self.compose_capped(inner, COMPOSE_CAP)
    }

    pub fn compose_capped(&self, inner: &Self, cap: usize) -> Composition<F> {
        let full = self.max_degree() * inner.max_degree();
        let degree = full.min(cap);
        let truncated_at = (full > cap).then_some(cap);
        let mut acc = vec![F::zero(); degree + 1];
        let mut acc_len = 1usize;
        let inner_c = inner.coeffs();
        for &c in self.coeffs.iter().rev() {
            let new_len = (acc_len - 1 + inner.max_degree()).min(degree) + 1;
            let mut next = vec![F::zero(); new_len];
            for (i, &a) in acc[..acc_len].iter().enumerate() {
                if a == F::zero() {
                    continue;
                }
                for (j, &b) in inner_c.iter().enumerate() {
                    if i + j >= new_len {
                        break;
                    }
                    next[i + j] += a * b;
                }
            }
            next[0] += c;
            acc_len = new_len;
            acc[..acc_len].copy_from_slice(&next);
        }
        Composition {
            series: Self { coeffs: acc },
            truncated_at,
        }
    }
}

/// Sampling circle used by [`extract_coefficients`].
#[derive(Debug, Clone, Copy)]
pub struct ContourOptions<F> {
    pub radius: F,
    /// Number of sample points; `None` uses 4× the requested coefficients
    /// rounded up to a power of two.
    pub samples: Option<usize>,
}

impl<F: Real> Default for ContourOptions<F> {
    fn default() -> Self {
        Self {
            radius: F::lit(0.95),
            samples: None,
        }
    }
}

impl<F: Real> ContourOptions<F> {
    pub fn sample_count(&self, count: usize) -> usize {
        self.samples
            .unwrap_or_else(|| (4 * count.max(1)).next_power_of_two())
    }
}

/// Recovers the first `count` Taylor coefficients of a function analytic on
/// the closed disk of the given radius by sampling it on that circle and
/// inverting the discrete Fourier transform (trapezoidal Cauchy integral).
///
/// Coefficient `k` picks up aliasing from `k + n, k + 2n, ...` scaled by
/// `r^n`, and rounding error amplified by `r^{-k}`.
pub fn extract_coefficients<F, G>(f: G, count: usize, opts: &ContourOptions<F>) -> Vec<F>
where
    F: Real,
    G: Fn(Complex<F>) -> Complex<F>,
{
    let points = contour_points(opts.sample_count(count), opts.radius);
    let values: Vec<Complex<F>> = points.iter().map(|&z| f(z)).collect();
    coefficients_from_samples(&values, opts.radius, count)
}

/// `n` equally spaced points on the circle of radius `r`, starting at `r`.
pub fn contour_points<F: Real>(n: usize, r: F) -> Vec<Complex<F>> {
    let step = F::TAU() / F::from_usize_lossy(n);
    (0..n)
        .map(|j| Complex::from_polar(r, step * F::from_usize_lossy(j)))
        .collect()
}

/// Inverse DFT of samples taken at [`contour_points`]`(values.len(), r)`.
pub fn coefficients_from_samples<F: Real>(values: &[Complex<F>], r: F, count: usize) -> Vec<F> {
    let n = values.len();
    let twiddles = contour_points(n, F::one());
    let inv_n = F::one() / F::from_usize_lossy(n);
    let mut scale = F::one();
    (0..count)
        .map(|k| {
            let mut acc = Complex::new(F::zero(), F::zero());
            for (j, v) in values.iter().enumerate() {
                // conj(ω^{jk})
                acc += v * twiddles[(j * k) % n].conj();
            }
            let c = acc.re * inv_n / scale;
            scale *= r;
            c
        })
        .collect()
}
