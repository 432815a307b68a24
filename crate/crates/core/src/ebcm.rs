//! Edge-based compartmental SIR dynamics on configuration-model networks.
//!
//! θ(t) is the probability that a random partner has not yet transmitted to a
//! random vertex. With `S = G_p(θ)`, `Φ_S = G_p'(θ)/G_p'(1)` and
//! `Φ_R = (γ/β)(1 − θ)` the system closes as
//!
//! ```text
//! θ' = −βθ + β G_p'(θ)/G_p'(1) + γ(1 − θ)
//! R' = γ I,   I = 1 − S − R
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{bisect, Real};
use crate::percolation::{giant_fraction_t, solve_u_t, EpidemicParams};
use crate::pgf::PowerSeries;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions<F> {
    pub theta0: F,
    pub t_end: F,
    /// Step size; `None` uses `0.01 / max(β, γ)`.
    pub dt: Option<F>,
}

impl<F: Real> Default for IntegrateOptions<F> {
    fn default() -> Self {
        Self {
            theta0: F::one() - F::lit(1e-6),
            t_end: F::lit(40.0),
            dt: None,
        }
    }
}

impl<F: Real> IntegrateOptions<F> {
    pub fn step(&self, params: &EpidemicParams<F>) -> F {
        self.dt
            .unwrap_or_else(|| F::lit(0.01) / params.beta.max(params.gamma))
    }
}

/// Time series on a uniform grid. The Φ columns are absent when β = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<F> {
    pub t: Vec<F>,
    pub theta: Vec<F>,
    pub s: Vec<F>,
    pub i: Vec<F>,
    pub r: Vec<F>,
    pub phi: Option<FluxSplit<F>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluxSplit<F> {
    pub phi_s: Vec<F>,
    pub phi_i: Vec<F>,
    pub phi_r: Vec<F>,
}

impl<F: Real> Trajectory<F> {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn final_theta(&self) -> F {
        *self.theta.last().expect("trajectory has at least the initial point")
    }

    /// Largest `|S + I + R − 1|` along the trajectory.
    pub fn conservation_error(&self) -> F {
        self.s
            .iter()
            .zip(&self.i)
            .zip(&self.r)
            .map(|((&s, &i), &r)| (s + i + r - F::one()).abs())
            .fold(F::zero(), F::max)
    }

    pub const CSV_HEADER: &'static str = "t,theta,S,I,R,phiS,phiI,phiR";

    /// CSV with header `t,theta,S,I,R,phiS,phiI,phiR`; Φ cells are empty when
    /// the split is undefined.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for k in 0..self.len() {
            write!(
                out,
                "{},{},{},{},{}",
                self.t[k], self.theta[k], self.s[k], self.i[k], self.r[k]
            )?;
            match &self.phi {
                Some(p) => writeln!(out, ",{},{},{}", p.phi_s[k], p.phi_i[k], p.phi_r[k])?,
                None => writeln!(out, ",,,")?,
            }
        }
        Ok(())
    }
}

/// Classic fixed-step RK4 on (θ, R).
pub fn integrate<F: Real>(
    g_p: &PowerSeries<F>,
    params: &EpidemicParams<F>,
    opts: &IntegrateOptions<F>,
) -> Result<Trajectory<F>> {
    params.validate()?;
    let theta0 = opts.theta0;
    if !(theta0 > F::zero() && theta0 <= F::one()) {
        return Err(Error::param(format!("theta0 must lie in (0, 1], got {theta0}")));
    }
    let dt = opts.step(params);
    if !(dt > F::zero() && dt.is_finite()) {
        return Err(Error::param(format!("step size must be positive, got {dt}")));
    }
    if !(opts.t_end >= F::zero()) {
        return Err(Error::param("t_end must be nonnegative"));
    }
    let dg = g_p.derivative(1);
    let mean = dg.evaluate(F::one());
    if mean <= F::zero() {
        return Err(Error::ZeroMeanDegree);
    }
    let (beta, gamma) = (params.beta, params.gamma);
    let phi_s = |theta: F| dg.evaluate(theta) / mean;
    let rhs = |theta: F, r: F| -> (F, F) {
        let dtheta = -beta * theta + beta * phi_s(theta) + gamma * (F::one() - theta);
        let infected = F::one() - g_p.evaluate(theta) - r;
        (dtheta, gamma * infected)
    };

    let steps = (opts.t_end / dt).ceil().to_usize().unwrap_or(0);
    let mut traj = Trajectory {
        t: Vec::with_capacity(steps + 1),
        theta: Vec::with_capacity(steps + 1),
        s: Vec::with_capacity(steps + 1),
        i: Vec::with_capacity(steps + 1),
        r: Vec::with_capacity(steps + 1),
        phi: None,
    };
    let mut theta = theta0;
    let mut r = F::zero();
    let half = F::lit(0.5);
    let sixth = F::one() / F::lit(6.0);
    let two = F::lit(2.0);
    let record = |traj: &mut Trajectory<F>, t: F, theta: F, r: F| {
        let s = g_p.evaluate(theta);
        traj.t.push(t);
        traj.theta.push(theta);
        traj.s.push(s);
        traj.i.push(F::one() - s - r);
        traj.r.push(r);
    };
    record(&mut traj, F::zero(), theta, r);
    for step in 1..=steps {
        let h = if step == steps {
            opts.t_end - dt * F::from_usize_lossy(steps - 1)
        } else {
            dt
        };
        let (a1, b1) = rhs(theta, r);
        let (a2, b2) = rhs(theta + h * half * a1, r + h * half * b1);
        let (a3, b3) = rhs(theta + h * half * a2, r + h * half * b2);
        let (a4, b4) = rhs(theta + h * a3, r + h * b3);
        theta += h * sixth * (a1 + two * a2 + two * a3 + a4);
        r += h * sixth * (b1 + two * b2 + two * b3 + b4);
        if !(theta.is_finite() && r.is_finite()) {
            return Err(Error::Unstable(format!(
                "non-finite state at step {step}; try a smaller dt than {dt}"
            )));
        }
        let t = if step == steps {
            opts.t_end
        } else {
            dt * F::from_usize_lossy(step)
        };
        record(&mut traj, t, theta, r);
    }
    if beta > F::zero() {
        let mut split = FluxSplit {
            phi_s: Vec::with_capacity(traj.len()),
            phi_i: Vec::with_capacity(traj.len()),
            phi_r: Vec::with_capacity(traj.len()),
        };
        let ratio = gamma / beta;
        for &theta in &traj.theta {
            let ps = phi_s(theta);
            let pr = ratio * (F::one() - theta);
            split.phi_s.push(ps);
            split.phi_r.push(pr);
            split.phi_i.push(theta - ps - pr);
        }
        traj.phi = Some(split);
    }
    Ok(traj)
}

/// Basic reproduction number `T · G_p''(1) / G_p'(1)` with `T = β/(β+γ)`.
pub fn r0<F: Real>(g_p: &PowerSeries<F>, params: &EpidemicParams<F>) -> Result<F> {
    params.validate()?;
    let first = g_p.derivative_at(1, F::one());
    if first <= F::zero() {
        return Err(Error::ZeroMeanDegree);
    }
    Ok(params.constant_rates_t() * g_p.derivative_at(2, F::one()) / first)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceResiduals<F> {
    /// `|θ(∞) − (1 + (u_T − 1)T)|`
    pub theta: F,
    /// `|R(∞) − S_T|`
    pub size: F,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinalSizeReport<F> {
    pub theta_inf: F,
    #[serde(rename = "R_inf")]
    pub r_inf: F,
    #[serde(rename = "R0")]
    pub r0: F,
    pub equiv_residuals: EquivalenceResiduals<F>,
}

/// Final state: smallest root in `[0, 1)` of
/// `θ = γ/(β+γ) + β/(β+γ) · G_p'(θ)/G_p'(1)` (1 when none), and
/// `R(∞) = 1 − G_p(θ(∞))`. The residuals compare against the percolation
/// route at `T = β/(β+γ)`.
pub fn final_size<F: Real>(
    g_p: &PowerSeries<F>,
    params: &EpidemicParams<F>,
    tol: F,
) -> Result<FinalSizeReport<F>> {
    let r0 = r0(g_p, params)?;
    let t = params.constant_rates_t();
    // θ − γ/(β+γ) − β/(β+γ)·Φ_S(θ) = (1 − θ)(T·D(θ) − 1) with
    // D(θ) = (1 − Φ_S(θ))/(1 − θ); the trivial root θ = 1 is divided out
    let dg = g_p.derivative(1);
    let mean = dg.evaluate(F::one());
    let phi_s = PowerSeries::new(dg.coeffs().iter().map(|&c| c / mean).collect())?;
    let d = phi_s.secant_to_one();
    let k = |theta: F| F::one() - t * d.evaluate(theta);
    let theta_inf = if k(F::one()) >= F::zero() {
        // R0 ≤ 1
        F::one()
    } else if k(F::zero()) <= F::zero() {
        F::zero()
    } else {
        bisect(F::zero(), F::one(), tol, k)
    };
    let r_inf = if theta_inf == F::one() {
        F::zero()
    } else {
        (F::one() - g_p.evaluate(theta_inf)).max(F::zero())
    };

    let g_q = g_p.excess()?;
    let u_t = solve_u_t(&g_q, t, tol)?.value;
    let s_t = if u_t >= F::one() {
        F::zero()
    } else {
        giant_fraction_t(g_p, t, u_t)
    };
    let equiv_residuals = EquivalenceResiduals {
        theta: (theta_inf - (F::one() + (u_t - F::one()) * t)).abs(),
        size: (r_inf - s_t).abs(),
    };
    Ok(FinalSizeReport {
        theta_inf,
        r_inf,
        r0,
        equiv_residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> PowerSeries<f64> {
        PowerSeries::monomial(3, 1.0)
    }

    fn params(beta: f64, gamma: f64) -> EpidemicParams<f64> {
        EpidemicParams::new(beta, gamma).unwrap()
    }

    #[test]
    fn subcritical_outbreak_dies_out() {
        let p = params(0.4, 1.0);
        assert!((r0(&cubic(), &p).unwrap() - 0.4 / 1.4 * 2.0).abs() < 1e-12);
        let traj = integrate(&cubic(), &p, &IntegrateOptions::default()).unwrap();
        // With R(0) = 0 and θ0 < 1 the Φ_R closure starts slightly off the
        // consistent manifold, so I dips a little below zero before settling.
        let i0 = traj.i[0];
        assert!(traj.i.iter().all(|&i| i <= i0 && i.abs() <= i0));
        let half = traj.len() / 2;
        let tail = traj.i[half..].iter().fold(0.0f64, |m, &i| m.max(i.abs()));
        assert!(tail < 1e-5 * i0);
        assert!(traj.i.last().unwrap().abs() < 1e-12);
        assert!(*traj.r.last().unwrap() < 0.01);
        let fs = final_size(&cubic(), &p, 1e-12).unwrap();
        assert_eq!(fs.theta_inf, 1.0);
    }

    #[test]
    fn disease_free_start_stays_put() {
        let opts = IntegrateOptions {
            theta0: 1.0,
            ..Default::default()
        };
        let traj = integrate(&cubic(), &params(1.5, 1.0), &opts).unwrap();
        assert!(traj.theta.iter().all(|&t| t == 1.0));
        assert!(traj.i.iter().all(|&i| i == 0.0));
    }

    #[test]
    fn endpoint_lands_on_time_t_end() {
        let opts = IntegrateOptions {
            t_end: 1.005,
            dt: Some(0.01),
            ..Default::default()
        };
        let traj = integrate(&cubic(), &params(1.5, 1.0), &opts).unwrap();
        assert_eq!(*traj.t.last().unwrap(), 1.005);
        assert_eq!(traj.len(), 102);
    }

    #[test]
    fn flux_split_sums_to_theta() {
        let traj = integrate(&cubic(), &params(1.5, 1.0), &IntegrateOptions::default()).unwrap();
        let phi = traj.phi.as_ref().unwrap();
        for k in 0..traj.len() {
            let sum = phi.phi_s[k] + phi.phi_i[k] + phi.phi_r[k];
            assert!((sum - traj.theta[k]).abs() < 1e-12);
        }
        let zero_beta = integrate(&cubic(), &params(0.0, 1.0), &IntegrateOptions::default()).unwrap();
        assert!(zero_beta.phi.is_none());
    }

    #[test]
    fn invalid_options() {
        let p = params(1.0, 1.0);
        let bad = |theta0: f64, dt: Option<f64>| IntegrateOptions {
            theta0,
            t_end: 1.0,
            dt,
        };
        assert!(integrate(&cubic(), &p, &bad(0.0, None)).is_err());
        assert!(integrate(&cubic(), &p, &bad(1.2, None)).is_err());
        assert!(integrate(&cubic(), &p, &bad(0.9, Some(0.0))).is_err());
        assert!(integrate(&cubic(), &p, &bad(0.9, Some(-1.0))).is_err());
    }

    #[test]
    fn unstable_step_reports_error() {
        let opts = IntegrateOptions {
            theta0: 0.5,
            t_end: 1e4,
            dt: Some(1e3),
        };
        let err = integrate(&cubic(), &params(50.0, 50.0), &opts).unwrap_err();
        assert!(matches!(err, Error::Unstable(_)));
    }

    #[test]
    fn r0_examples() {
        assert!((r0(&cubic(), &params(1.5, 1.0)).unwrap() - 1.2).abs() < 1e-12);
        assert_eq!(r0(&cubic(), &params(0.0, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn final_size_examples() {
        let fs = final_size(&cubic(), &params(1.5, 1.0), 1e-13).unwrap();
        assert!((fs.theta_inf - 2.0 / 3.0).abs() < 1e-12);
        assert!((fs.r_inf - 19.0 / 27.0).abs() < 1e-12);
        assert!(fs.equiv_residuals.theta < 1e-12);
        assert!(fs.equiv_residuals.size < 1e-12);

        let fs = final_size(&cubic(), &params(1.0, 1.0), 1e-13).unwrap();
        assert_eq!(fs.theta_inf, 1.0);
        assert_eq!(fs.r_inf, 0.0);
    }

    #[test]
    fn generic_over_f32() {
        let g: PowerSeries<f32> = cubic().cast();
        let p = EpidemicParams::new(1.5f32, 1.0).unwrap();
        let fs = final_size(&g, &p, 1e-6).unwrap();
        assert!((fs.theta_inf - 2.0 / 3.0).abs() < 1e-5);
        let traj = integrate(&g, &p, &IntegrateOptions { t_end: 5.0, ..Default::default() }).unwrap();
        assert!(traj.conservation_error() < 1e-6);
    }
}
