//! Ring-resonator response: steady state, round-trip amplitude series,
//! energy-ratio partial sums, and the asymptotic limit.
//!
//! Two complementary models are exposed, matching how the source material
//! presents them:
//!
//! * the steady-state picture (coupling `c`, finesse `F`, loss `alpha`), and
//! * the lossless round-trip series in the power reflectivity `R` alone.
//!
//! They cross-validate only at the impedance-matched resonance point, where
//! both give a vanishing reflected power. The loss constant `alpha` is never
//! injected into the series model.

use num_complex::Complex;

use crate::spectral::{make_grid, FrequencyGrid, SourceSpec};
use crate::{lit, Error, Result, Scalar};

/// Steady-state resonator configuration.
///
/// Finesse is derived from `R` and `alpha` as `F = pi sqrt(rho) / (1 - rho)`
/// with `rho = e^{-alpha} sqrt(R)` the round-trip amplitude factor; it is
/// cached, never set independently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingParams<T> {
    big_r: T,
    alpha: T,
    phi: T,
    delta: T,
    finesse: T,
}

impl<T: Scalar> RingParams<T> {
    pub fn new(big_r: T, alpha: T, phi: T, delta: T) -> Result<Self> {
        if !(big_r >= T::zero()) || !(big_r < T::one()) {
            return Err(Error::InvalidArgument("R must lie in [0, 1)".into()));
        }
        if !(alpha >= T::zero()) {
            return Err(Error::InvalidArgument("alpha must be >= 0".into()));
        }
        let rho = (-alpha).exp() * big_r.sqrt();
        if !(rho < T::one()) {
            return Err(Error::InvalidArgument(
                "round-trip amplitude factor must be < 1".into(),
            ));
        }
        let finesse = T::PI() * rho.sqrt() / (T::one() - rho);
        Ok(Self {
            big_r,
            alpha,
            phi,
            delta,
            finesse,
        })
    }

    /// Configuration at the impedance-matched resonance point: amplitude
    /// reflectivity `e^{-alpha}` and round-trip phase `phi = 2 N pi - delta`.
    pub fn impedance_matched(alpha: T, delta: T) -> Result<Self> {
        let r = (-alpha).exp();
        Self::new(r * r, alpha, -delta, delta)
    }

    pub fn big_r(&self) -> T {
        self.big_r
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn finesse(&self) -> T {
        self.finesse
    }
}

/// Energy-ratio curve versus round-trip count.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaCurve<T> {
    pub n_values: Vec<u32>,
    pub eta_values: Vec<T>,
    pub source: SourceSpec<T>,
    pub big_r: T,
}

/// Coupling `c = (1 - e^{-2 alpha})(1 - r^2) / (1 - e^{-alpha} r)^2`,
/// with `r` the amplitude reflectivity.
pub fn coupling_c<T: Scalar>(r: T, alpha: T) -> Result<T> {
    if !(r >= T::zero()) || !(r < T::one()) {
        return Err(Error::InvalidArgument("r must lie in [0, 1)".into()));
    }
    if !(alpha >= T::zero()) {
        return Err(Error::InvalidArgument("alpha must be >= 0".into()));
    }
    let ea = (-alpha).exp();
    let num = (T::one() - ea * ea) * (T::one() - r * r);
    let den = T::one() - ea * r;
    Ok(num / (den * den))
}

/// Steady-state reflected/incoming power ratio, with the round-trip
/// phase shifted by `detuning_phase`.
pub fn steady_eta<T: Scalar>(rp: &RingParams<T>, detuning_phase: T) -> T {
    let r = rp.big_r.sqrt();
    let c = coupling_c(r, rp.alpha).expect("RingParams invariants guarantee valid r, alpha");
    let s = ((rp.delta + rp.phi + detuning_phase) / lit::<T>(2.0)).sin();
    let fac = lit::<T>(2.0) * rp.finesse / T::PI() * s;
    T::one() - c / (T::one() + fac * fac)
}

/// Reflected amplitude after `n` round trips for unit incident amplitude
/// (closed geometric form of the round-trip series):
/// `B_n/A = sqrt(R) * (-1 + (1-R) e^{i psi} (1 - (R e^{i psi})^n) / (1 - R e^{i psi}))`.
pub fn partial_amplitude<T: Scalar>(n: u32, big_r: T, psi: T) -> Result<Complex<T>> {
    if !(big_r >= T::zero()) || !(big_r < T::one()) {
        return Err(Error::InvalidArgument("R must lie in [0, 1)".into()));
    }
    let sqrt_r = big_r.sqrt();
    let e_ipsi = Complex::from_polar(T::one(), psi);
    let z = e_ipsi * big_r;
    let geom = (Complex::new(T::one(), T::zero()) - z.powu(n))
        / (Complex::new(T::one(), T::zero()) - z);
    let inner = Complex::new(-T::one(), T::zero()) + e_ipsi * geom * (T::one() - big_r);
    Ok(inner * sqrt_r)
}

/// `|B_r/A|^2` in the infinite-trip limit, computed through the
/// complex amplitude `sqrt(R) (1 - e^{i psi}) / (1 - R e^{i psi})`.
pub fn asymptotic_spectral_ratio<T: Scalar>(big_r: T, psi: T) -> T {
    let two = lit::<T>(2.0);
    let half = psi / two;
    let (s, c) = (half.sin(), half.cos());
    // 1 - e^{i psi} = 2 sin(psi/2) (sin(psi/2) - i cos(psi/2)); forming it
    // this way avoids cancellation near resonance.
    let num = Complex::new(two * s * s, -two * s * c);
    let den = Complex::new(T::one() - big_r + two * big_r * s * s, -big_r * psi.sin());
    let br = num / den;
    big_r * br.norm_sqr()
}

/// Algebraically equivalent closed form of [`asymptotic_spectral_ratio`]:
/// `1 - (1-R)^2 / (1 - 2 R cos psi + R^2)`.
pub fn asymptotic_spectral_ratio_closed<T: Scalar>(big_r: T, psi: T) -> T {
    let one_minus = T::one() - big_r;
    // 1 - 2 R cos psi + R^2 = (1-R)^2 + 4 R sin^2(psi/2), the stable form.
    let s = (psi / lit::<T>(2.0)).sin();
    let den = one_minus * one_minus + lit::<T>(4.0) * big_r * s * s;
    T::one() - one_minus * one_minus / den
}

/// cw closed form `eta_n = R^{2n+1}`.
pub fn eta_n_cw_closed<T: Scalar>(big_r: T, n: u32) -> T {
    if big_r == T::zero() {
        return T::zero();
    }
    let k = lit::<T>(2.0 * n as f64 + 1.0);
    (k * big_r.ln()).exp()
}

/// Reflected/incoming energy ratio after `n` round trips:
///
/// ```text
/// eta_n = R { 1 - (1-R)/(1+R) [ R^{2n} - 1
///           + 2 sum_{j=1}^{n} (1 + R^{2n-2j+1}) R^{j-1} Phi(j) ] }
/// ```
///
/// with `Phi(j) = 1` for cw and `Phi(j) = exp(-j^2 / (4 a^2))` for pulses.
/// Terms are accumulated smallest-first. For cw sources with
/// `(2n+1) |ln R| > 700` the sum underflows and the closed form is used.
pub fn eta_n<T: Scalar>(big_r: T, n: u32, source: &SourceSpec<T>) -> Result<T> {
    if !(big_r >= T::zero()) || !(big_r < T::one()) {
        return Err(Error::InvalidArgument("R must lie in [0, 1)".into()));
    }
    if n == 0 {
        return Ok(big_r);
    }
    if big_r == T::zero() {
        return Ok(T::zero());
    }
    let a = match *source {
        SourceSpec::Cw { .. } => None,
        SourceSpec::Pulse { a, .. } => Some(a),
    };
    let ln_r = big_r.ln();
    if a.is_none() && lit::<T>(2.0 * n as f64 + 1.0) * ln_r.abs() > lit::<T>(700.0) {
        return Ok(eta_n_cw_closed(big_r, n));
    }
    let pow = |k: f64| (lit::<T>(k) * ln_r).exp();
    let quarter = lit::<T>(0.25);
    let mut terms = Vec::with_capacity(n as usize);
    for j in 1..=n {
        let jf = j as f64;
        let phi = match a {
            None => T::one(),
            Some(a) => (-lit::<T>(jf * jf) * quarter / (a * a)).exp(),
        };
        let term = (T::one() + pow(2.0 * n as f64 - 2.0 * jf + 1.0)) * pow(jf - 1.0) * phi;
        terms.push(term);
    }
    // Terms decay with j; sum them smallest-first.
    let mut sum = T::zero();
    for &t in terms.iter().rev() {
        sum = sum + t;
    }
    let bracket = pow(2.0 * n as f64) - T::one() + lit::<T>(2.0) * sum;
    let eta = big_r * (T::one() - (T::one() - big_r) / (T::one() + big_r) * bracket);
    Ok(eta.max(T::zero()).min(T::one()))
}

/// Energy-ratio curve for `n = 0..=n_max`.
pub fn eta_curve<T: Scalar>(big_r: T, n_max: u32, source: &SourceSpec<T>) -> Result<EtaCurve<T>> {
    let mut n_values = Vec::with_capacity(n_max as usize + 1);
    let mut eta_values = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        n_values.push(n);
        eta_values.push(eta_n(big_r, n, source)?);
    }
    Ok(EtaCurve {
        n_values,
        eta_values,
        source: *source,
        big_r,
    })
}

const LIMIT_REFINE_TOL: f64 = 1e-8;

/// Asymptotic energy ratio `eta_infinity`:
///
/// ```text
/// 1 - (1-R)^2 * Int e^{-(a u)^2} / (1 - 2 R cos u + R^2) du
///             / Int e^{-(a u)^2} du
/// ```
///
/// cw sources are the symbolic `a -> infinity` limit, which is 0. The
/// quadrature is checked by grid refinement; a relative change above 1e-8
/// is reported as a numerical error.
pub fn eta_limit<T: Scalar>(
    big_r: T,
    source: &SourceSpec<T>,
    grid: &FrequencyGrid<T>,
) -> Result<T> {
    if !(big_r >= T::zero()) || !(big_r < T::one()) {
        return Err(Error::InvalidArgument("R must lie in [0, 1)".into()));
    }
    let a = match *source {
        SourceSpec::Cw { .. } => return Ok(T::zero()),
        SourceSpec::Pulse { a, .. } => a,
    };
    let eval = |g: &FrequencyGrid<T>| -> T {
        let two = lit::<T>(2.0);
        let r2 = big_r * big_r;
        let num = g.integrate(|u| {
            let w = (-(a * u) * (a * u)).exp();
            w / (T::one() - two * big_r * u.cos() + r2)
        });
        let den = g.integrate(|u| (-(a * u) * (a * u)).exp());
        let omr = T::one() - big_r;
        T::one() - omr * omr * num / den
    };
    let coarse = eval(grid);
    let span_sigmas = *grid.samples().last().expect("grid is non-empty") * a * lit::<T>(2.0).sqrt();
    let fine_grid = make_grid(a, 2 * grid.len() - 1, span_sigmas)?;
    let fine = eval(&fine_grid);
    let scale = fine.abs().max(lit::<T>(1e-300));
    if (fine - coarse).abs() / scale > lit::<T>(LIMIT_REFINE_TOL) {
        return Err(Error::Numerical(format!(
            "eta_limit quadrature did not converge: {coarse} vs {fine} under refinement"
        )));
    }
    Ok(fine)
}
