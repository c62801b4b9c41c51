//! Time-domain round-trip recurrence for cavity build-up and the
//! virtual-or-real-path switching experiment.
//!
//! The cavity state tracks the circulating amplitude `D` arriving at the
//! input coupler, driven by a unit cw field. One round trip applies
//!
//! ```text
//! D' = e^{i psi} sqrt(R) (sqrt(R) D + sqrt(1-R))
//! ```
//!
//! (reflection off both coupling faces plus the round-trip phase), and the
//! instantaneous reflected amplitude is `-sqrt(R) + sqrt(1-R) D`. This
//! reproduces the round-trip series amplitude exactly: at trip `n` the
//! reflected power on resonance is `R^{2n+1}`.
//!
//! Blocking (Pockels cell on) removes the circulating field each trip and
//! redirects it to detector `D_p`; the reflected power is then exactly `R`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ring::{eta_n_cw_closed, EtaCurve};
use crate::spectral::SourceSpec;
use crate::{lit, Error, Result, Scalar};

/// Intracavity amplitude plus elapsed round-trip count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityState<T> {
    /// Circulating complex amplitude at the coupler, unit-incident normalized.
    pub intracavity: Complex<T>,
    pub trips_elapsed: u64,
    /// Pockels on: the round-trip path is redirected.
    pub blocked: bool,
}

impl<T: Scalar> CavityState<T> {
    pub fn empty() -> Self {
        CavityState {
            intracavity: Complex::new(T::zero(), T::zero()),
            trips_elapsed: 0,
            blocked: false,
        }
    }
}

/// Advances the cavity by one round trip under unit cw drive.
pub fn step_cavity<T: Scalar>(s: &CavityState<T>, big_r: T, psi: T) -> CavityState<T> {
    let intracavity = if s.blocked {
        // Circulating field redirected out of the ring each trip.
        Complex::new(T::zero(), T::zero())
    } else {
        let sqrt_r = big_r.sqrt();
        let sqrt_t = (T::one() - big_r).sqrt();
        let fed = s.intracavity * sqrt_r + Complex::new(sqrt_t, T::zero());
        fed * Complex::from_polar(sqrt_r, psi)
    };
    CavityState {
        intracavity,
        trips_elapsed: s.trips_elapsed + 1,
        blocked: s.blocked,
    }
}

/// Instantaneous reflected-port amplitude for the current state.
pub fn reflected_amplitude<T: Scalar>(s: &CavityState<T>, big_r: T) -> Complex<T> {
    Complex::new(-big_r.sqrt(), T::zero())
        + s.intracavity * (T::one() - big_r).sqrt()
}

/// Transmitted-port amplitude for the current trip (field passing the far
/// coupling face).
pub fn transmitted_amplitude<T: Scalar>(s: &CavityState<T>, big_r: T) -> Complex<T> {
    if s.blocked {
        return Complex::new(T::zero(), T::zero());
    }
    let sqrt_t = (T::one() - big_r).sqrt();
    (s.intracavity * big_r.sqrt() + Complex::new(sqrt_t, T::zero())) * sqrt_t
}

/// Smallest `n` with reflected power `R^{2n+1} <= epsilon` under cw drive.
pub fn rounds_to_threshold<T: Scalar>(big_r: T, epsilon: T) -> Result<u64> {
    if !(big_r > T::zero()) || !(big_r < T::one()) {
        return Err(Error::InvalidArgument("R must lie in (0, 1)".into()));
    }
    if !(epsilon > T::zero()) {
        return Err(Error::InvalidArgument("epsilon must be > 0".into()));
    }
    if epsilon >= big_r {
        return Ok(0);
    }
    let ln_r = big_r.ln();
    let guess = ((epsilon.ln() / ln_r - T::one()) / lit::<T>(2.0))
        .ceil()
        .to_f64()
        .unwrap()
        .max(0.0) as u64;
    let power = |n: u64| (lit::<T>(2.0 * n as f64 + 1.0) * ln_r).exp();
    let mut n = guess;
    while n > 0 && power(n - 1) <= epsilon {
        n -= 1;
    }
    while power(n) > epsilon {
        n += 1;
    }
    Ok(n)
}

/// Reflected-power build-up curve from the round-trip recurrence.
///
/// Pointwise identical (to 1e-12) with the cw closed form `R^{2n+1}`.
pub fn build_up_curve<T: Scalar>(big_r: T, n_max: u32) -> Result<EtaCurve<T>> {
    if !(big_r >= T::zero()) || !(big_r < T::one()) {
        return Err(Error::InvalidArgument("R must lie in [0, 1)".into()));
    }
    let mut state = CavityState::empty();
    let mut n_values = Vec::with_capacity(n_max as usize + 1);
    let mut eta_values = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        n_values.push(n);
        eta_values.push(reflected_amplitude(&state, big_r).norm_sqr());
        state = step_cavity(&state, big_r, T::zero());
    }
    Ok(EtaCurve {
        n_values,
        eta_values,
        source: SourceSpec::Cw {
            amplitude_scale: T::one(),
        },
        big_r,
    })
}

/// Detectors of the switching experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detector {
    Dr,
    Dt,
    Dp,
}

impl Detector {
    pub fn as_str(&self) -> &'static str {
        match self {
            Detector::Dr => "DR",
            Detector::Dt => "DT",
            Detector::Dp => "DP",
        }
    }
}

/// Competing hypotheses about when a boundary change takes effect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    /// The change acts on outcome statistics immediately.
    Instant,
    /// The change acts only after the information-travel delay.
    Delayed,
}

impl Hypothesis {
    pub fn as_str(&self) -> &'static str {
        match self {
            Hypothesis::Instant => "instant",
            Hypothesis::Delayed => "delayed",
        }
    }
}

/// Pockels-cell switching scenario. Times in nanoseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchScenario {
    /// Transitions (time ns, blocked). State before the first transition is
    /// unblocked.
    pub schedule: Vec<(f64, bool)>,
    pub round_trip_time_ns: f64,
    /// Mean photon arrival rate, photons per ns (Poisson process).
    pub photon_rate_per_ns: f64,
    /// Electro-optic reaction time of the cell.
    pub pockels_reaction_ns: f64,
    /// Information-travel delay for the delayed hypothesis.
    pub info_delay_ns: f64,
    pub duration_ns: f64,
}

impl SwitchScenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration_ns > 0.0) {
            return Err(Error::InvalidArgument("duration must be > 0".into()));
        }
        if !(self.photon_rate_per_ns > 0.0) {
            return Err(Error::InvalidArgument("photon rate must be > 0".into()));
        }
        if !(self.round_trip_time_ns > 0.0) {
            return Err(Error::InvalidArgument("round-trip time must be > 0".into()));
        }
        if self.pockels_reaction_ns < 0.0 || self.info_delay_ns < 0.0 {
            return Err(Error::InvalidArgument("delays must be >= 0".into()));
        }
        let mut prev = f64::NEG_INFINITY;
        for &(t, _) in &self.schedule {
            if t < 0.0 || t > self.duration_ns {
                return Err(Error::InvalidArgument(format!(
                    "schedule time {t} ns outside [0, {}]",
                    self.duration_ns
                )));
            }
            if t <= prev {
                return Err(Error::InvalidArgument(
                    "schedule times must be strictly increasing".into(),
                ));
            }
            prev = t;
        }
        Ok(())
    }
}

/// One detector click.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClickEvent {
    pub time_ns: f64,
    pub detector: Detector,
    pub hypothesis: Hypothesis,
}

/// Click record for both hypotheses, ordered by time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ClickTimeline {
    pub events: Vec<ClickEvent>,
}

impl ClickTimeline {
    pub fn for_hypothesis(&self, h: Hypothesis) -> impl Iterator<Item = &ClickEvent> {
        self.events.iter().filter(move |e| e.hypothesis == h)
    }
}

/// Effective boundary state seen by a photon arriving at `t`: the latest
/// transition whose effective time (schedule time + reaction + hypothesis
/// delay) is not after `t`, plus the time that state has been in force.
fn effective_state(sc: &SwitchScenario, t: f64, extra_delay: f64) -> (bool, f64) {
    let lag = sc.pockels_reaction_ns + extra_delay;
    let mut blocked = false;
    let mut since = 0.0;
    for &(ts, b) in &sc.schedule {
        let eff = ts + lag;
        if eff <= t {
            blocked = b;
            since = eff;
        } else {
            break;
        }
    }
    (blocked, since)
}

/// Simulates the switching experiment under both response hypotheses.
///
/// Photons arrive as a Poisson process (ChaCha8 stream, fully determined by
/// the seed). Each photon shares one uniform outcome draw across the two
/// hypotheses, so the timelines differ only through the effective boundary
/// state. Blocked: `D_r` with probability `R`, otherwise `D_p`. Unblocked
/// after `k` completed trips of build-up: `D_r` with probability `R^{2k+1}`,
/// otherwise `D_t`.
pub fn run_switch_experiment(
    sc: &SwitchScenario,
    big_r: f64,
    seed: u64,
) -> Result<ClickTimeline> {
    if !(0.0..1.0).contains(&big_r) {
        return Err(Error::InvalidArgument("R must lie in [0, 1)".into()));
    }
    sc.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut events = Vec::new();
    let mut t = 0.0f64;
    loop {
        let u: f64 = rng.gen();
        t += -(1.0 - u).ln() / sc.photon_rate_per_ns;
        if t > sc.duration_ns {
            break;
        }
        let draw: f64 = rng.gen();
        for (hyp, extra) in [
            (Hypothesis::Instant, 0.0),
            (Hypothesis::Delayed, sc.info_delay_ns),
        ] {
            let (blocked, since) = effective_state(sc, t, extra);
            let detector = if blocked {
                if draw < big_r {
                    Detector::Dr
                } else {
                    Detector::Dp
                }
            } else {
                let trips = ((t - since) / sc.round_trip_time_ns).floor().max(0.0) as u32;
                let p_dr = eta_n_cw_closed(big_r, trips);
                if draw < p_dr {
                    Detector::Dr
                } else {
                    Detector::Dt
                }
            };
            events.push(ClickEvent {
                time_ns: t,
                detector,
                hypothesis: hyp,
            });
        }
    }
    Ok(ClickTimeline { events })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{eta_n, partial_amplitude};
    use crate::spectral::SourceSpec;

    #[test]
    fn blocked_state_pins_reflected_power_at_r() {
        let big_r = 0.98;
        let mut s = CavityState::<f64>::empty();
        s.blocked = true;
        for _ in 0..20 {
            s = step_cavity(&s, big_r, 0.0);
            let p = reflected_amplitude(&s, big_r).norm_sqr();
            assert!((p - big_r).abs() < 1e-15);
        }
    }

    #[test]
    fn recurrence_matches_geometric_closed_form() {
        // D_n = sqrt(R) sqrt(1-R) e^{i psi} (1 - (R e^{i psi})^n) / (1 - R e^{i psi}).
        let big_r = 0.98f64;
        for &psi in &[0.0, 0.4] {
            let mut s = CavityState::<f64>::empty();
            let e = Complex::from_polar(1.0, psi);
            for n in 1..=50u32 {
                s = step_cavity(&s, big_r, psi);
                let z = big_r * e;
                let closed = big_r.sqrt() * (1.0 - big_r).sqrt() * e
                    * (Complex::new(1.0, 0.0) - z.powu(n))
                    / (Complex::new(1.0, 0.0) - z);
                assert!((s.intracavity - closed).norm() < 1e-13, "n={n} psi={psi}");
            }
        }
    }

    #[test]
    fn reflected_port_reproduces_partial_amplitude() {
        for &big_r in &[0.9, 0.98, 0.9999] {
            for &psi in &[0.0, 0.25] {
                let mut s = CavityState::<f64>::empty();
                for n in 0..=1000u32 {
                    let out = reflected_amplitude(&s, big_r);
                    let expect = partial_amplitude(n, big_r, psi).unwrap();
                    assert!((out - expect).norm() < 1e-12, "R={big_r} psi={psi} n={n}");
                    s = step_cavity(&s, big_r, psi);
                }
            }
        }
    }

    #[test]
    fn reflected_power_matches_eta_n_cw() {
        let cw = SourceSpec::cw(1.0).unwrap();
        for &big_r in &[0.9, 0.98, 0.9999] {
            let mut s = CavityState::<f64>::empty();
            for n in 0..=1000u32 {
                let p = reflected_amplitude(&s, big_r).norm_sqr();
                let e = eta_n(big_r, n, &cw).unwrap();
                assert!((p - e).abs() < 1e-12, "R={big_r} n={n}: {p} vs {e}");
                s = step_cavity(&s, big_r, 0.0);
            }
        }
    }

    #[test]
    fn per_trip_energy_bookkeeping_is_lossless() {
        // |reflected|^2 + |transmitted|^2 + |D'|^2 = 1 + |D|^2 each trip.
        let big_r = 0.98f64;
        for &psi in &[0.0, 0.3, 1.7] {
            let mut s = CavityState::<f64>::empty();
            for _ in 0..200 {
                let refl = reflected_amplitude(&s, big_r).norm_sqr();
                let trans = transmitted_amplitude(&s, big_r).norm_sqr();
                let next = step_cavity(&s, big_r, psi);
                let lhs = refl + trans + next.intracavity.norm_sqr();
                let rhs = 1.0 + s.intracavity.norm_sqr();
                assert!((lhs - rhs).abs() < 1e-12, "psi={psi}");
                s = next;
            }
        }
    }

    #[test]
    fn rounds_to_threshold_examples() {
        // Direct-iteration oracle alongside the closed-form count.
        let check = |big_r: f64, eps: f64| {
            let n = rounds_to_threshold(big_r, eps).unwrap();
            let mut s = CavityState::<f64>::empty();
            let mut iter_n = 0u64;
            while reflected_amplitude(&s, big_r).norm_sqr() > eps {
                s = step_cavity(&s, big_r, 0.0);
                iter_n += 1;
            }
            assert_eq!(n, iter_n, "R={big_r} eps={eps}");
            n
        };
        let n9999 = check(0.9999, 0.01);
        assert!((n9999 as i64 - 23024).unsigned_abs() <= 1, "n={n9999}");
        assert_eq!(check(0.98, 0.01), 114);
        assert_eq!(rounds_to_threshold(0.98, 0.99).unwrap(), 0);
    }

    #[test]
    fn build_up_curve_matches_closed_form() {
        let curve = build_up_curve(0.98_f64, 300).unwrap();
        for (&n, &eta) in curve.n_values.iter().zip(&curve.eta_values) {
            assert!((eta - eta_n_cw_closed(0.98, n)).abs() < 1e-12);
        }
        assert!((build_up_curve(0.998_f64, 0).unwrap().eta_values[0] - 0.998).abs() < 1e-15);
    }

    #[test]
    fn build_up_curves_ordered_in_r() {
        let rs = [0.98, 0.99, 0.995, 0.997, 0.998];
        let curves: Vec<_> = rs.iter().map(|&r| build_up_curve(r, 200).unwrap()).collect();
        for pair in curves.windows(2) {
            for k in 0..pair[0].eta_values.len() {
                assert!(pair[0].eta_values[k] < pair[1].eta_values[k]);
            }
        }
    }

    fn scenario(schedule: Vec<(f64, bool)>, duration: f64) -> SwitchScenario {
        SwitchScenario {
            schedule,
            round_trip_time_ns: 0.01,
            photon_rate_per_ns: 10.0,
            pockels_reaction_ns: 0.1,
            info_delay_ns: 4.0,
            duration_ns: duration,
        }
    }

    #[test]
    fn switch_experiment_deterministic() {
        let sc = scenario(vec![(0.0, true), (20.0, false)], 40.0);
        let a = run_switch_experiment(&sc, 0.9999, 7).unwrap();
        let b = run_switch_experiment(&sc, 0.9999, 7).unwrap();
        assert_eq!(a, b);
        let c = run_switch_experiment(&sc, 0.9999, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn schedule_outside_duration_rejected() {
        let sc = scenario(vec![(50.0, true)], 40.0);
        assert!(matches!(
            run_switch_experiment(&sc, 0.9999, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn always_blocked_gives_binomial_dr_fraction() {
        let big_r = 0.98;
        let sc = SwitchScenario {
            schedule: vec![(0.0, true)],
            pockels_reaction_ns: 0.0,
            ..scenario(vec![], 2000.0)
        };
        let tl = run_switch_experiment(&sc, big_r, 42).unwrap();
        let events: Vec<_> = tl.for_hypothesis(Hypothesis::Instant).collect();
        let n = events.len() as f64;
        let dr = events.iter().filter(|e| e.detector == Detector::Dr).count() as f64;
        let dt = events.iter().filter(|e| e.detector == Detector::Dt).count();
        let sigma = (big_r * (1.0 - big_r) / n).sqrt();
        assert!((dr / n - big_r).abs() < 4.0 * sigma, "frac={}", dr / n);
        assert_eq!(dt, 0);
    }

    #[test]
    fn long_established_resonance_suppresses_dr() {
        let big_r = 0.9999;
        let sc = SwitchScenario {
            schedule: vec![],
            round_trip_time_ns: 0.004,
            photon_rate_per_ns: 1.0,
            pockels_reaction_ns: 0.0,
            info_delay_ns: 0.0,
            duration_ns: 10_000.0,
        };
        // Only look at photons after the build-up threshold.
        let t_thresh =
            rounds_to_threshold(big_r, 0.01).unwrap() as f64 * sc.round_trip_time_ns;
        let tl = run_switch_experiment(&sc, big_r, 11).unwrap();
        let late: Vec<_> = tl
            .for_hypothesis(Hypothesis::Instant)
            .filter(|e| e.time_ns > t_thresh)
            .collect();
        assert!(late.len() > 1000);
        let dr = late.iter().filter(|e| e.detector == Detector::Dr).count() as f64;
        assert!(dr / (late.len() as f64) < 0.01);
    }

    /// Two-sample Kolmogorov-Smirnov statistic.
    fn ks_statistic(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let (na, nb) = (a.len() as f64, b.len() as f64);
        let (mut i, mut j) = (0usize, 0usize);
        let mut d: f64 = 0.0;
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 / na - j as f64 / nb).abs());
        }
        d
    }

    #[test]
    fn info_delay_hypotheses_distinguishable_by_first_click() {
        // Resonance is established by ~92 ns (23025 trips at T = 4 ps);
        // switch on at t=100 ns. Under the delayed hypothesis D_r starts
        // firing 4 ns later, so first-D_r-click times over repeated runs
        // must separate by a KS test.
        let big_r = 0.9999;
        let runs = 400;
        let mut instant = Vec::new();
        let mut delayed = Vec::new();
        for seed in 0..runs {
            let sc = SwitchScenario {
                schedule: vec![(100.0, true)],
                round_trip_time_ns: 0.004,
                photon_rate_per_ns: 10.0,
                pockels_reaction_ns: 0.1,
                info_delay_ns: 4.0,
                duration_ns: 120.0,
            };
            let tl = run_switch_experiment(&sc, big_r, seed).unwrap();
            for (hyp, out) in [
                (Hypothesis::Instant, &mut instant),
                (Hypothesis::Delayed, &mut delayed),
            ] {
                if let Some(e) = tl
                    .for_hypothesis(hyp)
                    .find(|e| e.detector == Detector::Dr && e.time_ns > 100.0)
                {
                    out.push(e.time_ns);
                }
            }
        }
        assert!(instant.len() > 300 && delayed.len() > 300);
        let n = instant.len().min(delayed.len()) as f64;
        let critical = 1.63 * (2.0 / n).sqrt(); // alpha = 0.01
        let d = ks_statistic(instant, delayed);
        assert!(d > critical, "KS d={d} critical={critical}");
    }
}
