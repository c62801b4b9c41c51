//! Single-photon outcome distributions and Monte Carlo trial simulation.
//!
//! With the object (bomb) in the round-trip path the photon fates are
//! `D_r` with probability `R`, absorption with probability `R(1-R)`, and
//! `D_t` with probability `(1-R)^2`; without it, at fully established
//! resonance, the photon always exits into `D_t`. A finite build-up variant
//! bridges to the round-trip series by setting the no-object `D_r`
//! probability to `eta_n`.
//!
//! Randomness comes from ChaCha8 keyed by the seed; trials are generated in
//! fixed-size chunks, each on its own ChaCha stream, so results are
//! identical regardless of how the chunks are scheduled across workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ring::eta_n;
use crate::spectral::SourceSpec;
use crate::{Error, Result};

/// Trials per RNG stream; chunk `i` of a run always uses stream `i`.
const TRIALS_PER_STREAM: u64 = 1 << 16;

/// Probabilities of the four single-photon fates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeDistribution {
    pub p_dr: f64,
    pub p_dt: f64,
    pub p_explode: f64,
    pub p_lost: f64,
}

impl OutcomeDistribution {
    pub fn new(p_dr: f64, p_dt: f64, p_explode: f64, p_lost: f64) -> Result<Self> {
        let d = Self {
            p_dr,
            p_dt,
            p_explode,
            p_lost,
        };
        for p in [p_dr, p_dt, p_explode, p_lost] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!(
                    "probability {p} outside [0, 1]"
                )));
            }
        }
        if (d.sum() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {}, not 1",
                d.sum()
            )));
        }
        Ok(d)
    }

    pub fn sum(&self) -> f64 {
        self.p_dr + self.p_dt + self.p_explode + self.p_lost
    }
}

/// Fate of a single trial photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Dr,
    Dt,
    Explode,
    Lost,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Dr => "DR",
            Outcome::Dt => "DT",
            Outcome::Explode => "EXPLODE",
            Outcome::Lost => "LOST",
        }
    }
}

/// One Monte Carlo trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial_id: u64,
    pub outcome: Outcome,
    /// False only for DR/DT outcomes thinned by detector inefficiency.
    pub detected: bool,
}

/// Trial records plus the empirical outcome frequencies (after efficiency
/// thinning; undetected clicks count toward `p_lost`).
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSummary {
    pub records: Vec<TrialRecord>,
    pub empirical: OutcomeDistribution,
}

/// Exact outcome distribution, assuming fully established resonance in the
/// object-absent case.
pub fn exact_distribution(big_r: f64, bomb_present: bool) -> Result<OutcomeDistribution> {
    if !(0.0..1.0).contains(&big_r) {
        return Err(Error::InvalidArgument("R must lie in [0, 1)".into()));
    }
    if bomb_present {
        let t = 1.0 - big_r;
        OutcomeDistribution::new(big_r, t * t, big_r * t, 0.0)
    } else {
        OutcomeDistribution::new(0.0, 1.0, 0.0, 0.0)
    }
}

/// Finite-build-up variant: without the object, after only `n` round trips,
/// the reflected port still fires with probability `eta_n(cw)`.
pub fn exact_distribution_after_n(
    big_r: f64,
    n: u32,
    bomb_present: bool,
) -> Result<OutcomeDistribution> {
    if bomb_present {
        return exact_distribution(big_r, true);
    }
    let cw = SourceSpec::cw(1.0)?;
    let p_dr = eta_n(big_r, n, &cw)?;
    OutcomeDistribution::new(p_dr, 1.0 - p_dr, 0.0, 0.0)
}

/// Interaction-free merit figures: the detection probability given the
/// object (`p_dr = R`) and the ratio `p_dr / (p_dr + p_explode) = 1/(2-R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Merit {
    pub p_dr: f64,
    pub dr_to_hazard_ratio: f64,
}

pub fn ifm_merit(big_r: f64) -> Result<Merit> {
    if !(0.0..1.0).contains(&big_r) {
        return Err(Error::InvalidArgument("R must lie in [0, 1)".into()));
    }
    Ok(Merit {
        p_dr: big_r,
        dr_to_hazard_ratio: 1.0 / (2.0 - big_r),
    })
}

/// Seeded Monte Carlo simulation of `trials` single-photon tests with
/// detector efficiency thinning. Identical seeds give identical records.
pub fn simulate_trials(
    big_r: f64,
    bomb_present: bool,
    trials: u64,
    efficiency: f64,
    seed: u64,
) -> Result<TrialSummary> {
    if trials < 1 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&efficiency) {
        return Err(Error::InvalidArgument(
            "efficiency must lie in [0, 1]".into(),
        ));
    }
    let exact = exact_distribution(big_r, bomb_present)?;
    let c1 = exact.p_dr;
    let c2 = c1 + exact.p_explode;
    let c3 = c2 + exact.p_dt;

    let mut records = Vec::with_capacity(trials as usize);
    let mut counts = [0u64; 4]; // detected DR, detected DT, EXPLODE, lost
    let mut trial_id = 0u64;
    let streams = trials.div_ceil(TRIALS_PER_STREAM);
    for stream in 0..streams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let in_chunk = (trials - stream * TRIALS_PER_STREAM).min(TRIALS_PER_STREAM);
        for _ in 0..in_chunk {
            let u: f64 = rng.gen();
            let outcome = if u < c1 {
                Outcome::Dr
            } else if u < c2 {
                Outcome::Explode
            } else if u < c3 {
                Outcome::Dt
            } else {
                Outcome::Lost
            };
            let detected = match outcome {
                Outcome::Dr | Outcome::Dt => rng.gen::<f64>() < efficiency,
                Outcome::Explode => true,
                Outcome::Lost => false,
            };
            match (outcome, detected) {
                (Outcome::Dr, true) => counts[0] += 1,
                (Outcome::Dt, true) => counts[1] += 1,
                (Outcome::Explode, _) => counts[2] += 1,
                _ => counts[3] += 1,
            }
            records.push(TrialRecord {
                trial_id,
                outcome,
                detected,
            });
            trial_id += 1;
        }
    }
    let n = trials as f64;
    let empirical = OutcomeDistribution {
        p_dr: counts[0] as f64 / n,
        p_dt: counts[1] as f64 / n,
        p_explode: counts[2] as f64 / n,
        p_lost: counts[3] as f64 / n,
    };
    Ok(TrialSummary { records, empirical })
}
