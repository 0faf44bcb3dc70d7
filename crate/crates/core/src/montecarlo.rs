//! Monte Carlo sampling of the logical error rate, threshold location and
//! distance extrapolation.
//!
//! Trial `i` of a job draws from a ChaCha8 generator seeded with the master
//! seed on stream `i`, so results do not depend on how trials are spread
//! over workers. Counts are reduced as integers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoder::{run_trial, TrialNoise, Workspace};
use crate::error::{domain, Error, Result};
use crate::lattice::{build_lattice, LatticeConfig, RhgLattice};
use crate::noise::{self, Mtqc2Removal, NoiseParams, Variant};

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

/// Noise at the lattice level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoisePoint {
    pub variant: Variant,
    pub p_f: f64,
    pub p_z: f64,
    pub mtqc2: Mtqc2Removal,
}

impl NoisePoint {
    pub fn new(variant: Variant, p_f: f64, p_z: f64) -> Self {
        NoisePoint { variant, p_f, p_z, mtqc2: Mtqc2Removal::default() }
    }

    /// Lattice-level noise implied by physical parameters.
    pub fn from_params(params: &NoiseParams, mtqc2: Mtqc2Removal) -> Self {
        NoisePoint { variant: params.variant, p_f: params.p_f(), p_z: params.p_z(), mtqc2 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_f) {
            return Err(domain("p_f", format!("{} not in [0, 1]", self.p_f)));
        }
        if !(0.0..=1.0).contains(&self.p_z) {
            return Err(domain("p_Z", format!("{} not in [0, 1]", self.p_z)));
        }
        Ok(())
    }

    pub fn trial_noise(&self) -> TrialNoise {
        TrialNoise { mechanisms: noise::removal_mechanisms(self.p_f, self.variant, self.mtqc2), p_z: self.p_z }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimJob {
    pub lattice: LatticeConfig,
    pub noise: NoisePoint,
    pub trials: u64,
    pub seed: u64,
}

impl SimJob {
    pub fn validate(&self) -> Result<()> {
        self.lattice.validate()?;
        self.noise.validate()?;
        if self.trials < 1 {
            return Err(domain("trials", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub trials: u64,
    pub lost: u64,
    pub erroneous_times: u64,
    /// Trials with at least one erroneous time.
    pub failed: u64,
    /// `T` times the number of trials that were not lost.
    pub total_times: u64,
    pub p_l: f64,
    /// Half-width of the 99% Wilson interval.
    pub ci99: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub logical_loss_rate: f64,
    /// Fraction of non-lost trials with any erroneous time.
    pub p_trial: f64,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    lost: u64,
    erroneous: u64,
    failed: u64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally { lost: self.lost + o.lost, erroneous: self.erroneous + o.erroneous, failed: self.failed + o.failed }
    }
}

/// Generator for trial `index` of a job seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs a job on `workers` threads (`0` means all available).
pub fn run_job(job: &SimJob, workers: usize) -> Result<SimResult> {
    job.validate()?;
    let lattice = build_lattice(job.lattice)?;
    run_job_on(&lattice, job, workers)
}

/// Runs a job on a prebuilt lattice matching `job.lattice`.
pub fn run_job_on(lattice: &RhgLattice, job: &SimJob, workers: usize) -> Result<SimResult> {
    job.validate()?;
    if lattice.config() != job.lattice {
        return Err(Error::Config("lattice does not match job".into()));
    }
    let trial_noise = job.noise.trial_noise();
    let chunk = 64u64;
    let nchunks = job.trials.div_ceil(chunk);
    let work = || {
        (0..nchunks)
            .into_par_iter()
            .map(|c| {
                let mut ws = Workspace::new(lattice);
                let mut tally = Tally::default();
                for i in c * chunk..((c + 1) * chunk).min(job.trials) {
                    let mut rng = trial_rng(job.seed, i);
                    let out = run_trial(lattice, &trial_noise, &mut rng, &mut ws, None);
                    if out.logical_loss {
                        tally.lost += 1;
                    } else {
                        tally.erroneous += out.erroneous_times.len() as u64;
                        tally.failed += u64::from(!out.erroneous_times.is_empty());
                    }
                }
                tally
            })
            .reduce(Tally::default, Tally::merge)
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if workers > 0 {
        pool = pool.num_threads(workers);
    }
    let tally = pool.build().map_err(|e| Error::Config(e.to_string()))?.install(work);
    Ok(summarize(job.trials, tally, job.lattice.t as u64))
}

fn summarize(trials: u64, tally: Tally, t: u64) -> SimResult {
    let Tally { lost, erroneous, failed } = tally;
    let total = (trials - lost) * t;
    let (p_l, lo, hi) = if total == 0 { (0.0, 0.0, 1.0) } else { wilson(erroneous, total, Z99) };
    SimResult {
        trials,
        lost,
        erroneous_times: erroneous,
        failed,
        total_times: total,
        p_l,
        ci99: (hi - lo) / 2.0,
        ci_low: lo,
        ci_high: hi,
        logical_loss_rate: lost as f64 / trials as f64,
        p_trial: if trials == lost { 0.0 } else { failed as f64 / (trials - lost) as f64 },
    }
}

/// Point estimate and Wilson score interval for `k` successes in `n`.
pub fn wilson(k: u64, n: u64, z: f64) -> (f64, f64, f64) {
    assert!(n > 0 && k <= n);
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    (p, (centre - half).max(0.0), (centre + half).min(1.0))
}

/// One point of a threshold scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub d: u32,
    pub p_z: f64,
    pub p_l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub p_th: f64,
    pub uncertainty: f64,
    /// `(d_small, d_large, crossing)` for each adjacent pair.
    pub crossings: Vec<(u32, u32, f64)>,
}

fn crossing(a: &[(f64, f64)], b: &[(f64, f64)]) -> std::result::Result<f64, i8> {
    // common grid, log p_L difference (large d minus small d)
    let mut gaps = Vec::new();
    for &(p, la) in a {
        if let Some(&(_, lb)) = b.iter().find(|(q, _)| (q - p).abs() <= 1e-12 * p.abs().max(1.0)) {
            if la > 0.0 && lb > 0.0 {
                gaps.push((p, lb.ln() - la.ln()));
            }
        }
    }
    if gaps.is_empty() {
        return Err(0);
    }
    for w in gaps.windows(2) {
        let ((p0, g0), (p1, g1)) = (w[0], w[1]);
        if g0 == 0.0 {
            return Ok(p0);
        }
        if g0 < 0.0 && g1 >= 0.0 {
            return Ok(p0 + (p1 - p0) * (-g0) / (g1 - g0));
        }
    }
    if gaps.last().unwrap().1 == 0.0 {
        return Ok(gaps.last().unwrap().0);
    }
    let neg = gaps.iter().all(|g| g.1 < 0.0);
    Err(if neg { -1 } else { 1 })
}

/// Locates the threshold from curves at two or more distances: the
/// crossing of the two largest distances, with half the spread of all
/// adjacent-pair crossings as uncertainty.
pub fn find_threshold(points: &[CurvePoint]) -> Result<Threshold> {
    let mut ds: Vec<u32> = points.iter().map(|p| p.d).collect();
    ds.sort_unstable();
    ds.dedup();
    if ds.len() < 2 {
        return Err(Error::Config("threshold needs at least two distances".into()));
    }
    let curve = |d: u32| {
        let mut c: Vec<(f64, f64)> = points.iter().filter(|p| p.d == d).map(|p| (p.p_z, p.p_l)).collect();
        c.sort_by(|x, y| x.0.total_cmp(&y.0));
        c
    };
    let mut crossings = Vec::new();
    let mut last_sign = 0i8;
    for w in ds.windows(2) {
        match crossing(&curve(w[0]), &curve(w[1])) {
            Ok(p) => crossings.push((w[0], w[1], p)),
            Err(s) => last_sign = s,
        }
    }
    let top = ds[ds.len() - 2..].to_vec();
    let Some(&(_, _, p_th)) = crossings.iter().find(|c| c.0 == top[0] && c.1 == top[1]) else {
        return Err(Error::NoCrossing { gap_sign: last_sign });
    };
    let lo = crossings.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
    let hi = crossings.iter().map(|c| c.2).fold(f64::NEG_INFINITY, f64::max);
    Ok(Threshold { p_th, uncertainty: (hi - lo) / 2.0, crossings })
}

/// Smallest odd distance reaching `p_target`, extrapolating
/// `p_L(d) = b (a/b)^{-(d - d_b)/2}` from `a = p_L(d_b - 2)` and
/// `b = p_L(d_b)`.
pub fn extrapolate_distance(a: f64, b: f64, d_b: u32, p_target: f64) -> Result<u32> {
    if !(b > 0.0 && a < 1.0 && p_target > 0.0) {
        return Err(Error::Extrapolation(format!("need 0 < b, a < 1, p_target > 0 (a={a}, b={b})")));
    }
    if a <= b {
        return Err(Error::Extrapolation(format!("p_L does not decrease with d (a={a} <= b={b})")));
    }
    let d = d_b as f64 + 2.0 * (b / p_target).ln() / (a / b).ln();
    let mut di = (d - 1e-9).ceil().max(1.0) as u32;
    if di % 2 == 0 {
        di += 1;
    }
    Ok(di)
}

/// Loss threshold for a dephasing threshold on `m`-photon qubits, through
/// an `n_rep` repetition code when `n_rep > 1`.
pub fn threshold_to_loss(p_th: f64, m: u32, n_rep: u32) -> Result<f64> {
    if !(0.0..0.5).contains(&p_th) {
        return Err(domain("p_Z_th", format!("{p_th} not in [0, 1/2)")));
    }
    let p = if n_rep > 1 { noise::invert_encoded_dephasing(p_th, n_rep)? } else { p_th };
    noise::invert_dephasing(p, m)
}

/// Output record for one simulated point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRecord {
    pub variant: Variant,
    pub d: u32,
    #[serde(rename = "T")]
    pub t: u32,
    pub n: u32,
    pub m: u32,
    #[serde(rename = "N_rep")]
    pub n_rep: u32,
    pub eta: f64,
    pub p_f: f64,
    #[serde(rename = "p_Z")]
    pub p_z: f64,
    pub trials: u64,
    pub logical_loss_rate: f64,
    #[serde(rename = "p_L")]
    pub p_l: f64,
    pub ci99: f64,
    /// Fraction of non-lost trials with a logical error.
    pub p_trial: f64,
    pub seed: u64,
}
