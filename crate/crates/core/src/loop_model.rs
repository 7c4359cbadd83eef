//! Finite-mode model of the loop space.
//!
//! Loops `gamma(z) = (sum_{|nu| <= N} a^k_nu z^nu)_k` carry the action
//! `H_N = 1/2 sum nu |a^k_nu|^2`. Its critical manifolds `M_d` are copies of
//! the variety sitting in the modes `nu = int_d alpha_k`; the normal directions
//! are the remaining modes, with `S^1`-weight `alpha_k + nu hbar`.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde::Serialize;

use crate::cohomology::CohomRing;
use crate::error::{Error, Result};
use crate::givental_series::{euler_ratio, laurent_json, LaurentH, SignMode, TermJson};
use crate::rational::{format_rational, rat, Rational};
use crate::toric_geometry::{ChargeMatrix, CurveClass};

/// `1/2 sum_{k, nu} nu |a^k_nu|^2` with squared moduli laid out as
/// `k * (2N + 1) + (nu + N)`.
pub fn action_value(n: usize, modes: usize, squared_moduli: &[Rational]) -> Result<Rational> {
    let width = 2 * modes + 1;
    if squared_moduli.len() != n * width {
        return Err(Error::LengthMismatch { expected: n * width, found: squared_moduli.len() });
    }
    let total = squared_moduli
        .iter()
        .enumerate()
        .map(|(i, a)| rat((i % width) as i64 - modes as i64) * a)
        .fold(Rational::zero(), |acc, x| acc + x);
    Ok(total / rat(2))
}

/// Signed normal weights `(k, nu)` of `M_d` in the mode-`N` model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightSystem {
    /// `int_d alpha_k < nu <= N`.
    pub positive: Vec<(usize, i64)>,
    /// `-N <= nu < int_d alpha_k`.
    pub negative: Vec<(usize, i64)>,
}

impl WeightSystem {
    pub fn new(pairings: &[i64], modes: usize) -> Self {
        let n = modes as i64;
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for (k, &a) in pairings.iter().enumerate() {
            positive.extend((a + 1..=n).map(|nu| (k, nu)));
            negative.extend((-n..a).map(|nu| (k, nu)));
        }
        WeightSystem { positive, negative }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriticalData {
    pub degree: CurveClass,
    pub modes: usize,
    /// `sum_j d_j lambda_j`.
    pub action_value: Rational,
    pub weights: WeightSystem,
}

/// Smallest `N` at which `M_d` exists: `max(0, max_k |int_d alpha_k|)`.
pub fn min_modes(m: &ChargeMatrix, d: &CurveClass) -> usize {
    m.pairing_vector(d).iter().map(|a| a.unsigned_abs() as usize).max().unwrap_or(0)
}

fn require_modes(m: &ChargeMatrix, d: &CurveClass, modes: usize) -> Result<()> {
    let required = min_modes(m, d);
    if modes < required {
        return Err(Error::ComponentAbsent { degree: d.to_string(), modes, required });
    }
    Ok(())
}

pub fn critical_component(
    m: &ChargeMatrix,
    lambda: &[Rational],
    d: &CurveClass,
    modes: usize,
) -> Result<CriticalData> {
    if lambda.len() != m.l() {
        return Err(Error::LengthMismatch { expected: m.l(), found: lambda.len() });
    }
    require_modes(m, d, modes)?;
    let action_value = d.0.iter().zip(lambda).fold(Rational::zero(), |acc, (&dj, lj)| acc + rat(dj) * lj);
    Ok(CriticalData {
        degree: d.clone(),
        modes,
        action_value,
        weights: WeightSystem::new(&m.pairing_vector(d), modes),
    })
}

/// `e(N+_{d,N}) / e(N+_{0,N})`: factors shared by both weight systems
/// cancel first, the leftover denominator is inverted.
pub fn euler_ratio_n(ring: &CohomRing, m: &ChargeMatrix, d: &CurveClass, modes: usize) -> Result<LaurentH> {
    require_modes(m, d, modes)?;
    let top: BTreeSet<(usize, i64)> = WeightSystem::new(&m.pairing_vector(d), modes).positive.into_iter().collect();
    let bottom: BTreeSet<(usize, i64)> =
        WeightSystem::new(&vec![0; m.n()], modes).positive.into_iter().collect();
    let mut out = LaurentH::one(ring);
    for &(k, nu) in top.difference(&bottom) {
        out = out.mul(&LaurentH::linear_factor(ring, &ring.alpha(k), nu), ring);
    }
    for &(k, nu) in bottom.difference(&top) {
        out = out.mul(&LaurentH::inverse_linear_factor(ring, &ring.alpha(k), nu), ring);
    }
    Ok(out)
}

/// Outcome of comparing `euler_ratio_n` across mode bounds.
#[derive(Clone, Debug)]
pub struct StabilizationReport {
    pub degree: CurveClass,
    pub modes: Vec<usize>,
    /// All present mode bounds agree with each other and with the stable ratio.
    pub stable: bool,
    pub ratio: LaurentH,
    pub critical: Option<CriticalData>,
    /// Requested mode bounds below `N(d)`.
    pub absent: Vec<usize>,
}

pub fn check_stabilization(
    ring: &CohomRing,
    m: &ChargeMatrix,
    d: &CurveClass,
    modes: &[usize],
    lambda: &[Rational],
) -> Result<StabilizationReport> {
    let stable_ratio = euler_ratio(ring, m, d, SignMode::General)?;
    let mut absent = Vec::new();
    let mut stable = true;
    let mut critical = None;
    let mut present = 0;
    for &n in modes {
        match euler_ratio_n(ring, m, d, n) {
            Ok(r) => {
                present += 1;
                stable &= r == stable_ratio;
                if critical.is_none() {
                    critical = Some(critical_component(m, lambda, d, n)?);
                }
            }
            Err(Error::ComponentAbsent { .. }) => absent.push(n),
            Err(e) => return Err(e),
        }
    }
    Ok(StabilizationReport {
        degree: d.clone(),
        modes: modes.to_vec(),
        stable: stable && present > 0,
        ratio: stable_ratio,
        critical,
        absent,
    })
}

#[derive(Serialize)]
pub struct WeightsJson {
    pub positive: Vec<(usize, i64)>,
    pub negative: Vec<(usize, i64)>,
}

#[derive(Serialize)]
pub struct ReportJson {
    pub degree: Vec<i64>,
    #[serde(rename = "N_list")]
    pub n_list: Vec<usize>,
    pub stable: bool,
    pub ratio: Vec<TermJson>,
    pub critical_value: Option<String>,
    pub weights: Option<WeightsJson>,
    pub absent: Vec<usize>,
}

impl StabilizationReport {
    /// Weights are those of the smallest present mode bound.
    pub fn to_json(&self, ring: &CohomRing) -> ReportJson {
        ReportJson {
            degree: self.degree.0.clone(),
            n_list: self.modes.clone(),
            stable: self.stable,
            ratio: laurent_json(ring, &self.ratio),
            critical_value: self.critical.as_ref().map(|c| format_rational(&c.action_value)),
            weights: self.critical.as_ref().map(|c| WeightsJson {
                positive: c.weights.positive.clone(),
                negative: c.weights.negative.clone(),
            }),
            absent: self.absent.clone(),
        }
    }
}
