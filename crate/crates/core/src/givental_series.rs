//! Stable Euler-class ratios and the truncated series
//! `F = exp(sum_j t_j omega_j / hbar) * sum_d q^d R_d`.
//!
//! Coefficients `R_d` are cohomology-valued Laurent polynomials in `hbar`.
//! The exponential prefactor is never multiplied in; it is recorded as a flag
//! and only expanded when a component is extracted.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cohomology::{monomial_string, CohomClass, CohomRing};
use crate::error::{Error, Result};
use crate::rational::{format_rational, rat, Rational};
use crate::toric_geometry::{enumerate_degrees, ChargeMatrix, CurveClass};

/// Finite Laurent polynomial in `hbar` with cohomology coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentH {
    size: usize,
    terms: BTreeMap<i64, CohomClass>,
}

impl LaurentH {
    pub fn zero(size: usize) -> Self {
        LaurentH { size, terms: BTreeMap::new() }
    }

    pub fn one(ring: &CohomRing) -> Self {
        Self::monomial(ring.one(), 0)
    }

    /// `class * hbar^exp`.
    pub fn monomial(class: CohomClass, exp: i64) -> Self {
        let mut out = Self::zero(class.len());
        out.insert(exp, class);
        out
    }

    /// `alpha + nu * hbar`.
    pub fn linear_factor(ring: &CohomRing, alpha: &CohomClass, nu: i64) -> Self {
        let mut out = Self::monomial(alpha.clone(), 0);
        out.insert(1, ring.one().scale(&rat(nu)));
        out
    }

    /// `(alpha + nu * hbar)^{-1} = sum_m (-alpha)^m (nu hbar)^{-m-1}` for
    /// nilpotent `alpha` and `nu != 0`; the sum stops at the top degree.
    pub fn inverse_linear_factor(ring: &CohomRing, alpha: &CohomClass, nu: i64) -> Self {
        assert!(nu != 0, "cannot invert a factor with vanishing hbar weight");
        assert!(
            ring.homogeneous_part(alpha, 0).is_zero(),
            "inverse expansion needs a nilpotent class"
        );
        let neg = -alpha;
        let mut out = Self::zero(ring.size());
        let mut power = ring.one();
        let nu = rat(nu);
        let mut scale = nu.recip();
        for m in 0..=ring.top_degree() as i64 {
            out.insert(-m - 1, power.scale(&scale));
            power = ring.multiply(&power, &neg);
            scale /= &nu;
        }
        out
    }

    fn insert(&mut self, exp: i64, class: CohomClass) {
        if class.is_zero() {
            self.terms.remove(&exp);
        } else {
            self.terms.insert(exp, class);
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn terms(&self) -> &BTreeMap<i64, CohomClass> {
        &self.terms
    }

    pub fn coefficient(&self, exp: i64) -> CohomClass {
        self.terms.get(&exp).cloned().unwrap_or_else(|| CohomClass::zero(self.size))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &LaurentH) -> LaurentH {
        let mut out = self.clone();
        for (&e, c) in &other.terms {
            let sum = &out.coefficient(e) + c;
            out.insert(e, sum);
        }
        out
    }

    pub fn sub(&self, other: &LaurentH) -> LaurentH {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, s: &Rational) -> LaurentH {
        let mut out = Self::zero(self.size);
        for (&e, c) in &self.terms {
            out.insert(e, c.scale(s));
        }
        out
    }

    pub fn shift(&self, by: i64) -> LaurentH {
        LaurentH { size: self.size, terms: self.terms.iter().map(|(&e, c)| (e + by, c.clone())).collect() }
    }

    pub fn mul(&self, other: &LaurentH, ring: &CohomRing) -> LaurentH {
        let mut acc: BTreeMap<i64, CohomClass> = BTreeMap::new();
        for (&ea, ca) in &self.terms {
            for (&eb, cb) in &other.terms {
                let p = ring.multiply(ca, cb);
                let slot = acc.entry(ea + eb).or_insert_with(|| ring.zero());
                *slot = &*slot + &p;
            }
        }
        let mut out = Self::zero(self.size);
        for (e, c) in acc {
            out.insert(e, c);
        }
        out
    }

    pub fn pow(&self, e: u32, ring: &CohomRing) -> LaurentH {
        (0..e).fold(Self::one(ring), |acc, _| acc.mul(self, ring))
    }

    /// Applies a linear functional to every coefficient.
    pub fn map_scalar(&self, f: impl Fn(&CohomClass) -> Rational) -> BTreeMap<i64, Rational> {
        self.terms
            .iter()
            .map(|(&e, c)| (e, f(c)))
            .filter(|(_, v)| !v.is_zero())
            .collect()
    }

    pub fn display(&self, ring: &CohomRing) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(e, c)| format!("({})*h^{e}", ring.display(c)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Whether negative intersection numbers `int_d alpha_k < 0` are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SignMode {
    /// Reject classes with a negative pairing.
    #[default]
    StrictPositive,
    /// Evaluate `prod_{nu = a+1}^{0} (alpha_k + nu hbar)` for `a < 0`.
    General,
}

/// Ratio `e(N+_d) / e(N+_0)` of equivariant Euler classes:
/// `prod_k f_k` with `f_k = 1 / prod_{nu=1}^{a_k} (alpha_k + nu hbar)` for
/// `a_k = int_d alpha_k > 0`, `f_k = prod_{nu=a_k+1}^{0} (alpha_k + nu hbar)`
/// for `a_k < 0` (general-sign mode only) and `1` otherwise.
pub fn euler_ratio(ring: &CohomRing, m: &ChargeMatrix, d: &CurveClass, mode: SignMode) -> Result<LaurentH> {
    let a = m.pairing_vector(d);
    if mode == SignMode::StrictPositive {
        if let Some(k) = a.iter().position(|&x| x < 0) {
            return Err(Error::NegativePairing { degree: d.to_string(), divisor: k });
        }
    }
    let mut out = LaurentH::one(ring);
    for (k, &ak) in a.iter().enumerate() {
        let alpha = ring.alpha(k);
        if ak < 0 {
            for nu in ak + 1..=0 {
                out = out.mul(&LaurentH::linear_factor(ring, &alpha, nu), ring);
            }
        }
    }
    for (k, &ak) in a.iter().enumerate() {
        let alpha = ring.alpha(k);
        for nu in 1..=ak {
            out = out.mul(&LaurentH::inverse_linear_factor(ring, &alpha, nu), ring);
        }
    }
    Ok(out)
}

/// Checks `R_d * prod_{a_k>0} prod_{nu=1}^{a_k} (alpha_k + nu hbar)` against
/// the numerator product, by multiplication only.
pub fn check_inverse(ring: &CohomRing, m: &ChargeMatrix, d: &CurveClass, ratio: &LaurentH) -> bool {
    let a = m.pairing_vector(d);
    let mut lhs = ratio.clone();
    let mut rhs = LaurentH::one(ring);
    for (k, &ak) in a.iter().enumerate() {
        let alpha = ring.alpha(k);
        for nu in 1..=ak {
            lhs = lhs.mul(&LaurentH::linear_factor(ring, &alpha, nu), ring);
        }
        for nu in ak + 1..=0 {
            rhs = rhs.mul(&LaurentH::linear_factor(ring, &alpha, nu), ring);
        }
    }
    lhs == rhs
}

/// Number of monomials in `ratio` violating
/// `class degree + hbar exponent = -int_d c_1`.
pub fn homogeneity_violations(ring: &CohomRing, ratio: &LaurentH, c1: i64) -> usize {
    ratio
        .terms()
        .iter()
        .map(|(&e, c)| {
            c.coords()
                .iter()
                .enumerate()
                .filter(|(i, x)| !x.is_zero() && ring.basis_degree(*i) as i64 + e != -c1)
                .count()
        })
        .sum()
}

/// Truncated series: `R_d` for every Mori class with `int_d c_1 <= bound`.
#[derive(Clone, Debug)]
pub struct GiventalSeries {
    bound: u32,
    charge: ChargeMatrix,
    terms: BTreeMap<CurveClass, LaurentH>,
    prefactor: bool,
}

impl GiventalSeries {
    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn charge(&self) -> &ChargeMatrix {
        &self.charge
    }

    pub fn terms(&self) -> &BTreeMap<CurveClass, LaurentH> {
        &self.terms
    }

    pub fn coefficient(&self, d: &CurveClass) -> Option<&LaurentH> {
        self.terms.get(d)
    }

    /// The full series carries `exp(sum_j t_j omega_j / hbar)`.
    pub fn has_prefactor(&self) -> bool {
        self.prefactor
    }

    pub fn degrees(&self) -> Vec<CurveClass> {
        // ordered by c1-degree, matching enumerate_degrees
        let mut d: Vec<CurveClass> = self.terms.keys().cloned().collect();
        d.sort_by_key(|x| (self.charge.c1(x), x.clone()));
        d
    }
}

pub fn build_series(
    ring: &CohomRing,
    m: &ChargeMatrix,
    gens: &[CurveClass],
    bound: u32,
    mode: SignMode,
) -> Result<GiventalSeries> {
    let degrees = enumerate_degrees(gens, m, bound)?;
    let terms = degrees
        .into_iter()
        .map(|d| euler_ratio(ring, m, &d, mode).map(|r| (d, r)))
        .collect::<Result<_>>()?;
    Ok(GiventalSeries { bound, charge: m.clone(), terms, prefactor: true })
}

/// Key of a component coefficient: powers of `L_j = ln q_j` and of `hbar`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LogHbar {
    pub logs: Vec<u32>,
    pub hbar: i64,
}

/// `f_beta = int F * T^beta` with the prefactor expanded in `L_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentSeries {
    pub index: usize,
    pub terms: BTreeMap<CurveClass, BTreeMap<LogHbar, Rational>>,
}

impl ComponentSeries {
    pub fn coefficient(&self, d: &CurveClass) -> BTreeMap<LogHbar, Rational> {
        self.terms.get(d).cloned().unwrap_or_default()
    }
}

/// Pairs the prefactor-expanded series against the dual of basis element
/// `beta`. The prefactor is `sum_e prod_j L_j^{e_j} / e_j! * omega^e hbar^{-|e|}`,
/// truncated at `|e| <= log_order` (and in any case at the top degree).
pub fn component(
    series: &GiventalSeries,
    ring: &CohomRing,
    beta: usize,
    log_order: u32,
) -> Result<ComponentSeries> {
    if beta >= ring.size() {
        return Err(Error::IndexOutOfRange { index: beta, size: ring.size() });
    }
    let dual = ring.dual_basis()?.dual[beta].clone();
    let l = ring.rank();
    let max_order = log_order.min(ring.top_degree() as u32);
    // (log exponents, omega^e / e!)
    let mut prefactor: Vec<(Vec<u32>, Rational, CohomClass)> = Vec::new();
    for total in 0..=max_order {
        for e in crate::cohomology::monomials(l, total as usize) {
            let class = ring.reduce_monomial(&e);
            if class.is_zero() {
                continue;
            }
            let denom: BigInt = e.iter().map(|&x| crate::rational::factorial(x)).product();
            prefactor.push((e, Rational::new(BigInt::one(), denom), class));
        }
    }
    let mut terms = BTreeMap::new();
    for (d, r) in &series.terms {
        let mut coeff: BTreeMap<LogHbar, Rational> = BTreeMap::new();
        for (logs, w, class) in &prefactor {
            let shift = -(logs.iter().sum::<u32>() as i64);
            let paired = r.map_scalar(|c| {
                let prod = ring.multiply(&ring.multiply(c, class), &dual);
                ring.integrate(&prod)
            });
            for (e, v) in paired {
                let key = LogHbar { logs: logs.clone(), hbar: e + shift };
                let slot = coeff.entry(key).or_insert_with(Rational::zero);
                *slot += v * w;
            }
        }
        coeff.retain(|_, v| !v.is_zero());
        terms.insert(d.clone(), coeff);
    }
    Ok(ComponentSeries { index: beta, terms })
}

#[derive(Serialize)]
pub struct TermJson {
    pub hbar: i64,
    pub class: BTreeMap<String, String>,
}

#[derive(Serialize)]
pub struct SeriesEntryJson {
    pub degree: Vec<i64>,
    pub terms: Vec<TermJson>,
}

pub fn class_json(ring: &CohomRing, c: &CohomClass) -> BTreeMap<String, String> {
    c.coords()
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (ring.monomial_name(i), format_rational(x)))
        .collect()
}

pub fn laurent_json(ring: &CohomRing, r: &LaurentH) -> Vec<TermJson> {
    r.terms().iter().map(|(&hbar, c)| TermJson { hbar, class: class_json(ring, c) }).collect()
}

/// `[{degree, terms: [{hbar, class: {monomial: rational}}]}]`, ordered by
/// c1-degree then lexicographically.
pub fn series_json(series: &GiventalSeries, ring: &CohomRing) -> Vec<SeriesEntryJson> {
    series
        .degrees()
        .iter()
        .map(|d| SeriesEntryJson { degree: d.0.clone(), terms: laurent_json(ring, &series.terms[d]) })
        .collect()
}

#[derive(Serialize)]
pub struct ComponentTermJson {
    pub logs: BTreeMap<String, u32>,
    pub hbar: i64,
    pub coeff: String,
}

#[derive(Serialize)]
pub struct ComponentEntryJson {
    pub degree: Vec<i64>,
    pub terms: Vec<ComponentTermJson>,
}

#[derive(Serialize)]
pub struct ComponentJson {
    pub index: usize,
    pub basis: String,
    pub entries: Vec<ComponentEntryJson>,
}

pub fn component_json(comp: &ComponentSeries, ring: &CohomRing, order: &[CurveClass]) -> ComponentJson {
    let entries = order
        .iter()
        .filter_map(|d| comp.terms.get(d).map(|t| (d, t)))
        .map(|(d, t)| ComponentEntryJson {
            degree: d.0.clone(),
            terms: t
                .iter()
                .map(|(k, v)| ComponentTermJson {
                    logs: k
                        .logs
                        .iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .map(|(j, &e)| (format!("L{}", j + 1), e))
                        .collect(),
                    hbar: k.hbar,
                    coeff: format_rational(v),
                })
                .collect(),
        })
        .collect();
    ComponentJson { index: comp.index, basis: monomial_string(&ring.basis()[comp.index]), entries }
}
