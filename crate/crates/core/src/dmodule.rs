//! Polynomial differential operators in `q_j` and `theta_j = hbar q_j d/dq_j`.
//!
//! Operators are stored normal ordered, every `q` to the left of every
//! `theta`: `D = sum_e q^e P_e(theta, hbar)`. On the series
//! `exp(t.omega/hbar) sum_d q^d R_d` the generator `theta_j` acts on
//! `q^d R_d` as multiplication by `omega_j + d_j hbar`, so
//! `(D F)_d = sum_e P_e(omega + (d - e) hbar, hbar) R_{d-e}`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::cohomology::{format_terms, CohomClass, CohomRing, Poly};
use crate::error::{Error, Result};
use crate::givental_series::{GiventalSeries, LaurentH};
use crate::linalg;
use crate::rational::{format_rational, rat, Rational};
use crate::toric_geometry::{ChargeMatrix, CurveClass};

/// `theta^theta * hbar^hbar`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThetaMonomial {
    pub theta: Vec<u32>,
    pub hbar: u32,
}

impl ThetaMonomial {
    pub fn order(&self) -> u32 {
        self.theta.iter().sum()
    }
}

/// Polynomial in `theta_1..theta_l` and `hbar`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ThetaPoly {
    terms: BTreeMap<ThetaMonomial, Rational>,
}

impl ThetaPoly {
    pub fn constant(l: usize, c: Rational) -> Self {
        let mut p = ThetaPoly::default();
        p.add_term(ThetaMonomial { theta: vec![0; l], hbar: 0 }, c);
        p
    }

    pub fn terms(&self) -> &BTreeMap<ThetaMonomial, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: ThetaMonomial, c: Rational) {
        let slot = self.terms.entry(m.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &ThetaPoly) -> ThetaPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> ThetaPoly {
        let mut out = ThetaPoly::default();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &ThetaPoly) -> ThetaPoly {
        let mut out = ThetaPoly::default();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let theta = a.theta.iter().zip(&b.theta).map(|(i, j)| i + j).collect();
                out.add_term(ThetaMonomial { theta, hbar: a.hbar + b.hbar }, x * y);
            }
        }
        out
    }

    /// `P(theta + shift * hbar, hbar)`.
    pub fn shifted(&self, shift: &[i64]) -> ThetaPoly {
        if shift.iter().all(|&s| s == 0) {
            return self.clone();
        }
        let l = shift.len();
        let linear: Vec<ThetaPoly> = (0..l)
            .map(|j| {
                let mut p = ThetaPoly::default();
                let mut theta = vec![0; l];
                theta[j] = 1;
                p.add_term(ThetaMonomial { theta, hbar: 0 }, Rational::one());
                p.add_term(ThetaMonomial { theta: vec![0; l], hbar: 1 }, rat(shift[j]));
                p
            })
            .collect();
        let mut out = ThetaPoly::default();
        for (m, c) in &self.terms {
            let mut term = ThetaPoly::constant(l, c.clone());
            term = term.mul(&ThetaPoly {
                terms: BTreeMap::from([(ThetaMonomial { theta: vec![0; l], hbar: m.hbar }, Rational::one())]),
            });
            for (j, &e) in m.theta.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&linear[j]);
                }
            }
            out = out.add(&term);
        }
        out
    }
}

/// Normal-ordered operator `sum_e q^e P_e(theta, hbar)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOp {
    l: usize,
    terms: BTreeMap<Vec<u32>, ThetaPoly>,
}

impl DiffOp {
    pub fn zero(l: usize) -> Self {
        DiffOp { l, terms: BTreeMap::new() }
    }

    pub fn constant(l: usize, c: Rational) -> Self {
        Self::from_term(l, vec![0; l], ThetaPoly::constant(l, c))
    }

    pub fn one(l: usize) -> Self {
        Self::constant(l, Rational::one())
    }

    /// `c * q^q * theta^theta * hbar^hbar`.
    pub fn monomial(q: Vec<u32>, theta: Vec<u32>, hbar: u32, c: Rational) -> Self {
        let l = q.len();
        assert_eq!(theta.len(), l, "q and theta exponents disagree in length");
        let mut p = ThetaPoly::default();
        p.add_term(ThetaMonomial { theta, hbar }, c);
        Self::from_term(l, q, p)
    }

    fn from_term(l: usize, q: Vec<u32>, p: ThetaPoly) -> Self {
        let mut out = DiffOp::zero(l);
        if !p.is_zero() {
            out.terms.insert(q, p);
        }
        out
    }

    pub fn theta(l: usize, j: usize) -> Self {
        let mut theta = vec![0; l];
        theta[j] = 1;
        Self::monomial(vec![0; l], theta, 0, Rational::one())
    }

    pub fn q(l: usize, j: usize) -> Self {
        let mut q = vec![0; l];
        q[j] = 1;
        Self::q_power(q)
    }

    pub fn q_power(e: Vec<u32>) -> Self {
        let l = e.len();
        Self::monomial(e, vec![0; l], 0, Rational::one())
    }

    pub fn hbar(l: usize) -> Self {
        Self::monomial(vec![0; l], vec![0; l], 1, Rational::one())
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, ThetaPoly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest total `theta` degree.
    pub fn theta_order(&self) -> u32 {
        self.flat().map(|(_, m, _)| m.order()).max().unwrap_or(0)
    }

    /// `(q exponent, theta monomial, coefficient)` triples.
    pub fn flat(&self) -> impl Iterator<Item = (&Vec<u32>, &ThetaMonomial, &Rational)> {
        self.terms.iter().flat_map(|(e, p)| p.terms.iter().map(move |(m, c)| (e, m, c)))
    }

    fn insert_poly(&mut self, e: Vec<u32>, p: ThetaPoly) {
        let sum = match self.terms.remove(&e) {
            Some(old) => old.add(&p),
            None => p,
        };
        if !sum.is_zero() {
            self.terms.insert(e, sum);
        }
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (e, p) in &other.terms {
            out.insert_poly(e.clone(), p.clone());
        }
        out
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        self.add(&other.scale(&rat(-1)))
    }

    pub fn scale(&self, s: &Rational) -> DiffOp {
        let mut out = DiffOp::zero(self.l);
        for (e, p) in &self.terms {
            out.insert_poly(e.clone(), p.scale(s));
        }
        out
    }

    /// `self o other`, re-normalized with
    /// `P(theta) q^b = q^b P(theta + b hbar)`.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        let mut out = DiffOp::zero(self.l);
        for (a, p) in &self.terms {
            for (b, r) in &other.terms {
                let shift: Vec<i64> = b.iter().map(|&x| x as i64).collect();
                let e = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.insert_poly(e, p.shifted(&shift).mul(r));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> DiffOp {
        (0..k).fold(DiffOp::one(self.l), |acc, _| acc.compose(self))
    }

    /// Largest and smallest `int_e c_1` over the q-support.
    fn c1_range(&self, m: &ChargeMatrix) -> Option<(i64, i64)> {
        let c1s: Vec<i64> = self.terms.keys().map(|e| m.c1(&to_curve(e))).collect();
        Some((*c1s.iter().max()?, *c1s.iter().min()?))
    }

    pub fn to_json(&self) -> Vec<OperatorTermJson> {
        self.terms
            .iter()
            .map(|(e, p)| OperatorTermJson {
                q: e.clone(),
                terms: p
                    .terms
                    .iter()
                    .map(|(m, c)| ThetaTermJson {
                        theta: m.theta.clone(),
                        hbar: m.hbar,
                        coeff: format_rational(c),
                    })
                    .collect(),
            })
            .collect()
    }
}

fn to_curve(e: &[u32]) -> CurveClass {
    CurveClass(e.iter().map(|&x| x as i64).collect())
}

fn power_name(var: &str, exps: &[u32]) -> Vec<String> {
    exps.iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(j, &e)| if e == 1 { format!("{var}{}", j + 1) } else { format!("{var}{}^{e}", j + 1) })
        .collect()
}

fn joined_or_one(parts: Vec<String>) -> String {
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for DiffOp {
    /// Highest theta order first, e.g. `theta1^3 - q1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut flat: Vec<_> = self.flat().collect();
        flat.sort_by_key(|(e, m, _)| {
            Reverse((m.order(), m.theta.clone(), m.hbar, e.iter().sum::<u32>(), (*e).clone()))
        });
        let terms: Vec<(String, Rational)> = flat
            .into_iter()
            .map(|(e, m, c)| {
                let mut parts = power_name("q", e);
                if m.hbar == 1 {
                    parts.push("hbar".into());
                } else if m.hbar > 1 {
                    parts.push(format!("hbar^{}", m.hbar));
                }
                parts.extend(power_name("theta", &m.theta));
                (joined_or_one(parts), c.clone())
            })
            .collect();
        write!(f, "{}", format_terms(&terms))
    }
}

#[derive(Serialize)]
pub struct ThetaTermJson {
    pub theta: Vec<u32>,
    pub hbar: u32,
    pub coeff: String,
}

#[derive(Serialize)]
pub struct OperatorTermJson {
    pub q: Vec<u32>,
    pub terms: Vec<ThetaTermJson>,
}

/// A series `exp(t.omega/hbar) sum_d q^d S_d`, exact for `int_d c_1 <= window`.
/// Degrees beyond the window are kept separately as partial sums.
#[derive(Clone, Debug)]
pub struct QSeries {
    charge: ChargeMatrix,
    window: i64,
    valid: BTreeMap<CurveClass, LaurentH>,
    truncated: BTreeMap<CurveClass, LaurentH>,
}

impl QSeries {
    pub fn from_series(f: &GiventalSeries) -> Self {
        QSeries {
            charge: f.charge().clone(),
            window: f.bound() as i64,
            valid: f.terms().clone(),
            truncated: BTreeMap::new(),
        }
    }

    /// Largest `int_d c_1` at which coefficients are exact.
    pub fn window(&self) -> i64 {
        self.window
    }

    pub fn valid_terms(&self) -> &BTreeMap<CurveClass, LaurentH> {
        &self.valid
    }

    /// Degrees whose coefficient misses contributions from beyond the truncation.
    pub fn truncated_terms(&self) -> &BTreeMap<CurveClass, LaurentH> {
        &self.truncated
    }

    pub fn is_valid(&self, d: &CurveClass) -> bool {
        self.valid.contains_key(d)
    }

    /// Exact coefficient at `d`, or `None` outside the window.
    pub fn coefficient(&self, d: &CurveClass) -> Option<&LaurentH> {
        self.valid.get(d)
    }

    /// Every coefficient inside the window vanishes.
    pub fn vanishes(&self) -> bool {
        self.valid.values().all(LaurentH::is_zero)
    }
}

/// Per-shift cache of `theta^alpha` evaluated at `omega + s hbar`.
struct Evaluator<'a> {
    ring: &'a CohomRing,
    powers: HashMap<(usize, i64, u32), LaurentH>,
}

impl<'a> Evaluator<'a> {
    fn new(ring: &'a CohomRing) -> Self {
        Evaluator { ring, powers: HashMap::new() }
    }

    fn linear_power(&mut self, j: usize, s: i64, e: u32) -> LaurentH {
        if let Some(p) = self.powers.get(&(j, s, e)) {
            return p.clone();
        }
        let p = if e == 0 {
            LaurentH::one(self.ring)
        } else {
            let prev = self.linear_power(j, s, e - 1);
            prev.mul(&LaurentH::linear_factor(self.ring, &self.ring.omega(j), s), self.ring)
        };
        self.powers.insert((j, s, e), p.clone());
        p
    }

    fn monomial(&mut self, m: &ThetaMonomial, shift: &[i64]) -> LaurentH {
        let mut out = LaurentH::one(self.ring).shift(m.hbar as i64);
        for (j, &e) in m.theta.iter().enumerate() {
            if e > 0 {
                let p = self.linear_power(j, shift[j], e);
                out = out.mul(&p, self.ring);
            }
        }
        out
    }

    fn poly(&mut self, p: &ThetaPoly, shift: &[i64]) -> LaurentH {
        let mut out = LaurentH::zero(self.ring.size());
        for (m, c) in &p.terms {
            out = out.add(&self.monomial(m, shift).scale(c));
        }
        out
    }
}

/// Validity window of `D F` given the window of `F`.
fn shrink_window(op: &DiffOp, m: &ChargeMatrix, window: i64) -> Result<i64> {
    let new = match op.c1_range(m) {
        Some((max, min)) => (window - max).min(window + min),
        None => window,
    };
    if new < 0 {
        return Err(Error::EmptyWindow);
    }
    Ok(new)
}

fn componentwise_le(e: &[u32], d: &CurveClass) -> bool {
    e.iter().zip(&d.0).all(|(&a, &b)| a as i64 <= b)
}

/// `D F` on a freshly built series.
pub fn apply(ring: &CohomRing, op: &DiffOp, f: &GiventalSeries) -> Result<QSeries> {
    apply_to(ring, op, &QSeries::from_series(f))
}

/// `D S` for an already-transformed series; nesting composes the windows.
pub fn apply_to(ring: &CohomRing, op: &DiffOp, s: &QSeries) -> Result<QSeries> {
    if op.l() != s.charge.l() {
        return Err(Error::Dimension(format!(
            "operator has {} variables, series has {}",
            op.l(),
            s.charge.l()
        )));
    }
    let window = shrink_window(op, &s.charge, s.window)?;
    let mut eval = Evaluator::new(ring);
    let mut valid = BTreeMap::new();
    for d in s.valid.keys().filter(|d| s.charge.c1(d) <= window) {
        let mut acc = LaurentH::zero(ring.size());
        for (e, p) in op.terms.iter().filter(|(e, _)| componentwise_le(e, d)) {
            let src = d.sub(&to_curve(e));
            if let Some(r) = s.valid.get(&src) {
                acc = acc.add(&eval.poly(p, &src.0).mul(r, ring));
            }
        }
        valid.insert(d.clone(), acc);
    }
    let mut truncated: BTreeMap<CurveClass, LaurentH> = BTreeMap::new();
    for (src, r) in &s.valid {
        for (e, p) in &op.terms {
            let d = src.add(&to_curve(e));
            if valid.contains_key(&d) {
                continue;
            }
            let term = eval.poly(p, &src.0).mul(r, ring);
            let slot = truncated.entry(d).or_insert_with(|| LaurentH::zero(ring.size()));
            *slot = slot.add(&term);
        }
    }
    Ok(QSeries { charge: s.charge.clone(), window, valid, truncated })
}

/// `prod_{k: a_k > 0} prod_{nu=0}^{a_k - 1} (D_k - nu hbar)
///  - q^d prod_{k: a_k < 0} prod_{nu=0}^{-a_k - 1} (D_k - nu hbar)`
/// with `D_k = sum_j m[j][k] theta_j` and `a = pairing(d)`.
///
/// If `d` has negative coordinates both sides are multiplied on the left by
/// `q^{d-}` so that only nonnegative powers of `q` appear.
pub fn gkz_operator(m: &ChargeMatrix, d: &CurveClass) -> DiffOp {
    let l = m.l();
    let divisor = |k: usize| {
        (0..l).fold(DiffOp::zero(l), |acc, j| acc.add(&DiffOp::theta(l, j).scale(&rat(m.entry(j, k)))))
    };
    let falling = |k: usize, count: i64| {
        let dk = divisor(k);
        (0..count).fold(DiffOp::one(l), |acc, nu| {
            acc.compose(&dk.sub(&DiffOp::hbar(l).scale(&rat(nu))))
        })
    };
    let mut plus = DiffOp::one(l);
    let mut minus = DiffOp::one(l);
    for (k, &a) in m.pairing_vector(d).iter().enumerate() {
        if a > 0 {
            plus = plus.compose(&falling(k, a));
        } else if a < 0 {
            minus = minus.compose(&falling(k, -a));
        }
    }
    let pos: Vec<u32> = d.0.iter().map(|&x| x.max(0) as u32).collect();
    let neg: Vec<u32> = d.0.iter().map(|&x| (-x).max(0) as u32).collect();
    DiffOp::q_power(neg).compose(&plus).sub(&DiffOp::q_power(pos).compose(&minus))
}

/// Bounds of the operator ansatz.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnsatzBounds {
    pub theta_order: u32,
    pub q_degree: u32,
    pub hbar_degree: u32,
}

fn exponent_vectors(l: usize, max_total: u32) -> Vec<Vec<u32>> {
    (0..=max_total as usize).flat_map(|t| crate::cohomology::monomials(l, t)).collect()
}

/// Ansatz monomials `(q^e, theta^alpha hbar^h)` in canonical order:
/// descending in `(|e|, e, |alpha|, alpha)`, then ascending in `h`.
pub fn ansatz_columns(l: usize, bounds: AnsatzBounds) -> Vec<(Vec<u32>, ThetaMonomial)> {
    let mut cols = Vec::new();
    for e in exponent_vectors(l, bounds.q_degree) {
        for theta in exponent_vectors(l, bounds.theta_order) {
            for hbar in 0..=bounds.hbar_degree {
                cols.push((e.clone(), ThetaMonomial { theta: theta.clone(), hbar }));
            }
        }
    }
    cols.sort_by_key(|(e, m)| {
        (Reverse((e.iter().sum::<u32>(), e.clone(), m.order(), m.theta.clone())), m.hbar)
    });
    cols
}

/// Basis of all operators inside the ansatz that annihilate `F` throughout
/// the validity window, as the rows of a pivot-normalized reduced echelon form.
pub fn find_annihilators(ring: &CohomRing, f: &GiventalSeries, bounds: AnsatzBounds) -> Result<Vec<DiffOp>> {
    let l = ring.rank();
    let cols = ansatz_columns(l, bounds);
    let m = f.charge();
    let support = exponent_vectors(l, bounds.q_degree);
    let probe = support.iter().fold(DiffOp::zero(l), |acc, e| acc.add(&DiffOp::q_power(e.clone())));
    let window = shrink_window(&probe, m, f.bound() as i64)?;

    // Coordinates of D F are indexed by (degree, hbar exponent, basis index).
    let mut eval = Evaluator::new(ring);
    let mut images: Vec<BTreeMap<(CurveClass, i64, usize), Rational>> = Vec::with_capacity(cols.len());
    for (e, mono) in &cols {
        let mut image = BTreeMap::new();
        for d in f.terms().keys().filter(|d| m.c1(d) <= window && componentwise_le(e, d)) {
            let src = d.sub(&to_curve(e));
            let Some(r) = f.terms().get(&src) else { continue };
            let v = eval.monomial(mono, &src.0).mul(r, ring);
            for (&h, class) in v.terms() {
                for (i, c) in class.coords().iter().enumerate() {
                    if !c.is_zero() {
                        image.insert((d.clone(), h, i), c.clone());
                    }
                }
            }
        }
        images.push(image);
    }
    let keys: BTreeSet<_> = images.iter().flat_map(|im| im.keys().cloned()).collect();
    let matrix: Vec<Vec<Rational>> = keys
        .iter()
        .map(|k| images.iter().map(|im| im.get(k).cloned().unwrap_or_else(Rational::zero)).collect())
        .collect();
    let mut kernel = linalg::nullspace(&matrix, cols.len());
    linalg::rref(&mut kernel);
    Ok(kernel
        .into_iter()
        .map(|row| {
            row.iter().zip(&cols).filter(|(c, _)| !c.is_zero()).fold(DiffOp::zero(l), |acc, (c, (e, mono))| {
                acc.add(&DiffOp::monomial(e.clone(), mono.theta.clone(), mono.hbar, c.clone()))
            })
        })
        .collect())
}

/// Whether `op` is a rational linear combination of `basis`.
pub fn operator_in_span(op: &DiffOp, basis: &[DiffOp]) -> bool {
    let key = |e: &Vec<u32>, m: &ThetaMonomial| (e.clone(), m.clone());
    let keys: BTreeSet<_> = basis
        .iter()
        .chain(std::iter::once(op))
        .flat_map(|d| d.flat().map(|(e, m, _)| key(e, m)).collect::<Vec<_>>())
        .collect();
    let vector = |d: &DiffOp| -> Vec<Rational> {
        let own: BTreeMap<_, _> = d.flat().map(|(e, m, c)| (key(e, m), c.clone())).collect();
        keys.iter().map(|k| own.get(k).cloned().unwrap_or_else(Rational::zero)).collect()
    };
    let base: Vec<Vec<Rational>> = basis.iter().map(vector).collect();
    let mut extended = base.clone();
    extended.push(vector(op));
    linalg::rank(&extended) == linalg::rank(&base)
}

/// Polynomial relation in `p_1..p_l` and `q_1..q_l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantumRelation {
    l: usize,
    /// `(p exponents, q exponents) -> coefficient`.
    terms: BTreeMap<(Vec<u32>, Vec<u32>), Rational>,
}

impl QuantumRelation {
    pub fn terms(&self) -> &BTreeMap<(Vec<u32>, Vec<u32>), Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The `q = 0` part as a polynomial in the `p_j`.
    pub fn at_q_zero(&self) -> Poly {
        self.terms
            .iter()
            .filter(|((_, q), _)| q.iter().all(|&x| x == 0))
            .map(|((p, _), c)| (p.clone(), c.clone()))
            .collect()
    }

    /// The `q = 0` part evaluated in the classical ring with `p_j = omega_j`.
    pub fn classical_reduction(&self, ring: &CohomRing) -> CohomClass {
        ring.from_poly(&self.at_q_zero())
    }

    /// Every monomial has `deg p + int c_1 (q-degree)` equal to one value.
    pub fn is_homogeneous(&self, m: &ChargeMatrix) -> bool {
        let degs: BTreeSet<i64> = self
            .terms
            .keys()
            .map(|(p, q)| p.iter().sum::<u32>() as i64 + m.c1(&to_curve(q)))
            .collect();
        degs.len() <= 1
    }
}

impl fmt::Display for QuantumRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items: Vec<_> = self.terms.iter().collect();
        items.sort_by_key(|((p, q), _)| {
            Reverse((p.iter().sum::<u32>(), p.clone(), q.iter().sum::<u32>(), q.clone()))
        });
        let terms: Vec<(String, Rational)> = items
            .into_iter()
            .map(|((p, q), c)| {
                let mut parts = power_name("p", p);
                parts.extend(power_name("q", q));
                (joined_or_one(parts), c.clone())
            })
            .collect();
        write!(f, "{}", format_terms(&terms))
    }
}

/// `theta_j -> p_j`, `hbar -> 0`.
pub fn semiclassical(op: &DiffOp) -> QuantumRelation {
    let mut terms = BTreeMap::new();
    for (e, m, c) in op.flat() {
        if m.hbar == 0 {
            terms.insert((m.theta.clone(), e.clone()), c.clone());
        }
    }
    QuantumRelation { l: op.l(), terms }
}
