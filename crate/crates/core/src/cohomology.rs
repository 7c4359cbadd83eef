//! Rational cohomology ring of a smooth complete toric variety.
//!
//! Substituting `x_k = alpha_k = sum_j m[j][k] omega_j` solves the linear
//! relations among toric divisors, so the ring is presented as
//! `Q[omega_1..omega_l] / SR`, where the Stanley-Reisner generators become
//! products of linear forms. Each graded piece is computed by exact row
//! reduction of the degree-`i` part of the ideal. Degrees are complex
//! degrees throughout.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{rat, Rational};
use crate::toric_geometry::{ChargeMatrix, FanData};

/// Exponent vector of a monomial in `omega_1..omega_l`.
pub type Monomial = Vec<u32>;

/// Polynomial in the nef generators.
pub type Poly = BTreeMap<Monomial, Rational>;

/// Coordinates over the graded monomial basis of a [`CohomRing`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CohomClass(Vec<Rational>);

impl CohomClass {
    pub fn zero(size: usize) -> Self {
        CohomClass(vec![Rational::zero(); size])
    }

    pub fn unit(size: usize, index: usize) -> Self {
        let mut c = Self::zero(size);
        c.0[index] = Rational::one();
        c
    }

    pub fn from_coords(coords: Vec<Rational>) -> Self {
        CohomClass(coords)
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        CohomClass(self.0.iter().map(|x| x * s).collect())
    }

    fn add_scaled(&mut self, other: &CohomClass, s: &Rational) {
        for (x, y) in self.0.iter_mut().zip(&other.0) {
            if !y.is_zero() {
                *x += y * s;
            }
        }
    }
}

impl Add for &CohomClass {
    type Output = CohomClass;
    fn add(self, rhs: &CohomClass) -> CohomClass {
        CohomClass(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &CohomClass {
    type Output = CohomClass;
    fn sub(self, rhs: &CohomClass) -> CohomClass {
        CohomClass(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &CohomClass {
    type Output = CohomClass;
    fn neg(self) -> CohomClass {
        CohomClass(self.0.iter().map(|a| -a).collect())
    }
}

/// `H*(M; Q)` with a fixed graded monomial basis.
#[derive(Clone, Debug)]
pub struct CohomRing {
    l: usize,
    top: usize,
    /// `alpha_k` as linear forms in the nef generators.
    alphas: Vec<Vec<i64>>,
    basis: Vec<Monomial>,
    basis_degree: Vec<usize>,
    /// normal forms of every monomial of degree `<= top + 1`
    normal_forms: BTreeMap<Monomial, CohomClass>,
    mult: Vec<Vec<CohomClass>>,
    /// integral of the top basis monomial
    top_integral: Rational,
    sr_generators: Vec<Vec<usize>>,
}

/// Monomials of degree `deg` in `l` variables, largest first in lex order.
pub fn monomials(l: usize, deg: usize) -> Vec<Monomial> {
    fn rec(i: usize, left: u32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
    }
    if l == 0 {
        return if deg == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    rec(0, deg as u32, &mut vec![0; l], &mut out);
    out
}

fn mono_mul(a: &[u32], b: &[u32]) -> Monomial {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let e = out.entry(mono_mul(ma, mb)).or_insert_with(Rational::zero);
            *e += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn linear_form(coeffs: &[i64]) -> Poly {
    let l = coeffs.len();
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(j, &c)| {
            let mut m = vec![0; l];
            m[j] = 1;
            (m, rat(c))
        })
        .collect()
}

/// Builds the ring from a validated fan and its charge matrix.
/// Monomials of one degree, pivot columns and reduced relation rows.
type DegreePiece = (Vec<Monomial>, Vec<usize>, Vec<Vec<Rational>>);

pub fn build_ring(fan: &FanData, m: &ChargeMatrix) -> Result<CohomRing> {
    if m.n() != fan.num_rays() || m.l() != fan.picard_rank() {
        return Err(Error::ChargeMismatch(format!(
            "{}x{} charge matrix for {} rays of dimension {}",
            m.l(),
            m.n(),
            fan.num_rays(),
            fan.dim()
        )));
    }
    let l = m.l();
    let top = fan.dim();
    let alphas: Vec<Vec<i64>> = (0..m.n()).map(|k| m.column(k)).collect();
    let sr_generators = fan.minimal_non_faces();
    let sr_polys: Vec<(usize, Poly)> = sr_generators
        .iter()
        .map(|g| {
            let p = g
                .iter()
                .fold(Poly::from([(vec![0; l], Rational::one())]), |acc, &k| {
                    poly_mul(&acc, &linear_form(&alphas[k]))
                });
            (g.len(), p)
        })
        .collect();

    let mut basis = Vec::new();
    let mut basis_degree = Vec::new();
    let mut per_degree: Vec<DegreePiece> = Vec::new();
    for deg in 0..=top + 1 {
        let monos = monomials(l, deg);
        let index: BTreeMap<&Monomial, usize> =
            monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mut rows: Vec<Vec<Rational>> = Vec::new();
        for (sdeg, poly) in &sr_polys {
            if *sdeg > deg {
                continue;
            }
            for mult in monomials(l, deg - sdeg) {
                let mut row = vec![Rational::zero(); monos.len()];
                for (mono, c) in poly {
                    row[index[&mono_mul(mono, &mult)]] += c;
                }
                rows.push(row);
            }
        }
        let pivots = if rows.is_empty() { Vec::new() } else { linalg::rref(&mut rows) };
        for (i, mono) in monos.iter().enumerate() {
            if !pivots.contains(&i) {
                basis.push(mono.clone());
                basis_degree.push(deg);
            }
        }
        per_degree.push((monos, pivots, rows));
    }

    let dims: Vec<usize> = (0..=top + 1).map(|d| basis_degree.iter().filter(|&&x| x == d).count()).collect();
    if dims[top + 1] != 0 {
        return Err(Error::Ring(format!("degree {} is nonzero", top + 1)));
    }
    if dims[0] != 1 || dims[top] != 1 {
        return Err(Error::Ring(format!("graded dimensions {:?} violate duality", &dims[..=top])));
    }
    if basis.len() != fan.max_cones().len() {
        return Err(Error::Ring(format!(
            "total dimension {} differs from the number of maximal cones {}",
            basis.len(),
            fan.max_cones().len()
        )));
    }

    let size = basis.len();
    let position: BTreeMap<&Monomial, usize> =
        basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut normal_forms = BTreeMap::new();
    for (monos, pivots, rows) in &per_degree {
        for (i, mono) in monos.iter().enumerate() {
            let nf = match pivots.iter().position(|&p| p == i) {
                None => CohomClass::unit(size, position[mono]),
                Some(r) => {
                    // mono + sum_{free s} row[s] s lies in the ideal
                    let mut c = CohomClass::zero(size);
                    for (s, coeff) in rows[r].iter().enumerate() {
                        if s != i && !coeff.is_zero() {
                            c.0[position[&monos[s]]] -= coeff;
                        }
                    }
                    c
                }
            };
            normal_forms.insert(mono.clone(), nf);
        }
    }

    let mut ring = CohomRing {
        l,
        top,
        alphas,
        basis,
        basis_degree,
        normal_forms,
        mult: Vec::new(),
        top_integral: Rational::one(),
        sr_generators,
    };
    ring.mult = (0..size)
        .map(|i| (0..size).map(|j| ring.reduce_monomial(&mono_mul(&ring.basis[i], &ring.basis[j]))).collect())
        .collect();

    // fix the point class: every maximal cone must integrate to 1
    let top_index = size - 1;
    let mut coefficient: Option<Rational> = None;
    for cone in fan.max_cones() {
        let prod = cone.iter().fold(ring.one(), |acc, &k| ring.multiply(&acc, &ring.alpha(k)));
        let c = prod.0[top_index].clone();
        match &coefficient {
            None if c.is_zero() => return Err(Error::InconsistentNormalization),
            None => coefficient = Some(c),
            Some(prev) if *prev != c => return Err(Error::InconsistentNormalization),
            Some(_) => {}
        }
    }
    ring.top_integral = coefficient.expect("fan has cones").recip();
    Ok(ring)
}

impl CohomRing {
    pub fn size(&self) -> usize {
        self.basis.len()
    }

    /// Number of nef generators.
    pub fn rank(&self) -> usize {
        self.l
    }

    pub fn top_degree(&self) -> usize {
        self.top
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn basis_degree(&self, index: usize) -> usize {
        self.basis_degree[index]
    }

    pub fn graded_dims(&self) -> Vec<usize> {
        (0..=self.top)
            .map(|d| self.basis_degree.iter().filter(|&&x| x == d).count())
            .collect()
    }

    pub fn degree_indices(&self, deg: usize) -> Vec<usize> {
        (0..self.size()).filter(|&i| self.basis_degree[i] == deg).collect()
    }

    pub fn sr_generators(&self) -> &[Vec<usize>] {
        &self.sr_generators
    }

    pub fn monomial_name(&self, index: usize) -> String {
        monomial_string(&self.basis[index])
    }

    pub fn zero(&self) -> CohomClass {
        CohomClass::zero(self.size())
    }

    pub fn one(&self) -> CohomClass {
        CohomClass::unit(self.size(), 0)
    }

    pub fn omega(&self, j: usize) -> CohomClass {
        let mut m = vec![0; self.l];
        m[j] = 1;
        self.reduce_monomial(&m)
    }

    /// Class `alpha_k` of the `k`-th toric divisor.
    pub fn alpha(&self, k: usize) -> CohomClass {
        self.from_poly(&linear_form(&self.alphas[k]))
    }

    /// Class with integral 1.
    pub fn point_class(&self) -> CohomClass {
        CohomClass::unit(self.size(), self.size() - 1).scale(&self.top_integral.recip())
    }

    pub fn reduce_monomial(&self, mono: &[u32]) -> CohomClass {
        let deg: u32 = mono.iter().sum();
        if deg as usize > self.top + 1 {
            return self.zero();
        }
        self.normal_forms[mono].clone()
    }

    pub fn from_poly(&self, poly: &Poly) -> CohomClass {
        let mut out = self.zero();
        for (mono, c) in poly {
            out.add_scaled(&self.reduce_monomial(mono), c);
        }
        out
    }

    pub fn multiply(&self, a: &CohomClass, b: &CohomClass) -> CohomClass {
        let mut out = self.zero();
        for (i, x) in a.0.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                out.add_scaled(&self.mult[i][j], &(x * y));
            }
        }
        out
    }

    pub fn power(&self, a: &CohomClass, e: u32) -> CohomClass {
        (0..e).fold(self.one(), |acc, _| self.multiply(&acc, a))
    }

    /// Coefficient of the normalized point class.
    pub fn integrate(&self, a: &CohomClass) -> Rational {
        &a.0[self.size() - 1] * &self.top_integral
    }

    /// Drops every component outside complex degree `deg`.
    pub fn homogeneous_part(&self, a: &CohomClass, deg: usize) -> CohomClass {
        CohomClass(
            a.0.iter()
                .enumerate()
                .map(|(i, x)| if self.basis_degree[i] == deg { x.clone() } else { Rational::zero() })
                .collect(),
        )
    }

    /// `int T_a T_b` over degree `deg` against degree `top - deg`.
    pub fn pairing_matrix(&self, deg: usize) -> Vec<Vec<Rational>> {
        let lo = self.degree_indices(deg);
        let hi = self.degree_indices(self.top - deg);
        lo.iter()
            .map(|&a| hi.iter().map(|&b| self.integrate(&self.mult[a][b])).collect())
            .collect()
    }

    /// The monomial basis `T_i` and its Poincare dual `T^i`,
    /// `int T_i T^j = delta_ij`.
    pub fn dual_basis(&self) -> Result<DualBasis> {
        let n = self.size();
        let gram: Vec<Vec<Rational>> = (0..n)
            .map(|a| (0..n).map(|b| self.integrate(&self.mult[a][b])).collect())
            .collect();
        let inv = linalg::inverse(&gram).ok_or(Error::SingularPairing)?;
        let primal = (0..n).map(|i| CohomClass::unit(n, i)).collect();
        let dual = (0..n)
            .map(|j| CohomClass((0..n).map(|b| inv[b][j].clone()).collect()))
            .collect();
        Ok(DualBasis { primal, dual })
    }

    /// `sum_k <e_nu^*, v_k> alpha_k` for each coordinate `nu`; all must vanish.
    pub fn linear_relations(&self, fan: &FanData) -> Vec<CohomClass> {
        (0..fan.dim())
            .map(|nu| {
                fan.rays().iter().enumerate().fold(self.zero(), |acc, (k, v)| {
                    let mut acc = acc;
                    acc.add_scaled(&self.alpha(k), &rat(v[nu]));
                    acc
                })
            })
            .collect()
    }

    /// `sum_k alpha_k`.
    pub fn first_chern_class(&self) -> CohomClass {
        (0..self.alphas.len()).fold(self.zero(), |acc, k| &acc + &self.alpha(k))
    }

    /// Text form over the basis, e.g. `2*w1 - 1/3*w1*w2`.
    pub fn display(&self, a: &CohomClass) -> String {
        let terms: Vec<(String, Rational)> = a
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.monomial_name(i), c.clone()))
            .collect();
        format_terms(&terms)
    }
}

pub fn monomial_string(mono: &[u32]) -> String {
    let parts: Vec<String> = mono
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(j, &e)| if e == 1 { format!("w{}", j + 1) } else { format!("w{}^{}", j + 1, e) })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

/// Joins `coefficient * name` terms into a signed sum.
pub fn format_terms(terms: &[(String, Rational)]) -> String {
    if terms.is_empty() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (name, c)) in terms.iter().enumerate() {
        let neg = c < &Rational::zero();
        let abs = if neg { -c.clone() } else { c.clone() };
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let coeff = crate::rational::format_rational(&abs);
        if name == "1" {
            out.push_str(&coeff);
        } else if abs.is_one() {
            out.push_str(name);
        } else {
            out.push_str(&format!("{coeff}*{name}"));
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct DualBasis {
    pub primal: Vec<CohomClass>,
    pub dual: Vec<CohomClass>,
}

impl fmt::Display for CohomClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(crate::rational::format_rational).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::toric_geometry::{charge_matrix, parse_fan};

    fn ring(text: &str) -> (FanData, CohomRing) {
        let fan = parse_fan(text).unwrap();
        let m = charge_matrix(&fan).unwrap();
        let r = build_ring(&fan, &m).unwrap();
        (fan, r)
    }

    const P1: &str = r#"{"rays": [[1],[-1]], "max_cones": [[0],[1]]}"#;
    const P2: &str = r#"{"rays": [[1,0],[0,1],[-1,-1]], "max_cones": [[0,1],[1,2],[0,2]]}"#;
    const P1XP1: &str =
        r#"{"rays": [[1,0],[-1,0],[0,1],[0,-1]], "max_cones": [[0,2],[0,3],[1,2],[1,3]]}"#;
    const F1: &str =
        r#"{"rays": [[1,0],[0,1],[-1,1],[0,-1]], "max_cones": [[0,1],[1,2],[2,3],[0,3]]}"#;

    #[test]
    fn graded_dimensions() {
        assert_eq!(ring(P1).1.graded_dims(), vec![1, 1]);
        assert_eq!(ring(P2).1.graded_dims(), vec![1, 1, 1]);
        assert_eq!(ring(P1XP1).1.graded_dims(), vec![1, 2, 1]);
        assert_eq!(ring(F1).1.graded_dims(), vec![1, 2, 1]);
    }

    #[test]
    fn projective_line() {
        let (_, r) = ring(P1);
        let w = r.omega(0);
        assert!(r.multiply(&w, &w).is_zero());
        assert_eq!(r.integrate(&w), rat(1));
        assert_eq!(r.monomial_name(1), "w1");
    }

    #[test]
    fn projective_plane_products() {
        let (_, r) = ring(P2);
        let w = r.omega(0);
        let w2 = r.multiply(&w, &w);
        assert_eq!(w2, CohomClass::unit(3, 2));
        assert!(r.multiply(&w, &w2).is_zero());
        assert_eq!(r.integrate(&w2), rat(1));
        assert_eq!(r.integrate(&w), rat(0));
    }

    #[test]
    fn exceptional_curve_self_intersection() {
        let (_, r) = ring(F1);
        let e = r.alpha(1);
        assert_eq!(r.integrate(&r.multiply(&e, &e)), rat(-1));
    }

    #[test]
    fn projective_space_residue_pairing() {
        let (_, r) = ring(
            r#"{"rays": [[1,0,0],[0,1,0],[0,0,1],[-1,-1,-1]],
                "max_cones": [[0,1,2],[0,1,3],[0,2,3],[1,2,3]]}"#,
        );
        let w = r.omega(0);
        for i in 0..=3 {
            let p = r.multiply(&r.power(&w, i), &r.power(&w, 3 - i));
            assert_eq!(r.integrate(&p), rat(1));
        }
    }

    #[test]
    fn dual_bases() {
        let (_, r) = ring(P1);
        let db = r.dual_basis().unwrap();
        assert_eq!(db.dual[0], r.omega(0));
        assert_eq!(db.dual[1], r.one());

        let (_, r) = ring(P2);
        let db = r.dual_basis().unwrap();
        let w = r.omega(0);
        assert_eq!(db.dual[0], r.multiply(&w, &w));
        assert_eq!(db.dual[1], w);
        assert_eq!(db.dual[2], r.one());

        let (_, r) = ring(P1XP1);
        assert_eq!(r.pairing_matrix(1), vec![vec![rat(0), rat(1)], vec![rat(1), rat(0)]]);
        let db = r.dual_basis().unwrap();
        assert_eq!(db.dual[1], r.omega(1));
        assert_eq!(db.dual[2], r.omega(0));
    }

    #[test]
    fn linear_relations_vanish() {
        for text in [P1, P2, P1XP1, F1] {
            let (fan, r) = ring(text);
            assert!(r.linear_relations(&fan).iter().all(CohomClass::is_zero));
        }
    }

    #[test]
    fn class_display() {
        let (_, r) = ring(P1XP1);
        let c = &r.omega(0).scale(&rat(2)) - &r.omega(1);
        assert_eq!(r.display(&c), "2*w1 - w2");
        assert_eq!(r.display(&r.zero()), "0");
    }
}
