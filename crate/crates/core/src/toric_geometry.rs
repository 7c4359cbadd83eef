//! Fans, charge matrices, wall curves and curve-class enumeration.
//!
//! A curve class is recorded by its coordinates `d_j` against a simplicial
//! nef basis `omega_1..omega_l`. The rows of the charge matrix are the curve
//! classes dual to that basis, written as vectors in `Z^n` whose `k`-th entry
//! is the intersection number with the toric divisor `D_k`. Hence column `k`
//! of the matrix gives `alpha_k = sum_j m[j][k] omega_j`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{self, floor_i64, rat, Rational};

/// Validated fan of a smooth complete toric variety.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanData {
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
    nef_basis: Option<Vec<Vec<Rational>>>,
}

/// A codimension-one face shared by two maximal cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    pub face: Vec<usize>,
    /// The ray of each adjacent maximal cone that is not on the face.
    pub opposite: (usize, usize),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FanFile {
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
    #[serde(default)]
    nef_basis: Option<Vec<Vec<String>>>,
}

/// Parses and validates the JSON fan format.
pub fn parse_fan(text: &str) -> Result<FanData> {
    let file: FanFile = serde_json::from_str(text).map_err(|e| Error::Syntax(e.to_string()))?;
    let nef_basis = file
        .nef_basis
        .map(|rows| {
            rows.iter()
                .map(|row| row.iter().map(|s| rational::parse_rational(s)).collect())
                .collect::<Result<Vec<Vec<Rational>>>>()
        })
        .transpose()?;
    FanData::new(file.rays, file.max_cones, nef_basis)
}

impl FanData {
    pub fn new(
        rays: Vec<Vec<i64>>,
        max_cones: Vec<Vec<usize>>,
        nef_basis: Option<Vec<Vec<Rational>>>,
    ) -> Result<Self> {
        let dim = rays.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::Syntax("fan needs at least one ray of positive dimension".into()));
        }
        for (index, ray) in rays.iter().enumerate() {
            if ray.len() != dim {
                return Err(Error::RayDimension { index, expected: dim, found: ray.len() });
            }
            let g = ray.iter().fold(0i64, |g, &x| g.gcd(&x));
            if g != 1 {
                return Err(Error::NonPrimitiveRay { index, ray: ray.clone() });
            }
        }
        let n = rays.len();
        if n <= dim {
            return Err(Error::TooFewRays { rays: n, dim });
        }

        let mut cones = Vec::with_capacity(max_cones.len());
        for (cone, raw) in max_cones.into_iter().enumerate() {
            if raw.len() != dim {
                return Err(Error::ConeRayCount { cone, expected: dim, found: raw.len() });
            }
            if let Some(&ray) = raw.iter().find(|&&r| r >= n) {
                return Err(Error::ConeIndexOutOfRange { cone, ray, rays: n });
            }
            let mut sorted = raw;
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::ConeRepeatedRay { cone });
            }
            let mat: Vec<Vec<i64>> = sorted.iter().map(|&k| rays[k].clone()).collect();
            let det = linalg::determinant(&mat);
            if det.abs() != BigInt::one() {
                return Err(Error::NotUnimodular { cone, det: det.to_string() });
            }
            cones.push(sorted);
        }
        if cones.is_empty() {
            return Err(Error::Syntax("fan has no maximal cones".into()));
        }

        if let Some(basis) = &nef_basis {
            let l = n - dim;
            if basis.len() != l {
                return Err(Error::NefBasisShape(format!("{} rows, expected {l}", basis.len())));
            }
            if let Some(row) = basis.iter().find(|r| r.len() != n) {
                return Err(Error::NefBasisShape(format!(
                    "row of length {}, expected {n}",
                    row.len()
                )));
            }
        }

        let fan = FanData { rays, max_cones: cones, nef_basis };
        fan.collect_walls()?;
        Ok(fan)
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn nef_basis(&self) -> Option<&[Vec<Rational>]> {
        self.nef_basis.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.rays[0].len()
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn picard_rank(&self) -> usize {
        self.num_rays() - self.dim()
    }

    /// True when the ray set lies in a common maximal cone.
    pub fn is_face(&self, rays: &[usize]) -> bool {
        self.max_cones.iter().any(|c| rays.iter().all(|r| c.contains(r)))
    }

    pub fn walls(&self) -> Vec<Wall> {
        self.collect_walls().expect("walls were validated on construction")
    }

    fn collect_walls(&self) -> Result<Vec<Wall>> {
        let mut faces: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for cone in &self.max_cones {
            for (skip, &opposite) in cone.iter().enumerate() {
                let face: Vec<usize> =
                    cone.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &r)| r).collect();
                faces.entry(face).or_default().push(opposite);
            }
        }
        faces
            .into_iter()
            .map(|(face, opp)| {
                if opp.len() != 2 {
                    return Err(Error::WallSharing { wall: face, count: opp.len() });
                }
                Ok(Wall { face, opposite: (opp[0], opp[1]) })
            })
            .collect()
    }

    /// Minimal ray subsets that span no cone (Stanley-Reisner generators).
    pub fn minimal_non_faces(&self) -> Vec<Vec<usize>> {
        let n = self.num_rays();
        let mut out: Vec<Vec<usize>> = Vec::new();
        // a minimal non-face has at most dim + 1 elements
        for size in 2..=(self.dim() + 1).min(n) {
            for subset in subsets(n, size) {
                if self.is_face(&subset) {
                    continue;
                }
                if out.iter().any(|g| g.iter().all(|r| subset.contains(r))) {
                    continue;
                }
                out.push(subset);
            }
        }
        out
    }

    /// The relation `v_i + v_j + sum_{k in face} b_k v_k = 0` of a wall, as
    /// the vector of intersection numbers of its curve with each `D_k`.
    pub fn wall_relation(&self, wall: &Wall) -> Result<Vec<i64>> {
        let (i, j) = wall.opposite;
        let mut sigma = wall.face.clone();
        sigma.push(i);
        let columns: Vec<Vec<Rational>> = sigma
            .iter()
            .map(|&k| self.rays[k].iter().map(|&x| rat(x)).collect())
            .collect();
        let target: Vec<Rational> = self.rays[j].iter().map(|&x| rat(x)).collect();
        let bad = || Error::BadWall { wall: wall.face.clone() };
        let coeffs = linalg::solve_columns(&columns, &target).ok_or_else(bad)?;
        let mut rel = vec![0i64; self.num_rays()];
        for (pos, &k) in sigma.iter().enumerate() {
            rel[k] = -rational::to_i64(&coeffs[pos]).ok_or_else(bad)?;
        }
        if rel[i] != 1 {
            return Err(bad());
        }
        rel[j] = 1;
        Ok(rel)
    }

    fn wall_relations(&self) -> Result<Vec<Vec<i64>>> {
        let set: BTreeSet<Vec<i64>> =
            self.walls().iter().map(|w| self.wall_relation(w)).collect::<Result<_>>()?;
        Ok(set.into_iter().collect())
    }
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for k in start..n {
            cur.push(k);
            rec(k + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, size, &mut Vec::new(), &mut out);
    out
}

/// Curve class `(d_1, .., d_l)` with `d_j = int_d omega_j`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurveClass(pub Vec<i64>);

impl CurveClass {
    pub fn zero(l: usize) -> Self {
        CurveClass(vec![0; l])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn add(&self, other: &CurveClass) -> CurveClass {
        CurveClass(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &CurveClass) -> CurveClass {
        CurveClass(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The `l x n` integer matrix whose column `k` holds the coordinates of
/// `alpha_k` in the nef basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChargeMatrix {
    rows: Vec<Vec<i64>>,
}

impl ChargeMatrix {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("charge matrix must be a nonempty rectangle".into()));
        }
        let q: Vec<Vec<Rational>> =
            rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
        if linalg::rank(&q) != rows.len() {
            return Err(Error::Dimension("charge matrix rows are dependent".into()));
        }
        Ok(ChargeMatrix { rows })
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn l(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.rows[0].len()
    }

    pub fn entry(&self, j: usize, k: usize) -> i64 {
        self.rows[j][k]
    }

    /// Coordinates of `alpha_k` in the nef basis.
    pub fn column(&self, k: usize) -> Vec<i64> {
        self.rows.iter().map(|r| r[k]).collect()
    }

    /// `int_d alpha_k = sum_j m[j][k] d_j`.
    pub fn pairing(&self, d: &CurveClass, k: usize) -> i64 {
        self.rows.iter().zip(&d.0).map(|(r, &dj)| r[k] * dj).sum()
    }

    pub fn pairing_vector(&self, d: &CurveClass) -> Vec<i64> {
        (0..self.n()).map(|k| self.pairing(d, k)).collect()
    }

    /// `int_d c_1(TM)` with `c_1 = sum_k alpha_k`.
    pub fn c1(&self, d: &CurveClass) -> i64 {
        self.pairing_vector(d).iter().sum()
    }

    /// Inverse of `pairing_vector`: nef coordinates of a class given by its
    /// intersection numbers with every `D_k`.
    pub fn curve_from_pairings(&self, pairings: &[i64]) -> Option<CurveClass> {
        let columns: Vec<Vec<Rational>> =
            self.rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
        let target: Vec<Rational> = pairings.iter().map(|&x| rat(x)).collect();
        let sol = linalg::solve_columns(&columns, &target)?;
        sol.iter().map(rational::to_i64).collect::<Option<Vec<_>>>().map(CurveClass)
    }
}

/// Charge matrix of the fan in its nef basis.
///
/// With an explicit `nef_basis` the rows are the curve classes dual to it;
/// otherwise the rows are the extremal wall curves, which requires the Mori
/// cone to be simplicial and generated by a lattice basis.
pub fn charge_matrix(fan: &FanData) -> Result<ChargeMatrix> {
    let l = fan.picard_rank();
    let kernel = linalg::integer_kernel(fan.rays());
    if kernel.len() != l {
        return Err(Error::Dimension(format!(
            "rays span a sublattice of rank {}, expected {}",
            fan.num_rays() - kernel.len(),
            fan.dim()
        )));
    }
    let kernel: Vec<Vec<Rational>> = kernel
        .into_iter()
        .map(|r| r.into_iter().map(Rational::from_integer).collect())
        .collect();
    let walls = fan.wall_relations()?;

    let rows = match fan.nef_basis() {
        Some(basis) => {
            // pairing of each nef element with each kernel basis vector
            let pair: Vec<Vec<Rational>> = basis
                .iter()
                .map(|w| kernel.iter().map(|kv| dot(w, kv)).collect())
                .collect();
            if pair.iter().flatten().any(|x| !x.is_integer()) {
                return Err(Error::NefBasisNotLattice);
            }
            let pair_int: Vec<Vec<i64>> = pair
                .iter()
                .map(|r| r.iter().map(|x| rational::to_i64(x).unwrap_or(0)).collect())
                .collect();
            if linalg::determinant(&pair_int).abs() != BigInt::one() {
                return Err(Error::NefBasisNotLattice);
            }
            let inv = linalg::inverse(&pair).ok_or(Error::NefBasisNotLattice)?;
            // rows = inv^T * kernel
            let l = pair.len();
            let rows: Vec<Vec<i64>> = (0..l)
                .map(|i| {
                    (0..fan.num_rays())
                        .map(|k| {
                            let v: Rational = (0..l).map(|j| &inv[j][i] * &kernel[j][k]).sum();
                            rational::to_i64(&v).ok_or(Error::NefBasisNotLattice)
                        })
                        .collect::<Result<Vec<i64>>>()
                })
                .collect::<Result<_>>()?;
            for (index, w) in basis.iter().enumerate() {
                for curve in &walls {
                    let p = dot(w, &curve.iter().map(|&x| rat(x)).collect::<Vec<_>>());
                    if p.is_negative() {
                        return Err(Error::NefBasisNotNef { index, curve: curve.clone() });
                    }
                }
            }
            rows
        }
        None => {
            let extremal = extremal_classes(&walls);
            if extremal.len() != l {
                return Err(Error::NefConeNotSimplicial { extremal: extremal.len(), rank: l });
            }
            let kernel_cols = kernel.clone();
            let coords: Vec<Vec<i64>> = extremal
                .iter()
                .map(|e| {
                    let target: Vec<Rational> = e.iter().map(|&x| rat(x)).collect();
                    linalg::solve_columns(&kernel_cols, &target)
                        .and_then(|c| c.iter().map(rational::to_i64).collect::<Option<Vec<_>>>())
                        .ok_or(Error::MoriNotLatticeBasis)
                })
                .collect::<Result<_>>()?;
            if linalg::determinant(&coords).abs() != BigInt::one() {
                return Err(Error::MoriNotLatticeBasis);
            }
            let mut rows = extremal;
            rows.sort_by(|a, b| b.cmp(a));
            rows
        }
    };
    ChargeMatrix::new(rows)
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Classes among `gens` that are not nonnegative combinations of the others.
fn extremal_classes(gens: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let as_rat = |v: &Vec<i64>| v.iter().map(|&x| rat(x)).collect::<Vec<Rational>>();
    gens.iter()
        .enumerate()
        .filter(|&(i, g)| {
            let others: Vec<Vec<Rational>> =
                gens.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| as_rat(v)).collect();
            !in_cone_rational(&others, &as_rat(g), others.len())
        })
        .map(|(_, g)| g.clone())
        .collect()
}

/// Nonnegative-combination test by enumerating linearly independent
/// generator subsets of size at most `max_size` (Caratheodory).
fn in_cone_rational(gens: &[Vec<Rational>], target: &[Rational], max_size: usize) -> bool {
    if target.iter().all(Zero::is_zero) {
        return true;
    }
    for size in 1..=max_size.min(gens.len()) {
        for subset in subsets(gens.len(), size) {
            let cols: Vec<Vec<Rational>> = subset.iter().map(|&i| gens[i].clone()).collect();
            if linalg::rank(&cols) != size {
                continue;
            }
            if let Some(x) = linalg::solve_columns(&cols, target) {
                if x.iter().all(rational::is_nonnegative) {
                    return true;
                }
            }
        }
    }
    false
}

/// Distinct wall-curve classes in nef coordinates, sorted.
pub fn mori_generators(fan: &FanData, m: &ChargeMatrix) -> Result<Vec<CurveClass>> {
    if m.n() != fan.num_rays() {
        return Err(Error::ChargeMismatch(format!(
            "{} columns for {} rays",
            m.n(),
            fan.num_rays()
        )));
    }
    let set: BTreeSet<CurveClass> = fan
        .wall_relations()?
        .iter()
        .map(|w| {
            m.curve_from_pairings(w)
                .ok_or_else(|| Error::ChargeMismatch("wall curve outside the row lattice".into()))
        })
        .collect::<Result<_>>()?;
    Ok(set.into_iter().collect())
}

/// Membership of `d` in the cone spanned by `gens`.
pub fn in_mori_cone(gens: &[CurveClass], d: &CurveClass) -> bool {
    let as_rat: Vec<Vec<Rational>> =
        gens.iter().map(|g| g.0.iter().map(|&x| rat(x)).collect()).collect();
    let target: Vec<Rational> = d.0.iter().map(|&x| rat(x)).collect();
    in_cone_rational(&as_rat, &target, d.0.len())
}

/// All Mori-cone classes with `0 <= int_d c_1 <= bound`, ordered by
/// c1-degree and then lexicographically.
pub fn enumerate_degrees(
    gens: &[CurveClass],
    m: &ChargeMatrix,
    bound: u32,
) -> Result<Vec<CurveClass>> {
    let l = m.l();
    let mut caps = vec![0i64; l];
    for g in gens {
        let c1 = m.c1(g);
        if c1 <= 0 {
            return Err(Error::NotFano { curve: g.to_string(), c1 });
        }
        for (j, cap) in caps.iter_mut().enumerate() {
            // d_j <= bound * max_g (g_j / c1(g)) for every d in the cone
            let v = floor_i64(&(rat(bound as i64) * rat(g.0[j]) / rat(c1))).unwrap_or(0);
            *cap = (*cap).max(v);
        }
    }
    let mut out = Vec::new();
    let mut cur = vec![0i64; l];
    loop {
        let d = CurveClass(cur.clone());
        let c1 = m.c1(&d);
        if (0..=bound as i64).contains(&c1) && in_mori_cone(gens, &d) {
            out.push(d);
        }
        // odometer over the box
        let mut j = 0;
        loop {
            if j == l {
                out.sort_by_key(|d| (m.c1(d), d.clone()));
                return Ok(out);
            }
            if cur[j] < caps[j] {
                cur[j] += 1;
                break;
            }
            cur[j] = 0;
            j += 1;
        }
    }
}

/// Fan, charge matrix and Mori generators computed together.
#[derive(Clone, Debug)]
pub struct ToricVariety {
    pub fan: FanData,
    pub charge: ChargeMatrix,
    pub generators: Vec<CurveClass>,
}

impl ToricVariety {
    pub fn new(fan: FanData) -> Result<Self> {
        let charge = charge_matrix(&fan)?;
        let generators = mori_generators(&fan, &charge)?;
        Ok(ToricVariety { fan, charge, generators })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::new(parse_fan(text)?)
    }

    pub fn degrees(&self, bound: u32) -> Result<Vec<CurveClass>> {
        enumerate_degrees(&self.generators, &self.charge, bound)
    }

    pub fn is_fano(&self) -> bool {
        self.generators.iter().all(|g| self.charge.c1(g) > 0)
    }
}
