//! Exact polyhedral cones: double-description extreme-ray enumeration,
//! membership tests and symmetry orbits of 4-party entropy rays.
//!
//! Coordinates of a cone built from functionals on a party system are the
//! nonempty subsets in bitmask order: coordinate `i` is the subset with bits `i + 1`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedMul};

use crate::entvec::{EntropyVector, PartySystem, Subset, NUMERIC_TOLERANCE};
use crate::error::{Error, Result};
use crate::ineq::{self, InequalityInstance};

pub const MAX_CONE_DIMENSION: usize = 31;

/// An integer ray in canonical form: gcd of the entries is 1.
pub type Ray = Vec<i64>;

/// A cone `{x : c·x >= 0 for every constraint c}`.
#[derive(Clone, Debug)]
pub struct RationalCone {
    dim: usize,
    constraints: Vec<Vec<i64>>,
    names: Vec<String>,
    system: Option<PartySystem>,
    rays: Option<Vec<Ray>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Position {
    /// Strictly inside: no constraint is tight.
    Inside,
    /// Inside with at least one tight constraint.
    Boundary,
    Outside,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub position: Position,
    pub tight: Vec<usize>,
    pub violated: Vec<usize>,
}

impl RationalCone {
    /// Integer constraints; each row is reduced to a primitive vector and zero rows are dropped.
    pub fn from_integer_rows(dim: usize, rows: Vec<Vec<i64>>) -> Result<Self> {
        let names = (0..rows.len()).map(|i| format!("c{i}")).collect();
        Self::build(dim, rows, names, None)
    }

    /// Rational constraints, scaled to primitive integer rows.
    pub fn new(dim: usize, rows: Vec<Vec<Rational64>>) -> Result<Self> {
        let rows = rows.iter().map(|r| integer_row(r)).collect::<Result<Vec<_>>>()?;
        Self::from_integer_rows(dim, rows)
    }

    /// One constraint per inequality instance, over the instances' common system.
    pub fn from_instances(system: &PartySystem, instances: &[InequalityInstance]) -> Result<Self> {
        let dim = system.full().bits() as usize;
        let mut rows = Vec::with_capacity(instances.len());
        let mut names = Vec::with_capacity(instances.len());
        for inst in instances {
            system.ensure_same(inst.functional.system())?;
            let mut dense = vec![Rational64::from_integer(0); dim];
            for (s, c) in inst.functional.terms() {
                if !s.is_empty() {
                    dense[s.bits() as usize - 1] = c;
                }
            }
            rows.push(integer_row(&dense)?);
            names.push(inst.name.clone());
        }
        Self::build(dim, rows, names, Some(system.clone()))
    }

    fn build(dim: usize, rows: Vec<Vec<i64>>, names: Vec<String>, system: Option<PartySystem>) -> Result<Self> {
        if dim == 0 || dim > MAX_CONE_DIMENSION {
            return Err(Error::Cone(format!("dimension {dim} outside 1..={MAX_CONE_DIMENSION}")));
        }
        let mut constraints = Vec::new();
        let mut kept = Vec::new();
        for (row, name) in rows.into_iter().zip(names) {
            if row.len() != dim {
                return Err(Error::Dimension(format!("constraint of length {} in dimension {dim}", row.len())));
            }
            if row.iter().all(|&x| x == 0) {
                continue;
            }
            constraints.push(primitive(row.iter().map(|&x| x as i128).collect())?);
            kept.push(name);
        }
        Ok(RationalCone {
            dim,
            constraints,
            names: kept,
            system,
            rays: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[Vec<i64>] {
        &self.constraints
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn system(&self) -> Option<&PartySystem> {
        self.system.as_ref()
    }

    /// Stored generators, if [`RationalCone::with_generators`] has been called.
    pub fn rays(&self) -> Option<&[Ray]> {
        self.rays.as_deref()
    }

    /// Appends a constraint; clears stored generators.
    pub fn add_constraint(&mut self, name: &str, row: Vec<i64>) -> Result<()> {
        if row.len() != self.dim {
            return Err(Error::Dimension(format!("constraint of length {} in dimension {}", row.len(), self.dim)));
        }
        if row.iter().any(|&x| x != 0) {
            self.constraints.push(primitive(row.iter().map(|&x| x as i128).collect())?);
            self.names.push(name.to_string());
        }
        self.rays = None;
        Ok(())
    }

    /// Rank of the constraint matrix; the cone is pointed iff it equals the dimension.
    pub fn constraint_rank(&self) -> Result<usize> {
        let rows: Vec<&[i64]> = self.constraints.iter().map(|r| r.as_slice()).collect();
        rank(&rows, self.dim)
    }

    /// Computes and stores the extreme rays.
    pub fn with_generators(mut self) -> Result<Self> {
        self.rays = Some(self.extreme_rays()?);
        Ok(self)
    }

    /// Extreme rays by incremental double description with exact integer arithmetic,
    /// sorted lexicographically.
    pub fn extreme_rays(&self) -> Result<Vec<Ray>> {
        let d = self.dim;
        let r = self.constraint_rank()?;
        if r < d {
            return Err(Error::NotPointed { rank: r, dim: d });
        }
        let m = self.constraints.len();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| {
            let si = support(&self.constraints[i]);
            let sj = support(&self.constraints[j]);
            si.cmp(&sj).then_with(|| self.constraints[i].cmp(&self.constraints[j]))
        });

        // Greedy basis in insertion order.
        let mut basis: Vec<usize> = Vec::with_capacity(d);
        for &c in &order {
            let mut trial: Vec<&[i64]> = basis.iter().map(|&b| self.constraints[b].as_slice()).collect();
            trial.push(&self.constraints[c]);
            if rank(&trial, d)? == trial.len() {
                basis.push(c);
                if basis.len() == d {
                    break;
                }
            }
        }

        let words = m.div_ceil(64);
        let mut rays: Vec<DdRay> = Vec::with_capacity(d);
        for (i, &bi) in basis.iter().enumerate() {
            let others: Vec<&[i64]> = basis
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &b)| self.constraints[b].as_slice())
                .collect();
            let mut v = kernel_vector(&others, d)?;
            if dot(&self.constraints[bi], &v)? < 0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            let mut tight = vec![0u64; words];
            for (j, &bj) in basis.iter().enumerate() {
                if j != i {
                    set_bit(&mut tight, bj);
                }
            }
            rays.push(DdRay { v: primitive_i128(v)?, tight });
        }

        let in_basis: BTreeSet<usize> = basis.iter().copied().collect();
        for &c in order.iter().filter(|c| !in_basis.contains(c)) {
            let row = &self.constraints[c];
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            let mut next = Vec::with_capacity(rays.len());
            for mut ray in rays {
                let val = dot(row, &ray.v)?;
                match val.cmp(&0) {
                    Ordering::Greater => pos.push((ray, val)),
                    Ordering::Less => neg.push((ray, val)),
                    Ordering::Equal => {
                        set_bit(&mut ray.tight, c);
                        next.push(ray);
                    }
                }
            }
            let mut created = Vec::new();
            if !neg.is_empty() {
                let current: Vec<&[u64]> = next
                    .iter()
                    .chain(pos.iter().map(|(r, _)| r))
                    .chain(neg.iter().map(|(r, _)| r))
                    .map(|r| r.tight.as_slice())
                    .collect();
                for (p, pv) in &pos {
                    for (n, nv) in &neg {
                        let common: Vec<u64> = p.tight.iter().zip(&n.tight).map(|(a, b)| a & b).collect();
                        if d < 2 || (popcount(&common) as usize) < d - 2 {
                            continue;
                        }
                        // A third ray tight on the common set lies on the same face,
                        // so the face is not an edge.
                        let blocked = current.iter().any(|t| {
                            *t != p.tight.as_slice()
                                && *t != n.tight.as_slice()
                                && common.iter().zip(t.iter()).all(|(c, w)| c & !w == 0)
                        });
                        if blocked {
                            continue;
                        }
                        let rows: Vec<&[i64]> = bits(&common).map(|k| self.constraints[k].as_slice()).collect();
                        if rank(&rows, d)? != d - 2 {
                            continue;
                        }
                        let mut v = Vec::with_capacity(d);
                        for k in 0..d {
                            let a = p.v[k].checked_mul(-nv).ok_or(Error::Overflow)?;
                            let b = n.v[k].checked_mul(*pv).ok_or(Error::Overflow)?;
                            v.push(a.checked_add(b).ok_or(Error::Overflow)?);
                        }
                        let mut tight = common;
                        set_bit(&mut tight, c);
                        created.push(DdRay { v: primitive_i128(v)?, tight });
                    }
                }
            }
            next.extend(created);
            next.extend(pos.into_iter().map(|(r, _)| r));
            rays = next;
        }

        let mut out: Vec<Ray> = rays
            .into_iter()
            .map(|r| r.v.iter().map(|&x| i64::try_from(x).map_err(|_| Error::Overflow)).collect())
            .collect::<Result<_>>()?;
        out.sort();
        out.dedup();
        for ray in &out {
            self.certify(ray)?;
        }
        Ok(out)
    }

    /// Checks that `ray` satisfies every constraint and is tight on a set of rank `dim - 1`.
    pub fn certify(&self, ray: &[i64]) -> Result<()> {
        let v: Vec<i128> = ray.iter().map(|&x| x as i128).collect();
        let mut tight = Vec::new();
        for (row, name) in self.constraints.iter().zip(&self.names) {
            let val = dot(row, &v)?;
            if val < 0 {
                return Err(Error::Invariant(format!("ray {ray:?} violates {name}")));
            }
            if val == 0 {
                tight.push(row.as_slice());
            }
        }
        let r = rank(&tight, self.dim)?;
        if r + 1 != self.dim {
            return Err(Error::Invariant(format!("ray {ray:?} has tight rank {r}, not {}", self.dim - 1)));
        }
        Ok(())
    }

    /// Extreme rays by exhaustive search over `(dim - 1)`-subsets of constraints.
    /// Exponential; meant as a cross-check for small cones.
    pub fn brute_force_rays(&self) -> Result<Vec<Ray>> {
        let d = self.dim;
        let m = self.constraints.len();
        if d == 1 {
            let mut out = Vec::new();
            for v in [1i64, -1] {
                if self.constraints.iter().all(|c| c[0] * v >= 0) {
                    out.push(vec![v]);
                }
            }
            return Ok(out);
        }
        let mut out = BTreeSet::new();
        let mut idx: Vec<usize> = (0..d - 1).collect();
        if m < d - 1 {
            return Ok(Vec::new());
        }
        loop {
            let rows: Vec<&[i64]> = idx.iter().map(|&i| self.constraints[i].as_slice()).collect();
            if rank(&rows, d)? == d - 1 {
                let v = primitive_i128(kernel_vector(&rows, d)?)?;
                for sign in [1i128, -1] {
                    let w: Vec<i128> = v.iter().map(|x| x * sign).collect();
                    let inside = self
                        .constraints
                        .iter()
                        .map(|c| dot(c, &w))
                        .collect::<Result<Vec<_>>>()?
                        .iter()
                        .all(|&x| x >= 0);
                    if inside {
                        out.insert(
                            w.iter()
                                .map(|&x| i64::try_from(x).map_err(|_| Error::Overflow))
                                .collect::<Result<Ray>>()?,
                        );
                    }
                }
            }
            // Next combination in lexicographic order.
            let k = idx.len();
            let Some(pos) = (0..k).rev().find(|&i| idx[i] < m - k + i) else {
                break;
            };
            idx[pos] += 1;
            for j in pos + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Exact position of a rational point.
    pub fn membership(&self, v: &[Rational64]) -> Result<Membership> {
        if v.len() != self.dim {
            return Err(Error::Dimension(format!("point of length {} in dimension {}", v.len(), self.dim)));
        }
        let signs = self
            .constraints
            .iter()
            .map(|row| {
                let mut acc = Rational64::from_integer(0);
                for (&c, &x) in row.iter().zip(v) {
                    acc = acc
                        .checked_add(&x.checked_mul(&Rational64::from_integer(c)).ok_or(Error::Overflow)?)
                        .ok_or(Error::Overflow)?;
                }
                Ok(acc.cmp(&Rational64::from_integer(0)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(classify(signs))
    }

    /// Position of a floating-point point, with constraint values within `tol` of zero treated as tight.
    pub fn membership_f64(&self, v: &[f64], tol: f64) -> Result<Membership> {
        if v.len() != self.dim {
            return Err(Error::Dimension(format!("point of length {} in dimension {}", v.len(), self.dim)));
        }
        let signs = self
            .constraints
            .iter()
            .map(|row| {
                let val: f64 = row.iter().zip(v).map(|(&c, &x)| c as f64 * x).sum();
                if val.abs() <= tol {
                    Ordering::Equal
                } else {
                    val.partial_cmp(&0.0).unwrap_or(Ordering::Less)
                }
            })
            .collect();
        Ok(classify(signs))
    }

    /// Membership of an entropy vector over the cone's party system; exact when the vector is.
    pub fn membership_vector(&self, v: &EntropyVector) -> Result<Membership> {
        let system = self
            .system
            .as_ref()
            .ok_or_else(|| Error::Cone("cone has no party system".into()))?;
        system.ensure_same(v.system())?;
        if let Some(values) = v.exact_values() {
            self.membership(&values[1..])
        } else {
            let bits: Vec<f64> = system.nonempty_subsets().map(|s| v.bits(s)).collect();
            self.membership_f64(&bits, NUMERIC_TOLERANCE)
        }
    }
}

fn classify(signs: Vec<Ordering>) -> Membership {
    let mut tight = Vec::new();
    let mut violated = Vec::new();
    for (i, s) in signs.into_iter().enumerate() {
        match s {
            Ordering::Equal => tight.push(i),
            Ordering::Less => violated.push(i),
            Ordering::Greater => {}
        }
    }
    let position = if !violated.is_empty() {
        Position::Outside
    } else if tight.is_empty() {
        Position::Inside
    } else {
        Position::Boundary
    };
    Membership {
        position,
        tight,
        violated,
    }
}

struct DdRay {
    v: Vec<i128>,
    tight: Vec<u64>,
}

fn set_bit(words: &mut [u64], i: usize) {
    words[i / 64] |= 1 << (i % 64);
}

fn popcount(words: &[u64]) -> u32 {
    words.iter().map(|w| w.count_ones()).sum()
}

fn bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words
        .iter()
        .enumerate()
        .flat_map(|(k, &w)| (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| k * 64 + b))
}

fn support(row: &[i64]) -> usize {
    row.iter().filter(|&&x| x != 0).count()
}

fn dot(row: &[i64], v: &[i128]) -> Result<i128> {
    let mut acc: i128 = 0;
    for (&a, &b) in row.iter().zip(v) {
        if a != 0 && b != 0 {
            acc = acc
                .checked_add((a as i128).checked_mul(b).ok_or(Error::Overflow)?)
                .ok_or(Error::Overflow)?;
        }
    }
    Ok(acc)
}

fn primitive_i128(mut v: Vec<i128>) -> Result<Vec<i128>> {
    let g = v.iter().fold(0i128, |g, &x| g.gcd(&x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
    Ok(v)
}

fn primitive(v: Vec<i128>) -> Result<Vec<i64>> {
    primitive_i128(v)?
        .into_iter()
        .map(|x| i64::try_from(x).map_err(|_| Error::Overflow))
        .collect()
}

/// Positive multiple of a rational row with coprime integer entries.
fn integer_row(row: &[Rational64]) -> Result<Vec<i64>> {
    let l = row.iter().fold(1i64, |l, x| l.lcm(x.denom()));
    let scaled = row
        .iter()
        .map(|x| {
            (*x.numer() as i128)
                .checked_mul((l / x.denom()) as i128)
                .ok_or(Error::Overflow)
        })
        .collect::<Result<Vec<_>>>()?;
    primitive(scaled)
}

/// Exact rank by fraction-free (Bareiss) elimination.
pub fn rank(rows: &[&[i64]], ncols: usize) -> Result<usize> {
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let m = a.len();
    let mut r = 0;
    let mut prev: i128 = 1;
    for col in 0..ncols {
        if r == m {
            break;
        }
        let Some(pivot) = (r..m).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(r, pivot);
        for i in r + 1..m {
            for j in col + 1..ncols {
                let num = a[r][col]
                    .checked_mul(a[i][j])
                    .and_then(|x| x.checked_sub(a[i][col].checked_mul(a[r][j])?))
                    .ok_or(Error::Overflow)?;
                a[i][j] = num / prev;
            }
            a[i][col] = 0;
        }
        prev = a[r][col];
        r += 1;
    }
    Ok(r)
}

/// Nonzero integer vector spanning the kernel of `d - 1` independent rows.
fn kernel_vector(rows: &[&[i64]], d: usize) -> Result<Vec<i128>> {
    if d == 1 {
        return Ok(vec![1]);
    }
    (0..d)
        .map(|skip| {
            let minor: Vec<Vec<i128>> = rows
                .iter()
                .map(|r| (0..d).filter(|&j| j != skip).map(|j| r[j] as i128).collect())
                .collect();
            let det = determinant(minor)?;
            Ok(if skip % 2 == 0 { det } else { -det })
        })
        .collect()
}

fn determinant(mut a: Vec<Vec<i128>>) -> Result<i128> {
    let n = a.len();
    let mut sign = 1;
    let mut prev: i128 = 1;
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| a[i][k] != 0) else {
            return Ok(0);
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[k][k]
                    .checked_mul(a[i][j])
                    .and_then(|x| x.checked_sub(a[i][k].checked_mul(a[k][j])?))
                    .ok_or(Error::Overflow)?;
                a[i][j] = num / prev;
            }
        }
        prev = a[k][k];
    }
    Ok(sign * a[n - 1][n - 1])
}

/// Poly-quantoid cone: nonnegativity, strong subadditivity and weak monotonicity.
pub fn build_quantum_cone(n: usize) -> Result<RationalCone> {
    let system = PartySystem::letters(n)?;
    RationalCone::from_instances(&system, &ineq::quantum_family(&system))
}

/// Poly-quantoid cone cut by the Ingleton permutations on every four parties of
/// the `(n+1)`-party purification (30 instances when `n = 4`).
pub fn build_quantum_ingleton_cone(n: usize) -> Result<RationalCone> {
    let system = PartySystem::letters(n)?;
    let mut family = ineq::quantum_family(&system);
    family.extend(ineq::pure_ingleton_family(&system)?);
    RationalCone::from_instances(&system, &ineq::dedup(family))
}

/// Poly-quantoid cone cut only by the 6 Ingleton permutations on the `n = 4`
/// parties themselves. Not invariant under relabelings involving the purifier.
pub fn build_quantum_abcd_ingleton_cone() -> Result<RationalCone> {
    let system = PartySystem::letters(4)?;
    let mut family = ineq::quantum_family(&system);
    family.extend(ineq::ingleton_permutations(&system, &[0, 1, 2, 3])?);
    RationalCone::from_instances(&system, &ineq::dedup(family))
}

/// Row labels of the 5-party display: singletons and pairs of `a..e`, with `e` purifying `abcd`.
pub const TABLE1_ROWS: [&str; 15] = [
    "a", "b", "c", "d", "e", "ab", "ac", "ad", "ae", "bc", "bd", "be", "cd", "ce", "de",
];

/// Orbit representatives of the extreme rays of the 4-party quantum Ingleton cone,
/// in [`TABLE1_ROWS`] coordinates. Rays 3 and 6 are in units of `log2 3`.
pub const TABLE1: [[i64; 15]; 7] = [
    [1, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2],
    [1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 0, 0, 0],
    [1, 1, 1, 1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
    [1, 1, 1, 1, 0, 2, 2, 2, 1, 2, 2, 1, 2, 1, 1],
    [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
    [2, 1, 1, 1, 1, 3, 3, 3, 3, 2, 2, 2, 2, 2, 2],
    [1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 3, 3, 2, 2, 2],
];

fn table_row_masks() -> [u32; 15] {
    let sys = PartySystem::letters(5).expect("five letters");
    TABLE1_ROWS.map(|r| sys.parse_subset(r).expect("row label").bits())
}

/// Position in [`TABLE1_ROWS`] of the 5-party subset representing `mask ⊆ abcd`:
/// the subset itself when it has at most two parties, else its complement in `abcde`.
fn row_of(mask: u32) -> usize {
    let target = if mask.count_ones() <= 2 { mask } else { 0b11111 ^ mask };
    table_row_masks().iter().position(|&m| m == target).expect("every subset has a row")
}

/// 15-coordinate 4-party vector to its 5-party pure display column.
pub fn lift_to_pure<T: Copy>(v: &[T]) -> Vec<T> {
    assert_eq!(v.len(), 15, "4-party vectors have 15 coordinates");
    table_row_masks()
        .iter()
        .map(|&k| {
            let j = if k & 0b10000 == 0 { k } else { 0b01111 & !(k & 0b01111) };
            v[j as usize - 1]
        })
        .collect()
}

/// Inverse of [`lift_to_pure`].
pub fn unlift_from_pure<T: Copy>(column: &[T]) -> Vec<T> {
    assert_eq!(column.len(), 15, "display columns have 15 rows");
    (1u32..16).map(|mask| column[row_of(mask)]).collect()
}

/// Text rendering of a subset row label with its complement annotation, e.g. `ae (≙ bcd)`.
pub fn table1_row_label(row: usize) -> String {
    let label = TABLE1_ROWS[row];
    if label.contains('e') {
        let rest: String = "abcd".chars().filter(|c| !label.contains(*c)).collect();
        format!("{label} (≙ {rest})")
    } else {
        label.to_string()
    }
}

/// Permutation group acting on 4-party rays.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symmetry {
    /// Relabelings of `a, b, c, d`.
    S4,
    /// Relabelings of `a, b, c, d` and the purifying party `e`.
    S5,
}

impl fmt::Display for Symmetry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Symmetry::S4 => "S4",
            Symmetry::S5 => "S5",
        })
    }
}

/// All distinct images of a 15-coordinate ray.
pub fn orbit(ray: &[i64], symmetry: Symmetry) -> Vec<Ray> {
    assert_eq!(ray.len(), 15, "4-party rays have 15 coordinates");
    let n = match symmetry {
        Symmetry::S4 => 4,
        Symmetry::S5 => 5,
    };
    // Pure 5-party function: w(K) = v(K) without e, v(abcd \ K) with e.
    let w: Vec<i64> = (0u32..32)
        .map(|k| {
            let j = if k & 0b10000 == 0 { k } else { 0b01111 & !k };
            if j == 0 {
                0
            } else {
                ray[j as usize - 1]
            }
        })
        .collect();
    let mut out = BTreeSet::new();
    for mut perm in ineq::permutations(n) {
        perm.resize(5, 4);
        let mut image = vec![0i64; 32];
        for (k, &val) in w.iter().enumerate() {
            image[Subset::from_bits(k as u32).permuted(&perm).bits() as usize] = val;
        }
        out.insert(image[1..16].to_vec());
    }
    out.into_iter().collect()
}

/// Orbit of a ray under relabelings, represented by its lexicographic minimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayOrbit {
    pub representative: Ray,
    pub symmetry: Symmetry,
    pub size: usize,
}

pub fn canonicalize_orbit(ray: &[i64], symmetry: Symmetry) -> RayOrbit {
    let all = orbit(ray, symmetry);
    RayOrbit {
        representative: all[0].clone(),
        symmetry,
        size: all.len(),
    }
}

/// Outcome of comparing an enumerated ray set with the seven reference columns.
#[derive(Clone, Debug)]
pub struct Table1Match {
    pub symmetry: Symmetry,
    pub total_rays: usize,
    /// For each reference column, its orbit and the number of enumerated rays in it.
    pub matched: Vec<(usize, RayOrbit, usize)>,
    /// Reference columns with no enumerated ray in their orbit.
    pub missing: Vec<usize>,
    /// Orbits of enumerated rays matching no reference column.
    pub extra: Vec<RayOrbit>,
}

impl Table1Match {
    /// Every reference orbit is present, nothing else is, and every orbit is complete.
    pub fn is_exact(&self) -> bool {
        self.missing.is_empty()
            && self.extra.is_empty()
            && self.matched.iter().all(|(_, o, count)| o.size == *count)
            && self.matched.iter().map(|(_, _, c)| c).sum::<usize>() == self.total_rays
    }

    pub fn summary(&self) -> String {
        let mut out = format!("{} rays, orbits under {}:\n", self.total_rays, self.symmetry);
        for (col, orbit, count) in &self.matched {
            out.push_str(&format!("  ray {col}: orbit size {}, found {count}\n", orbit.size));
        }
        for col in &self.missing {
            out.push_str(&format!("  ray {col}: missing\n"));
        }
        for orbit in &self.extra {
            out.push_str(&format!(
                "  unexpected orbit of size {}: {:?}\n",
                orbit.size,
                lift_to_pure(&orbit.representative)
            ));
        }
        out
    }
}

/// Groups `rays` (15-coordinate 4-party form) into orbits and compares with [`TABLE1`].
pub fn match_table1(rays: &[Ray], symmetry: Symmetry) -> Table1Match {
    let reference: Vec<RayOrbit> = TABLE1
        .iter()
        .map(|col| canonicalize_orbit(&unlift_from_pure(col), symmetry))
        .collect();
    let mut counts = vec![0usize; 7];
    let mut extra: Vec<RayOrbit> = Vec::new();
    for ray in rays {
        let o = canonicalize_orbit(ray, symmetry);
        match reference.iter().position(|r| r.representative == o.representative) {
            Some(i) => counts[i] += 1,
            None => {
                if !extra.iter().any(|e| e.representative == o.representative) {
                    extra.push(o);
                }
            }
        }
    }
    let mut matched = Vec::new();
    let mut missing = Vec::new();
    for (i, (o, c)) in reference.into_iter().zip(counts).enumerate() {
        if c == 0 {
            missing.push(i);
        } else {
            matched.push((i, o, c));
        }
    }
    Table1Match {
        symmetry,
        total_rays: rays.len(),
        matched,
        missing,
        extra,
    }
}

/// The 4-party quantum Ingleton cone written in the 15 display coordinates of
/// the pure 5-party system: the 5-party poly-quantoid inequalities and the
/// Ingleton permutations on every four of `a..e`, with `S(K) = S(K^c)` substituted.
pub fn build_pure_lifted_cone() -> Result<RationalCone> {
    let five = PartySystem::letters(5)?;
    let masks = table_row_masks();
    let coordinate = |s: Subset| -> Option<usize> {
        let k = if s.len() <= 2 { s.bits() } else { 0b11111 ^ s.bits() };
        if k == 0 {
            None
        } else {
            masks.iter().position(|&m| m == k)
        }
    };
    let mut rows = Vec::new();
    let mut names = Vec::new();
    let mut push = |name: String, terms: Vec<(Subset, Rational64)>| -> Result<()> {
        let mut dense = vec![Rational64::from_integer(0); 15];
        for (s, c) in terms {
            if let Some(i) = coordinate(s) {
                dense[i] += c;
            }
        }
        rows.push(integer_row(&dense)?);
        names.push(name);
        Ok(())
    };
    for inst in ineq::quantum_family(&five) {
        push(inst.name.clone(), inst.functional.terms().collect())?;
    }
    for mask in [0b01111u32, 0b10111, 0b11011, 0b11101, 0b11110] {
        let parties: Vec<usize> = Subset::from_bits(mask).parties().collect();
        for inst in ineq::ingleton_permutations(&five, &parties)? {
            push(inst.name.clone(), inst.functional.terms().collect())?;
        }
    }
    // Substitution can make distinct inequalities coincide.
    let mut seen = BTreeSet::new();
    let mut kept_rows = Vec::new();
    let mut kept_names = Vec::new();
    for (row, name) in rows.into_iter().zip(names) {
        if row.iter().any(|&x| x != 0) && seen.insert(row.clone()) {
            kept_rows.push(row);
            kept_names.push(name);
        }
    }
    RationalCone::build(15, kept_rows, kept_names, None)
}
