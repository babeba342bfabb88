//! Dense small-system quantum mechanics: density matrices, partial traces,
//! von Neumann entropy, purification and stabiliser projectors.
//!
//! Basis states of a product space are ordered with the first party as the
//! most significant digit.

use std::f64::consts::PI;

pub use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};

use crate::entvec::{EntropyVector, PartySystem, Subset};
use crate::error::{parse_err, Error, Result};
use crate::numfmt::parse_real;
use crate::stab::StabiliserGroup;

pub const MAX_DIMENSION: usize = 4096;
/// Largest dimension for which full PSD validation and full entropy vectors are computed.
pub const MAX_DENSE_DIMENSION: usize = 256;
pub const MAX_ENTROPY_PARTIES: usize = 6;
const STATE_TOLERANCE: f64 = 1e-10;
const EIGEN_THRESHOLD: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![C0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = C1;
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        CMatrix {
            n,
            data: (0..n * n).map(|k| f(k / n, k % n)).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn mul(&self, other: &CMatrix) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == C0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        CMatrix {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn kron(&self, other: &CMatrix) -> Self {
        let m = other.n;
        Self::from_fn(self.n * m, |i, j| self.get(i / m, j / m) * other.get(i % m, j % m))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of a Hermitian matrix (ascending).
    pub fn eigenvalues_hermitian(&self) -> Result<Vec<f64>> {
        jacobi(self, false).map(|(vals, _)| vals)
    }

    /// Eigenvalues (ascending) and eigenvectors (columns of the returned matrix).
    pub fn eigh(&self) -> Result<(Vec<f64>, CMatrix)> {
        jacobi(self, true).map(|(vals, vecs)| (vals, vecs.expect("requested vectors")))
    }
}

/// Cyclic complex Jacobi iteration. Each rotation first removes the phase of
/// the pivot `A_pq` and then applies a real Jacobi rotation.
fn jacobi(m: &CMatrix, vectors: bool) -> Result<(Vec<f64>, Option<CMatrix>)> {
    let n = m.n;
    let defect = m.hermiticity_defect();
    if defect > STATE_TOLERANCE {
        return Err(Error::NotHermitian(defect));
    }
    let mut a = m.clone();
    let mut v = vectors.then(|| CMatrix::identity(n));
    let off_norm = |a: &CMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a.data[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off_norm(&a) >= EIGEN_THRESHOLD {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let h = a.data[p * n + q];
                let habs = h.norm();
                if habs < 1e-300 {
                    continue;
                }
                let app = a.data[p * n + p].re;
                let aqq = a.data[q * n + q].re;
                let phase = h / habs; // e^{iφ}
                let tau = (aqq - app) / (2.0 * habs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let em = phase.conj(); // e^{-iφ}
                // Columns: A <- A V.
                for k in 0..n {
                    let akp = a.data[k * n + p];
                    let akq = a.data[k * n + q];
                    a.data[k * n + p] = akp * c - akq * em * s;
                    a.data[k * n + q] = akp * s + akq * em * c;
                }
                // Rows: A <- V^† A.
                for k in 0..n {
                    let apk = a.data[p * n + k];
                    let aqk = a.data[q * n + k];
                    a.data[p * n + k] = apk * c - aqk * phase * s;
                    a.data[q * n + k] = apk * s + aqk * phase * c;
                }
                a.data[p * n + q] = C0;
                a.data[q * n + p] = C0;
                a.data[p * n + p] = Complex64::new(app - t * habs, 0.0);
                a.data[q * n + q] = Complex64::new(aqq + t * habs, 0.0);
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v.data[k * n + p];
                        let vkq = v.data[k * n + q];
                        v.data[k * n + p] = vkp * c - vkq * em * s;
                        v.data[k * n + q] = vkp * s + vkq * em * c;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.data[i * n + i].re.total_cmp(&a.data[j * n + j].re));
    let vals = order.iter().map(|&i| a.data[i * n + i].re).collect();
    let vecs = v.map(|v| CMatrix::from_fn(n, |r, c| v.get(r, order[c])));
    Ok((vals, vecs))
}

/// `-Σ λ log2 λ` over eigenvalues above the clamp threshold.
fn spectrum_entropy(vals: &[f64]) -> f64 {
    vals.iter()
        .filter(|&&l| l > STATE_TOLERANCE)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Per-party local dimensions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertFactorization {
    system: PartySystem,
    dims: Vec<usize>,
}

impl HilbertFactorization {
    pub fn new(system: PartySystem, dims: Vec<usize>) -> Result<Self> {
        if dims.len() != system.len() {
            return Err(Error::Dimension(format!(
                "{} dimensions for {} parties",
                dims.len(),
                system.len()
            )));
        }
        let mut total: usize = 1;
        for &d in &dims {
            if d == 0 {
                return Err(Error::Dimension("local dimension 0".into()));
            }
            total = total.saturating_mul(d);
        }
        if total > MAX_DIMENSION {
            return Err(Error::Dimension(format!("total dimension {total} exceeds {MAX_DIMENSION}")));
        }
        Ok(HilbertFactorization { system, dims })
    }

    /// Parties `a, b, ...` with the given dimensions.
    pub fn with_dims(dims: &[usize]) -> Result<Self> {
        Self::new(PartySystem::letters(dims.len())?, dims.to_vec())
    }

    pub fn system(&self) -> &PartySystem {
        &self.system
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// `d_J = Π_{x∈J} d_x`.
    pub fn dim_of(&self, subset: Subset) -> usize {
        subset.parties().map(|x| self.dims[x]).product()
    }

    pub fn restrict(&self, subset: Subset) -> Result<Self> {
        let parties: Vec<usize> = subset.parties().collect();
        Self::new(
            PartySystem::new(parties.iter().map(|&x| self.system.label(x).to_string()))?,
            parties.iter().map(|&x| self.dims[x]).collect(),
        )
    }

    /// For each basis index: (index within `subset`, index within the complement).
    fn split_indices(&self, subset: Subset) -> Vec<(usize, usize)> {
        let total = self.total();
        (0..total)
            .map(|mut i| {
                let (mut kin, mut kout, mut rin, mut rout) = (0, 0, 1, 1);
                for x in (0..self.dims.len()).rev() {
                    let d = self.dims[x];
                    let digit = i % d;
                    i /= d;
                    if subset.contains(x) {
                        kin += digit * rin;
                        rin *= d;
                    } else {
                        kout += digit * rout;
                        rout *= d;
                    }
                }
                (kin, kout)
            })
            .collect()
    }
}

/// A validated density matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    fact: HilbertFactorization,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Checks Hermiticity and unit trace within 1e-10, and positivity (eigenvalues
    /// >= -1e-10) when the dimension is at most [`MAX_DENSE_DIMENSION`].
    pub fn new(fact: HilbertFactorization, matrix: CMatrix) -> Result<Self> {
        if matrix.size() != fact.total() {
            return Err(Error::Dimension(format!(
                "matrix side {} does not match total dimension {}",
                matrix.size(),
                fact.total()
            )));
        }
        let defect = matrix.hermiticity_defect();
        if defect > STATE_TOLERANCE {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr - C1).norm() > STATE_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {} != 1", tr.re)));
        }
        if matrix.size() <= MAX_DENSE_DIMENSION {
            let min = matrix.eigenvalues_hermitian()?.first().copied().unwrap_or(0.0);
            if min < -STATE_TOLERANCE {
                return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(DensityMatrix { fact, matrix })
    }

    fn unchecked(fact: HilbertFactorization, matrix: CMatrix) -> Self {
        DensityMatrix { fact, matrix }
    }

    pub fn factorization(&self) -> &HilbertFactorization {
        &self.fact
    }

    pub fn system(&self) -> &PartySystem {
        self.fact.system()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `ρ_K = Tr_{K^c} ρ`.
    pub fn partial_trace(&self, keep: Subset) -> Result<DensityMatrix> {
        if keep.is_empty() || !self.system().contains_subset(keep) {
            return Err(Error::InvalidArgument("partial trace must keep a nonempty subset of parties".into()));
        }
        if keep == self.system().full() {
            return Ok(self.clone());
        }
        let sub = self.fact.restrict(keep)?;
        let dk = sub.total();
        let dt = self.fact.total() / dk;
        let mut grid = vec![0usize; dk * dt];
        for (i, (k, t)) in self.fact.split_indices(keep).into_iter().enumerate() {
            grid[k * dt + t] = i;
        }
        let mut out = CMatrix::zeros(dk);
        for k1 in 0..dk {
            for k2 in 0..dk {
                let mut acc = C0;
                for t in 0..dt {
                    acc += self.matrix.get(grid[k1 * dt + t], grid[k2 * dt + t]);
                }
                out.set(k1, k2, acc);
            }
        }
        Ok(DensityMatrix::unchecked(sub, out))
    }

    /// `S(ρ)` in bits.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        Ok(spectrum_entropy(&self.matrix.eigenvalues_hermitian()?))
    }

    /// Reduced entropies of all nonempty subsets, in bits.
    pub fn entropy_vector(&self) -> Result<EntropyVector> {
        let n = self.system().len();
        if n > MAX_ENTROPY_PARTIES {
            return Err(Error::Dimension(format!("{n} parties exceed {MAX_ENTROPY_PARTIES}")));
        }
        let mut values = vec![0.0; 1 << n];
        for j in self.system().nonempty_subsets() {
            values[j.bits() as usize] = self.partial_trace(j)?.von_neumann_entropy()?;
        }
        EntropyVector::from_bits(self.system().clone(), values)
    }

    /// `|ψ⟩ = Σ_k √λ_k |φ_k⟩ ⊗ |k⟩` with a reference party of dimension `rank ρ`.
    pub fn purify(&self) -> Result<PureState> {
        let (vals, vecs) = self.matrix.eigh()?;
        let kept: Vec<usize> = (0..vals.len()).filter(|&k| vals[k] > STATE_TOLERANCE).collect();
        let r = kept.len().max(1);
        let label = self.system().fresh_label(&["r", "R", "ref"]);
        let mut dims = self.fact.dims().to_vec();
        dims.push(r);
        let fact = HilbertFactorization::new(self.system().with_party(&label)?, dims)?;
        let d = self.matrix.size();
        let mut amps = vec![C0; d * r];
        for (slot, &k) in kept.iter().enumerate() {
            let w = vals[k].sqrt();
            for i in 0..d {
                amps[i * r + slot] = vecs.get(i, k) * w;
            }
        }
        PureState::normalized(fact, amps)
    }

    /// Text form: `dims: ...`, optional `parties: ...`, then `i j re im` rows.
    pub fn to_text(&self) -> String {
        let mut out = header(&self.fact);
        let n = self.matrix.size();
        for i in 0..n {
            for j in 0..n {
                let v = self.matrix.get(i, j);
                if v.norm() > 0.0 {
                    out.push_str(&format!("{i} {j} {} {}\n", v.re, v.im));
                }
            }
        }
        out
    }
}

fn header(fact: &HilbertFactorization) -> String {
    let dims: Vec<String> = fact.dims().iter().map(usize::to_string).collect();
    format!("dims: {}\nparties: {}\n", dims.join(" "), fact.system().labels().join(" "))
}

/// A unit vector in a product space.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    fact: HilbertFactorization,
    amps: Vec<Complex64>,
}

impl PureState {
    /// Requires `‖ψ‖ = 1` within 1e-12.
    pub fn new(fact: HilbertFactorization, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != fact.total() {
            return Err(Error::Dimension(format!(
                "{} amplitudes for total dimension {}",
                amps.len(),
                fact.total()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("norm {norm} != 1")));
        }
        Ok(PureState { fact, amps })
    }

    pub fn normalized(fact: HilbertFactorization, mut amps: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero vector".into()));
        }
        for a in amps.iter_mut() {
            *a /= norm;
        }
        Self::new(fact, amps)
    }

    /// Seeded state with independent standard complex normal amplitudes.
    pub fn random<R: Rng>(rng: &mut R, fact: HilbertFactorization) -> Result<Self> {
        let amps = (0..fact.total())
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re, im)
            })
            .collect();
        Self::normalized(fact, amps)
    }

    pub fn factorization(&self) -> &HilbertFactorization {
        &self.fact
    }

    pub fn system(&self) -> &PartySystem {
        self.fact.system()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        let n = self.amps.len();
        let m = CMatrix::from_fn(n, |i, j| self.amps[i] * self.amps[j].conj());
        Ok(DensityMatrix::unchecked(self.fact.clone(), m))
    }

    /// `S(ρ_J)` in bits, from the smaller of the two Gram matrices of the
    /// `d_J x d_{J^c}` coefficient matrix.
    pub fn reduced_entropy(&self, subset: Subset) -> Result<f64> {
        let full = self.system().full();
        if subset.is_empty() || subset == full {
            return Ok(0.0);
        }
        let split = self.fact.split_indices(subset);
        let dj = self.fact.dim_of(subset);
        let dc = self.fact.total() / dj;
        let mut m = vec![C0; dj * dc];
        for (i, (k, t)) in split.into_iter().enumerate() {
            m[k * dc + t] = self.amps[i];
        }
        let gram = if dj <= dc {
            CMatrix::from_fn(dj, |a, b| (0..dc).map(|t| m[a * dc + t] * m[b * dc + t].conj()).sum())
        } else {
            CMatrix::from_fn(dc, |a, b| (0..dj).map(|k| m[k * dc + a].conj() * m[k * dc + b]).sum())
        };
        Ok(spectrum_entropy(&gram.eigenvalues_hermitian()?))
    }

    /// Reduced entropies of all nonempty subsets, in bits, flagged pure.
    pub fn entropy_vector(&self) -> Result<EntropyVector> {
        let n = self.system().len();
        if n > MAX_ENTROPY_PARTIES + 1 {
            return Err(Error::Dimension(format!("{n} parties exceed {}", MAX_ENTROPY_PARTIES + 1)));
        }
        let mut values = vec![0.0; 1 << n];
        for j in self.system().nonempty_subsets() {
            let c = self.system().complement(j);
            // S(J) = S(J^c): compute each pair once.
            if c.bits() < j.bits() && !c.is_empty() {
                values[j.bits() as usize] = values[c.bits() as usize];
            } else {
                values[j.bits() as usize] = self.reduced_entropy(j)?;
            }
        }
        EntropyVector::from_bits(self.system().clone(), values)?.into_pure()
    }

    pub fn to_text(&self) -> String {
        let mut out = header(&self.fact);
        for (i, v) in self.amps.iter().enumerate() {
            if v.norm() > 0.0 {
                out.push_str(&format!("{i} {} {}\n", v.re, v.im));
            }
        }
        out
    }
}

/// Either kind of state read from the text format.
#[derive(Clone, Debug, PartialEq)]
pub enum QuantumState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl QuantumState {
    pub fn system(&self) -> &PartySystem {
        match self {
            QuantumState::Pure(s) => s.system(),
            QuantumState::Mixed(r) => r.system(),
        }
    }

    pub fn entropy_vector(&self) -> Result<EntropyVector> {
        match self {
            QuantumState::Pure(s) => s.entropy_vector(),
            QuantumState::Mixed(r) => r.entropy_vector(),
        }
    }

    /// Parses `dims:` (and optional `parties:`), then either `i j re im`
    /// density entries or `i re im` amplitudes. Values may be `p/q`.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut dims: Option<Vec<usize>> = None;
        let mut labels: Option<Vec<String>> = None;
        let mut rows: Vec<(usize, Vec<&str>)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("dims:") {
                dims = Some(
                    rest.split_whitespace()
                        .map(|t| t.parse::<usize>().map_err(|_| parse_err(line_no, format!("bad dimension {t:?}"))))
                        .collect::<Result<_>>()?,
                );
            } else if let Some(rest) = line.strip_prefix("parties:") {
                labels = Some(rest.split_whitespace().map(String::from).collect());
            } else {
                rows.push((line_no, line.split_whitespace().collect()));
            }
        }
        let dims = dims.ok_or_else(|| parse_err(1, "missing `dims:` header"))?;
        let system = match labels {
            Some(l) => PartySystem::new(l),
            None => PartySystem::letters(dims.len()),
        }
        .map_err(|e| parse_err(1, e.to_string()))?;
        let fact = HilbertFactorization::new(system, dims).map_err(|e| parse_err(1, e.to_string()))?;
        let d = fact.total();
        let width = rows.first().map_or(3, |(_, r)| r.len());
        let num = |line: usize, t: &str| parse_real(t).ok_or_else(|| parse_err(line, format!("bad number {t:?}")));
        let idx = |line: usize, t: &str| -> Result<usize> {
            let i: usize = t.parse().map_err(|_| parse_err(line, format!("bad index {t:?}")))?;
            if i >= d {
                return Err(parse_err(line, format!("index {i} out of range")));
            }
            Ok(i)
        };
        match width {
            3 => {
                let mut amps = vec![C0; d];
                for (line, r) in rows {
                    if r.len() != 3 {
                        return Err(parse_err(line, "expected `i re im`"));
                    }
                    amps[idx(line, r[0])?] = Complex64::new(num(line, r[1])?, num(line, r[2])?);
                }
                PureState::new(fact, amps).map(QuantumState::Pure)
            }
            4 => {
                let mut m = CMatrix::zeros(d);
                for (line, r) in rows {
                    if r.len() != 4 {
                        return Err(parse_err(line, "expected `i j re im`"));
                    }
                    m.set(idx(line, r[0])?, idx(line, r[1])?, Complex64::new(num(line, r[2])?, num(line, r[3])?));
                }
                DensityMatrix::new(fact, m).map(QuantumState::Mixed)
            }
            _ => Err(parse_err(rows[0].0, "expected `i re im` or `i j re im` rows")),
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            QuantumState::Pure(s) => s.to_text(),
            QuantumState::Mixed(r) => r.to_text(),
        }
    }
}

/// Seeded mixture of 2 to 4 random pure states with random convex weights.
pub fn random_density<R: Rng>(rng: &mut R, fact: HilbertFactorization) -> Result<DensityMatrix> {
    let terms = rng.random_range(2..=4);
    let weights: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let d = fact.total();
    let mut m = CMatrix::zeros(d);
    for w in weights {
        let psi = PureState::random(rng, fact.clone())?;
        for i in 0..d {
            for j in 0..d {
                m.data[i * d + j] += psi.amps[i] * psi.amps[j].conj() * (w / total);
            }
        }
    }
    DensityMatrix::new(fact, m)
}

/// `ρ_A ⊗ ρ_B` on the concatenated party systems.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    let labels = a.system().labels().iter().chain(b.system().labels()).cloned();
    let dims = a.fact.dims().iter().chain(b.fact.dims()).copied().collect();
    let fact = HilbertFactorization::new(PartySystem::new(labels)?, dims)?;
    DensityMatrix::new(fact, a.matrix.kron(&b.matrix))
}

/// Convenience seeded RNG used by the random-state helpers.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generalised Pauli shift `X|j⟩ = |j+1⟩` and clock `Z|j⟩ = ω^j |j⟩`.
pub fn weyl_operators(d: usize) -> Result<(CMatrix, CMatrix)> {
    if d < 2 {
        return Err(Error::InvalidArgument("Weyl operators need d >= 2".into()));
    }
    let omega = Complex64::from_polar(1.0, 2.0 * PI / d as f64);
    let x = CMatrix::from_fn(d, |i, j| if i == (j + 1) % d { C1 } else { C0 });
    let z = CMatrix::from_fn(d, |i, j| if i == j { omega.powu(i as u32) } else { C0 });
    if z.mul(&x).max_diff(&x.mul(&z).scale(omega)) > 1e-12 {
        return Err(Error::Invariant("ZX != ω XZ".into()));
    }
    Ok((x, z))
}

/// A monomial operator `|j⟩ -> coeff_j |perm_j⟩`.
struct Monomial {
    perm: Vec<usize>,
    coeff: Vec<Complex64>,
}

impl Monomial {
    fn identity(d: usize) -> Self {
        Monomial {
            perm: (0..d).collect(),
            coeff: vec![C1; d],
        }
    }

    /// `self ∘ other`.
    fn after(&self, other: &Monomial) -> Monomial {
        let perm = other.perm.iter().map(|&j| self.perm[j]).collect();
        let coeff = (0..other.perm.len())
            .map(|j| other.coeff[j] * self.coeff[other.perm[j]])
            .collect();
        Monomial { perm, coeff }
    }
}

/// `⊗_q X^{x_q} Z^{z_q}` with a factor `i` per qubit carrying both `X` and
/// `Z` when `p = 2`, so that every generator is Hermitian.
fn pauli_monomial(p: u64, x: &[u64], z: &[u64]) -> Monomial {
    let n = x.len();
    let pu = p as usize;
    let d = pu.pow(n as u32);
    let omega = Complex64::from_polar(1.0, 2.0 * PI / p as f64);
    let mut global = C1;
    if p == 2 {
        for q in 0..n {
            if x[q] == 1 && z[q] == 1 {
                global *= Complex64::i();
            }
        }
    }
    let mut perm = vec![0; d];
    let mut coeff = vec![C0; d];
    for j in 0..d {
        let (mut rest, mut target, mut radix, mut phase) = (j, 0, 1, 0u64);
        for q in (0..n).rev() {
            let digit = (rest % pu) as u64;
            rest /= pu;
            phase = (phase + z[q] * digit) % p;
            target += ((digit + x[q]) % p) as usize * radix;
            radix *= pu;
        }
        perm[j] = target;
        coeff[j] = global * omega.powu(phase as u32);
    }
    Monomial { perm, coeff }
}

/// Normalised projector onto the joint eigenspace where generator `i` has
/// eigenvalue `ω^{phases[i]}`, with its rank.
pub fn stabiliser_projector(group: &StabiliserGroup, phases: &[u64]) -> Result<(DensityMatrix, usize)> {
    let p = group.prime();
    if phases.len() != group.k() {
        return Err(Error::InvalidArgument(format!(
            "{} phases for {} generators",
            phases.len(),
            group.k()
        )));
    }
    let dims: Vec<usize> = group
        .qudit_counts()
        .iter()
        .map(|&c| (p as usize).checked_pow(c as u32).unwrap_or(usize::MAX))
        .collect();
    let fact = HilbertFactorization::new(group.system().clone(), dims)?;
    let d = fact.total();
    let omega = Complex64::from_polar(1.0, 2.0 * PI / p as f64);
    let mut proj = CMatrix::identity(d);
    for (g, &e) in group.generators().iter().zip(phases) {
        let step = pauli_monomial(p, g.x(), g.z());
        let lambda_bar = omega.powu((e % p) as u32).conj();
        let mut next = CMatrix::zeros(d);
        let mut power = Monomial::identity(d);
        for k in 0..p {
            let scale = lambda_bar.powu(k as u32) / p as f64;
            for j in 0..d {
                let (row, c) = (power.perm[j], power.coeff[j] * scale);
                for col in 0..d {
                    let v = proj.data[j * d + col];
                    if v != C0 {
                        next.data[row * d + col] += c * v;
                    }
                }
            }
            power = step.after(&power);
        }
        proj = next;
    }
    let defect = proj.hermiticity_defect();
    if defect > 1e-9 {
        return Err(Error::NotHermitian(defect));
    }
    let tr = proj.trace().re;
    if tr < 0.5 {
        return Err(Error::InconsistentPhases);
    }
    let rank = tr.round() as usize;
    let rho = proj.scale(Complex64::new(1.0 / tr, 0.0));
    Ok((DensityMatrix::unchecked(fact, rho), rank))
}

/// `½|GHZ⟩⟨GHZ| + ¼|1010⟩⟨1010| + ¼|1001⟩⟨1001|` on four qubits `a, b, c, d`.
pub fn quantum_counterexample() -> Result<DensityMatrix> {
    let fact = HilbertFactorization::with_dims(&[2, 2, 2, 2])?;
    let mut m = CMatrix::zeros(16);
    let half = Complex64::new(0.25, 0.0);
    for (i, j) in [(0, 0), (0, 15), (15, 0), (15, 15)] {
        m.set(i, j, half);
    }
    m.set(0b1010, 0b1010, Complex64::new(0.25, 0.0));
    m.set(0b1001, 0b1001, Complex64::new(0.25, 0.0));
    DensityMatrix::new(fact, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ineq;
    use crate::stab::{paper_group, PauliElement, PaperTag};
    use approx::assert_abs_diff_eq;

    fn bell() -> PureState {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(
            HilbertFactorization::with_dims(&[2, 2]).unwrap(),
            vec![Complex64::new(s, 0.0), C0, C0, Complex64::new(s, 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn bell_pair_marginals() {
        let rho = bell().density().unwrap();
        let a = rho.partial_trace(Subset::singleton(0)).unwrap();
        assert!(a.matrix().max_diff(&CMatrix::identity(2).scale(Complex64::new(0.5, 0.0))) < 1e-15);
        assert_eq!(rho.partial_trace(rho.system().full()).unwrap(), rho);
        assert!(rho.partial_trace(Subset::EMPTY).is_err());
        let v = bell().entropy_vector().unwrap();
        assert_abs_diff_eq!(v.bits(Subset::singleton(0)), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.bits(Subset::singleton(1)), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.bits(Subset::from_bits(3)), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn entropies_of_simple_spectra() {
        let pure = bell().density().unwrap();
        assert_abs_diff_eq!(pure.von_neumann_entropy().unwrap(), 0.0, epsilon = 1e-12);
        let fact = HilbertFactorization::with_dims(&[3]).unwrap();
        let mixed = DensityMatrix::new(fact, CMatrix::identity(3).scale(Complex64::new(1.0 / 3.0, 0.0))).unwrap();
        assert_abs_diff_eq!(mixed.von_neumann_entropy().unwrap(), 3f64.log2(), epsilon = 1e-12);
        let ce = quantum_counterexample().unwrap();
        assert_abs_diff_eq!(ce.von_neumann_entropy().unwrap(), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn jacobi_reconstructs_complex_matrix() {
        let mut rng = seeded_rng(3);
        let fact = HilbertFactorization::with_dims(&[2, 3]).unwrap();
        let rho = random_density(&mut rng, fact).unwrap();
        let (vals, vecs) = rho.matrix().eigh().unwrap();
        let diag = CMatrix::from_fn(6, |i, j| if i == j { Complex64::new(vals[i], 0.0) } else { C0 });
        let back = vecs.mul(&diag).mul(&vecs.adjoint());
        assert!(back.max_diff(rho.matrix()) < 1e-12);
        assert!(vecs.adjoint().mul(&vecs).max_diff(&CMatrix::identity(6)) < 1e-12);
        assert_abs_diff_eq!(vals.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let fact = HilbertFactorization::with_dims(&[2]).unwrap();
        let mut m = CMatrix::identity(2).scale(Complex64::new(0.5, 0.0));
        m.set(0, 1, Complex64::new(0.1, 0.0));
        assert!(matches!(DensityMatrix::new(fact.clone(), m), Err(Error::NotHermitian(_))));
        let neg = CMatrix::from_fn(2, |i, j| if i == j { Complex64::new(if i == 0 { 1.5 } else { -0.5 }, 0.0) } else { C0 });
        assert!(matches!(DensityMatrix::new(fact.clone(), neg), Err(Error::InvalidState(_))));
        assert!(matches!(DensityMatrix::new(fact, CMatrix::identity(2)), Err(Error::InvalidState(_))));
        assert!(HilbertFactorization::with_dims(&[64, 65]).is_err());
    }

    #[test]
    fn weyl_relations() {
        let (x, z) = weyl_operators(2).unwrap();
        assert_eq!(x.get(0, 1), C1);
        assert_abs_diff_eq!(z.get(1, 1).re, -1.0, epsilon = 1e-15);
        let (x, z) = weyl_operators(3).unwrap();
        let id = CMatrix::identity(3);
        assert!(x.mul(&x).mul(&x).max_diff(&id) < 1e-12);
        assert!(z.mul(&z).mul(&z).max_diff(&id) < 1e-12);
        let mut xa = id.clone();
        for a in 0..3 {
            let mut op = xa.clone();
            for b in 0..3 {
                if (a, b) != (0, 0) {
                    assert!(op.trace().norm() < 1e-12);
                }
                op = op.mul(&z);
            }
            xa = xa.mul(&x);
        }
        assert!(weyl_operators(1).is_err());
    }

    #[test]
    fn single_qubit_projector() {
        let g = StabiliserGroup::new(2, &[("a", 1)], vec![PauliElement::from_pauli_string("Z").unwrap()]).unwrap();
        let (rho, rank) = stabiliser_projector(&g, &[0]).unwrap();
        assert_eq!(rank, 1);
        assert_abs_diff_eq!(rho.matrix().get(0, 0).re, 1.0, epsilon = 1e-15);
        let (rho1, _) = stabiliser_projector(&g, &[1]).unwrap();
        assert_abs_diff_eq!(rho1.matrix().get(1, 1).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ghz_projector_and_dropped_generator() {
        let gens = |list: &[&str]| list.iter().map(|s| PauliElement::from_pauli_string(s).unwrap()).collect::<Vec<_>>();
        let parties = [("a", 1), ("b", 1), ("c", 1), ("d", 1)];
        let g = StabiliserGroup::new(2, &parties, gens(&["XXXX", "ZZII", "IZZI", "IIZZ"])).unwrap();
        let (rho, rank) = stabiliser_projector(&g, &[0; 4]).unwrap();
        assert_eq!(rank, 1);
        assert_abs_diff_eq!(rho.matrix().get(0, 15).re, 0.5, epsilon = 1e-12);
        let g3 = StabiliserGroup::new(2, &parties, gens(&["XXXX", "ZZII", "IZZI"])).unwrap();
        assert_eq!(stabiliser_projector(&g3, &[0; 3]).unwrap().1, 2);
        let y = StabiliserGroup::new(2, &[("a", 1)], gens(&["Y"])).unwrap();
        let (rho_y, _) = stabiliser_projector(&y, &[0]).unwrap();
        assert_abs_diff_eq!(rho_y.matrix().get(1, 0).im, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn r2_marginal_on_ab() {
        let g = paper_group(PaperTag::R2).unwrap();
        let (rho, _) = stabiliser_projector(&g, &vec![0; g.k()]).unwrap();
        let ab = rho.partial_trace(g.system().parse_subset("ab").unwrap()).unwrap();
        let vals = ab.matrix().eigenvalues_hermitian().unwrap();
        assert_abs_diff_eq!(vals[3], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[2], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn counterexample_violates_ingleton() {
        let rho = quantum_counterexample().unwrap();
        let v = rho.entropy_vector().unwrap();
        let s = v.system().clone();
        let [a, b, c, d] = [0, 1, 2, 3].map(Subset::singleton);
        let ing = ineq::ingleton(&s, a, b, c, d, false).unwrap().evaluate(&v).unwrap().bits();
        assert_abs_diff_eq!(ing, -(5.0 - 3.0 * 3f64.log2()) / 2.0, epsilon = 1e-9);
    }

    #[test]
    fn purification_reproduces_state() {
        let rho = quantum_counterexample().unwrap();
        let psi = rho.purify().unwrap();
        assert_eq!(psi.factorization().dims(), &[2, 2, 2, 2, 3]);
        let back = psi.density().unwrap().partial_trace(Subset::from_bits(0b1111)).unwrap();
        assert!(back.matrix().max_diff(rho.matrix()) < 1e-9);

        let pure = bell().density().unwrap();
        let p2 = pure.purify().unwrap();
        assert_eq!(p2.factorization().dims(), &[2, 2, 1]);

        let fact = HilbertFactorization::with_dims(&[2]).unwrap();
        let mixed = DensityMatrix::new(fact, CMatrix::identity(2).scale(Complex64::new(0.5, 0.0))).unwrap();
        let v = mixed.purify().unwrap().entropy_vector().unwrap();
        assert_abs_diff_eq!(v.bits(Subset::singleton(0)), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v.bits(Subset::from_bits(3)), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn text_round_trip() {
        let rho = quantum_counterexample().unwrap();
        let back = QuantumState::from_text(&rho.to_text()).unwrap();
        assert_eq!(back, QuantumState::Mixed(rho));
        let psi = QuantumState::from_text("dims: 2 2\n0 1/2 0\n1 1/2 0\n2 1/2 0\n3 -1/2 0\n").unwrap();
        assert!(matches!(psi, QuantumState::Pure(_)));
        assert!(QuantumState::from_text("dims: 2\n0 1 0\n1 1 0\n").is_err());
        assert!(QuantumState::from_text("0 1 0\n").is_err());
    }

    #[test]
    fn complementarity_on_random_pure_states() {
        let mut rng = seeded_rng(11);
        for _ in 0..20 {
            let psi = PureState::random(&mut rng, HilbertFactorization::with_dims(&[2, 3, 2]).unwrap()).unwrap();
            let v = psi.entropy_vector().unwrap();
            for j in v.system().nonempty_subsets() {
                let direct = psi.reduced_entropy(j).unwrap();
                let comp = psi.reduced_entropy(v.system().complement(j)).unwrap();
                assert_abs_diff_eq!(direct, comp, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn product_constructions_satisfy_ingleton() {
        let mut rng = seeded_rng(5);
        for _ in 0..10 {
            let abc = random_density(&mut rng, HilbertFactorization::with_dims(&[2, 2, 2]).unwrap()).unwrap();
            let d = random_density(&mut rng, HilbertFactorization::new(PartySystem::new(["d"]).unwrap(), vec![2]).unwrap()).unwrap();
            let v = tensor(&abc, &d).unwrap().entropy_vector().unwrap();
            for inst in ineq::ingleton_permutations(v.system(), &[0, 1, 2, 3]).unwrap() {
                assert!(inst.evaluate(&v).unwrap().bits() >= -1e-9);
            }
        }
    }
}
