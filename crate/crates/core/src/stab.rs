//! Qudit stabiliser groups over Z_p and their exact entropy vectors.
//!
//! Elements are stored as symplectic vectors `(x | z)` in `Z_p^{2n}`; phases
//! are dropped since entropies only depend on the quotient by the centre. For
//! a group with `k` independent commuting generators on `n` qudits, the
//! reduced state on a party set `J` has entropy `n_J - m_J` (in units of
//! `log2 p`), where `p^{m_J}` is the number of group elements supported inside
//! `J` modulo phases.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::entvec::{EntropyVector, ModularPart, PartySystem, Subset};
use crate::error::{parse_err, Error, Result};
use crate::groups::{FiniteGroup, SubgroupFamily, SubspaceFamily};
use crate::modp;
use crate::numfmt::is_prime;
use crate::quantum::DensityMatrix;

pub const MAX_QUDITS: usize = 32;
const RETRY_CAP: usize = 100_000;

/// A generalised Pauli operator `X^x Z^z` modulo phases.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliElement {
    prime: u64,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliElement {
    pub fn new(prime: u64, x: Vec<u64>, z: Vec<u64>) -> Result<Self> {
        if !is_prime(prime) || prime >= 1 << 31 {
            return Err(Error::NotPrime(prime));
        }
        if x.len() != z.len() {
            return Err(Error::Stabiliser(format!(
                "x and z parts differ in length ({} vs {})",
                x.len(),
                z.len()
            )));
        }
        Ok(PauliElement {
            prime,
            x: x.into_iter().map(|v| v % prime).collect(),
            z: z.into_iter().map(|v| v % prime).collect(),
        })
    }

    /// Parses a qubit Pauli string over `I, X, Y, Z`.
    pub fn from_pauli_string(s: &str) -> Result<Self> {
        let mut x = Vec::new();
        let mut z = Vec::new();
        for ch in s.trim().chars() {
            let (a, b) = match ch.to_ascii_uppercase() {
                'I' => (0, 0),
                'X' => (1, 0),
                'Y' => (1, 1),
                'Z' => (0, 1),
                other => {
                    return Err(Error::Stabiliser(format!("bad Pauli letter {other:?}")))
                }
            };
            x.push(a);
            z.push(b);
        }
        Self::new(2, x, z)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[u64] {
        &self.x
    }

    pub fn z(&self) -> &[u64] {
        &self.z
    }

    /// `x·z' - z·x' mod p`; zero iff the operators commute up to phase.
    pub fn symplectic(&self, other: &PauliElement) -> u64 {
        let p = self.prime;
        let mut acc = 0;
        for i in 0..self.n() {
            acc = (acc + self.x[i] * other.z[i] % p + p - self.z[i] * other.x[i] % p) % p;
        }
        acc
    }

    /// The row `(x | z)`.
    pub fn row(&self) -> Vec<u64> {
        self.x.iter().chain(&self.z).copied().collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&v| v == 0)
    }

    pub fn to_pauli_string(&self) -> Option<String> {
        if self.prime != 2 {
            return None;
        }
        Some(
            self.x
                .iter()
                .zip(&self.z)
                .map(|(a, b)| match (a, b) {
                    (0, 0) => 'I',
                    (1, 0) => 'X',
                    (1, 1) => 'Y',
                    _ => 'Z',
                })
                .collect(),
        )
    }
}

/// Outcome of [`StabiliserGroup::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub k: usize,
    pub n: usize,
    /// `|Ĝ| = p^k`.
    pub order_exponent: usize,
    pub maximal: bool,
}

/// A stabiliser group with its qudits grouped into parties.
#[derive(Clone, Debug, PartialEq)]
pub struct StabiliserGroup {
    prime: u64,
    system: PartySystem,
    qudits: Vec<usize>,
    generators: Vec<PauliElement>,
}

impl StabiliserGroup {
    /// `parties` lists `(label, qudit count)` in qudit order. Validates
    /// commutation and independence of the generators.
    pub fn new<S: AsRef<str>>(
        prime: u64,
        parties: &[(S, usize)],
        generators: Vec<PauliElement>,
    ) -> Result<Self> {
        if !is_prime(prime) || prime >= 1 << 31 {
            return Err(Error::NotPrime(prime));
        }
        let system = PartySystem::new(parties.iter().map(|(l, _)| l.as_ref().to_string()))?;
        let qudits: Vec<usize> = parties.iter().map(|(_, c)| *c).collect();
        let n: usize = qudits.iter().sum();
        if n == 0 || n > MAX_QUDITS {
            return Err(Error::Stabiliser(format!("need 1..={MAX_QUDITS} qudits, got {n}")));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.prime != prime || g.n() != n {
                return Err(Error::Stabiliser(format!(
                    "generator {i} is not an element on {n} qudits over Z_{prime}"
                )));
            }
        }
        let group = StabiliserGroup {
            prime,
            system,
            qudits,
            generators,
        };
        group.validate()?;
        Ok(group)
    }

    /// Checks pairwise commutation and independence.
    pub fn validate(&self) -> Result<ValidationReport> {
        let g = &self.generators;
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                if g[i].symplectic(&g[j]) != 0 {
                    return Err(Error::NonCommuting(i, j));
                }
            }
        }
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for (i, gen) in g.iter().enumerate() {
            rows.push(gen.row());
            if modp::rank(&rows, self.prime) != rows.len() {
                return Err(Error::DependentGenerator(i));
            }
        }
        let n = self.n();
        Ok(ValidationReport {
            k: g.len(),
            n,
            order_exponent: g.len(),
            maximal: g.len() == n,
        })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn system(&self) -> &PartySystem {
        &self.system
    }

    pub fn generators(&self) -> &[PauliElement] {
        &self.generators
    }

    /// Qudit count per party.
    pub fn qudit_counts(&self) -> &[usize] {
        &self.qudits
    }

    pub fn n(&self) -> usize {
        self.qudits.iter().sum()
    }

    pub fn k(&self) -> usize {
        self.generators.len()
    }

    pub fn is_maximal(&self) -> bool {
        self.k() == self.n()
    }

    /// Qudit indices owned by the parties in `subset`.
    pub fn qudits_of(&self, subset: Subset) -> Vec<usize> {
        let mut out = Vec::new();
        let mut start = 0;
        for (party, &count) in self.qudits.iter().enumerate() {
            if subset.contains(party) {
                out.extend(start..start + count);
            }
            start += count;
        }
        out
    }

    /// Number of qudits owned by `subset`.
    pub fn local_dimension_exponent(&self, subset: Subset) -> usize {
        subset.parties().map(|x| self.qudits[x]).sum()
    }

    /// Generator matrix restricted to the `x` and `z` columns of `qudits`.
    fn restricted_rows(&self, qudits: &[usize]) -> Vec<Vec<u64>> {
        self.generators
            .iter()
            .map(|g| {
                qudits
                    .iter()
                    .map(|&q| g.x[q])
                    .chain(qudits.iter().map(|&q| g.z[q]))
                    .collect()
            })
            .collect()
    }

    /// Rank of the generator matrix restricted to the qudits of `subset`.
    fn restricted_rank(&self, subset: Subset) -> usize {
        let q = self.qudits_of(subset);
        if q.is_empty() || self.generators.is_empty() {
            return 0;
        }
        modp::rank(&self.restricted_rows(&q), self.prime)
    }

    /// `m` with `|Ĝ_J| = p^m`: the dimension of the space of generator
    /// combinations acting trivially outside `J`.
    pub fn subgroup_order_on(&self, subset: Subset) -> usize {
        self.k() - self.restricted_rank(self.system.complement(subset))
    }

    fn entropy_fn(&self) -> impl Fn(Subset) -> Rational64 + '_ {
        move |j| {
            Rational64::from_integer(
                self.local_dimension_exponent(j) as i64 - self.subgroup_order_on(j) as i64,
            )
        }
    }

    /// Exact entropy vector of the pure stabiliser state, in units of `log2 p`.
    pub fn entropy_vector(&self) -> Result<EntropyVector> {
        if !self.is_maximal() {
            return Err(Error::NotMaximal {
                k: self.k(),
                n: self.n(),
            });
        }
        EntropyVector::exact_from_fn(self.system.clone(), self.prime, self.entropy_fn())?.into_pure()
    }

    /// Entropy vector of the normalised stabiliser code projector, for groups
    /// that need not be maximal.
    pub fn mixed_entropy_vector(&self) -> Result<EntropyVector> {
        EntropyVector::exact_from_fn(self.system.clone(), self.prime, self.entropy_fn())
    }

    /// Splits `S = H - h0` with `H(J) = log |Ĝ| / |Ĝ_{J^c}|` a linear
    /// poly-matroid and `h0(J) = Σ_{x∈J} log d_x` modular.
    pub fn balanced_decomposition(&self) -> Result<BalancedDecomposition> {
        if !self.is_maximal() {
            return Err(Error::NotMaximal {
                k: self.k(),
                n: self.n(),
            });
        }
        let k = self.k();
        let transpose = |rows: Vec<Vec<u64>>| -> Vec<Vec<u64>> {
            let width = rows.first().map_or(0, Vec::len);
            (0..width).map(|c| rows.iter().map(|r| r[c]).collect()).collect()
        };
        // V_x: the span of the columns of the generator matrix on x's qudits,
        // as vectors in the coefficient space Z_p^k ≅ Ĝ.
        let spaces: Vec<Vec<Vec<u64>>> = (0..self.system.len())
            .map(|x| transpose(self.restricted_rows(&self.qudits_of(Subset::singleton(x)))))
            .collect();
        let subspaces = SubspaceFamily::new(self.prime, k, self.system.clone(), spaces)?;
        let h = subspaces.polymatroid()?;
        let h0 = ModularPart::new(
            self.system.clone(),
            self.qudits
                .iter()
                .map(|&c| Rational64::from_integer(c as i64))
                .collect(),
        )?;
        Ok(BalancedDecomposition {
            h,
            h0,
            subspaces,
            group: self.clone(),
        })
    }

    /// Seeded random maximal group: repeatedly draws uniform vectors from the
    /// commutant of the current generators and keeps independent ones.
    pub fn random<S: AsRef<str>>(seed: u64, prime: u64, parties: &[(S, usize)]) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with(&mut rng, prime, parties)
    }

    pub fn random_with<S: AsRef<str>, R: Rng>(
        rng: &mut R,
        prime: u64,
        parties: &[(S, usize)],
    ) -> Result<Self> {
        if !is_prime(prime) || prime >= 1 << 31 {
            return Err(Error::NotPrime(prime));
        }
        let n: usize = parties.iter().map(|(_, c)| c).sum();
        if n == 0 || n > MAX_QUDITS {
            return Err(Error::Stabiliser(format!("need 1..={MAX_QUDITS} qudits, got {n}")));
        }
        let p = prime;
        let mut gens: Vec<PauliElement> = Vec::new();
        let mut rows: Vec<Vec<u64>> = Vec::new();
        let mut attempts = 0;
        while gens.len() < n {
            // ⟨v, g⟩ = v_x·g_z - v_z·g_x as a linear form in v = (v_x | v_z).
            let constraints: Vec<Vec<u64>> = gens
                .iter()
                .map(|g| {
                    g.z.iter()
                        .copied()
                        .chain(g.x.iter().map(|&v| (p - v) % p))
                        .collect()
                })
                .collect();
            let basis = modp::nullspace(&constraints, 2 * n, p);
            loop {
                attempts += 1;
                if attempts > RETRY_CAP {
                    return Err(Error::RetryCap(RETRY_CAP));
                }
                let mut v = vec![0u64; 2 * n];
                for b in &basis {
                    let c = rng.random_range(0..p);
                    for (vi, bi) in v.iter_mut().zip(b) {
                        *vi = (*vi + c * bi) % p;
                    }
                }
                rows.push(v.clone());
                if modp::rank(&rows, p) == rows.len() {
                    gens.push(PauliElement::new(p, v[..n].to_vec(), v[n..].to_vec())?);
                    break;
                }
                rows.pop();
            }
        }
        Self::new(prime, parties, gens)
    }

    /// The CSS state `Σ_{v∈C} |v⟩` of a code `C ⊆ Z_p^n` given by a basis:
    /// `X^c` for each basis vector, `Z^w` for a basis of the dual code.
    pub fn code_state<S: AsRef<str>>(
        prime: u64,
        parties: &[(S, usize)],
        code_basis: &[Vec<u64>],
    ) -> Result<Self> {
        let n: usize = parties.iter().map(|(_, c)| c).sum();
        let mut gens = Vec::new();
        for c in code_basis {
            gens.push(PauliElement::new(prime, c.clone(), vec![0; n])?);
        }
        for w in modp::nullspace(code_basis, n, prime) {
            gens.push(PauliElement::new(prime, vec![0; n], w)?);
        }
        Self::new(prime, parties, gens)
    }

    /// Text form: `prime:`, `parties: label:count ...`, then one
    /// `gen: x ... | z ...` line per generator.
    pub fn to_text(&self) -> String {
        let mut out = format!("prime: {}\nparties:", self.prime);
        for (label, count) in self.system.labels().iter().zip(&self.qudits) {
            out.push_str(&format!(" {label}:{count}"));
        }
        out.push('\n');
        let join = |v: &[u64]| v.iter().map(u64::to_string).collect::<Vec<_>>().join(" ");
        for g in &self.generators {
            out.push_str(&format!("gen: x {} | z {}\n", join(&g.x), join(&g.z)));
        }
        out
    }

    /// Parses [`to_text`](Self::to_text) output. For `prime: 2`, a generator
    /// may also be written as a Pauli string, e.g. `gen: XZZXI`.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut prime: Option<u64> = None;
        let mut parties: Option<Vec<(String, usize)>> = None;
        let mut gens = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| parse_err(line_no, "expected `key: value`"))?;
            let rest = rest.trim();
            match key.trim() {
                "prime" => {
                    let p: u64 = rest.parse().map_err(|_| parse_err(line_no, "bad prime"))?;
                    if !is_prime(p) {
                        return Err(parse_err(line_no, format!("{p} is not prime")));
                    }
                    prime = Some(p);
                }
                "parties" => {
                    let mut list = Vec::new();
                    for tok in rest.split_whitespace() {
                        let (l, c) = tok
                            .rsplit_once(':')
                            .ok_or_else(|| parse_err(line_no, "expected label:count"))?;
                        let c: usize = c.parse().map_err(|_| parse_err(line_no, "bad qudit count"))?;
                        list.push((l.to_string(), c));
                    }
                    parties = Some(list);
                }
                "gen" => {
                    let p = prime.ok_or_else(|| parse_err(line_no, "`prime:` must come first"))?;
                    let g = if let Some((xs, zs)) = rest.split_once('|') {
                        let nums = |s: &str, tag: &str| -> Result<Vec<u64>> {
                            let body = s
                                .trim()
                                .strip_prefix(tag)
                                .ok_or_else(|| parse_err(line_no, format!("expected `{tag}` part")))?;
                            body.split_whitespace()
                                .map(|t| {
                                    t.parse::<u64>()
                                        .map_err(|_| parse_err(line_no, format!("bad entry {t:?}")))
                                })
                                .collect()
                        };
                        PauliElement::new(p, nums(xs, "x")?, nums(zs, "z")?)
                    } else if p == 2 {
                        PauliElement::from_pauli_string(rest)
                    } else {
                        return Err(parse_err(
                            line_no,
                            "Pauli-string generators are only accepted for prime 2",
                        ));
                    };
                    gens.push(g.map_err(|e| parse_err(line_no, e.to_string()))?);
                }
                other => return Err(parse_err(line_no, format!("unknown key {other:?}"))),
            }
        }
        let prime = prime.ok_or_else(|| parse_err(0, "missing `prime:`"))?;
        let parties = parties.ok_or_else(|| parse_err(0, "missing `parties:`"))?;
        Self::new(prime, &parties, gens)
    }
}

impl fmt::Display for StabiliserGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// `S(J) = H(J) - h0(J)` for a pure stabiliser state.
#[derive(Clone, Debug)]
pub struct BalancedDecomposition {
    /// Linear poly-matroid `H(J) = dim Σ_{x∈J} V_x` over `Z_p`.
    pub h: EntropyVector,
    pub h0: ModularPart,
    /// The subspaces `V_x ⊆ Z_p^k` realising `H`.
    pub subspaces: SubspaceFamily,
    group: StabiliserGroup,
}

impl BalancedDecomposition {
    /// The same poly-matroid as a subgroup family of `Ĝ ≅ Z_p^k`, with
    /// `Ĝ_{X\x}` as the subgroup of party `x`. Only available when `p^k`
    /// fits the group-table limit.
    pub fn subgroup_family(&self) -> Result<SubgroupFamily> {
        let g = &self.group;
        let (p, k) = (g.prime, g.k());
        let group = FiniteGroup::elementary_abelian(p, k)?;
        let subgroups = (0..g.system.len())
            .map(|x| {
                // Coefficient vectors c with Σ c_i g_i trivial on x's qudits.
                let rows = g.restricted_rows(&g.qudits_of(Subset::singleton(x)));
                let width = rows.first().map_or(0, Vec::len);
                let cols: Vec<Vec<u64>> = (0..width)
                    .map(|c| rows.iter().map(|r| r[c]).collect())
                    .collect();
                group.span_elementary(p, k, &modp::nullspace(&cols, k, p))
            })
            .collect();
        SubgroupFamily::new(group, g.system.clone(), subgroups)
    }
}

/// Named states used throughout the test suites and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PaperTag {
    R0,
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    QuantumCounterexample,
}

impl PaperTag {
    pub const RAYS: [PaperTag; 7] = [
        PaperTag::R0,
        PaperTag::R1,
        PaperTag::R2,
        PaperTag::R3,
        PaperTag::R4,
        PaperTag::R5,
        PaperTag::R6,
    ];

    /// Column index in the table of extreme rays, for the stabiliser tags.
    pub fn ray_index(self) -> Option<usize> {
        PaperTag::RAYS.iter().position(|&t| t == self)
    }
}

impl FromStr for PaperTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "R0" => PaperTag::R0,
            "R1" => PaperTag::R1,
            "R2" => PaperTag::R2,
            "R3" => PaperTag::R3,
            "R4" => PaperTag::R4,
            "R5" => PaperTag::R5,
            "R6" => PaperTag::R6,
            "quantum_counterexample" => PaperTag::QuantumCounterexample,
            other => return Err(Error::UnknownTag(other.to_string())),
        })
    }
}

impl fmt::Display for PaperTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PaperTag::QuantumCounterexample => f.write_str("quantum_counterexample"),
            other => write!(f, "{other:?}"),
        }
    }
}

#[derive(Clone, Debug)]
pub enum PaperState {
    Stabiliser(StabiliserGroup),
    Density(DensityMatrix),
}

const ABCDE: [(&str, usize); 5] = [("a", 1), ("b", 1), ("c", 1), ("d", 1), ("e", 1)];

pub fn build_paper_state(tag: PaperTag) -> Result<PaperState> {
    let code = |p, parties: &[(&str, usize)], basis: &[&[u64]]| {
        let basis: Vec<Vec<u64>> = basis.iter().map(|b| b.to_vec()).collect();
        StabiliserGroup::code_state(p, parties, &basis).map(PaperState::Stabiliser)
    };
    match tag {
        // Bell pair on ab, |000> on cde.
        PaperTag::R1 => code(2, &ABCDE, &[&[1, 1, 0, 0, 0]]),
        // GHZ on abcd, |0> on e.
        PaperTag::R2 => code(2, &ABCDE, &[&[1, 1, 1, 1, 0]]),
        // Σ_{i,j} |i, j, i+j, i+2j> |0> over Z_3.
        PaperTag::R3 => code(3, &ABCDE, &[&[1, 0, 1, 1, 0], &[0, 1, 1, 2, 0]]),
        PaperTag::R4 => code(2, &ABCDE, &[&[1, 1, 1, 1, 1]]),
        // Qutrits a, b, c', c'', d', d'', e', e''. The ab Bell state indexed by
        // r = (r1, r2) with r copied into c, d and e, after a Fourier transform
        // on c'', d'', e'': Σ |i+r1, i, r1, k1, r1, k2, r1, i-k1-k2>.
        PaperTag::R6 => code(
            3,
            &[("a", 1), ("b", 1), ("c", 2), ("d", 2), ("e", 2)],
            &[
                &[1, 1, 0, 0, 0, 0, 0, 1],
                &[1, 0, 1, 0, 1, 0, 1, 0],
                &[0, 0, 0, 1, 0, 0, 0, 2],
                &[0, 0, 0, 0, 0, 1, 0, 2],
            ],
        ),
        // Qubits a, b, c, d', d'', e', e'': Σ_{i,j} |i, j, i+j, i, j, i, j>.
        PaperTag::R0 => code(
            2,
            &[("a", 1), ("b", 1), ("c", 1), ("d", 2), ("e", 2)],
            &[&[1, 0, 1, 1, 0, 1, 0], &[0, 1, 1, 0, 1, 0, 1]],
        ),
        // Qubit a' maximally entangled with the logical qubit of the
        // five-qubit code on a'', b, c, d, e.
        PaperTag::R5 => {
            let gens = [
                "IXZZXI", "IIXZZX", "IXIXZZ", "IZXIXZ", "XXXXXX", "ZZZZZZ",
            ]
            .iter()
            .map(|s| PauliElement::from_pauli_string(s))
            .collect::<Result<Vec<_>>>()?;
            StabiliserGroup::new(
                2,
                &[("a", 2), ("b", 1), ("c", 1), ("d", 1), ("e", 1)],
                gens,
            )
            .map(PaperState::Stabiliser)
        }
        PaperTag::QuantumCounterexample => {
            crate::quantum::quantum_counterexample().map(PaperState::Density)
        }
    }
}

/// The stabiliser group for one of the `R*` tags.
pub fn paper_group(tag: PaperTag) -> Result<StabiliserGroup> {
    match build_paper_state(tag)? {
        PaperState::Stabiliser(g) => Ok(g),
        PaperState::Density(_) => Err(Error::UnknownTag(format!("{tag} is not a stabiliser state"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ineq;
    use proptest::prelude::*;

    fn paulis(list: &[&str]) -> Vec<PauliElement> {
        list.iter().map(|s| PauliElement::from_pauli_string(s).unwrap()).collect()
    }

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    #[test]
    fn bell_group_is_valid_and_maximal() {
        let g = StabiliserGroup::new(2, &[("a", 1), ("b", 1)], paulis(&["XX", "ZZ"])).unwrap();
        let rep = g.validate().unwrap();
        assert!(rep.maximal);
        assert_eq!(rep.order_exponent, 2);
        assert_eq!(g.subgroup_order_on(Subset::singleton(0)), 0);
        assert_eq!(g.subgroup_order_on(g.system().full()), 2);
        let v = g.entropy_vector().unwrap();
        assert_eq!(v.exact(Subset::singleton(0)), Some(r(1)));
        assert_eq!(v.exact(Subset::from_bits(3)), Some(r(0)));
    }

    #[test]
    fn anticommuting_generators_are_rejected() {
        let err = StabiliserGroup::new(2, &[("a", 1)], paulis(&["X", "Z"])).unwrap_err();
        assert_eq!(err, Error::NonCommuting(0, 1));
    }

    #[test]
    fn dependent_generators_are_rejected() {
        let err = StabiliserGroup::new(2, &[("a", 1), ("b", 1)], paulis(&["XX", "XX"])).unwrap_err();
        assert_eq!(err, Error::DependentGenerator(1));
    }

    #[test]
    fn ghz4_is_not_maximal_until_completed() {
        let parties = ABCDE;
        let g = StabiliserGroup::new(2, &parties, paulis(&["XXXXI", "ZZIII", "IZZII", "IIZZI"])).unwrap();
        assert!(!g.validate().unwrap().maximal);
        assert!(matches!(g.entropy_vector(), Err(Error::NotMaximal { k: 4, n: 5 })));
        let full = StabiliserGroup::new(
            2,
            &parties,
            paulis(&["XXXXI", "ZZIII", "IZZII", "IIZZI", "IIIIZ"]),
        )
        .unwrap();
        let ab = full.system().parse_subset("ab").unwrap();
        assert_eq!(full.subgroup_order_on(ab), 1);
        assert_eq!(full.entropy_vector().unwrap().exact(ab), Some(r(1)));
    }

    #[test]
    fn product_state_has_zero_entropy() {
        let g = StabiliserGroup::new(2, &ABCDE, paulis(&["ZIIII", "IZIII", "IIZII", "IIIZI", "IIIIZ"])).unwrap();
        let v = g.entropy_vector().unwrap();
        assert!(g.system().nonempty_subsets().all(|j| v.exact(j) == Some(r(0))));
        let d = g.balanced_decomposition().unwrap();
        for j in g.system().nonempty_subsets() {
            assert_eq!(d.h.exact(j), Some(d.h0.rank(j)));
        }
    }

    #[test]
    fn r2_decomposition_values() {
        let g = paper_group(PaperTag::R2).unwrap();
        let d = g.balanced_decomposition().unwrap();
        let ab = g.system().parse_subset("ab").unwrap();
        assert_eq!(d.h.exact(ab), Some(r(3)));
        assert_eq!(d.h0.rank(ab), r(2));
        assert_eq!(g.entropy_vector().unwrap().exact(ab), Some(r(1)));
    }

    #[test]
    fn text_round_trip_and_shorthand() {
        for tag in PaperTag::RAYS {
            let g = paper_group(tag).unwrap();
            let back = StabiliserGroup::from_text(&g.to_text()).unwrap();
            assert_eq!(back, g, "{tag}");
        }
        let g = StabiliserGroup::from_text("prime: 2\nparties: a:1 b:1\ngen: XX\ngen: ZZ # bell\n").unwrap();
        assert!(g.is_maximal());
        assert!(StabiliserGroup::from_text("prime: 3\nparties: a:1\ngen: Z\n").is_err());
        assert!(StabiliserGroup::from_text("prime: 4\nparties: a:1\n").is_err());
    }

    #[test]
    fn single_qubit_random_groups_cover_three_directions() {
        let mut seen = std::collections::HashSet::new();
        for seed in 0..64 {
            let g = StabiliserGroup::random(seed, 2, &[("a", 1)]).unwrap();
            seen.insert(g.generators()[0].to_pauli_string().unwrap());
        }
        let expected: std::collections::HashSet<String> =
            ["X", "Y", "Z"].iter().map(|s| s.to_string()).collect();
        assert_eq!(seen, expected);
    }

    #[test]
    fn random_groups_are_deterministic() {
        let parties = [("a", 2), ("b", 1), ("c", 3)];
        let g1 = StabiliserGroup::random(7, 3, &parties).unwrap();
        let g2 = StabiliserGroup::random(7, 3, &parties).unwrap();
        assert_eq!(g1, g2);
        assert!(g1.is_maximal());
    }

    #[test]
    fn unknown_tag() {
        assert!(matches!("R7".parse::<PaperTag>(), Err(Error::UnknownTag(_))));
    }

    fn arb_group() -> impl Strategy<Value = StabiliserGroup> {
        (any::<u64>(), prop_oneof![Just(2u64), Just(3u64)], proptest::collection::vec(0usize..3, 5))
            .prop_filter("need a qudit", |(_, _, c)| c.iter().sum::<usize>() > 0)
            .prop_map(|(seed, p, counts)| {
                let parties: Vec<(String, usize)> = counts
                    .iter()
                    .enumerate()
                    .map(|(i, &c)| (((b'a' + i as u8) as char).to_string(), c))
                    .collect();
                StabiliserGroup::random(seed, p, &parties).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn pure_vectors_are_complementary(g in arb_group()) {
            let v = g.entropy_vector().unwrap();
            prop_assert!(v.is_pure());
        }

        #[test]
        fn decomposition_identity(g in arb_group()) {
            let v = g.entropy_vector().unwrap();
            let d = g.balanced_decomposition().unwrap();
            for j in g.system().nonempty_subsets() {
                prop_assert_eq!(v.exact(j).unwrap(), d.h.exact(j).unwrap() - d.h0.rank(j));
            }
        }

        #[test]
        fn balanced_functionals_see_only_the_polymatroid_part(g in arb_group()) {
            let v = g.entropy_vector().unwrap();
            let d = g.balanced_decomposition().unwrap();
            let s = g.system();
            for inst in ineq::ingleton_family(s) {
                let on_s = inst.evaluate(&v).unwrap();
                let on_h = inst.evaluate(&d.h).unwrap();
                prop_assert_eq!(on_s, on_h);
                prop_assert!(on_s.is_nonnegative());
            }
        }
    }
}
