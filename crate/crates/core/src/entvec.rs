//! Party systems, subset bitmasks, entropy vectors and linear entropy functionals.
//!
//! An [`EntropyVector`] holds one value per nonempty subset of an `N`-party
//! system. Values are either exact rational multiples of `log2 p` for a single
//! prime `p` (stabiliser states, linear and `p`-group poly-matroids) or floats
//! in bits. A [`LinearFunctional`] assigns a rational coefficient to each
//! subset and is the common currency for every inequality in [`crate::ineq`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, BitAnd, BitOr, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::error::{parse_err, Error, Result};
use crate::numfmt::{format_sig, parse_exact, rational_to_f64, render_exact};

pub const MAX_PARTIES: usize = 8;

/// Tolerance, in bits, for sign decisions on floating-point entropy vectors.
pub const NUMERIC_TOLERANCE: f64 = 1e-9;

/// A set of parties, encoded as a bitmask over party positions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subset(u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_bits(bits: u32) -> Self {
        Subset(bits)
    }

    pub const fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(party: usize) -> Self {
        Subset(1 << party)
    }

    pub fn from_parties<I: IntoIterator<Item = usize>>(parties: I) -> Self {
        Subset(parties.into_iter().fold(0, |acc, p| acc | (1 << p)))
    }

    pub fn contains(self, party: usize) -> bool {
        self.0 >> party & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_disjoint(self, other: Subset) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Party positions in increasing order.
    pub fn parties(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits >> i & 1 == 1)
    }

    /// Image under the party map `i -> perm[i]`.
    pub fn permuted(self, perm: &[usize]) -> Subset {
        Subset::from_parties(self.parties().map(|p| perm[p]))
    }
}

impl BitOr for Subset {
    type Output = Subset;
    fn bitor(self, rhs: Subset) -> Subset {
        Subset(self.0 | rhs.0)
    }
}

impl BitAnd for Subset {
    type Output = Subset;
    fn bitand(self, rhs: Subset) -> Subset {
        Subset(self.0 & rhs.0)
    }
}

/// Set difference.
impl Sub for Subset {
    type Output = Subset;
    fn sub(self, rhs: Subset) -> Subset {
        Subset(self.0 & !rhs.0)
    }
}

/// An ordered list of party labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartySystem {
    labels: Vec<String>,
}

impl PartySystem {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() || labels.len() > MAX_PARTIES {
            return Err(Error::InvalidParties(format!(
                "need 1..={MAX_PARTIES} parties, got {}",
                labels.len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || l.chars().any(|c| c.is_whitespace() || c == ',') {
                return Err(Error::InvalidParties(format!("bad label {l:?}")));
            }
            if labels[..i].contains(l) {
                return Err(Error::InvalidParties(format!("duplicate label {l:?}")));
            }
        }
        Ok(PartySystem { labels })
    }

    /// Parties `a, b, c, ...`.
    pub fn letters(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| ((b'a' + i as u8) as char).to_string()))
    }

    /// Parties `1, 2, ..., n`.
    pub fn numbered(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, party: usize) -> &str {
        &self.labels[party]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn full(&self) -> Subset {
        Subset((1u32 << self.len()) - 1)
    }

    /// Number of coordinates of an entropy vector: `2^N - 1`.
    pub fn dimension(&self) -> usize {
        (1usize << self.len()) - 1
    }

    pub fn complement(&self, subset: Subset) -> Subset {
        self.full() - subset
    }

    /// All nonempty subsets in bitmask order.
    pub fn nonempty_subsets(&self) -> impl Iterator<Item = Subset> {
        (1..=self.full().0).map(Subset)
    }

    /// Nonempty subsets ordered by size, then bitmask.
    pub fn subsets_by_size(&self) -> Vec<Subset> {
        let mut all: Vec<Subset> = self.nonempty_subsets().collect();
        all.sort_by_key(|s| (s.len(), s.0));
        all
    }

    pub fn contains_subset(&self, subset: Subset) -> bool {
        subset.is_subset_of(self.full())
    }

    fn single_char_labels(&self) -> bool {
        self.labels.iter().all(|l| l.chars().count() == 1)
    }

    /// Renders a subset as the concatenation of its labels in party order.
    /// Multi-character labels are joined with `.` to keep the rendering
    /// unambiguous.
    pub fn render_subset(&self, subset: Subset) -> String {
        if subset.is_empty() {
            return "{}".into();
        }
        let names: Vec<&str> = subset.parties().map(|p| self.label(p)).collect();
        if self.single_char_labels() {
            names.concat()
        } else {
            names.join(".")
        }
    }

    pub fn parse_subset(&self, text: &str) -> Result<Subset> {
        let text = text.trim();
        if text.is_empty() || text == "{}" || text == "∅" {
            return Ok(Subset::EMPTY);
        }
        let lookup = |name: &str| {
            self.index_of(name)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown party {name:?}")))
        };
        let mut out = Subset::EMPTY;
        if self.single_char_labels() && !text.contains('.') {
            for ch in text.chars() {
                out = out | Subset::singleton(lookup(&ch.to_string())?);
            }
        } else {
            for name in text.split('.') {
                out = out | Subset::singleton(lookup(name.trim())?);
            }
        }
        Ok(out)
    }

    /// The system extended by one more party.
    pub fn with_party(&self, label: &str) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.push(label.to_string());
        Self::new(labels)
    }

    /// A label not yet used, preferring the candidates in order.
    pub fn fresh_label(&self, candidates: &[&str]) -> String {
        for c in candidates {
            if self.index_of(c).is_none() {
                return c.to_string();
            }
        }
        let mut i = 0;
        loop {
            let l = format!("x{i}");
            if self.index_of(&l).is_none() {
                return l;
            }
            i += 1;
        }
    }

    pub(crate) fn ensure_same(&self, other: &PartySystem) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SystemMismatch(format!(
                "{:?} vs {:?}",
                self.labels, other.labels
            )))
        }
    }
}

impl fmt::Display for PartySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels.join(","))
    }
}

/// Units of an entropy vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scale {
    /// Stored rationals are multiples of `log2 p`.
    ExactLog(u64),
    /// Stored floats are bits.
    Bits,
}

#[derive(Clone, Debug, PartialEq)]
enum Data {
    Exact(u64, Vec<Rational64>),
    Bits(Vec<f64>),
}

/// Entropies of all subsets of a party system. Index 0 (the empty set) is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyVector {
    system: PartySystem,
    data: Data,
    pure: bool,
}

impl EntropyVector {
    pub fn from_exact(system: PartySystem, prime: u64, mut values: Vec<Rational64>) -> Result<Self> {
        if !crate::numfmt::is_prime(prime) {
            return Err(Error::NotPrime(prime));
        }
        check_len(&system, values.len())?;
        values[0] = Rational64::zero();
        Ok(EntropyVector {
            system,
            data: Data::Exact(prime, values),
            pure: false,
        })
    }

    pub fn exact_from_fn(
        system: PartySystem,
        prime: u64,
        f: impl Fn(Subset) -> Rational64,
    ) -> Result<Self> {
        let values = (0..=system.full().0)
            .map(|m| if m == 0 { Rational64::zero() } else { f(Subset(m)) })
            .collect();
        Self::from_exact(system, prime, values)
    }

    pub fn from_bits(system: PartySystem, mut values: Vec<f64>) -> Result<Self> {
        check_len(&system, values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite entropy value".into()));
        }
        values[0] = 0.0;
        Ok(EntropyVector {
            system,
            data: Data::Bits(values),
            pure: false,
        })
    }

    pub fn bits_from_fn(system: PartySystem, f: impl Fn(Subset) -> f64) -> Result<Self> {
        let values = (0..=system.full().0)
            .map(|m| if m == 0 { 0.0 } else { f(Subset(m)) })
            .collect();
        Self::from_bits(system, values)
    }

    pub fn zero(system: PartySystem, scale: Scale) -> Result<Self> {
        let len = 1usize << system.len();
        match scale {
            Scale::ExactLog(p) => Self::from_exact(system, p, vec![Rational64::zero(); len]),
            Scale::Bits => Self::from_bits(system, vec![0.0; len]),
        }
    }

    pub fn system(&self) -> &PartySystem {
        &self.system
    }

    pub fn scale(&self) -> Scale {
        match self.data {
            Data::Exact(p, _) => Scale::ExactLog(p),
            Data::Bits(_) => Scale::Bits,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.data, Data::Exact(..))
    }

    /// Exact value in units of `log2 p`, if the vector is exact.
    pub fn exact(&self, subset: Subset) -> Option<Rational64> {
        match &self.data {
            Data::Exact(_, v) => Some(v[subset.0 as usize]),
            Data::Bits(_) => None,
        }
    }

    /// All exact values indexed by bitmask.
    pub fn exact_values(&self) -> Option<&[Rational64]> {
        match &self.data {
            Data::Exact(_, v) => Some(v),
            Data::Bits(_) => None,
        }
    }

    /// Value in bits.
    pub fn bits(&self, subset: Subset) -> f64 {
        match &self.data {
            Data::Exact(p, v) => rational_to_f64(v[subset.0 as usize]) * (*p as f64).log2(),
            Data::Bits(v) => v[subset.0 as usize],
        }
    }

    pub fn to_bits(&self) -> EntropyVector {
        let values = (0..=self.system.full().0)
            .map(|m| self.bits(Subset(m)))
            .collect();
        EntropyVector {
            system: self.system.clone(),
            data: Data::Bits(values),
            pure: self.pure,
        }
    }

    /// Whether the vector was declared pure.
    pub fn is_pure(&self) -> bool {
        self.pure
    }

    /// Largest `|S(J) - S(J^c)|` in bits.
    pub fn complementarity_defect(&self) -> f64 {
        self.system
            .nonempty_subsets()
            .map(|j| (self.bits(j) - self.bits(self.system.complement(j))).abs())
            .fold(0.0, f64::max)
    }

    /// Declares the vector pure after checking `S(J) = S(J^c)` for every `J`
    /// (exactly, or within [`NUMERIC_TOLERANCE`]).
    pub fn into_pure(mut self) -> Result<Self> {
        let ok = match &self.data {
            Data::Exact(_, v) => self
                .system
                .nonempty_subsets()
                .all(|j| v[j.0 as usize] == v[self.system.complement(j).0 as usize]),
            Data::Bits(_) => self.complementarity_defect() < NUMERIC_TOLERANCE,
        };
        if !ok {
            return Err(Error::Invariant(
                "vector violates S(J) = S(J^c); not pure".into(),
            ));
        }
        self.pure = true;
        Ok(self)
    }

    /// The vector restricted to the listed parties, which become parties
    /// `0..parties.len()` of the new system, in the given order.
    pub fn restrict(&self, parties: &[usize]) -> Result<EntropyVector> {
        let labels: Vec<&str> = parties
            .iter()
            .map(|&p| {
                if p < self.system.len() {
                    Ok(self.system.label(p))
                } else {
                    Err(Error::InvalidArgument(format!("party {p} out of range")))
                }
            })
            .collect::<Result<_>>()?;
        let sub = PartySystem::new(labels)?;
        let lift = |s: Subset| Subset::from_parties(s.parties().map(|i| parties[i]));
        match &self.data {
            Data::Exact(p, v) => {
                EntropyVector::exact_from_fn(sub, *p, |s| v[lift(s).0 as usize])
            }
            Data::Bits(v) => EntropyVector::bits_from_fn(sub, |s| v[lift(s).0 as usize]),
        }
    }

    /// The vector `w` with `w(perm(J)) = v(J)`, on the same system.
    pub fn permuted(&self, perm: &[usize]) -> EntropyVector {
        let n = self.system.full().0 as usize + 1;
        let mut data = self.data.clone();
        match (&self.data, &mut data) {
            (Data::Exact(_, src), Data::Exact(_, dst)) => {
                for m in 0..n {
                    dst[Subset(m as u32).permuted(perm).0 as usize] = src[m];
                }
            }
            (Data::Bits(src), Data::Bits(dst)) => {
                for m in 0..n {
                    dst[Subset(m as u32).permuted(perm).0 as usize] = src[m];
                }
            }
            _ => unreachable!(),
        }
        EntropyVector {
            system: self.system.clone(),
            data,
            pure: self.pure,
        }
    }

    /// Entrywise sum; both vectors must share system and scale.
    pub fn try_add(&self, other: &EntropyVector) -> Result<EntropyVector> {
        self.system.ensure_same(&other.system)?;
        let data = match (&self.data, &other.data) {
            (Data::Exact(p, a), Data::Exact(q, b)) if p == q => {
                Data::Exact(*p, a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (Data::Bits(a), Data::Bits(b)) => {
                Data::Bits(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            _ => {
                return Err(Error::ScaleMismatch(format!(
                    "{:?} vs {:?}",
                    self.scale(),
                    other.scale()
                )))
            }
        };
        Ok(EntropyVector {
            system: self.system.clone(),
            data,
            pure: false,
        })
    }

    /// CSV rendering: header `party_system,<labels>`, then `subset,value,scale`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("party_system,{}\n", self.system.labels().join(","));
        for j in self.system.subsets_by_size() {
            let (value, scale) = match &self.data {
                Data::Exact(p, v) => (render_exact(v[j.0 as usize], *p), "exact"),
                Data::Bits(v) => (format_sig(v[j.0 as usize], 12), "bits"),
            };
            out.push_str(&format!(
                "{},{},{}\n",
                self.system.render_subset(j),
                value,
                scale
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<EntropyVector> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
        let labels = header
            .strip_prefix("party_system,")
            .ok_or_else(|| parse_err(hline, "expected `party_system,<labels>` header"))?;
        let system = PartySystem::new(labels.split(',').map(str::trim))
            .map_err(|e| parse_err(hline, e.to_string()))?;
        let len = 1usize << system.len();
        let mut exact: Vec<Option<Rational64>> = vec![None; len];
        let mut floats: Vec<Option<f64>> = vec![None; len];
        let mut prime: Option<u64> = None;
        let mut any_bits = false;
        for (line, row) in lines {
            let fields: Vec<&str> = row.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(parse_err(line, "expected `subset,value,scale`"));
            }
            let subset = system
                .parse_subset(fields[0])
                .map_err(|e| parse_err(line, e.to_string()))?;
            let idx = subset.0 as usize;
            if idx != 0 && (exact[idx].is_some() || floats[idx].is_some()) {
                return Err(parse_err(line, format!("duplicate subset {}", fields[0])));
            }
            match fields[2] {
                "exact" => {
                    let (r, p) = parse_exact(fields[1])
                        .ok_or_else(|| parse_err(line, "bad exact value, expected p/q*log2(r)"))?;
                    if *prime.get_or_insert(p) != p {
                        return Err(parse_err(line, "mixed primes in one vector"));
                    }
                    floats[idx] = Some(rational_to_f64(r) * (p as f64).log2());
                    exact[idx] = Some(r);
                }
                "bits" => {
                    let x: f64 = fields[1]
                        .parse()
                        .map_err(|_| parse_err(line, "bad float value"))?;
                    any_bits = true;
                    floats[idx] = Some(x);
                }
                other => return Err(parse_err(line, format!("unknown scale {other:?}"))),
            }
            if idx == 0 && floats[0] != Some(0.0) {
                return Err(parse_err(line, "empty set must have entropy 0"));
            }
        }
        if let Some(missing) = (1..len).find(|&m| floats[m].is_none()) {
            return Err(parse_err(
                0,
                format!("missing subset {}", system.render_subset(Subset(missing as u32))),
            ));
        }
        match (any_bits, prime) {
            (false, Some(p)) => EntropyVector::from_exact(
                system,
                p,
                exact.into_iter().map(|v| v.unwrap_or_default()).collect(),
            ),
            _ => EntropyVector::from_bits(
                system,
                floats.into_iter().map(|v| v.unwrap_or(0.0)).collect(),
            ),
        }
    }
}

fn check_len(system: &PartySystem, len: usize) -> Result<()> {
    if len != 1 << system.len() {
        return Err(Error::InvalidArgument(format!(
            "expected {} values (including the empty set), got {len}",
            1usize << system.len()
        )));
    }
    Ok(())
}

/// Outcome of evaluating a functional on a vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Evaluation {
    /// `value * log2(prime)`.
    Exact { value: Rational64, prime: u64 },
    Bits(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Satisfied,
    /// Exactly zero, or within the numeric tolerance of zero.
    Tight,
    Violated,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Tight => "tight",
            Verdict::Violated => "violated",
        })
    }
}

impl Evaluation {
    pub fn bits(&self) -> f64 {
        match *self {
            Evaluation::Exact { value, prime } => rational_to_f64(value) * (prime as f64).log2(),
            Evaluation::Bits(x) => x,
        }
    }

    pub fn verdict(&self) -> Verdict {
        match *self {
            Evaluation::Exact { value, .. } => {
                if value.is_positive() {
                    Verdict::Satisfied
                } else if value.is_zero() {
                    Verdict::Tight
                } else {
                    Verdict::Violated
                }
            }
            Evaluation::Bits(x) => {
                if x >= NUMERIC_TOLERANCE {
                    Verdict::Satisfied
                } else if x > -NUMERIC_TOLERANCE {
                    Verdict::Tight
                } else {
                    Verdict::Violated
                }
            }
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.verdict() != Verdict::Violated
    }

    pub fn render(&self) -> String {
        match *self {
            Evaluation::Exact { value, prime } => render_exact(value, prime),
            Evaluation::Bits(x) => format_sig(x, 12),
        }
    }
}

/// `f(S) = Σ_J c_J S(J)`; coefficient of the empty set is always zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearFunctional {
    system: PartySystem,
    coeffs: BTreeMap<Subset, Rational64>,
}

impl LinearFunctional {
    pub fn zero(system: &PartySystem) -> Self {
        LinearFunctional {
            system: system.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn term(system: &PartySystem, subset: Subset, coeff: Rational64) -> Self {
        let mut f = Self::zero(system);
        f.add_term(subset, coeff);
        f
    }

    /// `S(J)`.
    pub fn entropy(system: &PartySystem, subset: Subset) -> Self {
        Self::term(system, subset, Rational64::from_integer(1))
    }

    /// `S(F ∪ G) - S(G)`.
    pub fn conditional_entropy(system: &PartySystem, f: Subset, given: Subset) -> Self {
        Self::entropy(system, f | given) - Self::entropy(system, given)
    }

    /// `I(A:B)`, or `I(A:B|C)` when `c` is given. Requires pairwise disjoint sets.
    pub fn mutual_information(
        system: &PartySystem,
        a: Subset,
        b: Subset,
        c: Option<Subset>,
    ) -> Result<Self> {
        let c = c.unwrap_or(Subset::EMPTY);
        for s in [a, b, c] {
            if !system.contains_subset(s) {
                return Err(Error::InvalidArgument("subset outside the system".into()));
            }
        }
        if !a.is_disjoint(b) || !a.is_disjoint(c) || !b.is_disjoint(c) {
            return Err(Error::Overlap(format!(
                "I({}:{}|{})",
                system.render_subset(a),
                system.render_subset(b),
                system.render_subset(c)
            )));
        }
        Ok(Self::entropy(system, a | c) + Self::entropy(system, b | c)
            - Self::entropy(system, a | b | c)
            - Self::entropy(system, c))
    }

    /// Builds a functional from `(subset, coefficient)` pairs.
    pub fn from_terms(
        system: &PartySystem,
        terms: impl IntoIterator<Item = (Subset, Rational64)>,
    ) -> Self {
        let mut f = Self::zero(system);
        for (s, c) in terms {
            f.add_term(s, c);
        }
        f
    }

    fn add_term(&mut self, subset: Subset, coeff: Rational64) {
        if subset.is_empty() || coeff.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(subset).or_insert_with(Rational64::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.coeffs.remove(&subset);
        }
    }

    pub fn system(&self) -> &PartySystem {
        &self.system
    }

    pub fn coeff(&self, subset: Subset) -> Rational64 {
        self.coeffs.get(&subset).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Subset, Rational64)> + '_ {
        self.coeffs.iter().map(|(s, c)| (*s, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn support_size(&self) -> usize {
        self.coeffs.len()
    }

    pub fn evaluate(&self, v: &EntropyVector) -> Result<Evaluation> {
        self.system.ensure_same(&v.system)?;
        Ok(match &v.data {
            Data::Exact(p, vals) => Evaluation::Exact {
                value: self
                    .terms()
                    .map(|(s, c)| c * vals[s.0 as usize])
                    .fold(Rational64::zero(), |a, b| a + b),
                prime: *p,
            },
            Data::Bits(vals) => Evaluation::Bits(
                self.terms()
                    .map(|(s, c)| rational_to_f64(c) * vals[s.0 as usize])
                    .sum(),
            ),
        })
    }

    /// Per-party column sums `Σ_{J ∋ x} c_J`.
    pub fn balance(&self) -> Balance {
        let defects = (0..self.system.len())
            .map(|x| {
                self.terms()
                    .filter(|(s, _)| s.contains(x))
                    .map(|(_, c)| c)
                    .fold(Rational64::zero(), |a, b| a + b)
            })
            .collect();
        Balance { defects }
    }

    pub fn is_balanced(&self) -> bool {
        self.balance().is_balanced()
    }

    /// Relabels parties by `i -> perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> LinearFunctional {
        Self::from_terms(&self.system, self.terms().map(|(s, c)| (s.permuted(perm), c)))
    }

    /// The same functional on another system with the same number of parties.
    pub fn on_system(&self, system: &PartySystem) -> Result<LinearFunctional> {
        if system.len() != self.system.len() {
            return Err(Error::SystemMismatch("party counts differ".into()));
        }
        Ok(LinearFunctional {
            system: system.clone(),
            coeffs: self.coeffs.clone(),
        })
    }

    /// Coefficients scaled to coprime integers with the same sign pattern.
    /// Equal keys mean the functionals agree up to a positive factor.
    pub fn primitive_key(&self) -> Vec<(Subset, i64)> {
        let lcm = self
            .coeffs
            .values()
            .fold(1i64, |acc, c| num_integer::lcm(acc, *c.denom()));
        let ints: Vec<(Subset, i64)> = self
            .terms()
            .map(|(s, c)| (s, (c * Rational64::from_integer(lcm)).to_integer()))
            .collect();
        let g = ints
            .iter()
            .fold(0i64, |acc, (_, c)| num_integer::gcd(acc, *c))
            .max(1);
        ints.into_iter().map(|(s, c)| (s, c / g)).collect()
    }

    /// Dense coefficient vector over the nonempty subsets in bitmask order.
    pub fn dense(&self) -> Vec<Rational64> {
        self.system
            .nonempty_subsets()
            .map(|s| self.coeff(s))
            .collect()
    }
}

impl Add for LinearFunctional {
    type Output = LinearFunctional;
    /// Panics if the party systems differ.
    fn add(mut self, rhs: LinearFunctional) -> LinearFunctional {
        assert_eq!(self.system, rhs.system, "adding functionals on different systems");
        for (s, c) in rhs.coeffs {
            self.add_term(s, c);
        }
        self
    }
}

impl Sub for LinearFunctional {
    type Output = LinearFunctional;
    fn sub(self, rhs: LinearFunctional) -> LinearFunctional {
        self + (-rhs)
    }
}

impl Neg for LinearFunctional {
    type Output = LinearFunctional;
    fn neg(mut self) -> LinearFunctional {
        for c in self.coeffs.values_mut() {
            *c = -*c;
        }
        self
    }
}

impl Mul<Rational64> for LinearFunctional {
    type Output = LinearFunctional;
    fn mul(self, k: Rational64) -> LinearFunctional {
        if k.is_zero() {
            return LinearFunctional::zero(&self.system);
        }
        LinearFunctional {
            coeffs: self.coeffs.into_iter().map(|(s, c)| (s, c * k)).collect(),
            system: self.system,
        }
    }
}

impl Mul<i64> for LinearFunctional {
    type Output = LinearFunctional;
    fn mul(self, k: i64) -> LinearFunctional {
        self * Rational64::from_integer(k)
    }
}

impl fmt::Display for LinearFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut terms: Vec<(Subset, Rational64)> = self.terms().collect();
        terms.sort_by_key(|(s, _)| (s.len(), s.0));
        for (i, (s, c)) in terms.into_iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            if mag != Rational64::from_integer(1) {
                write!(f, "{mag}*")?;
            }
            write!(f, "S({})", self.system.render_subset(s))?;
        }
        Ok(())
    }
}

/// Per-party coefficient sums of a functional.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Balance {
    pub defects: Vec<Rational64>,
}

impl Balance {
    pub fn is_balanced(&self) -> bool {
        self.defects.iter().all(Zero::is_zero)
    }
}

/// Modular rank function `h0(J) = Σ_{x∈J} w_x`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModularPart {
    system: PartySystem,
    weights: Vec<Rational64>,
}

impl ModularPart {
    pub fn new(system: PartySystem, weights: Vec<Rational64>) -> Result<Self> {
        if weights.len() != system.len() {
            return Err(Error::InvalidArgument("one weight per party required".into()));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidArgument("weights must be nonnegative".into()));
        }
        Ok(ModularPart { system, weights })
    }

    pub fn system(&self) -> &PartySystem {
        &self.system
    }

    pub fn weights(&self) -> &[Rational64] {
        &self.weights
    }

    pub fn rank(&self, subset: Subset) -> Rational64 {
        subset
            .parties()
            .map(|x| self.weights[x])
            .fold(Rational64::zero(), |a, b| a + b)
    }

    /// The induced vector, with weights read in units of `log2 prime`.
    pub fn to_vector(&self, prime: u64) -> Result<EntropyVector> {
        EntropyVector::exact_from_fn(self.system.clone(), prime, |s| self.rank(s))
    }
}
