//! Poly-matroids from finite groups, joint distributions and subspaces.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::entvec::{EntropyVector, LinearFunctional, PartySystem, Subset, NUMERIC_TOLERANCE};
use crate::error::{parse_err, Error, Result};
use crate::ineq;
use crate::modp;
use crate::numfmt::{is_prime, parse_rational, rational_to_f64};

pub const MAX_ORDER: usize = 4096;

/// A finite group given by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u16>,
    identity: usize,
    inverses: Vec<u16>,
}

impl FiniteGroup {
    /// Validates closure, identity, inverses and associativity (exhaustive up to
    /// order 64, otherwise 1000 seeded triples).
    pub fn from_table(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n > MAX_ORDER {
            return Err(Error::Group(format!("order must be in 1..={MAX_ORDER}, got {n}")));
        }
        let mut table = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Group(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            for &v in row {
                if v >= n {
                    return Err(Error::Group(format!("entry {v} out of range in row {i}")));
                }
                table.push(v as u16);
            }
        }
        Self::from_flat(n, table)
    }

    fn from_flat(n: usize, table: Vec<u16>) -> Result<Self> {
        let at = |a: usize, b: usize| table[a * n + b] as usize;
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| at(e, g) == g && at(g, e) == g))
            .ok_or_else(|| Error::Group("no identity element".into()))?;
        let mut inverses = vec![0u16; n];
        for g in 0..n {
            let h = (0..n)
                .find(|&h| at(g, h) == identity && at(h, g) == identity)
                .ok_or_else(|| Error::Group(format!("element {g} has no inverse")))?;
            inverses[g] = h as u16;
        }
        let assoc = |a: usize, b: usize, c: usize| at(at(a, b), c) == at(a, at(b, c));
        if n <= 64 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !assoc(a, b, c) {
                            return Err(Error::Group(format!("({a}*{b})*{c} != {a}*({b}*{c})")));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(0);
            for _ in 0..1000 {
                let (a, b, c) = (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0..n));
                if !assoc(a, b, c) {
                    return Err(Error::Group(format!("({a}*{b})*{c} != {a}*({b}*{c})")));
                }
            }
        }
        Ok(FiniteGroup {
            order: n,
            table,
            identity,
            inverses,
        })
    }

    /// Builds the table of `n` elements under `mul`, which must define a group.
    pub fn from_mul(n: usize, mul: impl Fn(usize, usize) -> usize) -> Result<Self> {
        if n == 0 || n > MAX_ORDER {
            return Err(Error::Group(format!("order must be in 1..={MAX_ORDER}, got {n}")));
        }
        let mut table = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let v = mul(a, b);
                if v >= n {
                    return Err(Error::Group(format!("product {a}*{b} out of range")));
                }
                table.push(v as u16);
            }
        }
        Self::from_flat(n, table)
    }

    /// The permutation group generated by `gens` (each a permutation of
    /// `0..degree` in image form). Element 0 is the identity.
    pub fn from_permutations(gens: &[Vec<usize>]) -> Result<Self> {
        let degree = gens.first().map_or(1, Vec::len);
        for g in gens {
            let mut seen = vec![false; degree];
            if g.len() != degree || g.iter().any(|&i| i >= degree || std::mem::replace(&mut seen[i], true)) {
                return Err(Error::Group("generator is not a permutation".into()));
            }
        }
        let compose = |a: &[usize], b: &[usize]| -> Vec<usize> { b.iter().map(|&i| a[i]).collect() };
        let id: Vec<usize> = (0..degree).collect();
        let mut elements = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let next = compose(&elements[i], g);
                if !index.contains_key(&next) {
                    if elements.len() == MAX_ORDER {
                        return Err(Error::Group(format!("group order exceeds {MAX_ORDER}")));
                    }
                    index.insert(next.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(next);
                }
            }
        }
        let n = elements.len();
        Self::from_mul(n, |a, b| index[&compose(&elements[a], &elements[b])])
    }

    pub fn cyclic(n: usize) -> Result<Self> {
        Self::from_mul(n, |a, b| (a + b) % n)
    }

    /// `Z_{n_1} × ... × Z_{n_r}`, element index in mixed radix (first factor fastest).
    pub fn abelian(factors: &[usize]) -> Result<Self> {
        let n: usize = factors.iter().product();
        if factors.contains(&0) || n > MAX_ORDER {
            return Err(Error::Group(format!("order must be in 1..={MAX_ORDER}")));
        }
        Self::from_mul(n, |a, b| {
            let (mut a, mut b, mut out, mut radix) = (a, b, 0, 1);
            for &f in factors {
                out += ((a % f + b % f) % f) * radix;
                a /= f;
                b /= f;
                radix *= f;
            }
            out
        })
    }

    /// `Z_p^k`, element `Σ c_i p^i`.
    pub fn elementary_abelian(p: u64, k: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Self::abelian(&vec![p as usize; k])
    }

    pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> Result<Self> {
        let m = h.order;
        if g.order * m > MAX_ORDER {
            return Err(Error::Group(format!("group order exceeds {MAX_ORDER}")));
        }
        Self::from_mul(g.order * m, |a, b| g.mul(a / m, b / m) * m + h.mul(a % m, b % m))
    }

    pub fn symmetric(n: usize) -> Result<Self> {
        if n <= 1 {
            return Self::cyclic(1);
        }
        let transposition: Vec<usize> = (0..n).map(|i| if i < 2 { 1 - i } else { i }).collect();
        let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        Self::from_permutations(&[transposition, cycle])
    }

    /// Symmetries of the regular `n`-gon, order `2n`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Group("dihedral group needs n >= 3".into()));
        }
        let rotation: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        let reflection: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
        Self::from_permutations(&[rotation, reflection])
    }

    /// `{±1, ±i, ±j, ±k}`, element `2u + s` for unit `u ∈ {1, i, j, k}` and sign bit `s`.
    pub fn quaternion() -> Result<Self> {
        // unit products: (unit, sign) of e_a e_b
        const PROD: [[(usize, usize); 4]; 4] = [
            [(0, 0), (1, 0), (2, 0), (3, 0)],
            [(1, 0), (0, 1), (3, 0), (2, 1)],
            [(2, 0), (3, 1), (0, 1), (1, 0)],
            [(3, 0), (2, 0), (1, 1), (0, 1)],
        ];
        Self::from_mul(8, |a, b| {
            let (u, s) = PROD[a / 2][b / 2];
            2 * u + ((a % 2 + b % 2 + s) % 2)
        })
    }

    /// Upper unitriangular 3x3 matrices over `Z_p`: `(a, b, c)` with
    /// `(a, b, c)(a', b', c') = (a + a', b + b', c + c' + a b')`.
    pub fn heisenberg(p: usize) -> Result<Self> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        let dec = |x: usize| (x % p, x / p % p, x / (p * p));
        Self::from_mul(p * p * p, |x, y| {
            let (a, b, c) = dec(x);
            let (a2, b2, c2) = dec(y);
            (a + a2) % p + (b + b2) % p * p + (c + c2 + a * b2) % p * p * p
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a] as usize
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Sorted elements of the subgroup generated by `gens`.
    pub fn generate(&self, gens: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.order];
        member[self.identity] = true;
        let mut list = vec![self.identity];
        let mut i = 0;
        while i < list.len() {
            let x = list[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !member[y] {
                    member[y] = true;
                    list.push(y);
                }
            }
            i += 1;
        }
        list.sort_unstable();
        list
    }

    pub fn is_subgroup(&self, set: &[usize]) -> bool {
        let mut member = vec![false; self.order];
        for &x in set {
            if x >= self.order {
                return false;
            }
            member[x] = true;
        }
        member[self.identity]
            && set.iter().all(|&a| member[self.inv(a)] && set.iter().all(|&b| member[self.mul(a, b)]))
    }

    /// `Ok` if `h` is normal, otherwise a witness `(g, x)` with `g x g^{-1} ∉ h`.
    pub fn normality_witness(&self, h: &[usize]) -> std::result::Result<(), (usize, usize)> {
        let mut member = vec![false; self.order];
        for &x in h {
            member[x] = true;
        }
        for g in 0..self.order {
            for &x in h {
                if !member[self.mul(self.mul(g, x), self.inv(g))] {
                    return Err((g, x));
                }
            }
        }
        Ok(())
    }

    pub fn is_normal(&self, h: &[usize]) -> bool {
        self.normality_witness(h).is_ok()
    }

    /// Sorted product set `{ab : a ∈ A, b ∈ B}`.
    pub fn product_set(&self, a: &[usize], b: &[usize]) -> Vec<usize> {
        let mut member = vec![false; self.order];
        for &x in a {
            for &y in b {
                member[self.mul(x, y)] = true;
            }
        }
        (0..self.order).filter(|&i| member[i]).collect()
    }

    /// For `Z_p^k` built by [`elementary_abelian`](Self::elementary_abelian):
    /// the sorted elements of the span of `vectors`.
    pub fn span_elementary(&self, p: u64, k: usize, vectors: &[Vec<u64>]) -> Vec<usize> {
        let encode = |v: &[u64]| v.iter().rev().fold(0usize, |acc, &c| acc * p as usize + c as usize);
        let gens: Vec<usize> = vectors.iter().map(|v| encode(v)).collect();
        debug_assert_eq!(self.order, (p as usize).pow(k as u32));
        self.generate(&gens)
    }

    /// Text form: `order: n`, `table:` and `n` rows of indices.
    pub fn to_text(&self) -> String {
        let mut out = format!("order: {}\ntable:\n", self.order);
        for a in 0..self.order {
            let row: Vec<String> = (0..self.order).map(|b| self.mul(a, b).to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

fn sorted_intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j, mut out) = (0, 0, Vec::new());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// `n = p^e` for a prime `p`, if any.
pub fn prime_power(n: usize) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n % d == 0)?;
    let (mut m, mut e) = (n, 0);
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p as u64, e))
}

/// One subgroup per party.
#[derive(Clone, Debug, PartialEq)]
pub struct SubgroupFamily {
    group: Arc<FiniteGroup>,
    system: PartySystem,
    subgroups: Vec<Vec<usize>>,
}

impl SubgroupFamily {
    pub fn new(group: FiniteGroup, system: PartySystem, subgroups: Vec<Vec<usize>>) -> Result<Self> {
        Self::with_shared(Arc::new(group), system, subgroups)
    }

    pub fn with_shared(
        group: Arc<FiniteGroup>,
        system: PartySystem,
        subgroups: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if subgroups.len() != system.len() {
            return Err(Error::Group(format!(
                "{} subgroups for {} parties",
                subgroups.len(),
                system.len()
            )));
        }
        let mut clean = Vec::with_capacity(subgroups.len());
        for (x, mut s) in subgroups.into_iter().enumerate() {
            s.sort_unstable();
            s.dedup();
            if !group.is_subgroup(&s) {
                return Err(Error::Group(format!(
                    "elements given for party {} do not form a subgroup",
                    system.label(x)
                )));
            }
            clean.push(s);
        }
        Ok(SubgroupFamily {
            group,
            system,
            subgroups: clean,
        })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn system(&self) -> &PartySystem {
        &self.system
    }

    pub fn subgroup(&self, party: usize) -> &[usize] {
        &self.subgroups[party]
    }

    /// `G_J = ∩_{x∈J} G_x`, with `G_∅ = G`.
    pub fn intersection(&self, subset: Subset) -> Vec<usize> {
        let mut parties = subset.parties();
        let Some(first) = parties.next() else {
            return (0..self.group.order()).collect();
        };
        parties.fold(self.subgroups[first].clone(), |acc, x| {
            sorted_intersection(&acc, &self.subgroups[x])
        })
    }

    /// `|G_J|`.
    pub fn subgroup_order(&self, subset: Subset) -> usize {
        self.intersection(subset).len()
    }

    /// `H(J) = log2(|G| / |G_J|)`.
    pub fn polymatroid(&self) -> Result<EntropyVector> {
        let g = self.group.order() as f64;
        EntropyVector::bits_from_fn(self.system.clone(), |j| {
            (g / self.subgroup_order(j) as f64).log2()
        })
    }

    /// The same vector in units of `log2 p` when `|G|` is a power of `p`.
    pub fn polymatroid_exact(&self) -> Result<Option<EntropyVector>> {
        let Some((p, e)) = prime_power(self.group.order()) else {
            return Ok(None);
        };
        let v = EntropyVector::exact_from_fn(self.system.clone(), p, |j| {
            let (q, f) = prime_power(self.subgroup_order(j)).unwrap_or((p, 0));
            debug_assert_eq!(q, p);
            Rational64::from_integer(e as i64 - f as i64)
        })?;
        Ok(Some(v))
    }

    /// Exact sign of `f` on the group poly-matroid, compared through products
    /// of subgroup orders.
    pub fn exact_sign(&self, f: &LinearFunctional) -> Result<Ordering> {
        self.system.ensure_same(f.system())?;
        let lcm = f.terms().fold(1i64, |acc, (_, c)| num_integer::lcm(acc, *c.denom()));
        // f(H) = Σ c_J (log|G| - log|G_J|): compare |G|^{Σc} Π|G_J|^{-c_J} with 1.
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        let g = BigUint::from(self.group.order());
        let mut total = 0i64;
        for (j, c) in f.terms() {
            let c = (c * Rational64::from_integer(lcm)).to_integer();
            total += c;
            let order = BigUint::from(self.subgroup_order(j));
            let e = c.unsigned_abs() as u32;
            if c > 0 {
                den *= order.pow(e);
            } else {
                num *= order.pow(e);
            }
        }
        if total > 0 {
            num *= g.pow(total as u32);
        } else {
            den *= g.pow(total.unsigned_abs() as u32);
        }
        Ok(num.cmp(&den))
    }

    /// Joint distribution of the coset variables `X_x = g G_x` for uniform `g`.
    pub fn coset_distribution(&self) -> Result<Distribution> {
        let n = self.group.order();
        let coset_id = |g: usize, h: &[usize]| h.iter().map(|&x| self.group.mul(g, x)).min().unwrap_or(g);
        let mut counts: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
        for g in 0..n {
            let key = self.subgroups.iter().map(|h| coset_id(g, h) as u32).collect();
            *counts.entry(key).or_default() += 1;
        }
        Distribution::new(
            self.system.clone(),
            counts
                .into_iter()
                .map(|(k, c)| (k, Rational64::new(c, n as i64)))
                .collect(),
        )
    }

    /// Adds a party with subgroup `G_A G_B`, which is a subgroup when `G_A`
    /// and `G_B` are normal, and checks the common-information conditions
    /// exactly through subgroup orders.
    pub fn common_information_extension(&self, a: Subset, b: Subset) -> Result<CommonInformation> {
        let ga = self.intersection(a);
        let gb = self.intersection(b);
        for (name, h, s) in [("A", &ga, a), ("B", &gb, b)] {
            if let Err((g, x)) = self.group.normality_witness(h) {
                return Err(Error::NotNormal(format!(
                    "G_{name} for {{{}}}: {g}·{x}·{g}^-1 leaves the subgroup",
                    self.system.render_subset(s)
                )));
            }
        }
        let gz = self.group.product_set(&ga, &gb);
        if !self.group.is_subgroup(&gz) {
            return Err(Error::Invariant("product of normal subgroups is not a subgroup".into()));
        }
        let label = self.system.fresh_label(&["z", "zeta"]);
        let system = self.system.with_party(&label)?;
        let mut subgroups = self.subgroups.clone();
        subgroups.push(gz.clone());
        let extended = SubgroupFamily::with_shared(self.group.clone(), system, subgroups)?;
        let zeta = Subset::singleton(self.system.len());
        let order = |j| extended.subgroup_order(j);
        // H(ζ|A) = 0  ⇔  |G_A ∩ G_ζ| = |G_A|, likewise for B;
        // H(ζ) = I(A:B)  ⇔  |G_A| |G_B| = |G_ζ| |G_A ∩ G_B|.
        let zeta_given_a = order(a | zeta) == order(a);
        let zeta_given_b = order(b | zeta) == order(b);
        let entropy_matches = order(a) * order(b) == order(zeta) * order(a | b);
        Ok(CommonInformation {
            extended,
            zeta,
            zeta_given_a,
            zeta_given_b,
            entropy_matches,
        })
    }
}

/// Result of a common-information extension.
#[derive(Clone, Debug)]
pub struct CommonInformation {
    pub extended: SubgroupFamily,
    pub zeta: Subset,
    pub zeta_given_a: bool,
    pub zeta_given_b: bool,
    pub entropy_matches: bool,
}

impl CommonInformation {
    pub fn holds(&self) -> bool {
        self.zeta_given_a && self.zeta_given_b && self.entropy_matches
    }
}

/// A joint distribution of one discrete variable per party.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    system: PartySystem,
    atoms: Vec<(Vec<u32>, Rational64)>,
}

impl Distribution {
    pub fn new(system: PartySystem, atoms: Vec<(Vec<u32>, Rational64)>) -> Result<Self> {
        let mut total = Rational64::zero();
        for (values, p) in &atoms {
            if values.len() != system.len() {
                return Err(Error::Distribution(format!(
                    "atom has {} values for {} parties",
                    values.len(),
                    system.len()
                )));
            }
            if p.is_negative() {
                return Err(Error::Distribution("negative probability".into()));
            }
            total += p;
        }
        if (rational_to_f64(total) - 1.0).abs() > 1e-12 {
            return Err(Error::Distribution(format!("probabilities sum to {total}")));
        }
        Ok(Distribution { system, atoms })
    }

    /// `c, d` independent uniform bits, `a = c ∨ d`, `b = c ∧ d`.
    pub fn or_and_counterexample() -> Self {
        let q = Rational64::new(1, 4);
        let atoms = [[0, 0, 0, 0], [1, 0, 1, 0], [1, 0, 0, 1], [1, 1, 1, 1]]
            .into_iter()
            .map(|v| (v.to_vec(), q))
            .collect();
        Distribution::new(PartySystem::letters(4).expect("labels"), atoms)
            .expect("valid distribution")
    }

    pub fn system(&self) -> &PartySystem {
        &self.system
    }

    pub fn atoms(&self) -> &[(Vec<u32>, Rational64)] {
        &self.atoms
    }

    /// Marginal on `subset`, keyed by the values of its parties in order.
    pub fn marginal(&self, subset: Subset) -> BTreeMap<Vec<u32>, Rational64> {
        let mut out: BTreeMap<Vec<u32>, Rational64> = BTreeMap::new();
        for (values, p) in &self.atoms {
            let key = subset.parties().map(|x| values[x]).collect();
            *out.entry(key).or_insert_with(Rational64::zero) += p;
        }
        out
    }

    pub fn entropy_bits(&self, subset: Subset) -> f64 {
        self.marginal(subset)
            .values()
            .map(|&p| rational_to_f64(p))
            .filter(|&p| p > 0.0)
            .map(|p| -p * p.log2())
            .sum()
    }

    /// Shannon entropies of all marginals, in bits.
    pub fn polymatroid(&self) -> Result<EntropyVector> {
        EntropyVector::bits_from_fn(self.system.clone(), |j| self.entropy_bits(j))
    }

    /// Text form: `parties: A B ...`, then `atom v_1 ... v_N p/q` lines.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut system = None;
        let mut atoms = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("parties:") {
                system = Some(
                    PartySystem::new(rest.split_whitespace())
                        .map_err(|e| parse_err(line_no, e.to_string()))?,
                );
            } else if let Some(rest) = line.strip_prefix("atom") {
                let sys: &PartySystem = system
                    .as_ref()
                    .ok_or_else(|| parse_err(line_no, "`parties:` must come first"))?;
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != sys.len() + 1 {
                    return Err(parse_err(line_no, format!("expected {} values and a probability", sys.len())));
                }
                let values = toks[..sys.len()]
                    .iter()
                    .map(|t| t.parse::<u32>().map_err(|_| parse_err(line_no, format!("bad value {t:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                let p = parse_rational(toks[sys.len()])
                    .ok_or_else(|| parse_err(line_no, "bad probability"))?;
                atoms.push((values, p));
            } else {
                return Err(parse_err(line_no, "expected `parties:` or `atom`"));
            }
        }
        let system = system.ok_or_else(|| parse_err(0, "missing `parties:`"))?;
        Distribution::new(system, atoms).map_err(|e| parse_err(0, e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("parties: {}\n", self.system.labels().join(" "));
        for (values, p) in &self.atoms {
            let vs: Vec<String> = values.iter().map(u32::to_string).collect();
            out.push_str(&format!("atom {} {}/{}\n", vs.join(" "), p.numer(), p.denom()));
        }
        out
    }
}

/// One subspace of `Z_p^dim` per party, each given by spanning rows.
#[derive(Clone, Debug, PartialEq)]
pub struct SubspaceFamily {
    prime: u64,
    dim: usize,
    system: PartySystem,
    spaces: Vec<Vec<Vec<u64>>>,
}

impl SubspaceFamily {
    pub fn new(prime: u64, dim: usize, system: PartySystem, spaces: Vec<Vec<Vec<u64>>>) -> Result<Self> {
        if !is_prime(prime) || prime >= 1 << 31 {
            return Err(Error::NotPrime(prime));
        }
        if spaces.len() != system.len() {
            return Err(Error::InvalidArgument(format!(
                "{} subspaces for {} parties",
                spaces.len(),
                system.len()
            )));
        }
        let spaces = spaces
            .into_iter()
            .map(|rows| {
                rows.into_iter()
                    .map(|r| {
                        if r.len() == dim {
                            Ok(r.into_iter().map(|v| v % prime).collect())
                        } else {
                            Err(Error::Dimension(format!("row of length {} in dimension {dim}", r.len())))
                        }
                    })
                    .collect::<Result<Vec<Vec<u64>>>>()
            })
            .collect::<Result<_>>()?;
        Ok(SubspaceFamily {
            prime,
            dim,
            system,
            spaces,
        })
    }

    /// Random family with `rows_per_party` uniform spanning vectors each.
    pub fn random<R: Rng>(rng: &mut R, prime: u64, dim: usize, system: PartySystem, max_rows: usize) -> Result<Self> {
        let spaces = (0..system.len())
            .map(|_| {
                let rows = rng.random_range(0..=max_rows);
                (0..rows)
                    .map(|_| (0..dim).map(|_| rng.random_range(0..prime)).collect())
                    .collect()
            })
            .collect();
        Self::new(prime, dim, system, spaces)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn system(&self) -> &PartySystem {
        &self.system
    }

    /// Spanning rows of `Σ_{x∈J} V_x`.
    pub fn span(&self, subset: Subset) -> Vec<Vec<u64>> {
        subset.parties().flat_map(|x| self.spaces[x].iter().cloned()).collect()
    }

    pub fn rank(&self, subset: Subset) -> usize {
        modp::rank(&self.span(subset), self.prime)
    }

    /// `H(J) = dim Σ_{x∈J} V_x`, in units of `log2 p`.
    pub fn polymatroid(&self) -> Result<EntropyVector> {
        EntropyVector::exact_from_fn(self.system.clone(), self.prime, |j| {
            Rational64::from_integer(self.rank(j) as i64)
        })
    }

    /// Adds a party with `V_ζ = V_A ∩ V_B`.
    pub fn common_information_extension(&self, a: Subset, b: Subset) -> Result<SubspaceFamily> {
        let meet = modp::intersection(&self.span(a), &self.span(b), self.dim, self.prime);
        let label = self.system.fresh_label(&["z", "zeta"]);
        let mut spaces = self.spaces.clone();
        spaces.push(meet);
        SubspaceFamily::new(self.prime, self.dim, self.system.with_party(&label)?, spaces)
    }
}

/// Outcome of [`check_common_information`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommonInformationCheck {
    pub holds: bool,
    /// Ingleton instances `Ing(AB:CD)` evaluated on the base vector.
    pub ingleton_checked: usize,
}

/// Verifies `H(ζ|A) = H(ζ|B) = 0` and `H(ζ) = I(A:B)` on `extended`, whose
/// first parties must reproduce `base`. When the conditions hold, every
/// `Ing(AB:CD)` with `C, D` drawn from the remaining parties must be
/// nonnegative on `base`; a violation is reported as an invariant error.
pub fn check_common_information(
    base: &EntropyVector,
    extended: &EntropyVector,
    a: Subset,
    b: Subset,
    zeta: Subset,
) -> Result<CommonInformationCheck> {
    let n = base.system().len();
    let ext = extended.system();
    if ext.len() != n + 1 || zeta != Subset::singleton(n) || ext.labels()[..n] != base.system().labels()[..] {
        return Err(Error::SystemMismatch("extended system must be base plus one party".into()));
    }
    let restricted = extended.restrict(&(0..n).collect::<Vec<_>>())?;
    for j in base.system().nonempty_subsets() {
        let same = match (restricted.exact(j), base.exact(j)) {
            (Some(x), Some(y)) if restricted.scale() == base.scale() => x == y,
            _ => (restricted.bits(j) - base.bits(j)).abs() < NUMERIC_TOLERANCE,
        };
        if !same {
            return Err(Error::SystemMismatch(format!(
                "extension disagrees with base on {}",
                base.system().render_subset(j)
            )));
        }
    }
    let f = |func: LinearFunctional| -> Result<bool> {
        Ok(func.evaluate(extended)?.verdict() == crate::entvec::Verdict::Tight)
    };
    let holds = f(LinearFunctional::conditional_entropy(ext, zeta, a))?
        && f(LinearFunctional::conditional_entropy(ext, zeta, b))?
        && f(LinearFunctional::entropy(ext, zeta)
            - LinearFunctional::mutual_information(ext, a, b, None)?)?;
    let mut checked = 0;
    if holds {
        let rest = base.system().full() - a - b;
        for c in (1..=rest.bits()).map(Subset::from_bits).filter(|c| c.is_subset_of(rest)) {
            for d in (1..=rest.bits()).map(Subset::from_bits).filter(|d| d.is_subset_of(rest - c)) {
                let ing = ineq::ingleton(base.system(), a, b, c, d, false)?;
                let value = ing.evaluate(base)?;
                if !value.is_nonnegative() {
                    return Err(Error::Invariant(format!(
                        "{} = {} despite common information",
                        ing.name,
                        value.render()
                    )));
                }
                checked += 1;
            }
        }
    }
    Ok(CommonInformationCheck {
        holds,
        ingleton_checked: checked,
    })
}

/// A group file: the group table and named subgroups.
pub fn parse_group_file(text: &str) -> Result<SubgroupFamily> {
    let mut order: Option<usize> = None;
    let mut rows: Vec<Vec<usize>> = Vec::new();
    let mut in_table = false;
    let mut labels = Vec::new();
    let mut subgroups = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("order:") {
            let n: usize = rest.trim().parse().map_err(|_| parse_err(line_no, "bad order"))?;
            if n == 0 || n > MAX_ORDER {
                return Err(parse_err(line_no, format!("order must be in 1..={MAX_ORDER}")));
            }
            order = Some(n);
        } else if line == "table:" {
            in_table = true;
        } else if let Some(rest) = line.strip_prefix("subgroup") {
            in_table = false;
            let (label, elems) = rest
                .split_once(':')
                .ok_or_else(|| parse_err(line_no, "expected `subgroup <label>: <indices>`"))?;
            labels.push(label.trim().to_string());
            subgroups.push(
                elems
                    .split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|_| parse_err(line_no, format!("bad index {t:?}"))))
                    .collect::<Result<Vec<_>>>()?,
            );
        } else if in_table {
            rows.push(
                line.split_whitespace()
                    .map(|t| t.parse::<usize>().map_err(|_| parse_err(line_no, format!("bad index {t:?}"))))
                    .collect::<Result<Vec<_>>>()?,
            );
        } else {
            return Err(parse_err(line_no, "unexpected line"));
        }
    }
    let n = order.ok_or_else(|| parse_err(0, "missing `order:`"))?;
    if rows.len() != n {
        return Err(parse_err(0, format!("table has {} rows, expected {n}", rows.len())));
    }
    let group = FiniteGroup::from_table(rows).map_err(|e| parse_err(0, e.to_string()))?;
    let system = PartySystem::new(labels).map_err(|e| parse_err(0, e.to_string()))?;
    SubgroupFamily::new(group, system, subgroups).map_err(|e| parse_err(0, e.to_string()))
}
