//! Inequality families and satisfaction reports.

use std::collections::HashSet;
use std::fmt;

use num_rational::Rational64;

use crate::entvec::{EntropyVector, Evaluation, LinearFunctional, PartySystem, Subset, Verdict};
use crate::error::{Error, Result};
use crate::numfmt::format_sig;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    NonNeg,
    Ssa,
    Mono,
    Wmo,
    Ingleton,
    Kinser,
    Matus,
    Custom,
}

/// A named inequality `functional >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InequalityInstance {
    pub name: String,
    pub functional: LinearFunctional,
    pub family: Family,
}

impl InequalityInstance {
    pub fn new(name: impl Into<String>, functional: LinearFunctional, family: Family) -> Self {
        InequalityInstance {
            name: name.into(),
            functional,
            family,
        }
    }

    pub fn evaluate(&self, v: &EntropyVector) -> Result<Evaluation> {
        self.functional.evaluate(v)
    }
}

impl fmt::Display for InequalityInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} >= 0", self.name, self.functional)
    }
}

/// Drops zero functionals and keeps the first instance of each functional up to
/// a positive factor.
pub fn dedup(instances: Vec<InequalityInstance>) -> Vec<InequalityInstance> {
    let mut seen = HashSet::new();
    instances
        .into_iter()
        .filter(|i| !i.functional.is_zero() && seen.insert(i.functional.primitive_key()))
        .collect()
}

fn all_subsets(system: &PartySystem) -> impl Iterator<Item = Subset> + Clone {
    (0..=system.full().bits()).map(Subset::from_bits)
}

fn nonneg(system: &PartySystem) -> Vec<InequalityInstance> {
    system
        .nonempty_subsets()
        .map(|a| {
            InequalityInstance::new(
                format!("NN({})", system.render_subset(a)),
                LinearFunctional::entropy(system, a),
                Family::NonNeg,
            )
        })
        .collect()
}

fn pair_family(
    system: &PartySystem,
    family: Family,
    tag: &str,
    f: impl Fn(Subset, Subset) -> LinearFunctional,
) -> Vec<InequalityInstance> {
    let mut out = Vec::new();
    for a in all_subsets(system) {
        for b in all_subsets(system).filter(|b| b.bits() > a.bits()) {
            out.push(InequalityInstance::new(
                format!(
                    "{tag}({};{})",
                    system.render_subset(a),
                    system.render_subset(b)
                ),
                f(a, b),
                family,
            ));
        }
    }
    out
}

fn ssa(system: &PartySystem) -> Vec<InequalityInstance> {
    let s = |j| LinearFunctional::entropy(system, j);
    pair_family(system, Family::Ssa, "SSA", |a, b| {
        s(a) + s(b) - s(a & b) - s(a | b)
    })
}

/// Poly-matroid inequalities: nonnegativity, SSA over all subset pairs and
/// monotonicity over all proper inclusions, deduplicated.
pub fn shannon_family(system: &PartySystem) -> Vec<InequalityInstance> {
    let mut out = nonneg(system);
    out.extend(ssa(system));
    for b in system.nonempty_subsets() {
        for a in system.nonempty_subsets().filter(|a| a.is_subset_of(b) && *a != b) {
            out.push(InequalityInstance::new(
                format!("MO({};{})", system.render_subset(a), system.render_subset(b)),
                LinearFunctional::entropy(system, b) - LinearFunctional::entropy(system, a),
                Family::Mono,
            ));
        }
    }
    dedup(out)
}

/// Poly-quantoid inequalities: nonnegativity, SSA and weak monotonicity over
/// all subset pairs, deduplicated.
pub fn quantum_family(system: &PartySystem) -> Vec<InequalityInstance> {
    let mut out = nonneg(system);
    out.extend(ssa(system));
    let s = |j| LinearFunctional::entropy(system, j);
    out.extend(pair_family(system, Family::Wmo, "WMO", |a, b| {
        s(a) + s(b) - s(a - b) - s(b - a)
    }));
    dedup(out)
}

/// `Ing(AB:CD) = I(A:B|C) + I(A:B|D) + I(C:D) - I(A:B)`. Empty slots are only
/// accepted when `relaxed` is set.
pub fn ingleton(
    system: &PartySystem,
    a: Subset,
    b: Subset,
    c: Subset,
    d: Subset,
    relaxed: bool,
) -> Result<InequalityInstance> {
    if !relaxed && [a, b, c, d].iter().any(|s| s.is_empty()) {
        return Err(Error::InvalidArgument(
            "Ingleton slots must be nonempty unless relaxed".into(),
        ));
    }
    let mi = |x, y, z| LinearFunctional::mutual_information(system, x, y, z);
    let f = mi(a, b, Some(c))? + mi(a, b, Some(d))? + mi(c, d, None)? - mi(a, b, None)?;
    let r = |s| system.render_subset(s);
    let sep = if system.labels().iter().all(|l| l.len() == 1) { "" } else { "," };
    Ok(InequalityInstance::new(
        format!("Ing({}{sep}{}:{}{sep}{})", r(a), r(b), r(c), r(d)),
        f,
        Family::Ingleton,
    ))
}

/// The six distinct Ingleton functionals on four distinct parties.
pub fn ingleton_permutations(
    system: &PartySystem,
    parties: &[usize],
) -> Result<Vec<InequalityInstance>> {
    if parties.len() != 4 {
        return Err(Error::InvalidArgument(format!(
            "Ingleton needs 4 parties, got {}",
            parties.len()
        )));
    }
    if Subset::from_parties(parties.iter().copied()).len() != 4
        || parties.iter().any(|&p| p >= system.len())
    {
        return Err(Error::InvalidArgument("Ingleton parties must be distinct".into()));
    }
    let mut out = Vec::new();
    for perm in permutations(4) {
        let s = |i: usize| Subset::singleton(parties[perm[i]]);
        out.push(ingleton(system, s(0), s(1), s(2), s(3), false)?);
    }
    Ok(dedup(out))
}

/// Ingleton instances over every assignment of parties to four disjoint
/// nonempty blocks (parties may also be left out).
pub fn ingleton_family(system: &PartySystem) -> Vec<InequalityInstance> {
    let n = system.len();
    let mut out = Vec::new();
    let total = 5usize.pow(n as u32);
    for code in 0..total {
        let mut blocks = [Subset::EMPTY; 4];
        let mut c = code;
        for party in 0..n {
            let slot = c % 5;
            c /= 5;
            if slot < 4 {
                blocks[slot] = blocks[slot] | Subset::singleton(party);
            }
        }
        // Ing(AB:CD) is symmetric under A <-> B and C <-> D; keep one ordering.
        let first = |s: Subset| s.parties().next();
        if first(blocks[0]) > first(blocks[1]) || first(blocks[2]) > first(blocks[3]) {
            continue;
        }
        if let Ok(inst) = ingleton(system, blocks[0], blocks[1], blocks[2], blocks[3], false) {
            out.push(inst);
        }
    }
    dedup(out)
}

/// Rewrites a functional on `system` extended by one purifying party (the last
/// party of `f`'s system) as a functional on `system`, using `S(K) = S(K^c)`.
pub fn reduce_purifier(f: &LinearFunctional, system: &PartySystem) -> Result<LinearFunctional> {
    let n = system.len();
    if f.system().len() != n + 1 {
        return Err(Error::SystemMismatch(format!(
            "expected {} parties including the purifier, got {}",
            n + 1,
            f.system().len()
        )));
    }
    let full = system.full();
    Ok(LinearFunctional::from_terms(
        system,
        f.terms().map(|(k, c)| {
            if k.contains(n) {
                (full - (k - Subset::singleton(n)), c)
            } else {
                (k, c)
            }
        }),
    ))
}

/// Ingleton permutations on every four distinct parties of `system` together
/// with a purifying party, rewritten on `system`. For four parties these are the
/// 30 instances invariant under relabeling all five parties of the purification.
pub fn pure_ingleton_family(system: &PartySystem) -> Result<Vec<InequalityInstance>> {
    let extended = system.with_party(&system.fresh_label(&["e", "r", "ref"]))?;
    let m = extended.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << m) {
        if mask.count_ones() != 4 {
            continue;
        }
        let parties: Vec<usize> = Subset::from_bits(mask).parties().collect();
        for inst in ingleton_permutations(&extended, &parties)? {
            let functional = reduce_purifier(&inst.functional, system)?;
            out.push(InequalityInstance::new(inst.name, functional, Family::Ingleton));
        }
    }
    Ok(dedup(out))
}

/// Kinser's functional on the first `n` parties of `system`, read as `1..n`.
pub fn kinser(system: &PartySystem, n: usize) -> Result<InequalityInstance> {
    if n > system.len() {
        return Err(Error::InvalidArgument(format!(
            "Kinser({n}) needs {n} parties, system has {}",
            system.len()
        )));
    }
    kinser_on(system, &(0..n).collect::<Vec<_>>())
}

/// Kinser's functional with party `k` (1-based) played by `order[k-1]`:
/// `I(1:N|3) + H(1N) - H(12) - H(3N) + H(23) + Σ_{k=4..N} I(2:k-1|k)`.
pub fn kinser_on(system: &PartySystem, order: &[usize]) -> Result<InequalityInstance> {
    let n = order.len();
    if n < 4 {
        return Err(Error::InvalidArgument(format!("Kinser needs N >= 4, got {n}")));
    }
    if Subset::from_parties(order.iter().copied()).len() != n
        || order.iter().any(|&p| p >= system.len())
    {
        return Err(Error::InvalidArgument("Kinser parties must be distinct".into()));
    }
    let p = |k: usize| Subset::singleton(order[k - 1]);
    let h = |s| LinearFunctional::entropy(system, s);
    let mut f = LinearFunctional::mutual_information(system, p(1), p(n), Some(p(3)))?
        + h(p(1) | p(n))
        - h(p(1) | p(2))
        - h(p(3) | p(n))
        + h(p(2) | p(3));
    for k in 4..=n {
        f = f + LinearFunctional::mutual_information(system, p(2), p(k - 1), Some(p(k)))?;
    }
    let labels: Vec<&str> = order.iter().map(|&x| system.label(x)).collect();
    Ok(InequalityInstance::new(format!("K[{n}]({})", labels.join(",")), f, Family::Kinser))
}

/// `t·Ing(AB:CD) + I(A:B|D) + t(t+1)/2·[I(B:D|C) + I(C:D|B)]`.
pub fn matus(
    system: &PartySystem,
    t: i64,
    a: Subset,
    b: Subset,
    c: Subset,
    d: Subset,
) -> Result<InequalityInstance> {
    if t < 0 {
        return Err(Error::InvalidArgument(format!("Matus index must be >= 0, got {t}")));
    }
    let mi = |x, y, z| LinearFunctional::mutual_information(system, x, y, z);
    let ing = ingleton(system, a, b, c, d, false)?.functional;
    let tri = Rational64::from_integer(t * (t + 1) / 2);
    let f = ing * t + mi(a, b, Some(d))? + (mi(b, d, Some(c))? + mi(c, d, Some(b))?) * tri;
    let r = |s| system.render_subset(s);
    Ok(InequalityInstance::new(
        format!("Matus[t={t}]({},{},{},{})", r(a), r(b), r(c), r(d)),
        f,
        Family::Matus,
    ))
}

/// `I(A:B) + I(A:CD) + 3I(C:D|A) + I(C:D|B) - 2I(C:D)`.
pub fn zhang_yeung(
    system: &PartySystem,
    a: Subset,
    b: Subset,
    c: Subset,
    d: Subset,
) -> Result<InequalityInstance> {
    let mi = |x, y, z| LinearFunctional::mutual_information(system, x, y, z);
    let f = mi(a, b, None)? + mi(a, c | d, None)? + mi(c, d, Some(a))? * 3 + mi(c, d, Some(b))?
        - mi(c, d, None)? * 2;
    Ok(InequalityInstance::new("ZY", f, Family::Custom))
}

/// `I(A:B|C) + H(F|AC) - I(F:B|C)`, nonnegative on every poly-matroid.
pub fn common_information_lemma(
    system: &PartySystem,
    a: Subset,
    b: Subset,
    c: Subset,
    f: Subset,
) -> Result<InequalityInstance> {
    let func = LinearFunctional::mutual_information(system, a, b, Some(c))?
        + LinearFunctional::conditional_entropy(system, f, a | c)
        - LinearFunctional::mutual_information(system, f, b, Some(c))?;
    Ok(InequalityInstance::new("CI-lemma", func, Family::Custom))
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Margins of a vector against a list of instances.
#[derive(Clone, Debug, PartialEq)]
pub struct SatisfactionReport {
    pub vector_id: String,
    pub margins: Vec<(String, Evaluation)>,
}

pub fn check(
    vector_id: &str,
    v: &EntropyVector,
    instances: &[InequalityInstance],
) -> Result<SatisfactionReport> {
    let margins = instances
        .iter()
        .map(|i| Ok((i.name.clone(), i.evaluate(v)?)))
        .collect::<Result<_>>()?;
    Ok(SatisfactionReport {
        vector_id: vector_id.to_string(),
        margins,
    })
}

impl SatisfactionReport {
    pub fn violated(&self) -> Vec<&(String, Evaluation)> {
        self.margins
            .iter()
            .filter(|(_, m)| m.verdict() == Verdict::Violated)
            .collect()
    }

    pub fn is_satisfied(&self) -> bool {
        self.violated().is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("instance,margin,verdict\n");
        for (name, m) in &self.margins {
            out.push_str(&format!("{},{},{}\n", name, m.render(), m.verdict()));
        }
        out
    }

    pub fn summary(&self) -> String {
        let violated = self.violated();
        let mut out = format!(
            "{}: {} instances, {} violated\n",
            self.vector_id,
            self.margins.len(),
            violated.len()
        );
        for (name, m) in violated {
            match m {
                Evaluation::Exact { .. } => {
                    out.push_str(&format!("  {name}: {} ({} bits)\n", m.render(), format_sig(m.bits(), 12)))
                }
                Evaluation::Bits(_) => out.push_str(&format!("  {name}: {} bits\n", m.render())),
            }
        }
        out
    }
}
