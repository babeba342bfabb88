//! Reproduction criteria, each checked against an oracle written here rather
//! than in the library. Prints one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qentropy::cone::{self, RationalCone};
use qentropy::entvec::{EntropyVector, PartySystem, Subset};
use qentropy::groups::{Distribution, FiniteGroup, SubgroupFamily};
use qentropy::ineq;
use qentropy::quantum::{self, HilbertFactorization, PureState};
use qentropy::stab::{self, PaperTag, StabiliserGroup};

const SEED: u64 = 0;

/// Display rows: singletons and pairs of five parties, the fifth purifying the rest.
const ROWS: [&str; 15] = [
    "a", "b", "c", "d", "e", "ab", "ac", "ad", "ae", "bc", "bd", "be", "cd", "ce", "de",
];

/// Published orbit representatives, one column per ray, in `ROWS` order.
const COLUMNS: [[i64; 15]; 7] = [
    [1, 1, 1, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2, 2],
    [1, 1, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 0, 0, 0],
    [1, 1, 1, 1, 0, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
    [1, 1, 1, 1, 0, 2, 2, 2, 1, 2, 2, 1, 2, 1, 1],
    [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
    [2, 1, 1, 1, 1, 3, 3, 3, 3, 2, 2, 2, 2, 2, 2],
    [1, 1, 2, 2, 2, 2, 3, 3, 3, 3, 3, 3, 2, 2, 2],
];

type Check = Result<(bool, String), String>;

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("extreme rays of the quantum Ingleton cone", table_rays),
        ("witness states realise the rays", witness_states),
        ("projector entropies match symplectic entropies", projector_cross_check),
        ("random stabiliser states satisfy rank inequalities", random_stabilisers),
        ("Ingleton violation, classical and quantum", ingleton_violation),
        ("purification and pure-state identities", pure_states),
        ("SSA and WMO on random mixed states", mixed_states),
        ("Kinser(4) is a relabeled Ingleton", kinser_four),
        ("group poly-matroids are coset entropies", coset_entropies),
        ("common information for normal subgroups", common_information),
        ("double description matches brute force", dd_oracle),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (passed, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !passed {
            failed += 1;
        }
        println!(
            "{} [{}] {name}: {detail} ({:.2}s)",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", criteria.len());
        ExitCode::FAILURE
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

// ---------------------------------------------------------------------------
// Subset helpers and functional builders. Party i is bit i.

fn mask_of(label: &str) -> u32 {
    label.bytes().map(|c| 1u32 << (c - b'a')).sum()
}

/// Coefficients of `I(x:y|z)` as (mask, coeff) terms; the empty set has value 0.
fn cmi(x: u32, y: u32, z: u32) -> Vec<(u32, i64)> {
    vec![(x | z, 1), (y | z, 1), (x | y | z, -1), (z, -1)]
}

/// `I(a:b|c) + I(a:b|d) + I(c:d) - I(a:b)` on single parties.
fn ingleton_terms(a: usize, b: usize, c: usize, d: usize) -> Vec<(u32, i64)> {
    let [a, b, c, d] = [a, b, c, d].map(|p| 1u32 << p);
    let mut t = cmi(a, b, c);
    t.extend(cmi(a, b, d));
    t.extend(cmi(c, d, 0));
    t.extend(cmi(a, b, 0).into_iter().map(|(m, c)| (m, -c)));
    t
}

fn eval_f64(terms: &[(u32, i64)], h: impl Fn(u32) -> f64) -> f64 {
    terms.iter().filter(|t| t.0 != 0).map(|&(m, c)| c as f64 * h(m)).sum()
}

fn eval_exact(terms: &[(u32, i64)], h: impl Fn(u32) -> Rational64) -> Rational64 {
    terms
        .iter()
        .filter(|t| t.0 != 0)
        .map(|&(m, c)| h(m) * c)
        .fold(Rational64::zero(), |a, b| a + b)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn permute_mask(mask: u32, perm: &[usize]) -> u32 {
    (0..perm.len()).filter(|&i| mask >> i & 1 == 1).map(|i| 1u32 << perm[i]).sum()
}

/// Every ordered choice of 4 distinct parties out of `n`.
fn ordered_quadruples(n: usize) -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    if BTreeSet::from([a, b, c, d]).len() == 4 {
                        out.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Exact rank over the rationals and over F_p.

fn big_rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = &m[r][col] / &m[rank][col];
                for c in col..ncols {
                    let v = &m[rank][c] * &f;
                    m[r][c] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn int_rows(rows: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect()
}

fn rank_mod(rows: &[Vec<u64>], p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let ncols = m.first().map_or(0, Vec::len);
    let inv = |x: u64| (1..p).find(|y| x * y % p == 1).expect("nonzero");
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else { continue };
        m.swap(rank, piv);
        let s = inv(m[rank][col]);
        for c in 0..ncols {
            m[rank][c] = m[rank][c] * s % p;
        }
        for r in 0..m.len() {
            if r != rank && m[r][col] != 0 {
                let f = m[r][col];
                for c in 0..ncols {
                    m[r][c] = (m[r][c] + p * p - f * m[rank][c]) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

// ---------------------------------------------------------------------------
// 1. Extreme rays.

/// 4-party vector (index `mask - 1`) as a pure function on five parties.
fn purify4(v: &[i64]) -> impl Fn(u32) -> i64 + '_ {
    move |k: u32| {
        let j = if k & 16 == 0 { k } else { !k & 15 };
        if j == 0 { 0 } else { v[j as usize - 1] }
    }
}

/// Constraints of the cone, written on the pure 5-party function: all elementary
/// SSA instances and all Ingleton instances on four of the five parties.
fn pure_constraints() -> Vec<Vec<(u32, i64)>> {
    let mut out = Vec::new();
    for i in 0..5 {
        for j in i + 1..5 {
            let rest = 31 & !(1 << i | 1 << j);
            for k in 0..32u32 {
                if k & !rest == 0 {
                    out.push(cmi(1 << i, 1 << j, k));
                }
            }
        }
    }
    for [a, b, c, d] in ordered_quadruples(5) {
        out.push(ingleton_terms(a, b, c, d));
    }
    out
}

/// A 5-party constraint as a row over the 15 coordinates of a 4-party vector.
fn to_row4(terms: &[(u32, i64)]) -> Vec<i64> {
    let mut row = vec![0i64; 15];
    for &(k, c) in terms {
        let j = if k & 16 == 0 { k } else { !k & 15 };
        if j != 0 {
            row[j as usize - 1] += c;
        }
    }
    row
}

fn display_column(w: &dyn Fn(u32) -> i64) -> Vec<i64> {
    ROWS.iter().map(|r| w(mask_of(r))).collect()
}

/// Lexicographically largest display column over all relabelings of the five parties.
fn canonical_column(w: &dyn Fn(u32) -> i64, perms: &[Vec<usize>]) -> (Vec<i64>, usize) {
    let images: BTreeSet<Vec<i64>> = perms
        .iter()
        .map(|p| {
            let wp = |k: u32| w(permute_mask(k, p));
            display_column(&wp)
        })
        .collect();
    (images.iter().next_back().cloned().expect("nonempty"), images.len())
}

fn table_rays() -> Check {
    let rays = cone::build_quantum_ingleton_cone(4).map_err(err)?.extreme_rays().map_err(err)?;
    let constraints = pure_constraints();
    let rows: Vec<Vec<i64>> = constraints.iter().map(|t| to_row4(t)).collect();
    let perms = permutations(5);
    let mut classes: BTreeMap<Vec<i64>, (usize, usize)> = BTreeMap::new();
    for ray in &rays {
        let w = purify4(ray);
        let values: Vec<i64> = rows.iter().map(|r| r.iter().zip(ray).map(|(a, b)| a * b).sum()).collect();
        if values.iter().any(|&x| x < 0) {
            return Ok((false, format!("ray {ray:?} violates a constraint")));
        }
        let tight: Vec<Vec<i64>> =
            rows.iter().zip(&values).filter(|(_, &x)| x == 0).map(|(r, _)| r.clone()).collect();
        if big_rank(&int_rows(&tight)) != 14 {
            return Ok((false, format!("ray {ray:?} is not extreme")));
        }
        let (canon, size) = canonical_column(&w, &perms);
        classes.entry(canon).or_insert((0, size)).0 += 1;
    }
    let expected: BTreeSet<Vec<i64>> = COLUMNS
        .iter()
        .map(|col| {
            let w = |k: u32| {
                let t = if k.count_ones() <= 2 { k } else { 31 & !k };
                ROWS.iter().position(|r| mask_of(r) == t).map_or(0, |i| col[i])
            };
            canonical_column(&w, &perms).0
        })
        .collect();
    let found: BTreeSet<Vec<i64>> = classes.keys().cloned().collect();
    let complete = classes.values().all(|&(count, size)| count == size);
    let sizes: Vec<usize> = classes.values().map(|c| c.1).collect();
    let passed = found == expected && complete;
    Ok((
        passed,
        format!(
            "{} rays in {} orbits of relabelings of a..e (sizes {sizes:?}), table columns matched: {}",
            rays.len(),
            classes.len(),
            found == expected
        ),
    ))
}

// ---------------------------------------------------------------------------
// 2-4. Stabiliser states.

/// Entropy of every subset, in units of `log p`, from the generator matrix:
/// S(J) = |J| - #independent stabilisers supported on J.
fn stabiliser_entropies(g: &StabiliserGroup) -> Vec<i64> {
    let n = g.n();
    let p = g.prime();
    let counts = g.qudit_counts();
    let mut owner = Vec::new();
    for (party, &c) in counts.iter().enumerate() {
        owner.extend(std::iter::repeat_n(party, c));
    }
    let full = (1u32 << counts.len()) - 1;
    (1..=full)
        .map(|j| {
            let outside: Vec<usize> = (0..n).filter(|&q| j >> owner[q] & 1 == 0).collect();
            let rows: Vec<Vec<u64>> = g
                .generators()
                .iter()
                .map(|e| outside.iter().flat_map(|&q| [e.x()[q], e.z()[q]]).collect())
                .collect();
            let inside = (n - outside.len()) as i64;
            let restricted = if outside.is_empty() { 0 } else { rank_mod(&rows, p) };
            let supported = g.k() as i64 - restricted as i64;
            inside - supported
        })
        .collect()
}

fn exact_units(v: &EntropyVector) -> Result<Vec<Rational64>, String> {
    v.system()
        .nonempty_subsets()
        .map(|s| v.exact(s).ok_or_else(|| "vector is not exact".to_string()))
        .collect()
}

fn witness_states() -> Check {
    let mut bad = Vec::new();
    for (idx, tag) in PaperTag::RAYS.into_iter().enumerate() {
        let g = stab::paper_group(tag).map_err(err)?;
        let prime = if matches!(tag, PaperTag::R3 | PaperTag::R6) { 3 } else { 2 };
        let lib = exact_units(&g.entropy_vector().map_err(err)?)?;
        let oracle = stabiliser_entropies(&g);
        let column: Vec<i64> = ROWS.iter().map(|r| oracle[mask_of(r) as usize - 1]).collect();
        let agree = lib.iter().zip(&oracle).all(|(a, &b)| *a == Rational64::from_integer(b));
        if g.prime() != prime || !agree || column != COLUMNS[idx] {
            bad.push(tag.to_string());
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { "R0-R6 exact".into() } else { format!("mismatch: {bad:?}") }))
}

fn projector_cross_check() -> Check {
    let mut worst: f64 = 0.0;
    let mut checked = Vec::new();
    for tag in PaperTag::RAYS {
        let g = stab::paper_group(tag).map_err(err)?;
        if (g.prime() as usize).pow(g.n() as u32) > 256 {
            continue;
        }
        let (rho, rank) = quantum::stabiliser_projector(&g, &vec![0; g.k()]).map_err(err)?;
        if rank != 1 {
            return Ok((false, format!("{tag}: projector rank {rank}")));
        }
        let dense = rho.entropy_vector().map_err(err)?;
        let log_p = (g.prime() as f64).log2();
        for (s, units) in dense.system().nonempty_subsets().zip(stabiliser_entropies(&g)) {
            worst = worst.max((dense.bits(s) - units as f64 * log_p).abs());
        }
        checked.push(tag.to_string());
    }
    Ok((worst <= 1e-9, format!("{} checked, max deviation {worst:.2e} bits", checked.join(" "))))
}

fn random_stabilisers() -> Check {
    let system = PartySystem::letters(5).map_err(err)?;
    let mut library = ineq::ingleton_family(&system);
    for order in ineq::permutations(5) {
        library.push(ineq::kinser_on(&system, &order).map_err(err)?);
        library.push(ineq::kinser_on(&system, &order[..4]).map_err(err)?);
        let s: Vec<Subset> = order[..4].iter().map(|&x| Subset::singleton(x)).collect();
        for t in 0..=3 {
            library.push(ineq::matus(&system, t, s[0], s[1], s[2], s[3]).map_err(err)?);
        }
    }
    let library = ineq::dedup(library);
    let ingletons: Vec<Vec<(u32, i64)>> =
        ordered_quadruples(5).into_iter().map(|[a, b, c, d]| ingleton_terms(a, b, c, d)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut negative = 0;
    let mut mismatched = 0;
    for i in 0..300 {
        let p = if i % 2 == 0 { 2 } else { 3 };
        let mut counts = [1usize; 5];
        for _ in 0..rng.random_range(0..=5) {
            counts[rng.random_range(0..5)] += 1;
        }
        let parties: Vec<(&str, usize)> = ["a", "b", "c", "d", "e"].into_iter().zip(counts).collect();
        let g = StabiliserGroup::random_with(&mut rng, p, &parties).map_err(err)?;
        let v = g.entropy_vector().map_err(err)?;
        let oracle = stabiliser_entropies(&g);
        if exact_units(&v)?.iter().zip(&oracle).any(|(a, &b)| *a != Rational64::from_integer(b)) {
            mismatched += 1;
        }
        let h = |m: u32| Rational64::from_integer(oracle[m as usize - 1]);
        negative += ingletons.iter().filter(|t| eval_exact(t, h) < Rational64::zero()).count();
        for inst in &library {
            if !inst.evaluate(&v).map_err(err)?.is_nonnegative() {
                negative += 1;
            }
        }
    }
    Ok((
        negative == 0 && mismatched == 0,
        format!(
            "300 groups, {} library instances and {} Ingleton orderings: {negative} negative, {mismatched} vectors off the rank formula",
            library.len(),
            ingletons.len()
        ),
    ))
}

// ---------------------------------------------------------------------------
// 5. Ingleton violation.

fn shannon_bits(atoms: &[([u32; 4], f64)], mask: u32) -> f64 {
    let mut marg: HashMap<Vec<u32>, f64> = HashMap::new();
    for (x, p) in atoms {
        let key = (0..4).filter(|i| mask >> i & 1 == 1).map(|i| x[i]).collect();
        *marg.entry(key).or_default() += p;
    }
    marg.values().filter(|&&p| p > 0.0).map(|p| -p * p.log2()).sum()
}

fn ingleton_violation() -> Check {
    let expected = -(5.0 - 3.0 * 3f64.log2()) / 2.0;
    let mut atoms = Vec::new();
    for c in 0..2u32 {
        for d in 0..2u32 {
            atoms.push(([c | d, c & d, c, d], 0.25));
        }
    }
    let ing = ingleton_terms(0, 1, 2, 3);
    let oracle = eval_f64(&ing, |m| shannon_bits(&atoms, m));
    let classical = Distribution::or_and_counterexample().polymatroid().map_err(err)?;
    let lib_classical = eval_f64(&ing, |m| classical.bits(Subset::from_bits(m)));
    let quantum = quantum::quantum_counterexample().map_err(err)?.entropy_vector().map_err(err)?;
    let lib_quantum = eval_f64(&ing, |m| quantum.bits(Subset::from_bits(m)));
    let mut matus_ok = true;
    for v in [&classical, &quantum] {
        for p in ineq::permutations(4) {
            let s: Vec<Subset> = p.iter().map(|&x| Subset::singleton(x)).collect();
            let inst = ineq::matus(v.system(), 1, s[0], s[1], s[2], s[3]).map_err(err)?;
            matus_ok &= inst.evaluate(v).map_err(err)?.bits() >= -1e-9;
        }
    }
    let passed = (oracle - expected).abs() <= 1e-12
        && (lib_classical - expected).abs() <= 1e-12
        && (lib_quantum - expected).abs() <= 1e-9
        && matus_ok;
    Ok((
        passed,
        format!(
            "closed form {expected:.12}, atoms {oracle:.12}, classical {lib_classical:.12}, quantum {lib_quantum:.12}, Matus t=1 holds: {matus_ok}"
        ),
    ))
}

// ---------------------------------------------------------------------------
// 6-7. Random quantum states.

fn pure_states() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut complement: f64 = 0.0;
    let mut routes: f64 = 0.0;
    let mut identity: f64 = 0.0;
    let mut min_ing = f64::INFINITY;
    let ing = ingleton_terms(0, 1, 2, 3);
    let mut rhs = cmi(1, 2, 4);
    rhs.extend(cmi(4, 8, 1));
    for _ in 0..200 {
        let dims: Vec<usize> = (0..4).map(|_| rng.random_range(2..=3)).collect();
        let psi = PureState::random(&mut rng, HilbertFactorization::with_dims(&dims).map_err(err)?)
            .map_err(err)?;
        let rho = psi.density().map_err(err)?;
        let mut s = [0.0f64; 16];
        for m in 1..16u32 {
            let gram = psi.reduced_entropy(Subset::from_bits(m)).map_err(err)?;
            let traced = rho
                .partial_trace(Subset::from_bits(m))
                .and_then(|r| r.von_neumann_entropy())
                .map_err(err)?;
            routes = routes.max((gram - traced).abs());
            s[m as usize] = traced;
        }
        for m in 1..15usize {
            complement = complement.max((s[m] - s[15 ^ m]).abs());
        }
        let h = |m: u32| s[m as usize];
        let value = eval_f64(&ing, h);
        identity = identity.max((value - eval_f64(&rhs, h)).abs());
        min_ing = min_ing.min(value);
    }
    Ok((
        complement <= 1e-9 && routes <= 1e-9 && identity <= 1e-9 && min_ing >= -1e-9,
        format!(
            "200 states: S(J)-S(J^c) {complement:.1e}, Gram vs partial trace {routes:.1e}, Ing identity {identity:.1e}, min Ing {min_ing:.3}"
        ),
    ))
}

fn mixed_states() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut min_lib = f64::INFINITY;
    let mut min_oracle = f64::INFINITY;
    for i in 0..500 {
        let n = 2 + i % 3;
        let fact = HilbertFactorization::with_dims(&vec![2; n]).map_err(err)?;
        let v = quantum::random_density(&mut rng, fact).map_err(err)?.entropy_vector().map_err(err)?;
        for inst in ineq::quantum_family(v.system()) {
            min_lib = min_lib.min(inst.evaluate(&v).map_err(err)?.bits());
        }
        let full = (1u32 << n) - 1;
        let h = |m: u32| v.bits(Subset::from_bits(m));
        for x in 0..n {
            for y in x + 1..n {
                let (bx, by) = (1u32 << x, 1u32 << y);
                let rest = full & !(bx | by);
                for k in 0..=full {
                    if k & !rest != 0 {
                        continue;
                    }
                    min_oracle = min_oracle.min(eval_f64(&cmi(bx, by, k), h));
                    // WMO: S(xK) + S(yK) >= S(x) + S(y) after purifying the rest.
                    let wmo = h(bx | k) + h(by | k) - h(bx) - h(by);
                    min_oracle = min_oracle.min(wmo);
                }
            }
        }
    }
    Ok((
        min_lib >= -1e-9 && min_oracle >= -1e-9,
        format!("500 states, min library margin {min_lib:.3e}, min elementary margin {min_oracle:.3e}"),
    ))
}

// ---------------------------------------------------------------------------
// 8. Kinser(4).

fn kinser_four() -> Check {
    let sys = PartySystem::letters(4).map_err(err)?;
    let kinser = ineq::kinser(&sys, 4).map_err(err)?.functional.dense();
    let mut ing = [Rational64::zero(); 16];
    for (m, c) in ingleton_terms(0, 1, 2, 3) {
        if m != 0 {
            ing[m as usize] += Rational64::from_integer(c);
        }
    }
    let hits: Vec<Vec<usize>> = permutations(4)
        .into_iter()
        .filter(|p| (1..16u32).all(|m| kinser[m as usize - 1] == ing[permute_mask(m, p) as usize]))
        .collect();
    Ok(match hits.first() {
        Some(p) => (true, format!("{} relabelings, first {p:?}", hits.len())),
        None => (false, "no relabeling maps K[4] onto Ingleton".into()),
    })
}

// ---------------------------------------------------------------------------
// 9-10. Groups.

fn groups(nilpotent: bool) -> Result<Vec<FiniteGroup>, String> {
    let mut out = vec![
        FiniteGroup::abelian(&[2, 2]),
        FiniteGroup::abelian(&[2, 4]),
        FiniteGroup::abelian(&[2, 2, 2]),
        FiniteGroup::abelian(&[3, 3]),
        FiniteGroup::abelian(&[4, 4]),
        FiniteGroup::abelian(&[2, 2, 2, 2]),
        FiniteGroup::abelian(&[3, 9]),
        FiniteGroup::cyclic(12),
        FiniteGroup::cyclic(30),
        FiniteGroup::quaternion(),
        FiniteGroup::dihedral(4),
        FiniteGroup::dihedral(8),
        FiniteGroup::heisenberg(3),
    ];
    if !nilpotent {
        out.extend([
            FiniteGroup::symmetric(3),
            FiniteGroup::symmetric(4),
            FiniteGroup::dihedral(5),
            FiniteGroup::dihedral(6),
        ]);
    }
    out.into_iter().map(|g| g.map_err(err)).collect()
}

/// Subgroup generated by a few random elements, closed by repeated multiplication.
fn random_subgroup(rng: &mut ChaCha8Rng, g: &FiniteGroup, normal: bool) -> Vec<usize> {
    for _ in 0..64 {
        let mut h: BTreeSet<usize> = BTreeSet::from([g.identity()]);
        for _ in 0..rng.random_range(1..=2) {
            h.insert(rng.random_range(0..g.order()));
        }
        loop {
            let products: BTreeSet<usize> =
                h.iter().flat_map(|&x| h.iter().map(move |&y| g.mul(x, y))).collect();
            if products.is_subset(&h) {
                break;
            }
            h.extend(products);
        }
        let conjugation_closed =
            (0..g.order()).all(|x| h.iter().all(|&y| h.contains(&g.mul(g.mul(x, y), g.inv(x)))));
        if !normal || conjugation_closed {
            return h.into_iter().collect();
        }
    }
    vec![g.identity()]
}

fn coset_entropies() -> Check {
    let all = groups(false)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let system = PartySystem::letters(3).map_err(err)?;
    let mut bad = 0;
    for i in 0..50 {
        let g = all[i % all.len()].clone();
        let subs: Vec<Vec<usize>> = (0..3).map(|_| random_subgroup(&mut rng, &g, false)).collect();
        // X_j = g G_j as the sorted left coset.
        let cosets: Vec<Vec<Vec<usize>>> = (0..g.order())
            .map(|x| {
                subs.iter()
                    .map(|h| {
                        let mut c: Vec<usize> = h.iter().map(|&y| g.mul(x, y)).collect();
                        c.sort_unstable();
                        c
                    })
                    .collect()
            })
            .collect();
        let fam = SubgroupFamily::new(g.clone(), system.clone(), subs).map_err(err)?;
        let lib = fam.polymatroid().map_err(err)?;
        for m in 1..8u32 {
            let mut counts: HashMap<Vec<&Vec<usize>>, usize> = HashMap::new();
            for x in &cosets {
                let key = (0..3).filter(|j| m >> j & 1 == 1).map(|j| &x[j]).collect();
                *counts.entry(key).or_default() += 1;
            }
            let n = g.order() as f64;
            let h: f64 = counts.values().map(|&c| -(c as f64 / n) * (c as f64 / n).log2()).sum();
            if (h - lib.bits(Subset::from_bits(m))).abs() > 1e-12 {
                bad += 1;
            }
        }
    }
    Ok((bad == 0, format!("50 families, {bad} subsets off the coset distribution")))
}

fn intersection(sets: &[&Vec<usize>]) -> usize {
    let mut it = sets.iter();
    let first: BTreeSet<usize> = it.next().map_or_else(BTreeSet::new, |s| s.iter().copied().collect());
    it.fold(first, |acc, s| acc.intersection(&s.iter().copied().collect()).copied().collect()).len()
}

/// Sign of `sum c_J log(|G| / |G_J|)`, decided on integers.
fn group_sign(terms: &[(u32, i64)], order: usize, sub_order: impl Fn(u32) -> usize) -> std::cmp::Ordering {
    let mut pos = BigUint::one();
    let mut neg = BigUint::one();
    for &(m, c) in terms.iter().filter(|t| t.0 != 0) {
        let e = c.unsigned_abs() as u32;
        let (num, den) = (BigUint::from(order).pow(e), BigUint::from(sub_order(m)).pow(e));
        if c > 0 {
            pos *= num;
            neg *= den;
        } else {
            neg *= num;
            pos *= den;
        }
    }
    pos.cmp(&neg)
}

fn common_information() -> Check {
    let all = groups(true)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let system = PartySystem::letters(4).map_err(err)?;
    let ingletons: Vec<Vec<(u32, i64)>> =
        ordered_quadruples(4).into_iter().map(|[a, b, c, d]| ingleton_terms(a, b, c, d)).collect();
    let mut failures = 0;
    let mut extensions = 0;
    for i in 0..50 {
        let g = all[i % all.len()].clone();
        let subs: Vec<Vec<usize>> = (0..4).map(|_| random_subgroup(&mut rng, &g, true)).collect();
        let fam = SubgroupFamily::new(g.clone(), system.clone(), subs.clone()).map_err(err)?;
        for a in 0..4 {
            for b in 0..4 {
                if a == b {
                    continue;
                }
                extensions += 1;
                let ci = fam
                    .common_information_extension(Subset::singleton(a), Subset::singleton(b))
                    .map_err(err)?;
                let zeta: BTreeSet<usize> =
                    subs[a].iter().flat_map(|&x| subs[b].iter().map(move |&y| (x, y))).map(|(x, y)| g.mul(x, y)).collect();
                let closed = zeta.iter().all(|&x| zeta.iter().all(|&y| zeta.contains(&g.mul(x, y))));
                // zeta is a function of A (and of B) iff G_A (and G_B) sit inside G_zeta;
                // H(zeta) = I(A:B) iff |G_zeta| |G_A ∩ G_B| = |G_A| |G_B|.
                let contains = subs[a].iter().chain(&subs[b]).all(|x| zeta.contains(x));
                let sizes = zeta.len() * intersection(&[&subs[a], &subs[b]]) == subs[a].len() * subs[b].len();
                let lib_zeta: BTreeSet<usize> =
                    ci.extended.subgroup(ci.zeta.parties().next().expect("zeta party")).iter().copied().collect();
                if !(closed && contains && sizes && ci.holds() && lib_zeta == zeta) {
                    failures += 1;
                }
            }
        }
        for terms in &ingletons {
            let sign = group_sign(terms, g.order(), |m| {
                let chosen: Vec<&Vec<usize>> = (0..4).filter(|j| m >> j & 1 == 1).map(|j| &subs[j]).collect();
                intersection(&chosen)
            });
            if sign == std::cmp::Ordering::Less {
                failures += 1;
            }
        }
    }
    Ok((failures == 0, format!("50 families, {extensions} extensions, {failures} failures")))
}

// ---------------------------------------------------------------------------
// 11. Double description.

fn primitive(v: &[BigRational]) -> Vec<i64> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| num_integer::gcd(acc, x.clone()));
    ints.iter().map(|x| (x / &gcd).to_i64().expect("small ray")).collect()
}

/// Kernel of a rank `d - 1` matrix with `d` columns.
fn kernel_vector(rows: &[Vec<BigRational>], d: usize) -> Vec<BigRational> {
    let mut m = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..d {
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(r, p);
        let s = m[r][col].clone();
        for c in 0..d {
            m[r][c] = &m[r][c] / &s;
        }
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for c in 0..d {
                    let v = &m[r][c] * &f;
                    m[i][c] -= v;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    let free = (0..d).find(|c| !pivots.contains(c)).expect("one free column");
    let mut v = vec![BigRational::zero(); d];
    v[free] = BigRational::one();
    for (i, &pc) in pivots.iter().enumerate() {
        v[pc] = -m[i][free].clone();
    }
    v
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

fn brute_force(rows: &[Vec<i64>], d: usize) -> BTreeSet<Vec<i64>> {
    let big = int_rows(rows);
    let mut out = BTreeSet::new();
    for subset in combinations(rows.len(), d - 1) {
        let sub: Vec<Vec<BigRational>> = subset.iter().map(|&i| big[i].clone()).collect();
        if big_rank(&sub) != d - 1 {
            continue;
        }
        let k = kernel_vector(&sub, d);
        for sign in [1i64, -1] {
            let v: Vec<BigRational> = k.iter().map(|x| x * BigRational::from_integer(sign.into())).collect();
            let feasible = big.iter().all(|row| {
                let dot = row.iter().zip(&v).fold(BigRational::zero(), |acc, (a, b)| acc + a * b);
                !dot.is_negative()
            });
            if feasible {
                out.insert(primitive(&v));
            }
        }
    }
    out
}

fn dd_oracle() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut mismatches = 0;
    let mut total = 0;
    for _ in 0..100 {
        let (d, rows) = loop {
            let d = rng.random_range(2..=6);
            let m = rng.random_range(d..=12);
            let rows: Vec<Vec<i64>> =
                (0..m).map(|_| (0..d).map(|_| rng.random_range(-2..=2)).collect()).collect();
            if big_rank(&int_rows(&rows)) == d {
                break (d, rows);
            }
        };
        let dd: BTreeSet<Vec<i64>> = RationalCone::from_integer_rows(d, rows.clone())
            .map_err(err)?
            .extreme_rays()
            .map_err(err)?
            .into_iter()
            .collect();
        total += dd.len();
        if dd != brute_force(&rows, d) {
            mismatches += 1;
        }
    }
    Ok((mismatches == 0, format!("100 cones, {total} rays, {mismatches} mismatches")))
}
