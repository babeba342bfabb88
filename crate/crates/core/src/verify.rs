//! End-to-end reproduction checks: the extreme rays of the 4-party quantum
//! Ingleton cone, their witness states, and the property suites around them.

use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cone::{self, Symmetry, TABLE1, TABLE1_ROWS};
use crate::entvec::{EntropyVector, LinearFunctional, PartySystem, Subset};
use crate::error::{Error, Result};
use crate::groups::{Distribution, FiniteGroup, SubgroupFamily};
use crate::ineq::{self, InequalityInstance};
use crate::quantum::{self, HilbertFactorization, PureState};
use crate::stab::{self, PaperTag, StabiliserGroup};

pub const CRITERIA: usize = 11;

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} [{}] {}: {} ({:.2}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

pub fn name(id: usize) -> &'static str {
    match id {
        1 => "extreme rays of the quantum Ingleton cone",
        2 => "witness states realise the rays",
        3 => "projector entropies match symplectic entropies",
        4 => "random stabiliser states satisfy linear rank inequalities",
        5 => "Ingleton violation, classical and quantum",
        6 => "pure-state identities",
        7 => "SSA and WMO on random mixed states",
        8 => "Kinser(4) is a relabeled Ingleton",
        9 => "group poly-matroids are coset entropies",
        10 => "common information for normal subgroups",
        11 => "double description matches brute force",
        _ => "unknown",
    }
}

/// Runs criterion `id` (1-based). Errors inside a check count as failures.
pub fn run(id: usize, seed: u64) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => table_rays(),
        2 => witness_states(),
        3 => projector_cross_check(),
        4 => random_stabiliser_suite(seed),
        5 => ingleton_violations(),
        6 => pure_state_identities(seed),
        7 => mixed_state_suite(seed),
        8 => kinser_is_ingleton(),
        9 => coset_entropies(seed),
        10 => common_information(seed),
        11 => dd_oracle(seed),
        _ => Err(Error::InvalidArgument(format!("no criterion {id}"))),
    };
    let (passed, detail) = match outcome {
        Ok(d) => (d.0, d.1),
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id,
        name: name(id),
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    (1..=CRITERIA).map(|id| run(id, seed)).collect()
}

type Outcome = Result<(bool, String)>;

fn table_rays() -> Outcome {
    let rays = cone::build_quantum_ingleton_cone(4)?.extreme_rays()?;
    let m = cone::match_table1(&rays, Symmetry::S5);
    let s4 = cone::match_table1(&rays, Symmetry::S4);
    let s4_orbits = s4.matched.len() + s4.extra.len();
    let detail = format!(
        "{} rays, {} orbits under relabelings of a..e matching all 7 columns: {}; {} orbits under S4",
        rays.len(),
        m.matched.len() + m.extra.len(),
        m.is_exact(),
        s4_orbits
    );
    Ok((m.is_exact(), detail))
}

/// Exact entropy of a 5-party pure state on the display rows.
fn column_of(v: &EntropyVector) -> Result<Vec<Rational64>> {
    TABLE1_ROWS
        .iter()
        .map(|r| {
            let s = v.system().parse_subset(r)?;
            v.exact(s).ok_or_else(|| Error::Invariant("expected an exact vector".into()))
        })
        .collect()
}

fn witness_states() -> Outcome {
    let mut bad = Vec::new();
    for tag in PaperTag::RAYS {
        let g = stab::paper_group(tag)?;
        let v = g.entropy_vector()?;
        let col = column_of(&v)?;
        let expected_prime = if matches!(tag, PaperTag::R3 | PaperTag::R6) { 3 } else { 2 };
        let idx = tag.ray_index().expect("ray tag");
        let want: Vec<Rational64> = TABLE1[idx].iter().map(|&x| Rational64::from_integer(x)).collect();
        if col != want || g.prime() != expected_prime {
            bad.push(tag.to_string());
        }
    }
    Ok((bad.is_empty(), if bad.is_empty() { "R0-R6 exact".into() } else { format!("mismatch: {}", bad.join(" ")) }))
}

fn projector_cross_check() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut checked = Vec::new();
    for tag in PaperTag::RAYS {
        let g = stab::paper_group(tag)?;
        let dim = (g.prime() as usize).pow(g.n() as u32);
        if dim > quantum::MAX_DENSE_DIMENSION {
            continue;
        }
        let (rho, rank) = quantum::stabiliser_projector(&g, &vec![0; g.k()])?;
        if rank != 1 {
            return Ok((false, format!("{tag}: projector rank {rank}")));
        }
        let dense = rho.entropy_vector()?;
        let exact = g.entropy_vector()?;
        for j in exact.system().nonempty_subsets() {
            worst = worst.max((dense.bits(j) - exact.bits(j)).abs());
        }
        checked.push(tag.to_string());
    }
    Ok((worst <= 1e-9, format!("{} states, max deviation {worst:.2e} bits", checked.join(" "))))
}

fn five_party_families(system: &PartySystem) -> Result<Vec<InequalityInstance>> {
    let mut out = ineq::ingleton_family(system);
    for order in ineq::permutations(5) {
        out.push(ineq::kinser_on(system, &order)?);
        out.push(ineq::kinser_on(system, &order[..4])?);
        let s: Vec<Subset> = order[..4].iter().map(|&x| Subset::singleton(x)).collect();
        for t in 0..=3 {
            out.push(ineq::matus(system, t, s[0], s[1], s[2], s[3])?);
        }
    }
    Ok(ineq::dedup(out))
}

fn random_party_counts<R: Rng>(rng: &mut R) -> Vec<(String, usize)> {
    let mut counts = [1usize; 5];
    let extra = rng.random_range(0..=5);
    for _ in 0..extra {
        counts[rng.random_range(0..5)] += 1;
    }
    ["a", "b", "c", "d", "e"]
        .iter()
        .zip(counts)
        .map(|(l, c)| (l.to_string(), c))
        .collect()
}

fn random_stabiliser_suite(seed: u64) -> Outcome {
    let system = PartySystem::letters(5)?;
    let family = five_party_families(&system)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    for i in 0..300 {
        let p = if i % 2 == 0 { 2 } else { 3 };
        let parties = random_party_counts(&mut rng);
        let g = StabiliserGroup::random_with(&mut rng, p, &parties)?;
        let v = g.entropy_vector()?;
        for inst in &family {
            if !inst.evaluate(&v)?.is_nonnegative() {
                violations += 1;
            }
        }
    }
    Ok((
        violations == 0,
        format!("300 groups x {} instances, {violations} negative", family.len()),
    ))
}

fn all_matus(system: &PartySystem, t: i64) -> Result<Vec<InequalityInstance>> {
    ineq::permutations(4)
        .into_iter()
        .map(|p| {
            let s: Vec<Subset> = p.iter().map(|&x| Subset::singleton(x)).collect();
            ineq::matus(system, t, s[0], s[1], s[2], s[3])
        })
        .collect()
}

fn ingleton_violations() -> Outcome {
    let expected = -(5.0 - 3.0 * 3f64.log2()) / 2.0;
    let classical = Distribution::or_and_counterexample().polymatroid()?;
    let quantum = quantum::quantum_counterexample()?.entropy_vector()?;
    let s = classical.system().clone();
    let [a, b, c, d] = [0, 1, 2, 3].map(Subset::singleton);
    let ing = ineq::ingleton(&s, a, b, c, d, false)?;
    let ic = ing.evaluate(&classical)?.bits();
    let iq = ing.functional.on_system(quantum.system())?.evaluate(&quantum)?.bits();
    let mut matus_ok = true;
    for v in [&classical, &quantum] {
        for inst in all_matus(v.system(), 1)? {
            matus_ok &= inst.evaluate(v)?.bits() >= -1e-9;
        }
    }
    let passed = (ic - expected).abs() <= 1e-12 && (iq - expected).abs() <= 1e-9 && matus_ok;
    Ok((
        passed,
        format!("classical {ic:.12}, quantum {iq:.12}, expected {expected:.12}, Matus t=1 holds: {matus_ok}"),
    ))
}

fn pure_state_identities(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut min_ing = f64::INFINITY;
    for _ in 0..200 {
        let dims: Vec<usize> = (0..4).map(|_| rng.random_range(2..=3)).collect();
        let psi = PureState::random(&mut rng, HilbertFactorization::with_dims(&dims)?)?;
        let v = psi.entropy_vector()?;
        let sys = v.system().clone();
        for j in sys.nonempty_subsets() {
            worst = worst.max((v.bits(j) - v.bits(sys.complement(j))).abs());
        }
        let [a, b, c, d] = [0, 1, 2, 3].map(Subset::singleton);
        let ing = ineq::ingleton(&sys, a, b, c, d, false)?.evaluate(&v)?.bits();
        let rhs = LinearFunctional::mutual_information(&sys, a, b, Some(c))?.evaluate(&v)?.bits()
            + LinearFunctional::mutual_information(&sys, c, d, Some(a))?.evaluate(&v)?.bits();
        worst = worst.max((ing - rhs).abs());
        min_ing = min_ing.min(ing);
    }
    Ok((
        worst <= 1e-9 && min_ing >= -1e-9,
        format!("200 states, max identity deviation {worst:.2e}, min Ing {min_ing:.3e}"),
    ))
}

fn mixed_state_suite(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_margin = f64::INFINITY;
    for i in 0..500 {
        let n = 2 + i % 3;
        let rho = quantum::random_density(&mut rng, HilbertFactorization::with_dims(&vec![2; n])?)?;
        let v = rho.entropy_vector()?;
        for inst in ineq::quantum_family(v.system()) {
            min_margin = min_margin.min(inst.evaluate(&v)?.bits());
        }
    }
    Ok((min_margin >= -1e-9, format!("500 states, min margin {min_margin:.3e}")))
}

fn kinser_is_ingleton() -> Outcome {
    let sys = PartySystem::letters(4)?;
    let k = ineq::kinser(&sys, 4)?.functional;
    let [a, b, c, d] = [0, 1, 2, 3].map(Subset::singleton);
    let ing = ineq::ingleton(&sys, a, b, c, d, false)?.functional;
    let found = ineq::permutations(4).into_iter().find(|p| k.permuted(p) == ing);
    Ok(match found {
        Some(p) => (true, format!("K[4] relabeled by {p:?} equals Ing(ab:cd)")),
        None => (false, "no relabeling found".into()),
    })
}

/// Groups of order at most 64; `nilpotent` restricts to nilpotent ones.
fn small_groups(nilpotent: bool) -> Result<Vec<FiniteGroup>> {
    let mut out = vec![
        FiniteGroup::abelian(&[2, 2])?,
        FiniteGroup::abelian(&[2, 4])?,
        FiniteGroup::abelian(&[2, 2, 2])?,
        FiniteGroup::abelian(&[3, 3])?,
        FiniteGroup::abelian(&[4, 4])?,
        FiniteGroup::abelian(&[2, 2, 2, 2])?,
        FiniteGroup::abelian(&[3, 9])?,
        FiniteGroup::abelian(&[2, 6])?,
        FiniteGroup::cyclic(12)?,
        FiniteGroup::cyclic(30)?,
        FiniteGroup::quaternion()?,
        FiniteGroup::dihedral(4)?,
        FiniteGroup::dihedral(8)?,
        FiniteGroup::heisenberg(3)?,
        FiniteGroup::direct_product(&FiniteGroup::quaternion()?, &FiniteGroup::cyclic(2)?)?,
        FiniteGroup::direct_product(&FiniteGroup::dihedral(4)?, &FiniteGroup::cyclic(3)?)?,
    ];
    if !nilpotent {
        out.extend([
            FiniteGroup::symmetric(3)?,
            FiniteGroup::symmetric(4)?,
            FiniteGroup::dihedral(5)?,
            FiniteGroup::dihedral(6)?,
            FiniteGroup::direct_product(&FiniteGroup::symmetric(3)?, &FiniteGroup::cyclic(3)?)?,
        ]);
    }
    Ok(out)
}

fn random_subgroup<R: Rng>(rng: &mut R, g: &FiniteGroup, normal: bool) -> Vec<usize> {
    for _ in 0..64 {
        let gens: Vec<usize> = (0..rng.random_range(1..=2)).map(|_| rng.random_range(0..g.order())).collect();
        let h = g.generate(&gens);
        if !normal || g.is_normal(&h) {
            return h;
        }
    }
    vec![g.identity()]
}

fn coset_entropies(seed: u64) -> Outcome {
    let groups = small_groups(false)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let system = PartySystem::letters(3)?;
    let mut bad = 0;
    for i in 0..50 {
        let g = groups[i % groups.len()].clone();
        let subs = (0..3).map(|_| random_subgroup(&mut rng, &g, false)).collect();
        let fam = SubgroupFamily::new(g, system.clone(), subs)?;
        let dist = fam.coset_distribution()?;
        let order = fam.group().order() as i64;
        for j in system.nonempty_subsets() {
            let gj = fam.subgroup_order(j) as i64;
            let marginal = dist.marginal(j);
            let uniform = marginal.len() as i64 * gj == order
                && marginal.values().all(|&p| p == Rational64::new(gj, order));
            let entropy_ok = (fam.polymatroid()?.bits(j) - dist.entropy_bits(j)).abs() <= 1e-12;
            if !(uniform && entropy_ok) {
                bad += 1;
            }
        }
    }
    Ok((bad == 0, format!("50 families, {bad} mismatched subsets")))
}

fn common_information(seed: u64) -> Outcome {
    let groups = small_groups(true)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let system = PartySystem::letters(4)?;
    let ingletons = ineq::ingleton_family(&system);
    let mut failures = 0;
    let mut extensions = 0;
    for i in 0..50 {
        let g = groups[i % groups.len()].clone();
        let subs = (0..4).map(|_| random_subgroup(&mut rng, &g, true)).collect();
        let fam = SubgroupFamily::new(g, system.clone(), subs)?;
        for a in 0..4 {
            for b in 0..4 {
                if a == b {
                    continue;
                }
                let ci = fam.common_information_extension(Subset::singleton(a), Subset::singleton(b))?;
                extensions += 1;
                if !ci.holds() {
                    failures += 1;
                }
            }
        }
        for inst in &ingletons {
            if fam.exact_sign(&inst.functional)? == std::cmp::Ordering::Less {
                failures += 1;
            }
        }
    }
    Ok((failures == 0, format!("50 families, {extensions} extensions, {failures} failures")))
}

fn random_pointed_cone<R: Rng>(rng: &mut R) -> Result<cone::RationalCone> {
    loop {
        let d = rng.random_range(2..=6);
        let m = rng.random_range(d..=12);
        let rows: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..d).map(|_| rng.random_range(-2..=2)).collect())
            .collect();
        let c = cone::RationalCone::from_integer_rows(d, rows)?;
        if c.constraint_rank()? == d {
            return Ok(c);
        }
    }
}

fn dd_oracle(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0;
    let mut total_rays = 0;
    for _ in 0..100 {
        let c = random_pointed_cone(&mut rng)?;
        let dd = c.extreme_rays()?;
        total_rays += dd.len();
        if dd != c.brute_force_rays()? {
            mismatches += 1;
        }
    }
    Ok((mismatches == 0, format!("100 cones, {total_rays} rays, {mismatches} mismatches")))
}
