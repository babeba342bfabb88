use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qentropy::cone::{self, RationalCone};
use qentropy::entvec::{EntropyVector, PartySystem};
use qentropy::groups;
use qentropy::ineq::{self, InequalityInstance};
use qentropy::quantum::{self, HilbertFactorization, PureState, QuantumState};
use qentropy::stab::{self, PaperState, PaperTag, StabiliserGroup};

fn py_err(e: qentropy::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Entropy of every nonempty subset of a party system.
#[pyclass(name = "EntropyVector", frozen)]
#[derive(Clone)]
struct PyEntropyVector {
    inner: EntropyVector,
}

#[pymethods]
impl PyEntropyVector {
    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        EntropyVector::from_csv(text).map(|inner| Self { inner }).map_err(py_err)
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    #[getter]
    fn parties(&self) -> Vec<String> {
        self.inner.system().labels().to_vec()
    }

    #[getter]
    fn is_exact(&self) -> bool {
        self.inner.is_exact()
    }

    /// Entropy of `subset` (e.g. "ab") in bits.
    fn bits(&self, subset: &str) -> PyResult<f64> {
        let s = self.inner.system().parse_subset(subset).map_err(py_err)?;
        Ok(self.inner.bits(s))
    }

    /// Exact entropy of `subset` as (numerator, denominator) in units of log2 p.
    fn exact(&self, subset: &str) -> PyResult<Option<(i64, i64)>> {
        let s = self.inner.system().parse_subset(subset).map_err(py_err)?;
        Ok(self.inner.exact(s).map(|r| (*r.numer(), *r.denom())))
    }

    /// `(subset, bits)` for every nonempty subset in bitmask order.
    fn items(&self) -> Vec<(String, f64)> {
        let sys = self.inner.system();
        sys.nonempty_subsets().map(|s| (sys.render_subset(s), self.inner.bits(s))).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.system().dimension()
    }

    fn __repr__(&self) -> String {
        format!("EntropyVector(parties={:?}, exact={})", self.inner.system().labels(), self.inner.is_exact())
    }
}

/// A maximal stabiliser group over Z_p, with qudits grouped into parties.
#[pyclass(name = "StabiliserGroup", frozen)]
struct PyStabiliserGroup {
    inner: StabiliserGroup,
}

#[pymethods]
impl PyStabiliserGroup {
    /// Parses the stabiliser text format.
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        StabiliserGroup::from_text(text).map(|inner| Self { inner }).map_err(py_err)
    }

    /// The CSS state `sum_{x in C} |x>` for the code spanned by `basis`.
    #[staticmethod]
    fn code_state(prime: u64, parties: Vec<(String, usize)>, basis: Vec<Vec<u64>>) -> PyResult<Self> {
        StabiliserGroup::code_state(prime, &parties, &basis).map(|inner| Self { inner }).map_err(py_err)
    }

    #[staticmethod]
    fn random(seed: u64, prime: u64, parties: Vec<(String, usize)>) -> PyResult<Self> {
        StabiliserGroup::random(seed, prime, &parties).map(|inner| Self { inner }).map_err(py_err)
    }

    /// One of the named witness states `R0`..`R6`.
    #[staticmethod]
    fn named(tag: &str) -> PyResult<Self> {
        let tag: PaperTag = tag.parse().map_err(py_err)?;
        stab::paper_group(tag).map(|inner| Self { inner }).map_err(py_err)
    }

    #[getter]
    fn prime(&self) -> u64 {
        self.inner.prime()
    }

    #[getter]
    fn qudits(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn generators(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn parties(&self) -> Vec<String> {
        self.inner.system().labels().to_vec()
    }

    fn entropy_vector(&self) -> PyResult<PyEntropyVector> {
        self.inner.entropy_vector().map(|inner| PyEntropyVector { inner }).map_err(py_err)
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn __repr__(&self) -> String {
        format!("StabiliserGroup(p={}, n={}, k={})", self.inner.prime(), self.inner.n(), self.inner.k())
    }
}

/// Entropy vector of a state in the text format (pure amplitudes or a density matrix).
#[pyfunction]
fn state_entropy(text: &str) -> PyResult<PyEntropyVector> {
    let state = QuantumState::from_text(text).map_err(py_err)?;
    state.entropy_vector().map(|inner| PyEntropyVector { inner }).map_err(py_err)
}

/// Entropy vector of a seeded Haar-random pure state with the given local dimensions.
#[pyfunction]
fn random_pure_entropy(dims: Vec<usize>, seed: u64) -> PyResult<PyEntropyVector> {
    let fact = HilbertFactorization::with_dims(&dims).map_err(py_err)?;
    let psi = PureState::random(&mut quantum::seeded_rng(seed), fact).map_err(py_err)?;
    psi.entropy_vector().map(|inner| PyEntropyVector { inner }).map_err(py_err)
}

/// Entropy vector of any named state, including `quantum_counterexample`.
#[pyfunction]
fn named_entropy(tag: &str) -> PyResult<PyEntropyVector> {
    let tag: PaperTag = tag.parse().map_err(py_err)?;
    let inner = match stab::build_paper_state(tag).map_err(py_err)? {
        PaperState::Stabiliser(g) => g.entropy_vector(),
        PaperState::Density(rho) => rho.entropy_vector(),
    }
    .map_err(py_err)?;
    Ok(PyEntropyVector { inner })
}

/// Entropy vector of the classical distribution violating Ingleton.
#[pyfunction]
fn classical_counterexample() -> PyResult<PyEntropyVector> {
    groups::Distribution::or_and_counterexample()
        .polymatroid()
        .map(|inner| PyEntropyVector { inner })
        .map_err(py_err)
}

fn family(name: &str, system: &PartySystem, t: i64) -> PyResult<Vec<InequalityInstance>> {
    let n = system.len();
    let orderings = |k: usize| -> Vec<Vec<usize>> {
        ineq::permutations(n).into_iter().map(|p| p[..k].to_vec()).collect()
    };
    let out = match name {
        "shannon" => ineq::shannon_family(system),
        "quantum" => ineq::quantum_family(system),
        "ingleton" | "kinser" | "matus" if n < 4 => {
            return Err(PyValueError::new_err(format!("{name} needs at least 4 parties")))
        }
        "ingleton" => ineq::ingleton_family(system),
        "kinser" => orderings(n)
            .iter()
            .map(|o| ineq::kinser_on(system, o))
            .collect::<qentropy::Result<_>>()
            .map_err(py_err)?,
        "matus" => orderings(4)
            .iter()
            .map(|o| {
                let [a, b, c, d] = [0, 1, 2, 3].map(|i| qentropy::entvec::Subset::singleton(o[i]));
                ineq::matus(system, t, a, b, c, d)
            })
            .collect::<qentropy::Result<_>>()
            .map_err(py_err)?,
        other => return Err(PyValueError::new_err(format!("unknown family {other:?}"))),
    };
    Ok(ineq::dedup(out))
}

/// Margins of `vector` against the named families, as `(instance, bits, satisfied)`.
#[pyfunction]
#[pyo3(signature = (vector, families, t = 1))]
fn check(vector: &PyEntropyVector, families: Vec<String>, t: i64) -> PyResult<Vec<(String, f64, bool)>> {
    let mut instances = Vec::new();
    for f in &families {
        instances.extend(family(f, vector.inner.system(), t)?);
    }
    let report = ineq::check("vector", &vector.inner, &instances).map_err(py_err)?;
    Ok(report
        .margins
        .into_iter()
        .map(|(name, m)| {
            let ok = m.verdict() != qentropy::entvec::Verdict::Violated;
            (name, m.bits(), ok)
        })
        .collect())
}

/// Extreme rays of `{x : row . x >= 0}` as primitive integer vectors.
#[pyfunction]
fn extreme_rays(dim: usize, rows: Vec<Vec<i64>>) -> PyResult<Vec<Vec<i64>>> {
    RationalCone::from_integer_rows(dim, rows).and_then(|c| c.extreme_rays()).map_err(py_err)
}

/// Extreme rays of a named 4-party cone, in subset bitmask order.
#[pyfunction]
fn cone_rays(name: &str) -> PyResult<Vec<Vec<i64>>> {
    let c = match name {
        "quantum-ingleton-4" => cone::build_quantum_ingleton_cone(4),
        "abcd-ingleton-4" => cone::build_quantum_abcd_ingleton_cone(),
        "quantum-4" => cone::build_quantum_cone(4),
        other => return Err(PyValueError::new_err(format!("unknown cone {other:?}"))),
    };
    c.and_then(|c| c.extreme_rays()).map_err(py_err)
}

/// Lifts a 4-party ray to the 15 display rows `a, b, .., de` of the pure 5-party picture.
#[pyfunction]
fn lift_to_pure(ray: Vec<i64>) -> PyResult<Vec<i64>> {
    if ray.len() != 15 {
        return Err(PyValueError::new_err("4-party rays have 15 coordinates"));
    }
    Ok(cone::lift_to_pure(&ray))
}

/// Runs one reproduction check (1-based); returns `(passed, detail)`.
#[pyfunction]
#[pyo3(signature = (id, seed = 0))]
fn verify(id: usize, seed: u64) -> (bool, String) {
    let r = qentropy::verify::run(id, seed);
    (r.passed, r.detail)
}

#[pymodule]
#[pyo3(name = "qentropy")]
fn qentropy_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEntropyVector>()?;
    m.add_class::<PyStabiliserGroup>()?;
    m.add_function(wrap_pyfunction!(state_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(random_pure_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(named_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(classical_counterexample, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(extreme_rays, m)?)?;
    m.add_function(wrap_pyfunction!(cone_rays, m)?)?;
    m.add_function(wrap_pyfunction!(lift_to_pure, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("TABLE1_ROWS", cone::TABLE1_ROWS.to_vec())?;
    m.add("TABLE1", cone::TABLE1.iter().map(|c| c.to_vec()).collect::<Vec<_>>())?;
    Ok(())
}
