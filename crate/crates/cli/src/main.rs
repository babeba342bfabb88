use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use qentropy::cone::{self, Ray, Symmetry, TABLE1, TABLE1_ROWS};
use qentropy::groups::{self, Distribution};
use qentropy::ineq::{self, InequalityInstance};
use qentropy::quantum::{self, CMatrix, Complex64, DensityMatrix, HilbertFactorization, QuantumState};
use qentropy::stab::{self, PaperState, StabiliserGroup};
use qentropy::verify;
use qentropy::{EntropyVector, PartySystem, Subset};

#[derive(Parser)]
#[command(name = "qentropy", version, about = "Entropy vectors of multi-party quantum states")]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy vector of a stabiliser file or a density/pure-state file, as CSV.
    Entropy { file: PathBuf },
    /// Evaluates inequality families on an entropy-vector CSV; exit 1 on a violation.
    Check {
        file: PathBuf,
        #[arg(long = "family", value_enum)]
        families: Vec<FamilyArg>,
        /// Index of the Matúš inequality.
        #[arg(long, default_value_t = 1)]
        t: i64,
    },
    /// Extreme rays of a named cone.
    Rays {
        #[arg(value_enum)]
        cone: ConeArg,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        /// Relabelings used to group rays into orbits.
        #[arg(long, value_enum, default_value_t = SymmetryArg::S5)]
        symmetry: SymmetryArg,
        /// List every ray instead of one representative per orbit.
        #[arg(long)]
        all: bool,
    },
    /// Built-in witness states and counterexamples.
    States {
        /// R0..R6, quantum_counterexample or classical_counterexample.
        tag: String,
        /// Print the stabiliser generators.
        #[arg(long)]
        stab: bool,
        /// Print the entropy vector (default when no other output is chosen).
        #[arg(long)]
        entropy: bool,
        /// Print the density matrix.
        #[arg(long)]
        density: bool,
    },
    /// Poly-matroid of a subgroup family given as a group file, as CSV.
    Group { file: PathBuf },
    /// Runs the full reproduction suite.
    VerifyPaper,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Shannon,
    Quantum,
    Ingleton,
    Kinser,
    Matus,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConeArg {
    /// Poly-quantoid cone with Ingleton on every four parties of the purification.
    #[value(name = "quantum-ingleton-4")]
    QuantumIngleton4,
    /// Ingleton only on a, b, c, d.
    #[value(name = "abcd-ingleton-4")]
    AbcdIngleton4,
    /// Poly-quantoid cone without Ingleton.
    #[value(name = "quantum-4")]
    Quantum4,
    /// The quantum Ingleton cone built on the 5-party purification.
    #[value(name = "pure-lifted-4")]
    PureLifted4,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    JsonLines,
}

#[derive(Clone, Copy, ValueEnum)]
enum SymmetryArg {
    S4,
    S5,
}

/// Failure of the checked property, as opposed to bad input.
struct Violation;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Violation)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<std::result::Result<(), Violation>> {
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Entropy { file } => {
            let text = read(&file)?;
            let v = entropy_of_text(&text)?;
            write!(out, "{}", v.to_csv())?;
        }
        Command::Check { file, families, t } => {
            let v = EntropyVector::from_csv(&read(&file)?)
                .with_context(|| format!("reading {}", file.display()))?;
            let families = if families.is_empty() { vec![FamilyArg::Quantum] } else { families };
            let mut instances = Vec::new();
            for f in families {
                instances.extend(family(f, v.system(), t)?);
            }
            let id = file.display().to_string();
            let report = ineq::check(&id, &v, &ineq::dedup(instances))?;
            write!(out, "{}", report.to_csv())?;
            eprint!("{}", report.summary());
            if !report.is_satisfied() {
                return Ok(Err(Violation));
            }
        }
        Command::Rays {
            cone,
            format,
            symmetry,
            all,
        } => {
            let symmetry = match symmetry {
                SymmetryArg::S4 => Symmetry::S4,
                SymmetryArg::S5 => Symmetry::S5,
            };
            let rays = match cone {
                ConeArg::QuantumIngleton4 => cone::build_quantum_ingleton_cone(4)?.extreme_rays()?,
                ConeArg::AbcdIngleton4 => cone::build_quantum_abcd_ingleton_cone()?.extreme_rays()?,
                ConeArg::Quantum4 => cone::build_quantum_cone(4)?.extreme_rays()?,
                ConeArg::PureLifted4 => {
                    let mut rays: Vec<Ray> = cone::build_pure_lifted_cone()?
                        .extreme_rays()?
                        .iter()
                        .map(|r| cone::unlift_from_pure(r))
                        .collect();
                    rays.sort();
                    rays
                }
            };
            let columns = columns(&rays, symmetry, all);
            let m = cone::match_table1(&rays, symmetry);
            write!(out, "{}", render_columns(&columns, format))?;
            eprintln!(
                "{} rays in {} orbits under {symmetry}; matches the reference table: {}",
                rays.len(),
                m.matched.len() + m.extra.len(),
                m.is_exact()
            );
        }
        Command::States {
            tag,
            stab,
            entropy,
            density,
        } => {
            let entropy = entropy || !(stab || density);
            states(&mut out, &tag, stab, entropy, density)?;
        }
        Command::Group { file } => {
            let fam = groups::parse_group_file(&read(&file)?)
                .with_context(|| format!("reading {}", file.display()))?;
            let v = match fam.polymatroid_exact()? {
                Some(v) => v,
                None => fam.polymatroid()?,
            };
            write!(out, "{}", v.to_csv())?;
        }
        Command::VerifyPaper => {
            let mut ok = true;
            for id in 1..=verify::CRITERIA {
                let r = verify::run(id, cli.seed);
                writeln!(out, "{}", r.line())?;
                out.flush()?;
                ok &= r.passed;
            }
            if !ok {
                return Ok(Err(Violation));
            }
        }
    }
    Ok(Ok(()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Stabiliser files start with a `prime:` line; state files with `dims:`.
fn entropy_of_text(text: &str) -> Result<EntropyVector> {
    let first = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .unwrap_or("");
    if first.starts_with("prime:") {
        let g = StabiliserGroup::from_text(text)?;
        Ok(if g.is_maximal() { g.entropy_vector()? } else { g.mixed_entropy_vector()? })
    } else {
        Ok(QuantumState::from_text(text)?.entropy_vector()?)
    }
}

fn family(f: FamilyArg, system: &PartySystem, t: i64) -> Result<Vec<InequalityInstance>> {
    let n = system.len();
    let orderings = |k: usize| -> Vec<Vec<usize>> {
        ineq::permutations(n)
            .into_iter()
            .map(|p| p[..k].to_vec())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect()
    };
    Ok(match f {
        FamilyArg::Shannon => ineq::shannon_family(system),
        FamilyArg::Quantum => ineq::quantum_family(system),
        FamilyArg::Ingleton => {
            if n < 4 {
                bail!("Ingleton needs at least 4 parties");
            }
            ineq::ingleton_family(system)
        }
        FamilyArg::Kinser => {
            if n < 4 {
                bail!("Kinser needs at least 4 parties");
            }
            orderings(n)
                .iter()
                .map(|o| ineq::kinser_on(system, o))
                .collect::<qentropy::Result<_>>()?
        }
        FamilyArg::Matus => {
            if n < 4 {
                bail!("Matus needs at least 4 parties");
            }
            orderings(4)
                .iter()
                .map(|o| {
                    let s: Vec<Subset> = o.iter().map(|&x| Subset::singleton(x)).collect();
                    ineq::matus(system, t, s[0], s[1], s[2], s[3])
                })
                .collect::<qentropy::Result<_>>()?
        }
    })
}

struct Column {
    label: String,
    orbit_size: usize,
    values: Vec<i64>,
}

/// Display columns in the 5-party row layout: reference columns first in table
/// order (1..6, 0), then any other orbits.
fn columns(rays: &[Ray], symmetry: Symmetry, all: bool) -> Vec<Column> {
    let reference: Vec<(usize, cone::RayOrbit)> = TABLE1
        .iter()
        .enumerate()
        .map(|(i, col)| (i, cone::canonicalize_orbit(&cone::unlift_from_pure(col), symmetry)))
        .collect();
    let mut cols: Vec<(usize, Column)> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    let mut extra = 0;
    for ray in rays {
        let o = cone::canonicalize_orbit(ray, symmetry);
        let hit = reference.iter().find(|(_, r)| r.representative == o.representative);
        if !all && !seen.insert(o.representative.clone()) {
            continue;
        }
        let (key, label, values) = match hit {
            Some(&(i, _)) => {
                // Prefer the member printed in the reference table.
                let col = cone::unlift_from_pure(&TABLE1[i]);
                let shown = if !all && rays.contains(&col) { col } else { ray.clone() };
                let order = if i == 0 { 7 } else { i };
                (order, i.to_string(), shown)
            }
            None => {
                extra += 1;
                (100 + extra, format!("x{extra}"), if all { ray.clone() } else { o.representative.clone() })
            }
        };
        cols.push((
            key,
            Column {
                label,
                orbit_size: o.size,
                values: cone::lift_to_pure(&values),
            },
        ));
    }
    cols.sort_by_key(|(k, _)| *k);
    cols.into_iter().map(|(_, c)| c).collect()
}

fn render_columns(cols: &[Column], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Table => {
            let labels: Vec<String> = (0..15).map(cone::table1_row_label).collect();
            let width = labels.iter().map(|l| l.chars().count()).max().unwrap_or(0).max(11);
            let cell = cols
                .iter()
                .flat_map(|c| c.values.iter().map(|v| v.to_string().len()).chain([c.label.len()]))
                .max()
                .unwrap_or(1);
            out.push_str(&format!("{:<width$} |", "subset\\ray"));
            for c in cols {
                out.push_str(&format!(" {:>cell$}", c.label));
            }
            out.push('\n');
            out.push_str(&format!("{}-+{}\n", "-".repeat(width), "-".repeat((cell + 1) * cols.len())));
            for (r, label) in labels.iter().enumerate() {
                let pad = width - label.chars().count();
                out.push_str(&format!("{label}{} |", " ".repeat(pad)));
                for c in cols {
                    out.push_str(&format!(" {:>cell$}", c.values[r]));
                }
                out.push('\n');
            }
        }
        Format::Csv => {
            out.push_str(&format!("ray,orbit_size,{}\n", TABLE1_ROWS.join(",")));
            for c in cols {
                let vals: Vec<String> = c.values.iter().map(i64::to_string).collect();
                out.push_str(&format!("{},{},{}\n", c.label, c.orbit_size, vals.join(",")));
            }
        }
        Format::JsonLines => {
            for c in cols {
                let vals: Vec<String> = TABLE1_ROWS
                    .iter()
                    .zip(&c.values)
                    .map(|(r, v)| format!("\"{r}\": {v}"))
                    .collect();
                out.push_str(&format!(
                    "{{\"ray\": \"{}\", \"orbit_size\": {}, \"values\": {{{}}}}}\n",
                    c.label,
                    c.orbit_size,
                    vals.join(", ")
                ));
            }
        }
    }
    out
}

fn states(out: &mut impl Write, tag: &str, stab: bool, entropy: bool, density: bool) -> Result<()> {
    if tag == "classical_counterexample" {
        if stab {
            bail!("classical_counterexample is not a stabiliser state");
        }
        let dist = Distribution::or_and_counterexample();
        if entropy {
            write!(out, "{}", dist.polymatroid()?.to_csv())?;
        }
        if density {
            write!(out, "{}", diagonal_density(&dist)?.to_text())?;
        }
        return Ok(());
    }
    let tag: stab::PaperTag = tag.parse()?;
    match stab::build_paper_state(tag)? {
        PaperState::Stabiliser(g) => {
            if stab {
                write!(out, "{}", g.to_text())?;
            }
            if entropy {
                write!(out, "{}", g.entropy_vector()?.to_csv())?;
            }
            if density {
                let (rho, _) = quantum::stabiliser_projector(&g, &vec![0; g.k()])?;
                write!(out, "{}", rho.to_text())?;
            }
        }
        PaperState::Density(rho) => {
            if stab {
                bail!("{tag} is not a stabiliser state");
            }
            if entropy {
                write!(out, "{}", rho.entropy_vector()?.to_csv())?;
            }
            if density {
                write!(out, "{}", rho.to_text())?;
            }
        }
    }
    Ok(())
}

/// `Σ_x p(x) |x⟩⟨x|` on one qubit per variable (values must be 0 or 1).
fn diagonal_density(dist: &Distribution) -> Result<DensityMatrix> {
    let n = dist.system().len();
    let fact = HilbertFactorization::new(dist.system().clone(), vec![2; n])?;
    let mut m = CMatrix::zeros(1 << n);
    for (x, p) in dist.atoms() {
        let mut idx = 0;
        for &b in x {
            if b > 1 {
                bail!("only binary variables can be written as qubits");
            }
            idx = idx * 2 + b as usize;
        }
        let p = *p.numer() as f64 / *p.denom() as f64;
        m.set(idx, idx, Complex64::new(p, 0.0));
    }
    Ok(DensityMatrix::new(fact, m)?)
}
