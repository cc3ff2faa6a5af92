use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use polyreal::basic_region::{clip_surface, fundamental_region, to_obj};
use polyreal::catalog::{generate_spec, CatalogSpec};
use polyreal::combinatorics::face_equivalent;
use polyreal::geometry::{center_at_centroid, load_off, to_off, validate, Polyhedron, DEFAULT_TOL};
use polyreal::realization::{assemble_jacobian, realization_report, realization_report_exact};
use polyreal::report::{analyze, AnalysisOptions, GroupSummary, OrbitSummary, RegionSummary};
use polyreal::symmetry::{orbits, symmetry_equivalent, symmetry_group, symmetry_type_dimension, SYMMETRY_TOL};

#[derive(Parser)]
#[command(name = "polyreal", version, about = "Realization spaces and symmetry types of convex 3-polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Geometric tolerance relative to the circumradius.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tolerance: f64,
    /// Certify the Jacobian rank in rational arithmetic.
    #[arg(long, global = true)]
    exact: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Omit per-stage timings so output is reproducible.
    #[arg(long, global = true)]
    no_timing: bool,
    /// Write the incidence Jacobian in MatrixMarket format.
    #[arg(long, global = true, value_name = "PATH")]
    matrix_dump: Option<PathBuf>,
    /// Write the basic region as a Wavefront OBJ mesh.
    #[arg(long, global = true, value_name = "PATH")]
    region_dump: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Print a catalog polyhedron as OFF.
    Generate {
        /// Catalog name with optional parameters, e.g. `pyramid:q=4,zeta=0.5`.
        spec: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run every analysis and check the identities.
    Analyze { input: String },
    /// Combinatorial and symmetry equivalence of two inputs.
    Compare { first: String, second: String },
    /// Symmetry group, orbits and the symmetry-type dimension.
    Symmetry { input: String },
    /// Incidence Jacobian rank and realization-space dimension.
    Realization { input: String },
    /// Clip the surface by a fundamental region of the reflection group.
    BasicRegion { input: String },
}

enum Failure {
    /// Bad input: exit code 2.
    Input(anyhow::Error),
    /// An identity did not hold: exit code 1.
    Identity(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

/// An OFF path if one exists on disk (or the argument ends in `.off`),
/// otherwise a catalog spec. Files whose vertex centroid is off the origin
/// are re-centered.
fn load_input(input: &str) -> Result<Polyhedron, Failure> {
    let path = Path::new(input);
    let p = if path.is_file() || input.to_ascii_lowercase().ends_with(".off") {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {input}"))
            .map_err(Failure::Input)?;
        let p = load_off(&text)
            .with_context(|| format!("parsing {input}"))
            .map_err(Failure::Input)?;
        if p.barycenter().norm() <= 1e-12 * p.circumradius() {
            p
        } else {
            center_at_centroid(&p)
                .with_context(|| format!("centering {input}"))
                .map_err(Failure::Input)?
        }
    } else {
        let spec = CatalogSpec::parse(input).map_err(|e| Failure::Input(e.into()))?;
        generate_spec(&spec).map_err(|e| Failure::Input(e.into()))?
    };
    Ok(p)
}

fn load_valid(input: &str, tol: f64) -> Result<Polyhedron, Failure> {
    let p = load_input(input)?;
    let report = validate(&p, tol);
    if !report.is_valid() {
        return Err(Failure::Input(anyhow!("{input}: invalid polyhedron: {}", report.messages.join("; "))));
    }
    Ok(p)
}

/// Writes to stdout, ignoring a closed pipe.
fn out(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn emit(format: Format, value: &serde_json::Value, text: impl FnOnce() -> String) {
    match format {
        Format::Json => out(&(serde_json::to_string_pretty(value).expect("json values serialize") + "\n")),
        Format::Text => out(&text()),
    }
}

fn dumps(p: &Polyhedron, common: &Common) -> anyhow::Result<()> {
    if let Some(path) = &common.matrix_dump {
        let j = assemble_jacobian(p)?;
        std::fs::write(path, j.to_matrix_market()).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &common.region_dump {
        let g = symmetry_group(p, SYMMETRY_TOL)?;
        let region = clip_surface(p, &fundamental_region(&g)?)?;
        std::fs::write(path, to_obj(&region)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn text_lines(value: &serde_json::Value) -> String {
    let mut out = String::new();
    if let Some(map) = value.as_object() {
        for (k, v) in map {
            out.push_str(&format!("{k}: {v}\n"));
        }
    }
    out
}

fn run(cli: Cli) -> Result<(), Failure> {
    let common = &cli.common;
    match cli.command {
        Command::Generate { spec, output } => {
            let spec = CatalogSpec::parse(&spec).map_err(|e| Failure::Input(e.into()))?;
            let p = generate_spec(&spec).map_err(|e| Failure::Input(e.into()))?;
            let off = to_off(&p);
            match output {
                Some(path) => std::fs::write(&path, off).with_context(|| format!("writing {}", path.display()))?,
                None => out(&off),
            }
            dumps(&p, common)?;
        }
        Command::Analyze { input } => {
            let p = load_input(&input)?;
            let opts = AnalysisOptions {
                tolerance: common.tolerance,
                exact: common.exact,
                timing: !common.no_timing,
                ..Default::default()
            };
            let report = analyze(&p, &input, &opts).map_err(|e| match e {
                polyreal::report::AnalysisError::Invalid(_) => Failure::Input(e.into()),
                other => Failure::Other(other.into()),
            })?;
            match common.format {
                Format::Json => out(&(report.to_json() + "\n")),
                Format::Text => out(&report.to_text()),
            }
            dumps(&p, common)?;
            if let Some(name) = report.first_failure() {
                return Err(Failure::Identity(name.to_string()));
            }
        }
        Command::Compare { first, second } => {
            let p = load_valid(&first, common.tolerance)?;
            let q = load_valid(&second, common.tolerance)?;
            let face = face_equivalent(&p, &q).is_some();
            let sym = symmetry_equivalent(&p, &q);
            let value = json!({ "schema": 1, "face_equivalent": face, "symmetry_equivalent": sym });
            emit(common.format, &value, || text_lines(&value));
        }
        Command::Symmetry { input } => {
            let p = load_valid(&input, common.tolerance)?;
            let g = symmetry_group(&p, SYMMETRY_TOL).map_err(anyhow::Error::from)?;
            let d = orbits(&p, &g).map_err(anyhow::Error::from)?;
            let st = symmetry_type_dimension(&p, &g).map_err(anyhow::Error::from)?;
            let orbit_summary = OrbitSummary {
                vertex_orbits: d.vertex_orbits.len(),
                edge_orbits: d.edge_orbits.len(),
                face_orbits: d.face_orbits.len(),
                epsilon: d.epsilon,
                mu_star: d.mu_star,
                vertex_deltas: d.vertex_deltas(),
                face_deltas: d.face_deltas(),
            };
            let value = json!({
                "schema": 1,
                "input": input,
                "group": GroupSummary::of(&g),
                "orbits": orbit_summary,
                "symmetry_type": st,
            });
            emit(common.format, &value, || {
                format!(
                    "group: {} order={}\nepsilon: {}\nmu_star: {}\ndim_symmetry_type: {}\ntheorem_holds: {}\n",
                    g.classification(),
                    g.order(),
                    st.epsilon,
                    st.mu_star,
                    st.dim_symmetry_type,
                    st.theorem_holds
                )
            });
            dumps(&p, common)?;
            if st.group_is_reflection && !st.theorem_holds {
                return Err(Failure::Identity("symmetry_type_dimension".into()));
            }
        }
        Command::Realization { input } => {
            let p = load_valid(&input, common.tolerance)?;
            let r = if common.exact {
                realization_report_exact(&p)
            } else {
                realization_report(&p)
            }
            .map_err(anyhow::Error::from)?;
            let value = json!({ "schema": 1, "input": input, "realization": r });
            emit(common.format, &value, || {
                format!(
                    "mu: {}\nrank: {}\ndim_mod_sim: {}\nexpected: {}\nfull_rank: {}\n",
                    r.mu, r.rank, r.dim_mod_sim, r.expected_dim_mod_sim, r.full_rank
                )
            });
            dumps(&p, common)?;
            if !r.full_rank {
                return Err(Failure::Identity("full_rank".into()));
            }
        }
        Command::BasicRegion { input } => {
            let p = load_valid(&input, common.tolerance)?;
            let g = symmetry_group(&p, SYMMETRY_TOL).map_err(anyhow::Error::from)?;
            let region = fundamental_region(&g).map_err(anyhow::Error::from)?;
            let b = clip_surface(&p, &region).map_err(anyhow::Error::from)?;
            let summary = RegionSummary::of(&b);
            let value = json!({ "schema": 1, "input": input, "region": region, "basic_region": summary });
            emit(common.format, &value, || {
                format!(
                    "kind: {:?}\nn: {}\ne: {}\nf: {}\nbeta: {}\nreal_edges: {}\neuler: {}\nlemma: {} = {} ({})\n",
                    summary.kind,
                    summary.n,
                    summary.e,
                    summary.f,
                    summary.beta,
                    summary.edges.real,
                    summary.euler,
                    summary.lemma.mu_region,
                    summary.lemma.two_e_minus_beta,
                    if summary.lemma.applicable { "applicable" } else { "outside hypothesis" }
                )
            });
            dumps(&p, common)?;
            if !summary.euler {
                return Err(Failure::Identity("basic_region_euler".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Identity(name)) => {
            eprintln!("failed identity: {name}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
