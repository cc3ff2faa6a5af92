//! The full analysis pipeline behind the command-line front-end.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::basic_region::{
    clip_surface, edge_orbit_via_region, euler_basic_check, fundamental_region, lemma_multiplicity_check, BasicRegion,
    BasicRegionError, LemmaCheck, RegionEdgeCount, RegionKind,
};
use crate::combinatorics::{edge_graph, euler_check, incidence_structure, steinitz_check, CombinatoricsError};
use crate::geometry::{validate, Polyhedron, ValidationReport, DEFAULT_TOL};
use crate::realization::{realization_report, realization_report_exact, RealizationError, RealizationReport};
use crate::symmetry::{
    orbits, symmetry_group, symmetry_type_dimension, Classification, IsometryGroup, SymmetryError,
    SymmetryTypeReport, SYMMETRY_TOL,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("invalid polyhedron: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error(transparent)]
    Combinatorics(#[from] CombinatoricsError),
    #[error(transparent)]
    Realization(#[from] RealizationError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    BasicRegion(#[from] BasicRegionError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisOptions {
    /// Validation tolerance relative to the circumradius.
    pub tolerance: f64,
    pub symmetry_tolerance: f64,
    /// Certify the Jacobian rank over the rationals.
    pub exact: bool,
    pub timing: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOL,
            symmetry_tolerance: SYMMETRY_TOL,
            exact: false,
            timing: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IncidenceSummary {
    pub r: usize,
    pub e: usize,
    pub s: usize,
    pub mu: usize,
    pub euler: bool,
    pub steinitz: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupSummary {
    pub order: usize,
    pub classification: Classification,
    pub symbol: String,
    pub fix_dim: usize,
    pub rot_dim: usize,
    pub reflection_group: bool,
}

impl GroupSummary {
    pub fn of(g: &IsometryGroup) -> Self {
        Self {
            order: g.order(),
            classification: g.classification(),
            symbol: g.classification().to_string(),
            fix_dim: g.fix_dim(),
            rot_dim: g.rot_dim(),
            reflection_group: g.generators_are_reflections(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitSummary {
    pub vertex_orbits: usize,
    pub edge_orbits: usize,
    pub face_orbits: usize,
    pub epsilon: usize,
    pub mu_star: usize,
    pub vertex_deltas: Vec<usize>,
    pub face_deltas: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionSummary {
    pub kind: RegionKind,
    pub n: usize,
    pub e: usize,
    pub f: usize,
    pub beta: usize,
    pub euler: bool,
    pub edges: RegionEdgeCount,
    pub lemma: LemmaCheck,
}

impl RegionSummary {
    pub fn of(b: &BasicRegion) -> Self {
        let (n, e, f) = b.counts();
        Self {
            kind: b.kind,
            n,
            e,
            f,
            beta: b.beta,
            euler: euler_basic_check(b),
            edges: edge_orbit_via_region(b),
            lemma: lemma_multiplicity_check(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub input: String,
    pub validation: ValidationReport,
    pub incidence: IncidenceSummary,
    pub realization: RealizationReport,
    pub group: GroupSummary,
    pub orbits: OrbitSummary,
    pub symmetry_type: SymmetryTypeReport,
    /// Present for reflection groups other than the trivial one.
    pub basic_region: Option<RegionSummary>,
    /// Milliseconds per stage.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<BTreeMap<String, f64>>,
}

struct Clock {
    enabled: bool,
    last: Instant,
    stages: BTreeMap<String, f64>,
}

impl Clock {
    fn new(enabled: bool) -> Self {
        Self {
            enabled,
            last: Instant::now(),
            stages: BTreeMap::new(),
        }
    }

    fn lap(&mut self, stage: &str) {
        let now = Instant::now();
        self.stages
            .insert(stage.to_string(), (now - self.last).as_secs_f64() * 1e3);
        self.last = now;
    }

    fn finish(self) -> Option<BTreeMap<String, f64>> {
        self.enabled.then_some(self.stages)
    }
}

/// Runs validation, combinatorics, the rank certificate, symmetry detection,
/// orbit counting, the symmetry-type count and, for reflection groups, the
/// basic-region checks.
pub fn analyze(p: &Polyhedron, input: &str, opts: &AnalysisOptions) -> Result<AnalysisReport, AnalysisError> {
    let mut clock = Clock::new(opts.timing);
    let validation = validate(p, opts.tolerance);
    if !validation.is_valid() {
        return Err(AnalysisError::Invalid(validation.messages));
    }
    clock.lap("validate");

    let inc = incidence_structure(p)?;
    let incidence = IncidenceSummary {
        r: inc.num_vertices(),
        e: inc.num_edges(),
        s: inc.num_faces(),
        mu: inc.mu(),
        euler: euler_check(&inc),
        steinitz: steinitz_check(&edge_graph(&inc)),
    };
    clock.lap("combinatorics");

    let realization = if opts.exact {
        realization_report_exact(p)?
    } else {
        realization_report(p)?
    };
    clock.lap("realization");

    let g = symmetry_group(p, opts.symmetry_tolerance)?;
    let d = orbits(p, &g)?;
    let orbit_summary = OrbitSummary {
        vertex_orbits: d.vertex_orbits.len(),
        edge_orbits: d.edge_orbits.len(),
        face_orbits: d.face_orbits.len(),
        epsilon: d.epsilon,
        mu_star: d.mu_star,
        vertex_deltas: d.vertex_deltas(),
        face_deltas: d.face_deltas(),
    };
    let symmetry_type = symmetry_type_dimension(p, &g)?;
    clock.lap("symmetry");

    let basic_region = match fundamental_region(&g) {
        Ok(region) => Some(RegionSummary::of(&clip_surface(p, &region)?)),
        Err(BasicRegionError::NotReflectionGroup) => None,
        Err(e) => return Err(e.into()),
    };
    clock.lap("basic_region");

    Ok(AnalysisReport {
        schema: SCHEMA_VERSION,
        input: input.to_string(),
        validation,
        incidence,
        realization,
        group: GroupSummary::of(&g),
        orbits: orbit_summary,
        symmetry_type,
        basic_region,
        timings: clock.finish(),
    })
}

impl AnalysisReport {
    /// The first identity that does not hold, if any.
    pub fn first_failure(&self) -> Option<&'static str> {
        let st = &self.symmetry_type;
        let checks = [
            (self.incidence.euler, "euler"),
            (self.incidence.steinitz, "steinitz"),
            (self.incidence.mu == 2 * self.incidence.e, "mu_equals_2e"),
            (self.realization.full_rank, "full_rank"),
            (
                self.realization.dim_mod_sim == self.realization.expected_dim_mod_sim,
                "dim_mod_sim",
            ),
            (!st.group_is_reflection || st.theorem_holds, "symmetry_type_dimension"),
            (self.basic_region.as_ref().is_none_or(|b| b.euler), "basic_region_euler"),
            (
                self.basic_region
                    .as_ref()
                    .is_none_or(|b| !b.lemma.applicable || b.lemma.equality),
                "basic_region_lemma",
            ),
        ];
        checks.into_iter().find(|(ok, _)| !ok).map(|(_, name)| name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let i = &self.incidence;
        let r = &self.realization;
        let g = &self.group;
        let st = &self.symmetry_type;
        let _ = writeln!(out, "input: {}", self.input);
        let _ = writeln!(
            out,
            "combinatorics: r={} e={} s={} mu={} euler={} steinitz={}",
            i.r, i.e, i.s, i.mu, i.euler, i.steinitz
        );
        let _ = writeln!(
            out,
            "realization: rank={} dim_face_type={} dim_mod_sim={} (e-1={}) full_rank={}{}",
            r.rank,
            r.dim_face_type,
            r.dim_mod_sim,
            r.expected_dim_mod_sim,
            r.full_rank,
            if r.exact { " exact" } else { "" }
        );
        let _ = writeln!(
            out,
            "group: {} order={} fix_dim={} rot_dim={} reflection={}",
            g.symbol, g.order, g.fix_dim, g.rot_dim, g.reflection_group
        );
        let _ = writeln!(
            out,
            "orbits: vertices={} edges={} faces={} mu*={}",
            self.orbits.vertex_orbits, self.orbits.edge_orbits, self.orbits.face_orbits, self.orbits.mu_star
        );
        let _ = writeln!(
            out,
            "symmetry type: dim={} epsilon={} holds={}",
            st.dim_symmetry_type, st.epsilon, st.theorem_holds
        );
        if let Some(b) = &self.basic_region {
            let _ = writeln!(
                out,
                "basic region: {:?} n={} e={} f={} beta={} real_edges={} euler={} lemma={}/{}",
                b.kind, b.n, b.e, b.f, b.beta, b.edges.real, b.euler, b.lemma.mu_region, b.lemma.two_e_minus_beta
            );
        }
        if let Some(t) = &self.timings {
            let parts: Vec<String> = t.iter().map(|(k, v)| format!("{k}={v:.2}ms")).collect();
            let _ = writeln!(out, "timings: {}", parts.join(" "));
        }
        out
    }
}
