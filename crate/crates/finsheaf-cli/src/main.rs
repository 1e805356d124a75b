//! `finsheaf`: every analysis in the library as a subcommand.
//!
//! Check-style subcommands (`dualizable`, `reflexive`, `cm`, `cm-sheaf`,
//! `cm-closed`, `omega-check`, `baclawski`, `reisner`, `canonical`) exit 0
//! when the property holds and 1 when it fails, printing a witness either
//! way; every subcommand exits 2 on malformed input. `--json` switches the
//! report to machine-readable output with sorted keys.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use finsheaf::cm::{
    baclawski_report, canonical_sheaf, is_cm_closed, is_cm_sheaf, is_cm_space,
    omega_duality_sequences, CmPath, CmWitness,
};
use finsheaf::cohomology::{
    ext_skyscrapers, global_cohomology, homology, local_cohomology, point_local_cohomology,
    reduced_cohomology, reduced_homology,
};
use finsheaf::duality::{
    canonical_complex, canonical_stalks, dualize, reflexivity_check, sphere_report,
    CanonicalShape, CanonicalVerdict, DualizabilityReport,
};
use finsheaf::io;
use finsheaf::poset::{FinPoset, SubSpace};
use finsheaf::sheaf::{FreeStalkSheaf, PresentedSheaf, SheafComplex};
use finsheaf::simplicial::{order_complex, SimplicialComplex};
use finsheaf::zlinalg::GradedGroups;

#[derive(Parser)]
#[command(name = "finsheaf", version, about = "Exact sheaf cohomology and duality on finite posets")]
struct Cli {
    /// Poset file: JSON {"elements", "covers"} or `a < b` relation lines
    #[arg(long, global = true, value_name = "PATH")]
    poset: Option<PathBuf>,

    /// Facet file: one facet per line, whitespace-separated vertex labels
    #[arg(long, global = true, value_name = "PATH")]
    facets: Option<PathBuf>,

    /// Sheaf file: JSON {"poset", "stalk_ranks", "cover_maps"}
    #[arg(long, global = true, value_name = "PATH")]
    sheaf: Option<PathBuf>,

    /// Build the projective face poset from facets (drop the empty face)
    #[arg(long, global = true)]
    projective: bool,

    /// Machine-readable output
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension, purity, catenarity, locality, irreducibility, components
    Info,
    /// Homology of the space, or of the given sheaf
    Homology,
    /// Cohomology of the space, or of the given sheaf
    Cohomology,
    /// Reduced homology and cohomology of the space
    Reduced,
    /// Cohomology supported in a closed subset (or at one point of its star)
    LocalCohomology {
        /// Comma-separated labels of a closed subset
        #[arg(long, value_name = "LABELS")]
        closed_set: Option<String>,
        /// Closure of this point as the closed subset
        #[arg(long, value_name = "LABEL")]
        anchor: Option<String>,
        /// Point-local variant H^•_x(U_x, F) at this point
        #[arg(long, value_name = "LABEL")]
        point: Option<String>,
    },
    /// Ext groups between skyscrapers at two comparable points
    Ext {
        #[arg(long, value_name = "LABEL")]
        from: String,
        #[arg(long, value_name = "LABEL")]
        to: String,
    },
    /// Catenarity and which open intervals are homological spheres
    SphereReport,
    /// Check the two topological conditions for local dualizability
    Dualizable,
    /// Build the canonical complex (local or irreducible space)
    Canonical,
    /// The dual RHom(F, D^0) of the sheaf, stalk by stalk
    Dualize,
    /// Check that the sheaf matches its double dual stalkwise
    Reflexive,
    /// Cohen-Macaulayness of the space
    Cm,
    /// Cohen-Macaulayness of the sheaf, with its dual when it exists
    CmSheaf,
    /// Cohen-Macaulayness of a closed subspace inside the input space
    CmClosed {
        #[arg(long, value_name = "LABELS")]
        closed_set: Option<String>,
        #[arg(long, value_name = "LABEL")]
        anchor: Option<String>,
    },
    /// The canonical sheaf of a Cohen-Macaulay local space
    CanonicalSheaf,
    /// Duality against the canonical sheaf: exact rows, boundary, Gysin
    OmegaCheck {
        #[arg(long, value_name = "LABELS")]
        closed_set: Option<String>,
        #[arg(long, value_name = "LABEL")]
        anchor: Option<String>,
    },
    /// Order-theoretic Cohen-Macaulayness (bouquet conditions) vs ours
    Baclawski,
    /// Reisner's criterion by direct simplicial homology of links
    Reisner,
    /// Generators of the Stanley-Reisner ideal (minimal nonfaces)
    SrIdeal,
    /// Barycentric subdivision of the space
    Subdivide,
    /// The opposite order
    Opposite,
    /// Product with a second space
    Product {
        #[arg(long, value_name = "PATH")]
        against: PathBuf,
    },
    /// The complex of chains of the space
    OrderComplex,
}

/// What a subcommand hands back: a JSON report, its text rendering, and
/// whether the checked property holds (always true for plain computations).
struct Report {
    json: Value,
    text: String,
    ok: bool,
}

impl Report {
    fn of(json: Value, text: impl Into<String>) -> Report {
        Report { json, text: text.into(), ok: true }
    }

    fn checked(json: Value, text: impl Into<String>, ok: bool) -> Report {
        Report { json, text: text.into(), ok }
    }
}

/// The resolved input: always a space, sometimes a sheaf or a complex.
struct Inputs {
    space: Arc<FinPoset>,
    sheaf: Option<FreeStalkSheaf>,
    complex: Option<SimplicialComplex>,
}

impl Inputs {
    fn resolve(cli: &Cli) -> Result<Inputs> {
        let sources = [cli.poset.is_some(), cli.facets.is_some(), cli.sheaf.is_some()];
        if sources.iter().filter(|&&s| s).count() != 1 {
            bail!("give exactly one input: --poset, --facets or --sheaf");
        }
        if let Some(path) = &cli.poset {
            let space = Arc::new(io::load_poset(path)?);
            return Ok(Inputs { space, sheaf: None, complex: None });
        }
        if let Some(path) = &cli.facets {
            let facets = io::load_facets(path)?;
            let complex = SimplicialComplex::from_facets(&facets, cli.projective)?;
            let space = complex.face_poset()?.poset;
            return Ok(Inputs { space, sheaf: None, complex: Some(complex) });
        }
        let sheaf = io::load_sheaf(cli.sheaf.as_ref().expect("one source"))?;
        let space = sheaf.poset().clone();
        Ok(Inputs { space, sheaf: Some(sheaf), complex: None })
    }

    /// The coefficient complex: the given sheaf in degree 0, or constant Z.
    fn coefficients(&self) -> SheafComplex {
        let f = match &self.sheaf {
            Some(f) => f.clone(),
            None => FreeStalkSheaf::constant(self.space.clone()),
        };
        SheafComplex::from_sheaf(f, 0)
    }

    fn need_sheaf(&self) -> Result<&FreeStalkSheaf> {
        self.sheaf.as_ref().ok_or_else(|| anyhow!("this subcommand needs --sheaf"))
    }

    fn need_complex(&self) -> Result<&SimplicialComplex> {
        self.complex
            .as_ref()
            .ok_or_else(|| anyhow!("this subcommand needs --facets"))
    }

    fn index(&self, label: &str) -> Result<usize> {
        Ok(self.space.index_of(label)?)
    }

    /// A closed subset from `--closed-set a,b` or `--anchor x` (closure of x).
    fn closed_subset(
        &self,
        closed_set: &Option<String>,
        anchor: &Option<String>,
    ) -> Result<Option<SubSpace>> {
        match (closed_set, anchor) {
            (Some(_), Some(_)) => bail!("--closed-set and --anchor are alternatives"),
            (Some(labels), None) => {
                let members = labels
                    .split(',')
                    .map(|l| self.index(l.trim()))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Some(SubSpace::new(&self.space, members)))
            }
            (None, Some(label)) => {
                let x = self.index(label)?;
                Ok(Some(SubSpace::new(&self.space, self.space.down_set(x))))
            }
            (None, None) => Ok(None),
        }
    }
}

fn groups_value(g: &GradedGroups) -> Value {
    serde_json::to_value(g).expect("graded groups serialize")
}

fn label_map(space: &FinPoset, per_point: impl Fn(usize) -> Value) -> Value {
    let mut m = Map::new();
    for x in 0..space.len() {
        m.insert(space.label(x).to_string(), per_point(x));
    }
    Value::Object(m)
}

fn witness_value(space: &FinPoset, w: &CmWitness) -> Value {
    json!({
        "point": space.label(w.point),
        "degree": w.degree,
        "group": w.group,
    })
}

fn gate_value(space: &FinPoset, gate: &DualizabilityReport) -> Value {
    let failures: Vec<Value> = gate
        .intervals
        .iter()
        .filter(|v| !v.is_sphere)
        .map(|v| {
            json!({
                "lower": space.label(v.lower),
                "upper": space.label(v.upper),
                "dim": v.dim,
                "reduced_homology": groups_value(&v.reduced_homology),
            })
        })
        .collect();
    json!({
        "catenary": gate.is_catenary,
        "locally_dualizable": gate.is_locally_dualizable,
        "failures": failures,
    })
}

fn run(cli: &Cli) -> Result<Report> {
    let inputs = Inputs::resolve(cli)?;
    let space = &inputs.space;

    let report = match &cli.command {
        Command::Info => {
            let r = space.structure_report();
            let text = format!(
                "dim {}{}{}{}{}{}; closed points: {}; generic points: {}",
                r.dim,
                if r.is_pure { ", pure" } else { "" },
                if r.is_catenary { ", catenary" } else { "" },
                if r.is_local { ", local" } else { "" },
                if r.is_irreducible { ", irreducible" } else { "" },
                if r.is_connected { ", connected" } else { ", disconnected" },
                r.closed_points.join(" "),
                r.generic_points.join(" "),
            );
            Report::of(serde_json::to_value(&r)?, text)
        }

        Command::Homology => {
            let h = homology(&inputs.coefficients());
            Report::of(groups_value(&h), format!("{h}"))
        }

        Command::Cohomology => {
            let h = global_cohomology(&inputs.coefficients());
            Report::of(groups_value(&h), format!("{h}"))
        }

        Command::Reduced => {
            let h = reduced_homology(space);
            let c = reduced_cohomology(space);
            Report::of(
                json!({ "homology": groups_value(&h), "cohomology": groups_value(&c) }),
                format!("reduced homology {h}; reduced cohomology {c}"),
            )
        }

        Command::LocalCohomology { closed_set, anchor, point } => {
            let f = inputs.coefficients();
            let h = match (inputs.closed_subset(closed_set, anchor)?, point) {
                (Some(_), Some(_)) => bail!("--point excludes --closed-set/--anchor"),
                (Some(y), None) => local_cohomology(&f, &y)?,
                (None, Some(label)) => point_local_cohomology(&f, inputs.index(label)?),
                (None, None) => bail!("give --closed-set, --anchor or --point"),
            };
            Report::of(groups_value(&h), format!("{h}"))
        }

        Command::Ext { from, to } => {
            let h = ext_skyscrapers(space, inputs.index(from)?, inputs.index(to)?)?;
            Report::of(groups_value(&h), format!("{h}"))
        }

        Command::SphereReport => {
            let gate = sphere_report(space);
            let text = if gate.is_locally_dualizable {
                format!("catenary, every open interval a homological sphere ({} intervals)",
                    gate.intervals.len())
            } else if let Some(v) = gate.first_failure() {
                format!(
                    "fails: interval ({}, {}) has reduced homology {}, not a {}-sphere{}",
                    space.label(v.lower),
                    space.label(v.upper),
                    v.reduced_homology,
                    v.dim,
                    if gate.is_catenary { "" } else { "; not catenary" },
                )
            } else {
                "fails: not catenary".to_string()
            };
            Report::of(gate_value(space, &gate), text)
        }

        Command::Dualizable => {
            let gate = sphere_report(space);
            let ok = gate.is_locally_dualizable;
            let text = if ok { "locally dualizable" } else { "not locally dualizable" };
            Report::checked(gate_value(space, &gate), text, ok)
        }

        Command::Canonical => match canonical_complex(space) {
            CanonicalVerdict::Canonical(c) => {
                let stalks = canonical_stalks(space, &c.phi);
                let shape = match c.shape {
                    CanonicalShape::PointDualizing => json!("point-dualizing"),
                    CanonicalShape::GenericSkyscraper(g) => {
                        json!({ "generic-skyscraper": space.label(g) })
                    }
                };
                let text = match c.shape {
                    CanonicalShape::PointDualizing => {
                        "canonical complex: dualizing model at the closed point".to_string()
                    }
                    CanonicalShape::GenericSkyscraper(g) => format!(
                        "canonical complex: skyscraper at the generic point {}",
                        space.label(g)
                    ),
                };
                Report::checked(
                    json!({
                        "shape": shape,
                        "phi": label_map(space, |x| json!(c.phi.get(x))),
                        "stalks": label_map(space, |x| groups_value(&stalks[x])),
                        "complex": io::complex_to_json(&c.complex),
                    }),
                    text,
                    true,
                )
            }
            CanonicalVerdict::LocallyDualizable => Report::checked(
                json!({ "shape": "none", "locally_dualizable": true }),
                "locally dualizable, but neither local nor irreducible: no construction",
                false,
            ),
            CanonicalVerdict::NotDualizable(gate) => Report::checked(
                json!({ "shape": "none", "gate": gate_value(space, &gate) }),
                "no canonical complex: the sphere conditions fail",
                false,
            ),
        },

        Command::Dualize => {
            let d = dualize(&inputs.coefficients())?;
            let h = global_cohomology(&d);
            let text = format!(
                "dual cohomology {h}; stalks: {}",
                (0..space.len())
                    .map(|x| format!("{} {}", space.label(x), d.stalk_cohomology(x)))
                    .collect::<Vec<_>>()
                    .join(", "),
            );
            Report::of(
                json!({
                    "stalk_cohomology": label_map(space, |x| groups_value(&d.stalk_cohomology(x))),
                    "global_cohomology": groups_value(&h),
                    "complex": io::complex_to_json(&d),
                }),
                text,
            )
        }

        Command::Reflexive => {
            let ok = reflexivity_check(&inputs.coefficients())?;
            let text = if ok { "reflexive: F = DDF stalkwise" } else { "not reflexive" };
            Report::checked(json!({ "reflexive": ok }), text, ok)
        }

        Command::Cm => {
            let v = is_cm_space(space);
            let mut j = Map::new();
            j.insert("cm".into(), json!(v.is_cm));
            j.insert("gate".into(), gate_value(space, &v.gate));
            if let Some(w) = &v.witness {
                j.insert("witness".into(), witness_value(space, w));
            }
            let text = if v.is_cm {
                "Cohen-Macaulay".to_string()
            } else if let Some(w) = &v.witness {
                format!(
                    "not Cohen-Macaulay: U_{}* has reduced homology {} in degree {}",
                    space.label(w.point),
                    w.group,
                    w.degree,
                )
            } else {
                "not Cohen-Macaulay: the sphere conditions fail".to_string()
            };
            Report::checked(Value::Object(j), text, v.is_cm)
        }

        Command::CmSheaf => {
            let f = PresentedSheaf::from_free(inputs.need_sheaf()?);
            let v = is_cm_sheaf(&f)?;
            let path = match v.path {
                CmPath::Duality => "duality",
                CmPath::FreeCriterion => "free-criterion",
                CmPath::TorsionCriterion => "torsion-criterion",
            };
            let mut j = Map::new();
            j.insert("cm".into(), json!(v.is_cm));
            j.insert("r".into(), json!(v.r));
            j.insert("path".into(), json!(path));
            if let Some(w) = &v.witness {
                j.insert("witness".into(), witness_value(space, w));
            }
            if let Some(dual) = &v.dual {
                j.insert(
                    "dual_stalks".into(),
                    label_map(space, |x| json!(dual.stalk_group(x))),
                );
            }
            let text = if v.is_cm {
                format!("Cohen-Macaulay: dual concentrated in degree −{} ({path})", v.r)
            } else if let Some(w) = &v.witness {
                format!(
                    "not Cohen-Macaulay: dual has {} at {} in degree {}",
                    w.group,
                    space.label(w.point),
                    w.degree,
                )
            } else {
                "not Cohen-Macaulay".to_string()
            };
            Report::checked(Value::Object(j), text, v.is_cm)
        }

        Command::CmClosed { closed_set, anchor } => {
            let k = inputs
                .closed_subset(closed_set, anchor)?
                .ok_or_else(|| anyhow!("give --closed-set or --anchor"))?;
            let v = is_cm_closed(space, &k)?;
            let mut j = Map::new();
            j.insert("cm".into(), json!(v.is_cm));
            j.insert("codim".into(), json!(v.codim));
            j.insert("ext_concentrated".into(), json!(v.ext_concentrated));
            j.insert("omega_matches".into(), json!(v.omega_matches));
            if let Some(w) = &v.sheaf.witness {
                j.insert("witness".into(), witness_value(space, w));
            }
            let text = if v.is_cm {
                format!("Cohen-Macaulay closed subspace of codimension {}", v.codim)
            } else {
                format!("not Cohen-Macaulay (codimension {})", v.codim)
            };
            Report::checked(Value::Object(j), text, v.is_cm)
        }

        Command::CanonicalSheaf => {
            let omega = canonical_sheaf(space)?;
            let text = (0..space.len())
                .map(|x| format!("{} {}", space.label(x), omega.stalk_group(x)))
                .collect::<Vec<_>>()
                .join(", ");
            Report::of(
                json!({ "stalks": label_map(space, |x| json!(omega.stalk_group(x))) }),
                format!("canonical sheaf stalks: {text}"),
            )
        }

        Command::OmegaCheck { closed_set, anchor } => {
            let k = inputs.closed_subset(closed_set, anchor)?;
            let r = omega_duality_sequences(&inputs.coefficients(), k.as_ref())?;
            let rows: Vec<Value> = r
                .rows
                .iter()
                .map(|row| {
                    json!({
                        "degree": row.degree,
                        "middle": row.middle,
                        "free_side": row.free_side,
                        "torsion_side": row.torsion_side,
                        "exact": row.exact,
                    })
                })
                .collect();
            let gysin_ok = r
                .gysin
                .as_ref()
                .is_none_or(|g| g.concentrated && g.matches_dual && g.punctured_ok);
            let ok = r.all_rows_exact && r.boundary_global_duality && gysin_ok;
            let mut j = Map::new();
            j.insert("dim".into(), json!(r.dim));
            j.insert("rows".into(), Value::Array(rows));
            j.insert("rows_exact".into(), json!(r.all_rows_exact));
            j.insert("boundary_global_duality".into(), json!(r.boundary_global_duality));
            if let Some(g) = &r.gysin {
                j.insert(
                    "gysin".into(),
                    json!({
                        "codim": g.codim,
                        "concentrated": g.concentrated,
                        "group": g.group,
                        "matches_dual": g.matches_dual,
                        "punctured": g.punctured_ok,
                    }),
                );
            }
            let text = format!(
                "{} rows {}; boundary duality {}{}",
                r.rows.len(),
                if r.all_rows_exact { "exact" } else { "NOT exact" },
                if r.boundary_global_duality { "holds" } else { "FAILS" },
                match &r.gysin {
                    Some(g) => format!(
                        "; Gysin codim {} {} with {}",
                        g.codim,
                        if gysin_ok { "holds" } else { "FAILS" },
                        g.group,
                    ),
                    None => String::new(),
                },
            );
            Report::checked(Value::Object(j), text, ok)
        }

        Command::Baclawski => {
            let r = baclawski_report(space);
            let name = |x: &Option<usize>, bound: &str| match x {
                Some(i) => space.label(*i).to_string(),
                None => bound.to_string(),
            };
            let failures: Vec<Value> = r
                .failures
                .iter()
                .map(|f| {
                    json!({
                        "lower": name(&f.lower, "0̂"),
                        "upper": name(&f.upper, "1̂"),
                        "dim": f.dim,
                        "reduced_homology": groups_value(&f.reduced),
                    })
                })
                .collect();
            let text = format!(
                "proper intervals {}; up-cones {}; down-cones {}; global {} → Baclawski {}, ACM {}, sheaf-CM {}",
                yes(r.proper_intervals),
                yes(r.up_cones),
                yes(r.down_cones),
                yes(r.global),
                yes(r.is_baclawski_cm),
                yes(r.is_acm),
                yes(r.is_cm_here),
            );
            Report::checked(
                json!({
                    "proper_intervals": r.proper_intervals,
                    "up_cones": r.up_cones,
                    "down_cones": r.down_cones,
                    "global": r.global,
                    "baclawski_cm": r.is_baclawski_cm,
                    "acm": r.is_acm,
                    "sheaf_cm": r.is_cm_here,
                    "failures": failures,
                }),
                text,
                r.is_baclawski_cm,
            )
        }

        Command::Reisner => {
            let v = inputs.need_complex()?.reisner_check();
            let failures: Vec<Value> = v
                .failures
                .iter()
                .map(|f| json!({ "face": f.face, "degree": f.degree, "group": f.group }))
                .collect();
            let text = if v.is_cm {
                "satisfies Reisner's criterion over Z".to_string()
            } else {
                let f = &v.failures[0];
                format!(
                    "fails Reisner's criterion: link of {} has {} in degree {}",
                    f.face, f.group, f.degree,
                )
            };
            Report::checked(json!({ "cm": v.is_cm, "failures": failures }), text, v.is_cm)
        }

        Command::SrIdeal => {
            let gens = inputs.need_complex()?.sr_ideal()?;
            let text = if gens.is_empty() {
                "zero ideal (full simplex)".to_string()
            } else {
                gens.join(", ")
            };
            Report::of(json!({ "generators": gens }), text)
        }

        Command::Subdivide => poset_report(&space.barycentric(), cli.json),
        Command::Opposite => poset_report(&space.opposite(), cli.json),
        Command::Product { against } => {
            poset_report(&space.product(&io::load_poset(against)?), cli.json)
        }

        Command::OrderComplex => {
            let k = order_complex(space)?;
            let facets: Vec<Vec<&str>> = k
                .facets()
                .iter()
                .map(|f| f.iter().map(|&v| k.vertices()[v].as_str()).collect())
                .collect();
            let text = io::facets_to_text(&k);
            Report::of(json!({ "facets": facets }), text.trim_end().to_string())
        }
    };
    Ok(report)
}

fn yes(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}

fn poset_report(x: &FinPoset, _json: bool) -> Report {
    Report::of(io::poset_to_json(x), io::poset_to_text(x).trim_end().to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", io::to_pretty(&report.json));
            } else {
                println!("{}", report.text);
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
