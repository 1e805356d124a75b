//! Simplicial complexes with labeled vertices, independent of the sheaf
//! pipeline.
//!
//! A complex is stored as its facet list plus the derived set of all faces;
//! the `projective` flag records whether the empty face participates in the
//! face poset (an affine complex is a down-closed family of subsets of a
//! simplex including `∅`; the projective variant discards `∅`, matching the
//! subset poset of a simplex with its bottom removed). [`face_poset`]
//! produces that poset together with the embedding of each element as a
//! vertex set, which is the bridge to the rest of the crate.
//!
//! Everything homological here is computed from literal boundary matrices —
//! `∂σ = Σ (−1)^j (σ − v_j)` over the faces of each dimension, augmented by
//! the empty face — precisely so that [`reisner_check`] is an oracle that
//! shares no code path with the poset-side Cohen–Macaulay machinery it is
//! compared against: a complex satisfies Reisner's criterion over `Z` iff
//! every link (the link of `∅` being the whole complex) has vanishing
//! reduced homology below its dimension.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use std::sync::Arc;

use crate::poset::FinPoset;
use crate::zlinalg::{FgGroup, FreeComplexZ, GradedGroups, IntMatrix};
use crate::{Error, Result};

/// The label reserved for the empty face in facet-derived posets.
pub const EMPTY_FACE: &str = "∅";

/// A finite simplicial complex on labeled vertices.
///
/// Faces are kept as sorted lists of vertex indices, indices assigned by
/// first appearance in the facet list. The facet list is normalized to be
/// mutually non-contained; the full face set is derived and includes the
/// empty face implicitly (its visibility is what [`is_projective`][se]
/// controls).
///
/// [se]: SimplicialComplex::is_projective
#[derive(Debug, Clone)]
pub struct SimplicialComplex {
    vertices: Vec<String>,
    facets: Vec<Vec<usize>>,
    /// every nonempty face, sorted by (size, lexicographic on indices)
    faces: Vec<Vec<usize>>,
    projective: bool,
}

/// A face poset with the embedding of each element as a set of vertices.
pub struct FacePoset {
    pub poset: Arc<FinPoset>,
    /// For each poset element, its face as sorted vertex indices into the
    /// complex's vertex list; the empty face (affine case) is `[]`.
    pub face_vertices: Vec<Vec<usize>>,
}

/// One failure of Reisner's criterion: a face whose link has homology
/// strictly below the link's dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReisnerFailure {
    /// Label of the offending face (`"∅"` for the empty face).
    pub face: String,
    pub degree: i64,
    pub group: FgGroup,
}

/// Outcome of [`reisner_check`]: Cohen–Macaulayness over the integers by
/// direct simplicial homology of links.
#[derive(Debug, Clone)]
pub struct ReisnerVerdict {
    pub is_cm: bool,
    /// Every violation, in face order (`∅` first).
    pub failures: Vec<ReisnerFailure>,
}

fn validate_vertex_label(label: &str) -> Result<()> {
    if label.is_empty() {
        return Err(Error::Parse("vertex labels must be nonempty".into()));
    }
    if label == EMPTY_FACE {
        return Err(Error::Parse(format!(
            "vertex label {EMPTY_FACE} is reserved for the empty face"
        )));
    }
    if label.chars().any(|c| c.is_whitespace() || c.is_control()) {
        return Err(Error::Parse(format!(
            "vertex label {label:?} contains whitespace or control characters"
        )));
    }
    Ok(())
}

impl SimplicialComplex {
    /// Build a complex from its facets (faces listed redundantly are
    /// absorbed; an empty facet is allowed and denotes the empty complex
    /// `{∅}`). Vertex indices follow first appearance.
    pub fn from_facets<S, F>(facets: &[F], projective: bool) -> Result<SimplicialComplex>
    where
        S: AsRef<str>,
        F: AsRef<[S]>,
    {
        if facets.is_empty() {
            return Err(Error::Parse(
                "a simplicial complex needs at least one facet".into(),
            ));
        }
        let mut vertices: Vec<String> = Vec::new();
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        let mut raw: Vec<Vec<usize>> = Vec::new();
        for facet in facets {
            let mut f: Vec<usize> = Vec::new();
            for v in facet.as_ref() {
                let label = v.as_ref();
                validate_vertex_label(label)?;
                let i = *index.entry(label.to_string()).or_insert_with(|| {
                    vertices.push(label.to_string());
                    vertices.len() - 1
                });
                f.push(i);
            }
            f.sort_unstable();
            f.dedup();
            raw.push(f);
        }
        // keep only the maximal input faces
        let mut facets: Vec<Vec<usize>> = Vec::new();
        for f in &raw {
            if raw
                .iter()
                .any(|g| g.len() > f.len() && f.iter().all(|v| g.contains(v)))
            {
                continue;
            }
            if !facets.contains(f) {
                facets.push(f.clone());
            }
        }
        let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
        for f in &facets {
            let k = f.len();
            for mask in 1u64..(1 << k) {
                let sub: Vec<usize> = (0..k).filter(|j| mask & (1 << j) != 0).map(|j| f[j]).collect();
                faces.insert(sub);
            }
        }
        let mut faces: Vec<Vec<usize>> = faces.into_iter().collect();
        faces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(SimplicialComplex { vertices, facets, faces, projective })
    }

    pub fn is_projective(&self) -> bool {
        self.projective
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    /// Maximal faces, as sorted vertex indices.
    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    /// Nonempty faces, sorted by size then lexicographically.
    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    /// Number of faces the face poset will have (counts `∅` iff affine).
    pub fn face_count(&self) -> usize {
        self.faces.len() + usize::from(!self.projective)
    }

    /// Largest face size minus one; the empty complex has dimension −1.
    pub fn dim(&self) -> i64 {
        self.faces.last().map_or(-1, |f| f.len() as i64 - 1)
    }

    /// Whether the vertex set (given as indices) spans a face; the empty set
    /// always does.
    pub fn contains(&self, face: &[usize]) -> bool {
        let mut f = face.to_vec();
        f.sort_unstable();
        f.dedup();
        f.is_empty() || self.faces.binary_search_by(|g| g.len().cmp(&f.len()).then_with(|| g.cmp(&f))).is_ok()
    }

    /// Human name of a face: its vertex labels in lexicographic order,
    /// concatenated when every vertex label is a single character and
    /// comma-separated otherwise; the empty face is `"∅"`.
    pub fn face_label(&self, face: &[usize]) -> String {
        if face.is_empty() {
            return EMPTY_FACE.to_string();
        }
        let mut labels: Vec<&str> = face.iter().map(|&v| self.vertices[v].as_str()).collect();
        labels.sort_unstable();
        let sep = if self.vertices.iter().all(|l| l.chars().count() == 1) { "" } else { "," };
        labels.join(sep)
    }

    /// The link of a face given by vertex labels: all faces disjoint from it
    /// whose union with it is again a face. Returned as an affine complex on
    /// the vertices it actually touches.
    pub fn link<S: AsRef<str>>(&self, sigma: &[S]) -> Result<SimplicialComplex> {
        let mut s: Vec<usize> = Vec::with_capacity(sigma.len());
        for v in sigma {
            let label = v.as_ref();
            match self.vertices.iter().position(|w| w == label) {
                Some(i) => s.push(i),
                None => return Err(Error::UnknownElement(label.to_string())),
            }
        }
        s.sort_unstable();
        s.dedup();
        if !self.contains(&s) {
            return Err(Error::BadSubset {
                expected: "a face of the complex",
                detail: format!("{} is not a face", self.face_label(&s)),
            });
        }
        let link_facets: Vec<Vec<&str>> = self
            .facets
            .iter()
            .filter(|f| s.iter().all(|v| f.contains(v)))
            .map(|f| {
                f.iter()
                    .filter(|v| !s.contains(v))
                    .map(|&v| self.vertices[v].as_str())
                    .collect()
            })
            .collect();
        SimplicialComplex::from_facets(&link_facets, false)
    }

    /// Reduced homology from literal boundary matrices, empty face included:
    /// the augmentation `∂(vertex) = ∅` sits at the bottom, so the empty
    /// complex `{∅}` reports `Z` in degree −1 and any nonempty complex
    /// reports nothing there.
    pub fn reduced_homology(&self) -> GradedGroups {
        if self.faces.is_empty() {
            return GradedGroups::single(-1, FgGroup::free(1));
        }
        let d = self.dim();
        let mut by_dim: Vec<Vec<&Vec<usize>>> = vec![Vec::new(); (d + 1) as usize];
        for f in &self.faces {
            by_dim[f.len() - 1].push(f);
        }
        let place: Vec<BTreeMap<&[usize], usize>> = by_dim
            .iter()
            .map(|fs| fs.iter().enumerate().map(|(i, f)| (f.as_slice(), i)).collect())
            .collect();
        // cochain layout: degree −i holds the i-faces, so the boundary maps
        // ascend and the empty face sits at degree +1
        let mut ranks: Vec<usize> = Vec::new();
        let mut diffs: Vec<IntMatrix> = Vec::new();
        for i in (0..=d as usize).rev() {
            ranks.push(by_dim[i].len());
        }
        ranks.push(1); // the empty face
        for i in (1..=d as usize).rev() {
            let mut m = IntMatrix::zeros(by_dim[i - 1].len(), by_dim[i].len());
            for (col, f) in by_dim[i].iter().enumerate() {
                for j in 0..f.len() {
                    let mut sub: Vec<usize> = (*f).clone();
                    sub.remove(j);
                    let row = place[i - 1][sub.as_slice()];
                    let sign = if j % 2 == 0 { 1 } else { -1 };
                    m.set(row, col, BigInt::from(sign));
                }
            }
            diffs.push(m);
        }
        let mut aug = IntMatrix::zeros(1, by_dim[0].len());
        for col in 0..by_dim[0].len() {
            aug.set(0, col, BigInt::from(1));
        }
        diffs.push(aug);
        FreeComplexZ::from_dense(-d, ranks, diffs)
            .expect("simplicial boundaries square to zero")
            .homology()
            .negate_degrees()
    }

    /// Reisner's criterion over `Z`: every link, the link of `∅` included,
    /// has reduced homology concentrated in the link's own dimension or
    /// above (equivalently, exactly there or nowhere).
    pub fn reisner_check(&self) -> ReisnerVerdict {
        let mut failures = Vec::new();
        let empty: [&str; 0] = [];
        let mut probe = |label: String, link: &SimplicialComplex| {
            let top = link.dim();
            for (degree, group) in link.reduced_homology().iter() {
                if degree < top && !group.is_zero() {
                    failures.push(ReisnerFailure { face: label.clone(), degree, group: group.clone() });
                }
            }
        };
        probe(EMPTY_FACE.to_string(), &self.link(&empty).expect("∅ is a face"));
        for f in &self.faces {
            let labels: Vec<&str> = f.iter().map(|&v| self.vertices[v].as_str()).collect();
            let link = self.link(&labels).expect("iterating over faces");
            probe(self.face_label(f), &link);
        }
        ReisnerVerdict { is_cm: failures.is_empty(), failures }
    }

    /// Generators of the Stanley–Reisner ideal: the minimal nonfaces, as
    /// squarefree monomials `x<label>` joined by `·`, sorted. Affine
    /// complexes only — the ideal presents the affine coordinate ring.
    pub fn sr_ideal(&self) -> Result<Vec<String>> {
        if self.projective {
            return Err(Error::Unsupported(
                "Stanley–Reisner generators are exported for affine complexes".into(),
            ));
        }
        let n = self.vertices.len();
        let mut candidates: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut with_empty: Vec<&[usize]> = vec![&[]];
        with_empty.extend(self.faces.iter().map(|f| f.as_slice()));
        for f in with_empty {
            for v in 0..n {
                if !f.contains(&v) {
                    let mut c = f.to_vec();
                    c.push(v);
                    c.sort_unstable();
                    candidates.insert(c);
                }
            }
        }
        let mut minimal: Vec<Vec<usize>> = candidates
            .into_iter()
            .filter(|c| {
                !self.contains(c)
                    && (0..c.len()).all(|j| {
                        let mut sub = c.clone();
                        sub.remove(j);
                        self.contains(&sub)
                    })
            })
            .collect();
        minimal.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        Ok(minimal
            .into_iter()
            .map(|c| {
                let mut vars: Vec<String> =
                    c.iter().map(|&v| format!("x{}", self.vertices[v])).collect();
                vars.sort();
                vars.join("·")
            })
            .collect())
    }

    /// The poset of faces under inclusion, `∅` included iff the complex is
    /// affine, elements ordered by size then lexicographically, labeled by
    /// [`face_label`][Self::face_label].
    pub fn face_poset(&self) -> Result<FacePoset> {
        let mut members: Vec<Vec<usize>> = Vec::new();
        if !self.projective {
            members.push(Vec::new());
        }
        members.extend(self.faces.iter().cloned());
        if members.is_empty() {
            return Ok(FacePoset { poset: Arc::new(FinPoset::empty()), face_vertices: Vec::new() });
        }
        let labels: Vec<String> = members.iter().map(|f| self.face_label(f)).collect();
        let mut seen: BTreeMap<&str, &[usize]> = BTreeMap::new();
        for (label, face) in labels.iter().zip(&members) {
            if let Some(other) = seen.insert(label, face) {
                return Err(Error::Parse(format!(
                    "faces {other:?} and {face:?} both answer to {label}; \
                     rename vertices so face names stay distinct"
                )));
            }
        }
        let mut lt: Vec<(String, String)> = Vec::new();
        for (i, a) in members.iter().enumerate() {
            for (j, b) in members.iter().enumerate() {
                if i != j && a.len() < b.len() && a.iter().all(|v| b.contains(v)) {
                    lt.push((labels[i].clone(), labels[j].clone()));
                }
            }
        }
        let poset = FinPoset::from_relations(&labels, &lt)?;
        Ok(FacePoset { poset: Arc::new(poset), face_vertices: members })
    }
}

/// The complex of chains of a poset: vertices are the elements, faces the
/// nonempty totally ordered subsets, so the face poset of the result is the
/// barycentric subdivision. Refuses element labels that collide with the
/// reserved empty-face name.
pub fn order_complex(x: &FinPoset) -> Result<SimplicialComplex> {
    if x.is_empty() {
        return SimplicialComplex::from_facets(&[Vec::<String>::new()], false);
    }
    let chains = x.chains(None, None, None);
    let as_labels: Vec<Vec<&str>> = chains
        .iter()
        .map(|c| c.iter().map(|&i| x.label(i)).collect())
        .collect();
    SimplicialComplex::from_facets(&as_labels, false)
}

/// The ten facets of the six-vertex triangulation of the real projective
/// plane. Fixtures built from it are validated by homology — `Z/2` in
/// degree 1 and nothing else — rather than trusting the transcription.
pub fn projective_plane_facets() -> [[&'static str; 3]; 10] {
    [
        ["1", "2", "3"],
        ["1", "2", "4"],
        ["1", "3", "5"],
        ["1", "4", "6"],
        ["1", "5", "6"],
        ["2", "3", "6"],
        ["2", "4", "5"],
        ["2", "5", "6"],
        ["3", "4", "5"],
        ["3", "4", "6"],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cm::is_cm_space;
    use crate::cohomology::reduced_homology;
    use crate::family::v_space;
    use crate::poset::FinPoset;

    fn complex(facets: &[&[&str]], projective: bool) -> SimplicialComplex {
        SimplicialComplex::from_facets(facets, projective).expect("valid facets")
    }

    fn tetra_boundary() -> SimplicialComplex {
        complex(&[&["1", "2", "3"], &["1", "2", "4"], &["1", "3", "4"], &["2", "3", "4"]], false)
    }

    fn four_cycle() -> SimplicialComplex {
        complex(&[&["1", "2"], &["2", "3"], &["3", "4"], &["1", "4"]], false)
    }

    fn projective_plane(projective: bool) -> SimplicialComplex {
        SimplicialComplex::from_facets(&projective_plane_facets(), projective)
            .expect("valid facets")
    }

    fn zmod(n: i64) -> FgGroup {
        FgGroup::from_parts_i64(0, &[n])
    }

    #[test]
    fn face_counts_of_small_complexes() {
        let triangle = complex(&[&["1", "2", "3"]], false);
        assert_eq!(triangle.face_count(), 8);
        assert_eq!(triangle.dim(), 2);

        let hollow = complex(&[&["1", "2"], &["1", "3"], &["2", "3"]], false);
        assert_eq!(hollow.face_count(), 7);
        let hollow_p = complex(&[&["1", "2"], &["1", "3"], &["2", "3"]], true);
        assert_eq!(hollow_p.face_count(), 6);
        assert_eq!(hollow_p.dim(), 1);

        let rp = projective_plane(true);
        assert_eq!(rp.face_count(), 31); // 6 vertices, 15 edges, 10 triangles
        assert_eq!(rp.dim(), 2);

        // redundant and duplicated input faces are absorbed into the facets
        let absorbed = complex(&[&["1", "2", "3"], &["1", "2"], &["3", "2", "1"]], false);
        assert_eq!(absorbed.facets(), &[vec![0, 1, 2]]);
    }

    #[test]
    fn the_projective_plane_fixture_has_its_torsion_signature() {
        // gate for every test that leans on this triangulation
        let rp = projective_plane(true);
        assert_eq!(rp.reduced_homology(), GradedGroups::single(1, zmod(2)));
    }

    #[test]
    fn boundary_homology_of_spheres_and_degenerate_complexes() {
        assert_eq!(
            tetra_boundary().reduced_homology(),
            GradedGroups::single(2, FgGroup::free(1))
        );
        assert_eq!(four_cycle().reduced_homology(), GradedGroups::single(1, FgGroup::free(1)));
        let solid = complex(&[&["1", "2", "3", "4"]], false);
        assert_eq!(solid.reduced_homology(), GradedGroups::new());
        let point = complex(&[&["1"]], false);
        assert_eq!(point.reduced_homology(), GradedGroups::new());
        let empty = complex(&[&[]], false);
        assert_eq!(empty.reduced_homology(), GradedGroups::single(-1, FgGroup::free(1)));
    }

    #[test]
    fn links_in_the_tetrahedron_boundary() {
        let k = tetra_boundary();
        let vertex_link = k.link(&["1"]).expect("a vertex");
        assert_eq!(vertex_link.facets().len(), 3);
        assert_eq!(
            vertex_link.reduced_homology(),
            GradedGroups::single(1, FgGroup::free(1))
        );
        let edge_link = k.link(&["1", "2"]).expect("an edge");
        assert_eq!(edge_link.reduced_homology(), GradedGroups::single(0, FgGroup::free(1)));
        let facet_link = k.link(&["1", "2", "3"]).expect("a facet");
        assert_eq!(facet_link.dim(), -1);
        assert_eq!(
            facet_link.reduced_homology(),
            GradedGroups::single(-1, FgGroup::free(1))
        );
        assert!(matches!(
            k.link(&["1", "2", "3", "4"]),
            Err(Error::BadSubset { .. })
        ));
        assert!(matches!(k.link(&["7"]), Err(Error::UnknownElement(_))));
    }

    #[test]
    fn reisner_verdicts_match_the_classical_examples() {
        assert!(tetra_boundary().reisner_check().is_cm);
        assert!(four_cycle().reisner_check().is_cm);
        assert!(complex(&[&["1", "2", "3", "4"]], false).reisner_check().is_cm);

        let rp = projective_plane(false);
        let verdict = rp.reisner_check();
        assert!(!verdict.is_cm);
        assert_eq!(
            verdict.failures,
            vec![ReisnerFailure { face: EMPTY_FACE.into(), degree: 1, group: zmod(2) }]
        );

        let split = complex(&[&["1", "2"], &["3", "4"]], false);
        let verdict = split.reisner_check();
        assert_eq!(verdict.failures.len(), 1);
        assert_eq!(
            verdict.failures[0],
            ReisnerFailure { face: EMPTY_FACE.into(), degree: 0, group: FgGroup::free(1) }
        );
    }

    #[test]
    fn reisner_agrees_with_the_sheaf_verdict_across_fixtures() {
        let fixtures: Vec<(&str, SimplicialComplex)> = vec![
            ("solid tetrahedron", complex(&[&["1", "2", "3", "4"]], false)),
            ("tetrahedron boundary", tetra_boundary()),
            ("hollow triangle", complex(&[&["1", "2"], &["1", "3"], &["2", "3"]], false)),
            ("four cycle", four_cycle()),
            ("projective plane", projective_plane(false)),
            ("two disjoint edges", complex(&[&["1", "2"], &["3", "4"]], false)),
        ];
        for (name, k) in fixtures {
            let simplicial = k.reisner_check();
            let face_poset = k.face_poset().expect("labels are digits");
            let poset_side = is_cm_space(&face_poset.poset);
            assert_eq!(simplicial.is_cm, poset_side.is_cm, "{name}");
        }

        // the two pipelines blame the same point with the same group
        let rp = projective_plane(false).face_poset().expect("digit labels");
        let verdict = is_cm_space(&rp.poset);
        let witness = verdict.witness.expect("projective plane is not CM");
        assert_eq!(rp.poset.label(witness.point), EMPTY_FACE);
        assert_eq!((witness.degree, witness.group), (1, zmod(2)));
    }

    #[test]
    fn face_posets_embed_and_grade_faces() {
        let triangle = complex(&[&["1", "2", "3"]], false);
        let fp = triangle.face_poset().expect("digit labels");
        assert_eq!(fp.poset.len(), 8);
        assert_eq!(fp.poset.label(0), EMPTY_FACE);
        assert_eq!(fp.face_vertices[0], Vec::<usize>::new());
        for (i, face) in fp.face_vertices.iter().enumerate() {
            assert_eq!(fp.poset.label(i), triangle.face_label(face));
        }
        // the subset poset of a triangle is affine 3-space
        let a3 = crate::family::affine_space(3);
        assert_eq!(fp.poset.canonical_key(), a3.canonical_key());

        let projective = complex(&[&["1", "2", "3"]], true).face_poset().expect("digits");
        assert_eq!(projective.poset.len(), 7);
        assert!(projective.face_vertices.iter().all(|f| !f.is_empty()));
    }

    #[test]
    fn poset_homology_agrees_with_direct_boundaries_on_every_fixture() {
        let fixtures: Vec<SimplicialComplex> = vec![
            complex(&[&["1", "2", "3"]], true),
            complex(&[&["1", "2"], &["1", "3"], &["2", "3"]], true),
            tetra_boundary(),
            complex(&[&["1", "2", "3", "4"]], true),
            four_cycle(),
            projective_plane(true),
            complex(&[&["1", "2"], &["3", "4"]], true),
        ];
        for k in fixtures {
            // the projective face poset is the complex itself as a space
            let projectivized = SimplicialComplex { projective: true, ..k.clone() };
            let fp = projectivized.face_poset().expect("digit labels");
            assert_eq!(
                reduced_homology(&fp.poset),
                k.reduced_homology(),
                "direct boundaries vs poset chains"
            );
        }
    }

    #[test]
    fn stanley_reisner_generators() {
        let hollow = complex(&[&["1", "2"], &["1", "3"], &["2", "3"]], false);
        assert_eq!(hollow.sr_ideal().expect("affine"), vec!["x1·x2·x3"]);
        assert_eq!(four_cycle().sr_ideal().expect("affine"), vec!["x1·x3", "x2·x4"]);
        let full = complex(&[&["1", "2", "3"]], false);
        assert!(full.sr_ideal().expect("affine").is_empty());
        assert!(matches!(
            projective_plane(true).sr_ideal(),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn order_complexes_are_barycentric_subdivisions() {
        let v = v_space();
        let oc = order_complex(&v).expect("plain labels");
        // a path with two edges: contractible, five faces
        assert_eq!(oc.face_count(), 6);
        assert_eq!(oc.reduced_homology(), GradedGroups::new());
        let as_poset = SimplicialComplex { projective: true, ..oc };
        let fp = as_poset.face_poset().expect("short labels");
        assert_eq!(fp.poset.canonical_key(), v.barycentric().canonical_key());

        let circle = crate::family::circle();
        let oc = order_complex(&circle).expect("plain labels");
        assert_eq!(oc.face_count(), 9); // 4 vertices, 4 edges, ∅
        assert_eq!(oc.reduced_homology(), GradedGroups::single(1, FgGroup::free(1)));
        let as_poset = SimplicialComplex { projective: true, ..oc };
        let fp = as_poset.face_poset().expect("short labels");
        assert_eq!(fp.poset.canonical_key(), circle.barycentric().canonical_key());

        let point = order_complex(&crate::family::point()).expect("plain labels");
        assert_eq!(point.face_count(), 2);

        let empty = order_complex(&FinPoset::empty()).expect("empty complex");
        assert_eq!(empty.dim(), -1);
    }

    #[test]
    fn rejects_malformed_input() {
        let none: [[&str; 1]; 0] = [];
        assert!(matches!(
            SimplicialComplex::from_facets(&none, false),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            SimplicialComplex::from_facets(&[["∅"]], false),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            SimplicialComplex::from_facets(&[["a b"]], false),
            Err(Error::Parse(_))
        ));
        // vertex names that merge into the same face name are refused at
        // poset-building time, where the names first matter
        let merged = complex(&[&["a", "b"], &["a,b"]], false);
        assert!(matches!(merged.face_poset(), Err(Error::Parse(_))));
    }
}
