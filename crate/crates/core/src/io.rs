//! JSON artifacts. Every file carries a `"kind"` tag; rationals are strings
//! such as `"1/3"`, group elements are integers or cycle notation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::builders::blowup::LabeledTriangle;
use crate::builders::BlowUp;
use crate::cochain::{Cochain, TwoComplex};
use crate::complex::PureComplex;
use crate::cones::{validate_cone, Cone};
use crate::error::{HdxError, Result};
use crate::gk::{AgreementTriangle, Decomposition, NuEntry};
use crate::group::{format_cycles, parse_cycles, FiniteGroup};
use crate::rational::{serde_str, Rational};
use crate::ug::UgInstance;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FaceEntry {
    pub verts: Vec<usize>,
    #[serde(with = "serde_str")]
    pub weight: Rational,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexFile {
    pub dimension: usize,
    pub vertices: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    pub top_faces: Vec<FaceEntry>,
}

impl ComplexFile {
    pub fn from_complex(x: &PureComplex) -> Self {
        ComplexFile {
            dimension: x.dim(),
            vertices: x.vertex_count(),
            colors: x.colors().map(<[usize]>::to_vec),
            names: x.names().map(<[String]>::to_vec),
            top_faces: x.top_faces().iter().map(|(f, w)| FaceEntry { verts: f.clone(), weight: *w }).collect(),
        }
    }

    pub fn build(&self) -> Result<PureComplex> {
        let mut x = PureComplex::new(self.vertices, self.top_faces.iter().map(|e| (e.verts.clone(), e.weight)).collect())?;
        if x.dim() != self.dimension {
            return Err(HdxError::Malformed(format!("dimension is {} but the faces have dimension {}", self.dimension, x.dim())));
        }
        if let Some(c) = &self.colors {
            x = x.with_colors(c.clone())?;
        }
        if let Some(n) = &self.names {
            x = x.with_names(n.clone())?;
        }
        Ok(x)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValueEntry {
    pub face: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<usize>,
    pub elem: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CochainFile {
    pub degree: i8,
    pub group: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex: Option<ComplexFile>,
    pub values: Vec<ValueEntry>,
}

impl CochainFile {
    /// Faces are written in their stored orientation.
    pub fn from_cochain(x: &TwoComplex, group: &FiniteGroup, f: &Cochain, complex: Option<&PureComplex>) -> Self {
        let faces: Vec<(Vec<usize>, Option<usize>)> = match f.degree {
            0 => (0..x.vertex_count()).map(|v| (vec![v], None)).collect(),
            1 => x.edges().iter().map(|e| (vec![e.ends.0, e.ends.1], (e.label != 0).then_some(e.label))).collect(),
            _ => x.triangles().iter().map(|t| (t.verts.to_vec(), None)).collect(),
        };
        CochainFile {
            degree: f.degree,
            group: group.name(),
            complex: complex.map(ComplexFile::from_complex),
            values: faces.into_iter().zip(&f.values).map(|((face, label), &g)| ValueEntry { face, label, elem: group.format(g) }).collect(),
        }
    }

    /// Reads the values onto `x`; every cell must be given exactly once.
    pub fn build(&self, x: &TwoComplex) -> Result<(FiniteGroup, Cochain)> {
        let group = FiniteGroup::parse(&self.group)?;
        let count = x.cell_count(self.degree);
        let mut values = vec![None; count];
        for (i, entry) in self.values.iter().enumerate() {
            let at = |msg: String| HdxError::Malformed(format!("values[{i}]: {msg}"));
            let mut g = group.parse_elem(&entry.elem).map_err(|e| at(e.to_string()))?;
            let cell = match (self.degree, entry.face.as_slice()) {
                (0, [v]) if *v < count => *v,
                (1, &[u, v]) => {
                    let e = x.labeled_edge_index(u.min(v), u.max(v), entry.label.unwrap_or(0)).ok_or_else(|| at(format!("no edge {:?}", entry.face)))?;
                    if x.edges()[e].ends != (u, v) {
                        g = group.inv(g);
                    }
                    e
                }
                (2, &[a, b, c]) => {
                    let mut s = [a, b, c];
                    s.sort_unstable();
                    let hits: Vec<usize> = (0..count).filter(|&t| x.triangles()[t].verts == s).collect();
                    if hits.len() != 1 {
                        return Err(at(format!("{:?} names {} triangles", entry.face, hits.len())));
                    }
                    // An odd permutation of the stored order reverses the orientation.
                    let inversions = [(a, b), (a, c), (b, c)].iter().filter(|(p, q)| p > q).count();
                    if inversions % 2 == 1 {
                        g = group.inv(g);
                    }
                    hits[0]
                }
                _ => return Err(at(format!("{:?} is not a cell of degree {}", entry.face, self.degree))),
            };
            if values[cell].replace(g).is_some() {
                return Err(at(format!("{:?} given twice", entry.face)));
            }
        }
        if let Some(missing) = values.iter().position(Option::is_none) {
            return Err(HdxError::Malformed(format!("cell {missing} of degree {} has no value", self.degree)));
        }
        Ok((group, Cochain { degree: self.degree, values: values.into_iter().map(Option::unwrap).collect() }))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConeFile {
    pub complex: ComplexFile,
    pub cone: Cone,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub complex: ComplexFile,
    pub pieces: Vec<Vec<[usize; 3]>>,
    pub nu: Vec<NuEntry>,
    pub pi: Vec<AgreementTriangle>,
}

impl DecompositionFile {
    pub fn from_decomposition(d: &Decomposition) -> Self {
        DecompositionFile { complex: ComplexFile::from_complex(&d.complex), pieces: d.pieces.clone(), nu: d.nu.clone(), pi: d.pi.clone() }
    }

    pub fn build(&self) -> Result<Decomposition> {
        let d = Decomposition { complex: self.complex.build()?, pieces: self.pieces.clone(), nu: self.nu.clone(), pi: self.pi.clone() };
        d.validate()?;
        Ok(d)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UgEdge {
    pub u: usize,
    pub v: usize,
    #[serde(with = "serde_str")]
    pub weight: Rational,
    /// `π_uv` in cycle notation.
    pub perm: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UgFile {
    pub vertices: usize,
    pub alphabet: usize,
    pub edges: Vec<UgEdge>,
}

impl UgFile {
    pub fn from_instance(u: &UgInstance) -> Self {
        let edges = u
            .graph()
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &(a, b, w))| UgEdge { u: a, v: b, weight: w, perm: format_cycles(u.constraint(e)) })
            .collect();
        UgFile { vertices: u.vertex_count(), alphabet: u.alphabet(), edges }
    }

    pub fn build(&self) -> Result<UgInstance> {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let p = parse_cycles(&e.perm, self.alphabet).map_err(|err| HdxError::Malformed(format!("edges[{i}].perm: {err}")))?;
                Ok((e.u, e.v, e.weight, p))
            })
            .collect::<Result<_>>()?;
        UgInstance::new(self.vertices, self.alphabet, edges)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Multiplicity {
    pub edge: [usize; 2],
    pub m: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabeledTriangleEntry {
    pub verts: [usize; 3],
    pub labels: [usize; 3],
    #[serde(with = "serde_str")]
    pub weight: Rational,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlowUpFile {
    pub base: ComplexFile,
    pub multiplicity: Vec<Multiplicity>,
    pub triangles: Vec<LabeledTriangleEntry>,
}

impl BlowUpFile {
    pub fn from_blowup(b: &BlowUp) -> Self {
        let multiplicity = b
            .base()
            .faces(1)
            .into_iter()
            .filter_map(|(e, _)| b.multiplicity(e[0], e[1]).filter(|&m| m > 1).map(|m| Multiplicity { edge: [e[0], e[1]], m }))
            .collect();
        let triangles = b.triangles().iter().map(|t| LabeledTriangleEntry { verts: t.verts, labels: t.labels, weight: t.weight }).collect();
        BlowUpFile { base: ComplexFile::from_complex(b.base()), multiplicity, triangles }
    }

    pub fn build(&self) -> Result<BlowUp> {
        let mult: BTreeMap<(usize, usize), usize> = self.multiplicity.iter().map(|m| ((m.edge[0], m.edge[1]), m.m)).collect();
        let tris = self.triangles.iter().map(|t| LabeledTriangle { verts: t.verts, labels: t.labels, weight: t.weight }).collect();
        BlowUp::new(self.base.build()?, &mult, tris)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Artifact {
    Complex(ComplexFile),
    Cochain(CochainFile),
    Cone(ConeFile),
    Decomposition(DecompositionFile),
    Ug(UgFile),
    BlowUp(BlowUpFile),
}

impl Artifact {
    pub fn kind(&self) -> &'static str {
        match self {
            Artifact::Complex(_) => "complex",
            Artifact::Cochain(_) => "cochain",
            Artifact::Cone(_) => "cone",
            Artifact::Decomposition(_) => "decomposition",
            Artifact::Ug(_) => "ug",
            Artifact::BlowUp(_) => "blow-up",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("artifacts serialize")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

/// Parses an artifact, reporting the JSON path of the first schema error.
pub fn parse_artifact(text: &str) -> std::result::Result<Artifact, Diagnostic> {
    let root = |message: String| Diagnostic { path: "$".into(), message };
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| root(e.to_string()))?;
    let kind = value.get("kind").and_then(|k| k.as_str()).ok_or_else(|| root("missing string field `kind`".into()))?.to_string();
    fn body<T: serde::de::DeserializeOwned>(v: serde_json::Value) -> std::result::Result<T, Diagnostic> {
        serde_path_to_error::deserialize(v).map_err(|e| {
            let path = e.path().to_string();
            Diagnostic { path: if path == "." { "$".into() } else { format!("$.{path}") }, message: e.into_inner().to_string() }
        })
    }
    Ok(match kind.as_str() {
        "complex" => Artifact::Complex(body(value)?),
        "cochain" => Artifact::Cochain(body(value)?),
        "cone" => Artifact::Cone(body(value)?),
        "decomposition" => Artifact::Decomposition(body(value)?),
        "ug" => Artifact::Ug(body(value)?),
        "blow-up" => Artifact::BlowUp(body(value)?),
        other => return Err(Diagnostic { path: "$.kind".into(), message: format!("unknown kind {other:?}") }),
    })
}

pub fn read_artifact(path: &std::path::Path) -> Result<Artifact> {
    let text = std::fs::read_to_string(path)?;
    parse_artifact(&text).map_err(|d| HdxError::Parse(format!("{}: {} at {}", path.display(), d.message, d.path)))
}

fn complex_field(e: &HdxError) -> &'static str {
    match e {
        HdxError::InvalidWeights(_) => "top_faces[].weight",
        HdxError::NotPartite(_) => "colors",
        _ => "top_faces",
    }
}

/// Schema and invariant checks; an empty list means the artifact is valid.
pub fn validate(text: &str) -> Vec<Diagnostic> {
    let artifact = match parse_artifact(text) {
        Ok(a) => a,
        Err(d) => return vec![d],
    };
    let diag = |path: &str, e: HdxError| vec![Diagnostic { path: path.into(), message: e.to_string() }];
    let complex = |c: &ComplexFile, prefix: &str| c.build().map_err(|e| diag(&format!("{prefix}{}", complex_field(&e)), e));
    let result: std::result::Result<(), Vec<Diagnostic>> = (|| match &artifact {
        Artifact::Complex(c) => complex(c, "$.").map(|_| ()),
        Artifact::Cochain(f) => {
            let group = FiniteGroup::parse(&f.group).map_err(|e| diag("$.group", e))?;
            let mut out = Vec::new();
            for (i, v) in f.values.iter().enumerate() {
                if let Err(e) = group.parse_elem(&v.elem) {
                    out.push(Diagnostic { path: format!("$.values[{i}].elem"), message: e.to_string() });
                }
            }
            if !out.is_empty() {
                return Err(out);
            }
            if let Some(c) = &f.complex {
                let x = TwoComplex::from_complex(&complex(c, "$.complex.")?).map_err(|e| diag("$.complex", e))?;
                f.build(&x).map_err(|e| diag("$.values", e))?;
            }
            Ok(())
        }
        Artifact::Cone(c) => {
            let x = TwoComplex::from_complex(&complex(&c.complex, "$.complex.")?).map_err(|e| diag("$.complex", e))?;
            validate_cone(&x, &c.cone).map(|_| ()).map_err(|e| diag("$.cone.contractions", e))
        }
        Artifact::Decomposition(d) => {
            complex(&d.complex, "$.complex.")?;
            d.build().map(|_| ()).map_err(|e| {
                let path = match &e {
                    HdxError::InvalidWeights(m) if m.starts_with("nu") => "$.nu",
                    HdxError::InvalidWeights(_) => "$.pi",
                    HdxError::InvalidDecomposition(m) if m.starts_with("nu") => "$.nu",
                    HdxError::InvalidDecomposition(m) if m.starts_with("piece") => "$.pieces",
                    _ => "$.pi",
                };
                diag(path, e)
            })
        }
        Artifact::Ug(u) => u.build().map(|_| ()).map_err(|e| diag("$.edges", e)),
        Artifact::BlowUp(b) => {
            complex(&b.base, "$.base.")?;
            b.build().map(|_| ()).map_err(|e| diag("$.triangles", e))
        }
    })();
    result.err().unwrap_or_default()
}
