//! Problem documents: parsing, name resolution and canonical form.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use matfac_core::cyclo::CycloField;
use matfac_core::matfac::MatFac;
use matfac_core::matrix::PolyMatrix;
use matfac_core::morphism::Morphism;
use matfac_core::poly::{Polynomial, Ring};

/// A problem with a location inside the document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DocError {
    pub path: String,
    pub message: String,
}

impl DocError {
    fn new(path: impl Into<String>, message: impl fmt::Display) -> DocError {
        DocError {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for DocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for DocError {}

/// A JSON object read in document order, rejecting repeated keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Named<T>(pub Vec<(String, T)>);

impl<T> Default for Named<T> {
    fn default() -> Self {
        Named(Vec::new())
    }
}

impl<T> Named<T> {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &T)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }
}

impl<T: Serialize> Serialize for Named<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Named<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V<T>(PhantomData<T>);
        impl<'de, T: Deserialize<'de>> Visitor<'de> for V<T> {
            type Value = Named<T>;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object of named entries")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut a: A) -> Result<Named<T>, A::Error> {
                let mut out: Vec<(String, T)> = Vec::new();
                while let Some(k) = a.next_key::<String>()? {
                    if out.iter().any(|(n, _)| n == &k) {
                        return Err(de::Error::custom(format!("duplicate name `{k}`")));
                    }
                    out.push((k, a.next_value()?));
                }
                Ok(Named(out))
            }
        }
        d.deserialize_map(V(PhantomData))
    }
}

pub type MatrixText = Vec<Vec<String>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingDecl {
    pub conductor: u32,
    pub vars: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorizationDecl {
    pub d: usize,
    /// A polynomial name or expression; the product of the matrices'
    /// `(1,1)` entries is used when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    /// `φ_1, ..., φ_{d-1}, φ_0`, each row-major.
    pub matrices: Vec<MatrixText>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDecl {
    pub source: String,
    pub target: String,
    /// `α_1, ..., α_{d-1}, α_0`.
    pub components: Vec<MatrixText>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideArg {
    Left,
    Right,
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// An operation and its arguments. Factorization and morphism arguments
/// are names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", content = "args", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Args {
    Validate {
        x: String,
    },
    Tensor {
        x: String,
        y: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        zeta: Option<i64>,
    },
    Shift {
        x: String,
        #[serde(default = "one")]
        by: i64,
    },
    Scale {
        x: String,
        units: Vec<String>,
    },
    Reduce {
        x: String,
        y: String,
        side: SideArg,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        zeta: Option<i64>,
    },
    DetCheck {
        x: String,
        y: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        zeta: Option<i64>,
    },
    Knorrer {
        x: String,
        y: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        project: Option<usize>,
    },
    SplitIdempotent {
        x: String,
        e: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        precision: Option<u32>,
    },
    HomJets {
        x: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        x2: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        precision: Option<u32>,
    },
    Certify {
        x: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        y: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        zeta: Option<i64>,
        #[serde(default, skip_serializing_if = "is_false")]
        spot_check: bool,
    },
    Bound {
        x: String,
        y: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        precision: Option<u32>,
    },
    Ulrich {
        terms: Vec<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        partition: Option<Vec<Vec<usize>>>,
        #[serde(default, skip_serializing_if = "is_false")]
        irreducible: bool,
        #[serde(default, skip_serializing_if = "is_false")]
        indecomposable: bool,
    },
    ExtensionSes {
        x: String,
        k: i64,
        #[serde(default, skip_serializing_if = "is_false")]
        irreducible: bool,
    },
    Report,
}

fn one() -> i64 {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Kind {
    Polynomial,
    Factorization,
    Morphism,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Polynomial => "polynomial",
            Kind::Factorization => "factorization",
            Kind::Morphism => "morphism",
        })
    }
}

impl Args {
    pub fn op(&self) -> &'static str {
        match self {
            Args::Validate { .. } => "validate",
            Args::Tensor { .. } => "tensor",
            Args::Shift { .. } => "shift",
            Args::Scale { .. } => "scale",
            Args::Reduce { .. } => "reduce",
            Args::DetCheck { .. } => "det-check",
            Args::Knorrer { .. } => "knorrer",
            Args::SplitIdempotent { .. } => "split-idempotent",
            Args::HomJets { .. } => "hom-jets",
            Args::Certify { .. } => "certify",
            Args::Bound { .. } => "bound",
            Args::Ulrich { .. } => "ulrich",
            Args::ExtensionSes { .. } => "extension-ses",
            Args::Report => "report",
        }
    }

    /// Named inputs with the kind each must have.
    pub fn references(&self) -> Vec<(&'static str, &str, Kind)> {
        use Kind::*;
        match self {
            Args::Validate { x } | Args::Shift { x, .. } | Args::Scale { x, .. } | Args::ExtensionSes { x, .. } => {
                vec![("x", x.as_str(), Factorization)]
            }
            Args::Tensor { x, y, .. }
            | Args::Reduce { x, y, .. }
            | Args::DetCheck { x, y, .. }
            | Args::Knorrer { x, y, .. }
            | Args::Bound { x, y, .. } => vec![("x", x.as_str(), Factorization), ("y", y, Factorization)],
            Args::SplitIdempotent { x, e, .. } => vec![("x", x.as_str(), Factorization), ("e", e, Morphism)],
            Args::HomJets { x, x2, .. } => {
                let mut v = vec![("x", x.as_str(), Factorization)];
                if let Some(x2) = x2 {
                    v.push(("x2", x2, Factorization));
                }
                v
            }
            Args::Certify { x, y, .. } => {
                let mut v = vec![("x", x.as_str(), Factorization)];
                if let Some(y) = y {
                    v.push(("y", y, Factorization));
                }
                v
            }
            Args::Ulrich { .. } | Args::Report => vec![],
        }
    }

    /// Objects stored under names derived from the command's `output`.
    pub fn outputs(&self, output: &str) -> Vec<(String, Kind)> {
        use Kind::*;
        match self {
            Args::Tensor { .. } | Args::Shift { .. } | Args::Reduce { .. } | Args::Ulrich { .. } => {
                vec![(output.to_string(), Factorization)]
            }
            Args::Scale { .. } => vec![
                (output.to_string(), Factorization),
                (format!("{output}_witness"), Morphism),
            ],
            Args::Knorrer { project, .. } => {
                let mut v = vec![
                    (output.to_string(), Factorization),
                    (format!("{output}_tensor"), Factorization),
                ];
                if project.is_some() {
                    v.push((format!("{output}_e"), Morphism));
                }
                v
            }
            Args::SplitIdempotent { .. } => vec![
                (output.to_string(), Factorization),
                (format!("{output}_complement"), Factorization),
            ],
            _ => vec![],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Command {
    pub args: Args,
    pub output: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCommand {
    op: String,
    #[serde(default)]
    args: Map<String, Value>,
    #[serde(default)]
    output: Option<String>,
}

impl Serialize for Command {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut v = match serde_json::to_value(&self.args).map_err(serde::ser::Error::custom)? {
            Value::Object(m) => m,
            _ => unreachable!("arguments serialize to an object"),
        };
        if let Some(o) = &self.output {
            v.insert("output".into(), Value::String(o.clone()));
        }
        v.serialize(s)
    }
}

impl Command {
    fn from_raw(raw: RawCommand, path: &str) -> Result<Command, DocError> {
        let mut tagged = Map::new();
        tagged.insert("op".into(), Value::String(raw.op));
        if !raw.args.is_empty() {
            tagged.insert("args".into(), Value::Object(raw.args));
        }
        let args: Args = serde_json::from_value(Value::Object(tagged)).map_err(|e| DocError::new(path, e))?;
        Ok(Command {
            args,
            output: raw.output,
        })
    }
}

/// The document as written.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProblemDoc {
    pub ring: RingDecl,
    #[serde(skip_serializing_if = "Named::is_empty")]
    pub polynomials: Named<String>,
    #[serde(skip_serializing_if = "Named::is_empty")]
    pub factorizations: Named<FactorizationDecl>,
    #[serde(skip_serializing_if = "Named::is_empty")]
    pub morphisms: Named<MorphismDecl>,
    pub commands: Vec<Command>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoc {
    ring: RingDecl,
    #[serde(default)]
    polynomials: Named<String>,
    #[serde(default)]
    factorizations: Named<FactorizationDecl>,
    #[serde(default)]
    morphisms: Named<MorphismDecl>,
    #[serde(default)]
    commands: Vec<RawCommand>,
}

impl ProblemDoc {
    /// Parse JSON text. Syntax and shape errors carry line and column.
    pub fn from_json(text: &str) -> Result<ProblemDoc, DocError> {
        let raw: RawDoc = serde_json::from_str(text).map_err(|e| {
            let msg = e.to_string();
            DocError::new("", msg)
        })?;
        let commands = raw
            .commands
            .into_iter()
            .enumerate()
            .map(|(i, c)| Command::from_raw(c, &format!("commands[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ProblemDoc {
            ring: raw.ring,
            polynomials: raw.polynomials,
            factorizations: raw.factorizations,
            morphisms: raw.morphisms,
            commands,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    /// The same document with every expression in normal form.
    pub fn canonical(&self) -> Result<ProblemDoc, DocError> {
        let p = Problem::load(self)?;
        let ring = &p.ring;
        let norm = |path: &str, s: &str| -> Result<String, DocError> {
            Ok(parse_poly(ring, path, s)?.to_string())
        };
        let norm_matrix = |path: &str, m: &MatrixText| -> Result<MatrixText, DocError> {
            m.iter()
                .enumerate()
                .map(|(i, row)| {
                    row.iter()
                        .enumerate()
                        .map(|(j, s)| norm(&format!("{path}[{i}][{j}]"), s))
                        .collect()
                })
                .collect()
        };
        let mut out = self.clone();
        for (name, s) in &mut out.polynomials.0 {
            *s = norm(&format!("polynomials.{name}"), s)?;
        }
        for (name, fd) in &mut out.factorizations.0 {
            if let Some(f) = &mut fd.f {
                if !p.polynomials.contains_key(f.as_str()) {
                    *f = norm(&format!("factorizations.{name}.f"), f)?;
                }
            }
            for (k, m) in fd.matrices.iter_mut().enumerate() {
                *m = norm_matrix(&format!("factorizations.{name}.matrices[{k}]"), m)?;
            }
        }
        for (name, md) in &mut out.morphisms.0 {
            for (k, m) in md.components.iter_mut().enumerate() {
                *m = norm_matrix(&format!("morphisms.{name}.components[{k}]"), m)?;
            }
        }
        for (i, c) in out.commands.iter_mut().enumerate() {
            let path = format!("commands[{i}].args");
            match &mut c.args {
                Args::Scale { units, .. } => {
                    for (j, u) in units.iter_mut().enumerate() {
                        *u = norm(&format!("{path}.units[{j}]"), u)?;
                    }
                }
                Args::Ulrich { terms, target, .. } => {
                    *terms = norm_matrix(&format!("{path}.terms"), terms)?;
                    if let Some(t) = target {
                        if !p.polynomials.contains_key(t.as_str()) {
                            *t = norm(&format!("{path}.target"), t)?;
                        }
                    }
                }
                _ => {}
            }
        }
        Ok(out)
    }
}

fn claim(names: &mut BTreeMap<String, Kind>, name: &str, kind: Kind, path: &str) -> Result<(), DocError> {
    if let Some(k) = names.get(name) {
        return Err(DocError::new(path, format!("name `{name}` is already a {k}")));
    }
    names.insert(name.to_string(), kind);
    Ok(())
}

fn parse_poly(ring: &Ring, path: &str, s: &str) -> Result<Polynomial, DocError> {
    ring.parse(s).map_err(|e| DocError::new(path, format!("{e} in `{s}`")))
}

fn parse_matrix(ring: &Ring, path: &str, m: &MatrixText) -> Result<PolyMatrix, DocError> {
    let rows = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, s)| parse_poly(ring, &format!("{path}[{i}][{j}]"), s))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    PolyMatrix::from_rows(ring, rows).map_err(|e| DocError::new(path, e))
}

/// A document with every declaration parsed and every name resolved.
#[derive(Debug)]
pub struct Problem {
    pub ring: Ring,
    pub polynomials: BTreeMap<String, Polynomial>,
    pub factorizations: BTreeMap<String, MatFac>,
    pub morphisms: BTreeMap<String, Morphism>,
    pub commands: Vec<Command>,
}

impl Problem {
    pub fn load(doc: &ProblemDoc) -> Result<Problem, DocError> {
        if doc.ring.conductor == 0 {
            return Err(DocError::new("ring.conductor", "must be positive"));
        }
        let ring = Ring::new(CycloField::new(doc.ring.conductor), &doc.ring.vars)
            .map_err(|e| DocError::new("ring", e))?;
        let mut names: BTreeMap<String, Kind> = BTreeMap::new();

        let mut polynomials = BTreeMap::new();
        for (name, s) in doc.polynomials.iter() {
            let path = format!("polynomials.{name}");
            claim(&mut names, name, Kind::Polynomial, &path)?;
            polynomials.insert(name.to_string(), parse_poly(&ring, &path, s)?);
        }

        let mut factorizations = BTreeMap::new();
        for (name, fd) in doc.factorizations.iter() {
            let path = format!("factorizations.{name}");
            claim(&mut names, name, Kind::Factorization, &path)?;
            if fd.matrices.len() != fd.d {
                return Err(DocError::new(
                    &path,
                    format!("d = {} but {} matrices given", fd.d, fd.matrices.len()),
                ));
            }
            let mats = fd
                .matrices
                .iter()
                .enumerate()
                .map(|(k, m)| parse_matrix(&ring, &format!("{path}.matrices[{k}]"), m))
                .collect::<Result<Vec<_>, _>>()?;
            let f = match &fd.f {
                Some(s) => match polynomials.get(s.as_str()) {
                    Some(p) => Polynomial::clone(p),
                    None => parse_poly(&ring, &format!("{path}.f"), s)?,
                },
                None => {
                    let mut acc = ring.one();
                    for m in &mats {
                        if m.rows() == 0 {
                            return Err(DocError::new(&path, "empty matrices need an explicit f"));
                        }
                        acc = acc.try_mul(m.get(0, 0)).map_err(|e| DocError::new(&path, e))?;
                    }
                    acc
                }
            };
            let x = MatFac::new(f, mats).map_err(|e| DocError::new(&path, e))?;
            factorizations.insert(name.to_string(), x);
        }

        let mut morphisms = BTreeMap::new();
        for (name, md) in doc.morphisms.iter() {
            let path = format!("morphisms.{name}");
            claim(&mut names, name, Kind::Morphism, &path)?;
            let get = |field: &str, n: &str| {
                factorizations
                    .get(n)
                    .cloned()
                    .ok_or_else(|| DocError::new(format!("{path}.{field}"), format!("no factorization named `{n}`")))
            };
            let source = get("source", &md.source)?;
            let target = get("target", &md.target)?;
            let comps = md
                .components
                .iter()
                .enumerate()
                .map(|(k, m)| parse_matrix(&ring, &format!("{path}.components[{k}]"), m))
                .collect::<Result<Vec<_>, _>>()?;
            let a = Morphism::new(source, target, comps).map_err(|e| DocError::new(&path, e))?;
            morphisms.insert(name.to_string(), a);
        }

        for (i, c) in doc.commands.iter().enumerate() {
            let path = format!("commands[{i}]");
            for (field, name, kind) in c.args.references() {
                match names.get(name) {
                    Some(k) if *k == kind => {}
                    Some(k) => {
                        return Err(DocError::new(
                            format!("{path}.args.{field}"),
                            format!("`{name}` is a {k}, expected a {kind}"),
                        ))
                    }
                    None => {
                        return Err(DocError::new(
                            format!("{path}.args.{field}"),
                            format!("no {kind} named `{name}`"),
                        ))
                    }
                }
            }
            let produced = match &c.output {
                Some(o) => c.args.outputs(o),
                None => vec![],
            };
            if c.output.is_some() && produced.is_empty() {
                return Err(DocError::new(
                    format!("{path}.output"),
                    format!("`{}` produces no objects", c.args.op()),
                ));
            }
            for (name, kind) in produced {
                claim(&mut names, &name, kind, &format!("{path}.output"))?;
            }
        }

        Ok(Problem {
            ring,
            polynomials,
            factorizations,
            morphisms,
            commands: doc.commands.clone(),
        })
    }
}
