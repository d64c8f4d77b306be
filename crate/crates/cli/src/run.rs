//! Command execution and reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};

use matfac_core::claims::{self, Claim};
use matfac_core::cyclo::CycloElem;
use matfac_core::knorrer::{decompose_symmetric, OmegaContext};
use matfac_core::matfac::MatFac;
use matfac_core::morphism::{hom_space_jets, refute_iso, split_idempotent, Morphism};
use matfac_core::poly::Ring;
use matfac_core::structure::{
    coprime_rank_one_cert, constant_term_spot_check, propagate_strong_ind, reduce_tensor_witness,
    strong_ind_consequences, summand_bound_for, Certification, Side, StrongIndCert,
};
use matfac_core::tensor::{det_check, tensor};
use matfac_core::ulrich::{build_ulrich, extension_ses, indecomposable_ulrich, SumOfProducts};
use matfac_core::{Error, Result};

use crate::doc::{Args, DocError, Problem, ProblemDoc, RingDecl, SideArg};

/// Command-line overrides.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Flags {
    /// Jet order for commands that work modulo a degree.
    pub precision: Option<u32>,
    /// Use `ζ_d^k` instead of `ζ_d` where a tensor root is needed.
    pub zeta: Option<i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Refused,
    Info,
}

impl Status {
    fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Refused => "REFUSED",
            Status::Info => "INFO",
        }
    }

    fn of(passed: bool) -> Status {
        if passed {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CommandReport {
    pub index: usize,
    pub op: &'static str,
    pub args: Value,
    #[serde(skip)]
    subject: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub result: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub claims: Vec<Claim>,
    #[serde(skip)]
    details: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub refused: usize,
    pub info: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub ring: RingDecl,
    pub flags: Flags,
    pub commands: Vec<CommandReport>,
    pub summary: Summary,
    pub exit_status: i32,
}

impl RunReport {
    pub fn machine(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn human(&self) -> String {
        let mut s = String::new();
        for c in &self.commands {
            let out = c.output.as_deref().map(|o| format!(" -> {o}")).unwrap_or_default();
            let _ = writeln!(s, "[{}] {}{}{}: {}", c.index, c.op, c.subject, out, c.status.label());
            if let Some(r) = &c.reason {
                let _ = writeln!(s, "    reason: {r}");
            }
            for d in &c.details {
                let _ = writeln!(s, "    {d}");
            }
        }
        let m = &self.summary;
        let _ = writeln!(
            s,
            "summary: {} pass, {} fail, {} refused, {} info",
            m.pass, m.fail, m.refused, m.info
        );
        s
    }
}

struct Outcome {
    status: Status,
    result: Value,
    claims: Vec<Claim>,
    details: Vec<String>,
    produced: Vec<(String, Object)>,
}

impl Outcome {
    fn new(status: Status, result: Value) -> Outcome {
        Outcome {
            status,
            result,
            claims: Vec::new(),
            details: Vec::new(),
            produced: Vec::new(),
        }
    }

    fn detail(mut self, line: impl Into<String>) -> Outcome {
        self.details.push(line.into());
        self
    }

    fn claim(mut self, c: Claim) -> Outcome {
        self.claims.push(c);
        self
    }
}

enum Object {
    Fac(MatFac),
    Morph(Morphism),
}

struct Session<'a> {
    ring: Ring,
    polynomials: BTreeMap<String, matfac_core::poly::Polynomial>,
    facs: BTreeMap<String, MatFac>,
    morphs: BTreeMap<String, Morphism>,
    flags: &'a Flags,
}

fn fac_json(x: &MatFac) -> Value {
    json!({
        "d": x.d(),
        "rank": x.rank(),
        "f": x.f().to_string(),
        "matrices": x.to_strings(),
    })
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn failing_list(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(", ")
}

impl Session<'_> {
    // Names are resolved at load time; a name can still be missing here if
    // the command producing it was refused.
    fn fac(&self, name: &str) -> Result<&MatFac> {
        self.facs
            .get(name)
            .ok_or_else(|| Error::Hypothesis(format!("`{name}` was not produced")))
    }

    fn morph(&self, name: &str) -> Result<&Morphism> {
        self.morphs
            .get(name)
            .ok_or_else(|| Error::Hypothesis(format!("`{name}` was not produced")))
    }

    fn show(&self, c: &CycloElem) -> String {
        c.format_with(self.ring.root_symbol())
    }

    /// `ζ_d^k`, with `k` from the command, then the flag, then `1`.
    fn zeta(&self, d: usize, k: Option<i64>) -> Result<CycloElem> {
        let k = k.or(self.flags.zeta).unwrap_or(1);
        let z = self.ring.field().primitive_root(d as u32)?.pow(k)?;
        if !z.is_primitive_root(d as u32) {
            return Err(Error::NotPrimitiveRoot(self.show(&z), d as u32));
        }
        Ok(z)
    }

    fn precision(&self, arg: Option<u32>, x: &MatFac) -> u32 {
        arg.or(self.flags.precision).unwrap_or_else(|| x.default_precision())
    }

    fn poly_ref(&self, s: &str) -> Result<matfac_core::poly::Polynomial> {
        match self.polynomials.get(s) {
            Some(p) => Ok(p.clone()),
            None => self.ring.parse(s),
        }
    }

    fn cert_of(&self, x: &MatFac) -> Result<std::result::Result<StrongIndCert, String>> {
        Ok(match coprime_rank_one_cert(x)? {
            Certification::Certified(c) => Ok(c),
            Certification::Refused(r) => Err(r),
        })
    }

    fn exec(&self, args: &Args, output: Option<&str>) -> Result<Outcome> {
        let out = || output.unwrap_or_default().to_string();
        Ok(match args {
            Args::Validate { x } => {
                let x = self.fac(x)?;
                let r = x.validate();
                let failing = r.failing();
                let mismatches = failing
                    .iter()
                    .map(|&i| first_mismatch(x, i))
                    .collect::<Result<Vec<_>>>()?;
                let mut o = Outcome::new(
                    Status::of(r.passed),
                    json!({ "checks": r.checks, "failing": failing, "mismatches": mismatches, "precision": r.precision }),
                );
                o = o.detail(format!("{} of {} cyclic products equal f·I", r.checks.len() - failing.len(), r.checks.len()));
                if !failing.is_empty() {
                    o = o.detail(format!("failing cyclic product index: {}", failing_list(&failing)));
                }
                for m in &mismatches {
                    o = o.detail(format!(
                        "product starting at phi_{}: entry ({}, {}) is {}",
                        m.index, m.row, m.col, m.found
                    ));
                }
                o
            }
            Args::Tensor { x, y, zeta } => {
                let (x, y) = (self.fac(x)?, self.fac(y)?);
                let z = self.zeta(x.d(), *zeta)?;
                let t = tensor(x, y, &z)?;
                let v = t.validate();
                let mut o = Outcome::new(
                    Status::of(v.passed),
                    json!({ "zeta": self.show(&z), "valid": v.passed, "factorization": fac_json(&t) }),
                )
                .detail(format!("zeta = {}, rank {}", self.show(&z), t.rank()));
                if !v.passed {
                    o = o.detail(format!("failing cyclic product index: {}", failing_list(&v.failing())));
                }
                o.produced = vec![(out(), Object::Fac(t))];
                o
            }
            Args::Shift { x, by } => {
                let s = self.fac(x)?.shift(*by);
                let valid = s.is_valid();
                let mut o = Outcome::new(Status::of(valid), json!({ "by": by, "valid": valid, "factorization": fac_json(&s) }))
                    .detail(format!("shifted by {by}"));
                o.produced = vec![(out(), Object::Fac(s))];
                o
            }
            Args::Scale { x, units } => {
                let x = self.fac(x)?;
                let c = units
                    .iter()
                    .map(|u| {
                        let p = self.ring.parse(u)?;
                        if !p.is_constant() {
                            return Err(Error::Hypothesis(format!("`{u}` is not a constant")));
                        }
                        Ok(p.constant_term())
                    })
                    .collect::<Result<Vec<_>>>()?;
                let (s, w) = x.scale_by_units(&c)?;
                let valid = s.is_valid();
                let morphism = w.is_morphism()?;
                let iso = w.is_isomorphism();
                let mut o = Outcome::new(
                    Status::of(valid && morphism && iso),
                    json!({
                        "valid": valid,
                        "witness_is_morphism": morphism,
                        "witness_is_isomorphism": iso,
                        "factorization": fac_json(&s),
                    }),
                )
                .detail(format!("valid {valid}, witness morphism {morphism}, isomorphism {iso}"));
                if let Some(name) = output {
                    o.produced = vec![(name.to_string(), Object::Fac(s)), (format!("{name}_witness"), Object::Morph(w))];
                }
                o
            }
            Args::Reduce { x, y, side, zeta } => {
                let (x, y) = (self.fac(x)?, self.fac(y)?);
                let z = self.zeta(x.d(), *zeta)?;
                let side = match side {
                    SideArg::Left => Side::Left,
                    SideArg::Right => Side::Right,
                };
                let r = reduce_tensor_witness(x, y, &z, side)?;
                let mut o = Outcome::new(
                    Status::of(r.verified),
                    json!({
                        "side": side,
                        "zeta": self.show(&z),
                        "summands": r.summands.len(),
                        "multiplicity": r.multiplicity,
                        "verified": r.verified,
                        "factorization": fac_json(&r.reduced),
                    }),
                )
                .detail(format!("{} summands, multiplicity {}, witness verified {}", r.summands.len(), r.multiplicity, r.verified))
                .claim(Claim::new("the reduced tensor is a twisted sum of shifts", claims::REDUCED_TENSOR));
                o.produced = vec![(out(), Object::Fac(r.reduced))];
                o
            }
            Args::DetCheck { x, y, zeta } => {
                let (x, y) = (self.fac(x)?, self.fac(y)?);
                let z = self.zeta(x.d(), *zeta)?;
                let r = det_check(x, y, &z)?;
                Outcome::new(Status::of(r.passed), to_value(&r))
                    .detail(format!("expected det = {}", r.expected))
                    .detail(format!(
                        "holds for k = {}",
                        failing_list(&r.checks.iter().filter(|c| c.1).map(|c| c.0).collect::<Vec<_>>())
                    ))
                    .claim(Claim::new("det Φ_k = ±(f+g)^{nm}", claims::TENSOR_DETERMINANT))
            }
            Args::Knorrer { x, y, project } => {
                let (x, y) = (self.fac(x)?, self.fac(y)?);
                let ctx = OmegaContext::canonical(self.ring.field(), x.d())?;
                let k = decompose_symmetric(x, y, &ctx)?;
                let passed = k.report.passed();
                let mut o = Outcome::new(
                    Status::of(passed),
                    json!({
                        "omega": self.show(&ctx.omega),
                        "zeta": self.show(&ctx.zeta),
                        "report": k.report,
                        "z": fac_json(&k.z),
                    }),
                )
                .detail(format!("omega = {}, Z of rank {}", self.show(&ctx.omega), k.z.rank()))
                .claim(Claim::new(
                    "X ⊗ Y is the sum of the shifts of Z",
                    claims::SYMMETRIC_DECOMPOSITION,
                ));
                if let Some(name) = output {
                    let mut produced = vec![
                        (name.to_string(), Object::Fac(k.z.clone())),
                        (format!("{name}_tensor"), Object::Fac(k.tensor.clone())),
                    ];
                    if let Some(s) = project {
                        produced.push((format!("{name}_e"), Object::Morph(k.projection(*s)?)));
                    }
                    o.produced = produced;
                }
                o
            }
            Args::SplitIdempotent { x, e, precision } => {
                let x = self.fac(x)?;
                let n = self.precision(*precision, x);
                let s = split_idempotent(x, self.morph(e)?, n)?;
                let (iv, cv) = (s.image.is_valid(), s.complement.is_valid());
                let additive = s.image.rank() + s.complement.rank() == x.rank();
                let mut o = Outcome::new(
                    Status::of(s.block_diagonal && iv && cv && additive),
                    json!({
                        "precision": n,
                        "rank": s.rank,
                        "image_rank": s.image.rank(),
                        "complement_rank": s.complement.rank(),
                        "block_diagonal": s.block_diagonal,
                        "image_valid": iv,
                        "complement_valid": cv,
                    }),
                )
                .detail(format!(
                    "ranks ({}, {}) at precision {n}",
                    s.image.rank(),
                    s.complement.rank()
                ));
                if let Some(name) = output {
                    o.produced = vec![
                        (name.to_string(), Object::Fac(s.image)),
                        (format!("{name}_complement"), Object::Fac(s.complement)),
                    ];
                }
                o
            }
            Args::HomJets { x, x2, precision } => {
                let x = self.fac(x)?;
                let x2 = match x2 {
                    Some(n) => self.fac(n)?,
                    None => x,
                };
                let n = self.precision(*precision, x);
                let basis = hom_space_jets(x, x2, n)?;
                let iso = refute_iso(x, x2, n)?;
                let v = iso.summary();
                let mut o = Outcome::new(
                    Status::Info,
                    json!({ "precision": n, "dimension": basis.dim(), "iso": v }),
                )
                .detail(format!("{} jet solutions, {}", basis.dim(), v.verdict));
                if iso.is_refuted() {
                    o = o.claim(Claim::new("no isomorphism exists", claims::JET_REFUTATION));
                }
                o
            }
            Args::Certify { x, y, zeta, spot_check } => {
                let x = self.fac(x)?;
                let cx = match self.cert_of(x)? {
                    Ok(c) => c,
                    Err(r) => return Ok(refused(r)),
                };
                let cert = match y {
                    None => cx,
                    Some(y) => {
                        let y = self.fac(y)?;
                        let cy = match self.cert_of(y)? {
                            Ok(c) => c,
                            Err(r) => return Ok(refused(r)),
                        };
                        let z = self.zeta(x.d(), *zeta)?;
                        propagate_strong_ind(&cx, &cy, &z)?
                    }
                };
                let verified = cert.verify()?;
                let spot = if *spot_check {
                    Some(constant_term_spot_check(cert.subject())?)
                } else {
                    None
                };
                let passed = verified && spot.as_ref().is_none_or(|s| s.passed);
                let summary = cert.summary();
                let mut o = Outcome::new(
                    Status::of(passed),
                    json!({ "verified": verified, "certificate": summary, "spot_check": spot }),
                )
                .detail(format!("{} certificate for rank {}, verified {verified}", summary.basis, summary.rank));
                if let Some(s) = &spot {
                    o = o.detail(format!("constant-term spot check {}", s.passed));
                }
                o.claims = strong_ind_consequences(&cert).claims;
                o
            }
            Args::Bound { x, y, precision } => {
                let (x, y) = (self.fac(x)?, self.fac(y)?);
                let n = self.precision(*precision, x);
                let b = summand_bound_for(x, y, n)?;
                Outcome::new(Status::Info, to_value(&b))
                    .detail(format!("at most {} summands, each of rank at least {}", b.bound, b.min_summand_rank))
                    .claim(Claim::new(format!("at most {} indecomposable summands", b.bound), b.source))
            }
            Args::Ulrich {
                terms,
                target,
                partition,
                irreducible,
                indecomposable,
            } => {
                let mut sop = SumOfProducts::parse(&self.ring, terms)?;
                if let Some(t) = target {
                    sop = sop.with_target(&self.poly_ref(t)?)?;
                }
                if let Some(p) = partition {
                    sop = sop.with_partition(p.clone())?;
                }
                let b = build_ulrich(&sop, *irreducible)?;
                let st = &b.stats;
                let mut passed = b.report.passed;
                let mut result = json!({
                    "report": b.report,
                    "stats": st,
                    "ratio": st.ratio_string(),
                    "guaranteed": b.guaranteed,
                });
                let mut o_claims = b.claims.clone();
                let mut details = vec![
                    format!("rank {}, mu = {}, rank_R = {}, e_R = {}", b.factorization.rank(), st.mu, st.rank_r, st.e_r),
                    format!("mu/e = {}, Ulrich {}", st.ratio_string(), st.ulrich),
                ];
                if *indecomposable {
                    let iu = indecomposable_ulrich(&sop, *irreducible)?;
                    let verified = iu.cert.verify()?;
                    passed &= verified && iu.formulas_match;
                    details.push(format!("strong indecomposability certificate verified {verified}"));
                    result["indecomposable"] = to_value(&iu.summary());
                    result["certificate"] = to_value(&iu.cert.summary());
                    o_claims.extend(iu.claims.iter().cloned());
                }
                let mut o = Outcome::new(Status::of(passed), result);
                o.claims = o_claims;
                o.details = details;
                o.produced = vec![(out(), Object::Fac(b.factorization))];
                o
            }
            Args::ExtensionSes { x, k, irreducible } => {
                let e = extension_ses(self.fac(x)?, *k, *irreducible)?;
                let passed = e.identities.all();
                Outcome::new(
                    Status::of(passed),
                    json!({
                        "k": e.k,
                        "stats_l": e.stats_l,
                        "stats_m": e.stats_m,
                        "stats_n": e.stats_n,
                        "identities": e.identities,
                        "not_extension_closed": e.not_extension_closed,
                    }),
                )
                .detail(format!(
                    "mu/e: L {}, M {}, N {}",
                    e.stats_l.ratio_string(),
                    e.stats_m.ratio_string(),
                    e.stats_n.ratio_string()
                ))
                .detail(format!("identities hold: {}", passed))
                .claim(e.claim)
            }
            Args::Report => {
                let facs: Vec<Value> = self
                    .facs
                    .iter()
                    .map(|(n, x)| json!({ "name": n, "d": x.d(), "rank": x.rank(), "reduced": x.is_reduced(), "f": x.f().to_string() }))
                    .collect();
                let morphs: Vec<Value> = self
                    .morphs
                    .iter()
                    .map(|(n, a)| json!({ "name": n, "source_rank": a.source().rank(), "target_rank": a.target().rank() }))
                    .collect();
                let mut o = Outcome::new(Status::Info, json!({ "factorizations": facs, "morphisms": morphs }));
                for (n, x) in &self.facs {
                    o = o.detail(format!("{n}: d = {}, rank {}", x.d(), x.rank()));
                }
                o
            }
        })
    }
}

/// First entry of the `i`-th cyclic product that differs from `f·I`.
#[derive(Serialize)]
struct Mismatch {
    index: usize,
    row: usize,
    col: usize,
    found: String,
}

fn first_mismatch(x: &MatFac, i: usize) -> Result<Mismatch> {
    let p = x.cyclic_product(i as i64)?;
    let f = match x.precision() {
        Some(n) => x.f().truncate(n),
        None => x.f().clone(),
    };
    for r in 0..p.rows() {
        for c in 0..p.cols() {
            let want = if r == c { f.clone() } else { x.ring().zero() };
            if p.get(r, c) != &want {
                return Ok(Mismatch {
                    index: i,
                    row: r,
                    col: c,
                    found: p.get(r, c).to_string(),
                });
            }
        }
    }
    Err(Error::Hypothesis(format!("cyclic product {i} equals f·I")))
}

fn refused(reason: String) -> Outcome {
    let mut o = Outcome::new(Status::Refused, Value::Null);
    o.details.push(format!("reason: {reason}"));
    o
}

/// Execute every command of a document in order.
pub fn run(doc: &ProblemDoc, flags: &Flags) -> std::result::Result<RunReport, DocError> {
    let p = Problem::load(doc)?;
    let mut s = Session {
        ring: p.ring,
        polynomials: p.polynomials,
        facs: p.factorizations,
        morphs: p.morphisms,
        flags,
    };
    let mut reports = Vec::with_capacity(p.commands.len());
    let mut summary = Summary::default();
    for (index, c) in p.commands.iter().enumerate() {
        let args = serde_json::to_value(&c.args).expect("arguments serialize");
        let args = args.get("args").cloned().unwrap_or(Value::Null);
        let (status, reason, result, claims, details) = match s.exec(&c.args, c.output.as_deref()) {
            Ok(o) => {
                for (name, obj) in o.produced {
                    if name.is_empty() {
                        continue;
                    }
                    match obj {
                        Object::Fac(x) => s.facs.insert(name, x).map(|_| ()),
                        Object::Morph(a) => s.morphs.insert(name, a).map(|_| ()),
                    };
                }
                let (reason, details) = if o.status == Status::Refused {
                    (o.details.first().map(|d| d.trim_start_matches("reason: ").to_string()), vec![])
                } else {
                    (None, o.details)
                };
                (o.status, reason, o.result, o.claims, details)
            }
            Err(e) => (Status::Refused, Some(e.to_string()), Value::Null, vec![], vec![]),
        };
        match status {
            Status::Pass => summary.pass += 1,
            Status::Fail => summary.fail += 1,
            Status::Refused => summary.refused += 1,
            Status::Info => summary.info += 1,
        }
        reports.push(CommandReport {
            index,
            op: c.args.op(),
            args,
            subject: c.args.references().iter().map(|r| format!(" {}", r.1)).collect(),
            output: c.output.clone(),
            status,
            reason,
            result,
            claims,
            details,
        });
    }
    let exit_status = if summary.fail > 0 { 1 } else { 0 };
    Ok(RunReport {
        ring: doc.ring.clone(),
        flags: *flags,
        commands: reports,
        summary,
        exit_status,
    })
}
