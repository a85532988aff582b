//! Scenario files: rings, maps, relations and verification steps as data.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use cremona_core::textio::{parse_expression, parse_polynomial};
use cremona_core::towers::{ChangeOfVariables, RootRule};
use cremona_core::{CremonaMap, Field, Polynomial, RationalFunction, Ring, Substitution};
use serde::Deserialize;

use crate::error::{SuiteError, SuiteResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub id: String,
    pub title: String,
    pub characteristic: u64,
    #[serde(default)]
    pub definitions: BTreeMap<String, String>,
    #[serde(default)]
    pub variants: Vec<VariantSpec>,
    pub rings: Vec<RingSpec>,
    #[serde(default)]
    pub maps: Vec<MapSpec>,
    #[serde(default)]
    pub relations: Vec<RelationSpec>,
    pub steps: Vec<StepSpec>,
}

/// Alternative readings of a formula, selected by overriding definitions or
/// by replacing a map with a reduction of a source map.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariantSpec {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub definitions: BTreeMap<String, String>,
    /// Map to replace by the reduction of `source` modulo the characteristic.
    pub reduce_map: Option<String>,
    pub source: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    pub name: String,
    pub variables: Vec<String>,
    pub over: Option<String>,
    #[serde(default)]
    pub forward: Vec<String>,
    #[serde(default)]
    pub backward: Vec<String>,
    pub root: Option<RootSpec>,
}

/// `symbol^2 = linear * symbol + constant`, with `symbol = value` over the parent ring.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootSpec {
    pub symbol: String,
    pub value: String,
    #[serde(default = "zero_text")]
    pub linear: String,
    pub constant: String,
}

fn zero_text() -> String {
    "0".into()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub name: String,
    pub ring: String,
    pub images: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationSpec {
    pub name: String,
    pub ring: String,
    pub poly: String,
}

fn yes() -> bool {
    true
}

/// One verification step. Which of the optional arguments are required
/// depends on `op`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSpec {
    pub id: String,
    pub op: String,
    /// Name of the displayed formula this step certifies.
    pub display: String,
    #[serde(default = "yes")]
    pub expect: bool,
    /// Explanation attached to steps that record an inconsistent display.
    pub erratum: Option<String>,
    pub map: Option<String>,
    pub ring: Option<String>,
    pub expr: Option<String>,
    pub image: Option<String>,
    pub generators: Option<Vec<String>>,
    pub matrix: Option<Vec<Vec<i64>>>,
    pub determinant: Option<i64>,
    pub relation: Option<String>,
    pub from: Option<String>,
    pub to: Option<String>,
    pub divisor: Option<String>,
    pub locus: Option<BTreeMap<String, String>>,
    pub required: Option<Vec<String>>,
    pub variable: Option<String>,
    pub solution: Option<String>,
    pub rhs: Option<String>,
    pub rhs_ring: Option<String>,
    pub element: Option<String>,
    pub conjugate: Option<String>,
    pub invariants: Option<Vec<[String; 2]>>,
    pub trace: Option<String>,
    pub norm: Option<String>,
    pub source: Option<String>,
    pub p: Option<u64>,
}

/// A standalone map file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    #[serde(default)]
    pub name: String,
    pub characteristic: u64,
    pub variables: Vec<String>,
    pub images: Vec<String>,
}

pub fn load_map_file(path: &Path) -> SuiteResult<CremonaMap> {
    let text = fs::read_to_string(path).map_err(|e| SuiteError::io(path, e))?;
    let file: MapFile = toml::from_str(&text).map_err(|e| SuiteError::schema(path, e.message()))?;
    let field = Field::with_characteristic(file.characteristic).map_err(|e| SuiteError::schema(path, format!("characteristic: {e}")))?;
    let ring = Ring::new(field, &file.variables).map_err(|e| SuiteError::schema(path, format!("variables: {e}")))?;
    let images = file
        .images
        .iter()
        .enumerate()
        .map(|(i, s)| parse_expression(s, &ring).map_err(|e| SuiteError::schema(path, format!("images[{i}]: {e}"))))
        .collect::<SuiteResult<Vec<_>>>()?;
    CremonaMap::new(&ring, images).map_err(|e| SuiteError::schema(path, format!("images: {e}")))
}

#[derive(Debug, Clone)]
pub struct RingEntry {
    pub ring: Ring,
    pub over: Option<String>,
    pub change: Option<ChangeOfVariables>,
}

#[derive(Debug, Clone)]
pub struct RelationEntry {
    pub ring: String,
    pub poly: Polynomial,
}

/// Typed form of a step, with expressions parsed in their rings.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Op {
    Involution { map: String },
    Pullback { map: String, ring: String, expr: RationalFunction, image: RationalFunction },
    MonomialProfile { map: String, ring: String, generators: Vec<RationalFunction>, matrix: Vec<Vec<i64>>, determinant: i64 },
    Generation { ring: String },
    Relation { relation: String },
    Transport { from: String, to: String },
    Eliminate { ring: String, divisor: String },
    Singular { relation: String, locus: Substitution, required: Vec<usize> },
    SolveLinear { relation: String, variable: usize, solution: Option<RationalFunction> },
    Invariance { map: String, ring: String, expr: RationalFunction },
    Equals { ring: String, lhs: RationalFunction, rhs_ring: String, rhs: RationalFunction },
    Descent { map: String, ring: String, element: RationalFunction, conjugate: RationalFunction, invariant_ring: Ring, invariants: Vec<RationalFunction>, trace: RationalFunction, norm: RationalFunction },
    ReduceModP { map: String, source: CremonaMap, p: u64 },
    DenominatorMatches { map: String, variable: usize, ring: String, expr: RationalFunction },
}

impl Op {
    pub fn name(&self) -> &'static str {
        match self {
            Op::Involution { .. } => "involution",
            Op::Pullback { .. } => "pullback",
            Op::MonomialProfile { .. } => "monomial_profile",
            Op::Generation { .. } => "generation",
            Op::Relation { .. } => "relation",
            Op::Transport { .. } => "transport",
            Op::Eliminate { .. } => "eliminate",
            Op::Singular { .. } => "singular",
            Op::SolveLinear { .. } => "solve_linear",
            Op::Invariance { .. } => "invariance",
            Op::Equals { .. } => "equals",
            Op::Descent { .. } => "descent",
            Op::ReduceModP { .. } => "reduce_mod_p",
            Op::DenominatorMatches { .. } => "denominator_matches",
        }
    }

    /// Relations the step reads.
    pub fn relations(&self) -> Vec<&str> {
        match self {
            Op::Relation { relation } | Op::Singular { relation, .. } | Op::SolveLinear { relation, .. } => vec![relation],
            Op::Transport { from, to } => vec![from, to],
            Op::Eliminate { divisor, .. } => vec![divisor],
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Step {
    pub id: String,
    pub display: String,
    pub expect: bool,
    pub erratum: Option<String>,
    pub op: Op,
}

/// Identification of the variant an instance was built from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantInfo {
    pub name: String,
    pub description: String,
    /// True when the variant is computed rather than read from displayed text.
    pub derived: bool,
}

/// A scenario with every expression parsed, for one variant.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub title: String,
    pub field: Field,
    pub variant: Option<VariantInfo>,
    pub base: String,
    pub rings: BTreeMap<String, RingEntry>,
    pub maps: BTreeMap<String, CremonaMap>,
    pub relations: BTreeMap<String, RelationEntry>,
    pub steps: Vec<Step>,
    /// Actions of maps on intermediate rings, keyed by (map, ring).
    actions: Arc<Mutex<HashMap<(String, String), Substitution>>>,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub path: PathBuf,
    pub file: ScenarioFile,
    pub instances: Vec<Instance>,
}

impl Scenario {
    pub fn id(&self) -> &str {
        &self.file.id
    }

    pub fn has_variants(&self) -> bool {
        !self.file.variants.is_empty()
    }
}

/// Loads and fully validates a scenario. Relative `source` paths resolve
/// against `root`.
pub fn load_scenario(path: &Path, root: &Path) -> SuiteResult<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| SuiteError::io(path, e))?;
    parse_scenario(&text, path, root)
}

pub fn parse_scenario(text: &str, path: &Path, root: &Path) -> SuiteResult<Scenario> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| SuiteError::schema(path, schema_message(&e)))?;
    let mut instances = Vec::new();
    if file.variants.is_empty() {
        instances.push(Builder::new(&file, None, path, root)?.build()?);
    } else {
        for v in &file.variants {
            instances.push(Builder::new(&file, Some(v), path, root)?.build()?);
        }
    }
    Ok(Scenario { path: path.to_path_buf(), file, instances })
}

fn schema_message(e: &toml::de::Error) -> String {
    match e.span() {
        Some(span) => format!("{} (at byte {})", e.message(), span.start),
        None => e.message().to_string(),
    }
}

/// All `*.toml` scenarios directly inside `dir`, sorted by id.
pub fn load_dir(dir: &Path) -> SuiteResult<Vec<Scenario>> {
    let entries = fs::read_dir(dir).map_err(|e| SuiteError::io(dir, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    let mut out = paths.iter().map(|p| load_scenario(p, dir)).collect::<SuiteResult<Vec<_>>>()?;
    out.sort_by(|a, b| a.file.id.cmp(&b.file.id));
    Ok(out)
}

struct Builder<'a> {
    file: &'a ScenarioFile,
    variant: Option<&'a VariantSpec>,
    path: &'a Path,
    root: &'a Path,
    field: Field,
    defs: BTreeMap<String, String>,
    rings: BTreeMap<String, RingEntry>,
}

impl<'a> Builder<'a> {
    fn new(file: &'a ScenarioFile, variant: Option<&'a VariantSpec>, path: &'a Path, root: &'a Path) -> SuiteResult<Builder<'a>> {
        let field = Field::with_characteristic(file.characteristic).map_err(|e| SuiteError::schema(path, format!("characteristic: {e}")))?;
        let mut defs = file.definitions.clone();
        if let Some(v) = variant {
            defs.extend(v.definitions.clone());
        }
        Ok(Builder { file, variant, path, root, field, defs, rings: BTreeMap::new() })
    }

    fn err(&self, at: impl Into<String>, msg: impl std::fmt::Display) -> SuiteError {
        let at = at.into();
        match self.variant {
            Some(v) => SuiteError::schema(self.path, format!("{at} (variant {}): {msg}", v.name)),
            None => SuiteError::schema(self.path, format!("{at}: {msg}")),
        }
    }

    /// Replaces `{NAME}` by the parenthesized definition.
    fn expand(&self, s: &str, at: &str) -> SuiteResult<String> {
        let mut out = String::with_capacity(s.len());
        let mut rest = s;
        while let Some(open) = rest.find('{') {
            out.push_str(&rest[..open]);
            let close = rest[open..].find('}').ok_or_else(|| self.err(at, "unclosed `{`"))? + open;
            let name = &rest[open + 1..close];
            let def = self.defs.get(name).ok_or_else(|| self.err(at, format!("unknown definition `{name}`")))?;
            if def.contains('{') {
                return Err(self.err(at, format!("definition `{name}` refers to another definition")));
            }
            out.push('(');
            out.push_str(def);
            out.push(')');
            rest = &rest[close + 1..];
        }
        out.push_str(rest);
        Ok(out)
    }

    fn ring(&self, name: &str, at: &str) -> SuiteResult<&RingEntry> {
        self.rings.get(name).ok_or_else(|| self.err(at, format!("unknown ring `{name}`")))
    }

    fn expr(&self, s: &str, ring: &Ring, at: &str) -> SuiteResult<RationalFunction> {
        let text = self.expand(s, at)?;
        parse_expression(&text, ring).map_err(|e| self.err(at, e))
    }

    fn poly(&self, s: &str, ring: &Ring, at: &str) -> SuiteResult<Polynomial> {
        let text = self.expand(s, at)?;
        parse_polynomial(&text, ring).map_err(|e| self.err(at, e))
    }

    fn build(mut self) -> SuiteResult<Instance> {
        let mut base = None;
        for (i, spec) in self.file.rings.iter().enumerate() {
            let at = format!("rings[{i}]");
            if self.rings.contains_key(&spec.name) {
                return Err(self.err(format!("{at}.name"), format!("duplicate ring `{}`", spec.name)));
            }
            let ring = Ring::new(self.field, &spec.variables).map_err(|e| self.err(format!("{at}.variables"), e))?;
            let entry = match &spec.over {
                None => {
                    if base.replace(spec.name.clone()).is_some() {
                        return Err(self.err(format!("{at}.over"), "only one ring may omit `over`"));
                    }
                    RingEntry { ring, over: None, change: None }
                }
                Some(parent) => {
                    let change = self.change(spec, &ring, parent, &at)?;
                    RingEntry { ring, over: Some(parent.clone()), change: Some(change) }
                }
            };
            self.rings.insert(spec.name.clone(), entry);
        }
        let base = base.ok_or_else(|| self.err("rings", "no base ring"))?;

        let mut maps = BTreeMap::new();
        for (i, spec) in self.file.maps.iter().enumerate() {
            let at = format!("maps[{i}]");
            let ring = self.ring(&spec.ring, &format!("{at}.ring"))?.ring.clone();
            let reduced = self.variant.filter(|v| v.reduce_map.as_deref() == Some(spec.name.as_str()));
            let map = match reduced {
                Some(v) => {
                    let src = v.source.as_deref().ok_or_else(|| self.err("variants.source", "`reduce_map` needs `source`"))?;
                    let source = load_map_file(&self.root.join(src))?;
                    let p = self.field.characteristic();
                    let m = source.reduce_mod_p(p).map_err(|e| self.err("variants.source", e))?;
                    if m.ring() != &ring {
                        return Err(self.err("variants.source", "reduced map does not live in the map's ring"));
                    }
                    m
                }
                None => {
                    let images = spec
                        .images
                        .iter()
                        .enumerate()
                        .map(|(j, s)| self.expr(s, &ring, &format!("{at}.images[{j}]")))
                        .collect::<SuiteResult<Vec<_>>>()?;
                    CremonaMap::new(&ring, images).map_err(|e| self.err(format!("{at}.images"), e))?
                }
            };
            maps.insert(spec.name.clone(), map);
        }

        let mut relations = BTreeMap::new();
        for (i, spec) in self.file.relations.iter().enumerate() {
            let at = format!("relations[{i}]");
            let ring = self.ring(&spec.ring, &format!("{at}.ring"))?.ring.clone();
            let poly = self.poly(&spec.poly, &ring, &format!("{at}.poly"))?;
            relations.insert(spec.name.clone(), RelationEntry { ring: spec.ring.clone(), poly });
        }

        let mut steps = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for (i, spec) in self.file.steps.iter().enumerate() {
            if !seen.insert(spec.id.clone()) {
                return Err(self.err(format!("steps[{i}].id"), format!("duplicate step id `{}`", spec.id)));
            }
            let op = self.op(spec, i, &maps, &relations, &base)?;
            steps.push(Step { id: spec.id.clone(), display: spec.display.clone(), expect: spec.expect, erratum: spec.erratum.clone(), op });
        }

        let variant = self.variant.map(|v| VariantInfo { name: v.name.clone(), description: v.description.clone(), derived: v.reduce_map.is_some() });
        Ok(Instance {
            id: self.file.id.clone(),
            title: self.file.title.clone(),
            field: self.field,
            variant,
            base,
            rings: self.rings,
            maps,
            relations,
            steps,
            actions: Arc::default(),
        })
    }

    fn change(&self, spec: &RingSpec, ring: &Ring, parent: &str, at: &str) -> SuiteResult<ChangeOfVariables> {
        let old = self.ring(parent, &format!("{at}.over"))?.ring.clone();
        let forward = spec
            .forward
            .iter()
            .enumerate()
            .map(|(j, s)| self.expr(s, &old, &format!("{at}.forward[{j}]")))
            .collect::<SuiteResult<Vec<_>>>()?;
        let change = ChangeOfVariables::new(&old, ring, forward).map_err(|e| self.err(format!("{at}.forward"), e))?;
        if spec.backward.is_empty() {
            if spec.root.is_some() {
                return Err(self.err(format!("{at}.root"), "a root needs backward expressions"));
            }
            return Ok(change);
        }
        let back_ring = match &spec.root {
            Some(r) => ring.extended(&[r.symbol.as_str()]).map_err(|e| self.err(format!("{at}.root.symbol"), e))?,
            None => ring.clone(),
        };
        let exprs = spec
            .backward
            .iter()
            .enumerate()
            .map(|(j, s)| self.expr(s, &back_ring, &format!("{at}.backward[{j}]")))
            .collect::<SuiteResult<Vec<_>>>()?;
        let root = match &spec.root {
            None => None,
            Some(r) => {
                let symbol = back_ring.nvars() - 1;
                let linear = self.poly(&r.linear, &back_ring, &format!("{at}.root.linear"))?;
                let constant = self.poly(&r.constant, &back_ring, &format!("{at}.root.constant"))?;
                let rule = RootRule::new(symbol, linear, constant).map_err(|e| self.err(format!("{at}.root"), e))?;
                let value = self.expr(&r.value, &old, &format!("{at}.root.value"))?;
                Some((rule, value))
            }
        };
        change.with_backward(&back_ring, exprs, root).map_err(|e| self.err(format!("{at}.backward"), e))
    }

    fn op(&self, spec: &StepSpec, i: usize, maps: &BTreeMap<String, CremonaMap>, relations: &BTreeMap<String, RelationEntry>, base: &str) -> SuiteResult<Op> {
        let at = |f: &str| format!("steps[{i}].{f}");
        let need = |v: &Option<String>, f: &str| v.clone().ok_or_else(|| self.err(at(f), format!("required by op `{}`", spec.op)));
        let map_name = |b: &Self| -> SuiteResult<String> {
            let m = need(&spec.map, "map")?;
            if !maps.contains_key(&m) {
                return Err(b.err(at("map"), format!("unknown map `{m}`")));
            }
            Ok(m)
        };
        let relation = |f: &str, v: &Option<String>| -> SuiteResult<String> {
            let r = need(v, f)?;
            if !relations.contains_key(&r) {
                return Err(self.err(at(f), format!("unknown relation `{r}`")));
            }
            Ok(r)
        };
        let ring_or_base = |v: &Option<String>, f: &str| -> SuiteResult<(String, Ring)> {
            let name = v.clone().unwrap_or_else(|| base.to_string());
            let ring = self.ring(&name, &at(f))?.ring.clone();
            Ok((name, ring))
        };
        let op = match spec.op.as_str() {
            "involution" => Op::Involution { map: map_name(self)? },
            "pullback" => {
                let (ring_name, ring) = ring_or_base(&spec.ring, "ring")?;
                Op::Pullback {
                    map: map_name(self)?,
                    expr: self.expr(&need(&spec.expr, "expr")?, &ring, &at("expr"))?,
                    image: self.expr(&need(&spec.image, "image")?, &ring, &at("image"))?,
                    ring: ring_name,
                }
            }
            "monomial_profile" => {
                let (ring_name, ring) = ring_or_base(&spec.ring, "ring")?;
                let gens = spec.generators.clone().ok_or_else(|| self.err(at("generators"), "required by op `monomial_profile`"))?;
                let generators = gens
                    .iter()
                    .enumerate()
                    .map(|(j, s)| self.expr(s, &ring, &at(&format!("generators[{j}]"))))
                    .collect::<SuiteResult<Vec<_>>>()?;
                let matrix = spec.matrix.clone().ok_or_else(|| self.err(at("matrix"), "required by op `monomial_profile`"))?;
                let determinant = spec.determinant.ok_or_else(|| self.err(at("determinant"), "required by op `monomial_profile`"))?;
                Op::MonomialProfile { map: map_name(self)?, ring: ring_name, generators, matrix, determinant }
            }
            "generation" => {
                let r = need(&spec.ring, "ring")?;
                let entry = self.ring(&r, &at("ring"))?;
                if entry.change.as_ref().and_then(|c| c.backward.as_ref()).is_none() {
                    return Err(self.err(at("ring"), format!("ring `{r}` has no backward expressions")));
                }
                Op::Generation { ring: r }
            }
            "relation" => Op::Relation { relation: relation("relation", &spec.relation)? },
            "transport" => {
                let from = relation("from", &spec.from)?;
                let to = relation("to", &spec.to)?;
                self.transport_path(&relations[&from].ring, &relations[&to].ring).map_err(|m| self.err(at("to"), m))?;
                Op::Transport { from, to }
            }
            "eliminate" => {
                let r = need(&spec.ring, "ring")?;
                if self.ring(&r, &at("ring"))?.change.is_none() {
                    return Err(self.err(at("ring"), format!("ring `{r}` is not defined over another ring")));
                }
                Op::Eliminate { ring: r, divisor: relation("divisor", &spec.divisor)? }
            }
            "singular" => {
                let rel = relation("relation", &spec.relation)?;
                let ring = self.ring(&relations[&rel].ring, &at("relation"))?.ring.clone();
                let locus = spec.locus.clone().ok_or_else(|| self.err(at("locus"), "required by op `singular`"))?;
                let mut pairs = std::collections::HashMap::new();
                for (k, v) in &locus {
                    pairs.insert(k.clone(), self.expr(v, &ring, &at(&format!("locus.{k}")))?);
                }
                let locus = Substitution::with_identity_defaults(&ring, &ring, &pairs).map_err(|e| self.err(at("locus"), e))?;
                let required = spec
                    .required
                    .clone()
                    .ok_or_else(|| self.err(at("required"), "required by op `singular`"))?
                    .iter()
                    .map(|v| ring.index_of(v).map_err(|e| self.err(at("required"), e)))
                    .collect::<SuiteResult<Vec<_>>>()?;
                Op::Singular { relation: rel, locus, required }
            }
            "solve_linear" => {
                let rel = relation("relation", &spec.relation)?;
                let ring = self.ring(&relations[&rel].ring, &at("relation"))?.ring.clone();
                let variable = ring.index_of(&need(&spec.variable, "variable")?).map_err(|e| self.err(at("variable"), e))?;
                let solution = spec.solution.as_ref().map(|s| self.expr(s, &ring, &at("solution"))).transpose()?;
                Op::SolveLinear { relation: rel, variable, solution }
            }
            "invariance" => {
                let (ring_name, ring) = ring_or_base(&spec.ring, "ring")?;
                Op::Invariance { map: map_name(self)?, expr: self.expr(&need(&spec.expr, "expr")?, &ring, &at("expr"))?, ring: ring_name }
            }
            "equals" => {
                let (ring_name, ring) = ring_or_base(&spec.ring, "ring")?;
                let (rhs_name, rhs_ring) = match &spec.rhs_ring {
                    Some(_) => ring_or_base(&spec.rhs_ring, "rhs_ring")?,
                    None => (ring_name.clone(), ring.clone()),
                };
                Op::Equals {
                    lhs: self.expr(&need(&spec.expr, "expr")?, &ring, &at("expr"))?,
                    rhs: self.expr(&need(&spec.rhs, "rhs")?, &rhs_ring, &at("rhs"))?,
                    ring: ring_name,
                    rhs_ring: rhs_name,
                }
            }
            "descent" => {
                let (ring_name, ring) = ring_or_base(&spec.ring, "ring")?;
                let invs = spec.invariants.clone().ok_or_else(|| self.err(at("invariants"), "required by op `descent`"))?;
                let names: Vec<&str> = invs.iter().map(|[n, _]| n.as_str()).collect();
                let invariant_ring = Ring::new(self.field, &names).map_err(|e| self.err(at("invariants"), e))?;
                let invariants = invs
                    .iter()
                    .map(|[n, s]| self.expr(s, &ring, &at(&format!("invariants.{n}"))))
                    .collect::<SuiteResult<Vec<_>>>()?;
                Op::Descent {
                    map: map_name(self)?,
                    element: self.expr(&need(&spec.element, "element")?, &ring, &at("element"))?,
                    conjugate: self.expr(&need(&spec.conjugate, "conjugate")?, &ring, &at("conjugate"))?,
                    trace: self.expr(&need(&spec.trace, "trace")?, &invariant_ring, &at("trace"))?,
                    norm: self.expr(&need(&spec.norm, "norm")?, &invariant_ring, &at("norm"))?,
                    ring: ring_name,
                    invariant_ring,
                    invariants,
                }
            }
            "reduce_mod_p" => {
                let src = need(&spec.source, "source")?;
                let source = load_map_file(&self.root.join(&src))?;
                let p = spec.p.unwrap_or(self.field.characteristic());
                Op::ReduceModP { map: map_name(self)?, source, p }
            }
            "denominator_matches" => {
                let m = map_name(self)?;
                let variable = maps[&m].ring().index_of(&need(&spec.variable, "variable")?).map_err(|e| self.err(at("variable"), e))?;
                let (ring_name, ring) = ring_or_base(&spec.ring, "ring")?;
                Op::DenominatorMatches { map: m, variable, expr: self.expr(&need(&spec.expr, "expr")?, &ring, &at("expr"))?, ring: ring_name }
            }
            other => return Err(self.err(at("op"), format!("unknown op `{other}`"))),
        };
        Ok(op)
    }

    fn transport_path(&self, from: &str, to: &str) -> Result<Vec<String>, String> {
        transport_path(&self.rings, from, to)
    }
}

/// Rings from just above `from` up to `to`, following `over` links down from `to`.
pub fn transport_path(rings: &BTreeMap<String, RingEntry>, from: &str, to: &str) -> Result<Vec<String>, String> {
    let mut path = Vec::new();
    let mut cur = to.to_string();
    while cur != from {
        let entry = rings.get(&cur).ok_or_else(|| format!("unknown ring `{cur}`"))?;
        let has_backward = entry.change.as_ref().is_some_and(|c| c.backward.is_some());
        if !has_backward {
            return Err(format!("ring `{cur}` has no backward expressions"));
        }
        path.push(cur.clone());
        cur = entry.over.clone().ok_or_else(|| format!("ring `{to}` is not built over `{from}`"))?;
    }
    if path.is_empty() {
        return Err("a transport needs distinct rings".into());
    }
    path.reverse();
    Ok(path)
}

impl Instance {
    /// Label used in reports, e.g. `sec4[linear]`.
    pub fn label(&self) -> String {
        match &self.variant {
            Some(v) => format!("{}[{}]", self.id, v.name),
            None => self.id.clone(),
        }
    }

    pub fn ring(&self, name: &str) -> &RingEntry {
        &self.rings[name]
    }

    /// Substitution sending each variable of `ring` to its expression over
    /// the base ring.
    pub fn lowering(&self, ring: &str) -> cremona_core::Result<Substitution> {
        let r = &self.rings[ring].ring;
        let images = (0..r.nvars()).map(|i| self.lower(ring, &RationalFunction::var(r, i))).collect::<cremona_core::Result<Vec<_>>>()?;
        Substitution::new(r, &self.rings[&self.base].ring, images)
    }

    /// `map` applied after lowering from `ring`. Acting on the variables of
    /// `ring` first keeps the intermediate expressions small.
    pub fn action(&self, map: &str, ring: &str) -> cremona_core::Result<Substitution> {
        let key = (map.to_string(), ring.to_string());
        if let Some(s) = self.actions.lock().expect("action cache").get(&key) {
            return Ok(s.clone());
        }
        let s = self.lowering(ring)?.then(&self.maps[map].substitution())?;
        self.actions.lock().expect("action cache").insert(key, s.clone());
        Ok(s)
    }

    /// Applies `map` to an expression over `ring`, returning it over the base ring.
    pub fn pullback(&self, map: &str, ring: &str, e: &RationalFunction) -> cremona_core::Result<RationalFunction> {
        self.action(map, ring)?.apply(e)
    }

    /// Rewrites `e` from ring `from` down to the base ring.
    pub fn lower(&self, from: &str, e: &RationalFunction) -> cremona_core::Result<RationalFunction> {
        let mut cur = from.to_string();
        let mut e = e.clone();
        while let Some(change) = &self.rings[&cur].change {
            e = change.forward_substitution().apply(&e)?;
            cur = self.rings[&cur].over.clone().expect("rings with a change have a parent");
        }
        Ok(e)
    }
}
