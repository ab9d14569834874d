//! Canonical JSON artifacts.
//!
//! A file is one JSON object with keys in sorted order, no insignificant
//! whitespace and two bookkeeping keys: `"artifact"` names the type and
//! `"digest"` is the hex SHA-256 of the canonical encoding of the object
//! without `"digest"`. Decoding recomputes the digest when it is present.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::ca::{Config, LinearCA, Pattern};
use crate::eden::{MepPair, MmProbe, PreinjCertificate};
use crate::error::{Error, Result};
use crate::ff::{FFMatrix, MatrixFile, PrimeField};
use crate::group::{ElementSet, GroupCtx};
use crate::lemma1::{CycleSystem, Lemma1Report};
use crate::ore::{FailureWitness, GRElem, GRElemFile, OreSolution};
use crate::synth::InjCertificate;

pub const ARTIFACT_KEY: &str = "artifact";
pub const DIGEST_KEY: &str = "digest";

/// Compact JSON with object keys sorted bytewise, independent of how the
/// map was built.
pub fn canonical(v: &Value) -> String {
    let mut out = String::new();
    write_canonical(v, &mut out);
    out
}

fn write_canonical(v: &Value, out: &mut String) {
    match v {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, k) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_canonical(&map[k], out);
            }
            out.push('}');
        }
        Value::Array(items) => {
            out.push('[');
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_canonical(x, out);
            }
            out.push(']');
        }
        other => out.push_str(&other.to_string()),
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut s = String::with_capacity(64);
    for b in Sha256::digest(bytes) {
        let _ = write!(s, "{b:02x}");
    }
    s
}

/// A type with a canonical file form.
pub trait Artifact: Sized {
    const KIND: &'static str;
    type Repr: Serialize + DeserializeOwned;
    fn to_repr(&self) -> Result<Self::Repr>;
    fn from_repr(repr: Self::Repr) -> Result<Self>;
}

/// Digest over everything except the `"digest"` key.
pub fn digest_of(v: &Value) -> Result<String> {
    let mut v = v.clone();
    match &mut v {
        Value::Object(map) => {
            map.remove(DIGEST_KEY);
        }
        _ => return Err(Error::Decode("artifact must be a JSON object".into())),
    }
    Ok(sha256_hex(canonical(&v).as_bytes()))
}

pub fn to_value<T: Artifact>(x: &T) -> Result<Value> {
    let mut v = serde_json::to_value(x.to_repr()?)?;
    let map = v.as_object_mut().ok_or_else(|| Error::Decode(format!("{} does not encode to an object", T::KIND)))?;
    map.insert(ARTIFACT_KEY.into(), Value::String(T::KIND.into()));
    let digest = digest_of(&v)?;
    v.as_object_mut().expect("object").insert(DIGEST_KEY.into(), Value::String(digest));
    Ok(v)
}

/// Canonical text, newline terminated.
pub fn encode<T: Artifact>(x: &T) -> Result<String> {
    let mut s = canonical(&to_value(x)?);
    s.push('\n');
    Ok(s)
}

/// Parses, checks the tag and digest, then rebuilds the value. Syntax and
/// shape errors carry the line and column reported by the JSON parser.
pub fn decode<T: Artifact>(text: &str) -> Result<T> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Decode(format!("{}: {e}", T::KIND)))?;
    let map = v.as_object().ok_or_else(|| Error::Decode(format!("{}: expected a JSON object", T::KIND)))?;
    match map.get(ARTIFACT_KEY) {
        Some(Value::String(k)) if k == T::KIND => {}
        Some(other) => return Err(Error::Decode(format!("expected artifact {:?}, found {other}", T::KIND))),
        None => return Err(Error::Decode(format!("{}: missing \"{ARTIFACT_KEY}\" tag", T::KIND))),
    }
    if let Some(d) = map.get(DIGEST_KEY) {
        let expected = digest_of(&v)?;
        if d.as_str() != Some(expected.as_str()) {
            return Err(Error::Decode(format!("{}: digest mismatch (recorded {d}, computed {expected:?})", T::KIND)));
        }
    }
    let repr: T::Repr = serde_json::from_str(text).map_err(|e| Error::Decode(format!("{}: {e}", T::KIND)))?;
    T::from_repr(repr)
}

pub fn read<T: Artifact>(path: &std::path::Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    decode(&text).map_err(|e| match e {
        Error::Decode(msg) => Error::Decode(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Writes the canonical encoding and returns the SHA-256 of the bytes written.
pub fn write<T: Artifact>(path: &std::path::Path, x: &T) -> Result<String> {
    let text = encode(x)?;
    std::fs::write(path, &text)?;
    Ok(sha256_hex(text.as_bytes()))
}

fn words(ctx: &GroupCtx, names: &[String]) -> Result<ElementSet> {
    let ws = names.iter().map(|w| ctx.parse_word(w)).collect::<Result<Vec<_>>>()?;
    let set = ElementSet::new(ws.clone());
    if set.as_slice() != ws.as_slice() {
        return Err(Error::Decode("element list must be duplicate free and in canonical order".into()));
    }
    Ok(set)
}

fn names(set: &ElementSet) -> Vec<String> {
    set.iter().map(|w| w.to_string()).collect()
}

#[derive(Serialize, Deserialize)]
pub struct CaFile {
    pub group: GroupCtx,
    pub p: u64,
    pub m: usize,
    pub memory: Vec<String>,
    pub alpha: Vec<MatrixFile>,
    pub provenance: Option<CycleSystem>,
}

impl Artifact for LinearCA {
    const KIND: &'static str = "ca";
    type Repr = CaFile;
    fn to_repr(&self) -> Result<CaFile> {
        Ok(CaFile {
            group: self.ctx().clone(),
            p: self.p(),
            m: self.m(),
            memory: names(self.memory()),
            alpha: self.alpha().iter().map(MatrixFile::from).collect(),
            provenance: self.provenance().cloned(),
        })
    }
    fn from_repr(r: CaFile) -> Result<Self> {
        let memory = words(&r.group, &r.memory)?;
        let alpha = r.alpha.iter().map(MatrixFile::to_matrix).collect::<Result<Vec<_>>>()?;
        if alpha.iter().any(|a| a.p() != r.p || a.rows() != r.m || a.cols() != r.m) {
            return Err(Error::Decode(format!("every alpha must be {0}x{0} over GF({1})", r.m, r.p)));
        }
        if alpha.is_empty() {
            PrimeField::new(r.p)?;
        }
        LinearCA::new(r.group, memory, alpha, r.provenance)
    }
}

#[derive(Serialize, Deserialize)]
pub struct ConfigFile {
    pub group: GroupCtx,
    pub p: u64,
    pub m: usize,
    pub entries: Vec<(String, Vec<u64>)>,
}

/// A configuration together with the group its words live in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigArtifact {
    pub ctx: GroupCtx,
    pub config: Config,
}

impl Artifact for ConfigArtifact {
    const KIND: &'static str = "config";
    type Repr = ConfigFile;
    fn to_repr(&self) -> Result<ConfigFile> {
        Ok(ConfigFile {
            group: self.ctx.clone(),
            p: self.config.field().p(),
            m: self.config.m(),
            entries: self.config.entries().map(|(g, v)| (g.to_string(), v.clone())).collect(),
        })
    }
    fn from_repr(r: ConfigFile) -> Result<Self> {
        let field = PrimeField::new(r.p)?;
        let ws: Vec<String> = r.entries.iter().map(|(w, _)| w.clone()).collect();
        let support = words(&r.group, &ws)?;
        for (w, v) in &r.entries {
            if v.iter().all(|&x| x == 0) || v.iter().any(|&x| x >= r.p) {
                return Err(Error::Decode(format!("entry {w:?}: values must be residues mod {} and not all zero", r.p)));
            }
        }
        let config = Config::from_entries(field, r.m, support.iter().cloned().zip(r.entries.into_iter().map(|(_, v)| v)))?;
        Ok(Self { ctx: r.group, config })
    }
}

impl Artifact for CycleSystem {
    const KIND: &'static str = "cycle_system";
    type Repr = CycleSystem;
    fn to_repr(&self) -> Result<CycleSystem> {
        Ok(self.clone())
    }
    fn from_repr(r: CycleSystem) -> Result<Self> {
        Ok(r)
    }
}

impl Artifact for Lemma1Report {
    const KIND: &'static str = "lemma1_report";
    type Repr = Lemma1Report;
    fn to_repr(&self) -> Result<Lemma1Report> {
        Ok(self.clone())
    }
    fn from_repr(r: Lemma1Report) -> Result<Self> {
        Ok(r)
    }
}

/// The certificate file leaves out `wall_time_ms` so that reruns produce the
/// same bytes; wall times go to the run manifest.
#[derive(Serialize, Deserialize)]
pub struct InjCertificateFile {
    #[serde(flatten)]
    pub fields: BTreeMap<String, Value>,
}

impl Artifact for InjCertificate {
    const KIND: &'static str = "inj_certificate";
    type Repr = InjCertificateFile;
    fn to_repr(&self) -> Result<InjCertificateFile> {
        let Value::Object(map) = serde_json::to_value(self)? else { unreachable!("struct") };
        let fields = map.into_iter().filter(|(k, _)| k != "wall_time_ms").collect();
        Ok(InjCertificateFile { fields })
    }
    fn from_repr(r: InjCertificateFile) -> Result<Self> {
        let mut map: serde_json::Map<String, Value> =
            r.fields.into_iter().filter(|(k, _)| k != ARTIFACT_KEY && k != DIGEST_KEY).collect();
        map.insert("wall_time_ms".into(), Value::from(0u64));
        Ok(serde_json::from_value(Value::Object(map))?)
    }
}

impl Artifact for PreinjCertificate {
    const KIND: &'static str = "preinj_certificate";
    type Repr = PreinjCertificate;
    fn to_repr(&self) -> Result<PreinjCertificate> {
        Ok(self.clone())
    }
    fn from_repr(r: PreinjCertificate) -> Result<Self> {
        Ok(r)
    }
}

impl Artifact for MmProbe {
    const KIND: &'static str = "mm_probe";
    type Repr = MmProbe;
    fn to_repr(&self) -> Result<MmProbe> {
        Ok(self.clone())
    }
    fn from_repr(r: MmProbe) -> Result<Self> {
        Ok(r)
    }
}

impl Artifact for GRElem {
    const KIND: &'static str = "grelem";
    type Repr = GRElemFile;
    fn to_repr(&self) -> Result<GRElemFile> {
        Ok(GRElemFile::from(self))
    }
    fn from_repr(r: GRElemFile) -> Result<Self> {
        r.to_elem()
    }
}

impl Artifact for FFMatrix {
    const KIND: &'static str = "matrix";
    type Repr = MatrixFile;
    fn to_repr(&self) -> Result<MatrixFile> {
        Ok(MatrixFile::from(self))
    }
    fn from_repr(r: MatrixFile) -> Result<Self> {
        r.to_matrix()
    }
}

#[derive(Serialize, Deserialize)]
pub struct PatternFile {
    pub window: Vec<String>,
    pub values: Vec<Vec<u64>>,
}

impl PatternFile {
    fn new(p: &Pattern) -> Self {
        Self { window: names(p.window()), values: p.values().to_vec() }
    }

    fn to_pattern(&self, ctx: &GroupCtx, p: u64, m: usize) -> Result<Pattern> {
        if self.values.iter().flatten().any(|&x| x >= p) {
            return Err(Error::Decode(format!("pattern values must be residues mod {p}")));
        }
        Pattern::new(words(ctx, &self.window)?, m, self.values.clone())
    }
}

/// A Garden-of-Eden pattern for a given automaton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoeWitness {
    pub ctx: GroupCtx,
    pub p: u64,
    pub pattern: Pattern,
}

#[derive(Serialize, Deserialize)]
pub struct GoeWitnessFile {
    pub group: GroupCtx,
    pub p: u64,
    pub m: usize,
    pub pattern: PatternFile,
}

impl Artifact for GoeWitness {
    const KIND: &'static str = "goe_witness";
    type Repr = GoeWitnessFile;
    fn to_repr(&self) -> Result<GoeWitnessFile> {
        Ok(GoeWitnessFile { group: self.ctx.clone(), p: self.p, m: self.pattern.m(), pattern: PatternFile::new(&self.pattern) })
    }
    fn from_repr(r: GoeWitnessFile) -> Result<Self> {
        let pattern = r.pattern.to_pattern(&r.group, r.p, r.m)?;
        Ok(Self { ctx: r.group, p: r.p, pattern })
    }
}

/// A pair of mutually erasable patterns found at a given radius.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MepWitness {
    pub ctx: GroupCtx,
    pub p: u64,
    pub radius: usize,
    pub pair: MepPair,
}

#[derive(Serialize, Deserialize)]
pub struct MepWitnessFile {
    pub group: GroupCtx,
    pub p: u64,
    pub m: usize,
    pub radius: usize,
    pub phi1: PatternFile,
    pub phi2: PatternFile,
}

impl Artifact for MepWitness {
    const KIND: &'static str = "mep_witness";
    type Repr = MepWitnessFile;
    fn to_repr(&self) -> Result<MepWitnessFile> {
        Ok(MepWitnessFile {
            group: self.ctx.clone(),
            p: self.p,
            m: self.pair.phi1.m(),
            radius: self.radius,
            phi1: PatternFile::new(&self.pair.phi1),
            phi2: PatternFile::new(&self.pair.phi2),
        })
    }
    fn from_repr(r: MepWitnessFile) -> Result<Self> {
        let phi1 = r.phi1.to_pattern(&r.group, r.p, r.m)?;
        let phi2 = r.phi2.to_pattern(&r.group, r.p, r.m)?;
        if phi1.window() != phi2.window() {
            return Err(Error::Decode("phi1 and phi2 must share a window".into()));
        }
        Ok(Self { ctx: r.group, p: r.p, radius: r.radius, pair: MepPair { phi1, phi2 } })
    }
}

#[derive(Serialize, Deserialize)]
pub struct OreSolutionFile {
    pub b: GRElemFile,
    pub t: GRElemFile,
    pub box_side: usize,
}

impl Artifact for OreSolution {
    const KIND: &'static str = "ore_solution";
    type Repr = OreSolutionFile;
    fn to_repr(&self) -> Result<OreSolutionFile> {
        Ok(OreSolutionFile { b: GRElemFile::from(&self.b), t: GRElemFile::from(&self.t), box_side: self.box_side })
    }
    fn from_repr(r: OreSolutionFile) -> Result<Self> {
        Ok(Self { b: r.b.to_elem()?, t: r.t.to_elem()?, box_side: r.box_side })
    }
}

/// Group-ring matrix rows as lists of entries, each entry a term list.
#[derive(Serialize, Deserialize)]
pub struct FailureWitnessFile {
    pub group: GroupCtx,
    pub p: u64,
    pub d: usize,
    pub matrix: Vec<Vec<Vec<(String, Vec<u64>)>>>,
    pub zero_rows: Vec<usize>,
    pub radius: usize,
    pub kernel: Option<(PatternFile, PatternFile)>,
}

/// Encode only: the matrix is rendered for reading, the witness is rebuilt
/// from its automaton rather than from the file.
impl Artifact for FailureWitness {
    const KIND: &'static str = "failure_witness";
    type Repr = FailureWitnessFile;
    fn to_repr(&self) -> Result<FailureWitnessFile> {
        let first = (self.matrix.rows() > 0 && self.matrix.cols() > 0)
            .then(|| self.matrix.get(0, 0))
            .ok_or_else(|| Error::Dimension("empty group-ring matrix".into()))?;
        let matrix = (0..self.matrix.rows())
            .map(|i| (0..self.matrix.cols()).map(|j| GRElemFile::from(self.matrix.get(i, j)).terms).collect())
            .collect();
        Ok(FailureWitnessFile {
            group: first.ctx().clone(),
            p: first.field().p(),
            d: first.field().degree(),
            matrix,
            zero_rows: self.zero_rows.clone(),
            radius: self.radius,
            kernel: self.kernel.as_ref().map(|k| (PatternFile::new(&k.phi1), PatternFile::new(&k.phi2))),
        })
    }
    fn from_repr(_: FailureWitnessFile) -> Result<Self> {
        Err(Error::Unsupported("failure witnesses are recomputed, not decoded".into()))
    }
}

/// Record of one CLI run: enough to rerun it and compare outputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub seed: Option<u64>,
    pub presets: Vec<String>,
    pub tool_version: String,
    /// Output path to SHA-256 of the file bytes.
    pub outputs: BTreeMap<String, String>,
    /// Phase name to milliseconds. Not part of the digest.
    pub wall_time_ms: BTreeMap<String, u64>,
}

#[derive(Serialize, Deserialize)]
pub struct RunManifestFile {
    pub command: Vec<String>,
    pub seed: Option<u64>,
    pub presets: Vec<String>,
    pub tool_version: String,
    pub outputs: BTreeMap<String, String>,
}

impl Artifact for RunManifest {
    const KIND: &'static str = "run_manifest";
    type Repr = RunManifestFile;
    fn to_repr(&self) -> Result<RunManifestFile> {
        Ok(RunManifestFile {
            command: self.command.clone(),
            seed: self.seed,
            presets: self.presets.clone(),
            tool_version: self.tool_version.clone(),
            outputs: self.outputs.clone(),
        })
    }
    fn from_repr(r: RunManifestFile) -> Result<Self> {
        Ok(Self {
            command: r.command,
            seed: r.seed,
            presets: r.presets,
            tool_version: r.tool_version,
            outputs: r.outputs,
            wall_time_ms: BTreeMap::new(),
        })
    }
}

/// Manifest text: the digested record plus the wall times under a separate
/// key that the digest skips.
pub fn encode_manifest(m: &RunManifest) -> Result<String> {
    let mut v = to_value(m)?;
    v.as_object_mut().expect("object").insert("wall_time_ms".into(), serde_json::to_value(&m.wall_time_ms)?);
    let mut s = canonical(&v);
    s.push('\n');
    Ok(s)
}

pub fn decode_manifest(text: &str) -> Result<RunManifest> {
    let mut v: Value = serde_json::from_str(text).map_err(|e| Error::Decode(format!("run_manifest: {e}")))?;
    let wall = v.as_object_mut().and_then(|m| m.remove("wall_time_ms"));
    let mut out: RunManifest = decode(&canonical(&v))?;
    if let Some(w) = wall {
        out.wall_time_ms = serde_json::from_value(w)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eden::{goe_unit_witness, mep_search};
    use crate::ff::ext::ExtField;
    use crate::lemma1::build;
    use crate::ore::failure_witness;
    use crate::rng::Stream;

    #[test]
    fn canonical_sorts_keys_at_every_level() {
        let v: Value = serde_json::from_str(r#"{"b":1,"a":{"z":[{"y":2,"x":3}],"c":null}}"#).unwrap();
        assert_eq!(canonical(&v), r#"{"a":{"c":null,"z":[{"x":3,"y":2}]},"b":1}"#);
    }

    #[test]
    fn muller_round_trip() {
        for p in [2, 3, 5] {
            let ca = LinearCA::muller(p).unwrap();
            let text = encode(&ca).unwrap();
            let back: LinearCA = decode(&text).unwrap();
            assert_eq!(back, ca);
            assert_eq!(encode(&back).unwrap(), text);
        }
    }

    #[test]
    fn tampered_digest_is_rejected() {
        let text = encode(&LinearCA::muller(2).unwrap()).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        let d = v[DIGEST_KEY].as_str().unwrap().to_string();
        let flipped = format!("{}{}", if d.starts_with('0') { '1' } else { '0' }, &d[1..]);
        let bad = text.replace(&d, &flipped);
        assert!(matches!(decode::<LinearCA>(&bad), Err(Error::Decode(_))));
        // Changing the payload without updating the digest is caught too.
        let bad = text.replace("\"m\":2", "\"m\":3");
        assert!(matches!(decode::<LinearCA>(&bad), Err(Error::Decode(_))));
    }

    #[test]
    fn wrong_kind_and_syntax_errors() {
        let text = encode(&LinearCA::muller(2).unwrap()).unwrap();
        assert!(decode::<CycleSystem>(&text).is_err());
        let err = decode::<LinearCA>("{\n  \"artifact\": \"ca\",\n  \"p\": }").unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn hand_written_file_without_digest_decodes() {
        let text = r#"{"artifact":"ca","group":{"family":"FreeAbelian","params":[1]},"p":2,"m":1,
            "memory":["[1]"],"alpha":[{"p":2,"rows":1,"cols":1,"triplets":[[0,0,1]]}],"provenance":null}"#;
        let ca: LinearCA = decode(text).unwrap();
        assert_eq!(ca, LinearCA::z_shift(2, 1).unwrap());
    }

    #[test]
    fn random_ca_and_config_round_trip() {
        let mut st = Stream::new("codec/test", 7, &[]);
        for ctx in [GroupCtx::w3(), GroupCtx::free_abelian(2).unwrap(), GroupCtx::free_group(2).unwrap()] {
            let field = PrimeField::new(5).unwrap();
            let ca = LinearCA::random(ctx.clone(), ctx.ball(1), field, 2, &mut st).unwrap();
            let back: LinearCA = decode(&encode(&ca).unwrap()).unwrap();
            assert_eq!(back, ca);
            let entries: Vec<_> = ctx.ball(2).iter().map(|g| (g.clone(), vec![st.below(5), st.below(5)])).collect();
            let config = ConfigArtifact { ctx: ctx.clone(), config: Config::from_entries(field, 2, entries).unwrap() };
            let back: ConfigArtifact = decode(&encode(&config).unwrap()).unwrap();
            assert_eq!(back, config);
        }
    }

    #[test]
    fn cycle_system_and_certificates_round_trip() {
        let sys = build(3).unwrap();
        let back: CycleSystem = decode(&encode(&sys).unwrap()).unwrap();
        assert_eq!(back, sys);

        let spec = crate::synth::SynthesisSpec {
            ctx: GroupCtx::w3(),
            s0: GroupCtx::w3().generators(),
            epsilon: crate::exact::int(2),
            c: crate::exact::int(2),
            p_ladder: vec![2, 3, 5, 7],
            max_prime: 97,
            seed: 1,
            mode: crate::synth::Mode::Certified,
            retries: 8,
        };
        let synth = crate::synth::synthesize(&spec).unwrap();
        let ca: LinearCA = decode(&encode(&synth.ca).unwrap()).unwrap();
        assert_eq!(ca, synth.ca);
        assert!(ca.provenance().is_some());
        let cert: InjCertificate = decode(&encode(&synth.certificate).unwrap()).unwrap();
        assert_eq!(cert, InjCertificate { wall_time_ms: 0, ..synth.certificate.clone() });
        assert!(!encode(&synth.certificate).unwrap().contains("wall_time"));

        let pre = crate::eden::preinj_certificate(&ca, &ElementSet::singleton(ca.ctx().identity())).unwrap().unwrap();
        let back: PreinjCertificate = decode(&encode(&pre).unwrap()).unwrap();
        assert_eq!(back, pre);
    }

    #[test]
    fn witnesses_and_group_ring_round_trip() {
        let ca = LinearCA::muller(3).unwrap();
        let goe = GoeWitness { ctx: ca.ctx().clone(), p: 3, pattern: goe_unit_witness(&ca).unwrap().unwrap() };
        assert_eq!(decode::<GoeWitness>(&encode(&goe).unwrap()).unwrap(), goe);
        let pair = mep_search(&ca, 2).unwrap().unwrap();
        let mep = MepWitness { ctx: ca.ctx().clone(), p: 3, radius: 2, pair };
        assert_eq!(decode::<MepWitness>(&encode(&mep).unwrap()).unwrap(), mep);

        let z2 = GroupCtx::free_abelian(2).unwrap();
        let f = ExtField::new(3, 2).unwrap();
        let e = crate::ore::parse_elem(&z2, &f, "1 + 2*u^2 - u^-1 v").unwrap();
        assert_eq!(decode::<GRElem>(&encode(&e).unwrap()).unwrap(), e);

        let w = failure_witness(&ca, 1).unwrap();
        let text = encode(&w).unwrap();
        assert!(text.contains("\"zero_rows\":[1]"));
        assert!(decode::<FailureWitness>(&text).is_err());
    }

    #[test]
    fn manifest_digest_ignores_wall_time() {
        let mut m = RunManifest {
            command: vec!["goe".into(), "lemma1".into(), "--n".into(), "3".into()],
            seed: Some(4),
            presets: vec!["tree5".into()],
            tool_version: "0.1.0".into(),
            outputs: BTreeMap::from([("ca.json".to_string(), "ab".to_string())]),
            wall_time_ms: BTreeMap::from([("total".to_string(), 12)]),
        };
        let a = encode_manifest(&m).unwrap();
        assert_eq!(decode_manifest(&a).unwrap(), m);
        m.wall_time_ms.insert("total".into(), 99);
        let b = encode_manifest(&m).unwrap();
        let da = serde_json::from_str::<Value>(&a).unwrap()[DIGEST_KEY].clone();
        let db = serde_json::from_str::<Value>(&b).unwrap()[DIGEST_KEY].clone();
        assert_eq!(da, db);
        assert_ne!(a, b);
    }
}
