use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use caromlab::deoraclizer::{Budget, StopRule};
use caromlab::SchemeSpec;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    CaptureBound,
    CorrectnessChain,
    CounterNecessity,
    GentleBound,
    ReusabilityDecay,
    PiracyLift,
    ClassicalCkp15,
    Learnability,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::CaptureBound,
        Experiment::CorrectnessChain,
        Experiment::CounterNecessity,
        Experiment::GentleBound,
        Experiment::ReusabilityDecay,
        Experiment::PiracyLift,
        Experiment::ClassicalCkp15,
        Experiment::Learnability,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::CaptureBound => "capture_bound",
            Experiment::CorrectnessChain => "correctness_chain",
            Experiment::CounterNecessity => "counter_necessity",
            Experiment::GentleBound => "gentle_bound",
            Experiment::ReusabilityDecay => "reusability_decay",
            Experiment::PiracyLift => "piracy_lift",
            Experiment::ClassicalCkp15 => "classical_ckp15",
            Experiment::Learnability => "learnability",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Experiment::CaptureBound => "capture failure rate of the compiler against eps/2",
            Experiment::CorrectnessChain => "mean-correctness of the base and compiled scheme",
            Experiment::CounterNecessity => "fixed versus uniform number of test executions on the counter scheme",
            Experiment::GentleBound => "gentle-measurement recovery distance against sqrt(eps)",
            Experiment::ReusabilityDecay => "tomographic key-state distance after k evaluations against k sqrt(eps)",
            Experiment::PiracyLift => "plain pirate on the compiled scheme versus its lift on the base scheme",
            Experiment::ClassicalCkp15 => "capture bound and test budget of T = 2M/eps versus T = 2MN/eps",
            Experiment::Learnability => "learner success on point functions",
        }
    }

    fn needs_scheme(self) -> bool {
        !matches!(self, Experiment::GentleBound | Experiment::Learnability)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PirateKind {
    Clone,
    Solo,
    MeasureClone,
    HalfSplit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    Exhaustive,
    Budget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scheme: Option<SchemeSpec>,
    pub epsilon: f64,
    pub trials: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,

    /// Compiler budget rule for capture_bound and correctness_chain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<Budget>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<StopRule>,
    /// Register sizes for gentle_bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qubits: Option<Vec<usize>>,
    /// Longest chain for reusability_decay.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pirate: Option<PirateKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learner: Option<LearnerKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_bits: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query_budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
}

impl RunConfig {
    /// Parse a config document, applying `key=value` overrides first. Keys
    /// may be dotted (`scheme.points=12`); values are read as JSON and fall
    /// back to plain strings.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc: Value = serde_json::from_str(text).context("config is not valid JSON")?;
        for o in overrides {
            let (key, raw) = o
                .split_once('=')
                .with_context(|| format!("override {o:?} is not of the form key=value"))?;
            let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            set_path(&mut doc, key, value)?;
        }
        let config: RunConfig = serde_json::from_value(doc).context("invalid config")?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            bail!("invalid config: field `epsilon` must lie in (0, 1], got {}", self.epsilon);
        }
        if self.trials == 0 {
            bail!("invalid config: field `trials` must be at least 1");
        }
        match &self.scheme {
            None if self.experiment.needs_scheme() => {
                bail!("invalid config: field `scheme` is required by {}", self.experiment.name())
            }
            Some(s) => s
                .validate()
                .map_err(|e| anyhow::anyhow!("invalid config: field `scheme`: {e}"))?,
            None => {}
        }
        let scheme_name = self.scheme.as_ref().map(|s| s.params().name);
        match self.experiment {
            Experiment::CounterNecessity if scheme_name.as_deref() != Some("counter") => {
                bail!("invalid config: field `scheme` must name the counter scheme for counter_necessity")
            }
            Experiment::ReusabilityDecay if scheme_name.as_deref() != Some("conjugate") => {
                bail!("invalid config: field `scheme` must name the conjugate scheme for reusability_decay")
            }
            Experiment::ClassicalCkp15 if scheme_name.as_deref() == Some("conjugate") => {
                bail!("invalid config: field `scheme` must be classical for classical_ckp15")
            }
            Experiment::ReusabilityDecay if self.epsilon >= 0.5 => {
                bail!("invalid config: field `epsilon` is the disturbance here and must be below 0.5")
            }
            _ => {}
        }
        if let Some(q) = &self.qubits {
            if q.is_empty() || q.iter().any(|n| *n == 0 || *n > caromlab::qsim::MAX_MIXED_QUBITS) {
                bail!("invalid config: field `qubits` entries must lie in 1..={}", caromlab::qsim::MAX_MIXED_QUBITS);
            }
        }
        if let Some(nu) = self.nu {
            if !(nu > 0.0 && nu <= 1.0) {
                bail!("invalid config: field `nu` must lie in (0, 1], got {nu}");
            }
        }
        if let Some(b) = self.domain_bits {
            if b == 0 || b > caromlab::harness::MAX_DOMAIN_BITS {
                bail!("invalid config: field `domain_bits` must lie in 1..={}", caromlab::harness::MAX_DOMAIN_BITS);
            }
        }
        if self.max_k == Some(0) {
            bail!("invalid config: field `max_k` must be at least 1");
        }
        Ok(())
    }

    /// Git-style blob hash of the config without its output location.
    pub fn content_hash(&self) -> String {
        let mut c = self.clone();
        c.output_path = None;
        blob_hash(&serde_json::to_string(&c).expect("config serializes"))
    }
}

/// SHA-256 of `"blob <len>\0" ‖ body`.
pub fn blob_hash(body: &str) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", body.len()).as_bytes());
    h.update(body.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn set_path(doc: &mut Value, key: &str, value: Value) -> Result<()> {
    let mut node = doc;
    let mut parts = key.split('.').peekable();
    while let Some(part) = parts.next() {
        let map = node
            .as_object_mut()
            .with_context(|| format!("override {key:?}: `{part}` is not inside an object"))?;
        if parts.peek().is_none() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        node = map.entry(part).or_insert_with(|| Value::Object(Default::default()));
    }
    bail!("empty override key")
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{"experiment":"capture_bound","scheme":{"name":"counter"},"epsilon":0.1,"trials":10,"seed":7}"#;

    #[test]
    fn overrides_reach_nested_fields() {
        let c = RunConfig::parse(BASE, &["scheme.points=12".into(), "trials=20".into()]).unwrap();
        assert_eq!(c.trials, 20);
        assert_eq!(c.scheme.unwrap().params().cp_queries, 12);
    }

    #[test]
    fn string_overrides_fall_back_to_strings() {
        let c = RunConfig::parse(BASE, &["experiment=counter_necessity".into()]).unwrap();
        assert_eq!(c.experiment, Experiment::CounterNecessity);
    }

    #[test]
    fn validation_names_the_field() {
        let e = RunConfig::parse(BASE, &["epsilon=0".into()]).unwrap_err();
        assert!(format!("{e:#}").contains("epsilon"));
        let e = RunConfig::parse(BASE, &["trials=0".into()]).unwrap_err();
        assert!(format!("{e:#}").contains("trials"));
        let e = RunConfig::parse(BASE, &["bogus=1".into()]).unwrap_err();
        assert!(format!("{e:#}").contains("bogus"));
    }

    #[test]
    fn blob_hash_reference_value() {
        // sha256(b"blob 5\0hello") from an independent implementation
        assert_eq!(blob_hash("hello"), "8aec4e4876f854f688d0ebfc8f37598f38e5fd6903cccc850ca36591175aeb60");
    }

    #[test]
    fn hash_ignores_output_path() {
        let a = RunConfig::parse(BASE, &[]).unwrap();
        let b = RunConfig::parse(BASE, &["output_path=elsewhere".into()]).unwrap();
        assert_eq!(a.content_hash(), b.content_hash());
        assert_eq!(a.content_hash().len(), 64);
        let c = RunConfig::parse(BASE, &["seed=8".into()]).unwrap();
        assert_ne!(a.content_hash(), c.content_hash());
    }
}
