//! TOML scenario files.
//!
//! ```toml
//! name = "demo"
//! output = "out/demo"
//! gate = "global"
//!
//! [params]
//! s = "4/3"
//! p = "5/2"
//! q = "3"
//! r = 3
//!
//! [solver]
//! n = 32
//! dt = 1e-3
//!
//! [initial]
//! kind = "random"
//! gamma = 2.5
//! seed = 7
//!
//! [forcing]
//! kind = "modes"
//! modes = [{ k = [1, 1], law = "constant", value = [0.1, 0.0] }]
//! ```
//!
//! Gate parameters are exact: quoted fractions or bare integers. Floats are
//! rejected so that a rounded value can never move a parameter across an
//! admissibility boundary.

use std::fmt;
use std::path::{Path, PathBuf};

use ns_besov_core::admissibility::{self, AdmissibilityReport, Gate};
use ns_besov_core::besov::BesovParams;
use ns_besov_core::field::{ModeIndex, RandomFieldSpec};
use ns_besov_core::solver::SolverConfig;
use ns_besov_core::stokes::{ForcingSpec, TimeLaw};
use ns_besov_core::{rational, Rational, SpectralField};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use crate::snapshot;
use crate::CliError;

/// An exact rational read from `"a/b"`, `"a"` or an integer literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exact(pub Rational);

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&rational::format(&self.0))
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Exact;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an exact rational such as \"5/2\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Exact, E> {
                rational::parse(v).map(Exact).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Exact, E> {
                Ok(Exact(rational::int(v as i128)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Exact, E> {
                Ok(Exact(rational::int(v as i128)))
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Exact, E> {
                Err(E::custom(format!(
                    "float {v} is not accepted for an exact parameter; write it as a quoted fraction"
                )))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamSpec {
    pub s: Exact,
    pub p: Exact,
    /// Defaults to `max(r, 2) + 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Exact>,
    pub r: Exact,
}

impl ParamSpec {
    pub fn resolve(&self) -> Result<BesovParams, CliError> {
        let q = self
            .q
            .map(|q| q.0)
            .unwrap_or_else(|| admissibility::default_q(self.r.0));
        Ok(BesovParams::new(self.s.0, self.p.0, q, self.r.0)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateChoice {
    #[default]
    Local,
    Global,
}

impl From<GateChoice> for Gate {
    fn from(g: GateChoice) -> Self {
        match g {
            GateChoice::Local => Gate::Local,
            GateChoice::Global => Gate::Global,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub k: [i64; 2],
    pub value: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpec {
    pub gamma: f64,
    pub seed: u64,
    #[serde(default = "one")]
    pub amplitude: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<i64>,
}

impl RandomSpec {
    fn spec(&self) -> RandomFieldSpec {
        let mut s = RandomFieldSpec::new(self.gamma, self.seed).amplitude(self.amplitude);
        s.cutoff = self.cutoff;
        s
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    #[default]
    Zero,
    Random(RandomSpec),
    Modes {
        modes: Vec<ModeEntry>,
    },
    Snapshot {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForcingEntry {
    pub k: [i64; 2],
    #[serde(flatten)]
    pub law: TimeLaw,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForcingSection {
    #[default]
    Zero,
    /// Constant-in-time random forcing.
    Random(RandomSpec),
    Modes {
        modes: Vec<ForcingEntry>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormSpec {
    pub s: Exact,
    pub p: Exact,
    pub q: Exact,
}

impl NormSpec {
    pub fn label(&self) -> String {
        format!(
            "besov(s={};p={};q={})",
            rational::format(&self.s.0),
            rational::format(&self.p.0),
            rational::format(&self.q.0)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportSpec {
    /// Times at which `solve` writes binary snapshots; matched to the
    /// nearest sample.
    pub snapshot_times: Vec<f64>,
    /// Extra Besov norms recorded along trajectories.
    pub besov: Vec<NormSpec>,
    /// Threshold of the data splitting.
    pub eps_split: f64,
    /// Size of the perturbation `δ₀` in the uniqueness probe.
    pub delta_amplitude: f64,
    pub delta_seed: u64,
    /// Replace the configured constants by a probe estimate before solving.
    pub estimate_constants: bool,
    /// Trajectory CSVs keep every `record_every`-th step.
    pub record_every: usize,
}

impl Default for ReportSpec {
    fn default() -> Self {
        Self {
            snapshot_times: Vec::new(),
            besov: Vec::new(),
            eps_split: 1e-3,
            delta_amplitude: 1e-3,
            delta_seed: 1,
            estimate_constants: false,
            record_every: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSection {
    pub count: usize,
    pub seed: u64,
    /// Spectral decay of the members; `None` selects the critical value
    /// for the initial regularity of the parameters.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Resolutions to run; empty means the solver resolution only.
    pub resolutions: Vec<usize>,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        Self {
            count: 64,
            seed: 0,
            gamma: None,
            resolutions: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default)]
    pub gate: GateChoice,
    pub params: ParamSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub initial: InitialSpec,
    #[serde(default)]
    pub forcing: ForcingSection,
    #[serde(default)]
    pub report: ReportSpec,
    #[serde(default)]
    pub ensemble: EnsembleSection,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let sc: Scenario = toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Canonical text form; [`Scenario::parse`] inverts it exactly.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario is representable in TOML")
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params.resolve()?;
        self.solver.validate()?;
        let field = |msg: String| Err(CliError::Parse(msg));
        if self.name.trim().is_empty() {
            return field("name: must not be empty".into());
        }
        if !(self.report.eps_split > 0.0) {
            return field("report.eps_split: must be positive".into());
        }
        if self
            .report
            .snapshot_times
            .iter()
            .any(|t| !(*t >= 0.0 && *t <= self.solver.horizon))
        {
            return field("report.snapshot_times: must lie in [0, solver.horizon]".into());
        }
        if self.report.record_every == 0 {
            return field("report.record_every: must be positive".into());
        }
        if self.ensemble.count == 0 {
            return field("ensemble.count: must be positive".into());
        }
        Ok(())
    }

    pub fn params(&self) -> BesovParams {
        self.params.resolve().expect("validated on parse")
    }

    pub fn gate_report(&self) -> AdmissibilityReport {
        admissibility::check(&self.params(), self.gate.into())
    }

    pub fn initial_field(&self, base: &Path) -> Result<SpectralField, CliError> {
        let n = self.solver.n;
        Ok(match &self.initial {
            InitialSpec::Zero => SpectralField::zeros(n)?,
            InitialSpec::Random(r) => r.spec().sample(n)?,
            InitialSpec::Modes { modes } => SpectralField::from_modes(
                n,
                &modes
                    .iter()
                    .map(|m| {
                        (
                            ModeIndex::new(m.k[0], m.k[1]),
                            ns_besov_core::Complex64::new(m.value[0], m.value[1]),
                        )
                    })
                    .collect::<Vec<_>>(),
            )?,
            InitialSpec::Snapshot { path } => {
                let snap = snapshot::load(&base.join(path))?;
                snap.field.with_resolution(n)?
            }
        })
    }

    pub fn forcing_spec(&self) -> Result<ForcingSpec, CliError> {
        let n = self.solver.n;
        let f = match &self.forcing {
            ForcingSection::Zero => ForcingSpec::zero(),
            ForcingSection::Random(r) => ForcingSpec::random(n, &r.spec())?,
            ForcingSection::Modes { modes } => ForcingSpec::new(
                modes
                    .iter()
                    .map(|m| (ModeIndex::new(m.k[0], m.k[1]), m.law.clone()))
                    .collect(),
            )?,
        };
        f.check_resolution(n)?;
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "t"
[params]
s = "4/3"
p = "5/2"
r = 3
"#;

    #[test]
    fn minimal_scenario_defaults() {
        let sc = Scenario::parse(MINIMAL).unwrap();
        assert_eq!(sc.params().q, rational::int(4));
        assert_eq!(sc.solver, SolverConfig::default());
        assert_eq!(sc.initial, InitialSpec::Zero);
    }

    #[test]
    fn floats_rejected_for_gate_params() {
        let text = MINIMAL.replace("r = 3", "r = 3.0");
        let err = Scenario::parse(&text).unwrap_err().to_string();
        assert!(err.contains("float"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn decimal_strings_rejected() {
        let text = MINIMAL.replace("\"5/2\"", "\"2.5\"");
        assert!(Scenario::parse(&text).is_err());
    }

    #[test]
    fn unknown_field_rejected() {
        let text = format!("{MINIMAL}\n[report]\nbogus = 1\n");
        assert!(Scenario::parse(&text).is_err());
    }

    #[test]
    fn forcing_modes_parse() {
        let text = format!(
            "{MINIMAL}\n[forcing]\nkind = \"modes\"\nmodes = [{{ k = [1, 1], law = \"constant\", value = [0.5, 0.0] }}, {{ k = [0, 2], law = \"sinusoid\", amplitude = [1.0, 0.0], omega = 3.0, phase = 0.0 }}]\n"
        );
        let sc = Scenario::parse(&text).unwrap();
        assert_eq!(sc.forcing_spec().unwrap().modes().len(), 2);
        assert_eq!(Scenario::parse(&sc.to_toml()).unwrap(), sc);
    }
}
