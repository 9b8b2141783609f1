//! Batch front end: group-spec files in, JSON reports out.
//!
//! Exit codes: `certify` exits 0 on a free basis, 10 on a law certificate;
//! `growth` exits 0 on a complete census, 11 on a cap-truncated partial one;
//! `law check` exits 0 when the law holds on the ball, 12 on a
//! counterexample; every error path exits 1.  The `GROWTHCERTIFY_CAP`
//! environment variable overrides the element cap.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::certify::{
    law_certify_general_with, two_free_certify_with, CertifyError, CertifyOptions, SearchTrace,
    TraceStep, Verdict,
};
use crate::extension::{ExtError, ExtensionGroup, FreeAutomorphism, GeneratingSet};
use crate::growth::{
    enumerate_ball, subadditivity_check, GrowthError, Subadditivity, DEFAULT_ELEMENT_CAP,
};
use crate::laws::{check_law_on_ball, compose_laws, FreeRealization, GroupLaw, LawCheck, LawError};
use crate::stallings::{classify, StallingsError, SubgroupClass};
use crate::word::{Word, WordError};

pub const REPORT_SCHEMA: &str = "growthcertify-report/1";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    SpecJson {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{field}: {message}")]
    SpecField { field: String, message: String },
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Law(#[from] LawError),
    #[error(transparent)]
    Ext(#[from] ExtError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
    #[error(transparent)]
    Growth(#[from] GrowthError),
    #[error(transparent)]
    Stallings(#[from] StallingsError),
    #[error("report serialization: {0}")]
    Report(#[from] serde_json::Error),
}

// ---------------------------------------------------------------------------
// Group-spec file

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct AutomorphismSpec {
    pub images: Vec<String>,
    pub inverse_images: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    /// Kernel word in the compact text format; empty means identity.
    #[serde(default)]
    pub word: String,
    pub shift: Vec<i64>,
}

/// One group per file: the kernel rank, the acting automorphism tuple, and a
/// named generating set.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GroupSpecFile {
    pub kernel_rank: usize,
    pub automorphisms: Vec<AutomorphismSpec>,
    pub generators: Vec<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub laws: Vec<String>,
}

impl GroupSpecFile {
    pub fn load(path: &PathBuf) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.clone(), source })?;
        serde_json::from_str(&text)
            .map_err(|source| CliError::SpecJson { path: path.clone(), source })
    }

    /// Builds the verified internal model, addressing failures to the field
    /// that caused them.
    pub fn validate(&self) -> Result<(ExtensionGroup, GeneratingSet), CliError> {
        let rank = self.kernel_rank;
        let field_err = |field: String, message: String| CliError::SpecField { field, message };
        let parse_words = |field: &str, texts: &[String]| -> Result<Vec<Word>, CliError> {
            texts
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    Word::parse(s, rank)
                        .map_err(|e| field_err(format!("{field}[{i}]"), e.to_string()))
                })
                .collect()
        };
        let mut auts = Vec::new();
        for (i, a) in self.automorphisms.iter().enumerate() {
            let field = format!("automorphisms[{i}]");
            let images = parse_words(&format!("{field}.images"), &a.images)?;
            let inverse_images =
                parse_words(&format!("{field}.inverse_images"), &a.inverse_images)?;
            auts.push(
                FreeAutomorphism::new(images, inverse_images)
                    .map_err(|e| field_err(field, e.to_string()))?,
            );
        }
        let dim = auts.len();
        let group = ExtensionGroup::new(rank, auts)
            .map_err(|e| field_err("automorphisms".into(), e.to_string()))?;
        let mut items = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            let field = format!("generators[{i}]");
            let word = Word::parse(&g.word, rank)
                .map_err(|e| field_err(format!("{field}.word"), e.to_string()))?;
            if g.shift.len() != dim {
                return Err(field_err(
                    format!("{field}.shift"),
                    format!("length {} but the group has {} automorphisms", g.shift.len(), dim),
                ));
            }
            let elem = group
                .element(word, g.shift.clone())
                .map_err(|e| field_err(field.clone(), e.to_string()))?;
            items.push((g.name.clone(), elem));
        }
        let t = GeneratingSet::new(items)
            .map_err(|e| field_err("generators".into(), e.to_string()))?;
        Ok((group, t))
    }
}

// ---------------------------------------------------------------------------
// Report schema

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub schema: String,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_digest: Option<String>,
    pub wall_ms: u64,
    pub payload: Payload,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Verdict {
        #[serde(flatten)]
        verdict: VerdictDto,
        trace: Vec<String>,
    },
    Census {
        radius: usize,
        counts: Vec<u64>,
        upper_sequence: Vec<f64>,
        subadditive: bool,
        complete: bool,
    },
    Fold {
        class: String,
        rank: usize,
        basis: Vec<String>,
    },
    Law {
        result: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        counterexample: Option<Vec<String>>,
    },
}

/// Lossless serialized form of a [`Verdict`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum VerdictDto {
    FreeBasis {
        u_word: String,
        u_shift: Vec<i64>,
        v_word: String,
        v_shift: Vec<i64>,
        u_expr: String,
        v_expr: String,
        t_length_u: usize,
        t_length_v: usize,
        entropy_lower: f64,
    },
    LawCertificate {
        law: String,
        structure: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        normal_generator: Option<String>,
    },
}

impl VerdictDto {
    pub fn from_verdict(verdict: &Verdict, t: &GeneratingSet) -> Self {
        match verdict {
            Verdict::FreeBasis(c) => VerdictDto::FreeBasis {
                u_word: c.u.kernel_word().to_string(),
                u_shift: c.u.shift().to_vec(),
                v_word: c.v.kernel_word().to_string(),
                v_shift: c.v.shift().to_vec(),
                u_expr: c.u_expr.display(t).to_string(),
                v_expr: c.v_expr.display(t).to_string(),
                t_length_u: c.t_length_u,
                t_length_v: c.t_length_v,
                entropy_lower: c.entropy_lower,
            },
            Verdict::LawCertificate(c) => VerdictDto::LawCertificate {
                law: c.law.to_string(),
                structure: c.structure.tag().to_string(),
                normal_generator: c.normal_generator.as_ref().map(|w| w.to_string()),
            },
        }
    }
}

fn trace_summary(trace: &SearchTrace) -> Vec<String> {
    trace
        .steps
        .iter()
        .map(|s| match s {
            TraceStep::BuiltW { count, nontrivial } => {
                format!("built W: {count} elements, {nontrivial} nontrivial")
            }
            TraceStep::Classified { tag } => format!("classified W as {tag}"),
            TraceStep::ConjugateTested { generator, commutes } => {
                format!("conjugate by generator {generator}: commutes = {commutes}")
            }
            TraceStep::ChainLevel { k, tag } => format!("chain level {k}: {tag}"),
            TraceStep::Verified { kind } => format!("verified via {kind}"),
        })
        .collect()
}

fn digest_file(path: &PathBuf) -> Result<String, CliError> {
    let bytes =
        std::fs::read(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    let hash = Sha256::digest(&bytes);
    Ok(hash.iter().map(|b| format!("{b:02x}")).collect())
}

// ---------------------------------------------------------------------------
// Command line

#[derive(Debug, Parser)]
#[command(name = "growthcertify", version, about = "Free-basis / law dichotomy and exact growth for F_n ⋊ Z^d")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify a free basis (exit 0) or a law certificate (exit 10).
    Certify {
        spec: PathBuf,
        /// Law to certify against; defaults to the commutator law.
        #[arg(long)]
        law: Option<String>,
        /// Ball radius for law re-verification.
        #[arg(long, default_value_t = 3)]
        verify_radius: usize,
    },
    /// Enumerate the exact ball census (exit 0; 11 when the cap truncates).
    Growth {
        spec: PathBuf,
        #[arg(long)]
        radius: usize,
        /// Element cap; also settable via GROWTHCERTIFY_CAP.
        #[arg(long)]
        cap: Option<usize>,
        /// Emit CSV (n,B_n,ln(B_n)/n) instead of the JSON report.
        #[arg(long)]
        csv: bool,
    },
    /// Fold words into a core graph and classify the subgroup they generate.
    Fold {
        #[arg(long)]
        rank: usize,
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Operations on group laws.
    Law {
        #[command(subcommand)]
        action: LawAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum LawAction {
    /// Blockwise composition of two laws.
    Compose { outer: String, inner: String },
    /// Evaluate a law on free-group words.
    Eval {
        law: String,
        #[arg(long)]
        rank: usize,
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Check a law on the generator ball of a spec'd group (exit 0 holds,
    /// 12 counterexample).
    Check {
        law: String,
        spec: PathBuf,
        #[arg(long, default_value_t = 2)]
        radius: usize,
    },
}

fn element_cap(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("GROWTHCERTIFY_CAP").ok().and_then(|v| v.parse().ok())
    })
    .unwrap_or(DEFAULT_ELEMENT_CAP)
}

fn emit(report: &Report) -> Result<(), CliError> {
    println!("{}", serde_json::to_string_pretty(report)?);
    Ok(())
}

fn report(command: String, digest: Option<String>, started: Instant, payload: Payload) -> Report {
    Report {
        schema: REPORT_SCHEMA.to_string(),
        command,
        input_digest: digest,
        wall_ms: started.elapsed().as_millis() as u64,
        payload,
    }
}

/// Runs one parsed invocation; returns the process exit code.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    let started = Instant::now();
    match cli.command {
        Command::Certify { spec, law, verify_radius } => {
            let digest = digest_file(&spec)?;
            let (group, t) = GroupSpecFile::load(&spec)?.validate()?;
            let opts = CertifyOptions { verify_radius, ..CertifyOptions::default() };
            let (verdict, trace) = match law {
                None => two_free_certify_with(&group, &t, &opts)?,
                Some(text) => {
                    let law = GroupLaw::parse(&text, 1)?;
                    law_certify_general_with(&group, &t, &law, &opts)?
                }
            };
            let code = match &verdict {
                Verdict::FreeBasis(_) => 0,
                Verdict::LawCertificate(_) => 10,
            };
            let payload = Payload::Verdict {
                verdict: VerdictDto::from_verdict(&verdict, &t),
                trace: trace_summary(&trace),
            };
            emit(&report(format!("certify {}", spec.display()), Some(digest), started, payload))?;
            Ok(code)
        }
        Command::Growth { spec, radius, cap, csv } => {
            let digest = digest_file(&spec)?;
            let (group, t) = GroupSpecFile::load(&spec)?.validate()?;
            let cap = element_cap(cap);
            let (census, complete) = match enumerate_ball(&group, &t, radius, cap) {
                Ok(c) => (c, true),
                Err(GrowthError::ElementCapExceeded { partial, .. }) => (partial, false),
                Err(e) => return Err(e.into()),
            };
            if csv {
                print!("{}", census.csv());
            } else {
                let payload = Payload::Census {
                    radius: census.radius,
                    counts: census.counts.clone(),
                    upper_sequence: census.upper_sequence(),
                    subadditive: subadditivity_check(&census) == Subadditivity::Holds,
                    complete,
                };
                emit(&report(
                    format!("growth {} --radius {radius}", spec.display()),
                    Some(digest),
                    started,
                    payload,
                ))?;
            }
            Ok(if complete { 0 } else { 11 })
        }
        Command::Fold { rank, words } => {
            let parsed: Result<Vec<Word>, _> =
                words.iter().map(|s| Word::parse(s, rank)).collect();
            let class = classify(rank, &parsed?)?;
            let payload = match &class {
                SubgroupClass::Trivial => {
                    Payload::Fold { class: class.tag().into(), rank: 0, basis: vec![] }
                }
                SubgroupClass::InfiniteCyclic(w) => Payload::Fold {
                    class: class.tag().into(),
                    rank: 1,
                    basis: vec![w.to_string()],
                },
                SubgroupClass::NonAbelianFree { rank: r, basis } => Payload::Fold {
                    class: class.tag().into(),
                    rank: *r,
                    basis: basis.iter().map(|w| w.to_string()).collect(),
                },
            };
            emit(&report(format!("fold --rank {rank}"), None, started, payload))?;
            Ok(0)
        }
        Command::Law { action } => match action {
            LawAction::Compose { outer, inner } => {
                let composed =
                    compose_laws(&GroupLaw::parse(&outer, 1)?, &GroupLaw::parse(&inner, 1)?)?;
                let payload =
                    Payload::Law { result: composed.to_string(), counterexample: None };
                emit(&report("law compose".into(), None, started, payload))?;
                Ok(0)
            }
            LawAction::Eval { law, rank, words } => {
                let law = GroupLaw::parse(&law, 1)?;
                let tuple: Result<Vec<Word>, _> =
                    words.iter().map(|s| Word::parse(s, rank)).collect();
                let value = law.eval(&tuple?, &FreeRealization { rank })?;
                let payload = Payload::Law { result: value.to_string(), counterexample: None };
                emit(&report("law eval".into(), None, started, payload))?;
                Ok(0)
            }
            LawAction::Check { law, spec, radius } => {
                let digest = digest_file(&spec)?;
                let (group, t) = GroupSpecFile::load(&spec)?.validate()?;
                let law = GroupLaw::parse(&law, 1)?;
                let r = crate::extension::ExtRealization { group: &group };
                let check =
                    check_law_on_ball(&r, &t.elements(), &law, radius, element_cap(None))?;
                let (code, payload) = match check {
                    LawCheck::Holds => {
                        (0, Payload::Law { result: "holds".into(), counterexample: None })
                    }
                    LawCheck::Counterexample(tuple) => (
                        12,
                        Payload::Law {
                            result: "counterexample".into(),
                            counterexample: Some(
                                tuple.iter().map(|e| e.to_string()).collect(),
                            ),
                        },
                    ),
                };
                emit(&report("law check".into(), Some(digest), started, payload))?;
                Ok(code)
            }
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::LawStructure;

    fn fib_spec_json() -> &'static str {
        r#"{
            "kernel_rank": 2,
            "automorphisms": [
                {"images": ["b", "ab"], "inverse_images": ["bA", "a"]}
            ],
            "generators": [
                {"name": "t", "word": "", "shift": [1]},
                {"name": "x", "word": "a", "shift": [0]}
            ]
        }"#
    }

    #[test]
    fn spec_round_trips_through_serialization() {
        let spec: GroupSpecFile = serde_json::from_str(fib_spec_json()).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        let again: GroupSpecFile = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, again);
        let (g1, t1) = spec.validate().unwrap();
        let (g2, t2) = again.validate().unwrap();
        assert_eq!(g1, g2);
        assert_eq!(t1, t2);
    }

    #[test]
    fn validation_addresses_the_offending_field() {
        let mut spec: GroupSpecFile = serde_json::from_str(fib_spec_json()).unwrap();
        spec.generators[1].word = "q9".into();
        match spec.validate() {
            Err(CliError::SpecField { field, .. }) => {
                assert_eq!(field, "generators[1].word");
            }
            other => panic!("expected field diagnostic, got {other:?}"),
        }
        let mut spec: GroupSpecFile = serde_json::from_str(fib_spec_json()).unwrap();
        spec.generators[0].shift = vec![1, 0];
        assert!(matches!(
            spec.validate(),
            Err(CliError::SpecField { field, .. }) if field == "generators[0].shift"
        ));
        let mut spec: GroupSpecFile = serde_json::from_str(fib_spec_json()).unwrap();
        spec.automorphisms[0].inverse_images[0] = "Ba".into();
        assert!(matches!(
            spec.validate(),
            Err(CliError::SpecField { field, .. }) if field == "automorphisms[0]"
        ));
    }

    #[test]
    fn verdict_dto_round_trips_as_json() {
        let spec: GroupSpecFile = serde_json::from_str(fib_spec_json()).unwrap();
        let (group, t) = spec.validate().unwrap();
        let (verdict, _) = crate::certify::two_free_certify(&group, &t).unwrap();
        let dto = VerdictDto::from_verdict(&verdict, &t);
        let text = serde_json::to_string(&dto).unwrap();
        let again: VerdictDto = serde_json::from_str(&text).unwrap();
        assert_eq!(dto, again);
        match again {
            VerdictDto::FreeBasis { u_word, t_length_v, entropy_lower, .. } => {
                assert_eq!(u_word, "bA");
                assert_eq!(t_length_v, 6);
                assert!(entropy_lower >= 0.1831);
            }
            other => panic!("expected free basis, got {other:?}"),
        }
    }

    #[test]
    fn law_structure_tags_cover_all_variants() {
        for s in [
            LawStructure::Abelian,
            LawStructure::CyclicByAbelian,
            LawStructure::MetabelianNormalClosure,
        ] {
            assert!(!s.tag().is_empty());
        }
    }
}
