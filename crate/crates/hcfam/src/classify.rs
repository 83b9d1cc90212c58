//! Classification of generically irreducible module families in the
//! varying-degree classes `I(k)`, `II(k)`, `III` and `IV`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::{parity, GaussianRational};
use crate::hcmod::{
    iso_check, validate, CasimirTriple, DegreeProfile, HCModuleFamily, IsoVerdict, Obstruction, TailRule,
    TransitionData, WeightSet,
};

pub type CasimirSpec = CasimirTriple;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("class {0} is incompatible with weights {1}")]
    IncompatibleClass(ClassSpec, WeightSet),
    #[error("inadmissible Casimir: {0}")]
    InadmissibleCasimir(String),
}

/// Degree-profile regimes. `EqualDegrees` is not a classification class; it
/// exists so that the equal-degree phenomenon can be built and probed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassSpec {
    /// Degrees peak at `k`.
    I(i64),
    /// Degrees bottom out at `k`.
    II(i64),
    /// Degrees increase by one at every step.
    III,
    /// Degrees decrease by one at every step.
    IV,
    EqualDegrees,
}

impl fmt::Display for ClassSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassSpec::I(k) => write!(f, "I({k})"),
            ClassSpec::II(k) => write!(f, "II({k})"),
            ClassSpec::III => write!(f, "III"),
            ClassSpec::IV => write!(f, "IV"),
            ClassSpec::EqualDegrees => write!(f, "equal"),
        }
    }
}

/// Accepts `I(k)`, `I:k`, `II(k)`, `II:k`, `III`, `IV`, `equal`.
impl FromStr for ClassSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        match s {
            "III" => return Ok(ClassSpec::III),
            "IV" => return Ok(ClassSpec::IV),
            "equal" => return Ok(ClassSpec::EqualDegrees),
            _ => {}
        }
        let (head, k) = s
            .split_once('(')
            .map(|(h, r)| (h, r.trim_end_matches(')')))
            .or_else(|| s.split_once(':'))
            .ok_or_else(|| format!("unknown class {s:?}"))?;
        let k: i64 = k.trim().parse().map_err(|_| format!("bad index in {s:?}"))?;
        match head {
            "I" => Ok(ClassSpec::I(k)),
            "II" => Ok(ClassSpec::II(k)),
            _ => Err(format!("unknown class {s:?}")),
        }
    }
}

impl Serialize for ClassSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ClassSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

impl ClassSpec {
    pub fn has_varying_degrees(&self) -> bool {
        !matches!(self, ClassSpec::EqualDegrees)
    }

    /// Normalized profile: `0` at the peak/valley for `I`/`II`,
    /// `floor(n/2)` for `III`, `-floor(n/2)` for `IV`.
    fn degrees(&self, w: WeightSet) -> DegreeProfile {
        let base = w.parity();
        match *self {
            ClassSpec::I(k) => DegreeProfile::linear(k, 0, -1, 1),
            ClassSpec::II(k) => DegreeProfile::linear(k, 0, 1, -1),
            ClassSpec::III => DegreeProfile::linear(base, 0, 1, 1),
            ClassSpec::IV => DegreeProfile::linear(base, 0, -1, -1),
            ClassSpec::EqualDegrees => DegreeProfile::constant(0),
        }
    }

    /// Which side of each transition carries the unit: where degrees fall
    /// `A_n` is constant, where they rise `B_n` is.
    fn transitions(&self, asc: GaussianRational, desc: GaussianRational) -> TransitionData {
        let (split, upper, lower) = match *self {
            ClassSpec::I(k) => (k, TailRule::AscUnit(asc), TailRule::DescUnit(desc)),
            ClassSpec::II(k) => (k, TailRule::DescUnit(desc), TailRule::AscUnit(asc)),
            ClassSpec::III | ClassSpec::EqualDegrees => (0, TailRule::DescUnit(desc.clone()), TailRule::DescUnit(desc)),
            ClassSpec::IV => (0, TailRule::AscUnit(asc.clone()), TailRule::AscUnit(asc)),
        };
        TransitionData { overrides: Default::default(), split, upper, lower }
    }
}

/// Reason a Casimir triple cannot occur for a weight type, if any.
pub fn admissible_casimir(w: WeightSet, c: &CasimirSpec) -> Result<(), String> {
    w.check()?;
    if let Some(forced) = w.forced_casimir() {
        let forced_c = CasimirTriple::constant(forced.into());
        if *c != forced_c {
            return Err(format!("weights {w} force the constant Casimir {forced}, got ({c})"));
        }
        return Ok(());
    }
    if c.as_constant().is_some() {
        if let Some(m) = c.exceptional_indices().into_iter().find(|&m| parity(m) == w.parity()) {
            return Err(format!("{} = m(m+2) with m = {m} of the weights' parity", c.c0));
        }
    }
    Ok(())
}

/// Constructs a module of the given class with all units equal to one.
pub fn construct(w: WeightSet, cls: ClassSpec, c: &CasimirSpec) -> Result<HCModuleFamily, ClassifyError> {
    build(w, cls, c, GaussianRational::from_int(1), GaussianRational::from_int(1))
}

fn build(w: WeightSet, cls: ClassSpec, c: &CasimirSpec, asc: GaussianRational, desc: GaussianRational) -> Result<HCModuleFamily, ClassifyError> {
    admissible_casimir(w, c).map_err(ClassifyError::InadmissibleCasimir)?;
    if let ClassSpec::I(k) | ClassSpec::II(k) = cls {
        if !w.contains(k) {
            return Err(ClassifyError::IncompatibleClass(cls, w));
        }
    }
    let m = HCModuleFamily::new(w, cls.degrees(w), cls.transitions(asc, desc), c.clone());
    if !validate(&m).passed() {
        return Err(ClassifyError::IncompatibleClass(cls, w));
    }
    Ok(m)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CasimirModuli {
    /// The Casimir is forced by an extreme weight.
    Forced { value: GaussianRational },
    /// Every triple in `Q(i)^3` outside the excluded constants.
    Triples,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExcludedSet {
    pub rule: String,
    pub parity: String,
    /// `m(m+2)` for `|m| <= 10` of the right parity.
    pub sample: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub weights: WeightSet,
    pub class: ClassSpec,
    pub casimir_moduli: CasimirModuli,
    pub excluded: Option<ExcludedSet>,
    /// Whether (weights, degrees, Casimir) determine the module up to
    /// isomorphism and twists.
    pub unique: bool,
    /// Present when the Casimir is forced.
    pub canonical_module: Option<HCModuleFamily>,
}

pub fn classification_report(w: WeightSet, cls: ClassSpec) -> Result<ClassificationReport, ClassifyError> {
    let unique = cls.has_varying_degrees();
    if let Some(forced) = w.forced_casimir() {
        let c = CasimirTriple::constant(forced.into());
        let m = construct(w, cls, &c)?;
        return Ok(ClassificationReport {
            weights: w,
            class: cls,
            casimir_moduli: CasimirModuli::Forced { value: forced.into() },
            excluded: None,
            unique,
            canonical_module: Some(m),
        });
    }
    if let ClassSpec::I(k) | ClassSpec::II(k) = cls {
        if !w.contains(k) {
            return Err(ClassifyError::IncompatibleClass(cls, w));
        }
    }
    let mut sample: Vec<i64> = (-10i64..=10).filter(|&m| parity(m) == w.parity()).map(|m| m * (m + 2)).collect();
    sample.sort();
    sample.dedup();
    Ok(ClassificationReport {
        weights: w,
        class: cls,
        casimir_moduli: CasimirModuli::Triples,
        excluded: Some(ExcludedSet {
            rule: "m(m+2)".into(),
            parity: if w.parity() == 0 { "even" } else { "odd" }.into(),
            sample,
        }),
        unique,
        canonical_module: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ProbeReport {
    Pass { seed: u64, trials: usize },
    Counterexample { seed: u64, trial: usize, module: Box<HCModuleFamily>, obstruction: Obstruction },
    /// Outside classes I-IV the invariants do not determine the module.
    Inapplicable { reason: String },
}

fn random_unit(rng: &mut ChaCha8Rng) -> GaussianRational {
    loop {
        let re = (rng.gen_range(-9i64..=9), rng.gen_range(1i64..=9));
        let im = (rng.gen_range(-3i64..=3), rng.gen_range(1i64..=5));
        if re.0 != 0 || im.0 != 0 {
            return GaussianRational::complex(re, im);
        }
    }
}

/// A module of the class with random units on the tails and independently
/// random units on every transition in the key window.
fn randomized(w: WeightSet, cls: ClassSpec, c: &CasimirSpec, rng: &mut ChaCha8Rng) -> Result<HCModuleFamily, ClassifyError> {
    let mut m = build(w, cls, c, random_unit(rng), random_unit(rng))?;
    let (lo, hi) = m.key_window();
    for n in w.transitions_in(lo, hi) {
        let rule = match m.tail_rule(n) {
            TailRule::AscUnit(_) => TailRule::AscUnit(random_unit(rng)),
            TailRule::DescUnit(_) => TailRule::DescUnit(random_unit(rng)),
        };
        m.transitions.overrides.insert(n, rule.apply(&m.q(n)));
    }
    Ok(m)
}

/// Builds `trials` randomized modules and checks each is isomorphic to the
/// canonical construction. Trial `i` draws from stream `i` of the seed.
pub fn uniqueness_probe(w: WeightSet, cls: ClassSpec, c: &CasimirSpec, trials: usize, seed: u64) -> Result<ProbeReport, ClassifyError> {
    if !cls.has_varying_degrees() {
        return Ok(ProbeReport::Inapplicable {
            reason: "equal degrees: weights, degrees and Casimir do not determine the module".into(),
        });
    }
    let canonical = construct(w, cls, c)?;
    let results: Vec<Result<Option<(HCModuleFamily, Obstruction)>, ClassifyError>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let m = randomized(w, cls, c, &mut rng)?;
            match iso_check(&canonical, &m).expect("both modules validated") {
                IsoVerdict::Isomorphic(_) => Ok(None),
                IsoVerdict::NotIsomorphic(o) => Ok(Some((m, o))),
            }
        })
        .collect();
    for (trial, r) in results.into_iter().enumerate() {
        if let Some((m, obstruction)) = r? {
            return Ok(ProbeReport::Counterexample { seed, trial, module: Box::new(m), obstruction });
        }
    }
    Ok(ProbeReport::Pass { seed, trials })
}
