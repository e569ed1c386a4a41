//! Text and JSON wire formats.
//!
//! * Group specs: `"Z3"`, `"Z9xZ3"`, `"Z(27)xZ(5)"` (case-insensitive,
//!   parentheses optional).
//! * Distributions: `{"group": "Z9", "mass": [{"element": [3], "p": "1",
//!   "q": "3"}, …]}`; rationals travel as decimal-free integer strings.
//! * Homomorphisms: `{"matrix": [[…]]}`.
//! * Verdicts: `{"holds": …, "witness": {"u": […], "v": […]} | null,
//!   "decomposition": {"K": [[…]…], "x1": […], "x2": […]} | null}`.
//! * Model specs: `{"model": "lemma5", "p": 3, "ladder": [1,2,3,4],
//!   "a": "1/2", "level": 3}` and the analogous `"case1"` / `"case2"`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::distribution::Distribution;
use crate::dual_models::{
    dyadic_model, rational_model, sequence_model, DyadicModel, GridSpec, ModelVerdict,
    ModelWitness, RationalModel, SeqElement, SequenceModel,
};
use crate::error::{Error, Result};
use crate::group::{Element, FiniteAbelianGroup, Homomorphism};
use crate::heyde::{Decomposition, Verdict, Witness};
use crate::rational::{format_rational, parse_rational, Rational};

/// Parse a group spec like `"Z9xZ3"` or `"z(27) x z(5)"`.
pub fn parse_group_spec(spec: &str, cap: u64) -> Result<FiniteAbelianGroup> {
    let mut orders = Vec::new();
    for raw in spec.split(['x', 'X']) {
        let token = raw.trim();
        let rest = token
            .strip_prefix(['z', 'Z'])
            .ok_or_else(|| Error::Parse(format!("group factor {token:?} must start with Z")))?;
        let digits = rest
            .strip_prefix('(')
            .map(|inner| {
                inner
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse(format!("unbalanced parentheses in {token:?}")))
            })
            .transpose()?
            .unwrap_or(rest)
            .trim();
        let n: u64 = digits
            .parse()
            .map_err(|_| Error::Parse(format!("bad order {digits:?} in group factor {token:?}")))?;
        // the trivial group displays as Z1; accept it back
        if n != 1 {
            orders.push(n);
        }
    }
    FiniteAbelianGroup::make_with_cap(&orders, cap)
}

fn parse_bigint(s: &str, what: &str) -> Result<BigInt> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} {s:?}")))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MassEntryJson {
    pub element: Vec<u64>,
    pub p: String,
    pub q: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistributionJson {
    pub group: String,
    pub mass: Vec<MassEntryJson>,
}

impl DistributionJson {
    pub fn from_distribution(d: &Distribution) -> Self {
        DistributionJson {
            group: d.group().to_string(),
            mass: d
                .mass()
                .iter()
                .map(|(e, m)| MassEntryJson {
                    element: e.residues().to_vec(),
                    p: m.numer().to_string(),
                    q: m.denom().to_string(),
                })
                .collect(),
        }
    }

    pub fn to_distribution(&self, cap: u64) -> Result<Distribution> {
        let group = parse_group_spec(&self.group, cap)?;
        let mut mass = BTreeMap::new();
        for entry in &self.mass {
            let e = group.element(entry.element.clone())?;
            let p = parse_bigint(&entry.p, "numerator")?;
            let q = parse_bigint(&entry.q, "denominator")?;
            if q == BigInt::from(0) {
                return Err(Error::Parse("zero denominator in mass entry".into()));
            }
            mass.insert(e, Rational::new(p, q));
        }
        Distribution::new(group, mass)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HomomorphismJson {
    pub matrix: Vec<Vec<i64>>,
}

impl HomomorphismJson {
    pub fn from_homomorphism(h: &Homomorphism) -> Self {
        HomomorphismJson {
            matrix: h
                .matrix()
                .iter()
                .map(|row| row.iter().map(|&a| a as i64).collect())
                .collect(),
        }
    }

    /// An endomorphism of `g` (the usual case for the CLI).
    pub fn to_endomorphism(&self, g: &FiniteAbelianGroup) -> Result<Homomorphism> {
        Homomorphism::new(g.clone(), g.clone(), self.matrix.clone())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessJson {
    pub u: Vec<u64>,
    pub v: Vec<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecompositionJson {
    #[serde(rename = "K")]
    pub k: Vec<Vec<u64>>,
    pub x1: Vec<u64>,
    pub x2: Vec<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerdictJson {
    pub holds: bool,
    pub witness: Option<WitnessJson>,
    pub decomposition: Option<DecompositionJson>,
}

fn coords(e: &Element) -> Vec<u64> {
    e.residues().to_vec()
}

impl VerdictJson {
    pub fn from_verdict(v: &Verdict) -> Self {
        VerdictJson {
            holds: v.holds,
            witness: v.witness.as_ref().map(|Witness { u, v }| WitnessJson {
                u: coords(u),
                v: coords(v),
            }),
            decomposition: v.decomposition.as_ref().map(
                |Decomposition { subgroup, x1, x2 }| DecompositionJson {
                    k: subgroup.members().iter().map(coords).collect(),
                    x1: coords(x1),
                    x2: coords(x2),
                },
            ),
        }
    }
}

/// Verdict shape for the dual models: same layout, with model points
/// rendered as coordinate arrays (sequences) or rational strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelVerdictJson {
    pub holds: bool,
    pub witness: Option<ModelWitnessJson>,
    pub pairs_checked: u64,
    pub case_counts: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelWitnessJson {
    pub u: serde_json::Value,
    pub v: serde_json::Value,
    pub reason: String,
}

impl ModelVerdictJson {
    pub fn from_sequence(v: &ModelVerdict<SeqElement>) -> Self {
        Self::build(v, |p| serde_json::json!(p.coords()))
    }

    pub fn from_rational(v: &ModelVerdict<Rational>) -> Self {
        Self::build(v, |p| serde_json::json!(format_rational(p)))
    }

    fn build<P>(v: &ModelVerdict<P>, point: impl Fn(&P) -> serde_json::Value) -> Self {
        ModelVerdictJson {
            holds: v.holds,
            witness: v
                .witness
                .as_ref()
                .map(|ModelWitness { u, v, reason }| ModelWitnessJson {
                    u: point(u),
                    v: point(v),
                    reason: reason.clone(),
                }),
            pairs_checked: v.pairs_checked,
            case_counts: v
                .case_counts
                .iter()
                .map(|(k, c)| (k.to_string(), *c))
                .collect(),
        }
    }
}

/// A dual-model specification as it travels over the wire. The tag values
/// are part of the format.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "model")]
pub enum ModelSpec {
    #[serde(rename = "lemma5")]
    Sequence {
        p: u64,
        ladder: Vec<u32>,
        a: String,
        #[serde(default = "default_level")]
        level: usize,
    },
    #[serde(rename = "case1")]
    Dyadic {
        p: u64,
        y0: String,
        #[serde(default)]
        grid: Option<GridSpecJson>,
    },
    #[serde(rename = "case2")]
    SolenoidRational {
        c: String,
        #[serde(default)]
        grid: Option<GridSpecJson>,
    },
}

fn default_level() -> usize {
    3
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct GridSpecJson {
    pub m_bound: Option<i64>,
    pub n_max: Option<u32>,
    pub random_pairs: Option<u64>,
    pub seed: Option<u64>,
}

impl GridSpecJson {
    pub fn to_grid(&self) -> GridSpec {
        let d = GridSpec::default();
        GridSpec {
            m_bound: self.m_bound.unwrap_or(d.m_bound),
            n_max: self.n_max.unwrap_or(d.n_max),
            random_pairs: self.random_pairs.unwrap_or(d.random_pairs),
            seed: self.seed.unwrap_or(d.seed),
        }
    }
}

/// A parsed, validated model ready to verify.
pub enum BuiltModel {
    Sequence { model: SequenceModel, level: usize },
    Dyadic { model: DyadicModel, grid: GridSpec },
    SolenoidRational { model: RationalModel, grid: GridSpec },
}

impl ModelSpec {
    pub fn build(&self) -> Result<BuiltModel> {
        match self {
            ModelSpec::Sequence {
                p,
                ladder,
                a,
                level,
            } => Ok(BuiltModel::Sequence {
                model: sequence_model(*p, ladder, parse_rational(a)?)?,
                level: *level,
            }),
            ModelSpec::Dyadic { p, y0, grid } => Ok(BuiltModel::Dyadic {
                model: dyadic_model(*p, parse_rational(y0)?)?,
                grid: grid.clone().unwrap_or_default().to_grid(),
            }),
            ModelSpec::SolenoidRational { c, grid } => Ok(BuiltModel::SolenoidRational {
                model: rational_model(parse_rational(c)?)?,
                grid: grid.clone().unwrap_or_default().to_grid(),
            }),
        }
    }
}
