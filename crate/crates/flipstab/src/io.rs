//! JSON schemas for fans, divisors, sheaves and flip inputs. Rationals
//! travel as "p/q" strings (plain integers are accepted on input), so
//! every file is exactly representable and diff-friendly.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fan::Fan;
use crate::intersection::InvariantDivisor;
use crate::lattice::LatticeVector;
use crate::rat::{format_rat, parse_rat, Int, Rat};
use crate::sheaf::{Filtration, ToricSheaf};
use crate::subspace::Subspace;

/// Schema violations (malformed JSON or wrong shapes) are reported apart
/// from semantic ones (well-formed data violating a domain invariant).
#[derive(Debug)]
pub enum ParseError {
    Schema(String),
    Semantic(Error),
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseError::Schema(msg) => write!(f, "schema violation: {msg}"),
            ParseError::Semantic(err) => write!(f, "semantic violation: {err}"),
        }
    }
}

impl std::error::Error for ParseError {}

impl From<Error> for ParseError {
    fn from(e: Error) -> Self {
        ParseError::Semantic(e)
    }
}

fn schema(e: impl std::fmt::Display) -> ParseError {
    ParseError::Schema(e.to_string())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FanJson {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub maximal_cones: Vec<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DivisorJson {
    pub coeffs: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct JumpJson {
    pub level: i64,
    /// Rows spanning the new directions at this level, cumulative with
    /// the earlier levels.
    pub generators: Vec<Vec<serde_json::Value>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SheafJson {
    pub rank: usize,
    pub filtrations: BTreeMap<String, Vec<JumpJson>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FlipJson {
    pub fan: FanJson,
    pub flipping_cone_rays: Vec<usize>,
}

fn rat_from_value(v: &serde_json::Value) -> Result<Rat, ParseError> {
    match v {
        serde_json::Value::String(s) => Ok(parse_rat(s)?),
        serde_json::Value::Number(n) => {
            let i = n
                .as_i64()
                .ok_or_else(|| schema(format!("non-integer numeric literal {n}")))?;
            Ok(Rat::from_integer(Int::from(i)))
        }
        other => Err(schema(format!("expected \"p/q\" string, got {other}"))),
    }
}

fn rat_to_value(r: &Rat) -> serde_json::Value {
    serde_json::Value::String(format_rat(r))
}

pub fn fan_from_json(text: &str) -> Result<Fan, ParseError> {
    let raw: FanJson = serde_json::from_str(text).map_err(schema)?;
    fan_from_schema(&raw)
}

pub fn fan_from_schema(raw: &FanJson) -> Result<Fan, ParseError> {
    let rays = raw
        .rays
        .iter()
        .map(|r| LatticeVector::from_i64(r))
        .collect();
    Ok(Fan::new(raw.rank, rays, raw.maximal_cones.clone())?)
}

pub fn fan_to_json(fan: &Fan) -> FanJson {
    FanJson {
        rank: fan.rank(),
        rays: fan
            .rays()
            .iter()
            .map(|r| {
                r.0.iter()
                    .map(|c| c.try_into().expect("ray coordinates fit i64"))
                    .collect()
            })
            .collect(),
        maximal_cones: fan
            .max_cones()
            .iter()
            .map(|c| c.ray_indices().collect())
            .collect(),
    }
}

pub fn divisor_from_json(text: &str, fan: &Fan) -> Result<InvariantDivisor, ParseError> {
    let raw: DivisorJson = serde_json::from_str(text).map_err(schema)?;
    let mut d = InvariantDivisor::zero();
    for (key, value) in &raw.coeffs {
        let ray: usize = key
            .parse()
            .map_err(|_| schema(format!("ray index key `{key}` is not an integer")))?;
        if ray >= fan.ray_count() {
            return Err(Error::RayIndex(ray).into());
        }
        d.set(ray, rat_from_value(value)?);
    }
    Ok(d)
}

pub fn divisor_to_json(d: &InvariantDivisor) -> DivisorJson {
    DivisorJson {
        coeffs: d
            .coeffs()
            .iter()
            .map(|(i, c)| (i.to_string(), rat_to_value(c)))
            .collect(),
    }
}

pub fn sheaf_from_json(text: &str, fan: &Arc<Fan>) -> Result<ToricSheaf, ParseError> {
    let raw: SheafJson = serde_json::from_str(text).map_err(schema)?;
    let mut filtrations: Vec<Option<Filtration>> = vec![None; fan.ray_count()];
    for (key, jumps_json) in &raw.filtrations {
        let ray: usize = key
            .parse()
            .map_err(|_| schema(format!("ray index key `{key}` is not an integer")))?;
        if ray >= fan.ray_count() {
            return Err(Error::RayIndex(ray).into());
        }
        let mut jumps = Vec::new();
        let mut current = Subspace::zero(raw.rank);
        for j in jumps_json {
            let mut rows: Vec<Vec<Rat>> = current.basis().to_vec();
            for gen in &j.generators {
                if gen.len() != raw.rank {
                    return Err(schema(format!(
                        "generator of length {} in a rank-{} sheaf",
                        gen.len(),
                        raw.rank
                    )));
                }
                rows.push(gen.iter().map(rat_from_value).collect::<Result<_, _>>()?);
            }
            current = Subspace::from_rows(raw.rank, rows)?;
            jumps.push((j.level, current.clone()));
        }
        filtrations[ray] = Some(Filtration::new(jumps)?);
    }
    let filtrations = filtrations
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            f.ok_or_else(|| {
                ParseError::Semantic(Error::InvalidFiltration(format!(
                    "missing filtration for ray {i}"
                )))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ToricSheaf::new(fan.clone(), raw.rank, filtrations)?)
}

pub fn sheaf_to_json(s: &ToricSheaf) -> SheafJson {
    let mut filtrations = BTreeMap::new();
    for (ray, filt) in s.filtrations().iter().enumerate() {
        let mut jumps = Vec::new();
        let mut prev = Subspace::zero(s.rank());
        for (level, space) in filt.jumps() {
            let mut generators = Vec::new();
            let mut acc = prev.clone();
            for row in space.basis() {
                if !acc.contains_vector(row) {
                    generators.push(row.iter().map(rat_to_value).collect());
                    acc = acc
                        .sum(
                            &Subspace::from_rows(s.rank(), vec![row.clone()])
                                .expect("row is well formed"),
                        )
                        .expect("same ambient");
                }
            }
            jumps.push(JumpJson {
                level: *level,
                generators,
            });
            prev = space.clone();
        }
        filtrations.insert(ray.to_string(), jumps);
    }
    SheafJson {
        rank: s.rank(),
        filtrations,
    }
}

pub fn flip_from_json(text: &str) -> Result<(Arc<Fan>, Vec<usize>), ParseError> {
    let raw: FlipJson = serde_json::from_str(text).map_err(schema)?;
    let fan = fan_from_schema(&raw.fan)?;
    Ok((Arc::new(fan), raw.flipping_cone_rays))
}
