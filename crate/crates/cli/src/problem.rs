use std::collections::BTreeMap;

use cobordant::algebra::coeff::parse_rational;
use cobordant::algebra::{parse_polynomial, Coeff, Field, Poly, Ring};
use cobordant::cobordant::{DivisorPolicy, DivisorSet};
use cobordant::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Principalize,
    Embedded,
    InvOnly,
    BlowupOnly,
    Toric,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divisors: Option<DivisorPolicy>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToricJson {
    pub cone: Vec<Vec<i64>>,
    pub v: Vec<i64>,
}

/// Problem file as read from disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemJson {
    #[serde(default = "default_field")]
    pub field: String,
    #[serde(default)]
    pub vars: Vec<String>,
    #[serde(default)]
    pub divisors: Vec<String>,
    #[serde(default)]
    pub generators: Vec<String>,
    #[serde(default)]
    pub point: BTreeMap<String, String>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub options: OptionsJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub toric: Option<ToricJson>,
}

fn default_field() -> String {
    "Q".into()
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub ring: Ring,
    pub divisors: DivisorSet,
    pub generators: Vec<Poly>,
    pub point: Vec<Coeff>,
    pub mode: Mode,
    pub precision: Option<u32>,
    pub max_steps: usize,
    pub policy: DivisorPolicy,
    pub toric: Option<ToricJson>,
}

pub const DEFAULT_MAX_STEPS: usize = 8;

pub fn parse_point(ring: &Ring, point: &BTreeMap<String, String>) -> Result<Vec<Coeff>> {
    let field = ring.field();
    let mut out = vec![field.zero(); ring.nvars()];
    for (name, value) in point {
        let i = ring
            .index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.clone()))?;
        out[i] = field.from_rational(&parse_rational(value)?)?;
    }
    Ok(out)
}

impl Problem {
    pub fn from_json(j: &ProblemJson) -> Result<Problem> {
        let field = Field::parse(&j.field)?;
        if j.mode != Mode::Toric && j.vars.is_empty() {
            return Err(Error::Invalid("no variables declared".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for v in &j.vars {
            if !seen.insert(v) {
                return Err(Error::Invalid(format!("variable `{v}` declared twice")));
            }
        }
        let ring = Ring::new(field, &j.vars);
        let divs = j
            .divisors
            .iter()
            .map(|d| ring.index_of(d).ok_or_else(|| Error::UnknownVariable(d.clone())))
            .collect::<Result<Vec<_>>>()?;
        let generators = j
            .generators
            .iter()
            .map(|g| parse_polynomial(g, &ring))
            .collect::<Result<Vec<_>>>()?;
        let point = parse_point(&ring, &j.point)?;
        Ok(Problem {
            divisors: DivisorSet::original(&ring, &divs),
            ring,
            generators,
            point,
            mode: j.mode,
            precision: j.options.precision,
            max_steps: j.options.max_steps.unwrap_or(DEFAULT_MAX_STEPS),
            policy: j.options.divisors.unwrap_or_default(),
            toric: j.toric.clone(),
        })
    }

    pub fn parse(text: &str) -> Result<Problem> {
        let j: ProblemJson = serde_json::from_str(text).map_err(|e| Error::Syntax {
            pos: e.column(),
            msg: e.to_string(),
        })?;
        Problem::from_json(&j)
    }
}

/// A witness `F = f + sum m_i D_i f` supporting an almost-homogeneity claim.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub expression: String,
    #[serde(default)]
    pub multipliers: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanStep {
    /// 1-based; step 1 is the marked point of the problem.
    pub step: usize,
    /// Directives `name := expression` in the current chart variables.
    #[serde(default)]
    pub change: Vec<String>,
    /// Evaluation point in the coordinates after `change`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Plan {
    #[serde(default)]
    pub steps: Vec<PlanStep>,
    #[serde(default)]
    pub certificates: Vec<Certificate>,
    /// Recorded but not checked.
    #[serde(default)]
    pub assertions: Vec<String>,
}

impl Plan {
    pub fn parse(text: &str) -> Result<Plan> {
        serde_json::from_str(text).map_err(|e| Error::Syntax {
            pos: e.column(),
            msg: e.to_string(),
        })
    }

    pub fn step(&self, i: usize) -> Option<&PlanStep> {
        self.steps.iter().find(|s| s.step == i)
    }
}

/// Splits `name := expression`.
pub fn parse_directive(d: &str) -> Result<(String, String)> {
    let (lhs, rhs) = d.split_once(":=").ok_or_else(|| Error::Syntax {
        pos: 0,
        msg: format!("expected `name := expression` in `{d}`"),
    })?;
    let name = lhs.trim();
    let ok = !name.is_empty()
        && name.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'');
    if !ok {
        return Err(Error::Syntax {
            pos: 0,
            msg: format!("bad coordinate name `{name}`"),
        });
    }
    Ok((name.to_string(), rhs.trim().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_problem_and_plan() {
        let p = Problem::parse(r#"{"vars":["x1","x2","x3"],"divisors":["x1","x2"],"generators":["(x1+x2^2)^2+x3^7"]}"#)
            .unwrap();
        assert_eq!(p.generators[0].to_string(), "x1^2+2*x1*x2^2+x2^4+x3^7");
        assert_eq!(p.divisors.flags(3), vec![true, true, false]);
        assert_eq!(p.max_steps, DEFAULT_MAX_STEPS);
        let plan = Plan::parse(r#"{"steps":[{"step":2,"change":["u := x1' + x2'^2"],"point":{"x2'":"1"}}]}"#).unwrap();
        assert_eq!(
            parse_directive(&plan.step(2).unwrap().change[0]).unwrap(),
            ("u".into(), "x1' + x2'^2".into())
        );
        assert!(matches!(
            Problem::parse(r#"{"vars":["x"],"generators":["x+"]}"#),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            Problem::parse(r#"{"vars":["x"],"generators":["y"]}"#),
            Err(Error::UnknownVariable(_))
        ));
        assert!(matches!(
            Problem::parse(r#"{"vars":["x"],"bogus":1}"#),
            Err(Error::Syntax { .. })
        ));
    }
}
