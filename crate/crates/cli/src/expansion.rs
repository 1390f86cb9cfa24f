//! On-disk form of an expansion, shared by `solve` and `verify`.

use std::collections::BTreeMap;

use amoeba_core::lattice::LatticeVector;
use amoeba_core::pipeline::{BranchReport, SolveReport};
use amoeba_core::polyhedra::Cone;
use amoeba_core::puiseux::{ExtractionDiagnostics, PuiseuxExpansion};
use num_complex::Complex;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CoefficientJson {
    pub t_exp: Vec<i64>,
    /// `t_exp / d` as reduced fractions.
    pub x_exp: Vec<String>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpansionJson {
    pub vars: Vec<String>,
    pub d: usize,
    pub order: Vec<i64>,
    pub support_cone: Cone,
    pub literal_support_cone: Cone,
    pub literal_cone_degenerate: bool,
    pub branch_id: usize,
    pub sheet: usize,
    pub weight: Vec<i64>,
    pub max_weight: i64,
    pub t_log_radius: Vec<f64>,
    pub grid: usize,
    pub coefficients: Vec<CoefficientJson>,
    pub residual: f64,
    pub support_leak: f64,
    pub support_leak_translated: f64,
    pub support_apex: Option<Vec<i64>>,
    pub extraction_passed: bool,
    #[serde(default)]
    pub unresolved: usize,
}

fn fraction(n: i64, d: i64) -> String {
    let g = n.gcd(&d);
    let (n, d) = (n / g, d / g);
    if d == 1 {
        n.to_string()
    } else {
        format!("{n}/{d}")
    }
}

impl ExpansionJson {
    pub fn from_branch(report: &SolveReport, branch: &BranchReport, vars: &[String]) -> Self {
        let e = &branch.expansion;
        let d = e.d as i64;
        let coefficients = e
            .coefficients
            .iter()
            .map(|(i, a)| CoefficientJson {
                t_exp: i.0.clone(),
                x_exp: i.0.iter().map(|&k| fraction(k, d)).collect(),
                re: a.re,
                im: a.im,
            })
            .collect();
        ExpansionJson {
            vars: vars.to_vec(),
            d: e.d,
            order: report.order.0.clone(),
            support_cone: report.support_cone.clone(),
            literal_support_cone: report.literal_support_cone.clone(),
            literal_cone_degenerate: report.literal_cone_degenerate,
            branch_id: e.branch_id,
            sheet: e.sheet,
            weight: e.weight.0.clone(),
            max_weight: e.max_weight,
            t_log_radius: e.t_log_radius.clone(),
            grid: e.grid,
            coefficients,
            residual: branch.residual.max_relative,
            support_leak: branch.support.max_outside,
            support_leak_translated: branch.support_translated.max_outside,
            support_apex: branch.support_translated.apex.as_ref().map(|a| a.0.clone()),
            extraction_passed: report.extraction_passed,
            unresolved: e.diagnostics.unresolved,
        }
    }

    /// Rebuilds the expansion, rejecting ragged or duplicated exponents.
    pub fn to_expansion(&self) -> Result<PuiseuxExpansion, String> {
        let n = self.support_cone.dim();
        if self.d == 0 {
            return Err("d must be positive".into());
        }
        if self.weight.len() != n || self.t_log_radius.len() != n || self.order.len() != n {
            return Err(format!("weight, order and t_log_radius must have {n} entries"));
        }
        let mut coefficients = BTreeMap::new();
        for c in &self.coefficients {
            if c.t_exp.len() != n {
                return Err(format!("exponent {:?} does not have {n} entries", c.t_exp));
            }
            if coefficients.insert(LatticeVector(c.t_exp.clone()), Complex::new(c.re, c.im)).is_some() {
                return Err(format!("exponent {:?} listed twice", c.t_exp));
            }
        }
        Ok(PuiseuxExpansion {
            d: self.d,
            coefficients,
            support_cone: self.support_cone.clone(),
            component_order: LatticeVector(self.order.clone()),
            branch_id: self.branch_id,
            sheet: self.sheet,
            weight: LatticeVector(self.weight.clone()),
            max_weight: self.max_weight,
            t_log_radius: self.t_log_radius.clone(),
            grid: self.grid,
            diagnostics: ExtractionDiagnostics::default(),
        })
    }
}

/// `solve` writes one object per branch, or an array when there are several.
pub fn parse_expansions(text: &str) -> Result<Vec<ExpansionJson>, serde_json::Error> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.is_array() {
        serde_json::from_value(value)
    } else {
        Ok(vec![serde_json::from_value(value)?])
    }
}
