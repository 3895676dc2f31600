//! Mott-lobe boundaries of the JCH model in the atomic limit.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::{check_experiment_name, relative_error};
use crate::error::{Error, Result};
use crate::models::{
    mott_lobe_boundaries_npad, mott_lobe_boundary_analytic, mott_lobe_boundary_dense, JCSiteParams,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JchMottConfig {
    pub experiment: Option<String>,
    pub out: Option<PathBuf>,
    pub omega: f64,
    pub g: f64,
    pub mu: f64,
    pub n_max: usize,
    /// Boundaries for `n = 1..=lobes`.
    pub lobes: usize,
    pub detuning_min: f64,
    pub detuning_max: f64,
    pub detuning_points: usize,
}

impl Default for JchMottConfig {
    fn default() -> Self {
        JchMottConfig {
            experiment: None,
            out: None,
            omega: 1.0,
            g: 0.1,
            mu: 0.0,
            n_max: 10,
            lobes: 5,
            detuning_min: -2.0,
            detuning_max: 2.0,
            detuning_points: 41,
        }
    }
}

impl JchMottConfig {
    pub fn validate(&self) -> Result<()> {
        check_experiment_name(&self.experiment, "jch-mott")?;
        if self.lobes == 0 {
            return Err(Error::InvalidParameter("lobes must be >= 1".into()));
        }
        if self.detuning_points < 2 || !(self.detuning_max > self.detuning_min) {
            return Err(Error::InvalidParameter("need at least 2 detuning points over a non-empty range".into()));
        }
        if !(self.g > 0.0) {
            return Err(Error::InvalidParameter("g must be positive".into()));
        }
        if self.lobes + 1 >= self.n_max {
            return Err(Error::TruncationTooSmall {
                n_max: self.n_max,
                needed: self.lobes + 1,
            });
        }
        self.site(0.0).validate()
    }

    fn site(&self, detuning_over_g: f64) -> JCSiteParams {
        JCSiteParams::from_detuning(self.omega, self.g, detuning_over_g, self.mu, self.n_max)
    }

    pub fn detunings(&self) -> Vec<f64> {
        let span = self.detuning_max - self.detuning_min;
        (0..self.detuning_points)
            .map(|k| self.detuning_min + span * k as f64 / (self.detuning_points - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MottRow {
    pub n: usize,
    pub detuning_over_g: f64,
    pub boundary_npad: f64,
    pub boundary_dense_eig: f64,
    pub boundary_analytic: f64,
    pub rel_err_npad: f64,
    pub rel_err_dense: f64,
}

/// One row per `(n, Delta/g)`, `n` outermost.
pub fn run(cfg: &JchMottConfig) -> Result<Vec<MottRow>> {
    cfg.validate()?;
    let detunings = cfg.detunings();
    let mut npad = Vec::with_capacity(detunings.len());
    for &dg in &detunings {
        npad.push(mott_lobe_boundaries_npad(&cfg.site(dg), cfg.lobes)?);
    }
    let mut rows = Vec::with_capacity(cfg.lobes * detunings.len());
    for n in 1..=cfg.lobes {
        for (k, &dg) in detunings.iter().enumerate() {
            let analytic = mott_lobe_boundary_analytic(n, dg);
            let dense = mott_lobe_boundary_dense(&cfg.site(dg), n)?;
            let b = npad[k][n - 1];
            rows.push(MottRow {
                n,
                detuning_over_g: dg,
                boundary_npad: b,
                boundary_dense_eig: dense,
                boundary_analytic: analytic,
                rel_err_npad: relative_error(b, analytic),
                rel_err_dense: relative_error(dense, analytic),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_shape_and_accuracy() {
        let cfg = JchMottConfig::default();
        let rows = run(&cfg).unwrap();
        assert_eq!(rows.len(), 5 * 41);
        let center = rows.iter().find(|r| r.n == 1 && r.detuning_over_g.abs() < 1e-12).unwrap();
        assert!((center.boundary_analytic + 0.414_213_56).abs() < 1e-8);
        assert!(rows.iter().all(|r| r.rel_err_npad <= 1e-9 && r.rel_err_dense <= 1e-9));
    }

    #[test]
    fn validation() {
        let bad = JchMottConfig { n_max: 6, ..Default::default() };
        assert!(matches!(bad.validate(), Err(Error::TruncationTooSmall { .. })));
        let bad = JchMottConfig { experiment: Some("spin-chain".into()), ..Default::default() };
        assert!(bad.validate().is_err());
        assert!(JchMottConfig { detuning_points: 1, ..Default::default() }.validate().is_err());
    }

    #[test]
    fn parses_partial_toml() {
        let cfg: JchMottConfig = crate::experiments::parse_config("lobes = 3\ng = 0.2\n").unwrap();
        assert_eq!(cfg.lobes, 3);
        assert_eq!(cfg.detuning_points, 41);
        assert!(crate::experiments::parse_config::<JchMottConfig>("bogus = 1").is_err());
    }
}
