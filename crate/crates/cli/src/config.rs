//! Run configuration: a single JSON document, optionally overridden by flags.

use std::path::Path;

use cone_lab_core::wallach::lattice_index;
use cone_lab_core::Algebra;
use serde::{Deserialize, Serialize};

/// Configuration problems map to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative error for algebraic identities.
    pub identity: f64,
    /// Relative error for Γ_Ω ratio telescoping.
    pub gamma: f64,
    /// Relative error for kernel symmetry/covariance and log-det agreement.
    pub kernel: f64,
    /// Gram PSD threshold, relative to the largest |eigenvalue|.
    pub gram_psd: f64,
    /// Gram witness threshold, relative to the largest |eigenvalue|.
    pub gram_witness: f64,
    /// Monte Carlo entrywise acceptance in standard errors.
    pub mc_sigmas: f64,
    /// Monte Carlo Frobenius relative deviation.
    pub mc_frobenius: f64,
    /// Laplace-representation relative error (entrywise, scaled by the largest entry).
    pub laplace: f64,
    /// Requested accuracy of the rank-2 quadrature itself.
    pub quadrature: f64,
    /// Positivity margin floor, relative to ‖P(y)‖_F.
    pub margin: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: 1e-10,
            gamma: 1e-12,
            kernel: 1e-9,
            gram_psd: 1e-9,
            gram_witness: 1e-6,
            mc_sigmas: 3.0,
            mc_frobenius: 0.02,
            laplace: 1e-3,
            quadrature: 1e-4,
            margin: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    /// Algebra specs such as `symr:3`, `hermc:2`, `spin:5`.
    pub algebras: Vec<String>,
    /// Explicit μ values.
    pub mu: Vec<f64>,
    /// Adds the points `kd/2`, `k = 0..=r+1`, for each algebra.
    pub lattice: bool,
    /// Master seed; mandatory.
    pub seed: Option<u64>,
    /// Monte Carlo sample count per estimate.
    pub samples: u64,
    /// Witness search configurations for μ outside the predicted set.
    pub budget: u64,
    /// Gram configurations tested for μ inside the predicted set.
    pub psd_configurations: u64,
    /// Random cone points for positivity margins.
    pub density_points: usize,
    /// Random elements per algebra in the identity suite.
    pub identity_points: usize,
    pub refine_top: usize,
    pub refine_iterations: usize,
    /// Checks run by `mc-verify`: `riesz`, `boundary`, `obstruction`, `laplace`.
    pub checks: Vec<String>,
    /// μ for the Laplace-representation check.
    pub laplace_mu: f64,
    pub laplace_pairs: usize,
    pub tol: Tolerances,
    pub out: Option<String>,
    pub csv: Option<String>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            algebras: Vec::new(),
            mu: Vec::new(),
            lattice: false,
            seed: None,
            samples: 200_000,
            budget: 200,
            psd_configurations: 50,
            density_points: 1000,
            identity_points: 1000,
            refine_top: 2,
            refine_iterations: 100,
            checks: Vec::new(),
            laplace_mu: 3.0,
            laplace_pairs: 5,
            tol: Tolerances::default(),
            out: None,
            csv: None,
        }
    }
}

pub const MC_CHECKS: [&str; 4] = ["riesz", "boundary", "obstruction", "laplace"];

impl ScanConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| bad(format!("invalid config {}: {e}", path.display())))
    }

    pub fn seed(&self) -> anyhow::Result<u64> {
        self.seed.ok_or_else(|| bad("a seed is required (--seed or \"seed\" in the config)"))
    }

    pub fn parsed_algebras(&self) -> anyhow::Result<Vec<Algebra>> {
        if self.algebras.is_empty() {
            return Err(bad("no algebras configured"));
        }
        self.algebras.iter().map(|s| s.parse::<Algebra>().map_err(|e| bad(format!("bad algebra '{s}': {e}")))).collect()
    }

    /// Sorted, deduplicated μ grid for one algebra.
    pub fn grid_for(&self, alg: &Algebra) -> anyhow::Result<Vec<f64>> {
        let mut g = self.mu.clone();
        if self.lattice {
            g.extend((0..=alg.rank() + 1).map(|k| k as f64 * alg.half_d()));
        }
        if g.is_empty() {
            return Err(bad("the mu grid is empty (use --mu, --grid or --lattice)"));
        }
        if let Some(x) = g.iter().find(|x| !x.is_finite()) {
            return Err(bad(format!("non-finite mu {x}")));
        }
        g.sort_by(f64::total_cmp);
        g.dedup();
        Ok(g)
    }

    pub fn mc_checks(&self) -> anyhow::Result<Vec<String>> {
        if self.checks.is_empty() {
            return Ok(MC_CHECKS.iter().map(|s| s.to_string()).collect());
        }
        for c in &self.checks {
            if !MC_CHECKS.contains(&c.as_str()) {
                return Err(bad(format!("unknown check '{c}'")));
            }
        }
        Ok(self.checks.clone())
    }

    /// Structural checks shared by all commands.
    pub fn validate(&self) -> anyhow::Result<()> {
        self.seed()?;
        self.parsed_algebras()?;
        if self.samples < 2 {
            return Err(bad("samples must be at least 2"));
        }
        if self.budget == 0 || self.psd_configurations == 0 {
            return Err(bad("budgets must be positive"));
        }
        let t = &self.tol;
        for (name, v) in [
            ("identity", t.identity),
            ("gamma", t.gamma),
            ("kernel", t.kernel),
            ("gram_psd", t.gram_psd),
            ("gram_witness", t.gram_witness),
            ("mc_sigmas", t.mc_sigmas),
            ("mc_frobenius", t.mc_frobenius),
            ("laplace", t.laplace),
            ("quadrature", t.quadrature),
            ("margin", t.margin),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(bad(format!("tolerance {name} must be a finite non-negative number")));
            }
        }
        Ok(())
    }
}

/// `start:stop:step`, inclusive of `stop` up to rounding.
pub fn parse_grid(spec: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let nums: Result<Vec<f64>, _> = parts.iter().map(|p| p.trim().parse::<f64>()).collect();
    let nums = nums.map_err(|_| bad(format!("bad grid '{spec}' (expected start:stop:step)")))?;
    let [start, stop, step] = nums[..] else {
        return Err(bad(format!("bad grid '{spec}' (expected start:stop:step)")));
    };
    let valid = step > 0.0 && stop >= start && start.is_finite() && stop.is_finite();
    if !valid {
        return Err(bad(format!("bad grid '{spec}'")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    if count > 100_000 {
        return Err(bad("grid too large"));
    }
    Ok((0..=count).map(|i| start + i as f64 * step).collect())
}

/// Lattice flag for the report: `k` when `μ = kd/2`.
pub fn lattice_k(alg: &Algebra, mu: f64) -> Option<u32> {
    lattice_index(alg, mu)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:1:0.25").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("a:b").is_err());
    }

    #[test]
    fn config_json_roundtrip() {
        let c =
            ScanConfig { algebras: vec!["symr:3".into()], mu: vec![0.3, 1.25], seed: Some(7), ..Default::default() };
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<ScanConfig>(&s).unwrap(), c);
        assert!(serde_json::from_str::<ScanConfig>("{\"bogus\": 1}").is_err());
    }

    #[test]
    fn lattice_grid() {
        let c = ScanConfig { algebras: vec!["symr:3".into()], lattice: true, seed: Some(1), ..Default::default() };
        let alg = c.parsed_algebras().unwrap()[0];
        assert_eq!(c.grid_for(&alg).unwrap(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }
}
