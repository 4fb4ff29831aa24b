//! Wallach scans and standalone witness searches.

use cone_lab_core::jordan::random;
use cone_lab_core::special;
use cone_lab_core::tube::{GramCertificate, GramTolerances, Verdict, WitnessOptions};
use cone_lab_core::wallach::predicted_member;
use cone_lab_core::{Algebra, Element};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{lattice_k, ScanConfig};
use crate::par;
use crate::report::{algebra_fields, GramSummary, MarginSummary, ScanRecord, WitnessRecord};

pub fn gram_tolerances(cfg: &ScanConfig) -> GramTolerances {
    GramTolerances { psd: cfg.tol.gram_psd, witness: cfg.tol.gram_witness }
}

pub fn witness_options(cfg: &ScanConfig) -> WitnessOptions {
    WitnessOptions {
        budget: cfg.budget,
        refine_top: cfg.refine_top,
        refine_iterations: cfg.refine_iterations,
        tol: gram_tolerances(cfg),
    }
}

/// Smallest scaled positivity margin over `points` random cone points, plus
/// the value at `e`.
pub fn margin_summary(alg: Algebra, mu: f64, points: usize, seed: u64) -> cone_lab_core::Result<MarginSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_scaled = f64::MAX;
    for _ in 0..points {
        let y = random::cone_point(alg, 1.5, &mut rng);
        let m = special::positivity_margin(mu, &y)?;
        min_scaled = min_scaled.min(m / y.quad_rep().frobenius_norm());
    }
    let at_identity = special::positivity_margin(mu, &Element::identity(alg))?;
    Ok(MarginSummary { points, min_scaled, at_identity })
}

fn best(certs: Vec<GramCertificate>) -> Option<GramCertificate> {
    cone_lab_core::tube::best_certificate(certs)
}

/// One scan row: margins, then a PSD test (μ in the predicted set) or a
/// witness search with refinement (μ outside it).
pub fn scan_point(alg: Algebra, mu: f64, cfg: &ScanConfig, seed: u64) -> anyhow::Result<ScanRecord> {
    let predicted = predicted_member(&alg, mu);
    let margin = margin_summary(alg, mu, cfg.density_points, seed)?;
    let tol = gram_tolerances(cfg);
    let (cert, configurations, protocol) = if predicted {
        let certs = par::evaluate_configurations(alg, mu, seed, cfg.psd_configurations, tol)?;
        (best(certs).expect("positive budget"), cfg.psd_configurations, "psd_test")
    } else {
        (par::witness_search(alg, mu, seed, &witness_options(cfg))?, cfg.budget, "witness_search")
    };
    let observed = cert.verdict;
    let mismatch = (observed == Verdict::Witness) == predicted;
    let (algebra, family, r, d, n) = algebra_fields(&alg);
    Ok(ScanRecord {
        algebra,
        family,
        r,
        d,
        n,
        mu,
        lattice_k: lattice_k(&alg, mu),
        predicted,
        observed,
        mismatch,
        margin,
        gram: GramSummary {
            configurations,
            protocol: protocol.to_string(),
            min_relative: cert.relative_min,
            verdict: cert.verdict,
        },
        certificate: cert,
        seed,
    })
}

pub fn run_scan(cfg: &ScanConfig) -> anyhow::Result<Vec<ScanRecord>> {
    let seed = cfg.seed()?;
    let mut out = Vec::new();
    for alg in cfg.parsed_algebras()? {
        for mu in cfg.grid_for(&alg)? {
            out.push(scan_point(alg, mu, cfg, seed)?);
        }
    }
    Ok(out)
}

pub fn run_witness(cfg: &ScanConfig) -> anyhow::Result<Vec<WitnessRecord>> {
    let seed = cfg.seed()?;
    let opts = witness_options(cfg);
    let mut jobs = Vec::new();
    for alg in cfg.parsed_algebras()? {
        for mu in cfg.grid_for(&alg)? {
            jobs.push((alg, mu));
        }
    }
    jobs.iter()
        .map(|&(alg, mu)| {
            let certificate = par::witness_search(alg, mu, seed, &opts)?;
            Ok(WitnessRecord { algebra: alg.to_string(), mu, predicted: predicted_member(&alg, mu), certificate })
        })
        .collect()
}

/// Rows whose verdict contradicts the predicted set in the only way that counts as
/// a failure: a witness at a μ the predicted set contains.
pub fn hard_failures<'a>(rows: impl IntoIterator<Item = (&'a str, f64, bool, Verdict)>) -> Vec<String> {
    rows.into_iter()
        .filter(|(_, _, predicted, v)| *predicted && *v == Verdict::Witness)
        .map(|(a, mu, _, _)| format!("{a} mu={mu}: witness inside the predicted set"))
        .collect()
}
