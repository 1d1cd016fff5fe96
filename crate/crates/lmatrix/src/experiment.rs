//! The growth-table experiment harness: run one named construction over a
//! list of primes, verify every invariant, certify ranks per the requested
//! mode, and emit matrix/report artifacts plus a CSV table.

use crate::artifact::{write_artifact, FieldDesc};
use crate::construct::{
    construct_fivethirds, construct_square, construct_threehalves, construct_xy3,
    ConstructionReport,
};
use crate::error::Error;
use crate::relations::{
    normalize_min_negatives, primitive_relation, IntRelation, LSet, PrimitiveRelation,
};
use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CertMode {
    Exact,
    Bound,
    Modular(Vec<u64>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// square | threehalves | fivethirds | xy3
    pub construction: String,
    pub field: FieldDesc,
    /// Elements of L as canonical strings (for xy3: exactly [x, y]).
    pub l: Vec<String>,
    /// Primitive relation coefficients; found canonically when omitted.
    #[serde(default)]
    pub relation: Option<Vec<i64>>,
    /// Explicit primes to run.
    #[serde(default)]
    pub q_list: Vec<u64>,
    /// Inclusive prime range [lo, hi], merged with q_list.
    #[serde(default)]
    pub q_range: Option<(u64, u64)>,
    /// Mandatory for fivethirds (drives the f-flat sampling).
    #[serde(default)]
    pub seed: Option<u64>,
    /// Output directory for matrix/report/CSV artifacts; no files without it.
    #[serde(default)]
    pub out: Option<String>,
    pub cert: CertMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthRow {
    pub q: u64,
    pub size: usize,
    pub rank_upper: usize,
    pub rank_lower: Option<usize>,
    pub rank_exact: Option<usize>,
}

impl GrowthRow {
    /// size / rank ratio, against the exact rank when certified, else the
    /// upper bound (conservative). Recomputed from the row, never stored.
    pub fn ratio(&self) -> f64 {
        let denom = self.rank_exact.unwrap_or(self.rank_upper).max(1);
        self.size as f64 / denom as f64
    }
}

#[derive(Debug, Clone, Default)]
pub struct GrowthTable {
    pub rows: Vec<GrowthRow>,
}

impl GrowthTable {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("q,size,rank_upper,rank_certified_lower,rank_certified_exact,ratio\n");
        for r in &self.rows {
            let lower = r.rank_lower.map(|v| v.to_string()).unwrap_or_default();
            let exact = r.rank_exact.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{:.6}\n",
                r.q,
                r.size,
                r.rank_upper,
                lower,
                exact,
                r.ratio()
            ));
        }
        out
    }
}

fn resolve_relation(cfg: &ExperimentConfig, l: &LSet) -> Result<IntRelation, Error> {
    if let Some(coeffs) = &cfg.relation {
        return IntRelation::new(l, coeffs.iter().map(|&c| BigInt::from(c)).collect());
    }
    let rel = match primitive_relation(l)? {
        PrimitiveRelation::Found(r) => r,
        PrimitiveRelation::Infeasible(_) => {
            return Err(Error::Invalid("L admits no primitive relation".into()))
        }
    };
    // the quadratic construction needs at most one negative; repair integer
    // relations automatically
    if cfg.construction == "square"
        && rel.coeffs().iter().filter(|c| c.is_negative()).count() > 1
        && l.ctx().is_rational()
    {
        return normalize_min_negatives(l, &rel);
    }
    Ok(rel)
}

fn build_one(cfg: &ExperimentConfig, q: u64) -> Result<ConstructionReport, Error> {
    let ctx = cfg.field.to_ctx()?;
    match cfg.construction.as_str() {
        "xy3" => {
            if cfg.l.len() != 2 {
                return Err(Error::Invalid("xy3 expects l = [x, y]".into()));
            }
            let x = ctx.parse_element(&cfg.l[0])?;
            let y = ctx.parse_element(&cfg.l[1])?;
            construct_xy3(&ctx, &x, &y, q)
        }
        name => {
            let l = LSet::parse(ctx, &cfg.l.join(","))?;
            let rel = resolve_relation(cfg, &l)?;
            match name {
                "square" => construct_square(&l, &rel, q),
                "threehalves" => construct_threehalves(&l, &rel, q),
                "fivethirds" => {
                    let seed = cfg
                        .seed
                        .ok_or_else(|| Error::Invalid("fivethirds requires a seed".into()))?;
                    construct_fivethirds(&l, &rel, q, seed)
                }
                other => Err(Error::Invalid(format!("unknown construction `{other}`"))),
            }
        }
    }
}

/// Run the experiment: one row per q, artifacts and a growth CSV when an
/// output directory is configured. Any construction or verification failure
/// aborts with the failing q identified.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<GrowthTable, Error> {
    if cfg.construction == "fivethirds" && cfg.seed.is_none() {
        return Err(Error::Invalid("fivethirds requires a seed".into()));
    }
    let mut qs = cfg.q_list.clone();
    if let Some((lo, hi)) = cfg.q_range {
        qs.extend((lo..=hi).filter(|&q| crate::qpoly::is_prime_u64(q)));
    }
    qs.sort_unstable();
    qs.dedup();
    if qs.is_empty() {
        return Err(Error::Invalid("no primes to run (set q_list or q_range)".into()));
    }
    let mut table = GrowthTable::default();
    for q in qs {
        let mut report = build_one(cfg, q)
            .map_err(|e| Error::Invalid(format!("construction failed at q = {q}: {e}")))?;
        report
            .verify()
            .map_err(|e| Error::Invariant(format!("verification failed at q = {q}: {e}")))?;
        match &cfg.cert {
            CertMode::Exact => {
                report.certify_exact()?;
            }
            CertMode::Modular(primes) => {
                report.certify_modular(primes)?;
            }
            CertMode::Bound => {}
        }
        if let Some(dir) = &cfg.out {
            let stem = format!("{}_q{q}", cfg.construction);
            write_artifact(&report, Path::new(dir), &stem)?;
        }
        table.rows.push(GrowthRow {
            q,
            size: report.matrix.rows(),
            rank_upper: report.rank_upper,
            rank_lower: report.rank_lower,
            rank_exact: report.rank_exact,
        });
    }
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(Path::new(dir).join("growth.csv"), table.to_csv())?;
    }
    Ok(table)
}
