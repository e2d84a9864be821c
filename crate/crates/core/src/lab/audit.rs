//! Sampling audit over random domains.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::classify::{self, IndependenceVariant, ProblemClass, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::model::{Literal, Problem, MIN_ATTRIBUTES};

use super::sample::{sample_distribution, Family, AUDIT_MAX_ATTRIBUTES};
use super::{lemma_gaps, product_condition_gap, GapBranch, LemmaGaps};

pub const DEFAULT_TOLERANCE_GRID: [f64; 4] = [1e-12, 1e-9, 1e-6, 1e-3];

pub const ROWS_FILE: &str = "audit_rows.csv";
pub const SUMMARY_FILE: &str = "audit_summary.csv";

const ROW_HEADER: [&str; 17] = [
    "dist_id",
    "family",
    "seed",
    "k",
    "class_strict",
    "class_hfalse",
    "class_symmetric",
    "ci_gap_htrue",
    "ci_gap_hfalse",
    "marginal_gap",
    "m1_gap_max",
    "m1_gap_mean",
    "m2_gap_max",
    "m2_gap_mean",
    "cf_gap_max",
    "cf_gap_mean",
    "skipped_assignments",
];

const SUMMARY_HEADER: [&str; 6] = [
    "lemma",
    "variant",
    "tolerance",
    "class",
    "consistent_count",
    "inconsistent_count",
];

/// Label for rows whose hypothesis marginal is degenerate.
const UNCLASSIFIED: &str = "Unclassified";

#[derive(Debug, Clone, PartialEq)]
pub struct AuditConfig {
    pub families: Vec<Family>,
    /// Distributions per family.
    pub count: usize,
    pub k: usize,
    pub seed: u64,
    pub tolerances: Vec<f64>,
    /// Tolerance for the per-row class columns.
    pub class_tolerance: f64,
    /// Worker threads; `None` lets rayon decide. Results do not depend on it.
    pub threads: Option<usize>,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self {
            families: vec![Family::Dirichlet],
            count: 100,
            k: 3,
            seed: 0,
            tolerances: DEFAULT_TOLERANCE_GRID.to_vec(),
            class_tolerance: DEFAULT_TOLERANCE,
            threads: None,
        }
    }
}

impl AuditConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.families.is_empty() {
            return bad("no families given".into());
        }
        if !(MIN_ATTRIBUTES..=AUDIT_MAX_ATTRIBUTES).contains(&self.k) {
            return bad(format!(
                "audit attribute count must lie in {MIN_ATTRIBUTES}..={AUDIT_MAX_ATTRIBUTES}, got {}",
                self.k
            ));
        }
        if let Some(f) = self.families.iter().find(|f| f.min_attributes() > self.k) {
            return bad(format!("family {f} needs at least {} attributes", f.min_attributes()));
        }
        if self.tolerances.is_empty() {
            return bad("empty tolerance grid".into());
        }
        let positive = |t: &f64| t.is_finite() && *t > 0.0;
        if !self.tolerances.iter().all(positive) || !positive(&self.class_tolerance) {
            return bad("tolerances must be positive and finite".into());
        }
        if self.threads == Some(0) {
            return bad("thread count must be positive".into());
        }
        Ok(())
    }
}

/// One sampled distribution. Hypothesis is attribute 0.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditRow {
    pub dist_id: usize,
    pub family: Family,
    pub seed: u64,
    pub k: usize,
    /// Conditional-independence gap per variant, in `IndependenceVariant::ALL`
    /// order; `None` when the required hypothesis marginal is zero.
    pub ci_gaps: [Option<f64>; 3],
    pub marginal_gap: f64,
    /// Classes at `class_tolerance`, same order as `ci_gaps`.
    pub classes: [Option<ProblemClass>; 3],
    /// `None` when no evidence assignment could be evaluated.
    pub lemma: Option<LemmaGaps<f64>>,
    /// Largest MB / MD product-condition gap over same-direction literal pairs.
    pub product_gap_mb: Option<f64>,
    pub product_gap_md: Option<f64>,
    pub skipped_assignments: usize,
}

impl AuditRow {
    fn ci_gap(&self, variant: IndependenceVariant) -> Option<f64> {
        self.ci_gaps[variant_pos(variant)]
    }

    /// Class under `variant` at an arbitrary tolerance.
    pub fn class_at(&self, variant: IndependenceVariant, tol: f64) -> Option<ProblemClass> {
        self.ci_gap(variant)
            .map(|ci| ProblemClass::from_gaps(&ci, &self.marginal_gap, &tol))
    }

    pub fn class(&self, variant: IndependenceVariant) -> Option<ProblemClass> {
        self.classes[variant_pos(variant)]
    }

    /// Largest gap for a lemma, if any assignment was evaluable.
    pub fn max_gap(&self, lemma: Lemma) -> Option<f64> {
        self.lemma.as_ref().map(|g| match lemma {
            Lemma::Mb => g.m1_max,
            Lemma::Md => g.m2_max,
            Lemma::Cf => g.cf_max,
        })
    }
}

fn variant_pos(variant: IndependenceVariant) -> usize {
    IndependenceVariant::ALL
        .iter()
        .position(|&v| v == variant)
        .expect("listed variant")
}

/// The three consistency claims: MB stream, MD stream, and CF jointly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lemma {
    Mb,
    Md,
    Cf,
}

impl Lemma {
    pub const ALL: [Lemma; 3] = [Self::Mb, Self::Md, Self::Cf];

    pub fn label(self) -> &'static str {
        match self {
            Self::Mb => "lemma1",
            Self::Md => "lemma2",
            Self::Cf => "lemma3",
        }
    }
}

/// Contingency cell: rows of `class` (under `variant` at `tolerance`) split by
/// whether the lemma's largest gap is within `tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub lemma: Lemma,
    pub variant: IndependenceVariant,
    pub tolerance: f64,
    /// `None` for rows that could not be classified.
    pub class: Option<ProblemClass>,
    pub consistent_count: usize,
    pub inconsistent_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub config: AuditConfig,
    pub rows: Vec<AuditRow>,
    pub summary: Vec<SummaryRow>,
}

fn max_product_gaps(dist: &crate::JointDistribution<f64>, problem: &Problem) -> (Option<f64>, Option<f64>) {
    let mut mb: Option<f64> = None;
    let mut md: Option<f64> = None;
    let ev = problem.evidence();
    for (i, &x) in ev.iter().enumerate() {
        for &y in &ev[i + 1..] {
            for (vx, vy) in [(true, true), (true, false), (false, true), (false, false)] {
                let (a, b) = (Literal::new(x, vx), Literal::new(y, vy));
                for (branch, slot) in [(GapBranch::Mb, &mut mb), (GapBranch::Md, &mut md)] {
                    if let Ok(g) = product_condition_gap(dist, problem, a, b, branch) {
                        *slot = Some(slot.map_or(g, |s| s.max(g)));
                    }
                }
            }
        }
    }
    (mb, md)
}

fn audit_row(config: &AuditConfig, dist_id: usize, family: Family, seed: u64) -> Result<AuditRow> {
    let dist = sample_distribution(family, config.k, seed)?;
    let problem = Problem::new(dist.space(), 0)?;
    let ci_gaps = IndependenceVariant::ALL.map(|v| classify::conditional_independence_gap(&dist, &problem, v).ok());
    let marginal_gap = classify::marginal_independence_gap(&dist, &problem)?;
    let classes = ci_gaps.map(|ci| ci.map(|g| ProblemClass::from_gaps(&g, &marginal_gap, &config.class_tolerance)));
    let lemma = match lemma_gaps(&dist, &problem) {
        Ok(g) => Some(g),
        Err(Error::EverythingSkipped | Error::ZeroProbabilityEvidence) => None,
        Err(e) => return Err(e),
    };
    let skipped_assignments = lemma.as_ref().map_or(problem.num_full_assignments(), |g| g.skipped);
    let (product_gap_mb, product_gap_md) = max_product_gaps(&dist, &problem);
    Ok(AuditRow {
        dist_id,
        family,
        seed,
        k: config.k,
        ci_gaps,
        marginal_gap,
        classes,
        lemma,
        product_gap_mb,
        product_gap_md,
        skipped_assignments,
    })
}

fn summarize(config: &AuditConfig, rows: &[AuditRow]) -> Vec<SummaryRow> {
    let classes: Vec<Option<ProblemClass>> = ProblemClass::ALL
        .into_iter()
        .map(Some)
        .chain(std::iter::once(None))
        .collect();
    let mut out = Vec::new();
    for lemma in Lemma::ALL {
        for variant in IndependenceVariant::ALL {
            for &tol in &config.tolerances {
                for &class in &classes {
                    let members = rows.iter().filter(|r| r.class_at(variant, tol) == class);
                    let (mut consistent, mut inconsistent) = (0, 0);
                    for row in members {
                        match row.max_gap(lemma) {
                            Some(g) if g <= tol => consistent += 1,
                            _ => inconsistent += 1,
                        }
                    }
                    out.push(SummaryRow {
                        lemma,
                        variant,
                        tolerance: tol,
                        class,
                        consistent_count: consistent,
                        inconsistent_count: inconsistent,
                    });
                }
            }
        }
    }
    out
}

/// Samples `count` distributions per family and measures every row.
/// Row `i` of a family uses seed `config.seed + i` (wrapping); `dist_id`
/// runs across families in the order given.
pub fn audit(config: &AuditConfig) -> Result<AuditReport> {
    config.validate()?;
    let jobs: Vec<(usize, Family, u64)> = config
        .families
        .iter()
        .enumerate()
        .flat_map(|(fi, &family)| {
            (0..config.count).map(move |i| (fi * config.count + i, family, config.seed.wrapping_add(i as u64)))
        })
        .collect();
    let run = || -> Result<Vec<AuditRow>> {
        jobs.par_iter()
            .map(|&(id, family, seed)| audit_row(config, id, family, seed))
            .collect()
    };
    let rows = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    let summary = summarize(config, &rows);
    Ok(AuditReport {
        config: config.clone(),
        rows,
        summary,
    })
}

/// Shortest round-trip form; tiny gaps come out as e.g. `2.7755575615628914e-17`.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn class_label(c: Option<ProblemClass>) -> &'static str {
    c.map_or(UNCLASSIFIED, ProblemClass::label)
}

fn to_csv(header: &[&str], records: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in records {
        w.write_record(&r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

impl AuditReport {
    /// Per-distribution CSV. Unavailable values are empty fields.
    pub fn rows_csv(&self) -> String {
        to_csv(
            &ROW_HEADER,
            self.rows.iter().map(|r| {
                let g = r.lemma.as_ref();
                vec![
                    r.dist_id.to_string(),
                    r.family.label().to_string(),
                    r.seed.to_string(),
                    r.k.to_string(),
                    class_label(r.class(IndependenceVariant::HTrue)).to_string(),
                    class_label(r.class(IndependenceVariant::HFalse)).to_string(),
                    class_label(r.class(IndependenceVariant::Symmetric)).to_string(),
                    opt(r.ci_gap(IndependenceVariant::HTrue)),
                    opt(r.ci_gap(IndependenceVariant::HFalse)),
                    num(r.marginal_gap),
                    opt(g.map(|g| g.m1_max)),
                    opt(g.map(|g| g.m1_mean)),
                    opt(g.map(|g| g.m2_max)),
                    opt(g.map(|g| g.m2_mean)),
                    opt(g.map(|g| g.cf_max)),
                    opt(g.map(|g| g.cf_mean)),
                    r.skipped_assignments.to_string(),
                ]
            }),
        )
    }

    /// Contingency tables, one line per (lemma, variant, tolerance, class).
    pub fn summary_csv(&self) -> String {
        to_csv(
            &SUMMARY_HEADER,
            self.summary.iter().map(|s| {
                vec![
                    s.lemma.label().to_string(),
                    s.variant.label().to_string(),
                    crate::text::tolerance(s.tolerance),
                    class_label(s.class).to_string(),
                    s.consistent_count.to_string(),
                    s.inconsistent_count.to_string(),
                ]
            }),
        )
    }

    /// Writes both CSVs into `dir`, returning their paths.
    pub fn write_to(&self, dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let rows = dir.join(ROWS_FILE);
        let summary = dir.join(SUMMARY_FILE);
        std::fs::write(&rows, self.rows_csv())?;
        std::fs::write(&summary, self.summary_csv())?;
        Ok((rows, summary))
    }

    /// Fraction of rows passing the weak-decomposability test under
    /// `variant` at `tol`.
    pub fn weakly_decomposable_fraction(&self, variant: IndependenceVariant, tol: f64) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        let hits = self
            .rows
            .iter()
            .filter(|r| {
                r.class_at(variant, tol)
                    .is_some_and(ProblemClass::is_weakly_decomposable)
            })
            .count();
        hits as f64 / self.rows.len() as f64
    }

    /// Short human-readable digest.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "rows={} k={}", self.rows.len(), self.config.k);
        for &tol in &self.config.tolerances {
            for v in IndependenceVariant::ALL {
                let _ = writeln!(
                    s,
                    "tol={tol:e} variant={v} weakly_decomposable_fraction={}",
                    self.weakly_decomposable_fraction(v, tol)
                );
            }
        }
        s
    }
}
