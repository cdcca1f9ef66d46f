//! Sweeps: bucket forms by audible invariants, split buckets into isometry
//! classes, and escalate spectra on buckets holding several classes.

use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeMap;
use std::hash::{Hash, Hasher};
use std::fmt::Write as _;
use std::path::Path;

use ffqlat_core::algebra::{Field, FieldConfig};
use ffqlat_core::isometry::{canonical_form, isometric};
use ffqlat_core::localdata::genus_symbol;
use ffqlat_core::qform::{adjoint, reduce, GramLattice, LatticeFile};
use ffqlat_core::spectrum::{enumerate_spectrum, Spectrum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SearchConfig;
use crate::enumerate::{config_patterns, stratum_forms, Coverage, Stratum};
use crate::error::{HarnessError, Result};

/// Which theorem covers a minima pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseLabel {
    /// Strictly increasing, `mu_1 = mu_2 (mod 2)`.
    Case1,
    /// Strictly increasing, `mu_2 = mu_3 != mu_1 (mod 2)`: the adjoint has
    /// minima `(mu_1+mu_2, mu_1+mu_3, mu_2+mu_3)`, which is case 1.
    Case1Adjoint,
    /// `mu_1 = mu_2` or `mu_2 = mu_3`.
    Case2,
    /// Strictly increasing, `mu_1 = mu_3 (mod 2)`; needs a large field.
    Case3,
    Unary,
    Binary,
    Quaternary,
}

pub fn case_label(minima: &[u32]) -> CaseLabel {
    match *minima {
        [_] => CaseLabel::Unary,
        [_, _] => CaseLabel::Binary,
        [a, b, c] if a == b || b == c => CaseLabel::Case2,
        [a, b, _] if a % 2 == b % 2 => CaseLabel::Case1,
        [a, _, c] if a % 2 == c % 2 => CaseLabel::Case3,
        [_, _, _] => CaseLabel::Case1Adjoint,
        _ => CaseLabel::Quaternary,
    }
}

/// `q > max{2 + mu_3 - mu_2, 2 + mu_2 - mu_1}`, for case-3 patterns only.
pub fn q_condition(minima: &[u32], q: u32) -> Option<bool> {
    (case_label(minima) == CaseLabel::Case3).then(|| {
        let (a, b, c) = (minima[0], minima[1], minima[2]);
        q > (2 + c - b).max(2 + b - a)
    })
}

/// Patterns where a theorem predicts that isospectral forms are isometric.
/// Rank 1 and 2 are classical; rank 4 is open territory.
pub fn in_scope(minima: &[u32], q: u32) -> bool {
    match case_label(minima) {
        CaseLabel::Quaternary => false,
        CaseLabel::Case3 => q_condition(minima, q) == Some(true),
        _ => true,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FindingKind {
    /// Non-isometric, equal spectra up to the escalation cap.
    Isospectral,
    /// Equal spectra up to `bound`, where the budget stopped escalation.
    Undecided,
}

/// A group of pairwise non-isometric forms with equal spectra up to `bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub kind: FindingKind,
    pub minima: Vec<u32>,
    pub in_scope: bool,
    pub bound: u32,
    pub forms: Vec<LatticeFile>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjointTally {
    pub checks: u64,
    pub mismatches: u64,
    pub undecided: u64,
}

impl AdjointTally {
    fn add(&mut self, o: &AdjointTally) {
        self.checks += o.checks;
        self.mismatches += o.mismatches;
        self.undecided += o.undecided;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumReport {
    pub minima: Vec<u32>,
    pub case: CaseLabel,
    pub q_condition: Option<bool>,
    pub in_scope: bool,
    pub coverage: Coverage,
    pub forms: u64,
    pub initial_bound: u32,
    pub cap: u32,
    pub buckets: u64,
    pub classes: u64,
    /// Buckets holding more than one isometry class.
    pub escalated_buckets: u64,
    /// Pairs of forms with equal spectra up to the bound they were compared at.
    pub isospectral_pairs: u64,
    /// Same-class pairs confirmed by a verified isometry witness.
    pub isometry_checks: u64,
    pub isometry_failures: u64,
    pub adjoint: AdjointTally,
    pub findings: Vec<Finding>,
}

impl StratumReport {
    fn count(&self, kind: FindingKind) -> usize {
        self.findings.iter().filter(|x| x.kind == kind).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub field: FieldConfig,
    pub rank: usize,
    pub max_mu: u32,
    pub strata: Vec<StratumReport>,
    pub in_scope_findings: usize,
    pub out_of_scope_findings: usize,
    pub undecided_in_scope: usize,
    pub adjoint_mismatches: u64,
    pub isometry_failures: u64,
}

impl VerificationReport {
    fn new(cfg: &SearchConfig, strata: Vec<StratumReport>) -> VerificationReport {
        let sum = |g: &dyn Fn(&StratumReport) -> usize| strata.iter().map(g).sum::<usize>();
        VerificationReport {
            field: cfg.field.clone(),
            rank: cfg.rank,
            max_mu: cfg.max_mu,
            in_scope_findings: sum(&|s| if s.in_scope { s.count(FindingKind::Isospectral) } else { 0 }),
            out_of_scope_findings: sum(&|s| if s.in_scope { 0 } else { s.count(FindingKind::Isospectral) }),
            undecided_in_scope: sum(&|s| if s.in_scope { s.count(FindingKind::Undecided) } else { 0 }),
            adjoint_mismatches: strata.iter().map(|s| s.adjoint.mismatches).sum(),
            isometry_failures: strata.iter().map(|s| s.isometry_failures).sum(),
            strata,
        }
    }

    pub fn claim_holds(&self) -> bool {
        self.in_scope_findings == 0 && self.adjoint_mismatches == 0 && self.isometry_failures == 0
    }

    /// 0 holds, 1 violated, 2 undecided at the budget.
    pub fn exit_code(&self) -> i32 {
        if !self.claim_holds() {
            1
        } else if self.undecided_in_scope > 0 {
            2
        } else {
            0
        }
    }

    pub fn findings(&self) -> impl Iterator<Item = &Finding> {
        self.strata.iter().flat_map(|s| &s.findings)
    }

    pub fn summary_table(&self) -> String {
        let mut s = String::new();
        let q = self.field.p.pow(self.field.e);
        let _ = writeln!(s, "q = {q}, rank {}, mu_n <= {}", self.rank, self.max_mu);
        let _ = writeln!(
            s,
            "{:<12} {:<14} {:<6} {:<10} {:>8} {:>8} {:>8} {:>6} {:>10} {:>9} {:>9}",
            "minima", "case", "scope", "coverage", "forms", "buckets", "classes", "esc", "iso-pairs", "findings", "undecided"
        );
        for r in &self.strata {
            let scope = match (r.in_scope, r.q_condition) {
                (true, _) => "in",
                (false, Some(false)) => "q-low",
                (false, _) => "open",
            };
            let cov = match r.coverage {
                Coverage::Exhaustive => "all".to_string(),
                Coverage::Sampled { diagonals } => format!("{diagonals} diag"),
            };
            let _ = writeln!(
                s,
                "{:<12} {:<14} {:<6} {:<10} {:>8} {:>8} {:>8} {:>6} {:>10} {:>9} {:>9}",
                format!("{:?}", r.minima),
                serde_json::to_value(r.case).unwrap().as_str().unwrap(),
                scope,
                cov,
                r.forms,
                r.buckets,
                r.classes,
                r.escalated_buckets,
                r.isospectral_pairs,
                r.count(FindingKind::Isospectral),
                r.count(FindingKind::Undecided)
            );
        }
        let verdict = match self.exit_code() {
            0 => "claim holds",
            1 => "CLAIM VIOLATED",
            _ => "undecided at budget",
        };
        let _ = writeln!(
            s,
            "in-scope findings {}, out-of-scope findings {}, undecided {}, adjoint mismatches {}: {verdict}",
            self.in_scope_findings, self.out_of_scope_findings, self.undecided_in_scope, self.adjoint_mismatches
        );
        s
    }
}

fn pairs(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

fn spectrum_key(s: &Spectrum) -> String {
    serde_json::to_string(&s.counts).expect("serializable")
}

/// Bound for comparing adjoint spectra after the originals agreed up to `b`:
/// the same excess over the top minimum.
pub fn adjoint_bound(minima: &[u32], adj_minima: &[u32], b: u32) -> u32 {
    adj_minima.last().unwrap() + b.saturating_sub(*minima.last().unwrap())
}

fn compare_adjoints(a: &GramLattice, b: &GramLattice, bound: u32, cfg: &SearchConfig, f: &Field) -> Result<AdjointTally> {
    let mut t = AdjointTally { checks: 1, ..Default::default() };
    let (ra, _) = reduce(&adjoint(a, f)?, f)?;
    let (rb, _) = reduce(&adjoint(b, f)?, f)?;
    let adj_bound = adjoint_bound(a.minima().unwrap(), ra.minima().unwrap(), bound);
    let sa = enumerate_spectrum(&ra, adj_bound, cfg.spectrum_budget, f);
    let sb = enumerate_spectrum(&rb, adj_bound, cfg.spectrum_budget, f);
    match (sa, sb) {
        (Ok(x), Ok(y)) => t.mismatches += (x != y) as u64,
        (Err(ffqlat_core::Error::BudgetExceeded { .. }), _) | (_, Err(ffqlat_core::Error::BudgetExceeded { .. })) => {
            t.undecided += 1
        }
        (Err(e), _) | (_, Err(e)) => return Err(e.into()),
    }
    Ok(t)
}

#[derive(Default)]
struct BucketOutcome {
    classes: u64,
    escalated: bool,
    isospectral_pairs: u64,
    isometry_checks: u64,
    isometry_failures: u64,
    adjoint: AdjointTally,
    findings: Vec<Finding>,
}

fn process_bucket(
    forms: &[&GramLattice],
    canon: &[&str],
    minima: &[u32],
    cfg: &SearchConfig,
    f: &Field,
) -> Result<BucketOutcome> {
    let mut out = BucketOutcome::default();
    let b0 = cfg.initial_bound_for(minima);
    let cap = cfg.cap_for(minima);
    let q = f.q();
    let mut classes: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, c) in canon.iter().enumerate() {
        classes.entry(c).or_default().push(i);
    }
    let classes: Vec<Vec<usize>> = classes.into_values().collect();
    out.classes = classes.len() as u64;
    for members in &classes {
        if members.len() > 1 {
            let (a, b) = (forms[members[0]], forms[*members.last().unwrap()]);
            out.isometry_checks += 1;
            if isometric(a, b, f)?.is_none() {
                out.isometry_failures += 1;
            }
            out.adjoint.add(&compare_adjoints(a, b, b0, cfg, f)?);
        }
    }
    if classes.len() == 1 {
        out.isospectral_pairs = pairs(forms.len() as u64);
        return Ok(out);
    }
    out.escalated = true;
    let reps: Vec<&GramLattice> = classes.iter().map(|m| forms[m[0]]).collect();
    let size = |g: &[usize]| g.iter().map(|&i| classes[i].len() as u64).sum::<u64>();
    let mut groups: Vec<Vec<usize>> = vec![(0..reps.len()).collect()];
    let mut stopped: Vec<(Vec<usize>, u32)> = Vec::new();
    for b in b0 + 1..=cap {
        let mut next = Vec::new();
        for g in groups {
            if g.len() < 2 {
                next.push(g);
                continue;
            }
            let specs: std::result::Result<Vec<Spectrum>, _> =
                g.iter().map(|&i| enumerate_spectrum(reps[i], b, cfg.spectrum_budget, f)).collect();
            match specs {
                Ok(specs) => {
                    let mut split: BTreeMap<String, Vec<usize>> = BTreeMap::new();
                    for (&i, s) in g.iter().zip(&specs) {
                        split.entry(spectrum_key(s)).or_default().push(i);
                    }
                    next.extend(split.into_values());
                }
                Err(ffqlat_core::Error::BudgetExceeded { .. }) => stopped.push((g, b - 1)),
                Err(e) => return Err(e.into()),
            }
        }
        groups = next;
    }
    let scope = in_scope(minima, q);
    let finding = |kind, g: &[usize], bound| Finding {
        kind,
        minima: minima.to_vec(),
        in_scope: scope,
        bound,
        forms: g.iter().map(|&i| reps[i].to_file(f)).collect(),
    };
    for g in &groups {
        out.isospectral_pairs += pairs(size(g));
        if g.len() > 1 {
            out.findings.push(finding(FindingKind::Isospectral, g, cap));
            for &i in &g[1..] {
                out.adjoint.add(&compare_adjoints(reps[g[0]], reps[i], cap, cfg, f)?);
            }
        }
    }
    for (g, b) in &stopped {
        out.isospectral_pairs += pairs(size(g));
        out.findings.push(finding(FindingKind::Undecided, g, *b));
    }
    Ok(out)
}

/// Hash of the audible invariants: minima, genus symbol (which carries the
/// determinant class) and the spectrum up to `bound`. A collision only
/// merges buckets, which the class split then undoes.
pub fn bucket_key(l: &GramLattice, bound: u32, cfg: &SearchConfig, f: &Field) -> Result<u64> {
    let mut h = DefaultHasher::new();
    l.minima().hash(&mut h);
    genus_symbol(l, f)?.hash(&mut h);
    enumerate_spectrum(l, bound, cfg.spectrum_budget, f)?.counts.hash(&mut h);
    Ok(h.finish())
}

/// Sweeps one minima pattern.
pub fn run_stratum(minima: &[u32], cfg: &SearchConfig, f: &Field) -> Result<StratumReport> {
    let st = Stratum::new(minima, f);
    let (coverage, forms) = stratum_forms(&st, cfg, f)?;
    let b0 = cfg.initial_bound_for(minima);
    let keyed: Vec<(u64, String)> = forms
        .par_iter()
        .map(|l| Ok((bucket_key(l, b0, cfg, f)?, canonical_form(l, f)?.to_json(f))))
        .collect::<Result<_>>()?;
    let mut buckets: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, (k, _)) in keyed.iter().enumerate() {
        buckets.entry(*k).or_default().push(i);
    }
    let buckets: Vec<Vec<usize>> = buckets.into_values().collect();
    let outcomes: Vec<BucketOutcome> = buckets
        .par_iter()
        .map(|idx| {
            let fs: Vec<&GramLattice> = idx.iter().map(|&i| &forms[i]).collect();
            let cs: Vec<&str> = idx.iter().map(|&i| keyed[i].1.as_str()).collect();
            process_bucket(&fs, &cs, minima, cfg, f)
        })
        .collect::<Result<_>>()?;
    let mut r = StratumReport {
        minima: minima.to_vec(),
        case: case_label(minima),
        q_condition: q_condition(minima, f.q()),
        in_scope: in_scope(minima, f.q()),
        coverage,
        forms: forms.len() as u64,
        initial_bound: b0,
        cap: cfg.cap_for(minima),
        buckets: buckets.len() as u64,
        classes: 0,
        escalated_buckets: 0,
        isospectral_pairs: 0,
        isometry_checks: 0,
        isometry_failures: 0,
        adjoint: AdjointTally::default(),
        findings: Vec::new(),
    };
    for o in outcomes {
        r.classes += o.classes;
        r.escalated_buckets += o.escalated as u64;
        r.isospectral_pairs += o.isospectral_pairs;
        r.isometry_checks += o.isometry_checks;
        r.isometry_failures += o.isometry_failures;
        r.adjoint.add(&o.adjoint);
        r.findings.extend(o.findings);
    }
    Ok(r)
}

/// On-disk progress: the config it belongs to and the finished strata.
#[derive(Serialize, Deserialize)]
struct Checkpoint {
    config: SearchConfig,
    strata: Vec<StratumReport>,
}

fn checkpoint_error(path: &Path, msg: impl Into<String>) -> HarnessError {
    HarnessError::Checkpoint { path: path.display().to_string(), msg: msg.into() }
}

fn load_checkpoint(path: &Path, cfg: &SearchConfig) -> Result<Vec<StratumReport>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = std::fs::read_to_string(path)?;
    let cp: Checkpoint = serde_json::from_str(&text).map_err(|e| checkpoint_error(path, format!("corrupt: {e}")))?;
    if serde_json::to_value(&cp.config)? != serde_json::to_value(cfg)? {
        return Err(checkpoint_error(path, "written by a different configuration"));
    }
    Ok(cp.strata)
}

fn store_checkpoint(path: &Path, cfg: &SearchConfig, strata: &[StratumReport]) -> Result<()> {
    let cp = Checkpoint { config: cfg.clone(), strata: strata.to_vec() };
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serde_json::to_vec(&cp)?)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Runs every stratum of the config, resuming from and updating the
/// checkpoint when one is configured. `stop_after` ends the run early
/// after that many newly computed strata.
pub fn verify_theorems_with(cfg: &SearchConfig, stop_after: Option<usize>) -> Result<VerificationReport> {
    cfg.validate()?;
    let f = cfg.field()?;
    let mut done = match &cfg.checkpoint {
        Some(p) => load_checkpoint(p, cfg)?,
        None => Vec::new(),
    };
    let mut fresh = 0;
    let mut strata = Vec::new();
    for p in config_patterns(cfg) {
        if let Some(pos) = done.iter().position(|s| s.minima == p) {
            strata.push(done.swap_remove(pos));
            continue;
        }
        if stop_after.is_some_and(|k| fresh >= k) {
            break;
        }
        strata.push(run_stratum(&p, cfg, &f)?);
        fresh += 1;
        if let Some(path) = &cfg.checkpoint {
            store_checkpoint(path, cfg, &strata)?;
        }
    }
    Ok(VerificationReport::new(cfg, strata))
}

pub fn verify_theorems(cfg: &SearchConfig) -> Result<VerificationReport> {
    verify_theorems_with(cfg, None)
}

/// Non-isometric forms with equal spectra up to the escalation cap, over
/// every stratum of the config, in stratum order.
pub fn search_isospectral(cfg: &SearchConfig) -> Result<Vec<Finding>> {
    let report = verify_theorems(cfg)?;
    Ok(report.findings().filter(|x| x.kind == FindingKind::Isospectral).cloned().collect())
}

/// One JSON object per line.
pub fn findings_jsonl<'a>(findings: impl IntoIterator<Item = &'a Finding>) -> Result<String> {
    let mut s = String::new();
    for x in findings {
        s.push_str(&serde_json::to_string(x)?);
        s.push('\n');
    }
    Ok(s)
}
