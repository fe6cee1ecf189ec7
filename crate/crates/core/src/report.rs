//! End-to-end verification of one parameter set: every requested claim is
//! measured exhaustively and compared entrywise with its closed form.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::codes::{
    divisibility, enumerator_errata, expected_enumerator_for, expected_projective_spectrum, extend_multiset,
    generator_matrix, weight_enumerator_bruteforce, weight_enumerator_from_spectrum, GeneratorMatrix, Variant,
    WeightEnumerator,
};
use crate::errata::Erratum;
use crate::error::{Error, Result};
use crate::field::{Fe, FieldTower};
use crate::geometry::{
    double_counting_holds, enumerate_hyperplanes, hyperplane_count, intersection_sizes, minimality_report, spectrum,
    Mode, Spectrum,
};
use crate::quadric::{
    alpha_invariant, classify_quadric, n_census, reduce, sigma_census, Budget, Character, RankMethod,
};
use crate::varieties::{build_b, classify, expected_profile, profile_errata, ClassTag, ParamClass, Params};

pub const APPLICABILITY_OPEN: &str = "theorem-applicability-open";
pub const PAPER_ERRATUM: &str = "paper-erratum";

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub spectrum: bool,
    pub minimality: bool,
    pub code: bool,
    pub multiset: Option<u32>,
    pub oracle: bool,
    pub budget: Budget,
    pub timing: bool,
}

impl VerifyOptions {
    pub fn all(multiset: Option<u32>) -> Self {
        VerifyOptions { spectrum: true, minimality: true, code: true, multiset, oracle: true, ..Default::default() }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimCheck {
    pub claim: String,
    pub verdict: Verdict,
    pub expected: Value,
    pub measured: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsEcho {
    pub field: String,
    pub q: u64,
    pub r: usize,
    pub a: u32,
    pub b: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiset: Option<u32>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerificationReport {
    pub params: ParamsEcho,
    pub class: ParamClass,
    pub markers: Vec<String>,
    pub measured: BTreeMap<String, Value>,
    pub expected: BTreeMap<String, Value>,
    pub errata: Vec<Erratum>,
    pub checks: Vec<ClaimCheck>,
    /// False when the operation budget stopped the run early.
    pub complete: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub incomplete_reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<BTreeMap<String, u128>>,
    #[serde(skip)]
    pub matrix: Option<GeneratorMatrix>,
    #[serde(skip)]
    pub enumerator: Option<WeightEnumerator>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.complete && self.checks.iter().all(|c| c.verdict != Verdict::Fail)
    }

    pub fn check(&self, claim: &str) -> Option<&ClaimCheck> {
        self.checks.iter().find(|c| c.claim == claim)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    fn push(&mut self, claim: &str, expected: Value, measured: Value, note: Option<String>) {
        let verdict = if expected == measured { Verdict::Pass } else { Verdict::Fail };
        self.checks.push(ClaimCheck { claim: claim.into(), verdict, expected, measured, note });
    }

    fn skip(&mut self, claim: &str, why: &str) {
        self.checks.push(ClaimCheck {
            claim: claim.into(),
            verdict: Verdict::Skipped,
            expected: Value::Null,
            measured: Value::Null,
            note: Some(why.into()),
        });
    }

    fn add_errata(&mut self, errata: Vec<Erratum>) {
        if !errata.is_empty() && !self.markers.iter().any(|m| m == PAPER_ERRATUM) {
            self.markers.push(PAPER_ERRATUM.into());
        }
        self.errata.extend(errata);
    }
}

fn hist_json(h: &BTreeMap<u64, u64>) -> Value {
    serde_json::to_value(h).expect("histogram serializes")
}

fn has_profile(tag: ClassTag) -> bool {
    tag != ClassTag::QuasiHermitian
}

/// Runs the requested checks. A budget overrun ends the run with
/// `complete = false`; other errors are returned.
pub fn verify(params: &Params, opts: &VerifyOptions) -> Result<VerificationReport> {
    let class = classify(params);
    let t = &params.tower;
    let mut report = VerificationReport {
        params: ParamsEcho {
            field: t.field().descriptor().spec_string(),
            q: params.q(),
            r: params.r,
            a: params.a.enc(),
            b: params.b.enc(),
            multiset: opts.multiset,
        },
        class: class.clone(),
        markers: Vec::new(),
        measured: BTreeMap::new(),
        expected: BTreeMap::new(),
        errata: Vec::new(),
        checks: Vec::new(),
        complete: true,
        incomplete_reason: None,
        timing_ms: opts.timing.then(BTreeMap::new),
        matrix: None,
        enumerator: None,
    };
    if !t.eps_basis_available() {
        report.markers.push(APPLICABILITY_OPEN.into());
    }
    match run(params, &class, opts, &mut report) {
        Ok(()) => Ok(report),
        Err(e @ Error::BudgetExceeded { .. }) => {
            report.complete = false;
            report.incomplete_reason = Some(e.to_string());
            Ok(report)
        }
        Err(e) => Err(e),
    }
}

fn timed<T>(report: &mut VerificationReport, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    let out = f();
    if let Some(times) = report.timing_ms.as_mut() {
        times.insert(stage.into(), start.elapsed().as_millis());
    }
    out
}

fn run(params: &Params, class: &ParamClass, opts: &VerifyOptions, report: &mut VerificationReport) -> Result<()> {
    let t = &params.tower;
    let q = params.q();
    let q2 = q * q;
    let r = params.r;
    let base = q.pow(2 * r as u32 - 3);
    let profile = if has_profile(class.tag) { Some(expected_profile(class, params)?) } else { None };
    if let Some(p) = &profile {
        report.expected.insert("profile".into(), serde_json::to_value(p).expect("profile serializes"));
        report.add_errata(profile_errata(class, params)?);
    }

    let b = build_b(params);
    let size = b.size();
    report.measured.insert("set_size".into(), json!(size));
    report.push("set size", json!(q.pow(2 * r as u32 - 1)), json!(size), None);

    let hyperplanes = hyperplane_count(q2, r, Mode::Affine) as u128;
    let scan_cost = hyperplanes * (q2 as u128).pow(r as u32 - 1);

    if opts.spectrum {
        opts.budget.check(scan_cost)?;
        let (spec, through) = timed(report, "spectrum", || {
            let hs = enumerate_hyperplanes(t, r, Mode::Affine);
            let sizes = intersection_sizes(&b, &hs);
            let through: Vec<u64> = hs.iter().zip(&sizes).filter(|(h, _)| h.through_p_inf()).map(|(_, &s)| s).collect();
            Ok((Spectrum::from_sizes(Mode::Affine, &sizes), through))
        })?;
        report.measured.insert("affine_spectrum".into(), hist_json(&spec.histogram));
        report.push("double counting", json!(true), json!(double_counting_holds(&b, &spec)), None);
        let through_hist = Spectrum::from_sizes(Mode::Affine, &through).histogram;
        report.push(
            "hyperplanes through P_inf",
            hist_json(&BTreeMap::from([(base, through.len() as u64)])),
            hist_json(&through_hist),
            None,
        );
        match &profile {
            Some(p) => report.push("affine spectrum", hist_json(&p.affine_counts), hist_json(&spec.histogram), None),
            None => report.skip("affine spectrum", "no three-character claim for this class"),
        }
    }

    if opts.minimality {
        opts.budget.check(scan_cost)?;
        let m = timed(report, "minimality", || minimality_report(&b))?;
        report.measured.insert(
            "minimality".into(),
            json!({"t": m.t, "is_intersection_set": m.is_intersection_set, "is_minimal": m.is_minimal,
                   "witnesses": m.witnesses.len()}),
        );
        match &profile {
            Some(p) => report.push(
                "minimal intersection set",
                json!({"t": p.minimal_t, "minimal": true}),
                json!({"t": m.t, "minimal": m.is_minimal}),
                None,
            ),
            None => report.skip("minimal intersection set", "no minimality claim for this class"),
        }
    }

    let j = opts.multiset.unwrap_or(0);
    let multiset = (j > 0).then(|| extend_multiset(&b, j));
    if let Some(mb) = &multiset {
        opts.budget.check(scan_cost + (q2 as u128).pow(r as u32))?;
        let spec = timed(report, "multiset_spectrum", || Ok(spectrum(mb, Mode::Projective)))?;
        report.measured.insert("multiset_spectrum".into(), hist_json(&spec.histogram));
        report.push("multiset double counting", json!(true), json!(double_counting_holds(mb, &spec)), None);
        match &profile {
            Some(_) => {
                let want = expected_projective_spectrum(class, params, j as u64)?;
                report.push("multiset spectrum", hist_json(&want), hist_json(&spec.histogram), None);
            }
            None => report.skip("multiset spectrum", "no three-character claim for this class"),
        }
    }

    if opts.code {
        let target = multiset.as_ref().unwrap_or(&b);
        let g = generator_matrix(target)?;
        let brute = timed(report, "enumerator_bruteforce", || weight_enumerator_bruteforce(&g, opts.budget))?;
        opts.budget.check(scan_cost + (q2 as u128).pow(r as u32))?;
        let from_spec = timed(report, "enumerator_spectrum", || weight_enumerator_from_spectrum(target))?;
        report.measured.insert("enumerator".into(), hist_json(&brute.counts));
        report.push("enumerator: brute force vs spectrum", hist_json(&brute.counts), hist_json(&from_spec.counts), None);
        report.push("enumerator identities", json!(Vec::<String>::new()), json!(brute.identity_failures()), None);
        let nonzero = brute.nonzero_weights();
        let divides = divisibility(&brute).is_some_and(|d| d % q == 0);
        report.measured.insert("divisibility".into(), json!(divisibility(&brute)));
        report.push("weights divisible by q", json!(true), json!(divides), None);
        let variant = if j == 0 { Some(Variant::Bare) } else { Variant::for_multiplicity(j as u64, q, r) };
        let supported = match variant {
            Some(Variant::Bare) => matches!(class.tag, ClassTag::ThmA | ClassTag::ThmB | ClassTag::ThmC),
            Some(_) => class.tag.is_mb1(),
            None => false,
        };
        if profile.is_some() {
            let want = expected_enumerator_for(class, params, j as u64)?;
            report.expected.insert("enumerator".into(), hist_json(&want.counts));
            report.push("enumerator: closed form", hist_json(&want.counts), hist_json(&brute.counts), None);
        } else {
            report.skip("enumerator: closed form", "no enumerator claim for this class");
        }
        if let (Some(v), true) = (variant, supported) {
            let errata = enumerator_errata(class, params, v)?;
            let note = (!errata.is_empty()).then(|| "printed enumerator differs; see errata".to_string());
            report.add_errata(errata);
            let weights = if v == Variant::Bare { 4 } else { 3 };
            report.push("number of nonzero weights", json!(weights), json!(nonzero.len()), note);
        } else {
            report.skip("number of nonzero weights", "no weight-count claim for this class and multiplicity");
        }
        report.matrix = Some(g);
        report.enumerator = Some(brute);
    }

    if opts.oracle {
        oracle_checks(params, class, opts, report)?;
    }
    Ok(())
}

fn oracle_checks(params: &Params, class: &ParamClass, opts: &VerifyOptions, report: &mut VerificationReport) -> Result<()> {
    let t = &params.tower;
    if !t.eps_basis_available() {
        report.skip("quadric reduction", "no epsilon basis for q = 2");
        return Ok(());
    }
    if !has_profile(class.tag) {
        report.skip("quadric reduction", "no three-character claim for this class");
        return Ok(());
    }
    let q = params.q();
    let q2 = q * q;
    let r = params.r;
    let base = q.pow(2 * r as u32 - 3);
    let profile = expected_profile(class, params)?;

    let census = timed(report, "census", || n_census(params, opts.budget))?;
    report.measured.insert("quadric_census".into(), hist_json(&census));
    // planes through P∞ are not sections of the form x_r = Σ mᵢxᵢ + d
    let through = (q2.pow(r as u32) - 1) / (q2 - 1) - 1;
    let mut completed = census.clone();
    *completed.entry(base).or_insert(0) += through;
    report.push("quadric counts vs profile", hist_json(&profile.affine_counts), hist_json(&completed), None);

    if class.tag == ClassTag::ThmC {
        let s = sigma_census(params, class.tag, opts.budget)?;
        report.measured.insert("sigma_census".into(), serde_json::to_value(&s).expect("census serializes"));
        let ext = (q.pow(r as u32 + 1) - q.pow(r as u32)) / 2;
        report.push(
            "sigma census",
            json!({"sigma_plus": ext, "sigma_minus": ext, "other": 0}),
            json!({"sigma_plus": s.sigma_plus, "sigma_minus": s.sigma_minus, "other": s.other}),
            None,
        );
    }

    let zero = vec![Fe::ZERO; r - 1];
    let qc = classify_quadric(&reduce(params, &zero, Fe::ZERO)?, opts.budget)?;
    report.measured.insert("quadric_at_infinity".into(), serde_json::to_value(&qc.at_infinity).expect("serializes"));
    if class.tag.is_mb1() {
        report.push(
            "quadric at infinity is hyperbolic",
            json!(Character::Hyperbolic),
            json!(qc.at_infinity.character),
            None,
        );
    } else if qc.at_infinity.method == RankMethod::Exact {
        report.push("quadric at infinity has rank r-1", json!(r - 1), json!(qc.at_infinity.rank), None);
    }

    if class.tag == ClassTag::Mb1Even {
        let alpha = alpha_invariant(params, class.tag)?;
        let tr = t.absolute_trace(alpha)?;
        report.measured.insert("alpha".into(), json!({"alpha": alpha.enc(), "trace": tr.enc()}));
        report.push("alpha has trace 0", json!(0), json!(tr.enc()), None);
    }
    Ok(())
}

/// One row of the acceptance matrix run by `verify-all`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: &'static str,
    pub q: u32,
    pub r: usize,
    pub a: Option<u16>,
    pub b: u16,
    /// Searched instead of fixed when `a` is `None`.
    pub class: Option<ClassTag>,
    pub multiset: Option<u32>,
}

pub fn acceptance_matrix() -> Vec<Instance> {
    let inst = |name, q, r, a, b, class, multiset| Instance { name, q, r, a, b, class, multiset };
    vec![
        inst("thm-b q=3 r=3", 3, 3, Some(1), 3, None, None),
        inst("thm-c q=3 r=4", 3, 4, Some(1), 3, None, None),
        inst("thm-a q=5 r=3", 5, 3, None, 5, Some(ClassTag::ThmA), None),
        inst("mb1-odd q=3 r=4", 3, 4, Some(4), 3, None, None),
        inst("multiset j=4 q=2 r=4", 2, 4, Some(1), 2, None, Some(4)),
        inst("multiset j=28 q=2 r=4", 2, 4, Some(1), 2, None, Some(28)),
    ]
}

impl Instance {
    /// Resolves a searched `a`: the first nonzero a with the wanted class for this b.
    pub fn params(&self) -> Result<Params> {
        let t = Arc::new(FieldTower::for_q(self.q)?);
        let b = Fe(self.b);
        match (self.a, self.class) {
            (Some(a), _) => Params::new(t, self.r, Fe(a), b),
            (None, Some(tag)) => t
                .field()
                .elements()
                .filter(|a| !a.is_zero())
                .filter_map(|a| Params::new(t.clone(), self.r, a, b).ok())
                .find(|p| classify(p).tag == tag)
                .ok_or_else(|| Error::InvalidParams(format!("no {tag} parameter with b = {}", self.b))),
            (None, None) => Err(Error::InvalidParams("instance needs a or a class".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(q: u32, r: usize, a: u16, b: u16) -> Params {
        Params::new(Arc::new(FieldTower::for_q(q).unwrap()), r, Fe(a), Fe(b)).unwrap()
    }

    #[test]
    fn thmb_full_report_passes_with_errata() {
        let p = params(3, 3, 1, 3);
        let rep = verify(&p, &VerifyOptions::all(None)).unwrap();
        assert!(rep.passed(), "{}", rep.to_json());
        assert!(rep.markers.contains(&PAPER_ERRATUM.to_string()));
        assert_eq!(rep.measured["affine_spectrum"], json!({"9": 27, "27": 738, "36": 54}));
        assert!(rep.checks.iter().all(|c| c.verdict == Verdict::Pass));
    }

    #[test]
    fn reports_are_deterministic() {
        let p = params(3, 3, 1, 3);
        let opts = VerifyOptions::all(None);
        assert_eq!(verify(&p, &opts).unwrap().to_json(), verify(&p, &opts).unwrap().to_json());
    }

    #[test]
    fn budget_overrun_marks_report_incomplete() {
        let p = params(3, 3, 1, 3);
        let opts = VerifyOptions { spectrum: true, budget: Budget(10), ..Default::default() };
        let rep = verify(&p, &opts).unwrap();
        assert!(!rep.complete);
        assert!(!rep.passed());
        assert!(rep.incomplete_reason.unwrap().contains("budget"));
    }

    #[test]
    fn q2_report_is_marked_open() {
        let p = params(2, 4, 1, 2);
        let opts = VerifyOptions { spectrum: true, oracle: true, ..Default::default() };
        let rep = verify(&p, &opts).unwrap();
        assert!(rep.markers.contains(&APPLICABILITY_OPEN.to_string()));
        assert_eq!(rep.measured["affine_spectrum"], json!({"28": 128, "32": 84, "36": 128}));
        assert_eq!(rep.check("quadric reduction").unwrap().verdict, Verdict::Skipped);
    }

    #[test]
    fn quasi_hermitian_claims_are_skipped() {
        let t = Arc::new(FieldTower::for_q(3).unwrap());
        let p = crate::varieties::search_class(&t, 3, ClassTag::QuasiHermitian).unwrap();
        let rep = verify(&p, &VerifyOptions { spectrum: true, ..Default::default() }).unwrap();
        assert_eq!(rep.check("affine spectrum").unwrap().verdict, Verdict::Skipped);
        assert!(rep.passed());
    }

    #[test]
    fn searched_thm_a_instance() {
        let inst = &acceptance_matrix()[2];
        let p = inst.params().unwrap();
        assert_eq!(classify(&p).tag, ClassTag::ThmA);
        assert_eq!(p.tower.norm(p.a), p.tower.field().from_int(2));
    }
}
