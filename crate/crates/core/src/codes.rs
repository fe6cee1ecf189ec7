//! Projective codes generated by point multisets of PG(r, q²), and their
//! weight enumerators.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::errata::{pow_i, Erratum};
use crate::error::{Error, Result};
use crate::field::{Fe, FieldTower};
use crate::geometry::{spectrum, Mode, PointMultiset};
use crate::quadric::Budget;
use crate::varieties::{expected_profile, ClassTag, ParamClass, Params};

/// A k × n generator matrix over GF(q²), stored column by column.
#[derive(Clone, Debug)]
pub struct GeneratorMatrix {
    tower: Arc<FieldTower>,
    pub k: usize,
    pub columns: Vec<Vec<Fe>>,
}

impl GeneratorMatrix {
    pub fn from_columns(tower: Arc<FieldTower>, k: usize, columns: Vec<Vec<Fe>>) -> Result<Self> {
        if columns.iter().any(|c| c.len() != k) {
            return Err(Error::InvalidParams(format!("every column needs {k} entries")));
        }
        if columns.iter().any(|c| c.iter().any(|&x| !tower.field().contains(x))) {
            return Err(Error::InvalidParams("matrix entry outside the field".into()));
        }
        Ok(GeneratorMatrix { tower, k, columns })
    }

    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn row(&self, i: usize) -> Vec<Fe> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub fn rank(&self) -> usize {
        let mut seen = self.columns.clone();
        seen.sort();
        seen.dedup();
        rank(&self.tower, seen)
    }

    /// Header line, then one line of space-separated encodings per row.
    pub fn to_text(&self) -> String {
        let desc = self.tower.field().descriptor();
        let modulus: Vec<String> = desc.modulus.iter().map(|c| c.to_string()).collect();
        let mut out = format!("# q2={} modulus={} k={} n={}\n", desc.order(), modulus.join(","), self.k, self.n());
        for i in 0..self.k {
            let row: Vec<String> = self.columns.iter().map(|c| c[i].enc().to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

fn rank(t: &FieldTower, mut vecs: Vec<Vec<Fe>>) -> usize {
    let f = t.field();
    let Some(len) = vecs.first().map(Vec::len) else { return 0 };
    let mut rank = 0;
    for col in 0..len {
        let Some(p) = (rank..vecs.len()).find(|&i| !vecs[i][col].is_zero()) else { continue };
        vecs.swap(rank, p);
        let inv = f.inv(vecs[rank][col]).expect("nonzero pivot");
        let pivot: Vec<Fe> = vecs[rank].iter().map(|&x| f.mul(x, inv)).collect();
        for v in vecs.iter_mut().skip(rank + 1) {
            let c = v[col];
            if !c.is_zero() {
                for (x, &y) in v.iter_mut().zip(&pivot) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        rank += 1;
        if rank == len {
            break;
        }
    }
    rank
}

/// Columns are the normalized coordinates of the support points in
/// multiset order, each repeated by its multiplicity.
pub fn generator_matrix(s: &PointMultiset) -> Result<GeneratorMatrix> {
    let k = s.r() + 1;
    let support: Vec<Vec<Fe>> = s.iter().map(|(v, _)| v).collect();
    let got = rank(s.tower(), support);
    if got < k {
        return Err(Error::NotSpanning { rank: got, needed: k });
    }
    let columns = s.iter().flat_map(|(v, m)| std::iter::repeat_n(v, m as usize)).collect();
    GeneratorMatrix::from_columns(s.tower().clone(), k, columns)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightEnumerator {
    pub n: u64,
    pub k: u64,
    #[serde(skip)]
    pub q2: u64,
    #[serde(rename = "weights")]
    pub counts: BTreeMap<u64, u64>,
}

impl WeightEnumerator {
    pub fn new(n: u64, k: u64, q2: u64, counts: BTreeMap<u64, u64>) -> Self {
        WeightEnumerator { n, k, q2, counts }
    }

    pub fn total(&self) -> u128 {
        self.counts.values().map(|&c| c as u128).sum()
    }

    pub fn nonzero_weights(&self) -> Vec<u64> {
        self.counts.iter().filter(|(&w, &c)| w > 0 && c > 0).map(|(&w, _)| w).collect()
    }

    /// Violations of ΣAᵢ = Q^k, A₀ = 1, and Σ i·Aᵢ = n(Q−1)Q^{k−1}.
    pub fn identity_failures(&self) -> Vec<String> {
        let counts: Vec<(i128, i128)> = self.counts.iter().map(|(&w, &c)| (w as i128, c as i128)).collect();
        identity_failures(&counts, self.n as i128, self.k as i64, self.q2 as i128)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("enumerator serializes")
    }
}

fn identity_failures(counts: &[(i128, i128)], n: i128, k: i64, q2: i128) -> Vec<String> {
    let mut out = Vec::new();
    let total: i128 = counts.iter().map(|(_, c)| c).sum();
    let want = pow_i(q2, k);
    if total != want {
        out.push(format!("sum of A_i is {total}, expected {want}"));
    }
    let a0: i128 = counts.iter().filter(|(w, _)| *w == 0).map(|(_, c)| c).sum();
    if a0 != 1 {
        out.push(format!("A_0 is {a0}, expected 1"));
    }
    let mean: i128 = counts.iter().map(|(w, c)| w * c).sum();
    let want = n * (q2 - 1) * pow_i(q2, k - 1);
    if mean != want {
        out.push(format!("sum of i*A_i is {mean}, expected {want}"));
    }
    if let Some((w, _)) = counts.iter().find(|(w, c)| *c != 0 && (*w < 0 || *w > n)) {
        out.push(format!("weight {w} outside [0, {n}]"));
    }
    out
}

/// Enumerates all Q^k messages. The last row is handled in closed form: for
/// each prefix codeword p, column j vanishes for exactly one multiple λ of
/// the last row when w_j ≠ 0, and for every λ when w_j = p_j = 0.
pub fn weight_enumerator_bruteforce(g: &GeneratorMatrix, budget: Budget) -> Result<WeightEnumerator> {
    let t = &g.tower;
    let f = t.field();
    let q2 = t.q2() as u64;
    let (k, n) = (g.k, g.n());
    if k == 0 {
        return Err(Error::InvalidParams("generator matrix has no rows".into()));
    }
    let prefixes = (q2 as u128).pow(k as u32 - 1);
    budget.check(prefixes * n as u128 * k as u128)?;
    let rows: Vec<Vec<Fe>> = (0..k - 1).map(|i| g.row(i)).collect();
    let last = g.row(k - 1);
    // −1/w_j, or None for w_j = 0
    let neg_inv: Vec<Option<Fe>> = last.iter().map(|&w| f.inv(w).ok().map(|x| f.neg(x))).collect();
    let hist = (0..prefixes as u64)
        .into_par_iter()
        .fold(
            || vec![0u64; n + 1],
            |mut hist, code| {
                let mut c = code;
                let mut p = vec![Fe::ZERO; n];
                for row in rows.iter().rev() {
                    let m = Fe((c % q2) as u16);
                    c /= q2;
                    if !m.is_zero() {
                        for (x, &y) in p.iter_mut().zip(row) {
                            *x = f.add(*x, f.mul(m, y));
                        }
                    }
                }
                let mut zeros = vec![0usize; q2 as usize];
                let mut always = 0usize;
                for (j, &pj) in p.iter().enumerate() {
                    match neg_inv[j] {
                        Some(ni) => zeros[f.mul(pj, ni).idx()] += 1,
                        None if pj.is_zero() => always += 1,
                        None => {}
                    }
                }
                for z in zeros {
                    hist[n - always - z] += 1;
                }
                hist
            },
        )
        .reduce(
            || vec![0u64; n + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let counts = hist.into_iter().enumerate().filter(|(_, c)| *c > 0).map(|(w, c)| (w as u64, c)).collect();
    Ok(WeightEnumerator::new(n as u64, k as u64, q2, counts))
}

/// Each projective hyperplane meeting S in s points (with multiplicity)
/// accounts for Q−1 codewords of weight |S|−s.
pub fn weight_enumerator_from_spectrum(s: &PointMultiset) -> Result<WeightEnumerator> {
    let k = s.r() + 1;
    let got = rank(s.tower(), s.iter().map(|(v, _)| v).collect());
    if got < k {
        return Err(Error::NotSpanning { rank: got, needed: k });
    }
    let spec = spectrum(s, Mode::Projective);
    Ok(enumerator_from_hyperplane_counts(s.size(), k as u64, s.tower().q2() as u64, &spec.histogram))
}

/// Which code of a parameter set is meant: the bare set, or the set
/// completed by P∞ with multiplicity j₁ = q^{r−1}−q^{r−2} or
/// j₂ = q^{2r−3}−q^{r−2}.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Bare,
    MultisetJ1,
    MultisetJ2,
}

impl Variant {
    pub fn multiplicity(self, q: u64, r: usize) -> u64 {
        let r = r as u32;
        match self {
            Variant::Bare => 0,
            Variant::MultisetJ1 => q.pow(r - 1) - q.pow(r - 2),
            Variant::MultisetJ2 => q.pow(2 * r - 3) - q.pow(r - 2),
        }
    }

    /// The variant whose multiplicity is `j`, if any.
    pub fn for_multiplicity(j: u64, q: u64, r: usize) -> Option<Variant> {
        [Variant::MultisetJ1, Variant::MultisetJ2].into_iter().find(|v| v.multiplicity(q, r) == j)
    }

    fn supports(self, tag: ClassTag) -> bool {
        match self {
            Variant::Bare => matches!(tag, ClassTag::ThmA | ClassTag::ThmB | ClassTag::ThmC),
            _ => tag.is_mb1(),
        }
    }
}

/// Weight → count as printed, with non-integral subscripts left as `None`.
pub type PrintedWeights = Vec<(Option<i128>, i128)>;

/// Literal transcription of the printed enumerators, known misprints included.
pub fn printed_enumerator(tag: ClassTag, variant: Variant, q: u64, r: usize) -> Result<PrintedWeights> {
    if !variant.supports(tag) {
        return Err(Error::Unsupported(format!("no printed enumerator for {tag} with {variant:?}")));
    }
    let q = q as i128;
    let r = r as i64;
    let p = |e: i64| pow_i(q, e);
    let half = |num: i64| (num % 2 == 0 && num >= 0).then(|| p(num / 2));
    let q2 = q * q;
    let n = p(2 * r - 1);
    let base = n - p(2 * r - 3);
    let mut out = vec![(Some(0), 1)];
    match (tag, variant) {
        (ClassTag::ThmA, _) => {
            let (s, l) = (half(3 * r - 5), half(3 * (r - 1)));
            out.extend([
                (Some(n), q2 - 1),
                (s.zip(l).map(|(s, l)| base - l + s), (p(r + 1) - p(r)) * (q2 - 1)),
                (Some(base), p(2 * r) - q2 + (p(2 * r) - p(r + 1)) * (q2 - 1)),
                (s.map(|s| base + s), p(r + 2) - p(r)),
            ]);
        }
        (ClassTag::ThmB, _) => {
            let (s, l) = (half(3 * r - 5), half(3 * (r - 1)));
            out.extend([
                (Some(n), q2 - 1),
                (s.map(|s| base - s), (p(r + 1) - p(r)) * (q2 - 1)),
                (Some(base), p(2 * r) - q2 - p(r + 1) * (q2 - 1)),
                (s.zip(l).map(|(s, l)| base + l - s), p(r + 2) - p(r)),
            ]);
        }
        (ClassTag::ThmC, _) => {
            let s = half(3 * r - 4);
            let ext = (p(r + 1) - p(r)) * (q2 - 1) / 2;
            out.extend([
                (Some(n), q2 - 1),
                (s.map(|s| base + s), ext),
                (s.map(|s| base - s), ext),
                (Some(base), p(2 * r) + p(r + 2) - p(r) - q2 + (p(2 * r) - p(r + 1)) * (q2 - 1)),
            ]);
        }
        (_, Variant::MultisetJ1) => out.extend([
            (Some(n), q2 - 1),
            (Some(base), p(2 * r) - 1 + p(2 * r - 1) * (q2 - 1)),
            (Some(base + p(r - 1)), (p(2 * r) - p(2 * r - 1) - 1) * (q2 - 1)),
        ]),
        (_, Variant::MultisetJ2) => out.extend([
            (Some(n), p(2 * r) - 1),
            (Some(base), (q2 - 1) * p(2 * r - 1)),
            (Some(n - p(r - 1)), p(2 * r - 1) * (q - 1) * (q2 - 1)),
        ]),
        _ => unreachable!("variant support checked above"),
    }
    Ok(out)
}

/// Projective spectrum of the set completed by P∞ with multiplicity j, as
/// implied by the corrected affine profile. Affine hyperplanes through P∞
/// all meet the set in q^{2r−3} points, so they gain j; Π∞ meets it in j.
pub fn expected_projective_spectrum(class: &ParamClass, params: &Params, j: u64) -> Result<BTreeMap<u64, u64>> {
    let profile = expected_profile(class, params)?;
    let q2 = params.q() * params.q();
    let base = params.q().pow(2 * params.r as u32 - 3);
    let through_p_inf = (q2.pow(params.r as u32) - 1) / (q2 - 1) - 1;
    let mut hist = BTreeMap::new();
    let mut add = |c: u64, planes: u64| {
        if planes > 0 {
            *hist.entry(c).or_insert(0) += planes;
        }
    };
    add(j, 1);
    for (&c, &planes) in &profile.affine_counts {
        if c == base {
            add(c + j, through_p_inf);
            add(c, planes - through_p_inf);
        } else {
            add(c, planes);
        }
    }
    Ok(hist)
}

/// A₀ = 1 plus Q−1 codewords of weight n−s per hyperplane meeting the
/// multiset in s points.
pub fn enumerator_from_hyperplane_counts(n: u64, k: u64, q2: u64, hist: &BTreeMap<u64, u64>) -> WeightEnumerator {
    let mut counts = BTreeMap::from([(0u64, 1u64)]);
    for (&s, &planes) in hist {
        *counts.entry(n - s).or_insert(0) += planes * (q2 - 1);
    }
    WeightEnumerator::new(n, k, q2, counts)
}

/// Enumerator of the set completed with P∞ of multiplicity j (j = 0 for
/// the bare set), implied by the corrected profile.
pub fn expected_enumerator_for(class: &ParamClass, params: &Params, j: u64) -> Result<WeightEnumerator> {
    let hist = expected_projective_spectrum(class, params, j)?;
    let q = params.q();
    let n = q.pow(2 * params.r as u32 - 1) + j;
    Ok(enumerator_from_hyperplane_counts(n, params.r as u64 + 1, q * q, &hist))
}

pub fn expected_enumerator(class: &ParamClass, params: &Params, variant: Variant) -> Result<WeightEnumerator> {
    if !variant.supports(class.tag) {
        return Err(Error::Unsupported(format!("no enumerator for {} with {variant:?}", class.tag)));
    }
    expected_enumerator_for(class, params, variant.multiplicity(params.q(), params.r))
}

/// Compares the printed enumerator with the corrected one and records the
/// structural identities the printed version breaks.
pub fn enumerator_errata(class: &ParamClass, params: &Params, variant: Variant) -> Result<Vec<Erratum>> {
    let printed = printed_enumerator(class.tag, variant, params.q(), params.r)?;
    let expected = expected_enumerator(class, params, variant)?;
    let mut merged: BTreeMap<Option<i128>, i128> = BTreeMap::new();
    for (w, c) in &printed {
        *merged.entry(*w).or_insert(0) += c;
    }
    let mut failed = Vec::new();
    let evaluable: Vec<(i128, i128)> = merged.iter().filter_map(|(w, c)| w.map(|w| (w, *c))).collect();
    if evaluable.len() != merged.len() {
        failed.push("a weight exponent is not a non-negative integer".into());
    }
    failed.extend(identity_failures(&evaluable, expected.n as i128, expected.k as i64, expected.q2 as i128));
    let printed_map: BTreeMap<String, i64> = merged
        .iter()
        .filter(|(_, &c)| c != 0)
        .map(|(w, &c)| (w.map_or("unevaluable".to_string(), |w| w.to_string()), c as i64))
        .collect();
    let corrected: BTreeMap<String, i64> = expected.counts.iter().map(|(w, &c)| (w.to_string(), c as i64)).collect();
    let printed_sorted: BTreeMap<i128, i128> = evaluable.iter().filter(|(_, c)| *c != 0).copied().collect();
    let corrected_sorted: BTreeMap<i128, i128> =
        expected.counts.iter().map(|(&w, &c)| (w as i128, c as i128)).collect();
    if failed.is_empty() && printed_sorted == corrected_sorted {
        return Ok(Vec::new());
    }
    if failed.is_empty() {
        failed.push("disagrees with the enumerator implied by the hyperplane counts".into());
    }
    let what = match variant {
        Variant::Bare => format!("{} weight enumerator", class.tag),
        v => format!("{} multiset weight enumerator, j = {}", class.tag, v.multiplicity(params.q(), params.r)),
    };
    Ok(vec![Erratum { claim: what, printed: printed_map, corrected, failed_checks: failed }])
}

/// The affine set with P∞ = (0,…,0,1) added with multiplicity j.
pub fn extend_multiset(s: &PointMultiset, j: u32) -> PointMultiset {
    let mut out = s.clone();
    if j > 0 {
        let mut p_inf = vec![Fe::ZERO; s.r() + 1];
        p_inf[s.r()] = Fe::ONE;
        out.insert_projective(&p_inf, j).expect("P∞ is a point");
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Largest Δ dividing every nonzero weight, or `None` for the zero code.
pub fn divisibility(w: &WeightEnumerator) -> Option<u64> {
    let d = w.nonzero_weights().into_iter().fold(0, gcd);
    (d > 0).then_some(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::varieties::{build_b, classify};

    fn tower(q: u32) -> Arc<FieldTower> {
        Arc::new(FieldTower::for_q(q).unwrap())
    }

    fn counts(pairs: &[(u64, u64)]) -> BTreeMap<u64, u64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn repetition_code() {
        let t = tower(3);
        let g = GeneratorMatrix::from_columns(t, 1, vec![vec![Fe::ONE]; 3]).unwrap();
        let w = weight_enumerator_bruteforce(&g, Budget::default()).unwrap();
        assert_eq!(w.counts, counts(&[(0, 1), (3, 8)]));
        assert!(w.identity_failures().is_empty());
        assert_eq!(divisibility(&w), Some(3));
    }

    #[test]
    fn frame_points_give_full_rank() {
        let t = tower(3);
        let mut s = PointMultiset::new(t.clone(), 3);
        for i in 0..4 {
            let mut v = vec![Fe::ZERO; 4];
            v[i] = Fe::ONE;
            s.insert_projective(&v, 1).unwrap();
        }
        let g = generator_matrix(&s).unwrap();
        assert_eq!((g.k, g.n(), g.rank()), (4, 4, 4));
        // the [4,4] code over GF(9) is the whole space
        let w = weight_enumerator_bruteforce(&g, Budget::default()).unwrap();
        assert_eq!(w.counts, counts(&[(0, 1), (1, 32), (2, 384), (3, 2048), (4, 4096)]));
    }

    #[test]
    fn non_spanning_set_is_refused() {
        let t = tower(3);
        let mut s = PointMultiset::new(t, 3);
        s.insert_affine(&[Fe(0), Fe(0), Fe(0)], 1);
        s.insert_affine(&[Fe(1), Fe(0), Fe(0)], 1);
        assert_eq!(generator_matrix(&s).unwrap_err(), Error::NotSpanning { rank: 2, needed: 4 });
        assert!(matches!(weight_enumerator_from_spectrum(&s), Err(Error::NotSpanning { .. })));
    }

    #[test]
    fn thmb_code_three_ways() {
        let t = tower(3);
        let p = Params::new(t, 3, Fe(1), Fe(3)).unwrap();
        let class = classify(&p);
        let b = build_b(&p);
        let g = generator_matrix(&b).unwrap();
        assert_eq!((g.k, g.n(), g.rank()), (4, 243, 4));
        let brute = weight_enumerator_bruteforce(&g, Budget::default()).unwrap();
        let spec = weight_enumerator_from_spectrum(&b).unwrap();
        let closed = expected_enumerator(&class, &p, Variant::Bare).unwrap();
        let want = counts(&[(0, 1), (207, 432), (216, 5904), (234, 216), (243, 8)]);
        assert_eq!(brute.counts, want);
        assert_eq!(spec, brute);
        assert_eq!(closed, brute);
        assert_eq!(divisibility(&brute), Some(9));
        assert_eq!(brute.nonzero_weights().len(), 4);
    }

    #[test]
    fn thmb_printed_middle_coefficient_is_flagged() {
        let t = tower(3);
        let p = Params::new(t, 3, Fe(1), Fe(3)).unwrap();
        let errata = enumerator_errata(&classify(&p), &p, Variant::Bare).unwrap();
        assert_eq!(errata.len(), 1);
        assert_eq!(errata[0].printed["216"], 72);
        assert_eq!(errata[0].corrected["216"], 5904);
        assert!(errata[0].failed_checks.iter().any(|s| s.starts_with("sum of A_i")));
    }

    #[test]
    fn thmc_printed_enumerator_is_consistent() {
        let t = tower(3);
        let p = Params::new(t, 4, Fe(1), Fe(3)).unwrap();
        let class = classify(&p);
        assert!(enumerator_errata(&class, &p, Variant::Bare).unwrap().is_empty());
        let w = expected_enumerator(&class, &p, Variant::Bare).unwrap();
        assert_eq!(w.counts[&(2187 - 243)], 57744);
        assert!(w.identity_failures().is_empty());
    }

    #[test]
    fn multiset_with_j18_has_expected_shape() {
        let t = tower(3);
        let p = Params::new(t, 4, Fe(4), Fe(3)).unwrap();
        let b = extend_multiset(&build_b(&p), 18);
        assert_eq!(b.size(), 2205);
        let g = generator_matrix(&b).unwrap();
        assert_eq!((g.k, g.n()), (5, 2205));
        assert_eq!(Variant::for_multiplicity(18, 3, 4), Some(Variant::MultisetJ1));
    }

    #[test]
    fn generic_multiplicity_gives_four_weights() {
        let t = tower(3);
        let p = Params::new(t, 4, Fe(4), Fe(3)).unwrap();
        let w = weight_enumerator_from_spectrum(&extend_multiset(&build_b(&p), 1)).unwrap();
        assert_eq!(w.nonzero_weights().len(), 4);
        assert!(w.identity_failures().is_empty());
    }

    #[test]
    fn multiset_codes_at_q2() {
        let t = tower(2);
        let p = Params::new(t, 4, Fe(1), Fe(2)).unwrap();
        let class = classify(&p);
        let b = build_b(&p);
        for (variant, want) in [
            (Variant::MultisetJ1, counts(&[(0, 1), (96, 636), (104, 384), (128, 3)])),
            (Variant::MultisetJ2, counts(&[(0, 1), (96, 252), (120, 384), (128, 387)])),
        ] {
            let j = variant.multiplicity(2, 4) as u32;
            let s = extend_multiset(&b, j);
            let brute = weight_enumerator_bruteforce(&generator_matrix(&s).unwrap(), Budget::default()).unwrap();
            assert_eq!(brute.counts, want);
            assert_eq!(weight_enumerator_from_spectrum(&s).unwrap(), brute);
            assert_eq!(expected_enumerator(&class, &p, variant).unwrap(), brute);
            assert_eq!(brute.nonzero_weights().len(), 3);
        }
        assert_eq!(divisibility(&expected_enumerator(&class, &p, Variant::MultisetJ1).unwrap()), Some(8));
    }

    #[test]
    fn matrix_export_format() {
        let t = tower(3);
        let g = GeneratorMatrix::from_columns(t, 2, vec![vec![Fe(1), Fe(0)], vec![Fe(1), Fe(8)]]).unwrap();
        assert_eq!(g.to_text(), "# q2=9 modulus=1,0,1 k=2 n=2\n1 1\n0 8\n");
    }

    #[test]
    fn enumerator_json_shape() {
        let w = WeightEnumerator::new(3, 1, 9, counts(&[(0, 1), (3, 8)]));
        assert_eq!(w.to_json(), r#"{"n":3,"k":1,"weights":{"0":1,"3":8}}"#);
    }

    #[test]
    fn budget_is_enforced() {
        let t = tower(3);
        let p = Params::new(t, 3, Fe(1), Fe(3)).unwrap();
        let g = generator_matrix(&build_b(&p)).unwrap();
        assert!(matches!(weight_enumerator_bruteforce(&g, Budget(1000)), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn unsupported_combinations() {
        let t = tower(3);
        let p = Params::new(t, 3, Fe(1), Fe(3)).unwrap();
        let class = classify(&p);
        assert!(matches!(expected_enumerator(&class, &p, Variant::MultisetJ1), Err(Error::Unsupported(_))));
        assert!(printed_enumerator(ClassTag::Mb1Odd, Variant::Bare, 3, 4).is_err());
    }
}
