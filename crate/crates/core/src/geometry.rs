//! Points, hyperplanes and incidence in AG(r,q²) ⊂ PG(r,q²).
//!
//! Projective coordinates are `(X₀, X₁, …, X_r)` with the hyperplane at
//! infinity `X₀ = 0`; affine points are written `(1, x₁, …, x_r)`. Every
//! vector is normalized so that its first nonzero entry is 1.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, Field, FieldTower};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Affine,
    Projective,
}

/// (Q^n − 1)/(Q − 1): points of PG(n−1, Q).
pub fn gaussian_count(q2: u64, n: u32) -> u64 {
    (q2.pow(n) - 1) / (q2 - 1)
}

/// Number of hyperplanes of PG(r,q²), or of AG(r,q²) in affine mode.
pub fn hyperplane_count(q2: u64, r: usize, mode: Mode) -> u64 {
    let all = gaussian_count(q2, r as u32 + 1);
    match mode {
        Mode::Projective => all,
        Mode::Affine => all - 1,
    }
}

/// Scales `v` so its first nonzero entry is 1; `None` for the zero vector.
pub fn normalize(f: &Field, v: &[Fe]) -> Option<Vec<Fe>> {
    let lead = *v.iter().find(|x| !x.is_zero())?;
    let inv = f.inv(lead).ok()?;
    Some(v.iter().map(|&x| f.mul(x, inv)).collect())
}

fn digits(mut n: u64, base: u64, len: usize) -> Vec<Fe> {
    let mut out = vec![Fe::ZERO; len];
    for slot in out.iter_mut().rev() {
        *slot = Fe((n % base) as u16);
        n /= base;
    }
    out
}

/// All normalized nonzero vectors of length `len`, in lexicographic order of
/// their encodings.
pub fn normalized_vectors(q2: u64, len: usize) -> impl Iterator<Item = Vec<Fe>> {
    (0..len).rev().flat_map(move |lead| {
        let tail = len - lead - 1;
        (0..q2.pow(tail as u32)).map(move |n| {
            let mut v = vec![Fe::ZERO; lead];
            v.push(Fe::ONE);
            v.extend(digits(n, q2, tail));
            v
        })
    })
}

/// Points of AG(r,q²) as `r` affine coordinates, or of PG(r,q²) as `r+1`
/// normalized homogeneous coordinates, in lexicographic order.
pub fn enumerate_points(tower: &FieldTower, r: usize, mode: Mode) -> Box<dyn Iterator<Item = Vec<Fe>>> {
    let q2 = tower.q2() as u64;
    match mode {
        Mode::Affine => Box::new((0..q2.pow(r as u32)).map(move |n| digits(n, q2, r))),
        Mode::Projective => Box::new(normalized_vectors(q2, r + 1)),
    }
}

/// Σ aᵢXᵢ = 0 with a normalized coefficient vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Hyperplane {
    pub form: Vec<Fe>,
}

impl Hyperplane {
    pub fn at_infinity(r: usize) -> Self {
        let mut form = vec![Fe::ZERO; r + 1];
        form[0] = Fe::ONE;
        Hyperplane { form }
    }

    pub fn from_form(f: &Field, form: &[Fe]) -> Option<Self> {
        normalize(f, form).map(|form| Hyperplane { form })
    }

    /// x_r = m₁x₁ + … + m_{r−1}x_{r−1} + d.
    pub fn from_affine(f: &Field, m: &[Fe], d: Fe) -> Self {
        let mut form = Vec::with_capacity(m.len() + 2);
        form.push(f.neg(d));
        form.extend(m.iter().map(|&x| f.neg(x)));
        form.push(Fe::ONE);
        Hyperplane::from_form(f, &form).expect("coefficient of X_r is 1")
    }

    pub fn r(&self) -> usize {
        self.form.len() - 1
    }

    pub fn is_at_infinity(&self) -> bool {
        self.form[0] == Fe::ONE && self.form[1..].iter().all(|x| x.is_zero())
    }

    /// Whether P∞ = (0,…,0,1) lies on the plane.
    pub fn through_p_inf(&self) -> bool {
        self.form.last().unwrap().is_zero()
    }

    /// `(m, d)` with x_r = Σ mᵢxᵢ + d, when the X_r coefficient is nonzero.
    pub fn affine_view(&self, f: &Field) -> Option<(Vec<Fe>, Fe)> {
        let ar = *self.form.last().unwrap();
        let inv = f.inv(ar).ok()?;
        let scale = |x: Fe| f.neg(f.mul(x, inv));
        let r = self.r();
        Some((self.form[1..r].iter().map(|&x| scale(x)).collect(), scale(self.form[0])))
    }

    pub fn encodings(&self) -> Vec<u32> {
        self.form.iter().map(|x| x.enc()).collect()
    }
}

/// Projective hyperplanes with Π∞ first, then the rest in lexicographic order;
/// affine mode omits Π∞.
pub fn enumerate_hyperplanes(tower: &FieldTower, r: usize, mode: Mode) -> Vec<Hyperplane> {
    let inf = Hyperplane::at_infinity(r);
    let rest = normalized_vectors(tower.q2() as u64, r + 1)
        .map(|form| Hyperplane { form })
        .filter(|h| !h.is_at_infinity());
    match mode {
        Mode::Projective => std::iter::once(inf).chain(rest).collect(),
        Mode::Affine => rest.collect(),
    }
}

/// Projective incidence; `point` has r+1 homogeneous coordinates.
pub fn incidence(f: &Field, point: &[Fe], h: &Hyperplane) -> bool {
    point
        .iter()
        .zip(&h.form)
        .fold(Fe::ZERO, |acc, (&x, &a)| f.add(acc, f.mul(x, a)))
        .is_zero()
}

pub fn incidence_affine(f: &Field, point: &[Fe], h: &Hyperplane) -> bool {
    let rest = point.iter().zip(&h.form[1..]).fold(h.form[0], |acc, (&x, &a)| f.add(acc, f.mul(x, a)));
    rest.is_zero()
}

/// Point multiset of PG(r,q²), split into a dense affine part and a sparse
/// part on Π∞.
#[derive(Clone, Debug)]
pub struct PointMultiset {
    tower: Arc<FieldTower>,
    r: usize,
    affine: Vec<u32>,
    infinity: BTreeMap<Vec<Fe>, u32>,
}

impl PointMultiset {
    pub fn new(tower: Arc<FieldTower>, r: usize) -> Self {
        let n = (tower.q2() as usize).pow(r as u32);
        PointMultiset { tower, r, affine: vec![0; n], infinity: BTreeMap::new() }
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn affine_index(&self, x: &[Fe]) -> usize {
        let q2 = self.tower.q2() as usize;
        x.iter().fold(0usize, |acc, v| acc * q2 + v.idx())
    }

    pub fn affine_point(&self, idx: usize) -> Vec<Fe> {
        digits(idx as u64, self.tower.q2() as u64, self.r)
    }

    pub fn insert_affine(&mut self, x: &[Fe], mult: u32) {
        assert_eq!(x.len(), self.r, "affine point has wrong dimension");
        let i = self.affine_index(x);
        self.affine[i] += mult;
    }

    /// Inserts a point given by r+1 homogeneous coordinates (any scaling).
    pub fn insert_projective(&mut self, coords: &[Fe], mult: u32) -> Result<()> {
        assert_eq!(coords.len(), self.r + 1, "projective point has wrong dimension");
        let v = normalize(self.tower.field(), coords)
            .ok_or_else(|| Error::InvalidParams("zero vector is not a point".into()))?;
        if v[0] == Fe::ONE {
            self.insert_affine(&v[1..], mult);
        } else {
            *self.infinity.entry(v).or_insert(0) += mult;
        }
        Ok(())
    }

    pub fn affine_mult(&self, x: &[Fe]) -> u32 {
        self.affine[self.affine_index(x)]
    }

    pub fn projective_mult(&self, coords: &[Fe]) -> u32 {
        match normalize(self.tower.field(), coords) {
            Some(v) if v[0] == Fe::ONE => self.affine_mult(&v[1..]),
            Some(v) => self.infinity.get(&v).copied().unwrap_or(0),
            None => 0,
        }
    }

    /// Σ multiplicities.
    pub fn size(&self) -> u64 {
        self.affine.iter().map(|&m| m as u64).sum::<u64>() + self.infinity.values().map(|&m| m as u64).sum::<u64>()
    }

    pub fn support_len(&self) -> usize {
        self.affine.iter().filter(|&&m| m > 0).count() + self.infinity.len()
    }

    pub fn is_affine(&self) -> bool {
        self.infinity.is_empty()
    }

    pub fn is_set(&self) -> bool {
        self.affine.iter().all(|&m| m <= 1) && self.infinity.values().all(|&m| m == 1)
    }

    pub fn affine_multiplicities(&self) -> &[u32] {
        &self.affine
    }

    pub fn infinity_points(&self) -> &BTreeMap<Vec<Fe>, u32> {
        &self.infinity
    }

    /// Support points as normalized homogeneous coordinates with their
    /// multiplicities, in lexicographic order (points on Π∞ first).
    pub fn iter(&self) -> impl Iterator<Item = (Vec<Fe>, u32)> + '_ {
        let inf = self.infinity.iter().map(|(k, &m)| (k.clone(), m));
        let aff = self.affine.iter().enumerate().filter(|(_, &m)| m > 0).map(move |(i, &m)| {
            let mut v = vec![Fe::ONE];
            v.extend(self.affine_point(i));
            (v, m)
        });
        inf.chain(aff)
    }

    pub fn affine_points(&self) -> impl Iterator<Item = Vec<Fe>> + '_ {
        self.affine.iter().enumerate().filter(|(_, &m)| m > 0).map(|(i, _)| self.affine_point(i))
    }
}

impl PartialEq for PointMultiset {
    fn eq(&self, other: &Self) -> bool {
        self.r == other.r
            && self.tower.field() == other.tower.field()
            && self.affine == other.affine
            && self.infinity == other.infinity
    }
}

/// Walks the affine points of a hyperplane ≠ Π∞ as runs of consecutive
/// affine indices `(start, len)`.
///
/// The pivot is the last coordinate with a nonzero coefficient; coordinates
/// after it are free and are the least significant digits of the index.
fn for_each_affine_run(f: &Field, r: usize, h: &Hyperplane, mut visit: impl FnMut(usize, usize)) {
    let q2 = f.order();
    let pivot = (1..=r).rev().find(|&j| !h.form[j].is_zero()).expect("hyperplane is not Π∞");
    let inv = f.inv(h.form[pivot]).expect("nonzero pivot");
    let coef = |i: usize| f.neg(f.mul(h.form[i], inv));
    // x_pivot = c₀ + Σ_{i<pivot} cᵢxᵢ
    let c: Vec<Fe> = (0..pivot).map(coef).collect();
    let run = q2.pow((r - pivot) as u32);
    let weight = |i: usize| q2.pow((r - i) as u32);
    let wp = weight(pivot);

    fn rec(
        f: &Field,
        c: &[Fe],
        level: usize,
        pivot: usize,
        value: Fe,
        idx: usize,
        weights: &[usize],
        wp: usize,
        run: usize,
        visit: &mut dyn FnMut(usize, usize),
    ) {
        if level == pivot {
            visit(idx + value.idx() * wp, run);
            return;
        }
        let w = weights[level];
        for x in f.elements() {
            let v = f.add(value, f.mul(c[level], x));
            rec(f, c, level + 1, pivot, v, idx + x.idx() * w, weights, wp, run, visit);
        }
    }

    let weights: Vec<usize> = (0..=r).map(|i| if i == 0 { 0 } else { weight(i) }).collect();
    rec(f, &c, 1, pivot, c[0], 0, &weights, wp, run, &mut visit);
}

/// Calls `visit` with every affine point index lying on `h`.
pub fn for_each_affine_point_on(f: &Field, r: usize, h: &Hyperplane, mut visit: impl FnMut(usize)) {
    if h.is_at_infinity() {
        return;
    }
    for_each_affine_run(f, r, h, |start, len| (start..start + len).for_each(&mut visit));
}

/// Intersection sizes of `s` with each hyperplane, in the given order.
pub fn intersection_sizes(s: &PointMultiset, hyperplanes: &[Hyperplane]) -> Vec<u64> {
    let f = s.tower.field();
    let mut prefix = Vec::with_capacity(s.affine.len() + 1);
    prefix.push(0u64);
    let mut acc = 0u64;
    for &m in &s.affine {
        acc += m as u64;
        prefix.push(acc);
    }
    hyperplanes
        .par_iter()
        .map(|h| {
            let mut total: u64 = s
                .infinity
                .iter()
                .filter(|(p, _)| incidence(f, p, h))
                .map(|(_, &m)| m as u64)
                .sum();
            if !h.is_at_infinity() {
                for_each_affine_run(f, s.r, h, |start, len| total += prefix[start + len] - prefix[start]);
            }
            total
        })
        .collect()
}

/// Histogram of hyperplane intersection sizes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spectrum {
    pub mode: Mode,
    pub histogram: BTreeMap<u64, u64>,
}

impl Spectrum {
    pub fn from_sizes(mode: Mode, sizes: &[u64]) -> Self {
        let mut histogram = BTreeMap::new();
        for &s in sizes {
            *histogram.entry(s).or_insert(0) += 1;
        }
        Spectrum { mode, histogram }
    }

    pub fn total(&self) -> u64 {
        self.histogram.values().sum()
    }

    /// Σ size·count.
    pub fn incidence_sum(&self) -> u64 {
        self.histogram.iter().map(|(s, c)| s * c).sum()
    }

    pub fn characters(&self) -> Vec<u64> {
        self.histogram.keys().copied().collect()
    }

    pub fn merge(&mut self, other: &Spectrum) {
        for (&s, &c) in &other.histogram {
            *self.histogram.entry(s).or_insert(0) += c;
        }
    }
}

pub fn spectrum(s: &PointMultiset, mode: Mode) -> Spectrum {
    let hs = enumerate_hyperplanes(&s.tower, s.r, mode);
    Spectrum::from_sizes(mode, &intersection_sizes(s, &hs))
}

/// Checks Σ_H |H ∩ S| = |S|·#(hyperplanes on a point) over projective
/// hyperplanes; an affine spectrum is completed with the Π∞ row.
pub fn double_counting_holds(s: &PointMultiset, spec: &Spectrum) -> bool {
    let q2 = s.tower.q2() as u64;
    let per_point = gaussian_count(q2, s.r as u32);
    let mut sum = spec.incidence_sum();
    if spec.mode == Mode::Affine {
        sum += s.infinity.values().map(|&m| m as u64).sum::<u64>();
    }
    spec.total() == hyperplane_count(q2, s.r, spec.mode) && sum == s.size() * per_point
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Vec<u32>,
    pub hyperplane: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalityReport {
    pub t: u64,
    pub is_intersection_set: bool,
    pub is_minimal: bool,
    /// One t-hyperplane per point, populated only when minimal.
    pub witnesses: Vec<Witness>,
}

/// Minimum affine-hyperplane intersection `t` and whether every point of `s`
/// lies on some hyperplane meeting `s` in exactly `t` points.
pub fn minimality_report(s: &PointMultiset) -> Result<MinimalityReport> {
    if !s.is_affine() || !s.is_set() {
        return Err(Error::InvalidParams("minimality needs an affine set with multiplicities 1".into()));
    }
    if s.size() == 0 {
        return Err(Error::EmptySet);
    }
    let f = s.tower.field();
    let hs = enumerate_hyperplanes(&s.tower, s.r, Mode::Affine);
    let sizes = intersection_sizes(s, &hs);
    let t = *sizes.iter().min().expect("at least one hyperplane");
    let mut witness: Vec<Option<usize>> = vec![None; s.affine.len()];
    let mut uncovered = s.support_len();
    for (hi, h) in hs.iter().enumerate() {
        if sizes[hi] != t {
            continue;
        }
        for_each_affine_point_on(f, s.r, h, |idx| {
            if s.affine[idx] > 0 && witness[idx].is_none() {
                witness[idx] = Some(hi);
                uncovered -= 1;
            }
        });
        if uncovered == 0 {
            break;
        }
    }
    let is_intersection_set = t > 0;
    let is_minimal = is_intersection_set && uncovered == 0;
    let witnesses = if is_minimal {
        witness
            .iter()
            .enumerate()
            .filter_map(|(idx, w)| w.map(|hi| (idx, hi)))
            .map(|(idx, hi)| Witness {
                point: s.affine_point(idx).iter().map(|x| x.enc()).collect(),
                hyperplane: hs[hi].encodings(),
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(MinimalityReport { t, is_intersection_set, is_minimal, witnesses })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf9() -> Arc<FieldTower> {
        Arc::new(FieldTower::for_q(3).unwrap())
    }

    #[test]
    fn point_counts() {
        let t = gf9();
        assert_eq!(enumerate_points(&t, 2, Mode::Affine).count(), 81);
        assert_eq!(enumerate_points(&t, 3, Mode::Projective).count(), 820);
        let gf4 = FieldTower::for_q(2).unwrap();
        assert_eq!(enumerate_points(&gf4, 4, Mode::Projective).count(), 341);
    }

    #[test]
    fn projective_points_are_normalized_and_sorted() {
        let t = gf9();
        let pts: Vec<_> = enumerate_points(&t, 2, Mode::Projective).collect();
        assert_eq!(pts[0], vec![Fe(0), Fe(0), Fe(1)]);
        assert!(pts.windows(2).all(|w| w[0] < w[1]));
        assert!(pts.iter().all(|p| normalize(t.field(), p).as_ref() == Some(p)));
    }

    #[test]
    fn hyperplane_counts() {
        let t = gf9();
        let aff = enumerate_hyperplanes(&t, 3, Mode::Affine);
        assert_eq!(aff.len(), 819);
        assert_eq!(aff.iter().filter(|h| h.through_p_inf()).count(), 90);
        assert_eq!(aff.iter().filter(|h| h.affine_view(t.field()).is_some()).count(), 729);
        let proj = enumerate_hyperplanes(&t, 4, Mode::Projective);
        assert_eq!(proj.len(), 7381);
        assert!(proj[0].is_at_infinity());
        assert!(proj[1..].windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn incidence_examples() {
        let t = gf9();
        let f = t.field();
        let p_inf = vec![Fe(0), Fe(0), Fe(0), Fe(1)];
        assert!(incidence(f, &p_inf, &Hyperplane::at_infinity(3)));
        let plane = Hyperplane::from_affine(f, &[Fe(0), Fe(0)], Fe(0));
        assert!(incidence_affine(f, &[Fe(0); 3], &plane));
        let plane = Hyperplane::from_affine(f, &[Fe(2), Fe(2)], Fe(0));
        assert!(incidence_affine(f, &[Fe(1), Fe(1), Fe(1)], &plane));
        assert!(!incidence_affine(f, &[Fe(1), Fe(1), Fe(2)], &plane));
    }

    #[test]
    fn affine_view_roundtrip() {
        let t = gf9();
        let f = t.field();
        let m = [Fe(3), Fe(7)];
        let h = Hyperplane::from_affine(f, &m, Fe(5));
        assert_eq!(h.affine_view(f), Some((m.to_vec(), Fe(5))));
    }

    #[test]
    fn run_walker_matches_incidence() {
        let t = gf9();
        let f = t.field();
        let s = PointMultiset::new(t.clone(), 3);
        for h in enumerate_hyperplanes(&t, 3, Mode::Affine).iter().step_by(37) {
            let mut seen = Vec::new();
            for_each_affine_point_on(f, 3, h, |idx| seen.push(idx));
            let mut expected: Vec<usize> = enumerate_points(&t, 3, Mode::Affine)
                .filter(|x| incidence_affine(f, x, h))
                .map(|x| s.affine_index(&x))
                .collect();
            seen.sort_unstable();
            expected.sort_unstable();
            assert_eq!(seen, expected);
        }
    }

    #[test]
    fn spectrum_of_single_point() {
        let t = gf9();
        let mut s = PointMultiset::new(t, 3);
        s.insert_affine(&[Fe(1), Fe(2), Fe(3)], 1);
        let spec = spectrum(&s, Mode::Projective);
        assert_eq!(spec.histogram, BTreeMap::from([(0, 729), (1, 91)]));
        assert!(double_counting_holds(&s, &spec));
    }

    #[test]
    fn spectrum_of_full_plane() {
        let t = gf9();
        let mut s = PointMultiset::new(t.clone(), 2);
        for x in enumerate_points(&t, 2, Mode::Affine) {
            s.insert_affine(&x, 1);
        }
        assert_eq!(spectrum(&s, Mode::Projective).histogram, BTreeMap::from([(0, 1), (9, 90)]));
        let rep = minimality_report(&s).unwrap();
        assert_eq!(rep.t, 9);
        assert!(rep.is_minimal);
        assert_eq!(rep.witnesses.len(), 81);
    }

    #[test]
    fn single_point_is_not_an_intersection_set() {
        let t = gf9();
        let mut s = PointMultiset::new(t, 2);
        s.insert_affine(&[Fe(0), Fe(0)], 1);
        let rep = minimality_report(&s).unwrap();
        assert_eq!(rep.t, 0);
        assert!(!rep.is_intersection_set);
        assert!(!rep.is_minimal);
    }

    #[test]
    fn minimality_rejects_empty_and_multisets() {
        let t = gf9();
        let s = PointMultiset::new(t.clone(), 2);
        assert_eq!(minimality_report(&s), Err(Error::EmptySet));
        let mut m = PointMultiset::new(t, 2);
        m.insert_projective(&[Fe(0), Fe(0), Fe(1)], 2).unwrap();
        assert!(matches!(minimality_report(&m), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn multiset_at_infinity_counts_on_pi_inf() {
        let t = gf9();
        let mut s = PointMultiset::new(t, 2);
        s.insert_projective(&[Fe(0), Fe(0), Fe(2)], 5).unwrap();
        s.insert_affine(&[Fe(1), Fe(1)], 1);
        assert_eq!(s.size(), 6);
        assert_eq!(s.projective_mult(&[Fe(0), Fe(0), Fe(1)]), 5);
        let proj = spectrum(&s, Mode::Projective);
        let aff = spectrum(&s, Mode::Affine);
        // Π∞ carries exactly the multiplicity at infinity
        let mut completed = aff.clone();
        completed.merge(&Spectrum::from_sizes(Mode::Projective, &[5]));
        assert_eq!(completed.histogram, proj.histogram);
        assert!(double_counting_holds(&s, &proj));
        assert!(double_counting_holds(&s, &aff));
    }
}
