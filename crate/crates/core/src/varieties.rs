//! The Hermitian variety `x_r^q − x_r = (b^q−b)Σ xᵢ^{q+1}`, its cone at
//! infinity, the sheared set `B(a,b)` and the parameter classification that
//! decides which character profile `B(a,b)` has.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::errata::{pow_i, Erratum};
use crate::error::{Error, Result};
use crate::field::{Fe, FieldTower};
use crate::geometry::{gaussian_count, hyperplane_count, normalized_vectors, Mode, PointMultiset};

#[derive(Clone, Debug)]
pub struct Params {
    pub tower: Arc<FieldTower>,
    pub r: usize,
    pub a: Fe,
    pub b: Fe,
}

impl Params {
    pub fn new(tower: Arc<FieldTower>, r: usize, a: Fe, b: Fe) -> Result<Self> {
        let f = tower.field();
        if r < 2 {
            return Err(Error::InvalidParams(format!("dimension r = {r} must be at least 2")));
        }
        for x in [a, b] {
            if !f.contains(x) {
                return Err(Error::ForeignElement(x.enc(), f.order()));
            }
        }
        if a.is_zero() {
            return Err(Error::InvalidParams("a must be nonzero".into()));
        }
        if tower.in_subfield(b) {
            return Err(Error::InvalidParams(format!("b = {b} lies in GF({})", tower.q())));
        }
        Ok(Params { tower, r, a, b })
    }

    pub fn q(&self) -> u64 {
        self.tower.q() as u64
    }

    /// b^q − b.
    pub fn b_twist(&self) -> Fe {
        let f = self.tower.field();
        f.sub(self.tower.frobenius_q(self.b), self.b)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassTag {
    QuasiHermitian,
    ThmA,
    ThmB,
    ThmC,
    Mb1Odd,
    Mb1Even,
}

impl ClassTag {
    pub const ALL: [ClassTag; 6] =
        [ClassTag::QuasiHermitian, ClassTag::ThmA, ClassTag::ThmB, ClassTag::ThmC, ClassTag::Mb1Odd, ClassTag::Mb1Even];

    pub fn is_four_weight(self) -> bool {
        matches!(self, ClassTag::ThmA | ClassTag::ThmB | ClassTag::ThmC)
    }

    pub fn is_mb1(self) -> bool {
        matches!(self, ClassTag::Mb1Odd | ClassTag::Mb1Even)
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for ClassTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ClassTag::ALL
            .into_iter()
            .find(|t| t.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown class {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamClass {
    pub tag: ClassTag,
    /// 4a^{q+1} + (b^q−b)², odd q only.
    pub discriminant: Option<Fe>,
    /// Tr(a^{q+1}/(b^q+b)²), even q only.
    pub trace_bit: Option<Fe>,
}

pub fn classify(params: &Params) -> ParamClass {
    let t = &params.tower;
    let f = t.field();
    let r = params.r;
    let norm_a = t.norm(params.a);
    let twist = params.b_twist();
    if t.is_odd() {
        let disc = f.add(f.mul(f.from_int(4), norm_a), f.mul(twist, twist));
        let tag = if disc.is_zero() {
            let q = params.q();
            if r % 2 == 0 {
                ClassTag::ThmC
            } else if r % 4 == 3 && q % 4 == 3 {
                ClassTag::ThmB
            } else {
                ClassTag::ThmA
            }
        } else if r % 2 == 1 {
            ClassTag::QuasiHermitian
        } else if t.is_square_in_subfield(disc).expect("discriminant lies in GF(q)") {
            ClassTag::Mb1Odd
        } else {
            ClassTag::QuasiHermitian
        };
        ParamClass { tag, discriminant: Some(disc), trace_bit: None }
    } else {
        // in characteristic 2, b^q − b = b^q + b
        let ratio = f.div(norm_a, f.mul(twist, twist)).expect("b outside GF(q)");
        let bit = t.absolute_trace(ratio).expect("ratio lies in GF(q)");
        let tag = if r % 2 == 0 && bit == Fe::ONE { ClassTag::Mb1Even } else { ClassTag::QuasiHermitian };
        ParamClass { tag, discriminant: None, trace_bit: Some(bit) }
    }
}

/// Σ_{i<r} xᵢ^{q+1} and Σ_{i<r} xᵢ² over the first r−1 coordinates.
fn norm_and_square_sums(t: &FieldTower, xs: &[Fe]) -> (Fe, Fe) {
    let f = t.field();
    xs.iter().fold((Fe::ZERO, Fe::ZERO), |(n, s), &x| (f.add(n, t.norm(x)), f.add(s, f.mul(x, x))))
}

/// Affine points satisfying `lhs(x_r) = target(x₁,…,x_{r−1})` where lhs is
/// x_r^q − x_r.
fn collect_trace_equation(params: &Params, target: impl Fn(&[Fe]) -> Fe) -> PointMultiset {
    let t = &params.tower;
    let f = t.field();
    let r = params.r;
    let mut set = PointMultiset::new(t.clone(), r);
    let lhs: Vec<Fe> = f.elements().map(|x| f.sub(t.frobenius_q(x), x)).collect();
    let q2 = t.q2() as u64;
    let mut point = vec![Fe::ZERO; r];
    for n in 0..q2.pow(r as u32 - 1) {
        let mut rest = n;
        for slot in point[..r - 1].iter_mut().rev() {
            *slot = Fe((rest % q2) as u16);
            rest /= q2;
        }
        let want = target(&point[..r - 1]);
        for xr in f.elements() {
            if lhs[xr.idx()] == want {
                point[r - 1] = xr;
                set.insert_affine(&point, 1);
            }
        }
    }
    set
}

/// Affine part of the Hermitian variety x_r^q − x_r = (b^q−b)Σ xᵢ^{q+1}.
pub fn hermitian_affine(params: &Params) -> PointMultiset {
    let f = params.tower.field();
    let twist = params.b_twist();
    collect_trace_equation(params, |xs| {
        let (n, _) = norm_and_square_sums(&params.tower, xs);
        f.mul(twist, n)
    })
}

/// Points (0, x₁, …, x_r) of Π∞ with x₁^{q+1} + … + x_{r−1}^{q+1} = 0.
pub fn infinity_cone(params: &Params) -> PointMultiset {
    let t = &params.tower;
    let r = params.r;
    let mut set = PointMultiset::new(t.clone(), r);
    for v in normalized_vectors(t.q2() as u64, r) {
        let (n, _) = norm_and_square_sums(t, &v[..r - 1]);
        if n.is_zero() {
            let mut coords = vec![Fe::ZERO];
            coords.extend(v);
            set.insert_projective(&coords, 1).expect("nonzero vector");
        }
    }
    set
}

/// The affine set x_r^q − x_r + a^qΣxᵢ^{2q} − aΣxᵢ² = (b^q−b)Σxᵢ^{q+1}.
pub fn build_b(params: &Params) -> PointMultiset {
    let t = &params.tower;
    let f = t.field();
    let twist = params.b_twist();
    let a = params.a;
    collect_trace_equation(params, |xs| {
        let (n, s) = norm_and_square_sums(t, xs);
        // a^q Σ xᵢ^{2q} − a Σ xᵢ² = (a s)^q − a s
        let as_ = f.mul(a, s);
        let shear = f.sub(t.frobenius_q(as_), as_);
        f.sub(f.mul(twist, n), shear)
    })
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

/// (x₁,…,x_r) ↦ (x₁,…,x_{r−1}, x_r ∓ a(x₁²+…+x_{r−1}²)).
pub fn phi(params: &Params, point: &[Fe], direction: Direction) -> Vec<Fe> {
    let f = params.tower.field();
    let r = point.len();
    let (_, s) = norm_and_square_sums(&params.tower, &point[..r - 1]);
    let shift = f.mul(params.a, s);
    let mut out = point.to_vec();
    out[r - 1] = match direction {
        Direction::Forward => f.sub(point[r - 1], shift),
        Direction::Inverse => f.add(point[r - 1], shift),
    };
    out
}

/// First (a, b) in lexicographic encoding order whose class is `tag`.
pub fn search_class(tower: &Arc<FieldTower>, r: usize, tag: ClassTag) -> Option<Params> {
    sweep(tower, r).into_iter().find(|(_, c)| c.tag == tag).map(|(p, _)| p)
}

/// Every admissible (a, b) with its class, a-major.
pub fn sweep(tower: &Arc<FieldTower>, r: usize) -> Vec<(Params, ParamClass)> {
    let f = tower.field();
    let mut out = Vec::new();
    for a in f.elements().filter(|a| !a.is_zero()) {
        for b in f.elements().filter(|&b| !tower.in_subfield(b)) {
            let p = Params::new(tower.clone(), r, a, b).expect("admissible by construction");
            let c = classify(&p);
            out.push((p, c));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedProfile {
    pub set_size: u64,
    pub characters: Vec<u64>,
    pub affine_counts: BTreeMap<u64, u64>,
    pub minimal_t: u64,
}

impl ExpectedProfile {
    fn from_counts(q: u64, r: usize, counts: BTreeMap<u64, u64>) -> Self {
        ExpectedProfile {
            set_size: q.pow(2 * r as u32 - 1),
            characters: counts.keys().copied().collect(),
            minimal_t: *counts.keys().next().expect("nonempty profile"),
            affine_counts: counts,
        }
    }

    /// Counts sum to the affine hyperplane total and Σ c·N_c = |B|·(hyperplanes on a point).
    pub fn identities_hold(&self, q: u64, r: usize) -> bool {
        let q2 = q * q;
        let total: u64 = self.affine_counts.values().sum();
        let incid: u128 = self.affine_counts.iter().map(|(&c, &n)| c as u128 * n as u128).sum();
        total == hyperplane_count(q2, r, Mode::Affine)
            && incid == self.set_size as u128 * gaussian_count(q2, r as u32) as u128
    }
}

/// Character → count as transcribed from the theorem statements, exact
/// integers, possibly with non-integral exponents left unevaluated (`None`).
pub type PrintedCounts = Vec<(Option<i128>, i128)>;

/// Literal transcription of the hyperplane counts as they are printed,
/// including known misprints.
pub fn printed_profile(tag: ClassTag, q: u64, r: usize) -> Result<PrintedCounts> {
    let q = q as i128;
    let r = r as i64;
    let p = |e: i64| pow_i(q, e);
    let half = |num: i64| if num % 2 == 0 { Some(num / 2) } else { None };
    let g = (p(2 * r) - 1) / (q * q - 1);
    let base = p(2 * r - 3);
    let e1 = half(3 * r - 5);
    let e2 = half(3 * (r - 1));
    let e3 = half(3 * r - 4);
    let ep = |e: Option<i64>| e.filter(|&e| e >= 0).map(p);
    match tag {
        ClassTag::ThmA => {
            let (a, b) = (ep(e1), ep(e2));
            Ok(vec![
                (a.zip(b).map(|(a, b)| base + b - a), p(r)),
                (Some(base), g - 1 + p(2 * r) - p(r + 1)),
                (a.map(|a| base - a), p(r + 1) - p(r)),
            ])
        }
        ClassTag::ThmB => {
            let (a, b) = (ep(e1), ep(e2));
            Ok(vec![
                (a.map(|a| base + a), p(r)),
                (Some(base), g - 1 + p(2 * r) - p(r + 1)),
                (a.zip(b).map(|(a, b)| base - b + a), p(r + 1) - p(r)),
            ])
        }
        ClassTag::ThmC => {
            let lo = ep(e3).map(|c| base - c);
            // the upper subscript is printed with exponent 3(r−4)/2
            let hi = half(3 * (r - 4)).filter(|&e| e >= 0).map(|e| base + p(e));
            Ok(vec![
                (lo, (p(r + 1) - p(r)) / 2),
                (Some(base), p(r) + g - 1 + p(2 * r) - p(r + 1)),
                (hi, (p(r + 1) - p(r)) / 2),
            ])
        }
        ClassTag::Mb1Odd | ClassTag::Mb1Even => {
            // only the characters are stated; counts follow the singular /
            // nonsingular quadric split
            let lo = base - p(r - 2);
            Ok(vec![(Some(lo), p(2 * r) - p(2 * r - 1)), (Some(base), g - 1), (Some(lo + p(r - 1)), p(2 * r - 1))])
        }
        ClassTag::QuasiHermitian => Err(Error::Unsupported("quasi-Hermitian classes have no three-character profile".into())),
    }
}

/// Closed-form affine character profile, with known misprints corrected.
pub fn expected_profile(class: &ParamClass, params: &Params) -> Result<ExpectedProfile> {
    let q = params.q();
    let r = params.r;
    let ri = r as i64;
    let p = |e: i64| pow_i(q as i128, e) as u64;
    let g = (p(2 * ri) - 1) / (q * q - 1);
    let base = p(2 * ri - 3);
    let counts: Vec<(u64, u64)> = match class.tag {
        ClassTag::ThmA => {
            let (s, l) = (p((3 * ri - 5) / 2), p(3 * (ri - 1) / 2));
            vec![(base - s, p(ri + 1) - p(ri)), (base, g - 1 + p(2 * ri) - p(ri + 1)), (base - s + l, p(ri))]
        }
        ClassTag::ThmB => {
            let (s, l) = (p((3 * ri - 5) / 2), p(3 * (ri - 1) / 2));
            vec![(base + s - l, p(ri)), (base, g - 1 + p(2 * ri) - p(ri + 1)), (base + s, p(ri + 1) - p(ri))]
        }
        ClassTag::ThmC => {
            let s = p((3 * ri - 4) / 2);
            let ext = (p(ri + 1) - p(ri)) / 2;
            vec![(base - s, ext), (base, p(ri) + g - 1 + p(2 * ri) - p(ri + 1)), (base + s, ext)]
        }
        ClassTag::Mb1Odd | ClassTag::Mb1Even => {
            let lo = base - p(ri - 2);
            vec![(lo, p(2 * ri) - p(2 * ri - 1)), (base, g - 1), (lo + p(ri - 1), p(2 * ri - 1))]
        }
        ClassTag::QuasiHermitian => {
            return Err(Error::Unsupported("quasi-Hermitian classes have no three-character profile".into()))
        }
    };
    Ok(ExpectedProfile::from_counts(q, r, counts.into_iter().collect()))
}

/// Differences between the printed counts and the corrected profile.
pub fn profile_errata(class: &ParamClass, params: &Params) -> Result<Vec<Erratum>> {
    let printed = printed_profile(class.tag, params.q(), params.r)?;
    let expected = expected_profile(class, params)?;
    let q = params.q() as i128;
    let q2 = q * q;
    let r = params.r as u32;
    let total: i128 = printed.iter().map(|(_, n)| n).sum();
    let incid: Option<i128> = printed.iter().map(|(c, n)| c.map(|c| c * n)).sum();
    let want_total = hyperplane_count(q2 as u64, params.r, Mode::Affine) as i128;
    let want_incid = (expected.set_size as i128) * gaussian_count(q2 as u64, r) as i128;
    let mut failed = Vec::new();
    if total != want_total {
        failed.push(format!("hyperplane total {total} != {want_total}"));
    }
    match incid {
        Some(v) if v != want_incid => failed.push(format!("double counting {v} != {want_incid}")),
        None => failed.push("a character exponent is not a non-negative integer".into()),
        _ => {}
    }
    let printed_map: BTreeMap<String, i128> =
        printed.iter().map(|(c, n)| (c.map_or("unevaluable".to_string(), |c| c.to_string()), *n)).collect();
    let corrected: BTreeMap<String, i128> =
        expected.affine_counts.iter().map(|(c, n)| (c.to_string(), *n as i128)).collect();
    if failed.is_empty() && printed_map == corrected {
        return Ok(Vec::new());
    }
    if failed.is_empty() {
        failed.push("disagrees with the corrected closed form".into());
    }
    Ok(vec![Erratum {
        claim: format!("{} hyperplane counts", class.tag),
        printed: printed_map.into_iter().map(|(k, v)| (k, v as i64)).collect(),
        corrected: corrected.into_iter().map(|(k, v)| (k, v as i64)).collect(),
        failed_checks: failed,
    }])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::enumerate_points;

    fn gf9() -> Arc<FieldTower> {
        Arc::new(FieldTower::for_q(3).unwrap())
    }

    fn params(t: &Arc<FieldTower>, r: usize, a: u16, b: u16) -> Params {
        Params::new(t.clone(), r, Fe(a), Fe(b)).unwrap()
    }

    #[test]
    fn classification_examples() {
        let t = gf9();
        // enc 3 = t, enc 4 = 1 + t
        let c = classify(&params(&t, 3, 1, 3));
        assert_eq!(c.tag, ClassTag::ThmB);
        assert_eq!(c.discriminant, Some(Fe::ZERO));
        let c = classify(&params(&t, 4, 4, 3));
        assert_eq!(c.tag, ClassTag::Mb1Odd);
        assert_eq!(c.discriminant, Some(Fe(1)));
        assert_eq!(classify(&params(&t, 4, 1, 3)).tag, ClassTag::ThmC);
    }

    #[test]
    fn degenerate_params_rejected() {
        let t = gf9();
        assert!(Params::new(t.clone(), 3, Fe(0), Fe(3)).is_err());
        assert!(Params::new(t.clone(), 3, Fe(1), Fe(2)).is_err());
        assert!(Params::new(t.clone(), 1, Fe(1), Fe(3)).is_err());
        assert!(Params::new(t, 3, Fe(1), Fe(90)).is_err());
    }

    #[test]
    fn odd_sweep_has_no_gaps() {
        let t = gf9();
        for r in [2, 3, 4] {
            let rows = sweep(&t, r);
            assert_eq!(rows.len(), 48);
            // ThmB/ThmA/ThmC pairs are exactly those with 4a^4 = −(b^3 − b)^2
            let f = t.field();
            let zero_disc = rows
                .iter()
                .filter(|(p, _)| {
                    let tw = p.b_twist();
                    f.mul(f.from_int(4), f.pow(p.a, 4)) == f.neg(f.mul(tw, tw))
                })
                .count();
            let thm = rows.iter().filter(|(_, c)| c.tag.is_four_weight()).count();
            assert_eq!(zero_disc, thm, "r = {r}");
        }
    }

    #[test]
    fn hermitian_sizes() {
        let t = gf9();
        let h = hermitian_affine(&params(&t, 3, 1, 3));
        assert_eq!(h.size(), 243);
        assert_eq!(h.affine_mult(&[Fe(0); 3]), 1);
        let gf4 = Arc::new(FieldTower::for_q(2).unwrap());
        assert_eq!(hermitian_affine(&params(&gf4, 4, 1, 2)).size(), 128);
    }

    #[test]
    fn b_contains_origin_and_has_expected_size() {
        let t = gf9();
        let b = build_b(&params(&t, 3, 1, 3));
        assert_eq!(b.size(), 243);
        assert_eq!(b.affine_mult(&[Fe(0); 3]), 1);
        let gf4 = Arc::new(FieldTower::for_q(2).unwrap());
        assert_eq!(build_b(&params(&gf4, 4, 1, 2)).size(), 128);
    }

    #[test]
    fn b_matches_defining_equation_pointwise() {
        let t = gf9();
        let f = t.field();
        let pr = params(&t, 3, 4, 5);
        let b = build_b(&pr);
        let q = 3;
        for x in enumerate_points(&t, 3, Mode::Affine) {
            let sum = |e: u64| x[..2].iter().fold(Fe::ZERO, |acc, &v| f.add(acc, f.pow(v, e)));
            let lhs = f.add(
                f.sub(f.pow(x[2], q), x[2]),
                f.sub(f.mul(f.pow(pr.a, q), sum(2 * q)), f.mul(pr.a, sum(2))),
            );
            let rhs = f.mul(pr.b_twist(), sum(q + 1));
            assert_eq!(b.affine_mult(&x) == 1, lhs == rhs, "{x:?}");
        }
    }

    #[test]
    fn cone_sizes() {
        let t = gf9();
        let cone = infinity_cone(&params(&t, 3, 1, 3));
        assert_eq!(cone.size(), 37);
        assert_eq!(cone.projective_mult(&[Fe(0), Fe(0), Fe(0), Fe(1)]), 1);
        let cone2 = infinity_cone(&params(&t, 2, 1, 3));
        assert_eq!(cone2.size(), 1);
        // q = 2, r = 3: x₁³ + x₂³ = 0 has q+1 = 3 projective solutions, each a
        // line of 4 points through P∞ → 3·4 + 1
        let gf4 = Arc::new(FieldTower::for_q(2).unwrap());
        assert_eq!(infinity_cone(&params(&gf4, 3, 1, 2)).size(), 13);
    }

    #[test]
    fn phi_maps_hermitian_onto_b() {
        let t = gf9();
        let pr = params(&t, 3, 1, 3);
        assert_eq!(phi(&pr, &[Fe(0); 3], Direction::Forward), vec![Fe(0); 3]);
        let herm = hermitian_affine(&pr);
        let mut image = PointMultiset::new(t.clone(), 3);
        for x in herm.affine_points() {
            image.insert_affine(&phi(&pr, &x, Direction::Forward), 1);
        }
        assert_eq!(image, build_b(&pr));
    }

    #[test]
    fn phi_is_invertible() {
        use rand::{Rng, SeedableRng};
        let t = gf9();
        let pr = params(&t, 4, 7, 3);
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for _ in 0..1000 {
            let x: Vec<Fe> = (0..4).map(|_| Fe(rng.gen_range(0..9))).collect();
            assert_eq!(phi(&pr, &phi(&pr, &x, Direction::Forward), Direction::Inverse), x);
        }
    }

    #[test]
    fn profile_examples() {
        let t = gf9();
        let pr = params(&t, 3, 1, 3);
        let prof = expected_profile(&classify(&pr), &pr).unwrap();
        assert_eq!(prof.characters, vec![9, 27, 36]);
        assert_eq!(prof.affine_counts.values().sum::<u64>(), 819);
        assert!(prof.identities_hold(3, 3));

        let pr = params(&t, 4, 1, 3);
        let prof = expected_profile(&classify(&pr), &pr).unwrap();
        assert_eq!(prof.affine_counts, BTreeMap::from([(162, 81), (243, 7218), (324, 81)]));
        assert!(prof.identities_hold(3, 4));

        let pr = params(&t, 4, 4, 3);
        let prof = expected_profile(&classify(&pr), &pr).unwrap();
        assert_eq!(prof.affine_counts, BTreeMap::from([(234, 4374), (243, 819), (261, 2187)]));
        assert_eq!(prof.minimal_t, 234);
        assert!(prof.identities_hold(3, 4));
    }

    #[test]
    fn quasi_hermitian_has_no_profile() {
        let t = gf9();
        let (pr, c) = sweep(&t, 3).into_iter().find(|(_, c)| c.tag == ClassTag::QuasiHermitian).unwrap();
        assert!(matches!(expected_profile(&c, &pr), Err(Error::Unsupported(_))));
    }

    #[test]
    fn class_tag_parses() {
        assert_eq!("thmb".parse::<ClassTag>().unwrap(), ClassTag::ThmB);
        assert!("ThmD".parse::<ClassTag>().is_err());
    }
}
