//! Reduction of a hyperplane section of `B(a,b)` to an affine quadric over
//! GF(q) in 2r−2 variables, plus point counting and classification of such
//! quadrics.
//!
//! Writing every coordinate as `x = x⁰ + εx¹`, the section of `B(a,b)` by
//! `x_r = Σ mᵢxᵢ + d` becomes, for odd q (ε^q = −ε, e = ε²),
//!
//! ```text
//! Σᵢ (a¹−b¹)(xᵢ⁰)² + 2a⁰xᵢ⁰xᵢ¹ + (a¹+b¹)e(xᵢ¹)² + mᵢ¹xᵢ⁰ + mᵢ⁰xᵢ¹  + d¹ = 0
//! ```
//!
//! and for even q (ε² + ε + ν = 0)
//!
//! ```text
//! Σᵢ (a¹+b¹)(xᵢ⁰)² + b¹xᵢ⁰xᵢ¹ + (a⁰+a¹+ν(a¹+b¹))(xᵢ¹)² + mᵢ¹xᵢ⁰ + (mᵢ⁰+mᵢ¹)xᵢ¹  + d¹ = 0.
//! ```

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, FieldTower};
use crate::varieties::{ClassTag, Params};

pub const DEFAULT_BUDGET: u128 = 1_000_000_000;

/// Upper bound on element operations for a single exhaustive computation.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Budget(pub u128);

impl Default for Budget {
    fn default() -> Self {
        Budget(DEFAULT_BUDGET)
    }
}

impl Budget {
    pub fn check(self, needed: u128) -> Result<()> {
        if needed > self.0 {
            Err(Error::BudgetExceeded { needed, budget: self.0 })
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Debug)]
pub struct AffineQuadric {
    tower: Arc<FieldTower>,
    pub n: usize,
    /// Coefficient of yᵢyⱼ at `quad[i][j]`, i ≤ j; entries below the diagonal are zero.
    pub quad: Vec<Vec<Fe>>,
    pub lin: Vec<Fe>,
    pub cst: Fe,
}

impl PartialEq for AffineQuadric {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.quad == other.quad && self.lin == other.lin && self.cst == other.cst
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Where {
    Affine,
    AtInfinity,
}

impl AffineQuadric {
    pub fn new(tower: Arc<FieldTower>, n: usize) -> Self {
        AffineQuadric { tower, n, quad: vec![vec![Fe::ZERO; n]; n], lin: vec![Fe::ZERO; n], cst: Fe::ZERO }
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn eval(&self, y: &[Fe]) -> Fe {
        let f = self.tower.field();
        let mut acc = self.cst;
        for i in 0..self.n {
            let mut row = self.lin[i];
            for j in i..self.n {
                row = f.add(row, f.mul(self.quad[i][j], y[j]));
            }
            acc = f.add(acc, f.mul(row, y[i]));
        }
        acc
    }

    pub fn eval_quadratic_part(&self, y: &[Fe]) -> Fe {
        let f = self.tower.field();
        let mut acc = Fe::ZERO;
        for i in 0..self.n {
            let mut row = Fe::ZERO;
            for j in i..self.n {
                row = f.add(row, f.mul(self.quad[i][j], y[j]));
            }
            acc = f.add(acc, f.mul(row, y[i]));
        }
        acc
    }

    /// Rows `quad`, then `lin`, then `const`, as integer encodings.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let join = |v: &[Fe]| v.iter().map(|x| x.enc().to_string()).collect::<Vec<_>>().join(",");
        for (i, row) in self.quad.iter().enumerate() {
            out.push_str(&format!("quad{i},{}\n", join(row)));
        }
        out.push_str(&format!("lin,{}\n", join(&self.lin)));
        out.push_str(&format!("const,{}\n", self.cst.enc()));
        out
    }

    /// The homogenized symmetric form in n+1 variables (y₀ first) as an
    /// upper-triangular coefficient array.
    fn completion(&self) -> Vec<Vec<Fe>> {
        let m = self.n + 1;
        let mut c = vec![vec![Fe::ZERO; m]; m];
        c[0][0] = self.cst;
        for i in 0..self.n {
            c[0][i + 1] = self.lin[i];
            for j in i..self.n {
                c[i + 1][j + 1] = self.quad[i][j];
            }
        }
        c
    }

    fn operations(&self, points: u128) -> u128 {
        points * self.n as u128
    }

    pub fn count_points(&self, place: Where, budget: Budget) -> Result<u64> {
        let q = self.tower.q() as u128;
        let points = match place {
            Where::Affine => q.pow(self.n as u32),
            Where::AtInfinity => (q.pow(self.n as u32) - 1) / (q - 1),
        };
        budget.check(self.operations(points))?;
        Ok(match place {
            Where::Affine => count_zeros(&self.tower, &self.quad, &self.lin, self.cst),
            Where::AtInfinity => count_projective_zeros(&self.tower, &self.quad),
        })
    }
}

/// Zeros of Σ_{i≤j} cᵢⱼyᵢyⱼ + Σ lᵢyᵢ + c over GF(q)^n by depth-first
/// enumeration with incrementally updated linear coefficients.
fn count_zeros(t: &FieldTower, quad: &[Vec<Fe>], lin: &[Fe], cst: Fe) -> u64 {
    fn rec(t: &FieldTower, quad: &[Vec<Fe>], k: usize, linear: &mut Vec<Fe>, acc: Fe) -> u64 {
        let f = t.field();
        let n = quad.len();
        if k == n {
            return acc.is_zero() as u64;
        }
        let mut total = 0;
        let saved: Vec<Fe> = linear[k + 1..].to_vec();
        for &y in t.subfield() {
            // term for y_k: c_kk y² + L_k y
            let term = f.mul(f.add(f.mul(quad[k][k], y), linear[k]), y);
            for j in k + 1..n {
                linear[j] = f.add(saved[j - k - 1], f.mul(quad[k][j], y));
            }
            total += rec(t, quad, k + 1, linear, f.add(acc, term));
        }
        linear[k + 1..].copy_from_slice(&saved);
        total
    }
    let mut linear = lin.to_vec();
    rec(t, quad, 0, &mut linear, cst)
}

/// Zeros of the quadratic part on PG(n−1, q), one normalized vector per point.
fn count_projective_zeros(t: &FieldTower, quad: &[Vec<Fe>]) -> u64 {
    let n = quad.len();
    // leading 1 at position k, zeros before it
    (0..n)
        .map(|k| {
            let sub: Vec<Vec<Fe>> = (k + 1..n).map(|i| quad[i][k + 1..].to_vec()).collect();
            let lin: Vec<Fe> = (k + 1..n).map(|j| quad[k][j]).collect();
            count_zeros(t, &sub, &lin, quad[k][k])
        })
        .sum()
}

/// Points of a nondegenerate quadric of rank ρ in PG(ρ−1, q) extended to a
/// cone in PG(N−1, q).
fn cone_count(q: u64, total_vars: u32, rank: u32, kind: Character) -> Option<u64> {
    let base = (q.pow(total_vars - 1) - 1) / (q - 1);
    let exp = (total_vars as i64) - (rank as i64) / 2 - 1;
    match kind {
        Character::Parabolic if rank % 2 == 1 => Some(base),
        Character::Hyperbolic if rank % 2 == 0 && exp >= 0 => Some(base + q.pow(exp as u32)),
        Character::Elliptic if rank % 2 == 0 && rank >= 2 => Some(base - q.pow(exp as u32)),
        _ => None,
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Character {
    Hyperbolic,
    Elliptic,
    Parabolic,
    /// Count matches no cone over a nondegenerate quadric, or the form is zero.
    Degenerate,
}

/// Character and (when determined) rank of one projective quadric.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub points: u64,
    pub character: Character,
    /// `None` when the rank is not determined by the count alone (even q, parabolic).
    pub rank: Option<usize>,
    pub method: RankMethod,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankMethod {
    Exact,
    Empirical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadricClass {
    pub affine_count: u64,
    pub infinity_count: u64,
    /// The projective completion of the affine quadric in PG(n, q).
    pub completion: Classification,
    /// The quadric at infinity, the quadratic part in PG(n−1, q).
    pub at_infinity: Classification,
}

/// Congruence diagonalization of a symmetric form (odd q) given by its
/// upper-triangular coefficients; returns the nonzero diagonal entries.
fn diagonalize(t: &FieldTower, coeffs: &[Vec<Fe>]) -> Vec<Fe> {
    let f = t.field();
    let n = coeffs.len();
    let half = f.inv(f.from_int(2)).expect("odd characteristic");
    let mut m = vec![vec![Fe::ZERO; n]; n];
    for i in 0..n {
        m[i][i] = coeffs[i][i];
        for j in i + 1..n {
            let v = f.mul(coeffs[i][j], half);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    let mut diag = Vec::new();
    for k in 0..n {
        if m[k][k].is_zero() {
            if let Some(i) = (k + 1..n).find(|&i| !m[i][i].is_zero()) {
                m.swap(k, i);
                for row in m.iter_mut() {
                    row.swap(k, i);
                }
            } else if let Some((i, j)) =
                (k..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !m[i][j].is_zero())
            {
                // e_i ← e_i + e_j makes the diagonal entry 2m_ij ≠ 0
                for c in 0..n {
                    m[i][c] = f.add(m[i][c], m[j][c]);
                }
                for row in m.iter_mut() {
                    row[i] = f.add(row[i], row[j]);
                }
                m.swap(k, i);
                for row in m.iter_mut() {
                    row.swap(k, i);
                }
            } else {
                break;
            }
        }
        let pivot = m[k][k];
        let inv = f.inv(pivot).expect("nonzero pivot");
        for j in k + 1..n {
            let factor = f.mul(m[j][k], inv);
            if factor.is_zero() {
                continue;
            }
            for c in 0..n {
                m[j][c] = f.sub(m[j][c], f.mul(factor, m[k][c]));
            }
            for row in m.iter_mut() {
                row[j] = f.sub(row[j], f.mul(factor, row[k]));
            }
        }
        diag.push(pivot);
    }
    diag
}

fn classify_exact(t: &FieldTower, coeffs: &[Vec<Fe>], points: u64) -> Classification {
    let f = t.field();
    let vars = coeffs.len() as u32;
    let diag = diagonalize(t, coeffs);
    let rank = diag.len();
    let character = if rank == 0 {
        Character::Degenerate
    } else if rank % 2 == 1 {
        Character::Parabolic
    } else {
        let sign = if (rank / 2) % 2 == 1 { f.neg(Fe::ONE) } else { Fe::ONE };
        let disc = diag.iter().fold(sign, |acc, &d| f.mul(acc, d));
        if t.is_square_in_subfield(disc).expect("odd q") {
            Character::Hyperbolic
        } else {
            Character::Elliptic
        }
    };
    let consistent = character == Character::Degenerate || cone_count(t.q() as u64, vars, rank as u32, character) == Some(points);
    Classification {
        points,
        character: if consistent { character } else { Character::Degenerate },
        rank: Some(rank),
        method: RankMethod::Exact,
    }
}

fn classify_by_count(q: u64, vars: u32, points: u64) -> Classification {
    let base = (q.pow(vars - 1) - 1) / (q - 1);
    let rank_for = |diff: u64| {
        // diff = q^{vars − ρ/2 − 1}
        (0..vars).find(|&e| q.pow(e) == diff).map(|e| 2 * (vars - 1 - e) as usize)
    };
    let (character, rank) = if points == base {
        (Character::Parabolic, None)
    } else if points > base {
        match rank_for(points - base) {
            Some(0) => (Character::Degenerate, Some(0)),
            Some(r) => (Character::Hyperbolic, Some(r)),
            None => (Character::Degenerate, None),
        }
    } else {
        match rank_for(base - points) {
            Some(r) if r >= 2 => (Character::Elliptic, Some(r)),
            _ => (Character::Degenerate, None),
        }
    };
    Classification { points, character, rank, method: RankMethod::Empirical }
}

/// Counts the quadric and its quadric at infinity and determines both
/// characters: by congruence diagonalization for odd q, by matching point
/// counts against the cone formulas for even q.
pub fn classify_quadric(qd: &AffineQuadric, budget: Budget) -> Result<QuadricClass> {
    let t = &qd.tower;
    let affine_count = qd.count_points(Where::Affine, budget)?;
    let infinity_count = qd.count_points(Where::AtInfinity, budget)?;
    let q = t.q() as u64;
    let total = affine_count + infinity_count;
    let vars = qd.n as u32;
    let (completion, at_infinity) = if t.is_odd() {
        (classify_exact(t, &qd.completion(), total), classify_exact(t, &qd.quad, infinity_count))
    } else {
        (classify_by_count(q, vars + 1, total), classify_by_count(q, vars, infinity_count))
    };
    Ok(QuadricClass { affine_count, infinity_count, completion, at_infinity })
}

/// Reduced quadric of the section of `B(a,b)` by x_r = Σ mᵢxᵢ + d.
pub fn reduce(params: &Params, m: &[Fe], d: Fe) -> Result<AffineQuadric> {
    let t = &params.tower;
    let f = t.field();
    let r = params.r;
    if m.len() != r - 1 {
        return Err(Error::InvalidParams(format!("expected {} slope coefficients, got {}", r - 1, m.len())));
    }
    let eps = t.eps().ok_or(Error::EpsBasisUnavailable)?;
    let (a0, a1) = t.decompose(params.a)?;
    let (_, b1) = t.decompose(params.b)?;
    let (_, d1) = t.decompose(d)?;
    let n = 2 * r - 2;
    let mut qd = AffineQuadric::new(t.clone(), n);
    let (c00, c01, c11) = if t.is_odd() {
        let e = f.mul(eps, eps);
        (f.sub(a1, b1), f.add(a0, a0), f.mul(f.add(a1, b1), e))
    } else {
        let nu = t.nu().expect("even tower with ε has ν");
        let a1b1 = f.add(a1, b1);
        (a1b1, b1, f.add(f.add(a0, a1), f.mul(nu, a1b1)))
    };
    for (i, &mi) in m.iter().enumerate() {
        let (m0, m1) = t.decompose(mi)?;
        let (u, v) = (2 * i, 2 * i + 1);
        qd.quad[u][u] = c00;
        qd.quad[u][v] = c01;
        qd.quad[v][v] = c11;
        qd.lin[u] = m1;
        qd.lin[v] = if t.is_odd() { m0 } else { f.add(m0, m1) };
    }
    qd.cst = d1;
    Ok(qd)
}

fn all_slopes(t: &FieldTower, r: usize) -> impl Iterator<Item = (Vec<Fe>, Fe)> + '_ {
    let q2 = t.q2() as u64;
    (0..q2.pow(r as u32)).map(move |mut n| {
        let mut v = vec![Fe::ZERO; r];
        for slot in v.iter_mut().rev() {
            *slot = Fe((n % q2) as u16);
            n /= q2;
        }
        let d = v.pop().unwrap();
        (v, d)
    })
}

/// Histogram of affine point counts N of the reduced quadric over all
/// q^{2r} hyperplanes x_r = Σ mᵢxᵢ + d.
pub fn n_census(params: &Params, budget: Budget) -> Result<BTreeMap<u64, u64>> {
    let t = &params.tower;
    let q = t.q() as u128;
    let n = 2 * params.r as u128 - 2;
    budget.check(q.pow(2 * params.r as u32) * n * q.pow(n as u32))?;
    let pairs: Vec<(Vec<Fe>, Fe)> = all_slopes(t, params.r).collect();
    let counts: Vec<u64> = pairs
        .par_iter()
        .map(|(m, d)| {
            let qd = reduce(params, m, *d)?;
            Ok(count_zeros(t, &qd.quad, &qd.lin, qd.cst))
        })
        .collect::<Result<_>>()?;
    let mut hist = BTreeMap::new();
    for c in counts {
        *hist.entry(c).or_insert(0) += 1;
    }
    Ok(hist)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaCensus {
    pub sigma0: u64,
    pub sigma_plus: u64,
    pub sigma_minus: u64,
    /// Quadrics whose count is none of the three expected values.
    pub other: u64,
}

impl SigmaCensus {
    pub fn total(&self) -> u64 {
        self.sigma0 + self.sigma_plus + self.sigma_minus + self.other
    }
}

/// Tallies |Q| ∈ {q^{2r−3}, q^{2r−3} ± q^{(3r−4)/2}} over all (m, d) for a
/// ThmC parameter set.
pub fn sigma_census(params: &Params, tag: ClassTag, budget: Budget) -> Result<SigmaCensus> {
    if tag != ClassTag::ThmC {
        return Err(Error::Unsupported(format!("sigma census needs a ThmC parameter set, got {tag}")));
    }
    let q = params.q();
    let r = params.r as u32;
    let mid = q.pow(2 * r - 3);
    let delta = q.pow((3 * r - 4) / 2);
    let hist = n_census(params, budget)?;
    let mut out = SigmaCensus { sigma0: 0, sigma_plus: 0, sigma_minus: 0, other: 0 };
    for (&count, &k) in &hist {
        match count {
            c if c == mid => out.sigma0 += k,
            c if c == mid + delta => out.sigma_plus += k,
            c if c + delta == mid => out.sigma_minus += k,
            _ => out.other += k,
        }
    }
    Ok(out)
}

/// α = (a¹+b¹)(a⁰+a¹+ν(a¹+b¹))/(b¹)² for even q ≥ 4.
pub fn alpha_invariant(params: &Params, tag: ClassTag) -> Result<Fe> {
    let t = &params.tower;
    if t.is_odd() {
        return Err(Error::Unsupported("alpha invariant is defined for even q only".into()));
    }
    if tag != ClassTag::Mb1Even {
        return Err(Error::Unsupported(format!("alpha invariant needs an Mb1Even parameter set, got {tag}")));
    }
    let f = t.field();
    let nu = t.nu().ok_or(Error::EpsBasisUnavailable)?;
    let (a0, a1) = t.decompose(params.a)?;
    let (_, b1) = t.decompose(params.b)?;
    let a1b1 = f.add(a1, b1);
    let num = f.mul(a1b1, f.add(f.add(a0, a1), f.mul(nu, a1b1)));
    f.div(num, f.mul(b1, b1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::varieties::classify;

    fn gf9() -> Arc<FieldTower> {
        Arc::new(FieldTower::for_q(3).unwrap())
    }

    fn brute_count(qd: &AffineQuadric) -> u64 {
        let sub = qd.tower.subfield().to_vec();
        let q = sub.len() as u64;
        (0..q.pow(qd.n as u32))
            .filter(|&code| {
                let mut c = code;
                let y: Vec<Fe> = (0..qd.n)
                    .map(|_| {
                        let v = sub[(c % q) as usize];
                        c /= q;
                        v
                    })
                    .collect();
                qd.eval(&y).is_zero()
            })
            .count() as u64
    }

    #[test]
    fn zero_form_counts_everything() {
        let t = gf9();
        let qd = AffineQuadric::new(t, 4);
        assert_eq!(qd.count_points(Where::Affine, Budget::default()).unwrap(), 81);
        assert_eq!(qd.count_points(Where::AtInfinity, Budget::default()).unwrap(), 40);
    }

    #[test]
    fn sum_of_squares_matches_brute_force() {
        let t = gf9();
        let mut qd = AffineQuadric::new(t, 4);
        // Σ (xᵢ⁰)² on the even-indexed variables
        qd.quad[0][0] = Fe::ONE;
        qd.quad[2][2] = Fe::ONE;
        let n = qd.count_points(Where::Affine, Budget::default()).unwrap();
        assert_eq!(n, brute_count(&qd));
        // x² + y² = 0 over GF(3) has only (0,0); times 9 choices of the other two
        assert_eq!(n, 9);
    }

    #[test]
    fn diag_one_one_is_elliptic() {
        let t = gf9();
        let mut qd = AffineQuadric::new(t, 2);
        qd.quad[0][0] = Fe::ONE;
        qd.quad[1][1] = Fe::ONE;
        let c = classify_quadric(&qd, Budget::default()).unwrap();
        assert_eq!(c.affine_count, 1);
        assert_eq!(c.at_infinity.character, Character::Elliptic);
        assert_eq!(c.at_infinity.rank, Some(2));
        assert_eq!(c.completion.character, Character::Elliptic);
    }

    #[test]
    fn random_quadrics_count_like_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for q in [3u32, 4, 5] {
            let t = Arc::new(FieldTower::for_q(q).unwrap());
            let sub = t.subfield().to_vec();
            for _ in 0..20 {
                let mut qd = AffineQuadric::new(t.clone(), 3);
                for i in 0..3 {
                    for j in i..3 {
                        qd.quad[i][j] = sub[rng.gen_range(0..sub.len())];
                    }
                    qd.lin[i] = sub[rng.gen_range(0..sub.len())];
                }
                qd.cst = sub[rng.gen_range(0..sub.len())];
                assert_eq!(qd.count_points(Where::Affine, Budget::default()).unwrap(), brute_count(&qd));
                let c = classify_quadric(&qd, Budget::default()).unwrap();
                assert_ne!(c.at_infinity.character, Character::Degenerate, "{:?}", qd.quad);
            }
        }
    }

    #[test]
    fn budget_guard() {
        let t = gf9();
        let qd = AffineQuadric::new(t, 6);
        assert!(matches!(qd.count_points(Where::Affine, Budget(100)), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn reduce_origin_plane_contains_origin() {
        let t = gf9();
        let p = Params::new(t, 3, Fe(1), Fe(3)).unwrap();
        let qd = reduce(&p, &[Fe(0), Fe(0)], Fe(0)).unwrap();
        assert!(qd.eval(&[Fe(0); 4]).is_zero());
        assert!(qd.count_points(Where::Affine, Budget::default()).unwrap() >= 1);
    }

    #[test]
    fn reduce_refuses_q2() {
        let t = Arc::new(FieldTower::for_q(2).unwrap());
        let p = Params::new(t, 4, Fe(1), Fe(2)).unwrap();
        assert!(matches!(reduce(&p, &[Fe(0); 3], Fe(0)), Err(Error::EpsBasisUnavailable)));
    }

    #[test]
    fn thmb_quadric_at_infinity() {
        let t = gf9();
        let p = Params::new(t, 3, Fe(1), Fe(3)).unwrap();
        let c = classify_quadric(&reduce(&p, &[Fe(0), Fe(0)], Fe(0)).unwrap(), Budget::default()).unwrap();
        assert!([4, 22].contains(&c.infinity_count));
        assert_eq!(c.at_infinity.rank, Some(2));
    }

    #[test]
    fn mb1_odd_quadric_at_infinity_is_hyperbolic() {
        let t = gf9();
        let p = Params::new(t, 4, Fe(4), Fe(3)).unwrap();
        let c = classify_quadric(&reduce(&p, &[Fe(1), Fe(2), Fe(5)], Fe(7)).unwrap(), Budget::default()).unwrap();
        assert_eq!(c.at_infinity.character, Character::Hyperbolic);
        assert_eq!(c.at_infinity.rank, Some(6));
        assert_eq!(c.infinity_count, 130);
    }

    fn reduction_contract(p: &Params, planes: &[(Vec<Fe>, Fe)]) {
        let f = p.tower.field();
        let set = crate::varieties::build_b(p);
        let hs: Vec<_> = planes.iter().map(|(m, d)| crate::geometry::Hyperplane::from_affine(f, m, *d)).collect();
        let sizes = crate::geometry::intersection_sizes(&set, &hs);
        for ((m, d), size) in planes.iter().zip(sizes) {
            let qd = reduce(p, m, *d).unwrap();
            assert_eq!(qd.count_points(Where::Affine, Budget::default()).unwrap(), size, "m={m:?} d={d:?}");
        }
    }

    #[test]
    fn reduction_matches_geometry_exhaustively_q3_r3() {
        let t = gf9();
        for (a, b) in [(Fe(1), Fe(3)), (Fe(4), Fe(5)), (Fe(2), Fe(7))] {
            let p = Params::new(t.clone(), 3, a, b).unwrap();
            let planes: Vec<_> = all_slopes(&t, 3).collect();
            assert_eq!(planes.len(), 729);
            reduction_contract(&p, &planes);
        }
    }

    #[test]
    fn reduction_matches_geometry_on_random_planes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        for (q, r) in [(3u32, 4usize), (4, 3), (5, 3)] {
            let t = Arc::new(FieldTower::for_q(q).unwrap());
            let q2 = t.q2() as u16;
            let (_, p) = crate::varieties::sweep(&t, r).into_iter().map(|(p, c)| (c, p)).nth(3).unwrap();
            let planes: Vec<_> = (0..50)
                .map(|_| ((0..r - 1).map(|_| Fe(rng.gen_range(0..q2))).collect(), Fe(rng.gen_range(0..q2))))
                .collect();
            reduction_contract(&p, &planes);
        }
    }

    #[test]
    fn thmc_sigma_census_q3_r4() {
        let t = gf9();
        let p = Params::new(t, 4, Fe(1), Fe(3)).unwrap();
        let tag = classify(&p).tag;
        assert_eq!(tag, ClassTag::ThmC);
        let c = sigma_census(&p, tag, Budget::default()).unwrap();
        assert_eq!(c, SigmaCensus { sigma0: 6399, sigma_plus: 81, sigma_minus: 81, other: 0 });
        for m in [[Fe(0); 3], [Fe(1), Fe(2), Fe(8)]] {
            let qc = classify_quadric(&reduce(&p, &m, Fe(4)).unwrap(), Budget::default()).unwrap();
            assert_eq!(qc.infinity_count, 121);
        }
    }

    #[test]
    fn alpha_has_trace_zero_for_every_mb1_even_pair_q4() {
        let t = Arc::new(FieldTower::for_q(4).unwrap());
        let pairs: Vec<_> =
            crate::varieties::sweep(&t, 2).into_iter().filter(|(_, c)| c.tag == ClassTag::Mb1Even).collect();
        assert!(!pairs.is_empty());
        for (p, c) in pairs {
            let alpha = alpha_invariant(&p, c.tag).unwrap();
            assert!(t.in_subfield(alpha));
            assert_eq!(t.absolute_trace(alpha).unwrap(), Fe::ZERO, "a={:?} b={:?}", p.a, p.b);
        }
    }

    #[test]
    fn census_rejects_wrong_class() {
        let t = gf9();
        let p = Params::new(t, 3, Fe(1), Fe(3)).unwrap();
        let tag = classify(&p).tag;
        assert!(matches!(sigma_census(&p, tag, Budget::default()), Err(Error::Unsupported(_))));
        assert!(matches!(alpha_invariant(&p, tag), Err(Error::Unsupported(_))));
    }
}
