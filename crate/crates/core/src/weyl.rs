//! Finite Weyl group, extended affine Weyl group elements `t_β w̄`, and the
//! chamber reductions built on them.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{q, vadd, vneg, vscale, vzero, QMatrix, Q};
use crate::rootsys::{AffineWeight, FiniteRootSystem, FiniteWeight};

/// Default cap on `|W̄|` for full enumeration. Covers everything up to `E6`.
pub const DEFAULT_WEYL_BOUND: u128 = 1_000_000;

/// Which coroot basis a level is built on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Principal,
    Coprincipal,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Principal => write!(f, "principal"),
            Variant::Coprincipal => write!(f, "coprincipal"),
        }
    }
}

/// Element of `W̄` as an integer matrix acting on fundamental-weight
/// coordinates (column vectors).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeylElement {
    n: usize,
    m: Vec<i64>,
    sign: i8,
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeylElement(sign {}, {:?})", self.sign, self.rows())
    }
}

impl WeylElement {
    pub fn identity(n: usize) -> Self {
        let mut m = vec![0; n * n];
        for i in 0..n {
            m[i * n + i] = 1;
        }
        Self { n, m, sign: 1 }
    }

    /// Simple reflection `s_i`.
    pub fn simple(rs: &FiniteRootSystem, i: usize) -> Self {
        let n = rs.rank();
        let mut w = Self::identity(n);
        for k in 0..n {
            w.m[k * n + i] -= rs.cartan[k][i] as i64;
        }
        w.sign = -1;
        w
    }

    /// Reflection `s_α` in an arbitrary root.
    pub fn reflection(rs: &FiniteRootSystem, alpha: &[Q]) -> Result<Self> {
        rs.check_dim(alpha)?;
        let cv = rs.coroot_of(alpha)?;
        let n = rs.rank();
        // ⟨Λ̄_j, α∨⟩ = (Λ̄_j, ν(α∨)).
        let pair: Vec<Q> = (0..n).map(|j| rs.inner(&rs.fundamental_weight(j), &cv)).collect();
        let mut w = Self::identity(n);
        for k in 0..n {
            for j in 0..n {
                let v = alpha[k] * pair[j];
                if !v.is_integer() {
                    return Err(Error::Inconsistent("reflection matrix is not integral".into()));
                }
                w.m[k * n + j] -= v.to_integer() as i64;
            }
        }
        w.sign = -1;
        Ok(w)
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let n = rows.len();
        let m: Vec<i64> = rows.iter().flatten().copied().collect();
        let qm =
            QMatrix::from_int_rows(&rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect::<Vec<_>>());
        let sign = if qm.det() > Q::zero() { 1 } else { -1 };
        Self { n, m, sign }
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.m[i * self.n + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|i| self.m[i * self.n..(i + 1) * self.n].to_vec()).collect()
    }

    pub fn to_qmatrix(&self) -> QMatrix {
        QMatrix::from_int_rows(&self.rows().iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect::<Vec<_>>())
    }

    pub fn apply(&self, v: &[Q]) -> Vec<Q> {
        let n = self.n;
        (0..n)
            .map(|i| {
                let mut s = Q::zero();
                for j in 0..n {
                    let e = self.m[i * n + j];
                    if e != 0 {
                        s += v[j] * q(e as i128);
                    }
                }
                s
            })
            .collect()
    }

    pub fn apply_f64(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n).map(|i| (0..n).map(|j| self.m[i * n + j] as f64 * v[j]).sum()).collect()
    }

    pub fn apply_affine(&self, v: &AffineWeight) -> AffineWeight {
        AffineWeight::new(self.apply(&v.finite), v.level, v.delta)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let n = self.n;
        let mut m = vec![0i64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.m[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    m[i * n + j] += a * other.m[k * n + j];
                }
            }
        }
        WeylElement { n, m, sign: self.sign * other.sign }
    }

    pub fn inverse(&self) -> WeylElement {
        let inv = self.to_qmatrix().inverse().expect("Weyl matrices are invertible");
        let rows = inv.to_integer_rows().expect("Weyl matrices are unimodular");
        WeylElement { n: self.n, m: rows.into_iter().flatten().map(|x| x as i64).collect(), sign: self.sign }
    }
}

/// The `|W̄|` formula by type, used to refuse enumeration up front.
pub fn weyl_order(rs: &FiniteRootSystem) -> u128 {
    use crate::rootsys::Family::*;
    let n = rs.rank() as u128;
    let fact = |k: u128| (1..=k).product::<u128>();
    match rs.spec.family {
        A => fact(n + 1),
        B | C => (1u128 << n) * fact(n),
        D => (1u128 << (n - 1)) * fact(n),
        E => match n {
            6 => 51_840,
            7 => 2_903_040,
            _ => 696_729_600,
        },
        F => 1152,
        G => 12,
    }
}

/// Fully enumerated `W̄`, identity first.
#[derive(Clone, Debug)]
pub struct WeylGroup {
    elements: Vec<WeylElement>,
    lookup: HashMap<Vec<i64>, usize>,
}

impl WeylGroup {
    pub fn enumerate(rs: &FiniteRootSystem) -> Result<Self> {
        Self::enumerate_bounded(rs, DEFAULT_WEYL_BOUND)
    }

    pub fn enumerate_bounded(rs: &FiniteRootSystem, bound: u128) -> Result<Self> {
        let order = weyl_order(rs);
        if order > bound {
            return Err(Error::Capacity { what: format!("Weyl group of {}", rs.spec), size: order, bound });
        }
        let n = rs.rank();
        let gens: Vec<WeylElement> = (0..n).map(|i| WeylElement::simple(rs, i)).collect();
        let id = WeylElement::identity(n);
        let mut lookup = HashMap::new();
        lookup.insert(id.m.clone(), 0);
        let mut elements = vec![id];
        let mut queue = VecDeque::from([0usize]);
        while let Some(k) = queue.pop_front() {
            for g in &gens {
                let w = g.compose(&elements[k]);
                if !lookup.contains_key(&w.m) {
                    lookup.insert(w.m.clone(), elements.len());
                    queue.push_back(elements.len());
                    elements.push(w);
                    if elements.len() as u128 > bound {
                        return Err(Error::Capacity {
                            what: format!("Weyl group of {}", rs.spec),
                            size: elements.len() as u128,
                            bound,
                        });
                    }
                }
            }
        }
        Ok(Self { elements, lookup })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[WeylElement] {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = &WeylElement> {
        self.elements.iter()
    }

    pub fn index_of(&self, w: &WeylElement) -> Option<usize> {
        self.lookup.get(&w.m).copied()
    }
}

/// Reflect at negative simple coordinates until `ξ` is dominant. Returns
/// `(w, wξ)`.
pub fn to_dominant(rs: &FiniteRootSystem, xi: &[Q], strict: bool) -> Result<(WeylElement, FiniteWeight)> {
    rs.check_dim(xi)?;
    let n = rs.rank();
    let cap = 4 * rs.positive_roots.len() + 8;
    let mut w = WeylElement::identity(n);
    let mut v = xi.to_vec();
    let mut steps = 0;
    while let Some(i) = (0..n).find(|&i| v[i].is_negative()) {
        steps += 1;
        if steps > cap {
            return Err(Error::NonTerminating(cap));
        }
        let s = WeylElement::simple(rs, i);
        v = s.apply(&v);
        w = s.compose(&w);
    }
    if strict && v.iter().any(Zero::is_zero) {
        return Err(Error::OnWall(format!("{v:?}")));
    }
    Ok((w, v))
}

/// `y = t_β ∘ w̄`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtAffineElement {
    pub beta: FiniteWeight,
    pub wbar: WeylElement,
}

impl ExtAffineElement {
    pub fn identity(n: usize) -> Self {
        Self { beta: vzero(n), wbar: WeylElement::identity(n) }
    }

    pub fn translation(beta: FiniteWeight) -> Self {
        let n = beta.len();
        Self { beta, wbar: WeylElement::identity(n) }
    }

    pub fn finite(wbar: WeylElement) -> Self {
        Self { beta: vzero(wbar.rank()), wbar }
    }

    pub fn new(beta: FiniteWeight, wbar: WeylElement) -> Self {
        Self { beta, wbar }
    }

    pub fn act(&self, rs: &FiniteRootSystem, lam: &AffineWeight) -> AffineWeight {
        let w = self.wbar.apply_affine(lam);
        translate(rs, &self.beta, &w)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &ExtAffineElement) -> ExtAffineElement {
        ExtAffineElement { beta: vadd(&self.beta, &self.wbar.apply(&other.beta)), wbar: self.wbar.compose(&other.wbar) }
    }

    pub fn inverse(&self) -> ExtAffineElement {
        let winv = self.wbar.inverse();
        ExtAffineElement { beta: vneg(&winv.apply(&self.beta)), wbar: winv }
    }

    pub fn sign(&self) -> i8 {
        self.wbar.sign()
    }
}

/// `t_β(λ) = λ + kβ − ((λ̄, β) + ½(β, β)k)δ`.
pub fn translate(rs: &FiniteRootSystem, beta: &[Q], lam: &AffineWeight) -> AffineWeight {
    let k = lam.level;
    let shift = rs.inner(&lam.finite, beta) + rs.norm2(beta) * k / q(2);
    AffineWeight::new(vadd(&lam.finite, &vscale(beta, k)), k, lam.delta - shift)
}

/// Finite part `u` of the affine node: `θ` for principal, `θ_short` for
/// coprincipal. The affine simple reflection is `t_{q·u} s_u`.
pub fn affine_node_root(rs: &FiniteRootSystem, variant: Variant) -> FiniteWeight {
    match variant {
        Variant::Principal => rs.theta.clone(),
        Variant::Coprincipal => rs.theta_short.clone(),
    }
}

/// The basis `S_(q)` as images in `h*`, affine node first.
pub fn coroot_basis(rs: &FiniteRootSystem, q_: i128, variant: Variant) -> Vec<AffineWeight> {
    let node = match variant {
        Variant::Principal => vneg(&rs.theta),
        Variant::Coprincipal => vscale(&rs.theta_short, q(-rs.rvee)),
    };
    let mut out = vec![AffineWeight::new(node, Q::zero(), q(q_))];
    out.extend(rs.simple_coroots.iter().map(|c| AffineWeight::finite(c.clone())));
    out
}

/// Generators of the affine group acting with basis `S_(q)`: `s_0` first.
pub fn affine_generators(rs: &FiniteRootSystem, q_: i128, variant: Variant) -> Result<Vec<ExtAffineElement>> {
    let u = affine_node_root(rs, variant);
    let s0 = ExtAffineElement::new(vscale(&u, q(q_)), WeylElement::reflection(rs, &u)?);
    let mut out = vec![s0];
    out.extend((0..rs.rank()).map(|i| ExtAffineElement::finite(WeylElement::simple(rs, i))));
    Ok(out)
}

/// Reduce `ξ` (positive level) into the closed chamber of `S_(q)`.
pub fn affine_to_dominant(
    rs: &FiniteRootSystem,
    q_: i128,
    variant: Variant,
    xi: &AffineWeight,
    strict: bool,
) -> Result<(ExtAffineElement, AffineWeight)> {
    rs.check_dim(&xi.finite)?;
    if !xi.level.is_positive() {
        return Err(Error::InvalidLevel(format!("chamber reduction needs positive level, got {}", xi.level)));
    }
    let basis = coroot_basis(rs, q_, variant);
    let gens = affine_generators(rs, q_, variant)?;
    let n = rs.rank();
    // Distance to the chamber is finite; the cap only guards against bugs.
    let spread: Q = xi.finite.iter().map(|c| c.abs()).sum::<Q>() / xi.level;
    let cap = (4 * rs.positive_roots.len() + 16) * (spread.to_integer().unsigned_abs() as usize + 4)
        / q_.max(1) as usize
        + 64;
    let mut w = ExtAffineElement::identity(n);
    let mut v = xi.clone();
    let mut steps = 0;
    loop {
        let neg = basis.iter().position(|c| rs.inner_affine(&v, c).is_negative());
        let Some(i) = neg else { break };
        steps += 1;
        if steps > cap {
            return Err(Error::NonTerminating(cap));
        }
        v = gens[i].act(rs, &v);
        w = gens[i].compose(&w);
    }
    if strict && basis.iter().any(|c| rs.inner_affine(&v, c).is_zero()) {
        return Err(Error::OnWall(v.to_string()));
    }
    Ok((w, v))
}

/// `σ_j = t_{Λ̄_j} σ̄_j` for the special nodes of the chosen variant, identity
/// first.
pub fn extended_generators(rs: &FiniteRootSystem, variant: Variant) -> Result<Vec<ExtAffineElement>> {
    let n = rs.rank();
    let (set, rho_level) = match variant {
        Variant::Principal => (&rs.j_set, q(rs.hvee)),
        Variant::Coprincipal => (&rs.lj_set, Q::one() + rs.langlands_marks.iter().sum::<Q>()),
    };
    let mut out = Vec::with_capacity(set.len());
    for &j in set {
        if j == 0 {
            out.push(ExtAffineElement::identity(n));
            continue;
        }
        let lam = rs.fundamental_weight(j - 1);
        out.push(ExtAffineElement::new(lam.clone(), sigma_bar(rs, j - 1, rho_level)?));
    }
    Ok(out)
}

/// `σ̄_j` from `σ̄_j ρ̄ = ρ̄ − h_ρ Λ̄_j`, where `h_ρ` is the level of the
/// relevant affine `ρ`.
fn sigma_bar(rs: &FiniteRootSystem, j: usize, rho_level: Q) -> Result<WeylElement> {
    let v = vadd(&rs.rho, &vscale(&rs.fundamental_weight(j), -rho_level));
    let (w, dom) = to_dominant(rs, &v, true)?;
    if dom != rs.rho {
        return Err(Error::Inconsistent(format!("node {} is not special", j + 1)));
    }
    Ok(w.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qr;

    fn rs(s: &str) -> FiniteRootSystem {
        FiniteRootSystem::from_str_spec(s).unwrap()
    }

    #[test]
    fn small_orders() {
        let a1 = WeylGroup::enumerate(&rs("A1")).unwrap();
        assert_eq!(a1.len(), 2);
        assert_eq!(a1.elements()[1].sign(), -1);
        let g2 = WeylGroup::enumerate(&rs("G2")).unwrap();
        assert_eq!(g2.len(), 12);
        assert_eq!(g2.iter().filter(|w| w.sign() == 1).count(), 6);
        assert!(g2.elements()[0].is_identity());
    }

    #[test]
    fn f4_order_matches_degrees() {
        let f4 = WeylGroup::enumerate(&rs("F4")).unwrap();
        assert_eq!(f4.len(), 2 * 6 * 8 * 12);
    }

    #[test]
    fn e7_refused() {
        let err = WeylGroup::enumerate(&rs("E7")).unwrap_err();
        assert!(matches!(err, Error::Capacity { size: 2_903_040, .. }));
    }

    #[test]
    fn dominant_reduction() {
        let a1 = rs("A1");
        let (w, v) = to_dominant(&a1, &[q(-1)], true).unwrap();
        assert_eq!(v, vec![q(1)]);
        assert_eq!(w, WeylElement::simple(&a1, 0));

        let a2 = rs("A2");
        let s1 = WeylElement::simple(&a2, 0);
        let s2 = WeylElement::simple(&a2, 1);
        let xi = s1.compose(&s2).apply(&a2.rho);
        let (w, v) = to_dominant(&a2, &xi, true).unwrap();
        assert_eq!(v, a2.rho);
        assert_eq!(w, s2.compose(&s1));
        assert_eq!(w.sign(), 1);
        let (w2, _) = to_dominant(&a2, &v, true).unwrap();
        assert!(w2.is_identity());
        assert!(matches!(to_dominant(&a2, &[q(0), q(-1)], true), Err(Error::OnWall(_))));
    }

    #[test]
    fn translation_of_lambda0() {
        let a1 = rs("A1");
        let t = ExtAffineElement::translation(a1.theta.clone());
        let got = t.act(&a1, &AffineWeight::lambda0(1));
        assert_eq!(got, AffineWeight::new(a1.theta.clone(), q(1), q(-1)));
    }

    #[test]
    fn finite_part_fixes_lambda0_and_delta() {
        let g = rs("B3");
        let grp = WeylGroup::enumerate(&g).unwrap();
        for w in grp.iter() {
            let e = ExtAffineElement::finite(w.clone());
            assert_eq!(e.act(&g, &AffineWeight::lambda0(3)), AffineWeight::lambda0(3));
            assert_eq!(e.act(&g, &AffineWeight::delta(3)), AffineWeight::delta(3));
        }
    }

    #[test]
    fn sigma_bar_negates_fundamental_weight() {
        for t in ["A1", "A3", "B3", "C3", "D4", "D5", "E6", "E7"] {
            let r = rs(t);
            let sig = extended_generators(&r, Variant::Principal).unwrap();
            assert_eq!(sig.len(), r.j_set.len());
            for (s, &j) in sig.iter().zip(&r.j_set).skip(1) {
                let lam = r.fundamental_weight(j - 1);
                assert_eq!(s.wbar.apply(&vneg(&r.theta)), r.simple_roots[j - 1], "{t}");
                // σ_j⁻¹ = σ_{j*}; then σ̄_j Λ̄_{j*} = −Λ̄_j.
                let inv = s.inverse();
                let (k, _) = sig.iter().enumerate().find(|(_, o)| o.wbar == inv.wbar).expect("inverse is special");
                let jstar = r.j_set[k];
                assert_eq!(s.wbar.apply(&r.fundamental_weight(jstar - 1)), vneg(&lam), "{t} j={j}");
                if jstar == j {
                    assert_eq!(s.wbar.apply(&lam), vneg(&lam));
                }
            }
        }
        // The weights σ̄_j⁻¹Λ̄_j are pairwise distinct.
        let e6 = rs("E6");
        let sig = extended_generators(&e6, Variant::Principal).unwrap();
        let imgs: Vec<_> = sig
            .iter()
            .zip(&e6.j_set)
            .skip(1)
            .map(|(s, &j)| s.wbar.inverse().apply(&e6.fundamental_weight(j - 1)))
            .collect();
        assert_ne!(imgs[0], imgs[1]);
    }

    #[test]
    fn sigma_permutes_affine_basis() {
        for t in ["A2", "B3", "C2", "D4", "E6"] {
            let r = rs(t);
            let basis = coroot_basis(&r, 1, Variant::Principal);
            for s in extended_generators(&r, Variant::Principal).unwrap() {
                for c in &basis {
                    // Coroots transform like level-0 weights.
                    let img = s.act(&r, c);
                    assert!(basis.contains(&img), "{t}: {img}");
                }
            }
        }
        let g2 = rs("G2");
        assert_eq!(extended_generators(&g2, Variant::Coprincipal).unwrap().len(), 1);
        let c3 = rs("C3");
        let basis = coroot_basis(&c3, 1, Variant::Coprincipal);
        for s in extended_generators(&c3, Variant::Coprincipal).unwrap() {
            for c in &basis {
                assert!(basis.contains(&s.act(&c3, c)));
            }
        }
    }

    #[test]
    fn a1_affine_reduction() {
        let a1 = rs("A1");
        let xi = AffineWeight::new(vec![q(3)], q(1), q(0));
        let (_, v) = affine_to_dominant(&a1, 2, Variant::Principal, &xi, false).unwrap();
        for c in coroot_basis(&a1, 2, Variant::Principal) {
            assert!(!a1.inner_affine(&v, &c).is_negative());
        }
        let xi = AffineWeight::new(vec![qr(7, 3)], q(1), q(0));
        let (w, v) = affine_to_dominant(&a1, 2, Variant::Principal, &xi, true).unwrap();
        for c in coroot_basis(&a1, 2, Variant::Principal) {
            assert!(a1.inner_affine(&v, &c).is_positive());
        }
        assert_eq!(w.act(&a1, &xi), v);
    }

    #[test]
    fn composition_law() {
        let b2 = rs("B2");
        let grp = WeylGroup::enumerate(&b2).unwrap();
        let lam = AffineWeight::new(vec![qr(1, 3), qr(-2, 5)], qr(7, 2), qr(1, 7));
        let y1 = ExtAffineElement::new(vec![q(1), q(-2)], grp.elements()[3].clone());
        let y2 = ExtAffineElement::new(vec![q(0), q(3)], grp.elements()[5].clone());
        assert_eq!(y1.compose(&y2).act(&b2, &lam), y1.act(&b2, &y2.act(&b2, &lam)));
        assert_eq!(y1.inverse().act(&b2, &y1.act(&b2, &lam)), lam);
    }

    #[test]
    fn reflection_in_highest_root() {
        let b3 = rs("B3");
        let s = WeylElement::reflection(&b3, &b3.theta).unwrap();
        assert_eq!(s.apply(&b3.theta), vneg(&b3.theta));
        assert_eq!(s.compose(&s), WeylElement::identity(3));
        assert_eq!(s.sign(), -1);
    }
}
