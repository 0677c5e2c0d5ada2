//! Principal and coprincipal admissible weights.
//!
//! A label is the triple `(ν, ȳ, β)` with `λ = t_β ȳ φ(ν) − ρ`. Both variants
//! share one code path; they differ in the affine node of `S_(q)` and in the
//! translation lattice `M` (`Q̄∨` or `Q̄`).

use std::collections::{BTreeMap, HashSet};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{fmt_q, q, qr, vadd, vneg, vscale, vsub, Lattice, Q};
use crate::rootsys::{AffineWeight, FiniteRootSystem, FiniteWeight};
use crate::weyl::{
    affine_to_dominant, coroot_basis, extended_generators, translate, ExtAffineElement, Variant, WeylElement,
};

/// Cap on the number of `(ν, β)` pairs scanned during enumeration.
pub const DEFAULT_LABEL_BOUND: usize = 2_000_000;

#[derive(Clone, Debug)]
pub struct LevelData {
    pub rs: FiniteRootSystem,
    pub p: i128,
    pub q: i128,
    pub k: Q,
    pub variant: Variant,
    pub c_k: Q,
}

impl LevelData {
    pub fn new(rs: &FiniteRootSystem, p: i128, q_: i128) -> Result<Self> {
        if p <= 0 || q_ <= 0 {
            return Err(Error::InvalidLevel(format!("p = {p} and q = {q_} must be positive")));
        }
        if p.gcd(&q_) != 1 {
            return Err(Error::InvalidLevel(format!("p = {p} and q = {q_} are not coprime")));
        }
        let variant = if q_.gcd(&rs.rvee) == 1 { Variant::Principal } else { Variant::Coprincipal };
        if variant == Variant::Coprincipal && q_ % rs.rvee != 0 {
            return Err(Error::InvalidLevel(format!("lacing number {} does not divide q = {q_}", rs.rvee)));
        }
        let min_p = match variant {
            Variant::Principal => q(rs.hvee),
            Variant::Coprincipal => Q::one() + rs.langlands_marks.iter().sum::<Q>(),
        };
        if q(p) < min_p {
            return Err(Error::InvalidLevel(format!("{variant} level needs p ≥ {}, got p = {p}", fmt_q(&min_p))));
        }
        let k = qr(p, q_) - q(rs.hvee);
        let c_k = k * q(rs.dim() as i128) / qr(p, q_);
        Ok(Self { rs: rs.clone(), p, q: q_, k, variant, c_k })
    }

    /// Level from `k` with `k + h∨ = p/q` in lowest terms.
    pub fn from_k(rs: &FiniteRootSystem, k: Q) -> Result<Self> {
        let s = k + q(rs.hvee);
        if !s.is_positive() {
            return Err(Error::InvalidLevel(format!("k + h∨ = {} must be positive", fmt_q(&s))));
        }
        Self::new(rs, *s.numer(), *s.denom())
    }

    /// `k + h∨`.
    pub fn kh(&self) -> Q {
        qr(self.p, self.q)
    }

    /// Translation lattice `M` of the group `W̄ ⋉ t_{qM}`.
    pub fn m_lattice(&self) -> &Lattice {
        match self.variant {
            Variant::Principal => &self.rs.coroot_lattice,
            Variant::Coprincipal => &self.rs.root_lattice,
        }
    }

    /// Marks bounding `ν̄`: comarks, or the twisted marks `ᴸa_i`.
    pub fn nu_marks(&self) -> &[Q] {
        match self.variant {
            Variant::Principal => &self.rs.comarks,
            Variant::Coprincipal => &self.rs.langlands_marks,
        }
    }

    /// Special nodes acting on solutions (`J` or `ᴸJ`).
    pub fn special_set(&self) -> &[usize] {
        match self.variant {
            Variant::Principal => &self.rs.j_set,
            Variant::Coprincipal => &self.rs.lj_set,
        }
    }

    /// `|P̄/pqQ̄∨|` or `|Q̄*/pqQ̄|`.
    pub fn s_norm(&self) -> Result<u128> {
        let pq = self.p * self.q;
        match self.variant {
            Variant::Principal => self.rs.weight_lattice.index_of(&self.rs.coroot_lattice.scaled(pq)),
            Variant::Coprincipal => self.rs.coweight_lattice.index_of(&self.rs.root_lattice.scaled(pq)),
        }
    }

    pub fn describe(&self) -> String {
        format!("{} at p/q = {}/{} ({}, k = {})", self.rs.spec, self.p, self.q, self.variant, fmt_q(&self.k))
    }
}

/// `S_(q)` for the level, affine node first.
pub fn coroot_basis_sq(ld: &LevelData) -> Vec<AffineWeight> {
    coroot_basis(&ld.rs, ld.q, ld.variant)
}

/// `φ(Λ₀) = Λ₀/q`, `φ(δ) = qδ`, identity on `h̄*`.
pub fn phi_apply(ld: &LevelData, lam: &AffineWeight) -> AffineWeight {
    AffineWeight::new(lam.finite.clone(), lam.level / q(ld.q), lam.delta * q(ld.q))
}

pub fn phi_inverse(ld: &LevelData, lam: &AffineWeight) -> AffineWeight {
    AffineWeight::new(lam.finite.clone(), lam.level * q(ld.q), lam.delta / q(ld.q))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleLabel {
    /// Regular dominant weight of level `p`.
    pub nu: AffineWeight,
    pub ybar: WeylElement,
    /// Full translation part of `y`, already including `qγ`.
    pub beta: FiniteWeight,
    /// `y φ(ν) − ρ` with the `δ`-coefficient set to zero.
    pub lambda: AffineWeight,
}

impl AdmissibleLabel {
    pub fn y(&self) -> ExtAffineElement {
        ExtAffineElement::new(self.beta.clone(), self.ybar.clone())
    }

    pub fn lambda_bar(&self) -> &FiniteWeight {
        &self.lambda.finite
    }
}

/// `λ = yφ(ν) − ρ`, `δ` dropped.
pub fn lambda_from_triple(ld: &LevelData, nu: &AffineWeight, y: &ExtAffineElement) -> AffineWeight {
    let v = y.act(&ld.rs, &phi_apply(ld, nu));
    v.sub(&ld.rs.affine_rho()).mod_delta()
}

/// `δ`-coefficient positive, or zero with a positive finite part.
pub fn is_positive_coroot(rs: &FiniteRootSystem, c: &AffineWeight) -> bool {
    if c.delta.is_positive() {
        return true;
    }
    if c.delta.is_negative() {
        return false;
    }
    let coords = rs.root_lattice.coords(&c.finite);
    coords.iter().all(|x| !x.is_negative()) && coords.iter().any(|x| x.is_positive())
}

/// Regular level-1 point of the fundamental alcove: `ρ̄/h`, optionally nudged.
fn alcove_point(rs: &FiniteRootSystem, nudge: Option<&[Q]>) -> AffineWeight {
    let h = q(rs.h);
    let fin: Vec<Q> = match nudge {
        None => rs.rho.iter().map(|x| x / h).collect(),
        Some(c) => c.to_vec(),
    };
    AffineWeight::new(fin, Q::one(), Q::zero())
}

/// For `β ∈ Q̄*`, the unique `(ȳ, γ)` with `t_{β+qγ}ȳ(S_(q)) ⊂ Δ₊∨`.
pub fn ga_from_beta(ld: &LevelData, beta: &[Q]) -> Result<(WeylElement, FiniteWeight)> {
    ga_from_beta_with(ld, beta, None)
}

/// Same as [`ga_from_beta`] with an explicit regular alcove point `ξ̄`
/// (each coordinate positive, `(ξ̄, θ_short∨) < 1`).
pub fn ga_from_beta_with(ld: &LevelData, beta: &[Q], xi: Option<&[Q]>) -> Result<(WeylElement, FiniteWeight)> {
    let rs = &ld.rs;
    rs.check_dim(beta)?;
    rs.coweight_lattice.require(beta, "β")?;
    let xi = alcove_point(rs, xi);
    let shifted = translate(rs, &vneg(beta), &xi);
    let (w, _) = affine_to_dominant(rs, ld.q, ld.variant, &shifted, true)?;
    let y = w.compose(&ExtAffineElement::translation(vneg(beta))).inverse();
    let gamma = vscale(&vsub(&y.beta, beta), Q::one() / q(ld.q));
    ld.m_lattice().require(&gamma, "γ")?;
    for c in coroot_basis_sq(ld) {
        if !is_positive_coroot(rs, &y.act(rs, &c)) {
            return Err(Error::Inconsistent("transported coroot basis is not positive".into()));
        }
    }
    Ok((y.wbar, gamma))
}

/// Regular dominant `ν̄` at level `p`: `ν̄_i ≥ 1` and `p − Σ c_i ν̄_i ≥ 1`.
pub fn regular_nus(ld: &LevelData) -> Vec<FiniteWeight> {
    let marks = ld.nu_marks().to_vec();
    let mut out = Vec::new();
    let mut cur = vec![0i128; marks.len()];
    fn rec(i: usize, budget: Q, marks: &[Q], cur: &mut Vec<i128>, out: &mut Vec<FiniteWeight>) {
        if i == marks.len() {
            if budget >= Q::one() {
                out.push(cur.iter().map(|&x| q(x)).collect());
            }
            return;
        }
        let mut v = 1;
        while budget - marks[i] * q(v) >= Q::one() {
            cur[i] = v;
            rec(i + 1, budget - marks[i] * q(v), marks, cur, out);
            v += 1;
        }
    }
    rec(0, q(ld.p), &marks, &mut cur, &mut out);
    out
}

/// Coset representatives of `Q̄*/qM`.
pub fn beta_cosets(ld: &LevelData) -> Result<Vec<FiniteWeight>> {
    ld.rs.coweight_lattice.coset_reps(&ld.m_lattice().scaled(ld.q))
}

/// All labels, one per distinct `λ̄`, sorted by `λ̄`.
pub fn enumerate_admissible(ld: &LevelData) -> Result<Vec<AdmissibleLabel>> {
    enumerate_admissible_bounded(ld, DEFAULT_LABEL_BOUND)
}

pub fn enumerate_admissible_bounded(ld: &LevelData, bound: usize) -> Result<Vec<AdmissibleLabel>> {
    let nus = regular_nus(ld);
    let betas = beta_cosets(ld)?;
    let pairs = nus.len() * betas.len();
    if pairs > bound {
        return Err(Error::Capacity {
            what: "admissible (ν, β) pairs".into(),
            size: pairs as u128,
            bound: bound as u128,
        });
    }
    let per_beta: Vec<(FiniteWeight, WeylElement, FiniteWeight)> = betas
        .par_iter()
        .map(|b| {
            let (ybar, gamma) = ga_from_beta(ld, b)?;
            Ok((b.clone(), ybar, gamma))
        })
        .collect::<Result<_>>()?;
    let mut found: BTreeMap<FiniteWeight, (AdmissibleLabel, usize)> = BTreeMap::new();
    for (b, ybar, gamma) in &per_beta {
        let full = vadd(b, &vscale(gamma, q(ld.q)));
        let y = ExtAffineElement::new(full.clone(), ybar.clone());
        for nu in &nus {
            let nu_w = AffineWeight::new(nu.clone(), q(ld.p), Q::zero());
            let lambda = lambda_from_triple(ld, &nu_w, &y);
            found
                .entry(lambda.finite.clone())
                .and_modify(|e| e.1 += 1)
                .or_insert_with(|| (AdmissibleLabel { nu: nu_w, ybar: ybar.clone(), beta: full.clone(), lambda }, 1));
        }
    }
    let expected = ld.special_set().len();
    for (lam, (_, mult)) in &found {
        if *mult != expected {
            return Err(Error::Inconsistent(format!(
                "λ̄ = {:?} reached {mult} times, expected {expected}",
                lam.iter().map(fmt_q).collect::<Vec<_>>()
            )));
        }
    }
    Ok(found.into_values().map(|(l, _)| l).collect())
}

/// Result of the admissibility decision procedure.
#[derive(Clone, Debug)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    /// Simple system of the integral coroots `R(λ)` (empty when not admissible).
    pub integral_basis: Vec<AffineWeight>,
    /// First violating coroot, if any.
    pub violation: Option<AffineWeight>,
}

/// Decide `⟨λ + ρ, α∨⟩ ∉ Z≤0` over all positive real coroots and assemble the
/// simple system of `R(λ)`.
pub fn verify_admissible(ld: &LevelData, lam: &AffineWeight) -> Result<AdmissibilityReport> {
    let rs = &ld.rs;
    rs.check_dim(&lam.finite)?;
    if lam.level != ld.k {
        return Err(Error::LevelMismatch { expected: fmt_q(&ld.k), got: fmt_q(&lam.level) });
    }
    let kh = ld.kh();
    let shifted = vadd(&lam.finite, &rs.rho);
    let mut minimal = Vec::new();
    for alpha in rs.all_roots() {
        let cv = rs.coroot_of(&alpha)?;
        // Long coroots (short roots) advance in steps of r∨ K.
        let step = if rs.is_long(&alpha) { 1 } else { rs.rvee };
        let x = rs.inner(&shifted, &cv);
        let positive = rs.root_lattice.coords(&alpha).iter().all(|c| !c.is_negative());
        let t0 = if positive { 0 } else { 1 };
        let hit = (t0..t0 + ld.q).map(|t| (t * step, x + q(t * step) * kh)).find(|(_, v)| v.is_integer());
        if let Some((m, v)) = hit {
            let c = AffineWeight::new(cv, Q::zero(), q(m));
            if !v.is_positive() {
                return Ok(AdmissibilityReport { admissible: false, integral_basis: vec![], violation: Some(c) });
            }
            minimal.push(c);
        }
    }
    // A positive coroot is simple in R(λ) iff its reflection keeps every other
    // positive integral coroot positive.
    let reflect = |c: &AffineWeight, d: &AffineWeight| {
        let f = q(2) * rs.inner_affine(d, c) / rs.inner_affine(c, c);
        d.sub(&c.scale(f))
    };
    let basis: Vec<AffineWeight> = minimal
        .iter()
        .filter(|c| minimal.iter().all(|d| d == *c || is_positive_coroot(rs, &reflect(c, d))))
        .cloned()
        .collect();
    Ok(AdmissibilityReport { admissible: true, integral_basis: basis, violation: None })
}

/// `ν` not on a wall of the level-`p` chamber, with its Weyl data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuSolution {
    pub nu: AffineWeight,
    pub beta: FiniteWeight,
    pub wbar: WeylElement,
}

fn is_regular_nu(ld: &LevelData, nu: &[Q]) -> bool {
    let marks = ld.nu_marks();
    nu.iter().all(|x| x.is_positive()) && q(ld.p) - nu.iter().zip(marks).map(|(a, b)| a * b).sum::<Q>() > Q::zero()
}

/// Lattice in which the CRT split of `μ̄` is carried out.
fn split_lattice(ld: &LevelData) -> &Lattice {
    match ld.variant {
        Variant::Principal => &ld.rs.coweight_lattice,
        Variant::Coprincipal => &ld.rs.weight_lattice,
    }
}

/// Solve `μ̄ = q w̄(ν̄) + pβ` with `ν` dominant of level `p`.
pub fn decompose_mu(ld: &LevelData, mu: &AffineWeight) -> Result<Vec<MuSolution>> {
    let rs = &ld.rs;
    rs.check_dim(&mu.finite)?;
    let pq = ld.p * ld.q;
    if mu.level != q(pq) {
        return Err(Error::LevelMismatch { expected: pq.to_string(), got: fmt_q(&mu.level) });
    }
    rs.coweight_lattice.require(&mu.finite, "μ̄")?;
    let z = split_lattice(ld);
    let n = z.require(&mu.finite, "μ̄")?;
    // n_i = n_i' q + n_i'' p
    let ext = ld.q.extended_gcd(&ld.p);
    let (a, b) = (ext.x, ext.y);
    let nu0 = z.point(&n.iter().map(|&x| x * a).collect::<Vec<_>>());
    let beta0 = z.point(&n.iter().map(|&x| x * b).collect::<Vec<_>>());
    debug_assert_eq!(vadd(&vscale(&nu0, q(ld.q)), &vscale(&beta0, q(ld.p))), mu.finite);

    let m1 = match ld.variant {
        Variant::Principal => &rs.coroot_lattice,
        Variant::Coprincipal => &rs.root_lattice,
    };
    let mut out: Vec<MuSolution> = Vec::new();
    for zeta in z.coset_reps(m1)? {
        let nu0z = vsub(&nu0, &vscale(&zeta, q(ld.p)));
        let beta0z = vadd(&beta0, &vscale(&zeta, q(ld.q)));
        let start = AffineWeight::new(nu0z, q(ld.p), Q::zero());
        let (u, nu) = affine_to_dominant(rs, 1, ld.variant, &start, false)?;
        let w = u.inverse();
        // ν₀ = t_ξ w̄ ν = w̄ν̄ + pξ at level p.
        let beta = vadd(&beta0z, &vscale(&w.beta, q(ld.q)));
        let sol = MuSolution { nu: nu.mod_delta(), beta, wbar: w.wbar };
        if !out.contains(&sol) {
            out.push(sol);
        }
    }
    Ok(out)
}

/// `(ν_j, β_j, w̄_j) = (σ_j ν, β − q w̄ σ̄_j⁻¹ Λ̄_j, w̄ σ̄_j⁻¹)`.
pub fn sigma_transform(ld: &LevelData, sol: &MuSolution, sigma: &ExtAffineElement) -> MuSolution {
    let sinv = sigma.wbar.inverse();
    let wj = sol.wbar.compose(&sinv);
    MuSolution {
        nu: sigma.act(&ld.rs, &sol.nu).mod_delta(),
        beta: vsub(&sol.beta, &vscale(&wj.apply(&sigma.beta), q(ld.q))),
        wbar: wj,
    }
}

/// The `|J|` (or `|ᴸJ|`) solutions generated from one of them by the `σ_j`.
pub fn sigma_orbit(ld: &LevelData, sol: &MuSolution) -> Result<Vec<MuSolution>> {
    Ok(extended_generators(&ld.rs, ld.variant)?.iter().map(|s| sigma_transform(ld, sol, s)).collect())
}

/// Build the label of a regular `μ`, checking that every solution branch gives
/// the same `λ` and the same transported basis.
pub fn label_from_mu(ld: &LevelData, mu: &AffineWeight) -> Result<AdmissibleLabel> {
    let sols = decompose_mu(ld, mu)?;
    let first = sols.first().ok_or_else(|| Error::Inconsistent("no decomposition".into()))?;
    if !is_regular_nu(ld, &first.nu.finite) {
        return Err(Error::NotRegular(first.nu.to_string()));
    }
    let mut label: Option<AdmissibleLabel> = None;
    let mut basis: Option<HashSet<AffineWeight>> = None;
    for s in &sols {
        let (ybar, gamma) = ga_from_beta(ld, &s.beta)?;
        let full = vadd(&s.beta, &vscale(&gamma, q(ld.q)));
        let y = ExtAffineElement::new(full.clone(), ybar.clone());
        let lambda = lambda_from_triple(ld, &s.nu, &y);
        let sset: HashSet<AffineWeight> = coroot_basis_sq(ld).iter().map(|c| y.act(&ld.rs, c)).collect();
        match (&label, &basis) {
            (Some(l), Some(b)) => {
                if l.lambda != lambda {
                    return Err(Error::Inconsistent(format!("λ depends on the branch: {} vs {}", l.lambda, lambda)));
                }
                if *b != sset {
                    return Err(Error::Inconsistent("y(S_(q)) depends on the branch".into()));
                }
            }
            _ => {
                label = Some(AdmissibleLabel { nu: s.nu.clone(), ybar, beta: full, lambda });
                basis = Some(sset);
            }
        }
    }
    let label = label.unwrap();
    if !verify_admissible(ld, &label.lambda)?.admissible {
        return Err(Error::Inconsistent(format!("λ = {} is not admissible", label.lambda)));
    }
    Ok(label)
}

/// `μ = q ȳ(ν̄) + pβ` at level `pq` for a label.
pub fn mu_of_label(ld: &LevelData, label: &AdmissibleLabel) -> AffineWeight {
    let fin = vadd(&vscale(&label.ybar.apply(&label.nu.finite), q(ld.q)), &vscale(&label.beta, q(ld.p)));
    AffineWeight::new(fin, q(ld.p * ld.q), Q::zero())
}

/// `⟨λ, α∨⟩ ∉ Z` for every finite root.
pub fn is_nondegenerate(rs: &FiniteRootSystem, lam: &[Q]) -> bool {
    rs.positive_roots.iter().all(|a| {
        let cv = rs.coroot_of(a).expect("roots have nonzero norm");
        !rs.inner(lam, &cv).is_integer()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ld(t: &str, p: i128, q_: i128) -> LevelData {
        LevelData::new(&FiniteRootSystem::from_str_spec(t).unwrap(), p, q_).unwrap()
    }

    #[test]
    fn level_validation() {
        let a1 = FiniteRootSystem::from_str_spec("A1").unwrap();
        assert!(LevelData::new(&a1, 4, 2).is_err());
        assert!(LevelData::new(&a1, 1, 2).is_err());
        let g2 = FiniteRootSystem::from_str_spec("G2").unwrap();
        assert_eq!(LevelData::new(&g2, 7, 3).unwrap().variant, Variant::Coprincipal);
        assert!(LevelData::new(&g2, 5, 3).is_err());
        assert_eq!(LevelData::new(&g2, 4, 1).unwrap().variant, Variant::Principal);
        let l = LevelData::from_k(&a1, qr(1, 2)).unwrap();
        assert_eq!((l.p, l.q), (5, 2));
        assert_eq!(l.c_k, qr(3, 5));
    }

    #[test]
    fn sq_basis() {
        let l = ld("A1", 5, 2);
        let s = coroot_basis_sq(&l);
        assert_eq!(s[0], AffineWeight::new(vec![q(-2)], q(0), q(2)));
        assert_eq!(s[1], AffineWeight::finite(vec![q(2)]));
        let g = ld("G2", 7, 3);
        let s = coroot_basis_sq(&g);
        // θ̄∨_long = 3θ_short has norm 2·r∨.
        assert_eq!(g.rs.norm2(&s[0].finite), q(6));
        let one = ld("B3", 5, 1);
        assert_eq!(coroot_basis_sq(&one)[0].finite, vneg(&one.rs.theta));
    }

    #[test]
    fn phi_is_isometry() {
        let l = ld("A2", 4, 3);
        let v = AffineWeight::new(vec![qr(1, 2), q(3)], qr(7, 5), qr(-2, 3));
        let w = AffineWeight::new(vec![q(-1), qr(1, 7)], qr(2, 3), q(4));
        assert_eq!(l.rs.inner_affine(&phi_apply(&l, &v), &phi_apply(&l, &w)), l.rs.inner_affine(&v, &w));
        assert_eq!(phi_inverse(&l, &phi_apply(&l, &v)), v);
        let a1 = ld("A1", 5, 2);
        let x = AffineWeight::new(vec![q(0)], q(1), q(1));
        assert_eq!(phi_apply(&a1, &x), AffineWeight::new(vec![q(0)], qr(1, 2), q(2)));
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_admissible(&ld("A1", 5, 2)).unwrap().len(), 8);
        let int = enumerate_admissible(&ld("A1", 3, 1)).unwrap();
        let lams: Vec<_> = int.iter().map(|l| l.lambda.finite.clone()).collect();
        assert_eq!(lams, vec![vec![q(0)], vec![q(1)]]);
        assert_eq!(enumerate_admissible(&ld("A2", 4, 3)).unwrap().len(), 27);
        let g2 = enumerate_admissible(&ld("G2", 7, 3)).unwrap();
        assert_eq!(g2.len(), 3);
    }

    #[test]
    fn beta_zero_is_trivial() {
        let l = ld("B2", 5, 1);
        let (y, g) = ga_from_beta(&l, &[q(0), q(0)]).unwrap();
        assert!(y.is_identity());
        assert_eq!(g, vec![q(0), q(0)]);
    }

    #[test]
    fn admissibility_checks() {
        let l = ld("A1", 5, 2);
        let vac = AffineWeight::new(vec![q(0)], l.k, Q::zero());
        let rep = verify_admissible(&l, &vac).unwrap();
        assert!(rep.admissible);
        assert_eq!(rep.integral_basis.len(), 2);
        let bad = AffineWeight::new(vec![q(-2)], l.k, Q::zero());
        assert!(!verify_admissible(&l, &bad).unwrap().admissible);
        let wrong = AffineWeight::new(vec![q(0)], q(1), Q::zero());
        assert!(matches!(verify_admissible(&l, &wrong), Err(Error::LevelMismatch { .. })));
    }

    #[test]
    fn integral_basis_is_transported_sq() {
        for (t, p, q_) in [("A1", 5, 2), ("A2", 4, 3), ("B2", 5, 2), ("G2", 7, 3), ("B2", 4, 1)] {
            let l = ld(t, p, q_);
            for lab in enumerate_admissible(&l).unwrap() {
                let rep = verify_admissible(&l, &lab.lambda).unwrap();
                assert!(rep.admissible, "{t}");
                let want: HashSet<_> = coroot_basis_sq(&l).iter().map(|c| lab.y().act(&l.rs, c)).collect();
                let got: HashSet<_> = rep.integral_basis.into_iter().collect();
                assert_eq!(got, want, "{t} {}", lab.lambda);
                for c in &want {
                    let v = l.rs.inner_affine(&lab.lambda.add(&l.rs.affine_rho()), c);
                    assert!(v.is_integer() && v >= Q::one());
                }
            }
        }
    }

    #[test]
    fn mu_round_trip() {
        for (t, p, q_) in [("A1", 5, 2), ("A2", 4, 3), ("G2", 7, 3), ("B2", 5, 2), ("C2", 5, 2)] {
            let l = ld(t, p, q_);
            for lab in enumerate_admissible(&l).unwrap() {
                let mu = mu_of_label(&l, &lab);
                let sols = decompose_mu(&l, &mu).unwrap();
                assert_eq!(sols.len(), l.special_set().len(), "{t}");
                for s in &sols {
                    let back = vadd(&vscale(&s.wbar.apply(&s.nu.finite), q(l.q)), &vscale(&s.beta, q(l.p)));
                    assert_eq!(back, mu.finite);
                }
                let orbit = sigma_orbit(&l, &sols[0]).unwrap();
                for o in &orbit {
                    assert!(sols.contains(o), "{t}: σ-orbit leaves the solution set");
                }
                assert_eq!(label_from_mu(&l, &mu).unwrap().lambda, lab.lambda);
            }
        }
    }

    #[test]
    fn nondegenerate_a1() {
        let l = ld("A1", 2, 5);
        let labs = enumerate_admissible(&l).unwrap();
        let nd = labs.iter().filter(|x| is_nondegenerate(&l.rs, x.lambda_bar())).count();
        assert_eq!(nd, 4);
    }
}
