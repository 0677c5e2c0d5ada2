//! Finite root systems of simple type, their lattices, and the affine
//! bookkeeping (`Λ₀`, `δ`, `K`) layered on top.
//!
//! Weights live in the basis of fundamental weights. Simple roots follow
//! Bourbaki numbering; in particular for `G2` the first simple root is short.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{fmt_q, q, qr, vadd, vscale, vsub, vzero, Lattice, QMatrix, Q};

/// A finite weight in fundamental-weight coordinates.
pub type FiniteWeight = Vec<Q>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RootSystemSpec {
    pub family: Family,
    pub rank: usize,
}

impl RootSystemSpec {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 4,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if !ok || rank > 8 {
            return Err(Error::InvalidType(format!("{family:?}{rank}")));
        }
        Ok(Self { family, rank })
    }

    /// Every supported simple type of rank at most 8.
    pub fn all() -> Vec<RootSystemSpec> {
        let mut out = Vec::new();
        for fam in [Family::A, Family::B, Family::C, Family::D, Family::E, Family::F, Family::G] {
            for rank in 1..=8 {
                if let Ok(s) = Self::new(fam, rank) {
                    out.push(s);
                }
            }
        }
        out
    }
}

impl fmt::Display for RootSystemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.family, self.rank)
    }
}

impl FromStr for RootSystemSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let mut chars = t.chars();
        let letter = chars.next().ok_or_else(|| Error::InvalidType(s.to_string()))?;
        let family = match letter.to_ascii_uppercase() {
            'A' => Family::A,
            'B' => Family::B,
            'C' => Family::C,
            'D' => Family::D,
            'E' => Family::E,
            'F' => Family::F,
            'G' => Family::G,
            _ => return Err(Error::InvalidType(s.to_string())),
        };
        let rank: usize = chars.as_str().parse().map_err(|_| Error::InvalidType(s.to_string()))?;
        Self::new(family, rank)
    }
}

/// `λ̄ + kΛ₀ + dδ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineWeight {
    pub finite: FiniteWeight,
    pub level: Q,
    pub delta: Q,
}

impl AffineWeight {
    pub fn new(finite: FiniteWeight, level: Q, delta: Q) -> Self {
        Self { finite, level, delta }
    }

    pub fn finite(finite: FiniteWeight) -> Self {
        Self { finite, level: Q::zero(), delta: Q::zero() }
    }

    pub fn lambda0(rank: usize) -> Self {
        Self { finite: vzero(rank), level: Q::one(), delta: Q::zero() }
    }

    pub fn delta(rank: usize) -> Self {
        Self { finite: vzero(rank), level: Q::zero(), delta: Q::one() }
    }

    pub fn add(&self, o: &AffineWeight) -> AffineWeight {
        AffineWeight { finite: vadd(&self.finite, &o.finite), level: self.level + o.level, delta: self.delta + o.delta }
    }

    pub fn sub(&self, o: &AffineWeight) -> AffineWeight {
        AffineWeight { finite: vsub(&self.finite, &o.finite), level: self.level - o.level, delta: self.delta - o.delta }
    }

    pub fn scale(&self, s: Q) -> AffineWeight {
        AffineWeight { finite: vscale(&self.finite, s), level: self.level * s, delta: self.delta * s }
    }

    /// Drop the `δ` component.
    pub fn mod_delta(&self) -> AffineWeight {
        AffineWeight { finite: self.finite.clone(), level: self.level, delta: Q::zero() }
    }
}

impl fmt::Display for AffineWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.finite.iter().map(fmt_q).collect();
        write!(f, "[{}] + {}Λ₀ + {}δ", c.join(", "), fmt_q(&self.level), fmt_q(&self.delta))
    }
}

/// Complete Cartan datum of a simple type.
#[derive(Clone, Debug)]
pub struct FiniteRootSystem {
    pub spec: RootSystemSpec,
    /// `cartan[i][j] = ⟨α_i∨, α_j⟩`; column `j` holds the coordinates of `α_j`.
    pub cartan: Vec<Vec<i128>>,
    /// `(α_i, α_i)/2`.
    pub d: Vec<Q>,
    pub gram: QMatrix,
    pub positive_roots: Vec<FiniteWeight>,
    /// Positive roots in simple-root coordinates, aligned with `positive_roots`.
    pub positive_roots_simple: Vec<Vec<i128>>,
    pub simple_roots: Vec<FiniteWeight>,
    /// Simple coroots, as their images in `h̄*` under the form.
    pub simple_coroots: Vec<FiniteWeight>,
    pub theta: FiniteWeight,
    pub theta_short: FiniteWeight,
    pub marks: Vec<i128>,
    pub comarks: Vec<Q>,
    /// Marks of the twisted datum, `r∨·θ_short = Σ ᴸa_i α_i∨`.
    pub langlands_marks: Vec<Q>,
    pub h: i128,
    pub hvee: i128,
    pub rvee: i128,
    pub rho: FiniteWeight,
    pub rhovee: FiniteWeight,
    /// Special indices, with `0` standing for the affine node.
    pub j_set: Vec<usize>,
    pub lj_set: Vec<usize>,
    pub root_lattice: Lattice,
    pub coroot_lattice: Lattice,
    pub weight_lattice: Lattice,
    pub coweight_lattice: Lattice,
}

fn cartan_matrix(spec: RootSystemSpec) -> Vec<Vec<i128>> {
    let n = spec.rank;
    let mut a = vec![vec![0i128; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut link = |i: usize, j: usize| {
        a[i][j] = -1;
        a[j][i] = -1;
    };
    match spec.family {
        Family::A | Family::B | Family::C | Family::F | Family::G => {
            for i in 0..n - 1 {
                link(i, i + 1);
            }
        }
        Family::D => {
            for i in 0..n - 2 {
                link(i, i + 1);
            }
            link(n - 3, n - 1);
        }
        Family::E => {
            link(0, 2);
            link(2, 3);
            link(1, 3);
            for i in 3..n - 1 {
                link(i, i + 1);
            }
        }
    }
    match spec.family {
        Family::B => a[n - 1][n - 2] = -2,
        Family::C => a[n - 2][n - 1] = -2,
        Family::F => a[2][1] = -2,
        Family::G => a[0][1] = -3,
        _ => {}
    }
    a
}

/// Symmetrizer `d_i` with `d_i·a_ij = d_j·a_ji`, long roots at `1`.
fn symmetrizer(cartan: &[Vec<i128>]) -> Vec<Q> {
    let n = cartan.len();
    let mut d: Vec<Option<Q>> = vec![None; n];
    d[0] = Some(Q::one());
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for j in 0..n {
            if i != j && cartan[i][j] != 0 && d[j].is_none() {
                d[j] = Some(d[i].unwrap() * qr(cartan[i][j], cartan[j][i]));
                queue.push_back(j);
            }
        }
    }
    let d: Vec<Q> = d.into_iter().map(Option::unwrap).collect();
    let max = d.iter().copied().max().unwrap();
    d.into_iter().map(|x| x / max).collect()
}

impl FiniteRootSystem {
    pub fn build(spec: RootSystemSpec) -> Result<Self> {
        let spec = RootSystemSpec::new(spec.family, spec.rank)?;
        let n = spec.rank;
        let cartan = cartan_matrix(spec);
        let d = symmetrizer(&cartan);
        let a = QMatrix::from_int_rows(&cartan);
        let ainv = a.inverse().ok_or_else(|| Error::Inconsistent("singular Cartan matrix".into()))?;
        let mut dmat = QMatrix::zeros(n, n);
        for i in 0..n {
            dmat[(i, i)] = d[i];
        }
        let gram = dmat.mul(&ainv);

        let simple_roots: Vec<FiniteWeight> = (0..n).map(|j| (0..n).map(|k| q(cartan[k][j])).collect()).collect();
        let simple_coroots: Vec<FiniteWeight> = (0..n).map(|j| vscale(&simple_roots[j], Q::one() / d[j])).collect();

        // Closure of the simple roots under simple reflections, in simple-root
        // coordinates.
        let mut seen: HashSet<Vec<i128>> = HashSet::new();
        let mut queue = VecDeque::new();
        for i in 0..n {
            let mut e = vec![0i128; n];
            e[i] = 1;
            seen.insert(e.clone());
            queue.push_back(e);
        }
        while let Some(b) = queue.pop_front() {
            for i in 0..n {
                let pair: i128 = (0..n).map(|j| b[j] * cartan[i][j]).sum();
                let mut s = b.clone();
                s[i] -= pair;
                if seen.insert(s.clone()) {
                    queue.push_back(s);
                }
            }
        }
        let mut pos: Vec<Vec<i128>> = seen.into_iter().filter(|r| r.iter().all(|&c| c >= 0)).collect();
        pos.sort_by_key(|r| (r.iter().sum::<i128>(), std::cmp::Reverse(r.clone())));

        let to_weight =
            |r: &[i128]| -> FiniteWeight { (0..n).map(|k| q((0..n).map(|j| r[j] * cartan[k][j]).sum())).collect() };
        let norm_simple = |r: &[i128]| -> Q {
            let mut s = Q::zero();
            for i in 0..n {
                for j in 0..n {
                    s += q(r[i] * r[j] * cartan[i][j]) * d[i];
                }
            }
            s
        };
        let positive_roots: Vec<FiniteWeight> = pos.iter().map(|r| to_weight(r)).collect();

        let theta_s = pos.last().unwrap().clone();
        let short_norm = pos.iter().map(|r| norm_simple(r)).min().unwrap();
        let theta_short_s = pos.iter().rev().find(|r| norm_simple(r) == short_norm).unwrap().clone();
        let rvee = (q(2) / short_norm).to_integer();

        let marks = theta_s.clone();
        let comarks: Vec<Q> = (0..n).map(|i| q(marks[i]) * d[i]).collect();
        let langlands_marks: Vec<Q> = (0..n).map(|i| q(rvee * theta_short_s[i]) * d[i]).collect();
        let hvee_q = Q::one() + comarks.iter().sum::<Q>();
        if !hvee_q.is_integer() {
            return Err(Error::Inconsistent(format!("dual Coxeter number {} is not integral", fmt_q(&hvee_q))));
        }
        let hvee = hvee_q.to_integer();
        let h = 1 + marks.iter().sum::<i128>();

        let rho = vec![Q::one(); n];
        let rhovee: FiniteWeight = d.iter().map(|di| Q::one() / di).collect();

        let mut j_set = vec![0];
        j_set.extend((0..n).filter(|&i| marks[i] == 1).map(|i| i + 1));
        let mut lj_set = vec![0];
        lj_set.extend((0..n).filter(|&i| langlands_marks[i] == Q::one()).map(|i| i + 1));

        let root_lattice = Lattice::new("Q", QMatrix::from_rows(&simple_roots))?;
        let coroot_lattice = Lattice::new("Q∨", QMatrix::from_rows(&simple_coroots))?;
        let weight_lattice = Lattice::new("P", QMatrix::identity(n))?;
        let cow: Vec<FiniteWeight> = (0..n)
            .map(|i| {
                let mut e = vzero(n);
                e[i] = Q::one() / d[i];
                e
            })
            .collect();
        let coweight_lattice = Lattice::new("Q*", QMatrix::from_rows(&cow))?;

        Ok(Self {
            spec,
            theta: to_weight(&theta_s),
            theta_short: to_weight(&theta_short_s),
            cartan,
            d,
            gram,
            positive_roots,
            positive_roots_simple: pos,
            simple_roots,
            simple_coroots,
            marks,
            comarks,
            langlands_marks,
            h,
            hvee,
            rvee,
            rho,
            rhovee,
            j_set,
            lj_set,
            root_lattice,
            coroot_lattice,
            weight_lattice,
            coweight_lattice,
        })
    }

    pub fn from_str_spec(s: &str) -> Result<Self> {
        Self::build(s.parse()?)
    }

    pub fn rank(&self) -> usize {
        self.spec.rank
    }

    pub fn dim(&self) -> usize {
        self.rank() + 2 * self.positive_roots.len()
    }

    pub fn is_simply_laced(&self) -> bool {
        self.rvee == 1
    }

    pub fn check_dim<T>(&self, v: &[T]) -> Result<()> {
        if v.len() != self.rank() {
            return Err(Error::DimensionMismatch { expected: self.rank(), got: v.len() });
        }
        Ok(())
    }

    /// `(a, b)` on finite weights.
    pub fn inner(&self, a: &[Q], b: &[Q]) -> Q {
        let n = self.rank();
        let mut s = Q::zero();
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                s += a[i] * self.gram[(i, j)] * b[j];
            }
        }
        s
    }

    pub fn checked_inner(&self, a: &[Q], b: &[Q]) -> Result<Q> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        Ok(self.inner(a, b))
    }

    pub fn norm2(&self, a: &[Q]) -> Q {
        self.inner(a, a)
    }

    /// Affine form: `(Λ₀, Λ₀) = (δ, δ) = 0`, `(Λ₀, δ) = 1`.
    pub fn inner_affine(&self, a: &AffineWeight, b: &AffineWeight) -> Q {
        self.inner(&a.finite, &b.finite) + a.level * b.delta + a.delta * b.level
    }

    pub fn checked_inner_affine(&self, a: &AffineWeight, b: &AffineWeight) -> Result<Q> {
        self.check_dim(&a.finite)?;
        self.check_dim(&b.finite)?;
        Ok(self.inner_affine(a, b))
    }

    /// `⟨λ, α∨⟩ = 2(λ, α)/(α, α)` for a real affine root `α`.
    pub fn coroot_pairing(&self, lam: &AffineWeight, alpha: &AffineWeight) -> Result<Q> {
        let n = self.checked_inner_affine(alpha, alpha)?;
        if n.is_zero() {
            return Err(Error::ZeroNormRoot);
        }
        Ok(q(2) * self.inner_affine(lam, alpha) / n)
    }

    /// `⟨λ, K⟩`.
    pub fn level_of(&self, lam: &AffineWeight) -> Q {
        lam.level
    }

    /// Image of the coroot of `α` in `h̄*`.
    pub fn coroot_of(&self, alpha: &[Q]) -> Result<FiniteWeight> {
        let n = self.norm2(alpha);
        if n.is_zero() {
            return Err(Error::ZeroNormRoot);
        }
        Ok(vscale(alpha, q(2) / n))
    }

    pub fn is_long(&self, alpha: &[Q]) -> bool {
        self.norm2(alpha) == q(2)
    }

    pub fn all_roots(&self) -> Vec<FiniteWeight> {
        let mut out = self.positive_roots.clone();
        out.extend(self.positive_roots.iter().map(|r| r.iter().map(|x| -x).collect::<Vec<_>>()));
        out
    }

    pub fn fundamental_weight(&self, i: usize) -> FiniteWeight {
        let mut e = vzero(self.rank());
        e[i] = Q::one();
        e
    }

    /// `ρ = ρ̄ + h∨Λ₀`.
    pub fn affine_rho(&self) -> AffineWeight {
        AffineWeight::new(self.rho.clone(), q(self.hvee), Q::zero())
    }

    pub fn twisted_datum(&self) -> Result<TwistedAffineDatum> {
        TwistedAffineDatum::new(self)
    }

    /// Classical count of positive roots for the type.
    pub fn expected_positive_root_count(spec: RootSystemSpec) -> usize {
        let n = spec.rank;
        match spec.family {
            Family::A => n * (n + 1) / 2,
            Family::B | Family::C => n * n,
            Family::D => n * (n - 1),
            Family::E => match n {
                6 => 36,
                7 => 63,
                _ => 120,
            },
            Family::F => 24,
            Family::G => 6,
        }
    }
}

/// The twisted affine root system `°Δ` attached to a non-simply-laced type.
#[derive(Clone, Debug)]
pub struct TwistedAffineDatum {
    pub base: FiniteRootSystem,
    /// Level of `°ρ`.
    pub circ_rho_level: Q,
    /// `Π̄∨ ∪ {K − θ̄∨_long}` as images in `h*`; index 0 is the affine node.
    pub twisted_coroot_basis: Vec<AffineWeight>,
    /// Dual basis `°Λ_i`, index 0 first.
    pub fundamental_weights: Vec<AffineWeight>,
    pub lj_set: Vec<usize>,
    pub twisted_type: String,
}

impl TwistedAffineDatum {
    pub fn new(rs: &FiniteRootSystem) -> Result<Self> {
        if rs.is_simply_laced() {
            return Err(Error::SimplyLaced(rs.spec.to_string()));
        }
        let n = rs.rank();
        let long_coroot = vscale(&rs.theta_short, q(rs.rvee));
        let mut basis = vec![AffineWeight::new(long_coroot.iter().map(|x| -x).collect(), Q::zero(), Q::one())];
        basis.extend(rs.simple_coroots.iter().map(|c| AffineWeight::finite(c.clone())));
        let mut fw = vec![AffineWeight::lambda0(n)];
        fw.extend((0..n).map(|i| AffineWeight::new(rs.fundamental_weight(i), rs.langlands_marks[i], Q::zero())));
        Ok(Self {
            base: rs.clone(),
            circ_rho_level: Q::one() + rs.langlands_marks.iter().sum::<Q>(),
            twisted_coroot_basis: basis,
            fundamental_weights: fw,
            lj_set: rs.lj_set.clone(),
            twisted_type: twisted_type_name(rs),
        })
    }
}

/// Name `X_N^(r)` of the twisted affine algebra whose horizontal part has the
/// Langlands-dual root system. The number of roots of `X_N` is
/// `|Δ_long| + r∨|Δ_short|` and its Coxeter number agrees with that of the base.
fn twisted_type_name(rs: &FiniteRootSystem) -> String {
    let long = rs.positive_roots.iter().filter(|r| rs.is_long(r)).count() as i128 * 2;
    let short = rs.positive_roots.len() as i128 * 2 - long;
    let roots = long + rs.rvee * short;
    let n = roots / rs.h;
    let dim = roots + n;
    let name = if n * (n + 2) == dim {
        format!("A{n}")
    } else if n >= 3 && 2 * n * n - n == dim {
        format!("D{n}")
    } else if n == 6 && dim == 78 {
        "E6".to_string()
    } else {
        format!("?{n}")
    };
    format!("{name}^({})", rs.rvee)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rs(s: &str) -> FiniteRootSystem {
        FiniteRootSystem::from_str_spec(s).unwrap()
    }

    #[test]
    fn a1_basics() {
        let a1 = rs("A1");
        assert_eq!(a1.positive_roots.len(), 1);
        assert_eq!(a1.theta, vec![q(2)]);
        assert_eq!(a1.hvee, 2);
        assert_eq!(a1.rvee, 1);
        assert_eq!(a1.inner(&[q(1)], &[q(1)]), qr(1, 2));
        assert_eq!(a1.norm2(&a1.theta), q(2));
    }

    #[test]
    fn g2_data() {
        let g2 = rs("g2");
        assert_eq!(g2.rvee, 3);
        assert_eq!(g2.hvee, 4);
        assert_eq!(g2.h, 6);
        assert_eq!(g2.positive_roots.len(), 6);
        assert_eq!(g2.norm2(&g2.theta_short), qr(2, 3));
        assert_eq!(g2.lj_set, vec![0]);
        assert_eq!(g2.twisted_datum().unwrap().twisted_type, "D4^(3)");
    }

    #[test]
    fn twisted_types() {
        for (t, want) in [("B3", "D4^(2)"), ("B5", "D6^(2)"), ("C3", "A5^(2)"), ("C4", "A7^(2)"), ("F4", "E6^(2)")] {
            assert_eq!(rs(t).twisted_datum().unwrap().twisted_type, want, "{t}");
        }
        assert!(matches!(rs("A3").twisted_datum(), Err(Error::SimplyLaced(_))));
    }

    #[test]
    fn twisted_basis_is_dual() {
        let c2 = rs("C2");
        let tw = c2.twisted_datum().unwrap();
        assert_eq!(tw.twisted_coroot_basis.len(), 3);
        for (i, w) in tw.fundamental_weights.iter().enumerate() {
            for (j, c) in tw.twisted_coroot_basis.iter().enumerate() {
                let want = if i == j { Q::one() } else { Q::zero() };
                assert_eq!(c2.inner_affine(w, c), want);
            }
        }
        // The special nodes represent P̄/Q̄.
        let p = &c2.weight_lattice;
        assert_eq!(p.index_of(&c2.root_lattice).unwrap() as usize, c2.lj_set.len());
    }

    #[test]
    fn affine_form() {
        let a1 = rs("A1");
        let l0 = AffineWeight::lambda0(1);
        let d = AffineWeight::delta(1);
        assert_eq!(a1.inner_affine(&l0, &d), Q::one());
        assert_eq!(a1.inner_affine(&l0, &l0), Q::zero());
        assert_eq!(a1.inner_affine(&d, &d), Q::zero());
    }

    #[test]
    fn rho_pairings() {
        for spec in RootSystemSpec::all() {
            let r = FiniteRootSystem::build(spec).unwrap();
            let rho = r.affine_rho();
            for c in &r.simple_coroots {
                assert_eq!(r.inner(&r.rho, c), Q::one());
            }
            assert_eq!(r.level_of(&rho), q(r.hvee));
            let a0 = AffineWeight::new(r.theta.iter().map(|x| -x).collect(), Q::zero(), Q::one());
            assert_eq!(r.coroot_pairing(&rho, &a0).unwrap(), Q::one());
        }
    }

    #[test]
    fn zero_norm_rejected() {
        let a1 = rs("A1");
        let lam = AffineWeight::lambda0(1);
        assert_eq!(a1.coroot_pairing(&lam, &AffineWeight::delta(1)), Err(Error::ZeroNormRoot));
    }

    #[test]
    fn parse_errors() {
        for bad in ["E5", "F3", "G3", "D3", "B1", "X2", "", "A", "A9"] {
            assert!(bad.parse::<RootSystemSpec>().is_err(), "{bad}");
        }
    }

    #[test]
    fn dim_mismatch() {
        let a2 = rs("A2");
        assert!(matches!(
            a2.checked_inner(&[q(1)], &[q(1), q(0)]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn marks_table() {
        let table: &[(&str, &[i128])] = &[
            ("A4", &[1, 1, 1, 1]),
            ("B4", &[1, 2, 2, 2]),
            ("C4", &[2, 2, 2, 1]),
            ("D5", &[1, 2, 2, 1, 1]),
            ("E6", &[1, 2, 2, 3, 2, 1]),
            ("E7", &[2, 2, 3, 4, 3, 2, 1]),
            ("E8", &[2, 3, 4, 6, 5, 4, 3, 2]),
            ("F4", &[2, 3, 4, 2]),
            ("G2", &[3, 2]),
        ];
        for (t, m) in table {
            assert_eq!(rs(t).marks, m.to_vec(), "{t}");
        }
    }
}
