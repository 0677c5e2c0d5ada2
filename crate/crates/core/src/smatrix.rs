//! Modular `S` and `T` matrices of admissible levels, and the `SL₂(Z)` checks.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::admissible::{enumerate_admissible, AdmissibleLabel, LevelData};
use crate::error::Result;
use crate::linalg::{fmt_q, q, qr, to_f64, vadd, vscale, Q};
use crate::phase::{ExactPhase, PhaseSum};
use crate::weyl::{Variant, WeylGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SKind {
    Principal,
    Coprincipal,
    Walgebra,
}

/// How the exponentials of a Weyl sum are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PhaseMode {
    /// Exact rational exponents grouped mod 1, one rounding at the end.
    #[default]
    Exact,
    /// Plain double-precision exponentials, kept for comparison.
    Float,
}

#[derive(Clone, Debug)]
pub struct SMatrix {
    pub labels: Vec<String>,
    pub entries: DMatrix<Complex64>,
    pub kind: SKind,
    /// `|P̄/pqQ̄∨|`, `|Q̄*/pqQ̄|`, or the W-algebra normalisation denominator.
    pub norm_const: u128,
    pub p: i128,
    pub q: i128,
    pub type_name: String,
    /// Underlying admissible labels (empty for W-algebra matrices).
    pub admissible: Vec<AdmissibleLabel>,
}

pub fn label_name(lam: &[Q]) -> String {
    format!("[{}]", lam.iter().map(fmt_q).collect::<Vec<_>>().join(", "))
}

impl SMatrix {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let n = self.dim();
        let re: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| self.entries[(i, j)].re).collect()).collect();
        let im: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| self.entries[(i, j)].im).collect()).collect();
        json!({
            "labels": self.labels,
            "re": re,
            "im": im,
            "kind": self.kind,
            "p": self.p,
            "q": self.q,
            "type": self.type_name,
        })
    }

    /// CSV rows `i,j,abs,arg_over_2pi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,label_i,label_j,abs,arg_over_2pi\n");
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                let z = self.entries[(i, j)];
                let _ = writeln!(
                    out,
                    "{i},{j},\"{}\",\"{}\",{:.15e},{:.15e}",
                    self.labels[i],
                    self.labels[j],
                    z.norm(),
                    z.arg() / TAU
                );
            }
        }
        out
    }
}

/// Precomputed per-label data for fast entries.
struct Prepared {
    /// `w ν̄` for every `w`.
    orbit: Vec<Vec<Vec<Q>>>,
    /// `G ν̄`, so that `(x, ν̄) = x · Gν̄`.
    gnu: Vec<Vec<Q>>,
    gbeta: Vec<Vec<Q>>,
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn prepare(ld: &LevelData, w: &WeylGroup, labels: &[AdmissibleLabel]) -> Prepared {
    let g = &ld.rs.gram;
    Prepared {
        orbit: labels.iter().map(|l| w.iter().map(|x| x.apply(&l.nu.finite)).collect()).collect(),
        gnu: labels.iter().map(|l| g.apply(&l.nu.finite)).collect(),
        gbeta: labels.iter().map(|l| g.apply(&l.beta)).collect(),
    }
}

fn entry_prepared(
    ld: &LevelData,
    w: &WeylGroup,
    labels: &[AdmissibleLabel],
    prep: &Prepared,
    (a, b): (usize, usize),
    scale: f64,
    mode: PhaseMode,
) -> Complex64 {
    let (la, lb) = (&labels[a], &labels[b]);
    let pre = -(dot(&la.nu.finite, &prep.gbeta[b])
        + dot(&lb.nu.finite, &prep.gbeta[a])
        + qr(ld.p, ld.q) * dot(&la.beta, &prep.gbeta[b]));
    let npos = ld.rs.positive_roots.len() as i128;
    let prefactor = ExactPhase::new(pre + qr(npos, 4));
    let sign = (la.ybar.sign() * lb.ybar.sign()) as f64;
    let c = qr(ld.q, ld.p);
    let weyl_sum = match mode {
        PhaseMode::Exact => {
            let mut s = PhaseSum::new();
            for (x, wel) in prep.orbit[a].iter().zip(w.iter()) {
                s.push(ExactPhase::new(-c * dot(x, &prep.gnu[b])), wel.sign() as i64);
            }
            s.to_complex()
        }
        PhaseMode::Float => {
            let cf = to_f64(&c);
            prep.orbit[a]
                .iter()
                .zip(w.iter())
                .map(|(x, wel)| Complex64::from_polar(wel.sign() as f64, -TAU * cf * to_f64(&dot(x, &prep.gnu[b]))))
                .sum()
        }
    };
    prefactor.to_complex() * weyl_sum * sign * scale
}

/// Single entry `a(λ, λ')`.
pub fn smatrix_entry(ld: &LevelData, w: &WeylGroup, l: &AdmissibleLabel, lp: &AdmissibleLabel) -> Result<Complex64> {
    let labels = [l.clone(), lp.clone()];
    let prep = prepare(ld, w, &labels);
    let scale = 1.0 / (ld.s_norm()? as f64).sqrt();
    Ok(entry_prepared(ld, w, &labels, &prep, (0, 1), scale, PhaseMode::Exact))
}

pub fn build_smatrix(ld: &LevelData) -> Result<SMatrix> {
    build_smatrix_with(ld, PhaseMode::Exact)
}

pub fn build_smatrix_with(ld: &LevelData, mode: PhaseMode) -> Result<SMatrix> {
    let w = WeylGroup::enumerate(&ld.rs)?;
    let labels = enumerate_admissible(ld)?;
    let n = labels.len();
    let norm = ld.s_norm()?;
    let scale = 1.0 / (norm as f64).sqrt();
    let prep = prepare(ld, &w, &labels);
    let vals: Vec<Complex64> = (0..n * n)
        .into_par_iter()
        .map(|k| entry_prepared(ld, &w, &labels, &prep, (k / n, k % n), scale, mode))
        .collect();
    Ok(SMatrix {
        labels: labels.iter().map(|l| label_name(l.lambda_bar())).collect(),
        entries: DMatrix::from_row_slice(n, n, &vals),
        kind: match ld.variant {
            Variant::Principal => SKind::Principal,
            Variant::Coprincipal => SKind::Coprincipal,
        },
        norm_const: norm,
        p: ld.p,
        q: ld.q,
        type_name: ld.rs.spec.to_string(),
        admissible: labels,
    })
}

/// Conformal weight `h_λ = (λ̄, λ̄ + 2ρ̄)/(2(k + h∨))`.
pub fn conformal_weight(ld: &LevelData, lam: &[Q]) -> Q {
    let rs = &ld.rs;
    rs.inner(lam, &vadd(lam, &vscale(&rs.rho, q(2)))) / (q(2) * ld.kh())
}

/// Exact exponents `h_λ − c_k/24` of the diagonal `T`.
pub fn tmatrix_exponents(ld: &LevelData, labels: &[AdmissibleLabel]) -> Vec<Q> {
    labels.iter().map(|l| conformal_weight(ld, l.lambda_bar()) - ld.c_k / q(24)).collect()
}

pub fn tmatrix(ld: &LevelData, labels: &[AdmissibleLabel]) -> DMatrix<Complex64> {
    diag_from_exponents(&tmatrix_exponents(ld, labels))
}

pub fn diag_from_exponents(ex: &[Q]) -> DMatrix<Complex64> {
    let d: Vec<Complex64> = ex.iter().map(|e| ExactPhase::new(*e).to_complex()).collect();
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d))
}

#[derive(Clone, Debug, Serialize)]
pub struct Sl2Report {
    pub symmetric: f64,
    pub unitary: f64,
    pub s4: f64,
    pub st3: f64,
    /// Deviation of `S²` from a matrix with one unimodular entry per row.
    pub s2_permutation: f64,
    /// `conj[i]`: the column of the nonzero entry in row `i` of `S²`.
    pub conjugation: Vec<usize>,
    pub tol: f64,
}

impl Sl2Report {
    pub fn max_deviation(&self) -> f64 {
        [self.symmetric, self.unitary, self.s4, self.st3, self.s2_permutation].into_iter().fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_deviation() < self.tol && is_permutation(&self.conjugation)
    }
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&i| i < seen.len() && !std::mem::replace(&mut seen[i], true))
}

pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn verify_sl2_relations(s: &DMatrix<Complex64>, t: &DMatrix<Complex64>, tol: f64) -> Sl2Report {
    let n = s.nrows();
    let id = DMatrix::<Complex64>::identity(n, n);
    let s2 = s * s;
    let st = s * t;
    let mut conj = Vec::with_capacity(n);
    let mut perm_dev: f64 = 0.0;
    for i in 0..n {
        let row = s2.row(i);
        let (j, big) =
            row.iter()
                .enumerate()
                .map(|(j, z)| (j, z.norm()))
                .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        conj.push(j);
        perm_dev = perm_dev.max((big - 1.0).abs());
        for (k, z) in row.iter().enumerate() {
            if k != j {
                perm_dev = perm_dev.max(z.norm());
            }
        }
    }
    Sl2Report {
        symmetric: max_abs(&(s - s.transpose())),
        unitary: max_abs(&(s * s.adjoint() - &id)),
        s4: max_abs(&(&s2 * &s2 - &id)),
        st3: max_abs(&(&st * &st * &st - &s2)),
        s2_permutation: perm_dev,
        conjugation: conj,
        tol,
    }
}

/// `√(2/p) sin(π(a+1)(b+1)/p)` for integrable `A1` at `k = p − 2`.
pub fn a1_integrable_closed_form(p: i128, a: i128, b: i128) -> f64 {
    (2.0 / p as f64).sqrt() * (std::f64::consts::PI * ((a + 1) * (b + 1)) as f64 / p as f64).sin()
}
