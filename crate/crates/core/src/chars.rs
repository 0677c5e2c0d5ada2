//! Numeric q-series: Jacobi and lattice theta functions, Weyl–Kac numerators,
//! normalised characters, `Θ_ḡ` and the `x → 0` limits `ψ_λ`.
//!
//! Points `x ∈ h̄` are complex vectors in fundamental-weight coordinates,
//! identified with `h̄*` through the normalised form, so `α(x) = (α, x)`.
//! A weight `λ` evaluates to `e^{2πi[(λ̄, x) − τ·δ-coeff + level·t]}`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::admissible::{enumerate_admissible, AdmissibleLabel, LevelData};
use crate::error::{Error, Result};
use crate::linalg::{q, to_f64, vadd, vscale, vto_f64, Lattice, Q};
use crate::phase::{ExactPhase, KahanC};
use crate::rootsys::FiniteRootSystem;
use crate::smatrix::build_smatrix;
use crate::weyl::WeylGroup;

/// Default absolute tail target for automatically truncated series.
pub const DEFAULT_TARGET: f64 = 1e-12;
/// Largest truncation order chosen automatically.
pub const MAX_ORDER: u32 = 1 << 14;
/// Distance to the nearest polar hyperplane below which `χ` is refused.
pub const POLAR_MARGIN: f64 = 1e-9;
const MAX_POINTS: u128 = 20_000_000;

fn i2pi(z: Complex64) -> Complex64 {
    (Complex64::i() * TAU * z).exp()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalPoint {
    pub tau: Complex64,
    pub x: Vec<Complex64>,
    pub t: Complex64,
}

impl EvalPoint {
    pub fn new(tau: Complex64, x: Vec<Complex64>) -> Result<Self> {
        if !(tau.im > 0.0) || !tau.re.is_finite() {
            return Err(Error::InvalidPoint(format!("Im τ must be positive, got τ = {tau}")));
        }
        if x.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidPoint("x has non-finite coordinates".into()));
        }
        Ok(Self { tau, x, t: Complex64::zero() })
    }

    pub fn real(tau: Complex64, x: &[f64]) -> Result<Self> {
        Self::new(tau, x.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn with_t(mut self, t: Complex64) -> Self {
        self.t = t;
        self
    }

    pub fn nome(&self) -> Complex64 {
        i2pi(self.tau)
    }

    /// `(−1/τ, x/τ, t − (x,x)/2τ)`.
    pub fn s_image(&self, rs: &FiniteRootSystem) -> EvalPoint {
        let tau = -1.0 / self.tau;
        let x: Vec<Complex64> = self.x.iter().map(|c| c / self.tau).collect();
        let t = self.t - cform(rs, &self.x, &self.x) / (2.0 * self.tau);
        EvalPoint { tau, x, t }
    }

    fn map_x(&self, f: impl Fn(Complex64) -> Complex64) -> EvalPoint {
        EvalPoint { tau: self.tau, x: self.x.iter().map(|&c| f(c)).collect(), t: self.t }
    }
}

fn gram_f64(rs: &FiniteRootSystem) -> Vec<Vec<f64>> {
    let n = rs.rank();
    (0..n).map(|i| (0..n).map(|j| to_f64(&rs.gram[(i, j)])).collect()).collect()
}

/// `G·x`, so that `(v, x) = v · Gx`.
fn gram_apply(rs: &FiniteRootSystem, x: &[Complex64]) -> Vec<Complex64> {
    gram_f64(rs).iter().map(|row| row.iter().zip(x).map(|(g, c)| c * g).sum()).collect()
}

/// Complex bilinear `(x, y)`.
pub fn cform(rs: &FiniteRootSystem, x: &[Complex64], y: &[Complex64]) -> Complex64 {
    gram_apply(rs, y).iter().zip(x).map(|(a, b)| a * b).sum()
}

fn dot_rc(v: &[f64], c: &[Complex64]) -> Complex64 {
    v.iter().zip(c).map(|(a, b)| b * a).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesEval {
    pub value: Complex64,
    /// Largest power of `q` kept (or number of product factors).
    pub truncation_order: u32,
    pub tail_bound: f64,
}

/// Fixed order, or the smallest order whose tail bound meets `target`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncation {
    pub order: Option<u32>,
    pub target: f64,
}

impl Default for Truncation {
    fn default() -> Self {
        Self { order: None, target: DEFAULT_TARGET }
    }
}

impl Truncation {
    pub fn fixed(order: u32) -> Self {
        Self { order: Some(order), target: DEFAULT_TARGET }
    }

    pub fn target(target: f64) -> Self {
        Self { order: None, target }
    }

    fn split(&self, parts: usize) -> Truncation {
        Truncation { order: self.order, target: self.target / parts.max(1) as f64 }
    }
}

/// `Θ(τ, z) = q^{1/12} e^{πiz} Π_{n≥1} (1 − e^{−2πiz}q^{n−1})(1 − e^{2πiz}q^n)`.
pub fn theta_jacobi(tau: Complex64, z: Complex64, trunc: Truncation) -> Result<SeriesEval> {
    if !(tau.im > 0.0) {
        return Err(Error::InvalidPoint(format!("Im τ must be positive, got τ = {tau}")));
    }
    let qn = i2pi(tau);
    let a = i2pi(-z);
    let b = i2pi(z);
    let aq = qn.norm();
    let (na, nb) = (a.norm(), b.norm());
    let mut value = i2pi(tau / 12.0) * (Complex64::i() * PI * z).exp();
    let mut qpow = Complex64::new(1.0, 0.0);
    let cap = trunc.order.unwrap_or(MAX_ORDER).max(1);
    let mut n = 0u32;
    loop {
        n += 1;
        value *= (1.0 - a * qpow) * (1.0 - b * qpow * qn);
        qpow *= qn;
        // Remaining factors n' > n: |log(1 − u)| ≤ |u|/(1 − |u|).
        let qa = aq.powi(n as i32);
        let u = na * qa + nb * qa * aq;
        let tail = if na * qa < 1.0 && nb * qa * aq < 1.0 {
            let denom = (1.0 - aq) * (1.0 - (na * qa).max(nb * qa * aq));
            let t = u / denom;
            value.norm() * t.exp_m1()
        } else {
            f64::INFINITY
        };
        let done = match trunc.order {
            Some(_) => n >= cap,
            None => tail <= trunc.target || n >= cap,
        };
        if done {
            return Ok(SeriesEval { value, truncation_order: n, tail_bound: tail });
        }
    }
}

/// Sum-form evaluation `i·θ₁(z|τ)/η(τ)` of the same function, for
/// cross-checking the product.
pub fn theta_jacobi_series(tau: Complex64, z: Complex64, terms: u32) -> Complex64 {
    let mut th = KahanC::default();
    for n in 0..terms as i64 {
        let e = (n as f64 + 0.5).powi(2) / 2.0;
        let s = if n % 2 == 0 { 2.0 } else { -2.0 };
        th.add(i2pi(tau * e) * ((2 * n + 1) as f64 * PI * z).sin() * s);
    }
    let mut eta = KahanC::default();
    for n in -(terms as i64)..=terms as i64 {
        let e = (n * (3 * n - 1)) as f64 / 2.0;
        let s = if n.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        eta.add(i2pi(tau * e) * s);
    }
    let eta = eta.value() * i2pi(tau / 24.0);
    Complex64::i() * th.value() / eta
}

/// Float geometry of a lattice for enumeration and tail estimates.
struct Geometry {
    rank: usize,
    /// Generators in fundamental-weight coordinates.
    basis: Vec<Vec<f64>>,
    /// Gram matrix of the generators.
    h: Vec<Vec<f64>>,
    /// `sqrt((H⁻¹)_ii)`: coordinate extent of the unit ball.
    extent: Vec<f64>,
    covol: f64,
    cover: f64,
}

impl Geometry {
    fn new(rs: &FiniteRootSystem, lat: &Lattice) -> Result<Self> {
        let n = lat.rank();
        let gb = rs.gram.mul(&lat.basis().transpose());
        let hq = lat.basis().mul(&gb);
        let hinv = hq.inverse().ok_or_else(|| Error::Inconsistent(format!("lattice {} is degenerate", lat.name())))?;
        let det = to_f64(&hq.det());
        if !(det > 0.0) || (0..n).any(|i| !hq[(i, i)].is_positive()) {
            return Err(Error::Inconsistent(format!("form is not positive definite on {}", lat.name())));
        }
        let h: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| to_f64(&hq[(i, j)])).collect()).collect();
        let extent = (0..n).map(|i| to_f64(&hinv[(i, i)]).sqrt()).collect();
        let basis = (0..n).map(|i| vto_f64(lat.basis().row(i))).collect();
        let cover = 0.5 * (0..n).map(|i| h[i][i].sqrt()).sum::<f64>();
        Ok(Self { rank: n, basis, h, extent, covol: det.sqrt(), cover })
    }

    fn norm2(&self, u: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.rank {
            for j in 0..self.rank {
                s += u[i] * self.h[i][j] * u[j];
            }
        }
        s
    }

    fn to_weight(&self, u: &[f64]) -> Vec<f64> {
        let n = self.basis[0].len();
        (0..n).map(|k| (0..self.rank).map(|i| u[i] * self.basis[i][k]).sum()).collect()
    }

    /// Upper bound for `Σ |q^{m|v|²/2} e^{2πim(v,x)}|` over `v ∈ L + c`,
    /// `|v| > r0`, using shells of lattice-point counts.
    fn gaussian_tail(&self, m: f64, s: f64, y: f64, r0: f64) -> f64 {
        let l = self.rank as i32;
        let vol = unit_ball_volume(self.rank);
        let width = 0.5 / (PI * s * m).sqrt();
        let peak = if s > 0.0 { y / s } else { f64::INFINITY };
        let f = |r: f64| (-PI * s * m * r * r + TAU * m * y * r).exp();
        let mut total = 0.0;
        let mut r = r0;
        for _ in 0..1_000_000 {
            let count = vol * ((r + width + self.cover).powi(l) - (r - self.cover).max(0.0).powi(l)) / self.covol;
            let sup = if r >= peak {
                f(r)
            } else if r + width <= peak {
                f(r + width)
            } else {
                f(peak)
            };
            let term = count * sup;
            total += term;
            if r > peak && term <= 1e-18 * total.max(1e-300) {
                break;
            }
            r += width;
        }
        total
    }
}

fn unit_ball_volume(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => TAU / n as f64 * unit_ball_volume(n - 2),
    }
}

/// Integer points `n` with `|n_i + c_i| ≤ r·extent_i`.
fn box_points(c: &[f64], extent: &[f64], r: f64) -> Result<Vec<Vec<i64>>> {
    let ranges: Vec<(i64, i64)> =
        c.iter().zip(extent).map(|(ci, e)| ((-r * e - ci).ceil() as i64, (r * e - ci).floor() as i64)).collect();
    let size: u128 = ranges.iter().map(|(a, b)| (b - a + 1).max(0) as u128).product();
    if size > MAX_POINTS {
        return Err(Error::Capacity { what: "lattice enumeration box".into(), size, bound: MAX_POINTS });
    }
    if ranges.iter().any(|(a, b)| b < a) {
        return Ok(Vec::new());
    }
    let mut out = Vec::with_capacity(size as usize);
    let mut cur: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    loop {
        out.push(cur.clone());
        let mut i = cur.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] <= ranges[i].1 {
                break;
            }
            cur[i] = ranges[i].0;
        }
    }
}

fn check_level(m: Q) -> Result<()> {
    if !m.is_positive() {
        return Err(Error::InvalidLevel(format!("theta function needs positive level, got {m}")));
    }
    Ok(())
}

/// `Θ_μ = e^{2πimt} Σ_{v ∈ L + μ̄/m} q^{m|v|²/2} e^{2πim(v, x)}` for a weight of
/// level `m`.
pub fn theta_lattice(
    rs: &FiniteRootSystem,
    lattice: &Lattice,
    m: Q,
    mu: &[Q],
    pt: &EvalPoint,
    trunc: Truncation,
) -> Result<SeriesEval> {
    check_level(m)?;
    rs.check_dim(mu)?;
    rs.check_dim(&pt.x)?;
    let geo = Geometry::new(rs, lattice)?;
    theta_with(rs, &geo, lattice, m, mu, pt, &gram_apply(rs, &pt.x), trunc)
}

#[allow(clippy::too_many_arguments)]
fn theta_with(
    rs: &FiniteRootSystem,
    geo: &Geometry,
    lattice: &Lattice,
    m: Q,
    mu: &[Q],
    pt: &EvalPoint,
    gx: &[Complex64],
    trunc: Truncation,
) -> Result<SeriesEval> {
    let mf = to_f64(&m);
    let s = pt.tau.im;
    let im_x: Vec<Complex64> = pt.x.iter().map(|c| Complex64::new(c.im, 0.0)).collect();
    let y = cform(rs, &im_x, &im_x).re.max(0.0).sqrt();
    let tprefactor = i2pi(pt.t * mf);
    let tail_at = |order: u32| -> f64 {
        let r0 = (2.0 * order as f64 / mf).sqrt();
        geo.gaussian_tail(mf, s, y, r0) * tprefactor.norm()
    };
    let order = match trunc.order {
        Some(n) => n,
        None => {
            let mut hi = 1u32;
            while hi < MAX_ORDER && tail_at(hi) > trunc.target {
                hi *= 2;
            }
            let mut lo = hi / 2;
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if tail_at(mid) > trunc.target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            hi.min(MAX_ORDER)
        }
    };
    let c: Vec<Q> = mu.iter().map(|x| x / m).collect();
    let cf: Vec<f64> = lattice.coords(&c).iter().map(|x| to_f64(&(x - x.round()))).collect();
    let r = (2.0 * order as f64 / mf).sqrt();
    let mut terms: Vec<(f64, Complex64)> = box_points(&cf, &geo.extent, r)?
        .into_iter()
        .filter_map(|n| {
            let u: Vec<f64> = n.iter().zip(&cf).map(|(a, b)| *a as f64 + b).collect();
            let nrm = geo.norm2(&u);
            (mf * nrm / 2.0 <= order as f64 + 1e-9).then(|| {
                let v = geo.to_weight(&u);
                (nrm, i2pi(pt.tau * (mf * nrm / 2.0) + dot_rc(&v, gx) * mf))
            })
        })
        .collect();
    terms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut acc = KahanC::default();
    for (_, z) in &terms {
        acc.add(*z);
    }
    Ok(SeriesEval { value: acc.value() * tprefactor, truncation_order: order, tail_bound: tail_at(order) })
}

/// Exact `q`-expansion of `Θ_μ` at `x = 0`, `t = 0`: pairs
/// `(exponent, multiplicity)` for all exponents `≤ max_exp`.
pub fn theta_lattice_coefficients(
    rs: &FiniteRootSystem,
    lattice: &Lattice,
    m: Q,
    mu: &[Q],
    max_exp: Q,
) -> Result<Vec<(Q, u64)>> {
    check_level(m)?;
    rs.check_dim(mu)?;
    let geo = Geometry::new(rs, lattice)?;
    let c: Vec<Q> = mu.iter().map(|x| x / m).collect();
    let cc = lattice.coords(&c);
    let cf: Vec<f64> = cc.iter().map(to_f64).collect();
    let r = (2.0 * to_f64(&max_exp) / to_f64(&m)).sqrt() + 1e-6;
    let mut out = std::collections::BTreeMap::<Q, u64>::new();
    for n in box_points(&cf, &geo.extent, r)? {
        let coords: Vec<Q> = n.iter().zip(&cc).map(|(a, b)| q(*a as i128) + b).collect();
        let v = lattice.basis().left_apply(&coords);
        let e = m * rs.norm2(&v) / q(2);
        if e <= max_exp {
            *out.entry(e).or_insert(0) += 1;
        }
    }
    Ok(out.into_iter().collect())
}

/// Residual of the lattice theta transformation
/// `Θ_μ(−1/τ, x/τ, t − (x,x)/2τ) = (−iτ)^{ℓ/2}|L*/mL|^{−1/2} Σ_{μ'} e^{−2πi(μ,μ')/m} Θ_{μ'}(τ, x, t)`,
/// relative to `max(1, |lhs|)`.
pub fn theta_transform_residual(
    rs: &FiniteRootSystem,
    lattice: &Lattice,
    m: i128,
    mu: &[Q],
    pt: &EvalPoint,
    trunc: Truncation,
) -> Result<f64> {
    let dual = lattice.dual(&rs.gram)?;
    dual.require(mu, "μ̄")?;
    let sub = lattice.scaled(m);
    let reps = dual.coset_reps(&sub)?;
    let geo = Geometry::new(rs, lattice)?;
    let mq = q(m);
    let spt = pt.s_image(rs);
    let lhs = theta_with(rs, &geo, lattice, mq, mu, &spt, &gram_apply(rs, &spt.x), trunc)?.value;
    let gx = gram_apply(rs, &pt.x);
    let parts = trunc.split(reps.len());
    let terms: Vec<Complex64> = reps
        .par_iter()
        .map(|mp| -> Result<Complex64> {
            let th = theta_with(rs, &geo, lattice, mq, mp, pt, &gx, parts)?;
            Ok(ExactPhase::new(-rs.inner(mu, mp) / mq).to_complex() * th.value)
        })
        .collect::<Result<_>>()?;
    let mut acc = KahanC::default();
    terms.iter().for_each(|z| acc.add(*z));
    let l = rs.rank() as f64;
    let pre = (l / 2.0 * (-Complex64::i() * pt.tau).ln()).exp() / (reps.len() as f64).sqrt();
    let rhs = acc.value() * pre;
    Ok((lhs - rhs).norm() / lhs.norm().max(1.0))
}

/// `ε Σ_{w̄} ε(w̄) Θ_{q w̄ν̄ + pβ}(τ, x/q, t/q²)` over the lattice `M` at level
/// `pq`: the normalised Weyl–Kac numerator of `λ + ρ = t_β ȳ φ(ν)`.
#[allow(clippy::too_many_arguments)]
fn weyl_theta(
    rs: &FiniteRootSystem,
    weyl: &WeylGroup,
    lattice: &Lattice,
    p: i128,
    q_: i128,
    nu: &[Q],
    beta: &[Q],
    sign: i8,
    pt: &EvalPoint,
    trunc: Truncation,
) -> Result<SeriesEval> {
    let geo = Geometry::new(rs, lattice)?;
    let qf = q_ as f64;
    let spt = EvalPoint { tau: pt.tau, x: pt.x.iter().map(|c| c / qf).collect(), t: pt.t / (qf * qf) };
    let gx = gram_apply(rs, &spt.x);
    let level = q(p * q_);
    let parts = trunc.split(weyl.len());
    let pb = vscale(beta, q(p));
    let vals: Vec<SeriesEval> = weyl
        .elements()
        .par_iter()
        .map(|w| {
            let mu = vadd(&vscale(&w.apply(nu), q(q_)), &pb);
            theta_with(rs, &geo, lattice, level, &mu, &spt, &gx, parts)
        })
        .collect::<Result<_>>()?;
    let mut acc = KahanC::default();
    let mut tail = 0.0;
    let mut order = 0;
    for (v, w) in vals.iter().zip(weyl.iter()) {
        acc.add(v.value * w.sign() as f64);
        tail += v.tail_bound;
        order = order.max(v.truncation_order);
    }
    Ok(SeriesEval { value: acc.value() * sign as f64, truncation_order: order, tail_bound: tail })
}

/// Character evaluator for one admissible level.
#[derive(Clone, Debug)]
pub struct Characters {
    pub ld: LevelData,
    pub weyl: WeylGroup,
    pub labels: Vec<AdmissibleLabel>,
}

impl Characters {
    pub fn new(ld: &LevelData) -> Result<Self> {
        Ok(Self { ld: ld.clone(), weyl: WeylGroup::enumerate(&ld.rs)?, labels: enumerate_admissible(ld)? })
    }

    /// `A_{λ+ρ}(τ, x, t)`.
    pub fn numerator(&self, label: &AdmissibleLabel, pt: &EvalPoint, trunc: Truncation) -> Result<SeriesEval> {
        let ld = &self.ld;
        ld.rs.check_dim(&pt.x)?;
        if label.nu.level != q(ld.p) {
            return Err(Error::LevelMismatch { expected: ld.p.to_string(), got: label.nu.level.to_string() });
        }
        weyl_theta(
            &ld.rs,
            &self.weyl,
            ld.m_lattice(),
            ld.p,
            ld.q,
            &label.nu.finite,
            &label.beta,
            label.ybar.sign(),
            pt,
            trunc,
        )
    }

    /// `A_ρ(τ, x, t)`, the untwisted denominator at level `h∨`.
    pub fn denominator(&self, pt: &EvalPoint, trunc: Truncation) -> Result<SeriesEval> {
        let rs = &self.ld.rs;
        rs.check_dim(&pt.x)?;
        let zero = vec![Q::zero(); rs.rank()];
        weyl_theta(rs, &self.weyl, &rs.coroot_lattice, rs.hvee, 1, &rs.rho, &zero, 1, pt, trunc)
    }

    /// `χ_λ = A_{λ+ρ}/A_ρ`.
    pub fn chi(&self, label: &AdmissibleLabel, pt: &EvalPoint, trunc: Truncation) -> Result<SeriesEval> {
        let dist = polar_distance(&self.ld.rs, pt);
        let half = trunc.split(2);
        let den = self.denominator(pt, half)?;
        if dist < POLAR_MARGIN || den.value.norm() < 1e-300 {
            return Err(Error::PolarProximity(den.value.norm()));
        }
        let num = self.numerator(label, pt, half)?;
        let value = num.value / den.value;
        let rel = num.tail_bound / num.value.norm().max(1e-300) + den.tail_bound / den.value.norm();
        let tail = if num.value.norm() > 0.0 { value.norm() * rel } else { num.tail_bound / den.value.norm() };
        Ok(SeriesEval { value, truncation_order: num.truncation_order.max(den.truncation_order), tail_bound: tail })
    }

    /// `χ_λ(τ, x)Θ_ḡ(τ, x)` at a point off the polar hyperplanes.
    pub fn psi_integrand(&self, label: &AdmissibleLabel, pt: &EvalPoint, trunc: Truncation) -> Result<SeriesEval> {
        let c = self.chi(label, pt, trunc.split(2))?;
        let g = theta_g(&self.ld.rs, pt, trunc.split(2))?;
        Ok(SeriesEval {
            value: c.value * g.value,
            truncation_order: c.truncation_order.max(g.truncation_order),
            tail_bound: c.tail_bound * g.value.norm() + g.tail_bound * c.value.norm(),
        })
    }

    /// `ψ_λ(τ) = lim_{x→0} χ_λΘ_ḡ` along `x = εx₀`.
    pub fn psi(
        &self,
        label: &AdmissibleLabel,
        tau: Complex64,
        x0: Option<&[Complex64]>,
        opts: LimitOptions,
    ) -> Result<LimitEval> {
        let rs = &self.ld.rs;
        let dir: Vec<Complex64> = match x0 {
            Some(d) => {
                rs.check_dim(d)?;
                d.to_vec()
            }
            None => default_direction(rs),
        };
        let base = EvalPoint::new(tau, dir)?;
        richardson(opts, |eps| {
            let plus = self.psi_integrand(label, &base.map_x(|c| c * eps), opts.trunc)?;
            let minus = self.psi_integrand(label, &base.map_x(|c| -c * eps), opts.trunc)?;
            Ok(SeriesEval {
                value: (plus.value + minus.value) / 2.0,
                truncation_order: plus.truncation_order.max(minus.truncation_order),
                tail_bound: (plus.tail_bound + minus.tail_bound) / 2.0,
            })
        })
    }

    /// Limit of `χ_λ(τ, εx₀)` as `ε → 0`; finite only when the numerator
    /// vanishes at `x = 0` to the order of the denominator.
    pub fn chi_limit(&self, label: &AdmissibleLabel, tau: Complex64, opts: LimitOptions) -> Result<LimitEval> {
        let base = EvalPoint::new(tau, default_direction(&self.ld.rs))?;
        richardson(opts, |eps| {
            let plus = self.chi(label, &base.map_x(|c| c * eps), opts.trunc)?;
            let minus = self.chi(label, &base.map_x(|c| -c * eps), opts.trunc)?;
            Ok(SeriesEval {
                value: (plus.value + minus.value) / 2.0,
                truncation_order: plus.truncation_order.max(minus.truncation_order),
                tail_bound: (plus.tail_bound + minus.tail_bound) / 2.0,
            })
        })
    }

    /// Independent reduction of `ψ_λ`: `Θ_ḡ/A_ρ` does not depend on `x`, so
    /// `ψ_λ(τ) = q^{|Δ̄₊|/12 − dim/24} Π_n (1 − qⁿ)^{−ℓ} A_{λ+ρ}(τ, 0)`.
    pub fn psi_product_form(&self, label: &AdmissibleLabel, tau: Complex64, trunc: Truncation) -> Result<Complex64> {
        let rs = &self.ld.rs;
        let pt = EvalPoint::new(tau, vec![Complex64::zero(); rs.rank()])?;
        let num = self.numerator(label, &pt, trunc)?.value;
        let qn = i2pi(tau);
        let mut eul = Complex64::new(1.0, 0.0);
        let mut qp = qn;
        while qp.norm() > 1e-18 {
            eul *= 1.0 - qp;
            qp *= qn;
        }
        let ex = rs.positive_roots.len() as f64 / 12.0 - rs.dim() as f64 / 24.0;
        Ok(num * i2pi(tau * ex) / eul.powi(rs.rank() as i32))
    }
}

/// Distance from the nearest zero of `A_ρ`: `min_α dist((α, x), Z + Zτ)`.
pub fn polar_distance(rs: &FiniteRootSystem, pt: &EvalPoint) -> f64 {
    let gx = gram_apply(rs, &pt.x);
    rs.positive_roots
        .iter()
        .map(|a| {
            let z = dot_rc(&vto_f64(a), &gx);
            let n = (z.im / pt.tau.im).round();
            let w = z - pt.tau * n;
            (w - w.re.round()).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// `ρ̄∨` scaled so that `max_α α(x₀) = 1`.
pub fn default_direction(rs: &FiniteRootSystem) -> Vec<Complex64> {
    let top = rs.positive_roots.iter().map(|a| to_f64(&rs.inner(a, &rs.rhovee))).fold(0.0, f64::max);
    rs.rhovee.iter().map(|c| Complex64::new(to_f64(c) / top, 0.0)).collect()
}

pub fn char_numerator(
    ld: &LevelData,
    label: &AdmissibleLabel,
    pt: &EvalPoint,
    trunc: Truncation,
) -> Result<SeriesEval> {
    Characters { ld: ld.clone(), weyl: WeylGroup::enumerate(&ld.rs)?, labels: Vec::new() }.numerator(label, pt, trunc)
}

pub fn char_chi(ld: &LevelData, label: &AdmissibleLabel, pt: &EvalPoint, trunc: Truncation) -> Result<SeriesEval> {
    Characters { ld: ld.clone(), weyl: WeylGroup::enumerate(&ld.rs)?, labels: Vec::new() }.chi(label, pt, trunc)
}

/// `Θ_ḡ(τ, x) = Π_{α∈Δ̄₊} Θ(τ, α(x))`.
pub fn theta_g(rs: &FiniteRootSystem, pt: &EvalPoint, trunc: Truncation) -> Result<SeriesEval> {
    rs.check_dim(&pt.x)?;
    let gx = gram_apply(rs, &pt.x);
    let parts = trunc.split(rs.positive_roots.len());
    let factors: Vec<SeriesEval> = rs
        .positive_roots
        .iter()
        .map(|a| theta_jacobi(pt.tau, dot_rc(&vto_f64(a), &gx), parts))
        .collect::<Result<_>>()?;
    let value: Complex64 = factors.iter().map(|f| f.value).product();
    let mut tail = 0.0;
    for (i, f) in factors.iter().enumerate() {
        let others: f64 =
            factors.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.value.norm() + g.tail_bound).product();
        tail += f.tail_bound * others;
    }
    let order = factors.iter().map(|f| f.truncation_order).max().unwrap_or(0);
    Ok(SeriesEval { value, truncation_order: order, tail_bound: tail })
}

/// `Σ_{α∈Δ̄₊} (α, x)²`, exact.
pub fn root_square_sum(rs: &FiniteRootSystem, x: &[Q]) -> Q {
    rs.positive_roots.iter().map(|a| rs.inner(a, x).pow(2)).sum()
}

/// Residual of `Θ_ḡ(−1/τ, x/τ) = (−i)^{|Δ̄₊|} e^{πih∨(x,x)/τ} Θ_ḡ(τ, x)`,
/// relative to `max(1, |lhs|)`.
pub fn theta_g_transform_residual(rs: &FiniteRootSystem, pt: &EvalPoint, trunc: Truncation) -> Result<f64> {
    let spt = EvalPoint { tau: -1.0 / pt.tau, x: pt.x.iter().map(|c| c / pt.tau).collect(), t: pt.t };
    let lhs = theta_g(rs, &spt, trunc)?.value;
    let npos = rs.positive_roots.len() as i32;
    let pre =
        (-Complex64::i()).powi(npos) * (Complex64::i() * PI * rs.hvee as f64 * cform(rs, &pt.x, &pt.x) / pt.tau).exp();
    let rhs = pre * theta_g(rs, pt, trunc)?.value;
    Ok((lhs - rhs).norm() / lhs.norm().max(1.0))
}

/// Residual of the theta modular relation
/// `Θ(−1/τ, z/τ) + i e^{πiz²/τ} Θ(τ, z) = 0`, relative to `max(1, |Θ(−1/τ, z/τ)|)`.
pub fn theta_jacobi_transform_residual(tau: Complex64, z: Complex64, trunc: Truncation) -> Result<f64> {
    let lhs = theta_jacobi(-1.0 / tau, z / tau, trunc)?.value;
    let rhs = theta_jacobi(tau, z, trunc)?.value * Complex64::i() * (Complex64::i() * PI * z * z / tau).exp();
    Ok((lhs + rhs).norm() / lhs.norm().max(1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LimitOptions {
    /// Largest step; the others are `ε₀/2, ε₀/4, ε₀/8`.
    pub eps0: f64,
    /// Absolute bound on the extrapolation error estimate.
    pub tol: f64,
    pub trunc: Truncation,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self { eps0: 0.25, tol: 1e-7, trunc: Truncation::target(1e-14) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LimitEval {
    pub value: Complex64,
    pub extrapolation_error: f64,
    pub tail_bound: f64,
    pub truncation_order: u32,
}

/// Four-point Richardson table in `ε²` for an even function of `ε`.
fn richardson(opts: LimitOptions, f: impl Fn(f64) -> Result<SeriesEval> + Sync) -> Result<LimitEval> {
    let evals: Vec<SeriesEval> =
        (0..4).into_par_iter().map(|j| f(opts.eps0 / f64::powi(2.0, j))).collect::<Result<_>>()?;
    let mut t: Vec<Vec<Complex64>> = vec![evals.iter().map(|e| e.value).collect()];
    for k in 1..4 {
        let prev = &t[k - 1];
        let fac = 4f64.powi(k as i32);
        let row: Vec<Complex64> = (1..prev.len()).map(|j| prev[j] + (prev[j] - prev[j - 1]) / (fac - 1.0)).collect();
        t.push(row);
    }
    let value = t[3][0];
    let err = (t[3][0] - t[2][1]).norm();
    let tail = evals.iter().map(|e| e.tail_bound).fold(0.0, f64::max);
    if !(err <= opts.tol) {
        return Err(Error::Extrapolation { estimate: err, tol: opts.tol });
    }
    Ok(LimitEval {
        value,
        extrapolation_error: err,
        tail_bound: tail,
        truncation_order: evals.iter().map(|e| e.truncation_order).max().unwrap_or(0),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModularReport {
    /// Largest residual over all labels, relative to `max(1, max |lhs|)`.
    pub residual: f64,
    pub per_label: Vec<f64>,
    pub max_tail: f64,
}

/// `χ_λ(−1/τ, x/τ)` against `e^{πik(x,x)/τ} Σ_{λ'} a(λ, λ') χ_{λ'}(τ, x)`.
pub fn chi_s_transform_check(ld: &LevelData, pt: &EvalPoint, trunc: Truncation) -> Result<ModularReport> {
    let ch = Characters::new(ld)?;
    let s = build_smatrix(ld)?;
    let spt = EvalPoint { tau: -1.0 / pt.tau, x: pt.x.iter().map(|c| c / pt.tau).collect(), t: pt.t };
    let pairs: Vec<(SeriesEval, SeriesEval)> =
        s.admissible.par_iter().map(|l| Ok((ch.chi(l, &spt, trunc)?, ch.chi(l, pt, trunc)?))).collect::<Result<_>>()?;
    let pre = (Complex64::i() * PI * to_f64(&ld.k) * cform(&ld.rs, &pt.x, &pt.x) / pt.tau).exp();
    let n = s.dim();
    let scale = pairs.iter().map(|(a, _)| a.value.norm()).fold(1.0, f64::max);
    let per_label: Vec<f64> = (0..n)
        .map(|a| {
            let rhs: Complex64 = (0..n).map(|b| s.entries[(a, b)] * pairs[b].1.value).sum::<Complex64>() * pre;
            (pairs[a].0.value - rhs).norm() / scale
        })
        .collect();
    let max_tail = pairs.iter().map(|(a, b)| a.tail_bound.max(b.tail_bound)).fold(0.0, f64::max);
    Ok(ModularReport { residual: per_label.iter().copied().fold(0.0, f64::max), per_label, max_tail })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PsiReport {
    pub residual: f64,
    pub per_label: Vec<f64>,
    /// Largest `|ψ_λ|` over degenerate labels.
    pub degenerate_max: f64,
    pub max_extrapolation_error: f64,
    pub values: Vec<Complex64>,
    pub nondegenerate: Vec<bool>,
}

/// `ψ_λ(−1/τ)` against `Σ_μ (−i)^{|Δ̄₊|} a(λ, μ) ψ_μ(τ)`, all labels.
pub fn psi_s_transform_check(ld: &LevelData, tau: Complex64, opts: LimitOptions) -> Result<PsiReport> {
    let ch = Characters::new(ld)?;
    let s = build_smatrix(ld)?;
    let stau = -1.0 / tau;
    let evals: Vec<(LimitEval, LimitEval)> = s
        .admissible
        .iter()
        .map(|l| Ok((ch.psi(l, stau, None, opts)?, ch.psi(l, tau, None, opts)?)))
        .collect::<Result<_>>()?;
    let n = s.dim();
    let pre = (-Complex64::i()).powi(ld.rs.positive_roots.len() as i32);
    let per_label: Vec<f64> = (0..n)
        .map(|a| {
            let rhs: Complex64 = (0..n).map(|b| s.entries[(a, b)] * evals[b].1.value).sum::<Complex64>() * pre;
            (evals[a].0.value - rhs).norm()
        })
        .collect();
    let nondeg: Vec<bool> =
        s.admissible.iter().map(|l| crate::admissible::is_nondegenerate(&ld.rs, l.lambda_bar())).collect();
    let degenerate_max = evals
        .iter()
        .zip(&nondeg)
        .filter(|(_, nd)| !**nd)
        .map(|(e, _)| e.1.value.norm().max(e.0.value.norm()))
        .fold(0.0, f64::max);
    Ok(PsiReport {
        residual: per_label.iter().copied().fold(0.0, f64::max),
        per_label,
        degenerate_max,
        max_extrapolation_error: evals
            .iter()
            .map(|(a, b)| a.extrapolation_error.max(b.extrapolation_error))
            .fold(0.0, f64::max),
        values: evals.iter().map(|e| e.1.value).collect(),
        nondegenerate: nondeg,
    })
}

/// Parses `i`, `2i`, `-0.5+1.5i`, `0.3-0.1i` or a plain real.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || Error::Parse(format!("cannot read `{s}` as a complex number"));
    if t.is_empty() {
        return Err(err());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|r| Complex64::new(r, 0.0)).map_err(|_| err());
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse::<f64>().map_err(|_| err())?,
    };
    Ok(Complex64::new(re.parse::<f64>().map_err(|_| err())?, im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::qr;

    fn rs(s: &str) -> FiniteRootSystem {
        FiniteRootSystem::from_str_spec(s).unwrap()
    }

    #[test]
    fn theta_vanishes_at_zero() {
        let v = theta_jacobi(Complex64::i(), Complex64::zero(), Truncation::default()).unwrap();
        assert_eq!(v.value, Complex64::zero());
    }

    #[test]
    fn theta_product_matches_series() {
        let tau = Complex64::i();
        for z in [Complex64::new(0.5, 0.0), Complex64::new(0.3, 0.1), Complex64::new(-0.17, 0.05)] {
            let p = theta_jacobi(tau, z, Truncation::default()).unwrap();
            let s = theta_jacobi_series(tau, z, 30);
            assert!((p.value - s).norm() < 1e-10, "{z}: {} vs {s}", p.value);
        }
    }

    #[test]
    fn theta_modular_relation() {
        let r =
            theta_jacobi_transform_residual(Complex64::i(), Complex64::new(0.3, 0.1), Truncation::default()).unwrap();
        assert!(r < 1e-8, "{r}");
        let r =
            theta_jacobi_transform_residual(Complex64::new(0.2, 0.9), Complex64::new(-0.1, 0.2), Truncation::default())
                .unwrap();
        assert!(r < 1e-8, "{r}");
    }

    #[test]
    fn theta_tail_shrinks() {
        let tau = Complex64::new(0.1, 0.5);
        let z = Complex64::new(0.2, 0.1);
        let a = theta_jacobi(tau, z, Truncation::fixed(4)).unwrap();
        let b = theta_jacobi(tau, z, Truncation::fixed(8)).unwrap();
        assert!(b.tail_bound < a.tail_bound);
        assert!((a.value - b.value).norm() <= a.tail_bound);
    }

    #[test]
    fn lattice_theta_a1_coefficients() {
        let r = rs("A1");
        let c = theta_lattice_coefficients(&r, &r.root_lattice, q(1), &[q(0)], q(9)).unwrap();
        assert_eq!(c, vec![(q(0), 1), (q(1), 2), (q(4), 2), (q(9), 2)]);
        let c = theta_lattice_coefficients(&r, &r.root_lattice, q(1), &[q(1)], q(3)).unwrap();
        assert_eq!(c, vec![(qr(1, 4), 2), (qr(9, 4), 2)]);
    }

    #[test]
    fn lattice_theta_matches_coefficients() {
        let r = rs("A2");
        let pt = EvalPoint::real(Complex64::new(0.0, 0.8), &[0.0, 0.0]).unwrap();
        let mu = vec![q(1), q(0)];
        let v = theta_lattice(&r, &r.root_lattice, q(2), &mu, &pt, Truncation::default()).unwrap();
        let c = theta_lattice_coefficients(&r, &r.root_lattice, q(2), &mu, q(40)).unwrap();
        let s: Complex64 = c.iter().map(|(e, n)| i2pi(pt.tau * to_f64(e)) * *n as f64).sum();
        assert!((v.value - s).norm() < 1e-12);
    }

    #[test]
    fn lattice_theta_shift_invariant() {
        let r = rs("B2");
        let pt = EvalPoint::real(Complex64::new(0.1, 1.0), &[0.07, -0.03]).unwrap();
        let mu = vec![q(1), q(1)];
        let m = q(3);
        let g = r.coroot_lattice.generator(1);
        let shifted = vadd(&mu, &vscale(&g, m));
        let a = theta_lattice(&r, &r.coroot_lattice, m, &mu, &pt, Truncation::default()).unwrap();
        let b = theta_lattice(&r, &r.coroot_lattice, m, &shifted, &pt, Truncation::default()).unwrap();
        assert!((a.value - b.value).norm() < 1e-12);
    }

    #[test]
    fn lattice_theta_transformation() {
        let r = rs("A1");
        let pt = EvalPoint::real(Complex64::i(), &[0.05]).unwrap();
        for mu in [0, 1, 3, 7] {
            let res = theta_transform_residual(&r, &r.root_lattice, 10, &[q(mu)], &pt, Truncation::default()).unwrap();
            assert!(res < 1e-6, "μ = {mu}: {res}");
        }
        let r = rs("A2");
        let pt = EvalPoint::new(Complex64::new(0.2, 1.1), vec![Complex64::new(0.03, 0.01), Complex64::new(-0.02, 0.0)])
            .unwrap();
        let res =
            theta_transform_residual(&r, &r.coroot_lattice, 3, &[q(1), q(1)], &pt, Truncation::default()).unwrap();
        assert!(res < 1e-6, "{res}");
    }

    #[test]
    fn nonpositive_level_rejected() {
        let r = rs("A1");
        let pt = EvalPoint::real(Complex64::i(), &[0.0]).unwrap();
        assert!(matches!(
            theta_lattice(&r, &r.root_lattice, q(0), &[q(0)], &pt, Truncation::default()),
            Err(Error::InvalidLevel(_))
        ));
        assert!(EvalPoint::real(Complex64::new(0.0, -1.0), &[0.0]).is_err());
    }

    #[test]
    fn root_squares_give_dual_coxeter() {
        for t in ["A2", "B2", "G2", "C3"] {
            let r = rs(t);
            let x: Vec<Q> = (0..r.rank()).map(|i| qr(2 * i as i128 + 1, 3 + i as i128)).collect();
            assert_eq!(root_square_sum(&r, &x), q(r.hvee) * r.norm2(&x), "{t}");
        }
    }

    #[test]
    fn theta_g_transform() {
        let r = rs("A2");
        let pt = EvalPoint::real(Complex64::i(), &[0.11, 0.07]).unwrap();
        assert!(theta_g_transform_residual(&r, &pt, Truncation::default()).unwrap() < 1e-8);
    }

    #[test]
    fn denominator_matches_product() {
        for t in ["A1", "A2", "B2", "G2"] {
            let r = rs(t);
            let ld = LevelData::new(&r, r.hvee, 1).unwrap();
            let ch = Characters { ld: ld.clone(), weyl: WeylGroup::enumerate(&r).unwrap(), labels: vec![] };
            let x: Vec<f64> = (0..r.rank()).map(|i| 0.09 + 0.05 * i as f64).collect();
            let pt = EvalPoint::real(Complex64::i(), &x).unwrap();
            let a = ch.denominator(&pt, Truncation::default()).unwrap().value;
            let b = denominator_product(&r, &pt);
            assert!((a - b).norm() < 1e-8 * b.norm().max(1.0), "{t}: {a} vs {b}");
        }
    }

    /// `q^{dim/24} e^{ρ(x)} Π_n (1−qⁿ)^ℓ Π_{α>0} (1−e^{−α(x)}) Π_n (1−qⁿe^{−α(x)})(1−qⁿe^{α(x)})`.
    fn denominator_product(r: &FiniteRootSystem, pt: &EvalPoint) -> Complex64 {
        let gx = gram_apply(r, &pt.x);
        let qn = pt.nome();
        let mut v = i2pi(pt.tau * (r.dim() as f64 / 24.0)) * i2pi(dot_rc(&vto_f64(&r.rho), &gx));
        for a in &r.positive_roots {
            let e = i2pi(dot_rc(&vto_f64(a), &gx));
            v *= 1.0 - 1.0 / e;
            let mut qp = qn;
            for _ in 0..60 {
                v *= (1.0 - qp / e) * (1.0 - qp * e);
                qp *= qn;
            }
        }
        let mut qp = qn;
        for _ in 0..60 {
            v *= (1.0 - qp).powi(r.rank() as i32);
            qp *= qn;
        }
        v
    }

    #[test]
    fn integrable_a1_level_one_is_theta_quotient() {
        let r = rs("A1");
        let ld = LevelData::new(&r, 3, 1).unwrap();
        let ch = Characters::new(&ld).unwrap();
        let vac = ch.labels.iter().find(|l| l.lambda_bar()[0].is_zero()).unwrap();
        let pt = EvalPoint::real(Complex64::i(), &[0.13]).unwrap();
        let chi = ch.chi(vac, &pt, Truncation::default()).unwrap().value;
        // Level-one vacuum: Σ_n q^{n²} e^{2πi·2n·x(α)/2}/η with x paired against α.
        let z = 0.13;
        let qn = pt.nome();
        let mut num = Complex64::zero();
        for n in -30i32..=30 {
            num += i2pi(pt.tau * (n * n) as f64) * i2pi(Complex64::new(n as f64 * z, 0.0));
        }
        let mut eta = i2pi(pt.tau / 24.0);
        let mut qp = qn;
        for _ in 0..80 {
            eta *= 1.0 - qp;
            qp *= qn;
        }
        let expected = num / eta;
        assert!((chi - expected).norm() < 1e-8, "{chi} vs {expected}");
    }

    #[test]
    fn numerator_sign_flips_with_ybar() {
        let r = rs("A2");
        let ld = LevelData::new(&r, 4, 3).unwrap();
        let ch = Characters::new(&ld).unwrap();
        let pt = EvalPoint::real(Complex64::new(0.1, 1.0), &[0.07, 0.04]).unwrap();
        let l = ch.labels.iter().find(|l| !l.ybar.is_identity()).unwrap();
        let mut flipped = l.clone();
        flipped.ybar = l.ybar.compose(&crate::weyl::WeylElement::simple(&r, 0));
        let a = ch.numerator(l, &pt, Truncation::default()).unwrap().value;
        let b = ch.numerator(&flipped, &pt, Truncation::default()).unwrap().value;
        assert_eq!(a, -b);
    }

    #[test]
    fn g2_coprincipal_numerator_is_finite() {
        let r = rs("G2");
        let ld = LevelData::new(&r, 7, 3).unwrap();
        let ch = Characters::new(&ld).unwrap();
        let pt = EvalPoint::real(Complex64::i(), &[0.05, 0.03]).unwrap();
        for l in &ch.labels {
            let v = ch.numerator(l, &pt, Truncation::default()).unwrap();
            assert!(v.value.norm().is_finite() && v.tail_bound < 1e-10);
        }
    }

    #[test]
    fn polar_point_rejected() {
        let r = rs("A1");
        let ld = LevelData::new(&r, 5, 2).unwrap();
        let ch = Characters::new(&ld).unwrap();
        let pt = EvalPoint::real(Complex64::i(), &[0.0]).unwrap();
        assert!(matches!(ch.chi(&ch.labels[0], &pt, Truncation::default()), Err(Error::PolarProximity(_))));
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("i").unwrap(), Complex64::i());
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("0.3+0.1i").unwrap(), Complex64::new(0.3, 0.1));
        assert_eq!(parse_complex("-1e-2-i").unwrap(), Complex64::new(-0.01, -1.0));
        assert_eq!(parse_complex("1.5").unwrap(), Complex64::new(1.5, 0.0));
        assert!(parse_complex("x").is_err());
    }
}
