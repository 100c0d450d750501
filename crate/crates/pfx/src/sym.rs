//! Elementary-symmetric-polynomial machinery and recovery of the auxiliary
//! root vectors (the t-vectors, b', c-pairs, eta-pairs and xi-pairs) at
//! which partial-fraction residues are evaluated.
//!
//! Everything here treats a point only through its elementary symmetric
//! values, i.e. up to permutation of coordinates. ± root pairs are carried
//! as a center/radicand pair so downstream consumers can stay branch-free.


use crate::error::{Error, Result};
use crate::scalar::{sqrt_pair_pochhammer, C};

/// Relative tolerance for the degeneracy checks Q(x)=Q(y) and λ+k=0.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// A point of arity r represented by its elementary symmetric values
/// (e_1, ..., e_r); e_0 is implicitly 1, out-of-range e_m are 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ESymPoint {
    e: Vec<C>,
}

impl ESymPoint {
    pub fn new(e: Vec<C>) -> Self {
        ESymPoint { e }
    }

    pub fn arity(&self) -> usize {
        self.e.len()
    }

    /// e_m with the implicit-boundary convention: e_0 = 1, e_m = 0 outside.
    pub fn e(&self, m: i64) -> C {
        if m == 0 {
            C::new(1.0, 0.0)
        } else if m < 0 || m as usize > self.e.len() {
            C::new(0.0, 0.0)
        } else {
            self.e[m as usize - 1]
        }
    }

    pub fn values(&self) -> &[C] {
        &self.e
    }
}

/// A symmetric form of degree exactly 1 per variable, Q(x) = Σ A_m e_m(x).
#[derive(Debug, Clone)]
pub struct LinearSymForm {
    a: Vec<C>,
}

impl LinearSymForm {
    /// Coefficients (A_0, ..., A_r). Flags the degenerate case A_r = 0.
    pub fn new(a: Vec<C>) -> Result<Self> {
        let top = a.last().copied().unwrap_or_default();
        if a.len() < 2 || top.norm() == 0.0 {
            return Err(Error::Degenerate { what: "linear symmetric form with vanishing top coefficient" });
        }
        Ok(LinearSymForm { a })
    }

    pub fn arity(&self) -> usize {
        self.a.len() - 1
    }

    pub fn coeff(&self, m: usize) -> C {
        self.a.get(m).copied().unwrap_or_default()
    }

    pub fn eval(&self, p: &ESymPoint) -> C {
        let mut q = C::new(0.0, 0.0);
        for (m, &a) in self.a.iter().enumerate() {
            q += a * p.e(m as i64);
        }
        q
    }

    /// The coefficient-shifted form Q̂ obtained when all but the first l of
    /// the y variables are sent to infinity: Q̂(y) = Σ_m A_{m+r-l} e_m(y).
    pub fn hat_eval(&self, y_fixed: &[C]) -> C {
        let r = self.arity();
        let l = y_fixed.len();
        let ey = elementary_from_roots(y_fixed);
        let mut q = C::new(0.0, 0.0);
        for m in 0..=l {
            q += self.coeff(m + r - l) * ey.e(m as i64);
        }
        q
    }

    /// Q as the product form ∏_m (x_m - b), expanded in the e-basis:
    /// A_m = (-b)^{r-m}.
    pub fn from_pole(r: usize, b: C) -> Self {
        let mut a = vec![C::new(0.0, 0.0); r + 1];
        for (m, slot) in a.iter_mut().enumerate() {
            *slot = (-b).powu((r - m) as u32);
        }
        LinearSymForm { a }
    }
}

/// An unordered multiset of r roots.
#[derive(Debug, Clone)]
pub struct RootMultiset {
    pub roots: Vec<C>,
}

/// Read e_m off the coefficients of ∏ (t + x_j).
pub fn elementary_from_roots(xs: &[C]) -> ESymPoint {
    let mut e = vec![C::new(0.0, 0.0); xs.len()];
    for &x in xs {
        for m in (1..e.len()).rev() {
            let prev = e[m - 1];
            e[m] += x * prev;
        }
        e[0] += x;
    }
    ESymPoint::new(e)
}

/// Quadratic solver with the larger-magnitude root taken from the formula
/// and the partner from the product, avoiding the classic cancellation.
/// Returns the pair ordered as (center + √disc side, other).
fn solve_quadratic(sum: C, prod: C) -> (C, C) {
    let center = sum / 2.0;
    let disc = center * center - prod;
    let s = disc.sqrt();
    // side of the center aligned with the square root
    let aligned = center.re * s.re + center.im * s.im >= 0.0;
    let big = if aligned { center + s } else { center - s };
    if big.norm() == 0.0 {
        return (s, -s);
    }
    let small = prod / big;
    if aligned {
        (big, small)
    } else {
        (small, big)
    }
}

/// Roots of u³ - e1 u² + e2 u - e3 via the depressed cubic.
fn solve_cubic(e1: C, e2: C, e3: C) -> [C; 3] {
    let shift = e1 / 3.0;
    // u = v + shift: v³ + p v + q
    let p = e2 - e1 * e1 / 3.0;
    let q = -e3 + e1 * e2 / 3.0 - 2.0 * e1 * e1 * e1 / 27.0;
    // v³ + p v + q = 0 (monic depressed, q here is the constant term)
    if p.norm() == 0.0 && q.norm() == 0.0 {
        return [shift, shift, shift];
    }
    let half_q = q / 2.0;
    let disc = half_q * half_q + p * p * p / 27.0;
    let sd = disc.sqrt();
    // pick the cube-root argument with the larger magnitude
    let w3a = -half_q + sd;
    let w3b = -half_q - sd;
    let w3 = if w3a.norm() >= w3b.norm() { w3a } else { w3b };
    let w = w3.powf(1.0 / 3.0);
    let omega = C::new(-0.5, 0.75f64.sqrt());
    let mut out = [C::default(); 3];
    for (i, rot) in [C::new(1.0, 0.0), omega, omega * omega].into_iter().enumerate() {
        let wi = w * rot;
        let v = if wi.norm() == 0.0 { wi } else { wi - p / (3.0 * wi) };
        out[i] = v + shift;
    }
    out
}

/// Durand–Kerner iteration for monic polynomials of general degree
/// (coefficients of u^r - e1 u^{r-1} + e2 u^{r-2} - ...).
fn solve_general(e: &ESymPoint) -> Vec<C> {
    let r = e.arity();
    let eval = |u: C| -> C {
        let mut acc = C::new(1.0, 0.0);
        for m in 1..=r {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            acc = acc * u + sign * e.e(m as i64);
        }
        acc
    };
    let seed = C::new(0.4, 0.9);
    let mut roots: Vec<C> = (0..r).map(|i| seed.powu(i as u32 + 1)).collect();
    for _ in 0..200 {
        let mut max_step = 0.0f64;
        for i in 0..r {
            let mut denom = C::new(1.0, 0.0);
            for j in 0..r {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                roots[i] += C::new(1e-8, 1e-8);
                continue;
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-14 {
            break;
        }
    }
    roots
}

/// Recover the root multiset of an ESymPoint (Vieta inversion).
///
/// r <= 3 uses closed forms with cancellation-safe pairing; larger arities
/// fall back to a Durand–Kerner companion-style iteration.
pub fn roots_from_elementary(e: &ESymPoint) -> Result<RootMultiset> {
    let roots = match e.arity() {
        0 => return Err(Error::Degenerate { what: "root recovery from an empty symmetric point" }),
        1 => vec![e.e(1)],
        2 => {
            let (a, b) = solve_quadratic(e.e(1), e.e(2));
            vec![a, b]
        }
        3 => solve_cubic(e.e(1), e.e(2), e.e(3)).to_vec(),
        _ => solve_general(e),
    };
    Ok(RootMultiset { roots })
}

/// The vector t defined (up to permutation) by
/// e_m(t) = (Q(y) e_m(x) - Q(x) e_m(y)) / (Q(y) - Q(x)).
///
/// Q(t) = 0 by construction.
pub fn t_vector_full(q: &LinearSymForm, x: &ESymPoint, y: &ESymPoint) -> Result<RootMultiset> {
    let (et, _) = t_esym_full(q, x, y)?;
    roots_from_elementary(&et)
}

/// Same as [`t_vector_full`] but returning the symmetric values themselves
/// (needed when the caller wants e_m(t) without root recovery).
pub fn t_esym_full(q: &LinearSymForm, x: &ESymPoint, y: &ESymPoint) -> Result<(ESymPoint, C)> {
    let qx = q.eval(x);
    let qy = q.eval(y);
    let denom = qy - qx;
    let scale = qx.norm().max(qy.norm()).max(1e-300);
    if denom.norm() < DEGENERACY_TOL * scale {
        return Err(Error::Degenerate { what: "Q(x) = Q(y) in the t-vector construction" });
    }
    let r = q.arity();
    let mut e = Vec::with_capacity(r);
    for m in 1..=r as i64 {
        e.push((qy * x.e(m) - qx * y.e(m)) / denom);
    }
    Ok((ESymPoint::new(e), denom))
}

/// Degenerate t-vector when all but the first l of the y variables go to
/// infinity: e_m(t) = e_m(x) - (Q(x)/Q̂(y)) e_{m+l-r}(y).
pub fn t_vector_limit(q: &LinearSymForm, x: &ESymPoint, y_fixed: &[C]) -> Result<RootMultiset> {
    let qhat = q.hat_eval(y_fixed);
    let qx = q.eval(x);
    if qhat.norm() < DEGENERACY_TOL * qx.norm().max(1.0) {
        return Err(Error::Degenerate { what: "Q-hat(y) = 0 in the limit t-vector construction" });
    }
    let r = q.arity() as i64;
    let l = y_fixed.len() as i64;
    let ey = elementary_from_roots(y_fixed);
    let ratio = qx / qhat;
    let mut e = Vec::with_capacity(r as usize);
    for m in 1..=r {
        e.push(x.e(m) - ratio * ey.e(m + l - r));
    }
    roots_from_elementary(&ESymPoint::new(e))
}

/// The partner root b' with (b-λ)(b'-λ) = (x₁-λ)(x₂-λ):
/// b' = λ - (λ-x₁)(λ-x₂)/(λ-b).
pub fn b_prime(lambda: C, x1: C, x2: C, b: C) -> Result<C> {
    let denom = lambda - b;
    let scale = lambda.norm().max(b.norm()).max(1.0);
    if denom.norm() < DEGENERACY_TOL * scale {
        return Err(Error::Degenerate { what: "λ = b in the b' construction" });
    }
    Ok(lambda - (lambda - x1) * (lambda - x2) / denom)
}

/// A ± pair c ± √d carried in branch-free form.
///
/// Consumers that treat the two members symmetrically should use
/// [`SqrtPair::pochhammer_pair`] / [`SqrtPair::shifted`], which never touch
/// the square root; [`SqrtPair::values`] materializes the two members with
/// the smaller one derived from the product to dodge cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqrtPair {
    pub center: C,
    pub radicand: C,
}

impl SqrtPair {
    pub fn new(center: C, radicand: C) -> Self {
        SqrtPair { center, radicand }
    }

    /// Sum of the two members.
    pub fn sum(&self) -> C {
        2.0 * self.center
    }

    /// Product of the two members.
    pub fn product(&self) -> C {
        self.center * self.center - self.radicand
    }

    /// (plus member, minus member) = (center + √radicand, center - √radicand),
    /// with the member on the cancelling side recovered from the product.
    pub fn values(&self) -> (C, C) {
        let s = self.radicand.sqrt();
        let aligned = self.center.re * s.re + self.center.im * s.im >= 0.0;
        let big = if aligned { self.center + s } else { self.center - s };
        if big.norm() == 0.0 {
            return (s, -s);
        }
        let small = self.product() / big;
        if aligned {
            (big, small)
        } else {
            (small, big)
        }
    }

    /// The pair (offset + c + √d, offset + c - √d).
    pub fn shifted(&self, offset: C) -> SqrtPair {
        SqrtPair { center: self.center + offset, radicand: self.radicand }
    }

    /// The pair (offset - c ∓ √d), i.e. offset minus each member.
    pub fn reflected(&self, offset: C) -> SqrtPair {
        SqrtPair { center: offset - self.center, radicand: self.radicand }
    }

    /// (c+√d)_m (c-√d)_m, branch-free.
    pub fn pochhammer_pair(&self, m: i64) -> Result<C> {
        sqrt_pair_pochhammer(self.center, self.radicand, m)
    }
}

/// The pair (c⁺, c⁻) solving c⁺+c⁻ = s+k, c⁺c⁻ = x₁x₂ + (s+k-x₁-x₂)λ.
pub fn c_pair(s_plus_k: C, lambda: C, x1: C, x2: C) -> SqrtPair {
    let center = s_plus_k / 2.0;
    let radicand = center * center + lambda * (x1 + x2 - s_plus_k) - x1 * x2;
    SqrtPair::new(center, radicand)
}

/// Convenience wrapper returning the materialized (c⁺, c⁻).
pub fn c_pm(s_plus_k: C, lambda: C, x1: C, x2: C) -> (C, C) {
    c_pair(s_plus_k, lambda, x1, x2).values()
}

/// The pair η^± = (e₁+k)/2 ± √((e₁+k-2λ)²/4 + ∏(x_j-λ)/(λ+k)).
pub fn eta_pair(e1_plus_k: C, lambda: C, prod_shift: C, lambda_plus_k: C) -> Result<SqrtPair> {
    let scale = lambda.norm().max(1.0);
    if lambda_plus_k.norm() < DEGENERACY_TOL * scale {
        return Err(Error::Degenerate { what: "λ + k = 0 in the η construction" });
    }
    let center = e1_plus_k / 2.0;
    let half_shift = center - lambda;
    let radicand = half_shift * half_shift + prod_shift / lambda_plus_k;
    Ok(SqrtPair::new(center, radicand))
}

/// Materialized (η⁺, η⁻); the member near λ is recovered through the
/// product constraint (η⁺-λ)(η⁻-λ) = -∏(x_j-λ)/(λ+k), which is the
/// near-cancellation for large k.
pub fn eta_pm(e1_plus_k: C, lambda: C, prod_shift: C, lambda_plus_k: C) -> Result<(C, C)> {
    let pair = eta_pair(e1_plus_k, lambda, prod_shift, lambda_plus_k)?;
    // work in w = η - λ where the product is exactly -prod_shift/(λ+k);
    // using that closed form (rather than center²-radicand) keeps the small
    // member accurate when the center grows with k
    let wc = pair.center - lambda;
    let s = pair.radicand.sqrt();
    let aligned = wc.re * s.re + wc.im * s.im >= 0.0;
    let big = if aligned { wc + s } else { wc - s };
    if big.norm() == 0.0 {
        return Ok((lambda + s, lambda - s));
    }
    let small = (-prod_shift / lambda_plus_k) / big;
    let (wp, wm) = if aligned { (big, small) } else { (small, big) };
    Ok((lambda + wp, lambda + wm))
}

/// The pair ξ^± = (2-s-k)/2 ± √((s+k-2λ)²/4 + ∏(x_j-λ)/(λ+k)),
/// related to the η pair of the same data by ξ^± = 1 - η^∓.
pub fn xi_pair(s: C, k: i64, lambda: C, x1: C, x2: C, x3: C) -> Result<SqrtPair> {
    let prod = (x1 - lambda) * (x2 - lambda) * (x3 - lambda);
    let eta = eta_pair(s + k as f64, lambda, prod, lambda + k as f64)?;
    Ok(eta.reflected(C::new(1.0, 0.0)))
}

/// Materialized (ξ⁺, ξ⁻).
pub fn xi_pm(s: C, k: i64, lambda: C, x1: C, x2: C, x3: C) -> Result<(C, C)> {
    let prod = (x1 - lambda) * (x2 - lambda) * (x3 - lambda);
    let (ep, em) = eta_pm(s + k as f64, lambda, prod, lambda + k as f64)?;
    Ok((C::new(1.0, 0.0) - em, C::new(1.0, 0.0) - ep))
}
