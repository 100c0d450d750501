//! Evaluation of both sides of the finite partial-fraction identities, for
//! exact-style verification at random well-conditioned points.

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{factorial, pochhammer, C, POLE_GUARD};
use crate::sum::NeumaierSum;
use crate::sym::{
    c_pair, elementary_from_roots, eta_pair, t_vector_full, ESymPoint, LinearSymForm,
    RootMultiset, SqrtPair,
};

/// Two-sided evaluation record for one identity at one point.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub lhs: C,
    pub rhs: C,
    pub abs_err: f64,
    pub rel_err: f64,
    /// Largest summand magnitude over the result magnitude: how much
    /// cancellation the right-hand side went through. Samplers reject
    /// points where this exceeds [`MAX_CONDITION`].
    pub cond: f64,
    pub point: Vec<(String, C)>,
}

impl IdentityReport {
    fn new(lhs: C, rhs: C, max_term: f64, point: Vec<(String, C)>) -> Self {
        let abs_err = (lhs - rhs).norm();
        let scale = lhs.norm().max(rhs.norm()).max(1e-300);
        let rel_err = abs_err / scale;
        IdentityReport { lhs, rhs, abs_err, rel_err, cond: max_term / scale, point }
    }
}

/// Cancellation bound beyond which a sampled point is considered
/// ill-conditioned and resampled.
pub const MAX_CONDITION: f64 = 1e6;

fn guard_grid(z: C, n: u32, name: &str) -> Result<()> {
    for k in 0..=n as i64 {
        if (z + k as f64).norm() < POLE_GUARD {
            let _ = name;
            return Err(Error::Pole { z: z + k as f64, guard: POLE_GUARD });
        }
    }
    Ok(())
}

fn point_echo(pairs: &[(&str, C)]) -> Vec<(String, C)> {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

/// Residues B_k of (a+x)_n/(x)_{n+1} at x = -k: B_k = (-1)^k (a-k)_n / (k!(n-k)!).
pub fn residues_bpf(a: C, n: u32) -> Result<Vec<C>> {
    let mut out = Vec::with_capacity(n as usize + 1);
    for k in 0..=n as u64 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let num = pochhammer(a - k as f64, n as i64)?;
        out.push(sign * num / (factorial(k) * factorial(n as u64 - k)));
    }
    Ok(out)
}

/// (a+x)_n/(x)_{n+1} against its residue expansion Σ B_k/(x+k).
pub fn eval_bpf(a: C, x: C, n: u32) -> Result<IdentityReport> {
    guard_grid(x, n, "x")?;
    let lhs = pochhammer(a + x, n as i64)? / pochhammer(x, n as i64 + 1)?;
    let mut rhs = NeumaierSum::new();
    let mut max_term = 0.0f64;
    for (k, &b) in residues_bpf(a, n)?.iter().enumerate() {
        let term = b / (x + k as f64);
        max_term = max_term.max(term.norm());
        rhs.add(term);
    }
    Ok(IdentityReport::new(lhs, rhs.value(), max_term, point_echo(&[("a", a), ("x", x)])))
}

/// Both sides of the generic symmetric partial-fraction expansion:
/// P(x)/∏Q_j(x) - P(y)/∏Q_j(y) = Σ_k P(t_k)/∏_{j≠k}Q_j(t_k) · (1/Q_k(x) - 1/Q_k(y)).
///
/// P is a black-box evaluator over computed root multisets; its degree
/// bound (at most n+1 per variable) is the caller's responsibility.
pub fn eval_gpf(
    p: &dyn Fn(&RootMultiset) -> C,
    qs: &[LinearSymForm],
    x: &ESymPoint,
    y: &ESymPoint,
) -> Result<IdentityReport> {
    let px = p(&crate::sym::roots_from_elementary(x)?);
    let py = p(&crate::sym::roots_from_elementary(y)?);
    let mut qx_prod = C::new(1.0, 0.0);
    let mut qy_prod = C::new(1.0, 0.0);
    for q in qs {
        let (qx, qy) = (q.eval(x), q.eval(y));
        if qx.norm() < POLE_GUARD {
            return Err(Error::Pole { z: qx, guard: POLE_GUARD });
        }
        if qy.norm() < POLE_GUARD {
            return Err(Error::Pole { z: qy, guard: POLE_GUARD });
        }
        qx_prod *= qx;
        qy_prod *= qy;
    }
    let lhs = px / qx_prod - py / qy_prod;

    let mut rhs = NeumaierSum::new();
    let mut max_term = 0.0f64;
    for k in 0..qs.len() {
        let t = t_vector_full(&qs[k], x, y)?;
        let et = elementary_from_roots(&t.roots);
        let mut denom = C::new(1.0, 0.0);
        for (j, q) in qs.iter().enumerate() {
            if j != k {
                let qt = q.eval(&et);
                if qt.norm() < POLE_GUARD {
                    return Err(Error::Pole { z: qt, guard: POLE_GUARD });
                }
                denom *= qt;
            }
        }
        let bracket = 1.0 / qs[k].eval(x) - 1.0 / qs[k].eval(y);
        let term = p(&t) / denom * bracket;
        max_term = max_term.max(term.norm());
        rhs.add(term);
    }
    Ok(IdentityReport::new(lhs, rhs.value(), max_term, vec![]))
}

/// The same identity restructured for pole-product forms Q_j = ∏_m(x_m - b_j),
/// with the bracket rewritten through the roots (b_k, b_k', ..., b_k^{(r-1)}):
/// a second, independent code path over the same identity.
pub fn eval_gfd(
    p: &dyn Fn(&RootMultiset) -> C,
    bs: &[C],
    x_roots: &[C],
    y_roots: &[C],
) -> Result<IdentityReport> {
    let r = x_roots.len();
    let x = elementary_from_roots(x_roots);
    let y = elementary_from_roots(y_roots);
    let mut qx_prod = C::new(1.0, 0.0);
    let mut qy_prod = C::new(1.0, 0.0);
    for &b in bs {
        for &xj in x_roots {
            qx_prod *= xj - b;
        }
        for &yj in y_roots {
            qy_prod *= yj - b;
        }
    }
    if qx_prod.norm() < POLE_GUARD || qy_prod.norm() < POLE_GUARD {
        return Err(Error::Pole { z: qx_prod, guard: POLE_GUARD });
    }
    let px = p(&RootMultiset { roots: x_roots.to_vec() });
    let py = p(&RootMultiset { roots: y_roots.to_vec() });
    let lhs = px / qx_prod - py / qy_prod;

    let mut rhs = NeumaierSum::new();
    let mut max_term = 0.0f64;
    for (k, &bk) in bs.iter().enumerate() {
        let q = LinearSymForm::from_pole(r, bk);
        let t = t_vector_full(&q, &x, &y)?;
        // order the multiset so t_0 = b_k and the rest are the partner roots
        let mut roots = t.roots.clone();
        let (pos, _) = roots
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - bk).norm().partial_cmp(&(b.1 - bk).norm()).unwrap())
            .unwrap();
        roots.swap(0, pos);
        roots[0] = bk;
        let mut denom = C::new(1.0, 0.0);
        for (j, &bj) in bs.iter().enumerate() {
            if j != k {
                denom *= bk - bj;
            }
            for &partner in &roots[1..] {
                denom *= partner - bj;
            }
        }
        let mut bracket = NeumaierSum::new();
        for &xj in x_roots {
            bracket.add(1.0 / (xj - bk));
        }
        for &yj in y_roots {
            bracket.add(-1.0 / (yj - bk));
        }
        let term = p(&RootMultiset { roots }) / denom * bracket.value();
        max_term = max_term.max(term.norm());
        rhs.add(term);
    }
    Ok(IdentityReport::new(lhs, rhs.value(), max_term, vec![]))
}

/// The two-variable open-string identity with b_k = -k, P = (x₁+x₂+a)_n:
/// (x₁+x₂+a)_n/((x₁)_{n+1}(x₂)_{n+1}) as a sum over shifted-pole terms.
pub fn eval_cbi(x1: C, x2: C, a: C, lambda: C, n: u32) -> Result<IdentityReport> {
    guard_grid(x1, n, "x1")?;
    guard_grid(x2, n, "x2")?;
    guard_grid(lambda, n, "lambda")?;
    let lhs = pochhammer(x1 + x2 + a, n as i64)?
        / (pochhammer(x1, n as i64 + 1)? * pochhammer(x2, n as i64 + 1)?);
    let mut rhs = NeumaierSum::new();
    let mut max_term = 0.0f64;
    for k in 0..=n as i64 {
        let kf = k as f64;
        let eps = (lambda - x1) * (lambda - x2) / (lambda + kf);
        let bp = lambda - eps;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign / (factorial(k as u64) * factorial((n as i64 - k) as u64));
        let ratio = pochhammer(bp + a - kf, n as i64)? / pochhammer(bp, n as i64 + 1)?;
        let bracket = 1.0 / (x1 + kf) + 1.0 / (x2 + kf) - 1.0 / (lambda + kf);
        let term = coeff * ratio * bracket;
        max_term = max_term.max(term.norm());
        rhs.add(term);
    }
    Ok(IdentityReport::new(
        lhs,
        rhs.value(),
        max_term,
        point_echo(&[("x1", x1), ("x2", x2), ("a", a), ("lambda", lambda)]),
    ))
}

/// The asymmetric closed-string identity (b_k = -k, c_k = s+k,
/// P = (t-x₁)_n(t-x₂)_n(u+x₁+x₂)_n), two sums; the second consumes the
/// c-pair only through branch-free paired products.
pub fn eval_affp(x1: C, x2: C, s: C, t: C, u: C, lambda: C, n: u32) -> Result<IdentityReport> {
    guard_grid(x1, n, "x1")?;
    guard_grid(x2, n, "x2")?;
    guard_grid(lambda, n, "lambda")?;
    guard_grid(s - x1 - x2, n, "s-x1-x2")?;
    let nn = n as i64;
    let lhs = pochhammer(t - x1, nn)? * pochhammer(t - x2, nn)? * pochhammer(u + x1 + x2, nn)?
        / (pochhammer(x1, nn + 1)?
            * pochhammer(x2, nn + 1)?
            * pochhammer(s - x1 - x2, nn + 1)?);

    let mut max_term = 0.0f64;
    let mut first = NeumaierSum::new();
    for k in 0..=nn {
        let kf = k as f64;
        let eps = (lambda - x1) * (lambda - x2) / (lambda + kf);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign / (factorial(k as u64) * factorial((nn - k) as u64));
        let num = pochhammer(t + kf, nn)?
            * pochhammer(t - lambda + eps, nn)?
            * pochhammer(u + lambda - eps - kf, nn)?;
        let den = pochhammer(lambda - eps, nn + 1)? * pochhammer(s - lambda + eps + kf, nn + 1)?;
        let bracket = 1.0 / (x1 + kf) + 1.0 / (x2 + kf) - 1.0 / (lambda + kf);
        let term = coeff * num / den * bracket;
        max_term = max_term.max(term.norm());
        first.add(term);
    }

    let mut second = NeumaierSum::new();
    for k in 0..=nn {
        let kf = k as f64;
        let pair = c_pair(s + kf, lambda, x1, x2);
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign / (factorial(k as u64) * factorial((nn - k) as u64));
        // (t-c⁺)_n (t-c⁻)_n and (c⁺)_{n+1}(c⁻)_{n+1} as paired products
        let num = pair.reflected(t).pochhammer_pair(nn)? * pochhammer(u + s + kf, nn)?;
        let den = pair.pochhammer_pair(nn + 1)?;
        let term = coeff * num / den / (s + kf - x1 - x2);
        max_term = max_term.max(term.norm());
        second.add(term);
    }
    let rhs = first.value() + second.value();
    Ok(IdentityReport::new(
        lhs,
        rhs,
        max_term,
        point_echo(&[("x1", x1), ("x2", x2), ("s", s), ("t", t), ("u", u), ("lambda", lambda)]),
    ))
}

/// The symmetric closed-string identity in three variables,
/// (u-x₁)_n(u-x₂)_n(u-x₃)_n/∏(x_j)_{n+1} as a sum over η-pair terms.
pub fn eval_yl(x1: C, x2: C, x3: C, u: C, lambda: C, n: u32) -> Result<IdentityReport> {
    for z in [x1, x2, x3, lambda] {
        guard_grid(z, n, "grid")?;
    }
    let nn = n as i64;
    let lhs = pochhammer(u - x1, nn)? * pochhammer(u - x2, nn)? * pochhammer(u - x3, nn)?
        / (pochhammer(x1, nn + 1)? * pochhammer(x2, nn + 1)? * pochhammer(x3, nn + 1)?);
    let e1 = x1 + x2 + x3;
    let prod = (x1 - lambda) * (x2 - lambda) * (x3 - lambda);
    let mut rhs = NeumaierSum::new();
    let mut max_term = 0.0f64;
    for k in 0..=nn {
        let kf = k as f64;
        let pair = eta_pair(e1 + kf, lambda, prod, lambda + kf)?;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign / (factorial(k as u64) * factorial((nn - k) as u64));
        let num = pochhammer(u + kf, nn)? * pair.reflected(u).pochhammer_pair(nn)?;
        let den = pair.pochhammer_pair(nn + 1)?;
        let bracket =
            1.0 / (x1 + kf) + 1.0 / (x2 + kf) + 1.0 / (x3 + kf) - 1.0 / (lambda + kf);
        let term = coeff * num / den * bracket;
        max_term = max_term.max(term.norm());
        rhs.add(term);
    }
    Ok(IdentityReport::new(
        lhs,
        rhs.value(),
        max_term,
        point_echo(&[("x1", x1), ("x2", x2), ("x3", x3), ("u", u), ("lambda", lambda)]),
    ))
}

/// Minimum distance from z to the grid {0, -1, ..., -n}.
pub fn grid_distance(z: C, n: u32) -> f64 {
    (0..=n as i64).map(|k| (z + k as f64).norm()).fold(f64::INFINITY, f64::min)
}

/// Margin required of sampled points from every pole grid.
pub const SAMPLE_MARGIN: f64 = 0.05;

/// One scalar from the well-conditioned box Re ∈ [0.1, 2], |Im| ≤ 1.
pub fn sample_scalar(rng: &mut impl Rng) -> C {
    C::new(rng.gen_range(0.1..2.0), rng.gen_range(-1.0..1.0))
}

/// Rejection-sample until `ok` accepts; returns (value, resamples).
pub fn sample_until<R: Rng, T>(
    rng: &mut R,
    mut gen: impl FnMut(&mut R) -> T,
    ok: impl Fn(&T) -> bool,
) -> (T, u32) {
    let mut resamples = 0;
    loop {
        let v = gen(rng);
        if ok(&v) {
            return (v, resamples);
        }
        resamples += 1;
        assert!(resamples < 10_000, "sampler failed to find a well-conditioned point");
    }
}

/// Conditioning check for the cbi shifted poles: every b'_k stays clear of
/// the truncated factorial grid.
pub fn cbi_conditioned(x1: C, x2: C, lambda: C, n: u32) -> bool {
    if grid_distance(x1, n) < SAMPLE_MARGIN
        || grid_distance(x2, n) < SAMPLE_MARGIN
        || grid_distance(lambda, n) < SAMPLE_MARGIN
    {
        return false;
    }
    for k in 0..=n as i64 {
        let bp = lambda - (lambda - x1) * (lambda - x2) / (lambda + k as f64);
        if grid_distance(bp, n) < SAMPLE_MARGIN {
            return false;
        }
    }
    true
}

/// Conditioning check for affp: primary grids plus the b'-type and c-pair
/// denominators of each term.
pub fn affp_conditioned(x1: C, x2: C, s: C, lambda: C, n: u32) -> bool {
    if grid_distance(x1, n) < SAMPLE_MARGIN
        || grid_distance(x2, n) < SAMPLE_MARGIN
        || grid_distance(lambda, n) < SAMPLE_MARGIN
        || grid_distance(s - x1 - x2, n) < SAMPLE_MARGIN
    {
        return false;
    }
    let m2 = SAMPLE_MARGIN * SAMPLE_MARGIN;
    for k in 0..=n as i64 {
        let kf = k as f64;
        let eps = (lambda - x1) * (lambda - x2) / (lambda + kf);
        if grid_distance(lambda - eps, n) < SAMPLE_MARGIN
            || grid_distance(s - lambda + eps + kf, n) < SAMPLE_MARGIN
        {
            return false;
        }
        let pair = c_pair(s + kf, lambda, x1, x2);
        for j in 0..=n as i64 {
            // |(c+j)² - d| small means one of c^±+j is near zero
            let f = (pair.center + j as f64).powu(2) - pair.radicand;
            if f.norm() < m2 {
                return false;
            }
        }
    }
    true
}

/// Conditioning check for yl: primary grids plus the η-pair denominators.
/// The η margin is wider than [`SAMPLE_MARGIN`]: three pochhammer factors
/// per term amplify roundoff harder than in the two-variable identities.
pub fn yl_conditioned(x1: C, x2: C, x3: C, lambda: C, n: u32) -> bool {
    for z in [x1, x2, x3, lambda] {
        if grid_distance(z, n) < SAMPLE_MARGIN {
            return false;
        }
    }
    let e1 = x1 + x2 + x3;
    let prod = (x1 - lambda) * (x2 - lambda) * (x3 - lambda);
    let m2 = 4.0 * SAMPLE_MARGIN * SAMPLE_MARGIN;
    for k in 0..=n as i64 {
        let kf = k as f64;
        let Ok(pair) = eta_pair(e1 + kf, lambda, prod, lambda + kf) else {
            return false;
        };
        for j in 0..=n as i64 {
            let f = (pair.center + j as f64).powu(2) - pair.radicand;
            if f.norm() < m2 {
                return false;
            }
        }
    }
    true
}

/// Branch-free pair-product helper shared with the series layer: value of
/// ∏ over both members without materializing either root.
pub fn pair_reflected_product(pair: &SqrtPair, offset: C, m: i64) -> Result<C> {
    pair.reflected(offset).pochhammer_pair(m)
}
