//! Adaptive evaluation of the infinite gamma-ratio expansions: generic
//! block-summed driver with a power-law tail extrapolation stop rule, plus
//! one op per expansion family.

use std::f64::consts::PI;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{log_gamma, ln_factorial, sin_pi, C};
use crate::sum::NeumaierSum;
use crate::sym::{c_pair, eta_pair, SqrtPair};
use crate::tail::{tail_exponent_estimate, tail_with_uncertainty};

/// Terms are produced and summed in blocks of this many indices.
const BLOCK: u64 = 1024;

/// Per-term factors switch from direct running products to log-gamma
/// differences above this index.
const DIRECT_PRODUCT_LIMIT: u64 = 16384;

/// Rejection radius around the k-grids (x_j+k, λ+k, s+k-x₁-x₂).
pub const GRID_RADIUS: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct ConvergenceConfig {
    /// Relative tolerance on the summed value.
    pub tol: f64,
    /// Hard cap on the number of terms.
    pub n_max: u64,
    /// Consecutive small terms required before the fast stop rule fires.
    pub streak: u32,
    /// Keep and return the per-term trace.
    pub trace: bool,
    /// Never stop before this many terms (0 = no forcing).
    pub n_min: u64,
    /// Add the extrapolated power-law tail to the value (and report the
    /// extrapolation uncertainty as tail_bound).
    pub tail_correction: bool,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        ConvergenceConfig {
            tol: 1e-10,
            n_max: 1_000_000,
            streak: 8,
            trace: false,
            n_min: 0,
            tail_correction: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesStatus {
    Converged,
    CapHit,
    DomainViolation,
}

#[derive(Debug, Clone)]
pub struct SeriesResult {
    pub value: C,
    pub terms_used: u64,
    pub tail_bound: f64,
    pub status: SeriesStatus,
    pub decay_exponent_fit: Option<f64>,
    pub trace: Option<Vec<(u64, C)>>,
}

fn domain_violation() -> SeriesResult {
    SeriesResult {
        value: C::new(0.0, 0.0),
        terms_used: 0,
        tail_bound: f64::INFINITY,
        status: SeriesStatus::DomainViolation,
        decay_exponent_fit: None,
        trace: None,
    }
}

/// True when z sits within `radius` of the grid {0, -1, -2, ...}.
fn near_negative_grid(z: C, radius: f64) -> bool {
    let n = z.re.round();
    n <= 0.0 && (z - n).norm() < radius
}

fn check_grids(zs: &[C]) -> Result<()> {
    for &z in zs {
        if near_negative_grid(z, GRID_RADIUS) {
            return Err(Error::Pole { z, guard: GRID_RADIUS });
        }
    }
    Ok(())
}

/// Generic driver: pull blocks of terms, reduce sequentially in ascending k
/// with compensation, stop by the streak + extrapolated-tail rule.
fn drive(
    mut block_terms: impl FnMut(std::ops::Range<u64>) -> Result<Vec<C>>,
    p_analytic: Option<C>,
    cfg: &ConvergenceConfig,
) -> Result<SeriesResult> {
    let mut sum = NeumaierSum::new();
    let mut trace: Vec<(u64, C)> = Vec::new();
    let mut k = 0u64;
    let mut status = SeriesStatus::CapHit;
    let mut tail_bound = f64::INFINITY;
    let mut correction = C::new(0.0, 0.0);
    'outer: while k < cfg.n_max {
        let end = (k + BLOCK).min(cfg.n_max);
        let terms = block_terms(k..end)?;
        for (i, &t) in terms.iter().enumerate() {
            trace.push((k + i as u64, t));
            sum.add(t);
        }
        k = end;
        if k < cfg.n_min {
            continue;
        }
        let partial = sum.value();
        let scale = partial.norm().max(1e-300);
        let streak_ok = trace.len() >= cfg.streak as usize
            && trace
                .iter()
                .rev()
                .take(cfg.streak as usize)
                .all(|&(_, t)| t.norm() < cfg.tol * scale / 10.0);
        let fit = p_analytic.and_then(|p| {
            if p.re <= 1.0 + 1e-9 {
                return None;
            }
            let window = (trace.len() / 2).min(512);
            if window < 16 || trace[trace.len() - window].0 < 20 {
                return None;
            }
            tail_with_uncertainty(&trace, p, window).ok()
        });
        match fit {
            Some((tail, unc)) => {
                let bound = tail.norm() + unc;
                if streak_ok && bound < cfg.tol * scale {
                    status = SeriesStatus::Converged;
                    if cfg.tail_correction {
                        correction = tail;
                        tail_bound = unc;
                    } else {
                        tail_bound = bound;
                    }
                    break 'outer;
                }
                if cfg.tail_correction && unc < cfg.tol * scale && tail.norm() < scale {
                    status = SeriesStatus::Converged;
                    correction = tail;
                    tail_bound = unc;
                    break 'outer;
                }
            }
            None => {
                if streak_ok {
                    let last = trace.last().unwrap().1.norm();
                    let bound = match p_analytic {
                        Some(p) if p.re > 1.0 => last * k as f64 / (p.re - 1.0),
                        _ => last * cfg.streak as f64,
                    };
                    if bound < cfg.tol * scale {
                        status = SeriesStatus::Converged;
                        tail_bound = bound;
                        break 'outer;
                    }
                }
            }
        }
    }
    let value = sum.value() + correction;
    let mags: Vec<(u64, f64)> = trace.iter().map(|&(k, t)| (k, t.norm())).collect();
    Ok(SeriesResult {
        value,
        terms_used: k,
        tail_bound,
        status,
        decay_exponent_fit: tail_exponent_estimate(&mags).ok(),
        trace: cfg.trace.then_some(trace),
    })
}

/// Block evaluation of an indexed term function; data-parallel when the
/// `parallel` feature is on (the reduction stays sequential either way, so
/// results are bit-identical across both paths).
fn indexed_blocks<F>(f: F) -> impl FnMut(std::ops::Range<u64>) -> Result<Vec<C>>
where
    F: Fn(u64) -> Result<C> + Sync,
{
    move |range| {
        #[cfg(feature = "parallel")]
        {
            range.into_par_iter().map(|k| f(k)).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            range.map(|k| f(k)).collect()
        }
    }
}

/// The per-term shift ε_k = (λ-x₁)(λ-x₂)/(λ+k) pulling each pole toward λ.
pub fn epsilon_shift(lambda: C, x1: C, x2: C, k: u64) -> C {
    (lambda - x1) * (lambda - x2) / (lambda + k as f64)
}

/// log of Γ(z)/Γ(w) stable when w is far into the left half-plane; the
/// second element is a finite multiplicative factor (from the reflection
/// sine) to apply outside the exponential.
fn log_gamma_ratio(z: C, w: C) -> Result<(C, C)> {
    if w.re < 0.5 {
        Ok((log_gamma(z)? + log_gamma(1.0 - w)?, sin_pi(w) / PI))
    } else {
        Ok((log_gamma(z)? - log_gamma(w)?, C::new(1.0, 0.0)))
    }
}

/// (base)_m / (k! · extra) with interleaved running products for small
/// indices (no gamma calls, no overflow) and log-gamma differences past
/// [`DIRECT_PRODUCT_LIMIT`]. `extra_base` of None means extra = 1.
fn poch_over_factorial(base: C, m: i64, k: u64, extra_base: Option<C>) -> Result<C> {
    if m >= 0 && (m as u64).max(k) <= DIRECT_PRODUCT_LIMIT {
        let mut t = C::new(1.0, 0.0);
        let mut ex: i32 = 0; // power-of-two offset against mid-product overflow
        let top = (m as u64).max(k);
        for j in 0..top {
            if j < m as u64 {
                t *= base + j as f64;
            }
            if j < k {
                t /= (j + 1) as f64;
                if let Some(eb) = extra_base {
                    t /= eb + j as f64;
                }
            }
            let n = t.norm();
            if n > 1e150 {
                t *= 2f64.powi(-512);
                ex += 512;
            } else if n > 0.0 && n < 1e-150 {
                t *= 2f64.powi(512);
                ex -= 512;
            }
        }
        return Ok(t * 2f64.powi(ex));
    }
    let mut lg = log_gamma(base + m as f64)? - log_gamma(base)? - ln_factorial(k);
    if let Some(eb) = extra_base {
        lg -= log_gamma(eb + k as f64)? - log_gamma(eb)?;
    }
    Ok(lg.exp())
}

/// Branch-free ∏((c+j)²-d) over j=0..m divided by k!·(extra)_k, same
/// small/large split as [`poch_over_factorial`]; the pair product is
/// symmetric in the two members by construction.
fn pair_poch_over_factorial(pair: &SqrtPair, m: i64, k: u64, extra_base: Option<C>) -> Result<C> {
    if m < 0 {
        // (x)_{-n} = 1/∏(x-j); fall through to the log path for simplicity
    } else if (m as u64).max(k) <= DIRECT_PRODUCT_LIMIT {
        let mut t = C::new(1.0, 0.0);
        let mut ex: i32 = 0;
        let top = (m as u64).max(k);
        for j in 0..top {
            if j < m as u64 {
                let cj = pair.center + j as f64;
                t *= cj * cj - pair.radicand;
            }
            if j < k {
                t /= (j + 1) as f64;
                if let Some(eb) = extra_base {
                    t /= eb + j as f64;
                }
            }
            let n = t.norm();
            if n > 1e150 {
                t *= 2f64.powi(-512);
                ex += 512;
            } else if n > 0.0 && n < 1e-150 {
                t *= 2f64.powi(512);
                ex -= 512;
            }
        }
        return Ok(t * 2f64.powi(ex));
    }
    let (a, b) = pair.values();
    let mut lg = log_gamma(a + m as f64)? - log_gamma(a)? + log_gamma(b + m as f64)?
        - log_gamma(b)?
        - ln_factorial(k);
    if let Some(eb) = extra_base {
        lg -= log_gamma(eb + k as f64)? - log_gamma(eb)?;
    }
    Ok(lg.exp())
}

fn is_integer(z: C, guard: f64) -> Option<i64> {
    let n = z.re.round();
    if z.im.abs() < guard && (z.re - n).abs() < guard {
        Some(n as i64)
    } else {
        None
    }
}

/// One term of the two-variable expansion with shift a (general a: gamma
/// ratio through reflection; integer a: pure Pochhammer form).
pub fn cdi_term(x1: C, x2: C, a: C, lambda: C, k: u64) -> Result<C> {
    let kf = k as f64;
    let eps = epsilon_shift(lambda, x1, x2, k);
    let br = 1.0 / (x1 + kf) + 1.0 / (x2 + kf) - 1.0 / (lambda + kf);
    if let Some(ai) = is_integer(a, 1e-12) {
        let sign = if ai.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let p = poch_over_factorial(1.0 - lambda + eps, k as i64 - ai, k, None)?;
        return Ok(sign * p * br);
    }
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let z = lambda - eps;
    let w = z + a - kf;
    let (lg, fac) = log_gamma_ratio(z, w)?;
    Ok(sign * (lg - ln_factorial(k)).exp() * fac * br)
}

/// Coefficient-recurrence term stream for the plain beta expansion:
/// c_0 = 1, c_{k+1} = c_k (1-x₂+k)/(k+1), term_k = c_k/(x₁+k).
struct GapfTerms {
    x1: C,
    x2: C,
    coeff: C,
    k: u64,
}

impl GapfTerms {
    fn block(&mut self, range: std::ops::Range<u64>) -> Result<Vec<C>> {
        assert_eq!(range.start, self.k);
        let mut out = Vec::with_capacity((range.end - range.start) as usize);
        for k in range {
            out.push(self.coeff / (self.x1 + k as f64));
            self.coeff *= (1.0 - self.x2 + k as f64) / (k as f64 + 1.0);
            self.k = k + 1;
        }
        Ok(out)
    }
}

/// B(x₁,x₂) by the one-variable infinite partial fraction, Re(x₂) > 0.
pub fn beta_gapf(x1: C, x2: C, cfg: &ConvergenceConfig) -> Result<SeriesResult> {
    if x2.re <= 0.0 {
        return Ok(domain_violation());
    }
    check_grids(&[x1])?;
    let mut terms = GapfTerms { x1, x2, coeff: C::new(1.0, 0.0), k: 0 };
    drive(|r| terms.block(r), Some(C::new(1.0 + x2.re, 0.0)), cfg)
}

/// Γ(x₁)Γ(x₂)/Γ(x₁+x₂+a) by the λ-shifted expansion, Re(a+λ) > 0.
pub fn beta_sym(x1: C, x2: C, a: C, lambda: C, cfg: &ConvergenceConfig) -> Result<SeriesResult> {
    if (a + lambda).re <= 0.0 {
        return Ok(domain_violation());
    }
    check_grids(&[x1, x2, lambda])?;
    let p = C::new(1.0 + (lambda + a).re, 0.0);
    drive(indexed_blocks(|k| cdi_term(x1, x2, a, lambda, k)), Some(p), cfg)
}

/// One term of the λ→∞ degeneration: (-1)^k (x₁+x₂)_k/k! (1/(x₁+k)+1/(x₂+k)).
pub fn lambda_inf_term(x1: C, x2: C, k: u64) -> Result<C> {
    let kf = k as f64;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let c = poch_over_factorial(x1 + x2, k as i64, k, None)?;
    Ok(sign * c * (1.0 / (x1 + kf) + 1.0 / (x2 + kf)))
}

/// B(x₁,x₂) via the alternating λ→∞ form, summed with iterated averaging
/// of the partial sums (the raw series is only conditionally convergent,
/// and oscillates without decay at e.g. x₁=x₂=1).
pub fn beta_sym_lambda_inf(x1: C, x2: C, cfg: &ConvergenceConfig) -> Result<SeriesResult> {
    check_grids(&[x1, x2])?;
    let mut sum = NeumaierSum::new();
    let mut trace: Vec<(u64, C)> = Vec::new();
    let mut partials: Vec<C> = Vec::new();
    let mut k = 0u64;
    let mut status = SeriesStatus::CapHit;
    let mut value = C::new(0.0, 0.0);
    let mut tail_bound = f64::INFINITY;
    const LEVELS: usize = 48;
    'outer: while k < cfg.n_max {
        let end = (k + BLOCK).min(cfg.n_max);
        for kk in k..end {
            let t = lambda_inf_term(x1, x2, kk)?;
            trace.push((kk, t));
            sum.add(t);
            partials.push(sum.value());
        }
        k = end;
        if k < cfg.n_min.max(LEVELS as u64 + 1) {
            continue;
        }
        // averaging triangle over the trailing partial sums
        let mut a: Vec<C> = partials[partials.len() - (LEVELS + 1)..].to_vec();
        let mut prev = *a.last().unwrap();
        for _ in 0..LEVELS {
            for i in 0..a.len() - 1 {
                a[i] = (a[i] + a[i + 1]) / 2.0;
            }
            a.pop();
            let cur = a[a.len() - 1];
            let d = (cur - prev).norm();
            if a.len() > 1 && d < cfg.tol * cur.norm().max(1e-300) {
                value = cur;
                tail_bound = d.max(f64::MIN_POSITIVE);
                status = SeriesStatus::Converged;
                break 'outer;
            }
            prev = cur;
        }
    }
    if status != SeriesStatus::Converged {
        if k >= cfg.n_max {
            value = *partials.last().unwrap();
        }
        return Ok(SeriesResult {
            value,
            terms_used: k,
            tail_bound,
            status,
            decay_exponent_fit: None,
            trace: cfg.trace.then_some(trace),
        });
    }
    Ok(SeriesResult {
        value,
        terms_used: k,
        tail_bound,
        status,
        decay_exponent_fit: None,
        trace: cfg.trace.then_some(trace),
    })
}

/// Order a materialized pair so the member whose gamma argument lies
/// further left (and therefore needs reflection) comes first; value-based,
/// so the result is invariant under swapping the pair labels.
fn order_by_shift(pair: &SqrtPair, shift: C) -> (C, C) {
    let (a, b) = pair.values();
    let (sa, sb) = ((shift - a).re, (shift - b).re);
    if sa < sb || (sa == sb && (shift - a).im <= (shift - b).im) {
        (a, b)
    } else {
        (b, a)
    }
}

/// First-sum term of the asymmetric closed-string expansion.
pub fn clf_term1(x1: C, x2: C, s: C, t: C, u: C, lambda: C, k: u64) -> Result<C> {
    let kf = k as f64;
    let eps = epsilon_shift(lambda, x1, x2, k);
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let br = 1.0 / (x1 + kf) + 1.0 / (x2 + kf) - 1.0 / (lambda + kf);
    let w = u + lambda - eps - kf;
    let (lg_w, fac) = if w.re < 0.5 {
        (log_gamma(1.0 - w)?, sin_pi(w) / PI)
    } else {
        (-log_gamma(w)?, C::new(1.0, 0.0))
    };
    let lg = log_gamma(lambda - eps)? + log_gamma(s - lambda + eps + kf)?
        - log_gamma(t + kf)?
        - log_gamma(t - lambda + eps)?
        - ln_factorial(k)
        + lg_w;
    Ok(sign * lg.exp() * fac * br)
}

/// Second-sum term, consuming the (c⁺, c⁻) pair symmetrically.
pub fn clf_term2(x1: C, x2: C, s: C, t: C, u: C, lambda: C, k: u64) -> Result<C> {
    let kf = k as f64;
    let pair = c_pair(s + kf, lambda, x1, x2);
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let (far, near) = order_by_shift(&pair, t);
    let w = t - far;
    let (lg_w, fac) = if w.re < 0.5 {
        (log_gamma(1.0 - w)?, sin_pi(w) / PI)
    } else {
        (-log_gamma(w)?, C::new(1.0, 0.0))
    };
    let lg = log_gamma(far)? + log_gamma(near)? - log_gamma(t - near)?
        - log_gamma(u + s + kf)?
        - ln_factorial(k)
        + lg_w;
    Ok(sign * lg.exp() * fac / (s + kf - x1 - x2))
}

/// Γ(x₁)Γ(x₂)Γ(s-x₁-x₂)/(Γ(t-x₁)Γ(t-x₂)Γ(u+x₁+x₂)), Re(2λ-s+t+u) > 0.
/// The two sums run and stop independently; the reported result merges
/// their statuses conservatively.
pub fn closed_asym(
    x1: C,
    x2: C,
    s: C,
    t: C,
    u: C,
    lambda: C,
    cfg: &ConvergenceConfig,
) -> Result<SeriesResult> {
    if (2.0 * lambda - s + t + u).re <= 0.0 {
        return Ok(domain_violation());
    }
    check_grids(&[x1, x2, lambda, s - x1 - x2])?;
    let p = C::new(1.0 + (2.0 * lambda - s + t + u).re, 0.0);
    let r1 = drive(indexed_blocks(|k| clf_term1(x1, x2, s, t, u, lambda, k)), Some(p), cfg)?;
    let r2 = drive(indexed_blocks(|k| clf_term2(x1, x2, s, t, u, lambda, k)), Some(p), cfg)?;
    let status = match (r1.status, r2.status) {
        (SeriesStatus::Converged, SeriesStatus::Converged) => SeriesStatus::Converged,
        _ => SeriesStatus::CapHit,
    };
    Ok(SeriesResult {
        value: r1.value + r2.value,
        terms_used: r1.terms_used.max(r2.terms_used),
        tail_bound: r1.tail_bound + r2.tail_bound,
        status,
        decay_exponent_fit: r1.decay_exponent_fit,
        trace: match (r1.trace, r2.trace) {
            (Some(mut a), Some(b)) => {
                // interleave is not meaningful; keep the first sum's trace
                // and extend with the second for inspection
                a.extend(b);
                Some(a)
            }
            _ => None,
        },
    })
}

/// One term of the symmetric three-variable expansion (general u: gamma
/// ratios through reflection, η pair consumed symmetrically).
pub fn tvd_term(x1: C, x2: C, x3: C, u: C, lambda: C, k: u64) -> Result<C> {
    let kf = k as f64;
    let e1 = x1 + x2 + x3;
    let prod = (x1 - lambda) * (x2 - lambda) * (x3 - lambda);
    let pair = eta_pair(e1 + kf, lambda, prod, lambda + kf)?;
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let br = 1.0 / (x1 + kf) + 1.0 / (x2 + kf) + 1.0 / (x3 + kf) - 1.0 / (lambda + kf);
    let (far, near) = order_by_shift(&pair, u);
    let w = u - far;
    let (lg_w, fac) = if w.re < 0.5 {
        (log_gamma(1.0 - w)?, sin_pi(w) / PI)
    } else {
        (-log_gamma(w)?, C::new(1.0, 0.0))
    };
    let lg = log_gamma(far)? + log_gamma(near)? - log_gamma(u + kf)? - log_gamma(u - near)?
        - ln_factorial(k)
        + lg_w;
    Ok(sign * lg.exp() * fac * br)
}

/// Integer-a term of the same expansion (Pochhammer pair products, no
/// branch choice); the sum of these terms equals the tvd left-hand side
/// times Γ(a+s), which the caller divides back out.
pub fn tve_term(x1: C, x2: C, x3: C, a: i64, lambda: C, k: u64) -> Result<C> {
    let kf = k as f64;
    let e1 = x1 + x2 + x3;
    let s = e1;
    let prod = (x1 - lambda) * (x2 - lambda) * (x3 - lambda);
    let pair = eta_pair(e1 + kf, lambda, prod, lambda + kf)?;
    let refl = pair.reflected(C::new(1.0, 0.0)); // members 1-η^∓
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let br = 1.0 / (x1 + kf) + 1.0 / (x2 + kf) + 1.0 / (x3 + kf) - 1.0 / (lambda + kf);
    let core = pair_poch_over_factorial(&refl, k as i64 - a, k, Some(a as f64 + s))?;
    Ok(sign * core * br)
}

/// ∏Γ(x_j)/∏Γ(u-x_j), Re(λ+u-e₁(x)) > 0; when u-e₁(x) is an integer the
/// rational pair-product path is used.
pub fn closed_sym(
    x1: C,
    x2: C,
    x3: C,
    u: C,
    lambda: C,
    cfg: &ConvergenceConfig,
) -> Result<SeriesResult> {
    let e1 = x1 + x2 + x3;
    if (lambda + u - e1).re <= 0.0 {
        return Ok(domain_violation());
    }
    check_grids(&[x1, x2, x3, lambda])?;
    let p = C::new(1.0 + 2.0 * (lambda + u - e1).re, 0.0);
    if let Some(a) = is_integer(u - e1, 1e-12) {
        let mut res = drive(indexed_blocks(|k| tve_term(x1, x2, x3, a, lambda, k)), Some(p), cfg)?;
        // the integer form sums to Γ(a+s) times the target gamma ratio
        let gs = crate::scalar::gamma(C::new(a as f64, 0.0) + e1)?;
        res.value /= gs;
        res.tail_bound /= gs.norm();
        if let Some(tr) = &mut res.trace {
            for (_, t) in tr.iter_mut() {
                *t /= gs;
            }
        }
        return Ok(res);
    }
    drive(indexed_blocks(|k| tvd_term(x1, x2, x3, u, lambda, k)), Some(p), cfg)
}

/// The three-integer π family: prefactor × Σ_k (base)_{k-a}/k! × bracket.
pub fn pi_family(m: u32, n: u32, a: i64, lambda: C, cfg: &ConvergenceConfig) -> Result<SeriesResult> {
    if (m as i64 + n as i64 + a) < 0 {
        return Err(Error::Range { n: m as i64 + n as i64 + a, what: "m+n+a must be nonnegative" });
    }
    if lambda.re <= -(a as f64) {
        return Ok(domain_violation());
    }
    check_grids(&[lambda])?;
    let sign = if a.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let mna = crate::scalar::factorial((m as i64 + n as i64 + a) as u64);
    let dfm = crate::scalar::double_factorial(2 * m as i64 - 1)? as f64;
    let dfn = crate::scalar::double_factorial(2 * n as i64 - 1)? as f64;
    let pref = sign * mna * 2f64.powi((m + n) as i32) / (dfm * dfn);
    let xm = C::new(0.5 + m as f64, 0.0);
    let xn = C::new(0.5 + n as f64, 0.0);
    let term = |k: u64| -> Result<C> {
        let kf = k as f64;
        let base = 1.0 - lambda + (lambda - xm) * (lambda - xn) / (lambda + kf);
        let core = poch_over_factorial(base, k as i64 - a, k, None)?;
        let br = 2.0 / (2.0 * (m as f64 + kf) + 1.0) + 2.0 / (2.0 * (n as f64 + kf) + 1.0)
            - 1.0 / (lambda + kf);
        Ok(core * br)
    };
    let p = C::new(1.0 + lambda.re + a as f64, 0.0);
    let mut res = drive(indexed_blocks(term), Some(p), cfg)?;
    res.value *= pref;
    res.tail_bound *= pref.abs();
    if let Some(tr) = &mut res.trace {
        for (_, t) in tr.iter_mut() {
            *t *= pref;
        }
    }
    Ok(res)
}

/// One term of the π²/2 series: (-1)^k (ξ⁺)_k(ξ⁻)_k/(k!(3/2)_k) ×
/// (6/(2k+1) - 1/(λ+k)), with the ξ pair consumed as a product.
pub fn pi_squared_term(lambda: C, k: u64) -> Result<C> {
    let kf = k as f64;
    // ξ^± = 1/4 - k/2 ± ((2k+1)/4)√((k+2-3λ)/(k+λ))
    let center = C::new(0.25 - kf / 2.0, 0.0);
    let q = (2.0 * kf + 1.0) / 4.0;
    let radicand = q * q * ((kf + 2.0 - 3.0 * lambda) / (kf + lambda));
    let pair = SqrtPair::new(center, radicand);
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let core = pair_poch_over_factorial(&pair, k as i64, k, Some(C::new(1.5, 0.0)))?;
    Ok(sign * core * (6.0 / (2.0 * kf + 1.0) - 1.0 / (lambda + kf)))
}

/// π²/2, Re(λ) > 0.
pub fn pi_squared_series(lambda: C, cfg: &ConvergenceConfig) -> Result<SeriesResult> {
    if lambda.re <= 0.0 {
        return Ok(domain_violation());
    }
    let p = C::new(1.0 + 2.0 * lambda.re, 0.0);
    drive(indexed_blocks(|k| pi_squared_term(lambda, k)), Some(p), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::gamma;

    fn r(x: f64) -> C {
        C::new(x, 0.0)
    }

    fn assert_rel(got: C, want: C, tol: f64) {
        assert!(
            (got - want).norm() / want.norm().max(1e-300) < tol,
            "got {got}, want {want}"
        );
    }

    #[test]
    fn gapf_spec_points() {
        let cfg = ConvergenceConfig::default();
        let res = beta_gapf(r(1.0), r(1.0), &cfg).unwrap();
        assert_eq!(res.status, SeriesStatus::Converged);
        assert_rel(res.value, r(1.0), 1e-10);

        let res = beta_gapf(r(0.5), r(1.5), &cfg).unwrap();
        assert_eq!(res.status, SeriesStatus::Converged);
        assert_rel(res.value, r(PI / 2.0), 1e-10);

        // slow-converging case against the closed form
        let res = beta_gapf(r(0.5), r(0.1), &cfg).unwrap();
        assert_eq!(res.status, SeriesStatus::Converged);
        let oracle = gamma(r(0.5)).unwrap() * gamma(r(0.1)).unwrap() / gamma(r(0.6)).unwrap();
        assert_rel(res.value, oracle, 1e-9);

        assert_eq!(beta_gapf(r(1.0), r(-0.5), &cfg).unwrap().status, SeriesStatus::DomainViolation);
        assert!(beta_gapf(r(-2.0), r(1.0), &cfg).is_err());
    }

    #[test]
    fn cdi_pi_at_lambda_five() {
        let cfg = ConvergenceConfig::default();
        let res = beta_sym(r(0.5), r(0.5), r(0.0), r(5.0), &cfg).unwrap();
        assert_eq!(res.status, SeriesStatus::Converged);
        assert_rel(res.value, r(PI), 1e-10);
        assert!(res.terms_used <= 2000, "{}", res.terms_used);
    }

    #[test]
    fn cdi_arcsin_pattern_at_half() {
        // λ=1/2: term_k = 2(2k-1)!!/(k! 2^k (2k+1)); check the first few and π
        let cfg = ConvergenceConfig { trace: true, ..Default::default() };
        let res = beta_sym(r(0.5), r(0.5), r(0.0), r(0.5), &cfg).unwrap();
        assert_rel(res.value, r(PI), 1e-9);
        let tr = res.trace.unwrap();
        let mut df = 1.0; // (2k-1)!!
        for &(k, t) in tr.iter().take(12) {
            if k > 0 {
                df *= 2.0 * k as f64 - 1.0;
            }
            let want = 2.0 * df
                / (crate::scalar::factorial(k) * 2f64.powi(k as i32) * (2.0 * k as f64 + 1.0));
            assert_rel(t, r(want), 1e-12);
        }
    }

    #[test]
    fn cdi_general_a_matches_integer_path() {
        // same parameters, a passed as integer vs a+tiny offset off the
        // integer detector: values agree
        let cfg = ConvergenceConfig::default();
        let x1 = C::new(0.6, 0.2);
        let x2 = r(0.9);
        let lam = r(1.7);
        let ri = beta_sym(x1, x2, r(1.0), lam, &cfg).unwrap();
        let rg = beta_sym(x1, x2, C::new(1.0, 1e-9), lam, &cfg).unwrap();
        assert!((ri.value - rg.value).norm() / ri.value.norm() < 1e-6);
        // and both match the oracle
        let oracle = gamma(x1).unwrap() * gamma(x2).unwrap() / gamma(x1 + x2 + 1.0).unwrap();
        assert_rel(ri.value, oracle, 1e-9);
    }

    #[test]
    fn cdi_random_oracle_sweep() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let cfg = ConvergenceConfig::default();
        for _ in 0..25 {
            let x1 = C::new(rng.gen_range(0.2..1.8), rng.gen_range(-0.5..0.5));
            let x2 = C::new(rng.gen_range(0.2..1.8), rng.gen_range(-0.5..0.5));
            let a = C::new(rng.gen_range(0.2..1.5), rng.gen_range(-0.3..0.3));
            let lam = C::new(rng.gen_range(0.7..4.0), rng.gen_range(-0.5..0.5));
            let res = beta_sym(x1, x2, a, lam, &cfg).unwrap();
            assert_eq!(res.status, SeriesStatus::Converged);
            let oracle =
                gamma(x1).unwrap() * gamma(x2).unwrap() / gamma(x1 + x2 + a).unwrap();
            assert_rel(res.value, oracle, 1e-8);
        }
    }

    #[test]
    fn cdi_collapse_to_gapf_termwise() {
        let cfg = ConvergenceConfig { trace: true, n_min: 64, ..Default::default() };
        let x1 = r(0.7);
        let x2 = r(1.3);
        let a = beta_sym(x1, x2, r(0.0), x2, &cfg).unwrap();
        let b = beta_gapf(x1, x2, &cfg).unwrap();
        let (ta, tb) = (a.trace.unwrap(), b.trace.unwrap());
        for k in 0..=50usize {
            let (x, y) = (ta[k].1, tb[k].1);
            assert!(
                (x - y).norm() / y.norm().max(1e-300) < 1e-12,
                "k={k}: {x} vs {y}"
            );
        }
    }

    #[test]
    fn cdi_swap_symmetry_bitwise() {
        for k in [0u64, 1, 7, 100, 5000] {
            let a = cdi_term(C::new(0.4, 0.2), r(1.1), r(0.3), r(2.2), k).unwrap();
            let b = cdi_term(r(1.1), C::new(0.4, 0.2), r(0.3), r(2.2), k).unwrap();
            assert_eq!(a, b, "k={k}");
        }
    }

    #[test]
    fn lambda_inf_spec_points() {
        let cfg = ConvergenceConfig::default();
        let res = beta_sym_lambda_inf(r(0.5), r(0.5), &cfg).unwrap();
        assert_eq!(res.status, SeriesStatus::Converged);
        assert_rel(res.value, r(PI), 1e-9);

        let res = beta_sym_lambda_inf(r(1.0), r(1.0), &cfg).unwrap();
        assert_eq!(res.status, SeriesStatus::Converged);
        assert_rel(res.value, r(1.0), 1e-9);

        let res = beta_sym_lambda_inf(r(0.5), r(1.5), &cfg).unwrap();
        assert_rel(res.value, r(PI / 2.0), 1e-9);
    }

    #[test]
    fn clf_spec_point() {
        let cfg = ConvergenceConfig::default();
        let res = closed_asym(r(0.25), r(0.25), r(1.0), r(1.0), r(0.0), r(3.0), &cfg).unwrap();
        assert_eq!(res.status, SeriesStatus::Converged);
        let g14 = gamma(r(0.25)).unwrap();
        let g34 = gamma(r(0.75)).unwrap();
        let want = (g14 / g34) * (g14 / g34);
        assert_rel(res.value, want, 1e-9);
        // domain guard
        let res = closed_asym(r(0.25), r(0.25), r(9.0), r(1.0), r(0.0), r(3.0), &cfg).unwrap();
        assert_eq!(res.status, SeriesStatus::DomainViolation);
    }

    #[test]
    fn clf_oracle_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        let cfg = ConvergenceConfig::default();
        for _ in 0..10 {
            let x1 = C::new(rng.gen_range(0.2..0.8), rng.gen_range(-0.2..0.2));
            let x2 = C::new(rng.gen_range(0.2..0.8), rng.gen_range(-0.2..0.2));
            let s = r(rng.gen_range(1.6..2.4));
            let t = r(rng.gen_range(0.8..1.4));
            let u = r(rng.gen_range(0.3..1.0));
            let lam = r(rng.gen_range(1.5..3.0));
            let res = closed_asym(x1, x2, s, t, u, lam, &cfg).unwrap();
            assert_eq!(res.status, SeriesStatus::Converged);
            let want = gamma(x1).unwrap() * gamma(x2).unwrap() * gamma(s - x1 - x2).unwrap()
                / (gamma(t - x1).unwrap() * gamma(t - x2).unwrap() * gamma(u + x1 + x2).unwrap());
            assert_rel(res.value, want, 1e-8);
        }
    }

    #[test]
    fn tvd_virasoro_shapiro_point() {
        // x=(1/3,1/3,1/3), u=1, λ=1/3: the slow k^{-5/3} case, tail-corrected
        let cfg = ConvergenceConfig::default();
        let third = 1.0 / 3.0;
        let res = closed_sym(r(third), r(third), r(third), r(1.0), r(third), &cfg).unwrap();
        assert_eq!(res.status, SeriesStatus::Converged);
        let want = (gamma(r(third)).unwrap() / gamma(r(2.0 * third)).unwrap()).powu(3);
        assert_rel(res.value, want, 1e-9);
        // terms real for real inputs
        let tr_cfg = ConvergenceConfig { trace: true, n_min: 128, ..Default::default() };
        let res = closed_sym(r(third), r(third), r(third), r(1.0), r(third), &tr_cfg).unwrap();
        for &(_, t) in res.trace.as_ref().unwrap().iter().take(100) {
            assert!(t.im.abs() <= 1e-13 * t.re.abs().max(1e-300));
        }
    }

    #[test]
    fn tvd_general_u_matches_oracle() {
        let cfg = ConvergenceConfig::default();
        let (x1, x2, x3) = (r(0.3), r(0.45), r(0.5));
        let u = r(1.4); // u - e1 = 0.15, not an integer
        let lam = r(1.9);
        let res = closed_sym(x1, x2, x3, u, lam, &cfg).unwrap();
        assert_eq!(res.status, SeriesStatus::Converged);
        let want = gamma(x1).unwrap() * gamma(x2).unwrap() * gamma(x3).unwrap()
            / (gamma(u - x1).unwrap() * gamma(u - x2).unwrap() * gamma(u - x3).unwrap());
        assert_rel(res.value, want, 1e-8);
    }

    #[test]
    fn tvd_euler_degeneration() {
        // x=(1/2,1/2,1/2), u=3/2, λ=1/2: the underlying integer-a sum is
        // Σ 4/(2k+1)² = π²/2, and the gamma-ratio value is π^{3/2}
        let cfg = ConvergenceConfig { trace: true, ..Default::default() };
        let res = closed_sym(r(0.5), r(0.5), r(0.5), r(1.5), r(0.5), &cfg).unwrap();
        assert_rel(res.value, r(PI.powf(1.5)), 1e-9);
        let g32 = gamma(r(1.5)).unwrap();
        for &(k, t) in res.trace.as_ref().unwrap().iter().take(50) {
            let want = 4.0 / ((2.0 * k as f64 + 1.0) * (2.0 * k as f64 + 1.0));
            assert_rel(t * g32, r(want), 1e-12);
        }
    }

    #[test]
    fn tvd_domain_guard() {
        let cfg = ConvergenceConfig::default();
        let res = closed_sym(r(0.5), r(0.5), r(0.5), r(1.0), r(0.2), &cfg).unwrap();
        assert_eq!(res.status, SeriesStatus::DomainViolation);
    }

    #[test]
    fn pi_family_points() {
        let cfg = ConvergenceConfig::default();
        for (m, n, a, lam) in [(0u32, 0u32, 0i64, 0.5), (0, 0, 0, 5.0), (1, 0, 0, 1.0), (1, 2, 1, 0.8)] {
            let res = pi_family(m, n, a, r(lam), &cfg).unwrap();
            assert_eq!(res.status, SeriesStatus::Converged, "m={m} n={n} a={a}");
            assert_rel(res.value, r(PI), 1e-8);
        }
        let res = pi_family(0, 0, 0, r(-0.5), &cfg).unwrap();
        assert_eq!(res.status, SeriesStatus::DomainViolation);
    }

    #[test]
    fn pi_squared_points() {
        let cfg = ConvergenceConfig { trace: true, ..Default::default() };
        let res = pi_squared_series(r(0.5), &cfg).unwrap();
        assert_rel(res.value, r(PI * PI / 2.0), 1e-9);
        // termwise Euler degeneration
        for &(k, t) in res.trace.as_ref().unwrap().iter().take(101) {
            let want = 4.0 / ((2.0 * k as f64 + 1.0) * (2.0 * k as f64 + 1.0));
            assert!((t - want).norm() / want < 1e-12, "k={k}: {t} vs {want}");
        }
        let res = pi_squared_series(r(2.0), &cfg).unwrap();
        assert_rel(res.value, r(PI * PI / 2.0), 1e-9);
        let res = pi_squared_series(r(-1.0), &cfg).unwrap();
        assert_eq!(res.status, SeriesStatus::DomainViolation);
    }

    #[test]
    fn deterministic_reruns() {
        let cfg = ConvergenceConfig::default();
        let a = beta_sym(r(0.5), r(0.5), r(0.0), r(5.0), &cfg).unwrap();
        let b = beta_sym(r(0.5), r(0.5), r(0.0), r(5.0), &cfg).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.terms_used, b.terms_used);
        let a = closed_sym(r(0.3), r(0.4), r(0.5), r(1.4), r(1.9), &cfg).unwrap();
        let b = closed_sym(r(0.3), r(0.4), r(0.5), r(1.4), r(1.9), &cfg).unwrap();
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn decay_exponent_matches_appendix_law() {
        // non-integer λ+a so the generic law 1+Re(λ+a) applies exactly
        let cfg = ConvergenceConfig {
            n_min: 2048,
            tol: 1e-14,
            tail_correction: false,
            ..Default::default()
        };
        for (lam, a) in [(1.4, 0.0), (2.3, 0.0), (0.9, 0.35)] {
            let res = beta_sym(r(0.5), r(0.6), r(a), r(lam), &cfg).unwrap();
            let p = res.decay_exponent_fit.expect("fit available");
            assert!(
                (p - (1.0 + lam + a)).abs() < 0.3,
                "λ={lam} a={a}: fitted {p}, expected {}",
                1.0 + lam + a
            );
        }
    }
}
