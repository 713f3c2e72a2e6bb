//! Rank bounds from higher incidence matrices.
//!
//! For a covering with `s`-incidence matrix `A`, the Gram matrix `AAᵀ` splits as
//! `P + M` where `P` is a nonnegative combination of Gram matrices (so positive
//! semidefinite) and `M` is entrywise nonnegative. Any principal submatrix of `M`
//! that is diagonally dominant certifies a lower bound on the rank of `AAᵀ`, and
//! hence on the number of blocks. A [`SpectralContext`] holds the integers that
//! drive that argument for one `(Params, s)`; the theorem functions turn it into
//! bound values through the common [`cb_bound`] form
//!
//! ```text
//! CB(α, β) = (b_s·(α−β)·C(v,s) + α·C(v,s)) / ((α−β)·C(k,s) + 1)
//! ```
//!
//! # Rounding in the square-root case
//!
//! Writing `γ = α − β`, `∂CB/∂γ` has the sign of `b_s − α·C(k,s)`. With `α = 1`
//! and `b_s < C(k,s)` the bound is therefore nondecreasing in `β`, so replacing
//! an irrational `β` by a certified under-approximation (see
//! [`sqrt_lower`](crate::exactmath::sqrt_lower)) still yields a valid lower
//! bound. Only case (c) of [`theorem_smalld`] needs this, and only it sets
//! [`CBParams::beta_is_under_approx`].

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::classic::{schonheim, schonheim_step, Params};
use crate::error::{Error, Result};
use crate::exactmath::{binom, binom_int, ceil_rat, sqrt_lower, Nat, Rat};

/// Which of the hypotheses behind the decomposition `AAᵀ = P + M` hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypotheses {
    /// `t < k < v` and `1 ≤ s ≤ ⌊t/2⌋`; always true for a built context.
    pub shape: bool,
    /// `b_{2s} ≥ max(1, L_λ(v−2s, k−2s, t−2s))`.
    pub lower_end: bool,
    /// `b_i ≥ ⌈(v−i)/(k−i)·b_{i+1}⌉` for `i = 2s−1, …, s`.
    pub chain: bool,
    /// `a_j ≥ 0` for every `j`.
    pub nonneg_a: bool,
    /// `b_s < C(k, s)`.
    pub b_s_small: bool,
}

impl Hypotheses {
    pub fn all_hold(&self) -> bool {
        self.shape && self.lower_end && self.chain && self.nonneg_a
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralContext {
    pub params: Params,
    pub s: u64,
    /// `b[i − s]` is the lower bound `b_i` on `b(Z)` for `|Z| = i`, `i = s..=2s`.
    pub b: Vec<Nat>,
    /// `a[j]` for `j = 0..=s`.
    pub a: Vec<BigInt>,
    pub d: BigInt,
    pub d_prime: BigInt,
    pub binom_vs: Nat,
    pub binom_ks: Nat,
    pub flags: Hypotheses,
}

impl SpectralContext {
    /// `b_i` for `i ∈ {s, …, 2s}`.
    pub fn b(&self, i: u64) -> &Nat {
        assert!(i >= self.s && i <= 2 * self.s, "b_{i} outside s..=2s");
        &self.b[(i - self.s) as usize]
    }

    pub fn b_s(&self) -> &Nat {
        &self.b[0]
    }

    pub fn a_s(&self) -> &BigInt {
        &self.a[self.s as usize]
    }

    /// The sub-parameter sets whose bounds feed `b_s, …, b_{2s}`.
    pub fn input_keys(&self) -> Vec<Params> {
        (self.s..=2 * self.s).map(|i| self.params.derived(i)).collect()
    }
}

/// Parameters `(α, β)` of the bound form `CB(α, β)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CBParams {
    pub alpha: Rat,
    pub beta: Rat,
    pub beta_is_under_approx: bool,
}

impl CBParams {
    pub fn exact(alpha: Rat, beta: Rat) -> Self {
        CBParams { alpha, beta, beta_is_under_approx: false }
    }
}

/// The three cases of the small-`d` improvement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmallDCase {
    A,
    B,
    C,
}

impl fmt::Display for SmallDCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SmallDCase::A => "a",
            SmallDCase::B => "b",
            SmallDCase::C => "c",
        })
    }
}

fn int(n: &Nat) -> BigInt {
    BigInt::from(n.clone())
}

fn rat(n: impl Into<BigInt>) -> Rat {
    Rat::from_integer(n.into())
}

/// Assemble the context for `(p, s)` with `b_i = bound_provider(v−i, k−i, t−i, λ)`.
pub fn build_context<F>(p: &Params, s: u64, mut bound_provider: F) -> Result<SpectralContext>
where
    F: FnMut(&Params) -> Nat,
{
    p.validate()?;
    if !(p.t < p.k && p.k < p.v) {
        return Err(Error::ContextInapplicable(format!("{p}: need t < k < v")));
    }
    if s == 0 || 2 * s > p.t {
        return Err(Error::ContextInapplicable(format!("{p}: s = {s} outside 1..=floor(t/2)")));
    }

    let b: Vec<Nat> = (s..=2 * s).map(|i| bound_provider(&p.derived(i))).collect();
    let b_at = |i: u64| int(&b[(i - s) as usize]);

    let a: Vec<BigInt> = (0..=s)
        .map(|j| {
            (0..=j).fold(BigInt::zero(), |acc, i| {
                let term = binom_int(j, i) * b_at(2 * s - i);
                if (i + j) % 2 == 0 {
                    acc + term
                } else {
                    acc - term
                }
            })
        })
        .collect();

    let binom_vs = binom(p.v, s);
    let binom_ks = binom(p.k, s);
    let ks_minus_one = int(&binom_ks) - 1;
    let outside: BigInt = (0..s)
        .map(|i| binom_int(s, i) * binom_int(p.v - s, s - i) * b_at(2 * s - i))
        .sum();
    let d = b_at(s) * &ks_minus_one - outside;
    let d_prime = &d + &ks_minus_one;

    let bottom = p.derived(2 * s);
    let lower_end = b_at(2 * s) >= BigInt::one() && b_at(2 * s) >= int(&schonheim(&bottom));
    let chain = (s..2 * s).all(|i| {
        let needed = schonheim_step(p.v - i, p.k - i, &b[(i + 1 - s) as usize]);
        b[(i - s) as usize] >= needed
    });
    let nonneg_a = a.iter().all(|x| !x.is_negative());
    let b_s_small = b[0] < binom_ks;

    Ok(SpectralContext {
        params: *p,
        s,
        b,
        a,
        d,
        d_prime,
        binom_vs,
        binom_ks,
        flags: Hypotheses { shape: true, lower_end, chain, nonneg_a, b_s_small },
    })
}

/// `⌈CB(α, β)⌉` evaluated exactly.
pub fn cb_bound(ctx: &SpectralContext, cb: &CBParams) -> Result<Nat> {
    if cb.beta.is_negative() || cb.alpha < &cb.beta * rat(2) {
        return Err(Error::CbInapplicable(format!(
            "need alpha >= 2 beta >= 0, got alpha = {}, beta = {}",
            cb.alpha, cb.beta
        )));
    }
    if cb.beta_is_under_approx && (!cb.alpha.is_one() || !ctx.flags.b_s_small) {
        return Err(Error::CbInapplicable(
            "an under-approximated beta is only sound with alpha = 1 and b_s < C(k,s)".into(),
        ));
    }
    let gamma = &cb.alpha - &cb.beta;
    let bv = rat(int(&ctx.binom_vs));
    let bk = rat(int(&ctx.binom_ks));
    let bs = rat(int(ctx.b_s()));
    let num = &bs * &gamma * &bv + &cb.alpha * &bv;
    let den = &gamma * &bk + rat(1);
    let value = ceil_rat(&(num / den));
    Ok(value.to_biguint().unwrap_or_default())
}

/// The basic rank bound `⌈C(v,s)(b_s+1)/(C(k,s)+1)⌉`, when the hypotheses hold and `d < a_s`.
pub fn theorem_main(ctx: &SpectralContext) -> Option<Nat> {
    if !ctx.flags.all_hold() || ctx.d >= *ctx.a_s() {
        return None;
    }
    let cb = CBParams::exact(rat(1), Rat::zero());
    Some(cb_bound(ctx, &cb).expect("(1, 0) is always admissible"))
}

/// `(α, β)` for the large-`d` bound, when it applies (`d ≥ a_s ≥ 1`, `b_s < C(k,s)`
/// and `α ≥ 2β`).
pub fn dbig_params(ctx: &SpectralContext) -> Option<CBParams> {
    let a_s = ctx.a_s();
    if !ctx.flags.all_hold() || !ctx.flags.b_s_small || ctx.d < *a_s || *a_s < BigInt::one() {
        return None;
    }
    let num: BigInt = a_s + 1;
    let alpha = Rat::new(num.clone(), 2 * (&ctx.d + 1));
    let beta = Rat::new(num, 2 * (&ctx.d + int(&ctx.binom_ks)));
    // α ≥ 2β ⟺ C(k,s) ≥ d + 2; without it the CB form does not apply
    (alpha >= &beta * rat(2)).then(|| CBParams::exact(alpha, beta))
}

/// The large-`d` bound via a Caro–Tuza `a_s`-independent set.
pub fn theorem_dbig(ctx: &SpectralContext) -> Option<Nat> {
    let cb = dbig_params(ctx)?;
    cb_bound(ctx, &cb).ok()
}

/// Every applicable small-`d` case with its `(α, β)`.
///
/// Each returned pair satisfies `α ≥ 2β > 0`. Case (c) carries a `β` rounded
/// down to a multiple of `1/scale`.
pub fn smalld_params(ctx: &SpectralContext, scale: &Nat) -> Vec<(SmallDCase, CBParams)> {
    let a = ctx.a_s().clone();
    let d = ctx.d.clone();
    if !ctx.flags.all_hold() || !ctx.flags.b_s_small || d >= a {
        return Vec::new();
    }
    let dp = ctx.d_prime.clone();
    let one = rat(1);
    let mut out = Vec::new();

    // (a) always
    let alpha = &one - Rat::new(&d * &d, 2 * &a * (&a + 1));
    let beta = Rat::new(&a + 2, 2 * (&dp + 1));
    out.push((SmallDCase::A, CBParams::exact(alpha, beta)));

    // (b) d ≥ a/2 and d·d' < a(a+1)
    if 2 * &d >= a && &d * &dp < &a * (&a + 1) {
        let beta = &one - Rat::new(&d * &dp, &a * (&a + 1));
        out.push((SmallDCase::B, CBParams::exact(one.clone(), beta)));
    }

    // (c) d < a/2 and d(d'+1)² < 4(a+1)(a+2)(a−d)
    let dp1 = &dp + 1;
    if 2 * &d < a && &d * &dp1 * &dp1 < 4 * (&a + 1) * (&a + 2) * (&a - &d) {
        let radicand = Rat::new(&d * (&a + 2), (&a + 1) * (&a - &d));
        let root = sqrt_lower(&radicand, scale).expect("radicand is nonnegative");
        let beta = root - Rat::new(&d * &dp1, 2 * (&a + 1) * (&a - &d));
        out.push((
            SmallDCase::C,
            CBParams { alpha: one.clone(), beta, beta_is_under_approx: true },
        ));
    }

    out.retain(|(_, cb)| cb.beta.is_positive() && cb.alpha >= &cb.beta * rat(2));
    out
}

/// Best of the applicable small-`d` cases, with the case that achieved it
/// (earliest case on ties).
pub fn theorem_smalld(ctx: &SpectralContext, scale: &Nat) -> Option<(Nat, SmallDCase)> {
    let mut best: Option<(Nat, SmallDCase)> = None;
    for (case, cb) in smalld_params(ctx, scale) {
        let Ok(value) = cb_bound(ctx, &cb) else { continue };
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, case));
        }
    }
    best
}

/// `⌊t/2⌋` upper limit on `s`, and the point `⌈(k^t/(s!·λ))^{1/(t−s)}⌉` past which
/// `b_s ≥ C(k,s)` and none of the spectral bounds can help.
pub fn useless_threshold(k: u64, t: u64, lambda: u64, s: u64) -> Nat {
    assert!(s >= 1 && s < t);
    let s_fact: Nat = (1..=s).map(Nat::from).product();
    let target = crate::exactmath::ceil_div(&Nat::from(k).pow(t as u32), &(s_fact * lambda))
        .expect("positive divisor");
    // x^(t−s) ≥ k^t/(s!λ) ⟺ x^(t−s) ≥ ⌈k^t/(s!λ)⌉ for integer x
    crate::exactmath::ceil_root(&target, (t - s) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::default_sqrt_scale;
    use proptest::prelude::*;

    fn p(v: u64, k: u64, t: u64) -> Params {
        Params::new(v, k, t, 1).unwrap()
    }

    fn nat(n: u64) -> Nat {
        Nat::from(n)
    }

    fn ctx_l(v: u64, k: u64, t: u64, s: u64) -> SpectralContext {
        build_context(&p(v, k, t), s, schonheim).unwrap()
    }

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn context_inffam_m6() {
        let ctx = ctx_l(148, 32, 5, 2);
        assert_eq!(ctx.b, vec![nat(146), nat(30), nat(6)]);
        let a: Vec<BigInt> = [6, 24, 92].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(ctx.a, a);
        assert_eq!(ctx.d, BigInt::zero());
        assert!(ctx.flags.all_hold());
    }

    #[test]
    fn context_small_examples() {
        let ctx = ctx_l(19, 9, 3, 1);
        assert_eq!(ctx.b, vec![nat(7), nat(3)]);
        assert_eq!(ctx.a_s(), &BigInt::from(4));
        assert_eq!(ctx.d, BigInt::from(2));

        let ctx = ctx_l(44, 20, 3, 1);
        assert_eq!(ctx.b, vec![nat(7), nat(3)]);
        assert_eq!(ctx.a_s(), &BigInt::from(4));
        assert_eq!(ctx.d, BigInt::from(4));
        assert_eq!(ctx.d_prime, BigInt::from(23));
    }

    #[test]
    fn context_rejects_bad_shape() {
        assert!(matches!(
            build_context(&p(19, 9, 3), 2, schonheim),
            Err(Error::ContextInapplicable(_))
        ));
        assert!(build_context(&p(19, 9, 3), 0, schonheim).is_err());
        assert!(build_context(&p(9, 9, 3), 1, schonheim).is_err());
        assert!(build_context(&p(19, 3, 3), 1, schonheim).is_err());
    }

    #[test]
    fn cb_bound_examples() {
        let ctx = ctx_l(22, 10, 3, 1);
        assert_eq!(cb_bound(&ctx, &CBParams::exact(r(1, 1), r(0, 1))).unwrap(), nat(16));
        assert_eq!(cb_bound(&ctx, &CBParams::exact(r(1, 1), r(3, 10))).unwrap(), nat(17));
        assert_eq!(cb_bound(&ctx, &CBParams::exact(r(0, 1), r(0, 1))).unwrap(), nat(0));
        assert!(matches!(
            cb_bound(&ctx, &CBParams::exact(r(1, 2), r(1, 3))),
            Err(Error::CbInapplicable(_))
        ));
        let bad = CBParams { alpha: r(9, 10), beta: r(1, 10), beta_is_under_approx: true };
        assert!(cb_bound(&ctx, &bad).is_err());
    }

    #[test]
    fn theorem_main_examples() {
        assert_eq!(theorem_main(&ctx_l(19, 9, 3, 1)), Some(nat(16)));
        assert_eq!(theorem_main(&ctx_l(44, 20, 3, 1)), None);
        let ctx = ctx_l(148, 32, 5, 2);
        let l = schonheim(&p(148, 32, 5));
        let bound = theorem_main(&ctx).unwrap();
        assert!(bound >= l + 12u32 - 10u32);
        assert!(bound >= nat(3208));
    }

    #[test]
    fn theorem_dbig_examples() {
        let ctx = ctx_l(44, 20, 3, 1);
        let cb = dbig_params(&ctx).unwrap();
        assert_eq!(cb.alpha, r(1, 2));
        assert_eq!(cb.beta, r(5, 48));
        assert_eq!(theorem_dbig(&ctx), Some(nat(17)));
        assert_eq!(theorem_dbig(&ctx_l(19, 9, 3, 1)), None);
    }

    #[test]
    fn theorem_dbig_requires_positive_a_s() {
        let mut ctx = ctx_l(44, 20, 3, 1);
        ctx.a[1] = BigInt::zero();
        assert_eq!(theorem_dbig(&ctx), None);
    }

    #[test]
    fn theorem_smalld_examples() {
        let scale = default_sqrt_scale();
        // d = 0: case (a) is (1, 6/20)
        let ctx = ctx_l(22, 10, 3, 1);
        assert_eq!(ctx.d, BigInt::zero());
        assert_eq!(theorem_smalld(&ctx, &scale), Some((nat(17), SmallDCase::A)));

        let ctx = ctx_l(26, 12, 3, 1);
        let cases = smalld_params(&ctx, &scale);
        assert_eq!(cases.len(), 1);
        assert_eq!(cases[0].1.alpha, r(9, 10));
        assert_eq!(cases[0].1.beta, r(3, 14));
        assert_eq!(theorem_smalld(&ctx, &scale), Some((nat(17), SmallDCase::A)));

        let ctx = ctx_l(21, 10, 3, 1);
        assert_eq!(ctx.d, BigInt::from(3));
        let cases = smalld_params(&ctx, &scale);
        assert!(cases.iter().all(|(c, _)| *c == SmallDCase::A));
        assert_eq!(theorem_smalld(&ctx, &scale), Some((nat(15), SmallDCase::A)));
        assert_eq!(theorem_main(&ctx), Some(nat(16)));
    }

    #[test]
    fn useless_threshold_values() {
        // k^t / (s! λ) = 729, square root 27
        assert_eq!(useless_threshold(9, 3, 1, 1), nat(27));
        // 1000 / 1 → ⌈√1000⌉ = 32
        assert_eq!(useless_threshold(10, 3, 1, 1), nat(32));
    }

    fn sampled_contexts() -> impl Strategy<Value = SpectralContext> {
        (3u64..9, 1u64..30, 1u64..40, 1u64..3).prop_filter_map("shape", |(t, k_extra, v_extra, lambda)| {
            let k = t + k_extra;
            let v = k + v_extra;
            let params = Params::new(v, k, t, lambda).ok()?;
            let s = 1 + (v + k) % (t / 2);
            build_context(&params, s, schonheim).ok()
        })
    }

    fn iterated_step(ctx: &SpectralContext, start: Nat) -> Nat {
        (0..ctx.s).rev().fold(start, |x, i| {
            schonheim_step(ctx.params.v - i, ctx.params.k - i, &x)
        })
    }

    proptest! {
        #[test]
        fn chain_hypothesis_implies_nonneg_d(ctx in sampled_contexts()) {
            if ctx.flags.chain {
                prop_assert!(!ctx.d.is_negative());
            }
        }

        #[test]
        fn large_v_implies_nonneg_a(ctx in sampled_contexts()) {
            if ctx.flags.chain && ctx.params.v >= ctx.s * ctx.params.k {
                prop_assert!(ctx.flags.nonneg_a);
            }
        }

        #[test]
        fn hypotheses_imply_b_s_above_a_s(ctx in sampled_contexts()) {
            if ctx.flags.all_hold() {
                prop_assert!(int(ctx.b_s()) > *ctx.a_s());
            }
        }

        #[test]
        fn emitted_pairs_are_admissible(ctx in sampled_contexts()) {
            let scale = default_sqrt_scale();
            let mut pairs: Vec<CBParams> = smalld_params(&ctx, &scale).into_iter().map(|(_, c)| c).collect();
            pairs.extend(dbig_params(&ctx));
            for cb in pairs {
                prop_assert!(cb.beta.is_positive());
                prop_assert!(cb.alpha >= &cb.beta * rat(2));
            }
        }

        #[test]
        fn cb_inferior_when_beta_small(ctx in sampled_contexts()) {
            let scale = default_sqrt_scale();
            let mut pairs: Vec<CBParams> = smalld_params(&ctx, &scale).into_iter().map(|(_, c)| c).collect();
            pairs.extend(dbig_params(&ctx));
            let bk = rat(int(&ctx.binom_ks));
            for cb in pairs {
                if rat(int(ctx.b_s()) + 1) > &cb.beta * &bk {
                    let value = cb_bound(&ctx, &cb).unwrap();
                    prop_assert!(value <= iterated_step(&ctx, ctx.b_s() + 1u32));
                }
            }
        }

        #[test]
        fn main_at_least_iterated_step(ctx in sampled_contexts()) {
            if !ctx.flags.b_s_small {
                return Ok(());
            }
            if let Some(value) = theorem_main(&ctx) {
                prop_assert!(value >= iterated_step(&ctx, ctx.b_s().clone()));
            }
        }

        #[test]
        fn cb_nondecreasing_in_beta(ctx in sampled_contexts(), num in 0i64..50, eps in 1i64..50) {
            if ctx.flags.b_s_small {
                let beta = r(num, 100);
                let bumped = &beta + r(eps, 1000);
                if bumped <= r(1, 2) {
                    let lo = cb_bound(&ctx, &CBParams::exact(rat(1), beta)).unwrap();
                    let hi = cb_bound(&ctx, &CBParams::exact(rat(1), bumped)).unwrap();
                    prop_assert!(lo <= hi);
                }
            }
        }
    }
}
