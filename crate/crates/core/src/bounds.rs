//! Chain factors, telescoping identities, closed-form bounds, and the
//! normalized sequences.
//!
//! Each family satisfies E(N) ≥ R(N)·E(N−1) with an exact rational factor
//! R(N); iterating down to the base case (N = 2, or 3 for the fixed-grain
//! family) telescopes into `P(N)/P(base)` with P the family's cubic, which
//! is how the closed-form lower-bound coefficients ¼N³(1−1/N) and
//! ⅙N³(1−1/N)(1−2/N) arise.  Coefficients are kept as exact rationals and
//! only become floating point when multiplied by a seed energy.

use crate::estimate::{BoundKind, EnergyEstimate};
use crate::system::SystemKind;
use num::{BigInt, BigRational, One, ToPrimitive};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("an upper-bound seed cannot produce a lower bound")]
    UpperSeedRejected,
    #[error("seed energy must be negative, got {0}")]
    SeedNotNegative(f64),
    #[error("{kind:?} chain is defined for N > {base}, got {n}")]
    AtOrBelowBase { kind: SystemKind, base: u32, n: u32 },
    #[error("N = {n} is outside the validity of the bound ({reason})")]
    OutsideRange { n: u32, reason: String },
    #[error("estimates must be indexed by consecutive N, found {found} after {prev}")]
    NonConsecutive { prev: u32, found: u32 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// P_Coul(N) = N²(N−1).
pub fn p_coul(n: u32) -> i128 {
    let n = i128::from(n);
    n * n * (n - 1)
}

/// P_Newt(N) = N(N−1)(N−2).
pub fn p_newt(n: u32) -> i128 {
    let n = i128::from(n);
    n * (n - 1) * (n - 2)
}

/// The cubic that normalizes a family's energies: the Coulomb polynomial
/// also serves the translation-invariant Newton family.
pub fn family_polynomial(kind: SystemKind, n: u32) -> i128 {
    match kind {
        SystemKind::CoulombAtom | SystemKind::NewtonIntrinsic => p_coul(n),
        SystemKind::NewtonFixedGrain => p_newt(n),
    }
}

/// Base particle count of the chain: the N at which the telescoped bound is
/// sharp.
pub fn base_n(kind: SystemKind) -> u32 {
    match kind {
        SystemKind::CoulombAtom | SystemKind::NewtonIntrinsic => 2,
        SystemKind::NewtonFixedGrain => 3,
    }
}

fn ratio(num: i128, den: i128) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// The factor R(N) in E(N) ≥ R(N)·E(N−1): N²/((N−1)(N−2)) for the Coulomb
/// and intrinsic chains (N > 2), N/(N−3) for the fixed-grain chain (N > 3).
pub fn chain_factor(kind: SystemKind, n: u32) -> Result<BigRational, BoundsError> {
    match kind {
        SystemKind::CoulombAtom | SystemKind::NewtonIntrinsic => {
            if n <= 2 {
                return Err(BoundsError::AtOrBelowBase { kind, base: 2, n });
            }
            let m = i128::from(n);
            Ok(ratio(m * m, (m - 1) * (m - 2)))
        }
        SystemKind::NewtonFixedGrain => {
            if n <= 3 {
                return Err(BoundsError::AtOrBelowBase { kind, base: 3, n });
            }
            let m = i128::from(n);
            Ok(ratio(m, m - 3))
        }
    }
}

/// Product of the chain factors from base+1 up to N, in exact rational
/// arithmetic.  Equals P(N)/P(base).
pub fn telescope(kind: SystemKind, n: u32) -> Result<BigRational, BoundsError> {
    let base = base_n(kind);
    if n <= base {
        return Err(BoundsError::AtOrBelowBase { kind, base, n });
    }
    let mut product = BigRational::one();
    for k in (base + 1)..=n {
        product *= chain_factor(kind, k)?;
    }
    Ok(product)
}

/// Telescoped coefficient including the sharp base case (1 at N = base).
fn chain_coefficient(kind: SystemKind, n: u32) -> Result<BigRational, BoundsError> {
    let base = base_n(kind);
    if n == base {
        Ok(BigRational::one())
    } else {
        telescope(kind, n)
    }
}

fn check_lower_seed(seed: &EnergyEstimate) -> Result<(), BoundsError> {
    if seed.kind == BoundKind::Upper {
        return Err(BoundsError::UpperSeedRejected);
    }
    if !(seed.value < 0.0) {
        return Err(BoundsError::SeedNotNegative(seed.value));
    }
    Ok(())
}

/// Lower bound on E(N) from a base-case seed via the telescoped chain:
/// seed·¼N³(1−1/N) for the Coulomb/intrinsic families, seed·⅙N³(1−1/N)(1−2/N)
/// for the fixed-grain family.  Sharp at the base N.
pub fn corollary_lower_bound(
    kind: SystemKind,
    n: u32,
    seed: &EnergyEstimate,
) -> Result<EnergyEstimate, BoundsError> {
    check_lower_seed(seed)?;
    let base = base_n(kind);
    if n < base {
        return Err(BoundsError::OutsideRange {
            n,
            reason: format!("chain base is {base}"),
        });
    }
    let coefficient = chain_coefficient(kind, n)?
        .to_f64()
        .expect("chain coefficient fits in f64");
    Ok(EnergyEstimate::new(
        coefficient * seed.value,
        BoundKind::Lower,
        "chain_lower",
        &seed.system,
        n,
    ))
}

/// The weaker classical lower bound E2·½N³(1−1/N)², sharp at N = 2.
pub fn levy_leblond_bound(n: u32, e2: &EnergyEstimate) -> Result<EnergyEstimate, BoundsError> {
    check_lower_seed(e2)?;
    if n < 2 {
        return Err(BoundsError::OutsideRange {
            n,
            reason: "defined for N >= 2".into(),
        });
    }
    // ½N³(1−1/N)² = N(N−1)²/2 exactly.
    let m = i128::from(n);
    let coefficient = ratio(m * (m - 1) * (m - 1), 2)
        .to_f64()
        .expect("coefficient fits in f64");
    Ok(EnergyEstimate::new(
        coefficient * e2.value,
        BoundKind::Lower,
        "levy_leblond",
        &e2.system,
        n,
    ))
}

/// The Coulomb-family lower bound −const·N³(1+N^{−4/3}); the constant is
/// user-supplied (default 1 in the harness), never fabricated.
pub fn lieb_bound(n: u32, constant: f64) -> Result<EnergyEstimate, BoundsError> {
    if !(constant > 0.0) {
        return Err(BoundsError::InvalidParameter(format!(
            "Lieb constant must be positive, got {constant}"
        )));
    }
    if n < 1 {
        return Err(BoundsError::OutsideRange {
            n,
            reason: "defined for N >= 1".into(),
        });
    }
    let nf = f64::from(n);
    let value = -constant * nf.powi(3) * (1.0 + nf.powf(-4.0 / 3.0));
    Ok(EnergyEstimate::new(
        value,
        BoundKind::Lower,
        "lieb",
        "coulomb_atom",
        n,
    ))
}

/// The mirror-symmetric upper bound −B·N³(1−1/N) for the translation-
/// invariant star; B is user-supplied (default 1 in the harness).
pub fn hall_upper_bound(n: u32, b: f64) -> Result<EnergyEstimate, BoundsError> {
    if !(b > 0.0) {
        return Err(BoundsError::InvalidParameter(format!(
            "Hall constant must be positive, got {b}"
        )));
    }
    if n < 2 {
        return Err(BoundsError::OutsideRange {
            n,
            reason: "defined for N >= 2".into(),
        });
    }
    let m = i128::from(n);
    let coefficient = (m * m * (m - 1)) as f64;
    Ok(EnergyEstimate::new(
        -b * coefficient,
        BoundKind::Upper,
        "hall",
        "newton_intrinsic",
        n,
    ))
}

/// Crossover N* beyond which the −const·N³(1+N^{−4/3}) bound beats the
/// telescoped seed·¼N³(1−1/N) bound (i.e. is the larger lower bound), if it
/// exists for this constant.  Root-found by bisection on the normalized
/// difference.
pub fn lieb_crossover(seed_e2: f64, constant: f64) -> Option<f64> {
    if !(seed_e2 < 0.0) || !(constant > 0.0) {
        return None;
    }
    // g(N) = lieb/N³ − chain/N³; g > 0 where Lieb beats.
    let g = |nf: f64| -constant * (1.0 + nf.powf(-4.0 / 3.0)) - 0.25 * seed_e2 * (1.0 - 1.0 / nf);
    let (mut lo, mut hi) = (2.0f64, 1e12f64);
    if g(lo) >= 0.0 {
        // Lieb already beats (or ties) the chain bound at the base.
        return Some(lo);
    }
    if g(hi) <= 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Normalize a consecutive-N run of estimates by the family polynomial; the
/// pair-rescaled variant is normalized per particle (the mass-per-quark
/// sequence of the baryon model).
pub fn normalized_sequence(
    kind: SystemKind,
    pair_rescale: bool,
    estimates: &[EnergyEstimate],
) -> Result<Vec<(u32, f64)>, BoundsError> {
    let mut out = Vec::with_capacity(estimates.len());
    for (i, e) in estimates.iter().enumerate() {
        if i > 0 {
            let prev = estimates[i - 1].n;
            if e.n != prev + 1 {
                return Err(BoundsError::NonConsecutive { prev, found: e.n });
            }
        }
        let divisor = if pair_rescale {
            i128::from(e.n)
        } else {
            family_polynomial(kind, e.n)
        };
        if divisor == 0 {
            return Err(BoundsError::OutsideRange {
                n: e.n,
                reason: "family polynomial vanishes".into(),
            });
        }
        out.push((e.n, e.value / divisor as f64));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn seed(value: f64, kind: BoundKind) -> EnergyEstimate {
        EnergyEstimate::new(value, kind, "seed", "test", 2)
    }

    #[test]
    fn polynomial_anchors() {
        assert_eq!(p_coul(2), 4);
        assert_eq!(p_newt(3), 6);
        for n in 2..=50 {
            assert!(p_coul(n) > 0);
        }
        for n in 3..=50 {
            assert!(p_newt(n) > 0);
        }
    }

    #[test]
    fn chain_factor_values_and_validity() {
        assert_eq!(
            chain_factor(SystemKind::CoulombAtom, 3).unwrap(),
            ratio(9, 2)
        );
        assert_eq!(
            chain_factor(SystemKind::NewtonFixedGrain, 4).unwrap(),
            ratio(4, 1)
        );
        assert_eq!(
            chain_factor(SystemKind::NewtonIntrinsic, 3).unwrap(),
            ratio(9, 2)
        );
        assert!(chain_factor(SystemKind::CoulombAtom, 2).is_err());
        assert!(chain_factor(SystemKind::NewtonFixedGrain, 3).is_err());
    }

    #[test]
    fn telescope_examples() {
        // (9/2)(16/6)(25/12) = 25
        assert_eq!(telescope(SystemKind::CoulombAtom, 5).unwrap(), ratio(25, 1));
        // (4/1)(5/2)(6/3) = 20
        assert_eq!(
            telescope(SystemKind::NewtonFixedGrain, 6).unwrap(),
            ratio(20, 1)
        );
        assert_eq!(
            telescope(SystemKind::NewtonIntrinsic, 3).unwrap(),
            ratio(9, 2)
        );
    }

    /// telescope(N)·P(base) = P(N) exactly, for every family through N = 50.
    #[test]
    fn telescoping_reproduces_polynomials_exactly() {
        for kind in [
            SystemKind::CoulombAtom,
            SystemKind::NewtonFixedGrain,
            SystemKind::NewtonIntrinsic,
        ] {
            let base = base_n(kind);
            for n in (base + 1)..=50 {
                let expected = ratio(family_polynomial(kind, n), family_polynomial(kind, base));
                assert_eq!(telescope(kind, n).unwrap(), expected, "{kind:?} N={n}");
            }
        }
    }

    #[test]
    fn corollary_is_sharp_at_base() {
        let s = seed(-2.9, BoundKind::Estimate);
        let b = corollary_lower_bound(SystemKind::CoulombAtom, 2, &s).unwrap();
        assert_eq!(b.value, -2.9);
        assert_eq!(b.kind, BoundKind::Lower);

        let s3 = EnergyEstimate::new(-5.0, BoundKind::Lower, "seed", "grain", 3);
        let b3 = corollary_lower_bound(SystemKind::NewtonFixedGrain, 3, &s3).unwrap();
        assert_eq!(b3.value, -5.0);
    }

    #[test]
    fn intrinsic_corollary_forced_arithmetic() {
        // Seed −1/4 at N = 4: −1/4 · ¼·64·(3/4) = −3.
        let s = seed(-0.25, BoundKind::Exact);
        let b = corollary_lower_bound(SystemKind::NewtonIntrinsic, 4, &s).unwrap();
        assert_relative_eq!(b.value, -3.0, max_relative = 1e-14);
    }

    #[test]
    fn corollary_rejects_bad_seeds() {
        assert_eq!(
            corollary_lower_bound(SystemKind::CoulombAtom, 3, &seed(-1.0, BoundKind::Upper)),
            Err(BoundsError::UpperSeedRejected)
        );
        assert_eq!(
            corollary_lower_bound(SystemKind::CoulombAtom, 3, &seed(1.0, BoundKind::Exact)),
            Err(BoundsError::SeedNotNegative(1.0))
        );
    }

    #[test]
    fn levy_leblond_values() {
        let e2 = seed(-0.25, BoundKind::Exact);
        // Sharp at N = 2: ½·8·(1/4) = 1.
        assert_eq!(levy_leblond_bound(2, &e2).unwrap().value, -0.25);
        // N = 4: −1/4 · ½·64·(9/16) = −4.5.
        assert_relative_eq!(levy_leblond_bound(4, &e2).unwrap().value, -4.5);
    }

    #[test]
    fn levy_leblond_weaker_than_chain_for_n_ge_3() {
        let e2 = seed(-0.25, BoundKind::Exact);
        for n in 3..=40 {
            let chain = corollary_lower_bound(SystemKind::NewtonIntrinsic, n, &e2).unwrap();
            let levy = levy_leblond_bound(n, &e2).unwrap();
            assert!(
                levy.value < chain.value,
                "N={n}: levy {} chain {}",
                levy.value,
                chain.value
            );
        }
    }

    #[test]
    fn lieb_values() {
        assert_relative_eq!(lieb_bound(1, 3.0).unwrap().value, -6.0);
        // 8^{−4/3} = 1/16: −512·(1+1/16) = −544.
        assert_relative_eq!(
            lieb_bound(8, 1.0).unwrap().value,
            -544.0,
            max_relative = 1e-12
        );
        assert!(lieb_bound(3, 0.0).is_err());
    }

    #[test]
    fn lieb_crossover_matches_sharp_constant() {
        // At const = −E2/(8+2^{5/3}) the two bounds tie exactly at N = 2 and
        // the power-law bound beats the chain bound for all larger N.
        let e2 = -4.0;
        let c_sharp = -e2 / (8.0 + 2.0f64.powf(5.0 / 3.0));
        let crossover = lieb_crossover(e2, c_sharp).unwrap();
        assert_relative_eq!(crossover, 2.0, max_relative = 1e-6);

        // A larger constant pushes the crossover out; a huge one kills it.
        let later = lieb_crossover(e2, 0.99 * (-e2 / 4.0)).unwrap();
        assert!(later > 2.0);
        assert!(lieb_crossover(e2, 1.01 * (-e2 / 4.0)).is_none());
    }

    #[test]
    fn hall_values() {
        let b = hall_upper_bound(2, 1.0).unwrap();
        assert_eq!(b.value, -4.0);
        assert_eq!(b.kind, BoundKind::Upper);
        assert!(hall_upper_bound(2, -1.0).is_err());
    }

    #[test]
    fn normalized_sequences() {
        let estimates: Vec<EnergyEstimate> = (2..=5)
            .map(|n| EnergyEstimate::new(-(f64::from(n)), BoundKind::Estimate, "m", "s", n))
            .collect();
        let seq = normalized_sequence(SystemKind::CoulombAtom, false, &estimates).unwrap();
        assert_relative_eq!(seq[0].1, -2.0 / 4.0);
        // Intrinsic N=2 with the exact seed −1/4 normalizes to −1/16.
        let intr = [EnergyEstimate::new(-0.25, BoundKind::Exact, "m", "s", 2)];
        let seq = normalized_sequence(SystemKind::NewtonIntrinsic, false, &intr).unwrap();
        assert_relative_eq!(seq[0].1, -0.0625);
        // Per-particle normalization for the rescaled variant.
        let seq = normalized_sequence(SystemKind::CoulombAtom, true, &estimates).unwrap();
        assert_relative_eq!(seq[1].1, -1.0);

        let gap = [
            EnergyEstimate::new(-1.0, BoundKind::Estimate, "m", "s", 2),
            EnergyEstimate::new(-2.0, BoundKind::Estimate, "m", "s", 4),
        ];
        assert!(matches!(
            normalized_sequence(SystemKind::CoulombAtom, false, &gap),
            Err(BoundsError::NonConsecutive { prev: 2, found: 4 })
        ));
        let bad = [EnergyEstimate::new(-1.0, BoundKind::Estimate, "m", "s", 2)];
        assert!(normalized_sequence(SystemKind::NewtonFixedGrain, false, &bad).is_err());
    }
}
