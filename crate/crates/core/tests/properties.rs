//! Property-based checks of invariants that must hold across whole parameter
//! ranges, not just at the pinned regression values: constant solutions are
//! exact equilibria, turning points honestly bracket the well bottom and
//! reproduce their energy level, periods stay above the small-oscillation
//! limit, and factor transformations commute with evaluation.

use proptest::prelude::*;

use pseudocyl::derdzinski::DerdzinskiSystem;
use pseudocyl::fowler::FowlerSystem;
use pseudocyl::orbit::{period_quadrature, turning_points, OneDofSystem};
use pseudocyl::periodic::PeriodicScalar;

proptest! {
    /// The constant solution of the cylinder equation balances the two
    /// nonlinear terms exactly, for every admissible dimension.
    #[test]
    fn fowler_constant_solution_is_an_equilibrium(n in 3u32..=9) {
        let sys = FowlerSystem::new(n).unwrap();
        let u_bar = sys.constant_solution();
        prop_assert!(u_bar > 0.0);
        prop_assert!(sys.residual(u_bar, 0.0).abs() <= 1e-12);
        // The equilibrium sits at the bottom of the potential well.
        prop_assert!(sys.accel(u_bar).abs() <= 1e-12);
    }

    /// Same equilibrium property for the warp equation over its full
    /// three-parameter family, plus the parameter-free linearized period.
    #[test]
    fn derdzinski_constant_solution_is_an_equilibrium(
        m in 3u32..=8,
        fiber_scalar in 0.5f64..20.0,
        stiffness in 0.5f64..10.0,
    ) {
        let sys = DerdzinskiSystem::new(m, fiber_scalar, stiffness).unwrap();
        let h0 = sys.constant_solution();
        prop_assert!(h0 > 0.0);
        let scale = h0.max(1.0);
        prop_assert!(sys.residual(h0, 0.0).abs() <= 1e-12 * scale);
        let expected = 2.0 * std::f64::consts::PI / stiffness.sqrt();
        prop_assert!((sys.critical_period() - expected).abs() <= 1e-12 * expected);
    }

    /// Turning points straddle the well bottom and lie exactly on the energy
    /// level that defined them.
    #[test]
    fn turning_points_bracket_the_center_and_match_the_energy(
        n in 3u32..=6,
        offset in 0.02f64..0.95,
    ) {
        let sys = FowlerSystem::new(n).unwrap();
        let energy = sys.energy_at_offset(offset).unwrap();
        let (lo, hi) = turning_points(&sys, energy).unwrap();
        let center = sys.center();
        prop_assert!(lo < center && center < hi, "({lo}, {hi}) vs center {center}");
        let scale = energy.abs().max(1e-3);
        prop_assert!((sys.potential(lo) - energy).abs() <= 1e-9 * scale);
        prop_assert!((sys.potential(hi) - energy).abs() <= 1e-9 * scale);
    }
}

proptest! {
    // Quadrature-backed checks are costlier per case; a smaller batch still
    // sweeps the window thoroughly.
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Closed-orbit periods never fall below the small-oscillation limit —
    /// the bifurcation-threshold inequality, sampled across the window.
    #[test]
    fn periods_stay_above_the_small_oscillation_limit(
        n in 3u32..=6,
        offset in 0.01f64..0.9,
    ) {
        let sys = FowlerSystem::new(n).unwrap();
        let energy = sys.energy_at_offset(offset).unwrap();
        let period = period_quadrature(&sys, energy).unwrap();
        prop_assert!(
            period > sys.small_oscillation_period(),
            "T = {period} at offset {offset} vs limit {}",
            sys.small_oscillation_period()
        );
    }

    /// Raising a factor to a power then to the reciprocal power is the
    /// identity on values, and single powers match plain exponentiation.
    #[test]
    fn factor_powers_compose_and_invert(
        period in 1.0f64..10.0,
        base in 0.8f64..3.0,
        ratio in 0.05f64..0.7,
        exponent in 0.4f64..2.5,
        phase in 0.0f64..1.0,
    ) {
        let f = PeriodicScalar::offset_sine(period, base, base * ratio).unwrap();
        let powered = f.powered(exponent).unwrap();
        let round = powered.powered(1.0 / exponent).unwrap();
        let t = phase * period;
        let direct = f.value(t);
        prop_assert!((powered.value(t) - direct.powf(exponent)).abs() <= 1e-10 * direct.powf(exponent));
        prop_assert!((round.value(t) - direct).abs() <= 1e-9 * direct);
    }
}
