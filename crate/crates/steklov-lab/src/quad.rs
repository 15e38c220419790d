//! Gauss-Legendre rules and a small adaptive integrator.
//!
//! Boundary integrals of smooth-per-edge kernels use the fixed 8-point rule;
//! quasi-norm integrals over step intervals use the 16-point rule. Integrands
//! with an integrable endpoint singularity are handled by geometric
//! subdivision toward the singular endpoint.

/// 8-point Gauss-Legendre abscissae on [-1, 1].
pub const GL8_X: [f64; 8] = [
    -0.960_289_856_497_536_2,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_2,
];

/// 8-point Gauss-Legendre weights.
pub const GL8_W: [f64; 8] = [
    0.101_228_536_290_376_26,
    0.222_381_034_453_374_47,
    0.313_706_645_877_887_29,
    0.362_683_783_378_361_98,
    0.362_683_783_378_361_98,
    0.313_706_645_877_887_29,
    0.222_381_034_453_374_47,
    0.101_228_536_290_376_26,
];

/// 16-point Gauss-Legendre abscissae on [-1, 1].
pub const GL16_X: [f64; 16] = [
    -0.989_400_934_991_649_9,
    -0.944_575_023_073_232_6,
    -0.865_631_202_387_831_7,
    -0.755_404_408_355_003_0,
    -0.617_876_244_402_643_7,
    -0.458_016_777_657_227_4,
    -0.281_603_550_779_258_9,
    -0.095_012_509_837_637_44,
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_7,
    0.755_404_408_355_003_0,
    0.865_631_202_387_831_7,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];

/// 16-point Gauss-Legendre weights.
pub const GL16_W: [f64; 16] = [
    0.027_152_459_411_754_1,
    0.062_253_523_938_647_89,
    0.095_158_511_682_492_78,
    0.124_628_971_255_533_87,
    0.149_595_988_816_576_73,
    0.169_156_519_395_002_53,
    0.182_603_415_044_923_59,
    0.189_450_610_455_068_5,
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_59,
    0.169_156_519_395_002_53,
    0.149_595_988_816_576_73,
    0.124_628_971_255_533_87,
    0.095_158_511_682_492_78,
    0.062_253_523_938_647_89,
    0.027_152_459_411_754_1,
];

/// Single-panel 8-point rule on [a, b].
pub fn gl8<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in GL8_X.iter().zip(GL8_W.iter()) {
        s += w * f(mid + half * x);
    }
    s * half
}

/// Single-panel 16-point rule on [a, b].
pub fn gl16<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = 0.0;
    for (x, w) in GL16_X.iter().zip(GL16_W.iter()) {
        s += w * f(mid + half * x);
    }
    s * half
}

/// Adaptive bisection quadrature on [a, b] for integrands that are smooth in
/// the interior. Compares GL16 against two GL16 half-panels.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = gl16(f, a, m);
        let right = gl16(f, m, b);
        let diff = left + right - whole;
        if diff.abs() <= tol * (1.0 + (left + right).abs()) || depth >= 48 {
            left + right
        } else {
            rec(f, a, m, left, tol, depth + 1) + rec(f, m, b, right, tol, depth + 1)
        }
    }
    let whole = gl16(f, a, b);
    rec(f, a, b, whole, rel_tol.max(1e-15), 0)
}

/// Integral over (0, b] of an integrand with an integrable singularity at 0:
/// geometric subdivision with ratio 2 toward the origin, stopping once the
/// partial-sum increment is below `rel_tol` relative, or after `max_halvings`.
pub fn integrate_to_zero<F: Fn(f64) -> f64>(
    f: &F,
    b: f64,
    rel_tol: f64,
    max_halvings: usize,
) -> f64 {
    let mut total = 0.0;
    let mut hi = b;
    for _ in 0..max_halvings {
        let lo = 0.5 * hi;
        let piece = gl16(f, lo, hi);
        total += piece;
        if piece.abs() <= rel_tol * (1.0 + total.abs()) {
            break;
        }
        hi = lo;
    }
    total
}

/// Degree-5 symmetric quadrature on the reference triangle, as
/// (barycentric coordinates, weight); weights sum to 1.
pub const TRI7: [([f64; 3], f64); 7] = [
    ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
    (
        [
            0.059_715_871_789_769_82,
            0.470_142_064_105_115_1,
            0.470_142_064_105_115_1,
        ],
        0.132_394_152_788_506_2,
    ),
    (
        [
            0.470_142_064_105_115_1,
            0.059_715_871_789_769_82,
            0.470_142_064_105_115_1,
        ],
        0.132_394_152_788_506_2,
    ),
    (
        [
            0.470_142_064_105_115_1,
            0.470_142_064_105_115_1,
            0.059_715_871_789_769_82,
        ],
        0.132_394_152_788_506_2,
    ),
    (
        [
            0.797_426_985_353_087_4,
            0.101_286_507_323_456_34,
            0.101_286_507_323_456_34,
        ],
        0.125_939_180_544_827_2,
    ),
    (
        [
            0.101_286_507_323_456_34,
            0.797_426_985_353_087_4,
            0.101_286_507_323_456_34,
        ],
        0.125_939_180_544_827_2,
    ),
    (
        [
            0.101_286_507_323_456_34,
            0.101_286_507_323_456_34,
            0.797_426_985_353_087_4,
        ],
        0.125_939_180_544_827_2,
    ),
];

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl8_exact_on_degree_15() {
        // x^14 on [0, 1]
        let v = gl8(&|x: f64| x.powi(14), 0.0, 1.0);
        assert_relative_eq!(v, 1.0 / 15.0, max_relative = 1e-14);
    }

    #[test]
    fn adaptive_handles_peaked_integrand() {
        let v = adaptive(&|x: f64| (-(x * x) * 400.0).exp(), -1.0, 1.0, 1e-12);
        let exact = (std::f64::consts::PI / 400.0).sqrt(); // erf(20) == 1 to double precision
        assert_relative_eq!(v, exact, max_relative = 1e-10);
    }

    #[test]
    fn geometric_refinement_integrates_inverse_sqrt() {
        let v = integrate_to_zero(&|x: f64| x.powf(-0.5), 1.0, 1e-14, 2000);
        assert_relative_eq!(v, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn tri7_weights_sum_to_one() {
        let s: f64 = TRI7.iter().map(|(_, w)| w).sum();
        assert_relative_eq!(s, 1.0, max_relative = 1e-15);
    }
}
