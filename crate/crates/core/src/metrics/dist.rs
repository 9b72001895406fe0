//! Tail probabilities of the reference distributions.

use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, Normal, StudentsT};

/// P(X >= x) for a chi-square variable with `df` degrees of freedom.
pub fn chi_square_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    ChiSquared::new(df).expect("df > 0").sf(x).clamp(0.0, 1.0)
}

/// P(F >= f) for an F variable with (`d1`, `d2`) degrees of freedom.
pub fn f_sf(f: f64, d1: f64, d2: f64) -> f64 {
    if f <= 0.0 {
        return 1.0;
    }
    if f.is_infinite() {
        return 0.0;
    }
    FisherSnedecor::new(d1, d2).expect("df > 0").sf(f).clamp(0.0, 1.0)
}

/// Two-sided P(|T| >= |t|) for Student's t with `df` degrees of freedom.
pub fn t_two_sided(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
}

/// Two-sided P(|Z| >= |z|) for a standard normal.
pub fn normal_two_sided(z: f64) -> f64 {
    let dist = Normal::new(0.0, 1.0).expect("unit normal");
    (2.0 * dist.sf(z.abs())).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 5e-4;

    /// Composite Simpson integration of the chi-square density, independent of statrs.
    fn chi_square_sf_quadrature(x: f64, df: f64) -> f64 {
        fn ln_gamma(z: f64) -> f64 {
            // Lanczos, g = 7
            const C: [f64; 9] = [
                0.999_999_999_999_809_9,
                676.520_368_121_885_1,
                -1_259.139_216_722_402_8,
                771.323_428_777_653_1,
                -176.615_029_162_140_6,
                12.507_343_278_686_905,
                -0.138_571_095_265_720_12,
                9.984_369_578_019_572e-6,
                1.505_632_735_149_311_6e-7,
            ];
            let z = z - 1.0;
            let mut a = C[0];
            let t = z + 7.5;
            for (i, c) in C.iter().enumerate().skip(1) {
                a += c / (z + i as f64);
            }
            0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + a.ln()
        }
        let k = df / 2.0;
        let pdf = |u: f64| {
            if u <= 0.0 {
                return if df == 2.0 { 0.5 } else { 0.0 };
            }
            ((k - 1.0) * u.ln() - u / 2.0 - k * 2f64.ln() - ln_gamma(k)).exp()
        };
        let upper = x + 200.0;
        let n = 200_000;
        let h = (upper - x) / n as f64;
        let mut s = pdf(x) + pdf(upper);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * pdf(x + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn chi_square_against_quadrature() {
        for (x, df) in [(6.0, 2.0), (3.0, 1.5), (10.0, 4.0), (1.0, 3.0)] {
            let q = chi_square_sf_quadrature(x, df);
            assert!((chi_square_sf(x, df) - q).abs() < 1e-6, "x={x} df={df}: {} vs {q}", chi_square_sf(x, df));
        }
        assert!((chi_square_sf(6.0, 2.0) - 0.0498).abs() < 5e-4);
    }

    #[test]
    fn chi_square_table() {
        for (x, df, p) in
            [(3.841, 1.0, 0.05), (5.991, 2.0, 0.05), (7.815, 3.0, 0.05), (9.488, 4.0, 0.05), (11.345, 3.0, 0.01)]
        {
            assert!((chi_square_sf(x, df) - p).abs() < TOL, "chi2({x}, {df})");
        }
    }

    #[test]
    fn t_table() {
        for (t, df, p) in [(2.228, 10.0, 0.05), (2.571, 5.0, 0.05), (2.845, 20.0, 0.01), (12.706, 1.0, 0.05)] {
            assert!((t_two_sided(t, df) - p).abs() < TOL, "t({t}, {df})");
            assert!((t_two_sided(-t, df) - p).abs() < TOL);
        }
    }

    #[test]
    fn f_table() {
        assert!((f_sf(4.103, 2.0, 10.0) - 0.05).abs() < TOL);
        assert!((f_sf(3.098, 3.0, 20.0) - 0.05).abs() < TOL);
        assert_eq!(f_sf(0.0, 2.0, 10.0), 1.0);
    }

    #[test]
    fn normal_table() {
        assert!((normal_two_sided(1.96) - 0.05).abs() < TOL);
        assert!((normal_two_sided(2.576) - 0.01).abs() < TOL);
    }
}
