use num_bigint::BigUint;

use super::GraphError;

/// The two closed-form growth quantities for marked graphs of rank `g`
/// with `p` marks, `(6g+2p)! / (g! (2g+p)!)` for labeled and the same
/// divided by `p!` for unlabeled marks. These give the order of growth up
/// to exponential factors, not exact counts.
#[derive(Clone, Debug, PartialEq)]
pub struct Cardinality {
    pub g: usize,
    pub p: usize,
    pub labeled: BigUint,
    pub unlabeled: BigUint,
    pub log2_labeled: f64,
    pub log2_unlabeled: f64,
}

fn factorial(n: usize) -> BigUint {
    (2..=n as u64).fold(BigUint::from(1u32), |acc, k| acc * k)
}

/// Base-2 logarithm accurate to f64 precision for arbitrarily large values.
pub(crate) fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64_digits().first().copied().unwrap_or(0) as f64).log2();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_u64_digits()[0];
    (top as f64).log2() + shift as f64
}

pub fn cardinality_formulas(g: usize, p: usize) -> Result<Cardinality, GraphError> {
    if 2 * g + p <= 2 {
        return Err(GraphError::Params(format!("2g - 2 + p must be positive (g={g}, p={p})")));
    }
    let labeled = factorial(6 * g + 2 * p) / (factorial(g) * factorial(2 * g + p));
    let unlabeled = &labeled / factorial(p);
    Ok(Cardinality {
        g,
        p,
        log2_labeled: log2_big(&labeled),
        log2_unlabeled: log2_big(&unlabeled),
        labeled,
        unlabeled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures() {
        assert_eq!(cardinality_formulas(1, 1).unwrap().labeled, BigUint::from(6720u32));
        assert_eq!(cardinality_formulas(0, 3).unwrap().labeled, BigUint::from(120u32));
        assert_eq!(cardinality_formulas(0, 3).unwrap().unlabeled, BigUint::from(20u32));
        assert!(cardinality_formulas(1, 0).is_err());
    }

    #[test]
    fn division_is_exact() {
        for g in 0..12 {
            for p in 0..12 {
                let Ok(c) = cardinality_formulas(g, p) else { continue };
                assert_eq!(&c.unlabeled * factorial(p) * factorial(g) * factorial(2 * g + p), factorial(6 * g + 2 * p));
            }
        }
    }

    #[test]
    fn logs() {
        let c = cardinality_formulas(1, 1).unwrap();
        assert!((c.log2_labeled - 6720f64.log2()).abs() < 1e-12);
        let big = BigUint::from(3u32).pow(500);
        assert!((log2_big(&big) - 500.0 * 3f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn growth_is_n_log_n() {
        // log2 of the labeled quantity divided by (g+p) log2(g+p) settles
        // to a constant along g = p = 2^k.
        let ratios: Vec<f64> = (2..9)
            .map(|k| {
                let n = 1usize << k;
                let c = cardinality_formulas(n, n).unwrap();
                c.log2_labeled / ((2 * n) as f64 * ((2 * n) as f64).log2())
            })
            .collect();
        for w in ratios.windows(2) {
            assert!((w[1] - w[0]).abs() < 0.5, "{ratios:?}");
        }
        assert!(ratios.iter().all(|&r| r > 1.0 && r < 6.0), "{ratios:?}");
    }
}
