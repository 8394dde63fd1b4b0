use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest degree accepted by [`hermite`].
pub const MAX_DEGREE: u32 = 60;

/// Physicists' Hermite polynomial by the three-term recurrence.
pub fn hermite<R: Real>(n: u32, x: &R) -> Result<R> {
    if n > MAX_DEGREE {
        return Err(Error::DegreeOutOfRange {
            degree: n,
            max: MAX_DEGREE,
        });
    }
    Ok(hermite_unchecked(n, x))
}

pub(crate) fn hermite_unchecked<R: Real>(n: u32, x: &R) -> R {
    let mut prev = R::one();
    if n == 0 {
        return prev;
    }
    let two_x = x.clone() * 2.0;
    let mut cur = two_x.clone();
    for k in 1..n {
        let next = two_x.clone() * cur.clone() - prev * (2.0 * k as f64);
        prev = cur;
        cur = next;
    }
    cur
}

/// `(H_n, H_n', H_n'')` at `x`, using `H_n' = 2n H_{n-1}`.
pub(crate) fn hermite_with_derivs<R: Real>(n: u32, x: &R) -> (R, R, R) {
    let h = hermite_unchecked(n, x);
    let d1 = if n >= 1 {
        hermite_unchecked(n - 1, x) * (2.0 * n as f64)
    } else {
        R::zero()
    };
    let d2 = if n >= 2 {
        hermite_unchecked(n - 2, x) * (4.0 * (n * (n - 1)) as f64)
    } else {
        R::zero()
    };
    (h, d1, d2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degrees() {
        assert_eq!(hermite(0, &3.7).unwrap(), 1.0);
        assert_eq!(hermite(2, &1.0).unwrap(), 2.0);
        assert_eq!(hermite(3, &2.0).unwrap(), 40.0);
    }

    #[test]
    fn guard_rejects_high_degree() {
        assert!(hermite(60, &0.5).is_ok());
        assert!(matches!(
            hermite(61, &0.5),
            Err(Error::DegreeOutOfRange { degree: 61, .. })
        ));
    }

    #[test]
    fn derivative_matches_difference() {
        let x = 0.37;
        let h = 1e-6;
        for n in 0..8 {
            let (_, d1, d2) = hermite_with_derivs(n, &x);
            let fd1 = (hermite_unchecked(n, &(x + h)) - hermite_unchecked(n, &(x - h))) / (2.0 * h);
            assert!((d1 - fd1).abs() < 1e-6 * (1.0 + d1.abs()), "n = {n}");
            let fd2 = (hermite_unchecked(n, &(x + 1e-4)) - 2.0 * hermite_unchecked(n, &x)
                + hermite_unchecked(n, &(x - 1e-4)))
                / 1e-8;
            assert!((d2 - fd2).abs() < 1e-4 * (1.0 + d2.abs()), "n = {n}");
        }
    }
}
