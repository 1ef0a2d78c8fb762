//! Cyclic groups `G_n` (residues mod n, identity = 0), their one-dimensional
//! irreducible representations, products `G_{n1} x G_{n2}`, and the CRT relabeling for
//! coprime orders.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CyclicGroup {
    order: usize,
}

impl CyclicGroup {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::ZeroOrder);
        }
        Ok(CyclicGroup { order })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn reduce(&self, exponent: i64) -> usize {
        exponent.rem_euclid(self.order as i64) as usize
    }

    pub fn compose(&self, a: usize, b: usize) -> usize {
        (a + b) % self.order
    }

    pub fn inverse(&self, a: usize) -> usize {
        (self.order - a % self.order) % self.order
    }
}

/// `e^{2 pi i m / n}` with `m` already reduced mod `n`, so large exponents do not
/// lose precision.
pub fn root_of_unity(n: usize, m: i64) -> Complex64 {
    let r = m.rem_euclid(n as i64);
    if r == 0 {
        return Complex64::new(1.0, 0.0);
    }
    // exact values on the axes keep sums like 1 + i + (-1) + (-i) at zero
    if 4 * r as usize == n {
        return Complex64::new(0.0, 1.0);
    }
    if 2 * r as usize == n {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * r as usize == 3 * n {
        return Complex64::new(0.0, -1.0);
    }
    Complex64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64)
}

/// Irrep `rho_s` of `G_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Irrep {
    pub order: usize,
    pub label: usize,
}

impl Irrep {
    pub fn new(order: usize, label: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::ZeroOrder);
        }
        if label >= order {
            return Err(Error::LabelOutOfRange { label, order });
        }
        Ok(Irrep { order, label })
    }

    pub fn value(&self, kappa: i64) -> Complex64 {
        let s = self.label as i64;
        let n = self.order as i64;
        // (s * kappa) mod n without overflow for any i64 kappa
        let k = kappa.rem_euclid(n);
        root_of_unity(self.order, ((s as i128 * k as i128) % n as i128) as i64)
    }
}

/// `tau_{s,t}(kappa, iota) = omega_1^{s kappa} omega_2^{t iota}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProductIrrep {
    pub n1: usize,
    pub n2: usize,
    pub s: usize,
    pub t: usize,
}

impl ProductIrrep {
    pub fn new(n1: usize, n2: usize, s: usize, t: usize) -> Result<Self> {
        Irrep::new(n1, s)?;
        Irrep::new(n2, t)?;
        Ok(ProductIrrep { n1, n2, s, t })
    }

    /// All `n1 * n2` labels, `s` major.
    pub fn all(n1: usize, n2: usize) -> Result<Vec<Self>> {
        let mut out = Vec::with_capacity(n1 * n2);
        for s in 0..n1 {
            for t in 0..n2 {
                out.push(Self::new(n1, n2, s, t)?);
            }
        }
        Ok(out)
    }

    pub fn value(&self, kappa: i64, iota: i64) -> Complex64 {
        let a = Irrep {
            order: self.n1,
            label: self.s,
        }
        .value(kappa);
        let b = Irrep {
            order: self.n2,
            label: self.t,
        }
        .value(iota);
        a * b
    }
}

pub fn irrep_value(n: usize, s: usize, kappa: i64) -> Result<Complex64> {
    Ok(Irrep::new(n, s)?.value(kappa))
}

pub fn product_irrep_value(
    n1: usize,
    n2: usize,
    s: usize,
    t: usize,
    kappa: i64,
    iota: i64,
) -> Result<Complex64> {
    Ok(ProductIrrep::new(n1, n2, s, t)?.value(kappa, iota))
}

/// `sum_{s,t} tau_{s,t}(kappa, iota)`: `n1 n2` at the identity, zero elsewhere.
pub fn irrep_sum(n1: usize, n2: usize, kappa: i64, iota: i64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for irrep in ProductIrrep::all(n1, n2)? {
        acc += irrep.value(kappa, iota);
    }
    Ok(acc)
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(kappa n2 + iota n1) mod n1 n2`, the image of `(g1^kappa, g2^iota)` in `G_{n1 n2}`.
///
/// Applied to labels `(s, t)` this is still a bijection onto `0..n1 n2`, but it does not
/// identify `tau_{s,t}` with `rho_r`; use [`crt_label`] for that.
pub fn crt_index(n1: usize, n2: usize, kappa: i64, iota: i64) -> Result<usize> {
    if n1 == 0 || n2 == 0 {
        return Err(Error::ZeroOrder);
    }
    if gcd(n1, n2) != 1 {
        return Err(Error::NotCoprime { n1, n2 });
    }
    let n = (n1 * n2) as i64;
    let k = kappa.rem_euclid(n1 as i64);
    let i = iota.rem_euclid(n2 as i64);
    Ok(((k * n2 as i64 + i * n1 as i64) % n) as usize)
}

/// The label `r` with `tau_{s,t}(kappa, iota) = rho_r(g^eps)` for
/// `eps = crt_index(n1, n2, kappa, iota)`, i.e. `r = s mod n1` and `r = t mod n2`.
pub fn crt_label(n1: usize, n2: usize, s: usize, t: usize) -> Result<usize> {
    Irrep::new(n1, s)?;
    Irrep::new(n2, t)?;
    if gcd(n1, n2) != 1 {
        return Err(Error::NotCoprime { n1, n2 });
    }
    Ok((0..n1)
        .map(|j| t + j * n2)
        .find(|r| r % n1 == s)
        .expect("coprime orders admit a CRT solution"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn table_values() {
        assert!(close(irrep_value(12, 1, 3).unwrap(), Complex64::i(), 1e-15));
        assert_eq!(irrep_value(5, 0, 4).unwrap(), Complex64::new(1.0, 0.0));
        assert!(close(irrep_value(4, 1, 2).unwrap(), Complex64::new(-1.0, 0.0), 1e-15));
        assert_eq!(
            irrep_value(4, 4, 1),
            Err(Error::LabelOutOfRange { label: 4, order: 4 })
        );
    }

    #[test]
    fn product_values() {
        assert!(close(
            product_irrep_value(3, 4, 2, 1, 3, 1).unwrap(),
            Complex64::i(),
            1e-15
        ));
        for (k, i) in [(0, 0), (1, 2), (5, -3)] {
            assert_eq!(
                product_irrep_value(3, 4, 0, 0, k, i).unwrap(),
                Complex64::new(1.0, 0.0)
            );
        }
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        assert!(close(product_irrep_value(3, 4, 1, 0, 1, 7).unwrap(), w, 1e-15));
        assert!(product_irrep_value(3, 4, 3, 0, 0, 0).is_err());
    }

    #[test]
    fn orthogonality_sums() {
        assert!(close(irrep_sum(3, 4, 3, 4).unwrap(), Complex64::new(12.0, 0.0), 1e-12));
        assert!(irrep_sum(3, 4, 1, 1).unwrap().norm() < 1e-12);
        assert!(close(irrep_sum(2, 2, 0, 0).unwrap(), Complex64::new(4.0, 0.0), 1e-12));
    }

    #[test]
    fn crt_examples() {
        assert_eq!(crt_index(3, 4, 3, 4).unwrap(), 0);
        assert_eq!(crt_index(3, 4, 1, 1).unwrap(), 7);
        assert_eq!(crt_index(2, 4, 1, 1), Err(Error::NotCoprime { n1: 2, n2: 4 }));
    }

    #[test]
    fn crt_is_bijective() {
        for n1 in 1..=40usize {
            for n2 in 1..=40usize {
                if gcd(n1, n2) != 1 || n1 * n2 > 10_000 {
                    continue;
                }
                let mut seen = vec![false; n1 * n2];
                for k in 0..n1 as i64 {
                    for i in 0..n2 as i64 {
                        let e = crt_index(n1, n2, k, i).unwrap();
                        assert!(!seen[e], "collision at {n1},{n2}");
                        seen[e] = true;
                    }
                }
            }
        }
    }

    #[test]
    fn crt_relabels_irreps() {
        let (n1, n2) = (3usize, 4usize);
        let mut seen = vec![false; n1 * n2];
        for tau in ProductIrrep::all(n1, n2).unwrap() {
            let r = crt_label(n1, n2, tau.s, tau.t).unwrap();
            assert!(!seen[r]);
            seen[r] = true;
            for k in 0..n1 as i64 {
                for i in 0..n2 as i64 {
                    let eps = crt_index(n1, n2, k, i).unwrap() as i64;
                    let rho = irrep_value(n1 * n2, r, eps).unwrap();
                    assert!(close(tau.value(k, i), rho, 1e-14));
                }
            }
        }
    }

    #[test]
    fn index_formula_on_labels_is_a_different_bijection() {
        // (s, t) = (0, 1): the index formula gives r = 3, but rho_3(g^eps) at (0, 1)
        // (eps = 3) is -i while tau_{0,1}(0, 1) = i
        let r = crt_index(3, 4, 0, 1).unwrap();
        assert_eq!(r, 3);
        let eps = crt_index(3, 4, 0, 1).unwrap() as i64;
        let tau = product_irrep_value(3, 4, 0, 1, 0, 1).unwrap();
        assert!(close(tau, Complex64::i(), 1e-15));
        assert!(close(irrep_value(12, r, eps).unwrap(), -Complex64::i(), 1e-15));
        assert_eq!(crt_label(3, 4, 0, 1).unwrap(), 9);
    }

    proptest! {
        #[test]
        fn multiplicative(n in 1usize..50, s_raw in 0usize..1000, a in -10_000i64..10_000, b in -10_000i64..10_000) {
            let s = s_raw % n;
            let lhs = irrep_value(n, s, a + b).unwrap();
            let rhs = irrep_value(n, s, a).unwrap() * irrep_value(n, s, b).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }

        #[test]
        fn inverse_is_conjugate(n1 in 1usize..20, n2 in 1usize..20, s in 0usize..20, t in 0usize..20, k in -500i64..500, i in -500i64..500) {
            let tau = ProductIrrep::new(n1, n2, s % n1, t % n2).unwrap();
            let v = tau.value(k, i);
            prop_assert!((v.inv() - v.conj()).norm() <= 1e-15);
            prop_assert!((v.norm() - 1.0).abs() <= 1e-15);
        }
    }
}
