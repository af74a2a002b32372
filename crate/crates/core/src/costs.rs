//! Closed-form cost model: classical layer size versus the product of the
//! three nested search spaces, as base-2 exponents per edge.

use serde::{Deserialize, Serialize};

use crate::dp::{check_alpha, LayerSpec};
use crate::edgeset::binomial;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub m: usize,
    pub alpha: f64,
    /// `round((1 - alpha) * m / 4)`, the idealized layer size.
    pub k_nominal: usize,
    /// Layer size the solver actually precomputes (ceiling form).
    pub k_executable: usize,
    /// `C(m, k_nominal)` when it fits in 128 bits.
    pub classical_count: Option<u128>,
    /// `C(m, k_executable)`, present only when the two layer sizes differ.
    pub classical_count_executable: Option<u128>,
    pub classical_log2: f64,
    /// `sqrt(C(m, m/2) * C(m/2, m/4) * C(m/4, round(alpha * m / 4)))` when finite.
    pub quantum_count: Option<f64>,
    pub quantum_log2: f64,
    pub classical_exponent: f64,
    pub quantum_exponent: f64,
    /// `|classical_exponent - quantum_exponent|`.
    pub balance_gap: f64,
}

/// `log2 C(n, k)` via log-gamma.
pub fn log2_binomial(n: usize, k: usize) -> f64 {
    assert!(k <= n);
    let ln = libm::lgamma(n as f64 + 1.0)
        - libm::lgamma(k as f64 + 1.0)
        - libm::lgamma((n - k) as f64 + 1.0);
    ln / std::f64::consts::LN_2
}

fn exact(n: usize, k: usize) -> Option<u128> {
    let b = binomial(n as u64, k as u64);
    (b != u128::MAX).then_some(b)
}

pub fn theoretical_costs(m: usize, alpha: f64) -> Result<CostReport> {
    if m < 4 {
        return Err(Error::out_of_range("m", m, "m >= 4"));
    }
    check_alpha(alpha)?;
    let quarter_real = m as f64 / 4.0;
    let k_nominal = ((1.0 - alpha) * quarter_real).round() as usize;
    let k_executable = LayerSpec::for_edges(m, alpha)?.k_pre;
    let (half, quarter) = (m / 2, m / 4);
    let tail = ((alpha * quarter_real).round() as usize).min(quarter);

    let classical_log2 = log2_binomial(m, k_nominal);
    let quantum_log2 = 0.5
        * (log2_binomial(m, half) + log2_binomial(half, quarter) + log2_binomial(quarter, tail));
    let quantum_count = Some(quantum_log2.exp2()).filter(|q| q.is_finite());
    let classical_exponent = classical_log2 / m as f64;
    let quantum_exponent = quantum_log2 / m as f64;
    Ok(CostReport {
        m,
        alpha,
        k_nominal,
        k_executable,
        classical_count: exact(m, k_nominal),
        classical_count_executable: if k_executable != k_nominal {
            exact(m, k_executable)
        } else {
            None
        },
        classical_log2,
        quantum_count,
        quantum_log2,
        classical_exponent,
        quantum_exponent,
        balance_gap: (classical_exponent - quantum_exponent).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let r = theoretical_costs(20, 0.055).unwrap();
        assert_eq!(r.k_nominal, 5);
        assert_eq!(r.classical_count, Some(15504));
        assert_eq!(r.k_executable, 5);
        assert_eq!(r.classical_count_executable, None);
        // sqrt(C(20,10) * C(10,5) * C(5,0)) = sqrt(184756 * 252)
        let q = (184_756.0f64 * 252.0).sqrt();
        assert!((r.quantum_count.unwrap() - q).abs() / q < 1e-9);

        let r = theoretical_costs(4, 0.055).unwrap();
        assert_eq!(r.classical_count, Some(4));
        assert!(theoretical_costs(3, 0.055).is_err());
        assert!(theoretical_costs(10, 0.0).is_err());
    }

    #[test]
    fn both_layer_sizes_reported_when_they_differ() {
        // m = 14: round(0.945 * 3.5) = 3, ceiling form gives 4.
        let r = theoretical_costs(14, 0.055).unwrap();
        assert_eq!((r.k_nominal, r.k_executable), (3, 4));
        assert_eq!(r.classical_count, Some(364));
        assert_eq!(r.classical_count_executable, Some(1001));
    }

    #[test]
    fn log2_binomial_matches_exact() {
        for (n, k) in [(10, 3), (40, 20), (100, 7), (64, 32)] {
            let exact = (binomial(n as u64, k as u64) as f64).log2();
            assert!((log2_binomial(n, k) - exact).abs() < 1e-9, "{n} {k}");
        }
    }

    #[test]
    fn large_m_balances_near_1_728() {
        let target = 1.728f64.log2();
        let r = theoretical_costs(2000, 0.055).unwrap();
        for e in [r.classical_exponent, r.quantum_exponent] {
            assert!((0.769..=0.799).contains(&e), "{e}");
            assert!((e - target).abs() < 0.02);
        }
        assert!(r.balance_gap < 0.01);
        assert_eq!(r.classical_count, None);
        assert_eq!(r.quantum_count, None);
    }
}
