//! Phase exponents and roots-of-unity product ensembles.
//!
//! For exponents `e_0..e_{r−1}` and `ω = exp(2πi/n₀)`, the vectors
//! `|u_k⟩ = Σ_i ω^{k e_i} √σ_i |i⟩` satisfy
//! `(1/n₀) Σ_k |u_k⟩⟨u_k| ⊗ |u_k*⟩⟨u_k*| = Σ_{i,p} σ_iσ_p |ip⟩⟨ip| + Σ_{i≠j} σ_iσ_j |i⟩⟨j| ⊗ |i⟩⟨j|`
//! whenever `e_i − e_j − e_p + e_q` vanishes only for `i=j, p=q` or `i=p, j=q`.

use crate::error::{Error, Result};
use crate::scalar::{Real, C};
use crate::states::SchmidtSpectrum;

/// Doubling exponents `0, −1, 2, −4, 8, …` (`e_m = (−1)^m 2^{m−1}` for m ≥ 1).
///
/// These separate all index quadruples only for r ≤ 3; see [`ensemble_exponents`].
pub fn phase_exponents(r: usize) -> Vec<i64> {
    (0..r)
        .map(|m| match m {
            0 => 0,
            _ => {
                let mag = 1i64 << (m - 1);
                if m % 2 == 1 {
                    -mag
                } else {
                    mag
                }
            }
        })
        .collect()
}

fn is_trivial(i: usize, j: usize, p: usize, q: usize) -> bool {
    (i == j && p == q) || (i == p && j == q)
}

/// True when `e_i − e_j − e_p + e_q = 0` only on the two trivial index patterns.
pub fn separates_quadruples(e: &[i64]) -> bool {
    let r = e.len();
    for i in 0..r {
        for j in 0..r {
            for p in 0..r {
                for q in 0..r {
                    if e[i] - e[j] - e[p] + e[q] == 0 && !is_trivial(i, j, p, q) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Alternating-sign exponents `0, −1, 2, −5, 8, −15, 20, −31, …`, each the smallest
/// magnitude keeping every quadruple separated. Agrees with [`phase_exponents`] for r ≤ 3.
pub fn ensemble_exponents(r: usize) -> Vec<i64> {
    let mut e = Vec::with_capacity(r);
    for m in 0..r {
        if m == 0 {
            e.push(0);
            continue;
        }
        let sign = if m % 2 == 1 { -1 } else { 1 };
        let mut k = 1i64;
        loop {
            let v = sign * k;
            if !e.contains(&v) {
                e.push(v);
                if separates_quadruples(&e) {
                    break;
                }
                e.pop();
            }
            k += 1;
        }
    }
    e
}

/// Exponent table `m_ijpq = e_i − e_j − e_p + e_q` and the root order `n₀`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootOrder {
    pub exponents: Vec<i64>,
    /// `max |m_ijpq| + 1`, so `n₀` divides no nonzero entry.
    pub n0: usize,
    /// Row-major over `(i, j, p, q)`, `r⁴` entries.
    pub table: Vec<i64>,
}

impl RootOrder {
    pub fn from_exponents(exponents: Vec<i64>) -> Self {
        let r = exponents.len();
        let mut table = Vec::with_capacity(r.pow(4));
        for i in 0..r {
            for j in 0..r {
                for p in 0..r {
                    for q in 0..r {
                        table.push(exponents[i] - exponents[j] - exponents[p] + exponents[q]);
                    }
                }
            }
        }
        let max = table.iter().map(|m| m.unsigned_abs()).max().unwrap_or(0);
        Self {
            exponents,
            n0: max as usize + 1,
            table,
        }
    }

    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    pub fn m(&self, i: usize, j: usize, p: usize, q: usize) -> i64 {
        let r = self.rank();
        self.table[((i * r + j) * r + p) * r + q]
    }

    /// Zero exactly on the trivial patterns.
    pub fn is_separating(&self) -> bool {
        separates_quadruples(&self.exponents)
    }
}

/// Root order for the doubling exponents of [`phase_exponents`].
pub fn root_order(r: usize) -> RootOrder {
    RootOrder::from_exponents(phase_exponents(r))
}

/// Root order for the exponents actually used by [`roots_ensemble`].
pub fn ensemble_root_order(r: usize) -> RootOrder {
    RootOrder::from_exponents(ensemble_exponents(r))
}

/// `Σ_{k<n} ω^{kp}` for `ω = exp(2πi/n)`.
pub fn root_sum<T: Real>(n: usize, p: i64) -> C<T> {
    (0..n).fold(C::new(T::zero(), T::zero()), |acc, k| {
        acc + omega_pow::<T>(n, k as i64 * p)
    })
}

fn omega_pow<T: Real>(n: usize, e: i64) -> C<T> {
    // Reduce first so the angle stays accurate for large exponents.
    let red = e.rem_euclid(n as i64);
    let angle = T::TAU() * T::lit(red as f64) / T::from_usize_lossy(n);
    C::from_polar(T::one(), angle)
}

/// `(w, u, u*)`: weight and the two unit factors of one roots term.
pub type RootTerm<T> = (T, Vec<C<T>>, Vec<C<T>>);

/// `n₀` terms `(w, u_k, u_k*)` with unit-normalized vectors of length `r = rank(σ)` and
/// `w = (Σσ_i)²/n₀`.
pub fn roots_ensemble<T: Real>(sigma: &SchmidtSpectrum<T>) -> Result<Vec<RootTerm<T>>> {
    let r = sigma.rank();
    if r == 0 {
        return Err(Error::InvalidArgument("empty Schmidt spectrum".into()));
    }
    let order = ensemble_root_order(r);
    let n0 = order.n0;
    let s = sigma.sigmas();
    let sum = s.iter().fold(T::zero(), |a, &x| a + x);
    let weight = sum * sum / T::from_usize_lossy(n0);
    let inv_norm = T::one() / sum.sqrt();
    Ok((0..n0)
        .map(|k| {
            let u: Vec<C<T>> = (0..r)
                .map(|i| {
                    omega_pow::<T>(n0, k as i64 * order.exponents[i]) * (s[i].sqrt() * inv_norm)
                })
                .collect();
            let v = u.iter().map(|x| x.conj()).collect();
            (weight, u, v)
        })
        .collect())
}
