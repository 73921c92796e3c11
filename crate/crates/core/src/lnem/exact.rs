//! Exact evaluation for integer information matrices.
//!
//! Nuisance parameters (intercept, block and network effects) are
//! eliminated by fraction-free symmetric elimination, leaving `M = d * S`
//! where `S` is the reduced information for the free direct effects and `d`
//! the last nonzero pivot. Zero pivots met on the way tell which validity
//! rules fail. With `C = S^-1 = d * adj(M) / det(M)`:
//!
//! * `A_s = 2 d (m tr adj(M) - 1' adj(M) 1) / (m (m - 1) det M)`
//! * `D_s = d^q / det M`
//!
//! where `tr adj(M)` is the sum of the principal `(q-1)`-minors and
//! `1' adj(M) 1 = det(M + J) - det(M)`. The result is a reduced fraction, so
//! equal values always round to the same `f64` no matter how the design was
//! labelled. Arithmetic runs in `i64`, then `i128`, then arbitrary precision
//! when a level overflows.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{Criterion, CriterionValue, ModelError, Validity};

trait Ring: Clone {
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn is_negative(&self) -> bool;
    fn add(&self, o: &Self) -> Option<Self>;
    fn sub(&self, o: &Self) -> Option<Self>;
    fn mul(&self, o: &Self) -> Option<Self>;
    fn div(&self, o: &Self) -> Option<Self>;
    fn gcd(&self, o: &Self) -> Self;
    fn to_big(&self) -> BigInt;
}

macro_rules! primitive_ring {
    ($t:ty) => {
        impl Ring for $t {
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            fn is_zero(&self) -> bool {
                *self == 0
            }
            fn is_negative(&self) -> bool {
                *self < 0
            }
            fn add(&self, o: &Self) -> Option<Self> {
                self.checked_add(*o)
            }
            fn sub(&self, o: &Self) -> Option<Self> {
                self.checked_sub(*o)
            }
            fn mul(&self, o: &Self) -> Option<Self> {
                self.checked_mul(*o)
            }
            fn div(&self, o: &Self) -> Option<Self> {
                self.checked_div(*o)
            }
            fn gcd(&self, o: &Self) -> Self {
                Integer::gcd(self, o)
            }
            fn to_big(&self) -> BigInt {
                BigInt::from(*self)
            }
        }
    };
}

primitive_ring!(i64);
primitive_ring!(i128);

impl Ring for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        num_traits::Zero::is_zero(self)
    }
    fn is_negative(&self) -> bool {
        num_traits::Signed::is_negative(self)
    }
    fn add(&self, o: &Self) -> Option<Self> {
        Some(self + o)
    }
    fn sub(&self, o: &Self) -> Option<Self> {
        Some(self - o)
    }
    fn mul(&self, o: &Self) -> Option<Self> {
        Some(self * o)
    }
    fn div(&self, o: &Self) -> Option<Self> {
        Some(self / o)
    }
    fn gcd(&self, o: &Self) -> Self {
        Integer::gcd(self, o)
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

/// `None` signals overflow at this precision.
type Step<T> = Result<Option<T>, ModelError>;

/// `(a * p - b * c) / d`, exact by Sylvester's identity.
fn bareiss<T: Ring>(a: &T, p: &T, b: &T, c: &T, d: &T) -> Option<T> {
    a.mul(p)?.sub(&b.mul(c)?)?.div(d)
}

/// Determinant of a symmetric positive semidefinite matrix (row-major,
/// `q x q`). A zero pivot means the matrix is singular.
fn psd_det<T: Ring>(mut a: Vec<T>, q: usize) -> Step<T> {
    let mut prev = T::from_i64(1);
    for k in 0..q {
        let piv = a[k * q + k].clone();
        if piv.is_negative() {
            return Err(ModelError::Decomposition);
        }
        if piv.is_zero() {
            return Ok(Some(T::from_i64(0)));
        }
        for i in k + 1..q {
            for j in k + 1..q {
                match bareiss(&a[i * q + j], &piv, &a[i * q + k], &a[k * q + j], &prev) {
                    Some(v) => a[i * q + j] = v,
                    None => return Ok(None),
                }
            }
        }
        prev = piv;
    }
    Ok(Some(prev))
}

/// Permuted copy of `info` (row-major, `p x p`) in ring `T`.
fn permuted<T: Ring>(info: &[i64], p: usize, order: &[usize]) -> Vec<T> {
    let mut a = Vec::with_capacity(order.len() * order.len());
    for &r in order {
        for &c in order {
            a.push(T::from_i64(info[r * p + c]));
        }
    }
    a
}

struct Elimination<T> {
    /// Last nonzero pivot; the trailing block holds `pivot * schur`.
    pivot: T,
    /// A zero pivot before / from position `split`.
    early_skip: bool,
    late_skip: bool,
}

/// Fraction-free elimination of the first `nuisance` variables of the
/// symmetric `k x k` matrix `a`, skipping (positive semidefinite) zero
/// pivots.
fn eliminate<T: Ring>(a: &mut [T], k: usize, nuisance: usize, split: usize) -> Step<Elimination<T>> {
    let mut alive = vec![true; k];
    let mut prev = T::from_i64(1);
    let mut early_skip = false;
    let mut late_skip = false;
    for c in 0..nuisance {
        alive[c] = false;
        let piv = a[c * k + c].clone();
        if piv.is_negative() {
            return Err(ModelError::Decomposition);
        }
        if piv.is_zero() {
            if (c + 1..k).any(|j| alive[j] && !a[c * k + j].is_zero()) {
                return Err(ModelError::Decomposition);
            }
            if c < split {
                early_skip = true;
            } else {
                late_skip = true;
            }
            continue;
        }
        for i in c + 1..k {
            if !alive[i] {
                continue;
            }
            for j in i..k {
                if !alive[j] {
                    continue;
                }
                let Some(v) = bareiss(&a[i * k + j], &piv, &a[i * k + c], &a[c * k + j], &prev) else {
                    return Ok(None);
                };
                a[j * k + i] = v.clone();
                a[i * k + j] = v;
            }
        }
        prev = piv;
    }
    Ok(Some(Elimination {
        pivot: prev,
        early_skip,
        late_skip,
    }))
}

fn trailing_block<T: Ring>(a: &[T], k: usize, from: usize) -> Vec<T> {
    let mut out = Vec::with_capacity((k - from) * (k - from));
    for i in from..k {
        for j in from..k {
            out.push(a[i * k + j].clone());
        }
    }
    out
}

/// Copy of `info` with the last free network column replaced by
/// `w = sum_j A u_j` over the free treatments. The change of basis is
/// unimodular, so rank and the span of the nuisance columns are unchanged,
/// and the remaining free network coefficients become the contrasts
/// `gamma_j - gamma_m`.
fn contrast_basis(info: &[i64], p: usize, m: usize) -> Vec<i64> {
    let last = m + m - 1;
    let mut w = info.to_vec();
    for r in 0..p {
        let sum: i64 = (m..m + m).map(|c| info[r * p + c]).sum();
        w[r * p + last] = sum;
        w[last * p + r] = sum;
    }
    w[last * p + last] = (m..m + m).flat_map(|a| (m..m + m).map(move |b| info[a * p + b])).sum();
    w
}

/// Numerator and denominator of the criterion, or `None` when invalid.
///
/// Elimination order is intercept, block columns, `w`, then the free
/// network contrasts; a skipped pivot among the latter means some
/// `gamma_j - gamma_l` is not estimable.
fn reduce<T: Ring>(info: &[i64], p: usize, m: usize, criterion: Criterion, validity: Validity) -> Step<Option<(T, T)>> {
    let q = m - 1;
    let last = m + q;
    let basis = contrast_basis(info, p, m);
    let order: Vec<usize> = std::iter::once(0)
        .chain(m + m..p)
        .chain(std::iter::once(last))
        .chain(m..last)
        .chain(1..m)
        .collect();
    let mut a: Vec<T> = permuted(&basis, p, &order);
    let nuisance = p - q;
    let Some(elim) = eliminate(&mut a, p, nuisance, nuisance - q)? else {
        return Ok(None);
    };
    let invalid = match validity {
        Validity::Estimable => false,
        Validity::NetworkContrasts => elim.late_skip,
        Validity::FullRank => elim.early_skip || elim.late_skip,
    };
    if invalid {
        return Ok(Some(None));
    }
    let prev = elim.pivot;

    let reduced = trailing_block(&a, p, nuisance);
    let Some(det) = psd_det(reduced.clone(), q)? else {
        return Ok(None);
    };
    if det.is_zero() {
        return Ok(Some(None));
    }

    let (num, den) = match criterion {
        Criterion::Ds => {
            let mut num = T::from_i64(1);
            for _ in 0..q {
                let Some(v) = num.mul(&prev) else { return Ok(None) };
                num = v;
            }
            (num, det)
        }
        Criterion::As => {
            let mut trace_adj = T::from_i64(0);
            for skip in 0..q {
                let minor: Vec<T> = (0..q)
                    .filter(|&i| i != skip)
                    .flat_map(|i| (0..q).filter(|&j| j != skip).map(move |j| (i, j)))
                    .map(|(i, j)| reduced[i * q + j].clone())
                    .collect();
                let Some(d) = psd_det(minor, q - 1)? else {
                    return Ok(None);
                };
                let Some(v) = trace_adj.add(&d) else { return Ok(None) };
                trace_adj = v;
            }
            let one = T::from_i64(1);
            let mut bumped = Vec::with_capacity(q * q);
            for v in &reduced {
                let Some(v) = v.add(&one) else { return Ok(None) };
                bumped.push(v);
            }
            let Some(det_bumped) = psd_det(bumped, q)? else {
                return Ok(None);
            };
            let ones_adj = match det_bumped.sub(&det) {
                Some(v) => v,
                None => return Ok(None),
            };
            let m_t = T::from_i64(m as i64);
            let inner = match trace_adj.mul(&m_t).and_then(|t| t.sub(&ones_adj)) {
                Some(v) => v,
                None => return Ok(None),
            };
            let num = match T::from_i64(2).mul(&prev).and_then(|v| v.mul(&inner)) {
                Some(v) => v,
                None => return Ok(None),
            };
            let den = match T::from_i64((m * (m - 1)) as i64).mul(&det) {
                Some(v) => v,
                None => return Ok(None),
            };
            (num, den)
        }
    };
    let g = num.gcd(&den);
    if g.is_zero() {
        return Ok(Some(Some((num, den))));
    }
    match (num.div(&g), den.div(&g)) {
        (Some(n), Some(d)) => Ok(Some(Some((n, d)))),
        _ => Ok(None),
    }
}

/// Rounds a reduced fraction; identical fractions give identical results.
fn to_f64(num: BigInt, den: BigInt) -> f64 {
    match (i128::try_from(&num), i128::try_from(&den)) {
        (Ok(n), Ok(d)) => n as f64 / d as f64,
        _ => num.to_f64().unwrap_or(f64::NAN) / den.to_f64().unwrap_or(f64::NAN),
    }
}

fn finish<T: Ring>(outcome: Option<(T, T)>) -> CriterionValue {
    match outcome {
        None => CriterionValue::Invalid,
        Some((n, d)) => CriterionValue::Valid(to_f64(n.to_big(), d.to_big())),
    }
}

/// Criterion value of an integer information matrix (row-major, `p x p`).
pub(crate) fn evaluate_exact(
    info: &[i64],
    p: usize,
    m: usize,
    criterion: Criterion,
    validity: Validity,
) -> Result<CriterionValue, ModelError> {
    if let Some(r) = reduce::<i64>(info, p, m, criterion, validity)? {
        return Ok(finish(r));
    }
    if let Some(r) = reduce::<i128>(info, p, m, criterion, validity)? {
        return Ok(finish(r));
    }
    let r = reduce::<BigInt>(info, p, m, criterion, validity)?.expect("arbitrary precision never overflows");
    Ok(finish(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run<T: Ring>(info: &[i64], p: usize, m: usize, c: Criterion) -> Option<(BigInt, BigInt)> {
        reduce::<T>(info, p, m, c, Validity::Estimable)
            .unwrap()
            .unwrap()
            .map(|(n, d)| (n.to_big(), d.to_big()))
    }

    #[test]
    fn precision_levels_agree() {
        // F rows for design AB on two isolated units: (1,1,0,0), (1,0,0,0).
        let info = [2, 1, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0];
        for c in [Criterion::As, Criterion::Ds] {
            let a = run::<i64>(&info, 4, 2, c);
            assert_eq!(a, run::<i128>(&info, 4, 2, c));
            assert_eq!(a, run::<BigInt>(&info, 4, 2, c));
            assert_eq!(a, Some((BigInt::from(2), BigInt::from(1))));
        }
    }

    #[test]
    fn determinants() {
        assert_eq!(psd_det::<i64>(vec![], 0).unwrap(), Some(1));
        assert_eq!(psd_det::<i64>(vec![2, 1, 1, 2], 2).unwrap(), Some(3));
        assert_eq!(psd_det::<i64>(vec![1, 1, 1, 1], 2).unwrap(), Some(0));
        assert_eq!(psd_det::<i64>(vec![i64::MAX, 1, 1, i64::MAX], 2).unwrap(), None);
    }

    #[test]
    fn overflow_falls_through() {
        let big = 1i64 << 40;
        let info = [2 * big, big, 0, 0, big, big, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0];
        assert!(reduce::<i64>(&info, 4, 2, Criterion::As, Validity::Estimable)
            .unwrap()
            .is_none());
        let v = evaluate_exact(&info, 4, 2, Criterion::As, Validity::Estimable).unwrap();
        assert_eq!(v, CriterionValue::Valid(2.0 / big as f64));
    }
}
