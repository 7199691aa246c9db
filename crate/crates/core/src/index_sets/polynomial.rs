use crate::error::{Error, Result};

/// Differences are checked on at least this many consecutive arguments.
const MIN_PROBE: u64 = 1024;
const MAX_PROBE: u64 = 1_000_000;

/// An integer polynomial that is strictly increasing on the positive integers.
///
/// Coefficients are stored lowest degree first, so `[0, 0, 1]` is `k²`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    coeffs: Vec<i64>,
    /// Smallest `k ≥ 1` with `p(k) ≥ 1`.
    first_positive: u64,
}

impl Polynomial {
    pub fn new(coeffs: impl Into<Vec<i64>>) -> Result<Self> {
        let mut coeffs = coeffs.into();
        while coeffs.len() > 1 && coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "polynomial {coeffs:?} has degree < 1 and is not strictly increasing"
            )));
        }
        let leading = *coeffs.last().unwrap();
        if leading <= 0 {
            return Err(Error::InvalidArgument(format!(
                "polynomial {coeffs:?} must have a positive leading coefficient"
            )));
        }
        let mut poly = Polynomial {
            coeffs,
            first_positive: 1,
        };
        // The difference p(k+1) - p(k) has a positive leading coefficient, so
        // past its Cauchy root bound it stays positive.
        let probe = poly.difference_root_bound().clamp(MIN_PROBE, MAX_PROBE);
        let mut prev = poly.eval(1);
        for k in 2..=probe + 1 {
            let cur = poly.eval(k);
            if cur <= prev {
                return Err(Error::InvalidArgument(format!(
                    "polynomial {:?} is not strictly increasing: p({}) = {prev} >= p({k}) = {cur}",
                    poly.coeffs,
                    k - 1
                )));
            }
            prev = cur;
        }
        poly.first_positive = poly.smallest_arg_at_least(1);
        Ok(poly)
    }

    /// `a k² + b k + c`.
    pub fn quadratic(a: i64, b: i64, c: i64) -> Result<Self> {
        Self::new(vec![c, b, a])
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Evaluates with saturation at the `i128` range.
    pub fn eval(&self, k: u64) -> i128 {
        let x = k as i128;
        let mut acc: i128 = 0;
        for &c in self.coeffs.iter().rev() {
            acc = match acc.checked_mul(x).and_then(|v| v.checked_add(c as i128)) {
                Some(v) => v,
                None => return if acc >= 0 { i128::MAX } else { i128::MIN },
            };
        }
        acc
    }

    fn difference_root_bound(&self) -> u64 {
        // Coefficients of p(k+1) - p(k), via binomial expansion.
        let d = self.degree();
        let mut diff = vec![0f64; d];
        for (i, &c) in self.coeffs.iter().enumerate().skip(1) {
            let mut binom = 1f64;
            for (j, slot) in diff.iter_mut().enumerate().take(i) {
                *slot += c as f64 * binom;
                binom = binom * (i - j) as f64 / (j + 1) as f64;
            }
        }
        let lead = diff[d - 1];
        let ratio = diff[..d - 1].iter().map(|c| (c / lead).abs()).fold(0f64, f64::max);
        (1.0 + ratio).ceil().min(u64::MAX as f64) as u64
    }

    /// Smallest `k ≥ 1` with `p(k) ≥ target`.
    fn smallest_arg_at_least(&self, target: i128) -> u64 {
        if self.eval(1) >= target {
            return 1;
        }
        let mut hi = 2u64;
        while self.eval(hi) < target {
            hi = hi.saturating_mul(2);
        }
        let mut lo = hi / 2;
        while lo + 1 < hi {
            let mid = lo + (hi - lo) / 2;
            if self.eval(mid) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    pub(crate) fn first_positive_arg(&self) -> u64 {
        self.first_positive
    }

    /// Number of image points in `[1, n]`.
    pub fn count_le(&self, n: u64) -> u64 {
        if n == 0 || self.eval(self.first_positive) > n as i128 {
            return 0;
        }
        // Largest k with p(k) <= n.
        let above = self.smallest_arg_at_least(n as i128 + 1);
        above - self.first_positive
    }

    /// The argument `k ≥ 1` with `p(k) = m`, if any.
    pub fn preimage(&self, m: u64) -> Option<u64> {
        let k = self.smallest_arg_at_least(m as i128);
        (self.eval(k) == m as i128).then_some(k)
    }

    /// The `rank`-th positive image point (1-based).
    pub fn nth_image(&self, rank: u64) -> Option<u64> {
        let v = self.eval(self.first_positive.checked_add(rank.checked_sub(1)?)?);
        u64::try_from(v).ok()
    }

    /// `q(j) = p(scale·j + shift)`.
    pub fn compose_affine(&self, scale: i64, shift: i64) -> Result<Polynomial> {
        let mut out = vec![0i128; self.coeffs.len()];
        let mut power = vec![1i128];
        for &c in &self.coeffs {
            for (i, &pc) in power.iter().enumerate() {
                out[i] += c as i128 * pc;
            }
            let mut next = vec![0i128; power.len() + 1];
            for (i, &pc) in power.iter().enumerate() {
                next[i] += pc * shift as i128;
                next[i + 1] += pc * scale as i128;
            }
            power = next;
        }
        let coeffs = out
            .into_iter()
            .map(|c| i64::try_from(c).map_err(|_| Error::InvalidArgument("polynomial coefficient overflow".into())))
            .collect::<Result<Vec<_>>>()?;
        Polynomial::new(coeffs)
    }
}

impl std::fmt::Display for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "poly{:?}", self.coeffs)
    }
}
