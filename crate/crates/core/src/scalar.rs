//! Scalar abstraction, the extended line over it, and threshold values.
//!
//! Everything downstream (intervals, barcodes, diagrams, distances) is
//! generic over an ordered exact scalar type.  The crate root fixes
//! arbitrary-precision rationals as the default; fixed-width rationals work
//! too and are handy in hot test loops.

use std::fmt;

use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Bound alias for the endpoint scalar type.
///
/// Comparisons must be exact: the distance routines enumerate candidate
/// values and test feasibility with equality, so floating-point types are
/// deliberately excluded (they lack `Ord`).  Division must be exact on the
/// values actually divided; all rational types qualify.
pub trait Scalar:
    Clone + Ord + fmt::Debug + fmt::Display + Num + Signed + FromPrimitive + ToPrimitive
{
}

impl<T> Scalar for T where
    T: Clone + Ord + fmt::Debug + fmt::Display + Num + Signed + FromPrimitive + ToPrimitive
{
}

/// Exact halving, used for midpoints and half-lengths.
pub fn half<Q: Scalar>(q: &Q) -> Q {
    q.clone() / (Q::one() + Q::one())
}

/// Parse an exact scalar from `-3`, `3/2`, or `1.5` style text.
pub fn parse_scalar<Q: Scalar>(text: &str) -> Result<Q, String> {
    let text = text.trim();
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let value = if let Some((numer, denom)) = body.split_once('/') {
        let n: Q = parse_digits(numer)?;
        let d: Q = parse_digits(denom)?;
        if d.is_zero() {
            return Err(format!("zero denominator in `{text}`"));
        }
        n / d
    } else if let Some((int, frac)) = body.split_once('.') {
        if int.is_empty() && frac.is_empty() {
            return Err(format!("expected a number, found `{text}`"));
        }
        let whole: Q = if int.is_empty() {
            Q::zero()
        } else {
            parse_digits(int)?
        };
        if frac.is_empty() {
            whole
        } else {
            let numer: Q = parse_digits(frac)?;
            let ten = digit::<Q>(10)?;
            let mut scale = Q::one();
            for _ in 0..frac.len() {
                scale = scale * ten.clone();
            }
            whole + numer / scale
        }
    } else {
        parse_digits(body)?
    };
    Ok(if negative { -value } else { value })
}

fn parse_digits<Q: Scalar>(digits: &str) -> Result<Q, String> {
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("expected digits, found `{digits}`"));
    }
    let ten = digit::<Q>(10)?;
    let mut acc = Q::zero();
    for b in digits.bytes() {
        acc = acc * ten.clone() + digit::<Q>(b - b'0')?;
    }
    Ok(acc)
}

fn digit<Q: Scalar>(d: u8) -> Result<Q, String> {
    Q::from_u8(d).ok_or_else(|| format!("scalar type cannot represent {d}"))
}

/// A scalar extended with the two infinities, ordered `-inf < finite < inf`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtReal<Q> {
    NegInf,
    Finite(Q),
    PosInf,
}

impl<Q: Scalar> ExtReal<Q> {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn as_finite(&self) -> Option<&Q> {
        match self {
            ExtReal::Finite(q) => Some(q),
            _ => None,
        }
    }

    /// Shift down by a finite amount; infinities absorb.
    pub fn minus(&self, d: &Q) -> Self {
        match self {
            ExtReal::Finite(q) => ExtReal::Finite(q.clone() - d.clone()),
            inf => inf.clone(),
        }
    }

    /// Shift up by a finite amount; infinities absorb.
    pub fn plus(&self, d: &Q) -> Self {
        match self {
            ExtReal::Finite(q) => ExtReal::Finite(q.clone() + d.clone()),
            inf => inf.clone(),
        }
    }

    /// Parse `inf`, `+inf`, `-inf`, or a finite scalar.
    pub fn parse(text: &str) -> Result<Self, String> {
        match text.trim() {
            "inf" | "+inf" => Ok(ExtReal::PosInf),
            "-inf" => Ok(ExtReal::NegInf),
            finite => parse_scalar(finite).map(ExtReal::Finite),
        }
    }
}

impl<Q: fmt::Display> fmt::Display for ExtReal<Q> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => write!(f, "-inf"),
            ExtReal::Finite(q) => write!(f, "{q}"),
            ExtReal::PosInf => write!(f, "inf"),
        }
    }
}

/// An extended value together with whether it is attained.
///
/// Infima in this crate come in two flavours: minima (`attained = true`) and
/// strict infima that are only approached (`attained = false`).  The order
/// compares values first and breaks ties with attained-first, so that
/// `{δ | δ ≥ threshold in this order}` is exactly the set a threshold
/// describes: `(v, true)` stands for `[v, ∞)` and `(v, false)` for `(v, ∞)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Threshold<Q> {
    pub value: ExtReal<Q>,
    pub attained: bool,
}

impl<Q: Scalar> Threshold<Q> {
    pub fn attained(value: ExtReal<Q>) -> Self {
        Threshold {
            value,
            attained: true,
        }
    }

    pub fn unattained(value: ExtReal<Q>) -> Self {
        Threshold {
            value,
            attained: false,
        }
    }

    /// The threshold of the always-satisfied condition: 0, attained.
    pub fn zero() -> Self {
        Threshold::attained(ExtReal::Finite(Q::zero()))
    }

    /// The threshold of the never-satisfied condition: +∞, not attained.
    pub fn infinite() -> Self {
        Threshold::unattained(ExtReal::PosInf)
    }

    /// True iff a condition with this threshold holds at `delta` exactly.
    pub fn holds_at(&self, delta: &Q) -> bool {
        let d = ExtReal::Finite(delta.clone());
        d > self.value || (d == self.value && self.attained)
    }
}

impl<Q: Scalar> PartialOrd for Threshold<Q> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<Q: Scalar> Ord for Threshold<Q> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // attained = true is the smaller threshold at equal values: [v,∞) ⊇ (v,∞).
        self.value
            .cmp(&other.value)
            .then_with(|| other.attained.cmp(&self.attained))
    }
}
