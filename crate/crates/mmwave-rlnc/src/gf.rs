//! Arithmetic over binary Galois fields GF(2^m).
//!
//! All encoding coefficients and payload symbols live in one field,
//! described by a [`FieldContext`]: the field size `q` (a power of two)
//! and the irreducible reduction polynomial used for multiplication.
//! Addition is XOR; multiplication and inversion go through log/antilog
//! tables built once at construction, so per-operation cost is two table
//! lookups.
//!
//! The context is immutable after construction and can be shared freely
//! across worker threads; random draws take a caller-owned RNG.

use rand::Rng;
use thiserror::Error;

/// Errors raised by field construction and arithmetic.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GfError {
    /// Field size must be a power of two, between 2 and 2^16.
    #[error("field size {0} is not a supported power of two (2..=65536)")]
    BadFieldSize(u64),
    /// The supplied reduction polynomial has the wrong degree for `q`.
    #[error("reduction polynomial 0b{0:b} does not have degree {1}")]
    WrongDegree(u64, u32),
    /// The supplied reduction polynomial factors over GF(2).
    #[error("reduction polynomial 0b{0:b} is reducible over GF(2)")]
    ReduciblePolynomial(u64),
    /// Element value outside `[0, q)`.
    #[error("value {0} is not an element of GF({1})")]
    OutOfRange(u64, u64),
    /// Zero has no multiplicative inverse.
    #[error("attempted to invert the zero element")]
    ZeroInverse,
}

/// An element of GF(q), valid only together with the context it came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
#[repr(transparent)]
pub struct FieldElement(pub u16);

impl FieldElement {
    pub const ZERO: Self = FieldElement(0);
    pub const ONE: Self = FieldElement(1);

    pub fn value(self) -> u16 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for FieldElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Low-weight irreducible polynomials for degrees 1..=16, verified at
/// construction time by the exhaustive factor test.
const DEFAULT_POLYS: [u64; 16] = [
    0b11,                // x + 1
    0b111,               // x^2 + x + 1
    0b1011,              // x^3 + x + 1
    0b10011,             // x^4 + x + 1
    0b100101,            // x^5 + x^2 + 1
    0b1000011,           // x^6 + x + 1
    0b10000011,          // x^7 + x + 1
    0b100011101,         // x^8 + x^4 + x^3 + x^2 + 1
    0b1000010001,        // x^9 + x^4 + 1
    0b10000001001,       // x^10 + x^3 + 1
    0b100000000101,      // x^11 + x^2 + 1
    0b1000001010011,     // x^12 + x^6 + x^4 + x + 1
    0b10000000011011,    // x^13 + x^4 + x^3 + x + 1
    0b100000000101011,   // x^14 + x^5 + x^3 + x + 1
    0b1000000000000011,  // x^15 + x + 1
    0b10001000000001011, // x^16 + x^12 + x^3 + x + 1
];

/// A binary field GF(2^m) with its arithmetic tables.
///
/// Construction validates that `q` is a power of two and that the
/// reduction polynomial is irreducible (exhaustive trial division, which
/// is cheap for degrees up to 16).
#[derive(Debug, Clone)]
pub struct FieldContext {
    q: u32,
    degree: u32,
    poly: u64,
    /// log[a] = discrete log of a (index 0 unused).
    log: Vec<u16>,
    /// exp[i] = generator^i, doubled so exp[la + lb] needs no reduction.
    exp: Vec<u16>,
}

impl FieldContext {
    /// Field of size `q` with the default reduction polynomial for its degree.
    pub fn new(q: u32) -> Result<Self, GfError> {
        let degree = degree_for_size(q)?;
        Self::with_polynomial(q, DEFAULT_POLYS[(degree - 1) as usize])
    }

    /// Field of size `q` reduced by an explicit polynomial (bit pattern,
    /// degree bit included).
    pub fn with_polynomial(q: u32, poly: u64) -> Result<Self, GfError> {
        let degree = degree_for_size(q)?;
        if 64 - poly.leading_zeros() != degree + 1 {
            return Err(GfError::WrongDegree(poly, degree));
        }
        if !poly_is_irreducible(poly) {
            return Err(GfError::ReduciblePolynomial(poly));
        }

        // The multiplicative group of GF(2^m) is cyclic of order q-1; find
        // a generator by trial so the log/exp tables cover every element.
        let order = q - 1;
        let mut generator = 2u32 % q;
        if q > 2 {
            while !generates_group(generator, q, poly) {
                generator += 1;
                debug_assert!(
                    generator < q,
                    "no generator found; polynomial not irreducible?"
                );
            }
        } else {
            generator = 1;
        }

        let mut log = vec![0u16; q as usize];
        let mut exp = vec![0u16; 2 * (order as usize).max(1)];
        let mut acc = 1u32;
        for i in 0..order {
            exp[i as usize] = acc as u16;
            exp[(i + order) as usize] = acc as u16;
            log[acc as usize] = i as u16;
            acc = carryless_mul_mod(acc, generator, poly, degree);
        }
        if order == 0 {
            // GF(2): exp table would be empty; keep a single 1 entry.
            exp = vec![1, 1];
        }

        Ok(FieldContext {
            q,
            degree,
            poly,
            log,
            exp,
        })
    }

    pub fn size(&self) -> u32 {
        self.q
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Bit pattern of the reduction polynomial, for config echo output.
    pub fn reduction_polynomial(&self) -> u64 {
        self.poly
    }

    /// Checked constructor for elements.
    pub fn element(&self, value: u64) -> Result<FieldElement, GfError> {
        if value >= self.q as u64 {
            return Err(GfError::OutOfRange(value, self.q as u64));
        }
        Ok(FieldElement(value as u16))
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        (a.0 as u32) < self.q
    }

    /// Characteristic-2 addition: XOR of polynomial representations.
    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(a.0 ^ b.0)
    }

    /// Subtraction coincides with addition in characteristic 2.
    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, b)
    }

    /// Polynomial product reduced modulo the reduction polynomial.
    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let la = self.log[a.0 as usize] as usize;
        let lb = self.log[b.0 as usize] as usize;
        FieldElement(self.exp[la + lb])
    }

    /// Multiplicative inverse; zero is a domain error.
    #[inline]
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, GfError> {
        if a.0 == 0 {
            return Err(GfError::ZeroInverse);
        }
        let order = (self.q - 1) as usize;
        let la = self.log[a.0 as usize] as usize;
        Ok(FieldElement(self.exp[order - la]))
    }

    /// `a / b`; division by zero is a domain error.
    #[inline]
    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, GfError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Uniform draw over the whole field, zero included.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(0..self.q) as u16)
    }

    /// Uniform draw over the nonzero elements `[1, q)`.
    pub fn sample_uniform_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(1..self.q) as u16)
    }

    /// Draw from the mixed law: 0 with probability `p`, otherwise uniform
    /// over the nonzero elements.
    pub fn sample_omega<R: Rng + ?Sized>(&self, p: f64, rng: &mut R) -> FieldElement {
        debug_assert!((0.0..=1.0).contains(&p));
        if rng.gen_bool(p) {
            FieldElement::ZERO
        } else {
            self.sample_uniform_nonzero(rng)
        }
    }
}

fn degree_for_size(q: u32) -> Result<u32, GfError> {
    if !(2..=65536).contains(&q) || !q.is_power_of_two() {
        return Err(GfError::BadFieldSize(q as u64));
    }
    Ok(q.trailing_zeros())
}

/// Carry-less multiply of two field elements followed by reduction, used
/// only while building tables (hot-path multiplies go through the tables).
fn carryless_mul_mod(a: u32, b: u32, poly: u64, degree: u32) -> u32 {
    let mut acc: u64 = 0;
    let mut a = a as u64;
    let mut b = b as u64;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        a <<= 1;
        b >>= 1;
    }
    // Reduce from degree 2m-2 down below m.
    let mut bit = 64 - acc.leading_zeros();
    while acc != 0 && bit > degree {
        acc ^= poly << (bit - 1 - degree);
        bit = 64 - acc.leading_zeros();
    }
    acc as u32
}

fn generates_group(g: u32, q: u32, poly: u64) -> bool {
    if g == 0 {
        return false;
    }
    let degree = q.trailing_zeros();
    let order = q - 1;
    let mut acc = 1u32;
    for step in 1..=order {
        acc = carryless_mul_mod(acc, g, poly, degree);
        if acc == 1 {
            return step == order;
        }
    }
    false
}

/// Remainder of `a mod m` over GF(2).
fn poly_rem(a: u64, m: u64) -> u64 {
    let md = 63 - m.leading_zeros();
    let mut a = a;
    while a != 0 {
        let ad = 63 - a.leading_zeros();
        if ad < md {
            break;
        }
        a ^= m << (ad - md);
    }
    a
}

/// Exhaustive trial division: irreducible iff no factor of degree
/// `1..=deg/2` divides the polynomial. Cheap for degrees up to 16.
fn poly_is_irreducible(poly: u64) -> bool {
    let degree = 63 - poly.leading_zeros();
    if degree == 0 {
        return false;
    }
    if degree == 1 {
        return true;
    }
    for d in 1..=degree / 2 {
        for f in (1u64 << d)..(1u64 << (d + 1)) {
            if poly_rem(poly, f) == 0 {
                return false;
            }
        }
    }
    true
}
