//! Finite-field arithmetic for pilot-vector processing.
//!
//! Supports prime fields `F_p` (p <= 2^16) and binary extension fields
//! `GF(2^m)` (m <= 16). The default field used throughout the toolkit is
//! GF(2^8) with reduction polynomial x^8 + x^4 + x^3 + x + 1, so that one
//! field element fits in a single byte of a pilot packet.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// A field element, stored as its canonical representative in `[0, q)`.
pub type Element = u16;

/// A length-R coefficient vector carried forward through the network; the
/// i-th component is the coefficient applied to the i-th source symbol.
pub type PilotVector = Vec<Element>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GaloisError {
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("{0} is not a supported field order (need a prime or 2^m, 2 <= q <= 65536)")]
    BadOrder(u64),
}

/// Which finite field a run operates in. Fixed once per run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldSpec {
    /// Prime field F_p.
    Prime(u32),
    /// Binary extension field GF(2^m).
    Binary(u32),
}

/// Reduction polynomials for GF(2^m), m = 1..=16, indexed by m-1. Each is
/// irreducible over GF(2); m = 8 is x^8 + x^4 + x^3 + x + 1.
const REDUCTION_POLY: [u32; 16] = [
    0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x89, 0x11B, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443,
    0x8003, 0x1100B,
];

impl FieldSpec {
    /// Interpret an order as a field: powers of two become binary extension
    /// fields, primes become prime fields.
    pub fn from_order(q: u64) -> Result<FieldSpec, GaloisError> {
        if !(2..=65536).contains(&q) {
            return Err(GaloisError::BadOrder(q));
        }
        if q.is_power_of_two() {
            return Ok(FieldSpec::Binary(q.trailing_zeros()));
        }
        if is_prime(q as u32) {
            return Ok(FieldSpec::Prime(q as u32));
        }
        Err(GaloisError::BadOrder(q))
    }

    pub fn order(self) -> u32 {
        match self {
            FieldSpec::Prime(p) => p,
            FieldSpec::Binary(m) => 1 << m,
        }
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn distinct_prime_factors(mut n: u32) -> Vec<u32> {
    let mut factors = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            factors.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    factors
}

/// Arithmetic context for one field. Construction precomputes log/antilog
/// tables for small binary fields; all operations are pure and re-entrant.
#[derive(Debug, Clone)]
pub struct Field {
    spec: FieldSpec,
    order: u32,
    poly: u32,
    // log/exp tables, populated for binary fields with m <= 8
    log: Vec<u16>,
    exp: Vec<u16>,
}

impl Field {
    pub fn new(spec: FieldSpec) -> Field {
        let order = spec.order();
        let poly = match spec {
            FieldSpec::Binary(m) => {
                debug_assert!((1..=16).contains(&m));
                REDUCTION_POLY[(m - 1) as usize]
            }
            FieldSpec::Prime(_) => 0,
        };
        let mut field = Field {
            spec,
            order,
            poly,
            log: Vec::new(),
            exp: Vec::new(),
        };
        if let FieldSpec::Binary(m) = spec {
            if m <= 8 {
                field.build_tables();
            }
        }
        field
    }

    fn build_tables(&mut self) {
        let q = self.order as usize;
        let gen = self.find_generator();
        self.log = vec![0; q];
        self.exp = vec![0; q - 1];
        let mut x: Element = 1;
        for i in 0..q - 1 {
            self.exp[i] = x;
            self.log[x as usize] = i as u16;
            x = self.mul_generic(x, gen);
        }
        debug_assert_eq!(x, 1, "generator order mismatch");
    }

    /// Smallest primitive element of the multiplicative group.
    fn find_generator(&self) -> Element {
        let group = self.order - 1;
        if group == 1 {
            return 1;
        }
        let factors = distinct_prime_factors(group);
        'candidates: for g in 2..self.order {
            for &p in &factors {
                if self.pow_generic(g as Element, (group / p) as u64) == 1 {
                    continue 'candidates;
                }
            }
            return g as Element;
        }
        unreachable!("every finite field has a primitive element")
    }

    fn pow_generic(&self, base: Element, mut e: u64) -> Element {
        let mut acc = 1;
        let mut b = base;
        while e != 0 {
            if e & 1 != 0 {
                acc = self.mul_generic(acc, b);
            }
            b = self.mul_generic(b, b);
            e >>= 1;
        }
        acc
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn zero(&self) -> Element {
        0
    }

    pub fn one(&self) -> Element {
        1
    }

    pub fn add(&self, a: Element, b: Element) -> Element {
        match self.spec {
            FieldSpec::Binary(_) => a ^ b,
            FieldSpec::Prime(p) => ((a as u32 + b as u32) % p) as Element,
        }
    }

    pub fn sub(&self, a: Element, b: Element) -> Element {
        match self.spec {
            FieldSpec::Binary(_) => a ^ b,
            FieldSpec::Prime(p) => ((a as u32 + p - b as u32) % p) as Element,
        }
    }

    pub fn neg(&self, a: Element) -> Element {
        self.sub(0, a)
    }

    pub fn mul(&self, a: Element, b: Element) -> Element {
        match self.spec {
            FieldSpec::Binary(_) if !self.exp.is_empty() => {
                if a == 0 || b == 0 {
                    return 0;
                }
                let idx = self.log[a as usize] as u32 + self.log[b as usize] as u32;
                self.exp[(idx % (self.order - 1)) as usize]
            }
            FieldSpec::Binary(_) => self.mul_generic(a, b),
            FieldSpec::Prime(p) => ((a as u64 * b as u64) % p as u64) as Element,
        }
    }

    /// Shift-and-add polynomial multiplication with reduction. Reference
    /// path for the table-driven multiply.
    fn mul_generic(&self, a: Element, b: Element) -> Element {
        let m = match self.spec {
            FieldSpec::Binary(m) => m,
            FieldSpec::Prime(_) => unreachable!("generic multiply is for binary fields"),
        };
        let mut a = a as u32;
        let mut b = b as u32;
        let mut acc = 0u32;
        while b != 0 {
            if b & 1 != 0 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & (1 << m) != 0 {
                a ^= self.poly;
            }
        }
        acc as Element
    }

    pub fn inv(&self, a: Element) -> Result<Element, GaloisError> {
        if a == 0 {
            return Err(GaloisError::ZeroInverse);
        }
        match self.spec {
            FieldSpec::Binary(_) if !self.exp.is_empty() => {
                let l = self.log[a as usize] as u32;
                Ok(self.exp[((self.order - 1 - l) % (self.order - 1)) as usize])
            }
            _ => Ok(self.pow(a, self.order as u64 - 2)),
        }
    }

    fn pow(&self, base: Element, mut e: u64) -> Element {
        let mut acc = 1;
        let mut b = base;
        while e != 0 {
            if e & 1 != 0 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    /// Uniform draw over all q elements, zero included.
    pub fn rand_element(&self, rng: &mut impl Rng) -> Element {
        rng.random_range(0..self.order) as Element
    }

    /// Uniform draw over the q-1 nonzero elements. Used for the combination
    /// scalars of the forward evaluation phase.
    pub fn rand_nonzero(&self, rng: &mut impl Rng) -> Element {
        rng.random_range(1..self.order) as Element
    }

    /// Rank of a set of pilot vectors over this field. Vectors are consumed
    /// in arrival order; the pivot for each step is the first row with a
    /// nonzero leading column, lowest row index winning ties.
    pub fn rank(&self, vectors: &[PilotVector]) -> usize {
        if vectors.is_empty() {
            return 0;
        }
        let cols = vectors[0].len();
        let mut flat = Vec::with_capacity(vectors.len() * cols);
        for v in vectors {
            debug_assert_eq!(v.len(), cols, "pilot vectors must share a length");
            flat.extend_from_slice(v);
        }
        self.rank_rows(&mut flat, vectors.len(), cols)
    }

    /// In-place Gaussian elimination over a row-major matrix. Destroys the
    /// scratch contents.
    pub fn rank_rows(&self, data: &mut [Element], rows: usize, cols: usize) -> usize {
        debug_assert_eq!(data.len(), rows * cols);
        let mut rank = 0;
        for col in 0..cols {
            let mut pivot = None;
            for r in rank..rows {
                if data[r * cols + col] != 0 {
                    pivot = Some(r);
                    break;
                }
            }
            let Some(p) = pivot else { continue };
            if p != rank {
                for c in col..cols {
                    data.swap(rank * cols + c, p * cols + c);
                }
            }
            let inv = self
                .inv(data[rank * cols + col])
                .expect("pivot is nonzero");
            for r in rank + 1..rows {
                let lead = data[r * cols + col];
                if lead == 0 {
                    continue;
                }
                let factor = self.mul(lead, inv);
                for c in col..cols {
                    let s = self.mul(factor, data[rank * cols + c]);
                    data[r * cols + c] = self.sub(data[r * cols + c], s);
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        rank
    }
}

/// Derive a reproducible sub-seed from a master seed and a path of stream
/// identifiers. Stable across platforms and releases.
pub fn derive_seed(master_seed: u64, parts: &[u64]) -> u64 {
    let mut state = splitmix64(master_seed ^ 0x6A09_E667_F3BC_C908);
    for &p in parts {
        state = splitmix64(state ^ p.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    }
    state
}

/// An independently seeded random stream, e.g. one per protocol node.
pub fn stream_rng(master_seed: u64, parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master_seed, parts))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
