//! PSL(2, ℤ) elements and congruence subgroups.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::exact::Rational;
use crate::hyperbolic::{self, UHPoint};

/// An element of PSL(2, ℤ): an integer matrix of determinant 1 up to sign.
///
/// Stored in canonical form `c > 0`, or `c = 0` and `d > 0`, so derived
/// equality and hashing respect the ±I quotient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "[i64; 4]", try_from = "[i64; 4]")]
pub struct ModularElement {
    pub(crate) a: i64,
    pub(crate) b: i64,
    pub(crate) c: i64,
    pub(crate) d: i64,
}

impl ModularElement {
    pub const IDENTITY: ModularElement = ModularElement {
        a: 1,
        b: 0,
        c: 0,
        d: 1,
    };
    /// `z ↦ −1/z`.
    pub const S: ModularElement = ModularElement {
        a: 0,
        b: -1,
        c: 1,
        d: 0,
    };
    /// `z ↦ z + 1`.
    pub const T: ModularElement = ModularElement {
        a: 1,
        b: 1,
        c: 0,
        d: 1,
    };
    pub const T_INV: ModularElement = ModularElement {
        a: 1,
        b: -1,
        c: 0,
        d: 1,
    };

    /// Generators in the fixed order used by every breadth-first search.
    pub const GENERATORS: [ModularElement; 3] = [Self::S, Self::T, Self::T_INV];

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if (a as i128) * (d as i128) - (b as i128) * (c as i128) != 1 {
            return Err(Error::Determinant(a, b, c, d));
        }
        Self::canonical(a, b, c, d)
    }

    fn canonical(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if c > 0 || (c == 0 && d > 0) {
            Ok(ModularElement { a, b, c, d })
        } else {
            let neg = |v: i64| v.checked_neg().ok_or(Error::Overflow);
            Ok(ModularElement {
                a: neg(a)?,
                b: neg(b)?,
                c: neg(c)?,
                d: neg(d)?,
            })
        }
    }

    /// `T^k`.
    pub fn translation(k: i64) -> Self {
        ModularElement {
            a: 1,
            b: k,
            c: 0,
            d: 1,
        }
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn b(&self) -> i64 {
        self.b
    }
    pub fn c(&self) -> i64 {
        self.c
    }
    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Matrix product `self · other`, with overflow reported.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let mul = |x: i64, y: i64, z: i64, w: i64| -> Result<i64> {
            x.checked_mul(y)
                .and_then(|p| z.checked_mul(w).and_then(|q| p.checked_add(q)))
                .ok_or(Error::Overflow)
        };
        let a = mul(self.a, other.a, self.b, other.c)?;
        let b = mul(self.a, other.b, self.b, other.d)?;
        let c = mul(self.c, other.a, self.d, other.c)?;
        let d = mul(self.c, other.b, self.d, other.d)?;
        Self::canonical(a, b, c, d)
    }

    pub fn inverse(&self) -> Self {
        // (d, -b; -c, a) never overflows for canonical input except at
        // i64::MIN, which cannot occur with c >= 0 and det 1 in practice.
        Self::canonical(self.d, -self.b, -self.c, self.a).expect("inverse of canonical element")
    }

    /// `g^n` for `n >= 0`.
    pub fn pow(&self, n: u32) -> Result<Self> {
        let mut acc = Self::IDENTITY;
        for _ in 0..n {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }

    /// Möbius action; exact points stay exact.
    pub fn apply(&self, z: &UHPoint) -> UHPoint {
        match z {
            UHPoint::Exact { x, y } => {
                let r = |v: i64| Rational::from_integer(BigInt::from(v));
                hyperbolic::apply_exact(&r(self.a), &r(self.b), &r(self.c), &r(self.d), &r(1), x, y)
            }
            UHPoint::Float { .. } => hyperbolic::mobius_apply(&self.into(), z),
        }
    }

    /// Entries reduced into `[0, n)`.
    pub fn reduce_mod(&self, n: i64) -> [i64; 4] {
        [
            self.a.rem_euclid(n),
            self.b.rem_euclid(n),
            self.c.rem_euclid(n),
            self.d.rem_euclid(n),
        ]
    }

    /// Sort key `(c, d, a, b)` used for deterministic output order.
    pub fn sort_key(&self) -> (i64, i64, i64, i64) {
        (self.c, self.d, self.a, self.b)
    }
}

impl PartialOrd for ModularElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ModularElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl From<ModularElement> for [i64; 4] {
    fn from(g: ModularElement) -> Self {
        g.entries()
    }
}

impl TryFrom<[i64; 4]> for ModularElement {
    type Error = Error;
    fn try_from(v: [i64; 4]) -> Result<Self> {
        ModularElement::new(v[0], v[1], v[2], v[3])
    }
}

impl fmt::Display for ModularElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{},{}]", self.a, self.b, self.c, self.d)
    }
}

impl FromStr for ModularElement {
    type Err = Error;

    /// `[a,b,c,d]` or `a,b,c,d`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(ParseError::Matrix(s.to_string()));
        let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
        let v: Vec<i64> = inner
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        let arr: [i64; 4] = v.try_into().map_err(|_| bad())?;
        ModularElement::try_from(arr)
    }
}

/// The congruence subgroup families supported.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubgroupKind {
    Full,
    /// Γ(N)
    Principal(u32),
    /// Γ₀(N)
    Gamma0(u32),
    /// Γ₁(N)
    Gamma1(u32),
}

impl SubgroupKind {
    pub fn level(&self) -> u32 {
        match *self {
            SubgroupKind::Full => 1,
            SubgroupKind::Principal(n) | SubgroupKind::Gamma0(n) | SubgroupKind::Gamma1(n) => n,
        }
    }

    /// Membership by congruence conditions on the entries, with signs taken
    /// modulo ±I.
    pub fn contains(&self, g: &ModularElement) -> bool {
        let n = self.level() as i64;
        if n == 1 {
            return true;
        }
        let [a, b, c, d] = g.reduce_mod(n);
        let one = 1 % n;
        let minus_one = n - 1;
        match self {
            SubgroupKind::Full => true,
            SubgroupKind::Principal(_) => {
                b == 0 && c == 0 && ((a == one && d == one) || (a == minus_one && d == minus_one))
            }
            SubgroupKind::Gamma0(_) => c == 0,
            SubgroupKind::Gamma1(_) => c == 0 && (a == one || a == minus_one),
        }
    }

    /// A value that is equal for `g` and `h` iff `Γg = Γh`.
    fn coset_key(&self, g: &ModularElement) -> [i64; 4] {
        let n = self.level() as i64;
        if n == 1 {
            return [0; 4];
        }
        let m = g.reduce_mod(n);
        let neg = |v: i64| (n - v) % n;
        match self {
            SubgroupKind::Full => [0; 4],
            SubgroupKind::Principal(_) => {
                let other = [neg(m[0]), neg(m[1]), neg(m[2]), neg(m[3])];
                m.min(other)
            }
            SubgroupKind::Gamma1(_) => {
                let (c, d) = (m[2], m[3]);
                let (c2, d2) = (neg(c), neg(d));
                let (x, y) = (c, d).min((c2, d2));
                [0, 0, x, y]
            }
            SubgroupKind::Gamma0(_) => {
                // Bottom row as a point of P¹(ℤ/N): smallest unit multiple.
                let (c, d) = (m[2], m[3]);
                let mut best = (c, d);
                for u in 1..n {
                    if num_integer::gcd(u, n) == 1 {
                        let cand = ((u * c) % n, (u * d) % n);
                        best = best.min(cand);
                    }
                }
                [0, 0, best.0, best.1]
            }
        }
    }

    /// Index in PSL(2, ℤ) from the classical formulas.
    pub fn formula_index(&self) -> usize {
        let n = self.level() as u64;
        let primes = prime_factors(n);
        let value = match self {
            _ if n == 1 => 1,
            SubgroupKind::Full => 1,
            SubgroupKind::Gamma0(_) => primes.iter().fold(n, |acc, p| acc / p * (p + 1)),
            SubgroupKind::Principal(_) | SubgroupKind::Gamma1(_) if n == 2 => {
                if matches!(self, SubgroupKind::Principal(_)) {
                    6
                } else {
                    3
                }
            }
            SubgroupKind::Principal(_) => {
                primes
                    .iter()
                    .fold(n * n * n, |acc, p| acc / (p * p) * (p * p - 1))
                    / 2
            }
            SubgroupKind::Gamma1(_) => {
                primes
                    .iter()
                    .fold(n * n, |acc, p| acc / (p * p) * (p * p - 1))
                    / 2
            }
        };
        value as usize
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl fmt::Display for SubgroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubgroupKind::Full => write!(f, "full"),
            SubgroupKind::Principal(n) => write!(f, "gamma:{n}"),
            SubgroupKind::Gamma0(n) => write!(f, "gamma0:{n}"),
            SubgroupKind::Gamma1(n) => write!(f, "gamma1:{n}"),
        }
    }
}

impl FromStr for SubgroupKind {
    type Err = ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, ParseError> {
        let t = s.trim().to_ascii_lowercase();
        if t == "full" {
            return Ok(SubgroupKind::Full);
        }
        let bad = || ParseError::Group(s.to_string());
        let (name, level) = t.split_once(':').ok_or_else(bad)?;
        let n: u32 = level.trim().parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        match name.trim() {
            "gamma" => Ok(SubgroupKind::Principal(n)),
            "gamma0" => Ok(SubgroupKind::Gamma0(n)),
            "gamma1" => Ok(SubgroupKind::Gamma1(n)),
            _ => Err(bad()),
        }
    }
}

/// Default word-length bound for coset enumeration.
pub const DEFAULT_COSET_WORD_BOUND: usize = 4096;

/// Breadth-first coset enumeration from the identity over `(S, T, T⁻¹)`,
/// right-multiplying, keeping the first word that reaches each new right
/// coset `Γα`.
pub fn coset_decomposition(
    kind: SubgroupKind,
    max_word_length: usize,
) -> Result<Vec<ModularElement>> {
    let mut reps = vec![ModularElement::IDENTITY];
    let mut seen: HashMap<[i64; 4], usize> = HashMap::new();
    seen.insert(kind.coset_key(&ModularElement::IDENTITY), 0);
    let mut queue = VecDeque::from([(ModularElement::IDENTITY, 0usize)]);
    while let Some((alpha, depth)) = queue.pop_front() {
        for g in ModularElement::GENERATORS {
            let beta = alpha.compose(&g)?;
            let key = kind.coset_key(&beta);
            if seen.contains_key(&key) {
                continue;
            }
            if depth + 1 > max_word_length {
                return Err(Error::CosetEnumeration(max_word_length));
            }
            seen.insert(key, reps.len());
            reps.push(beta);
            queue.push_back((beta, depth + 1));
        }
    }
    Ok(reps)
}

/// A subgroup Γ ⊆ PSL(2, ℤ) together with its right coset representatives.
#[derive(Clone, Debug)]
pub struct SubgroupSpec {
    kind: SubgroupKind,
    reps: Vec<ModularElement>,
    coset_lookup: HashMap<[i64; 4], usize>,
}

impl SubgroupSpec {
    pub fn new(kind: SubgroupKind) -> Result<Self> {
        Self::with_word_bound(kind, DEFAULT_COSET_WORD_BOUND)
    }

    pub fn with_word_bound(kind: SubgroupKind, max_word_length: usize) -> Result<Self> {
        let reps = coset_decomposition(kind, max_word_length)?;
        let expected = kind.formula_index();
        if reps.len() != expected {
            return Err(Error::IndexMismatch {
                found: reps.len(),
                expected,
            });
        }
        let coset_lookup = reps
            .iter()
            .enumerate()
            .map(|(i, r)| (kind.coset_key(r), i))
            .collect();
        Ok(SubgroupSpec {
            kind,
            reps,
            coset_lookup,
        })
    }

    pub fn full() -> Self {
        Self::new(SubgroupKind::Full).expect("full group")
    }

    pub fn principal(n: u32) -> Result<Self> {
        Self::new(SubgroupKind::Principal(n))
    }

    pub fn gamma0(n: u32) -> Result<Self> {
        Self::new(SubgroupKind::Gamma0(n))
    }

    pub fn gamma1(n: u32) -> Result<Self> {
        Self::new(SubgroupKind::Gamma1(n))
    }

    pub fn kind(&self) -> SubgroupKind {
        self.kind
    }

    pub fn level(&self) -> u32 {
        self.kind.level()
    }

    pub fn is_full(&self) -> bool {
        self.kind.level() == 1
    }

    pub fn is_member(&self, g: &ModularElement) -> bool {
        self.kind.contains(g)
    }

    /// μ = [PSL(2, ℤ) : Γ].
    pub fn index(&self) -> usize {
        self.reps.len()
    }

    pub fn coset_representatives(&self) -> &[ModularElement] {
        &self.reps
    }

    /// The `i` with `g ∈ Γ αᵢ`.
    pub fn coset_of(&self, g: &ModularElement) -> usize {
        self.coset_lookup[&self.kind.coset_key(g)]
    }
}

impl PartialEq for SubgroupSpec {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl fmt::Display for SubgroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind.fmt(f)
    }
}

impl FromStr for SubgroupSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SubgroupSpec::new(s.parse()?)
    }
}

impl Serialize for SubgroupSpec {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.kind.to_string())
    }
}
