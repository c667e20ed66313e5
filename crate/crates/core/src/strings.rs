//! Finite strings over small alphabets, integer codes and block encoding.
//!
//! Strings are plain `Vec<u8>` / `&[u8]` of symbol values `0..|X|`. Binary
//! strings use the symbols 0 and 1.

use crate::error::{LabError, Result};

/// Parses a string of hex digits (`0-9a-f`) into symbols. `""` and `"ε"` are
/// the empty string.
pub fn parse(s: &str) -> Result<Vec<u8>> {
    if s == "ε" {
        return Ok(Vec::new());
    }
    s.chars()
        .map(|c| {
            c.to_digit(16)
                .map(|d| d as u8)
                .ok_or_else(|| LabError::InvalidArgument(format!("bad symbol {c:?} in {s:?}")))
        })
        .collect()
}

/// Like [`parse`] but restricted to `0`/`1`.
pub fn parse_bits(s: &str) -> Result<Vec<u8>> {
    let v = parse(s)?;
    if v.iter().any(|&b| b > 1) {
        return Err(LabError::InvalidArgument(format!("not a binary string: {s:?}")));
    }
    Ok(v)
}

pub fn show(x: &[u8]) -> String {
    x.iter()
        .map(|&s| char::from_digit(s as u32, 16).expect("symbol below 16"))
        .collect()
}

/// `a` is a (not necessarily proper) prefix of `b`.
pub fn is_prefix(a: &[u8], b: &[u8]) -> bool {
    a.len() <= b.len() && b[..a.len()] == *a
}

pub fn comparable(a: &[u8], b: &[u8]) -> bool {
    is_prefix(a, b) || is_prefix(b, a)
}

/// True iff no element is a proper prefix of another.
pub fn is_prefix_free<S: AsRef<[u8]>>(set: &[S]) -> bool {
    let mut sorted: Vec<&[u8]> = set.iter().map(AsRef::as_ref).collect();
    sorted.sort();
    sorted.dedup();
    // In lexicographic order a prefix is immediately followed by one of its extensions.
    sorted.windows(2).all(|w| !is_prefix(w[0], w[1]))
}

/// 0, -1, 1, -2, 2, ... -> 0, 1, 2, 3, 4, ...
pub fn zigzag(n: i64) -> u64 {
    ((n << 1) ^ (n >> 63)) as u64
}

pub fn unzigzag(z: u64) -> i64 {
    ((z >> 1) as i64) ^ -((z & 1) as i64)
}

/// Bijective binary code of a natural number: binary of `n + 1` with the
/// leading one removed (0 -> ε, 1 -> 0, 2 -> 1, 3 -> 00, ...).
pub fn nat_code(n: u64) -> Vec<u8> {
    let m = n as u128 + 1;
    let width = 128 - m.leading_zeros() as usize;
    (0..width - 1)
        .rev()
        .map(|i| ((m >> i) & 1) as u8)
        .collect()
}

pub fn nat_decode(bits: &[u8]) -> u64 {
    let m = bits.iter().fold(1u128, |acc, &b| (acc << 1) | b as u128);
    (m - 1) as u64
}

/// Code of a signed integer: zig-zag, then [`nat_code`].
pub fn int_code(n: i64) -> Vec<u8> {
    nat_code(zigzag(n))
}

/// `⌈log2 |X|⌉`, the block width used to feed `|X|`-ary strings to binary machines.
pub fn bits_per_symbol(alphabet: usize) -> usize {
    assert!(alphabet >= 2, "alphabet must have at least two symbols");
    (usize::BITS - (alphabet - 1).leading_zeros()) as usize
}

pub fn encode_blocks(x: &[u8], alphabet: usize) -> Vec<u8> {
    let w = bits_per_symbol(alphabet);
    x.iter()
        .flat_map(|&s| (0..w).rev().map(move |i| (s >> i) & 1))
        .collect()
}

/// Decodes complete blocks; a trailing partial block is returned separately.
pub fn decode_blocks(bits: &[u8], alphabet: usize) -> (Vec<u8>, &[u8]) {
    let w = bits_per_symbol(alphabet);
    let full = bits.len() / w * w;
    let symbols = bits[..full]
        .chunks(w)
        .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | b))
        .collect();
    (symbols, &bits[full..])
}

/// All strings of length `n` over `alphabet` in lexicographic order.
pub fn all_strings(alphabet: usize, n: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|s| {
                (0..alphabet as u8).map(move |a| {
                    let mut t = s.clone();
                    t.push(a);
                    t
                })
            })
            .collect();
    }
    out
}

/// All strings of length `0..=n`, shortest first.
pub fn all_strings_upto(alphabet: usize, n: usize) -> Vec<Vec<u8>> {
    (0..=n).flat_map(|k| all_strings(alphabet, k)).collect()
}
