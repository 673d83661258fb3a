use crate::error::{Error, Result};
use crate::matrix::{gf2_row_reduce, ParityCheckMatrix};

/// Largest code length accepted by [`min_distance_bruteforce`].
pub const MAX_BRUTEFORCE_LENGTH: usize = 28;

/// Minimum Hamming weight of a nonzero codeword, `None` for the zero code.
///
/// Enumerates all combinations of a null-space basis in Gray-code order.
pub fn min_distance_bruteforce(h: &ParityCheckMatrix) -> Result<Option<usize>> {
    let n = h.n();
    if n > MAX_BRUTEFORCE_LENGTH {
        return Err(Error::param(format!(
            "code length {n} exceeds brute-force limit {MAX_BRUTEFORCE_LENGTH}"
        )));
    }
    let mut rows: Vec<Vec<u64>> = h
        .rows()
        .iter()
        .map(|cs| vec![cs.iter().fold(0u64, |acc, &c| acc | 1 << c)])
        .collect();
    let pivots = gf2_row_reduce(&mut rows, n);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    if free.is_empty() {
        return Ok(None);
    }
    // basis vector for free column f: x_f = 1 and each pivot variable set
    // from its reduced row
    let basis: Vec<u32> = free
        .iter()
        .map(|&f| {
            let mut word = 1u32 << f;
            for (row, &pc) in rows.iter().zip(&pivots) {
                if row[0] >> f & 1 == 1 {
                    word |= 1 << pc;
                }
            }
            word
        })
        .collect();
    let k = basis.len();
    let mut word = 0u32;
    let mut best = usize::MAX;
    for i in 1u64..(1u64 << k) {
        word ^= basis[i.trailing_zeros() as usize];
        best = best.min(word.count_ones() as usize);
    }
    Ok(Some(best))
}
