//! The post-encryption linear transforms and their F2 matrices.
//!
//! In-place variants return the number of block XORs they performed.

use crate::block::{xor_all, Block};
use crate::error::{Error, Result};
use crate::matrix::BitMatrix;

/// `C'_i = C_{i-1} ⊕ C_i` for `i = 1..c-1`.
pub fn ssake_chain(blocks: &[Block]) -> Result<Vec<Block>> {
    let mut buf = blocks.to_vec();
    ssake_chain_in_place(&mut buf)?;
    buf.remove(0);
    Ok(buf)
}

/// Chain in place: on exit `buf[1..]` holds `C'` and `buf[0]` still holds `C_0`.
pub fn ssake_chain_in_place(buf: &mut [Block]) -> Result<u64> {
    let c = buf.len();
    if c < 2 {
        return Err(Error::contract(format!("chaining needs c >= 2 blocks, got {c}")));
    }
    // backwards so each step still reads the original C_{i-1}
    for i in (1..c).rev() {
        let prev = buf[i - 1];
        buf[i] ^= prev;
    }
    Ok(c as u64 - 1)
}

/// Inverse of [`ssake_chain`] given `C_0`.
pub fn ssake_unchain(c0: Block, chained: &[Block]) -> Vec<Block> {
    let mut buf = Vec::with_capacity(chained.len() + 1);
    buf.push(c0);
    buf.extend_from_slice(chained);
    ssake_unchain_in_place(&mut buf);
    buf
}

/// `buf[0]` must hold `C_0` and `buf[1..]` the chained blocks.
pub fn ssake_unchain_in_place(buf: &mut [Block]) -> u64 {
    for i in 1..buf.len() {
        let prev = buf[i - 1];
        buf[i] ^= prev;
    }
    buf.len().saturating_sub(1) as u64
}

/// `out_i = T ⊕ C_i` with `T` the XOR of all blocks.
pub fn bastion_transform(blocks: &[Block]) -> Result<Vec<Block>> {
    let mut buf = blocks.to_vec();
    bastion_transform_in_place(&mut buf)?;
    Ok(buf)
}

/// Requires an even block count, where the transform is an involution.
pub fn bastion_transform_in_place(buf: &mut [Block]) -> Result<u64> {
    let c = buf.len();
    if c < 2 || !c.is_multiple_of(2) {
        return Err(Error::EvenLengthRequired { got: c });
    }
    let t = xor_all(buf);
    for b in buf.iter_mut() {
        *b ^= t;
    }
    Ok(2 * c as u64 - 1)
}

/// `c × (c-1)`: column `j` has ones in rows `j` and `j+1`.
pub fn mat_ssake(c: usize) -> Result<BitMatrix> {
    if c < 2 {
        return Err(Error::contract(format!("matrix needs c >= 2, got {c}")));
    }
    let mut m = BitMatrix::zeros(c, c - 1);
    for j in 0..c - 1 {
        m.set(j, j, true);
        m.set(j + 1, j, true);
    }
    Ok(m)
}

/// `c × c` with zero diagonal and ones elsewhere.
pub fn mat_bastion(c: usize) -> Result<BitMatrix> {
    if c < 2 {
        return Err(Error::contract(format!("matrix needs c >= 2, got {c}")));
    }
    let mut m = BitMatrix::zeros(c, c);
    for i in 0..c {
        for j in 0..c {
            m.set(i, j, i != j);
        }
    }
    Ok(m)
}

/// Reduced form of the chain matrix: first row all ones, identity below.
/// Column `j` is `e_0 + e_{j+1}`, obtained by prefix-summing the columns.
pub fn ssake_reduced_view(c: usize) -> Result<BitMatrix> {
    if c < 2 {
        return Err(Error::contract(format!("matrix needs c >= 2, got {c}")));
    }
    let mut m = BitMatrix::zeros(c, c - 1);
    for j in 0..c - 1 {
        m.set(0, j, true);
        m.set(j + 1, j, true);
    }
    Ok(m)
}

/// Columns of [`mat_bastion`] visible to an adversary missing blocks `s` and `t`.
pub fn bastion_adversary_columns(c: usize, s: usize, t: usize) -> Result<BitMatrix> {
    check_pair(c, s, t)?;
    let cols: Vec<usize> = (0..c).filter(|&i| i != s && i != t).collect();
    mat_bastion(c)?.select_columns(&cols)
}

fn check_pair(c: usize, s: usize, t: usize) -> Result<()> {
    if c < 4 || s >= t || t >= c {
        return Err(Error::contract(format!(
            "need 0 <= s < t < c and c >= 4, got c={c}, s={s}, t={t}"
        )));
    }
    Ok(())
}

/// Smallest index outside `{s, t}`.
pub fn bastion_pivot(s: usize, t: usize) -> usize {
    (0..).find(|&u| u != s && u != t).expect("unbounded range")
}

/// The adversary's columns after the elimination around pivot `u`:
/// every other column `i` becomes `col_i + col_u = e_u + e_i`, then the
/// pivot column absorbs all of them. Columns stay in ascending index order.
///
/// For even `c` the pivot column is `e_s + e_t + e_u`; for odd `c` the
/// `e_u` term cancels and it is `e_s + e_t`.
pub fn bastion_reduced_view(c: usize, s: usize, t: usize) -> Result<BitMatrix> {
    let view = bastion_adversary_columns(c, s, t)?;
    let u = bastion_pivot(s, t);
    let idx: Vec<usize> = (0..c).filter(|&i| i != s && i != t).collect();
    let pu = idx.iter().position(|&i| i == u).expect("pivot is visible");
    let mut cols: Vec<Vec<u8>> = (0..view.cols()).map(|j| view.column(j)).collect();
    let pivot = cols[pu].clone();
    for (j, col) in cols.iter_mut().enumerate() {
        if j != pu {
            for (x, p) in col.iter_mut().zip(&pivot) {
                *x ^= p;
            }
        }
    }
    let mut acc = cols[pu].clone();
    for (j, col) in cols.iter().enumerate() {
        if j != pu {
            for (x, y) in acc.iter_mut().zip(col) {
                *x ^= y;
            }
        }
    }
    cols[pu] = acc;
    let rows: Vec<Vec<u8>> = (0..c).map(|i| cols.iter().map(|col| col[i]).collect()).collect();
    BitMatrix::from_rows(&rows)
}
