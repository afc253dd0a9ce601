//! Random linear network coding: packet construction and decoding.
//!
//! A [`Generation`] is the set of k original packets combined in one
//! time span. Coded packets carry their encoding vector; the receiver
//! accumulates them in a [`Decoder`] that keeps the coefficient rows in
//! reduced row-echelon form, so rank is available incrementally and the
//! originals fall out once the matrix reaches full rank. Both the
//! downlink flavor (one source, coefficients over the whole field) and
//! the uplink flavor (coefficient zero exactly where a relay is missing
//! a packet) are built here.

use crate::gf::{FieldContext, FieldElement};
use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RlncError {
    #[error("generation must contain at least one packet")]
    EmptyGeneration,
    #[error("payload length {found} does not match generation symbol length {expected}")]
    UnevenPayloads { expected: usize, found: usize },
    #[error("payload symbol {0} does not fit in the field")]
    SymbolOutOfField(u16),
    #[error("coefficient vector length {found} does not match decoder dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("decoder rank {rank} of {dim} is not yet full")]
    NotDecodable { rank: usize, dim: usize },
    #[error("no packets received: nothing to send")]
    NothingToSend,
    #[error("received-mask length {mask} does not match payload count {payloads}")]
    MaskMismatch { mask: usize, payloads: usize },
}

/// The k equal-length original packets of one time span.
#[derive(Debug, Clone)]
pub struct Generation {
    packets: Vec<Vec<FieldElement>>,
}

impl Generation {
    /// Packets must be non-empty and of equal symbol length (pad callers'
    /// short tails with zeros before constructing).
    pub fn new(field: &FieldContext, packets: Vec<Vec<FieldElement>>) -> Result<Self, RlncError> {
        if packets.is_empty() {
            return Err(RlncError::EmptyGeneration);
        }
        let len = packets[0].len();
        for p in &packets {
            if p.len() != len {
                return Err(RlncError::UnevenPayloads {
                    expected: len,
                    found: p.len(),
                });
            }
            for &s in p {
                if !field.contains(s) {
                    return Err(RlncError::SymbolOutOfField(s.value()));
                }
            }
        }
        Ok(Generation { packets })
    }

    /// Split a byte stream into `k` equal payloads, one symbol per byte,
    /// zero-padded at the tail. Requires a field of size >= 256.
    pub fn from_bytes(field: &FieldContext, data: &[u8], k: usize) -> Result<Self, RlncError> {
        if k == 0 {
            return Err(RlncError::EmptyGeneration);
        }
        if field.size() < 256 {
            return Err(RlncError::SymbolOutOfField(255));
        }
        let per = data.len().div_ceil(k).max(1);
        let packets = (0..k)
            .map(|i| {
                let mut payload = vec![FieldElement::ZERO; per];
                for (j, slot) in payload.iter_mut().enumerate() {
                    if let Some(&b) = data.get(i * per + j) {
                        *slot = FieldElement(b as u16);
                    }
                }
                payload
            })
            .collect();
        Ok(Generation { packets })
    }

    pub fn size(&self) -> usize {
        self.packets.len()
    }

    pub fn symbol_len(&self) -> usize {
        self.packets[0].len()
    }

    pub fn packets(&self) -> &[Vec<FieldElement>] {
        &self.packets
    }
}

/// An encoding vector together with the combined payload it describes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedPacket {
    pub coeffs: Vec<FieldElement>,
    pub payload: Vec<FieldElement>,
}

/// Combine packets under the given coefficients: sum of c_i * P_i.
fn combine(
    field: &FieldContext,
    coeffs: &[FieldElement],
    packets: &[Vec<FieldElement>],
    symbol_len: usize,
) -> Vec<FieldElement> {
    let mut payload = vec![FieldElement::ZERO; symbol_len];
    for (c, packet) in coeffs.iter().zip(packets) {
        if c.is_zero() {
            continue;
        }
        for (out, &s) in payload.iter_mut().zip(packet.iter()) {
            *out = field.add(*out, field.mul(*c, s));
        }
    }
    payload
}

/// Downlink (intra-session) coded packet: coefficients drawn i.i.d.
/// uniform over the whole field. An all-zero draw would waste a slot,
/// so it is discarded and redrawn.
pub fn encode_intra<R: Rng + ?Sized>(
    field: &FieldContext,
    gen: &Generation,
    rng: &mut R,
) -> CodedPacket {
    let k = gen.size();
    let mut coeffs = vec![FieldElement::ZERO; k];
    loop {
        for c in coeffs.iter_mut() {
            *c = field.sample_uniform(rng);
        }
        if coeffs.iter().any(|c| !c.is_zero()) {
            break;
        }
    }
    let payload = combine(field, &coeffs, gen.packets(), gen.symbol_len());
    CodedPacket { coeffs, payload }
}

/// Uplink (inter-session) coded packet built at a relay: coefficient 0
/// for every source whose packet the relay is missing, uniform nonzero
/// for the rest. An empty mask means the relay has nothing to send.
pub fn encode_inter<R: Rng + ?Sized>(
    field: &FieldContext,
    received_mask: &[bool],
    payloads: &[Option<Vec<FieldElement>>],
    rng: &mut R,
) -> Result<CodedPacket, RlncError> {
    if received_mask.len() != payloads.len() {
        return Err(RlncError::MaskMismatch {
            mask: received_mask.len(),
            payloads: payloads.len(),
        });
    }
    if !received_mask.iter().any(|&m| m) {
        return Err(RlncError::NothingToSend);
    }
    let symbol_len = payloads
        .iter()
        .flatten()
        .map(|p| p.len())
        .next()
        .unwrap_or(0);
    let coeffs: Vec<FieldElement> = received_mask
        .iter()
        .map(|&held| {
            if held {
                field.sample_uniform_nonzero(rng)
            } else {
                FieldElement::ZERO
            }
        })
        .collect();
    let mut payload = vec![FieldElement::ZERO; symbol_len];
    for (c, maybe) in coeffs.iter().zip(payloads) {
        if let Some(p) = maybe {
            for (out, &s) in payload.iter_mut().zip(p.iter()) {
                *out = field.add(*out, field.mul(*c, s));
            }
        }
    }
    Ok(CodedPacket { coeffs, payload })
}

struct Row {
    pivot: usize,
    coeffs: Vec<FieldElement>,
    payload: Vec<FieldElement>,
}

/// Accumulates coded packets and tracks the rank of the transfer matrix.
///
/// Rows are kept in reduced row-echelon form sorted by pivot column, so
/// `add` answers "was that packet innovative?" in O(dim^2) and `extract`
/// is a read-off once rank reaches the dimension.
pub struct Decoder<'f> {
    field: &'f FieldContext,
    dim: usize,
    rows: Vec<Row>,
}

impl<'f> Decoder<'f> {
    pub fn new(field: &'f FieldContext, dim: usize) -> Self {
        Decoder {
            field,
            dim,
            rows: Vec::with_capacity(dim),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    /// Current rank of the accumulated transfer matrix.
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_complete(&self) -> bool {
        self.rows.len() == self.dim
    }

    /// Reduce a coefficient vector against the current rows. Returns the
    /// remainder (all-zero iff the vector lies in the row space).
    fn reduce(
        &self,
        coeffs: &[FieldElement],
        payload: &[FieldElement],
    ) -> (Vec<FieldElement>, Vec<FieldElement>) {
        let f = self.field;
        let mut c = coeffs.to_vec();
        let mut p = payload.to_vec();
        for row in &self.rows {
            let factor = c[row.pivot];
            if factor.is_zero() {
                continue;
            }
            for (ci, ri) in c.iter_mut().zip(&row.coeffs) {
                *ci = f.add(*ci, f.mul(factor, *ri));
            }
            for (pi, ri) in p.iter_mut().zip(&row.payload) {
                *pi = f.add(*pi, f.mul(factor, *ri));
            }
        }
        (c, p)
    }

    /// Would this coefficient vector increase the rank?
    pub fn is_innovative(&self, coeffs: &[FieldElement]) -> bool {
        if self.is_complete() {
            return false;
        }
        let (reduced, _) = self.reduce(coeffs, &[]);
        reduced.iter().any(|c| !c.is_zero())
    }

    pub fn add(&mut self, pkt: &CodedPacket) -> Result<bool, RlncError> {
        self.add_row(&pkt.coeffs, &pkt.payload)
    }

    /// Fold one coded packet in. Returns true iff the rank increased.
    pub fn add_row(
        &mut self,
        coeffs: &[FieldElement],
        payload: &[FieldElement],
    ) -> Result<bool, RlncError> {
        if coeffs.len() != self.dim {
            return Err(RlncError::DimensionMismatch {
                expected: self.dim,
                found: coeffs.len(),
            });
        }
        let f = self.field;
        let (mut c, mut p) = self.reduce(coeffs, payload);
        let Some(pivot) = c.iter().position(|x| !x.is_zero()) else {
            return Ok(false); // linearly dependent
        };
        // Normalize so the pivot is 1, then clear that column above.
        let inv = f.inv(c[pivot]).expect("pivot is nonzero");
        for x in c.iter_mut() {
            *x = f.mul(*x, inv);
        }
        for x in p.iter_mut() {
            *x = f.mul(*x, inv);
        }
        for row in self.rows.iter_mut() {
            let factor = row.coeffs[pivot];
            if factor.is_zero() {
                continue;
            }
            for (ri, ci) in row.coeffs.iter_mut().zip(&c) {
                *ri = f.add(*ri, f.mul(factor, *ci));
            }
            for (ri, pi) in row.payload.iter_mut().zip(&p) {
                *ri = f.add(*ri, f.mul(factor, *pi));
            }
        }
        let at = self.rows.partition_point(|r| r.pivot < pivot);
        self.rows.insert(
            at,
            Row {
                pivot,
                coeffs: c,
                payload: p,
            },
        );
        Ok(true)
    }

    /// Recover the original packets; requires full rank.
    pub fn extract(&self) -> Result<Vec<Vec<FieldElement>>, RlncError> {
        if !self.is_complete() {
            return Err(RlncError::NotDecodable {
                rank: self.rank(),
                dim: self.dim,
            });
        }
        // Full-rank RREF of a square system is the identity, so rows
        // sorted by pivot hold the originals directly.
        Ok(self.rows.iter().map(|r| r.payload.clone()).collect())
    }
}

/// Rank of a coefficient matrix over the field, by Gaussian elimination.
/// Standalone forward elimination, independent of the incremental
/// decoder path.
pub fn matrix_rank(field: &FieldContext, rows: &[Vec<FieldElement>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    debug_assert!(
        rows.iter().all(|r| r.len() == cols),
        "matrix must be rectangular"
    );
    let mut m: Vec<Vec<FieldElement>> = rows.to_vec();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot_row) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot_row);
        let inv = field.inv(m[rank][col]).expect("pivot is nonzero");
        for x in m[rank].clone().iter().enumerate() {
            m[rank][x.0] = field.mul(*x.1, inv);
        }
        let pivot = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == rank {
                continue;
            }
            let factor = row[col];
            if factor.is_zero() {
                continue;
            }
            for (x, &pv) in row.iter_mut().zip(&pivot) {
                *x = field.add(*x, field.mul(factor, pv));
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}
