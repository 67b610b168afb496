use serde::Serialize;

use super::{GroupError, Presentation};
use crate::braid::{BraidWord, FreeWord};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZvkPresentation {
    pub presentation: Presentation,
    /// Relators emitted before cleanup (including trivial ones).
    pub raw_count: usize,
    /// Indices into the relator list of the relators for `m_d`, which
    /// follow from the others because the descending product is fixed.
    pub redundant: Vec<usize>,
}

/// Generators `m_1, ..., m_d`; relators `m_i^-1 beta(m_i)` for each braid and
/// each `i`, plus `(m_d ... m_1)^N` when a central exponent is given.
pub fn zvk_presentation(braids: &[BraidWord], d: usize, central_exponent: Option<u32>) -> Result<ZvkPresentation, GroupError> {
    let names: Vec<String> = (1..=d).map(|i| format!("m{i}")).collect();
    let mut relators = Vec::new();
    let mut redundant_raw = Vec::new();
    let mut raw_count = 0;
    for b in braids {
        if b.strands() != d {
            return Err(GroupError::StrandMismatch { expected: d, found: b.strands() });
        }
        let images = b.automorphism();
        for (i, img) in images.iter().enumerate() {
            let g = FreeWord::generator(d, i + 1).unwrap();
            raw_count += 1;
            if i + 1 == d {
                redundant_raw.push(relators.len());
            }
            relators.push(g.inverse().mul(img));
        }
    }
    if let Some(n) = central_exponent {
        raw_count += 1;
        relators.push(FreeWord::descending_product(d).pow(n as i64));
    }
    // track where the flagged relators land once trivial ones are dropped
    let mut redundant = Vec::new();
    let mut kept = 0;
    for (i, r) in relators.iter().enumerate() {
        if r.cyclically_reduced().is_empty() {
            continue;
        }
        if redundant_raw.contains(&i) {
            redundant.push(kept);
        }
        kept += 1;
    }
    Ok(ZvkPresentation { presentation: Presentation::new(names, relators), raw_count, redundant })
}
