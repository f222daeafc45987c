//! Attribution of discovered relations to the known families.
//!
//! The tag index enumerates every family instance whose weight fits under
//! the search bound, closes the set under the Frobenius twists
//! (L, R) -> (p^e L, p^e R), and records both orientations, so that a
//! discovered pair can be looked up directly.

use std::collections::{BTreeSet, HashMap};

use crate::polyring::PolyRing;
use crate::powersum::Composition;
use crate::relations::{
    grid_conjecture, grid_f1, grid_f2, grid_f3, grid_f4, grid_main, grid_thm2, grid_thm3,
    Family, RelationInstance,
};

/// Proved-family instances over F_q with weight at most `wmax`, labeled by
/// family name. Conjectural instances are produced separately.
pub fn known_instances(ring: &PolyRing, wmax: u64) -> Vec<(&'static str, RelationInstance)> {
    let q = ring.q();
    let p = ring.p();
    let mut fams: Vec<Family> = Vec::new();

    // thm1: weight 2 q^(n+k) - q^n - 1 grows in n + k; enumerate until the
    // base power alone exceeds the bound
    for n in 0..10u32 {
        for k in 1..10u32 {
            match q.checked_pow(n + k) {
                Some(pw) if 2 * pw <= wmax + q.pow(n) + 1 => {
                    fams.push(Family::Thm1 { n, k });
                }
                _ => break,
            }
        }
    }

    // exchange families: a level-k instance has weight at least q^k
    let mut kcap = 0u32;
    while q.checked_pow(kcap + 1).is_some_and(|pw| pw <= wmax) {
        kcap += 1;
    }
    fams.extend(grid_thm2(q, kcap));
    fams.extend(grid_thm3(q, kcap));
    fams.extend(grid_main(q, kcap));

    if p == 2 {
        fams.extend(grid_f1(q));
        fams.push(Family::F21);
        fams.extend(grid_f2(q));
        fams.extend(grid_f3(q));
        fams.extend(grid_f4(q));
    }

    let mut out = Vec::new();
    for fam in fams {
        let name = fam.name();
        if let Ok(inst) = fam.instantiate(ring) {
            if inst.left.0 + inst.left.1 <= wmax && inst.left != inst.right {
                out.push((name, inst));
            }
        }
    }
    out
}

/// Conjectural instances over F_q with weight at most `wmax`.
pub fn conjecture_instances(ring: &PolyRing, wmax: u64) -> Vec<RelationInstance> {
    if ring.p() != 2 {
        return Vec::new();
    }
    grid_conjecture(ring.q())
        .iter()
        .filter_map(|f| f.instantiate(ring).ok())
        .filter(|inst| inst.left.0 + inst.left.1 <= wmax && inst.left != inst.right)
        .collect()
}

type PairKey = (Composition, Composition);

/// Orientation-normalized lookup from composition pairs to family tags.
pub struct TagIndex {
    map: HashMap<PairKey, BTreeSet<&'static str>>,
}

fn norm_key(left: &[u64], right: &[u64]) -> PairKey {
    if left <= right {
        (left.to_vec(), right.to_vec())
    } else {
        (right.to_vec(), left.to_vec())
    }
}

/// Build the tag index: every known and conjectural instance of weight at
/// most `wmax`, closed under Frobenius twists within the same bound.
pub fn build_tag_index(ring: &PolyRing, wmax: u64) -> TagIndex {
    let p = ring.p();
    let mut map: HashMap<PairKey, BTreeSet<&'static str>> = HashMap::new();
    let mut labeled: Vec<(&'static str, RelationInstance)> = known_instances(ring, wmax);
    labeled.extend(
        conjecture_instances(ring, wmax).into_iter().map(|i| ("conjecture", i)),
    );
    for (tag, inst) in labeled {
        let base_l = vec![inst.left.0, inst.left.1];
        let base_r = vec![inst.right.0, inst.right.1];
        let w0 = inst.left.0 + inst.left.1;
        let mut scale = 1u64;
        loop {
            match w0.checked_mul(scale) {
                Some(w) if w <= wmax => {}
                _ => break,
            }
            let l: Composition = base_l.iter().map(|&k| k * scale).collect();
            let r: Composition = base_r.iter().map(|&k| k * scale).collect();
            map.entry(norm_key(&l, &r)).or_default().insert(tag);
            match scale.checked_mul(p) {
                Some(s) => scale = s,
                None => break,
            }
        }
    }
    TagIndex { map }
}

impl TagIndex {
    /// Family tags attached to a pair, in sorted order; empty when the
    /// pair is not a (possibly twisted) instance of any family in range.
    pub fn tags(&self, left: &[u64], right: &[u64]) -> Vec<&'static str> {
        self.map
            .get(&norm_key(left, right))
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;

    #[test]
    fn q2_small_rows_are_tagged() {
        let ring = PolyRing::new(FieldSpec::parse("2").unwrap());
        let idx = build_tag_index(&ring, 31);
        // thm1 n=1 k=1, also the f1/f2 degenerate overlap at q=2
        let tags = idx.tags(&[2, 3], &[3, 2]);
        assert!(tags.contains(&"thm1"), "{tags:?}");
        assert!(tags.contains(&"f1"), "{tags:?}");
        // its Frobenius twist
        let tags = idx.tags(&[4, 6], &[6, 4]);
        assert!(tags.contains(&"thm1"), "{tags:?}");
        // orientation-independent: reversed lookup hits the same entry
        let tags = idx.tags(&[3, 2], &[2, 3]);
        assert!(tags.contains(&"thm1"));
        // weight-23 row comes from thm1 n=3 k=1
        let tags = idx.tags(&[8, 15], &[15, 8]);
        assert!(tags.contains(&"thm1"), "{tags:?}");
        assert!(idx.tags(&[1, 3], &[2, 2]).is_empty());
    }

    #[test]
    fn q4_f_family_rows_are_tagged() {
        let ring = PolyRing::new(FieldSpec::parse("4").unwrap());
        let idx = build_tag_index(&ring, 128);
        assert!(idx.tags(&[2, 15], &[5, 12]).contains(&"f1"));
        assert!(idx.tags(&[2, 21], &[5, 18]).contains(&"f21"));
        assert!(idx.tags(&[4, 21], &[7, 18]).contains(&"f2"));
        assert!(idx.tags(&[11, 45], &[20, 36]).contains(&"f4"));
        assert!(idx.tags(&[14, 60], &[20, 54]).contains(&"f3"));
        assert!(idx.tags(&[16, 60], &[22, 54]).contains(&"conjecture"));
    }
}
