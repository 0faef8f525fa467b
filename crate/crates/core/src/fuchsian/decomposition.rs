//! Pants decompositions of closed surfaces and the standard caterpillar
//! layout used for Fenchel-Nielsen coordinates.

use crate::error::{Error, Result};

/// One end of a pants curve: which pants and which of its three boundary
/// slots it occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveEnd {
    pub pants: usize,
    pub slot: usize,
}

/// Whether a curve joins two distinct pants or closes a handle on one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Connector,
    Handle,
}

/// A pants curve with its two gluing ends.
#[derive(Debug, Clone, Copy)]
pub struct Curve {
    pub ends: [CurveEnd; 2],
    pub kind: CurveKind,
}

/// A pants decomposition of a closed orientable surface of genus `g >= 2`:
/// a trivalent gluing graph on `2g - 2` pants with `3g - 3` curves, where a
/// handle curve occupies two slots of the same pants.
#[derive(Debug, Clone)]
pub struct PantsDecomposition {
    pub genus: usize,
    pub curves: Vec<Curve>,
    /// For each pants, the curve index occupying each of its three slots.
    pub slots: Vec<[usize; 3]>,
}

impl PantsDecomposition {
    /// The caterpillar decomposition: `g` loop pants each closing one handle
    /// through its slots 1 and 2, attached through slot 3 to a chain of
    /// `g - 2` connector pants (for genus 2 the two loop pants glue
    /// directly). Handles are numbered first, so curve `i < g` is the handle
    /// of loop pants `i`; separating and chain curves come after. Putting
    /// the handle on the first two slots keeps its frames well conditioned
    /// however long the curve gets: slot 1 carries the exact diagonal
    /// normalizer and slot 2 an axis whose endpoints spread multiplicatively.
    pub fn standard(genus: usize) -> Result<Self> {
        if genus < 2 {
            return Err(Error::CurveIndexOutOfRange {
                index: genus,
                count: 2,
            });
        }
        let n_pants = 2 * genus - 2;
        let n_curves = 3 * genus - 3;
        let loops: Vec<usize> = (0..genus).collect();
        let connectors: Vec<usize> = (genus..n_pants).collect();

        let unset = usize::MAX;
        let mut slots = vec![[unset; 3]; n_pants];
        let mut curves: Vec<Curve> = Vec::with_capacity(n_curves);

        let connect = |curves: &mut Vec<Curve>,
                           slots: &mut Vec<[usize; 3]>,
                           a: CurveEnd,
                           b: CurveEnd,
                           kind: CurveKind| {
            let idx = curves.len();
            curves.push(Curve { ends: [a, b], kind });
            slots[a.pants][a.slot] = idx;
            slots[b.pants][b.slot] = idx;
        };

        for &lp in &loops {
            connect(
                &mut curves,
                &mut slots,
                CurveEnd { pants: lp, slot: 0 },
                CurveEnd { pants: lp, slot: 1 },
                CurveKind::Handle,
            );
        }

        if genus == 2 {
            connect(
                &mut curves,
                &mut slots,
                CurveEnd { pants: loops[0], slot: 2 },
                CurveEnd { pants: loops[1], slot: 2 },
                CurveKind::Connector,
            );
        } else {
            // Loop pants i hangs off connector pants by slot: the first
            // connector hosts loops 0 and 1, the last hosts the final two,
            // middle connectors host one loop each; consecutive connectors
            // chain through their remaining slots.
            let host_slot: Vec<(usize, usize)> = {
                let m = connectors.len();
                let mut hs = Vec::with_capacity(genus);
                if m == 1 {
                    hs.extend([(connectors[0], 0), (connectors[0], 1), (connectors[0], 2)]);
                } else {
                    hs.extend([(connectors[0], 0), (connectors[0], 1)]);
                    for &cp in &connectors[1..m - 1] {
                        hs.push((cp, 1));
                    }
                    hs.extend([(connectors[m - 1], 1), (connectors[m - 1], 2)]);
                }
                hs
            };
            for (i, &(cp, slot)) in host_slot.iter().enumerate() {
                connect(
                    &mut curves,
                    &mut slots,
                    CurveEnd { pants: loops[i], slot: 2 },
                    CurveEnd { pants: cp, slot },
                    CurveKind::Connector,
                );
            }
            for j in 0..connectors.len().saturating_sub(1) {
                connect(
                    &mut curves,
                    &mut slots,
                    CurveEnd { pants: connectors[j], slot: 2 },
                    CurveEnd { pants: connectors[j + 1], slot: 0 },
                    CurveKind::Connector,
                );
            }
        }

        let pd = PantsDecomposition { genus, curves, slots };
        pd.validate()?;
        Ok(pd)
    }

    pub fn pants_count(&self) -> usize {
        self.slots.len()
    }

    pub fn curve_count(&self) -> usize {
        self.curves.len()
    }

    /// Index of the loop pants carrying handle `i` (0-based).
    pub fn loop_pants(&self, handle: usize) -> usize {
        handle
    }

    /// Curve index of handle `i`.
    pub fn handle_curve(&self, handle: usize) -> usize {
        handle
    }

    /// Root pants of the gluing tree formed by the connector curves.
    pub fn root(&self) -> usize {
        if self.genus == 2 {
            0
        } else {
            self.genus // first connector pants
        }
    }

    fn validate(&self) -> Result<()> {
        let fail = |detail: String| Err(Error::MeshValidation { detail });
        if self.curves.len() != 3 * self.genus - 3 || self.slots.len() != 2 * self.genus - 2 {
            return fail("wrong curve or pants count".into());
        }
        let mut seen = vec![0usize; self.curves.len()];
        for (p, trio) in self.slots.iter().enumerate() {
            for (s, &cidx) in trio.iter().enumerate() {
                if cidx >= self.curves.len() {
                    return fail(format!("pants {p} slot {s} unassigned"));
                }
                seen[cidx] += 1;
                let curve = &self.curves[cidx];
                let here = CurveEnd { pants: p, slot: s };
                if curve.ends[0] != here && curve.ends[1] != here {
                    return fail(format!("pants {p} slot {s} mismatched with curve {cidx}"));
                }
            }
        }
        if seen.iter().any(|&n| n != 2) {
            return fail("every curve must occupy exactly two slots".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn genus_two_layout() {
        let pd = PantsDecomposition::standard(2).unwrap();
        assert_eq!(pd.pants_count(), 2);
        assert_eq!(pd.curve_count(), 3);
        assert_eq!(pd.curves[0].kind, CurveKind::Handle);
        assert_eq!(pd.curves[1].kind, CurveKind::Handle);
        assert_eq!(pd.curves[2].kind, CurveKind::Connector);
        assert_eq!(pd.handle_curve(0), 0);
        // Each loop pants: its handle on slots 0 and 1, the connector on 2.
        assert_eq!(pd.slots[0], [0, 0, 2]);
        assert_eq!(pd.slots[1], [1, 1, 2]);
    }

    #[test]
    fn higher_genus_counts_and_kinds() {
        for g in 3..=6 {
            let pd = PantsDecomposition::standard(g).unwrap();
            assert_eq!(pd.pants_count(), 2 * g - 2);
            assert_eq!(pd.curve_count(), 3 * g - 3);
            let handles = pd
                .curves
                .iter()
                .filter(|c| c.kind == CurveKind::Handle)
                .count();
            assert_eq!(handles, g);
            // Handles come first.
            for i in 0..g {
                assert_eq!(pd.handle_curve(i), i);
                assert_eq!(pd.curves[i].kind, CurveKind::Handle);
                assert_eq!(pd.curves[i].ends[0].pants, pd.loop_pants(i));
            }
            for e in g..3 * g - 3 {
                assert_eq!(pd.curves[e].kind, CurveKind::Connector);
            }
        }
    }

    #[test]
    fn genus_below_two_rejected() {
        assert!(PantsDecomposition::standard(1).is_err());
    }
}
