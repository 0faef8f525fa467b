//! Gluing pants groups into closed-surface representations.
//!
//! Each pants of the decomposition carries its own reflection group in a
//! private copy of the upper half-plane. A placement `Q_p` conjugates every
//! pants into one shared copy: the root pants is placed identically and a
//! breadth-first walk over the connector curves places each neighbor by
//!
//! ```text
//! Q_child = Q_parent N_parent^{-1} T_e J N_child
//! ```
//!
//! where `N` are the slot normalizers, `T_e = diag(e^{lambda/2}, e^{-lambda/2})`
//! with `lambda = twist + i * bend`, and `J : z -> -1/z` turns the half-plane
//! across the shared axis. This makes the two boundary holonomies of the
//! curve exact inverses. Handle curves close up through stable letters built
//! from the same gluing map, and a purely imaginary part of `lambda` bends
//! the gluing into `PSL(2, C)`: the quakebend deformation, whose holonomies
//! are those of grafted projective structures.

use num_complex::Complex;

use super::decomposition::{CurveEnd, CurveKind, PantsDecomposition};
use super::hexagon::PantsGeometry;
use super::words::{reduced_words_up_to, Word};
use super::{FNCoords, WeightedMulticurve};
use crate::error::{Error, Result};
use crate::moebius::MoebiusMap;
use crate::scalar::Real;

fn letter_a(i: usize) -> i32 {
    (2 * i + 1) as i32
}

fn letter_b(i: usize) -> i32 {
    (2 * i + 2) as i32
}

fn j_map<T: Real>() -> MoebiusMap<T> {
    MoebiusMap::from_real(T::zero(), -T::one(), T::one(), T::zero()).expect("determinant one")
}

/// Images of the standard symplectic generators `a_1, b_1, ..., a_g, b_g`
/// of a genus `g` surface group, with a word for every pants curve.
#[derive(Debug, Clone)]
pub struct SurfaceGroupRep<T: Real> {
    pub genus: usize,
    /// Generator images, interleaved as `a_1, b_1, a_2, b_2, ...`.
    pub generators: Vec<MoebiusMap<T>>,
    /// For each decomposition curve, a word freely homotopic to it.
    pub curve_words: Vec<Word>,
}

impl<T: Real> SurfaceGroupRep<T> {
    pub fn evaluate(&self, w: &Word) -> MoebiusMap<T> {
        w.evaluate(&self.generators)
    }

    /// The surface relator `[a_1, b_1] [a_2, b_2] ... [a_g, b_g]`.
    pub fn relator(&self) -> Word {
        let mut w = Word(Vec::new());
        for i in 0..self.genus {
            w = w.concat(&Word::commutator(
                &Word::one_letter(letter_a(i)),
                &Word::one_letter(letter_b(i)),
            ));
        }
        w
    }

    /// Matrix distance of the evaluated relator from the identity (up to the
    /// global sign ambiguity of `PSL(2)`).
    pub fn relation_residual(&self) -> T {
        self.evaluate(&self.relator())
            .distance_up_to_sign(&MoebiusMap::identity())
    }

    pub fn curve_holonomy(&self, curve: usize) -> Result<MoebiusMap<T>> {
        let w = self
            .curve_words
            .get(curve)
            .ok_or(Error::CurveIndexOutOfRange {
                index: curve,
                count: self.curve_words.len(),
            })?;
        Ok(self.evaluate(w))
    }

    /// Hyperbolic translation length of a pants curve's holonomy.
    pub fn curve_length(&self, curve: usize) -> Result<T> {
        self.curve_holonomy(curve)?.translation_length()
    }
}

/// A placed copy of every pants group together with the representation it
/// glues into. Produced by [`assemble_representation`] (all gluings real)
/// or [`quakebend_representation`] (bent gluings).
#[derive(Debug, Clone)]
pub struct Assembly<T: Real> {
    pub decomposition: PantsDecomposition,
    pub coords: FNCoords<T>,
    /// Bending angle per curve; zero entries are unbent.
    pub bends: Vec<T>,
    pub pants: Vec<PantsGeometry<T>>,
    /// Placement `Q_p` per pants; the root is placed identically.
    pub placements: Vec<MoebiusMap<T>>,
    pub rep: SurfaceGroupRep<T>,
}

impl<T: Real> Assembly<T> {
    /// Builds the assembly with an explicit bend angle for every curve.
    /// Entries may be zero (purely hyperbolic gluing) or any finite angle.
    pub fn with_bends(
        pd: &PantsDecomposition,
        coords: &FNCoords<T>,
        bends: Vec<T>,
    ) -> Result<Self> {
        coords.matches(pd)?;
        if bends.len() != pd.curve_count() {
            return Err(Error::CurveIndexOutOfRange {
                index: bends.len(),
                count: pd.curve_count(),
            });
        }
        for &b in &bends {
            if !b.is_finite() {
                return Err(Error::NonPositiveWeight {
                    value: b.to_f64().unwrap_or(f64::NAN),
                });
            }
        }

        let pants: Vec<PantsGeometry<T>> = pd
            .slots
            .iter()
            .map(|&[c0, c1, c2]| {
                PantsGeometry::new(
                    coords.lengths[c0],
                    coords.lengths[c1],
                    coords.lengths[c2],
                )
            })
            .collect::<Result<_>>()?;

        // Gluing map of curve e in the standard frame: translate by the
        // complex length `twist + i bend` along the imaginary axis, then
        // turn the half-plane across it.
        let glue = |e: usize| -> MoebiusMap<T> {
            let lambda = Complex::new(coords.twists[e], bends[e]);
            MoebiusMap::axis_translation(lambda).compose(&j_map())
        };

        // Breadth-first placement over the connector curves.
        let mut placements: Vec<Option<MoebiusMap<T>>> = vec![None; pd.pants_count()];
        placements[pd.root()] = Some(MoebiusMap::identity());
        let mut queue = std::collections::VecDeque::from([pd.root()]);
        while let Some(p) = queue.pop_front() {
            let q_here = placements[p].expect("queued pants are placed");
            for slot in 0..3 {
                let e = pd.slots[p][slot];
                let curve = pd.curves[e];
                if curve.kind != CurveKind::Connector {
                    continue;
                }
                let here = CurveEnd { pants: p, slot };
                let there = if curve.ends[0] == here {
                    curve.ends[1]
                } else {
                    curve.ends[0]
                };
                if placements[there.pants].is_some() {
                    continue;
                }
                let n_here = pants[p].normalizers[slot];
                let n_there = pants[there.pants].normalizers[there.slot];
                placements[there.pants] = Some(
                    q_here
                        .compose(&n_here.inverse())
                        .compose(&glue(e))
                        .compose(&n_there),
                );
                queue.push_back(there.pants);
            }
        }
        let placements: Vec<MoebiusMap<T>> = placements
            .into_iter()
            .map(|q| {
                q.ok_or(Error::MeshValidation {
                    detail: "decomposition graph is disconnected".into(),
                })
            })
            .collect::<Result<_>>()?;

        // Handle i closes through a stable letter conjugating one boundary
        // holonomy of the self-glued curve to the inverse of the other:
        //   a_i = Q N_1^{-1} T_e J N_2 Q^{-1},   b_i = (Q x_2 Q^{-1})^{-1},
        // making [a_i, b_i] the inverse boundary holonomy of slot 3.
        let genus = pd.genus;
        let mut generators = Vec::with_capacity(2 * genus);
        for i in 0..genus {
            let lp = pd.loop_pants(i);
            let q = placements[lp];
            let geometry = &pants[lp];
            let a = q
                .compose(&geometry.normalizers[0].inverse())
                .compose(&glue(pd.handle_curve(i)))
                .compose(&geometry.normalizers[1])
                .compose(&q.inverse());
            let b = q.compose(&geometry.x[1]).compose(&q.inverse()).inverse();
            generators.push(a);
            generators.push(b);
        }

        let curve_words = standard_curve_words(pd);

        let rep = SurfaceGroupRep {
            genus,
            generators,
            curve_words,
        };
        Ok(Assembly {
            decomposition: pd.clone(),
            coords: coords.clone(),
            bends,
            pants,
            placements,
            rep,
        })
    }

    /// Complex gluing parameter `twist + i bend` of a curve.
    pub fn gluing_parameter(&self, curve: usize) -> Complex<T> {
        Complex::new(self.coords.twists[curve], self.bends[curve])
    }

    /// Placed frame of one curve end: sends the standard axis frame (axis on
    /// the imaginary axis, repelling endpoint at 0) onto that boundary.
    pub fn side_frame(&self, end: CurveEnd) -> MoebiusMap<T> {
        self.placements[end.pants].compose(&self.pants[end.pants].normalizers[end.slot].inverse())
    }

    /// Boundary holonomy of one curve end, `Q x_slot Q^{-1}`. The two ends
    /// of a connector curve give exact inverses.
    pub fn side_holonomy(&self, end: CurveEnd) -> MoebiusMap<T> {
        let q = self.placements[end.pants];
        q.compose(&self.pants[end.pants].x[end.slot])
            .compose(&q.inverse())
    }
}

/// A word per curve of the standard decomposition: handles map to a single
/// `b` letter, loop-attaching curves to the commutator of their handle pair,
/// and chain curves to partial products of commutators.
fn standard_curve_words(pd: &PantsDecomposition) -> Vec<Word> {
    let commutator =
        |i: usize| Word::commutator(&Word::one_letter(letter_a(i)), &Word::one_letter(letter_b(i)));
    let mut words = Vec::with_capacity(pd.curve_count());
    for (e, curve) in pd.curves.iter().enumerate() {
        let word = match curve.kind {
            CurveKind::Handle => Word::one_letter(letter_b(e)),
            CurveKind::Connector => {
                if e < 2 * pd.genus {
                    // Loop-attaching curve (for genus 2 the one separating
                    // curve) bounds a neighborhood of a single handle.
                    commutator(e - pd.genus)
                } else {
                    // Chain curve j cuts off handles 0 ..= j + 1.
                    let j = e - 2 * pd.genus;
                    let mut w = Word(Vec::new());
                    for i in 0..=(j + 1) {
                        w = w.concat(&commutator(i));
                    }
                    w
                }
            }
        };
        words.push(word);
    }
    words
}

/// Glues the pants groups with real twists: a Fuchsian representation of the
/// closed surface group with the prescribed Fenchel-Nielsen coordinates.
pub fn assemble_representation<T: Real>(
    pd: &PantsDecomposition,
    coords: &FNCoords<T>,
) -> Result<Assembly<T>> {
    Assembly::with_bends(pd, coords, vec![T::zero(); pd.curve_count()])
}

/// Glues with the twists complexified by the grafting weights: the holonomy
/// of the projective structure grafted along the weighted multicurve.
pub fn quakebend_representation<T: Real>(
    pd: &PantsDecomposition,
    coords: &FNCoords<T>,
    graft: &WeightedMulticurve<T>,
) -> Result<Assembly<T>> {
    graft.supported_on(pd)?;
    let mut bends = vec![T::zero(); pd.curve_count()];
    for &(c, w) in graft.entries() {
        bends[c] = w;
    }
    Assembly::with_bends(pd, coords, bends)
}

/// Result of scanning a word list for non-real traces.
#[derive(Debug, Clone)]
pub struct RealityReport<T: Real> {
    pub words_checked: usize,
    pub tol: T,
    /// Largest `|Im tr|` seen over the scan.
    pub max_imag_trace: T,
    /// Word attaining the maximum.
    pub worst_word: Option<Word>,
    /// Number of words with `|Im tr|` above the tolerance.
    pub non_real_count: usize,
}

impl<T: Real> RealityReport<T> {
    pub fn all_real(&self) -> bool {
        self.non_real_count == 0
    }
}

/// Scans every nonempty reduced word up to the given length, plus the pants
/// curve words, for trace reality. A quakebend of a Fuchsian representation
/// passes exactly when each bending angle is a multiple of `2 pi` (trace
/// reality detects conjugacy into the real subgroup on this word list).
pub fn reality_check<T: Real>(
    rep: &SurfaceGroupRep<T>,
    max_word_len: usize,
    tol: T,
) -> RealityReport<T> {
    let mut words = reduced_words_up_to(rep.genus, max_word_len);
    words.extend(rep.curve_words.iter().cloned());
    let mut report = RealityReport {
        words_checked: words.len(),
        tol,
        max_imag_trace: T::zero(),
        worst_word: None,
        non_real_count: 0,
    };
    for w in words {
        let im = rep.evaluate(&w).trace().im.abs();
        if im > report.max_imag_trace {
            report.max_imag_trace = im;
            report.worst_word = Some(w.clone());
        }
        if im > tol {
            report.non_real_count += 1;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuchsian::default_genus2;

    fn base() -> Assembly<f64> {
        let (pd, fnc) = default_genus2();
        assemble_representation(&pd, &fnc).unwrap()
    }

    #[test]
    fn genus_two_relation_and_lengths() {
        let a = base();
        // The relator evaluates through generators stored conjugated by the
        // placements, so its residual carries a ||Q||^4 roundoff factor.
        assert!(
            a.rep.relation_residual() < 1e-9,
            "residual {}",
            a.rep.relation_residual()
        );
        for g in &a.rep.generators {
            assert!(g.is_real(1e-10));
        }
        for e in 0..3 {
            let l = a.rep.curve_length(e).unwrap();
            assert!((l - a.coords.lengths[e]).abs() < 1e-9, "curve {e}: {l}");
        }
    }

    #[test]
    fn connector_sides_are_inverse_holonomies() {
        let a = base();
        let curve = a.decomposition.curves[2];
        assert_eq!(curve.kind, CurveKind::Connector);
        let h0 = a.side_holonomy(curve.ends[0]);
        let h1 = a.side_holonomy(curve.ends[1]);
        assert!(h0.compose(&h1).distance_up_to_sign(&MoebiusMap::identity()) < 1e-12);
    }

    #[test]
    fn zero_bend_quakebend_is_fuchsian() {
        let (pd, fnc) = default_genus2();
        let plain = assemble_representation(&pd, &fnc).unwrap();
        let bent = Assembly::with_bends(&pd, &fnc, vec![0.0; 3]).unwrap();
        for (g, h) in plain.rep.generators.iter().zip(&bent.rep.generators) {
            assert!(g.eq_up_to_sign(h, 1e-14));
        }
        let empty = quakebend_representation(&pd, &fnc, &WeightedMulticurve::empty()).unwrap();
        for (g, h) in plain.rep.generators.iter().zip(&empty.rep.generators) {
            assert!(g.eq_up_to_sign(h, 1e-14));
        }
    }

    #[test]
    fn full_turn_graft_keeps_traces_real() {
        let (pd, fnc) = default_genus2();
        let two_pi = 2.0 * std::f64::consts::PI;
        for curve in 0..3 {
            let graft = WeightedMulticurve::single(curve, two_pi).unwrap();
            let a = quakebend_representation(&pd, &fnc, &graft).unwrap();
            assert!(a.rep.relation_residual() < 1e-9);
            let report = reality_check(&a.rep, 4, 1e-8);
            assert!(
                report.all_real(),
                "curve {curve}: max imag {} at {:?}",
                report.max_imag_trace,
                report.worst_word.as_ref().map(|w| w.display())
            );
        }
    }

    #[test]
    fn partial_turn_graft_leaves_real_traces() {
        let (pd, fnc) = default_genus2();
        for theta in [1.0, std::f64::consts::PI, 3.0 * std::f64::consts::PI] {
            let graft = WeightedMulticurve::single(0, theta).unwrap();
            let a = quakebend_representation(&pd, &fnc, &graft).unwrap();
            let report = reality_check(&a.rep, 3, 1e-8);
            assert!(!report.all_real(), "theta {theta} unexpectedly real");
            assert!(report.max_imag_trace > 1e-3);
        }
    }

    #[test]
    fn quakebend_fixes_pants_curve_lengths() {
        let (pd, fnc) = default_genus2();
        let graft = WeightedMulticurve::new(vec![(0, 1.3), (1, 0.7)]).unwrap();
        let a = quakebend_representation(&pd, &fnc, &graft).unwrap();
        for e in 0..3 {
            let h = a.rep.curve_holonomy(e).unwrap();
            assert!(h.trace().im.abs() < 1e-9);
            let l = a.rep.curve_length(e).unwrap();
            assert!((l - fnc.lengths[e]).abs() < 1e-8);
        }
    }

    #[test]
    fn separating_twist_preserves_generator_traces() {
        let (pd, fnc) = default_genus2();
        let before = assemble_representation(&pd, &fnc).unwrap();
        let mut twisted = fnc.clone();
        twisted.twists[2] += fnc.lengths[2];
        let after = assemble_representation(&pd, &twisted).unwrap();
        for (g, h) in before.rep.generators.iter().zip(&after.rep.generators) {
            let dt = (g.trace() - h.trace()).norm().min((g.trace() + h.trace()).norm());
            assert!(dt < 1e-9, "trace moved by {dt}");
        }
    }

    #[test]
    fn handle_twist_acts_as_the_twist_automorphism() {
        let (pd, fnc) = default_genus2();
        let before = assemble_representation(&pd, &fnc).unwrap();
        let handle = pd.handle_curve(0);
        let mut twisted = fnc.clone();
        twisted.twists[handle] += fnc.lengths[handle];
        let after = assemble_representation(&pd, &twisted).unwrap();
        // a_1 -> a_1 b_1, everything else fixed.
        let expect_a1 = before.rep.generators[0].compose(&before.rep.generators[1]);
        assert!(after.rep.generators[0].eq_up_to_sign(&expect_a1, 1e-8));
        for k in 1..4 {
            assert!(after.rep.generators[k].eq_up_to_sign(&before.rep.generators[k], 1e-8));
        }
        // The separating-curve word is a commutator, so its trace survives.
        let w = &before.rep.curve_words[2];
        let dt = (before.rep.evaluate(w).trace() - after.rep.evaluate(w).trace()).norm();
        assert!(dt < 1e-9);
    }

    #[test]
    fn higher_genus_assemblies_close_up() {
        for genus in [3, 4, 5] {
            let pd = PantsDecomposition::standard(genus).unwrap();
            let n = pd.curve_count();
            let lengths: Vec<f64> = (0..n).map(|i| 1.0 + 0.2 * i as f64).collect();
            let twists: Vec<f64> = (0..n).map(|i| 0.1 * i as f64 - 0.3).collect();
            let coords = FNCoords::new(lengths.clone(), twists).unwrap();
            let a = assemble_representation(&pd, &coords).unwrap();
            // Placements deepen along the connector chain, so the residual
            // amplification grows with the genus.
            assert!(
                a.rep.relation_residual() < 1e-7,
                "genus {genus}: residual {}",
                a.rep.relation_residual()
            );
            for e in 0..n {
                let l = a.rep.curve_length(e).unwrap();
                assert!((l - lengths[e]).abs() < 1e-8, "genus {genus} curve {e}");
            }
        }
    }
}
