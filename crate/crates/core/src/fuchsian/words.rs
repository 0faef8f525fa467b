//! Words in the standard surface-group generators and their evaluation.

use crate::moebius::MoebiusMap;
use crate::scalar::Real;

/// A reduced word in the generators `a_1, b_1, ..., a_g, b_g`. Letters are
/// nonzero integers: `+k` is the `k`-th generator (1-based, in the order
/// `a_1, b_1, a_2, b_2, ...`), `-k` its inverse.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<i32>);

impl Word {
    pub fn one_letter(letter: i32) -> Self {
        Word(vec![letter])
    }

    /// Free reduction (cancels adjacent inverse pairs).
    pub fn reduced(letters: Vec<i32>) -> Self {
        let mut out: Vec<i32> = Vec::with_capacity(letters.len());
        for l in letters {
            debug_assert!(l != 0);
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|&l| -l).collect())
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word::reduced(letters)
    }

    pub fn commutator(x: &Word, y: &Word) -> Self {
        x.concat(y).concat(&x.inverse()).concat(&y.inverse())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Evaluates the word in a list of generator images.
    pub fn evaluate<T: Real>(&self, generators: &[MoebiusMap<T>]) -> MoebiusMap<T> {
        let mut acc = MoebiusMap::identity();
        for &l in &self.0 {
            let idx = (l.unsigned_abs() as usize) - 1;
            let g = &generators[idx];
            let factor = if l > 0 { *g } else { g.inverse() };
            acc = acc.compose(&factor);
        }
        acc
    }

    /// Human-readable form like `a1 b2^-1`.
    pub fn display(&self) -> String {
        if self.0.is_empty() {
            return "1".to_string();
        }
        self.0
            .iter()
            .map(|&l| {
                let idx = (l.unsigned_abs() as usize) - 1;
                let name = if idx % 2 == 0 { "a" } else { "b" };
                let num = idx / 2 + 1;
                if l > 0 {
                    format!("{name}{num}")
                } else {
                    format!("{name}{num}^-1")
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// All nonempty reduced words of length at most `max_len` in `2 * genus`
/// generators (no adjacent cancellation). For genus 2 and length 4 this is
/// 3200 words.
pub fn reduced_words_up_to(genus: usize, max_len: usize) -> Vec<Word> {
    let alphabet: Vec<i32> = (1..=(2 * genus as i32))
        .flat_map(|k| [k, -k])
        .collect();
    let mut out: Vec<Word> = Vec::new();
    let mut frontier: Vec<Vec<i32>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next: Vec<Vec<i32>> = Vec::with_capacity(frontier.len() * alphabet.len());
        for w in &frontier {
            for &l in &alphabet {
                if w.last() == Some(&-l) {
                    continue;
                }
                let mut ext = w.clone();
                ext.push(l);
                next.push(ext);
            }
        }
        out.extend(next.iter().cloned().map(Word));
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_cancels_inverse_pairs() {
        let w = Word::reduced(vec![1, 2, -2, -1, 3]);
        assert_eq!(w.0, vec![3]);
        let c = Word::commutator(&Word::one_letter(1), &Word::one_letter(2));
        assert_eq!(c.0, vec![1, 2, -1, -2]);
    }

    #[test]
    fn genus_two_word_count() {
        let words = reduced_words_up_to(2, 4);
        // 8 + 8*7 + 8*49 + 8*343 = 3200 nonempty reduced words.
        assert_eq!(words.len(), 3200);
        assert!(words.iter().all(|w| !w.is_empty() && w.len() <= 4));
    }

    #[test]
    fn evaluation_respects_inverses() {
        let g = vec![
            MoebiusMap::<f64>::axis_translation(num_complex::Complex64::new(1.0, 0.0)),
            MoebiusMap::from_real(1.0, 1.0, 0.0, 1.0).unwrap(),
        ];
        let w = Word::reduced(vec![1, 2]);
        let winv = w.inverse();
        let prod = w.evaluate(&g).compose(&winv.evaluate(&g));
        assert!(prod.distance_up_to_sign(&MoebiusMap::identity()) < 1e-12);
    }

    #[test]
    fn display_names() {
        assert_eq!(Word(vec![1, -4]).display(), "a1 b2^-1");
    }
}
