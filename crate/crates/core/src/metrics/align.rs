//! Monotone saccade alignment on the |A| x |B| lattice.
//!
//! Nodes pair saccade `i` of A with saccade `j` of B at a cost equal to the
//! Euclidean distance between the two vectors; steps are (1,0), (0,1) and
//! (1,1). The minimum-cost path from (0,0) to (|A|-1, |B|-1) defines the
//! alignment. On equal cost the diagonal step wins, then (1,0), then (0,1).

use crate::error::{Error, Result};
use crate::gaze::SaccadeVector;
use crate::scalar::Scalar;

/// Monotone pairing of saccade indices, first pair (0,0), last pair
/// (|A|-1, |B|-1), each step advancing at least one index by exactly one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, PartialEq)]
enum Step {
    Start,
    Diag,
    FromA, // predecessor (i-1, j)
    FromB, // predecessor (i, j-1)
}

/// Minimum-cost monotone alignment of two saccade sequences.
///
/// Errors when either sequence is empty.
pub fn align<T: Scalar>(a: &[SaccadeVector<T>], b: &[SaccadeVector<T>]) -> Result<Alignment> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::NoSaccades);
    }
    let m = a.len();
    let n = b.len();
    let mut cost = vec![T::zero(); m * n];
    let mut step = vec![Step::Start; m * n];
    let idx = |i: usize, j: usize| i * n + j;

    for i in 0..m {
        for j in 0..n {
            let node = a[i].distance(&b[j]);
            let (best, s) = match (i, j) {
                (0, 0) => (node, Step::Start),
                (0, _) => (cost[idx(0, j - 1)] + node, Step::FromB),
                (_, 0) => (cost[idx(i - 1, 0)] + node, Step::FromA),
                _ => {
                    // Tie preference: diagonal, then (1,0), then (0,1).
                    let mut best = cost[idx(i - 1, j - 1)] + node;
                    let mut s = Step::Diag;
                    let via_a = cost[idx(i - 1, j)] + node;
                    if via_a < best {
                        best = via_a;
                        s = Step::FromA;
                    }
                    let via_b = cost[idx(i, j - 1)] + node;
                    if via_b < best {
                        best = via_b;
                        s = Step::FromB;
                    }
                    (best, s)
                }
            };
            cost[idx(i, j)] = best;
            step[idx(i, j)] = s;
        }
    }

    let mut pairs = Vec::with_capacity(m.max(n));
    let (mut i, mut j) = (m - 1, n - 1);
    loop {
        pairs.push((i, j));
        match step[idx(i, j)] {
            Step::Start => break,
            Step::Diag => {
                i -= 1;
                j -= 1;
            }
            Step::FromA => i -= 1,
            Step::FromB => j -= 1,
        }
    }
    pairs.reverse();
    Ok(Alignment { pairs })
}

/// Cost of an alignment: sum of node costs along the path, in path order.
pub fn alignment_cost<T: Scalar>(
    alignment: &Alignment,
    a: &[SaccadeVector<T>],
    b: &[SaccadeVector<T>],
) -> T {
    alignment
        .pairs
        .iter()
        .fold(T::zero(), |acc, &(i, j)| acc + a[i].distance(&b[j]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vecs(points: &[(f64, f64)]) -> Vec<SaccadeVector<f64>> {
        points
            .iter()
            .map(|&(dx, dy)| SaccadeVector::new(dx, dy))
            .collect()
    }

    #[test]
    fn identical_sequences_align_diagonally() {
        let a = vecs(&[(0.1, 0.0), (0.0, 0.2), (-0.3, 0.1)]);
        let al = align(&a, &a).unwrap();
        assert_eq!(al.pairs, vec![(0, 0), (1, 1), (2, 2)]);
        assert_eq!(alignment_cost(&al, &a, &a), 0.0);
    }

    #[test]
    fn single_against_many_is_forced() {
        let a = vecs(&[(0.5, 0.5)]);
        let b = vecs(&[(0.1, 0.0), (0.2, 0.0), (0.3, 0.0)]);
        let al = align(&a, &b).unwrap();
        assert_eq!(al.pairs, vec![(0, 0), (0, 1), (0, 2)]);
    }

    #[test]
    fn empty_input_is_error() {
        let a = vecs(&[(0.1, 0.0)]);
        assert!(align(&a, &[]).is_err());
        assert!(align(&[], &a).is_err());
    }

    #[test]
    fn alignment_is_monotone_and_anchored() {
        let a = vecs(&[(0.1, 0.2), (0.3, -0.1), (0.0, 0.0), (0.2, 0.2)]);
        let b = vecs(&[(0.05, 0.2), (0.25, 0.0)]);
        let al = align(&a, &b).unwrap();
        assert_eq!(*al.pairs.first().unwrap(), (0, 0));
        assert_eq!(*al.pairs.last().unwrap(), (a.len() - 1, b.len() - 1));
        for w in al.pairs.windows(2) {
            let (di, dj) = (w[1].0 - w[0].0, w[1].1 - w[0].1);
            assert!(di <= 1 && dj <= 1 && di + dj >= 1);
        }
    }

    /// Enumerates every monotone path and returns the minimum path cost,
    /// summed in path order.
    fn brute_force_min_cost(a: &[SaccadeVector<f64>], b: &[SaccadeVector<f64>]) -> f64 {
        fn walk(
            a: &[SaccadeVector<f64>],
            b: &[SaccadeVector<f64>],
            i: usize,
            j: usize,
            acc: f64,
            best: &mut f64,
        ) {
            let acc = acc + a[i].distance(&b[j]);
            if i == a.len() - 1 && j == b.len() - 1 {
                if acc < *best {
                    *best = acc;
                }
                return;
            }
            if i + 1 < a.len() && j + 1 < b.len() {
                walk(a, b, i + 1, j + 1, acc, best);
            }
            if i + 1 < a.len() {
                walk(a, b, i + 1, j, acc, best);
            }
            if j + 1 < b.len() {
                walk(a, b, i, j + 1, acc, best);
            }
        }
        let mut best = f64::INFINITY;
        walk(a, b, 0, 0, 0.0, &mut best);
        best
    }

    #[test]
    fn cost_matches_exhaustive_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let la = rng.random_range(1..=4usize);
            let lb = rng.random_range(1..=4usize);
            let mk = |rng: &mut rand_chacha::ChaCha8Rng, len: usize| {
                (0..len)
                    .map(|_| {
                        SaccadeVector::new(
                            rng.random_range(-1.0..1.0),
                            rng.random_range(-1.0..1.0),
                        )
                    })
                    .collect::<Vec<_>>()
            };
            let a = mk(&mut rng, la);
            let b = mk(&mut rng, lb);
            let al = align(&a, &b).unwrap();
            let got = alignment_cost(&al, &a, &b);
            let want = brute_force_min_cost(&a, &b);
            assert_eq!(got, want);
        }
    }
}
