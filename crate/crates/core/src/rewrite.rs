//! The length-preserving string rewriting system Sigma, standard forms,
//! the word problem for F, the (positive/negative) normal form, and the
//! local-confluence check.

use crate::words::{Letter, MpWord, Word};
use rand::Rng;
use std::fmt;

/// One rewriting step on an adjacent pair of letters. At most one rule of
/// Sigma matches a given pair, so the result is unique when present.
///
/// Rules (side condition `i < j`):
///   x_i^-1 x_i  -> x_i x_i^-1
///   x_i^-1 x_j  -> x_{j+1} x_i^-1
///   x_j^-1 x_i  -> x_i x_{j+1}^-1
///   x_j x_i     -> x_i x_{j+1}
///   x_i^-1 x_j^-1 -> x_{j+1}^-1 x_i^-1
pub fn rewrite_pair(a: Letter, b: Letter) -> Option<[Letter; 2]> {
    match (a.is_positive(), b.is_positive()) {
        (false, true) => {
            let i = a.index();
            let j = b.index();
            if i == j {
                Some([b, a])
            } else if i < j {
                Some([Letter::pos(j + 1), a])
            } else {
                Some([b, Letter::neg(i + 1)])
            }
        }
        (true, true) => {
            let j = a.index();
            let i = b.index();
            (i < j).then(|| [b, Letter::pos(j + 1)])
        }
        (false, false) => {
            let i = a.index();
            let j = b.index();
            (i < j).then(|| [Letter::neg(j + 1), a])
        }
        (true, false) => None,
    }
}

fn debug_assert_decreasing(old: [Letter; 2], new: [Letter; 2]) {
    debug_assert!(
        new[0].order_key() < old[0].order_key()
            || (new[0] == old[0] && new[1].order_key() < old[1].order_key()),
        "rewrite failed to decrease the termination order: {} {} -> {} {}",
        old[0],
        old[1],
        new[0],
        new[1]
    );
}

/// Sigma-normal form computed with the leftmost-redex strategy.
///
/// After a rewrite at position `p` the leftmost redex of the new word is at
/// position `>= p - 1`, so a single back-stepping cursor implements the
/// strategy in time proportional to the number of rewrite steps.
pub fn sigma_normalize(w: &Word) -> Word {
    let mut ls: Vec<Letter> = w.letters().to_vec();
    let mut i = 0usize;
    while i + 1 < ls.len() {
        match rewrite_pair(ls[i], ls[i + 1]) {
            Some(pair) => {
                debug_assert_decreasing([ls[i], ls[i + 1]], pair);
                ls[i] = pair[0];
                ls[i + 1] = pair[1];
                i = i.saturating_sub(1);
            }
            None => i += 1,
        }
    }
    Word::from_letters(ls)
}

/// Sigma-normal form computed by applying rules at positions drawn from
/// `rng`. By confluence the result must coincide with [`sigma_normalize`];
/// the acceptance suite exercises exactly that.
pub fn sigma_normalize_random<R: Rng>(w: &Word, rng: &mut R) -> Word {
    let mut ls: Vec<Letter> = w.letters().to_vec();
    let mut redexes: Vec<usize> = Vec::new();
    loop {
        redexes.clear();
        for i in 0..ls.len().saturating_sub(1) {
            if rewrite_pair(ls[i], ls[i + 1]).is_some() {
                redexes.push(i);
            }
        }
        if redexes.is_empty() {
            return Word::from_letters(ls);
        }
        let i = redexes[rng.gen_range(0..redexes.len())];
        let pair = rewrite_pair(ls[i], ls[i + 1]).unwrap();
        ls[i] = pair[0];
        ls[i + 1] = pair[1];
    }
}

/// The standard form `p q^{-1}` of a word: its unique Sigma-irreducible
/// descendant, split into the positive half `p` and the inverted half `q`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StandardForm {
    pub p: MpWord,
    pub q: MpWord,
}

impl StandardForm {
    /// The word `p q^{-1}`.
    pub fn word(&self) -> Word {
        Word::concat(&[&self.p.word(), &self.q.word().inverse()])
    }
}

pub fn standard_form(w: &Word) -> StandardForm {
    let nf = sigma_normalize(w);
    split_standard(&nf)
}

fn split_standard(nf: &Word) -> StandardForm {
    let ls = nf.letters();
    let cut = ls.iter().position(|l| !l.is_positive()).unwrap_or(ls.len());
    let p: Vec<u32> = ls[..cut].iter().map(|l| l.index()).collect();
    debug_assert!(ls[cut..].iter().all(|l| !l.is_positive()));
    let mut q: Vec<u32> = ls[cut..].iter().rev().map(|l| l.index()).collect();
    debug_assert!(p.windows(2).all(|v| v[0] <= v[1]));
    debug_assert!(q.windows(2).all(|v| v[0] <= v[1]));
    // Defensive sort only in release; the debug asserts above pin the shape.
    if !(p.windows(2).all(|v| v[0] <= v[1]) && q.windows(2).all(|v| v[0] <= v[1])) {
        q.sort_unstable();
    }
    StandardForm {
        p: MpWord::from_indices(p).expect("standard form positive half is MP"),
        q: MpWord::from_indices(q).expect("standard form negative half is MP"),
    }
}

/// Word problem for F: a word is trivial iff the two halves of its standard
/// form are graphically equal.
pub fn is_trivial(w: &Word) -> bool {
    let sf = standard_form(w);
    sf.p == sf.q
}

/// The normal form of the group element represented by `w`: the unique word
/// `x_{i_1}^{s_1} ... x_{i_m}^{s_m} x_{j_n}^{-t_n} ... x_{j_1}^{-t_1}` such
/// that whenever `x_i` and `x_i^{-1}` both occur, some `x_{i+1}^{±1}` occurs
/// as well.
///
/// Starting from the standard form `p q^{-1}`, the reduction step picks the
/// largest violating subscript `i`, removes the innermost `x_i` pair (last
/// occurrence in `p`, last occurrence in `q`) and decrements every subscript
/// `> i + 1` strictly between them. The tests validate each step against the
/// exact PL-map oracle.
pub fn to_nff(w: &Word) -> Word {
    let sf = standard_form(w);
    let mut p: Vec<u32> = sf.p.indices().to_vec();
    let mut q: Vec<u32> = sf.q.indices().to_vec();
    loop {
        let Some(i) = largest_violation(&p, &q) else {
            break;
        };
        let pi = p.iter().rposition(|&a| a == i).expect("violation in p");
        let qi = q.iter().rposition(|&a| a == i).expect("violation in q");
        p.remove(pi);
        q.remove(qi);
        for a in p[pi..].iter_mut().chain(q[qi..].iter_mut()) {
            debug_assert!(*a != i + 1);
            if *a > i + 1 {
                *a -= 1;
            }
        }
        debug_assert!(p.windows(2).all(|v| v[0] <= v[1]));
        debug_assert!(q.windows(2).all(|v| v[0] <= v[1]));
    }
    let pw = MpWord::from_indices(p).expect("nff positive half");
    let qw = MpWord::from_indices(q).expect("nff negative half");
    Word::concat(&[&pw.word(), &qw.word().inverse()])
}

/// Check the (NFF) occurrence condition by scanning.
pub fn satisfies_nff_condition(w: &Word) -> bool {
    let Ok(sf) = try_split_shape(w) else {
        return false;
    };
    largest_violation(sf.p.indices(), sf.q.indices()).is_none()
}

fn try_split_shape(w: &Word) -> Result<StandardForm, ()> {
    let ls = w.letters();
    let cut = ls.iter().position(|l| !l.is_positive()).unwrap_or(ls.len());
    if !ls[cut..].iter().all(|l| !l.is_positive()) {
        return Err(());
    }
    let p = MpWord::from_indices(ls[..cut].iter().map(|l| l.index()).collect()).map_err(|_| ())?;
    let q = MpWord::from_indices(ls[cut..].iter().rev().map(|l| l.index()).collect())
        .map_err(|_| ())?;
    Ok(StandardForm { p, q })
}

fn largest_violation(p: &[u32], q: &[u32]) -> Option<u32> {
    let mut best: Option<u32> = None;
    for &i in p {
        if q.binary_search(&i).is_ok()
            && p.binary_search(&(i + 1)).is_err()
            && q.binary_search(&(i + 1)).is_err()
        {
            best = Some(best.map_or(i, |b| b.max(i)));
        }
    }
    best
}

/// Outcome of the exhaustive critical-pair check.
pub struct ConfluenceReport {
    pub max_subscript: u32,
    pub overlaps_checked: u64,
    pub failures: Vec<CriticalPairFailure>,
}

pub struct CriticalPairFailure {
    pub overlap: Word,
    pub left: Word,
    pub right: Word,
}

impl ConfluenceReport {
    pub fn all_joinable(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for ConfluenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "critical pairs with subscripts <= {}: {} overlaps checked",
            self.max_subscript, self.overlaps_checked
        )?;
        if self.failures.is_empty() {
            write!(f, "all pairs joinable")
        } else {
            writeln!(f, "{} NON-JOINABLE pairs:", self.failures.len())?;
            for fail in &self.failures {
                writeln!(
                    f,
                    "  overlap [{}] -> [{}] vs [{}]",
                    fail.overlap, fail.left, fail.right
                )?;
            }
            Ok(())
        }
    }
}

/// Enumerate every overlap `a b e` in which both `a b` and `b e` are redexes
/// with all subscripts `<= max_subscript`, rewrite both ways, and normalize.
/// The system is locally confluent iff every such pair joins.
pub fn check_local_confluence(max_subscript: u32) -> ConfluenceReport {
    assert!(max_subscript >= 2, "need max_subscript >= 2");
    let mut alphabet = Vec::new();
    for i in 0..=max_subscript {
        alphabet.push(Letter::pos(i));
        alphabet.push(Letter::neg(i));
    }
    let mut checked = 0u64;
    let mut failures = Vec::new();
    for &a in &alphabet {
        for &b in &alphabet {
            let Some(ab) = rewrite_pair(a, b) else {
                continue;
            };
            for &e in &alphabet {
                let Some(be) = rewrite_pair(b, e) else {
                    continue;
                };
                checked += 1;
                let overlap = Word::from_letters(vec![a, b, e]);
                let left = Word::from_letters(vec![ab[0], ab[1], e]);
                let right = Word::from_letters(vec![a, be[0], be[1]]);
                let ln = sigma_normalize(&left);
                let rn = sigma_normalize(&right);
                if ln != rn {
                    failures.push(CriticalPairFailure {
                        overlap,
                        left: ln,
                        right: rn,
                    });
                }
            }
        }
    }
    ConfluenceReport {
        max_subscript,
        overlaps_checked: checked,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn standard_form_examples() {
        let sf = standard_form(&w("x0^-1 x1"));
        assert_eq!(sf.p.word(), w("x2"));
        assert_eq!(sf.q.word(), w("x0"));

        let sf = standard_form(&w("x1 x0"));
        assert_eq!(sf.p.word(), w("x0 x2"));
        assert!(sf.q.is_empty());

        let sf = standard_form(&w("x0^-1 x1 x0 x2^-1"));
        assert_eq!(sf.p.word(), w("x0 x3"));
        assert_eq!(sf.q.word(), w("x0 x3"));
    }

    #[test]
    fn length_preservation() {
        for s in ["x0^-1 x1 x0 x2^-1", "x1 x0 x1 x0^-1 x1^-1", "x0 x0 x1^-1"] {
            let v = w(s);
            let sf = standard_form(&v);
            assert_eq!(sf.p.len() + sf.q.len(), v.len());
        }
    }

    #[test]
    fn is_trivial_examples() {
        assert!(is_trivial(&w("x0^-1 x1 x0 x2^-1")));
        assert!(!is_trivial(&w("x0")));
        assert!(is_trivial(&Word::empty()));
    }

    #[test]
    fn nff_examples() {
        assert_eq!(to_nff(&w("x1 x3 x1^-1")), w("x2"));
        assert_eq!(to_nff(&w("x0 x1")), w("x0 x1"));
        assert_eq!(to_nff(&w("x1 x1^-1")), Word::empty());
        assert!(satisfies_nff_condition(&to_nff(&w("x1 x3 x1^-1"))));
        assert!(satisfies_nff_condition(&to_nff(&w("x0 x2 x2 x4^-1 x0^-1"))));
    }

    #[test]
    fn leftmost_and_random_strategies_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for s in [
            "x0^-1 x1 x0 x2^-1",
            "x1 x1 x0^-1 x0^-1 x1 x0",
            "x0 x1^-1 x0 x1^-1 x0^-1 x1",
        ] {
            let v = w(s);
            let a = sigma_normalize(&v);
            for _ in 0..10 {
                assert_eq!(sigma_normalize_random(&v, &mut rng), a);
            }
        }
    }

    #[test]
    fn confluence_subcases_a_b_c() {
        // Overlap of x_i^-1 x_j -> x_{j+1} x_i^-1 with x_j x_k -> x_k x_{j+1}
        // (i, k < j); the three subcases of the overlap x_i^-1 x_j x_k.
        let check = |i: u32, j: u32, k: u32, expect: &str| {
            let u = Word::from_letters(vec![
                Letter::pos(j + 1),
                Letter::neg(i),
                Letter::pos(k),
            ]);
            let v = Word::from_letters(vec![
                Letter::neg(i),
                Letter::pos(k),
                Letter::pos(j + 1),
            ]);
            assert_eq!(sigma_normalize(&u), w(expect));
            assert_eq!(sigma_normalize(&v), w(expect));
        };
        // a) i = k: join at x_i x_{j+2} x_i^-1
        check(0, 1, 0, "x0 x3 x0^-1");
        check(2, 5, 2, "x2 x7 x2^-1");
        // b) i < k: join at x_{k+1} x_{j+2} x_i^-1
        check(0, 5, 3, "x4 x7 x0^-1");
        // c) i > k: join at x_k x_{j+2} x_{i+1}^-1
        check(3, 5, 1, "x1 x7 x4^-1");
    }

    #[test]
    fn local_confluence_small() {
        let report = check_local_confluence(4);
        assert!(report.all_joinable(), "{report}");
        assert!(report.overlaps_checked > 0);
    }
}
