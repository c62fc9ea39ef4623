/// Subsets of `N = {1, ..., n}` as bitmasks; element `i` is bit `i - 1`.
pub type Subset = u32;

pub fn card(s: Subset) -> usize {
    s.count_ones() as usize
}

pub fn elements(s: Subset) -> Vec<usize> {
    (0..32).filter(|i| s >> i & 1 == 1).map(|i| i as usize + 1).collect()
}

pub fn singleton(k: usize) -> Subset {
    1 << (k - 1)
}

pub fn from_elements(xs: &[usize]) -> Subset {
    xs.iter().fold(0, |s, &k| s | singleton(k))
}

pub fn is_subset(a: Subset, b: Subset) -> bool {
    a & !b == 0
}

pub fn all_subsets(n: usize) -> impl Iterator<Item = Subset> {
    0..(1u32 << n)
}

/// Subsets of `s`, in increasing bitmask order.
pub fn subsets_of(s: Subset) -> Vec<Subset> {
    let mut out = Vec::new();
    let mut t: Subset = 0;
    loop {
        out.push(t);
        if t == s {
            break;
        }
        t = (t.wrapping_sub(s)) & s;
    }
    out
}

pub fn sign(e: usize) -> i64 {
    if e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `d_i(B)`: remove the `i`-th smallest element (1-based).
pub fn face(b: Subset, i: usize) -> Subset {
    let el = elements(b);
    b & !singleton(el[i - 1])
}

/// The total incidence number `[B:A]`, computed from the face decomposition
/// `A = d_{i_1} ... d_{i_k}(B)` with `i_1 < ... < i_k`.
pub fn total_incidence(b: Subset, a: Subset) -> i64 {
    if !is_subset(a, b) {
        return 0;
    }
    if a == b {
        return 1;
    }
    let el = elements(b);
    let idx: Vec<usize> = el
        .iter()
        .enumerate()
        .filter(|(_, &x)| a & singleton(x) == 0)
        .map(|(i, _)| i + 1)
        .collect();
    debug_assert_eq!(idx.iter().rev().fold(b, |s, &i| face(s, i)), a);
    sign(idx.len() + idx.iter().sum::<usize>())
}

/// `(-1)^κ` with `κ = #{(b, x) ∈ B × (B∖A) : b < x}`.
pub fn incidence_by_pairs(b: Subset, a: Subset) -> i64 {
    if !is_subset(a, b) {
        return 0;
    }
    let removed = elements(b & !a);
    let kappa: usize = removed.iter().map(|&x| elements(b).iter().filter(|&&y| y < x).count()).sum();
    sign(kappa)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let b = from_elements(&[1, 2, 3]);
        assert_eq!(total_incidence(b, b), 1);
        assert_eq!(total_incidence(from_elements(&[1]), from_elements(&[2])), 0);
        assert_eq!(total_incidence(from_elements(&[1, 2]), 0), -1);
        assert_eq!(total_incidence(b, from_elements(&[1, 3])), -1);
    }

    #[test]
    fn subset_enumeration() {
        let s = from_elements(&[1, 3]);
        assert_eq!(subsets_of(s), vec![0, 1, 4, 5]);
        assert_eq!(subsets_of(0), vec![0]);
    }
}
