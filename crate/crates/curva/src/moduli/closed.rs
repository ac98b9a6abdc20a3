//! Closed forms for the ordinary multiple point and the ⟨n,m⟩/nm class.
//!
//! These are evaluated straight from the formulas and share nothing with
//! the jet machinery they are compared against.

/// Membership in the numerical semigroup ⟨n,m⟩.
pub fn in_semigroup(n: u64, m: u64, v: i64) -> bool {
    if v < 0 {
        return false;
    }
    let v = v as u64;
    (0..=v / m).any(|b| (v - b * m) % n == 0)
}

/// Whether k lies in ⟨n,m⟩ − n.
fn in_shifted(n: u64, m: u64, k: i64) -> bool {
    in_semigroup(n, m, k + n as i64)
}

/// Fibers of Γ at (k,…,k) for r lines in general position: nonempty
/// exactly when ♯J ≥ r − k.
pub fn ordinary_fiber_rule(r: usize, j_len: usize, k: u64) -> bool {
    j_len > 0 && j_len as u64 + k >= r as u64
}

/// Fibers of Γ at (k,…,k) for the ⟨n,m⟩/nm class.
pub fn nm_fiber_rule(n: u64, m: u64, r: usize, j_len: usize, k: u64) -> bool {
    if j_len == 0 {
        return false;
    }
    if k >= r as u64 * n * m {
        return true;
    }
    if !in_semigroup(n, m, k as i64) {
        return false;
    }
    let c = k / (n * m);
    let need = if in_semigroup(n, m, (k - c * n * m) as i64) { r as i64 - c as i64 } else { r as i64 - c as i64 + 1 };
    j_len as i64 >= need
}

/// e(k) for r lines in general position; e(1) = min(3, r) by convention.
pub fn ordinary_e(r: usize, k: usize) -> usize {
    match k {
        0 => 0,
        1 => r.min(3),
        2 => r.min(4),
        _ => r.min(2 * k + 1),
    }
}

/// Dimension of the moduli of r lines in general position.
pub fn ordinary_dimension(r: usize) -> usize {
    if r <= 3 {
        return 0;
    }
    if r % 2 == 0 {
        (r - 2) * (r - 2) / 4
    } else {
        (r - 1) * (r - 3) / 4
    }
}

/// e(k) for the (2,3) class with r ≥ 2 branches, k ≥ 4.
pub fn nm23_e(r: usize, k: usize) -> usize {
    match k {
        4 => r.min(2),
        5 => 1,
        _ if r % 2 == 0 && r >= 4 && k == 3 * r - 1 => r,
        _ if k % 6 == 4 => r.min(2 * (k / 6) + 3),
        _ => r.min(2 * (k / 6) + 1),
    }
}

/// Dimension of the generic component for the (2,3) class.
pub fn nm23_dimension(r: usize) -> usize {
    if r <= 1 {
        return 0;
    }
    let base = (r - 1) * (3 * r - 5);
    if r % 2 == 1 {
        base / 2
    } else {
        (base + 1) / 2
    }
}

/// The two lowest orders above m for a generic member of the ⟨n,m⟩/nm
/// class. `None` where the closed form is not available.
pub fn nm_e_low(n: u64, m: u64, r: usize, k: u64) -> Option<usize> {
    let near = m == n + 1;
    let wraps = (m + 1) % n == 0;
    if k == m + 1 {
        return Some(match (near, wraps) {
            (false, false) => 0,
            (true, true) => r.min(2),
            _ => r.min(1),
        });
    }
    if k == m + 2 {
        return match (near, wraps) {
            (false, false) => None,
            (true, false) => Some(if n == 3 { r.min(1) } else { 0 }),
            (false, true) => Some(if m == n + 2 || n == 2 { r.min(1) } else { 0 }),
            (true, true) => Some(r.min(1)),
        };
    }
    None
}

/// Generic dimension from an e-profile over k > m, including the
/// irreducible cases with a single analytic type.
pub fn nm_dimension_from_profile(n: u64, m: u64, r: usize, e_above_m: &[usize]) -> usize {
    if r == 1 && (n == 2 || (n == 3 && (m == 4 || m == 5))) {
        return 0;
    }
    let free: usize = e_above_m.iter().map(|&e| r - e).sum();
    r + free - 2
}

/// Exponent support of the pre-normal form: for each branch, the orders
/// j ≥ m of the y-coordinate that may carry a coefficient.
pub fn pre_normal_support(n: u64, m: u64, r: usize) -> Vec<Vec<u64>> {
    let nm = n * m;
    let mut out = Vec::with_capacity(r);
    let mut first = vec![m];
    first.extend((m + 1..nm - n).filter(|&j| !in_shifted(n, m, j as i64)));
    out.push(first);
    for i in 2..=r as u64 {
        let lo = (i - 1) * nm - n;
        let mut s: Vec<u64> = (m..lo).collect();
        s.extend((lo..i * nm - n).filter(|&j| !in_shifted(n, m, j as i64 - ((i - 1) * nm) as i64)));
        out.push(s);
    }
    out
}

/// Orders above the slope kept by the generic normal form for r lines in
/// general position, branch by branch (the first four carry none).
pub fn ordinary_support(r: usize) -> Vec<Vec<usize>> {
    (1..=r)
        .map(|i| if i < 5 { Vec::new() } else { std::iter::once(2).chain(3..=(i - 2) / 2).collect() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fiber_rules() {
        assert!(ordinary_fiber_rule(4, 2, 2));
        assert!(!ordinary_fiber_rule(4, 1, 2));
        assert!(ordinary_fiber_rule(5, 1, 4));
        // two cusps: Γ at (6,6) has fibers of every size, (5,5) none
        assert!(nm_fiber_rule(2, 3, 2, 1, 6));
        assert!(!nm_fiber_rule(2, 3, 2, 2, 1));
        assert!(nm_fiber_rule(2, 3, 2, 2, 4));
        assert!(!nm_fiber_rule(2, 3, 2, 1, 4));
    }

    #[test]
    fn dimensions() {
        assert_eq!((4..=8).map(ordinary_dimension).collect::<Vec<_>>(), vec![1, 2, 4, 6, 9]);
        assert_eq!((2..=5).map(nm23_dimension).collect::<Vec<_>>(), vec![1, 4, 11, 20]);
    }

    #[test]
    fn e_profiles_sum_to_the_dimensions() {
        for r in 5..=9 {
            let free: usize = (1..4 * r).map(|k| r - ordinary_e(r, k)).sum();
            assert_eq!(free - 1, ordinary_dimension(r), "r={r}");
        }
        for r in 2..=7 {
            let e: Vec<usize> = (4..12 * r).map(|k| nm23_e(r, k)).collect();
            assert_eq!(nm_dimension_from_profile(2, 3, r, &e), nm23_dimension(r), "r={r}");
        }
    }

    #[test]
    fn pre_normal_patterns() {
        assert_eq!(pre_normal_support(2, 3, 1), vec![vec![3]]);
        assert_eq!(pre_normal_support(2, 3, 2), vec![vec![3], vec![3, 5]]);
        assert_eq!(pre_normal_support(3, 4, 1), vec![vec![4]]);
        assert_eq!(pre_normal_support(2, 5, 1), vec![vec![5]]);
        assert_eq!(ordinary_support(7)[6], vec![2]);
        assert_eq!(ordinary_support(9)[8], vec![2, 3]);
    }
}
