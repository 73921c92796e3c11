//! Lexicographic enumeration of the design space.
//!
//! With label symmetry on, only designs in first-occurrence form are produced:
//! label `j + 1` never appears before label `j` has, so position 0 always
//! holds treatment 1.

use crate::lnem::Design;

/// Size of the design space on `n` positions and `m` treatments:
/// `m^n`, or `sum_{k=1..m} S(n, k)` with label symmetry.
pub fn design_space_size(n: usize, m: usize, label_symmetry: bool) -> u128 {
    if !label_symmetry {
        return (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    }
    if n == 0 {
        return 1;
    }
    // Stirling numbers of the second kind by the usual recurrence.
    let mut row = vec![0u128; m + 1];
    row[0] = 1;
    for _ in 0..n {
        for k in (1..=m).rev() {
            row[k] = (k as u128).saturating_mul(row[k]).saturating_add(row[k - 1]);
        }
        row[0] = 0;
    }
    row[1..].iter().fold(0u128, |acc, &v| acc.saturating_add(v))
}

/// Iterator over designs in lexicographic order, optionally restricted to
/// first-occurrence label form, with an optional fixed prefix.
#[derive(Clone, Debug)]
pub struct DesignEnumerator {
    m: u8,
    label_symmetry: bool,
    fixed: usize,
    current: Vec<u8>,
    /// `prefix_max[i]` = max of `current[..=i]`
    prefix_max: Vec<u8>,
    started: bool,
    done: bool,
}

impl DesignEnumerator {
    pub fn new(n: usize, m: usize, label_symmetry: bool) -> Self {
        Self::with_prefix(&[], n, m, label_symmetry)
    }

    /// Designs of length `n` that start with `prefix`. The prefix must itself
    /// be admissible; otherwise the iterator is empty.
    pub fn with_prefix(prefix: &[u8], n: usize, m: usize, label_symmetry: bool) -> Self {
        assert!((1..=256).contains(&m), "treatment count out of range");
        let m = (m - 1) as u8;
        let mut current = prefix.to_vec();
        current.resize(n, 0);
        let mut prefix_max = vec![0u8; n];
        let mut done = prefix.len() > n;
        let mut running: Option<u8> = None;
        for i in 0..n.min(current.len()) {
            let v = current[i];
            let limit = if label_symmetry {
                running.map_or(0, |r| r.saturating_add(1)).min(m)
            } else {
                m
            };
            if i < prefix.len() && v > limit {
                done = true;
            }
            running = Some(running.map_or(v, |r| r.max(v)));
            prefix_max[i] = running.unwrap_or(0);
        }
        DesignEnumerator {
            m,
            label_symmetry,
            fixed: prefix.len().min(n),
            current,
            prefix_max,
            started: false,
            done,
        }
    }

    fn limit(&self, i: usize) -> u8 {
        if !self.label_symmetry {
            return self.m;
        }
        if i == 0 {
            return 0;
        }
        self.prefix_max[i - 1].saturating_add(1).min(self.m)
    }

    fn advance(&mut self) -> bool {
        let n = self.current.len();
        let mut i = n;
        while i > self.fixed {
            i -= 1;
            if self.current[i] < self.limit(i) {
                self.current[i] += 1;
                self.prefix_max[i] = if i == 0 {
                    self.current[i]
                } else {
                    self.prefix_max[i - 1].max(self.current[i])
                };
                for j in (i + 1)..n {
                    self.current[j] = 0;
                    self.prefix_max[j] = self.prefix_max[j - 1];
                }
                return true;
            }
        }
        false
    }

    /// Advances in place and returns the current design, avoiding a clone.
    pub fn next_slice(&mut self) -> Option<&[u8]> {
        if self.done {
            return None;
        }
        if self.started {
            if !self.advance() {
                self.done = true;
                return None;
            }
        } else {
            self.started = true;
        }
        Some(&self.current)
    }
}

impl Iterator for DesignEnumerator {
    type Item = Design;

    fn next(&mut self) -> Option<Design> {
        self.next_slice().map(|s| Design::new(s.to_vec()))
    }
}

/// Lexicographic successor of `x` within the (possibly label-restricted)
/// space, or `None` at the end.
pub fn lexicographic_successor(x: &Design, m: usize, label_symmetry: bool) -> Option<Design> {
    let mut e = DesignEnumerator::with_prefix(&[], x.len(), m, label_symmetry);
    e.current = x.as_slice().to_vec();
    let mut running = 0u8;
    for (i, &v) in x.as_slice().iter().enumerate() {
        running = if i == 0 { v } else { running.max(v) };
        e.prefix_max[i] = running;
    }
    e.started = true;
    e.next()
}

/// Whether `x` is in first-occurrence label form.
pub fn is_label_canonical(x: &[u8]) -> bool {
    let mut next_new = 0u8;
    for &v in x {
        if v > next_new {
            return false;
        }
        if v == next_new {
            next_new = next_new.saturating_add(1);
        }
    }
    true
}
