//! Perfect matchings on the support graph and Hall violators.

use serde::Serialize;

use super::nonneg::NonNegMatrix;

/// A perfect matching `i ↦ σ(i)` on the support, or rows `S` whose
/// neighborhood `N(S)` is smaller than `S`. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum MatchingCertificate {
    Perfect {
        permutation: Vec<usize>,
    },
    HallViolator {
        rows: Vec<usize>,
        neighborhood: Vec<usize>,
    },
}

impl MatchingCertificate {
    /// Exact check against the support of `a`.
    pub fn verify(&self, a: &NonNegMatrix) -> bool {
        let n = a.n();
        match self {
            MatchingCertificate::Perfect { permutation } => {
                let mut seen = vec![false; n];
                permutation.len() == n
                    && permutation.iter().enumerate().all(|(i, &j)| {
                        j < n && !std::mem::replace(&mut seen[j], true) && a.is_positive_at(i, j)
                    })
            }
            MatchingCertificate::HallViolator { rows, neighborhood } => {
                let mut nb: Vec<usize> = rows
                    .iter()
                    .flat_map(|&i| (0..n).filter(move |&j| a.is_positive_at(i, j)))
                    .collect();
                nb.sort_unstable();
                nb.dedup();
                rows.iter().all(|&i| i < n)
                    && nb == *neighborhood
                    && neighborhood.len() < rows.len()
            }
        }
    }

    pub fn permutation(&self) -> Option<&[usize]> {
        match self {
            MatchingCertificate::Perfect { permutation } => Some(permutation),
            MatchingCertificate::HallViolator { .. } => None,
        }
    }

    pub fn violator(&self) -> Option<(&[usize], &[usize])> {
        match self {
            MatchingCertificate::HallViolator { rows, neighborhood } => Some((rows, neighborhood)),
            MatchingCertificate::Perfect { .. } => None,
        }
    }
}

/// Maximum matching on a bipartite graph given by row adjacency lists.
/// Returns `match_of_col`.
pub(crate) fn max_matching(adj: &[Vec<usize>], ncols: usize) -> Vec<Option<usize>> {
    fn augment(
        u: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        match_col: &mut [Option<usize>],
    ) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if match_col[v].is_none_or(|w| augment(w, adj, seen, match_col)) {
                match_col[v] = Some(u);
                return true;
            }
        }
        false
    }
    let mut match_col = vec![None; ncols];
    for u in 0..adj.len() {
        let mut seen = vec![false; ncols];
        augment(u, adj, &mut seen, &mut match_col);
    }
    match_col
}

/// Decides whether the support of `a` has a perfect matching, returning either
/// the matching or a Hall violator built from alternating paths.
pub fn is_scalable(a: &NonNegMatrix) -> (bool, MatchingCertificate) {
    let n = a.n();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| a.is_positive_at(i, j)).collect())
        .collect();
    let match_col = max_matching(&adj, n);
    let mut match_row = vec![None; n];
    for (j, m) in match_col.iter().enumerate() {
        if let Some(i) = *m {
            match_row[i] = Some(j);
        }
    }
    if let Some(free) = (0..n).find(|&i| match_row[i].is_none()) {
        // Rows and columns reachable from `free` by alternating paths.
        let mut row_seen = vec![false; n];
        let mut col_seen = vec![false; n];
        let mut stack = vec![free];
        row_seen[free] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if col_seen[v] {
                    continue;
                }
                col_seen[v] = true;
                if let Some(w) = match_col[v] {
                    if !row_seen[w] {
                        row_seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        let rows = (0..n).filter(|&i| row_seen[i]).collect();
        let neighborhood = (0..n).filter(|&j| col_seen[j]).collect();
        return (
            false,
            MatchingCertificate::HallViolator { rows, neighborhood },
        );
    }
    let permutation = match_row.into_iter().map(|j| j.expect("perfect")).collect();
    (true, MatchingCertificate::Perfect { permutation })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(bits: u32) -> bool {
        const PERMS: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        PERMS
            .iter()
            .any(|p| (0..3).all(|i| bits >> (3 * i + p[i]) & 1 == 1))
    }

    fn support_matrix(bits: u32) -> NonNegMatrix {
        let rows: Vec<Vec<i64>> = (0..3)
            .map(|i| (0..3).map(|j| (bits >> (3 * i + j) & 1) as i64).collect())
            .collect();
        NonNegMatrix::from_i64_rows(&rows).unwrap()
    }

    #[test]
    fn identity_matches() {
        let (ok, cert) = is_scalable(&NonNegMatrix::identity(3));
        assert!(ok);
        assert_eq!(cert.permutation(), Some(&[0usize, 1, 2][..]));
    }

    #[test]
    fn shared_column_violates_hall() {
        let a = NonNegMatrix::from_i64_rows(&[vec![0, 1], vec![0, 1]]).unwrap();
        let (ok, cert) = is_scalable(&a);
        assert!(!ok);
        assert_eq!(
            cert,
            MatchingCertificate::HallViolator {
                rows: vec![0, 1],
                neighborhood: vec![1]
            }
        );
        assert!(cert.verify(&a));
    }

    #[test]
    fn all_three_by_three_supports() {
        for bits in 0..512u32 {
            let a = support_matrix(bits);
            let (ok, cert) = is_scalable(&a);
            assert_eq!(ok, brute_force(bits), "support {bits:09b}");
            assert!(cert.verify(&a));
        }
    }
}
