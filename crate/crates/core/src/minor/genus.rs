//! Closed-form genus facts used for configuration defaults and certification.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenusError {
    #[error("K_{{m,n}} genus formula needs m, n >= 2 (got {m}, {n})")]
    TooSmallBipartite { m: u64, n: u64 },
    #[error("edge bound needs at least 3 vertices (got {0})")]
    TooFewVertices(u64),
}

fn check_bipartite(m: u64, n: u64) -> Result<u64, GenusError> {
    if m < 2 || n < 2 {
        return Err(GenusError::TooSmallBipartite { m, n });
    }
    Ok((m - 2) * (n - 2))
}

/// Orientable genus of `K_{m,n}`: `ceil((m-2)(n-2)/4)`.
pub fn k_mn_genus(m: u64, n: u64) -> Result<u64, GenusError> {
    Ok(check_bipartite(m, n)?.div_ceil(4))
}

/// Non-orientable genus of `K_{m,n}`: `ceil((m-2)(n-2)/2)`.
pub fn k_mn_nonorientable_genus(m: u64, n: u64) -> Result<u64, GenusError> {
    Ok(check_bipartite(m, n)?.div_ceil(2))
}

/// Maximum edge count of a simple graph on `n >= 3` vertices embeddable on
/// the orientable surface of genus `g`: `3n + 6g - 6`.
pub fn euler_edge_bound(n: u64, g: u64) -> Result<u64, GenusError> {
    if n < 3 {
        return Err(GenusError::TooFewVertices(n));
    }
    Ok(3 * n + 6 * g - 6)
}

/// Non-orientable counterpart: `3n + 3g - 3` for non-orientable genus `g`.
pub fn euler_edge_bound_nonorientable(n: u64, g: u64) -> Result<u64, GenusError> {
    if n < 3 {
        return Err(GenusError::TooFewVertices(n));
    }
    Ok(3 * n + 3 * g - 3)
}

/// Size of the larger side of the complete bipartite graph `K_{t,3}` that
/// every graph of orientable genus `g` excludes as a minor.
pub fn excluded_t(g: u64) -> u64 {
    4 * g + 3
}

/// Same for non-orientable genus.
pub fn excluded_t_nonorientable(g: u64) -> u64 {
    2 * g + 3
}

/// Orientable genus of `K_n` (Ringel and Youngs).
pub fn complete_graph_genus(n: u64) -> u64 {
    if n < 4 {
        0
    } else {
        ((n - 3) * (n - 4)).div_ceil(12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bipartite_genus() {
        assert_eq!(k_mn_genus(3, 3), Ok(1));
        assert_eq!(k_mn_genus(7, 3), Ok(2));
        for n in 2..20 {
            assert_eq!(k_mn_genus(2, n), Ok(0));
        }
        assert_eq!(k_mn_nonorientable_genus(3, 3), Ok(1));
        assert_eq!(k_mn_nonorientable_genus(4, 4), Ok(2));
        assert!(k_mn_genus(1, 5).is_err());
    }

    #[test]
    fn edge_bounds() {
        assert_eq!(euler_edge_bound(10, 0), Ok(24));
        assert_eq!(euler_edge_bound(3, 0), Ok(3));
        assert_eq!(euler_edge_bound(7, 1), Ok(21));
        assert_eq!(euler_edge_bound(2, 0), Err(GenusError::TooFewVertices(2)));
        assert_eq!(euler_edge_bound_nonorientable(6, 1), Ok(18));
    }

    #[test]
    fn exclusion_and_complete_graphs() {
        assert_eq!(excluded_t(0), 3);
        assert_eq!(excluded_t(1), 7);
        assert_eq!(excluded_t_nonorientable(1), 5);
        let known = [(4, 0), (5, 1), (7, 1), (8, 2), (9, 3), (10, 4), (12, 6)];
        for (n, g) in known {
            assert_eq!(complete_graph_genus(n), g, "K_{n}");
        }
    }
}
