//! Basis changes: contract coordinate tensors against a frame.
//!
//! A frame is given by its column vectors (coordinate components of each
//! frame field at a point). `T_frame[a][b] = Σ T_ij Eᵢ_a Eʲ_b` and the
//! analogous contraction for higher ranks.

use crate::geometry::metric::GeometryError;
use crate::linalg;

fn check_frame(dim: usize, frame: &[Vec<f64>]) -> Result<(), GeometryError> {
    if frame.len() != dim || frame.iter().any(|c| c.len() != dim) {
        return Err(GeometryError::DimensionMismatch {
            expected: dim,
            got: frame.len(),
        });
    }
    let mut m = vec![0.0; dim * dim];
    for (a, col) in frame.iter().enumerate() {
        for i in 0..dim {
            m[i * dim + a] = col[i];
        }
    }
    if linalg::det(dim, &m).abs() < linalg::SINGULARITY_TOL {
        return Err(GeometryError::DegenerateFrame);
    }
    Ok(())
}

/// Rank-2 covariant tensor pushed to the frame basis.
pub fn rank2_to_frame(
    dim: usize,
    tensor: &[f64],
    frame: &[Vec<f64>],
) -> Result<Vec<f64>, GeometryError> {
    check_frame(dim, frame)?;
    let mut out = vec![0.0; dim * dim];
    for a in 0..dim {
        for b in 0..dim {
            let mut s = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    s += tensor[i * dim + j] * frame[a][i] * frame[b][j];
                }
            }
            out[a * dim + b] = s;
        }
    }
    Ok(out)
}

/// Rank-3 covariant tensor (flattened `[i][j][k]`) pushed to the frame basis.
pub fn rank3_to_frame(
    dim: usize,
    tensor: &[f64],
    frame: &[Vec<f64>],
) -> Result<Vec<f64>, GeometryError> {
    check_frame(dim, frame)?;
    let n = dim;
    let mut out = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut s = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            s += tensor[(i * n + j) * n + k]
                                * frame[a][i]
                                * frame[b][j]
                                * frame[c][k];
                        }
                    }
                }
                out[(a * n + b) * n + c] = s;
            }
        }
    }
    Ok(out)
}

/// Rank-4 covariant tensor (flattened `[i][j][k][l]`) pushed to the frame
/// basis.
pub fn rank4_to_frame(
    dim: usize,
    tensor: &[f64],
    frame: &[Vec<f64>],
) -> Result<Vec<f64>, GeometryError> {
    check_frame(dim, frame)?;
    let n = dim;
    let mut out = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut s = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            for k in 0..n {
                                for l in 0..n {
                                    s += tensor[((i * n + j) * n + k) * n + l]
                                        * frame[a][i]
                                        * frame[b][j]
                                        * frame[c][k]
                                        * frame[d][l];
                                }
                            }
                        }
                    }
                    out[((a * n + b) * n + c) * n + d] = s;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_frame_leaves_tensor_unchanged() {
        let t = vec![1.0, 2.0, 3.0, 4.0];
        let frame = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(rank2_to_frame(2, &t, &frame).unwrap(), t);
    }

    #[test]
    fn degenerate_frame_rejected() {
        let t = vec![0.0; 4];
        let frame = vec![vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(matches!(
            rank2_to_frame(2, &t, &frame),
            Err(GeometryError::DegenerateFrame)
        ));
    }
}
