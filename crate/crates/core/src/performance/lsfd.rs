use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{col, complex_normal_vector, dot_h, CMatrix, CVector, C64, ZERO};

/// Received data signal at every node,
/// `y_n = sqrt(p_u) sum_k sqrt(eta_k) h_kn x_k + z_n` with `z_n ~ CN(0, sigma^2 I)`.
pub fn synthesize_uplink<R: Rng + ?Sized>(
    h: &[CMatrix],
    eta: &[f64],
    symbols: &[C64],
    p_u: f64,
    sigma2: f64,
    rng: &mut R,
) -> Result<Vec<CVector>> {
    if eta.len() != symbols.len() {
        return Err(Error::Dimension(format!("{} powers for {} symbols", eta.len(), symbols.len())));
    }
    let amplitude: Vec<C64> = eta
        .iter()
        .zip(symbols)
        .map(|(e, x)| x * (p_u * e).sqrt())
        .collect();
    let noise = C64::new(sigma2.sqrt(), 0.0);
    h.iter()
        .map(|h_node| {
            if h_node.ncols() != symbols.len() {
                return Err(Error::Dimension(format!("{} channel columns for {} users", h_node.ncols(), symbols.len())));
            }
            let tx = CVector::from_column_slice(&amplitude);
            let mut y = h_node * tx;
            if sigma2 > 0.0 {
                y += complex_normal_vector(h_node.nrows(), rng) * noise;
            }
            Ok(y)
        })
        .collect()
}

/// Sum of local soft estimates, `x_k = sum_n v_kn^H y_n`, for every user.
pub fn lsfd_soft_estimate(combiners: &[CMatrix], y: &[CVector]) -> Result<Vec<C64>> {
    if combiners.len() != y.len() {
        return Err(Error::Dimension(format!("{} combiner nodes for {} received signals", combiners.len(), y.len())));
    }
    let k = combiners.first().map_or(0, |v| v.ncols());
    let mut out = vec![ZERO; k];
    for (v, yn) in combiners.iter().zip(y) {
        if v.nrows() != yn.len() || v.ncols() != k {
            return Err(Error::Dimension(format!("combiner {}x{} against signal of length {}", v.nrows(), v.ncols(), yn.len())));
        }
        for (u, slot) in out.iter_mut().enumerate() {
            *slot += dot_h(col(v, u), yn.as_slice());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::complex_normal;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn noise_free_mr_is_coherent_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h: Vec<CMatrix> = [5usize, 2, 2]
            .iter()
            .map(|&n| CMatrix::from_fn(n, 1, |_, _| complex_normal(&mut rng)))
            .collect();
        let x = C64::new(0.6, -0.8);
        let p_u = 0.2;
        let y = synthesize_uplink(&h, &[1.0], &[x], p_u, 0.0, &mut rng).unwrap();
        let est = lsfd_soft_estimate(&h, &y).unwrap()[0];
        let ratio = est / x;
        let expect: f64 = h.iter().map(|hn| dot_h(col(hn, 0), col(hn, 0)).re).sum::<f64>() * p_u.sqrt();
        assert!(ratio.im.abs() < 1e-12 * expect);
        assert!((ratio.re / expect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_combiners_give_zero() {
        let y = vec![CVector::from_element(3, C64::new(1.0, 1.0))];
        let v = vec![CMatrix::zeros(3, 2)];
        assert_eq!(lsfd_soft_estimate(&v, &y).unwrap(), vec![ZERO; 2]);
    }

    #[test]
    fn single_node_is_plain_inner_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let v = vec![CMatrix::from_fn(4, 2, |_, _| complex_normal(&mut rng))];
        let y = vec![complex_normal_vector(4, &mut rng)];
        let est = lsfd_soft_estimate(&v, &y).unwrap();
        assert_eq!(est[1], dot_h(col(&v[0], 1), y[0].as_slice()));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let v = vec![CMatrix::zeros(3, 1)];
        let y = vec![CVector::zeros(4)];
        assert!(matches!(lsfd_soft_estimate(&v, &y), Err(Error::Dimension(_))));
        assert!(lsfd_soft_estimate(&v, &[]).is_err());
    }
}
