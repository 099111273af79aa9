use super::KrausChannel;
use crate::linalg::ComplexMatrix;
use crate::{Error, Result};

/// Isometry `V: H_in → H_out ⊗ H_env`, output factor first.
#[derive(Debug, Clone, PartialEq)]
pub struct StinespringIsometry {
    in_dim: usize,
    out_dim: usize,
    env_dim: usize,
    v: ComplexMatrix,
}

impl StinespringIsometry {
    pub fn new(v: ComplexMatrix, out_dim: usize, env_dim: usize) -> Result<Self> {
        if v.rows() != out_dim * env_dim {
            return Err(Error::Dimension(format!(
                "isometry has {} rows, expected {out_dim}*{env_dim}",
                v.rows()
            )));
        }
        let in_dim = v.cols();
        let residual = (&v.adjoint() * &v).max_abs_diff(&ComplexMatrix::identity(in_dim))?;
        if residual > super::COMPLETENESS_TOL {
            return Err(Error::Precondition(format!(
                "V†V deviates from identity by {residual:e}"
            )));
        }
        Ok(Self {
            in_dim,
            out_dim,
            env_dim,
            v,
        })
    }

    /// Canonical dilation `V|ψ⟩ = Σ_k E_k|ψ⟩ ⊗ |k⟩`.
    pub fn from_kraus(ch: &KrausChannel) -> Self {
        let (din, dout) = (ch.in_dim(), ch.out_dim());
        let env = ch.kraus().len();
        let mut v = ComplexMatrix::zeros(dout * env, din);
        for (k, e) in ch.kraus().iter().enumerate() {
            for j in 0..dout {
                for i in 0..din {
                    v[(j * env + k, i)] = e[(j, i)];
                }
            }
        }
        Self {
            in_dim: din,
            out_dim: dout,
            env_dim: env,
            v,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn env_dim(&self) -> usize {
        self.env_dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.v
    }

    /// Kraus operators `⟨k|_env V`.
    pub fn channel(&self) -> KrausChannel {
        let kraus = (0..self.env_dim)
            .map(|k| self.slice(|j, i| (j * self.env_dim + k, i), self.out_dim))
            .collect();
        KrausChannel {
            in_dim: self.in_dim,
            out_dim: self.out_dim,
            kraus,
        }
    }

    /// Kraus operators `⟨j|_out V`, mapping the input to the environment.
    pub fn complementary_channel(&self) -> KrausChannel {
        let kraus = (0..self.out_dim)
            .map(|j| self.slice(|k, i| (j * self.env_dim + k, i), self.env_dim))
            .collect();
        KrausChannel {
            in_dim: self.in_dim,
            out_dim: self.env_dim,
            kraus,
        }
    }

    fn slice(&self, index: impl Fn(usize, usize) -> (usize, usize), rows: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(rows, self.in_dim);
        for r in 0..rows {
            for i in 0..self.in_dim {
                m[(r, i)] = self.v[index(r, i)];
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{choi_distance, make_ad, random_channel};
    use crate::linalg::c;

    #[test]
    fn roundtrip_through_kraus() {
        let ch = random_channel(2, 3, 4, 1).unwrap();
        let iso = StinespringIsometry::from_kraus(&ch);
        assert_eq!(iso.env_dim(), 4);
        assert_eq!(iso.channel(), ch);
        let checked = StinespringIsometry::new(iso.matrix().clone(), 3, 4).unwrap();
        assert_eq!(checked, iso);
    }

    #[test]
    fn rejects_non_isometry() {
        let v = ComplexMatrix::identity(4).scale(c(0.9));
        assert!(StinespringIsometry::new(v.clone(), 2, 2).is_err());
        assert!(StinespringIsometry::new(v, 3, 2).is_err());
    }

    #[test]
    fn complement_of_ad() {
        let iso = StinespringIsometry::from_kraus(&make_ad(0.35).unwrap());
        let comp = iso.complementary_channel();
        assert!(choi_distance(&comp, &make_ad(0.65).unwrap()).unwrap() < 1e-15);
    }
}
