use nalgebra::{DMatrix, DVector};

use crate::game::{GameSpec, JointStrategy};

/// Agreement required between the block-algebra and closed-form Schur complements.
pub const SCHUR_REL_TOL: f64 = 1e-10;

/// Symmetrised Jacobian of the stacked profit gradients at one point, with
/// the pieces of its Schur-complement test.
///
/// All blocks are diagonal, so they are stored as vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcavityCertificate {
    pub gamma: DMatrix<f64>,
    pub m_aa: DVector<f64>,
    pub m_bb: DVector<f64>,
    pub m_s: DVector<f64>,
    /// `2 M_bb - M_s (2 M_aa)^-1 M_s`, from the blocks.
    pub schur: DVector<f64>,
    /// The same complement from its simplified per-region formula.
    pub schur_closed_form: DVector<f64>,
    /// Largest relative gap between the two Schur routes.
    pub schur_gap: f64,
    pub max_eigenvalue_gamma: f64,
    pub negative_definite: bool,
}

impl ConcavityCertificate {
    pub fn schur_consistent(&self) -> bool {
        self.schur_gap <= SCHUR_REL_TOL
    }

    /// Largest eigenvalue of the `(j, m + j)` block of `gamma`.
    pub fn block_max_eigenvalue(&self, j: usize) -> f64 {
        let (a, b, s) = (self.m_aa[j], self.m_bb[j], self.m_s[j]);
        a + b + ((a - b) * (a - b) + s * s).sqrt()
    }
}

pub fn concavity_certificate(spec: &GameSpec, joint: &JointStrategy) -> ConcavityCertificate {
    let m = spec.num_regions();
    let (xa, xb) = (joint.a(), joint.b());
    let mut m_aa = DVector::zeros(m);
    let mut m_bb = DVector::zeros(m);
    let mut m_s = DVector::zeros(m);
    let mut schur_closed_form = DVector::zeros(m);
    for (j, r) in spec.regions().iter().enumerate() {
        let (bm, eps) = (r.beta_m(), r.epsilon());
        let t3 = (xa[j] + xb[j] + eps).powi(3);
        m_aa[j] = -2.0 * bm * (xb[j] + eps) / t3;
        m_bb[j] = -2.0 * bm * (xa[j] + eps) / t3;
        m_s[j] = -2.0 * bm * eps / t3;
        schur_closed_form[j] = -bm * (4.0 * xa[j] + eps * (4.0 - eps / (eps + xb[j]))) / t3;
    }

    let mut gamma = DMatrix::zeros(2 * m, 2 * m);
    for j in 0..m {
        gamma[(j, j)] = 2.0 * m_aa[j];
        gamma[(m + j, m + j)] = 2.0 * m_bb[j];
        gamma[(j, m + j)] = m_s[j];
        gamma[(m + j, j)] = m_s[j];
    }

    let schur = DVector::from_fn(m, |j, _| 2.0 * m_bb[j] - 0.5 * m_s[j] * m_s[j] / m_aa[j]);
    let schur_gap = schur
        .iter()
        .zip(schur_closed_form.iter())
        .map(|(x, y)| (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);

    let mut cert = ConcavityCertificate {
        gamma,
        m_aa,
        m_bb,
        m_s,
        schur,
        schur_closed_form,
        schur_gap,
        max_eigenvalue_gamma: f64::NEG_INFINITY,
        negative_definite: false,
    };
    cert.max_eigenvalue_gamma = (0..m).map(|j| cert.block_max_eigenvalue(j)).fold(f64::NEG_INFINITY, f64::max);
    cert.negative_definite = cert.max_eigenvalue_gamma < 0.0;
    cert
}
