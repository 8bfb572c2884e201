use crate::error::{Error, Result};
use crate::spectral::{dealias, Complex64, SpectralField};

use super::fma_into;

/// Velocity from vorticity, `u = -curl Δ⁻¹ ω`, with zero mean. In 2D
/// `ω` is scalar and `u = (-∂_y ψ, ∂_x ψ)` with `Δψ = ω`.
pub fn biot_savart(omega: &SpectralField) -> Result<SpectralField> {
    let g = omega.grid();
    match (g.dim(), omega.components()) {
        (2, 1) => {
            let mut u = SpectralField::zeros(g, 2);
            let w = omega.comp(0);
            for i in 1..g.len() {
                if g.is_nyquist(i) {
                    continue;
                }
                let k = g.wavevector(i);
                let psi = -w[i] / g.ksq(i);
                u.comp_mut(0)[i] = Complex64::new(0.0, -(k[1] as f64)) * psi;
                u.comp_mut(1)[i] = Complex64::new(0.0, k[0] as f64) * psi;
            }
            Ok(u)
        }
        (3, 3) => {
            let mut worst = 0.0f64;
            let mut scale = 0.0f64;
            for i in 0..g.len() {
                let k = g.wavevector(i);
                let mut div = Complex64::default();
                for a in 0..3 {
                    div += omega.comp(a)[i] * k[a] as f64;
                    scale = scale.max(omega.comp(a)[i].norm() * g.ksq(i).sqrt());
                }
                if !g.is_nyquist(i) {
                    worst = worst.max(div.norm());
                }
            }
            if worst > 1e-9 * scale {
                return Err(Error::Validation(format!(
                    "vorticity is not divergence-free (|k·ω̂| up to {worst:.3e})"
                )));
            }
            let mut u = SpectralField::zeros(g, 3);
            for i in 1..g.len() {
                if g.is_nyquist(i) {
                    continue;
                }
                let k = g.wavevector(i).map(|v| v as f64);
                let ks = g.ksq(i);
                let w = [omega.comp(0)[i], omega.comp(1)[i], omega.comp(2)[i]];
                // i k × ω̂ / |k|²
                let cr = [
                    w[2] * k[1] - w[1] * k[2],
                    w[0] * k[2] - w[2] * k[0],
                    w[1] * k[0] - w[0] * k[1],
                ];
                for a in 0..3 {
                    u.comp_mut(a)[i] = Complex64::new(0.0, 1.0) * cr[a] / ks;
                }
            }
            Ok(u)
        }
        (d, c) => Err(Error::Shape(format!(
            "Biot-Savart needs a scalar 2D or 3-component 3D vorticity, got dim {d} with {c} components"
        ))),
    }
}

/// Curl of a 2D (scalar result) or 3D (vector result) velocity.
pub fn curl(u: &SpectralField) -> Result<SpectralField> {
    let g = u.grid();
    match (g.dim(), u.components()) {
        (2, 2) => {
            let a = u.component_field(1).derivative(0);
            let b = u.component_field(0).derivative(1);
            Ok(a.sub(&b))
        }
        (3, 3) => {
            let d = |c: usize, ax: usize| u.component_field(c).derivative(ax);
            let x = d(2, 1).sub(&d(1, 2));
            let y = d(0, 2).sub(&d(2, 0));
            let z = d(1, 0).sub(&d(0, 1));
            SpectralField::stack(&[&x, &y, &z])
        }
        _ => Err(Error::Shape("curl needs a 2D or 3D velocity".into())),
    }
}

pub fn divergence(u: &SpectralField) -> Result<SpectralField> {
    let g = u.grid();
    if u.components() != g.dim() {
        return Err(Error::Shape("divergence needs dim components".into()));
    }
    let mut out = SpectralField::zeros(g, 1);
    for a in 0..g.dim() {
        out.axpy(1.0, &u.component_field(a).derivative(a));
    }
    Ok(out)
}

/// Remove the gradient part of a vector field, `û - k (k·û)/|k|²`.
pub fn leray_project(u: &SpectralField) -> Result<SpectralField> {
    let g = u.grid();
    let dim = g.dim();
    if u.components() != dim {
        return Err(Error::Shape("Leray projection needs dim components".into()));
    }
    let mut out = u.clone();
    for i in 1..g.len() {
        let k = g.wavevector(i).map(|v| v as f64);
        let ks = g.ksq(i);
        let mut kd = Complex64::default();
        for a in 0..dim {
            kd += u.comp(a)[i] * k[a];
        }
        for a in 0..dim {
            out.comp_mut(a)[i] -= kd * (k[a] / ks);
        }
    }
    out.enforce_hermitian();
    Ok(out)
}

/// `-(u·∇)ω + (ω·∇)u + nu Δω` with `u` from Biot–Savart; the stretching term
/// is absent in 2D.
pub fn vorticity_drift(omega: &SpectralField, nu: f64) -> Result<SpectralField> {
    let g = omega.grid();
    let w = dealias(omega);
    let u = biot_savart(&w)?;
    let up = u.to_physical();
    let dim = g.dim();
    let mut out = Vec::with_capacity(w.components());
    for c in 0..w.components() {
        let wc = w.component_field(c);
        let mut acc = vec![0.0; g.len()];
        for (j, uj) in up.iter().enumerate() {
            let d = wc.derivative(j).to_physical();
            fma_into(&mut acc, uj, &d[0]);
        }
        acc.iter_mut().for_each(|v| *v = -*v);
        if dim == 3 {
            let wp = w.to_physical();
            let uc = u.component_field(c);
            for (j, wj) in wp.iter().enumerate() {
                let d = uc.derivative(j).to_physical();
                fma_into(&mut acc, wj, &d[0]);
            }
        }
        out.push(acc);
    }
    let mut a = dealias(&SpectralField::from_physical(g, &out)?);
    if nu != 0.0 {
        a.axpy(nu, &w.laplacian());
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{inner_product, random_field, TorusGrid};

    fn max_abs(f: &SpectralField) -> f64 {
        f.comps().iter().flatten().map(|v| v.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn sine_vorticity() {
        let g = TorusGrid::new(2, 16).unwrap();
        let w = SpectralField::from_fn(g, 1, |x| vec![x[0].sin()]);
        let u = biot_savart(&w).unwrap();
        let want = SpectralField::from_fn(g, 2, |x| vec![0.0, -x[0].cos()]);
        assert!(max_abs(&u.sub(&want)) < 1e-15);
        assert!(max_abs(&curl(&u).unwrap().sub(&w)) < 1e-15);
        let a = vorticity_drift(&w, 0.3).unwrap();
        assert!(max_abs(&a.sub(&w.scaled(-0.3))) < 1e-15);
    }

    #[test]
    fn zero_in_zero_out() {
        let g = TorusGrid::new(2, 8).unwrap();
        let w = SpectralField::zeros(g, 1);
        assert!(biot_savart(&w).unwrap().is_zero());
        assert!(vorticity_drift(&w, 0.0).unwrap().is_zero());
    }

    #[test]
    fn laplacian_eigenfunction_is_steady() {
        let g = TorusGrid::new(2, 32).unwrap();
        let w = SpectralField::from_fn(g, 1, |x| vec![x[0].cos() + x[1].cos()]);
        assert!(max_abs(&vorticity_drift(&w, 0.0).unwrap()) < 1e-12);
    }

    #[test]
    fn random_2d_identities() {
        let g = TorusGrid::new(2, 32).unwrap();
        let w = dealias(&random_field(g, 1, 2.0, 1.0, 3));
        let mut w0 = w.clone();
        w0.comp_mut(0)[0] = Complex64::default();
        let u = biot_savart(&w).unwrap();
        assert!(max_abs(&divergence(&u).unwrap()) < 1e-12);
        assert!(max_abs(&curl(&u).unwrap().sub(&w0)) < 1e-12);
        let a = vorticity_drift(&w0, 0.0).unwrap();
        let e = inner_product(&w0, &a, 0.0).unwrap();
        assert!(e.abs() < 1e-10 * inner_product(&w0, &w0, 0.0).unwrap());
    }

    #[test]
    fn random_3d_identities() {
        let g = TorusGrid::new(3, 16).unwrap();
        let raw = dealias(&random_field(g, 3, 2.0, 1.0, 9));
        assert!(matches!(biot_savart(&raw), Err(Error::Validation(_))));
        let mut w = leray_project(&raw).unwrap();
        for c in 0..3 {
            w.comp_mut(c)[0] = Complex64::default();
        }
        let u = biot_savart(&w).unwrap();
        assert!(max_abs(&divergence(&u).unwrap()) < 1e-12);
        assert!(max_abs(&curl(&u).unwrap().sub(&w)) < 1e-12);
        assert!(vorticity_drift(&w, 0.0).unwrap().is_finite());
    }
}
