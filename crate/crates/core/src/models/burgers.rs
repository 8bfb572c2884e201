use super::fma_into;
use crate::error::{Error, Result};
use crate::spectral::{dealias, SpectralField};

/// `-(u·∇)u + nu Δu`; components must equal the grid dimension.
pub fn burgers_drift(u: &SpectralField, nu: f64) -> Result<SpectralField> {
    let g = u.grid();
    let dim = g.dim();
    if u.components() != dim {
        return Err(Error::Shape(format!(
            "Burgers velocity needs {dim} components, got {}",
            u.components()
        )));
    }
    let u = dealias(u);
    let phys = u.to_physical();
    let mut out = Vec::with_capacity(dim);
    for i in 0..dim {
        let ui = u.component_field(i);
        let mut acc = vec![0.0; g.len()];
        for (j, uj) in phys.iter().enumerate() {
            let d = ui.derivative(j).to_physical();
            fma_into(&mut acc, uj, &d[0]);
        }
        acc.iter_mut().for_each(|v| *v = -*v);
        out.push(acc);
    }
    let mut a = dealias(&SpectralField::from_physical(g, &out)?);
    if nu != 0.0 {
        a.axpy(nu, &u.laplacian());
    }
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{inner_product, random_field, TorusGrid};

    #[test]
    fn constant_field() {
        let g = TorusGrid::new(2, 16).unwrap();
        let u = SpectralField::from_fn(g, 2, |_| vec![1.5, -0.3]);
        let a = burgers_drift(&u, 0.2).unwrap();
        assert!(a.comps().iter().flatten().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn sine_closed_form() {
        let g = TorusGrid::new(1, 32).unwrap();
        let u = SpectralField::from_fn(g, 1, |x| vec![x[0].sin()]);
        let a = burgers_drift(&u, 0.0).unwrap().to_physical();
        for idx in 0..g.len() {
            let x = g.point(idx)[0];
            assert!((a[0][idx] + 0.5 * (2.0 * x).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn energy_pairing_vanishes() {
        let g = TorusGrid::new(1, 64).unwrap();
        for seed in 0..20 {
            let u = dealias(&random_field(g, 1, 1.5, 1.0, seed));
            let a = burgers_drift(&u, 0.0).unwrap();
            let p = inner_product(&u, &a, 0.0).unwrap();
            assert!(p.abs() < 1e-15, "seed {seed}: {p}");
        }
    }
}
