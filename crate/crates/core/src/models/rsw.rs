use super::{fma_into, mul, ModelParams};
use crate::error::{Error, Result};
use crate::spectral::{dealias, SpectralField};

/// Shallow-water tendency for the state `(v¹, v², h)` with `v = εu`:
///
/// ```text
/// ∂t v = -u·∇v - f ẑ×u - ∇p + γΔv,   p = (h - b)/(ε Fr)
/// ∂t h = -∇·(h u) + ηΔh
/// ```
///
/// The viscous terms are dropped when `viscous` is false.
pub fn rsw_drift(state: &SpectralField, p: &ModelParams, viscous: bool) -> Result<SpectralField> {
    let g = state.grid();
    if g.dim() != 2 || state.components() != 3 {
        return Err(Error::Shape("shallow water state is (v1, v2, h) on a 2D grid".into()));
    }
    let eps = p.rossby;
    let s = dealias(state);
    let v = [s.component_field(0), s.component_field(1)];
    let h = s.component_field(2);
    let u_phys: Vec<Vec<f64>> = v
        .iter()
        .map(|vi| {
            let mut x = vi.to_physical().remove(0);
            x.iter_mut().for_each(|a| *a /= eps);
            x
        })
        .collect();
    let h_phys = h.to_physical().remove(0);

    let mut tend = Vec::with_capacity(3);
    for vi in &v {
        let mut acc = vec![0.0; g.len()];
        for (j, uj) in u_phys.iter().enumerate() {
            let d = vi.derivative(j).to_physical();
            fma_into(&mut acc, uj, &d[0]);
        }
        acc.iter_mut().for_each(|a| *a = -*a);
        tend.push(acc);
    }
    // -f ẑ×u = (f u², -f u¹)
    let f = p.f_coriolis;
    for (a, b) in tend[0].iter_mut().zip(&u_phys[1]) {
        *a += f * b;
    }
    for (a, b) in tend[1].iter_mut().zip(&u_phys[0]) {
        *a -= f * b;
    }
    let hu: Vec<Vec<f64>> = u_phys.iter().map(|uj| mul(&h_phys, uj)).collect();
    let hu = SpectralField::from_physical(g, &hu)?;
    let mut flux_div = SpectralField::zeros(g, 1);
    for j in 0..2 {
        flux_div.axpy(1.0, &hu.component_field(j).derivative(j));
    }
    let adv = dealias(&SpectralField::from_physical(g, &tend[..2])?);

    let mut pres = h.clone();
    if let Some(b) = &p.topography {
        pres.axpy(-1.0, b);
    }
    pres.scale(1.0 / (eps * p.froude));
    let mut mv = [adv.component_field(0), adv.component_field(1)];
    for j in 0..2 {
        mv[j].axpy(-1.0, &pres.derivative(j));
        if viscous && p.nu != 0.0 {
            mv[j].axpy(p.nu, &v[j].laplacian());
        }
    }
    let mut mh = dealias(&flux_div).scaled(-1.0);
    if viscous && p.eta != 0.0 {
        mh.axpy(p.eta, &h.laplacian());
    }
    SpectralField::stack(&[&mv[0], &mv[1], &mh])
}

/// Balanced state for a height field: `u = (-∂_y p, ∂_x p)/f`, `v = εu`, so
/// that `f ẑ×u = -∇p`.
pub fn geostrophic_state(h: &SpectralField, p: &ModelParams) -> Result<SpectralField> {
    if h.grid().dim() != 2 || h.components() != 1 {
        return Err(Error::Shape("geostrophic state needs a scalar 2D height".into()));
    }
    if p.f_coriolis == 0.0 {
        return Err(Error::Parameter("geostrophic balance needs f ≠ 0".into()));
    }
    let mut pres = h.clone();
    if let Some(b) = &p.topography {
        pres.axpy(-1.0, b);
    }
    pres.scale(1.0 / (p.rossby * p.froude));
    let c = p.rossby / p.f_coriolis;
    let v1 = pres.derivative(1).scaled(-c);
    let v2 = pres.derivative(0).scaled(c);
    SpectralField::stack(&[&v1, &v2, h])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{random_field, Complex64, TorusGrid};

    fn params() -> ModelParams {
        ModelParams {
            nu: 0.01,
            eta: 0.02,
            f_coriolis: 1.3,
            rossby: 0.5,
            froude: 0.8,
            ..Default::default()
        }
    }

    #[test]
    fn rest_state() {
        let g = TorusGrid::new(2, 16).unwrap();
        let s = SpectralField::from_fn(g, 3, |_| vec![0.0, 0.0, 2.0]);
        let a = rsw_drift(&s, &params(), true).unwrap();
        assert!(a.comps().iter().flatten().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn mass_conservation() {
        let g = TorusGrid::new(2, 32).unwrap();
        for seed in 0..5 {
            let mut s = dealias(&random_field(g, 3, 2.5, 0.3, seed));
            s.comp_mut(2)[0] = Complex64::new(1.0, 0.0);
            let a = rsw_drift(&s, &params(), true).unwrap();
            assert!(a.mean(2).abs() < 1e-12);
            let a = rsw_drift(&s, &params(), false).unwrap();
            assert!(a.mean(2).abs() < 1e-12);
        }
    }

    #[test]
    fn geostrophic_balance() {
        let g = TorusGrid::new(2, 32).unwrap();
        let p = params();
        let mut h = dealias(&random_field(g, 1, 3.0, 0.05, 4));
        h.comp_mut(0)[0] = Complex64::new(1.0, 0.0);
        let s = dealias(&geostrophic_state(&h, &p).unwrap());
        let a = rsw_drift(&s, &p, true).unwrap();
        // expected momentum tendency: -u·∇v + γΔv
        let u: Vec<Vec<f64>> = (0..2)
            .map(|j| s.component_field(j).scaled(1.0 / p.rossby).to_physical().remove(0))
            .collect();
        let mut want = Vec::new();
        for i in 0..2 {
            let vi = s.component_field(i);
            let mut acc = vec![0.0; g.len()];
            for j in 0..2 {
                fma_into(&mut acc, &u[j], &vi.derivative(j).to_physical()[0]);
            }
            acc.iter_mut().for_each(|x| *x = -*x);
            let mut f = dealias(&SpectralField::from_physical(g, &[acc]).unwrap());
            f.axpy(p.nu, &vi.laplacian());
            want.push(f);
        }
        for i in 0..2 {
            let d = a.component_field(i).sub(&want[i]);
            let err = d.comps()[0].iter().map(|v| v.norm()).fold(0.0, f64::max);
            assert!(err < 1e-10, "component {i}: {err}");
        }
    }
}
