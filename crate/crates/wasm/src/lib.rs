//! Browser bindings: XY-chain spectra, EC energy curves and ASP fidelity
//! curves. Every function returns a JSON string.

use ecprep::metrics::fidelity;
use ecprep::models::{make_sweep, xy_chain};
use ecprep::qcore::{ground_state, low_spectrum};
use ecprep::stateprep::{run_asp_from, AspConfig, InitialState, IteConfig};
use ecprep::subspace::{build_basis, ec_sweep, prepare_state, project_operators, PrepMethod};
use ecprep::ParamHamiltonian;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn err(e: ecprep::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn family(sites: usize, b_x: f64) -> Result<ParamHamiltonian, JsError> {
    xy_chain(sites, 1.0, b_x).map_err(err)
}

/// Lowest `levels` eigenvalues at `count` values of B_Z in [lo, hi].
#[wasm_bindgen]
pub fn spectrum(sites: usize, b_x: f64, lo: f64, hi: f64, count: usize, levels: usize) -> Result<String, JsError> {
    let fam = family(sites, b_x)?;
    let grid = make_sweep(lo, hi, count).map_err(err)?;
    let mut rows = Vec::new();
    for p in grid.points() {
        let s = low_spectrum(&fam.instantiate(p).map_err(err)?, levels).map_err(err)?;
        rows.push(s.eigenvalues);
    }
    let b_z: Vec<f64> = grid.points().iter().map(|p| p[0]).collect();
    Ok(json!({ "b_z": b_z, "levels": rows }).to_string())
}

/// Exact, truncated and EC ground energies over B_Z in [0, 3].
///
/// `method` is `"ite"` (dtau 0.2, `truncation` = tau_max, uniform start)
/// or `"asp"` (dt 0.05, `truncation` = T_max, ramps from B_Z = 3).
#[wasm_bindgen]
pub fn ec_curve(
    sites: usize,
    b_x: f64,
    method: &str,
    truncation: f64,
    kp: usize,
    targets: usize,
) -> Result<String, JsError> {
    let fam = family(sites, b_x)?;
    let m = match method {
        "ite" => PrepMethod::Ite(IteConfig::new(0.2, truncation, InitialState::Uniform)),
        "asp" => PrepMethod::Asp {
            dt: 0.05,
            t_max: truncation,
            start: vec![3.0],
        },
        other => return Err(JsError::new(&format!("unknown method {other}; use ite or asp"))),
    };
    let grid = make_sweep(0.0, 3.0, targets).map_err(err)?;
    let train = make_sweep(0.0, 3.0, kp).map_err(err)?;
    let basis = build_basis(&fam, &train, &m).map_err(err)?;
    let proj = project_operators(&basis, &fam).map_err(err)?;
    let ec = ec_sweep(&basis, &proj, &fam, &grid, None).map_err(err)?;
    let init = match &m {
        PrepMethod::Asp { start, .. } => Some(ground_state(&fam.instantiate(start).map_err(err)?).map_err(err)?.1),
        _ => None,
    };
    let (mut exact, mut trunc, mut f_ec, mut f_tr) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (p, pt) in grid.points().iter().zip(&ec) {
        let h = fam.instantiate(p).map_err(err)?;
        let (e0, g) = ground_state(&h).map_err(err)?;
        let s = prepare_state(&fam, p, &m, init.as_ref()).map_err(err)?;
        exact.push(e0);
        trunc.push(h.expectation(&s).map_err(err)?);
        f_ec.push(fidelity(&pt.state, &g).map_err(err)?);
        f_tr.push(fidelity(&s, &g).map_err(err)?);
    }
    let b_z: Vec<f64> = grid.points().iter().map(|p| p[0]).collect();
    let train_b: Vec<f64> = train.points().iter().map(|p| p[0]).collect();
    Ok(json!({
        "b_z": b_z,
        "training": train_b,
        "exact": exact,
        "ec": ec.iter().map(|p| p.energy).collect::<Vec<_>>(),
        "truncated": trunc,
        "ec_fidelity": f_ec,
        "truncated_fidelity": f_tr,
    })
    .to_string())
}

/// Ground fidelity along an ASP ramp from B_Z = 3 to 0.
#[wasm_bindgen]
pub fn asp_fidelity(sites: usize, b_x: f64, dt: f64, t_max: f64) -> Result<String, JsError> {
    let fam = family(sites, b_x)?;
    let mut cfg = AspConfig::new(dt, t_max, vec![3.0], vec![0.0]);
    cfg.snapshots = true;
    let (_, g0) = ground_state(&fam.instantiate(&[3.0]).map_err(err)?).map_err(err)?;
    let out = run_asp_from(&fam, &cfg, &g0).map_err(err)?;
    let mut b_z = vec![3.0];
    let mut fid = vec![1.0];
    for (p, s) in &out.snapshots {
        let (_, g) = ground_state(&fam.instantiate(p).map_err(err)?).map_err(err)?;
        b_z.push(p[0]);
        fid.push(fidelity(s, &g).map_err(err)?);
    }
    Ok(json!({ "b_z": b_z, "fidelity": fid }).to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_have_expected_shapes() {
        let s: serde_json::Value = serde_json::from_str(&spectrum(3, 0.2, 0.0, 3.0, 4, 2).unwrap()).unwrap();
        assert_eq!(s["levels"].as_array().unwrap().len(), 4);
        let e: serde_json::Value = serde_json::from_str(&ec_curve(4, 0.2, "asp", 3.75, 4, 6).unwrap()).unwrap();
        let ec = e["ec"].as_array().unwrap();
        let exact = e["exact"].as_array().unwrap();
        assert_eq!(ec.len(), 6);
        for (a, b) in ec.iter().zip(exact) {
            assert!(a.as_f64().unwrap() >= b.as_f64().unwrap() - 1e-9);
        }
        let f: serde_json::Value = serde_json::from_str(&asp_fidelity(3, 0.2, 0.1, 1.0).unwrap()).unwrap();
        assert_eq!(f["fidelity"].as_array().unwrap().len(), 11);
    }
}
