//! Turns config pieces into library objects, checking preconditions.

use std::collections::BTreeMap;

use ecprep::models::{kagome_xxz, xxz_chain, xy_chain, SweepAxis};
use ecprep::stateprep::{step_count, InitialState, IteConfig, ProductState, Splitting, VqeConfig};
use ecprep::subspace::{PrepMethod, ThresholdBand, ThresholdSchedule};
use ecprep::{Error, ParamHamiltonian, SweepGrid};

use crate::config::{AxisSpec, MethodSpec, ModelKind, ModelSpec, ProductSpec, ScheduleSpec, SplitSpec, StartSpec, TrainingSpec};
use crate::RunError;

pub type Res<T> = Result<T, RunError>;

/// Library errors raised while checking a config: capacity problems keep
/// their numeric/capacity class, everything else is a config error.
pub fn at(path: &str) -> impl Fn(Error) -> RunError + '_ {
    move |e| match e {
        Error::Capacity { .. } => RunError::Compute(format!("{path}: {e}")),
        _ => RunError::Config(format!("{path}: {e}")),
    }
}

pub fn bad(path: &str, msg: impl std::fmt::Display) -> RunError {
    RunError::Config(format!("{path}: {msg}"))
}

pub fn positive(path: &str, v: f64) -> Res<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(path, format!("must be positive and finite, got {v}")))
    }
}

pub fn non_negative(path: &str, v: f64) -> Res<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(path, format!("must be non-negative and finite, got {v}")))
    }
}

/// Model family with `sites` replacing the configured chain length.
pub fn family(model: &ModelSpec, sites: Option<usize>, axes: Option<&[String]>) -> Res<ParamHamiltonian> {
    let fam = match model.kind {
        ModelKind::XyChain | ModelKind::XxzChain => {
            if model.cells.is_some() {
                return Err(bad("model.cells", "only valid for kagome_xxz"));
            }
            let n = sites
                .or(model.sites)
                .ok_or_else(|| bad("model.sites", "chain models need a site count"))?;
            if model.kind == ModelKind::XyChain {
                xy_chain(n, 1.0, 0.0)
            } else {
                xxz_chain(n, 1.0, 0.0)
            }
        }
        ModelKind::KagomeXxz => {
            if model.sites.is_some() || sites.is_some() {
                return Err(bad("model.sites", "kagome_xxz is sized by `cells`"));
            }
            let [nx, ny] = model
                .cells
                .ok_or_else(|| bad("model.cells", "kagome_xxz needs cells = [nx, ny]"))?;
            kagome_xxz(nx, ny, 0.0)
        }
    }
    .map_err(at("model"))?;
    let fam = with_params(fam, &model.params, "model.params")?;
    match axes {
        Some(names) => {
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            fam.with_axes(&refs).map_err(at("targets.axes"))
        }
        None => Ok(fam),
    }
}

pub fn with_params(mut fam: ParamHamiltonian, params: &BTreeMap<String, f64>, path: &str) -> Res<ParamHamiltonian> {
    for (k, v) in params {
        let p = format!("{path}.{k}");
        if !v.is_finite() {
            return Err(bad(&p, "must be finite"));
        }
        fam = fam.with_param(k, *v).map_err(at(&p))?;
    }
    Ok(fam)
}

/// Product grid of the axes (first axis slowest).
pub fn grid(axes: &[AxisSpec], path: &str) -> Res<SweepGrid> {
    if axes.is_empty() {
        return Err(bad(path, "needs at least one axis"));
    }
    let mut names = Vec::new();
    let mut values = Vec::new();
    for (i, a) in axes.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let vals = match (&a.values, a.lo, a.hi, a.count) {
            (Some(v), None, None, None) => {
                if v.is_empty() || v.iter().any(|x| !x.is_finite()) {
                    return Err(bad(&format!("{p}.values"), "needs finite values"));
                }
                v.clone()
            }
            (None, Some(lo), Some(hi), Some(count)) => SweepAxis::new(a.name.clone(), lo, hi, count)
                .map_err(at(&p))?
                .values(),
            _ => return Err(bad(&p, "give either `values` or all of `lo`, `hi`, `count`")),
        };
        if names.contains(&a.name) {
            return Err(bad(&format!("{p}.name"), format!("duplicate axis {}", a.name)));
        }
        names.push(a.name.clone());
        values.push(vals);
    }
    let mut points: Vec<Vec<f64>> = vec![Vec::new()];
    for vals in &values {
        points = points
            .into_iter()
            .flat_map(|p| {
                vals.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    SweepGrid::from_points(names, points).map_err(at(path))
}

/// Range `(lo, hi)` of a one-dimensional grid.
pub fn range_1d(g: &SweepGrid, path: &str) -> Res<(f64, f64)> {
    if g.axes().len() != 1 {
        return Err(bad(path, "needs a one-dimensional target grid"));
    }
    let v: Vec<f64> = g.points().iter().map(|p| p[0]).collect();
    Ok((v.iter().cloned().fold(f64::INFINITY, f64::min), v.iter().cloned().fold(f64::NEG_INFINITY, f64::max)))
}

/// `k` equally spaced points over the target range, endpoints included.
pub fn spaced(targets: &SweepGrid, k: usize, path: &str) -> Res<SweepGrid> {
    let (lo, hi) = range_1d(targets, path)?;
    if k == 0 {
        return Err(bad(path, "needs at least one training point"));
    }
    let axis = SweepAxis::new(targets.axes()[0].clone(), lo, hi, k).map_err(at(path))?;
    SweepGrid::product(&[axis]).map_err(at(path))
}

pub fn training(spec: &TrainingSpec, targets: &SweepGrid, path: &str) -> Res<SweepGrid> {
    match (spec.count, &spec.axes) {
        (Some(k), None) => spaced(targets, k, &format!("{path}.count")),
        (None, Some(axes)) => {
            let g = grid(axes, &format!("{path}.axes"))?;
            if g.axes() != targets.axes() {
                return Err(bad(
                    &format!("{path}.axes"),
                    format!("axes {:?} must match the target axes {:?}", g.axes(), targets.axes()),
                ));
            }
            Ok(g)
        }
        _ => Err(bad(path, "give exactly one of `count` or `axes`")),
    }
}

/// Largest basis the experiments allow: `N + 2` for the XY chain, `N`
/// otherwise (larger bases over-span and the overlap matrix turns singular).
pub fn kp_guard(fam: &ParamHamiltonian) -> usize {
    if fam.name() == "xy_chain" {
        fam.nsites() + 2
    } else {
        fam.nsites()
    }
}

pub fn check_kp(fam: &ParamHamiltonian, k: usize, path: &str) -> Res<()> {
    let g = kp_guard(fam);
    if k == 0 || k > g {
        return Err(bad(path, format!("k_p = {k} outside 1..={g} for {} with {} sites", fam.name(), fam.nsites())));
    }
    Ok(())
}

pub fn splitting(s: SplitSpec) -> Splitting {
    match s {
        SplitSpec::Forward => Splitting::Forward,
        SplitSpec::Symmetric => Splitting::Symmetric,
    }
}

pub fn start_state(s: StartSpec, seed: u64, path: &str) -> Res<InitialState> {
    match s {
        StartSpec::Uniform => Ok(InitialState::Uniform),
        StartSpec::Haar => Ok(InitialState::Haar { seed }),
        StartSpec::Eigenstates => Err(bad(path, "`eigenstates` is only available in ite_overlaps")),
    }
}

/// Library method for `spec`; the master seed drives Haar starts and VQE
/// initial angles.
pub fn method(spec: &MethodSpec, fam: &ParamHamiltonian, seed: u64, path: &str) -> Res<PrepMethod> {
    Ok(match spec {
        MethodSpec::Ite {
            dtau,
            tau_max,
            initial,
            splitting: split,
        } => {
            positive(&format!("{path}.dtau"), *dtau)?;
            step_count(*tau_max, *dtau).map_err(at(&format!("{path}.tau_max")))?;
            let mut cfg = IteConfig::new(*dtau, *tau_max, start_state(*initial, seed, &format!("{path}.initial"))?);
            cfg.splitting = splitting(*split);
            PrepMethod::Ite(cfg)
        }
        MethodSpec::Asp { dt, t_max, start } => {
            positive(&format!("{path}.dt"), *dt)?;
            step_count(*t_max, *dt).map_err(at(&format!("{path}.t_max")))?;
            fam.check_point(start).map_err(at(&format!("{path}.start")))?;
            PrepMethod::Asp {
                dt: *dt,
                t_max: *t_max,
                start: start.clone(),
            }
        }
        MethodSpec::Vqe {
            layers,
            max_iters,
            product_state,
            init_scale,
            grad_tol,
        } => {
            if *layers == 0 {
                return Err(bad(&format!("{path}.layers"), "needs at least one layer"));
            }
            non_negative(&format!("{path}.init_scale"), *init_scale)?;
            positive(&format!("{path}.grad_tol"), *grad_tol)?;
            let mut cfg = VqeConfig::new(*layers, *max_iters, seed);
            cfg.initial = match product_state {
                ProductSpec::Zeros => ProductState::Zeros,
                ProductSpec::Ones => ProductState::Ones,
                ProductSpec::Neel => ProductState::Neel,
            };
            cfg.init_scale = *init_scale;
            cfg.grad_tol = *grad_tol;
            PrepMethod::Vqe(cfg)
        }
        MethodSpec::Exact => PrepMethod::Exact,
    })
}

/// Same method with its truncation knob set to `v`.
pub fn with_truncation(m: &PrepMethod, v: f64, path: &str) -> Res<PrepMethod> {
    Ok(match m {
        PrepMethod::Ite(c) => {
            step_count(v, c.dtau).map_err(at(path))?;
            let mut c = c.clone();
            c.tau_max = v;
            PrepMethod::Ite(c)
        }
        PrepMethod::Asp { dt, start, .. } => {
            step_count(v, *dt).map_err(at(path))?;
            PrepMethod::Asp {
                dt: *dt,
                t_max: v,
                start: start.clone(),
            }
        }
        PrepMethod::Vqe(c) => {
            if !(v >= 0.0 && v.fract() == 0.0) {
                return Err(bad(path, format!("iteration cap must be a whole number, got {v}")));
            }
            let mut c = c.clone();
            c.max_iters = v as usize;
            PrepMethod::Vqe(c)
        }
        PrepMethod::Exact => return Err(bad(path, "the exact method has no truncation knob")),
    })
}

pub fn schedule(s: &ScheduleSpec, path: &str) -> Res<ThresholdSchedule> {
    non_negative(&format!("{path}.otherwise"), s.otherwise)?;
    let mut prev = f64::NEG_INFINITY;
    for (i, b) in s.bands.iter().enumerate() {
        non_negative(&format!("{path}.bands[{i}].alpha"), b.alpha)?;
        if !(b.below > prev) {
            return Err(bad(&format!("{path}.bands[{i}].below"), "bands must be in increasing order"));
        }
        prev = b.below;
    }
    Ok(ThresholdSchedule {
        bands: s
            .bands
            .iter()
            .map(|b| ThresholdBand {
                below: b.below,
                alpha: b.alpha,
            })
            .collect(),
        otherwise: s.otherwise,
    })
}

pub fn sigmas(v: &[f64], path: &str) -> Res<()> {
    if v.is_empty() {
        return Err(bad(path, "needs at least one value"));
    }
    for (i, s) in v.iter().enumerate() {
        non_negative(&format!("{path}[{i}]"), *s)?;
    }
    Ok(())
}
