//! Task runners. Each runner resolves and checks its inputs first and
//! returns early in dry mode, so `validate` exercises exactly the checks a
//! real run performs.

use std::collections::BTreeSet;

use ecprep::metrics::{basis_eigenstate_overlap, fidelity, per_point_rel_error, rel_rms_error, rms_error};
use ecprep::noise::{
    apply_measurement_error, ensemble_projected_matrices, measured_energy, noisy_asp_trajectory, noisy_basis,
    pairwise_mean, ConfusionModel, NoiseConfig,
};
use ecprep::qcore::{exact_diagonalize, ground_state, hermitian_eigen, low_spectrum, rng, PauliSum};
use ecprep::stateprep::{run_asp_from, run_ite, step_count, track_eigenstate_overlaps, AspConfig, InitialState, IteConfig};
use ecprep::subspace::{
    build_basis, check_variational_bound, cross_family_sweep, krylov_basis, prepare_state, project_operators,
    solve_at, GepSolution, PrepMethod, SubspaceBasis, SubspaceProjection,
};
use ecprep::{Error, ParamHamiltonian, StateVector, SweepGrid, C64};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, MethodSpec, ScheduleSpec, StartSpec, Task, TrainingSpec};
use crate::resolve::{self, bad, non_negative, positive, Res};
use crate::table::Table;
use crate::RunError;

/// Tolerance of the variational-bound assertion on noiseless EC energies.
pub const BOUND_TOL: f64 = 1e-9;

struct Ctx<'a> {
    cfg: &'a ExperimentConfig,
    fam: ParamHamiltonian,
    targets: Option<SweepGrid>,
    target_axes: Option<Vec<String>>,
    dry: bool,
}

impl Ctx<'_> {
    fn targets(&self, path: &str) -> Res<&SweepGrid> {
        self.targets
            .as_ref()
            .ok_or_else(|| bad(path, "this task needs a [targets] grid"))
    }

    fn seed(&self) -> u64 {
        self.cfg.seed
    }

    fn family_with_sites(&self, n: usize) -> Res<ParamHamiltonian> {
        resolve::family(&self.cfg.model, Some(n), self.target_axes.as_deref())
    }
}

struct TaskOut {
    tables: Vec<Table>,
    info: Value,
}

impl TaskOut {
    fn dry() -> Self {
        Self {
            tables: Vec::new(),
            info: Value::Null,
        }
    }
}

pub fn run_all(cfg: &ExperimentConfig, dry: bool) -> Res<(Vec<Table>, Vec<Value>)> {
    if cfg.name.is_empty() || !cfg.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return Err(bad("name", "must be non-empty and use only letters, digits, `_` and `-`"));
    }
    if cfg.tasks.is_empty() {
        return Err(bad("tasks", "needs at least one task"));
    }
    let target_axes = cfg
        .targets
        .as_ref()
        .map(|t| t.axes.iter().map(|a| a.name.clone()).collect::<Vec<_>>());
    let fam = resolve::family(&cfg.model, None, target_axes.as_deref())?;
    let targets = match &cfg.targets {
        Some(t) => {
            let g = resolve::grid(&t.axes, "targets.axes")?;
            for p in g.points() {
                fam.check_point(p).map_err(resolve::at("targets"))?;
            }
            Some(g)
        }
        None => None,
    };
    let ctx = Ctx {
        cfg,
        fam,
        targets,
        target_axes,
        dry,
    };
    let mut names = BTreeSet::new();
    let mut tables = Vec::new();
    let mut info = Vec::new();
    for (i, task) in cfg.tasks.iter().enumerate() {
        let path = format!("tasks[{i}]");
        let name = task.name();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(bad(&format!("{path}.name"), "must be non-empty and use only letters, digits, `_` and `-`"));
        }
        let path = format!("{path} ({name})");
        let out = run_task(&ctx, task, &path)?;
        for t in &out.tables {
            if !names.insert(t.name.clone()) {
                return Err(bad(&path, format!("output table {} is produced twice", t.name)));
            }
        }
        if !dry {
            let mut v = json!({
                "name": name,
                "kind": task.kind(),
                "tables": out.tables.iter().map(|t| t.name.clone()).collect::<Vec<_>>(),
            });
            if let (Value::Object(m), Value::Object(extra)) = (&mut v, out.info) {
                m.extend(extra);
            }
            info.push(v);
            tables.extend(out.tables);
        } else if names.contains(name) || !names.insert(name.to_string()) {
            // Dry runs produce no tables, so check task-name uniqueness here.
            return Err(bad(&path, format!("duplicate task name {name}")));
        }
    }
    Ok((tables, info))
}

fn run_task(ctx: &Ctx, task: &Task, path: &str) -> Res<TaskOut> {
    match task {
        Task::Spectrum { name, levels, sites } => spectrum(ctx, path, name, sites, Some(*levels)),
        Task::Gap { name, sites } => spectrum(ctx, path, name, sites, None),
        Task::Prep { name, method } => prep(ctx, path, name, method),
        Task::Ec {
            name,
            method,
            training,
            threshold,
            target_params,
            compare_truncated,
        } => ec(ctx, path, name, method, training, *threshold, target_params, *compare_truncated),
        Task::TruncationScan { name, method, values, kp } => truncation_scan(ctx, path, name, method, values, kp),
        Task::AspTrajectory {
            name,
            dt,
            t_max,
            start,
            end,
        } => asp_trajectory(ctx, path, name, *dt, t_max, start, end),
        Task::IteOverlaps {
            name,
            point,
            dtau,
            tau_max,
            initial,
            splitting,
        } => ite_overlaps(ctx, path, name, point, *dtau, *tau_max, initial, resolve::splitting(*splitting)),
        Task::Scaling {
            name,
            sites,
            method,
            kp_max,
            tolerance,
        } => scaling(ctx, path, name, sites, method, *kp_max, *tolerance),
        Task::Noise {
            name,
            sigmas,
            trajectories,
            dt,
            start,
            truncated_t_max,
            full_t_max,
            direct_truncated,
            kp,
            schedule,
            bootstrap,
        } => noise(
            ctx,
            path,
            NoiseTask {
                name,
                sigmas,
                trajectories: *trajectories,
                dt: *dt,
                start,
                truncated_t_max: *truncated_t_max,
                full_t_max: *full_t_max,
                direct_truncated: *direct_truncated,
                kp,
                schedule,
                bootstrap: *bootstrap,
            },
        ),
        Task::BasisOverlap {
            name,
            point,
            method,
            training,
            krylov_k,
            low_fraction,
            sigmas,
            trajectories,
        } => basis_overlap(
            ctx,
            path,
            name,
            point,
            method,
            training,
            *krylov_k,
            *low_fraction,
            sigmas,
            *trajectories,
        ),
        Task::Measurement {
            name,
            sigmas,
            trajectories,
            dt,
            start,
            truncated_t_max,
            full_t_max,
            kp,
            schedule,
            p01,
            p10,
            pt1_max,
        } => measurement(
            ctx,
            path,
            MeasurementTask {
                name,
                sigmas,
                trajectories: *trajectories,
                dt: *dt,
                start,
                truncated_t_max: *truncated_t_max,
                full_t_max: *full_t_max,
                kp: *kp,
                schedule,
                probs: (*p01, *p10, *pt1_max),
            },
        ),
    }
}

// ---------------------------------------------------------------------------
// shared pieces

fn exact_ground(fam: &ParamHamiltonian, grid: &SweepGrid) -> Res<Vec<(f64, StateVector)>> {
    grid.points()
        .par_iter()
        .map(|p| Ok(ground_state(&fam.instantiate(p)?)?))
        .collect()
}

fn instantiate_all(fam: &ParamHamiltonian, grid: &SweepGrid) -> Res<Vec<PauliSum>> {
    Ok(grid
        .points()
        .iter()
        .map(|p| fam.instantiate(p))
        .collect::<Result<Vec<_>, Error>>()?)
}

/// Truncated method applied directly at every grid point.
fn truncated_states(fam: &ParamHamiltonian, grid: &SweepGrid, method: &PrepMethod) -> Res<Vec<StateVector>> {
    let init = match method {
        PrepMethod::Asp { start, .. } => Some(ground_state(&fam.instantiate(start)?)?.1),
        _ => None,
    };
    grid.points()
        .par_iter()
        .map(|p| Ok(prepare_state(fam, p, method, init.as_ref())?))
        .collect()
}

fn energies(hs: &[PauliSum], states: &[StateVector]) -> Res<Vec<f64>> {
    Ok(hs
        .iter()
        .zip(states)
        .map(|(h, s)| h.expectation(s))
        .collect::<Result<Vec<_>, Error>>()?)
}

fn median(v: &[f64]) -> f64 {
    let mut w = v.to_vec();
    w.sort_by(f64::total_cmp);
    let n = w.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        w[n / 2]
    } else {
        0.5 * (w[n / 2 - 1] + w[n / 2])
    }
}

/// Per-point rows and summary rows comparing `computed` with `exact`.
fn push_errors(
    t: &mut Table,
    summary: &mut Table,
    grid: &SweepGrid,
    method: &str,
    computed: &[f64],
    exact: &[f64],
    fids: Option<&[f64]>,
) -> Res<()> {
    let rel = per_point_rel_error(computed, exact)?;
    for (i, p) in grid.points().iter().enumerate() {
        t.push(p, method, "energy", computed[i]);
        t.push(p, method, "abs_error", (computed[i] - exact[i]).abs());
        if let Some(r) = rel[i] {
            t.push(p, method, "rel_error", r);
        }
        if let Some(f) = fids {
            t.push(p, method, "fidelity", f[i]);
        }
    }
    let defined: Vec<f64> = rel.iter().flatten().copied().collect();
    summary.push(&[], method, "rms", rms_error(computed, exact)?);
    if !defined.is_empty() {
        summary.push(&[], method, "rel_rms", rel_rms_error(computed, exact)?.value);
        summary.push(&[], method, "max_rel_error", defined.iter().cloned().fold(0.0, f64::max));
        summary.push(&[], method, "median_rel_error", median(&defined));
    }
    summary.push(&[], method, "rel_error_excluded", (rel.len() - defined.len()) as f64);
    if let Some(f) = fids {
        summary.push(&[], method, "min_fidelity", f.iter().cloned().fold(f64::INFINITY, f64::min));
        summary.push(&[], method, "max_fidelity", f.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    }
    Ok(())
}

fn assert_bound(ec: &[f64], exact: &[f64], grid: &SweepGrid, path: &str) -> Res<()> {
    if let Some(&i) = check_variational_bound(ec, exact, BOUND_TOL).first() {
        return Err(RunError::Compute(format!(
            "{path}: variational bound violated at {:?}: EC energy {} below exact {}",
            grid.points()[i],
            ec[i],
            exact[i]
        )));
    }
    Ok(())
}

fn is_conditioning(e: &Error) -> bool {
    matches!(e, Error::IllConditioned { .. } | Error::EmptySubspace { .. })
}

/// Solves the projected problem at every target.
fn solve_targets(
    proj: &SubspaceProjection,
    fam: &ParamHamiltonian,
    grid: &SweepGrid,
    threshold: Option<f64>,
) -> Result<Vec<GepSolution>, Error> {
    grid.points()
        .par_iter()
        .map(|p| solve_at(proj, fam, p, threshold))
        .collect()
}

fn condition_number(proj: &SubspaceProjection) -> (f64, f64) {
    let (lam, _) = hermitian_eigen(proj.overlap.clone());
    let lo = lam[0];
    let hi = lam[lam.len() - 1];
    (if lo > 0.0 { hi / lo } else { f64::INFINITY }, lo)
}

fn method_check(spec: &MethodSpec, fam: &ParamHamiltonian, seed: u64, path: &str) -> Res<PrepMethod> {
    resolve::method(spec, fam, seed, &format!("{path}.method"))
}

// ---------------------------------------------------------------------------
// tasks

fn spectrum(ctx: &Ctx, path: &str, name: &str, sites: &[usize], levels: Option<usize>) -> Res<TaskOut> {
    let targets = ctx.targets(path)?;
    if levels == Some(0) {
        return Err(bad(&format!("{path}.levels"), "must be at least 1"));
    }
    let fams: Vec<(Option<usize>, ParamHamiltonian)> = if sites.is_empty() {
        vec![(None, ctx.fam.clone())]
    } else {
        sites
            .iter()
            .map(|&n| Ok((Some(n), ctx.family_with_sites(n)?)))
            .collect::<Res<_>>()?
    };
    if ctx.dry {
        return Ok(TaskOut::dry());
    }
    let k = levels.unwrap_or(2);
    let mut t = Table::new(name);
    if !sites.is_empty() {
        t = t.int("N");
    }
    let mut t = t.reals(targets.axes());
    for (n, fam) in &fams {
        let specs = targets
            .points()
            .par_iter()
            .map(|p| Ok(low_spectrum(&fam.instantiate(p)?, k)?))
            .collect::<Res<Vec<_>>>()?;
        for (p, s) in targets.points().iter().zip(&specs) {
            let keys: Vec<f64> = n.map(|n| n as f64).into_iter().chain(p.iter().copied()).collect();
            match levels {
                Some(_) => {
                    for (j, e) in s.eigenvalues.iter().enumerate() {
                        t.push(&keys, "exact", &format!("E{j}"), *e);
                    }
                }
                None => t.push(&keys, "exact", "gap", s.gap()),
            }
        }
    }
    Ok(TaskOut {
        tables: vec![t],
        info: json!({ "model": ctx.fam.name() }),
    })
}

fn prep(ctx: &Ctx, path: &str, name: &str, spec: &MethodSpec) -> Res<TaskOut> {
    let targets = ctx.targets(path)?;
    let method = method_check(spec, &ctx.fam, ctx.seed(), path)?;
    if ctx.dry {
        return Ok(TaskOut::dry());
    }
    let exact = exact_ground(&ctx.fam, targets)?;
    let states = truncated_states(&ctx.fam, targets, &method)?;
    let hs = instantiate_all(&ctx.fam, targets)?;
    let e = energies(&hs, &states)?;
    let ex: Vec<f64> = exact.iter().map(|x| x.0).collect();
    let fids = states
        .iter()
        .zip(&exact)
        .map(|(s, x)| fidelity(s, &x.1))
        .collect::<Result<Vec<_>, Error>>()?;
    let mut t = Table::new(name).reals(targets.axes());
    let mut summary = Table::new(format!("{name}_summary"));
    for (p, x) in targets.points().iter().zip(&ex) {
        t.push(p, "exact", "energy", *x);
    }
    push_errors(&mut t, &mut summary, targets, spec.label(), &e, &ex, Some(&fids))?;
    Ok(TaskOut {
        tables: vec![t, summary],
        info: json!({ "method": method.describe() }),
    })
}

#[allow(clippy::too_many_arguments)]
fn ec(
    ctx: &Ctx,
    path: &str,
    name: &str,
    spec: &MethodSpec,
    training: &TrainingSpec,
    threshold: Option<f64>,
    target_params: &std::collections::BTreeMap<String, f64>,
    compare: bool,
) -> Res<TaskOut> {
    let targets = ctx.targets(path)?;
    let fam = &ctx.fam;
    let method = method_check(spec, fam, ctx.seed(), path)?;
    let train = resolve::training(training, targets, &format!("{path}.training"))?;
    resolve::check_kp(fam, train.len(), &format!("{path}.training"))?;
    for p in train.points() {
        fam.check_point(p).map_err(resolve::at(&format!("{path}.training")))?;
    }
    if let Some(a) = threshold {
        non_negative(&format!("{path}.threshold"), a)?;
    }
    let target_fam = resolve::with_params(fam.clone(), target_params, &format!("{path}.target_params"))?;
    if ctx.dry {
        return Ok(TaskOut::dry());
    }

    let basis = build_basis(fam, &train, &method)?;
    let proj = project_operators(&basis, fam)?;
    let ec = cross_family_sweep(&basis, &proj, &target_fam, targets, threshold)?;
    let exact = exact_ground(&target_fam, targets)?;
    let ex: Vec<f64> = exact.iter().map(|x| x.0).collect();
    let e_ec: Vec<f64> = ec.iter().map(|p| p.energy).collect();
    assert_bound(&e_ec, &ex, targets, path)?;
    let f_ec = ec
        .iter()
        .zip(&exact)
        .map(|(p, x)| fidelity(&p.state, &x.1))
        .collect::<Result<Vec<_>, Error>>()?;

    let mut t = Table::new(name).reals(targets.axes());
    let mut summary = Table::new(format!("{name}_summary"));
    for (p, x) in targets.points().iter().zip(&ex) {
        t.push(p, "exact", "energy", *x);
    }
    push_errors(&mut t, &mut summary, targets, "ec", &e_ec, &ex, Some(&f_ec))?;
    for (p, pt) in targets.points().iter().zip(&ec) {
        t.push(p, "ec", "condition_number", pt.solution.condition_number);
        t.push(p, "ec", "effective_dim", pt.solution.effective_dim as f64);
    }
    summary.push(&[], "ec", "kp", train.len() as f64);
    summary.push(
        &[],
        "ec",
        "max_condition_number",
        ec.iter().map(|p| p.solution.condition_number).fold(0.0, f64::max),
    );
    summary.push(&[], "ec", "bound_violations", 0.0);

    let train_exact = exact_ground(fam, &train)?;
    let train_h = instantiate_all(fam, &train)?;
    let train_e = energies(&train_h, &basis.vectors)?;
    for (i, p) in train.points().iter().enumerate() {
        t.push(p, "training", "energy", train_e[i]);
        t.push(p, "training", "fidelity", fidelity(&basis.vectors[i], &train_exact[i].1)?);
    }

    if compare {
        let states = truncated_states(&target_fam, targets, &method)?;
        let hs = instantiate_all(&target_fam, targets)?;
        let e = energies(&hs, &states)?;
        let fids = states
            .iter()
            .zip(&exact)
            .map(|(s, x)| fidelity(s, &x.1))
            .collect::<Result<Vec<_>, Error>>()?;
        push_errors(&mut t, &mut summary, targets, "truncated", &e, &ex, Some(&fids))?;
    }
    Ok(TaskOut {
        tables: vec![t, summary],
        info: json!({
            "method": method.describe(),
            "training_points": train.points(),
            "threshold": threshold,
            "target_family": target_fam.params(),
        }),
    })
}

fn truncation_scan(ctx: &Ctx, path: &str, name: &str, spec: &MethodSpec, values: &[f64], kp: &[usize]) -> Res<TaskOut> {
    let targets = ctx.targets(path)?;
    let fam = &ctx.fam;
    let base = method_check(spec, fam, ctx.seed(), path)?;
    if values.is_empty() {
        return Err(bad(&format!("{path}.values"), "needs at least one value"));
    }
    let methods = values
        .iter()
        .enumerate()
        .map(|(i, &v)| Ok((v, resolve::with_truncation(&base, v, &format!("{path}.values[{i}]"))?)))
        .collect::<Res<Vec<_>>>()?;
    let grids = kp
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let p = format!("{path}.kp[{i}]");
            resolve::check_kp(fam, k, &p)?;
            Ok((k, resolve::spaced(targets, k, &p)?))
        })
        .collect::<Res<Vec<_>>>()?;
    if ctx.dry {
        return Ok(TaskOut::dry());
    }
    let exact = exact_ground(fam, targets)?;
    let ex: Vec<f64> = exact.iter().map(|x| x.0).collect();
    let hs = instantiate_all(fam, targets)?;
    let mut t = Table::new(name).real("truncation");
    for (v, m) in &methods {
        let states = truncated_states(fam, targets, m)?;
        let e = energies(&hs, &states)?;
        t.push(&[*v], "truncated", "rms", rms_error(&e, &ex)?);
        t.push(&[*v], "truncated", "rel_rms", rel_rms_error(&e, &ex)?.value);
        for (k, train) in &grids {
            let label = format!("ec_kp{k}");
            let basis = build_basis(fam, train, m)?;
            let proj = project_operators(&basis, fam)?;
            match solve_targets(&proj, fam, targets, None) {
                Ok(sols) => {
                    let e: Vec<f64> = sols.iter().map(|s| s.eigenvalues[0]).collect();
                    assert_bound(&e, &ex, targets, path)?;
                    t.push(&[*v], &label, "rms", rms_error(&e, &ex)?);
                    t.push(&[*v], &label, "rel_rms", rel_rms_error(&e, &ex)?.value);
                }
                Err(e) if is_conditioning(&e) => t.push(&[*v], &label, "ill_conditioned", 1.0),
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(TaskOut {
        tables: vec![t],
        info: json!({ "method": base.describe(), "knob": spec.label() }),
    })
}

fn asp_trajectory(
    ctx: &Ctx,
    path: &str,
    name: &str,
    dt: f64,
    t_max: &[f64],
    start: &[f64],
    end: &[f64],
) -> Res<TaskOut> {
    let fam = &ctx.fam;
    positive(&format!("{path}.dt"), dt)?;
    if t_max.is_empty() {
        return Err(bad(&format!("{path}.t_max"), "needs at least one value"));
    }
    for (i, &t) in t_max.iter().enumerate() {
        step_count(t, dt).map_err(resolve::at(&format!("{path}.t_max[{i}]")))?;
    }
    fam.check_point(start).map_err(resolve::at(&format!("{path}.start")))?;
    fam.check_point(end).map_err(resolve::at(&format!("{path}.end")))?;
    if ctx.dry {
        return Ok(TaskOut::dry());
    }
    let axes: Vec<String> = fam.axis_names().iter().map(|s| s.to_string()).collect();
    let mut t = Table::new(name).real("t_max").reals(&axes);
    let mut summary = Table::new(format!("{name}_summary")).real("t_max");
    let (_, g0) = ground_state(&fam.instantiate(start)?)?;
    for &tm in t_max {
        let mut cfg = AspConfig::new(dt, tm, start.to_vec(), end.to_vec());
        cfg.snapshots = true;
        let out = run_asp_from(fam, &cfg, &g0)?;
        let mut snaps = vec![(start.to_vec(), g0.clone())];
        snaps.extend(out.snapshots);
        let rows = snaps
            .par_iter()
            .map(|(p, s)| {
                let h = fam.instantiate(p)?;
                let (e0, gs) = ground_state(&h)?;
                Ok((h.expectation(s)?, e0, fidelity(s, &gs)?))
            })
            .collect::<Res<Vec<_>>>()?;
        for ((p, _), (e, e0, f)) in snaps.iter().zip(&rows) {
            let keys: Vec<f64> = std::iter::once(tm).chain(p.iter().copied()).collect();
            t.push(&keys, "asp", "energy", *e);
            t.push(&keys, "exact", "energy", *e0);
            t.push(&keys, "asp", "fidelity", *f);
        }
        let (e, e0, f) = rows[rows.len() - 1];
        summary.push(&[tm], "asp", "final_fidelity", f);
        summary.push(&[tm], "asp", "final_abs_error", (e - e0).abs());
        summary.push(&[tm], "asp", "steps", (rows.len() - 1) as f64);
    }
    Ok(TaskOut {
        tables: vec![t, summary],
        info: json!({ "dt": dt, "start": start, "end": end }),
    })
}

#[allow(clippy::too_many_arguments)]
fn ite_overlaps(
    ctx: &Ctx,
    path: &str,
    name: &str,
    point: &[f64],
    dtau: f64,
    tau_max: f64,
    initial: &[StartSpec],
    split: ecprep::stateprep::Splitting,
) -> Res<TaskOut> {
    let fam = &ctx.fam;
    fam.check_point(point).map_err(resolve::at(&format!("{path}.point")))?;
    positive(&format!("{path}.dtau"), dtau)?;
    step_count(tau_max, dtau).map_err(resolve::at(&format!("{path}.tau_max")))?;
    if initial.is_empty() {
        return Err(bad(&format!("{path}.initial"), "needs at least one start state"));
    }
    if ctx.dry {
        return Ok(TaskOut::dry());
    }
    let h = fam.instantiate(point)?;
    let spec = exact_diagonalize(&h)?;
    let mut t = Table::new(name).int("step").int("level");
    let mut energy = Table::new(format!("{name}_energy")).int("step");
    let mut levels = Table::new(format!("{name}_levels")).int("level");
    for (k, e) in spec.eigenvalues.iter().enumerate() {
        levels.push(&[k as f64], "exact", "energy", *e);
    }
    for s in initial {
        let label = match s {
            StartSpec::Uniform => "uniform",
            StartSpec::Haar => "haar",
            StartSpec::Eigenstates => "eigenstates",
        };
        let init = match s {
            StartSpec::Eigenstates => {
                let mut v = StateVector::from_amplitudes(h.nsites(), vec![C64::new(0.0, 0.0); h.dim()])?;
                for e in &spec.eigenvectors {
                    v.axpy(C64::new(1.0, 0.0), e)?;
                }
                InitialState::Given(v.normalized()?)
            }
            other => resolve::start_state(*other, ctx.seed(), path)?,
        };
        let mut cfg = IteConfig::new(dtau, tau_max, init);
        cfg.splitting = split;
        cfg.record_states = true;
        let out = run_ite(&h, &cfg)?;
        let ov = track_eigenstate_overlaps(&out.states, &spec)?;
        for (step, row) in ov.iter().enumerate() {
            for (level, o) in row.iter().enumerate() {
                t.push(&[step as f64, level as f64], label, "overlap", *o);
            }
            energy.push(&[step as f64], label, "energy", out.energies[step]);
        }
    }
    Ok(TaskOut {
        tables: vec![t, energy, levels],
        info: json!({ "point": point, "dtau": dtau, "tau_max": tau_max }),
    })
}

fn scaling(
    ctx: &Ctx,
    path: &str,
    name: &str,
    sites: &[usize],
    spec: &MethodSpec,
    kp_max: Option<usize>,
    tolerance: f64,
) -> Res<TaskOut> {
    let targets = ctx.targets(path)?;
    resolve::range_1d(targets, path)?;
    positive(&format!("{path}.tolerance"), tolerance)?;
    if sites.is_empty() {
        return Err(bad(&format!("{path}.sites"), "needs at least one chain length"));
    }
    let runs = sites
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let fam = ctx.family_with_sites(n)?;
            let m = method_check(spec, &fam, ctx.seed(), &format!("{path}.sites[{i}]"))?;
            let kmax = kp_max.unwrap_or(usize::MAX).min(resolve::kp_guard(&fam));
            Ok((n, fam, m, kmax))
        })
        .collect::<Res<Vec<_>>>()?;
    if ctx.dry {
        return Ok(TaskOut::dry());
    }
    let mut t = Table::new(name).int("N").int("k_p");
    let mut summary = Table::new(format!("{name}_summary")).int("N");
    for (n, fam, m, kmax) in &runs {
        let exact = exact_ground(fam, targets)?;
        let ex: Vec<f64> = exact.iter().map(|x| x.0).collect();
        let mut min_kp = None;
        for k in 1..=*kmax {
            let keys = [*n as f64, k as f64];
            let train = resolve::spaced(targets, k, path)?;
            let basis = build_basis(fam, &train, m)?;
            let proj = project_operators(&basis, fam)?;
            match solve_targets(&proj, fam, targets, None) {
                Ok(sols) => {
                    let e: Vec<f64> = sols.iter().map(|s| s.eigenvalues[0]).collect();
                    assert_bound(&e, &ex, targets, path)?;
                    let r = rel_rms_error(&e, &ex)?.value;
                    t.push(&keys, "ec", "rel_rms", r);
                    t.push(&keys, "ec", "rms", rms_error(&e, &ex)?);
                    t.push(&keys, "ec", "condition_number", sols[0].condition_number);
                    if r < tolerance && min_kp.is_none() {
                        min_kp = Some(k);
                    }
                }
                Err(e) if is_conditioning(&e) => t.push(&keys, "ec", "ill_conditioned", 1.0),
                Err(e) => return Err(e.into()),
            }
        }
        summary.push(&[*n as f64], "ec", "kp_computed", *kmax as f64);
        if let Some(k) = min_kp {
            summary.push(&[*n as f64], "ec", "min_kp", k as f64);
        }
    }
    Ok(TaskOut {
        tables: vec![t, summary],
        info: json!({ "method": runs[0].2.describe(), "tolerance": tolerance }),
    })
}

struct NoiseTask<'a> {
    name: &'a str,
    sigmas: &'a [f64],
    trajectories: usize,
    dt: f64,
    start: &'a [f64],
    truncated_t_max: f64,
    full_t_max: Option<f64>,
    direct_truncated: bool,
    kp: &'a [usize],
    schedule: &'a ScheduleSpec,
    bootstrap: usize,
}

/// Mean energy over trajectories of a noisy ramp to every target.
#[allow(clippy::too_many_arguments)]
fn direct_noisy(
    fam: &ParamHamiltonian,
    targets: &SweepGrid,
    hs: &[PauliSum],
    dt: f64,
    t_max: f64,
    start: &[f64],
    g0: &StateVector,
    sigma: f64,
    n: usize,
    seed: u64,
    variant: u64,
    measure: Option<(&ConfusionModel, u64)>,
) -> Res<(Vec<f64>, Vec<f64>)> {
    let jobs: Vec<(usize, usize)> = (0..targets.len()).flat_map(|i| (0..n).map(move |t| (i, t))).collect();
    let vals = jobs
        .par_iter()
        .map(|&(i, t)| {
            let p = &targets.points()[i];
            let cfg = AspConfig::new(dt, t_max, start.to_vec(), p.clone());
            // Four indices keep these apart from the three-index basis
            // streams of the noise module.
            let mut r = rng::stream(seed, &[rng::tag::NOISE, t as u64, i as u64, variant]);
            let s = noisy_asp_trajectory(fam, &cfg, g0, sigma, &mut r)?;
            let e = hs[i].expectation(&s)?;
            let m = match measure {
                Some((model, si)) => {
                    let mut r = rng::stream(seed, &[rng::tag::MEASUREMENT, si, t as u64, i as u64, variant]);
                    measured_energy(&s, fam, p, model, &mut r)?.0
                }
                None => e,
            };
            Ok((e, m))
        })
        .collect::<Res<Vec<_>>>()?;
    let mean = |f: fn(&(f64, f64)) -> f64| -> Vec<f64> {
        vals.chunks(n).map(|c| c.iter().map(f).sum::<f64>() / n as f64).collect()
    };
    Ok((mean(|v| v.0), mean(|v| v.1)))
}

fn noise_checks(
    ctx: &Ctx,
    path: &str,
    sigmas: &[f64],
    trajectories: usize,
    dt: f64,
    start: &[f64],
    truncated_t_max: f64,
    full_t_max: Option<f64>,
) -> Res<()> {
    resolve::sigmas(sigmas, &format!("{path}.sigmas"))?;
    if trajectories == 0 {
        return Err(bad(&format!("{path}.trajectories"), "needs at least one trajectory"));
    }
    positive(&format!("{path}.dt"), dt)?;
    step_count(truncated_t_max, dt).map_err(resolve::at(&format!("{path}.truncated_t_max")))?;
    if let Some(t) = full_t_max {
        step_count(t, dt).map_err(resolve::at(&format!("{path}.full_t_max")))?;
    }
    ctx.fam
        .check_point(start)
        .map_err(resolve::at(&format!("{path}.start")))?;
    Ok(())
}

fn noise(ctx: &Ctx, path: &str, task: NoiseTask) -> Res<TaskOut> {
    let targets = ctx.targets(path)?;
    let fam = &ctx.fam;
    noise_checks(
        ctx,
        path,
        task.sigmas,
        task.trajectories,
        task.dt,
        task.start,
        task.truncated_t_max,
        task.full_t_max,
    )?;
    let schedule = resolve::schedule(task.schedule, &format!("{path}.schedule"))?;
    let grids = task
        .kp
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            let p = format!("{path}.kp[{i}]");
            resolve::check_kp(fam, k, &p)?;
            Ok((k, resolve::spaced(targets, k, &p)?))
        })
        .collect::<Res<Vec<_>>>()?;
    if ctx.dry {
        return Ok(TaskOut::dry());
    }
    let seed = ctx.seed();
    let hs = instantiate_all(fam, targets)?;
    let ex: Vec<f64> = exact_ground(fam, targets)?.into_iter().map(|x| x.0).collect();
    let (_, g0) = ground_state(&fam.instantiate(task.start)?)?;
    let mut t = Table::new(task.name).real("sigma");
    for &sigma in task.sigmas {
        // Without noise every trajectory is identical.
        let n = if sigma == 0.0 { 1 } else { task.trajectories };
        let k = [sigma];
        let mut direct = Vec::new();
        if let Some(tm) = task.full_t_max {
            direct.push(("full_asp", tm, 0));
        }
        if task.direct_truncated {
            direct.push(("truncated_asp", task.truncated_t_max, 1));
        }
        for (label, tm, variant) in direct {
            let (e, _) = direct_noisy(fam, targets, &hs, task.dt, tm, task.start, &g0, sigma, n, seed, variant, None)?;
            t.push(&k, label, "rms", rms_error(&e, &ex)?);
            t.push(&k, label, "rel_rms", rel_rms_error(&e, &ex)?.value);
            t.push(&k, label, "trajectories", n as f64);
        }
        let alpha = schedule.alpha_for(sigma);
        for (kp, train) in &grids {
            let mut nc = NoiseConfig::new(sigma, n, seed);
            nc.bootstrap_resamples = task.bootstrap;
            let ens = ensemble_projected_matrices(
                fam,
                train.points(),
                task.dt,
                task.truncated_t_max,
                task.start,
                &g0,
                &nc,
            )?;
            let (cn, lam_min) = condition_number(&ens.mean);
            let label = format!("ec_kp{kp}");
            t.push(&k, &label, "condition_number", cn);
            t.push(&k, &label, "min_overlap_eigenvalue", lam_min);
            t.push(&k, &label, "max_stderr", ens.max_stderr());
            t.push(&k, &label, "trajectories", n as f64);
            match solve_targets(&ens.mean, fam, targets, None) {
                Ok(sols) => {
                    let e: Vec<f64> = sols.iter().map(|s| s.eigenvalues[0]).collect();
                    if sigma == 0.0 {
                        assert_bound(&e, &ex, targets, path)?;
                    }
                    t.push(&k, &label, "rms", rms_error(&e, &ex)?);
                    t.push(&k, &label, "rel_rms", rel_rms_error(&e, &ex)?.value);
                }
                Err(e) if is_conditioning(&e) => t.push(&k, &label, "ill_conditioned", 1.0),
                Err(e) => return Err(e.into()),
            }
            let label = format!("ec_kp{kp}_thresholded");
            let sols = solve_targets(&ens.mean, fam, targets, Some(alpha))?;
            let e: Vec<f64> = sols.iter().map(|s| s.eigenvalues[0]).collect();
            if sigma == 0.0 {
                assert_bound(&e, &ex, targets, path)?;
            }
            t.push(&k, &label, "rms", rms_error(&e, &ex)?);
            t.push(&k, &label, "rel_rms", rel_rms_error(&e, &ex)?.value);
            t.push(&k, &label, "condition_number", sols[0].condition_number);
            t.push(&k, &label, "effective_dim", sols[0].effective_dim as f64);
            t.push(&k, &label, "alpha", alpha);
        }
    }
    Ok(TaskOut {
        tables: vec![t],
        info: json!({
            "dt": task.dt,
            "start": task.start,
            "truncated_t_max": task.truncated_t_max,
            "full_t_max": task.full_t_max,
            "trajectories": task.trajectories,
            "trajectories_at_sigma_0": 1,
            "bootstrap_resamples": task.bootstrap,
        }),
    })
}

#[allow(clippy::too_many_arguments)]
fn basis_overlap(
    ctx: &Ctx,
    path: &str,
    name: &str,
    point: &[f64],
    spec: &MethodSpec,
    training: &TrainingSpec,
    krylov_k: usize,
    low_fraction: f64,
    sigmas: &[f64],
    trajectories: usize,
) -> Res<TaskOut> {
    let targets = ctx.targets(path)?;
    let fam = &ctx.fam;
    fam.check_point(point).map_err(resolve::at(&format!("{path}.point")))?;
    let method = method_check(spec, fam, ctx.seed(), path)?;
    let train = resolve::training(training, targets, &format!("{path}.training"))?;
    resolve::check_kp(fam, train.len(), &format!("{path}.training"))?;
    if krylov_k == 0 {
        return Err(bad(&format!("{path}.krylov_k"), "must be at least 1"));
    }
    if !(low_fraction > 0.0 && low_fraction <= 1.0) {
        return Err(bad(&format!("{path}.low_fraction"), "must lie in (0, 1]"));
    }
    for (i, s) in sigmas.iter().enumerate() {
        positive(&format!("{path}.sigmas[{i}]"), *s)?;
    }
    let noisy_asp = match (&method, sigmas.is_empty()) {
        (_, true) => None,
        (PrepMethod::Asp { dt, t_max, start }, false) => {
            if trajectories == 0 {
                return Err(bad(&format!("{path}.trajectories"), "noisy bases need at least one trajectory"));
            }
            Some((*dt, *t_max, start.clone()))
        }
        _ => return Err(bad(&format!("{path}.sigmas"), "noisy bases need the asp method")),
    };
    if ctx.dry {
        return Ok(TaskOut::dry());
    }
    let h = fam.instantiate(point)?;
    let spec_h = exact_diagonalize(&h)?;
    let low = ((low_fraction * spec_h.len() as f64).floor() as usize).max(1);
    let mut t = Table::new(name).real("sigma").int("level");
    let mut summary = Table::new(format!("{name}_summary")).real("sigma");
    for (l, e) in spec_h.eigenvalues.iter().enumerate() {
        t.push(&[0.0, l as f64], "exact", "energy", *e);
    }
    let mut record = |t: &mut Table, sigma: f64, label: &str, f: &[f64], cn: Option<f64>| {
        for (l, v) in f.iter().enumerate() {
            t.push(&[sigma, l as f64], label, "overlap", *v);
        }
        summary.push(&[sigma], label, "total", f.iter().sum());
        summary.push(&[sigma], label, "low_weight", f[..low].iter().sum());
        summary.push(&[sigma], label, "low_levels", low as f64);
        if let Some(c) = cn {
            summary.push(&[sigma], label, "condition_number", c);
        }
    };
    let gram_cn = |b: &SubspaceBasis| -> Res<f64> { Ok(condition_number(&project_operators(b, fam)?).0) };

    let ecb = build_basis(fam, &train, &method)?;
    record(&mut t, 0.0, "ec", &basis_eigenstate_overlap(&ecb, &spec_h)?, Some(gram_cn(&ecb)?));
    let kry = krylov_basis(&h, &StateVector::uniform(fam.nsites()), krylov_k)?;
    record(&mut t, 0.0, "krylov", &basis_eigenstate_overlap(&kry, &spec_h)?, Some(gram_cn(&kry)?));

    if let Some((dt, t_max, start)) = noisy_asp {
        let (_, g0) = ground_state(&fam.instantiate(&start)?)?;
        for &sigma in sigmas {
            let nc = NoiseConfig::new(sigma, trajectories, ctx.seed());
            let per = (0..trajectories)
                .into_par_iter()
                .map(|tr| {
                    let b = noisy_basis(fam, train.points(), dt, t_max, &start, &g0, &nc, tr)?;
                    Ok(basis_eigenstate_overlap(&b, &spec_h)?)
                })
                .collect::<Res<Vec<_>>>()?;
            let mut f = vec![0.0; spec_h.len()];
            for row in &per {
                for (a, b) in f.iter_mut().zip(row) {
                    *a += b / trajectories as f64;
                }
            }
            record(&mut t, sigma, "ec", &f, None);
        }
    }
    Ok(TaskOut {
        tables: vec![t, summary],
        info: json!({
            "method": method.describe(),
            "point": point,
            "training_points": train.points(),
            "krylov_start": "uniform",
            "trajectories": trajectories,
        }),
    })
}

struct MeasurementTask<'a> {
    name: &'a str,
    sigmas: &'a [f64],
    trajectories: usize,
    dt: f64,
    start: &'a [f64],
    truncated_t_max: f64,
    full_t_max: Option<f64>,
    kp: usize,
    schedule: &'a ScheduleSpec,
    probs: (f64, f64, f64),
}

fn measurement(ctx: &Ctx, path: &str, task: MeasurementTask) -> Res<TaskOut> {
    let targets = ctx.targets(path)?;
    let fam = &ctx.fam;
    noise_checks(
        ctx,
        path,
        task.sigmas,
        task.trajectories,
        task.dt,
        task.start,
        task.truncated_t_max,
        task.full_t_max,
    )?;
    let schedule = resolve::schedule(task.schedule, &format!("{path}.schedule"))?;
    resolve::check_kp(fam, task.kp, &format!("{path}.kp"))?;
    let train = resolve::spaced(targets, task.kp, &format!("{path}.kp"))?;
    let (p01, p10, pt1) = task.probs;
    let model = ConfusionModel::new(p01, p10, pt1).map_err(resolve::at(path))?;
    if ctx.dry {
        return Ok(TaskOut::dry());
    }
    let seed = ctx.seed();
    let n = task.trajectories;
    let hs = instantiate_all(fam, targets)?;
    let ex: Vec<f64> = exact_ground(fam, targets)?.into_iter().map(|x| x.0).collect();
    let (_, g0) = ground_state(&fam.instantiate(task.start)?)?;
    let scales: Vec<f64> = fam.groups().iter().map(|g| g.terms.len() as f64).collect();
    let mut t = Table::new(task.name).real("sigma");
    for (si, &sigma) in task.sigmas.iter().enumerate() {
        let k = [sigma];
        let mut direct = vec![("truncated_asp", task.truncated_t_max, 1)];
        if let Some(tm) = task.full_t_max {
            direct.insert(0, ("full_asp", tm, 0));
        }
        for (label, tm, variant) in direct {
            let (e, m) = direct_noisy(
                fam,
                targets,
                &hs,
                task.dt,
                tm,
                task.start,
                &g0,
                sigma,
                n,
                seed,
                variant,
                Some((&model, si as u64)),
            )?;
            t.push(&k, label, "rms", rms_error(&e, &ex)?);
            t.push(&k, &format!("{label}_measured"), "rms", rms_error(&m, &ex)?);
        }
        let nc = NoiseConfig::new(sigma, n, seed);
        let pairs = (0..n)
            .into_par_iter()
            .map(|tr| {
                let b = noisy_basis(fam, train.points(), task.dt, task.truncated_t_max, task.start, &g0, &nc, tr)?;
                let proj = project_operators(&b, fam)?;
                let mut r = rng::stream(seed, &[rng::tag::MEASUREMENT, si as u64, tr as u64]);
                let (m, clamped) = apply_measurement_error(&proj, &scales, &model, &mut r)?;
                Ok((proj, m, clamped))
            })
            .collect::<Res<Vec<_>>>()?;
        let ideal: Vec<SubspaceProjection> = pairs.iter().map(|p| p.0.clone()).collect();
        let measured: Vec<SubspaceProjection> = pairs.iter().map(|p| p.1.clone()).collect();
        let clamped: usize = pairs.iter().map(|p| p.2).sum();
        let alpha = schedule.alpha_for(sigma);
        for (label, samples) in [("ec", ideal), ("ec_measured", measured)] {
            let mean = pairwise_mean(&samples);
            let sols = solve_targets(&mean, fam, targets, Some(alpha))?;
            let e: Vec<f64> = sols.iter().map(|s| s.eigenvalues[0]).collect();
            if label == "ec" && sigma == 0.0 {
                assert_bound(&e, &ex, targets, path)?;
            }
            t.push(&k, label, "rms", rms_error(&e, &ex)?);
            t.push(&k, label, "condition_number", sols[0].condition_number);
        }
        t.push(&k, "ec_measured", "clamped", clamped as f64);
        t.push(&k, "ec", "alpha", alpha);
    }
    Ok(TaskOut {
        tables: vec![t],
        info: json!({
            "dt": task.dt,
            "start": task.start,
            "kp": task.kp,
            "trajectories": n,
            "confusion": { "p01": p01, "p10": p10, "pt1_max": pt1 },
        }),
    })
}
