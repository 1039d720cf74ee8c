//! Simulation driver, resume, one-shot diagnosis and the inequality lab.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use bkmhd_core::diagnostics::{DiagConfig, DiagnosticRecord, Diagnostics, Integrals, MaxPrincipleConfig};
use bkmhd_core::dynamics::{Model, SimState};
use bkmhd_core::fields::{abc, beltrami, random_band};
use bkmhd_core::inequality_lab::{check_all, estimate_constant, scaling_invariance_check, ConstantReport, FieldCorpus, InequalityResult};
use bkmhd_core::spectral::{Grid, Sampling, VectorField3};
use bkmhd_core::timestepper::{advance_to, StepControl};

use crate::checkpoint::{load_checkpoint, save_checkpoint, Checkpoint};
use crate::config::{IcSpec, LabConfig, SimConfig};
use crate::error::{format_err, Result};
use crate::timeseries::{write_timeseries, Metadata};

pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const FINAL_CHECKPOINT: &str = "final.bkmd";
pub const BLOWUP_CHECKPOINT: &str = "blowup.bkmd";

fn field_from_ic(ic: &IcSpec, g: &Grid, pick_u: bool) -> Result<VectorField3> {
    Ok(match ic {
        IcSpec::Zero => VectorField3::zeros_spectral(g),
        IcSpec::Beltrami { amplitude } => beltrami(g, *amplitude),
        IcSpec::Abc { a, b, c } => abc(g, *a, *b, *c)?,
        IcSpec::RandomBand { band, amplitude, seed } => random_band(g, *band, *seed)?.scaled(*amplitude)?,
        IcSpec::File(path) => {
            let cp = load_checkpoint(path)?;
            let src = cp.state.grid();
            if src.n() != g.n() {
                return Err(format_err(format!("{} holds n = {}, configuration wants n = {}", path.display(), src.n(), g.n())));
            }
            let f = if pick_u {
                cp.state.u.ok_or_else(|| format_err(format!("{} has no velocity field", path.display())))?
            } else {
                cp.state.b
            };
            f.rebox(g)?
        }
    })
}

/// Initial state at `t = 0` described by the configuration.
pub fn build_initial(cfg: &SimConfig) -> Result<SimState> {
    let g = cfg.grid()?;
    let b = field_from_ic(&cfg.ic, &g, false)?;
    Ok(match cfg.model {
        Model::Emhd => SimState::emhd(b)?,
        Model::HallMhd => {
            let u = match &cfg.u_ic {
                Some(ic) => field_from_ic(ic, &g, true)?,
                None => VectorField3::zeros_spectral(&g),
            };
            SimState::hall_mhd(u, b, cfg.nu)?
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Halt {
    Completed,
    BlowUp(String),
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub final_state: SimState,
    pub halt: Halt,
    pub integrals: Integrals,
    pub steps: usize,
    pub records: Vec<DiagnosticRecord>,
    pub h4_ratio_max: f64,
    pub warnings: Vec<String>,
}

/// Everything a run needs besides the initial state.
#[derive(Debug, Clone)]
pub struct RunPlan {
    pub t_end: f64,
    pub diag_every: f64,
    pub checkpoint_every: f64,
    pub step: StepControl,
    pub out_dir: Option<PathBuf>,
    pub config_hash: String,
}

impl RunPlan {
    pub fn from_config(cfg: &SimConfig) -> Self {
        Self {
            t_end: cfg.t_end,
            diag_every: cfg.diag_every,
            checkpoint_every: cfg.checkpoint_every,
            step: cfg.step,
            out_dir: Some(cfg.out_dir.clone()),
            config_hash: cfg.hash(),
        }
    }
}

/// Multiples of `every` strictly after `t0` and before `t_end`, then `t_end`.
/// Targets are `k * every` rather than a running sum, so a resumed run hits
/// the same times bit for bit.
pub fn sample_times(t0: f64, t_end: f64, every: f64) -> Vec<f64> {
    let eps = 1e-12 * t_end.abs().max(1.0);
    let mut out = Vec::new();
    let mut k = (t0 / every).round() as u64;
    if (k as f64) * every <= t0 + eps {
        k += 1;
    }
    loop {
        let t = k as f64 * every;
        if t >= t_end - eps {
            break;
        }
        out.push(t);
        k += 1;
    }
    if t_end > t0 + eps {
        out.push(t_end);
    }
    out
}

fn checkpoint_path(dir: &Path, index: u64) -> PathBuf {
    dir.join(format!("checkpoint_{index:06}.bkmd"))
}

/// Drive `state` to `plan.t_end`, recording diagnostics at every sample time
/// and at the start. `diag` carries the integrals accumulated so far.
pub fn run_from(state: SimState, mut diag: Diagnostics, plan: &RunPlan) -> Result<RunResult> {
    plan.step.validate()?;
    if let Some(dir) = &plan.out_dir {
        fs::create_dir_all(dir)?;
    }
    let k = diag.config().max_principle.k;
    let save = |state: &SimState, integrals: Integrals, path: PathBuf| {
        save_checkpoint(&Checkpoint { state: state.clone(), k, integrals }, &path)
    };

    let mut warnings = diag.config().lps.warnings();
    let mut records = vec![diag.record(&state)?];
    let mut state = state;
    let mut steps = 0;
    let mut halt = Halt::Completed;
    let mut next_checkpoint = if plan.checkpoint_every > 0.0 {
        (state.t / plan.checkpoint_every + 1e-9).floor() as u64 + 1
    } else {
        0
    };
    let eps = 1e-12 * plan.t_end.abs().max(1.0);

    for target in sample_times(state.t, plan.t_end, plan.diag_every) {
        let adv = advance_to(state, target, &plan.step)?;
        steps += adv.steps;
        state = adv.state;
        if let Some(reason) = adv.blow_up {
            if state.t > records.last().map_or(f64::NEG_INFINITY, |r| r.t) {
                records.push(diag.record(&state)?);
            }
            if let Some(dir) = &plan.out_dir {
                save(&state, diag.integrals(), dir.join(BLOWUP_CHECKPOINT))?;
            }
            warnings.push(format!("blow-up: {reason}"));
            halt = Halt::BlowUp(reason);
            break;
        }
        records.push(diag.record(&state)?);
        if let (Some(dir), true) = (&plan.out_dir, plan.checkpoint_every > 0.0) {
            while (next_checkpoint as f64) * plan.checkpoint_every <= state.t + eps {
                save(&state, diag.integrals(), checkpoint_path(dir, next_checkpoint))?;
                next_checkpoint += 1;
            }
        }
    }

    if let Some(dir) = &plan.out_dir {
        if halt == Halt::Completed {
            save(&state, diag.integrals(), dir.join(FINAL_CHECKPOINT))?;
        }
        let mut meta = Metadata::new(plan.config_hash.clone());
        meta.extra.push(("model".into(), state.model.tag().into()));
        meta.extra.push(("n".into(), state.grid().n().to_string()));
        meta.extra.push(("K".into(), k.to_string()));
        write_timeseries(&records, &meta, &dir.join(TIMESERIES_FILE))?;
    }

    Ok(RunResult {
        final_state: state,
        halt,
        integrals: diag.integrals(),
        steps,
        h4_ratio_max: diag.h4_ratio_max(),
        records,
        warnings,
    })
}

pub fn run(cfg: &SimConfig) -> Result<RunResult> {
    let state = build_initial(cfg)?;
    run_from(state, Diagnostics::new(cfg.diag_config())?, &RunPlan::from_config(cfg))
}

/// Settings for continuing from a checkpoint.
#[derive(Debug, Clone)]
pub struct ResumeOptions {
    pub t_end: f64,
    pub diag_every: f64,
    pub checkpoint_every: f64,
    pub step: StepControl,
    pub sampling: Sampling,
    pub lps: bkmhd_core::diagnostics::LpsExponents,
    pub out_dir: Option<PathBuf>,
}

impl ResumeOptions {
    /// Stepping and output settings from a configuration, with a new end time.
    pub fn from_config(cfg: &SimConfig, t_end: f64) -> Self {
        Self {
            t_end,
            diag_every: cfg.diag_every,
            checkpoint_every: cfg.checkpoint_every,
            step: cfg.step,
            sampling: cfg.sampling(),
            lps: cfg.lps,
            out_dir: Some(cfg.out_dir.clone()),
        }
    }

    pub fn defaults(t_end: f64, out_dir: Option<PathBuf>) -> Self {
        Self {
            t_end,
            diag_every: 0.1,
            checkpoint_every: 0.0,
            step: StepControl::default(),
            sampling: Sampling::Oversampled,
            lps: Default::default(),
            out_dir,
        }
    }
}

pub fn resume(cp: Checkpoint, opts: &ResumeOptions, config_hash: String) -> Result<RunResult> {
    if opts.t_end.is_nan() || opts.t_end < cp.state.t {
        return Err(format_err(format!("t_end = {} is before the checkpoint time {}", opts.t_end, cp.state.t)));
    }
    let diag_cfg = DiagConfig { max_principle: MaxPrincipleConfig { k: cp.k }, lps: opts.lps, sampling: opts.sampling };
    let plan = RunPlan {
        t_end: opts.t_end,
        diag_every: opts.diag_every,
        checkpoint_every: opts.checkpoint_every,
        step: opts.step,
        out_dir: opts.out_dir.clone(),
        config_hash,
    };
    run_from(cp.state, Diagnostics::resume(diag_cfg, cp.integrals)?, &plan)
}

/// Diagnostics of a single checkpoint, without further accumulation.
pub fn diagnose(cp: &Checkpoint, sampling: Sampling) -> Result<DiagnosticRecord> {
    let cfg = DiagConfig { max_principle: MaxPrincipleConfig { k: cp.k }, sampling, ..Default::default() };
    Ok(Diagnostics::resume(cfg, cp.integrals)?.record(&cp.state)?)
}

#[derive(Debug, Clone)]
pub struct ScalingRow {
    pub field_id: usize,
    pub n: usize,
    pub original: f64,
    pub rescaled: f64,
}

impl ScalingRow {
    pub fn rel_diff(&self) -> f64 {
        let scale = self.original.abs().max(self.rescaled.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.original - self.rescaled).abs() / scale
        }
    }
}

#[derive(Debug, Clone)]
pub struct LabOutput {
    pub results: Vec<InequalityResult>,
    pub constants: Vec<ConstantReport>,
    pub scaling: Vec<ScalingRow>,
}

/// Fields used for the scaling check, per grid size.
pub const SCALING_FIELDS: usize = 10;

pub fn run_lab(cfg: &LabConfig) -> Result<LabOutput> {
    let mut results = Vec::new();
    let mut scaling = Vec::new();
    for &n in &cfg.n_values {
        let grid = Grid::with_length(n, cfg.box_length)?;
        let corpus = FieldCorpus { seed: cfg.seed, count: cfg.count, generator: cfg.generator, band: cfg.band, grid };
        let fields = corpus.generate()?;
        let sampling = cfg.sampling(n);
        results.extend(check_all(&fields, sampling)?);
        if cfg.scaling_lambda >= 2 {
            for (field_id, f) in fields.iter().take(SCALING_FIELDS).enumerate() {
                let (original, rescaled) = scaling_invariance_check(f, cfg.scaling_lambda, sampling)?;
                scaling.push(ScalingRow { field_id, n, original, rescaled });
            }
        }
    }
    let constants = estimate_constant(&results)?;
    let out = LabOutput { results, constants, scaling };
    write_lab(&out, cfg)?;
    Ok(out)
}

fn lab_file(meta: &str, header: &str, rows: impl Iterator<Item = String>) -> String {
    let mut s = String::from(meta);
    s.push_str(header);
    s.push('\n');
    for r in rows {
        s.push_str(&r);
        s.push('\n');
    }
    s
}

fn write_lab(out: &LabOutput, cfg: &LabConfig) -> Result<()> {
    fs::create_dir_all(&cfg.out_dir)?;
    let mut meta = Metadata::new(cfg.hash());
    meta.extra.push(("generator".into(), cfg.generator.tag().into()));
    let meta = meta.lines();
    let constants = lab_file(
        &meta,
        "inequality_id,n,max_ratio,median_ratio,trend",
        out.constants.iter().map(|c| {
            let trend = c.trend.map_or_else(String::new, |t| format!("{t:?}"));
            format!("{},{},{:?},{:?},{}", c.inequality_id, c.n, c.max_ratio, c.median_ratio, trend)
        }),
    );
    fs::write(cfg.out_dir.join("constants.csv"), constants)?;
    let results = lab_file(
        &meta,
        "inequality_id,n,field_id,lhs,rhs,ratio",
        out.results.iter().map(|r| format!("{},{},{},{:?},{:?},{:?}", r.inequality_id, r.n, r.field_id, r.lhs, r.rhs, r.ratio)),
    );
    fs::write(cfg.out_dir.join("lab_results.csv"), results)?;
    if !out.scaling.is_empty() {
        let scaling = lab_file(
            &meta,
            "field_id,n,original,rescaled,rel_diff",
            out.scaling.iter().map(|s| format!("{},{},{:?},{:?},{:?}", s.field_id, s.n, s.original, s.rescaled, s.rel_diff())),
        );
        fs::write(cfg.out_dir.join("scaling.csv"), scaling)?;
    }
    Ok(())
}

/// Short human summary of a finished run.
pub fn summary(r: &RunResult) -> String {
    let mut s = String::new();
    match &r.halt {
        Halt::Completed => writeln!(s, "completed at t = {} after {} steps", r.final_state.t, r.steps).unwrap(),
        Halt::BlowUp(why) => writeln!(s, "halted by blow-up at t = {}: {why}", r.final_state.t).unwrap(),
    }
    let i = r.integrals;
    writeln!(s, "I_emhd = {:e}, I_hall = {:e}, I_cdl = {:e}, I_bmo = {:e}", i.emhd, i.hall, i.cdl, i.bmo).unwrap();
    writeln!(s, "max H4 residual ratio = {:e}", r.h4_ratio_max).unwrap();
    for w in &r.warnings {
        writeln!(s, "warning: {w}").unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_grid() {
        assert_eq!(sample_times(0.0, 0.35, 0.1), vec![0.1, 0.2, 0.30000000000000004, 0.35]);
        assert_eq!(sample_times(0.0, 0.3, 0.1), vec![0.1, 0.2, 0.3]);
        assert!(sample_times(0.5, 0.5, 0.1).is_empty());
        // Resuming at a sample time gives the remaining tail of the same grid.
        let full = sample_times(0.0, 1.0, 0.1);
        let tail = sample_times(full[3], 1.0, 0.1);
        assert_eq!(&full[4..], &tail[..]);
    }

    #[test]
    fn zero_t_end_records_initial_state_only() {
        let cfg = SimConfig::parse("model=emhd\nn=8\nt_end=0\nic=beltrami").unwrap();
        let plan = RunPlan { out_dir: None, ..RunPlan::from_config(&cfg) };
        let r = run_from(build_initial(&cfg).unwrap(), Diagnostics::new(cfg.diag_config()).unwrap(), &plan).unwrap();
        assert_eq!(r.records.len(), 1);
        assert_eq!(r.steps, 0);
        assert_eq!(r.halt, Halt::Completed);
    }

    fn checkpoint_names(dir: &Path) -> Vec<String> {
        let mut names: Vec<String> = fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .filter(|n| n.starts_with("checkpoint_"))
            .collect();
        names.sort();
        names
    }

    #[test]
    fn checkpoint_cadence() {
        let tmp = tempfile::tempdir().unwrap();
        for (every, want) in [(0.0, vec![]), (0.1, vec!["checkpoint_000001.bkmd", "checkpoint_000002.bkmd"])] {
            let dir = tmp.path().join(format!("every_{every}"));
            let text = format!("model=emhd\nn=8\nt_end=0.2\nic=beltrami\ncheckpoint_every={every}\nout_dir={}", dir.display());
            run(&SimConfig::parse(&text).unwrap()).unwrap();
            assert_eq!(checkpoint_names(&dir), want);
            assert!(dir.join(FINAL_CHECKPOINT).exists());
        }
    }
}
