//! The `nsbesov` command surface.
//!
//! Exit codes: 0 on success, 1 when a verdict fails (inadmissible
//! parameters, mismatched example rows, monitor breaches), 2 on parse or
//! runtime errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use ns_besov_core::admissibility::{self, Gate, Verdict};
use ns_besov_core::besov::{self, BesovParams};
use ns_besov_core::field::{critical_gamma, RandomFieldSpec};
use ns_besov_core::nonlinear::{EnsembleSpec, EstimateReport};
use ns_besov_core::solver::{self, lemma_exponents, SolverConfig, TrajectoryRecord};
use ns_besov_core::stokes;
use ns_besov_core::{rational, Rational, SpectralField};
use serde::Serialize;

use crate::artifact::{self, fmt_f64, Meta, Table};
use crate::scenario::Scenario;
use crate::{ensemble, snapshot, spectral, CliError, Spectral};

#[derive(Debug, Parser)]
#[command(
    name = "nsbesov",
    version,
    about = "Rough-data Navier-Stokes on the 2D torus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact parameter admissibility.
    #[command(subcommand)]
    Admissibility(AdmissibilityCommand),
    /// Norm reports of the scenario data.
    Norms(ScenarioArgs),
    /// Linear (Stokes) solve with energy bookkeeping.
    Stokes(ScenarioArgs),
    /// Direct nonlinear solve.
    Solve(ScenarioArgs),
    /// Split solve `u = x + y` compared against the direct solve.
    SolveSplit(ScenarioArgs),
    /// Empirical constants of the nonlinear estimates over random ensembles.
    VerifyEstimates(ScenarioArgs),
    /// Difference-equation probe of uniqueness.
    UniquenessProbe(ScenarioArgs),
    /// Recompute the reference parameter examples.
    ReproduceAppendixB {
        /// Write the full reports as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum AdmissibilityCommand {
    /// Check one parameter tuple; prints a JSON report.
    Check {
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long)]
        p: String,
        /// Defaults to max(r, 2) + 1.
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        r: String,
        /// Use the global-existence conditions.
        #[arg(long)]
        global: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify the (2/p, 2/r) grid for fixed s.
    Scan {
        #[arg(long, allow_hyphen_values = true)]
        s: String,
        #[arg(long, default_value_t = 8)]
        depth: u32,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct ScenarioArgs {
    /// Scenario TOML file.
    scenario: PathBuf,
    /// Output directory, overriding the scenario's.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Result of a subcommand that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome, CliError> {
    match cmd {
        Command::Admissibility(AdmissibilityCommand::Check {
            s,
            p,
            q,
            r,
            global,
            out: path,
        }) => admissibility_check(&s, &p, q.as_deref(), &r, global, path.as_deref(), out),
        Command::Admissibility(AdmissibilityCommand::Scan {
            s,
            depth,
            out: path,
        }) => admissibility_scan(&s, depth, &path, out),
        Command::ReproduceAppendixB { out: path } => reproduce_examples(path.as_deref(), out),
        Command::Norms(a) => Run::open(&a)?.norms(out),
        Command::Stokes(a) => Run::open(&a)?.stokes(out),
        Command::Solve(a) => Run::open(&a)?.solve(out, err),
        Command::SolveSplit(a) => Run::open(&a)?.solve_split(out, err),
        Command::VerifyEstimates(a) => Run::open(&a)?.verify_estimates(out),
        Command::UniquenessProbe(a) => Run::open(&a)?.uniqueness(out, err),
    }
}

fn parse_rational(field: &str, text: &str) -> Result<Rational, CliError> {
    rational::parse(text).map_err(|e| CliError::Parse(format!("--{field}: {e}")))
}

fn admissibility_check(
    s: &str,
    p: &str,
    q: Option<&str>,
    r: &str,
    global: bool,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let r = parse_rational("r", r)?;
    let q = match q {
        Some(q) => parse_rational("q", q)?,
        None => admissibility::default_q(r),
    };
    let bp = BesovParams::new(parse_rational("s", s)?, parse_rational("p", p)?, q, r)?;
    let gate = if global { Gate::Global } else { Gate::Local };
    let report = admissibility::check(&bp, gate);
    let json = serde_json::to_string_pretty(&report)? + "\n";
    if let Some(path) = path {
        std::fs::write(path, &json)?;
    }
    out.write_all(json.as_bytes())?;
    Ok(Outcome::from_bool(report.verdict() == Verdict::Pass))
}

fn admissibility_scan(
    s: &str,
    depth: u32,
    path: &Path,
    out: &mut dyn Write,
) -> Result<Outcome, CliError> {
    if !(1..=12).contains(&depth) {
        return Err(CliError::Parse(format!("--depth: {depth} outside 1..=12")));
    }
    let s = parse_rational("s", s)?;
    let report = admissibility::scan_region(s, depth);
    let rows: Vec<Vec<String>> = report
        .points
        .iter()
        .map(|pt| {
            vec![
                rational::format(&pt.x),
                rational::format(&pt.y),
                fmt_f64(rational::to_f64(&pt.x)),
                fmt_f64(rational::to_f64(&pt.y)),
                pt.local.to_string(),
                pt.global.to_string(),
            ]
        })
        .collect();
    artifact::write_rows(
        path,
        None,
        &["x", "y", "x_f64", "y_f64", "local", "global"],
        &rows,
    )?;
    writeln!(
        out,
        "s = {}, depth = {}: {} locally admissible and {} globally admissible grid points",
        rational::format(&s),
        depth,
        report.local_count,
        report.global_count
    )?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct ExampleRowReport {
    gate: Gate,
    s: String,
    r: String,
    p: String,
    q: String,
    claimed: String,
    computed: String,
    matches: bool,
    verdict: Verdict,
    flagged: Option<String>,
    report: admissibility::AdmissibilityReport,
}

fn reproduce_examples(path: Option<&Path>, out: &mut dyn Write) -> Result<Outcome, CliError> {
    let results = admissibility::reproduce_examples()?;
    let f = rational::format;
    writeln!(
        out,
        "{:<7} {:>7} {:>7} {:>7} {:>4} {:>8} {:>8} {:>5} {:<8} note",
        "gate", "s", "r", "p", "q", "claimed", "computed", "match", "verdict"
    )?;
    let mut rows = Vec::new();
    let mut ok = true;
    for res in results {
        let verdict = res.report.verdict();
        let flagged = res.report.first_violation().map(|c| {
            format!(
                "{:?} on ({}) {}: {} vs {}",
                c.verdict,
                c.id,
                c.statement,
                f(&c.lhs),
                f(&c.rhs)
            )
        });
        ok &= res.matches && verdict != Verdict::Fail;
        let gate = match res.row.gate {
            Gate::Local => "local",
            Gate::Global => "global",
        };
        writeln!(
            out,
            "{:<7} {:>7} {:>7} {:>7} {:>4} {:>8} {:>8} {:>5} {:<8} {}",
            gate,
            f(&res.row.s),
            f(&res.row.r),
            f(&res.row.p),
            f(&res.q),
            f(&res.row.claimed),
            f(&res.computed),
            if res.matches { "yes" } else { "NO" },
            format!("{verdict:?}").to_uppercase(),
            flagged.clone().unwrap_or_default()
        )?;
        rows.push(ExampleRowReport {
            gate: res.row.gate,
            s: f(&res.row.s),
            r: f(&res.row.r),
            p: f(&res.row.p),
            q: f(&res.q),
            claimed: f(&res.row.claimed),
            computed: f(&res.computed),
            matches: res.matches,
            verdict,
            flagged,
            report: res.report,
        });
    }
    if let Some(path) = path {
        std::fs::write(path, serde_json::to_string_pretty(&rows)? + "\n")?;
    }
    Ok(Outcome::from_bool(ok))
}

/// A loaded scenario with its output directory.
struct Run {
    scenario: Scenario,
    base: PathBuf,
    dir: PathBuf,
    sp: Spectral,
}

impl Run {
    fn open(args: &ScenarioArgs) -> Result<Self, CliError> {
        let scenario = Scenario::load(&args.scenario)?;
        let base = args
            .scenario
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_default();
        let dir = match &args.out {
            Some(d) => d.clone(),
            None => base.join(&scenario.output),
        };
        std::fs::create_dir_all(&dir)?;
        Ok(Self {
            scenario,
            base,
            dir,
            sp: spectral(),
        })
    }

    fn params(&self) -> BesovParams {
        self.scenario.params()
    }

    fn cfg(&self) -> &SolverConfig {
        &self.scenario.solver
    }

    fn meta(&self, cfg: &SolverConfig) -> Meta {
        Meta {
            scenario: self.scenario.name.clone(),
            scenario_hash: self.scenario.hash(),
            core_version: artifact::CORE_VERSION,
            cli_version: artifact::CLI_VERSION,
            n: cfg.n,
            m: self.sp.grid_size(cfg.n),
            dt: cfg.time_grid(cfg.horizon).1,
            constants: cfg.constants,
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn ensemble_gamma(&self) -> f64 {
        self.scenario.ensemble.gamma.unwrap_or_else(|| {
            critical_gamma(rational::to_f64(&self.params().initial_regularity()))
        })
    }

    /// Checks the scenario's gate; prints the failing condition.
    fn gate(&self, gate: Gate, err: &mut dyn Write) -> Result<bool, CliError> {
        let report = admissibility::check(&self.params(), gate);
        if let Some(c) = report.first_violation() {
            writeln!(
                err,
                "inadmissible parameters: ({}) {} is {:?} ({} vs {})",
                c.id,
                c.statement,
                c.verdict,
                rational::format(&c.lhs),
                rational::format(&c.rhs)
            )?;
            return Ok(false);
        }
        Ok(true)
    }

    /// Solver configuration, with constants re-estimated when requested.
    fn solver_config(&self) -> Result<SolverConfig, CliError> {
        let mut cfg = self.cfg().clone();
        if self.scenario.report.estimate_constants {
            cfg.constants = ensemble::estimate_constants(
                &self.sp,
                &self.params(),
                &cfg,
                self.ensemble_gamma(),
                self.scenario.ensemble.seed,
            )?;
        }
        Ok(cfg)
    }

    fn besov_columns(
        &self,
        record: &mut TrajectoryRecord,
        states: &[SpectralField],
    ) -> Result<(), CliError> {
        for spec in &self.scenario.report.besov {
            let (s, p, q) = (
                rational::to_f64(&spec.s.0),
                rational::to_f64(&spec.p.0),
                rational::to_f64(&spec.q.0),
            );
            let vals = states
                .iter()
                .map(|u| besov::besov(&self.sp, u, s, p, q))
                .collect::<ns_besov_core::Result<Vec<_>>>()?;
            record.push(&spec.label(), vals);
        }
        Ok(())
    }

    fn thin(&self, record: &TrajectoryRecord) -> Table {
        let every = self.scenario.report.record_every;
        let mut t = Table::from_record(record);
        let last = t.rows.len().saturating_sub(1);
        t.rows = t
            .rows
            .into_iter()
            .enumerate()
            .filter(|(i, _)| i % every == 0 || *i == last)
            .map(|(_, r)| r)
            .collect();
        t
    }

    fn thinned_states<'a>(&self, states: &'a [SpectralField]) -> Vec<&'a SpectralField> {
        let every = self.scenario.report.record_every;
        let last = states.len().saturating_sub(1);
        states
            .iter()
            .enumerate()
            .filter(|(i, _)| i % every == 0 || *i == last)
            .map(|(_, s)| s)
            .collect()
    }

    fn norms(&self, out: &mut dyn Write) -> Result<Outcome, CliError> {
        let params = self.params();
        let u0 = self.scenario.initial_field(&self.base)?;
        let f0 = self.scenario.forcing_spec()?.eval(self.cfg().n, 0.0)?;
        let (s, p, q, r) = (
            params.s_f64(),
            params.p_f64(),
            params.q_f64(),
            params.r_f64(),
        );
        let mut reports = vec![
            (
                "initial_trace",
                besov::besov_norm(
                    &self.sp,
                    &u0,
                    rational::to_f64(&params.initial_regularity()),
                    p,
                    r,
                )?,
            ),
            (
                "initial_top",
                besov::besov_norm(&self.sp, &u0, 2.0 - s, p, q)?,
            ),
            ("forcing_at_0", besov::besov_norm(&self.sp, &f0, -s, p, q)?),
        ];
        for spec in &self.scenario.report.besov {
            let rep = besov::besov_norm(
                &self.sp,
                &u0,
                rational::to_f64(&spec.s.0),
                rational::to_f64(&spec.p.0),
                rational::to_f64(&spec.q.0),
            )?;
            reports.push(("initial_extra", rep));
        }
        #[derive(Serialize)]
        struct Named<'a> {
            name: &'a str,
            norm: &'a besov::NormReport,
        }
        let named: Vec<Named> = reports
            .iter()
            .map(|(n, r)| Named { name: n, norm: r })
            .collect();
        artifact::write_json(&self.path("norms.json"), &self.meta(self.cfg()), &named)?;
        for (name, r) in &reports {
            writeln!(out, "{name}: {}", fmt_f64(r.value))?;
        }
        Ok(Outcome::Pass)
    }

    fn stokes(&self, out: &mut dyn Write) -> Result<Outcome, CliError> {
        let mut cfg = self.cfg().clone();
        cfg.nonlinear = false;
        let u0 = cfg.galerkin(&self.scenario.initial_field(&self.base)?);
        let f = cfg.galerkin_forcing(&self.scenario.forcing_spec()?);
        let res = solver::solve(&self.sp, &cfg, &u0, &f, cfg.horizon)?;
        if let Some(e) = res.failure {
            return Err(e.into());
        }
        let traj = &res.trajectory;
        let mut record = res.record.clone();
        let exact = stokes::stokes_solve(&u0, &f, cfg.horizon, traj.len() - 1)?;
        let mut gap = Vec::with_capacity(traj.len());
        for (u, e) in traj.states.iter().zip(&exact.states) {
            gap.push(u.sub(e)?.l2_norm());
        }
        record.push("closed_form_gap", gap);
        self.besov_columns(&mut record, &traj.states)?;
        artifact::write_table(
            &self.path("stokes.csv"),
            &self.meta(&cfg),
            &self.thin(&record),
        )?;
        let max_gap = record
            .column("closed_form_gap")
            .unwrap_or(&[])
            .iter()
            .copied()
            .fold(0.0, f64::max);
        writeln!(
            out,
            "stokes: {} samples, max closed-form gap {}",
            traj.len(),
            fmt_f64(max_gap)
        )?;
        Ok(Outcome::Pass)
    }

    fn solve(&self, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome, CliError> {
        if !self.gate(self.scenario.gate.into(), err)? {
            return Ok(Outcome::Fail);
        }
        let cfg = self.solver_config()?;
        let u0 = self.scenario.initial_field(&self.base)?;
        let f = self.scenario.forcing_spec()?;
        let res = solver::solve(&self.sp, &cfg, &u0, &f, cfg.horizon)?;
        let meta = self.meta(&cfg);
        let traj = &res.trajectory;
        let mut record = res.record.clone();
        let thinned: Vec<SpectralField> = self
            .thinned_states(&traj.states)
            .into_iter()
            .cloned()
            .collect();
        let mut table = self.thin(&record);
        if !self.scenario.report.besov.is_empty() {
            let mut extra = TrajectoryRecord::new(table.rows.iter().map(|r| r[0]).collect());
            self.besov_columns(&mut extra, &thinned)?;
            for (name, vals) in extra.columns {
                table.header.push(name);
                for (row, v) in table.rows.iter_mut().zip(vals) {
                    row.push(v);
                }
            }
        }
        record.columns.clear();
        artifact::write_table(&self.path("trajectory.csv"), &meta, &table)?;
        for &t in &self.scenario.report.snapshot_times {
            let i = nearest(&traj.times, t);
            snapshot::save(
                &self.path(&format!("snapshot_{i:06}.bnsf")),
                traj.times[i],
                &traj.states[i],
            )?;
        }
        let residual = res.record.column("energy_residual").unwrap_or(&[]);
        let summary = SolveSummary {
            samples: traj.len(),
            final_time: traj.times[traj.len() - 1],
            max_abs_energy_residual: residual.iter().map(|r| r.abs()).fold(0.0, f64::max),
            final_l2: traj.states[traj.len() - 1].l2_norm(),
            failure: res.failure.as_ref().map(|e| e.to_string()),
        };
        artifact::write_json(&self.path("solve.json"), &meta, &summary)?;
        if let Some(e) = res.failure {
            let last = traj.len() - 1;
            snapshot::save(
                &self.path("last_healthy.bnsf"),
                traj.times[last],
                &traj.states[last],
            )?;
            return Err(e.into());
        }
        writeln!(
            out,
            "solve: T = {}, |u(T)| = {}, max energy residual {}",
            fmt_f64(summary.final_time),
            fmt_f64(summary.final_l2),
            fmt_f64(summary.max_abs_energy_residual)
        )?;
        Ok(Outcome::Pass)
    }

    fn solve_split(&self, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome, CliError> {
        if !self.gate(Gate::Global, err)? {
            return Ok(Outcome::Fail);
        }
        let cfg = self.solver_config()?;
        let params = self.params();
        let u0 = self.scenario.initial_field(&self.base)?;
        let f = self.scenario.forcing_spec()?;
        let rep = solver::solve_split(
            &self.sp,
            &u0,
            &f,
            &params,
            &cfg,
            self.scenario.report.eps_split,
        )?;
        let meta = self.meta(&cfg);
        artifact::write_table(&self.path("split_x.csv"), &meta, &self.thin(&rep.x.record))?;
        artifact::write_table(&self.path("split_y.csv"), &meta, &self.thin(&rep.y.record))?;
        let mut u_rec = TrajectoryRecord::new(rep.combined.times.clone());
        u_rec.push("discrepancy_l2", rep.discrepancy.clone());
        u_rec.push(
            "l2",
            rep.combined.states.iter().map(|u| u.l2_norm()).collect(),
        );
        artifact::write_table(&self.path("split_u.csv"), &meta, &self.thin(&u_rec))?;
        let summary = SplitSummary {
            cutoff: rep.split.cutoff,
            h_norm: rep.split.h_norm,
            y0_norm: rep.split.y0_norm,
            lemma_c: rep.x.lemma_c,
            energy_breaches: rep.x.energy_breaches,
            gronwall_breaches: rep.x.gronwall_breaches,
            max_energy_residual: rep.x.max_energy_residual,
            y_replay_deviation: rep.x.y_replay_deviation,
            max_discrepancy: rep.max_discrepancy,
            lr_critical_norm: rep.lr_critical_norm,
            sup_trace_norm: rep.sup_trace_norm,
        };
        artifact::write_json(&self.path("split.json"), &meta, &summary)?;
        writeln!(
            out,
            "solve-split: K = {}, max |x+y - u| = {}, breaches: energy {}, gronwall {}",
            summary.cutoff,
            fmt_f64(summary.max_discrepancy),
            summary.energy_breaches,
            summary.gronwall_breaches
        )?;
        Ok(Outcome::from_bool(
            summary.energy_breaches == 0 && summary.gronwall_breaches == 0,
        ))
    }

    fn verify_estimates(&self, out: &mut dyn Write) -> Result<Outcome, CliError> {
        let params = self.params();
        let ens = &self.scenario.ensemble;
        let gamma = self.ensemble_gamma();
        let resolutions = if ens.resolutions.is_empty() {
            vec![self.cfg().n]
        } else {
            ens.resolutions.clone()
        };
        let lemma = lemma_exponents(&params).ok();
        let mut reports: Vec<EstimateReport> = Vec::new();
        for &n in &resolutions {
            let spec = EnsembleSpec::new(n, ens.count, ens.seed, gamma);
            match ensemble::estimate_chain(&self.sp, &params, &spec) {
                Ok(chain) => {
                    reports.push(chain.sti);
                    reports.push(chain.sti2);
                }
                Err(e) => writeln!(out, "N = {n}: estimate chain skipped: {e}")?,
            }
            if let Some(le) = &lemma {
                reports.push(ensemble::energy_lemma(
                    &self.sp,
                    &spec,
                    self.cfg().lemma_eps,
                    le,
                )?);
            }
        }
        let meta = self.meta(self.cfg());
        artifact::write_json(&self.path("estimates.json"), &meta, &reports)?;
        let rows: Vec<Vec<String>> = reports
            .iter()
            .flat_map(|r| {
                r.samples.iter().map(move |s| {
                    vec![
                        format!("{:?}", r.id).to_lowercase(),
                        r.n.to_string(),
                        s.seed.to_string(),
                        fmt_f64(s.lhs),
                        fmt_f64(s.rhs),
                        s.ratio.map(fmt_f64).unwrap_or_default(),
                    ]
                })
            })
            .collect();
        artifact::write_rows(
            &self.path("estimates.csv"),
            Some(&meta),
            &["estimate", "N", "seed", "lhs", "rhs", "ratio"],
            &rows,
        )?;
        for r in &reports {
            writeln!(
                out,
                "{:<6} N = {:>3}: max ratio {} over {} of {} samples",
                format!("{:?}", r.id).to_lowercase(),
                r.n,
                r.max_ratio.map(fmt_f64).unwrap_or_else(|| "-".into()),
                r.counted,
                r.count
            )?;
        }
        Ok(Outcome::Pass)
    }

    fn uniqueness(&self, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome, CliError> {
        if !self.gate(self.scenario.gate.into(), err)? {
            return Ok(Outcome::Fail);
        }
        let cfg = self.solver_config()?;
        let params = self.params();
        let u0 = self.scenario.initial_field(&self.base)?;
        let f = self.scenario.forcing_spec()?;
        let u = solver::integrate(&self.sp, &cfg, &u0, &f, cfg.horizon)?;
        let rep_cfg = &self.scenario.report;
        let d = cfg.galerkin(
            &RandomFieldSpec::new(self.ensemble_gamma(), rep_cfg.delta_seed).sample(cfg.n)?,
        );
        let norm = d.l2_norm();
        let delta0 = if norm > 0.0 {
            d.scale(rep_cfg.delta_amplitude / norm)
        } else {
            d
        };
        let rep = solver::uniqueness_probe(&self.sp, &u, &u, &params, &cfg, &delta0)?;
        let meta = self.meta(&cfg);
        let mut rec = TrajectoryRecord::new(u.times.clone());
        rec.push("delta_l2", rep.delta_norms.clone());
        rec.push("envelope", rep.envelope.clone());
        artifact::write_table(&self.path("uniqueness.csv"), &meta, &self.thin(&rec))?;
        let summary = UniquenessSummary {
            c_u: rep.c_u.clone(),
            strictly_decreasing: rep.strictly_decreasing,
            zero_start_exact: rep.zero_start_exact,
            envelope_breaches: rep.envelope_breaches,
            delta0: delta0.l2_norm(),
            delta_final: rep.delta_norms.last().copied().unwrap_or(0.0),
        };
        artifact::write_json(&self.path("uniqueness.json"), &meta, &summary)?;
        writeln!(
            out,
            "uniqueness: C_u(T) from {} to {}, strictly decreasing: {}, zero start exact: {}, envelope breaches: {}",
            fmt_f64(rep.c_u[0].1),
            fmt_f64(rep.c_u[rep.c_u.len() - 1].1),
            rep.strictly_decreasing,
            rep.zero_start_exact,
            rep.envelope_breaches
        )?;
        Ok(Outcome::from_bool(
            rep.strictly_decreasing && rep.zero_start_exact && rep.envelope_breaches == 0,
        ))
    }
}

fn nearest(times: &[f64], t: f64) -> usize {
    times
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - t).abs().total_cmp(&(b.1 - t).abs()))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

#[derive(Serialize)]
struct SolveSummary {
    samples: usize,
    final_time: f64,
    final_l2: f64,
    max_abs_energy_residual: f64,
    failure: Option<String>,
}

#[derive(Serialize)]
struct SplitSummary {
    cutoff: i64,
    h_norm: f64,
    y0_norm: f64,
    lemma_c: Option<f64>,
    energy_breaches: usize,
    gronwall_breaches: usize,
    max_energy_residual: f64,
    y_replay_deviation: f64,
    max_discrepancy: f64,
    lr_critical_norm: f64,
    sup_trace_norm: f64,
}

#[derive(Serialize)]
struct UniquenessSummary {
    c_u: Vec<(f64, f64)>,
    strictly_decreasing: bool,
    zero_start_exact: bool,
    envelope_breaches: usize,
    delta0: f64,
    delta_final: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let mut o = Vec::new();
        let mut e = Vec::new();
        let code = run(
            std::iter::once("nsbesov").chain(args.iter().copied()),
            &mut o,
            &mut e,
        );
        (
            code,
            String::from_utf8(o).unwrap(),
            String::from_utf8(e).unwrap(),
        )
    }

    #[test]
    fn check_pass_and_fail() {
        let (code, out, _) = run_args(&[
            "admissibility",
            "check",
            "--s",
            "4/3",
            "--p",
            "5/2",
            "--q",
            "3",
            "--r",
            "3",
        ]);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("\"PASS\""));
        let (code, out, _) = run_args(&[
            "admissibility",
            "check",
            "--s",
            "5/2",
            "--p",
            "5/2",
            "--r",
            "3",
        ]);
        assert_eq!(code, 1);
        assert!(out.contains("\"FAIL\""));
    }

    #[test]
    fn negative_s_accepted() {
        let (code, _, err) = run_args(&[
            "admissibility",
            "check",
            "--s",
            "-9/10",
            "--p",
            "40/39",
            "--r",
            "100/49",
            "--global",
        ]);
        assert_eq!(code, 0, "{err}");
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_args(&["bogus"]).0, 2);
        assert_eq!(
            run_args(&[
                "admissibility",
                "check",
                "--s",
                "1.5",
                "--p",
                "3",
                "--r",
                "3"
            ])
            .0,
            2
        );
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn examples_reproduce() {
        let (code, out, _) = run_args(&["reproduce-appendix-b"]);
        assert_eq!(code, 0, "{out}");
        assert_eq!(out.matches("BOUNDARY").count(), 1, "{out}");
        assert!(!out.contains(" NO "));
    }
}
