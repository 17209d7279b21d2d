use std::fmt::Write as _;

use butterfly_core::analysis::{
    eta_prime_cell, eta_prime_grid, find_crossing, gap_sweep, min_gap_vs_nx, param_grid, CrossingPoint, McBudget,
    SweepConfig,
};
use butterfly_core::depol_rates::{rate_parallel_depol, rate_parallel_depol_limit};
use butterfly_core::erasure_rates::{asymptotic_rates, rate_grid, rate_parallel_assisted};
use butterfly_core::erasure_sim::simulate;
use butterfly_core::fmt::sig12;
use butterfly_core::quantum_bound::asymptotic_bound;
use butterfly_core::report::{rate_report, Provenance, RateQuery, Valued};
use butterfly_core::verify::{run_verify, VerifyOptions};
use butterfly_core::{build_grid, closed_form_bound, ChannelKind, ChannelModel, Strategy};
use serde::Serialize;
use serde_json::json;

use crate::args::{parse_floats, Format, RunArgs, StrategyArg, VerifyArgs};
use crate::output::{plot_script, Rendered};
use crate::CliError;

/// Everything that determines a run's numbers, echoed into every output.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub subcommand: &'static str,
    pub channel: ChannelKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param_range: Option<String>,
    pub nx: usize,
    pub ny: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub nx_list: Vec<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub ny_list: Vec<usize>,
    pub strategy: StrategyArg,
    pub assisted: bool,
    pub asymptotic: bool,
    pub joint_input: bool,
    pub exponent_mode: String,
    pub bracket: String,
    pub tol: f64,
    pub trials: u64,
    pub seed: u64,
    pub format: Format,
}

impl RunConfig {
    fn from_args(subcommand: &'static str, a: &RunArgs, default_format: Format) -> Result<Self, CliError> {
        let (nx, ny) = match (a.grid, a.nx, a.ny) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(CliError::Usage("--grid conflicts with --nx/--ny".into()))
            }
            (Some(g), None, None) => g,
            (None, nx, ny) => (nx.unwrap_or(1), ny.unwrap_or(1)),
        };
        if nx == 0 || ny == 0 {
            return Err(CliError::Usage(format!("grid dimensions must be >= 1, got {nx}x{ny}")));
        }
        if a.trials == 0 {
            return Err(CliError::Usage("--trials must be >= 1".into()));
        }
        if a.channel == ChannelKind::Identity && a.param.is_some() {
            return Err(CliError::Usage("the identity channel takes no --param".into()));
        }
        Ok(RunConfig {
            subcommand,
            channel: a.channel,
            param: a.param,
            param_range: a.param_range.clone(),
            nx,
            ny,
            nx_list: a.nx_list.clone(),
            ny_list: a.ny_list.clone(),
            strategy: a.strategy,
            assisted: a.assisted,
            asymptotic: a.asymptotic,
            joint_input: a.joint_input,
            exponent_mode: a.exponent_mode.to_string(),
            bracket: a.bracket.clone(),
            tol: a.tol,
            trials: a.trials,
            seed: a.seed,
            format: a.format.unwrap_or(default_format),
        })
    }

    /// Command line that reproduces this run.
    pub fn command_line(&self) -> String {
        let mut s = format!("butterfly {} --channel {}", self.subcommand, self.channel);
        if let Some(p) = self.param {
            write!(s, " --param {p}").unwrap();
        }
        if let Some(r) = &self.param_range {
            write!(s, " --param-range {r}").unwrap();
        }
        write!(s, " --nx {} --ny {}", self.nx, self.ny).unwrap();
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        if !self.nx_list.is_empty() {
            write!(s, " --nx-list {}", join(&self.nx_list)).unwrap();
        }
        if !self.ny_list.is_empty() {
            write!(s, " --ny-list {}", join(&self.ny_list)).unwrap();
        }
        let strategy = match self.strategy {
            StrategyArg::Flood => "flood",
            StrategyArg::Backup => "backup",
            StrategyArg::Cc => "cc",
        };
        write!(s, " --strategy {strategy}").unwrap();
        for (flag, on) in
            [("--assisted", self.assisted), ("--asymptotic", self.asymptotic), ("--joint-input", self.joint_input)]
        {
            if on {
                write!(s, " {flag}").unwrap();
            }
        }
        write!(
            s,
            " --exponent-mode {} --bracket {} --tol {} --trials {} --seed {}",
            self.exponent_mode, self.bracket, self.tol, self.trials, self.seed
        )
        .unwrap();
        s
    }

    fn comments(&self) -> Vec<String> {
        vec![format!("command: {}", self.command_line())]
    }

    fn model(&self) -> Result<ChannelModel, CliError> {
        match (self.channel, self.param) {
            (ChannelKind::Identity, _) => Ok(ChannelModel::Identity),
            (kind, Some(p)) => Ok(kind.with_param(p)?),
            (kind, None) => Err(CliError::Usage(format!("--param is required for the {kind} channel"))),
        }
    }

    fn budget(&self) -> Result<McBudget, CliError> {
        let b = parse_floats(&self.bracket, 2).map_err(CliError::Usage)?;
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(CliError::Usage("--tol must be positive".into()));
        }
        Ok(McBudget { trials: self.trials, seed: self.seed, tol: self.tol, bracket: (b[0], b[1]) })
    }

    fn json<T: Serialize>(&self, results: T) -> String {
        let v = json!({ "config": self, "results": results });
        serde_json::to_string_pretty(&v).expect("serializable") + "\n"
    }
}

fn reject(cond: bool, msg: &str) -> Result<(), CliError> {
    if cond {
        Err(CliError::Usage(msg.into()))
    } else {
        Ok(())
    }
}

pub fn rate(a: &RunArgs) -> Result<Rendered, CliError> {
    let cfg = RunConfig::from_args("rate", a, Format::Csv)?;
    reject(a.param_range.is_some(), "rate takes --param, not --param-range")?;
    let mut q = RateQuery::new(cfg.model()?, cfg.nx, cfg.ny);
    q.asymptotic = cfg.asymptotic;
    q.joint_input = cfg.joint_input;
    q.exponent_mode = a.exponent_mode;
    q.trials = cfg.trials;
    q.seed = cfg.seed;
    let rep = rate_report(&q)?;
    let text = match cfg.format {
        Format::Json => cfg.json(&rep),
        Format::Csv => {
            let mut out = String::new();
            for c in cfg.comments().iter().chain(rep.notes.iter().map(|n| n as &String)) {
                writeln!(out, "# {c}").unwrap();
            }
            out.push_str("quantity,value,method,stderr\n");
            let mut line = |name: &str, v: Option<Valued>| {
                if let Some(v) = v {
                    let se = v.stderr.map(sig12).unwrap_or_default();
                    writeln!(out, "{name},{},{},{se}", sig12(v.value), v.method).unwrap();
                }
            };
            line("R_Q", Some(rep.r_q));
            line("R_Q_max_flow", rep.r_q_max_flow);
            line("R_C", rep.r_c);
            line("R_C_assisted", rep.r_c_assisted);
            if let Some(g) = rep.gap() {
                writeln!(out, "gap,{},,", sig12(g)).unwrap();
            }
            if let Some(g) = rep.gap_assisted() {
                writeln!(out, "gap_assisted,{},,", sig12(g)).unwrap();
            }
            out
        }
    };
    Ok(Rendered::new(text))
}

pub fn sweep(a: &RunArgs) -> Result<Rendered, CliError> {
    let cfg = RunConfig::from_args("sweep", a, Format::Csv)?;
    reject(a.param.is_some(), "sweep takes --param-range, not --param")?;
    let range =
        a.param_range.as_deref().ok_or_else(|| CliError::Usage("sweep needs --param-range LO:HI:STEP".into()))?;
    let r = parse_floats(range, 3).map_err(CliError::Usage)?;
    let grid = param_grid(r[0], r[1], r[2])?;
    if a.emit_plotscript.is_some() {
        reject(cfg.format != Format::Csv || a.out.is_none(), "--emit-plotscript needs --out and CSV output")?;
    }

    if !cfg.nx_list.is_empty() {
        let rows = min_gap_vs_nx(&grid, &cfg.nx_list)?;
        let text = match cfg.format {
            Format::Json => cfg.json(&rows),
            Format::Csv => {
                let mut out = String::new();
                for c in cfg.comments() {
                    writeln!(out, "# {c}").unwrap();
                }
                out.push_str("nx,depol_min_gap,depol_argmin,erasure_assisted_gap_at_zero,erasure_assisted_gap_at_half_eta_prime,erasure_gap_at_half_eta\n");
                for r in &rows {
                    writeln!(
                        out,
                        "{},{},{},{},{},{}",
                        r.nx,
                        sig12(r.depol_min_gap),
                        sig12(r.depol_argmin),
                        sig12(r.erasure_assisted_gap_at_zero),
                        sig12(r.erasure_assisted_gap_at_half_eta_prime),
                        sig12(r.erasure_gap_at_half_eta)
                    )
                    .unwrap();
                }
                out
            }
        };
        return Ok(Rendered::new(text));
    }

    let sc = SweepConfig {
        channel: cfg.channel,
        nx: cfg.nx,
        ny: cfg.ny,
        asymptotic: cfg.asymptotic,
        joint_input: cfg.joint_input,
        exponent_mode: a.exponent_mode,
        trials: cfg.trials,
        seed: cfg.seed,
    };
    let table = gap_sweep(&sc, &grid)?;
    let mut rendered = Rendered::new(match cfg.format {
        Format::Json => cfg.json(&table),
        Format::Csv => table.to_csv(&cfg.comments()),
    });
    if let (Some(script), Some(data)) = (&a.emit_plotscript, &a.out) {
        rendered.extra.push((script.clone(), plot_script(data, cfg.channel)));
    }
    Ok(rendered)
}

#[derive(Serialize)]
struct CrossingOut {
    nx: usize,
    ny: usize,
    crossing: CrossingPoint,
    method: Provenance,
}

pub fn crossing(a: &RunArgs) -> Result<Rendered, CliError> {
    let cfg = RunConfig::from_args("crossing", a, Format::Csv)?;
    reject(a.param.is_some() || a.param_range.is_some(), "crossing searches the parameter; drop --param")?;
    let budget = cfg.budget()?;

    if !cfg.nx_list.is_empty() || !cfg.ny_list.is_empty() {
        reject(cfg.channel != ChannelKind::Erasure, "crossing grids are defined for erasure edges only")?;
        let nx_list = if cfg.nx_list.is_empty() { vec![cfg.nx] } else { cfg.nx_list.clone() };
        let ny_list = if cfg.ny_list.is_empty() { vec![cfg.ny] } else { cfg.ny_list.clone() };
        let g = eta_prime_grid(&nx_list, &ny_list, budget)?;
        return Ok(Rendered::new(match cfg.format {
            Format::Json => cfg.json(&g),
            Format::Csv => g.to_csv(&cfg.comments()),
        }));
    }

    let (nx, ny) = (cfg.nx, cfg.ny);
    let (lo, hi) = budget.bracket;
    let out = match cfg.channel {
        ChannelKind::Identity => return Err(CliError::Usage("the identity channel has no noise parameter".into())),
        ChannelKind::Erasure if cfg.assisted && !cfg.asymptotic && ny > 1 => {
            let cell = eta_prime_cell(nx, ny, budget)?;
            CrossingOut { nx, ny, crossing: cell.crossing, method: cell.method }
        }
        ChannelKind::Erasure => {
            let bound = |e: f64| -> butterfly_core::Result<f64> {
                let ch = ChannelModel::erasure(e)?;
                if cfg.asymptotic {
                    Ok(asymptotic_bound(ch))
                } else {
                    closed_form_bound(nx, ny, ch)
                }
            };
            let rate = |e: f64| match (cfg.asymptotic, cfg.assisted) {
                (true, true) => Ok(asymptotic_rates(e)?.classical_assisted),
                (true, false) => Ok(asymptotic_rates(e)?.classical),
                (false, true) => rate_parallel_assisted(nx, e),
                (false, false) => rate_grid(nx, ny, e, a.exponent_mode),
            };
            let crossing = find_crossing(rate, bound, lo, hi, cfg.tol)?;
            CrossingOut { nx, ny, crossing, method: Provenance::ClosedForm }
        }
        ChannelKind::Depolarizing => {
            reject(cfg.assisted, "no assisted strategy is defined for depolarizing edges")?;
            reject(ny > 1 && !cfg.asymptotic, "depolarizing classical rates are defined for single rows only")?;
            let bound = |p: f64| -> butterfly_core::Result<f64> {
                let ch = ChannelModel::depolarizing(p)?;
                if cfg.asymptotic {
                    Ok(asymptotic_bound(ch))
                } else {
                    closed_form_bound(nx, 1, ch)
                }
            };
            let rate = |p: f64| {
                if cfg.asymptotic {
                    rate_parallel_depol_limit(p)
                } else {
                    rate_parallel_depol(nx, p, cfg.joint_input)
                }
            };
            let crossing = find_crossing(rate, bound, lo, hi, cfg.tol)?;
            CrossingOut { nx, ny, crossing, method: Provenance::BlahutArimoto }
        }
    };
    Ok(Rendered::new(match cfg.format {
        Format::Json => cfg.json(&out),
        Format::Csv => {
            let c = &out.crossing;
            let mut s = String::new();
            for line in cfg.comments() {
                writeln!(s, "# {line}").unwrap();
            }
            s.push_str("value,lo,hi,error_bar,evaluations,method\n");
            writeln!(
                s,
                "{},{},{},{},{},{}",
                sig12(c.value),
                sig12(c.bracket.0),
                sig12(c.bracket.1),
                sig12(c.error_bar),
                c.evaluations,
                out.method
            )
            .unwrap();
            s
        }
    }))
}

pub fn simulate_cmd(a: &RunArgs) -> Result<Rendered, CliError> {
    let cfg = RunConfig::from_args("simulate", a, Format::Json)?;
    reject(cfg.channel == ChannelKind::Depolarizing, "simulation covers erasure edges only")?;
    reject(a.param_range.is_some(), "simulate takes --param, not --param-range")?;
    let strategy = Strategy::from(cfg.strategy);
    reject(strategy == Strategy::BackupNoCC && cfg.ny < 2, "the backup strategy needs a grid with ny >= 2")?;
    let model = cfg.model()?;
    let net = build_grid(cfg.nx, cfg.ny, model)?;
    let est = simulate(&net, strategy, model.param(), cfg.trials, cfg.seed)?;
    Ok(Rendered::new(match cfg.format {
        Format::Json => cfg.json(est),
        Format::Csv => {
            let mut s = String::new();
            for line in cfg.comments() {
                writeln!(s, "# {line}").unwrap();
            }
            s.push_str("mean,stderr,trials,seed\n");
            writeln!(s, "{},{},{},{}", sig12(est.mean), sig12(est.stderr), est.trials, est.seed).unwrap();
            s
        }
    }))
}

pub fn verify(a: &VerifyArgs) -> Result<(Rendered, bool), CliError> {
    let opts = VerifyOptions { quick: a.quick, seed: a.seed, perturb_single_rate: a.inject_fault };
    let rep = run_verify(&opts);
    let text = match a.format {
        None => rep.to_table(),
        Some(Format::Json) => {
            serde_json::to_string_pretty(&json!({ "config": opts, "results": rep })).expect("serializable") + "\n"
        }
        Some(Format::Csv) => {
            let mut s = String::from("check,passed,detail\n");
            for c in &rep.checks {
                writeln!(s, "{},{},\"{}\"", c.name, c.passed, c.detail.replace('"', "'")).unwrap();
            }
            s
        }
    };
    Ok((Rendered::new(text), rep.all_passed()))
}
