//! One function per subcommand, each returning the text to emit.

use std::fmt::Write as _;

use ehcap::acceptance::{self, AcceptanceOptions, Report};
use ehcap::aloha::{unit_battery_optimum, AlohaNetwork};
use ehcap::csma::{evaluate_csma, CsmaParams};
use ehcap::game::{price_of_anarchy, sne};
use ehcap::montecarlo::{
    estimate_aloha_psuc, estimate_csma, min_window_radius, simulate_energy_queue, SimConfig, SimEstimate,
};
use ehcap::{Battery, QuadratureSpec};

use crate::settings::{CliError, Result, Settings};

/// CSV with `#` comment lines carrying the version, command and every resolved parameter.
pub struct Table {
    comments: Vec<String>,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(command: &str, settings: &Settings, columns: Vec<&'static str>) -> Self {
        let mut comments = vec![format!("ehcap {} {command}", env!("CARGO_PKG_VERSION"))];
        comments.extend(settings.resolved().into_iter().map(|(k, v)| format!("{k}={v}")));
        if let Ok(ch) = settings.channel() {
            let derived = ch.derive();
            comments.push(format!("lambda_max={}", derived.lambda_max));
            comments.push(format!("rate={}", derived.rate));
        }
        Self {
            comments,
            columns,
            rows: Vec::new(),
        }
    }

    fn comment(&mut self, line: String) {
        self.comments.push(line);
    }

    fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }
}

fn cells<const N: usize>(values: [f64; N]) -> Vec<String> {
    values.iter().map(f64::to_string).collect()
}

pub fn aloha(settings: &Settings) -> Result<String> {
    let params = settings.network(settings.real("lambda")?)?;
    let net = AlohaNetwork::new(&params);
    let mut table = Table::new("aloha", settings, vec!["q", "r", "f", "lambda_a", "p_suc", "capacity"]);
    let opt = net.optimal_access();
    table.comment(format!("optimum={} capacity={}", opt.kind, opt.capacity));
    if params.energy().battery() == Battery::Finite(1) {
        let unit = unit_battery_optimum(net.p(), net.lambda(), net.lambda_max());
        table.comment(format!("unit_battery_closed_form={}", unit.q_star));
    }
    let qs: Vec<f64> = if settings.is_set("q") {
        vec![settings.probability("q")?]
    } else {
        let n = settings.count("points")?;
        if n < 2 {
            return Err(CliError::Usage("--points must be at least 2".into()));
        }
        (0..n).map(|k| k as f64 / (n - 1) as f64).collect()
    };
    for q in qs {
        let e = net.evaluate(q);
        let f = params.energy().effective_access(q);
        table.row(cells([q, e.r, f, e.active_density, e.p_suc, e.capacity]));
    }
    Ok(table.render())
}

pub fn csma(settings: &Settings) -> Result<String> {
    let lambdas = settings.list("lambda")?;
    let len = settings.packet_len()?;
    let spec = QuadratureSpec::default();
    let mut table = Table::new(
        "csma",
        settings,
        vec!["lambda", "branch", "p_b", "r", "p_fail", "p_out", "fkg_bound", "capacity"],
    );
    for lambda in lambdas {
        let params = CsmaParams::new(settings.network(lambda)?, len)?;
        let res = evaluate_csma(&params, &spec)?;
        let mut row = vec![lambda.to_string(), res.branch.to_string()];
        row.extend(cells([res.p_b, res.r, res.p_fail_given_no_backoff, res.p_out, res.fkg_bound, res.capacity]));
        table.row(row);
    }
    Ok(table.render())
}

pub fn game(settings: &Settings) -> Result<String> {
    let lambdas = settings.list("lambda")?;
    let ps = settings.list("p")?;
    let battery = settings.battery()?;
    let mut table = Table::new(
        "game",
        settings,
        vec![
            "lambda",
            "p",
            "B",
            "equilibrium",
            "per_node_throughput",
            "sne_capacity",
            "optimum",
            "optimal_capacity",
            "poa",
        ],
    );
    for &lambda in &lambdas {
        for &p in &ps {
            let energy = ehcap::EnergyModel::new(p, battery)?;
            let params = ehcap::NetworkParams::new(lambda, settings.channel()?, energy)?;
            let net = AlohaNetwork::new(&params);
            let eq = sne(&net);
            let opt = net.optimal_access();
            table.row(vec![
                lambda.to_string(),
                p.to_string(),
                battery.to_string(),
                eq.equilibrium.to_string(),
                eq.per_node_throughput.to_string(),
                eq.capacity_at_sne.to_string(),
                opt.kind.to_string(),
                opt.capacity.to_string(),
                price_of_anarchy(&net).to_string(),
            ]);
        }
    }
    Ok(table.render())
}

pub fn optimal_q(settings: &Settings) -> Result<String> {
    let lambdas = settings.list("lambda")?;
    let mut table = Table::new(
        "optimal-q",
        settings,
        vec!["lambda", "kind", "q_lo", "q_hi", "capacity", "critical_ratio"],
    );
    for lambda in lambdas {
        let net = AlohaNetwork::new(&settings.network(lambda)?);
        let opt = net.optimal_access();
        let (kind, lo, hi) = match opt.kind {
            ehcap::AccessSet::Point(q) => ("point", q, q),
            ehcap::AccessSet::Interval(lo, hi) => ("interval", lo, hi),
        };
        let mut row = vec![lambda.to_string(), kind.to_string()];
        row.extend(cells([lo, hi, opt.capacity, net.critical_ratio()]));
        table.row(row);
    }
    Ok(table.render())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SimKind {
    Aloha,
    Queue,
    Csma,
}

fn sim_config(settings: &Settings) -> Result<SimConfig> {
    let channel = settings.channel()?;
    let radius = settings.real_or("window-radius", min_window_radius(&channel))?;
    Ok(SimConfig::new(
        &channel,
        radius,
        settings.count("trials")?,
        settings.count("slots")?,
        settings.count("seed")?,
    )?)
}

fn estimate_row(quantity: &str, analytic: f64, est: &SimEstimate) -> Vec<String> {
    vec![
        quantity.to_string(),
        analytic.to_string(),
        est.mean.to_string(),
        est.std_error.to_string(),
        est.z_score(analytic).to_string(),
        est.trials.to_string(),
    ]
}

pub fn simulate(kind: SimKind, settings: &Settings) -> Result<String> {
    let columns = vec!["quantity", "analytic", "simulated", "std_error", "z", "trials"];
    let mut table = Table::new(&format!("simulate {}", sim_name(kind)), settings, columns);
    let q = if settings.is_set("q") { settings.probability("q")? } else { 1.0 };
    match kind {
        SimKind::Aloha => {
            let params = settings.network(settings.real("lambda")?)?;
            let config = sim_config(settings)?;
            table.comment(format!("window_radius={}", config.window_radius()));
            let exact = AlohaNetwork::new(&params).evaluate(q).p_suc;
            let est = estimate_aloha_psuc(&params, q, &config);
            table.row(estimate_row("p_suc", exact, &est));
        }
        SimKind::Queue => {
            let energy = settings.energy()?;
            let slots = settings.count("slots")?;
            if slots < 100 {
                return Err(CliError::Usage("--slots must be at least 100".into()));
            }
            let est = simulate_energy_queue(energy.p(), q, energy.battery(), slots, settings.count("seed")?);
            table.row(estimate_row("r", energy.occupancy(q).r, &est));
        }
        SimKind::Csma => {
            let params = CsmaParams::new(settings.network(settings.real("lambda")?)?, settings.packet_len()?)?;
            let config = sim_config(settings)?;
            table.comment(format!("window_radius={}", config.window_radius()));
            let exact = evaluate_csma(&params, &QuadratureSpec::default())?;
            let est = estimate_csma(&params, &config);
            table.comment(format!("activity={}", est.activity));
            table.row(estimate_row("p_b", exact.p_b, &est.p_b));
            table.row(estimate_row("p_fail", exact.p_fail_given_no_backoff, &est.p_fail));
            table.row(estimate_row("p_out", exact.p_out, &est.p_out));
        }
    }
    Ok(table.render())
}

fn sim_name(kind: SimKind) -> &'static str {
    match kind {
        SimKind::Aloha => "aloha",
        SimKind::Queue => "queue",
        SimKind::Csma => "csma",
    }
}

pub fn verify(settings: &Settings, criterion: Option<&str>) -> Result<Report> {
    let opts = AcceptanceOptions {
        seed: settings.count("seed")?,
        trials: if settings.is_set("trials") { Some(settings.count("trials")?.max(1)) } else { None },
        slots: if settings.is_set("slots") { Some(settings.count("slots")?.max(100)) } else { None },
    };
    let selected: Vec<&acceptance::Criterion> = match criterion {
        Some(key) => {
            let mut picked = Vec::new();
            for k in key.split(',') {
                picked.push(
                    acceptance::find(k).ok_or_else(|| CliError::Usage(format!("unknown --criterion `{}`", k.trim())))?,
                );
            }
            picked
        }
        None => acceptance::CRITERIA.iter().collect(),
    };
    Ok(acceptance::run(&selected, &opts))
}
