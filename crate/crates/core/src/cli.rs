//! Subcommands of the `aoi-game` tool: `analyze`, `table1`, `sweep` and `simulate`.
//!
//! Each command writes a human-readable report and, where relevant, CSV to
//! caller-supplied writers. Tables round to 4 decimals; CSV carries 17
//! significant digits.

use std::io::{self, Write};

use thiserror::Error;

use crate::equilibrium::{
    check_weak_dominance, enumerate_pure_nash, msne_closed_form, MsneResult, PureNashSet,
    INDIFFERENCE_TOLERANCE,
};
use crate::error::GameError;
use crate::game::{
    collision_probability, expected_age_after, idle_probability, success_probability_of, Action,
    ActionProfile, GameInstance, SlotLengths, StrategyProfile,
};
use crate::scenario::{ScenarioError, ScenarioFile};
use crate::simulator::{
    binomial_standard_error, run_monte_carlo, simulate_age_trajectory, SimStats, TrajectoryRun,
};

/// Acceptance band for Monte Carlo checks, in standard errors.
pub const STANDARD_ERROR_BAND: f64 = 3.0;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("{0}")]
    Game(#[from] GameError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("closed-form equilibrium is infeasible for this scenario; give an explicit `taus` list to simulate it")]
    InfeasibleProfile,
    #[error("golden check failed: {0}")]
    GoldenMismatch(String),
}

impl CliError {
    /// 0 success, 1 validation failure, 2 golden mismatch.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::GoldenMismatch(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn fmt4(x: f64) -> String {
    format!("{x:.4}")
}

fn fmt_full(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|&x| fmt4(x)).collect();
    format!("({})", items.join(", "))
}

/// Everything `analyze` reports about one game.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub game: GameInstance<f64>,
    pub msne: MsneResult<f64>,
    pub pure_nash: PureNashSet,
}

pub fn analyze(game: &GameInstance<f64>) -> CliResult<Analysis> {
    Ok(Analysis {
        game: game.clone(),
        msne: msne_closed_form(game)?,
        pure_nash: enumerate_pure_nash(game)?,
    })
}

/// Prints regime, dominance, closed-form equilibrium diagnostics and pure equilibria.
pub fn cmd_analyze(scenario: &ScenarioFile, out: &mut dyn Write) -> CliResult<Analysis> {
    let game = scenario.to_game()?;
    let analysis = analyze(&game)?;
    let s = game.slot_lengths();
    writeln!(
        out,
        "nodes {}  sigma_idle {}  sigma_success {}  sigma_collision {}",
        game.n(),
        s.idle(),
        s.success(),
        s.collision()
    )?;
    writeln!(out, "ages {}", fmt_list(game.ages().as_slice()))?;
    writeln!(out, "regime {}", game.regime())?;
    writeln!(out)?;
    writeln!(out, "dominance (weak >= everywhere / also > somewhere)")?;
    for i in 0..game.n() {
        let t = check_weak_dominance(&game, i, Action::Transmit)?;
        let d = check_weak_dominance(&game, i, Action::Idle)?;
        writeln!(
            out,
            "  node {}: transmit {}/{}  idle {}/{}",
            i + 1,
            t.weakly_dominant_per_paper,
            t.strictly_better_somewhere,
            d.weakly_dominant_per_paper,
            d.strictly_better_somewhere
        )?;
    }
    writeln!(out)?;
    write_msne(out, &analysis.msne)?;
    writeln!(out, "pure nash {}", analysis.pure_nash)?;
    Ok(analysis)
}

fn write_msne(out: &mut dyn Write, msne: &MsneResult<f64>) -> io::Result<()> {
    writeln!(out, "msne raw tau {}", fmt_list(&msne.raw_taus))?;
    let flags: Vec<String> = msne
        .feasible_per_node
        .iter()
        .map(|f| f.to_string())
        .collect();
    writeln!(out, "msne feasible {}  per node ({})", msne.feasible, flags.join(", "))?;
    match &msne.indifference_residuals {
        Some(r) => {
            let items: Vec<String> = r.iter().map(|x| format!("{x:.3e}")).collect();
            let ok = r.iter().all(|x| x.abs() < INDIFFERENCE_TOLERANCE);
            writeln!(
                out,
                "msne indifference residuals ({})  within {:e}: {ok}",
                items.join(", "),
                INDIFFERENCE_TOLERANCE
            )
        }
        None => writeln!(out, "msne indifference residuals n/a (infeasible)"),
    }
}

/// One built-in three-node scenario with its reference values.
#[derive(Debug, Clone, Copy)]
pub struct TableRow {
    pub label: &'static str,
    /// Collision slot length in multiples of the successful slot length.
    pub collision_multiple: f64,
    /// Starting ages in multiples of the successful slot length.
    pub age_multiples: [f64; 3],
    pub golden_taus: [f64; 3],
    pub golden_nash: [&'static str; 4],
}

pub const TABLE_SIGMA_SUCCESS: f64 = 1.01;
pub const TABLE_SIGMA_IDLE: f64 = 0.01;
/// Reference values are printed to 4 decimals.
pub const GOLDEN_TOLERANCE: f64 = 5e-5;

pub const TABLE1: [TableRow; 5] = [
    TableRow {
        label: "I",
        collision_multiple: 0.1,
        age_multiples: [1.0, 2.0, 3.0],
        golden_taus: [2.4877, -1.2782, 0.3549],
        golden_nash: ["TTT", "TIT", "ITT", "TTI"],
    },
    TableRow {
        label: "II",
        collision_multiple: 0.1,
        age_multiples: [1.0, 1.0, 1.0],
        golden_taus: [-0.0055, -0.0055, -0.0055],
        golden_nash: ["TTT", "TIT", "ITT", "TTI"],
    },
    TableRow {
        label: "III",
        collision_multiple: 2.0,
        age_multiples: [1.0, 2.0, 3.0],
        golden_taus: [0.6008, 0.3355, -0.9804],
        golden_nash: ["TTT", "IIT", "TII", "ITI"],
    },
    TableRow {
        label: "IV",
        collision_multiple: 2.0,
        age_multiples: [2.0, 3.0, 3.0],
        golden_taus: [0.6008, 0.3355, 0.3355],
        golden_nash: ["TTT", "IIT", "TII", "ITI"],
    },
    TableRow {
        label: "V",
        collision_multiple: 2.0,
        age_multiples: [2.0, 3.0, 4.0],
        golden_taus: [0.6672, 0.5012, 0.0049],
        golden_nash: ["TTT", "IIT", "TII", "ITI"],
    },
];

impl TableRow {
    pub fn game(&self) -> GameInstance<f64> {
        let s = SlotLengths::new(
            TABLE_SIGMA_IDLE,
            TABLE_SIGMA_SUCCESS,
            self.collision_multiple * TABLE_SIGMA_SUCCESS,
        )
        .expect("built-in slot lengths are valid");
        let ages = self
            .age_multiples
            .iter()
            .map(|m| m * TABLE_SIGMA_SUCCESS)
            .collect();
        GameInstance::new(s, ages).expect("built-in ages are valid")
    }

    pub fn golden_nash_set(&self) -> PureNashSet {
        self.golden_nash
            .iter()
            .map(|p| p.parse::<ActionProfile>().expect("built-in profile"))
            .collect()
    }
}

/// Computed values of one built-in row next to its reference values.
#[derive(Debug, Clone)]
pub struct TableRowResult {
    pub row: TableRow,
    pub analysis: Analysis,
    pub taus_match: bool,
    pub nash_match: bool,
}

impl TableRowResult {
    pub fn matches(&self) -> bool {
        self.taus_match && self.nash_match
    }
}

pub fn table1_results() -> CliResult<Vec<TableRowResult>> {
    TABLE1
        .iter()
        .map(|row| {
            let analysis = analyze(&row.game())?;
            let taus_match = analysis
                .msne
                .raw_taus
                .iter()
                .zip(row.golden_taus)
                .all(|(got, want)| (got - want).abs() <= GOLDEN_TOLERANCE);
            let nash_match = analysis.pure_nash == row.golden_nash_set();
            Ok(TableRowResult {
                row: *row,
                analysis,
                taus_match,
                nash_match,
            })
        })
        .collect()
}

/// Prints the five built-in scenarios. With `check`, any disagreement with
/// the reference values is an error.
pub fn cmd_table1(check: bool, out: &mut dyn Write) -> CliResult<Vec<TableRowResult>> {
    let results = table1_results()?;
    writeln!(
        out,
        "sigma_success = {TABLE_SIGMA_SUCCESS}, sigma_idle = {TABLE_SIGMA_IDLE}, N = 3"
    )?;
    writeln!(
        out,
        "{:<4} {:>8} {:<16} {:<28} {:<9} pure nash",
        "row", "sigma_c", "ages (sigma_s)", "msne tau*", "feasible"
    )?;
    for r in &results {
        let ages: Vec<String> = r.row.age_multiples.iter().map(|m| format!("{m}")).collect();
        write!(
            out,
            "{:<4} {:>6}σS {:<16} {:<28} {:<9} {}",
            r.row.label,
            r.row.collision_multiple,
            format!("({})", ages.join(", ")),
            fmt_list(&r.analysis.msne.raw_taus),
            r.analysis.msne.feasible,
            r.analysis.pure_nash
        )?;
        if check {
            write!(out, "  {}", if r.matches() { "ok" } else { "MISMATCH" })?;
        }
        writeln!(out)?;
    }
    if check {
        let bad: Vec<&str> = results
            .iter()
            .filter(|r| !r.matches())
            .map(|r| r.row.label)
            .collect();
        if !bad.is_empty() {
            return Err(CliError::GoldenMismatch(format!("rows {}", bad.join(", "))));
        }
        writeln!(out, "golden check passed")?;
    }
    Ok(results)
}

/// One point of an age sweep.
#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub swept_age: f64,
    pub msne: MsneResult<f64>,
    /// Success probability of every node under the closed-form profile;
    /// `None` when some closed-form value lies outside `[0, 1]`.
    pub success_probabilities: Option<Vec<f64>>,
}

pub fn sweep_points(scenario: &ScenarioFile) -> CliResult<Vec<SweepPoint>> {
    let base = scenario.to_game()?;
    let (node, ages) = scenario.sweep_ages()?;
    ages.into_iter()
        .map(|age| {
            let game = base.with_age(node, age)?;
            let msne = msne_closed_form(&game)?;
            let success_probabilities = match StrategyProfile::new(msne.raw_taus.clone()) {
                Ok(p) => Some(
                    (0..game.n())
                        .map(|i| success_probability_of(i, &p))
                        .collect::<Result<Vec<_>, _>>()?,
                ),
                Err(_) => None,
            };
            Ok(SweepPoint {
                swept_age: age,
                msne,
                success_probabilities,
            })
        })
        .collect()
}

pub fn sweep_header(n: usize) -> Vec<String> {
    let mut header = vec!["swept_age".to_string()];
    header.extend((1..=n).map(|i| format!("tau_{i}")));
    header.push("feasible".into());
    header.extend((1..=n).map(|i| format!("psucc_{i}")));
    header
}

/// Writes the sweep as CSV: `swept_age, tau_1..tau_n, feasible, psucc_1..psucc_n`.
pub fn cmd_sweep(scenario: &ScenarioFile, csv_out: &mut dyn Write) -> CliResult<Vec<SweepPoint>> {
    let points = sweep_points(scenario)?;
    let mut w = csv::Writer::from_writer(csv_out);
    w.write_record(sweep_header(scenario.n))?;
    for p in &points {
        let mut record = vec![fmt_full(p.swept_age)];
        record.extend(p.msne.raw_taus.iter().map(|&t| fmt_full(t)));
        record.push(p.msne.feasible.to_string());
        match &p.success_probabilities {
            Some(ps) => record.extend(ps.iter().map(|&x| fmt_full(x))),
            None => record.extend(std::iter::repeat_n(String::new(), scenario.n)),
        }
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(points)
}

/// One analytic-versus-empirical comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub quantity: String,
    pub analytic: f64,
    pub empirical: f64,
    pub standard_error: f64,
}

impl Comparison {
    pub fn z_score(&self) -> f64 {
        if self.standard_error == 0.0 {
            if self.analytic == self.empirical {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.empirical - self.analytic) / self.standard_error
        }
    }

    pub fn within_band(&self) -> bool {
        self.z_score().abs() <= STANDARD_ERROR_BAND
    }
}

/// Compares Monte Carlo frequencies and mean one-slot ages against the analytic model.
pub fn compare_with_model(
    game: &GameInstance<f64>,
    profile: &StrategyProfile<f64>,
    stats: &SimStats<f64>,
) -> CliResult<Vec<Comparison>> {
    let trials = stats.slots;
    let freq = |quantity: String, analytic: f64, empirical: f64| Comparison {
        quantity,
        analytic,
        empirical,
        standard_error: binomial_standard_error(analytic, trials),
    };
    let mut rows = vec![
        freq(
            "p_idle".into(),
            idle_probability(profile),
            stats.idle_frequency(),
        ),
        freq(
            "p_collision".into(),
            collision_probability(profile),
            stats.collision_frequency(),
        ),
    ];
    for i in 0..game.n() {
        rows.push(freq(
            format!("p_success_{}", i + 1),
            success_probability_of(i, profile)?,
            stats.success_frequency(i),
        ));
    }
    for i in 0..game.n() {
        rows.push(Comparison {
            quantity: format!("mean_age_{}", i + 1),
            analytic: expected_age_after(i, game.age(i), profile, game.slot_lengths())?,
            empirical: stats.mean_age_after_per_node[i],
            standard_error: stats.mean_age_standard_error(i),
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub profile: StrategyProfile<f64>,
    pub stats: SimStats<f64>,
    pub comparisons: Vec<Comparison>,
    pub trajectory: Option<TrajectoryRun<f64>>,
}

/// Header of the trajectory CSV: `time, age_1..age_n`.
pub fn trajectory_header(n: usize) -> Vec<String> {
    let mut header = vec!["time".to_string()];
    header.extend((1..=n).map(|i| format!("age_{i}")));
    header
}

/// Runs the restart experiment and prints it next to the analytic values.
/// With `csv_out`, also runs a sequential trajectory and writes the age of
/// every node at each slot boundary.
pub fn cmd_simulate(
    scenario: &ScenarioFile,
    out: &mut dyn Write,
    csv_out: Option<&mut dyn Write>,
) -> CliResult<SimulationReport> {
    let game = scenario.to_game()?;
    let profile = match scenario.explicit_profile()? {
        Some(p) => p,
        None => msne_closed_form(&game)?
            .profile()
            .ok_or(CliError::InfeasibleProfile)?,
    };
    let stats = run_monte_carlo(&game, &profile, scenario.num_slots, scenario.seed)?;
    let comparisons = compare_with_model(&game, &profile, &stats)?;

    writeln!(out, "profile {}", fmt_list(profile.taus()))?;
    writeln!(out, "slots {}  seed {}", stats.slots, scenario.seed)?;
    let successes: Vec<String> = stats
        .success_count_per_node
        .iter()
        .map(|c| c.to_string())
        .collect();
    writeln!(
        out,
        "idle {}  collision {}  success per node ({})",
        stats.idle_count,
        stats.collision_count,
        successes.join(", ")
    )?;
    writeln!(
        out,
        "{:<14} {:>12} {:>12} {:>12} {:>8}  within {STANDARD_ERROR_BAND} SE",
        "quantity", "analytic", "empirical", "std err", "z"
    )?;
    for c in &comparisons {
        writeln!(
            out,
            "{:<14} {:>12.6} {:>12.6} {:>12.3e} {:>8.3}  {}",
            c.quantity,
            c.analytic,
            c.empirical,
            c.standard_error,
            c.z_score(),
            c.within_band()
        )?;
    }

    let trajectory = match csv_out {
        Some(csv_out) => {
            let run =
                simulate_age_trajectory(&game, &profile, scenario.trajectory_slots(), scenario.seed)?;
            let mut w = csv::Writer::from_writer(csv_out);
            w.write_record(trajectory_header(game.n()))?;
            for (t, ages) in run.boundaries.iter().zip(&run.boundary_ages) {
                let mut record = vec![fmt_full(*t)];
                record.extend(ages.iter().map(|&a| fmt_full(a)));
                w.write_record(&record)?;
            }
            w.flush()?;
            Some(run)
        }
        None => None,
    };
    Ok(SimulationReport {
        profile,
        stats,
        comparisons,
        trajectory,
    })
}
