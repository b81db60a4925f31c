//! Seeded Monte Carlo comparison of the selection strategies.
//!
//! For every `(K_T, trial)` one channel draw is generated from the master
//! seed and shared by every algorithm and every SNR point; SNR only rescales
//! the noise variance with the BS power held fixed. Results are emitted as
//! plain CSV whose bytes depend only on the experiment spec.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::align::RESIDUAL_GATE;
use crate::error::{Error, Result};
use crate::flops::{
    brute_force_combinations, flops_brute_force, flops_o_algorithm, flops_s_algorithm, FlopCount,
    FlopParams,
};
use crate::select::{
    brute_force_select, o_algorithm, s_algorithm, SearchResult, DEFAULT_BRUTE_CAP,
};
use crate::system::{generate_channels, trial_seed, ChannelSet, SystemConfig};

pub const TRIALS_HEADER: &str =
    "k_t,snr_db,algorithm,trial,seed,sum_rate_bits,residual,rate_evals,flagged";
pub const AGGREGATES_HEADER: &str = "k_t,snr_db,algorithm,mean_rate,stderr,n,flops_model";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Algorithm {
    Brute,
    S,
    O,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Brute, Algorithm::S, Algorithm::O];

    pub fn run(
        self,
        cfg: &SystemConfig,
        channels: &ChannelSet,
        brute_cap: u128,
    ) -> Result<SearchResult> {
        match self {
            Algorithm::Brute => brute_force_select(cfg, channels, brute_cap),
            Algorithm::S => s_algorithm(cfg, channels),
            Algorithm::O => o_algorithm(cfg, channels),
        }
    }

    pub fn flops(self, params: &FlopParams) -> FlopCount {
        match self {
            Algorithm::Brute => flops_brute_force(params),
            Algorithm::S => flops_s_algorithm(params),
            Algorithm::O => flops_o_algorithm(params),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Brute => "brute",
            Algorithm::S => "s",
            Algorithm::O => "o",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "brute" => Ok(Algorithm::Brute),
            "s" => Ok(Algorithm::S),
            "o" => Ok(Algorithm::O),
            other => Err(format!(
                "unknown algorithm `{other}` (expected brute, s or o)"
            )),
        }
    }
}

/// Parses a comma-separated algorithm list such as `brute,s,o`.
pub fn parse_algorithms(s: &str) -> std::result::Result<Vec<Algorithm>, String> {
    let mut out: Vec<Algorithm> = s
        .split(',')
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// What to simulate.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    /// Antenna, cell and power parameters; `users_per_cell` and `noise_var`
    /// are overridden per sweep point.
    pub base: SystemConfig,
    pub snr_db_list: Vec<f64>,
    pub users_sweep: Vec<usize>,
    pub num_trials: usize,
    pub master_seed: u64,
    pub algorithms: Vec<Algorithm>,
    pub brute_cap: u128,
}

impl ExperimentSpec {
    /// Desk-scale defaults around a base configuration.
    pub fn new(base: SystemConfig) -> Self {
        Self {
            users_sweep: vec![base.users_per_cell],
            base,
            snr_db_list: vec![10.0, 20.0],
            num_trials: 200,
            master_seed: 1,
            algorithms: Algorithm::ALL.to_vec(),
            brute_cap: DEFAULT_BRUTE_CAP,
        }
    }

    /// System configuration of one sweep point.
    pub fn point(&self, k_t: usize, snr_db: f64) -> SystemConfig {
        self.base.with_users(k_t).with_snr_db(snr_db)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_trials == 0 {
            return Err(Error::InvalidInput("num_trials must be at least 1".into()));
        }
        if self.snr_db_list.is_empty() || self.users_sweep.is_empty() || self.algorithms.is_empty()
        {
            return Err(Error::InvalidInput(
                "snr_db, users_sweep and algorithms must be non-empty".into(),
            ));
        }
        if self.snr_db_list.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidInput("snr_db values must be finite".into()));
        }
        for &k_t in &self.users_sweep {
            self.point(k_t, self.snr_db_list[0]).validate()?;
        }
        Ok(())
    }

    /// Whether exhaustive search fits under the cap at this population.
    pub fn brute_allowed(&self, k_t: usize) -> bool {
        let count = brute_force_combinations(
            k_t as u64,
            self.base.select_per_cell as u64,
            self.base.num_cells as u64,
        );
        count <= self.brute_cap.into()
    }

    /// Reads a `key = value` experiment file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|message| Error::Parse {
            path: path.to_path_buf(),
            message,
        })
    }

    /// Parses the `key = value` format: one pair per line, `#` comments,
    /// lists comma-separated.
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut spec = ExperimentSpec::new(SystemConfig::small());
        let mut seen_users = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let at = |e: String| format!("line {}: {key}: {e}", lineno + 1);
            match key {
                "num_cells" => spec.base.num_cells = scalar(value).map_err(at)?,
                "select_per_cell" => spec.base.select_per_cell = scalar(value).map_err(at)?,
                "tx_antennas" => spec.base.tx_antennas = scalar(value).map_err(at)?,
                "rx_antennas" => spec.base.rx_antennas = scalar(value).map_err(at)?,
                "streams_per_user" => spec.base.streams_per_user = scalar(value).map_err(at)?,
                "bs_power" => spec.base.bs_power = scalar(value).map_err(at)?,
                "users_sweep" | "users_per_cell" => {
                    spec.users_sweep = list(value).map_err(at)?;
                    seen_users = true;
                }
                "snr_db" => spec.snr_db_list = list(value).map_err(at)?,
                "num_trials" => spec.num_trials = scalar(value).map_err(at)?,
                "master_seed" => spec.master_seed = scalar(value).map_err(at)?,
                "algorithms" => spec.algorithms = parse_algorithms(value).map_err(at)?,
                "brute_cap" => spec.brute_cap = scalar(value).map_err(at)?,
                other => return Err(format!("line {}: unknown key `{other}`", lineno + 1)),
            }
        }
        if !seen_users {
            return Err("missing users_sweep".into());
        }
        spec.base.users_per_cell = spec.users_sweep[0];
        Ok(spec)
    }
}

fn scalar<T: FromStr>(value: &str) -> std::result::Result<T, String>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e: T::Err| format!("`{value}`: {e}"))
}

fn list<T: FromStr>(value: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    let items: Vec<T> = value
        .split(',')
        .map(|v| scalar(v.trim()))
        .collect::<std::result::Result<_, _>>()?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}

/// One algorithm run on one channel draw at one SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub k_t: usize,
    pub snr_db: f64,
    pub algorithm: Algorithm,
    pub trial: usize,
    pub seed: u64,
    pub sum_rate_bits: f64,
    pub residual: f64,
    pub rate_evals: usize,
    pub flagged: bool,
}

impl TrialRecord {
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.k_t,
            self.snr_db,
            self.algorithm,
            self.trial,
            self.seed,
            self.sum_rate_bits,
            self.residual,
            self.rate_evals,
            self.flagged
        )
    }
}

/// Mean and standard error of one `(K_T, SNR, algorithm)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub k_t: usize,
    pub snr_db: f64,
    pub algorithm: Algorithm,
    pub mean_rate: f64,
    pub stderr: f64,
    /// Unflagged trials averaged.
    pub n: usize,
    pub flops_model: FlopCount,
}

impl AggregateRow {
    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.k_t,
            self.snr_db,
            self.algorithm,
            self.mean_rate,
            self.stderr,
            self.n,
            self.flops_model
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<AggregateRow>,
    /// Populations at which exhaustive search was over the cap and skipped.
    pub brute_skipped: Vec<usize>,
}

impl ExperimentResult {
    pub fn aggregate(
        &self,
        k_t: usize,
        snr_db: f64,
        algorithm: Algorithm,
    ) -> Option<&AggregateRow> {
        self.aggregates
            .iter()
            .find(|r| r.k_t == k_t && r.snr_db == snr_db && r.algorithm == algorithm)
    }
}

/// Runs one algorithm on one draw and turns the outcome into a record.
pub fn run_trial(
    cfg: &SystemConfig,
    channels: &ChannelSet,
    algorithm: Algorithm,
    trial: usize,
    snr_db: f64,
    brute_cap: u128,
) -> TrialRecord {
    let (sum_rate_bits, residual, rate_evals) = match algorithm.run(cfg, channels, brute_cap) {
        Ok(out) => {
            let residual = out.system.residual(cfg, channels).unwrap_or(f64::INFINITY);
            (
                out.selection.achieved_rate,
                residual,
                out.trace.rate_evaluations,
            )
        }
        Err(_) => (0.0, f64::INFINITY, 0),
    };
    TrialRecord {
        k_t: cfg.users_per_cell,
        snr_db,
        algorithm,
        trial,
        seed: channels.seed(),
        sum_rate_bits,
        residual,
        rate_evals,
        flagged: !(residual <= RESIDUAL_GATE),
    }
}

/// Mean and standard error of the unflagged rates.
pub fn summarize(rates: &[f64]) -> (f64, f64, usize) {
    let n = rates.len();
    if n == 0 {
        return (f64::NAN, f64::NAN, 0);
    }
    let mean = rates.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0, n);
    }
    let var = rates.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt(), n)
}

/// Runs every `(K_T, SNR, algorithm, trial)` combination of the spec.
///
/// Exhaustive search is skipped at populations over `brute_cap`; if that
/// leaves it nowhere to run, the experiment is refused.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    let brute_skipped: Vec<usize> = if spec.algorithms.contains(&Algorithm::Brute) {
        spec.users_sweep
            .iter()
            .copied()
            .filter(|&k| !spec.brute_allowed(k))
            .collect()
    } else {
        Vec::new()
    };
    if !brute_skipped.is_empty() && brute_skipped.len() == spec.users_sweep.len() {
        let k_t = spec.users_sweep[0];
        let count = brute_force_combinations(
            k_t as u64,
            spec.base.select_per_cell as u64,
            spec.base.num_cells as u64,
        );
        return Err(Error::SearchSpaceTooLarge {
            count: count.to_string(),
            cap: spec.brute_cap,
        });
    }

    let mut jobs = Vec::new();
    for &k_t in &spec.users_sweep {
        for &snr_db in &spec.snr_db_list {
            for &alg in &spec.algorithms {
                if alg == Algorithm::Brute && brute_skipped.contains(&k_t) {
                    continue;
                }
                for trial in 0..spec.num_trials {
                    jobs.push((k_t, snr_db, alg, trial));
                }
            }
        }
    }
    let records: Vec<TrialRecord> = jobs
        .par_iter()
        .map(|&(k_t, snr_db, alg, trial)| {
            let cfg = spec.point(k_t, snr_db);
            let seed = trial_seed(spec.master_seed, k_t, trial);
            let channels = generate_channels(&cfg, seed).expect("validated configuration");
            run_trial(&cfg, &channels, alg, trial, snr_db, spec.brute_cap)
        })
        .collect();

    let mut aggregates = Vec::new();
    for &k_t in &spec.users_sweep {
        let params = FlopParams::from_config(&spec.base.with_users(k_t));
        for &snr_db in &spec.snr_db_list {
            for &alg in &spec.algorithms {
                let rates: Vec<f64> = records
                    .iter()
                    .filter(|r| {
                        r.k_t == k_t && r.snr_db == snr_db && r.algorithm == alg && !r.flagged
                    })
                    .map(|r| r.sum_rate_bits)
                    .collect();
                let (mean_rate, stderr, n) = summarize(&rates);
                aggregates.push(AggregateRow {
                    k_t,
                    snr_db,
                    algorithm: alg,
                    mean_rate,
                    stderr,
                    n,
                    flops_model: alg.flops(&params),
                });
            }
        }
    }
    Ok(ExperimentResult {
        records,
        aggregates,
        brute_skipped,
    })
}

/// Runs the experiment on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(
    spec: &ExperimentSpec,
    threads: usize,
) -> Result<ExperimentResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    pool.install(|| run_experiment(spec))
}

pub fn write_trials_csv<W: Write>(mut w: W, records: &[TrialRecord]) -> std::io::Result<()> {
    writeln!(w, "{TRIALS_HEADER}")?;
    for r in records {
        writeln!(w, "{}", r.csv_line())?;
    }
    Ok(())
}

pub fn write_aggregates_csv<W: Write>(mut w: W, rows: &[AggregateRow]) -> std::io::Result<()> {
    writeln!(w, "{AGGREGATES_HEADER}")?;
    for r in rows {
        writeln!(w, "{}", r.csv_line())?;
    }
    Ok(())
}

fn metadata(spec: &ExperimentSpec, result: &ExperimentResult) -> String {
    let b = &spec.base;
    let list = |v: Vec<String>| v.join(",");
    format!(
        "channel_draws = shared across algorithms and snr points\n\
         rng = chacha8 seeded per (master_seed, k_t, trial) via splitmix64\n\
         num_cells = {}\nselect_per_cell = {}\ntx_antennas = {}\nrx_antennas = {}\n\
         streams_per_user = {}\nbs_power = {}\nusers_sweep = {}\nsnr_db = {}\n\
         num_trials = {}\nmaster_seed = {}\nalgorithms = {}\nbrute_cap = {}\n\
         brute_skipped_k_t = {}\nresidual_gate = {}\n",
        b.num_cells,
        b.select_per_cell,
        b.tx_antennas,
        b.rx_antennas,
        b.streams_per_user,
        b.bs_power,
        list(spec.users_sweep.iter().map(|x| x.to_string()).collect()),
        list(spec.snr_db_list.iter().map(|x| x.to_string()).collect()),
        spec.num_trials,
        spec.master_seed,
        list(spec.algorithms.iter().map(|x| x.to_string()).collect()),
        spec.brute_cap,
        list(result.brute_skipped.iter().map(|x| x.to_string()).collect()),
        RESIDUAL_GATE,
    )
}

/// Paths written by [`emit_results`].
#[derive(Debug, Clone)]
pub struct OutputFiles {
    pub trials: PathBuf,
    pub aggregates: PathBuf,
    pub metadata: PathBuf,
}

/// Writes `trials.csv`, `aggregates.csv` and `metadata.txt` into `out_dir`.
pub fn emit_results(
    spec: &ExperimentSpec,
    result: &ExperimentResult,
    out_dir: &Path,
) -> Result<OutputFiles> {
    let io = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Io { path, source }
    };
    fs::create_dir_all(out_dir).map_err(io(out_dir))?;
    let files = OutputFiles {
        trials: out_dir.join("trials.csv"),
        aggregates: out_dir.join("aggregates.csv"),
        metadata: out_dir.join("metadata.txt"),
    };
    let mut buf = Vec::new();
    write_trials_csv(&mut buf, &result.records).map_err(io(&files.trials))?;
    fs::write(&files.trials, &buf).map_err(io(&files.trials))?;

    buf.clear();
    write_aggregates_csv(&mut buf, &result.aggregates).map_err(io(&files.aggregates))?;
    fs::write(&files.aggregates, &buf).map_err(io(&files.aggregates))?;

    fs::write(&files.metadata, metadata(spec, result)).map_err(io(&files.metadata))?;
    Ok(files)
}
