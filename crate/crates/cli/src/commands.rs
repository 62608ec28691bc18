use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rbkit::analysis::{bootstrap_lambda_stderrs, estimate_from_fits, fit_decay, DecayFit, InfidelityEstimate};
use rbkit::channel::{block_eigenvalue, dense_group_twirl, twirled_lambdas, BlockChannel, ChannelFile, PauliChannel};
use rbkit::closed_form::{average_infidelity, closed_form_lambdas, first_order_lambdas, BoundVariant};
use rbkit::engine::{DecayData, Engine, LengthData};
use rbkit::generators::enumerate_group;
use rbkit::orbit::{anticommutation_census, closed_form_sizes, compute_blocks};
use rbkit::{GeneratorSet, GroupName, PauliOperator};
use serde::{Deserialize, Serialize};

use crate::error::{io_error, CliError, CliResult};
use crate::run_dir::{self, RunManifest, RunWriter};

/// Checks in `twirl-verify` pass below this deviation.
pub const TWIRL_TOLERANCE: f64 = 1e-12;
/// Largest qubit count for which `lambdas` cross-checks against the census.
pub const CENSUS_CHECK_MAX_QUBITS: usize = 5;
/// Fitted and predicted decay constants must agree within this many standard errors.
pub const COMPARISON_SIGMAS: f64 = 3.0;

#[derive(Debug, Serialize, Deserialize)]
pub struct BlockRow {
    pub block: usize,
    pub size: usize,
    pub representative: Option<PauliOperator>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BlocksReport {
    pub group: GroupName,
    pub n_qubits: usize,
    pub sizes: Vec<usize>,
    pub closed_form_sizes: Vec<u64>,
    pub matches_closed_form: bool,
    pub blocks: Vec<BlockRow>,
}

pub fn blocks(group: GroupName, n: usize) -> CliResult<BlocksReport> {
    let d = compute_blocks(&GeneratorSet::new(group, n)?)?;
    let sizes = d.sizes();
    let closed = closed_form_sizes(group, n)?;
    let matches = sizes.iter().map(|&s| s as u64).eq(closed.iter().copied());
    Ok(BlocksReport {
        group,
        n_qubits: n,
        blocks: (1..d.len())
            .map(|b| BlockRow {
                block: b,
                size: d.block(b).len(),
                representative: d.members(b).next(),
            })
            .collect(),
        sizes,
        closed_form_sizes: closed,
        matches_closed_form: matches,
    })
}

pub fn blocks_table(r: &BlocksReport) -> String {
    let mut out = format!("group {}, n = {}\n", r.group, r.n_qubits);
    writeln!(out, "{:<7}{:>10}  representative", "block", "size").unwrap();
    for row in &r.blocks {
        let rep = row.representative.map(|p| p.to_string()).unwrap_or_else(|| "-".into());
        writeln!(out, "{:<7}{:>10}  {rep}", format!("B{}", row.block), row.size).unwrap();
    }
    writeln!(
        out,
        "closed form: {:?} ({})",
        r.closed_form_sizes,
        if r.matches_closed_form { "match" } else { "MISMATCH" }
    )
    .unwrap();
    out
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LambdaReport {
    pub group: GroupName,
    pub n_qubits: usize,
    pub p: Vec<f64>,
    pub infidelity: f64,
    pub average_infidelity: f64,
    /// `closed-form` or `census`.
    pub source: String,
    pub lambdas: Vec<f64>,
    pub first_order_lambdas: Option<Vec<f64>>,
    pub census_lambdas: Option<Vec<f64>>,
    pub max_census_deviation: Option<f64>,
}

pub fn lambdas(group: GroupName, n: usize, p: &[f64]) -> CliResult<LambdaReport> {
    let census = if n <= CENSUS_CHECK_MAX_QUBITS {
        let d = compute_blocks(&GeneratorSet::new(group, n)?)?;
        let b = BlockChannel::new(&d, p.to_vec())?;
        let census = anticommutation_census(&d)?;
        Some((1..d.len()).map(|j| block_eigenvalue(&b, &census, j)).collect::<rbkit::Result<Vec<f64>>>()?)
    } else {
        None
    };
    let (source, values) = match closed_form_lambdas(group, n, p) {
        Ok(v) => ("closed-form", v),
        Err(rbkit::Error::UnsupportedGroup(_)) if census.is_some() => ("census", census.clone().unwrap()),
        Err(e) => return Err(e.into()),
    };
    let max_dev = census
        .as_ref()
        .map(|c| c.iter().zip(&values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    let infidelity: f64 = p.iter().sum();
    Ok(LambdaReport {
        group,
        n_qubits: n,
        p: p.to_vec(),
        infidelity,
        average_infidelity: average_infidelity(infidelity, n)?,
        source: source.into(),
        lambdas: values,
        first_order_lambdas: first_order_lambdas(group, n, p).ok(),
        census_lambdas: census,
        max_census_deviation: max_dev,
    })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TwirlReport {
    pub group: GroupName,
    pub n_qubits: usize,
    pub group_order: usize,
    pub infidelity: f64,
    pub block_probabilities: Vec<f64>,
    /// Largest `|x_μ − p_i/N_i|` over the twirled weights.
    pub block_uniformity_deviation: f64,
    /// Largest gap between twirled-channel eigenvalues and census block eigenvalues.
    pub eigenvalue_deviation: f64,
    /// Same, against the closed forms where they exist.
    pub closed_form_deviation: Option<f64>,
    /// Largest weight change when the twirl is applied a second time.
    pub idempotence_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn twirl_verify(group: GroupName, n: usize, channel_path: &Path, cap: usize) -> CliResult<TwirlReport> {
    let file: ChannelFile = run_dir::read_json(channel_path)?;
    if file.n != n {
        return Err(CliError::Config(format!(
            "{} describes {} qubits, not {n}",
            channel_path.display(),
            file.n
        )));
    }
    let channel = file.to_channel()?;
    let gens = GeneratorSet::new(group, n)?;
    let d = compute_blocks(&gens)?;
    let g = enumerate_group(&gens, cap)?;
    let action = g.unsigned_action_index();
    let twirled = dense_group_twirl(&channel, &action)?;
    let again = dense_group_twirl(&twirled, &action)?;

    let (b, census_lambdas) = twirled_lambdas(&channel, &d)?;
    let w = twirled.weights()?;
    let mut uniformity: f64 = 0.0;
    for blk in 1..d.len() {
        let target = b.block_probabilities[blk - 1] / d.block(blk).len().max(1) as f64;
        for &mu in d.block(blk) {
            uniformity = uniformity.max((w[mu as usize] - target).abs());
        }
    }
    let table = twirled.eigenvalue_table()?;
    let closed = closed_form_lambdas(group, n, &b.block_probabilities).ok();
    let mut eig_dev: f64 = 0.0;
    let mut closed_dev: f64 = 0.0;
    for (mu, &lam) in table.iter().enumerate().skip(1) {
        let blk = d.block_of(mu);
        eig_dev = eig_dev.max((lam - census_lambdas[blk - 1]).abs());
        if let Some(c) = &closed {
            closed_dev = closed_dev.max((lam - c[blk - 1]).abs());
        }
    }
    let idem = w
        .iter()
        .zip(again.weights()?)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let closed_form_deviation = closed.map(|_| closed_dev);
    let pass = [uniformity, eig_dev, idem, closed_form_deviation.unwrap_or(0.0)]
        .iter()
        .all(|&x| x < TWIRL_TOLERANCE);
    Ok(TwirlReport {
        group,
        n_qubits: n,
        group_order: g.order(),
        infidelity: channel.infidelity(),
        block_probabilities: b.block_probabilities,
        block_uniformity_deviation: uniformity,
        eigenvalue_deviation: eig_dev,
        closed_form_deviation,
        idempotence_deviation: idem,
        tolerance: TWIRL_TOLERANCE,
        pass,
    })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub group: GroupName,
    pub n_qubits: usize,
    pub measured_pauli: PauliOperator,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_stabilizers: Vec<PauliOperator>,
    pub rng_seed: u64,
    pub sequences_per_length: usize,
    pub shots_per_sequence: usize,
    pub lengths: Vec<LengthData>,
}

pub fn simulate(config_path: &Path, out_dir: &Path, seed: Option<u64>) -> CliResult<SimulationSummary> {
    let started = run_dir::now_unix();
    let mut cfg = run_dir::read_config(config_path)?;
    if let Some(s) = seed {
        cfg.rng_seed = s;
    }
    let engine = Engine::new(&cfg)?;
    let data = engine.run();
    let summary = SimulationSummary {
        group: cfg.group,
        n_qubits: cfg.n_qubits,
        measured_pauli: cfg.measured_pauli,
        extra_stabilizers: cfg.extra_stabilizers.clone(),
        rng_seed: cfg.rng_seed,
        sequences_per_length: cfg.sequences_per_length,
        shots_per_sequence: cfg.shots_per_sequence,
        lengths: data.summary(),
    };
    let mut w = RunWriter::create(out_dir)?;
    w.write(run_dir::CONFIG_FILE, &run_dir::to_json(&cfg))?;
    w.write(run_dir::FIDELITIES_FILE, &data.to_csv())?;
    w.write(run_dir::SUMMARY_FILE, &run_dir::to_json(&summary))?;
    let manifest = RunManifest {
        tool: "rbkit".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config_hash: run_dir::config_hash(&cfg),
        rng_seed: cfg.rng_seed,
        started_unix: started,
        finished_unix: run_dir::now_unix(),
        files: w.files().to_vec(),
    };
    w.write(run_dir::MANIFEST_FILE, &run_dir::to_json(&manifest))?;
    Ok(summary)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SeriesFit {
    pub source: String,
    pub fit: DecayFit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bootstrap_lambda_stderrs: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FitOutput {
    pub model: String,
    pub fits: Vec<SeriesFit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infidelity: Option<InfidelityEstimate>,
}

pub struct FitRequest<'a> {
    pub csvs: &'a [PathBuf],
    pub order: usize,
    pub group: Option<GroupName>,
    pub variant: Option<BoundVariant>,
    pub n: Option<usize>,
    pub bootstrap: Option<usize>,
    pub seed: u64,
    pub out_dir: Option<&'a Path>,
}

pub fn read_decay_csv(path: &Path) -> CliResult<DecayData> {
    let text = fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    DecayData::from_csv(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn source_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

pub fn fit(req: &FitRequest<'_>) -> CliResult<FitOutput> {
    if req.csvs.is_empty() {
        return Err(CliError::Config("no CSV files given".into()));
    }
    let mut series = Vec::new();
    let mut curve = String::from("series,length,mean,stderr,fitted\n");
    for (i, path) in req.csvs.iter().enumerate() {
        let data = read_decay_csv(path)?;
        let fit = fit_decay(&data, req.order)?;
        for row in data.lengths() {
            writeln!(
                curve,
                "{i},{},{:?},{:?},{:?}",
                row.length,
                row.mean,
                row.stderr,
                fit.predict(row.length as f64)
            )
            .unwrap();
        }
        let boot = match req.bootstrap {
            Some(k) => Some(bootstrap_lambda_stderrs(&data, req.order, k, req.seed)?),
            None => None,
        };
        series.push(SeriesFit {
            source: source_name(path),
            fit,
            bootstrap_lambda_stderrs: boot,
        });
    }
    let infidelity = match req.variant {
        Some(variant) => {
            let n = req
                .n
                .ok_or_else(|| CliError::Config("--n is required with --variant".into()))?;
            let group = req.group.unwrap_or(variant.group());
            let fits: Vec<&DecayFit> = series.iter().map(|s| &s.fit).collect();
            Some(estimate_from_fits(variant, group, n, &fits)?)
        }
        None => None,
    };
    let out = FitOutput {
        model: if req.order == 1 { "single" } else { "double" }.into(),
        fits: series,
        infidelity,
    };
    if let Some(dir) = req.out_dir {
        let mut w = RunWriter::create(dir)?;
        w.write(run_dir::FIT_FILE, &run_dir::to_json(&out))?;
        w.write(run_dir::CURVE_FILE, &curve)?;
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Comparison {
    pub fitted_lambda: f64,
    pub fitted_stderr: Option<f64>,
    pub predicted_lambda: f64,
    pub delta: f64,
    pub sigmas: Option<f64>,
    pub tolerance_sigmas: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub group: GroupName,
    pub n_qubits: usize,
    pub rng_seed: u64,
    pub measured_pauli: PauliOperator,
    pub measured_block: usize,
    pub block_sizes: Vec<usize>,
    pub block_probabilities: Vec<f64>,
    pub infidelity: f64,
    pub predicted_lambdas: Vec<f64>,
    pub fit: DecayFit,
    pub comparison: Comparison,
    pub bounds: Option<InfidelityEstimate>,
    pub bounds_contain_infidelity: Option<bool>,
    pub warnings: Vec<String>,
    pub pass: bool,
}

fn manifest_warnings(dir: &Path, manifest: &RunManifest, cfg: &rbkit::ExperimentConfig) -> Vec<String> {
    let mut warnings = Vec::new();
    if manifest.rng_seed != cfg.rng_seed {
        warnings.push(format!(
            "manifest seed {} differs from config seed {}",
            manifest.rng_seed, cfg.rng_seed
        ));
    }
    if manifest.config_hash != run_dir::config_hash(cfg) {
        warnings.push("manifest config hash does not match config.json".into());
    }
    for f in &manifest.files {
        if f.name == run_dir::MANIFEST_FILE {
            continue;
        }
        match fs::read(dir.join(&f.name)) {
            Ok(bytes) if run_dir::sha256_hex(&bytes) == f.sha256 => {}
            Ok(_) => warnings.push(format!("{} does not match its manifest hash", f.name)),
            Err(_) => warnings.push(format!("{} listed in the manifest is missing", f.name)),
        }
    }
    warnings
}

pub fn report(dir: &Path) -> CliResult<RunReport> {
    let cfg_path = dir.join(run_dir::CONFIG_FILE);
    if !cfg_path.exists() {
        return Err(CliError::Config(format!(
            "{} is not a run directory (no {})",
            dir.display(),
            run_dir::CONFIG_FILE
        )));
    }
    let cfg = run_dir::read_config(&cfg_path)?;
    let mut warnings = match run_dir::read_json::<RunManifest>(&dir.join(run_dir::MANIFEST_FILE)) {
        Ok(m) => manifest_warnings(dir, &m, &cfg),
        Err(e) => vec![format!("no usable manifest: {e}")],
    };
    let data = read_decay_csv(&dir.join(run_dir::FIDELITIES_FILE))?;
    let fit = match run_dir::read_json::<FitOutput>(&dir.join(run_dir::FIT_FILE)) {
        Ok(mut f) if !f.fits.is_empty() => f.fits.swap_remove(0).fit,
        _ => fit_decay(&data, 1)?,
    };

    let n = cfg.n_qubits;
    let d = compute_blocks(&GeneratorSet::new(cfg.group, n)?)?;
    let channel: PauliChannel = cfg.gate_channel.to_channel()?;
    let (b, predicted) = twirled_lambdas(&channel, &d)?;
    let measured_block = d.block_of_pauli(&cfg.measured_pauli)?;
    if !cfg.extra_stabilizers.is_empty() {
        warnings.push("several stabilizers are measured; the comparison uses the block of measured_pauli".into());
    }
    if cfg.prep_channel.is_some() || cfg.meas_channel.is_some() {
        warnings.push("SPAM channels are not propagated into the bound intervals".into());
    }
    let predicted_lambda = predicted[measured_block - 1];
    let (fitted, se) = fit.lambda();
    let delta = fitted - predicted_lambda;
    let sigmas = se.filter(|s| *s > 0.0).map(|s| delta.abs() / s);
    let comparison = Comparison {
        fitted_lambda: fitted,
        fitted_stderr: se,
        predicted_lambda,
        delta,
        sigmas,
        tolerance_sigmas: COMPARISON_SIGMAS,
        pass: sigmas.is_some_and(|s| s <= COMPARISON_SIGMAS),
    };
    let variant = match (cfg.group, measured_block) {
        (GroupName::Real, 1) => Some(BoundVariant::RealFromLambda1),
        (GroupName::CnotPauli, 3) if n > 2 => Some(BoundVariant::CnotPauliFromLambda3),
        _ => None,
    };
    let bounds = match variant {
        Some(v) => Some(estimate_from_fits(v, cfg.group, n, &[&fit])?),
        None => None,
    };
    let infidelity = b.infidelity();
    let contain = bounds.as_ref().map(|e| e.contains(infidelity, COMPARISON_SIGMAS));
    let pass = comparison.pass && contain.unwrap_or(true);
    let out = RunReport {
        group: cfg.group,
        n_qubits: n,
        rng_seed: cfg.rng_seed,
        measured_pauli: cfg.measured_pauli,
        measured_block,
        block_sizes: d.sizes(),
        block_probabilities: b.block_probabilities,
        infidelity,
        predicted_lambdas: predicted,
        fit,
        comparison,
        bounds,
        bounds_contain_infidelity: contain,
        warnings,
        pass,
    };
    let path = dir.join(run_dir::REPORT_FILE);
    fs::write(&path, run_dir::to_json(&out)).map_err(|e| io_error(&path, e))?;
    Ok(out)
}
