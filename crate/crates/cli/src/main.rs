//! `forge`: batch front end for the qnilp engine.
//!
//! Exit status is 0 when every requested check passes, 1 when a check fails
//! and 2 for usage or input errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use qnilp::io::{is_prime, sigma_key, to_json, ChainRow, CheckResult, CondRow, PresentationFile, Report, SeedFile};
use qnilp::kacmoody::{blueprint, preset, CartanDatum, ReducedWord};
use qnilp::ore::DRing;
use qnilp::primes::{chain_steps, gamma_subset, CglStructure, LaurentBounds, Orientation, SeedOptions};
use qnilp::seed::{mutate_seed, quiver_dot, reindex_seed, validate_seed};
use qnilp::{CGLPresentation, QuantumSeed};

#[derive(Parser, Debug)]
#[command(name = "forge", version, about = "Quantum cluster structures on quantum nilpotent algebras")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Write a named preset (presentation, initial seed, Cartan data) to a directory.
    Preset {
        /// b2-w1212, a2tw-01010, lastex or qweyl:<n>
        name: String,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long = "char", default_value_t = 0)]
        characteristic: u64,
    },
    /// Validate a presentation, compute its primes and run the requested checks.
    Analyze {
        #[command(flatten)]
        input: Input,
        /// Comma-separated subset of cgl, cond, dform, chains, laurent.
        #[arg(long, value_delimiter = ',', default_value = "cgl,cond")]
        check: Vec<Check>,
        #[command(flatten)]
        run: RunOpts,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Build the seed of one permutation (default: identity) or of every Γ_N permutation.
    Seed {
        #[command(flatten)]
        input: Input,
        /// 1-based permutation, e.g. 2,1,3,4.
        #[arg(long, conflicts_with = "all_gamma")]
        sigma: Option<String>,
        /// Write one file per Γ_N permutation into the output directory.
        #[arg(long)]
        all_gamma: bool,
        #[arg(long = "char", default_value_t = 0)]
        characteristic: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Apply a script of mutations (`mK`, `mK-`) and relabellings (`p2,1,3`) to a seed file.
    Mutate {
        seed: PathBuf,
        /// Whitespace-separated steps.
        #[arg(long)]
        script: String,
        /// Realize new variables by exact division in this presentation.
        #[arg(long)]
        presentation: Option<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Compile Cartan data and a reduced word into a seed and verify its compatibility.
    Blueprint {
        #[arg(long, requires = "word", conflicts_with = "preset")]
        cartan: Option<PathBuf>,
        /// Comma-separated letters, labelled as in the Cartan file.
        #[arg(long, requires = "cartan")]
        word: Option<String>,
        /// Take the Cartan data and word from a preset instead.
        #[arg(long)]
        preset: Option<String>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Check every adjacency step along Γ_N paths and Laurent membership of all generators.
    Verify {
        #[command(flatten)]
        input: Input,
        /// Walk all of Ξ_N instead of the Γ_N paths.
        #[arg(long)]
        all_gamma: bool,
        #[command(flatten)]
        run: RunOpts,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Export the quiver of a seed file as Graphviz DOT.
    Quiver {
        seed: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Input {
    /// Presentation file.
    presentation: Option<PathBuf>,
    /// Use a named preset instead of a file.
    #[arg(long = "preset")]
    preset_name: Option<String>,
}

#[derive(Args, Debug)]
struct RunOpts {
    /// Laurent bounds: denominator cap and numerator box, e.g. 3,6.
    #[arg(long)]
    bounds: Option<String>,
    #[arg(long = "char", default_value_t = 0)]
    characteristic: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
enum Check {
    Cgl,
    Cond,
    Dform,
    Chains,
    Laurent,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("forge: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd) -> Result<bool> {
    match cmd {
        Cmd::Preset { name, out, characteristic } => cmd_preset(&name, &out, characteristic),
        Cmd::Analyze { input, check, run, out } => {
            let s = structure(&input, run.characteristic)?;
            let report = analyze(&s, &check, &run)?;
            finish_report(&report, out.as_deref())
        }
        Cmd::Seed { input, sigma, all_gamma, characteristic, out } => {
            cmd_seed(&structure(&input, characteristic)?, sigma.as_deref(), all_gamma, &out)
        }
        Cmd::Mutate { seed, script, presentation, out } => cmd_mutate(&seed, &script, presentation.as_deref(), &out),
        Cmd::Blueprint { cartan, word, preset, out } => {
            cmd_blueprint(cartan.as_deref(), word.as_deref(), preset.as_deref(), &out)
        }
        Cmd::Verify { input, all_gamma, run, out } => {
            let s = structure(&input, run.characteristic)?;
            let mut report = Report::new(&s);
            let bounds = parse_bounds(run.bounds.as_deref())?;
            let pool = pool(run.jobs)?;
            pool.install(|| {
                run_chains(&s, all_gamma, &mut report);
                run_laurent(&s, bounds, &mut report);
            });
            finish_report(&report, out.as_deref())
        }
        Cmd::Quiver { seed, out } => {
            let seed = read_seed(&seed)?;
            write(&out, &quiver_dot(&seed)?)?;
            Ok(true)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_presentation(path: &Path) -> Result<CGLPresentation> {
    let file: PresentationFile =
        serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    Ok(file.to_presentation()?)
}

fn read_seed(path: &Path) -> Result<QuantumSeed> {
    let file: SeedFile = serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    Ok(file.to_seed()?)
}

fn structure(input: &Input, characteristic: u64) -> Result<CglStructure> {
    let mut p = match (&input.presentation, &input.preset_name) {
        (Some(path), None) => read_presentation(path)?,
        (None, Some(name)) => preset(name)?.presentation,
        _ => bail!("give either a presentation file or --preset"),
    };
    if characteristic != 0 {
        if !is_prime(characteristic) {
            bail!("characteristic {characteristic} is not prime");
        }
        p = p.with_characteristic(characteristic);
    }
    let report = p.validate_cgl();
    if !report.passed() {
        bail!("not a CGL presentation: {}", report.violations.join("; "));
    }
    Ok(CglStructure::new(p)?)
}

fn parse_perm(text: &str, n: usize) -> Result<Vec<usize>> {
    let v: Vec<usize> = text
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| anyhow!("bad permutation entry {t:?}")))
        .collect::<Result<_>>()?;
    let mut seen = vec![false; n];
    for &i in &v {
        if i == 0 || i > n || std::mem::replace(&mut seen[i - 1], true) {
            bail!("{text:?} is not a permutation of 1..{n}");
        }
    }
    if v.len() != n {
        bail!("{text:?} is not a permutation of 1..{n}");
    }
    Ok(v.into_iter().map(|i| i - 1).collect())
}

fn parse_bounds(text: Option<&str>) -> Result<LaurentBounds> {
    let Some(text) = text else { return Ok(LaurentBounds::default()) };
    let (d, b) = text.split_once(',').ok_or_else(|| anyhow!("--bounds expects D,B"))?;
    let cap = d.trim().parse().map_err(|_| anyhow!("bad denominator cap {d:?}"))?;
    let upper = b.trim().parse().map_err(|_| anyhow!("bad numerator box {b:?}"))?;
    Ok(LaurentBounds { cap, upper: Some(upper) })
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build()?)
}

fn finish_report(report: &Report, out: Option<&Path>) -> Result<bool> {
    match out {
        Some(path) => write(path, &to_json(report))?,
        None => print!("{}", to_json(report)),
    }
    for (name, c) in &report.checks {
        eprintln!("{name}: {}", if c.passed { "pass" } else { "FAIL" });
        for m in &c.messages {
            eprintln!("  {m}");
        }
    }
    Ok(report.passed())
}

fn cmd_preset(name: &str, out: &Path, characteristic: u64) -> Result<bool> {
    let pr = preset(name)?;
    let p = if characteristic != 0 { pr.presentation.with_characteristic(characteristic) } else { pr.presentation };
    write(&out.join("presentation.json"), &to_json(&PresentationFile::from_presentation(&p)))?;
    let s = CglStructure::new(p)?;
    let id: Vec<usize> = (0..s.n()).collect();
    match s.build_seed(&id, &SeedOptions::default()) {
        Ok(seed) => write(&out.join("seed.json"), &to_json(&SeedFile::from_seed(&seed)))?,
        Err(e) => eprintln!("forge: no initial seed written: {e}"),
    }
    if let Some((c, w)) = &pr.cartan {
        write(&out.join("cartan.json"), &to_json(c))?;
        let letters: Vec<String> = w.0.iter().map(|i| (i + c.index_base).to_string()).collect();
        write(&out.join("word.txt"), &format!("{}\n", letters.join(",")))?;
    }
    Ok(true)
}

fn analyze(s: &CglStructure, checks: &[Check], run: &RunOpts) -> Result<Report> {
    let p = &s.presentation;
    let mut report = Report::new(s);
    let id: Vec<usize> = (0..s.n()).collect();
    if let Ok(seed) = s.build_seed(&id, &SeedOptions::default()) {
        report.seeds.insert(sigma_key(&id), SeedFile::from_seed(&seed));
    }
    let mut checks = checks.to_vec();
    checks.sort();
    checks.dedup();
    let bounds = parse_bounds(run.bounds.as_deref())?;
    let pool = pool(run.jobs)?;
    for c in checks {
        match c {
            Check::Cgl => {
                report.checks.insert("cgl".into(), CheckResult::new(p.validate_cgl().violations));
            }
            Check::Cond => {
                let mut msgs = Vec::new();
                if let Err(e) = &s.cond_b {
                    msgs.push(e.to_string());
                }
                match s.cond_table() {
                    Ok(rows) => {
                        for r in &rows {
                            if !r.passes(Orientation::Literal) {
                                msgs.push(format!(
                                    "i = {}: leading coefficient {} is not q^({}/2)",
                                    r.i + 1,
                                    r.pi,
                                    r.required_exp2
                                ));
                            }
                        }
                        report.cond = Some(rows.iter().map(|r| CondRow::new(p, r)).collect());
                    }
                    Err(e) => msgs.push(e.to_string()),
                }
                report.checks.insert("cond".into(), CheckResult::new(msgs));
            }
            Check::Dform => {
                let mut extra = s.eta.y.clone();
                extra.extend(s.ybar.iter().cloned());
                report
                    .checks
                    .insert("dform".into(), CheckResult::new(p.d_form_check(&extra, DRing::HalfPowers).violations));
            }
            Check::Chains => pool.install(|| run_chains(s, false, &mut report)),
            Check::Laurent => pool.install(|| run_laurent(s, bounds, &mut report)),
        }
    }
    Ok(report)
}

fn run_chains(s: &CglStructure, all: bool, report: &mut Report) {
    let opts = SeedOptions::default();
    let steps = chain_steps(s.n(), all);
    let results: Vec<_> = steps.par_iter().map(|(a, b)| (a, b, s.verify_mutation_chain(a, b, &opts))).collect();
    let mut msgs = Vec::new();
    for (a, b, r) in results {
        match r {
            Ok(r) => {
                if let Some(m) = &r.mismatch {
                    msgs.push(format!("{} -> {}: {m}", sigma_key(a), sigma_key(b)));
                }
                report.chains.push(ChainRow::from(&r));
            }
            Err(e) => {
                msgs.push(format!("{} -> {}: {e}", sigma_key(a), sigma_key(b)));
                report.chains.push(ChainRow {
                    sigma: a.iter().map(|i| i + 1).collect(),
                    sigma2: b.iter().map(|i| i + 1).collect(),
                    k: 0,
                    mutation: false,
                    passed: false,
                    message: Some(e.to_string()),
                });
            }
        }
    }
    report.checks.insert("chains".into(), CheckResult::new(msgs));
}

fn run_laurent(s: &CglStructure, bounds: LaurentBounds, report: &mut Report) {
    let n = s.n();
    let opts = SeedOptions::default();
    let results: Vec<_> = gamma_subset(n)
        .par_iter()
        .map(|sigma| {
            let mut msgs = Vec::new();
            let seed = match s.build_seed(sigma, &opts) {
                Ok(seed) => seed,
                Err(e) => return (sigma.clone(), None, vec![format!("{}: {e}", sigma_key(sigma))]),
            };
            for j in 0..n {
                match s.laurent_membership(&seed, &s.presentation.gen(j), bounds) {
                    Ok(Some(_)) => {}
                    Ok(None) => {
                        msgs.push(format!("{}: x{} has no expansion within the bounds", sigma_key(sigma), j + 1))
                    }
                    Err(e) => msgs.push(format!("{}: x{}: {e}", sigma_key(sigma), j + 1)),
                }
            }
            (sigma.clone(), Some(seed), msgs)
        })
        .collect();
    let mut all = Vec::new();
    for (sigma, seed, msgs) in results {
        if let Some(seed) = seed {
            report.seeds.insert(sigma_key(&sigma), SeedFile::from_seed(&seed));
        }
        all.extend(msgs);
    }
    report.checks.insert("laurent".into(), CheckResult::new(all));
}

fn cmd_seed(s: &CglStructure, sigma: Option<&str>, all_gamma: bool, out: &Path) -> Result<bool> {
    let n = s.n();
    let opts = SeedOptions::default();
    if all_gamma {
        for sigma in gamma_subset(n) {
            let seed = s.build_seed(&sigma, &opts).with_context(|| format!("sigma = {}", sigma_key(&sigma)))?;
            let name = format!("seed_{}.json", sigma_key(&sigma).replace(',', "-"));
            write(&out.join(name), &to_json(&SeedFile::from_seed(&seed)))?;
        }
        return Ok(true);
    }
    let sigma = match sigma {
        Some(t) => parse_perm(t, n)?,
        None => (0..n).collect(),
    };
    let seed = s.build_seed(&sigma, &opts)?;
    write(out, &to_json(&SeedFile::from_seed(&seed)))?;
    Ok(true)
}

enum Step {
    Mutate(usize, i64),
    Relabel(Vec<usize>),
}

fn parse_script(script: &str, n: usize) -> Result<Vec<Step>> {
    script
        .split_whitespace()
        .map(|tok| {
            if let Some(rest) = tok.strip_prefix('m') {
                let (num, eps) = match rest.strip_suffix('-') {
                    Some(r) => (r, -1),
                    None => (rest.strip_suffix('+').unwrap_or(rest), 1),
                };
                let k: usize = num.parse().map_err(|_| anyhow!("bad step {tok:?}"))?;
                if k == 0 || k > n {
                    bail!("step {tok:?}: index out of range 1..{n}");
                }
                Ok(Step::Mutate(k - 1, eps))
            } else if let Some(rest) = tok.strip_prefix('p') {
                Ok(Step::Relabel(parse_perm(rest, n)?))
            } else {
                bail!("bad step {tok:?}: expected mK, mK- or p<permutation>")
            }
        })
        .collect()
}

fn cmd_mutate(seed: &Path, script: &str, presentation: Option<&Path>, out: &Path) -> Result<bool> {
    let mut seed = read_seed(seed)?;
    let p = presentation.map(read_presentation).transpose()?;
    for step in parse_script(script, seed.frame.n())? {
        seed = match step {
            Step::Mutate(k, eps) => mutate_seed(&seed, k, eps, p.as_ref())?,
            Step::Relabel(tau) => reindex_seed(&seed, &tau)?,
        };
    }
    write(out, &to_json(&SeedFile::from_seed(&seed)))?;
    Ok(validate_seed(&seed).passed)
}

fn cmd_blueprint(cartan: Option<&Path>, word: Option<&str>, preset_name: Option<&str>, out: &Path) -> Result<bool> {
    let (c, w) = match (cartan, word, preset_name) {
        (Some(path), Some(word), None) => {
            let c: CartanDatum =
                serde_json::from_str(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
            c.validate()?;
            let w = ReducedWord::parse(&c, word)?;
            (c, w)
        }
        (None, None, Some(name)) => preset(name)?.cartan.ok_or_else(|| anyhow!("preset {name} has no Cartan data"))?,
        _ => bail!("give --cartan with --word, or --preset"),
    };
    let bp = blueprint(&c, &w)?;
    write(out, &to_json(&SeedFile::from_blueprint(&bp)))?;
    match bp.check() {
        Ok(()) => {
            eprintln!("compat: pass");
            Ok(true)
        }
        Err(e) => {
            eprintln!("compat: FAIL ({e})");
            Ok(false)
        }
    }
}
