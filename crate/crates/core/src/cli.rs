//! The `caimg` command line. [`run`] takes the argument list and output
//! streams so it can be driven from tests.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{
    adjacent_correlation, chi_square_critical, chi_square_uniform, difference_image, histogram,
    key_sensitivity_harness, DEFAULT_PAIRS,
};
use crate::ca_rules::enumerate_invertible_uniform_rules;
use crate::cipher::{
    decrypt_image, encrypt_image, CipherKey, CipherMode, LineAxis, ScramblePermutation,
};
use crate::error::{Error, Result};
use crate::imagecodec::{binarize, read_image, write_image, BitPlaneImage, PixelImage};
use crate::randtest::{score_color_image, Direction, RandTestConfig};

#[derive(Debug, Parser)]
#[command(
    name = "caimg",
    version,
    about = "Cellular-automaton image encryption and randomness tools"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a key sized for an image.
    Keygen(KeygenArgs),
    /// Encrypt a PGM/PPM image.
    Encrypt(CryptArgs),
    /// Decrypt a ciphertext produced by `encrypt`.
    Decrypt(CryptArgs),
    /// Apply only the key's bit permutation (or its inverse).
    Scramble(ScrambleArgs),
    /// Runs-test randomness score of an image.
    Score(ScoreArgs),
    /// Histogram, correlation, difference and key-sensitivity reports.
    Analyze(AnalyzeArgs),
    /// List the invertible uniform rules for an m x n block.
    Rules(RulesArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum AxisArg {
    Row,
    Column,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DirectionArg {
    Horizontal,
    Vertical,
    Diagonal,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Horizontal => Direction::Horizontal,
            DirectionArg::Vertical => Direction::Vertical,
            DirectionArg::Diagonal => Direction::Diagonal,
        }
    }
}

#[derive(Debug, Args)]
pub struct KeygenArgs {
    /// W1..W6
    #[arg(long)]
    pub mode: CipherMode,
    /// Master seed; drawn from the OS when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Image whose size and channel count the key is for.
    #[arg(long)]
    pub image: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Which block lines share a rule in W2 / W5.
    #[arg(long, value_enum, default_value = "row")]
    pub axis: AxisArg,
    #[arg(long, default_value_t = 1)]
    pub steps: u32,
    #[arg(long, default_value_t = crate::cipher::DEFAULT_BLOCK_SIZE)]
    pub block_size: usize,
}

#[derive(Debug, Args)]
pub struct CryptArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct ScrambleArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub key: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Undo the permutation; the input is then a scrambled canvas.
    #[arg(long)]
    pub inverse: bool,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Trials per evaluation (N).
    #[arg(long)]
    pub tests: Option<usize>,
    /// Evaluations (T).
    #[arg(long)]
    pub evals: Option<usize>,
    /// Start pixels per trial (n).
    #[arg(long)]
    pub pixels: Option<usize>,
    /// Stops per walker (h).
    #[arg(long)]
    pub moves: Option<usize>,
    #[arg(long)]
    pub stride: Option<usize>,
    #[arg(long, value_enum)]
    pub direction: Option<DirectionArg>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV file for per-trial statistics.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Analysis {
    Histogram,
    Correlation,
    Diff,
    Keysens,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(value_enum)]
    pub which: Analysis,
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Second image for `diff`.
    #[arg(long = "in2")]
    pub input2: Option<PathBuf>,
    /// Keys for `keysens`.
    #[arg(long)]
    pub key: Option<PathBuf>,
    #[arg(long)]
    pub key2: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "horizontal")]
    pub direction: DirectionArg,
    #[arg(long, default_value_t = DEFAULT_PAIRS)]
    pub pairs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV (histogram, correlation pairs) or difference image output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RulesArgs {
    pub m: usize,
    pub n: usize,
}

fn require_input(path: &Path) -> Result<()> {
    std::fs::metadata(path)
        .map(|_| ())
        .map_err(|e| Error::io(path, e))
}

fn require_output_dir(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => Err(Error::io(
            dir,
            std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "output directory does not exist",
            ),
        )),
        _ => Ok(()),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(f)
}

fn keygen(a: &KeygenArgs, stdout: &mut dyn Write) -> Result<()> {
    require_input(&a.image)?;
    require_output_dir(&a.out)?;
    let img = read_image(&a.image)?;
    let seed = a.seed.unwrap_or_else(rand::random);
    let mut key = CipherKey::generate_for(a.mode, seed, &img).with_block_size(a.block_size);
    key.axis = match a.axis {
        AxisArg::Row => LineAxis::Row,
        AxisArg::Column => LineAxis::Column,
    };
    key.steps = a.steps;
    key.validate()?;
    key.save(&a.out)?;
    writeln!(
        stdout,
        "wrote {} key for {}x{} pixels, {} channel(s) to {}",
        key.mode,
        img.width(),
        img.height(),
        img.channels(),
        a.out.display()
    )
    .map_err(io_err(Path::new("<stdout>")))
}

fn crypt(a: &CryptArgs, decrypt: bool) -> Result<()> {
    require_input(&a.input)?;
    require_input(&a.key)?;
    require_output_dir(&a.out)?;
    let img = read_image(&a.input)?;
    let key = CipherKey::load(&a.key)?;
    let out = with_threads(a.threads, || {
        if decrypt {
            decrypt_image(&img, &key)
        } else {
            encrypt_image(&img, &key)
        }
    })?;
    write_image(&out, &a.out)
}

fn scramble_cmd(a: &ScrambleArgs) -> Result<()> {
    require_input(&a.input)?;
    require_input(&a.key)?;
    require_output_dir(&a.out)?;
    let img = read_image(&a.input)?;
    let key = CipherKey::load(&a.key)?;
    let g = key.geometry[0];
    let perm = match key.scramble_seed {
        Some(seed) => ScramblePermutation::from_seed(g.padded_rows, g.padded_cols, seed),
        None => ScramblePermutation::identity(g.padded_rows, g.padded_cols),
    };
    let planes = img
        .planes()
        .iter()
        .map(|p| {
            if a.inverse {
                let bp = BitPlaneImage::from_canvas(p, g.rows, g.cols, key.block_size)?;
                crate::imagecodec::debinarize(&perm.invert(&bp)?)
            } else {
                if (p.height(), p.width()) != (g.rows, g.cols) {
                    return Err(Error::Geometry(format!(
                        "key expects {}x{} pixels (rows x cols), image is {}x{}",
                        g.rows,
                        g.cols,
                        p.height(),
                        p.width()
                    )));
                }
                Ok(perm.apply(&binarize(p, key.block_size)?)?.to_canvas())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    write_image(&PixelImage::from_planes(&planes)?, &a.out)
}

fn score(a: &ScoreArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    require_input(&a.input)?;
    if let Some(r) = &a.report {
        require_output_dir(r)?;
    }
    let d = RandTestConfig::default();
    let mut cfg = RandTestConfig {
        tests: a.tests.unwrap_or(d.tests),
        evaluations: a.evals.unwrap_or(d.evaluations),
        pixels: a.pixels.unwrap_or(d.pixels),
        moves: a.moves.unwrap_or(d.moves),
        stride: a.stride.unwrap_or(d.stride),
        direction: a.direction.map_or(d.direction, Into::into),
        seed: a.seed,
        ..d
    };
    if let Some(alpha) = a.alpha {
        cfg = cfg.with_alpha(alpha)?;
    }
    cfg.validate()?;
    if !cfg.normal_approximation_ok() {
        let _ = writeln!(
            stderr,
            "warning: pixels x moves = {} is below 20; the normal approximation is unreliable",
            cfg.sequence_len()
        );
    }
    let img = read_image(&a.input)?;
    let report = with_threads(a.threads, || score_color_image(&img, &cfg))?;
    let out = Path::new("<stdout>");
    if report.channels.len() > 1 {
        for (i, r) in report.channels.iter().enumerate() {
            writeln!(stdout, "channel {i} score {:.2}", r.score).map_err(io_err(out))?;
        }
    }
    writeln!(stdout, "score {:.2}", report.summary).map_err(io_err(out))?;
    if let Some(path) = &a.report {
        let mut w = create(path)?;
        for r in &report.channels {
            r.write_csv(&mut w).map_err(io_err(path))?;
        }
        w.flush().map_err(io_err(path))?;
    }
    Ok(())
}

fn need<'a>(opt: &'a Option<PathBuf>, flag: &str, which: &str) -> Result<&'a PathBuf> {
    opt.as_ref()
        .ok_or_else(|| Error::InvalidConfig(format!("analyze {which} needs --{flag}")))
}

fn analyze(a: &AnalyzeArgs, stdout: &mut dyn Write) -> Result<()> {
    require_input(&a.input)?;
    if let Some(o) = &a.out {
        require_output_dir(o)?;
    }
    let so = Path::new("<stdout>");
    let img = read_image(&a.input)?;
    match a.which {
        Analysis::Histogram => {
            let h = histogram(&img);
            match &a.out {
                Some(path) => {
                    let mut w = create(path)?;
                    h.write_csv(&mut w)
                        .and_then(|_| w.flush())
                        .map_err(io_err(path))?;
                }
                None => h.write_csv(&mut *stdout).map_err(io_err(so))?,
            }
            let crit = chi_square_critical(255, 0.01);
            for (i, bins) in h.bins.iter().enumerate() {
                writeln!(
                    stdout,
                    "channel={i} pixels={} chi_square={:.3} critical_0.01={crit:.3}",
                    h.total(i),
                    chi_square_uniform(bins)
                )
                .map_err(io_err(so))?;
            }
        }
        Analysis::Correlation => {
            for (i, plane) in img.planes().iter().enumerate() {
                let r = adjacent_correlation(plane, a.direction.into(), a.pairs, a.seed)?;
                if img.channels() > 1 {
                    writeln!(stdout, "channel={i}").map_err(io_err(so))?;
                }
                writeln!(stdout, "{r}").map_err(io_err(so))?;
                if let Some(path) = &a.out {
                    let path = if img.channels() > 1 {
                        path.with_extension(format!("ch{i}.csv"))
                    } else {
                        path.clone()
                    };
                    let mut w = create(&path)?;
                    r.write_pairs_csv(&mut w)
                        .and_then(|_| w.flush())
                        .map_err(io_err(&path))?;
                }
            }
        }
        Analysis::Diff => {
            let other = need(&a.input2, "in2", "diff")?;
            require_input(other)?;
            let r = difference_image(&img, &read_image(other)?)?;
            writeln!(stdout, "{r}").map_err(io_err(so))?;
            if let Some(path) = &a.out {
                write_image(&r.image, path)?;
            }
        }
        Analysis::Keysens => {
            let k1 = need(&a.key, "key", "keysens")?;
            let k2 = need(&a.key2, "key2", "keysens")?;
            let (k1, k2) = (CipherKey::load(k1)?, CipherKey::load(k2)?);
            let (enc, dec) = key_sensitivity_harness(&img, &k1, &k2)?;
            writeln!(
                stdout,
                "encryption_differing_fraction={}",
                enc.differing_fraction
            )
            .map_err(io_err(so))?;
            writeln!(
                stdout,
                "decryption_differing_fraction={}",
                dec.differing_fraction
            )
            .map_err(io_err(so))?;
            if let Some(path) = &a.out {
                write_image(&enc.image, path)?;
            }
        }
    }
    Ok(())
}

fn rules(a: &RulesArgs, stdout: &mut dyn Write) -> Result<()> {
    if a.m == 0 || a.n == 0 || a.m * a.n > 64 {
        return Err(Error::Geometry(format!(
            "rules needs m, n >= 1 and m*n <= 64, got {}x{}",
            a.m, a.n
        )));
    }
    let list = enumerate_invertible_uniform_rules(a.m, a.n)?;
    let so = Path::new("<stdout>");
    let names: Vec<String> = list.iter().map(ToString::to_string).collect();
    writeln!(stdout, "{}", names.join(" ")).map_err(io_err(so))?;
    writeln!(stdout, "count {}", list.len()).map_err(io_err(so))
}

pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Keygen(a) => keygen(a, stdout),
        Command::Encrypt(a) => crypt(a, false),
        Command::Decrypt(a) => crypt(a, true),
        Command::Scramble(a) => scramble_cmd(a),
        Command::Score(a) => score(a, stdout, stderr),
        Command::Analyze(a) => analyze(a, stdout),
        Command::Rules(a) => rules(a, stdout),
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code: 0 on success, 2 on any error.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    2
                }
            };
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            std::iter::once("caimg").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn rules_listing() {
        let (code, out, _) = call(&["rules", "1", "1"]);
        assert_eq!(code, 0);
        let odd: Vec<String> = (1..512).step_by(2).map(|r| r.to_string()).collect();
        assert_eq!(out.lines().next().unwrap(), odd.join(" "));
        assert_eq!(out.lines().nth(1).unwrap(), "count 256");
        assert_eq!(call(&["rules", "0", "5"]).0, 2);
        assert_eq!(call(&["rules", "9", "8"]).0, 2);
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&[]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(
            call(&["keygen", "--mode", "W9", "--image", "x", "--out", "y"]).0,
            2
        );
        assert_eq!(call(&["--help"]).0, 0);
    }

    #[test]
    fn missing_input_is_one_line() {
        let (code, _, err) = call(&[
            "keygen",
            "--mode",
            "W1",
            "--seed",
            "1",
            "--image",
            "/nonexistent.pgm",
            "--out",
            "/tmp/k",
        ]);
        assert_eq!(code, 2);
        assert_eq!(err.lines().count(), 1);
        assert!(err.contains("/nonexistent.pgm"));
    }
}
