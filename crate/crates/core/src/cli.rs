//! Command-line front end. Every command prints exactly one JSON-lines stats
//! record on stdout (except `query`, which prints `bit hops=l`) and a human
//! summary on stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::compact::{make_schedule, Accounting, BitsizeReport, CompactOracle, LayerBits};
use crate::geom::{HalfOpenRect, PersistentKTree, PointLocator};
use crate::matrix::io::{format_decomposition, format_matrix, parse_decomposition};
use crate::matrix::Rect;
use crate::subtypes::TypesOracle;
use crate::twinorder::{extract_decomposition, generate_with, verify_sequence, GenConfig};
use crate::zoneapprox::{zone_approximation, CoverKind};
use crate::RectangleDecomposition;

#[derive(Debug, Parser)]
#[command(name = "twinmat", version, about = "Compact entry oracles for binary matrices of bounded twin-width")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AccountingArg {
    Packed,
    Paper,
}

impl From<AccountingArg> for Accounting {
    fn from(a: AccountingArg) -> Self {
        match a {
            AccountingArg::Packed => Accounting::Packed,
            AccountingArg::Paper => Accounting::Paper,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a random matrix with a twin-width witness; writes
    /// `<out>.dec`, `<out>.mat` and `<out>.seq`.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.5)]
        divergence: f64,
        #[arg(long, default_value = "twinmat")]
        out: PathBuf,
    },
    /// Build a compact oracle from a decomposition file.
    Build {
        dec: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, value_enum, default_value_t = AccountingArg::Packed)]
        accounting: AccountingArg,
        /// Where to write the serialized oracle.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print entry (i, j) (1-based) and the number of hops.
    Query { oracle: PathBuf, i: usize, j: usize },
    /// Compare an oracle against a decomposition on every entry; exit code 1
    /// on any mismatch.
    Verify { oracle: PathBuf, dec: PathBuf },
    /// Query latency over random entries.
    Bench {
        oracle: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        queries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Point location directly over the decomposition with a persistent
    /// k-ary tree of depth ceil(2/epsilon)+1.
    AppendixBench {
        dec: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Tree arity; defaults to the smallest k with k^h >= n.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        queries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the zone cover of the s-regular division.
    CoverDump {
        dec: PathBuf,
        /// Granularity; defaults to the first layer below the root.
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
    },
}

#[derive(Debug, Serialize)]
pub struct GenFiles {
    pub decomposition: String,
    pub matrix: String,
    pub sequence: String,
}

#[derive(Debug, Serialize)]
pub struct GenStats {
    pub cmd: &'static str,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub divergence: f64,
    pub rects: usize,
    pub bound: usize,
    pub witness_error: usize,
    pub files: GenFiles,
}

#[derive(Debug, Serialize)]
pub struct BuildStats {
    pub cmd: &'static str,
    pub n: usize,
    pub n_padded: usize,
    pub beta: f64,
    pub depth: usize,
    pub m: Vec<usize>,
    pub representatives: Vec<usize>,
    pub objects: Vec<usize>,
    pub accounting: Accounting,
    pub layers: Vec<LayerBits>,
    pub bottom_bits: u64,
    pub total_bits: u64,
    pub bits_per_n: f64,
    pub serialized_bytes: usize,
    pub build_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct VerifyStats {
    pub cmd: &'static str,
    pub n: usize,
    pub checked: u64,
    pub mismatches: u64,
    pub first_mismatch: Option<(usize, usize)>,
    pub ok: bool,
}

#[derive(Debug, Serialize)]
pub struct BenchStats {
    pub cmd: &'static str,
    pub n: usize,
    pub depth: usize,
    pub queries: usize,
    pub threads: usize,
    pub seed: u64,
    pub ones: usize,
    pub p50_ns: u64,
    pub p99_ns: u64,
    pub mean_ns: f64,
}

#[derive(Debug, Serialize)]
pub struct AppendixStats {
    pub cmd: &'static str,
    pub n: usize,
    pub rects: usize,
    pub epsilon: f64,
    pub k: usize,
    pub h: usize,
    pub measured_depth: usize,
    pub nodes: usize,
    pub pool_bits: usize,
    pub total_bits: usize,
    pub bits_per_n: f64,
    pub queries: usize,
    pub mismatches: usize,
    pub p50_ns: u64,
    pub p99_ns: u64,
    pub build_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct CoverEntry {
    pub rect: Rect,
    pub kind: CoverKind,
}

#[derive(Debug, Serialize)]
pub struct CoverStats {
    pub cmd: &'static str,
    pub n: usize,
    pub s: usize,
    pub m: usize,
    pub counts: CoverCounts,
    pub elements: Vec<CoverEntry>,
}

#[derive(Debug, Default, Serialize)]
pub struct CoverCounts {
    pub mixed: usize,
    pub vstrip: usize,
    pub hstrip: usize,
    pub const0: usize,
    pub const1: usize,
}

fn emit<T: Serialize>(record: &T) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string(record)?);
    Ok(())
}

fn read_dec(path: &Path) -> anyhow::Result<RectangleDecomposition> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_decomposition(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_oracle(path: &Path) -> anyhow::Result<CompactOracle> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    CompactOracle::from_bytes(&bytes).with_context(|| format!("loading {}", path.display()))
}

fn with_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Nearest-rank percentile of sorted samples.
fn percentile(sorted: &[u64], p: f64) -> u64 {
    if sorted.is_empty() {
        return 0;
    }
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Parses arguments and runs a command; returns the process exit code.
pub fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Gen { n, d, seed, divergence, out } => cmd_gen(n, d, seed, divergence, &out),
        Command::Build { dec, beta, accounting, out } => cmd_build(&dec, beta, accounting.into(), out.as_deref()),
        Command::Query { oracle, i, j } => cmd_query(&oracle, i, j),
        Command::Verify { oracle, dec } => cmd_verify(&oracle, &dec),
        Command::Bench { oracle, queries, seed, threads } => cmd_bench(&oracle, queries, seed, threads),
        Command::AppendixBench { dec, epsilon, k, queries, seed } => cmd_appendix_bench(&dec, epsilon, k, queries, seed),
        Command::CoverDump { dec, s, beta } => cmd_cover_dump(&dec, s, beta),
    }
}

fn cmd_gen(n: usize, d: usize, seed: u64, divergence: f64, out: &Path) -> anyhow::Result<i32> {
    let g = generate_with(n, d, seed, &GenConfig { divergence })?;
    let dec = extract_decomposition(&g.matrix, &g.sequence)?;
    let check = verify_sequence(&g.matrix, &g.sequence, d)?;
    if !check.ok {
        bail!("generated witness has error {} > {d}", check.max_error);
    }
    let bound = d * (2 * n - 2) + 1;
    let files = GenFiles {
        decomposition: with_ext(out, "dec").display().to_string(),
        matrix: with_ext(out, "mat").display().to_string(),
        sequence: with_ext(out, "seq").display().to_string(),
    };
    fs::write(&files.decomposition, format_decomposition(&dec)).with_context(|| format!("writing {}", files.decomposition))?;
    fs::write(&files.matrix, format_matrix(&g.matrix)).with_context(|| format!("writing {}", files.matrix))?;
    fs::write(&files.sequence, g.sequence.to_text()).with_context(|| format!("writing {}", files.sequence))?;
    eprintln!("n={n} d={d} seed={seed}: {} rectangles (bound {bound}), witness error {}", dec.len(), check.max_error);
    emit(&GenStats { cmd: "gen", n, d, seed, divergence, rects: dec.len(), bound, witness_error: check.max_error, files })?;
    Ok(0)
}

fn build_stats(
    oracle: &CompactOracle,
    report: crate::compact::BuildReport,
    beta: f64,
    acc: Accounting,
    bytes: usize,
    elapsed: Duration,
) -> BuildStats {
    let BitsizeReport { accounting, layers, bottom_bits, total_bits, bits_per_n } = oracle.bitsize(acc);
    BuildStats {
        cmd: "build",
        n: oracle.n(),
        n_padded: oracle.n_padded(),
        beta,
        depth: oracle.depth(),
        m: oracle.schedule().m.clone(),
        representatives: report.representatives,
        objects: report.objects,
        accounting,
        layers,
        bottom_bits,
        total_bits,
        bits_per_n,
        serialized_bytes: bytes,
        build_ms: ms(elapsed),
    }
}

fn cmd_build(dec_path: &Path, beta: f64, acc: Accounting, out: Option<&Path>) -> anyhow::Result<i32> {
    let dec = read_dec(dec_path)?;
    let start = Instant::now();
    let (oracle, report) = CompactOracle::build_with_report(&dec, beta)?;
    let elapsed = start.elapsed();
    let bytes = oracle.to_bytes();
    if let Some(out) = out {
        fs::write(out, &bytes).with_context(|| format!("writing {}", out.display()))?;
    }
    let stats = build_stats(&oracle, report, beta, acc, bytes.len(), elapsed);
    eprintln!(
        "n={} (padded {}), l={}, m={:?}, |F|={:?}, {} bits ({:.3} bits/n, {} accounting), {:.1} ms",
        stats.n,
        stats.n_padded,
        stats.depth,
        stats.m,
        stats.objects,
        stats.total_bits,
        stats.bits_per_n,
        serde_json::to_value(acc)?.as_str().unwrap_or_default(),
        stats.build_ms
    );
    emit(&stats)?;
    Ok(0)
}

fn cmd_query(path: &Path, i: usize, j: usize) -> anyhow::Result<i32> {
    let oracle = read_oracle(path)?;
    let (bit, hops) = oracle.query_with_hops(i, j)?;
    println!("{} hops={hops}", u8::from(bit));
    Ok(0)
}

fn cmd_verify(oracle_path: &Path, dec_path: &Path) -> anyhow::Result<i32> {
    let oracle = read_oracle(oracle_path)?;
    let dec = read_dec(dec_path)?;
    let n = dec.n();
    let mut stats = VerifyStats { cmd: "verify", n, checked: 0, mismatches: 0, first_mismatch: None, ok: false };
    if oracle.n() != n {
        eprintln!("order mismatch: oracle n={}, decomposition n={n}", oracle.n());
        stats.mismatches = 1;
        emit(&stats)?;
        return Ok(1);
    }
    let m = dec.realize();
    for i in 1..=n {
        for j in 1..=n {
            if oracle.query(i, j)? != m.get(i, j) {
                stats.mismatches += 1;
                stats.first_mismatch.get_or_insert((i, j));
            }
        }
    }
    stats.checked = (n * n) as u64;
    stats.ok = stats.mismatches == 0;
    eprintln!("{} of {} entries differ", stats.mismatches, stats.checked);
    emit(&stats)?;
    Ok(if stats.ok { 0 } else { 1 })
}

fn random_points(n: usize, count: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (rng.gen_range(1..=n), rng.gen_range(1..=n))).collect()
}

fn cmd_bench(path: &Path, queries: usize, seed: u64, threads: usize) -> anyhow::Result<i32> {
    if threads == 0 {
        bail!("--threads must be positive");
    }
    let oracle = read_oracle(path)?;
    let points = random_points(oracle.n(), queries, seed);
    let chunk = queries.div_ceil(threads).max(1);
    let results: Vec<(Vec<u64>, usize)> = std::thread::scope(|scope| {
        let handles: Vec<_> = points
            .chunks(chunk)
            .map(|part| {
                let oracle = &oracle;
                scope.spawn(move || {
                    let mut lat = Vec::with_capacity(part.len());
                    let mut ones = 0;
                    for &(i, j) in part {
                        let t = Instant::now();
                        let b = oracle.query(i, j).expect("point in range");
                        lat.push(t.elapsed().as_nanos() as u64);
                        ones += usize::from(b);
                    }
                    (lat, ones)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("bench worker panicked")).collect()
    });
    let ones = results.iter().map(|r| r.1).sum();
    let mut lat: Vec<u64> = results.into_iter().flat_map(|r| r.0).collect();
    lat.sort_unstable();
    let mean_ns = if lat.is_empty() { 0.0 } else { lat.iter().sum::<u64>() as f64 / lat.len() as f64 };
    let stats = BenchStats {
        cmd: "bench",
        n: oracle.n(),
        depth: oracle.depth(),
        queries,
        threads,
        seed,
        ones,
        p50_ns: percentile(&lat, 50.0),
        p99_ns: percentile(&lat, 99.0),
        mean_ns,
    };
    eprintln!("{queries} queries on {threads} threads: p50 {} ns, p99 {} ns, mean {mean_ns:.1} ns", stats.p50_ns, stats.p99_ns);
    emit(&stats)?;
    Ok(0)
}

fn cmd_appendix_bench(dec_path: &Path, epsilon: f64, k: Option<usize>, queries: usize, seed: u64) -> anyhow::Result<i32> {
    let dec = read_dec(dec_path)?;
    let n = dec.n();
    let h = PersistentKTree::depth_for_epsilon(epsilon)?;
    let rects: Vec<(HalfOpenRect, u32)> =
        dec.rects().iter().enumerate().map(|(idx, r)| (HalfOpenRect::new(r.c1 - 1, r.c2, r.r1 - 1, r.r2), idx as u32)).collect();
    let start = Instant::now();
    let locator = match k {
        Some(k) => PointLocator::build_with_arity(n, &rects, k, h)?,
        None => PointLocator::build(n, &rects, h)?,
    };
    let build_ms = ms(start.elapsed());
    let matrix = dec.realize();
    let mut lat = Vec::with_capacity(queries);
    let (mut mismatches, mut measured_depth) = (0, 0);
    for (i, j) in random_points(n, queries, seed) {
        let t = Instant::now();
        let (hit, path) = locator.locate_with_path(j - 1, i - 1)?;
        lat.push(t.elapsed().as_nanos() as u64);
        measured_depth = measured_depth.max(path - 1);
        mismatches += usize::from(hit.is_some() != matrix.get(i, j));
    }
    lat.sort_unstable();
    let tree = locator.tree();
    let stats = AppendixStats {
        cmd: "appendix-bench",
        n,
        rects: dec.len(),
        epsilon,
        k: tree.k(),
        h: tree.h(),
        measured_depth,
        nodes: tree.node_count(),
        pool_bits: tree.pool_bits(PersistentKTree::binary_depth(dec.len() + 1)),
        total_bits: locator.bits(),
        bits_per_n: locator.bits() as f64 / n as f64,
        queries,
        mismatches,
        p50_ns: percentile(&lat, 50.0),
        p99_ns: percentile(&lat, 99.0),
        build_ms,
    };
    eprintln!(
        "k={} h={} (measured {}), {} nodes, {} pool bits, {} mismatches in {queries} queries",
        stats.k, stats.h, stats.measured_depth, stats.nodes, stats.pool_bits, mismatches
    );
    emit(&stats)?;
    Ok(if mismatches == 0 { 0 } else { 1 })
}

fn cmd_cover_dump(dec_path: &Path, s: Option<usize>, beta: f64) -> anyhow::Result<i32> {
    let dec = read_dec(dec_path)?;
    let n = dec.n().max(2).next_power_of_two();
    let s = match s {
        Some(s) => s,
        None => {
            let schedule = make_schedule(n, beta)?;
            schedule.m.get(1).copied().unwrap_or(n)
        }
    };
    let types = TypesOracle::build(&dec.padded(n)?)?;
    let cover = zone_approximation(&types, s)?;
    let mut counts = CoverCounts::default();
    let elements: Vec<CoverEntry> = cover
        .elements()
        .iter()
        .map(|e| {
            *match e.kind {
                CoverKind::MixedZone => &mut counts.mixed,
                CoverKind::VStrip => &mut counts.vstrip,
                CoverKind::HStrip => &mut counts.hstrip,
                CoverKind::Constant0 => &mut counts.const0,
                CoverKind::Constant1 => &mut counts.const1,
            } += 1;
            CoverEntry { rect: e.rect, kind: e.kind }
        })
        .collect();
    for e in &elements {
        eprintln!("blocks {} {}", e.rect, e.kind);
    }
    eprintln!("{} elements over a {}x{} block grid (s={s})", elements.len(), cover.m(), cover.m());
    emit(&CoverStats { cmd: "cover-dump", n, s, m: cover.m(), counts, elements })?;
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn percentiles() {
        let v: Vec<u64> = (1..=100).collect();
        assert_eq!(percentile(&v, 50.0), 50);
        assert_eq!(percentile(&v, 99.0), 99);
        assert_eq!(percentile(&[7], 99.0), 7);
        assert_eq!(percentile(&[], 50.0), 0);
    }

    #[test]
    fn extension_appends() {
        assert_eq!(with_ext(Path::new("a/b.x"), "dec"), PathBuf::from("a/b.x.dec"));
    }

    #[test]
    fn cli_parses() {
        let cli = Cli::try_parse_from(["twinmat", "build", "x.dec", "--beta", "0.5", "--accounting", "paper", "--out", "o"]).unwrap();
        match cli.command {
            Command::Build { beta, accounting, out, .. } => {
                assert_eq!(beta, 0.5);
                assert_eq!(accounting, AccountingArg::Paper);
                assert_eq!(out, Some(PathBuf::from("o")));
            }
            other => panic!("{other:?}"),
        }
        assert!(Cli::try_parse_from(["twinmat", "build", "x", "--accounting", "words"]).is_err());
    }
}
