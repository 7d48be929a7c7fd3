//! Command-line surface: construct families, verify frames, take
//! complements and direct sums, evaluate Gauss sums, build conference
//! matrices, and synthesize frames from signature matrices. Every run
//! writes JSON artifacts plus a manifest with SHA-256 digests of its inputs
//! and outputs.
//!
//! Exit codes: 0 success, 2 parameter/input validation failure, 3 the
//! constructed object failed its family's mathematical claim.

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use harmonic_frames::abelian_group::FiniteAbelianGroup;
use harmonic_frames::conference::{frame_from_signature, paley_conference, SignatureMatrix};
use harmonic_frames::constructions::{ClaimedClass, Family, FamilySpec};
use harmonic_frames::finite_field::{FiniteField, Parity};
use harmonic_frames::fusion_frame::Certificate;
use harmonic_frames::harmonic::check_block_circulant;
use harmonic_frames::FusionFrame;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser)]
#[command(
    name = "hframes",
    version,
    about = "Construct and certify equichordal / equi-isoclinic tight fusion frames"
)]
struct Cli {
    /// Numerical tolerance used by every check and recorded in certificates
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Directory for output artifacts
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
    /// Output format; `csv` additionally exports the synthesis matrix as
    /// real/imaginary CSV files
    #[arg(long, global = true, default_value = "json", value_parser = ["json", "csv"])]
    format: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a named family, certify it, and write frame/gen/certificate
    Construct(ConstructArgs),
    /// Certify a frame file; classification goes in the certificate, not the
    /// exit code
    Verify(VerifyArgs),
    /// Naimark or spatial complement of a tight frame
    Complement(ComplementArgs),
    /// Direct sum of frames with matching subspace counts and frame constants
    Directsum(DirectsumArgs),
    /// Evaluate one Gauss sum over GF(p^k)
    GaussSum(GaussSumArgs),
    /// Paley-type complex conference matrix of size Q+1 and its core
    Conference(ConferenceArgs),
    /// Frame synthesis from a signature-matrix core
    Signature(SignatureArgs),
}

#[derive(Args, Serialize)]
struct ConstructArgs {
    /// One of: eitff-qm1-q-2, ectff-qm1-q-r, eitff-q-q-2, ectff-q-q-r,
    /// eitff-11-11-3, harmonic-etf, example-4-5-2
    #[arg(long)]
    family: Option<String>,
    /// Field characteristic
    #[arg(long)]
    p: Option<u32>,
    /// Extension degree (default 1)
    #[arg(long)]
    k: Option<u32>,
    /// Prime power Q = p^k, as an alternative to --p/--k
    #[arg(long)]
    q: Option<u32>,
    /// Subspace rank for the ectff families
    #[arg(long)]
    r: Option<usize>,
    /// Comma-separated multiplicative-character exponents (first must be 0)
    #[arg(long)]
    chi: Option<String>,
    /// Comma-separated subset indices for harmonic-etf
    #[arg(long)]
    diff_set: Option<String>,
    /// Comma-separated cyclic factors for harmonic-etf
    #[arg(long)]
    group: Option<String>,
    /// Rotate the rank-3 GF(11) family into its real form
    #[arg(long)]
    realify: bool,
    /// Load the family specification from a JSON file instead of flags
    #[arg(long)]
    #[serde(skip)]
    spec: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    /// Attach a group tag (comma-separated cyclic factors) and report
    /// block-circulant structure
    #[arg(long)]
    group: Option<String>,
}

#[derive(Args, Serialize)]
struct ComplementArgs {
    /// naimark | spatial
    #[arg(long)]
    kind: String,
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args, Serialize)]
struct DirectsumArgs {
    #[arg(long, num_args = 1.., required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Args, Serialize)]
struct GaussSumArgs {
    #[arg(long)]
    p: u32,
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Multiplicative-character exponent m (character of the fixed generator)
    #[arg(long)]
    chi: u32,
    /// Additive-character label y, as an element index
    #[arg(long)]
    gamma: u32,
}

#[derive(Args, Serialize)]
struct ConferenceArgs {
    #[arg(long)]
    p: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    q: Option<u32>,
    /// Required symmetry: +1 (symmetric) or -1 (skew-symmetric)
    #[arg(long, allow_hyphen_values = true)]
    eps: String,
}

#[derive(Args, Serialize)]
struct SignatureArgs {
    /// Core JSON file ({"matrix": ..., "epsilon": ±1})
    #[arg(long = "from-core")]
    from_core: PathBuf,
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(err: impl std::fmt::Display) -> Failure {
    Failure { code: 2, message: err.to_string() }
}

fn claim_failure(message: String) -> Failure {
    Failure { code: 3, message }
}

fn main() {
    let cli = Cli::parse();
    if let Err(failure) = run(cli) {
        eprintln!("error: {}", failure.message);
        std::process::exit(failure.code);
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let started = Instant::now();
    std::fs::create_dir_all(&cli.out_dir)
        .with_context(|| format!("creating {}", cli.out_dir.display()))
        .map_err(usage)?;
    let mut manifest = Manifest::new(&cli, started);
    let result = match &cli.command {
        Command::Construct(args) => cmd_construct(&cli, args, &mut manifest),
        Command::Verify(args) => cmd_verify(&cli, args, &mut manifest),
        Command::Complement(args) => cmd_complement(&cli, args, &mut manifest),
        Command::Directsum(args) => cmd_directsum(&cli, args, &mut manifest),
        Command::GaussSum(args) => cmd_gauss_sum(&cli, args, &mut manifest),
        Command::Conference(args) => cmd_conference(&cli, args, &mut manifest),
        Command::Signature(args) => cmd_signature(&cli, args, &mut manifest),
    };
    // the manifest is written on success and on mathematical claim failures;
    // validation failures leave no artifacts to describe
    match result {
        Ok(()) => manifest.finish(),
        Err(failure) if failure.code == 3 => {
            manifest.finish()?;
            Err(failure)
        }
        Err(failure) => Err(failure),
    }
}

#[derive(Serialize)]
struct FileDigest {
    path: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest {
    command: String,
    parameters: serde_json::Value,
    tool_version: String,
    tolerance: f64,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
    wall_time_ms: u64,
    #[serde(skip)]
    started: Instant,
    #[serde(skip)]
    out_dir: PathBuf,
}

impl Manifest {
    fn new(cli: &Cli, started: Instant) -> Self {
        let (command, parameters) = match &cli.command {
            Command::Construct(a) => ("construct", serde_json::to_value(a).unwrap()),
            Command::Verify(a) => ("verify", serde_json::to_value(a).unwrap()),
            Command::Complement(a) => ("complement", serde_json::to_value(a).unwrap()),
            Command::Directsum(a) => ("directsum", serde_json::to_value(a).unwrap()),
            Command::GaussSum(a) => ("gauss-sum", serde_json::to_value(a).unwrap()),
            Command::Conference(a) => ("conference", serde_json::to_value(a).unwrap()),
            Command::Signature(a) => ("signature", serde_json::to_value(a).unwrap()),
        };
        Self {
            command: command.to_string(),
            parameters,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            tolerance: cli.tol,
            inputs: Vec::new(),
            outputs: Vec::new(),
            wall_time_ms: 0,
            started,
            out_dir: cli.out_dir.clone(),
        }
    }

    fn record_input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.push(FileDigest { path: path.display().to_string(), sha256: sha256_hex(bytes) });
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, Failure> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(usage)?;
        bytes.push(b'\n');
        self.write_bytes(name, &bytes)
    }

    fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, Failure> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, bytes)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(usage)?;
        self.outputs.push(FileDigest { path: path.display().to_string(), sha256: sha256_hex(bytes) });
        Ok(path)
    }

    fn finish(&mut self) -> Result<(), Failure> {
        self.wall_time_ms = self.started.elapsed().as_millis() as u64;
        let mut bytes = serde_json::to_vec_pretty(&self).map_err(usage)?;
        bytes.push(b'\n');
        let path = self.out_dir.join("manifest.json");
        std::fs::write(&path, bytes)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(usage)?;
        Ok(())
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for byte in digest {
        let _ = write!(out, "{byte:02x}");
    }
    out
}

fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>, Failure> {
    raw.split(',')
        .map(|tok| tok.trim().parse::<T>().map_err(|_| usage(format!("invalid {what}: {tok:?}"))))
        .collect()
}

fn factor_prime_power(q: u32) -> Result<(u32, u32), Failure> {
    if q < 2 {
        return Err(usage(format!("{q} is not a prime power")));
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut k = 0;
            let mut rem = q;
            while rem.is_multiple_of(p) {
                rem /= p;
                k += 1;
            }
            if rem != 1 {
                return Err(usage(format!("{q} is not a prime power")));
            }
            return Ok((p, k));
        }
        p += 1;
    }
    Ok((q, 1))
}

fn resolve_field_params(
    p: Option<u32>,
    k: Option<u32>,
    q: Option<u32>,
) -> Result<(Option<u32>, Option<u32>), Failure> {
    match (p, q) {
        (Some(_), Some(_)) => Err(usage("give either --p/--k or --q, not both")),
        (None, Some(q)) => {
            let (p, k) = factor_prime_power(q)?;
            Ok((Some(p), Some(k)))
        }
        _ => Ok((p, k)),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(
    path: &Path,
    manifest: &mut Manifest,
) -> Result<T, Failure> {
    let bytes = std::fs::read(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(usage)?;
    manifest.record_input(path, &bytes);
    serde_json::from_slice(&bytes)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(usage)
}

fn read_frame(path: &Path, manifest: &mut Manifest) -> Result<FusionFrame, Failure> {
    // frame deserialization validates shapes and the group tag
    read_json(path, manifest)
}

fn write_frame_artifacts(
    cli: &Cli,
    manifest: &mut Manifest,
    frame: &FusionFrame,
    certificate: &Certificate,
) -> Result<(), Failure> {
    manifest.write_json("frame.json", frame)?;
    manifest.write_json("certificate.json", certificate)?;
    if cli.format == "csv" {
        let synthesis = frame.synthesis();
        for (name, real_part) in [("frame_re.csv", true), ("frame_im.csv", false)] {
            let mut text = String::new();
            for i in 0..synthesis.rows() {
                let row: Vec<String> = (0..synthesis.cols())
                    .map(|j| {
                        let z = synthesis[(i, j)];
                        format!("{}", if real_part { z.re } else { z.im })
                    })
                    .collect();
                text.push_str(&row.join(","));
                text.push('\n');
            }
            manifest.write_bytes(name, text.as_bytes())?;
        }
    }
    Ok(())
}

fn summarize(certificate: &Certificate) -> String {
    format!(
        "D={} N={} ranks={:?} tight={} EC={:?} EI={:?} real={}",
        certificate.ambient_dim,
        certificate.num_subspaces,
        certificate.ranks,
        certificate.is_tight,
        certificate.is_equichordal,
        certificate.is_equiisoclinic,
        certificate.is_real,
    )
}

fn cmd_construct(cli: &Cli, args: &ConstructArgs, manifest: &mut Manifest) -> Result<(), Failure> {
    let spec: FamilySpec = if let Some(path) = &args.spec {
        read_json(path, manifest)?
    } else {
        let family_name =
            args.family.as_deref().ok_or_else(|| usage("--family (or --spec) is required"))?;
        let family: Family = serde_json::from_value(serde_json::Value::String(family_name.into()))
            .map_err(|_| usage(format!("unknown family {family_name:?}")))?;
        let (p, k) = resolve_field_params(args.p, args.k, args.q)?;
        FamilySpec {
            family,
            p,
            k,
            r: args.r,
            char_indices: args.chi.as_deref().map(|s| parse_list(s, "character index")).transpose()?,
            diff_set: args.diff_set.as_deref().map(|s| parse_list(s, "subset index")).transpose()?,
            group_factors: args.group.as_deref().map(|s| parse_list(s, "group factor")).transpose()?,
            realify: args.realify,
        }
    };

    let build = spec.build().map_err(usage)?;
    let certificate = build.frame.certify(cli.tol);

    manifest.write_json("gen.json", &build.generator)?;
    write_frame_artifacts(cli, manifest, &build.frame, &certificate)?;
    println!("constructed: {}", summarize(&certificate));

    let satisfied = match build.claim {
        ClaimedClass::EquiIsoclinic => certificate.is_equiisoclinic == Some(true),
        ClaimedClass::Equichordal => certificate.is_equichordal == Some(true),
        ClaimedClass::Tight => certificate.is_tight,
    } && (!build.claim_real || certificate.is_real);
    if !satisfied {
        return Err(claim_failure(format!(
            "constructed frame does not certify its claim ({:?}{}); see certificate.json",
            build.claim,
            if build.claim_real { " + real" } else { "" }
        )));
    }
    Ok(())
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs, manifest: &mut Manifest) -> Result<(), Failure> {
    let mut frame = read_frame(&args.input, manifest)?;
    if let Some(group_spec) = &args.group {
        let factors: Vec<u32> = parse_list(group_spec, "group factor")?;
        let group = FiniteAbelianGroup::new(factors).map_err(usage)?;
        frame = frame.with_group(Some(group)).map_err(usage)?;
    }
    let certificate = frame.certify(cli.tol);
    manifest.write_json("certificate.json", &certificate)?;
    println!("verified: {}", summarize(&certificate));
    if frame.group().is_some() {
        match check_block_circulant(&frame, cli.tol) {
            Ok(report) => println!(
                "block-circulant: {} (max deviation {:.3e})",
                report.is_block_circulant, report.max_deviation
            ),
            Err(err) => println!("block-circulant: not applicable ({err})"),
        }
    }
    Ok(())
}

fn cmd_complement(cli: &Cli, args: &ComplementArgs, manifest: &mut Manifest) -> Result<(), Failure> {
    let frame = read_frame(&args.input, manifest)?;
    let complement = match args.kind.as_str() {
        "naimark" => frame.naimark_complement(cli.tol).map_err(usage)?,
        "spatial" => frame.spatial_complement(cli.tol).map_err(usage)?,
        other => return Err(usage(format!("unknown complement kind {other:?}"))),
    };
    let certificate = complement.certify(cli.tol);
    write_frame_artifacts(cli, manifest, &complement, &certificate)?;
    println!("complement ({}): {}", args.kind, summarize(&certificate));
    Ok(())
}

fn cmd_directsum(cli: &Cli, args: &DirectsumArgs, manifest: &mut Manifest) -> Result<(), Failure> {
    let frames: Vec<FusionFrame> = args
        .inputs
        .iter()
        .map(|path| read_frame(path, manifest))
        .collect::<Result<_, _>>()?;
    let sum = FusionFrame::direct_sum(&frames).map_err(usage)?;
    let certificate = sum.certify(cli.tol);
    write_frame_artifacts(cli, manifest, &sum, &certificate)?;
    println!("direct sum: {}", summarize(&certificate));
    Ok(())
}

#[derive(Serialize)]
struct GaussSumRecord {
    p: u32,
    k: u32,
    chi: u32,
    gamma: u32,
    re: f64,
    im: f64,
}

fn cmd_gauss_sum(_cli: &Cli, args: &GaussSumArgs, manifest: &mut Manifest) -> Result<(), Failure> {
    let field = FiniteField::build(args.p, args.k).map_err(usage)?;
    if args.gamma >= field.q() {
        return Err(usage(format!("--gamma must index a field element below {}", field.q())));
    }
    let gamma = field.add_char(field.element_at(args.gamma));
    let chi = field.mult_char(args.chi);
    let value = field.gauss_sum(&gamma, &chi).map_err(usage)?;
    let record = GaussSumRecord {
        p: args.p,
        k: args.k,
        chi: args.chi,
        gamma: args.gamma,
        re: value.re,
        im: value.im,
    };
    manifest.write_json("gauss_sum.json", &record)?;
    println!("gauss sum = {:.12}{:+.12}i", value.re, value.im);
    Ok(())
}

fn cmd_conference(cli: &Cli, args: &ConferenceArgs, manifest: &mut Manifest) -> Result<(), Failure> {
    let (p, k) = resolve_field_params(args.p, args.k, args.q)?;
    let p = p.ok_or_else(|| usage("--p or --q is required"))?;
    let field = FiniteField::build(p, k.unwrap_or(1)).map_err(usage)?;
    let parity = match args.eps.as_str() {
        "+1" | "1" => Parity::Even,
        "-1" => Parity::Odd,
        other => return Err(usage(format!("--eps must be +1 or -1, got {other:?}"))),
    };
    let index = field.smallest_char_index_with_parity(parity).map_err(usage)?;
    let chi = field.mult_char(index);
    let conference = paley_conference(&field, &chi).map_err(usage)?;
    conference.validate(cli.tol).map_err(usage)?;
    let eps = conference.epsilon.expect("tagged by construction");
    let core = conference.extract_core(eps, cli.tol).map_err(usage)?;
    core.verify(cli.tol).map_err(usage)?;
    manifest.write_json("conference.json", &conference)?;
    manifest.write_json("core.json", &core)?;
    println!(
        "conference matrix: size {} eps {} (character index {})",
        conference.size(),
        eps,
        index
    );
    Ok(())
}

fn cmd_signature(cli: &Cli, args: &SignatureArgs, manifest: &mut Manifest) -> Result<(), Failure> {
    let core: harmonic_frames::conference::Core = read_json(&args.from_core, manifest)?;
    core.verify(cli.tol).map_err(usage)?;
    let signature: SignatureMatrix =
        harmonic_frames::conference::signature_from_core(&core).map_err(usage)?;
    let built = frame_from_signature(&signature, cli.tol).map_err(usage)?;
    let certificate = built.frame.certify(cli.tol);
    manifest.write_json("signature.json", &signature)?;
    write_frame_artifacts(cli, manifest, &built.frame, &certificate)?;
    println!("signature frame: {}", summarize(&certificate));
    Ok(())
}
