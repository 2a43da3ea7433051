//! File loading, coefficient resolution, output writing, and run manifests.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};
use ternlut::act::ActivationVector;
use ternlut::cost::{CoeffFile, CostCoefficients, DEFAULT_COEFFS_FP16, DEFAULT_COEFFS_INT8};
use ternlut::encode::{decode_matrix, EncodedWeightStream, STREAM_MAGIC};
use ternlut::error::{Error, Result};
use ternlut::tile::ActivationType;
use ternlut::trit::TernaryMatrix;

/// Loads a weight matrix from either the plain-text format or a TLUT stream
/// (sniffed by magic).
pub fn load_matrix(path: &Path) -> Result<TernaryMatrix> {
    let bytes = fs::read(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    if bytes.len() >= 4 && bytes[0..4] == STREAM_MAGIC {
        decode_matrix(&EncodedWeightStream::from_bytes(&bytes)?)
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|_| Error::Parse(format!("{}: not valid UTF-8 matrix text", path.display())))?;
        TernaryMatrix::parse_text(&text)
    }
}

/// Loads activations: `.bin` extension means raw little-endian words,
/// anything else is decimal CSV.
pub fn load_activations(path: &Path, act: ActivationType) -> Result<ActivationVector> {
    let bytes = fs::read(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    if path.extension().is_some_and(|e| e == "bin") {
        ActivationVector::parse_raw(&bytes, act)
    } else {
        let text = String::from_utf8(bytes)
            .map_err(|_| Error::Parse(format!("{}: not valid UTF-8 activation text", path.display())))?;
        ActivationVector::parse_csv(&text, act)
    }
}

/// Resolved coefficient source: the text that was parsed plus where it came
/// from, so manifests can record a digest.
pub struct CoeffSource {
    pub coeffs: CostCoefficients,
    pub origin: String,
    pub digest: String,
}

/// Resolves `--coeffs`: a path, one of the builtin names (`coeffs-int8`,
/// `coeffs-fp16`), or unset (builtin matching the activation type).
pub fn resolve_coeffs(arg: Option<&str>, act: ActivationType) -> Result<CoeffSource> {
    let (text, origin) = match arg {
        None => match act {
            ActivationType::Int8 => (DEFAULT_COEFFS_INT8.to_string(), "builtin:coeffs-int8".to_string()),
            ActivationType::Fp16 => (DEFAULT_COEFFS_FP16.to_string(), "builtin:coeffs-fp16".to_string()),
        },
        Some("coeffs-int8") => (DEFAULT_COEFFS_INT8.to_string(), "builtin:coeffs-int8".to_string()),
        Some("coeffs-fp16") => (DEFAULT_COEFFS_FP16.to_string(), "builtin:coeffs-fp16".to_string()),
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{path}: {e}"))))?;
            (text, path.to_string())
        }
    };
    let digest = {
        let bytes = Sha256::digest(text.as_bytes());
        let hex: String = bytes.iter().map(|b| format!("{b:02x}")).collect();
        format!("sha256:{hex}")
    };
    let coeffs = CoeffFile::parse(&text)?.for_act(act)?;
    Ok(CoeffSource { coeffs, origin, digest })
}

/// Run manifest accompanying every file output, for reproducibility.
#[derive(Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub argv: Vec<String>,
    pub seed: u64,
    pub coeffs_origin: Option<String>,
    pub coeffs_digest: Option<String>,
    pub timestamp_unix: u64,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, coeffs: Option<&CoeffSource>) -> RunManifest {
        RunManifest {
            tool: "ternlut",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            argv: std::env::args().collect(),
            seed,
            coeffs_origin: coeffs.map(|c| c.origin.clone()),
            coeffs_digest: coeffs.map(|c| c.digest.clone()),
            timestamp_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

/// Writes `data` to `path` (or stdout when `None`). File outputs get a
/// `<path>.manifest` JSON sidecar; the data file itself stays byte-identical
/// across reruns of the same command.
pub fn write_output(path: Option<&PathBuf>, data: &[u8], manifest: &RunManifest) -> Result<()> {
    match path {
        None => {
            use std::io::Write;
            std::io::stdout().write_all(data)?;
            Ok(())
        }
        Some(path) => {
            fs::write(path, data)?;
            let mut mpath = path.as_os_str().to_owned();
            mpath.push(".manifest");
            let json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
            fs::write(PathBuf::from(mpath), json)?;
            Ok(())
        }
    }
}

/// Formats an f64 for CSV: shortest round-trip representation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}
