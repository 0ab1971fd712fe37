//! File dispatch by extension, and the stack manifest.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use gmkit::exposure::{linearize_ldr, ExposureStack, Frame};
use gmkit::formats::{
    read_gainmap, read_pfm, read_ppm, read_rgbe, write_gainmap_ppm, write_pfm, write_rgbe, write_sidecar,
    GainMapSidecar, SidecarMeta,
};
use gmkit::metrics::fmt_real;
use gmkit::{GainMap, LinearImage};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HdrFormat {
    /// Pick by file extension (.hdr or .pfm)
    Auto,
    Rgbe,
    Pfm,
}

pub fn read_bytes(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn extension(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase()
}

fn resolve(path: &Path, format: HdrFormat) -> CliResult<HdrFormat> {
    match format {
        HdrFormat::Auto => match extension(path).as_str() {
            "hdr" | "rgbe" | "pic" => Ok(HdrFormat::Rgbe),
            "pfm" => Ok(HdrFormat::Pfm),
            _ => Err(CliError::Usage(format!(
                "{}: cannot infer HDR format from extension, pass --format",
                path.display()
            ))),
        },
        f => Ok(f),
    }
}

pub fn read_hdr(path: &Path, format: HdrFormat) -> CliResult<LinearImage> {
    let format = resolve(path, format)?;
    let bytes = read_bytes(path)?;
    let parsed = match format {
        HdrFormat::Pfm => read_pfm(&bytes),
        _ => read_rgbe(&bytes),
    };
    parsed.map_err(|e| CliError::file(path, e))
}

/// Output format always follows the extension.
pub fn write_hdr(path: &Path, img: &LinearImage) -> CliResult<()> {
    let bytes = match resolve(path, HdrFormat::Auto)? {
        HdrFormat::Pfm => write_pfm(img),
        _ => write_rgbe(img),
    };
    write_bytes(path, &bytes)
}

pub fn is_manifest(path: &Path) -> bool {
    extension(path) == "manifest"
}

/// Sidecar path next to a gain-map image: same stem, `.meta` extension.
pub fn sidecar_path(gm_path: &Path) -> PathBuf {
    gm_path.with_extension("meta")
}

pub fn write_gainmap(path: &Path, gm: &GainMap) -> CliResult<PathBuf> {
    write_bytes(path, &write_gainmap_ppm(gm))?;
    let side = GainMapSidecar {
        meta: *gm.meta(),
        width: gm.width(),
        height: gm.height(),
        extra: vec![],
    };
    let meta_path = sidecar_path(path);
    write_bytes(&meta_path, write_sidecar(&side).as_bytes())?;
    Ok(meta_path)
}

pub fn load_gainmap(path: &Path, meta: Option<&Path>) -> CliResult<GainMap> {
    let meta_path = meta.map(Path::to_path_buf).unwrap_or_else(|| sidecar_path(path));
    let ppm = read_bytes(path)?;
    let text = read_bytes(&meta_path)?;
    let text = String::from_utf8(text)
        .map_err(|_| CliError::Usage(format!("{}: sidecar is not UTF-8", meta_path.display())))?;
    let (gm, _) = read_gainmap(&ppm, &text).map_err(|e| CliError::file(path, e))?;
    Ok(gm)
}

pub const MANIFEST_NAME: &str = "stack.manifest";

fn frame_name(ev: f64) -> String {
    format!("ev{}.ppm", fmt_real(ev))
}

/// Writes one PPM per frame plus `stack.manifest` into `dir`.
pub fn write_stack(dir: &Path, stack: &ExposureStack) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut names = Vec::new();
    for f in stack.frames() {
        let name = frame_name(f.ev);
        write_bytes(&dir.join(&name), &gmkit::formats::write_ppm(&f.image))?;
        names.push(name);
    }
    let reference = &stack.reference().image;
    let mut m = SidecarMeta::new();
    let evs: Vec<String> = stack.evs().into_iter().map(fmt_real).collect();
    let entries = [
        ("format_version", "1".to_string()),
        ("evs", evs.join(",")),
        ("gamma", fmt_real(stack.gamma())),
        ("reference_index", stack.reference_index().to_string()),
        ("frames", names.join(",")),
        ("width", reference.width().to_string()),
        ("height", reference.height().to_string()),
    ];
    for (k, v) in entries {
        m.insert(k, &v).expect("manifest keys are unique");
    }
    let path = dir.join(MANIFEST_NAME);
    write_bytes(&path, m.to_text().as_bytes())?;
    Ok(path)
}

fn manifest_err(path: &Path, msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("{}: {msg}", path.display()))
}

pub fn read_stack(path: &Path) -> CliResult<ExposureStack> {
    let text = String::from_utf8(read_bytes(path)?).map_err(|_| manifest_err(path, "not UTF-8"))?;
    let m = SidecarMeta::parse(&text).map_err(|e| manifest_err(path, e))?;
    let gamma = m.require_f64("gamma").map_err(|e| manifest_err(path, e))?;
    let evs = m
        .require("evs")
        .map_err(|e| manifest_err(path, e))?
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| manifest_err(path, "key `evs`: invalid number list"))?;
    let frames: Vec<&str> = m
        .require("frames")
        .map_err(|e| manifest_err(path, e))?
        .split(',')
        .collect();
    if frames.len() != evs.len() {
        return Err(manifest_err(path, "`frames` and `evs` have different lengths"));
    }
    let dir = path.parent().unwrap_or(Path::new("."));
    let frames = frames
        .iter()
        .zip(&evs)
        .map(|(name, &ev)| {
            let fpath = dir.join(name.trim());
            let image = read_ppm(&read_bytes(&fpath)?).map_err(|e| CliError::file(&fpath, e))?;
            Ok(Frame { image, ev })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(ExposureStack::new(frames, gamma)?)
}

/// Linear base layer: the linearized reference frame of a manifest, or an HDR
/// file already in linear code.
pub fn read_base(path: &Path, format: HdrFormat) -> CliResult<LinearImage> {
    if is_manifest(path) {
        let stack = read_stack(path)?;
        Ok(linearize_ldr(&stack.reference().image, 0.0, stack.gamma())?)
    } else {
        read_hdr(path, format)
    }
}
