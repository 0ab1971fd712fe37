//! Line-oriented `key=value` metadata used for gain-map sidecars and stack
//! manifests.

use thiserror::Error;

use crate::codec::{GainMapMeta, GainVariant};
use crate::metrics::fmt_real;

pub const SIDECAR_FORMAT_VERSION: &str = "1";

const REQUIRED_KEYS: [&str; 8] = [
    "format_version",
    "variant",
    "q_max",
    "alpha",
    "mu",
    "clip_fraction",
    "width",
    "height",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SidecarError {
    #[error("line {line}: expected key=value")]
    MalformedLine { line: usize },
    #[error("line {line}: non-ASCII content")]
    NonAscii { line: usize },
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("duplicate key `{0}`")]
    DuplicateKey(String),
    #[error("key `{key}`: cannot parse {value:?} as a number")]
    InvalidNumber { key: String, value: String },
    #[error("key `{key}`: invalid value {value:?}")]
    InvalidValue { key: String, value: String },
}

/// Ordered `key=value` entries. Keys are unique.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SidecarMeta {
    entries: Vec<(String, String)>,
}

impl SidecarMeta {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self, SidecarError> {
        let mut meta = Self::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.is_empty() {
                continue;
            }
            if !line.is_ascii() {
                return Err(SidecarError::NonAscii { line: line_no });
            }
            let (k, v) = line
                .split_once('=')
                .filter(|(k, _)| !k.is_empty())
                .ok_or(SidecarError::MalformedLine { line: line_no })?;
            meta.insert(k, v)?;
        }
        Ok(meta)
    }

    /// Appends an entry; an existing key is an error.
    pub fn insert(&mut self, key: &str, value: &str) -> Result<(), SidecarError> {
        if self.get(key).is_some() {
            return Err(SidecarError::DuplicateKey(key.to_string()));
        }
        self.entries.push((key.to_string(), value.to_string()));
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn require(&self, key: &str) -> Result<&str, SidecarError> {
        self.get(key).ok_or_else(|| SidecarError::MissingKey(key.to_string()))
    }

    pub fn require_f64(&self, key: &str) -> Result<f64, SidecarError> {
        let v = self.require(key)?;
        v.parse().map_err(|_| SidecarError::InvalidNumber {
            key: key.to_string(),
            value: v.to_string(),
        })
    }

    pub fn require_usize(&self, key: &str) -> Result<usize, SidecarError> {
        let v = self.require(key)?;
        v.parse().map_err(|_| SidecarError::InvalidNumber {
            key: key.to_string(),
            value: v.to_string(),
        })
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

/// Gain-map metadata plus dimensions and any unrecognized keys.
#[derive(Debug, Clone, PartialEq)]
pub struct GainMapSidecar {
    pub meta: GainMapMeta,
    pub width: usize,
    pub height: usize,
    pub extra: Vec<(String, String)>,
}

pub fn read_sidecar(text: &str) -> Result<GainMapSidecar, SidecarError> {
    let s = SidecarMeta::parse(text)?;
    for key in REQUIRED_KEYS {
        s.require(key)?;
    }
    let version = s.require("format_version")?;
    if version != SIDECAR_FORMAT_VERSION {
        return Err(SidecarError::InvalidValue {
            key: "format_version".into(),
            value: version.into(),
        });
    }
    let variant_name = s.require("variant")?;
    let variant = GainVariant::from_name(variant_name).ok_or_else(|| SidecarError::InvalidValue {
        key: "variant".into(),
        value: variant_name.into(),
    })?;
    let positive = |key: &str| -> Result<f64, SidecarError> {
        let v = s.require_f64(key)?;
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            Err(SidecarError::InvalidValue {
                key: key.into(),
                value: s.require(key)?.into(),
            })
        }
    };
    let q_max = positive("q_max")?;
    let alpha = positive("alpha")?;
    let mu = positive("mu")?;
    let clip_fraction = s.require_f64("clip_fraction")?;
    if !(0.0..=1.0).contains(&clip_fraction) {
        return Err(SidecarError::InvalidValue {
            key: "clip_fraction".into(),
            value: s.require("clip_fraction")?.into(),
        });
    }
    let width = s.require_usize("width")?;
    let height = s.require_usize("height")?;
    let extra = s
        .entries()
        .iter()
        .filter(|(k, _)| !REQUIRED_KEYS.contains(&k.as_str()))
        .cloned()
        .collect();
    Ok(GainMapSidecar {
        meta: GainMapMeta {
            q_max,
            alpha,
            variant,
            mu,
            clip_fraction,
        },
        width,
        height,
        extra,
    })
}

/// Required keys in a fixed order, then `extra` in its given order. Reals use
/// the shortest representation that parses back to the same value.
pub fn write_sidecar(side: &GainMapSidecar) -> String {
    let m = &side.meta;
    let mut out = SidecarMeta::new();
    let fixed = [
        ("format_version", SIDECAR_FORMAT_VERSION.to_string()),
        ("variant", m.variant.name().to_string()),
        ("q_max", fmt_real(m.q_max)),
        ("alpha", fmt_real(m.alpha)),
        ("mu", fmt_real(m.mu)),
        ("clip_fraction", fmt_real(m.clip_fraction)),
        ("width", side.width.to_string()),
        ("height", side.height.to_string()),
    ];
    for (k, v) in fixed {
        out.insert(k, &v).expect("fixed keys are unique");
    }
    for (k, v) in &side.extra {
        if !REQUIRED_KEYS.contains(&k.as_str()) {
            // Duplicates among extras keep the first occurrence.
            let _ = out.insert(k, v);
        }
    }
    out.to_text()
}
