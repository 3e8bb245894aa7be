//! JSON input documents.

use std::path::Path;
use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use zink_core::breuil_kisin::{BkSetup, BkSpec, BreuilWindow};
use zink_core::bt::{DisplaySource, TestAlgebra};
use zink_core::frames::{Frame, SElem};
use zink_core::windows::Window;
use zink_core::witt::WittVector;
use zink_core::{AlgebraHom, FiniteAlgebra, RingSpec};

use crate::error::{config, CliError};

pub fn read<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config(format!("{}: {e}", path.display())))
}

pub fn build_ring(spec: &RingSpec) -> Result<Arc<FiniteAlgebra>, CliError> {
    spec.build().map_err(config)
}

/// Parses an expression in the variables of `spec`.
pub fn parse(ring: &FiniteAlgebra, spec: &RingSpec, s: &str) -> Result<Vec<u64>, CliError> {
    let vars: Vec<&str> = spec.vars.iter().map(String::as_str).collect();
    ring.parse_element(&vars, s).map_err(config)
}

/// Witt coordinates given as expressions; missing ones are zero.
pub fn witt(ring: &Arc<FiniteAlgebra>, spec: &RingSpec, coords: &[String], len: usize) -> Result<WittVector, CliError> {
    if coords.len() > len {
        return Err(config(format!("{} coordinates given for length {len}", coords.len())));
    }
    let mut c = coords.iter().map(|s| parse(ring, spec, s)).collect::<Result<Vec<_>, _>>()?;
    c.resize(len, ring.zero());
    Ok(WittVector::new(ring, c))
}

/// `{"ring": .., "len": 3, "rank_l": 1, "height": 2, "psi": [[["1"], ["t"]], ..]}`.
/// Without `psi` a window of the given height is drawn from the seed.
#[derive(Clone, Debug, Deserialize)]
pub struct WindowDoc {
    pub ring: RingSpec,
    #[serde(default = "default_len")]
    pub len: usize,
    pub rank_l: usize,
    #[serde(default)]
    pub height: Option<usize>,
    #[serde(default)]
    pub psi: Option<Vec<Vec<Vec<String>>>>,
}

fn default_len() -> usize {
    3
}

impl WindowDoc {
    fn height(&self) -> Result<usize, CliError> {
        match (&self.psi, self.height) {
            (Some(p), Some(h)) if p.len() != h => Err(config("height disagrees with psi")),
            (Some(p), _) => Ok(p.len()),
            (None, Some(h)) => Ok(h),
            (None, None) => Err(config("window needs psi or height")),
        }
    }

    fn psi_at(&self, ring: &Arc<FiniteAlgebra>, len: usize) -> Result<Vec<Vec<WittVector>>, CliError> {
        let psi = self.psi.as_ref().ok_or_else(|| config("window has no psi"))?;
        let h = psi.len();
        if psi.iter().any(|r| r.len() != h) {
            return Err(config("psi must be square"));
        }
        psi.iter().map(|r| r.iter().map(|x| witt(ring, &self.ring, x, len)).collect()).collect()
    }

    /// The window over `𝒟_R` at the document's length.
    pub fn window(&self, rng: &mut ChaCha8Rng) -> Result<Window, CliError> {
        let ring = build_ring(&self.ring)?;
        let f = Arc::new(Frame::dieudonne(&ring, self.len).map_err(config)?);
        self.window_over(&f, rng, |x| x)
    }

    /// The window over `f`, with entries parsed in the document ring and
    /// sent through `map`.
    pub fn window_over(
        &self,
        f: &Arc<Frame>,
        rng: &mut ChaCha8Rng,
        map: impl Fn(WittVector) -> WittVector,
    ) -> Result<Window, CliError> {
        let h = self.height()?;
        if self.rank_l > h {
            return Err(config("rank_l exceeds the height"));
        }
        if self.psi.is_none() {
            return Ok(Window::random(f, h, self.rank_l, rng));
        }
        let ring = build_ring(&self.ring)?;
        let psi = self.psi_at(&ring, f.len())?;
        let psi = psi.into_iter().map(|r| r.into_iter().map(|x| SElem::W(map(x))).collect()).collect();
        Window::new(f, self.rank_l, psi).map_err(config)
    }

    /// The display with the given coordinates read as exact.
    fn source(&self) -> Result<DisplaySource, CliError> {
        let ring = build_ring(&self.ring)?;
        let h = self.height()?;
        let probe = self.psi_at(&ring, 2)?;
        let f = Arc::new(Frame::dieudonne(&ring, 2).map_err(config)?);
        let entries = probe.into_iter().map(|r| r.into_iter().map(SElem::W).collect()).collect();
        Window::new(&f, self.rank_l, entries).map_err(config)?;
        let doc = self.clone();
        let r = ring.clone();
        Ok(DisplaySource::from_fn(&ring, self.rank_l, h, move |len| {
            doc.psi_at(&r, len).map_err(|e| zink_core::BtError::Source(e.to_string()))
        }))
    }
}

/// `{"kind": "unit" | "etale" | "window" | "breuil", ..}`.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DisplayDoc {
    Unit { ring: RingSpec },
    Etale { ring: RingSpec, height: usize },
    Window(WindowDoc),
    Breuil(BreuilDoc),
}

impl DisplayDoc {
    /// The display and, unless it comes from a Breuil–Kisin setup, the
    /// spec of its base ring.
    pub fn source(&self, precision: Option<u32>) -> Result<(DisplaySource, Option<RingSpec>), CliError> {
        match self {
            DisplayDoc::Unit { ring } => Ok((DisplaySource::unit(&build_ring(ring)?), Some(ring.clone()))),
            DisplayDoc::Etale { ring, height } => {
                Ok((DisplaySource::etale(&build_ring(ring)?, *height), Some(ring.clone())))
            }
            DisplayDoc::Window(w) => Ok((w.source()?, Some(w.ring.clone()))),
            DisplayDoc::Breuil(b) => {
                let (setup, bw) = b.load(precision)?;
                Ok((DisplaySource::from_breuil(Arc::new(setup), bw)?, None))
            }
        }
    }
}

/// A Breuil–Kisin setup with a `φ` matrix of expressions.
#[derive(Clone, Debug, Deserialize)]
pub struct BreuilDoc {
    pub bk: BkSpec,
    #[serde(default)]
    pub phi: Option<Vec<Vec<String>>>,
}

impl BreuilDoc {
    /// `φ` defaults to `[[E]]`.
    pub fn load(&self, precision: Option<u32>) -> Result<(BkSetup, BreuilWindow), CliError> {
        let mut spec = self.bk.clone();
        if let Some(m) = precision {
            spec.m = m;
        }
        let setup = BkSetup::new(spec).map_err(config)?;
        let phi = match &self.phi {
            Some(rows) => rows
                .iter()
                .map(|r| r.iter().map(|s| setup.parse(s).map_err(config)).collect())
                .collect::<Result<Vec<Vec<_>>, _>>()?,
            None => vec![vec![setup.e().clone()]],
        };
        let bw = BreuilWindow::new(&setup, phi).map_err(config)?;
        Ok((setup, bw))
    }
}

/// `{"ring": .., "structure": ["t", ..]}`: images of the basis of `R` in `A`.
/// Without `structure`, `A` must be `R` itself or `R` must be `Z/p^m`.
#[derive(Clone, Debug, Deserialize)]
pub struct AlgebraDoc {
    pub ring: RingSpec,
    #[serde(default)]
    pub structure: Option<Vec<String>>,
}

impl AlgebraDoc {
    pub fn test_algebra(&self, base: &Arc<FiniteAlgebra>, base_spec: Option<&RingSpec>) -> Result<TestAlgebra, CliError> {
        if self.structure.is_none() && Some(&self.ring) == base_spec {
            return TestAlgebra::over_itself(base).map_err(config);
        }
        let a = build_ring(&self.ring)?;
        let images = match &self.structure {
            Some(s) => s.iter().map(|x| parse(&a, &self.ring, x)).collect::<Result<Vec<_>, _>>()?,
            None if base.rank() == 1 => vec![a.one()],
            None => return Err(config("algebra needs a structure map")),
        };
        let hom = AlgebraHom::new(base, &a, images).map_err(config)?;
        TestAlgebra::new(hom).map_err(config)
    }
}

/// `{"ring": B, "ideal": ["t^2"], "len": 3, "rank_l": 1, "psi": ..}`: a
/// window over `B/𝔟` lifted along `B -> B/𝔟` with trivial divided powers.
/// Entries of `psi` are written in `B` and projected.
#[derive(Clone, Debug, Deserialize)]
pub struct LiftDoc {
    pub ideal: Vec<String>,
    #[serde(flatten)]
    pub window: WindowDoc,
}
