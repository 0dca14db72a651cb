//! Programmable cavity arrays: a bit matrix picks which posts of a regular
//! grid resonate (bit 1) and which are pushed onto the wall to act as
//! screens (bit 0). Ports on the left and right edges drive the array and
//! collect the transmitted field.

mod response;

use faer::c64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lattice::shapes::PostTemplate;
use crate::lattice::{CouplingModel, LatticeError, LatticeModel};

pub use response::{
    driven_response, field_map, find_peaks, spectrum_csv, transmission_spectrum, Band, DriveSpec, FieldMap, Peak,
    PortBinding, Response, ResponseSystem, SinkSeries, Spectrum,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PcaError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid port: {0}")]
    Port(String),
    #[error("invalid drive: {0}")]
    Drive(String),
    #[error("invalid band: {0}")]
    Band(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PortSide {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PortRole {
    Source,
    Sink,
}

/// Port on the first (`left`) or last (`right`) column of a grid row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridPort {
    pub side: PortSide,
    pub row: usize,
    pub role: PortRole,
}

impl GridPort {
    pub fn label(&self) -> String {
        let side = match self.side {
            PortSide::Left => "left",
            PortSide::Right => "right",
        };
        format!("{side}_{}", self.row)
    }
}

/// Port coupling and loss rates (rad/s) plus the complex input amplitude
/// of every source port, in port order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSettings {
    #[serde(default = "default_port_coupling")]
    pub port_coupling: f64,
    #[serde(default = "default_intrinsic_loss")]
    pub intrinsic_loss: f64,
    /// `[re, im]` per source port; unit amplitude when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<Vec<[f64; 2]>>,
}

fn default_port_coupling() -> f64 {
    2.0 * std::f64::consts::PI * 2e6
}

fn default_intrinsic_loss() -> f64 {
    2.0 * std::f64::consts::PI * 2e5
}

impl Default for DriveSettings {
    fn default() -> Self {
        Self { port_coupling: default_port_coupling(), intrinsic_loss: default_intrinsic_loss(), inputs: None }
    }
}

impl DriveSettings {
    pub fn at(&self, frequency: f64, sources: usize) -> Result<DriveSpec, PcaError> {
        let inputs = match &self.inputs {
            Some(v) if v.len() != sources => {
                return Err(PcaError::Drive(format!("{} input amplitudes for {sources} source ports", v.len())))
            }
            Some(v) => v.iter().map(|[re, im]| c64::new(*re, *im)).collect(),
            None => vec![c64::new(1.0, 0.0); sources],
        };
        let d = DriveSpec { frequency, inputs, port_coupling: self.port_coupling, intrinsic_loss: self.intrinsic_loss };
        d.validate()?;
        Ok(d)
    }
}

/// Grid file: bit matrix, geometry and ports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PcaGrid {
    pub bits: Vec<Vec<u8>>,
    pub pitch_m: f64,
    #[serde(default)]
    pub post: PostTemplate,
    #[serde(default)]
    pub ports: Vec<GridPort>,
    /// Defaults to `L0 = 1 nH`, `kappa0 = 0.2`, `d0 = pitch/2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive: Option<DriveSettings>,
}

impl PcaGrid {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn rows(&self) -> usize {
        self.bits.len()
    }

    pub fn cols(&self) -> usize {
        self.bits.first().map_or(0, Vec::len)
    }

    pub fn post_id(&self, row: usize, col: usize) -> u32 {
        (row * self.cols() + col) as u32
    }

    pub fn coupling(&self) -> CouplingModel {
        self.coupling.clone().unwrap_or_else(|| CouplingModel::new(1e-9, 0.2, self.pitch_m / 2.0))
    }

    pub fn drive_settings(&self) -> DriveSettings {
        self.drive.clone().unwrap_or_default()
    }

    pub fn validate(&self) -> Result<(), PcaError> {
        let cols = self.cols();
        if self.rows() == 0 || cols == 0 {
            return Err(PcaError::Grid("bit matrix is empty".into()));
        }
        if let Some(r) = self.bits.iter().position(|row| row.len() != cols) {
            return Err(PcaError::Grid(format!("row {r} has {} bits, expected {cols}", self.bits[r].len())));
        }
        if self.bits.iter().flatten().any(|&b| b > 1) {
            return Err(PcaError::Grid("bits must be 0 or 1".into()));
        }
        if !(self.pitch_m > 0.0 && self.pitch_m.is_finite()) {
            return Err(PcaError::Grid("pitch_m must be positive".into()));
        }
        if self.post.radius * 2.0 >= self.pitch_m {
            return Err(PcaError::Grid("posts overlap: diameter must be below the pitch".into()));
        }
        for (i, p) in self.ports.iter().enumerate() {
            if p.row >= self.rows() {
                return Err(PcaError::Port(format!("port {i} row {} outside 0..{}", p.row, self.rows())));
            }
            if self.ports[..i].iter().any(|q| q.side == p.side && q.row == p.row) {
                return Err(PcaError::Port(format!("port {i} duplicates {}", p.label())));
            }
        }
        Ok(())
    }

    /// Ports as post bindings (column 0 for `left`, last column for `right`).
    pub fn port_bindings(&self) -> Vec<PortBinding> {
        self.ports
            .iter()
            .map(|p| {
                let col = match p.side {
                    PortSide::Left => 0,
                    PortSide::Right => self.cols() - 1,
                };
                PortBinding { post: self.post_id(p.row, col), role: p.role, label: p.label() }
            })
            .collect()
    }

    pub fn require_transmission_ports(&self) -> Result<(), PcaError> {
        let has = |r| self.ports.iter().any(|p| p.role == r);
        if !has(PortRole::Source) || !has(PortRole::Sink) {
            return Err(PcaError::Port("transmission needs at least one source and one sink".into()));
        }
        Ok(())
    }
}

/// Lattice of a grid: cell `(r, c)` sits at `(c·pitch, r·pitch)` with id
/// `r·cols + c`. Bit-0 cells become shorted posts that screen every pair
/// whose connecting segment passes within half a pitch of them.
pub fn compile_grid(grid: &PcaGrid) -> Result<LatticeModel, PcaError> {
    grid.validate()?;
    let mut posts = Vec::with_capacity(grid.rows() * grid.cols());
    for (r, row) in grid.bits.iter().enumerate() {
        for (c, &bit) in row.iter().enumerate() {
            let mut p = grid.post.at(grid.post_id(r, c), c as f64 * grid.pitch_m, r as f64 * grid.pitch_m);
            if bit == 0 {
                p.gap = 0.0;
            }
            posts.push(p);
        }
    }
    let mut model = LatticeModel::new("pca", grid.coupling(), posts);
    model.screen_clearance = Some(grid.pitch_m / 2.0);
    model.validate()?;
    Ok(model)
}
