//! Surface layout and link geometry.
//!
//! The surface lies in the xoy plane with its center at the origin and its
//! normal along +z. Cells are indexed 1-based as (n, m): n counts rows along
//! the y axis, m counts columns along the x axis, and the (n, m) cell center
//! sits at
//!
//! ```text
//! x = ((cols + 1) / 2 - m) * cell_dx
//! y = ((rows + 1) / 2 - n) * cell_dy
//! z = 0
//! ```
//!
//! so cell (1, 1) is the +x/+y corner and the grid is symmetric about the
//! origin. The transmitter sits in the xoz plane on the -x side at elevation
//! `theta_t` from the normal, the receiver on the +x side at `theta_r`; both
//! aim their antenna boresight at the surface center.

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// A point in the surface-centered Cartesian frame, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Euclidean distance to another point.
    pub fn distance(self, other: Self) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    fn sub(self, other: Self) -> Self {
        Self::new(self.x - other.x, self.y - other.y, self.z - other.z)
    }

    fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    fn cross(self, other: Self) -> Self {
        Self::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }
}

/// 1-based cell index: `n` is the row (y direction), `m` the column (x direction).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CellIndex {
    pub n: usize,
    pub m: usize,
}

impl CellIndex {
    pub fn new(n: usize, m: usize) -> Self {
        Self { n, m }
    }
}

/// Static link geometry: surface dimensions, terminal placement, carrier.
///
/// Angles are in radians and measured from the surface normal; both must lie
/// in `[0, pi/2)` so the terminals stay strictly in front of the surface.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    /// Rows of cells (y direction).
    pub rows: usize,
    /// Columns of cells (x direction).
    pub cols: usize,
    /// Cell pitch along x, meters.
    pub cell_dx: f64,
    /// Cell pitch along y, meters.
    pub cell_dy: f64,
    /// Transmitter distance from the surface center, meters.
    pub d1: f64,
    /// Receiver distance from the surface center, meters.
    pub d2: f64,
    /// Transmitter elevation from the surface normal, radians.
    pub theta_t: f64,
    /// Receiver elevation from the surface normal, radians.
    pub theta_r: f64,
    /// Carrier frequency, Hz.
    pub frequency_hz: f64,
}

impl GeometryConfig {
    /// Builds and validates a geometry.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        rows: usize,
        cols: usize,
        cell_dx: f64,
        cell_dy: f64,
        d1: f64,
        d2: f64,
        theta_t: f64,
        theta_r: f64,
        frequency_hz: f64,
    ) -> Result<Self> {
        let cfg = Self {
            rows,
            cols,
            cell_dx,
            cell_dy,
            d1,
            d2,
            theta_t,
            theta_r,
            frequency_hz,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every field against its domain.
    pub fn validate(&self) -> Result<()> {
        fn positive(name: &'static str, value: f64) -> Result<()> {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be finite and positive",
                    value,
                });
            }
            Ok(())
        }
        fn front_angle(name: &'static str, value: f64) -> Result<()> {
            if !(value.is_finite() && (0.0..std::f64::consts::FRAC_PI_2).contains(&value)) {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must lie in [0, pi/2) radians",
                    value,
                });
            }
            Ok(())
        }
        if self.rows == 0 {
            return Err(Error::InvalidCount {
                name: "rows",
                reason: "surface needs at least one row",
                value: 0,
            });
        }
        if self.cols == 0 {
            return Err(Error::InvalidCount {
                name: "cols",
                reason: "surface needs at least one column",
                value: 0,
            });
        }
        positive("cell_dx", self.cell_dx)?;
        positive("cell_dy", self.cell_dy)?;
        positive("d1", self.d1)?;
        positive("d2", self.d2)?;
        front_angle("theta_t", self.theta_t)?;
        front_angle("theta_r", self.theta_r)?;
        positive("frequency_hz", self.frequency_hz)?;
        Ok(())
    }

    /// Carrier wavelength, meters.
    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency_hz
    }

    /// Transmitter azimuth. Fixed: the transmitter sits on the -x side.
    pub fn phi_t(&self) -> f64 {
        std::f64::consts::PI
    }

    /// Receiver azimuth. Fixed: the receiver sits on the +x side.
    pub fn phi_r(&self) -> f64 {
        0.0
    }

    /// Number of cells on the surface.
    pub fn cell_count(&self) -> usize {
        self.rows * self.cols
    }

    /// Same geometry at a different receiver distance.
    pub fn with_d2(&self, d2: f64) -> Result<Self> {
        let mut cfg = self.clone();
        cfg.d2 = d2;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Center of cell (n, m), or an error if the index leaves the surface.
pub fn cell_center(cfg: &GeometryConfig, idx: CellIndex) -> Result<Point3> {
    if idx.n == 0 || idx.n > cfg.rows || idx.m == 0 || idx.m > cfg.cols {
        return Err(Error::CellIndexOutOfRange {
            n: idx.n,
            m: idx.m,
            rows: cfg.rows,
            cols: cfg.cols,
        });
    }
    let x = ((cfg.cols as f64 + 1.0) / 2.0 - idx.m as f64) * cfg.cell_dx;
    let y = ((cfg.rows as f64 + 1.0) / 2.0 - idx.n as f64) * cfg.cell_dy;
    Ok(Point3::new(x, y, 0.0))
}

/// Transmitter position. With `phi_t = pi` the spherical placement collapses
/// to the closed form `(-d1 sin theta_t, 0, d1 cos theta_t)`, which is used
/// directly so the y coordinate is exactly zero.
pub fn tx_position(cfg: &GeometryConfig) -> Point3 {
    Point3::new(
        -cfg.d1 * cfg.theta_t.sin(),
        0.0,
        cfg.d1 * cfg.theta_t.cos(),
    )
}

/// Receiver position, `(d2 sin theta_r, 0, d2 cos theta_r)`.
pub fn rx_position(cfg: &GeometryConfig) -> Point3 {
    Point3::new(cfg.d2 * cfg.theta_r.sin(), 0.0, cfg.d2 * cfg.theta_r.cos())
}

/// Direct transmitter-to-receiver distance.
///
/// Errors if the terminals coincide (possible when both elevations are zero
/// and `d1 == d2`), because the direct path is then undefined.
pub fn los_distance(cfg: &GeometryConfig) -> Result<f64> {
    let d = tx_position(cfg).distance(rx_position(cfg));
    if d <= 0.0 {
        return Err(Error::DegenerateGeometry(format!(
            "transmitter and receiver coincide (d1 = {}, d2 = {}, theta_t = {}, theta_r = {})",
            cfg.d1, cfg.d2, cfg.theta_t, cfg.theta_r
        )));
    }
    Ok(d)
}

/// Everything the channel needs about one cell: where it is, how far each
/// terminal is, and the observation angles on both sides of both hops.
///
/// Angle naming: `theta_cell_*` / `phi_cell_*` are seen from the cell (from
/// the surface normal, azimuth in the surface plane); `theta_tx` / `phi_tx`
/// and `theta_rx` / `phi_rx` are seen from the terminal antennas, measured
/// from each antenna's boresight, which points at the surface center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellGeometry {
    pub index: CellIndex,
    pub center: Point3,
    /// Transmitter-to-cell distance, meters.
    pub r_t: f64,
    /// Cell-to-receiver distance, meters.
    pub r_r: f64,
    /// Elevation of the transmitter as seen from the cell.
    pub theta_cell_t: f64,
    /// Azimuth of the transmitter as seen from the cell.
    pub phi_cell_t: f64,
    /// Elevation of the receiver as seen from the cell.
    pub theta_cell_r: f64,
    /// Azimuth of the receiver as seen from the cell.
    pub phi_cell_r: f64,
    /// Departure angle of this cell from the transmit antenna boresight.
    pub theta_tx: f64,
    /// Azimuth of this cell around the transmit boresight axis.
    pub phi_tx: f64,
    /// Arrival angle of this cell from the receive antenna boresight.
    pub theta_rx: f64,
    /// Azimuth of this cell around the receive boresight axis.
    pub phi_rx: f64,
}

/// Observation angles of `target` from an antenna at `antenna` whose
/// boresight points at the surface center (the origin).
///
/// The azimuth reference axis is the projection of +z onto the plane
/// perpendicular to the boresight; when the boresight is parallel to z the
/// projection of +x is used instead. Azimuth only matters for patterns that
/// depend on it, which none of the built-in models do.
fn antenna_angles(antenna: Point3, target: Point3) -> (f64, f64) {
    let boresight = Point3::new(0.0, 0.0, 0.0).sub(antenna);
    let b_norm = boresight.norm();
    let v = target.sub(antenna);
    let v_norm = v.norm();
    debug_assert!(b_norm > 0.0 && v_norm > 0.0);

    let cos_theta = (boresight.dot(v) / (b_norm * v_norm)).clamp(-1.0, 1.0);
    let theta = cos_theta.acos();

    let b_hat = Point3::new(boresight.x / b_norm, boresight.y / b_norm, boresight.z / b_norm);
    let mut e1 = {
        let z = Point3::new(0.0, 0.0, 1.0);
        let along = z.dot(b_hat);
        Point3::new(
            z.x - along * b_hat.x,
            z.y - along * b_hat.y,
            z.z - along * b_hat.z,
        )
    };
    if e1.norm() < 1e-12 {
        let x = Point3::new(1.0, 0.0, 0.0);
        let along = x.dot(b_hat);
        e1 = Point3::new(
            x.x - along * b_hat.x,
            x.y - along * b_hat.y,
            x.z - along * b_hat.z,
        );
    }
    let e1_norm = e1.norm();
    let e1 = Point3::new(e1.x / e1_norm, e1.y / e1_norm, e1.z / e1_norm);
    let e2 = b_hat.cross(e1);
    let phi = v.dot(e2).atan2(v.dot(e1));
    (theta, phi)
}

/// Per-cell geometry for the whole surface in row-major order: cell (n, m)
/// lands at linear index `(n - 1) * cols + (m - 1)`.
///
/// Errors if a terminal coincides with a cell center, which would make that
/// hop's path length (and phase) undefined. With valid front-side elevations
/// this cannot happen, but the check keeps the failure mode explicit.
pub fn cell_geometry(cfg: &GeometryConfig) -> Result<Vec<CellGeometry>> {
    cfg.validate()?;
    let tx = tx_position(cfg);
    let rx = rx_position(cfg);
    let mut cells = Vec::with_capacity(cfg.cell_count());
    for n in 1..=cfg.rows {
        for m in 1..=cfg.cols {
            let index = CellIndex::new(n, m);
            let center = cell_center(cfg, index)?;
            let r_t = center.distance(tx);
            let r_r = center.distance(rx);
            if r_t <= 0.0 || r_r <= 0.0 {
                return Err(Error::DegenerateGeometry(format!(
                    "terminal coincides with cell ({n}, {m})"
                )));
            }
            let theta_cell_t = (tx.z / r_t).clamp(-1.0, 1.0).acos();
            let phi_cell_t = (tx.y - center.y).atan2(tx.x - center.x);
            let theta_cell_r = (rx.z / r_r).clamp(-1.0, 1.0).acos();
            let phi_cell_r = (rx.y - center.y).atan2(rx.x - center.x);
            let (theta_tx, phi_tx) = antenna_angles(tx, center);
            let (theta_rx, phi_rx) = antenna_angles(rx, center);
            cells.push(CellGeometry {
                index,
                center,
                r_t,
                r_r,
                theta_cell_t,
                phi_cell_t,
                theta_cell_r,
                phi_cell_r,
                theta_tx,
                phi_tx,
                theta_rx,
                phi_rx,
            });
        }
    }
    Ok(cells)
}
