//! Embedding of the Möbius strip, its tangent frame and the centerline normal.
//!
//! The strip is parametrized by an angle `u` along the meridian and a
//! transverse coordinate `v`:
//!
//! ```text
//! x = R sin u + v sin(u/2) sin u
//! y = R cos u + v sin(u/2) cos u
//! z = v cos(u/2)
//! ```
//!
//! Every function accepts any real `u`; the embedding is 2π-periodic as a set
//! but the frame only returns to itself after 4π.

use std::f64::consts::PI;

use nalgebra::Vector3;
use serde_json::{Map, Value};

use crate::error::{require_positive, Error, Result};
use crate::format::{json_number, to_json_text, CsvTable};

pub type Vec3 = Vector3<f64>;

/// Default upper bound on `nu * nv` for [`emit_mesh`].
pub const DEFAULT_MESH_CAP: usize = 4_000_000;

const DEGENERATE_AREA: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoebiusShape {
    centerline_radius: f64,
    half_width: f64,
}

impl MoebiusShape {
    pub const DEFAULT_HALF_WIDTH: f64 = 1.0 / 3.0;

    pub fn new(centerline_radius: f64, half_width: f64) -> Result<Self> {
        require_positive("centerline_radius", centerline_radius)?;
        require_positive("half_width", half_width)?;
        if half_width >= centerline_radius {
            return Err(Error::InvalidParameter {
                name: "half_width",
                value: half_width,
                reason: "must be smaller than the centerline radius",
            });
        }
        Ok(Self {
            centerline_radius,
            half_width,
        })
    }

    /// Strip of radius `R` with the default half-width 1/3.
    pub fn with_radius(centerline_radius: f64) -> Result<Self> {
        Self::new(centerline_radius, Self::DEFAULT_HALF_WIDTH)
    }

    pub fn centerline_radius(&self) -> f64 {
        self.centerline_radius
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    fn check(&self, p: ParamPoint) -> Result<()> {
        if !p.u.is_finite() || !p.v.is_finite() {
            return Err(Error::NonFinite {
                context: "surface parameters",
            });
        }
        if p.v.abs() > self.half_width {
            return Err(Error::OutsideStrip {
                v: p.v,
                half_width: self.half_width,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamPoint {
    pub u: f64,
    pub v: f64,
}

impl ParamPoint {
    pub fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddedPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl EmbeddedPoint {
    pub fn to_vec3(self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentFrame {
    /// ∂x/∂u
    pub e_u: Vec3,
    /// ∂x/∂v
    pub e_v: Vec3,
    /// (e_u × e_v) / |e_u × e_v|
    pub normal: Vec3,
    /// |e_u × e_v|
    pub area_element: f64,
}

pub fn embed(shape: &MoebiusShape, p: ParamPoint) -> Result<EmbeddedPoint> {
    shape.check(p)?;
    let r = shape.centerline_radius;
    let (su, cu) = p.u.sin_cos();
    let (sh, ch) = (0.5 * p.u).sin_cos();
    Ok(EmbeddedPoint {
        x: r * su + p.v * sh * su,
        y: r * cu + p.v * sh * cu,
        z: p.v * ch,
    })
}

pub fn tangents(shape: &MoebiusShape, p: ParamPoint) -> Result<TangentFrame> {
    shape.check(p)?;
    let r = shape.centerline_radius;
    let v = p.v;
    let (su, cu) = p.u.sin_cos();
    let (sh, ch) = (0.5 * p.u).sin_cos();

    let e_u = Vec3::new(
        r * cu + v * (0.5 * ch * su + sh * cu),
        -r * su + v * (0.5 * ch * cu - sh * su),
        -0.5 * v * sh,
    );
    let e_v = Vec3::new(sh * su, sh * cu, ch);

    let cross = e_u.cross(&e_v);
    let area_element = cross.norm();
    if area_element < DEGENERATE_AREA * r * r {
        return Err(Error::DegenerateFrame { area: area_element });
    }
    Ok(TangentFrame {
        e_u,
        e_v,
        normal: cross / area_element,
        area_element,
    })
}

/// Unit normal along the meridian `v = 0`. 4π-periodic and odd under `u → u + 2π`.
pub fn centerline_normal(u: f64) -> Vec3 {
    let (su, cu) = u.sin_cos();
    let (sh, ch) = (0.5 * u).sin_cos();
    Vec3::new(-su * ch, -cu * ch, sh)
}

/// Unit transverse direction ∂x/∂v along the meridian.
pub fn centerline_transverse(u: f64) -> Vec3 {
    let (su, cu) = u.sin_cos();
    let (sh, ch) = (0.5 * u).sin_cos();
    Vec3::new(sh * su, sh * cu, ch)
}

/// Unit tangent of the meridian circle.
pub fn centerline_tangent(u: f64) -> Vec3 {
    let (su, cu) = u.sin_cos();
    Vec3::new(cu, -su, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolonomyReport {
    pub samples: usize,
    /// max |n(u + 2π) + n(u)|
    pub flip_residual: f64,
    /// max |n(u + 4π) − n(u)|
    pub period_residual: f64,
}

impl HolonomyReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.flip_residual < tol && self.period_residual < tol
    }
}

/// Samples `u` uniformly on [0, 4π). The normal does not depend on `R`, so the
/// shape only fixes the context.
pub fn holonomy_report(_shape: &MoebiusShape, samples: usize) -> Result<HolonomyReport> {
    if samples < 2 {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: samples as f64,
            reason: "need at least 2 samples",
        });
    }
    let mut flip: f64 = 0.0;
    let mut period: f64 = 0.0;
    for k in 0..samples {
        let u = 4.0 * PI * k as f64 / samples as f64;
        let n = centerline_normal(u);
        flip = flip.max((centerline_normal(u + 2.0 * PI) + n).norm());
        period = period.max((centerline_normal(u + 4.0 * PI) - n).norm());
    }
    Ok(HolonomyReport {
        samples,
        flip_residual: flip,
        period_residual: period,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshVertex {
    pub u: f64,
    pub v: f64,
    pub position: Vec3,
    pub normal: Vec3,
}

/// Grid of vertices, `u`-major: vertex `(i, j)` lives at index `i * nv + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nu: usize,
    pub nv: usize,
    pub vertices: Vec<MeshVertex>,
}

pub const MESH_COLUMNS: [&str; 8] = ["u", "v", "x", "y", "z", "nx", "ny", "nz"];

impl Mesh {
    pub fn vertex(&self, i: usize, j: usize) -> &MeshVertex {
        &self.vertices[i * self.nv + j]
    }

    fn row(v: &MeshVertex) -> [f64; 8] {
        [
            v.u,
            v.v,
            v.position.x,
            v.position.y,
            v.position.z,
            v.normal.x,
            v.normal.y,
            v.normal.z,
        ]
    }

    pub fn to_csv(&self) -> String {
        let mut table = CsvTable::new(&MESH_COLUMNS);
        for v in &self.vertices {
            table.push_row(&Self::row(v));
        }
        table.into_string()
    }

    pub fn to_json_value(&self) -> Result<Value> {
        let mut out = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            let mut obj = Map::new();
            for (key, x) in MESH_COLUMNS.iter().zip(Self::row(v)) {
                obj.insert((*key).to_owned(), json_number(x)?);
            }
            out.push(Value::Object(obj));
        }
        Ok(Value::Array(out))
    }

    pub fn to_json(&self) -> Result<String> {
        to_json_text(&self.to_json_value()?)
    }
}

pub fn emit_mesh(shape: &MoebiusShape, nu: usize, nv: usize) -> Result<Mesh> {
    emit_mesh_capped(shape, nu, nv, DEFAULT_MESH_CAP)
}

/// `u` spans [0, 2π) in `nu` steps, `v` spans [−w, w] inclusive in `nv` steps.
pub fn emit_mesh_capped(shape: &MoebiusShape, nu: usize, nv: usize, cap: usize) -> Result<Mesh> {
    if nu < 3 {
        return Err(Error::InvalidParameter {
            name: "nu",
            value: nu as f64,
            reason: "need at least 3 meridian samples",
        });
    }
    if nv < 2 {
        return Err(Error::InvalidParameter {
            name: "nv",
            value: nv as f64,
            reason: "need at least 2 transverse samples",
        });
    }
    let requested = nu.saturating_mul(nv);
    if requested > cap {
        return Err(Error::MeshTooLarge { requested, cap });
    }

    let w = shape.half_width;
    let mut vertices = Vec::with_capacity(requested);
    for i in 0..nu {
        let u = 2.0 * PI * i as f64 / nu as f64;
        for j in 0..nv {
            // pin the last column to +w exactly so rounding cannot leave the strip
            let v = if j + 1 == nv {
                w
            } else {
                -w + 2.0 * w * j as f64 / (nv - 1) as f64
            };
            let p = ParamPoint::new(u, v);
            let position = embed(shape, p)?.to_vec3();
            let normal = tangents(shape, p)?.normal;
            vertices.push(MeshVertex {
                u,
                v,
                position,
                normal,
            });
        }
    }
    Ok(Mesh { nu, nv, vertices })
}
