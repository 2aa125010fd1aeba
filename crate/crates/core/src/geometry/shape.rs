//! Analytic shape descriptions and their signed distance functions.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Analytic description of a bounded open connected planar domain.
///
/// Signed distances are exact for rectangles, disks and convex polygons,
/// first-order accurate for ellipses, and a smooth-min combination for the
/// smoothed annulus sector.
#[derive(Debug, Clone, PartialEq)]
pub enum ShapeSpec<T> {
    Rectangle {
        corner: [T; 2],
        width: T,
        height: T,
    },
    Disk {
        center: [T; 2],
        radius: T,
    },
    Ellipse {
        center: [T; 2],
        semi_axes: [T; 2],
    },
    /// Strictly convex polygon, vertices counterclockwise.
    ConvexPolygon {
        vertices: Vec<[T; 2]>,
    },
    /// Annulus `r_inner < r < r_outer` centered at the origin with the angular
    /// wedge `0 <= theta <= gap` removed, corners rounded by a quadratic
    /// smooth-min of radius `smoothing`.
    AnnulusSector {
        r_inner: T,
        r_outer: T,
        gap: T,
        smoothing: T,
    },
}

impl<T: Real> ShapeSpec<T> {
    /// Validates parameter ranges; every variant must describe a bounded
    /// open connected set.
    pub fn validate(&self) -> Result<()> {
        let pos = |v: T, name: &str| -> Result<()> {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidShape(format!("{name} must be strictly positive, got {v}")))
            }
        };
        match self {
            ShapeSpec::Rectangle { width, height, .. } => {
                pos(*width, "width")?;
                pos(*height, "height")
            }
            ShapeSpec::Disk { radius, .. } => pos(*radius, "radius"),
            ShapeSpec::Ellipse { semi_axes, .. } => {
                pos(semi_axes[0], "semi axis a")?;
                pos(semi_axes[1], "semi axis b")
            }
            ShapeSpec::ConvexPolygon { vertices } => validate_polygon(vertices),
            ShapeSpec::AnnulusSector { r_inner, r_outer, gap, smoothing } => {
                pos(*r_inner, "inner radius")?;
                pos(*r_outer, "outer radius")?;
                pos(*smoothing, "smoothing radius")?;
                if *r_outer <= *r_inner {
                    return Err(Error::InvalidShape("outer radius must exceed inner radius".into()));
                }
                if !(*gap > T::zero() && *gap < T::of(std::f64::consts::FRAC_PI_2)) {
                    return Err(Error::InvalidShape(format!(
                        "angular gap must lie in (0, pi/2), got {gap}"
                    )));
                }
                let quarter = (*r_outer - *r_inner) / T::of(4.0);
                if *smoothing >= quarter {
                    return Err(Error::InvalidShape(format!(
                        "smoothing radius {smoothing} must be below (r_outer - r_inner)/4 = {quarter}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Signed distance at `p`, negative inside.
    pub fn signed_distance(&self, p: [T; 2]) -> T {
        match self {
            ShapeSpec::Rectangle { corner, width, height } => {
                let cx = corner[0] + *width / T::of(2.0);
                let cy = corner[1] + *height / T::of(2.0);
                let qx = (p[0] - cx).abs() - *width / T::of(2.0);
                let qy = (p[1] - cy).abs() - *height / T::of(2.0);
                let ax = qx.max(T::zero());
                let ay = qy.max(T::zero());
                (ax * ax + ay * ay).sqrt() + qx.max(qy).min(T::zero())
            }
            ShapeSpec::Disk { center, radius } => {
                (p[0] - center[0]).hypot(p[1] - center[1]) - *radius
            }
            ShapeSpec::Ellipse { center, semi_axes } => {
                // First-order approximation: |q|-1 rescaled by |grad |q||.
                let dx = (p[0] - center[0]) / semi_axes[0];
                let dy = (p[1] - center[1]) / semi_axes[1];
                let q = (dx * dx + dy * dy).sqrt();
                if q == T::zero() {
                    return -semi_axes[0].min(semi_axes[1]);
                }
                let gx = dx / semi_axes[0];
                let gy = dy / semi_axes[1];
                let g = (gx * gx + gy * gy).sqrt();
                q * (q - T::one()) / g
            }
            ShapeSpec::ConvexPolygon { vertices } => polygon_sdf(vertices, p),
            ShapeSpec::AnnulusSector { r_inner, r_outer, gap, smoothing } => {
                let r = p[0].hypot(p[1]);
                let d_annulus = (*r_inner - r).max(r - *r_outer);
                let d_sector = wedge_complement_sdf(p, *gap);
                smooth_max(d_annulus, d_sector, *smoothing)
            }
        }
    }

    /// Axis-aligned bounding box `[xmin, ymin, xmax, ymax]`.
    pub fn bounding_box(&self) -> [T; 4] {
        match self {
            ShapeSpec::Rectangle { corner, width, height } => {
                [corner[0], corner[1], corner[0] + *width, corner[1] + *height]
            }
            ShapeSpec::Disk { center, radius } => [
                center[0] - *radius,
                center[1] - *radius,
                center[0] + *radius,
                center[1] + *radius,
            ],
            ShapeSpec::Ellipse { center, semi_axes } => [
                center[0] - semi_axes[0],
                center[1] - semi_axes[1],
                center[0] + semi_axes[0],
                center[1] + semi_axes[1],
            ],
            ShapeSpec::ConvexPolygon { vertices } => {
                let mut bb = [T::infinity(), T::infinity(), T::neg_infinity(), T::neg_infinity()];
                for v in vertices {
                    bb[0] = bb[0].min(v[0]);
                    bb[1] = bb[1].min(v[1]);
                    bb[2] = bb[2].max(v[0]);
                    bb[3] = bb[3].max(v[1]);
                }
                bb
            }
            ShapeSpec::AnnulusSector { r_outer, .. } => {
                [-*r_outer, -*r_outer, *r_outer, *r_outer]
            }
        }
    }

    /// The shape scaled by `s > 0` about the origin (angles are unaffected).
    pub fn scaled(&self, s: T) -> ShapeSpec<T> {
        let sp = |v: [T; 2]| [v[0] * s, v[1] * s];
        match self {
            ShapeSpec::Rectangle { corner, width, height } => ShapeSpec::Rectangle {
                corner: sp(*corner),
                width: *width * s,
                height: *height * s,
            },
            ShapeSpec::Disk { center, radius } => ShapeSpec::Disk {
                center: sp(*center),
                radius: *radius * s,
            },
            ShapeSpec::Ellipse { center, semi_axes } => ShapeSpec::Ellipse {
                center: sp(*center),
                semi_axes: [semi_axes[0] * s, semi_axes[1] * s],
            },
            ShapeSpec::ConvexPolygon { vertices } => ShapeSpec::ConvexPolygon {
                vertices: vertices.iter().map(|&v| sp(v)).collect(),
            },
            ShapeSpec::AnnulusSector { r_inner, r_outer, gap, smoothing } => {
                ShapeSpec::AnnulusSector {
                    r_inner: *r_inner * s,
                    r_outer: *r_outer * s,
                    gap: *gap,
                    smoothing: *smoothing * s,
                }
            }
        }
    }
}

impl<T: Real> fmt::Display for ShapeSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeSpec::Rectangle { corner, width, height } => {
                write!(f, "rect({width}x{height}@{},{})", corner[0], corner[1])
            }
            ShapeSpec::Disk { center, radius } => {
                write!(f, "disk(r={radius}@{},{})", center[0], center[1])
            }
            ShapeSpec::Ellipse { center, semi_axes } => {
                write!(f, "ellipse({},{}@{},{})", semi_axes[0], semi_axes[1], center[0], center[1])
            }
            ShapeSpec::ConvexPolygon { vertices } => write!(f, "polygon(n={})", vertices.len()),
            ShapeSpec::AnnulusSector { r_inner, r_outer, gap, smoothing } => {
                write!(f, "annulus_sector({r_inner},{r_outer},gap={gap},rho={smoothing})")
            }
        }
    }
}

/// Quadratic polynomial smooth minimum with blend radius `k`.
pub fn smooth_min<T: Real>(a: T, b: T, k: T) -> T {
    if k <= T::zero() {
        return a.min(b);
    }
    let h = (k - (a - b).abs()).max(T::zero()) / k;
    a.min(b) - h * h * k * T::of(0.25)
}

/// Smooth maximum, dual of [`smooth_min`]; used for set intersections.
pub fn smooth_max<T: Real>(a: T, b: T, k: T) -> T {
    -smooth_min(-a, -b, k)
}

/// Signed distance to the complement of the wedge `0 <= theta <= gap`
/// (negative outside the wedge, i.e. inside the angular sector kept).
fn wedge_complement_sdf<T: Real>(p: [T; 2], gap: T) -> T {
    let d0 = dist_to_ray(p, [T::one(), T::zero()]);
    let d1 = dist_to_ray(p, [gap.cos(), gap.sin()]);
    let d = d0.min(d1);
    let theta = p[1].atan2(p[0]);
    let in_wedge = theta >= T::zero() && theta <= gap;
    if in_wedge {
        d
    } else {
        -d
    }
}

fn dist_to_ray<T: Real>(p: [T; 2], u: [T; 2]) -> T {
    let s = (p[0] * u[0] + p[1] * u[1]).max(T::zero());
    (p[0] - s * u[0]).hypot(p[1] - s * u[1])
}

fn validate_polygon<T: Real>(vertices: &[[T; 2]]) -> Result<()> {
    if vertices.len() < 3 {
        return Err(Error::InvalidShape("polygon needs at least 3 vertices".into()));
    }
    let n = vertices.len();
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let c = vertices[(i + 2) % n];
        let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
        if cross <= T::zero() {
            return Err(Error::InvalidShape(
                "polygon must be strictly convex and counterclockwise".into(),
            ));
        }
    }
    Ok(())
}

fn polygon_sdf<T: Real>(vertices: &[[T; 2]], p: [T; 2]) -> T {
    let n = vertices.len();
    let mut d2 = T::infinity();
    let mut inside = true;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        let ex = b[0] - a[0];
        let ey = b[1] - a[1];
        let wx = p[0] - a[0];
        let wy = p[1] - a[1];
        let t = ((wx * ex + wy * ey) / (ex * ex + ey * ey)).max(T::zero()).min(T::one());
        let dx = wx - t * ex;
        let dy = wy - t * ey;
        d2 = d2.min(dx * dx + dy * dy);
        if ex * wy - ey * wx <= T::zero() {
            inside = false;
        }
    }
    let d = d2.sqrt();
    if inside {
        -d
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_sdf_exact() {
        let r = ShapeSpec::Rectangle { corner: [0.0, 0.0], width: 2.0, height: 1.0 };
        assert_eq!(r.signed_distance([1.0, 0.5]), -0.5);
        assert_eq!(r.signed_distance([1.0, 0.0]), 0.0);
        assert_eq!(r.signed_distance([3.0, 0.5]), 1.0);
        // outside a corner: Euclidean distance
        let d: f64 = r.signed_distance([-3.0, -4.0]);
        assert!((d - 5.0).abs() < 1e-15);
    }

    #[test]
    fn disk_sdf_exact() {
        let d = ShapeSpec::Disk { center: [1.0, 1.0], radius: 2.0 };
        assert_eq!(d.signed_distance([1.0, 1.0]), -2.0);
        assert_eq!(d.signed_distance([4.0, 1.0]), 1.0);
    }

    #[test]
    fn degenerate_rectangle_rejected() {
        let r = ShapeSpec::Rectangle { corner: [0.0, 0.0], width: 0.0, height: 1.0 };
        assert!(matches!(r.validate(), Err(Error::InvalidShape(_))));
    }

    #[test]
    fn polygon_orientation_checked() {
        let cw: ShapeSpec<f64> = ShapeSpec::ConvexPolygon {
            vertices: vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]],
        };
        assert!(cw.validate().is_err());
        let ccw: ShapeSpec<f64> = ShapeSpec::ConvexPolygon {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
        };
        assert!(ccw.validate().is_ok());
        assert!((ccw.signed_distance([0.5, 0.5]) + 0.5).abs() < 1e-15);
        assert!((ccw.signed_distance([2.0, 0.5]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ellipse_sign_and_axes() {
        let e: ShapeSpec<f64> = ShapeSpec::Ellipse { center: [0.0, 0.0], semi_axes: [2.0, 1.0] };
        assert!(e.signed_distance([0.0, 0.0]) < 0.0);
        assert!((e.signed_distance([2.0, 0.0])).abs() < 1e-12);
        assert!((e.signed_distance([0.0, 1.0])).abs() < 1e-12);
        assert!(e.signed_distance([3.0, 0.0]) > 0.0);
    }

    #[test]
    fn annulus_sector_sdf_signs() {
        let a = ShapeSpec::AnnulusSector { r_inner: 1.0, r_outer: 2.0, gap: 0.3, smoothing: 0.05 };
        a.validate().unwrap();
        // deep inside, far from the slit (theta = pi)
        assert!(a.signed_distance([-1.5, 0.0]) < 0.0);
        // inside the hole
        assert!(a.signed_distance([0.0, 0.0]) > 0.0);
        // inside the removed wedge at mid radius
        let t = 0.15f64;
        assert!(a.signed_distance([1.5 * t.cos(), 1.5 * t.sin()]) > 0.0);
        // outside
        assert!(a.signed_distance([3.0, 0.0]) > 0.0);
    }

    #[test]
    fn annulus_sector_validation() {
        let bad_gap =
            ShapeSpec::AnnulusSector { r_inner: 1.0, r_outer: 2.0, gap: 2.0, smoothing: 0.05 };
        assert!(bad_gap.validate().is_err());
        let bad_rho =
            ShapeSpec::AnnulusSector { r_inner: 1.0, r_outer: 2.0, gap: 0.3, smoothing: 0.3 };
        assert!(bad_rho.validate().is_err());
    }

    #[test]
    fn scaling_scales_lengths_not_angles() {
        let a = ShapeSpec::AnnulusSector { r_inner: 1.0, r_outer: 2.0, gap: 0.3, smoothing: 0.05 };
        match a.scaled(0.5) {
            ShapeSpec::AnnulusSector { r_inner, r_outer, gap, smoothing } => {
                assert_eq!(r_inner, 0.5);
                assert_eq!(r_outer, 1.0);
                assert_eq!(gap, 0.3);
                assert_eq!(smoothing, 0.025);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn smooth_min_blends() {
        assert_eq!(smooth_min(1.0, 5.0, 0.5), 1.0);
        let v = smooth_min(1.0, 1.0, 0.5);
        assert!(v < 1.0 && v > 0.8);
    }
}
