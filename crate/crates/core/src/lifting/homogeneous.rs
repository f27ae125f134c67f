//! Lifting functions on a homogeneous space `X = G x0` to functions on `G`
//! and projecting back by averaging over the stabilizer of `x0`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::group::{FourierCoefficients, GroupElement, GroupId, QuadratureGrid, Samples};
use crate::linalg::C64;

const FIX_TOL: f64 = 1e-9;

/// Origin, acting group and a finite sampler of `Stab(x0)`.
#[derive(Debug, Clone)]
pub struct HomogeneousLiftConfig {
    origin: Vec<f64>,
    group: GroupId,
    stabilizer: Vec<GroupElement>,
}

/// `g . x` for the defining action on the plane (SO(2), O(2)) or space (SO(3)).
pub fn act(g: &GroupElement, x: &[f64]) -> Vec<f64> {
    match g.planar_matrix() {
        Some(m) => {
            let v = m * Vector2::new(x[0], x[1]);
            vec![v[0], v[1]]
        }
        None => {
            let v = g.rotation_matrix() * Vector3::new(x[0], x[1], x[2]);
            vec![v[0], v[1], v[2]]
        }
    }
}

fn ambient_dim(group: GroupId) -> usize {
    match group {
        GroupId::So2 | GroupId::O2 => 2,
        GroupId::So3 => 3,
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Right-handed orthonormal frame whose third column is `u / |u|`.
pub(crate) fn frame_with_axis(u: &Vector3<f64>) -> Matrix3<f64> {
    let z = u.normalize();
    let helper = if z[0].abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let x = (helper - z * helper.dot(&z)).normalize();
    let y = z.cross(&x);
    Matrix3::from_columns(&[x, y, z])
}

impl HomogeneousLiftConfig {
    pub fn new(origin: Vec<f64>, group: GroupId, stabilizer: Vec<GroupElement>) -> Result<Self> {
        if origin.len() != ambient_dim(group) {
            return Err(Error::Shape(format!(
                "{} acts on R^{}, origin has {} coordinates",
                group.name(),
                ambient_dim(group),
                origin.len()
            )));
        }
        if norm(&origin) == 0.0 {
            return Err(Error::InvalidArgument("origin must be nonzero".into()));
        }
        for z in &stabilizer {
            if z.group() != group {
                return Err(Error::GroupMismatch {
                    expected: group,
                    found: z.group(),
                });
            }
            let d = dist(&act(z, &origin), &origin);
            if d > FIX_TOL {
                return Err(Error::InvalidArgument(format!(
                    "stabilizer sample moves the origin by {d:e}"
                )));
            }
        }
        if stabilizer.is_empty() {
            return Err(Error::InvalidArgument("empty stabilizer sampler".into()));
        }
        Ok(HomogeneousLiftConfig {
            origin,
            group,
            stabilizer,
        })
    }

    /// `S^2` with origin at the north pole and `2N + 2` rotations about the z-axis.
    pub fn sphere(bandwidth: usize) -> Self {
        Self::sphere_with_origin([0.0, 0.0, 1.0], 2 * bandwidth + 2).expect("valid origin")
    }

    /// `S^2` with an arbitrary unit origin and `k` equally spaced rotations about it.
    pub fn sphere_with_origin(origin: [f64; 3], k: usize) -> Result<Self> {
        let u = Vector3::from(origin);
        if (u.norm() - 1.0).abs() > FIX_TOL {
            return Err(Error::InvalidArgument(
                "sphere origin must be a unit vector".into(),
            ));
        }
        let f = frame_with_axis(&u);
        let stab = (0..k.max(1))
            .map(|i| {
                let t = 2.0 * PI * i as f64 / k.max(1) as f64;
                let z = GroupElement::euler(t, 0.0, 0.0).rotation_matrix();
                GroupElement::from_rotation_matrix(&(f * z * f.transpose()))
            })
            .collect();
        Self::new(origin.to_vec(), GroupId::So3, stab)
    }

    /// Unit circle with origin `(1, 0)`; O(2) adds the reflection fixing it.
    pub fn circle(group: GroupId) -> Result<Self> {
        let stab = match group {
            GroupId::So2 => vec![GroupElement::so2(0.0)],
            GroupId::O2 => vec![GroupElement::rotation(0.0), GroupElement::reflection(0.0)],
            GroupId::So3 => {
                return Err(Error::InvalidArgument(
                    "the circle is not an SO(3) space".into(),
                ))
            }
        };
        Self::new(vec![1.0, 0.0], group, stab)
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn stabilizer(&self) -> &[GroupElement] {
        &self.stabilizer
    }

    /// Some `g` with `g x0 = x`; `NotTransitive` when `x` is off the orbit of `x0`.
    pub fn witness(&self, x: &[f64]) -> Result<GroupElement> {
        if x.len() != self.origin.len() {
            return Err(Error::Shape(
                "point dimension does not match the origin".into(),
            ));
        }
        let gap = (norm(x) - norm(&self.origin)).abs();
        if gap > FIX_TOL * norm(&self.origin).max(1.0) {
            return Err(Error::NotTransitive(gap));
        }
        Ok(match self.group {
            GroupId::So2 => {
                GroupElement::so2(x[1].atan2(x[0]) - self.origin[1].atan2(self.origin[0]))
            }
            GroupId::O2 => {
                GroupElement::rotation(x[1].atan2(x[0]) - self.origin[1].atan2(self.origin[0]))
            }
            GroupId::So3 => {
                let fx = frame_with_axis(&Vector3::new(x[0], x[1], x[2]));
                let f0 = frame_with_axis(&Vector3::new(
                    self.origin[0],
                    self.origin[1],
                    self.origin[2],
                ));
                GroupElement::from_rotation_matrix(&(fx * f0.transpose()))
            }
        })
    }
}

/// `f_y(g) = y(g x0)` at each of `elements`.
pub fn lift_homogeneous<F>(y: F, cfg: &HomogeneousLiftConfig, elements: &[GroupElement]) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    crate::par::map(elements, |_, g| y(&act(g, cfg.origin())))
}

/// Lift of a function given by samples on `X`, interpolated by nearest
/// sample point, tabulated on `grid`.
pub fn lift_samples(
    points: &[Vec<f64>],
    values: &[f64],
    cfg: &HomogeneousLiftConfig,
    grid: &QuadratureGrid,
) -> Result<Samples> {
    if points.len() != values.len() || points.is_empty() {
        return Err(Error::Shape("need one value per sample point".into()));
    }
    if grid.group() != cfg.group() {
        return Err(Error::GroupMismatch {
            expected: cfg.group(),
            found: grid.group(),
        });
    }
    for p in points {
        cfg.witness(p)?;
    }
    let nearest = |x: &[f64]| {
        let mut best = (f64::INFINITY, 0.0);
        for (p, v) in points.iter().zip(values) {
            let d = dist(p, x);
            if d < best.0 {
                best = (d, *v);
            }
        }
        best.1
    };
    let vals = lift_homogeneous(nearest, cfg, &grid.points());
    Samples::new(
        grid.clone(),
        vals.into_iter().map(|v| C64::new(v, 0.0)).collect(),
    )
}

/// `phi` averaged over the coset `g Stab(x0)` with `g x0 = x` (real part).
pub fn project_to_homogeneous(
    phi: &FourierCoefficients,
    cfg: &HomogeneousLiftConfig,
    x: &[f64],
) -> Result<f64> {
    if phi.table().group() != cfg.group() {
        return Err(Error::GroupMismatch {
            expected: cfg.group(),
            found: phi.table().group(),
        });
    }
    let g = cfg.witness(x)?;
    let mut acc = 0.0;
    for z in cfg.stabilizer() {
        acc += phi.synthesize(&g.compose(z)?)?.re;
    }
    Ok(acc / cfg.stabilizer().len() as f64)
}
