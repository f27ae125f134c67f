use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix2, Matrix3};
use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupId {
    So2,
    O2,
    So3,
}

impl GroupId {
    pub fn tag(self) -> u8 {
        match self {
            GroupId::So2 => 0,
            GroupId::O2 => 1,
            GroupId::So3 => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(GroupId::So2),
            1 => Some(GroupId::O2),
            2 => Some(GroupId::So3),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GroupId::So2 => "SO2",
            GroupId::O2 => "O2",
            GroupId::So3 => "SO3",
        }
    }
}

impl std::str::FromStr for GroupId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "so2" => Ok(GroupId::So2),
            "o2" => Ok(GroupId::O2),
            "so3" => Ok(GroupId::So3),
            other => Err(Error::InvalidArgument(format!("unknown group '{other}'"))),
        }
    }
}

/// A group element in its canonical parameterization.
///
/// - SO(2): angle `theta` in `[0, 2pi)`.
/// - O(2): `theta` in `[0, 2pi)` plus a reflection flag. The rotation branch is the
///   counter-clockwise rotation `[[cos, -sin], [sin, cos]]`, the reflection branch is
///   `[[cos, sin], [sin, -cos]]`.
/// - SO(3): Euler angles with `R = Z(alpha) Y(beta) Z(gamma)`, where
///   `Z(t) = [[cos t, sin t, 0], [-sin t, cos t, 0], [0, 0, 1]]` and
///   `Y(t) = [[cos t, 0, sin t], [0, 1, 0], [-sin t, 0, cos t]]`;
///   `alpha, gamma` in `[0, 2pi)`, `beta` in `[0, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupElement {
    So2 { theta: f64 },
    O2 { theta: f64, reflection: bool },
    So3 { alpha: f64, beta: f64, gamma: f64 },
}

#[inline]
pub(crate) fn wrap_angle(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Below this `sin(beta)` the Euler decomposition is treated as gimbal-locked.
const GIMBAL_EPS: f64 = 1e-12;

impl GroupElement {
    pub fn so2(theta: f64) -> Self {
        GroupElement::So2 {
            theta: wrap_angle(theta),
        }
    }

    pub fn rotation(theta: f64) -> Self {
        GroupElement::O2 {
            theta: wrap_angle(theta),
            reflection: false,
        }
    }

    pub fn reflection(theta: f64) -> Self {
        GroupElement::O2 {
            theta: wrap_angle(theta),
            reflection: true,
        }
    }

    /// SO(3) element from Euler angles; `beta` outside `[0, pi]` is re-canonicalized
    /// through the rotation matrix.
    pub fn euler(alpha: f64, beta: f64, gamma: f64) -> Self {
        if (0.0..=PI).contains(&beta) {
            GroupElement::So3 {
                alpha: wrap_angle(alpha),
                beta,
                gamma: wrap_angle(gamma),
            }
        } else {
            Self::from_rotation_matrix(&euler_matrix(alpha, beta, gamma))
        }
    }

    /// Haar-distributed element; for SO(3), `cos(beta)` is uniform on `[-1, 1]`.
    pub fn haar<R: Rng + ?Sized>(group: GroupId, rng: &mut R) -> Self {
        match group {
            GroupId::So2 => Self::so2(rng.random::<f64>() * TAU),
            GroupId::O2 => {
                let t = rng.random::<f64>() * TAU;
                if rng.random_bool(0.5) {
                    Self::reflection(t)
                } else {
                    Self::rotation(t)
                }
            }
            GroupId::So3 => {
                let a = rng.random::<f64>() * TAU;
                let c: f64 = rng.random_range(-1.0..=1.0);
                let g = rng.random::<f64>() * TAU;
                Self::euler(a, c.acos(), g)
            }
        }
    }

    pub fn identity(group: GroupId) -> Self {
        match group {
            GroupId::So2 => Self::so2(0.0),
            GroupId::O2 => Self::rotation(0.0),
            GroupId::So3 => Self::euler(0.0, 0.0, 0.0),
        }
    }

    pub fn group(&self) -> GroupId {
        match self {
            GroupElement::So2 { .. } => GroupId::So2,
            GroupElement::O2 { .. } => GroupId::O2,
            GroupElement::So3 { .. } => GroupId::So3,
        }
    }

    /// Group product `self * other`.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        use GroupElement::*;
        match (*self, *other) {
            (So2 { theta: a }, So2 { theta: b }) => Ok(Self::so2(a + b)),
            (
                O2 {
                    theta: a,
                    reflection: ra,
                },
                O2 {
                    theta: b,
                    reflection: rb,
                },
            ) => Ok(match (ra, rb) {
                (false, false) => Self::rotation(a + b),
                (false, true) => Self::reflection(a + b),
                (true, false) => Self::reflection(a - b),
                (true, true) => Self::rotation(a - b),
            }),
            (So3 { .. }, So3 { .. }) => {
                let m = self.rotation_matrix() * other.rotation_matrix();
                Ok(Self::from_rotation_matrix(&m))
            }
            (a, b) => Err(Error::GroupMismatch {
                expected: a.group(),
                found: b.group(),
            }),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match *self {
            GroupElement::So2 { theta } => Self::so2(-theta),
            GroupElement::O2 {
                theta,
                reflection: false,
            } => Self::rotation(-theta),
            GroupElement::O2 {
                theta,
                reflection: true,
            } => Self::reflection(theta),
            GroupElement::So3 { .. } => {
                Self::from_rotation_matrix(&self.rotation_matrix().transpose())
            }
        }
    }

    /// Defining 2x2 real matrix of an SO(2)/O(2) element.
    pub fn planar_matrix(&self) -> Option<Matrix2<f64>> {
        match *self {
            GroupElement::So2 { theta }
            | GroupElement::O2 {
                theta,
                reflection: false,
            } => {
                let (s, c) = theta.sin_cos();
                Some(Matrix2::new(c, -s, s, c))
            }
            GroupElement::O2 {
                theta,
                reflection: true,
            } => {
                let (s, c) = theta.sin_cos();
                Some(Matrix2::new(c, s, s, -c))
            }
            GroupElement::So3 { .. } => None,
        }
    }

    /// Inverse of [`GroupElement::planar_matrix`] for orthogonal 2x2 matrices.
    pub fn from_planar_matrix(m: &Matrix2<f64>) -> GroupElement {
        let theta = m[(1, 0)].atan2(m[(0, 0)]);
        if m.determinant() >= 0.0 {
            Self::rotation(theta)
        } else {
            Self::reflection(theta)
        }
    }

    /// 3x3 rotation matrix of an SO(3) element (identity for other groups).
    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        match *self {
            GroupElement::So3 { alpha, beta, gamma } => euler_matrix(alpha, beta, gamma),
            _ => Matrix3::identity(),
        }
    }

    /// Canonical Euler angles of a rotation matrix.
    ///
    /// At gimbal lock (`beta` = 0 or pi) `gamma` is set to 0 and the total
    /// rotation about the z-axis is folded into `alpha`.
    pub fn from_rotation_matrix(r: &Matrix3<f64>) -> GroupElement {
        let sb = r[(0, 2)].hypot(r[(1, 2)]);
        let beta = sb.atan2(r[(2, 2)]);
        if sb > GIMBAL_EPS {
            let alpha = (-r[(1, 2)]).atan2(r[(0, 2)]);
            let gamma = (-r[(2, 1)]).atan2(-r[(2, 0)]);
            GroupElement::So3 {
                alpha: wrap_angle(alpha),
                beta,
                gamma: wrap_angle(gamma),
            }
        } else if r[(2, 2)] > 0.0 {
            GroupElement::So3 {
                alpha: wrap_angle(r[(0, 1)].atan2(r[(0, 0)])),
                beta: 0.0,
                gamma: 0.0,
            }
        } else {
            GroupElement::So3 {
                alpha: wrap_angle(r[(0, 1)].atan2(r[(1, 1)])),
                beta: PI,
                gamma: 0.0,
            }
        }
    }
}

pub(crate) fn z_matrix(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, s, 0.0, -s, c, 0.0, 0.0, 0.0, 1.0)
}

pub(crate) fn y_matrix(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

pub(crate) fn euler_matrix(alpha: f64, beta: f64, gamma: f64) -> Matrix3<f64> {
    z_matrix(alpha) * y_matrix(beta) * z_matrix(gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn euler_round_trip_through_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let g = GroupElement::euler(
                rng.random::<f64>() * TAU,
                rng.random::<f64>() * PI,
                rng.random::<f64>() * TAU,
            );
            let back = GroupElement::from_rotation_matrix(&g.rotation_matrix());
            assert!((back.rotation_matrix() - g.rotation_matrix()).norm() < 1e-12);
            if let (
                GroupElement::So3 {
                    alpha: a,
                    beta: b,
                    gamma: c,
                },
                GroupElement::So3 { alpha, beta, gamma },
            ) = (g, back)
            {
                assert!(
                    (a - alpha).abs() < 1e-9 && (b - beta).abs() < 1e-9 && (c - gamma).abs() < 1e-9
                );
            }
        }
    }

    #[test]
    fn gimbal_lock_folds_into_alpha() {
        let g = GroupElement::euler(0.3, 0.0, 0.4);
        let back = GroupElement::from_rotation_matrix(&g.rotation_matrix());
        match back {
            GroupElement::So3 { alpha, beta, gamma } => {
                assert!((alpha - 0.7).abs() < 1e-12 && beta == 0.0 && gamma == 0.0);
            }
            _ => unreachable!(),
        }
        let g = GroupElement::euler(0.3, PI, 0.4);
        let back = GroupElement::from_rotation_matrix(&g.rotation_matrix());
        assert!((back.rotation_matrix() - g.rotation_matrix()).norm() < 1e-12);
        assert!(matches!(back, GroupElement::So3 { gamma, .. } if gamma == 0.0));
    }

    #[test]
    fn o2_composition_matches_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let a = if rng.random() {
                GroupElement::reflection(rng.random::<f64>() * TAU)
            } else {
                GroupElement::rotation(rng.random::<f64>() * TAU)
            };
            let b = if rng.random() {
                GroupElement::reflection(rng.random::<f64>() * TAU)
            } else {
                GroupElement::rotation(rng.random::<f64>() * TAU)
            };
            let ab = a.compose(&b).unwrap();
            let m = a.planar_matrix().unwrap() * b.planar_matrix().unwrap();
            assert!((ab.planar_matrix().unwrap() - m).norm() < 1e-12);
            let inv = a.compose(&a.inverse()).unwrap();
            assert!((inv.planar_matrix().unwrap() - Matrix2::identity()).norm() < 1e-12);
        }
    }

    #[test]
    fn mixed_groups_rejected() {
        assert!(GroupElement::so2(0.1)
            .compose(&GroupElement::rotation(0.2))
            .is_err());
    }
}
