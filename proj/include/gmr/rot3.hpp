#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "gmr/errors.hpp"

namespace gmr {

// Four interchangeable encodings of one SO(3) element.
//
// Conventions:
//  - quaternions are (w, x, y, z) with w >= 0 (if w == 0, first nonzero of
//    x, y, z is >= 0);
//  - axis-angle vectors live in the canonical ball ||v|| <= pi, the zero
//    vector is the identity;
//  - 6D is the first two columns of an unconstrained matrix, decoded by
//    Gram-Schmidt.

struct UnitQuaternion {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    /// Normalizes and applies the canonical sign. Throws InvalidInput on
    /// non-finite or near-zero input.
    static UnitQuaternion fromComponents(double w, double x, double y, double z);

    Eigen::Vector4d coeffs() const { return {w, x, y, z}; }
};

/// Axis-angle 3-vector: direction = axis, magnitude = angle in radians.
struct AxisAngle {
    Eigen::Vector3d v = Eigen::Vector3d::Zero();

    /// Wraps into the canonical ball ||v|| <= pi. Throws on non-finite input.
    static AxisAngle wrapped(const Eigen::Vector3d& v);

    double angle() const { return v.norm(); }
};

using RotMatrix = Eigen::Matrix3d;

/// First two columns of an unconstrained 3x3 matrix (continuity representation).
struct SixD {
    Eigen::Vector3d a, b;
};

// Conversions. All round-trips close within 1e-8.
RotMatrix aa_to_mat(const AxisAngle& v);
AxisAngle mat_to_aa(const RotMatrix& m);
RotMatrix quat_to_mat(const UnitQuaternion& q);
UnitQuaternion mat_to_quat(const RotMatrix& m);
AxisAngle quat_to_aa(const UnitQuaternion& q);
UnitQuaternion aa_to_quat(const AxisAngle& v);
RotMatrix sixd_to_mat(const SixD& s);
SixD mat_to_sixd(const RotMatrix& m);

/// ||log(m2 * m1^T)||_2 in [0, pi]; symmetric and bi-invariant.
double geodesic_angle(const RotMatrix& m1, const RotMatrix& m2);

/// Throws InvalidRotation if m^T m deviates from I or det(m) from 1 by more
/// than 1e-6.
void check_rotation(const RotMatrix& m);

/// Rotation by `angle` about the world z axis.
RotMatrix rot_z(double angle);

/// Uniform sample on SO(3) via a normalized 4D Gaussian quaternion.
UnitQuaternion random_quaternion(std::mt19937_64& rng);

/// Quaternion product (Hamilton convention), canonicalized.
UnitQuaternion quat_mul(const UnitQuaternion& p, const UnitQuaternion& q);

}  // namespace gmr
