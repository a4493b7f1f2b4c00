#include "gmr/rot3.hpp"

#include <cmath>

namespace gmr {

namespace {

constexpr double kSmallAngle = 1e-8;

bool finite(const Eigen::Vector3d& v) { return v.allFinite(); }

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
    Eigen::Matrix3d s;
    s << 0, -v.z(), v.y(),
         v.z(), 0, -v.x(),
        -v.y(), v.x(), 0;
    return s;
}

}  // namespace

UnitQuaternion UnitQuaternion::fromComponents(double w, double x, double y, double z) {
    if (!std::isfinite(w) || !std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
        throw InvalidInput("quaternion components must be finite");
    }
    double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (n < 1e-12) throw InvalidInput("quaternion norm too small to normalize");
    w /= n; x /= n; y /= n; z /= n;
    // canonical sign: w >= 0, tie-broken on the first nonzero imaginary part
    bool flip = w < 0.0;
    if (w == 0.0) {
        if (x != 0.0) flip = x < 0.0;
        else if (y != 0.0) flip = y < 0.0;
        else flip = z < 0.0;
    }
    if (flip) { w = -w; x = -x; y = -y; z = -z; }
    return UnitQuaternion{w, x, y, z};
}

AxisAngle AxisAngle::wrapped(const Eigen::Vector3d& v) {
    if (!finite(v)) throw InvalidInput("axis-angle vector must be finite");
    double theta = v.norm();
    if (theta <= M_PI) return AxisAngle{v};
    Eigen::Vector3d axis = v / theta;
    double r = std::fmod(theta, 2.0 * M_PI);
    if (r > M_PI) r -= 2.0 * M_PI;
    // negative residual = positive rotation about the flipped axis
    if (r < 0.0) { axis = -axis; r = -r; }
    return AxisAngle{axis * r};
}

RotMatrix aa_to_mat(const AxisAngle& aa) {
    const Eigen::Vector3d& v = aa.v;
    if (!finite(v)) throw InvalidInput("axis-angle vector must be finite");
    double theta = v.norm();
    Eigen::Matrix3d k = skew(v);
    double a, b;  // R = I + a*K + b*K^2 with K = skew(v)
    if (theta < kSmallAngle) {
        // second-order Taylor of sin(t)/t and (1-cos(t))/t^2
        double t2 = theta * theta;
        a = 1.0 - t2 / 6.0;
        b = 0.5 - t2 / 24.0;
    } else {
        a = std::sin(theta) / theta;
        b = (1.0 - std::cos(theta)) / (theta * theta);
    }
    return Eigen::Matrix3d::Identity() + a * k + b * (k * k);
}

void check_rotation(const RotMatrix& m) {
    if (!m.allFinite()) throw InvalidRotation("rotation matrix must be finite");
    double ortho = (m.transpose() * m - Eigen::Matrix3d::Identity()).norm();
    if (ortho > 1e-6) throw InvalidRotation("matrix is not orthonormal");
    if (std::abs(m.determinant() - 1.0) > 1e-6) throw InvalidRotation("matrix determinant is not +1");
}

AxisAngle mat_to_aa(const RotMatrix& m) {
    check_rotation(m);
    Eigen::Vector3d w(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
    double s = 0.5 * w.norm();                  // sin(theta)
    double c = 0.5 * (m.trace() - 1.0);         // cos(theta)
    double theta = std::atan2(s, c);
    if (theta < kSmallAngle) {
        return AxisAngle{0.5 * w};
    }
    if (theta < M_PI - 1e-4) {
        return AxisAngle{w * (theta / (2.0 * std::sin(theta)))};
    }
    // near pi the antisymmetric part vanishes; the quaternion path stays
    // accurate there (Shepperd's method branches on the dominant component)
    return quat_to_aa(mat_to_quat(m));
}

RotMatrix quat_to_mat(const UnitQuaternion& q) {
    double w = q.w, x = q.x, y = q.y, z = q.z;
    Eigen::Matrix3d m;
    m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return m;
}

UnitQuaternion mat_to_quat(const RotMatrix& m) {
    check_rotation(m);
    // Shepperd's method: branch on the largest of w,x,y,z
    double t = m.trace();
    double w, x, y, z;
    if (t > 0.0) {
        double r = std::sqrt(1.0 + t);
        w = 0.5 * r;
        double s = 0.5 / r;
        x = (m(2, 1) - m(1, 2)) * s;
        y = (m(0, 2) - m(2, 0)) * s;
        z = (m(1, 0) - m(0, 1)) * s;
    } else if (m(0, 0) >= m(1, 1) && m(0, 0) >= m(2, 2)) {
        double r = std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2));
        x = 0.5 * r;
        double s = 0.5 / r;
        w = (m(2, 1) - m(1, 2)) * s;
        y = (m(0, 1) + m(1, 0)) * s;
        z = (m(0, 2) + m(2, 0)) * s;
    } else if (m(1, 1) >= m(2, 2)) {
        double r = std::sqrt(1.0 - m(0, 0) + m(1, 1) - m(2, 2));
        y = 0.5 * r;
        double s = 0.5 / r;
        w = (m(0, 2) - m(2, 0)) * s;
        x = (m(0, 1) + m(1, 0)) * s;
        z = (m(1, 2) + m(2, 1)) * s;
    } else {
        double r = std::sqrt(1.0 - m(0, 0) - m(1, 1) + m(2, 2));
        z = 0.5 * r;
        double s = 0.5 / r;
        w = (m(1, 0) - m(0, 1)) * s;
        x = (m(0, 2) + m(2, 0)) * s;
        y = (m(1, 2) + m(2, 1)) * s;
    }
    return UnitQuaternion::fromComponents(w, x, y, z);
}

AxisAngle quat_to_aa(const UnitQuaternion& q) {
    Eigen::Vector3d im(q.x, q.y, q.z);
    double s = im.norm();
    if (s < kSmallAngle) {
        // w ~= 1 after canonicalization; first-order expansion
        return AxisAngle{2.0 * im};
    }
    double theta = 2.0 * std::atan2(s, q.w);  // in [0, pi] since w >= 0
    return AxisAngle{im * (theta / s)};
}

UnitQuaternion aa_to_quat(const AxisAngle& aa) {
    const Eigen::Vector3d& v = aa.v;
    if (!finite(v)) throw InvalidInput("axis-angle vector must be finite");
    double theta = v.norm();
    double half = 0.5 * theta;
    double f;  // sin(theta/2)/theta
    if (theta < kSmallAngle) {
        f = 0.5 - theta * theta / 48.0;
    } else {
        f = std::sin(half) / theta;
    }
    Eigen::Vector3d im = v * f;
    return UnitQuaternion::fromComponents(std::cos(half), im.x(), im.y(), im.z());
}

RotMatrix sixd_to_mat(const SixD& s) {
    if (!finite(s.a) || !finite(s.b)) throw InvalidInput("6D columns must be finite");
    double na = s.a.norm();
    if (na < 1e-9) throw Degenerate6d("first 6D column is (near) zero");
    Eigen::Vector3d c1 = s.a / na;
    Eigen::Vector3d r = s.b - s.b.dot(c1) * c1;
    double nr = r.norm();
    if (nr < 1e-9) throw Degenerate6d("6D columns are (near) parallel");
    Eigen::Vector3d c2 = r / nr;
    Eigen::Vector3d c3 = c1.cross(c2);
    Eigen::Matrix3d m;
    m.col(0) = c1;
    m.col(1) = c2;
    m.col(2) = c3;
    return m;
}

SixD mat_to_sixd(const RotMatrix& m) {
    check_rotation(m);
    return SixD{m.col(0), m.col(1)};
}

double geodesic_angle(const RotMatrix& m1, const RotMatrix& m2) {
    check_rotation(m1);
    check_rotation(m2);
    Eigen::Matrix3d r = m2 * m1.transpose();
    Eigen::Vector3d w(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
    return std::atan2(0.5 * w.norm(), 0.5 * (r.trace() - 1.0));
}

RotMatrix rot_z(double angle) {
    double c = std::cos(angle), s = std::sin(angle);
    Eigen::Matrix3d m;
    m << c, -s, 0,
         s, c, 0,
         0, 0, 1;
    return m;
}

UnitQuaternion random_quaternion(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    double w = n(rng), x = n(rng), y = n(rng), z = n(rng);
    return UnitQuaternion::fromComponents(w, x, y, z);
}

UnitQuaternion quat_mul(const UnitQuaternion& p, const UnitQuaternion& q) {
    return UnitQuaternion::fromComponents(
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w);
}

}  // namespace gmr
