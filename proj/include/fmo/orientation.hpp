// How a complex's orientation changes the polarization it sees.

#pragma once

#include <Eigen/Dense>

namespace fmo {

enum class OrientationKind {
    // (theta, phi) are added to the pulse's polarization angles.
    AngleOffset,
    // (theta, phi) is a unit direction n expressed in the frame whose z axis is the
    // pulse polarization; the complex sees Q(e) n with Q the minimal rotation z -> e.
    // n = z is the unrotated complex, n uniform on the sphere is an isotropic sample.
    Direction,
};

struct Orientation {
    double theta{0.0};
    double phi{0.0};
    OrientationKind kind{OrientationKind::AngleOffset};

    static Orientation offset(double theta, double phi) {
        return {theta, phi, OrientationKind::AngleOffset};
    }
    static Orientation direction(double theta, double phi) {
        return {theta, phi, OrientationKind::Direction};
    }
    static Orientation direction(const Eigen::Vector3d& n);

    Eigen::Vector3d unit_vector() const;
};

// Minimal rotation taking z to the unit vector (sin t cos p, sin t sin p, cos t).
Eigen::Matrix3d minimal_rotation(double theta, double phi);

// Polarization direction in the molecular frame for a pulse with absolute polarization
// angles (theta, phi) acting on a complex with orientation o.
Eigen::Vector3d effective_polarization(double theta, double phi, const Orientation& o);

}  // namespace fmo
