#include "fmo/orientation.hpp"

#include "fmo/model.hpp"

#include <algorithm>
#include <cmath>

namespace fmo {

Orientation Orientation::direction(const Eigen::Vector3d& n) {
    const Eigen::Vector3d u = n.normalized();
    return direction(std::acos(std::clamp(u.z(), -1.0, 1.0)), std::atan2(u.y(), u.x()));
}

Eigen::Vector3d Orientation::unit_vector() const { return polarization_vector(theta, phi); }

Eigen::Matrix3d minimal_rotation(double theta, double phi) {
    const Eigen::Matrix3d rz = Eigen::AngleAxisd(phi, Eigen::Vector3d::UnitZ()).toRotationMatrix();
    const Eigen::Matrix3d ry = Eigen::AngleAxisd(theta, Eigen::Vector3d::UnitY()).toRotationMatrix();
    return rz * ry * rz.transpose();
}

Eigen::Vector3d effective_polarization(double theta, double phi, const Orientation& o) {
    switch (o.kind) {
        case OrientationKind::AngleOffset:
            return polarization_vector(theta + o.theta, phi + o.phi);
        case OrientationKind::Direction:
            return minimal_rotation(theta, phi) * o.unit_vector();
    }
    return polarization_vector(theta, phi);
}

}  // namespace fmo
