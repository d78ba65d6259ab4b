#pragma once

#include <Eigen/Dense>

namespace leafstab {

using Vec3 = Eigen::Matrix<double, 3, 1>;
using Vec7 = Eigen::Matrix<double, 7, 1>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat3 = Eigen::Matrix<double, 3, 3>;
using Mat7 = Eigen::Matrix<double, 7, 7>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using MatX = Eigen::MatrixXd;
using VecX = Eigen::VectorXd;

// Skew-symmetric matrix of v, so that hat(v) * w == v.cross(w).
inline Mat3 hat(const Vec3& v) {
    Mat3 m;
    m <<    0.0, -v(2),  v(1),
           v(2),   0.0, -v(0),
          -v(1),  v(0),   0.0;
    return m;
}

// State of the body: angular impulse, linear impulse, direction of gravity in
// body coordinates. Stored as three 3-vectors, flattened to R^9 where a solver
// needs a single vector.
struct AmbientState {
    Vec3 Pi = Vec3::Zero();
    Vec3 P = Vec3::Zero();
    Vec3 Gamma = Vec3::Zero();

    Vec9 to_vec() const {
        Vec9 z;
        z << Pi, P, Gamma;
        return z;
    }

    static AmbientState from_vec(const Vec9& z) {
        AmbientState s;
        s.Pi = z.segment<3>(0);
        s.P = z.segment<3>(3);
        s.Gamma = z.segment<3>(6);
        return s;
    }
};

}  // namespace leafstab
