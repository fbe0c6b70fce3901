#pragma once
#include <Eigen/Dense>

namespace solitonlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

inline Vec vec3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

} // namespace solitonlab
