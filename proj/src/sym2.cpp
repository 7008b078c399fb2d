#include "phom/sym2.hpp"

namespace phom {

Sym2 rotate(const Sym2 &q, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    // R = [[c, -s], [s, c]], result = R^T Q R
    const double r11 = c * (q.a11 * c + q.a12 * s) + s * (q.a12 * c + q.a22 * s);
    const double r12 = c * (-q.a11 * s + q.a12 * c) + s * (-q.a12 * s + q.a22 * c);
    const double r22 = -s * (-q.a11 * s + q.a12 * c) + c * (-q.a12 * s + q.a22 * c);
    return {r11, r12, r22};
}

EigenFrame eigen_decompose(const Sym2 &q) {
    EigenFrame f;
    const double m = 0.5 * (q.a11 + q.a22);
    const double d = 0.5 * (q.a11 - q.a22);
    const double disc = std::sqrt(d * d + q.a12 * q.a12);
    f.lambda_min = m - disc;
    f.lambda_max = m + disc;
    if (disc < kRepeatedEigenTol) {
        f.lambda_min = f.lambda_max = m;
        return f;
    }
    // Eigenvector for lambda_max: (a12, lambda_max - a11) or (lambda_max - a22, a12);
    // pick the better-conditioned of the two.
    double x, y;
    if (d >= 0.0) {
        x = d + disc;
        y = q.a12;
    } else {
        x = q.a12;
        y = disc - d;
    }
    const double len = std::hypot(x, y);
    f.v_max = {x / len, y / len};
    f.v_min = {f.v_max[1], -f.v_max[0]};
    return f;
}

}  // namespace phom
