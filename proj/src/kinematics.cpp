#include "tricept/kinematics.hpp"

#include <cmath>
#include <string>

namespace tricept {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSingularLength = 1e-9;    // mm
constexpr double kMaxJacobianCond = 1e12;

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw InvalidArgumentError(std::string(what) + " must be finite");
}

} // namespace

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

TriceptGeometry::TriceptGeometry(double a_, double b_, double d_) : a(a_), b(b_), d(d_) {
    require_finite(a, "geometry a");
    require_finite(b, "geometry b");
    require_finite(d, "geometry d");
    if (a < 0.0) throw InvalidArgumentError("geometry a must be non-negative");
    if (b < 0.0) throw InvalidArgumentError("geometry b must be non-negative");
    if (d < 0.0) throw InvalidArgumentError("geometry d must be non-negative");
    if (a == 0.0 && b == 0.0) throw InvalidArgumentError("geometry a and b cannot both be zero");
}

Pose::Pose(double theta_, double psi_, double c_) : theta(theta_), psi(psi_), c(c_) {
    require_finite(theta, "pose theta");
    require_finite(psi, "pose psi");
    require_finite(c, "pose c");
    if (!(c > 0.0)) throw InvalidArgumentError("pose c must be positive");
}

PoseDomain::PoseDomain(double tmin, double tmax, double pmin, double pmax,
                       double cmin, double cmax)
    : theta_min(tmin), theta_max(tmax), psi_min(pmin), psi_max(pmax),
      c_min(cmin), c_max(cmax) {
    require_finite(tmin, "domain theta_min");
    require_finite(tmax, "domain theta_max");
    require_finite(pmin, "domain psi_min");
    require_finite(pmax, "domain psi_max");
    require_finite(cmin, "domain c_min");
    require_finite(cmax, "domain c_max");
    if (tmin > tmax) throw InvalidArgumentError("domain theta range empty");
    if (pmin > pmax) throw InvalidArgumentError("domain psi range empty");
    if (cmin > cmax) throw InvalidArgumentError("domain c range empty");
    if (!(cmin > 0.0)) throw InvalidArgumentError("domain c range must be positive");
}

Pose PoseDomain::centroid() const {
    return Pose(0.5 * (theta_min + theta_max), 0.5 * (psi_min + psi_max),
                0.5 * (c_min + c_max));
}

bool PoseDomain::contains(const Pose& p) const {
    return p.theta >= theta_min && p.theta <= theta_max &&
           p.psi >= psi_min && p.psi <= psi_max &&
           p.c >= c_min && p.c <= c_max;
}

Vec3 RotationMatrix::apply(const Vec3& v) const {
    return {dot(rows[0], v), dot(rows[1], v), dot(rows[2], v)};
}

LegLengths::LegLengths(double q1_, double q2_, double q3_) : q1(q1_), q2(q2_), q3(q3_) {
    require_finite(q1, "q1");
    require_finite(q2, "q2");
    require_finite(q3, "q3");
    if (!(q1 > 0.0 && q2 > 0.0 && q3 > 0.0))
        throw InvalidArgumentError("leg lengths must be strictly positive");
}

RotationMatrix rotation_matrix(double theta, double psi) {
    require_finite(theta, "theta");
    require_finite(psi, "psi");
    const double ct = std::cos(theta), st = std::sin(theta);
    const double cp = std::cos(psi), sp = std::sin(psi);
    return RotationMatrix{{Vec3{ct, sp * st, cp * st},
                           Vec3{0.0, cp, -sp},
                           Vec3{-st, ct * sp, ct * cp}}};
}

namespace {

std::array<Vec3, 3> platform_corners(double a) {
    const double r = a / kSqrt3;
    return {Vec3{r, 0.0, 0.0}, Vec3{-0.5 * r, 0.5 * a, 0.0}, Vec3{-0.5 * r, -0.5 * a, 0.0}};
}

std::array<Vec3, 3> platform_joints_raw(const TriceptGeometry& geom, double theta,
                                        double psi, double c) {
    const RotationMatrix rot = rotation_matrix(theta, psi);
    const auto corners = platform_corners(geom.a);
    std::array<Vec3, 3> cols;
    for (int i = 0; i < 3; ++i) {
        const Vec3 arm = {corners[i][0], corners[i][1], corners[i][2] + geom.d};
        Vec3 p = rot.apply(arm);
        p[2] += c; // passive extension enters in the global frame
        cols[i] = p;
    }
    return cols;
}

std::array<double, 3> leg_lengths_raw(const TriceptGeometry& geom, double theta,
                                      double psi, double c) {
    const auto a = platform_joints_raw(geom, theta, psi, c);
    const auto b = base_joints(geom);
    return {norm(sub(a[0], b[0])), norm(sub(a[1], b[1])), norm(sub(a[2], b[2]))};
}

} // namespace

std::array<Vec3, 3> platform_joints(const TriceptGeometry& geom, const Pose& pose) {
    return platform_joints_raw(geom, pose.theta, pose.psi, pose.c);
}

std::array<Vec3, 3> base_joints(const TriceptGeometry& geom) {
    const double r = geom.b / kSqrt3;
    return {Vec3{r, 0.0, 0.0}, Vec3{-0.5 * r, 0.5 * geom.b, 0.0},
            Vec3{-0.5 * r, -0.5 * geom.b, 0.0}};
}

LegVectors leg_vectors(const TriceptGeometry& geom, const Pose& pose) {
    LegVectors lv;
    lv.platform_joints = platform_joints(geom, pose);
    lv.base_joints = base_joints(geom);
    for (int i = 0; i < 3; ++i) {
        const Vec3 leg = sub(lv.platform_joints[i], lv.base_joints[i]);
        const double len = norm(leg);
        if (len < kSingularLength)
            throw SingularConfigError("leg " + std::to_string(i + 1) +
                                      " has zero length at this pose");
        lv.leg_lengths[i] = len;
        lv.leg_directions[i] = {leg[0] / len, leg[1] / len, leg[2] / len};
    }
    return lv;
}

LegLengths inverse_kinematics(const TriceptGeometry& geom, const Pose& pose) {
    const LegVectors lv = leg_vectors(geom, pose);
    return LegLengths(lv.leg_lengths[0], lv.leg_lengths[1], lv.leg_lengths[2]);
}

std::array<double, 3> expanded_discrepancy(const TriceptGeometry& geom, const Pose& pose) {
    const double a = geom.a, c = pose.c;
    const double ct = std::cos(pose.theta), st = std::sin(pose.theta);
    const double sp = std::sin(pose.psi);
    // printed q^2 minus direct ||A_i - B_i||^2, derived symbolically and
    // confirmed numerically in the test suite
    return {2.0 * a * c / kSqrt3 * st,
            -2.0 * a * c * (st / kSqrt3 + ct * sp),
            -2.0 * a * c * (st / kSqrt3 - ct * sp)};
}

LegLengths expanded_leg_lengths(const TriceptGeometry& geom, const Pose& pose) {
    const double a = geom.a, b = geom.b, d = geom.d, c = pose.c;
    const double ct = std::cos(pose.theta), st = std::sin(pose.theta);
    const double cp = std::cos(pose.psi), sp = std::sin(pose.psi);

    const double common = a * a / 3.0 + b * b / 3.0 + c * c + d * d;

    const double q1s = common - (2.0 / 3.0) * a * b * ct + 2.0 * c * d * ct * cp -
                       (2.0 * b * d / kSqrt3) * cp * st;

    const double q2s = common -
                       0.5 * a * b * (ct / 3.0 - sp * st / kSqrt3 + cp) +
                       b * d * (cp * st / kSqrt3 + sp) + 2.0 * c * d * ct * cp -
                       a * c * (st / kSqrt3 + ct * sp);

    const double q3s = common -
                       0.5 * a * b * (ct / 3.0 + sp * st / kSqrt3 + cp) +
                       b * d * (cp * st / kSqrt3 - sp) + 2.0 * c * d * ct * cp -
                       a * c * (st / kSqrt3 - ct * sp);

    const std::array<double, 3> squares = {q1s, q2s, q3s};
    for (int i = 0; i < 3; ++i)
        if (!(squares[i] > 0.0))
            throw AlgebraMismatchError("printed expansion gave non-positive q^2 for leg " +
                                           std::to_string(i + 1),
                                       i);
    return LegLengths(std::sqrt(q1s), std::sqrt(q2s), std::sqrt(q3s));
}

std::array<double, 3> closure_residual(const TriceptGeometry& geom, const Pose& pose,
                                       const LegLengths& lengths) {
    const LegVectors lv = leg_vectors(geom, pose);
    const RotationMatrix rot = rotation_matrix(pose.theta, pose.psi);
    const auto corners = platform_corners(geom.a);
    std::array<double, 3> res;
    for (int i = 0; i < 3; ++i) {
        const Vec3& n_l = lv.leg_directions[i];
        const Vec3 arm = {corners[i][0], corners[i][1], corners[i][2] + geom.d};
        const Vec3 rotated = rot.apply(arm);
        const Vec3 c_vec = {0.0, 0.0, pose.c};
        res[i] = dot(c_vec, n_l) + dot(rotated, n_l) - dot(lv.base_joints[i], n_l) -
                 lengths[static_cast<std::size_t>(i)];
    }
    return res;
}

namespace {

struct Solve3Result {
    Vec3 x;
    double cond;
};

// Solve J x = r for a 3x3 system via the adjugate, with an infinity-norm
// condition estimate. Throws on singular or badly conditioned J.
Solve3Result solve3(const std::array<Vec3, 3>& j, const Vec3& r) {
    const double det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
                       j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
                       j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    if (det == 0.0 || !std::isfinite(det))
        throw SingularConfigError("forward kinematics: singular Jacobian");

    std::array<Vec3, 3> inv;
    inv[0] = {(j[1][1] * j[2][2] - j[1][2] * j[2][1]) / det,
              (j[0][2] * j[2][1] - j[0][1] * j[2][2]) / det,
              (j[0][1] * j[1][2] - j[0][2] * j[1][1]) / det};
    inv[1] = {(j[1][2] * j[2][0] - j[1][0] * j[2][2]) / det,
              (j[0][0] * j[2][2] - j[0][2] * j[2][0]) / det,
              (j[0][2] * j[1][0] - j[0][0] * j[1][2]) / det};
    inv[2] = {(j[1][0] * j[2][1] - j[1][1] * j[2][0]) / det,
              (j[0][1] * j[2][0] - j[0][0] * j[2][1]) / det,
              (j[0][0] * j[1][1] - j[0][1] * j[1][0]) / det};

    auto inf_norm = [](const std::array<Vec3, 3>& m) {
        double best = 0.0;
        for (const auto& row : m)
            best = std::max(best, std::abs(row[0]) + std::abs(row[1]) + std::abs(row[2]));
        return best;
    };
    const double cond = inf_norm(j) * inf_norm(inv);
    if (!(cond < kMaxJacobianCond))
        throw SingularConfigError("forward kinematics: Jacobian condition estimate " +
                                  std::to_string(cond));

    return {Vec3{dot(inv[0], r), dot(inv[1], r), dot(inv[2], r)}, cond};
}

} // namespace

Pose forward_kinematics(const TriceptGeometry& geom, const LegLengths& lengths,
                        const Pose& guess, double tol, int max_iter) {
    if (!(tol > 0.0)) throw InvalidArgumentError("forward_kinematics: tol must be positive");
    if (max_iter < 1) throw InvalidArgumentError("forward_kinematics: max_iter must be >= 1");

    const Vec3 target = {lengths.q1, lengths.q2, lengths.q3};
    Vec3 x = {guess.theta, guess.psi, guess.c};

    auto residual = [&](const Vec3& p) -> Vec3 {
        const auto q = leg_lengths_raw(geom, p[0], p[1], p[2]);
        return {q[0] - target[0], q[1] - target[1], q[2] - target[2]};
    };
    auto max_abs = [](const Vec3& v) {
        return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
    };
    auto norm2 = [](const Vec3& v) { return std::sqrt(dot(v, v)); };

    Vec3 r = residual(x);
    for (int iter = 0; iter < max_iter; ++iter) {
        if (max_abs(r) <= tol) return Pose(x[0], x[1], x[2]);

        // central-difference Jacobian, step scaled to each coordinate
        std::array<Vec3, 3> jac;
        for (int col = 0; col < 3; ++col) {
            const double h = 1e-6 * std::max(1.0, std::abs(x[col]));
            Vec3 xp = x, xm = x;
            xp[col] += h;
            xm[col] -= h;
            const Vec3 rp = residual(xp), rm = residual(xm);
            for (int row = 0; row < 3; ++row)
                jac[row][col] = (rp[row] - rm[row]) / (2.0 * h);
        }

        const Vec3 step = solve3(jac, r).x;

        double scale = 1.0;
        const double rn = norm2(r);
        bool moved = false;
        for (int halve = 0; halve < 40; ++halve) {
            const Vec3 cand = {x[0] - scale * step[0], x[1] - scale * step[1],
                               x[2] - scale * step[2]};
            const Vec3 rc = residual(cand);
            if (norm2(rc) < rn) {
                x = cand;
                r = rc;
                moved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!moved) break; // stuck; report non-convergence below
    }
    if (max_abs(r) <= tol) return Pose(x[0], x[1], x[2]);
    throw ConvergenceError("forward kinematics did not converge; last residual " +
                               std::to_string(max_abs(r)) + " mm",
                           max_abs(r));
}

} // namespace tricept
