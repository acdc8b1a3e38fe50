#pragma once

#include <array>
#include <cstddef>

#include "tricept/errors.hpp"

namespace tricept {

using Vec3 = std::array<double, 3>;

double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);
Vec3 sub(const Vec3& a, const Vec3& b);

// Fixed dimensions of the machine: moving-platform triangle parameter a,
// base triangle parameter b, and the offset d from the passive-leg joint
// center to the platform origin along the tool axis. All in millimeters.
//
// a and b may individually be zero (degenerate platform or base) but not
// both at once.
struct TriceptGeometry {
    TriceptGeometry(double a, double b, double d);
    double a;
    double b;
    double d;
};

// Task-space input: rotation about global y (theta), rotation about global
// x (psi), both radians, and the passive prismatic extension c in mm (> 0).
struct Pose {
    Pose(double theta, double psi, double c);
    double theta;
    double psi;
    double c;
};

// Axis-aligned box of admissible poses.
struct PoseDomain {
    PoseDomain(double theta_min, double theta_max,
               double psi_min, double psi_max,
               double c_min, double c_max);
    double theta_min, theta_max;
    double psi_min, psi_max;
    double c_min, c_max;

    Pose centroid() const;
    bool contains(const Pose& p) const;
};

struct RotationMatrix {
    std::array<Vec3, 3> rows; // rows[i][j] = entry (i, j)

    Vec3 apply(const Vec3& v) const;
    double operator()(std::size_t i, std::size_t j) const { return rows[i][j]; }
};

// Three actuated leg lengths in mm, all strictly positive.
struct LegLengths {
    LegLengths(double q1, double q2, double q3);
    double q1;
    double q2;
    double q3;

    double operator[](std::size_t i) const { return i == 0 ? q1 : (i == 1 ? q2 : q3); }
};

// One consistent snapshot of the leg geometry at a pose: spherical-joint
// positions on the platform, universal-joint positions on the base, unit
// directions along each leg, and the leg lengths tying them together.
struct LegVectors {
    std::array<Vec3, 3> platform_joints;
    std::array<Vec3, 3> base_joints;
    std::array<Vec3, 3> leg_directions;
    std::array<double, 3> leg_lengths;
};

// Rotation about y by theta composed with rotation about x by psi:
// R = Ry(theta) * Rx(psi). This is the only Euler convention supported.
RotationMatrix rotation_matrix(double theta, double psi);

// Spherical-joint positions in the global frame, one column per leg:
// column i = R * (p_i + d*z) + c*z, with the platform corners
// p_1 = (a/sqrt3, 0, 0), p_2 = (-a/(2 sqrt3), a/2, 0), p_3 = (-a/(2 sqrt3), -a/2, 0).
// The + c*z term is applied in the global frame.
std::array<Vec3, 3> platform_joints(const TriceptGeometry& geom, const Pose& pose);

// Universal-joint positions: (b/sqrt3, 0, 0), (-b/(2 sqrt3), +-b/2, 0).
std::array<Vec3, 3> base_joints(const TriceptGeometry& geom);

// Builds the full leg snapshot; throws SingularConfigError when a leg
// length falls below the singularity tolerance (1e-9 mm).
LegVectors leg_vectors(const TriceptGeometry& geom, const Pose& pose);

// Authoritative inverse kinematics: q_i = || platform_joint_i - base_joint_i ||.
LegLengths inverse_kinematics(const TriceptGeometry& geom, const Pose& pose);

// Evaluates the closed-form squared-length expansions as printed in the
// classical derivation for this mechanism, verbatim, and returns their
// square roots. Exists solely to cross-check that algebra against
// inverse_kinematics; the two routes differ by known terms, see
// docs/kinematics_algebra.md. Throws AlgebraMismatchError when a printed
// square comes out negative.
LegLengths expanded_leg_lengths(const TriceptGeometry& geom, const Pose& pose);

// The three printed-minus-direct discrepancies in squared length, in closed
// form (documented in docs/kinematics_algebra.md). Used by tests to pin the
// difference between expanded_leg_lengths and inverse_kinematics.
std::array<double, 3> expanded_discrepancy(const TriceptGeometry& geom, const Pose& pose);

// Per-leg closure residual of the supplied lengths: projecting the loop
// equation of leg i onto its unit direction gives
//   (c*z + R(p_i + d*z)) . n_l  -  B_i . n_l  -  l_i
// which is zero exactly when l_i satisfies the closure equation.
std::array<double, 3> closure_residual(const TriceptGeometry& geom, const Pose& pose,
                                       const LegLengths& lengths);

// Numerical forward kinematics: damped Newton iteration on
// r(p) = q(p) - lengths with a finite-difference 3x3 Jacobian. Returns a
// pose whose leg lengths match the target to within tol (max-norm, mm).
// The step is halved whenever the residual norm fails to decrease.
Pose forward_kinematics(const TriceptGeometry& geom, const LegLengths& lengths,
                        const Pose& guess, double tol = 1e-10, int max_iter = 50);

} // namespace tricept
