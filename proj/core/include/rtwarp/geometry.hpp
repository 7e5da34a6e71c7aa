#pragma once

#include <cmath>
#include <stdexcept>

// Coordinate mathematics for the RoI Tanh-polar transform family.
//
// Conventions:
//  - Cartesian points are continuous pixel coordinates in the source image.
//  - The polar origin is always the center of the guiding bounding box.
//  - Angles are in radians, normalized to [-pi, pi).
//  - The normalization ellipse has semi-axes a = 0.5*w/sqrt(pi) and
//    b = 0.5*h/sqrt(pi), so its area equals w*h/4 and its boundary maps
//    to rho = tanh(1) ~ 0.7616.
//
// All functions here are pure and thread-safe.

namespace rtwarp::geometry {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Axis-aligned face bounding box in source-image pixel coordinates.
struct BBox {
    double x = 0.0;  ///< left edge
    double y = 0.0;  ///< top edge
    double w = 0.0;  ///< width, must be > 0
    double h = 0.0;  ///< height, must be > 0

    [[nodiscard]] bool valid() const { return w > 0.0 && h > 0.0; }
    [[nodiscard]] Point center() const { return {x + w / 2.0, y + h / 2.0}; }
};

/// Normalization ellipse fitted to a BBox: center plus semi-axes.
struct Ellipse {
    double cx = 0.0;
    double cy = 0.0;
    double a = 0.0;  ///< semi-axis along x
    double b = 0.0;  ///< semi-axis along y
};

/// (theta, rho) with theta in [-pi, pi) and rho in [0, 1).
struct PolarCoord {
    double theta = 0.0;
    double rho = 0.0;
};

/// Tanh-Cartesian coordinate, both components in (-1, 1).
struct TCCoord {
    double u1 = 0.0;
    double u2 = 0.0;
};

struct InvalidBBoxError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct OutOfRangeError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Wrap an angle to [-pi, pi).
double normalize_angle(double theta);

/// Fit the normalization ellipse to a bounding box.
/// Throws InvalidBBoxError if w or h is non-positive.
Ellipse fit_ellipse(const BBox& bbox);

/// Distance from the ellipse center to its boundary along direction theta:
/// r_e(theta) = a*b / sqrt(b^2 cos^2 + a^2 sin^2). Total for finite theta.
double radius_at(const Ellipse& e, double theta);

/// Forward Tanh-polar map. theta is the angle of (p - center), rho is
/// tanh(|p - center| / r_e(theta)). The bbox center itself maps to (0, 0)
/// by convention (rho = 0 is forced; theta is arbitrary there).
PolarCoord to_tanh_polar(const Point& p, const BBox& bbox);

/// Inverse Tanh-polar map: center + r_e(theta)*artanh(rho)*(cos, sin).
/// Throws OutOfRangeError if rho >= 1.
Point from_tanh_polar(const PolarCoord& c, const BBox& bbox);

/// Tanh-Cartesian map: with d = p - center and r_e the ellipse radius
/// along d, returns (tanh(d.x / r_e), tanh(d.y / r_e)).
TCCoord to_tanh_cartesian(const Point& p, const BBox& bbox);

/// Closed-form map from Tanh-polar to Tanh-Cartesian coordinates. The
/// ellipse radius cancels, so no bbox is needed.
/// Throws OutOfRangeError if rho >= 1.
TCCoord tp_to_tc(const PolarCoord& c);

/// Inverse of tp_to_tc. Throws OutOfRangeError if |u1| >= 1 or |u2| >= 1.
PolarCoord tc_to_tp(const TCCoord& c);

}  // namespace rtwarp::geometry
