#include "rtwarp/geometry.hpp"

#include <numbers>

namespace rtwarp::geometry {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

double normalize_angle(double theta) {
    theta = std::fmod(theta + kPi, kTwoPi);
    if (theta < 0.0) theta += kTwoPi;
    return theta - kPi;
}

Ellipse fit_ellipse(const BBox& bbox) {
    if (!bbox.valid()) {
        throw InvalidBBoxError("fit_ellipse: bbox width and height must be positive");
    }
    const Point c = bbox.center();
    const double inv_sqrt_pi = 1.0 / std::sqrt(kPi);
    return {c.x, c.y, 0.5 * bbox.w * inv_sqrt_pi, 0.5 * bbox.h * inv_sqrt_pi};
}

double radius_at(const Ellipse& e, double theta) {
    const double ct = std::cos(theta);
    const double st = std::sin(theta);
    return e.a * e.b / std::sqrt(e.b * e.b * ct * ct + e.a * e.a * st * st);
}

PolarCoord to_tanh_polar(const Point& p, const BBox& bbox) {
    const Ellipse e = fit_ellipse(bbox);
    const double dx = p.x - e.cx;
    const double dy = p.y - e.cy;
    const double r = std::hypot(dx, dy);
    if (r == 0.0) {
        return {0.0, 0.0};
    }
    const double theta = normalize_angle(std::atan2(dy, dx));
    return {theta, std::tanh(r / radius_at(e, theta))};
}

Point from_tanh_polar(const PolarCoord& c, const BBox& bbox) {
    if (c.rho >= 1.0) {
        throw OutOfRangeError("from_tanh_polar: rho must be < 1");
    }
    const Ellipse e = fit_ellipse(bbox);
    const double r = radius_at(e, c.theta) * std::atanh(c.rho);
    return {e.cx + r * std::cos(c.theta), e.cy + r * std::sin(c.theta)};
}

TCCoord to_tanh_cartesian(const Point& p, const BBox& bbox) {
    const Ellipse e = fit_ellipse(bbox);
    const double dx = p.x - e.cx;
    const double dy = p.y - e.cy;
    if (dx == 0.0 && dy == 0.0) {
        return {0.0, 0.0};
    }
    const double re = radius_at(e, std::atan2(dy, dx));
    return {std::tanh(dx / re), std::tanh(dy / re)};
}

TCCoord tp_to_tc(const PolarCoord& c) {
    if (c.rho >= 1.0) {
        throw OutOfRangeError("tp_to_tc: rho must be < 1");
    }
    const double r = std::atanh(c.rho);
    return {std::tanh(r * std::cos(c.theta)), std::tanh(r * std::sin(c.theta))};
}

PolarCoord tc_to_tp(const TCCoord& c) {
    if (std::abs(c.u1) >= 1.0 || std::abs(c.u2) >= 1.0) {
        throw OutOfRangeError("tc_to_tp: |u| must be < 1");
    }
    const double s = std::atanh(c.u1);
    const double t = std::atanh(c.u2);
    if (s == 0.0 && t == 0.0) {
        return {0.0, 0.0};
    }
    return {normalize_angle(std::atan2(t, s)), std::tanh(std::hypot(s, t))};
}

}  // namespace rtwarp::geometry
