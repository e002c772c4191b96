#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gaitmimic {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

/// Key points tracked in every video frame. The four feet reuse this
/// enumeration as leg indices throughout the pipeline.
enum KeyPoint : int {
    kHead = 0,
    kRear = 1,
    kFootFL = 2,
    kFootFR = 3,
    kFootRL = 4,
    kFootRR = 5,
};
inline constexpr int kNumKeyPoints = 6;

enum Leg : int { kFL = 0, kFR = 1, kRL = 2, kRR = 3 };
inline constexpr int kNumLegs = 4;

inline const char* leg_name(int leg) {
    static const char* names[] = {"FL", "FR", "RL", "RR"};
    return names[leg];
}

enum class TaskMode { kPeriodic, kBackflip };

// --- error types ------------------------------------------------------------

struct MalformedFile : std::runtime_error {
    explicit MalformedFile(const std::string& what) : std::runtime_error(what) {}
};
struct TooSparse : std::runtime_error {
    explicit TooSparse(const std::string& what) : std::runtime_error(what) {}
};
struct DegenerateBody : std::runtime_error {
    explicit DegenerateBody(const std::string& what) : std::runtime_error(what) {}
};
struct NoPeriodicity : std::runtime_error {
    explicit NoPeriodicity(const std::string& what) : std::runtime_error(what) {}
};
struct SeriesTooShort : std::runtime_error {
    explicit SeriesTooShort(const std::string& what) : std::runtime_error(what) {}
};
struct DegenerateAmplitude : std::runtime_error {
    explicit DegenerateAmplitude(const std::string& what) : std::runtime_error(what) {}
};
struct Unreachable : std::runtime_error {
    explicit Unreachable(const std::string& what) : std::runtime_error(what) {}
};
struct InvalidModel : std::runtime_error {
    explicit InvalidModel(const std::string& what) : std::runtime_error(what) {}
};
struct NumericalDivergence : std::runtime_error {
    explicit NumericalDivergence(const std::string& what) : std::runtime_error(what) {}
};
struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};
struct UnknownKind : std::runtime_error {
    explicit UnknownKind(const std::string& what) : std::runtime_error(what) {}
};
struct MalformedInput : std::runtime_error {
    explicit MalformedInput(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gaitmimic
