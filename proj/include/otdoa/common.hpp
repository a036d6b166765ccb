#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace otdoa {

using cplx = std::complex<double>;
using BitString = std::vector<bool>;

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kSubcarrierSpacingHz = 15000.0;
inline constexpr int kReferenceFftSize = 2048;
/// LTE basic time unit, 1 / (15000 * 2048) s.
inline constexpr double kTs = 1.0 / (kSubcarrierSpacingHz * kReferenceFftSize);
inline constexpr int kCycleSubframes = 10240;
inline constexpr int kSymbolsPerSubframe = 14;
inline constexpr int kSymbolsPerSlot = 7;
inline constexpr int kSubcarriersPerPrb = 12;

/// Root of every error thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Position {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Position&, const Position&) = default;
};

inline double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Parses a string of '0'/'1' characters, first character = first-applied bit.
BitString parse_bits(const std::string& text);
std::string format_bits(const BitString& bits);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// splitmix64 finalizer; used to derive independent per-drop seeds.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace otdoa
