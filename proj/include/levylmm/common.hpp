#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace levylmm {

inline constexpr const char* kVersion = "0.1.0";

// Thrown when a cumulant argument leaves the exponential-moment domain.
struct CumulantDomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Thrown when quadrature refinement fails to stabilise.
struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// printf-style formatting into std::string (no std::format on gcc 11).
template <typename... Args>
std::string strfmt(const char* fmt, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), fmt, args...);
    return std::string(buf);
}

// Fixed 12-significant-digit numeric formatting used by every CSV writer.
inline std::string format_sig(double x, int significant = 12) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", significant, x);
    return std::string(buf);
}

// FNV-1a 64-bit content hash (manifest fingerprints).
inline std::uint64_t fnv1a64(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

}  // namespace levylmm
