#pragma once

// Shared numeric machinery: exact big integers / rationals (boost.multiprecision)
// and a couple of floating helpers used by the counting code.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace irvcomm {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt big_factorial(long long n) {
    if (n < 0) throw std::invalid_argument("factorial of negative number");
    BigInt r = 1;
    for (long long i = 2; i <= n; ++i) r *= i;
    return r;
}

// Natural log of a positive big integer.  Values routinely exceed the double
// range (e.g. factorials of five-digit numbers), so go through the bit length
// instead of a straight conversion.
inline double log_big(const BigInt& x) {
    if (x <= 0) throw std::invalid_argument("log_big requires a positive value");
    const std::size_t bits = msb(x);  // index of highest set bit
    if (bits <= 1000) return std::log(x.convert_to<double>());
    // Beyond the double range: keep the top 64 bits as the mantissa,
    // x ~= mant * 2^(bits-63).
    const BigInt mant = x >> (bits - 63);
    return std::log(mant.convert_to<double>()) + static_cast<double>(bits - 63) * std::log(2.0);
}

// Format a value given as its natural log, e.g. 13020.3 -> "4.78e+5654".
// Used for table columns whose magnitudes overflow double.
inline std::string sci_from_log(double ln_value) {
    if (std::isnan(ln_value)) return "nan";
    if (std::isinf(ln_value)) return ln_value > 0.0 ? "inf" : "0";
    if (ln_value == 0.0) return "1.0000e+00";
    const double log10v = ln_value / std::log(10.0);
    char buf[48];
    // Towers like e^(10^33) have exponents that no integer type can hold;
    // for those the raw log is the only honest rendering.
    if (!(std::fabs(log10v) < 4.5e15)) {
        std::snprintf(buf, sizeof(buf), "exp(%.6g)", ln_value);
        return buf;
    }
    double expo = std::floor(log10v);
    double mant = std::pow(10.0, log10v - expo);
    if (mant >= 9.99995) { mant /= 10.0; expo += 1.0; }  // rounding spill
    std::snprintf(buf, sizeof(buf), "%.4fe%+04lld", mant, static_cast<long long>(expo));
    return buf;
}

// Unbiased bounded draw.  std::uniform_int_distribution is implementation
// defined, and seeded runs must reproduce across toolchains, so roll the
// classic rejection loop on top of the fully specified mt19937_64 stream.
inline std::uint64_t bounded_rand(std::mt19937_64& gen, std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("bounded_rand: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = gen();
        if (r >= threshold) return r % bound;
    }
}

}  // namespace irvcomm
