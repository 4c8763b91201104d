#include "vpforest/minifloat.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace vpforest {

PrecisionFormat make_format(int mantissa_bits, int exponent_bits, OverflowPolicy overflow) {
    if (mantissa_bits < 1 || mantissa_bits > 52) {
        throw Error("mantissa bits must be in [1, 52], got " + std::to_string(mantissa_bits));
    }
    if (exponent_bits < 2 || exponent_bits > 11) {
        throw Error("exponent bits must be in [2, 11], got " + std::to_string(exponent_bits));
    }
    return PrecisionFormat{mantissa_bits, exponent_bits, overflow};
}

std::pair<int, int> dynamic_range(const PrecisionFormat& fmt) {
    return {fmt.e_min(), fmt.e_max()};
}

double max_finite(const PrecisionFormat& fmt) {
    return (2.0 - std::ldexp(1.0, -fmt.mantissa_bits)) * std::ldexp(1.0, fmt.e_max());
}

double min_normal(const PrecisionFormat& fmt) {
    return std::ldexp(1.0, fmt.e_min());
}

namespace {

double apply_overflow(double x, const PrecisionFormat& fmt) {
    switch (fmt.overflow) {
        case OverflowPolicy::ToInfinity:
            return std::copysign(std::numeric_limits<double>::infinity(), x);
        case OverflowPolicy::Saturate:
            return std::copysign(max_finite(fmt), x);
        case OverflowPolicy::Error:
            throw RangeOverflowError(x, fmt.mantissa_bits, fmt.exponent_bits);
    }
    return x;  // unreachable
}

}  // namespace

double round_to_precision(double x, const PrecisionFormat& fmt) {
    if (!std::isfinite(x) || x == 0.0) {
        return x;  // infinities, NaN and signed zeros pass through
    }
    if (fmt.is_working_format()) {
        return x;  // the format contains binary64, subnormals included
    }

    const double mn = min_normal(fmt);
    const double mag = std::fabs(x);
    if (mag < mn) {
        // No subnormals: the nearest representables are 0 and min_normal.
        // The exact midpoint flushes to zero (both candidates have an even
        // mantissa field; the smaller magnitude wins).
        const double half = 0.5 * mn;
        if (mag <= half) {
            return std::copysign(0.0, x);
        }
        return std::copysign(mn, x);
    }

    // Round the binary64 mantissa to p explicit bits, nearest-ties-even.
    // Adding into the bit pattern carries cleanly across binade boundaries
    // and, at the very top of the double range, into infinity.
    std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    const int shift = 52 - fmt.mantissa_bits;
    if (shift > 0) {
        const std::uint64_t unit = std::uint64_t{1} << shift;
        const std::uint64_t rem = bits & (unit - 1);
        const std::uint64_t halfway = unit >> 1;
        bits &= ~(unit - 1);
        if (rem > halfway || (rem == halfway && (bits & unit))) {
            bits += unit;
        }
    }
    const double rounded = std::bit_cast<double>(bits);

    if (!std::isfinite(rounded) || std::ilogb(rounded) > fmt.e_max()) {
        return apply_overflow(x, fmt);
    }
    return rounded;
}

double rounded_arith(ArithOp op, double a, double b, const PrecisionFormat& fmt) {
    double result = 0.0;
    switch (op) {
        case ArithOp::Add: result = a + b; break;
        case ArithOp::Sub: result = a - b; break;
        case ArithOp::Mul: result = a * b; break;
        case ArithOp::Div: result = a / b; break;
    }
    return round_to_precision(result, fmt);
}

}  // namespace vpforest
