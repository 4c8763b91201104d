#pragma once

#include <cstdint>
#include <utility>

#include "vpforest/errors.hpp"

namespace vpforest {

/// What to do when a rounded value falls above the format's dynamic range.
enum class OverflowPolicy : std::uint8_t {
    ToInfinity,  ///< return signed infinity (IEEE round-to-nearest behavior)
    Saturate,    ///< clamp to the largest finite value of the format
    Error,       ///< throw RangeOverflowError
};

/// A reduced floating-point format: p explicit mantissa bits and e exponent
/// bits, emulated on top of IEEE binary64. The exponent range is derived,
/// never stored, so it cannot go stale.
struct PrecisionFormat {
    int mantissa_bits = 52;  ///< p, 1..52
    int exponent_bits = 11;  ///< e, 2..11
    OverflowPolicy overflow = OverflowPolicy::ToInfinity;

    constexpr int width() const { return mantissa_bits + exponent_bits + 1; }

    constexpr int e_min() const { return 2 - (1 << (exponent_bits - 1)); }
    constexpr int e_max() const { return (1 << (exponent_bits - 1)) - 1; }

    /// True when the format contains the working binary64 format, which makes
    /// rounding the identity.
    constexpr bool is_working_format() const {
        return mantissa_bits >= 52 && exponent_bits >= 11;
    }

    friend constexpr bool operator==(const PrecisionFormat& a, const PrecisionFormat& b) {
        return a.mantissa_bits == b.mantissa_bits && a.exponent_bits == b.exponent_bits &&
               a.overflow == b.overflow;
    }
};

/// Fully validated constructor; throws Error on out-of-range p or e.
PrecisionFormat make_format(int mantissa_bits, int exponent_bits,
                            OverflowPolicy overflow = OverflowPolicy::ToInfinity);

/// (e_min, e_max) derived from the exponent width.
std::pair<int, int> dynamic_range(const PrecisionFormat& fmt);

/// Largest finite magnitude of the format: (2 - 2^-p) * 2^e_max.
double max_finite(const PrecisionFormat& fmt);

/// Smallest positive normal magnitude: 2^e_min. The format has no
/// subnormals; below this, values resolve to zero or min_normal, whichever
/// is nearer.
double min_normal(const PrecisionFormat& fmt);

/// Round a binary64 value to the nearest value representable in fmt.
///
/// Round-to-nearest with ties to the even mantissa. The representable set is
/// the format's normal values plus signed zero; there is no gradual
/// underflow, so inputs below min_normal resolve to +-0 or +-min_normal by
/// distance (an exact halfway input flushes to zero). Results whose exponent
/// exceeds e_max follow fmt.overflow. Infinities and NaN pass through.
/// Idempotent: rounding a representable value returns it unchanged.
double round_to_precision(double x, const PrecisionFormat& fmt);

enum class ArithOp : std::uint8_t { Add, Sub, Mul, Div };

/// Compute a op b at full binary64 precision, then round the result (the
/// operands are not pre-rounded). Division by zero yields a signed infinity,
/// which passes through the rounding step unchanged.
double rounded_arith(ArithOp op, double a, double b, const PrecisionFormat& fmt);

}  // namespace vpforest
