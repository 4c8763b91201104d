#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "vpforest/errors.hpp"
#include "vpforest/minifloat.hpp"

namespace vpforest {

/// How reduced precision is wired into the forest.
///  - Uninstrumented: binary64 everywhere, the baseline.
///  - NodeBounds: values are rounded only when stored into node bound
///    arrays; all computation stays binary64.
///  - Whole: every floating-point value entering or produced by the forest
///    (features, hyperparameters, variates, arithmetic results, stored
///    fields) is rounded.
enum class InstrumentationMode : std::uint8_t { Uninstrumented, NodeBounds, Whole };

/// Value-boundary wrapper around one PrecisionFormat + mode pair. The forest
/// funnels every floating-point site through one of these calls; the debug
/// counters make that discipline auditable (bounds_rounded stays the only
/// nonzero counter under NodeBounds, arith_ops grows per sample under Whole).
///
/// A rounding that turns a finite value non-finite (or an Error-policy
/// overflow) surfaces as NonFiniteBoundError for stored bounds and
/// NonFiniteFeatureError everywhere else; the baseline never throws.
class Instrument {
public:
    Instrument() = default;
    Instrument(InstrumentationMode mode, PrecisionFormat fmt) : mode_(mode), fmt_(fmt) {}

    InstrumentationMode mode() const { return mode_; }
    const PrecisionFormat& format() const { return fmt_; }

    /// Bit width of one stored float under this mode: 64 for the baseline,
    /// the emulated width otherwise. Drives the node footprint model.
    int effective_width() const {
        return mode_ == InstrumentationMode::Uninstrumented ? 64 : fmt_.width();
    }

    /// A value about to be stored into a node bound array.
    double bound(double x) const {
        if (mode_ == InstrumentationMode::Uninstrumented) return x;
        ++bounds_rounded_;
        return check<NonFiniteBoundError>(x);
    }

    /// A loose floating-point value entering the computation (feature
    /// component, hyperparameter, uniform variate).
    double value(double x) const {
        if (mode_ != InstrumentationMode::Whole) return x;
        ++values_rounded_;
        return check<NonFiniteFeatureError>(x);
    }

    /// One arithmetic operation; under Whole the exact binary64 result is
    /// rounded once.
    double op(ArithOp o, double a, double b) const {
        double r = 0.0;
        switch (o) {
            case ArithOp::Add: r = a + b; break;
            case ArithOp::Sub: r = a - b; break;
            case ArithOp::Mul: r = a * b; break;
            case ArithOp::Div: r = a / b; break;
        }
        if (mode_ != InstrumentationMode::Whole) return r;
        ++arith_ops_rounded_;
        return check<NonFiniteFeatureError>(r);
    }

    std::uint64_t bounds_rounded() const { return bounds_rounded_; }
    std::uint64_t values_rounded() const { return values_rounded_; }
    std::uint64_t arith_ops_rounded() const { return arith_ops_rounded_; }

private:
    template <typename E>
    double check(double x) const {
        double r = 0.0;
        try {
            r = round_to_precision(x, fmt_);
        } catch (const RangeOverflowError&) {
            throw E(describe(x));
        }
        if (!std::isfinite(r) && std::isfinite(x)) {
            throw E(describe(x));
        }
        return r;
    }

    std::string describe(double x) const {
        return "rounding " + std::to_string(x) + " to (p=" + std::to_string(fmt_.mantissa_bits) +
               ", e=" + std::to_string(fmt_.exponent_bits) + ") produced a non-finite value";
    }

    InstrumentationMode mode_ = InstrumentationMode::Uninstrumented;
    PrecisionFormat fmt_{};
    mutable std::uint64_t bounds_rounded_ = 0;
    mutable std::uint64_t values_rounded_ = 0;
    mutable std::uint64_t arith_ops_rounded_ = 0;
};

}  // namespace vpforest
