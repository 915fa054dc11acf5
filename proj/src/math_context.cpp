#include "geosolve/math_context.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace geosolve {

const MathContext& MathContext::exact() {
    static const MathContext ctx{std::numbers::pi, RoundingPolicy::Exact, 0, false};
    return ctx;
}

const MathContext& MathContext::geomverse() {
    static const MathContext ctx{3.14, RoundingPolicy::FixedDecimal, 2, true};
    return ctx;
}

MathContext MathContext::fixed_decimal(double pi, int decimals, bool trig_rounding) {
    if (decimals < 0) throw std::invalid_argument("FixedDecimal requires decimals >= 0");
    return MathContext{pi, RoundingPolicy::FixedDecimal, decimals, trig_rounding};
}

double round_half_away_from_zero(double x, int decimals) {
    if (!std::isfinite(x)) return x;
    const double scale = std::pow(10.0, decimals);
    const double scaled = x * scale;
    // Past ~1e15 the double grid is coarser than one unit; nothing to round.
    if (std::abs(scaled) >= 1e15) return x;
    const double mag = std::abs(scaled);
    const double whole = std::floor(mag);
    const double frac = mag - whole;
    // A scaled fraction this close to 0.5 is a decimal half that picked up
    // binary representation error; treat it as exactly half.
    const double eps = std::max(1e-9, mag * 4e-14);
    const double rounded = (frac > 0.5 - eps) ? whole + 1.0 : whole;
    const double result = (x < 0.0 ? -rounded : rounded) / scale;
    return result == 0.0 ? 0.0 : result;
}

double round_value(double x, const MathContext& ctx) {
    if (ctx.rounding == RoundingPolicy::Exact) return x;
    return round_half_away_from_zero(x, ctx.decimals);
}

std::string render_shortest(double x) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, end);
}

std::string render_number(double x, const MathContext& ctx) {
    if (ctx.rounding == RoundingPolicy::Exact) return render_shortest(x);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", ctx.decimals, x);
    std::string s(buf);
    if (ctx.decimals > 0) {
        // Drop trailing zeros but keep at least one decimal: 76.50 -> 76.5,
        // 64.00 -> 64.0, 25.94 stays.
        auto dot = s.find('.');
        auto last = s.find_last_not_of('0');
        s.erase(std::max(last, dot + 1) + 1);
    }
    if (s == "-0" || s == "-0.0") s = s.substr(1);
    return s;
}

}  // namespace geosolve
