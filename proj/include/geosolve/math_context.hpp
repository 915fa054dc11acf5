#pragma once

#include <string>

namespace geosolve {

enum class RoundingPolicy { Exact, FixedDecimal };

// Numeric regime applied to every evaluation: the value of pi used by
// circle/sector formulas, the rounding policy for computed values, and
// whether trig evaluations (sin/cos/tan and arcsine results in degrees)
// are rounded before they enter a formula.
struct MathContext {
    double pi;
    RoundingPolicy rounding = RoundingPolicy::Exact;
    int decimals = 0;  // used when rounding == FixedDecimal; must be >= 0
    bool trig_rounding = false;

    // Full-precision regime: machine pi, no rounding anywhere.
    static const MathContext& exact();

    // The regime the GeomVerse corpus is generated under: pi = 3.14 and
    // every computation rounded to 2 decimals, half away from zero.
    static const MathContext& geomverse();

    static MathContext fixed_decimal(double pi, int decimals, bool trig_rounding);
};

// Rounds half-away-from-zero at `decimals` decimal digits. Values whose
// scaled fraction sits within a small tolerance of an exact half are treated
// as halves; this compensates for binary representation error in decimal
// quantities (34.17 / 2 must round to 17.09, not 17.08).
double round_half_away_from_zero(double x, int decimals);

// Exact -> x unchanged; FixedDecimal(n) -> round_half_away_from_zero(x, n).
double round_value(double x, const MathContext& ctx);

// Shortest decimal string that round-trips to x.
std::string render_shortest(double x);

// Decimal rendering used in explanations and CLI output. Under a
// FixedDecimal(n) context the value is printed with up to n decimals,
// trailing zeros dropped but at least one decimal kept (76.5, 64.0, 25.94).
// Under Exact it is the shortest round-trip form.
std::string render_number(double x, const MathContext& ctx);

}  // namespace geosolve
