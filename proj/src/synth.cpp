#include "geosolve/synth.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <stdexcept>

#include "geosolve/dsl.hpp"
#include "geosolve/errors.hpp"
#include "geosolve/executor.hpp"

namespace geosolve::synth {
namespace {

// std::mt19937_64 output is standard-defined; the distribution helpers below
// avoid std::uniform_*_distribution, whose sequences vary across library
// implementations, so generation is reproducible everywhere.
struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}

    int irange(int lo, int hi) { return lo + static_cast<int>(eng() % (hi - lo + 1)); }
    double unit() { return (eng() >> 11) * 0x1.0p-53; }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(eng() % n); }
};

std::string fmt_num(double v) {
    double r = std::round(v);
    if (std::abs(v - r) < 1e-9) return render_shortest(r);
    return render_number(v, MathContext::geomverse());
}

struct Names {
    std::size_t letter_cursor = 0;
    std::size_t color_cursor = 0;

    std::string letters(int n) {
        static const std::string alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
        std::string out;
        for (int i = 0; i < n; ++i) out += alphabet[(letter_cursor + i) % alphabet.size()];
        letter_cursor += n;
        return out;
    }

    std::string color() {
        static const char* palette[] = {"red",    "blue",  "green", "orange",
                                        "purple", "brown", "gray",  "cyan"};
        return palette[color_cursor++ % 8];
    }
};

// One shape's contribution to the chain: code lines, a question clause, the
// produced value (variable + rough magnitude + how the question refers to it).
struct Unit {
    std::vector<std::string> lines;
    std::string clause;
    std::string out_var;
    double out_value = 0.0;
    std::string out_desc;
    bool uses_pi = false;
    std::vector<std::string> safe_vars;
    std::string tikz;
};

struct Incoming {
    std::string var;
    double value;
    std::string desc;
};

struct Terminal {
    Unit unit;
    std::string asked;
};

using SourceFn = std::function<Unit(Rng&, Names&)>;
using MiddleFn = std::function<Unit(Rng&, Names&, const Incoming&)>;
using TerminalFn = std::function<Terminal(Rng&, Names&, const Incoming&)>;

// ---- source shapes: produce a length from literal givens only --------------

const std::vector<SourceFn>& source_units() {
    static const std::vector<SourceFn> units = {
        // square, side from perimeter
        [](Rng& rng, Names& names) {
            Unit u;
            std::string n = names.letters(4);
            int side = rng.irange(3, 25);
            std::string pvar = "perimeter_" + n;
            u.out_var = "side_" + n;
            u.lines = {pvar + " = " + fmt_num(4 * side),
                       u.out_var + " = side_of_square_given_perimeter(" + pvar + ")"};
            u.clause = "the perimeter of the " + n + " square is " + fmt_num(4 * side);
            u.out_value = side;
            u.out_desc = "the side of the " + n + " square";
            u.safe_vars = {pvar};
            return u;
        },
        // square, side from area
        [](Rng& rng, Names& names) {
            Unit u;
            std::string n = names.letters(4);
            int side = rng.irange(3, 25);
            std::string avar = "area_" + n;
            u.out_var = "side_" + n;
            u.lines = {avar + " = " + fmt_num(side * side),
                       u.out_var + " = side_of_square_given_area(" + avar + ")"};
            u.clause = "the area of the " + n + " square is " + fmt_num(side * side);
            u.out_value = side;
            u.out_desc = "the side of the " + n + " square";
            u.safe_vars = {avar};
            return u;
        },
        // semi-circle, diameter from area
        [](Rng& rng, Names& names) {
            Unit u;
            std::string n = names.color();
            int d = rng.irange(3, 25);
            double area = round_half_away_from_zero(3.14 * d * d / 8.0, 2);
            std::string avar = "area_" + n + "_semicircle";
            u.out_var = "diameter_" + n;
            u.lines = {avar + " = " + fmt_num(area),
                       u.out_var + " = diameter_of_semi_circle_given_area(" + avar + ")"};
            u.clause = "the area of the " + n + " semi-circle is " + fmt_num(area);
            u.out_value = d;
            u.out_desc = "the diameter of the " + n + " semi-circle";
            u.uses_pi = true;
            u.safe_vars = {avar};
            return u;
        },
        // semi-circle, diameter from perimeter
        [](Rng& rng, Names& names) {
            Unit u;
            std::string n = names.color();
            int d = rng.irange(3, 25);
            double perim = round_half_away_from_zero(d + 3.14 * d / 2.0, 2);
            std::string pvar = "perimeter_" + n + "_semicircle";
            u.out_var = "diameter_" + n;
            u.lines = {pvar + " = " + fmt_num(perim),
                       u.out_var + " = diameter_of_semi_circle_given_perimeter(" + pvar + ")"};
            u.clause = "the perimeter of the " + n + " semi-circle is " + fmt_num(perim);
            u.out_value = d;
            u.out_desc = "the diameter of the " + n + " semi-circle";
            u.uses_pi = true;
            u.safe_vars = {pvar};
            return u;
        },
        // triangle, height from area and base
        [](Rng& rng, Names& names) {
            Unit u;
            std::string n = names.letters(3);
            int height = rng.irange(3, 25);
            int base = rng.irange(3, 25);
            double area = round_half_away_from_zero(base * height / 2.0, 2);
            std::string avar = "area_" + n;
            std::string bvar = "base_" + n;
            u.out_var = "height_" + n;
            u.lines = {avar + " = " + fmt_num(area), bvar + " = " + fmt_num(base),
                       u.out_var + " = height_of_triangle_given_area(" + avar + ", " + bvar + ")"};
            u.clause = "the area of the " + n + " triangle is " + fmt_num(area) +
                       " and its base is " + fmt_num(base);
            u.out_value = height;
            u.out_desc = "the height of the " + n + " triangle";
            u.safe_vars = {avar, bvar};
            return u;
        },
        // parallelogram, second side from area, first side, angle
        [](Rng& rng, Names& names) {
            Unit u;
            std::string n = names.letters(4);
            int other = rng.irange(3, 25);
            int side = rng.irange(3, 25);
            int angle = rng.irange(20, 110);
            double area = round_half_away_from_zero(
                side * other * std::sin(angle * std::numbers::pi / 180.0), 2);
            std::string avar = "area_" + n;
            std::string svar = "side_" + n;
            std::string gvar = "angle_" + n;
            u.out_var = "other_side_" + n;
            u.lines = {avar + " = " + fmt_num(area), svar + " = " + fmt_num(side),
                       gvar + " = " + fmt_num(angle),
                       u.out_var + " = side_of_parallelogram_given_area(" + avar + ", " + svar +
                           ", " + gvar + ")"};
            u.clause = "the area of the " + n + " parallelogram is " + fmt_num(area) +
                       ", one of its sides is " + fmt_num(side) +
                       " and the angle between its sides is " + fmt_num(angle) + " degrees";
            u.out_value = other;
            u.out_desc = "the other side of the " + n + " parallelogram";
            u.safe_vars = {avar, svar, gvar};
            return u;
        },
        // equilateral triangle, side from height
        [](Rng& rng, Names& names) {
            Unit u;
            std::string n = names.letters(3);
            int side = rng.irange(3, 25);
            double height = round_half_away_from_zero(side * 0.87, 2);
            std::string hvar = "height_" + n;
            u.out_var = "side_" + n;
            u.lines = {hvar + " = " + fmt_num(height),
                       u.out_var + " = side_of_equilateral_triangle(" + hvar + ")"};
            u.clause = "the height of the " + n + " equilateral triangle is " + fmt_num(height);
            u.out_value = side;
            u.out_desc = "the side of the " + n + " equilateral triangle";
            u.safe_vars = {hvar};
            return u;
        },
        // rectangle with a semi-circle removed from one side: solve the
        // unknown side from the perimeter (subtraction chain, like the
        // corpus' composite shapes)
        [](Rng& rng, Names& names) {
            Unit u;
            std::string n = names.letters(4);
            int unknown = rng.irange(3, 25);
            int dside = rng.irange(3, 25);
            double perim =
                round_half_away_from_zero(2.0 * unknown + dside + 3.14 * dside / 2.0, 2);
            std::string pvar = "perimeter_" + n;
            std::string dvar = "diameter_side_" + n;
            std::string arcvar = "arc_" + n;
            u.out_var = "unknown_side_" + n;
            u.lines = {pvar + " = " + fmt_num(perim), dvar + " = " + fmt_num(dside),
                       arcvar + " = arc_of_semi_circle(" + dvar + ")",
                       u.out_var + " = (" + pvar + " - " + dvar + " - " + arcvar + ") / 2"};
            u.clause = "the " + n +
                       " shape is a rectangle where a semi-circle has been removed from one side "
                       "of it, its perimeter is " +
                       fmt_num(perim) + " and the side with the semi-circle is " + fmt_num(dside);
            u.out_value = unknown;
            u.out_desc = "the unknown side of the " + n + " shape";
            u.uses_pi = true;
            // Scaling the perimeter up only grows the solved side; scaling the
            // diameter side can push the solved side negative, so it stays
            // off the safe list.
            u.safe_vars = {pvar};
            return u;
        },
    };
    return units;
}

// ---- middle shapes: turn the incoming length into a new one ----------------

const std::vector<MiddleFn>& middle_units() {
    static const std::vector<MiddleFn> units = {
        // square whose side equals the incoming length -> diagonal
        [](Rng&, Names& names, const Incoming& in) {
            Unit u;
            std::string n = names.letters(4);
            u.out_var = "diagonal_" + n;
            u.lines = {u.out_var + " = diagonal_of_square(" + in.var + ")"};
            u.clause = "the side of the " + n + " square is equal to " + in.desc;
            u.out_value = in.value * std::numbers::sqrt2;
            u.out_desc = "the diagonal of the " + n + " square";
            return u;
        },
        // square whose perimeter equals the incoming length -> side
        [](Rng&, Names& names, const Incoming& in) {
            Unit u;
            std::string n = names.letters(4);
            u.out_var = "side_" + n;
            u.lines = {u.out_var + " = side_of_square_given_perimeter(" + in.var + ")"};
            u.clause = "the perimeter of the " + n + " square is equal to " + in.desc;
            u.out_value = in.value / 4.0;
            u.out_desc = "the side of the " + n + " square";
            return u;
        },
        // rectangle with one side incoming, the other given -> diagonal
        [](Rng& rng, Names& names, const Incoming& in) {
            Unit u;
            std::string n = names.letters(4);
            int other = rng.irange(3, 25);
            std::string ovar = "side_" + n;
            u.out_var = "diagonal_" + n;
            u.lines = {ovar + " = " + fmt_num(other),
                       u.out_var + " = diagonal_of_rectangle(" + in.var + ", " + ovar + ")"};
            u.clause = "one side of the " + n + " rectangle is equal to " + in.desc +
                       " and its other side is " + fmt_num(other);
            u.out_value = std::hypot(in.value, other);
            u.out_desc = "the diagonal of the " + n + " rectangle";
            u.safe_vars = {ovar};
            return u;
        },
        // right triangle with one leg incoming, the other given -> hypotenuse
        [](Rng& rng, Names& names, const Incoming& in) {
            Unit u;
            std::string n = names.letters(3);
            int other = rng.irange(3, 25);
            std::string ovar = "leg_" + n;
            u.out_var = "hypotenuse_" + n;
            u.lines = {ovar + " = " + fmt_num(other),
                       u.out_var + " = hypotenuse_of_right_triangle(" + in.var + ", " + ovar + ")"};
            u.clause = "one leg of the " + n + " right triangle is equal to " + in.desc +
                       " and its other leg is " + fmt_num(other);
            u.out_value = std::hypot(in.value, other);
            u.out_desc = "the hypotenuse of the " + n + " right triangle";
            u.safe_vars = {ovar};
            return u;
        },
        // semi-circle on the incoming diameter -> arc length
        [](Rng&, Names& names, const Incoming& in) {
            Unit u;
            std::string n = names.color();
            u.out_var = "arc_" + n;
            u.lines = {u.out_var + " = arc_of_semi_circle(" + in.var + ")"};
            u.clause = "the diameter of the " + n + " semi-circle is equal to " + in.desc;
            u.out_value = 3.14 * in.value / 2.0;
            u.out_desc = "the arc length of the " + n + " semi-circle";
            u.uses_pi = true;
            return u;
        },
        // equilateral triangle on the incoming base -> height
        [](Rng&, Names& names, const Incoming& in) {
            Unit u;
            std::string n = names.letters(3);
            u.out_var = "height_" + n;
            u.lines = {u.out_var + " = height_of_equilateral_triangle(" + in.var + ")"};
            u.clause = "the base of the " + n + " equilateral triangle is equal to " + in.desc;
            u.out_value = in.value * 0.87;
            u.out_desc = "the height of the " + n + " equilateral triangle";
            return u;
        },
        // triangle with a given area on the incoming base -> height
        [](Rng& rng, Names& names, const Incoming& in) {
            Unit u;
            std::string n = names.letters(3);
            double area = round_half_away_from_zero(in.value * rng.irange(3, 25) / 2.0, 2);
            std::string avar = "area_" + n;
            u.out_var = "height_" + n;
            u.lines = {avar + " = " + fmt_num(area),
                       u.out_var + " = height_of_triangle_given_area(" + avar + ", " + in.var + ")"};
            u.clause = "the area of the " + n + " triangle is " + fmt_num(area) +
                       " and its base is equal to " + in.desc;
            u.out_value = 2.0 * area / std::max(in.value, 1e-9);
            u.out_desc = "the height of the " + n + " triangle";
            u.safe_vars = {avar};
            return u;
        },
        // sector with the incoming radius and a given angle -> arc length
        [](Rng& rng, Names& names, const Incoming& in) {
            Unit u;
            std::string n = names.color();
            int angle = rng.irange(20, 140);
            std::string gvar = "angle_" + n;
            u.out_var = "arc_" + n;
            u.lines = {gvar + " = " + fmt_num(angle),
                       u.out_var + " = arc_length_of_sector(" + gvar + ", " + in.var + ")"};
            u.clause = "the radius of the " + n + " sector is equal to " + in.desc +
                       " and its angle is " + fmt_num(angle) + " degrees";
            u.out_value = angle / 360.0 * 2.0 * 3.14 * in.value;
            u.out_desc = "the arc length of the " + n + " sector";
            u.uses_pi = true;
            u.safe_vars = {gvar};
            return u;
        },
    };
    return units;
}

// ---- terminal shapes: compute the asked quantity ----------------------------

const std::vector<TerminalFn>& terminal_units() {
    static const std::vector<TerminalFn> units = {
        // rectangle: area / perimeter / diagonal
        [](Rng& rng, Names& names, const Incoming& in) {
            Terminal t;
            std::string n = names.letters(4);
            int other = rng.irange(3, 25);
            std::string ovar = "side_" + n;
            int pick = rng.irange(0, 2);
            const char* fn[] = {"area_of_rectangle", "perimeter_of_rectangle",
                                "diagonal_of_rectangle"};
            const char* what[] = {"area", "perimeter", "diagonal"};
            t.unit.out_var = std::string(what[pick]) + "_" + n;
            t.unit.lines = {ovar + " = " + fmt_num(other),
                            t.unit.out_var + " = " + fn[pick] + "(" + in.var + ", " + ovar + ")"};
            t.unit.clause = "one side of the " + n + " rectangle is equal to " + in.desc +
                            " and its other side is " + fmt_num(other);
            t.unit.safe_vars = {ovar};
            t.unit.tikz = "\\draw (0,0) rectangle (" + fmt_num(in.value) + "," + fmt_num(other) + ");";
            t.asked = std::string("the ") + what[pick] + " of the " + n + " rectangle";
            return t;
        },
        // right triangle: hypotenuse / area
        [](Rng& rng, Names& names, const Incoming& in) {
            Terminal t;
            std::string n = names.letters(3);
            int other = rng.irange(3, 25);
            std::string ovar = "leg_" + n;
            bool area = rng.irange(0, 1) == 1;
            t.unit.out_var = (area ? "area_" : "hypotenuse_") + n;
            t.unit.lines = {ovar + " = " + fmt_num(other),
                            t.unit.out_var + " = " +
                                (area ? "area_of_right_triangle" : "hypotenuse_of_right_triangle") +
                                "(" + in.var + ", " + ovar + ")"};
            t.unit.clause = "one leg of the " + n + " right triangle is equal to " + in.desc +
                            " and its other leg is " + fmt_num(other);
            t.unit.safe_vars = {ovar};
            t.unit.tikz = "\\draw (0,0) -- (" + fmt_num(in.value) + ",0) -- (0," + fmt_num(other) +
                          ") -- cycle;";
            t.asked = (area ? "the area of the " : "the hypotenuse of the ") + n +
                      " right triangle";
            return t;
        },
        // parallelogram: area (with angle) / perimeter
        [](Rng& rng, Names& names, const Incoming& in) {
            Terminal t;
            std::string n = names.letters(4);
            int other = rng.irange(3, 25);
            std::string ovar = "side_" + n;
            bool area = rng.irange(0, 1) == 1;
            if (area) {
                int angle = rng.irange(20, 110);
                std::string gvar = "angle_" + n;
                t.unit.out_var = "area_" + n;
                t.unit.lines = {ovar + " = " + fmt_num(other), gvar + " = " + fmt_num(angle),
                                t.unit.out_var + " = area_of_parallelogram(" + in.var + ", " +
                                    ovar + ", " + gvar + ")"};
                t.unit.clause = "one side of the " + n + " parallelogram is equal to " + in.desc +
                                ", its other side is " + fmt_num(other) +
                                " and the angle between the sides is " + fmt_num(angle) +
                                " degrees";
                t.unit.safe_vars = {ovar, gvar};
                t.asked = "the area of the " + n + " parallelogram";
            } else {
                t.unit.out_var = "perimeter_" + n;
                t.unit.lines = {ovar + " = " + fmt_num(other),
                                t.unit.out_var + " = perimeter_of_parallelogram(" + in.var + ", " +
                                    ovar + ")"};
                t.unit.clause = "one side of the " + n + " parallelogram is equal to " + in.desc +
                                " and its other side is " + fmt_num(other);
                t.unit.safe_vars = {ovar};
                t.asked = "the perimeter of the " + n + " parallelogram";
            }
            t.unit.tikz = "\\draw (0,0) -- (" + fmt_num(in.value) + ",0) -- (" +
                          fmt_num(in.value + 1) + "," + fmt_num(other) + ") -- (1," +
                          fmt_num(other) + ") -- cycle;";
            return t;
        },
        // triangle: third side by the law of cosines
        [](Rng& rng, Names& names, const Incoming& in) {
            Terminal t;
            std::string n = names.letters(3);
            int other = rng.irange(3, 25);
            int angle = rng.irange(20, 110);
            std::string ovar = "side_" + n;
            std::string gvar = "angle_" + n;
            t.unit.out_var = "third_side_" + n;
            t.unit.lines = {ovar + " = " + fmt_num(other), gvar + " = " + fmt_num(angle),
                            t.unit.out_var + " = length_of_third_side(" + in.var + ", " + ovar +
                                ", " + gvar + ")"};
            t.unit.clause = "one side of the " + n + " triangle is equal to " + in.desc +
                            ", another side is " + fmt_num(other) +
                            " and the angle between them is " + fmt_num(angle) + " degrees";
            t.unit.safe_vars = {ovar, gvar};
            t.unit.tikz = "\\draw (0,0) -- (" + fmt_num(in.value) + ",0) -- (" + fmt_num(other) +
                          ",2) -- cycle;";
            t.asked = "the length of the third side of the " + n + " triangle";
            return t;
        },
        // square on the incoming side: area / perimeter / diagonal
        [](Rng& rng, Names& names, const Incoming& in) {
            Terminal t;
            std::string n = names.letters(4);
            int pick = rng.irange(0, 2);
            const char* fn[] = {"area_of_square_given_side", "perimeter_of_square",
                                "diagonal_of_square"};
            const char* what[] = {"area", "perimeter", "diagonal"};
            t.unit.out_var = std::string(what[pick]) + "_" + n;
            t.unit.lines = {t.unit.out_var + " = " + fn[pick] + "(" + in.var + ")"};
            t.unit.clause = "the side of the " + n + " square is equal to " + in.desc;
            t.unit.tikz =
                "\\draw (0,0) rectangle (" + fmt_num(in.value) + "," + fmt_num(in.value) + ");";
            t.asked = std::string("the ") + what[pick] + " of the " + n + " square";
            return t;
        },
        // semi-circle on the incoming diameter: area / perimeter
        [](Rng& rng, Names& names, const Incoming& in) {
            Terminal t;
            std::string n = names.color();
            bool area = rng.irange(0, 1) == 1;
            t.unit.out_var = (area ? "area_" : "perimeter_") + n;
            t.unit.lines = {t.unit.out_var + " = " +
                            (area ? "area_of_semi_circle" : "perimeter_of_semi_circle") + "(" +
                            in.var + ")"};
            t.unit.clause = "the diameter of the " + n + " semi-circle is equal to " + in.desc;
            t.unit.uses_pi = true;
            t.unit.tikz = "\\draw (0,0) arc (180:0:" + fmt_num(in.value / 2.0) + ") -- cycle;";
            t.asked = (area ? "the area of the " : "the perimeter of the ") + n + " semi-circle";
            return t;
        },
        // sector with the incoming radius: area / arc length
        [](Rng& rng, Names& names, const Incoming& in) {
            Terminal t;
            std::string n = names.color();
            int angle = rng.irange(20, 140);
            std::string gvar = "angle_" + n;
            bool area = rng.irange(0, 1) == 1;
            t.unit.out_var = (area ? "area_" : "arc_") + n;
            t.unit.lines = {gvar + " = " + fmt_num(angle),
                            t.unit.out_var + " = " +
                                (area ? "area_of_sector" : "arc_length_of_sector") + "(" + gvar +
                                ", " + in.var + ")"};
            t.unit.clause = "the radius of the " + n + " sector is equal to " + in.desc +
                            " and its angle is " + fmt_num(angle) + " degrees";
            t.unit.uses_pi = true;
            t.unit.safe_vars = {gvar};
            t.unit.tikz = "\\draw (0,0) -- (" + fmt_num(in.value) + ",0) arc (0:" +
                          fmt_num(angle) + ":" + fmt_num(in.value) + ") -- cycle;";
            t.asked = (area ? "the area of the " : "the arc length of the ") + n + " sector";
            return t;
        },
        // trapezoid: area / perimeter with the incoming first base
        [](Rng& rng, Names& names, const Incoming& in) {
            Terminal t;
            std::string n = names.letters(4);
            int b2 = rng.irange(3, 25);
            std::string b2var = "base2_" + n;
            bool area = rng.irange(0, 1) == 1;
            if (area) {
                int h = rng.irange(3, 25);
                std::string hvar = "height_" + n;
                t.unit.out_var = "area_" + n;
                t.unit.lines = {b2var + " = " + fmt_num(b2), hvar + " = " + fmt_num(h),
                                t.unit.out_var + " = area_of_trapezoid(" + in.var + ", " + b2var +
                                    ", " + hvar + ")"};
                t.unit.clause = "one base of the " + n + " trapezoid is equal to " + in.desc +
                                ", its other base is " + fmt_num(b2) + " and its height is " +
                                fmt_num(h);
                t.unit.safe_vars = {b2var, hvar};
                t.asked = "the area of the " + n + " trapezoid";
            } else {
                int s1 = rng.irange(3, 25), s2 = rng.irange(3, 25);
                std::string s1var = "side1_" + n, s2var = "side2_" + n;
                t.unit.out_var = "perimeter_" + n;
                t.unit.lines = {b2var + " = " + fmt_num(b2), s1var + " = " + fmt_num(s1),
                                s2var + " = " + fmt_num(s2),
                                t.unit.out_var + " = perimeter_of_trapezoid(" + in.var + ", " +
                                    b2var + ", " + s1var + ", " + s2var + ")"};
                t.unit.clause = "one base of the " + n + " trapezoid is equal to " + in.desc +
                                ", its other base is " + fmt_num(b2) + " and its lateral sides are " +
                                fmt_num(s1) + " and " + fmt_num(s2);
                t.unit.safe_vars = {b2var, s1var, s2var};
                t.asked = "the perimeter of the " + n + " trapezoid";
            }
            t.unit.tikz = "\\draw (0,0) -- (" + fmt_num(in.value) + ",0) -- (" + fmt_num(b2) +
                          ",3) -- (1,3) -- cycle;";
            return t;
        },
        // equilateral triangle on the incoming side: area
        [](Rng&, Names& names, const Incoming& in) {
            Terminal t;
            std::string n = names.letters(3);
            t.unit.out_var = "area_" + n;
            t.unit.lines = {t.unit.out_var + " = area_of_equilateral_triangle(" + in.var + ")"};
            t.unit.clause = "the side of the " + n + " equilateral triangle is equal to " + in.desc;
            t.unit.tikz = "\\draw (0,0) -- (" + fmt_num(in.value) + ",0) -- (" +
                          fmt_num(in.value / 2.0) + "," + fmt_num(in.value * 0.87) + ") -- cycle;";
            t.asked = "the area of the " + n + " equilateral triangle";
            return t;
        },
        // circle on the incoming diameter: area
        [](Rng&, Names& names, const Incoming& in) {
            Terminal t;
            std::string n = names.color();
            t.unit.out_var = "area_" + n;
            t.unit.lines = {t.unit.out_var + " = area_of_circle(" + in.var + ")"};
            t.unit.clause = "the diameter of the " + n + " circle is equal to " + in.desc;
            t.unit.uses_pi = true;
            t.unit.tikz = "\\draw (0,0) circle (" + fmt_num(in.value / 2.0) + ");";
            t.asked = "the area of the " + n + " circle";
            return t;
        },
        // rectangle combined with an equilateral triangle: total perimeter
        [](Rng& rng, Names& names, const Incoming& in) {
            Terminal t;
            std::string n = names.letters(5);
            int tri = rng.irange(3, 25);
            std::string tvar = "triangle_side_" + n;
            t.unit.out_var = "perimeter_" + n;
            t.unit.lines = {tvar + " = " + fmt_num(tri),
                            t.unit.out_var + " = perimeter_of_shape([" + in.var + ", " + in.var +
                                ", " + tvar + ", " + tvar + ", " + tvar + "])"};
            t.unit.clause = "the " + n +
                            " shape is a combination of a rectangle and an equilateral triangle, "
                            "two of its sides are equal to " +
                            in.desc + " and the other three sides are " + fmt_num(tri) + " each";
            t.unit.safe_vars = {tvar};
            t.unit.tikz = "\\draw (0,0) rectangle (" + fmt_num(tri) + "," + fmt_num(in.value) +
                          ");";
            t.asked = "the perimeter of the " + n + " shape";
            return t;
        },
    };
    return units;
}

// Depth-1 only: angle questions with no incoming length.
const std::vector<TerminalFn>& angle_terminals() {
    static const std::vector<TerminalFn> units = {
        [](Rng& rng, Names& names, const Incoming&) {
            Terminal t;
            std::string n = names.letters(3);
            int a1 = rng.irange(20, 60), a2 = rng.irange(20, 60);
            std::string v1 = "angle1_" + n, v2 = "angle2_" + n;
            t.unit.out_var = "third_angle_" + n;
            t.unit.lines = {v1 + " = " + fmt_num(a1), v2 + " = " + fmt_num(a2),
                            t.unit.out_var + " = third_angle_of_triangle(" + v1 + ", " + v2 + ")"};
            t.unit.clause = "two angles of the " + n + " triangle are " + fmt_num(a1) + " and " +
                            fmt_num(a2) + " degrees";
            t.unit.safe_vars = {v1, v2};
            t.unit.tikz = "\\draw (0,0) -- (6,0) -- (2,3) -- cycle;";
            t.asked = "the third angle of the " + n + " triangle";
            return t;
        },
        [](Rng& rng, Names& names, const Incoming&) {
            Terminal t;
            std::string n = names.letters(3);
            int angle = rng.irange(20, 60);
            std::string v = "angle_" + n;
            t.unit.out_var = "complement_" + n;
            t.unit.lines = {v + " = " + fmt_num(angle),
                            t.unit.out_var + " = complementary_angle(" + v + ")"};
            t.unit.clause = "the " + n + " angle measures " + fmt_num(angle) + " degrees";
            t.unit.safe_vars = {v};
            t.unit.tikz = "\\draw (3,0) -- (0,0) -- (2,2);";
            t.asked = "the complement of the " + n + " angle";
            return t;
        },
    };
    return units;
}

struct Draft {
    std::string program;
    std::string question;
    std::vector<std::string> safe_vars;
    std::string tikz;
};

Draft draft_problem(int depth, Rng& rng) {
    Names names;
    std::vector<Unit> chain;
    Incoming incoming;

    if (depth >= 2) {
        Unit src = source_units()[rng.index(source_units().size())](rng, names);
        incoming = {src.out_var, src.out_value, src.out_desc};
        chain.push_back(std::move(src));
        for (int i = 0; i < depth - 2; ++i) {
            Unit mid = middle_units()[rng.index(middle_units().size())](rng, names, incoming);
            incoming = {mid.out_var, mid.out_value, mid.out_desc};
            chain.push_back(std::move(mid));
        }
    } else {
        // Depth 1: the "incoming" quantity is itself a literal given.
        std::string n = names.letters(2);
        int value = rng.irange(3, 25);
        Unit lit;
        lit.out_var = "side_" + n;
        lit.lines = {lit.out_var + " = " + fmt_num(value)};
        lit.clause = "the length of the " + n + " side is " + fmt_num(value);
        lit.out_value = value;
        lit.out_desc = "the length of the " + n + " side";
        lit.safe_vars = {lit.out_var};
        incoming = {lit.out_var, lit.out_value, lit.out_desc};
        chain.push_back(std::move(lit));
    }

    Terminal term;
    if (depth == 1 && rng.irange(0, 7) == 0) {
        // Occasionally ask a pure angle question instead; it replaces the
        // literal side entirely.
        chain.clear();
        names = Names{};
        term = angle_terminals()[rng.index(angle_terminals().size())](rng, names, incoming);
    } else {
        term = terminal_units()[rng.index(terminal_units().size())](rng, names, incoming);
    }
    chain.push_back(std::move(term.unit));

    Draft draft;
    draft.program = "def solution():\n";
    bool uses_pi = false;
    std::vector<std::string> clauses;
    for (const auto& unit : chain) {
        for (const auto& line : unit.lines) draft.program += "    " + line + "\n";
        if (!unit.clause.empty()) clauses.push_back(unit.clause);
        uses_pi = uses_pi || unit.uses_pi;
        for (const auto& v : unit.safe_vars) draft.safe_vars.push_back(v);
        if (!unit.tikz.empty()) draft.tikz = unit.tikz;
    }
    draft.program += "    return " + chain.back().out_var + "\n";

    draft.question = "If ";
    for (std::size_t i = 0; i < clauses.size(); ++i) {
        if (i) draft.question += i + 1 == clauses.size() ? " and " : ", ";
        draft.question += clauses[i];
    }
    draft.question += ", compute " + term.asked + ".";
    if (uses_pi) draft.question += " Assume π=3.14.";
    draft.question += " Round computations to 2 decimal places.";
    return draft;
}

}  // namespace

std::vector<GeneratedProblem> generate(int depth, std::size_t count, std::uint64_t seed) {
    if (depth < 1 || depth > 3) throw std::invalid_argument("depth must be 1, 2, or 3");
    if (count < 1) throw std::invalid_argument("count must be at least 1");

    Rng rng(seed * 0x9e3779b97f4a7c15ull + static_cast<std::uint64_t>(depth));
    const auto& registry = FunctionRegistry::bundled();
    const auto& ctx = MathContext::geomverse();

    std::vector<GeneratedProblem> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        bool done = false;
        for (int attempt = 0; attempt < 100 && !done; ++attempt) {
            Draft draft = draft_problem(depth, rng);
            dsl::SolutionProgram program;
            try {
                program = dsl::parse(draft.program);
            } catch (const ParseError&) {
                continue;
            }
            ExecutionOutcome outcome = execute(program, registry, ctx);
            if (!outcome.ok()) continue;
            double label = outcome.success().answer;
            if (!(label > 0.0)) continue;

            GeneratedProblem gp;
            gp.record.id = "synth-d" + std::to_string(depth) + "-" + std::to_string(seed) + "-" +
                           std::to_string(i);
            gp.record.question = draft.question;
            gp.record.label = label;
            gp.record.depth = depth;
            if (!draft.tikz.empty()) gp.record.tikz = draft.tikz;
            gp.gold_program = draft.program;
            gp.shift_safe_vars = std::move(draft.safe_vars);
            out.push_back(std::move(gp));
            done = true;
        }
        if (!done)
            throw std::runtime_error("could not sample a feasible problem after 100 attempts");
    }
    return out;
}

namespace {

std::vector<std::size_t> literal_assign_indices(const dsl::SolutionProgram& program,
                                                const std::vector<std::string>& safe_vars) {
    std::set<std::string> safe(safe_vars.begin(), safe_vars.end());
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < program.body.size(); ++i) {
        const auto& stmt = program.body[i];
        if (stmt.kind != dsl::Statement::Kind::Assign) continue;
        if (!safe.count(stmt.target)) continue;
        if (std::holds_alternative<dsl::NumberLit>(stmt.expr->node)) out.push_back(i);
    }
    return out;
}

void collect_call_nodes(dsl::Expr& expr, std::vector<dsl::Call*>& out) {
    std::visit(
        [&](auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, dsl::Negate>) {
                collect_call_nodes(*node.operand, out);
            } else if constexpr (std::is_same_v<T, dsl::Binary>) {
                collect_call_nodes(*node.lhs, out);
                collect_call_nodes(*node.rhs, out);
            } else if constexpr (std::is_same_v<T, dsl::Call>) {
                for (auto& arg : node.args) collect_call_nodes(*arg, out);
                out.push_back(&node);
            } else if constexpr (std::is_same_v<T, dsl::ListLit>) {
                for (auto& el : node.elements) collect_call_nodes(*el, out);
            }
        },
        expr.node);
}

void collect_var_refs(const dsl::Expr& expr, std::set<std::string>& out) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, dsl::VarRef>) {
                out.insert(node.name);
            } else if constexpr (std::is_same_v<T, dsl::Negate>) {
                collect_var_refs(*node.operand, out);
            } else if constexpr (std::is_same_v<T, dsl::Binary>) {
                collect_var_refs(*node.lhs, out);
                collect_var_refs(*node.rhs, out);
            } else if constexpr (std::is_same_v<T, dsl::Call>) {
                for (const auto& arg : node.args) collect_var_refs(*arg, out);
            } else if constexpr (std::is_same_v<T, dsl::ListLit>) {
                for (const auto& el : node.elements) collect_var_refs(*el, out);
            }
        },
        expr.node);
}

}  // namespace

std::string perturb_constant_shift(const GeneratedProblem& problem, double factor,
                                   std::uint64_t seed) {
    if (std::abs(factor - 1.0) <= 0.03)
        throw std::invalid_argument("shift factor must lie outside the 3% relaxed-match band");
    if (factor <= 0.0) throw std::invalid_argument("shift factor must be positive");

    dsl::SolutionProgram program = dsl::parse(problem.gold_program);
    auto candidates = literal_assign_indices(program, problem.shift_safe_vars);
    if (candidates.empty())
        throw std::logic_error("gold program has no shift-safe literal to perturb");

    Rng rng(seed);
    auto& stmt = program.body[candidates[rng.index(candidates.size())]];
    auto& lit = std::get<dsl::NumberLit>(stmt.expr->node);
    lit.value = round_half_away_from_zero(lit.value * factor, 2);
    return dsl::to_source(program);
}

std::string perturb(const GeneratedProblem& problem, PerturbMode mode, std::uint64_t seed) {
    Rng rng(seed);
    switch (mode) {
        case PerturbMode::ConstantShift: {
            double factor = 1.1 + 0.3 * rng.unit();
            return perturb_constant_shift(problem, factor, rng.eng());
        }
        case PerturbMode::FunctionSwap: {
            dsl::SolutionProgram program = dsl::parse(problem.gold_program);
            std::vector<dsl::Call*> calls;
            for (auto& stmt : program.body) collect_call_nodes(*stmt.expr, calls);
            if (calls.empty()) throw std::logic_error("gold program has no calls to swap");
            calls[rng.index(calls.size())]->callee += "_v2";
            return dsl::to_source(program);
        }
        case PerturbMode::DropStatement: {
            dsl::SolutionProgram program = dsl::parse(problem.gold_program);
            if (rng.irange(0, 9) < 3) {
                program.body.pop_back();  // drop the return -> SyntaxError
                return dsl::to_source(program);
            }
            // Drop an assign whose variable is needed later -> NameError.
            std::vector<std::size_t> candidates;
            for (std::size_t i = 0; i + 1 < program.body.size(); ++i) {
                if (program.body[i].kind != dsl::Statement::Kind::Assign) continue;
                std::set<std::string> used_later;
                for (std::size_t j = i + 1; j < program.body.size(); ++j)
                    collect_var_refs(*program.body[j].expr, used_later);
                if (used_later.count(program.body[i].target)) candidates.push_back(i);
            }
            if (candidates.empty()) {
                program.body.pop_back();
                return dsl::to_source(program);
            }
            program.body.erase(program.body.begin() +
                               static_cast<std::ptrdiff_t>(candidates[rng.index(candidates.size())]));
            return dsl::to_source(program);
        }
    }
    throw std::logic_error("unknown perturb mode");
}

}  // namespace geosolve::synth
