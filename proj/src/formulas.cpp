#include "formulas.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <unordered_map>

#include "geosolve/errors.hpp"
#include "geosolve/function_library.hpp"

namespace geosolve::detail {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Trig evaluations are a rounding point of their own: under a context with
// trig_rounding the dimensionless sin/cos/tan value (and an arcsine result,
// in degrees) is rounded before it enters the rest of the formula. The
// degree-to-radian conversion always uses machine pi; ctx.pi is the constant
// that appears in circle and sector formulas.
double trig_round(double v, const MathContext& ctx) {
    if (!ctx.trig_rounding) return v;
    return round_half_away_from_zero(v, ctx.decimals);
}

double sin_deg(double deg, const MathContext& ctx) { return trig_round(std::sin(deg * kDegToRad), ctx); }
double cos_deg(double deg, const MathContext& ctx) { return trig_round(std::cos(deg * kDegToRad), ctx); }
double tan_deg(double deg, const MathContext& ctx) { return trig_round(std::tan(deg * kDegToRad), ctx); }

double asin_degrees(double ratio, const MathContext& ctx) {
    return trig_round(std::asin(ratio) * kRadToDeg, ctx);
}

double num(std::span<const Value> args, std::size_t i, std::string_view name) {
    return as_number(args[i], std::string("argument ") + std::to_string(i + 1) + " of " +
                                  std::string(name));
}

void require_positive(double v, std::string_view what) {
    if (!(v > 0.0)) throw DomainError(std::string(what) + " must be positive");
}

void require(bool cond, std::string_view msg) {
    if (!cond) throw DomainError(std::string(msg));
}

double checked_sqrt(double v, std::string_view what) {
    if (v < 0.0) throw DomainError("square root of negative value in " + std::string(what));
    return std::sqrt(v);
}

double checked_div(double a, double b, std::string_view what) {
    if (b == 0.0) throw ZeroDivisionError("division by zero in " + std::string(what));
    return a / b;
}

// --- sector / circle -------------------------------------------------------

double radius_of_sector_given_arc_length(std::span<const Value> a, const MathContext& ctx) {
    double arc = num(a, 0, "radius_of_sector_given_arc_length");
    double angle = num(a, 1, "radius_of_sector_given_arc_length");
    require_positive(arc, "arc_length");
    require_positive(angle, "angle");
    return arc * 360.0 / (2.0 * ctx.pi * angle);
}

double arc_length_of_sector(std::span<const Value> a, const MathContext& ctx) {
    double angle = num(a, 0, "arc_length_of_sector");
    double radius = num(a, 1, "arc_length_of_sector");
    require_positive(angle, "angle");
    require_positive(radius, "radius");
    return angle / 360.0 * 2.0 * ctx.pi * radius;
}

double angle_of_sector(std::span<const Value> a, const MathContext& ctx) {
    double arc = num(a, 0, "angle_of_sector");
    double radius = num(a, 1, "angle_of_sector");
    require_positive(arc, "arc_length");
    require_positive(radius, "radius");
    return arc * 360.0 / (2.0 * ctx.pi * radius);
}

double area_of_sector(std::span<const Value> a, const MathContext& ctx) {
    double angle = num(a, 0, "area_of_sector");
    double radius = num(a, 1, "area_of_sector");
    require_positive(angle, "angle");
    require_positive(radius, "radius");
    return angle / 360.0 * ctx.pi * radius * radius;
}

double area_of_circle(std::span<const Value> a, const MathContext& ctx) {
    double d = num(a, 0, "area_of_circle");
    require_positive(d, "diameter");
    return ctx.pi * d * d / 4.0;
}

double area_of_semi_circle(std::span<const Value> a, const MathContext& ctx) {
    double d = num(a, 0, "area_of_semi_circle");
    require_positive(d, "diameter");
    return ctx.pi * d * d / 8.0;
}

double arc_of_semi_circle(std::span<const Value> a, const MathContext& ctx) {
    double d = num(a, 0, "arc_of_semi_circle");
    require_positive(d, "diameter");
    return ctx.pi * d / 2.0;
}

double perimeter_of_semi_circle(std::span<const Value> a, const MathContext& ctx) {
    double d = num(a, 0, "perimeter_of_semi_circle");
    require_positive(d, "diameter");
    return d + ctx.pi * d / 2.0;
}

double diameter_of_semi_circle_given_perimeter(std::span<const Value> a, const MathContext& ctx) {
    double p = num(a, 0, "diameter_of_semi_circle_given_perimeter");
    require_positive(p, "perimeter");
    return p / (1.0 + ctx.pi / 2.0);
}

double diameter_of_semi_circle_given_area(std::span<const Value> a, const MathContext& ctx) {
    double area = num(a, 0, "diameter_of_semi_circle_given_area");
    require_positive(area, "area");
    return checked_sqrt(8.0 * area / ctx.pi, "diameter_of_semi_circle_given_area");
}

// --- triangles -------------------------------------------------------------

double length_of_third_side(std::span<const Value> a, const MathContext& ctx) {
    double s1 = num(a, 0, "length_of_third_side");
    double s2 = num(a, 1, "length_of_third_side");
    double angle = num(a, 2, "length_of_third_side");
    require_positive(s1, "side_1");
    require_positive(s2, "side_2");
    require(angle > 0.0 && angle < 180.0, "angle must lie strictly between 0 and 180 degrees");
    double c = cos_deg(angle, ctx);
    return checked_sqrt(s1 * s1 + s2 * s2 - 2.0 * s1 * s2 * c, "length_of_third_side");
}

double hypotenuse_of_right_triangle(std::span<const Value> a, const MathContext&) {
    double s1 = num(a, 0, "hypotenuse_of_right_triangle");
    double s2 = num(a, 1, "hypotenuse_of_right_triangle");
    require_positive(s1, "side_1");
    require_positive(s2, "side_2");
    return std::sqrt(s1 * s1 + s2 * s2);
}

double side_of_right_triangle_given_side(std::span<const Value> a, const MathContext&) {
    double side = num(a, 0, "side_of_right_triangle_given_side");
    double hyp = num(a, 1, "side_of_right_triangle_given_side");
    require_positive(side, "side");
    require_positive(hyp, "hypotenuse");
    require(hyp > side, "hypotenuse must exceed the given side");
    return std::sqrt(hyp * hyp - side * side);
}

double side_of_right_triangle_given_angle(std::span<const Value> a, const MathContext& ctx) {
    double angle = num(a, 0, "side_of_right_triangle_given_angle");
    double hyp = num(a, 1, "side_of_right_triangle_given_angle");
    require(angle > 0.0 && angle < 90.0, "opposite_angle must lie strictly between 0 and 90 degrees");
    require_positive(hyp, "hypotenuse");
    return hyp * sin_deg(angle, ctx);
}

double angle_of_right_triangle(std::span<const Value> a, const MathContext& ctx) {
    double opp = num(a, 0, "angle_of_right_triangle");
    double hyp = num(a, 1, "angle_of_right_triangle");
    require_positive(opp, "opposite_side");
    require_positive(hyp, "hypotenuse");
    require(opp <= hyp, "opposite_side must not exceed the hypotenuse");
    return asin_degrees(opp / hyp, ctx);
}

double area_of_right_triangle(std::span<const Value> a, const MathContext&) {
    double s1 = num(a, 0, "area_of_right_triangle");
    double s2 = num(a, 1, "area_of_right_triangle");
    require_positive(s1, "side_1");
    require_positive(s2, "side_2");
    return s1 * s2 / 2.0;
}

double area_of_triangle_given_base_height(std::span<const Value> a, const MathContext&) {
    double base = num(a, 0, "area_of_triangle_given_base_height");
    double height = num(a, 1, "area_of_triangle_given_base_height");
    require_positive(base, "base");
    require_positive(height, "height");
    return base * height / 2.0;
}

double height_of_triangle_given_area(std::span<const Value> a, const MathContext&) {
    double area = num(a, 0, "height_of_triangle_given_area");
    double base = num(a, 1, "height_of_triangle_given_area");
    require_positive(area, "area");
    require_positive(base, "base");
    return 2.0 * area / base;
}

double base_of_triangle_given_area(std::span<const Value> a, const MathContext&) {
    double area = num(a, 0, "base_of_triangle_given_area");
    double height = num(a, 1, "base_of_triangle_given_area");
    require_positive(area, "area");
    require_positive(height, "height");
    return 2.0 * area / height;
}

double area_of_triangle_given_semi_perimeter(std::span<const Value> a, const MathContext&) {
    double sp = num(a, 0, "area_of_triangle_given_semi_perimeter");
    double s1 = num(a, 1, "area_of_triangle_given_semi_perimeter");
    double s2 = num(a, 2, "area_of_triangle_given_semi_perimeter");
    double s3 = num(a, 3, "area_of_triangle_given_semi_perimeter");
    require_positive(sp, "semi_perimeter");
    require_positive(s1, "side_1");
    require_positive(s2, "side_2");
    require_positive(s3, "side_3");
    double f1 = sp - s1, f2 = sp - s2, f3 = sp - s3;
    require(f1 >= 0.0 && f2 >= 0.0 && f3 >= 0.0,
            "sides incompatible with the semi-perimeter (negative Heron factor)");
    return std::sqrt(sp * f1 * f2 * f3);
}

double perimeter_of_triangle(std::span<const Value> a, const MathContext&) {
    double s1 = num(a, 0, "perimeter_of_triangle");
    double s2 = num(a, 1, "perimeter_of_triangle");
    double s3 = num(a, 2, "perimeter_of_triangle");
    require_positive(s1, "side_1");
    require_positive(s2, "side_2");
    require_positive(s3, "side_3");
    return s1 + s2 + s3;
}

double third_angle_of_triangle(std::span<const Value> a, const MathContext&) {
    double a1 = num(a, 0, "third_angle_of_triangle");
    double a2 = num(a, 1, "third_angle_of_triangle");
    require_positive(a1, "angle_1");
    require_positive(a2, "angle_2");
    require(a1 + a2 < 180.0, "the two angles must sum to less than 180 degrees");
    return 180.0 - a1 - a2;
}

double height_of_equilateral_triangle(std::span<const Value> a, const MathContext& ctx) {
    double base = num(a, 0, "height_of_equilateral_triangle");
    require_positive(base, "base");
    return base * sin_deg(60.0, ctx);
}

double side_of_equilateral_triangle(std::span<const Value> a, const MathContext& ctx) {
    double height = num(a, 0, "side_of_equilateral_triangle");
    require_positive(height, "height");
    return checked_div(height, sin_deg(60.0, ctx), "side_of_equilateral_triangle");
}

double area_of_equilateral_triangle(std::span<const Value> a, const MathContext&) {
    double side = num(a, 0, "area_of_equilateral_triangle");
    require_positive(side, "side");
    return std::sqrt(3.0) / 4.0 * side * side;
}

// --- squares / rectangles ---------------------------------------------------

double diagonal_of_square(std::span<const Value> a, const MathContext&) {
    double side = num(a, 0, "diagonal_of_square");
    require_positive(side, "side");
    return side * std::numbers::sqrt2;
}

double area_of_square_given_side(std::span<const Value> a, const MathContext&) {
    double side = num(a, 0, "area_of_square_given_side");
    require_positive(side, "side");
    return side * side;
}

double area_of_square_given_diagonal(std::span<const Value> a, const MathContext&) {
    double d = num(a, 0, "area_of_square_given_diagonal");
    require_positive(d, "diagonal");
    return d * d / 2.0;
}

double side_of_square_given_area(std::span<const Value> a, const MathContext&) {
    double area = num(a, 0, "side_of_square_given_area");
    require_positive(area, "area");
    return std::sqrt(area);
}

double side_of_square_given_perimeter(std::span<const Value> a, const MathContext&) {
    double p = num(a, 0, "side_of_square_given_perimeter");
    require_positive(p, "perimeter");
    return p / 4.0;
}

double perimeter_of_square(std::span<const Value> a, const MathContext&) {
    double side = num(a, 0, "perimeter_of_square");
    require_positive(side, "side");
    return 4.0 * side;
}

double perimeter_of_square_given_diagonal(std::span<const Value> a, const MathContext&) {
    double d = num(a, 0, "perimeter_of_square_given_diagonal");
    require_positive(d, "diagonal");
    return 4.0 * d / std::numbers::sqrt2;
}

double area_of_rectangle(std::span<const Value> a, const MathContext&) {
    double s1 = num(a, 0, "area_of_rectangle");
    double s2 = num(a, 1, "area_of_rectangle");
    require_positive(s1, "side_1");
    require_positive(s2, "side_2");
    return s1 * s2;
}

double perimeter_of_rectangle(std::span<const Value> a, const MathContext&) {
    double w = num(a, 0, "perimeter_of_rectangle");
    double h = num(a, 1, "perimeter_of_rectangle");
    require_positive(w, "width");
    require_positive(h, "height");
    return 2.0 * (w + h);
}

double perimeter_of_rectangle_with_side_removed(std::span<const Value> a, const MathContext&) {
    double s1 = num(a, 0, "perimeter_of_rectangle_with_side_removed");
    double s2 = num(a, 1, "perimeter_of_rectangle_with_side_removed");
    require_positive(s1, "side_1");
    require_positive(s2, "side_2");
    return 2.0 * s1 + s2;
}

double diagonal_of_rectangle(std::span<const Value> a, const MathContext&) {
    double s1 = num(a, 0, "diagonal_of_rectangle");
    double s2 = num(a, 1, "diagonal_of_rectangle");
    require_positive(s1, "side_1");
    require_positive(s2, "side_2");
    return std::sqrt(s1 * s1 + s2 * s2);
}

// Diagonal first: matches how solution programs call it, e.g.
// side_of_rectangle_given_diagonal(diagonal_AGHE, side_AG).
double side_of_rectangle_given_diagonal(std::span<const Value> a, const MathContext&) {
    double diagonal = num(a, 0, "side_of_rectangle_given_diagonal");
    double side = num(a, 1, "side_of_rectangle_given_diagonal");
    require_positive(diagonal, "diagonal");
    require_positive(side, "side");
    require(diagonal > side, "diagonal must exceed the given side");
    return std::sqrt(diagonal * diagonal - side * side);
}

// --- parallelograms / trapezoids --------------------------------------------

double area_of_parallelogram(std::span<const Value> a, const MathContext& ctx) {
    double s1 = num(a, 0, "area_of_parallelogram");
    double s2 = num(a, 1, "area_of_parallelogram");
    double angle = num(a, 2, "area_of_parallelogram");
    require_positive(s1, "side_1");
    require_positive(s2, "side_2");
    require(angle > 0.0 && angle < 180.0, "angle must lie strictly between 0 and 180 degrees");
    return s1 * s2 * sin_deg(angle, ctx);
}

double side_of_parallelogram_given_area(std::span<const Value> a, const MathContext& ctx) {
    double area = num(a, 0, "side_of_parallelogram_given_area");
    double side = num(a, 1, "side_of_parallelogram_given_area");
    double angle = num(a, 2, "side_of_parallelogram_given_area");
    require_positive(area, "area");
    require_positive(side, "side");
    require(angle > 0.0 && angle < 180.0, "angle must lie strictly between 0 and 180 degrees");
    return checked_div(area, side * sin_deg(angle, ctx), "side_of_parallelogram_given_area");
}

double angle_of_parallelogram_given_area(std::span<const Value> a, const MathContext& ctx) {
    double s1 = num(a, 0, "angle_of_parallelogram_given_area");
    double s2 = num(a, 1, "angle_of_parallelogram_given_area");
    double area = num(a, 2, "angle_of_parallelogram_given_area");
    require_positive(s1, "side_1");
    require_positive(s2, "side_2");
    require_positive(area, "area");
    require(area <= s1 * s2, "area must not exceed side_1 * side_2");
    return asin_degrees(area / (s1 * s2), ctx);
}

double perimeter_of_parallelogram(std::span<const Value> a, const MathContext&) {
    double s1 = num(a, 0, "perimeter_of_parallelogram");
    double s2 = num(a, 1, "perimeter_of_parallelogram");
    require_positive(s1, "side_1");
    require_positive(s2, "side_2");
    return 2.0 * (s1 + s2);
}

double area_of_trapezoid(std::span<const Value> a, const MathContext&) {
    double b1 = num(a, 0, "area_of_trapezoid");
    double b2 = num(a, 1, "area_of_trapezoid");
    double h = num(a, 2, "area_of_trapezoid");
    require_positive(b1, "base_1");
    require_positive(b2, "base_2");
    require_positive(h, "height");
    return (b1 + b2) / 2.0 * h;
}

double perimeter_of_trapezoid(std::span<const Value> a, const MathContext&) {
    double b1 = num(a, 0, "perimeter_of_trapezoid");
    double b2 = num(a, 1, "perimeter_of_trapezoid");
    double s1 = num(a, 2, "perimeter_of_trapezoid");
    double s2 = num(a, 3, "perimeter_of_trapezoid");
    require_positive(b1, "base_1");
    require_positive(b2, "base_2");
    require_positive(s1, "side_1");
    require_positive(s2, "side_2");
    return b1 + b2 + s1 + s2;
}

// --- generic -----------------------------------------------------------------

double perimeter_of_shape(std::span<const Value> a, const MathContext&) {
    const auto& sides = as_list(a[0], "argument 1 of perimeter_of_shape");
    if (sides.empty()) throw DomainError("perimeter_of_shape needs a nonempty list of sides");
    double sum = 0.0;
    for (double s : sides) {
        require_positive(s, "every side");
        sum += s;
    }
    return sum;
}

double tangent_of_angle(std::span<const Value> a, const MathContext& ctx) {
    double angle = num(a, 0, "tangent_of_angle");
    require_positive(angle, "angle");
    double m = std::fmod(angle, 180.0);
    if (std::abs(m - 90.0) < 1e-9) throw DomainError("tangent undefined at 90 degrees (mod 180)");
    return tan_deg(angle, ctx);
}

double complementary_angle(std::span<const Value> a, const MathContext&) {
    double angle = num(a, 0, "complementary_angle");
    require(angle > 0.0 && angle < 90.0, "angle must lie strictly between 0 and 90 degrees");
    return 90.0 - angle;
}

double solve_for_x(std::span<const Value> a, const MathContext&) {
    LinearEquation e1 = LinearEquation::from_value(a[0]);
    LinearEquation e2 = LinearEquation::from_value(a[1]);
    double det = e1.a * e2.b - e2.a * e1.b;
    require(det != 0.0, "the system has no unique solution (zero determinant)");
    return (e1.c * e2.b - e2.c * e1.b) / det;
}

const std::unordered_map<std::string, FormulaFn>& table() {
    static const std::unordered_map<std::string, FormulaFn> t = {
        {"radius_of_sector_given_arc_length", radius_of_sector_given_arc_length},
        {"side_of_parallelogram_given_area", side_of_parallelogram_given_area},
        {"height_of_triangle_given_area", height_of_triangle_given_area},
        {"base_of_triangle_given_area", base_of_triangle_given_area},
        {"arc_length_of_sector", arc_length_of_sector},
        {"length_of_third_side", length_of_third_side},
        {"height_of_equilateral_triangle", height_of_equilateral_triangle},
        {"diagonal_of_square", diagonal_of_square},
        {"hypotenuse_of_right_triangle", hypotenuse_of_right_triangle},
        {"side_of_right_triangle_given_side", side_of_right_triangle_given_side},
        {"diameter_of_semi_circle_given_perimeter", diameter_of_semi_circle_given_perimeter},
        {"side_of_right_triangle_given_angle", side_of_right_triangle_given_angle},
        {"side_of_equilateral_triangle", side_of_equilateral_triangle},
        {"side_of_square_given_area", side_of_square_given_area},
        {"arc_of_semi_circle", arc_of_semi_circle},
        {"diagonal_of_rectangle", diagonal_of_rectangle},
        {"side_of_rectangle_given_diagonal", side_of_rectangle_given_diagonal},
        {"diameter_of_semi_circle_given_area", diameter_of_semi_circle_given_area},
        {"area_of_rectangle", area_of_rectangle},
        {"area_of_square_given_side", area_of_square_given_side},
        {"area_of_square_given_diagonal", area_of_square_given_diagonal},
        {"area_of_triangle_given_base_height", area_of_triangle_given_base_height},
        {"area_of_right_triangle", area_of_right_triangle},
        {"area_of_semi_circle", area_of_semi_circle},
        {"area_of_circle", area_of_circle},
        {"area_of_parallelogram", area_of_parallelogram},
        {"area_of_triangle_given_semi_perimeter", area_of_triangle_given_semi_perimeter},
        {"area_of_trapezoid", area_of_trapezoid},
        {"area_of_equilateral_triangle", area_of_equilateral_triangle},
        {"area_of_sector", area_of_sector},
        {"side_of_square_given_perimeter", side_of_square_given_perimeter},
        {"perimeter_of_shape", perimeter_of_shape},
        {"perimeter_of_square", perimeter_of_square},
        {"perimeter_of_rectangle_with_side_removed", perimeter_of_rectangle_with_side_removed},
        {"perimeter_of_square_given_diagonal", perimeter_of_square_given_diagonal},
        {"perimeter_of_trapezoid", perimeter_of_trapezoid},
        {"perimeter_of_rectangle", perimeter_of_rectangle},
        {"perimeter_of_parallelogram", perimeter_of_parallelogram},
        {"perimeter_of_triangle", perimeter_of_triangle},
        {"perimeter_of_semi_circle", perimeter_of_semi_circle},
        {"third_angle_of_triangle", third_angle_of_triangle},
        {"tangent_of_angle", tangent_of_angle},
        {"angle_of_right_triangle", angle_of_right_triangle},
        {"complementary_angle", complementary_angle},
        {"angle_of_sector", angle_of_sector},
        {"angle_of_parallelogram_given_area", angle_of_parallelogram_given_area},
        {"solve_for_x", solve_for_x},
    };
    return t;
}

}  // namespace

bool formula_exists(std::string_view formula_id) {
    return table().count(std::string(formula_id)) != 0;
}

FormulaFn formula_for(std::string_view formula_id) {
    auto it = table().find(std::string(formula_id));
    if (it == table().end())
        throw LoadError("unknown formula_id '" + std::string(formula_id) + "'");
    return it->second;
}

}  // namespace geosolve::detail
