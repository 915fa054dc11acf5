#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "geosolve/errors.hpp"
#include "geosolve/function_library.hpp"

using namespace geosolve;

namespace {

const MathContext& GV = MathContext::geomverse();
const MathContext& EX = MathContext::exact();

double eval1(const FunctionRegistry& reg, const char* name, std::initializer_list<double> args,
             const MathContext& ctx) {
    std::vector<Value> values;
    for (double a : args) values.emplace_back(a);
    return reg.eval(name, values, ctx).first;
}

struct Uniform {
    std::mt19937_64 rng;
    explicit Uniform(std::uint64_t seed) : rng(seed) {}
    double operator()(double lo, double hi) {
        return lo + (rng() >> 11) * 0x1.0p-53 * (hi - lo);
    }
};

}  // namespace

TEST_CASE("bundled manifest yields exactly the 47-function catalog") {
    const auto& reg = FunctionRegistry::bundled();
    CHECK(reg.size() == 47);
    CHECK(reg.contains("area_of_circle"));
    CHECK(reg.contains("solve_for_x"));
    CHECK(!reg.contains("no_such_function"));
    CHECK(reg.find("nonexistent") == nullptr);
}

TEST_CASE("manifest loading errors") {
    CHECK_NOTHROW(FunctionRegistry::from_manifest_text(R"({"functions": []})"));
    CHECK(FunctionRegistry::from_manifest_text(R"({"functions": []})").size() == 0);
    CHECK_THROWS_AS(FunctionRegistry::from_manifest_text("not json"), LoadError);
    // duplicate names
    const char* dup = R"({"functions": [
        {"name": "area_of_circle", "params": [{"name": "diameter", "kind": "length"}],
         "description": "d", "template": "{diameter} {result}", "formula_id": "area_of_circle"},
        {"name": "area_of_circle", "params": [{"name": "diameter", "kind": "length"}],
         "description": "d", "template": "{diameter} {result}", "formula_id": "area_of_circle"}
    ]})";
    CHECK_THROWS_WITH_AS(FunctionRegistry::from_manifest_text(dup),
                         doctest::Contains("duplicate"), LoadError);
    // unknown formula id
    const char* bad_id = R"({"functions": [
        {"name": "f", "params": [{"name": "x", "kind": "number"}],
         "description": "d", "template": "{x} {result}", "formula_id": "no_such_formula"}
    ]})";
    CHECK_THROWS_WITH_AS(FunctionRegistry::from_manifest_text(bad_id),
                         doctest::Contains("formula_id"), LoadError);
    // template missing a slot
    const char* bad_template = R"({"functions": [
        {"name": "area_of_circle", "params": [{"name": "diameter", "kind": "length"}],
         "description": "d", "template": "no slots here", "formula_id": "area_of_circle"}
    ]})";
    CHECK_THROWS_AS(FunctionRegistry::from_manifest_text(bad_template), LoadError);
}

TEST_CASE("worked values from the corpus") {
    const auto& reg = FunctionRegistry::bundled();
    CHECK(eval1(reg, "area_of_rectangle", {2, 3}, EX) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(eval1(reg, "length_of_third_side", {21, 11, 25}, GV) == doctest::Approx(11.9).epsilon(1e-9));
    CHECK(eval1(reg, "area_of_triangle_given_semi_perimeter", {29.43, 23, 13, 22.85}, GV) ==
          doctest::Approx(143.03).epsilon(1e-9));
    CHECK(eval1(reg, "diagonal_of_rectangle", {23, 12}, GV) == doctest::Approx(25.94).epsilon(1e-9));
    CHECK(eval1(reg, "perimeter_of_parallelogram", {15, 17}, GV) == doctest::Approx(64.0).epsilon(1e-9));
    CHECK(eval1(reg, "perimeter_of_parallelogram", {15, 17}, EX) == doctest::Approx(64.0).epsilon(1e-12));
}

TEST_CASE("semi-circle diameter from area inverts the forward formula") {
    const auto& reg = FunctionRegistry::bundled();
    // Independent oracle: forward area of a d=12 semi-circle under pi=3.14 is
    // 3.14 * 144 / 8 = 56.52, so inversion must give 12 back.
    CHECK(eval1(reg, "area_of_semi_circle", {12}, GV) == doctest::Approx(56.52).epsilon(1e-9));
    CHECK(eval1(reg, "diameter_of_semi_circle_given_area", {56.52}, GV) ==
          doctest::Approx(12.0).epsilon(1e-9));
}

TEST_CASE("trig values are rounded before use under geomverse") {
    const auto& reg = FunctionRegistry::bundled();
    // cos 25 = 0.9063... -> 0.91; 562 - 462*0.91 = 141.58; sqrt = 11.8987 -> 11.9
    double expr = 21.0 * 21 + 11 * 11 - 2 * 21 * 11 * 0.91;
    CHECK(expr == doctest::Approx(141.58));
    CHECK(eval1(reg, "length_of_third_side", {21, 11, 25}, GV) == doctest::Approx(11.9));
    // sin 60 = 0.8660 -> 0.87 under geomverse
    CHECK(eval1(reg, "height_of_equilateral_triangle", {10}, GV) == doctest::Approx(8.7));
    CHECK(eval1(reg, "height_of_equilateral_triangle", {10}, EX) ==
          doctest::Approx(8.66025403784).epsilon(1e-9));
}

TEST_CASE("domain violations raise MathDomain, never a wrong number") {
    const auto& reg = FunctionRegistry::bundled();
    auto expect_domain = [&](const char* name, std::initializer_list<double> args) {
        std::vector<Value> values;
        for (double a : args) values.emplace_back(a);
        CHECK_THROWS_AS(reg.eval(name, values, GV), DomainError);
    };
    expect_domain("area_of_rectangle", {-2, 3});
    expect_domain("area_of_rectangle", {0, 3});
    expect_domain("side_of_right_triangle_given_side", {5, 3});       // hypotenuse < side
    expect_domain("side_of_rectangle_given_diagonal", {5, 12});       // diagonal < side
    expect_domain("angle_of_right_triangle", {5, 3});                 // arcsine arg > 1
    expect_domain("angle_of_parallelogram_given_area", {2, 3, 100});  // area > a*b
    expect_domain("third_angle_of_triangle", {120, 70});
    expect_domain("complementary_angle", {95});
    expect_domain("tangent_of_angle", {90});
    expect_domain("tangent_of_angle", {270});
    expect_domain("length_of_third_side", {3, 4, 180});
    expect_domain("area_of_triangle_given_semi_perimeter", {5, 20, 3, 3});  // negative factor
    expect_domain("area_of_parallelogram", {3, 4, 200});

    // perimeter_of_shape rejects an empty list
    std::vector<Value> empty_list{Value(std::vector<double>{})};
    CHECK_THROWS_AS(reg.eval("perimeter_of_shape", empty_list, GV), DomainError);

    // unknown function is a detectable miss
    std::vector<Value> one{Value(1.0)};
    CHECK_THROWS_AS(reg.eval("no_such_function", one, GV), UnknownFunctionError);

    // arity mismatch is an Other-class failure
    try {
        reg.eval("area_of_rectangle", one, GV);
        FAIL("expected an arity error");
    } catch (const EvalError& e) {
        CHECK(e.klass == ErrorClass::Other);
    }
}

TEST_CASE("solve_for_x") {
    const auto& reg = FunctionRegistry::bundled();
    // 2x = 10 and x + y = 7
    std::vector<Value> args{Value(std::vector<double>{2, 0, 10}),
                            Value(std::vector<double>{1, 1, 7})};
    CHECK(reg.eval("solve_for_x", args, EX).first == doctest::Approx(5.0));

    std::vector<Value> singular{Value(std::vector<double>{1, 1, 3}),
                                Value(std::vector<double>{2, 2, 6})};
    CHECK_THROWS_AS(reg.eval("solve_for_x", singular, EX), DomainError);

    std::vector<Value> degenerate{Value(std::vector<double>{0, 0, 3}),
                                  Value(std::vector<double>{1, 1, 6})};
    CHECK_THROWS_AS(reg.eval("solve_for_x", degenerate, EX), DomainError);

    std::vector<Value> short_list{Value(std::vector<double>{1, 2}),
                                  Value(std::vector<double>{1, 1, 6})};
    CHECK_THROWS_AS(reg.eval("solve_for_x", short_list, EX), DomainError);

    // solve round-trip: random systems reproduce x
    Uniform u(99);
    for (int i = 0; i < 1000; ++i) {
        double x = u(-50, 50), y = u(-50, 50);
        double a1 = u(1, 5), b1 = u(-3, 3), a2 = u(-3, 3), b2 = u(1, 5);
        if (std::abs(a1 * b2 - a2 * b1) < 1e-6) continue;
        std::vector<Value> eqs{Value(std::vector<double>{a1, b1, a1 * x + b1 * y}),
                               Value(std::vector<double>{a2, b2, a2 * x + b2 * y})};
        CHECK(reg.eval("solve_for_x", eqs, EX).first == doctest::Approx(x).epsilon(1e-6));
    }
}

TEST_CASE("explanation step fills the template with rendered values") {
    const auto& reg = FunctionRegistry::bundled();
    std::vector<Value> args{Value(55.0), Value(60.0)};
    auto [value, step] = reg.eval("third_angle_of_triangle", args, GV);
    CHECK(value == 65.0);
    CHECK(step.function == "third_angle_of_triangle");
    CHECK(step.result == 65.0);
    CHECK(step.text ==
          "Two angles of the triangle are 55.0 and 60.0 degrees, so the third angle is 65.0 "
          "degrees.");
    REQUIRE(step.args.size() == 2);
    CHECK(step.args[0].first == "angle_1");

    // list arguments render as bracketed lists
    std::vector<Value> list_args{Value(std::vector<double>{3, 4, 5})};
    auto [perim, pstep] = reg.eval("perimeter_of_shape", list_args, GV);
    CHECK(perim == 12.0);
    CHECK(pstep.text == "Adding up the sides [3.0, 4.0, 5.0] gives a perimeter of 12.0.");
}

TEST_CASE("eval is deterministic bit for bit") {
    const auto& reg = FunctionRegistry::bundled();
    std::vector<Value> args{Value(21.0), Value(11.0), Value(25.0)};
    auto [v1, s1] = reg.eval("length_of_third_side", args, GV);
    auto [v2, s2] = reg.eval("length_of_third_side", args, GV);
    CHECK(std::memcmp(&v1, &v2, sizeof v1) == 0);
    CHECK(s1.text == s2.text);
}

TEST_CASE("geomverse results always land on the 2-decimal grid") {
    const auto& reg = FunctionRegistry::bundled();
    Uniform u(123);
    const char* names[] = {"area_of_rectangle", "hypotenuse_of_right_triangle",
                           "length_of_third_side", "area_of_semi_circle",
                           "area_of_equilateral_triangle"};
    for (int i = 0; i < 2000; ++i) {
        const char* name = names[i % 5];
        std::vector<Value> args;
        if (std::strcmp(name, "length_of_third_side") == 0)
            args = {Value(u(1, 500)), Value(u(1, 500)), Value(u(10, 170))};
        else if (std::strcmp(name, "area_of_semi_circle") == 0 ||
                 std::strcmp(name, "area_of_equilateral_triangle") == 0)
            args = {Value(u(0.1, 1000))};
        else
            args = {Value(u(0.1, 1000)), Value(u(0.1, 1000))};
        double v = reg.eval(name, args, GV).first;
        CHECK(std::abs(v * 100.0 - std::round(v * 100.0)) < 1e-6);
    }
}

TEST_CASE("law-of-cosines degeneracy matches the Pythagorean route") {
    const auto& reg = FunctionRegistry::bundled();
    Uniform u(321);
    for (int i = 0; i < 2000; ++i) {
        double a = u(0.1, 1000), b = u(0.1, 1000);
        double via_cos = eval1(reg, "length_of_third_side", {a, b, 90.0}, EX);
        double via_pyth = eval1(reg, "hypotenuse_of_right_triangle", {a, b}, EX);
        CHECK(via_cos == doctest::Approx(via_pyth).epsilon(1e-12));
    }
}

TEST_CASE("inverse pairs round-trip under the exact context") {
    const auto& reg = FunctionRegistry::bundled();
    Uniform u(777);
    auto rel_ok = [](double got, double want) {
        return std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want));
    };
    for (int i = 0; i < 10000; ++i) {
        double s = u(1e-3, 1e6);
        CHECK(rel_ok(eval1(reg, "side_of_square_given_area",
                           {eval1(reg, "area_of_square_given_side", {s}, EX)}, EX), s));
        double d = u(1e-3, 1e6);
        CHECK(rel_ok(eval1(reg, "diameter_of_semi_circle_given_area",
                           {eval1(reg, "area_of_semi_circle", {d}, EX)}, EX), d));
        CHECK(rel_ok(eval1(reg, "diameter_of_semi_circle_given_perimeter",
                           {eval1(reg, "perimeter_of_semi_circle", {d}, EX)}, EX), d));
        double r = u(1e-3, 1e4), theta = u(1.0, 359.0);
        double arc = eval1(reg, "arc_length_of_sector", {theta, r}, EX);
        CHECK(rel_ok(eval1(reg, "radius_of_sector_given_arc_length", {arc, theta}, EX), r));
        CHECK(rel_ok(eval1(reg, "angle_of_sector", {arc, r}, EX), theta));
        double a = u(1e-3, 1e3), b = u(1e-3, 1e3);
        double hyp = eval1(reg, "hypotenuse_of_right_triangle", {a, b}, EX);
        CHECK(rel_ok(eval1(reg, "side_of_right_triangle_given_side", {a, hyp}, EX), b));
        double diag = eval1(reg, "diagonal_of_rectangle", {a, b}, EX);
        CHECK(rel_ok(eval1(reg, "side_of_rectangle_given_diagonal", {diag, a}, EX), b));
    }
}

TEST_CASE("heron consistency against a coordinate construction") {
    const auto& reg = FunctionRegistry::bundled();
    Uniform u(4242);
    for (int i = 0; i < 5000; ++i) {
        // Construct the triangle from a base and height, then derive its
        // sides; Heron's route must agree with base*height/2.
        double base = u(0.5, 100), height = u(0.5, 100), x = u(0.0, 1.0) * base;
        double s2 = std::hypot(x, height);
        double s3 = std::hypot(base - x, height);
        double sp = (base + s2 + s3) / 2.0;
        double heron = eval1(reg, "area_of_triangle_given_semi_perimeter", {sp, base, s2, s3}, EX);
        double direct = eval1(reg, "area_of_triangle_given_base_height", {base, height}, EX);
        CHECK(std::abs(heron - direct) <= 1e-6 * std::max(1.0, std::abs(direct)));
    }
}
