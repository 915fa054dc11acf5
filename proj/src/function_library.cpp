#include "geosolve/function_library.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "formulas.hpp"
#include "geosolve/errors.hpp"

namespace geosolve {

using nlohmann::json;

ParamKind param_kind_from_string(std::string_view s) {
    if (s == "length") return ParamKind::Length;
    if (s == "angle_deg") return ParamKind::AngleDeg;
    if (s == "area") return ParamKind::Area;
    if (s == "perimeter") return ParamKind::Perimeter;
    if (s == "arc_length") return ParamKind::ArcLength;
    if (s == "number") return ParamKind::Number;
    if (s == "number_list") return ParamKind::NumberList;
    throw LoadError("unknown param kind '" + std::string(s) + "'");
}

std::string_view to_string(ParamKind kind) {
    switch (kind) {
        case ParamKind::Length: return "length";
        case ParamKind::AngleDeg: return "angle_deg";
        case ParamKind::Area: return "area";
        case ParamKind::Perimeter: return "perimeter";
        case ParamKind::ArcLength: return "arc_length";
        case ParamKind::Number: return "number";
        case ParamKind::NumberList: return "number_list";
    }
    return "number";
}

std::string FunctionSpec::signature() const {
    std::string s = name + "(";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) s += ", ";
        s += params[i].name;
    }
    s += ")";
    return s;
}

LinearEquation LinearEquation::from_value(const Value& v) {
    const auto& list = as_list(v, "linear equation");
    if (list.size() != 3)
        throw DomainError("a linear equation must be a 3-element list [a, b, c]");
    LinearEquation eq{list[0], list[1], list[2]};
    if (eq.a == 0.0 && eq.b == 0.0)
        throw DomainError("a linear equation needs a nonzero x or y coefficient");
    return eq;
}

namespace {

// Counts occurrences of "{slot}" in the template text.
std::size_t count_slot(const std::string& text, const std::string& slot) {
    const std::string needle = "{" + slot + "}";
    std::size_t count = 0;
    for (std::size_t pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++count;
    return count;
}

void validate_template(const FunctionSpec& spec) {
    for (const auto& p : spec.params)
        if (count_slot(spec.template_text, p.name) != 1)
            throw LoadError("template for '" + spec.name + "' must contain the slot {" +
                            p.name + "} exactly once");
    if (count_slot(spec.template_text, "result") != 1)
        throw LoadError("template for '" + spec.name + "' must contain {result} exactly once");
}

std::string render_value(const Value& v, const MathContext& ctx) {
    if (is_number(v)) return render_number(std::get<double>(v), ctx);
    std::string s = "[";
    const auto& list = std::get<std::vector<double>>(v);
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (i) s += ", ";
        s += render_number(list[i], ctx);
    }
    return s + "]";
}

void replace_slot(std::string& text, const std::string& slot, const std::string& value) {
    const std::string needle = "{" + slot + "}";
    auto pos = text.find(needle);
    if (pos != std::string::npos) text.replace(pos, needle.size(), value);
}

}  // namespace

FunctionRegistry FunctionRegistry::from_manifest_text(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw LoadError(std::string("malformed function manifest: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("functions") || !doc["functions"].is_array())
        throw LoadError("function manifest must be an object with a 'functions' array");

    FunctionRegistry reg;
    for (const auto& entry : doc["functions"]) {
        FunctionSpec spec;
        try {
            spec.name = entry.at("name").get<std::string>();
            spec.description = entry.at("description").get<std::string>();
            spec.template_text = entry.at("template").get<std::string>();
            spec.formula_id = entry.at("formula_id").get<std::string>();
            for (const auto& p : entry.at("params")) {
                spec.params.push_back(ParamSpec{p.at("name").get<std::string>(),
                                                param_kind_from_string(p.at("kind").get<std::string>())});
            }
        } catch (const json::exception& e) {
            throw LoadError(std::string("malformed manifest entry: ") + e.what());
        }
        if (spec.name.empty()) throw LoadError("manifest entry with empty name");
        if (spec.params.empty())
            throw LoadError("function '" + spec.name + "' declares no parameters");
        if (reg.index_.count(spec.name))
            throw LoadError("duplicate function name '" + spec.name + "' in manifest");
        if (!detail::formula_exists(spec.formula_id))
            throw LoadError("unknown formula_id '" + spec.formula_id + "' for function '" +
                            spec.name + "'");
        validate_template(spec);
        reg.index_.emplace(spec.name, reg.specs_.size());
        reg.specs_.push_back(std::move(spec));
    }
    return reg;
}

FunctionRegistry FunctionRegistry::from_manifest_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open function manifest '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_manifest_text(buf.str());
}

const FunctionRegistry& FunctionRegistry::bundled() {
    static const FunctionRegistry reg = from_manifest_text(bundled_manifest_json());
    return reg;
}

bool FunctionRegistry::contains(std::string_view name) const {
    return index_.count(std::string(name)) != 0;
}

const FunctionSpec* FunctionRegistry::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    return it == index_.end() ? nullptr : &specs_[it->second];
}

std::pair<double, ExplanationStep> FunctionRegistry::eval(std::string_view name,
                                                          std::span<const Value> args,
                                                          const MathContext& ctx) const {
    const FunctionSpec* spec = find(name);
    if (!spec) throw UnknownFunctionError(std::string(name));
    if (args.size() != spec->params.size())
        throw EvalError(ErrorClass::Other,
                        spec->name + " takes " + std::to_string(spec->params.size()) +
                            " argument(s), got " + std::to_string(args.size()));
    for (std::size_t i = 0; i < args.size(); ++i) {
        const bool wants_list = spec->params[i].kind == ParamKind::NumberList;
        if (wants_list != is_list(args[i]))
            throw EvalError(ErrorClass::Other,
                            "argument '" + spec->params[i].name + "' of " + spec->name +
                                (wants_list ? " must be a list" : " must be a number"));
    }

    const double raw = detail::formula_for(spec->formula_id)(args, ctx);
    const double result = round_value(raw, ctx);

    ExplanationStep step;
    step.function = spec->name;
    step.result = result;
    step.text = spec->template_text;
    for (std::size_t i = 0; i < args.size(); ++i) {
        step.args.emplace_back(spec->params[i].name, args[i]);
        replace_slot(step.text, spec->params[i].name, render_value(args[i], ctx));
    }
    replace_slot(step.text, "result", render_number(result, ctx));
    return {result, std::move(step)};
}

}  // namespace geosolve
