#include "geosolve/dataset.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

#include "geosolve/errors.hpp"

namespace geosolve {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

json parse_line(const std::string& line, const std::string& path, std::size_t line_no) {
    try {
        return json::parse(line);
    } catch (const json::exception& e) {
        throw LoadError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
}

}  // namespace

std::vector<ProblemRecord> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open dataset '" + path + "'");

    std::vector<ProblemRecord> records;
    std::set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = parse_line(line, path, line_no);
        ProblemRecord rec;
        const std::string where = path + ":" + std::to_string(line_no);
        if (!j.contains("id") || !j["id"].is_string())
            throw LoadError(where + ": record missing string 'id'");
        rec.id = j["id"].get<std::string>();
        if (!j.contains("question") || !j["question"].is_string())
            throw LoadError(where + ": record missing string 'question'");
        rec.question = j["question"].get<std::string>();
        if (!j.contains("label") || !j["label"].is_number())
            throw LoadError(where + ": record missing numeric 'label'");
        rec.label = j["label"].get<double>();
        if (!std::isfinite(rec.label)) throw LoadError(where + ": label must be finite");
        if (j.contains("image_ref") && !j["image_ref"].is_null())
            rec.image_ref = j["image_ref"].get<std::string>();
        if (j.contains("tikz") && !j["tikz"].is_null())
            rec.tikz = j["tikz"].get<std::string>();
        if (j.contains("depth") && !j["depth"].is_null()) {
            if (!j["depth"].is_number_integer())
                throw LoadError(where + ": depth must be an integer");
            int d = j["depth"].get<int>();
            if (d < 1 || d > 3) throw LoadError(where + ": depth must be 1, 2, or 3");
            rec.depth = d;
        }
        if (!ids.insert(rec.id).second)
            throw LoadError(where + ": duplicate problem id '" + rec.id + "'");
        records.push_back(std::move(rec));
    }
    return records;
}

void save_dataset(const std::vector<ProblemRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write dataset '" + path + "'");
    for (const auto& rec : records) {
        ordered_json j;
        j["id"] = rec.id;
        j["question"] = rec.question;
        if (rec.image_ref) j["image_ref"] = *rec.image_ref;
        if (rec.tikz) j["tikz"] = *rec.tikz;
        j["label"] = rec.label;
        if (rec.depth) j["depth"] = *rec.depth;
        out << j.dump() << '\n';
    }
}

std::vector<PredictionRecord> load_predictions(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open predictions '" + path + "'");

    std::vector<PredictionRecord> records;
    std::set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j = parse_line(line, path, line_no);
        const std::string where = path + ":" + std::to_string(line_no);
        PredictionRecord rec;
        if (!j.contains("id") || !j["id"].is_string())
            throw LoadError(where + ": prediction missing string 'id'");
        rec.id = j["id"].get<std::string>();
        if (!j.contains("candidates") || !j["candidates"].is_array() || j["candidates"].empty())
            throw LoadError(where + ": prediction needs a nonempty 'candidates' array");
        for (const auto& c : j["candidates"]) {
            if (!c.is_string()) throw LoadError(where + ": candidates must be strings");
            rec.candidates.programs.push_back(c.get<std::string>());
        }
        if (!ids.insert(rec.id).second)
            throw LoadError(where + ": duplicate prediction id '" + rec.id + "'");
        records.push_back(std::move(rec));
    }
    return records;
}

void save_predictions(const std::vector<PredictionRecord>& records, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write predictions '" + path + "'");
    for (const auto& rec : records) {
        ordered_json j;
        j["id"] = rec.id;
        j["candidates"] = rec.candidates.programs;
        out << j.dump() << '\n';
    }
}

}  // namespace geosolve
