#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geosolve/executor.hpp"

namespace geosolve {

// One geometry problem in the canonical dataset format (JSON lines with
// fields id, question, image_ref?, tikz?, label, depth?).
struct ProblemRecord {
    std::string id;
    std::string question;
    std::optional<std::string> image_ref;
    std::optional<std::string> tikz;
    double label = 0.0;
    std::optional<int> depth;  // 1, 2, or 3 when present
};

// Candidate programs a model produced for one problem, generation order
// preserved (JSON lines with fields id, candidates).
struct PredictionRecord {
    std::string id;
    CandidateSet candidates;
};

std::vector<ProblemRecord> load_dataset(const std::string& path);
void save_dataset(const std::vector<ProblemRecord>& records, const std::string& path);

std::vector<PredictionRecord> load_predictions(const std::string& path);
void save_predictions(const std::vector<PredictionRecord>& records, const std::string& path);

}  // namespace geosolve
