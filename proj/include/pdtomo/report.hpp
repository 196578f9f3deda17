#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pdtomo/schemes.hpp"
#include "pdtomo/tensor.hpp"

namespace pdtomo::report {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kTensorFormat = "pdtomo-tensor-v1";
inline constexpr const char* kReportFormat = "pdtomo-report-v1";

nlohmann::json tensor_to_json(const tensor::DataTensor& t);
tensor::DataTensor tensor_from_json(const nlohmann::json& j);
void save_tensor(const tensor::DataTensor& t, const std::string& path);
tensor::DataTensor load_tensor(const std::string& path);

// Dense CSV with columns a,i[,j],value (header optional); m <= 2.
tensor::DataTensor ingest_csv(const std::string& path, int m, int d);

struct SchemeRecord {
    std::string scheme;
    int k = 0;
    bool ok = false;
    std::string error;
    double frobenius_score = 0.0;
    double max_abs_score = 0.0;
    double threshold = 0.0;
    bool trivial = false;
    std::array<double, 4> corner_conditions{};
    schemes::SensitivityProfile profile;
};

struct AnalysisOptions {
    std::vector<int> classes;  // empty: every supported class for this m
    std::optional<double> threshold;
    std::vector<std::string> scheme_filter;  // run only these scheme texts
    bool deterministic = false;
    int workers = 0;  // 0: pick from hardware
};

struct AnalysisReport {
    nlohmann::json metadata;
    std::vector<SchemeRecord> records;
    bool any_failed = false;
};

std::vector<int> supported_classes(int m);

AnalysisReport analyze(const tensor::DataTensor& t, const AnalysisOptions& opt);

nlohmann::json report_to_json(const AnalysisReport& report);
std::string human_table(const AnalysisReport& report);

struct ReducedRun {
    std::string scheme;
    double x = 0.0;
    double abs_x_minus_one = 0.0;
    double form_residual = 0.0;
    bool trivial = false;
};

// Appendix-style (r+1) x (r+1) protocol on the canonical corner flattening.
ReducedRun run_reduced(const tensor::DataTensor& t, double threshold);

}  // namespace pdtomo::report
