#include "pdtomo/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>
#include <thread>

#include "pdtomo/errors.hpp"

namespace pdtomo::report {

using nlohmann::json;

namespace {

json provenance_as_json(const std::string& provenance) {
    if (provenance.empty()) {
        return json{{"kind", "unknown"}};
    }
    json j = json::parse(provenance, nullptr, false);
    if (j.is_discarded()) {
        return json(provenance);
    }
    return j;
}

std::optional<std::uint64_t> provenance_shots(const tensor::DataTensor& t) {
    const json prov = provenance_as_json(t.provenance_json);
    if (prov.is_object() && prov.contains("shots") &&
        prov["shots"].is_number_unsigned()) {
        return prov["shots"].get<std::uint64_t>();
    }
    return std::nullopt;
}

}  // namespace

json tensor_to_json(const tensor::DataTensor& t) {
    json j;
    j["format"] = kTensorFormat;
    j["m"] = t.m;
    j["d"] = t.d;
    j["shape"] = t.shape;
    j["values"] = t.values;
    j["provenance"] = provenance_as_json(t.provenance_json);
    return j;
}

tensor::DataTensor tensor_from_json(const json& j) {
    if (!j.is_object() || j.value("format", "") != kTensorFormat) {
        throw Error("not a " + std::string(kTensorFormat) + " document");
    }
    tensor::DataTensor t;
    t.m = j.at("m").get<int>();
    t.d = j.at("d").get<int>();
    t.shape = j.at("shape").get<std::vector<int>>();
    t.values = j.at("values").get<std::vector<double>>();
    if (static_cast<int>(t.shape.size()) != t.m + 1) {
        throw Error("tensor shape must list one state axis and m qudit axes");
    }
    std::size_t expected = 1;
    for (int s : t.shape) {
        if (s < 1) {
            throw Error("tensor axes must be positive");
        }
        expected *= static_cast<std::size_t>(s);
    }
    if (expected != t.values.size()) {
        throw Error("value count does not match the tensor shape");
    }
    for (double v : t.values) {
        if (!std::isfinite(v)) {
            throw Error("tensor values must be finite");
        }
    }
    if (j.contains("provenance")) {
        t.provenance_json = j["provenance"].dump();
    }
    return t;
}

void save_tensor(const tensor::DataTensor& t, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path);
    }
    out << tensor_to_json(t).dump(2) << "\n";
}

tensor::DataTensor load_tensor(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot read " + path);
    }
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        throw Error(path + " is not valid JSON");
    }
    return tensor_from_json(j);
}

tensor::DataTensor ingest_csv(const std::string& path, int m, int d) {
    if (m < 1 || m > 2) {
        throw Error("CSV ingestion supports m in {1, 2}");
    }
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot read " + path);
    }
    const int n_index_cols = m + 1;
    std::vector<std::vector<int>> indices;
    std::vector<double> cell_values;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) {
            fields.push_back(field);
        }
        if (static_cast<int>(fields.size()) != n_index_cols + 1) {
            throw Error(path + ":" + std::to_string(line_no) +
                        ": expected " + std::to_string(n_index_cols + 1) +
                        " columns");
        }
        try {
            std::vector<int> idx(n_index_cols);
            for (int c = 0; c < n_index_cols; ++c) {
                idx[c] = std::stoi(fields[c]);
                if (idx[c] < 0) {
                    throw Error("negative index");
                }
            }
            indices.push_back(idx);
            cell_values.push_back(std::stod(fields[n_index_cols]));
        } catch (const std::exception&) {
            if (line_no == 1) {
                continue;  // header row
            }
            throw Error(path + ":" + std::to_string(line_no) +
                        ": cannot parse row");
        }
    }
    if (indices.empty()) {
        throw Error(path + " holds no data rows");
    }
    std::vector<int> shape(n_index_cols, 0);
    for (const auto& idx : indices) {
        for (int c = 0; c < n_index_cols; ++c) {
            shape[c] = std::max(shape[c], idx[c] + 1);
        }
    }
    tensor::DataTensor t = tensor::make_tensor(m, d, shape);
    std::vector<char> seen(t.values.size(), 0);
    for (std::size_t row = 0; row < indices.size(); ++row) {
        const std::size_t flat = t.flat_index(indices[row]);
        if (seen[flat]++) {
            throw Error(path + ": duplicate cell in row " +
                        std::to_string(row + 1));
        }
        t.values[flat] = cell_values[row];
    }
    if (!std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; })) {
        throw Error(path + ": the setting grid is not fully covered");
    }
    t.provenance_json =
        json{{"kind", "ingested"}, {"source", path}}.dump();
    return t;
}

std::vector<int> supported_classes(int m) {
    if (m <= 1) {
        return {1};
    }
    if (m == 2) {
        return {1, 2};
    }
    if (m == 3) {
        return {1, 2, 3};
    }
    return {1, 2, m};
}

AnalysisReport analyze(const tensor::DataTensor& t, const AnalysisOptions& opt) {
    std::vector<int> classes =
        opt.classes.empty() ? supported_classes(t.m) : opt.classes;
    std::vector<schemes::BracketScheme> squares;
    std::vector<int> square_class;
    for (int k : classes) {
        const schemes::EnumerationReport enumeration =
            schemes::enumerate_schemes(t.m, t.d, k);
        for (const schemes::BracketScheme& s : enumeration.variants) {
            squares.push_back(s);
            square_class.push_back(k);
        }
    }
    if (!opt.scheme_filter.empty()) {
        std::vector<schemes::BracketScheme> kept;
        std::vector<int> kept_class;
        for (std::size_t i = 0; i < squares.size(); ++i) {
            const std::string text = schemes::print(squares[i]);
            if (std::find(opt.scheme_filter.begin(), opt.scheme_filter.end(),
                          text) != opt.scheme_filter.end()) {
                kept.push_back(squares[i]);
                kept_class.push_back(square_class[i]);
            }
        }
        squares = std::move(kept);
        square_class = std::move(kept_class);
    }

    const std::optional<std::uint64_t> shots = provenance_shots(t);
    auto scheme_threshold = [&](const schemes::BracketScheme& s) {
        if (opt.threshold) {
            return *opt.threshold;
        }
        if (shots) {
            return pd::shots_aware_threshold(s.corner_size(), *shots);
        }
        return pd::kNoiselessThreshold;
    };

    std::vector<SchemeRecord> records(squares.size());
    auto run_one = [&](std::size_t i) {
        SchemeRecord& rec = records[i];
        const schemes::BracketScheme& s = squares[i];
        rec.scheme = schemes::print(s);
        rec.k = square_class[i];
        rec.profile = schemes::sensitivity(s);
        rec.threshold = scheme_threshold(s);
        try {
            const pd::Square square = schemes::build_square(t, s);
            const pd::PDResult result = pd::partial_determinant(square);
            const pd::TrivialityReport triv =
                pd::triviality_test(result, rec.threshold);
            rec.ok = true;
            rec.frobenius_score = triv.frobenius_score;
            rec.max_abs_score = triv.max_abs_score;
            rec.trivial = triv.trivial;
            rec.corner_conditions = triv.corner_conditions;
        } catch (const Error& err) {
            rec.ok = false;
            rec.error = err.what();
        }
    };

    int workers = opt.workers;
    if (workers <= 0) {
        workers = static_cast<int>(
            std::min<unsigned>(8, std::max<unsigned>(
                                      1, std::thread::hardware_concurrency())));
    }
    if (workers <= 1 || squares.size() <= 1) {
        for (std::size_t i = 0; i < squares.size(); ++i) {
            run_one(i);
        }
    } else {
        std::vector<std::future<void>> tasks;
        for (int w = 0; w < workers; ++w) {
            tasks.push_back(std::async(std::launch::async, [&, w]() {
                for (std::size_t i = w; i < squares.size();
                     i += static_cast<std::size_t>(workers)) {
                    run_one(i);
                }
            }));
        }
        for (auto& task : tasks) {
            task.get();
        }
    }

    AnalysisReport report;
    report.records = std::move(records);
    report.any_failed =
        std::any_of(report.records.begin(), report.records.end(),
                    [](const SchemeRecord& r) { return !r.ok; });
    report.metadata = {
        {"format", kReportFormat},
        {"tool_version", kToolVersion},
        {"m", t.m},
        {"d", t.d},
        {"shape", t.shape},
        {"classes", classes},
        {"threshold", opt.threshold ? json(*opt.threshold) : json("auto")},
        {"deterministic", opt.deterministic},
        {"input_provenance", provenance_as_json(t.provenance_json)},
    };
    if (!opt.deterministic) {
        const auto now = std::chrono::system_clock::now();
        const std::time_t tt = std::chrono::system_clock::to_time_t(now);
        std::ostringstream stamp;
        stamp << std::put_time(std::gmtime(&tt), "%FT%TZ");
        report.metadata["timestamp"] = stamp.str();
    }
    return report;
}

json report_to_json(const AnalysisReport& report) {
    json out;
    out["metadata"] = report.metadata;
    json schemes_json = json::array();
    for (const SchemeRecord& rec : report.records) {
        json r = {
            {"scheme", rec.scheme},
            {"k", rec.k},
            {"status", rec.ok ? "ok" : "failed"},
            {"sensitivity",
             {{"sensitive_to", rec.profile.sensitive_to},
              {"insensitive_to", rec.profile.insensitive_to}}},
        };
        if (rec.ok) {
            r["score_frobenius"] = rec.frobenius_score;
            r["score_max_abs"] = rec.max_abs_score;
            r["threshold"] = rec.threshold;
            r["trivial"] = rec.trivial;
            r["corner_conditions"] = rec.corner_conditions;
        } else {
            r["error"] = rec.error;
        }
        schemes_json.push_back(std::move(r));
    }
    out["schemes"] = std::move(schemes_json);
    return out;
}

std::string human_table(const AnalysisReport& report) {
    std::vector<const SchemeRecord*> order;
    order.reserve(report.records.size());
    for (const SchemeRecord& rec : report.records) {
        order.push_back(&rec);
    }
    std::sort(order.begin(), order.end(),
              [](const SchemeRecord* a, const SchemeRecord* b) {
                  if (a->ok != b->ok) {
                      return !a->ok;  // failures surface first
                  }
                  if (a->ok && a->frobenius_score != b->frobenius_score) {
                      return a->frobenius_score > b->frobenius_score;
                  }
                  return a->scheme < b->scheme;
              });
    std::ostringstream out;
    out << std::left << std::setw(26) << "scheme" << std::setw(4) << "k"
        << std::setw(14) << "score_F" << std::setw(14) << "score_max"
        << std::setw(9) << "trivial" << "status\n";
    for (const SchemeRecord* rec : order) {
        out << std::left << std::setw(26) << rec->scheme << std::setw(4)
            << rec->k;
        if (rec->ok) {
            out << std::setw(14) << std::scientific << std::setprecision(3)
                << rec->frobenius_score << std::setw(14)
                << rec->max_abs_score << std::setw(9)
                << (rec->trivial ? "yes" : "NO") << "ok";
        } else {
            out << std::setw(14) << "-" << std::setw(14) << "-"
                << std::setw(9) << "-" << rec->error;
        }
        out << "\n";
    }
    return out.str();
}

ReducedRun run_reduced(const tensor::DataTensor& t, double threshold) {
    const int r = t.d * t.d;
    if (t.shape[0] < r + 1 || t.shape[t.m] < r + 1) {
        throw InsufficientSettingsError(
            "the reduced protocol needs " + std::to_string(r + 1) +
            " state settings and last-qudit settings");
    }
    tensor::SplitDescriptor split;
    split.row_axes.push_back({0, 0, r + 1});
    for (int u = 1; u < t.m; ++u) {
        split.row_axes.push_back({u, 0, 1});  // traced: identity observable
    }
    split.col_axes.push_back({t.m, 0, r + 1});
    const linalg::RealMatrix block = tensor::flatten(t, split);
    const pd::ReducedPD reduced = pd::reduced_pd(block);
    ReducedRun run;
    std::ostringstream name;
    name << "plus-one r=" << r;
    run.scheme = name.str();
    run.x = reduced.x;
    run.abs_x_minus_one = std::abs(reduced.x - 1.0);
    run.form_residual = reduced.form_residual;
    run.trivial = run.abs_x_minus_one <= threshold;
    return run;
}

}  // namespace pdtomo::report
