#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pdtomo/errors.hpp"
#include "pdtomo/model.hpp"
#include "pdtomo/report.hpp"
#include "pdtomo/schemes.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitConditioning = 3;

std::vector<int> parse_settings(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) {
        out.push_back(std::stoi(field));
    }
    return out;
}

pdtomo::model::CorrelationConfig parse_correlation(const std::string& text,
                                                   double epsilon,
                                                   std::uint64_t seed) {
    pdtomo::model::CorrelationConfig cfg;
    cfg.epsilon = epsilon;
    cfg.seed = seed;
    if (text == "none") {
        cfg.kind = pdtomo::model::CorrelationKind::none;
        return cfg;
    }
    if (text.rfind("spam:", 0) == 0) {
        cfg.kind = pdtomo::model::CorrelationKind::spam;
        cfg.q = std::stoi(text.substr(5));
        return cfg;
    }
    if (text.rfind("nonlocal:", 0) == 0) {
        const std::string pair = text.substr(9);
        const std::size_t comma = pair.find(',');
        if (comma == std::string::npos) {
            throw pdtomo::Error("nonlocal correlation needs two qudits: p,q");
        }
        cfg.kind = pdtomo::model::CorrelationKind::nonlocal;
        cfg.p = std::stoi(pair.substr(0, comma));
        cfg.q = std::stoi(pair.substr(comma + 1));
        if (cfg.p > cfg.q) {
            std::swap(cfg.p, cfg.q);
        }
        return cfg;
    }
    throw pdtomo::Error("correlation must be none, spam:q, or nonlocal:p,q");
}

std::uint64_t effective_seed(std::uint64_t flag_seed) {
    if (const char* env = std::getenv("PDTOMO_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return flag_seed;
}

int cmd_generate(int m, int d, const std::string& settings_text,
                 const std::string& correlation_text, double epsilon,
                 std::uint64_t seed, std::optional<std::uint64_t> shots,
                 const std::string& output) {
    std::vector<int> settings;
    pdtomo::model::CorrelationConfig cfg;
    try {
        settings = parse_settings(settings_text);
        cfg = parse_correlation(correlation_text, epsilon, seed);
    } catch (const std::exception& e) {
        std::cerr << "pdtomo: " << e.what() << "\n";
        return kExitUsage;
    }
    if (static_cast<int>(settings.size()) != m + 1) {
        std::cerr << "pdtomo: --settings needs N followed by " << m
                  << " measurement counts\n";
        return kExitUsage;
    }
    try {
        const std::vector<int> m_list(settings.begin() + 1, settings.end());
        const pdtomo::model::Devices devices =
            pdtomo::model::random_devices(m, d, settings[0], m_list, seed);
        pdtomo::tensor::DataTensor t = pdtomo::model::synthesize(devices, cfg);
        if (shots) {
            t = pdtomo::model::add_shot_noise(t, *shots, seed);
        }
        pdtomo::report::save_tensor(t, output);
        std::cout << "wrote " << output << " shape=[";
        for (std::size_t i = 0; i < t.shape.size(); ++i) {
            std::cout << (i ? "," : "") << t.shape[i];
        }
        std::cout << "]\n";
        return kExitOk;
    } catch (const pdtomo::ConditioningFailureError& e) {
        std::cerr << "pdtomo: " << e.what() << "\n";
        return kExitConditioning;
    } catch (const std::exception& e) {
        std::cerr << "pdtomo: " << e.what() << "\n";
        return kExitError;
    }
}

int cmd_enumerate(int m, int d, int k, bool as_json) {
    try {
        const pdtomo::schemes::EnumerationReport report =
            pdtomo::schemes::enumerate_schemes(m, d, k);
        if (as_json) {
            nlohmann::json j;
            j["m"] = m;
            j["d"] = d;
            j["k"] = k;
            j["count"] = report.count();
            nlohmann::json corners = nlohmann::json::array();
            for (const auto& s : report.corners) {
                corners.push_back(pdtomo::schemes::print(s));
            }
            nlohmann::json squares = nlohmann::json::array();
            for (const auto& s : report.squares) {
                squares.push_back(pdtomo::schemes::print(s));
            }
            nlohmann::json variants = nlohmann::json::array();
            for (const auto& s : report.variants) {
                variants.push_back(pdtomo::schemes::print(s));
            }
            j["corner_templates"] = std::move(corners);
            j["square_templates"] = std::move(squares);
            j["schemes"] = std::move(variants);
            j["symmetry_notes"] = report.symmetry_notes;
            std::cout << j.dump(2) << "\n";
        } else {
            for (const auto& s : report.variants) {
                std::cout << pdtomo::schemes::print(s) << "\n";
            }
            std::cerr << report.count() << " schemes (m=" << m << ", d=" << d
                      << ", k=" << k << ")\n";
        }
        return kExitOk;
    } catch (const pdtomo::BadClassError& e) {
        std::cerr << "pdtomo: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "pdtomo: " << e.what() << "\n";
        return kExitError;
    }
}

int cmd_analyze(const std::string& input, std::vector<int> classes,
                std::optional<double> threshold,
                const std::string& schemes_text, bool reduced,
                const std::string& output, bool deterministic, int workers,
                int csv_m, int csv_d) {
    try {
        pdtomo::tensor::DataTensor t;
        if (input.size() > 4 && input.substr(input.size() - 4) == ".csv") {
            if (csv_m <= 0 || csv_d <= 0) {
                std::cerr << "pdtomo: CSV input needs --m and --d\n";
                return kExitUsage;
            }
            t = pdtomo::report::ingest_csv(input, csv_m, csv_d);
        } else {
            t = pdtomo::report::load_tensor(input);
        }
        pdtomo::report::AnalysisOptions opt;
        opt.classes = std::move(classes);
        opt.threshold = threshold;
        opt.deterministic = deterministic;
        opt.workers = workers;
        std::stringstream ss(schemes_text);
        std::string field;
        while (ss >> field) {
            opt.scheme_filter.push_back(field);
        }
        pdtomo::report::AnalysisReport analysis =
            pdtomo::report::analyze(t, opt);
        nlohmann::json j = pdtomo::report::report_to_json(analysis);
        if (reduced) {
            const double reduced_threshold =
                threshold ? *threshold : pdtomo::pd::kNoiselessThreshold;
            const pdtomo::report::ReducedRun run =
                pdtomo::report::run_reduced(t, reduced_threshold);
            j["reduced"] = {{"scheme", run.scheme},
                            {"x", run.x},
                            {"abs_x_minus_one", run.abs_x_minus_one},
                            {"form_residual", run.form_residual},
                            {"trivial", run.trivial}};
            std::cout << "reduced: x=" << run.x
                      << " |x-1|=" << run.abs_x_minus_one
                      << (run.trivial ? " trivial" : " NONTRIVIAL") << "\n";
        }
        std::ofstream out(output);
        if (!out) {
            std::cerr << "pdtomo: cannot write " << output << "\n";
            return kExitError;
        }
        out << j.dump(2) << "\n";
        std::cout << pdtomo::report::human_table(analysis);
        std::cout << "report written to " << output << "\n";
        return analysis.any_failed ? kExitConditioning : kExitOk;
    } catch (const pdtomo::BadClassError& e) {
        std::cerr << "pdtomo: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "pdtomo: " << e.what() << "\n";
        return kExitError;
    }
}

int cmd_demo(std::uint64_t seed) {
    try {
        using namespace pdtomo;
        const int m = 2, d = 2;
        const std::vector<int> m_list = {8, 8};
        const model::Devices devices =
            model::random_devices(m, d, 32, m_list, seed);

        model::CorrelationConfig clean;
        clean.seed = seed;
        const tensor::DataTensor uncorrelated =
            model::synthesize(devices, clean);

        model::CorrelationConfig spam2;
        spam2.kind = model::CorrelationKind::spam;
        spam2.q = 2;
        spam2.epsilon = 0.1;
        spam2.seed = seed;
        const tensor::DataTensor correlated =
            model::synthesize(devices, spam2);

        report::AnalysisOptions opt;
        opt.classes = {1};
        opt.deterministic = true;
        std::cout << "== uncorrelated device pair ==\n"
                  << report::human_table(report::analyze(uncorrelated, opt))
                  << "\n== same devices, state correlated with qudit 2 "
                     "(epsilon=0.1) ==\n"
                  << report::human_table(report::analyze(correlated, opt));
        std::cout << "\nschemes that keep qudit 2 left of the colon stay "
                     "trivial; the rest light up.\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "pdtomo: " << e.what() << "\n";
        return kExitError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"partial-determinant toolkit for correlated-SPAM detection"};
    app.require_subcommand(1);

    // generate
    auto* generate = app.add_subcommand(
        "generate", "synthesize a data tensor from random devices");
    int gen_m = 2, gen_d = 2;
    std::string gen_settings = "8,8,8";
    std::string gen_correlation = "none";
    double gen_epsilon = 0.0;
    std::uint64_t gen_seed = 1;
    std::uint64_t gen_shots = 0;
    bool gen_has_shots = false;
    std::string gen_output = "tensor.json";
    generate->add_option("--m", gen_m, "qudit count");
    generate->add_option("--d", gen_d, "qudit dimension");
    generate->add_option("--settings", gen_settings,
                         "N,M1,...,Mm setting counts");
    generate->add_option("--correlation", gen_correlation,
                         "none | spam:q | nonlocal:p,q");
    generate->add_option("--epsilon", gen_epsilon, "correlation strength");
    generate->add_option("--seed", gen_seed, "master seed");
    generate->add_option("--shots", gen_shots, "per-setting shot count")
        ->trigger_on_parse()
        ->each([&](const std::string&) { gen_has_shots = true; });
    generate->add_option("--output,-o", gen_output, "output tensor path");

    // enumerate
    auto* enumerate =
        app.add_subcommand("enumerate", "list the schemes for (m, d, k)");
    int enum_m = 2, enum_d = 2, enum_k = 1;
    bool enum_json = false;
    enumerate->add_option("--m", enum_m, "qudit count");
    enumerate->add_option("--d", enum_d, "qudit dimension");
    enumerate->add_option("--k", enum_k, "scheme class (1..m)")->required();
    enumerate->add_flag("--json", enum_json, "emit JSON");

    // analyze
    auto* analyze = app.add_subcommand(
        "analyze", "run PD sweeps over a tensor and write a report");
    std::string an_input;
    std::vector<int> an_classes;
    double an_threshold = -1.0;
    bool an_has_threshold = false;
    std::string an_schemes;
    bool an_reduced = false;
    std::string an_output = "report.json";
    bool an_deterministic = false;
    int an_workers = 0;
    int an_m = 0, an_d = 0;
    analyze->add_option("--input,-i", an_input, "tensor JSON or CSV path")
        ->required();
    analyze->add_option("--k", an_classes, "scheme classes to sweep");
    analyze->add_option("--threshold", an_threshold, "triviality threshold")
        ->trigger_on_parse()
        ->each([&](const std::string&) { an_has_threshold = true; });
    analyze->add_option("--schemes", an_schemes,
                        "space-separated scheme texts to run");
    analyze->add_flag("--reduced", an_reduced,
                      "also run the (r+1)x(r+1) protocol");
    analyze->add_option("--output,-o", an_output, "report path");
    analyze->add_flag("--deterministic", an_deterministic,
                      "suppress the timestamp for byte-identical reports");
    analyze->add_option("--workers", an_workers, "worker threads (0 = auto)");
    analyze->add_option("--m", an_m, "qudit count (CSV input)");
    analyze->add_option("--d", an_d, "qudit dimension (CSV input)");

    // demo
    auto* demo = app.add_subcommand("demo", "end-to-end detection example");
    std::uint64_t demo_seed = 7;
    demo->add_option("--seed", demo_seed, "master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (generate->parsed()) {
        return cmd_generate(gen_m, gen_d, gen_settings, gen_correlation,
                            gen_epsilon, effective_seed(gen_seed),
                            gen_has_shots
                                ? std::optional<std::uint64_t>(gen_shots)
                                : std::nullopt,
                            gen_output);
    }
    if (enumerate->parsed()) {
        return cmd_enumerate(enum_m, enum_d, enum_k, enum_json);
    }
    if (analyze->parsed()) {
        return cmd_analyze(an_input, an_classes,
                           an_has_threshold ? std::optional<double>(an_threshold)
                                            : std::nullopt,
                           an_schemes, an_reduced, an_output, an_deterministic,
                           an_workers, an_m, an_d);
    }
    if (demo->parsed()) {
        return cmd_demo(effective_seed(demo_seed));
    }
    return kExitUsage;
}
