// Command-line front end. Talks to the library only through endstretch.h.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "endstretch/endstretch.h"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr int exit_pass = 0;
constexpr int exit_fail = 1;
constexpr int exit_usage = 2;

// Carries a library status out to main, where it becomes an exit code.
struct Failure {
    es_status status;
    std::string message;
};

int exit_code_for(es_status s) {
    switch (s) {
        case ES_VERIFICATION:
        case ES_INTERNAL:
        case ES_CONVERGENCE: return exit_fail;
        default: return exit_usage;
    }
}

void check(es_status s) {
    if (s != ES_OK) throw Failure{s, es_last_error()};
}

struct CString {
    char* p = nullptr;
    ~CString() { es_string_free(p); }
    std::string str() const { return p ? p : ""; }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{ES_IO, "cannot read " + path};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw Failure{ES_IO, "cannot write " + path.string()};
}

fs::path output_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("ENDSTRETCH_OUT_DIR"); env && *env) return env;
    return ".";
}

std::string utc_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Matrix {
    std::vector<int64_t> entries;
    size_t n = 0;
};

// A file path, or inline JSON rows such as [[2,1],[1,1]].
Matrix load_matrix(const std::string& arg) {
    std::string text = !arg.empty() && arg.front() == '[' ? arg : read_file(arg);
    int64_t* raw = nullptr;
    Matrix m;
    check(es_parse_matrix(text.c_str(), &raw, &m.n));
    m.entries.assign(raw, raw + m.n * m.n);
    es_entries_free(raw);
    return m;
}

std::string matrix_stem(const std::string& arg) {
    if (!arg.empty() && arg.front() == '[') return "inline";
    return fs::path(arg).stem().string();
}

std::vector<std::string> expand_figs(const std::vector<std::string>& figs) {
    static const std::vector<std::string> all = {"piece_map", "digraphs", "orbits", "expanded_rectangles",
                                                 "complex_2d"};
    std::vector<std::string> out;
    for (const auto& f : figs) {
        if (f == "all")
            out.insert(out.end(), all.begin(), all.end());
        else
            out.push_back(f);
    }
    return out;
}

void render_figures(const std::string& record, const std::vector<std::string>& figs, const fs::path& dir,
                    const std::string& stem) {
    for (const auto& f : expand_figs(figs)) {
        CString svg;
        check(es_render(record.c_str(), f.c_str(), &svg.p));
        auto path = dir / (stem + "." + es_figure_name(f.c_str()) + ".svg");
        write_file(path, svg.str());
        std::cout << "figure " << f << ": " << path.string() << "\n";
    }
}

// Prints the named checks of a verification report; returns whether all passed.
bool print_report(const std::string& report_json) {
    auto r = Json::parse(report_json);
    for (const auto& c : r["checks"]) {
        bool ok = c["passed"].get<bool>();
        std::cout << (ok ? "  pass " : "  FAIL ") << c["name"].get<std::string>();
        if (!ok) std::cout << " [" << c["category"].get<std::string>() << "]";
        std::cout << ": " << c["detail"].get<std::string>() << "\n";
    }
    return r["passed"].get<bool>();
}

struct ConstructOptions {
    std::string matrix;
    std::optional<int> integer;
    std::optional<size_t> lift;
    double tol = 1e-10;
    std::optional<size_t> depth;
    bool corner_selection = false;
    bool insert_genus = false;
    std::optional<size_t> weak_perron;
    std::vector<std::string> figs;
    std::string out;
    bool verify = false;
    std::string timestamp;
};

int run_construct(const ConstructOptions& o) {
    es_config* raw = nullptr;
    std::string stem;
    if (o.integer) {
        if (!o.matrix.empty() || o.lift) throw Failure{ES_INVALID_INPUT, "--integer excludes --matrix and --lift"};
        check(es_config_new_integer(*o.integer, &raw));
        stem = "integer-" + std::to_string(*o.integer);
    } else {
        if (o.matrix.empty()) throw Failure{ES_INVALID_INPUT, "one of --matrix or --integer is required"};
        auto m = load_matrix(o.matrix);
        stem = matrix_stem(o.matrix);
        if (o.lift) {
            check(es_config_new_lift(m.entries.data(), m.n, *o.lift, &raw));
            stem += "-lift" + std::to_string(*o.lift);
        } else {
            check(es_config_new_matrix(m.entries.data(), m.n, &raw));
        }
    }
    std::unique_ptr<es_config, decltype(&es_config_free)> cfg(raw, es_config_free);
    if (!o.integer) check(es_config_set_source(cfg.get(), o.matrix.c_str()));
    check(es_config_set_tol(cfg.get(), o.tol));
    if (o.depth) check(es_config_set_depth(cfg.get(), *o.depth));
    check(es_config_set_corner_selection(cfg.get(), o.corner_selection));
    check(es_config_set_insert_genus(cfg.get(), o.insert_genus));
    if (o.weak_perron) check(es_config_set_weak_perron(cfg.get(), *o.weak_perron));

    es_record* rec_raw = nullptr;
    check(es_construct(cfg.get(), &rec_raw));
    std::unique_ptr<es_record, decltype(&es_record_free)> rec(rec_raw, es_record_free);
    CString json;
    const std::string ts = o.timestamp.empty() ? utc_now() : o.timestamp;
    check(es_record_json(rec.get(), ts.c_str(), &json.p));
    const std::string record = json.str();

    const fs::path dir = output_dir(o.out);
    const auto record_path = dir / (stem + ".record.json");
    write_file(record_path, record);

    auto j = Json::parse(record);
    char buf[160];
    std::snprintf(buf, sizeof buf, "lambda = %.12g   stretch factor = %.12g", j["eigen"]["lambda"].get<double>(),
                  j["surface"]["stretch_factor"].get<double>());
    std::cout << buf << "\n";
    std::cout << "char poly: " << j["char_poly"]["text"].get<std::string>()
              << "   det = " << j["determinant"].get<std::string>() << "\n";
    std::cout << "ends: " << j["surface"]["attracting"] << " attracting, " << j["surface"]["repelling"]
              << " repelling   connected: " << j["surface"]["connected"].get<std::string>()
              << "   infinite type: " << (j["surface"]["infinite_type"].get<bool>() ? "yes" : "no") << "\n";
    bool ok = true;
    for (const auto& c : j["certificates"]) {
        bool p = c["passed"].get<bool>();
        ok = ok && p;
        std::cout << (p ? "  pass " : "  FAIL ") << c["name"].get<std::string>() << ": "
                  << c["detail"].get<std::string>() << "\n";
    }
    std::cout << "record: " << record_path.string() << "\n";

    if (o.verify) {
        int passed = 0;
        CString report;
        check(es_verify_json(record.c_str(), &passed, &report.p));
        const auto report_path = dir / (stem + ".verification.json");
        write_file(report_path, report.str());
        std::cout << "verification:\n";
        ok = print_report(report.str()) && ok;
        std::cout << "report: " << report_path.string() << "\n";
    }
    render_figures(record, o.figs, dir, stem);
    std::cout << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? exit_pass : exit_fail;
}

int run_verify(const std::string& path, const std::string& report_out) {
    const auto record = read_file(path);
    int passed = 0;
    CString report;
    check(es_verify_json(record.c_str(), &passed, &report.p));
    if (!report_out.empty()) write_file(report_out, report.str());
    print_report(report.str());
    std::cout << (passed ? "PASS" : "FAIL") << "\n";
    return passed ? exit_pass : exit_fail;
}

int run_render(const std::string& path, const std::vector<std::string>& figs, const std::string& out) {
    const auto record = read_file(path);
    std::string stem = fs::path(path).filename().string();
    if (auto p = stem.find(".record.json"); p != std::string::npos) stem = stem.substr(0, p);
    else stem = fs::path(path).stem().string();
    render_figures(record, figs, output_dir(out), stem);
    return exit_pass;
}

int run_spectral(const std::string& matrix, std::optional<int> integer, double tol) {
    Matrix m;
    if (integer) {
        m.entries = {*integer};
        m.n = 1;
    } else {
        if (matrix.empty()) throw Failure{ES_INVALID_INPUT, "one of --matrix or --integer is required"};
        m = load_matrix(matrix);
    }
    CString out;
    check(es_spectral_json(m.entries.data(), m.n, tol, &out.p));
    std::cout << out.str();
    return exit_pass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"End-periodic homeomorphisms with prescribed stretch factor"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(es_version()) + " (" + es_record_format() + ")");

    ConstructOptions co;
    auto* construct = app.add_subcommand("construct", "Run the construction and write a JSON record");
    auto* in_matrix = construct->add_option("--matrix", co.matrix, "Matrix file (rows of integers or JSON) or inline JSON");
    auto* in_int = construct->add_option("--integer", co.integer, "Integer case d >= 2");
    in_matrix->excludes(in_int);
    construct->add_option("--lift", co.lift, "Block-cyclic lift of --matrix of order k")->needs(in_matrix);
    construct->add_option("--tol", co.tol, "Eigenvector tolerance")->check(CLI::PositiveNumber);
    construct->add_option("--depth", co.depth, "Identification depth cap (default N + 3m)");
    construct->add_flag("--corner-selection", co.corner_selection, "Choose sigma, tau so a corner is periodic");
    construct->add_flag("--insert-genus", co.insert_genus, "Insert genus at a corner periodic point");
    construct->add_option("--weak-perron", co.weak_perron, "Reglue the A/B rays of a k-fold lift");
    construct->add_option("--fig", co.figs,
                          "Figure kinds: piece_map, digraphs, orbits, expanded_rectangles, complex_2d, all");
    construct->add_option("--out", co.out, "Output directory (default $ENDSTRETCH_OUT_DIR or .)");
    construct->add_flag("--verify", co.verify, "Re-verify the written record");
    construct->add_option("--timestamp", co.timestamp, "Timestamp stored in the record (default: now, UTC)");

    std::string verify_path, report_out;
    auto* verify = app.add_subcommand("verify", "Re-check every invariant of a stored record");
    verify->add_option("record", verify_path, "Record JSON")->required();
    verify->add_option("--report", report_out, "Write the verification report here");

    std::string render_path, render_out;
    std::vector<std::string> render_figs;
    auto* render = app.add_subcommand("render", "Draw figures from a stored record");
    render->add_option("record", render_path, "Record JSON")->required();
    render->add_option("--fig", render_figs, "Figure kinds (or all)")->required();
    render->add_option("--out", render_out, "Output directory (default $ENDSTRETCH_OUT_DIR or .)");

    std::string spectral_matrix;
    std::optional<int> spectral_int;
    double spectral_tol = 1e-10;
    auto* spectral = app.add_subcommand("spectral", "Print spectral data of a matrix as JSON");
    auto* sm = spectral->add_option("--matrix", spectral_matrix, "Matrix file or inline JSON");
    spectral->add_option("--integer", spectral_int, "The 1x1 matrix [[d]]")->excludes(sm);
    spectral->add_option("--tol", spectral_tol, "Eigenvector tolerance")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (*construct) return run_construct(co);
        if (*verify) return run_verify(verify_path, report_out);
        if (*render) return run_render(render_path, render_figs, render_out);
        if (*spectral) return run_spectral(spectral_matrix, spectral_int, spectral_tol);
    } catch (const Failure& f) {
        std::cerr << "error[" << es_status_name(f.status) << "]: " << f.message << "\n";
        return exit_code_for(f.status);
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << "\n";
        return exit_fail;
    }
    return exit_usage;
}
