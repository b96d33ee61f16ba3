#pragma once

#include <optional>
#include <string>
#include <vector>

#include "endstretch/markov.hpp"
#include "endstretch/warmup.hpp"

namespace endstretch {

inline constexpr const char* record_version = "endstretch-record/1";

enum class InputMode { matrix, integer, lift };

struct RunConfig {
    InputMode mode = InputMode::matrix;
    IntMatrix matrix;        // matrix mode: M; lift mode: the base matrix M0
    std::string source;      // where the matrix came from (path or "inline")
    int integer = 0;         // integer mode: d
    std::size_t lift_k = 0;  // lift mode: k
    double tol = default_tolerance;
    std::optional<std::size_t> depth;
    bool corner_selection = false;
    bool insert_genus = false;
    std::optional<std::size_t> weak_perron_k;  // implied by lift mode
};

// The matrix the construction runs on: M, [[d]] or block_lift(M0, k).
IntMatrix effective_matrix(const RunConfig& c);
// Effective weak-Perron order: explicit flag, else k in lift mode.
std::optional<std::size_t> effective_weak_perron(const RunConfig& c);
// Corner selection is forced when a weak-Perron regluing or genus insertion needs a corner orbit.
bool effective_corner_selection(const RunConfig& c);

struct Certificate {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ConstructionRecord {
    RunConfig config;
    IntMatrix matrix;
    bool irreducible = false;
    bool primitive = false;
    IntPolynomial char_poly;
    BigInt determinant;
    PerronData eigen;
    std::optional<CornerSelection> corners;
    std::optional<PieceMap> pieces;
    std::optional<ExtendedPieceMap> extended;
    std::optional<IdentificationSchema> schema;
    std::optional<ClassCensus> census;
    std::optional<SurfaceReport> surface;
    std::optional<IncidenceReport> incidence;
    std::vector<Certificate> certificates;

    bool passed() const;
};

// Runs the full pipeline. Input errors throw; failed checks become failed certificates.
ConstructionRecord construct(const RunConfig& config);

// Deterministic JSON text (2-space indent) with a content hash; `timestamp` is the only
// field outside the hash.
std::string record_json(const ConstructionRecord& r, const std::string& timestamp);
// FNV-1a 64 over the canonical dump of the record without `timestamp` and `hash`.
std::string record_hash(const std::string& json_text);

struct VerificationCheck {
    std::string name;
    bool passed = false;
    ErrorCode category = ErrorCode::verification;  // precondition for structural problems
    std::string detail;
};

struct VerificationReport {
    std::vector<VerificationCheck> checks;
    bool passed() const;
    bool precondition_failed() const;
    std::string to_json() const;
};

// Re-checks the invariants of a stored record. Throws parse / schema_version errors for
// unreadable or foreign documents.
VerificationReport verify_record(const std::string& json_text);

std::string config_json(const RunConfig& c);
// Spectral summary of a matrix (any non-negative square matrix; eigendata only when irreducible).
std::string spectral_json(const IntMatrix& m, double tol = default_tolerance);
// Direct versus pipeline summaries of the integer case, with the differences found.
std::string cross_validation_json(int d);
RunConfig config_from_json(const std::string& json_text);

}  // namespace endstretch
