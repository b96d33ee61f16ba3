#include "endstretch/endstretch.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "endstretch/record.hpp"
#include "endstretch/render.hpp"

struct es_config {
    endstretch::RunConfig config;
};

struct es_record {
    endstretch::ConstructionRecord record;
};

namespace {

thread_local std::string last_error;

es_status set_error(es_status s, const std::string& msg) {
    last_error = msg;
    return s;
}

// Every entry point funnels exceptions through here so nothing crosses the C boundary.
template <class F>
es_status guard(F&& f) {
    try {
        last_error.clear();
        f();
        return ES_OK;
    } catch (const endstretch::Error& e) {
        return set_error(static_cast<es_status>(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return set_error(ES_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(ES_INTERNAL, e.what());
    }
}

char* copy_out(const std::string& s) {
    char* p = static_cast<char*>(std::malloc(s.size() + 1));
    if (!p) throw std::bad_alloc();
    std::memcpy(p, s.c_str(), s.size() + 1);
    return p;
}

endstretch::IntMatrix matrix_of(const int64_t* entries, size_t n) {
    if (!entries || n == 0) endstretch::fail(endstretch::ErrorCode::invalid_input, "empty matrix");
    endstretch::IntMatrix m(n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            if (entries[i * n + j] < 0)
                endstretch::fail(endstretch::ErrorCode::invalid_input, "matrix entries must be non-negative");
            m.set(i, j, entries[i * n + j]);
        }
    return m;
}

void require(const void* p, const char* what) {
    if (!p) endstretch::fail(endstretch::ErrorCode::invalid_input, std::string(what) + " is null");
}

}  // namespace

extern "C" {

const char* es_version(void) { return "1.0.0"; }
const char* es_record_format(void) { return endstretch::record_version; }

const char* es_status_name(es_status status) {
    if (status == ES_OK) return "ok";
    return endstretch::error_code_name(static_cast<endstretch::ErrorCode>(status));
}

const char* es_last_error(void) { return last_error.c_str(); }

void es_string_free(char* s) { std::free(s); }

es_status es_parse_matrix(const char* text, int64_t** entries, size_t* n) {
    return guard([&] {
        require(text, "text");
        require(entries, "entries");
        require(n, "n");
        auto m = endstretch::parse_matrix(text);
        auto* out = static_cast<int64_t*>(std::malloc(m.size() * m.size() * sizeof(int64_t)));
        if (!out) throw std::bad_alloc();
        for (size_t i = 0; i < m.size(); ++i)
            for (size_t j = 0; j < m.size(); ++j) out[i * m.size() + j] = m(i, j);
        *entries = out;
        *n = m.size();
    });
}

void es_entries_free(int64_t* entries) { std::free(entries); }

es_status es_config_new_matrix(const int64_t* entries, size_t n, es_config** out) {
    return guard([&] {
        require(out, "out");
        auto c = std::make_unique<es_config>();
        c->config.matrix = matrix_of(entries, n);
        c->config.source = "inline";
        *out = c.release();
    });
}

es_status es_config_new_integer(int d, es_config** out) {
    return guard([&] {
        require(out, "out");
        auto c = std::make_unique<es_config>();
        c->config.mode = endstretch::InputMode::integer;
        c->config.integer = d;
        c->config.source = "integer";
        *out = c.release();
    });
}

es_status es_config_new_lift(const int64_t* entries, size_t n, size_t k, es_config** out) {
    return guard([&] {
        require(out, "out");
        if (k == 0) endstretch::fail(endstretch::ErrorCode::invalid_input, "lift order must be >= 1");
        auto c = std::make_unique<es_config>();
        c->config.mode = endstretch::InputMode::lift;
        c->config.matrix = matrix_of(entries, n);
        c->config.lift_k = k;
        c->config.source = "inline";
        *out = c.release();
    });
}

es_status es_config_from_json(const char* json, es_config** out) {
    return guard([&] {
        require(json, "json");
        require(out, "out");
        auto c = std::make_unique<es_config>();
        c->config = endstretch::config_from_json(json);
        *out = c.release();
    });
}

es_status es_config_to_json(const es_config* config, char** out) {
    return guard([&] {
        require(config, "config");
        require(out, "out");
        *out = copy_out(endstretch::config_json(config->config));
    });
}

es_status es_config_set_tol(es_config* config, double tol) {
    return guard([&] {
        require(config, "config");
        if (!(tol > 0)) endstretch::fail(endstretch::ErrorCode::invalid_input, "tolerance must be positive");
        config->config.tol = tol;
    });
}

es_status es_config_set_depth(es_config* config, size_t depth) {
    return guard([&] {
        require(config, "config");
        config->config.depth = depth;
    });
}

es_status es_config_set_corner_selection(es_config* config, int on) {
    return guard([&] {
        require(config, "config");
        config->config.corner_selection = on != 0;
    });
}

es_status es_config_set_insert_genus(es_config* config, int on) {
    return guard([&] {
        require(config, "config");
        config->config.insert_genus = on != 0;
    });
}

es_status es_config_set_weak_perron(es_config* config, size_t k) {
    return guard([&] {
        require(config, "config");
        if (k == 0) endstretch::fail(endstretch::ErrorCode::invalid_input, "weak-Perron order must be >= 1");
        config->config.weak_perron_k = k;
    });
}

es_status es_config_set_source(es_config* config, const char* source) {
    return guard([&] {
        require(config, "config");
        require(source, "source");
        config->config.source = source;
    });
}

void es_config_free(es_config* config) { delete config; }

es_status es_construct(const es_config* config, es_record** out) {
    return guard([&] {
        require(config, "config");
        require(out, "out");
        auto r = std::make_unique<es_record>();
        r->record = endstretch::construct(config->config);
        *out = r.release();
    });
}

int es_record_passed(const es_record* record) { return record && record->record.passed() ? 1 : 0; }

double es_record_stretch_factor(const es_record* record) {
    if (!record || !record->record.surface) return 0.0;
    return record->record.surface->stretch_factor;
}

es_status es_record_json(const es_record* record, const char* timestamp, char** out) {
    return guard([&] {
        require(record, "record");
        require(out, "out");
        *out = copy_out(endstretch::record_json(record->record, timestamp ? timestamp : ""));
    });
}

void es_record_free(es_record* record) { delete record; }

es_status es_verify_json(const char* record_json, int* passed, char** report_json) {
    return guard([&] {
        require(record_json, "record_json");
        auto report = endstretch::verify_record(record_json);
        if (passed) *passed = report.passed() ? 1 : 0;
        if (report_json) *report_json = copy_out(report.to_json());
    });
}

es_status es_render(const char* record_json, const char* kind, char** svg_out) {
    return guard([&] {
        require(record_json, "record_json");
        require(kind, "kind");
        require(svg_out, "svg_out");
        *svg_out = copy_out(endstretch::render({endstretch::diagram_from_name(kind), record_json}));
    });
}

const char* es_figure_name(const char* kind) {
    if (!kind) return nullptr;
    try {
        return endstretch::diagram_name(endstretch::diagram_from_name(kind));
    } catch (const std::exception&) {
        return nullptr;
    }
}

es_status es_spectral_json(const int64_t* entries, size_t n, double tol, char** out) {
    return guard([&] {
        require(out, "out");
        *out = copy_out(endstretch::spectral_json(matrix_of(entries, n), tol > 0 ? tol : endstretch::default_tolerance));
    });
}

es_status es_cross_validate(int d, int* agree, char** report_json) {
    return guard([&] {
        auto cv = endstretch::cross_validate(d);
        if (agree) *agree = cv.agree ? 1 : 0;
        if (report_json) *report_json = copy_out(endstretch::cross_validation_json(d));
    });
}

}  // extern "C"
