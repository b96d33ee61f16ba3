#ifndef ENDSTRETCH_H
#define ENDSTRETCH_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ES_API __declspec(dllexport)
#else
#define ES_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum es_status {
    ES_OK = 0,
    ES_INVALID_INPUT = 1,
    ES_PRECONDITION = 2,
    ES_CONVERGENCE = 3,
    ES_VERIFICATION = 4,
    ES_INTERNAL = 5,
    ES_IO = 6,
    ES_PARSE = 7,
    ES_SCHEMA_VERSION = 8,
    ES_MISSING_DATA = 9
} es_status;

typedef struct es_config es_config;
typedef struct es_record es_record;

/* Library and record format versions. Static strings. */
ES_API const char* es_version(void);
ES_API const char* es_record_format(void);
ES_API const char* es_status_name(es_status status);

/* Message of the last failed call on this thread; "" if none. Valid until the next call. */
ES_API const char* es_last_error(void);

/* Strings returned through char** are heap copies owned by the caller. */
ES_API void es_string_free(char* s);

/* Matrices are n*n row-major int64 entries. es_parse_matrix reads whitespace rows
   ('#' comments) or a JSON array of rows; free *entries with es_entries_free. */
ES_API es_status es_parse_matrix(const char* text, int64_t** entries, size_t* n);
ES_API void es_entries_free(int64_t* entries);

ES_API es_status es_config_new_matrix(const int64_t* entries, size_t n, es_config** out);
ES_API es_status es_config_new_integer(int d, es_config** out);
ES_API es_status es_config_new_lift(const int64_t* entries, size_t n, size_t k, es_config** out);
ES_API es_status es_config_from_json(const char* json, es_config** out);
ES_API es_status es_config_to_json(const es_config* config, char** out);
ES_API es_status es_config_set_tol(es_config* config, double tol);
ES_API es_status es_config_set_depth(es_config* config, size_t depth);
ES_API es_status es_config_set_corner_selection(es_config* config, int on);
ES_API es_status es_config_set_insert_genus(es_config* config, int on);
ES_API es_status es_config_set_weak_perron(es_config* config, size_t k);
ES_API es_status es_config_set_source(es_config* config, const char* source);
ES_API void es_config_free(es_config* config);

/* Runs the construction. Failed certificates do not make this fail; see es_record_passed. */
ES_API es_status es_construct(const es_config* config, es_record** out);
ES_API int es_record_passed(const es_record* record);
ES_API double es_record_stretch_factor(const es_record* record);
ES_API es_status es_record_json(const es_record* record, const char* timestamp, char** out);
ES_API void es_record_free(es_record* record);

/* Re-checks a stored record. *passed is 1 when every check holds. */
ES_API es_status es_verify_json(const char* record_json, int* passed, char** report_json);

/* kind: piece_map, digraphs, orbits, expanded_rectangles, complex_2d (or a short alias). */
ES_API es_status es_render(const char* record_json, const char* kind, char** svg_out);
/* Canonical name of a figure kind or alias (static string); NULL if unknown. */
ES_API const char* es_figure_name(const char* kind);

ES_API es_status es_spectral_json(const int64_t* entries, size_t n, double tol, char** out);
ES_API es_status es_cross_validate(int d, int* agree, char** report_json);

#ifdef __cplusplus
}
#endif

#endif
