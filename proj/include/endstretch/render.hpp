#pragma once

#include <string>
#include <vector>

namespace endstretch {

enum class DiagramKind { piece_map, digraphs, orbits, expanded_rectangles, complex_2d };

const char* diagram_name(DiagramKind k);
// Accepts the names printed by diagram_name plus the short CLI aliases
// (pieces, digraph, orbit, strips, complex). Throws invalid_input otherwise.
DiagramKind diagram_from_name(const std::string& name);
const std::vector<DiagramKind>& all_diagram_kinds();

struct DiagramSpec {
    DiagramKind kind = DiagramKind::piece_map;
    std::string record_json;  // a construction record, or any object carrying the needed fields
};

// Deterministic SVG text. Throws missing_data naming the first absent field, parse for bad JSON.
std::string render(const DiagramSpec& spec);

// "#rrggbb", a pure function of the key.
std::string palette_color(const std::string& key);

}  // namespace endstretch
