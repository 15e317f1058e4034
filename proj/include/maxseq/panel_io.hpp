#pragma once

// CSV panel format: first row holds the series labels, each following row is
// one date (oldest first), one column per series.

#include <string>

#include "maxseq/core.hpp"

namespace maxseq {

/// Errors (ValidationError), rows counted from 1 with the header as row 1:
///   "empty input", "malformed CSV row R", "parse error at (R,C)".
PanelData parse_panel_csv(const std::string& text);
PanelData load_panel_csv(const std::string& path);

/// Values written with 17 significant digits, so parsing returns the same
/// doubles.
std::string format_panel_csv(const PanelData& panel);
void save_panel_csv(const PanelData& panel, const std::string& path);

/// Whole-file read/write helpers; throw ValidationError on I/O failure.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace maxseq
