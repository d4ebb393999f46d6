#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "proplab/config.hpp"
#include "proplab/types.hpp"

// Deterministic CSV emission: scientific notation with 17 significant
// digits, complex values as re/im column pairs, newline-terminated, no
// locale dependence. Identical inputs produce byte-identical files.

namespace proplab {

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// 17-significant-digit scientific form that round-trips bit exactly.
std::string format_sci(double value);
double parse_sci(const std::string& text);

class RowBuilder {
  public:
    RowBuilder& add(double v);
    RowBuilder& add(long v);
    RowBuilder& add(int v) { return add(static_cast<long>(v)); }
    RowBuilder& add(const Complex& v);  // two cells: re, im
    RowBuilder& add(std::string v);
    std::vector<std::string> take() { return std::move(cells_); }

  private:
    std::vector<std::string> cells_;
};

std::string render_csv(const Table& table);
ExitReport emit_table(const Table& table, const std::filesystem::path& destination);

}  // namespace proplab
