#include "proplab/csv.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

namespace proplab {

std::string format_sci(double value) {
    char buf[64];
    const auto [ptr, ec] =
        std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific, 16);
    if (ec != std::errc{}) throw Error("format_sci: conversion failed");
    return std::string(buf, ptr);
}

double parse_sci(const std::string& text) {
    double out = 0.0;
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw Error("parse_sci: invalid float '" + text + "'");
    return out;
}

RowBuilder& RowBuilder::add(double v) {
    cells_.push_back(format_sci(v));
    return *this;
}

RowBuilder& RowBuilder::add(long v) {
    cells_.push_back(std::to_string(v));
    return *this;
}

RowBuilder& RowBuilder::add(const Complex& v) {
    add(v.real());
    add(v.imag());
    return *this;
}

RowBuilder& RowBuilder::add(std::string v) {
    cells_.push_back(std::move(v));
    return *this;
}

std::string render_csv(const Table& table) {
    std::string out;
    auto append_row = [&out](const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) out.push_back(',');
            out += cells[i];
        }
        out.push_back('\n');
    };
    append_row(table.header);
    for (const auto& row : table.rows) append_row(row);
    return out;
}

ExitReport emit_table(const Table& table, const std::filesystem::path& destination) {
    ExitReport report;
    std::ofstream out(destination, std::ios::binary);
    if (!out) {
        report.status = ExitStatus::input_error;
        report.messages.push_back("cannot open output file " + destination.string());
        return report;
    }
    out << render_csv(table);
    out.flush();
    if (!out) {
        report.status = ExitStatus::input_error;
        report.messages.push_back("write failure on " + destination.string());
        return report;
    }
    report.artifacts_written.push_back(destination);
    return report;
}

}  // namespace proplab
