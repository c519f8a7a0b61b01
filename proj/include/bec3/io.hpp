#pragma once

#include <string>
#include <variant>
#include <vector>

namespace bec3::io {

using CsvCell = std::variant<std::string, double, long>;

/// RFC-4180-style CSV writer: comma separated, quotes doubled, fields quoted
/// when they contain commas, quotes, or newlines. Numbers use %.17g.
class CsvWriter {
public:
    explicit CsvWriter(std::vector<std::string> header);
    void row(const std::vector<CsvCell>& cells);
    const std::string& text() const { return text_; }
    void save(const std::string& path) const;

private:
    std::string text_;
    std::size_t columns_ = 0;
};

std::string format_double(double x);

/// Minimal log-log line chart. One polyline per series; points with
/// non-positive coordinates are dropped (log scale).
struct SvgSeries {
    std::string label;
    std::vector<double> x, y;
};
std::string svg_loglog_chart(const std::string& title, const std::string& xlabel,
                             const std::string& ylabel, const std::vector<SvgSeries>& series);

void write_text_file(const std::string& path, const std::string& content);

/// Little-endian raw doubles; pairs with a JSON header describing the shape.
void write_binary_doubles(const std::string& path, const std::vector<double>& data);

}  // namespace bec3::io
