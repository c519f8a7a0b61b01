#include "bec3/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bec3/util.hpp"

namespace bec3::io {

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace {
std::string escape_csv(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}
}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) text_ += ',';
        text_ += escape_csv(header[i]);
    }
    text_ += '\n';
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
    if (cells.size() != columns_)
        throw PreconditionError("csv: row width does not match the header");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) text_ += ',';
        if (std::holds_alternative<std::string>(cells[i]))
            text_ += escape_csv(std::get<std::string>(cells[i]));
        else if (std::holds_alternative<double>(cells[i]))
            text_ += format_double(std::get<double>(cells[i]));
        else
            text_ += std::to_string(std::get<long>(cells[i]));
    }
    text_ += '\n';
}

void CsvWriter::save(const std::string& path) const { write_text_file(path, text_); }

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SolverError("cannot open output file: " + path);
    out << content;
}

void write_binary_doubles(const std::string& path, const std::vector<double>& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SolverError("cannot open output file: " + path);
    out.write(reinterpret_cast<const char*>(data.data()),
              std::streamsize(data.size() * sizeof(double)));
}

std::string svg_loglog_chart(const std::string& title, const std::string& xlabel,
                             const std::string& ylabel, const std::vector<SvgSeries>& series) {
    const int W = 640, H = 480, ml = 70, mr = 20, mt = 40, mb = 50;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (s.x[i] <= 0.0 || s.y[i] <= 0.0) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, s.y[i]);
            ymax = std::max(ymax, s.y[i]);
        }
    if (xmin > xmax) { xmin = 0.1; xmax = 10.0; ymin = 0.1; ymax = 10.0; }
    if (xmin == xmax) { xmin *= 0.5; xmax *= 2.0; }
    if (ymin == ymax) { ymin *= 0.5; ymax *= 2.0; }
    const double lx0 = std::log10(xmin), lx1 = std::log10(xmax);
    const double ly0 = std::log10(ymin), ly1 = std::log10(ymax);
    auto px = [&](double x) { return ml + (std::log10(x) - lx0) / (lx1 - lx0) * (W - ml - mr); };
    auto py = [&](double y) { return H - mb - (std::log10(y) - ly0) / (ly1 - ly0) * (H - mt - mb); };
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
       << "</text>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\" font-size=\"13\">"
       << xlabel << "</text>\n";
    os << "<text x=\"18\" y=\"" << H / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
       << H / 2 << ")\">" << ylabel << "</text>\n";
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr << "\" height=\""
       << H - mt - mb << "\" fill=\"none\" stroke=\"black\"/>\n";
    // decade ticks
    for (int e = int(std::ceil(lx0)); e <= int(std::floor(lx1)); ++e) {
        const double x = std::pow(10.0, e);
        os << "<line x1=\"" << px(x) << "\" y1=\"" << H - mb << "\" x2=\"" << px(x) << "\" y2=\""
           << H - mb + 6 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << px(x) << "\" y=\"" << H - mb + 20
           << "\" text-anchor=\"middle\" font-size=\"11\">1e" << e << "</text>\n";
    }
    for (int e = int(std::ceil(ly0)); e <= int(std::floor(ly1)); ++e) {
        const double y = std::pow(10.0, e);
        os << "<line x1=\"" << ml - 6 << "\" y1=\"" << py(y) << "\" x2=\"" << ml << "\" y2=\""
           << py(y) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << ml - 10 << "\" y=\"" << py(y) + 4
           << "\" text-anchor=\"end\" font-size=\"11\">1e" << e << "</text>\n";
    }
    int ci = 0;
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << colors[ci % 6] << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (s.x[i] <= 0.0 || s.y[i] <= 0.0) continue;
            os << px(s.x[i]) << "," << py(s.y[i]) << " ";
        }
        os << "\"/>\n";
        os << "<text x=\"" << W - mr - 8 << "\" y=\"" << mt + 18 + 16 * ci
           << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << colors[ci % 6] << "\">" << s.label
           << "</text>\n";
        ++ci;
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace bec3::io
