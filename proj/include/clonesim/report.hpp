#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "clonesim/fock.hpp"

namespace clonesim::report {

/// 12 significant digits, shortest form, locale independent.
inline std::string format_number(double x) {
    if (x == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 12);
    if (res.ec != std::errc{}) throw std::runtime_error("format_number: conversion failed");
    return {buf, res.ptr};
}

/// An angle given as a rational multiple of π, e.g. "1/12" or "-3/2".
class PiFraction {
public:
    PiFraction() = default;
    PiFraction(long num, long den) : num_(num), den_(den) {
        if (den_ == 0) throw std::invalid_argument("PiFraction: zero denominator");
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        const long g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
    }

    static PiFraction parse(std::string_view text) {
        auto parse_long = [&](std::string_view s) {
            long v = 0;
            if (!s.empty() && s.front() == '+') s.remove_prefix(1);
            const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
                throw std::invalid_argument("angle '" + std::string(text) +
                                            "' is not a rational multiple of pi (expected e.g. 1/2, -1/12, 0)");
            return v;
        };
        const auto slash = text.find('/');
        if (slash == std::string_view::npos) return {parse_long(text), 1};
        const long den = parse_long(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("angle '" + std::string(text) + "' has a zero denominator");
        return {parse_long(text.substr(0, slash)), den};
    }

    double radians() const { return kPi * static_cast<double>(num_) / static_cast<double>(den_); }
    long num() const { return num_; }
    long den() const { return den_; }
    std::string str() const { return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_); }

    friend bool operator==(const PiFraction&, const PiFraction&) = default;

private:
    long num_ = 0;
    long den_ = 1;
};

/// Writes `content` to `path` through a temporary sibling, so a failed run
/// never leaves a truncated file behind.
inline void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out.flush()) throw std::runtime_error("write to " + tmp.string() + " failed");
    }
    std::filesystem::rename(tmp, path);
}

/// `j,probability` table.
inline std::string distribution_csv(std::span<const double> p, std::string_view index_name = "j") {
    std::string out;
    out += index_name;
    out += ",probability\n";
    for (std::size_t j = 0; j < p.size(); ++j) {
        out += std::to_string(j);
        out += ',';
        out += format_number(p[j]);
        out += '\n';
    }
    return out;
}

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

/// Minimal self-contained line chart: axes with ticks, one polyline per
/// series and a legend.
inline std::string svg_line_chart(const std::vector<Series>& series, std::string_view title,
                                  std::string_view x_label, std::string_view y_label) {
    constexpr double W = 640, H = 420, left = 70, right = 150, top = 40, bottom = 60;
    double xmin = INFINITY, xmax = -INFINITY, ymin = 0.0, ymax = -INFINITY;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0, ymax = 1.0;
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;
    const double pw = W - left - right, ph = H - top - bottom;
    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return top + ph - (y - ymin) / (ymax - ymin) * ph; };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    o << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
    o << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
      << "\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double xv = xmin + (xmax - xmin) * t / 5.0;
        const double yv = ymin + (ymax - ymin) * t / 5.0;
        o << "<text x=\"" << format_number(sx(xv)) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">"
          << format_number(std::round(xv * 1000) / 1000) << "</text>\n";
        o << "<text x=\"" << left - 6 << "\" y=\"" << format_number(sy(yv) + 4) << "\" text-anchor=\"end\">"
          << format_number(std::round(yv * 1000) / 1000) << "</text>\n";
    }
    o << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\">" << x_label
      << "</text>\n";
    o << "<text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << top + ph / 2 << ")\">" << y_label << "</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = colors[i % std::size(colors)];
        o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < series[i].points.size(); ++k) {
            const auto& [x, y] = series[i].points[k];
            o << (k ? " " : "") << format_number(sx(x)) << ',' << format_number(sy(y));
        }
        o << "\"/>\n";
        const double ly = top + 14 + 18.0 * i;
        o << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 36 << "\" y2=\"" << ly
          << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly + 4 << "\">" << series[i].label << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

}  // namespace clonesim::report
