#include "nodebias/svg.hpp"

#include <algorithm>
#include <sstream>

#include "nodebias/util.hpp"

namespace nodebias {

namespace {

constexpr double kChartW = 360.0;
constexpr double kChartH = 260.0;
constexpr double kMarginL = 52.0;
constexpr double kMarginR = 14.0;
constexpr double kMarginT = 30.0;
constexpr double kMarginB = 42.0;

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(ch);
        }
    }
    return out;
}

std::string num(double v) { return fmt_double(v); }

// Emits one chart's body into `out` at origin (0,0); the caller wraps it in
// a translated <g>.
void emit_chart(std::ostringstream& out, const PlotSpec& spec) {
    const double px0 = kMarginL;
    const double px1 = kChartW - kMarginR;
    const double py0 = kChartH - kMarginB;
    const double py1 = kMarginT;
    const double x_max = spec.x_max > 0 ? spec.x_max : 1.0;

    auto sx = [&](double x) { return px0 + (x / x_max) * (px1 - px0); };
    auto sy = [&](double y) { return py0 + y * (py1 - py0); };

    out << "<rect x=\"" << num(px0) << "\" y=\"" << num(py1) << "\" width=\"" << num(px1 - px0)
        << "\" height=\"" << num(py0 - py1)
        << "\" fill=\"white\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

    // Horizontal gridlines every 0.25; 0 and 1 drawn darker.
    for (int i = 0; i <= 4; ++i) {
        const double y = 0.25 * i;
        const bool edge = (i == 0 || i == 4);
        out << "<line x1=\"" << num(px0) << "\" y1=\"" << num(sy(y)) << "\" x2=\"" << num(px1)
            << "\" y2=\"" << num(sy(y)) << "\" stroke=\"" << (edge ? "#444444" : "#dddddd")
            << "\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << num(px0 - 6) << "\" y=\"" << num(sy(y) + 4)
            << "\" font-size=\"11\" text-anchor=\"end\" fill=\"#333333\">" << num(y)
            << "</text>\n";
    }

    // X ticks at the data x positions of the first series (levels).
    if (!spec.series.empty()) {
        const auto& ref = spec.series.front().line;
        for (const auto& [x, y] : ref) {
            (void)y;
            out << "<line x1=\"" << num(sx(x)) << "\" y1=\"" << num(py0) << "\" x2=\""
                << num(sx(x)) << "\" y2=\"" << num(py0 + 4)
                << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
        }
        // label first, middle, last tick to avoid clutter
        std::vector<size_t> labelled;
        if (!ref.empty()) {
            labelled.push_back(0);
            if (ref.size() > 2) labelled.push_back(ref.size() / 2);
            if (ref.size() > 1) labelled.push_back(ref.size() - 1);
        }
        for (size_t i : labelled) {
            out << "<text x=\"" << num(sx(ref[i].first)) << "\" y=\"" << num(py0 + 16)
                << "\" font-size=\"11\" text-anchor=\"middle\" fill=\"#333333\">"
                << num(ref[i].first) << "</text>\n";
        }
    }

    out << "<text x=\"" << num((px0 + px1) / 2) << "\" y=\"" << num(kChartH - 8)
        << "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#111111\">"
        << xml_escape(spec.x_label) << "</text>\n";
    out << "<text x=\"14\" y=\"" << num((py0 + py1) / 2)
        << "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#111111\" transform=\"rotate(-90 14 "
        << num((py0 + py1) / 2) << ")\">" << xml_escape(spec.y_label) << "</text>\n";
    out << "<text x=\"" << num((px0 + px1) / 2) << "\" y=\"" << num(py1 - 10)
        << "\" font-size=\"13\" text-anchor=\"middle\" fill=\"#111111\">"
        << xml_escape(spec.title) << "</text>\n";

    for (const PlotSeries& s : spec.series) {
        for (const auto& [x, y] : s.points) {
            out << "<circle cx=\"" << num(sx(x)) << "\" cy=\"" << num(sy(y))
                << "\" r=\"2.4\" fill=\"" << s.color << "\" fill-opacity=\"0.35\"/>\n";
        }
    }
    for (const PlotSeries& s : spec.series) {
        if (s.line.empty()) continue;
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.8\"";
        if (s.dashed) out << " stroke-dasharray=\"6 4\"";
        out << " points=\"";
        for (size_t i = 0; i < s.line.size(); ++i) {
            if (i) out << ' ';
            out << num(sx(s.line[i].first)) << ',' << num(sy(s.line[i].second));
        }
        out << "\"/>\n";
    }
}

void emit_legend(std::ostringstream& out, const std::vector<PlotSeries>& series, double x,
                 double y) {
    double cx = x;
    for (const PlotSeries& s : series) {
        out << "<line x1=\"" << num(cx) << "\" y1=\"" << num(y) << "\" x2=\"" << num(cx + 22)
            << "\" y2=\"" << num(y) << "\" stroke=\"" << s.color << "\" stroke-width=\"1.8\"";
        if (s.dashed) out << " stroke-dasharray=\"6 4\"";
        out << "/>\n";
        out << "<text x=\"" << num(cx + 27) << "\" y=\"" << num(y + 4)
            << "\" font-size=\"12\" fill=\"#111111\">" << xml_escape(s.label) << "</text>\n";
        cx += 36.0 + 7.2 * static_cast<double>(s.label.size());
    }
}

} // namespace

std::string render_line_chart(const PlotSpec& spec) {
    return render_chart_grid("", {spec}, 1);
}

std::string render_chart_grid(const std::string& title, const std::vector<PlotSpec>& charts,
                              size_t columns) {
    if (columns == 0) columns = 1;
    const size_t rows = (charts.size() + columns - 1) / columns;
    const double header = title.empty() ? 0.0 : 26.0;
    const double legend_h = 24.0;
    const double width = kChartW * static_cast<double>(std::min(columns, charts.size()));
    const double height =
        header + legend_h + kChartH * static_cast<double>(rows == 0 ? 1 : rows);

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(width)
        << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << num(width) << ' '
        << num(height) << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" fill=\"white\"/>\n";
    if (!title.empty()) {
        out << "<text x=\"" << num(width / 2)
            << "\" y=\"18\" font-size=\"15\" text-anchor=\"middle\" fill=\"#111111\">"
            << xml_escape(title) << "</text>\n";
    }
    if (!charts.empty()) emit_legend(out, charts.front().series, 16.0, header + 12.0);

    for (size_t i = 0; i < charts.size(); ++i) {
        const double tx = kChartW * static_cast<double>(i % columns);
        const double ty = header + legend_h + kChartH * static_cast<double>(i / columns);
        out << "<g transform=\"translate(" << num(tx) << ' ' << num(ty) << ")\">\n";
        emit_chart(out, charts[i]);
        out << "</g>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace nodebias
