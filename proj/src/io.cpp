#include <psseq/io.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace psseq {

namespace {

std::string escape_xml(const std::string &s)
{
    std::string out;
    for (const char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

void write_cf_csv(std::ostream &os, const ContinuedFraction &cf)
{
    os << "k,a_k,p_k,q_k\n";
    for (std::size_t k = 0; k < cf.quotients.size(); ++k) {
        os << k << ',' << cf.quotients[k] << ',';
        if (k < cf.convergents.size()) {
            os << cf.convergents[k].p << ',' << cf.convergents[k].q;
        } else {
            os << ',';
        }
        os << '\n';
    }
}

void write_xyz_csv(std::ostream &os, const std::vector<XYZTriple> &triples)
{
    os << "x,y,z\n";
    for (const auto &t : triples) {
        os << t.x << ',' << t.y << ',' << t.z << '\n';
    }
}

void write_histogram_svg(std::ostream &os, std::span<const double> values, int bins, const std::string &title)
{
    if (bins < 1) {
        throw DomainError("histogram needs at least one bin");
    }
    std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
    for (const double v : values) {
        const auto b = static_cast<std::size_t>(std::clamp(static_cast<int>(std::floor(v * bins)), 0, bins - 1));
        ++counts[b];
    }
    const double width = 640;
    const double height = 360;
    const double pad = 40;
    const double expected = values.empty() ? 0 : static_cast<double>(values.size()) / bins;
    const double top = std::max<double>(expected * 1.5, static_cast<double>(*std::max_element(counts.begin(), counts.end())));
    const double scale = top > 0 ? (height - 2 * pad) / top : 0;
    const double bw = (width - 2 * pad) / bins;

    std::ostringstream s;
    s << std::fixed << std::setprecision(2);
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\" viewBox=\"0 0 "
      << width << ' ' << height << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << pad << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << escape_xml(title)
      << "</text>\n";
    for (int b = 0; b < bins; ++b) {
        const double h = static_cast<double>(counts[static_cast<std::size_t>(b)]) * scale;
        s << "<rect x=\"" << pad + b * bw << "\" y=\"" << height - pad - h << "\" width=\"" << bw * 0.9
          << "\" height=\"" << h << "\" fill=\"steelblue\"/>\n";
    }
    const double ey = height - pad - expected * scale;
    s << "<line x1=\"" << pad << "\" y1=\"" << ey << "\" x2=\"" << width - pad << "\" y2=\"" << ey
      << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
    s << "<line x1=\"" << pad << "\" y1=\"" << height - pad << "\" x2=\"" << width - pad << "\" y2=\"" << height - pad
      << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << pad << "\" y=\"" << height - pad + 16 << "\" font-family=\"sans-serif\" font-size=\"11\">0</text>\n";
    s << "<text x=\"" << width - pad << "\" y=\"" << height - pad + 16
      << "\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1</text>\n";
    s << "</svg>\n";
    os << s.str();
}

void write_file(const std::string &path, const std::string &content)
{
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) {
        throw DomainError("cannot open " + path + " for writing");
    }
    f << content;
    if (!f) {
        throw DomainError("failed writing " + path);
    }
}

} // namespace psseq
