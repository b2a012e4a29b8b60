// Minimal hand-written SVG charts. Plotting only reads the CSV outputs.

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "lrrl/runner/csv.hpp"
#include "lrrl/runner/experiment.hpp"

namespace fs = std::filesystem;

namespace lrrl::runner {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 420.0;
constexpr double kMargin = 56.0;

const char* color(std::size_t i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return palette[i % 10];
}

struct Frame {
    double x0, x1, y0, y1;

    double px(double x) const { return kMargin + (x1 > x0 ? (x - x0) / (x1 - x0) : 0.5) * (kWidth - 2 * kMargin); }
    double py(double y) const {
        return kHeight - kMargin - (y1 > y0 ? (y - y0) / (y1 - y0) : 0.5) * (kHeight - 2 * kMargin);
    }
};

void header(std::ostream& os, const std::string& title, const Frame& f, const std::string& xlabel,
            const std::string& ylabel) {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << title << "</text>\n";
    os << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin << "\" y2=\""
       << kHeight - kMargin << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\"" << kHeight - kMargin
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16 << "\" text-anchor=\"middle\">" << xlabel
       << "</text>\n";
    os << "<text x=\"16\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
       << kHeight / 2 << ")\">" << ylabel << "</text>\n";
    auto tick = [&](double v, bool xaxis) {
        std::ostringstream label;
        label.precision(3);
        label << v;
        if (xaxis)
            os << "<text x=\"" << f.px(v) << "\" y=\"" << kHeight - kMargin + 16 << "\" text-anchor=\"middle\">"
               << label.str() << "</text>\n";
        else
            os << "<text x=\"" << kMargin - 4 << "\" y=\"" << f.py(v) + 4 << "\" text-anchor=\"end\">" << label.str()
               << "</text>\n";
    };
    tick(f.x0, true);
    tick(f.x1, true);
    tick(f.y0, false);
    tick(f.y1, false);
}

struct Curve {
    std::string variant;
    std::vector<double> x, mean, half_std;
};

std::string learning_curve(const std::string& group, const std::vector<Curve>& curves, bool log_scale) {
    auto tf = [&](double v) { return log_scale ? std::log10(std::max(std::abs(v), 1e-300)) : v; };
    Frame f{0, 1, 0, 1};
    bool first = true;
    for (const auto& c : curves)
        for (std::size_t i = 0; i < c.x.size(); ++i) {
            const double lo = tf(c.mean[i] - (log_scale ? 0.0 : c.half_std[i]));
            const double hi = tf(c.mean[i] + (log_scale ? 0.0 : c.half_std[i]));
            if (first) f = {c.x[i], c.x[i], lo, hi};
            f.x0 = std::min(f.x0, c.x[i]);
            f.x1 = std::max(f.x1, c.x[i]);
            f.y0 = std::min(f.y0, lo);
            f.y1 = std::max(f.y1, hi);
            first = false;
        }
    std::ostringstream os;
    header(os, group, f, "iteration", log_scale ? "log10 mean" : "mean (+/- half std)");
    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        const auto& c = curves[ci];
        if (!log_scale) {
            os << "<polygon fill=\"" << color(ci) << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
            for (std::size_t i = 0; i < c.x.size(); ++i) os << f.px(c.x[i]) << ',' << f.py(c.mean[i] + c.half_std[i]) << ' ';
            for (std::size_t i = c.x.size(); i-- > 0;) os << f.px(c.x[i]) << ',' << f.py(c.mean[i] - c.half_std[i]) << ' ';
            os << "\"/>\n";
        }
        os << "<polyline fill=\"none\" stroke=\"" << color(ci) << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < c.x.size(); ++i) os << f.px(c.x[i]) << ',' << f.py(tf(c.mean[i])) << ' ';
        os << "\"/>\n";
        os << "<text x=\"" << kWidth - kMargin + 4 - 120 << "\" y=\"" << kMargin + 14 * ci << "\" fill=\""
           << color(ci) << "\">" << c.variant << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string timeline(const std::string& title, const std::vector<double>& x, const std::vector<double>& y,
                     const std::vector<double>& arm, const std::string& xlabel, const std::string& ylabel) {
    Frame f{0, 1, 0, 1};
    if (!x.empty()) {
        f.x0 = *std::min_element(x.begin(), x.end());
        f.x1 = *std::max_element(x.begin(), x.end());
        f.y0 = std::min(0.0, *std::min_element(y.begin(), y.end()));
        f.y1 = std::max(1.0, *std::max_element(y.begin(), y.end()));
    }
    std::ostringstream os;
    header(os, title, f, xlabel, ylabel);
    for (std::size_t i = 0; i < x.size(); ++i)
        os << "<circle cx=\"" << f.px(x[i]) << "\" cy=\"" << f.py(y[i]) << "\" r=\"1.8\" fill=\""
           << color(static_cast<std::size_t>(std::max(0.0, arm[i]))) << "\"/>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace

std::vector<std::string> write_plots(const std::string& dir) {
    const YAML::Node info = YAML::LoadFile((fs::path(dir) / "run_info.yaml").string());
    const auto kind = info["kind"].as<std::string>();
    const fs::path plots = fs::path(dir) / "plots";
    fs::create_directories(plots);
    std::vector<std::string> written;

    const auto agg = read_csv((fs::path(dir) / "aggregate.csv").string());
    std::map<std::string, std::vector<Curve>> by_group;
    const auto cg = agg.column("group");
    const auto cv = agg.column("variant");
    const auto ci = agg.column("iteration");
    const auto cm = agg.column("mean");
    const auto ch = agg.column("half_std");
    for (const auto& row : agg.rows) {
        auto& curves = by_group[row[cg]];
        if (curves.empty() || curves.back().variant != row[cv]) curves.push_back({row[cv], {}, {}, {}});
        curves.back().x.push_back(parse_double(row[ci]));
        curves.back().mean.push_back(parse_double(row[cm]));
        curves.back().half_std.push_back(parse_double(row[ch]));
    }
    for (const auto& [group, curves] : by_group) {
        const auto path = plots / (group + "__learning_curve.svg");
        std::ofstream(path) << learning_curve(group, curves, kind == "landscape");
        written.push_back(path.string());
    }

    for (const auto& node : info["runs"]) {
        if (!node["completed"].as<bool>()) continue;
        const auto variant = node["variant"].as<std::string>();
        if (variant.rfind("fixed_", 0) == 0) continue;
        const auto file = fs::path(dir) / node["file"].as<std::string>();
        const auto stem = file.stem().string();
        std::string svg;
        if (kind == "rl") {
            const auto rounds = read_csv((file.parent_path() / (stem + ".rounds.csv")).string());
            svg = timeline(stem, rounds.numeric_column("env_step"), rounds.numeric_column("normalized_rate"),
                           rounds.numeric_column("credited_arm"), "env step", "normalized learning rate");
        } else if (kind == "landscape") {
            const auto t = read_csv(file.string());
            auto arms = t.numeric_column("arm");
            svg = timeline(stem, t.numeric_column("step"), arms, arms, "gradient step", "arm");
        } else {
            const auto t = read_csv(file.string());
            auto arms = t.numeric_column("arm");
            svg = timeline(stem, t.numeric_column("round"), arms, arms, "round", "arm");
        }
        const auto path = plots / (stem + "__arms.svg");
        std::ofstream(path) << svg;
        written.push_back(path.string());
    }
    return written;
}

}  // namespace lrrl::runner
