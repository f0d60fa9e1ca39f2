#include "ambistop/csv_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace ambistop {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, const std::string& path, int line_no) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw SchemaError(path + ":" + std::to_string(line_no) + ": bad number '" + s + "'");
    }
}

long parse_int(const std::string& s, const std::string& path, int line_no) {
    try {
        std::size_t used = 0;
        long v = std::stol(s, &used);
        if (used != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw SchemaError(path + ":" + std::to_string(line_no) + ": bad integer '" + s + "'");
    }
}

}  // namespace

std::vector<std::string> emit_results(const ResultTable& table, const std::string& dir,
                                      const std::set<std::string>& svg_experiments,
                                      const std::set<std::string>& ensure_experiments) {
    // group rows by experiment, preserving insertion order
    std::vector<std::string> experiments;
    std::map<std::string, std::vector<const ResultRow*>> groups;
    for (const ResultRow& row : table.rows) {
        auto it = groups.find(row.experiment);
        if (it == groups.end()) {
            experiments.push_back(row.experiment);
            it = groups.emplace(row.experiment, std::vector<const ResultRow*>{}).first;
        }
        it->second.push_back(&row);
    }
    for (const std::string& exp : ensure_experiments) {
        if (!groups.count(exp)) {
            experiments.push_back(exp);
            groups.emplace(exp, std::vector<const ResultRow*>{});
        }
    }

    std::vector<std::string> written;
    for (const std::string& exp : experiments) {
        const auto& rows = groups[exp];
        const std::string csv_path = dir + "/" + exp + ".csv";
        std::ofstream os(csv_path, std::ios::binary);
        if (!os) throw IoError("emit_results: cannot write " + csv_path);
        os << "experiment,param_name,param_value,quantity,value\n";
        for (const ResultRow* r : rows) {
            os << r->experiment << ',' << r->param_name << ',' << format_double(r->param_value)
               << ',' << r->quantity << ',' << format_double(r->value) << '\n';
        }
        os.close();
        written.push_back(csv_path);

        if (!svg_experiments.count(exp) || rows.empty()) continue;

        // one polyline per quantity over param_value
        std::vector<std::string> series;
        std::map<std::string, std::vector<std::pair<double, double>>> by_q;
        for (const ResultRow* r : rows) {
            if (!by_q.count(r->quantity)) series.push_back(r->quantity);
            by_q[r->quantity].emplace_back(r->param_value, r->value);
        }
        double xmin = rows.front()->param_value, xmax = xmin;
        double ymin = rows.front()->value, ymax = ymin;
        for (const ResultRow* r : rows) {
            xmin = std::min(xmin, r->param_value);
            xmax = std::max(xmax, r->param_value);
            ymin = std::min(ymin, r->value);
            ymax = std::max(ymax, r->value);
        }
        if (xmax == xmin) xmax = xmin + 1.0;
        if (ymax == ymin) ymax = ymin + 1.0;
        const double W = 640, H = 480, ML = 60, MR = 20, MT = 20, MB = 40;
        auto sx = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
        auto sy = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };
        static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                        "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

        const std::string svg_path = dir + "/" + exp + ".svg";
        std::ofstream svg(svg_path, std::ios::binary);
        if (!svg) throw IoError("emit_results: cannot write " + svg_path);
        svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
               "viewBox=\"0 0 640 480\">\n";
        svg << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
        svg << "<line x1=\"" << format_double(ML) << "\" y1=\"" << format_double(H - MB)
            << "\" x2=\"" << format_double(W - MR) << "\" y2=\"" << format_double(H - MB)
            << "\" stroke=\"black\"/>\n";
        svg << "<line x1=\"" << format_double(ML) << "\" y1=\"" << format_double(MT)
            << "\" x2=\"" << format_double(ML) << "\" y2=\"" << format_double(H - MB)
            << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << format_double(ML) << "\" y=\"" << format_double(H - 12)
            << "\" font-size=\"12\">" << format_double(xmin) << "</text>\n";
        svg << "<text x=\"" << format_double(W - MR - 40) << "\" y=\"" << format_double(H - 12)
            << "\" font-size=\"12\">" << format_double(xmax) << "</text>\n";
        svg << "<text x=\"4\" y=\"" << format_double(H - MB) << "\" font-size=\"12\">"
            << format_double(ymin) << "</text>\n";
        svg << "<text x=\"4\" y=\"" << format_double(MT + 10) << "\" font-size=\"12\">"
            << format_double(ymax) << "</text>\n";
        int si = 0;
        for (const std::string& qname : series) {
            auto pts = by_q[qname];
            std::stable_sort(pts.begin(), pts.end());
            svg << "<polyline fill=\"none\" stroke=\"" << palette[si % 8] << "\" points=\"";
            for (std::size_t i = 0; i < pts.size(); ++i) {
                if (i) svg << ' ';
                svg << format_double(sx(pts[i].first)) << ',' << format_double(sy(pts[i].second));
            }
            svg << "\"/>\n";
            svg << "<text x=\"" << format_double(W - MR - 150) << "\" y=\""
                << format_double(MT + 16 + 14 * si) << "\" font-size=\"12\" fill=\""
                << palette[si % 8] << "\">" << qname << "</text>\n";
            ++si;
        }
        svg << "</svg>\n";
        svg.close();
        written.push_back(svg_path);
    }
    return written;
}

ResultTable load_results(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("load_results: cannot open " + path);
    std::string line;
    int line_no = 0;
    ResultTable table;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (line_no == 1) {
            if (cells != std::vector<std::string>{"experiment", "param_name", "param_value",
                                                  "quantity", "value"})
                throw SchemaError(path + ":1: unexpected header");
            continue;
        }
        if (cells.size() != 5)
            throw SchemaError(path + ":" + std::to_string(line_no) + ": expected 5 columns");
        table.add(cells[0], cells[1], parse_double(cells[2], path, line_no), cells[3],
                  parse_double(cells[4], path, line_no));
    }
    return table;
}

ScenarioPack load_scenarios(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("load_scenarios: cannot open " + path);
    std::string line;
    int line_no = 0;

    struct Cell {
        bool have = false;
        double mu = 0.0;
    };
    // label -> (t, k) -> mu, plus signal means per (label, t)
    std::vector<std::string> labels;
    std::map<std::string, std::map<std::pair<long, long>, double>> mu;
    std::map<std::string, std::map<long, double>> sig;
    long t_max = -1, k_max = -1;

    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (line_no == 1) {
            if (cells != std::vector<std::string>{"scenario", "t", "factor_index", "mu",
                                                  "signal_mu"})
                throw SchemaError(path + ":1: expected header scenario,t,factor_index,mu,signal_mu");
            continue;
        }
        if (cells.size() != 5)
            throw SchemaError(path + ":" + std::to_string(line_no) + ": expected 5 columns");
        const std::string& label = cells[0];
        long t = parse_int(cells[1], path, line_no);
        long k = parse_int(cells[2], path, line_no);
        double m = parse_double(cells[3], path, line_no);
        double s = parse_double(cells[4], path, line_no);
        if (t < 0 || k < 0)
            throw SchemaError(path + ":" + std::to_string(line_no) + ": negative index");
        if (!mu.count(label)) labels.push_back(label);
        auto& cellmap = mu[label];
        if (cellmap.count({t, k}))
            throw SchemaError(path + ":" + std::to_string(line_no) + ": duplicate row");
        cellmap[{t, k}] = m;
        auto& sigmap = sig[label];
        auto it = sigmap.find(t);
        if (it == sigmap.end()) {
            sigmap[t] = s;
        } else if (it->second != s) {
            throw SchemaError(path + ":" + std::to_string(line_no) +
                              ": signal_mu differs across factor rows");
        }
        t_max = std::max(t_max, t);
        k_max = std::max(k_max, k);
    }
    if (labels.empty()) throw SchemaError(path + ": no data rows");

    ScenarioPack pack;
    pack.labels = labels;
    pack.horizon_T = static_cast<int>(t_max);
    pack.n_factors = static_cast<int>(k_max) + 1;
    pack.signal_means = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), t_max + 1);
    const std::size_t expected = static_cast<std::size_t>((t_max + 1) * (k_max + 1));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto& cellmap = mu[labels[i]];
        if (cellmap.size() != expected)
            throw LengthMismatch(path + ": scenario '" + labels[i] +
                                 "' does not cover every (t, factor) cell");
        Matrix m(t_max + 1, k_max + 1);
        for (const auto& [tk, v] : cellmap) m(tk.first, tk.second) = v;
        pack.mu_paths.push_back(std::move(m));
        for (long t = 0; t <= t_max; ++t)
            pack.signal_means(static_cast<Eigen::Index>(i), t) = sig[labels[i]][t];
    }
    return pack;
}

void write_scenarios(const ScenarioPack& pack, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("write_scenarios: cannot write " + path);
    os << "scenario,t,factor_index,mu,signal_mu\n";
    for (std::size_t i = 0; i < pack.labels.size(); ++i) {
        for (int t = 0; t <= pack.horizon_T; ++t) {
            for (int k = 0; k < pack.n_factors; ++k) {
                os << pack.labels[i] << ',' << t << ',' << k << ','
                   << format_double(pack.mu_paths[i](t, k)) << ','
                   << format_double(pack.signal_means(static_cast<Eigen::Index>(i), t)) << '\n';
            }
        }
    }
}

}  // namespace ambistop
